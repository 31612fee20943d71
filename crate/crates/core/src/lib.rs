//! Soft metric spaces over finite parameter sets.

pub mod descriptor;
pub mod error;
pub mod fixed_point;
pub mod mapping;
pub mod metric;
pub mod soft_real;
pub mod soft_set;
pub mod topology;

pub use error::{Result, SoftError};
