//! Topology induced by a soft metric: openness, closure, interior and
//! boundary membership via point-to-set distances, and separation of
//! disjoint closed sets by unions of open balls.
//!
//! The topology itself is never materialized; every question is answered
//! by distances.

use serde::Serialize;

use crate::error::{Result, SoftError};
use crate::metric::{AnalyticSpace, OpenBall, SoftMetric, TabulatedSpace};
use crate::soft_real::SoftReal;
use crate::soft_set::{FinitePoint, SoftSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Closure,
    Interior,
    Boundary,
}

/// A set whose distance to a point, and whose complement's distance to a
/// point, can be computed. `None` stands for a null set.
pub trait MeasurableSet<S: SoftMetric> {
    fn dist_from(&self, space: &S, p: &S::Point) -> Result<Option<SoftReal>>;
    fn complement_dist_from(&self, space: &S, p: &S::Point) -> Result<Option<SoftReal>>;
}

impl MeasurableSet<TabulatedSpace> for SoftSet {
    fn dist_from(&self, space: &TabulatedSpace, p: &FinitePoint) -> Result<Option<SoftReal>> {
        if self.is_null() {
            return Ok(None);
        }
        space.dist_to_set(p, self).map(Some)
    }

    fn complement_dist_from(
        &self,
        space: &TabulatedSpace,
        p: &FinitePoint,
    ) -> Result<Option<SoftReal>> {
        self.complement().dist_from(space, p)
    }
}

impl MeasurableSet<AnalyticSpace> for OpenBall {
    fn dist_from(
        &self,
        space: &AnalyticSpace,
        p: &<AnalyticSpace as SoftMetric>::Point,
    ) -> Result<Option<SoftReal>> {
        space.dist_to_ball(p, self).map(Some)
    }

    fn complement_dist_from(
        &self,
        space: &AnalyticSpace,
        p: &<AnalyticSpace as SoftMetric>::Point,
    ) -> Result<Option<SoftReal>> {
        space.dist_to_ball_complement(p, self)
    }
}

/// Membership of `p` in the closure, interior or boundary of `set`.
///
/// Closure: distance to the set is `0` in every component. Interior:
/// distance to the complement is strictly positive in every component.
/// Boundary: both distances vanish. Values within `eta` of zero count as
/// zero; pass `0.0` for exact evaluation.
pub fn region_membership<S, T>(
    space: &S,
    set: &T,
    p: &S::Point,
    region: Region,
    eta: f64,
) -> Result<bool>
where
    S: SoftMetric,
    T: MeasurableSet<S>,
{
    let vanishes = |d: &Option<SoftReal>| d.as_ref().is_some_and(|d| d.is_zero_within(eta));
    Ok(match region {
        Region::Closure => vanishes(&set.dist_from(space, p)?),
        Region::Interior => match set.complement_dist_from(space, p)? {
            None => true,
            Some(d) => d.entries().iter().all(|&v| v > eta),
        },
        Region::Boundary => {
            vanishes(&set.dist_from(space, p)?) && vanishes(&set.complement_dist_from(space, p)?)
        }
    })
}

/// Materializes a region of a finite soft set.
pub fn region_set(space: &TabulatedSpace, set: &SoftSet, region: Region) -> Result<SoftSet> {
    let mut out = space.null_set();
    for p in space.points() {
        if region_membership(space, set, &p, region, 0.0)? {
            out.insert(&p);
        }
    }
    Ok(out)
}

pub fn closure(space: &TabulatedSpace, set: &SoftSet) -> Result<SoftSet> {
    region_set(space, set, Region::Closure)
}

pub fn interior(space: &TabulatedSpace, set: &SoftSet) -> Result<SoftSet> {
    region_set(space, set, Region::Interior)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpenVerdict {
    pub open: bool,
    /// A point of the set with no open ball inside the set.
    pub witness: Option<FinitePoint>,
}

/// Whether every soft point of `set` has an open ball around it inside `set`.
///
/// The candidate radius for `p` takes, per component, half the smallest
/// positive distance from `p` to the complement's points (any positive value
/// when there is none), and the ball is then checked directly.
pub fn is_open(space: &TabulatedSpace, set: &SoftSet) -> Result<OpenVerdict> {
    let outside = set.complement().points();
    let k = space.components();
    for p in set.points() {
        let mut radius = vec![f64::INFINITY; k];
        for q in &outside {
            let d = space.distance(&p, q)?;
            for (r, &v) in radius.iter_mut().zip(d.entries()) {
                if v > 0.0 {
                    *r = r.min(v / 2.0);
                }
            }
        }
        let radius: Vec<f64> = radius
            .into_iter()
            .map(|r| if r.is_finite() { r } else { 1.0 })
            .collect();
        let radius = SoftReal::new(radius)?;
        let contained = outside
            .iter()
            .map(|q| space.in_ball(&p, &radius, false, q))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|inside| !inside);
        if !contained {
            return Ok(OpenVerdict {
                open: false,
                witness: Some(p),
            });
        }
    }
    Ok(OpenVerdict {
        open: true,
        witness: None,
    })
}

pub fn is_closed(space: &TabulatedSpace, set: &SoftSet) -> Result<bool> {
    Ok(is_open(space, &set.complement())?.open)
}

/// Whether the `label` section of `set` is open in the ordinary metric
/// space `(X, d_label)`.
pub fn section_is_open(space: &TabulatedSpace, set: &SoftSet, label: usize) -> Result<bool> {
    let d = space.project(label)?;
    let section = set.section(label);
    let n = space.universe().len();
    for &x in section {
        let outside: Vec<usize> = (0..n).filter(|y| !section.contains(y)).collect();
        let radius = outside
            .iter()
            .map(|&y| d.get(x, y))
            .filter(|&v| v > 0.0)
            .fold(f64::INFINITY, f64::min)
            / 2.0;
        let radius = if radius.is_finite() { radius } else { 1.0 };
        if outside.iter().any(|&y| d.get(x, y) < radius) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Disjoint open neighbourhoods of two disjoint closed sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Separation {
    pub u: SoftSet,
    pub v: SoftSet,
    /// `(p, eps_p)` for every point of the first set, `eps_p` being its
    /// distance to the second set; the ball around `p` has radius `eps_p / 3`.
    pub radii_first: Vec<(FinitePoint, SoftReal)>,
    pub radii_second: Vec<(FinitePoint, SoftReal)>,
}

/// Separates disjoint closed sets `f1`, `f2` by open sets `U ⊇ f1`,
/// `V ⊇ f2` with `U ∩ V` null. `U` is the union of the balls around each
/// `p` in `f1` whose radius is a third of the distance from `p` to `f2`, and
/// `V` symmetrically.
pub fn separate_closed_sets(
    space: &TabulatedSpace,
    f1: &SoftSet,
    f2: &SoftSet,
) -> Result<Separation> {
    if f1.is_null() || f2.is_null() {
        return Err(SoftError::Precondition("both sets must be non-null".into()));
    }
    if !f1.intersect(f2)?.is_null() {
        return Err(SoftError::Precondition("the sets are not disjoint".into()));
    }
    for (name, f) in [("first", f1), ("second", f2)] {
        if !is_closed(space, f)? {
            return Err(SoftError::Precondition(format!(
                "the {name} set is not closed"
            )));
        }
    }
    let neighbourhood =
        |from: &SoftSet, to: &SoftSet| -> Result<(SoftSet, Vec<(FinitePoint, SoftReal)>)> {
            let mut union = space.null_set();
            let mut radii = Vec::new();
            for p in from.points() {
                let eps = space.dist_to_set(&p, to)?;
                if !eps.is_positive() {
                    return Err(SoftError::Degenerate(format!(
                        "distance from {} to the other set has a zero component",
                        space.describe_point(&p)
                    )));
                }
                let ball = space.ball(&p, &eps.scale(1.0 / 3.0)?, false)?;
                union = union.union(&ball)?;
                radii.push((p, eps));
            }
            Ok((union, radii))
        };
    let (u, radii_first) = neighbourhood(f1, f2)?;
    let (v, radii_second) = neighbourhood(f2, f1)?;
    Ok(Separation {
        u,
        v,
        radii_first,
        radii_second,
    })
}
