//! Soft metric spaces: the distance trait, axiom verification, and the two
//! backends (finite tables and closed-form analytic families).

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::soft_real::{ParamSet, SoftReal};

pub mod analytic;
pub mod tabulated;

pub use analytic::{
    AnalyticSpace, Family, MetricDescriptor, OpenBall, ParamPart, PointPart, SamplePlan,
};
pub use tabulated::{repair_to_metric, DistanceTable, ScalarTable, TabulatedSpace};

/// Margin used when checking axioms and contraction inequalities in floating point.
pub const ETA: f64 = 1e-9;

/// A soft metric: a map from pairs of soft points to soft reals.
pub trait SoftMetric {
    type Point: Clone + PartialEq + fmt::Debug;

    fn params(&self) -> &ParamSet;

    /// Number of soft real components produced by `distance`.
    fn components(&self) -> usize {
        self.params().len()
    }

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<SoftReal>;

    fn describe_point(&self, p: &Self::Point) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    /// Non-negativity.
    M1,
    /// Zero distance exactly on equal soft points.
    M2,
    /// Symmetry.
    M3,
    /// Triangle inequality.
    M4,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::M1 => "M1 (non-negativity)",
            Axiom::M2 => "M2 (zero iff equal)",
            Axiom::M3 => "M3 (symmetry)",
            Axiom::M4 => "M4 (triangle inequality)",
        };
        f.write_str(name)
    }
}

/// First witness of a violated axiom, with the total number of offending tuples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<P> {
    pub axiom: Axiom,
    pub witness: Vec<P>,
    /// Offending component, when the failure is component-specific.
    pub component: Option<usize>,
    /// The distances involved: `d(p,q)` for M1/M2, `[d(p,q), d(q,p)]` for
    /// M3 and `[d(x,z), d(x,y), d(y,z)]` for M4, at the offending component
    /// (or every component for M2).
    pub values: Vec<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Coverage {
    /// All ordered pairs and triples were checked: an empty report is a proof.
    Exhaustive { pairs: usize, triples: usize },
    /// Seeded samples only: an empty report means "not falsified".
    Sampled {
        pairs: usize,
        triples: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport<P> {
    pub coverage: Coverage,
    /// At most one entry per axiom, in axiom order.
    pub violations: Vec<Violation<P>>,
}

impl<P> AxiomReport<P> {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violation(&self, axiom: Axiom) -> Option<&Violation<P>> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }

    pub fn verdict(&self) -> &'static str {
        match (self.holds(), self.coverage) {
            (false, _) => "violated",
            (true, Coverage::Exhaustive { .. }) => "verified",
            (true, Coverage::Sampled { .. }) => "not falsified",
        }
    }

    pub fn map_points<Q>(self, f: impl Fn(&P) -> Q) -> AxiomReport<Q> {
        AxiomReport {
            coverage: self.coverage,
            violations: self
                .violations
                .into_iter()
                .map(|v| Violation {
                    axiom: v.axiom,
                    witness: v.witness.iter().map(&f).collect(),
                    component: v.component,
                    values: v.values,
                    count: v.count,
                })
                .collect(),
        }
    }
}

/// Collects axiom violations from individual pair and triple checks.
pub(crate) struct AxiomAccumulator<P> {
    eta: f64,
    found: [Option<Violation<P>>; 4],
    pairs: usize,
    triples: usize,
}

impl<P: Clone> AxiomAccumulator<P> {
    pub(crate) fn new(eta: f64) -> Self {
        AxiomAccumulator {
            eta,
            found: [None, None, None, None],
            pairs: 0,
            triples: 0,
        }
    }

    fn record(&mut self, axiom: Axiom, witness: &[&P], component: Option<usize>, values: Vec<f64>) {
        let slot = &mut self.found[axiom as usize];
        match slot {
            Some(v) => v.count += 1,
            None => {
                *slot = Some(Violation {
                    axiom,
                    witness: witness.iter().map(|&p| p.clone()).collect(),
                    component,
                    values,
                    count: 1,
                })
            }
        }
    }

    /// Checks M1-M3 on an ordered pair given both orientations of the distance.
    pub(crate) fn check_pair(
        &mut self,
        p: &P,
        q: &P,
        equal: bool,
        d_pq: &SoftReal,
        d_qp: &SoftReal,
    ) {
        self.pairs += 1;
        let eta = self.eta;
        if let Some(k) = d_pq.entries().iter().position(|&v| v < -eta) {
            self.record(Axiom::M1, &[p, q], Some(k), vec![d_pq.get(k)]);
        }
        let zero = d_pq.is_zero_within(eta);
        if equal != zero {
            self.record(Axiom::M2, &[p, q], None, d_pq.entries().to_vec());
        }
        if let Some(k) = d_pq
            .entries()
            .iter()
            .zip(d_qp.entries())
            .position(|(a, b)| (a - b).abs() > eta)
        {
            self.record(Axiom::M3, &[p, q], Some(k), vec![d_pq.get(k), d_qp.get(k)]);
        }
    }

    /// Checks `d(x,z) <= d(x,y) + d(y,z)` componentwise.
    pub(crate) fn check_triple(
        &mut self,
        x: &P,
        y: &P,
        z: &P,
        d_xz: &SoftReal,
        d_xy: &SoftReal,
        d_yz: &SoftReal,
    ) {
        self.triples += 1;
        let eta = self.eta;
        let offending = (0..d_xz.len()).find(|&k| d_xz.get(k) > d_xy.get(k) + d_yz.get(k) + eta);
        if let Some(k) = offending {
            self.record(
                Axiom::M4,
                &[x, y, z],
                Some(k),
                vec![d_xz.get(k), d_xy.get(k), d_yz.get(k)],
            );
        }
    }

    pub(crate) fn finish(self, seed: Option<u64>) -> AxiomReport<P> {
        let coverage = match seed {
            None => Coverage::Exhaustive {
                pairs: self.pairs,
                triples: self.triples,
            },
            Some(seed) => Coverage::Sampled {
                pairs: self.pairs,
                triples: self.triples,
                seed,
            },
        };
        AxiomReport {
            coverage,
            violations: self.found.into_iter().flatten().collect(),
        }
    }
}
