//! Self-contained worked examples: a distance that fails only the identity
//! axiom, a mapping that contracts every label slice but not the soft
//! metric, and an inequality chain for a mapping with a reciprocal label map.

use rand::Rng;
use serde::Serialize;

use crate::error::{Result, SoftError};
use crate::mapping::{AnalyticMapping, ParamMap, SoftMap};
use crate::metric::{
    AnalyticSpace, Axiom, AxiomReport, Family, MetricDescriptor, ParamPart, PointPart, SamplePlan,
    SoftMetric, ETA,
};
use crate::soft_real::ParamSet;
use crate::soft_set::{AnalyticPoint, SoftPoint};

use super::{
    estimate_coefficient, project_contraction_check_analytic, ContractionKind, ContractionReport,
    PairPlan, ProjectionCheck,
};

pub const EXAMPLE_IDS: [&str; 3] = ["3.2", "4.12", "4.14"];

const SEED: u64 = 42;
const SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "example")]
pub enum Replay {
    #[serde(rename = "3.2")]
    PowerDistance(PowerDistanceReplay),
    #[serde(rename = "4.12")]
    SliceContraction(SliceContractionReplay),
    #[serde(rename = "4.14")]
    ReciprocalChain(ReciprocalChainReplay),
}

impl Replay {
    /// Whether the property the example is about holds. Only the chain
    /// example is a positive one.
    pub fn property_holds(&self) -> bool {
        match self {
            Replay::PowerDistance(r) => r.discrete.holds(),
            Replay::SliceContraction(r) => r.banach.feasible,
            Replay::ReciprocalChain(r) => r.chain_holds,
        }
    }

    /// Whether the replay reproduced the expected behaviour.
    pub fn confirmed(&self) -> bool {
        match self {
            Replay::PowerDistance(r) => r.confirmed,
            Replay::SliceContraction(r) => r.confirmed,
            Replay::ReciprocalChain(r) => r.chain_holds,
        }
    }
}

pub fn replay_example(id: &str) -> Result<Replay> {
    match id {
        "3.2" => power_distance().map(Replay::PowerDistance),
        "4.12" => slice_contraction().map(Replay::SliceContraction),
        "4.14" => reciprocal_chain().map(Replay::ReciprocalChain),
        other => Err(SoftError::Domain(format!(
            "unknown example {other:?}; expected one of {}",
            EXAMPLE_IDS.join(", ")
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerDistanceReplay {
    /// `rho(x, y)^(1 + |l - m|)` with the discrete metric on the reals.
    pub discrete: AxiomReport<AnalyticPoint>,
    /// The same exponent over the euclidean line.
    pub euclidean: AxiomReport<AnalyticPoint>,
    /// Every fixed-label slice is an ordinary metric (sampled).
    pub slices_are_metrics: bool,
    /// Exactly one violated axiom, M2, witnessed by one element under two labels
    /// at distance zero.
    pub confirmed: bool,
}

fn power_distance() -> Result<PowerDistanceReplay> {
    let params = ParamSet::numeric(&[0.0, 0.5, 1.0, 2.0])?;
    let plan = SamplePlan::new(SAMPLES, SEED);
    let build = |point_part| -> Result<AnalyticSpace> {
        let metric = MetricDescriptor::new(Family::Power, ParamPart::AbsDiff, 1.0, point_part)?;
        AnalyticSpace::new(params.clone(), 1, metric)
    };
    let discrete_space = build(PointPart::Discrete)?;
    let euclidean_space = build(PointPart::Euclidean)?;
    let discrete = discrete_space.check_axioms(&plan, ETA);
    let euclidean = euclidean_space.check_axioms(&plan, ETA);
    let mut slices_are_metrics = true;
    for space in [&discrete_space, &euclidean_space] {
        for &label in space.label_values() {
            slices_are_metrics &= space.check_projection_axioms(label, &plan, ETA).holds();
        }
    }
    let confirmed = discrete.violations.len() == 1
        && discrete.violation(Axiom::M2).is_some_and(|v| {
            let (p, q) = (&v.witness[0], &v.witness[1]);
            p.element == q.element && p.label != q.label && v.values.iter().all(|&d| d == 0.0)
        });
    Ok(PowerDistanceReplay {
        discrete,
        euclidean,
        slices_are_metrics,
        confirmed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceContractionReplay {
    pub p: AnalyticPoint,
    pub q: AnalyticPoint,
    pub image_p: AnalyticPoint,
    pub image_q: AnalyticPoint,
    /// `d(m(p), m(q))`, expected `3 + sqrt(2) / 2`.
    pub mapped_distance: f64,
    /// `d(p, q)`, expected `1 + sqrt(2)`.
    pub original_distance: f64,
    pub ratio: f64,
    pub banach: ContractionReport<AnalyticPoint>,
    pub projections: ProjectionCheck,
    /// The mapped distance exceeds the original one, the soft mapping is
    /// not a contraction, and every slice factor is below 1.
    pub confirmed: bool,
}

/// Space and mapping of the slice-contraction example: the plane with
/// `|l - m| + ||x - y||` and `(x, l) -> (x / 2, 3 l)`.
pub fn slice_contraction_setup() -> Result<(AnalyticSpace, AnalyticMapping)> {
    let space = AnalyticSpace::new(
        ParamSet::numeric(&[1.0, 2.0, 3.0, 6.0])?,
        2,
        MetricDescriptor::sum_euclidean(1.0),
    )?;
    let m = AnalyticMapping::scaling(2, 0.5, ParamMap::Affine { a: 3.0, c: 0.0 })?;
    Ok((space, m))
}

fn slice_contraction() -> Result<SliceContractionReplay> {
    let (space, m) = slice_contraction_setup()?;
    let p = space.point(vec![0.0, 1.0], 2.0)?;
    let q = space.point(vec![1.0, 0.0], 1.0)?;
    let image_p = m.apply(&p)?;
    let image_q = m.apply(&q)?;
    let mapped_distance = space.distance(&image_p, &image_q)?.sup();
    let original_distance = space.distance(&p, &q)?.sup();

    let plan = SamplePlan::new(SAMPLES, SEED);
    let (mut pairs, _) = super::PairSource::pairs(&space, &PairPlan::Sampled(plan))?;
    pairs.insert(0, (p.clone(), q.clone()));
    let banach =
        estimate_coefficient(&space, &m, ContractionKind::Banach, &PairPlan::Pairs(pairs))?;
    let projections = project_contraction_check_analytic(&space, &m, &banach, &plan)?;
    let confirmed = mapped_distance > original_distance
        && !banach.feasible
        && projections
            .factors
            .iter()
            .all(|f| f.factor.is_some_and(|v| v < 1.0));
    Ok(SliceContractionReplay {
        ratio: mapped_distance / original_distance,
        p,
        q,
        image_p,
        image_q,
        mapped_distance,
        original_distance,
        banach,
        projections,
        confirmed,
    })
}

/// Lines of the displayed chain for `(x, l) -> (x / 5, l + 1 / l)` under
/// `d1(l, m) / 2 + |x - y|` with `d1 = min(|l - m|, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainLines {
    /// Soft distance of the images.
    pub l0: f64,
    /// `d1(phi l, phi m) / 2 + |x - y| / 5`.
    pub l1: f64,
    /// The third line exactly as printed, with `- mu + 1/mu` inside the
    /// absolute value. Informational only.
    pub l2_verbatim: f64,
    /// `min(|l - m| |1 - 1/(l m)|, 1) / 2 + |x - y| / 5`.
    pub l3: f64,
    /// `min(|l - m|, 1) / 2 + |x - y| / 5`.
    pub l4: f64,
    /// `d1(l, m) / 2 + d(x, y) / 5`.
    pub l5: f64,
    /// `3/4 (d1(l, m) + d(x, y))`.
    pub l6: f64,
}

fn d1(a: f64, b: f64) -> f64 {
    (a - b).abs().min(1.0)
}

fn phi(v: f64) -> f64 {
    v + 1.0 / v
}

pub fn chain_lines(lambda: f64, mu: f64, x: f64, y: f64) -> ChainLines {
    let fx = x / 5.0;
    let fy = y / 5.0;
    let point = (x - y).abs();
    ChainLines {
        l0: 0.5 * d1(phi(lambda), phi(mu)) + (fx - fy).abs(),
        l1: 0.5 * d1(phi(lambda), phi(mu)) + point / 5.0,
        l2_verbatim: 0.5 * (lambda + 1.0 / lambda - mu + 1.0 / mu).abs().min(1.0) + point / 5.0,
        l3: 0.5 * ((lambda - mu).abs() * (1.0 - 1.0 / (lambda * mu)).abs()).min(1.0) + point / 5.0,
        l4: 0.5 * (lambda - mu).abs().min(1.0) + point / 5.0,
        l5: 0.5 * d1(lambda, mu) + point / 5.0,
        l6: 0.75 * (d1(lambda, mu) + point),
    }
}

impl ChainLines {
    /// Largest violation of `l0 = l1 = l3 <= l4 <= l5 <= l6`; zero or
    /// negative when the chain holds exactly.
    pub fn worst_gap(&self) -> f64 {
        [
            (self.l0 - self.l1).abs(),
            (self.l1 - self.l3).abs(),
            self.l3 - self.l4,
            self.l4 - self.l5,
            self.l5 - self.l6,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub const CHAIN_TOLERANCE: f64 = 1e-12;

pub const CHAIN_NOTE: &str =
    "The chain ends at 3/4 (d1 + d), which is not 3/4 of the soft distance \
d1/2 + d, so it does not yield a uniform soft contraction constant. The label-part ratio \
d1(phi l, phi m) / d1(l, m) approaches 1 as the labels grow. The coefficient reported here is \
empirical and is not asserted to be below 1 in general. The third line as printed flips the sign \
of 1/mu; it is evaluated for information and the corrected line is the one checked.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReciprocalChainReplay {
    pub samples: usize,
    pub seed: u64,
    /// Lines at `(l, m, x, y) = (1, 2, 5, 0)`.
    pub worked: ChainLines,
    pub worst_gap: f64,
    pub chain_holds: bool,
    /// Samples where the verbatim third line differs from the second.
    pub verbatim_mismatches: usize,
    pub verbatim_max_deviation: f64,
    /// Empirical Banach coefficient over the sampled pairs.
    pub banach: ContractionReport<AnalyticPoint>,
    /// `sup d1(phi l, phi m) / d1(l, m)` over the sampled label pairs.
    pub label_ratio_sup: f64,
    pub note: &'static str,
}

/// Space and mapping of the chain example on the real line.
pub fn reciprocal_chain_setup() -> Result<(AnalyticSpace, AnalyticMapping)> {
    let metric = MetricDescriptor::new(
        Family::Sum,
        ParamPart::CappedAbsDiff { cap: 1.0 },
        0.5,
        PointPart::Euclidean,
    )?;
    let space = AnalyticSpace::new(ParamSet::numeric(&[1.0, 2.0, 10.0, 100.0])?, 1, metric)?;
    let m = AnalyticMapping::scaling(1, 0.2, ParamMap::RecipSum)?;
    Ok((space, m))
}

fn reciprocal_chain() -> Result<ReciprocalChainReplay> {
    const TUPLES: usize = 1_000;
    let (space, m) = reciprocal_chain_setup()?;
    let mut rng = SamplePlan::new(TUPLES, SEED).rng();
    let mut worst_gap = f64::NEG_INFINITY;
    let mut verbatim_mismatches = 0;
    let mut verbatim_max_deviation = 0.0_f64;
    let mut label_ratio_sup = 0.0_f64;
    let mut pairs = Vec::with_capacity(TUPLES);
    for _ in 0..TUPLES {
        let lambda = rng.random_range(1.0..=100.0);
        let mu = rng.random_range(1.0..=100.0);
        let x = rng.random_range(-100.0..=100.0);
        let y = rng.random_range(-100.0..=100.0);
        let lines = chain_lines(lambda, mu, x, y);
        worst_gap = worst_gap.max(lines.worst_gap());
        let deviation = (lines.l2_verbatim - lines.l1).abs();
        if deviation > CHAIN_TOLERANCE {
            verbatim_mismatches += 1;
        }
        verbatim_max_deviation = verbatim_max_deviation.max(deviation);
        if lambda != mu {
            label_ratio_sup = label_ratio_sup.max(d1(phi(lambda), phi(mu)) / d1(lambda, mu));
        }
        pairs.push((SoftPoint::new(vec![x], lambda), SoftPoint::new(vec![y], mu)));
    }
    let banach =
        estimate_coefficient(&space, &m, ContractionKind::Banach, &PairPlan::Pairs(pairs))?;
    Ok(ReciprocalChainReplay {
        samples: TUPLES,
        seed: SEED,
        worked: chain_lines(1.0, 2.0, 5.0, 0.0),
        worst_gap,
        chain_holds: worst_gap <= CHAIN_TOLERANCE,
        verbatim_mismatches,
        verbatim_max_deviation,
        banach,
        label_ratio_sup,
        note: CHAIN_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_chain_values() {
        let l = chain_lines(1.0, 2.0, 5.0, 0.0);
        assert!((l.l0 - 1.25).abs() < 1e-15);
        assert!((l.l6 - 4.5).abs() < 1e-15);
        assert!(l.worst_gap() <= 0.0);
    }

    #[test]
    fn unknown_example() {
        assert!(replay_example("9.9").is_err());
    }

    #[test]
    fn slice_contraction_distances() {
        let Replay::SliceContraction(r) = replay_example("4.12").unwrap() else {
            panic!("wrong variant");
        };
        assert!((r.mapped_distance - (3.0 + 2f64.sqrt() / 2.0)).abs() < 1e-12);
        assert!((r.original_distance - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!(r.confirmed);
    }
}
