//! Contraction coefficients for the Banach, Kannan and Chatterjea
//! conditions, a Picard solver with a priori stopping, brute-force fixed
//! points on finite spaces, and per-label projection factors.

use rand::Rng;
use serde::Serialize;

use crate::error::{Result, SoftError};
use crate::mapping::{AnalyticMapping, SoftMap, TableMapping};
use crate::metric::{AnalyticSpace, SamplePlan, SoftMetric, TabulatedSpace, ETA};
use crate::soft_real::{geometric_tail_bound, SoftReal};
use crate::soft_set::{AnalyticPoint, FinitePoint, SoftPoint};

pub mod replay;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionKind {
    /// `d(mp, mq) <= a d(p, q)`.
    Banach,
    /// `d(mp, mq) <= a (d(mp, p) + d(mq, q))`.
    Kannan,
    /// `d(mp, mq) <= a (d(mp, q) + d(mq, p))`.
    Chatterjea,
}

impl ContractionKind {
    pub fn threshold(self) -> f64 {
        match self {
            ContractionKind::Banach => 1.0,
            ContractionKind::Kannan | ContractionKind::Chatterjea => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ContractionKind::Banach => "banach",
            ContractionKind::Kannan => "kannan",
            ContractionKind::Chatterjea => "chatterjea",
        }
    }
}

/// Which pairs of soft points to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum PairPlan<P> {
    /// Every unordered pair of distinct soft points (finite spaces only).
    Exhaustive,
    Sampled(SamplePlan),
    Pairs(Vec<(P, P)>),
}

/// Planned pairs and whether they cover the whole space.
pub type Pairs<P> = (Vec<(P, P)>, bool);

/// Spaces able to produce pairs for coefficient estimation.
pub trait PairSource: SoftMetric {
    fn pairs(&self, plan: &PairPlan<Self::Point>) -> Result<Pairs<Self::Point>>;
}

impl PairSource for TabulatedSpace {
    fn pairs(
        &self,
        plan: &PairPlan<FinitePoint>,
    ) -> Result<(Vec<(FinitePoint, FinitePoint)>, bool)> {
        let points: Vec<FinitePoint> = self.points().collect();
        match plan {
            PairPlan::Exhaustive => {
                let mut pairs = Vec::new();
                for (i, p) in points.iter().enumerate() {
                    for q in &points[i + 1..] {
                        pairs.push((*p, *q));
                    }
                }
                Ok((pairs, true))
            }
            PairPlan::Sampled(plan) => {
                let mut rng = plan.rng();
                let n = points.len();
                let pairs = (0..plan.samples)
                    .map(|_| {
                        (
                            points[rng.random_range(0..n)],
                            points[rng.random_range(0..n)],
                        )
                    })
                    .collect();
                Ok((pairs, false))
            }
            PairPlan::Pairs(pairs) => Ok((pairs.clone(), false)),
        }
    }
}

impl PairSource for AnalyticSpace {
    fn pairs(
        &self,
        plan: &PairPlan<AnalyticPoint>,
    ) -> Result<(Vec<(AnalyticPoint, AnalyticPoint)>, bool)> {
        match plan {
            PairPlan::Exhaustive => Err(SoftError::Domain(
                "analytic spaces cannot be enumerated; use a sampled plan".into(),
            )),
            PairPlan::Sampled(plan) => {
                let mut rng = plan.rng();
                let pairs = (0..plan.samples)
                    .map(|_| {
                        (
                            self.random_point(&mut rng, plan.box_radius),
                            self.random_point(&mut rng, plan.box_radius),
                        )
                    })
                    .collect();
                Ok((pairs, false))
            }
            PairPlan::Pairs(pairs) => Ok((pairs.clone(), false)),
        }
    }
}

/// All ordered pairs of `n` evenly spaced points on `[lo, hi]` at one label,
/// in a one-dimensional analytic space.
pub fn grid_pairs(label: f64, lo: f64, hi: f64, n: usize) -> Vec<(AnalyticPoint, AnalyticPoint)> {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    let grid: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    let mut pairs = Vec::with_capacity(n * n);
    for &x in &grid {
        for &y in &grid {
            pairs.push((
                SoftPoint::new(vec![x], label),
                SoftPoint::new(vec![y], label),
            ));
        }
    }
    pairs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport<P> {
    pub kind: ContractionKind,
    /// Componentwise supremum of the condition ratio over evaluated pairs.
    pub alpha_hat: SoftReal,
    pub feasible: bool,
    /// Pair with the largest sup-component ratio.
    pub witness: Option<(P, P)>,
    pub witness_ratio: f64,
    /// A pair with zero denominator and positive numerator was found.
    pub unbounded: bool,
    pub pairs_evaluated: usize,
    pub exhaustive: bool,
}

impl<P> ContractionReport<P> {
    /// Step rate of the Picard iteration: `alpha` for Banach and
    /// `alpha / (1 - alpha)` for Kannan and Chatterjea.
    pub fn rate(&self) -> Result<SoftReal> {
        match self.kind {
            ContractionKind::Banach => Ok(self.alpha_hat.clone()),
            ContractionKind::Kannan | ContractionKind::Chatterjea => {
                let one = SoftReal::one(self.alpha_hat.len());
                self.alpha_hat.div(&one.sub(&self.alpha_hat)?)
            }
        }
    }

    pub fn verdict(&self) -> &'static str {
        match (self.feasible, self.exhaustive) {
            (false, _) => "infeasible",
            (true, true) => "feasible",
            (true, false) => "feasible (not falsified)",
        }
    }
}

fn condition_terms<S, M>(
    space: &S,
    m: &M,
    kind: ContractionKind,
    p: &S::Point,
    q: &S::Point,
) -> Result<(SoftReal, SoftReal)>
where
    S: SoftMetric,
    M: SoftMap<S::Point>,
{
    let mp = m.apply(p)?;
    let mq = m.apply(q)?;
    let numerator = space.distance(&mp, &mq)?;
    let denominator = match kind {
        ContractionKind::Banach => space.distance(p, q)?,
        ContractionKind::Kannan => space.distance(&mp, p)?.add(&space.distance(&mq, q)?)?,
        ContractionKind::Chatterjea => space.distance(&mp, q)?.add(&space.distance(&mq, p)?)?,
    };
    Ok((numerator, denominator))
}

/// Estimates the smallest constant for which the chosen condition holds on
/// the planned pairs.
pub fn estimate_coefficient<S, M>(
    space: &S,
    m: &M,
    kind: ContractionKind,
    plan: &PairPlan<S::Point>,
) -> Result<ContractionReport<S::Point>>
where
    S: PairSource,
    M: SoftMap<S::Point>,
{
    let (pairs, exhaustive) = space.pairs(plan)?;
    if pairs.is_empty() {
        return Err(SoftError::Domain("no pairs to evaluate".into()));
    }
    let k = space.components();
    let mut alpha = vec![0.0_f64; k];
    let mut witness = None;
    let mut witness_ratio = f64::NEG_INFINITY;
    let mut unbounded = false;
    for (p, q) in &pairs {
        let (num, den) = condition_terms(space, m, kind, p, q)?;
        let mut pair_sup = f64::NEG_INFINITY;
        for (e, slot) in alpha.iter_mut().enumerate() {
            let (n, d) = (num.get(e), den.get(e));
            let ratio = if d == 0.0 {
                if n == 0.0 {
                    continue;
                }
                f64::INFINITY
            } else {
                n / d
            };
            pair_sup = pair_sup.max(ratio);
            if ratio.is_finite() {
                *slot = slot.max(ratio);
            }
        }
        if pair_sup == f64::INFINITY && !unbounded {
            unbounded = true;
            witness = Some((p.clone(), q.clone()));
            witness_ratio = f64::INFINITY;
        } else if !unbounded && pair_sup > witness_ratio {
            witness = Some((p.clone(), q.clone()));
            witness_ratio = pair_sup;
        }
    }
    let threshold = kind.threshold();
    let feasible = !unbounded && alpha.iter().all(|&a| a < threshold - ETA);
    Ok(ContractionReport {
        kind,
        alpha_hat: SoftReal::new(alpha)?,
        feasible,
        witness,
        witness_ratio: witness_ratio.max(0.0),
        unbounded,
        pairs_evaluated: pairs.len(),
        exhaustive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace<P> {
    pub kind: ContractionKind,
    pub rate: SoftReal,
    /// `x^0, x^1, ...`.
    pub iterates: Vec<P>,
    /// `d(x^{n+1}, x^n)`.
    pub step_dists: Vec<SoftReal>,
    /// `rate^n / (1 - rate) * d(x^1, x^0)`, a bound on `d(x^n, x*)`.
    pub apriori_bounds: Vec<SoftReal>,
    pub converged: bool,
    pub fixed_point: Option<P>,
    /// `d(m(x), x)` at the last iterate.
    pub residual: SoftReal,
}

impl<P> IterationTrace<P> {
    /// Number of map applications that produced the returned fixed point.
    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }
}

/// Picard iteration `x^{n+1} = m(x^n)`, stopped once the a priori bound on
/// `d(x^n, x*)` drops below `tol` in every component, or at once when a
/// step has zero length.
///
/// Every step is checked against the recursion
/// `d(x^{n+1}, x^n) <= rate * d(x^n, x^{n-1})`; a larger observed ratio
/// means the estimated coefficient was too optimistic and aborts the run.
pub fn picard_solve<S, M>(
    space: &S,
    m: &M,
    report: &ContractionReport<S::Point>,
    x0: S::Point,
    tol: f64,
    max_iter: usize,
) -> Result<IterationTrace<S::Point>>
where
    S: SoftMetric,
    M: SoftMap<S::Point>,
{
    if !report.feasible {
        return Err(SoftError::Precondition(format!(
            "the {} report is infeasible",
            report.kind.name()
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(SoftError::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let rate = report.rate()?;
    if let Some(k) = rate.entries().iter().position(|&r| r >= 1.0) {
        return Err(SoftError::Precondition(format!(
            "rate component {k} is {} >= 1",
            rate.get(k)
        )));
    }

    let mut iterates = vec![x0];
    let mut step_dists: Vec<SoftReal> = Vec::new();
    let mut apriori_bounds = Vec::new();
    let mut converged = false;
    loop {
        let n = iterates.len() - 1;
        let next = m.apply(&iterates[n])?;
        let step = space.distance(&next, &iterates[n])?;
        if let Some(prev) = step_dists.last() {
            for e in 0..step.len() {
                let limit = rate.get(e) * prev.get(e) + ETA;
                if step.get(e) > limit {
                    return Err(SoftError::RateViolation {
                        step: n,
                        observed: if prev.get(e) > 0.0 {
                            step.get(e) / prev.get(e)
                        } else {
                            f64::INFINITY
                        },
                        rate: rate.get(e),
                    });
                }
            }
        }
        let exact = step.is_zero();
        step_dists.push(step);
        let bound = geometric_tail_bound(&rate, n, &step_dists[0])?;
        let certified = bound.sup() < tol;
        apriori_bounds.push(bound);
        if exact || certified {
            converged = true;
            break;
        }
        if n + 1 >= max_iter {
            break;
        }
        iterates.push(next);
    }
    let x = iterates[iterates.len() - 1].clone();
    let residual = space.distance(&m.apply(&x)?, &x)?;
    Ok(IterationTrace {
        kind: report.kind,
        rate,
        iterates,
        step_dists,
        apriori_bounds,
        converged,
        fixed_point: converged.then_some(x),
        residual,
    })
}

/// Every soft point with `m(p) = p`, by exhaustive scan.
pub fn brute_force_fixed_points(
    space: &TabulatedSpace,
    m: &TableMapping,
) -> Result<Vec<FinitePoint>> {
    if m.domain_elements() != space.universe().len() || m.domain_labels() != space.params().len() {
        return Err(SoftError::Domain("mapping does not match the space".into()));
    }
    let mut fixed = Vec::new();
    for p in space.points() {
        if m.apply(&p)? == p {
            fixed.push(p);
        }
    }
    Ok(fixed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelFactor {
    pub label: String,
    pub mapped_label: String,
    /// `sup d_{phi(l)}(f x, f y) / d_l(x, y)` over `x != y`; `None` when some
    /// pair with `d_l(x, y) = 0` is mapped apart.
    pub factor: Option<f64>,
    pub pairs_evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionCheck {
    pub factors: Vec<LabelFactor>,
    pub report_feasible: bool,
    /// For a feasible Banach report: whether every factor is below 1.
    pub forward_holds: Option<bool>,
}

fn finish_projection<P>(
    factors: Vec<LabelFactor>,
    report: &ContractionReport<P>,
) -> ProjectionCheck {
    let forward_holds = (report.kind == ContractionKind::Banach && report.feasible)
        .then(|| factors.iter().all(|f| f.factor.is_some_and(|v| v < 1.0)));
    ProjectionCheck {
        factors,
        report_feasible: report.feasible,
        forward_holds,
    }
}

fn ratio_sup(ratios: impl Iterator<Item = (f64, f64)>) -> (Option<f64>, usize) {
    let mut sup = 0.0_f64;
    let mut count = 0;
    for (num, den) in ratios {
        count += 1;
        if den == 0.0 {
            if num > 0.0 {
                return (None, count);
            }
            continue;
        }
        sup = sup.max(num / den);
    }
    (Some(sup), count)
}

/// Lipschitz factors of `f: (X, d_l) -> (X, d_{phi(l)})`, exhaustively.
pub fn project_contraction_check_tabulated(
    space: &TabulatedSpace,
    m: &TableMapping,
    report: &ContractionReport<FinitePoint>,
) -> Result<ProjectionCheck> {
    let n = space.universe().len();
    let mut factors = Vec::new();
    for label in 0..space.params().len() {
        let mapped = m.apply(&SoftPoint::new(0, label))?.label;
        let from = space.project(label)?;
        let to = space.project(mapped)?;
        let f = m.f();
        let pairs = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|(x, y)| x != y)
            .map(|(x, y)| (to.get(f[x], f[y]), from.get(x, y)));
        let (factor, pairs_evaluated) = ratio_sup(pairs);
        factors.push(LabelFactor {
            label: space.params().label(label).to_string(),
            mapped_label: space.params().label(mapped).to_string(),
            factor,
            pairs_evaluated,
        });
    }
    Ok(finish_projection(factors, report))
}

/// Lipschitz factors of the coordinate map at each seed label, over seeded
/// coordinate pairs.
pub fn project_contraction_check_analytic(
    space: &AnalyticSpace,
    m: &AnalyticMapping,
    report: &ContractionReport<AnalyticPoint>,
    plan: &SamplePlan,
) -> Result<ProjectionCheck> {
    let mut factors = Vec::new();
    for (i, &label) in space.label_values().iter().enumerate() {
        let mapped = m.phi().apply(label)?;
        let mut rng = plan.rng();
        let mut ratios = Vec::with_capacity(plan.samples);
        for _ in 0..plan.samples {
            let x = space.random_point(&mut rng, plan.box_radius);
            let y = space.random_point(&mut rng, plan.box_radius);
            if x.element == y.element {
                continue;
            }
            let fx = m.apply(&SoftPoint::new(x.element.clone(), label))?;
            let fy = m.apply(&SoftPoint::new(y.element.clone(), label))?;
            ratios.push((
                space.project(mapped, &fx.element, &fy.element)?,
                space.project(label, &x.element, &y.element)?,
            ));
        }
        let (factor, pairs_evaluated) = ratio_sup(ratios.into_iter());
        factors.push(LabelFactor {
            label: space.params().label(i).to_string(),
            mapped_label: format!("{mapped}"),
            factor,
            pairs_evaluated,
        });
    }
    Ok(finish_projection(factors, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::ParamMap;
    use crate::metric::{DistanceTable, MetricDescriptor};
    use crate::soft_real::ParamSet;
    use crate::soft_set::Universe;

    fn line(labels: &[f64]) -> AnalyticSpace {
        AnalyticSpace::new(
            ParamSet::numeric(labels).unwrap(),
            1,
            MetricDescriptor::sum_euclidean(1.0),
        )
        .unwrap()
    }

    fn scale(s: f64) -> AnalyticMapping {
        AnalyticMapping::scaling(1, s, ParamMap::identity()).unwrap()
    }

    #[test]
    fn halving_is_a_banach_contraction() {
        let space = line(&[1.0]);
        let plan = PairPlan::Sampled(SamplePlan::new(10_000, 42));
        let r = estimate_coefficient(&space, &scale(0.5), ContractionKind::Banach, &plan).unwrap();
        assert!(r.feasible);
        assert!(!r.exhaustive);
        for &a in r.alpha_hat.entries() {
            assert!((a - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn kannan_grid_sup() {
        let space = line(&[1.0]);
        let plan = PairPlan::Pairs(grid_pairs(1.0, -10.0, 10.0, 200));
        let r = estimate_coefficient(&space, &scale(0.25), ContractionKind::Kannan, &plan).unwrap();
        // |x - y| / (3 (|x| + |y|)) peaks at 1/3 on opposite signs.
        assert!((r.alpha_hat.get(0) - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.feasible);
        let h = r.rate().unwrap().get(0);
        assert!((h - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_plan_is_rejected() {
        let space = line(&[1.0]);
        let r = estimate_coefficient(
            &space,
            &scale(0.5),
            ContractionKind::Banach,
            &PairPlan::Pairs(vec![]),
        );
        assert!(matches!(r, Err(SoftError::Domain(_))));
    }

    #[test]
    fn halving_iterates_meet_their_bounds() {
        let space = line(&[1.0]);
        let m = scale(0.5);
        let plan = PairPlan::Sampled(SamplePlan::new(1_000, 42));
        let report = estimate_coefficient(&space, &m, ContractionKind::Banach, &plan).unwrap();
        let x0 = space.point(vec![1.0], 1.0).unwrap();
        let trace = picard_solve(&space, &m, &report, x0, 1e-10, 100).unwrap();
        assert!(trace.converged);
        assert!(trace.iterations() <= 40);
        for (n, (x, bound)) in trace.iterates.iter().zip(&trace.apriori_bounds).enumerate() {
            let exact = 0.5_f64.powi(n as i32);
            assert!((x.element[0] - exact).abs() < 1e-15);
            assert!(x.element[0].abs() <= bound.get(0) + 1e-12);
        }
        assert!(trace.residual.sup() <= 2e-10);
    }

    #[test]
    fn constant_map_stops_after_one_step() {
        let space = line(&[1.0]);
        let m = AnalyticMapping::new(vec![vec![0.0]], vec![3.0], ParamMap::identity()).unwrap();
        let plan = PairPlan::Sampled(SamplePlan::new(100, 1));
        let report = estimate_coefficient(&space, &m, ContractionKind::Banach, &plan).unwrap();
        assert_eq!(report.alpha_hat.get(0), 0.0);
        let trace = picard_solve(
            &space,
            &m,
            &report,
            space.point(vec![1.0], 1.0).unwrap(),
            1e-10,
            10,
        )
        .unwrap();
        assert_eq!(trace.iterations(), 1);
        assert_eq!(trace.fixed_point.unwrap().element, vec![3.0]);
    }

    #[test]
    fn infeasible_reports_are_refused() {
        let space = line(&[1.0]);
        let plan = PairPlan::Sampled(SamplePlan::new(100, 1));
        let report =
            estimate_coefficient(&space, &scale(2.0), ContractionKind::Banach, &plan).unwrap();
        assert!(!report.feasible);
        let r = picard_solve(
            &space,
            &scale(2.0),
            &report,
            space.point(vec![1.0], 1.0).unwrap(),
            1e-6,
            10,
        );
        assert!(matches!(r, Err(SoftError::Precondition(_))));
    }

    #[test]
    fn optimistic_rate_is_caught() {
        let space = line(&[1.0]);
        let m = scale(0.5);
        let mut report = estimate_coefficient(
            &space,
            &m,
            ContractionKind::Banach,
            &PairPlan::Sampled(SamplePlan::new(10, 1)),
        )
        .unwrap();
        report.alpha_hat = SoftReal::constant(1, 0.1);
        let r = picard_solve(
            &space,
            &m,
            &report,
            space.point(vec![1.0], 1.0).unwrap(),
            1e-10,
            100,
        );
        assert!(matches!(r, Err(SoftError::RateViolation { step: 1, .. })));
    }

    fn tab_at(coords: &[f64]) -> TabulatedSpace {
        let params = ParamSet::labels(["e1"]).unwrap();
        let universe = Universe::new((0..coords.len()).map(|i| format!("x{i}"))).unwrap();
        let t = DistanceTable::from_fn(coords.len(), 1, |i, j, _| (coords[i] - coords[j]).abs());
        TabulatedSpace::new(params, universe, t).unwrap()
    }

    fn tab(n: usize) -> TabulatedSpace {
        tab_at(&(0..n).map(|i| i as f64).collect::<Vec<_>>())
    }

    #[test]
    fn brute_force_examples() {
        let s = tab(3);
        assert_eq!(
            brute_force_fixed_points(&s, &TableMapping::identity(3, 1))
                .unwrap()
                .len(),
            3
        );
        let constant = TableMapping::new(vec![1, 1, 1], vec![0], 3, 1).unwrap();
        assert_eq!(
            brute_force_fixed_points(&s, &constant).unwrap(),
            vec![SoftPoint::new(1, 0)]
        );
        let cycle = TableMapping::new(vec![1, 2, 0], vec![0], 3, 1).unwrap();
        assert!(brute_force_fixed_points(&s, &cycle).unwrap().is_empty());
    }

    #[test]
    fn finite_solver_agrees_with_scan() {
        let s = tab_at(&[0.0, 1.0, 2.0, 4.0]);
        let m = TableMapping::new(vec![1, 1, 1, 2], vec![0], 4, 1).unwrap();
        let report =
            estimate_coefficient(&s, &m, ContractionKind::Banach, &PairPlan::Exhaustive).unwrap();
        assert!(report.feasible && report.exhaustive);
        let trace = picard_solve(&s, &m, &report, SoftPoint::new(3, 0), 1e-12, 100).unwrap();
        let fixed = brute_force_fixed_points(&s, &m).unwrap();
        assert_eq!(trace.fixed_point, Some(fixed[0]));
    }

    #[test]
    fn projection_factors() {
        let space = line(&[1.0, 2.0]);
        let plan = SamplePlan::new(1_000, 42);
        let m = scale(0.5);
        let report = estimate_coefficient(
            &space,
            &m,
            ContractionKind::Banach,
            &PairPlan::Sampled(plan),
        )
        .unwrap();
        let check = project_contraction_check_analytic(&space, &m, &report, &plan).unwrap();
        for f in &check.factors {
            assert!((f.factor.unwrap() - 0.5).abs() < 1e-12);
        }

        let s = tab(3);
        let id = TableMapping::identity(3, 1);
        let report =
            estimate_coefficient(&s, &id, ContractionKind::Banach, &PairPlan::Exhaustive).unwrap();
        assert!(!report.feasible);
        let check = project_contraction_check_tabulated(&s, &id, &report).unwrap();
        assert_eq!(check.factors[0].factor, Some(1.0));
        assert_eq!(check.forward_holds, None);
    }
}
