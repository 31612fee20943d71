//! Soft mappings `(f, phi)`: a point map and a parameter map sending the
//! soft point `x_l` to `f(x)_{phi(l)}`. Images and preimages of finite soft
//! sets, sampled epsilon-delta continuity, the finite check that the
//! continuity characterizations agree, and sequential probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, SoftError};
use crate::metric::{AnalyticSpace, SoftMetric, TabulatedSpace};
use crate::soft_real::SoftReal;
use crate::soft_set::{AnalyticPoint, FinitePoint, SoftPoint, SoftSet};
use crate::topology::{closure, interior, is_closed, is_open};

/// Anything that sends soft points to soft points.
pub trait SoftMap<P> {
    fn apply(&self, p: &P) -> Result<P>;
}

/// A mapping between finite spaces given by element and label tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableMapping {
    f: Vec<usize>,
    phi: Vec<usize>,
    codomain_elements: usize,
    codomain_labels: usize,
}

impl TableMapping {
    /// `f[x]` and `phi[l]` are codomain indices.
    pub fn new(
        f: Vec<usize>,
        phi: Vec<usize>,
        codomain_elements: usize,
        codomain_labels: usize,
    ) -> Result<Self> {
        if let Some(&y) = f.iter().find(|&&y| y >= codomain_elements) {
            return Err(SoftError::UnknownElement(format!(
                "element index {y} out of range"
            )));
        }
        if let Some(&m) = phi.iter().find(|&&m| m >= codomain_labels) {
            return Err(SoftError::UnknownLabel(format!(
                "label index {m} out of range"
            )));
        }
        Ok(TableMapping {
            f,
            phi,
            codomain_elements,
            codomain_labels,
        })
    }

    pub fn identity(n_elements: usize, n_labels: usize) -> Self {
        TableMapping {
            f: (0..n_elements).collect(),
            phi: (0..n_labels).collect(),
            codomain_elements: n_elements,
            codomain_labels: n_labels,
        }
    }

    pub fn f(&self) -> &[usize] {
        &self.f
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    pub fn domain_elements(&self) -> usize {
        self.f.len()
    }

    pub fn domain_labels(&self) -> usize {
        self.phi.len()
    }

    fn check_domain(&self, set: &SoftSet) -> Result<()> {
        if set.n_elements() != self.domain_elements() || set.n_labels() != self.domain_labels() {
            return Err(SoftError::Domain(
                "soft set is not over the mapping's domain".into(),
            ));
        }
        Ok(())
    }

    /// Union of the images of the soft points of `set`.
    pub fn image(&self, set: &SoftSet) -> Result<SoftSet> {
        self.check_domain(set)?;
        let mut out = SoftSet::null(self.codomain_elements, self.codomain_labels);
        for p in set.points() {
            out.insert(&self.apply(&p)?);
        }
        Ok(out)
    }

    /// All domain soft points whose image lies in `set`.
    pub fn preimage(&self, set: &SoftSet) -> Result<SoftSet> {
        if set.n_elements() != self.codomain_elements || set.n_labels() != self.codomain_labels {
            return Err(SoftError::Domain(
                "soft set is not over the mapping's codomain".into(),
            ));
        }
        let mut out = SoftSet::null(self.domain_elements(), self.domain_labels());
        for label in 0..self.domain_labels() {
            for element in 0..self.domain_elements() {
                let p = SoftPoint::new(element, label);
                if set.contains(&self.apply(&p)?) {
                    out.insert(&p);
                }
            }
        }
        Ok(out)
    }
}

impl SoftMap<FinitePoint> for TableMapping {
    fn apply(&self, p: &FinitePoint) -> Result<FinitePoint> {
        let element = *self
            .f
            .get(p.element)
            .ok_or_else(|| SoftError::UnknownElement(format!("element index {}", p.element)))?;
        let label = *self
            .phi
            .get(p.label)
            .ok_or_else(|| SoftError::UnknownLabel(format!("label index {}", p.label)))?;
        Ok(SoftPoint::new(element, label))
    }
}

/// Parameter map on numeric label values.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamMap {
    /// `v -> a * v + c`.
    Affine { a: f64, c: f64 },
    /// `v -> v + 1 / v`.
    RecipSum,
    /// Explicit `(from, to)` value pairs.
    Table { pairs: Vec<(f64, f64)> },
}

impl ParamMap {
    pub fn identity() -> Self {
        ParamMap::Affine { a: 1.0, c: 0.0 }
    }

    pub fn apply(&self, v: f64) -> Result<f64> {
        let out = match self {
            ParamMap::Affine { a, c } => a * v + c,
            ParamMap::RecipSum => {
                if v == 0.0 {
                    return Err(SoftError::Domain("v + 1/v is undefined at 0".into()));
                }
                v + 1.0 / v
            }
            ParamMap::Table { pairs } => pairs
                .iter()
                .find(|(from, _)| *from == v)
                .map(|&(_, to)| to)
                .ok_or_else(|| SoftError::UnknownLabel(format!("no table entry for label {v}")))?,
        };
        if !out.is_finite() {
            return Err(SoftError::Domain(format!("label map produced {out}")));
        }
        Ok(out)
    }
}

/// `x -> A x + b` on coordinates together with a parameter map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticMapping {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    phi: ParamMap,
}

impl AnalyticMapping {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, phi: ParamMap) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(SoftError::Domain(
                "affine map needs at least one coordinate".into(),
            ));
        }
        if a.len() != n {
            return Err(SoftError::DimensionMismatch {
                expected: n,
                found: a.len(),
            });
        }
        if let Some(row) = a.iter().find(|row| row.len() != n) {
            return Err(SoftError::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        let numbers = a.iter().flatten().chain(&b);
        if let Some((component, &value)) = numbers.enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(SoftError::NonFinite { component, value });
        }
        Ok(AnalyticMapping { a, b, phi })
    }

    /// `x -> s * x` in `dim` coordinates.
    pub fn scaling(dim: usize, s: f64, phi: ParamMap) -> Result<Self> {
        let a = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { s } else { 0.0 }).collect())
            .collect();
        Self::new(a, vec![0.0; dim], phi)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn offset(&self) -> &[f64] {
        &self.b
    }

    pub fn phi(&self) -> &ParamMap {
        &self.phi
    }
}

impl SoftMap<AnalyticPoint> for AnalyticMapping {
    fn apply(&self, p: &AnalyticPoint) -> Result<AnalyticPoint> {
        if p.element.len() != self.dim() {
            return Err(SoftError::DimensionMismatch {
                expected: self.dim(),
                found: p.element.len(),
            });
        }
        let element = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(row, b)| row.iter().zip(&p.element).map(|(a, x)| a * x).sum::<f64>() + b)
            .collect();
        Ok(SoftPoint::new(element, self.phi.apply(p.label)?))
    }
}

/// Sampling settings for continuity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityPlan {
    pub samples: usize,
    pub seed: u64,
    /// How many times delta may be halved, starting from delta = epsilon.
    pub halvings: usize,
}

impl Default for ContinuityPlan {
    fn default() -> Self {
        ContinuityPlan {
            samples: 1_000,
            seed: 42,
            halvings: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum EpsilonVerdict {
    /// Every accepted sample within `delta` of the point mapped within
    /// `epsilon` of its image.
    Witnessed {
        epsilon: SoftReal,
        delta: f64,
        accepted: usize,
    },
    /// No delta on the grid worked; the failing sample is from the smallest.
    NotFound {
        epsilon: SoftReal,
        smallest_delta: f64,
        failing: AnalyticPoint,
        image_distance: SoftReal,
    },
}

impl EpsilonVerdict {
    pub fn witnessed(&self) -> bool {
        matches!(self, EpsilonVerdict::Witnessed { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ContinuityVerdict {
    /// Finite spaces carry the discrete topology.
    Discrete,
    Sampled {
        per_epsilon: Vec<EpsilonVerdict>,
    },
}

impl ContinuityVerdict {
    pub fn holds(&self) -> bool {
        match self {
            ContinuityVerdict::Discrete => true,
            ContinuityVerdict::Sampled { per_epsilon } => {
                per_epsilon.iter().all(EpsilonVerdict::witnessed)
            }
        }
    }
}

/// Finite spaces: every mapping is continuous.
pub fn check_continuity_finite(_dom: &TabulatedSpace, _cod: &TabulatedSpace) -> ContinuityVerdict {
    ContinuityVerdict::Discrete
}

/// Searches, for each `epsilon`, a `delta` on the grid `epsilon.inf() / 2^k`
/// such that seeded samples `q` with `d(p, q) <= delta` satisfy
/// `rho(m(p), m(q)) < epsilon` in every component.
pub fn check_continuity_at<M: SoftMap<AnalyticPoint>>(
    dom: &AnalyticSpace,
    cod: &AnalyticSpace,
    m: &M,
    p: &AnalyticPoint,
    epsilons: &[SoftReal],
    plan: &ContinuityPlan,
) -> Result<ContinuityVerdict> {
    dom.validate(p)?;
    let image = m.apply(p)?;
    let mut per_epsilon = Vec::with_capacity(epsilons.len());
    for epsilon in epsilons {
        if !epsilon.is_positive() {
            return Err(SoftError::Domain(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let mut delta = epsilon.inf();
        let mut failure = None;
        let mut verdict = None;
        for _ in 0..=plan.halvings {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            let mut accepted = 0;
            failure = None;
            for _ in 0..plan.samples {
                let q = dom.perturb(p, delta, &mut rng);
                if dom.distance(p, &q)?.sup() > delta {
                    continue;
                }
                accepted += 1;
                let d = cod.distance(&image, &m.apply(&q)?)?;
                if !d.lt(epsilon)? {
                    failure = Some((q, d));
                    break;
                }
            }
            if failure.is_none() {
                verdict = Some(EpsilonVerdict::Witnessed {
                    epsilon: epsilon.clone(),
                    delta,
                    accepted,
                });
                break;
            }
            delta /= 2.0;
        }
        per_epsilon.push(match (verdict, failure) {
            (Some(v), _) => v,
            (None, Some((failing, image_distance))) => EpsilonVerdict::NotFound {
                epsilon: epsilon.clone(),
                smallest_delta: delta * 2.0,
                failing,
                image_distance,
            },
            (None, None) => unreachable!("every delta either fails or is witnessed"),
        });
    }
    Ok(ContinuityVerdict::Sampled { per_epsilon })
}

/// The five set-theoretic continuity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// Preimages of open sets are open.
    OpenPreimage,
    /// Preimages of closed sets are closed.
    ClosedPreimage,
    /// `m(cl F) ⊆ cl m(F)`.
    ImageOfClosure,
    /// `cl m⁻¹(F) ⊆ m⁻¹(cl F)`.
    ClosureOfPreimage,
    /// `m⁻¹(int F) ⊆ int m⁻¹(F)`.
    PreimageOfInterior,
}

impl Clause {
    pub const ALL: [Clause; 5] = [
        Clause::OpenPreimage,
        Clause::ClosedPreimage,
        Clause::ImageOfClosure,
        Clause::ClosureOfPreimage,
        Clause::PreimageOfInterior,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseResult {
    pub clause: Clause,
    pub holds: bool,
    pub sets_checked: usize,
    /// First set on which the clause failed.
    pub counterexample: Option<SoftSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub clauses: Vec<ClauseResult>,
    pub exhaustive: bool,
    pub all_agree: bool,
}

/// Sets examined when checking clauses: every soft set when there are at
/// most `EXHAUSTIVE_LIMIT` soft points, otherwise seeded random ones.
pub const EXHAUSTIVE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsetPlan {
    pub random_sets: usize,
    pub seed: u64,
}

impl Default for SubsetPlan {
    fn default() -> Self {
        SubsetPlan {
            random_sets: 4_096,
            seed: 42,
        }
    }
}

fn subsets(n_elements: usize, n_labels: usize, plan: &SubsetPlan) -> (Vec<SoftSet>, bool) {
    let n = n_elements * n_labels;
    if n <= EXHAUSTIVE_LIMIT {
        let sets = (0..1u64 << n)
            .map(|mask| SoftSet::from_mask(n_elements, n_labels, mask))
            .collect();
        return (sets, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let sets = (0..plan.random_sets)
        .map(|_| {
            let mut set = SoftSet::null(n_elements, n_labels);
            for label in 0..n_labels {
                for element in 0..n_elements {
                    if rng.random_bool(0.5) {
                        set.insert(&SoftPoint::new(element, label));
                    }
                }
            }
            set
        })
        .collect();
    (sets, false)
}

/// Evaluates each clause independently over the enumerated soft sets.
pub fn check_continuity_equivalences(
    dom: &TabulatedSpace,
    cod: &TabulatedSpace,
    m: &TableMapping,
    plan: &SubsetPlan,
) -> Result<EquivalenceReport> {
    if m.domain_elements() != dom.universe().len() || m.domain_labels() != dom.params().len() {
        return Err(SoftError::Domain(
            "mapping does not match the domain space".into(),
        ));
    }
    if m.codomain_elements != cod.universe().len() || m.codomain_labels != cod.params().len() {
        return Err(SoftError::Domain(
            "mapping does not match the codomain space".into(),
        ));
    }
    let (dom_sets, dom_exhaustive) = subsets(dom.universe().len(), dom.params().len(), plan);
    let (cod_sets, cod_exhaustive) = subsets(cod.universe().len(), cod.params().len(), plan);

    let mut clauses = Vec::with_capacity(5);
    for clause in Clause::ALL {
        let sets = if clause == Clause::ImageOfClosure {
            &dom_sets
        } else {
            &cod_sets
        };
        let mut counterexample = None;
        for s in sets {
            let ok = match clause {
                Clause::OpenPreimage => {
                    !is_open(cod, s)?.open || is_open(dom, &m.preimage(s)?)?.open
                }
                Clause::ClosedPreimage => !is_closed(cod, s)? || is_closed(dom, &m.preimage(s)?)?,
                Clause::ImageOfClosure => m
                    .image(&closure(dom, s)?)?
                    .is_subset(&closure(cod, &m.image(s)?)?)?,
                Clause::ClosureOfPreimage => {
                    closure(dom, &m.preimage(s)?)?.is_subset(&m.preimage(&closure(cod, s)?)?)?
                }
                Clause::PreimageOfInterior => m
                    .preimage(&interior(cod, s)?)?
                    .is_subset(&interior(dom, &m.preimage(s)?)?)?,
            };
            if !ok {
                counterexample = Some(s.clone());
                break;
            }
        }
        clauses.push(ClauseResult {
            clause,
            holds: counterexample.is_none(),
            sets_checked: sets.len(),
            counterexample,
        });
    }
    let all_agree = clauses.iter().all(|c| c.holds == clauses[0].holds);
    Ok(EquivalenceReport {
        clauses,
        exhaustive: dom_exhaustive && cod_exhaustive,
        all_agree,
    })
}

/// Settings for sequential probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbePlan {
    pub tolerance: f64,
    pub horizon: usize,
}

impl Default for ProbePlan {
    fn default() -> Self {
        ProbePlan {
            tolerance: 1e-6,
            horizon: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeVerdict {
    /// First `n` with `sup d(x_n, p) < tolerance`.
    pub sequence_converged_at: usize,
    /// First `n` with `sup rho(m(x_n), m(p)) < tolerance`.
    pub image_converged_at: Option<usize>,
    pub passed: bool,
}

/// Follows `x_1, x_2, ...` from `sequence` towards `p` and reports when the
/// images reach the tolerance around `m(p)`. The sequence itself must
/// decay monotonically (within `eta`) and reach the tolerance within the
/// horizon, otherwise the probe does not apply.
pub fn sequential_probe<D, C, M>(
    dom: &D,
    cod: &C,
    m: &M,
    sequence: impl Fn(usize) -> D::Point,
    p: &D::Point,
    plan: &ProbePlan,
    eta: f64,
) -> Result<ProbeVerdict>
where
    D: SoftMetric,
    C: SoftMetric<Point = D::Point>,
    M: SoftMap<D::Point>,
{
    let image = m.apply(p)?;
    let mut previous = f64::INFINITY;
    let mut sequence_converged_at = None;
    let mut image_converged_at = None;
    for n in 1..=plan.horizon {
        let x = sequence(n);
        if sequence_converged_at.is_none() {
            let d = dom.distance(&x, p)?.sup();
            if d > previous + eta {
                return Err(SoftError::Precondition(format!(
                    "sequence distance grows at n = {n}: {previous} then {d}"
                )));
            }
            previous = d;
            if d < plan.tolerance {
                sequence_converged_at = Some(n);
            }
        }
        if image_converged_at.is_none()
            && cod.distance(&m.apply(&x)?, &image)?.sup() < plan.tolerance
        {
            image_converged_at = Some(n);
        }
        if sequence_converged_at.is_some() && image_converged_at.is_some() {
            break;
        }
    }
    let sequence_converged_at = sequence_converged_at.ok_or_else(|| {
        SoftError::Precondition(format!(
            "sequence does not reach {} within {} terms",
            plan.tolerance, plan.horizon
        ))
    })?;
    Ok(ProbeVerdict {
        sequence_converged_at,
        image_converged_at,
        passed: image_converged_at.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{DistanceTable, Family, MetricDescriptor, ParamPart, PointPart};
    use crate::soft_real::ParamSet;
    use crate::soft_set::{decompose, Universe};

    fn sum_space(labels: &[f64], dim: usize) -> AnalyticSpace {
        AnalyticSpace::new(
            ParamSet::numeric(labels).unwrap(),
            dim,
            MetricDescriptor::sum_euclidean(1.0),
        )
        .unwrap()
    }

    fn tab_space(n_el: usize, n_lab: usize) -> TabulatedSpace {
        let params = ParamSet::labels((0..n_lab).map(|l| format!("e{}", l + 1))).unwrap();
        let universe = Universe::new((0..n_el).map(|x| format!("x{x}"))).unwrap();
        let n = n_el * n_lab;
        let t = DistanceTable::from_fn(n, n_lab, |i, j, k| {
            if i == j {
                0.0
            } else {
                1.0 + ((i * 7 + j * 7 + k) % 5) as f64 / 10.0
            }
        });
        TabulatedSpace::new(params, universe, t).unwrap()
    }

    #[test]
    fn point_images() {
        let m = AnalyticMapping::scaling(2, 0.5, ParamMap::Affine { a: 3.0, c: 0.0 }).unwrap();
        let p = SoftPoint::new(vec![0.0, 1.0], 2.0);
        assert_eq!(m.apply(&p).unwrap(), SoftPoint::new(vec![0.0, 0.5], 6.0));

        let m = AnalyticMapping::scaling(1, 0.2, ParamMap::RecipSum).unwrap();
        let q = m.apply(&SoftPoint::new(vec![10.0], 2.0)).unwrap();
        assert_eq!(q, SoftPoint::new(vec![2.0], 2.5));

        let id = TableMapping::identity(3, 2);
        let p = SoftPoint::new(2, 1);
        assert_eq!(id.apply(&p).unwrap(), p);
    }

    #[test]
    fn missing_table_label() {
        let phi = ParamMap::Table {
            pairs: vec![(1.0, 2.0)],
        };
        assert!(matches!(phi.apply(3.0), Err(SoftError::UnknownLabel(_))));
        let m = TableMapping::new(vec![0], vec![0], 1, 1).unwrap();
        assert!(m.apply(&SoftPoint::new(0, 4)).is_err());
        assert!(TableMapping::new(vec![3], vec![0], 2, 1).is_err());
    }

    #[test]
    fn image_and_preimage() {
        let swap = TableMapping::new(vec![1, 0], vec![0], 2, 1).unwrap();
        let a = SoftSet::from_points(2, 1, &[SoftPoint::new(0, 0)]).unwrap();
        let b = SoftSet::from_points(2, 1, &[SoftPoint::new(1, 0)]).unwrap();
        assert_eq!(swap.image(&a).unwrap(), b);
        assert!(swap.image(&SoftSet::null(2, 1)).unwrap().is_null());
        let abs = SoftSet::absolute(2, 1);
        assert_eq!(swap.preimage(&abs).unwrap(), abs);

        let m = TableMapping::new(vec![2, 2, 0], vec![1, 1], 3, 2).unwrap();
        for mask in 0..64 {
            let s = SoftSet::from_mask(3, 2, mask);
            let mut union = SoftSet::null(3, 2);
            for p in decompose(&s) {
                union.insert(&m.apply(&p).unwrap());
            }
            let image = m.image(&s).unwrap();
            assert_eq!(image, union);
            assert!(s.is_subset(&m.preimage(&image).unwrap()).unwrap());
            assert!(m
                .image(&m.preimage(&s).unwrap())
                .unwrap()
                .is_subset(&s)
                .unwrap());
        }
    }

    #[test]
    fn contraction_continuity_with_delta_equal_epsilon() {
        let space = sum_space(&[1.0, 2.0], 1);
        let m = AnalyticMapping::scaling(1, 0.5, ParamMap::identity()).unwrap();
        let p = space.point(vec![3.0], 1.0).unwrap();
        let eps: Vec<SoftReal> = [1.0, 0.1, 1e-3]
            .iter()
            .map(|&e| SoftReal::constant(2, e))
            .collect();
        let verdict =
            check_continuity_at(&space, &space, &m, &p, &eps, &ContinuityPlan::default()).unwrap();
        let ContinuityVerdict::Sampled { per_epsilon } = verdict else {
            panic!("analytic spaces are sampled");
        };
        for (v, e) in per_epsilon.iter().zip(&eps) {
            match v {
                EpsilonVerdict::Witnessed { delta, .. } => assert_eq!(*delta, e.inf()),
                other => panic!("expected a witness, got {other:?}"),
            }
        }
    }

    #[test]
    fn discontinuous_label_map_is_caught() {
        // phi doubles the label distance, with a discrete point part so
        // coordinates cannot absorb it.
        let metric =
            MetricDescriptor::new(Family::Sum, ParamPart::AbsDiff, 1.0, PointPart::Discrete)
                .unwrap();
        let space = AnalyticSpace::new(ParamSet::numeric(&[0.0]).unwrap(), 1, metric).unwrap();
        let m = AnalyticMapping::scaling(1, 1.0, ParamMap::Affine { a: 4.0, c: 0.0 }).unwrap();
        let p = space.point(vec![0.0], 0.0).unwrap();
        let eps = [SoftReal::constant(1, 0.5)];
        let plan = ContinuityPlan {
            halvings: 0,
            ..ContinuityPlan::default()
        };
        let verdict = check_continuity_at(&space, &space, &m, &p, &eps, &plan).unwrap();
        assert!(!verdict.holds());
    }

    #[test]
    fn finite_continuity_is_discrete() {
        let s = tab_space(2, 1);
        assert_eq!(check_continuity_finite(&s, &s), ContinuityVerdict::Discrete);
    }

    #[test]
    fn equivalences_on_small_spaces() {
        let s = tab_space(2, 2);
        for m in [
            TableMapping::identity(2, 2),
            TableMapping::new(vec![1, 1], vec![0, 0], 2, 2).unwrap(),
            TableMapping::new(vec![1, 0], vec![1, 0], 2, 2).unwrap(),
        ] {
            let r = check_continuity_equivalences(&s, &s, &m, &SubsetPlan::default()).unwrap();
            assert!(r.exhaustive && r.all_agree);
            assert!(r.clauses.iter().all(|c| c.holds && c.sets_checked == 16));
        }
    }

    #[test]
    fn sequential_probe_affine() {
        let space = sum_space(&[1.0], 1);
        let m = AnalyticMapping::scaling(1, 0.5, ParamMap::identity()).unwrap();
        let p = space.point(vec![0.0], 1.0).unwrap();
        let plan = ProbePlan::default();
        let v = sequential_probe(
            &space,
            &space,
            &m,
            |n| SoftPoint::new(vec![1.0 / n as f64], 1.0),
            &p,
            &plan,
            1e-9,
        )
        .unwrap();
        assert!(v.passed);
        // 0.5 / n < 1e-6 first at n = 500_001.
        assert_eq!(v.image_converged_at, Some(500_001));

        let labels = sequential_probe(
            &space,
            &space,
            &AnalyticMapping::scaling(1, 1.0, ParamMap::Affine { a: 0.5, c: 0.5 }).unwrap(),
            |n| SoftPoint::new(vec![0.0], 1.0 + 1.0 / n as f64),
            &p,
            &plan,
            1e-9,
        )
        .unwrap();
        assert!(labels.passed);
    }

    #[test]
    fn probe_rejects_divergent_sequence() {
        let space = sum_space(&[1.0], 1);
        let m = AnalyticMapping::scaling(1, 0.5, ParamMap::identity()).unwrap();
        let p = space.point(vec![0.0], 1.0).unwrap();
        let r = sequential_probe(
            &space,
            &space,
            &m,
            |n| SoftPoint::new(vec![n as f64], 1.0),
            &p,
            &ProbePlan::default(),
            1e-9,
        );
        assert!(matches!(r, Err(SoftError::Precondition(_))));
    }

    #[test]
    fn finite_probe_eventually_constant() {
        let s = tab_space(3, 1);
        let m = TableMapping::new(vec![2, 0, 1], vec![0], 3, 1).unwrap();
        let p = SoftPoint::new(1, 0);
        let v = sequential_probe(
            &s,
            &s,
            &m,
            |n| if n < 5 { SoftPoint::new(0, 0) } else { p },
            &p,
            &ProbePlan::default(),
            1e-9,
        )
        .unwrap();
        assert!(v.passed);
        assert_eq!(v.image_converged_at, Some(5));
    }
}
