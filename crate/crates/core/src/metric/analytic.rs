//! Closed-form soft metrics on real coordinate spaces.
//!
//! Points carry real coordinates and a raw numeric label value, so parameter
//! maps may produce labels outside the seed parameter set. Distances are
//! constant soft reals over the seed set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, SoftError};
use crate::soft_real::{ParamSet, SoftReal};
use crate::soft_set::{AnalyticPoint, SoftPoint};

use super::{AxiomAccumulator, AxiomReport, SoftMetric};

/// Distance between parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamPart {
    AbsDiff,
    CappedAbsDiff { cap: f64 },
}

/// Distance between coordinate vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointPart {
    Euclidean,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `w * rho_E(v(l), v(m)) + rho_X(x, y)`.
    Sum,
    /// `rho_X(x, y) ^ (1 + w * rho_E(v(l), v(m)))`. Not a soft metric in
    /// general; kept so the axiom checker has something to reject.
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricDescriptor {
    pub family: Family,
    pub param_part: ParamPart,
    pub weight: f64,
    pub point_part: PointPart,
}

impl MetricDescriptor {
    pub fn new(
        family: Family,
        param_part: ParamPart,
        weight: f64,
        point_part: PointPart,
    ) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(SoftError::Domain(format!(
                "metric weight must be positive, got {weight}"
            )));
        }
        if let ParamPart::CappedAbsDiff { cap } = param_part {
            if !(cap.is_finite() && cap > 0.0) {
                return Err(SoftError::Domain(format!(
                    "cap must be positive, got {cap}"
                )));
            }
        }
        Ok(MetricDescriptor {
            family,
            param_part,
            weight,
            point_part,
        })
    }

    /// `w * |l - m| + ||x - y||`.
    pub fn sum_euclidean(weight: f64) -> Self {
        Self::new(
            Family::Sum,
            ParamPart::AbsDiff,
            weight,
            PointPart::Euclidean,
        )
        .unwrap()
    }

    pub fn param_dist(&self, a: f64, b: f64) -> f64 {
        let diff = (a - b).abs();
        match self.param_part {
            ParamPart::AbsDiff => diff,
            ParamPart::CappedAbsDiff { cap } => diff.min(cap),
        }
    }

    pub fn point_dist(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.point_part {
            PointPart::Euclidean => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            PointPart::Discrete => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Scalar value of the soft distance.
    pub fn eval(&self, p: &AnalyticPoint, q: &AnalyticPoint) -> f64 {
        let param = self.weight * self.param_dist(p.label, q.label);
        let point = self.point_dist(&p.element, &q.element);
        match self.family {
            Family::Sum => param + point,
            Family::Power => point.powf(1.0 + param),
        }
    }
}

/// Seeded sampling plan for analytic spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplePlan {
    pub samples: usize,
    pub seed: u64,
    /// Coordinates are drawn uniformly from `[-box_radius, box_radius]`.
    pub box_radius: f64,
}

impl SamplePlan {
    pub fn new(samples: usize, seed: u64) -> Self {
        SamplePlan {
            samples,
            seed,
            box_radius: 10.0,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan::new(10_000, 42)
    }
}

/// Open ball `B(center, radius)` in an analytic space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpenBall {
    pub center: AnalyticPoint,
    pub radius: SoftReal,
}

impl OpenBall {
    /// Distances are constant, so strict membership is decided by the
    /// smallest radius component.
    pub fn effective_radius(&self) -> f64 {
        self.radius.inf()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticSpace {
    params: ParamSet,
    dim: usize,
    metric: MetricDescriptor,
}

impl AnalyticSpace {
    pub fn new(params: ParamSet, dim: usize, metric: MetricDescriptor) -> Result<Self> {
        if dim == 0 {
            return Err(SoftError::Domain("dimension must be at least 1".into()));
        }
        if !params.is_numeric() {
            return Err(SoftError::Domain(
                "analytic metrics need numeric parameter values".into(),
            ));
        }
        Ok(AnalyticSpace {
            params,
            dim,
            metric,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &MetricDescriptor {
        &self.metric
    }

    /// Numeric values of the seed labels.
    pub fn label_values(&self) -> &[f64] {
        self.params.values().expect("analytic params are numeric")
    }

    pub fn point(&self, coords: Vec<f64>, label: f64) -> Result<AnalyticPoint> {
        let p = SoftPoint::new(coords, label);
        self.validate(&p)?;
        Ok(p)
    }

    /// Point at the named seed label.
    pub fn point_at(&self, coords: Vec<f64>, label: &str) -> Result<AnalyticPoint> {
        let index = self.params.require(label)?;
        self.point(coords, self.label_values()[index])
    }

    pub fn validate(&self, p: &AnalyticPoint) -> Result<()> {
        if p.element.len() != self.dim {
            return Err(SoftError::DimensionMismatch {
                expected: self.dim,
                found: p.element.len(),
            });
        }
        if let Some((component, &value)) =
            p.element.iter().enumerate().find(|(_, v)| !v.is_finite())
        {
            return Err(SoftError::NonFinite { component, value });
        }
        if !p.label.is_finite() {
            return Err(SoftError::Domain(format!(
                "non-finite label value {}",
                p.label
            )));
        }
        Ok(())
    }

    /// Uniform point in the sampling box at a uniformly chosen seed label.
    pub fn random_point<R: Rng>(&self, rng: &mut R, box_radius: f64) -> AnalyticPoint {
        let coords = (0..self.dim)
            .map(|_| rng.random_range(-box_radius..=box_radius))
            .collect();
        SoftPoint::new(coords, self.random_label(rng))
    }

    fn random_label<R: Rng>(&self, rng: &mut R) -> f64 {
        let values = self.label_values();
        values[rng.random_range(0..values.len())]
    }

    /// Random point near `p`: with probability one half each, the
    /// coordinates move by at most `scale / 2` and the label value moves by
    /// at most `scale / 2`.
    pub fn perturb<R: Rng>(&self, p: &AnalyticPoint, scale: f64, rng: &mut R) -> AnalyticPoint {
        let mut q = p.clone();
        if rng.random_bool(0.5) {
            let direction: Vec<f64> = (0..self.dim)
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect();
            let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
            if norm > 0.0 {
                let r = rng.random_range(0.0..=1.0) * scale / 2.0;
                for (c, d) in q.element.iter_mut().zip(&direction) {
                    *c += d / norm * r;
                }
            }
        }
        if rng.random_bool(0.5) {
            q.label += rng.random_range(-1.0..=1.0) * scale / 2.0;
        }
        q
    }

    /// Seeded check of M1-M4. Pairs cycle through identical points, shared
    /// elements under different labels, shared labels, and independent
    /// draws; triples mix the same patterns.
    pub fn check_axioms(&self, plan: &SamplePlan, eta: f64) -> AxiomReport<AnalyticPoint> {
        let mut rng = plan.rng();
        let mut acc = AxiomAccumulator::new(eta);
        let r = plan.box_radius;
        let d = |p: &AnalyticPoint, q: &AnalyticPoint| self.constant(self.metric.eval(p, q));
        for i in 0..plan.samples {
            let p = self.random_point(&mut rng, r);
            let q = match i % 4 {
                0 => p.clone(),
                1 => SoftPoint::new(p.element.clone(), self.random_label(&mut rng)),
                2 => SoftPoint::new(self.random_point(&mut rng, r).element, p.label),
                _ => self.random_point(&mut rng, r),
            };
            acc.check_pair(&p, &q, p == q, &d(&p, &q), &d(&q, &p));
        }
        for _ in 0..plan.samples {
            let x = self.random_point(&mut rng, r);
            let mut y = self.random_point(&mut rng, r);
            let mut z = self.random_point(&mut rng, r);
            match rng.random_range(0..4) {
                0 => y.element = x.element.clone(),
                1 => z.element = x.element.clone(),
                2 => z.element = y.element.clone(),
                _ => {}
            }
            acc.check_triple(&x, &y, &z, &d(&x, &z), &d(&x, &y), &d(&y, &z));
        }
        acc.finish(Some(plan.seed))
    }

    /// The ordinary metric `d_l(x, y)` at label value `label`.
    pub fn project(&self, label: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        let p = self.point(x.to_vec(), label)?;
        let q = self.point(y.to_vec(), label)?;
        Ok(self.metric.eval(&p, &q))
    }

    /// Seeded check that `d_l` satisfies the scalar metric axioms.
    pub fn check_projection_axioms(
        &self,
        label: f64,
        plan: &SamplePlan,
        eta: f64,
    ) -> AxiomReport<Vec<f64>> {
        let mut rng = plan.rng();
        let mut acc = AxiomAccumulator::new(eta);
        let r = plan.box_radius;
        let d = |x: &Vec<f64>, y: &Vec<f64>| {
            let v = self.metric.eval(
                &SoftPoint::new(x.clone(), label),
                &SoftPoint::new(y.clone(), label),
            );
            SoftReal::constant(1, v)
        };
        for i in 0..plan.samples {
            let x = self.random_point(&mut rng, r).element;
            let y = if i % 3 == 0 {
                x.clone()
            } else {
                self.random_point(&mut rng, r).element
            };
            let z = self.random_point(&mut rng, r).element;
            acc.check_pair(&x, &y, x == y, &d(&x, &y), &d(&y, &x));
            acc.check_triple(&x, &y, &z, &d(&x, &z), &d(&x, &y), &d(&y, &z));
        }
        acc.finish(Some(plan.seed))
    }

    pub fn in_ball(
        &self,
        center: &AnalyticPoint,
        radius: &SoftReal,
        closed: bool,
        p: &AnalyticPoint,
    ) -> Result<bool> {
        let d = self.distance(center, p)?;
        if closed {
            Ok(d.compare(radius, 0.0)?.le)
        } else {
            d.lt(radius)
        }
    }

    fn constant(&self, value: f64) -> SoftReal {
        SoftReal::constant(self.params.len(), value)
    }

    fn require_sum_family(&self) -> Result<()> {
        if self.metric.family != Family::Sum {
            return Err(SoftError::Domain(
                "closed-form ball distances need the sum family".into(),
            ));
        }
        Ok(())
    }

    /// Labels over which set distances are minimized: the seed values plus
    /// the query and center labels. For `abs_diff` the infimum over all real
    /// labels is attained at one of the latter two.
    fn candidate_labels(&self, query: f64, center: f64) -> Vec<f64> {
        let mut labels = self.label_values().to_vec();
        labels.push(query);
        labels.push(center);
        labels
    }

    /// Distance from `p` to the open ball, as the infimum over labels `m` of
    /// `w * rho_E(l, m) + inf { rho_X(x, y) : y in the ball's m-section }`.
    pub fn dist_to_ball(&self, p: &AnalyticPoint, ball: &OpenBall) -> Result<SoftReal> {
        self.require_sum_family()?;
        self.validate(p)?;
        self.validate(&ball.center)?;
        let r = ball.effective_radius();
        if r <= 0.0 {
            return Err(SoftError::Domain(
                "open ball with a non-positive radius is null".into(),
            ));
        }
        let w = self.metric.weight;
        let to_center = self.metric.point_dist(&p.element, &ball.center.element);
        let best = self
            .candidate_labels(p.label, ball.center.label)
            .into_iter()
            .filter_map(|mu| {
                let section_radius = r - w * self.metric.param_dist(ball.center.label, mu);
                if section_radius <= 0.0 {
                    return None;
                }
                let inside = match self.metric.point_part {
                    PointPart::Euclidean => (to_center - section_radius).max(0.0),
                    PointPart::Discrete if section_radius > 1.0 => 0.0,
                    PointPart::Discrete => to_center,
                };
                Some(w * self.metric.param_dist(p.label, mu) + inside)
            })
            .fold(f64::INFINITY, f64::min);
        Ok(self.constant(best))
    }

    /// Distance from `p` to the complement of the open ball. `None` when the
    /// complement has no points among the candidate labels.
    pub fn dist_to_ball_complement(
        &self,
        p: &AnalyticPoint,
        ball: &OpenBall,
    ) -> Result<Option<SoftReal>> {
        self.require_sum_family()?;
        self.validate(p)?;
        self.validate(&ball.center)?;
        let r = ball.effective_radius();
        let w = self.metric.weight;
        let to_center = self.metric.point_dist(&p.element, &ball.center.element);
        let best = self
            .candidate_labels(p.label, ball.center.label)
            .into_iter()
            .filter_map(|mu| {
                let section_radius = r - w * self.metric.param_dist(ball.center.label, mu);
                let outside = if section_radius <= 0.0 {
                    0.0
                } else {
                    match self.metric.point_part {
                        PointPart::Euclidean => (section_radius - to_center).max(0.0),
                        PointPart::Discrete if section_radius > 1.0 => return None,
                        PointPart::Discrete if to_center > 0.0 => 0.0,
                        PointPart::Discrete => 1.0,
                    }
                };
                Some(w * self.metric.param_dist(p.label, mu) + outside)
            })
            .fold(f64::INFINITY, f64::min);
        Ok(best.is_finite().then(|| self.constant(best)))
    }
}

impl SoftMetric for AnalyticSpace {
    type Point = AnalyticPoint;

    fn params(&self) -> &ParamSet {
        &self.params
    }

    fn distance(&self, p: &AnalyticPoint, q: &AnalyticPoint) -> Result<SoftReal> {
        self.validate(p)?;
        self.validate(q)?;
        SoftReal::new(vec![self.metric.eval(p, q); self.params.len()])
    }

    fn describe_point(&self, p: &AnalyticPoint) -> String {
        p.describe()
    }
}
