//! Finite soft metric spaces backed by an explicit distance table.

use crate::error::{Result, SoftError};
use crate::soft_real::{ParamSet, SoftReal};
use crate::soft_set::{FinitePoint, SoftSet, Universe};

use super::{AxiomAccumulator, AxiomReport, SoftMetric};

/// Dense table of soft-real distances over ordered pairs of soft points.
///
/// Points are indexed label-major (see [`FinitePoint::index`]); each entry
/// holds one value per parameter component.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    n_points: usize,
    components: usize,
    data: Vec<f64>,
}

impl DistanceTable {
    pub fn zeros(n_points: usize, components: usize) -> Self {
        DistanceTable {
            n_points,
            components,
            data: vec![0.0; n_points * n_points * components],
        }
    }

    pub fn from_fn(
        n_points: usize,
        components: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut table = Self::zeros(n_points, components);
        for i in 0..n_points {
            for j in 0..n_points {
                for k in 0..components {
                    table.data[(i * n_points + j) * components + k] = f(i, j, k);
                }
            }
        }
        table
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn components(&self) -> usize {
        self.components
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        (i * self.n_points + j) * self.components
    }

    pub fn get(&self, i: usize, j: usize) -> &[f64] {
        let o = self.offset(i, j);
        &self.data[o..o + self.components]
    }

    pub fn set(&mut self, i: usize, j: usize, values: &[f64]) {
        assert_eq!(values.len(), self.components);
        let o = self.offset(i, j);
        self.data[o..o + self.components].copy_from_slice(values);
    }

    /// Sets both orientations of an unordered pair.
    pub fn set_symmetric(&mut self, i: usize, j: usize, values: &[f64]) {
        self.set(i, j, values);
        self.set(j, i, values);
    }

    fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.offset(i, j) + k]
    }

    fn at_mut(&mut self, i: usize, j: usize, k: usize) -> &mut f64 {
        let o = self.offset(i, j) + k;
        &mut self.data[o]
    }

    /// One min-plus (Floyd-Warshall) sweep per component. Returns whether
    /// any entry decreased.
    fn min_plus_sweep(&mut self) -> bool {
        let n = self.n_points;
        let mut changed = false;
        for k in 0..self.components {
            for via in 0..n {
                for i in 0..n {
                    let d_iv = self.at(i, via, k);
                    for j in 0..n {
                        let candidate = d_iv + self.at(via, j, k);
                        let current = self.at_mut(i, j, k);
                        if candidate < *current {
                            *current = candidate;
                            changed = true;
                        }
                    }
                }
            }
        }
        changed
    }

    /// Repeats min-plus sweeps until the table is closed under the triangle
    /// inequality in floating point.
    fn close(&mut self) {
        while self.min_plus_sweep() {}
    }
}

/// A finite soft metric space: universe, parameters and a distance table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpace {
    params: ParamSet,
    universe: Universe,
    table: DistanceTable,
}

impl TabulatedSpace {
    /// Wraps a table without enforcing the metric axioms; use
    /// [`TabulatedSpace::check_axioms`] or [`repair_to_metric`] for that.
    /// Entries must be finite.
    pub fn new(params: ParamSet, universe: Universe, table: DistanceTable) -> Result<Self> {
        let n_points = universe.len() * params.len();
        if table.n_points() != n_points {
            return Err(SoftError::DimensionMismatch {
                expected: n_points,
                found: table.n_points(),
            });
        }
        if table.components() != params.len() {
            return Err(SoftError::DimensionMismatch {
                expected: params.len(),
                found: table.components(),
            });
        }
        if let Some((i, &value)) = table.data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(SoftError::NonFinite {
                component: i % params.len(),
                value,
            });
        }
        Ok(TabulatedSpace {
            params,
            universe,
            table,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn table(&self) -> &DistanceTable {
        &self.table
    }

    pub fn n_points(&self) -> usize {
        self.table.n_points()
    }

    pub fn point(&self, index: usize) -> FinitePoint {
        FinitePoint::from_index(index, self.universe.len())
    }

    pub fn points(&self) -> impl Iterator<Item = FinitePoint> + '_ {
        (0..self.n_points()).map(|i| self.point(i))
    }

    pub fn index(&self, p: &FinitePoint) -> Result<usize> {
        if p.element >= self.universe.len() {
            return Err(SoftError::UnknownElement(format!("#{}", p.element)));
        }
        if p.label >= self.params.len() {
            return Err(SoftError::UnknownLabel(format!("#{}", p.label)));
        }
        Ok(p.index(self.universe.len()))
    }

    /// Resolves an `element@label` pair of names.
    pub fn point_named(&self, element: &str, label: &str) -> Result<FinitePoint> {
        Ok(FinitePoint::new(
            self.universe.require(element)?,
            self.params.require(label)?,
        ))
    }

    pub fn null_set(&self) -> SoftSet {
        SoftSet::null(self.universe.len(), self.params.len())
    }

    pub fn absolute_set(&self) -> SoftSet {
        SoftSet::absolute(self.universe.len(), self.params.len())
    }

    fn check_set(&self, set: &SoftSet) -> Result<()> {
        if set.n_elements() != self.universe.len() || set.n_labels() != self.params.len() {
            return Err(SoftError::Domain(
                "soft set does not belong to this space".into(),
            ));
        }
        Ok(())
    }

    /// Exhaustive check of M1-M4 over all ordered pairs and triples.
    pub fn check_axioms(&self, eta: f64) -> AxiomReport<FinitePoint> {
        let n = self.n_points();
        let d = |i: usize, j: usize| SoftReal::new(self.table.get(i, j).to_vec()).unwrap();
        let mut acc = AxiomAccumulator::new(eta);
        for i in 0..n {
            for j in 0..n {
                acc.check_pair(&self.point(i), &self.point(j), i == j, &d(i, j), &d(j, i));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let d_ij = d(i, j);
                for l in 0..n {
                    acc.check_triple(
                        &self.point(i),
                        &self.point(j),
                        &self.point(l),
                        &d(i, l),
                        &d_ij,
                        &d(j, l),
                    );
                }
            }
        }
        acc.finish(None)
    }

    /// The ordinary metric `d_label(x, y)`: component `label` of the distance
    /// between `x` and `y` both tagged with `label`.
    pub fn project(&self, label: usize) -> Result<ScalarTable> {
        if label >= self.params.len() {
            return Err(SoftError::UnknownLabel(format!("#{label}")));
        }
        let n = self.universe.len();
        let mut values = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let i = FinitePoint::new(x, label).index(n);
                let j = FinitePoint::new(y, label).index(n);
                values.push(self.table.at(i, j, label));
            }
        }
        Ok(ScalarTable { n, values })
    }

    pub fn in_ball(
        &self,
        center: &FinitePoint,
        radius: &SoftReal,
        closed: bool,
        p: &FinitePoint,
    ) -> Result<bool> {
        let d = self.distance(center, p)?;
        if closed {
            Ok(d.compare(radius, 0.0)?.le)
        } else {
            d.lt(radius)
        }
    }

    /// The open (or closed) ball as a soft set.
    pub fn ball(&self, center: &FinitePoint, radius: &SoftReal, closed: bool) -> Result<SoftSet> {
        let mut set = self.null_set();
        for p in self.points() {
            if self.in_ball(center, radius, closed, &p)? {
                set.insert(&p);
            }
        }
        Ok(set)
    }

    /// Componentwise infimum of `d(p, q)` over the soft points `q` of `set`.
    /// Minimizers may differ between components.
    pub fn dist_to_set(&self, p: &FinitePoint, set: &SoftSet) -> Result<SoftReal> {
        self.check_set(set)?;
        let i = self.index(p)?;
        let mut best: Option<Vec<f64>> = None;
        for q in set.points() {
            let row = self.table.get(i, q.index(self.universe.len()));
            match &mut best {
                None => best = Some(row.to_vec()),
                Some(b) => b.iter_mut().zip(row).for_each(|(b, &v)| *b = b.min(v)),
            }
        }
        let best = best.ok_or_else(|| {
            SoftError::Domain("distance to the null soft set is undefined".into())
        })?;
        SoftReal::new(best)
    }
}

impl SoftMetric for TabulatedSpace {
    type Point = FinitePoint;

    fn params(&self) -> &ParamSet {
        &self.params
    }

    fn distance(&self, p: &FinitePoint, q: &FinitePoint) -> Result<SoftReal> {
        let i = self.index(p)?;
        let j = self.index(q)?;
        SoftReal::new(self.table.get(i, j).to_vec())
    }

    fn describe_point(&self, p: &FinitePoint) -> String {
        p.describe(&self.universe, &self.params)
    }
}

/// An ordinary scalar metric on a finite universe.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTable {
    n: usize,
    values: Vec<f64>,
}

impl ScalarTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n + y]
    }

    /// Exhaustive check of the scalar metric axioms.
    pub fn check_axioms(&self, eta: f64) -> AxiomReport<usize> {
        let n = self.n;
        let d = |x: usize, y: usize| SoftReal::constant(1, self.get(x, y));
        let mut acc = AxiomAccumulator::new(eta);
        for x in 0..n {
            for y in 0..n {
                acc.check_pair(&x, &y, x == y, &d(x, y), &d(y, x));
                for z in 0..n {
                    acc.check_triple(&x, &y, &z, &d(x, z), &d(x, y), &d(y, z));
                }
            }
        }
        acc.finish(None)
    }
}

/// Turns a raw non-negative table into a soft metric.
///
/// Zeroes the diagonal, symmetrizes by componentwise minimum and closes the
/// table under the triangle inequality with min-plus shortest paths. Any
/// off-diagonal component left at zero is raised to `1e-3` times the
/// smallest positive entry of that component and the table is closed again.
pub fn repair_to_metric(
    params: ParamSet,
    universe: Universe,
    raw: &DistanceTable,
) -> Result<TabulatedSpace> {
    if let Some(&bad) = raw.data.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(SoftError::Domain(format!(
            "raw distance entries must be finite and non-negative, found {bad}"
        )));
    }
    let n = raw.n_points();
    let components = raw.components();
    let mut table = raw.clone();
    for i in 0..n {
        for k in 0..components {
            *table.at_mut(i, i, k) = 0.0;
        }
        for j in (i + 1)..n {
            for k in 0..components {
                let m = raw.at(i, j, k).min(raw.at(j, i, k));
                *table.at_mut(i, j, k) = m;
                *table.at_mut(j, i, k) = m;
            }
        }
    }
    table.close();

    let mut bumped = false;
    for k in 0..components {
        let smallest = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| table.at(i, j, k))
            .filter(|&v| v > 0.0)
            .fold(f64::INFINITY, f64::min);
        let floor = if smallest.is_finite() {
            smallest * 1e-3
        } else {
            1e-3
        };
        for i in 0..n {
            for j in 0..n {
                if i != j && table.at(i, j, k) == 0.0 {
                    *table.at_mut(i, j, k) = floor;
                    bumped = true;
                }
            }
        }
    }
    if bumped {
        table.close();
    }
    TabulatedSpace::new(params, universe, table)
}
