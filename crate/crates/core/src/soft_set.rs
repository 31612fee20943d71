//! Soft sets over a finite universe, soft points, and point decomposition.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Result, SoftError};
use crate::soft_real::ParamSet;

/// Ordered, named elements of a finite universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Universe {
    elements: Vec<String>,
}

impl Universe {
    pub fn new<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        if elements.is_empty() {
            return Err(SoftError::Domain("universe must be non-empty".into()));
        }
        let mut seen = HashSet::new();
        for e in &elements {
            if !seen.insert(e.as_str()) {
                return Err(SoftError::Domain(format!(
                    "duplicate universe element `{e}`"
                )));
            }
        }
        Ok(Universe { elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.elements[index]
    }

    pub fn names(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| SoftError::UnknownElement(name.to_string()))
    }
}

/// One universe element tagged with one parameter label.
///
/// Two soft points are equal iff both the element and the label agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SoftPoint<X = usize, L = usize> {
    pub element: X,
    pub label: L,
}

/// Soft point of a finite space: element and label are indices.
pub type FinitePoint = SoftPoint<usize, usize>;

/// Soft point of an analytic space: real coordinates and a raw numeric label.
pub type AnalyticPoint = SoftPoint<Vec<f64>, f64>;

impl<X, L> SoftPoint<X, L> {
    pub fn new(element: X, label: L) -> Self {
        SoftPoint { element, label }
    }
}

impl FinitePoint {
    /// Dense index in label-major order.
    pub fn index(&self, n_elements: usize) -> usize {
        self.label * n_elements + self.element
    }

    pub fn from_index(index: usize, n_elements: usize) -> Self {
        SoftPoint {
            element: index % n_elements,
            label: index / n_elements,
        }
    }

    pub fn describe(&self, universe: &Universe, params: &ParamSet) -> String {
        format!(
            "{}@{}",
            universe.name(self.element),
            params.label(self.label)
        )
    }
}

impl AnalyticPoint {
    pub fn describe(&self) -> String {
        let coords: Vec<String> = self.element.iter().map(|c| format!("{c}")).collect();
        format!("{}@{}", coords.join(","), self.label)
    }
}

/// A map from parameter labels to subsets of a finite universe.
///
/// Every label has a section, possibly empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SoftSet {
    n_elements: usize,
    sections: Vec<BTreeSet<usize>>,
}

impl SoftSet {
    /// The null soft set.
    pub fn null(n_elements: usize, n_labels: usize) -> Self {
        SoftSet {
            n_elements,
            sections: vec![BTreeSet::new(); n_labels],
        }
    }

    /// The absolute soft set: every section is the whole universe.
    pub fn absolute(n_elements: usize, n_labels: usize) -> Self {
        SoftSet {
            n_elements,
            sections: vec![(0..n_elements).collect(); n_labels],
        }
    }

    pub fn from_sections(n_elements: usize, sections: Vec<BTreeSet<usize>>) -> Result<Self> {
        if sections.is_empty() {
            return Err(SoftError::Domain(
                "soft set needs at least one label".into(),
            ));
        }
        if let Some(&bad) = sections.iter().flatten().find(|&&e| e >= n_elements) {
            return Err(SoftError::UnknownElement(format!("#{bad}")));
        }
        Ok(SoftSet {
            n_elements,
            sections,
        })
    }

    /// Union of the given soft points.
    pub fn from_points<'a, I>(n_elements: usize, n_labels: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a FinitePoint>,
    {
        let mut set = SoftSet::null(n_elements, n_labels);
        for p in points {
            if p.element >= n_elements {
                return Err(SoftError::UnknownElement(format!("#{}", p.element)));
            }
            if p.label >= n_labels {
                return Err(SoftError::UnknownLabel(format!("#{}", p.label)));
            }
            set.sections[p.label].insert(p.element);
        }
        Ok(set)
    }

    /// The soft set whose points are the set bits of `mask`, using the dense
    /// label-major point index. Requires `n_elements * n_labels <= 64`.
    pub fn from_mask(n_elements: usize, n_labels: usize, mask: u64) -> Self {
        let total = n_elements * n_labels;
        assert!(total <= 64, "mask enumeration limited to 64 soft points");
        let mut set = SoftSet::null(n_elements, n_labels);
        for i in (0..total).filter(|i| mask >> i & 1 == 1) {
            let p = FinitePoint::from_index(i, n_elements);
            set.sections[p.label].insert(p.element);
        }
        set
    }

    /// Parses named sections against a universe and parameter set.
    pub fn from_named(
        universe: &Universe,
        params: &ParamSet,
        sections: &BTreeMap<String, Vec<String>>,
    ) -> Result<Self> {
        let mut set = SoftSet::null(universe.len(), params.len());
        for (label, elements) in sections {
            let l = params.require(label)?;
            for e in elements {
                set.sections[l].insert(universe.require(e)?);
            }
        }
        Ok(set)
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_labels(&self) -> usize {
        self.sections.len()
    }

    pub fn section(&self, label: usize) -> &BTreeSet<usize> {
        &self.sections[label]
    }

    pub fn sections(&self) -> &[BTreeSet<usize>] {
        &self.sections
    }

    /// Number of soft points in the set.
    pub fn len(&self) -> usize {
        self.sections.iter().map(BTreeSet::len).sum()
    }

    pub fn is_null(&self) -> bool {
        self.sections.iter().all(BTreeSet::is_empty)
    }

    pub fn is_empty(&self) -> bool {
        self.is_null()
    }

    pub fn contains(&self, p: &FinitePoint) -> bool {
        self.sections
            .get(p.label)
            .is_some_and(|s| s.contains(&p.element))
    }

    pub fn insert(&mut self, p: &FinitePoint) {
        self.sections[p.label].insert(p.element);
    }

    /// The soft points making up the set, label-major.
    pub fn points(&self) -> Vec<FinitePoint> {
        self.sections
            .iter()
            .enumerate()
            .flat_map(|(label, s)| s.iter().map(move |&element| SoftPoint { element, label }))
            .collect()
    }

    fn check_compatible(&self, other: &SoftSet) -> Result<()> {
        if self.n_elements != other.n_elements {
            return Err(SoftError::Domain(format!(
                "soft sets over different universes ({} vs {} elements)",
                self.n_elements, other.n_elements
            )));
        }
        if self.n_labels() != other.n_labels() {
            return Err(SoftError::Domain(format!(
                "soft sets over different parameter sets ({} vs {} labels)",
                self.n_labels(),
                other.n_labels()
            )));
        }
        Ok(())
    }

    fn sectionwise(
        &self,
        other: &SoftSet,
        op: impl Fn(&BTreeSet<usize>, &BTreeSet<usize>) -> BTreeSet<usize>,
    ) -> Result<SoftSet> {
        self.check_compatible(other)?;
        Ok(SoftSet {
            n_elements: self.n_elements,
            sections: self
                .sections
                .iter()
                .zip(&other.sections)
                .map(|(a, b)| op(a, b))
                .collect(),
        })
    }

    pub fn union(&self, other: &SoftSet) -> Result<SoftSet> {
        self.sectionwise(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &SoftSet) -> Result<SoftSet> {
        self.sectionwise(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &SoftSet) -> Result<SoftSet> {
        self.sectionwise(other, |a, b| a - b)
    }

    pub fn complement(&self) -> SoftSet {
        SoftSet {
            n_elements: self.n_elements,
            sections: self
                .sections
                .iter()
                .map(|s| (0..self.n_elements).filter(|e| !s.contains(e)).collect())
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &SoftSet) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self
            .sections
            .iter()
            .zip(&other.sections)
            .all(|(a, b)| a.is_subset(b)))
    }

    /// Sections keyed by label name, listing element names.
    pub fn to_named(
        &self,
        universe: &Universe,
        params: &ParamSet,
    ) -> BTreeMap<String, Vec<String>> {
        self.sections
            .iter()
            .enumerate()
            .map(|(l, s)| {
                (
                    params.label(l).to_string(),
                    s.iter().map(|&e| universe.name(e).to_string()).collect(),
                )
            })
            .collect()
    }

    pub fn describe(&self, universe: &Universe, params: &ParamSet) -> String {
        let parts: Vec<String> = self
            .sections
            .iter()
            .enumerate()
            .map(|(l, s)| {
                let names: Vec<&str> = s.iter().map(|&e| universe.name(e)).collect();
                format!("{}:{{{}}}", params.label(l), names.join(","))
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Decomposes a soft set into its soft points.
pub fn decompose(set: &SoftSet) -> Vec<FinitePoint> {
    set.points()
}

/// Union of soft points, re-assembling a decomposition.
pub fn assemble(n_elements: usize, n_labels: usize, points: &[FinitePoint]) -> Result<SoftSet> {
    SoftSet::from_points(n_elements, n_labels, points)
}
