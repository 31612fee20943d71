//! JSON descriptors for spaces and mappings, with strict schema checks and
//! coded diagnostics.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::mapping::{AnalyticMapping, ParamMap, TableMapping};
use crate::metric::{
    AnalyticSpace, DistanceTable, Family, MetricDescriptor, ParamPart, PointPart, TabulatedSpace,
};
use crate::soft_real::ParamSet;
use crate::soft_set::{SoftPoint, Universe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiagnosticCode {
    #[serde(rename = "E_SYNTAX")]
    Syntax,
    #[serde(rename = "E_SCHEMA")]
    Schema,
    #[serde(rename = "E_DUP_LABEL")]
    DupLabel,
    #[serde(rename = "E_DUP_ELEMENT")]
    DupElement,
    #[serde(rename = "E_DANGLING_REF")]
    DanglingRef,
    #[serde(rename = "E_NON_FINITE")]
    NonFinite,
    #[serde(rename = "E_MISSING_PAIR")]
    MissingPair,
    #[serde(rename = "E_DUP_PAIR")]
    DupPair,
    #[serde(rename = "E_BACKEND_MISMATCH")]
    BackendMismatch,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Syntax => "E_SYNTAX",
            DiagnosticCode::Schema => "E_SCHEMA",
            DiagnosticCode::DupLabel => "E_DUP_LABEL",
            DiagnosticCode::DupElement => "E_DUP_ELEMENT",
            DiagnosticCode::DanglingRef => "E_DANGLING_REF",
            DiagnosticCode::NonFinite => "E_NON_FINITE",
            DiagnosticCode::MissingPair => "E_MISSING_PAIR",
            DiagnosticCode::DupPair => "E_DUP_PAIR",
            DiagnosticCode::BackendMismatch => "E_BACKEND_MISMATCH",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    /// Field path such as `space.distances[3].value`.
    pub path: Option<String>,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code.as_str())?;
        if let Some(path) = &self.path {
            write!(f, " at {path}")?;
        }
        if let (Some(line), Some(column)) = (self.line, self.column) {
            write!(f, " (line {line}, column {column})")?;
        }
        write!(f, ": {}", self.message)
    }
}

fn diag(code: DiagnosticCode, path: impl Into<String>, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        code,
        path: Some(path.into()),
        line: None,
        column: None,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescriptor {
    pub parameters: Vec<ParameterSpec>,
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mapping: Option<MappingSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case", try_from = "RawSpace")]
pub enum SpaceSpec {
    Tabulated {
        universe: Vec<String>,
        distances: Vec<DistanceEntry>,
    },
    Analytic {
        dim: usize,
        metric: MetricSpec,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Backend {
    Tabulated,
    Analytic,
}

/// Flat form of `SpaceSpec` so that field errors keep their paths.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    backend: Backend,
    universe: Option<Vec<String>>,
    distances: Option<Vec<DistanceEntry>>,
    dim: Option<usize>,
    metric: Option<MetricSpec>,
}

impl TryFrom<RawSpace> for SpaceSpec {
    type Error = String;

    fn try_from(raw: RawSpace) -> Result<Self, String> {
        let missing = |field: &str, backend: &str| {
            format!("missing field `{field}` for the {backend} backend")
        };
        let stray = |field: &str, backend: &str| {
            format!("field `{field}` is not allowed for the {backend} backend")
        };
        match raw.backend {
            Backend::Tabulated => {
                if raw.dim.is_some() {
                    return Err(stray("dim", "tabulated"));
                }
                if raw.metric.is_some() {
                    return Err(stray("metric", "tabulated"));
                }
                Ok(SpaceSpec::Tabulated {
                    universe: raw
                        .universe
                        .ok_or_else(|| missing("universe", "tabulated"))?,
                    distances: raw
                        .distances
                        .ok_or_else(|| missing("distances", "tabulated"))?,
                })
            }
            Backend::Analytic => {
                if raw.universe.is_some() {
                    return Err(stray("universe", "analytic"));
                }
                if raw.distances.is_some() {
                    return Err(stray("distances", "analytic"));
                }
                Ok(SpaceSpec::Analytic {
                    dim: raw.dim.ok_or_else(|| missing("dim", "analytic"))?,
                    metric: raw.metric.ok_or_else(|| missing("metric", "analytic"))?,
                })
            }
        }
    }
}

/// Distance from soft point `p` to soft point `q`, both as `[element, label]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceEntry {
    pub p: (String, String),
    pub q: (String, String),
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilySpec {
    Sum,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    AbsDiff,
    CappedAbsDiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Euclidean,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub family: FamilySpec,
    pub param: ParamPartSpec,
    pub point: PointPartSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamPartSpec {
    pub kind: ParamKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointPartSpec {
    pub kind: PointKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSpec {
    pub f: PointMapSpec,
    pub phi: ParamMapSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointMapSpec {
    Affine {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Table {
        map: BTreeMap<String, String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamMapSpec {
    Affine { a: f64, c: f64 },
    RecipSum,
    Table { map: BTreeMap<String, String> },
}

/// A built space with its optional mapping.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Tabulated {
        space: TabulatedSpace,
        mapping: Option<TableMapping>,
    },
    Analytic {
        space: AnalyticSpace,
        mapping: Option<AnalyticMapping>,
    },
}

/// Parses and validates a descriptor.
pub fn parse_descriptor(text: &str) -> Result<SpaceDescriptor, Diagnostic> {
    let mut de = serde_json::Deserializer::from_str(text);
    let parsed: Result<SpaceDescriptor, _> = serde_path_to_error::deserialize(&mut de);
    let descriptor = match parsed {
        Ok(d) => d,
        Err(err) => {
            let path = err.path().to_string();
            let inner = err.into_inner();
            let code = if inner.to_string().contains("number out of range") {
                DiagnosticCode::NonFinite
            } else if inner.is_data() {
                DiagnosticCode::Schema
            } else {
                DiagnosticCode::Syntax
            };
            return Err(Diagnostic {
                code,
                path: (code != DiagnosticCode::Syntax && path != ".").then_some(path),
                line: Some(inner.line()),
                column: Some(inner.column()),
                message: inner.to_string(),
            });
        }
    };
    de.end().map_err(|e| Diagnostic {
        code: DiagnosticCode::Syntax,
        path: None,
        line: Some(e.line()),
        column: Some(e.column()),
        message: e.to_string(),
    })?;
    descriptor.validate()?;
    Ok(descriptor)
}

fn check_finite(path: impl Fn() -> String, values: &[f64]) -> Result<(), Diagnostic> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(diag(
            DiagnosticCode::NonFinite,
            format!("{}[{i}]", path()),
            format!("{} is not finite", values[i]),
        )),
        None => Ok(()),
    }
}

fn index_names(
    names: &[String],
    dup: DiagnosticCode,
    path: &str,
    what: &str,
) -> Result<HashMap<String, usize>, Diagnostic> {
    let mut index = HashMap::new();
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(diag(
                dup,
                format!("{path}[{i}]"),
                format!("duplicate {what} {name:?}"),
            ));
        }
    }
    Ok(index)
}

impl SpaceDescriptor {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptors serialize")
    }

    fn label_index(&self) -> Result<HashMap<String, usize>, Diagnostic> {
        let labels: Vec<String> = self.parameters.iter().map(|p| p.label.clone()).collect();
        index_names(&labels, DiagnosticCode::DupLabel, "parameters", "label")
    }

    /// Checks references, duplicates, finiteness and backend agreement.
    pub fn validate(&self) -> Result<(), Diagnostic> {
        if self.parameters.is_empty() {
            return Err(diag(
                DiagnosticCode::Schema,
                "parameters",
                "at least one parameter is required",
            ));
        }
        let labels = self.label_index()?;
        let with_values = self.parameters.iter().filter(|p| p.value.is_some()).count();
        if with_values != 0 && with_values != self.parameters.len() {
            return Err(diag(
                DiagnosticCode::Schema,
                "parameters",
                "either every parameter has a value or none has",
            ));
        }
        for (i, p) in self.parameters.iter().enumerate() {
            if let Some(v) = p.value {
                check_finite(|| format!("parameters[{i}].value"), &[v]).map_err(|mut d| {
                    d.path = Some(format!("parameters[{i}].value"));
                    d
                })?;
            }
        }
        let k = self.parameters.len();
        match &self.space {
            SpaceSpec::Tabulated {
                universe,
                distances,
            } => {
                if universe.is_empty() {
                    return Err(diag(
                        DiagnosticCode::Schema,
                        "space.universe",
                        "universe is empty",
                    ));
                }
                let elements = index_names(
                    universe,
                    DiagnosticCode::DupElement,
                    "space.universe",
                    "element",
                )?;
                let n = universe.len();
                let point =
                    |(e, l): &(String, String), path: String| -> Result<usize, Diagnostic> {
                        let x = *elements.get(e).ok_or_else(|| {
                            diag(
                                DiagnosticCode::DanglingRef,
                                format!("{path}[0]"),
                                format!("unknown element {e:?}"),
                            )
                        })?;
                        let lab = *labels.get(l).ok_or_else(|| {
                            diag(
                                DiagnosticCode::DanglingRef,
                                format!("{path}[1]"),
                                format!("unknown label {l:?}"),
                            )
                        })?;
                        Ok(SoftPoint::new(x, lab).index(n))
                    };
                let mut seen = HashSet::new();
                for (i, entry) in distances.iter().enumerate() {
                    let base = format!("space.distances[{i}]");
                    let p = point(&entry.p, format!("{base}.p"))?;
                    let q = point(&entry.q, format!("{base}.q"))?;
                    if entry.value.len() != k {
                        return Err(diag(
                            DiagnosticCode::Schema,
                            format!("{base}.value"),
                            format!("expected {k} components, found {}", entry.value.len()),
                        ));
                    }
                    check_finite(|| format!("{base}.value"), &entry.value)?;
                    if !seen.insert((p, q)) {
                        return Err(diag(DiagnosticCode::DupPair, base, "pair listed twice"));
                    }
                }
                let total = n * k;
                for i in 0..total {
                    for j in i + 1..total {
                        if !seen.contains(&(i, j)) && !seen.contains(&(j, i)) {
                            let (a, b) = (SoftPoint::from_index(i, n), SoftPoint::from_index(j, n));
                            return Err(diag(
                                DiagnosticCode::MissingPair,
                                "space.distances",
                                format!(
                                    "no distance between {}@{} and {}@{}",
                                    universe[a.element],
                                    self.parameters[a.label].label,
                                    universe[b.element],
                                    self.parameters[b.label].label
                                ),
                            ));
                        }
                    }
                }
            }
            SpaceSpec::Analytic { dim, metric } => {
                if with_values == 0 {
                    return Err(diag(
                        DiagnosticCode::BackendMismatch,
                        "parameters",
                        "the analytic backend needs numeric parameter values",
                    ));
                }
                if *dim == 0 {
                    return Err(diag(
                        DiagnosticCode::Schema,
                        "space.dim",
                        "dimension must be at least 1",
                    ));
                }
                let param = &metric.param;
                check_finite(|| "space.metric.param.weight".into(), &[param.weight]).map_err(
                    |mut d| {
                        d.path = Some("space.metric.param.weight".into());
                        d
                    },
                )?;
                if param.weight <= 0.0 {
                    return Err(diag(
                        DiagnosticCode::Schema,
                        "space.metric.param.weight",
                        "weight must be positive",
                    ));
                }
                match (param.kind, param.cap) {
                    (ParamKind::CappedAbsDiff, None) => {
                        return Err(diag(
                            DiagnosticCode::Schema,
                            "space.metric.param",
                            "capped_abs_diff needs a cap",
                        ))
                    }
                    (ParamKind::AbsDiff, Some(_)) => {
                        return Err(diag(
                            DiagnosticCode::Schema,
                            "space.metric.param.cap",
                            "abs_diff takes no cap",
                        ))
                    }
                    (ParamKind::CappedAbsDiff, Some(cap)) if !(cap.is_finite() && cap > 0.0) => {
                        return Err(diag(
                            DiagnosticCode::Schema,
                            "space.metric.param.cap",
                            "cap must be positive and finite",
                        ))
                    }
                    _ => {}
                }
            }
        }
        if let Some(mapping) = &self.mapping {
            self.validate_mapping(mapping, &labels)?;
        }
        Ok(())
    }

    fn validate_mapping(
        &self,
        mapping: &MappingSpec,
        labels: &HashMap<String, usize>,
    ) -> Result<(), Diagnostic> {
        let tabulated = matches!(self.space, SpaceSpec::Tabulated { .. });
        match (&mapping.f, &self.space) {
            (PointMapSpec::Affine { a, b }, SpaceSpec::Analytic { dim, .. }) => {
                if b.len() != *dim || a.len() != *dim || a.iter().any(|row| row.len() != *dim) {
                    return Err(diag(
                        DiagnosticCode::Schema,
                        "mapping.f",
                        format!("affine map must be {dim} x {dim} with a {dim}-vector offset"),
                    ));
                }
                for (i, row) in a.iter().enumerate() {
                    check_finite(|| format!("mapping.f.A[{i}]"), row)?;
                }
                check_finite(|| "mapping.f.b".into(), b)?;
            }
            (PointMapSpec::Table { map }, SpaceSpec::Tabulated { universe, .. }) => {
                check_table(map, universe, "mapping.f.map", "element")?;
            }
            _ => {
                return Err(diag(
                    DiagnosticCode::BackendMismatch,
                    "mapping.f",
                    if tabulated {
                        "finite spaces need a table point map"
                    } else {
                        "analytic spaces need an affine point map"
                    },
                ))
            }
        }
        match &mapping.phi {
            ParamMapSpec::Affine { a, c } => {
                if tabulated {
                    return Err(diag(
                        DiagnosticCode::BackendMismatch,
                        "mapping.phi",
                        "finite spaces need a table label map",
                    ));
                }
                check_finite(|| "mapping.phi".into(), &[*a, *c])?;
            }
            ParamMapSpec::RecipSum => {
                if tabulated {
                    return Err(diag(
                        DiagnosticCode::BackendMismatch,
                        "mapping.phi",
                        "finite spaces need a table label map",
                    ));
                }
            }
            ParamMapSpec::Table { map } => {
                let names: Vec<String> = self.parameters.iter().map(|p| p.label.clone()).collect();
                debug_assert_eq!(names.len(), labels.len());
                check_table(map, &names, "mapping.phi.map", "label")?;
            }
        }
        Ok(())
    }

    /// Builds the space and mapping. Fails only if the descriptor is invalid.
    pub fn build(&self) -> Result<Model, Diagnostic> {
        self.validate()?;
        let labels: Vec<String> = self.parameters.iter().map(|p| p.label.clone()).collect();
        let values: Option<Vec<f64>> = self.parameters.iter().map(|p| p.value).collect();
        let params = ParamSet::new(labels.clone(), values).map_err(schema_error)?;
        match &self.space {
            SpaceSpec::Tabulated { universe, .. } => {
                let table = self.raw_table()?;
                let universe_set = Universe::new(universe.iter().cloned()).map_err(schema_error)?;
                let space =
                    TabulatedSpace::new(params, universe_set, table).map_err(schema_error)?;
                let mapping = match &self.mapping {
                    None => None,
                    Some(MappingSpec {
                        f: PointMapSpec::Table { map: f },
                        phi: ParamMapSpec::Table { map: phi },
                    }) => Some(
                        TableMapping::new(
                            table_indices(f, universe),
                            table_indices(phi, &labels),
                            universe.len(),
                            labels.len(),
                        )
                        .map_err(schema_error)?,
                    ),
                    Some(_) => unreachable!("validated"),
                };
                Ok(Model::Tabulated { space, mapping })
            }
            SpaceSpec::Analytic { dim, metric } => {
                let param_part = match metric.param.kind {
                    ParamKind::AbsDiff => ParamPart::AbsDiff,
                    ParamKind::CappedAbsDiff => ParamPart::CappedAbsDiff {
                        cap: metric.param.cap.expect("validated"),
                    },
                };
                let family = match metric.family {
                    FamilySpec::Sum => Family::Sum,
                    FamilySpec::Power => Family::Power,
                };
                let point_part = match metric.point.kind {
                    PointKind::Euclidean => PointPart::Euclidean,
                    PointKind::Discrete => PointPart::Discrete,
                };
                let descriptor =
                    MetricDescriptor::new(family, param_part, metric.param.weight, point_part)
                        .map_err(schema_error)?;
                let space =
                    AnalyticSpace::new(params.clone(), *dim, descriptor).map_err(schema_error)?;
                let mapping = match &self.mapping {
                    None => None,
                    Some(MappingSpec {
                        f: PointMapSpec::Affine { a, b },
                        phi,
                    }) => {
                        let phi = match phi {
                            ParamMapSpec::Affine { a, c } => ParamMap::Affine { a: *a, c: *c },
                            ParamMapSpec::RecipSum => ParamMap::RecipSum,
                            ParamMapSpec::Table { map } => ParamMap::Table {
                                pairs: map
                                    .iter()
                                    .map(|(from, to)| {
                                        let value = |l: &str| {
                                            params
                                                .value(params.index_of(l).expect("validated"))
                                                .expect("numeric")
                                        };
                                        (value(from), value(to))
                                    })
                                    .collect(),
                            },
                        };
                        Some(
                            AnalyticMapping::new(a.clone(), b.clone(), phi)
                                .map_err(schema_error)?,
                        )
                    }
                    Some(_) => unreachable!("validated"),
                };
                Ok(Model::Analytic { space, mapping })
            }
        }
    }

    /// The distance table as listed, mirrored where only one orientation is
    /// given, with a zero diagonal.
    pub fn raw_table(&self) -> Result<DistanceTable, Diagnostic> {
        let SpaceSpec::Tabulated {
            universe,
            distances,
        } = &self.space
        else {
            return Err(diag(
                DiagnosticCode::BackendMismatch,
                "space.backend",
                "not a tabulated space",
            ));
        };
        let n = universe.len();
        let k = self.parameters.len();
        let labels = self.label_index()?;
        let idx = |(e, l): &(String, String)| {
            let x = universe.iter().position(|u| u == e).expect("validated");
            SoftPoint::new(x, labels[l]).index(n)
        };
        let mut table = DistanceTable::zeros(n * k, k);
        let explicit: HashSet<(usize, usize)> =
            distances.iter().map(|d| (idx(&d.p), idx(&d.q))).collect();
        for d in distances {
            let (i, j) = (idx(&d.p), idx(&d.q));
            if i == j {
                continue;
            }
            table.set(i, j, &d.value);
            if !explicit.contains(&(j, i)) {
                table.set(j, i, &d.value);
            }
        }
        Ok(table)
    }

    /// Descriptor of a finite space: one entry per unordered pair, plus the
    /// reverse orientation where the table is not symmetric.
    pub fn from_tabulated(space: &TabulatedSpace, mapping: Option<&TableMapping>) -> Self {
        let params = crate::metric::SoftMetric::params(space);
        let universe = space.universe();
        let name = |i: usize| {
            let p = space.point(i);
            (
                universe.name(p.element).to_string(),
                params.label(p.label).to_string(),
            )
        };
        let table = space.table();
        let mut distances = Vec::new();
        for i in 0..space.n_points() {
            for j in i + 1..space.n_points() {
                distances.push(DistanceEntry {
                    p: name(i),
                    q: name(j),
                    value: table.get(i, j).to_vec(),
                });
                if table.get(i, j) != table.get(j, i) {
                    distances.push(DistanceEntry {
                        p: name(j),
                        q: name(i),
                        value: table.get(j, i).to_vec(),
                    });
                }
            }
        }
        let mapping = mapping.map(|m| MappingSpec {
            f: PointMapSpec::Table {
                map: m
                    .f()
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| (universe.name(x).to_string(), universe.name(y).to_string()))
                    .collect(),
            },
            phi: ParamMapSpec::Table {
                map: m
                    .phi()
                    .iter()
                    .enumerate()
                    .map(|(l, &t)| (params.label(l).to_string(), params.label(t).to_string()))
                    .collect(),
            },
        });
        SpaceDescriptor {
            parameters: (0..params.len())
                .map(|i| ParameterSpec {
                    label: params.label(i).to_string(),
                    value: params.value(i),
                })
                .collect(),
            space: SpaceSpec::Tabulated {
                universe: universe.names().to_vec(),
                distances,
            },
            mapping,
        }
    }
}

fn schema_error(e: crate::SoftError) -> Diagnostic {
    Diagnostic {
        code: DiagnosticCode::Schema,
        path: None,
        line: None,
        column: None,
        message: e.to_string(),
    }
}

fn check_table(
    map: &BTreeMap<String, String>,
    names: &[String],
    path: &str,
    what: &str,
) -> Result<(), Diagnostic> {
    for (from, to) in map {
        for name in [from, to] {
            if !names.contains(name) {
                return Err(diag(
                    DiagnosticCode::DanglingRef,
                    format!("{path}.{from}"),
                    format!("unknown {what} {name:?}"),
                ));
            }
        }
    }
    if let Some(missing) = names.iter().find(|n| !map.contains_key(*n)) {
        return Err(diag(
            DiagnosticCode::Schema,
            path,
            format!("table has no entry for {what} {missing:?}"),
        ));
    }
    Ok(())
}

fn table_indices(map: &BTreeMap<String, String>, names: &[String]) -> Vec<usize> {
    names
        .iter()
        .map(|n| names.iter().position(|m| *m == map[n]).expect("validated"))
        .collect()
}
