//! Point and set arguments: `x1,x2@label`, `element@label`,
//! `label:e1,e2;label2:e3` and `ball(center;radius)`.

use std::collections::BTreeMap;

use softfix_core::metric::{AnalyticSpace, OpenBall, SoftMetric, TabulatedSpace};
use softfix_core::soft_real::SoftReal;
use softfix_core::soft_set::{AnalyticPoint, FinitePoint, SoftSet};

fn split_at_label(text: &str) -> Result<(&str, &str), String> {
    text.rsplit_once('@')
        .map(|(l, r)| (l.trim(), r.trim()))
        .ok_or_else(|| format!("point {text:?} must have the form <point>@<label>"))
}

pub fn finite_point(space: &TabulatedSpace, text: &str) -> Result<FinitePoint, String> {
    let (element, label) = split_at_label(text)?;
    space.point_named(element, label).map_err(|e| e.to_string())
}

/// Label names resolve to their values; anything else must be a number.
pub fn label_value(space: &AnalyticSpace, label: &str) -> Result<f64, String> {
    let params = space.params();
    if let Some(i) = params.index_of(label) {
        return Ok(params.value(i).expect("analytic labels are numeric"));
    }
    label
        .parse::<f64>()
        .map_err(|_| format!("unknown label {label:?}"))
}

pub fn analytic_point(space: &AnalyticSpace, text: &str) -> Result<AnalyticPoint, String> {
    let (coords, label) = split_at_label(text)?;
    let coords = parse_numbers(coords)?;
    space
        .point(coords, label_value(space, label)?)
        .map_err(|e| e.to_string())
}

fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| format!("{c:?} is not a number"))
        })
        .collect()
}

/// A parsed set argument, not yet tied to a backend.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    Sections(BTreeMap<String, Vec<String>>),
    Ball { center: String, radius: Vec<f64> },
}

pub fn parse_set(text: &str) -> Result<SetSpec, String> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix("ball(").and_then(|s| s.strip_suffix(')')) {
        let (center, radius) = inner
            .split_once(';')
            .ok_or_else(|| format!("ball {text:?} must have the form ball(center;radius)"))?;
        return Ok(SetSpec::Ball {
            center: center.trim().to_string(),
            radius: parse_numbers(radius)?,
        });
    }
    let mut sections = BTreeMap::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (label, elements) = part
            .split_once(':')
            .ok_or_else(|| format!("section {part:?} must have the form label:e1,e2"))?;
        let entry: &mut Vec<String> = sections.entry(label.trim().to_string()).or_default();
        entry.extend(
            elements
                .split(',')
                .map(str::trim)
                .filter(|e| !e.is_empty())
                .map(String::from),
        );
    }
    Ok(SetSpec::Sections(sections))
}

fn radius(values: &[f64], components: usize) -> Result<SoftReal, String> {
    let entries = match values.len() {
        1 => vec![values[0]; components],
        n if n == components => values.to_vec(),
        n => {
            return Err(format!(
                "radius has {n} components, expected 1 or {components}"
            ))
        }
    };
    SoftReal::new(entries).map_err(|e| e.to_string())
}

pub fn finite_set(space: &TabulatedSpace, text: &str) -> Result<SoftSet, String> {
    match parse_set(text)? {
        SetSpec::Sections(sections) => {
            SoftSet::from_named(space.universe(), space.params(), &sections)
                .map_err(|e| e.to_string())
        }
        SetSpec::Ball { center, radius: r } => {
            let center = finite_point(space, &center)?;
            let r = radius(&r, space.components())?;
            space.ball(&center, &r, false).map_err(|e| e.to_string())
        }
    }
}

pub fn analytic_ball(space: &AnalyticSpace, text: &str) -> Result<OpenBall, String> {
    match parse_set(text)? {
        SetSpec::Ball { center, radius: r } => Ok(OpenBall {
            center: analytic_point(space, &center)?,
            radius: radius(&r, space.components())?,
        }),
        SetSpec::Sections(_) => Err("analytic spaces take ball(center;radius) sets".into()),
    }
}
