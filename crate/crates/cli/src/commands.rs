use std::path::Path;

use serde_json::{json, Value};

use softfix_core::descriptor::{Model, SpaceDescriptor};
use softfix_core::fixed_point::replay::{replay_example, ChainLines, Replay};
use softfix_core::fixed_point::{
    brute_force_fixed_points, estimate_coefficient, picard_solve,
    project_contraction_check_analytic, project_contraction_check_tabulated, ContractionKind,
    ContractionReport, PairPlan, ProjectionCheck,
};
use softfix_core::metric::{repair_to_metric, AxiomReport, Coverage, SamplePlan, SoftMetric, ETA};
use softfix_core::soft_real::SoftReal;
use softfix_core::soft_set::SoftSet;
use softfix_core::topology::{
    is_open, region_membership, separate_closed_sets, MeasurableSet, Region,
};
use softfix_core::SoftError;

use crate::{args, load, Outcome, EXIT_HOLDS, EXIT_VIOLATED};

fn num(v: f64) -> String {
    format!("{v:.12}")
}

fn exit_if(holds: bool) -> i32 {
    if holds {
        EXIT_HOLDS
    } else {
        EXIT_VIOLATED
    }
}

fn label_names<S: SoftMetric>(space: &S) -> Vec<String> {
    space.params().label_names().to_vec()
}

fn coverage_line(coverage: &Coverage) -> String {
    match coverage {
        Coverage::Exhaustive { pairs, triples } => {
            format!("coverage: exhaustive, {pairs} pairs, {triples} triples")
        }
        Coverage::Sampled {
            pairs,
            triples,
            seed,
        } => format!("coverage: sampled, {pairs} pairs, {triples} triples, seed {seed}"),
    }
}

/// Human lines for an axiom report whose points are already described.
fn axiom_lines(report: &AxiomReport<String>, labels: &[String]) -> Vec<String> {
    let mut lines = vec![coverage_line(&report.coverage)];
    for v in &report.violations {
        let at = v
            .component
            .map(|k| format!(" at {}", labels.get(k).map_or("?", String::as_str)))
            .unwrap_or_default();
        let values: Vec<String> = v.values.iter().map(|&x| num(x)).collect();
        lines.push(format!(
            "{}: violated by {} tuple(s); first witness ({}){at}, values [{}]",
            v.axiom,
            v.count,
            v.witness.join(", "),
            values.join(", ")
        ));
    }
    lines.push(format!("verdict: {}", report.verdict()));
    lines
}

pub fn check(file: &Path, samples: usize, seed: u64) -> Result<Outcome, String> {
    let (_, model) = load(file)?;
    match model {
        Model::Tabulated { space, .. } => {
            let report = space.check_axioms(ETA);
            let report = report.map_points(|p| space.describe_point(p));
            let labels = label_names(&space);
            let mut lines = vec![format!(
                "backend: tabulated, {} elements, {} parameters",
                space.universe().len(),
                labels.len()
            )];
            lines.extend(axiom_lines(&report, &labels));
            let mut slices = Vec::new();
            for (k, label) in labels.iter().enumerate() {
                let slice = space
                    .project(k)
                    .map_err(|e| e.to_string())?
                    .check_axioms(ETA);
                lines.push(format!("slice {label}: {}", slice.verdict()));
                slices.push(json!({ "label": label, "verdict": slice.verdict(), "report": slice }));
            }
            let holds = report.holds();
            Ok(Outcome::new(
                exit_if(holds),
                lines,
                json!({ "backend": "tabulated", "axioms": report, "verdict": report.verdict(), "slices": slices }),
            ))
        }
        Model::Analytic { space, .. } => {
            let plan = SamplePlan::new(samples, seed);
            let report = space.check_axioms(&plan, ETA).map_points(|p| p.describe());
            let labels = label_names(&space);
            let mut lines = vec![format!(
                "backend: analytic, dimension {}, {} seed parameters",
                space.dim(),
                labels.len()
            )];
            lines.extend(axiom_lines(&report, &labels));
            let mut slices = Vec::new();
            for (label, &value) in labels.iter().zip(space.label_values()) {
                let slice = space.check_projection_axioms(value, &plan, ETA);
                lines.push(format!("slice {label}: {}", slice.verdict()));
                slices.push(json!({ "label": label, "verdict": slice.verdict() }));
            }
            Ok(Outcome::new(
                exit_if(report.holds()),
                lines,
                json!({
                    "backend": "analytic",
                    "samples": samples,
                    "seed": seed,
                    "axioms": report,
                    "verdict": report.verdict(),
                    "slices": slices,
                }),
            ))
        }
    }
}

pub fn repair(file: &Path, out: &Path) -> Result<Outcome, String> {
    let (descriptor, model) = load(file)?;
    let Model::Tabulated { space, mapping } = model else {
        return Err("repair needs a tabulated space".into());
    };
    let raw = descriptor.raw_table().map_err(|d| d.to_string())?;
    let repaired = repair_to_metric(space.params().clone(), space.universe().clone(), &raw)
        .map_err(|e| e.to_string())?;
    let n = repaired.n_points();
    let mut changed = 0;
    let mut max_change = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for (a, b) in raw.get(i, j).iter().zip(repaired.table().get(i, j)) {
                if a != b {
                    changed += 1;
                    max_change = max_change.max((a - b).abs());
                }
            }
        }
    }
    let written = SpaceDescriptor::from_tabulated(&repaired, mapping.as_ref());
    std::fs::write(out, written.to_json())
        .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    let report = repaired
        .check_axioms(ETA)
        .map_points(|p| repaired.describe_point(p));
    let mut lines = vec![
        format!("changed entries: {changed}"),
        format!("largest change: {}", num(max_change)),
        format!("written: {}", out.display()),
    ];
    lines.extend(axiom_lines(&report, &label_names(&repaired)));
    Ok(Outcome::new(
        exit_if(report.holds()),
        lines,
        json!({
            "changed_entries": changed,
            "largest_change": max_change,
            "written": out.display().to_string(),
            "axioms": report,
            "verdict": report.verdict(),
        }),
    ))
}

struct Estimate {
    lines: Vec<String>,
    json: Value,
    feasible: bool,
}

fn contraction_lines<P>(
    report: &ContractionReport<P>,
    describe: impl Fn(&P) -> String,
    sampling: Option<(usize, u64)>,
) -> (Vec<String>, Value) {
    let mut lines = vec![format!("kind: {}", report.kind.name())];
    lines.push(match sampling {
        None => format!("pairs: {} (exhaustive)", report.pairs_evaluated),
        Some((_, seed)) => format!("pairs: {} (sampled, seed {seed})", report.pairs_evaluated),
    });
    lines.push(format!("alpha_hat: {}", report.alpha_hat));
    let witness = report
        .witness
        .as_ref()
        .map(|(p, q)| [describe(p), describe(q)]);
    if let Some([p, q]) = &witness {
        let ratio = if report.unbounded {
            "unbounded".to_string()
        } else {
            num(report.witness_ratio)
        };
        lines.push(format!("witness: {p}, {q} with ratio {ratio}"));
    }
    let rate = if report.feasible {
        report.rate().ok()
    } else {
        None
    };
    if let Some(rate) = &rate {
        lines.push(format!("rate: {rate}"));
    }
    lines.push(format!("verdict: {}", report.verdict()));
    let json = json!({
        "kind": report.kind,
        "alpha_hat": report.alpha_hat,
        "feasible": report.feasible,
        "verdict": report.verdict(),
        "witness": witness,
        "witness_ratio": if report.unbounded { None } else { Some(report.witness_ratio) },
        "unbounded": report.unbounded,
        "pairs_evaluated": report.pairs_evaluated,
        "exhaustive": report.exhaustive,
        "rate": rate,
        "samples": sampling.map(|s| s.0),
        "seed": sampling.map(|s| s.1),
    });
    (lines, json)
}

fn projection_lines(check: &ProjectionCheck) -> Vec<String> {
    let mut lines: Vec<String> = check
        .factors
        .iter()
        .map(|f| {
            let factor = f.factor.map_or_else(|| "none".to_string(), num);
            format!("slice {} -> {}: factor {factor}", f.label, f.mapped_label)
        })
        .collect();
    if let Some(holds) = check.forward_holds {
        lines.push(format!("slice factors below 1: {holds}"));
    }
    lines
}

fn no_mapping() -> String {
    "the descriptor has no mapping".into()
}

fn estimate(
    model: &Model,
    kind: ContractionKind,
    samples: usize,
    seed: u64,
) -> Result<Estimate, String> {
    match model {
        Model::Tabulated { space, mapping } => {
            let m = mapping.as_ref().ok_or_else(no_mapping)?;
            let report = estimate_coefficient(space, m, kind, &PairPlan::Exhaustive)
                .map_err(|e| e.to_string())?;
            let projections = project_contraction_check_tabulated(space, m, &report)
                .map_err(|e| e.to_string())?;
            let (mut lines, json) = contraction_lines(&report, |p| space.describe_point(p), None);
            lines.extend(projection_lines(&projections));
            Ok(Estimate {
                lines,
                json: json!({ "contraction": json, "projections": projections }),
                feasible: report.feasible,
            })
        }
        Model::Analytic { space, mapping } => {
            let m = mapping.as_ref().ok_or_else(no_mapping)?;
            let plan = SamplePlan::new(samples, seed);
            let report = estimate_coefficient(space, m, kind, &PairPlan::Sampled(plan))
                .map_err(|e| e.to_string())?;
            let projections = project_contraction_check_analytic(space, m, &report, &plan)
                .map_err(|e| e.to_string())?;
            let (mut lines, json) =
                contraction_lines(&report, |p| p.describe(), Some((samples, seed)));
            lines.extend(projection_lines(&projections));
            Ok(Estimate {
                lines,
                json: json!({ "contraction": json, "projections": projections }),
                feasible: report.feasible,
            })
        }
    }
}

pub fn contract(
    file: &Path,
    kind: ContractionKind,
    samples: usize,
    seed: u64,
) -> Result<Outcome, String> {
    let (_, model) = load(file)?;
    let est = estimate(&model, kind, samples, seed)?;
    Ok(Outcome::new(exit_if(est.feasible), est.lines, est.json))
}

#[allow(clippy::too_many_arguments)]
pub fn solve(
    file: &Path,
    kind: ContractionKind,
    x0: &str,
    tol: f64,
    max_iter: usize,
    samples: usize,
    seed: u64,
) -> Result<Outcome, String> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(format!("--tol must be positive, got {tol}"));
    }
    let (_, model) = load(file)?;
    let est = estimate(&model, kind, samples, seed)?;
    let mut lines = est.lines;
    if !est.feasible {
        lines.push("solver not run: the report is infeasible".into());
        return Ok(Outcome::new(
            EXIT_VIOLATED,
            lines,
            json!({ "estimate": est.json, "trace": Value::Null }),
        ));
    }
    // Re-run the estimate to get the typed report for the solver.
    match &model {
        Model::Tabulated { space, mapping } => {
            let m = mapping.as_ref().ok_or_else(no_mapping)?;
            let x0 = args::finite_point(space, x0)?;
            let report = estimate_coefficient(space, m, kind, &PairPlan::Exhaustive)
                .map_err(|e| e.to_string())?;
            let oracle = brute_force_fixed_points(space, m).map_err(|e| e.to_string())?;
            let oracle: Vec<String> = oracle.iter().map(|p| space.describe_point(p)).collect();
            finish_solve(
                lines,
                est.json,
                picard_solve(space, m, &report, x0, tol, max_iter),
                |p| space.describe_point(p),
                Some(oracle),
            )
        }
        Model::Analytic { space, mapping } => {
            let m = mapping.as_ref().ok_or_else(no_mapping)?;
            let x0 = args::analytic_point(space, x0)?;
            let plan = SamplePlan::new(samples, seed);
            let report = estimate_coefficient(space, m, kind, &PairPlan::Sampled(plan))
                .map_err(|e| e.to_string())?;
            finish_solve(
                lines,
                est.json,
                picard_solve(space, m, &report, x0, tol, max_iter),
                |p| p.describe(),
                None,
            )
        }
    }
}

fn finish_solve<P>(
    mut lines: Vec<String>,
    estimate: Value,
    trace: softfix_core::Result<softfix_core::fixed_point::IterationTrace<P>>,
    describe: impl Fn(&P) -> String,
    oracle: Option<Vec<String>>,
) -> Result<Outcome, String> {
    let trace = match trace {
        Ok(t) => t,
        Err(
            e @ (SoftError::RateViolation { .. }
            | SoftError::Precondition(_)
            | SoftError::Infeasible(_)),
        ) => {
            lines.push(format!("solver aborted: {e}"));
            return Ok(Outcome::new(
                EXIT_VIOLATED,
                lines,
                json!({ "estimate": estimate, "trace": Value::Null, "aborted": e.to_string() }),
            ));
        }
        Err(e) => return Err(e.to_string()),
    };
    let last = trace.iterates.last().expect("at least the start point");
    let bound = trace.apriori_bounds.last().expect("one bound per iterate");
    lines.push(format!("iterations: {}", trace.iterations()));
    lines.push(format!("last iterate: {}", describe(last)));
    lines.push(format!("a priori bound: {bound}"));
    lines.push(format!("residual: {}", trace.residual));
    let fixed = trace.fixed_point.as_ref().map(&describe);
    match &fixed {
        Some(p) => lines.push(format!("fixed point: {p}")),
        None => lines.push("not converged within the iteration limit".into()),
    }
    let mut agrees = None;
    if let Some(oracle) = &oracle {
        lines.push(format!("exhaustive scan: [{}]", oracle.join(", ")));
        if let Some(p) = &fixed {
            let same = oracle.len() == 1 && oracle[0] == *p;
            lines.push(format!("scan agrees: {same}"));
            agrees = Some(same);
        }
    }
    let iterates: Vec<String> = trace.iterates.iter().map(&describe).collect();
    let report = json!({
        "estimate": estimate,
        "trace": {
            "kind": trace.kind,
            "rate": trace.rate,
            "iterates": iterates,
            "step_dists": trace.step_dists,
            "apriori_bounds": trace.apriori_bounds,
            "converged": trace.converged,
            "iterations": trace.iterations(),
            "fixed_point": fixed,
            "residual": trace.residual,
        },
        "exhaustive_scan": oracle,
        "scan_agrees": agrees,
    });
    Ok(Outcome::new(exit_if(trace.converged), lines, report))
}

fn region_name(region: Region) -> &'static str {
    match region {
        Region::Closure => "closure",
        Region::Interior => "interior",
        Region::Boundary => "boundary",
    }
}

fn optional(d: &Option<SoftReal>) -> String {
    d.as_ref()
        .map_or_else(|| "none (null set)".to_string(), |d| d.to_string())
}

pub fn topology(file: &Path, set: &str, region: Region, point: &str) -> Result<Outcome, String> {
    let (_, model) = load(file)?;
    let (set_text, point_text, to_set, to_complement, open, member) = match &model {
        Model::Tabulated { space, .. } => {
            let s = args::finite_set(space, set)?;
            let p = args::finite_point(space, point)?;
            let member =
                region_membership(space, &s, &p, region, 0.0).map_err(|e| e.to_string())?;
            let to_set = s.dist_from(space, &p).map_err(|e| e.to_string())?;
            let to_complement = s
                .complement_dist_from(space, &p)
                .map_err(|e| e.to_string())?;
            let open = is_open(space, &s).map_err(|e| e.to_string())?.open;
            (
                s.describe(space.universe(), space.params()),
                space.describe_point(&p),
                to_set,
                to_complement,
                Some(open),
                member,
            )
        }
        Model::Analytic { space, .. } => {
            let ball = args::analytic_ball(space, set)?;
            let p = args::analytic_point(space, point)?;
            let member =
                region_membership(space, &ball, &p, region, ETA).map_err(|e| e.to_string())?;
            let to_set = ball.dist_from(space, &p).map_err(|e| e.to_string())?;
            let to_complement = ball
                .complement_dist_from(space, &p)
                .map_err(|e| e.to_string())?;
            (
                format!("ball({}; {})", ball.center.describe(), ball.radius),
                p.describe(),
                to_set,
                to_complement,
                None,
                member,
            )
        }
    };
    let mut lines = vec![
        format!("set: {set_text}"),
        format!("point: {point_text}"),
        format!("distance to set: {}", optional(&to_set)),
        format!("distance to complement: {}", optional(&to_complement)),
    ];
    if let Some(open) = open {
        lines.push(format!("set is open: {open}"));
    }
    lines.push(format!("{}: {member}", region_name(region)));
    Ok(Outcome::new(
        exit_if(member),
        lines,
        json!({
            "set": set_text,
            "point": point_text,
            "query": region,
            "distance_to_set": to_set,
            "distance_to_complement": to_complement,
            "set_is_open": open,
            "member": member,
        }),
    ))
}

pub fn separate(file: &Path, f1: &str, f2: &str) -> Result<Outcome, String> {
    let (_, model) = load(file)?;
    let Model::Tabulated { space, .. } = model else {
        return Err("separate needs a tabulated space".into());
    };
    let f1 = args::finite_set(&space, f1)?;
    let f2 = args::finite_set(&space, f2)?;
    let sep = match separate_closed_sets(&space, &f1, &f2) {
        Ok(sep) => sep,
        Err(SoftError::Precondition(m)) => return Err(m),
        Err(e @ SoftError::Degenerate(_)) => {
            let message = e.to_string();
            return Ok(Outcome::new(
                EXIT_VIOLATED,
                vec![format!("separation failed: {message}")],
                json!({ "error": message }),
            ));
        }
        Err(e) => return Err(e.to_string()),
    };
    let describe = |s: &SoftSet| s.describe(space.universe(), space.params());
    let subset = |a: &SoftSet, b: &SoftSet| a.is_subset(b).map_err(|e| e.to_string());
    let checks = [
        ("first set inside U", subset(&f1, &sep.u)?),
        ("second set inside V", subset(&f2, &sep.v)?),
        (
            "U and V disjoint",
            sep.u
                .intersect(&sep.v)
                .map_err(|e| e.to_string())?
                .is_null(),
        ),
        (
            "U open",
            is_open(&space, &sep.u).map_err(|e| e.to_string())?.open,
        ),
        (
            "V open",
            is_open(&space, &sep.v).map_err(|e| e.to_string())?.open,
        ),
    ];
    let mut lines = vec![
        format!("U: {}", describe(&sep.u)),
        format!("V: {}", describe(&sep.v)),
    ];
    let radii =
        |list: &[(softfix_core::soft_set::FinitePoint, SoftReal)]| -> Vec<(String, SoftReal)> {
            list.iter()
                .map(|(p, eps)| (space.describe_point(p), eps.clone()))
                .collect()
        };
    let first = radii(&sep.radii_first);
    let second = radii(&sep.radii_second);
    for (p, eps) in first.iter().chain(&second) {
        lines.push(format!("distance from {p} to the other set: {eps}"));
    }
    for (name, ok) in &checks {
        lines.push(format!("{name}: {ok}"));
    }
    let all = checks.iter().all(|(_, ok)| *ok);
    let to_json = |list: &[(String, SoftReal)]| -> Vec<Value> {
        list.iter()
            .map(|(p, eps)| json!({ "point": p, "distance": eps }))
            .collect()
    };
    Ok(Outcome::new(
        exit_if(all),
        lines,
        json!({
            "u": describe(&sep.u),
            "v": describe(&sep.v),
            "radii_first": to_json(&first),
            "radii_second": to_json(&second),
            "checks": checks.iter().map(|(n, ok)| json!({ "check": n, "holds": ok })).collect::<Vec<_>>(),
        }),
    ))
}

fn chain_lines(prefix: &str, l: &ChainLines) -> Vec<String> {
    [
        ("image distance", l.l0),
        ("line 1", l.l1),
        ("line 2 as printed", l.l2_verbatim),
        ("line 3", l.l3),
        ("line 4", l.l4),
        ("line 5", l.l5),
        ("line 6", l.l6),
    ]
    .iter()
    .map(|(name, v)| format!("{prefix}{name}: {}", num(*v)))
    .collect()
}

pub fn example(id: &str) -> Result<Outcome, String> {
    let replay = match replay_example(id) {
        Ok(r) => r,
        Err(SoftError::Domain(m)) => return Err(m),
        Err(e) => return Err(e.to_string()),
    };
    let mut lines = vec![format!("example {id}")];
    match &replay {
        Replay::PowerDistance(r) => {
            let seeds: Vec<String> = ["0", "0.5", "1", "2"].map(String::from).to_vec();
            lines.push("discrete point metric:".into());
            let discrete = r.discrete.clone().map_points(|p| p.describe());
            lines.extend(
                axiom_lines(&discrete, &seeds)
                    .into_iter()
                    .map(|l| format!("  {l}")),
            );
            lines.push("euclidean point metric:".into());
            let euclidean = r.euclidean.clone().map_points(|p| p.describe());
            lines.extend(
                axiom_lines(&euclidean, &seeds)
                    .into_iter()
                    .map(|l| format!("  {l}")),
            );
            lines.push(format!(
                "every fixed-label slice is a metric: {}",
                r.slices_are_metrics
            ));
            lines.push(format!(
                "verdict: not a soft metric; only M2 fails, on one element under two labels: {}",
                r.confirmed
            ));
        }
        Replay::SliceContraction(r) => {
            lines.push(format!("p = {}, q = {}", r.p.describe(), r.q.describe()));
            lines.push(format!(
                "images: {}, {}",
                r.image_p.describe(),
                r.image_q.describe()
            ));
            lines.push(format!("d(image p, image q) = {}", num(r.mapped_distance)));
            lines.push(format!("d(p, q) = {}", num(r.original_distance)));
            lines.push(format!("ratio = {}", num(r.ratio)));
            let (banach, _) = contraction_lines(
                &r.banach,
                |p| p.describe(),
                Some((r.banach.pairs_evaluated, 42)),
            );
            lines.extend(banach.into_iter().map(|l| format!("  {l}")));
            lines.extend(projection_lines(&r.projections));
            lines.push(format!(
                "verdict: not a soft contraction, although every slice map contracts: {}",
                r.confirmed
            ));
        }
        Replay::ReciprocalChain(r) => {
            lines.push(format!("samples: {}, seed {}", r.samples, r.seed));
            lines.push("worked tuple (l, m, x, y) = (1, 2, 5, 0):".into());
            lines.extend(chain_lines("  ", &r.worked));
            lines.push(format!("largest chain violation: {}", num(r.worst_gap)));
            lines.push(format!("chain holds within 1e-12: {}", r.chain_holds));
            lines.push(format!(
                "printed line 2 differs from line 1 on {} samples, by up to {}",
                r.verbatim_mismatches,
                num(r.verbatim_max_deviation)
            ));
            lines.push(format!(
                "empirical banach coefficient: {}",
                r.banach.alpha_hat
            ));
            lines.push(format!(
                "label-part ratio supremum: {}",
                num(r.label_ratio_sup)
            ));
            lines.push(format!("note: {}", r.note));
        }
    }
    let code = exit_if(replay.property_holds());
    let report = serde_json::to_value(&replay).map_err(|e| e.to_string())?;
    let report = json!({ "replay": report, "confirmed": replay.confirmed() });
    Ok(Outcome::new(code, lines, report))
}
