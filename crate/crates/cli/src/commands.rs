use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use rcbbo_core::bbo::{self, BboParams, Habitat, Objective, RunResult};
use rcbbo_core::cost::CostBreakdown;
use rcbbo_core::evaluate::{ElementCheck, Evaluation, Evaluator};
use rcbbo_core::model::{DesignCandidate, DesignVariableSpec, SoilProfile};
use rcbbo_core::objective::{DiscreteObjective, SpaceObjective};
use rcbbo_core::project::{read_json, Project};
use rcbbo_core::solver::InternalForces;
use rcbbo_core::sssi::FoundationState;
use rcbbo_core::tuning::benchmark::DiscreteAckley;
use rcbbo_core::tuning::cache::{CachedObjective, EvalCache};
use rcbbo_core::tuning::landscape::{self, Landscape, LandscapeAxis, LandscapeConfig, Param};
use rcbbo_core::cost::UnitCosts;

use crate::output::{num, write_csv, write_json, Manifest};
use crate::{AnalyzeArgs, BboArgs, CliError, EnumerateArgs, Inputs, ObjectiveKind, OptimizeArgs, SssiMode, TuneArgs};

type CliResult<T = ()> = Result<T, CliError>;

fn load_project(model: &Path, soil: Option<&Path>, spec: Option<&Path>, costs: Option<&Path>) -> CliResult<Project> {
    let mut project = Project::load(model)?;
    if let Some(p) = soil {
        project.soil = Some(read_json::<SoilProfile>(p)?);
    }
    if let Some(p) = spec {
        project.spec = read_json::<DesignVariableSpec>(p)?;
    }
    if let Some(p) = costs {
        project.costs = Some(read_json::<UnitCosts>(p)?);
    }
    Ok(project)
}

fn project_from(inputs: &Inputs) -> CliResult<Project> {
    load_project(
        &inputs.model,
        inputs.soil.as_deref(),
        inputs.spec.as_deref(),
        inputs.costs.as_deref(),
    )
}

fn record_inputs(m: &mut Manifest, inputs: &Inputs) {
    m.input("model", inputs.model.display());
    for (k, p) in [("soil", &inputs.soil), ("spec", &inputs.spec), ("costs", &inputs.costs)] {
        if let Some(p) = p {
            m.input(k, p.display());
        }
    }
}

fn prepare_out(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))
}

fn bbo_params(args: &BboArgs, seed: u64) -> BboParams {
    let mut p = BboParams { seed, ..BboParams::default() };
    if let Some(v) = args.popsize {
        p.pop_size = v;
    }
    if let Some(v) = args.alpha {
        p.alpha = v;
    }
    if let Some(v) = args.mutprob {
        p.mut_prob = v;
    }
    if let Some(v) = args.keeprate {
        p.keep_rate = v;
    }
    if let Some(v) = args.sigma {
        p.sigma = v;
    }
    if let Some(v) = args.iterations {
        p.max_iterations = v;
    }
    if args.stall.is_some() {
        p.stall_iterations = args.stall;
    }
    p
}

fn record_params(m: &mut Manifest, p: &BboParams) {
    m.param("popsize", p.pop_size);
    m.param("keeprate", num(p.keep_rate));
    m.param("alpha", num(p.alpha));
    m.param("mutprob", num(p.mut_prob));
    m.param("sigma", num(p.sigma));
    m.param("sigma_damping", num(p.sigma_damping));
    m.param("iterations", p.max_iterations);
    if let Some(s) = p.stall_iterations {
        m.param("stall", s);
    }
}

fn open_cache(path: Option<&Path>, spec: &DesignVariableSpec) -> CliResult<EvalCache> {
    match path {
        None => Ok(EvalCache::in_memory()),
        Some(p) => {
            let (cache, warning) = EvalCache::open(p, spec)?;
            if let Some(w) = warning {
                log::warn!("{w}");
            }
            log::info!("cache {} holds {} records", p.display(), cache.len());
            Ok(cache)
        }
    }
}

fn check_rows(checks: &[ElementCheck]) -> Vec<Vec<String>> {
    checks
        .iter()
        .map(|c| {
            vec![
                c.element.clone(),
                c.check.name.clone(),
                num(c.check.demand),
                num(c.check.capacity),
                num(c.check.ratio),
                c.check.pass.to_string(),
                c.check.note.clone().unwrap_or_default(),
            ]
        })
        .collect()
}

const CHECK_HEADER: [&str; 7] = ["element", "check", "demand", "capacity", "ratio", "pass", "note"];
const COST_HEADER: [&str; 6] = ["family", "term", "category", "quantity", "unit_cost", "amount"];

fn cost_rows(cost: Option<&CostBreakdown>) -> Vec<Vec<String>> {
    let Some(cost) = cost else {
        return Vec::new();
    };
    let mut rows: Vec<Vec<String>> = cost
        .terms
        .iter()
        .map(|t| {
            vec![
                t.family.clone(),
                t.term.clone(),
                t.category.as_str().to_string(),
                num(t.quantity),
                num(t.unit_cost),
                num(t.amount),
            ]
        })
        .collect();
    rows.push(vec!["total".into(), String::new(), String::new(), String::new(), String::new(), num(cost.total)]);
    rows
}

fn design_summary(e: &Evaluation) -> String {
    let state = if e.feasible { "feasible" } else { "infeasible" };
    format!(
        "{} cost {:.2} penalized {:.2} ({state})",
        e.candidate.csv_row(),
        e.direct_cost,
        e.penalized_cost
    )
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    hsi: f64,
    genome: &'a [f64],
    iterations: usize,
    evaluation: &'a Evaluation,
}

pub fn optimize(args: &OptimizeArgs) -> CliResult {
    let project = project_from(&args.inputs)?;
    let evaluator = Evaluator::new(&project, args.sssi.on())?;
    let params = bbo_params(&args.bbo, args.seed);
    params.validate()?;
    prepare_out(&args.out)?;

    let result: RunResult = if args.no_cache {
        let objective = SpaceObjective::new(&evaluator);
        let r = bbo::run(&objective, params)?;
        log::info!("{} objective evaluations", objective.calls());
        r
    } else {
        let cache = open_cache(args.cache.as_deref(), &project.spec)?;
        let objective = CachedObjective::new(&evaluator, &cache);
        let r = bbo::run(&objective, params)?;
        log::info!("{} objective evaluations, {} cache hits", objective.calls(), objective.hits());
        r
    };

    let best: &Habitat = &result.best;
    let candidate = project.spec.decode(&best.species)?;
    let evaluation = evaluator.evaluate(&candidate);

    let mut m = Manifest::new("optimize");
    m.seed = Some(args.seed);
    m.sssi = Some(args.sssi.on());
    record_params(&mut m, &params);
    record_inputs(&mut m, &args.inputs);

    let history: Vec<Vec<String>> = result
        .history
        .iter()
        .map(|h| vec![h.iteration.to_string(), num(h.best), num(h.mean)])
        .collect();
    write_csv(&args.out.join("history.csv"), &m, &["iteration", "best", "mean"], &history)?;
    write_csv(&args.out.join("cost.csv"), &m, &COST_HEADER, &cost_rows(evaluation.cost.as_ref()))?;
    write_csv(&args.out.join("checks.csv"), &m, &CHECK_HEADER, &check_rows(&evaluation.checks))?;
    write_json(
        &args.out.join("best.json"),
        &m,
        &OptimizeReport {
            hsi: best.hsi,
            genome: &best.species,
            iterations: result.history.len().saturating_sub(1),
            evaluation: &evaluation,
        },
    )?;

    println!("best: {}", design_summary(&evaluation));
    if let Some(f) = &evaluation.failure {
        return Err(CliError::numerical(format!("best design could not be evaluated: {f}")));
    }
    if !evaluation.feasible {
        return Err(CliError::infeasible("no feasible design found"));
    }
    Ok(())
}

struct Ranked {
    candidate: DesignCandidate,
    penalized: f64,
    direct: f64,
    feasible: bool,
    violation: f64,
}

#[derive(Serialize)]
struct OptimumReport<'a> {
    candidates: u64,
    feasible: usize,
    evaluation: &'a Evaluation,
}

pub fn enumerate(args: &EnumerateArgs) -> CliResult {
    let project = project_from(&args.inputs)?;
    let evaluator = Evaluator::new(&project, args.sssi.on())?;
    let count = project.spec.candidate_count();
    if count > args.cap as u128 {
        return Err(CliError::config(format!(
            "the space has {count} candidates, more than the cap of {}",
            args.cap
        )));
    }
    prepare_out(&args.out)?;

    let candidates: Vec<DesignCandidate> = project.spec.enumerate().collect();
    let mut ranked: Vec<Ranked> = candidates
        .into_par_iter()
        .map(|c| {
            let e = evaluator.evaluate(&c);
            Ranked {
                candidate: c,
                penalized: e.penalized_cost,
                direct: e.direct_cost,
                feasible: e.feasible,
                violation: e.violation,
            }
        })
        .collect();
    let total = ranked.len();
    let feasible = ranked.iter().filter(|r| r.feasible).count();
    ranked.sort_by(|a, b| {
        a.penalized
            .total_cmp(&b.penalized)
            .then_with(|| a.candidate.indices.cmp(&b.candidate.indices))
    });
    if args.feasible_only {
        ranked.retain(|r| r.feasible);
    }

    let mut m = Manifest::new("enumerate");
    m.sssi = Some(args.sssi.on());
    m.param("cap", args.cap);
    m.param("feasible_only", args.feasible_only);
    record_inputs(&mut m, &args.inputs);

    let mut header = vec!["rank"];
    header.extend(project.spec.variables.iter().map(|v| v.name.as_str()));
    header.extend(["penalized", "direct", "feasible", "violation"]);
    let rows: Vec<Vec<String>> = ranked
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![(i + 1).to_string()];
            row.extend(r.candidate.values.iter().map(|v| num(*v)));
            row.extend([num(r.penalized), num(r.direct), r.feasible.to_string(), num(r.violation)]);
            row
        })
        .collect();
    write_csv(&args.out.join("ranking.csv"), &m, &header, &rows)?;

    println!("{total} candidates, {feasible} feasible");
    let Some(first) = ranked.first() else {
        return Err(CliError::infeasible("no feasible candidate"));
    };
    let evaluation = evaluator.evaluate(&first.candidate);
    write_json(
        &args.out.join("optimum.json"),
        &m,
        &OptimumReport {
            candidates: total as u64,
            feasible,
            evaluation: &evaluation,
        },
    )?;
    println!("optimum: {}", design_summary(&evaluation));
    if !evaluation.feasible {
        return Err(CliError::infeasible("no feasible candidate"));
    }
    Ok(())
}

fn parse_pair(text: &str, what: &str) -> CliResult<(Param, String)> {
    let (name, rest) = text
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("{what} `{text}` must look like name=value")))?;
    let param = Param::from_str(name.trim())?;
    Ok((param, rest.to_string()))
}

fn parse_number(text: &str, what: &str) -> CliResult<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| CliError::config(format!("{what}: `{text}` is not a number")))
}

fn landscape_config(args: &TuneArgs) -> CliResult<LandscapeConfig> {
    let mut axes = Vec::new();
    for a in &args.axes {
        let (param, rest) = parse_pair(a, "axis")?;
        let values = rest
            .split(',')
            .map(|v| parse_number(v, &format!("axis {param}")))
            .collect::<CliResult<Vec<f64>>>()?;
        axes.push(LandscapeAxis { param, values });
    }
    let mut cfg = LandscapeConfig::new(axes, args.seed);
    for f in &args.fixed {
        let (param, rest) = parse_pair(f, "fixed")?;
        cfg.fixed.insert(param, parse_number(&rest, &format!("fixed {param}"))?);
    }
    for (param, v) in [
        (Param::PopSize, args.bbo.popsize.map(|v| v as f64)),
        (Param::Alpha, args.bbo.alpha),
        (Param::MutProb, args.bbo.mutprob),
        (Param::KeepRate, args.bbo.keeprate),
    ] {
        if let Some(v) = v {
            cfg.fixed.insert(param, v);
        }
    }
    cfg.base = bbo_params(&args.bbo, args.seed);
    if args.bbo.iterations.is_none() {
        cfg.base.max_iterations = 200;
    }
    cfg.runs_per_cell = args.runs;
    cfg.intervals = args.intervals;
    cfg.z = args.z;
    cfg.success_threshold = args.threshold;
    cfg.validate()?;
    Ok(cfg)
}

fn run_landscape<D: DiscreteObjective>(inner: D, args: &TuneArgs, cfg: &LandscapeConfig, cache_default: bool) -> CliResult<Landscape> {
    if args.cache.is_some() || cache_default {
        let cache = open_cache(args.cache.as_deref(), inner.spec())?;
        let objective = CachedObjective::new(inner, &cache);
        let l = landscape::landscape(&objective, cfg)?;
        log::info!("{} objective evaluations, {} cache hits", objective.calls(), objective.hits());
        Ok(l)
    } else {
        let objective = SpaceObjective::new(inner);
        let l = landscape::landscape(&objective as &dyn Objective, cfg)?;
        log::info!("{} objective evaluations", objective.calls());
        Ok(l)
    }
}

#[derive(Serialize)]
struct UtilitiesReport<'a> {
    objective: &'a str,
    best_ut: f64,
    best_cell: usize,
    best_coords: &'a [f64],
    config: &'a LandscapeConfig,
    cells: Vec<CellSummary<'a>>,
}

#[derive(Serialize)]
struct CellSummary<'a> {
    index: usize,
    coords: &'a [f64],
    f_a: f64,
    f_b: f64,
    f_c: f64,
    sc_ut: Option<f64>,
    success_rate: f64,
    aes: Option<f64>,
}

pub fn tune(args: &TuneArgs) -> CliResult {
    let cfg = landscape_config(args)?;
    prepare_out(&args.out)?;
    let mut m = Manifest::new("tune");
    m.seed = Some(args.seed);
    m.param("runs", args.runs);
    m.param("intervals", args.intervals);
    m.param("z", num(args.z));
    m.param("threshold", num(args.threshold));
    m.param("iterations", cfg.base.max_iterations);
    m.param("sigma", num(cfg.base.sigma));
    for a in &cfg.axes {
        let vals: Vec<String> = a.values.iter().map(|v| num(*v)).collect();
        m.param(&format!("axis.{}", a.param), vals.join(" "));
    }
    for (p, v) in &cfg.fixed {
        m.param(&format!("fixed.{p}"), num(*v));
    }

    let (name, result) = match args.objective {
        ObjectiveKind::Ackley => {
            m.param("objective", "ackley");
            m.param("dims", args.dims);
            m.param("bins", args.bins);
            if args.dims < 1 || args.bins < 1 {
                return Err(CliError::config("dims and bins must be at least 1"));
            }
            ("ackley", run_landscape(DiscreteAckley::new(args.dims, args.bins), args, &cfg, false)?)
        }
        ObjectiveKind::Structural => {
            let model = args
                .model
                .as_deref()
                .ok_or_else(|| CliError::config("the structural objective needs --model"))?;
            let project = load_project(model, args.soil.as_deref(), args.spec.as_deref(), args.costs.as_deref())?;
            let evaluator = Evaluator::new(&project, args.sssi.on())?;
            m.param("objective", "structural");
            m.sssi = Some(args.sssi.on());
            m.input("model", model.display());
            for (k, p) in [("soil", &args.soil), ("spec", &args.spec), ("costs", &args.costs)] {
                if let Some(p) = p {
                    m.input(k, p.display());
                }
            }
            ("structural", run_landscape(&evaluator, args, &cfg, true)?)
        }
    };

    let mut header: Vec<String> = vec!["cell".into()];
    header.extend(cfg.axes.iter().map(|a| a.param.to_string()));
    header.extend(["f_a", "f_b", "f_c", "sc_ut", "success_rate", "aes"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = result
        .cells
        .iter()
        .map(|c| {
            let mut row = vec![c.index.to_string()];
            row.extend(c.coords.iter().map(|v| num(*v)));
            row.extend([
                num(c.utility.f_a),
                num(c.utility.f_b),
                num(c.utility.f_c),
                c.utility.sc_ut.map(num).unwrap_or_default(),
                num(c.success_rate),
                c.aes.map(num).unwrap_or_default(),
            ]);
            row
        })
        .collect();
    write_csv(&args.out.join("landscape.csv"), &m, &header_refs, &rows)?;

    let interval = cfg.base.max_iterations as f64 / cfg.intervals as f64;
    let curves: Vec<Vec<String>> = result
        .cells
        .iter()
        .flat_map(|c| {
            c.curve.iter().enumerate().map(move |(k, v)| {
                vec![
                    c.index.to_string(),
                    k.to_string(),
                    num((k as f64 * interval).round()),
                    num(*v),
                ]
            })
        })
        .collect();
    write_csv(&args.out.join("curves.csv"), &m, &["cell", "checkpoint", "iteration", "value"], &curves)?;

    let best = &result.cells[result.best_cell];
    let report = UtilitiesReport {
        objective: name,
        best_ut: result.best_ut,
        best_cell: result.best_cell,
        best_coords: &best.coords,
        config: &result.config,
        cells: result
            .cells
            .iter()
            .map(|c| CellSummary {
                index: c.index,
                coords: &c.coords,
                f_a: c.utility.f_a,
                f_b: c.utility.f_b,
                f_c: c.utility.f_c,
                sc_ut: c.utility.sc_ut,
                success_rate: c.success_rate,
                aes: c.aes,
            })
            .collect(),
    };
    write_json(&args.out.join("utilities.json"), &m, &report)?;

    let coords: Vec<String> = cfg
        .axes
        .iter()
        .zip(&best.coords)
        .map(|(a, v)| format!("{}={}", a.param, num(*v)))
        .collect();
    println!("best cell {} ({}) utility {}", result.best_cell, coords.join(", "), num(result.best_ut));
    Ok(())
}

/// Parses `name=value,...` into a candidate of `spec`.
pub fn parse_design(spec: &DesignVariableSpec, text: &str) -> CliResult<DesignCandidate> {
    let mut indices: Vec<Option<usize>> = vec![None; spec.len()];
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("design entry `{item}` must look like name=value")))?;
        let name = name.trim();
        let k = spec
            .index_of(name)
            .ok_or_else(|| CliError::config(format!("design: unknown variable `{name}`")))?;
        let v = parse_number(value, &format!("design {name}"))?;
        let var = &spec.variables[k];
        let i = var
            .values
            .iter()
            .position(|x| (x - v).abs() < 1e-9)
            .ok_or_else(|| CliError::config(format!("design: {v} is not a candidate value of `{name}`")))?;
        indices[k] = Some(i);
    }
    let indices = indices
        .into_iter()
        .zip(&spec.variables)
        .map(|(i, v)| i.ok_or_else(|| CliError::config(format!("design: missing variable `{}`", v.name))))
        .collect::<CliResult<Vec<usize>>>()?;
    Ok(spec.candidate_from_indices(indices, Vec::new()))
}

#[derive(Serialize)]
struct ForcesDump<'a> {
    combinations: Vec<String>,
    results: &'a [InternalForces],
}

fn mode_name(sssi: bool) -> &'static str {
    if sssi {
        "on"
    } else {
        "off"
    }
}

fn trace_rows(trace: &[FoundationState]) -> Vec<Vec<String>> {
    trace
        .iter()
        .map(|s| {
            vec![
                s.iteration.to_string(),
                s.node.clone(),
                num(s.k),
                num(s.spring),
                num(s.pressure),
                num(s.settlement),
                num(s.k_next),
            ]
        })
        .collect()
}

fn compare_rows(off: &Evaluation, on: &Evaluation) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let mut push = |metric: String, a: f64, b: f64| {
        rows.push(vec![metric, num(a), num(b), num(b - a)]);
    };
    push("direct_cost".into(), off.direct_cost, on.direct_cost);
    push("penalized_cost".into(), off.penalized_cost, on.penalized_cost);
    push("violation".into(), off.violation, on.violation);
    for family in ["beams", "columns", "foundations"] {
        let a = off.cost.as_ref().map_or(0.0, |c| c.family_total(family));
        let b = on.cost.as_ref().map_or(0.0, |c| c.family_total(family));
        push(format!("cost.{family}"), a, b);
    }
    for (a, b) in off.footings.iter().zip(&on.footings) {
        let (fa, fb) = (&a.design.footing, &b.design.footing);
        push(format!("footing.{}.l", a.node), fa.l, fb.l);
        push(format!("footing.{}.b", a.node), fa.b, fb.b);
        push(format!("footing.{}.thickness", a.node), fa.thickness, fb.thickness);
    }
    for (a, b) in off.beams.iter().zip(&on.beams) {
        push(format!("beam.{}.m_pos", a.id), a.demand.m_pos, b.demand.m_pos);
        push(format!("beam.{}.m_neg", a.id), a.demand.m_neg, b.demand.m_neg);
    }
    rows
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult {
    let project = project_from(&args.inputs)?;
    project.validate(true)?;
    let candidate = parse_design(&project.spec, &args.design)?;
    let modes: Vec<bool> = match args.sssi {
        SssiMode::Off => vec![false],
        SssiMode::On => vec![true],
        SssiMode::Both => vec![false, true],
    };
    if modes.contains(&true) && !project.has_footings() {
        return Err(CliError::config("SSSI needs spring supports with footings"));
    }
    prepare_out(&args.out)?;
    let combos: Vec<String> = project
        .model
        .effective_combinations()
        .iter()
        .map(|c| c.name.clone())
        .collect();

    let mut evaluations = Vec::new();
    for sssi in modes {
        let evaluator = Evaluator::new(&project, sssi)?;
        let e = evaluator.evaluate(&candidate);
        let mode = mode_name(sssi);
        let mut m = Manifest::new("analyze");
        m.sssi = Some(sssi);
        m.param("design", candidate_label(&project.spec, &candidate));
        record_inputs(&mut m, &args.inputs);

        write_json(&args.out.join(format!("analysis_{mode}.json")), &m, &e)?;
        write_csv(&args.out.join(format!("checks_{mode}.csv")), &m, &CHECK_HEADER, &check_rows(&e.checks))?;
        write_csv(&args.out.join(format!("cost_{mode}.csv")), &m, &COST_HEADER, &cost_rows(e.cost.as_ref()))?;
        if let Some(o) = &e.sssi {
            write_csv(
                &args.out.join("sssi_trace.csv"),
                &m,
                &["step", "node", "k", "spring", "pressure", "settlement", "k_next"],
                &trace_rows(&o.trace),
            )?;
            println!(
                "sssi: {} after {} steps (change {:.3e})",
                if o.converged { "converged" } else { "not converged" },
                o.iterations,
                o.change
            );
        }
        if args.dump_forces {
            write_json(
                &args.out.join(format!("forces_{mode}.json")),
                &m,
                &ForcesDump {
                    combinations: combos.clone(),
                    results: &e.forces,
                },
            )?;
        }
        println!("sssi {mode}: {}", design_summary(&e));
        evaluations.push((m, e));
    }

    if let [(m, off), (_, on)] = evaluations.as_slice() {
        let mut m = m.clone();
        m.sssi = None;
        write_csv(
            &args.out.join("compare.csv"),
            &m,
            &["metric", "sssi_off", "sssi_on", "delta"],
            &compare_rows(off, on),
        )?;
    }
    for (_, e) in &evaluations {
        if let Some(f) = &e.failure {
            return Err(CliError::numerical(format!("analysis failed: {f}")));
        }
    }
    Ok(())
}

fn candidate_label(spec: &DesignVariableSpec, c: &DesignCandidate) -> String {
    spec.variables
        .iter()
        .zip(&c.values)
        .map(|(v, x)| format!("{}={}", v.name, num(*x)))
        .collect::<Vec<_>>()
        .join(" ")
}
