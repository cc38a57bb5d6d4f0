use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::{info, warn};
use serde_json::{json, Map, Value};

use pqgraph::constants::ConstantInputs;
use pqgraph::io::{read_instance, InstanceFile};
use pqgraph::solver::{default_init, random_positive, verify_solution_with, VerifiedCheck, VerifyOptions};
use pqgraph::spaces::{lp_norm, sobolev_norm};
use pqgraph::sweep::{all_stalled, sweep, SolveSummary, SweepGrid, SweepRow};
use pqgraph::{
    analyze_fiber, lambda_star, minimize_global_negative, minimize_on_branch, nehari_classify, validate_graph, Branch,
    ConstantsReport, Exec, Exponents, FiberMap, GraphFunction, ProblemInstance, SolveReport, SolverOptions,
};

use crate::output::{emit, format_float, to_canonical};
use crate::{Command, Common, FiberArgs, Format, SweepArgs, VerifyArgs};

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_STALL: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Domain validation failures map to 1; I/O, parse and usage errors to 3.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<pqgraph::Error>() {
            return match e {
                pqgraph::Error::Parse { .. } | pqgraph::Error::Io(_) | pqgraph::Error::InvalidOptions(_) => EXIT_USAGE,
                _ => EXIT_VALIDATION,
            };
        }
    }
    EXIT_USAGE
}

pub fn run(command: &Command) -> Result<u8> {
    match command {
        Command::Validate(c) => validate(c),
        Command::Constants(c) => constants_cmd(c),
        Command::Fiber(a) => fiber(a),
        Command::SolvePlus(c) => solve_branch(c, Branch::Plus),
        Command::SolveMinus(c) => solve_branch(c, Branch::Minus),
        Command::SolveNegative(c) => solve_negative(c),
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep_cmd(a),
    }
}

fn require_json(c: &Common) -> Result<()> {
    if c.format.unwrap_or(Format::Json) != Format::Json {
        return Err(usage("this command only writes JSON"));
    }
    Ok(())
}

fn exec_for(c: &Common) -> Result<Exec> {
    match c.jobs {
        Some(0) => Err(usage("--jobs must be at least 1")),
        Some(1) => Ok(Exec::Sequential),
        Some(n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring worker threads")?;
            #[cfg(not(feature = "parallel"))]
            warn!("built without the parallel feature; --jobs {n} runs sequentially");
            Ok(Exec::Parallel)
        }
        None => Ok(Exec::Parallel),
    }
}

fn load(c: &Common) -> Result<InstanceFile> {
    let file = read_instance(&c.instance).with_context(|| format!("reading {}", c.instance.display()))?;
    info!(
        "loaded {} vertices from {}",
        file.graph.vertex_count(),
        c.instance.display()
    );
    Ok(file)
}

fn exponents(c: &Common, file: &InstanceFile) -> Result<Exponents> {
    let base = file.exponents;
    let pick = |flag: Option<f64>, from_file: Option<f64>, name: &str| {
        flag.or(from_file).ok_or_else(|| {
            usage(format!(
                "exponent {name} missing: pass --{name} or add an `exponents` line"
            ))
        })
    };
    let e = Exponents::new(
        pick(c.p, base.map(|e| e.p), "p")?,
        pick(c.q, base.map(|e| e.q), "q")?,
        pick(c.gamma, base.map(|e| e.gamma), "gamma")?,
        pick(c.alpha, base.map(|e| e.alpha), "alpha")?,
    )?;
    Ok(e)
}

/// Instance at λ = 1, used when only λ-independent data is needed.
fn base_instance(c: &Common) -> Result<ProblemInstance> {
    let file = load(c)?;
    let exps = exponents(c, &file)?;
    let fields = file
        .fields
        .ok_or_else(|| usage("instance file has no coefficient columns (`v <id> <mu> <a> <b> <f> <g>`)"))?;
    Ok(ProblemInstance::new(file.graph, fields, exps, 1.0)?)
}

fn resolve_lambda(c: &Common, base: &ProblemInstance) -> Result<f64> {
    match (c.lambda, c.lambda_ratio) {
        (Some(l), None) => Ok(l),
        (None, Some(r)) => Ok(r * lambda_star(base)),
        (None, None) => Err(usage("pass --lambda or --lambda-ratio")),
        (Some(_), Some(_)) => Err(usage("--lambda and --lambda-ratio are exclusive")),
    }
}

fn instance_with_lambda(c: &Common) -> Result<ProblemInstance> {
    let base = base_instance(c)?;
    let lambda = resolve_lambda(c, &base)?;
    Ok(base.with_lambda(lambda)?)
}

fn solver_options(c: &Common) -> Result<SolverOptions> {
    let d = SolverOptions::default();
    let opts = SolverOptions {
        max_iters: c.max_iters.unwrap_or(d.max_iters),
        grad_tol: c.grad_tol.unwrap_or(d.grad_tol),
        energy_tol: c.energy_tol.unwrap_or(d.energy_tol),
        step_init: c.step_init.unwrap_or(d.step_init),
        armijo_c: c.armijo_c.unwrap_or(d.armijo_c),
        shrink: c.shrink.unwrap_or(d.shrink),
        seed: c.seed,
        ..d
    };
    opts.validate()?;
    Ok(opts)
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<()> {
    emit(path, &to_canonical(value))
}

fn exponents_json(e: &Exponents) -> Value {
    json!({"p": e.p, "q": e.q, "gamma": e.gamma, "alpha": e.alpha})
}

fn validate(c: &Common) -> Result<u8> {
    require_json(c)?;
    let file = load(c)?;
    let g = &file.graph;
    let report = validate_graph(g);
    let mut out = Map::new();
    out.insert("valid".into(), json!(report.is_valid()));
    out.insert("vertex_count".into(), json!(g.vertex_count()));
    out.insert("edge_count".into(), json!(g.edges().len()));
    out.insert("mu0".into(), json!(report.mu0));
    out.insert("degree_bound".into(), json!(report.degree_bound));
    out.insert("connected".into(), json!(report.connected));
    out.insert("violations".into(), json!(report.violations));
    out.insert(
        "coefficients".into(),
        match &file.fields {
            Some(f) => json!({"a0": f.a0(), "b0": f.b0(), "g_sup": f.g().max_abs()}),
            None => Value::Null,
        },
    );
    out.insert(
        "exponents".into(),
        file.exponents.as_ref().map_or(Value::Null, exponents_json),
    );
    write_json(c.out.as_deref(), &Value::Object(out))?;
    Ok(if report.is_valid() { 0 } else { EXIT_VALIDATION })
}

fn constants_json(r: &ConstantsReport, inputs: &ConstantInputs) -> Value {
    let (dx, ds) = ConstantsReport::identity_defects(inputs);
    json!({
        "lambda": r.lambda,
        "lambda_ratio": r.lambda / r.lambda_star,
        "lambda_star": r.lambda_star,
        "x_lambda": r.x_lambda,
        "x0": r.x0,
        "s_lambda": r.s_lambda,
        "s0": r.s0,
        "identity_defect_x": dx,
        "identity_defect_s": ds,
        "in_range": r.lambda < r.lambda_star,
    })
}

fn constants_cmd(c: &Common) -> Result<u8> {
    require_json(c)?;
    let inst = instance_with_lambda(c)?;
    let inputs = ConstantInputs::from_instance(&inst);
    let report = inputs.evaluate(inst.lambda())?;
    let mut v = constants_json(&report, &inputs);
    v["exponents"] = exponents_json(inst.exponents());
    write_json(c.out.as_deref(), &v)?;
    Ok(0)
}

fn opt_f64(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json!(v))
}

fn fiber(a: &FiberArgs) -> Result<u8> {
    let c = &a.common;
    if a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let inst = instance_with_lambda(c)?;
    let n = inst.vertex_count();
    let u = match a.direction_seed {
        Some(s) => random_positive(n, 0.1, 2.0, s),
        None => GraphFunction::constant(n, 1.0),
    };
    let map = FiberMap::new(&inst, &u)?;
    let analysis = match analyze_fiber(&inst, &u) {
        Ok(an) => Some(an),
        Err(pqgraph::Error::NoStationary) => None,
        Err(e) => return Err(e.into()),
    };
    let anchor_lo = analysis.map_or(1.0, |an| an.t1.unwrap_or(an.t_tilde));
    let anchor_hi = analysis.map_or(1.0, |an| an.t2.unwrap_or(an.t_tilde));
    let lo = a.t_min.unwrap_or(1e-3 * anchor_lo);
    let hi = a.t_max.unwrap_or(1e3 * anchor_hi);
    if !(lo > 0.0 && hi > lo) {
        return Err(usage("need 0 < t-min < t-max"));
    }
    let ts: Vec<f64> = (0..a.points)
        .map(|k| lo * (hi / lo).powf(k as f64 / (a.points - 1) as f64))
        .collect();

    let terms = map.terms();
    let summary = json!({
        "lambda": inst.lambda(),
        "direction": if a.direction_seed.is_some() { "random" } else { "constant" },
        "direction_seed": a.direction_seed,
        "classification": analysis.map_or("no_stationary", |an| an.classification.as_str()),
        "t_tilde": opt_f64(analysis.map(|an| an.t_tilde)),
        "phi_at_t_tilde": opt_f64(analysis.map(|an| an.phi_at_t_tilde)),
        "t1": opt_f64(analysis.and_then(|an| an.t1)),
        "t2": opt_f64(analysis.and_then(|an| an.t2)),
        "terms": {"a": terms.a_term, "b": terms.b_term, "f": terms.f_term, "g": terms.g_term},
    });

    match c.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["t", "phi", "phi_prime", "J_of_tu"])?;
            for &t in &ts {
                w.write_record([t, map.value(t), map.derivative(t), map.energy(t)].map(format_float))?;
            }
            let table = String::from_utf8(w.into_inner()?)?;
            emit(c.out.as_deref(), &table)?;
            match &c.out {
                Some(p) => write_json(Some(&summary_path(p)), &summary)?,
                None => eprint!("{}", to_canonical(&summary)),
            }
        }
        Format::Json => {
            let rows: Vec<Value> = ts
                .iter()
                .map(
                    |&t| json!({"t": t, "phi": map.value(t), "phi_prime": map.derivative(t), "J_of_tu": map.energy(t)}),
                )
                .collect();
            let mut v = summary;
            v["rows"] = Value::Array(rows);
            write_json(c.out.as_deref(), &v)?;
        }
    }
    Ok(0)
}

fn summary_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

fn checks_json(checks: &[VerifiedCheck]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| json!({"name": c.name, "lhs": c.lhs, "rhs": c.rhs, "ok": c.ok}))
            .collect(),
    )
}

fn solution_json(inst: &ProblemInstance, u: &GraphFunction) -> Value {
    let g = inst.graph();
    Value::Object((0..u.len()).map(|x| (g.name(x).to_string(), json!(u[x]))).collect())
}

fn report_json(command: &str, inst: &ProblemInstance, r: &SolveReport, opts: &SolverOptions) -> Value {
    let e = inst.exponents();
    let g = inst.graph();
    json!({
        "command": command,
        "lambda": inst.lambda(),
        "exponents": exponents_json(e),
        "converged": r.converged,
        "energy": r.energy,
        "residual_inf": r.residual_inf,
        "residual_l2": r.residual_l2,
        "nehari_class": r.nehari_class.map(|c| c.as_str()),
        "iterations": r.iterations,
        "wa_norm": sobolev_norm(g, &r.solution, inst.fields().a(), e.p).ok(),
        "lalpha_norm": lp_norm(g, &r.solution, e.alpha + 1.0).ok(),
        "inequality_checks": checks_json(&r.inequality_checks),
        "solution": solution_json(inst, &r.solution),
        "options": {
            "max_iters": opts.max_iters,
            "grad_tol": opts.grad_tol,
            "energy_tol": opts.energy_tol,
            "step_init": opts.step_init,
            "armijo_c": opts.armijo_c,
            "shrink": opts.shrink,
            "seed": opts.seed,
        },
    })
}

fn finish_solve(
    c: &Common,
    command: &str,
    inst: &ProblemInstance,
    r: &SolveReport,
    opts: &SolverOptions,
) -> Result<u8> {
    write_json(c.out.as_deref(), &report_json(command, inst, r, opts))?;
    if r.converged {
        Ok(0)
    } else {
        warn!(
            "{command}: stalled after {} iterations, residual {:e}",
            r.iterations, r.residual_inf
        );
        Ok(EXIT_STALL)
    }
}

fn solve_branch(c: &Common, branch: Branch) -> Result<u8> {
    require_json(c)?;
    let inst = instance_with_lambda(c)?;
    let opts = solver_options(c)?;
    let r = minimize_on_branch(&inst, branch, &default_init(&inst), &opts)?;
    let name = if branch == Branch::Plus {
        "solve-plus"
    } else {
        "solve-minus"
    };
    finish_solve(c, name, &inst, &r, &opts)
}

fn solve_negative(c: &Common) -> Result<u8> {
    require_json(c)?;
    let inst = instance_with_lambda(c)?;
    if !(inst.lambda() < 0.0) {
        return Err(usage(format!("solve-negative requires λ < 0, got {}", inst.lambda())));
    }
    let opts = solver_options(c)?;
    let r = minimize_global_negative(&inst, &default_init(&inst), &opts)?;
    finish_solve(c, "solve-negative", &inst, &r, &opts)
}

fn read_solution(path: &Path, inst: &ProblemInstance) -> Result<GraphFunction> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let obj = v
        .get("solution")
        .and_then(Value::as_object)
        .ok_or_else(|| anyhow!("{}: missing `solution` object", path.display()))?;
    let g = inst.graph();
    let index: HashMap<&str, usize> = (0..g.vertex_count()).map(|x| (g.name(x), x)).collect();
    let mut values = vec![f64::NAN; g.vertex_count()];
    for (k, val) in obj {
        let x = *index
            .get(k.as_str())
            .ok_or_else(|| anyhow!("{}: unknown vertex `{k}`", path.display()))?;
        values[x] = val
            .as_f64()
            .ok_or_else(|| anyhow!("{}: value for `{k}` is not a number", path.display()))?;
    }
    if let Some(x) = values.iter().position(|v| v.is_nan()) {
        bail!("{}: no value for vertex `{}`", path.display(), g.name(x));
    }
    Ok(GraphFunction::new(values))
}

fn verify(a: &VerifyArgs) -> Result<u8> {
    let c = &a.common;
    require_json(c)?;
    let inst = instance_with_lambda(c)?;
    let u = read_solution(&a.solution, &inst)?;
    let vopts = VerifyOptions {
        residual_tol: c.grad_tol.unwrap_or(SolverOptions::default().grad_tol),
        probes: a.probes,
        seed: c.seed,
    };
    let checks = verify_solution_with(&inst, &u, &vopts)?;
    let all_ok = checks.iter().all(|ch| ch.ok);
    let class = if inst.lambda() > 0.0 {
        Some(nehari_classify(&inst, &u)?.as_str())
    } else {
        None
    };
    let v = json!({
        "lambda": inst.lambda(),
        "all_ok": all_ok,
        "nehari_class": class,
        "energy": pqgraph::j_lambda(&inst, &u)?,
        "checks": checks_json(&checks),
    });
    write_json(c.out.as_deref(), &v)?;
    Ok(if all_ok { 0 } else { EXIT_VALIDATION })
}

fn summary_fields(prefix: &str, s: Option<&SolveSummary>) -> Vec<(String, Value)> {
    let vals = match s {
        Some(s) => vec![
            json!(s.converged),
            json!(s.energy),
            json!(s.wa_norm),
            json!(s.lalpha_norm),
            json!(s.residual_inf),
            json!(s.iterations),
        ],
        None => vec![Value::Null; 6],
    };
    [
        "converged",
        "energy",
        "wa_norm",
        "lalpha_norm",
        "residual_inf",
        "iterations",
    ]
    .iter()
    .zip(vals)
    .map(|(k, v)| (format!("{prefix}_{k}"), v))
    .collect()
}

fn row_fields(row: &SweepRow) -> Vec<(String, Value)> {
    let c = row.constants;
    let mut fields = vec![
        ("index".to_string(), json!(row.index)),
        ("parameter".to_string(), json!(row.parameter)),
        ("lambda".to_string(), json!(row.lambda)),
        ("p".to_string(), json!(row.p)),
        ("lambda_star".to_string(), opt_f64(c.map(|c| c.lambda_star))),
        ("x_lambda".to_string(), opt_f64(c.map(|c| c.x_lambda))),
        ("x0".to_string(), opt_f64(c.map(|c| c.x0))),
        ("s_lambda".to_string(), opt_f64(c.map(|c| c.s_lambda))),
        ("s0".to_string(), opt_f64(c.map(|c| c.s0))),
    ];
    fields.extend(summary_fields("plus", row.plus.as_ref()));
    fields.extend(summary_fields("minus", row.minus.as_ref()));
    fields.extend(summary_fields("negative", row.negative.as_ref()));
    fields.push(("note".to_string(), row.note.as_ref().map_or(Value::Null, |n| json!(n))));
    fields
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => format_float(n.as_f64().unwrap()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn sweep_cmd(a: &SweepArgs) -> Result<u8> {
    let c = &a.common;
    let grid = match (&a.lambdas, &a.lambda_ratios, &a.p_values) {
        (Some(v), None, None) => SweepGrid::Lambda(v.clone()),
        (None, Some(v), None) => SweepGrid::LambdaRatio(v.clone()),
        (None, None, Some(v)) => SweepGrid::P {
            values: v.clone(),
            lambda_ratio: c.lambda_ratio.unwrap_or(0.5),
        },
        _ => return Err(usage("pass exactly one of --lambdas, --lambda-ratios, --p-values")),
    };
    if grid.is_empty() {
        return Err(usage("sweep grid is empty"));
    }
    let exec = exec_for(c)?;
    let base = base_instance(c)?;
    let opts = solver_options(c)?;
    let rows = sweep(&base, &grid, a.solve, &opts, exec)?;

    match c.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header: Vec<String> = row_fields(&rows[0]).into_iter().map(|(k, _)| k).collect();
            w.write_record(&header)?;
            for row in &rows {
                w.write_record(row_fields(row).iter().map(|(_, v)| csv_cell(v)))?;
            }
            emit(c.out.as_deref(), &String::from_utf8(w.into_inner()?)?)?;
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(row_fields(r).into_iter().collect()))
                .collect();
            write_json(c.out.as_deref(), &json!({ "rows": rows }))?;
        }
    }
    Ok(if all_stalled(&rows) { EXIT_STALL } else { 0 })
}
