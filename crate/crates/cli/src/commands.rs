use crate::config::{CliError, Command, RunConfig};
use darboux_core::pauli::{canonical_c0, constant_phi_check, field_profile, g_n};
use darboux_core::soliton::{bound_state, potential, scatter_state, transmission_closed_form, Direction, ValidatedSpec};
use darboux_core::susy::{
    build_integrals, central_charge_residual, invariant_reports, order_ledger, relation_report, relations, ExtendedSystem, IsoClass,
};
use darboux_core::verify::{
    chebyshev_grid, eigen_oracle, evaluate_record, identity_registry, identity_suite, lookup, packet_suite, pair_suite,
    scattering_oracle, standard_grid, trig_pairs, IdentityInput, IdentityRecord, ResidualReport, TestFunction, DEFAULT_SEED,
};
use serde_json::{json, Map, Value};
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

pub const SCHEMA: &str = "darboux-lab/1";

/// What a command produced: a JSON report, optional CSV data, and whether
/// every check in it passed.
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
    pub pass: bool,
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Output, CliError> {
    let mut out = match cmd {
        Command::Build => build(cfg)?,
        Command::Verify => verify(cfg)?,
        Command::Susy => susy(cfg)?,
        Command::Spectrum => spectrum(cfg)?,
        Command::Scatter => scatter(cfg)?,
        Command::Pauli => pauli(cfg)?,
    };
    let obj = out.json.as_object_mut().expect("reports are objects");
    obj.insert("schema".into(), SCHEMA.into());
    obj.insert("command".into(), cmd.name().into());
    obj.insert("pass".into(), out.pass.into());
    if cfg.timestamp {
        let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        obj.insert("timestamp".into(), secs.into());
    }
    Ok(out)
}

/// Writes `<dir>/<cmd>.json` (and `.csv`), or prints to stdout: the CSV when
/// there is one and the command is a data command, otherwise the JSON.
pub fn emit(cmd: Command, out: &Output, dir: Option<&Path>) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(&out.json).expect("report serializes") + "\n";
    match dir {
        Some(dir) => {
            let io = |e: std::io::Error| CliError::config("OutputPath", format!("{}: {e}", dir.display()));
            std::fs::create_dir_all(dir).map_err(io)?;
            std::fs::write(dir.join(format!("{}.json", cmd.name())), json).map_err(io)?;
            if let Some(csv) = &out.csv {
                std::fs::write(dir.join(format!("{}.csv", cmd.name())), csv).map_err(io)?;
            }
        }
        None => match (&out.csv, cmd) {
            (Some(csv), Command::Build | Command::Pauli) => print!("{csv}"),
            _ => print!("{json}"),
        },
    }
    Ok(())
}

fn spec_json(s: &ValidatedSpec) -> Value {
    json!({ "kappa": s.kappas(), "tau": s.taus() })
}

fn system_json(sys: &ExtendedSystem) -> Value {
    json!({ "upper": spec_json(&sys.upper), "lower": spec_json(&sys.lower) })
}

fn num_err<E: std::fmt::Debug + std::fmt::Display>(e: E) -> CliError {
    CliError::from_variant(&e)
}

fn build(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = cfg.upper()?;
    let k = cfg.k.as_ref().and_then(|k| k.first().copied()).unwrap_or(1.0);
    let k1 = spec.kappas().first().copied().unwrap_or(1.0);
    let grid = match cfg.grid {
        Some(count) => chebyshev_grid(8.0 / k1, count, &[], 0.0),
        None => standard_grid(k1, &[]),
    };
    let n = spec.n();
    let mut csv = String::from("x,V");
    for j in 1..=n {
        write!(csv, ",psi_{j}").unwrap();
    }
    csv.push_str(",re_psi_k,im_psi_k\n");
    for &x in &grid.points {
        write!(csv, "{x},{}", potential(&spec, x).map_err(num_err)?).unwrap();
        for j in 1..=n {
            write!(csv, ",{}", bound_state(&spec, j, x, 0).map_err(num_err)?.value()).unwrap();
        }
        let s = scatter_state(&spec, k, Direction::Right, x, 0).map_err(num_err)?.value();
        writeln!(csv, ",{},{}", s.re, s.im).unwrap();
    }
    let json = json!({ "spec": spec_json(&spec), "n": n, "k": k, "grid_points": grid.points.len() });
    Ok(Output { json, csv: Some(csv), pass: true })
}

/// Lowercase alphanumerics only, so `complete-break` matches `CompleteBreak`.
fn normalize(s: &str) -> String {
    s.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

fn suite_for(sys: &ExtendedSystem, seed: u64) -> Vec<TestFunction> {
    if seed == DEFAULT_SEED {
        return identity_suite(sys);
    }
    let (k1, kn) = (sys.upper.kappas()[0], *sys.upper.kappas().last().unwrap());
    let mut v = packet_suite(k1, kn, seed, 8);
    v.extend((1..=sys.upper.n()).map(|j| TestFunction::bound(&sys.upper, j)));
    v.extend((1..=sys.lower.n()).map(|j| TestFunction::bound(&sys.lower, j)));
    v
}

/// Why the canonical system of `rec` does not match the `--class`/`--n` filters.
fn filter_mismatch(rec: &IdentityRecord, cfg: &RunConfig) -> Result<Option<String>, CliError> {
    if cfg.class.is_none() && cfg.n.is_none() {
        return Ok(None);
    }
    let Some(sys) = rec.canonical.system() else {
        return Ok(Some("has no operator system".into()));
    };
    let sys = sys.map_err(num_err)?;
    if let Some(c) = &cfg.class {
        if normalize(c) != normalize(sys.class.tag()) {
            return Ok(Some(format!("is checked on a {} system", sys.class.tag())));
        }
    }
    if let Some(n) = cfg.n {
        if n != sys.n() {
            return Ok(Some(format!("is checked at n = {}", sys.n())));
        }
    }
    Ok(None)
}

fn report_json(rep: &ResidualReport, pass: bool) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("max_rel_residual".into(), rep.max_rel_residual.into());
    m.insert("threshold".into(), rep.threshold.into());
    m.insert("pass".into(), pass.into());
    m.insert("worst_point".into(), rep.worst_point.filter(|x| x.is_finite()).into());
    m.insert("worst_function".into(), rep.worst_function.clone().into());
    m.insert("skipped_points".into(), rep.skipped.len().into());
    m
}

fn judged(rep: &ResidualReport, tol: Option<f64>) -> bool {
    match tol {
        Some(t) => !rep.per_function.is_empty() && rep.max_rel_residual <= t,
        None => rep.pass,
    }
}

fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let explicit = if cfg.has_system() { Some(cfg.system()?) } else { None };
    let records: Vec<&IdentityRecord> = if cfg.all {
        identity_registry().iter().collect()
    } else if cfg.ids.is_empty() {
        return Err(CliError::config("EmptySelection", "give --id or --all"));
    } else {
        let mut v = Vec::new();
        for id in &cfg.ids {
            v.push(lookup(id).ok_or_else(|| CliError::config("UnknownId", format!("no identity {id:?}")))?);
        }
        v
    };
    let pairs = trig_pairs(100, cfg.seed);
    let explicit_suite = explicit.as_ref().map(|s| suite_for(s, cfg.seed));
    let mut results = Vec::new();
    let mut not_applicable = Vec::new();
    for rec in records {
        if explicit.is_none() {
            if let Some(why) = filter_mismatch(rec, cfg)? {
                if cfg.all {
                    continue;
                }
                return Err(CliError::config("SelectionMismatch", format!("{} {why}", rec.id)));
            }
        }
        let (input, params, tfs, canon);
        if rec.is_scalar() {
            input = IdentityInput::Angles(&pairs);
            params = json!({ "pairs": pairs.len(), "seed": cfg.seed });
            tfs = Vec::new();
        } else if let Some(sys) = &explicit {
            if !rec.applies_to(sys) {
                if cfg.all {
                    not_applicable.push(Value::from(rec.id.clone()));
                    continue;
                }
                return Err(CliError::config("NotApplicable", format!("{} does not apply to a {} system", rec.id, sys.class.tag())));
            }
            input = IdentityInput::System(sys);
            params = system_json(sys);
            tfs = explicit_suite.clone().unwrap_or_default();
        } else {
            canon = rec.canonical.system().expect("operator records have systems").map_err(num_err)?;
            tfs = suite_for(&canon, cfg.seed);
            params = system_json(&canon);
            input = IdentityInput::System(&canon);
        }
        let rep = evaluate_record(rec, input, &tfs).map_err(num_err)?;
        let pass = judged(&rep, cfg.tol);
        let mut m = report_json(&rep, pass);
        m.insert("id".into(), rec.id.clone().into());
        m.insert("group".into(), rec.group.to_string().into());
        m.insert("citation".into(), rec.statement.clone().into());
        m.insert("params".into(), params);
        results.push(Value::Object(m));
    }
    if results.is_empty() {
        return Err(CliError::config("EmptySelection", "no identity matches the selection"));
    }
    let passed = results.iter().filter(|r| r["pass"] == true).count();
    let failed = results.len() - passed;
    let json = json!({
        "results": results,
        "not_applicable": not_applicable,
        "summary": { "total": passed + failed, "passed": passed, "failed": failed, "not_applicable": not_applicable.len() },
    });
    Ok(Output { json, csv: None, pass: failed == 0 })
}

/// Classes whose Lax integral is expected to commute with the supercharges.
fn exact(class: &IsoClass) -> bool {
    matches!(class, IsoClass::ExactGeneric | IsoClass::ExactCommonVirtual { .. } | IsoClass::SpecialCequal | IsoClass::Identical)
}

fn susy(cfg: &RunConfig) -> Result<Output, CliError> {
    let sys = cfg.system()?;
    let ints = build_integrals(&sys).map_err(num_err)?;
    let fns = pair_suite(&sys.upper, &sys.lower);
    let mut pass = true;
    let ledger = order_ledger(&sys, &ints).ok();
    pass &= ledger.as_ref().map_or(true, |l| l.pass);
    // effective orders when the ledger applies, nominal otherwise
    let mut orders: Vec<usize> = match &ledger {
        Some(l) => l.orders.iter().map(|o| o.2).collect(),
        None => ints.generators.iter().map(|g| g.op.order()).collect(),
    };
    orders.extend(ints.p.iter().map(|p| p.order()));
    orders.sort_unstable();
    let mut rels = Vec::new();
    let rel_list = relations(&sys, &ints).map_err(num_err)?;
    let reports = rel_list.iter().map(|r| relation_report(r, &sys, &fns)).chain(invariant_reports(&sys, &ints, &fns));
    for rep in reports {
        let ok = judged(&rep, cfg.tol);
        pass &= ok;
        let mut m = report_json(&rep, ok);
        m.insert("id".into(), rep.id.clone().into());
        rels.push(Value::Object(m));
    }
    let cc = central_charge_residual(&sys, &ints, &fns);
    let central = exact(&sys.class);
    if central {
        pass &= judged(&cc.report, cfg.tol);
    }
    let constants: Vec<Value> = sys.constants.iter().map(|c| json!({ "j": c.j, "jp": c.jp, "kappa": c.kappa, "value": c.value })).collect();
    let json = json!({
        "params": system_json(&sys),
        "class": sys.class.tag(),
        "class_detail": serde_json::to_value(&sys.class).expect("class serializes"),
        "shift_constants": constants,
        "orders": orders,
        "generators": ints.generators.iter().map(|g| json!({ "label": g.label, "order": g.op.order() })).collect::<Vec<_>>(),
        "order_ledger": serde_json::to_value(&ledger).expect("ledger serializes"),
        "relations": rels,
        "central_charge": {
            "max_rel_residual": cc.report.max_rel_residual,
            "threshold": cc.report.threshold,
            "absolute": cc.absolute,
            "expected_central": central,
        },
    });
    Ok(Output { json, csv: None, pass })
}

fn spectrum(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = cfg.upper()?;
    let n = spec.n();
    let k1 = spec.kappas().first().copied().unwrap_or(1.0);
    let (half, points) = ((20.0 / k1).max(25.0), cfg.grid.unwrap_or(4001));
    let tol = cfg.tol.unwrap_or(1e-4);
    let ev = eigen_oracle(&spec, half, points).map_err(num_err)?;
    let mut levels = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..n {
        let kap = spec.kappas()[n - 1 - i];
        let dev = (ev[i] + kap * kap).abs();
        worst = worst.max(dev);
        levels.push(json!({ "kappa": kap, "expected": -kap * kap, "computed": ev[i], "deviation": dev }));
    }
    let spurious = ev[n..].iter().filter(|&&e| e < -tol).count();
    let pass = worst <= tol && spurious == 0;
    let mut csv = String::from("index,eigenvalue\n");
    for (i, e) in ev.iter().enumerate() {
        writeln!(csv, "{i},{e}").unwrap();
    }
    let json = json!({
        "spec": spec_json(&spec),
        "half_width": half,
        "grid_points": points,
        "eigenvalues": ev,
        "bound_levels": levels,
        "max_deviation": worst,
        "spurious_negative": spurious,
        "tol": tol,
    });
    Ok(Output { json, csv: Some(csv), pass })
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(TAU) - PI
}

fn scatter(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = cfg.upper()?;
    let ks = cfg.k.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let tol = cfg.tol.unwrap_or(1e-6);
    let mut rows = Vec::new();
    let mut csv = String::from("k,re_t,im_t,re_r,im_r,re_a,im_a\n");
    let mut pass = true;
    for &k in &ks {
        let sc = scattering_oracle(&spec, k).map_err(num_err)?;
        let a = transmission_closed_form(&spec, k);
        let phase = wrap(sc.t.arg() + a.arg()).abs();
        let ok = sc.r.norm() <= tol && phase <= tol;
        pass &= ok;
        writeln!(csv, "{k},{},{},{},{},{},{}", sc.t.re, sc.t.im, sc.r.re, sc.r.im, a.re, a.im).unwrap();
        rows.push(json!({
            "k": k,
            "t": [sc.t.re, sc.t.im],
            "r": [sc.r.re, sc.r.im],
            "abs_r": sc.r.norm(),
            "a": [a.re, a.im],
            "phase_error": phase,
            "x_far": sc.x_far,
            "pass": ok,
        }));
    }
    let json = json!({ "spec": spec_json(&spec), "tol": tol, "momenta": rows });
    Ok(Output { json, csv: Some(csv), pass })
}

fn pauli(cfg: &RunConfig) -> Result<Output, CliError> {
    let sys = cfg.system()?;
    let k = cfg.k.as_ref().and_then(|k| k.first().copied()).unwrap_or(0.0);
    let g = match cfg.g.as_deref() {
        None => 2.0,
        Some("gn") => g_n(sys.n()),
        Some(s) => match s.parse::<f64>() {
            Ok(g) if g > 0.0 && g.is_finite() => g,
            _ => return Err(CliError::config("GyromagneticRatio", format!("--g must be positive or gn, got {s:?}"))),
        },
    };
    let c0 = cfg.c0.unwrap_or_else(|| canonical_c0(&sys, k, g));
    let mut profile = field_profile(&sys, k, c0, g);
    if let Some(count) = cfg.grid {
        let half = profile.half_width;
        let mut poles = sys.upper_chain.singular_points(-half, half);
        poles.extend(sys.lower_chain.singular_points(-half, half));
        profile.grid = chebyshev_grid(half, count, &poles, 0.1 / sys.kappa_min()).points;
    }
    let samples = profile.samples().map_err(num_err)?;
    let chk = constant_phi_check(&profile).map_err(num_err)?;
    let mut csv = String::from("x,a,phi,bz\n");
    for s in &samples {
        writeln!(csv, "{},{},{},{}", s.x, s.a, s.phi, s.bz).unwrap();
    }
    let json = json!({
        "params": system_json(&sys),
        "class": sys.class.tag(),
        "k": k,
        "g": g,
        "c0": c0,
        "grid_points": samples.len(),
        "phi": { "is_constant": chk.is_constant, "value": chk.value, "deviation": chk.deviation },
    });
    Ok(Output { json, csv: Some(csv), pass: true })
}
