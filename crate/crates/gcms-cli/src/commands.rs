use std::collections::BTreeSet;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use gcms::config_space::{count_preimages, count_preimages_closed_form, preimages, BoundedConfig, CountForm};
use gcms::cylinder_algebra::{intersect, intersect_many, parse_expression, sample_configs, subbasis_elements, verify_identity};
use gcms::measures::{
    self, cylinder_basis, log_eigenmeasure, measure_report, measure_setexpr, pair_renewal_critical_measure,
    sarig_measure_renewal, test_cylinders, verify_conformality, weak_star_sweep, y_measure, MeasureModel,
};
use gcms::shift_space::{MatrixKind, Symbol, TransitionMatrix};
use gcms::thermo::{self, Potential};
use gcms::GcmsError;

use crate::output::{emit, Format, Output, Table};
use crate::{Cli, Command, ModelChoice, Suite};

/// Enumeration is exponential in `n`; longer rows report the DP count only.
const ENUMERATION_LIMIT: usize = 20;

pub fn run(cli: &Cli) -> Result<bool> {
    let m = cli.matrix()?;
    let (out, passed) = match &cli.command {
        Command::Count { family, n } => count(cli, &m, *family, *n)?,
        Command::Phase => (phase(cli, &m)?, true),
        Command::Verify { suite, depth } => verify(cli, &m, *suite, *depth)?,
        Command::Converge { depth, offsets, detail } => (converge(cli, &m, *depth, offsets, *detail)?, true),
        Command::Measure { model, family, depth } => (measure(cli, &m, *model, *family, *depth)?, true),
        Command::Decompose { expr, family } => (decompose(cli, &m, expr, *family)?, true),
        Command::Pressure { n, base } => (pressure(cli, &m, *n, *base)?, true),
    };
    let format = cli.format.unwrap_or(match out {
        Output::Table(_) => Format::Csv,
        Output::Report(_) => Format::Json,
    });
    emit(&out, format, cli.out.as_deref())?;
    Ok(passed)
}

/// `--symbol-bound`, clamped to the alphabet of a finite matrix.
fn sym_bound(cli: &Cli, m: &TransitionMatrix) -> Symbol {
    m.size().map_or(cli.symbol_bound, |n| cli.symbol_bound.min(n))
}

fn fmt_form(f: &CountForm) -> String {
    match f {
        CountForm::Exact(v) => v.to_string(),
        CountForm::Interval { lo, hi } => format!("[{lo},{hi}]"),
    }
}

fn enumerate_count(m: &TransitionMatrix, xi: &BoundedConfig, n: usize, start: Symbol) -> Option<u128> {
    let mut bound = start;
    for _ in 0..6 {
        let e = preimages(m, xi, n, bound);
        if e.complete {
            return Some(e.items.len() as u128);
        }
        bound *= 2;
    }
    None
}

fn count(cli: &Cli, m: &TransitionMatrix, family: Option<u64>, n_max: usize) -> Result<(Output, bool)> {
    let families: Vec<u64> = match family {
        Some(f) => vec![f],
        None => m.catalog().iter().map(|c| c.id).collect(),
    };
    let extra = match m.kind() {
        MatrixKind::PrimeRenewal { prime_bound } => *prime_bound,
        _ => 0,
    };
    let mut t = Table::new(&["family", "n", "enumerated", "dp", "closed_form", "match"]);
    let mut ok = true;
    for fam in families {
        let xi = BoundedConfig::empty_stem(m, fam)?;
        let rows: Vec<Vec<String>> = (1..=n_max)
            .into_par_iter()
            .map(|n| -> Result<(Vec<String>, bool)> {
                let dp = count_preimages(m, &xi, n);
                let enumerated = (n <= ENUMERATION_LIMIT)
                    .then(|| enumerate_count(m, &xi, n, sym_bound(cli, m).max(n as Symbol + extra + 2)))
                    .flatten();
                let form = match count_preimages_closed_form(m, fam, n) {
                    Ok(f) => Some(f),
                    Err(GcmsError::Unsupported(_)) => None,
                    Err(e) => return Err(e.into()),
                };
                let good = enumerated.map_or(n > ENUMERATION_LIMIT, |e| e == dp) && form.is_none_or(|f| f.admits(dp));
                Ok((
                    vec![
                        fam.to_string(),
                        n.to_string(),
                        enumerated.map_or("-".into(), |e| e.to_string()),
                        dp.to_string(),
                        form.as_ref().map_or("-".into(), fmt_form),
                        good.to_string(),
                    ],
                    good,
                ))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .map(|(row, good)| {
                ok &= good;
                row
            })
            .collect();
        rows.into_iter().for_each(|r| t.push(r));
    }
    Ok((Output::Table(t), ok))
}

fn phase(cli: &Cli, m: &TransitionMatrix) -> Result<Output> {
    let f = cli.potential()?;
    let betas = cli.betas()?;
    let rows = betas
        .par_iter()
        .map(|&b| measures::phase_row(m, &f, b, cli.tol, cli.length_cap))
        .collect::<gcms::Result<Vec<_>>>()?;
    let mut t = Table::new(&["beta", "sigma", "y_families", "support"]);
    for r in rows {
        let ys: Vec<String> = r.y_families.iter().map(|(id, v)| format!("{id}:{v}")).collect();
        t.push(vec![r.beta.to_string(), r.sigma, ys.join(";"), r.support]);
    }
    Ok(Output::Table(t))
}

// ---- verify ----

fn verify(cli: &Cli, m: &TransitionMatrix, suite: Suite, depth: usize) -> Result<(Output, bool)> {
    let (report, passed) = match suite {
        Suite::Cylinders => verify_cylinders(cli, m, depth)?,
        Suite::Conformality => verify_conformality_suite(cli, m, depth)?,
        Suite::Pressure => verify_pressure(cli, m)?,
        Suite::Partition => verify_partition(cli, m, depth)?,
        Suite::Superadditivity => verify_superadditivity(cli, m)?,
    };
    let mut obj = json!({ "suite": format!("{suite:?}").to_lowercase(), "matrix": m.name(), "passed": passed });
    if let (Value::Object(o), Value::Object(r)) = (&mut obj, report) {
        o.extend(r);
    }
    Ok((Output::Report(obj), passed))
}

fn verify_cylinders(cli: &Cli, m: &TransitionMatrix, depth: usize) -> Result<(Value, bool)> {
    let bound = sym_bound(cli, m).min(4);
    let elems = subbasis_elements(m, depth, bound);
    let sample = sample_configs(m, depth + 2, sym_bound(cli, m), 50);
    let pairs: Vec<(usize, usize)> = (0..elems.len()).flat_map(|i| (i..elems.len()).map(move |j| (i, j))).collect();
    let failures: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let (a, b) = (&elems[i], &elems[j]);
            match intersect(m, a, b) {
                Ok(rhs) => {
                    let rep = verify_identity(m, (a, b), &rhs, &sample);
                    (!rep.passed()).then(|| rep.first_counterexample.unwrap_or_default())
                }
                Err(e) => Some(format!("{a} ∩ {b}: {e}")),
            }
        })
        .collect();
    let passed = failures.is_empty();
    Ok((
        json!({
            "elements": elems.len(),
            "pairs": pairs.len(),
            "sample_points": sample.len(),
            "failing_pairs": failures.len(),
            "first_failure": failures.first(),
        }),
        passed,
    ))
}

/// The measures that exist at `β` for the given matrix and potential.
fn models_at(m: &TransitionMatrix, f: &Potential, beta: f64) -> Result<Vec<MeasureModel>> {
    if let Potential::LogRatio = f {
        if !matches!(m.kind(), MatrixKind::Renewal) {
            bail!("the log potential is supported on the renewal shift only");
        }
        return Ok(vec![log_eigenmeasure(beta)?]);
    }
    let mut out = Vec::new();
    for col in m.catalog() {
        match y_measure(m, col.id, f, beta) {
            Ok(y) => out.push(MeasureModel::YFamily(y)),
            Err(GcmsError::Divergent(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let c = match f {
        Potential::Constant(c) => *c,
        _ => return Ok(out),
    };
    match m.kind() {
        MatrixKind::Renewal if c == 1.0 => out.push(MeasureModel::Cylinder(sarig_measure_renewal(beta))),
        MatrixKind::PairRenewal if c == 1.0 && (beta - measures::pair_renewal_critical_beta()).abs() <= 1e-9 => {
            out.push(MeasureModel::Cylinder(pair_renewal_critical_measure()))
        }
        _ => {}
    }
    Ok(out)
}

fn verify_conformality_suite(cli: &Cli, m: &TransitionMatrix, depth: usize) -> Result<(Value, bool)> {
    let f = cli.potential()?;
    let beta = cli.beta()?;
    let models = models_at(m, &f, beta)?;
    if models.is_empty() {
        bail!("no conformal measure is available at β = {beta}");
    }
    let mut rows = Vec::new();
    let mut max_residual = 0.0f64;
    for model in &models {
        let cyl = test_cylinders(model.matrix(), depth.max(1), sym_bound(cli, m));
        let rep = verify_conformality(model, &cyl, cli.tol)?;
        let atomic = match model {
            MeasureModel::YFamily(y) => Some(measures::atomic_du_residual(y, depth.max(1), sym_bound(cli, m))),
            _ => None,
        };
        max_residual = max_residual.max(rep.max_residual).max(atomic.unwrap_or(0.0));
        rows.push(json!({
            "model": model.kind_name(),
            "cylinders": rep.checked,
            "max_residual": rep.max_residual,
            "worst": rep.worst,
            "atomic_residual": atomic,
            "total_mass": model.total_mass().value,
        }));
    }
    let passed = max_residual <= cli.tol;
    Ok((json!({ "beta": beta, "tol": cli.tol, "max_residual": max_residual, "models": rows }), passed))
}

fn verify_pressure(cli: &Cli, m: &TransitionMatrix) -> Result<(Value, bool)> {
    let f = cli.potential()?;
    let betas = if cli.beta.is_some() || cli.beta_grid.is_some() { cli.betas()? } else { vec![0.3, 0.5, 1.0, 2.0] };
    let n_max = 16usize;
    let closed = |beta: f64, n: usize| match (m.kind(), &f) {
        (MatrixKind::Renewal, Potential::Constant(c)) => Some(2f64.ln() + beta * c - 2f64.ln() / n as f64),
        _ => None,
    };
    let mut rows = Vec::new();
    let mut max_residual = 0.0f64;
    let mut first_failure = None;
    for &beta in &betas {
        for n in 1..=n_max {
            let z = thermo::z_n(m, &f, beta, 1, n, n as Symbol + 1 + sym_bound(cli, m));
            let dp = thermo::z_n_dp(m, &f, beta, 1, n);
            let lhs = z.value.ln() / n as f64;
            let mut residual = (lhs - dp.ln() / n as f64).abs();
            let exact = closed(beta, n);
            if let Some(e) = exact {
                residual = residual.max((lhs - e).abs());
            }
            if (residual > cli.tol || !z.complete) && first_failure.is_none() {
                first_failure = Some(format!("β={beta}, n={n}: residual {residual:.3e}, complete={}", z.complete));
            }
            max_residual = max_residual.max(residual);
            rows.push(json!({ "beta": beta, "n": n, "log_zn_over_n": lhs, "closed_form": exact, "residual": residual }));
        }
    }
    let passed = first_failure.is_none();
    Ok((json!({ "max_residual": max_residual, "first_failure": first_failure, "rows": rows }), passed))
}

fn verify_partition(cli: &Cli, m: &TransitionMatrix, depth: usize) -> Result<(Value, bool)> {
    let f = cli.potential()?;
    let bound = sym_bound(cli, m).min(5);
    let mut stems = Vec::new();
    for len in 1..=depth.max(1) {
        stems.extend(m.enumerate_words(len, &BTreeSet::from([1]), bound).items);
    }
    let mut checked = 0usize;
    let mut max_transport = 0.0f64;
    let mut first_failure = None;
    for stem in &stems {
        let x = BoundedConfig::new(m, stem.clone(), 1)?;
        for n in 1..=10 {
            let rep = thermo::jn_tn(m, &x, n, Some(&f))?;
            checked += 1;
            max_transport = max_transport.max(rep.transport_residual.unwrap_or(0.0));
            if !rep.passed() && first_failure.is_none() {
                first_failure = Some(serde_json::to_value(&rep)?);
            }
        }
        for beta in [0.5, 1.0] {
            for row in thermo::sandwich_check(m, &f, beta, &x, 12)? {
                if !row.holds && first_failure.is_none() {
                    first_failure = Some(json!({ "stem": stem.to_string(), "beta": beta, "sandwich": row }));
                }
            }
        }
    }
    let passed = first_failure.is_none();
    Ok((
        json!({ "stems": stems.len(), "partitions": checked, "max_transport_residual": max_transport, "first_failure": first_failure }),
        passed,
    ))
}

fn verify_superadditivity(cli: &Cli, m: &TransitionMatrix) -> Result<(Value, bool)> {
    let f = cli.potential()?;
    let betas = if cli.beta.is_some() || cli.beta_grid.is_some() { cli.betas()? } else { vec![0.0, 0.7, 1.5] };
    let mut rows = Vec::new();
    let mut passed = true;
    for beta in betas {
        let rep = thermo::superadditivity_check(m, &f, beta, 1, 20)?;
        passed &= rep.counterexample.is_none();
        rows.push(json!({ "beta": beta, "pairs_checked": rep.pairs_checked, "counterexample": rep.counterexample }));
    }
    Ok((json!({ "rows": rows }), passed))
}

// ---- converge ----

type Family = Box<dyn Fn(f64) -> gcms::Result<MeasureModel> + Sync>;

fn converge(cli: &Cli, m: &TransitionMatrix, depth: usize, offsets: &[f64], detail: bool) -> Result<Output> {
    let f = cli.potential()?;
    let (beta_c, target, families): (f64, MeasureModel, Vec<(String, Family)>) = match (m.kind(), &f) {
        (MatrixKind::Renewal, Potential::Constant(c)) if *c == 1.0 => {
            let mm = m.clone();
            let fam: Family = Box::new(move |b| y_measure(&mm, 1, &Potential::Constant(1.0), b).map(MeasureModel::YFamily));
            (2f64.ln(), MeasureModel::Cylinder(sarig_measure_renewal(2f64.ln())), vec![("Y1".into(), fam)])
        }
        (MatrixKind::PairRenewal, Potential::Constant(c)) if *c == 1.0 => {
            let fams = m
                .catalog()
                .iter()
                .map(|col| {
                    let (mm, id) = (m.clone(), col.id);
                    let fam: Family = Box::new(move |b| y_measure(&mm, id, &Potential::Constant(1.0), b).map(MeasureModel::YFamily));
                    (format!("Y{id}"), fam)
                })
                .collect();
            (measures::pair_renewal_critical_beta(), MeasureModel::Cylinder(pair_renewal_critical_measure()), fams)
        }
        (MatrixKind::Renewal, Potential::LogRatio) => {
            let bc = thermo::critical_beta_log();
            let fam: Family = Box::new(log_eigenmeasure);
            (bc, log_eigenmeasure(bc)?, vec![("log".into(), fam)])
        }
        _ => bail!("converge supports renewal and pair renewal with F ≡ 1, and the renewal log potential"),
    };
    if offsets.iter().any(|o| !(*o > 0.0)) {
        bail!("offsets must be positive");
    }
    let basis = cylinder_basis(m, depth, sym_bound(cli, m));
    let betas: Vec<f64> = offsets.iter().map(|o| beta_c + o).collect();
    let mut t = if detail {
        Table::new(&["family", "beta", "offset", "set", "value", "target", "diff"])
    } else {
        Table::new(&["family", "beta", "offset", "max_diff", "empty_stem_mass"])
    };
    for (name, fam) in &families {
        let sweep = weak_star_sweep(fam, &target, &basis, &betas, cli.tol)?;
        if detail {
            for r in &sweep.rows {
                let off = r.beta - beta_c;
                t.push(vec![name.clone(), r.beta.to_string(), off.to_string(), r.set.clone(), r.value.to_string(), r.target.to_string(), r.diff.to_string()]);
            }
            continue;
        }
        for ((b, d), o) in sweep.max_diff.iter().zip(offsets) {
            let mass = match fam(*b)? {
                MeasureModel::YFamily(y) => y.c_e.to_string(),
                _ => "0".into(),
            };
            t.push(vec![name.clone(), b.to_string(), o.to_string(), d.to_string(), mass]);
        }
    }
    Ok(Output::Table(t))
}

// ---- measure / decompose / pressure ----

fn build_model(cli: &Cli, m: &TransitionMatrix, model: ModelChoice, family: u64) -> Result<MeasureModel> {
    let f = cli.potential()?;
    let need_renewal = |what: &str| -> Result<()> {
        if !matches!(m.kind(), MatrixKind::Renewal) {
            bail!("{what} is defined on the renewal shift");
        }
        Ok(())
    };
    Ok(match model {
        ModelChoice::Y => MeasureModel::YFamily(y_measure(m, family, &f, cli.beta()?)?),
        ModelChoice::Convex => {
            let beta = cli.beta()?;
            let parts = m
                .catalog()
                .iter()
                .map(|c| y_measure(m, c.id, &f, beta).map(MeasureModel::YFamily))
                .collect::<gcms::Result<Vec<_>>>()?;
            let w = 1.0 / parts.len() as f64;
            MeasureModel::convex(parts.into_iter().map(|p| (w, p)).collect())?
        }
        ModelChoice::Sarig => {
            need_renewal("the Sarig measure")?;
            MeasureModel::Cylinder(sarig_measure_renewal(cli.beta()?))
        }
        ModelChoice::PairCritical => {
            if !matches!(m.kind(), MatrixKind::PairRenewal) {
                bail!("the critical measure is defined on the pair renewal shift");
            }
            MeasureModel::Cylinder(pair_renewal_critical_measure())
        }
        ModelChoice::Log => {
            need_renewal("the log eigenmeasure")?;
            log_eigenmeasure(cli.beta()?)?
        }
    })
}

fn measure(cli: &Cli, m: &TransitionMatrix, model: Option<ModelChoice>, family: u64, depth: usize) -> Result<Output> {
    let choice = model.unwrap_or(match cli.potential()? {
        Potential::LogRatio => ModelChoice::Log,
        _ => ModelChoice::Y,
    });
    let model = build_model(cli, m, choice, family)?;
    let rep = measure_report(&model, depth, sym_bound(cli, m), cli.tol)?;
    let mut v = serde_json::to_value(&rep)?;
    if let (Value::Object(o), MeasureModel::YFamily(y)) = (&mut v, &model) {
        o.insert("total_mass_error".into(), json!(y.total_mass().error));
    }
    Ok(Output::Report(v))
}

fn decompose(cli: &Cli, m: &TransitionMatrix, expr: &str, family: Option<u64>) -> Result<Output> {
    let elems = parse_expression(expr)?;
    let s = intersect_many(m, &elems)?;
    let mut v = json!({
        "matrix": m.name(),
        "expression": elems.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ∩ "),
        "normal_form": s.to_string(),
        "empty": s.is_empty(),
        "parts": s.part_count(),
        "whole_space": s.whole_space,
        "points": s.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "atoms": s.atoms.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "families": s.families.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    });
    if let Some(fam) = family {
        let model = build_model(cli, m, ModelChoice::Y, fam).context("measuring the normal form")?;
        let c = measure_setexpr(&model, &s, cli.tol)?;
        v["measure"] = json!({ "model": model.kind_name(), "beta": cli.beta()?, "value": c.value, "error": c.error });
    }
    Ok(Output::Report(v))
}

fn pressure(cli: &Cli, m: &TransitionMatrix, n: usize, base: Symbol) -> Result<Output> {
    let f = cli.potential()?;
    let betas = cli.betas()?;
    let ests = betas
        .par_iter()
        .map(|&b| thermo::gurevich_pressure(m, &f, b, base, n))
        .collect::<gcms::Result<Vec<_>>>()?;
    let mut t = Table::new(&["beta", "n", "log_zn_over_n", "extrapolated", "certificate"]);
    for e in ests {
        let cert = format!("{:?}", e.certificate).to_lowercase();
        for (k, v) in &e.values {
            t.push(vec![e.beta.to_string(), k.to_string(), v.to_string(), e.extrapolated.to_string(), cert.clone()]);
        }
    }
    Ok(Output::Table(t))
}
