//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;

use gcms::config_space::{count_preimages, count_preimages_closed_form, preimages, BoundedConfig, CountForm};
use gcms::cylinder_algebra::{intersect, sample_configs, subbasis_elements, verify_identity};
use gcms::measures::{
    cylinder_basis, log_eigenmeasure, normalizer, pair_normalization_root, pair_renewal_critical_measure,
    sarig_measure_renewal, test_cylinders, verify_conformality, weak_star_sweep, y_measure, MeasureModel, Normalizer,
};
use gcms::series::{self, zeta};
use gcms::shift_space::{Symbol, TransitionMatrix, Word};
use gcms::thermo::{self, Discriminant, Potential};

type Check = std::result::Result<String, String>;
/// Name, time limit in seconds, check.
type Criterion = (&'static str, Option<f64>, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1() -> Check {
    let m = TransitionMatrix::renewal();
    let xi = BoundedConfig::empty_stem(&m, 1).unwrap();
    for n in 1..=14usize {
        let e = preimages(&m, &xi, n, n as Symbol + 1);
        ensure(e.complete, format!("n={n}: enumeration cut by the symbol bound"))?;
        let want = 1u128 << (n - 1);
        ensure(e.items.len() as u128 == want, format!("n={n}: {} preimages, expected {want}", e.items.len()))?;
        ensure(count_preimages(&m, &xi, n) == want, format!("n={n}: DP count differs"))?;
    }
    Ok("|σ^-n(ξ⁰)| = 2^(n-1) for n ≤ 14".into())
}

fn c2() -> Check {
    let m = TransitionMatrix::pair_renewal();
    for fam in [1u64, 2] {
        let xi = BoundedConfig::empty_stem(&m, fam).unwrap();
        for n in 1..=12usize {
            let e = preimages(&m, &xi, n, n as Symbol + 2);
            ensure(e.complete, format!("family {fam}, n={n}: enumeration incomplete"))?;
            let got = e.items.len() as u128;
            let form = count_preimages_closed_form(&m, fam, n).map_err(|e| e.to_string())?;
            ensure(form == CountForm::Exact(got), format!("family {fam}, n={n}: enumerated {got}, closed form {form:?}"))?;
        }
    }
    let n2 = preimages(&m, &BoundedConfig::empty_stem(&m, 1).unwrap(), 2, 4).items.len();
    ensure(n2 == 5, format!("family 1, n=2 gives {n2}, expected 5"))?;
    Ok("enumeration = integer recursion, families 1 and 2, n ≤ 12".into())
}

fn c3() -> Check {
    let m = TransitionMatrix::prime_renewal(5);
    for fam in [1u64, 2, 3, 5] {
        let xi = BoundedConfig::empty_stem(&m, fam).unwrap();
        for n in 1..=9usize {
            let e = preimages(&m, &xi, n, 5 + n as Symbol + 1);
            ensure(e.complete, format!("family {fam}, n={n}: enumeration incomplete"))?;
            let got = e.items.len() as u128;
            let (lo, hi) = (1u128 << (n - 1), 3u128.pow(n as u32));
            ensure(lo <= got && got <= hi, format!("family {fam}, n={n}: {got} outside [{lo}, {hi}]"))?;
        }
    }
    Ok("2^(n-1) ≤ count ≤ 3^n, families 1,2,3,5, n ≤ 9".into())
}

fn c4() -> Check {
    let mut summary = Vec::new();
    for m in [TransitionMatrix::renewal(), TransitionMatrix::pair_renewal()] {
        let elems = subbasis_elements(&m, 3, 4);
        let sample = sample_configs(&m, 5, 6, 50);
        let pairs: Vec<(usize, usize)> = (0..elems.len()).flat_map(|i| (i..elems.len()).map(move |j| (i, j))).collect();
        let failures: Vec<String> = pairs
            .par_iter()
            .filter_map(|&(i, j)| {
                let (a, b) = (&elems[i], &elems[j]);
                match intersect(&m, a, b) {
                    Ok(rhs) => {
                        let rep = verify_identity(&m, (a, b), &rhs, &sample);
                        (!rep.passed()).then(|| rep.first_counterexample.unwrap_or_default())
                    }
                    Err(e) => Some(format!("{a} ∩ {b}: {e}")),
                }
            })
            .collect();
        if let Some(first) = failures.first() {
            return Err(format!("{}: {} failing pairs, first: {first}", m.name(), failures.len()));
        }
        summary.push(format!("{} {} pairs × {} points", m.name(), pairs.len(), sample.len()));
    }
    Ok(format!("zero mismatches, parts disjoint ({})", summary.join("; ")))
}

fn c5() -> Check {
    const TOL: f64 = 1e-10;
    let renewal = TransitionMatrix::renewal();
    let pair = TransitionMatrix::pair_renewal();
    let one = Potential::Constant(1.0);
    let bc = thermo::critical_beta_log();
    let mut models: Vec<(String, MeasureModel)> = Vec::new();
    for beta in [0.5, 2f64.ln(), 1.5] {
        models.push((format!("Sarig β={beta:.4}"), MeasureModel::Cylinder(sarig_measure_renewal(beta))));
    }
    for beta in [2f64.ln() + 0.1, 1.5] {
        let y = y_measure(&renewal, 1, &one, beta).map_err(|e| e.to_string())?;
        models.push((format!("renewal Y β={beta:.4}"), MeasureModel::YFamily(y)));
    }
    models.push(("pair critical".into(), MeasureModel::Cylinder(pair_renewal_critical_measure())));
    for fam in [1u64, 2] {
        let y = y_measure(&pair, fam, &one, 1.2).map_err(|e| e.to_string())?;
        models.push((format!("pair Y family {fam} β=1.2"), MeasureModel::YFamily(y)));
    }
    for beta in [1.3, bc, 2.0] {
        models.push((format!("log β={beta:.4}"), log_eigenmeasure(beta).map_err(|e| e.to_string())?));
    }
    let mut worst = (0.0f64, String::new());
    for (name, model) in &models {
        let cyl = test_cylinders(model.matrix(), 6, 8);
        let rep = verify_conformality(model, &cyl, TOL).map_err(|e| format!("{name}: {e}"))?;
        ensure(rep.max_residual <= TOL, format!("{name}: residual {:.3e} at {:?}", rep.max_residual, rep.worst))?;
        if rep.max_residual >= worst.0 {
            worst = (rep.max_residual, name.clone());
        }
    }
    Ok(format!("{} models, max DU residual {:.2e} ({})", models.len(), worst.0, worst.1))
}

fn c6() -> Check {
    let m = TransitionMatrix::renewal();
    let one = Potential::Constant(1.0);
    let ln2 = 2f64.ln();
    for beta in [ln2, ln2 - 1e-3] {
        let n = normalizer(&m, 1, &one, beta, 1e-12, 200).map_err(|e| e.to_string())?;
        ensure(n == Normalizer::Divergent, format!("β={beta}: expected Divergent, got {n:?}"))?;
    }
    let n = normalizer(&m, 1, &one, ln2 + 1e-3, 1e-12, 200).map_err(|e| e.to_string())?;
    ensure(matches!(n, Normalizer::Finite(_)), format!("β=log 2 + 1e-3: {n:?}"))?;
    let mut max_err = 0.0f64;
    for beta in [ln2 + 1e-3, 1.0, 1.5] {
        let y = y_measure(&m, 1, &one, beta).map_err(|e| e.to_string())?;
        for a in test_cylinders(&m, 6, 7) {
            // C_α = C_{α·(l−1)…1} for α ending in l
            let reduced = a.len() as f64 + a.last().unwrap() as f64 - 1.0;
            max_err = max_err.max((y.cylinder(&a) - (-reduced * beta).exp()).abs());
        }
    }
    ensure(max_err <= 1e-12, format!("μ_β(C_α) deviates from e^(-|α|β) by {max_err:.3e}"))?;
    let target = MeasureModel::Cylinder(sarig_measure_renewal(ln2));
    let basis = cylinder_basis(&m, 5, 6);
    let sweep = weak_star_sweep(
        |b| y_measure(&m, 1, &one, b).map(MeasureModel::YFamily),
        &target,
        &basis,
        &[ln2 + 1e-5],
        1e-10,
    )
    .map_err(|e| e.to_string())?;
    let d = sweep.max_diff[0].1;
    ensure(d <= 1e-4, format!("weak* distance at log 2 + 1e-5 is {d:.3e}"))?;
    Ok(format!("thresholds ok, |μ_β(C_α) − e^(-|α|β)| ≤ {max_err:.1e}, weak* max diff {d:.2e}"))
}

fn c7() -> Check {
    let y = pair_normalization_root().map_err(|e| e.to_string())?;
    let s = 2f64.sqrt() - 1.0;
    ensure((y - s).abs() <= 1e-10, format!("root {y} vs √2−1"))?;
    let mu = pair_renewal_critical_measure();
    let c1 = mu.cylinder(&Word::from_slice(&[1]));
    ensure((c1 - s).abs() <= 1e-12, format!("μ([1]) = {c1}"))?;
    let m = TransitionMatrix::pair_renewal();
    let mut worst = 0.0f64;
    for beta in [0.9, 1.2, 2.0] {
        for fam in [1u64, 2] {
            let y = y_measure(&m, fam, &Potential::Constant(1.0), beta).map_err(|e| e.to_string())?;
            let t = y.total_mass();
            ensure(t.error <= 1e-8, format!("family {fam}, β={beta}: tail bound {:.2e}", t.error))?;
            ensure((t.value - 1.0).abs() <= 1e-8, format!("family {fam}, β={beta}: mass {}", t.value))?;
            worst = worst.max((t.value - 1.0).abs());
        }
    }
    Ok(format!("root error {:.1e}, μ([1]) error {:.1e}, extremal masses within {worst:.1e}", (y - s).abs(), (c1 - s).abs()))
}

fn c8() -> Check {
    let mut worst = 0.0f64;
    for beta in [1.2, 1.5, 1.72, 1.9, 2.5] {
        match thermo::discriminant_log(beta).map_err(|e| e.to_string())? {
            Discriminant::Finite { series, closed_form, .. } => {
                let d = (series - closed_form).abs();
                ensure(d <= 1e-6, format!("β={beta}: |Δ series − closed| = {d:.3e}"))?;
                worst = worst.max(d);
            }
            Discriminant::Divergent => return Err(format!("β={beta}: unexpected divergence")),
        }
    }
    let bc = thermo::critical_beta_log();
    ensure((bc - 1.72865).abs() <= 5e-5, format!("β_c = {bc}"))?;
    let zr = (zeta(bc, 1e-13).map_err(|e| e.to_string())? - 2.0).abs();
    ensure(zr <= 1e-10, format!("|ζ(β_c) − 2| = {zr:.3e}"))?;
    for beta in [1.2, 1.5] {
        let p = thermo::pressure_log_potential(beta).map_err(|e| e.to_string())?;
        let phi = series::phi_beta(beta, p.exp()).map_err(|e| e.to_string())?.value;
        ensure((phi - 1.0).abs() <= 1e-10, format!("β={beta}: Φ_β(e^P) = {phi}"))?;
    }
    for beta in [2.0, 2.5] {
        let model = log_eigenmeasure(beta).map_err(|e| e.to_string())?;
        let MeasureModel::YFamily(y) = &model else {
            return Err(format!("β={beta}: eigenmeasure not on Y_A"));
        };
        let xi = BoundedConfig::empty_stem(&y.matrix, 1).unwrap();
        let mass = y.point_mass(&xi);
        let want = 2.0 - zeta(beta, 1e-13).map_err(|e| e.to_string())?;
        ensure((mass - want).abs() <= 1e-10, format!("β={beta}: m(ξ⁰) = {mass}, 2 − ζ = {want}"))?;
        let t = model.total_mass();
        ensure((t.value - 1.0).abs() <= 1e-8 && t.error <= 1e-8, format!("β={beta}: total mass {t:?}"))?;
    }
    Ok(format!("max |Δ series − log(ζ−1)| = {worst:.1e}, β_c = {bc:.10}, |ζ(β_c)−2| = {zr:.1e}"))
}

fn c9() -> Check {
    let m = TransitionMatrix::renewal();
    let ln2 = 2f64.ln();
    let mut worst = 0.0f64;
    for beta in [0.3, 1.0] {
        for n in 1..=20usize {
            let z = thermo::z_n(&m, &Potential::Constant(-1.0), beta, 1, n, n as Symbol + 1);
            ensure(z.complete, format!("n={n}: cycle enumeration incomplete"))?;
            let lhs = z.value.ln() / n as f64;
            let rhs = ln2 - beta - ln2 / n as f64;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    ensure(worst <= 1e-14, format!("(1/n) log Z_n deviates by {worst:.3e}"))?;
    let mut worst_star = 0.0f64;
    for beta in [0.5, 1.0, 2.0] {
        for n in 1..=14usize {
            let z = thermo::z_n_star(&m, &Potential::LogRatio, beta, 1, n, n as Symbol + 1);
            ensure(z.complete, format!("n={n}: first-return enumeration incomplete"))?;
            let want = ((n + 1) as f64).powf(-beta);
            worst_star = worst_star.max((z.value - want).abs() / want);
        }
    }
    ensure(worst_star <= 1e-14, format!("Z_n^* relative deviation {worst_star:.3e}"))?;
    for beta in [0.0, 0.7] {
        let rep = thermo::superadditivity_check(&m, &Potential::Constant(1.0), beta, 1, 16).map_err(|e| e.to_string())?;
        ensure(rep.counterexample.is_none(), format!("β={beta}: {:?}", rep.counterexample))?;
    }
    Ok(format!("log Z_n identity within {worst:.1e}, Z_n^* within {worst_star:.1e} (relative), superadditive to 16"))
}

fn c10() -> Check {
    let m = TransitionMatrix::renewal();
    let mut stems = Vec::new();
    for len in 1..=4 {
        stems.extend(m.enumerate_words(len, &BTreeSet::from([1]), 5).items);
    }
    let mut checked = 0;
    for stem in &stems {
        let x = BoundedConfig::new(&m, stem.clone(), 1).unwrap();
        for n in 1..=10 {
            let rep = thermo::jn_tn(&m, &x, n, Some(&Potential::LogRatio)).map_err(|e| e.to_string())?;
            ensure(rep.passed(), format!("stem {stem}, n={n}: {rep:?}"))?;
            checked += 1;
        }
        for beta in [0.5, 1.0] {
            for row in thermo::sandwich_check(&m, &Potential::LogRatio, beta, &x, 12).map_err(|e| e.to_string())? {
                ensure(row.holds, format!("stem {stem}, β={beta}: {row:?}"))?;
            }
        }
    }
    Ok(format!("{} stems, {checked} J/T partitions, sandwich n ≤ 12 at β ∈ {{0.5, 1}}", stems.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("counting, renewal", Some(5.0), c1),
        ("counting, pair renewal", Some(10.0), c2),
        ("counting, prime renewal", Some(30.0), c3),
        ("cylinder algebra oracle", Some(60.0), c4),
        ("conformality residuals", None, c5),
        ("phase transition, renewal F≡1", None, c6),
        ("pair renewal", None, c7),
        ("log potential", Some(30.0), c8),
        ("pressure identities, renewal", None, c9),
        ("pointwise pressure apparatus", None, c10),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        let result = match (result, limit) {
            (Ok(d), Some(l)) if secs >= *l => Err(format!("{d}; took {secs:.2}s, limit {l}s")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:6.2}s] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:6.2}s] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
