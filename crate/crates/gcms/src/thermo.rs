//! Potentials depending on the first coordinate, partition functions,
//! Gurevich and pointwise pressure, and the recurrence discriminant of the
//! renewal shift with the log potential.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::config_space::{BoundedConfig, Configuration};
use crate::error::{GcmsError, Result};
use crate::series::{self, Certified};
use crate::shift_space::{MatrixKind, Symbol, TransitionMatrix, Word};

/// `F(x) = f(x_0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Potential {
    Constant(f64),
    /// `f(s) = log s − log(s+1)`
    LogRatio,
    /// `f(s) = g(s) − g(s+1)`; `g` is read from the table and continued
    /// linearly with `slope` past its last key.
    GDiff { g: BTreeMap<Symbol, f64>, slope: f64 },
}

impl Potential {
    pub fn gdiff(g: BTreeMap<Symbol, f64>, slope: f64) -> Result<Self> {
        let max = g.keys().next_back().copied().ok_or_else(|| GcmsError::Domain("empty g table".into()))?;
        if (1..=max).any(|s| !g.contains_key(&s)) {
            return Err(GcmsError::Domain("g table must cover 1..=max".into()));
        }
        Ok(Potential::GDiff { g, slope })
    }

    /// A primitive `g` with `f(s) = g(s) − g(s+1)`.
    pub fn g(&self, s: Symbol) -> f64 {
        match self {
            Potential::Constant(c) => -c * s as f64,
            Potential::LogRatio => (s as f64).ln(),
            Potential::GDiff { g, slope } => {
                let (&max, &gmax) = g.iter().next_back().expect("non-empty table");
                match g.get(&s) {
                    Some(v) => *v,
                    None => gmax + slope * (s - max) as f64,
                }
            }
        }
    }

    pub fn eval(&self, s: Symbol) -> f64 {
        match self {
            Potential::Constant(c) => *c,
            Potential::LogRatio => ((s as f64) / (s as f64 + 1.0)).ln(),
            Potential::GDiff { .. } => self.g(s) - self.g(s + 1),
        }
    }

    /// Supremum over all symbols.
    pub fn sup(&self) -> f64 {
        match self {
            Potential::Constant(c) => *c,
            Potential::LogRatio => 0.0,
            Potential::GDiff { g, slope } => {
                let max = *g.keys().next_back().expect("non-empty table");
                (1..=max).map(|s| self.eval(s)).fold(-slope, f64::max)
            }
        }
    }

    /// Infimum over all symbols.
    pub fn inf(&self) -> f64 {
        match self {
            Potential::Constant(c) => *c,
            // increasing in s
            Potential::LogRatio => -(2f64.ln()),
            Potential::GDiff { g, slope } => {
                let max = *g.keys().next_back().expect("non-empty table");
                (1..=max).map(|s| self.eval(s)).fold(-slope, f64::min)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Potential::Constant(_))
    }
}

/// `β·Σ_{i<|w|} f(w_i)`.
pub fn birkhoff_sum(f: &Potential, beta: f64, w: &Word) -> f64 {
    beta * w.symbols().iter().map(|&s| f.eval(s)).sum::<f64>()
}

/// A partition-function value; `complete` is false when an enumeration was
/// cut by the symbol bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PartitionValue {
    pub value: f64,
    pub complete: bool,
}

/// Neumaier-compensated sum; cycle sums have up to millions of terms.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// `Z_n(βF, [base])` summed over enumerated cycles.
pub fn z_n(m: &TransitionMatrix, f: &Potential, beta: f64, base: Symbol, n: usize, bound: Symbol) -> PartitionValue {
    let cycles = m.enumerate_cycles(n, base, bound);
    let value = compensated_sum(cycles.items.iter().map(|w| birkhoff_sum(f, beta, w).exp()));
    PartitionValue { value, complete: cycles.complete }
}

/// Weighted sum over admissible words of length `n` ending in `last_in`, by
/// first symbol. Every column is finite so no bound is needed.
fn weighted_words(
    m: &TransitionMatrix,
    f: &Potential,
    beta: f64,
    n: usize,
    last_in: &BTreeSet<Symbol>,
    avoid: Option<Symbol>,
) -> BTreeMap<Symbol, f64> {
    let mut cur: BTreeMap<Symbol, f64> =
        last_in.iter().filter(|&&s| Some(s) != avoid).map(|&s| (s, (beta * f.eval(s)).exp())).collect();
    for _ in 1..n {
        let mut next: BTreeMap<Symbol, f64> = BTreeMap::new();
        for (&t, &w) in &cur {
            for p in m.predecessors(t) {
                if Some(p) == avoid {
                    continue;
                }
                *next.entry(p).or_default() += w * (beta * f.eval(p)).exp();
            }
        }
        cur = next;
    }
    cur
}

/// `Z_n(βF, [base])` by dynamic programming over predecessors; always exact.
pub fn z_n_dp(m: &TransitionMatrix, f: &Potential, beta: f64, base: Symbol, n: usize) -> f64 {
    assert!(n >= 1);
    let last_in: BTreeSet<Symbol> = m.predecessors(base).into_iter().collect();
    if n == 1 {
        return if last_in.contains(&base) { (beta * f.eval(base)).exp() } else { 0.0 };
    }
    // words w_1..w_{n-1} with A(base, w_1) = 1
    let tails = weighted_words(m, f, beta, n - 1, &last_in, None);
    let head = (beta * f.eval(base)).exp();
    tails.iter().filter(|(&s, _)| m.allows(base, s)).map(|(_, &w)| head * w).sum()
}

/// `Z_n^*(βF, [base])`: cycles through `base` returning first at time `n`.
pub fn z_n_star(m: &TransitionMatrix, f: &Potential, beta: f64, base: Symbol, n: usize, bound: Symbol) -> PartitionValue {
    let cycles = m.enumerate_cycles(n, base, bound);
    let value = compensated_sum(
        cycles.items.iter().filter(|w| w.symbols()[1..].iter().all(|&s| s != base)).map(|w| birkhoff_sum(f, beta, w).exp()),
    );
    PartitionValue { value, complete: cycles.complete }
}

/// `Z_k^*(βF, [base])` for `k = 1..=k_max` in a single backward pass.
pub fn z_star_series(m: &TransitionMatrix, f: &Potential, beta: f64, base: Symbol, k_max: usize) -> Vec<f64> {
    let head = (beta * f.eval(base)).exp();
    let mut out = Vec::with_capacity(k_max);
    out.push(if m.allows(base, base) { head } else { 0.0 });
    let mut layer: BTreeMap<Symbol, f64> = m
        .predecessors(base)
        .into_iter()
        .filter(|&s| s != base)
        .map(|s| (s, (beta * f.eval(s)).exp()))
        .collect();
    for _ in 2..=k_max {
        out.push(layer.iter().filter(|(&s, _)| m.allows(base, s)).map(|(_, &w)| head * w).sum());
        let mut next: BTreeMap<Symbol, f64> = BTreeMap::new();
        for (&t, &w) in &layer {
            for p in m.predecessors(t) {
                if p != base {
                    *next.entry(p).or_default() += w * (beta * f.eval(p)).exp();
                }
            }
        }
        layer = next;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Certificate {
    Exact,
    Limit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub beta: f64,
    /// `(n, (1/n) log Z_n)`
    pub values: Vec<(usize, f64)>,
    pub extrapolated: f64,
    pub certificate: Certificate,
}

/// Gurevich pressure `P_G(βF)` from `Z_n(βF, [base])`, `n ≤ n_max`.
pub fn gurevich_pressure(m: &TransitionMatrix, f: &Potential, beta: f64, base: Symbol, n_max: usize) -> Result<PressureEstimate> {
    if n_max < 4 {
        return Err(GcmsError::Domain("n_max must be at least 4".into()));
    }
    let logs: Vec<f64> = (1..=n_max).map(|n| z_n_dp(m, f, beta, base, n).ln()).collect();
    let values: Vec<(usize, f64)> = logs.iter().enumerate().map(|(i, l)| (i + 1, l / (i + 1) as f64)).collect();
    let closed = match (m.kind(), f) {
        (MatrixKind::Renewal, Potential::Constant(c)) => Some(2f64.ln() + beta * c),
        (MatrixKind::Renewal, Potential::LogRatio) => Some(pressure_log_potential(beta)?),
        _ => None,
    };
    Ok(match closed {
        Some(p) => PressureEstimate { beta, values, extrapolated: p, certificate: Certificate::Exact },
        None => {
            // the 1/n term cancels in the difference quotient
            let n = n_max;
            let h = n / 2;
            let extrapolated = (logs[n - 1] - logs[h - 1]) / (n - h) as f64;
            PressureEstimate { beta, values, extrapolated, certificate: Certificate::Limit }
        }
    })
}

/// The symbols `s` such that `s·stem(x)` (or `s·x`) is admissible in the same family.
fn point_last_in(m: &TransitionMatrix, x: &Configuration) -> BTreeSet<Symbol> {
    match x.symbol(0) {
        Some(s) => m.predecessors(s).into_iter().collect(),
        None => {
            let root = x.as_bounded().map(|b| b.root()).unwrap_or(0);
            m.column(root).map(|c| c.terminal.clone()).unwrap_or_default()
        }
    }
}

/// `Z_n(βF, x) = Σ_{σ^n y = x} e^{βF_n(y)}`.
pub fn pointwise_z(m: &TransitionMatrix, f: &Potential, beta: f64, x: &Configuration, n: usize) -> f64 {
    assert!(n >= 1);
    weighted_words(m, f, beta, n, &point_last_in(m, x), None).values().sum()
}

/// Same sum by explicit enumeration of preimage words over symbols `≤ bound`.
pub fn pointwise_z_enumerated(m: &TransitionMatrix, f: &Potential, beta: f64, x: &Configuration, n: usize, bound: Symbol) -> PartitionValue {
    let words = m.enumerate_words(n, &point_last_in(m, x), bound);
    PartitionValue {
        value: compensated_sum(words.items.iter().map(|w| birkhoff_sum(f, beta, w).exp())),
        complete: words.complete,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichRow {
    pub n: usize,
    pub z_point: f64,
    pub z_base: f64,
    pub ratio: f64,
    pub upper: f64,
    pub holds: bool,
}

/// `1 < Z_n(βF,x)/Z_n(βF,[1]) ≤ 1 + e^{β[g(x_0+1) − g(1) + x_0 sup F]}` on the renewal shift.
pub fn sandwich_check(m: &TransitionMatrix, f: &Potential, beta: f64, x: &BoundedConfig, n_max: usize) -> Result<Vec<SandwichRow>> {
    if !matches!(m.kind(), MatrixKind::Renewal) {
        return Err(GcmsError::Unsupported("the sandwich bound is stated for the renewal shift".into()));
    }
    let x0 = x.stem().first().ok_or(GcmsError::EmptyStem)?;
    let upper = 1.0 + (beta * (f.g(x0 + 1) - f.g(1) + x0 as f64 * f.sup())).exp();
    let xc = Configuration::from(x.clone());
    Ok((1..=n_max)
        .map(|n| {
            let z_point = pointwise_z(m, f, beta, &xc, n);
            let z_base = z_n_dp(m, f, beta, 1, n);
            let ratio = z_point / z_base;
            SandwichRow { n, z_point, z_base, ratio, upper, holds: ratio > 1.0 && ratio <= upper * (1.0 + 1e-12) }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JnTnReport {
    pub n: usize,
    pub stem: String,
    pub w_n_1: usize,
    pub j_image: usize,
    pub t_image: usize,
    pub target: usize,
    pub injective: bool,
    pub disjoint: bool,
    pub covers: bool,
    /// Largest residual of the Birkhoff transport identity, if a potential was given.
    pub transport_residual: Option<f64>,
}

impl JnTnReport {
    pub fn passed(&self) -> bool {
        self.injective && self.disjoint && self.covers && self.transport_residual.is_none_or(|r| r < 1e-12)
    }
}

/// `T_n(α) = σ^{α_0}(α)(x_0+α_0)…(x_0+1)x`.
fn t_map(alpha: &Word, x: &Word) -> Word {
    let a0 = alpha.first().expect("non-empty") as usize;
    let x0 = x.first().expect("non-empty stem");
    let mut v: Vec<Symbol> = alpha.symbols()[a0.min(alpha.len())..].to_vec();
    v.extend((1..=a0 as Symbol).rev().map(|i| x0 + i));
    v.extend_from_slice(x.symbols());
    Word::from_slice(&v)
}

/// Checks `J_n(W_n^1) ⊔ T_n(W_n^1) = W_{n+|x|}^x` on the renewal shift, where
/// `W_k^γ` are the admissible words of length `k` ending with `γ`.
pub fn jn_tn(m: &TransitionMatrix, x: &BoundedConfig, n: usize, f: Option<&Potential>) -> Result<JnTnReport> {
    if !matches!(m.kind(), MatrixKind::Renewal) {
        return Err(GcmsError::Unsupported("J_n/T_n are defined for the renewal shift".into()));
    }
    let stem = x.stem();
    let x0 = stem.first().ok_or(GcmsError::EmptyStem)?;
    let bound = x0 + n as Symbol + 1;
    let w1 = m.enumerate_words(n, &[1].into(), bound);
    let j: BTreeSet<Word> = w1.items.iter().map(|a| a.concat(stem)).collect();
    let t: BTreeSet<Word> = w1.items.iter().map(|a| t_map(a, stem)).collect();
    let target_words = m.enumerate_words(n, &m.predecessors(x0).into_iter().collect(), bound);
    let target: BTreeSet<Word> = target_words.items.iter().map(|a| a.concat(stem)).collect();
    let union: BTreeSet<Word> = j.union(&t).cloned().collect();
    let admissible = union.iter().all(|w| m.is_admissible(w));
    let transport_residual = match f {
        Some(f) if n >= 2 => Some(
            w1.items
                .iter()
                .map(|a| {
                    let a0 = a.first().unwrap();
                    let lhs = birkhoff_sum(f, 1.0, &t_map(a, stem).prefix(n));
                    let rhs = birkhoff_sum(f, 1.0, a) + f.g(x0 + 1) - f.g(x0 + a0 + 1) + f.g(a0 + 1) - f.g(1);
                    (lhs - rhs).abs()
                })
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    Ok(JnTnReport {
        n,
        stem: stem.to_string(),
        w_n_1: w1.items.len(),
        j_image: j.len(),
        t_image: t.len(),
        target: target.len(),
        injective: j.len() == w1.items.len() && t.len() == w1.items.len(),
        disjoint: j.is_disjoint(&t),
        covers: admissible && union == target && target_words.complete && w1.complete,
        transport_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperadditivityReport {
    pub pairs_checked: usize,
    /// `(n, m, Z_n Z_m, Z_{n+m})`
    pub counterexample: Option<(usize, usize, f64, f64)>,
}

/// `Z_n Z_m ≤ Z_{n+m}` for all `n + m ≤ n_max`; constant potentials only.
pub fn superadditivity_check(m: &TransitionMatrix, f: &Potential, beta: f64, base: Symbol, n_max: usize) -> Result<SuperadditivityReport> {
    if !f.is_constant() {
        return Err(GcmsError::Domain("superadditivity is checked for constant potentials".into()));
    }
    let z: Vec<f64> = (0..=n_max).map(|n| if n == 0 { 1.0 } else { z_n_dp(m, f, beta, base, n) }).collect();
    let mut pairs_checked = 0;
    for total in 2..=n_max {
        for a in 1..total {
            let b = total - a;
            pairs_checked += 1;
            let lhs = z[a] * z[b];
            if lhs > z[total] * (1.0 + 1e-12) {
                return Ok(SuperadditivityReport { pairs_checked, counterexample: Some((a, b, lhs, z[total])) });
            }
        }
    }
    Ok(SuperadditivityReport { pairs_checked, counterexample: None })
}

/// `β_c` with `ζ(β_c) = 2`.
pub fn critical_beta_log() -> f64 {
    series::bisect(|b| series::zeta(b, 1e-13).expect("inside the bracket") - 2.0, 1.1, 3.0, 1e-15)
        .expect("ζ − 2 changes sign on [1.1, 3]")
}

/// `P_G(βF)` for the renewal shift and `F = log x_0 − log(x_0+1)`.
pub fn pressure_log_potential(beta: f64) -> Result<f64> {
    Ok(log_lambda(beta)?.ln())
}

/// The `λ ≥ 1` with `Φ_β(λ) = 1`, or 1 when `β ≥ β_c`.
pub fn log_lambda(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(GcmsError::Domain(format!("β must be positive, got {beta}")));
    }
    if beta > 1.0 && series::zeta(beta, 1e-12)? <= 2.0 {
        return Ok(1.0);
    }
    // λ ≤ e^{log 2 + β sup F} = 2
    series::bisect(|l| if series::phi_exceeds_one(beta, l) { 1.0 } else { -1.0 }, 1.0 + 1e-12, 2.0, 1e-16)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Discriminant {
    /// `Δ = +∞`
    Divergent,
    Finite {
        series: f64,
        closed_form: f64,
        /// Estimate of `lim Z_n^*/Z_{n+1}^*`.
        ratio: f64,
        error: f64,
    },
}

/// `Δ_1[βF] = log Σ_k R^k Z_k^*(βF,[1])` for the renewal log potential,
/// computed from the first-return sums and compared with `log(ζ(β) − 1)`.
pub fn discriminant_log(beta: f64) -> Result<Discriminant> {
    if !(beta > 0.0) {
        return Err(GcmsError::Domain(format!("β must be positive, got {beta}")));
    }
    if beta <= 1.0 {
        return Ok(Discriminant::Divergent);
    }
    let m = TransitionMatrix::renewal();
    let f = Potential::LogRatio;
    let k_max = 4096;
    let mut zs: Vec<f64> = (1..=14).map(|k| z_n_star(&m, &f, beta, 1, k, k as Symbol + 1).value).collect();
    // past the enumeration range the only first-return cycle is 1, k, k−1, …, 2
    for k in 15..=k_max {
        let mut w = vec![1];
        w.extend((2..=k as Symbol).rev());
        zs.push(birkhoff_sum(&f, beta, &Word::from_slice(&w)).exp());
    }
    let r = |k: usize| zs[k - 1] / zs[k];
    // ratios are R + c/k + d/k² + …; k²·r_k is then nearly quadratic in k
    // and R is its second divided difference
    let pts = [k_max / 4 - 1, k_max / 2 - 1, k_max - 1];
    let y = |k: usize| (k * k) as f64 * r(k);
    let (a, b, c) = (pts[0], pts[1], pts[2]);
    let d1 = (y(b) - y(a)) / (b - a) as f64;
    let d2 = (y(c) - y(b)) / (c - b) as f64;
    let mut ratio = (d2 - d1) / (c - a) as f64;
    if (ratio - 1.0).abs() < 1e-8 {
        ratio = 1.0;
    }
    if ratio != 1.0 {
        return Err(GcmsError::Domain(format!("ratio estimate {ratio} is not 1")));
    }
    let head: f64 = zs.iter().rev().sum();
    // Σ_{k > k_max} (k+1)^{-β}
    let tail = series::power_tail(beta, 1.0, k_max as u64 + 1);
    let total = head + tail.value;
    let closed_form = (series::zeta(beta, 1e-12)? - 1.0).ln();
    Ok(Discriminant::Finite { series: total.ln(), closed_form, ratio, error: (tail.error + 1e-15 * total) / total })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum RecurrenceVerdict {
    PositiveRecurrent { delta: f64 },
    NullRecurrentOrBoundary { delta: f64 },
    Transient { delta: f64 },
}

pub fn classify_recurrence_log(beta: f64) -> Result<RecurrenceVerdict> {
    const TOL: f64 = 1e-8;
    Ok(match discriminant_log(beta)? {
        Discriminant::Divergent => RecurrenceVerdict::PositiveRecurrent { delta: f64::INFINITY },
        Discriminant::Finite { series: d, .. } if d > TOL => RecurrenceVerdict::PositiveRecurrent { delta: d },
        Discriminant::Finite { series: d, .. } if d < -TOL => RecurrenceVerdict::Transient { delta: d },
        Discriminant::Finite { series: d, .. } => RecurrenceVerdict::NullRecurrentOrBoundary { delta: d },
    })
}

/// `Φ_β(λ)` at the solved `λ`, as a residual check.
pub fn log_pressure_residual(beta: f64) -> Result<Certified> {
    let lambda = log_lambda(beta)?;
    let phi = series::phi_beta(beta, lambda)?;
    Ok(Certified { value: phi.value - 1.0, error: phi.error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn birkhoff_examples() {
        let w = word("1.4.3.2");
        assert!((birkhoff_sum(&Potential::LogRatio, 1.0, &w) + 5f64.ln()).abs() < 1e-14);
        assert_eq!(birkhoff_sum(&Potential::Constant(1.0), 2.0, &word("1.1.1")), 6.0);
        assert!((birkhoff_sum(&Potential::LogRatio, 1.0, &word("1")) - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn partition_function_examples() {
        let m = TransitionMatrix::renewal();
        let beta = 0.7;
        let z = z_n(&m, &Potential::Constant(-1.0), beta, 1, 5, 6);
        assert!(z.complete);
        assert!((z.value - 16.0 * (-5.0 * beta).exp()).abs() < 1e-14);
        assert_eq!(z_n(&m, &Potential::LogRatio, 0.0, 1, 3, 4).value, 4.0);
        let z2 = z_n(&m, &Potential::LogRatio, 1.0, 1, 2, 3).value;
        assert!((z2 - (0.25 + 1.0 / 3.0)).abs() < 1e-15);
        for n in 1..=8 {
            let a = z_n(&m, &Potential::LogRatio, 1.3, 1, n, n as Symbol + 1).value;
            let b = z_n_dp(&m, &Potential::LogRatio, 1.3, 1, n);
            assert!((a - b).abs() < 1e-13 * a);
        }
    }

    #[test]
    fn first_return_examples() {
        let m = TransitionMatrix::renewal();
        assert!((z_n_star(&m, &Potential::LogRatio, 2.0, 1, 3, 4).value - 1.0 / 16.0).abs() < 1e-16);
        let beta = 0.4;
        assert!((z_n_star(&m, &Potential::Constant(-1.0), beta, 1, 4, 5).value - (-4.0 * beta).exp()).abs() < 1e-15);
        assert!((z_n_star(&m, &Potential::LogRatio, 1.0, 1, 1, 2).value - 0.5).abs() < 1e-16);
        let series = z_star_series(&m, &Potential::LogRatio, 1.5, 1, 20);
        for (k, z) in series.iter().enumerate() {
            assert!((z - ((k + 2) as f64).powf(-1.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn pressure_examples() {
        let m = TransitionMatrix::renewal();
        let p = gurevich_pressure(&m, &Potential::Constant(-1.0), 0.3, 1, 10).unwrap();
        assert_eq!(p.certificate, Certificate::Exact);
        assert!((p.extrapolated - (2f64.ln() - 0.3)).abs() < 1e-15);
        let q = gurevich_pressure(&m, &Potential::LogRatio, 2.0, 1, 10).unwrap();
        assert_eq!(q.extrapolated, 0.0);
        let pm = TransitionMatrix::pair_renewal();
        let r = gurevich_pressure(&pm, &Potential::LogRatio, 0.5, 1, 40).unwrap();
        assert_eq!(r.certificate, Certificate::Limit);
        assert!(r.extrapolated <= 2f64.ln() + 0.5 * Potential::LogRatio.sup() + 0.3);
    }

    #[test]
    fn critical_beta_and_lambda() {
        let bc = critical_beta_log();
        assert!((bc - 1.728_647_238_998_183_6).abs() < 1e-12);
        assert!((series::zeta(bc, 1e-12).unwrap() - 2.0).abs() < 1e-10);
        for (beta, lam) in [(1.2, 1.160_122_574), (1.5, 1.049_019_117), (1.7, 1.002_637_2)] {
            assert!((log_lambda(beta).unwrap() - lam).abs() < 1e-7, "β={beta}");
        }
        assert!(log_pressure_residual(1.0).unwrap().value.abs() < 1e-10);
        assert_eq!(pressure_log_potential(2.0).unwrap(), 0.0);
        assert!(pressure_log_potential(bc - 1e-4).unwrap() <= 1e-2);
    }

    #[test]
    fn discriminant_examples() {
        let bc = critical_beta_log();
        match discriminant_log(1.5).unwrap() {
            Discriminant::Finite { series, closed_form, .. } => {
                assert!(series > 0.0);
                assert!((series - closed_form).abs() < 1e-9);
            }
            _ => panic!(),
        }
        assert!(matches!(discriminant_log(1.0).unwrap(), Discriminant::Divergent));
        assert!(matches!(classify_recurrence_log(1.2).unwrap(), RecurrenceVerdict::PositiveRecurrent { .. }));
        assert!(matches!(classify_recurrence_log(2.5).unwrap(), RecurrenceVerdict::Transient { .. }));
        assert!(matches!(classify_recurrence_log(bc).unwrap(), RecurrenceVerdict::NullRecurrentOrBoundary { .. }));
    }

    #[test]
    fn jn_tn_small_cases() {
        let m = TransitionMatrix::renewal();
        let x = BoundedConfig::new(&m, word("1"), 1).unwrap();
        let r = jn_tn(&m, &x, 2, Some(&Potential::LogRatio)).unwrap();
        assert_eq!((r.j_image, r.t_image, r.target), (2, 2, 4));
        assert!(r.passed());
        let r1 = jn_tn(&m, &x, 1, None).unwrap();
        assert_eq!((r1.w_n_1, r1.j_image, r1.t_image), (1, 1, 1));
        assert!(r1.passed());
    }

    #[test]
    fn superadditivity_examples() {
        let m = TransitionMatrix::renewal();
        let rep = superadditivity_check(&m, &Potential::Constant(1.0), 0.0, 1, 6).unwrap();
        assert!(rep.counterexample.is_none());
        assert!(superadditivity_check(&m, &Potential::LogRatio, 1.0, 1, 6).is_err());
    }
}
