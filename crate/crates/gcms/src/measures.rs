//! Conformal and eigen-measures on `X_A`: Y-family measures built from stem
//! coefficients, Σ_A measures given by cylinder values, their evaluation on
//! normal-form sets, and the DU conformality check.
//!
//! Convention: a measure is `(λ, φ)`-conformal when
//! `μ(σ C_α) = λ e^{−φ(α_0)} μ(C_α)` on special cylinders. The per-symbol
//! weight is `ρ(s) = e^{φ(s)}/λ`, so `μ(C_α) = ρ(α_0) μ(C_{σα})`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::config_space::BoundedConfig;
use crate::cylinder_algebra::{decompose, points_with_stem, CylFamily, Members, SetExpr, SubbasisElem};
use crate::error::{GcmsError, Result};
use crate::series::{self, Certified, Parity};
use crate::shift_space::{MatrixKind, Symbol, TransitionMatrix, Word};
use crate::thermo::{self, Potential};

/// A chain sum at or above `1 − DIVERGENCE_MARGIN` counts as divergent.
const DIVERGENCE_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// `φ = −βF`: the `e^{βF}`-conformal measures of the DU condition.
    DuConformal,
    /// `φ = +βF`: eigenmeasures of the Ruelle operator of `βF`.
    Eigen,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weighting {
    pub potential: Potential,
    pub beta: f64,
    pub lambda: f64,
    pub orientation: Orientation,
}

impl Weighting {
    pub fn du(potential: Potential, beta: f64) -> Self {
        Weighting { potential, beta, lambda: 1.0, orientation: Orientation::DuConformal }
    }

    pub fn eigen(potential: Potential, beta: f64, lambda: f64) -> Self {
        Weighting { potential, beta, lambda, orientation: Orientation::Eigen }
    }

    fn sign(&self) -> f64 {
        match self.orientation {
            Orientation::DuConformal => -1.0,
            Orientation::Eigen => 1.0,
        }
    }

    pub fn phi(&self, s: Symbol) -> f64 {
        self.sign() * self.beta * self.potential.eval(s)
    }

    pub fn rho(&self, s: Symbol) -> f64 {
        self.phi(s).exp() / self.lambda
    }

    /// `Π_{i<|w|} ρ(w_i)`.
    pub fn weight(&self, w: &Word) -> f64 {
        w.symbols().iter().map(|&s| self.rho(s)).product()
    }

    /// `Π_{i=a}^{b} ρ(i)`, telescoped through `g`; 1 when `b < a`.
    pub fn chain_product(&self, a: Symbol, b: Symbol) -> f64 {
        if b < a {
            return 1.0;
        }
        let f = &self.potential;
        let len = (b - a + 1) as f64;
        (self.sign() * self.beta * (f.g(a) - f.g(b + 1)) - len * self.lambda.ln()).exp()
    }

    /// `Σ_{k ≥ a, parity} Π_{i=a}^{k} ρ(i)`, or `None` when it diverges.
    pub fn chain_sum(&self, a: Symbol, parity: Parity) -> Result<Option<Certified>> {
        let first_with = |k: Symbol| if parity.admits(k) { k } else { k + 1 };
        let geometric = |start: Symbol, p_start: f64, q: f64| -> Option<f64> {
            if q >= 1.0 {
                return None;
            }
            Some(match parity {
                Parity::All => p_start / (1.0 - q),
                _ => {
                    let k0 = first_with(start);
                    p_start * q.powi((k0 - start) as i32) / (1.0 - q * q)
                }
            })
        };
        match &self.potential {
            Potential::Constant(_) => {
                let q = self.rho(1);
                Ok(geometric(a, q, q).map(Certified::exact))
            }
            Potential::LogRatio => {
                let s = self.sign() * self.beta;
                let r = 1.0 / self.lambda;
                if r > 1.0 || (r == 1.0 && s <= 1.0) {
                    return Ok(None);
                }
                // Π_{i=a}^{k} ρ(i) = λ^{a}·a^{s}·λ^{-(k+1)}(k+1)^{-s}; the parity of k+1 flips
                let flipped = match parity {
                    Parity::All => Parity::All,
                    Parity::Even => Parity::Odd,
                    Parity::Odd => Parity::Even,
                };
                let p = series::powsum(s, r, a + 1, flipped)?;
                let scale = (a as f64 * self.lambda.ln() + s * (a as f64).ln()).exp();
                Ok(Some(Certified { value: scale * p.value, error: scale * p.error }))
            }
            Potential::GDiff { g, slope } => {
                let k_table = *g.keys().next_back().expect("non-empty table");
                let mut sum = 0.0;
                let mut k = a;
                while k < k_table {
                    if parity.admits(k) {
                        sum += self.chain_product(a, k);
                    }
                    k += 1;
                }
                let q = (-self.sign() * self.beta * slope).exp() / self.lambda;
                Ok(geometric(k, self.chain_product(a, k), q).map(|t| Certified { value: sum + t, error: 1e-15 * (sum + t) }))
            }
        }
    }
}

/// Outcome of summing stem coefficients `1 + Σ_ω e^{φ_{|ω|}(ω)}λ^{-|ω|}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Normalizer {
    Finite(Certified),
    Divergent,
    Inconclusive { partial: f64, tail: f64 },
}

/// `T(s)`: weighted sum over words `v` with `s·v` a stem tail in the family,
/// the weight of `s` itself excluded.
#[derive(Clone, Debug, PartialEq, Serialize)]
enum TValues {
    /// `T(s) = Π_{i<s} ρ(i)·T(1)`
    Renewal { t1: f64 },
    /// `T(s) = Π_{i=2}^{s−1} ρ(i)·T(2)` for `s ≥ 3`
    Pair { t1: f64, t2: f64 },
    Table { t: BTreeMap<Symbol, f64> },
}

/// Stem weights by length: `W_n = Σ_{|ω| = n} Π ρ(ω_i)`, with the per-first-symbol split.
struct StemSeries {
    totals: Vec<f64>,
    t: BTreeMap<Symbol, f64>,
    /// Estimated `lim W_{n+1}/W_n` from the last five lengths, if any.
    ratio: Option<f64>,
    /// Twice the geometric tail `W_n r/(1−r)`.
    tail: f64,
}

fn stem_series(m: &TransitionMatrix, family: u64, w: &Weighting, cap: usize, stop_below: f64) -> Result<StemSeries> {
    let col = m.column(family).ok_or_else(|| GcmsError::RootNotInCatalog(family.to_string()))?;
    let mut layer: BTreeMap<Symbol, f64> =
        col.terminal.intersection(&col.support).map(|&s| (s, w.rho(s))).collect();
    let mut totals = Vec::new();
    let mut t: BTreeMap<Symbol, f64> = BTreeMap::new();
    let mut ratio = None;
    let mut tail = f64::INFINITY;
    for n in 1..=cap {
        let total: f64 = layer.values().sum();
        totals.push(total);
        for (&s, &v) in &layer {
            *t.entry(s).or_default() += v / w.rho(s);
        }
        if total == 0.0 {
            ratio = Some(0.0);
            tail = 0.0;
            break;
        }
        if n >= 6 {
            let r = totals[n - 6..].windows(2).map(|p| p[1] / p[0]).fold(0.0, f64::max);
            ratio = Some(r);
            tail = if r < 1.0 { 2.0 * total * r / (1.0 - r) } else { f64::INFINITY };
            if tail <= stop_below {
                break;
            }
        }
        let mut next: BTreeMap<Symbol, f64> = BTreeMap::new();
        for (&s, &v) in &layer {
            for p in m.predecessors(s) {
                *next.entry(p).or_default() += v * w.rho(p);
            }
        }
        layer = next;
    }
    Ok(StemSeries { totals, t, ratio, tail })
}

fn solve_tails(m: &TransitionMatrix, family: u64, w: &Weighting, tail_tol: f64, length_cap: usize) -> Result<(Normalizer, Option<TValues>)> {
    let col = m.column(family).ok_or_else(|| GcmsError::RootNotInCatalog(family.to_string()))?;
    match m.kind() {
        MatrixKind::Renewal => {
            let lam = match w.chain_sum(1, Parity::All)? {
                Some(l) if l.value < 1.0 - DIVERGENCE_MARGIN => l,
                _ => return Ok((Normalizer::Divergent, None)),
            };
            let t1 = 1.0 / (1.0 - lam.value);
            let err = lam.error * t1 * t1;
            Ok((Normalizer::Finite(Certified { value: t1, error: err }), Some(TValues::Renewal { t1 })))
        }
        MatrixKind::PairRenewal => {
            let t1 = if col.terminal.contains(&1) { 1.0 } else { 0.0 };
            let t2 = if col.terminal.contains(&2) { 1.0 } else { 0.0 };
            let r1 = w.rho(1);
            let (s_all, s_even) = match (w.chain_sum(2, Parity::All)?, w.chain_sum(2, Parity::Even)?) {
                (Some(a), Some(e)) => (a, e),
                _ => return Ok((Normalizer::Divergent, None)),
            };
            // (1−ρ1)T1 − S_all·T2 = t1,  −ρ1·T1 + (1−S_even)T2 = t2
            let det = (1.0 - r1) * (1.0 - s_even.value) - r1 * s_all.value;
            if 1.0 - r1 <= DIVERGENCE_MARGIN || 1.0 - s_even.value <= DIVERGENCE_MARGIN || det <= DIVERGENCE_MARGIN {
                return Ok((Normalizer::Divergent, None));
            }
            let big_t1 = (t1 * (1.0 - s_even.value) + s_all.value * t2) / det;
            let big_t2 = ((1.0 - r1) * t2 + r1 * t1) / det;
            let n = 1.0 + big_t1 - t1;
            let err = (s_all.error + s_even.error) * n * n / det;
            Ok((Normalizer::Finite(Certified { value: n, error: err }), Some(TValues::Pair { t1: big_t1, t2: big_t2 })))
        }
        _ => {
            let st = stem_series(m, family, w, length_cap, tail_tol * 1e-3)?;
            let partial = 1.0 + st.totals.iter().sum::<f64>();
            match st.ratio {
                Some(r) if r >= 1.0 => Ok((Normalizer::Divergent, None)),
                Some(_) if st.tail <= tail_tol * partial => {
                    let t = st.t.into_iter().collect();
                    Ok((Normalizer::Finite(Certified { value: partial + st.tail / 2.0, error: st.tail }), Some(TValues::Table { t })))
                }
                _ => Ok((Normalizer::Inconclusive { partial, tail: st.tail }, None)),
            }
        }
    }
}

/// Normalizer of a Y family with an arbitrary weighting.
pub fn normalizer_with(m: &TransitionMatrix, family: u64, w: &Weighting, tail_tol: f64, length_cap: usize) -> Result<Normalizer> {
    Ok(solve_tails(m, family, w, tail_tol, length_cap)?.0)
}

/// `1 + Σ_{ω ≠ e} e^{−βF_{|ω|}(ω)}` over the stems of a family.
pub fn normalizer(m: &TransitionMatrix, family: u64, f: &Potential, beta: f64, tail_tol: f64, length_cap: usize) -> Result<Normalizer> {
    if !(beta > 0.0) {
        return Err(GcmsError::Domain(format!("β must be positive, got {beta}")));
    }
    normalizer_with(m, family, &Weighting::du(f.clone(), beta), tail_tol, length_cap)
}

/// The conformal probability carried by one Y family.
#[derive(Clone, Debug, Serialize)]
pub struct YFamilyMeasure {
    #[serde(skip)]
    pub matrix: TransitionMatrix,
    pub family: u64,
    pub weighting: Weighting,
    pub c_e: f64,
    pub normalizer_value: f64,
    pub tail_tol: f64,
    t: TValues,
    #[serde(skip)]
    total: OnceLock<Certified>,
}

pub fn y_measure_with(m: &TransitionMatrix, family: u64, w: Weighting, tail_tol: f64, length_cap: usize) -> Result<YFamilyMeasure> {
    let (norm, t) = solve_tails(m, family, &w, tail_tol, length_cap)?;
    match (norm, t) {
        (Normalizer::Finite(n), Some(t)) => Ok(YFamilyMeasure {
            matrix: m.clone(),
            family,
            c_e: 1.0 / n.value,
            normalizer_value: n.value,
            weighting: w,
            tail_tol,
            t,
            total: OnceLock::new(),
        }),
        (Normalizer::Divergent, _) => Err(GcmsError::Divergent(format!(
            "no conformal probability on family {family} at β = {}",
            w.beta
        ))),
        _ => Err(GcmsError::Inconclusive(format!("normalizer of family {family} at β = {} not certified", w.beta))),
    }
}

/// The `e^{βF}`-conformal probability on one Y family.
pub fn y_measure(m: &TransitionMatrix, family: u64, f: &Potential, beta: f64) -> Result<YFamilyMeasure> {
    y_measure_with(m, family, Weighting::du(f.clone(), beta), 1e-12, 2000)
}

impl YFamilyMeasure {
    fn t_value(&self, s: Symbol) -> f64 {
        match &self.t {
            TValues::Renewal { t1 } => self.weighting.chain_product(1, s - 1) * t1,
            TValues::Pair { t1, t2 } => match s {
                1 => *t1,
                2 => *t2,
                _ => self.weighting.chain_product(2, s - 1) * t2,
            },
            TValues::Table { t } => t.get(&s).copied().unwrap_or(0.0),
        }
    }

    /// `c_ω = c_e·Π ρ(ω_i)`.
    pub fn coefficient(&self, stem: &Word) -> f64 {
        self.c_e * self.weighting.weight(stem)
    }

    pub fn point_mass(&self, c: &BoundedConfig) -> f64 {
        if c.root() == self.family {
            self.coefficient(c.stem())
        } else {
            0.0
        }
    }

    pub fn cylinder(&self, w: &Word) -> f64 {
        match w.last() {
            None => self.total_mass().value,
            Some(_) if !self.matrix.is_admissible(w) => 0.0,
            Some(s) => self.coefficient(w) * self.t_value(s),
        }
    }

    /// Total mass from the stem-length series, independent of the `T` system
    /// when the series is geometric; otherwise (renewal) `c_e + Σ_n μ(C_n)`.
    pub fn total_mass(&self) -> Certified {
        *self.total.get_or_init(|| {
            let st = stem_series(&self.matrix, self.family, &self.weighting, 1500, 1e-14);
            if let Ok(st) = &st {
                if st.tail <= 1e-12 {
                    let n = 1.0 + st.totals.iter().sum::<f64>();
                    return Certified { value: self.c_e * n, error: self.c_e * st.tail + 1e-15 };
                }
            }
            if let (MatrixKind::Renewal, TValues::Renewal { t1 }) = (self.matrix.kind(), &self.t) {
                let k_max: Symbol = 256;
                let head: f64 = (1..=k_max).rev().map(|k| self.cylinder(&Word::from_slice(&[k]))).sum();
                if let Ok(Some(tail)) = self.weighting.chain_sum(k_max + 1, Parity::All) {
                    let scale = self.c_e * t1 * self.weighting.chain_product(1, k_max);
                    return Certified { value: self.c_e + head + scale * tail.value, error: scale * tail.error + 1e-15 };
                }
            }
            match st {
                Ok(st) => Certified { value: self.c_e * (1.0 + st.totals.iter().sum::<f64>()), error: self.c_e * st.tail },
                Err(_) => Certified { value: f64::NAN, error: f64::INFINITY },
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CylinderKind {
    SarigRenewalConst,
    PairRenewalCritical,
    LogEigenSigma,
}

/// Values of the length-one cylinders `[n]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Base {
    /// `first[n−1]` for `n ≤ first.len()`, then geometric with `ratio`.
    Geometric { first: Vec<f64>, ratio: f64 },
    /// `λ^{−n}(n+1)^{−β}`
    LogEigen { lambda: f64, beta: f64 },
}

impl Base {
    pub fn value(&self, n: Symbol) -> f64 {
        match self {
            Base::Geometric { first, ratio } => {
                let k = first.len() as Symbol;
                if n <= k {
                    first[n as usize - 1]
                } else {
                    first[first.len() - 1] * ratio.powf((n - k) as f64)
                }
            }
            Base::LogEigen { lambda, beta } => (-(n as f64) * lambda.ln() - beta * ((n + 1) as f64).ln()).exp(),
        }
    }

    fn total(&self) -> Result<Certified> {
        match self {
            Base::Geometric { first, ratio } => {
                let head: f64 = first.iter().sum();
                Ok(Certified { value: head + first[first.len() - 1] * ratio / (1.0 - ratio), error: 1e-15 })
            }
            Base::LogEigen { lambda, beta } => series::phi_beta(*beta, *lambda),
        }
    }
}

/// A measure on `Σ_A` given by its cylinder values.
#[derive(Clone, Debug, Serialize)]
pub struct CylinderMeasure {
    pub kind: CylinderKind,
    #[serde(skip)]
    pub matrix: TransitionMatrix,
    pub weighting: Weighting,
    pub base: Base,
}

impl CylinderMeasure {
    /// `μ([α]) = λ^{−1}e^{φ(α_0)} μ([σα])`, peeled down to a length-one cylinder.
    pub fn cylinder(&self, w: &Word) -> f64 {
        match w.last() {
            None => self.total_mass().value,
            Some(_) if !self.matrix.is_admissible(w) => 0.0,
            Some(last) => {
                let head = &w.symbols()[..w.len() - 1];
                head.iter().map(|&s| self.weighting.rho(s)).product::<f64>() * self.base.value(last)
            }
        }
    }

    pub fn total_mass(&self) -> Certified {
        self.base.total().unwrap_or(Certified { value: f64::NAN, error: f64::INFINITY })
    }

    pub fn base_values(&self, up_to: Symbol) -> BTreeMap<Symbol, f64> {
        (1..=up_to).map(|n| (n, self.base.value(n))).collect()
    }
}

pub fn extend_by_conformality(m: &CylinderMeasure, alpha: &Word) -> f64 {
    m.cylinder(alpha)
}

/// `ν([α]) = 2^{−|α|}` for α ending in 1, the eigenmeasure of the renewal
/// shift with `F ≡ 1` and eigenvalue `2e^{−β}`.
pub fn sarig_measure_renewal(beta: f64) -> CylinderMeasure {
    CylinderMeasure {
        kind: CylinderKind::SarigRenewalConst,
        matrix: TransitionMatrix::renewal(),
        weighting: Weighting { lambda: 2.0 * (-beta).exp(), ..Weighting::du(Potential::Constant(1.0), beta) },
        base: Base::Geometric { first: vec![0.5], ratio: 0.5 },
    }
}

/// `log(1+√2)`
pub fn pair_renewal_critical_beta() -> f64 {
    (1.0 + 2f64.sqrt()).ln()
}

/// The `e^{β}`-conformal probability on `Σ_A` of the pair renewal shift at its critical β.
pub fn pair_renewal_critical_measure() -> CylinderMeasure {
    let beta = pair_renewal_critical_beta();
    let y = (-beta).exp();
    let mu2 = y * (1.0 - (-2.0 * beta).exp()) / (2.0 * beta.sinh() - 1.0);
    CylinderMeasure {
        kind: CylinderKind::PairRenewalCritical,
        matrix: TransitionMatrix::pair_renewal(),
        weighting: Weighting::du(Potential::Constant(1.0), beta),
        base: Base::Geometric { first: vec![y, mu2], ratio: y },
    }
}

/// Solves the pair-renewal normalization `y + μ_2/(1−y) = 1` with
/// `μ_2 = y/(1/y − 1/(1−y²))` for `y = e^{−β}`.
pub fn pair_normalization_root() -> Result<f64> {
    let mass = |y: f64| {
        let mu2 = y / (1.0 / y - 1.0 / (1.0 - y * y));
        y + mu2 / (1.0 - y) - 1.0
    };
    series::bisect(mass, 0.05, 0.6, 1e-16)
}

/// The eigenmeasure of the renewal log potential on `Σ_A` (`β ≤ β_c`).
pub fn log_sigma_measure(beta: f64) -> Result<CylinderMeasure> {
    let lambda = thermo::log_lambda(beta)?;
    Ok(CylinderMeasure {
        kind: CylinderKind::LogEigenSigma,
        matrix: TransitionMatrix::renewal(),
        weighting: Weighting::eigen(Potential::LogRatio, beta, lambda),
        base: Base::LogEigen { lambda, beta },
    })
}

#[derive(Clone, Debug, Serialize)]
pub enum MeasureModel {
    YFamily(YFamilyMeasure),
    Cylinder(CylinderMeasure),
    Convex(Vec<(f64, MeasureModel)>),
}

/// The unique eigenmeasure of the renewal log potential: on `Y_A` above `β_c`,
/// on `Σ_A` at and below it.
pub fn log_eigenmeasure(beta: f64) -> Result<MeasureModel> {
    if !(beta > 0.0) {
        return Err(GcmsError::Domain(format!("β must be positive, got {beta}")));
    }
    let m = TransitionMatrix::renewal();
    match y_measure_with(&m, 1, Weighting::eigen(Potential::LogRatio, beta, 1.0), 1e-12, 2000) {
        Ok(y) => Ok(MeasureModel::YFamily(y)),
        Err(GcmsError::Divergent(_)) => Ok(MeasureModel::Cylinder(log_sigma_measure(beta)?)),
        Err(e) => Err(e),
    }
}

impl MeasureModel {
    pub fn convex(parts: Vec<(f64, MeasureModel)>) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.is_empty() || parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(GcmsError::Domain("convex weights must be non-negative and sum to 1".into()));
        }
        Ok(MeasureModel::Convex(parts))
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        match self {
            MeasureModel::YFamily(y) => &y.matrix,
            MeasureModel::Cylinder(c) => &c.matrix,
            MeasureModel::Convex(parts) => parts[0].1.matrix(),
        }
    }

    pub fn weighting(&self) -> &Weighting {
        match self {
            MeasureModel::YFamily(y) => &y.weighting,
            MeasureModel::Cylinder(c) => &c.weighting,
            MeasureModel::Convex(parts) => parts[0].1.weighting(),
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            MeasureModel::YFamily(y) => format!("YFamily({})", y.family),
            MeasureModel::Cylinder(c) => format!("{:?}", c.kind),
            MeasureModel::Convex(parts) => {
                let inner: Vec<String> = parts.iter().map(|(w, p)| format!("{w}·{}", p.kind_name())).collect();
                format!("Convex[{}]", inner.join(" + "))
            }
        }
    }

    pub fn cylinder(&self, w: &Word) -> f64 {
        match self {
            MeasureModel::YFamily(y) => y.cylinder(w),
            MeasureModel::Cylinder(c) => c.cylinder(w),
            MeasureModel::Convex(parts) => parts.iter().map(|(a, p)| a * p.cylinder(w)).sum(),
        }
    }

    pub fn point_mass(&self, c: &BoundedConfig) -> f64 {
        match self {
            MeasureModel::YFamily(y) => y.point_mass(c),
            MeasureModel::Cylinder(_) => 0.0,
            MeasureModel::Convex(parts) => parts.iter().map(|(a, p)| a * p.point_mass(c)).sum(),
        }
    }

    pub fn total_mass(&self) -> Certified {
        match self {
            MeasureModel::YFamily(y) => y.total_mass(),
            MeasureModel::Cylinder(c) => c.total_mass(),
            MeasureModel::Convex(parts) => parts.iter().fold(Certified::exact(0.0), |acc, (a, p)| {
                let t = p.total_mass();
                Certified { value: acc.value + a * t.value, error: acc.error + a * t.error }
            }),
        }
    }

    /// `μ(C_α)` as a certified value; the whole space for `α = e`.
    fn parent(&self, prefix: &Word) -> Certified {
        if prefix.is_empty() {
            self.total_mass()
        } else {
            Certified::exact(self.cylinder(prefix))
        }
    }

    fn points_at(&self, prefix: &Word) -> f64 {
        points_with_stem(self.matrix(), prefix).iter().map(|c| self.point_mass(c)).sum()
    }
}

/// `μ(⊔_k C_{αk})`: direct for finite member sets, by complement inside
/// `C_α` for cofinite ones, and by truncation with the complement mass as a
/// tail bound for infinite ones.
fn family_measure(model: &MeasureModel, fam: &CylFamily, tol: f64) -> Certified {
    let m = model.matrix();
    let prefix = &fam.prefix;
    match fam.members(m) {
        Members::Finite(ks) => Certified::exact(ks.iter().map(|&k| model.cylinder(&prefix.pushed(k))).sum()),
        Members::Cofinite(excluded) => {
            let parent = model.parent(prefix);
            let ex: f64 = excluded.iter().map(|&k| model.cylinder(&prefix.pushed(k))).sum();
            let v = parent.value - model.points_at(prefix) - ex;
            Certified { value: v, error: parent.error + 1e-15 * parent.value.abs() }
        }
        Members::Infinite => {
            let parent = model.parent(prefix);
            let points = model.points_at(prefix);
            let allowed = |k: Symbol| prefix.last().is_none_or(|s| m.allows(s, k));
            let mut k_max: Symbol = 64;
            loop {
                let mut partial = 0.0;
                let mut inside = 0.0;
                for k in (1..=k_max).rev() {
                    if !allowed(k) {
                        continue;
                    }
                    let v = model.cylinder(&prefix.pushed(k));
                    inside += v;
                    if fam.pred.holds(m, k) {
                        partial += v;
                    }
                }
                let rem = (parent.value - points - inside).max(0.0);
                let rounding = 1e-16 * k_max as f64 * parent.value.abs() + 1e-15;
                if rem <= tol * 1e-2 || k_max >= 1 << 20 {
                    return Certified { value: partial, error: rem + parent.error + rounding };
                }
                k_max *= 4;
            }
        }
    }
}

/// `μ(s)` for a set in normal form.
pub fn measure_setexpr(model: &MeasureModel, s: &SetExpr, tol: f64) -> Result<Certified> {
    let mut acc = Certified::exact(0.0);
    let mut add = |c: Certified| {
        acc.value += c.value;
        acc.error += c.error;
    };
    if s.whole_space {
        add(model.total_mass());
    }
    for p in &s.points {
        add(Certified::exact(model.point_mass(p)));
    }
    for w in &s.atoms {
        add(Certified::exact(model.cylinder(w)));
    }
    for f in &s.families {
        add(family_measure(model, f, tol));
    }
    if acc.error > tol {
        return Err(GcmsError::Inconclusive(format!("measure of {s} has error bound {:.3e} > {tol:e}", acc.error)));
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalityReport {
    pub checked: usize,
    pub max_residual: f64,
    pub worst: Option<String>,
}

/// Admissible words of length `1..=max_len` over symbols `≤ bound`.
pub fn test_cylinders(m: &TransitionMatrix, max_len: usize, bound: Symbol) -> Vec<Word> {
    let last: BTreeSet<Symbol> = (1..=bound).collect();
    (1..=max_len).flat_map(|n| m.enumerate_words(n, &last, bound).items).collect()
}

/// Largest `|μ(σC_α) − λe^{−φ(α_0)}μ(C_α)|` over the given cylinders; for
/// `|α| = 1` the image `σ(C_a) = C_{a^{-1}}` is decomposed and measured.
pub fn verify_conformality(model: &MeasureModel, cylinders: &[Word], tol: f64) -> Result<ConformalityReport> {
    let m = model.matrix();
    let w = model.weighting();
    let mut max_residual = 0.0;
    let mut worst = None;
    for alpha in cylinders {
        let a0 = alpha.first().ok_or(GcmsError::EmptyStem)?;
        let rhs = model.cylinder(alpha) / w.rho(a0);
        let lhs = if alpha.len() >= 2 {
            model.cylinder(&alpha.suffix_from(1))
        } else {
            let image = decompose(m, &SubbasisElem::InvCyl(Word::empty(), a0))?;
            measure_setexpr(model, &image, tol)?.value
        };
        let r = (lhs - rhs).abs();
        if r > max_residual || worst.is_none() {
            max_residual = r.max(max_residual);
            worst = Some(alpha.to_string());
        }
    }
    Ok(ConformalityReport { checked: cylinders.len(), max_residual, worst })
}

/// Largest `|c_ω/ρ(ω_0) − c_{σω}|` over stems of length `≤ max_len`, symbols `≤ bound`.
pub fn atomic_du_residual(y: &YFamilyMeasure, max_len: usize, bound: Symbol) -> f64 {
    let col = y.matrix.column(y.family).expect("family in catalog");
    let last: BTreeSet<Symbol> = col.terminal.intersection(&col.support).copied().collect();
    (1..=max_len)
        .flat_map(|n| y.matrix.enumerate_words(n, &last, bound).items)
        .map(|stem| {
            let lhs = y.coefficient(&stem) / y.weighting.rho(stem.first().unwrap());
            (lhs - y.coefficient(&stem.suffix_from(1))).abs()
        })
        .fold(0.0, f64::max)
}

/// `𝔏(β) = Σ_{n≥0}[(1−√2)^n + (1−√2)^{n+1} + (1+√2)^n + (1+√2)^{n+1}] e^{−βn}`.
pub fn l_frak(beta: f64) -> Result<f64> {
    let (a, b) = (1.0 - 2f64.sqrt(), 1.0 + 2f64.sqrt());
    if b * (-beta).exp() >= 1.0 {
        return Err(GcmsError::Divergent(format!("𝔏 diverges at β = {beta}")));
    }
    let mut sum = 0.0;
    for n in 0..100_000 {
        let e = (-beta * n as f64).exp();
        let term = (a.powi(n) * (1.0 + a) + b.powi(n) * (1.0 + b)) * e;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    Ok(sum)
}

/// Generic pair-renewal values next to the printed `𝔏`-based constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairConstantsReport {
    pub beta: f64,
    pub l_frak: f64,
    pub normalizer_family1: f64,
    pub c2_generic: [f64; 2],
    pub c2_printed: [f64; 2],
    pub empty_mass_generic: [f64; 2],
    pub empty_mass_printed: f64,
}

impl PairConstantsReport {
    pub fn max_c2_discrepancy(&self) -> f64 {
        (0..2).map(|k| (self.c2_generic[k] - self.c2_printed[k]).abs()).fold(0.0, f64::max)
    }
}

pub fn pair_constants_report(beta: f64) -> Result<PairConstantsReport> {
    let m = TransitionMatrix::pair_renewal();
    let f = Potential::Constant(1.0);
    let y1 = y_measure(&m, 1, &f, beta)?;
    let y2 = y_measure(&m, 2, &f, beta)?;
    let l = l_frak(beta)?;
    let h = (-beta).exp() * (1.0 - (-2.0 * beta).exp()) / (2.0 * beta.sinh() - 1.0);
    let c2 = Word::from_slice(&[2]);
    Ok(PairConstantsReport {
        beta,
        l_frak: l,
        normalizer_family1: y1.normalizer_value,
        c2_generic: [y1.cylinder(&c2), y2.cylinder(&c2)],
        c2_printed: [(1.0 + 4.0 * beta.exp() / l) * h, (1.0 + 4.0 * beta.exp() / (4.0 + (-beta).exp() * l)) * h],
        empty_mass_generic: [y1.c_e, y2.c_e],
        empty_mass_printed: 4.0 / l,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub set: String,
    pub value: f64,
    pub target: f64,
    pub diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// `(β, max diff)` in the order of the grid.
    pub max_diff: Vec<(f64, f64)>,
    /// Max diff does not increase as β moves toward the target value.
    pub monotone: bool,
}

/// Cylinder sets `C_α` for admissible `α`, `1 ≤ |α| ≤ depth`, symbols `≤ bound`.
pub fn cylinder_basis(m: &TransitionMatrix, depth: usize, bound: Symbol) -> Vec<(String, SetExpr)> {
    test_cylinders(m, depth, bound)
        .into_iter()
        .map(|w| (format!("C[{w}]"), SetExpr { atoms: vec![w], ..SetExpr::empty() }))
        .collect()
}

/// `|μ_β(B) − target(B)|` for every basis set and grid point. Grid points are
/// evaluated in parallel and reported in grid order.
pub fn weak_star_sweep<F>(family: F, target: &MeasureModel, basis: &[(String, SetExpr)], betas: &[f64], tol: f64) -> Result<SweepTable>
where
    F: Fn(f64) -> Result<MeasureModel> + Sync,
{
    let targets: Vec<f64> = basis.iter().map(|(_, s)| measure_setexpr(target, s, tol).map(|c| c.value)).collect::<Result<_>>()?;
    let per_beta: Vec<Vec<SweepRow>> = betas
        .par_iter()
        .map(|&beta| {
            let model = family(beta)?;
            basis
                .iter()
                .zip(&targets)
                .map(|((name, s), &t)| {
                    let v = measure_setexpr(&model, s, tol)?.value;
                    Ok(SweepRow { beta, set: name.clone(), value: v, target: t, diff: (v - t).abs() })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let max_diff: Vec<(f64, f64)> = betas
        .iter()
        .zip(&per_beta)
        .map(|(&b, rows)| (b, rows.iter().map(|r| r.diff).fold(0.0, f64::max)))
        .collect();
    let mut by_distance = max_diff.clone();
    by_distance.sort_by(|a, b| b.0.total_cmp(&a.0));
    let monotone = by_distance.windows(2).all(|p| p[1].1 <= p[0].1 * (1.0 + 1e-9) + 1e-15);
    Ok(SweepTable { rows: per_beta.into_iter().flatten().collect(), max_diff, monotone })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseRow {
    pub beta: f64,
    /// Conformal probability on `Σ_A`.
    pub sigma: String,
    /// Per family id: `exists`, `absent` or `inconclusive`.
    pub y_families: Vec<(u64, String)>,
    pub support: String,
}

fn verdict(n: &Normalizer) -> &'static str {
    match n {
        Normalizer::Finite(_) => "exists",
        Normalizer::Divergent => "absent",
        Normalizer::Inconclusive { .. } => "inconclusive",
    }
}

/// Existence of conformal probabilities at one β. Constant potentials are
/// read as `e^{βF}`-conformality with `λ = 1`; the log potential on the
/// renewal shift as eigenmeasures of `L_{βF}`.
pub fn phase_row(m: &TransitionMatrix, f: &Potential, beta: f64, tail_tol: f64, length_cap: usize) -> Result<PhaseRow> {
    if let (MatrixKind::Renewal, Potential::LogRatio) = (m.kind(), f) {
        let above = beta > 1.0 && series::zeta(beta, 1e-12)? < 2.0;
        let lambda = thermo::log_lambda(beta)?;
        return Ok(PhaseRow {
            beta,
            sigma: if above { "absent".into() } else { format!("exists (λ = {lambda:.12})") },
            y_families: vec![(1, if above { "exists" } else { "absent" }.into())],
            support: if above { "Y_A" } else { "Σ_A" }.into(),
        });
    }
    let w = match f {
        Potential::Constant(_) => Weighting::du(f.clone(), beta),
        _ => Weighting::eigen(f.clone(), beta, 1.0),
    };
    let y_families: Vec<(u64, String)> = m
        .catalog()
        .iter()
        .map(|col| {
            let n = normalizer_with(m, col.id, &w, tail_tol, length_cap)?;
            let mut v = verdict(&n).to_string();
            if let (MatrixKind::PrimeRenewal { .. }, Potential::Constant(c)) = (m.kind(), f) {
                let b = beta * c;
                if b > 2f64.ln() && b <= 3f64.ln() {
                    // divergence here is not known to rule out a measure
                    if matches!(n, Normalizer::Divergent) {
                        v = "inconclusive".into();
                    }
                    v.push_str(" (unproven band)");
                }
            }
            Ok((col.id, v))
        })
        .collect::<Result<_>>()?;
    let critical = match (m.kind(), f) {
        (MatrixKind::Renewal, Potential::Constant(c)) => Some(2f64.ln() / c),
        (MatrixKind::PairRenewal, Potential::Constant(c)) => Some(pair_renewal_critical_beta() / c),
        _ => None,
    };
    let sigma = match critical {
        Some(bc) if (beta - bc).abs() <= 1e-9 => "exists".to_string(),
        Some(_) => "absent".to_string(),
        None => "unknown".to_string(),
    };
    let any_y = y_families.iter().any(|(_, v)| v.starts_with("exists"));
    let open = y_families.iter().any(|(_, v)| v.starts_with("inconclusive"));
    let support = match (sigma.as_str(), any_y, open) {
        ("exists", true, _) => "Σ_A and Y_A",
        ("exists", false, false) => "Σ_A",
        (_, true, _) => "Y_A",
        (_, false, true) => "undetermined",
        _ => "none",
    };
    Ok(PhaseRow { beta, sigma, y_families, support: support.into() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub kind: String,
    pub beta: f64,
    pub lambda: f64,
    pub c_e: Option<f64>,
    pub base_values: Option<BTreeMap<Symbol, f64>>,
    pub total_mass: f64,
    pub max_du_residual: f64,
}

pub fn measure_report(model: &MeasureModel, du_len: usize, bound: Symbol, tol: f64) -> Result<MeasureReport> {
    let w = model.weighting();
    let cyl = test_cylinders(model.matrix(), du_len, bound);
    let du = verify_conformality(model, &cyl, tol)?;
    Ok(MeasureReport {
        kind: model.kind_name(),
        beta: w.beta,
        lambda: w.lambda,
        c_e: match model {
            MeasureModel::YFamily(y) => Some(y.c_e),
            _ => None,
        },
        base_values: match model {
            MeasureModel::Cylinder(c) => Some(c.base_values(bound)),
            _ => None,
        },
        total_mass: model.total_mass().value,
        max_du_residual: du.max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn renewal_normalizer_examples() {
        let m = TransitionMatrix::renewal();
        let one = Potential::Constant(1.0);
        match normalizer(&m, 1, &one, 3f64.ln(), 1e-12, 100).unwrap() {
            Normalizer::Finite(c) => assert!((c.value - 2.0).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
        assert_eq!(normalizer(&m, 1, &one, 2f64.ln(), 1e-12, 100).unwrap(), Normalizer::Divergent);
        let pm = TransitionMatrix::pair_renewal();
        assert!(matches!(normalizer(&pm, 1, &one, 1.2, 1e-12, 100).unwrap(), Normalizer::Finite(_)));
    }

    #[test]
    fn renewal_y_measure_values() {
        let m = TransitionMatrix::renewal();
        let y = y_measure(&m, 1, &Potential::Constant(1.0), 3f64.ln()).unwrap();
        assert!((y.c_e - 0.5).abs() < 1e-15);
        assert!((y.coefficient(&w("1")) - 1.0 / 6.0).abs() < 1e-15);
        assert!((y.cylinder(&w("2.1")) - 1.0 / 9.0).abs() < 1e-15);
        assert!((y.total_mass().value - 1.0).abs() < 1e-12);
        assert!(atomic_du_residual(&y, 6, 7) < 1e-16);
    }

    #[test]
    fn log_y_measure_coefficients() {
        let model = log_eigenmeasure(2.0).unwrap();
        let MeasureModel::YFamily(y) = &model else { panic!() };
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((y.c_e - (2.0 - z2)).abs() < 1e-13);
        assert!((y.coefficient(&w("1")) - 0.25 * (2.0 - z2)).abs() < 1e-13);
        assert!((model.total_mass().value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sarig_values() {
        let nu = sarig_measure_renewal(0.7);
        assert_eq!(nu.cylinder(&w("1")), 0.5);
        assert_eq!(nu.cylinder(&w("3")), 0.125);
        assert_eq!(nu.cylinder(&w("3.2.1")), 0.125);
        assert_eq!(nu.cylinder(&w("2.1")), 0.25);
        assert!((nu.total_mass().value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pair_critical_values() {
        let mu = pair_renewal_critical_measure();
        let y = 2f64.sqrt() - 1.0;
        assert!((mu.cylinder(&w("1")) - y).abs() < 1e-15);
        assert!((mu.cylinder(&w("2")) - (6.0 - 4.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!((mu.cylinder(&w("3")) - y * mu.cylinder(&w("2"))).abs() < 1e-16);
        assert!((mu.cylinder(&w("1.2")) - y * mu.cylinder(&w("2"))).abs() < 1e-16);
        assert!((mu.total_mass().value - 1.0).abs() < 1e-14);
        assert!((pair_normalization_root().unwrap() - y).abs() < 1e-12);
    }

    #[test]
    fn log_sigma_matches_closed_form() {
        let mu = log_sigma_measure(1.3).unwrap();
        let lambda = mu.weighting.lambda;
        let f = Potential::LogRatio;
        for word in test_cylinders(&mu.matrix, 5, 6) {
            let n = word.len();
            let last = word.last().unwrap();
            let expo: f64 = word.symbols()[..n - 1].iter().map(|&s| f.eval(s)).sum();
            let closed = (1.3 * expo).exp() / lambda.powf((last as usize + n - 1) as f64) / ((last + 1) as f64).powf(1.3);
            assert!((mu.cylinder(&word) - closed).abs() < 1e-15 * closed.max(1e-300) + 1e-18);
        }
    }

    #[test]
    fn conformality_and_mutation() {
        let model = MeasureModel::Cylinder(sarig_measure_renewal(1.5));
        let cyl = test_cylinders(model.matrix(), 6, 7);
        assert!(verify_conformality(&model, &cyl, 1e-12).unwrap().max_residual < 1e-15);
        let mut bad = sarig_measure_renewal(1.5);
        bad.base = Base::Geometric { first: vec![0.5, 0.25 + 1e-3], ratio: 0.5 };
        let bad = MeasureModel::Cylinder(bad);
        assert!(verify_conformality(&bad, &cyl, 1e-12).unwrap().max_residual >= 1e-4);
    }

    #[test]
    fn setexpr_examples() {
        let m = TransitionMatrix::renewal();
        let y = MeasureModel::YFamily(y_measure(&m, 1, &Potential::Constant(1.0), 3f64.ln()).unwrap());
        let s = decompose(&m, &SubbasisElem::Cyl(w("2.1"))).unwrap();
        assert!((measure_setexpr(&y, &s, 1e-12).unwrap().value - 1.0 / 9.0).abs() < 1e-15);
        let whole = SetExpr::whole();
        assert!((measure_setexpr(&y, &whole, 1e-10).unwrap().value - 1.0).abs() < 1e-10);
        let nu = MeasureModel::Cylinder(sarig_measure_renewal(1.0));
        assert!((measure_setexpr(&nu, &s, 1e-12).unwrap().value - 0.25).abs() < 1e-15);
        // C_2^c has measure 1 − μ(C_2)
        let c = decompose(&m, &SubbasisElem::CylC(w("2"))).unwrap();
        assert!((measure_setexpr(&y, &c, 1e-10).unwrap().value - (1.0 - 1.0 / 9.0)).abs() < 1e-10);
    }

    #[test]
    fn l_frak_is_four_normalizers() {
        let r = pair_constants_report(1.2).unwrap();
        assert!((r.l_frak - 4.0 * r.normalizer_family1).abs() < 1e-9 * r.l_frak);
    }

    #[test]
    fn prime_renewal_thresholds() {
        let m = TransitionMatrix::prime_renewal(7);
        let one = Potential::Constant(1.0);
        for fam in [1, 2, 3, 5] {
            assert!(matches!(normalizer(&m, fam, &one, 3f64.ln() + 1e-3, 1e-10, 400).unwrap(), Normalizer::Finite(_)));
            assert_eq!(normalizer(&m, fam, &one, 2f64.ln(), 1e-10, 400).unwrap(), Normalizer::Divergent);
        }
    }
}
