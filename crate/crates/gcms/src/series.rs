//! Series with explicit error bounds: ζ, power tails, polylog-type sums and
//! bisection.

use serde::Serialize;
use statrs::function::gamma::{gamma, gamma_ui};

use crate::error::{GcmsError, Result};

/// A value together with a bound on its absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certified {
    pub value: f64,
    pub error: f64,
}

impl Certified {
    pub fn exact(value: f64) -> Self {
        Certified { value, error: 0.0 }
    }
}

/// `B_{2j}` for `j = 1..=8`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Rising factorial `(s)_m`.
fn rising(s: f64, m: usize) -> f64 {
    (0..m).map(|i| s + i as f64).product()
}

/// `Σ_{k≥n} (k+a)^{-s}` for `s > 1`, `n + a > 0`, by direct summation up to
/// `k + a ≥ 20` and then Euler–Maclaurin with seven correction terms. The
/// error bound is the first omitted term, valid since `x^{-s}` is completely
/// monotone.
pub fn power_tail(s: f64, a: f64, n: u64) -> Certified {
    assert!(s > 1.0, "power_tail needs s > 1");
    let mut k = n;
    let mut direct = 0.0;
    while (k as f64) + a < 20.0 {
        direct += ((k as f64) + a).powf(-s);
        k += 1;
    }
    let x0 = (k as f64) + a;
    let mut em = x0.powf(1.0 - s) / (s - 1.0) + 0.5 * x0.powf(-s);
    for (j, b) in BERNOULLI.iter().enumerate().take(7) {
        let m = 2 * (j + 1);
        em += b / factorial(m) * rising(s, m - 1) * x0.powf(-s - (m - 1) as f64);
    }
    let m = 16;
    let bound = (BERNOULLI[7] / factorial(m) * rising(s, m - 1) * x0.powf(-s - (m - 1) as f64)).abs();
    Certified { value: direct + em, error: bound + 4.0 * f64::EPSILON * (direct + em) }
}

/// Riemann ζ for `s > 1`.
pub fn zeta(s: f64, tol: f64) -> Result<f64> {
    if !(s > 1.0 + 1e-9) {
        return Err(GcmsError::Domain(format!("zeta needs s > 1, got {s}")));
    }
    let c = power_tail(s, 0.0, 1);
    if c.error > tol {
        return Err(GcmsError::Domain(format!("zeta({s}) error {} exceeds {tol}", c.error)));
    }
    Ok(c.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    All,
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, m: u64) -> bool {
        match self {
            Parity::All => true,
            Parity::Even => m.is_multiple_of(2),
            Parity::Odd => m % 2 == 1,
        }
    }
}

/// `Γ(a, x)` for real `a` that is not a non-positive integer and `x > 0`.
fn upper_gamma(a: f64, x: f64) -> f64 {
    if a > 0.0 {
        gamma_ui(a, x)
    } else {
        (upper_gamma(a + 1.0, x) - x.powf(a) * (-x).exp()) / a
    }
}

/// `Σ_{k≥0} e^{-c(x0+k)} (x0+k)^{-s}` by Euler–Maclaurin; the summand is
/// completely monotone for `c ≥ 0`, `s > 0`, so the first omitted term bounds the error.
fn damped_tail(s: f64, c: f64, x0: f64) -> Certified {
    let integral = c.powf(s - 1.0) * upper_gamma(1.0 - s, c * x0);
    let decay = (-c * x0).exp();
    // -f^{(m)}(x0) for odd m
    let deriv = |m: usize| -> f64 {
        let mut acc = 0.0;
        for i in 0..=m {
            let binom = factorial(m) / (factorial(i) * factorial(m - i));
            acc += binom * c.powi((m - i) as i32) * rising(s, i) * x0.powf(-s - i as f64);
        }
        decay * acc
    };
    let mut v = integral + 0.5 * decay * x0.powf(-s);
    for (j, b) in BERNOULLI.iter().enumerate().take(4) {
        let m = 2 * (j + 1);
        v += b / factorial(m) * deriv(m - 1);
    }
    let bound = (BERNOULLI[4] / factorial(10) * deriv(9)).abs();
    Certified { value: v, error: bound + 1e-14 * v.abs() }
}

/// `Σ_{m ≥ from, parity} r^m m^{-s}` for `0 < r ≤ 1` (with `s > 1` when `r = 1`).
pub fn powsum(s: f64, r: f64, from: u64, parity: Parity) -> Result<Certified> {
    let from = from.max(1);
    if !(r > 0.0) || r > 1.0 {
        return Err(GcmsError::Domain(format!("powsum needs 0 < r ≤ 1, got {r}")));
    }
    match parity {
        Parity::All => {}
        Parity::Even => {
            let t0 = from.div_ceil(2);
            let inner = powsum(s, r * r, t0, Parity::All)?;
            let scale = 2f64.powf(-s);
            return Ok(Certified { value: scale * inner.value, error: scale * inner.error });
        }
        Parity::Odd => {
            let all = powsum(s, r, from, Parity::All)?;
            let even = powsum(s, r, from, Parity::Even)?;
            return Ok(Certified { value: all.value - even.value, error: all.error + even.error });
        }
    }
    if r == 1.0 {
        if s <= 1.0 {
            return Err(GcmsError::Domain(format!("Σ m^-{s} diverges")));
        }
        return Ok(power_tail(s, 0.0, from));
    }
    let c = -r.ln();
    let near_integer = (s - s.round()).abs() < 1e-9;
    if c < 1e-2 && s > 0.0 && !near_integer {
        let n0 = from.max(200);
        let mut direct = 0.0;
        for m in from..n0 {
            direct += r.powf(m as f64) * (m as f64).powf(-s);
        }
        let t = damped_tail(s, c, n0 as f64);
        return Ok(Certified { value: direct + t.value, error: t.error + 1e-15 * direct });
    }
    // direct summation until the geometric bound on the remainder is negligible
    let mut sum = 0.0;
    let mut m = from;
    let cap: u64 = 20_000_000;
    loop {
        let term = r.powf(m as f64) * (m as f64).powf(-s);
        sum += term;
        m += 1;
        let ratio = r * ((m as f64 - 1.0) / m as f64).powf(s);
        if ratio < 1.0 {
            let next = r.powf(m as f64) * (m as f64).powf(-s);
            let rem = next / (1.0 - ratio.max(r));
            if rem <= 1e-17 * sum.abs() || rem < 1e-300 {
                return Ok(Certified { value: sum, error: rem + 1e-15 * sum.abs() });
            }
            if m - from > cap {
                return Ok(Certified { value: sum, error: rem });
            }
        }
    }
}

/// `Φ_β(λ) = Σ_{n≥1} λ^{-n} (n+1)^{-β}` for `λ ≥ 1`.
pub fn phi_beta(beta: f64, lambda: f64) -> Result<Certified> {
    // λ^{-n} = λ · λ^{-(n+1)}
    let p = powsum(beta, 1.0 / lambda, 2, Parity::All)?;
    Ok(Certified { value: lambda * p.value, error: lambda * p.error })
}

/// Sign of `Φ_β(λ) − 1`, with an early exit once partial sums decide it.
pub(crate) fn phi_exceeds_one(beta: f64, lambda: f64) -> bool {
    let r = 1.0 / lambda;
    let mut sum = 0.0;
    for n in 1..=200_000u64 {
        sum += r.powf(n as f64) * ((n + 1) as f64).powf(-beta);
        if sum > 1.0 {
            return true;
        }
        let ratio = r * ((n + 1) as f64 / (n + 2) as f64).powf(beta);
        let next = r.powf((n + 1) as f64) * ((n + 2) as f64).powf(-beta);
        if ratio < 1.0 && sum + next / (1.0 - ratio.max(r)) < 1.0 {
            return false;
        }
    }
    match phi_beta(beta, lambda) {
        Ok(v) => v.value > 1.0,
        Err(_) => true,
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to width `tol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(GcmsError::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Gamma function, re-exported for callers that want closed forms.
pub fn gamma_fn(x: f64) -> f64 {
    gamma(x)
}
