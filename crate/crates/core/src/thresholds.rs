//! Closed-form threshold machinery for `G(n, p)` with `p = c log n / (n - 1)`.
//!
//! `phi_c(t) = 1 - c + t - t log(t / c)` measures how many vertices have degree
//! near `t log n` (roughly `n^{phi_c(t)}` of them), so its smallest positive
//! root `a(c)` is the typical normalized minimum degree. The edge count caps
//! the rigid dimension near `(c / 2) log n`, and the two caps cross at
//! `C_* = 2 / (1 - log 2)`.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance of the bisection for `a(c)`.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// `C_* = 2 / (1 - log 2)`, about 6.5178.
pub fn c_star() -> f64 {
    2.0 / (1.0 - core::f64::consts::LN_2)
}

fn phi_raw(c: f64, t: f64) -> f64 {
    1.0 - c + t - t * libm::log(t / c)
}

/// `phi_c(t) = 1 - c + t - t log(t / c)` for `c, t > 0`.
pub fn phi(c: f64, t: f64) -> Result<f64> {
    if !(c > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!("phi needs c > 0 and t > 0, got c={c}, t={t}")));
    }
    Ok(phi_raw(c, t))
}

/// Smallest positive root of `phi_c`, defined for `c > 1`.
///
/// `phi_c` increases strictly on `(0, c)` (its derivative is `-log(t / c)`),
/// tends to `1 - c < 0` at `0+` and equals 1 at `c`, so the root is unique in
/// `(0, c)`; bisection brackets it to [`ROOT_TOLERANCE`].
pub fn a_of_c(c: f64) -> Result<f64> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::Domain(format!("a(c) needs c > 1, got {c}")));
    }
    let (mut lo, mut hi) = (0.0f64, c);
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi_raw(c, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct ChernoffBounds {
    /// `(e^{-(1 - alpha)} / alpha^alpha)^mean`, bounds `P(Y <= alpha mean)`.
    pub lower_sharp: f64,
    /// `exp(-(1 - alpha)^2 mean / 2)`, bounds `P(Y <= alpha mean)`.
    pub lower_simple: f64,
    /// `(e mean / t)^t`, bounds `P(Y >= t)` for `t > mean`.
    pub upper: f64,
}

/// The two lower-tail bounds for a binomial with the given mean.
pub fn chernoff_lower(alpha: f64, mean: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(mean > 0.0) {
        return Err(Error::Domain(format!("mean must be positive, got {mean}")));
    }
    let sharp = libm::exp(mean * (-(1.0 - alpha) - alpha * libm::log(alpha)));
    let simple = libm::exp(-(1.0 - alpha) * (1.0 - alpha) * mean / 2.0);
    Ok((sharp, simple))
}

/// `(e mean / t)^t` for `t > mean > 0`.
pub fn chernoff_upper(mean: f64, t: f64) -> Result<f64> {
    if !(mean > 0.0) || !(t > mean) {
        return Err(Error::Domain(format!("upper tail needs t > mean > 0, got t={t}, mean={mean}")));
    }
    Ok(libm::exp(t * (1.0 + libm::log(mean / t))))
}

pub fn chernoff_bounds(alpha: f64, mean: f64, t: f64) -> Result<ChernoffBounds> {
    let (lower_sharp, lower_simple) = chernoff_lower(alpha, mean)?;
    Ok(ChernoffBounds { lower_sharp, lower_simple, upper: chernoff_upper(mean, t)? })
}

/// Which bottleneck limits the rigid dimension.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Regime {
    /// `c <= 1`: the minimum degree is 0 or 1.
    Sparse,
    /// `1 < c < C_*`: the minimum degree, about `a(c) log n`.
    MinDegree,
    /// `c >= C_*`: the edge count, about `(c / 2) log n`.
    EdgeCount,
}

impl Regime {
    pub fn of(c: f64) -> Regime {
        if c <= 1.0 {
            Regime::Sparse
        } else if c < c_star() {
            Regime::MinDegree
        } else {
            Regime::EdgeCount
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Sparse => "Sparse",
            Regime::MinDegree => "MinDegree",
            Regime::EdgeCount => "EdgeCount",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct RegimePrediction {
    pub n: usize,
    pub p: f64,
    /// `(n - 1) p / log n`.
    pub c: f64,
    pub regime: Regime,
    /// Predicted maximum rigid dimension (not normalized).
    pub predicted_d: f64,
    /// `predicted_d / log n`.
    pub normalized: f64,
}

/// First-order prediction of the maximum rigid dimension of `G(n, p)`.
///
/// Sparse gives 1 at `c = 1` (connectivity) and 0 below; MinDegree gives
/// `a(c) log n`; EdgeCount gives `(c / 2) log n`. The two formulas agree at
/// `c = C_*`.
pub fn predicted_dmax(n: usize, p: f64) -> Result<RegimePrediction> {
    if n < 2 {
        return Err(Error::Domain(format!("prediction needs n >= 2, got {n}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Probability(p));
    }
    let log_n = libm::log(n as f64);
    let c = (n - 1) as f64 * p / log_n;
    let regime = Regime::of(c);
    let normalized = match regime {
        Regime::Sparse => {
            if c >= 1.0 {
                1.0 / log_n
            } else {
                0.0
            }
        }
        Regime::MinDegree => a_of_c(c)?,
        Regime::EdgeCount => c / 2.0,
    };
    Ok(RegimePrediction { n, p, c, regime, predicted_d: normalized * log_n, normalized })
}

/// `p` with `(n - 1) p / log n = c`.
pub fn p_from_c(n: usize, c: f64) -> f64 {
    c * libm::log(n as f64) / (n - 1) as f64
}

/// One row of the phase diagram, in units of `log n`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct PhaseRow {
    pub c: f64,
    pub a_c: f64,
    pub half_c: f64,
    /// `min(a(c), c / 2)`.
    pub predicted: f64,
    pub regime: Regime,
}

pub fn phase_row(c: f64) -> Result<PhaseRow> {
    let a_c = a_of_c(c)?;
    let half_c = c / 2.0;
    let regime = Regime::of(c);
    let predicted = match regime {
        Regime::EdgeCount => half_c,
        _ => a_c,
    };
    Ok(PhaseRow { c, a_c, half_c, predicted, regime })
}

/// `steps` evenly spaced rows from `c_min` to `c_max` inclusive.
pub fn phase_diagram(c_min: f64, c_max: f64, steps: usize) -> Result<Vec<PhaseRow>> {
    if !(1.0 < c_min && c_min < c_max) || steps < 2 || !c_max.is_finite() {
        return Err(Error::Domain(format!(
            "phase diagram needs 1 < c_min < c_max and steps >= 2, got [{c_min}, {c_max}] x {steps}"
        )));
    }
    let h = (c_max - c_min) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            let c = if i + 1 == steps { c_max } else { c_min + h * i as f64 };
            phase_row(c)
        })
        .collect()
}
