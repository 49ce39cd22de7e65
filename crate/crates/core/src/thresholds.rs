//! Crossover densities `γ_k` where the clique and anticlique branches of the
//! star bound coincide.
//!
//! With `γ = 1 - ε²` the two branches agree exactly when
//! `Q(ε) = (1+ε)^{k+1} - (1-ε)^{1-k} - 2ε - ε²(1-ε)^{k-1}` vanishes. `Q` is
//! positive on `(0, ε_k)` and negative on `(ε_k, 1)`, so bisection finds the
//! unique root. Both power terms blow up as `k` grows, so `Q` is evaluated in
//! double-double arithmetic.

use num_bigint::BigInt;
use serde::Serialize;

use crate::combin::binomial_signed;
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// `|Q|` the bisection keeps shrinking toward once the bracket is narrow.
pub const RESIDUAL_TARGET: f64 = 1e-12;
/// Initial point and step of the upward bracket scan.
pub const SCAN_STEP: f64 = 1e-3;

pub const ASYMPTOTE_CSV_HEADER: [&str; 5] = [
    "k",
    "eps_k",
    "gamma_k",
    "k2_one_minus_gamma",
    "deviation_from_alpha_sq",
];

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::out_of_range("k", k, "k >= 2"));
    }
    Ok(())
}

/// `Q(ε)` in double-double precision.
pub fn q_eval_dd(k: u32, eps: f64) -> Result<DoubleDouble> {
    check_k(k)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::out_of_range("eps", eps, "[0, 1)"));
    }
    let e = DoubleDouble::new(eps);
    let up = DoubleDouble::ONE + e;
    let down = DoubleDouble::ONE - e;
    let down_pow = down.powi(k - 1);
    Ok(up.powi(k + 1) - down_pow.recip() - e * DoubleDouble::new(2.0) - e * e * down_pow)
}

pub fn q_eval(k: u32, eps: f64) -> Result<f64> {
    q_eval_dd(k, eps).map(DoubleDouble::to_f64)
}

/// `q_i = C(k+i-2, i) - C(k+1, i) + (-1)^i C(k-1, i-2)`, the coefficients in
/// `Q(ε) = (k-1)ε² + (k-1)ε³ - Σ_{i>=4} q_i ε^i`.
pub fn q_taylor_coeff(k: u32, i: u32) -> Result<BigInt> {
    check_k(k)?;
    if i < 4 {
        return Err(Error::out_of_range("i", i, "i >= 4"));
    }
    let (k, i) = (i64::from(k), i64::from(i));
    let last = binomial_signed(k - 1, i - 2);
    let sign = if i % 2 == 0 { last } else { -last };
    Ok(binomial_signed(k + i - 2, i) - binomial_signed(k + 1, i) + sign)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossoverResult {
    pub k: u32,
    pub eps_k: f64,
    pub gamma_k: f64,
    pub residual: f64,
    pub bracket_width: f64,
}

/// Locate `ε_k` by bisection and report `γ_k = 1 - ε_k²`.
///
/// The bracket comes from an upward scan in steps of `1e-3` starting at
/// `1e-3` (halving the start if `Q` is not yet positive there). Bisection
/// continues past `tol` while `|Q(ε)| > 1e-12` and the bracket still splits.
pub fn crossover(k: u32, tol: f64) -> Result<CrossoverResult> {
    check_k(k)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::out_of_range("tol", tol, "tol > 0"));
    }
    let q = |e: f64| q_eval(k, e);
    let mut lo = SCAN_STEP;
    while q(lo)? <= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::BracketNotFound { k });
        }
    }
    let cap = 1.0 - 1e-12;
    let mut hi = lo;
    loop {
        let next = (hi + SCAN_STEP).min(cap);
        if q(next)? < 0.0 {
            lo = hi;
            hi = next;
            break;
        }
        if next >= cap {
            return Err(Error::BracketNotFound { k });
        }
        hi = next;
    }
    let mut mid = 0.5 * (lo + hi);
    let mut q_mid = q(mid)?;
    loop {
        if q_mid == 0.0 {
            break;
        }
        if hi - lo <= tol && q_mid.abs() <= RESIDUAL_TARGET {
            break;
        }
        if q_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if next <= lo || next >= hi {
            break;
        }
        mid = next;
        q_mid = q(mid)?;
    }
    Ok(CrossoverResult {
        k,
        eps_k: mid,
        gamma_k: 1.0 - mid * mid,
        residual: q_mid.abs(),
        bracket_width: hi - lo,
    })
}

/// The positive root of `α/2 + e^{-α} = 1`, by bisection on `[1, 2]`.
pub fn alpha_constant(tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::out_of_range("tol", tol, "tol > 0"));
    }
    let f = |a: f64| a / 2.0 + (-a).exp() - 1.0;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    assert!(
        f(lo) < 0.0 && f(hi) > 0.0,
        "alpha bracket lost its sign change"
    );
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoteRow {
    pub k: u32,
    pub eps_k: f64,
    pub gamma_k: f64,
    pub k2_one_minus_gamma: f64,
    pub deviation_from_alpha_sq: f64,
}

impl AsymptoteRow {
    pub fn csv_record(&self) -> [String; 5] {
        [
            self.k.to_string(),
            self.eps_k.to_string(),
            self.gamma_k.to_string(),
            self.k2_one_minus_gamma.to_string(),
            self.deviation_from_alpha_sq.to_string(),
        ]
    }
}

/// `k²(1-γ_k)` against its limit `α²` for each requested `k`.
pub fn asymptote_check(ks: &[u32]) -> Result<Vec<AsymptoteRow>> {
    let alpha = alpha_constant(1e-15)?;
    ks.iter()
        .map(|&k| {
            let c = crossover(k, 1e-15)?;
            let scaled = (f64::from(k) * c.eps_k).powi(2);
            Ok(AsymptoteRow {
                k,
                eps_k: c.eps_k,
                gamma_k: c.gamma_k,
                k2_one_minus_gamma: scaled,
                deviation_from_alpha_sq: (scaled - alpha * alpha).abs(),
            })
        })
        .collect()
}
