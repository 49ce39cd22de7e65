//! Numerical evidence for membership in the class of convex functions
//! satisfying the two constrained-triple conditions (C1) and (C2), plus the
//! auxiliary inequalities used to establish it for powers.
//!
//! For `a < y < b` write `S(u, v)` for the secant slope of `F` on `[u, v]`.
//! (C1) constrains `S(y,b) - S(a,y) = F'(b) - F'(y)` and (C2) constrains
//! `S(y,b) - S(a,y) = F'(y) - F'(a)`; both require a positive expression in
//! `F`, `F'`, `F''` at the constrained triples.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::unit_gamma;
use crate::error::{Error, Result};
use crate::function::FunctionOracle;
use crate::graphons::{eta_of, sqrt_or_inexact};
use crate::scalar::{Rational, Scalar};

/// Accepted slope residual for a constrained triple.
pub const SLOPE_TOL: f64 = 1e-11;
pub const MAX_BISECTIONS: usize = 200;
/// Float inequality values in `(-FLAG_TOL, 0]` are reported but not treated
/// as violations.
pub const FLAG_TOL: f64 = 1e-12;
/// Allowed excess of an interior `J` value over the boundary maximum.
pub const J_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    C1,
    C2,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleCheck {
    pub a: f64,
    pub y: f64,
    pub b: f64,
    pub slope_residual: f64,
    pub inequality_value: f64,
    pub condition: Condition,
}

fn secant(f: &FunctionOracle, u: f64, v: f64) -> f64 {
    (f.eval(v) - f.eval(u)) / (v - u)
}

/// The (C1) expression
/// `2(b-y)[F(b) - (b-y)F'(b) + (b-y)²F''(b)/2 - F(y)]
///  + (y-a)[F(b) - (b-y)F'(y) + (b-y)²F''(y) - F(y)]`.
pub fn c1_expression_in<T: Scalar>(f: &FunctionOracle, a: &T, y: &T, b: &T) -> Result<T> {
    let h = b.clone() - y.clone();
    let (fy, fb) = (f.value(y)?, f.value(b)?);
    let two = T::from_i64(2);
    let half_h2 = h.clone() * h.clone() / two.clone();
    let first = fb.clone() - h.clone() * f.deriv1(b)? + half_h2 * f.deriv2(b)? - fy.clone();
    let second = fb - h.clone() * f.deriv1(y)? + h.clone() * h.clone() * f.deriv2(y)? - fy;
    Ok(two * h * first + (y.clone() - a.clone()) * second)
}

/// The (C2) expression
/// `2(y-a)[F(a) + (y-a)F'(a) + (y-a)²F''(a)/2 - F(y)]
///  + (b-y)[F(a) + (y-a)F'(y) + (y-a)²F''(y) - F(y)]`.
pub fn c2_expression_in<T: Scalar>(f: &FunctionOracle, a: &T, y: &T, b: &T) -> Result<T> {
    let h = y.clone() - a.clone();
    let (fa, fy) = (f.value(a)?, f.value(y)?);
    let two = T::from_i64(2);
    let half_h2 = h.clone() * h.clone() / two.clone();
    let first = fa.clone() + h.clone() * f.deriv1(a)? + half_h2 * f.deriv2(a)? - fy.clone();
    let second = fa + h.clone() * f.deriv1(y)? + h.clone() * h.clone() * f.deriv2(y)? - fy;
    Ok(two * h * first + (b.clone() - y.clone()) * second)
}

/// Float evaluation of the (C1) expression.
pub fn c1_expression(f: &FunctionOracle, a: f64, y: f64, b: f64) -> f64 {
    c1_expression_in(f, &a, &y, &b).expect("float evaluation is total")
}

/// Float evaluation of the (C2) expression.
pub fn c2_expression(f: &FunctionOracle, a: f64, y: f64, b: f64) -> f64 {
    c2_expression_in(f, &a, &y, &b).expect("float evaluation is total")
}

/// The expression at the given (float) triple, computed in exact rationals
/// when the oracle allows it so that its sign is not a rounding artifact.
fn inequality_value(f: &FunctionOracle, cond: Condition, a: f64, y: f64, b: f64) -> f64 {
    if f.is_exact() {
        let r = |x: f64| <Rational as Scalar>::from_f64(x);
        let (ra, ry, rb) = (r(a), r(y), r(b));
        let exact = match cond {
            Condition::C1 => c1_expression_in(f, &ra, &ry, &rb),
            Condition::C2 => c2_expression_in(f, &ra, &ry, &rb),
        };
        if let Ok(v) = exact {
            return finite_nonzero_sign(v.to_f64(), &v);
        }
    }
    match cond {
        Condition::C1 => c1_expression(f, a, y, b),
        Condition::C2 => c2_expression(f, a, y, b),
    }
}

/// Keep the sign of an exact value even if its magnitude underflows.
fn finite_nonzero_sign(x: f64, exact: &Rational) -> f64 {
    use num_traits::Signed;
    if x == 0.0 && !exact.is_zero() {
        if exact.is_positive() {
            f64::MIN_POSITIVE
        } else {
            -f64::MIN_POSITIVE
        }
    } else {
        x
    }
}

fn check_triple(a: f64, y: f64, b: f64) -> Result<()> {
    if !(0.0 <= a && a < y && y < b && b <= 1.0) {
        return Err(Error::out_of_range(
            "(a, y, b)",
            format!("({a}, {y}, {b})"),
            "0 <= a < y < b <= 1",
        ));
    }
    Ok(())
}

/// Rounding allowance for slope differences built from these magnitudes.
fn rounding_scale(slopes: &[f64]) -> f64 {
    1e-12 * slopes.iter().map(|s| s.abs()).sum::<f64>()
}

fn non_convex(what: &str, x: f64, z: f64) -> Error {
    Error::NonConvex(format!(
        "secant slopes not monotone for {what} at ({x}, {z})"
    ))
}

/// Bisection for the root of a monotone `g` on `[lo, hi]` given the sign of
/// `g` at `lo`. Runs until the bracket stops splitting (or `MAX_BISECTIONS`)
/// rather than stopping at `SLOPE_TOL`: slopes of high powers near zero are
/// far smaller than the tolerance. Returns the point with the smallest `|g|`.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, positive_at_lo: bool) -> (f64, f64) {
    let mut best = (lo, f64::INFINITY);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid);
        if v.abs() < best.1.abs() {
            best = (mid, v);
        }
        if v == 0.0 {
            break;
        }
        if (v > 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

/// Find `a ∈ [0, y)` satisfying the (C1) constraint and evaluate the (C1)
/// expression there. Absent when no such `a` exists or `F` is affine on
/// `[0, b]`.
pub fn c1_check(f: &FunctionOracle, y: f64, b: f64) -> Result<Option<TripleCheck>> {
    if !(0.0 < y && y < b && b <= 1.0) {
        return Err(Error::out_of_range(
            "(y, b)",
            format!("({y}, {b})"),
            "0 < y < b <= 1",
        ));
    }
    let syb = secant(f, y, b);
    let target = f.d1(b) - f.d1(y);
    // g is nonincreasing in a for convex F.
    let g = |a: f64| syb - secant(f, a, y) - target;
    let at_zero = g(0.0);
    let at_y = syb - f.d1(b);
    let tol = rounding_scale(&[syb, f.d1(b), f.d1(y)]);
    if at_y > tol || at_zero < at_y - tol {
        return Err(non_convex("C1", y, b));
    }
    if at_zero < -tol || at_zero - at_y <= tol {
        return Ok(None);
    }
    let (a, residual) = if at_zero <= tol {
        (0.0, at_zero)
    } else {
        bisect(g, 0.0, y, true)
    };
    Ok(Some(TripleCheck {
        a,
        y,
        b,
        slope_residual: residual.abs(),
        inequality_value: inequality_value(f, Condition::C1, a, y, b),
        condition: Condition::C1,
    }))
}

/// Find `b ∈ (y, 1]` satisfying the (C2) constraint and evaluate the (C2)
/// expression there.
pub fn c2_check(f: &FunctionOracle, a: f64, y: f64) -> Result<Option<TripleCheck>> {
    if !(0.0 <= a && a < y && y < 1.0) {
        return Err(Error::out_of_range(
            "(a, y)",
            format!("({a}, {y})"),
            "0 <= a < y < 1",
        ));
    }
    let say = secant(f, a, y);
    let target = f.d1(y) - f.d1(a);
    // h is nondecreasing in b for convex F.
    let h = |b: f64| secant(f, y, b) - say - target;
    let at_one = h(1.0);
    let at_y = f.d1(a) - say;
    let tol = rounding_scale(&[say, f.d1(a), f.d1(y)]);
    if at_y > tol || at_one < at_y - tol {
        return Err(non_convex("C2", a, y));
    }
    if at_one < -tol || at_one - at_y <= tol {
        return Ok(None);
    }
    let (b, residual) = if at_one <= tol {
        (1.0, at_one)
    } else {
        bisect(h, y, 1.0, false)
    };
    Ok(Some(TripleCheck {
        a,
        y,
        b,
        slope_residual: residual.abs(),
        inequality_value: inequality_value(f, Condition::C2, a, y, b),
        condition: Condition::C2,
    }))
}

/// The (C1) expression at an arbitrary admissible triple, without the slope
/// constraint. Positive whenever `F'' > 0` and `F''' >= 0`.
pub fn c1_free_value(f: &FunctionOracle, a: f64, y: f64, b: f64) -> Result<f64> {
    check_triple(a, y, b)?;
    Ok(inequality_value(f, Condition::C1, a, y, b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithMembership,
    NoTriples,
    Violation {
        triple: TripleCheck,
    },
    NotConvex {
        condition: Condition,
        u: f64,
        v: f64,
    },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ConsistentWithMembership => f.write_str("consistent-with-membership"),
            Verdict::NoTriples => f.write_str("no-triples"),
            Verdict::Violation { triple: t } => write!(
                f,
                "violation: {} at ({:.15}, {:.15}, {:.15}) value {:e}",
                t.condition, t.a, t.y, t.b, t.inequality_value
            ),
            Verdict::NotConvex { condition, u, v } => {
                write!(f, "not-convex: {condition} at ({u}, {v})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub grid: usize,
    pub c1_triples: usize,
    pub c2_triples: usize,
    /// Triples whose bisection did not reach the slope tolerance.
    pub unconverged: usize,
    /// Values in `(-1e-12, 0]`.
    pub flagged: usize,
    pub min_value: Option<f64>,
    pub min_triple: Option<TripleCheck>,
    pub verdict: Verdict,
}

#[derive(Default)]
struct ScanAcc {
    c1: usize,
    c2: usize,
    unconverged: usize,
    flagged: usize,
    min: Option<TripleCheck>,
    not_convex: Option<(Condition, f64, f64)>,
}

impl ScanAcc {
    fn push(&mut self, t: TripleCheck) {
        if t.slope_residual > SLOPE_TOL {
            self.unconverged += 1;
            return;
        }
        match t.condition {
            Condition::C1 => self.c1 += 1,
            Condition::C2 => self.c2 += 1,
        }
        if t.inequality_value <= 0.0 && t.inequality_value > -FLAG_TOL {
            self.flagged += 1;
        }
        if self
            .min
            .is_none_or(|m| t.inequality_value < m.inequality_value)
        {
            self.min = Some(t);
        }
    }

    fn merge(mut self, other: ScanAcc) -> ScanAcc {
        self.c1 += other.c1;
        self.c2 += other.c2;
        self.unconverged += other.unconverged;
        self.flagged += other.flagged;
        if let Some(t) = other.min {
            if self
                .min
                .is_none_or(|m| t.inequality_value < m.inequality_value)
            {
                self.min = Some(t);
            }
        }
        if self.not_convex.is_none() {
            self.not_convex = other.not_convex;
        }
        self
    }

    fn note(&mut self, r: Result<Option<TripleCheck>>, cond: Condition, u: f64, v: f64) {
        match r {
            Ok(Some(t)) => self.push(t),
            Ok(None) => {}
            Err(_) => {
                if self.not_convex.is_none() {
                    self.not_convex = Some((cond, u, v));
                }
            }
        }
    }
}

/// Run `c1_check` on every grid pair `0 < y < b <= 1` and `c2_check` on every
/// pair `0 <= a < y < 1`, with grid spacing `1/grid`.
pub fn membership_scan(f: &FunctionOracle, grid: usize) -> Result<ScanReport> {
    if grid < 2 {
        return Err(Error::out_of_range("grid", grid, "grid >= 2"));
    }
    let step = |i: usize| i as f64 / grid as f64;
    // One accumulator per row, merged in row order for determinism.
    let rows: Vec<ScanAcc> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let mut acc = ScanAcc::default();
            if i > 0 {
                let y = step(i);
                for j in i + 1..=grid {
                    acc.note(c1_check(f, y, step(j)), Condition::C1, y, step(j));
                }
            }
            let a = step(i);
            for j in i + 1..grid {
                acc.note(c2_check(f, a, step(j)), Condition::C2, a, step(j));
            }
            acc
        })
        .collect();
    let acc = rows.into_iter().fold(ScanAcc::default(), ScanAcc::merge);
    let verdict = match (acc.not_convex, acc.min) {
        (Some((condition, u, v)), _) => Verdict::NotConvex { condition, u, v },
        (None, None) => Verdict::NoTriples,
        (None, Some(t)) if t.inequality_value <= -FLAG_TOL => Verdict::Violation { triple: t },
        (None, Some(_)) => Verdict::ConsistentWithMembership,
    };
    Ok(ScanReport {
        grid,
        c1_triples: acc.c1,
        c2_triples: acc.c2,
        unconverged: acc.unconverged,
        flagged: acc.flagged,
        min_value: acc.min.map(|t| t.inequality_value),
        min_triple: acc.min,
        verdict,
    })
}

/// `Σ_{i=0}^{m} (m+1-i)(3i-m) x^i`, exactly. Requires `x >= 1` unless
/// `force` is set.
pub fn weighted_power_sum(m: u32, x: &Rational, force: bool) -> Result<Rational> {
    if !force && *x < Rational::one() {
        return Err(Error::out_of_range("x", x, "x >= 1"));
    }
    let m = i64::from(m);
    // Horner from the top coefficient down.
    let mut acc = Rational::zero();
    for i in (0..=m).rev() {
        acc = acc * x + Rational::from_integer(((m + 1 - i) * (3 * i - m)).into());
    }
    Ok(acc)
}

/// `J(t) = t F(t + z) + z F(t)` with `z = (γ - t²)/(2t)`, for
/// `t ∈ [η, √γ]`.
pub fn j_eval<T: Scalar>(f: &FunctionOracle, gamma: T, t: T) -> Result<T> {
    let (eta, root) = j_interval(&gamma)?;
    if t < eta || t > root {
        return Err(Error::out_of_range("t", &t, "[eta, sqrt(gamma)]"));
    }
    j_unchecked(f, &gamma, &t)
}

fn j_interval<T: Scalar>(gamma: &T) -> Result<(T, T)> {
    if *gamma <= T::zero() || *gamma >= T::one() {
        return Err(Error::out_of_range(
            "gamma",
            gamma,
            "the open interval (0, 1)",
        ));
    }
    Ok((eta_of(gamma)?, sqrt_or_inexact(gamma, "sqrt(gamma)")?))
}

fn j_unchecked<T: Scalar>(f: &FunctionOracle, gamma: &T, t: &T) -> Result<T> {
    let z = (gamma.clone() - t.clone() * t.clone()) / (T::from_i64(2) * t.clone());
    Ok(t.clone() * f.value(&(t.clone() + z.clone()))? + z * f.value(t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JCheck {
    pub holds: bool,
    pub worst_t: f64,
    pub worst_excess: f64,
    pub boundary_max: f64,
}

/// Sample `J` (for `F - F(0)`) at `samples` evenly spaced points of
/// `[η, √γ]`, endpoints included; a single sample uses the midpoint. Holds
/// when no sample exceeds the larger endpoint value by more than `1e-9`.
pub fn j_boundary_check(f: &FunctionOracle, gamma: f64, samples: usize) -> Result<JCheck> {
    if samples == 0 {
        return Err(Error::out_of_range("samples", samples, "samples >= 1"));
    }
    let gamma = unit_gamma(gamma)?;
    let (eta, root) = j_interval(&gamma)?;
    let g = f.normalized_at_zero();
    let boundary_max = j_unchecked(&g, &gamma, &eta)?.max(j_unchecked(&g, &gamma, &root)?);
    let ts: Vec<f64> = if samples == 1 {
        vec![0.5 * (eta + root)]
    } else {
        (0..samples)
            .map(|i| {
                let t = eta + (root - eta) * i as f64 / (samples - 1) as f64;
                t.clamp(eta, root)
            })
            .collect()
    };
    let mut worst = (ts[0], f64::NEG_INFINITY);
    for t in ts {
        let excess = j_unchecked(&g, &gamma, &t)? - boundary_max;
        if excess > worst.1 {
            worst = (t, excess);
        }
    }
    Ok(JCheck {
        holds: worst.1 <= J_TOL,
        worst_t: worst.0,
        worst_excess: worst.1,
        boundary_max,
    })
}
