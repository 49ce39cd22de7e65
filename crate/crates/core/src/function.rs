//! Real functions on `[0, 1]` together with their first derivatives.
//!
//! Power and piecewise-linear functions evaluate exactly on rationals; their
//! affine shifts and reparametrizations stay exact. Custom closures and the
//! smoothed piecewise-linear kind are float-only.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rational_to_f64, Rational, Scalar};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A float-only function supplied as closures.
#[derive(Clone)]
pub struct CustomFn {
    pub name: String,
    pub value: RealFn,
    pub deriv1: RealFn,
    pub deriv2: RealFn,
    pub deriv3: Option<RealFn>,
    pub convex: bool,
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn")
            .field("name", &self.name)
            .field("convex", &self.convex)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum FunctionOracle {
    /// `x ↦ x^k`, `k >= 1`.
    Power(u32),
    /// Linear interpolation through breakpoints `(x_i, y_i)` with `x_0 = 0`,
    /// `x_last = 1`; extended linearly outside `[0, 1]`.
    PiecewiseLinear(Vec<(Rational, Rational)>),
    /// A piecewise-linear function with each kink replaced by a softplus of
    /// the given width, which makes it smooth and strictly convex when the
    /// original is convex.
    Smoothed {
        base: Vec<(Rational, Rational)>,
        width: f64,
    },
    /// `x ↦ F(x) + a + b·x`.
    Affine {
        inner: Box<FunctionOracle>,
        a: Rational,
        b: Rational,
    },
    /// `x ↦ F(offset + scale·x)`.
    Reparam {
        inner: Box<FunctionOracle>,
        offset: Rational,
        scale: Rational,
    },
    Custom(CustomFn),
}

impl FunctionOracle {
    pub fn power(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidFunction(
                "power exponent must be at least 1".into(),
            ));
        }
        Ok(FunctionOracle::Power(k))
    }

    pub fn piecewise_linear(points: Vec<(Rational, Rational)>) -> Result<Self> {
        validate_breakpoints(&points)?;
        Ok(FunctionOracle::PiecewiseLinear(points))
    }

    /// The convex function with `F(0) = F(1/5) = 0`, `F(3/5) = 1`, `F(1) = 3`,
    /// linear in between; convex but not good for every graphon.
    pub fn counterexample() -> Self {
        let q = |s: &str| parse_rational(s).expect("literal");
        FunctionOracle::PiecewiseLinear(vec![
            (q("0"), q("0")),
            (q("1/5"), q("0")),
            (q("3/5"), q("1")),
            (q("1"), q("3")),
        ])
    }

    pub fn smoothed(points: Vec<(Rational, Rational)>, width: f64) -> Result<Self> {
        validate_breakpoints(&points)?;
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidFunction(format!(
                "smoothing width {width} must be positive"
            )));
        }
        Ok(FunctionOracle::Smoothed {
            base: points,
            width,
        })
    }

    pub fn custom(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        convex: bool,
    ) -> Self {
        FunctionOracle::Custom(CustomFn {
            name: name.into(),
            value: Arc::new(value),
            deriv1: Arc::new(deriv1),
            deriv2: Arc::new(deriv2),
            deriv3: None,
            convex,
        })
    }

    /// Attach a third derivative to a custom function; no-op otherwise.
    pub fn with_third_derivative(self, d3: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        match self {
            FunctionOracle::Custom(mut c) => {
                c.deriv3 = Some(Arc::new(d3));
                FunctionOracle::Custom(c)
            }
            other => other,
        }
    }

    pub fn plus_linear(&self, a: Rational, b: Rational) -> Self {
        FunctionOracle::Affine {
            inner: Box::new(self.clone()),
            a,
            b,
        }
    }

    pub fn reparam(&self, offset: Rational, scale: Rational) -> Self {
        FunctionOracle::Reparam {
            inner: Box::new(self.clone()),
            offset,
            scale,
        }
    }

    /// `x ↦ F(1 - x)`.
    pub fn reflected(&self) -> Self {
        self.reparam(Rational::one(), -Rational::one())
    }

    /// `x ↦ F(x) - F(0)`.
    pub fn normalized_at_zero(&self) -> Self {
        let f0 = match self.value::<Rational>(&Rational::zero()) {
            Ok(v) => v,
            Err(_) => <Rational as Scalar>::from_f64(self.eval(0.0)),
        };
        self.plus_linear(-f0, Rational::zero())
    }

    /// Whether values are exact on rational arguments.
    pub fn is_exact(&self) -> bool {
        match self {
            FunctionOracle::Power(_) | FunctionOracle::PiecewiseLinear(_) => true,
            FunctionOracle::Smoothed { .. } | FunctionOracle::Custom(_) => false,
            FunctionOracle::Affine { inner, .. } | FunctionOracle::Reparam { inner, .. } => {
                inner.is_exact()
            }
        }
    }

    /// Whether the function is known to be convex on its domain.
    pub fn is_declared_convex(&self) -> bool {
        match self {
            FunctionOracle::Power(_) => true,
            FunctionOracle::PiecewiseLinear(p) | FunctionOracle::Smoothed { base: p, .. } => {
                slopes(p).windows(2).all(|w| w[0] <= w[1])
            }
            FunctionOracle::Affine { inner, .. } | FunctionOracle::Reparam { inner, .. } => {
                inner.is_declared_convex()
            }
            FunctionOracle::Custom(c) => c.convex,
        }
    }

    pub fn value<T: Scalar>(&self, x: &T) -> Result<T> {
        match self {
            FunctionOracle::Power(k) => Ok(x.powi(*k)),
            FunctionOracle::PiecewiseLinear(p) => {
                let (i, j) = segment(p, x);
                let (x0, y0) = (T::from_rational(&p[i].0), T::from_rational(&p[i].1));
                let (x1, y1) = (T::from_rational(&p[j].0), T::from_rational(&p[j].1));
                Ok(y0.clone() + (y1 - y0) * (x.clone() - x0.clone()) / (x1 - x0))
            }
            FunctionOracle::Affine { inner, a, b } => {
                Ok(inner.value(x)? + T::from_rational(a) + T::from_rational(b) * x.clone())
            }
            FunctionOracle::Reparam {
                inner,
                offset,
                scale,
            } => inner.value(&(T::from_rational(offset) + T::from_rational(scale) * x.clone())),
            FunctionOracle::Smoothed { .. } | FunctionOracle::Custom(_) => self.float_only(0, x),
        }
    }

    pub fn deriv1<T: Scalar>(&self, x: &T) -> Result<T> {
        match self {
            FunctionOracle::Power(k) => Ok(T::from_i64(*k as i64) * x.powi(k - 1)),
            FunctionOracle::PiecewiseLinear(p) => {
                let (i, j) = segment(p, x);
                Ok(T::from_rational(
                    &((&p[j].1 - &p[i].1) / (&p[j].0 - &p[i].0)),
                ))
            }
            FunctionOracle::Affine { inner, b, .. } => Ok(inner.deriv1(x)? + T::from_rational(b)),
            FunctionOracle::Reparam {
                inner,
                offset,
                scale,
            } => {
                let s = T::from_rational(scale);
                Ok(s.clone() * inner.deriv1(&(T::from_rational(offset) + s * x.clone()))?)
            }
            FunctionOracle::Smoothed { .. } | FunctionOracle::Custom(_) => self.float_only(1, x),
        }
    }

    pub fn deriv2<T: Scalar>(&self, x: &T) -> Result<T> {
        match self {
            FunctionOracle::Power(k) => {
                if *k < 2 {
                    Ok(T::zero())
                } else {
                    Ok(T::from_i64((*k as i64) * (*k as i64 - 1)) * x.powi(k - 2))
                }
            }
            FunctionOracle::PiecewiseLinear(_) => Ok(T::zero()),
            FunctionOracle::Affine { inner, .. } => inner.deriv2(x),
            FunctionOracle::Reparam {
                inner,
                offset,
                scale,
            } => {
                let s = T::from_rational(scale);
                Ok(s.clone()
                    * s.clone()
                    * inner.deriv2(&(T::from_rational(offset) + s * x.clone()))?)
            }
            FunctionOracle::Smoothed { .. } | FunctionOracle::Custom(_) => self.float_only(2, x),
        }
    }

    /// Third derivative where the kind provides one.
    pub fn deriv3(&self, x: f64) -> Option<f64> {
        match self {
            FunctionOracle::Power(k) => Some(if *k < 3 {
                0.0
            } else {
                let kf = *k as f64;
                kf * (kf - 1.0) * (kf - 2.0) * x.powi(*k as i32 - 3)
            }),
            FunctionOracle::PiecewiseLinear(_) => Some(0.0),
            FunctionOracle::Smoothed { .. } => Some(self.float_derivative(3, x)),
            FunctionOracle::Affine { inner, .. } => inner.deriv3(x),
            FunctionOracle::Reparam {
                inner,
                offset,
                scale,
            } => {
                let s = rational_to_f64(scale);
                inner
                    .deriv3(rational_to_f64(offset) + s * x)
                    .map(|d| s * s * s * d)
            }
            FunctionOracle::Custom(c) => c.deriv3.as_ref().map(|d| d(x)),
        }
    }

    /// Float shorthand for `value`.
    pub fn eval(&self, x: f64) -> f64 {
        self.value::<f64>(&x).expect("float evaluation is total")
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.deriv1::<f64>(&x).expect("float evaluation is total")
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.deriv2::<f64>(&x).expect("float evaluation is total")
    }

    fn float_only<T: Scalar>(&self, order: u8, x: &T) -> Result<T> {
        if T::EXACT {
            return Err(Error::Inexact(self.to_string()));
        }
        Ok(T::from_f64(self.float_derivative(order, x.to_f64())))
    }

    fn float_derivative(&self, order: u8, x: f64) -> f64 {
        match self {
            FunctionOracle::Custom(c) => match order {
                0 => (c.value)(x),
                1 => (c.deriv1)(x),
                2 => (c.deriv2)(x),
                _ => c.deriv3.as_ref().map_or(f64::NAN, |d| d(x)),
            },
            FunctionOracle::Smoothed { base, width } => smoothed_derivative(base, *width, order, x),
            other => match order {
                0 => other.eval(x),
                1 => other.d1(x),
                2 => other.d2(x),
                _ => other.deriv3(x).unwrap_or(f64::NAN),
            },
        }
    }
}

fn validate_breakpoints(points: &[(Rational, Rational)]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InvalidFunction(
            "need at least two breakpoints".into(),
        ));
    }
    if !points[0].0.is_zero() || !points[points.len() - 1].0.is_one() {
        return Err(Error::InvalidFunction(
            "breakpoints must start at 0 and end at 1".into(),
        ));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidFunction(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn slopes(p: &[(Rational, Rational)]) -> Vec<Rational> {
    p.windows(2)
        .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
        .collect()
}

/// Indices of the segment used at `x`: the one whose half-open interval
/// `[x_i, x_{i+1})` contains it, the last one at `x >= 1`, the first below 0.
fn segment<T: Scalar>(p: &[(Rational, Rational)], x: &T) -> (usize, usize) {
    let last = p.len() - 1;
    let mut i = 0;
    while i + 1 < last && *x >= T::from_rational(&p[i + 1].0) {
        i += 1;
    }
    (i, i + 1)
}

/// `F*(x) = y_0 + s_0 x + Σ Δs_i · w·softplus((x - x_i)/w)` over interior kinks.
fn smoothed_derivative(p: &[(Rational, Rational)], w: f64, order: u8, x: f64) -> f64 {
    let s = slopes(p);
    let y0 = rational_to_f64(&p[0].1);
    let s0 = rational_to_f64(&s[0]);
    let mut acc = match order {
        0 => y0 + s0 * x,
        1 => s0,
        _ => 0.0,
    };
    for (i, ds) in s.windows(2).map(|w| &w[1] - &w[0]).enumerate() {
        let xi = rational_to_f64(&p[i + 1].0);
        let ds = rational_to_f64(&ds);
        let u = (x - xi) / w;
        let sig = 1.0 / (1.0 + (-u).exp());
        // sig(1 - sig) without cancellation in the tails.
        let e = (-u.abs()).exp();
        let bump = e / ((1.0 + e) * (1.0 + e));
        acc += ds
            * match order {
                0 => w * softplus(u),
                1 => sig,
                2 => bump / w,
                _ => bump * (1.0 - 2.0 * sig) / (w * w),
            };
    }
    acc
}

fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u
    } else {
        u.exp().ln_1p()
    }
}

impl fmt::Display for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts = |p: &[(Rational, Rational)]| {
            p.iter()
                .map(|(x, y)| format!("{x},{y}"))
                .collect::<Vec<_>>()
                .join(";")
        };
        match self {
            FunctionOracle::Power(k) => write!(f, "power:{k}"),
            FunctionOracle::PiecewiseLinear(p) => write!(f, "pwl:{}", pts(p)),
            FunctionOracle::Smoothed { base, width } => write!(f, "smooth:{width}:{}", pts(base)),
            FunctionOracle::Affine { inner, a, b } => write!(f, "({inner})+{a}+{b}x"),
            FunctionOracle::Reparam {
                inner,
                offset,
                scale,
            } => {
                write!(f, "({inner})∘({offset}+{scale}x)")
            }
            FunctionOracle::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

impl std::str::FromStr for FunctionOracle {
    type Err = Error;

    /// `power:k`, `pwl:x0,y0;x1,y1;…`, `smooth:w:x0,y0;…`, or `counterexample`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "counterexample" {
            return Ok(Self::counterexample());
        }
        let parse_points = |body: &str| -> Result<Vec<(Rational, Rational)>> {
            body.split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|pair| {
                    let (x, y) = pair
                        .split_once(',')
                        .ok_or_else(|| Error::Parse(pair.to_string()))?;
                    Ok((parse_rational(x)?, parse_rational(y)?))
                })
                .collect()
        };
        if let Some(k) = s.strip_prefix("power:") {
            let k = k
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(s.to_string()))?;
            return Self::power(k);
        }
        if let Some(body) = s.strip_prefix("pwl:") {
            return Self::piecewise_linear(parse_points(body)?);
        }
        if let Some(rest) = s.strip_prefix("smooth:") {
            let (w, body) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(s.to_string()))?;
            let w = w
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(s.to_string()))?;
            return Self::smoothed(parse_points(body)?, w);
        }
        Err(Error::InvalidFunction(format!(
            "unknown function spec {s:?}; expected power:k, pwl:x,y;..., smooth:w:x,y;... or counterexample"
        )))
    }
}

/// True when every breakpoint slope is nonnegative; used to sanity-check specs.
pub fn is_nondecreasing(p: &[(Rational, Rational)]) -> bool {
    slopes(p).iter().all(|s| !s.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn counterexample_values() {
        let f = FunctionOracle::counterexample();
        assert!(f.is_exact());
        assert!(f.is_declared_convex());
        assert_eq!(f.value(&q("0")).unwrap(), q("0"));
        assert_eq!(f.value(&q("1/5")).unwrap(), q("0"));
        assert_eq!(f.value(&q("2/5")).unwrap(), q("1/2"));
        assert_eq!(f.value(&q("3/5")).unwrap(), q("1"));
        assert_eq!(f.value(&q("13/20")).unwrap(), q("5/4"));
        assert_eq!(f.value(&q("1")).unwrap(), q("3"));
        assert_eq!(f.deriv1(&q("1/2")).unwrap(), q("5/2"));
        assert_eq!(f.deriv1(&q("3/5")).unwrap(), q("5"));
        assert_eq!(f.deriv1(&q("1")).unwrap(), q("5"));
    }

    #[test]
    fn power_derivatives() {
        let f = FunctionOracle::power(3).unwrap();
        assert_eq!(f.value(&q("1/2")).unwrap(), q("1/8"));
        assert_eq!(f.deriv1(&q("1/2")).unwrap(), q("3/4"));
        assert_eq!(f.deriv2(&q("1/2")).unwrap(), q("3"));
        assert_eq!(f.deriv3(0.5), Some(6.0));
        let lin = FunctionOracle::power(1).unwrap();
        assert_eq!(lin.deriv2(&0.3f64).unwrap(), 0.0);
        assert_eq!(
            FunctionOracle::power(2).unwrap().deriv2(&0.0f64).unwrap(),
            2.0
        );
        assert!(FunctionOracle::power(0).is_err());
    }

    #[test]
    fn transforms_stay_exact() {
        let f = FunctionOracle::power(2).unwrap();
        let g = f.reflected();
        assert_eq!(g.value(&q("1/4")).unwrap(), q("9/16"));
        assert_eq!(g.deriv1(&q("1/4")).unwrap(), q("-3/2"));
        assert_eq!(g.deriv2(&q("1/4")).unwrap(), q("2"));
        let h = f.plus_linear(q("1"), q("-2"));
        assert_eq!(h.value(&q("1/2")).unwrap(), q("1/4"));
        assert_eq!(h.deriv1(&q("1/2")).unwrap(), q("-1"));
        let r = f.reparam(q("1/4"), q("1/2"));
        assert_eq!(r.value(&q("1")).unwrap(), q("9/16"));
        assert_eq!(r.deriv1(&q("1")).unwrap(), q("3/4"));
        assert_eq!(r.deriv3(1.0), Some(0.0));
        assert!(r.is_exact());
        assert_eq!(
            f.plus_linear(q("3"), q("0"))
                .normalized_at_zero()
                .value(&q("0"))
                .unwrap(),
            q("0")
        );
    }

    #[test]
    fn custom_is_float_only() {
        let f = FunctionOracle::custom("exp", f64::exp, f64::exp, f64::exp, true)
            .with_third_derivative(f64::exp);
        assert!(!f.is_exact());
        assert!(f.value(&q("1/2")).is_err());
        assert!((f.eval(1.0) - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(f.deriv3(0.0), Some(1.0));
    }

    #[test]
    fn smoothed_tracks_base() {
        let base = match FunctionOracle::counterexample() {
            FunctionOracle::PiecewiseLinear(p) => p,
            _ => unreachable!(),
        };
        let s = FunctionOracle::smoothed(base, 1e-3).unwrap();
        let f = FunctionOracle::counterexample();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!((s.eval(x) - f.eval(x)).abs() < 2e-3, "x={x}");
            assert!(s.d2(x) >= 0.0);
        }
        // derivative consistency by central differences
        let h = 1e-6;
        for x in [0.15, 0.2, 0.41, 0.6] {
            let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
            assert!((fd - s.d1(x)).abs() < 1e-4, "x={x}");
        }
    }

    #[test]
    fn parse_specs() {
        let f: FunctionOracle = "pwl:0,0;1/5,0;3/5,1;1,3".parse().unwrap();
        assert_eq!(f.to_string(), FunctionOracle::counterexample().to_string());
        assert!(matches!(
            "power:4".parse::<FunctionOracle>().unwrap(),
            FunctionOracle::Power(4)
        ));
        assert!("pwl:0,0;1/2,1".parse::<FunctionOracle>().is_err());
        assert!("pwl:0,0;0.7,1;0.5,2;1,3".parse::<FunctionOracle>().is_err());
        assert!("cosine".parse::<FunctionOracle>().is_err());
        assert!("smooth:0.01:0,0;1/5,0;3/5,1;1,3"
            .parse::<FunctionOracle>()
            .is_ok());
        assert!("smooth:-1:0,0;1,1".parse::<FunctionOracle>().is_err());
    }

    #[test]
    fn nonconvex_pwl_is_flagged() {
        let f: FunctionOracle = "pwl:0,0;1/2,1;1,1".parse().unwrap();
        assert!(!f.is_declared_convex());
        assert!(is_nondecreasing(&[(q("0"), q("0")), (q("1"), q("1"))]));
    }
}
