//! Step graphons: a partition of `[0, 1]` into parts of measure `α_i` and a
//! symmetric matrix `β` of values on the products of parts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::function::FunctionOracle;
use crate::scalar::{Scalar, FLOAT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremalKind {
    Clique,
    Anticlique,
}

/// Which constant block [`StepGraphon::corner`] adds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerKind {
    /// New part of measure `λ` in front, zero against everything.
    Zero,
    /// New part of measure `λ` at the end, one against everything.
    One,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon<T> {
    alpha: Vec<T>,
    beta: Vec<Vec<T>>,
}

impl<T: Scalar> StepGraphon<T> {
    /// Validate and build. Parts of measure zero are dropped together with
    /// their row and column.
    pub fn new(alpha: Vec<T>, beta: Vec<Vec<T>>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 {
            return Err(Error::InvalidGraphon("no parts".into()));
        }
        if beta.len() != n || beta.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGraphon(format!("beta must be {n}x{n}")));
        }
        let slack = if T::EXACT { 0.0 } else { FLOAT_TOL };
        let lo = T::from_f64(-slack);
        let hi = T::from_f64(1.0 + slack);
        if alpha.iter().any(|a| *a < T::zero()) {
            return Err(Error::InvalidGraphon("negative part measure".into()));
        }
        let total = alpha.iter().cloned().fold(T::zero(), |s, a| s + a);
        if !total.close_to(&T::one(), FLOAT_TOL) {
            return Err(Error::InvalidGraphon(format!(
                "part measures sum to {total}, not 1"
            )));
        }
        for (i, row) in beta.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v < lo || *v > hi {
                    return Err(Error::InvalidGraphon(format!(
                        "beta[{i}][{j}] = {v} outside [0, 1]"
                    )));
                }
                if !v.close_to(&beta[j][i], FLOAT_TOL) {
                    return Err(Error::InvalidGraphon(format!(
                        "beta not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&i| !alpha[i].is_zero()).collect();
        if keep.is_empty() {
            return Err(Error::InvalidGraphon("all parts have measure zero".into()));
        }
        if keep.len() == n {
            return Ok(Self { alpha, beta });
        }
        let alpha = keep.iter().map(|&i| alpha[i].clone()).collect();
        let beta = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| beta[i][j].clone()).collect())
            .collect();
        Ok(Self { alpha, beta })
    }

    /// The one-part graphon with value `gamma`.
    pub fn constant(gamma: T) -> Result<Self> {
        Self::new(vec![T::one()], vec![vec![gamma]])
    }

    pub fn parts(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Vec<T>] {
        &self.beta
    }

    /// Degree value `d_i = Σ_j α_j β_ij` on each part.
    pub fn degrees(&self) -> Vec<T> {
        self.beta
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.alpha)
                    .fold(T::zero(), |s, (b, a)| s + b.clone() * a.clone())
            })
            .collect()
    }

    /// `γ = Σ_i α_i d_i`.
    pub fn edge_density(&self) -> T {
        self.weighted_sum(self.degrees())
    }

    /// `t(S_k, W) = Σ_i α_i d_i^k`.
    pub fn star_density(&self, k: u32) -> T {
        self.weighted_sum(self.degrees().into_iter().map(|d| d.powi(k)))
    }

    /// `Σ_i α_i F(d_i)`.
    pub fn f_functional(&self, f: &FunctionOracle) -> Result<T> {
        let values = self
            .degrees()
            .iter()
            .map(|d| f.value(d))
            .collect::<Result<Vec<T>>>()?;
        Ok(self.weighted_sum(values))
    }

    fn weighted_sum(&self, values: impl IntoIterator<Item = T>) -> T {
        self.alpha
            .iter()
            .zip(values)
            .fold(T::zero(), |s, (a, v)| s + a.clone() * v)
    }

    /// The clique (indicator of `A×A`, `|A| = √γ`) or anticlique
    /// (`1 - ` a clique, with `η = 1 - √(1-γ)`) of edge density `gamma`.
    pub fn extremal(kind: ExtremalKind, gamma: T) -> Result<Self> {
        check_unit("gamma", &gamma)?;
        let (o, z) = (T::one(), T::zero());
        match kind {
            ExtremalKind::Clique => {
                let s = sqrt_or_inexact(&gamma, "sqrt(gamma)")?;
                Self::new(
                    vec![s.clone(), o.clone() - s],
                    vec![vec![o, z.clone()], vec![z.clone(), z]],
                )
            }
            ExtremalKind::Anticlique => {
                let eta = eta_of(&gamma)?;
                Self::new(
                    vec![o.clone() - eta.clone(), eta],
                    vec![vec![z, o.clone()], vec![o.clone(), o]],
                )
            }
        }
    }

    /// `[λ, W]` (zero kind) or `[W, λ]` (one kind).
    pub fn corner(&self, lambda: T, kind: CornerKind) -> Result<Self> {
        check_unit("lambda", &lambda)?;
        let (o, z) = (T::one(), T::zero());
        if lambda == o {
            let fill = match kind {
                CornerKind::Zero => z,
                CornerKind::One => o,
            };
            return Self::constant(fill);
        }
        let rest = o.clone() - lambda.clone();
        let scaled = self.alpha.iter().map(|a| a.clone() * rest.clone());
        let n = self.parts();
        match kind {
            CornerKind::Zero => {
                let alpha = std::iter::once(lambda).chain(scaled).collect();
                let mut beta = vec![vec![z.clone(); n + 1]];
                for row in &self.beta {
                    beta.push(
                        std::iter::once(z.clone())
                            .chain(row.iter().cloned())
                            .collect(),
                    );
                }
                Self::new(alpha, beta)
            }
            CornerKind::One => {
                let alpha = scaled.chain(std::iter::once(lambda)).collect();
                let mut beta: Vec<Vec<T>> = self
                    .beta
                    .iter()
                    .map(|row| {
                        row.iter()
                            .cloned()
                            .chain(std::iter::once(o.clone()))
                            .collect()
                    })
                    .collect();
                beta.push(vec![o; n + 1]);
                Self::new(alpha, beta)
            }
        }
    }

    /// `1 - W` on the same parts.
    pub fn complement(&self) -> Self {
        Self {
            alpha: self.alpha.clone(),
            beta: self
                .beta
                .iter()
                .map(|row| row.iter().map(|b| T::one() - b.clone()).collect())
                .collect(),
        }
    }

    /// Indicator of `A×A ∪ A×B ∪ B×A` with `|A| = y`, `|B| = z`.
    pub fn l_shaped(y: T, z: T) -> Result<Self> {
        if y < T::zero() || z < T::zero() || y.clone() + z.clone() > T::one() {
            return Err(Error::out_of_range(
                "(y, z)",
                format!("({y}, {z})"),
                "y, z >= 0 and y + z <= 1",
            ));
        }
        let (o, zero) = (T::one(), T::zero());
        let rest = o.clone() - y.clone() - z.clone();
        Self::new(
            vec![y, z, rest],
            vec![
                vec![o.clone(), o.clone(), zero.clone()],
                vec![o, zero.clone(), zero.clone()],
                vec![zero.clone(), zero.clone(), zero],
            ],
        )
    }

    pub fn to_f64(&self) -> StepGraphon<f64> {
        StepGraphon {
            alpha: self.alpha.iter().map(|a| a.to_f64()).collect(),
            beta: self
                .beta
                .iter()
                .map(|row| row.iter().map(|b| b.to_f64()).collect())
                .collect(),
        }
    }

    /// `{"alpha": [...], "beta": [[...], ...]}`; rationals as `"p/q"` strings.
    pub fn to_json(&self) -> Value {
        json!({
            "alpha": self.alpha.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "beta": self.beta.iter()
                .map(|row| row.iter().map(Scalar::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidGraphon(format!("JSON graphon needs {what}"));
        let alpha = v
            .get("alpha")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("an \"alpha\" array"))?
            .iter()
            .map(T::from_json)
            .collect::<Result<Vec<T>>>()?;
        let beta = v
            .get("beta")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("a \"beta\" matrix"))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("array rows in \"beta\""))?
                    .iter()
                    .map(T::from_json)
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alpha, beta)
    }
}

impl<T: Scalar> Serialize for StepGraphon<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

fn check_unit<T: Scalar>(name: &'static str, v: &T) -> Result<()> {
    if *v < T::zero() || *v > T::one() {
        return Err(Error::out_of_range(name, v, "[0, 1]"));
    }
    Ok(())
}

pub(crate) fn sqrt_or_inexact<T: Scalar>(v: &T, what: &str) -> Result<T> {
    v.sqrt()
        .ok_or_else(|| Error::Inexact(format!("{what} for {v}")))
}

/// `η = 1 - √(1 - γ)`.
pub fn eta_of<T: Scalar>(gamma: &T) -> Result<T> {
    let root = sqrt_or_inexact(&(T::one() - gamma.clone()), "sqrt(1 - gamma)")?;
    Ok(T::one() - root)
}

/// A random step graphon with the given number of parts and edge density
/// `gamma` (up to rounding), reproducible from `seed`.
///
/// Measures are normalized uniform draws and `β` is uniform symmetric; `β` is
/// then blended affinely toward the all-ones matrix (if its density is below
/// `gamma`) or toward zero (otherwise) until the density is `gamma`.
pub fn random_step_graphon(parts: usize, gamma: f64, seed: u64) -> Result<StepGraphon<f64>> {
    if parts == 0 {
        return Err(Error::out_of_range("parts", parts, "parts >= 1"));
    }
    check_unit("gamma", &gamma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 1 - u lies in (0, 1], so no part vanishes.
    let raw: Vec<f64> = (0..parts).map(|_| 1.0 - rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let alpha: Vec<f64> = raw.iter().map(|a| a / total).collect();
    let mut beta = vec![vec![0.0; parts]; parts];
    #[allow(clippy::needless_range_loop)]
    for i in 0..parts {
        for j in i..parts {
            let v = rng.random::<f64>();
            beta[i][j] = v;
            beta[j][i] = v;
        }
    }
    let raw_density = density_of(&alpha, &beta);
    let blended: Vec<Vec<f64>> = if gamma >= raw_density {
        let t = if raw_density < 1.0 {
            (gamma - raw_density) / (1.0 - raw_density)
        } else {
            0.0
        };
        beta.iter()
            .map(|row| row.iter().map(|b| ((1.0 - t) * b + t).min(1.0)).collect())
            .collect()
    } else {
        let s = gamma / raw_density;
        beta.iter()
            .map(|row| row.iter().map(|b| s * b).collect())
            .collect()
    };
    StepGraphon::new(alpha, blended)
}

fn density_of(alpha: &[f64], beta: &[Vec<f64>]) -> f64 {
    alpha
        .iter()
        .zip(beta)
        .map(|(ai, row)| ai * row.iter().zip(alpha).map(|(b, aj)| b * aj).sum::<f64>())
        .sum()
}

/// Random instance used by the property suites: 1 to `max_parts` parts and a
/// uniform density, both drawn from `seed`.
pub fn random_instance(max_parts: usize, seed: u64) -> Result<StepGraphon<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let parts = rng.random_range(1..=max_parts.max(1));
    let gamma = rng.random::<f64>();
    random_step_graphon(parts, gamma, seed)
}
