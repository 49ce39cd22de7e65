//! The clique/anticlique upper bound for `∫ F(d_W)` and goodness checks.

use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::function::FunctionOracle;
use crate::graphons::{eta_of, sqrt_or_inexact, ExtremalKind, StepGraphon};
use crate::scalar::{Scalar, FLOAT_TOL};

/// Float slack below which `is_good` reports a violation.
pub const GOODNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundTarget {
    Star(u32),
    Function(String),
}

impl fmt::Display for BoundTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundTarget::Star(k) => write!(f, "star:{k}"),
            BoundTarget::Function(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Clique,
    Anticlique,
    Tie,
}

impl Winner {
    /// The extremal graphon attaining the bound (the clique on a tie).
    pub fn extremal_kind(self) -> ExtremalKind {
        match self {
            Winner::Anticlique => ExtremalKind::Anticlique,
            Winner::Clique | Winner::Tie => ExtremalKind::Clique,
        }
    }
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Clique => "clique",
            Winner::Anticlique => "anticlique",
            Winner::Tie => "tie",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub gamma: T,
    pub eta: T,
    pub target: BoundTarget,
    pub clique_branch: T,
    pub anticlique_branch: T,
    pub bound: T,
    pub winner: Winner,
}

impl<T: Scalar> BoundReport<T> {
    fn new(gamma: T, eta: T, target: BoundTarget, clique: T, anticlique: T) -> Self {
        let diff = clique.clone() - anticlique.clone();
        let tied = if T::EXACT {
            diff.is_zero()
        } else {
            diff.abs().to_f64() <= FLOAT_TOL
        };
        let (winner, bound) = if tied {
            let bound = if clique >= anticlique {
                clique.clone()
            } else {
                anticlique.clone()
            };
            (Winner::Tie, bound)
        } else if clique > anticlique {
            (Winner::Clique, clique.clone())
        } else {
            (Winner::Anticlique, anticlique.clone())
        };
        Self {
            gamma,
            eta,
            target,
            clique_branch: clique,
            anticlique_branch: anticlique,
            bound,
            winner,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "gamma": self.gamma.to_json(),
            "eta": self.eta.to_json(),
            "clique_branch": self.clique_branch.to_json(),
            "anticlique_branch": self.anticlique_branch.to_json(),
            "bound": self.bound.to_json(),
            "winner": self.winner,
        });
        match &self.target {
            BoundTarget::Star(k) => v["k"] = json!(k),
            BoundTarget::Function(f) => v["function"] = json!(f),
        }
        v
    }
}

impl<T: Scalar> Serialize for BoundReport<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Accept `γ ∈ [0, 1]`, snapping float values within rounding of the ends.
pub(crate) fn unit_gamma<T: Scalar>(gamma: T) -> Result<T> {
    if !T::EXACT {
        let g = gamma.to_f64();
        if (-FLOAT_TOL..0.0).contains(&g) {
            return Ok(T::zero());
        }
        if g > 1.0 && g <= 1.0 + FLOAT_TOL {
            return Ok(T::one());
        }
    }
    if gamma < T::zero() || gamma > T::one() {
        return Err(Error::out_of_range("gamma", &gamma, "[0, 1]"));
    }
    Ok(gamma)
}

/// `max(γ^((k+1)/2), η + (1-η)η^k)` with `η = 1 - √(1-γ)`.
pub fn star_bound<T: Scalar>(k: u32, gamma: T) -> Result<BoundReport<T>> {
    if k == 0 {
        return Err(Error::out_of_range("k", k, "k >= 1"));
    }
    let gamma = unit_gamma(gamma)?;
    let clique = if k % 2 == 1 {
        gamma.powi(k.div_ceil(2))
    } else {
        sqrt_or_inexact(&gamma, "sqrt(gamma)")?.powi(k + 1)
    };
    let eta = eta_of(&gamma)?;
    let anticlique = eta.clone() + (T::one() - eta.clone()) * eta.powi(k);
    Ok(BoundReport::new(
        gamma,
        eta,
        BoundTarget::Star(k),
        clique,
        anticlique,
    ))
}

/// `max((1-√γ)F(0) + √γ F(√γ), (1-η)F(η) + η F(1))`.
pub fn f_bound<T: Scalar>(f: &FunctionOracle, gamma: T) -> Result<BoundReport<T>> {
    let gamma = unit_gamma(gamma)?;
    let s = sqrt_or_inexact(&gamma, "sqrt(gamma)")?;
    let eta = eta_of(&gamma)?;
    let clique = (T::one() - s.clone()) * f.value(&T::zero())? + s.clone() * f.value(&s)?;
    let anticlique = (T::one() - eta.clone()) * f.value(&eta)? + eta.clone() * f.value(&T::one())?;
    Ok(BoundReport::new(
        gamma,
        eta,
        BoundTarget::Function(f.to_string()),
        clique,
        anticlique,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct Goodness<T> {
    pub holds: bool,
    #[serde(serialize_with = "serialize_scalar")]
    pub slack: T,
}

fn serialize_scalar<T: Scalar, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.to_json().serialize(s)
}

/// Slack of the goodness inequality for `F` on `W`: bound minus functional.
/// Exact inputs must have nonnegative slack; floats may dip to `-1e-9`.
pub fn is_good<T: Scalar>(f: &FunctionOracle, w: &StepGraphon<T>) -> Result<Goodness<T>> {
    let report = f_bound(f, w.edge_density())?;
    let slack = report.bound - w.f_functional(f)?;
    let holds = if T::EXACT {
        slack >= T::zero()
    } else {
        slack.to_f64() >= -GOODNESS_TOL
    };
    Ok(Goodness { holds, slack })
}
