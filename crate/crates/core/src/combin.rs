//! Binomial coefficients in arbitrary precision.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// `C(n, k)` for nonnegative arguments; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    // acc stays integral: after step i it equals C(n - k + i, i).
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// `C(n, k)` with the convention that it vanishes for `k < 0` or `k > n`.
/// Negative `n` is not needed anywhere and also yields zero.
pub fn binomial_signed(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    BigInt::from(binomial(n as u64, k as u64))
}

/// Small-argument binomial in `u128`, `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal_rows() {
        for n in 0..30u64 {
            for k in 1..n {
                assert_eq!(
                    binomial(n, k),
                    binomial(n - 1, k - 1) + binomial(n - 1, k),
                    "C({n},{k})"
                );
            }
            assert_eq!(binomial(n, 0), BigUint::one());
            assert_eq!(binomial(n, n), BigUint::one());
            assert_eq!(binomial(n, n + 1), BigUint::zero());
        }
    }

    #[test]
    fn signed_conventions() {
        assert_eq!(binomial_signed(5, -1), BigInt::zero());
        assert_eq!(binomial_signed(-3, 2), BigInt::zero());
        assert_eq!(binomial_signed(1, 0), BigInt::one());
        assert_eq!(binomial_signed(10, 3), BigInt::from(120));
    }

    #[test]
    fn u128_matches_big() {
        assert_eq!(
            binomial_u128(60, 30).map(BigUint::from),
            Some(binomial(60, 30))
        );
        assert_eq!(binomial_u128(20, 25), Some(0));
    }
}
