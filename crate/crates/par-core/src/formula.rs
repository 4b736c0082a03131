//! Closed forms for the average-case ratios and tile counts of the built-in
//! protocols, used to cross-check measured values with exact equality.

use alloc::string::String;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Errors from the closed-form evaluator.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("unknown formula `{0}`")]
    UnknownName(String),
    #[error("formula `{name}` takes {expected} parameter(s)")]
    BadParams { name: String, expected: usize },
    #[error("{0}")]
    OutOfDomain(String),
}

fn int(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// `2^e` for any sign of `e`.
fn pow2(e: i64) -> BigRational {
    let shifted = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from(shifted)
    } else {
        BigRational::new(BigInt::one(), shifted)
    }
}

fn check_k(k: u32) -> Result<(), FormulaError> {
    if k < 1 || k > 64 {
        return Err(FormulaError::OutOfDomain(alloc::format!(
            "k = {k} outside supported range 1..=64"
        )));
    }
    Ok(())
}

fn check_kg(k: u32, g: u32) -> Result<(), FormulaError> {
    check_k(k)?;
    if g > k {
        return Err(FormulaError::OutOfDomain(alloc::format!("g = {g} exceeds k = {k}")));
    }
    Ok(())
}

/// Lower bound on the average objective ratio of *any* millionaires
/// protocol under the uniform distribution: `2^k - 1/2 + 2^-(k+1)`.
pub fn mp_lower_avg_obj(k: u32) -> BigRational {
    pow2(k as i64) - int(1) / int(2) + pow2(-(k as i64 + 1))
}

/// Millionaires bisection protocol, average objective ratio:
/// `3 * 2^(k-1) - 1/2`.
pub fn mp_bisection_avg_obj(k: u32) -> BigRational {
    int(3) * pow2(k as i64 - 1) - int(1) / int(2)
}

/// Millionaires bisection protocol, average subjective ratio: `k/2 + 1`.
/// Both per-party ratios equal it.
pub fn mp_bisection_avg_subj(k: u32) -> BigRational {
    int(k as i64) / int(2) + int(1)
}

/// Largest attainable average objective ratio for millionaires (full
/// revelation): `(4^k + 1) / 2`.
pub fn mp_largest_avg_obj(k: u32) -> BigRational {
    (pow2(2 * k as i64) + int(1)) / int(2)
}

/// Bounded-bisection auction, average objective ratio with `g` bisections:
/// `(g+3)/2 - 2^g/2^(k+1) + 1/2^(k+1) - 1/2^(g+1)`.
pub fn spa_bba_avg_obj(k: u32, g: u32) -> BigRational {
    let (k, g) = (k as i64, g as i64);
    int(g + 3) / int(2) - pow2(g - (k + 1)) + pow2(-(k + 1)) - pow2(-(g + 1))
}

/// Bounded-bisection auction, average ratio with respect to party one:
/// `(g+5)/4 + (2-g)/2^(k+2) - 1/2^(k-g+1) - 1/2^(g+2)`.
pub fn spa_bba_wrt1(k: u32, g: u32) -> BigRational {
    let (k, g) = (k as i64, g as i64);
    int(g + 5) / int(4) + int(2 - g) * pow2(-(k + 2)) - pow2(-(k - g + 1)) - pow2(-(g + 2))
}

/// Bounded-bisection auction, average ratio with respect to party two:
/// `(g+5)/4 - 1/2^(g+2) + g/2^(k+2)`.
pub fn spa_bba_wrt2(k: u32, g: u32) -> BigRational {
    let (k, g) = (k as i64, g as i64);
    int(g + 5) / int(4) - pow2(-(g + 2)) + int(g) * pow2(-(k + 2))
}

/// Bounded-bisection auction, average subjective ratio; the party-two side
/// always dominates.
pub fn spa_bba_avg_subj(k: u32, g: u32) -> BigRational {
    spa_bba_wrt2(k, g)
}

/// Sealed-bid auction, average objective ratio: `(2/3) 2^k + (1/3) 2^-k`.
/// Also the largest attainable for the second-price matrix.
pub fn spa_sealed_avg_obj(k: u32) -> BigRational {
    int(2) * pow2(k as i64) / int(3) + pow2(-(k as i64)) / int(3)
}

/// Sealed-bid auction, average ratio with respect to party one:
/// `2^k/3 + 2/(3 * 2^k)`.
pub fn spa_sealed_wrt1(k: u32) -> BigRational {
    pow2(k as i64) / int(3) + int(2) * pow2(-(k as i64)) / int(3)
}

/// Sealed-bid auction, average ratio with respect to party two:
/// `2^k/3 + 1 - 1/(3 * 2^k)`; also its subjective ratio, and the largest
/// attainable subjective ratio for the second-price matrix.
pub fn spa_sealed_wrt2(k: u32) -> BigRational {
    pow2(k as i64) / int(3) + int(1) - pow2(-(k as i64)) / int(3)
}

/// Sealed-bid auction, average subjective ratio.
pub fn spa_sealed_avg_subj(k: u32) -> BigRational {
    spa_sealed_wrt2(k)
}

/// Truthful public good at cost `c`, average objective ratio of the
/// reference protocol: `1 + (c^3 - c) / 2^(2k+1)`. Undefined at `c = 0`
/// (the source form carries a `1 - 1/c^2` factor).
pub fn tpg_avg_obj(k: u32, c: u32) -> Result<BigRational, FormulaError> {
    check_k(k)?;
    if c == 0 || c > (1u32 << k) - 1 {
        return Err(FormulaError::OutOfDomain(alloc::format!(
            "cost c = {c} outside 1..=2^k-1 for k = {k}"
        )));
    }
    let c = int(c as i64);
    Ok(int(1) + (&c * &c * &c - c) * pow2(-(2 * k as i64 + 1)))
}

/// The eight tile statistics of the bounded-bisection auction with `g`
/// bisections on the `k`-bit second-price matrix.
///
/// `a` counts all tiles and `b` sums `2^k - |ideal region|` over them; the
/// refinement along party one's values has `z` winner-one rectangles and
/// `x` winner-two rectangles with deficit sum `y`; along party two's values
/// it has `u` winner-one rectangles with deficit sum `v` and `w` winner-two
/// rectangles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbaTileCounts {
    pub a: BigInt,
    pub b: BigInt,
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
    pub u: BigInt,
    pub v: BigInt,
    pub w: BigInt,
}

pub fn bba_tile_counts(k: u32, g: u32) -> Result<BbaTileCounts, FormulaError> {
    check_kg(k, g)?;
    let c = g as i64;
    let i = (k - g) as i64;
    let whole = |r: BigRational| -> BigInt {
        debug_assert!(r.is_integer());
        r.to_integer()
    };
    let a = whole(pow2(c) * (pow2(i) * int(c + 2) - int(1)));
    let b = whole(
        pow2(c + i - 1) * ((int(1) + pow2(c)) * (pow2(i) - int(1)) + pow2(c + i) * int(c)),
    );
    let x = whole(pow2(c - 1) * (pow2(i) * int(c) + pow2(i + 1) - int(2)));
    let y = whole(
        pow2(c + i - 2)
            * (pow2(c + i) * int(c) + pow2(c + i) + pow2(i) - pow2(c + 1) + int(c)),
    );
    let z = whole(pow2(c + i - 1) * (pow2(c + i) + int(1)));
    let u = whole(pow2(c + i - 1) * int(c + 2));
    let v = whole(pow2(c + i - 2) * (pow2(c + i) * int(c + 1) + pow2(i) - int(c) - int(2)));
    let w = whole(pow2(c + i - 1) * (pow2(c + i) - int(1)));
    Ok(BbaTileCounts { a, b, x, y, z, u, v, w })
}

/// Evaluates a formula by name; parameter counts and domains are checked.
pub fn formula(name: &str, params: &[i64]) -> Result<BigRational, FormulaError> {
    let bad = |expected: usize| FormulaError::BadParams { name: String::from(name), expected };
    let one_param = || -> Result<u32, FormulaError> {
        match params {
            [k] if *k >= 0 => Ok(*k as u32),
            [_] => Err(FormulaError::OutOfDomain(String::from("parameters must be nonnegative"))),
            _ => Err(bad(1)),
        }
    };
    let two_params = || -> Result<(u32, u32), FormulaError> {
        match params {
            [a, b] if *a >= 0 && *b >= 0 => Ok((*a as u32, *b as u32)),
            [_, _] => Err(FormulaError::OutOfDomain(String::from("parameters must be nonnegative"))),
            _ => Err(bad(2)),
        }
    };
    match name {
        "mp_lower_avg_obj" => {
            let k = one_param()?;
            check_k(k)?;
            Ok(mp_lower_avg_obj(k))
        }
        "mp_bisection_avg_obj" => {
            let k = one_param()?;
            check_k(k)?;
            Ok(mp_bisection_avg_obj(k))
        }
        "mp_bisection_avg_subj" => {
            let k = one_param()?;
            check_k(k)?;
            Ok(mp_bisection_avg_subj(k))
        }
        "mp_largest_avg_obj" => {
            let k = one_param()?;
            check_k(k)?;
            Ok(mp_largest_avg_obj(k))
        }
        "spa_bba_avg_obj" => {
            let (k, g) = two_params()?;
            check_kg(k, g)?;
            Ok(spa_bba_avg_obj(k, g))
        }
        "spa_bba_wrt1" => {
            let (k, g) = two_params()?;
            check_kg(k, g)?;
            Ok(spa_bba_wrt1(k, g))
        }
        "spa_bba_wrt2" => {
            let (k, g) = two_params()?;
            check_kg(k, g)?;
            Ok(spa_bba_wrt2(k, g))
        }
        "spa_bba_avg_subj" => {
            let (k, g) = two_params()?;
            check_kg(k, g)?;
            Ok(spa_bba_avg_subj(k, g))
        }
        "spa_sealed_avg_obj" => {
            let k = one_param()?;
            check_k(k)?;
            Ok(spa_sealed_avg_obj(k))
        }
        "spa_sealed_wrt1" => {
            let k = one_param()?;
            check_k(k)?;
            Ok(spa_sealed_wrt1(k))
        }
        "spa_sealed_wrt2" => {
            let k = one_param()?;
            check_k(k)?;
            Ok(spa_sealed_wrt2(k))
        }
        "spa_sealed_avg_subj" => {
            let k = one_param()?;
            check_k(k)?;
            Ok(spa_sealed_avg_subj(k))
        }
        "tpg_avg_obj" => {
            let (k, c) = two_params()?;
            tpg_avg_obj(k, c)
        }
        _ => Err(FormulaError::UnknownName(String::from(name))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn bba_endpoints_collapse() {
        for k in 1..=10 {
            // no bisections: the English auction, ratio 1
            assert!(spa_bba_avg_obj(k, 0).is_one());
            // full budget: the bisection auction, ratio k/2 + 1
            assert_eq!(spa_bba_avg_obj(k, k), int(k as i64) / int(2) + int(1));
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(spa_bba_avg_obj(4, 2), rat(73, 32));
        assert_eq!(spa_bba_wrt1(3, 3), rat(23, 16));
        assert_eq!(spa_bba_wrt2(3, 3), rat(33, 16));
        assert_eq!(tpg_avg_obj(3, 4).unwrap(), rat(47, 32));
        assert_eq!(mp_bisection_avg_obj(3), rat(23, 2));
        assert_eq!(mp_bisection_avg_subj(3), rat(5, 2));
        assert_eq!(spa_sealed_avg_obj(3), rat(43, 8));
        assert_eq!(spa_sealed_avg_subj(3), rat(29, 8));
    }

    #[test]
    fn tpg_cost_extremes() {
        // at the maximal cost the ratio is 2^(k-1) - 1/2 + 2^-k
        for k in 1..=8u32 {
            let c = (1u32 << k) - 1;
            let expected = pow2(k as i64 - 1) - rat(1, 2) + pow2(-(k as i64));
            assert_eq!(tpg_avg_obj(k, c).unwrap(), expected);
        }
        assert!(tpg_avg_obj(3, 0).is_err());
        assert!(tpg_avg_obj(3, 8).is_err());
    }

    #[test]
    fn tile_count_recurrences() {
        // a and b satisfy the doubling recurrences they were derived from
        for k in 1..=10u32 {
            for g in 0..k {
                let small = bba_tile_counts(k, g).unwrap();
                let big = bba_tile_counts(k + 1, g + 1).unwrap();
                let pow = BigInt::from(1) << k;
                assert_eq!(big.a, &small.a * 2 + (&pow << 1));
                assert_eq!(big.b, &small.b * 2 + &small.a * &pow + (&pow * &pow));
                assert_eq!(big.x, &small.x * 2 + &pow);
                assert_eq!(big.z, &small.z * 2 + (&pow * &pow));
                assert_eq!(big.u, &small.u * 2 + &pow);
            }
        }
    }

    #[test]
    fn dispatch_by_name() {
        assert_eq!(formula("spa_bba_avg_obj", &[4, 2]).unwrap(), rat(73, 32));
        assert!(formula("spa_bba_avg_obj", &[4]).is_err());
        assert!(formula("nope", &[1]).is_err());
        assert!(formula("tpg_avg_obj", &[3, 0]).is_err());
        assert!(formula("spa_bba_avg_obj", &[3, 4]).is_err());
    }
}
