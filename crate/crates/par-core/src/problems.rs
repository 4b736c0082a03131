//! The output functions of every problem instance the crate knows about.

use core::fmt;

use alloc::string::String;

use crate::label::{OutcomeLabel, Party};
use crate::table::Cell;

/// Errors raised while constructing problems or evaluating their outputs.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("k = {k} outside supported range 1..={cap}")]
    KOutOfRange { k: u32, cap: u32 },
    #[error("input {value} out of range for k = {k}")]
    InputOutOfRange { value: u32, k: u32 },
    #[error("cost c = {c} out of range for k = {k} (need 0 <= c <= 2^k - 1)")]
    CostOutOfRange { c: u32, k: u32 },
    #[error("appxa requires n >= 2, got {n}")]
    BadAppxaSize { n: u32 },
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
}

/// Which function a table holds. `TruthfulPublicGood` carries the cost
/// threshold, `AppxA` its own bit width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Millionaires,
    SecondPrice,
    PublicGood,
    TruthfulPublicGood { c: u32 },
    AppxA,
}

/// A problem instance: the function plus the bit width of each party's value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    kind: ProblemKind,
    k: u32,
}

impl ProblemSpec {
    pub fn millionaires(k: u32) -> ProblemSpec {
        ProblemSpec { kind: ProblemKind::Millionaires, k }
    }

    pub fn second_price(k: u32) -> ProblemSpec {
        ProblemSpec { kind: ProblemKind::SecondPrice, k }
    }

    pub fn public_good(k: u32) -> ProblemSpec {
        ProblemSpec { kind: ProblemKind::PublicGood, k }
    }

    pub fn truthful_public_good(k: u32, c: u32) -> ProblemSpec {
        ProblemSpec { kind: ProblemKind::TruthfulPublicGood { c }, k }
    }

    /// The pointwise function `f(x, y) = floor(x / 2)` capped at `2^(n-2)`
    /// for `x >= 2^(n-1)`; `n` doubles as the bit width.
    pub fn appxa(n: u32) -> ProblemSpec {
        ProblemSpec { kind: ProblemKind::AppxA, k: n }
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Parses the CLI form: `millionaires|mp|2spa|pg|tpg:c=<int>|appxa:n=<int>`,
    /// with `k` supplied separately (ignored in favor of `n` for `appxa`).
    pub fn parse(name: &str, k: u32) -> Result<ProblemSpec, ProblemError> {
        let unknown = || ProblemError::UnknownProblem(String::from(name));
        if let Some(rest) = name.strip_prefix("tpg:c=") {
            let c = rest.parse().map_err(|_| unknown())?;
            return Ok(ProblemSpec::truthful_public_good(k, c));
        }
        if let Some(rest) = name.strip_prefix("appxa:n=") {
            let n = rest.parse().map_err(|_| unknown())?;
            return Ok(ProblemSpec::appxa(n));
        }
        match name {
            "millionaires" | "mp" => Ok(ProblemSpec::millionaires(k)),
            "2spa" => Ok(ProblemSpec::second_price(k)),
            "pg" => Ok(ProblemSpec::public_good(k)),
            _ => Err(unknown()),
        }
    }

    pub fn validate(&self, k_cap: u32) -> Result<(), ProblemError> {
        if self.k < 1 || self.k > k_cap {
            return Err(ProblemError::KOutOfRange { k: self.k, cap: k_cap });
        }
        match self.kind {
            ProblemKind::TruthfulPublicGood { c } => {
                let max = (1u32 << self.k) - 1;
                if c > max {
                    return Err(ProblemError::CostOutOfRange { c, k: self.k });
                }
            }
            ProblemKind::AppxA => {
                if self.k < 2 {
                    return Err(ProblemError::BadAppxaSize { n: self.k });
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Output label at `(x1, x2)`.
    pub fn output(&self, x1: u32, x2: u32) -> Result<OutcomeLabel, ProblemError> {
        match self.kind {
            ProblemKind::Millionaires => millionaires_output(x1, x2, self.k),
            ProblemKind::SecondPrice => second_price_output(x1, x2, self.k),
            ProblemKind::PublicGood => public_good_output(x1, x2, self.k),
            ProblemKind::TruthfulPublicGood { c } => {
                truthful_public_good_output(x1, x2, self.k, c)
            }
            ProblemKind::AppxA => appxa_output(x1, x2, self.k),
        }
    }
}

// Display is the CLI token, so `ProblemSpec::parse` round-trips it.
impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ProblemKind::Millionaires => write!(f, "millionaires"),
            ProblemKind::SecondPrice => write!(f, "2spa"),
            ProblemKind::PublicGood => write!(f, "pg"),
            ProblemKind::TruthfulPublicGood { c } => write!(f, "tpg:c={c}"),
            ProblemKind::AppxA => write!(f, "appxa:n={}", self.k),
        }
    }
}

fn check_range(value: u32, k: u32) -> Result<(), ProblemError> {
    if value >= (1u32 << k) {
        Err(ProblemError::InputOutOfRange { value, k })
    } else {
        Ok(())
    }
}

/// Identity of the richer party; ties favor party one.
pub fn millionaires_output(x1: u32, x2: u32, k: u32) -> Result<OutcomeLabel, ProblemError> {
    check_range(x1, k)?;
    check_range(x2, k)?;
    Ok(if x1 >= x2 {
        OutcomeLabel::Winner(Party::One)
    } else {
        OutcomeLabel::Winner(Party::Two)
    })
}

/// Winner of the second-price auction plus the price paid (the losing bid).
/// Ties favor party one.
pub fn second_price_output(x1: u32, x2: u32, k: u32) -> Result<OutcomeLabel, ProblemError> {
    check_range(x1, k)?;
    check_range(x2, k)?;
    Ok(if x1 >= x2 {
        OutcomeLabel::Award { winner: Party::One, price: x2 }
    } else {
        OutcomeLabel::Award { winner: Party::Two, price: x1 }
    })
}

/// `Build` iff the joint value covers the fixed cost `2^k - 1`.
pub fn public_good_output(x1: u32, x2: u32, k: u32) -> Result<OutcomeLabel, ProblemError> {
    check_range(x1, k)?;
    check_range(x2, k)?;
    Ok(if x1 + x2 >= (1u32 << k) - 1 {
        OutcomeLabel::Build
    } else {
        OutcomeLabel::DoNotBuild
    })
}

/// Build/no-build decision at cost `c` with the pivotal transfers
/// `t_i = c - x_{3-i}` charged only when the other party's value alone
/// falls short of `c`.
pub fn truthful_public_good_output(
    x1: u32,
    x2: u32,
    k: u32,
    c: u32,
) -> Result<OutcomeLabel, ProblemError> {
    check_range(x1, k)?;
    check_range(x2, k)?;
    if c > (1u32 << k) - 1 {
        return Err(ProblemError::CostOutOfRange { c, k });
    }
    if x1 + x2 < c {
        return Ok(OutcomeLabel::DoNotBuild);
    }
    let t1 = if x2 < c { c - x2 } else { 0 };
    let t2 = if x1 < c { c - x1 } else { 0 };
    Ok(OutcomeLabel::BuildTransfers { t1, t2 })
}

/// `floor(x / 2)` for `x < 2^(n-1)`, else the constant `2^(n-2)`; the
/// column input is ignored.
pub fn appxa_output(x: u32, y: u32, n: u32) -> Result<OutcomeLabel, ProblemError> {
    if n < 2 {
        return Err(ProblemError::BadAppxaSize { n });
    }
    check_range(x, n)?;
    check_range(y, n)?;
    Ok(if x < (1u32 << (n - 1)) {
        OutcomeLabel::Value(x / 2)
    } else {
        OutcomeLabel::Value(1u32 << (n - 2))
    })
}

/// Column reflection `x2 -> (2^k - 1) - x2` identifying the public-good
/// matrix with the millionaires matrix. Applying it twice is the identity.
pub fn pg_to_mp_map(x1: u32, x2: u32, k: u32) -> Cell {
    Cell::new(x1, ((1u32 << k) - 1) - x2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn millionaires_examples() {
        let w1 = OutcomeLabel::Winner(Party::One);
        let w2 = OutcomeLabel::Winner(Party::Two);
        assert_eq!(millionaires_output(0, 0, 3).unwrap(), w1);
        assert_eq!(millionaires_output(3, 6, 3).unwrap(), w2);
        assert_eq!(millionaires_output(6, 3, 3).unwrap(), w1);
        assert!(millionaires_output(8, 0, 3).is_err());
    }

    #[test]
    fn second_price_examples() {
        assert_eq!(
            second_price_output(3, 6, 3).unwrap(),
            OutcomeLabel::Award { winner: Party::Two, price: 3 }
        );
        assert_eq!(
            second_price_output(7, 7, 3).unwrap(),
            OutcomeLabel::Award { winner: Party::One, price: 7 }
        );
        assert_eq!(
            second_price_output(5, 0, 3).unwrap(),
            OutcomeLabel::Award { winner: Party::One, price: 0 }
        );
    }

    #[test]
    fn public_good_examples() {
        assert_eq!(public_good_output(1, 2, 2).unwrap(), OutcomeLabel::Build);
        assert_eq!(public_good_output(1, 1, 2).unwrap(), OutcomeLabel::DoNotBuild);
        assert_eq!(public_good_output(3, 3, 2).unwrap(), OutcomeLabel::Build);
    }

    #[test]
    fn truthful_public_good_examples() {
        // k = 3, c = 4; the do-not-build region is the strict triangle
        // x1 + x2 < c, so the sum-4 diagonal already builds
        assert_eq!(
            truthful_public_good_output(3, 0, 3, 4).unwrap(),
            OutcomeLabel::DoNotBuild
        );
        assert_eq!(
            truthful_public_good_output(3, 1, 3, 4).unwrap(),
            OutcomeLabel::BuildTransfers { t1: 3, t2: 1 }
        );
        assert_eq!(
            truthful_public_good_output(2, 2, 3, 4).unwrap(),
            OutcomeLabel::BuildTransfers { t1: 2, t2: 2 }
        );
        assert_eq!(
            truthful_public_good_output(5, 6, 3, 4).unwrap(),
            OutcomeLabel::BuildTransfers { t1: 0, t2: 0 }
        );
        assert!(truthful_public_good_output(0, 0, 3, 8).is_err());
    }

    #[test]
    fn appxa_examples() {
        assert_eq!(appxa_output(3, 0, 3).unwrap(), OutcomeLabel::Value(1));
        assert_eq!(appxa_output(5, 2, 3).unwrap(), OutcomeLabel::Value(2));
        assert_eq!(appxa_output(0, 7, 3).unwrap(), OutcomeLabel::Value(0));
    }

    #[test]
    fn reflection_is_an_involution() {
        for k in 1..=4 {
            for x1 in 0..(1u32 << k) {
                for x2 in 0..(1u32 << k) {
                    let there = pg_to_mp_map(x1, x2, k);
                    let back = pg_to_mp_map(there.x1, there.x2, k);
                    assert_eq!(back, Cell::new(x1, x2));
                }
            }
        }
        assert_eq!(pg_to_mp_map(5, 2, 3), Cell::new(5, 5));
        assert_eq!(pg_to_mp_map(0, 7, 3), Cell::new(0, 0));
    }

    #[test]
    fn problem_tokens_parse() {
        assert_eq!(ProblemSpec::parse("mp", 3).unwrap(), ProblemSpec::millionaires(3));
        assert_eq!(ProblemSpec::parse("millionaires", 3).unwrap(), ProblemSpec::millionaires(3));
        assert_eq!(ProblemSpec::parse("2spa", 4).unwrap(), ProblemSpec::second_price(4));
        assert_eq!(ProblemSpec::parse("pg", 2).unwrap(), ProblemSpec::public_good(2));
        assert_eq!(
            ProblemSpec::parse("tpg:c=4", 3).unwrap(),
            ProblemSpec::truthful_public_good(3, 4)
        );
        assert_eq!(ProblemSpec::parse("appxa:n=5", 1).unwrap(), ProblemSpec::appxa(5));
        assert!(ProblemSpec::parse("nope", 3).is_err());
    }
}
