//! Outcome labels and party identifiers.

use core::fmt;
use core::str::FromStr;

use alloc::string::String;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// One of the two communicating parties. Party one owns the rows of a
/// function matrix, party two the columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    One,
    Two,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::One => Party::Two,
            Party::Two => Party::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Party::One => 1,
            Party::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Party> {
        match n {
            1 => Some(Party::One),
            2 => Some(Party::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

// Wire format: the bare numbers 1 and 2.
impl Serialize for Party {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Party {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let n = u8::deserialize(deserializer)?;
        Party::from_number(n).ok_or_else(|| de::Error::custom("party must be 1 or 2"))
    }
}

/// The value a function assigns to a pair of inputs.
///
/// Equality is structural; no ordering semantics are attached to the derived
/// `Ord` (it only exists so labels can key ordered maps deterministically).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeLabel {
    /// Identity of the winning party (millionaires-style problems).
    Winner(Party),
    /// Winning party plus the price it pays (second-price auctions).
    Award { winner: Party, price: u32 },
    /// Provision a public good.
    Build,
    /// Do not provision.
    DoNotBuild,
    /// Provision with per-party transfers.
    BuildTransfers { t1: u32, t2: u32 },
    /// Plain integer output.
    Value(u32),
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutcomeLabel::Winner(p) => write!(f, "winner:{p}"),
            OutcomeLabel::Award { winner, price } => write!(f, "award:{winner}:{price}"),
            OutcomeLabel::Build => write!(f, "build"),
            OutcomeLabel::DoNotBuild => write!(f, "do-not-build"),
            OutcomeLabel::BuildTransfers { t1, t2 } => write!(f, "build:{t1}:{t2}"),
            OutcomeLabel::Value(v) => write!(f, "value:{v}"),
        }
    }
}

/// Error parsing a label from its tagged-string form.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognized outcome label `{0}`")]
pub struct ParseLabelError(pub String);

impl FromStr for OutcomeLabel {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseLabelError(String::from(s));
        match s {
            "build" => return Ok(OutcomeLabel::Build),
            "do-not-build" => return Ok(OutcomeLabel::DoNotBuild),
            _ => {}
        }
        let mut parts = s.split(':');
        let tag = parts.next().ok_or_else(err)?;
        let rest: alloc::vec::Vec<&str> = parts.collect();
        match (tag, rest.as_slice()) {
            ("winner", [p]) => {
                let n: u8 = p.parse().map_err(|_| err())?;
                Party::from_number(n).map(OutcomeLabel::Winner).ok_or_else(err)
            }
            ("award", [p, price]) => {
                let n: u8 = p.parse().map_err(|_| err())?;
                let winner = Party::from_number(n).ok_or_else(err)?;
                let price = price.parse().map_err(|_| err())?;
                Ok(OutcomeLabel::Award { winner, price })
            }
            ("build", [t1, t2]) => {
                let t1 = t1.parse().map_err(|_| err())?;
                let t2 = t2.parse().map_err(|_| err())?;
                Ok(OutcomeLabel::BuildTransfers { t1, t2 })
            }
            ("value", [v]) => {
                let v = v.parse().map_err(|_| err())?;
                Ok(OutcomeLabel::Value(v))
            }
            _ => Err(err()),
        }
    }
}

// Wire format: the tagged string, e.g. "award:2:3".
impl Serialize for OutcomeLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OutcomeLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn label_strings_round_trip() {
        let labels = [
            OutcomeLabel::Winner(Party::One),
            OutcomeLabel::Award { winner: Party::Two, price: 3 },
            OutcomeLabel::Build,
            OutcomeLabel::DoNotBuild,
            OutcomeLabel::BuildTransfers { t1: 2, t2: 0 },
            OutcomeLabel::Value(7),
        ];
        for label in labels {
            let s = label.to_string();
            assert_eq!(s.parse::<OutcomeLabel>().unwrap(), label, "via `{s}`");
        }
    }

    #[test]
    fn bad_labels_rejected() {
        for s in ["", "winner:3", "award:1", "value:x", "frob"] {
            assert!(s.parse::<OutcomeLabel>().is_err(), "`{s}` should fail");
        }
    }
}
