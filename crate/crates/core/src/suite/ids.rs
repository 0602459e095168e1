use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

macro_rules! check_ids {
    ($($variant:ident => $name:literal),+ $(,)?) => {
        /// Identifier of one executable claim.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum CheckId {
            $($variant),+
        }

        impl CheckId {
            pub const ALL: &'static [CheckId] = &[$(CheckId::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(CheckId::$variant => $name),+
                }
            }
        }

        impl FromStr for CheckId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self, Error> {
                match s.trim() {
                    $($name => Ok(CheckId::$variant),)+
                    other => Err(Error::UnknownCheck(other.to_string())),
                }
            }
        }
    };
}

check_ids! {
    TriangleInequality => "T2.5.i",
    RealHomogeneity => "T2.5.ii",
    Positivity => "T2.5.iii",
    UnitaryInvariance => "T2.5.iv",
    CongruenceBound => "T2.5.v",
    HeinzInterpolation => "T2.5.vi",
    Symmetry => "T2.5.vii-sym",
    LimitEnvelope => "T2.5.vii-limit",
    AluthgeBound => "T2.6",
    AluthgeBoundRhoTwo => "C2.7.a",
    AluthgeBoundNumericalRadius => "C2.7.b",
    SquareRootBound => "C2.9",
    LambdaBound => "T2.10",
    LambdaTwoBound => "C2.11",
    MixedSumSquareBound => "C2.12.a",
    CartesianSquareBound => "C2.12.b",
    LambdaLimitBound => "C2.13",
    QuadraticLower => "T2.14.lower",
    QuadraticUpper => "T2.14.upper",
    MixedSumQuadraticLower => "C2.15.lower",
    MixedSumQuadraticUpper => "C2.15.upper",
    LemmaHeinz => "L.heinz",
    LemmaBuzano => "L.buzano",
    LemmaMixedSchwarz => "L.mixed-schwarz",
    LemmaPositiveSquare => "L.positive-square",
    Sandwich => "O.sandwich",
    Nilpotent => "O.nilpotent",
    Normal => "O.normal",
    BlockIdentities => "O.block-identities",
}

/// Every registered check, in report order.
pub fn enumerate_checks() -> &'static [CheckId] {
    CheckId::ALL
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CheckId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CheckId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated list of check ids.
pub fn parse_check_list(spec: &str) -> Result<Vec<CheckId>, Error> {
    spec.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_set_round_trips() {
        assert_eq!(CheckId::ALL.len(), 29);
        for &id in CheckId::ALL {
            assert_eq!(id.as_str().parse::<CheckId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(serde_json::from_str::<CheckId>(&json).unwrap(), id);
        }
        assert!(matches!("T9.9".parse::<CheckId>(), Err(Error::UnknownCheck(_))));
        assert_eq!(
            parse_check_list("C2.7.b, T2.6").unwrap(),
            vec![CheckId::AluthgeBoundNumericalRadius, CheckId::AluthgeBound]
        );
    }
}
