//! Degrees in `Z ∪ {-inf}`.
//!
//! The absolute value on `F_q((1/T))` takes values `e^k`, so every norm
//! comparison is carried out on the exponent `k`. The zero element has
//! degree [`Deg::NegInf`], which is absorbing under addition.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Deg {
    NegInf,
    Finite(i64),
}

pub const NEG_INF: Deg = Deg::NegInf;

impl Deg {
    pub fn finite(self) -> Option<i64> {
        match self {
            Deg::NegInf => None,
            Deg::Finite(k) => Some(k),
        }
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, Deg::NegInf)
    }

    /// Finite value, panicking on `-inf`. Use only where zero was excluded.
    pub fn unwrap(self) -> i64 {
        self.finite().expect("degree of zero")
    }
}

impl From<i64> for Deg {
    fn from(k: i64) -> Self {
        Deg::Finite(k)
    }
}

impl Add for Deg {
    type Output = Deg;
    fn add(self, rhs: Deg) -> Deg {
        match (self, rhs) {
            (Deg::Finite(a), Deg::Finite(b)) => Deg::Finite(a + b),
            _ => Deg::NegInf,
        }
    }
}

impl Add<i64> for Deg {
    type Output = Deg;
    fn add(self, rhs: i64) -> Deg {
        match self {
            Deg::Finite(a) => Deg::Finite(a + rhs),
            Deg::NegInf => Deg::NegInf,
        }
    }
}

impl Sub<i64> for Deg {
    type Output = Deg;
    fn sub(self, rhs: i64) -> Deg {
        self + (-rhs)
    }
}

impl Neg for Deg {
    type Output = Option<i64>;
    fn neg(self) -> Option<i64> {
        self.finite().map(|k| -k)
    }
}

impl fmt::Display for Deg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deg::NegInf => write!(f, "-inf"),
            Deg::Finite(k) => write!(f, "{k}"),
        }
    }
}

// JSON: an integer, or the string "-inf".
impl Serialize for Deg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Deg::Finite(k) => s.serialize_i64(*k),
            Deg::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Deg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(Deg::Finite(k)),
            Raw::Str(s) if s == "-inf" => Ok(Deg::NegInf),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad degree {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_inf_is_least_and_absorbing() {
        assert!(NEG_INF < Deg::Finite(i64::MIN));
        assert_eq!(NEG_INF + Deg::Finite(3), NEG_INF);
        assert_eq!(Deg::Finite(2) + Deg::Finite(3), Deg::Finite(5));
        assert_eq!(Deg::Finite(2) - 5, Deg::Finite(-3));
    }

    #[test]
    fn json_form() {
        assert_eq!(serde_json::to_string(&NEG_INF).unwrap(), "\"-inf\"");
        let d: Deg = serde_json::from_str("-4").unwrap();
        assert_eq!(d, Deg::Finite(-4));
    }
}
