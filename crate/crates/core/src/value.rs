//! Elements of `F_q((T⁻¹))` that are either known rationals or truncated
//! series. Keeping rationals symbolic lets zero tests and exact hits such
//! as `(T+1)·1/(T+1) = 1` be decided without any precision loss.

use std::fmt;
use std::sync::Arc;

use crate::degree::{Deg, NEG_INF};
use crate::error::Result;
use crate::field::{Elem, Field};
use crate::laurent::Laurent;
use crate::poly::{Poly, RationalFn};

#[derive(Clone, PartialEq)]
pub enum Value {
    Rational(RationalFn),
    Series(Laurent),
}

/// Extra digits requested when a rational is expanded next to a series.
const MARGIN: i64 = 4;

impl Value {
    pub fn zero(field: &Arc<Field>) -> Value {
        Value::Rational(RationalFn::zero(field))
    }

    pub fn from_poly(p: Poly) -> Value {
        Value::Rational(RationalFn::from_poly(p))
    }

    pub fn constant(field: &Arc<Field>, c: Elem) -> Value {
        Value::from_poly(Poly::constant(field, c))
    }

    /// Exact series are finite sums `P/T^k`, so they become rationals.
    pub fn from_laurent(l: Laurent) -> Value {
        if !l.is_exact() {
            return Value::Series(l);
        }
        let f = l.field().clone();
        let terms = l.terms();
        let low = terms.last().map_or(0, |t| t.0).min(0);
        let shifted: Vec<(i64, Elem)> = terms.iter().map(|&(k, c)| (k - low, c)).collect();
        let top = shifted.first().map_or(0, |t| t.0);
        let mut cs = vec![Elem::ZERO; top as usize + 1];
        for (k, c) in shifted {
            cs[k as usize] = c;
        }
        let den = Poly::monomial(&f, Elem::ONE, (-low) as usize);
        Value::Rational(RationalFn::new(Poly::new(&f, cs), den).expect("monomial denominator"))
    }

    pub fn field(&self) -> &Arc<Field> {
        match self {
            Value::Rational(r) => r.field(),
            Value::Series(l) => l.field(),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Value::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&RationalFn> {
        match self {
            Value::Rational(r) => Some(r),
            Value::Series(_) => None,
        }
    }

    /// Lowest certified exponent; `None` for rationals.
    pub fn effective_floor(&self) -> Option<i64> {
        match self {
            Value::Rational(_) => None,
            Value::Series(l) => l.effective_floor(),
        }
    }

    pub fn deg(&self) -> Result<Deg> {
        match self {
            Value::Rational(r) => Ok(r.deg()),
            Value::Series(l) => l.deg(),
        }
    }

    /// Upper bound on the degree that never fails.
    pub fn deg_upper(&self) -> Deg {
        match self {
            Value::Rational(r) => r.deg(),
            Value::Series(l) => l.deg_upper(),
        }
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.deg()? == NEG_INF)
    }

    /// Series expansion, certified down to `floor` (or exact).
    pub fn to_laurent(&self, floor: i64) -> Laurent {
        match self {
            Value::Rational(r) => Laurent::from_rational(r, floor),
            Value::Series(l) => l.clone(),
        }
    }

    fn lift_pair(&self, other: &Value) -> (Laurent, Laurent) {
        let fl = match (self.effective_floor(), other.effective_floor()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => 0,
        };
        let span = |v: &Value| v.deg_upper().finite().unwrap_or(0).abs();
        let fl = fl - span(self) - span(other) - MARGIN;
        (self.to_laurent(fl), other.to_laurent(fl))
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a.add(b)),
            _ => {
                let (a, b) = self.lift_pair(other);
                Value::from_laurent(a.add(&b))
            }
        }
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Rational(a) => Value::Rational(a.neg()),
            Value::Series(l) => Value::Series(l.neg()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a.mul(b)),
            _ => {
                let (a, b) = self.lift_pair(other);
                Value::from_laurent(a.mul(&b))
            }
        }
    }

    pub fn scale(&self, c: Elem) -> Value {
        match self {
            Value::Rational(a) => Value::Rational(a.scale(c)),
            Value::Series(l) => Value::from_laurent(l.scale(c)),
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> Value {
        self.mul(&Value::from_poly(p.clone()))
    }

    /// Reciprocal; series are inverted to their own certified precision.
    pub fn inv(&self) -> Result<Value> {
        match self {
            Value::Rational(a) => Ok(Value::Rational(a.inv()?)),
            Value::Series(l) => {
                let t = l.deg()?.finite().unwrap_or(0);
                Ok(Value::from_laurent(l.inv(l.floor() - 2 * t)?))
            }
        }
    }

    pub fn div(&self, other: &Value) -> Result<Value> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer part and fractional part.
    pub fn split(&self) -> Result<(Poly, Value)> {
        match self {
            Value::Rational(r) => {
                let (i, fr) = r.split();
                Ok((i, Value::Rational(fr)))
            }
            Value::Series(l) => {
                let (i, fr) = l.split()?;
                Ok((i, Value::from_laurent(fr)))
            }
        }
    }

    pub fn pth_root(&self) -> Result<Value> {
        match self {
            Value::Rational(r) => {
                // (a/b)^(1/p) = (a·b^(p-1))^(1/p) / b
                let p = r.field().characteristic() as u64;
                let n = r.num().mul(&r.den().pow(p - 1));
                let root = Laurent::from_poly(&n).pth_root()?;
                let root = match Value::from_laurent(root) {
                    Value::Rational(x) => x,
                    Value::Series(_) => unreachable!("root of an exact polynomial is exact"),
                };
                Ok(Value::Rational(root.div(&RationalFn::from_poly(r.den().clone()))?))
            }
            Value::Series(l) => Ok(Value::from_laurent(l.pth_root()?)),
        }
    }

    /// Square root, exact whenever the input is the square of a rational.
    /// Otherwise a series certified to `floor`.
    pub fn sqrt(&self, floor: i64) -> Result<Value> {
        let f = self.field().clone();
        if f.characteristic() == 2 {
            return self.pth_root();
        }
        match self {
            Value::Rational(r) => {
                if let (Some(a), Some(b)) = (poly_sqrt(r.num()), poly_sqrt(r.den())) {
                    return Ok(Value::Rational(RationalFn::new(a, b).expect("nonzero denominator")));
                }
                let span = r.deg().finite().unwrap_or(0).abs();
                let l = Laurent::from_rational(r, floor - span - MARGIN);
                Ok(Value::from_laurent(l.sqrt(floor)?))
            }
            Value::Series(l) => Ok(Value::from_laurent(l.sqrt(floor)?)),
        }
    }
}

/// Square root of a polynomial when it is a perfect square (odd characteristic).
fn poly_sqrt(p: &Poly) -> Option<Poly> {
    if p.is_zero() {
        return Some(p.clone());
    }
    let l = Laurent::from_poly(p);
    let r = l.sqrt(0).ok()?;
    if !r.is_exact() {
        return None;
    }
    match Value::from_laurent(r) {
        Value::Rational(x) if x.is_poly() => Some(x.num().clone()),
        _ => None,
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rational(r) => write!(f, "{r}"),
            Value::Series(l) => write!(f, "{l}"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Value({self})")
    }
}
