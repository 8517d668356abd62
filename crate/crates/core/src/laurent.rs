//! Truncated Laurent series in `T⁻¹` with a certified precision floor.
//!
//! A value stores the coefficients for exponents `floor..=top`. When `exact`
//! is set every omitted coefficient is zero; otherwise coefficients below
//! `floor` are unknown and any decision that would need them fails with
//! [`Error::PrecisionExhausted`].

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value as Json};

use crate::degree::{Deg, NEG_INF};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::poly::{fmt_term, Poly, RationalFn};

pub const DEFAULT_FLOOR: i64 = -64;

#[derive(Clone)]
pub struct Laurent {
    field: Arc<Field>,
    floor: i64,
    /// `coeffs[i]` is the coefficient of `T^(floor + i)`; no trailing zeros.
    coeffs: Vec<Elem>,
    exact: bool,
}

impl Laurent {
    pub fn new(field: &Arc<Field>, floor: i64, mut coeffs: Vec<Elem>, exact: bool) -> Laurent {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Laurent {
            field: field.clone(),
            floor,
            coeffs,
            exact,
        }
    }

    /// From `(exponent, coefficient)` pairs; exponents below `floor` are dropped.
    pub fn from_terms(field: &Arc<Field>, terms: &[(i64, Elem)], floor: i64, exact: bool) -> Laurent {
        let top = terms.iter().map(|t| t.0).max().unwrap_or(floor).max(floor);
        let mut v = vec![Elem::ZERO; (top - floor + 1) as usize];
        for &(k, c) in terms {
            if k >= floor {
                let slot = &mut v[(k - floor) as usize];
                *slot = field.add(*slot, c);
            }
        }
        Laurent::new(field, floor, v, exact)
    }

    pub fn zero(field: &Arc<Field>) -> Laurent {
        Laurent::new(field, 0, Vec::new(), true)
    }

    pub fn one(field: &Arc<Field>) -> Laurent {
        Laurent::new(field, 0, vec![Elem::ONE], true)
    }

    /// `c·T^k`, exact.
    pub fn monomial(field: &Arc<Field>, c: Elem, k: i64) -> Laurent {
        Laurent::new(field, k, vec![c], true)
    }

    pub fn from_poly(p: &Poly) -> Laurent {
        Laurent::new(p.field(), 0, p.coeffs().to_vec(), true)
    }

    /// Expansion of `x` with every coefficient at exponents `≥ floor` exact.
    /// The result is marked exact when the expansion terminates above `floor`.
    pub fn from_rational(x: &RationalFn, floor: i64) -> Laurent {
        let f = x.field();
        if x.is_zero() {
            return Laurent::new(f, floor, Vec::new(), true);
        }
        let s = (-floor).max(0) as usize;
        let (q, r) = x.num().shift(s).divmod(x.den()).expect("nonzero denominator");
        let base = -(s as i64);
        let mut exact = r.is_zero();
        let mut v = Vec::new();
        for (j, &c) in q.coeffs().iter().enumerate() {
            let k = base + j as i64;
            if k >= floor {
                v.push(c);
            } else if !c.is_zero() {
                exact = false;
            }
        }
        let low = base.max(floor);
        if low > floor {
            let mut padded = vec![Elem::ZERO; (low - floor) as usize];
            padded.extend(v);
            v = padded;
        }
        Laurent::new(f, floor, v, exact)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Lowest exponent whose coefficient is certified.
    pub fn effective_floor(&self) -> Option<i64> {
        (!self.exact).then_some(self.floor)
    }

    /// Highest exponent with a nonzero known coefficient.
    pub fn top_known(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.floor + self.coeffs.len() as i64 - 1)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact && self.coeffs.is_empty()
    }

    /// Upper bound on the degree, valid even when the value is undecided.
    pub fn deg_upper(&self) -> Deg {
        match self.top_known() {
            Some(t) => Deg::Finite(t),
            None if self.exact => NEG_INF,
            None => Deg::Finite(self.floor - 1),
        }
    }

    pub fn deg(&self) -> Result<Deg> {
        match self.top_known() {
            Some(t) => Ok(Deg::Finite(t)),
            None if self.exact => Ok(NEG_INF),
            None => Err(Error::precision(format!(
                "all coefficients down to exponent {} vanish",
                self.floor
            ))),
        }
    }

    /// Coefficient of `T^k`.
    pub fn coeff(&self, k: i64) -> Result<Elem> {
        if k < self.floor {
            if self.exact {
                return Ok(Elem::ZERO);
            }
            return Err(Error::precision(format!("coefficient at exponent {k}")));
        }
        Ok(self
            .coeffs
            .get((k - self.floor) as usize)
            .copied()
            .unwrap_or(Elem::ZERO))
    }

    /// Coefficient of `T^k`, zero where unknown. Callers must stay above
    /// the effective floor.
    fn c(&self, k: i64) -> Elem {
        if k < self.floor {
            return Elem::ZERO;
        }
        self.coeffs
            .get((k - self.floor) as usize)
            .copied()
            .unwrap_or(Elem::ZERO)
    }

    /// Nonzero terms from the top exponent down.
    pub fn terms(&self) -> Vec<(i64, Elem)> {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (self.floor + i as i64, c))
            .collect()
    }

    /// Forget every coefficient below `floor`.
    pub fn truncate(&self, floor: i64) -> Laurent {
        if floor <= self.floor {
            if self.exact {
                let mut v = vec![Elem::ZERO; (self.floor - floor) as usize];
                v.extend_from_slice(&self.coeffs);
                return Laurent::new(&self.field, floor, v, false);
            }
            return self.clone();
        }
        let drop = ((floor - self.floor) as usize).min(self.coeffs.len());
        Laurent::new(&self.field, floor, self.coeffs[drop..].to_vec(), false)
    }

    fn combine(&self, other: &Laurent, negate: bool) -> Laurent {
        let f = &self.field;
        let floor = match (self.effective_floor(), other.effective_floor()) {
            (None, None) => self.floor.min(other.floor),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.max(b),
        };
        let top = self
            .top_known()
            .unwrap_or(floor)
            .max(other.top_known().unwrap_or(floor))
            .max(floor);
        let v = (floor..=top)
            .map(|k| {
                let b = other.c(k);
                f.add(self.c(k), if negate { f.neg(b) } else { b })
            })
            .collect();
        Laurent::new(f, floor, v, self.exact && other.exact)
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Laurent {
        let f = &self.field;
        Laurent::new(
            f,
            self.floor,
            self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            self.exact,
        )
    }

    pub fn scale(&self, c: Elem) -> Laurent {
        if c.is_zero() {
            return Laurent::zero(&self.field);
        }
        let f = &self.field;
        Laurent::new(
            f,
            self.floor,
            self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
            self.exact,
        )
    }

    /// Multiply by `T^k`.
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent {
            floor: self.floor + k,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let f = &self.field;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Laurent::zero(f);
        }
        let max_exp = |x: &Laurent| x.top_known().unwrap_or(x.floor - 1);
        let mut floor = None;
        if !self.exact {
            floor = Some(self.floor + max_exp(other));
        }
        if !other.exact {
            let g = other.floor + max_exp(self);
            floor = Some(floor.map_or(g, |h: i64| h.max(g)));
        }
        let base = self.floor + other.floor;
        let mut v = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        match floor {
            None => Laurent::new(f, base, v, true),
            Some(fl) => Laurent::new(f, base, v, false).truncate(fl),
        }
    }

    /// `1/self`, certified down to `max(floor, floor_self − 2·top)`.
    pub fn inv(&self, floor: i64) -> Result<Laurent> {
        let f = &self.field;
        let t = match self.top_known() {
            Some(t) => t,
            None if self.exact => return Err(Error::ZeroInverse),
            None => return Err(Error::precision("inverse of an undecided value")),
        };
        let lead_inv = f.inv(self.c(t))?;
        if self.exact && self.coeffs.iter().filter(|c| !c.is_zero()).count() == 1 {
            return Ok(Laurent::monomial(f, lead_inv, -t));
        }
        let fl = match self.effective_floor() {
            Some(fa) => floor.max(fa - 2 * t),
            None => floor,
        };
        if fl > -t {
            return Ok(Laurent::new(f, fl, Vec::new(), false));
        }
        let len = (-t - fl + 1) as usize;
        // b[i] is the coefficient at exponent -t - i.
        let mut b = vec![Elem::ZERO; len];
        b[0] = lead_inv;
        for i in 1..len {
            let mut s = Elem::ZERO;
            for j in 1..=i {
                let a = self.c(t - j as i64);
                if !a.is_zero() {
                    s = f.add(s, f.mul(a, b[i - j]));
                }
            }
            b[i] = f.neg(f.mul(lead_inv, s));
        }
        b.reverse();
        Ok(Laurent::new(f, fl, b, false))
    }

    pub fn div(&self, other: &Laurent, floor: i64) -> Result<Laurent> {
        Ok(self.mul(&other.inv(floor - self.deg_upper().finite().unwrap_or(0))?))
    }

    /// Integer part (exponents `≥ 0`) and fractional part (exponents `< 0`).
    pub fn split(&self) -> Result<(Poly, Laurent)> {
        let f = &self.field;
        if !self.exact && self.floor > 0 {
            return Err(Error::precision(format!(
                "integer part needs exponents below the floor {}",
                self.floor
            )));
        }
        let top = self.top_known().unwrap_or(-1);
        let int: Vec<Elem> = (0..=top.max(-1)).map(|k| self.c(k)).collect();
        let frac_floor = self.floor.min(0);
        let frac: Vec<Elem> = (frac_floor..0).map(|k| self.c(k)).collect();
        Ok((Poly::new(f, int), Laurent::new(f, frac_floor, frac, self.exact)))
    }

    /// Integer part only.
    pub fn int_part(&self) -> Result<Poly> {
        Ok(self.split()?.0)
    }

    /// `self^p`, i.e. the Frobenius image.
    pub fn frobenius(&self) -> Laurent {
        let f = &self.field;
        let p = f.characteristic() as i64;
        let terms: Vec<(i64, Elem)> = self
            .terms()
            .into_iter()
            .map(|(k, c)| (k * p, f.pow(c, p).expect("nonnegative exponent")))
            .collect();
        let floor = if self.exact {
            self.floor * p
        } else {
            p * (self.floor - 1) + 1
        };
        Laurent::from_terms(f, &terms, floor, self.exact)
    }

    /// The unique `b` with `b^p = self`, or `NoRoot` naming the first
    /// (highest) exponent not divisible by `p` that carries a nonzero
    /// coefficient.
    pub fn pth_root(&self) -> Result<Laurent> {
        let f = &self.field;
        let p = f.characteristic() as i64;
        let mut terms = Vec::new();
        for (k, c) in self.terms() {
            if k.rem_euclid(p) != 0 {
                return Err(Error::NoRoot { exponent: k });
            }
            terms.push((k / p, f.pth_root(c)));
        }
        let floor = div_ceil(self.floor, p);
        Ok(Laurent::from_terms(f, &terms, floor, self.exact))
    }

    /// Square root down to `floor`. Characteristic 2 delegates to
    /// [`Laurent::pth_root`]; otherwise the leading term must be an even
    /// power with a square coefficient and the rest follows digit by digit.
    pub fn sqrt(&self, floor: i64) -> Result<Laurent> {
        let f = &self.field;
        if f.characteristic() == 2 {
            return self.pth_root();
        }
        let t = match self.top_known() {
            Some(t) => t,
            None if self.exact => return Ok(Laurent::zero(f)),
            None => return Err(Error::precision("square root of an undecided value")),
        };
        if t.rem_euclid(2) != 0 {
            return Err(Error::NoSquareRoot(format!("odd degree {t}")));
        }
        let w = f
            .sqrt(self.c(t))
            .ok_or_else(|| Error::NoSquareRoot(format!("leading coefficient {}", f.fmt_elem(self.c(t)))))?;
        let s = t / 2;
        let fl = match self.effective_floor() {
            Some(fa) => floor.max(fa - s),
            None => floor.min(s),
        };
        if fl > s {
            return Ok(Laurent::new(f, fl, Vec::new(), false));
        }
        let len = (s - fl + 1) as usize;
        // b[i] is the coefficient at exponent s - i.
        let mut b = vec![Elem::ZERO; len];
        b[0] = w;
        let two_w_inv = f.inv(f.add(w, w))?;
        for i in 1..len {
            let mut acc = self.c(t - i as i64);
            for j in 1..i {
                acc = f.sub(acc, f.mul(b[j], b[i - j]));
            }
            b[i] = f.mul(acc, two_w_inv);
        }
        b.reverse();
        let cand = Laurent::new(f, fl, b, true);
        if self.exact && cand.mul(&cand) == *self {
            return Ok(cand);
        }
        Ok(cand.truncate(fl))
    }

    /// Exact equality on the range certified for both operands.
    pub fn agrees_with(&self, other: &Laurent) -> bool {
        let d = self.sub(other);
        d.top_known().is_none()
    }

    pub fn to_json(&self) -> Json {
        let top = self.top_known().map_or(NEG_INF, Deg::Finite);
        let hi = self.top_known().unwrap_or(self.floor - 1);
        let coeffs: Vec<Json> = (self.floor..=hi)
            .rev()
            .map(|k| elem_json(&self.field, self.c(k)))
            .collect();
        json!({"top": top, "floor": self.floor, "exact": self.exact, "coeffs": coeffs})
    }

    pub fn from_json(field: &Arc<Field>, v: &Json) -> Result<Laurent> {
        let bad = |m: &str| Error::Invalid(format!("laurent json: {m}"));
        let floor = v["floor"].as_i64().ok_or_else(|| bad("floor"))?;
        let exact = v["exact"].as_bool().ok_or_else(|| bad("exact"))?;
        let cs = v["coeffs"].as_array().ok_or_else(|| bad("coeffs"))?;
        let mut asc = cs
            .iter()
            .map(|c| elem_from_json(field, c))
            .collect::<Result<Vec<_>>>()?;
        asc.reverse();
        let out = Laurent::new(field, floor, asc, exact);
        let top: Deg = serde_json::from_value(v["top"].clone()).map_err(|_| bad("top"))?;
        if top != out.top_known().map_or(NEG_INF, Deg::Finite) {
            return Err(bad("top disagrees with coefficients"));
        }
        Ok(out)
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

pub(crate) fn elem_json(field: &Field, c: Elem) -> Json {
    if field.degree() == 1 {
        json!(c.0)
    } else {
        json!(field.coeffs(c))
    }
}

pub(crate) fn elem_from_json(field: &Field, v: &Json) -> Result<Elem> {
    let bad = || Error::Invalid(format!("bad field element {v}"));
    match v {
        Json::Number(n) => {
            let c = n.as_u64().ok_or_else(bad)?;
            if c >= field.order() as u64 {
                return Err(bad());
            }
            Ok(Elem(c as u32))
        }
        Json::Array(a) => {
            let cs = a
                .iter()
                .map(|x| x.as_u64().map(|c| c as u32).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()?;
            field.from_coeffs(&cs)
        }
        _ => Err(bad()),
    }
}

impl PartialEq for Laurent {
    fn eq(&self, other: &Self) -> bool {
        if *self.field != *other.field || self.exact != other.exact {
            return false;
        }
        if self.exact {
            self.terms() == other.terms()
        } else {
            self.floor == other.floor && self.coeffs == other.coeffs
        }
    }
}

impl fmt::Display for Laurent {
    /// Exact values print as `terms@floor=F`; truncated ones as
    /// `terms+O(T^(F-1))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = &self.field;
        let parts: Vec<String> = self
            .terms()
            .into_iter()
            .map(|(k, c)| {
                let s = if field.degree() == 1 {
                    c.0.to_string()
                } else {
                    field.fmt_elem(c)
                };
                fmt_term(&s, c == Elem::ONE, k)
            })
            .collect();
        let body = parts.join("+");
        if self.exact {
            let body = if body.is_empty() { "0".into() } else { body };
            write!(f, "{body}@floor={}", self.floor)
        } else {
            let big_o = format!("O(T^{})", self.floor - 1);
            if body.is_empty() {
                write!(f, "{big_o}")
            } else {
                write!(f, "{body}+{big_o}")
            }
        }
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> Arc<Field> {
        Field::prime(p).unwrap()
    }

    fn l(field: &Arc<Field>, terms: &[(i64, u32)], floor: i64, exact: bool) -> Laurent {
        let t: Vec<_> = terms.iter().map(|&(k, c)| (k, Elem(c))).collect();
        Laurent::from_terms(field, &t, floor, exact)
    }

    #[test]
    fn rational_expansion_examples() {
        let f2 = f(2);
        let x = RationalFn::new(Poly::from_ints(&f2, &[1]), Poly::from_ints(&f2, &[1, 1])).unwrap();
        let e = Laurent::from_rational(&x, -4);
        assert_eq!(e, l(&f2, &[(-1, 1), (-2, 1), (-3, 1), (-4, 1)], -4, false));
        let f3 = f(3);
        let y = RationalFn::new(Poly::from_ints(&f3, &[1, 0, 1]), Poly::from_ints(&f3, &[0, 1])).unwrap();
        let e = Laurent::from_rational(&y, -2);
        assert!(e.is_exact());
        assert_eq!(e.terms(), vec![(1, Elem(1)), (-1, Elem(1))]);
        let z = Laurent::from_rational(&RationalFn::zero(&f3), -5);
        assert_eq!(z.deg().unwrap(), NEG_INF);
    }

    #[test]
    fn arithmetic_examples() {
        let f2 = f(2);
        let a = l(&f2, &[(1, 1), (-1, 1)], -1, true);
        let b = l(&f2, &[(-1, 1)], -1, true);
        assert_eq!(a.add(&b).terms(), vec![(1, Elem(1))]);
        let t1 = l(&f2, &[(1, 1), (0, 1)], 0, true);
        assert_eq!(t1.inv(-3).unwrap(), l(&f2, &[(-1, 1), (-2, 1), (-3, 1)], -3, false));
        let m = l(&f2, &[(-1, 1)], -1, true);
        assert_eq!(m.mul(&m).terms(), vec![(-2, Elem(1))]);
        assert_eq!(Laurent::zero(&f2).inv(-3).unwrap_err(), Error::ZeroInverse);
    }

    #[test]
    fn split_examples() {
        let f3 = f(3);
        let (i, fr) = l(&f3, &[(2, 1), (0, 1), (-1, 1)], -1, true).split().unwrap();
        assert_eq!(i, Poly::from_ints(&f3, &[1, 0, 1]));
        assert_eq!(fr.terms(), vec![(-1, Elem(1))]);
        let (i, fr) = l(&f3, &[(-1, 1), (-2, 1)], -2, true).split().unwrap();
        assert!(i.is_zero());
        assert_eq!(fr.terms().len(), 2);
        let (i, fr) = l(&f3, &[(3, 1)], 0, true).split().unwrap();
        assert_eq!(i, Poly::from_ints(&f3, &[0, 0, 0, 1]));
        assert!(fr.is_exact_zero());
    }

    #[test]
    fn degree_examples() {
        let f3 = f(3);
        assert_eq!(l(&f3, &[(3, 1), (-1, 1)], -1, true).deg().unwrap(), Deg::Finite(3));
        assert_eq!(Laurent::zero(&f3).deg().unwrap(), NEG_INF);
        assert!(matches!(
            Laurent::new(&f3, -5, vec![], false).deg(),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn pth_root_examples() {
        let f2 = f(2);
        let a = l(&f2, &[(2, 1), (-2, 1)], -2, true);
        assert_eq!(a.pth_root().unwrap().terms(), vec![(1, Elem(1)), (-1, Elem(1))]);
        assert_eq!(
            l(&f2, &[(1, 1)], 0, true).pth_root().unwrap_err(),
            Error::NoRoot { exponent: 1 }
        );
        let f3 = f(3);
        assert_eq!(
            l(&f3, &[(3, 2)], 0, true).pth_root().unwrap().terms(),
            vec![(1, Elem(2))]
        );
    }

    #[test]
    fn sqrt_odd_characteristic() {
        let f3 = f(3);
        // (T + 1)^2 = T^2 + 2T + 1
        let sq = l(&f3, &[(2, 1), (1, 2), (0, 1)], 0, true);
        let r = sq.sqrt(-10).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.mul(&r), sq);
        // T^2 + 1 is not a polynomial square but has a series root.
        let a = l(&f3, &[(2, 1), (0, 1)], 0, true);
        let r = a.sqrt(-10).unwrap();
        assert!(!r.is_exact());
        assert!(r.mul(&r).agrees_with(&a));
        assert!(matches!(
            l(&f3, &[(1, 1)], 0, true).sqrt(-4),
            Err(Error::NoSquareRoot(_))
        ));
        assert!(matches!(
            l(&f3, &[(2, 2)], 0, true).sqrt(-4),
            Err(Error::NoSquareRoot(_))
        ));
    }

    #[test]
    fn inexact_products_keep_certified_floor() {
        let f3 = f(3);
        let a = l(&f3, &[(2, 1), (0, 1)], -3, false);
        let b = l(&f3, &[(1, 1)], -2, false);
        let c = a.mul(&b);
        assert_eq!(c.floor(), -2 + 2);
    }

    #[test]
    fn display_and_json() {
        let f3 = f(3);
        let a = l(&f3, &[(1, 1), (-1, 2)], -8, true);
        assert_eq!(a.to_string(), "T+2*T^-1@floor=-8");
        let b = a.truncate(-4);
        assert_eq!(b.to_string(), "T+2*T^-1+O(T^-5)");
        assert_eq!(Laurent::new(&f3, 1, vec![], false).to_string(), "O(T^0)");
        let j = b.to_json();
        assert_eq!(j["coeffs"], json!([1, 0, 2, 0, 0, 0]));
        assert_eq!(Laurent::from_json(&f3, &j).unwrap(), b);
    }

    fn arb_laurent(field: Arc<Field>) -> impl Strategy<Value = Laurent> {
        let q = field.order();
        (-12i64..-2, proptest::collection::vec(0..q, 0..14), any::<bool>())
            .prop_map(move |(floor, cs, exact)| Laurent::new(&field, floor, cs.into_iter().map(Elem).collect(), exact))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn ultrametric(a in arb_laurent(f(3)), b in arb_laurent(f(3))) {
            if let (Ok(da), Ok(db), Ok(ds)) = (a.deg(), b.deg(), a.add(&b).deg()) {
                prop_assert!(ds <= da.max(db));
                if da != db {
                    prop_assert_eq!(ds, da.max(db));
                }
            }
        }

        #[test]
        fn degree_additive(a in arb_laurent(f(2)), b in arb_laurent(f(2))) {
            if let (Ok(da), Ok(db)) = (a.deg(), b.deg()) {
                prop_assert_eq!(a.mul(&b).deg().unwrap(), da + db);
            }
        }

        #[test]
        fn frobenius_root_round_trip(a in arb_laurent(f(3))) {
            let b = a.frobenius().pth_root().unwrap();
            prop_assert!(b.agrees_with(&a));
        }

        #[test]
        fn split_reassembles(a in arb_laurent(f(5))) {
            let (i, fr) = a.split().unwrap();
            prop_assert!(fr.deg_upper() <= Deg::Finite(-1));
            prop_assert_eq!(Laurent::from_poly(&i).add(&fr), a);
        }

        #[test]
        fn inverse_times_self(a in arb_laurent(f(3))) {
            if let Ok(Deg::Finite(_)) = a.deg() {
                let b = a.inv(-20).unwrap();
                let one = a.mul(&b);
                prop_assert!(one.agrees_with(&Laurent::one(a.field())));
                prop_assert!(one.effective_floor().is_none_or(|fl| fl <= 1));
            }
        }

        #[test]
        fn rational_expansion_times_den(
            n in proptest::collection::vec(-1i64..2, 1..5),
            d in proptest::collection::vec(-1i64..2, 1..5),
        ) {
            let fld = f(3);
            let num = Poly::from_ints(&fld, &n);
            let den = Poly::from_ints(&fld, &d);
            prop_assume!(!den.is_zero());
            let x = RationalFn::new(num.clone(), den.clone()).unwrap();
            let e = Laurent::from_rational(&x, -10);
            let back = e.mul(&Laurent::from_poly(x.den()));
            prop_assert!(back.agrees_with(&Laurent::from_poly(x.num())));
            prop_assert!(back.effective_floor().is_none_or(|fl| fl <= -10 + x.den().deg().unwrap()));
        }
    }
}
