//! `F_q[T]` and `F_q(T)`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::degree::{Deg, NEG_INF};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// Polynomial with ascending coefficients and no trailing zeros.
#[derive(Clone)]
pub struct Poly {
    field: Arc<Field>,
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(field: &Arc<Field>, mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    /// From integer coefficients (ascending), reduced into the prime subfield.
    pub fn from_ints(field: &Arc<Field>, cs: &[i64]) -> Poly {
        Poly::new(field, cs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Arc<Field>) -> Poly {
        Poly::new(field, Vec::new())
    }

    pub fn one(field: &Arc<Field>) -> Poly {
        Poly::constant(field, Elem::ONE)
    }

    pub fn constant(field: &Arc<Field>, c: Elem) -> Poly {
        Poly::new(field, vec![c])
    }

    /// `c·T^k`.
    pub fn monomial(field: &Arc<Field>, c: Elem, k: usize) -> Poly {
        let mut v = vec![Elem::ZERO; k + 1];
        v[k] = c;
        Poly::new(field, v)
    }

    /// The indeterminate `T`.
    pub fn t(field: &Arc<Field>) -> Poly {
        Poly::monomial(field, Elem::ONE, 1)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Elem {
        self.coeffs.get(k).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> Deg {
        if self.coeffs.is_empty() {
            NEG_INF
        } else {
            Deg::Finite(self.coeffs.len() as i64 - 1)
        }
    }

    pub fn lead(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Elem::ONE
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Elem::ONE
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Poly::new(f, v)
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut v = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, v)
    }

    pub fn scale(&self, c: Elem) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiply by `T^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![Elem::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly::new(&self.field, v)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut result = Poly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Euclidean division: `self = q·b + r` with `deg r < deg b`.
    pub fn divmod(&self, b: &Poly) -> Result<(Poly, Poly)> {
        if b.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        let f = &self.field;
        let db = b.coeffs.len() - 1;
        let lead_inv = f.inv(b.lead())?;
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut q = vec![Elem::ZERO; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = f.mul(r[k], lead_inv);
            if c.is_zero() {
                continue;
            }
            q[k - db] = c;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                let idx = k - db + j;
                r[idx] = f.sub(r[idx], f.mul(c, bj));
            }
        }
        r.truncate(db);
        Ok((Poly::new(f, q), Poly::new(f, r)))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lead()).expect("nonzero lead"))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divmod(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Ordering used for deterministic tie-breaks: degree first, then
    /// coefficient codes from the top exponent down.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }

    fn fmt_coeff(&self, c: Elem) -> String {
        if self.field.degree() == 1 {
            c.0.to_string()
        } else {
            self.field.fmt_elem(c)
        }
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}
impl Eq for Poly {}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            write!(f, "{}", fmt_term(&self.fmt_coeff(c), c == Elem::ONE, k as i64))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// One term `c*T^k` in canonical form; shared with the Laurent printer.
pub(crate) fn fmt_term(coeff: &str, is_one: bool, k: i64) -> String {
    let mono = match k {
        0 => return coeff.to_string(),
        1 => "T".to_string(),
        _ => format!("T^{k}"),
    };
    if is_one {
        mono
    } else {
        format!("{coeff}*{mono}")
    }
}

/// Element of `F_q(T)` in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<RationalFn> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let f = num.field().clone();
        if num.is_zero() {
            return Ok(RationalFn {
                num,
                den: Poly::one(&f),
            });
        }
        let g = num.gcd(&den)?;
        let (mut n, _) = num.divmod(&g)?;
        let (mut d, _) = den.divmod(&g)?;
        let li = f.inv(d.lead())?;
        n = n.scale(li);
        d = d.scale(li);
        Ok(RationalFn { num: n, den: d })
    }

    pub fn from_poly(p: Poly) -> RationalFn {
        let one = Poly::one(p.field());
        RationalFn { num: p, den: one }
    }

    pub fn zero(field: &Arc<Field>) -> RationalFn {
        RationalFn::from_poly(Poly::zero(field))
    }

    pub fn field(&self) -> &Arc<Field> {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// `deg num − deg den`, or `-inf` for zero.
    pub fn deg(&self) -> Deg {
        match (self.num.deg(), self.den.deg()) {
            (Deg::Finite(a), Deg::Finite(b)) => Deg::Finite(a - b),
            _ => NEG_INF,
        }
    }

    /// Height: `max(deg num, deg den)`.
    pub fn height(&self) -> i64 {
        self.num.deg().max(self.den.deg()).unwrap()
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        RationalFn::new(n, self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        RationalFn::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn inv(&self) -> Result<RationalFn> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        RationalFn::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn scale(&self, c: Elem) -> RationalFn {
        RationalFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Integer part `[x]` and fractional numerator: `x = [x] + r/den`.
    pub fn split(&self) -> (Poly, RationalFn) {
        let (q, r) = self.num.divmod(&self.den).expect("nonzero denominator");
        (
            q,
            RationalFn {
                num: r,
                den: self.den.clone(),
            },
        )
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            let s = p.to_string();
            if s.contains('+') || s.contains('*') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rational({self})")
    }
}

/// Divide a nonzero vector by the gcd of its entries and scale so the first
/// nonzero entry is monic.
pub fn vector_primitive_normalize(v: &[Poly]) -> Result<Vec<Poly>> {
    let first = v.iter().find(|p| !p.is_zero()).ok_or(Error::ZeroVector)?;
    let mut g = first.monic();
    for p in v {
        if !p.is_zero() {
            g = g.gcd(p)?;
        }
    }
    let f = first.field().clone();
    let unit = f.inv(first.divmod(&g)?.0.lead())?;
    v.iter().map(|p| Ok(p.divmod(&g)?.0.scale(unit))).collect()
}

/// Height `max deg a_i` of a coefficient vector.
pub fn height_deg(v: &[Poly]) -> Deg {
    v.iter().map(Poly::deg).max().unwrap_or(NEG_INF)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> Arc<Field> {
        Field::prime(p).unwrap()
    }

    fn p(field: &Arc<Field>, cs: &[i64]) -> Poly {
        Poly::from_ints(field, cs)
    }

    #[test]
    fn divmod_examples() {
        let f3 = f(3);
        let (q, r) = p(&f3, &[1, 0, 1]).divmod(&p(&f3, &[0, 1])).unwrap();
        assert_eq!((q, r), (p(&f3, &[0, 1]), p(&f3, &[1])));
        let f2 = f(2);
        let (q, r) = p(&f2, &[0, 1, 1]).divmod(&p(&f2, &[1, 1])).unwrap();
        assert_eq!((q, r), (p(&f2, &[0, 1]), Poly::zero(&f2)));
        let (q, r) = p(&f2, &[1]).divmod(&p(&f2, &[0, 1])).unwrap();
        assert_eq!((q, r), (Poly::zero(&f2), p(&f2, &[1])));
        assert_eq!(
            p(&f2, &[1]).divmod(&Poly::zero(&f2)).unwrap_err(),
            Error::DivisionByZeroPoly
        );
    }

    #[test]
    fn gcd_examples() {
        let f2 = f(2);
        assert_eq!(p(&f2, &[0, 1, 1]).gcd(&p(&f2, &[1, 1])).unwrap(), p(&f2, &[1, 1]));
        assert_eq!(p(&f2, &[0, 1]).gcd(&p(&f2, &[1])).unwrap(), p(&f2, &[1]));
        let f3 = f(3);
        assert_eq!(p(&f3, &[0, 2]).gcd(&p(&f3, &[0, 1])).unwrap(), p(&f3, &[0, 1]));
        assert_eq!(Poly::zero(&f3).gcd(&Poly::zero(&f3)).unwrap_err(), Error::BothZero);
    }

    #[test]
    fn primitive_examples() {
        let f3 = f(3);
        let v = vec![p(&f3, &[0, 2]), p(&f3, &[2]), p(&f3, &[]), p(&f3, &[2])];
        let w = vector_primitive_normalize(&v).unwrap();
        assert_eq!(w, vec![p(&f3, &[0, 1]), p(&f3, &[1]), p(&f3, &[]), p(&f3, &[1])]);
        let f2 = f(2);
        let w = vector_primitive_normalize(&[p(&f2, &[0, 0, 1]), p(&f2, &[0, 1])]).unwrap();
        assert_eq!(w, vec![p(&f2, &[0, 1]), p(&f2, &[1])]);
        let w = vector_primitive_normalize(&[p(&f2, &[1]), p(&f2, &[])]).unwrap();
        assert_eq!(w, vec![p(&f2, &[1]), p(&f2, &[])]);
        assert_eq!(
            vector_primitive_normalize(&[Poly::zero(&f2)]).unwrap_err(),
            Error::ZeroVector
        );
    }

    #[test]
    fn display_is_canonical() {
        let f3 = f(3);
        assert_eq!(p(&f3, &[1, 2, 1]).to_string(), "T^2+2*T+1");
        assert_eq!(Poly::zero(&f3).to_string(), "0");
        let r = RationalFn::new(p(&f3, &[1, 0, 1]), p(&f3, &[0, 1])).unwrap();
        assert_eq!(r.to_string(), "(T^2+1)/T");
        let f4 = Field::new(2, 2, None).unwrap();
        let u = Elem(2);
        assert_eq!(
            Poly::monomial(&f4, u, 2).add(&Poly::one(&f4)).to_string(),
            "[0,1]*T^2+[1,0]"
        );
    }

    #[test]
    fn rational_normal_form() {
        let f3 = f(3);
        // (2T^2 + 2T) / (2T) = T + 1
        let r = RationalFn::new(p(&f3, &[0, 2, 2]), p(&f3, &[0, 2])).unwrap();
        assert!(r.is_poly());
        assert_eq!(r.num(), &p(&f3, &[1, 1]));
        let s = RationalFn::new(p(&f3, &[1]), p(&f3, &[0, 2])).unwrap();
        assert!(s.den().is_monic());
        assert_eq!(s.num(), &p(&f3, &[2]));
    }

    fn arb_poly(field: Arc<Field>, max_len: usize) -> impl Strategy<Value = Poly> {
        let q = field.order();
        proptest::collection::vec(0..q, 0..=max_len)
            .prop_map(move |cs| Poly::new(&field, cs.into_iter().map(Elem).collect()))
    }

    proptest! {
        #[test]
        fn degree_is_additive(a in arb_poly(f(3), 6), b in arb_poly(f(3), 6)) {
            prop_assert_eq!(a.mul(&b).deg(), a.deg() + b.deg());
        }

        #[test]
        fn ultrametric(a in arb_poly(f(2), 6), b in arb_poly(f(2), 6)) {
            let s = a.add(&b).deg();
            prop_assert!(s <= a.deg().max(b.deg()));
            if a.deg() != b.deg() {
                prop_assert_eq!(s, a.deg().max(b.deg()));
            }
        }

        #[test]
        fn division_identity(a in arb_poly(f(5), 8), b in arb_poly(f(5), 5)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divmod(&b).unwrap();
            prop_assert_eq!(q.mul(&b).add(&r), a);
            prop_assert!(r.deg() < b.deg());
        }

        #[test]
        fn primitive_vectors(v in proptest::collection::vec(arb_poly(f(3), 4), 1..4)) {
            prop_assume!(v.iter().any(|x| !x.is_zero()));
            let w = vector_primitive_normalize(&v).unwrap();
            let first = w.iter().find(|x| !x.is_zero()).unwrap();
            prop_assert!(first.is_monic());
            let g = w.iter().filter(|x| !x.is_zero()).fold(first.clone(), |g, x| g.gcd(x).unwrap());
            prop_assert!(g.is_one());
            // Same hyperplane: w is a scalar multiple of v over F_q(T).
            let i = v.iter().position(|x| !x.is_zero()).unwrap();
            for (a, b) in v.iter().zip(&w) {
                prop_assert_eq!(a.mul(&w[i]), b.mul(&v[i]));
            }
        }
    }
}
