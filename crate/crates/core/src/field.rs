//! Finite fields `F_q = F_p[u]/(m(u))` with `q = p^r ≤ 2^16`.
//!
//! Elements are encoded as the integer `Σ c_i p^i` of their coefficient
//! vector, so an [`Elem`] is a plain `u32` and the arithmetic tables live in
//! the shared [`Field`] descriptor. Multiplication in proper extensions goes
//! through discrete log / exp tables built once at construction.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_ORDER: u64 = 1 << 16;

/// Raw element code. Only meaningful together with its [`Field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug)]
pub struct Field {
    p: u32,
    r: u32,
    q: u32,
    /// Monic modulus, ascending coefficients, length r+1.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for a fixed generator `g` (extensions only).
    exp: Vec<u32>,
    log: Vec<u32>,
    /// Full addition table for small q, row-major.
    add_table: Vec<u16>,
    sqrt: Vec<u32>,
    proot: Vec<u32>,
}

const NO_SQRT: u32 = u32::MAX;

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}
impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomial helpers over F_p, ascending coefficients.

fn fp_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_inv(a: u32, p: u32) -> u32 {
    // p is small; Fermat.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = fp_inv(b[db], p) as u64;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r[r.len() - 1] as u64 * lead_inv % p as u64;
        for (i, &bc) in b.iter().enumerate() {
            let t = (c * bc as u64) % p as u64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p as u64 - t) % p as u64) as u32;
        }
        fp_trim(&mut r);
    }
    r
}

fn digits(mut code: u32, p: u32, r: u32) -> Vec<u32> {
    (0..r)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Is the monic polynomial `m` (degree r) irreducible over F_p? Trial
/// division by every monic polynomial of degree 1..=r/2.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let r = (m.len() - 1) as u32;
    for d in 1..=r / 2 {
        let count = (p as u64).pow(d);
        for low in 0..count {
            let mut cand = digits(low as u32, p, d);
            cand.push(1);
            if fp_rem(m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree r,
/// comparing coefficient strings from the top degree down.
fn least_irreducible(p: u32, r: u32) -> Vec<u32> {
    if r == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(r);
    for low in 0..count {
        let mut cand = digits(low as u32, p, r);
        cand.push(1);
        if is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Field {
    /// Build `F_{p^r}`. Without an explicit modulus the lexicographically
    /// least monic irreducible of degree r is used.
    pub fn new(p: u64, r: u32, modulus: Option<Vec<u32>>) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::Invalid("extension degree must be positive".into()));
        }
        let q = p.checked_pow(r).filter(|&q| q <= MAX_ORDER);
        let q = match q {
            Some(q) => q,
            None => return Err(Error::FieldTooLarge { q: p.saturating_pow(r) }),
        };
        let p = p as u32;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != r as usize + 1 || m[r as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus { expected: r });
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                m
            }
            None => least_irreducible(p, r),
        };
        let mut f = Field {
            p,
            r,
            q: q as u32,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: Vec::new(),
            sqrt: Vec::new(),
            proot: Vec::new(),
        };
        f.build_tables();
        Ok(Arc::new(f))
    }

    /// Shorthand for prime fields.
    pub fn prime(p: u64) -> Result<Arc<Field>> {
        Field::new(p, 1, None)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let (p, r) = (self.p, self.r as usize);
        let da = digits(a, p, self.r);
        let db = digits(b, p, self.r);
        let mut prod = vec![0u64; 2 * r - 1];
        for i in 0..r {
            for j in 0..r {
                prod[i + j] += da[i] as u64 * db[j] as u64;
            }
        }
        let prod: Vec<u32> = prod.iter().map(|&c| (c % p as u64) as u32).collect();
        let mut rem = fp_rem(&prod, &self.modulus, p);
        rem.resize(r, 0);
        undigits(&rem, p)
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut result = 1;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.slow_mul(result, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        result
    }

    fn build_tables(&mut self) {
        let q = self.q;
        if self.r > 1 {
            let order = (q - 1) as u64;
            let factors = prime_factors(order);
            let g = (2..q)
                .find(|&g| factors.iter().all(|&l| self.slow_pow(g, order / l) != 1))
                .expect("multiplicative group is cyclic");
            self.exp = Vec::with_capacity(q as usize - 1);
            self.log = vec![0; q as usize];
            let mut x = 1;
            for i in 0..q - 1 {
                self.exp.push(x);
                self.log[x as usize] = i;
                x = self.slow_mul(x, g);
            }
        }
        if q <= 256 && self.r > 1 && self.p != 2 {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = self.digit_add(a, b) as u16;
                }
            }
            self.add_table = t;
        }
        let mut sqrt = vec![NO_SQRT; q as usize];
        for x in 0..q {
            let s = self.mul(Elem(x), Elem(x)).0 as usize;
            if sqrt[s] == NO_SQRT {
                sqrt[s] = x;
            }
        }
        self.sqrt = sqrt;
        let mut proot = vec![0; q as usize];
        for x in 0..q {
            proot[self.pow_u(Elem(x), self.p as u64).0 as usize] = x;
        }
        self.proot = proot;
    }

    fn digit_add(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.r {
            out += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    /// Element from its `F_p` coefficient vector (low to high).
    pub fn from_coeffs(&self, cs: &[u32]) -> Result<Elem> {
        if cs.len() > self.r as usize || cs.iter().any(|&c| c >= self.p) {
            return Err(Error::Invalid(format!(
                "coefficients {cs:?} do not describe an element of F_{}",
                self.q
            )));
        }
        Ok(Elem(undigits(cs, self.p)))
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        digits(a.0, self.p, self.r)
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.r == 1 {
            let s = a.0 + b.0;
            Elem(if s >= self.p { s - self.p } else { s })
        } else if self.p == 2 {
            Elem(a.0 ^ b.0)
        } else if !self.add_table.is_empty() {
            Elem(self.add_table[(a.0 * self.q + b.0) as usize] as u32)
        } else {
            Elem(self.digit_add(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 || a.is_zero() {
            return a;
        }
        if self.r == 1 {
            return Elem(self.p - a.0);
        }
        let ds: Vec<u32> = digits(a.0, self.p, self.r)
            .into_iter()
            .map(|d| (self.p - d) % self.p)
            .collect();
        Elem(undigits(&ds, self.p))
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        if self.r == 1 {
            return Elem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        let n = self.q - 1;
        let i = self.log[a.0 as usize] + self.log[b.0 as usize];
        Elem(self.exp[(if i >= n { i - n } else { i }) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        if self.r == 1 {
            return Ok(Elem(fp_inv(a.0, self.p)));
        }
        let n = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(Elem(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    fn pow_u(&self, a: Elem, mut e: u64) -> Elem {
        let mut result = Elem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// `a^e`; negative exponents go through the inverse.
    pub fn pow(&self, a: Elem, e: i64) -> Result<Elem> {
        if e >= 0 {
            Ok(self.pow_u(a, e as u64))
        } else {
            Ok(self.pow_u(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// Unique `b` with `b^p = a` (Frobenius is a bijection on F_q).
    pub fn pth_root(&self, a: Elem) -> Elem {
        Elem(self.proot[a.0 as usize])
    }

    /// `Some(w)` with `w² = a` when `a` is a square. In characteristic 2
    /// the witness is the Frobenius preimage.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if self.p == 2 {
            return Some(self.pth_root(a));
        }
        match self.sqrt[a.0 as usize] {
            NO_SQRT => None,
            w => Some(Elem(w)),
        }
    }

    pub fn is_square(&self, a: Elem) -> (bool, Option<Elem>) {
        let w = self.sqrt(a);
        (w.is_some(), w)
    }

    pub fn fmt_elem(&self, a: Elem) -> String {
        let cs: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
        format!("[{}]", cs.join(","))
    }

    /// Descriptor string in the CLI syntax `p=<p>,r=<r>,mod=<c0,...>`.
    pub fn spec_string(&self) -> String {
        let m: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!("p={},r={},mod={}", self.p, self.r, m.join(","))
    }

    /// Parse `p=<p>,r=<r>[,mod=<c0,c1,...>]`.
    pub fn parse_spec(s: &str) -> Result<Arc<Field>> {
        let (head, modulus) = match s.find("mod=") {
            Some(i) => (&s[..i], Some(&s[i + 4..])),
            None => (s, None),
        };
        let mut p = None;
        let mut r = 1u32;
        let mut pos = 0;
        for part in head.split(',') {
            let part_trim = part.trim();
            if !part_trim.is_empty() {
                let (k, v) = part_trim
                    .split_once('=')
                    .ok_or_else(|| Error::parse(pos, format!("expected key=value, got {part_trim:?}")))?;
                let n: u64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(pos, format!("bad integer {v:?}")))?;
                match k.trim() {
                    "p" => p = Some(n),
                    "r" => r = u32::try_from(n).map_err(|_| Error::parse(pos, "r too large"))?,
                    other => return Err(Error::parse(pos, format!("unknown key {other:?}"))),
                }
            }
            pos += part.len() + 1;
        }
        let p = p.ok_or_else(|| Error::parse(0, "missing p="))?;
        let modulus = match modulus {
            Some(m) => Some(
                m.split(',')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::parse(head.len() + 4, "bad modulus coefficient"))?,
            ),
            None => None,
        };
        Field::new(p, r, modulus)
    }
}

/// An element bundled with its field, for API surfaces where the field is
/// not otherwise in scope.
#[derive(Clone)]
pub struct FieldElem {
    pub field: Arc<Field>,
    pub elem: Elem,
}

impl FieldElem {
    pub fn new(field: &Arc<Field>, elem: Elem) -> Self {
        FieldElem {
            field: field.clone(),
            elem,
        }
    }

    fn same(&self, other: &FieldElem) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same(other)?;
        Ok(FieldElem::new(&self.field, self.field.add(self.elem, other.elem)))
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same(other)?;
        Ok(FieldElem::new(&self.field, self.field.mul(self.elem, other.elem)))
    }

    pub fn inv(&self) -> Result<FieldElem> {
        Ok(FieldElem::new(&self.field, self.field.inv(self.elem)?))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElem> {
        Ok(FieldElem::new(&self.field, self.field.pow(self.elem, e)?))
    }

    pub fn pth_root(&self) -> FieldElem {
        FieldElem::new(&self.field, self.field.pth_root(self.elem))
    }

    pub fn is_square(&self) -> (bool, Option<FieldElem>) {
        let (ok, w) = self.field.is_square(self.elem);
        (ok, w.map(|w| FieldElem::new(&self.field, w)))
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.elem == other.elem && *self.field == *other.field
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.fmt_elem(self.elem))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.fmt_elem(self.elem))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_fields() -> Vec<Arc<Field>> {
        vec![
            Field::prime(2).unwrap(),
            Field::prime(3).unwrap(),
            Field::new(2, 2, None).unwrap(),
            Field::prime(5).unwrap(),
            Field::prime(7).unwrap(),
            Field::new(2, 3, None).unwrap(),
            Field::new(3, 2, None).unwrap(),
        ]
    }

    #[test]
    fn construction_examples() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(f2.modulus(), &[0, 1]);
        let f4 = Field::new(2, 2, None).unwrap();
        // u^2 + u + 1 is the only irreducible quadratic over F_2.
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert_eq!(Field::prime(4).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(Field::new(2, 17, None), Err(Error::FieldTooLarge { .. })));
        assert!(matches!(
            Field::new(2, 2, Some(vec![1, 0, 1])),
            Err(Error::ReducibleModulus { .. })
        ));
        assert!(Field::new(2, 16, None).is_ok());
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.inv(Elem(2)).unwrap(), Elem(2));
        let f4 = Field::new(2, 2, None).unwrap();
        let u = f4.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f4.mul(u, u), f4.from_coeffs(&[1, 1]).unwrap());
        let f2 = Field::prime(2).unwrap();
        assert_eq!(f2.inv(Elem::ZERO), Err(Error::ZeroInverse));
        assert_eq!(f3.pow(Elem(2), -3).unwrap(), Elem(2));
    }

    #[test]
    fn pth_root_examples() {
        let f4 = Field::new(2, 2, None).unwrap();
        let u = f4.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f4.pth_root(u), f4.from_coeffs(&[1, 1]).unwrap());
        assert_eq!(f4.pth_root(Elem::ZERO), Elem::ZERO);
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.pth_root(Elem(2)), Elem(2));
    }

    #[test]
    fn square_examples() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.is_square(Elem(2)), (false, None));
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.is_square(Elem(4)), (true, Some(Elem(2))));
        for f in [Field::prime(2).unwrap(), Field::new(2, 2, None).unwrap()] {
            for a in f.elements() {
                assert_eq!(f.is_square(a), (true, Some(f.pth_root(a))));
            }
        }
    }

    #[test]
    fn exhaustive_field_laws() {
        for f in small_fields() {
            for a in f.elements() {
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
                }
                assert_eq!(f.pth_root(f.pow(a, f.characteristic() as i64).unwrap()), a);
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
            let squares = f.elements().filter(|&a| f.is_square(a).0).count() as u32;
            if f.characteristic() == 2 {
                assert_eq!(squares, f.order());
            } else {
                assert_eq!(squares, f.order().div_ceil(2));
            }
        }
    }

    #[test]
    fn multiplication_matches_quotient_ring() {
        // Compare log-table multiplication with schoolbook reduction.
        for f in small_fields().into_iter().filter(|f| f.degree() > 1) {
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b).0, f.slow_mul(a.0, b.0));
                }
            }
        }
    }

    #[test]
    fn randomized_inverse_large_field() {
        use rand::{Rng, SeedableRng};
        let f = Field::new(2, 16, None).unwrap();
        let g = Field::new(251, 2, None).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for field in [f, g] {
            for _ in 0..10_000 {
                let a = Elem(rng.gen_range(1..field.order()));
                assert_eq!(field.mul(a, field.inv(a).unwrap()), Elem::ONE);
            }
        }
    }

    #[test]
    fn spec_string_round_trip() {
        let f = Field::parse_spec("p=3,r=2").unwrap();
        let g = Field::parse_spec(&f.spec_string()).unwrap();
        assert_eq!(*f, *g);
        assert!(Field::parse_spec("p=3,r=2,mod=1,0,1").is_ok());
        assert!(Field::parse_spec("q=3").is_err());
    }
}
