//! Bivariate polynomials in `x, y` and univariate polynomials in a
//! parameter, both with coefficients in `F_q((T⁻¹))`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::degree::NEG_INF;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::value::Value;

/// True when `v` is zero on every certified digit.
pub fn vanishes(v: &Value) -> bool {
    match v.deg() {
        Ok(d) => d == NEG_INF,
        Err(Error::PrecisionExhausted(_)) => true,
        Err(_) => false,
    }
}

/// Strict zero test: undecided values are an error.
pub fn is_zero(v: &Value) -> Result<bool> {
    v.is_zero()
}

fn pow_value(v: &Value, e: u64) -> Value {
    let mut acc = Value::constant(v.field(), crate::field::Elem::ONE);
    for _ in 0..e {
        acc = acc.mul(v);
    }
    acc
}

/// Univariate polynomial `Σ c_k t^k`, ascending.
#[derive(Clone, Debug)]
pub struct VPoly {
    field: Arc<Field>,
    pub coeffs: Vec<Value>,
}

impl VPoly {
    pub fn new(field: &Arc<Field>, coeffs: Vec<Value>) -> VPoly {
        VPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn constant(v: Value) -> VPoly {
        VPoly {
            field: v.field().clone(),
            coeffs: vec![v],
        }
    }

    /// The parameter `t` itself.
    pub fn t(field: &Arc<Field>) -> VPoly {
        let one = Value::constant(field, crate::field::Elem::ONE);
        VPoly::new(field, vec![Value::zero(field), one])
    }

    fn coeff(&self, k: usize) -> Value {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Value::zero(&self.field))
    }

    pub fn add(&self, o: &VPoly) -> VPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        VPoly::new(&self.field, (0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect())
    }

    pub fn scale(&self, c: &Value) -> VPoly {
        VPoly::new(&self.field, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn mul(&self, o: &VPoly) -> VPoly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return VPoly::new(&self.field, vec![]);
        }
        let mut out = vec![Value::zero(&self.field); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if vanishes(a) && a.is_rational() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        VPoly::new(&self.field, out)
    }

    /// `self^e`, using the Frobenius whenever `p | e`.
    pub fn pow(&self, e: u64) -> VPoly {
        let p = self.field.characteristic() as u64;
        if e == 0 {
            return VPoly::constant(Value::constant(&self.field, crate::field::Elem::ONE));
        }
        if e.is_multiple_of(p) {
            let base = self.pow(e / p);
            let mut out = vec![Value::zero(&self.field); (base.coeffs.len().max(1) - 1) * p as usize + 1];
            for (k, c) in base.coeffs.iter().enumerate() {
                out[k * p as usize] = pow_value(c, p);
            }
            return VPoly::new(&self.field, out);
        }
        self.mul(&self.pow(e - 1))
    }

    pub fn eval(&self, t: &Value) -> Value {
        let mut acc = Value::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(t).add(c);
        }
        acc
    }

    /// Index of the first coefficient that does not vanish.
    pub fn first_nonvanishing(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !vanishes(c))
    }
}

/// Which coordinate a parametrisation leaves free.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

/// `f(x, y) = Σ c_{ij} x^i y^j`.
#[derive(Clone)]
pub struct BiPoly {
    field: Arc<Field>,
    terms: BTreeMap<(u64, u64), Value>,
}

impl BiPoly {
    pub fn zero(field: &Arc<Field>) -> BiPoly {
        BiPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// Adds `c·x^i y^j`.
    pub fn add_term(&mut self, i: u64, j: u64, c: &Value) {
        let e = self.terms.entry((i, j)).or_insert_with(|| Value::zero(&self.field));
        *e = e.add(c);
    }

    pub fn coeff(&self, i: u64, j: u64) -> Value {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| Value::zero(&self.field))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u64, u64), &Value)> {
        self.terms.iter()
    }

    pub fn is_identically_zero(&self) -> Result<bool> {
        for c in self.terms.values() {
            if !is_zero(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn swap(&self) -> BiPoly {
        BiPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    pub fn deriv(&self, v: Var) -> BiPoly {
        let mut out = BiPoly::zero(&self.field);
        for (&(i, j), c) in &self.terms {
            let e = match v {
                Var::X => i,
                Var::Y => j,
            };
            if e == 0 {
                continue;
            }
            let k = self.field.from_int((e % self.field.characteristic() as u64) as i64);
            if k.is_zero() {
                continue;
            }
            let (ni, nj) = match v {
                Var::X => (i - 1, j),
                Var::Y => (i, j - 1),
            };
            out.add_term(ni, nj, &c.scale(k));
        }
        out
    }

    pub fn eval(&self, x: &Value, y: &Value) -> Value {
        let mut acc = Value::zero(&self.field);
        for (&(i, j), c) in &self.terms {
            acc = acc.add(&c.mul(&pow_value(x, i)).mul(&pow_value(y, j)));
        }
        acc
    }

    /// True when `f`, `∂f/∂x` and `∂f/∂y` all vanish at the point.
    pub fn is_singular_at(&self, x: &Value, y: &Value) -> bool {
        vanishes(&self.eval(x, y))
            && vanishes(&self.deriv(Var::X).eval(x, y))
            && vanishes(&self.deriv(Var::Y).eval(x, y))
    }

    /// `f` restricted to `other(free) = g(free)`, as a polynomial in the free variable.
    pub fn substitute(&self, free: Var, g: &VPoly) -> VPoly {
        let t = VPoly::t(&self.field);
        let mut acc = VPoly::new(&self.field, vec![]);
        for (&(i, j), c) in &self.terms {
            let (ef, eg) = match free {
                Var::X => (i, j),
                Var::Y => (j, i),
            };
            let term = t.pow(ef).mul(&g.pow(eg)).scale(c);
            acc = acc.add(&term);
        }
        acc
    }

    /// `f` with the coordinate `fixed` set to `v`, as a polynomial in the other one.
    pub fn restrict(&self, fixed: Var, v: &Value) -> VPoly {
        self.substitute(fixed.other(), &VPoly::constant(v.clone()))
    }

    pub fn max_exponents(&self) -> (u64, u64) {
        self.terms.keys().fold((0, 0), |(a, b), &(i, j)| (a.max(i), b.max(j)))
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (&(i, j), c) in self.terms.iter().rev() {
            if vanishes(c) && c.is_rational() {
                continue;
            }
            let mono = [(i, "x"), (j, "y")]
                .iter()
                .filter(|(e, _)| *e > 0)
                .map(|&(e, n)| if e == 1 { n.to_string() } else { format!("{n}^{e}") })
                .collect::<Vec<_>>()
                .join("*");
            let coeff = format!("({c})");
            parts.push(match (mono.is_empty(), c.to_string() == "1") {
                (true, _) => coeff,
                (false, true) => mono,
                (false, false) => format!("{coeff}*{mono}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Elem;
    use crate::poly::Poly;

    fn c(f: &Arc<Field>, cs: &[i64]) -> Value {
        Value::from_poly(Poly::from_ints(f, cs))
    }

    #[test]
    fn derivative_respects_characteristic() {
        let f3 = Field::prime(3).unwrap();
        let mut g = BiPoly::zero(&f3);
        g.add_term(3, 0, &c(&f3, &[1]));
        g.add_term(2, 1, &c(&f3, &[1]));
        let dx = g.deriv(Var::X);
        assert_eq!(dx.coeff(1, 1).to_string(), "2");
        assert!(vanishes(&dx.coeff(2, 0)));
    }

    #[test]
    fn frobenius_power_matches_repeated_product() {
        let f2 = Field::prime(2).unwrap();
        let g = VPoly::new(&f2, vec![c(&f2, &[0, 1]), c(&f2, &[1]), c(&f2, &[1, 1])]);
        let a = g.pow(4);
        let b = g.mul(&g).mul(&g).mul(&g);
        assert_eq!(a.coeffs.len(), b.coeffs.len());
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert!(vanishes(&x.sub(y)));
        }
    }

    #[test]
    fn substitution_of_a_root_vanishes() {
        // x^2 + y^2 + T^2 over F_2 along y = T + x
        let f2 = Field::prime(2).unwrap();
        let mut g = BiPoly::zero(&f2);
        g.add_term(2, 0, &c(&f2, &[1]));
        g.add_term(0, 2, &c(&f2, &[1]));
        g.add_term(0, 0, &c(&f2, &[0, 0, 1]));
        let line = VPoly::new(&f2, vec![c(&f2, &[0, 1]), Value::constant(&f2, Elem::ONE)]);
        let r = g.substitute(Var::X, &line);
        assert!(r.first_nonvanishing().is_none());
    }
}
