//! Exhaustive search for solutions of `f(x, y) = 0` with `x, y` in the grid
//! `{P/T^G : deg P ≤ 2G}`, i.e. Laurent polynomials with exponents in `[−G, G]`.
//!
//! After clearing denominators, `f` becomes `A(Y) + B(X) + M(X)·Y` over
//! `F_q[T]` with `x = X/T^G`, `y = Y/T^G`. Without a mixed term the search is
//! a hash join of `A` against `−B`; otherwise `Y` is walked by an odometer
//! over its `F_p` digits so that `M(X)·Y` is updated by one vector addition
//! per step.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::poly::{Poly, RationalFn};
use crate::value::Value;

use super::BiPoly;

#[derive(Clone, Debug)]
pub struct GridSearch {
    /// Number of `(x, y)` pairs covered.
    pub pairs: u64,
    pub solutions: Vec<(Value, Value)>,
}

/// Largest number of solutions collected before giving up.
pub const SOLUTION_LIMIT: usize = 1 << 20;

fn lcm(a: &Poly, b: &Poly) -> Result<Poly> {
    let g = a.gcd(b)?;
    Ok(a.mul(&b.divmod(&g)?.0).monic())
}

struct Dense {
    p: u32,
    r: usize,
    width: usize,
}

impl Dense {
    fn digits(&self, poly: &Poly) -> Vec<u8> {
        let mut out = vec![0u8; self.width];
        for (k, c) in poly.coeffs().iter().enumerate() {
            let mut code = c.0;
            for l in 0..self.r {
                out[k * self.r + l] = (code % self.p) as u8;
                code /= self.p;
            }
        }
        out
    }

    fn neg(&self, v: &[u8]) -> Vec<u8> {
        v.iter().map(|&d| ((self.p - d as u32) % self.p) as u8).collect()
    }
}

fn grid_poly(field: &Arc<Field>, idx: u64, len: usize) -> Poly {
    let q = field.order() as u64;
    let mut cs = Vec::with_capacity(len);
    let mut i = idx;
    for _ in 0..len {
        cs.push(Elem((i % q) as u32));
        i /= q;
    }
    Poly::new(field, cs)
}

fn grid_value(field: &Arc<Field>, poly: Poly, g: u32) -> Value {
    let den = Poly::monomial(field, Elem::ONE, g as usize);
    Value::Rational(RationalFn::new(poly, den).expect("monomial denominator"))
}

/// All grid solutions of `f = 0`.
pub fn grid_solutions(f: &BiPoly, g: u32) -> Result<GridSearch> {
    let mixed: Vec<(u64, u64)> = f.terms().map(|(&k, _)| k).filter(|&(i, j)| i > 0 && j > 0).collect();
    if mixed.iter().all(|&(_, j)| j == 1) {
        search(f, g)
    } else if mixed.iter().all(|&(i, _)| i == 1) {
        let mut r = search(&f.swap(), g)?;
        for s in &mut r.solutions {
            std::mem::swap(&mut s.0, &mut s.1);
        }
        Ok(r)
    } else {
        Err(Error::Invalid("grid search needs mixed terms of the form x^i*y".into()))
    }
}

fn search(f: &BiPoly, g: u32) -> Result<GridSearch> {
    let field = f.field().clone();
    let p = field.characteristic();
    if p > 251 {
        return Err(Error::Invalid("grid search supports characteristic below 256".into()));
    }
    let r = field.degree() as usize;
    let len = 2 * g as usize + 1;
    let count = (field.order() as u64)
        .checked_pow(len as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::TooLarge {
            count: (field.order() as u128).saturating_pow(len as u32),
            cap: 1 << 24,
        })?;

    let mut terms: Vec<((u64, u64), RationalFn)> = vec![];
    for (&k, c) in f.terms() {
        let rf = c
            .as_rational()
            .ok_or_else(|| Error::Invalid("grid search needs rational coefficients".into()))?;
        if !rf.is_zero() {
            terms.push((k, rf.clone()));
        }
    }
    let mut d = Poly::one(&field);
    for (_, c) in &terms {
        d = lcm(&d, c.den())?;
    }
    let (e, fy) = f.max_exponents();
    let shift = |i: u64, j: u64| g as usize * (e + fy - i - j) as usize;
    let scaled =
        |i: u64, j: u64, c: &RationalFn| -> Result<Poly> { Ok(c.num().mul(&d.divmod(c.den())?.0).shift(shift(i, j))) };

    let mut a_terms = vec![];
    let mut b_terms = vec![];
    let mut m_terms = vec![];
    for ((i, j), c) in &terms {
        let s = scaled(*i, *j, c)?;
        match (i, j) {
            (0, _) => a_terms.push((*j, s)),
            (_, 0) => b_terms.push((*i, s)),
            _ => m_terms.push((*i, s)),
        }
    }
    let eval = |ts: &[(u64, Poly)], v: &Poly| -> Poly {
        ts.iter()
            .fold(Poly::zero(&field), |acc, (k, c)| acc.add(&c.mul(&v.pow(*k))))
    };

    let grid: Vec<Poly> = (0..count).map(|i| grid_poly(&field, i, len)).collect();
    let a_vals: Vec<Poly> = grid.iter().map(|y| eval(&a_terms, y)).collect();
    let b_vals: Vec<Poly> = grid.iter().map(|x| eval(&b_terms, x)).collect();
    let m_vals: Vec<Poly> = grid.iter().map(|x| eval(&m_terms, x)).collect();
    let deg = |ps: &[Poly]| ps.iter().filter_map(|p| p.deg().finite()).max().unwrap_or(0);
    let top = deg(&a_vals).max(deg(&b_vals)).max(deg(&m_vals) + len as i64);
    let dense = Dense {
        p,
        r,
        width: (top as usize + 1) * r,
    };
    let a_dig: Vec<Vec<u8>> = a_vals.iter().map(|v| dense.digits(v)).collect();

    let mut hits: Vec<(u64, u64)> = vec![];
    let push = |hits: &mut Vec<(u64, u64)>, x: u64, y: u64| -> Result<()> {
        if hits.len() >= SOLUTION_LIMIT {
            return Err(Error::TooLarge {
                count: SOLUTION_LIMIT as u128 + 1,
                cap: SOLUTION_LIMIT as u128,
            });
        }
        hits.push((x, y));
        Ok(())
    };

    if m_terms.is_empty() {
        let mut index: HashMap<&[u8], Vec<u64>> = HashMap::new();
        for (y, v) in a_dig.iter().enumerate() {
            index.entry(v.as_slice()).or_default().push(y as u64);
        }
        for (x, b) in b_vals.iter().enumerate() {
            let key = dense.neg(&dense.digits(b));
            if let Some(ys) = index.get(key.as_slice()) {
                for &y in ys {
                    push(&mut hits, x as u64, y)?;
                }
            }
        }
    } else {
        let positions = len * r;
        let pu = p as u8;
        for (x, (b, m)) in b_vals.iter().zip(&m_vals).enumerate() {
            let b_dig = dense.digits(b);
            let basis: Vec<Vec<u8>> = (0..positions)
                .map(|pos| {
                    let unit = Elem(p.pow((pos % r) as u32));
                    dense.digits(&m.mul(&Poly::monomial(&field, unit, pos / r)))
                })
                .collect();
            let mut acc = vec![0u8; dense.width];
            let mut odo = vec![0u8; positions];
            for (y, a) in a_dig.iter().enumerate() {
                let zero = a
                    .iter()
                    .zip(&acc)
                    .zip(&b_dig)
                    .all(|((&u, &v), &w)| (u as u32 + v as u32 + w as u32).is_multiple_of(p));
                if zero {
                    push(&mut hits, x as u64, y as u64)?;
                }
                for pos in 0..positions {
                    for (s, &t) in acc.iter_mut().zip(&basis[pos]) {
                        let v = *s + t;
                        *s = if v >= pu { v - pu } else { v };
                    }
                    odo[pos] += 1;
                    if odo[pos] < pu {
                        break;
                    }
                    odo[pos] = 0;
                }
            }
        }
    }

    let solutions = hits
        .into_iter()
        .map(|(x, y)| {
            (
                grid_value(&field, grid[x as usize].clone(), g),
                grid_value(&field, grid[y as usize].clone(), g),
            )
        })
        .collect();
    Ok(GridSearch {
        pairs: count * count,
        solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::vanishes;

    fn pv(f: &Arc<Field>, cs: &[i64]) -> Value {
        Value::from_poly(Poly::from_ints(f, cs))
    }

    /// Plain double loop over the grid with rational arithmetic.
    fn naive(f: &BiPoly, g: u32) -> Vec<(String, String)> {
        let field = f.field().clone();
        let len = 2 * g as usize + 1;
        let count = (field.order() as u64).pow(len as u32);
        let mut out = vec![];
        for i in 0..count {
            let x = grid_value(&field, grid_poly(&field, i, len), g);
            for j in 0..count {
                let y = grid_value(&field, grid_poly(&field, j, len), g);
                if vanishes(&f.eval(&x, &y)) {
                    out.push((x.to_string(), y.to_string()));
                }
            }
        }
        out.sort();
        out
    }

    fn fast(f: &BiPoly, g: u32) -> Vec<(String, String)> {
        let mut out: Vec<_> = grid_solutions(f, g)
            .unwrap()
            .solutions
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn mixed_term_search_matches_naive() {
        let f3 = Field::prime(3).unwrap();
        // x·y + (1/T)·y² + T·x − 1
        let mut f = BiPoly::zero(&f3);
        f.add_term(1, 1, &pv(&f3, &[1]));
        f.add_term(
            0,
            2,
            &Value::Rational(RationalFn::new(Poly::from_ints(&f3, &[1]), Poly::from_ints(&f3, &[0, 1])).unwrap()),
        );
        f.add_term(1, 0, &pv(&f3, &[0, 1]));
        f.add_term(0, 0, &pv(&f3, &[2]));
        let a = fast(&f, 1);
        assert_eq!(a, naive(&f, 1));
        assert!(!a.is_empty());
    }

    #[test]
    fn separable_search_matches_naive() {
        let f2 = Field::prime(2).unwrap();
        // x⁴ + y² + T²
        let mut f = BiPoly::zero(&f2);
        f.add_term(4, 0, &pv(&f2, &[1]));
        f.add_term(0, 2, &pv(&f2, &[1]));
        f.add_term(0, 0, &pv(&f2, &[0, 0, 1]));
        let a = fast(&f, 2);
        assert_eq!(a, naive(&f, 2));
        assert!(a.len() >= 4);
    }

    #[test]
    fn extension_field_search_matches_naive() {
        let f4 = Field::new(2, 2, None).unwrap();
        let mut f = BiPoly::zero(&f4);
        f.add_term(1, 1, &Value::constant(&f4, Elem(2)));
        f.add_term(2, 0, &pv(&f4, &[1]));
        f.add_term(0, 0, &Value::constant(&f4, Elem(3)));
        assert_eq!(fast(&f, 1), naive(&f, 1));
    }
}
