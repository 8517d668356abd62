//! Exhaustive minimisation of `deg⟨q·y⟩` over a box of polynomial vectors.
//!
//! The map `q ↦ ⟨q·y⟩` is `F_p`-linear, so every candidate is the sum of
//! precomputed basis vectors `⟨u^l T^j y_i⟩` written as `F_p` digit strings
//! indexed from exponent `-1` downwards. Candidates are visited in
//! monic-normalised blocks (first nonzero coordinate `i`, its degree `d`,
//! leading coefficient 1) by an odometer: every digit step adds exactly one
//! basis vector. Blocks are split into chunks that run in parallel; the
//! reduction uses a total order on candidates so the answer does not depend
//! on scheduling.

use std::cmp::Ordering;
use std::sync::Arc;

use rayon::prelude::*;

use crate::degree::{Deg, NEG_INF};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::poly::Poly;
use crate::value::Value;

pub const DEFAULT_CAP: u128 = 10_000_000;

/// States per parallel chunk, roughly.
const CHUNK: u64 = 1 << 15;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub value: Deg,
    pub q: Vec<Poly>,
    pub q0: Poly,
}

/// Number of monic-normalised nonzero vectors with `deg q_i ≤ bounds[i]`.
pub fn candidate_count(q: u32, bounds: &[i64]) -> u128 {
    let n: i64 = bounds.iter().filter(|&&b| b >= 0).map(|b| b + 1).sum();
    let mut total: u128 = 0;
    let mut pw: u128 = 1;
    for _ in 0..n {
        total = total.saturating_add(pw);
        pw = pw.saturating_mul(q as u128);
    }
    total
}

trait Digit: Copy + Default + Send + Sync + PartialEq {
    fn from_u32(x: u32) -> Self;
    fn to_u32(self) -> u32;
}

impl Digit for u8 {
    fn from_u32(x: u32) -> Self {
        x as u8
    }
    fn to_u32(self) -> u32 {
        self as u32
    }
}

impl Digit for u16 {
    fn from_u32(x: u32) -> Self {
        x as u16
    }
    fn to_u32(self) -> u32 {
        self as u32
    }
}

#[inline]
fn add_assign<D: Digit>(acc: &mut [D], v: &[D], p: u32) {
    for (a, &b) in acc.iter_mut().zip(v) {
        let s = a.to_u32() + b.to_u32();
        *a = D::from_u32(if s >= p { s - p } else { s });
    }
}

/// A coordinate of the digit space: `u^l T^j` in position `coord`.
#[derive(Debug, Clone, Copy)]
struct Slot {
    coord: usize,
    j: usize,
    l: usize,
}

struct Problem<D> {
    field: Arc<Field>,
    p: u32,
    r: usize,
    bounds: Vec<i64>,
    /// Basis vector per slot; all share one length.
    basis: Vec<Vec<D>>,
    slots: Vec<Slot>,
    /// `slot_index[coord][j * r + l]`.
    slot_index: Vec<Vec<usize>>,
    /// Laurent mode: an all-zero vector is undecided rather than zero.
    inexact: bool,
}

#[derive(Clone)]
struct Best {
    value: Deg,
    block: usize,
    digits: Vec<u32>,
}

struct Block {
    coord: usize,
    d: usize,
    lead: usize,
    free: Vec<usize>,
}

impl<D: Digit> Problem<D> {
    fn value(&self, v: &[D]) -> Option<Deg> {
        match v.iter().position(|&x| x != D::default()) {
            Some(z) => Some(Deg::Finite(-1 - (z / self.r) as i64)),
            None if self.inexact => None,
            None => Some(NEG_INF),
        }
    }

    fn blocks(&self) -> Vec<Block> {
        let mut out = Vec::new();
        for (i, &b) in self.bounds.iter().enumerate() {
            if b < 0 {
                continue;
            }
            for d in 0..=b as usize {
                let mut free = Vec::new();
                for j in 0..d {
                    for l in 0..self.r {
                        free.push(self.slot_index[i][j * self.r + l]);
                    }
                }
                for (k, &bk) in self.bounds.iter().enumerate().skip(i + 1) {
                    if bk < 0 {
                        continue;
                    }
                    for j in 0..=bk as usize {
                        for l in 0..self.r {
                            free.push(self.slot_index[k][j * self.r + l]);
                        }
                    }
                }
                out.push(Block {
                    coord: i,
                    d,
                    lead: self.slot_index[i][d * self.r],
                    free,
                });
            }
        }
        out
    }

    fn candidate(&self, block: &Block, digits: &[u32]) -> Vec<Poly> {
        let n = self.bounds.len();
        let mut cs: Vec<Vec<u32>> = self
            .bounds
            .iter()
            .map(|&b| vec![0u32; (b.max(-1) + 1) as usize])
            .collect();
        let pw: Vec<u32> = (0..self.r).map(|l| self.p.pow(l as u32)).collect();
        cs[block.coord][block.d] = 1;
        for (&s, &c) in block.free.iter().zip(digits) {
            let slot = self.slots[s];
            cs[slot.coord][slot.j] += c * pw[slot.l];
        }
        (0..n)
            .map(|i| Poly::new(&self.field, cs[i].iter().map(|&c| Elem(c)).collect()))
            .collect()
    }

    /// Run the odometer over the low `free.len() - prefix.len()` digits with
    /// the top digits fixed to `prefix`.
    fn run_chunk(&self, bi: usize, block: &Block, prefix: &[u32], undecided: &mut bool) -> Option<Best> {
        let p = self.p;
        let nfree = block.free.len();
        let low = nfree - prefix.len();
        let mut v = self.basis[block.lead].clone();
        let mut digits = vec![0u32; nfree];
        for (k, &c) in prefix.iter().enumerate() {
            digits[low + k] = c;
            for _ in 0..c {
                add_assign(&mut v, &self.basis[block.free[low + k]], p);
            }
        }
        let mut best: Option<Best> = None;
        loop {
            match self.value(&v) {
                None => *undecided = true,
                Some(val) => {
                    let better = match &best {
                        None => true,
                        Some(b) if val < b.value => true,
                        Some(b) if val == b.value => self.cmp_tie(block, &digits, block, &b.digits) == Ordering::Less,
                        _ => false,
                    };
                    if better {
                        best = Some(Best {
                            value: val,
                            block: bi,
                            digits: digits.clone(),
                        });
                    }
                }
            }
            let mut t = 0;
            loop {
                if t == low {
                    return best;
                }
                digits[t] += 1;
                add_assign(&mut v, &self.basis[block.free[t]], p);
                if digits[t] == p {
                    digits[t] = 0;
                    t += 1;
                } else {
                    break;
                }
            }
        }
    }

    fn cmp_tie(&self, ba: &Block, da: &[u32], bb: &Block, db: &[u32]) -> Ordering {
        cmp_vectors(&self.candidate(ba, da), &self.candidate(bb, db))
    }

    fn solve(&self) -> (Option<Best>, bool) {
        let blocks = self.blocks();
        let mut chunks: Vec<(usize, Vec<u32>)> = Vec::new();
        for (bi, b) in blocks.iter().enumerate() {
            let nfree = b.free.len();
            let mut k = 0;
            while k < nfree && (self.p as u64).saturating_pow((nfree - k) as u32) > CHUNK {
                k += 1;
            }
            let count = (self.p as u64).pow(k as u32);
            for idx in 0..count {
                let mut prefix = Vec::with_capacity(k);
                let mut x = idx;
                for _ in 0..k {
                    prefix.push((x % self.p as u64) as u32);
                    x /= self.p as u64;
                }
                chunks.push((bi, prefix));
            }
        }
        let results: Vec<(Option<Best>, bool)> = chunks
            .par_iter()
            .map(|(bi, prefix)| {
                let mut und = false;
                let b = self.run_chunk(*bi, &blocks[*bi], prefix, &mut und);
                (b, und)
            })
            .collect();
        let mut undecided = false;
        let mut best: Option<Best> = None;
        for (b, u) in results {
            undecided |= u;
            if let Some(b) = b {
                let better = match &best {
                    None => true,
                    Some(cur) => match b.value.cmp(&cur.value) {
                        Ordering::Less => true,
                        Ordering::Equal => {
                            self.cmp_tie(&blocks[b.block], &b.digits, &blocks[cur.block], &cur.digits) == Ordering::Less
                        }
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some(b);
                }
            }
        }
        (best, undecided)
    }
}

/// Tie-break order on candidate vectors: height, then coordinate by
/// coordinate (degree, then coefficients from the top down).
pub fn cmp_vectors(a: &[Poly], b: &[Poly]) -> Ordering {
    let ha = a.iter().map(Poly::deg).max();
    let hb = b.iter().map(Poly::deg).max();
    ha.cmp(&hb).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.canonical_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

fn build<D: Digit>(y: &[Value], bounds: &[i64]) -> Result<Problem<D>> {
    let field = y[0].field().clone();
    let p = field.characteristic();
    let r = field.degree() as usize;
    let used: Vec<usize> = (0..y.len()).filter(|&i| bounds[i] >= 0).collect();
    let mut slots = Vec::new();
    let mut slot_index = vec![Vec::new(); y.len()];
    for &i in &used {
        for j in 0..=bounds[i] as usize {
            for l in 0..r {
                slot_index[i].push(slots.len());
                slots.push(Slot { coord: i, j, l });
            }
        }
    }
    let unit = |l: usize| Elem(p.pow(l as u32));
    let push_digits = |out: &mut Vec<D>, c: Elem| {
        for d in field.coeffs(c) {
            out.push(D::from_u32(d));
        }
    };
    let inexact = used.iter().any(|&i| !y[i].is_rational());
    let mut basis = Vec::with_capacity(slots.len());
    if !inexact {
        // Numerators over a common monic denominator D.
        let mut den = Poly::one(&field);
        for &i in &used {
            let d = y[i].as_rational().unwrap().den();
            let g = den.gcd(d)?;
            den = den.mul(&d.divmod(&g)?.0);
        }
        let dd = den.deg().unwrap() as usize;
        for s in &slots {
            let x = y[s.coord].as_rational().unwrap();
            let scale = den.divmod(x.den())?.0;
            let num = x.num().mul(&scale).shift(s.j).scale(unit(s.l));
            let rem = num.divmod(&den)?.1;
            let mut v = Vec::with_capacity(dd * r);
            for k in (0..dd).rev() {
                push_digits(&mut v, rem.coeff(k));
            }
            basis.push(v);
        }
    } else {
        let floor = used
            .iter()
            .filter_map(|&i| y[i].effective_floor().map(|f| f + bounds[i]))
            .max()
            .unwrap();
        if floor >= 0 {
            return Err(Error::precision(format!(
                "no fractional digits are certified (floor {floor})"
            )));
        }
        let series: Vec<Option<crate::laurent::Laurent>> = (0..y.len())
            .map(|i| (bounds[i] >= 0).then(|| y[i].to_laurent(floor - bounds[i] - 1)))
            .collect();
        for s in &slots {
            let l = series[s.coord].as_ref().unwrap();
            let mut v = Vec::with_capacity((-floor) as usize * r);
            for e in (floor..0).rev() {
                let c = l.coeff(e - s.j as i64)?;
                push_digits(&mut v, field.mul(c, unit(s.l)));
            }
            basis.push(v);
        }
    }
    Ok(Problem {
        field: field.clone(),
        p,
        r,
        bounds: bounds.to_vec(),
        basis,
        slots,
        slot_index,
        inexact,
    })
}

/// Minimise `deg(q·y + q0)` over nonzero `q` with `deg q_i ≤ bounds[i]`
/// (negative bound: coordinate fixed to zero) and `q0 = −[q·y]`.
pub fn minimize(y: &[Value], bounds: &[i64], cap: u128) -> Result<Outcome> {
    if y.is_empty() || y.len() != bounds.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: bounds.len(),
        });
    }
    if bounds.iter().all(|&b| b < 0) {
        return Err(Error::DomainError("empty sublevel set".into()));
    }
    let field = y[0].field().clone();
    let count = candidate_count(field.order(), bounds);
    if count > cap {
        return Err(Error::TooLarge { count, cap });
    }
    if field.characteristic() < 256 {
        solve_with::<u8>(y, bounds)
    } else {
        solve_with::<u16>(y, bounds)
    }
}

fn solve_with<D: Digit>(y: &[Value], bounds: &[i64]) -> Result<Outcome> {
    let prob = build::<D>(y, bounds)?;
    let (best, undecided) = prob.solve();
    if undecided {
        return Err(Error::precision("some candidate vanishes on every certified digit"));
    }
    let best = best.ok_or_else(|| Error::Internal("no candidates".into()))?;
    let blocks = prob.blocks();
    let q = prob.candidate(&blocks[best.block], &best.digits);
    let f = &prob.field;
    let mut s = Value::zero(f);
    for (qi, yi) in q.iter().zip(y) {
        if !qi.is_zero() {
            s = s.add(&yi.mul_poly(qi));
        }
    }
    let (int, frac) = s.split()?;
    if let Ok(d) = frac.deg() {
        if d != best.value {
            return Err(Error::Internal(format!(
                "search value {} disagrees with direct evaluation {}",
                best.value, d
            )));
        }
    }
    Ok(Outcome {
        value: best.value,
        q,
        q0: int.neg(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Laurent;
    use crate::parse::parse_rational;

    /// Naive oracle: walk every nonzero vector, normalise, evaluate directly.
    fn naive(y: &[Value], bounds: &[i64]) -> (Deg, Vec<Poly>) {
        let f = y[0].field().clone();
        let q = f.order() as u64;
        let dims: Vec<usize> = bounds.iter().map(|&b| (b + 1).max(0) as usize).collect();
        let total: usize = dims.iter().sum();
        let mut best: Option<(Deg, Vec<Poly>)> = None;
        for code in 1..q.pow(total as u32) {
            let mut x = code;
            let mut vs = Vec::new();
            for &d in &dims {
                let mut cs = Vec::new();
                for _ in 0..d {
                    cs.push(Elem((x % q) as u32));
                    x /= q;
                }
                vs.push(Poly::new(&f, cs));
            }
            let first = vs.iter().find(|p| !p.is_zero()).unwrap();
            if !first.is_monic() {
                continue;
            }
            let mut s = Value::zero(&f);
            for (p, yi) in vs.iter().zip(y) {
                s = s.add(&yi.mul_poly(p));
            }
            let v = s.split().unwrap().1.deg().unwrap();
            let better = match &best {
                None => true,
                Some((bv, bq)) => v < *bv || (v == *bv && cmp_vectors(&vs, bq) == Ordering::Less),
            };
            if better {
                best = Some((v, vs));
            }
        }
        best.unwrap()
    }

    #[test]
    fn agrees_with_naive_enumeration() {
        for (p, r) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let f = Field::new(p, r, None).unwrap();
            let ys = [
                vec!["1/(T^3+T+1)", "T/(T^2+1)"],
                vec!["(T+1)/T^4"],
                vec!["1/(T^2+T+1)", "0", "1/T"],
            ];
            for y in ys {
                let y: Vec<Value> = y
                    .iter()
                    .map(|s| Value::Rational(parse_rational(&f, s).unwrap()))
                    .collect();
                for m in 0..2 {
                    let bounds = vec![m; y.len()];
                    let out = minimize(&y, &bounds, DEFAULT_CAP).unwrap();
                    let (v, q) = naive(&y, &bounds);
                    assert_eq!(out.value, v);
                    assert_eq!(out.q, q);
                    // Same answers through the series engine.
                    let ys: Vec<Value> = y
                        .iter()
                        .map(|v| Value::Series(v.to_laurent(-30).truncate(-30)))
                        .collect();
                    let o2 = minimize(&ys, &bounds, DEFAULT_CAP);
                    if let Ok(o2) = o2 {
                        if v != NEG_INF {
                            assert_eq!((o2.value, o2.q), (v, q));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn caps_and_domain() {
        let f = Field::prime(3).unwrap();
        let y = vec![Value::Rational(parse_rational(&f, "1/T").unwrap())];
        assert!(matches!(minimize(&y, &[20], DEFAULT_CAP), Err(Error::TooLarge { .. })));
        assert!(matches!(minimize(&y, &[-1], DEFAULT_CAP), Err(Error::DomainError(_))));
        let undecided = vec![Value::Series(Laurent::new(&f, -2, vec![], false))];
        assert!(matches!(
            minimize(&undecided, &[0], DEFAULT_CAP),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn candidate_count_is_projective() {
        assert_eq!(candidate_count(3, &[4, 4, 4]), (3u128.pow(15) - 1) / 2);
        assert_eq!(candidate_count(2, &[1, -1]), 3);
    }
}
