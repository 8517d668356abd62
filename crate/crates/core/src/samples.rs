//! Seeded generators for test inputs: random rationals, prescribed
//! continued-fraction streams, and surface/hyperplane pairs aimed at each
//! branch of the intersection classifiers.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contfrac::{cf_assemble, PartialQuotients};
use crate::error::Result;
use crate::field::{Elem, Field};
use crate::intersect::{Hyperplane, PPowerSurface, QuadraticSurface};
use crate::poly::{Poly, RationalFn};
use crate::value::Value;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn elem(rng: &mut ChaCha8Rng, field: &Field) -> Elem {
    Elem(rng.gen_range(0..field.order()))
}

fn nonzero_elem(rng: &mut ChaCha8Rng, field: &Field) -> Elem {
    Elem(rng.gen_range(1..field.order()))
}

/// Uniform polynomial of degree at most `max_deg` (possibly zero).
pub fn random_poly(rng: &mut ChaCha8Rng, field: &Arc<Field>, max_deg: usize) -> Poly {
    Poly::new(field, (0..=max_deg).map(|_| elem(rng, field)).collect())
}

/// Polynomial of degree exactly `deg`.
pub fn poly_of_degree(rng: &mut ChaCha8Rng, field: &Arc<Field>, deg: usize) -> Poly {
    let mut cs: Vec<Elem> = (0..deg).map(|_| elem(rng, field)).collect();
    cs.push(nonzero_elem(rng, field));
    Poly::new(field, cs)
}

pub fn nonzero_poly(rng: &mut ChaCha8Rng, field: &Arc<Field>, max_deg: usize) -> Poly {
    let d = rng.gen_range(0..=max_deg);
    poly_of_degree(rng, field, d)
}

/// `P/Q` with `deg P, deg Q ≤ max_deg`, `Q` monic, in lowest terms.
pub fn random_rational(rng: &mut ChaCha8Rng, field: &Arc<Field>, max_deg: usize) -> RationalFn {
    let num = random_poly(rng, field, max_deg);
    let den = nonzero_poly(rng, field, max_deg).monic();
    RationalFn::new(num, den).expect("nonzero denominator")
}

pub fn random_value(rng: &mut ChaCha8Rng, field: &Arc<Field>, max_deg: usize) -> Value {
    Value::Rational(random_rational(rng, field, max_deg))
}

/// Quotients `a₀, a₁, ...` with `deg a₀ ≤ hi` and `deg a_i ∈ [lo, hi]`, long
/// enough that the value is certified down to `floor`.
pub fn random_stream(rng: &mut ChaCha8Rng, field: &Arc<Field>, lo: usize, hi: usize, floor: i64) -> PartialQuotients {
    let mut terms = vec![random_poly(rng, field, hi)];
    let mut deg = 0i64;
    while 2 * deg <= -floor {
        let d = rng.gen_range(lo..=hi);
        terms.push(poly_of_degree(rng, field, d));
        deg += d as i64;
    }
    // One more so that the last certified quotient is not the final one.
    let d = rng.gen_range(lo..=hi);
    terms.push(poly_of_degree(rng, field, d));
    PartialQuotients::prescribed(terms).expect("degrees are at least one")
}

/// The value of a prescribed stream as a certified series.
pub fn stream_value(pq: &PartialQuotients, floor: i64) -> Result<Value> {
    Ok(Value::from_laurent(cf_assemble(pq, floor)?))
}

#[derive(Clone, Debug)]
pub struct QuadraticSample {
    pub family: &'static str,
    pub surface: QuadraticSurface,
    pub hyperplane: Hyperplane,
}

#[derive(Clone, Debug)]
pub struct PPowerSample {
    pub family: &'static str,
    pub surface: PPowerSurface,
    pub hyperplane: Hyperplane,
}

fn pv(p: Poly) -> Value {
    Value::from_poly(p)
}

fn rv(rng: &mut ChaCha8Rng, field: &Arc<Field>, h: usize) -> Value {
    random_value(rng, field, h)
}

/// A single-row surface whose reduced form is `q·(b₁, b₂, b₃, lx, ly, c)`
/// against the hyperplane `(a₁, a₂, 1, a₄)`.
fn reduced_pair(
    field: &Arc<Field>,
    b: [Value; 3],
    lx: Value,
    ly: Value,
    c: Value,
    a: [Poly; 3],
) -> Result<(QuadraticSurface, Hyperplane)> {
    let [a1, a2, a4] = a;
    let row = [
        b[0].clone(),
        b[1].clone(),
        b[2].clone(),
        lx.sub(&pv(a1.clone())),
        ly.sub(&pv(a2.clone())),
        c.add(&pv(a4.clone())),
    ];
    let s = QuadraticSurface::new(field, vec![row])?;
    let h = Hyperplane::new(&[a1, a2, Poly::one(field), a4])?;
    Ok((s, h))
}

fn small_plane(rng: &mut ChaCha8Rng, field: &Arc<Field>) -> [Poly; 3] {
    [
        random_poly(rng, field, 1),
        random_poly(rng, field, 1),
        random_poly(rng, field, 2),
    ]
}

/// `count` pairs over `field`, cycling through the classifier's branches:
/// generic, linear, contained, double line, parabolic (odd characteristic)
/// and the square / non-square ratio cases of characteristic 2.
pub fn quadratic_pairs(field: &Arc<Field>, count: usize, seed: u64) -> Result<Vec<QuadraticSample>> {
    let mut rng = rng(seed);
    let char2 = field.characteristic() == 2;
    let families: &[&'static str] = if char2 {
        &[
            "generic",
            "linear",
            "contained",
            "char2-square",
            "char2-square",
            "char2-nonsquare",
            "char2-nonsquare",
            "char2-square",
            "char2-nonsquare",
            "generic",
        ]
    } else {
        &[
            "generic",
            "linear",
            "contained",
            "double-line",
            "double-line",
            "parabolic",
            "parabolic",
            "parabolic",
            "double-line",
            "generic",
        ]
    };
    let t = Poly::t(field);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let family = families[k % families.len()];
        let r = &mut rng;
        let (surface, hyperplane) = match family {
            "generic" => {
                let mut row: [Value; 6] = std::array::from_fn(|_| rv(r, field, 3));
                if row[..3].iter().all(|v| v.is_zero().unwrap_or(false)) {
                    row[0] = Value::from_poly(Poly::one(field));
                }
                let s = QuadraticSurface::new(field, vec![row])?;
                let a: Vec<Poly> = (0..4).map(|_| random_poly(r, field, 3)).collect();
                let a = if a.iter().all(|p| p.is_zero()) {
                    vec![Poly::one(field); 4]
                } else {
                    a
                };
                (s, Hyperplane::new(&a)?)
            }
            "linear" => {
                let mut row: [Value; 6] = std::array::from_fn(|_| rv(r, field, 3));
                row[0] = pv(nonzero_poly(r, field, 3));
                let s = QuadraticSurface::new(field, vec![row])?;
                let a = [
                    nonzero_poly(r, field, 3),
                    random_poly(r, field, 3),
                    Poly::zero(field),
                    random_poly(r, field, 3),
                ];
                (s, Hyperplane::new(&a)?)
            }
            "contained" => {
                let mut r1: [Value; 6] = std::array::from_fn(|_| rv(r, field, 2));
                r1[1] = pv(nonzero_poly(r, field, 2));
                let k3 = nonzero_poly(r, field, 1);
                let (l1, l2, c0) = (
                    random_poly(r, field, 2),
                    random_poly(r, field, 2),
                    random_poly(r, field, 2),
                );
                let kv = pv(k3.clone());
                let mut r2: [Value; 6] = std::array::from_fn(|i| kv.mul(&r1[i]));
                r2[3] = r2[3].add(&pv(l1.clone()));
                r2[4] = r2[4].add(&pv(l2.clone()));
                r2[5] = r2[5].add(&pv(c0.clone()));
                let s = QuadraticSurface::new(field, vec![r1, r2])?;
                let a = [l1, l2, k3, Poly::one(field).neg(), c0.neg()];
                (s, Hyperplane::new(&a)?)
            }
            "double-line" => {
                // b = u·(s x + t y)², linear part v·(s, t), c = v²/(4u) or not.
                let (s0, t0) = (nonzero_poly(r, field, 1), nonzero_poly(r, field, 1));
                let u = pv(Poly::constant(field, nonzero_elem(r, field)));
                let (sv, tv) = (pv(s0), pv(t0));
                let two = field.from_int(2);
                let four = field.from_int(4);
                let b = [u.mul(&sv).mul(&sv), u.mul(&sv).mul(&tv).scale(two), u.mul(&tv).mul(&tv)];
                let v = pv(random_poly(r, field, 1));
                let (lx, ly) = (v.mul(&sv), v.mul(&tv));
                let c = if r.gen_bool(0.6) {
                    v.mul(&v).div(&u.scale(four))?
                } else {
                    rv(r, field, 2)
                };
                reduced_pair(field, b, lx, ly, c, small_plane(r, field))?
            }
            "parabolic" => {
                // q1 x² + l1 x + c with disc = r² or a random value.
                let q1 = pv(nonzero_poly(r, field, 1));
                let zero = Value::zero(field);
                let l1 = pv(random_poly(r, field, 2));
                let ly = if r.gen_bool(0.2) {
                    pv(nonzero_poly(r, field, 1))
                } else {
                    zero.clone()
                };
                let c = if r.gen_bool(0.6) {
                    let root = pv(random_poly(r, field, 2));
                    l1.mul(&l1).sub(&root.mul(&root)).div(&q1.scale(field.from_int(4)))?
                } else {
                    rv(r, field, 2)
                };
                let b = if r.gen_bool(0.5) {
                    [q1, zero.clone(), zero]
                } else {
                    [zero.clone(), zero, q1]
                };
                let (lx, ly) = if b[0].is_zero()? { (ly, l1) } else { (l1, ly) };
                reduced_pair(field, b, lx, ly, c, small_plane(r, field))?
            }
            "char2-square" | "char2-nonsquare" => {
                // q1 x² + q3 y² + c with q1/q3 = w² or T·w².
                let q3 = pv(nonzero_poly(r, field, 1));
                let w = pv(nonzero_poly(r, field, 1));
                let mut ratio = w.mul(&w);
                if family == "char2-nonsquare" {
                    ratio = ratio.mul(&pv(t.clone()));
                }
                let q1 = q3.mul(&ratio);
                let zero = Value::zero(field);
                let c = if r.gen_bool(0.5) {
                    let s = pv(random_poly(r, field, 1));
                    s.mul(&s).mul(&q3)
                } else {
                    pv(random_poly(r, field, 2))
                };
                let (lx, ly) = if r.gen_bool(0.15) {
                    (pv(nonzero_poly(r, field, 1)), zero.clone())
                } else {
                    (zero.clone(), zero.clone())
                };
                reduced_pair(field, [q1, zero, q3], lx, ly, c, small_plane(r, field))?
            }
            _ => unreachable!(),
        };
        out.push(QuadraticSample {
            family,
            surface,
            hyperplane,
        });
    }
    Ok(out)
}

/// A p-th power in `F_p[T]`: a polynomial in `T^p`.
fn pth_power_poly(rng: &mut ChaCha8Rng, field: &Arc<Field>, max_deg: usize) -> Poly {
    let p = field.characteristic() as usize;
    let base = random_poly(rng, field, max_deg);
    let mut cs = vec![Elem::ZERO; base.coeffs().len().saturating_sub(1) * p + 1];
    for (k, c) in base.coeffs().iter().enumerate() {
        cs[k * p] = *c;
    }
    Poly::new(field, cs)
}

/// `count` p-power surfaces with `m, n ≤ 3`. Most hyperplanes cancel the
/// linear terms so that the root recursion runs; the rest are generic or
/// miss the dependent coordinate.
pub fn ppower_pairs(field: &Arc<Field>, count: usize, seed: u64) -> Result<Vec<PPowerSample>> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    let zero = Value::zero(field);
    for k in 0..count {
        let r = &mut rng;
        let m = r.gen_range(0..=3usize);
        let n = r.gen_range(0..=3usize);
        let side = |len: usize, r: &mut ChaCha8Rng| -> Vec<Value> {
            let mut v: Vec<Value> = (0..=len)
                .map(|i| {
                    if i > 0 && r.gen_bool(0.4) {
                        zero.clone()
                    } else {
                        pv(random_poly(r, field, 1))
                    }
                })
                .collect();
            v[len] = pv(nonzero_poly(r, field, 1));
            v
        };
        let b = side(m, r);
        let c = side(n, r);
        let surface = PPowerSurface::new(field, b.clone(), c.clone())?;
        let (family, a) = match k % 4 {
            0 => (
                "generic",
                vec![
                    random_poly(r, field, 2),
                    random_poly(r, field, 2),
                    nonzero_poly(r, field, 1),
                    random_poly(r, field, 3),
                ],
            ),
            1 => (
                "linear",
                vec![
                    nonzero_poly(r, field, 2),
                    random_poly(r, field, 2),
                    Poly::zero(field),
                    random_poly(r, field, 3),
                ],
            ),
            _ => {
                let b0 = b[0].as_rational().expect("polynomial coefficient").num().clone();
                let c0 = c[0].as_rational().expect("polynomial coefficient").num().clone();
                let a4 = if r.gen_bool(0.5) {
                    pth_power_poly(r, field, 2)
                } else {
                    random_poly(r, field, 3)
                };
                ("recursion", vec![b0.neg(), c0.neg(), Poly::one(field), a4])
            }
        };
        let a = if a.iter().all(|p| p.is_zero()) {
            vec![Poly::zero(field), Poly::zero(field), Poly::one(field), Poly::one(field)]
        } else {
            a
        };
        out.push(PPowerSample {
            family,
            surface,
            hyperplane: Hyperplane::new(&a)?,
        });
    }
    Ok(out)
}
