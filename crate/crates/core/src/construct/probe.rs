//! Finite-resolution surrogates for the density, crossing and non-covering
//! properties of a hyperplane family. Distances are measured in the ambient
//! max norm and compared in the degree domain.

use std::collections::HashMap;

use serde::Serialize;

use crate::degree::Deg;
use crate::error::{Error, Result};
use crate::intersect::Hyperplane;
use crate::poly::{Poly, RationalFn};
use crate::value::Value;

use super::build::hyperplane_value;
use super::{digits_value, DomainKind, HyperplaneFamily, SurfaceDomain};

/// Largest grid examined by a probe.
pub const GRID_CAP: u128 = 1 << 20;

#[derive(Clone, Debug, Default)]
pub struct ProbeSets {
    /// Items whose curves are probed by the crossing and non-covering checks.
    pub tested: Vec<usize>,
    /// Family indices `F` to stay away from.
    pub f: Vec<usize>,
    /// Further hyperplanes `F′`; their traces on the surface are avoided too.
    pub f_prime: Vec<Hyperplane>,
}

impl ProbeSets {
    /// Items of height at most one, and two hyperplanes in general position.
    pub fn standard(fam: &HyperplaneFamily, domain: &SurfaceDomain) -> Result<ProbeSets> {
        let low: Vec<usize> = (0..fam.items.len()).filter(|&i| fam.items[i].height() <= 1).collect();
        let f = &domain.field;
        let n = domain.dim();
        let t = || Poly::t(f);
        let one = || Poly::one(f);
        let mut v1 = vec![Poly::zero(f); n + 1];
        let mut v2 = vec![Poly::zero(f); n + 1];
        match domain.kind {
            DomainKind::Graph(_) => {
                (v1[0], v1[1], v1[2], v1[n]) = (one(), one(), t(), t().mul(&t()));
                (v2[0], v2[1], v2[2], v2[n]) = (t(), one(), one(), one());
            }
            DomainKind::ProductPerfect => {
                (v1[0], v1[1], v1[n]) = (one(), t(), one());
                (v2[0], v2[1], v2[n]) = (t(), one(), t());
            }
        }
        Ok(ProbeSets {
            tested: low.clone(),
            f: low,
            f_prime: vec![Hyperplane::new(&v1)?, Hyperplane::new(&v2)?],
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub d_points: u64,
    pub b_pairs: usize,
    pub c_items: usize,
}

fn dist(a: &[Value], b: &[Value]) -> Deg {
    a.iter()
        .zip(b)
        .map(|(u, v)| u.sub(v).deg_upper())
        .max()
        .unwrap_or(Deg::NegInf)
}

/// Grid of free parameters: each coordinate is its centre plus digits down to `T^{−r}`.
struct Grid {
    lo: i64,
    his: Vec<i64>,
    widths: Vec<u32>,
    q: u64,
}

impl Grid {
    fn new(domain: &SurfaceDomain, r: i64) -> Grid {
        let his: Vec<i64> = domain.window.iter().map(|b| -b.rho).collect();
        let widths = his.iter().map(|&h| (h + r + 1).max(0) as u32).collect();
        Grid {
            lo: -r,
            his,
            widths,
            q: domain.field.order() as u64,
        }
    }

    fn size(&self, skip: Option<usize>) -> Result<u64> {
        let exp: u32 = self
            .widths
            .iter()
            .enumerate()
            .filter(|&(j, _)| Some(j) != skip)
            .map(|(_, w)| *w)
            .sum();
        let count = (self.q as u128).saturating_pow(exp);
        if count > GRID_CAP {
            return Err(Error::TooLarge { count, cap: GRID_CAP });
        }
        Ok(count as u64)
    }

    /// Per-coordinate digit indices of grid point `idx`.
    fn split(&self, mut idx: u64, skip: Option<usize>) -> Vec<u64> {
        self.widths
            .iter()
            .enumerate()
            .map(|(j, &w)| {
                if Some(j) == skip {
                    return 0;
                }
                let m = self.q.pow(w);
                let out = idx % m;
                idx /= m;
                out
            })
            .collect()
    }

    fn coord(&self, domain: &SurfaceDomain, j: usize, digits: u64) -> RationalFn {
        let c = &domain.window[j].center;
        if self.widths[j] == 0 {
            return c.clone();
        }
        c.add(&digits_value(&domain.field, digits, self.lo, self.his[j]))
    }
}

/// Every grid point lies within `e^{−r}` of some curve of height at most `h`.
pub fn d_probe(fam: &HyperplaneFamily, domain: &SurfaceDomain, r: i64, h: i64) -> Result<u64> {
    let grid = Grid::new(domain, r);
    let count = grid.size(None)?;
    let mut index: HashMap<(usize, String), usize> = HashMap::new();
    for (i, it) in fam.items.iter().enumerate() {
        if it.height() <= h {
            index.insert((it.axis, it.offset.to_string()), i);
        }
    }
    let drop = (r - h).max(0) as u32;
    let q = grid.q;
    for idx in 0..count {
        let digits = grid.split(idx, None);
        let free: Vec<Value> = (0..domain.free_dim())
            .map(|j| Value::Rational(grid.coord(domain, j, digits[j])))
            .collect();
        let z = domain.point(&free);
        let near = (0..domain.free_dim()).any(|j| {
            let coarse = if grid.widths[j] as i64 > drop as i64 {
                let c = &domain.window[j].center;
                let lo = grid.lo + drop as i64;
                c.add(&digits_value(&domain.field, digits[j] / q.pow(drop), lo, grid.his[j]))
            } else {
                domain.window[j].center.clone()
            };
            index.get(&(j, coarse.to_string())).is_some_and(|&i| {
                let foot = fam.items[i].foot(domain, &free);
                dist(&z, &foot) <= Deg::Finite(-r)
            })
        });
        if !near {
            return Err(Error::ProbeFailed {
                probe: "d".into(),
                index: idx as usize,
            });
        }
    }
    Ok(count)
}

/// For every tested curve and every level `α < h`, some item of height
/// above `α` crosses it within `e^{−r}` of its designated point.
pub fn b_probe(fam: &HyperplaneFamily, domain: &SurfaceDomain, r: i64, h: i64, tested: &[usize]) -> Result<usize> {
    let centers: Vec<Value> = domain
        .window
        .iter()
        .map(|b| Value::Rational(b.center.clone()))
        .collect();
    let close: Vec<usize> = {
        let mut v: Vec<usize> = (0..fam.items.len())
            .filter(|&j| {
                let it = &fam.items[j];
                Value::Rational(it.offset.clone()).sub(&centers[it.axis]).deg_upper() <= Deg::Finite(-r)
            })
            .collect();
        v.sort_by_key(|&j| fam.items[j].height());
        v
    };
    let mut pairs = 0;
    for &i in tested {
        let li = &fam.items[i];
        let mut w = centers.clone();
        w[li.axis] = Value::Rational(li.offset.clone());
        let zi = domain.point(&w);
        for alpha in 0..h {
            let hit = close.iter().any(|&j| {
                let lj = &fam.items[j];
                if j == i || lj.axis == li.axis || lj.height() <= alpha {
                    return false;
                }
                let mut v = w.clone();
                v[lj.axis] = Value::Rational(lj.offset.clone());
                dist(&domain.point(&v), &zi) <= Deg::Finite(-r)
            });
            if !hit {
                return Err(Error::ProbeFailed {
                    probe: "b".into(),
                    index: i,
                });
            }
            pairs += 1;
        }
    }
    Ok(pairs)
}

/// `deg(a·z − a_{n+1}) − height(a)` bounds `log |z − w|` from below for
/// every `w` on the hyperplane.
fn far_from(a: &Hyperplane, z: &[Value], r: i64) -> bool {
    let v = hyperplane_value(a, z).deg_upper();
    match (v, a.height_deg) {
        (Deg::Finite(v), Deg::Finite(h)) => v - h >= -r,
        _ => false,
    }
}

/// Each tested curve has a grid point at distance at least `e^{−r}` from
/// the curves indexed by `F` and the traces of the hyperplanes in `F′`.
pub fn c_probe(fam: &HyperplaneFamily, domain: &SurfaceDomain, r: i64, sets: &ProbeSets) -> Result<usize> {
    let grid = Grid::new(domain, r);
    for &i in &sets.tested {
        let li = &fam.items[i];
        let count = grid.size(Some(li.axis))?;
        let found = (0..count).any(|idx| {
            let digits = grid.split(idx, Some(li.axis));
            let free: Vec<Value> = (0..domain.free_dim())
                .map(|j| {
                    if j == li.axis {
                        Value::Rational(li.offset.clone())
                    } else {
                        Value::Rational(grid.coord(domain, j, digits[j]))
                    }
                })
                .collect();
            let z = domain.point(&free);
            sets.f
                .iter()
                .filter(|&&k| k != i)
                .all(|&k| far_from(&fam.items[k].hyperplane, &z, r))
                && sets.f_prime.iter().all(|a| far_from(a, &z, r))
        });
        if !found {
            return Err(Error::ProbeFailed {
                probe: "c".into(),
                index: i,
            });
        }
    }
    Ok(sets.tested.len())
}

pub fn property_a_probe(fam: &HyperplaneFamily, domain: &SurfaceDomain, r: i64, h: i64) -> Result<ProbeReport> {
    property_a_probe_with(fam, domain, r, h, &ProbeSets::standard(fam, domain)?)
}

pub fn property_a_probe_with(
    fam: &HyperplaneFamily,
    domain: &SurfaceDomain,
    r: i64,
    h: i64,
    sets: &ProbeSets,
) -> Result<ProbeReport> {
    if r < 1 {
        return Err(Error::Invalid("resolution must be at least 1".into()));
    }
    let d_points = d_probe(fam, domain, r, h)?;
    let b_pairs = b_probe(fam, domain, r, h, &sets.tested)?;
    let c_items = c_probe(fam, domain, r, sets)?;
    Ok(ProbeReport {
        d_points,
        b_pairs,
        c_items,
    })
}
