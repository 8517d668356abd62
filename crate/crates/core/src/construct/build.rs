use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::approx::search::{minimize, DEFAULT_CAP};
use crate::approx::{PhiSpec, PsiSpec};
use crate::degree::Deg;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::intersect::{Hyperplane, IntersectionClass, ROOT_FLOOR};
use crate::laurent::Laurent;
use crate::parse::{parse_rational, parse_value};
use crate::poly::{Poly, RationalFn};
use crate::value::Value;

use super::{DomainKind, FamilyItem, SurfaceDomain};

#[derive(Clone, Debug)]
pub struct BuildConfig {
    /// The rate `φ`, given through its degree thresholds.
    pub phi: PsiSpec,
    pub big_phi: PhiSpec,
    pub stages: usize,
    /// Digits are emitted down to `T^{−precision}`.
    pub precision: i64,
    /// Bit `k` selects the branch taken at stage `k`.
    pub seed: u64,
    /// Minimal exponent step between consecutive stages.
    pub gap: i64,
    /// Largest height `h` for which the margin `D(h)` is tabulated.
    pub guard_height: i64,
    /// Last scale the schedule must certify, if any.
    pub target: Option<i64>,
    pub cap: u128,
}

impl BuildConfig {
    pub fn new(phi: PsiSpec, stages: usize, precision: i64, seed: u64) -> BuildConfig {
        BuildConfig {
            phi,
            big_phi: PhiSpec::SupNorm,
            stages,
            precision,
            seed,
            gap: 2,
            guard_height: 4,
            target: None,
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StageRecord {
    pub item: FamilyItem,
    pub branch: u8,
    /// The stage moves its axis coordinate by `T^{−exponent}(1 + branch·T^{−1})`.
    pub exponent: i64,
    /// Point of `L_k` the ball is centred at.
    pub anchor: Vec<Value>,
    /// `|y_axis − anchor_axis| = e^{−radius}`.
    pub radius: i64,
    /// Scales certified through this stage's hyperplane.
    pub scales: Option<(i64, i64)>,
}

impl StageRecord {
    /// `height(A_k) − ρ_k`, the degree bound the proximity law gives.
    pub fn claimed_bound(&self) -> i64 {
        self.item.height() - self.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuardEntry {
    pub height: i64,
    /// Every hyperplane of height at most `height` has `|a·y − a_{n+1}| ≥ e^{−d}`.
    pub d: i64,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub phi: PsiSpec,
    pub big_phi: PhiSpec,
    pub stages: Vec<StageRecord>,
    pub m0: Option<i64>,
    pub m_max: Option<i64>,
    /// End of the certified interval using stages `0..=k` only.
    pub coverage: Vec<Option<i64>>,
    pub guard: Vec<GuardEntry>,
}

impl Certificate {
    pub fn designated(&self, m: i64) -> Option<usize> {
        self.stages
            .iter()
            .position(|s| s.scales.is_some_and(|(lo, hi)| lo <= m && m <= hi))
    }

    pub fn guard_for(&self, h: i64) -> Option<i64> {
        self.guard.iter().find(|g| g.height == h).map(|g| g.d)
    }
}

#[derive(Clone, Debug)]
pub struct ConstructedPoint {
    pub domain: SurfaceDomain,
    pub precision: i64,
    pub seed: u64,
    pub y: Vec<Value>,
    pub certificate: Certificate,
    /// Start exponent of the random tail on each free coordinate.
    pub tails: Vec<i64>,
}

/// First scale at which the hyperplane of `item` is admissible.
fn start_scale(item: &FamilyItem, phi: &PsiSpec, big_phi: &PhiSpec, n: usize) -> Result<i64> {
    let deg_q = item.hyperplane.coeffs[item.axis].deg().unwrap();
    let mut m = item.height().max(phi.t0);
    while big_phi.bounds(m, n)?[item.axis] < deg_q {
        m += 1;
    }
    Ok(m)
}

/// Scales `m ≥ start` with `bound ≤ φ-threshold(m)`, as an interval.
fn covered(phi: &PsiSpec, start: i64, bound: i64) -> Option<(i64, i64)> {
    let ok = |m: i64| phi.threshold(m).is_ok_and(|t| bound <= t);
    if !ok(start) {
        return None;
    }
    let mut hi = start;
    while hi < start + 4096 && ok(hi + 1) {
        hi += 1;
    }
    Some((start, hi))
}

fn laurent_of(r: &RationalFn, floor: i64) -> Laurent {
    Laurent::from_rational(r, floor)
}

fn contained_in_low_height_hyperplane(domain: &SurfaceDomain) -> Result<Option<Hyperplane>> {
    let DomainKind::Graph(surface) = &domain.kind else {
        return Ok(None);
    };
    let field = &domain.field;
    let n = domain.dim();
    let q = field.order() as u64;
    let count = q.checked_pow(n as u32 + 1).unwrap_or(u64::MAX);
    if count > 1 << 16 {
        return Ok(None);
    }
    for idx in 1..count {
        let mut i = idx;
        let cs: Vec<Poly> = (0..=n)
            .map(|_| {
                let c = Elem((i % q) as u32);
                i /= q;
                Poly::constant(field, c)
            })
            .collect();
        let lead = cs.iter().find(|c| !c.is_zero()).expect("nonzero index");
        if !lead.is_monic() || cs[2..n].iter().all(Poly::is_zero) {
            continue;
        }
        let a = Hyperplane::new(&cs)?;
        if let IntersectionClass::ContainedInA = surface.classify(&a)?.class {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Nested-ball construction along alternating axis-normal hyperplanes.
///
/// Stage `k` moves coordinate `k mod d` (with `d` free coordinates) by
/// `T^{−e_k}(1 + b_k T^{−1})`, `b_k` the `k`-th seed bit. The anchor lies on
/// `x_axis = a_k`, and the next change of that coordinate fixes the radius
/// `ρ_k`. Exponents are the smallest ones for which the previous hyperplane
/// on the same axis certifies every scale up to where the next stage takes
/// over, capped by what the precision leaves for the remaining stages.
pub fn singular_build(domain: &SurfaceDomain, cfg: &BuildConfig) -> Result<ConstructedPoint> {
    let nf = domain.free_dim();
    let n = domain.dim();
    let field: Arc<Field> = domain.field.clone();
    let p = cfg.precision;
    if cfg.stages == 0 {
        return Err(Error::ScheduleInfeasible {
            scale: cfg.phi.t0,
            reason: "at least one stage is required".into(),
        });
    }
    if nf < 2 {
        return Err(Error::Invalid("the construction needs two free coordinates".into()));
    }
    if cfg.gap < 2 {
        return Err(Error::Invalid("gap must be at least 2".into()));
    }
    if let Some(a) = contained_in_low_height_hyperplane(domain)? {
        return Err(Error::Invalid(format!(
            "surface lies in the rational hyperplane {}",
            a.to_json()
        )));
    }

    let stages = cfg.stages;
    let budget = |k: usize| p - cfg.gap - nf as i64 + 1 - cfg.gap * (stages - 1 - k) as i64;
    let e_first = domain.window.iter().map(|b| b.rho).max().unwrap_or(0).max(1);
    let mut cur: Vec<RationalFn> = domain.window.iter().map(|b| b.center.clone()).collect();
    let mut recs: Vec<StageRecord> = vec![];
    let mut starts: Vec<i64> = vec![];
    let mut last_e: Option<i64> = None;
    let limit = cfg.target.unwrap_or(i64::MAX);

    for k in 0..stages {
        let axis = k % nf;
        let mut e = last_e.map_or(e_first, |l| (l + cfg.gap).max(e_first));
        if k >= nf {
            let j = k - nf;
            let u = limit.min(starts[j + 1] - 1);
            if u >= starts[j] {
                let need = recs[j].item.height() - cfg.phi.threshold(u)?;
                e = e.max(need.min(budget(k)));
            }
        }
        if e > budget(k) {
            return Err(Error::ScheduleInfeasible {
                scale: starts.first().copied().unwrap_or(cfg.phi.t0),
                reason: format!("stage {k} needs exponent {e}, precision leaves {}", budget(k)),
            });
        }
        let branch = ((cfg.seed >> k.min(63)) & 1) as u8;
        let den = Poly::monomial(&field, Elem::ONE, (e + 1) as usize);
        let num = Poly::new(&field, vec![Elem(branch as u32), Elem::ONE]);
        cur[axis] = cur[axis].add(&RationalFn::new(num, den)?);
        let item = FamilyItem::new(domain, axis, cur[axis].clone())?;
        starts.push(start_scale(&item, &cfg.phi, &cfg.big_phi, n)?);
        let anchor = domain.point(&cur.iter().cloned().map(Value::Rational).collect::<Vec<_>>());
        recs.push(StageRecord {
            item,
            branch,
            exponent: e,
            anchor,
            radius: 0,
            scales: None,
        });
        last_e = Some(e);
    }

    let last_e = last_e.expect("at least one stage");
    let mut order: Vec<usize> = (0..nf).collect();
    let last_on = |a: usize| (0..stages).rev().find(|&k| k % nf == a);
    order.sort_by_key(|&a| last_on(a).map_or(-1, |k| k as i64));
    let mut tails = vec![0i64; nf];
    let mut prev = last_e + cfg.gap - 1;
    for (rank, &a) in order.iter().enumerate() {
        let mut t = prev + 1;
        let u = last_on(a).and_then(|j| {
            let u = if j + 1 < stages {
                Some(limit.min(starts[j + 1] - 1))
            } else {
                cfg.target
            };
            u.filter(|&u| u >= starts[j]).map(|u| (j, u))
        });
        if let Some((j, u)) = u {
            let need = recs[j].item.height() - cfg.phi.threshold(u)?;
            t = t.max(need.min(p - (nf - 1 - rank) as i64));
        }
        if t > p {
            return Err(Error::ScheduleInfeasible {
                scale: starts[0],
                reason: format!("tail on coordinate {a} would start below T^-{p}"),
            });
        }
        tails[a] = t;
        prev = t;
    }

    for k in 0..stages {
        let axis = k % nf;
        recs[k].radius = if k + nf < stages {
            recs[k + nf].exponent
        } else {
            tails[axis]
        };
    }

    let deep = 2 * p;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let q = field.order();
    let free: Vec<Value> = (0..nf)
        .map(|a| {
            let mut terms = vec![(-tails[a], Elem(rng.gen_range(1..q)))];
            terms.extend((tails[a] + 1..=deep).map(|k| (-k, Elem(rng.gen_range(0..q)))));
            let tail = Laurent::from_terms(&field, &terms, -deep, false);
            Value::Series(laurent_of(&cur[a], -deep).add(&tail))
        })
        .collect();
    let y: Vec<Value> = domain
        .point(&free)
        .into_iter()
        .map(|v| {
            let l = v.to_laurent(-deep);
            if l.floor() > -p {
                return Err(Error::precision(format!(
                    "a coordinate is known only down to T^{}",
                    l.floor()
                )));
            }
            Ok(Value::Series(l.truncate(-p)))
        })
        .collect::<Result<_>>()?;

    for (k, r) in recs.iter().enumerate() {
        let gap = y[r.item.axis].sub(&r.anchor[r.item.axis]).deg_upper();
        let value = hyperplane_value(&r.item.hyperplane, &y).deg_upper();
        if gap != Deg::Finite(-r.radius) || value > Deg::Finite(r.claimed_bound()) {
            return Err(Error::Internal(format!("proximity law fails at stage {k}")));
        }
    }

    for (k, s) in starts.iter().enumerate() {
        recs[k].scales = covered(&cfg.phi, *s, recs[k].claimed_bound());
    }
    let m0 = recs.iter().filter_map(|r| r.scales.map(|s| s.0)).min();
    let coverage: Vec<Option<i64>> = (0..stages).map(|k| reach(&recs[..=k], m0)).collect();
    let m_max = *coverage.last().expect("at least one stage");
    match (m_max, cfg.target) {
        (None, _) => {
            return Err(Error::ScheduleInfeasible {
                scale: starts[0],
                reason: "no scale is certified; φ decays too fast for this precision".into(),
            })
        }
        (Some(m), Some(t)) if m < t => {
            return Err(Error::ScheduleInfeasible {
                scale: m + 1,
                reason: format!("certified range stops at {m}"),
            })
        }
        _ => {}
    }

    let mut guard = vec![];
    for h in 0..=cfg.guard_height {
        let out = minimize(&y, &vec![h; n], cfg.cap)?;
        let d = match out.value {
            Deg::Finite(v) => -v,
            Deg::NegInf => return Err(Error::Internal("series point lies on a hyperplane".into())),
        };
        if d + 1 >= p {
            return Err(Error::precision(format!(
                "margin D({h}) = {d} leaves no room at precision {p}"
            )));
        }
        guard.push(GuardEntry { height: h, d });
    }

    Ok(ConstructedPoint {
        domain: domain.clone(),
        precision: p,
        seed: cfg.seed,
        y,
        certificate: Certificate {
            phi: cfg.phi.clone(),
            big_phi: cfg.big_phi.clone(),
            stages: recs,
            m0,
            m_max,
            coverage,
            guard,
        },
        tails,
    })
}

/// End of the contiguous run of certified scales starting at `m0`.
fn reach(recs: &[StageRecord], m0: Option<i64>) -> Option<i64> {
    let m0 = m0?;
    let covers = |m: i64| recs.iter().any(|r| r.scales.is_some_and(|(lo, hi)| lo <= m && m <= hi));
    if !covers(m0) {
        return None;
    }
    let mut m = m0;
    while covers(m + 1) {
        m += 1;
    }
    Some(m)
}

/// `a·y − a_{n+1}`.
pub(crate) fn hyperplane_value(a: &Hyperplane, y: &[Value]) -> Value {
    let n = y.len();
    let mut acc = Value::from_poly(a.coeffs[n].neg());
    for (c, v) in a.coeffs[..n].iter().zip(y) {
        if !c.is_zero() {
            acc = acc.add(&v.mul_poly(c));
        }
    }
    acc
}

impl ConstructedPoint {
    pub fn to_json(&self) -> Json {
        let c = &self.certificate;
        let stages: Vec<Json> = c
            .stages
            .iter()
            .map(|s| {
                json!({
                    "axis": self.domain.axis_name(s.item.axis),
                    "family_item": s.item.to_json(&self.domain),
                    "branch": s.branch,
                    "exponent": s.exponent,
                    "anchor": s.anchor.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "radius": s.radius,
                    "bound": s.claimed_bound(),
                    "scales": s.scales.map(|(lo, hi)| json!([lo, hi])),
                })
            })
            .collect();
        json!({
            "field": self.domain.field.spec_string(),
            "domain": self.domain.to_json(),
            "precision": self.precision,
            "seed": self.seed,
            "y": self.y.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "tails": self.tails,
            "certificate": {
                "phi": c.phi.to_string(),
                "Phi": c.big_phi.to_string(),
                "m0": c.m0,
                "M": c.m_max,
                "coverage": c.coverage,
                "stages": stages,
                "guard": c.guard.iter().map(|g| json!({"h": g.height, "D": g.d})).collect::<Vec<_>>(),
            },
        })
    }

    pub fn from_json(v: &Json) -> Result<ConstructedPoint> {
        let bad = |what: &str| Error::Invalid(format!("constructed point json: {what}"));
        let field = Field::parse_spec(v["field"].as_str().ok_or_else(|| bad("field"))?)?;
        let domain = SurfaceDomain::from_json(&field, &v["domain"])?;
        let precision = v["precision"].as_i64().ok_or_else(|| bad("precision"))?;
        let seed = v["seed"].as_u64().ok_or_else(|| bad("seed"))?;
        let strs = |x: &Json, what: &str| -> Result<Vec<Value>> {
            x.as_array()
                .ok_or_else(|| bad(what))?
                .iter()
                .map(|s| parse_value(&field, s.as_str().ok_or_else(|| bad(what))?, ROOT_FLOOR))
                .collect()
        };
        let y = strs(&v["y"], "y")?;
        if y.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: y.len(),
            });
        }
        let tails: Vec<i64> = serde_json::from_value(v["tails"].clone()).map_err(|_| bad("tails"))?;
        let c = &v["certificate"];
        let phi = PsiSpec::parse(c["phi"].as_str().ok_or_else(|| bad("phi"))?)?;
        let big_phi = PhiSpec::parse(c["Phi"].as_str().ok_or_else(|| bad("Phi"))?)?;
        let opt = |x: &Json| x.as_i64();
        let mut stages = vec![];
        for s in c["stages"].as_array().ok_or_else(|| bad("stages"))? {
            let item = &s["family_item"];
            let axis = (0..domain.free_dim())
                .find(|&j| Some(domain.axis_name(j).as_str()) == s["axis"].as_str())
                .ok_or_else(|| bad("axis"))?;
            let offset = parse_rational(&field, item["offset"].as_str().ok_or_else(|| bad("offset"))?)?;
            let scales = match &s["scales"] {
                Json::Null => None,
                x => {
                    let p: (i64, i64) = serde_json::from_value(x.clone()).map_err(|_| bad("scales"))?;
                    Some(p)
                }
            };
            stages.push(StageRecord {
                item: FamilyItem::new(&domain, axis, offset)?,
                branch: s["branch"].as_u64().ok_or_else(|| bad("branch"))? as u8,
                exponent: s["exponent"].as_i64().ok_or_else(|| bad("exponent"))?,
                anchor: strs(&s["anchor"], "anchor")?,
                radius: s["radius"].as_i64().ok_or_else(|| bad("radius"))?,
                scales,
            });
        }
        let coverage = c["coverage"]
            .as_array()
            .ok_or_else(|| bad("coverage"))?
            .iter()
            .map(opt)
            .collect();
        let guard = c["guard"]
            .as_array()
            .ok_or_else(|| bad("guard"))?
            .iter()
            .map(|g| {
                Ok(GuardEntry {
                    height: g["h"].as_i64().ok_or_else(|| bad("guard h"))?,
                    d: g["D"].as_i64().ok_or_else(|| bad("guard D"))?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ConstructedPoint {
            domain,
            precision,
            seed,
            y,
            certificate: Certificate {
                phi,
                big_phi,
                stages,
                m0: opt(&c["m0"]),
                m_max: opt(&c["M"]),
                coverage,
                guard,
            },
            tails,
        })
    }
}
