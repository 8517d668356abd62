//! Dirichlet-type tests, the irrationality measure function and uniform
//! exponent profiles. Every real-valued quantity lives in the degree domain
//! as an exact rational.

pub mod search;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::contfrac::{cf_convergents, cf_expand_prefix};
use crate::degree::Deg;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::value::Value;

pub use search::DEFAULT_CAP;

pub type Q = Ratio<i64>;

#[derive(Debug, Clone, PartialEq)]
pub enum PsiKind {
    /// `ψ(t) = e^γ · t^(−n)`.
    PowerLaw { gamma: Q, n: Q },
    /// Explicit thresholds per degree.
    Table(BTreeMap<i64, i64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiSpec {
    pub kind: PsiKind,
    pub t0: i64,
}

impl PsiSpec {
    pub fn power_law(gamma: Q, n: Q) -> Result<PsiSpec> {
        if n < Q::from_integer(0) {
            return Err(Error::NotMonotone { m: 0 });
        }
        Ok(PsiSpec {
            kind: PsiKind::PowerLaw { gamma, n },
            t0: 0,
        })
    }

    pub fn table(map: BTreeMap<i64, i64>) -> Result<PsiSpec> {
        let mut prev: Option<i64> = None;
        for (&m, &d) in &map {
            if prev.is_some_and(|p| d > p) {
                return Err(Error::NotMonotone { m });
            }
            prev = Some(d);
        }
        let t0 = map.keys().next().copied().unwrap_or(0);
        Ok(PsiSpec {
            kind: PsiKind::Table(map),
            t0,
        })
    }

    pub fn with_t0(mut self, t0: i64) -> PsiSpec {
        self.t0 = t0;
        self
    }

    /// Largest `d` with `e^d < ψ(e^m)`.
    pub fn threshold(&self, m: i64) -> Result<i64> {
        if m < self.t0 {
            return Err(Error::BelowDomain { m, t0: self.t0 });
        }
        match &self.kind {
            PsiKind::PowerLaw { gamma, n } => {
                let v = gamma - n * Q::from_integer(m);
                if v.is_integer() {
                    Ok(v.to_integer() - 1)
                } else {
                    Ok(v.floor().to_integer())
                }
            }
            PsiKind::Table(map) => map
                .get(&m)
                .copied()
                .ok_or_else(|| Error::DomainError(format!("no table entry for scale {m}"))),
        }
    }

    /// Parse `gamma=<q>,n=<q>`, `c=e^<q>,n=<q>`, `n=<q>` or
    /// `table=<m>:<d>;<m>:<d>...`, each optionally with `,t0=<int>`.
    pub fn parse(s: &str) -> Result<PsiSpec> {
        let mut gamma = Q::from_integer(0);
        let mut n = None;
        let mut table = None;
        let mut t0 = None;
        let mut pos = 0;
        for part in s.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(pos, format!("expected key=value in {part:?}")))?;
            let v = v.trim();
            match k.trim() {
                "gamma" => gamma = parse_q(v, pos)?,
                "c" => {
                    let e = v
                        .strip_prefix("e^")
                        .ok_or_else(|| Error::parse(pos, "c must be written e^<rational>"))?;
                    gamma = parse_q(e, pos)?;
                }
                "n" => n = Some(parse_q(v, pos)?),
                "t0" => {
                    t0 = Some(v.parse().map_err(|_| Error::parse(pos, "bad t0"))?);
                }
                "table" => {
                    let mut map = BTreeMap::new();
                    for entry in v.split(';') {
                        let (m, d) = entry
                            .split_once(':')
                            .ok_or_else(|| Error::parse(pos, "table entries are m:d"))?;
                        let m: i64 = m.trim().parse().map_err(|_| Error::parse(pos, "bad scale"))?;
                        let d: i64 = d.trim().parse().map_err(|_| Error::parse(pos, "bad threshold"))?;
                        map.insert(m, d);
                    }
                    table = Some(map);
                }
                other => return Err(Error::parse(pos, format!("unknown key {other:?}"))),
            }
            pos += part.len() + 1;
        }
        let spec = match (table, n) {
            (Some(map), None) => PsiSpec::table(map)?,
            (None, Some(n)) => PsiSpec::power_law(gamma, n)?,
            (None, None) => return Err(Error::parse(0, "missing n= or table=")),
            (Some(_), Some(_)) => return Err(Error::parse(0, "table= excludes n=")),
        };
        Ok(match t0 {
            Some(t) => spec.with_t0(t),
            None => spec,
        })
    }
}

fn parse_q(s: &str, pos: usize) -> Result<Q> {
    let bad = || Error::parse(pos, format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(Q::new(a, b))
        }
        None => Ok(Q::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PsiKind::PowerLaw { gamma, n } => write!(f, "gamma={gamma},n={n}")?,
            PsiKind::Table(map) => {
                let es: Vec<String> = map.iter().map(|(m, d)| format!("{m}:{d}")).collect();
                write!(f, "table={}", es.join(";"))?;
            }
        }
        write!(f, ",t0={}", self.t0)
    }
}

/// The proper function `Φ` in the degree domain: `Φ(q) ≤ e^t` iff
/// `deg q_i + w_i ≤ t` for all `i`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiSpec {
    SupNorm,
    WeightedDeg(Vec<i64>),
}

impl PhiSpec {
    pub fn bounds(&self, t_deg: i64, n: usize) -> Result<Vec<i64>> {
        match self {
            PhiSpec::SupNorm => Ok(vec![t_deg; n]),
            PhiSpec::WeightedDeg(w) => {
                if w.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: w.len(),
                    });
                }
                Ok(w.iter().map(|wi| t_deg - wi).collect())
            }
        }
    }

    pub fn parse(s: &str) -> Result<PhiSpec> {
        let s = s.trim();
        if s == "sup" {
            return Ok(PhiSpec::SupNorm);
        }
        let w = s
            .strip_prefix("weights=")
            .ok_or_else(|| Error::parse(0, "expected 'sup' or 'weights=w1,w2,...'"))?;
        let ws = w
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse(8, "bad weight"))?;
        Ok(PhiSpec::WeightedDeg(ws))
    }
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSpec::SupNorm => write!(f, "sup"),
            PhiSpec::WeightedDeg(w) => {
                let ws: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "weights={}", ws.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub q0: String,
    pub q: Vec<String>,
}

impl Witness {
    fn new(q0: &Poly, q: &[Poly]) -> Witness {
        Witness {
            q0: q0.to_string(),
            q: q.iter().map(|p| p.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletVerdict {
    pub m: i64,
    pub threshold: i64,
    pub solvable: bool,
    pub witness: Option<Witness>,
    pub value_deg: Deg,
}

/// One row of the continued-fraction test: `deg⟨q_{n−1}x⟩` against
/// `threshold(deg q_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CfVerdict {
    pub n: usize,
    pub deg_q: i64,
    pub lhs: Deg,
    pub threshold: i64,
    pub pass: bool,
    /// `lhs = −deg q_n`.
    pub eq3: bool,
}

pub fn dirichlet_test_cf(x: &Value, psi: &PsiSpec, n_max: usize) -> Result<Vec<CfVerdict>> {
    let (pq, err) = cf_expand_prefix(x, n_max + 1);
    if pq.terms.len() < n_max + 1 {
        if let Some(e) = err {
            return Err(e);
        }
        return Err(Error::RationalDetected { terms: pq.terms.len() });
    }
    let conv = cf_convergents(&pq);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let q_prev = &conv.pairs[n - 1].1;
        let deg_q = conv.pairs[n].1.deg().unwrap();
        let lhs = x.mul_poly(q_prev).split()?.1.deg()?;
        let threshold = psi.threshold(deg_q)?;
        out.push(CfVerdict {
            n,
            deg_q,
            lhs,
            threshold,
            pass: lhs <= Deg::Finite(threshold),
            eq3: lhs == Deg::Finite(-deg_q),
        });
    }
    Ok(out)
}

pub fn dirichlet_test_bruteforce(y: &[Value], psi: &PsiSpec, m: i64, cap: u128) -> Result<DirichletVerdict> {
    let threshold = psi.threshold(m)?;
    let out = search::minimize(y, &vec![m; y.len()], cap)?;
    let solvable = out.value <= Deg::Finite(threshold);
    Ok(DirichletVerdict {
        m,
        threshold,
        solvable,
        witness: Some(Witness::new(&out.q0, &out.q)),
        value_deg: out.value,
    })
}

/// First scale from which every later verdict is solvable.
pub fn stable_from(verdicts: &[DirichletVerdict]) -> Option<i64> {
    let mut m0 = None;
    for v in verdicts.iter().rev() {
        if v.solvable {
            m0 = Some(v.m);
        } else {
            break;
        }
    }
    m0
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    pub value_deg: Deg,
    pub q: Vec<Poly>,
    pub q0: Poly,
}

/// `min_{Φ(q) ≤ e^t} |q·y + q0|` in the degree domain.
pub fn irrationality_measure(y: &[Value], phi: &PhiSpec, t_deg: i64, cap: u128) -> Result<Measure> {
    let bounds = phi.bounds(t_deg, y.len())?;
    let out = search::minimize(y, &bounds, cap)?;
    Ok(Measure {
        value_deg: out.value,
        q: out.q,
        q0: out.q0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Omega {
    Finite(Q),
    Infinite,
}

impl Serialize for Omega {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::Finite(q) => write!(f, "{q}"),
            Omega::Infinite => write!(f, "inf"),
        }
    }
}

/// `ω_m = −value(m)/m` for `m = 1..=m_max`.
pub fn uniform_exponent_estimate(y: &[Value], m_max: i64, cap: u128) -> Result<Vec<Omega>> {
    (1..=m_max)
        .map(|m| {
            let out = search::minimize(y, &vec![m; y.len()], cap)?;
            Ok(match out.value {
                Deg::NegInf => Omega::Infinite,
                Deg::Finite(v) => Omega::Finite(Q::new(-v, m)),
            })
        })
        .collect()
}

/// Running minimum of an `ω` profile from the tail, i.e. the best lower
/// bound valid for every scale from `m` on within the computed range.
pub fn tail_minimum(omegas: &[Omega]) -> Vec<Omega> {
    let mut out = vec![Omega::Infinite; omegas.len()];
    let mut cur = Omega::Infinite;
    for i in (0..omegas.len()).rev() {
        cur = match (&cur, &omegas[i]) {
            (Omega::Infinite, x) | (x, Omega::Infinite) => x.clone(),
            (Omega::Finite(a), Omega::Finite(b)) => Omega::Finite(*a.min(b)),
        };
        out[i] = cur.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{cf_assemble, CfStream};
    use crate::degree::NEG_INF;
    use crate::field::Field;
    use crate::laurent::Laurent;
    use crate::parse::parse_rational;
    use std::sync::Arc;

    fn golden(f: &Arc<Field>, floor: i64) -> Value {
        let s = CfStream {
            prefix: vec![],
            period: vec![Poly::t(f)],
        };
        Value::from_laurent(cf_assemble(&s.quotients_for_floor(floor).unwrap(), floor).unwrap())
    }

    #[test]
    fn threshold_examples() {
        let a = PsiSpec::parse("gamma=-1,n=1").unwrap();
        assert_eq!(a.threshold(3).unwrap(), -5);
        let b = PsiSpec::parse("n=1").unwrap();
        assert_eq!(b.threshold(3).unwrap(), -4);
        let c = PsiSpec::parse("c=e^1/2,n=2").unwrap();
        assert_eq!(c.threshold(2).unwrap(), -4);
        let d = PsiSpec::parse("n=1,t0=2").unwrap();
        assert_eq!(d.threshold(1).unwrap_err(), Error::BelowDomain { m: 1, t0: 2 });
        assert_eq!(PsiSpec::parse("c=e^-1,n=1").unwrap(), a);
        assert!(matches!(
            PsiSpec::parse("table=1:-2;2:-1"),
            Err(Error::NotMonotone { m: 2 })
        ));
    }

    #[test]
    fn cf_test_examples() {
        let f = Field::prime(3).unwrap();
        let g = golden(&f, -64);
        let strict = PsiSpec::parse("gamma=-1,n=1").unwrap();
        let rows = dirichlet_test_cf(&g, &strict, 10).unwrap();
        assert!(rows.iter().all(|r| !r.pass && r.eq3 && r.threshold == -r.deg_q - 2));
        let loose = PsiSpec::parse("gamma=2,n=1").unwrap();
        assert!(dirichlet_test_cf(&g, &loose, 10).unwrap().iter().all(|r| r.pass));
        let x = Value::Rational(parse_rational(&f, "(T^2+1)/T").unwrap());
        assert!(matches!(
            dirichlet_test_cf(&x, &strict, 3),
            Err(Error::RationalDetected { .. })
        ));
    }

    #[test]
    fn bruteforce_examples() {
        let f2 = Field::prime(2).unwrap();
        let y = vec![Value::Rational(parse_rational(&f2, "1/(T+1)").unwrap())];
        let v = dirichlet_test_bruteforce(&y, &PsiSpec::parse("n=1").unwrap(), 1, DEFAULT_CAP).unwrap();
        assert!(v.solvable);
        assert_eq!(v.value_deg, NEG_INF);
        assert_eq!(
            v.witness.unwrap(),
            Witness {
                q0: "1".into(),
                q: vec!["T+1".into()]
            }
        );

        let f3 = Field::prime(3).unwrap();
        let g = golden(&f3, -64);
        let strict = PsiSpec::parse("gamma=-1,n=1").unwrap();
        for m in [1, 2, 3, 4] {
            let v = dirichlet_test_bruteforce(std::slice::from_ref(&g), &strict, m, DEFAULT_CAP).unwrap();
            assert!(!v.solvable);
        }

        let y = vec![
            Value::Rational(parse_rational(&f2, "1/T").unwrap()),
            Value::Rational(parse_rational(&f2, "1/T^2").unwrap()),
        ];
        let v = dirichlet_test_bruteforce(&y, &PsiSpec::parse("n=2").unwrap(), 2, DEFAULT_CAP).unwrap();
        assert!(v.solvable);
        assert_eq!(v.value_deg, NEG_INF);
        // (0, T^2) hits exactly, but so does the lower-height (1, T): T^-1 + T^-1 = 0.
        let w = v.witness.unwrap();
        assert_eq!(w.q, vec!["1".to_string(), "T".to_string()]);
        assert_eq!(w.q0, "0");
    }

    #[test]
    fn measure_examples() {
        let f2 = Field::prime(2).unwrap();
        let y = vec![
            Value::Rational(parse_rational(&f2, "1/T").unwrap()),
            Value::Rational(parse_rational(&f2, "1/T^2").unwrap()),
        ];
        let m = irrationality_measure(&y, &PhiSpec::SupNorm, 2, DEFAULT_CAP).unwrap();
        assert_eq!(m.value_deg, NEG_INF);
        let f3 = Field::prime(3).unwrap();
        let g = golden(&f3, -64);
        let m = irrationality_measure(std::slice::from_ref(&g), &PhiSpec::SupNorm, 1, DEFAULT_CAP).unwrap();
        assert_eq!(m.value_deg, Deg::Finite(-2));
        assert_eq!(m.q, vec![Poly::t(&f3)]);
        assert!(matches!(
            irrationality_measure(&y, &PhiSpec::SupNorm, -1, DEFAULT_CAP),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn uniform_exponent_of_golden() {
        let f3 = Field::prime(3).unwrap();
        let g = golden(&f3, -64);
        let om = uniform_exponent_estimate(std::slice::from_ref(&g), 6, DEFAULT_CAP).unwrap();
        for (i, w) in om.iter().enumerate() {
            let m = i as i64 + 1;
            assert_eq!(*w, Omega::Finite(Q::new(m + 1, m)));
        }
        let r = vec![Value::Rational(parse_rational(&f3, "1/(T^2+1)").unwrap())];
        let om = uniform_exponent_estimate(&r, 3, DEFAULT_CAP).unwrap();
        assert_eq!(om[1], Omega::Infinite);
        assert_eq!(om[2], Omega::Infinite);
    }

    #[test]
    fn measure_is_monotone() {
        let f3 = Field::prime(3).unwrap();
        let y = vec![
            golden(&f3, -64),
            Value::Series(Laurent::from_rational(&parse_rational(&f3, "1/(T^3+2*T+1)").unwrap(), -64).truncate(-64)),
        ];
        let mut prev = Deg::Finite(0);
        for t in 0..3 {
            let m = irrationality_measure(&y, &PhiSpec::SupNorm, t, DEFAULT_CAP).unwrap();
            assert!(m.value_deg <= prev);
            prev = m.value_deg;
        }
    }
}
