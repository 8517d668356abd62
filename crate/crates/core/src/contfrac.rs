//! Continued fractions over `F_q(T)` and `F_q((T⁻¹))`.

use serde::Serialize;

use crate::approx::search;
use crate::degree::{Deg, NEG_INF};
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::parse::CfLiteral;
use crate::poly::{Poly, RationalFn};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Source {
    FromRational,
    FromLaurent,
    Prescribed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialQuotients {
    pub terms: Vec<Poly>,
    pub source: Source,
}

impl PartialQuotients {
    pub fn prescribed(terms: Vec<Poly>) -> Result<PartialQuotients> {
        if let Some(i) = terms.iter().skip(1).position(|a| a.deg() < Deg::Finite(1)) {
            return Err(Error::Invalid(format!(
                "partial quotient {} must have degree at least 1",
                i + 1
            )));
        }
        if terms.is_empty() {
            return Err(Error::Invalid("empty quotient list".into()));
        }
        Ok(PartialQuotients {
            terms,
            source: Source::Prescribed,
        })
    }

    /// `Σ_{i≥1} deg a_i`, which equals `deg q_N`.
    pub fn denominator_degree(&self) -> i64 {
        self.terms.iter().skip(1).map(|a| a.deg().unwrap()).sum()
    }
}

/// Expand up to `max_terms` quotients. Stops early, without error, when the
/// fractional part vanishes exactly. Any precision failure is returned
/// alongside the prefix computed so far.
pub fn cf_expand_prefix(x: &Value, max_terms: usize) -> (PartialQuotients, Option<Error>) {
    match x {
        Value::Rational(r) => {
            let mut terms = Vec::new();
            let (mut num, mut den) = (r.num().clone(), r.den().clone());
            while terms.len() < max_terms {
                let (a, rem) = num.divmod(&den).expect("nonzero denominator");
                terms.push(a);
                if rem.is_zero() {
                    break;
                }
                num = den;
                den = rem;
            }
            (
                PartialQuotients {
                    terms,
                    source: Source::FromRational,
                },
                None,
            )
        }
        Value::Series(l) => {
            let mut terms = Vec::new();
            let mut cur = l.clone();
            let fail = |i: usize, e: Error| match e {
                Error::PrecisionExhausted(m) => Error::precision(format!("partial quotient {i}: {m}")),
                other => other,
            };
            let mut err = None;
            while terms.len() < max_terms {
                let i = terms.len();
                let (a, frac) = match cur.split() {
                    Ok(s) => s,
                    Err(e) => {
                        err = Some(fail(i, e));
                        break;
                    }
                };
                terms.push(a);
                if frac.is_exact_zero() || terms.len() == max_terms {
                    break;
                }
                let t = match frac.deg() {
                    Ok(d) => d.unwrap(),
                    Err(e) => {
                        err = Some(fail(i + 1, e));
                        break;
                    }
                };
                cur = frac.inv(frac.floor() - 2 * t).expect("nonzero fractional part");
            }
            (
                PartialQuotients {
                    terms,
                    source: Source::FromLaurent,
                },
                err,
            )
        }
    }
}

pub fn cf_expand(x: &Value, max_terms: usize) -> Result<PartialQuotients> {
    match cf_expand_prefix(x, max_terms) {
        (pq, None) => Ok(pq),
        (_, Some(e)) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Convergents {
    /// `(p_n, q_n)` for `n = 0..=N`.
    pub pairs: Vec<(Poly, Poly)>,
}

pub fn cf_convergents(pq: &PartialQuotients) -> Convergents {
    let f = pq.terms[0].field().clone();
    let (mut p2, mut q2) = (Poly::zero(&f), Poly::one(&f));
    let (mut p1, mut q1) = (Poly::one(&f), Poly::zero(&f));
    let mut pairs = Vec::with_capacity(pq.terms.len());
    for a in &pq.terms {
        let p = a.mul(&p1).add(&p2);
        let q = a.mul(&q1).add(&q2);
        p2 = std::mem::replace(&mut p1, p.clone());
        q2 = std::mem::replace(&mut q1, q.clone());
        pairs.push((p, q));
    }
    let c = Convergents { pairs };
    assert!(c.determinant_holds(), "determinant identity failed");
    c
}

impl Convergents {
    /// Sequence including the seeds at indices -2 and -1.
    fn with_seeds(&self) -> Vec<(Poly, Poly)> {
        let f = self.pairs[0].0.field().clone();
        let mut v = vec![(Poly::zero(&f), Poly::one(&f)), (Poly::one(&f), Poly::zero(&f))];
        v.extend(self.pairs.iter().cloned());
        v
    }

    /// `p_i q_{i+1} − p_{i+1} q_i = (−1)^{i+1}` for every `i ≥ −2`.
    pub fn determinant_holds(&self) -> bool {
        let all = self.with_seeds();
        let f = all[0].0.field().clone();
        all.windows(2).enumerate().all(|(k, w)| {
            let i = k as i64 - 2;
            let lhs = w[0].0.mul(&w[1].1).sub(&w[1].0.mul(&w[0].1));
            let sign = if (i + 1).rem_euclid(2) == 0 {
                Poly::one(&f)
            } else {
                Poly::one(&f).neg()
            };
            lhs == sign
        })
    }

    pub fn last(&self) -> &(Poly, Poly) {
        self.pairs.last().expect("at least one convergent")
    }

    pub fn rational(&self, n: usize) -> RationalFn {
        let (p, q) = &self.pairs[n];
        RationalFn::new(p.clone(), q.clone()).expect("q_n is nonzero")
    }
}

/// Check `deg(x − p_n/q_n) = −(deg q_n + deg q_{n+1})` for every `n` whose
/// left side is decidable. Returns the number of indices checked, or the
/// first failing `n`.
pub fn eq3_check(x: &Value, conv: &Convergents) -> std::result::Result<usize, usize> {
    let mut checked = 0;
    for n in 0..conv.pairs.len().saturating_sub(1) {
        let diff = x.sub(&Value::Rational(conv.rational(n)));
        let want = -(conv.pairs[n].1.deg().unwrap() + conv.pairs[n + 1].1.deg().unwrap());
        match diff.deg() {
            Ok(d) if d == Deg::Finite(want) => checked += 1,
            Ok(_) => return Err(n),
            Err(_) => break,
        }
    }
    Ok(checked)
}

/// Value of the continued fraction certified down to `floor`. Terminating
/// expansions of rationals are evaluated exactly.
pub fn cf_assemble(pq: &PartialQuotients, floor: i64) -> Result<Laurent> {
    let conv = cf_convergents(pq);
    let n = pq.terms.len() - 1;
    let r = conv.rational(n);
    if pq.source == Source::FromRational {
        return Ok(Laurent::from_rational(&r, floor));
    }
    let have = 2 * pq.denominator_degree();
    if have <= -floor {
        return Err(Error::InsufficientTerms { have, need: -floor });
    }
    Ok(Laurent::from_rational(&r, floor).truncate(floor))
}

/// A finite or eventually periodic quotient stream.
#[derive(Debug, Clone)]
pub struct CfStream {
    pub prefix: Vec<Poly>,
    pub period: Vec<Poly>,
}

impl CfStream {
    pub fn take(&self, n: usize) -> Vec<Poly> {
        let mut out: Vec<Poly> = self.prefix.iter().take(n).cloned().collect();
        while out.len() < n && !self.period.is_empty() {
            let k = (out.len() - self.prefix.len()) % self.period.len();
            out.push(self.period[k].clone());
        }
        out
    }

    /// Enough terms that the assembled value is certified to `floor`.
    pub fn quotients_for_floor(&self, floor: i64) -> Result<PartialQuotients> {
        if self.period.is_empty() {
            return Ok(PartialQuotients {
                terms: self.prefix.clone(),
                source: Source::FromRational,
            });
        }
        let mut terms = Vec::new();
        let mut deg = 0;
        let mut n = 0;
        while terms.is_empty() || 2 * deg <= -floor {
            n += 1;
            terms = self.take(n);
            deg = terms.iter().skip(1).map(|a| a.deg().finite().unwrap_or(0)).sum();
        }
        // One extra quotient so the certified range is strict.
        PartialQuotients::prescribed(self.take(n + 1))
    }
}

/// Evaluate a parsed `cf:` literal. A trailing `...` repeats the listed
/// block forever; otherwise the list is a finite, hence rational, expansion.
pub fn literal_value(lit: &CfLiteral, floor: i64) -> Result<Value> {
    let stream = if lit.periodic {
        CfStream {
            prefix: Vec::new(),
            period: lit.terms.clone(),
        }
    } else {
        CfStream {
            prefix: lit.terms.clone(),
            period: Vec::new(),
        }
    };
    if lit.periodic && lit.terms.iter().any(|a| a.deg() < Deg::Finite(1)) {
        return Err(Error::Invalid(
            "every repeated partial quotient must have degree at least 1".into(),
        ));
    }
    let pq = stream.quotients_for_floor(floor)?;
    if pq.source == Source::FromRational {
        if pq.terms.iter().skip(1).any(|a| a.deg() < Deg::Finite(1)) {
            return Err(Error::Invalid(
                "partial quotients after the first must have degree at least 1".into(),
            ));
        }
        let conv = cf_convergents(&pq);
        return Ok(Value::Rational(conv.rational(pq.terms.len() - 1)));
    }
    Ok(Value::from_laurent(cf_assemble(&pq, floor)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestApprox {
    pub p: Poly,
    pub q: Poly,
    pub value_deg: Deg,
}

/// Exhaustive minimisation of `deg(q·x − p)` over nonzero `q` with
/// `deg q ≤ deg_bound`; the monic minimiser of least degree wins ties.
pub fn best_approx_search(x: &Value, deg_bound: i64, cap: u128) -> Result<BestApprox> {
    let out = search::minimize(std::slice::from_ref(x), &[deg_bound], cap)?;
    Ok(BestApprox {
        p: out.q0.neg(),
        q: out.q.into_iter().next().unwrap(),
        value_deg: out.value,
    })
}

/// Convergent denominators with degree at most `d`.
pub fn denominators_up_to(conv: &Convergents, d: i64) -> Vec<Poly> {
    conv.pairs
        .iter()
        .map(|(_, q)| q.clone())
        .filter(|q| q.deg() <= Deg::Finite(d) && q.deg() != NEG_INF)
        .collect()
}
