use serde::Serialize;

use crate::approx::irrationality_measure;
use crate::approx::search::{candidate_count, minimize, DEFAULT_CAP};
use crate::degree::Deg;
use crate::error::{Error, Result};

use super::build::hyperplane_value;
use super::ConstructedPoint;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Cap on the exhaustive search over hyperplanes of height `≤ H`.
    pub cap: u128,
    /// Scales whose full enumeration stays below this are cross-checked.
    pub cross_cap: u128,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cap: DEFAULT_CAP,
            cross_cap: DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleCheck {
    pub m: i64,
    pub stage: usize,
    pub value_deg: Deg,
    pub claimed: i64,
    pub threshold: i64,
    /// Exact minimum over all admissible `q`, where it was computed.
    pub measure: Option<Deg>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub m0: i64,
    pub m_max: i64,
    pub h_max: i64,
    pub scales: Vec<ScaleCheck>,
    /// Smallest `deg(a·y − a_{n+1})` over hyperplanes of height `≤ H`.
    pub guard_min: Deg,
    pub guard_d: i64,
}

fn fail(msg: String) -> Error {
    Error::VerificationFailed(msg)
}

pub fn certificate_verify(pt: &ConstructedPoint, m_max: i64, h_max: i64) -> Result<Verdict> {
    certificate_verify_with(pt, m_max, h_max, &VerifyOptions::default())
}

/// Re-checks a certificate from the digits of `y` alone: the margin to
/// every hyperplane of height `≤ H`, then for each scale in `[m₀, M]` the
/// designated hyperplane against `φ`.
pub fn certificate_verify_with(pt: &ConstructedPoint, m_max: i64, h_max: i64, opts: &VerifyOptions) -> Result<Verdict> {
    let c = &pt.certificate;
    let y = &pt.y;
    let n = y.len();
    let p = pt.precision;
    let m0 = c.m0.ok_or_else(|| fail("certificate certifies no scale".into()))?;

    let d = c
        .guard_for(h_max)
        .ok_or_else(|| fail(format!("no guard entry for height {h_max}")))?;
    if p <= d + 1 {
        return Err(fail(format!(
            "precision {p} does not exceed D({h_max}) + 1 = {}",
            d + 1
        )));
    }
    for m in m0..=m_max {
        let t = c.phi.threshold(m)?;
        if p <= t.abs() + m_max + 1 {
            return Err(fail(format!("precision {p} is too small for scale {m}")));
        }
    }

    let guard = match minimize(y, &vec![h_max; n], opts.cap) {
        Ok(out) => out,
        Err(Error::PrecisionExhausted(_)) => {
            return Err(fail(format!(
                "a hyperplane of height at most {h_max} vanishes on every certified digit"
            )))
        }
        Err(e) => return Err(e),
    };
    if guard.value < Deg::Finite(-d) {
        let q: Vec<String> = guard.q.iter().map(|x| x.to_string()).collect();
        return Err(fail(format!(
            "hyperplane q = ({}), q0 = {} gives degree {} below the margin -{d}",
            q.join(", "),
            guard.q0,
            guard.value
        )));
    }

    let mut scales = vec![];
    for m in m0..=m_max {
        let k = c
            .designated(m)
            .ok_or_else(|| fail(format!("scale {m}: no stage is designated")))?;
        let s = &c.stages[k];
        let t = c.phi.threshold(m)?;
        let claimed = s.claimed_bound();
        if claimed > t {
            return Err(fail(format!(
                "scale {m}: stage {k} claims degree {claimed}, threshold is {t}"
            )));
        }
        let h = &s.item.hyperplane;
        let bounds = c.big_phi.bounds(m, n)?;
        if s.item.height() > m
            || h.coeffs[..n]
                .iter()
                .zip(&bounds)
                .any(|(q, b)| q.deg() > Deg::Finite(*b))
        {
            return Err(fail(format!("scale {m}: hyperplane of stage {k} is too tall")));
        }
        if !hyperplane_value(h, &s.anchor).is_zero()? {
            return Err(fail(format!("scale {m}: anchor of stage {k} is off its hyperplane")));
        }
        let axis = s.item.axis;
        if y[axis].sub(&s.anchor[axis]).deg_upper() > Deg::Finite(-s.radius) {
            return Err(fail(format!("scale {m}: y is outside the radius of stage {k}")));
        }
        let value_deg = hyperplane_value(h, y).deg_upper();
        if value_deg > Deg::Finite(claimed) || value_deg > Deg::Finite(t) {
            return Err(fail(format!(
                "scale {m}: |q·y + q0| has degree {value_deg}, above {}",
                claimed.min(t)
            )));
        }
        let measure = if candidate_count(y[0].field().order(), &bounds) <= opts.cross_cap {
            let mv = irrationality_measure(y, &c.big_phi, m, opts.cross_cap)?.value_deg;
            if mv > value_deg {
                return Err(fail(format!(
                    "scale {m}: exhaustive minimum {mv} exceeds the designated value"
                )));
            }
            Some(mv)
        } else {
            None
        };
        scales.push(ScaleCheck {
            m,
            stage: k,
            value_deg,
            claimed,
            threshold: t,
            measure,
        });
    }

    Ok(Verdict {
        m0,
        m_max,
        h_max,
        scales,
        guard_min: guard.value,
        guard_d: d,
    })
}
