//! Independent re-checks of a classification: exact substitution of every
//! emitted component and exhaustive search on a grid of rational points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::field::Elem;
use crate::poly::{Poly, RationalFn};
use crate::value::Value;

use super::bipoly::{vanishes, BiPoly, Var};
use super::grid::grid_solutions;
use super::{Classification, IntersectionClass};

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub pass: bool,
    pub samples: usize,
    pub grid_pairs: u64,
    pub detail: String,
}

impl CheckReport {
    fn ok(samples: usize, grid_pairs: u64) -> CheckReport {
        CheckReport {
            pass: true,
            samples,
            grid_pairs,
            detail: "ok".into(),
        }
    }

    fn fail(samples: usize, grid_pairs: u64, detail: String) -> CheckReport {
        CheckReport {
            pass: false,
            samples,
            grid_pairs,
            detail,
        }
    }
}

/// A random rational of small height: `P / T^k` or `P / (T + c)`.
fn random_param(rng: &mut ChaCha8Rng, field: &std::sync::Arc<crate::field::Field>) -> Value {
    let q = field.order();
    let num: Vec<Elem> = (0..rng.gen_range(1..=4)).map(|_| Elem(rng.gen_range(0..q))).collect();
    let den = if rng.gen_bool(0.5) {
        Poly::monomial(field, Elem::ONE, rng.gen_range(0..=3))
    } else {
        Poly::new(field, vec![Elem(rng.gen_range(0..q)), Elem::ONE])
    };
    Value::Rational(RationalFn::new(Poly::new(field, num), den).expect("nonzero denominator"))
}

fn point_on(free: Var, t: &Value, other: &Value) -> (Value, Value) {
    match free {
        Var::X => (t.clone(), other.clone()),
        Var::Y => (other.clone(), t.clone()),
    }
}

/// Soundness of the emitted class: every parametrisation satisfies `f ≡ 0`
/// identically and at `samples` random parameters, every listed point is a
/// singular point of `f`, and for `Empty` no grid point solves `f = 0`.
pub fn parametrization_check(c: &Classification, samples: usize, seed: u64, g: u32) -> Result<CheckReport> {
    let f = &c.f;
    let field = f.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &c.class {
        IntersectionClass::ContainedInA => {
            if f.is_identically_zero()? {
                Ok(CheckReport::ok(0, 0))
            } else {
                Ok(CheckReport::fail(0, 0, "equation is not identically zero".into()))
            }
        }
        IntersectionClass::FiniteSet(points) => {
            for (k, (x, y)) in points.iter().enumerate() {
                if !f.is_singular_at(x, y) {
                    return Ok(CheckReport::fail(k, 0, format!("point {k} is not singular")));
                }
            }
            Ok(CheckReport::ok(points.len(), 0))
        }
        IntersectionClass::Curve { graph, base } => {
            let g_poly = graph.vpoly();
            for k in 0..samples {
                let t = random_param(&mut rng, &field);
                let (x, y) = point_on(graph.free, &t, &g_poly.eval(&t));
                if !vanishes(&f.eval(&x, &y)) {
                    return Ok(CheckReport::fail(
                        k,
                        0,
                        format!("sample {k} at {} = {t} is off f = 0", graph.free.name()),
                    ));
                }
            }
            if let Some(k) = f.substitute(graph.free, &g_poly).first_nonvanishing() {
                return Ok(CheckReport::fail(
                    samples,
                    0,
                    format!("substitution leaves a term of degree {k}"),
                ));
            }
            if let Some((x, y)) = base {
                if !vanishes(&f.eval(x, y)) {
                    return Ok(CheckReport::fail(samples, 0, "base point is off f = 0".into()));
                }
            }
            Ok(CheckReport::ok(samples, 0))
        }
        IntersectionClass::TwoCurves { var, values } => {
            for v in values {
                let restricted = f.restrict(*var, v);
                if let Some(k) = restricted.first_nonvanishing() {
                    return Ok(CheckReport::fail(
                        0,
                        0,
                        format!("{} = {v} leaves a term of degree {k}", var.name()),
                    ));
                }
                for k in 0..samples {
                    let t = random_param(&mut rng, &field);
                    let (x, y) = point_on(var.other(), &t, v);
                    if !vanishes(&f.eval(&x, &y)) {
                        return Ok(CheckReport::fail(k, 0, format!("sample {k} is off f = 0")));
                    }
                }
            }
            Ok(CheckReport::ok(2 * samples, 0))
        }
        IntersectionClass::Empty { .. } => grid_completeness(c, g),
        IntersectionClass::AtMostOnePoint | IntersectionClass::SmoothEverywhere => grid_completeness(c, g),
    }
}

fn on_graph(f_free: Var, coeffs: &[Value], x: &Value, y: &Value) -> bool {
    let (t, other) = match f_free {
        Var::X => (x, y),
        Var::Y => (y, x),
    };
    let g = super::VPoly::new(t.field(), coeffs.to_vec());
    vanishes(&g.eval(t).sub(other))
}

/// Every grid solution of `f = 0` lies where the class says it may.
pub fn grid_completeness(c: &Classification, g: u32) -> Result<CheckReport> {
    let f: &BiPoly = &c.f;
    if let IntersectionClass::ContainedInA = c.class {
        return parametrization_check(c, 0, 0, g);
    }
    let found = grid_solutions(f, g)?;
    let pairs = found.pairs;
    let sols = &found.solutions;
    let bad = |k: usize, why: &str| {
        let (x, y) = &sols[k];
        Ok(CheckReport::fail(
            sols.len(),
            pairs,
            format!("grid point ({x}, {y}) {why}"),
        ))
    };
    match &c.class {
        IntersectionClass::ContainedInA => unreachable!(),
        IntersectionClass::Empty { .. } => {
            if !sols.is_empty() {
                return bad(0, "solves f = 0");
            }
        }
        IntersectionClass::AtMostOnePoint => {
            if sols.len() > 1 {
                return bad(1, "is a second solution");
            }
        }
        IntersectionClass::SmoothEverywhere => {
            if let Some(k) = sols.iter().position(|(x, y)| c.reduced.is_singular_at(x, y)) {
                return bad(k, "is singular");
            }
        }
        IntersectionClass::FiniteSet(points) => {
            for (k, (x, y)) in sols.iter().enumerate() {
                let listed = points.iter().any(|(a, b)| vanishes(&a.sub(x)) && vanishes(&b.sub(y)));
                if !listed && f.is_singular_at(x, y) {
                    return bad(k, "is an unlisted singular point");
                }
            }
        }
        IntersectionClass::Curve { graph, .. } => {
            if let Some(k) = sols
                .iter()
                .position(|(x, y)| !on_graph(graph.free, &graph.coeffs, x, y))
            {
                return bad(k, "is off the curve");
            }
        }
        IntersectionClass::TwoCurves { var, values } => {
            let coord = |(x, y): &(Value, Value)| match var {
                Var::X => x.clone(),
                Var::Y => y.clone(),
            };
            if let Some(k) = sols
                .iter()
                .position(|s| !values.iter().any(|v| vanishes(&v.sub(&coord(s)))))
            {
                return bad(k, "is off both curves");
            }
        }
    }
    Ok(CheckReport::ok(sols.len(), pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::intersect::{classify_ppower, Hyperplane, PPowerSurface};

    #[test]
    fn corrupted_parametrisation_fails_at_first_sample() {
        let f2 = Field::prime(2).unwrap();
        let one = Value::from_poly(Poly::from_ints(&f2, &[1]));
        let zero = Value::zero(&f2);
        let s = PPowerSurface::new(
            &f2,
            vec![zero.clone(), zero.clone(), one.clone()],
            vec![zero, one.clone()],
        )
        .unwrap();
        let a = Hyperplane::new(&[&[][..], &[], &[1], &[0, 0, 1]].map(|cs| Poly::from_ints(&f2, cs))).unwrap();
        let mut c = classify_ppower(&s, &a).unwrap();
        assert!(parametrization_check(&c, 100, 9, 2).unwrap().pass);
        if let IntersectionClass::Curve { graph, .. } = &mut c.class {
            graph.coeffs[0] = graph.coeffs[0].add(&one);
        }
        let r = parametrization_check(&c, 100, 9, 2).unwrap();
        assert!(!r.pass);
        assert_eq!(r.samples, 0);
    }
}
