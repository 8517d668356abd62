use crate::error::{Error, Result};
use crate::value::Value;

use super::{
    linear_class, value_cmp, BiPoly, Classification, Graph, Hyperplane, IntersectionClass, QuadraticSurface,
    ReducedForm, Var, ROOT_FLOOR,
};

/// Collapses `Σ a_i p_i(x,y) + a₁x + a₂y − a_{n+1}` to a single quadratic in `x, y`.
pub fn reduce_coeffs(s: &QuadraticSurface, a: &Hyperplane) -> Result<ReducedForm> {
    let n = s.dim();
    if a.coeffs.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: a.coeffs.len(),
        });
    }
    let zero = Value::zero(&s.field);
    let mut b: [Value; 6] = std::array::from_fn(|_| zero.clone());
    for (i, row) in s.rows.iter().enumerate() {
        let ai = a.value(i + 2);
        for k in 0..6 {
            b[k] = b[k].add(&ai.mul(&row[k]));
        }
    }
    let linear = a.coeffs[2..n].iter().all(|c| c.is_zero());
    Ok(ReducedForm {
        lx: a.value(0).add(&b[3]),
        ly: a.value(1).add(&b[4]),
        c: b[5].sub(&a.value(n)),
        b,
        linear,
    })
}

pub fn classify_quadratic(s: &QuadraticSurface, a: &Hyperplane) -> Result<Classification> {
    let rf = reduce_coeffs(s, a)?;
    let f = rf.bipoly();
    let (case, class, swaps) = decide(&rf, &f)?;
    Ok(Classification {
        class,
        case,
        swaps,
        reduced: f.clone(),
        f,
        stages: vec![],
    })
}

fn no_root(e: &Error) -> bool {
    matches!(e, Error::NoRoot { .. } | Error::NoSquareRoot(_))
}

type Decision = (&'static str, IntersectionClass, Vec<String>);

fn decide(rf: &ReducedForm, f: &BiPoly) -> Result<Decision> {
    let field = f.field().clone();
    let [b1, b2, b3, ..] = &rf.b;
    let (lx, ly, c) = (&rf.lx, &rf.ly, &rf.c);
    let k = |n: i64| field.from_int(n);

    if b1.is_zero()? && b2.is_zero()? && b3.is_zero()? {
        return Ok(("linear", linear_class(lx, ly, c)?, vec![]));
    }

    let det = b1.mul(b3).scale(k(4)).sub(&b2.mul(b2));
    if !det.is_zero()? {
        let x0 = ly.mul(b2).sub(&b3.mul(lx).scale(k(2))).div(&det)?;
        let y0 = lx.mul(b2).sub(&b1.mul(ly).scale(k(2))).div(&det)?;
        let class = if f.eval(&x0, &y0).is_zero()? {
            IntersectionClass::FiniteSet(vec![(x0, y0)])
        } else {
            IntersectionClass::SmoothEverywhere
        };
        return Ok(("nondegenerate", class, vec![]));
    }

    if !b2.is_zero()? {
        if b3.is_zero()? {
            return Err(Error::Internal("b2 != 0 and b2^2 = 4 b1 b3 forced b3 != 0".into()));
        }
        let w1 = b2.mul(ly).sub(&b3.mul(lx).scale(k(2)));
        let w3 = b2.mul(b2).mul(c).sub(&b3.mul(lx).mul(lx));
        if !w1.is_zero()? || !w3.is_zero()? {
            return Ok(("double-line", IntersectionClass::SmoothEverywhere, vec![]));
        }
        let inv = b2.inv()?;
        let graph = Graph {
            free: Var::X,
            coeffs: vec![lx.neg().mul(&inv), b1.scale(k(2)).neg().mul(&inv)],
        };
        return Ok(("double-line", IntersectionClass::Curve { graph, base: None }, vec![]));
    }

    let mut swaps = vec![];
    let swapped = if field.characteristic() != 2 {
        b1.is_zero()?
    } else {
        b3.is_zero()?
    };
    let (q1, q3, l1, l2) = if swapped {
        swaps.push("x<->y".to_string());
        (b3, b1, ly, lx)
    } else {
        (b1, b3, lx, ly)
    };
    // In swapped coordinates the roles of x and y are exchanged.
    let orig = |v: Var| if swapped { v.other() } else { v };

    if field.characteristic() != 2 {
        if !l2.is_zero()? {
            return Ok(("parabolic", IntersectionClass::SmoothEverywhere, swaps));
        }
        let disc = l1.mul(l1).sub(&q1.mul(c).scale(k(4)));
        let root = match disc.sqrt(ROOT_FLOOR) {
            Ok(r) => r,
            Err(e) if no_root(&e) => {
                let class = IntersectionClass::Empty {
                    obstruction: Some(disc),
                };
                return Ok(("parabolic", class, swaps));
            }
            Err(e) => return Err(e),
        };
        let den = q1.scale(k(2)).inv()?;
        let r1 = l1.neg().add(&root).mul(&den);
        let r2 = l1.neg().sub(&root).mul(&den);
        let class = if root.is_zero()? {
            IntersectionClass::Curve {
                graph: Graph {
                    free: orig(Var::Y),
                    coeffs: vec![r1],
                },
                base: None,
            }
        } else {
            let mut values = [r1, r2];
            values.sort_by(value_cmp);
            IntersectionClass::TwoCurves {
                var: orig(Var::X),
                values,
            }
        };
        return Ok(("parabolic", class, swaps));
    }

    // Characteristic 2 with b₂ = 0: f = q1 x² + q3 y² + c after the swap.
    if !l1.is_zero()? || !l2.is_zero()? {
        return Ok(("char2", IntersectionClass::SmoothEverywhere, swaps));
    }
    let ratio = q1.div(q3)?;
    let alpha = match ratio.pth_root() {
        Ok(r) => r,
        Err(e) if no_root(&e) => return Ok(("char2", IntersectionClass::AtMostOnePoint, swaps)),
        Err(e) => return Err(e),
    };
    let beta = c.neg().div(q3)?;
    let s = match beta.pth_root() {
        Ok(r) => r,
        Err(e) if no_root(&e) => {
            let class = IntersectionClass::Empty {
                obstruction: Some(beta),
            };
            return Ok(("char2", class, swaps));
        }
        Err(e) => return Err(e),
    };
    let zero = Value::zero(&field);
    let base = if swapped { (s.clone(), zero) } else { (zero, s.clone()) };
    let graph = Graph {
        free: orig(Var::X),
        coeffs: vec![s, alpha.neg()],
    };
    Ok((
        "char2",
        IntersectionClass::Curve {
            graph,
            base: Some(base),
        },
        swaps,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::intersect::check::parametrization_check;
    use crate::intersect::vanishes;
    use crate::poly::Poly;
    use crate::RationalFn;
    use std::sync::Arc;

    fn pv(f: &Arc<Field>, cs: &[i64]) -> Value {
        Value::from_poly(Poly::from_ints(f, cs))
    }

    fn surface(f: &Arc<Field>, row: [&[i64]; 6]) -> QuadraticSurface {
        QuadraticSurface::new(f, vec![row.map(|cs| pv(f, cs))]).unwrap()
    }

    fn plane(f: &Arc<Field>, a: &[&[i64]]) -> Hyperplane {
        Hyperplane::new(&a.iter().map(|cs| Poly::from_ints(f, cs)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn reduce_xy() {
        let f2 = Field::prime(2).unwrap();
        let s = surface(&f2, [&[], &[1], &[], &[], &[], &[]]);
        let rf = reduce_coeffs(&s, &plane(&f2, &[&[], &[], &[1], &[]])).unwrap();
        assert_eq!(rf.b[1].to_string(), "1");
        assert!(rf.b.iter().enumerate().all(|(k, v)| k == 1 || vanishes(v)));
        assert_eq!(rf.bipoly().to_string(), "x*y");
        assert!(!rf.linear);
    }

    #[test]
    fn reduce_square_minus_one() {
        let f3 = Field::prime(3).unwrap();
        let s = surface(&f3, [&[1], &[], &[], &[], &[], &[]]);
        let rf = reduce_coeffs(&s, &plane(&f3, &[&[], &[], &[1], &[1]])).unwrap();
        assert_eq!(rf.bipoly().to_string(), "x^2 + (2)");
    }

    #[test]
    fn reduce_flags_linear() {
        let f3 = Field::prime(3).unwrap();
        let s = surface(&f3, [&[1], &[], &[], &[], &[], &[]]);
        let rf = reduce_coeffs(&s, &plane(&f3, &[&[1], &[0, 1], &[], &[2]])).unwrap();
        assert!(rf.linear);
        assert_eq!(rf.bipoly().to_string(), "x + (T)*y + (1)");
    }

    #[test]
    fn reduce_rejects_wrong_dimension() {
        let f3 = Field::prime(3).unwrap();
        let s = surface(&f3, [&[1], &[], &[], &[], &[], &[]]);
        let err = reduce_coeffs(&s, &plane(&f3, &[&[1], &[1], &[1]])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 4, got: 3 });
    }

    #[test]
    fn reduced_form_matches_direct_evaluation() {
        let f3 = Field::prime(3).unwrap();
        let row = [&[1, 1][..], &[0, 2], &[2], &[1], &[0, 0, 1], &[2, 1]].map(|cs| pv(&f3, cs));
        let row2 = [&[2][..], &[], &[1, 1], &[], &[1], &[1]].map(|cs| pv(&f3, cs));
        let s = QuadraticSurface::new(&f3, vec![row, row2]).unwrap();
        let a = plane(&f3, &[&[1, 1], &[2], &[0, 1], &[1], &[1, 0, 1]]);
        let f = reduce_coeffs(&s, &a).unwrap().bipoly();
        for (xs, ys) in [(&[1, 2][..], &[0, 1][..]), (&[2, 0, 1], &[1]), (&[], &[2, 2])] {
            let x = pv(&f3, xs);
            let y = Value::Rational(RationalFn::new(Poly::from_ints(&f3, ys), Poly::from_ints(&f3, &[1, 1])).unwrap());
            let mut direct = a.value(0).mul(&x).add(&a.value(1).mul(&y)).sub(&a.value(4));
            for (i, z) in s.eval(&x, &y).iter().enumerate() {
                direct = direct.add(&a.value(i + 2).mul(z));
            }
            assert!(vanishes(&f.eval(&x, &y).sub(&direct)));
        }
    }

    #[test]
    fn crossing_lines_have_one_singular_point() {
        let f2 = Field::prime(2).unwrap();
        let s = surface(&f2, [&[], &[1], &[], &[], &[], &[]]);
        let c = classify_quadratic(&s, &plane(&f2, &[&[], &[], &[1], &[]])).unwrap();
        match &c.class {
            IntersectionClass::FiniteSet(ps) => {
                assert_eq!(ps.len(), 1);
                assert!(vanishes(&ps[0].0) && vanishes(&ps[0].1));
            }
            other => panic!("{other:?}"),
        }
        assert!(parametrization_check(&c, 20, 1, 2).unwrap().pass);
    }

    #[test]
    fn square_minus_one_splits_into_two_lines() {
        let f3 = Field::prime(3).unwrap();
        let s = surface(&f3, [&[1], &[], &[], &[], &[], &[]]);
        let c = classify_quadratic(&s, &plane(&f3, &[&[], &[], &[1], &[1]])).unwrap();
        match &c.class {
            IntersectionClass::TwoCurves { var, values } => {
                assert_eq!(*var, Var::X);
                assert_eq!(values[0].to_string(), "1");
                assert_eq!(values[1].to_string(), "2");
            }
            other => panic!("{other:?}"),
        }
        assert!(parametrization_check(&c, 20, 1, 2).unwrap().pass);
    }

    #[test]
    fn char2_square_ratio_gives_a_line() {
        // x² + y² + T² = 0 over F_2
        let f2 = Field::prime(2).unwrap();
        let s = surface(&f2, [&[1], &[], &[1], &[], &[], &[0, 0, 1]]);
        let c = classify_quadratic(&s, &plane(&f2, &[&[], &[], &[1], &[]])).unwrap();
        match &c.class {
            IntersectionClass::Curve { graph, base } => {
                assert_eq!(graph.free, Var::X);
                assert_eq!(graph.coeffs[0].to_string(), "T");
                assert_eq!(graph.coeffs[1].to_string(), "1");
                let (x0, y0) = base.clone().unwrap();
                assert!(vanishes(&x0));
                assert_eq!(y0.to_string(), "T");
            }
            other => panic!("{other:?}"),
        }
        assert!(parametrization_check(&c, 50, 7, 2).unwrap().pass);
    }

    #[test]
    fn char2_nonsquare_ratio() {
        // b1/b3 = 1/T
        let f2 = Field::prime(2).unwrap();
        let s = surface(&f2, [&[1], &[], &[0, 1], &[], &[], &[1]]);
        let c = classify_quadratic(&s, &plane(&f2, &[&[], &[], &[1], &[]])).unwrap();
        assert!(matches!(c.class, IntersectionClass::AtMostOnePoint));
        assert!(parametrization_check(&c, 10, 1, 2).unwrap().pass);
    }

    #[test]
    fn char2_nonsquare_constant_is_empty() {
        // x² + y² + T: (x+y)² = T has no solution
        let f2 = Field::prime(2).unwrap();
        let s = surface(&f2, [&[1], &[], &[1], &[], &[], &[0, 1]]);
        let c = classify_quadratic(&s, &plane(&f2, &[&[], &[], &[1], &[]])).unwrap();
        assert!(matches!(c.class, IntersectionClass::Empty { .. }));
        assert!(parametrization_check(&c, 10, 1, 2).unwrap().pass);
    }

    #[test]
    fn double_line_case() {
        // (x + y + 1)² = x² + 2xy + y² + 2x + 2y + 1 over F_3
        let f3 = Field::prime(3).unwrap();
        let s = surface(&f3, [&[1], &[2], &[1], &[2], &[2], &[1]]);
        let c = classify_quadratic(&s, &plane(&f3, &[&[], &[], &[1], &[]])).unwrap();
        assert_eq!(c.case, "double-line");
        match &c.class {
            IntersectionClass::Curve { graph, .. } => {
                assert_eq!(graph.coeffs[0].to_string(), "2");
                assert_eq!(graph.coeffs[1].to_string(), "2");
            }
            other => panic!("{other:?}"),
        }
        let shifted = s.clone();
        let c2 = classify_quadratic(&shifted, &plane(&f3, &[&[], &[], &[1], &[1]])).unwrap();
        assert!(matches!(c2.class, IntersectionClass::SmoothEverywhere));
    }

    #[test]
    fn swapped_parabola_reports_original_coordinates() {
        // y² − T² over F_3 is y ∈ {T, −T}
        let f3 = Field::prime(3).unwrap();
        let s = surface(&f3, [&[], &[], &[1], &[], &[], &[]]);
        let c = classify_quadratic(&s, &plane(&f3, &[&[], &[], &[1], &[0, 0, 1]])).unwrap();
        assert_eq!(c.swaps, vec!["x<->y".to_string()]);
        match &c.class {
            IntersectionClass::TwoCurves { var, .. } => assert_eq!(*var, Var::Y),
            other => panic!("{other:?}"),
        }
        assert!(parametrization_check(&c, 10, 3, 2).unwrap().pass);
    }

    #[test]
    fn contained_when_rows_cancel() {
        let f3 = Field::prime(3).unwrap();
        let r1 = [&[1][..], &[], &[], &[], &[], &[]].map(|cs| pv(&f3, cs));
        let r2 = [&[1][..], &[], &[], &[], &[1], &[]].map(|cs| pv(&f3, cs));
        let s = QuadraticSurface::new(&f3, vec![r1, r2]).unwrap();
        // z3 − z4 + y = 0
        let c = classify_quadratic(&s, &plane(&f3, &[&[], &[1], &[1], &[2], &[]])).unwrap();
        assert!(matches!(c.class, IntersectionClass::ContainedInA));
    }
}
