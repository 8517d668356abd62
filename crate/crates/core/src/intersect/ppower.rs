use crate::error::{Error, Result};
use crate::value::Value;

use super::{
    linear_class, pow, vanishes, BiPoly, Classification, Graph, Hyperplane, IntersectionClass, PPowerSurface, Stage,
    Var,
};

/// `a₁x + a₂y + a₃·p(x,y) − a₄` in the original coordinates.
fn equation(s: &PPowerSurface, a: &[Value]) -> BiPoly {
    let p = s.field.characteristic() as u64;
    let mut f = BiPoly::zero(&s.field);
    for (k, c) in s.x_coeffs().iter().enumerate() {
        f.add_term(p.pow(k as u32), 0, &a[2].mul(c));
    }
    for (k, c) in s.y_coeffs().iter().enumerate() {
        f.add_term(0, p.pow(k as u32), &a[2].mul(c));
    }
    f.add_term(1, 0, &a[0]);
    f.add_term(0, 1, &a[1]);
    f.add_term(0, 0, &a[3].neg());
    f
}

fn all_zero(v: &[Value]) -> Result<bool> {
    for x in v {
        if !x.is_zero()? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ xs[i] u^{p^i} + Σ ys[j] w^{p^j} − k`, with `(u, w) = (x, y)` unless swapped.
fn stage_equation(
    field: &std::sync::Arc<crate::field::Field>,
    xs: &[Value],
    ys: &[Value],
    k: &Value,
    p: u64,
    swapped: bool,
) -> BiPoly {
    let mut g = BiPoly::zero(field);
    for (own, flip) in [(xs, swapped), (ys, !swapped)] {
        for (i, c) in own.iter().enumerate() {
            let e = p.pow(i as u32);
            if flip {
                g.add_term(0, e, c);
            } else {
                g.add_term(e, 0, c);
            }
        }
    }
    g.add_term(0, 0, &k.neg());
    g
}

/// Solves `lin·u + Σ_{k≥1} other[k]·w^{p^k} + Σ_{k≥1} own[k]·u^{p^k} = K` for `u`
/// when `own[1..]` vanishes: `u = (K − Σ other[k] w^{p^k}) / lin`.
fn solve_linear(other: &[Value], lin: &Value, k: &Value, p: u64) -> Result<Vec<Value>> {
    let field = k.field();
    let inv = lin.inv()?;
    let top = p.pow(other.len().saturating_sub(1) as u32) as usize;
    let mut coeffs = vec![Value::zero(field); top + 1];
    coeffs[0] = k.mul(&inv);
    for (j, c) in other.iter().enumerate() {
        let e = p.pow(j as u32) as usize;
        coeffs[e] = coeffs[e].sub(&c.mul(&inv));
    }
    Ok(coeffs)
}

/// The p-th root recursion on `Σ X_i x^{p^i} + Σ Y_j y^{p^j} = K`.
pub fn classify_ppower(s: &PPowerSurface, a: &Hyperplane) -> Result<Classification> {
    if a.coeffs.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: a.coeffs.len(),
        });
    }
    let field = s.field.clone();
    let p = field.characteristic() as u64;
    let av: Vec<Value> = (0..4).map(|i| a.value(i)).collect();
    let f = equation(s, &av);
    let done_reduced = |class, case, swaps, stages, reduced| {
        Ok(Classification {
            class,
            case,
            swaps,
            f: f.clone(),
            reduced,
            stages,
        })
    };
    let done = |class, case, swaps, stages| done_reduced(class, case, swaps, stages, f.clone());

    if av[2].is_zero()? {
        return done(linear_class(&av[0], &av[1], &av[3].neg())?, "linear", vec![], vec![]);
    }

    let inv3 = av[2].inv()?;
    let (mut xs, mut ys) = (s.x_coeffs(), s.y_coeffs());
    xs[0] = xs[0].add(&av[0].mul(&inv3));
    ys[0] = ys[0].add(&av[1].mul(&inv3));
    let mut k = av[3].mul(&inv3);
    let mut swaps = vec![];
    let swapped = s.m() < s.n();
    if swapped {
        std::mem::swap(&mut xs, &mut ys);
        swaps.push("x<->y".to_string());
    }
    let orig = |v: Var| if swapped { v.other() } else { v };

    if !xs[0].is_zero()? || !ys[0].is_zero()? {
        return done(IntersectionClass::SmoothEverywhere, "r45", swaps, vec![]);
    }

    let mut stages: Vec<Stage> = vec![];
    let depth = s.m().max(s.n()) + 1;
    for _ in 0..=depth {
        if all_zero(&xs)? && all_zero(&ys)? {
            let class = if k.is_zero()? {
                IntersectionClass::ContainedInA
            } else {
                IntersectionClass::Empty { obstruction: Some(k) }
            };
            return done(class, "r45", swaps, stages);
        }
        let root = |v: &Value| -> Result<Value> {
            let r = v.pth_root()?;
            if !vanishes(&pow(&r, p).sub(v)) {
                return Err(Error::Internal("p-th root does not reproduce its argument".into()));
            }
            Ok(r)
        };
        let kr = match k.pth_root() {
            Ok(r) => r,
            Err(Error::NoRoot { .. }) => {
                let class = IntersectionClass::Empty { obstruction: Some(k) };
                return done(class, "r45", swaps, stages);
            }
            Err(e) => return Err(e),
        };
        let nx: Vec<Value> = xs[1..].iter().map(root).collect::<Result<_>>()?;
        let ny: Vec<Value> = ys[1..].iter().map(root).collect::<Result<_>>()?;
        let identity = vanishes(&pow(&kr, p).sub(&k))
            && nx.iter().zip(&xs[1..]).all(|(r, v)| vanishes(&pow(r, p).sub(v)))
            && ny.iter().zip(&ys[1..]).all(|(r, v)| vanishes(&pow(r, p).sub(v)));
        if !identity {
            return Err(Error::Internal("stage identity f_k = f_(k+1)^p failed".into()));
        }
        stages.push(Stage {
            constant: k.clone(),
            root: kr.clone(),
            identity,
        });
        xs = nx;
        ys = ny;
        k = kr;
        let (x_lin, y_lin) = (
            xs.first().map(|v| v.is_zero()).transpose()? == Some(false),
            ys.first().map(|v| v.is_zero()).transpose()? == Some(false),
        );
        if !x_lin && !y_lin {
            continue;
        }
        let graph = if y_lin && all_zero(&ys[1..])? {
            Some(Graph {
                free: orig(Var::X),
                coeffs: solve_linear(&xs, &ys[0], &k, p)?,
            })
        } else if x_lin && all_zero(&xs[1..])? {
            Some(Graph {
                free: orig(Var::Y),
                coeffs: solve_linear(&ys, &xs[0], &k, p)?,
            })
        } else {
            None
        };
        let class = match graph {
            Some(graph) => IntersectionClass::Curve { graph, base: None },
            None => IntersectionClass::SmoothEverywhere,
        };
        let reduced = stage_equation(&field, &xs, &ys, &k, p, swapped);
        return done_reduced(class, "r45", swaps, stages, reduced);
    }
    Err(Error::Internal("p-th root recursion did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::intersect::check::parametrization_check;
    use crate::poly::Poly;
    use std::sync::Arc;

    fn pv(f: &Arc<Field>, cs: &[i64]) -> Value {
        Value::from_poly(Poly::from_ints(f, cs))
    }

    fn plane(f: &Arc<Field>, a: &[&[i64]]) -> Hyperplane {
        Hyperplane::new(&a.iter().map(|cs| Poly::from_ints(f, cs)).collect::<Vec<_>>()).unwrap()
    }

    fn x4_y2() -> (Arc<Field>, PPowerSurface) {
        let f2 = Field::prime(2).unwrap();
        let s = PPowerSurface::new(
            &f2,
            vec![pv(&f2, &[]), pv(&f2, &[]), pv(&f2, &[1])],
            vec![pv(&f2, &[]), pv(&f2, &[1])],
        )
        .unwrap();
        (f2, s)
    }

    #[test]
    fn one_root_then_a_graph() {
        let (f2, s) = x4_y2();
        let c = classify_ppower(&s, &plane(&f2, &[&[], &[], &[1], &[0, 0, 1]])).unwrap();
        assert_eq!(c.stages.len(), 1);
        assert_eq!(c.stages[0].root.to_string(), "T");
        match &c.class {
            IntersectionClass::Curve { graph, .. } => {
                assert_eq!(graph.free, Var::X);
                assert_eq!(graph.coeffs[0].to_string(), "T");
                assert_eq!(graph.coeffs[2].to_string(), "1");
            }
            other => panic!("{other:?}"),
        }
        assert!(parametrization_check(&c, 100, 5, 2).unwrap().pass);
    }

    #[test]
    fn odd_exponent_constant_is_empty() {
        let (f2, s) = x4_y2();
        let c = classify_ppower(&s, &plane(&f2, &[&[], &[], &[1], &[0, 1]])).unwrap();
        match &c.class {
            IntersectionClass::Empty { obstruction } => {
                assert_eq!(obstruction.as_ref().unwrap().to_string(), "T")
            }
            other => panic!("{other:?}"),
        }
        assert!(parametrization_check(&c, 10, 5, 2).unwrap().pass);
    }

    #[test]
    fn surviving_linear_term_is_smooth() {
        let (f2, s) = x4_y2();
        let c = classify_ppower(&s, &plane(&f2, &[&[1], &[], &[1], &[]])).unwrap();
        assert!(matches!(c.class, IntersectionClass::SmoothEverywhere));
    }

    #[test]
    fn linear_x_after_one_root_with_nonlinear_y_is_smooth() {
        // x² + x⁴ + y⁴ over F_2: f₀ = x + x² + y² − √K
        let f2 = Field::prime(2).unwrap();
        let s = PPowerSurface::new(
            &f2,
            vec![pv(&f2, &[]), pv(&f2, &[1]), pv(&f2, &[1])],
            vec![pv(&f2, &[]), pv(&f2, &[]), pv(&f2, &[1])],
        )
        .unwrap();
        let c = classify_ppower(&s, &plane(&f2, &[&[], &[], &[1], &[]])).unwrap();
        assert!(matches!(c.class, IntersectionClass::SmoothEverywhere));
        assert_eq!(c.stages.len(), 1);
    }

    #[test]
    fn swap_when_y_has_higher_powers() {
        // x³ + y⁹ over F_3 with z = T³: f₀ = x + y³ − T, so x = T − y³
        let f3 = Field::prime(3).unwrap();
        let s = PPowerSurface::new(
            &f3,
            vec![pv(&f3, &[]), pv(&f3, &[1])],
            vec![pv(&f3, &[]), pv(&f3, &[]), pv(&f3, &[1])],
        )
        .unwrap();
        let c = classify_ppower(&s, &plane(&f3, &[&[], &[], &[1], &[0, 0, 0, 1]])).unwrap();
        assert_eq!(c.swaps, vec!["x<->y".to_string()]);
        match &c.class {
            IntersectionClass::Curve { graph, .. } => assert_eq!(graph.free, Var::Y),
            other => panic!("{other:?}"),
        }
        assert!(parametrization_check(&c, 30, 2, 1).unwrap().pass);
    }

    #[test]
    fn deep_recursion_over_f3() {
        // x⁹ + y⁹ = T⁹ over F_3 reduces twice to x + y = T
        let f3 = Field::prime(3).unwrap();
        let s = PPowerSurface::new(
            &f3,
            vec![pv(&f3, &[]), pv(&f3, &[]), pv(&f3, &[1])],
            vec![pv(&f3, &[]), pv(&f3, &[]), pv(&f3, &[1])],
        )
        .unwrap();
        let mut a9 = vec![0; 10];
        a9[9] = 1;
        let c = classify_ppower(&s, &plane(&f3, &[&[], &[], &[1], &a9])).unwrap();
        assert_eq!(c.stages.len(), 2);
        assert!(c.stages.iter().all(|s| s.identity));
        assert!(matches!(c.class, IntersectionClass::Curve { .. }));
        assert!(parametrization_check(&c, 30, 2, 1).unwrap().pass);
    }

    #[test]
    fn smoothness_is_judged_on_the_rooted_equation() {
        let f2 = Field::prime(2).unwrap();
        let s = PPowerSurface::new(
            &f2,
            vec![pv(&f2, &[0, 1]), pv(&f2, &[]), pv(&f2, &[1])],
            vec![pv(&f2, &[1]), pv(&f2, &[1, 1]), pv(&f2, &[1])],
        )
        .unwrap();
        let c = classify_ppower(&s, &plane(&f2, &[&[0, 1], &[1], &[1], &[1, 0, 0, 0, 1]])).unwrap();
        assert_eq!(c.class.tag(), "SmoothEverywhere");
        assert_eq!(c.f.to_string(), "x^4 + y^4 + (T^2+1)*y^2 + (T^4+1)");
        assert_eq!(c.reduced.to_string(), "x^2 + y^2 + (T+1)*y + (T^2+1)");
        // Every point of f = g² is singular for f itself, but not for g.
        assert!(parametrization_check(&c, 0, 0, 2).unwrap().pass);
    }
}
