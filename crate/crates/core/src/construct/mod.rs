//! Nested-ball construction of points on a surface that are singular for a
//! prescribed rate `φ` and off every low-height rational hyperplane, together
//! with certificates that can be re-checked from the emitted digits alone.

mod build;
mod probe;
mod verify;

use std::sync::Arc;

use serde_json::{json, Value as Json};

use crate::degree::Deg;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::intersect::{Hyperplane, Surface};
use crate::parse::parse_rational;
use crate::poly::{Poly, RationalFn};
use crate::value::Value;

pub use build::{singular_build, BuildConfig, Certificate, ConstructedPoint, GuardEntry, StageRecord};
pub use probe::{b_probe, c_probe, d_probe, property_a_probe, property_a_probe_with, ProbeReport, ProbeSets};
pub use verify::{certificate_verify, certificate_verify_with, ScaleCheck, Verdict, VerifyOptions};

/// Closed ball `B(center, e^{−rho})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: RationalFn,
    pub rho: i64,
}

impl Ball {
    pub fn unit(field: &Arc<Field>) -> Ball {
        Ball {
            center: RationalFn::zero(field),
            rho: 0,
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        v.sub(&Value::Rational(self.center.clone())).deg_upper() <= Deg::Finite(-self.rho)
    }

    fn to_json(&self) -> Json {
        json!({"center": self.center.to_string(), "rho": self.rho})
    }

    fn from_json(field: &Arc<Field>, v: &Json) -> Result<Ball> {
        let center = v
            .get("center")
            .and_then(Json::as_str)
            .ok_or_else(|| Error::Invalid("ball needs a 'center' string".into()))?;
        let rho = v
            .get("rho")
            .and_then(Json::as_i64)
            .ok_or_else(|| Error::Invalid("ball needs an integer 'rho'".into()))?;
        Ok(Ball {
            center: parse_rational(field, center)?,
            rho,
        })
    }
}

#[derive(Clone, Debug)]
pub enum DomainKind {
    /// A graph `(x, y) ↦ (x, y, p₃, ...)`; the window bounds `x` and `y`.
    Graph(Surface),
    /// A product of balls; every coordinate is free.
    ProductPerfect,
}

/// A surface together with the window the construction stays in.
#[derive(Clone, Debug)]
pub struct SurfaceDomain {
    pub field: Arc<Field>,
    pub kind: DomainKind,
    pub window: Vec<Ball>,
}

impl SurfaceDomain {
    pub fn graph(surface: Surface, window: Option<Vec<Ball>>) -> Result<SurfaceDomain> {
        let field = surface.field().clone();
        let window = window.unwrap_or_else(|| vec![Ball::unit(&field), Ball::unit(&field)]);
        if window.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: window.len(),
            });
        }
        Ok(SurfaceDomain {
            field,
            kind: DomainKind::Graph(surface),
            window,
        })
    }

    pub fn product(field: &Arc<Field>, balls: Vec<Ball>) -> Result<SurfaceDomain> {
        if balls.is_empty() {
            return Err(Error::Invalid("a product needs at least one ball".into()));
        }
        Ok(SurfaceDomain {
            field: field.clone(),
            kind: DomainKind::ProductPerfect,
            window: balls,
        })
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        match &self.kind {
            DomainKind::Graph(s) => s.dim(),
            DomainKind::ProductPerfect => self.window.len(),
        }
    }

    /// Number of free parameters.
    pub fn free_dim(&self) -> usize {
        self.window.len()
    }

    /// The full point above the free parameters.
    pub fn point(&self, free: &[Value]) -> Vec<Value> {
        match &self.kind {
            DomainKind::Graph(s) => s.point(&free[0], &free[1]),
            DomainKind::ProductPerfect => free.to_vec(),
        }
    }

    pub fn axis_name(&self, j: usize) -> String {
        match (self.free_dim(), j) {
            (2, 0) => "x".into(),
            (2, 1) => "y".into(),
            _ => format!("x{}", j + 1),
        }
    }

    /// Graph surfaces: `{"kind": "quadratic" | "ppower", ..., "window": [ball, ball]}`
    /// with an optional window; products: `{"kind": "product", "balls": [ball, ...]}`.
    /// A ball is `{"center": "<rational>", "rho": <int>}`.
    pub fn from_json(field: &Arc<Field>, v: &Json) -> Result<SurfaceDomain> {
        let balls = |key: &str| -> Result<Option<Vec<Ball>>> {
            match v.get(key) {
                None => Ok(None),
                Some(arr) => arr
                    .as_array()
                    .ok_or_else(|| Error::Invalid(format!("'{key}' must be an array")))?
                    .iter()
                    .map(|b| Ball::from_json(field, b))
                    .collect::<Result<Vec<_>>>()
                    .map(Some),
            }
        };
        match v.get("kind").and_then(Json::as_str) {
            Some("product") => {
                let bs = balls("balls")?.ok_or_else(|| Error::Invalid("missing array 'balls'".into()))?;
                SurfaceDomain::product(field, bs)
            }
            _ => SurfaceDomain::graph(Surface::from_json(field, v)?, balls("window")?),
        }
    }

    pub fn to_json(&self) -> Json {
        let balls: Vec<Json> = self.window.iter().map(Ball::to_json).collect();
        match &self.kind {
            DomainKind::Graph(s) => {
                let mut out = s.to_json();
                out["window"] = json!(balls);
                out
            }
            DomainKind::ProductPerfect => json!({"kind": "product", "balls": balls}),
        }
    }
}

/// `x_axis = offset`, normal to one coordinate axis.
#[derive(Clone, Debug)]
pub struct FamilyItem {
    pub axis: usize,
    pub offset: RationalFn,
    pub hyperplane: Hyperplane,
}

impl FamilyItem {
    pub fn new(domain: &SurfaceDomain, axis: usize, offset: RationalFn) -> Result<FamilyItem> {
        let n = domain.dim();
        let f = &domain.field;
        let mut coeffs = vec![Poly::zero(f); n + 1];
        coeffs[axis] = offset.den().clone();
        coeffs[n] = offset.num().clone();
        Ok(FamilyItem {
            axis,
            offset,
            hyperplane: Hyperplane::new(&coeffs)?,
        })
    }

    pub fn height(&self) -> i64 {
        self.hyperplane.height_deg.unwrap()
    }

    pub fn kind_tag(&self) -> String {
        match self.axis {
            0 => "AxisX".into(),
            1 => "AxisY".into(),
            j => format!("Axis{}", j + 1),
        }
    }

    /// `L_i` written as a parametrised set.
    pub fn describe(&self, domain: &SurfaceDomain) -> String {
        let a = format!("({})", self.offset);
        match &domain.kind {
            DomainKind::Graph(s) => {
                let (x, y) = if self.axis == 0 {
                    (a, "y".to_string())
                } else {
                    ("x".to_string(), a)
                };
                let deps: Vec<String> = (3..=s.dim()).map(|i| format!("p{i}({x}, {y})")).collect();
                let mut coords = vec![x, y];
                coords.extend(deps);
                format!("{{({})}}", coords.join(", "))
            }
            DomainKind::ProductPerfect => {
                let coords: Vec<String> = (0..domain.dim())
                    .map(|j| if j == self.axis { a.clone() } else { domain.axis_name(j) })
                    .collect();
                format!("{{({})}}", coords.join(", "))
            }
        }
    }

    /// Nearest point of `L_i` to `z`, obtained by moving the axis coordinate.
    pub fn foot(&self, domain: &SurfaceDomain, free: &[Value]) -> Vec<Value> {
        let mut moved = free.to_vec();
        moved[self.axis] = Value::Rational(self.offset.clone());
        domain.point(&moved)
    }

    pub fn to_json(&self, domain: &SurfaceDomain) -> Json {
        json!({
            "kind": self.kind_tag(),
            "offset": self.offset.to_string(),
            "hyperplane": self.hyperplane.to_json(),
            "height": self.height(),
            "curve": self.describe(domain),
        })
    }
}

#[derive(Clone, Debug)]
pub struct HyperplaneFamily {
    pub items: Vec<FamilyItem>,
}

impl HyperplaneFamily {
    pub fn without_axis(&self, axis: usize) -> HyperplaneFamily {
        HyperplaneFamily {
            items: self.items.iter().filter(|i| i.axis != axis).cloned().collect(),
        }
    }
}

/// Largest number of offsets examined per axis.
pub const FAMILY_CAP: u128 = 1 << 22;

/// Laurent polynomial `Σ_{k=lo}^{hi} c_k T^k` from an index in base `q`.
fn digits_value(field: &Arc<Field>, idx: u64, lo: i64, hi: i64) -> RationalFn {
    let q = field.order() as u64;
    let width = (hi - lo + 1) as usize;
    let mut cs = Vec::with_capacity(width);
    let mut i = idx;
    for _ in 0..width {
        cs.push(Elem((i % q) as u32));
        i /= q;
    }
    let num = Poly::new(field, cs);
    if lo >= 0 {
        RationalFn::from_poly(num.shift(lo as usize))
    } else {
        RationalFn::new(num, Poly::monomial(field, Elem::ONE, (-lo) as usize)).expect("monomial denominator")
    }
}

/// Axis-normal hyperplanes `x_j = center_j + Σ c_k T^{−k}` with offsets of
/// height at most `height_max` inside the window, ordered by axis, then height.
pub fn hyperplane_family(domain: &SurfaceDomain, height_max: i64) -> Result<HyperplaneFamily> {
    if height_max < 0 {
        return Err(Error::Invalid("height_max must be nonnegative".into()));
    }
    let field = &domain.field;
    let mut items = vec![];
    for (axis, ball) in domain.window.iter().enumerate() {
        let hi = -ball.rho;
        let lo = -height_max;
        let mut found = vec![];
        if lo <= hi {
            let count = (field.order() as u128).saturating_pow((hi - lo + 1) as u32);
            if count > FAMILY_CAP {
                return Err(Error::TooLarge { count, cap: FAMILY_CAP });
            }
            for idx in 0..count as u64 {
                let offset = ball.center.add(&digits_value(field, idx, lo, hi));
                let item = FamilyItem::new(domain, axis, offset)?;
                if item.height() <= height_max {
                    found.push(item);
                }
            }
        }
        found.sort_by_key(|i| i.height());
        items.extend(found);
    }
    Ok(HyperplaneFamily { items })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::QuadraticSurface;

    pub(crate) fn xy_surface(field: &Arc<Field>) -> Surface {
        let z = || Value::zero(field);
        let one = Value::from_poly(Poly::from_ints(field, &[1]));
        Surface::Quadratic(QuadraticSurface::new(field, vec![[z(), one, z(), z(), z(), z()]]).unwrap())
    }

    #[test]
    fn family_over_f2_height_two() {
        let f2 = Field::prime(2).unwrap();
        let d = SurfaceDomain::graph(xy_surface(&f2), None).unwrap();
        let fam = hyperplane_family(&d, 2).unwrap();
        let offs = |axis: usize| -> Vec<String> {
            fam.items
                .iter()
                .filter(|i| i.axis == axis)
                .map(|i| i.offset.to_string())
                .collect()
        };
        let xs = offs(0);
        for want in ["0", "1", "1/T", "1/T^2", "(T+1)/T", "(T^2+T+1)/T^2"] {
            assert!(xs.contains(&want.to_string()), "{want} missing from {xs:?}");
        }
        assert_eq!(xs.len(), 8);
        assert_eq!(offs(1), xs);
        assert!(fam.items.iter().all(|i| i.height() <= 2));
        assert_eq!(fam.items[0].to_json(&d)["curve"], "{((0), y, p3((0), y))}");
    }

    #[test]
    fn height_zero_is_constants() {
        let f3 = Field::prime(3).unwrap();
        let d = SurfaceDomain::graph(xy_surface(&f3), None).unwrap();
        let fam = hyperplane_family(&d, 0).unwrap();
        assert_eq!(fam.items.len(), 6);
        assert!(fam.items.iter().all(|i| i.offset.is_poly() && i.height() == 0));
    }

    #[test]
    fn product_family_stays_in_balls() {
        let f2 = Field::prime(2).unwrap();
        let center = parse_rational(&f2, "1/(T+1)").unwrap();
        let balls = vec![Ball { center, rho: 1 }, Ball::unit(&f2)];
        let d = SurfaceDomain::product(&f2, balls.clone()).unwrap();
        let fam = hyperplane_family(&d, 4).unwrap();
        assert!(!fam.items.is_empty());
        for it in &fam.items {
            assert!(balls[it.axis].contains(&Value::Rational(it.offset.clone())));
            assert!(it.height() <= 4);
        }
    }

    #[test]
    fn domain_json_round_trip() {
        let f3 = Field::prime(3).unwrap();
        let d = SurfaceDomain::graph(xy_surface(&f3), None).unwrap();
        let j = d.to_json();
        let back = SurfaceDomain::from_json(&f3, &j).unwrap();
        assert_eq!(back.to_json(), j);
        let p = SurfaceDomain::product(&f3, vec![Ball::unit(&f3); 2]).unwrap();
        assert_eq!(
            SurfaceDomain::from_json(&f3, &p.to_json()).unwrap().to_json(),
            p.to_json()
        );
    }
}
