//! Exact description of `S ∩ A` for a rational affine hyperplane `A` and two
//! families of surfaces: graphs of quadratic maps and of additive p-power
//! polynomials. Every emitted component can be re-checked by substitution.

pub mod bipoly;
pub mod check;
pub mod grid;
mod ppower;
mod quadratic;

use std::cmp::Ordering;
use std::sync::Arc;

use serde_json::{json, Value as Json};

use crate::degree::Deg;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::parse::parse_value;
use crate::poly::{height_deg, vector_primitive_normalize, Poly};
use crate::value::Value;

pub use bipoly::{vanishes, BiPoly, VPoly, Var};
pub use check::{grid_completeness, parametrization_check, CheckReport};
pub use ppower::classify_ppower;
pub use quadratic::{classify_quadratic, reduce_coeffs};

/// Precision used when a square or p-th root has to be expanded as a series.
pub const ROOT_FLOOR: i64 = -64;

/// `a₁x₁ + ... + a_n x_n = a_{n+1}` with a primitive coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    pub coeffs: Vec<Poly>,
    pub height_deg: Deg,
}

impl Hyperplane {
    pub fn new(coeffs: &[Poly]) -> Result<Hyperplane> {
        let coeffs = vector_primitive_normalize(coeffs)?;
        let height_deg = height_deg(&coeffs);
        Ok(Hyperplane { coeffs, height_deg })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self, i: usize) -> Value {
        Value::from_poly(self.coeffs[i].clone())
    }

    pub fn to_json(&self) -> Json {
        json!(self.coeffs.iter().map(|p| p.to_string()).collect::<Vec<_>>())
    }
}

/// `{(x, y, p₃(x,y), ..., p_n(x,y))}` with
/// `p_i = b_{i,1}x² + b_{i,2}xy + b_{i,3}y² + b_{i,4}x + b_{i,5}y + b_{i,6}`.
#[derive(Clone, Debug)]
pub struct QuadraticSurface {
    pub field: Arc<Field>,
    pub rows: Vec<[Value; 6]>,
}

impl QuadraticSurface {
    pub fn new(field: &Arc<Field>, rows: Vec<[Value; 6]>) -> Result<QuadraticSurface> {
        if rows.is_empty() {
            return Err(Error::Invalid("a quadratic surface needs at least one row".into()));
        }
        for (k, row) in rows.iter().enumerate() {
            if row[..3].iter().all(vanishes) {
                return Err(Error::Invalid(format!("row {} has no quadratic part", k + 3)));
            }
        }
        Ok(QuadraticSurface {
            field: field.clone(),
            rows,
        })
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.rows.len() + 2
    }

    /// The dependent coordinates at `(x, y)`.
    pub fn eval(&self, x: &Value, y: &Value) -> Vec<Value> {
        self.rows
            .iter()
            .map(|b| {
                let mut acc = b[5].clone();
                for (c, m) in [
                    (&b[0], x.mul(x)),
                    (&b[1], x.mul(y)),
                    (&b[2], y.mul(y)),
                    (&b[3], x.clone()),
                    (&b[4], y.clone()),
                ] {
                    acc = acc.add(&c.mul(&m));
                }
                acc
            })
            .collect()
    }

    pub fn to_json(&self) -> Json {
        json!({
            "kind": "quadratic",
            "rows": self.rows.iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// `{(x, y, Σ b_i^{p^i} x^{p^i} + Σ c_j^{p^j} y^{p^j})}`.
#[derive(Clone, Debug)]
pub struct PPowerSurface {
    pub field: Arc<Field>,
    pub b: Vec<Value>,
    pub c: Vec<Value>,
}

fn trim(mut v: Vec<Value>) -> Vec<Value> {
    while v.last().is_some_and(vanishes) {
        v.pop();
    }
    v
}

impl PPowerSurface {
    pub fn new(field: &Arc<Field>, b: Vec<Value>, c: Vec<Value>) -> Result<PPowerSurface> {
        let (b, c) = (trim(b), trim(c));
        if b.is_empty() || c.is_empty() {
            return Err(Error::Invalid("both the x-part and the y-part must be nonzero".into()));
        }
        Ok(PPowerSurface {
            field: field.clone(),
            b,
            c,
        })
    }

    pub fn m(&self) -> usize {
        self.b.len() - 1
    }

    pub fn n(&self) -> usize {
        self.c.len() - 1
    }

    /// Coefficients `b_i^{p^i}` of `x^{p^i}`.
    pub fn x_coeffs(&self) -> Vec<Value> {
        frob_powers(&self.b, self.field.characteristic() as u64)
    }

    pub fn y_coeffs(&self) -> Vec<Value> {
        frob_powers(&self.c, self.field.characteristic() as u64)
    }

    /// The dependent coordinate at `(x, y)`.
    pub fn eval(&self, x: &Value, y: &Value) -> Value {
        let p = self.field.characteristic() as u64;
        let mut acc = Value::zero(&self.field);
        for (k, c) in self.x_coeffs().iter().enumerate() {
            acc = acc.add(&c.mul(&pow(x, p.pow(k as u32))));
        }
        for (k, c) in self.y_coeffs().iter().enumerate() {
            acc = acc.add(&c.mul(&pow(y, p.pow(k as u32))));
        }
        acc
    }

    pub fn to_json(&self) -> Json {
        json!({
            "kind": "ppower",
            "b": self.b.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "c": self.c.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn pow(v: &Value, e: u64) -> Value {
    let mut acc = Value::constant(v.field(), crate::field::Elem::ONE);
    for _ in 0..e {
        acc = acc.mul(v);
    }
    acc
}

fn frob_powers(v: &[Value], p: u64) -> Vec<Value> {
    let mut out = Vec::with_capacity(v.len());
    for (k, b) in v.iter().enumerate() {
        let mut x = b.clone();
        for _ in 0..k {
            x = pow(&x, p);
        }
        out.push(x);
    }
    out
}

/// Either surface family.
#[derive(Clone, Debug)]
pub enum Surface {
    Quadratic(QuadraticSurface),
    PPower(PPowerSurface),
}

impl Surface {
    pub fn field(&self) -> &Arc<Field> {
        match self {
            Surface::Quadratic(s) => &s.field,
            Surface::PPower(s) => &s.field,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Surface::Quadratic(s) => s.dim(),
            Surface::PPower(_) => 3,
        }
    }

    /// The full point `(x, y, ...)` of the surface above `(x, y)`.
    pub fn point(&self, x: &Value, y: &Value) -> Vec<Value> {
        let mut out = vec![x.clone(), y.clone()];
        match self {
            Surface::Quadratic(s) => out.extend(s.eval(x, y)),
            Surface::PPower(s) => out.push(s.eval(x, y)),
        }
        out
    }

    pub fn classify(&self, a: &Hyperplane) -> Result<Classification> {
        match self {
            Surface::Quadratic(s) => classify_quadratic(s, a),
            Surface::PPower(s) => classify_ppower(s, a),
        }
    }

    /// Reads `{"kind": "quadratic", "rows": [[b1..b6], ...]}` or
    /// `{"kind": "ppower", "b": [...], "c": [...]}` with literal strings.
    pub fn from_json(field: &Arc<Field>, v: &Json) -> Result<Surface> {
        let lit = |x: &Json| -> Result<Value> {
            let s = x
                .as_str()
                .ok_or_else(|| Error::Invalid("coefficients must be strings".into()))?;
            parse_value(field, s, ROOT_FLOOR)
        };
        let list = |key: &str| -> Result<Vec<Value>> {
            v.get(key)
                .and_then(Json::as_array)
                .ok_or_else(|| Error::Invalid(format!("missing array '{key}'")))?
                .iter()
                .map(lit)
                .collect()
        };
        match v.get("kind").and_then(Json::as_str) {
            Some("quadratic") => {
                let rows = v
                    .get("rows")
                    .and_then(Json::as_array)
                    .ok_or_else(|| Error::Invalid("missing array 'rows'".into()))?;
                let rows = rows
                    .iter()
                    .map(|r| {
                        let cs: Vec<Value> = r
                            .as_array()
                            .ok_or_else(|| Error::Invalid("rows must be arrays".into()))?
                            .iter()
                            .map(lit)
                            .collect::<Result<_>>()?;
                        <[Value; 6]>::try_from(cs).map_err(|cs| Error::DimensionMismatch {
                            expected: 6,
                            got: cs.len(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Surface::Quadratic(QuadraticSurface::new(field, rows)?))
            }
            Some("ppower") => Ok(Surface::PPower(PPowerSurface::new(field, list("b")?, list("c")?)?)),
            _ => Err(Error::Invalid("surface kind must be 'quadratic' or 'ppower'".into())),
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Surface::Quadratic(s) => s.to_json(),
            Surface::PPower(s) => s.to_json(),
        }
    }
}

/// `f(x,y) = b₁x² + b₂xy + b₃y² + (a₁+b₄)x + (a₂+b₅)y + (b₆−a_{n+1})`.
#[derive(Clone, Debug)]
pub struct ReducedForm {
    /// `b_k = Σ_{i≥3} a_i b_{i,k}`, `k = 1..6`.
    pub b: [Value; 6],
    /// `a₁ + b₄`.
    pub lx: Value,
    /// `a₂ + b₅`.
    pub ly: Value,
    /// `b₆ − a_{n+1}`.
    pub c: Value,
    /// All of `a₃..a_n` vanish.
    pub linear: bool,
}

impl ReducedForm {
    pub fn bipoly(&self) -> BiPoly {
        let mut f = BiPoly::zero(self.c.field());
        f.add_term(2, 0, &self.b[0]);
        f.add_term(1, 1, &self.b[1]);
        f.add_term(0, 2, &self.b[2]);
        f.add_term(1, 0, &self.lx);
        f.add_term(0, 1, &self.ly);
        f.add_term(0, 0, &self.c);
        f
    }
}

/// A curve `other = Σ coeffs[k]·free^k`.
#[derive(Clone, Debug)]
pub struct Graph {
    pub free: Var,
    pub coeffs: Vec<Value>,
}

impl Graph {
    pub fn vpoly(&self) -> VPoly {
        VPoly::new(self.coeffs[0].field(), self.coeffs.clone())
    }

    /// The point with free coordinate `t`.
    pub fn point(&self, t: &Value) -> (Value, Value) {
        let g = self.vpoly().eval(t);
        match self.free {
            Var::X => (t.clone(), g),
            Var::Y => (g, t.clone()),
        }
    }

    pub fn to_json(&self) -> Json {
        let dep = self.free.other().name();
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !vanishes(c))
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*{}", self.free.name()),
                _ => format!("({c})*{}^{k}", self.free.name()),
            })
            .collect();
        let rhs = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        json!({
            "free": self.free.name(),
            "equation": format!("{dep} = {rhs}"),
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub enum IntersectionClass {
    /// `f ≡ 0`: the surface lies in the hyperplane.
    ContainedInA,
    /// No points; `obstruction` is the quantity that has no root, if any.
    Empty {
        obstruction: Option<Value>,
    },
    /// The non-analytic points.
    FiniteSet(Vec<(Value, Value)>),
    /// `S ∩ A` is exactly this curve; `base` is a point on it when one was needed.
    Curve {
        graph: Graph,
        base: Option<(Value, Value)>,
    },
    /// `S ∩ A` is `{var = values[0]} ⊔ {var = values[1]}`.
    TwoCurves {
        var: Var,
        values: [Value; 2],
    },
    AtMostOnePoint,
    /// Every point of `S ∩ A` has a nonvanishing partial derivative.
    SmoothEverywhere,
}

impl IntersectionClass {
    pub fn tag(&self) -> &'static str {
        match self {
            IntersectionClass::ContainedInA => "ContainedInA",
            IntersectionClass::Empty { .. } => "Empty",
            IntersectionClass::FiniteSet(_) => "FiniteSet",
            IntersectionClass::Curve { .. } => "Curve",
            IntersectionClass::TwoCurves { .. } => "TwoCurves",
            IntersectionClass::AtMostOnePoint => "AtMostOnePoint",
            IntersectionClass::SmoothEverywhere => "SmoothEverywhere",
        }
    }

    pub fn parametrization_json(&self) -> Json {
        let pt = |(x, y): &(Value, Value)| json!([x.to_string(), y.to_string()]);
        match self {
            IntersectionClass::Empty { obstruction } => {
                json!({ "obstruction": obstruction.as_ref().map(|v| v.to_string()) })
            }
            IntersectionClass::FiniteSet(ps) => json!({ "points": ps.iter().map(pt).collect::<Vec<_>>() }),
            IntersectionClass::Curve { graph, base } => {
                json!({ "graph": graph.to_json(), "base": base.as_ref().map(pt) })
            }
            IntersectionClass::TwoCurves { var, values } => json!({
                "var": var.name(),
                "values": values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            }),
            _ => Json::Null,
        }
    }
}

/// One step `f_k → f_{k+1}` of the p-th root recursion.
#[derive(Clone, Debug)]
pub struct Stage {
    /// The constant `a_{4,k}` before the root is taken.
    pub constant: Value,
    /// Its p-th root `a_{4,k+1}`.
    pub root: Value,
    /// `f_k = f_{k+1}^p` was verified coefficient by coefficient.
    pub identity: bool,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub class: IntersectionClass,
    /// Which branch of the case analysis decided the class.
    pub case: &'static str,
    pub swaps: Vec<String>,
    /// The defining equation of `S ∩ A` in the original coordinates.
    pub f: BiPoly,
    /// The equation the class was decided on: `f` itself, or its
    /// `p^k`-th root after `k` root stages. Same zero set as `f`.
    pub reduced: BiPoly,
    pub stages: Vec<Stage>,
}

impl Classification {
    pub fn to_json(&self) -> Json {
        json!({
            "class": self.class.tag(),
            "case": self.case,
            "equation": self.f.to_string(),
            "reduced": self.reduced.to_string(),
            "parametrization": self.class.parametrization_json(),
            "swaps": self.swaps,
            "stages": self.stages.iter().map(|s| json!({
                "constant": s.constant.to_string(),
                "root": s.root.to_string(),
                "identity": s.identity,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Class of a linear equation `lx·x + ly·y + c = 0`.
pub(crate) fn linear_class(lx: &Value, ly: &Value, c: &Value) -> Result<IntersectionClass> {
    if lx.is_zero()? && ly.is_zero()? {
        return Ok(if c.is_zero()? {
            IntersectionClass::ContainedInA
        } else {
            IntersectionClass::Empty {
                obstruction: Some(c.clone()),
            }
        });
    }
    let (free, lead, other) = if !ly.is_zero()? {
        (Var::X, ly, lx)
    } else {
        (Var::Y, lx, ly)
    };
    let inv = lead.inv()?;
    let graph = Graph {
        free,
        coeffs: vec![c.neg().mul(&inv), other.neg().mul(&inv)],
    };
    Ok(IntersectionClass::Curve { graph, base: None })
}

/// Total order used to list roots deterministically.
pub(crate) fn value_cmp(a: &Value, b: &Value) -> Ordering {
    a.deg_upper()
        .cmp(&b.deg_upper())
        .then_with(|| a.to_string().cmp(&b.to_string()))
}
