pub mod approx;
pub mod construct;
pub mod contfrac;
pub mod degree;
pub mod error;
pub mod field;
pub mod intersect;
pub mod laurent;
pub mod parse;
pub mod poly;
pub mod samples;
pub mod selftest;
pub mod value;

pub use degree::{Deg, NEG_INF};
pub use error::{Error, Result};
pub use field::{Elem, Field, FieldElem};
pub use laurent::Laurent;
pub use poly::{Poly, RationalFn};
pub use value::Value;
