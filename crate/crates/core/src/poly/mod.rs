//! Exact symbolic engine: rationals, Laurent polynomials in one radial
//! symbol, trig-bearing expressions, parsing and Taylor expansion.

pub mod expr;
pub mod monomial;
pub mod parse;
pub mod polynomial;
pub mod symbol;
pub mod taylor;
pub mod trig;
pub mod value;

pub use expr::{Affine, Expr};
pub use monomial::Monomial;
pub use parse::{parse_expression, parse_polynomial};
pub use polynomial::Polynomial;
pub use symbol::{Role, Roles, Symbol};
pub use taylor::{taylor_expand, Expansion, TrigConstant};
pub use trig::{trig_normalize, Harmonic, TrigSeries};
pub use value::{parse_rational, q, qf, Point, Value, Q};
