//! Quadratic Dirichlet L-functions over F_q(T) and the orders of the K2
//! groups they control, computed in exact arithmetic, together with
//! brute-force experiments for the mean value of #K2(O_D) over monic
//! squarefree discriminants of odd degree.

pub mod error;
pub mod euler;
pub mod field;
pub mod lab;
pub mod lfunc;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod symbol;

pub use error::{Error, Result};
pub use euler::{
    euler_c2, euler_p, main_term_andrade, main_term_rosen, Approx, ProductKind, TruncatedProduct,
};
pub use field::{legendre_const, ArithKind, FieldElement, FieldSpec};
pub use lfunc::{
    fe_check, k2_order, k2_order_any, l_polynomial, l_polynomial_any, l_polynomial_with, l_value, rh_check,
    zeta_a, LPolynomial, SymbolPath,
};
pub use poly::{format_poly, parse_poly, poly_arith, Poly, PolyOp, PolyValue};
pub use rational::Rational;
pub use symbol::{build_char_table, kronecker, kronecker_oracle, scalar_char, CharTable};
