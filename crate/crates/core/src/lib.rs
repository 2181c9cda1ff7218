pub mod basis;
pub mod expr;
pub mod kernel;
pub mod linalg;
pub mod polynomial;
pub mod quadrature;
pub mod smooth;
