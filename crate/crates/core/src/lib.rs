//! Numerical toolkit for p-ellipticity of complex accretive matrices.
//!
//! * [`realform`]: identification of complex vectors and matrices with real ones.
//! * [`ellipticity`]: `lambda`, `Lambda`, `nu`, `Delta_p`, `mu` and `W_p`.
//! * [`bellman`]: power-function Hessians and the Bellman function `Q`.
//! * [`field`]: grids, discrete operators, dissipativity and heat flows.
//! * [`heatnorm`]: the sharp `L^p` norm of the complex-time heat semigroup.

pub mod bellman;
pub mod ellipticity;
pub mod error;
pub mod field;
pub mod heatnorm;
pub mod optim;
pub mod realform;

pub use error::{Error, Result};
