//! High-precision evaluation of the naive integral `J0(tau)`: direct
//! quadrature, contour quadrature through its saddle points, and
//! generalized Perron asymptotic expansions.

pub mod asymptotic;
pub mod bigcomplex;
pub mod contour;
pub mod error;
pub mod perron;
pub mod poly;
pub mod quadrature;
pub mod reference;
pub mod saddle;
pub mod series;
pub mod theta;

pub use bigcomplex::{BigComplex, Precision};
pub use error::{Error, Result};
pub use quadrature::{Integrator, QuadratureResult};
pub use series::{HalfExp, PuiseuxSeries};
pub use saddle::{solve_saddles, SaddleSet, Which};
