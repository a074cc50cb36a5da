pub mod appendix;
pub mod closed;
pub mod constants;
pub mod energy;
pub mod error;
pub mod eta;
pub mod planar;
pub mod quadrature;
pub mod qvalue;
pub mod specfun;
pub mod sphere;

pub use energy::{EnergyUnit, EnergyValue, Geometry, Length};
pub use error::{Error, Result};
pub use eta::Eta;
pub use qvalue::QValue;
