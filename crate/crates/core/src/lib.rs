//! Quaternionic spinor machinery: biquaternion algebra, spinor velocity fields,
//! Dirac/Pauli residual checks, stochastic spiral geodesics and fractal
//! hyperhelix curves.

pub mod dynamics;
pub mod error;
pub mod fd;
pub mod geodesic;
pub mod hyperhelix;
pub mod quaternion;
pub mod spinor_field;
pub mod velocity;

pub use error::{Error, Result};
pub use quaternion::{Biquaternion, Quaternion, SymplecticPair, C64};
pub use spinor_field::{Constants, CtSpinor, PlaneWaveTerm, SpacetimePoint, SpinorField};
