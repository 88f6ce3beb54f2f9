//! The weighted CR sphere model: weights, points, contact/Levi data,
//! quadrature and orbifold integration.

pub mod levi;
pub mod model;
pub mod orbifold;
pub mod point;
pub mod quad;
pub mod weights;

pub use levi::{levi_data, levi_data_fd, LeviData};
pub use model::{make_sphere, ContactResiduals, ModelSpace, SUPPORT_THRESHOLD};
pub use orbifold::{dual_atlas_integral, orbifold_integrate, CyclicQuotient, OrbifoldAtlas};
pub use point::SpherePoint;
pub use quad::{geometric_integral, IntegralEstimate, QuadMethod, QuadratureSpec};
pub use weights::{Stratification, WeightVector};
