//! Numerical differential geometry of neural-network decision boundaries.
//!
//! Given a smooth binary classifier `f`, the boundary is the zero level set
//! of `f`. This crate computes its curvature in closed form from exact
//! derivatives of `f`, extracts it as explicit geometry (polylines in 2D,
//! triangle meshes in 3D), integrates Gaussian curvature to obtain the Euler
//! characteristic, evaluates the intrinsic tensor chain (metric, Christoffel
//! symbols, Riemann tensor, curvature 2-form, Euler-form density) for
//! boundaries of dimension up to four, and checks or constructs weight
//! conditions that force flat or developable boundaries.

pub mod curvature;
pub mod derivatives;
pub mod error;
pub mod field;
pub mod flatness;
pub mod levelset;
pub mod mesh;
pub mod network;
pub mod pipeline;
pub mod riemann;
pub mod tensor;
pub mod topology;

pub use error::{Error, Result};
