//! Translating solitons to mean curvature flow in the upper half-space model
//! of hyperbolic space, and a method-of-lines solver for rotationally
//! symmetric radial graphs over the totally geodesic hemisphere.
//!
//! The numerical modules are generic over the scalar type (see [`Real`]);
//! the aliases below fix it to `f64`.

pub mod error;
pub mod flow;
pub mod geometry;
pub mod ode;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use geometry::{Dimension, ProfileKind};
pub use scalar::Real;

pub type ProfilePoint = geometry::ProfilePoint<f64>;
pub type ProfileCurve = geometry::ProfileCurve<f64>;
pub type IntegratorControls = ode::IntegratorControls<f64>;
pub type CatenoidProfile = ode::CatenoidProfile<f64>;
pub type GrimReaperProfile = ode::GrimReaperProfile<f64>;
pub type HemisphereGrid = flow::HemisphereGrid<f64>;
pub type RadialGraphState = flow::RadialGraphState<f64>;
pub type FlowControls = flow::FlowControls<f64>;
pub type Perturbation = stability::Perturbation<f64>;
pub type StabilityReport = stability::StabilityReport<f64>;
