//! Simulation and mapping toolkit for soft growing ("vine") robots in 2D
//! polygonal environments.
//!
//! A vine robot lengthens by everting material at its tip and steers
//! passively: collisions bend it at localized pivot points and the tip
//! slides along walls. This crate models that behavior end to end:
//!
//! - [`geometry`]: planar primitives, polygon offsetting, visibility
//!   predicates.
//! - [`kinematics`]: closed-form contact mechanics and the four
//!   post-collision morphologies of a robot with one discrete turn.
//! - [`environment`] and [`visibility`]: polygonal scenes and the
//!   visibility graphs all deformed robot paths follow.
//! - [`simulator`]: deployment simulation producing the final robot shape,
//!   contacted walls, and swept area.
//! - [`sensing`]: inversion of the kinematics, reconstructing walls and
//!   pivots from tip sensor streams of (length, contact angle).
//! - [`mapping`]: occupancy-grid beliefs, scoring, Monte Carlo environment
//!   sampling, and sequential deployment planning.

pub mod environment;
pub mod geometry;
pub mod kinematics;
pub mod mapping;
pub mod sensing;
pub mod simulator;
pub mod visibility;

#[cfg(any(test, feature = "testing"))]
pub mod testing;

pub use environment::{Environment, LaunchPoint};
pub use geometry::{Bounds, Point2, Polygon, Segment};
pub use kinematics::{ContactGeometry, Morphology, TubeParams};


pub use simulator::{DeploymentAction, DeploymentResult, RobotShape, Termination};
