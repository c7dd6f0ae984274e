//! Autonomy stack for a heterogeneous firefighting robot team.

pub mod coordination;
pub mod executive;
pub mod fire;
pub mod geometry;
pub mod mcl;
pub mod planner;
pub mod sim;
pub mod world_model;

pub use geometry::{Pose, Vec3};
