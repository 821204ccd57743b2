//! Entanglement geometry of multipartite tensor states.
//!
//! Smoke scaffold; modules land incrementally.

pub mod bracket;
pub mod error;
pub mod injective;
pub mod linalg;
pub mod projective;
pub mod space;
pub mod state;
