//! Effective coupling graphs on fixed-frequency transmon lattices.
//!
//! Builds truncated Bose-Hubbard Hamiltonians, reduces them to effective
//! single-walker models, simulates walks and Floquet bridges, and plans
//! embeddings of target graphs onto a device.
//!
//! Frequencies are linear MHz ([`units::Frequency`]); matrices handed to the
//! propagators are angular (rad/us), times are us.

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod effective;
pub mod floquet;
pub mod error;
pub mod graphs;
pub mod hamiltonian;
pub mod linalg;
pub mod model;
pub mod units;
pub mod weaver;

pub use error::{Result, WeaveError};
pub use model::{CouplerSpec, DeviceLattice, Qubit, TargetGraph, TransmonSpec, WalkSpeed};
pub use units::Frequency;
