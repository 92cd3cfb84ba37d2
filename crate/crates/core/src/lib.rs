//! Movement primitives as stable dynamical systems.
//!
//! Demonstrations are encoded as the forcing input of a critically damped
//! second-order transformation system, driven by a decaying phase (discrete
//! movements) or an oscillator phase (rhythmic movements). Learned primitives
//! can be scaled, rotated, offset and retimed, blended in parallel or in
//! sequence, and checked with numerical contraction certificates.
//!
//! ```
//! use movprim::io::synth::{synth_demo, Shape};
//! use movprim::learning::{learn_primitive, LearningParams};
//! use movprim::transform::{rollout_primitive, ModulatedPrimitive, Modulation};
//! use std::sync::Arc;
//!
//! let demo = synth_demo(Shape::MinJerk, 400, 1.0, 1.0)?;
//! let learned = learn_primitive(&demo, &LearningParams::default())?;
//! let prim = Arc::new(learned.primitive);
//! let leaf = ModulatedPrimitive::new(prim.clone(), Modulation::identity(prim.dim()).with_spatial_scale(2.0))?;
//! let traj = rollout_primitive(&leaf, 1.0, 1e-3)?;
//! assert!((traj.last_position()[0] - 2.0).abs() < 0.05);
//! # Ok::<(), movprim::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod canonical;
pub mod cli;
pub mod combine;
pub mod contraction;
pub mod error;
pub mod io;
pub mod learning;
pub mod numeric;
pub mod trajectory;
pub mod transform;

pub use error::{Error, Result};
pub use trajectory::{Demonstration, MovementKind, Trajectory};
