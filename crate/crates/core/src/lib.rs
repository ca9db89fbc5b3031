//! Reduction of the Dirac equation in an electromagnetic field to a single
//! fourth-order equation for one spinor component, and reconstruction of the
//! full spinor from that component.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: 4×4 complex kernels, spinors and co-spinors.
//! * [`clifford`]: gamma-matrix representations, charge conjugation, chiral bases.
//! * [`emfield`]: analytic potentials, the field tensor and the spinor field matrix.
//! * [`gridops`]: spacetime grids, stencils and the differential operators.
//! * [`evolver`]: Crank–Nicolson reference solutions in 1+1 dimensions.
//! * [`reduction`]: the one-component equation and the reconstruction pipeline.
//!
//! Stencil loops run on rayon when the `parallel` feature is enabled (the
//! default) and sequentially otherwise; both paths produce identical bits.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod clifford;
pub mod emfield;
pub mod error;
pub mod evolver;
pub mod gridops;
pub mod linalg;
pub mod par;
pub mod reduction;

pub use error::{Error, Result};
pub use linalg::{CoSpinor, Mat4, Spinor};
