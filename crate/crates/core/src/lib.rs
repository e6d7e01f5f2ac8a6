//! Exact simulation of `N` particles whose electronic (`a`) and phonon (`b`)
//! modes couple to one shared cavity mode (`c`) through the three-body
//! vertex `g (b + b†)(a c† + a† c)`, together with the approximate closed
//! rate equations for the collective moments `m`, `k1` and `k2`.
//!
//! The exact truncated-Fock-space simulator doubles as an oracle for the
//! rate equations: [`dynamics::exact_rate`] evaluates `⟨-i[A, H]⟩`
//! algebraically, and [`experiments`] compares, sweeps and validates.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory, one per
//! capability:
//!
//! ```bash
//! cargo run --release --example operator_algebra
//! cargo run --release --example collective_scaling
//! ```

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod guard;
pub mod model;
pub mod moments;
pub mod rng;
pub mod sparse;
pub mod states;

pub use error::{Error, Result};
pub use fock::{expectation, lowering_op, make_space, number_op, HilbertSpace, ModeId, ModeSpec, Operator, StateVector};
pub use model::{build_interaction_hamiltonian, build_observable, ModeDims, ModelOperators, ModelParams, ObservableKind};
pub use states::{build_state, StateRecipe};
