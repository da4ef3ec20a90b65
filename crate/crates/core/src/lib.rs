//! Truncated Fock-space states of bosonic modes, exact normal-ordered moments,
//! and a family of moment inequalities whose violation certifies entanglement.
//!
//! ```
//! use fockwit::{criteria, states};
//!
//! let bell = states::gen_bell01(&[2, 2]).unwrap();
//! let r = criteria::criterion_lsum(&bell, criteria::DEFAULT_TOLERANCE).unwrap();
//! assert!(r.detected);
//! ```

pub mod criteria;
pub mod error;
pub mod fock;
pub mod moments;
pub mod operators;
pub mod par;
pub mod ppt;
pub mod report;
pub mod sampler;
pub mod state_file;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
pub use fock::{FockBasisIndex, FockState, GuardBandReport, Layout, StateData};
pub use num_complex::Complex64;
pub use operators::{HermitianCombination, ModePowers, OperatorMonomial, OperatorSum};
