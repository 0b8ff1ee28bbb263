//! Farey-Brocot staircases: exact Farey-tree arithmetic, continued-fraction diagnostics, the
//! modular word calculus, Ising and critical circle-map staircases, the Cantor dust left by
//! their steps, its multifractal spectrum and self-similarity regressions.

pub mod contfrac;
pub mod error;
pub mod exec;
pub mod farey;
pub mod hyperwords;
pub mod omega;
pub mod selfsim;
pub mod spectrum;
pub mod staircase;
pub mod table;

pub use error::{Error, Result};
pub use exec::Executor;
pub use farey::{FareyInterval, Fraction};
