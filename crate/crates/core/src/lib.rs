//! Numerical models of two radical operator algebras: the algebra generated
//! by a weighted shift, truncated to `N x N` matrices, and the algebra
//! generated by the Volterra operator, discretized on a uniform grid.
//!
//! The crate is organised bottom-up:
//!
//! * [`numkit`] dense and Toeplitz complex matrices, operator 2-norms with an
//!   independent Jacobi SVD oracle, circle quadrature and bracketing roots.
//! * [`gauge`] conjugation by diagonal unitaries, operator Fourier
//!   coefficients, Fejér sums and certificates that no gauge action exists.
//! * [`shift`] weight families and the truncated shift algebra.
//! * [`volterra`] sampled convolution kernels and the discretized `V_f`.
//! * [`report`] and [`experiment`] labelled results and the experiment
//!   dispatcher used by the `opalg` command line tool.

pub mod error;
pub mod experiment;
pub mod gauge;
pub mod numkit;
pub mod report;
pub mod shift;
pub mod volterra;

pub use error::{Error, Result};
pub use numkit::{CircleGrid, ComplexMatrix, RootSolve, Structure, C64};
pub use report::ExperimentReport;
