//! SKA-SGD: stochastic gradient descent accelerated by projecting gradients
//! onto a low-dimensional Krylov subspace, with the projection coefficients
//! obtained from a streaming Gauss-Seidel solve of the regularized Gram
//! system. Includes SGD / Nesterov / Adam baselines, synthetic
//! ill-conditioned quadratic and logistic problem generators, and a
//! multi-seed experiment harness with CSV/SVG output.

pub mod basis;
pub mod error;
pub mod gram;
pub mod harness;
pub mod numerics;
pub mod optim;
pub mod oracle;
pub mod problems;
pub mod verify;

pub use error::{Error, Result};
