//! First-order solvers for regularized convex problems `min F(Kx) + λ G(x)`.
//!
//! The crate provides:
//!
//! * dense linear algebra and linear operators with spectral-norm estimation ([`linalg`], [`operator`]),
//! * proximal operators and convex conjugates for common losses and regularizers ([`prox`]),
//! * Fobos, FISTA, the Chambolle-Pock primal-dual method and its adaptive online variant ([`solvers`]),
//! * builders for six machine-learning problems in saddle and composite form ([`problems`]),
//! * parsers for LIBSVM, MovieLens and idx image files ([`dataio`]).

pub mod dataio;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod operator;
pub mod problems;
pub mod prox;
pub mod solvers;

pub use error::{Error, Result};
pub use forms::{CompositeProblem, SaddleProblem};
pub use linalg::DenseMatrix;
pub use operator::{estimate_norm, LinearOperator};
pub use prox::ProxFn;
