//! Single-server private linear transformation (PLT) with joint privacy.
//!
//! A server stores `K` messages (rows of `X` over `F_q`). A user wants
//! `L` independent linear combinations `Z = V X_W` of `D` of them and
//! must hide the support `W` and the coefficients `V` jointly. The
//! protocols here download `K - D + L` coded rows, which matches the
//! capacity `L / (K - D + L)`:
//!
//! * [`protocols::jplt1_query`] / [`protocols::jplt1_grs_query`]: the
//!   coefficient matrix is MDS; the query generates an MDS code extended
//!   from the dual of `V`.
//! * [`protocols::jplt2_query`]: `V` only has full row rank; the query is
//!   a scrambled stack of the demand rows and a `[K, K-D]` MDS code.
//!
//! [`verify`] holds brute-force checks of recoverability and the joint
//! privacy structure; [`net`] runs the query/answer exchange over TCP.

pub mod codes;
pub mod error;
pub mod files;
pub mod fixtures;
pub mod gf;
pub mod matrix;
pub mod net;
pub mod protocols;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use gf::{FieldElement, PrimeField};
pub use matrix::{Matrix, RrefResult};
