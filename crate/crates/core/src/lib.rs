//! Solitary waves of the McKean-FitzHugh-Nagumo system with a Cattaneo
//! relaxation time `tau`:
//!
//! ```text
//! tau u_tt + u_t = u_xx + H(u - a) - u - w,    w_t = b u - d w
//! ```
//!
//! Traveling waves `u(x + ct)` are piecewise exponential and known in closed
//! form. This crate builds them ([`profile`]), traces the threshold-speed
//! relation ([`speed`]), decides spectral stability through an explicit Evans
//! function ([`evans`]) and cross-checks by direct simulation ([`pde`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod error;
pub mod evans;
pub mod io;
pub mod numeric;
pub mod pde;
pub mod poly;
pub mod profile;
pub mod speed;

pub use error::{Error, Result};
