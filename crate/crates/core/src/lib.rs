//! Threshold (THRESH) rounding schemes for MAX DI-CUT and MAX 2-AND.
//!
//! The crate evaluates piecewise-linear threshold schemes on SDP
//! configurations, discovers schemes through a zero-sum game between
//! configurations and rounding functions, certifies approximation ratios with
//! interval arithmetic, and reproduces hardness distributions for the
//! matching upper bounds.

pub mod analytic;
pub mod config;
pub mod engine;
pub mod error;
pub mod game;
pub mod gauss;
pub mod interval;
pub mod lp;
pub mod optim;
pub mod scheme;
pub mod verify;

pub use error::{Error, Result};
