//! Equilibrium analysis for a single middleman who runs a two-sided
//! platform and may perceive her position as contested.
//!
//! - [`game`]: strategy profiles, grids and brute-force equilibrium oracles
//! - [`hedonic`]: benefit and income families and the resulting payoffs
//! - [`ambiguity`]: neo-additive beliefs and the full-exploitation verdict
//! - [`activity`]: the activity-weighted income case and its benchmark region
//! - [`scenario`] and [`report`]: configuration files and result documents
//! - [`cli`]: the `contest` command-line tool

pub mod activity;
pub mod ambiguity;
pub mod cli;
pub mod error;
pub mod game;
pub mod hedonic;
pub mod report;
pub mod scenario;
pub mod table;

pub use error::{Error, Result};
