//! Command-line front end: scenario runs, sweeps, point classification and
//! the invariant self-test.

pub mod app;
pub mod config;
pub mod run;
pub mod selfcheck;
pub mod table;
