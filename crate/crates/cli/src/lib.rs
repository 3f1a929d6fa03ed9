//! File formats, seeded instances and the experiment harness behind the
//! `jacobi` command.

pub mod config;
pub mod experiment;
pub mod history;
pub mod instances;
pub mod io;
pub mod predict;
pub mod solver;
