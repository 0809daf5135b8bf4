//! Command-line front end: problem files, reports and plot series.

pub mod app;
pub mod problem;
pub mod report;
pub mod series;
