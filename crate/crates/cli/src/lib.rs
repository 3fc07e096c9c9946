//! Command-line front end for `gxwt-core`: text grid files, SVG heatmaps and
//! the `gxwt` subcommands.

pub mod app;
pub mod gridfile;
pub mod svg;

pub use app::run;
