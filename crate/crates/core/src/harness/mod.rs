//! Configuration files, ladder runs, CSV tables, exponent fits and plots
//! behind the `frostlab` command line.

mod config;
mod io;
mod run;
mod svg;
mod table;

pub use config::{Experiment, ExperimentConfig, SQUARE_CAP_M, TRIPLE_CAP_M};
pub use io::{escape_label, parse_set, parse_shading, unescape_label, write_set, write_set1d, write_set2d, write_shading, SetFile};
pub use run::{incidence_report, init_threads, run, RunOutcome};
pub use svg::{render, Plot};
pub use table::{fit_table, Table};
