//! Problem files, the analysis commands and their reports.

pub mod commands;
pub mod problem;
pub mod report;
pub mod syntax;

pub use commands::{run, run_problem, BalanceChoice, CommandKind, FluxForm, Mode, Options};
pub use problem::{FrontendError, Problem};
pub use report::{Document, Status};
