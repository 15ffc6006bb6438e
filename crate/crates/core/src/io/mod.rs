//! File formats: instances, schedules and the LP export.

mod format;
mod lp;

pub use format::{parse_instance, parse_schedule, print_instance, print_schedule, ParseError};
pub use lp::{build_lp, enumerate_y_optimum, evaluate_fixed_y, export_lp, write_lp, LpModel, Row, RowKind, Sense, Var};
