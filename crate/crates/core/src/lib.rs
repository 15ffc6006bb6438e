//! Scheduling one-period arc outages in a flow network so that the total
//! s-t throughput over the planning horizon is as large as possible.

pub mod approx;
pub mod bench;
pub mod dispatch;
pub mod error;
pub mod flow;
pub mod generators;
pub mod io;
pub mod k2;
pub mod model;
pub mod oracle;
pub mod spdp;
pub mod sptree;

pub use error::{Error, Result};
