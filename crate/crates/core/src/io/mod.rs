//! Integral files and result tables.

pub mod fcidump;
pub mod table;

pub use fcidump::{read_fcidump, write_fcidump, FcidumpError, FcidumpHeader};
pub use table::{emit_results, parse_results, OutputFormat, ResultRow, TableError, TableRow};
