//! File formats: demonstration CSV, primitive and combination JSON,
//! trajectory CSV export and synthetic demonstrations.

mod combo_file;
mod demo;
mod export;
mod primitive_file;
pub mod report;
pub mod synth;

use std::path::Path;

use crate::error::Error;

pub use combo_file::{
    load_combination, parse_combination, ComboFile, LeafSpec, ModulationSpec, NodeSpec, RotationSpec, ScheduleSpec,
};
pub use demo::{load_demonstration, parse_demonstration, save_demonstration, write_demonstration};
pub use export::{export_trajectory, gnuplot_script, write_trajectory};
pub use primitive_file::{load_primitive, parse_primitive, primitive_to_string, save_primitive, PrimitiveFile};

/// Version written to and required of every JSON file.
pub const FORMAT_VERSION: u32 = 1;

/// Converts a JSON error into [`Error::Parse`] with a byte offset into `text`.
fn json_error(path: &Path, text: &str, err: &serde_json::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        offset: byte_offset(text, err.line(), err.column()),
        message: err.to_string(),
    }
}

/// Byte offset of a 1-based `(line, column)` position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

fn read_text(path: &Path) -> crate::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> crate::Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
