use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::trajectory::{Demonstration, MovementKind};

/// Column layout of a demonstration CSV: `t,y1..yn[,v1..vn[,a1..an]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layout {
    dim: usize,
    blocks: usize,
}

fn parse_header(header: &csv::StringRecord) -> std::result::Result<Layout, String> {
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names.first() != Some(&"t") {
        return Err(format!(
            "first column must be `t`, got {:?}",
            names.first().unwrap_or(&"")
        ));
    }
    let dim = names[1..].iter().take_while(|c| c.starts_with('y')).count();
    if dim == 0 {
        return Err("no position columns".into());
    }
    let rest = names.len() - 1;
    if !rest.is_multiple_of(dim) || rest / dim > 3 {
        return Err(format!(
            "expected 1 + {dim}, 1 + {} or 1 + {} columns, got {}",
            2 * dim,
            3 * dim,
            names.len()
        ));
    }
    let layout = Layout {
        dim,
        blocks: rest / dim,
    };
    for (b, prefix) in ["y", "v", "a"].iter().enumerate().take(layout.blocks) {
        for i in 0..dim {
            let want = format!("{prefix}{}", i + 1);
            let got = names[1 + b * dim + i];
            if got != want {
                return Err(format!("column {} must be `{want}`, got `{got}`", 2 + b * dim + i));
            }
        }
    }
    Ok(layout)
}

/// Reads a demonstration CSV from `reader`. `path` is only used in messages.
///
/// Missing velocity and acceleration columns are filled in by central
/// differences; the result is normalized to start at `t = 0` at the origin.
pub fn parse_demonstration<R: Read>(reader: R, kind: MovementKind, path: &Path) -> Result<Demonstration> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let layout = parse_header(&header).map_err(|m| Error::InvalidDemonstration(format!("{}: {m}", path.display())))?;

    let mut times = Vec::new();
    let mut blocks: Vec<Vec<DVector<f64>>> = vec![Vec::new(); layout.blocks];
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let values = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.trim().parse::<f64>().map_err(|e| {
                    Error::InvalidDemonstration(format!(
                        "{}: row {}, column {}: {e} ({field:?})",
                        path.display(),
                        row + 2,
                        col + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        times.push(values[0]);
        for (b, block) in blocks.iter_mut().enumerate() {
            let start = 1 + b * layout.dim;
            block.push(DVector::from_column_slice(&values[start..start + layout.dim]));
        }
    }

    let mut blocks = blocks.into_iter();
    let positions = blocks.next().unwrap_or_default();
    match (blocks.next(), blocks.next()) {
        (None, _) => Demonstration::from_positions(kind, times, positions),
        (Some(vel), None) => Demonstration::from_positions_velocities(kind, times, positions, vel),
        (Some(vel), Some(acc)) => Demonstration::new(kind, times, positions, vel, acc),
    }
}

pub fn load_demonstration(path: impl AsRef<Path>, kind: MovementKind) -> Result<Demonstration> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_demonstration(std::io::BufReader::new(file), kind, path)
}

/// Writes all columns `t,y..,v..,a..` of a demonstration.
pub fn write_demonstration<W: Write>(demo: &Demonstration, mut out: W) -> std::io::Result<()> {
    let n = demo.dim();
    let mut header = vec!["t".to_string()];
    for prefix in ["y", "v", "a"] {
        header.extend((1..=n).map(|i| format!("{prefix}{i}")));
    }
    writeln!(out, "{}", header.join(","))?;
    for k in 0..demo.len() {
        let mut fields = vec![format!("{:.16e}", demo.times()[k])];
        for block in [demo.positions(), demo.velocities(), demo.accelerations()] {
            fields.extend(block[k].iter().map(|v| format!("{v:.16e}")));
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn save_demonstration(demo: &Demonstration, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_demonstration(demo, &mut buf).map_err(|e| Error::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}
