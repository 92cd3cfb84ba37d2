use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{json_error, read_text, write_text, FORMAT_VERSION};
use crate::basis::{BasisFamily, BasisKind};
use crate::error::{Error, Result};
use crate::learning::{Gains, LearnedPrimitive};
use crate::trajectory::MovementKind;

/// On-disk form of a [`LearnedPrimitive`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveFile {
    pub format_version: u32,
    pub kind: MovementKind,
    pub n: usize,
    #[serde(rename = "N")]
    pub n_basis: usize,
    pub alpha_z: f64,
    pub beta_z: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_s: Option<f64>,
    pub tau_demo: f64,
    pub goal_demo: Vec<f64>,
    pub basis_centers: Vec<f64>,
    pub basis_widths: Vec<f64>,
    /// `n` rows of `N` weights.
    pub weights: Vec<Vec<f64>>,
}

impl From<&LearnedPrimitive> for PrimitiveFile {
    fn from(p: &LearnedPrimitive) -> Self {
        PrimitiveFile {
            format_version: FORMAT_VERSION,
            kind: p.kind,
            n: p.dim(),
            n_basis: p.n_basis(),
            alpha_z: p.gains.alpha_z,
            beta_z: p.gains.beta_z,
            alpha_s: p.alpha_s,
            tau_demo: p.tau_demo,
            goal_demo: p.goal_demo.iter().copied().collect(),
            basis_centers: p.basis.centers().to_vec(),
            basis_widths: p.basis.widths().to_vec(),
            weights: p.weights.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
    }
}

impl TryFrom<PrimitiveFile> for LearnedPrimitive {
    type Error = Error;

    fn try_from(f: PrimitiveFile) -> Result<Self> {
        if f.format_version != FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: f.format_version,
                expected: FORMAT_VERSION,
            });
        }
        let check = |what: &str, len: usize, want: usize| {
            if len == want {
                Ok(())
            } else {
                Err(Error::Schema(format!("{what} has length {len}, expected {want}")))
            }
        };
        check("goal_demo", f.goal_demo.len(), f.n)?;
        check("basis_centers", f.basis_centers.len(), f.n_basis)?;
        check("basis_widths", f.basis_widths.len(), f.n_basis)?;
        check("weights", f.weights.len(), f.n)?;
        for (i, row) in f.weights.iter().enumerate() {
            check(&format!("weights[{i}]"), row.len(), f.n_basis)?;
        }
        let basis_kind = match f.kind {
            MovementKind::Discrete => BasisKind::Gaussian,
            MovementKind::Rhythmic => BasisKind::VonMises,
        };
        let basis = BasisFamily::from_parts(basis_kind, f.basis_centers, f.basis_widths)?;
        let weights = DMatrix::from_row_iterator(f.n, f.n_basis, f.weights.into_iter().flatten());
        LearnedPrimitive::new(
            f.kind,
            weights,
            basis,
            Gains::new(f.alpha_z, f.beta_z)?,
            f.alpha_s,
            f.tau_demo,
            DVector::from_vec(f.goal_demo),
        )
    }
}

pub fn primitive_to_string(prim: &LearnedPrimitive) -> String {
    let mut s = serde_json::to_string_pretty(&PrimitiveFile::from(prim)).expect("primitive file serializes");
    s.push('\n');
    s
}

/// Parses primitive JSON. `path` is only used in messages.
pub fn parse_primitive(text: &str, path: &Path) -> Result<LearnedPrimitive> {
    let file: PrimitiveFile = serde_json::from_str(text).map_err(|e| json_error(path, text, &e))?;
    LearnedPrimitive::try_from(file)
}

pub fn save_primitive(prim: &LearnedPrimitive, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &primitive_to_string(prim))
}

pub fn load_primitive(path: impl AsRef<Path>) -> Result<LearnedPrimitive> {
    let path = path.as_ref();
    parse_primitive(&read_text(path)?, path)
}
