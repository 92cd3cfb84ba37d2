use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{json_error, load_primitive, read_text, FORMAT_VERSION};
use crate::combine::{validate_combination, ActivationSchedule, CombinationNode};
use crate::error::{Error, Result};
use crate::learning::LearnedPrimitive;
use crate::transform::{rotation_2d, rotation_3d, ModulatedPrimitive, Modulation};

/// On-disk combination tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComboFile {
    pub format_version: u32,
    pub root: NodeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum NodeSpec {
    Leaf(LeafSpec),
    Parallel {
        weights: Vec<f64>,
        children: Vec<NodeSpec>,
    },
    Sequential {
        offsets: Vec<f64>,
        /// One per child; omitted to use the default crossfades.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schedules: Option<Vec<ScheduleSpec>>,
        children: Vec<NodeSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeafSpec {
    /// Primitive file, relative to the combination file's directory.
    pub primitive: PathBuf,
    #[serde(default)]
    pub modulation: ModulationSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSpec {
    #[serde(default = "one")]
    pub kappa_s: f64,
    #[serde(default = "one")]
    pub kappa_t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_off: Option<Vec<f64>>,
    #[serde(default)]
    pub t_off: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

impl Default for ModulationSpec {
    fn default() -> Self {
        ModulationSpec {
            kappa_s: 1.0,
            kappa_t: 1.0,
            rotation: None,
            y_off: None,
            t_off: 0.0,
            y0: None,
        }
    }
}

/// Planar angle, or axis and angle in three dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSpec {
    pub angle_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
}

/// Activation knots; `t3`/`t4` default to never switching off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub t1: f64,
    pub t2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t4: Option<f64>,
}

impl ModulationSpec {
    fn build(&self, dim: usize) -> Result<Modulation> {
        let vector = |name: &'static str, v: &Option<Vec<f64>>| -> Result<DVector<f64>> {
            match v {
                None => Ok(DVector::zeros(dim)),
                Some(v) if v.len() == dim => Ok(DVector::from_column_slice(v)),
                Some(v) => Err(Error::Schema(format!("{name} has length {}, expected {dim}", v.len()))),
            }
        };
        let rotation = match (&self.rotation, dim) {
            (None, _) => DMatrix::identity(dim, dim),
            (Some(RotationSpec { angle_deg, axis: None }), 2) => rotation_2d(*angle_deg),
            (Some(RotationSpec { angle_deg, axis: Some(axis) }), 3) => rotation_3d(*axis, *angle_deg)?,
            (Some(r), _) => {
                return Err(Error::Schema(format!(
                    "rotation {r:?} does not fit a {dim}-dimensional primitive (2-D takes angle_deg, 3-D takes axis and angle_deg)"
                )))
            }
        };
        Ok(Modulation {
            kappa_s: self.kappa_s,
            kappa_t: self.kappa_t,
            rotation,
            y_off: vector("y_off", &self.y_off)?,
            t_off: self.t_off,
            y0: vector("y0", &self.y0)?,
        })
    }
}

struct Builder<'a> {
    base: &'a Path,
    cache: HashMap<PathBuf, Arc<LearnedPrimitive>>,
}

impl Builder<'_> {
    fn primitive(&mut self, rel: &Path) -> Result<Arc<LearnedPrimitive>> {
        let path = self.base.join(rel);
        if let Some(p) = self.cache.get(&path) {
            return Ok(Arc::clone(p));
        }
        let p = Arc::new(load_primitive(&path)?);
        self.cache.insert(path, Arc::clone(&p));
        Ok(p)
    }

    fn node(&mut self, spec: &NodeSpec) -> Result<CombinationNode> {
        match spec {
            NodeSpec::Leaf(leaf) => {
                let prim = self.primitive(&leaf.primitive)?;
                let modulation = leaf.modulation.build(prim.dim())?;
                Ok(CombinationNode::leaf(ModulatedPrimitive::new(prim, modulation)?))
            }
            NodeSpec::Parallel { weights, children } => {
                let children = children.iter().map(|c| self.node(c)).collect::<Result<_>>()?;
                Ok(CombinationNode::parallel(children, weights.clone()))
            }
            NodeSpec::Sequential {
                offsets,
                schedules,
                children,
            } => {
                let children: Vec<_> = children.iter().map(|c| self.node(c)).collect::<Result<_>>()?;
                match schedules {
                    None => CombinationNode::sequence(children, offsets.clone()),
                    Some(specs) => {
                        let schedules = specs
                            .iter()
                            .map(|s| {
                                ActivationSchedule::new(
                                    s.t1,
                                    s.t2,
                                    s.t3.unwrap_or(f64::INFINITY),
                                    s.t4.unwrap_or(f64::INFINITY),
                                )
                            })
                            .collect::<Result<_>>()?;
                        Ok(CombinationNode::sequential(children, offsets.clone(), schedules))
                    }
                }
            }
        }
    }
}

/// Parses and validates a combination file. Primitive paths are resolved
/// against `base`; `path` is only used in messages.
pub fn parse_combination(text: &str, path: &Path, base: &Path) -> Result<CombinationNode> {
    let file: ComboFile = serde_json::from_str(text).map_err(|e| json_error(path, text, &e))?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            found: file.format_version,
            expected: FORMAT_VERSION,
        });
    }
    let mut builder = Builder {
        base,
        cache: HashMap::new(),
    };
    let node = builder.node(&file.root)?;
    let violations = validate_combination(&node);
    if violations.is_empty() {
        Ok(node)
    } else {
        Err(Error::InvalidCombination(violations))
    }
}

pub fn load_combination(path: impl AsRef<Path>) -> Result<CombinationNode> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new("."));
    parse_combination(&read_text(path)?, path, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combine::ViolationKind;
    use crate::io::save_primitive;
    use crate::io::synth::{synth_demo, Shape};
    use crate::learning::{learn_primitive, LearningParams};

    fn setup() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        let params = LearningParams {
            n_basis: 10,
            ..Default::default()
        };
        for (name, shape) in [("a.json", Shape::MinJerk), ("c.json", Shape::Circle)] {
            let demo = synth_demo(shape, 200, 1.0, 1.0).unwrap();
            let prim = learn_primitive(&demo, &params).unwrap().primitive;
            save_primitive(&prim, dir.path().join(name)).unwrap();
        }
        dir
    }

    fn load(dir: &tempfile::TempDir, json: &str) -> Result<CombinationNode> {
        let path = dir.path().join("combo.json");
        std::fs::write(&path, json).unwrap();
        load_combination(path)
    }

    #[test]
    fn mixed_tree_loads() {
        let dir = setup();
        let json = r#"{
          "format_version": 1,
          "root": {"type": "sequential", "offsets": [0.0, 0.5], "children": [
            {"type": "parallel", "weights": [0.3, 0.7], "children": [
              {"type": "leaf", "primitive": "a.json"},
              {"type": "leaf", "primitive": "a.json", "modulation": {"kappa_s": 0.5, "rotation": {"angle_deg": 60}}}
            ]},
            {"type": "leaf", "primitive": "a.json", "modulation": {"y0": [1.0, 0.0], "t_off": 0.5}}
          ]}
        }"#;
        let node = load(&dir, json).unwrap();
        assert_eq!(node.leaves().len(), 3);
        // Same file is loaded once.
        let leaves = node.leaves();
        assert!(Arc::ptr_eq(&leaves[0].primitive, &leaves[2].primitive));
    }

    #[test]
    fn explicit_schedules() {
        let dir = setup();
        let json = r#"{"format_version": 1, "root": {"type": "sequential", "offsets": [0.0, 1.0],
          "schedules": [{"t1": 0, "t2": 0, "t3": 1, "t4": 1.5}, {"t1": 1, "t2": 1.5}],
          "children": [{"type": "leaf", "primitive": "a.json"}, {"type": "leaf", "primitive": "a.json"}]}}"#;
        let node = load(&dir, json).unwrap();
        assert_eq!(node.leaf_weights(1.25), vec![0.5, 0.5]);
    }

    #[test]
    fn violations_reported_with_paths() {
        let dir = setup();
        let json = r#"{"format_version": 1, "root": {"type": "parallel", "weights": [-0.5, 1.5],
          "children": [{"type": "leaf", "primitive": "a.json"}, {"type": "leaf", "primitive": "c.json"}]}}"#;
        match load(&dir, json) {
            Err(Error::InvalidCombination(v)) => {
                assert!(v
                    .iter()
                    .any(|v| v.path == "root" && matches!(v.kind, ViolationKind::NegativeWeight { .. })));
            }
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn schema_problems() {
        let dir = setup();
        let unknown = r#"{"format_version": 1, "root": {"type": "leaf", "primitive": "a.json", "bogus": 1}}"#;
        assert!(matches!(load(&dir, unknown), Err(Error::Parse { .. })));
        let version = r#"{"format_version": 7, "root": {"type": "leaf", "primitive": "a.json"}}"#;
        assert!(matches!(
            load(&dir, version),
            Err(Error::FormatVersion { found: 7, .. })
        ));
        let rotation = r#"{"format_version": 1, "root": {"type": "leaf", "primitive": "a.json",
          "modulation": {"rotation": {"angle_deg": 10, "axis": [0, 0, 1]}}}}"#;
        assert!(matches!(load(&dir, rotation), Err(Error::Schema(_))));
        let missing = r#"{"format_version": 1, "root": {"type": "leaf", "primitive": "nope.json"}}"#;
        assert!(matches!(load(&dir, missing), Err(Error::Io { .. })));
    }
}
