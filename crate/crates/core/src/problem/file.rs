//! TOML problem files.
//!
//! ```toml
//! name = "graded"
//! mesh = "domain.mesh"        # relative to this file, or "builtin:<name>"
//! degree = 1
//! eig_index = 1
//!
//! [marking]
//! strategy = "doerfler"
//! theta = 0.5
//!
//! [bounds]
//! a = [1.0, 2.0]
//! b = [1.0, 1.0]
//!
//! [[region]]
//! id = 0
//! a11 = [[0, 0, 1.0], [1, 0, 1.0]]   # 1 + x, as [px, py, coefficient]
//! a12 = []
//! a22 = [[0, 0, 1.0]]
//! b = [[0, 0, 1.0]]
//! ```

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::Deserialize;

use super::{builtin, Bounds, CoefficientField, Poly, ProblemDef, ReferenceSource, RegionCoefficients};
use crate::error::{Error, Result};
use crate::marking::MarkConfig;
use crate::mesh::read_mesh;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    name: Option<String>,
    mesh: String,
    #[serde(default = "one")]
    degree: usize,
    #[serde(default = "one")]
    eig_index: usize,
    marking: Option<MarkConfig>,
    bounds: BoundsSpec,
    region: Vec<RegionSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsSpec {
    a: [f64; 2],
    b: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionSpec {
    id: u32,
    a11: Poly,
    #[serde(default)]
    a12: Poly,
    a22: Poly,
    b: Poly,
}

fn one() -> usize {
    1
}

/// Parses a problem file; relative mesh paths resolve against `base_dir`.
pub fn parse_problem(text: &str, base_dir: &Path) -> Result<ProblemDef> {
    let file: ProblemFile = toml::from_str(text).map_err(|e| Error::Config(format!("problem file: {e}")))?;
    let mesh = match file.mesh.strip_prefix("builtin:") {
        Some(name) => builtin(name)?.mesh,
        None => {
            let path = base_dir.join(&file.mesh);
            let reader =
                File::open(&path).map_err(|e| Error::Config(format!("cannot open mesh {}: {e}", path.display())))?;
            read_mesh(BufReader::new(reader))?.0
        }
    };
    let mut regions = BTreeMap::new();
    for r in file.region {
        let id = r.id;
        if regions.insert(id, RegionCoefficients { a11: r.a11, a12: r.a12, a22: r.a22, b: r.b }).is_some() {
            return Err(Error::Config(format!("region {id} defined twice")));
        }
    }
    let problem = ProblemDef {
        name: file.name.unwrap_or_else(|| "custom".into()),
        mesh,
        coefficients: CoefficientField::new(regions, Bounds { a: file.bounds.a, b: file.bounds.b }),
        degree: file.degree,
        eig_index: file.eig_index,
        reference: ReferenceSource::None,
        marking: file.marking,
    };
    if let Some(m) = &problem.marking {
        m.validate()?;
    }
    problem.validate()?;
    Ok(problem)
}

pub fn load_problem(path: &Path) -> Result<ProblemDef> {
    let text = std::fs::read_to_string(path)?;
    parse_problem(&text, path.parent().unwrap_or(Path::new(".")))
}
