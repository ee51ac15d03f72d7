//! Dataset file format.
//!
//! A single JSON document:
//!
//! ```text
//! { "version": 1,
//!   "parts": [{ "id", "name", "labels"?, "com", "eef"?, "size"? }],
//!   "part_order": [ids of every non-ignored part],
//!   "x_if": [6 layers], "x_cf": [12 layers], "x_ct": [[..]], "x_cs"?: [[..]],
//!   "motions": { "<part id>": [{ "id", "kind", "row" }] } }
//! ```
//!
//! Matrix rows and columns follow `part_order`. `labels` defaults to the
//! labels parsed from `name`. `x_cs` is re-derived on load and, when
//! present, must match.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

use super::{
    derive_constraint_degree, parse_labels, Dataset, ModelError, Motion, MotionTable, Part,
    PartCatalog, PartId, RelationMatrices, SquareMatrix, TaskLabel,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    version: u32,
    parts: Vec<PartRecord>,
    part_order: Vec<PartId>,
    x_if: Vec<Vec<Vec<u8>>>,
    x_cf: Vec<Vec<Vec<u8>>>,
    x_ct: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_cs: Option<Vec<Vec<u8>>>,
    #[serde(default)]
    motions: BTreeMap<u32, Vec<Motion>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartRecord {
    id: u32,
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<LabelRecord>,
    com: [f64; 3],
    #[serde(default)]
    eef: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    size: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelRecord {
    task: Option<TaskLabel>,
    #[serde(default)]
    value: bool,
    #[serde(default)]
    base: bool,
    #[serde(default)]
    ignore: bool,
}

fn matrix(rows: Vec<Vec<u8>>, name: &'static str) -> Result<SquareMatrix<u8>, ModelError> {
    SquareMatrix::from_rows(rows).map_err(|row| ModelError::RaggedRow { matrix: name, row })
}

fn to_part(rec: PartRecord) -> Result<Part, ModelError> {
    let (task, priority, base, ignore) = match rec.labels {
        Some(l) => (l.task, l.value, l.base, l.ignore),
        None => {
            let l = parse_labels(&rec.name)?;
            (l.task, l.priority, l.base, l.ignore)
        }
    };
    Ok(Part {
        id: PartId(rec.id),
        name: rec.name,
        task,
        priority,
        base,
        ignore,
        com: rec.com,
        eef: rec.eef,
        size: rec.size,
    })
}

/// Parses and validates a dataset document.
pub fn read_dataset(text: &str) -> Result<Dataset, ModelError> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    if probe.version != SCHEMA_VERSION {
        return Err(ModelError::SchemaVersion {
            found: probe.version,
            expected: SCHEMA_VERSION,
        });
    }
    let file: DatasetFile = serde_json::from_str(text)?;
    let parts = file
        .parts
        .into_iter()
        .map(to_part)
        .collect::<Result<Vec<_>, _>>()?;
    let catalog = PartCatalog::new(parts)?;
    let x_if = file
        .x_if
        .into_iter()
        .map(|m| matrix(m, "x_if"))
        .collect::<Result<Vec<_>, _>>()?;
    let x_cf = file
        .x_cf
        .into_iter()
        .map(|m| matrix(m, "x_cf"))
        .collect::<Result<Vec<_>, _>>()?;
    let x_ct = matrix(file.x_ct, "x_ct")?;
    let x_cs = match file.x_cs {
        Some(rows) => matrix(rows, "x_cs")?,
        None => derive_constraint_degree(&x_cf),
    };
    let matrices = RelationMatrices {
        x_if,
        x_cf,
        x_ct,
        x_cs,
    };
    let motions = MotionTable {
        motions: file
            .motions
            .into_iter()
            .map(|(id, list)| (PartId(id), list))
            .collect(),
    };
    Dataset::new(catalog, file.part_order, matrices, motions)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_dataset(&text)
}

/// Serializes a dataset. Output is deterministic, so a load/save round
/// trip reproduces the file byte for byte.
pub fn write_dataset(dataset: &Dataset) -> String {
    let m = dataset.matrices();
    let file = DatasetFile {
        version: SCHEMA_VERSION,
        parts: dataset
            .catalog()
            .parts()
            .iter()
            .map(|p| PartRecord {
                id: p.id.0,
                name: p.name.clone(),
                labels: Some(LabelRecord {
                    task: p.task,
                    value: p.priority,
                    base: p.base,
                    ignore: p.ignore,
                }),
                com: p.com,
                eef: p.eef.clone(),
                size: p.size,
            })
            .collect(),
        part_order: dataset.part_order().to_vec(),
        x_if: m.x_if.iter().map(SquareMatrix::rows).collect(),
        x_cf: m.x_cf.iter().map(SquareMatrix::rows).collect(),
        x_ct: m.x_ct.rows(),
        x_cs: Some(m.x_cs.rows()),
        motions: dataset
            .motions()
            .motions
            .iter()
            .map(|(id, list)| (id.0, list.clone()))
            .collect(),
    };
    let value = serde_json::to_value(&file).expect("dataset is always representable as JSON");
    let mut out = String::new();
    write_compact_arrays(&mut out, &value, 0);
    out.push('\n');
    out
}

pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    std::fs::write(path, write_dataset(dataset)).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Hex SHA-256 of the dataset's serialized form.
pub fn dataset_digest(dataset: &Dataset) -> String {
    Sha256::digest(write_dataset(dataset).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

// Pretty printer that keeps arrays of scalars on one line, so matrix rows
// stay readable.
fn write_compact_arrays(out: &mut String, value: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match value {
        Value::Array(items) if items.iter().all(|v| !v.is_array() && !v.is_object()) => {
            out.push('[');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&v.to_string());
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                pad(out, indent + 2);
                write_compact_arrays(out, v, indent + 2);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                pad(out, indent + 2);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_compact_arrays(out, v, indent + 2);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}
