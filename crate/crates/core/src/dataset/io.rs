use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{
    validate_with, Construct, Dataset, Dims, Field, Labels, Modality, RobotRecord, ValidateOptions,
    Violation, LABEL_MAX, LABEL_MIN,
};
use crate::error::{DatasetError, LocatedViolation};

pub const LABELS_FILE: &str = "labels.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Overrides `expect_reference_shape` from the manifest when set.
    pub expect_reference_shape: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
struct Manifest {
    #[serde(default)]
    expect_reference_shape: bool,
}

struct Row {
    line: u64,
    id: String,
    values: Vec<f64>,
}

struct Table {
    file: String,
    columns: Vec<String>,
    rows: Vec<Row>,
}

/// Loads `hc.csv`, `metaphor.csv`, `image.csv` and `labels.csv` from `dir`,
/// joined on `id`, in the order robots first appear in `labels.csv`.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    load_dataset_with(dir, LoadOptions::default())
}

pub fn load_dataset_with(
    dir: impl AsRef<Path>,
    opts: LoadOptions,
) -> Result<Dataset, DatasetError> {
    let dir = dir.as_ref();
    let manifest = read_manifest(dir)?;
    let expect_reference_shape = opts
        .expect_reference_shape
        .unwrap_or(manifest.expect_reference_shape);

    let labels = read_table(dir, LABELS_FILE)?;
    let expected: Vec<&str> = Construct::ALL.iter().map(|c| c.key()).collect();
    if labels.columns != expected {
        return Err(DatasetError::Schema {
            file: LABELS_FILE.into(),
            message: format!(
                "expected header id,{} (6 construct columns), found id,{}",
                expected.join(","),
                labels.columns.join(",")
            ),
        });
    }

    let mut blocks = Vec::with_capacity(3);
    for m in Modality::ALL {
        let t = read_table(dir, m.file_name())?;
        let expected: Vec<String> = (0..t.columns.len())
            .map(|j| format!("{}{j}", m.column_prefix()))
            .collect();
        if t.columns.is_empty() || t.columns != expected {
            return Err(DatasetError::Schema {
                file: t.file,
                message: format!(
                    "expected header id,{p}0,...,{p}{{d-1}} with d >= 1",
                    p = m.column_prefix()
                ),
            });
        }
        blocks.push(t);
    }

    // every id must appear in all four files
    let label_ids: std::collections::HashSet<&str> =
        labels.rows.iter().map(|r| r.id.as_str()).collect();
    let mut indexed: Vec<HashMap<&str, &Row>> = Vec::with_capacity(3);
    for t in &blocks {
        let map: HashMap<&str, &Row> = t.rows.iter().map(|r| (r.id.as_str(), r)).collect();
        for r in &t.rows {
            if !label_ids.contains(r.id.as_str()) {
                return Err(DatasetError::MissingId {
                    id: r.id.clone(),
                    file: t.file.clone(),
                    line: r.line,
                    missing_from: LABELS_FILE.into(),
                });
            }
        }
        indexed.push(map);
    }

    let dims = Dims::new(
        blocks[0].columns.len(),
        blocks[1].columns.len(),
        blocks[2].columns.len(),
    );
    let mut issues = Vec::new();
    let mut robots = Vec::with_capacity(labels.rows.len());
    for lrow in &labels.rows {
        let mut got: Vec<&Row> = Vec::with_capacity(3);
        for (t, map) in blocks.iter().zip(&indexed) {
            match map.get(lrow.id.as_str()) {
                Some(r) => got.push(r),
                None => {
                    return Err(DatasetError::MissingId {
                        id: lrow.id.clone(),
                        file: LABELS_FILE.into(),
                        line: lrow.line,
                        missing_from: t.file.clone(),
                    })
                }
            }
        }
        for (m, r) in Modality::ALL.into_iter().zip(&got) {
            for (j, &v) in r.values.iter().enumerate() {
                let bad = if !v.is_finite() {
                    Some(format!("value {v} is not finite"))
                } else if m == Modality::HandCrafted && !(0.0..=1.0).contains(&v) {
                    Some(format!("value {v} outside [0, 1]"))
                } else {
                    None
                };
                if let Some(rule) = bad {
                    issues.push(LocatedViolation {
                        file: m.file_name().into(),
                        line: Some(r.line),
                        violation: Violation {
                            robot: Some(r.id.clone()),
                            field: Field::Block {
                                modality: m,
                                column: Some(j),
                            },
                            rule,
                        },
                    });
                }
            }
        }
        let mut lab = Labels::default();
        for (c, &v) in Construct::ALL.into_iter().zip(&lrow.values) {
            if !v.is_finite() || !(LABEL_MIN..=LABEL_MAX).contains(&v) {
                issues.push(LocatedViolation {
                    file: LABELS_FILE.into(),
                    line: Some(lrow.line),
                    violation: Violation {
                        robot: Some(lrow.id.clone()),
                        field: Field::Label(c),
                        rule: format!("value {v} outside [-3, 3]"),
                    },
                });
            }
            lab.set(c, v);
        }
        robots.push(RobotRecord {
            id: lrow.id.clone(),
            hc: got[0].values.clone(),
            metaphor_emb: got[1].values.clone(),
            image_emb: got[2].values.clone(),
            labels: lab,
        });
    }

    let ds = Dataset::from_parts(robots, dims);
    if issues.is_empty() {
        // structural and reference-shape checks; value checks were done above
        for v in validate_with(
            &ds,
            ValidateOptions {
                expect_reference_shape,
            },
        ) {
            issues.push(LocatedViolation {
                file: dir.display().to_string(),
                line: None,
                violation: v,
            });
        }
    }
    if issues.is_empty() {
        Ok(ds)
    } else {
        Err(DatasetError::Invalid(issues))
    }
}

fn read_manifest(dir: &Path) -> Result<Manifest, DatasetError> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Ok(Manifest::default());
    }
    let text = fs::read_to_string(&path).map_err(|source| DatasetError::Io {
        file: path.clone(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| DatasetError::Manifest {
        file: MANIFEST_FILE.into(),
        message: e.to_string(),
    })
}

fn read_table(dir: &Path, name: &str) -> Result<Table, DatasetError> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(DatasetError::MissingFile(path));
    }
    let bytes = fs::read(&path).map_err(|source| DatasetError::Io {
        file: path.clone(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let csv_err = |line: u64, source: csv::Error| DatasetError::Csv {
        file: name.into(),
        line,
        source,
    };

    let header = rdr.headers().map_err(|e| csv_err(1, e))?.clone();
    if header.get(0) != Some("id") {
        return Err(DatasetError::Schema {
            file: name.into(),
            message: "first column must be `id`".into(),
        });
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut rows = Vec::new();
    let mut seen = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_err(line, e)
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let id = rec.get(0).unwrap_or("").to_string();
        if rec.len() != header.len() {
            return Err(DatasetError::Ragged {
                file: name.into(),
                line,
                id,
                expected: header.len(),
                found: rec.len(),
            });
        }
        if seen.insert(id.clone(), line).is_some() {
            return Err(DatasetError::DuplicateId {
                file: name.into(),
                line,
                id,
            });
        }
        let mut values = Vec::with_capacity(columns.len());
        for (col, raw) in columns.iter().zip(rec.iter().skip(1)) {
            let v = raw.parse::<f64>().map_err(|_| DatasetError::Unparseable {
                file: name.into(),
                line,
                id: id.clone(),
                column: col.clone(),
                value: raw.to_string(),
            })?;
            values.push(v);
        }
        rows.push(Row { line, id, values });
    }
    Ok(Table {
        file: name.into(),
        columns,
        rows,
    })
}

/// Writes the four CSV files for `ds` into `dir` (created if absent).
///
/// Floats use Rust's shortest round-trip representation, so
/// `load_dataset(write_dataset(ds))` reproduces every value bitwise.
pub fn write_dataset(ds: &Dataset, dir: impl AsRef<Path>) -> Result<(), DatasetError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| DatasetError::Io {
        file: dir.to_path_buf(),
        source,
    })?;
    let dims = ds.dims();
    for m in Modality::ALL {
        let mut header = vec!["id".to_string()];
        header.extend((0..dims.get(m)).map(|j| format!("{}{j}", m.column_prefix())));
        let rows = ds.robots().iter().map(|r| (r.id.as_str(), r.block(m)));
        write_csv(&dir.join(m.file_name()), &header, rows)?;
    }
    let mut header = vec!["id".to_string()];
    header.extend(Construct::ALL.iter().map(|c| c.key().to_string()));
    let rows = ds
        .robots()
        .iter()
        .map(|r| (r.id.as_str(), r.labels.as_array().as_slice()));
    write_csv(&dir.join(LABELS_FILE), &header, rows)
}

fn write_csv<'a>(
    path: &Path,
    header: &[String],
    rows: impl Iterator<Item = (&'a str, &'a [f64])>,
) -> Result<(), DatasetError> {
    let io_err = |source: std::io::Error| DatasetError::Io {
        file: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(e.into()))?;
    w.write_record(header).map_err(|e| io_err(e.into()))?;
    for (id, values) in rows {
        let mut rec = Vec::with_capacity(values.len() + 1);
        rec.push(id.to_string());
        rec.extend(values.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(|e| io_err(e.into()))?;
    }
    w.flush().map_err(io_err)
}
