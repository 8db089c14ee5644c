//! Robot records, construct labels and dataset validation.
//!
//! A [`Dataset`] holds one [`RobotRecord`] per robot: three feature blocks
//! (hand-crafted, metaphor embedding, image embedding) and six construct
//! ratings on the [-3, 3] Likert-average scale.

mod io;

pub use io::{load_dataset, load_dataset_with, write_dataset, LoadOptions, MANIFEST_FILE};

use std::fmt;

use sha2::{Digest, Sha256};

/// Number of robots in the reference embodiment dataset.
pub const REFERENCE_ROBOTS: usize = 165;
/// Number of hand-crafted features per robot in the reference dataset.
pub const REFERENCE_HC_DIM: usize = 59;

/// Lower bound of a construct rating.
pub const LABEL_MIN: f64 = -3.0;
/// Upper bound of a construct rating.
pub const LABEL_MAX: f64 = 3.0;

/// One of the six psychological constructs predicted by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construct {
    Warmth,
    Competence,
    Discomfort,
    PerceptionAndInterpretation,
    TactileInteraction,
    NonverbalCommunication,
}

impl Construct {
    /// All constructs in table column order.
    pub const ALL: [Construct; 6] = [
        Construct::Warmth,
        Construct::Competence,
        Construct::Discomfort,
        Construct::PerceptionAndInterpretation,
        Construct::TactileInteraction,
        Construct::NonverbalCommunication,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column name used in `labels.csv` and CSV reports.
    pub fn key(self) -> &'static str {
        match self {
            Construct::Warmth => "warmth",
            Construct::Competence => "competence",
            Construct::Discomfort => "discomfort",
            Construct::PerceptionAndInterpretation => "perception_interpretation",
            Construct::TactileInteraction => "tactile_interaction",
            Construct::NonverbalCommunication => "nonverbal_communication",
        }
    }

    /// Human-readable name used as a table heading.
    pub fn title(self) -> &'static str {
        match self {
            Construct::Warmth => "Warmth",
            Construct::Competence => "Competence",
            Construct::Discomfort => "Discomfort",
            Construct::PerceptionAndInterpretation => "Perception and Interpretation",
            Construct::TactileInteraction => "Tactile Interaction",
            Construct::NonverbalCommunication => "Nonverbal Communication",
        }
    }

    pub fn from_key(key: &str) -> Option<Construct> {
        Construct::ALL.into_iter().find(|c| c.key() == key)
    }
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

/// A feature modality describing a robot's embodiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modality {
    HandCrafted,
    Metaphor,
    Image,
}

impl Modality {
    /// Canonical order: HC, M, IM.
    pub const ALL: [Modality; 3] = [Modality::HandCrafted, Modality::Metaphor, Modality::Image];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            Modality::HandCrafted => "HC",
            Modality::Metaphor => "M",
            Modality::Image => "IM",
        }
    }

    /// File holding this modality's feature block.
    pub fn file_name(self) -> &'static str {
        match self {
            Modality::HandCrafted => "hc.csv",
            Modality::Metaphor => "metaphor.csv",
            Modality::Image => "image.csv",
        }
    }

    /// Prefix of the feature columns in this modality's file (`f0`, `e0`, ...).
    pub fn column_prefix(self) -> &'static str {
        match self {
            Modality::HandCrafted => "f",
            Modality::Metaphor | Modality::Image => "e",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbrev())
    }
}

/// Six construct ratings indexed by [`Construct`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Labels([f64; 6]);

impl Labels {
    pub fn new(values: [f64; 6]) -> Self {
        Labels(values)
    }

    pub fn get(&self, c: Construct) -> f64 {
        self.0[c.index()]
    }

    pub fn set(&mut self, c: Construct, v: f64) {
        self.0[c.index()] = v;
    }

    pub fn as_array(&self) -> &[f64; 6] {
        &self.0
    }
}

/// Feature dimension per modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub hc: usize,
    pub metaphor: usize,
    pub image: usize,
}

impl Dims {
    pub fn new(hc: usize, metaphor: usize, image: usize) -> Self {
        Dims {
            hc,
            metaphor,
            image,
        }
    }

    pub fn get(&self, m: Modality) -> usize {
        match m {
            Modality::HandCrafted => self.hc,
            Modality::Metaphor => self.metaphor,
            Modality::Image => self.image,
        }
    }
}

/// A single robot: identifier, three feature blocks and six ratings.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotRecord {
    pub id: String,
    pub hc: Vec<f64>,
    pub metaphor_emb: Vec<f64>,
    pub image_emb: Vec<f64>,
    pub labels: Labels,
}

impl RobotRecord {
    pub fn block(&self, m: Modality) -> &[f64] {
        match m {
            Modality::HandCrafted => &self.hc,
            Modality::Metaphor => &self.metaphor_emb,
            Modality::Image => &self.image_emb,
        }
    }
}

/// An ordered collection of robots with declared per-modality dimensions.
///
/// Values constructed through [`Dataset::try_new`] or [`load_dataset`]
/// satisfy every invariant checked by [`validate`]. [`Dataset::from_parts`]
/// skips the check so that malformed data can be inspected.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    robots: Vec<RobotRecord>,
    dims: Dims,
}

impl Dataset {
    pub fn from_parts(robots: Vec<RobotRecord>, dims: Dims) -> Self {
        Dataset { robots, dims }
    }

    /// Builds a dataset, rejecting it if any invariant is violated.
    pub fn try_new(robots: Vec<RobotRecord>, dims: Dims) -> Result<Self, Vec<Violation>> {
        let ds = Dataset { robots, dims };
        let violations = validate(&ds);
        if violations.is_empty() {
            Ok(ds)
        } else {
            Err(violations)
        }
    }

    pub fn robots(&self) -> &[RobotRecord] {
        &self.robots
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    /// Restricts the dataset to the given row indices, in that order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            robots: rows.iter().map(|&i| self.robots[i].clone()).collect(),
            dims: self.dims,
        }
    }

    /// SHA-256 over ids, dimensions and the bit patterns of every value.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for m in Modality::ALL {
            h.update((self.dims.get(m) as u64).to_le_bytes());
        }
        for r in &self.robots {
            h.update((r.id.len() as u64).to_le_bytes());
            h.update(r.id.as_bytes());
            for m in Modality::ALL {
                let block = r.block(m);
                h.update((block.len() as u64).to_le_bytes());
                for v in block {
                    h.update(v.to_bits().to_le_bytes());
                }
            }
            for v in r.labels.as_array() {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Which field of a record a [`Violation`] refers to.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Id,
    Block {
        modality: Modality,
        column: Option<usize>,
    },
    Label(Construct),
    Dataset,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Id => f.write_str("id"),
            Field::Block {
                modality,
                column: Some(c),
            } => write!(f, "{modality}[{c}]"),
            Field::Block {
                modality,
                column: None,
            } => write!(f, "{modality}"),
            Field::Label(c) => f.write_str(c.key()),
            Field::Dataset => f.write_str("dataset"),
        }
    }
}

/// A broken invariant: which robot, which field, which rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub robot: Option<String>,
    pub field: Field,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.robot {
            Some(id) => write!(f, "robot {id:?}: {}: {}", self.field, self.rule),
            None => write!(f, "{}: {}", self.field, self.rule),
        }
    }
}

/// Options controlling which optional checks [`validate_with`] applies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Require exactly 165 robots and 59 hand-crafted features.
    pub expect_reference_shape: bool,
}

/// Checks every dataset invariant; an empty list means the dataset is valid.
pub fn validate(ds: &Dataset) -> Vec<Violation> {
    validate_with(ds, ValidateOptions::default())
}

pub fn validate_with(ds: &Dataset, opts: ValidateOptions) -> Vec<Violation> {
    let mut out = Vec::new();
    let dims = ds.dims;
    let mut seen = std::collections::HashSet::new();

    for m in Modality::ALL {
        if dims.get(m) == 0 {
            out.push(Violation {
                robot: None,
                field: Field::Block {
                    modality: m,
                    column: None,
                },
                rule: "declared dimension must be positive".into(),
            });
        }
    }

    for r in &ds.robots {
        let who = Some(r.id.clone());
        if r.id.is_empty() {
            out.push(Violation {
                robot: who.clone(),
                field: Field::Id,
                rule: "id must be non-empty".into(),
            });
        }
        if !seen.insert(r.id.as_str()) {
            out.push(Violation {
                robot: who.clone(),
                field: Field::Id,
                rule: "duplicate id".into(),
            });
        }
        for m in Modality::ALL {
            let block = r.block(m);
            if block.len() != dims.get(m) {
                out.push(Violation {
                    robot: who.clone(),
                    field: Field::Block {
                        modality: m,
                        column: None,
                    },
                    rule: format!(
                        "dimension mismatch: length {} but declared {}",
                        block.len(),
                        dims.get(m)
                    ),
                });
            }
            for (j, &v) in block.iter().enumerate() {
                let field = Field::Block {
                    modality: m,
                    column: Some(j),
                };
                if !v.is_finite() {
                    out.push(Violation {
                        robot: who.clone(),
                        field,
                        rule: format!("value {v} is not finite"),
                    });
                } else if m == Modality::HandCrafted && !(0.0..=1.0).contains(&v) {
                    out.push(Violation {
                        robot: who.clone(),
                        field,
                        rule: format!("value {v} outside [0, 1]"),
                    });
                }
            }
        }
        for c in Construct::ALL {
            let v = r.labels.get(c);
            if !v.is_finite() {
                out.push(Violation {
                    robot: who.clone(),
                    field: Field::Label(c),
                    rule: format!("value {v} is not finite"),
                });
            } else if !(LABEL_MIN..=LABEL_MAX).contains(&v) {
                out.push(Violation {
                    robot: who.clone(),
                    field: Field::Label(c),
                    rule: format!("value {v} outside [-3, 3]"),
                });
            }
        }
    }

    if opts.expect_reference_shape {
        if ds.robots.len() != REFERENCE_ROBOTS {
            out.push(Violation {
                robot: None,
                field: Field::Dataset,
                rule: format!(
                    "reference shape expects {REFERENCE_ROBOTS} robots, found {}",
                    ds.robots.len()
                ),
            });
        }
        if dims.hc != REFERENCE_HC_DIM {
            out.push(Violation {
                robot: None,
                field: Field::Block {
                    modality: Modality::HandCrafted,
                    column: None,
                },
                rule: format!(
                    "reference shape expects {REFERENCE_HC_DIM} hand-crafted features, found {}",
                    dims.hc
                ),
            });
        }
    }
    out
}
