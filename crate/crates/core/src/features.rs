//! Modality combinations and fused design matrices.

use std::fmt;

use crate::dataset::{Construct, Dataset, Modality};
use crate::matrix::Matrix;

/// A non-empty subset of {HC, M, IM}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModalityCombo {
    // bit i set <=> Modality::ALL[i] included
    mask: u8,
}

impl ModalityCombo {
    pub const HC: ModalityCombo = ModalityCombo { mask: 0b001 };
    pub const M: ModalityCombo = ModalityCombo { mask: 0b010 };
    pub const IM: ModalityCombo = ModalityCombo { mask: 0b100 };
    pub const HC_M: ModalityCombo = ModalityCombo { mask: 0b011 };
    pub const HC_IM: ModalityCombo = ModalityCombo { mask: 0b101 };
    pub const M_IM: ModalityCombo = ModalityCombo { mask: 0b110 };
    pub const ALL: ModalityCombo = ModalityCombo { mask: 0b111 };

    /// Returns `None` for the empty set.
    pub fn new(modalities: &[Modality]) -> Option<Self> {
        let mask = modalities.iter().fold(0u8, |m, x| m | (1 << x.index()));
        (mask != 0).then_some(ModalityCombo { mask })
    }

    pub fn contains(self, m: Modality) -> bool {
        self.mask & (1 << m.index()) != 0
    }

    /// Members in canonical HC, M, IM order.
    pub fn modalities(self) -> impl Iterator<Item = Modality> {
        Modality::ALL.into_iter().filter(move |&m| self.contains(m))
    }

    /// Parses labels such as `"HC + IM"` or `"im+m"`.
    pub fn parse(s: &str) -> Option<Self> {
        let mut mods = Vec::new();
        for part in s.split('+') {
            let m = match part.trim().to_ascii_uppercase().as_str() {
                "HC" => Modality::HandCrafted,
                "M" => Modality::Metaphor,
                "IM" => Modality::Image,
                _ => return None,
            };
            mods.push(m);
        }
        ModalityCombo::new(&mods)
    }
}

impl fmt::Display for ModalityCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.modalities().map(|m| m.abbrev()).collect();
        f.write_str(&names.join(" + "))
    }
}

/// The 7 non-empty combinations, in results-table row order.
pub fn all_combos() -> Vec<ModalityCombo> {
    vec![
        ModalityCombo::HC,
        ModalityCombo::M,
        ModalityCombo::IM,
        ModalityCombo::HC_M,
        ModalityCombo::HC_IM,
        ModalityCombo::M_IM,
        ModalityCombo::ALL,
    ]
}

/// Fused design matrix with row order matching the source dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub values: Matrix,
    pub robot_ids: Vec<String>,
    pub combo: ModalityCombo,
    /// Column range of each included modality block.
    pub blocks: Vec<(Modality, std::ops::Range<usize>)>,
}

impl FeatureMatrix {
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    /// Recovers one modality block from the fused matrix.
    pub fn block(&self, m: Modality) -> Option<Matrix> {
        self.blocks
            .iter()
            .find(|(bm, _)| *bm == m)
            .map(|(_, r)| self.values.column_slice(r.start, r.end))
    }
}

/// Concatenates the selected modality blocks, always in HC, M, IM order.
pub fn fuse(ds: &Dataset, combo: ModalityCombo) -> FeatureMatrix {
    fuse_with(ds, combo, FuseOptions::default())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FuseOptions {
    /// Z-score each embedding column (M and IM blocks) over the dataset rows.
    pub standardize_embeddings: bool,
}

pub fn fuse_with(ds: &Dataset, combo: ModalityCombo, opts: FuseOptions) -> FeatureMatrix {
    let dims = ds.dims();
    let mut blocks = Vec::new();
    let mut cols = 0;
    for m in combo.modalities() {
        blocks.push((m, cols..cols + dims.get(m)));
        cols += dims.get(m);
    }
    let mut values = Matrix::zeros(ds.len(), cols);
    for (i, r) in ds.robots().iter().enumerate() {
        let row = values.row_mut(i);
        for (m, range) in &blocks {
            row[range.clone()].copy_from_slice(r.block(*m));
        }
    }
    if opts.standardize_embeddings {
        for (m, range) in &blocks {
            if *m != Modality::HandCrafted {
                standardize_columns(&mut values, range.clone());
            }
        }
    }
    FeatureMatrix {
        values,
        robot_ids: ds.robots().iter().map(|r| r.id.clone()).collect(),
        combo,
        blocks,
    }
}

fn standardize_columns(x: &mut Matrix, cols: std::ops::Range<usize>) {
    let n = x.nrows() as f64;
    for j in cols {
        let mean = (0..x.nrows()).map(|i| x.get(i, j)).sum::<f64>() / n;
        let var = (0..x.nrows())
            .map(|i| (x.get(i, j) - mean).powi(2))
            .sum::<f64>()
            / n;
        let sd = var.sqrt();
        for i in 0..x.nrows() {
            let v = &mut x.row_mut(i)[j];
            *v = if sd > 0.0 { (*v - mean) / sd } else { 0.0 };
        }
    }
}

/// Ratings of construct `c`, one per robot in dataset order.
pub fn label_vector(ds: &Dataset, c: Construct) -> Vec<f64> {
    ds.robots().iter().map(|r| r.labels.get(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Dims, Labels, RobotRecord};
    use proptest::prelude::*;

    fn dataset(n: usize, dims: Dims) -> Dataset {
        let robots = (0..n)
            .map(|i| RobotRecord {
                id: format!("r{i}"),
                hc: (0..dims.hc)
                    .map(|j| ((i * 7 + j) % 11) as f64 / 10.0)
                    .collect(),
                metaphor_emb: (0..dims.metaphor).map(|j| (i + j) as f64 * 0.5).collect(),
                image_emb: (0..dims.image).map(|j| -((i * j) as f64)).collect(),
                labels: Labels::new([0.1 * (i + 1) as f64, 0.2, -0.3, 0.4, -0.5, 0.6]),
            })
            .collect();
        Dataset::try_new(robots, dims).unwrap()
    }

    #[test]
    fn seven_combos_in_table_order() {
        let combos = all_combos();
        assert_eq!(combos.len(), 7);
        assert_eq!(combos[0], ModalityCombo::HC);
        assert_eq!(combos[6], ModalityCombo::ALL);
        let labels: Vec<String> = combos.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            labels,
            [
                "HC",
                "M",
                "IM",
                "HC + M",
                "HC + IM",
                "M + IM",
                "HC + M + IM"
            ]
        );
        let unique: std::collections::HashSet<_> = combos.iter().collect();
        assert_eq!(unique.len(), 7);
    }

    #[test]
    fn combo_spelling_does_not_change_order() {
        let a = ModalityCombo::new(&[Modality::Image, Modality::HandCrafted]).unwrap();
        assert_eq!(a, ModalityCombo::HC_IM);
        assert_eq!(ModalityCombo::parse("im + hc"), Some(ModalityCombo::HC_IM));
        assert_eq!(ModalityCombo::new(&[]), None);
        assert_eq!(ModalityCombo::parse("HC + X"), None);
    }

    #[test]
    fn fused_widths_for_reference_dims() {
        let ds = dataset(3, Dims::new(59, 512, 512));
        assert_eq!(fuse(&ds, ModalityCombo::HC_IM).ncols(), 571);
        assert_eq!(fuse(&ds, ModalityCombo::ALL).ncols(), 1083);
    }

    #[test]
    fn single_block_is_verbatim() {
        let ds = dataset(4, Dims::new(5, 3, 2));
        let fm = fuse(&ds, ModalityCombo::HC);
        for (i, r) in ds.robots().iter().enumerate() {
            assert_eq!(fm.values.row(i), r.hc.as_slice());
        }
        assert_eq!(fm.robot_ids, ["r0", "r1", "r2", "r3"]);
    }

    #[test]
    fn label_vectors() {
        let ds = dataset(3, Dims::new(1, 1, 1));
        let w = label_vector(&ds, Construct::Warmth);
        assert_eq!(w.len(), 3);
        approx::assert_relative_eq!(w[2], 0.3, epsilon = 1e-12);
        let all: Vec<_> = Construct::ALL
            .iter()
            .map(|&c| label_vector(&ds, c))
            .collect();
        for i in 0..6 {
            for j in i + 1..6 {
                assert_ne!(all[i], all[j]);
            }
        }
    }

    #[test]
    fn standardized_embeddings_leave_hc_untouched() {
        let ds = dataset(5, Dims::new(3, 4, 4));
        let fm = fuse_with(
            &ds,
            ModalityCombo::ALL,
            FuseOptions {
                standardize_embeddings: true,
            },
        );
        assert_eq!(
            fm.block(Modality::HandCrafted).unwrap(),
            fuse(&ds, ModalityCombo::HC).values
        );
        let m = fm.block(Modality::Metaphor).unwrap();
        for j in 0..m.ncols() {
            let mean: f64 = (0..5).map(|i| m.get(i, j)).sum::<f64>() / 5.0;
            assert!(mean.abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn blocks_recovered_exactly(n in 1usize..6, hc in 1usize..5, me in 1usize..5, im in 1usize..5, mask in 1u8..8) {
            let ds = dataset(n, Dims::new(hc, me, im));
            let combo = ModalityCombo { mask };
            let fm = fuse(&ds, combo);
            let want: usize = combo.modalities().map(|m| ds.dims().get(m)).sum();
            prop_assert_eq!(fm.ncols(), want);
            for m in combo.modalities() {
                let b = fm.block(m).unwrap();
                for (i, r) in ds.robots().iter().enumerate() {
                    prop_assert_eq!(b.row(i), r.block(m));
                }
            }
            prop_assert_eq!(fuse(&ds, combo), fm);
        }
    }
}
