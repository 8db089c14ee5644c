//! Results table rendering (Markdown and CSV) and the provenance footer.

use std::collections::BTreeMap;

use crate::dataset::Construct;
use crate::error::ReportError;
use crate::eval::{stars, CellResult, RowKey};
use crate::features::all_combos;
use crate::svr::{Gamma, HyperParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Markdown,
    Csv,
}

pub const CSV_HEADER: &str = "combo,construct,mean_mse,p_value,stars,is_best";

/// One rendered cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub mean_mse: f64,
    pub p_value: Option<f64>,
    pub stars: &'static str,
    pub is_best: bool,
}

/// 8 rows (7 combinations then the baseline) by 6 constructs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub rows: Vec<RowKey>,
    pub columns: Vec<Construct>,
    pub cells: Vec<Vec<TableCell>>,
}

/// Mean MSE to three decimals. Exact binary ties round half to even.
pub fn format_mse(v: f64) -> String {
    format!("{v:.3}")
}

pub fn build_table(results: &[CellResult]) -> Result<ReportTable, ReportError> {
    let mut rows: Vec<RowKey> = all_combos().into_iter().map(RowKey::Combo).collect();
    rows.push(RowKey::Baseline);
    let columns = Construct::ALL.to_vec();

    let by_key: BTreeMap<(RowKey, Construct), &CellResult> =
        results.iter().map(|r| ((r.row, r.construct), r)).collect();
    let missing: Vec<String> = rows
        .iter()
        .flat_map(|&row| columns.iter().map(move |&c| (row, c)))
        .filter(|k| !by_key.contains_key(k))
        .map(|(row, c)| format!("({row}, {c})"))
        .collect();
    if !missing.is_empty() {
        return Err(ReportError::Incomplete(missing));
    }

    let mut cells: Vec<Vec<TableCell>> = rows
        .iter()
        .map(|&row| {
            columns
                .iter()
                .map(|&c| {
                    let r = by_key[&(row, c)];
                    let s = match (row, r.p_value) {
                        (RowKey::Combo(_), Some(p)) => stars(p.clamp(0.0, 1.0)).unwrap_or(""),
                        _ => "",
                    };
                    TableCell {
                        mean_mse: r.mean_mse,
                        p_value: if row == RowKey::Baseline {
                            None
                        } else {
                            r.p_value
                        },
                        stars: s,
                        is_best: false,
                    }
                })
                .collect()
        })
        .collect();

    // best = smallest displayed value among model rows; displayed ties all win
    let model_rows = rows.len() - 1;
    for j in 0..columns.len() {
        let shown: Vec<String> = (0..model_rows)
            .map(|i| format_mse(cells[i][j].mean_mse))
            .collect();
        let min = (0..model_rows)
            .map(|i| cells[i][j].mean_mse)
            .fold(f64::INFINITY, f64::min);
        let min_shown = format_mse(min);
        for i in 0..model_rows {
            cells[i][j].is_best = shown[i] == min_shown;
        }
    }
    Ok(ReportTable {
        rows,
        columns,
        cells,
    })
}

/// Renders the complete result set (42 model cells and 6 baseline cells).
pub fn render(results: &[CellResult], format: Format) -> Result<String, ReportError> {
    let table = build_table(results)?;
    Ok(match format {
        Format::Markdown => render_markdown(&table),
        Format::Csv => render_csv(&table),
    })
}

fn render_markdown(t: &ReportTable) -> String {
    let mut out = String::from("| Features Used |");
    for c in &t.columns {
        out.push_str(&format!(" {} |", c.title()));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(t.columns.len()));
    out.push('\n');
    for (row, cells) in t.rows.iter().zip(&t.cells) {
        out.push_str(&format!("| {row} |"));
        for cell in cells {
            let v = format_mse(cell.mean_mse);
            if cell.is_best {
                out.push_str(&format!(" **{v}**{} |", cell.stars));
            } else {
                out.push_str(&format!(" {v}{} |", cell.stars));
            }
        }
        out.push('\n');
    }
    out
}

fn render_csv(t: &ReportTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(','))
        .expect("in-memory write");
    for (row, cells) in t.rows.iter().zip(&t.cells) {
        for (c, cell) in t.columns.iter().zip(cells) {
            let p = cell.p_value.map(|p| p.to_string()).unwrap_or_default();
            w.write_record([
                row.to_string(),
                c.key().to_string(),
                format_mse(cell.mean_mse),
                p,
                cell.stars.to_string(),
                cell.is_best.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Provenance recorded under every report.
#[derive(Debug, Clone, PartialEq)]
pub struct FooterInfo {
    pub seed: u64,
    pub hp: HyperParams,
    pub k: usize,
    pub fingerprint: String,
    /// Hyperparameters came from a grid search over the reporting folds.
    pub grid_selected: bool,
}

/// One-line provenance: seed, C, ε, gamma, k, dataset hash, toolkit version.
pub fn footer(info: &FooterInfo) -> String {
    let gamma = match info.hp.gamma {
        Gamma::Scale => "scale".to_string(),
        Gamma::Value(g) => g.to_string(),
    };
    let mut line = format!(
        "seed={} C={} epsilon={} gamma={} k={} dataset=sha256:{} toolkit={} {}",
        info.seed,
        info.hp.c,
        info.hp.epsilon,
        gamma,
        info.k,
        info.fingerprint,
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
    );
    if info.grid_selected {
        line.push_str(" selection=grid-search-on-reporting-folds");
    }
    line
}

/// Report body followed by the footer; CSV footers are `#` comment lines.
pub fn render_with_footer(
    results: &[CellResult],
    format: Format,
    info: &FooterInfo,
) -> Result<String, ReportError> {
    let mut body = render(results, format)?;
    match format {
        Format::Markdown => body.push_str(&format!("\n{}\n", footer(info))),
        Format::Csv => body.push_str(&format!("# {}\n", footer(info))),
    }
    Ok(body)
}
