//! Generate a 165-robot synthetic dataset, write it to disk and run the full
//! experiment through the `run` command, printing the Markdown table.
//!
//! Run:
//!   cargo run -p embodiment --release --example synthetic_report [OUT_DIR]

use clap::Parser;
use embodiment::cli::{execute, Cli};
use embodiment::dataset::write_dataset;
use embodiment::synthetic::{generate, SyntheticSpec};

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let out_dir = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| tmp.path().to_path_buf());
    let data = out_dir.join("data");
    write_dataset(&generate(&SyntheticSpec::default()), &data).unwrap();

    let report = out_dir.join("report.md");
    let cli = Cli::parse_from([
        "embodiment",
        "run",
        "--data",
        data.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    let code = execute(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    if code != 0 {
        std::process::exit(code.into());
    }
    print!("{}", std::fs::read_to_string(&report).unwrap());
}
