//! Write a small dataset, validate it, then corrupt a label and show the
//! located violations.
//!
//! Run:
//!   cargo run -p embodiment --example validate_dataset

use embodiment::dataset::{load_dataset, write_dataset, Dims};
use embodiment::synthetic::{generate, SyntheticSpec};
use embodiment::DatasetError;

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let ds = generate(&SyntheticSpec {
        n: 12,
        dims: Dims::new(4, 3, 3),
        ..Default::default()
    });
    write_dataset(&ds, dir.path()).unwrap();

    let loaded = load_dataset(dir.path()).unwrap();
    println!(
        "loaded {} robots, dims {:?}, fingerprint {}",
        loaded.len(),
        loaded.dims(),
        &loaded.fingerprint()[..16]
    );

    let labels = dir.path().join("labels.csv");
    let text = std::fs::read_to_string(&labels).unwrap();
    // put an out-of-range warmth score on the second robot
    let broken: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(i, line)| {
            if i != 2 {
                return line.to_string();
            }
            let mut cells: Vec<&str> = line.split(',').collect();
            cells[1] = "9.5";
            cells.join(",")
        })
        .collect();
    std::fs::write(&labels, broken.join("\n") + "\n").unwrap();

    match load_dataset(dir.path()) {
        Err(DatasetError::Invalid(issues)) => {
            println!("{} violation(s):", issues.len());
            for i in issues {
                println!("  {i}");
            }
        }
        Err(other) => println!("error: {other}"),
        Ok(_) => println!("unexpectedly valid"),
    }
}
