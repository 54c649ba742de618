//! Shared fixtures for the benchmarks.

use std::path::PathBuf;

use postsel_core::data::{load_csv, LoadOptions};
use postsel_core::Dataset;

pub fn wine_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/winequality-red.csv")
}

pub fn wine() -> Dataset {
    load_csv(wine_path(), &LoadOptions::new("quality")).expect("bundled wine data")
}
