#![allow(dead_code)]

use std::path::PathBuf;

use pcc_core::datasets::{load_table, LabelColumn, LabeledDataset, TableFormat};
use pcc_core::DenseMatrix;
use serde_json::Value;

pub fn fixture(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

pub fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

pub fn usizes(v: &Value) -> Vec<usize> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect()
}

/// `PCC_DATA_DIR`, or `data/` at the workspace root.
pub fn data_dir() -> PathBuf {
    std::env::var_os("PCC_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn table(file: &str, label_column: isize) -> Option<LabeledDataset> {
    let path = data_dir().join(file);
    if !path.exists() {
        eprintln!("skipping: {} not found", path.display());
        return None;
    }
    let format = TableFormat {
        label_column: LabelColumn(label_column),
        delimiter: ',',
    };
    Some(load_table(&path, format).unwrap())
}

pub fn wine() -> Option<LabeledDataset> {
    table("wine.csv", 0)
}

pub fn australian() -> Option<LabeledDataset> {
    table("australian.csv", -1)
}

pub fn mnist_dir() -> Option<PathBuf> {
    let dir = data_dir().join("mnist");
    if dir.join("train-images-idx3-ubyte").exists() {
        Some(dir)
    } else {
        eprintln!("skipping: MNIST files not found under {}", dir.display());
        None
    }
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.max_abs_diff(b)
}

/// Deterministic pseudo-random values in [-1, 1) (SplitMix64 stream).
pub struct Stream(u64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_col_major(rows, cols, (0..rows * cols).map(|_| self.uniform()).collect()).unwrap()
    }
}
