//! Text outputs.
//!
//! Heatmap file:
//!
//! ```text
//! # pcc heatmap v1
//! # dataset: wine
//! # seed: 42
//! # N: 120
//! # N': 58
//!
//! [with_labels]
//! alpha,1,2
//! 0.000000,0.950000,0.991667
//! 0.500000,0.958333,1.000000
//!
//! [train_no_labels]
//! ...
//! [test_no_labels]
//! ...
//! ```
//!
//! One block per input set; rows are α values, columns are `n_e`, every
//! number is printed with six decimals.
//!
//! Projection file: a header line then one row per (pair, instance):
//!
//! ```text
//! component_a,component_b,coord_a,coord_b,label
//! 2,3,0.412345,-0.031337,1
//! ```
//!
//! Components and labels are 1-based.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{GridMetadata, GridResult, InputSetKind};
use crate::datasets::LabeledDataset;
use crate::encoding::encode_dataset;
use crate::error::{PccError, Result};
use crate::linalg::transpose_matmul;
use crate::model::PccModel;

const HEATMAP_HEADER: &str = "# pcc heatmap v1";
const PROJECTION_HEADER: &str = "component_a,component_b,coord_a,coord_b,label";

pub fn render_heatmap(grid: &GridResult) -> String {
    let m = &grid.metadata;
    let mut s = String::new();
    let _ = writeln!(s, "{HEATMAP_HEADER}");
    let _ = writeln!(s, "# dataset: {}", m.dataset);
    let _ = writeln!(s, "# seed: {}", m.seed);
    let _ = writeln!(s, "# N: {}", m.n_train);
    let _ = writeln!(s, "# N': {}", m.n_test);
    for kind in InputSetKind::ALL {
        let _ = writeln!(s, "\n[{}]", kind.tag());
        s.push_str("alpha");
        for n in &grid.n_es {
            let _ = write!(s, ",{n}");
        }
        s.push('\n');
        for (a, alpha) in grid.alphas.iter().enumerate() {
            let _ = write!(s, "{alpha:.6}");
            for n in 0..grid.n_es.len() {
                let _ = write!(s, ",{:.6}", grid.get(kind, a, n));
            }
            s.push('\n');
        }
    }
    s
}

pub fn emit_heatmap(grid: &GridResult, path: &Path) -> Result<()> {
    fs::write(path, render_heatmap(grid)).map_err(|e| PccError::io(path, e))
}

/// Inverse of [`render_heatmap`].
pub fn parse_heatmap(text: &str, source: &str) -> Result<GridResult> {
    let mut lines = text.lines().enumerate().peekable();
    let bad = |line: usize, msg: String| PccError::format(source, format!("line {}", line + 1), msg);
    match lines.next() {
        Some((_, HEATMAP_HEADER)) => {}
        _ => return Err(bad(0, "missing heatmap header".into())),
    }
    let mut metadata = GridMetadata::default();
    let mut n_es: Option<Vec<usize>> = None;
    let mut alphas: Option<Vec<f64>> = None;
    let mut accuracy: [Vec<f64>; 3] = Default::default();
    let mut seen = [false; 3];
    let mut current: Option<(InputSetKind, Vec<f64>)> = None;

    let mut finish = |current: &mut Option<(InputSetKind, Vec<f64>)>,
                      alphas: &mut Option<Vec<f64>>,
                      block_alphas: &mut Vec<f64>,
                      at: usize|
     -> Result<()> {
        if let Some((kind, values)) = current.take() {
            match alphas {
                None => *alphas = Some(std::mem::take(block_alphas)),
                Some(a) if *a != *block_alphas => {
                    return Err(bad(at, format!("alpha rows of [{}] differ from the first block", kind.tag())))
                }
                Some(_) => block_alphas.clear(),
            }
            accuracy[kind.index()] = values;
        }
        Ok(())
    };
    let mut block_alphas = Vec::new();

    while let Some((i, line)) = lines.next() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((key, value)) = rest.split_once(": ") {
                let num = || value.parse::<usize>().map_err(|_| bad(i, format!("bad {key}: {value:?}")));
                match key {
                    "dataset" => metadata.dataset = value.to_string(),
                    "seed" => {
                        metadata.seed = value.parse().map_err(|_| bad(i, format!("bad seed: {value:?}")))?
                    }
                    "N" => metadata.n_train = num()?,
                    "N'" => metadata.n_test = num()?,
                    _ => {}
                }
            }
            continue;
        }
        if let Some(tag) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            finish(&mut current, &mut alphas, &mut block_alphas, i)?;
            let kind = InputSetKind::from_tag(tag).ok_or_else(|| bad(i, format!("unknown block [{tag}]")))?;
            if std::mem::replace(&mut seen[kind.index()], true) {
                return Err(bad(i, format!("duplicate block [{tag}]")));
            }
            let (j, header) = lines.next().ok_or_else(|| bad(i, "block without header".into()))?;
            let mut fields = header.trim().split(',');
            if fields.next() != Some("alpha") {
                return Err(bad(j, "expected a column header starting with 'alpha'".into()));
            }
            let cols = fields
                .map(|f| f.parse::<usize>().map_err(|_| bad(j, format!("bad n_e header {f:?}"))))
                .collect::<Result<Vec<_>>>()?;
            match &n_es {
                None => n_es = Some(cols),
                Some(prev) if *prev != cols => return Err(bad(j, "n_e headers differ between blocks".into())),
                Some(_) => {}
            }
            current = Some((kind, Vec::new()));
            continue;
        }
        let (_, values) = current.as_mut().ok_or_else(|| bad(i, "data row outside a block".into()))?;
        let width = n_es.as_ref().map_or(0, Vec::len);
        let nums = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|_| bad(i, format!("not a number: {f:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if nums.len() != width + 1 {
            return Err(bad(i, format!("{} fields, expected {}", nums.len(), width + 1)));
        }
        block_alphas.push(nums[0]);
        values.extend_from_slice(&nums[1..]);
    }
    let end = text.lines().count();
    finish(&mut current, &mut alphas, &mut block_alphas, end)?;
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(bad(end, format!("missing block [{}]", InputSetKind::ALL[k].tag())));
    }
    Ok(GridResult {
        alphas: alphas.unwrap_or_default(),
        n_es: n_es.unwrap_or_default(),
        accuracy,
        metadata,
    })
}

/// Coordinates of `data` (classes encoded) on pairs of components.
pub fn render_projections(
    model: &PccModel,
    data: &LabeledDataset,
    pairs: &[(usize, usize)],
) -> Result<String> {
    for &(a, b) in pairs {
        if a == 0 || b == 0 || a.max(b) > model.n_e() {
            return Err(PccError::InvalidParameter(format!(
                "component pair ({a}, {b}) outside 1..={}",
                model.n_e()
            )));
        }
    }
    let z = encode_dataset(model.spec(), data, true)?;
    let p = transpose_matmul(model.basis(), &z)?;
    let mut s = String::from(PROJECTION_HEADER);
    s.push('\n');
    for &(a, b) in pairs {
        for j in 0..data.len() {
            let _ = writeln!(
                s,
                "{a},{b},{:.6},{:.6},{}",
                p.get(a - 1, j),
                p.get(b - 1, j),
                data.labels()[j] + 1
            );
        }
    }
    Ok(s)
}

pub fn emit_projections(
    model: &PccModel,
    data: &LabeledDataset,
    pairs: &[(usize, usize)],
    path: &Path,
) -> Result<()> {
    let s = render_projections(model, data, pairs)?;
    fs::write(path, s).map_err(|e| PccError::io(path, e))
}
