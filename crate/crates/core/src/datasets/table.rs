use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::LabeledDataset;
use crate::error::{PccError, Result};
use crate::linalg::DenseMatrix;

/// Column holding the class identifier. Negative values count from the end
/// (`-1` is the last column).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabelColumn(pub isize);

impl LabelColumn {
    fn resolve(self, width: usize) -> Option<usize> {
        let i = if self.0 < 0 {
            width as isize + self.0
        } else {
            self.0
        };
        (0..width as isize).contains(&i).then_some(i as usize)
    }
}

/// Delimiter handling. A space delimiter splits on any run of whitespace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableFormat {
    pub label_column: LabelColumn,
    pub delimiter: char,
}

impl Default for TableFormat {
    fn default() -> Self {
        TableFormat {
            label_column: LabelColumn(-1),
            delimiter: ',',
        }
    }
}

/// Parses delimited text into a raw (un-rescaled) dataset.
///
/// Class identifiers are mapped to labels in order of first appearance;
/// the mapping is kept in [`LabeledDataset::class_names`]. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_table(text: &str, format: TableFormat, name: &str) -> Result<LabeledDataset> {
    let mut width = None;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut classes: HashMap<String, usize> = HashMap::new();
    let mut class_names = Vec::new();
    let mut label_idx = 0;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = || format!("line {}", lineno + 1);
        let fields: Vec<&str> = if format.delimiter == ' ' {
            line.split_whitespace().collect()
        } else {
            line.split(format.delimiter).map(str::trim).collect()
        };
        match width {
            None => {
                label_idx = format.label_column.resolve(fields.len()).ok_or_else(|| {
                    PccError::format(
                        name,
                        at(),
                        format!(
                            "label column {} out of range for {} columns",
                            format.label_column.0,
                            fields.len()
                        ),
                    )
                })?;
                if fields.len() < 2 {
                    return Err(PccError::format(name, at(), "need a label and at least one feature"));
                }
                width = Some(fields.len());
            }
            Some(w) if w != fields.len() => {
                return Err(PccError::format(
                    name,
                    at(),
                    format!("ragged row: {} fields, expected {w}", fields.len()),
                ));
            }
            Some(_) => {}
        }
        for (j, f) in fields.iter().enumerate() {
            if j == label_idx {
                let next = classes.len();
                let id = *classes.entry((*f).to_string()).or_insert_with(|| {
                    class_names.push((*f).to_string());
                    next
                });
                labels.push(id);
            } else {
                let v: f64 = f.parse().map_err(|_| {
                    PccError::format(name, at(), format!("column {}: not a number: {f:?}", j))
                })?;
                if !v.is_finite() {
                    return Err(PccError::format(name, at(), format!("column {j}: non-finite value")));
                }
                values.push(v);
            }
        }
    }
    let width = width.ok_or_else(|| PccError::format(name, "line 1", "no data rows"))?;
    let features = DenseMatrix::from_col_major(width - 1, labels.len(), values)?;
    LabeledDataset::with_class_names(name, features, labels, class_names)
}

pub fn load_table(path: &Path, format: TableFormat) -> Result<LabeledDataset> {
    let text = fs::read_to_string(path).map_err(|e| PccError::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    parse_table(&text, format, &name)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "b,1.5,2\na,0.25,-3\nb,4,0\n";

    fn fmt(col: isize, delimiter: char) -> TableFormat {
        TableFormat {
            label_column: LabelColumn(col),
            delimiter,
        }
    }

    #[test]
    fn three_line_fixture() {
        let d = parse_table(FIXTURE, fmt(0, ','), "fx").unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.len(), 3);
        assert_eq!(d.n_classes(), 2);
        assert_eq!(d.class_names(), &["b".to_string(), "a".to_string()]);
        assert_eq!(d.labels(), &[0, 1, 0]);
        assert_eq!(d.instance(0), &[1.5, 2.0]);
        assert_eq!(d.instance(1), &[0.25, -3.0]);
        assert_eq!(d.instance(2), &[4.0, 0.0]);
    }

    #[test]
    fn last_column_and_whitespace() {
        let d = parse_table("1 2  x\n3   4 y\n", fmt(-1, ' '), "ws").unwrap();
        assert_eq!(d.instance(1), &[3.0, 4.0]);
        assert_eq!(d.labels(), &[0, 1]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_table("1,2,a\n\n1,2\n", fmt(-1, ','), "r").unwrap_err();
        assert!(matches!(e, PccError::Format { ref location, .. } if location == "line 3"));
        let e = parse_table("1,2,a\n1,zz,b\n", fmt(-1, ','), "r").unwrap_err();
        assert!(matches!(e, PccError::Format { ref location, .. } if location == "line 2"));
        assert!(parse_table("1,2\n", fmt(5, ','), "r").is_err());
        assert!(parse_table("# nothing\n", fmt(0, ','), "r").is_err());
    }
}
