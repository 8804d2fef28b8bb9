use std::fs;
use std::path::Path;

use super::LabeledDataset;
use crate::error::{PccError, Result};
use crate::linalg::DenseMatrix;

/// Which instances the per-dimension maxima are taken over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RescaleScope {
    /// Maxima from the training split only, applied to both splits.
    #[default]
    TrainOnly,
    /// Maxima from the whole dataset before splitting.
    WholeDataset,
}

/// Per-dimension divisors mapping each feature into `[0, 1]` on the set it
/// was fitted on (for non-negative features).
#[derive(Clone, Debug, PartialEq)]
pub struct Rescaler {
    divisors: Vec<f64>,
}

const HEADER: &str = "# pcc-rescaler v1";

impl Rescaler {
    /// Divisor of each dimension is its largest absolute value, or 1 when
    /// the dimension is identically zero.
    pub fn fit(features: &DenseMatrix) -> Result<Self> {
        if features.cols() == 0 {
            return Err(PccError::Precondition(
                "cannot fit a rescaler on an empty dataset".into(),
            ));
        }
        let mut divisors = vec![0.0f64; features.rows()];
        for x in features.columns() {
            for (m, v) in divisors.iter_mut().zip(x) {
                *m = m.max(v.abs());
            }
        }
        for m in &mut divisors {
            if *m == 0.0 {
                *m = 1.0;
            }
        }
        Ok(Rescaler { divisors })
    }

    pub fn from_divisors(divisors: Vec<f64>) -> Result<Self> {
        if let Some(bad) = divisors.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(PccError::Domain(format!("rescaler divisor {bad} is not positive")));
        }
        Ok(Rescaler { divisors })
    }

    pub fn identity(dim: usize) -> Self {
        Rescaler {
            divisors: vec![1.0; dim],
        }
    }

    pub fn divisors(&self) -> &[f64] {
        &self.divisors
    }

    pub fn dim(&self) -> usize {
        self.divisors.len()
    }

    pub fn apply_in_place(&self, x: &mut [f64]) -> Result<()> {
        if x.len() != self.divisors.len() {
            return Err(PccError::Shape(format!(
                "vector of length {} for a rescaler of dimension {}",
                x.len(),
                self.divisors.len()
            )));
        }
        for (v, d) in x.iter_mut().zip(&self.divisors) {
            *v /= d;
        }
        Ok(())
    }

    pub fn apply(&self, data: &LabeledDataset) -> Result<LabeledDataset> {
        let mut x = data.features().clone();
        for j in 0..x.cols() {
            self.apply_in_place(x.column_mut(j))?;
        }
        Ok(data.with_features(x))
    }

    /// One divisor per line after a header line, shortest round-trip form.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = String::from(HEADER);
        text.push('\n');
        for d in &self.divisors {
            text.push_str(&format!("{d:?}\n"));
        }
        fs::write(path, text).map_err(|e| PccError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| PccError::io(path, e))?;
        let name = path.display().to_string();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == HEADER => {}
            _ => return Err(PccError::format(&name, "line 1", "missing rescaler header")),
        }
        let mut divisors = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| {
                PccError::format(&name, format!("line {}", i + 1), format!("bad number {line:?}"))
            })?;
            divisors.push(v);
        }
        Rescaler::from_divisors(divisors)
    }
}

pub fn fit_rescaler(data: &LabeledDataset) -> Result<Rescaler> {
    Rescaler::fit(data.features())
}

pub fn apply_rescaler(rescaler: &Rescaler, data: &LabeledDataset) -> Result<LabeledDataset> {
    rescaler.apply(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(rows: &[&[f64]]) -> LabeledDataset {
        let x = DenseMatrix::from_rows(rows).unwrap();
        let n = x.cols();
        LabeledDataset::new("t", x, vec![0; n], 2).unwrap()
    }

    #[test]
    fn zero_column_keeps_divisor_one() {
        let d = data(&[&[0.0, 0.0, 0.0], &[1.0, 4.0, 2.0]]);
        let r = fit_rescaler(&d).unwrap();
        assert_eq!(r.divisors(), &[1.0, 4.0]);
        let s = apply_rescaler(&r, &d).unwrap();
        assert_eq!(s.features().row(0), vec![0.0, 0.0, 0.0]);
        assert_eq!(s.features().get(1, 2), 0.5);
    }

    #[test]
    fn refit_on_rescaled_is_unit() {
        let d = data(&[&[3.0, 7.5, 1.0], &[-2.0, 0.5, 1.5]]);
        let r = fit_rescaler(&d).unwrap();
        let s = r.apply(&d).unwrap();
        let again = fit_rescaler(&s).unwrap();
        assert!(again.divisors().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.scale");
        let r = Rescaler::from_divisors(vec![0.1, 255.0, 1.0 / 3.0]).unwrap();
        r.save(&p).unwrap();
        assert_eq!(Rescaler::load(&p).unwrap(), r);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(Rescaler::fit(&DenseMatrix::zeros(3, 0)).is_err());
        assert!(Rescaler::from_divisors(vec![0.0]).is_err());
    }
}
