use super::{evaluate_split, prepare, Accuracies, InputSetKind, Protocol};
use crate::datasets::LabeledDataset;
use crate::encoding::EncodingSpec;
use crate::error::{PccError, Result};
use crate::model::PccModel;

/// Per-set mean and sample standard deviation over repeated splits.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiRunSummary {
    pub alpha: f64,
    pub n_e: usize,
    pub seeds: Vec<u64>,
    pub runs: Vec<Accuracies>,
    pub means: Accuracies,
    pub stds: Accuracies,
}

impl MultiRunSummary {
    /// Tab-delimited table: one line per set plus a seed comment.
    pub fn render(&self) -> String {
        let mut s = format!(
            "# alpha={} n_e={} runs={} seeds={}..={}\nset\tmean\tstd\n",
            self.alpha,
            self.n_e,
            self.runs.len(),
            self.seeds[0],
            self.seeds[self.seeds.len() - 1]
        );
        for kind in InputSetKind::ALL {
            s += &format!("{}\t{:.6}\t{:.6}\n", kind.tag(), self.means.get(kind), self.stds.get(kind));
        }
        s
    }
}

/// Refits on `runs` splits seeded `base_seed + i`; standard deviations use
/// the `n − 1` denominator and are 0 for a single run.
pub fn run_multi(
    data: &LabeledDataset,
    protocol: &Protocol,
    alpha: f64,
    n_e: usize,
    runs: usize,
    base_seed: u64,
) -> Result<MultiRunSummary> {
    if runs == 0 {
        return Err(PccError::InvalidParameter("runs must be at least 1".into()));
    }
    let spec = EncodingSpec::for_dataset(data, alpha)?;
    let seeds: Vec<u64> = (0..runs as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let mut results = Vec::with_capacity(runs);
    for &seed in &seeds {
        let split = prepare(data, protocol, seed)?;
        let model = PccModel::fit(spec, &split.train, n_e)?.with_seed(seed);
        results.push(evaluate_split(&model, &split)?);
    }
    let n = runs as f64;
    let mut means = [0.0; 3];
    let mut stds = [0.0; 3];
    for k in 0..3 {
        means[k] = results.iter().map(|r| r.0[k]).sum::<f64>() / n;
        if runs > 1 {
            let ss: f64 = results.iter().map(|r| (r.0[k] - means[k]).powi(2)).sum();
            stds[k] = (ss / (n - 1.0)).sqrt();
        }
    }
    Ok(MultiRunSummary {
        alpha,
        n_e,
        seeds,
        runs: results,
        means: Accuracies(means),
        stds: Accuracies(stds),
    })
}
