use std::time::Instant;

use super::{evaluate, InputSetKind};
use crate::datasets::LabeledDataset;
use crate::encoding::EncodingSpec;
use crate::error::Result;
use crate::model::PccModel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchmarkConfig {
    pub alpha: f64,
    pub n_e: usize,
}

pub const DEFAULT_BENCHMARK_CONFIGS: [BenchmarkConfig; 2] = [
    BenchmarkConfig { alpha: 0.9, n_e: 16 },
    BenchmarkConfig { alpha: 0.02, n_e: 618 },
];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkRow {
    pub config: BenchmarkConfig,
    pub accuracy: f64,
    pub parameters: usize,
    pub fit_seconds: f64,
    pub eval_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkReport {
    pub n_train: usize,
    pub n_test: usize,
    pub rows: Vec<BenchmarkRow>,
}

const REFERENCE_FOOTER: &str = "\
# reference (published): Efficient-CapsNet accuracy 0.99 parameters 161000
# reference (published): LeNet accuracy 0.99 parameters 60000
";

impl BenchmarkReport {
    /// Tab-delimited table with a comment header and footer.
    pub fn render(&self) -> String {
        let mut s = format!(
            "# N={} N'={} features scaled by 1/255 only; accuracy on the held-out set without labels\n\
             config\taccuracy\tparameters\tfit_seconds\teval_seconds\n",
            self.n_train, self.n_test
        );
        for r in &self.rows {
            s += &format!(
                "M{}_{}\t{:.4}\t{}\t{:.3}\t{:.3}\n",
                r.config.n_e, r.config.alpha, r.accuracy, r.parameters, r.fit_seconds, r.eval_seconds
            );
        }
        s + REFERENCE_FOOTER
    }
}

/// Fits each config on all of `train` and scores it on all of `test`
/// (no class block), timing the two phases separately.
pub fn benchmark_mnist_full(
    train: &LabeledDataset,
    test: &LabeledDataset,
    configs: &[BenchmarkConfig],
) -> Result<BenchmarkReport> {
    let mut rows = Vec::with_capacity(configs.len());
    for &config in configs {
        let spec = EncodingSpec::for_dataset(train, config.alpha)?;
        let t0 = Instant::now();
        let model = PccModel::fit(spec, train, config.n_e)?;
        let fit_seconds = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let accuracy = evaluate(&model, test, InputSetKind::TestNoLabels)?;
        let eval_seconds = t1.elapsed().as_secs_f64();
        rows.push(BenchmarkRow {
            config,
            accuracy,
            parameters: model.parameter_count(),
            fit_seconds,
            eval_seconds,
        });
    }
    Ok(BenchmarkReport {
        n_train: train.len(),
        n_test: test.len(),
        rows,
    })
}
