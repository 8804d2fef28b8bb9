//! The `pcc` command-line tool.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datasets::{
    load_mnist, load_table, LabelColumn, LabeledDataset, MnistPart, RescaleScope, Rescaler,
    TableFormat,
};
use crate::encoding::EncodingSpec;
use crate::error::{PccError, Result};
use crate::experiments::{
    benchmark_mnist_full, default_alphas, default_n_es, evaluate_split, grid_search_split, prepare,
    render_heatmap, render_projections, run_multi, select_hyperparameters, InputSetKind,
    PreparedSplit, Protocol, DEFAULT_BENCHMARK_CONFIGS,
};
use crate::linalg::DenseMatrix;
use crate::model::{load_model, save_model, PccModel};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "pcc", version, about = "Class-encoded principal component classifier")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "PCC_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train on a seeded split and save the model.
    Fit(FitArgs),
    /// Classify feature vectors with a saved model.
    Predict(PredictArgs),
    /// Accuracy heatmaps over the (alpha, n_e) grid.
    Grid(GridArgs),
    /// Mean and standard deviation of accuracies over repeated splits.
    Multirun(MultirunArgs),
    /// Fit on the full MNIST training file and score the full test file.
    BenchMnist(BenchArgs),
    /// Training-set coordinates on pairs of components.
    EmitProj(EmitProjArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RescaleArg {
    /// Maxima from the training split.
    Train,
    /// Maxima from the whole dataset.
    All,
    /// Features as loaded.
    None,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Delimited text file, one instance per row.
    #[arg(long, conflicts_with = "mnist", required_unless_present = "mnist")]
    pub data: Option<PathBuf>,

    /// Directory holding the four MNIST IDX files.
    #[arg(long)]
    pub mnist: Option<PathBuf>,

    /// Column holding the class (negative counts from the end).
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    pub label_col: isize,

    /// Field delimiter; a space splits on any whitespace.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// Training instances per class. Required with --data; with --mnist,
    /// omitting it uses the full official train and test files.
    #[arg(long)]
    pub per_class: Option<usize>,

    /// Test instances per class, drawn from what the training draw left.
    /// Defaults to the whole remainder (with --mnist: to --per-class).
    #[arg(long)]
    pub test_per_class: Option<usize>,

    /// Per-dimension max rescaling. Defaults to `train` for --data and
    /// `none` for --mnist (pixels are already divided by 255).
    #[arg(long, value_enum)]
    pub rescale: Option<RescaleArg>,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub alpha: f64,
    /// Number of retained components.
    #[arg(long)]
    pub ne: usize,
    /// Model file; the rescaler is written next to it with a `.scale` suffix.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Rescaler written by `fit`; omit to use features as given.
    #[arg(long)]
    pub scale: Option<PathBuf>,
    /// Feature rows (no class column).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Spacing of the alpha axis over [0, 1].
    #[arg(long, default_value_t = 0.02)]
    pub alpha_step: f64,
    /// Largest n_e on the grid (defaults to d_z).
    #[arg(long)]
    pub ne_max: Option<usize>,
    /// Heatmap file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MultirunArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub ne: usize,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory holding the four MNIST IDX files.
    #[arg(long)]
    pub mnist: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmitProjArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub ne: usize,
    /// Component pairs, e.g. `2,3;3,4` (1-based).
    #[arg(long, default_value = "2,3;3,4")]
    pub pairs: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Diagnostics go to `stderr`, results to `stdout`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // A pool may already exist when called repeatedly in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Fit(a) => fit(a, stdout),
        Command::Predict(a) => predict(a, stdout),
        Command::Grid(a) => grid(a, stdout, stderr),
        Command::Multirun(a) => multirun(a, stdout),
        Command::BenchMnist(a) => bench(a, stdout),
        Command::EmitProj(a) => emit_proj(a, stdout),
    }
}

fn out_err(e: std::io::Error) -> PccError {
    PccError::io("<stdout>", e)
}

fn write_or_print(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| PccError::io(p, e)),
        None => stdout.write_all(text.as_bytes()).map_err(out_err),
    }
}

fn scope(arg: Option<RescaleArg>, default: Option<RescaleScope>) -> Option<RescaleScope> {
    match arg {
        None => default,
        Some(RescaleArg::Train) => Some(RescaleScope::TrainOnly),
        Some(RescaleArg::All) => Some(RescaleScope::WholeDataset),
        Some(RescaleArg::None) => None,
    }
}

/// Loads the data source and builds the seeded split.
fn load_split(a: &DataArgs) -> Result<PreparedSplit> {
    if let Some(dir) = &a.mnist {
        let train = load_mnist(dir, MnistPart::Train)?;
        let rescale = scope(a.rescale, None);
        return match a.per_class {
            Some(k) => {
                let protocol = Protocol {
                    per_class: k,
                    test_per_class: Some(a.test_per_class.unwrap_or(k)),
                    rescale,
                };
                prepare(&train, &protocol, a.seed)
            }
            None => {
                let test = load_mnist(dir, MnistPart::Test)?;
                let rescaler = match rescale {
                    None => Rescaler::identity(train.dim()),
                    Some(RescaleScope::TrainOnly) => Rescaler::fit(train.features())?,
                    Some(RescaleScope::WholeDataset) => {
                        let mut r = Rescaler::fit(train.features())?.divisors().to_vec();
                        let t = Rescaler::fit(test.features())?;
                        r.iter_mut().zip(t.divisors()).for_each(|(a, b)| *a = a.max(*b));
                        Rescaler::from_divisors(r)?
                    }
                };
                Ok(PreparedSplit {
                    train: rescaler.apply(&train)?,
                    test: rescaler.apply(&test)?,
                    rescaler,
                    seed: a.seed,
                })
            }
        };
    }
    let path = a.data.as_ref().expect("clap enforces --data or --mnist");
    let format = TableFormat {
        label_column: LabelColumn(a.label_col),
        delimiter: a.delimiter,
    };
    let data = load_table(path, format)?;
    let per_class = a
        .per_class
        .ok_or_else(|| PccError::InvalidParameter("--per-class is required with --data".into()))?;
    let protocol = Protocol {
        per_class,
        test_per_class: a.test_per_class,
        rescale: scope(a.rescale, Some(RescaleScope::TrainOnly)),
    };
    prepare(&data, &protocol, a.seed)
}

fn fit(a: FitArgs, stdout: &mut dyn Write) -> Result<()> {
    let split = load_split(&a.data)?;
    let spec = EncodingSpec::for_dataset(&split.train, a.alpha)?;
    let model = PccModel::fit(spec, &split.train, a.ne)?.with_seed(split.seed);
    save_model(&model, &a.out)?;
    let mut scale_path = a.out.clone().into_os_string();
    scale_path.push(".scale");
    split.rescaler.save(Path::new(&scale_path))?;
    let acc = evaluate_split(&model, &split)?;
    writeln!(
        stdout,
        "fit {}: N={} N'={} alpha={} n_e={} d_z={} parameters={} seed={} \
         accuracy with_labels={:.4} train_no_labels={:.4} test_no_labels={:.4} -> {}",
        split.train.name(),
        split.train.len(),
        split.test.len(),
        a.alpha,
        a.ne,
        spec.d_z(),
        model.parameter_count(),
        split.seed,
        acc.get(InputSetKind::WithLabels),
        acc.get(InputSetKind::TrainNoLabels),
        acc.get(InputSetKind::TestNoLabels),
        a.out.display()
    )
    .map_err(out_err)
}

/// Feature rows without a class column.
fn read_features(path: &Path, delimiter: char, d_x: usize) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|e| PccError::io(path, e))?;
    let name = path.display().to_string();
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = if delimiter == ' ' {
            line.split_whitespace().collect()
        } else {
            line.split(delimiter).map(str::trim).collect()
        };
        let at = format!("line {}", i + 1);
        if fields.len() != d_x {
            return Err(PccError::format(
                &name,
                at,
                format!("{} fields, the model expects {d_x} features", fields.len()),
            ));
        }
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| PccError::format(&name, at.clone(), format!("not a number: {f:?}")))?;
            values.push(v);
        }
        rows += 1;
    }
    DenseMatrix::from_col_major(d_x, rows, values)
}

fn predict(a: PredictArgs, stdout: &mut dyn Write) -> Result<()> {
    let model = load_model(&a.model)?;
    let d_x = model.spec().d_x();
    let rescaler = match &a.scale {
        Some(p) => Rescaler::load(p)?,
        None => Rescaler::identity(d_x),
    };
    if rescaler.dim() != d_x {
        return Err(PccError::Shape(format!(
            "rescaler has {} dimensions, model has {d_x}",
            rescaler.dim()
        )));
    }
    let mut x = read_features(&a.input, a.delimiter, d_x)?;
    let mut out = String::from("label\tscores\n");
    for j in 0..x.cols() {
        rescaler.apply_in_place(x.column_mut(j))?;
        let p = model.predict_class(x.column(j))?;
        let scores: Vec<String> = p.scores.iter().map(|s| format!("{s:.6}")).collect();
        out += &format!("{}\t{}\n", p.label, scores.join(","));
    }
    stdout.write_all(out.as_bytes()).map_err(out_err)
}

fn alpha_axis(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(PccError::InvalidParameter(format!("--alpha-step must lie in (0, 1], got {step}")));
    }
    if (step - 0.02).abs() < 1e-15 {
        return Ok(default_alphas());
    }
    let n = (1.0 / step + 1e-9).floor() as usize;
    let mut axis: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(1.0)).collect();
    axis.dedup();
    Ok(axis)
}

fn grid(a: GridArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let alphas = alpha_axis(a.alpha_step)?;
    let split = load_split(&a.data)?;
    let d_z = split.train.dim() + split.train.n_classes();
    let mut n_es = default_n_es(d_z);
    if let Some(m) = a.ne_max {
        if m == 0 || m > d_z {
            return Err(PccError::InvalidParameter(format!("--ne-max must lie in [1, {d_z}]")));
        }
        n_es.truncate(m);
    }
    let result = grid_search_split(&split, &alphas, &n_es)?;
    write_or_print(a.out.as_deref(), &render_heatmap(&result), stdout)?;
    let (alpha, n_e) = select_hyperparameters(&result, InputSetKind::TrainNoLabels);
    writeln!(
        stderr,
        "selected alpha={alpha} n_e={n_e} (best train_no_labels accuracy {:.4})",
        result.max(InputSetKind::TrainNoLabels)
    )
    .map_err(out_err)
}

fn multirun(a: MultirunArgs, stdout: &mut dyn Write) -> Result<()> {
    let (data, protocol) = multirun_source(&a.data)?;
    let summary = run_multi(&data, &protocol, a.alpha, a.ne, a.runs, a.data.seed)?;
    write_or_print(a.out.as_deref(), &summary.render(), stdout)
}

fn multirun_source(a: &DataArgs) -> Result<(LabeledDataset, Protocol)> {
    let per_class = a
        .per_class
        .ok_or_else(|| PccError::InvalidParameter("--per-class is required".into()))?;
    if let Some(dir) = &a.mnist {
        let protocol = Protocol {
            per_class,
            test_per_class: Some(a.test_per_class.unwrap_or(per_class)),
            rescale: scope(a.rescale, None),
        };
        return Ok((load_mnist(dir, MnistPart::Train)?, protocol));
    }
    let path = a.data.as_ref().expect("clap enforces --data or --mnist");
    let format = TableFormat {
        label_column: LabelColumn(a.label_col),
        delimiter: a.delimiter,
    };
    let protocol = Protocol {
        per_class,
        test_per_class: a.test_per_class,
        rescale: scope(a.rescale, Some(RescaleScope::TrainOnly)),
    };
    Ok((load_table(path, format)?, protocol))
}

fn bench(a: BenchArgs, stdout: &mut dyn Write) -> Result<()> {
    let train = load_mnist(&a.mnist, MnistPart::Train)?;
    let test = load_mnist(&a.mnist, MnistPart::Test)?;
    let report = benchmark_mnist_full(&train, &test, &DEFAULT_BENCHMARK_CONFIGS)?;
    write_or_print(a.out.as_deref(), &report.render(), stdout)
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let bad = || PccError::InvalidParameter(format!("bad component pair {p:?}"));
            let (a, b) = p.split_once(',').ok_or_else(bad)?;
            Ok((
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn emit_proj(a: EmitProjArgs, stdout: &mut dyn Write) -> Result<()> {
    let pairs = parse_pairs(&a.pairs)?;
    let split = load_split(&a.data)?;
    let spec = EncodingSpec::for_dataset(&split.train, a.alpha)?;
    let model = PccModel::fit(spec, &split.train, a.ne)?;
    let text = render_projections(&model, &split.train, &pairs)?;
    write_or_print(a.out.as_deref(), &text, stdout)
}
