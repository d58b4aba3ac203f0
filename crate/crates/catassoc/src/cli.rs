//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error (bad flags or names that do not fit
//! the data), 2 data error (unreadable input or undefined statistics).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use catassoc_core::equivalence::{check, Determination, EquivalenceLevel, Relation, Witness};
use catassoc_core::prediction::ProportionalPredictor;
use catassoc_core::resampling::{bootstrap, BootstrapConfig, ReductionStatistic, TauStatistic};
use catassoc_core::scenarios::{generate_flu, FluScenarioConfig};
use catassoc_core::selection::{
    select_structural, select_supervised, verify_basis, SelectionConfig, SelectionResult,
    DEFAULT_EPSILON, DEFAULT_MAX_CELLS,
};
use catassoc_core::{
    gamma_matrix, theta_vector, CategoricalDataset, ContingencyTable, MissingPolicy, WeightScheme,
};

use crate::error::{Error, Result};
use crate::format::{Cell, Mode, OutputFormat, Report};
use crate::io::{load_delimited, save_delimited, LoadOptions, DEFAULT_MISSING_TOKEN};
use crate::parallel::RayonExecutor;

#[derive(Debug, Parser)]
#[command(
    name = "catassoc",
    version,
    about = "Association matrices, vectors and weighted tau for categorical data"
)]
pub struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "CATASSOC_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Human)]
    format: Mode,
    /// Decimal places for reals.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
    /// Field delimiter for input and delimited output (`tab` for a tab).
    #[arg(long, global = true, default_value = ",")]
    delimiter: String,
    #[arg(long, global = true, default_value = DEFAULT_MISSING_TOKEN)]
    missing_token: String,
    #[arg(long, global = true, value_enum, default_value_t = PolicyArg::OwnCategory)]
    missing_policy: PolicyArg,
    /// Column holding per-row mass (counts or probabilities).
    #[arg(long, global = true)]
    mass_column: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    OwnCategory,
    DropRow,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Variables, levels and masses of a file.
    Inspect { file: PathBuf },
    /// Association matrix gamma(Y|X).
    Matrix(Given),
    /// Association vector Theta(Y|X).
    Vector(Given),
    /// Weighted tau(Y|X).
    Tau {
        #[command(flatten)]
        given: Given,
        /// gk, equal, invprob, all, or file:<path>.
        #[arg(long, default_value = "gk")]
        weights: String,
    },
    /// Greedy basis selection.
    Select {
        #[command(subcommand)]
        kind: SelectKind,
    },
    /// Equivalence relations E1..E5 between two explanatory sets.
    Equiv {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        x1: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        x2: Vec<String>,
        #[arg(long)]
        response: String,
        /// 1, 2, 2', 3, 4 or 5; all relations when absent.
        #[arg(long)]
        level: Option<String>,
        #[arg(long, default_value_t = catassoc_core::equivalence::DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value = "gk")]
        weights: String,
    },
    /// Proportional prediction from a training file scored on a test file.
    Predict {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        response: String,
        #[arg(long, value_delimiter = ',', required = true)]
        given: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Stratified bootstrap of an association statistic.
    Bootstrap {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = StatArg::Reduction)]
        stat: StatArg,
        #[arg(long)]
        response: String,
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
        /// Reference set for `reduction`; every other variable when absent.
        #[arg(long, value_delimiter = ',')]
        full: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'B', long = "iterations", default_value_t = 1000)]
        iterations: usize,
        /// Rows per resample; the dataset size when absent.
        #[arg(short = 'n', long = "sample-size")]
        sample_size: Option<usize>,
        /// Stratification variable (default the response; `none` disables).
        #[arg(long)]
        stratify: Option<String>,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        #[arg(long, default_value = "gk")]
        weights: String,
    },
    /// Generate synthetic data.
    Simulate {
        #[command(subcommand)]
        kind: SimulateKind,
    },
}

#[derive(Debug, Args)]
struct Given {
    file: PathBuf,
    #[arg(long)]
    response: String,
    #[arg(long, value_delimiter = ',', required = true)]
    given: Vec<String>,
}

#[derive(Debug, Args)]
struct SelectOpts {
    /// Candidate variables; every non-response variable when absent.
    #[arg(long, value_delimiter = ',')]
    candidates: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    max_cells: usize,
    #[arg(long)]
    max_vars: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum SelectKind {
    /// Association basis for a response.
    Supervised {
        file: PathBuf,
        #[arg(long)]
        response: String,
        #[arg(long, default_value = "gk")]
        weights: String,
        #[command(flatten)]
        opts: SelectOpts,
    },
    /// Structural basis determining every candidate.
    Structural {
        file: PathBuf,
        #[command(flatten)]
        opts: SelectOpts,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StatArg {
    Reduction,
    Tau,
}

#[derive(Debug, Subcommand)]
enum SimulateKind {
    /// Two-test flu scenario with noisy copies R3, R4 and S5 = X1*X2*Z.
    Flu {
        #[arg(short = 'n', default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        #[arg(long, default_value_t = 0.10)]
        flip_prob: f64,
        #[arg(long, default_value_t = 0.8)]
        s5_prob: f64,
        /// Also flip negative tests to positive.
        #[arg(long)]
        symmetric_noise: bool,
        /// Keep the conditional table's literal test roles.
        #[arg(long)]
        literal_roles: bool,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T, O, E>(args: I, out: &mut O, err: &mut E) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            return match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand
                    if e.exit_code() == 0 =>
                {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => match report.write_to(out, &cli.output_format()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                2
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

impl Cli {
    fn delimiter(&self) -> Result<u8> {
        match self.delimiter.as_str() {
            "tab" | "\\t" | "\t" => Ok(b'\t'),
            d if d.len() == 1 => Ok(d.as_bytes()[0]),
            d => Err(Error::usage(
                "--delimiter",
                format!("expected a single byte or 'tab', got '{d}'"),
            )),
        }
    }

    fn output_format(&self) -> OutputFormat {
        OutputFormat {
            mode: self.format,
            precision: usize::from(self.precision),
            delimiter: self.delimiter().unwrap_or(b','),
        }
    }

    fn load_options(&self) -> Result<LoadOptions> {
        Ok(LoadOptions {
            delimiter: self.delimiter()?,
            missing_token: self.missing_token.clone(),
            missing_policy: match self.missing_policy {
                PolicyArg::OwnCategory => MissingPolicy::OwnCategory,
                PolicyArg::DropRow => MissingPolicy::DropRow,
            },
            mass_column: self.mass_column.clone(),
        })
    }

    fn load(&self, path: &Path) -> Result<CategoricalDataset> {
        Ok(load_delimited(path, &self.load_options()?)?.dataset)
    }

    fn executor(&self) -> Result<RayonExecutor> {
        match self.threads {
            None => Ok(RayonExecutor::new()),
            Some(n) => {
                RayonExecutor::with_threads(n).map_err(|e| Error::usage("--threads", e.to_string()))
            }
        }
    }
}

fn variable(ds: &CategoricalDataset, flag: &str, name: &str) -> Result<usize> {
    ds.index_of(name).map_err(|_| {
        let names: Vec<&str> = ds.variables().iter().map(|v| v.name()).collect();
        Error::usage(
            flag,
            format!(
                "unknown variable '{name}' (available: {})",
                names.join(", ")
            ),
        )
    })
}

fn variables(ds: &CategoricalDataset, flag: &str, names: &[String]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let v = variable(ds, flag, name)?;
        if out.contains(&v) {
            return Err(Error::usage(
                flag,
                format!("variable '{name}' listed twice"),
            ));
        }
        out.push(v);
    }
    Ok(out)
}

fn names(ds: &CategoricalDataset, indices: &[usize]) -> Vec<String> {
    indices
        .iter()
        .map(|&v| ds.variable(v).name().to_string())
        .collect()
}

fn level_labels(ds: &CategoricalDataset, y: usize, codes: &[usize]) -> Vec<String> {
    codes
        .iter()
        .map(|&c| ds.variable(y).level(c).to_string())
        .collect()
}

/// Resolves a `--weights` value against the response's cardinality.
fn weight_scheme(name: &str, flag: &str, y_levels: usize) -> Result<WeightScheme> {
    match name {
        "gk" | "goodman-kruskal" => Ok(WeightScheme::GoodmanKruskal),
        "equal" | "ew" => Ok(WeightScheme::Equal),
        "invprob" | "ipw" => Ok(WeightScheme::InverseProbability),
        s if s.starts_with("file:") => {
            let path = Path::new(&s[5..]);
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let mut raw = Vec::new();
            for token in text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
            {
                let w: f64 = token.parse().map_err(|_| {
                    Error::usage(
                        flag,
                        format!("'{token}' in {} is not a number", path.display()),
                    )
                })?;
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::usage(
                        flag,
                        format!("weight {w} must be non-negative"),
                    ));
                }
                raw.push(w);
            }
            if raw.len() != y_levels {
                return Err(Error::usage(
                    flag,
                    format!("{} weights for {y_levels} response levels", raw.len()),
                ));
            }
            if raw.iter().sum::<f64>() <= 0.0 {
                return Err(Error::usage(flag, "weights sum to zero"));
            }
            Ok(WeightScheme::Custom(raw))
        }
        other => Err(Error::usage(
            flag,
            format!("unknown scheme '{other}' (expected gk, equal, invprob or file:<path>)"),
        )),
    }
}

fn table(ds: &CategoricalDataset, given: &Given) -> Result<(usize, Vec<usize>, ContingencyTable)> {
    let y = variable(ds, "--response", &given.response)?;
    let x = variables(ds, "--given", &given.given)?;
    if x.contains(&y) {
        return Err(Error::usage("--given", "must not contain the response"));
    }
    let composite = ds.compose(&x)?;
    Ok((y, x, ds.contingency(&composite, y)?))
}

fn execute(cli: &Cli) -> Result<Report> {
    let mut r = Report::new();
    match &cli.command {
        Command::Inspect { file } => {
            let loaded = load_delimited(file, &cli.load_options()?)?;
            let ds = &loaded.dataset;
            r.scalar("records", loaded.records)
                .scalar("rows", ds.n_rows())
                .scalar("dropped_rows", loaded.dropped_rows)
                .scalar("total_mass", ds.total_mass())
                .scalar("unit_mass", ds.is_unit_mass())
                .scalar("variables", ds.n_variables());
            let rows = ds
                .variables()
                .iter()
                .map(|v| {
                    vec![
                        Cell::from(v.name()),
                        Cell::from(v.cardinality()),
                        Cell::from(v.levels().join("|")),
                    ]
                })
                .collect();
            r.table("variable", &["name", "levels", "labels"], rows);
        }
        Command::Matrix(given) => {
            let ds = cli.load(&given.file)?;
            let (y, x, t) = table(&ds, given)?;
            let g = gamma_matrix(&t)?;
            let labels = level_labels(&ds, y, g.levels());
            let values: Vec<Vec<f64>> = (0..g.size()).map(|s| g.row(s).to_vec()).collect();
            r.scalar("response", given.response.as_str())
                .list("given", &names(&ds, &x))
                .list("p", &fmt_reals(g.y_marginal(), cli.precision))
                .matrix("gamma", labels.clone(), labels, &values)
                .list("dropped_levels", &level_labels(&ds, y, g.dropped_levels()));
        }
        Command::Vector(given) => {
            let ds = cli.load(&given.file)?;
            let (y, x, t) = table(&ds, given)?;
            let theta = theta_vector(&t)?;
            r.scalar("response", given.response.as_str())
                .list("given", &names(&ds, &x));
            for (&s, &v) in theta.levels().iter().zip(theta.components()) {
                r.scalar(format!("theta.{}", ds.variable(y).level(s)), v);
            }
            r.list(
                "excluded_levels",
                &level_labels(&ds, y, theta.excluded_levels()),
            );
        }
        Command::Tau { given, weights } => {
            let ds = cli.load(&given.file)?;
            let (y, x, t) = table(&ds, given)?;
            let theta = theta_vector(&t)?;
            r.scalar("response", given.response.as_str())
                .list("given", &names(&ds, &x));
            let specs: Vec<&str> = if weights == "all" {
                vec!["gk", "equal", "invprob"]
            } else {
                vec![weights.as_str()]
            };
            let p = theta.renormalized_marginal();
            for name in specs {
                let scheme = weight_scheme(name, "--weights", ds.variable(y).cardinality())?;
                let alpha = scheme.resolve(&p, theta.levels())?;
                let key = scheme.name();
                r.scalar(format!("tau.{key}"), theta.tau(&scheme)?)
                    .list(
                        format!("alpha.{key}"),
                        &fmt_reals(alpha.as_slice(), cli.precision),
                    )
                    .scalar(format!("regular.{key}"), alpha.is_regular());
            }
        }
        Command::Select { kind } => {
            let exec = cli.executor()?;
            let (file, opts) = match kind {
                SelectKind::Supervised { file, opts, .. }
                | SelectKind::Structural { file, opts } => (file, opts),
            };
            let ds = cli.load(file)?;
            let y = match kind {
                SelectKind::Supervised { response, .. } => {
                    Some(variable(&ds, "--response", response)?)
                }
                SelectKind::Structural { .. } => None,
            };
            let candidates = match &opts.candidates {
                Some(list) => variables(&ds, "--candidates", list)?,
                None => (0..ds.n_variables()).filter(|&v| Some(v) != y).collect(),
            };
            if y.is_some_and(|y| candidates.contains(&y)) {
                return Err(Error::usage(
                    "--candidates",
                    "must not contain the response",
                ));
            }
            let mut config = SelectionConfig {
                epsilon: opts.epsilon,
                max_vars: opts.max_vars,
                max_cells: Some(opts.max_cells),
                ..SelectionConfig::default()
            };
            if let SelectKind::Supervised { weights, .. } = kind {
                let levels = ds.variable(y.unwrap_or(0)).cardinality();
                config.weights = weight_scheme(weights, "--weights", levels)?;
            }
            let result = match y {
                Some(y) => select_supervised(&ds, y, &candidates, &config, &exec)?,
                None => select_structural(&ds, &candidates, &config, &exec)?,
            };
            let verify = verify_basis(&ds, &result.basis, y, &candidates, &config)?;
            if let Some(y) = y {
                r.scalar("response", ds.variable(y).name())
                    .scalar("weights", config.weights.name());
            }
            r.list("candidates", &names(&ds, &candidates));
            selection_report(&mut r, &ds, &result, y.is_some());
            if y.is_some() {
                if let Some(tb1) = verify.checks.iter().find(|c| c.condition == "TB1") {
                    r.scalar("full_value", tb1.reference);
                }
            }
            r.scalar("basis_cells", verify.basis_cells)
                .scalar("verified", verify.holds());
        }
        Command::Equiv {
            file,
            x1,
            x2,
            response,
            level,
            tol,
            weights,
        } => {
            let ds = cli.load(file)?;
            let y = variable(&ds, "--response", response)?;
            let a = variables(&ds, "--x1", x1)?;
            let b = variables(&ds, "--x2", x2)?;
            let scheme = weight_scheme(weights, "--weights", ds.variable(y).cardinality())?;
            let relations: Vec<Relation> = match level {
                None => Relation::ALL.to_vec(),
                Some(l) => vec![parse_relation(l)?],
            };
            r.scalar("response", response.as_str())
                .list("x1", &names(&ds, &a))
                .list("x2", &names(&ds, &b));
            let mut rows = Vec::new();
            for relation in relations {
                let level = EquivalenceLevel::new(relation)
                    .with_tolerance(*tol)
                    .with_weights(scheme.clone());
                let report = check(&ds, &a, &b, y, &level)?;
                let witness = report
                    .witness
                    .as_ref()
                    .map_or_else(String::new, |w| witness_text(&ds, y, w, cli.precision));
                rows.push(vec![
                    Cell::from(relation.label()),
                    Cell::from(report.holds),
                    Cell::from(witness),
                    Cell::from(report.irregular_weights),
                ]);
            }
            r.table(
                "relation",
                &["name", "holds", "witness", "irregular_weights"],
                rows,
            );
        }
        Command::Predict {
            train,
            test,
            response,
            given,
            seed,
        } => {
            let exec = cli.executor()?;
            let train_ds = cli.load(train)?;
            let test_ds = cli.load(test)?;
            let y = variable(&train_ds, "--response", response)?;
            let x = variables(&train_ds, "--given", given)?;
            let predictor = ProportionalPredictor::fit(&train_ds, &x, y, *seed)?;
            let cm = predictor.predict_and_score(&test_ds, &exec)?;
            let labels = cm.levels().to_vec();
            let counts: Vec<Vec<u64>> = (0..cm.size())
                .map(|s| (0..cm.size()).map(|t| cm.count(s, t)).collect())
                .collect();
            let g = gamma_matrix(&train_ds.contingency(&train_ds.compose(&x)?, y)?)?;
            r.scalar("response", response.as_str())
                .list("given", predictor.given())
                .scalar("seed", *seed)
                .scalar("test_rows", cm.total())
                .matrix("confusion", labels.clone(), labels.clone(), &counts)
                .matrix(
                    "confusion_rate",
                    labels.clone(),
                    labels,
                    &cm.row_normalized(),
                )
                .scalar("accuracy", cm.accuracy());
            for (&s, acc) in g.levels().iter().zip(g.expected_accuracy()) {
                r.scalar(
                    format!("expected_accuracy.{}", train_ds.variable(y).level(s)),
                    acc,
                );
            }
        }
        Command::Bootstrap {
            file,
            stat,
            response,
            subset,
            full,
            seed,
            iterations,
            sample_size,
            stratify,
            confidence,
            weights,
        } => {
            let exec = cli.executor()?;
            let ds = cli.load(file)?;
            let y = variable(&ds, "--response", response)?;
            let sub = variables(&ds, "--subset", subset)?;
            let scheme = weight_scheme(weights, "--weights", ds.variable(y).cardinality())?;
            let strata = match stratify.as_deref() {
                None => Some(y),
                Some("none") => None,
                Some(name) => Some(variable(&ds, "--stratify", name)?),
            };
            let mut config =
                BootstrapConfig::new(*iterations, sample_size.unwrap_or(ds.n_rows()), *seed)
                    .with_confidence(*confidence);
            config.stratify_by = strata;
            r.scalar(
                "statistic",
                match stat {
                    StatArg::Reduction => "reduction",
                    StatArg::Tau => "tau",
                },
            )
            .scalar("response", response.as_str())
            .scalar("weights", scheme.name())
            .list("subset", &names(&ds, &sub));
            let summary = match stat {
                StatArg::Reduction => {
                    let full_set = match full {
                        Some(list) => variables(&ds, "--full", list)?,
                        None => (0..ds.n_variables()).filter(|&v| v != y).collect(),
                    };
                    if let Some(v) = sub.iter().find(|v| !full_set.contains(v)) {
                        return Err(Error::usage(
                            "--subset",
                            format!("'{}' is not in the reference set", ds.variable(*v).name()),
                        ));
                    }
                    r.list("full", &names(&ds, &full_set));
                    let statistic = ReductionStatistic {
                        y,
                        subset: sub,
                        full: full_set,
                        weights: scheme,
                    };
                    bootstrap(&ds, &statistic, &config, &exec)?
                }
                StatArg::Tau => {
                    let statistic = TauStatistic {
                        y,
                        given: sub,
                        weights: scheme,
                    };
                    bootstrap(&ds, &statistic, &config, &exec)?
                }
            };
            r.scalar("stratify", strata.map_or("none", |v| ds.variable(v).name()))
                .scalar("iterations", summary.iterations)
                .scalar("failed", summary.failed)
                .scalar("sample_size", summary.sample_size)
                .scalar("seed", summary.seed)
                .scalar("confidence", summary.confidence)
                .scalar("point_estimate", summary.point_estimate)
                .scalar("mean", summary.mean)
                .scalar("ci_low", summary.ci_low)
                .scalar("ci_high", summary.ci_high);
        }
        Command::Simulate {
            kind:
                SimulateKind::Flu {
                    n,
                    seed,
                    output,
                    flip_prob,
                    s5_prob,
                    symmetric_noise,
                    literal_roles,
                },
        } => {
            if *n == 0 {
                return Err(Error::usage("-n", "must be at least 1"));
            }
            let config = FluScenarioConfig {
                n: *n,
                seed: *seed,
                flip_prob: *flip_prob,
                s5_prob: *s5_prob,
                one_sided_noise: !symmetric_noise,
                swap_test_roles: !literal_roles,
            };
            let ds = generate_flu(&config, &cli.executor()?)?;
            save_delimited(output, &ds, cli.delimiter()?)?;
            r.scalar("output", output.display().to_string())
                .scalar("rows", ds.n_rows())
                .scalar("seed", *seed)
                .list(
                    "columns",
                    &names(&ds, &(0..ds.n_variables()).collect::<Vec<_>>()),
                );
        }
    }
    Ok(r)
}

fn fmt_reals(values: &[f64], precision: u8) -> Vec<String> {
    let p = usize::from(precision);
    values.iter().map(|v| format!("{v:.p$}")).collect()
}

fn selection_report(
    r: &mut Report,
    ds: &CategoricalDataset,
    result: &SelectionResult,
    supervised: bool,
) {
    let value = if supervised { "tau" } else { "ep" };
    r.list("basis", &names(ds, &result.basis));
    let rows = result
        .trace
        .iter()
        .enumerate()
        .map(|(k, step)| {
            vec![
                Cell::from(k + 1),
                Cell::from(ds.variable(step.added).name()),
                Cell::from(step.value),
                Cell::from(step.cells),
            ]
        })
        .collect();
    r.table("trace", &["step", "added", value, "cells"], rows);
    r.list("removed", &names(ds, &result.removed));
    let skipped: Vec<String> = result
        .skipped
        .iter()
        .map(|&(v, cells)| format!("{}({cells})", ds.variable(v).name()))
        .collect();
    r.list("skipped", &skipped)
        .scalar("forward_value", result.forward_value)
        .scalar("final_value", result.final_value)
        .scalar(
            "terminated_by",
            format!("{:?}", result.terminated_by).to_lowercase(),
        );
}

fn parse_relation(level: &str) -> Result<Relation> {
    match level.trim_start_matches(['E', 'e']) {
        "1" => Ok(Relation::E1),
        "2" => Ok(Relation::E2),
        "2'" | "2p" | "2prime" => Ok(Relation::E2Prime),
        "3" => Ok(Relation::E3),
        "4" => Ok(Relation::E4),
        "5" => Ok(Relation::E5),
        other => Err(Error::usage(
            "--level",
            format!("unknown level '{other}' (expected 1, 2, 2', 3, 4 or 5)"),
        )),
    }
}

fn witness_text(ds: &CategoricalDataset, y: usize, w: &Witness, precision: u8) -> String {
    let p = usize::from(precision);
    let level = |s: usize| ds.variable(y).level(s).to_string();
    match w {
        Witness::NotDetermined { which, tau } => {
            let what = match which {
                Determination::X1GivenX2 => "tau(X1|X2)",
                Determination::X2GivenX1 => "tau(X2|X1)",
                Determination::YGivenX1 => "tau(Y|X1)",
                Determination::YGivenX2 => "tau(Y|X2)",
            };
            format!("{what}={tau:.p$}")
        }
        Witness::GammaEntry { s, t, left, right } => {
            format!(
                "gamma[{},{}] {left:.p$} vs {right:.p$}",
                level(*s),
                level(*t)
            )
        }
        Witness::ThetaComponent { s, left, right } => {
            format!("theta[{}] {left:.p$} vs {right:.p$}", level(*s))
        }
        Witness::Tau { left, right } => format!("tau {left:.p$} vs {right:.p$}"),
    }
}
