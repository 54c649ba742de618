//! `postsel`: selection-aware p-values for stepwise and lasso fits.

mod table;

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{error::ErrorKind, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;

use postsel_core::bootstrap::run_bootstrap;
use postsel_core::data::load_csv;
use postsel_core::lasso::{lars_path, pvalue_sequence, PathEnd};
use postsel_core::linmodel::sigma_full;
use postsel_core::nullsim::{simulate_lemma2_null, simulate_selection_null, simulate_spacing_null, ZDesign};
use postsel_core::stepwise::run_stepwise;
use postsel_core::{
    BootstrapConfig, Dataset, LoadOptions, Method, NullSimReport, Reference, RngStream, StepwiseConfig,
};

use table::{Cell, Format, OutputTable};

#[derive(Parser, Debug)]
#[command(
    name = "postsel",
    version,
    about = "Conditional p-values for forward stepwise and lasso selection"
)]
struct Cli {
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true, env = "POSTSEL_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Delimited file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Response column name (matched after lower-casing and replacing spaces with `_`).
    #[arg(long)]
    response: String,
    #[arg(long, default_value = ";", value_parser = parse_delimiter)]
    delimiter: u8,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Decimal places for text and CSV output.
    #[arg(long, default_value_t = 4)]
    digits: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RefArg {
    F2,
    Exp1,
}

impl From<RefArg> for Reference {
    fn from(r: RefArg) -> Self {
        match r {
            RefArg::F2 => Reference::F2DfErr,
            RefArg::Exp1 => Reference::ExpMeanOne,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Spacing,
    Lemma2,
    Selection,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward stepwise table with one column per p-value method.
    Stepwise {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated subset of naive, exact, bonferroni, scheffe, ftest, lemma2.
        #[arg(long, value_delimiter = ',', value_parser = parse_method)]
        methods: Option<Vec<Method>>,
        /// Null replicates for the exact method.
        #[arg(long, default_value_t = 99_999)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Spacing-test p-values at each entry of the lasso path.
    Lasso {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = RefArg::F2)]
        reference: RefArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pairs bootstrap of the lasso p-value sequence.
    Bootstrap {
        #[command(flatten)]
        data: DataArgs,
        /// Number of resamples.
        #[arg(long = "B", default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = RefArg::F2)]
        reference: RefArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo check of a null law.
    Nullsim {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Rows of the fixed design (required for lemma2 and for rho > 0).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: usize,
        /// 1-based step of the spacing statistic.
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 5000)]
        reps: usize,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character, got `{s}`")),
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: postsel_core::Error| e.to_string())
}

fn load(args: &DataArgs) -> Result<Dataset> {
    let opts = LoadOptions::new(&args.response).delimiter(args.delimiter);
    load_csv(&args.data, &opts).with_context(|| format!("loading {}", args.data.display()))
}

fn stepwise(
    data: &DataArgs,
    methods: Option<Vec<Method>>,
    reps: usize,
    seed: u64,
    output: &OutputArgs,
) -> Result<OutputTable> {
    let ds = load(data)?;
    let methods: BTreeSet<Method> = methods.map_or_else(Method::all, |m| m.into_iter().collect());
    let config = StepwiseConfig {
        methods: methods.clone(),
        replicates: reps,
        seed,
    };
    let table = run_stepwise(&ds, &config)?;

    let mut columns: Vec<String> = vec!["step".into(), "predictor".into(), "t_stat".into()];
    columns.extend(methods.iter().map(|m| m.name().to_string()));
    let exact = methods.contains(&Method::Exact);
    if exact {
        columns.push("exact_se".into());
    }
    let mut out = OutputTable::new("stepwise", columns, output.digits);
    for rec in &table.records {
        let mut row: Vec<Cell> = vec![rec.step.into(), rec.name.as_str().into(), rec.t_selected.into()];
        row.extend(methods.iter().map(|&m| Cell::from(rec.pvalue(m))));
        if exact {
            row.push(rec.exact_se.into());
        }
        out.push(row);
    }
    out.meta("response", ds.response_name());
    out.meta("n", ds.n());
    out.meta("p", ds.p());
    out.meta("sigma_hat", table.sigma_hat);
    out.meta("df_err", table.df_err);
    out.meta("methods", methods.iter().map(|m| m.name()).collect::<Vec<_>>());
    if exact {
        out.meta("replicates", reps);
        out.meta("seed", seed);
    }
    Ok(out)
}

fn lasso(data: &DataArgs, reference: Reference, output: &OutputArgs) -> Result<OutputTable> {
    let ds = load(data)?;
    let sigma = sigma_full(&ds)?;
    let path = lars_path(&ds)?;
    let seq = pvalue_sequence(&path, &sigma, reference);
    let columns = ["step", "variable", "knot", "statistic", "p_value"]
        .map(String::from)
        .to_vec();
    let mut out = OutputTable::new("lasso", columns, output.digits);
    for s in &seq {
        out.push(vec![
            s.step.into(),
            ds.name(s.variable).into(),
            s.knot.into(),
            s.statistic.into(),
            s.p_value.into(),
        ]);
    }
    let end = match path.end {
        PathEnd::Complete => json!("complete"),
        PathEnd::RankDeficient { variable } => json!({ "rank_deficient_after": ds.name(variable) }),
        PathEnd::Truncated => json!("truncated"),
    };
    out.meta("response", ds.response_name());
    out.meta("sigma_hat", sigma.sigma_hat);
    out.meta("df_err", sigma.df_err);
    out.meta("reference", reference.name());
    out.meta("events", path.len());
    out.meta("path_end", end);
    Ok(out)
}

fn bootstrap(data: &DataArgs, config: BootstrapConfig, output: &OutputArgs) -> Result<OutputTable> {
    let ds = load(data)?;
    let summary = run_bootstrap(&ds, &config)?;
    let mut columns = vec!["summary".to_string()];
    columns.extend((1..=summary.steps).map(|k| k.to_string()));
    let mut out = OutputTable::new("bootstrap", columns, output.digits);
    let mut counts: Vec<Cell> = vec![format!("cumulative_below_{}", config.threshold).into()];
    counts.extend(summary.cumulative_counts.iter().map(|&c| Cell::from(c)));
    out.push(counts);
    let mut medians: Vec<Cell> = vec!["median_pvalue".into()];
    medians.extend(summary.median_pvalues.iter().map(|&m| Cell::from(m)));
    out.push(medians);
    out.meta("resamples", summary.resamples);
    out.meta("threshold", summary.threshold);
    out.meta("reference", config.reference.name());
    out.meta("seed", summary.seed);
    out.meta("redraws", summary.redraws);
    Ok(out)
}

fn nullsim_report(
    mode: ModeArg,
    n: Option<usize>,
    p: usize,
    j: usize,
    reps: usize,
    rho: f64,
    seed: u64,
) -> Result<NullSimReport> {
    let rng = RngStream::new(seed, 0);
    let report = match mode {
        ModeArg::Spacing => simulate_spacing_null(ZDesign::from_flags(n, p, rho)?, p, j, reps, rng)?,
        ModeArg::Lemma2 => {
            let n = n.context("lemma2 mode needs --n")?;
            simulate_lemma2_null(n, p, reps, rng)?
        }
        ModeArg::Selection => simulate_selection_null(p, reps, rng)?,
    };
    Ok(report)
}

fn nullsim_table(report: &NullSimReport, output: &OutputArgs) -> OutputTable {
    let columns = [
        "mode",
        "design",
        "n",
        "p",
        "rho",
        "step",
        "replicates",
        "ks_distance",
        "empirical_mean",
        "empirical_median",
        "reference",
        "reference_mean",
        "dominance_margin",
    ]
    .map(String::from)
    .to_vec();
    let mut out = OutputTable::new("nullsim", columns, output.digits);
    let mode = serde_json::to_value(report.mode)
        .ok()
        .and_then(|v| v.as_str().map(String::from));
    out.push(vec![
        mode.into(),
        report.design.as_str().into(),
        report.n.into(),
        report.p.into(),
        report.rho.into(),
        report.step.into(),
        report.replicates.into(),
        report.ks_distance.into(),
        report.empirical_mean.into(),
        report.empirical_median.into(),
        report.reference.as_str().into(),
        report.reference_mean.into(),
        report.dominance_margin.into(),
    ]);
    out
}

fn usage_error(kind: ErrorKind, msg: &str) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn run(cli: Cli) -> Result<(OutputTable, Format)> {
    Ok(match cli.command {
        Command::Stepwise {
            data,
            methods,
            reps,
            seed,
            output,
        } => (stepwise(&data, methods, reps, seed, &output)?, output.format),
        Command::Lasso {
            data,
            reference,
            output,
        } => (lasso(&data, reference.into(), &output)?, output.format),
        Command::Bootstrap {
            data,
            resamples,
            threshold,
            steps,
            seed,
            reference,
            output,
        } => {
            let config = BootstrapConfig {
                resamples,
                threshold,
                steps,
                reference: reference.into(),
                seed,
            };
            (bootstrap(&data, config, &output)?, output.format)
        }
        Command::Nullsim {
            mode,
            n,
            p,
            j,
            reps,
            rho,
            seed,
            output,
        } => {
            if mode == ModeArg::Lemma2 && n.is_none() {
                usage_error(ErrorKind::MissingRequiredArgument, "--mode lemma2 requires --n");
            }
            let report = nullsim_report(mode, n, p, j, reps, rho, seed)?;
            (nullsim_table(&report, &output), output.format)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == Some(0) {
        usage_error(ErrorKind::ValueValidation, "--threads must be at least 1");
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t);
    }
    let result = builder
        .build()
        .context("starting worker threads")
        .and_then(|pool| pool.install(|| run(cli)))
        .and_then(|(table, format)| {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.render(format, &mut lock)?;
            lock.flush()?;
            Ok(())
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
