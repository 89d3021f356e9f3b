//! Command-line entry points: simulate, fit, summarize, diagnose, predict.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags or flag
//! combinations), 2 on data or contract errors from the library.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use treemix::diagnostics::{autocorrelation, empirical_extremal_coefficient, gelman_rubin, DiagnosticReport};
use treemix::inference::{
    mh_fixed_tree, tm_mcmc, ChainTrace, Likelihood, ProposalConfig, RecursiveLikelihood, RjConfig,
    StephensonTawnLikelihood,
};
use treemix::model::extremal_coefficient;
use treemix::posterior::{bma_predict, quantile_curve, summarize};
use treemix::simulate::{
    block_maxima, frechet_transform, sample_nested_clayton, sample_nested_logistic,
    sample_student_t, BlockSpec, ClaytonConfig, StudentTConfig,
};
use treemix::{DependenceParams, TwoLayerTree};

#[derive(Parser)]
#[command(name = "treemix", version, about = "Tree-mixture inference for nested logistic block maxima")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    NestedLogistic,
    NestedClayton,
    StudentT,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitMode {
    FixedTree,
    TreeMixture,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LikelihoodKind {
    Recursive,
    StephensonTawn,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FrechetMode {
    None,
    Rank,
}

#[derive(Subcommand)]
enum Command {
    /// Draw block maxima from a known model and write them as CSV.
    Simulate {
        #[arg(long, value_enum)]
        model: Model,
        /// Cluster tree in text form, e.g. "1,2|3,4".
        #[arg(long)]
        tree: String,
        /// Between-cluster dependence (nested-logistic, nested-clayton).
        #[arg(long)]
        alpha0: Option<f64>,
        /// Comma-separated within-cluster dependence, one per cluster.
        #[arg(long)]
        alphas: Option<String>,
        /// Comma-separated copula parameters for nested-clayton: the outer
        /// theta0 first, then one theta per cluster. Overrides
        /// --alpha0/--alphas.
        #[arg(long)]
        thetas: Option<String>,
        /// Between-cluster correlation (student-t).
        #[arg(long)]
        rho0: Option<f64>,
        /// Comma-separated within-cluster correlations (student-t).
        #[arg(long)]
        rhos: Option<String>,
        /// Degrees of freedom (student-t).
        #[arg(long)]
        df: Option<f64>,
        #[arg(long)]
        n_blocks: usize,
        /// Raw draws per block; 1 writes the raw draws unchanged.
        #[arg(long, default_value_t = 1)]
        block_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a sampler on a block-maxima CSV and write the chain as NDJSON.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        mode: FitMode,
        /// Tree for fixed-tree mode; forbidden in tree-mixture mode.
        #[arg(long)]
        tree: Option<String>,
        #[arg(long, value_enum, default_value = "recursive")]
        likelihood: LikelihoodKind,
        #[arg(long)]
        iters: u64,
        /// Iterations discarded by downstream summaries; defaults to iters/5.
        #[arg(long)]
        burnin: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank-transform each margin to unit Frechet before fitting.
        #[arg(long, value_enum, default_value = "none")]
        frechet_transform: FrechetMode,
        /// Number of replicate chains; chain i uses seed + i and file
        /// suffix .i when more than one.
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize one or more chain files into a tree posterior JSON.
    Summarize {
        /// Chain file; repeat to pool several chains.
        #[arg(long, required = true)]
        chain: Vec<PathBuf>,
        /// Override the burn-in recorded in the chain headers.
        #[arg(long)]
        burnin: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence diagnostics over two or more chains of the same fit.
    Diagnose {
        /// Chain file; at least two required.
        #[arg(long, required = true)]
        chain: Vec<PathBuf>,
        #[arg(long, default_value_t = 50)]
        max_lag: usize,
        /// Block-maxima CSV for empirical extremal coefficients.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Comma-separated 1-based variable subset, e.g. "1,2"; repeatable.
        /// Requires --data.
        #[arg(long)]
        subset: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Model-averaged predictive quantiles per variable.
    Predict {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        burnin: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        /// Comma-separated strictly increasing probabilities in (0,1).
        #[arg(long)]
        probs: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Data(treemix::Error),
}

impl From<treemix::Error> for CliError {
    fn from(e: treemix::Error) -> Self {
        CliError::Data(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            model,
            tree,
            alpha0,
            alphas,
            thetas,
            rho0,
            rhos,
            df,
            n_blocks,
            block_size,
            seed,
            out,
        } => cmd_simulate(
            model, &tree, alpha0, alphas, thetas, rho0, rhos, df, n_blocks, block_size, seed, &out,
        ),
        Command::Fit {
            data,
            mode,
            tree,
            likelihood,
            iters,
            burnin,
            seed,
            frechet_transform,
            chains,
            out,
        } => cmd_fit(
            &data,
            mode,
            tree.as_deref(),
            likelihood,
            iters,
            burnin,
            seed,
            frechet_transform,
            chains,
            &out,
        ),
        Command::Summarize { chain, burnin, out } => cmd_summarize(&chain, burnin, out.as_deref()),
        Command::Diagnose {
            chain,
            max_lag,
            data,
            subset,
            out,
        } => cmd_diagnose(&chain, max_lag, data.as_deref(), &subset, out.as_deref()),
        Command::Predict {
            chain,
            burnin,
            draws,
            probs,
            seed,
            out,
        } => cmd_predict(&chain, burnin, draws, &probs, seed, out.as_deref()),
    }
}

fn parse_f64_list(s: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{flag}: bad number {t:?}")))
        })
        .collect()
}

fn require<T>(v: Option<T>, flag: &str, model: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("{flag} is required for --model {model}")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    model: Model,
    tree: &str,
    alpha0: Option<f64>,
    alphas: Option<String>,
    thetas: Option<String>,
    rho0: Option<f64>,
    rhos: Option<String>,
    df: Option<f64>,
    n_blocks: usize,
    block_size: usize,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let tree: TwoLayerTree = tree.parse().map_err(|e| usage(format!("--tree: {e}")))?;
    if n_blocks == 0 || block_size == 0 {
        return Err(usage("--n-blocks and --block-size must be positive"));
    }
    let raw_count = n_blocks * block_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (raw, theta_full) = match model {
        Model::NestedLogistic => {
            let params = logistic_params(&tree, alpha0, alphas.as_deref())?;
            let raw = sample_nested_logistic(&tree, &params, raw_count, &mut rng)?;
            let theta = extremal_coefficient(&tree, &params)?;
            (raw, Some(theta))
        }
        Model::NestedClayton => {
            let config = match thetas {
                Some(list) => {
                    let mut all = parse_f64_list(&list, "--thetas")?;
                    if all.len() != tree.cluster_count() + 1 {
                        return Err(usage(format!(
                            "--thetas: expected theta0 plus {} cluster values",
                            tree.cluster_count()
                        )));
                    }
                    let theta0 = all.remove(0);
                    ClaytonConfig::new(theta0, all)?
                }
                None => {
                    let params = logistic_params(&tree, alpha0, alphas.as_deref())?;
                    ClaytonConfig::from_attractor(params.alpha0, &params.alphas)?
                }
            };
            let raw = sample_nested_clayton(&tree, &config, raw_count, &mut rng)?;
            // attractor of the copula: alpha0 = 1/theta0, alpha_k = theta0/theta_k
            let params = DependenceParams::new(
                1.0 / config.theta0,
                config.thetas.iter().map(|t| config.theta0 / t).collect(),
            )?;
            let theta = extremal_coefficient(&tree, &params)?;
            (raw, Some(theta))
        }
        Model::StudentT => {
            let rho0 = require(rho0, "--rho0", "student-t")?;
            let df = require(df, "--df", "student-t")?;
            let rhos = parse_f64_list(&require(rhos, "--rhos", "student-t")?, "--rhos")?;
            let config = StudentTConfig::new(df, rho0, rhos, tree.cluster_sizes())?;
            (sample_student_t(&config, raw_count, &mut rng)?, None)
        }
    };
    let data = if block_size == 1 {
        raw
    } else {
        block_maxima(&raw, BlockSpec::new(block_size, n_blocks)?)?
    };
    treemix::io::write_csv_path(&data, out)?;
    match theta_full {
        Some(t) => println!("extremal coefficient (all {} variables): {t}", tree.dim()),
        None => println!("extremal coefficient: no closed form for student-t"),
    }
    Ok(())
}

fn logistic_params(
    tree: &TwoLayerTree,
    alpha0: Option<f64>,
    alphas: Option<&str>,
) -> Result<DependenceParams, CliError> {
    let alpha0 = alpha0.ok_or_else(|| usage("--alpha0 is required for this model"))?;
    let alphas = parse_f64_list(
        alphas.ok_or_else(|| usage("--alphas is required for this model"))?,
        "--alphas",
    )?;
    let params = DependenceParams::new(alpha0, alphas)?;
    params.check_tree(tree)?;
    Ok(params)
}

#[allow(clippy::too_many_arguments)]
fn cmd_fit(
    data_path: &Path,
    mode: FitMode,
    tree: Option<&str>,
    likelihood: LikelihoodKind,
    iters: u64,
    burnin: Option<u64>,
    seed: u64,
    frechet: FrechetMode,
    chains: usize,
    out: &Path,
) -> Result<(), CliError> {
    if chains == 0 {
        return Err(usage("--chains must be positive"));
    }
    let burnin = burnin.unwrap_or(iters / 5);
    if burnin > iters {
        return Err(usage("--burnin cannot exceed --iters"));
    }
    let mut data = treemix::io::read_csv_path(data_path)?;
    if frechet == FrechetMode::Rank {
        data = frechet_transform(&data)?;
    }
    if likelihood == LikelihoodKind::StephensonTawn && data.partitions.is_none() {
        return Err(usage(
            "--likelihood stephenson-tawn requires a partition column in the data",
        ));
    }
    let lik: Box<dyn Likelihood> = match likelihood {
        LikelihoodKind::Recursive => Box::new(RecursiveLikelihood(&data)),
        LikelihoodKind::StephensonTawn => Box::new(StephensonTawnLikelihood(&data)),
    };
    let run_chain = |chain_seed: u64| -> treemix::Result<ChainTrace> {
        let proposal = ProposalConfig::with_burnin(burnin);
        let mut trace = match mode {
            FitMode::FixedTree => {
                let tree: TwoLayerTree = tree
                    .expect("validated above")
                    .parse()
                    .map_err(|e| treemix::Error::parse(format!("--tree: {e}")))?;
                if tree.dim() != data.cols() {
                    return Err(treemix::Error::contract(format!(
                        "tree over {} variables for {}-column data",
                        tree.dim(),
                        data.cols()
                    )));
                }
                let init = DependenceParams::constant(0.5, tree.cluster_count())?;
                mh_fixed_tree(lik.as_ref(), &tree, &init, &proposal, iters, chain_seed)?
            }
            FitMode::TreeMixture => {
                let rj = RjConfig::with_iters(iters);
                tm_mcmc(lik.as_ref(), &rj, &proposal, chain_seed)?
            }
        };
        trace.header.names = data.variable_names.clone();
        Ok(trace)
    };
    match mode {
        FitMode::FixedTree => {
            if tree.is_none() {
                return Err(usage("--tree is required in fixed-tree mode"));
            }
        }
        FitMode::TreeMixture => {
            if tree.is_some() {
                return Err(usage("--tree is not accepted in tree-mixture mode"));
            }
        }
    }
    let traces: Vec<treemix::Result<ChainTrace>> = (0..chains)
        .into_par_iter()
        .map(|i| run_chain(seed + i as u64))
        .collect();
    for (i, trace) in traces.into_iter().enumerate() {
        let trace = trace?;
        let path = chain_path(out, i, chains);
        let f = std::fs::File::create(&path)
            .map_err(|e| treemix::Error::contract(format!("{}: {e}", path.display())))?;
        trace.write_ndjson(std::io::BufWriter::new(f))?;
    }
    Ok(())
}

/// Output path of chain i: unchanged for a single chain, otherwise the stem
/// gains a .i suffix before the extension ("chain.ndjson" -> "chain.0.ndjson").
fn chain_path(out: &Path, i: usize, chains: usize) -> PathBuf {
    if chains == 1 {
        return out.to_path_buf();
    }
    match out.extension() {
        Some(ext) => out.with_extension(format!("{i}.{}", ext.to_string_lossy())),
        None => out.with_extension(i.to_string()),
    }
}

fn read_chain(path: &Path) -> Result<ChainTrace, CliError> {
    let f = std::fs::File::open(path)
        .map_err(|e| treemix::Error::contract(format!("{}: {e}", path.display())))?;
    Ok(ChainTrace::read_ndjson(std::io::BufReader::new(f))?)
}

fn check_same_fit(traces: &[ChainTrace]) -> Result<(), CliError> {
    let d = traces[0].header.dim;
    if traces.iter().any(|t| t.header.dim != d) {
        return Err(CliError::Data(treemix::Error::contract(
            "chain files have mismatched dimensions",
        )));
    }
    Ok(())
}

/// Post-burn-in records of several chains concatenated into one synthetic
/// trace with consecutive iteration numbers and burn-in 0.
fn pool_traces(traces: Vec<ChainTrace>, burnin: Option<u64>) -> Result<ChainTrace, CliError> {
    check_same_fit(&traces)?;
    let header = treemix::inference::ChainHeader {
        burnin: 0,
        ..traces[0].header.clone()
    };
    let mut records = Vec::new();
    for t in traces {
        let cut = burnin.unwrap_or(t.header.burnin);
        for mut r in t.records.into_iter().filter(|r| r.iter > cut) {
            r.iter = records.len() as u64 + 1;
            records.push(r);
        }
    }
    let iters = records.len() as u64;
    let mut header = header;
    header.iters = iters;
    Ok(ChainTrace::new(header, records)?)
}

fn write_json(value: &impl serde::Serialize, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| treemix::Error::contract(format!("json: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Data(treemix::Error::contract(format!("{}: {e}", path.display())))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_summarize(
    chains: &[PathBuf],
    burnin: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let traces: Vec<ChainTrace> = chains.iter().map(|p| read_chain(p)).collect::<Result<_, _>>()?;
    let pooled = pool_traces(traces, burnin)?;
    let summary = summarize(&pooled, 0)?;
    write_json(&summary, out)
}

fn cmd_diagnose(
    chains: &[PathBuf],
    max_lag: usize,
    data: Option<&Path>,
    subsets: &[String],
    out: Option<&Path>,
) -> Result<(), CliError> {
    if chains.len() < 2 {
        return Err(usage("--chain must be given at least twice"));
    }
    if !subsets.is_empty() && data.is_none() {
        return Err(usage("--subset requires --data"));
    }
    let traces: Vec<ChainTrace> = chains.iter().map(|p| read_chain(p)).collect::<Result<_, _>>()?;
    check_same_fit(&traces)?;
    let n = traces[0].records.len();
    if traces.iter().any(|t| t.records.len() != n) {
        return Err(CliError::Data(treemix::Error::contract(
            "chains have different lengths",
        )));
    }
    // alpha0 and log_post are defined for every record; per-cluster alphas
    // only when all chains stay on one common tree (fixed-tree fits)
    let mut series: Vec<(String, Vec<Vec<f64>>)> = vec![
        (
            "alpha0".into(),
            traces
                .iter()
                .map(|t| t.records.iter().map(|r| r.params.alpha0).collect())
                .collect(),
        ),
        (
            "log_post".into(),
            traces
                .iter()
                .map(|t| t.records.iter().map(|r| r.log_post).collect())
                .collect(),
        ),
    ];
    let single_tree = traces
        .iter()
        .flat_map(|t| t.records.iter())
        .map(|r| r.tree.to_string())
        .collect::<std::collections::BTreeSet<_>>();
    if single_tree.len() == 1 {
        let k = traces[0].records[0].params.alphas.len();
        for j in 0..k {
            series.push((
                format!("alpha{}", j + 1),
                traces
                    .iter()
                    .map(|t| t.records.iter().map(|r| r.params.alphas[j]).collect())
                    .collect(),
            ));
        }
    }
    let mut gr = BTreeMap::new();
    let mut acf = BTreeMap::new();
    for (name, chains_of) in &series {
        gr.insert(name.clone(), gelman_rubin(chains_of)?);
        acf.insert(name.clone(), autocorrelation(&chains_of[0], max_lag)?);
    }
    let mut theta_hat = BTreeMap::new();
    if let Some(data_path) = data {
        let ds = treemix::io::read_csv_path(data_path)?;
        for s in subsets {
            let subset: Vec<usize> = s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| usage(format!("--subset: bad index {t:?}")))
                })
                .collect::<Result<_, _>>()?;
            theta_hat.insert(s.clone(), empirical_extremal_coefficient(&ds, &subset)?);
        }
    }
    let report = DiagnosticReport { gr, acf, theta_hat };
    write_json(&report, out)
}

fn cmd_predict(
    chain: &Path,
    burnin: Option<u64>,
    draws: usize,
    probs: &str,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let trace = read_chain(chain)?;
    let burnin = burnin.unwrap_or(trace.header.burnin);
    let probs = parse_f64_list(probs, "--probs")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = bma_predict(&trace, burnin, draws, &mut rng)?;
    let names = trace
        .header
        .names
        .clone()
        .unwrap_or_else(|| treemix::io::default_names(sample.cols()));
    let mut quantiles = BTreeMap::new();
    for (d, name) in names.iter().enumerate() {
        quantiles.insert(name.clone(), quantile_curve(&sample.column(d), &probs)?);
    }
    #[derive(serde::Serialize)]
    struct Prediction {
        probs: Vec<f64>,
        draws: usize,
        quantiles: BTreeMap<String, Vec<f64>>,
    }
    let report = Prediction {
        probs,
        draws,
        quantiles,
    };
    write_json(&report, out)
}
