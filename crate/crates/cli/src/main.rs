//! `contdpp` command-line harness.

mod run;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "contdpp", version, about = "Sampling continuous DPPs and k-DPPs")]
struct Cli {
    /// Worker threads for replicate-level parallelism.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Draw DPP or k-DPP sets with a low-rank approximation.
    Sample(SampleArgs),
    /// Estimate the total variation between exact and approximated k-DPPs.
    Tv(TvArgs),
    /// Run the Schur-complement Gibbs sampler for a k-DPP.
    GibbsKdpp(GibbsArgs),
    /// Fit a 1-d Gaussian mixture with an i.i.d. or DPP prior on the means.
    Mixture(MixtureArgs),
    /// Coverage curves of DPP samples against variance-matched i.i.d. draws.
    Coverage(CoverageArgs),
    /// Average movement and ESS factor of a gibbs-kdpp chain.
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Kernel specification (JSON).
    #[arg(long)]
    kernel: PathBuf,
    #[arg(long, default_value = "nystrom")]
    method: String,
    #[arg(long, default_value_t = 50)]
    rank: usize,
    /// Fixed set size; omit for a DPP.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    n_sets: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TvArgs {
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    rho2: f64,
    /// Comma-separated similarity variances.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1.0")]
    sigma2: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 50)]
    rank: usize,
    #[arg(long, value_delimiter = ',', default_value = "rff,nystrom")]
    methods: Vec<String>,
    #[arg(long, default_value_t = 200)]
    n_samples: usize,
    #[arg(long, default_value_t = 5)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GibbsArgs {
    /// Kernel specification (JSON); defaults to constant quality on
    /// [lo, hi] with Gaussian similarity of variance --sigma2.
    #[arg(long)]
    kernel: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    sigma2: f64,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 15)]
    k: usize,
    /// Full sweeps over the k points.
    #[arg(long, default_value_t = 200)]
    cycles: usize,
    #[arg(long, default_value_t = 100)]
    burn_in: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    #[arg(long, default_value_t = 0)]
    chain_id: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct MixtureArgs {
    /// Single-column CSV with header `y`.
    #[arg(long, conflicts_with = "synthetic")]
    data: Option<PathBuf>,
    /// poor-sep or well-sep.
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value = "iid")]
    prior: String,
    #[arg(long, default_value_t = 6)]
    components: usize,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    a_sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    b_sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma0_sq: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma0_sq: f64,
    #[arg(long, default_value_t = 10_000)]
    iters: usize,
    #[arg(long, default_value_t = 5_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 10)]
    thin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CoverageArgs {
    /// Reference CSV with header x1..xd.
    #[arg(long, conflicts_with = "synthetic")]
    data: Option<PathBuf>,
    /// rare-mode.
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 1000)]
    n_ref: usize,
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 50)]
    k: usize,
    #[arg(long, default_value = "nystrom")]
    method: String,
    #[arg(long, default_value_t = 100)]
    rank: usize,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    /// Chain CSV written by gibbs-kdpp.
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, default_value = "verbatim")]
    truncation: String,
    /// Match points across cycles by sort order (for i.i.d. baselines).
    #[arg(long)]
    sorted: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.threads.max(1);
    let res = match cli.cmd {
        Cmd::Sample(a) => run::sample(a, threads),
        Cmd::Tv(a) => run::tv(a, threads),
        Cmd::GibbsKdpp(a) => run::gibbs(a),
        Cmd::Mixture(a) => run::mixture(a),
        Cmd::Coverage(a) => run::coverage(a, threads),
        Cmd::Diagnose(a) => run::diagnose(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
