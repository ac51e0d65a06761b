use crate::{CoverageArgs, DiagnoseArgs, GibbsArgs, MixtureArgs, SampleArgs, TvArgs};
use contdpp::datasets::{poor_sep, rare_mode, well_sep, LabeledData};
use contdpp::diagnostics::{
    average_movement, coverage_experiment, epsilon_for_coverage, ess_alpha, fit_gaussian, reference_kernel, sort_sets,
    Truncation,
};
use contdpp::dual::DualRepresentation;
use contdpp::exact::{estimate_tv, TvEstimate};
use contdpp::features::Method;
use contdpp::gibbs::run_gibbs_kdpp;
use contdpp::kernel::{KernelSpec, Point, SampleSet};
use contdpp::mixture::{compute_metrics, run_mog, MixtureModelSpec, PriorKind, Standardizer};
use contdpp::numerics::RngStream;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<contdpp::Error> for CliError {
    fn from(e: contdpp::Error) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn write_sidecar(out: &Path, command: &str, seed: Option<u64>, body: Value) -> Result<()> {
    let mut v = json!({
        "command": command,
        "git_describe": env!("CONTDPP_GIT_DESCRIBE"),
        "seed": seed,
    });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    let s = serde_json::to_string_pretty(&v).expect("serializable") + "\n";
    std::fs::write(sidecar_path(out), s)?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_kernel(path: &Path) -> Result<KernelSpec> {
    Ok(KernelSpec::from_json_str(&read_text(path)?)?)
}

fn parse<T: std::str::FromStr<Err = contdpp::Error>>(s: &str) -> Result<T> {
    Ok(s.parse::<T>()?)
}

fn x_header(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("x{i}")).collect()
}

/// Run `f(i)` for `i in 0..n` on up to `threads` threads; results in index
/// order regardless of scheduling.
fn par_map<T: Send>(n: usize, threads: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    if threads <= 1 || n <= 1 {
        return (0..n).map(&f).collect();
    }
    let f = &f;
    let mut slots: Vec<Option<Result<T>>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads.min(n))
            .map(|t| s.spawn(move || (t..n).step_by(threads).map(|i| (i, f(i))).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every index computed")).collect()
}

pub fn sample(a: SampleArgs, threads: usize) -> Result<()> {
    let kernel = load_kernel(&a.kernel)?;
    let method: Method = parse(&a.method)?;
    let dual = DualRepresentation::build(&kernel, method, a.rank, &mut RngStream::new(a.seed, 0))?;
    let base = RngStream::new(a.seed, 1);
    let sets = par_map(a.n_sets, threads, |i| {
        let mut rng = base.substream(i as u64);
        Ok(match a.k {
            Some(k) => dual.sample_kdpp(k, &mut rng)?,
            None => dual.sample_dpp(&mut rng)?,
        })
    })?;
    let mut w = csv::Writer::from_path(&a.out)?;
    let mut header = vec!["set_id".to_string(), "point_index".to_string()];
    header.extend(x_header(kernel.dim()));
    w.write_record(&header)?;
    for (s, set) in sets.iter().enumerate() {
        for (i, x) in set.iter().enumerate() {
            let mut row = vec![s.to_string(), i.to_string()];
            row.extend(x.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    write_sidecar(
        &a.out,
        "sample",
        Some(a.seed),
        json!({
            "kernel": kernel.to_json(),
            "method": method.name(),
            "rank": a.rank,
            "k": a.k,
            "n_sets": a.n_sets,
            "dual_eigenvalues": dual.eigenvalues(),
        }),
    )
}

pub fn tv(a: TvArgs, threads: usize) -> Result<()> {
    let methods: Vec<Method> = a.methods.iter().map(|m| parse(m)).collect::<Result<_>>()?;
    if a.replicates == 0 || a.sigma2.is_empty() || methods.is_empty() {
        return Err(CliError::Config("need at least one replicate, sigma2 and method".into()));
    }
    let cells: Vec<(f64, Method)> = a.sigma2.iter().flat_map(|&s| methods.iter().map(move |&m| (s, m))).collect();
    let base = RngStream::new(a.seed, 0);
    let n_tasks = cells.len() * a.replicates;
    let ests: Vec<TvEstimate> = par_map(n_tasks, threads, |t| {
        let (s2, m) = cells[t / a.replicates];
        let kernel = KernelSpec::isotropic(a.d, a.rho2, s2)?;
        Ok(estimate_tv(&kernel, m, a.rank, a.k, a.n_samples, &mut base.substream(t as u64))?)
    })?;
    let mut w = csv::Writer::from_path(&a.out)?;
    w.write_record(["d", "rho2", "sigma2", "method", "rank", "k", "replicates", "tv_mean", "tv_stderr", "n_excluded"])?;
    let mut rows = Vec::new();
    for (c, &(s2, m)) in cells.iter().enumerate() {
        let reps = &ests[c * a.replicates..(c + 1) * a.replicates];
        let means: Vec<f64> = reps.iter().map(|e| e.mean).collect();
        let r = means.len() as f64;
        let mean = means.iter().sum::<f64>() / r;
        let se = if reps.len() > 1 {
            (means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0) / r).sqrt()
        } else {
            reps[0].std_error
        };
        let excl: usize = reps.iter().map(|e| e.n_excluded).sum();
        w.write_record([
            a.d.to_string(),
            a.rho2.to_string(),
            s2.to_string(),
            m.name().to_string(),
            a.rank.to_string(),
            a.k.to_string(),
            a.replicates.to_string(),
            mean.to_string(),
            se.to_string(),
            excl.to_string(),
        ])?;
        rows.push(json!({"sigma2": s2, "method": m.name(), "replicate_means": means}));
    }
    w.flush()?;
    write_sidecar(
        &a.out,
        "tv",
        Some(a.seed),
        json!({
            "d": a.d, "rho2": a.rho2, "sigma2": a.sigma2, "k": a.k, "rank": a.rank,
            "methods": a.methods, "n_samples": a.n_samples, "replicates": a.replicates,
            "cells": rows,
        }),
    )
}

pub fn gibbs(a: GibbsArgs) -> Result<()> {
    let kernel = match &a.kernel {
        Some(p) => load_kernel(p)?,
        None => KernelSpec::uniform_box(vec![a.lo], vec![a.hi], a.sigma2)?,
    };
    let mut rng = RngStream::new(a.seed, a.chain_id);
    let chain = run_gibbs_kdpp(&kernel, a.k, a.cycles, a.burn_in, a.thin, &mut rng)?;
    let mut w = csv::Writer::from_path(&a.out)?;
    let mut header = vec!["cycle".to_string(), "point_index".to_string()];
    header.extend(x_header(kernel.dim()));
    w.write_record(&header)?;
    for (t, set) in chain.iter().enumerate() {
        let cycle = a.burn_in + (t + 1) * a.thin;
        for (i, x) in set.iter().enumerate() {
            let mut row = vec![cycle.to_string(), i.to_string()];
            row.extend(x.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    write_sidecar(
        &a.out,
        "gibbs-kdpp",
        Some(a.seed),
        json!({
            "kernel": kernel.to_json(), "k": a.k, "cycles": a.cycles, "burn_in": a.burn_in,
            "thin": a.thin, "chain_id": a.chain_id, "n_recorded": chain.len(),
        }),
    )
}

fn read_chain(path: &Path) -> Result<Vec<SampleSet>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.get(0) != Some("cycle") || headers.get(1) != Some("point_index") || headers.len() < 3 {
        return Err(CliError::Config("chain CSV needs columns cycle, point_index, x1..xd".into()));
    }
    let mut by_cycle: BTreeMap<u64, BTreeMap<usize, Point>> = BTreeMap::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Config(format!("bad number in column {i}")))
        };
        let cycle = num(0)? as u64;
        let idx = num(1)? as usize;
        let x = (2..rec.len()).map(num).collect::<Result<Vec<_>>>()?;
        by_cycle.entry(cycle).or_default().insert(idx, x);
    }
    Ok(by_cycle.into_values().map(|m| m.into_values().collect()).collect())
}

pub fn diagnose(a: DiagnoseArgs) -> Result<()> {
    let trunc: Truncation = parse(&a.truncation)?;
    let mut chain = read_chain(&a.chain)?;
    if a.sorted {
        chain = sort_sets(&chain);
    }
    let m = average_movement(&chain)?;
    let alpha = ess_alpha(&chain, trunc)?;
    let v = json!({
        "command": "diagnose",
        "git_describe": env!("CONTDPP_GIT_DESCRIBE"),
        "chain": a.chain.display().to_string(),
        "truncation": a.truncation,
        "sorted": a.sorted,
        "T": chain.len(),
        "k": chain.first().map_or(0, |s| s.len()),
        "m": m,
        "alpha": alpha,
    });
    let s = serde_json::to_string_pretty(&v).expect("serializable") + "\n";
    match &a.out {
        Some(p) => std::fs::write(p, &s)?,
        None => print!("{s}"),
    }
    Ok(())
}

fn synthetic_1d(name: &str, n: usize, rng: &mut RngStream) -> Result<LabeledData> {
    match name {
        "poor-sep" => Ok(poor_sep(n, rng)),
        "well-sep" => Ok(well_sep(n, rng)),
        _ => Err(CliError::Config(format!("unknown synthetic dataset `{name}` (poor-sep|well-sep)"))),
    }
}

fn read_column(path: &Path, name: &str) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let col = r
        .headers()?
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Config(format!("{}: no column `{name}`", path.display())))?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            rec.get(col)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| CliError::Config(format!("{}: bad value in `{name}`", path.display())))
        })
        .collect()
}

pub fn mixture(a: MixtureArgs) -> Result<()> {
    let prior: PriorKind = parse(&a.prior)?;
    let mut data_rng = RngStream::new(a.seed, 1);
    let (y, labels, heldout) = match (&a.data, &a.synthetic) {
        (Some(p), None) => (read_column(p, "y")?, None, None),
        (None, Some(name)) => {
            let d = synthetic_1d(name, a.n, &mut data_rng)?;
            let h = synthetic_1d(name, a.n, &mut data_rng)?;
            (d.y, Some(d.labels), Some(h.y))
        }
        _ => return Err(CliError::Config("give exactly one of --data or --synthetic".into())),
    };
    let st = Standardizer::fit(&y)?;
    let ys = st.apply(&y);
    let spec = MixtureModelSpec {
        n_components: a.components,
        alpha: a.alpha,
        a_sigma: a.a_sigma,
        b_sigma: a.b_sigma,
        mu0: 0.0,
        sigma0_sq: a.sigma0_sq,
        prior,
        gamma0_sq: a.gamma0_sq,
    };
    let chain = run_mog(&ys, &spec, a.iters, a.burn_in, a.thin, &mut RngStream::new(a.seed, 2))?;
    let hs = heldout.as_ref().map(|h| st.apply(h));
    let metrics = compute_metrics(&chain, &ys, labels.as_deref(), hs.as_deref())?;
    // held-out density in the original units
    let heldout_ll = metrics.heldout_loglik.map(|l| l - hs.as_ref().map_or(0, |h| h.len()) as f64 * st.sd.ln());
    let mut w = csv::Writer::from_path(&a.out)?;
    w.write_record(["iter", "k", "pi_k", "mu_k", "sigma2_k"])?;
    for (t, s) in chain.iter().enumerate() {
        let iter = a.burn_in + (t + 1) * a.thin;
        for k in 0..s.pi.len() {
            w.write_record([
                iter.to_string(),
                k.to_string(),
                s.pi[k].to_string(),
                (st.mean + st.sd * s.mu[k]).to_string(),
                (st.sd * st.sd * s.sigma2[k]).to_string(),
            ])?;
        }
    }
    w.flush()?;
    write_sidecar(
        &a.out,
        "mixture",
        Some(a.seed),
        json!({
            "spec": spec,
            "data": a.data.as_ref().map(|p| p.display().to_string()),
            "synthetic": a.synthetic,
            "n": ys.len(),
            "standardize": st,
            "iters": a.iters, "burn_in": a.burn_in, "thin": a.thin,
            "metrics": {
                "membership_entropy": metrics.membership_entropy,
                "clustering_error": metrics.clustering_error,
                "heldout_loglik": heldout_ll,
            },
        }),
    )
}

fn read_points(path: &Path) -> Result<Vec<Point>> {
    let mut r = csv::Reader::from_path(path)?;
    let d = r.headers()?.len();
    if d == 0 {
        return Err(CliError::Config("reference CSV has no columns".into()));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            (0..d)
                .map(|i| rec.get(i).and_then(|s| s.trim().parse().ok()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| CliError::Config(format!("{}: bad numeric row", path.display())))
        })
        .collect()
}

pub fn coverage(a: CoverageArgs, threads: usize) -> Result<()> {
    let method: Method = parse(&a.method)?;
    let reference = match (&a.data, a.synthetic.as_deref()) {
        (Some(p), None) => read_points(p)?,
        (None, Some("rare-mode")) => rare_mode(a.n_ref, a.d, &mut RngStream::new(a.seed, 1))?,
        (None, Some(other)) => return Err(CliError::Config(format!("unknown synthetic dataset `{other}` (rare-mode)"))),
        _ => return Err(CliError::Config("give exactly one of --data or --synthetic".into())),
    };
    let kernel = reference_kernel(&reference)?;
    let dual = DualRepresentation::build(&kernel, method, a.rank, &mut RngStream::new(a.seed, 2))?;
    let base = RngStream::new(a.seed, 3);
    let samples = par_map(a.runs, threads, |r| Ok(dual.sample_kdpp(a.k, &mut base.substream(r as u64))?))?;
    let mut iid_rng = RngStream::new(a.seed, 4);
    let curves = coverage_experiment(&reference, &samples, a.grid, &mut iid_rng)?;
    // per-run ε at 90% coverage, paired against a fresh variance-matched draw
    let mut pair_rng = RngStream::new(a.seed, 5);
    let mut eps90 = Vec::with_capacity(samples.len());
    for s in &samples {
        let (m, c) = fit_gaussian(s)?;
        let iid: Vec<Point> = (0..s.len()).map(|_| pair_rng.mvn(&m, &c)).collect::<contdpp::Result<_>>()?;
        eps90.push((epsilon_for_coverage(&reference, s, 0.9)?, epsilon_for_coverage(&reference, &iid, 0.9)?));
    }
    let wins = eps90.iter().filter(|(d, i)| d < i).count();
    let mut w = csv::Writer::from_path(&a.out)?;
    w.write_record(["epsilon", "coverage_dpp", "coverage_iid"])?;
    for i in 0..curves.epsilon.len() {
        w.write_record([curves.epsilon[i].to_string(), curves.dpp[i].to_string(), curves.iid[i].to_string()])?;
    }
    w.flush()?;
    write_sidecar(
        &a.out,
        "coverage",
        Some(a.seed),
        json!({
            "data": a.data.as_ref().map(|p| p.display().to_string()),
            "synthetic": a.synthetic,
            "n_ref": reference.len(),
            "d": kernel.dim(),
            "k": a.k, "method": method.name(), "rank": a.rank, "runs": a.runs,
            "eps90_dpp": eps90.iter().map(|p| p.0).collect::<Vec<_>>(),
            "eps90_iid": eps90.iter().map(|p| p.1).collect::<Vec<_>>(),
            "dpp_wins_eps90": wins,
        }),
    )
}
