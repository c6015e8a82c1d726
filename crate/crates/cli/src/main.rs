use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use dsm_core::bounds::{
    gap_constants, genie_side_info_entropy_with, genie_stress, geometric_entropy, max_entropy_integer_power,
    quantized_gaussian_entropy, GenieNoise,
};
use dsm_core::capacity::{gap_report, mi_monte_carlo, DepthRule, GapOptions, GapReport, InputLaw, McModel};
use dsm_core::lifting::ic::ic_sandwich;
use dsm_core::lifting::{lift_pipeline, load_code_file, ExponentChoice, LiftConfig, Noise};
use dsm_core::models::{derive_dsm, derive_ldm};
use dsm_core::network::{enumerate_cuts, load_document_file, NetworkDoc, Topology};
use dsm_core::{rng, verify};

#[derive(Parser, Debug, Serialize)]
#[command(name = "dsmnet", version, about = "Deterministic models of Gaussian relay and interference networks")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Derive the discrete superposition and linear deterministic models.
    Derive(NetworkArgs),
    /// Cut values of the Gaussian network and its deterministic models.
    Capacity(CapacityArgs),
    /// Sweep a gain parameter and tabulate cut values as CSV.
    Gap(GapArgs),
    /// Evaluate the gap constants and the entropy bounds.
    Bounds(BoundsArgs),
    /// Measure side-information entropies of the genie decomposition.
    Genie(GenieArgs),
    /// Lift a discrete superposition code to the Gaussian network and simulate it.
    Lift(LiftArgs),
    /// Compare Gaussian and discrete per-user rates of an interference network.
    IcSandwich(IcArgs),
    /// Run the property suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
struct NetworkArgs {
    /// Network JSON file.
    #[arg(long)]
    network: PathBuf,
    /// Override a network parameter, e.g. `--set h=32`.
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_assignment)]
    overrides: Vec<(String, f64)>,
}

impl NetworkArgs {
    fn document(&self) -> Result<NetworkDoc> {
        load_document_file(&self.network).with_context(|| format!("reading {}", self.network.display()))
    }

    fn topology(&self) -> Result<Topology> {
        Ok(self.document()?.build(&self.overrides.iter().cloned().collect())?)
    }
}

fn parse_assignment(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Depth {
    Global,
    CutLocal,
}

impl From<Depth> for DepthRule {
    fn from(d: Depth) -> Self {
        match d {
            Depth::Global => DepthRule::Global,
            Depth::CutLocal => DepthRule::CutLocal,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Args, Debug, Serialize)]
struct CapacityArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long, value_enum, default_value = "exact")]
    method: Method,
    #[arg(long, value_enum, default_value = "global")]
    depth: Depth,
    /// Samples per cut for the Monte Carlo method.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Required for the Monte Carlo method.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct GapArgs {
    #[command(flatten)]
    net: NetworkArgs,
    /// Exponents k; the swept parameter is set to 2^k.
    #[arg(long, value_delimiter = ',', required = true)]
    h_exponents: Vec<i32>,
    /// Name of the swept network parameter.
    #[arg(long, default_value = "h")]
    param: String,
    /// Source-side node set of a single cut to evaluate, e.g. `0,1,2`.
    #[arg(long, value_delimiter = ',')]
    cut: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "cut-local")]
    depth: Depth,
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    #[arg(long = "M")]
    m: u32,
    #[arg(long = "K", default_value_t = 1)]
    k: u32,
    #[arg(long = "L", default_value_t = 1)]
    l: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum NoiseArg {
    Unit,
    None,
}

#[derive(Args, Debug, Serialize)]
struct GenieArgs {
    /// Network to measure at every receiving node.
    #[arg(long, conflicts_with = "stress")]
    network: Option<PathBuf>,
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_assignment)]
    overrides: Vec<(String, f64)>,
    /// Only this node.
    #[arg(long)]
    node: Option<usize>,
    /// Instead of a network, check the reconstruction identity on this many random draws.
    #[arg(long)]
    stress: Option<u64>,
    /// Nodes per random network in stress mode.
    #[arg(long, default_value_t = 5)]
    nodes: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, value_enum, default_value = "unit")]
    noise: NoiseArg,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct LiftArgs {
    #[command(flatten)]
    net: NetworkArgs,
    /// Code JSON file.
    #[arg(long)]
    code: PathBuf,
    /// Number of base-code blocks per extended codeword.
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Prune exponent in bits per use; measured per node when omitted.
    #[arg(long)]
    exponent: Option<f64>,
    /// Samples for measuring the exponent.
    #[arg(long, default_value_t = 20_000)]
    genie_samples: usize,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, value_enum, default_value = "unit")]
    noise: NoiseArg,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct IcArgs {
    #[command(flatten)]
    net: NetworkArgs,
    /// Gain scale factors.
    #[arg(long, value_delimiter = ',', default_value = "4,16,64")]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// Emit one CSV row per grid point and user instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A run that completed but whose checks did not all hold.
struct Failed(String);

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Failed(msg))) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DSM_THREADS") {
        let n: usize = v.parse().map_err(|_| anyhow!("DSM_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            bail!("DSM_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(cli: &Cli, report: impl Serialize) -> Result<()> {
    let doc = json!({ "config": &cli.command, "report": report });
    emit(cli.output.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"))
}

fn run(cli: &Cli) -> Result<Option<Failed>> {
    match &cli.command {
        Command::Derive(a) => derive(cli, a),
        Command::Capacity(a) => capacity(cli, a),
        Command::Gap(a) => gap(cli, a),
        Command::Bounds(a) => bounds(cli, a),
        Command::Genie(a) => genie(cli, a),
        Command::Lift(a) => lift(cli, a),
        Command::IcSandwich(a) => sandwich(cli, a),
        Command::Verify(a) => run_verify(cli, a),
    }
}

fn derive(cli: &Cli, a: &NetworkArgs) -> Result<Option<Failed>> {
    let t = a.topology()?;
    let dsm = derive_dsm(&t)?;
    let dsm_links: Vec<_> = dsm
        .links()
        .iter()
        .map(|l| json!({ "from": l.from, "to": l.to, "gain": [l.gain.re, l.gain.im], "qgain": [l.qgain.re, l.qgain.im] }))
        .collect();
    let ldm = match derive_ldm(&t) {
        Ok(m) => json!({
            "q": m.q(),
            "links": m.links().iter().map(|l| json!({ "from": l.from, "to": l.to, "passed": l.passed, "shift": l.shift })).collect::<Vec<_>>(),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    emit_json(cli, json!({ "nodes": t.node_count(), "dsm": { "n": dsm.n(), "links": dsm_links }, "ldm": ldm }))?;
    Ok(None)
}

fn capacity(cli: &Cli, a: &CapacityArgs) -> Result<Option<Failed>> {
    let t = a.net.topology()?;
    match a.method {
        Method::Exact => {
            let rep = gap_report(&t, &GapOptions { depth: a.depth.into(), ..Default::default() })?;
            emit_json(cli, rep)?;
        }
        Method::MonteCarlo => {
            let seed = a.seed.ok_or_else(|| anyhow!("--seed is required for the Monte Carlo method"))?;
            let m = derive_dsm(&t)?;
            let mut rows = Vec::new();
            for (i, c) in enumerate_cuts(&t)?.iter().enumerate() {
                let profile = c.omega().iter().map(|&j| (j, InputLaw::Uniform)).collect();
                let est = mi_monte_carlo(
                    McModel::Dsm(&m),
                    &profile,
                    c.omega(),
                    c.complement(),
                    a.samples,
                    rng::derive_seed(seed, i as u64),
                )?;
                rows.push(json!({ "cut": c.label(), "dsm": est }));
            }
            emit_json(cli, json!({ "n": m.n(), "cuts": rows }))?;
        }
    }
    Ok(None)
}

fn gap(cli: &Cli, a: &GapArgs) -> Result<Option<Failed>> {
    let doc = a.net.document()?;
    let mut out = format!("# config: {}\n", serde_json::to_string(&cli.command)?);
    out.push_str("k,cut,gaussian_bits,ldm_bits,dsm_bits,gaussian_minus_ldm,gaussian_minus_dsm\n");
    for &k in &a.h_exponents {
        let mut overrides: BTreeMap<String, f64> = a.net.overrides.iter().cloned().collect();
        overrides.insert(a.param.clone(), (k as f64).exp2());
        let t = doc.build(&overrides)?;
        let opts = GapOptions { depth: a.depth.into(), only_cuts: a.cut.clone().map(|c| vec![c]), ..Default::default() };
        let rep: GapReport = gap_report(&t, &opts)?;
        log::info!("k = {k}: {} cuts", rep.rows.len());
        for r in &rep.rows {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{k},{},{},{},{},{},{}\n",
                r.cut,
                r.gaussian_bits,
                opt(r.ldm_bits.map(f64::from)),
                opt(r.dsm_bits),
                opt(r.ldm_bits.map(|l| r.gaussian_bits - l as f64)),
                opt(r.dsm_bits.map(|d| r.gaussian_bits - d)),
            ));
        }
    }
    emit(cli.output.as_deref(), &out)?;
    Ok(None)
}

fn bounds(cli: &Cli, a: &BoundsArgs) -> Result<Option<Failed>> {
    let c = gap_constants(a.m, a.k, a.l)?;
    emit_json(
        cli,
        json!({
            "constants": c,
            "geometric_unit_mean_entropy": geometric_entropy(1.0),
            "max_entropy_unit_power": max_entropy_integer_power(1.0, 4096)?,
            "quantized_gaussian_entropy": quantized_gaussian_entropy(0.5)?,
        }),
    )?;
    Ok(None)
}

fn genie(cli: &Cli, a: &GenieArgs) -> Result<Option<Failed>> {
    if let Some(draws) = a.stress {
        let s = genie_stress(draws, a.nodes, 100, a.seed)?;
        let ok = s.reconstruction_failures == 0 && s.carry_histogram.keys().all(|c| c.abs() <= 2);
        emit_json(cli, &s)?;
        return Ok((!ok).then(|| Failed("reconstruction failures or carries outside {-2..2}".into())));
    }
    let path = a.network.as_ref().ok_or_else(|| anyhow!("give --network or --stress"))?;
    let net = NetworkArgs { network: path.clone(), overrides: a.overrides.clone() };
    let t = net.topology()?;
    let noise = match a.noise {
        NoiseArg::Unit => GenieNoise::Unit,
        NoiseArg::None => GenieNoise::None,
    };
    let nodes: Vec<usize> = match a.node {
        Some(j) => vec![j],
        None => (0..t.node_count()).filter(|&j| !t.in_edges(j).is_empty()).collect(),
    };
    let rows = nodes
        .iter()
        .map(|&j| genie_side_info_entropy_with(&t, j, a.samples, rng::derive_seed(a.seed, j as u64), noise))
        .collect::<dsm_core::Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r.within_bound && r.reconstruction_failures == 0);
    emit_json(cli, &rows)?;
    Ok((!ok).then(|| Failed("side information exceeds the per-node bound".into())))
}

fn lift(cli: &Cli, a: &LiftArgs) -> Result<Option<Failed>> {
    let t = a.net.topology()?;
    let code = load_code_file(&a.code).with_context(|| format!("reading {}", a.code.display()))?;
    let cfg = LiftConfig {
        m: a.m,
        exponent: match a.exponent {
            Some(e) => ExponentChoice::Fixed(e),
            None => ExponentChoice::Measured { samples: a.genie_samples },
        },
        epsilon: a.epsilon,
        eta: a.eta,
        trials: a.trials,
        noise: match a.noise {
            NoiseArg::Unit => Noise::Unit,
            NoiseArg::None => Noise::None,
        },
        seed: a.seed,
    };
    let rep = lift_pipeline(&t, &code, &cfg)?;
    let empty = rep.trials.is_none();
    emit_json(cli, &rep)?;
    Ok(empty.then(|| Failed("the pruned codebook is empty".into())))
}

fn sandwich(cli: &Cli, a: &IcArgs) -> Result<Option<Failed>> {
    let t = a.net.topology()?;
    let rep = ic_sandwich(&t, &a.grid, a.samples, a.seed)?;
    if a.csv {
        let mut out = format!("# config: {}\n", serde_json::to_string(&cli.command)?);
        out.push_str("scale,n,user,r_g,r_d,r_d_code,genie_bits,r_g_prime,forward_gap,reverse_gap,split_loss,residual_loss\n");
        for p in &rep.points {
            for u in &p.users {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    p.scale,
                    p.n,
                    u.user,
                    u.r_g,
                    u.r_d,
                    u.r_d_code,
                    u.genie_bits,
                    u.r_g_prime,
                    u.forward_gap,
                    u.reverse_gap,
                    u.split_loss,
                    u.residual_loss
                ));
            }
        }
        emit(cli.output.as_deref(), &out)?;
    } else {
        emit_json(cli, &rep)?;
    }
    let ok = rep.forward_holds() && rep.reverse_holds() && rep.losses_hold();
    Ok((!ok).then(|| Failed("a rate gap or step loss exceeds its constant".into())))
}

fn run_verify(cli: &Cli, a: &VerifyArgs) -> Result<Option<Failed>> {
    let checks = verify::run_all(a.seed)?;
    let mut text = String::new();
    for c in &checks {
        text.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    match &cli.output {
        Some(p) => {
            let doc = json!({ "config": &cli.command, "report": &checks });
            fs::write(p, serde_json::to_string_pretty(&doc)? + "\n")?;
            eprint!("{text}");
        }
        None => print!("{text}"),
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    Ok((!failed.is_empty()).then(|| Failed(failed.join(", "))))
}
