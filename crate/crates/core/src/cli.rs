//! Command-line front end. Every subcommand produces a [`Report`] that is
//! rendered as JSON or CSV; [`run`] is what the `cqbound` binary calls.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{bpsk_simplified_bound, sweep, BoundCurve, BoundModel};
use crate::capacities::{
    c1_binary, gaussian_holevo, holevo_binary, holevo_general, max_mutual_information, pie,
    DiscreteChannel, DEFAULT_TOL,
};
use crate::dmcsim::{brute_force_cn, simulate, CodeChoice};
use crate::error::{Error, Result};
use crate::exponents::{
    awgn_vc_ratio_lowsnr, classical_dispersion, quantum_dispersion,
    ClassicalExponent, ExponentModel, QuantumExponent,
};
use crate::optical::{c1_bpsk, c_bpsk, lemma1_optimal_binary, CoherentConstellation};
use crate::spectral::{ensemble_spectrum, GramEnsemble};

#[derive(Debug, Parser)]
#[command(name = "cqbound", version, about = "Finite-blocklength rate bounds for pure-state cq channels and DMCs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for randomized commands.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity and single-letter accessible information.
    Capacity(ModelArgs),
    /// Lower bounds on C_N/N over blocklengths.
    Bound(BoundArgs),
    /// Random-coding error exponent at a rate.
    Exponent(ExponentArgs),
    /// Channel dispersion and V/C².
    Dispersion(DispersionArgs),
    /// Optimal binary coherent inputs for symbol-by-symbol detection.
    Lemma1(Lemma1Args),
    /// Simulate an inner code over a DMC.
    Dmcsim(DmcsimArgs),
    /// Exhaustive C_N for a tiny DMC.
    OracleCn(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Two equiprobable pure states with overlap --gamma.
    Binary,
    /// Coherent BPSK at mean photon number --energy.
    Bpsk,
    /// Pure states from --ensemble-file.
    Ensemble,
    /// Coherent states from --constellation-file.
    Constellation,
    /// Classical DMC from --channel or --channel-file.
    Dmc,
    /// Capacity and dispersion given directly (bound only).
    Dispersion,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub energy: Option<f64>,
    /// Channel shorthand such as `bsc:0.11`.
    #[arg(long, conflicts_with = "channel_file")]
    pub channel: Option<String>,
    #[arg(long)]
    pub channel_file: Option<PathBuf>,
    #[arg(long)]
    pub ensemble_file: Option<PathBuf>,
    #[arg(long)]
    pub constellation_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub capacity: Option<f64>,
    #[arg(long)]
    pub dispersion: Option<f64>,
    /// Single blocklength.
    #[arg(long, conflicts_with = "n_grid")]
    pub n: Option<u64>,
    /// `a:b:logK` (K log-spaced points) or `a:b:step`.
    #[arg(long)]
    pub n_grid: Option<String>,
    /// For bpsk, also report the simplified leading-order bound.
    #[arg(long)]
    pub simplified: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Rate in nats per channel use.
    #[arg(long)]
    pub rate: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DispersionArgs {
    #[arg(long, value_enum, required_unless_present = "snr")]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long, conflicts_with = "channel_file")]
    pub channel: Option<String>,
    #[arg(long)]
    pub channel_file: Option<PathBuf>,
    #[arg(long)]
    pub ensemble_file: Option<PathBuf>,
    #[arg(long)]
    pub constellation_file: Option<PathBuf>,
    /// Report the low-SNR AWGN ratio 4/SNR instead.
    #[arg(long, conflicts_with = "model")]
    pub snr: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct Lemma1Args {
    #[arg(long)]
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeKind {
    Random,
    Repetition,
}

#[derive(Debug, Clone, Args)]
pub struct DmcsimArgs {
    #[arg(long, conflicts_with = "channel_file")]
    pub channel: Option<String>,
    #[arg(long)]
    pub channel_file: Option<PathBuf>,
    #[arg(long)]
    pub n: usize,
    /// Target inner rate; the code has round(e^{n·rate}) words.
    #[arg(long)]
    pub rate: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = CodeKind::Random)]
    pub code: CodeKind,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, conflicts_with = "channel_file")]
    pub channel: Option<String>,
    #[arg(long)]
    pub channel_file: Option<PathBuf>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
}

/// Result of a subcommand before rendering.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Value(Value),
    Curve(BoundCurve),
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String> {
        match (self, format) {
            (Report::Curve(c), Format::Csv) => Ok(c.to_csv()),
            (Report::Curve(c), Format::Json) => Ok(serde_json::to_string_pretty(c)? + "\n"),
            (Report::Value(v), Format::Json) => Ok(serde_json::to_string_pretty(v)? + "\n"),
            (Report::Value(v), Format::Csv) => Ok(value_to_csv(v)),
        }
    }
}

fn value_to_csv(v: &Value) -> String {
    let mut out = String::from("key,value\n");
    if let Value::Object(map) = v {
        for (k, val) in map {
            let cell = match val {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string().replace(',', ";"),
            };
            out.push_str(&format!("{k},{cell}\n"));
        }
    }
    out
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Invalid(format!("--{flag} is required for this model")))
}

fn load_channel(spec: &Option<String>, file: &Option<PathBuf>) -> Result<DiscreteChannel> {
    match (spec, file) {
        (Some(s), _) => DiscreteChannel::from_spec(s),
        (None, Some(f)) => DiscreteChannel::from_json(&read(f)?),
        (None, None) => Err(Error::Invalid("--channel or --channel-file is required".into())),
    }
}

enum Resolved {
    Binary(f64),
    Bpsk(f64),
    Ensemble(GramEnsemble, Option<f64>),
    Dmc(DiscreteChannel),
}

fn resolve(m: &ModelArgs) -> Result<Resolved> {
    match m.model {
        ModelKind::Binary => Ok(Resolved::Binary(require(m.gamma, "gamma")?)),
        ModelKind::Bpsk => Ok(Resolved::Bpsk(require(m.energy, "energy")?)),
        ModelKind::Ensemble => {
            let path = m
                .ensemble_file
                .as_ref()
                .ok_or_else(|| Error::Invalid("--ensemble-file is required".into()))?;
            Ok(Resolved::Ensemble(GramEnsemble::from_json(&read(path)?)?, m.energy))
        }
        ModelKind::Constellation => {
            let path = m
                .constellation_file
                .as_ref()
                .ok_or_else(|| Error::Invalid("--constellation-file is required".into()))?;
            let c = CoherentConstellation::from_json(&read(path)?)?;
            Ok(Resolved::Ensemble(c.to_ensemble()?, Some(c.energy())))
        }
        ModelKind::Dmc => Ok(Resolved::Dmc(load_channel(&m.channel, &m.channel_file)?)),
        ModelKind::Dispersion => Err(Error::Invalid(
            "the dispersion model only applies to the bound command".into(),
        )),
    }
}

fn bpsk_gram(energy: f64) -> Result<GramEnsemble> {
    crate::optical::bpsk_ensemble(energy, 0.5)
}

#[derive(Serialize)]
struct CapacityReport {
    c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pie: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pie1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_asymptotic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c1_asymptotic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prior: Option<Vec<f64>>,
}

pub fn cmd_capacity(m: &ModelArgs) -> Result<Report> {
    let r = match resolve(m)? {
        Resolved::Binary(g) => CapacityReport {
            c: holevo_binary(g)?,
            c1: Some(c1_binary(g)?),
            pie: None,
            pie1: None,
            gaussian_c: None,
            c_asymptotic: None,
            c1_asymptotic: None,
            prior: None,
        },
        Resolved::Bpsk(e) => {
            let c = c_bpsk(e)?;
            let c1 = c1_bpsk(e)?;
            CapacityReport {
                c: c.exact,
                c1: Some(c1.exact),
                pie: Some(pie(c.exact, e)?),
                pie1: Some(pie(c1.exact, e)?),
                gaussian_c: Some(gaussian_holevo(e)?),
                c_asymptotic: Some(c.asymptotic),
                c1_asymptotic: Some(c1.asymptotic),
                prior: None,
            }
        }
        Resolved::Ensemble(ens, energy) => {
            let opt = holevo_general(&ens, DEFAULT_TOL)?;
            CapacityReport {
                c: opt.value,
                c1: None,
                pie: energy.map(|e| pie(opt.value, e)).transpose()?,
                pie1: None,
                gaussian_c: energy.map(gaussian_holevo).transpose()?,
                c_asymptotic: None,
                c1_asymptotic: None,
                prior: Some(opt.prior),
            }
        }
        Resolved::Dmc(ch) => {
            let opt = max_mutual_information(&ch, DEFAULT_TOL)?;
            CapacityReport {
                c: opt.value,
                c1: None,
                pie: None,
                pie1: None,
                gaussian_c: None,
                c_asymptotic: None,
                c1_asymptotic: None,
                prior: Some(opt.prior),
            }
        }
    };
    Ok(Report::Value(to_value(&r)?))
}

/// Parses `a:b:logK` (K log-spaced integers, duplicates removed) or
/// `a:b:step`.
pub fn parse_n_grid(spec: &str) -> Result<Vec<u64>> {
    let bad = || Error::Invalid(format!("malformed n-grid `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    if !(a >= 1.0 && b >= a) {
        return Err(bad());
    }
    let mut grid: Vec<u64> = if let Some(k) = parts[2].strip_prefix("log") {
        let k: usize = k.parse().map_err(|_| bad())?;
        match k {
            0 => return Err(bad()),
            1 => vec![a.round() as u64],
            _ => (0..k)
                .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (k - 1) as f64).exp().round() as u64)
                .collect(),
        }
    } else {
        let step: f64 = parts[2].parse().map_err(|_| bad())?;
        if !(step > 0.0) {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor() as u64;
        (0..=count).map(|i| (a + step * i as f64).round() as u64).collect()
    };
    grid.dedup();
    Ok(grid)
}

pub fn cmd_bound(args: &BoundArgs) -> Result<Report> {
    let ns = match (&args.n, &args.n_grid) {
        (Some(n), _) => vec![*n],
        (None, Some(g)) => parse_n_grid(g)?,
        (None, None) => return Err(Error::Invalid("--n or --n-grid is required".into())),
    };
    let model = if args.model.model == ModelKind::Dispersion {
        BoundModel::Dispersion {
            capacity: require(args.capacity, "capacity")?,
            dispersion: require(args.dispersion, "dispersion")?,
        }
    } else {
        match resolve(&args.model)? {
            Resolved::Binary(gamma) => BoundModel::Binary { gamma },
            Resolved::Bpsk(energy) => BoundModel::Bpsk { energy },
            Resolved::Ensemble(ensemble, energy) => BoundModel::Ensemble { ensemble, energy },
            Resolved::Dmc(ch) => BoundModel::Dmc(ch),
        }
    };
    let curve = sweep(&model, &ns)?;
    for e in &curve.entries {
        if let Some(msg) = &e.error {
            eprintln!("n = {}: {msg}", e.n);
        }
    }
    if args.simplified {
        let BoundModel::Bpsk { energy } = model else {
            return Err(Error::Invalid("--simplified applies to the bpsk model".into()));
        };
        let rows: Vec<Value> = ns
            .iter()
            .map(|&n| match bpsk_simplified_bound(energy, n) {
                Ok(v) => json!({"n": n, "rate_nats": v, "pie_nats_per_photon": v / energy}),
                Err(e) => json!({"n": n, "error": e.to_string()}),
            })
            .collect();
        return Ok(Report::Value(json!({"curve": curve, "simplified": rows})));
    }
    Ok(Report::Curve(curve))
}

pub fn cmd_exponent(args: &ExponentArgs) -> Result<Report> {
    let (point, capacity) = match resolve(&args.model)? {
        Resolved::Binary(g) => {
            let m = QuantumExponent::new(&GramEnsemble::binary(0.5, g)?)?;
            (m.exponent(args.rate)?, m.capacity().value)
        }
        Resolved::Bpsk(e) => {
            let m = QuantumExponent::new(&bpsk_gram(e)?)?;
            (m.exponent(args.rate)?, m.capacity().value)
        }
        Resolved::Ensemble(ens, _) => {
            let m = QuantumExponent::new(&ens)?;
            (m.exponent(args.rate)?, m.capacity().value)
        }
        Resolved::Dmc(ch) => {
            let m = ClassicalExponent::new(&ch)?;
            (m.exponent(args.rate)?, m.capacity().value)
        }
    };
    let mut v = to_value(&point)?;
    v["capacity"] = json!(capacity);
    Ok(Report::Value(v))
}

pub fn cmd_dispersion(args: &DispersionArgs) -> Result<Report> {
    if let Some(snr) = args.snr {
        return Ok(Report::Value(json!({"snr": snr, "v_over_c2": awgn_vc_ratio_lowsnr(snr)?})));
    }
    let m = ModelArgs {
        model: args.model.expect("clap enforces --model or --snr"),
        gamma: args.gamma,
        energy: args.energy,
        channel: args.channel.clone(),
        channel_file: args.channel_file.clone(),
        ensemble_file: args.ensemble_file.clone(),
        constellation_file: args.constellation_file.clone(),
    };
    let quantum = |ens: &GramEnsemble| -> Result<(f64, f64)> {
        let opt = holevo_general(ens, DEFAULT_TOL)?;
        let v = quantum_dispersion(&ensemble_spectrum(&ens.with_prior(opt.prior)?)?);
        Ok((opt.value, v))
    };
    let (c, v, energy) = match resolve(&m)? {
        Resolved::Binary(g) => {
            let (_, v) = quantum(&GramEnsemble::binary(0.5, g)?)?;
            (holevo_binary(g)?, v, None)
        }
        Resolved::Bpsk(e) => {
            let (_, v) = quantum(&bpsk_gram(e)?)?;
            (c_bpsk(e)?.exact, v, Some(e))
        }
        Resolved::Ensemble(ens, e) => {
            let (c, v) = quantum(&ens)?;
            (c, v, e)
        }
        Resolved::Dmc(ch) => (
            max_mutual_information(&ch, DEFAULT_TOL)?.value,
            classical_dispersion(&ch)?,
            None,
        ),
    };
    let mut out = json!({"c": c, "v": v, "v_over_c2": v / (c * c)});
    if let (ModelKind::Bpsk, Some(e)) = (m.model, energy) {
        out["v_asymptotic"] = json!(e * (1.0 / e).ln().powi(2));
        out["inverse_energy"] = json!(1.0 / e);
    }
    Ok(Report::Value(out))
}

pub fn cmd_lemma1(args: &Lemma1Args) -> Result<Report> {
    Ok(Report::Value(to_value(&lemma1_optimal_binary(args.energy)?)?))
}

pub fn cmd_dmcsim(args: &DmcsimArgs, seed: u64) -> Result<Report> {
    let ch = load_channel(&args.channel, &args.channel_file)?;
    let choice = match args.code {
        CodeKind::Random => CodeChoice::Random,
        CodeKind::Repetition => CodeChoice::Repetition,
    };
    let r = simulate(&ch, args.n, args.rate, args.trials, seed, choice)?;
    Ok(Report::Value(to_value(&r)?))
}

pub fn cmd_oracle_cn(args: &OracleArgs) -> Result<Report> {
    let ch = load_channel(&args.channel, &args.channel_file)?;
    let r = brute_force_cn(&ch, args.n, args.m)?;
    let mut v = to_value(&r)?;
    v["cn_per_use"] = json!(r.cn / args.n as f64);
    Ok(Report::Value(v))
}

/// Executes a parsed command and returns the rendered output.
pub fn run(cli: &Cli) -> Result<String> {
    let report = match &cli.command {
        Command::Capacity(m) => cmd_capacity(m)?,
        Command::Bound(b) => cmd_bound(b)?,
        Command::Exponent(e) => cmd_exponent(e)?,
        Command::Dispersion(d) => cmd_dispersion(d)?,
        Command::Lemma1(l) => cmd_lemma1(l)?,
        Command::Dmcsim(d) => cmd_dmcsim(d, cli.seed)?,
        Command::OracleCn(o) => cmd_oracle_cn(o)?,
    };
    report.render(cli.format)
}

/// Writes `text` to `path` through a temporary file in the same directory.
pub fn write_atomically(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Runs the command and delivers its output to `--out` or stdout.
pub fn execute(cli: &Cli) -> Result<()> {
    let text = run(cli)?;
    match &cli.out {
        Some(path) => write_atomically(path, &text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
