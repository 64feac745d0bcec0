//! Command-line front end for LDPC convolutional code analysis and simulation.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ldpc_cc::bench::{check_invariants, run_sweep, to_csv, SweepConfig};
use ldpc_cc::channel::{sample_pattern, ChannelSpec};
use ldpc_cc::code::{
    expand, mbl_bounds, mbl_search, Carry, DecoderSpec, ErasurePattern, ExpandOptions,
    ExpandedCode, GirthFilter,
};
use ldpc_cc::dethresh::{bp_threshold, windowed_threshold, windowed_threshold_min, DeParams};
use ldpc_cc::presets::preset;
use ldpc_cc::stopspan::{ensemble_min_span, span_bound, windowed_min_span, SpanSearch};
use ldpc_cc::Ensemble;

#[derive(Parser)]
#[command(name = "ldpccc", version, about = "Protograph LDPC convolutional code toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density-evolution thresholds on the erasure channel.
    Threshold(ThresholdArgs),
    /// Minimal stopping-set span and size of an ensemble.
    Span(SpanArgs),
    /// Lift an ensemble to a parity-check matrix.
    Expand(ExpandArgs),
    /// Maximum resolvable solid burst length of a lifted code.
    Mbl(MblArgs),
    /// Decode one erasure pattern.
    Decode(DecodeArgs),
    /// Run a Monte Carlo sweep.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct EnsembleArgs {
    /// Ensemble JSON file.
    #[arg(long, conflicts_with = "preset")]
    ensemble: Option<PathBuf>,
    /// Named preset C1..C8.
    #[arg(long)]
    preset: Option<String>,
    /// Termination length; overrides the file value.
    #[arg(long = "L")]
    l: Option<usize>,
}

impl EnsembleArgs {
    fn load(&self) -> Result<Ensemble> {
        match (&self.ensemble, &self.preset) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let ens: Ensemble = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                Ok(match self.l {
                    Some(l) => ens.with_length(l)?,
                    None => ens,
                })
            }
            (None, Some(name)) => {
                let l = self.l.context("--preset needs --L")?;
                Ok(preset(name, l)?)
            }
            _ => bail!("give either --ensemble FILE or --preset NAME --L N"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdKind {
    Bp,
    Wd,
}

#[derive(Args)]
struct ThresholdArgs {
    kind: ThresholdKind,
    #[command(flatten)]
    ens: EnsembleArgs,
    #[arg(long = "W")]
    w: Option<usize>,
    #[arg(long, default_value_t = 1e-12)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    groups: usize,
    /// Inclusive window range `a..b`.
    #[arg(long = "sweep-W")]
    sweep_w: Option<String>,
    /// Only report the minimum over configurations (faster, no argmin scan).
    #[arg(long)]
    fast: bool,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-5)]
    tol_eps: f64,
}

#[derive(Args)]
struct SpanArgs {
    #[command(flatten)]
    ens: EnsembleArgs,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 1, requires = "window")]
    groups: usize,
    #[arg(long)]
    bounds_only: bool,
    #[arg(long)]
    width_cap: Option<usize>,
}

#[derive(Args)]
struct LiftArgs {
    #[command(flatten)]
    ens: EnsembleArgs,
    #[arg(long = "M")]
    m: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = GirthArg::Auto)]
    girth: GirthArg,
}

impl LiftArgs {
    fn build(&self) -> Result<ExpandedCode> {
        let ens = self.ens.load()?;
        let girth = match self.girth {
            GirthArg::Auto => GirthFilter::Auto,
            GirthArg::On => GirthFilter::On,
            GirthArg::Off => GirthFilter::Off,
        };
        let opts = ExpandOptions { girth, ..ExpandOptions::default() };
        Ok(expand(&ens, self.m, self.seed, &opts)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GirthArg {
    Auto,
    On,
    Off,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    lift: LiftArgs,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderKind {
    Bp,
    Wd,
}

#[derive(Clone, Copy, ValueEnum)]
enum CarryArg {
    All,
    TargetedOnly,
}

#[derive(Args)]
struct DecoderArgs {
    #[arg(long, value_enum, default_value_t = DecoderKind::Bp)]
    decoder: DecoderKind,
    #[arg(long = "W")]
    w: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = CarryArg::All)]
    carry: CarryArg,
}

impl DecoderArgs {
    fn spec(&self) -> Result<DecoderSpec> {
        Ok(match self.decoder {
            DecoderKind::Bp => DecoderSpec::Bp,
            DecoderKind::Wd => DecoderSpec::Wd {
                w: self.w.context("--decoder wd needs --W")?,
                delta: self.delta,
                carry: match self.carry {
                    CarryArg::All => Carry::All,
                    CarryArg::TargetedOnly => Carry::TargetedOnly,
                },
            },
        })
    }
}

#[derive(Args)]
struct MblArgs {
    #[command(flatten)]
    lift: LiftArgs,
    #[command(flatten)]
    dec: DecoderArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Bec,
    Gec,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    lift: LiftArgs,
    #[command(flatten)]
    dec: DecoderArgs,
    /// File of '0'/'1' characters, one per code symbol.
    #[arg(long, conflicts_with = "channel")]
    pattern: Option<PathBuf>,
    /// Sample the pattern from a channel instead.
    #[arg(long, value_enum)]
    channel: Option<ChannelArg>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    burst: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pattern_seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once("..").context("window range must look like a..b")?;
    let (a, b) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        bail!("empty window range {s}");
    }
    Ok((a, b))
}

fn threshold(args: &ThresholdArgs, out: &mut impl Write) -> Result<()> {
    let ens = args.ens.load()?;
    let params = DeParams { max_iter: args.max_iter, tol_eps: args.tol_eps, ..DeParams::default() };
    writeln!(out, "ensemble,W,delta,groups,threshold,argmin_config")?;
    match args.kind {
        ThresholdKind::Bp => {
            let r = bp_threshold(&ens, &params)?;
            writeln!(out, "{},,,,{:.6},", ens.label(), r.threshold)?;
        }
        ThresholdKind::Wd => {
            let ws = match (&args.sweep_w, args.w) {
                (Some(range), _) => {
                    let (a, b) = parse_range(range)?;
                    (a..=b).collect::<Vec<_>>()
                }
                (None, Some(w)) => vec![w],
                (None, None) => bail!("threshold wd needs --W or --sweep-W"),
            };
            for w in ws {
                let r = if args.fast {
                    windowed_threshold_min(&ens, w, args.delta, args.groups, &params)?
                } else {
                    windowed_threshold(&ens, w, args.delta, args.groups, &params)?
                };
                let arg = r.argmin_config.map(|c| c.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{w},{:e},{},{:.6},{arg}",
                    ens.label(),
                    args.delta,
                    args.groups,
                    r.threshold
                )?;
            }
        }
    }
    Ok(())
}

fn span(args: &SpanArgs, out: &mut impl Write) -> Result<()> {
    let ens = args.ens.load()?;
    let opts = SpanSearch { width_cap: args.width_cap, ..SpanSearch::default() };
    let bound = span_bound(&ens)?;
    let value = if args.bounds_only {
        json!({ "label": ens.label(), "bounds": bound })
    } else if let Some(w) = args.window {
        let s = windowed_min_span(&ens, w, args.groups, &opts)?;
        json!({ "label": ens.label(), "W": w, "groups": args.groups, "min_span": s, "bounds": bound })
    } else {
        let r = ensemble_min_span(&ens, &opts)?;
        json!({
            "label": ens.label(),
            "min_span": r.min_span,
            "min_size": r.min_size,
            "span_witness": r.span_witness.columns,
            "size_witness": r.size_witness.columns,
            "bounds": r.bound,
        })
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    Ok(())
}

fn expand_cmd(args: &ExpandArgs, out: &mut impl Write) -> Result<()> {
    let code = args.lift.build()?;
    match &args.out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            code.write_sparse(io::BufWriter::new(file))?;
            let summary = json!({
                "n": code.n(),
                "n_rows": code.n_rows(),
                "nnz": code.nnz(),
                "design_k": code.design_k(),
                "k": code.k(),
                "girth_filtered": code.girth_filtered(),
            });
            writeln!(out, "{summary}")?;
        }
        None => code.write_sparse(out)?,
    }
    Ok(())
}

fn mbl(args: &MblArgs, out: &mut impl Write) -> Result<()> {
    let code = args.lift.build()?;
    let dec = args.dec.spec()?;
    let delta_max = mbl_search(&code, &dec)?;
    // window decoding is limited by the stopping sets of a single window
    let opts = SpanSearch::default();
    let span = match dec {
        DecoderSpec::Bp => ensemble_min_span(code.ensemble(), &opts)?.min_span,
        DecoderSpec::Wd { w, .. } => windowed_min_span(code.ensemble(), w, 1, &opts)?,
    };
    let (lo, hi) = mbl_bounds(span, code.m())?;
    let value = json!({
        "decoder": dec,
        "n": code.n(),
        "k": code.k(),
        "min_span": span,
        "mbl": delta_max,
        "lower_bound": lo,
        "upper_bound": hi,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    Ok(())
}

fn decode(args: &DecodeArgs, out: &mut impl Write) -> Result<()> {
    let code = args.lift.build()?;
    let pattern = match (&args.pattern, args.channel) {
        (Some(path), _) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ErasurePattern::parse(&text)?
        }
        (None, Some(kind)) => {
            let eps = args.eps.context("--channel needs --eps")?;
            let spec = match kind {
                ChannelArg::Bec => ChannelSpec::bec(eps)?,
                ChannelArg::Gec => ChannelSpec::gec(eps, args.burst.context("gec needs --burst")?)?,
            };
            sample_pattern(&spec, code.n(), &mut ChaCha8Rng::seed_from_u64(args.pattern_seed))?
        }
        (None, None) => bail!("give --pattern FILE or --channel"),
    };
    if pattern.len() != code.n() {
        bail!("pattern has {} symbols, code has {}", pattern.len(), code.n());
    }
    let dec = args.dec.spec()?;
    let r = dec.decode(&code, &pattern)?;
    let value = json!({
        "decoder": dec,
        "n": code.n(),
        "erased": pattern.count(),
        "residual_count": r.residual_count,
        "success": r.success,
        "rounds": r.rounds,
        "latency_ratio": r.latency_ratio,
        "residual": r.residual.to_text(),
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    Ok(())
}

/// Returns false when the results violate a sanity invariant.
fn simulate(args: &SimulateArgs, out: &mut impl Write) -> Result<bool> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let cfg: SweepConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    let rows = run_sweep(&cfg)?;
    fs::write(&args.out, to_csv(&rows))
        .with_context(|| format!("writing {}", args.out.display()))?;
    let violations = check_invariants(&rows);
    for v in &violations {
        eprintln!("invariant violated: {v}");
    }
    writeln!(out, "{} rows written to {}", rows.len(), args.out.display())?;
    Ok(violations.is_empty())
}

fn run(cli: &Cli) -> Result<bool> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Threshold(a) => threshold(a, &mut out)?,
        Command::Span(a) => span(a, &mut out)?,
        Command::Expand(a) => expand_cmd(a, &mut out)?,
        Command::Mbl(a) => mbl(a, &mut out)?,
        Command::Decode(a) => decode(a, &mut out)?,
        Command::Simulate(a) => return simulate(a, &mut out),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
