//! Monte Carlo sweeps over channels and decoders, with the Singleton bound
//! and the window-decoding latency model as baselines.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::channel::{sample_pattern, ChannelSpec};
use crate::code::{expand, Carry, DecoderSpec, ExpandOptions, ExpandedCode};
use crate::error::{Error, Result};
use crate::presets::preset;
use crate::protograph::Ensemble;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Codeword error probability of an ideal `(n, k)` MDS code on BEC(`eps`):
/// the probability of more than `n - k` erasures.
pub fn singleton_bound(n: u64, k: u64, eps: f64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("erasure rate {eps} outside [0, 1]")));
    }
    if k == 0 || eps == 0.0 {
        return Ok(0.0);
    }
    if eps == 1.0 {
        return Ok(1.0);
    }
    let (le, lq) = (eps.ln(), (-eps).ln_1p());
    let terms: Vec<f64> =
        (n - k + 1..=n).map(|j| ln_binomial(n, j) + j as f64 * le + (n - j) as f64 * lq).collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    Ok((top + sum.ln()).exp().min(1.0))
}

/// Window latency relative to full BP decoding: `((W + m_s)/L, (2 m_s + 1)/L)`.
pub fn latency_model(w: usize, ms: usize, l: usize) -> Result<(f64, f64)> {
    if l == 0 || w < ms + 1 || w > l + ms {
        return Err(Error::WindowRange { w, min: ms + 1, max: l + ms });
    }
    Ok(((w + ms) as f64 / l as f64, (2 * ms + 1) as f64 / l as f64))
}

/// Where a sweep gets its ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnsembleSource {
    Preset {
        preset: String,
        #[serde(rename = "L")]
        l: usize,
    },
    File {
        file: PathBuf,
    },
    Inline(Ensemble),
}

impl EnsembleSource {
    pub fn resolve(&self) -> Result<Ensemble> {
        match self {
            EnsembleSource::Preset { preset: name, l } => preset(name, *l),
            EnsembleSource::File { file } => {
                let text = std::fs::read_to_string(file)
                    .map_err(|e| Error::Config(format!("{}: {e}", file.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", file.display())))
            }
            EnsembleSource::Inline(e) => Ok(e.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bec,
    Gec,
}

fn default_min_errors() -> u64 {
    100
}

fn default_batch() -> u64 {
    256
}

/// A Monte Carlo sweep description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub ensemble: EnsembleSource,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub channel: ChannelKind,
    pub eps: Vec<f64>,
    /// Mean burst length for the Gilbert-Elliott channel.
    #[serde(default)]
    pub burst: Option<f64>,
    pub decoders: Vec<DecoderSpec>,
    /// Trial cap per point.
    pub trials: u64,
    /// Stop a point once this many codewords fail.
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
    /// Trials per deterministic batch.
    #[serde(default = "default_batch")]
    pub batch: u64,
    #[serde(default)]
    pub expand: ExpandOptions,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if self.batch < 1 {
            return bad("batch must be at least 1".into());
        }
        if self.eps.is_empty() || self.decoders.is_empty() {
            return bad("eps and decoders must be non-empty".into());
        }
        for spec in self.channels()? {
            spec.validate()?;
        }
        Ok(())
    }

    fn channels(&self) -> Result<Vec<ChannelSpec>> {
        self.eps
            .iter()
            .map(|&eps| match (self.channel, self.burst) {
                (ChannelKind::Bec, _) => ChannelSpec::bec(eps),
                (ChannelKind::Gec, Some(b)) => ChannelSpec::gec(eps, b),
                (ChannelKind::Gec, None) => {
                    Err(Error::Config("gec channel needs a burst length".into()))
                }
            })
            .collect()
    }
}

/// One aggregated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub label: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub channel: String,
    pub eps: f64,
    pub burst: Option<f64>,
    pub decoder: String,
    #[serde(rename = "W")]
    pub w: Option<usize>,
    pub delta: Option<f64>,
    pub carry: Option<Carry>,
    pub n: usize,
    pub k_true: usize,
    pub design_k: i64,
    pub trials: u64,
    /// Codewords with at least one residual erasure.
    pub errors: u64,
    pub symbol_errors: u64,
    pub ser: f64,
    pub ser_ci95: f64,
    pub cer: f64,
    /// Wilson score half-width.
    pub cer_ci95: f64,
    pub cer_low: f64,
    pub cer_high: f64,
    pub singleton: f64,
    pub w_ratio: Option<f64>,
    pub wall_s: f64,
}

/// Wilson score interval `(low, high)` for `x` successes in `n` trials.
pub fn wilson(x: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (nf, p) = (n as f64, x as f64 / n as f64);
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// RNG stream for one trial: the master seed with the trial index as stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Default, Clone, Copy)]
struct Tally {
    trials: u64,
    errors: u64,
    symbols: u64,
    sq: f64,
}

impl Tally {
    fn add(mut self, o: Tally) -> Tally {
        self.trials += o.trials;
        self.errors += o.errors;
        self.symbols += o.symbols;
        self.sq += o.sq;
        self
    }
}

fn run_point(
    code: &ExpandedCode,
    spec: &ChannelSpec,
    decoder: &DecoderSpec,
    cfg: &SweepConfig,
) -> Result<Tally> {
    let n = code.n();
    let mut total = Tally::default();
    while total.trials < cfg.trials && total.errors < cfg.min_errors {
        let end = (total.trials + cfg.batch).min(cfg.trials);
        let batch = (total.trials..end)
            .into_par_iter()
            .map(|t| {
                let pattern = sample_pattern(spec, n, &mut trial_rng(cfg.seed, t))?;
                let out = decoder.decode(code, &pattern)?;
                let r = out.residual_count as u64;
                let frac = r as f64 / n as f64;
                Ok(Tally { trials: 1, errors: u64::from(r > 0), symbols: r, sq: frac * frac })
            })
            .collect::<Result<Vec<Tally>>>()?;
        total = batch.into_iter().fold(total, Tally::add);
    }
    Ok(total)
}

/// Run every (eps, decoder) point of a sweep on one expanded code.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let ens = cfg.ensemble.resolve()?;
    let code = expand(&ens, cfg.m, cfg.seed, &cfg.expand)?;
    run_sweep_on(&code, cfg)
}

/// As [`run_sweep`] with an already expanded code.
pub fn run_sweep_on(code: &ExpandedCode, cfg: &SweepConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let ens = code.ensemble();
    let label = cfg.label.clone().unwrap_or_else(|| ens.label().to_string());
    let (n, k_true) = (code.n(), code.k());
    let mut rows = Vec::new();
    for spec in cfg.channels()? {
        let singleton = singleton_bound(n as u64, k_true as u64, spec.eps())?;
        for dec in &cfg.decoders {
            let start = Instant::now();
            let t = run_point(code, &spec, dec, cfg)?;
            let tf = t.trials as f64;
            let ser = t.symbols as f64 / (tf * n as f64);
            let var = (t.sq / tf - ser * ser).max(0.0);
            let ser_ci95 = if t.trials > 1 { Z95 * (var / (tf - 1.0)).sqrt() } else { 1.0 };
            let cer = t.errors as f64 / tf;
            let (lo, hi) = wilson(t.errors, t.trials);
            let (name, w, delta, carry, w_ratio) = match *dec {
                DecoderSpec::Bp => ("bp", None, None, None, None),
                DecoderSpec::Wd { w, delta, carry } => {
                    let (ratio, _) = latency_model(w, ens.ms(), ens.l())?;
                    ("wd", Some(w), Some(delta), Some(carry), Some(ratio))
                }
            };
            rows.push(ResultRow {
                label: label.clone(),
                m: code.m(),
                seed: cfg.seed,
                channel: spec.name().into(),
                eps: spec.eps(),
                burst: spec.burst(),
                decoder: name.into(),
                w,
                delta,
                carry,
                n,
                k_true,
                design_k: code.design_k(),
                trials: t.trials,
                errors: t.errors,
                symbol_errors: t.symbols,
                ser,
                ser_ci95,
                cer,
                cer_ci95: 0.5 * (hi - lo),
                cer_low: lo,
                cer_high: hi,
                singleton,
                w_ratio,
                wall_s: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str =
    "label,M,seed,channel,eps,burst,decoder,W,delta,carry,trials,errors,SER,CER,CI95,singleton,w_ratio";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV text with [`CSV_HEADER`].
pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let carry = r.carry.map(|c| match c {
            Carry::All => "all",
            Carry::TargetedOnly => "targeted_only",
        });
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{:e},{:e},{:e},{:e},{}",
            r.label,
            r.m,
            r.seed,
            r.channel,
            r.eps,
            opt(r.burst),
            r.decoder,
            opt(r.w),
            opt(r.delta),
            opt(carry),
            r.trials,
            r.errors,
            r.ser,
            r.cer,
            r.cer_ci95,
            r.singleton,
            opt(r.w_ratio),
        )
        .unwrap();
    }
    s
}

/// Consistency checks over a result set; returns one message per violation.
///
/// Checked: `0 <= SER <= CER <= 1`, well-formed intervals, CER not below the
/// Singleton bound beyond its interval, and CER not increasing in `W` beyond
/// interval overlap for otherwise identical window-decoder points.
pub fn check_invariants(rows: &[ResultRow]) -> Vec<String> {
    let mut out = Vec::new();
    for r in rows {
        let id = format!("{} eps={} {} W={}", r.label, r.eps, r.decoder, opt(r.w));
        if !(0.0..=1.0).contains(&r.ser) || !(0.0..=1.0).contains(&r.cer) || r.ser > r.cer + 1e-15 {
            out.push(format!("{id}: SER {} / CER {} out of order", r.ser, r.cer));
        }
        if !(r.cer_low <= r.cer && r.cer <= r.cer_high) {
            out.push(format!(
                "{id}: CER interval [{}, {}] excludes {}",
                r.cer_low, r.cer_high, r.cer
            ));
        }
        if r.cer_high < r.singleton {
            out.push(format!("{id}: CER {} below Singleton bound {}", r.cer, r.singleton));
        }
    }
    for a in rows {
        for b in rows {
            let same = a.label == b.label
                && a.eps == b.eps
                && a.channel == b.channel
                && a.burst == b.burst
                && a.delta == b.delta
                && a.carry == b.carry
                && a.decoder == "wd"
                && b.decoder == "wd";
            if same && a.w < b.w && b.cer_low > a.cer_high {
                out.push(format!(
                    "{} eps={}: CER rises from W={} ({}) to W={} ({})",
                    a.label,
                    a.eps,
                    opt(a.w),
                    a.cer,
                    opt(b.w),
                    b.cer
                ));
            }
        }
    }
    out
}
