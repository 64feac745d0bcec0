//! Memoryless and Gilbert-Elliott erasure channels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::ErasurePattern;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelSpec {
    /// Independent erasures with probability `eps`.
    Bec { eps: f64 },
    /// Two-state Markov channel with stationary erasure rate `eps` and mean
    /// burst length `burst`. The erasure state erases every symbol and the
    /// good state none.
    Gec { eps: f64, burst: f64 },
}

impl ChannelSpec {
    pub fn bec(eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::Domain(format!("erasure rate {eps} outside [0, 1)")));
        }
        Ok(ChannelSpec::Bec { eps })
    }

    pub fn gec(eps: f64, burst: f64) -> Result<Self> {
        gec_params(eps, burst)?;
        Ok(ChannelSpec::Gec { eps, burst })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelSpec::Bec { eps } => Self::bec(eps).map(drop),
            ChannelSpec::Gec { eps, burst } => gec_params(eps, burst).map(drop),
        }
    }

    pub fn eps(&self) -> f64 {
        match *self {
            ChannelSpec::Bec { eps } | ChannelSpec::Gec { eps, .. } => eps,
        }
    }

    pub fn burst(&self) -> Option<f64> {
        match *self {
            ChannelSpec::Bec { .. } => None,
            ChannelSpec::Gec { burst, .. } => Some(burst),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChannelSpec::Bec { .. } => "bec",
            ChannelSpec::Gec { .. } => "gec",
        }
    }
}

/// Transition probabilities `(b, g)`: `b` from good to erasure state, `g`
/// back. `g = 1/burst`, `b = eps g / (1 - eps)`.
pub fn gec_params(eps: f64, burst: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("erasure rate {eps} outside (0, 1)")));
    }
    if burst.is_nan() || burst < 1.0 {
        return Err(Error::Domain(format!("mean burst length {burst} < 1")));
    }
    let g = 1.0 / burst;
    let b = eps * g / (1.0 - eps);
    if b > 1.0 {
        return Err(Error::Domain(format!(
            "erasure rate {eps} with mean burst {burst} needs b = {b} > 1"
        )));
    }
    Ok((b, g))
}

/// Inverse of [`gec_params`]: `(eps, burst)` from `(b, g)`.
pub fn gec_rates(b: f64, g: f64) -> (f64, f64) {
    (b / (b + g), 1.0 / g)
}

/// Draw an erasure pattern of length `n`. The Gilbert-Elliott chain starts
/// in its stationary distribution.
pub fn sample_pattern(spec: &ChannelSpec, n: usize, rng: &mut impl Rng) -> Result<ErasurePattern> {
    spec.validate()?;
    let erased = match *spec {
        ChannelSpec::Bec { eps } => (0..n).map(|_| rng.gen::<f64>() < eps).collect(),
        ChannelSpec::Gec { eps, burst } => {
            let (b, g) = gec_params(eps, burst)?;
            let mut bad = rng.gen::<f64>() < eps;
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                out.push(bad);
                let u = rng.gen::<f64>();
                bad = if bad { u >= g } else { u < b };
            }
            out
        }
    };
    Ok(ErasurePattern::new(erased))
}

/// Lengths of maximal runs of erasures.
pub fn burst_lengths(p: &ErasurePattern) -> Vec<usize> {
    let mut out = Vec::new();
    let mut run = 0;
    for &e in p.as_slice() {
        if e {
            run += 1;
        } else if run > 0 {
            out.push(run);
            run = 0;
        }
    }
    if run > 0 {
        out.push(run);
    }
    out
}
