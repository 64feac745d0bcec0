//! Protograph stopping sets and their spans.
//!
//! A column set is a stopping set when every row touching it does so with
//! total edge multiplicity at least 2. Its span is the number of consecutive
//! columns from its first to its last member.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::protograph::{BaseMatrix, Ensemble};

/// Columns of a base matrix forming a stopping set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StoppingSet {
    pub columns: Vec<usize>,
    pub size: usize,
    pub span: usize,
}

impl StoppingSet {
    fn from_sorted(columns: Vec<usize>) -> Self {
        let span = columns.last().unwrap() - columns[0] + 1;
        StoppingSet { size: columns.len(), span, columns }
    }
}

/// Limits for exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpanSearch {
    /// Largest candidate span; `None` picks a default from the matrix or ensemble.
    pub width_cap: Option<usize>,
    /// Largest number of subsets enumerated per candidate window.
    pub subset_cap: u64,
}

impl Default for SpanSearch {
    fn default() -> Self {
        SpanSearch { width_cap: None, subset_cap: 1 << 24 }
    }
}

/// Which analytic bound limits the minimal span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundSource {
    /// Two-column construction on polynomials `l1 < l2` (0-based).
    Pair { l1: usize, l2: usize },
    /// `K' L` for a terminated ensemble.
    Termination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpanBound {
    pub value: usize,
    pub source: BoundSource,
}

/// Result of an exact search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanReport {
    pub min_span: usize,
    pub span_witness: StoppingSet,
    pub min_size: usize,
    pub size_witness: StoppingSet,
    pub bound: Option<SpanBound>,
}

pub fn is_stopping_set(b: &BaseMatrix, cols: &[usize]) -> Result<bool> {
    if cols.is_empty() {
        return Err(Error::Domain("empty column set".into()));
    }
    if let Some(&c) = cols.iter().find(|&&c| c >= b.cols()) {
        return Err(Error::Domain(format!("column {c} out of range for {} columns", b.cols())));
    }
    Ok((0..b.rows()).all(|r| {
        let t: u64 = cols.iter().map(|&c| u64::from(b.get(r, c))).sum();
        t == 0 || t >= 2
    }))
}

/// Column supports with row indices, for repeated stopping-set tests.
struct Supports {
    cols: Vec<Vec<(usize, u32)>>,
    rows: usize,
}

impl Supports {
    fn new(b: &BaseMatrix) -> Self {
        Supports { cols: (0..b.cols()).map(|c| b.column_support(c)).collect(), rows: b.rows() }
    }

    fn is_stopping(&self, cols: &[usize], counts: &mut Vec<u32>) -> bool {
        counts.clear();
        counts.resize(self.rows, 0);
        for &c in cols {
            for &(r, m) in &self.cols[c] {
                counts[r] += m;
            }
        }
        counts.iter().all(|&t| t != 1)
    }

    /// Largest column distance between two columns sharing a row.
    fn reach(&self) -> usize {
        let mut lo = vec![usize::MAX; self.rows];
        let mut hi = vec![0; self.rows];
        for (c, sup) in self.cols.iter().enumerate() {
            for &(r, _) in sup {
                lo[r] = lo[r].min(c);
                hi[r] = hi[r].max(c);
            }
        }
        (0..self.rows).filter(|&r| lo[r] != usize::MAX).map(|r| hi[r] - lo[r]).max().unwrap_or(0)
    }
}

/// Smallest span over stopping sets whose first column lies in `starts`.
fn search_span(
    sup: &Supports,
    starts: Range<usize>,
    cap: usize,
    subset_cap: u64,
) -> Result<StoppingSet> {
    let n = sup.cols.len();
    let mut counts = Vec::new();
    let mut set = Vec::new();
    for w in 1..=cap.min(n) {
        let interior = w.saturating_sub(2);
        if interior >= 64 || (1u64 << interior) > subset_cap {
            return Err(Error::SearchCap(format!(
                "span {w} needs 2^{interior} subsets per window, cap is {subset_cap}"
            )));
        }
        for s in starts.clone() {
            let e = s + w - 1;
            if e >= n {
                break;
            }
            for mask in 0..(1u64 << interior) {
                set.clear();
                set.push(s);
                set.extend((0..interior).filter(|k| mask >> k & 1 == 1).map(|k| s + 1 + k));
                if w > 1 {
                    set.push(e);
                }
                if sup.is_stopping(&set, &mut counts) {
                    return Ok(StoppingSet::from_sorted(set.clone()));
                }
            }
        }
    }
    Err(Error::SearchCap(format!("no stopping set of span at most {}", cap.min(n))))
}

/// Smallest stopping set with first column in `starts`, of size below `limit`.
/// A minimum-size stopping set is connected, so consecutive members lie
/// within `reach` columns of each other.
fn search_size(
    sup: &Supports,
    starts: Range<usize>,
    limit: usize,
    subset_cap: u64,
) -> Result<Option<StoppingSet>> {
    let n = sup.cols.len();
    let reach = sup.reach().max(1);
    let mut counts = Vec::new();
    let mut visited = 0u64;
    for k in 1..limit {
        for s in starts.clone() {
            let mut set = vec![s];
            if let Some(found) =
                extend(sup, &mut set, k, n, reach, &mut counts, &mut visited, subset_cap)?
            {
                return Ok(Some(found));
            }
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    sup: &Supports,
    set: &mut Vec<usize>,
    k: usize,
    n: usize,
    reach: usize,
    counts: &mut Vec<u32>,
    visited: &mut u64,
    cap: u64,
) -> Result<Option<StoppingSet>> {
    if set.len() == k {
        *visited += 1;
        if *visited > cap {
            return Err(Error::SearchCap(format!("size search exceeded {cap} candidate sets")));
        }
        return Ok(sup.is_stopping(set, counts).then(|| StoppingSet::from_sorted(set.clone())));
    }
    let last = *set.last().unwrap();
    for c in last + 1..=(last + reach).min(n - 1) {
        set.push(c);
        let r = extend(sup, set, k, n, reach, counts, visited, cap)?;
        set.pop();
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

fn search_both(
    b: &BaseMatrix,
    starts: Range<usize>,
    cap: usize,
    opts: &SpanSearch,
) -> Result<(StoppingSet, StoppingSet)> {
    let sup = Supports::new(b);
    let span = search_span(&sup, starts.clone(), cap, opts.subset_cap)?;
    let size =
        search_size(&sup, starts, span.size, opts.subset_cap)?.unwrap_or_else(|| span.clone());
    Ok((span, size))
}

/// Exact minimal span and minimal size of stopping sets of an arbitrary base
/// matrix. The default width cap is the number of columns.
pub fn min_span(b: &BaseMatrix, opts: &SpanSearch) -> Result<SpanReport> {
    if b.cols() == 0 || b.rows() == 0 {
        return Err(Error::Domain("empty base matrix".into()));
    }
    let cap = opts.width_cap.unwrap_or(b.cols());
    let (span, size) = search_both(b, 0..b.cols(), cap, opts)?;
    Ok(SpanReport {
        min_span: span.span,
        min_size: size.size,
        span_witness: span,
        size_witness: size,
        bound: None,
    })
}

/// Exact search on the terminated base matrix of an ensemble.
///
/// Every column of `B_[L]` keeps its full support, so stopping sets are
/// invariant under shifts by one time instant and only starts in the first
/// instant need to be tried. The default cap is `max(2 m_s + 4, bound)`.
pub fn ensemble_min_span(ens: &Ensemble, opts: &SpanSearch) -> Result<SpanReport> {
    let bound = span_bound(ens)?;
    let cap = opts.width_cap.unwrap_or((2 * ens.ms() + 4).max(bound.value));
    let b = ens.base_matrix();
    let (span, size) = search_both(&b, 0..ens.kprime(), cap, opts)?;
    Ok(SpanReport {
        min_span: span.span,
        min_size: size.size,
        span_witness: span,
        size_witness: size,
        bound: Some(bound),
    })
}

/// Minimal span of stopping sets in the generic window of `w` row groups that
/// contain at least one of the first `groups` targeted instants. Previously
/// decoded columns are excluded.
pub fn windowed_min_span(
    ens: &Ensemble,
    w: usize,
    groups: usize,
    opts: &SpanSearch,
) -> Result<usize> {
    let long = ens.with_length(w + 2 * ens.ms() + 1)?;
    let win = long.window(w, ens.ms(), groups)?;
    let cols = win.undecided();
    let b = win.matrix.submatrix(0..win.matrix.rows(), cols.clone());
    let cap = opts.width_cap.unwrap_or(cols.len());
    let sup = Supports::new(&b);
    search_span(&sup, 0..groups * ens.kprime(), cap, opts.subset_cap).map(|s| s.span)
}

fn degree_pair(p: &Polynomial) -> Result<(usize, usize)> {
    let (i, j) = p.degree_bounds()?;
    if i == j {
        return Err(Error::Domain(format!("{p} has a single term")));
    }
    Ok((i, j))
}

/// Upper bound on the span of stopping sets confined to two polynomial
/// columns `l1 < l2 = l1 + gap` of an ensemble with `K'` columns per instant.
pub fn span_bound_pair(
    pa: &Polynomial,
    pb: &Polynomial,
    kprime: usize,
    gap: usize,
) -> Result<usize> {
    if gap == 0 || gap >= kprime {
        return Err(Error::Domain(format!("column gap {gap} outside [1, {})", kprime)));
    }
    let (i1, j1) = degree_pair(pa)?;
    let (i2, j2) = degree_pair(pb)?;
    let ms = j1.max(j2) - i1.min(i2);
    let base = kprime * (ms - 1);
    Ok(match (i2 <= i1, j2 <= j1) {
        (true, true) => base + gap + 1,
        (true, false) | (false, true) => base + 1,
        (false, false) => base - (gap - 1),
    })
}

/// Two-column bound minimized over all column pairs, capped by `K' L`.
/// Pair bounds are only available for `J' = 1`.
pub fn span_bound(ens: &Ensemble) -> Result<SpanBound> {
    let mut best = SpanBound { value: ens.kprime() * ens.l(), source: BoundSource::Termination };
    if ens.jprime() != 1 {
        return Ok(best);
    }
    let polys = ens.polys();
    for l1 in 0..polys.len() {
        for l2 in l1 + 1..polys.len() {
            if let Ok(v) = span_bound_pair(&polys[l1], &polys[l2], ens.kprime(), l2 - l1) {
                if v < best.value {
                    best = SpanBound { value: v, source: BoundSource::Pair { l1, l2 } };
                }
            }
        }
    }
    Ok(best)
}

/// Constructive stopping set for two polynomial columns `l1 < l2 = l1 + gap`.
///
/// `p_a` is multiplied by `x^(i_b) + ... + x^(j_b - 1)` and `p_b` by
/// `x^(i_a) + ... + x^(j_a - 1)`; the selected columns are then verified on a
/// base matrix holding only those two polynomial columns.
pub fn witness_pair(
    pa: &Polynomial,
    pb: &Polynomial,
    kprime: usize,
    gap: usize,
) -> Result<StoppingSet> {
    let bound = span_bound_pair(pa, pb, kprime, gap)?;
    let (i1, j1) = degree_pair(pa)?;
    let (i2, j2) = degree_pair(pb)?;
    let mut polys = vec![Polynomial::zero(); kprime];
    polys[0] = pa.clone();
    polys[gap] = pb.clone();
    let ms = j1.max(j2);
    let l = ms + 1;
    let b = BaseMatrix::from_polys(&polys, 1, ms, l);
    let mut columns: Vec<usize> =
        (i2..j2).map(|k| k * kprime).chain((i1..j1).map(|k| k * kprime + gap)).collect();
    columns.sort_unstable();
    let set = StoppingSet::from_sorted(columns);
    if !is_stopping_set(&b, &set.columns)? {
        return Err(Error::Internal(format!("witness {:?} is not a stopping set", set.columns)));
    }
    if set.span != bound {
        return Err(Error::Internal(format!(
            "witness span {} differs from bound {bound}",
            set.span
        )));
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GcdCheck {
    NotApplicable(String),
    Checked {
        /// Minimal span of the full ensemble.
        full: usize,
        /// Minimal span of each modulo-polynomial ensemble.
        components: Vec<usize>,
        /// `full >= max(components)`.
        holds: bool,
    },
}

/// Compare the minimal span of a `J' > 1` ensemble with those of its modulo
/// polynomial sets taken as `J' = 1` ensembles.
pub fn check_gcd_monotonicity(ens: &Ensemble, opts: &SpanSearch) -> Result<GcdCheck> {
    if ens.jprime() == 1 {
        return Ok(GcdCheck::NotApplicable("J' = 1".into()));
    }
    let mut components = Vec::new();
    for (m, set) in ens.modulo_sets().into_iter().enumerate() {
        match Ensemble::new(set, 1, ens.kprime(), ens.ms(), ens.l()) {
            Ok(e) => components.push(ensemble_min_span(&e, opts)?.min_span),
            Err(err) => {
                return Ok(GcdCheck::NotApplicable(format!(
                    "modulo set {m} is not an ensemble: {err}"
                )))
            }
        }
    }
    let full = ensemble_min_span(ens, opts)?.min_span;
    let holds = components.iter().all(|&c| full >= c);
    Ok(GcdCheck::Checked { full, components, holds })
}
