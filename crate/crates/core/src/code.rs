//! Circulant expansion of protographs, erasure peeling, sliding-window
//! decoding and maximum resolvable burst length search.

use std::fmt::Write as _;
use std::io;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protograph::Ensemble;

/// When to reject circulant offsets that close length-4 cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GirthFilter {
    /// On for `M >= 8`.
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandOptions {
    pub girth: GirthFilter,
    /// Random offset draws per edge before giving up.
    pub retries: usize,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions { girth: GirthFilter::Auto, retries: 1000 }
    }
}

/// Circulant shifts chosen for one base-matrix entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockShifts {
    pub row: usize,
    pub col: usize,
    pub shifts: Vec<usize>,
}

/// Sparse binary parity-check matrix lifted from a terminated ensemble.
#[derive(Debug)]
pub struct ExpandedCode {
    ens: Ensemble,
    m: usize,
    seed: u64,
    n_rows: usize,
    n: usize,
    row_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    col_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    blocks: Vec<BlockShifts>,
    girth_filtered: bool,
    rank: OnceLock<usize>,
}

/// Block-level edge used by the cycle test.
#[derive(Clone, Copy, PartialEq, Eq)]
struct BlockEdge {
    row: usize,
    col: usize,
    shift: usize,
}

/// Whether adding `e` closes a cycle of length 4 in the lifted graph.
///
/// A closed block path `e1 e2 e3 e4` (alternately sharing a column and a row,
/// consecutive edges distinct) lifts to 4-cycles iff
/// `s1 - s2 + s3 - s4 = 0 mod M`.
fn closes_four_cycle(
    e: BlockEdge,
    by_row: &[Vec<BlockEdge>],
    by_col: &[Vec<BlockEdge>],
    m: usize,
) -> bool {
    let with_e = |list: &[BlockEdge], matches: bool| -> Vec<BlockEdge> {
        let mut v = list.to_vec();
        if matches {
            v.push(e);
        }
        v
    };
    let col_c = with_e(&by_col[e.col], true);
    for &e2 in &col_c {
        if e2 == e {
            continue;
        }
        let row_b = with_e(&by_row[e2.row], e2.row == e.row);
        for &e3 in &row_b {
            if e3 == e2 {
                continue;
            }
            let col_y = with_e(&by_col[e3.col], e3.col == e.col);
            for &e4 in &col_y {
                if e4 == e3 || e4 == e || e4.row != e.row {
                    continue;
                }
                let sum = (e.shift + e3.shift + 2 * m - e2.shift - e4.shift) % m;
                if sum == 0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Lift `ens` by a factor `m`: every base entry `b` becomes the sum of `b`
/// circulant permutation matrices with distinct seeded shifts.
pub fn expand(ens: &Ensemble, m: usize, seed: u64, opts: &ExpandOptions) -> Result<ExpandedCode> {
    if m == 0 {
        return Err(Error::Domain("lifting factor must be at least 1".into()));
    }
    let b = ens.base_matrix();
    if m == 1 && !b.is_binary() {
        return Err(Error::Domain("M = 1 needs a 0/1 base matrix".into()));
    }
    let filter = match opts.girth {
        GirthFilter::Auto => m >= 8,
        GirthFilter::On => true,
        GirthFilter::Off => false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_row: Vec<Vec<BlockEdge>> = vec![Vec::new(); b.rows()];
    let mut by_col: Vec<Vec<BlockEdge>> = vec![Vec::new(); b.cols()];
    let mut blocks = Vec::new();
    for c in 0..b.cols() {
        for r in 0..b.rows() {
            let mult = b.get(r, c);
            if mult == 0 {
                continue;
            }
            if mult as usize > m {
                return Err(Error::Domain(format!(
                    "entry {mult} at ({r}, {c}) exceeds lifting factor {m}"
                )));
            }
            let mut shifts = Vec::with_capacity(mult as usize);
            for _ in 0..mult {
                let mut placed = None;
                for _ in 0..opts.retries.max(1) {
                    let s = if m == 1 { 0 } else { rng.gen_range(0..m) };
                    if shifts.contains(&s) {
                        continue;
                    }
                    let e = BlockEdge { row: r, col: c, shift: s };
                    if filter && closes_four_cycle(e, &by_row, &by_col, m) {
                        continue;
                    }
                    placed = Some(e);
                    break;
                }
                let e = placed.ok_or(Error::GirthExhausted {
                    row: r,
                    col: c,
                    mult,
                    retries: opts.retries,
                })?;
                shifts.push(e.shift);
                by_row[r].push(e);
                by_col[c].push(e);
            }
            blocks.push(BlockShifts { row: r, col: c, shifts });
        }
    }
    let n_rows = b.rows() * m;
    let n = b.cols() * m;
    let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n];
    for blk in &blocks {
        for &s in &blk.shifts {
            for i in 0..m {
                let row = blk.row * m + i;
                let col = blk.col * m + (i + s) % m;
                cols[col].push(row as u32);
            }
        }
    }
    let mut col_ptr = vec![0];
    let mut col_idx = Vec::new();
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n_rows];
    for (c, list) in cols.iter_mut().enumerate() {
        list.sort_unstable();
        for &r in list.iter() {
            rows[r as usize].push(c as u32);
        }
        col_idx.extend_from_slice(list);
        col_ptr.push(col_idx.len());
    }
    let mut row_ptr = vec![0];
    let mut row_idx = Vec::new();
    for list in rows {
        row_idx.extend(list);
        row_ptr.push(row_idx.len());
    }
    Ok(ExpandedCode {
        ens: ens.clone(),
        m,
        seed,
        n_rows,
        n,
        row_ptr,
        row_idx,
        col_ptr,
        col_idx,
        blocks,
        girth_filtered: filter,
        rank: OnceLock::new(),
    })
}

impl ExpandedCode {
    pub fn ensemble(&self) -> &Ensemble {
        &self.ens
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Code length `K' L M`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.row_idx[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    pub fn col(&self, c: usize) -> &[u32] {
        &self.col_idx[self.col_ptr[c]..self.col_ptr[c + 1]]
    }

    pub fn blocks(&self) -> &[BlockShifts] {
        &self.blocks
    }

    pub fn girth_filtered(&self) -> bool {
        self.girth_filtered
    }

    /// Columns per time instant, `K' M`.
    pub fn cols_per_instant(&self) -> usize {
        self.ens.kprime() * self.m
    }

    /// Rows per time instant, `J' M`.
    pub fn rows_per_instant(&self) -> usize {
        self.ens.jprime() * self.m
    }

    /// `n - n_rows`, which may be negative for very short terminations.
    pub fn design_k(&self) -> i64 {
        self.n as i64 - self.n_rows as i64
    }

    /// GF(2) rank of H, computed once.
    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| gf2_rank(self))
    }

    /// `n - rank(H)`.
    pub fn k(&self) -> usize {
        self.n - self.rank()
    }

    /// Sparse coordinate text: header `n_rows n_cols nnz`, then `row col` lines.
    pub fn to_sparse_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.n_rows, self.n, self.nnz()).unwrap();
        for r in 0..self.n_rows {
            for &c in self.row(r) {
                writeln!(s, "{r} {c}").unwrap();
            }
        }
        s
    }

    pub fn write_sparse(&self, mut w: impl io::Write) -> io::Result<()> {
        w.write_all(self.to_sparse_text().as_bytes())
    }
}

/// Banded Gaussian elimination over GF(2) on bit-packed rows.
fn gf2_rank(code: &ExpandedCode) -> usize {
    let words = code.n.div_ceil(64);
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(code.n_rows);
    let mut span: Vec<(usize, usize)> = Vec::with_capacity(code.n_rows);
    for r in 0..code.n_rows {
        let mut bits = vec![0u64; words];
        let (mut lo, mut hi) = (words, 0);
        for &c in code.row(r) {
            let c = c as usize;
            bits[c / 64] ^= 1 << (c % 64);
            lo = lo.min(c / 64);
            hi = hi.max(c / 64 + 1);
        }
        rows.push(bits);
        span.push(if lo < hi { (lo, hi) } else { (0, 0) });
    }
    let mut used = vec![false; code.n_rows];
    let mut rank = 0;
    for c in 0..code.n {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let has = |r: usize, rows: &[Vec<u64>], span: &[(usize, usize)]| {
            span[r].0 <= w && w < span[r].1 && rows[r][w] & bit != 0
        };
        let Some(p) = (0..code.n_rows).find(|&r| !used[r] && has(r, &rows, &span)) else {
            continue;
        };
        used[p] = true;
        rank += 1;
        let pivot = std::mem::take(&mut rows[p]);
        let (plo, phi) = span[p];
        for r in 0..code.n_rows {
            if !used[r] && has(r, &rows, &span) {
                for k in plo..phi {
                    rows[r][k] ^= pivot[k];
                }
                span[r] = (span[r].0.min(plo), span[r].1.max(phi));
            }
        }
        rows[p] = pivot;
    }
    rank
}

/// Per-symbol erasure mask (`true` = erased).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasurePattern {
    erased: Vec<bool>,
}

impl ErasurePattern {
    pub fn new(erased: Vec<bool>) -> Self {
        ErasurePattern { erased }
    }

    pub fn none(n: usize) -> Self {
        ErasurePattern { erased: vec![false; n] }
    }

    /// A single solid burst `[start, start + len)`, clipped at `n`.
    pub fn burst(n: usize, start: usize, len: usize) -> Self {
        let mut erased = vec![false; n];
        for e in erased.iter_mut().skip(start).take(len) {
            *e = true;
        }
        ErasurePattern { erased }
    }

    pub fn from_positions(n: usize, positions: &[usize]) -> Result<Self> {
        let mut erased = vec![false; n];
        for &p in positions {
            *erased.get_mut(p).ok_or_else(|| {
                Error::Domain(format!("erasure position {p} out of range for length {n}"))
            })? = true;
        }
        Ok(ErasurePattern { erased })
    }

    /// Parse `0`/`1` characters, ignoring whitespace.
    pub fn parse(text: &str) -> Result<Self> {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Domain(format!("unexpected pattern character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(ErasurePattern::new)
    }

    pub fn to_text(&self) -> String {
        self.erased.iter().map(|&e| if e { '1' } else { '0' }).collect()
    }

    pub fn len(&self) -> usize {
        self.erased.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.erased[i]
    }

    pub fn count(&self) -> usize {
        self.erased.iter().filter(|&&e| e).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.erased
    }

    /// Erased positions of `self` are a subset of those of `other`.
    pub fn is_subset_of(&self, other: &ErasurePattern) -> bool {
        self.erased.iter().zip(&other.erased).all(|(&a, &b)| !a || b)
    }
}

/// What the window decoder keeps after each window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carry {
    /// Keep every recovered symbol.
    All,
    /// Keep only the targeted symbols; later symbols recovered inside the
    /// window are erased again before the window slides.
    TargetedOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowStats {
    pub config: usize,
    pub rounds: usize,
    /// Erased fraction of the targeted symbols when the window stopped.
    pub targeted_erased: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeOutcome {
    /// Final erasure mask.
    pub residual: ErasurePattern,
    pub residual_count: usize,
    /// Peeling rounds (summed over windows for the window decoder).
    pub rounds: usize,
    pub windows: Vec<WindowStats>,
    pub success: bool,
    /// `(W + m_s) / L` for the window decoder.
    pub latency_ratio: Option<f64>,
}

/// Mutable peeling state: erasures and erased-neighbor counts per check.
struct Peeler<'a> {
    code: &'a ExpandedCode,
    erased: Vec<bool>,
    count: Vec<u32>,
}

impl<'a> Peeler<'a> {
    fn new(code: &'a ExpandedCode, pattern: &ErasurePattern) -> Result<Self> {
        if pattern.len() != code.n() {
            return Err(Error::Domain(format!(
                "pattern length {} does not match code length {}",
                pattern.len(),
                code.n()
            )));
        }
        let erased = pattern.as_slice().to_vec();
        let count = (0..code.n_rows())
            .map(|r| code.row(r).iter().filter(|&&c| erased[c as usize]).count() as u32)
            .collect();
        Ok(Peeler { code, erased, count })
    }

    fn set_known(&mut self, c: usize) {
        self.erased[c] = false;
        for &r in self.code.col(c) {
            self.count[r as usize] -= 1;
        }
    }

    fn set_erased(&mut self, c: usize) {
        self.erased[c] = true;
        for &r in self.code.col(c) {
            self.count[r as usize] += 1;
        }
    }

    /// Layered peeling over checks `rows`, resolving only columns at or after
    /// `free_from`. Runs until `done` holds, no check can resolve anything, or
    /// `max_rounds` rounds elapse. Returns rounds used and resolved columns.
    fn run(
        &mut self,
        rows: std::ops::Range<usize>,
        free_from: usize,
        max_rounds: usize,
        mut done: impl FnMut(&Self) -> bool,
    ) -> (usize, Vec<usize>) {
        let mut resolved = Vec::new();
        let mut frontier: Vec<usize> = rows.clone().filter(|&r| self.count[r] == 1).collect();
        let mut rounds = 0;
        while !frontier.is_empty() && rounds < max_rounds && !done(self) {
            rounds += 1;
            let mut next = Vec::new();
            for r in frontier {
                if self.count[r] != 1 {
                    continue;
                }
                let c = self.code.row(r).iter().map(|&c| c as usize).find(|&c| self.erased[c]);
                let Some(c) = c else { continue };
                if c < free_from {
                    continue;
                }
                self.set_known(c);
                resolved.push(c);
                for &r2 in self.code.col(c) {
                    let r2 = r2 as usize;
                    if rows.contains(&r2) && self.count[r2] == 1 {
                        next.push(r2);
                    }
                }
            }
            frontier = next;
        }
        (rounds, resolved)
    }

    fn outcome(
        self,
        rounds: usize,
        windows: Vec<WindowStats>,
        latency: Option<f64>,
    ) -> DecodeOutcome {
        let residual = ErasurePattern::new(self.erased);
        let residual_count = residual.count();
        DecodeOutcome {
            residual,
            residual_count,
            rounds,
            windows,
            success: residual_count == 0,
            latency_ratio: latency,
        }
    }
}

/// Peeling (belief-propagation) erasure decoding on the whole code.
pub fn peel_decode(
    code: &ExpandedCode,
    pattern: &ErasurePattern,
    max_rounds: usize,
) -> Result<DecodeOutcome> {
    let mut p = Peeler::new(code, pattern)?;
    let (rounds, _) = p.run(0..code.n_rows(), 0, max_rounds, |_| false);
    Ok(p.outcome(rounds, Vec::new(), None))
}

/// Sliding-window decoding. Window `t` covers check rows of instants
/// `t..t+W` (clipped at the termination) and targets the symbols of instant
/// `t`. Symbols of instants before `t` are final and are not resolved again.
pub fn window_decode(
    code: &ExpandedCode,
    pattern: &ErasurePattern,
    w: usize,
    delta: f64,
    max_rounds: usize,
    carry: Carry,
) -> Result<DecodeOutcome> {
    let ens = code.ensemble();
    ens.check_window(w)?;
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("target erasure fraction {delta} outside [0, 1)")));
    }
    let mut p = Peeler::new(code, pattern)?;
    let (rpi, cpi) = (code.rows_per_instant(), code.cols_per_instant());
    let mut windows = Vec::with_capacity(ens.l());
    let mut total_rounds = 0;
    for t in 0..ens.l() {
        let rows = rpi * t..(rpi * (t + w)).min(code.n_rows());
        let targeted = cpi * t..cpi * (t + 1);
        let frac = |p: &Peeler| {
            p.erased[targeted.clone()].iter().filter(|&&e| e).count() as f64 / cpi as f64
        };
        let (rounds, resolved) = p.run(rows, targeted.start, max_rounds, |p| frac(p) <= delta);
        total_rounds += rounds;
        windows.push(WindowStats { config: t, rounds, targeted_erased: frac(&p) });
        if carry == Carry::TargetedOnly {
            for c in resolved.into_iter().filter(|&c| c >= targeted.end) {
                p.set_erased(c);
            }
        }
    }
    let latency = (w + ens.ms()) as f64 / ens.l() as f64;
    Ok(p.outcome(total_rounds, windows, Some(latency)))
}

/// Decoder used by burst searches and simulations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecoderSpec {
    Bp,
    Wd {
        #[serde(rename = "W")]
        w: usize,
        delta: f64,
        carry: Carry,
    },
}

impl DecoderSpec {
    pub fn decode(&self, code: &ExpandedCode, pattern: &ErasurePattern) -> Result<DecodeOutcome> {
        match *self {
            DecoderSpec::Bp => peel_decode(code, pattern, usize::MAX),
            DecoderSpec::Wd { w, delta, carry } => {
                window_decode(code, pattern, w, delta, usize::MAX, carry)
            }
        }
    }
}

/// Largest `l` such that every solid burst of length `l` is fully decoded.
pub fn mbl_search(code: &ExpandedCode, decoder: &DecoderSpec) -> Result<usize> {
    let n = code.n();
    let ok = |s: usize, l: usize| -> Result<bool> {
        Ok(decoder.decode(code, &ErasurePattern::burst(n, s, l))?.success)
    };
    // longest decodable burst per start; supersets of failures fail
    let longest = (0..n)
        .into_par_iter()
        .map(|s| {
            let (mut lo, mut hi) = (0, n - s);
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                if ok(s, mid)? {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            Ok(lo)
        })
        .collect::<Result<Vec<usize>>>()?;
    let mut prefix_min = Vec::with_capacity(n);
    let mut m = usize::MAX;
    for &v in &longest {
        m = m.min(v);
        prefix_min.push(m);
    }
    Ok((1..=n).filter(|&l| prefix_min[n - l] >= l).max().unwrap_or(0))
}

/// Bounds `(M(s - 2) + 1, M s - 1)` on the maximum resolvable burst length of
/// a code lifted by `M` from a protograph of minimal stopping-set span `s`.
pub fn mbl_bounds(min_span: usize, m: usize) -> Result<(usize, usize)> {
    if min_span < 2 {
        return Err(Error::Domain(format!("minimal span {min_span} < 2")));
    }
    if m == 0 {
        return Err(Error::Domain("lifting factor must be at least 1".into()));
    }
    Ok((m * (min_span - 2) + 1, m * min_span - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;
    use crate::protograph::classical_ensemble;

    fn c2(l: usize) -> Ensemble {
        preset("C2", l).unwrap()
    }

    #[test]
    fn expansion_shapes() {
        let e = classical_ensemble(3, 2, 20).unwrap();
        let code = expand(&e, 512, 1, &ExpandOptions::default()).unwrap();
        assert_eq!(code.n(), 20480);
        assert_eq!(code.n_rows(), 22 * 512);
        assert!(code.girth_filtered());
        for c in (0..code.n()).step_by(97) {
            assert_eq!(code.col(c).len(), 3);
        }
    }

    #[test]
    fn multi_edge_block() {
        let e = preset("C3", 3).unwrap();
        let code = expand(&e, 4, 0, &ExpandOptions::default()).unwrap();
        for blk in code.blocks() {
            let mut s = blk.shifts.clone();
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), blk.shifts.len());
        }
        // entry 2 lifts to weight-2 rows inside the block
        let blk = code.blocks().iter().find(|b| b.shifts.len() == 2).unwrap();
        for i in 0..4 {
            let r = blk.row * 4 + i;
            let inside = code.row(r).iter().filter(|&&c| (c as usize) / 4 == blk.col).count();
            assert_eq!(inside, 2);
        }
    }

    #[test]
    fn unit_lifting() {
        let e = classical_ensemble(3, 2, 5).unwrap();
        let code = expand(&e, 1, 0, &ExpandOptions::default()).unwrap();
        let b = e.base_matrix();
        for c in 0..b.cols() {
            let rows: Vec<u32> =
                (0..b.rows()).filter(|&r| b.get(r, c) == 1).map(|r| r as u32).collect();
            assert_eq!(code.col(c), rows.as_slice());
        }
        assert!(expand(&c2(5), 1, 0, &ExpandOptions::default()).is_err());
        assert!(expand(&c2(5), 0, 0, &ExpandOptions::default()).is_err());
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let o = ExpandOptions::default();
        let a = expand(&c2(10), 16, 7, &o).unwrap();
        let b = expand(&c2(10), 16, 7, &o).unwrap();
        let c = expand(&c2(10), 16, 8, &o).unwrap();
        assert_eq!(a.to_sparse_text(), b.to_sparse_text());
        assert_ne!(a.to_sparse_text(), c.to_sparse_text());
    }

    #[test]
    fn girth_filter_removes_four_cycles() {
        let code = expand(&preset("C1", 8).unwrap(), 16, 3, &ExpandOptions::default()).unwrap();
        let shared =
            |r: usize, r2: usize| code.row(r).iter().filter(|c| code.row(r2).contains(c)).count();
        for r in 0..code.n_rows() {
            for r2 in r + 1..code.n_rows() {
                assert!(shared(r, r2) <= 1);
            }
        }
    }

    #[test]
    fn girth_exhaustion_is_reported() {
        let o = ExpandOptions { girth: GirthFilter::On, retries: 3 };
        let r = expand(&preset("C4", 6).unwrap(), 3, 0, &o);
        assert!(matches!(r, Err(Error::GirthExhausted { .. })));
    }

    #[test]
    fn sparse_export_format() {
        let code = expand(&preset("C1", 3).unwrap(), 2, 0, &ExpandOptions::default()).unwrap();
        let text = code.to_sparse_text();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("{} {} {}", code.n_rows(), code.n(), code.nnz()));
        assert_eq!(lines.count(), code.nnz());
    }

    #[test]
    fn rank_of_small_codes() {
        let code =
            expand(&classical_ensemble(3, 2, 4).unwrap(), 1, 0, &ExpandOptions::default()).unwrap();
        // columns of x^i (1+x+x^2) for two identical polynomials: rank = L
        assert_eq!(code.rank(), 4);
        assert_eq!(code.k(), 4);
        let code = expand(&c2(10), 16, 1, &ExpandOptions::default()).unwrap();
        assert!(code.rank() <= code.n_rows());
        assert!(code.k() as i64 >= code.design_k());
    }

    #[test]
    fn peeling_basics() {
        let code = expand(&c2(10), 16, 1, &ExpandOptions::default()).unwrap();
        let out = peel_decode(&code, &ErasurePattern::none(code.n()), usize::MAX).unwrap();
        assert!(out.success);
        assert_eq!(out.rounds, 0);
        let out = peel_decode(&code, &ErasurePattern::from_positions(code.n(), &[37]).unwrap(), 10)
            .unwrap();
        assert!(out.success);
        assert_eq!(out.rounds, 1);
        assert!(peel_decode(&code, &ErasurePattern::none(3), 10).is_err());
    }

    #[test]
    fn lifted_stopping_set_is_residual() {
        let m = 16;
        let code = expand(&c2(10), m, 2, &ExpandOptions::default()).unwrap();
        // protograph stopping set {V1, V4}, shifted by two instants
        let base_cols = [4usize, 7];
        let positions: Vec<usize> = base_cols.iter().flat_map(|&c| c * m..(c + 1) * m).collect();
        let pat = ErasurePattern::from_positions(code.n(), &positions).unwrap();
        let out = peel_decode(&code, &pat, usize::MAX).unwrap();
        assert!(!out.success);
        assert_eq!(out.residual, pat);
    }

    #[test]
    fn window_decoder_basics() {
        let e = c2(20);
        let code = expand(&e, 16, 4, &ExpandOptions::default()).unwrap();
        let out =
            window_decode(&code, &ErasurePattern::none(code.n()), 3, 0.0, usize::MAX, Carry::All)
                .unwrap();
        assert!(out.success);
        assert!(out.windows.iter().all(|w| w.rounds == 0));
        assert_eq!(out.windows.len(), 20);
        assert!((out.latency_ratio.unwrap() - 0.25).abs() < 1e-12);
        assert!(
            window_decode(&code, &ErasurePattern::none(code.n()), 2, 0.0, 9, Carry::All).is_err()
        );
        assert!(
            window_decode(&code, &ErasurePattern::none(code.n()), 23, 0.0, 9, Carry::All).is_err()
        );
    }

    #[test]
    fn mbl_bound_arithmetic() {
        assert_eq!(mbl_bounds(2, 512).unwrap(), (1, 1023));
        assert_eq!(mbl_bounds(4, 512).unwrap(), (1025, 2047));
        assert_eq!(mbl_bounds(4, 16).unwrap(), (33, 63));
        assert!(mbl_bounds(1, 16).is_err());
    }

    #[test]
    fn mbl_in_band_small() {
        let m = 8;
        let code = expand(&c2(10), m, 5, &ExpandOptions::default()).unwrap();
        let d = mbl_search(&code, &DecoderSpec::Bp).unwrap();
        let (lo, hi) = mbl_bounds(4, m).unwrap();
        assert!(lo <= d && d <= hi, "{d} not in [{lo}, {hi}]");
    }
}
