//! Protograph density evolution on the binary erasure channel.
//!
//! Messages are erasure probabilities per edge class. A class of multiplicity
//! `b` stands for `b` parallel edges carrying identical messages, so its own
//! contribution to an extrinsic product has exponent `b - 1`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protograph::{BaseMatrix, Ensemble, WindowProtograph};

/// Numerical parameters for fixed-point iteration and bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeParams {
    pub max_iter: usize,
    /// Stop when the largest message change falls below this.
    pub tol: f64,
    /// Bisection bracket width.
    pub tol_eps: f64,
    /// Erasure level treated as zero.
    pub success_tol: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams { max_iter: 5000, tol: 1e-14, tol_eps: 1e-5, success_tol: 1e-12 }
    }
}

/// Edge-class graph derived from a base matrix.
#[derive(Debug, Clone)]
pub struct DeGraph {
    n_rows: usize,
    n_cols: usize,
    mult: Vec<i32>,
    // edge indices grouped by row, then by column
    row_ptr: Vec<usize>,
    row_edges: Vec<usize>,
    col_ptr: Vec<usize>,
    col_edges: Vec<usize>,
    channel: Vec<f64>,
}

impl DeGraph {
    /// Graph with a uniform channel erasure probability.
    pub fn new(b: &BaseMatrix, eps: f64) -> Result<Self> {
        Self::with_channel(b, vec![eps; b.cols()])
    }

    pub fn with_channel(b: &BaseMatrix, channel: Vec<f64>) -> Result<Self> {
        if channel.len() != b.cols() {
            return Err(Error::Domain(format!(
                "channel vector has {} entries for {} columns",
                channel.len(),
                b.cols()
            )));
        }
        check_probs(&channel)?;
        let mut mult = Vec::new();
        let mut row_ptr = vec![0];
        let mut row_edges = Vec::new();
        let mut by_col: Vec<Vec<usize>> = vec![Vec::new(); b.cols()];
        for r in 0..b.rows() {
            for (c, &v) in b.row(r).iter().enumerate() {
                if v > 0 {
                    let e = mult.len();
                    let m = i32::try_from(v).map_err(|_| Error::Overflow)?;
                    mult.push(m);
                    row_edges.push(e);
                    by_col[c].push(e);
                }
            }
            row_ptr.push(row_edges.len());
        }
        let mut col_ptr = vec![0];
        let mut col_edges = Vec::with_capacity(mult.len());
        for list in by_col {
            col_edges.extend(list);
            col_ptr.push(col_edges.len());
        }
        Ok(DeGraph {
            n_rows: b.rows(),
            n_cols: b.cols(),
            mult,
            row_ptr,
            row_edges,
            col_ptr,
            col_edges,
            channel,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_edge_classes(&self) -> usize {
        self.mult.len()
    }

    pub fn channel(&self) -> &[f64] {
        &self.channel
    }

    pub fn set_channel(&mut self, channel: &[f64]) -> Result<()> {
        if channel.len() != self.n_cols {
            return Err(Error::Domain("channel vector length mismatch".into()));
        }
        check_probs(channel)?;
        self.channel.copy_from_slice(channel);
        Ok(())
    }

    /// Edge multiplicities in row-major edge order.
    pub fn multiplicities(&self) -> &[i32] {
        &self.mult
    }

    /// Check-to-variable erasures from variable-to-check erasures.
    pub fn check_update(&self, v: &[f64], c: &mut [f64]) {
        let mut ex = Vec::new();
        for r in 0..self.n_rows {
            let edges = &self.row_edges[self.row_ptr[r]..self.row_ptr[r + 1]];
            let terms = edges.iter().map(|&e| (1.0 - v[e]).powi(self.mult[e]));
            extrinsic(terms, &mut ex);
            for (k, &e) in edges.iter().enumerate() {
                c[e] = 1.0 - ex[k] * (1.0 - v[e]).powi(self.mult[e] - 1);
            }
        }
    }

    /// Variable-to-check erasures from check-to-variable erasures.
    pub fn variable_update(&self, c: &[f64], v: &mut [f64]) {
        let mut ex = Vec::new();
        for col in 0..self.n_cols {
            let edges = &self.col_edges[self.col_ptr[col]..self.col_ptr[col + 1]];
            let terms = edges.iter().map(|&e| c[e].powi(self.mult[e]));
            extrinsic(terms, &mut ex);
            let ch = self.channel[col];
            for (k, &e) in edges.iter().enumerate() {
                v[e] = ch * ex[k] * c[e].powi(self.mult[e] - 1);
            }
        }
    }

    /// A-posteriori erasure per column.
    pub fn posterior(&self, c: &[f64], out: &mut [f64]) {
        for (col, o) in out.iter_mut().enumerate().take(self.n_cols) {
            let edges = &self.col_edges[self.col_ptr[col]..self.col_ptr[col + 1]];
            *o = edges.iter().fold(self.channel[col], |acc, &e| acc * c[e].powi(self.mult[e]));
        }
    }
}

fn check_probs(p: &[f64]) -> Result<()> {
    match p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        Some(x) => Err(Error::Domain(format!("erasure probability {x} outside [0, 1]"))),
        None => Ok(()),
    }
}

/// Products of all terms but the k-th, via prefix and suffix products.
fn extrinsic(terms: impl ExactSizeIterator<Item = f64>, out: &mut Vec<f64>) {
    out.clear();
    let mut acc = 1.0;
    let mut t = Vec::with_capacity(terms.len());
    for x in terms {
        out.push(acc);
        acc *= x;
        t.push(x);
    }
    let mut suffix = 1.0;
    for k in (0..t.len()).rev() {
        out[k] *= suffix;
        suffix *= t[k];
    }
}

/// Fixed point of the flooding schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeResult {
    pub posterior: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Run density evolution from `v = channel` until the largest message change
/// drops below `params.tol` or `params.max_iter` is reached.
pub fn de_fixed_point(graph: &DeGraph, params: &DeParams) -> DeResult {
    iterate(graph, params, |_| false).0
}

/// Iterate, additionally stopping as soon as `stop(posterior)` holds. Returns
/// whether the stop predicate fired.
fn iterate(graph: &DeGraph, params: &DeParams, stop: impl Fn(&[f64]) -> bool) -> (DeResult, bool) {
    let ne = graph.n_edge_classes();
    let mut v: Vec<f64> = (0..graph.n_cols)
        .flat_map(|col| {
            let n = graph.col_ptr[col + 1] - graph.col_ptr[col];
            std::iter::repeat_n(graph.channel[col], n)
        })
        .collect();
    // v was filled in column order; reorder to edge indices
    let mut v_edge = vec![0.0; ne];
    for (slot, &e) in graph.col_edges.iter().enumerate() {
        v_edge[e] = v[slot];
    }
    v = v_edge;
    let mut c = vec![0.0; ne];
    let mut v_next = vec![0.0; ne];
    let mut post = graph.channel.clone();
    let mut iterations = 0;
    let mut converged = false;
    let mut stopped = stop(&post);
    while !stopped && iterations < params.max_iter {
        graph.check_update(&v, &mut c);
        graph.variable_update(&c, &mut v_next);
        iterations += 1;
        let delta = v.iter().zip(&v_next).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        std::mem::swap(&mut v, &mut v_next);
        graph.posterior(&c, &mut post);
        stopped = stop(&post);
        if delta < params.tol {
            converged = true;
            break;
        }
    }
    if ne == 0 {
        converged = true;
    }
    (DeResult { posterior: post, iterations, converged: converged || stopped }, stopped)
}

/// Result of a threshold search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    /// Midpoint of the final bracket.
    pub threshold: f64,
    /// Width of the final bracket.
    pub bracket: f64,
    /// Threshold of every window configuration (windowed searches only).
    pub per_config: Vec<f64>,
    pub argmin_config: Option<usize>,
    pub w: Option<usize>,
    pub delta: Option<f64>,
    pub groups: Option<usize>,
}

impl ThresholdResult {
    fn plain(threshold: f64, bracket: f64) -> Self {
        ThresholdResult {
            threshold,
            bracket,
            per_config: Vec::new(),
            argmin_config: None,
            w: None,
            delta: None,
            groups: None,
        }
    }
}

/// Bisection for the supremum of `eps` where `success(eps)` holds, assuming
/// success is monotone decreasing in `eps` and holds at 0.
fn bisect(tol_eps: f64, success: impl FnMut(f64) -> bool) -> (f64, f64) {
    bisect_below(1.0, tol_eps, success)
}

/// As [`bisect`], searching `[0, hi]`.
fn bisect_below(hi: f64, tol_eps: f64, mut success: impl FnMut(f64) -> bool) -> (f64, f64) {
    if success(hi) {
        return (hi, 0.0);
    }
    let (mut lo, mut hi) = (0.0, hi);
    while hi - lo > tol_eps {
        let mid = 0.5 * (lo + hi);
        if success(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), hi - lo)
}

/// BP threshold of an arbitrary base matrix: every column must be recovered.
pub fn bp_threshold_matrix(b: &BaseMatrix, params: &DeParams) -> Result<ThresholdResult> {
    let mut graph = DeGraph::new(b, 0.0)?;
    let n = b.cols();
    let tol = params.success_tol;
    let (t, w) = bisect(params.tol_eps, |eps| {
        graph.set_channel(&vec![eps; n]).expect("eps in [0,1]");
        iterate(&graph, params, |p| p.iter().all(|&x| x < tol)).1
    });
    Ok(ThresholdResult::plain(t, w))
}

pub fn bp_threshold(ens: &Ensemble, params: &DeParams) -> Result<ThresholdResult> {
    bp_threshold_matrix(&ens.base_matrix(), params)
}

/// Success test for one window at channel `eps`.
///
/// Previously decoded columns enter with erasure `delta`. For `delta > 0` the
/// window succeeds once every targeted column is at or below `delta`. For
/// `delta = 0` the previously decoded columns are known exactly and every
/// undecided column in the window must reach `success_tol`, since no positive
/// erasure level can be carried as exactly zero.
fn window_success(
    win: &WindowProtograph,
    graph: &mut DeGraph,
    delta: f64,
    eps: f64,
    params: &DeParams,
) -> bool {
    let channel: Vec<f64> =
        (0..win.matrix.cols()).map(|c| if c < win.n_left { delta } else { eps }).collect();
    graph.set_channel(&channel).expect("probabilities in range");
    if delta > 0.0 {
        let t = win.targeted();
        iterate(graph, params, |p| p[t.clone()].iter().all(|&x| x <= delta)).1
    } else {
        let u = win.undecided();
        let tol = params.success_tol;
        iterate(graph, params, |p| p[u.clone()].iter().all(|&x| x <= tol)).1
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("target erasure {delta} outside [0, 1)")));
    }
    Ok(())
}

fn window_threshold(win: &WindowProtograph, delta: f64, params: &DeParams) -> Result<(f64, f64)> {
    let mut graph = DeGraph::new(&win.matrix, 0.0)?;
    Ok(bisect(params.tol_eps, |eps| window_success(win, &mut graph, delta, eps, params)))
}

/// Threshold of a single window configuration.
pub fn window_config_threshold(
    ens: &Ensemble,
    w: usize,
    delta: f64,
    config: usize,
    groups: usize,
    params: &DeParams,
) -> Result<ThresholdResult> {
    check_delta(delta)?;
    let win = ens.window(w, config, groups)?;
    let (t, width) = window_threshold(&win, delta, params)?;
    Ok(ThresholdResult {
        per_config: vec![t],
        argmin_config: Some(config),
        w: Some(w),
        delta: Some(delta),
        groups: Some(groups),
        ..ThresholdResult::plain(t, width)
    })
}

/// Minimum of the configuration thresholds over all `L` window positions.
/// Configurations with identical windows are evaluated once.
pub fn windowed_threshold(
    ens: &Ensemble,
    w: usize,
    delta: f64,
    groups: usize,
    params: &DeParams,
) -> Result<ThresholdResult> {
    check_delta(delta)?;
    let windows = (0..ens.l()).map(|t| ens.window(w, t, groups)).collect::<Result<Vec<_>>>()?;
    let mut unique: HashMap<(&BaseMatrix, usize, usize), usize> = HashMap::new();
    let mut reps = Vec::new();
    let slot: Vec<usize> = windows
        .iter()
        .enumerate()
        .map(|(t, win)| {
            *unique.entry((&win.matrix, win.n_left, win.n_targeted)).or_insert_with(|| {
                reps.push(t);
                reps.len() - 1
            })
        })
        .collect();
    let solved = reps
        .par_iter()
        .map(|&t| window_threshold(&windows[t], delta, params))
        .collect::<Result<Vec<_>>>()?;
    let per_config: Vec<f64> = slot.iter().map(|&s| solved[s].0).collect();
    let width = solved.iter().map(|s| s.1).fold(0.0, f64::max);
    let (argmin, &threshold) =
        per_config.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("L >= 1");
    Ok(ThresholdResult {
        threshold,
        bracket: width,
        per_config,
        argmin_config: Some(argmin),
        w: Some(w),
        delta: Some(delta),
        groups: Some(groups),
    })
}

/// Minimum windowed threshold without resolving every configuration.
///
/// Configurations are visited starting at the first position; each later
/// one is first tested at the lower end of the current best bracket and only
/// bisected if it fails there. The result matches [`windowed_threshold`] to
/// within the bisection tolerance, but `per_config` is left empty.
pub fn windowed_threshold_min(
    ens: &Ensemble,
    w: usize,
    delta: f64,
    groups: usize,
    params: &DeParams,
) -> Result<ThresholdResult> {
    check_delta(delta)?;
    let mut seen = HashSet::new();
    let mut best: Option<(usize, f64, f64)> = None;
    for t in 0..ens.l() {
        let win = ens.window(w, t, groups)?;
        if !seen.insert((win.matrix.clone(), win.n_left, win.n_targeted)) {
            continue;
        }
        let mut graph = DeGraph::new(&win.matrix, 0.0)?;
        let hi = match best {
            None => 1.0,
            Some((_, th, width)) => {
                let floor = th - 0.5 * width;
                if window_success(&win, &mut graph, delta, floor, params) {
                    continue;
                }
                floor
            }
        };
        let (th, width) = bisect_below(hi, params.tol_eps, |eps| {
            window_success(&win, &mut graph, delta, eps, params)
        });
        best = Some((t, th, width));
    }
    let (argmin, threshold, bracket) = best.expect("L >= 1");
    Ok(ThresholdResult {
        threshold,
        bracket,
        per_config: Vec::new(),
        argmin_config: Some(argmin),
        w: Some(w),
        delta: Some(delta),
        groups: Some(groups),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::protograph::classical_ensemble;
    use proptest::prelude::*;

    fn row(entries: &[u32]) -> BaseMatrix {
        BaseMatrix::from_rows(&[entries.to_vec()]).unwrap()
    }

    #[test]
    fn single_row_33() {
        let b = row(&[3, 3]);
        let p = DeParams { max_iter: 2000, ..DeParams::default() };
        let below = de_fixed_point(&DeGraph::new(&b, 0.42).unwrap(), &p);
        assert!(below.posterior.iter().all(|&x| x < 1e-6));
        let above = de_fixed_point(&DeGraph::new(&b, 0.44).unwrap(), &DeParams::default());
        assert!(above.posterior.iter().all(|&x| x > 0.1));
        let t = bp_threshold_matrix(&b, &DeParams::default()).unwrap();
        assert!((t.threshold - 0.4294).abs() < 0.002, "{}", t.threshold);
    }

    #[test]
    fn perfect_channel_is_immediate() {
        let b = classical_ensemble(3, 2, 5).unwrap().base_matrix();
        let r = de_fixed_point(&DeGraph::new(&b, 0.0).unwrap(), &DeParams::default());
        assert!(r.posterior.iter().all(|&x| x == 0.0));
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
    }

    #[test]
    fn degree_one_twins_never_recover() {
        // two degree-one columns on the same check
        let b = row(&[1, 1]);
        for eps in [0.01, 0.2, 0.5] {
            let r = de_fixed_point(&DeGraph::new(&b, eps).unwrap(), &DeParams::default());
            assert!(r.posterior.iter().all(|&x| x >= eps * eps * 0.999));
        }
    }

    #[test]
    fn multiplicity_matches_parallel_copies() {
        // one check, a double edge to column 0 and a single edge to column 1
        let g = DeGraph::new(&row(&[2, 1]), 0.3).unwrap();
        assert_eq!(g.multiplicities(), &[2, 1]);
        let p = DeParams { max_iter: 1, ..DeParams::default() };
        let r = de_fixed_point(&g, &p);
        let c0 = 1.0 - 0.7 * 0.7;
        let c1 = 1.0 - 0.7 * 0.7;
        assert!((r.posterior[0] - 0.3 * c0 * c0).abs() < 1e-15);
        assert!((r.posterior[1] - 0.3 * c1).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_probability() {
        let b = row(&[1, 1]);
        assert!(DeGraph::new(&b, 1.5).is_err());
        assert!(DeGraph::with_channel(&b, vec![0.1]).is_err());
    }

    #[test]
    fn posterior_non_increasing() {
        let b = classical_ensemble(3, 2, 8).unwrap().base_matrix();
        let g = DeGraph::new(&b, 0.47).unwrap();
        let mut prev = vec![1.0; b.cols()];
        for it in 1..60 {
            let p = DeParams { max_iter: it, tol: 0.0, ..DeParams::default() };
            let r = de_fixed_point(&g, &p);
            for (a, b) in r.posterior.iter().zip(&prev) {
                assert!(*a <= *b + 1e-15);
            }
            prev = r.posterior;
        }
    }

    #[test]
    fn two_by_two_block_is_one_third() {
        // convergence is linear near 1/3, so the iteration budget sets the bias
        let p = DeParams { max_iter: 100_000, ..DeParams::default() };
        let t = bp_threshold_matrix(&row(&[2, 2]), &p).unwrap();
        assert!((t.threshold - 1.0 / 3.0).abs() < 1e-4, "{}", t.threshold);
        let t = bp_threshold_matrix(&row(&[2, 2]), &DeParams::default()).unwrap();
        assert!(t.threshold < 1.0 / 3.0 && t.threshold > 0.3315);
    }

    #[test]
    fn windowed_errors() {
        let e = classical_ensemble(3, 2, 10).unwrap();
        let p = DeParams::default();
        assert!(windowed_threshold(&e, 2, 0.0, 1, &p).is_err());
        assert!(windowed_threshold(&e, 3, 1.0, 1, &p).is_err());
        assert!(window_config_threshold(&e, 3, 0.0, 10, 1, &p).is_err());
    }

    #[test]
    fn dedup_matches_direct_evaluation() {
        let e = Ensemble::new(
            vec![Polynomial::from(vec![2, 0, 1]), Polynomial::from(vec![2, 1])],
            1,
            2,
            2,
            8,
        )
        .unwrap();
        let p = DeParams { tol_eps: 1e-4, ..DeParams::default() };
        let all = windowed_threshold(&e, 4, 1e-6, 1, &p).unwrap();
        for t in 0..e.l() {
            let one = window_config_threshold(&e, 4, 1e-6, t, 1, &p).unwrap();
            assert_eq!(one.threshold, all.per_config[t]);
        }
        assert_eq!(all.per_config[all.argmin_config.unwrap()], all.threshold);
        let fast = windowed_threshold_min(&e, 4, 1e-6, 1, &p).unwrap();
        assert!((fast.threshold - all.threshold).abs() <= p.tol_eps);
    }

    fn small_matrix() -> impl Strategy<Value = BaseMatrix> {
        (1usize..4, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0u32..4, r * c).prop_map(move |v| {
                let rows: Vec<Vec<u32>> = v.chunks(c).map(<[u32]>::to_vec).collect();
                BaseMatrix::from_rows(&rows).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn update_map_is_monotone(
            b in small_matrix(),
            seed in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 16),
            eps in 0.0f64..1.0,
        ) {
            let g = DeGraph::new(&b, eps).unwrap();
            let n = g.n_edge_classes();
            prop_assume!(n > 0 && n <= seed.len());
            let lo: Vec<f64> = seed[..n].iter().map(|(a, d)| a * (1.0 - d)).collect();
            let hi: Vec<f64> = seed[..n].iter().map(|(a, _)| *a).collect();
            let (mut c_lo, mut c_hi) = (vec![0.0; n], vec![0.0; n]);
            g.check_update(&lo, &mut c_lo);
            g.check_update(&hi, &mut c_hi);
            for (a, b) in c_lo.iter().zip(&c_hi) {
                prop_assert!(*a <= *b + 1e-12);
            }
            let (mut v_lo, mut v_hi) = (vec![0.0; n], vec![0.0; n]);
            g.variable_update(&lo, &mut v_lo);
            g.variable_update(&hi, &mut v_hi);
            for (a, b) in v_lo.iter().zip(&v_hi) {
                prop_assert!(*a <= *b + 1e-12);
            }
        }

        #[test]
        fn fixed_point_monotone_in_channel(b in small_matrix(), e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let p = DeParams { max_iter: 200, tol: 0.0, ..DeParams::default() };
            let r_lo = de_fixed_point(&DeGraph::new(&b, lo).unwrap(), &p);
            let r_hi = de_fixed_point(&DeGraph::new(&b, hi).unwrap(), &p);
            for (a, b) in r_lo.posterior.iter().zip(&r_hi.posterior) {
                prop_assert!(*a <= *b + 1e-12);
                prop_assert!((0.0..=1.0).contains(a));
            }
        }
    }
}
