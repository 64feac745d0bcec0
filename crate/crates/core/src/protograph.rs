//! Terminated protograph LDPC convolutional code ensembles.
//!
//! An ensemble is given by `J'` (check rows per time instant), `K'`
//! (variable columns per instant), the memory `m_s`, the termination length
//! `L` and one column polynomial per variable column. Column `i*K' + j` of
//! the terminated base matrix carries `x^(J' i) p_j(x)`: its entry at row
//! `J' i + r` is the coefficient of `x^r` in `p_j`.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Dense matrix of edge multiplicities.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl BaseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BaseMatrix { rows, cols, entries: vec![0; rows * cols] }
    }

    /// Build from row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Domain("ragged base matrix rows".into()));
        }
        Ok(BaseMatrix { rows: rows.len(), cols, entries: rows.concat() })
    }

    /// Terminated base matrix for a polynomial set without ensemble validation
    /// (zero polynomials are allowed and give empty columns).
    pub fn from_polys(polys: &[Polynomial], jprime: usize, ms: usize, l: usize) -> Self {
        let kprime = polys.len();
        let mut b = BaseMatrix::zeros(jprime * (l + ms), kprime * l);
        for i in 0..l {
            for (j, p) in polys.iter().enumerate() {
                for (r, &c) in p.coeffs().iter().enumerate() {
                    let row = jprime * i + r;
                    if row < b.rows {
                        b.set(row, i * kprime + j, c);
                    }
                }
            }
        }
        b
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Nonzero `(row, multiplicity)` pairs of a column.
    pub fn column_support(&self, c: usize) -> Vec<(usize, u32)> {
        (0..self.rows)
            .filter_map(|r| {
                let v = self.get(r, c);
                (v > 0).then_some((r, v))
            })
            .collect()
    }

    pub fn column_sum(&self, c: usize) -> u64 {
        (0..self.rows).map(|r| u64::from(self.get(r, c))).sum()
    }

    pub fn row_sum(&self, r: usize) -> u64 {
        self.row(r).iter().map(|&v| u64::from(v)).sum()
    }

    /// Sub-matrix over a row range and column range.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = BaseMatrix::zeros(rows.len(), cols.len());
        for (ro, r) in rows.clone().enumerate() {
            for (co, c) in cols.clone().enumerate() {
                out.set(ro, co, self.get(r, c));
            }
        }
        out
    }

    pub fn is_binary(&self) -> bool {
        self.entries.iter().all(|&v| v <= 1)
    }
}

impl fmt::Debug for BaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BaseMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(u32::to_string).collect();
            writeln!(f, "  {}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Regularity audit of a polynomial set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Regularity {
    /// `p_j(1)` for every column polynomial.
    pub column_weights: Vec<u64>,
    /// `sum_j p_j^[m](1)` for every residue `m < J'`.
    pub row_weights: Vec<u64>,
    /// All column weights equal and all residue row weights equal.
    pub regular: bool,
}

/// Raw serialized form, validated into [`Ensemble`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSpec {
    #[serde(rename = "Jprime")]
    pub jprime: usize,
    #[serde(rename = "Kprime")]
    pub kprime: usize,
    pub ms: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub polys: Vec<Polynomial>,
    #[serde(default)]
    pub label: String,
}

/// Validated terminated LDPC-CC ensemble.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleSpec", into = "EnsembleSpec")]
pub struct Ensemble {
    jprime: usize,
    kprime: usize,
    ms: usize,
    l: usize,
    polys: Vec<Polynomial>,
    label: String,
    regularity: Regularity,
}

impl TryFrom<EnsembleSpec> for Ensemble {
    type Error = Error;

    fn try_from(s: EnsembleSpec) -> Result<Self> {
        Ensemble::new(s.polys, s.jprime, s.kprime, s.ms, s.l).map(|e| e.with_label(s.label))
    }
}

impl From<Ensemble> for EnsembleSpec {
    fn from(e: Ensemble) -> Self {
        EnsembleSpec {
            jprime: e.jprime,
            kprime: e.kprime,
            ms: e.ms,
            l: e.l,
            polys: e.polys,
            label: e.label,
        }
    }
}

impl Ensemble {
    /// Validate a polynomial set. Non-regular sets are accepted; see
    /// [`Ensemble::regularity`].
    pub fn new(
        polys: Vec<Polynomial>,
        jprime: usize,
        kprime: usize,
        ms: usize,
        l: usize,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidEnsemble(m));
        if jprime < 1 {
            return bad("J' must be at least 1".into());
        }
        if kprime < 2 {
            return bad("K' must be at least 2".into());
        }
        if ms < 1 {
            return bad("memory must be at least 1".into());
        }
        if l < 1 {
            return bad("termination length must be at least 1".into());
        }
        if polys.len() != kprime {
            return bad(format!("expected {kprime} polynomials, got {}", polys.len()));
        }
        let max_deg = (ms + 1) * jprime - 1;
        for (j, p) in polys.iter().enumerate() {
            match p.degree() {
                None => return bad(format!("polynomial {j} is zero")),
                Some(d) if d > max_deg => {
                    return bad(format!("polynomial {j} has degree {d} > (ms+1)J'-1 = {max_deg}"))
                }
                _ => {}
            }
        }
        let top = polys.iter().any(|p| p.degree().unwrap() >= ms * jprime);
        let bottom = polys.iter().any(|p| p.min_degree().unwrap() < jprime);
        if !top || !bottom {
            return bad(format!("polynomials do not realize memory {ms}"));
        }
        let regularity = regularity(&polys, jprime)?;
        Ok(Ensemble { jprime, kprime, ms, l, polys, label: String::new(), regularity })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same polynomials, different termination length.
    pub fn with_length(&self, l: usize) -> Result<Self> {
        Ensemble::new(self.polys.clone(), self.jprime, self.kprime, self.ms, l)
            .map(|e| e.with_label(self.label.clone()))
    }

    pub fn jprime(&self) -> usize {
        self.jprime
    }

    pub fn kprime(&self) -> usize {
        self.kprime
    }

    pub fn ms(&self) -> usize {
        self.ms
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn regularity(&self) -> &Regularity {
        &self.regularity
    }

    /// Column weight `J` for regular ensembles.
    pub fn j(&self) -> Option<u64> {
        self.regularity.regular.then(|| self.regularity.column_weights[0])
    }

    /// Row weight `K` for regular ensembles.
    pub fn k(&self) -> Option<u64> {
        self.regularity.regular.then(|| self.regularity.row_weights[0])
    }

    /// Total protograph check nodes `J'(L + m_s)`.
    pub fn check_nodes(&self) -> usize {
        self.jprime * (self.l + self.ms)
    }

    /// Total protograph variable nodes `K' L`.
    pub fn variable_nodes(&self) -> usize {
        self.kprime * self.l
    }

    pub fn base_matrix(&self) -> BaseMatrix {
        BaseMatrix::from_polys(&self.polys, self.jprime, self.ms, self.l)
    }

    /// `(K'L - J'(L+m_s)) / (K'L)`, assuming full row rank. May be negative.
    pub fn design_rate(&self) -> Ratio<i64> {
        let n = self.variable_nodes() as i64;
        let m = self.check_nodes() as i64;
        Ratio::new(n - m, n)
    }

    /// Modulo polynomial sets `P_m`, one per residue `m < J'`.
    pub fn modulo_sets(&self) -> Vec<Vec<Polynomial>> {
        let split: Vec<Vec<Polynomial>> =
            self.polys.iter().map(|p| p.modulo_split(self.jprime).expect("J' >= 1")).collect();
        (0..self.jprime).map(|m| split.iter().map(|parts| parts[m].clone()).collect()).collect()
    }

    /// Admissible window sizes `m_s + 1 ..= L + m_s`.
    pub fn window_range(&self) -> (usize, usize) {
        (self.ms + 1, self.l + self.ms)
    }

    pub fn check_window(&self, w: usize) -> Result<()> {
        let (min, max) = self.window_range();
        if w < min || w > max {
            return Err(Error::WindowRange { w, min, max });
        }
        Ok(())
    }

    pub fn check_design_rules(&self) -> DesignRuleReport {
        check_design_rules(self)
    }

    pub fn window(&self, w: usize, config: usize, groups: usize) -> Result<WindowProtograph> {
        window_subprotograph(self, w, config, groups)
    }
}

fn regularity(polys: &[Polynomial], jprime: usize) -> Result<Regularity> {
    let column_weights: Vec<u64> = polys.iter().map(Polynomial::eval_one).collect();
    let mut row_weights = vec![0u64; jprime];
    for p in polys {
        for (m, part) in p.modulo_split(jprime)?.iter().enumerate() {
            row_weights[m] += part.eval_one();
        }
    }
    let regular = column_weights.windows(2).all(|w| w[0] == w[1])
        && row_weights.windows(2).all(|w| w[0] == w[1]);
    Ok(Regularity { column_weights, row_weights, regular })
}

/// Outcome of a single design rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Audit of the four design rules with the coefficients that decide them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignRuleReport {
    /// Multiplicity at the least exponent must be at least 2 (J' = 1 only).
    pub rule1: Verdict,
    /// `p_j^(min deg p_j)` per column.
    pub rule1_coeffs: Vec<u32>,
    /// Start-of-code check degrees `sum_j p_j^(m)`, `m < J'` (smaller is stronger).
    pub rule2_sums: Vec<u64>,
    /// Every column has some coefficient equal to 1.
    pub rule3: Verdict,
    /// Index of a unit coefficient per column, if any.
    pub rule3_witness: Vec<Option<usize>>,
    /// `min deg p_2 = 0` and `deg p_1 = m_s` (K' = 2, J' = 1 only).
    pub rule4: Verdict,
    pub rule4_degrees: Option<(usize, usize)>,
}

pub fn check_design_rules(ens: &Ensemble) -> DesignRuleReport {
    let polys = ens.polys();
    let rule1_coeffs: Vec<u32> =
        polys.iter().map(|p| p.coeff(p.min_degree().unwrap_or(0))).collect();
    let rule1 = if ens.jprime() == 1 {
        Verdict::from_bool(rule1_coeffs.iter().all(|&c| c >= 2))
    } else {
        Verdict::NotApplicable
    };
    let rule2_sums =
        (0..ens.jprime()).map(|m| polys.iter().map(|p| u64::from(p.coeff(m))).sum()).collect();
    let rule3_witness: Vec<Option<usize>> =
        polys.iter().map(|p| p.coeffs().iter().position(|&c| c == 1)).collect();
    let rule3 = Verdict::from_bool(rule3_witness.iter().all(Option::is_some));
    let (rule4, rule4_degrees) = if ens.kprime() == 2 && ens.jprime() == 1 {
        let min2 = polys[1].min_degree().unwrap();
        let deg1 = polys[0].degree().unwrap();
        (Verdict::from_bool(min2 == 0 && deg1 == ens.ms()), Some((min2, deg1)))
    } else {
        (Verdict::NotApplicable, None)
    };
    DesignRuleReport { rule1, rule1_coeffs, rule2_sums, rule3, rule3_witness, rule4, rule4_degrees }
}

/// Classical construction: every column is `1 + x + ... + x^(J-1)`.
pub fn classical_ensemble(j: usize, kprime: usize, l: usize) -> Result<Ensemble> {
    if j < 2 {
        return Err(Error::Domain("classical ensemble needs J >= 2".into()));
    }
    let p = Polynomial::run(0, j - 1);
    Ensemble::new(vec![p; kprime], 1, kprime, j - 1, l)
        .map(|e| e.with_label(format!("Cc({j},{})", j * kprime)))
}

/// Span-maximizing family: `p_l = (J-1) + x^(m_s - u(l-1))` with
/// `m_s = u(K'-1) + 1`.
pub fn max_span_family(j: usize, kprime: usize, u: usize, l: usize) -> Result<Ensemble> {
    if j < 2 {
        return Err(Error::Domain("family needs J >= 2".into()));
    }
    if u < 1 || u + 1 > l {
        return Err(Error::Domain(format!("u = {u} outside [1, L-1] for L = {l}")));
    }
    let ms = u * (kprime - 1) + 1;
    let polys = (0..kprime)
        .map(|idx| {
            let top = ms - u * idx;
            Polynomial::monomial(0, (j - 1) as u32).sum(&Polynomial::monomial(top, 1))
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(polys, 1, kprime, ms, l)
        .map(|e| e.with_label(format!("span({j},{kprime},u={u})")))
}

/// Windowed sub-protograph at one decoding position.
///
/// Columns are laid out as `n_left` previously targeted columns, then
/// `n_targeted` targeted columns, then the remaining (future) columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowProtograph {
    pub matrix: BaseMatrix,
    pub n_left: usize,
    pub n_targeted: usize,
    pub config_index: usize,
    /// First base-matrix row inside the window.
    pub row_offset: usize,
    /// First base-matrix column inside the window.
    pub col_offset: usize,
}

impl WindowProtograph {
    pub fn targeted(&self) -> std::ops::Range<usize> {
        self.n_left..self.n_left + self.n_targeted
    }

    /// Columns that are not previously decoded.
    pub fn undecided(&self) -> std::ops::Range<usize> {
        self.n_left..self.matrix.cols()
    }
}

/// Window of `w` sets of `J'` rows starting at time instant `config`, with the
/// first `groups` instants targeted. Rows and columns are clipped at the
/// termination.
pub fn window_subprotograph(
    ens: &Ensemble,
    w: usize,
    config: usize,
    groups: usize,
) -> Result<WindowProtograph> {
    ens.check_window(w)?;
    if config >= ens.l() {
        return Err(Error::Domain(format!("config {config} >= L = {}", ens.l())));
    }
    if groups < 1 || groups > w {
        return Err(Error::Domain(format!("targeted groups {groups} outside [1, {w}]")));
    }
    let (jp, kp) = (ens.jprime(), ens.kprime());
    let b = ens.base_matrix();
    let row_start = jp * config;
    let row_end = (jp * (config + w)).min(b.rows());
    let first_instant = config.saturating_sub(ens.ms());
    let last_instant = (config + w).min(ens.l());
    let col_start = kp * first_instant;
    let col_end = kp * last_instant;
    let targeted_end = (config + groups).min(ens.l());
    Ok(WindowProtograph {
        matrix: b.submatrix(row_start..row_end, col_start..col_end),
        n_left: kp * (config - first_instant),
        n_targeted: kp * (targeted_end - config),
        config_index: config,
        row_offset: row_start,
        col_offset: col_start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[u32]) -> Polynomial {
        Polynomial::from(c)
    }

    fn c2(l: usize) -> Ensemble {
        Ensemble::new(vec![p(&[2, 0, 1]), p(&[2, 1])], 1, 2, 2, l).unwrap()
    }

    #[test]
    fn ensemble_validation() {
        let cc = Ensemble::new(vec![p(&[1, 1, 1]); 2], 1, 2, 2, 10).unwrap();
        assert_eq!(cc.j(), Some(3));
        assert_eq!(cc.k(), Some(6));
        assert!(c2(10).regularity().regular);
        assert!(matches!(
            Ensemble::new(vec![p(&[1, 1]); 2], 1, 2, 2, 10),
            Err(Error::InvalidEnsemble(_))
        ));
        assert!(Ensemble::new(vec![p(&[1, 1, 1, 1]), p(&[1])], 1, 2, 2, 10).is_err());
        assert!(Ensemble::new(vec![p(&[1, 1]), Polynomial::zero()], 1, 2, 1, 10).is_err());
        // irregular sets are accepted
        let irr = Ensemble::new(vec![p(&[2, 1]), p(&[1, 1])], 1, 2, 1, 10).unwrap();
        assert!(!irr.regularity().regular);
    }

    #[test]
    fn json_schema_round_trip() {
        let text = r#"{"Jprime":1,"Kprime":2,"ms":2,"L":5,"polys":[[2,0,1],[2,1]],"label":"C2"}"#;
        let e: Ensemble = serde_json::from_str(text).unwrap();
        assert_eq!(e.polys(), c2(5).polys());
        assert_eq!(e.label(), "C2");
        let back: serde_json::Value = serde_json::to_value(&e).unwrap();
        assert_eq!(back, serde_json::from_str::<serde_json::Value>(text).unwrap());
        let bad = r#"{"Jprime":1,"Kprime":2,"ms":2,"L":5,"polys":[[1,1],[1,1]],"label":""}"#;
        assert!(serde_json::from_str::<Ensemble>(bad).is_err());
    }

    #[test]
    fn base_matrix_examples() {
        let b = classical_ensemble(3, 2, 4).unwrap().base_matrix();
        assert_eq!((b.rows(), b.cols()), (6, 8));
        assert_eq!(b.column(0), vec![1, 1, 1, 0, 0, 0]);
        assert_eq!(b.column(7), vec![0, 0, 0, 1, 1, 1]);

        let c3 = Ensemble::new(vec![p(&[2, 1]); 2], 1, 2, 1, 3).unwrap();
        let b = c3.base_matrix();
        assert_eq!(b.column(0), vec![2, 1, 0, 0]);
        assert_eq!(b.column(1), vec![2, 1, 0, 0]);

        let b = c2(4).base_matrix();
        assert_eq!(b.column(3), vec![0, 2, 1, 0, 0, 0]);
        assert_eq!(b.column(0), vec![2, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn base_matrix_sums() {
        let e = c2(12);
        let b = e.base_matrix();
        for c in 0..b.cols() {
            assert_eq!(b.column_sum(c), e.polys()[c % 2].eval_one());
        }
        for r in 0..b.rows() {
            assert!(b.row_sum(r) <= 6);
        }
        for r in e.ms()..e.l() {
            assert_eq!(b.row_sum(r), 6);
        }
    }

    #[test]
    fn design_rates() {
        let r = |ms, l| {
            let polys = if ms == 2 { vec![p(&[2, 0, 1]), p(&[2, 1])] } else { vec![p(&[2, 1]); 2] };
            Ensemble::new(polys, 1, 2, ms, l).unwrap().design_rate()
        };
        assert_eq!(r(2, 100), Ratio::new(49, 100));
        assert_eq!(r(1, 100), Ratio::new(99, 200));
        assert_eq!(r(2, 20), Ratio::new(9, 20));
        let big = classical_ensemble(3, 2, 10_000).unwrap().design_rate();
        let v = *big.numer() as f64 / *big.denom() as f64;
        assert!((v - 0.5).abs() < 1e-3);
        let neg = Ensemble::new(vec![p(&[1, 1, 1]); 2], 1, 2, 2, 1).unwrap().design_rate();
        assert!(neg < Ratio::from_integer(0));
    }

    #[test]
    fn design_rule_examples() {
        let cc = classical_ensemble(3, 2, 10).unwrap().check_design_rules();
        assert_eq!(cc.rule1, Verdict::Fail);
        let r = c2(10).check_design_rules();
        assert_eq!((r.rule1, r.rule3, r.rule4), (Verdict::Pass, Verdict::Pass, Verdict::Pass));
        assert_eq!(r.rule2_sums, vec![4]);
        for j in 3..7 {
            let r = max_span_family(j, 3, 1, 10).unwrap().check_design_rules();
            assert_eq!((r.rule1, r.rule3), (Verdict::Pass, Verdict::Pass));
            assert_eq!(r.rule4, Verdict::NotApplicable);
        }
        let r = max_span_family(2, 3, 1, 10).unwrap().check_design_rules();
        assert_eq!(r.rule1, Verdict::Fail);
    }

    #[test]
    fn classical_family() {
        let e = classical_ensemble(3, 2, 7).unwrap();
        assert_eq!(e.polys(), &[p(&[1, 1, 1]), p(&[1, 1, 1])]);
        assert_eq!(e.ms(), 2);
        let e = classical_ensemble(2, 2, 7).unwrap();
        assert_eq!(e.polys(), &[p(&[1, 1]), p(&[1, 1])]);
        assert!(classical_ensemble(1, 2, 7).is_err());
    }

    #[test]
    fn span_family() {
        let e = max_span_family(2, 3, 1, 10).unwrap();
        assert_eq!(e.ms(), 3);
        assert_eq!(e.polys(), &[p(&[1, 0, 0, 1]), p(&[1, 0, 1]), p(&[1, 1])]);
        let e = max_span_family(4, 2, 3, 10).unwrap();
        assert_eq!(e.ms(), 4);
        assert_eq!(e.polys(), &[p(&[3, 0, 0, 0, 1]), p(&[3, 1])]);
        let e = max_span_family(3, 3, 2, 10).unwrap();
        assert_eq!(e.ms(), 5);
        let degs: Vec<usize> = e.polys().iter().map(|q| q.degree().unwrap()).collect();
        assert_eq!(degs, vec![5, 3, 1]);
        assert!(max_span_family(3, 3, 10, 10).is_err());
    }

    #[test]
    fn windows() {
        let cc = classical_ensemble(3, 2, 10).unwrap();
        let w = cc.window(3, 0, 1).unwrap();
        assert_eq!(
            w.matrix.to_rows(),
            vec![vec![1, 1, 0, 0, 0, 0], vec![1, 1, 1, 1, 0, 0], vec![1, 1, 1, 1, 1, 1]]
        );
        assert_eq!((w.n_left, w.n_targeted), (0, 2));

        let w = c2(10).window(3, 0, 1).unwrap();
        assert_eq!(
            w.matrix.to_rows(),
            vec![vec![2, 2, 0, 0, 0, 0], vec![0, 1, 2, 2, 0, 0], vec![1, 0, 0, 1, 2, 2]]
        );

        for (e, wsize) in [(c2(12), 4), (cc.clone(), 3)] {
            let g = e.window(wsize, 5, 1).unwrap();
            assert_eq!(g.matrix.cols(), (wsize + e.ms()) * e.kprime());
            assert_eq!(g.matrix.rows(), wsize * e.jprime());
            assert_eq!(g.n_left, e.ms() * e.kprime());
        }
        // tail: rows and columns clipped
        let t = cc.window(3, 9, 2).unwrap();
        assert_eq!(t.matrix.rows(), 3);
        assert_eq!(t.n_targeted, 2);
        assert_eq!(t.matrix.cols(), 6);
        assert!(matches!(cc.window(2, 0, 1), Err(Error::WindowRange { .. })));
        assert!(cc.window(13, 0, 1).is_err());
        assert!(cc.window(3, 0, 4).is_err());
    }

    #[test]
    fn interleaved_ensemble_recovers_modulo_sets() {
        let p0 = [p(&[1, 0, 0, 1]), p(&[1, 0, 1]), p(&[1, 1])];
        let p1 = [p(&[1, 0, 0, 1]), p(&[1, 0, 0, 1]), p(&[1, 0, 0, 1])];
        let polys: Vec<Polynomial> = p0
            .iter()
            .zip(&p1)
            .map(|(a, b)| Polynomial::interleave(&[a.clone(), b.clone()], 2).unwrap())
            .collect();
        let e = Ensemble::new(polys, 2, 3, 3, 10).unwrap();
        let sets = e.modulo_sets();
        assert_eq!(sets[0], p0.to_vec());
        assert_eq!(sets[1], p1.to_vec());
        assert_eq!(e.j(), Some(4));
        assert_eq!(e.k(), Some(6));
    }
}
