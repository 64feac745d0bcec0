//! Polynomials with non-negative integer coefficients.
//!
//! A protograph column is described by a polynomial whose coefficient of
//! `x^i` is the edge multiplicity at row offset `i`. This module provides
//! the exact arithmetic on such polynomials: degree bounds, the boundary
//! polynomial, the support-preserving partial order, and the splitting of a
//! polynomial into residue classes modulo `J'` (and its inverse).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial with non-negative integer coefficients, lowest degree first.
///
/// Always stored in canonical form: no trailing zero coefficients. The zero
/// polynomial is the empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct Polynomial {
    coeffs: Vec<u32>,
}

impl From<Vec<u32>> for Polynomial {
    fn from(mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }
}

impl From<Polynomial> for Vec<u32> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl From<&[u32]> for Polynomial {
    fn from(c: &[u32]) -> Self {
        c.to_vec().into()
    }
}

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<u32>>) -> Self {
        coeffs.into().into()
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    /// `c * x^exp`.
    pub fn monomial(exp: usize, c: u32) -> Self {
        let mut coeffs = vec![0; exp + 1];
        coeffs[exp] = c;
        coeffs.into()
    }

    /// `x^lo + x^(lo+1) + ... + x^hi`; zero when `hi < lo`.
    pub fn run(lo: usize, hi: usize) -> Self {
        if hi < lo {
            return Self::zero();
        }
        let mut coeffs = vec![0; hi + 1];
        coeffs[lo..=hi].iter_mut().for_each(|c| *c = 1);
        coeffs.into()
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored coefficients (`deg + 1`, or 0 for the zero polynomial).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Least exponent with a positive coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c > 0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `(min deg, deg)` of a non-zero polynomial.
    pub fn degree_bounds(&self) -> Result<(usize, usize)> {
        match (self.min_degree(), self.degree()) {
            (Some(lo), Some(hi)) => Ok((lo, hi)),
            _ => Err(Error::Domain("degree bounds of the zero polynomial".into())),
        }
    }

    /// Boundary polynomial `x^i + x^j` with `i = min deg`, `j = deg`
    /// (`x^i` when they coincide).
    pub fn boundary(&self) -> Result<Polynomial> {
        let (lo, hi) = self.degree_bounds()?;
        let mut coeffs = vec![0; hi + 1];
        coeffs[lo] = 1;
        coeffs[hi] = 1;
        Ok(coeffs.into())
    }

    /// Partial order: equal min degree and degree, coefficient-wise `<=`.
    /// False whenever either side is zero.
    pub fn precedes(&self, other: &Polynomial) -> bool {
        let (Ok(a), Ok(b)) = (self.degree_bounds(), other.degree_bounds()) else {
            return false;
        };
        a == b && self.coeffs.iter().zip(&other.coeffs).all(|(x, y)| x <= y)
    }

    /// Value at `x = 1`, i.e. the coefficient sum.
    pub fn eval_one(&self) -> u64 {
        self.coeffs.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn sum(&self, other: &Polynomial) -> Result<Polynomial> {
        let n = self.len().max(other.len());
        let coeffs = (0..n)
            .map(|i| self.coeff(i).checked_add(other.coeff(i)).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(coeffs.into())
    }

    pub fn product(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let mut out = vec![0u32; self.len() + other.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let term = a.checked_mul(b).ok_or(Error::Overflow)?;
                out[i + j] = out[i + j].checked_add(term).ok_or(Error::Overflow)?;
            }
        }
        Ok(out.into())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial { coeffs }
    }

    /// Residue-class split: part `m` collects the coefficients at exponents
    /// `h*J' + m` as the coefficient of `x^h`.
    pub fn modulo_split(&self, jprime: usize) -> Result<Vec<Polynomial>> {
        if jprime == 0 {
            return Err(Error::Domain("modulo split with J' = 0".into()));
        }
        let mut parts = vec![Vec::new(); jprime];
        for (e, &c) in self.coeffs.iter().enumerate() {
            let (h, m) = (e / jprime, e % jprime);
            let part = &mut parts[m];
            if part.len() <= h {
                part.resize(h + 1, 0);
            }
            part[h] = c;
        }
        Ok(parts.into_iter().map(Polynomial::from).collect())
    }

    /// Inverse of [`Polynomial::modulo_split`].
    pub fn interleave(parts: &[Polynomial], jprime: usize) -> Result<Polynomial> {
        if jprime == 0 || parts.len() != jprime {
            return Err(Error::Domain(format!(
                "interleave expects {jprime} parts, got {}",
                parts.len()
            )));
        }
        let len = parts
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(m, p)| (p.len() - 1) * jprime + m + 1)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![0; len];
        for (m, p) in parts.iter().enumerate() {
            for (h, &c) in p.coeffs.iter().enumerate() {
                coeffs[h * jprime + m] = c;
            }
        }
        Ok(coeffs.into())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (e, 1) => write!(f, "x^{e}")?,
                (e, c) => write!(f, "{c}x^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[u32]) -> Polynomial {
        Polynomial::from(c)
    }

    #[test]
    fn degree_bounds_examples() {
        assert_eq!(p(&[1, 1, 1]).degree_bounds().unwrap(), (0, 2));
        assert_eq!(Polynomial::monomial(3, 1).degree_bounds().unwrap(), (3, 3));
        assert_eq!(p(&[2, 1]).degree_bounds().unwrap(), (0, 1));
        assert!(Polynomial::zero().degree_bounds().is_err());
    }

    #[test]
    fn canonical_form_strips_trailing_zeros() {
        assert_eq!(p(&[1, 0, 0]), p(&[1]));
        assert!(p(&[0, 0]).is_zero());
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(p(&[2, 0, 1]).boundary().unwrap(), p(&[1, 0, 1]));
        assert_eq!(Polynomial::monomial(4, 3).boundary().unwrap(), Polynomial::monomial(4, 1));
        assert_eq!(p(&[2, 1, 1]).boundary().unwrap(), p(&[1, 0, 1]));
        assert!(Polynomial::zero().boundary().is_err());
    }

    #[test]
    fn precedes_examples() {
        assert!(p(&[1, 0, 1]).precedes(&p(&[2, 0, 1])));
        assert!(!p(&[1, 1]).precedes(&p(&[1, 0, 1])));
        assert!(!p(&[0, 1]).precedes(&p(&[1, 1])));
        assert!(!Polynomial::zero().precedes(&p(&[1])));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(p(&[1, 1]).product(&p(&[1, 1])).unwrap(), p(&[1, 2, 1]));
        assert_eq!(p(&[2, 0, 1]).sum(&p(&[2, 1])).unwrap(), p(&[4, 1, 1]));
        // (1 + x^3)(1 + x + x^2), expanded by direct convolution
        let lhs = p(&[1, 0, 0, 1]).product(&p(&[1, 1, 1])).unwrap();
        assert_eq!(lhs.coeffs(), &[1, 1, 1, 1, 1, 1]);
        let lhs = p(&[1, 0, 0, 1]).product(&p(&[1, 1, 1, 1])).unwrap();
        assert_eq!(lhs.coeffs(), &[1, 1, 1, 2, 1, 1, 1]);
        assert_eq!(p(&[1, 1]).product(&Polynomial::zero()).unwrap(), Polynomial::zero());
    }

    fn brute_convolution(a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn shifted_runs_against_brute_force() {
        // (1 + x^3)(1 + x + x^2) has no overlap at x^3
        let prod = p(&[1, 0, 0, 1]).product(&p(&[1, 1, 1])).unwrap();
        assert_eq!(prod.coeffs(), &brute_convolution(&[1, 0, 0, 1], &[1, 1, 1])[..]);
        assert_eq!(prod.coeffs(), &[1, 1, 1, 1, 1, 1]);
        // the run has to reach x^ms for the two copies to meet
        for ms in 1..6usize {
            let a = Polynomial::monomial(0, 1).sum(&Polynomial::monomial(ms, 1)).unwrap();
            let prod = a.product(&Polynomial::run(0, ms)).unwrap();
            assert_eq!(prod.coeffs(), &brute_convolution(a.coeffs(), &vec![1; ms + 1])[..]);
            assert_eq!(prod.coeff(ms), 2);
        }
    }

    #[test]
    fn product_overflow_is_reported() {
        let big = p(&[u32::MAX]);
        assert_eq!(big.product(&p(&[2])), Err(Error::Overflow));
        assert_eq!(big.sum(&p(&[1])), Err(Error::Overflow));
    }

    #[test]
    fn modulo_split_examples() {
        let parts = p(&[1, 0, 0, 1]).modulo_split(2).unwrap();
        assert_eq!(parts, vec![p(&[1]), p(&[0, 1])]);
        let q = p(&[3, 0, 1, 2]);
        assert_eq!(q.modulo_split(1).unwrap(), vec![q.clone()]);
        let parts = p(&[1, 1, 0, 0, 0, 0, 1, 1]).modulo_split(2).unwrap();
        assert_eq!(parts, vec![p(&[1, 0, 0, 1]), p(&[1, 0, 0, 1])]);
        assert!(q.modulo_split(0).is_err());
    }

    #[test]
    fn interleave_examples() {
        let parts = [p(&[1, 0, 0, 1]), p(&[1, 0, 0, 1])];
        assert_eq!(Polynomial::interleave(&parts, 2).unwrap(), p(&[1, 1, 0, 0, 0, 0, 1, 1]));
        let q = p(&[2, 1]);
        assert_eq!(Polynomial::interleave(std::slice::from_ref(&q), 1).unwrap(), q);
        let parts = [p(&[1, 0, 1]), p(&[1])];
        assert_eq!(Polynomial::interleave(&parts, 2).unwrap(), p(&[1, 1, 0, 0, 1]));
        assert!(Polynomial::interleave(&parts, 3).is_err());
    }

    #[test]
    fn json_is_integer_array() {
        let q = p(&[2, 0, 1]);
        assert_eq!(serde_json::to_string(&q).unwrap(), "[2,0,1]");
        let back: Polynomial = serde_json::from_str("[2,0,1,0]").unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[2, 1, 0, 3]).to_string(), "2 + x + 3x^3");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(0u32..5, 0..10).prop_map(Polynomial::from)
    }

    fn arb_nonzero() -> impl Strategy<Value = Polynomial> {
        arb_poly().prop_filter("non-zero", |p| !p.is_zero())
    }

    /// A polynomial `b` with `a ⪯ b`: same support ends, coefficients raised.
    fn dominating(a: &Polynomial, bumps: &[u32]) -> Polynomial {
        let (lo, hi) = a.degree_bounds().unwrap();
        let coeffs: Vec<u32> = (0..=hi)
            .map(|i| {
                let c = a.coeff(i);
                if i < lo {
                    0
                } else {
                    c + bumps.get(i).copied().unwrap_or(0)
                }
            })
            .collect();
        coeffs.into()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn split_interleave_round_trip(q in arb_poly(), jprime in 1usize..5) {
            let parts = q.modulo_split(jprime).unwrap();
            prop_assert_eq!(parts.len(), jprime);
            prop_assert_eq!(Polynomial::interleave(&parts, jprime).unwrap(), q);
        }

        #[test]
        fn boundary_dominated(q in arb_nonzero()) {
            prop_assert!(q.boundary().unwrap().precedes(&q));
        }

        #[test]
        fn order_preserved_by_sum_and_product(
            a in arb_nonzero(), c in arb_nonzero(),
            bump_a in prop::collection::vec(0u32..3, 10),
            bump_c in prop::collection::vec(0u32..3, 10),
        ) {
            let b = dominating(&a, &bump_a);
            let d = dominating(&c, &bump_c);
            prop_assert!(a.precedes(&b));
            prop_assert!(c.precedes(&d));
            prop_assert!(a.sum(&c).unwrap().precedes(&b.sum(&d).unwrap()));
            prop_assert!(a.product(&c).unwrap().precedes(&b.product(&d).unwrap()));
        }

        #[test]
        fn eval_one_is_additive(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.sum(&b).unwrap().eval_one(), a.eval_one() + b.eval_one());
            prop_assert_eq!(a.product(&b).unwrap().eval_one(), a.eval_one() * b.eval_one());
        }
    }
}
