//! Named ensembles C1 through C8.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::protograph::Ensemble;

pub const NAMES: [&str; 8] = ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8"];

fn pair(a: &[u32], b: &[u32], ms: usize, l: usize, label: &str) -> Result<Ensemble> {
    Ensemble::new(vec![Polynomial::from(a), Polynomial::from(b)], 1, 2, ms, l)
        .map(|e| e.with_label(label))
}

/// Look up a preset by name (case-insensitive) at termination length `l`.
pub fn preset(name: &str, l: usize) -> Result<Ensemble> {
    let upper = name.to_ascii_uppercase();
    match upper.as_str() {
        "C1" => pair(&[1, 1, 1], &[1, 1, 1], 2, l, "C1"),
        "C2" => pair(&[2, 0, 1], &[2, 1], 2, l, "C2"),
        "C3" => pair(&[2, 1], &[2, 1], 1, l, "C3"),
        "C4" => pair(&[3, 3], &[3, 3], 1, l, "C4"),
        "C5" => pair(&[2, 2], &[2, 2], 1, l, "C5"),
        "C6" => pair(&[2, 4], &[2, 4], 1, l, "C6"),
        "C7" => pair(&[2, 2, 2], &[2, 2, 2], 2, l, "C7"),
        "C8" => c8(l),
        _ => Err(Error::Config(format!("unknown preset {name}; expected one of {NAMES:?}"))),
    }
}

/// `J' = 2` ensemble interleaving `{1+x^3, 1+x^2, 1+x}` with `{1+x^3}` three times.
fn c8(l: usize) -> Result<Ensemble> {
    let p0 = [&[1, 0, 0, 1][..], &[1, 0, 1], &[1, 1]];
    let p1 = Polynomial::from(&[1, 0, 0, 1][..]);
    let polys = p0
        .iter()
        .map(|c| Polynomial::interleave(&[Polynomial::from(*c), p1.clone()], 2))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(polys, 2, 3, 3, l).map(|e| e.with_label("C8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build_and_are_regular() {
        for name in NAMES {
            let e = preset(name, 30).unwrap();
            assert!(e.regularity().regular, "{name}");
            assert_eq!(e.label(), name);
        }
        assert!(preset("c9", 10).is_err());
        assert_eq!(preset("c2", 10).unwrap().label(), "C2");
    }

    #[test]
    fn c8_polynomials() {
        let e = preset("C8", 10).unwrap();
        let want: Vec<Polynomial> = [
            vec![1, 1, 0, 0, 0, 0, 1, 1],
            vec![1, 1, 0, 0, 1, 0, 0, 1],
            vec![1, 1, 1, 0, 0, 0, 0, 1],
        ]
        .into_iter()
        .map(Polynomial::from)
        .collect();
        assert_eq!(e.polys(), want.as_slice());
        assert_eq!((e.j(), e.k()), (Some(4), Some(6)));
    }
}
