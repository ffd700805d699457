//! Free Lie algebra over sort-1 letters, carried by PBW images in `A(X)`.
//!
//! Basis: Lyndon words with their standard bracketing (split at the longest
//! proper Lyndon suffix). Lie equality is equality of associative images.

use std::fmt;

use thiserror::Error;

use crate::field::Scalar;
use crate::freealg::{NCPoly, Word};
use crate::linalg::{LinComb, TrackedEchelon};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeLieError {
    #[error("degree {degree} exceeds the cap {cap}")]
    CapExceeded { degree: usize, cap: usize },
    #[error("not a Lie element: {0}")]
    NotLie(String),
}

/// Whether `w` is strictly smaller than all its proper rotations.
pub fn is_lyndon(w: &[u8]) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    (1..n).all(|i| {
        let rot = w[i..].iter().chain(w[..i].iter());
        w.iter().lt(rot)
    })
}

/// All Lyndon words of length `1..=max_len` over `k` letters (Duval's
/// generation order), regrouped by length.
pub fn lyndon_words(k: usize, max_len: usize) -> Vec<Vec<Word>> {
    let mut by_len: Vec<Vec<Word>> = vec![Vec::new(); max_len + 1];
    if k == 0 || max_len == 0 {
        return by_len;
    }
    let mut w: Vec<u8> = vec![0];
    loop {
        by_len[w.len()].push(Word(w.clone()));
        let m = w.len();
        while w.len() < max_len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last as usize == k - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    for v in &mut by_len {
        v.sort();
    }
    by_len
}

/// Standard factorization `w = u v` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u8]) -> Option<(&[u8], &[u8])> {
    if w.len() < 2 {
        return None;
    }
    (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .map(|i| (&w[..i], &w[i..]))
}

fn letter_name(l: u8) -> String {
    format!("x{}", l + 1)
}

/// Bracket expression of the standard bracketing, e.g. `[x1,[x1,x2]]`.
pub fn standard_bracket_expr(w: &[u8]) -> String {
    match standard_factorization(w) {
        None => letter_name(w[0]),
        Some((u, v)) => format!(
            "[{},{}]",
            standard_bracket_expr(u),
            standard_bracket_expr(v)
        ),
    }
}

/// PBW image of the standard bracketing.
pub fn standard_bracket_iota(w: &[u8]) -> NCPoly {
    match standard_factorization(w) {
        None => NCPoly::letter(w[0] as usize),
        Some((u, v)) => standard_bracket_iota(u).commutator(&standard_bracket_iota(v)),
    }
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1i64;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Dimension of the degree-`n` part of the free Lie algebra on `r` letters.
pub fn witt_number(r: usize, n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let mut sum: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            sum += mobius(d) as i128 * (r as i128).pow((n / d) as u32);
        }
    }
    (sum / n as i128) as usize
}

#[derive(Clone, Debug)]
pub struct LyndonElement {
    pub word: Word,
    pub bracket: String,
    pub iota: NCPoly,
}

/// Lyndon basis up to a degree cap, with per-degree echelons of the images.
#[derive(Clone, Debug)]
pub struct LyndonBasis {
    alphabet_size: usize,
    cap: usize,
    by_degree: Vec<Vec<LyndonElement>>,
    echelons: Vec<TrackedEchelon<Word>>,
    independent: bool,
}

impl LyndonBasis {
    pub fn new(alphabet_size: usize, cap: usize) -> Self {
        let words = lyndon_words(alphabet_size, cap);
        let mut by_degree = Vec::with_capacity(cap + 1);
        let mut echelons = Vec::with_capacity(cap + 1);
        let mut independent = true;
        for ws in words {
            let mut e = TrackedEchelon::new();
            let elems: Vec<LyndonElement> = ws
                .into_iter()
                .map(|w| {
                    let iota = standard_bracket_iota(w.letters());
                    if e.insert(iota.clone()).is_err() {
                        independent = false;
                    }
                    LyndonElement {
                        bracket: standard_bracket_expr(w.letters()),
                        word: w,
                        iota,
                    }
                })
                .collect();
            by_degree.push(elems);
            echelons.push(e);
        }
        LyndonBasis {
            alphabet_size,
            cap,
            by_degree,
            echelons,
            independent,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Basis elements of degree `n` (empty beyond the cap).
    pub fn degree(&self, n: usize) -> &[LyndonElement] {
        self.by_degree.get(n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, n: usize) -> usize {
        self.degree(n).len()
    }

    pub fn counts(&self) -> Vec<usize> {
        (1..=self.cap).map(|n| self.count(n)).collect()
    }

    /// Rank of the images in degree `n`.
    pub fn rank(&self, n: usize) -> usize {
        self.echelons.get(n).map(|e| e.rank()).unwrap_or(0)
    }

    /// Images of each degree were linearly independent on construction.
    pub fn images_independent(&self) -> bool {
        self.independent
    }

    pub fn iter(&self) -> impl Iterator<Item = &LyndonElement> {
        self.by_degree.iter().flatten()
    }

    /// Number of basis elements of a given multidegree.
    pub fn multidegree_count(&self, md: &[u32]) -> usize {
        let n: u32 = md.iter().sum();
        self.degree(n as usize)
            .iter()
            .filter(|e| e.word.multidegree(md.len()) == md)
            .count()
    }

    /// Coordinates of `f` in the Lyndon basis, keyed by `(degree, index)`.
    pub fn coordinates(&self, f: &NCPoly) -> Result<LinComb<(usize, usize)>, FreeLieError> {
        let mut out = LinComb::zero();
        if let Some(d) = f.degree() {
            if d > self.cap {
                return Err(FreeLieError::CapExceeded {
                    degree: d,
                    cap: self.cap,
                });
            }
        }
        for n in 0..=self.cap {
            let part = f.homogeneous_part(n);
            if part.is_zero() {
                continue;
            }
            let combo = self
                .echelons
                .get(n)
                .and_then(|e| e.express(&part))
                .ok_or_else(|| FreeLieError::NotLie(f.to_string()))?;
            for (i, c) in combo.iter() {
                out.add_term((n, *i), c.clone());
            }
        }
        Ok(out)
    }

    /// Whether each homogeneous component lies in the span of the Lie images.
    pub fn is_lie_element(&self, f: &NCPoly) -> Result<bool, FreeLieError> {
        match self.coordinates(f) {
            Ok(_) => Ok(true),
            Err(FreeLieError::NotLie(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub fn element(&self, n: usize, i: usize) -> LieElement {
        let e = &self.degree(n)[i];
        LieElement {
            pbw: e.iota.clone(),
            expr: Some(e.bracket.clone()),
        }
    }

    /// Bracket with the cap enforced.
    pub fn bracket(&self, u: &LieElement, v: &LieElement) -> Result<LieElement, FreeLieError> {
        let d = u.degree().unwrap_or(0) + v.degree().unwrap_or(0);
        if !u.is_zero() && !v.is_zero() && d > self.cap {
            return Err(FreeLieError::CapExceeded {
                degree: d,
                cap: self.cap,
            });
        }
        Ok(u.bracket(v))
    }
}

/// Element of the free Lie algebra, stored as its PBW image.
#[derive(Clone, Debug)]
pub struct LieElement {
    pub pbw: NCPoly,
    pub expr: Option<String>,
}

impl PartialEq for LieElement {
    fn eq(&self, other: &Self) -> bool {
        self.pbw == other.pbw
    }
}

impl Eq for LieElement {}

impl LieElement {
    pub fn zero() -> Self {
        LieElement {
            pbw: NCPoly::zero(),
            expr: Some("0".into()),
        }
    }

    pub fn generator(i: usize) -> Self {
        LieElement {
            pbw: NCPoly::letter(i),
            expr: Some(letter_name(i as u8)),
        }
    }

    /// Wraps an image without checking it is Lie; see [`LyndonBasis::is_lie_element`].
    pub fn from_pbw(pbw: NCPoly) -> Self {
        LieElement { pbw, expr: None }
    }

    pub fn is_zero(&self) -> bool {
        self.pbw.is_zero()
    }

    pub fn degree(&self) -> Option<usize> {
        self.pbw.degree()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.pbw.min_degree()
    }

    pub fn bracket(&self, other: &LieElement) -> LieElement {
        LieElement {
            pbw: self.pbw.commutator(&other.pbw),
            expr: match (&self.expr, &other.expr) {
                (Some(a), Some(b)) => Some(format!("[{a},{b}]")),
                _ => None,
            },
        }
    }

    /// Bracket in `L / L_{>cap}`.
    pub fn bracket_truncated(&self, other: &LieElement, cap: usize) -> LieElement {
        LieElement {
            pbw: self.pbw.commutator_truncated(&other.pbw, cap),
            expr: None,
        }
    }

    pub fn scale(&self, c: &Scalar) -> LieElement {
        LieElement {
            pbw: self.pbw.scale(c),
            expr: None,
        }
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        LieElement {
            pbw: &self.pbw + &other.pbw,
            expr: None,
        }
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        LieElement {
            pbw: &self.pbw - &other.pbw,
            expr: None,
        }
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.expr {
            Some(e) => write!(f, "{e}"),
            None => write!(f, "{}", self.pbw),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lyndon_counts_two_letters() {
        let b = LyndonBasis::new(2, 6);
        assert_eq!(b.counts(), vec![2, 1, 2, 3, 6, 9]);
        let words: Vec<String> = (1..=3)
            .flat_map(|n| b.degree(n).iter().map(|e| e.word.to_string()))
            .collect();
        assert_eq!(words, vec!["x1", "x2", "x1*x2", "x1*x1*x2", "x1*x2*x2"]);
        for n in 1..=6 {
            assert_eq!(b.rank(n), witt_number(2, n));
        }
        assert!(b.images_independent());
    }

    #[test]
    fn one_letter_is_abelian() {
        let b = LyndonBasis::new(1, 5);
        assert_eq!(b.counts(), vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn witt_numbers() {
        assert_eq!(witt_number(2, 5), 6);
        assert_eq!(witt_number(3, 4), 18);
        assert_eq!(witt_number(2, 6), 9);
    }

    #[test]
    fn bracket_examples() {
        let x1 = LieElement::generator(0);
        let x2 = LieElement::generator(1);
        let c = x1.bracket(&x2);
        assert_eq!(c.pbw, &NCPoly::word(&[0, 1]) - &NCPoly::word(&[1, 0]));
        let cc = x1.bracket(&c);
        let expected = NCPoly::from_terms([
            (Word(vec![0, 0, 1]), Scalar::one()),
            (Word(vec![0, 1, 0]), Scalar::from_int(-2)),
            (Word(vec![1, 0, 0]), Scalar::one()),
        ]);
        assert_eq!(cc.pbw, expected);
        assert!(c.bracket(&c).is_zero());
        assert_eq!(cc.to_string(), "[x1,[x1,x2]]");
    }

    #[test]
    fn bracket_cap() {
        let b = LyndonBasis::new(2, 2);
        let x1 = LieElement::generator(0);
        let x2 = LieElement::generator(1);
        let c = b.bracket(&x1, &x2).unwrap();
        assert!(matches!(
            b.bracket(&x1, &c),
            Err(FreeLieError::CapExceeded { degree: 3, cap: 2 })
        ));
    }

    #[test]
    fn lie_membership() {
        let b = LyndonBasis::new(2, 5);
        let comm = &NCPoly::word(&[0, 1]) - &NCPoly::word(&[1, 0]);
        assert_eq!(b.is_lie_element(&comm), Ok(true));
        assert_eq!(b.is_lie_element(&NCPoly::word(&[0, 1])), Ok(false));
        assert!(b.is_lie_element(&NCPoly::word(&[0; 6])).is_err());
    }

    #[test]
    fn multidegree_32_has_dimension_two() {
        let b = LyndonBasis::new(2, 5);
        assert_eq!(b.multidegree_count(&[3, 2]), 2);
    }

    #[test]
    fn standard_factorizations() {
        assert_eq!(standard_bracket_expr(&[0, 0, 1]), "[x1,[x1,x2]]");
        assert_eq!(standard_bracket_expr(&[0, 1, 1]), "[[x1,x2],x2]");
        assert!(is_lyndon(&[0, 0, 1, 0, 1]));
        assert!(!is_lyndon(&[0, 1, 0]));
    }
}
