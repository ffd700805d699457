//! Commutative polynomials in finitely many parameters and bounded-degree
//! radical-membership certificates `Q^N = sum g_k P_k`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::Scalar;
use crate::linalg::{LinComb, TrackedEchelon};

/// Exponent vector with trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Monomial {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        Monomial(v)
    }

    pub fn from_exponents(mut e: Vec<u16>) -> Monomial {
        while e.last() == Some(&0) {
            e.pop();
        }
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        Monomial::from_exponents(
            (0..n)
                .map(|i| self.exponent(i) + other.exponent(i))
                .collect(),
        )
    }

    /// Weighted degree under per-variable weight vectors.
    pub fn weight(&self, weights: &[Vec<i64>]) -> Vec<i64> {
        let dim = weights.first().map(|w| w.len()).unwrap_or(0);
        let mut out = vec![0; dim];
        for (i, &e) in self.0.iter().enumerate() {
            for (o, w) in out.iter_mut().zip(&weights[i]) {
                *o += e as i64 * w;
            }
        }
        out
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded order: total degree first, then reverse exponent comparison so
/// that the first variable is the largest.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                let c = other.exponent(i).cmp(&self.exponent(i));
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

pub type MPoly = LinComb<Monomial>;

impl LinComb<Monomial> {
    pub fn constant(c: Scalar) -> MPoly {
        LinComb::term(Monomial::one(), c)
    }

    pub fn var(i: usize) -> MPoly {
        LinComb::monomial(Monomial::var(i))
    }

    pub fn total_degree(&self) -> usize {
        self.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (a, x) in self.iter() {
            for (b, y) in other.iter() {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MPoly {
        self.map_keys(|k| k.mul(m))
    }

    pub fn pow(&self, n: u32) -> MPoly {
        let mut acc = MPoly::constant(Scalar::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut out = Scalar::zero();
        for (m, c) in self.iter() {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = &t * &point[i].pow(e as u32);
                }
            }
            out += &t;
        }
        out
    }

    /// Single weight shared by all monomials, if any.
    pub fn homogeneous_weight(&self, weights: &[Vec<i64>]) -> Option<Vec<i64>> {
        let mut it = self.keys().map(|m| m.weight(weights));
        let first = it.next()?;
        if it.all(|w| w == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn format_with(&self, names: &[String]) -> String {
        crate::freealg::format_lincomb(self, |m| {
            let parts: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let n = names.get(i).cloned().unwrap_or_else(|| format!("p{i}"));
                    if e == 1 {
                        n
                    } else {
                        format!("{n}^{e}")
                    }
                })
                .collect();
            (parts.join("*"), m.degree() == 0)
        })
    }
}

impl fmt::Display for LinComb<Monomial> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with(&[]))
    }
}

/// Exponent-vector/coefficient form for serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerms(pub Vec<(Vec<u16>, Scalar)>);

impl From<&MPoly> for PolyTerms {
    fn from(p: &MPoly) -> Self {
        PolyTerms(
            p.iter()
                .map(|(m, c)| (m.exponents().to_vec(), c.clone()))
                .collect(),
        )
    }
}

impl From<&PolyTerms> for MPoly {
    fn from(p: &PolyTerms) -> Self {
        MPoly::from_terms(
            p.0.iter()
                .map(|(e, c)| (Monomial::from_exponents(e.clone()), c.clone())),
        )
    }
}

/// Certificate that `target^exponent = sum multipliers[k] * generators[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipProof {
    pub exponent: u32,
    pub multipliers: Vec<MPoly>,
}

impl MembershipProof {
    /// Re-checks the identity with exact arithmetic.
    pub fn verify(&self, target: &MPoly, generators: &[MPoly]) -> bool {
        if self.multipliers.len() != generators.len() {
            return false;
        }
        let mut rhs = MPoly::zero();
        for (g, p) in self.multipliers.iter().zip(generators) {
            rhs.add_scaled(&g.mul(p), &Scalar::one());
        }
        target.pow(self.exponent) == rhs
    }
}

/// Search limits for [`find_membership`].
#[derive(Clone, Debug)]
pub struct MembershipSearch {
    /// Bound on `deg(target^N)`; multipliers satisfy `deg g_k + deg P_k <= bound`.
    pub degree_bound: usize,
    /// Optional per-variable weights; used to restrict multipliers when every
    /// polynomial is weight-homogeneous.
    pub weights: Option<Vec<Vec<i64>>>,
    /// Maximal number of Macaulay rows.
    pub max_rows: usize,
}

impl MembershipSearch {
    pub fn new(degree_bound: usize) -> Self {
        MembershipSearch {
            degree_bound,
            weights: None,
            max_rows: 200_000,
        }
    }

    pub fn with_weights(mut self, weights: Vec<Vec<i64>>) -> Self {
        self.weights = Some(weights);
        self
    }
}

fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Monomial> {
    fn rec(i: usize, nvars: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i + 1 == nvars {
            cur.push(left as u16);
            out.push(Monomial::from_exponents(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u16);
            rec(i + 1, nvars, left - e, cur, out);
            cur.pop();
        }
    }
    if nvars == 0 {
        return if d == 0 { vec![Monomial::one()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(0, nvars, d, &mut Vec::new(), &mut out);
    out
}

/// Monomials whose weight is exactly `target` (weights must be nonnegative and
/// every variable must have a nonzero weight).
fn monomials_of_weight(weights: &[Vec<i64>], target: &[i64]) -> Vec<Monomial> {
    fn rec(
        i: usize,
        weights: &[Vec<i64>],
        left: &mut Vec<i64>,
        cur: &mut Vec<u16>,
        out: &mut Vec<Monomial>,
    ) {
        if left.iter().all(|&x| x == 0) {
            out.push(Monomial::from_exponents(cur.clone()));
            return;
        }
        if i == weights.len() {
            return;
        }
        let w = &weights[i];
        let mut e = 0u16;
        loop {
            cur.push(e);
            rec(i + 1, weights, left, cur, out);
            cur.pop();
            // take one more copy of variable i
            if left.iter().zip(w).any(|(l, x)| l - x < 0) {
                break;
            }
            for (l, x) in left.iter_mut().zip(w) {
                *l -= x;
            }
            e += 1;
            if w.iter().all(|&x| x == 0) {
                break;
            }
        }
        for (l, x) in left.iter_mut().zip(w) {
            *l += x * e as i64;
        }
    }
    if target.iter().any(|&t| t < 0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(0, weights, &mut target.to_vec(), &mut Vec::new(), &mut out);
    out
}

fn nvars_of(polys: &[&MPoly]) -> usize {
    polys
        .iter()
        .flat_map(|p| p.keys())
        .map(|m| m.exponents().len())
        .max()
        .unwrap_or(0)
}

/// Searches for `target^N = sum g_k * generators[k]` with `N >= 1` and
/// `deg target^N <= degree_bound`. Returns `None` when no certificate exists
/// within the bounds (which does not prove non-membership).
pub fn find_membership(
    target: &MPoly,
    generators: &[MPoly],
    search: &MembershipSearch,
) -> Option<MembershipProof> {
    if target.is_zero() {
        return Some(MembershipProof {
            exponent: 1,
            multipliers: vec![MPoly::zero(); generators.len()],
        });
    }
    let mut all: Vec<&MPoly> = generators.iter().collect();
    all.push(target);
    let nvars = nvars_of(&all);
    let tdeg = target.total_degree().max(1);

    let graded = search.weights.as_ref().filter(|w| {
        w.len() >= nvars
            && w.iter().take(nvars).all(|x| x.iter().all(|&c| c >= 0) && x.iter().any(|&c| c > 0))
            && all
                .iter()
                .all(|p| p.is_zero() || p.homogeneous_weight(w).is_some())
    });

    let mut n = 1u32;
    while (n as usize) * tdeg <= search.degree_bound.max(tdeg) {
        let goal = target.pow(n);
        let mut rows: Vec<(usize, Monomial)> = Vec::new();
        let mut overflow = false;
        for (k, p) in generators.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mons: Vec<Monomial> = match graded {
                Some(w) => {
                    let gw = goal.homogeneous_weight(w).expect("homogeneous");
                    let pw = p.homogeneous_weight(w).expect("homogeneous");
                    let diff: Vec<i64> = gw.iter().zip(&pw).map(|(a, b)| a - b).collect();
                    monomials_of_weight(&w[..nvars], &diff)
                        .into_iter()
                        .filter(|m| m.degree() + p.total_degree() <= search.degree_bound.max(goal.total_degree()))
                        .collect()
                }
                None => {
                    let top = search
                        .degree_bound
                        .max(goal.total_degree())
                        .saturating_sub(p.total_degree());
                    (0..=top)
                        .flat_map(|d| monomials_of_degree(nvars, d))
                        .collect()
                }
            };
            for m in mons {
                rows.push((k, m));
                if rows.len() > search.max_rows {
                    overflow = true;
                    break;
                }
            }
            if overflow {
                break;
            }
        }
        if overflow {
            return None;
        }
        let mut ech: TrackedEchelon<Monomial> = TrackedEchelon::new();
        for (k, m) in &rows {
            let _ = ech.insert(generators[*k].mul_monomial(m));
        }
        if let Some(combo) = ech.express(&goal) {
            let mut multipliers = vec![MPoly::zero(); generators.len()];
            for (idx, c) in combo.iter() {
                let (k, m) = &rows[*idx];
                multipliers[*k].add_term(m.clone(), c.clone());
            }
            let proof = MembershipProof {
                exponent: n,
                multipliers,
            };
            debug_assert!(proof.verify(target, generators));
            return Some(proof);
        }
        n += 1;
    }
    None
}

/// Parameter names and grading used to print and search certificates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterSpace {
    pub names: Vec<String>,
    pub weights: Vec<Vec<i64>>,
}

impl ParameterSpace {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn push(&mut self, name: String, weight: Vec<i64>) -> usize {
        self.names.push(name);
        self.weights.push(weight);
        self.names.len() - 1
    }

    pub fn index_of(&self) -> BTreeMap<String, usize> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MPoly {
        MPoly::var(i)
    }

    #[test]
    fn radical_membership() {
        // x^2 in (x^2): N = 1; x in (x^2) needs N = 2
        let g = vec![x(0).mul(&x(0))];
        let p = find_membership(&x(0), &g, &MembershipSearch::new(4)).unwrap();
        assert_eq!(p.exponent, 2);
        assert!(p.verify(&x(0), &g));
    }

    #[test]
    fn non_member_reports_none() {
        let g = vec![x(0).mul(&x(1))];
        assert!(find_membership(&x(0), &g, &MembershipSearch::new(6)).is_none());
    }

    #[test]
    fn graded_search_matches_plain() {
        // c*a and c*b generate; target c*(a+b)
        let (a, b, c) = (x(0), x(1), x(2));
        let g = vec![c.mul(&a), c.mul(&b)];
        let t = c.mul(&(&a + &b));
        let weights = vec![vec![1, 0], vec![1, 0], vec![0, 1]];
        let s = MembershipSearch::new(4).with_weights(weights);
        let p = find_membership(&t, &g, &s).unwrap();
        assert_eq!(p.exponent, 1);
        assert!(p.verify(&t, &g));
    }

    #[test]
    fn weight_enumeration() {
        let weights = vec![vec![1, 0], vec![0, 1]];
        let ms = monomials_of_weight(&weights, &[2, 1]);
        assert_eq!(ms, vec![Monomial::from_exponents(vec![2, 1])]);
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
    }

    #[test]
    fn eval_and_display() {
        let p = &x(0).mul(&x(0)) - &MPoly::constant(Scalar::from_int(2));
        assert!(p.eval(&[Scalar::sqrt(2)]).is_zero());
        assert_eq!(p.format_with(&["a".into()]), "-2 + a^2");
    }
}
