//! Free associative algebra `A(X)` over sort-1 letters, its multigrading, the
//! consequence closure of module identities and the truncated quotient `A/S`.
//!
//! # Consequence closure
//!
//! The ideal `S` of a set of identities is the smallest two-sided ideal that
//! contains every identity and is stable under substituting letters by Lie
//! elements. It is computed exactly, degree by degree:
//!
//! 1. every identity is split into polyhomogeneous components (scalar
//!    substitutions `y -> c*y` separate them over an infinite field);
//! 2. each component is fully linearized; in characteristic zero the
//!    linearization and the component generate the same substitution-closed
//!    space (restitution recovers the component up to `prod d_j!`);
//! 3. a multilinear polynomial is linear in each slot, so its substitution
//!    instances are spanned by instances whose slots are Lyndon basis elements;
//!    only tuples of total degree `<= cap` are needed;
//! 4. the span is closed under left and right multiplication by letters.
//!
//! The result is stable under Lie substitution because
//! `sigma(u * f(g) * v) = sigma(u) * f(sigma g) * sigma(v)` and `sigma(g_i)` is
//! again a Lie element, expanded multilinearly over the basis.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::field::{FieldDescriptor, FieldError, Scalar};
use crate::freelie::LyndonBasis;
use crate::linalg::{Echelon, LinComb};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeAlgError {
    #[error("cap {cap} is smaller than the generator degree {needed}")]
    CapTooSmall { needed: usize, cap: usize },
    #[error("degree {degree} exceeds the cap {cap}")]
    CapExceeded { degree: usize, cap: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Monomial of the free associative algebra: letter indices, `0` meaning `x1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn unit() -> Word {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Word {
        Word(vec![i as u8])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Per-letter counts over an alphabet of size `n`.
    pub fn multidegree(&self, n: usize) -> Vec<u32> {
        let width = n.max(self.0.iter().map(|&l| l as usize + 1).max().unwrap_or(0));
        let mut out = vec![0; width];
        for &l in &self.0 {
            out[l as usize] += 1;
        }
        out
    }

    /// Largest letter index plus one.
    pub fn alphabet_width(&self) -> usize {
        self.0.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    /// All words of length `n` over `alphabet` letters, in increasing order.
    pub fn all_of_degree(alphabet: usize, n: usize) -> Vec<Word> {
        let mut out = vec![Word::unit()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * alphabet);
            for w in &out {
                for l in 0..alphabet {
                    let mut v = w.0.clone();
                    v.push(l as u8);
                    next.push(Word(v));
                }
            }
            out = next;
        }
        if alphabet == 0 && n > 0 {
            return Vec::new();
        }
        out
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then lexicographic with `x1 < x2 < ...`.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|l| format!("x{}", l + 1)).collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub type NCPoly = LinComb<Word>;

/// Writes `sum c * key` in the term grammar, parenthesising irrational coefficients.
pub fn format_lincomb<K: Ord + Clone>(
    f: &LinComb<K>,
    key: impl Fn(&K) -> (String, bool),
) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (k, c)) in f.iter().enumerate() {
        let (name, is_unit) = key(k);
        let (neg, mag) = if c.is_rational() && c.rational_part() < &num_rational::BigRational::from_integer(0.into()) {
            (true, -c)
        } else {
            (false, c.clone())
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff = if mag.is_rational() {
            mag.to_string()
        } else {
            format!("({mag})")
        };
        if is_unit {
            out.push_str(&coeff);
        } else if mag.is_one() {
            out.push_str(&name);
        } else {
            out.push_str(&format!("{coeff}*{name}"));
        }
    }
    out
}

impl fmt::Display for LinComb<Word> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            format_lincomb(self, |w| (w.to_string(), w.degree() == 0))
        )
    }
}

impl LinComb<Word> {
    pub fn one() -> NCPoly {
        LinComb::monomial(Word::unit())
    }

    pub fn constant(c: Scalar) -> NCPoly {
        LinComb::term(Word::unit(), c)
    }

    /// The letter `x_{i+1}`.
    pub fn letter(i: usize) -> NCPoly {
        LinComb::monomial(Word::letter(i))
    }

    pub fn word(w: &[u8]) -> NCPoly {
        LinComb::monomial(Word(w.to_vec()))
    }

    /// Highest word length, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.keys().map(|w| w.degree()).max()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.keys().map(|w| w.degree()).min()
    }

    pub fn alphabet_width(&self) -> usize {
        self.keys().map(|w| w.alphabet_width()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &NCPoly) -> NCPoly {
        self.mul_truncated(other, usize::MAX)
    }

    /// Product with every word longer than `cap` dropped.
    pub fn mul_truncated(&self, other: &NCPoly, cap: usize) -> NCPoly {
        let mut out = NCPoly::zero();
        for (u, a) in self.iter() {
            for (v, b) in other.iter() {
                if u.degree() + v.degree() <= cap {
                    out.add_term(u.concat(v), a * b);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &NCPoly) -> NCPoly {
        &self.mul(other) - &other.mul(self)
    }

    pub fn commutator_truncated(&self, other: &NCPoly, cap: usize) -> NCPoly {
        &self.mul_truncated(other, cap) - &other.mul_truncated(self, cap)
    }

    pub fn pow(&self, n: u32) -> NCPoly {
        let mut acc = NCPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drops every word longer than `cap`.
    pub fn truncate(&self, cap: usize) -> NCPoly {
        self.filter(|w| w.degree() <= cap)
    }

    pub fn homogeneous_part(&self, n: usize) -> NCPoly {
        self.filter(|w| w.degree() == n)
    }

    /// Substitutes `x_{i+1} -> images[i]`, dropping words longer than `cap`.
    /// Letters without an image are kept.
    pub fn substitute(&self, images: &[NCPoly], cap: usize) -> NCPoly {
        let mut cache: HashMap<Vec<u8>, NCPoly> = HashMap::new();
        let mut out = NCPoly::zero();
        for (w, c) in self.iter() {
            let img = substitute_word(w.letters(), images, cap, &mut cache);
            out.add_scaled(&img, c);
        }
        out
    }

    /// Applies a function to every coefficient (e.g. a field automorphism).
    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> NCPoly {
        self.map_coeffs(|_, c| f(c))
    }

    /// Multidegree when all words share one, over an alphabet of size `n`.
    pub fn multidegree(&self, n: usize) -> Option<Vec<u32>> {
        let mut it = self.keys().map(|w| w.multidegree(n));
        let first = it.next()?;
        if it.all(|m| m == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_polyhomogeneous(&self) -> bool {
        let n = self.alphabet_width();
        self.is_zero() || self.multidegree(n).is_some()
    }

    /// Unique decomposition into multihomogeneous parts.
    pub fn polyhomogeneous_components(&self, n: usize) -> BTreeMap<Vec<u32>, NCPoly> {
        let n = n.max(self.alphabet_width());
        let mut out: BTreeMap<Vec<u32>, NCPoly> = BTreeMap::new();
        for (w, c) in self.iter() {
            out.entry(w.multidegree(n))
                .or_default()
                .add_term(w.clone(), c.clone());
        }
        out
    }

    /// Field generated by the coefficients.
    pub fn field(&self) -> Result<FieldDescriptor, FieldError> {
        FieldDescriptor::spanned_by(self.coefficients())
    }
}

fn substitute_word(
    letters: &[u8],
    images: &[NCPoly],
    cap: usize,
    cache: &mut HashMap<Vec<u8>, NCPoly>,
) -> NCPoly {
    if letters.is_empty() {
        return NCPoly::one();
    }
    if let Some(v) = cache.get(letters) {
        return v.clone();
    }
    let (head, last) = letters.split_at(letters.len() - 1);
    let prefix = substitute_word(head, images, cap, cache);
    let l = last[0] as usize;
    let img = if l < images.len() {
        images[l].clone()
    } else {
        NCPoly::letter(l)
    };
    let out = prefix.mul_truncated(&img, cap);
    cache.insert(letters.to_vec(), out.clone());
    out
}

/// Images of many words under one substitution, sharing prefix products.
pub struct Substituter<'a> {
    images: &'a [NCPoly],
    cap: usize,
    cache: HashMap<Vec<u8>, NCPoly>,
}

impl<'a> Substituter<'a> {
    pub fn new(images: &'a [NCPoly], cap: usize) -> Self {
        Substituter {
            images,
            cap,
            cache: HashMap::new(),
        }
    }

    pub fn word(&mut self, w: &Word) -> NCPoly {
        substitute_word(w.letters(), self.images, self.cap, &mut self.cache)
    }

    pub fn poly(&mut self, f: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in f.iter() {
            let img = self.word(w);
            out.add_scaled(&img, c);
        }
        out
    }
}

/// Full linearization of a multihomogeneous polynomial: each variable of
/// degree `d` is split into `d` fresh variables and the multilinear part kept.
/// Returns the multilinear polynomial and its number of slots.
pub fn full_linearization(component: &NCPoly) -> (NCPoly, usize) {
    let Some((first, _)) = component.leading() else {
        return (NCPoly::zero(), 0);
    };
    let md = first.multidegree(component.alphabet_width());
    // fresh slot ranges per original variable
    let mut offsets = Vec::with_capacity(md.len());
    let mut total = 0usize;
    for &d in &md {
        offsets.push(total);
        total += d as usize;
    }
    let mut out = NCPoly::zero();
    for (w, c) in component.iter() {
        // assign fresh slots to the occurrences of each variable in every order
        let mut partial: Vec<Vec<u8>> = vec![Vec::new()];
        let mut used: Vec<Vec<Vec<bool>>> = vec![md.iter().map(|&d| vec![false; d as usize]).collect()];
        for &l in w.letters() {
            let v = l as usize;
            let mut np = Vec::new();
            let mut nu = Vec::new();
            for (p, u) in partial.iter().zip(used.iter()) {
                for j in 0..md[v] as usize {
                    if !u[v][j] {
                        let mut p2 = p.clone();
                        p2.push((offsets[v] + j) as u8);
                        let mut u2 = u.clone();
                        u2[v][j] = true;
                        np.push(p2);
                        nu.push(u2);
                    }
                }
            }
            partial = np;
            used = nu;
        }
        for p in partial {
            out.add_term(Word(p), c.clone());
        }
    }
    (out, total)
}

/// Polyhomogeneous basis of the ideal `S` up to a degree cap, one echelon per
/// multidegree.
#[derive(Clone, Debug)]
pub struct GradedIdealBasis {
    alphabet_size: usize,
    cap: usize,
    components: BTreeMap<Vec<u32>, Echelon<Word>>,
}

impl GradedIdealBasis {
    pub fn empty(alphabet_size: usize, cap: usize) -> Self {
        GradedIdealBasis {
            alphabet_size,
            cap,
            components: BTreeMap::new(),
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn md(&self, w: &Word) -> Vec<u32> {
        w.multidegree(self.alphabet_size)
    }

    /// Inserts a polyhomogeneous element; returns whether the span grew.
    fn insert_homogeneous(&mut self, f: NCPoly) -> Option<NCPoly> {
        let md = self.md(f.leading()?.0);
        let e = self.components.entry(md).or_default();
        let r = e.reduce(&f);
        if r.is_zero() {
            None
        } else {
            e.insert(r.clone());
            Some(r)
        }
    }

    /// Dimension of the degree-`n` component.
    pub fn dim_degree(&self, n: usize) -> usize {
        self.components
            .iter()
            .filter(|(md, _)| md.iter().sum::<u32>() as usize == n)
            .map(|(_, e)| e.rank())
            .sum()
    }

    /// Echelon rows of degree `n`, ordered by multidegree then pivot.
    pub fn degree_basis(&self, n: usize) -> Vec<NCPoly> {
        self.components
            .iter()
            .filter(|(md, _)| md.iter().sum::<u32>() as usize == n)
            .flat_map(|(_, e)| e.basis())
            .collect()
    }

    pub fn all_rows(&self) -> Vec<NCPoly> {
        (0..=self.cap).flat_map(|n| self.degree_basis(n)).collect()
    }

    pub fn is_pivot(&self, w: &Word) -> bool {
        self.components
            .get(&self.md(w))
            .map(|e| e.is_pivot(w))
            .unwrap_or(false)
    }

    /// Reduces modulo the ideal (words above the cap are left untouched).
    pub fn reduce(&self, f: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (md, part) in f.polyhomogeneous_components(self.alphabet_size) {
            match self.components.get(&md) {
                Some(e) => out.add_scaled(&e.reduce(&part), &Scalar::one()),
                None => out.add_scaled(&part, &Scalar::one()),
            }
        }
        out
    }

    pub fn contains(&self, f: &NCPoly) -> bool {
        self.reduce(&f.truncate(self.cap)).is_zero()
    }

    /// Whether every degree-`cap` word lies in the ideal, i.e. the truncation
    /// at the cap is exact.
    pub fn is_nilpotent_at_cap(&self) -> bool {
        self.dim_degree(self.cap) == self.alphabet_size.pow(self.cap as u32)
    }
}

/// Computes the graded ideal generated by `generators` as identities: closed
/// under Lie substitution and two-sided multiplication, up to degree `cap`.
pub fn consequence_closure(
    generators: &[NCPoly],
    alphabet_size: usize,
    cap: usize,
) -> Result<GradedIdealBasis, FreeAlgError> {
    for g in generators {
        g.field()?;
        if let Some(d) = g.degree() {
            if d > cap {
                return Err(FreeAlgError::CapTooSmall { needed: d, cap });
            }
        }
    }
    let lie = LyndonBasis::new(alphabet_size, cap);
    let mut ideal = GradedIdealBasis::empty(alphabet_size, cap);
    let mut queue: VecDeque<NCPoly> = VecDeque::new();

    let push = |ideal: &mut GradedIdealBasis, f: NCPoly, queue: &mut VecDeque<NCPoly>| {
        for (_, part) in f.polyhomogeneous_components(alphabet_size) {
            if let Some(r) = ideal.insert_homogeneous(part) {
                queue.push_back(r);
            }
        }
    };

    for g in generators {
        for (_, comp) in g.polyhomogeneous_components(0) {
            let (lin, slots) = full_linearization(&comp);
            if slots == 0 {
                push(&mut ideal, lin, &mut queue);
                continue;
            }
            let mut tuple: Vec<(usize, usize)> = Vec::new();
            let mut instances = Vec::new();
            enumerate_instances(&lin, slots, &lie, cap, 0, &mut tuple, &mut instances);
            for inst in instances {
                push(&mut ideal, inst, &mut queue);
            }
        }
    }

    while let Some(f) = queue.pop_front() {
        if f.degree().unwrap_or(0) >= cap {
            continue;
        }
        for l in 0..alphabet_size {
            let x = NCPoly::letter(l);
            push(&mut ideal, x.mul(&f), &mut queue);
            push(&mut ideal, f.mul(&x), &mut queue);
        }
    }
    Ok(ideal)
}

/// Enumerates `lin(b_1, ..., b_slots)` for Lyndon basis elements of total
/// degree at most `cap`.
fn enumerate_instances(
    lin: &NCPoly,
    slots: usize,
    lie: &LyndonBasis,
    budget: usize,
    used: usize,
    tuple: &mut Vec<(usize, usize)>,
    out: &mut Vec<NCPoly>,
) {
    if tuple.len() == slots {
        let images: Vec<NCPoly> = tuple
            .iter()
            .map(|&(d, i)| lie.degree(d)[i].iota.clone())
            .collect();
        let v = lin.substitute(&images, budget);
        if !v.is_zero() {
            out.push(v);
        }
        return;
    }
    let remaining_slots = slots - tuple.len() - 1;
    for d in 1..=budget {
        if used + d + remaining_slots > budget {
            break;
        }
        for i in 0..lie.degree(d).len() {
            tuple.push((d, i));
            enumerate_instances(lin, slots, lie, budget, used + d, tuple, out);
            tuple.pop();
        }
    }
}

/// Truncated quotient `A/S` with normal forms given by non-pivot words.
#[derive(Clone, Debug)]
pub struct QuotientAlgebra {
    ideal: GradedIdealBasis,
    normal: Vec<Vec<Word>>,
}

impl QuotientAlgebra {
    pub fn new(ideal: GradedIdealBasis) -> Self {
        let n = ideal.alphabet_size();
        let normal = (0..=ideal.cap())
            .map(|d| {
                Word::all_of_degree(n, d)
                    .into_iter()
                    .filter(|w| !ideal.is_pivot(w))
                    .collect()
            })
            .collect();
        QuotientAlgebra { ideal, normal }
    }

    /// Quotient by identities, see [`consequence_closure`].
    pub fn from_identities(
        identities: &[NCPoly],
        alphabet_size: usize,
        cap: usize,
    ) -> Result<Self, FreeAlgError> {
        Ok(Self::new(consequence_closure(identities, alphabet_size, cap)?))
    }

    pub fn ideal(&self) -> &GradedIdealBasis {
        &self.ideal
    }

    pub fn cap(&self) -> usize {
        self.ideal.cap()
    }

    pub fn alphabet_size(&self) -> usize {
        self.ideal.alphabet_size()
    }

    /// Canonical representative: words above the cap vanish, the rest is
    /// expressed in normal words.
    pub fn reduce(&self, f: &NCPoly) -> NCPoly {
        self.ideal.reduce(&f.truncate(self.cap()))
    }

    pub fn reduce_word(&self, w: &Word) -> NCPoly {
        self.reduce(&NCPoly::monomial(w.clone()))
    }

    pub fn mul(&self, f: &NCPoly, g: &NCPoly) -> NCPoly {
        self.reduce(&f.mul_truncated(g, self.cap()))
    }

    pub fn normal_basis(&self, n: usize) -> &[Word] {
        self.normal.get(n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn dim_component(&self, n: usize) -> Result<usize, FreeAlgError> {
        if n > self.cap() {
            return Err(FreeAlgError::CapExceeded {
                degree: n,
                cap: self.cap(),
            });
        }
        Ok(self.normal[n].len())
    }

    pub fn total_dim(&self) -> usize {
        self.normal.iter().map(|v| v.len()).sum()
    }

    /// All normal words, degree by degree.
    pub fn basis(&self) -> impl Iterator<Item = &Word> {
        self.normal.iter().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> NCPoly {
        NCPoly::letter(i)
    }

    fn degree_six_identity() -> NCPoly {
        NCPoly::word(&[0, 1, 2, 3, 4, 5])
    }

    #[test]
    fn noncommutative_product() {
        let a = x(0).mul(&x(1));
        let b = x(1).mul(&x(0));
        assert_eq!(a, NCPoly::word(&[0, 1]));
        assert_ne!(a, b);
        let c = &a - &b;
        assert_eq!(c.mul(&NCPoly::one()), c);
    }

    #[test]
    fn square_of_sum() {
        let s = &x(0) + &x(1);
        let sq = s.mul(&s);
        let expected = NCPoly::from_terms(
            [[0, 0], [0, 1], [1, 0], [1, 1]]
                .iter()
                .map(|w| (Word(w.to_vec()), Scalar::one())),
        );
        assert_eq!(sq, expected);
    }

    #[test]
    fn components() {
        let f = &x(0) + &NCPoly::word(&[0, 1]);
        let c = f.polyhomogeneous_components(2);
        assert_eq!(c.len(), 2);
        assert_eq!(c[&vec![1, 0]], x(0));
        assert_eq!(c[&vec![1, 1]], NCPoly::word(&[0, 1]));
        let g = (&x(0) + &x(1)).mul(&x(0));
        let c = g.polyhomogeneous_components(2);
        assert_eq!(c[&vec![2, 0]], NCPoly::word(&[0, 0]));
        assert_eq!(c[&vec![1, 1]], NCPoly::word(&[1, 0]));
        let sym = &NCPoly::word(&[0, 1]) + &NCPoly::word(&[1, 0]);
        assert_eq!(sym.polyhomogeneous_components(2).len(), 1);
    }

    #[test]
    fn word_order_is_deglex() {
        let mut ws = vec![Word(vec![1]), Word(vec![0, 0]), Word(vec![0]), Word::unit()];
        ws.sort();
        assert_eq!(ws, vec![Word::unit(), Word(vec![0]), Word(vec![1]), Word(vec![0, 0])]);
    }

    #[test]
    fn linearization_of_square() {
        let (lin, slots) = full_linearization(&NCPoly::word(&[0, 0]));
        assert_eq!(slots, 2);
        assert_eq!(lin, &NCPoly::word(&[0, 1]) + &NCPoly::word(&[1, 0]));
    }

    #[test]
    fn degree_six_closure_dimensions() {
        let ideal = consequence_closure(&[degree_six_identity()], 2, 6).unwrap();
        for n in 0..6 {
            assert_eq!(ideal.dim_degree(n), 0);
        }
        assert_eq!(ideal.dim_degree(6), 64);
        let q = QuotientAlgebra::new(ideal);
        assert_eq!(q.dim_component(5).unwrap(), 32);
        assert_eq!(q.dim_component(6).unwrap(), 0);
        assert_eq!(q.total_dim(), 63);
        assert!(matches!(
            q.dim_component(7),
            Err(FreeAlgError::CapExceeded { .. })
        ));
        let w = NCPoly::word(&[0, 1, 0]);
        assert_eq!(q.reduce(&w), w);
        assert!(q.reduce(&NCPoly::word(&[1, 1, 0, 1, 0, 0])).is_zero());
        assert!(q.reduce(&NCPoly::zero()).is_zero());
    }

    #[test]
    fn single_letter_identity() {
        let ideal = consequence_closure(&[x(0)], 2, 2).unwrap();
        assert_eq!(ideal.dim_degree(0), 0);
        assert_eq!(ideal.dim_degree(1), 2);
        assert_eq!(ideal.dim_degree(2), 4);
    }

    #[test]
    fn empty_closure() {
        let ideal = consequence_closure(&[], 2, 4).unwrap();
        assert!(ideal.all_rows().is_empty());
    }

    #[test]
    fn cap_too_small() {
        assert_eq!(
            consequence_closure(&[degree_six_identity()], 2, 5).unwrap_err(),
            FreeAlgError::CapTooSmall { needed: 6, cap: 5 }
        );
    }

    #[test]
    fn commutator_identity_gives_commutative_quotient() {
        // [y1, y2] = 0 as an identity: A/S is the polynomial ring
        let comm = x(0).commutator(&x(1));
        let q = QuotientAlgebra::from_identities(&[comm], 2, 4).unwrap();
        for n in 0..=4 {
            assert_eq!(q.dim_component(n).unwrap(), n + 1);
        }
    }

    #[test]
    fn substitution_truncates() {
        let f = NCPoly::word(&[0, 1]);
        let img = vec![&x(0) + &NCPoly::word(&[0, 1]), x(1)];
        let s = f.substitute(&img, 2);
        assert_eq!(s, NCPoly::word(&[0, 1]));
    }
}
