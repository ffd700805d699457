//! Sparse exact linear algebra: linear combinations over ordered keys and a
//! fully reduced row-echelon form with first-key pivoting.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::field::Scalar;

/// Finite linear combination `sum c_k * k` with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, Scalar>,
}

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(key: K, c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(key, c);
        out
    }

    pub fn monomial(key: K) -> Self {
        Self::term(key, Scalar::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, Scalar)>) -> Self {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn terms(&self) -> &BTreeMap<K, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<K, Scalar> {
        self.terms
    }

    pub fn coeff(&self, key: &K) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn contains_key(&self, key: &K) -> bool {
        self.terms.contains_key(key)
    }

    /// Smallest key with its coefficient.
    pub fn leading(&self) -> Option<(&K, &Scalar)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, key: K, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &LinComb<K>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LinComb {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&K, &Scalar) -> Scalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (k.clone(), f(k, v))))
    }

    pub fn map_keys<K2: Ord + Clone>(&self, f: impl Fn(&K) -> K2) -> LinComb<K2> {
        LinComb::from_terms(self.terms.iter().map(|(k, v)| (f(k), v.clone())))
    }

    pub fn filter(&self, pred: impl Fn(&K) -> bool) -> Self {
        LinComb {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| pred(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Scale so that the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inv()),
            None => Self::zero(),
        }
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Scalar> {
        self.terms.values()
    }
}

impl<K: Ord + Clone> Add for &LinComb<K> {
    type Output = LinComb<K>;
    fn add(self, rhs: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl<K: Ord + Clone> Add for LinComb<K> {
    type Output = LinComb<K>;
    fn add(self, rhs: LinComb<K>) -> LinComb<K> {
        &self + &rhs
    }
}

impl<K: Ord + Clone> Sub for &LinComb<K> {
    type Output = LinComb<K>;
    fn sub(self, rhs: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

impl<K: Ord + Clone> Sub for LinComb<K> {
    type Output = LinComb<K>;
    fn sub(self, rhs: LinComb<K>) -> LinComb<K> {
        &self - &rhs
    }
}

impl<K: Ord + Clone> Neg for &LinComb<K> {
    type Output = LinComb<K>;
    fn neg(self) -> LinComb<K> {
        self.scale(&-Scalar::one())
    }
}

impl<K: Ord + Clone> Neg for LinComb<K> {
    type Output = LinComb<K>;
    fn neg(self) -> LinComb<K> {
        -&self
    }
}

/// Fully reduced row-echelon basis of a subspace. Each row is monic at its
/// pivot (its smallest key) and no row contains another row's pivot.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord> {
    rows: BTreeMap<K, LinComb<K>>,
}

impl<K: Ord> Default for Echelon<K> {
    fn default() -> Self {
        Echelon {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a>(vs: impl IntoIterator<Item = &'a LinComb<K>>) -> Self
    where
        K: 'a,
    {
        let mut e = Self::new();
        for v in vs {
            e.insert(v.clone());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn is_pivot(&self, k: &K) -> bool {
        self.rows.contains_key(k)
    }

    /// Rows ordered by pivot.
    pub fn basis(&self) -> Vec<LinComb<K>> {
        self.rows.values().cloned().collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &LinComb<K>> {
        self.rows.values()
    }

    /// Canonical representative of `v` modulo the span: no pivot key survives.
    pub fn reduce(&self, v: &LinComb<K>) -> LinComb<K> {
        let mut out = v.clone();
        let hits: Vec<(K, Scalar)> = v
            .iter()
            .filter(|(k, _)| self.rows.contains_key(k))
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        // rows are fully reduced, so subtracting one never creates another pivot
        for (k, c) in hits {
            out.add_scaled(&self.rows[&k], &-c);
        }
        out
    }

    pub fn contains(&self, v: &LinComb<K>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: LinComb<K>) -> bool {
        let r = self.reduce(&v);
        if r.is_zero() {
            return false;
        }
        self.insert_reduced(r);
        true
    }

    fn insert_reduced(&mut self, r: LinComb<K>) {
        let r = r.monic();
        let pivot = r.leading().map(|(k, _)| k.clone()).expect("nonzero");
        for row in self.rows.values_mut() {
            let c = row.coeff(&pivot);
            if !c.is_zero() {
                row.add_scaled(&r, &-c);
            }
        }
        self.rows.insert(pivot, r);
    }

    pub fn is_subspace_of(&self, other: &Echelon<K>) -> bool {
        self.rows.values().all(|r| other.contains(r))
    }

    pub fn same_span(&self, other: &Echelon<K>) -> bool {
        self.rank() == other.rank() && self.is_subspace_of(other)
    }

    /// Intersection of two spans (Zassenhaus-style via kernel relations).
    pub fn intersect(&self, other: &Echelon<K>) -> Echelon<K> {
        let mine = self.basis();
        let mut tracked: TrackedEchelon<K> = TrackedEchelon::new();
        for v in &mine {
            let _ = tracked.insert(v.clone());
        }
        let mut out = Echelon::new();
        for v in other.rows.values() {
            if let Err(relation) = tracked.insert(v.clone()) {
                // relation: sum over inputs = 0; the part supported on `mine` lies in both
                let mut w = LinComb::zero();
                for (idx, c) in relation.iter() {
                    if *idx < mine.len() {
                        w.add_scaled(&mine[*idx], c);
                    }
                }
                out.insert(w);
            }
        }
        out
    }

    /// Span of both.
    pub fn sum(&self, other: &Echelon<K>) -> Echelon<K> {
        let mut out = self.clone();
        for v in other.rows.values() {
            out.insert(v.clone());
        }
        out
    }

    /// Filter rows by a predicate on their pivots (for graded pieces).
    pub fn restrict(&self, pred: impl Fn(&K) -> bool) -> Echelon<K> {
        Echelon {
            rows: self
                .rows
                .iter()
                .filter(|(k, _)| pred(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

/// Echelon form that remembers how each row was built from the inserted inputs,
/// so dependent inputs yield explicit linear relations.
#[derive(Clone, Debug)]
pub struct TrackedEchelon<K: Ord> {
    rows: BTreeMap<K, (LinComb<K>, LinComb<usize>)>,
    inserted: usize,
}

impl<K: Ord> Default for TrackedEchelon<K> {
    fn default() -> Self {
        TrackedEchelon {
            rows: BTreeMap::new(),
            inserted: 0,
        }
    }
}

impl<K: Ord + Clone> TrackedEchelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduce `v`, returning the remainder and the combination of inputs that
    /// was subtracted (`v - remainder = sum combo_i * input_i`).
    pub fn reduce(&self, v: &LinComb<K>) -> (LinComb<K>, LinComb<usize>) {
        let mut out = v.clone();
        let mut combo = LinComb::zero();
        let hits: Vec<(K, Scalar)> = v
            .iter()
            .filter(|(k, _)| self.rows.contains_key(k))
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        for (k, c) in hits {
            let (row, rc) = &self.rows[&k];
            out.add_scaled(row, &-c.clone());
            combo.add_scaled(rc, &c);
        }
        (out, combo)
    }

    /// Inserts input number `self.inserted()`. On dependence returns the
    /// relation `sum r_i * input_i = 0` (with coefficient 1 on the new input).
    pub fn insert(&mut self, v: LinComb<K>) -> Result<(), LinComb<usize>> {
        let idx = self.inserted;
        self.inserted += 1;
        let (r, combo) = self.reduce(&v);
        let mut own = LinComb::monomial(idx);
        own.add_scaled(&combo, &-Scalar::one());
        if r.is_zero() {
            return Err(own);
        }
        let lead = r.leading().map(|(_, c)| c.inv()).expect("nonzero");
        let r = r.scale(&lead);
        let own = own.scale(&lead);
        let pivot = r.leading().map(|(k, _)| k.clone()).expect("nonzero");
        for (row, rc) in self.rows.values_mut() {
            let c = row.coeff(&pivot);
            if !c.is_zero() {
                row.add_scaled(&r, &-c.clone());
                rc.add_scaled(&own, &-c);
            }
        }
        self.rows.insert(pivot, (r, own));
        Ok(())
    }

    /// If `v` is in the span, the coefficients expressing it in the inputs.
    pub fn express(&self, v: &LinComb<K>) -> Option<LinComb<usize>> {
        let (r, combo) = self.reduce(v);
        if r.is_zero() {
            Some(combo)
        } else {
            None
        }
    }

    pub fn echelon(&self) -> Echelon<K> {
        Echelon {
            rows: self
                .rows
                .iter()
                .map(|(k, (r, _))| (k.clone(), r.clone()))
                .collect(),
        }
    }
}

/// Basis of the relations `sum c_i * vs[i] = 0`.
pub fn nullspace<K: Ord + Clone>(vs: &[LinComb<K>]) -> Vec<LinComb<usize>> {
    let mut t = TrackedEchelon::new();
    let mut out = Vec::new();
    for v in vs {
        if let Err(rel) = t.insert(v.clone()) {
            out.push(rel);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(terms: &[(u32, i64)]) -> LinComb<u32> {
        LinComb::from_terms(terms.iter().map(|&(k, c)| (k, Scalar::from_int(c))))
    }

    #[test]
    fn zero_coefficients_dropped() {
        let a = v(&[(1, 2), (2, 3)]);
        let b = v(&[(1, -2)]);
        let s = &a + &b;
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&2), Scalar::from_int(3));
    }

    #[test]
    fn echelon_rank_and_reduce() {
        let mut e = Echelon::new();
        assert!(e.insert(v(&[(1, 1), (2, 1)])));
        assert!(e.insert(v(&[(2, 1), (3, 1)])));
        assert!(!e.insert(v(&[(1, 1), (3, -1)])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&v(&[(1, 2), (2, 4), (3, 2)])));
        assert!(!e.contains(&v(&[(3, 1)])));
        let r = e.reduce(&v(&[(1, 1)]));
        assert!(r.keys().all(|k| !e.is_pivot(k)));
    }

    #[test]
    fn tracked_relations_hold() {
        let inputs = vec![v(&[(1, 1), (2, 1)]), v(&[(2, 1)]), v(&[(1, 3), (2, 5)])];
        let rels = nullspace(&inputs);
        assert_eq!(rels.len(), 1);
        let mut sum = LinComb::zero();
        for (i, c) in rels[0].iter() {
            sum.add_scaled(&inputs[*i], c);
        }
        assert!(sum.is_zero());
    }

    #[test]
    fn express_reconstructs() {
        let inputs = vec![v(&[(1, 1), (2, 1)]), v(&[(2, 1), (3, 2)])];
        let mut t = TrackedEchelon::new();
        for x in &inputs {
            t.insert(x.clone()).unwrap();
        }
        let target = v(&[(1, 2), (2, 5), (3, 6)]);
        let combo = t.express(&target).unwrap();
        let mut sum = LinComb::zero();
        for (i, c) in combo.iter() {
            sum.add_scaled(&inputs[*i], c);
        }
        assert_eq!(sum, target);
    }

    #[test]
    fn intersection_of_planes() {
        let a = Echelon::from_vectors(&[v(&[(1, 1)]), v(&[(2, 1)])]);
        let b = Echelon::from_vectors(&[v(&[(2, 1)]), v(&[(3, 1)])]);
        let i = a.intersect(&b);
        assert_eq!(i.rank(), 1);
        assert!(i.contains(&v(&[(2, 1)])));
        let c = Echelon::from_vectors(&[v(&[(1, 1), (3, 1)])]);
        assert_eq!(a.intersect(&c).rank(), 0);
    }
}
