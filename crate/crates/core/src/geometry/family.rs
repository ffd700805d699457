//! The parameterized family of all homomorphisms `F -> H*_W`, truncated to
//! what can be seen on elements of degree `>= m`.
//!
//! A map is given by `x_i -> L_i` and `v_j -> h_j`. For a word `w` of length
//! `>= m` the image `a^|w| L_w h_j` only involves Lie components of degree
//! `<= top - m + 1` and module components of degree `<= top - m`, where `top`
//! is the highest nonzero module degree of the target: every letter adds at
//! least one to the degree. Higher components are dropped without changing
//! any image of degree `>= m`.

use std::collections::{BTreeMap, HashMap};
use crate::field::Scalar;
use crate::linalg::Echelon;
use crate::poly::{find_membership, MPoly, Monomial, MembershipSearch, ParameterSpace, PolyTerms};
use crate::representation::{ModKey, ModuleElement, Representation};
use crate::verbal::WordSystem;

use super::{ElementProof, GeometryError, Target};

type SymModule = BTreeMap<ModKey, MPoly>;

fn sym_add_scaled(out: &mut SymModule, key: &ModKey, p: &MPoly, c: &Scalar) {
    let e = out.entry(key.clone()).or_default();
    e.add_scaled(p, c);
    if e.is_zero() {
        out.remove(key);
    }
}

#[derive(Clone, Debug)]
struct LieParam {
    index: usize,
    action: BTreeMap<ModKey, ModuleElement>,
}

#[derive(Clone, Debug)]
pub struct ParameterizedFamily {
    pub params: ParameterSpace,
    /// Smallest degree the family is exact on.
    pub truncation: usize,
    pub lie_degree: usize,
    pub module_degree: Option<usize>,
    pub constraints: Vec<MPoly>,
    twist: WordSystem,
    tables: Vec<Vec<LieParam>>,
    module_params: Vec<Vec<(usize, ModKey)>>,
}

impl ParameterizedFamily {
    pub fn new(source: &Representation, target: &Target, system: &[ModuleElement], m: usize) -> Self {
        let h = &target.rep;
        let top = target.top_degree();
        let (n1s, n2s, n1t, n2t) = (source.n1(), source.n2(), h.n1(), h.n2());
        let wlen = n1s + n2s + n1t + n2t;
        let lie_degree = (top + 1).saturating_sub(m);
        let module_degree = top.checked_sub(m);
        let mut params = ParameterSpace::default();
        let mut lie_params = Vec::new();
        for i in 0..n1s {
            let mut v = Vec::new();
            for d in 1..=lie_degree.min(h.cap()) {
                for e in h.lie_basis().degree(d) {
                    let mut w = vec![0i64; wlen];
                    w[i] = 1;
                    for (k, x) in e.word.multidegree(n1t).into_iter().enumerate() {
                        w[n1s + n2s + k] += x as i64;
                    }
                    let idx = params.push(format!("a{}[{}]", i + 1, e.bracket), w);
                    v.push((idx, e.iota.clone()));
                }
            }
            lie_params.push(v);
        }
        let mut module_params = Vec::new();
        for j in 0..n2s {
            let mut v = Vec::new();
            if let Some(md) = module_degree {
                for key in h.module_basis() {
                    if key.degree() > md {
                        continue;
                    }
                    let mut w = vec![0i64; wlen];
                    w[n1s + j] = 1;
                    for (k, x) in key.word.multidegree(n1t).into_iter().enumerate() {
                        w[n1s + n2s + k] += x as i64;
                    }
                    w[n1s + n2s + n1t + key.gen] += 1;
                    let idx = params.push(format!("c{}[{}]", j + 1, key), w);
                    v.push((idx, key));
                }
            }
            module_params.push(v);
        }
        let tables: Vec<Vec<LieParam>> = lie_params
            .iter()
            .map(|ps| {
                ps.iter()
                    .map(|(index, iota)| LieParam {
                        index: *index,
                        action: h
                            .module_basis()
                            .into_iter()
                            .map(|k| {
                                let img = h.act_poly(iota, &ModuleElement::monomial(k.clone()));
                                (k, img)
                            })
                            .filter(|(_, v)| !v.is_zero())
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        let mut fam = ParameterizedFamily {
            params,
            truncation: m,
            lie_degree,
            module_degree,
            constraints: Vec::new(),
            twist: target.twist.clone(),
            tables,
            module_params,
        };
        let mut ech: Echelon<Monomial> = Echelon::new();
        for t in system {
            for p in fam.evaluate(t).into_values() {
                ech.insert(p);
            }
        }
        fam.constraints = ech.basis();
        fam
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.params.weights
    }

    pub fn constraint_degree(&self) -> usize {
        self.constraints.iter().map(|p| p.total_degree()).max().unwrap_or(0)
    }

    pub fn constraint_terms(&self) -> Vec<PolyTerms> {
        self.constraints.iter().map(PolyTerms::from).collect()
    }

    /// Coefficients of `mu(u)` as polynomials in the parameters, for `u` of degree `>= truncation`.
    pub fn evaluate(&self, u: &ModuleElement) -> SymModule {
        let tables = &self.tables;
        let mut memos: Vec<HashMap<Vec<u8>, SymModule>> = vec![HashMap::new(); self.module_params.len()];
        let mut out = SymModule::new();
        for (k, c) in u.iter() {
            if k.gen >= self.module_params.len() {
                continue;
            }
            let img = self.word_action(tables, k.word.letters(), k.gen, &mut memos[k.gen]);
            let coeff = &self.twist.phi.apply(c) * &self.twist.a.pow(k.degree() as u32);
            for (key, p) in &img {
                sym_add_scaled(&mut out, key, p, &coeff);
            }
        }
        out
    }

    fn word_action(
        &self,
        tables: &[Vec<LieParam>],
        w: &[u8],
        gen: usize,
        memo: &mut HashMap<Vec<u8>, SymModule>,
    ) -> SymModule {
        if let Some(v) = memo.get(w) {
            return v.clone();
        }
        let v = if w.is_empty() {
            self.module_params[gen]
                .iter()
                .map(|(idx, key)| (key.clone(), MPoly::var(*idx)))
                .collect()
        } else {
            let rest = self.word_action(tables, &w[1..], gen, memo);
            let mut out = SymModule::new();
            let letter = w[0] as usize;
            if letter < tables.len() {
                for (key, p) in &rest {
                    for lp in &tables[letter] {
                        if let Some(col) = lp.action.get(key) {
                            let q = p.mul(&MPoly::var(lp.index));
                            for (k2, c) in col.iter() {
                                sym_add_scaled(&mut out, k2, &q, c);
                            }
                        }
                    }
                }
            }
            out
        };
        memo.insert(w.to_vec(), v.clone());
        v
    }

    /// Radical-membership certificates showing every coefficient of `mu(u)`
    /// vanishes on all solutions.
    pub fn certify(&self, u: &ModuleElement, degree_bound: usize) -> Result<Vec<ElementProof>, GeometryError> {
        if u.min_degree().is_some_and(|d| d < self.truncation) {
            return Err(GeometryError::InvalidCertificate(format!(
                "{u} lies below the truncation degree {}",
                self.truncation
            )));
        }
        let search = MembershipSearch::new(degree_bound).with_weights(self.params.weights.clone());
        let mut proofs = Vec::new();
        let image = self.evaluate(u);
        if image.is_empty() {
            // the generic image vanishes identically
            proofs.push(ElementProof {
                element: u.to_string(),
                key: "0".into(),
                weight: None,
                target: PolyTerms(Vec::new()),
                exponent: 1,
                multipliers: vec![PolyTerms(Vec::new()); self.constraints.len()],
            });
        }
        for (key, p) in image {
            let proof = find_membership(&p, &self.constraints, &search).ok_or_else(|| {
                GeometryError::CertificationFailed {
                    degree_bound,
                    detail: format!("no certificate that the {key}-coefficient of the image of {u} vanishes"),
                }
            })?;
            proofs.push(ElementProof {
                element: u.to_string(),
                key: key.to_string(),
                weight: p.homogeneous_weight(&self.params.weights),
                target: PolyTerms::from(&p),
                exponent: proof.exponent,
                multipliers: proof.multipliers.iter().map(PolyTerms::from).collect(),
            });
        }
        Ok(proofs)
    }

    pub fn format(&self, p: &MPoly) -> String {
        p.format_with(&self.params.names)
    }
}
