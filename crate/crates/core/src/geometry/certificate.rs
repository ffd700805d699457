use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::freelie::LieElement;
use crate::linalg::Echelon;
use crate::poly::{MPoly, MembershipProof, ParameterSpace, PolyTerms};
use crate::representation::{Homomorphism, ModKey, ModuleElement, Representation, VarietyDescriptor};
use crate::term::{parse_module, parse_poly, TermContext};
use crate::verbal::WordSystem;

use super::{graded_core, is_polyhomogeneous, module_kernel, Evaluator, GeometryError, ParameterizedFamily, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureKind {
    Closed,
    NotClosed,
}

/// A concrete solution, written in the term grammar of the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub lie_images: Vec<String>,
    pub module_images: Vec<String>,
}

impl SampleRecord {
    pub fn from_hom(mu: &Homomorphism) -> Self {
        SampleRecord {
            lie_images: mu.lie_images.iter().map(|l| l.pbw.to_string()).collect(),
            module_images: mu.module_images.iter().map(|m| m.to_string()).collect(),
        }
    }
}

/// `target^exponent = sum multipliers[k] * constraints[k]`, where `target` is
/// the `key`-coefficient of the image of `element` under the generic solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementProof {
    pub element: String,
    pub key: String,
    pub weight: Option<Vec<i64>>,
    pub target: PolyTerms,
    pub exponent: u32,
    pub multipliers: Vec<PolyTerms>,
}

/// Everything needed to re-check a closure computation from scratch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureCertificate {
    pub kind: ClosureKind,
    /// For `NotClosed`: whether `congruence` is the whole closure (every new
    /// element certified) or just the tested congruence plus one witness.
    pub complete: bool,
    pub source_n1: usize,
    pub source_n2: usize,
    pub target_n1: usize,
    pub target_n2: usize,
    /// Basis of the relations `V` with `H = F / V`.
    pub target_relations: Vec<String>,
    pub twist: WordSystem,
    pub system: Vec<String>,
    /// Basis of the closure (or of the tested congruence, see `complete`).
    pub congruence: Vec<String>,
    /// Solutions whose kernels cut out the closure from above.
    pub samples: Vec<SampleRecord>,
    pub witness: Option<String>,
    pub truncation: usize,
    pub lie_degree: usize,
    pub module_degree: Option<usize>,
    pub degree_bound: Option<usize>,
    pub params: ParameterSpace,
    pub constraints: Vec<PolyTerms>,
    pub proofs: Vec<ElementProof>,
}

fn invalid(msg: impl Into<String>) -> GeometryError {
    GeometryError::InvalidCertificate(msg.into())
}

fn strings(v: &[ModuleElement]) -> Vec<String> {
    v.iter().map(|u| u.to_string()).collect()
}

impl ClosureCertificate {
    fn base(source: &Representation, target: &Target, system: &[ModuleElement], kind: ClosureKind) -> Self {
        ClosureCertificate {
            kind,
            complete: true,
            source_n1: source.n1(),
            source_n2: source.n2(),
            target_n1: target.rep.n1(),
            target_n2: target.rep.n2(),
            target_relations: strings(&target.rep.submodule().basis()),
            twist: target.twist.clone(),
            system: strings(system),
            congruence: Vec::new(),
            samples: Vec::new(),
            witness: None,
            truncation: 0,
            lie_degree: 0,
            module_degree: None,
            degree_bound: None,
            params: ParameterSpace::default(),
            constraints: Vec::new(),
            proofs: Vec::new(),
        }
    }

    pub(super) fn closed(
        source: &Representation,
        target: &Target,
        system: &[ModuleElement],
        closure: &Echelon<ModKey>,
        samples: Vec<SampleRecord>,
    ) -> Self {
        let mut c = Self::base(source, target, system, ClosureKind::Closed);
        c.congruence = strings(&graded_basis(closure, source.n1()));
        c.samples = samples;
        c
    }

    #[allow(clippy::too_many_arguments)]
    pub(super) fn not_closed(
        source: &Representation,
        target: &Target,
        system: &[ModuleElement],
        closure: &Echelon<ModKey>,
        samples: Vec<SampleRecord>,
        witness: ModuleElement,
        family: &ParameterizedFamily,
        degree_bound: usize,
        proofs: Vec<ElementProof>,
        complete: bool,
    ) -> Self {
        let mut c = Self::base(source, target, system, ClosureKind::NotClosed);
        c.complete = complete;
        c.congruence = strings(&graded_basis(closure, source.n1()));
        c.samples = samples;
        c.witness = Some(witness.to_string());
        c.truncation = family.truncation;
        c.lie_degree = family.lie_degree;
        c.module_degree = family.module_degree;
        c.degree_bound = Some(degree_bound);
        c.params = family.params.clone();
        c.constraints = family.constraint_terms();
        c.proofs = proofs;
        c
    }

    pub fn is_closed(&self) -> bool {
        self.kind == ClosureKind::Closed
    }

    /// Rebuilds source and target and re-checks every claim with exact arithmetic.
    pub fn verify(&self, variety: &VarietyDescriptor) -> Result<(), GeometryError> {
        let source = Arc::new(Representation::free(variety, self.source_n1, self.source_n2)?);
        let sctx = TermContext::new(self.source_n1, self.source_n2);
        let tctx = TermContext::new(self.target_n1, self.target_n2);
        let free_t = Arc::new(Representation::free(variety, self.target_n1, self.target_n2)?);
        let rels = self
            .target_relations
            .iter()
            .map(|s| parse_module(s, tctx))
            .collect::<Result<Vec<_>, _>>()?;
        let rep = if rels.is_empty() {
            free_t
        } else {
            free_t.quotient(&rels)?.0
        };
        let target = Target::twisted(rep, self.twist.clone())?;
        let parse_all = |v: &[String]| -> Result<Vec<ModuleElement>, GeometryError> {
            v.iter()
                .map(|s| Ok(source.reduce_module(&parse_module(s, sctx)?)))
                .collect()
        };
        let system = parse_all(&self.system)?;
        let cong = Echelon::from_vectors(&parse_all(&self.congruence)?);
        let lower = source.generated_submodule(&system);
        let graded = system.iter().all(|u| is_polyhomogeneous(u, source.n1()));

        // upper bound from the recorded solutions
        let mut upper = Echelon::from_vectors(
            &source.module_basis().into_iter().map(ModuleElement::monomial).collect::<Vec<_>>(),
        );
        for (i, s) in self.samples.iter().enumerate() {
            let lie = s
                .lie_images
                .iter()
                .map(|x| Ok(LieElement::from_pbw(parse_poly(x, tctx)?)))
                .collect::<Result<Vec<_>, GeometryError>>()?;
            let hs = s
                .module_images
                .iter()
                .map(|x| Ok(parse_module(x, tctx)?))
                .collect::<Result<Vec<_>, GeometryError>>()?;
            let mu = Homomorphism::twisted(source.clone(), target.rep.clone(), target.twist.clone(), lie, hs)?;
            if !super::is_solution(&mu, &system)? {
                return Err(invalid(format!("sample {} does not solve the system", i + 1)));
            }
            let ev = Evaluator::new(&target.rep, &mu.lie_images);
            let k = module_kernel(&source, &ev, &target.twist, std::slice::from_ref(&mu.module_images));
            upper = upper.intersect(&k);
        }
        if graded {
            upper = graded_core(&upper, source.n1());
        }
        let exact = self.kind == ClosureKind::Closed || self.complete;
        if exact && !upper.same_span(&cong) {
            return Err(invalid("the recorded solutions do not cut out the stated closure"));
        }
        if !exact && !cong.same_span(&lower) {
            return Err(invalid("the tested congruence is not the one generated by the system"));
        }
        if !lower.is_subspace_of(&cong) {
            return Err(invalid("the closure does not contain the system"));
        }
        if !source.is_submodule(&cong) {
            return Err(invalid("the closure is not a submodule"));
        }
        match self.kind {
            ClosureKind::Closed => {
                if !cong.same_span(&lower) {
                    return Err(invalid("stated closed, but the closure is larger than the system"));
                }
            }
            ClosureKind::NotClosed => self.verify_growth(&source, &target, &system, &cong, &lower)?,
        }
        Ok(())
    }

    fn verify_growth(
        &self,
        source: &Representation,
        target: &Target,
        system: &[ModuleElement],
        cong: &Echelon<ModKey>,
        lower: &Echelon<ModKey>,
    ) -> Result<(), GeometryError> {
        let sctx = TermContext::new(self.source_n1, self.source_n2);
        let witness = match &self.witness {
            Some(w) => source.reduce_module(&parse_module(w, sctx)?),
            None => return Err(invalid("missing witness")),
        };
        if lower.contains(&witness) || (self.complete && !cong.contains(&witness)) {
            return Err(invalid("the witness is not a new element of the closure"));
        }
        let elements = self
            .proofs
            .iter()
            .map(|p| Ok(source.reduce_module(&parse_module(&p.element, sctx)?)))
            .collect::<Result<Vec<_>, GeometryError>>()?;
        // truncation lemma: exact on everything of degree >= truncation
        let m = system
            .iter()
            .chain(elements.iter())
            .filter_map(|u| u.min_degree())
            .min()
            .unwrap_or(0);
        if self.truncation > m {
            return Err(invalid(format!(
                "truncation degree {} exceeds the lowest degree {m} in play",
                self.truncation
            )));
        }
        let family = ParameterizedFamily::new(source, target, system, self.truncation);
        if family.lie_degree != self.lie_degree
            || family.module_degree != self.module_degree
            || family.params != self.params
        {
            return Err(invalid("parameter space does not match the truncation"));
        }
        let stored: Vec<MPoly> = self.constraints.iter().map(MPoly::from).collect();
        if !Echelon::from_vectors(&stored).same_span(&Echelon::from_vectors(&family.constraints)) {
            return Err(invalid("constraints differ from the recomputed ones"));
        }
        let mut span = lower.clone();
        for (p, u) in self.proofs.iter().zip(&elements) {
            let image = family.evaluate(u);
            let coeff = image
                .iter()
                .find(|(k, _)| k.to_string() == p.key)
                .map(|(_, q)| q.clone())
                .unwrap_or_default();
            let target_poly = MPoly::from(&p.target);
            if coeff != target_poly {
                return Err(invalid(format!("coefficient {} of {} was misstated", p.key, p.element)));
            }
            let proof = MembershipProof {
                exponent: p.exponent,
                multipliers: p.multipliers.iter().map(MPoly::from).collect(),
            };
            if p.exponent == 0 || !proof.verify(&target_poly, &stored) {
                return Err(invalid(format!("membership identity fails for {} at {}", p.element, p.key)));
            }
            span.insert(u.clone());
        }
        // every nonzero coefficient of every element must be covered
        for u in &elements {
            for (k, q) in family.evaluate(u) {
                let ks = k.to_string();
                let covered = self
                    .proofs
                    .iter()
                    .zip(&elements)
                    .any(|(p, e)| e == u && p.key == ks);
                if !covered && !q.is_zero() {
                    return Err(invalid(format!("no proof for coefficient {ks} of {u}")));
                }
            }
        }
        if self.complete {
            if !span.same_span(cong) {
                return Err(invalid("the certified elements do not span the closure"));
            }
        } else if elements.is_empty() || elements.iter().any(|e| *e != witness) {
            return Err(invalid("a partial certificate must prove exactly the witness"));
        }
        Ok(())
    }
}

fn graded_basis(span: &Echelon<ModKey>, n1: usize) -> Vec<ModuleElement> {
    let core = graded_core(span, n1);
    if core.rank() == span.rank() {
        core.basis()
    } else {
        span.basis()
    }
}
