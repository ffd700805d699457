//! Equations over free representations, kernels, solution families and the
//! closure operator `T -> T''_H` on module-sort congruences.
//!
//! The closure of `T` is computed from two sides. Kernels of sampled solutions
//! give an upper bound (their intersection contains `T''`); the submodule
//! generated by `T` is a lower bound. Every basis element of the upper bound
//! outside the lower bound must then be certified by a radical-membership
//! identity over the parameterized solution family; otherwise the computation
//! stops with `CertificationFailed`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldAutomorphism, FieldError, Scalar};
use crate::freealg::{NCPoly, Word};
use crate::freelie::{FreeLieError, LieElement};
use crate::linalg::{nullspace, Echelon, LinComb};
use crate::representation::{
    random_lie, Element, Homomorphism, ModKey, ModuleElement, RepError, Representation,
};
use crate::term::{parse_term, Term, TermContext, TermError};
use crate::verbal::{VerbalError, WordSystem};

mod certificate;
mod family;
mod separation;

pub use certificate::*;
pub use family::*;
pub use separation::*;

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_DRAWS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("outside the supported scope: {0}")]
    OutOfScope(String),
    #[error("certification failed at degree bound {degree_bound}: {detail}")]
    CertificationFailed { degree_bound: usize, detail: String },
    #[error("phi fixes lambda = {0}; the example needs phi(lambda) != lambda")]
    FixedScalar(Scalar),
    #[error("not a solution of the system: {0}")]
    NotASolution(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Verbal(#[from] VerbalError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<FreeLieError> for GeometryError {
    fn from(e: FreeLieError) -> Self {
        GeometryError::Rep(RepError::from(e))
    }
}

/// The representation a system is solved in, possibly twisted: `H` or `H*_W`.
#[derive(Clone, Debug)]
pub struct Target {
    pub rep: Arc<Representation>,
    pub twist: WordSystem,
}

impl Target {
    pub fn new(rep: Arc<Representation>) -> Self {
        Target {
            rep,
            twist: WordSystem::identity(),
        }
    }

    pub fn twisted(rep: Arc<Representation>, w: WordSystem) -> Result<Self, GeometryError> {
        w.validate(rep.field())?;
        Ok(Target { rep, twist: w })
    }

    /// Highest degree carrying a nonzero element of the module sort.
    pub fn top_degree(&self) -> usize {
        self.rep
            .module_basis()
            .iter()
            .map(|k| k.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn describe(&self) -> String {
        if self.twist.is_identity() {
            self.rep.name().to_string()
        } else {
            format!("{}*_{}", self.rep.name(), self.twist)
        }
    }
}

/// Polyhomogeneous component of a module key: generator and letter multidegree.
pub type Component = (usize, Vec<u32>);

pub fn component_of(k: &ModKey, n1: usize) -> Component {
    (k.gen, k.word.multidegree(n1))
}

/// Splits a module element into polyhomogeneous components.
pub fn module_components(u: &ModuleElement, n1: usize) -> BTreeMap<Component, ModuleElement> {
    let mut out: BTreeMap<Component, ModuleElement> = BTreeMap::new();
    for (k, c) in u.iter() {
        out.entry(component_of(k, n1))
            .or_default()
            .add_term(k.clone(), c.clone());
    }
    out
}

pub fn is_polyhomogeneous(u: &ModuleElement, n1: usize) -> bool {
    module_components(u, n1).len() <= 1
}

/// A system of equations `T` over a free representation.
#[derive(Clone, Debug)]
pub struct EquationSystem {
    pub source: Arc<Representation>,
    pub pairs: Vec<(Element, Element)>,
}

fn check_element(source: &Representation, e: &Element) -> Result<(), GeometryError> {
    match e {
        Element::Lie(l) => {
            if l.pbw.alphabet_width() > source.n1() {
                return Err(GeometryError::Rep(RepError::SortMismatch(format!(
                    "{l} uses letters outside the source"
                ))));
            }
        }
        Element::Module(m) => {
            for k in m.keys() {
                if k.gen >= source.n2() || k.word.alphabet_width() > source.n1() {
                    return Err(GeometryError::Rep(RepError::SortMismatch(format!(
                        "{k} is not a key of the source"
                    ))));
                }
            }
        }
    }
    Ok(())
}

impl EquationSystem {
    pub fn new(source: Arc<Representation>, pairs: Vec<(Element, Element)>) -> Result<Self, GeometryError> {
        for (a, b) in &pairs {
            if matches!(a, Element::Lie(_)) != matches!(b, Element::Lie(_)) {
                return Err(GeometryError::Rep(RepError::SortMismatch(
                    "both sides of an equation must have the same sort".into(),
                )));
            }
            check_element(&source, a)?;
            check_element(&source, b)?;
        }
        Ok(EquationSystem { source, pairs })
    }

    /// The system `{u = 0 : u in elems}`.
    pub fn from_module(source: Arc<Representation>, elems: Vec<ModuleElement>) -> Result<Self, GeometryError> {
        let pairs = elems
            .into_iter()
            .map(|u| (Element::Module(u), Element::Module(ModuleElement::zero())))
            .collect();
        Self::new(source, pairs)
    }

    /// One equation per line, `lhs = rhs` or `u` (meaning `u = 0`); `#` starts a comment.
    pub fn parse(source: Arc<Representation>, text: &str) -> Result<Self, GeometryError> {
        let ctx = TermContext::new(source.n1(), source.n2());
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let mut sides = line.splitn(2, '=');
            let lhs = sides.next().unwrap_or("");
            let rhs = sides.next();
            let offset = if rhs.is_some() { lhs.len() + 1 } else { 0 };
            let shift = |e: TermError, col_offset: usize| shift_error(e, idx, col_offset);
            let a = parse_term(lhs, ctx).map_err(|e| shift(e, 0))?;
            let b = match rhs {
                Some(r) => parse_term(r, ctx).map_err(|e| shift(e, offset))?,
                None => Term::Scalar(Scalar::zero()),
            };
            pairs.push(term_pair(a, b, idx + 1)?);
        }
        Self::new(source, pairs)
    }

    /// `lhs - rhs` for every module-sort pair; Lie-sort pairs are out of scope
    /// unless they are trivial.
    pub fn module_elements(&self) -> Result<Vec<ModuleElement>, GeometryError> {
        let mut out = Vec::new();
        for (a, b) in &self.pairs {
            match (a, b) {
                (Element::Module(x), Element::Module(y)) => {
                    let d = self.source.reduce_module(&(x - y));
                    if !d.is_zero() {
                        out.push(d);
                    }
                }
                (Element::Lie(x), Element::Lie(y)) => {
                    if self.source.reduce_lie(&x.sub(y)).pbw.is_zero() {
                        continue;
                    }
                    return Err(GeometryError::OutOfScope(
                        "closure is computed for module-sort equations only".into(),
                    ));
                }
                _ => unreachable!("sorts checked on construction"),
            }
        }
        Ok(out)
    }

    pub fn is_polyhomogeneous(&self) -> Result<bool, GeometryError> {
        Ok(self
            .module_elements()?
            .iter()
            .all(|u| is_polyhomogeneous(u, self.source.n1())))
    }

    pub fn to_text(&self) -> String {
        self.pairs
            .iter()
            .map(|(a, b)| format!("{a} = {b}\n"))
            .collect()
    }
}

fn shift_error(e: TermError, line_idx: usize, col_offset: usize) -> TermError {
    match e {
        TermError::SyntaxError { line, col, msg } => TermError::SyntaxError {
            line: line + line_idx,
            col: if line == 1 { col + col_offset } else { col },
            msg,
        },
        TermError::UnknownGenerator { name, line, col } => TermError::UnknownGenerator {
            name,
            line: line + line_idx,
            col: if line == 1 { col + col_offset } else { col },
        },
        TermError::SortError { line, col, msg } => TermError::SortError {
            line: line + line_idx,
            col: if line == 1 { col + col_offset } else { col },
            msg,
        },
    }
}

fn term_pair(a: Term, b: Term, line: usize) -> Result<(Element, Element), GeometryError> {
    let sort_err = || {
        GeometryError::Term(TermError::SortError {
            line,
            col: 1,
            msg: "an equation needs two elements of the same sort".into(),
        })
    };
    let lie = |t: Term| match t {
        Term::Lie(l) => Some(l),
        Term::Scalar(s) if s.is_zero() => Some(LieElement::zero()),
        _ => None,
    };
    let module = |t: Term| match t {
        Term::Module(m) => Some(m),
        Term::Scalar(s) if s.is_zero() => Some(ModuleElement::zero()),
        _ => None,
    };
    if matches!(a, Term::Module(_)) || matches!(b, Term::Module(_)) {
        let (x, y) = (module(a).ok_or_else(sort_err)?, module(b).ok_or_else(sort_err)?);
        return Ok((Element::Module(x), Element::Module(y)));
    }
    let (x, y) = (lie(a).ok_or_else(sort_err)?, lie(b).ok_or_else(sort_err)?);
    Ok((Element::Lie(x), Element::Lie(y)))
}

/// A congruence of a free representation: a Lie ideal and a submodule.
#[derive(Clone, Debug)]
pub struct Congruence {
    pub source: Arc<Representation>,
    pub lie_ideal: Echelon<Word>,
    pub module: Echelon<ModKey>,
}

impl Congruence {
    pub fn zero(source: Arc<Representation>) -> Self {
        Congruence {
            source,
            lie_ideal: Echelon::new(),
            module: Echelon::new(),
        }
    }

    pub fn from_module(source: Arc<Representation>, module: Echelon<ModKey>) -> Self {
        Congruence {
            source,
            lie_ideal: Echelon::new(),
            module,
        }
    }

    /// The congruence generated by module elements.
    pub fn generated(source: Arc<Representation>, elems: &[ModuleElement]) -> Self {
        let module = source.generated_submodule(elems);
        Self::from_module(source, module)
    }

    pub fn module_dim(&self) -> usize {
        self.module.rank()
    }

    pub fn module_basis(&self) -> Vec<ModuleElement> {
        self.module.basis()
    }

    /// Basis made of polyhomogeneous elements when the submodule is graded.
    pub fn graded_basis(&self) -> Vec<ModuleElement> {
        let core = graded_core(&self.module, self.source.n1());
        if core.rank() == self.module.rank() {
            core.basis()
        } else {
            self.module.basis()
        }
    }

    pub fn contains(&self, u: &ModuleElement) -> bool {
        self.module.contains(&self.source.reduce_module(u))
    }

    pub fn same_module(&self, other: &Congruence) -> bool {
        self.module.same_span(&other.module)
    }

    pub fn module_subset(&self, other: &Congruence) -> bool {
        self.module.is_subspace_of(&other.module)
    }

    /// Stable under the sort-1 action.
    pub fn is_valid(&self) -> bool {
        self.source.is_submodule(&self.module)
    }

    /// Dimension of the module part per degree `0..=cap`.
    pub fn dims_by_degree(&self) -> Vec<usize> {
        let core = graded_core(&self.module, self.source.n1());
        let mut out = vec![0; self.source.cap() + 1];
        for r in core.rows() {
            if let Some(d) = r.min_degree() {
                out[d] += 1;
            }
        }
        out
    }

    pub fn as_system(&self) -> Result<EquationSystem, GeometryError> {
        EquationSystem::from_module(self.source.clone(), self.graded_basis())
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.graded_basis().iter().map(|r| r.to_string()).collect();
        write!(f, "sp{{{}}}", rows.join(", "))
    }
}

/// Largest graded subspace inside `span`: the sum over components of `span ∩ V_alpha`.
pub fn graded_core(span: &Echelon<ModKey>, n1: usize) -> Echelon<ModKey> {
    let rows = span.basis();
    let mut comps: Vec<Component> = rows
        .iter()
        .flat_map(|r| r.keys().map(|k| component_of(k, n1)))
        .collect();
    comps.sort();
    comps.dedup();
    let mut out = Echelon::new();
    for comp in comps {
        let outside: Vec<ModuleElement> = rows
            .iter()
            .map(|r| r.filter(|k| component_of(k, n1) != comp))
            .collect();
        for z in nullspace(&outside) {
            let mut v = ModuleElement::zero();
            for (i, c) in z.iter() {
                v.add_scaled(&rows[*i], c);
            }
            if !v.is_zero() {
                out.insert(v);
            }
        }
    }
    out
}

/// Fast evaluation of module images for fixed sort-1 images: the action of
/// each letter image is tabulated on the target's module basis once.
pub struct Evaluator<'a> {
    target: &'a Representation,
    cols: Vec<BTreeMap<ModKey, ModuleElement>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(target: &'a Representation, lie_images: &[LieElement]) -> Self {
        let basis = target.module_basis();
        let cols = lie_images
            .iter()
            .map(|l| {
                basis
                    .iter()
                    .map(|k| (k.clone(), target.act(l, &ModuleElement::monomial(k.clone()))))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        Evaluator { target, cols }
    }

    pub fn target(&self) -> &Representation {
        self.target
    }

    fn letter(&self, i: usize, v: &ModuleElement) -> ModuleElement {
        let mut out = ModuleElement::zero();
        for (k, c) in v.iter() {
            if let Some(col) = self.cols[i].get(k) {
                out.add_scaled(col, c);
            }
        }
        out
    }

    /// `w(L) . h` for reduced `h`, memoized over suffixes of `w`.
    pub fn word_action(
        &self,
        w: &[u8],
        h: &ModuleElement,
        memo: &mut HashMap<Vec<u8>, ModuleElement>,
    ) -> ModuleElement {
        if w.is_empty() {
            return h.clone();
        }
        if let Some(v) = memo.get(w) {
            return v.clone();
        }
        let rest = self.word_action(&w[1..], h, memo);
        let v = if rest.is_zero() {
            rest
        } else {
            self.letter(w[0] as usize, &rest)
        };
        memo.insert(w.to_vec(), v.clone());
        v
    }

    /// `mu(u)` for `mu = (L, hs)` into the `twist`ed target.
    pub fn apply(&self, twist: &WordSystem, hs: &[ModuleElement], u: &ModuleElement) -> ModuleElement {
        let mut memos: Vec<HashMap<Vec<u8>, ModuleElement>> = vec![HashMap::new(); hs.len()];
        let mut out = ModuleElement::zero();
        for (k, c) in u.iter() {
            let img = self.word_action(k.word.letters(), &hs[k.gen], &mut memos[k.gen]);
            let coeff = &twist.phi.apply(c) * &twist.a.pow(k.degree() as u32);
            out.add_scaled(&img, &coeff);
        }
        out
    }
}

/// `{u : sum phi(c_e) img_e = 0}` for `u = sum c_e keys[e]`.
fn semilinear_kernel<K: Ord + Clone>(
    keys: &[ModKey],
    images: &[LinComb<K>],
    phi: FieldAutomorphism,
) -> Echelon<ModKey> {
    let inv = phi.inverse();
    let vs: Vec<ModuleElement> = nullspace(images)
        .into_iter()
        .map(|z| ModuleElement::from_terms(z.iter().map(|(i, c)| (keys[*i].clone(), inv.apply(c)))))
        .collect();
    Echelon::from_vectors(&vs)
}

/// `ker mu` per sort, by exact linear algebra on the graded bases.
pub fn kernel(mu: &Homomorphism) -> Result<Congruence, GeometryError> {
    let ev = Evaluator::new(&mu.target, &mu.lie_images);
    let module = module_kernel(&mu.source, &ev, &mu.twist, &[mu.module_images.clone()]);
    let lie_keys: Vec<NCPoly> = mu.source.lie_basis().iter().map(|e| e.iota.clone()).collect();
    let mut lie_imgs = Vec::with_capacity(lie_keys.len());
    for k in &lie_keys {
        lie_imgs.push(mu.apply_lie(&LieElement::from_pbw(k.clone()))?.pbw);
    }
    let inv = mu.twist.phi.inverse();
    let lie_vs: Vec<NCPoly> = nullspace(&lie_imgs)
        .into_iter()
        .map(|z| {
            let mut v = NCPoly::zero();
            for (i, c) in z.iter() {
                v.add_scaled(&lie_keys[*i], &inv.apply(c));
            }
            v
        })
        .collect();
    Ok(Congruence {
        source: mu.source.clone(),
        lie_ideal: Echelon::from_vectors(&lie_vs),
        module,
    })
}

/// Module kernel common to all `h`-tuples in `hs` (with fixed sort-1 images).
fn module_kernel(
    source: &Representation,
    ev: &Evaluator<'_>,
    twist: &WordSystem,
    hs: &[Vec<ModuleElement>],
) -> Echelon<ModKey> {
    let keys = source.module_basis();
    let mut memos: Vec<Vec<HashMap<Vec<u8>, ModuleElement>>> = hs
        .iter()
        .map(|h| vec![HashMap::new(); h.len()])
        .collect();
    let images: Vec<LinComb<(usize, ModKey)>> = keys
        .iter()
        .map(|k| {
            let scale = twist.a.pow(k.degree() as u32);
            let mut img = LinComb::zero();
            for (b, h) in hs.iter().enumerate() {
                let v = ev.word_action(k.word.letters(), &h[k.gen], &mut memos[b][k.gen]);
                for (key, c) in v.iter() {
                    img.add_term((b, key.clone()), c * &scale);
                }
            }
            img
        })
        .collect();
    semilinear_kernel(&keys, &images, twist.phi)
}

/// How a sampled draw of sort-1 images was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stratum {
    Identity,
    Zero,
    Generic,
    Linear,
    RankOne,
    Higher,
    /// Some generators sent to zero, the rest generic.
    Sparse,
}

const STRATA: [Stratum; 7] = [
    Stratum::Identity,
    Stratum::Zero,
    Stratum::Generic,
    Stratum::Linear,
    Stratum::RankOne,
    Stratum::Higher,
    Stratum::Sparse,
];

/// Sort-1 images drawn from the seed alone, so that samples do not depend on the system.
pub fn draw_lie_images(source_n1: usize, target: &Representation, draws: usize, seed: u64) -> Vec<(Stratum, Vec<LieElement>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = target.lie_basis();
    let n = target.n1();
    let linear = |rng: &mut ChaCha8Rng| {
        let mut p = NCPoly::zero();
        for j in 0..n {
            p.add_term(Word::letter(j), Scalar::from_int(rng.gen_range(-3..=3)));
        }
        p
    };
    let higher = |rng: &mut ChaCha8Rng| random_lie(basis, rng, 3).pbw.filter(|w| w.degree() >= 2);
    (0..draws)
        .map(|d| {
            let stratum = STRATA[d % STRATA.len()];
            let y = linear(&mut rng);
            // cycle through the nonempty subsets of generators kept
            let subsets = (1u64 << source_n1.min(63)).saturating_sub(1).max(1);
            let keep = (d / STRATA.len()) as u64 % subsets + 1;
            let images = (0..source_n1)
                .map(|i| {
                    let pbw = match stratum {
                        Stratum::Identity if n > 0 => NCPoly::letter(i % n),
                        Stratum::Identity | Stratum::Zero => NCPoly::zero(),
                        Stratum::Generic => &linear(&mut rng) + &higher(&mut rng),
                        Stratum::Linear => linear(&mut rng),
                        Stratum::RankOne => {
                            &y.scale(&Scalar::from_int(rng.gen_range(-2..=2))) + &higher(&mut rng)
                        }
                        Stratum::Higher => higher(&mut rng),
                        Stratum::Sparse if keep >> i & 1 == 1 => &linear(&mut rng) + &higher(&mut rng),
                        Stratum::Sparse => NCPoly::zero(),
                    };
                    target.reduce_lie(&LieElement::from_pbw(pbw))
                })
                .collect();
            (stratum, images)
        })
        .collect()
}

/// One sampled draw: fixed sort-1 images and a basis of the sort-2 images
/// that make the map a solution (the constraints are linear in those).
#[derive(Clone, Debug)]
pub struct SampleDraw {
    pub stratum: Stratum,
    pub lie_images: Vec<LieElement>,
    pub allowed: Vec<Vec<ModuleElement>>,
}

impl SampleDraw {
    pub fn homomorphisms(&self, source: &Arc<Representation>, target: &Target) -> Result<Vec<Homomorphism>, GeometryError> {
        self.allowed
            .iter()
            .map(|hs| {
                Ok(Homomorphism::twisted(
                    source.clone(),
                    target.rep.clone(),
                    target.twist.clone(),
                    self.lie_images.clone(),
                    hs.clone(),
                )?)
            })
            .collect()
    }
}

/// Sort-2 image tuples `(h_1..h_n2)` solving `system` for fixed sort-1 images.
fn allowed_h(
    source: &Representation,
    target: &Target,
    ev: &Evaluator<'_>,
    system: &[ModuleElement],
) -> Vec<Vec<ModuleElement>> {
    let tkeys = target.rep.module_basis();
    let n2 = source.n2();
    let hbasis: Vec<(usize, ModKey)> = (0..n2)
        .flat_map(|j| tkeys.iter().map(move |k| (j, k.clone())))
        .collect();
    let unit = |j: usize, k: &ModKey| -> Vec<ModuleElement> {
        (0..n2)
            .map(|g| {
                if g == j {
                    ModuleElement::monomial(k.clone())
                } else {
                    ModuleElement::zero()
                }
            })
            .collect()
    };
    if system.is_empty() {
        return hbasis.iter().map(|(j, k)| unit(*j, k)).collect();
    }
    let top = target.top_degree();
    let images: Vec<LinComb<(usize, ModKey)>> = hbasis
        .iter()
        .map(|(j, key)| {
            let h = ModuleElement::monomial(key.clone());
            let mut memo = HashMap::new();
            let mut img = LinComb::zero();
            for (s, t) in system.iter().enumerate() {
                for (k, c) in t.iter() {
                    if k.gen != *j || k.degree() + key.degree() > top {
                        continue;
                    }
                    let v = ev.word_action(k.word.letters(), &h, &mut memo);
                    let coeff = &target.twist.phi.apply(c) * &target.twist.a.pow(k.degree() as u32);
                    for (key2, d) in v.iter() {
                        img.add_term((s, key2.clone()), d * &coeff);
                    }
                }
            }
            img
        })
        .collect();
    nullspace(&images)
        .into_iter()
        .map(|z| {
            let mut hs = vec![ModuleElement::zero(); n2];
            for (i, c) in z.iter() {
                let (j, k) = &hbasis[*i];
                hs[*j].add_term(k.clone(), c.clone());
            }
            hs
        })
        .collect()
}

/// Sampled solution family: seed-only sort-1 draws, each with the exact space
/// of admissible sort-2 images.
pub fn sampled_solutions(
    source: &Representation,
    system: &[ModuleElement],
    target: &Target,
    draws: usize,
    seed: u64,
) -> Vec<SampleDraw> {
    draw_lie_images(source.n1(), &target.rep, draws, seed)
        .into_par_iter()
        .map(|(stratum, lie_images)| {
            let ev = Evaluator::new(&target.rep, &lie_images);
            let allowed = allowed_h(source, target, &ev, system);
            SampleDraw {
                stratum,
                lie_images,
                allowed,
            }
        })
        .collect()
}

/// How solutions are produced by [`solutions`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sampled { draws: usize, seed: u64 },
    Parameterized,
}

#[derive(Clone, Debug)]
pub enum SolutionFamily {
    Sampled(Vec<SampleDraw>),
    Parameterized(ParameterizedFamily),
}

/// `T'_H`: sampled concrete solutions, or the parameterized family with its
/// exact constraint polynomials. The zero map always solves, so the set is never empty.
pub fn solutions(system: &EquationSystem, target: &Target, strategy: Strategy) -> Result<SolutionFamily, GeometryError> {
    let elems = system.module_elements()?;
    Ok(match strategy {
        Strategy::Sampled { draws, seed } => {
            SolutionFamily::Sampled(sampled_solutions(&system.source, &elems, target, draws, seed))
        }
        Strategy::Parameterized => {
            let m = elems.iter().filter_map(|u| u.min_degree()).min().unwrap_or(0);
            SolutionFamily::Parameterized(ParameterizedFamily::new(&system.source, target, &elems, m))
        }
    })
}

/// Checks `T ⊆ ker mu`.
pub fn is_solution(mu: &Homomorphism, system: &[ModuleElement]) -> Result<bool, GeometryError> {
    for t in system {
        if !mu.apply_module(t)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Options for [`closure`].
#[derive(Clone, Debug)]
pub struct ClosureOptions {
    pub draws: usize,
    pub seed: u64,
    /// Bound on `deg Q^N` in membership certificates; default twice the constraint degree.
    pub degree_bound: Option<usize>,
    /// Further known solutions, intersected into the upper bound.
    pub extra_solutions: Vec<Homomorphism>,
    /// Elements to report as the witness of non-closedness when possible.
    pub witness_hints: Vec<ModuleElement>,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            draws: DEFAULT_DRAWS,
            seed: DEFAULT_SEED,
            degree_bound: None,
            extra_solutions: Vec::new(),
            witness_hints: Vec::new(),
        }
    }
}

impl ClosureOptions {
    pub fn with_solutions(mut self, sols: Vec<Homomorphism>) -> Self {
        self.extra_solutions = sols;
        self
    }

    pub fn with_witness_hints(mut self, hints: Vec<ModuleElement>) -> Self {
        self.witness_hints = hints;
        self
    }

    pub fn only_solutions(sols: Vec<Homomorphism>) -> Self {
        ClosureOptions {
            draws: 0,
            extra_solutions: sols,
            ..Self::default()
        }
    }
}

/// Intersection of kernels of sampled solutions and the homomorphisms whose
/// kernels suffice to cut it out.
pub struct UpperBound {
    pub span: Echelon<ModKey>,
    pub witnesses: Vec<Homomorphism>,
}

fn upper_bound(
    source: &Arc<Representation>,
    system: &[ModuleElement],
    target: &Target,
    opts: &ClosureOptions,
) -> Result<UpperBound, GeometryError> {
    for mu in &opts.extra_solutions {
        if !is_solution(mu, system)? {
            return Err(GeometryError::NotASolution(mu.describe()));
        }
    }
    let draws = sampled_solutions(source, system, target, opts.draws, opts.seed);
    let mut groups: Vec<(Vec<LieElement>, Vec<Vec<ModuleElement>>)> = opts
        .extra_solutions
        .iter()
        .map(|mu| (mu.lie_images.clone(), vec![mu.module_images.clone()]))
        .collect();
    groups.extend(draws.into_iter().map(|d| (d.lie_images, d.allowed)));
    let kernels: Vec<Echelon<ModKey>> = groups
        .par_iter()
        .map(|(lie, hs)| {
            let ev = Evaluator::new(&target.rep, lie);
            module_kernel(source, &ev, &target.twist, hs)
        })
        .collect();

    let full = Echelon::from_vectors(
        &source
            .module_basis()
            .into_iter()
            .map(ModuleElement::monomial)
            .collect::<Vec<_>>(),
    );
    let mut span = full;
    let mut chosen = Vec::new();
    for (g, k) in kernels.iter().enumerate() {
        if !span.is_subspace_of(k) {
            span = span.intersect(k);
            chosen.push(g);
        }
    }
    // within each chosen group keep only the tuples needed
    let mut witnesses = Vec::new();
    let mut running = Echelon::from_vectors(
        &source
            .module_basis()
            .into_iter()
            .map(ModuleElement::monomial)
            .collect::<Vec<_>>(),
    );
    for g in chosen {
        let (lie, hs) = &groups[g];
        let ev = Evaluator::new(&target.rep, lie);
        for h in hs {
            if running.rank() == span.rank() {
                break;
            }
            let k = module_kernel(source, &ev, &target.twist, std::slice::from_ref(h));
            if !running.is_subspace_of(&k) {
                running = running.intersect(&k);
                witnesses.push(Homomorphism::twisted(
                    source.clone(),
                    target.rep.clone(),
                    target.twist.clone(),
                    lie.clone(),
                    h.clone(),
                )?);
            }
        }
    }
    debug_assert!(running.same_span(&span));
    Ok(UpperBound { span, witnesses })
}

struct Bounds {
    source: Arc<Representation>,
    elems: Vec<ModuleElement>,
    lower: Echelon<ModKey>,
    cand: Echelon<ModKey>,
    samples: Vec<SampleRecord>,
    /// Polyhomogeneous (when possible) complement of `lower` in `cand`, by degree.
    complement: Vec<ModuleElement>,
}

fn bounds(system: &EquationSystem, target: &Target, opts: &ClosureOptions) -> Result<Bounds, GeometryError> {
    let source = system.source.clone();
    if !source.is_free() {
        return Err(GeometryError::OutOfScope("systems live in free representations".into()));
    }
    let elems = system.module_elements()?;
    let n1 = source.n1();
    let lower = source.generated_submodule(&elems);
    let upper = upper_bound(&source, &elems, target, opts)?;
    let graded = elems.iter().all(|u| is_polyhomogeneous(u, n1));
    let cand = if graded { graded_core(&upper.span, n1) } else { upper.span };
    if !lower.is_subspace_of(&cand) {
        return Err(GeometryError::InvalidCertificate(
            "sampled kernels do not contain the system; a sample is not a solution".into(),
        ));
    }
    let samples = upper.witnesses.iter().map(SampleRecord::from_hom).collect();
    let mut span = lower.clone();
    let mut complement = Vec::new();
    let mut pieces = cand.basis();
    pieces.sort_by_key(|p| p.min_degree());
    for p in pieces {
        if span.insert(p.clone()) {
            complement.push(p);
        }
    }
    Ok(Bounds {
        source,
        elems,
        lower,
        cand,
        samples,
        complement,
    })
}

fn lowest_degree(elems: &[ModuleElement], more: &[ModuleElement]) -> usize {
    elems
        .iter()
        .chain(more)
        .filter_map(|u| u.min_degree())
        .min()
        .unwrap_or(0)
}

/// `T''` for a module-sort system, certified.
///
/// Without an explicit degree bound the membership search runs at twice the
/// constraint degree and, if that is not enough, once more at three times it.
pub fn closure(
    system: &EquationSystem,
    target: &Target,
    opts: &ClosureOptions,
) -> Result<(Congruence, ClosureCertificate), GeometryError> {
    let b = bounds(system, target, opts)?;
    if b.complement.is_empty() {
        let cert = ClosureCertificate::closed(&b.source, target, &b.elems, &b.lower, b.samples);
        return Ok((Congruence::from_module(b.source, b.lower), cert));
    }
    let m = lowest_degree(&b.elems, &b.complement);
    let family = ParameterizedFamily::new(&b.source, target, &b.elems, m);
    let cd = family.constraint_degree().max(1);
    let attempts = match opts.degree_bound {
        Some(d) => vec![d],
        None => vec![2 * cd, 3 * cd],
    };
    let mut last = None;
    for bound in attempts {
        let proofs: Result<Vec<Vec<ElementProof>>, GeometryError> = b
            .complement
            .par_iter()
            .map(|u| family.certify(u, bound))
            .collect();
        match proofs {
            Ok(proofs) => {
                let witness = preferred_witness(&b.complement, &b.lower, &b.cand, &opts.witness_hints);
                let cert = ClosureCertificate::not_closed(
                    &b.source,
                    target,
                    &b.elems,
                    &b.cand,
                    b.samples,
                    witness,
                    &family,
                    bound,
                    proofs.into_iter().flatten().collect(),
                    true,
                );
                return Ok((Congruence::from_module(b.source, b.cand), cert));
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn preferred_witness(
    complement: &[ModuleElement],
    lower: &Echelon<ModKey>,
    cand: &Echelon<ModKey>,
    hints: &[ModuleElement],
) -> ModuleElement {
    hints
        .iter()
        .find(|h| cand.contains(h) && !lower.contains(h))
        .cloned()
        .unwrap_or_else(|| complement[0].clone())
}

/// Whether `k` equals its own closure in `target`. A `NotClosed` answer only
/// needs one certified element of `k''` outside `k`.
pub fn is_closed(k: &Congruence, target: &Target, opts: &ClosureOptions) -> Result<ClosureCertificate, GeometryError> {
    let system = k.as_system()?;
    let b = bounds(&system, target, opts)?;
    if b.complement.is_empty() {
        return Ok(ClosureCertificate::closed(&b.source, target, &b.elems, &b.lower, b.samples));
    }
    let mut tries: Vec<ModuleElement> = opts
        .witness_hints
        .iter()
        .filter(|h| b.cand.contains(h) && !b.lower.contains(h))
        .cloned()
        .collect();
    tries.extend(b.complement.iter().cloned());
    let mut last = None;
    for u in tries {
        let m = lowest_degree(&b.elems, std::slice::from_ref(&u));
        let family = ParameterizedFamily::new(&b.source, target, &b.elems, m);
        let bound = opts
            .degree_bound
            .unwrap_or_else(|| 2 * family.constraint_degree().max(1));
        match family.certify(&u, bound) {
            Ok(proofs) => {
                return Ok(ClosureCertificate::not_closed(
                    &b.source, target, &b.elems, &b.lower, b.samples, u, &family, bound, proofs, false,
                ))
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("nonempty complement"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDescriptor;
    use crate::representation::VarietyDescriptor;

    fn degree_six() -> Arc<Representation> {
        let v = VarietyDescriptor::degree_six(FieldDescriptor::quadratic(2).unwrap());
        Arc::new(Representation::free(&v, 2, 1).unwrap())
    }

    #[test]
    fn kernels_of_simple_maps() {
        let f = degree_six();
        let id = Homomorphism::identity_onto(f.clone(), f.clone());
        let k = kernel(&id).unwrap();
        assert_eq!(k.module_dim(), 0);
        assert!(k.lie_ideal.is_empty());
        let kill = Homomorphism::new(
            f.clone(),
            f.clone(),
            vec![LieElement::generator(0), LieElement::generator(1)],
            vec![ModuleElement::zero()],
        )
        .unwrap();
        assert_eq!(kernel(&kill).unwrap().module_dim(), 63);
    }

    #[test]
    fn evaluator_matches_apply() {
        let f = degree_six();
        let c = LieElement::generator(0).bracket(&LieElement::generator(1));
        let mu = Homomorphism::twisted(
            f.clone(),
            f.clone(),
            WordSystem::new(Scalar::from_int(2), FieldAutomorphism::Conjugation).unwrap(),
            vec![LieElement::generator(0).add(&c), LieElement::generator(1).scale(&Scalar::sqrt(2))],
            vec![&ModuleElement::from_poly(&NCPoly::word(&[1]), 0) + &ModuleElement::generator(0)],
        )
        .unwrap();
        let ev = Evaluator::new(&f, &mu.lie_images);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let u = crate::representation::random_module(&f, &mut rng, 5).scale(&(&Scalar::one() + &Scalar::sqrt(2)));
            assert_eq!(ev.apply(&mu.twist, &mu.module_images, &u), mu.apply_module(&u).unwrap());
        }
    }

    #[test]
    fn parse_system() {
        let f = degree_six();
        let s = EquationSystem::parse(f.clone(), "# comment\nx1*x2*v1 = x2*x1*v1\n\n[x1,x2] = [x1,x2]\n").unwrap();
        assert_eq!(s.pairs.len(), 2);
        assert_eq!(s.module_elements().unwrap().len(), 1);
        let err = EquationSystem::parse(f.clone(), "v1 = 0\nx1 + v1").unwrap_err();
        assert!(matches!(err, GeometryError::Term(TermError::SortError { line: 2, .. })));
        let bad = EquationSystem::parse(f, "x1 = x2").unwrap();
        assert!(matches!(bad.module_elements(), Err(GeometryError::OutOfScope(_))));
    }

    #[test]
    fn graded_core_splits_components() {
        let f = degree_six();
        let a = ModuleElement::from_poly(&NCPoly::word(&[0]), 0);
        let b = ModuleElement::from_poly(&NCPoly::word(&[1]), 0);
        let span = Echelon::from_vectors(&[&a + &b, a.clone() - ModuleElement::generator(0)]);
        assert_eq!(graded_core(&span, 2).rank(), 0);
        let span = Echelon::from_vectors(&[&a + &ModuleElement::generator(0), ModuleElement::generator(0)]);
        assert_eq!(graded_core(&span, 2).rank(), 2);
        let _ = f;
    }

    fn small() -> Arc<Representation> {
        let v = VarietyDescriptor::degree_six(FieldDescriptor::Rationals);
        Arc::new(Representation::free(&v, 1, 1).unwrap())
    }

    #[test]
    fn zero_congruence_is_closed_in_faithful_target() {
        let f = small();
        let cert = is_closed(&Congruence::zero(f.clone()), &Target::new(f.clone()), &ClosureOptions::default()).unwrap();
        assert!(cert.is_closed());
        cert.verify(f.variety()).unwrap();
    }

    #[test]
    fn generated_systems_are_closed_in_the_free_object() {
        let f1 = small();
        let target = Target::new(f1.clone());
        let system = EquationSystem::parse(f1.clone(), "x1*v1").unwrap();
        let (c, cert) = closure(&system, &target, &ClosureOptions::default()).unwrap();
        assert!(cert.is_closed());
        assert_eq!(c.module_dim(), 5);
        cert.verify(f1.variety()).unwrap();
    }

    #[test]
    fn tampered_certificates_fail() {
        let f = small();
        let target = Target::new(f.clone());
        let system = EquationSystem::parse(f.clone(), "x1*x1*v1").unwrap();
        let (_, cert) = closure(&system, &target, &ClosureOptions::default()).unwrap();
        cert.verify(f.variety()).unwrap();
        let mut bad = cert.clone();
        bad.congruence.pop();
        assert!(bad.verify(f.variety()).is_err());
        let mut bad = cert.clone();
        bad.samples.clear();
        assert!(bad.verify(f.variety()).is_err());
    }
}
