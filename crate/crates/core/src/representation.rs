//! Two-sorted free representations `F(X)` of action-type varieties, their
//! quotients, and homomorphisms given by generator images.
//!
//! Sort 1 is the free Lie algebra on `X1`, viewed modulo brackets of degree
//! above the cap; sort 2 is `sum_x A/S * x`, stored as linear combinations of
//! [`ModKey`]s (normal word times sort-2 generator). A quotient carries an
//! extra submodule `V` in echelon form over normal keys.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::Rng;
use thiserror::Error;

use crate::field::{FieldDescriptor, FieldError, Scalar};
use crate::freealg::{format_lincomb, FreeAlgError, NCPoly, QuotientAlgebra, Substituter, Word};
use crate::freelie::{FreeLieError, LieElement, LyndonBasis};
use crate::linalg::{Echelon, LinComb};
use crate::verbal::WordSystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("degenerate variety: [x1,x2] acts as zero on the module sort")]
    DegenerateVariety,
    #[error("trivial variety: the module sort collapses to zero")]
    TrivialVariety,
    #[error("not a submodule: {0}")]
    NotSubmodule(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    #[error(transparent)]
    FreeLie(#[from] FreeLieError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Action-type variety given by module identities `f * v = 0`.
#[derive(Clone)]
pub struct VarietyDescriptor {
    pub field: FieldDescriptor,
    pub identities: Vec<NCPoly>,
    pub cap: usize,
    algebras: Arc<Mutex<BTreeMap<usize, Arc<QuotientAlgebra>>>>,
    lie: Arc<Mutex<BTreeMap<usize, Arc<LyndonBasis>>>>,
}

impl fmt::Debug for VarietyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VarietyDescriptor")
            .field("field", &self.field)
            .field("identities", &self.identities.iter().map(|p| p.to_string()).collect::<Vec<_>>())
            .field("cap", &self.cap)
            .finish()
    }
}

impl PartialEq for VarietyDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.identities == other.identities && self.cap == other.cap
    }
}

impl VarietyDescriptor {
    pub fn new(
        field: FieldDescriptor,
        identities: Vec<NCPoly>,
        cap: usize,
    ) -> Result<Self, RepError> {
        for f in &identities {
            for c in f.coefficients() {
                if !field.contains(c) {
                    return Err(FieldError::MixedFields(field.radicand().unwrap_or(0), c.radicand()).into());
                }
            }
            if let Some(d) = f.degree() {
                if d > cap {
                    return Err(FreeAlgError::CapTooSmall { needed: d, cap }.into());
                }
            }
        }
        Ok(VarietyDescriptor {
            field,
            identities,
            cap,
            algebras: Arc::default(),
            lie: Arc::default(),
        })
    }

    /// The variety defined by `x1 x2 x3 x4 x5 x6 * v = 0`, with cap 6.
    pub fn degree_six(field: FieldDescriptor) -> Self {
        VarietyDescriptor::new(field, vec![NCPoly::word(&[0, 1, 2, 3, 4, 5])], 6)
            .expect("valid descriptor")
    }

    /// Every identity has integer coefficients.
    pub fn integer_coefficients(&self) -> bool {
        self.identities
            .iter()
            .all(|f| f.coefficients().all(|c| c.is_integer()))
    }

    /// `A/S` on `n1` letters (cached).
    pub fn algebra(&self, n1: usize) -> Result<Arc<QuotientAlgebra>, RepError> {
        if let Some(q) = self.algebras.lock().expect("lock").get(&n1) {
            return Ok(q.clone());
        }
        let q = Arc::new(QuotientAlgebra::from_identities(&self.identities, n1, self.cap)?);
        self.algebras.lock().expect("lock").insert(n1, q.clone());
        Ok(q)
    }

    pub fn lyndon(&self, n1: usize) -> Arc<LyndonBasis> {
        let mut m = self.lie.lock().expect("lock");
        m.entry(n1)
            .or_insert_with(|| Arc::new(LyndonBasis::new(n1, self.cap)))
            .clone()
    }

    /// `v = 0` is not an identity.
    pub fn is_nontrivial(&self) -> Result<bool, RepError> {
        Ok(self.algebra(0)?.dim_component(0)? == 1)
    }

    /// `[x1,x2] * v = 0` is not an identity.
    pub fn is_nondegenerate(&self) -> Result<bool, RepError> {
        if self.cap < 2 {
            return Ok(false);
        }
        let q = self.algebra(2)?;
        let c = NCPoly::letter(0).commutator(&NCPoly::letter(1));
        Ok(!q.reduce(&c).is_zero())
    }

    pub fn check(&self) -> Result<(), RepError> {
        if !self.is_nontrivial()? {
            return Err(RepError::TrivialVariety);
        }
        if !self.is_nondegenerate()? {
            return Err(RepError::DegenerateVariety);
        }
        Ok(())
    }
}

/// Basis key of the module sort: normal word times sort-2 generator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ModKey {
    pub word: Word,
    pub gen: usize,
}

impl ModKey {
    pub fn new(word: Word, gen: usize) -> Self {
        ModKey { word, gen }
    }

    pub fn degree(&self) -> usize {
        self.word.degree()
    }
}

impl fmt::Display for ModKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.degree() == 0 {
            write!(f, "v{}", self.gen + 1)
        } else {
            write!(f, "{}*v{}", self.word, self.gen + 1)
        }
    }
}

pub type ModuleElement = LinComb<ModKey>;

impl fmt::Display for LinComb<ModKey> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_lincomb(self, |k| (k.to_string(), false)))
    }
}

impl LinComb<ModKey> {
    pub fn generator(j: usize) -> ModuleElement {
        LinComb::monomial(ModKey::new(Word::unit(), j))
    }

    /// `f * v_j`.
    pub fn from_poly(f: &NCPoly, j: usize) -> ModuleElement {
        f.map_keys(|w| ModKey::new(w.clone(), j))
    }

    /// Cyclic component on generator `j`, as a polynomial.
    pub fn component_poly(&self, j: usize) -> NCPoly {
        LinComb::from_terms(
            self.iter()
                .filter(|(k, _)| k.gen == j)
                .map(|(k, c)| (k.word.clone(), c.clone())),
        )
    }

    /// Decomposition `u = sum u_i` by sort-2 generator, in generator order.
    pub fn cyclic_components(&self) -> Vec<ModuleElement> {
        let mut by_gen: BTreeMap<usize, ModuleElement> = BTreeMap::new();
        for (k, c) in self.iter() {
            by_gen.entry(k.gen).or_default().add_term(k.clone(), c.clone());
        }
        by_gen.into_values().collect()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.keys().map(|k| k.degree()).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.keys().map(|k| k.degree()).max()
    }

    pub fn homogeneous_part(&self, n: usize) -> ModuleElement {
        self.filter(|k| k.degree() == n)
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> ModuleElement {
        self.map_coeffs(|_, c| f(c))
    }
}

/// Element of either sort.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Lie(LieElement),
    Module(ModuleElement),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Lie(l) => write!(f, "{l}"),
            Element::Module(m) => write!(f, "{m}"),
        }
    }
}

/// A finitely generated representation `F(X) / V` (free when `V = 0`).
#[derive(Clone, Debug)]
pub struct Representation {
    variety: VarietyDescriptor,
    n1: usize,
    n2: usize,
    lie: Arc<LyndonBasis>,
    algebra: Arc<QuotientAlgebra>,
    submodule: Echelon<ModKey>,
    name: String,
}

impl PartialEq for Representation {
    fn eq(&self, other: &Self) -> bool {
        self.variety == other.variety
            && self.n1 == other.n1
            && self.n2 == other.n2
            && self.submodule.same_span(&other.submodule)
    }
}

impl Representation {
    /// The free representation on `n1` sort-1 and `n2` sort-2 generators.
    pub fn free(variety: &VarietyDescriptor, n1: usize, n2: usize) -> Result<Self, RepError> {
        variety.check()?;
        Ok(Representation {
            variety: variety.clone(),
            n1,
            n2,
            lie: variety.lyndon(n1),
            algebra: variety.algebra(n1)?,
            submodule: Echelon::new(),
            name: format!("F({n1},{n2})"),
        })
    }

    pub fn variety(&self) -> &VarietyDescriptor {
        &self.variety
    }

    pub fn field(&self) -> FieldDescriptor {
        self.variety.field
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn cap(&self) -> usize {
        self.variety.cap
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn is_free(&self) -> bool {
        self.submodule.is_empty()
    }

    pub fn lie_basis(&self) -> &LyndonBasis {
        &self.lie
    }

    pub fn algebra(&self) -> &QuotientAlgebra {
        &self.algebra
    }

    /// The relations `V` (empty for free representations).
    pub fn submodule(&self) -> &Echelon<ModKey> {
        &self.submodule
    }

    /// Normal keys of `F(X)`'s module sort (ignoring `V`).
    pub fn free_module_basis(&self) -> Vec<ModKey> {
        let mut out = Vec::new();
        for n in 0..=self.cap() {
            for w in self.algebra.normal_basis(n) {
                for j in 0..self.n2 {
                    out.push(ModKey::new(w.clone(), j));
                }
            }
        }
        out
    }

    /// Basis keys of the module sort of this representation.
    pub fn module_basis(&self) -> Vec<ModKey> {
        self.free_module_basis()
            .into_iter()
            .filter(|k| !self.submodule.is_pivot(k))
            .collect()
    }

    pub fn module_dim(&self) -> usize {
        self.free_module_basis().len() - self.submodule.rank()
    }

    pub fn module_dim_degree(&self, n: usize) -> usize {
        self.module_basis().iter().filter(|k| k.degree() == n).count()
    }

    /// Dimensions of the Lie sort per degree `1..=cap`.
    pub fn lie_dims(&self) -> Vec<usize> {
        self.lie.counts()
    }

    pub fn lie_generator(&self, i: usize) -> LieElement {
        LieElement::generator(i)
    }

    pub fn module_generator(&self, j: usize) -> ModuleElement {
        ModuleElement::generator(j)
    }

    /// Canonical form: words reduced in `A/S`, then modulo `V`.
    pub fn reduce_module(&self, u: &ModuleElement) -> ModuleElement {
        let mut out = ModuleElement::zero();
        for (j, comp) in self.split_by_gen(u) {
            let r = self.algebra.reduce(&comp);
            out.add_scaled(&ModuleElement::from_poly(&r, j), &Scalar::one());
        }
        self.submodule.reduce(&out)
    }

    fn split_by_gen(&self, u: &ModuleElement) -> BTreeMap<usize, NCPoly> {
        let mut by: BTreeMap<usize, NCPoly> = BTreeMap::new();
        for (k, c) in u.iter() {
            by.entry(k.gen).or_default().add_term(k.word.clone(), c.clone());
        }
        by
    }

    /// Lie element modulo brackets above the cap.
    pub fn reduce_lie(&self, l: &LieElement) -> LieElement {
        LieElement {
            pbw: l.pbw.truncate(self.cap()),
            expr: l.expr.clone(),
        }
    }

    /// `f . u` for an associative polynomial `f`, reduced.
    pub fn act_poly(&self, f: &NCPoly, u: &ModuleElement) -> ModuleElement {
        let mut out = ModuleElement::zero();
        for (k, c) in u.iter() {
            for (w, a) in f.iter() {
                if w.degree() + k.degree() <= self.cap() {
                    out.add_term(ModKey::new(w.concat(&k.word), k.gen), a * c);
                }
            }
        }
        self.reduce_module(&out)
    }

    /// `l o u = iota(l) u`.
    pub fn act(&self, l: &LieElement, u: &ModuleElement) -> ModuleElement {
        self.act_poly(&l.pbw, u)
    }

    pub fn bracket(&self, u: &LieElement, v: &LieElement) -> LieElement {
        u.bracket_truncated(v, self.cap())
    }

    pub fn module_eq(&self, u: &ModuleElement, v: &ModuleElement) -> bool {
        self.reduce_module(&(u - v)).is_zero()
    }

    /// Whether the span of `rows` (taken modulo `V`) is stable under the action.
    pub fn is_submodule(&self, rows: &Echelon<ModKey>) -> bool {
        let full = self.submodule.sum(rows);
        rows.rows().all(|r| {
            (0..self.n1).all(|i| {
                let x = NCPoly::letter(i);
                full.contains(&self.act_poly(&x, r))
            })
        })
    }

    /// Submodule generated by `elements` (closure under the action), as an
    /// echelon over normal keys, modulo `V`.
    pub fn generated_submodule(&self, elements: &[ModuleElement]) -> Echelon<ModKey> {
        let mut span = Echelon::new();
        let mut queue: Vec<ModuleElement> = Vec::new();
        for e in elements {
            let r = self.reduce_module(e);
            let r = span.reduce(&r);
            if !r.is_zero() {
                span.insert(r.clone());
                queue.push(r);
            }
        }
        while let Some(v) = queue.pop() {
            for i in 0..self.n1 {
                let w = self.act_poly(&NCPoly::letter(i), &v);
                let r = span.reduce(&w);
                if !r.is_zero() {
                    span.insert(r.clone());
                    queue.push(r);
                }
            }
        }
        span
    }

    /// Coordinates of a reduced module element over [`Self::module_basis`].
    pub fn module_coordinates(&self, u: &ModuleElement) -> ModuleElement {
        self.reduce_module(u)
    }

    /// Identities of the variety hold on `samples` random substitutions.
    pub fn satisfies_identities<R: Rng>(&self, rng: &mut R, samples: usize) -> bool {
        for f in &self.variety.identities {
            let vars = f.alphabet_width();
            for _ in 0..samples {
                let images: Vec<NCPoly> = (0..vars)
                    .map(|_| random_lie(&self.lie, rng, 3).pbw)
                    .collect();
                let g = f.substitute(&images, self.cap());
                let u = random_module(self, rng, 2);
                if !self.act_poly(&g, &u).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// `(dim L/[L,L], dim F2/(F1 o F2))`.
    pub fn ibn_invariants(&self) -> Result<(usize, usize), RepError> {
        if !self.variety.is_nontrivial()? {
            return Err(RepError::TrivialVariety);
        }
        let mut lie_total = Echelon::new();
        let elems: Vec<&NCPoly> = self.lie.iter().map(|e| &e.iota).collect();
        for e in &elems {
            lie_total.insert((*e).clone());
        }
        let mut derived = Echelon::new();
        for (i, a) in elems.iter().enumerate() {
            for b in elems.iter().skip(i + 1) {
                let da = a.min_degree().unwrap_or(0);
                let db = b.min_degree().unwrap_or(0);
                if da + db <= self.cap() {
                    derived.insert(a.commutator_truncated(b, self.cap()));
                }
            }
        }
        let lie_quot = lie_total.rank() - derived.rank();

        let mut acted = Echelon::new();
        for k in self.module_basis() {
            let u = ModuleElement::monomial(k);
            for i in 0..self.n1 {
                acted.insert(self.act_poly(&NCPoly::letter(i), &u));
            }
        }
        Ok((lie_quot, self.module_dim() - acted.rank()))
    }

    /// `F / V` with the natural projection.
    pub fn quotient(
        self: &Arc<Self>,
        relations: &[ModuleElement],
    ) -> Result<(Arc<Representation>, Homomorphism), RepError> {
        let mut rows = Echelon::new();
        for r in relations {
            check_module_gens(r, self.n1, self.n2)?;
            rows.insert(self.reduce_module(r));
        }
        if !self.is_submodule(&rows) {
            return Err(RepError::NotSubmodule(
                "the span is not closed under the sort-1 action".into(),
            ));
        }
        let mut q = (**self).clone();
        q.submodule = self.submodule.sum(&rows);
        q.name = format!("{}/V", self.name);
        let q = Arc::new(q);
        let nu = Homomorphism::identity_onto(self.clone(), q.clone());
        Ok((q, nu))
    }
}

fn check_module_gens(u: &ModuleElement, n1: usize, n2: usize) -> Result<(), RepError> {
    for k in u.keys() {
        if k.gen >= n2 {
            return Err(RepError::SortMismatch(format!(
                "module generator v{} not among {n2} generators",
                k.gen + 1
            )));
        }
        if k.word.alphabet_width() > n1 {
            return Err(RepError::SortMismatch(format!(
                "letter in {} not among {n1} sort-1 generators",
                k.word
            )));
        }
    }
    Ok(())
}

/// Small random integer scalar in `[-r, r]`, nonzero when requested.
pub fn random_scalar<R: Rng>(rng: &mut R, r: i64, nonzero: bool) -> Scalar {
    loop {
        let v = rng.gen_range(-r..=r);
        if !nonzero || v != 0 {
            return Scalar::from_int(v);
        }
    }
}

/// Random Lie element with small integer coefficients and degree `<= max_deg`.
pub fn random_lie<R: Rng>(basis: &LyndonBasis, rng: &mut R, max_deg: usize) -> LieElement {
    let mut pbw = NCPoly::zero();
    for n in 1..=max_deg.min(basis.cap()) {
        for e in basis.degree(n) {
            if rng.gen_bool(0.5) {
                pbw.add_scaled(&e.iota, &random_scalar(rng, 3, false));
            }
        }
    }
    LieElement::from_pbw(pbw)
}

/// Random reduced module element supported in degrees `<= max_deg`.
pub fn random_module<R: Rng>(rep: &Representation, rng: &mut R, max_deg: usize) -> ModuleElement {
    let mut u = ModuleElement::zero();
    for k in rep.module_basis() {
        if k.degree() <= max_deg && rng.gen_bool(0.5) {
            u.add_term(k, random_scalar(rng, 3, false));
        }
    }
    u
}

/// Homomorphism `F -> H` (or into the twisted `H*_W`) given on generators.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    pub source: Arc<Representation>,
    pub target: Arc<Representation>,
    pub twist: WordSystem,
    pub lie_images: Vec<LieElement>,
    pub module_images: Vec<ModuleElement>,
}

impl Homomorphism {
    pub fn new(
        source: Arc<Representation>,
        target: Arc<Representation>,
        lie_images: Vec<LieElement>,
        module_images: Vec<ModuleElement>,
    ) -> Result<Self, RepError> {
        Self::twisted(source, target, WordSystem::identity(), lie_images, module_images)
    }

    /// Homomorphism into `target*_W`.
    pub fn twisted(
        source: Arc<Representation>,
        target: Arc<Representation>,
        twist: WordSystem,
        lie_images: Vec<LieElement>,
        module_images: Vec<ModuleElement>,
    ) -> Result<Self, RepError> {
        if !source.is_free() {
            return Err(RepError::SortMismatch(
                "homomorphisms are defined on free sources only".into(),
            ));
        }
        if lie_images.len() != source.n1 || module_images.len() != source.n2 {
            return Err(RepError::SortMismatch(format!(
                "expected {} sort-1 and {} sort-2 images, got {} and {}",
                source.n1,
                source.n2,
                lie_images.len(),
                module_images.len()
            )));
        }
        let mut lie = Vec::with_capacity(lie_images.len());
        for l in lie_images {
            if l.pbw.keys().any(|w| w.degree() == 0) {
                return Err(RepError::SortMismatch(
                    "sort-1 images must be Lie elements without constant term".into(),
                ));
            }
            if l.pbw.alphabet_width() > target.n1 {
                return Err(RepError::SortMismatch(format!("{l} is not in the target")));
            }
            let l = target.reduce_lie(&l);
            if !target.lie.is_lie_element(&l.pbw)? {
                return Err(RepError::SortMismatch(format!("{l} is not a Lie element")));
            }
            lie.push(l);
        }
        let mut module = Vec::with_capacity(module_images.len());
        for m in module_images {
            check_module_gens(&m, target.n1, target.n2)?;
            module.push(target.reduce_module(&m));
        }
        Ok(Homomorphism {
            source,
            target,
            twist,
            lie_images: lie,
            module_images: module,
        })
    }

    /// Identity on generators, `F -> F/V`.
    pub fn identity_onto(source: Arc<Representation>, target: Arc<Representation>) -> Self {
        let lie_images = (0..source.n1).map(LieElement::generator).collect();
        let module_images = (0..source.n2).map(ModuleElement::generator).collect();
        Homomorphism {
            source,
            target,
            twist: WordSystem::identity(),
            lie_images,
            module_images,
        }
    }

    fn letter_images(&self) -> Vec<NCPoly> {
        self.lie_images.iter().map(|l| l.pbw.clone()).collect()
    }

    /// Image of a source Lie element.
    pub fn apply_lie(&self, l: &LieElement) -> Result<LieElement, RepError> {
        if l.pbw.alphabet_width() > self.source.n1 {
            return Err(RepError::SortMismatch(format!("{l} is not in the source")));
        }
        let images = self.letter_images();
        let cap = self.target.cap();
        let mut sub = Substituter::new(&images, cap);
        let mut out = NCPoly::zero();
        for n in 1..=self.source.cap() {
            let part = l.pbw.homogeneous_part(n);
            if part.is_zero() {
                continue;
            }
            let twisted = part.map_scalars(|c| self.twist.phi.apply(c));
            let scale = self.twist.a.pow((n - 1) as u32);
            out.add_scaled(&sub.poly(&twisted), &scale);
        }
        Ok(LieElement::from_pbw(out.truncate(cap)))
    }

    /// Image of a source module element.
    pub fn apply_module(&self, u: &ModuleElement) -> Result<ModuleElement, RepError> {
        check_module_gens(u, self.source.n1, self.source.n2)?;
        let u = self.source.reduce_module(u);
        let images = self.letter_images();
        let cap = self.target.cap();
        let mut sub = Substituter::new(&images, cap);
        let mut raw = ModuleElement::zero();
        for (k, c) in u.iter() {
            let coeff = &self.twist.phi.apply(c) * &self.twist.a.pow(k.degree() as u32);
            let p = sub.word(&k.word);
            for (hk, hc) in self.module_images[k.gen].iter() {
                for (w, pc) in p.iter() {
                    if w.degree() + hk.degree() <= cap {
                        raw.add_term(ModKey::new(w.concat(&hk.word), hk.gen), &(pc * hc) * &coeff);
                    }
                }
            }
        }
        Ok(self.target.reduce_module(&raw))
    }

    pub fn apply(&self, e: &Element) -> Result<Element, RepError> {
        match e {
            Element::Lie(l) => self.apply_lie(l).map(Element::Lie),
            Element::Module(m) => self.apply_module(m).map(Element::Module),
        }
    }

    /// `other o self`: `self: F1 -> F2`, `other: F2 -> H`.
    pub fn then(&self, other: &Homomorphism) -> Result<Homomorphism, RepError> {
        if !Arc::ptr_eq(&self.target, &other.source) && *self.target != *other.source {
            return Err(RepError::SortMismatch("composition of unrelated maps".into()));
        }
        let lie = self
            .lie_images
            .iter()
            .map(|l| other.apply_lie(l))
            .collect::<Result<Vec<_>, _>>()?;
        let module = self
            .module_images
            .iter()
            .map(|m| other.apply_module(m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Homomorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            twist: WordSystem::stack(&other.twist, &self.twist),
            lie_images: lie,
            module_images: module,
        })
    }

    /// Images of every basis key of the source module sort, in order.
    pub fn module_matrix(&self) -> Vec<(ModKey, ModuleElement)> {
        self.source
            .module_basis()
            .into_iter()
            .map(|k| {
                let img = self
                    .apply_module(&ModuleElement::monomial(k.clone()))
                    .expect("basis key in source");
                (k, img)
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, l) in self.lie_images.iter().enumerate() {
            parts.push(format!("x{} -> {}", i + 1, l.pbw));
        }
        for (j, m) in self.module_images.iter().enumerate() {
            parts.push(format!("v{} -> {}", j + 1, m));
        }
        parts.join("; ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn degree_six() -> VarietyDescriptor {
        VarietyDescriptor::degree_six(FieldDescriptor::Rationals)
    }

    #[test]
    fn free_dimensions() {
        let v = degree_six();
        assert_eq!(Representation::free(&v, 2, 1).unwrap().module_dim(), 63);
        assert_eq!(Representation::free(&v, 2, 0).unwrap().module_dim(), 0);
        let f = Representation::free(&v, 0, 2).unwrap();
        assert_eq!(f.module_dim(), 2);
    }

    #[test]
    fn act_examples() {
        let f = Representation::free(&degree_six(), 2, 1).unwrap();
        let x = ModuleElement::generator(0);
        let x1 = LieElement::generator(0);
        let x2 = LieElement::generator(1);
        assert_eq!(
            f.act(&x1, &x),
            ModuleElement::from_poly(&NCPoly::letter(0), 0)
        );
        let c = x1.bracket(&x2);
        assert_eq!(f.act(&c, &x), ModuleElement::from_poly(&c.pbw, 0));
        let deg5 = ModuleElement::from_poly(&NCPoly::word(&[0, 1, 1, 0, 1]), 0);
        assert!(f.act(&x1, &deg5).is_zero());
    }

    #[test]
    fn cyclic_components_split() {
        let u = &ModuleElement::from_poly(&NCPoly::letter(0), 0)
            + &ModuleElement::from_poly(&NCPoly::word(&[0, 1]), 1);
        let parts = u.cyclic_components();
        assert_eq!(parts.len(), 2);
        assert!(ModuleElement::zero().cyclic_components().is_empty());
    }

    #[test]
    fn ibn() {
        let v = degree_six();
        for (n1, n2) in [(2, 1), (1, 1), (0, 0)] {
            let f = Representation::free(&v, n1, n2).unwrap();
            assert_eq!(f.ibn_invariants().unwrap(), (n1, n2));
        }
    }

    #[test]
    fn swap_map() {
        let f = Arc::new(Representation::free(&degree_six(), 2, 1).unwrap());
        let mu = Homomorphism::new(
            f.clone(),
            f.clone(),
            vec![LieElement::generator(1), LieElement::generator(0)],
            vec![ModuleElement::generator(0)],
        )
        .unwrap();
        let c = LieElement::generator(0).bracket(&LieElement::generator(1));
        let u = ModuleElement::from_poly(&c.pbw, 0);
        assert_eq!(mu.apply_module(&u).unwrap(), -&u);
    }

    #[test]
    fn linear_substitution() {
        let f = Arc::new(Representation::free(&degree_six(), 2, 1).unwrap());
        let s = LieElement::generator(0).add(&LieElement::generator(1));
        let mu = Homomorphism::new(
            f.clone(),
            f.clone(),
            vec![s.clone(), LieElement::generator(1)],
            vec![ModuleElement::generator(0)],
        )
        .unwrap();
        let u = ModuleElement::from_poly(&NCPoly::letter(0), 0);
        assert_eq!(mu.apply_module(&u).unwrap(), ModuleElement::from_poly(&s.pbw, 0));
    }

    #[test]
    fn quotient_by_everything_and_nothing() {
        let f = Arc::new(Representation::free(&degree_six(), 2, 1).unwrap());
        let (h, _) = f.quotient(&[]).unwrap();
        assert_eq!(h.module_dim(), 63);
        // the generator alone spans no submodule; its generated submodule is everything
        let lone = f.quotient(&[ModuleElement::generator(0)]);
        assert!(matches!(lone, Err(RepError::NotSubmodule(_))));
        let span = f.generated_submodule(&[ModuleElement::generator(0)]);
        let (h, _) = f.quotient(&span.basis()).unwrap();
        assert_eq!(h.module_dim(), 0);
        let bad = f.quotient(&[ModuleElement::from_poly(&NCPoly::letter(0), 0)]);
        assert!(matches!(bad, Err(RepError::NotSubmodule(_))));
    }

    #[test]
    fn identities_hold_in_free() {
        let f = Representation::free(&degree_six(), 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(f.satisfies_identities(&mut rng, 5));
    }

    #[test]
    fn degenerate_variety_rejected() {
        let comm = NCPoly::letter(0).commutator(&NCPoly::letter(1));
        let v = VarietyDescriptor::new(FieldDescriptor::Rationals, vec![comm], 4).unwrap();
        assert_eq!(
            Representation::free(&v, 2, 1).unwrap_err(),
            RepError::DegenerateVariety
        );
        let t = VarietyDescriptor::new(FieldDescriptor::Rationals, vec![NCPoly::one()], 4).unwrap();
        assert_eq!(Representation::free(&t, 2, 1).unwrap_err(), RepError::TrivialVariety);
    }
}
