//! Verbal operations: word systems `W = (a, phi)`, the twist `H -> H*_W`, the
//! semilinear bijection `s_F : F -> F*_W`, the forcing identities that pin the
//! shape of admissible word systems, and the innerness decision.
//!
//! In `H*_W` scalars act through `phi`, brackets are scaled by `a`, and the
//! action is scaled by `a`; addition is unchanged. `s_F` scales a degree-`d`
//! Lie monomial by `a^(d-1)`, a module monomial `m * v` by `a^(deg m)`, and
//! applies `phi` to every coefficient.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldAutomorphism, FieldDescriptor, FieldError, Scalar};
use crate::freealg::NCPoly;
use crate::freelie::LieElement;
use crate::linalg::Echelon;
use crate::poly::MPoly;
use crate::representation::{
    random_lie, random_module, Homomorphism, ModuleElement, RepError, Representation,
    VarietyDescriptor,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerbalError {
    #[error("the scalar a of a word system must be nonzero")]
    ZeroScalar,
    #[error("s-map is not an isomorphism: {0}")]
    NotIsomorphism(String),
    #[error("degenerate variety: the forcing argument needs [x1,x2] o v = 0 to fail")]
    DegenerateVariety,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The pair `(a, phi)`: brackets and action scaled by `a`, scalars twisted by `phi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSystem {
    pub a: Scalar,
    pub phi: FieldAutomorphism,
}

impl Default for WordSystem {
    fn default() -> Self {
        WordSystem::identity()
    }
}

impl WordSystem {
    pub fn identity() -> Self {
        WordSystem {
            a: Scalar::one(),
            phi: FieldAutomorphism::Identity,
        }
    }

    pub fn new(a: Scalar, phi: FieldAutomorphism) -> Result<Self, VerbalError> {
        if a.is_zero() {
            return Err(VerbalError::ZeroScalar);
        }
        Ok(WordSystem { a, phi })
    }

    /// `a` lies in the field and `phi` belongs to its automorphism group.
    pub fn validate(&self, field: FieldDescriptor) -> Result<(), VerbalError> {
        if self.a.is_zero() {
            return Err(VerbalError::ZeroScalar);
        }
        field.apply_automorphism(self.phi, &self.a)?;
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.phi.is_identity()
    }

    /// System of `(H*_inner)*_outer` as a single twist of `H`.
    pub fn stack(inner: &WordSystem, outer: &WordSystem) -> WordSystem {
        WordSystem {
            a: &inner.phi.apply(&outer.a) * &inner.a,
            phi: inner.phi.compose(&outer.phi),
        }
    }

    /// `W'` with `stack(W, W') = (1, id)`: `(phi^-1(a^-1), phi^-1)`.
    pub fn inverse(&self) -> WordSystem {
        let phi = self.phi.inverse();
        WordSystem {
            a: phi.apply(&self.a.inv()),
            phi,
        }
    }

    pub fn scalar(&self, lambda: &Scalar) -> Scalar {
        self.phi.apply(lambda)
    }
}

impl fmt::Display for WordSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a = {}, phi = {})", self.a, self.phi)
    }
}

/// `H*_W`: same underlying sets, verbal operations.
#[derive(Clone, Debug)]
pub struct TwistedRep {
    pub base: Arc<Representation>,
    pub w: WordSystem,
}

/// Builds `H*_W` after checking `W` against the field of `H`.
pub fn twist(h: Arc<Representation>, w: WordSystem) -> Result<TwistedRep, VerbalError> {
    w.validate(h.field())?;
    Ok(TwistedRep { base: h, w })
}

impl TwistedRep {
    pub fn scale_lie(&self, lambda: &Scalar, l: &LieElement) -> LieElement {
        l.scale(&self.w.scalar(lambda))
    }

    pub fn scale_module(&self, lambda: &Scalar, u: &ModuleElement) -> ModuleElement {
        u.scale(&self.w.scalar(lambda))
    }

    pub fn bracket(&self, u: &LieElement, v: &LieElement) -> LieElement {
        self.base.bracket(u, v).scale(&self.w.a)
    }

    pub fn act(&self, l: &LieElement, u: &ModuleElement) -> ModuleElement {
        self.base.act(l, u).scale(&self.w.a)
    }

    /// Twisting again: `(H*_W)*_V = H*_{stack(W, V)}`.
    pub fn retwist(&self, v: &WordSystem) -> TwistedRep {
        TwistedRep {
            base: self.base.clone(),
            w: WordSystem::stack(&self.w, v),
        }
    }
}

/// Summary of one executed family of checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl CheckRecord {
    fn new(name: &str) -> Self {
        CheckRecord {
            name: name.to_string(),
            cases: 0,
            passed: true,
            failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.passed {
            self.passed = false;
            self.failure = Some(describe());
        }
    }
}

/// Scalars used for semilinearity checks: a field generator and a rational.
fn test_scalars(field: FieldDescriptor) -> Vec<Scalar> {
    let mut out = vec![Scalar::ratio(3, 2)];
    if let Some(d) = field.radicand() {
        out.push(Scalar::sqrt(d));
        out.push(&Scalar::one() + &Scalar::sqrt(d));
    } else {
        out.push(Scalar::from_int(2));
    }
    out
}

fn random_field_scalar<R: Rng>(rng: &mut R, field: FieldDescriptor) -> Scalar {
    let p = Scalar::from_int(rng.gen_range(-4..=4));
    match field.radicand() {
        Some(d) => &p + &(&Scalar::from_int(rng.gen_range(-3..=3)) * &Scalar::sqrt(d)),
        None => p,
    }
}

/// The semilinear map `s_F : F -> F*_W` fixing the generators.
#[derive(Clone, Debug)]
pub struct SMap {
    pub rep: Arc<Representation>,
    pub w: WordSystem,
    map: Homomorphism,
    pub checks: Vec<CheckRecord>,
}

impl SMap {
    pub fn apply_lie(&self, l: &LieElement) -> LieElement {
        self.map.apply_lie(l).expect("element of the source")
    }

    pub fn apply_module(&self, u: &ModuleElement) -> ModuleElement {
        self.map.apply_module(u).expect("element of the source")
    }

    pub fn as_homomorphism(&self) -> &Homomorphism {
        &self.map
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn total_cases(&self) -> usize {
        self.checks.iter().map(|c| c.cases).sum()
    }
}

/// Number of seeded random elements in the s-map battery.
pub const S_MAP_RANDOM_SAMPLES: usize = 100;

/// Constructs `s_F` and verifies it is an isomorphism `F -> F*_W` fixing `X`.
pub fn s_map(f: Arc<Representation>, w: &WordSystem, seed: u64) -> Result<SMap, VerbalError> {
    w.validate(f.field())?;
    if !f.is_free() {
        return Err(VerbalError::Rep(RepError::SortMismatch(
            "s-maps are built on free representations".into(),
        )));
    }
    let tw = twist(f.clone(), w.clone())?;
    let map = Homomorphism::twisted(
        f.clone(),
        f.clone(),
        w.clone(),
        (0..f.n1()).map(LieElement::generator).collect(),
        (0..f.n2()).map(ModuleElement::generator).collect(),
    )?;
    let s = |l: &LieElement| map.apply_lie(l).expect("source element");
    let sm = |u: &ModuleElement| map.apply_module(u).expect("source element");
    let cap = f.cap();
    let lie_basis: Vec<LieElement> = f
        .lie_basis()
        .iter()
        .map(|e| LieElement::from_pbw(e.iota.clone()))
        .collect();
    let module_basis: Vec<ModuleElement> = f
        .module_basis()
        .into_iter()
        .map(ModuleElement::monomial)
        .collect();
    let mut checks = Vec::new();

    let mut fixes = CheckRecord::new("fixes generators");
    for i in 0..f.n1() {
        let x = LieElement::generator(i);
        fixes.record(s(&x) == x, || format!("s(x{}) != x{}", i + 1, i + 1));
    }
    for j in 0..f.n2() {
        let v = ModuleElement::generator(j);
        fixes.record(sm(&v) == v, || format!("s(v{}) != v{}", j + 1, j + 1));
    }
    checks.push(fixes);

    // the image of each basis monomial is the closed form a^(deg) * monomial
    let mut closed = CheckRecord::new("s(m v) = a^deg(m) phi(c) m v on basis monomials");
    for lambda in test_scalars(f.field()) {
        for u in &module_basis {
            let (k, _) = u.leading().expect("monomial");
            let expected = u.scale(&(&w.phi.apply(&lambda) * &w.a.pow(k.degree() as u32)));
            closed.record(sm(&u.scale(&lambda)) == expected, || format!("{lambda} * {u}"));
        }
    }
    checks.push(closed);

    let mut bij = CheckRecord::new("bijective on graded bases");
    let lie_rank = Echelon::from_vectors(lie_basis.iter().map(|l| &l.pbw)).rank();
    let lie_img: Vec<NCPoly> = lie_basis.iter().map(|l| s(l).pbw).collect();
    bij.record(Echelon::from_vectors(&lie_img).rank() == lie_rank, || "Lie sort rank drops".into());
    let mod_img: Vec<ModuleElement> = module_basis.iter().map(&sm).collect();
    bij.record(Echelon::from_vectors(&mod_img).rank() == module_basis.len(), || {
        "module sort rank drops".into()
    });
    checks.push(bij);

    let mut semi = CheckRecord::new("semilinear: s(lambda u) = phi(lambda) s(u)");
    for lambda in test_scalars(f.field()) {
        for l in &lie_basis {
            semi.record(
                s(&l.scale(&lambda)) == tw.scale_lie(&lambda, &s(l)),
                || format!("{lambda} * {}", l.pbw),
            );
        }
        for u in &module_basis {
            semi.record(sm(&u.scale(&lambda)) == tw.scale_module(&lambda, &sm(u)), || {
                format!("{lambda} * {u}")
            });
        }
    }
    checks.push(semi);

    let mut br = CheckRecord::new("s([u,v]) = a [s u, s v] on Lie basis pairs");
    for (i, u) in lie_basis.iter().enumerate() {
        for v in lie_basis.iter().skip(i + 1) {
            let du = u.min_degree().unwrap_or(0);
            let dv = v.min_degree().unwrap_or(0);
            if du + dv > cap {
                continue;
            }
            let lhs = s(&f.bracket(u, v));
            let rhs = tw.bracket(&s(u), &s(v));
            br.record(lhs == rhs, || format!("[{}, {}]", u.pbw, v.pbw));
        }
    }
    checks.push(br);

    let mut act = CheckRecord::new("s(l o u) = a (s l o s u) on basis pairs");
    for l in &lie_basis {
        for u in &module_basis {
            let lhs = sm(&f.act(l, u));
            let rhs = tw.act(&s(l), &sm(u));
            act.record(lhs == rhs, || format!("{} o {u}", l.pbw));
        }
    }
    checks.push(act);

    // compatibility with the projection from the absolutely free object: the
    // closed form maps S into S, so s descends through nu
    let mut nu = CheckRecord::new("s commutes with the projection from the free object");
    for row in f.algebra().ideal().all_rows() {
        let deg = row.degree().unwrap_or(0) as u32;
        let image = row.map_scalars(|c| w.phi.apply(c)).scale(&w.a.pow(deg));
        nu.record(f.algebra().ideal().contains(&image), || format!("{row}"));
    }
    for u in &module_basis {
        let lifted = u.clone();
        let direct = sm(&f.reduce_module(&lifted));
        nu.record(direct == f.reduce_module(&sm(&lifted)), || format!("{u}"));
    }
    checks.push(nu);

    let mut rnd = CheckRecord::new("seeded random elements");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..S_MAP_RANDOM_SAMPLES {
        let u = random_lie(f.lie_basis(), &mut rng, 3);
        let v = random_lie(f.lie_basis(), &mut rng, 3);
        let m = random_module(&f, &mut rng, cap);
        let n = random_module(&f, &mut rng, cap);
        let lambda = random_field_scalar(&mut rng, f.field());
        let sum = u.scale(&lambda).add(&v);
        rnd.record(
            s(&sum) == tw.scale_lie(&lambda, &s(&u)).add(&s(&v)),
            || format!("Lie additivity at {}", sum.pbw),
        );
        rnd.record(
            sm(&(&m.scale(&lambda) + &n)) == &tw.scale_module(&lambda, &sm(&m)) + &sm(&n),
            || format!("module additivity at {m}"),
        );
        rnd.record(s(&f.bracket(&u, &v)) == tw.bracket(&s(&u), &s(&v)), || {
            format!("bracket at {}, {}", u.pbw, v.pbw)
        });
        rnd.record(sm(&f.act(&u, &m)) == tw.act(&s(&u), &sm(&m)), || {
            format!("action at {} o {m}", u.pbw)
        });
    }
    checks.push(rnd);

    let out = SMap {
        rep: f,
        w: w.clone(),
        map,
        checks,
    };
    if let Some(bad) = out.checks.iter().find(|c| !c.passed) {
        return Err(VerbalError::NotIsomorphism(format!(
            "{}: {}",
            bad.name,
            bad.failure.clone().unwrap_or_default()
        )));
    }
    Ok(out)
}

/// A candidate system of words in the general shape
/// `w_lambda(1) = phi(lambda) x`, `w_lambda(2) = psi(lambda) v`,
/// `w_[,] = a [x1, x2]`, `w_o = f(x) o v` with `f = sum_k action[k-1] x^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateWords {
    pub lie_scalar: FieldAutomorphism,
    pub module_scalar: FieldAutomorphism,
    pub bracket: Scalar,
    pub action: Vec<Scalar>,
}

impl CandidateWords {
    pub fn template(w: &WordSystem) -> Self {
        CandidateWords {
            lie_scalar: w.phi,
            module_scalar: w.phi,
            bracket: w.a.clone(),
            action: vec![w.a.clone()],
        }
    }

    /// The word system when the candidate has the `(a, phi)` shape.
    pub fn as_word_system(&self) -> Option<WordSystem> {
        let linear = self.action.len() == 1 || self.action[1..].iter().all(|c| c.is_zero());
        if linear
            && self.lie_scalar == self.module_scalar
            && self.action.first() == Some(&self.bracket)
            && !self.bracket.is_zero()
        {
            Some(WordSystem {
                a: self.bracket.clone(),
                phi: self.lie_scalar,
            })
        } else {
            None
        }
    }

    fn act(&self, f: &Representation, l: &LieElement, u: &ModuleElement) -> ModuleElement {
        let mut out = ModuleElement::zero();
        let mut power = u.clone();
        for c in &self.action {
            power = f.act(l, &power);
            out.add_scaled(&power, c);
        }
        out
    }

    fn bracket_op(&self, f: &Representation, u: &LieElement, v: &LieElement) -> LieElement {
        f.bracket(u, v).scale(&self.bracket)
    }

    pub fn describe(&self) -> String {
        let f: Vec<String> = self
            .action
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                if k == 0 {
                    format!("({c})*x")
                } else {
                    format!("({c})*x^{}", k + 1)
                }
            })
            .collect();
        format!(
            "w_lambda(1) = {}(lambda) x, w_lambda(2) = {}(lambda) v, w_[,] = ({}) [x1,x2], w_o = ({}) o v",
            self.lie_scalar,
            self.module_scalar,
            self.bracket,
            f.join(" + ")
        )
    }
}

/// One forcing identity evaluated for one candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub object: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

fn lambda_compatibility(
    c: &CandidateWords,
    f1: &Representation,
) -> IdentityCheck {
    let lambda = Scalar::from_int(2);
    let x = LieElement::generator(0);
    let v = ModuleElement::generator(0);
    let lhs = c.act(f1, &x, &v).scale(&c.module_scalar.apply(&lambda));
    let rhs = c.act(f1, &x.scale(&c.lie_scalar.apply(&lambda)), &v);
    IdentityCheck {
        identity: "lambda (x o v) = (lambda x) o v at lambda = 2".into(),
        object: "F(x, v)".into(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds: lhs == rhs,
    }
}

fn jacobi_action(c: &CandidateWords, f2: &Representation) -> IdentityCheck {
    let x1 = LieElement::generator(0);
    let x2 = LieElement::generator(1);
    let v = ModuleElement::generator(0);
    let lhs = c.act(f2, &c.bracket_op(f2, &x1, &x2), &v);
    let rhs = &c.act(f2, &x1, &c.act(f2, &x2, &v)) - &c.act(f2, &x2, &c.act(f2, &x1, &v));
    IdentityCheck {
        identity: "[x1,x2] o v = x1 o (x2 o v) - x2 o (x1 o v)".into(),
        object: "F(x1, x2, v)".into(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds: lhs == rhs,
    }
}

fn mixed_lambda(c: &CandidateWords, f1: &Representation) -> Option<IdentityCheck> {
    let d = f1.field().radicand()?;
    let lambda = Scalar::sqrt(d);
    let x = LieElement::generator(0);
    let v = ModuleElement::generator(0);
    let lhs = c.act(f1, &x.scale(&c.lie_scalar.apply(&lambda)), &v);
    let rhs = c.act(f1, &x, &v.scale(&c.module_scalar.apply(&lambda)));
    Some(IdentityCheck {
        identity: format!("(lambda x) o v = x o (lambda v) at lambda = sqrt({d})"),
        object: "F(x, v)".into(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds: lhs == rhs,
    })
}

/// Verdict of the forcing identities on one candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateVerdict {
    pub label: String,
    pub candidate: String,
    pub checks: Vec<IdentityCheck>,
    pub accepted: bool,
}

fn evaluate_candidate(
    label: &str,
    c: &CandidateWords,
    f1: &Representation,
    f2: &Representation,
) -> CandidateVerdict {
    let mut checks = vec![lambda_compatibility(c, f1), jacobi_action(c, f2)];
    if let Some(m) = mixed_lambda(c, f1) {
        checks.push(m);
    }
    CandidateVerdict {
        label: label.to_string(),
        candidate: c.describe(),
        accepted: checks.iter().all(|k| k.holds),
        checks,
    }
}

/// Outcome of [`derive_word_constraints`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordConstraintReport {
    pub field: FieldDescriptor,
    pub template: String,
    pub verdicts: Vec<CandidateVerdict>,
    /// Set when `psi != phi` candidates cannot exist because `Aut k` is trivial.
    pub psi_vacuous: bool,
}

impl WordConstraintReport {
    pub fn verdict(&self, label: &str) -> Option<&CandidateVerdict> {
        self.verdicts.iter().find(|v| v.label == label)
    }
}

fn sample_a(field: FieldDescriptor) -> Vec<Scalar> {
    let mut out = vec![Scalar::one(), Scalar::from_int(2)];
    if let Some(d) = field.radicand() {
        out.push(&Scalar::one() + &Scalar::sqrt(d));
    }
    out
}

/// Runs the three forcing identities in `F(x, v)` and `F(x1, x2, v)` on the
/// template instances and on the rejected shapes.
pub fn derive_word_constraints(v: &VarietyDescriptor) -> Result<WordConstraintReport, VerbalError> {
    if !v.is_nondegenerate()? {
        return Err(VerbalError::DegenerateVariety);
    }
    if !v.is_nontrivial()? {
        return Err(VerbalError::Rep(RepError::TrivialVariety));
    }
    let f1 = Representation::free(v, 1, 1)?;
    let f2 = Representation::free(v, 2, 1)?;
    let mut verdicts = Vec::new();
    for a in sample_a(v.field) {
        for phi in v.field.automorphism_group() {
            let w = WordSystem::new(a.clone(), phi)?;
            verdicts.push(evaluate_candidate(
                &format!("template a = {a}, phi = {phi}"),
                &CandidateWords::template(&w),
                &f1,
                &f2,
            ));
        }
    }
    let mut square = CandidateWords::template(&WordSystem::identity());
    square.action = vec![Scalar::zero(), Scalar::one()];
    verdicts.push(evaluate_candidate("f = x^2", &square, &f1, &f2));

    let mut a_ne_b = CandidateWords::template(&WordSystem::identity());
    a_ne_b.bracket = Scalar::from_int(2);
    verdicts.push(evaluate_candidate("a != b", &a_ne_b, &f1, &f2));

    let psi_vacuous = v.field.radicand().is_none();
    if !psi_vacuous {
        let mut psi = CandidateWords::template(&WordSystem::identity());
        psi.module_scalar = FieldAutomorphism::Conjugation;
        verdicts.push(evaluate_candidate("psi != phi", &psi, &f1, &f2));
    }
    Ok(WordConstraintReport {
        field: v.field,
        template: "w_lambda(1) = phi(lambda) x, w_lambda(2) = phi(lambda) v, w_[,] = a [x1,x2], \
                   w_o = a (x o v); a in k*, phi in Aut k"
            .into(),
        verdicts,
        psi_vacuous,
    })
}

/// Outcome of a Condition-style check over a fleet of free objects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub holds: bool,
    pub witness: Option<IdentityCheck>,
    pub members: Vec<(String, bool)>,
}

/// Default fleet `F(x, v)`, `F(x1, x2, v)`.
pub fn default_fleet(v: &VarietyDescriptor) -> Result<Vec<Arc<Representation>>, VerbalError> {
    Ok(vec![
        Arc::new(Representation::free(v, 1, 1)?),
        Arc::new(Representation::free(v, 2, 1)?),
    ])
}

/// Whether every `s_F` over the fleet is an isomorphism `F -> F*_W`.
pub fn check_condition(w: &WordSystem, fleet: &[Arc<Representation>]) -> ConditionReport {
    check_candidate(&CandidateWords::template(w), fleet)
}

/// Like [`check_condition`] for a candidate not necessarily of `(a, phi)` shape:
/// the forcing identities run first and give the witness on failure.
pub fn check_candidate(c: &CandidateWords, fleet: &[Arc<Representation>]) -> ConditionReport {
    let one = fleet.iter().find(|f| f.n1() >= 1 && f.n2() >= 1);
    let two = fleet.iter().find(|f| f.n1() >= 2 && f.n2() >= 1);
    if let (Some(f1), Some(f2)) = (one, two) {
        let verdict = evaluate_candidate("candidate", c, f1, f2);
        if let Some(bad) = verdict.checks.into_iter().find(|k| !k.holds) {
            return ConditionReport {
                holds: false,
                witness: Some(bad),
                members: Vec::new(),
            };
        }
    }
    let Some(w) = c.as_word_system() else {
        return ConditionReport {
            holds: false,
            witness: None,
            members: Vec::new(),
        };
    };
    let members: Vec<(String, bool)> = fleet
        .iter()
        .map(|f| (f.name().to_string(), s_map(f.clone(), &w, 0).is_ok()))
        .collect();
    ConditionReport {
        holds: members.iter().all(|(_, ok)| *ok),
        witness: None,
        members,
    }
}

/// One morphism of the naturality battery, with the outcome of the check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaturalityRecord {
    pub morphism: String,
    pub source: String,
    pub target: String,
    pub elements_checked: usize,
    pub commutes: bool,
}

/// Executed contradiction for a non-inner system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotInnerWitness {
    pub object: String,
    pub lambda: Scalar,
    pub phi_lambda: Scalar,
    /// `tau(mu_lambda v) - mu_lambda(tau v)` for `tau(v) = c v`, as a polynomial in `c`.
    pub residual: String,
    /// Only solution of `residual = 0`.
    pub forced: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum InnerVerdict {
    Inner {
        tau: String,
        isomorphism_checks: Vec<CheckRecord>,
        naturality: Vec<NaturalityRecord>,
    },
    NotInner {
        witness: NotInnerWitness,
    },
}

impl InnerVerdict {
    pub fn is_inner(&self) -> bool {
        matches!(self, InnerVerdict::Inner { .. })
    }

    /// Every executed check passed.
    pub fn checks_pass(&self) -> bool {
        match self {
            InnerVerdict::Inner {
                isomorphism_checks,
                naturality,
                ..
            } => isomorphism_checks.iter().all(|c| c.passed) && naturality.iter().all(|n| n.commutes),
            InnerVerdict::NotInner { witness } => witness.phi_lambda != witness.lambda,
        }
    }
}

/// Checks the hypotheses of the quotient-group theorem on `v`.
pub fn check_hypotheses(v: &VarietyDescriptor) -> Result<(), VerbalError> {
    if !v.is_nontrivial()? {
        return Err(VerbalError::HypothesisViolation("the variety is trivial".into()));
    }
    if !v.is_nondegenerate()? {
        return Err(VerbalError::HypothesisViolation("the variety is degenerate".into()));
    }
    if !v.integer_coefficients() {
        return Err(VerbalError::HypothesisViolation(
            "identities must have integer coefficients".into(),
        ));
    }
    Ok(())
}

/// `tau_F : F -> F*_W`, scaling sort 1 by `a^-1` and fixing sort 2.
pub fn tau(f: Arc<Representation>, w: &WordSystem) -> Result<Homomorphism, VerbalError> {
    let inv = w.a.inv();
    Ok(Homomorphism::twisted(
        f.clone(),
        f.clone(),
        w.clone(),
        (0..f.n1()).map(|i| LieElement::generator(i).scale(&inv)).collect(),
        (0..f.n2()).map(ModuleElement::generator).collect(),
    )?)
}

fn tau_checks(f: &Arc<Representation>, w: &WordSystem, t: &Homomorphism) -> Vec<CheckRecord> {
    let tw = TwistedRep {
        base: f.clone(),
        w: w.clone(),
    };
    let inv = w.a.inv();
    let lie_basis: Vec<LieElement> = f
        .lie_basis()
        .iter()
        .map(|e| LieElement::from_pbw(e.iota.clone()))
        .collect();
    let module_basis: Vec<ModuleElement> = f
        .module_basis()
        .into_iter()
        .map(ModuleElement::monomial)
        .collect();
    let tl = |l: &LieElement| t.apply_lie(l).expect("source element");
    let tm = |u: &ModuleElement| t.apply_module(u).expect("source element");

    let mut shape = CheckRecord::new(&format!("{}: tau scales sort 1 by a^-1, fixes sort 2", f.name()));
    for l in &lie_basis {
        shape.record(tl(l) == l.scale(&inv), || format!("{}", l.pbw));
    }
    for u in &module_basis {
        shape.record(tm(u) == *u, || format!("{u}"));
    }
    let mut br = CheckRecord::new(&format!("{}: tau[u,v] = a [tau u, tau v]", f.name()));
    for (i, u) in lie_basis.iter().enumerate() {
        for v in lie_basis.iter().skip(i + 1) {
            if u.min_degree().unwrap_or(0) + v.min_degree().unwrap_or(0) > f.cap() {
                continue;
            }
            br.record(tl(&f.bracket(u, v)) == tw.bracket(&tl(u), &tl(v)), || {
                format!("[{}, {}]", u.pbw, v.pbw)
            });
        }
    }
    let mut act = CheckRecord::new(&format!("{}: tau(l o u) = a (tau l o tau u)", f.name()));
    for l in &lie_basis {
        for u in &module_basis {
            act.record(tm(&f.act(l, u)) == tw.act(&tl(l), &tm(u)), || {
                format!("{} o {u}", l.pbw)
            });
        }
    }
    let mut lin = CheckRecord::new(&format!("{}: tau is linear (phi = id)", f.name()));
    for lambda in test_scalars(f.field()) {
        for u in &module_basis {
            lin.record(tm(&u.scale(&lambda)) == tw.scale_module(&lambda, &tm(u)), || {
                format!("{lambda} * {u}")
            });
        }
    }
    let mut bij = CheckRecord::new(&format!("{}: tau is bijective", f.name()));
    let img: Vec<ModuleElement> = module_basis.iter().map(&tm).collect();
    bij.record(Echelon::from_vectors(&img).rank() == module_basis.len(), || "rank drop".into());
    let limg: Vec<NCPoly> = lie_basis.iter().map(|l| tl(l).pbw).collect();
    bij.record(Echelon::from_vectors(&limg).rank() == lie_basis.len(), || "rank drop".into());
    vec![shape, br, act, lin, bij]
}

/// The morphism battery: generator permutations and scalings plus seeded
/// non-graded substitutions (the first is `x1 -> x1 + [x1,x2]`).
pub fn morphism_battery(
    f1: &Arc<Representation>,
    f2: &Arc<Representation>,
    seed: u64,
    random_count: usize,
) -> Result<Vec<Homomorphism>, VerbalError> {
    let mut out = Vec::new();
    let x = |i| LieElement::generator(i);
    let v = |j| ModuleElement::generator(j);
    // graded: swap, scalings
    out.push(Homomorphism::new(f2.clone(), f2.clone(), vec![x(1), x(0)], vec![v(0)])?);
    for c in [Scalar::from_int(2), Scalar::ratio(-1, 3)] {
        out.push(Homomorphism::new(
            f2.clone(),
            f2.clone(),
            vec![x(0).scale(&c), x(1)],
            vec![v(0)],
        )?);
        out.push(Homomorphism::new(
            f2.clone(),
            f2.clone(),
            vec![x(0), x(1)],
            vec![v(0).scale(&c)],
        )?);
    }
    if let Some(d) = f2.field().radicand() {
        out.push(Homomorphism::new(
            f2.clone(),
            f2.clone(),
            vec![x(0), x(1)],
            vec![v(0).scale(&Scalar::sqrt(d))],
        )?);
    }
    out.push(Homomorphism::new(f1.clone(), f2.clone(), vec![x(1)], vec![v(0)])?);
    // non-graded
    let c12 = x(0).bracket(&x(1));
    out.push(Homomorphism::new(
        f2.clone(),
        f2.clone(),
        vec![x(0).add(&c12), x(1)],
        vec![v(0)],
    )?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 1..random_count {
        let mut images = Vec::new();
        for i in 0..2 {
            let extra = random_lie(f2.lie_basis(), &mut rng, 3).pbw.filter(|w| w.degree() >= 2);
            let lin = &NCPoly::letter(i).scale(&Scalar::from_int(rng.gen_range(1..=3)))
                + &NCPoly::letter(1 - i).scale(&Scalar::from_int(rng.gen_range(-2..=2)));
            images.push(LieElement::from_pbw(&lin + &extra));
        }
        let mut m = random_module(f2, &mut rng, 2);
        m.add_term(
            crate::representation::ModKey::new(crate::freealg::Word::unit(), 0),
            Scalar::one(),
        );
        out.push(Homomorphism::new(f2.clone(), f2.clone(), images, vec![m])?);
    }
    Ok(out)
}

/// Number of seeded non-graded substitutions in the naturality battery.
pub const BATTERY_RANDOM: usize = 16;

/// Decides whether the automorphism given by `W` is inner.
pub fn is_inner(w: &WordSystem, v: &VarietyDescriptor, seed: u64) -> Result<InnerVerdict, VerbalError> {
    check_hypotheses(v)?;
    w.validate(v.field)?;
    if w.phi.is_identity() {
        let f1 = Arc::new(Representation::free(v, 1, 1)?.with_name("F(x, v)"));
        let f2 = Arc::new(Representation::free(v, 2, 1)?.with_name("F(x1, x2, v)"));
        let t1 = tau(f1.clone(), w)?;
        let t2 = tau(f2.clone(), w)?;
        let mut checks = tau_checks(&f1, w, &t1);
        checks.extend(tau_checks(&f2, w, &t2));
        let battery = morphism_battery(&f1, &f2, seed, BATTERY_RANDOM)?;
        let naturality = battery
            .iter()
            .map(|mu| naturality_record(mu, w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(InnerVerdict::Inner {
            tau: format!("x_i -> ({}) x_i, v_j -> v_j", w.a.inv()),
            isomorphism_checks: checks,
            naturality,
        })
    } else {
        Ok(InnerVerdict::NotInner {
            witness: not_inner_witness(v.field, w)?,
        })
    }
}

/// `tau_target . mu == mu . tau_source` on every basis element of the source.
pub fn naturality_record(mu: &Homomorphism, w: &WordSystem) -> Result<NaturalityRecord, VerbalError> {
    let ts = tau(mu.source.clone(), w)?;
    let tt = tau(mu.target.clone(), w)?;
    let mut n = 0;
    let mut ok = true;
    for e in mu.source.lie_basis().iter() {
        let l = LieElement::from_pbw(e.iota.clone());
        let lhs = tt.apply_lie(&mu.apply_lie(&l)?)?;
        let rhs = mu.apply_lie(&ts.apply_lie(&l)?)?;
        n += 1;
        ok &= mu.target.reduce_lie(&lhs) == mu.target.reduce_lie(&rhs);
    }
    for k in mu.source.module_basis() {
        let u = ModuleElement::monomial(k);
        let lhs = tt.apply_module(&mu.apply_module(&u)?)?;
        let rhs = mu.apply_module(&ts.apply_module(&u)?)?;
        n += 1;
        ok &= lhs == rhs;
    }
    Ok(NaturalityRecord {
        morphism: mu.describe(),
        source: mu.source.name().to_string(),
        target: mu.target.name().to_string(),
        elements_checked: n,
        commutes: ok,
    })
}

/// Scalar endomorphism `mu_lambda : v -> lambda v` of `F(v)` with `phi(lambda) != lambda`.
pub fn not_inner_witness(field: FieldDescriptor, w: &WordSystem) -> Result<NotInnerWitness, VerbalError> {
    let lambda = field.generator();
    let phi_lambda = field.apply_automorphism(w.phi, &lambda)?;
    if phi_lambda == lambda {
        return Err(VerbalError::HypothesisViolation(
            "phi fixes the field generator, so phi = id".into(),
        ));
    }
    // tau(v) = c v; naturality needs tau(lambda v) = lambda tau(v), while any
    // map into F(v)*_W is phi-semilinear: tau(lambda v) = phi(lambda) tau(v)
    let c = MPoly::var(0);
    let lhs = c.scale(&phi_lambda);
    let rhs = c.scale(&lambda);
    let residual = &lhs - &rhs;
    Ok(NotInnerWitness {
        object: "F(v)".into(),
        lambda,
        phi_lambda,
        residual: residual.format_with(&["c".into()]),
        forced: "c = 0, so tau(v) = 0 and tau is not injective".into(),
    })
}

/// One coset of the quotient group with its innerness verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetEntry {
    pub phi: FieldAutomorphism,
    pub representative: WordSystem,
    pub inner: bool,
}

/// Scaling-only systems and the coset they fall in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingSample {
    pub system: WordSystem,
    pub inner: bool,
    pub coset: FieldAutomorphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescription {
    pub field: FieldDescriptor,
    pub order: usize,
    pub cosets: Vec<CosetEntry>,
    pub scaling_samples: Vec<ScalingSample>,
}

impl GroupDescription {
    pub fn describe(&self) -> String {
        match self.order {
            1 => "trivial group".into(),
            2 => "cyclic group of order 2".into(),
            n => format!("group of order {n}"),
        }
    }
}

/// Enumerates `Aut k` with representatives `(1, phi)` and their verdicts.
pub fn quotient_group_description(
    v: &VarietyDescriptor,
    seed: u64,
) -> Result<GroupDescription, VerbalError> {
    check_hypotheses(v)?;
    let mut cosets = Vec::new();
    for phi in v.field.automorphism_group() {
        let w = WordSystem::new(Scalar::one(), phi)?;
        let verdict = is_inner(&w, v, seed)?;
        cosets.push(CosetEntry {
            phi,
            representative: w,
            inner: verdict.is_inner() && verdict.checks_pass(),
        });
    }
    let mut scaling_samples = Vec::new();
    let mut samples = vec![Scalar::from_int(2), Scalar::ratio(-1, 2)];
    if let Some(d) = v.field.radicand() {
        samples.push(&Scalar::one() + &Scalar::sqrt(d));
    }
    for a in samples {
        let w = WordSystem::new(a, FieldAutomorphism::Identity)?;
        let verdict = is_inner(&w, v, seed)?;
        scaling_samples.push(ScalingSample {
            inner: verdict.is_inner() && verdict.checks_pass(),
            coset: w.phi,
            system: w,
        });
    }
    Ok(GroupDescription {
        field: v.field,
        order: cosets.len(),
        cosets,
        scaling_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> FieldDescriptor {
        FieldDescriptor::quadratic(2).unwrap()
    }

    #[test]
    fn word_system_inverse() {
        let w = WordSystem::new(&Scalar::one() + &Scalar::sqrt(2), FieldAutomorphism::Conjugation).unwrap();
        assert!(WordSystem::stack(&w, &w.inverse()).is_identity());
        let r = WordSystem::new(Scalar::from_int(2), FieldAutomorphism::Conjugation).unwrap();
        assert_eq!(r.inverse().a, Scalar::ratio(1, 2));
        assert_eq!(WordSystem::new(Scalar::zero(), FieldAutomorphism::Identity), Err(VerbalError::ZeroScalar));
    }

    #[test]
    fn twisted_operations() {
        let v = VarietyDescriptor::degree_six(q2());
        let f = Arc::new(Representation::free(&v, 2, 1).unwrap());
        let conj = twist(f.clone(), WordSystem::new(Scalar::one(), FieldAutomorphism::Conjugation).unwrap()).unwrap();
        let u = ModuleElement::generator(0);
        assert_eq!(conj.scale_module(&Scalar::sqrt(2), &u), u.scale(&-Scalar::sqrt(2)));
        let two = twist(f.clone(), WordSystem::new(Scalar::from_int(2), FieldAutomorphism::Identity).unwrap()).unwrap();
        let x1 = LieElement::generator(0);
        let x2 = LieElement::generator(1);
        assert_eq!(two.bracket(&x1, &x2), x1.bracket(&x2).scale(&Scalar::from_int(2)));
        let id = twist(f.clone(), WordSystem::identity()).unwrap();
        assert_eq!(id.act(&x1, &u), f.act(&x1, &u));
    }

    #[test]
    fn s_map_examples() {
        let v = VarietyDescriptor::degree_six(FieldDescriptor::Rationals);
        let f = Arc::new(Representation::free(&v, 2, 1).unwrap());
        let w = WordSystem::new(Scalar::from_int(2), FieldAutomorphism::Identity).unwrap();
        let s = s_map(f, &w, 1).unwrap();
        let c = LieElement::generator(0).bracket(&LieElement::generator(1));
        assert_eq!(s.apply_lie(&c), c.scale(&Scalar::from_int(2)));
        let u = ModuleElement::from_poly(&NCPoly::word(&[0, 1]), 0);
        assert_eq!(s.apply_module(&u), u.scale(&Scalar::from_int(4)));
        assert_eq!(s.apply_lie(&LieElement::generator(0)), LieElement::generator(0));
        assert!(s.passed());
    }

    #[test]
    fn forcing_identities() {
        let v = VarietyDescriptor::degree_six(q2());
        let r = derive_word_constraints(&v).unwrap();
        assert!(!r.verdict("f = x^2").unwrap().accepted);
        assert!(!r.verdict("a != b").unwrap().accepted);
        assert!(!r.verdict("psi != phi").unwrap().accepted);
        assert!(r.verdicts.iter().filter(|x| x.label.starts_with("template")).all(|x| x.accepted));
    }

    #[test]
    fn malformed_candidate_fails_condition() {
        let v = VarietyDescriptor::degree_six(FieldDescriptor::Rationals);
        let fleet = default_fleet(&v).unwrap();
        let mut c = CandidateWords::template(&WordSystem::identity());
        c.bracket = Scalar::from_int(2);
        let r = check_candidate(&c, &fleet);
        assert!(!r.holds);
        assert!(r.witness.unwrap().identity.starts_with("[x1,x2] o v"));
    }

    #[test]
    fn not_inner_witness_for_conjugation() {
        let w = WordSystem::new(Scalar::one(), FieldAutomorphism::Conjugation).unwrap();
        let wit = not_inner_witness(q2(), &w).unwrap();
        assert_eq!(wit.lambda, Scalar::sqrt(2));
        assert_eq!(wit.residual, "(-2*sqrt(2))*c");
    }
}
