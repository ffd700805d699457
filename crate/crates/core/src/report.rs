//! Versioned reports: a machine-readable payload plus a narrative, and the
//! re-validation used by `--verify`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, TargetConfig};
use crate::field::{FieldDescriptor, Scalar};
use crate::freelie::witt_number;
use crate::geometry::{
    closure, separation_example_with, ClosureCertificate, ClosureOptions, EquationSystem,
    GeometryError, SeparationOptions, SeparationReport,
};
use crate::representation::RepError;
use crate::verbal::{is_inner, quotient_group_description, s_map, CheckRecord, GroupDescription, InnerVerdict, VerbalError, WordSystem};

pub const SCHEMA: &str = "repgeo/report";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Verbal(#[from] VerbalError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("unsupported report schema {0}")]
    Schema(String),
    #[error("malformed report: {0}")]
    Json(String),
    #[error("verification failed: {0}")]
    Mismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisReport {
    pub n1: usize,
    pub n2: usize,
    pub lyndon_counts: Vec<usize>,
    pub witt_numbers: Vec<usize>,
    pub ranks: Vec<usize>,
    pub images_independent: bool,
    /// `dim A(x_1..x_n1)` per degree `0..=cap`.
    pub algebra_dims: Vec<usize>,
    pub algebra_dim: usize,
    /// Module sort of `F(n1, n2)` per degree.
    pub module_dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IbnReport {
    pub n1: usize,
    pub n2: usize,
    pub invariants: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistReport {
    pub system: WordSystem,
    pub n1: usize,
    pub n2: usize,
    pub checks: Vec<CheckRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerReport {
    pub system: WordSystem,
    pub verdict: InnerVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub equations: Vec<String>,
    pub target: TargetConfig,
    pub closure: Vec<String>,
    pub dims_by_degree: Vec<usize>,
    pub certificate: ClosureCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Basis(BasisReport),
    Ibn(IbnReport),
    Twist(TwistReport),
    Inner(InnerReport),
    Group(GroupDescription),
    Closure(Box<ClosureReport>),
    Separation(Box<SeparationReport>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: u32,
    pub command: String,
    pub config: RunConfig,
    pub passed: bool,
    pub narrative: String,
    pub payload: Payload,
}

impl Report {
    fn new(command: &str, config: &RunConfig, passed: bool, narrative: String, payload: Payload) -> Self {
        Report {
            schema: SCHEMA.into(),
            version: SCHEMA_VERSION,
            command: command.into(),
            config: config.clone(),
            passed,
            narrative,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let r: Report = serde_json::from_str(text).map_err(|e| ReportError::Json(e.to_string()))?;
        if r.schema != SCHEMA || r.version != SCHEMA_VERSION {
            return Err(ReportError::Schema(format!("{} v{}", r.schema, r.version)));
        }
        Ok(r)
    }

    /// Re-derives or re-checks the payload using only the report itself.
    pub fn verify(&self) -> Result<(), ReportError> {
        let cfg = &self.config;
        let mismatch = |what: &str| Err(ReportError::Mismatch(format!("{what} differs on recomputation")));
        match &self.payload {
            Payload::Basis(b) => {
                let mut c = cfg.clone();
                c.n1 = b.n1;
                c.n2 = b.n2;
                if basis_report(&c)? != *b {
                    return mismatch("basis data");
                }
            }
            Payload::Ibn(r) => {
                let mut c = cfg.clone();
                c.n1 = r.n1;
                c.n2 = r.n2;
                if c.free()?.ibn_invariants()? != r.invariants {
                    return mismatch("IBN invariants");
                }
            }
            Payload::Twist(t) => {
                let mut c = cfg.clone();
                c.n1 = t.n1;
                c.n2 = t.n2;
                if s_map(c.free()?, &t.system, cfg.seed)?.checks != t.checks {
                    return mismatch("s-map battery");
                }
            }
            Payload::Inner(r) => {
                let v = cfg.variety()?;
                if is_inner(&r.system, &v, cfg.seed)? != r.verdict {
                    return mismatch("innerness verdict");
                }
                if !r.verdict.checks_pass() {
                    return Err(ReportError::Mismatch("a recorded check failed".into()));
                }
            }
            Payload::Group(g) => {
                if quotient_group_description(&cfg.variety()?, cfg.seed)? != *g {
                    return mismatch("group description");
                }
            }
            Payload::Closure(c) => {
                c.certificate.verify(&cfg.variety()?)?;
            }
            Payload::Separation(s) => {
                if s.field != cfg.field {
                    return mismatch("field");
                }
                s.verify()?;
                if s.passed() != self.passed {
                    return mismatch("verdict");
                }
            }
        }
        Ok(())
    }
}

fn basis_report(cfg: &RunConfig) -> Result<BasisReport, ReportError> {
    let f = cfg.free()?;
    let lie = f.lie_basis();
    let algebra = f.algebra();
    let algebra_dims = (0..=f.cap())
        .map(|n| algebra.dim_component(n).unwrap_or(0))
        .collect::<Vec<_>>();
    Ok(BasisReport {
        n1: cfg.n1,
        n2: cfg.n2,
        lyndon_counts: lie.counts(),
        witt_numbers: (1..=f.cap()).map(|n| witt_number(cfg.n1, n)).collect(),
        ranks: (1..=f.cap()).map(|n| lie.rank(n)).collect(),
        images_independent: lie.images_independent(),
        algebra_dim: algebra.total_dim(),
        algebra_dims,
        module_dims: (0..=f.cap()).map(|n| f.module_dim_degree(n)).collect(),
    })
}

pub fn basis(cfg: &RunConfig) -> Result<Report, ReportError> {
    let b = basis_report(cfg)?;
    let passed = b.images_independent && b.lyndon_counts == b.witt_numbers && b.ranks == b.lyndon_counts;
    let narrative = format!(
        "Lyndon counts {:?} (Witt numbers {:?}), ranks {:?}; dim A = {} by degree {:?}; module sort of F({}, {}) by degree {:?}.\n",
        b.lyndon_counts, b.witt_numbers, b.ranks, b.algebra_dim, b.algebra_dims, b.n1, b.n2, b.module_dims
    );
    Ok(Report::new("basis", cfg, passed, narrative, Payload::Basis(b)))
}

pub fn ibn(cfg: &RunConfig) -> Result<Report, ReportError> {
    let inv = cfg.free()?.ibn_invariants()?;
    let passed = inv == (cfg.n1, cfg.n2);
    let narrative = format!(
        "F({}, {}): dim L/[L,L] = {}, dim F2/(F1 o F2) = {}; the generator counts are {}recovered.\n",
        cfg.n1,
        cfg.n2,
        inv.0,
        inv.1,
        if passed { "" } else { "not " }
    );
    let payload = Payload::Ibn(IbnReport {
        n1: cfg.n1,
        n2: cfg.n2,
        invariants: inv,
    });
    Ok(Report::new("ibn", cfg, passed, narrative, payload))
}

pub fn twist(cfg: &RunConfig, w: &WordSystem) -> Result<Report, ReportError> {
    let s = s_map(cfg.free()?, w, cfg.seed)?;
    let mut narrative = format!("s_F : F({}, {}) -> F*_W for W = {w}\n", cfg.n1, cfg.n2);
    for c in &s.checks {
        narrative.push_str(&format!(
            "[{}] {} ({} cases){}\n",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.cases,
            c.failure.as_deref().map(|f| format!(": {f}")).unwrap_or_default()
        ));
    }
    let payload = Payload::Twist(TwistReport {
        system: w.clone(),
        n1: cfg.n1,
        n2: cfg.n2,
        checks: s.checks.clone(),
    });
    Ok(Report::new("twist", cfg, s.passed(), narrative, payload))
}

pub fn inner(cfg: &RunConfig, w: &WordSystem) -> Result<Report, ReportError> {
    let verdict = is_inner(w, &cfg.variety()?, cfg.seed)?;
    let narrative = match &verdict {
        InnerVerdict::Inner { tau, isomorphism_checks, naturality } => format!(
            "W = {w} gives an inner automorphism: tau = {tau}; {} isomorphism checks and {} naturality squares pass: {}.\n",
            isomorphism_checks.len(),
            naturality.len(),
            verdict.checks_pass()
        ),
        InnerVerdict::NotInner { witness } => format!(
            "W = {w} is not inner: on {} with lambda = {}, phi(lambda) = {}, naturality for v -> lambda v leaves {} = 0, so {}.\n",
            witness.object, witness.lambda, witness.phi_lambda, witness.residual, witness.forced
        ),
    };
    let passed = verdict.checks_pass();
    let payload = Payload::Inner(InnerReport {
        system: w.clone(),
        verdict,
    });
    Ok(Report::new("inner", cfg, passed, narrative, payload))
}

pub fn group(cfg: &RunConfig) -> Result<Report, ReportError> {
    let g = quotient_group_description(&cfg.variety()?, cfg.seed)?;
    let mut narrative = format!(
        "The quotient of all automorphisms by the inner ones over {} is the {}.\n",
        g.field,
        g.describe()
    );
    for c in &g.cosets {
        narrative.push_str(&format!(
            "  coset of phi = {}: representative {} ({})\n",
            c.phi,
            c.representative,
            if c.inner { "inner" } else { "not inner" }
        ));
    }
    for s in &g.scaling_samples {
        narrative.push_str(&format!(
            "  {} is {} and lies in the coset of phi = {}\n",
            s.system,
            if s.inner { "inner" } else { "not inner" },
            s.coset
        ));
    }
    let passed = g.order == g.field.automorphism_group().len()
        && g.cosets.iter().all(|c| c.inner == c.phi.is_identity())
        && g.scaling_samples.iter().all(|s| s.inner);
    Ok(Report::new("group", cfg, passed, narrative, Payload::Group(g)))
}

pub fn closure_report(cfg: &RunConfig, system_text: &str, target: &TargetConfig) -> Result<Report, ReportError> {
    let v = cfg.variety()?;
    let h = target.build(&v)?;
    let source = cfg.free()?;
    let system = EquationSystem::parse(source, system_text)?;
    let opts = ClosureOptions {
        draws: cfg.draws,
        seed: cfg.seed,
        degree_bound: cfg.degree_bound,
        ..ClosureOptions::default()
    };
    let (c, cert) = closure(&system, &h, &opts)?;
    cert.verify(&v)?;
    let closure: Vec<String> = c.graded_basis().iter().map(|u| u.to_string()).collect();
    let narrative = format!(
        "Closure of {} equation(s) in F({}, {}) w.r.t. {}: dimension {} (by degree {:?}); the system {} closed.{}\n",
        system.pairs.len(),
        cfg.n1,
        cfg.n2,
        h.describe(),
        c.module_dim(),
        c.dims_by_degree(),
        if cert.is_closed() { "is" } else { "is not" },
        cert.witness
            .as_ref()
            .map(|w| format!(" Witness: {w}, with {} membership identities.", cert.proofs.len()))
            .unwrap_or_default()
    );
    let payload = Payload::Closure(Box::new(ClosureReport {
        equations: system.to_text().lines().map(String::from).collect(),
        target: target.clone(),
        closure,
        dims_by_degree: c.dims_by_degree(),
        certificate: cert,
    }));
    Ok(Report::new("closure", cfg, true, narrative, payload))
}

pub fn separate(d: i64, lambda: Scalar, seed: u64, draws: usize, degree_bound: Option<usize>) -> Result<Report, ReportError> {
    let field = FieldDescriptor::quadratic(d).map_err(|e| ReportError::Config(ConfigError::Invalid(e.to_string())))?;
    let mut cfg = RunConfig::degree_six(field);
    cfg.seed = seed;
    cfg.draws = draws;
    cfg.degree_bound = degree_bound;
    let opts = SeparationOptions {
        seed,
        draws,
        degree_bound,
        ..SeparationOptions::default()
    };
    let r = separation_example_with(d, lambda, &opts)?;
    let narrative = r.narrative();
    let passed = r.passed();
    Ok(Report::new("separate", &cfg, passed, narrative, Payload::Separation(Box::new(r))))
}

pub const CERT_SCHEMA: &str = "repgeo/certificate";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum CertificateBody {
    Inner(InnerReport),
    Closure(Box<ClosureCertificate>),
    Separation(Box<SeparationReport>),
}

/// The checkable core of a report: construction data plus every executed
/// check, and the variety needed to redo them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub version: u32,
    pub command: String,
    pub variety: RunConfig,
    pub body: CertificateBody,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let c: Certificate = serde_json::from_str(text).map_err(|e| ReportError::Json(e.to_string()))?;
        if c.schema != CERT_SCHEMA || c.version != SCHEMA_VERSION {
            return Err(ReportError::Schema(format!("{} v{}", c.schema, c.version)));
        }
        Ok(c)
    }

    pub fn verify(&self) -> Result<(), ReportError> {
        let v = self.variety.variety()?;
        match &self.body {
            CertificateBody::Inner(r) => {
                if is_inner(&r.system, &v, self.variety.seed)? != r.verdict {
                    return Err(ReportError::Mismatch("innerness verdict differs on recomputation".into()));
                }
                if !r.verdict.checks_pass() {
                    return Err(ReportError::Mismatch("a recorded check failed".into()));
                }
            }
            CertificateBody::Closure(c) => c.verify(&v)?,
            CertificateBody::Separation(s) => {
                if s.field != self.variety.field {
                    return Err(ReportError::Mismatch("field differs from the variety".into()));
                }
                s.verify()?;
                if !s.passed() {
                    return Err(ReportError::Mismatch("the separation items do not all pass".into()));
                }
            }
        }
        Ok(())
    }
}

impl Report {
    /// The certificate accompanying this report, for commands that emit one.
    pub fn certificate(&self) -> Option<Certificate> {
        let body = match &self.payload {
            Payload::Inner(r) => CertificateBody::Inner(r.clone()),
            Payload::Closure(c) => CertificateBody::Closure(Box::new(c.certificate.clone())),
            Payload::Separation(s) => CertificateBody::Separation(s.clone()),
            _ => return None,
        };
        let mut variety = self.config.clone();
        variety.output = None;
        Some(Certificate {
            schema: CERT_SCHEMA.into(),
            version: SCHEMA_VERSION,
            command: self.command.clone(),
            variety,
            body,
        })
    }
}

/// Re-validates a report or certificate document; returns what was checked.
pub fn verify_document(text: &str) -> Result<String, ReportError> {
    let head: serde_json::Value = serde_json::from_str(text).map_err(|e| ReportError::Json(e.to_string()))?;
    match head.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => {
            let r = Report::from_json(text)?;
            r.verify()?;
            Ok(format!("{} report", r.command))
        }
        Some(CERT_SCHEMA) => {
            let c = Certificate::from_json(text)?;
            c.verify()?;
            Ok(format!("{} certificate", c.command))
        }
        other => Err(ReportError::Schema(other.unwrap_or("missing").to_string())),
    }
}
