//! Batch verification suites, their configuration and the JSON report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::modules::{check_commutator, check_jacobi, omega_n_approx, FieldEngine, ModVec};
use crate::scalars::{binomial, format_scalar, frac, int, modes_up_to, parse_scalar, Mode, Scalar};
use crate::text::{format_element, format_state};
use crate::ueva::{
    implemented_modules, lemma84_grid, straighten_suite, verify_theorem11, Status, SubVerdict,
    Theorem11Config,
};
use crate::voa::{axioms, BasisKey, Element, VoaBackend};
use crate::zhu::{
    certify_annihilation, circ_product, quotient, star_product, GeneratorBounds, QuotientAlgebra,
    SpanCutoffs, TableEntry, ZhuParams,
};

pub const SCHEMA: &str = "twzhu-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Heisenberg,
    Virasoro,
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heisenberg" => Ok(BackendKind::Heisenberg),
            "virasoro" => Ok(BackendKind::Virasoro),
            _ => Err(Error::Config(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Axioms,
    Modules,
    Zhu,
    Straighten,
    Lemma84,
    Theorem11,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Axioms,
        Suite::Modules,
        Suite::Zhu,
        Suite::Straighten,
        Suite::Lemma84,
        Suite::Theorem11,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Modules => "modules",
            Suite::Zhu => "zhu",
            Suite::Straighten => "straighten",
            Suite::Lemma84 => "lemma84",
            Suite::Theorem11 => "theorem11",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// A rational written as an integer or as `"p/q"` text.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RawRational {
    Int(i64),
    Text(String),
}

impl RawRational {
    fn scalar(&self) -> Result<Scalar> {
        match self {
            RawRational::Int(k) => Ok(int(*k)),
            RawRational::Text(s) => {
                parse_scalar(s).map_err(|e| Error::Config(format!("{s:?}: {e}")))
            }
        }
    }

    fn mode(&self) -> Result<Mode> {
        Mode::from_scalar(&self.scalar()?)
    }
}

impl From<&str> for RawRational {
    fn from(s: &str) -> Self {
        RawRational::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RawGrid {
    One(RawRational),
    Many(Vec<RawRational>),
}

impl RawGrid {
    fn modes(&self) -> Result<Vec<Mode>> {
        match self {
            RawGrid::One(x) => Ok(vec![x.mode()?]),
            RawGrid::Many(xs) => xs.iter().map(RawRational::mode).collect(),
        }
    }
}

/// Unvalidated configuration, as read from a file or from flags.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RawConfig {
    pub backend: Option<String>,
    pub c: Option<RawRational>,
    pub n: Option<RawGrid>,
    pub m: Option<RawGrid>,
    pub p: Option<RawGrid>,
    pub pairs: Option<Vec<(RawRational, RawRational)>>,
    #[serde(rename = "cutoff-N")]
    pub cutoff_n: Option<i64>,
    #[serde(rename = "cutoff-G")]
    pub cutoff_g: Option<i64>,
    #[serde(rename = "cutoff-P")]
    pub cutoff_p: Option<RawRational>,
    #[serde(rename = "annihilation-G")]
    pub annihilation_g: Option<i64>,
    #[serde(rename = "annihilation-P")]
    pub annihilation_p: Option<RawRational>,
    pub slack: Option<i64>,
    pub w: Option<i64>,
    pub imax: Option<RawRational>,
    pub kmax: Option<RawRational>,
    pub mode_bound: Option<RawRational>,
    pub suites: Option<Vec<String>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub out: Option<String>,
    pub json: Option<bool>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Field-wise override: values set in `top` win.
    pub fn overridden_by(self, top: RawConfig) -> RawConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RawConfig { $($f: top.$f.or(self.$f)),* } };
        }
        pick!(
            backend,
            c,
            n,
            m,
            p,
            pairs,
            cutoff_n,
            cutoff_g,
            cutoff_p,
            annihilation_g,
            annihilation_p,
            slack,
            w,
            imax,
            kmax,
            mode_bound,
            suites,
            samples,
            seed,
            budget,
            out,
            json
        )
    }
}

/// Validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub backend: BackendKind,
    pub c: Scalar,
    pub ns: Vec<Mode>,
    pub ms: Vec<Mode>,
    pub ps: Vec<Mode>,
    pub pairs: Vec<(Mode, Mode)>,
    pub cutoffs: SpanCutoffs,
    /// Generators checked by the annihilation certificate.
    pub annihilation: GeneratorBounds,
    pub w: i64,
    pub imax: Mode,
    pub kmax: Mode,
    pub mode_bound: Mode,
    pub suites: Vec<Suite>,
    pub samples: usize,
    pub seed: u64,
    pub budget: usize,
    pub out: Option<String>,
    pub json: bool,
}

impl Config {
    pub fn defaults(backend: BackendKind) -> Config {
        let half = |k| Mode::new(k, 2);
        let (grid, cutoffs) = match backend {
            BackendKind::Heisenberg => (
                vec![half(0), half(1)],
                SpanCutoffs::new(6, 3, Mode::int(1)).with_slack(3),
            ),
            BackendKind::Virasoro => (
                vec![Mode::ZERO, Mode::int(1)],
                SpanCutoffs::new(8, 8, Mode::int(1)).with_slack(4),
            ),
        };
        Config {
            backend,
            c: frac(1, 2),
            pairs: pairs_of(&grid, &grid),
            ns: grid.clone(),
            ms: grid.clone(),
            ps: grid,
            cutoffs,
            annihilation: GeneratorBounds {
                weight: cutoffs.g.min(4),
                p: cutoffs.p,
            },
            w: 3,
            imax: half(7),
            kmax: Mode::int(3),
            mode_bound: half(5),
            suites: Suite::ALL.to_vec(),
            samples: 50,
            seed: 1,
            budget: 1_000_000,
            out: None,
            json: false,
        }
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Config> {
        let backend = match &raw.backend {
            Some(s) => s.parse()?,
            None => BackendKind::Heisenberg,
        };
        let mut cfg = Config::defaults(backend);
        if let Some(c) = &raw.c {
            if backend != BackendKind::Virasoro {
                return Err(Error::Config(
                    "c only applies to the virasoro backend".into(),
                ));
            }
            cfg.c = c.scalar()?;
        }
        let grid = |g: &Option<RawGrid>, default: &Vec<Mode>| {
            g.as_ref().map_or(Ok(default.clone()), RawGrid::modes)
        };
        cfg.ns = grid(&raw.n, &cfg.ns)?;
        cfg.ms = grid(&raw.m, &cfg.ms)?;
        cfg.ps = grid(&raw.p, &cfg.ps)?;
        cfg.pairs = match &raw.pairs {
            Some(ps) => ps
                .iter()
                .map(|(a, b)| Ok((a.mode()?, b.mode()?)))
                .collect::<Result<_>>()?,
            None => pairs_of(&cfg.ns, &cfg.ms),
        };
        let mut cut = cfg.cutoffs;
        if let Some(x) = raw.cutoff_n {
            cut.n = x;
        }
        if let Some(x) = raw.cutoff_g {
            cut.g = x;
        }
        if let Some(x) = &raw.cutoff_p {
            cut.p = x.mode()?;
        }
        if let Some(x) = raw.slack {
            cut.slack = x;
        }
        cfg.cutoffs = cut;
        cfg.annihilation = GeneratorBounds {
            weight: raw.annihilation_g.unwrap_or(cut.g.min(4)),
            p: match &raw.annihilation_p {
                Some(x) => x.mode()?,
                None => cut.p,
            },
        };
        cfg.w = raw.w.unwrap_or(cfg.w);
        for (slot, val) in [
            (&mut cfg.imax, &raw.imax),
            (&mut cfg.kmax, &raw.kmax),
            (&mut cfg.mode_bound, &raw.mode_bound),
        ] {
            if let Some(v) = val {
                *slot = v.mode()?;
            }
        }
        if let Some(s) = &raw.suites {
            cfg.suites = s.iter().map(|x| x.parse()).collect::<Result<_>>()?;
        }
        cfg.samples = raw.samples.unwrap_or(cfg.samples);
        cfg.seed = raw.seed.unwrap_or(cfg.seed);
        cfg.budget = raw.budget.unwrap_or(cfg.budget);
        cfg.out = raw.out.clone();
        cfg.json = raw.json.unwrap_or(false);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn order(&self) -> u32 {
        match self.backend {
            BackendKind::Heisenberg => 2,
            BackendKind::Virasoro => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let t = self.order();
        let on_grid = |x: Mode| !x.is_negative() && x.has_order(t);
        let all = self
            .ns
            .iter()
            .chain(&self.ms)
            .chain(&self.ps)
            .chain(self.pairs.iter().flat_map(|(a, b)| [a, b]));
        for &x in all.chain([&self.cutoffs.p, &self.annihilation.p]) {
            if !on_grid(x) {
                return Err(Error::Config(format!("{x} is not in (1/{t})N")));
            }
        }
        let c = &self.cutoffs;
        if c.n <= 0 || c.g <= 0 || c.slack < 0 || self.w <= 0 || self.annihilation.weight <= 0 {
            return Err(Error::Config("cutoffs must be positive".into()));
        }
        if self.imax <= Mode::ZERO || self.kmax.is_negative() || self.mode_bound <= Mode::ZERO {
            return Err(Error::Config(
                "imax and mode-bound must be positive, kmax nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn voa(&self) -> VoaBackend {
        match self.backend {
            BackendKind::Heisenberg => VoaBackend::heisenberg(),
            BackendKind::Virasoro => VoaBackend::virasoro(self.c.clone()),
        }
    }

    /// The configuration as it appears in the report.
    pub fn echo(&self) -> Value {
        let modes = |xs: &[Mode]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        json!({
            "backend": self.backend,
            "c": if self.backend == BackendKind::Virasoro { Some(format_scalar(&self.c)) } else { None },
            "T": self.order(),
            "n": modes(&self.ns),
            "m": modes(&self.ms),
            "p": modes(&self.ps),
            "pairs": self.pairs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>(),
            "cutoff-N": self.cutoffs.n,
            "cutoff-G": self.cutoffs.g,
            "cutoff-P": self.cutoffs.p.to_string(),
            "slack": self.cutoffs.slack,
            "annihilation-G": self.annihilation.weight,
            "annihilation-P": self.annihilation.p.to_string(),
            "w": self.w,
            "imax": self.imax.to_string(),
            "kmax": self.kmax.to_string(),
            "mode-bound": self.mode_bound.to_string(),
            "suites": self.suites,
            "samples": self.samples,
            "seed": self.seed,
            "budget": self.budget,
        })
    }
}

fn pairs_of(ns: &[Mode], ms: &[Mode]) -> Vec<(Mode, Mode)> {
    ns.iter()
        .flat_map(|&n| ms.iter().map(move |&m| (n, m)))
        .collect()
}

/// One line of the report.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckRecord {
    pub suite: Suite,
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub verdict: Status,
    pub checked: usize,
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

impl CheckRecord {
    fn new(suite: Suite, name: impl Into<String>, params: &[(&str, String)]) -> Self {
        CheckRecord {
            suite,
            name: name.into(),
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            verdict: Status::Pass,
            checked: 0,
            witness: None,
            detail: Value::Null,
        }
    }

    /// Counts one case; the first failing case becomes the witness.
    fn case(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.verdict != Status::Fail {
            self.verdict = Status::Fail;
            self.witness = Some(witness());
        }
    }

    fn from_sub(suite: Suite, params: &[(&str, String)], sub: &SubVerdict) -> Self {
        let mut r = CheckRecord::new(suite, sub.name, params);
        r.verdict = sub.status.clone();
        r.checked = sub.checked;
        if sub.status != Status::Pass {
            r.witness = sub.witnesses.first().cloned();
        }
        r.detail = json!({
            "equal": sub.equal,
            "unequal": sub.unequal,
            "inconclusive": sub.inconclusive,
            "witnesses": sub.witnesses,
        });
        r
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub config: Value,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    /// Wall-clock milliseconds per suite; not part of the stable output.
    pub timing: BTreeMap<String, u64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its `timing` field.
    pub fn stable_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("timing");
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

/// Runs the selected suites in order.
pub fn run_suite(cfg: &Config) -> Result<Report> {
    let voa = cfg.voa();
    let mut checks = Vec::new();
    let mut timing = BTreeMap::new();
    for &suite in &cfg.suites {
        let t0 = Instant::now();
        let records = match suite {
            Suite::Axioms => axiom_checks(&voa, cfg.w, 3),
            Suite::Modules => module_checks(&voa, cfg)?,
            Suite::Zhu => zhu_checks(&voa, cfg)?,
            Suite::Straighten => straighten_checks(&voa, cfg)?,
            Suite::Lemma84 => lemma84_checks(&voa, cfg)?,
            Suite::Theorem11 => theorem11_checks(&voa, cfg)?,
        };
        checks.extend(records);
        timing.insert(suite.name().to_string(), t0.elapsed().as_millis() as u64);
    }
    let mut summary = Summary::default();
    for c in &checks {
        match c.verdict {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::Inconclusive => summary.inconclusive += 1,
        }
    }
    Ok(Report {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.echo(),
        checks,
        summary,
        timing,
    })
}

fn el(k: &BasisKey) -> Element {
    Element::basis(k.clone())
}

/// Vacuum, creation, grading, `L(0)`, Virasoro relation, derivative,
/// automorphism and Jacobi checks on basis vectors of weight `<= max_weight`
/// with all indices in `[-bound, bound]`.
pub fn axiom_checks(voa: &VoaBackend, max_weight: i64, bound: i64) -> Vec<CheckRecord> {
    let keys = voa.basis_up_to(max_weight);
    let idx: Vec<i64> = (-bound..=bound).collect();
    let params = [
        ("backend", voa.name().to_string()),
        ("w", max_weight.to_string()),
        ("bound", bound.to_string()),
    ];
    let rec = |name: &str| CheckRecord::new(Suite::Axioms, name, &params);
    let f = |k: &BasisKey| format_element(voa, &el(k));

    let mut vacuum = rec("vacuum");
    let mut creation = rec("creation");
    let mut l0 = rec("l0-grading");
    for v in &keys {
        for &n in &idx {
            vacuum.case(axioms::check_vacuum(voa, n, &el(v)), || {
                format!("1_({n}) {}", f(v))
            });
            if n >= -1 {
                creation.case(axioms::check_creation(voa, &el(v), n), || {
                    format!("{}_({n}) 1", f(v))
                });
            }
        }
        l0.case(axioms::check_l0_grading(voa, &el(v)), || f(v));
    }

    let mut virasoro = rec("virasoro-relation");
    for v in &keys {
        for &a in &idx {
            for &b in &idx {
                virasoro.case(axioms::check_virasoro_relation(voa, a, b, &el(v)), || {
                    format!("[L({a}), L({b})] on {}", f(v))
                });
            }
        }
    }

    let mut grading = rec("grading");
    let mut derivative = rec("derivative");
    let mut automorphism = rec("automorphism");
    for u in &keys {
        for v in &keys {
            for &i in &idx {
                let w = || format!("u = {}, v = {}, i = {i}", f(u), f(v));
                grading.case(axioms::check_grading(voa, &el(u), i, &el(v)), w);
                derivative.case(axioms::check_derivative_axiom(voa, &el(u), i, &el(v)), w);
                automorphism.case(axioms::check_automorphism(voa, &el(u), &el(v), i), w);
            }
        }
    }

    let mut jacobi = rec("jacobi");
    for u in &keys {
        for v in &keys {
            for w in &keys {
                for &l in &idx {
                    for &m in &idx {
                        for &n in &idx {
                            jacobi.case(
                                axioms::check_jacobi_on_v(voa, &el(u), &el(v), &el(w), l, m, n),
                                || {
                                    format!(
                                        "u = {}, v = {}, w = {}, (l, m, n) = ({l}, {m}, {n})",
                                        f(u),
                                        f(v),
                                        f(w)
                                    )
                                },
                            );
                        }
                    }
                }
            }
        }
    }
    vec![
        vacuum,
        creation,
        l0,
        grading,
        virasoro,
        derivative,
        automorphism,
        jacobi,
    ]
}

/// Modes of `voa`'s sector-`r` vectors on `engine`'s module with `|q| <= bound`.
fn allowed_modes(engine: &FieldEngine, key: &BasisKey, bound: Mode) -> Vec<Mode> {
    let t = engine.module().order();
    let r = engine.module().sector(key);
    let top = Mode::new((bound.0 * t as i64).floor().to_integer(), t as i64);
    let lo = -top;
    modes_up_to(top - lo, t)
        .into_iter()
        .map(|x| x + lo)
        .filter(|q| q.in_sector(r, t))
        .collect()
}

/// Jacobi and commutator checks on every implemented module, plus the
/// position of the top state in `Omega_n`.
pub fn module_checks(voa: &VoaBackend, cfg: &Config) -> Result<Vec<CheckRecord>> {
    let keys = voa.basis_up_to(cfg.w);
    let lbound = cfg.imax.floor();
    let mut out = Vec::new();
    for engine in implemented_modules(voa) {
        let module = engine.module().clone();
        let params = [
            ("backend", voa.name().to_string()),
            ("module", module.name().to_string()),
            ("w", cfg.w.to_string()),
            ("imax", cfg.imax.to_string()),
            ("kmax", cfg.kmax.to_string()),
        ];
        let states = module.states_up_to(cfg.kmax);
        let f = |k: &BasisKey| format_element(voa, &el(k));
        let mut jacobi = CheckRecord::new(Suite::Modules, "jacobi", &params);
        let mut commutator = CheckRecord::new(Suite::Modules, "commutator", &params);
        for u in &keys {
            for v in &keys {
                for m in allowed_modes(&engine, u, cfg.imax) {
                    for n in allowed_modes(&engine, v, cfg.imax) {
                        commutator.case(
                            check_commutator(voa, &engine, &el(u), &el(v), m, n, cfg.kmax),
                            || format!("[{}_({m}), {}_({n})]", f(u), f(v)),
                        );
                        for l in -lbound..=lbound {
                            jacobi.case(
                                check_jacobi(voa, &engine, &el(u), &el(v), l, m, n, &states),
                                || {
                                    format!(
                                        "u = {}, v = {}, (l, m, n) = ({l}, {m}, {n})",
                                        f(u),
                                        f(v)
                                    )
                                },
                            );
                        }
                    }
                }
            }
        }
        out.push(jacobi);
        out.push(commutator);

        if module.order() == 2 {
            let mut bracket = CheckRecord::new(Suite::Modules, "half-bracket", &params);
            let a = voa.structure().generator_key();
            let (p, q) = (Mode::new(1, 2), Mode::new(-1, 2));
            for s in &states {
                let w = ModVec::basis(s.clone());
                let lhs = engine
                    .act(&el(&a), p, &engine.act(&el(&a), q, &w))
                    .sub(&engine.act(&el(&a), q, &engine.act(&el(&a), p, &w)));
                bracket.case(lhs == w.scaled(&frac(1, 2)), || format_state(&*module, &w));
            }
            out.push(bracket);
        }

        for &n in &cfg.ns {
            let mut p = params.to_vec();
            p.push(("n", n.to_string()));
            let mut rec = CheckRecord::new(Suite::Modules, "omega-contains-top", &p);
            let om = omega_n_approx(voa, &engine, n, cfg.w, cfg.imax, cfg.kmax)?;
            let top = ModVec::basis(module.top());
            rec.case(om.subspace.contains_lincomb(&top) == Some(true), || {
                format_state(&*module, &top)
            });
            rec.detail =
                json!({ "dim": om.subspace.rank(), "slice_dim": om.subspace.slice().dim() });
            out.push(rec);
        }
    }
    Ok(out)
}

/// `Σ_i C(wt u, i) u_{i-shift} v`, the `T = 1`, `n = 0` products.
fn zhu_expansion(voa: &VoaBackend, u: &BasisKey, v: &BasisKey, shift: i64) -> Element {
    let wu = voa.weight(u);
    let mut out = Element::zero();
    for i in 0..=wu {
        let c = binomial(&int(wu), i as u32);
        out.add_scaled(&voa.mode_product(&el(u), i - shift, &el(v)), &c);
    }
    out
}

/// For `T = 1` and `n = m = p = 0`, the star and circle products against
/// their classical expansions.
pub fn specialization_checks(voa: &VoaBackend, max_weight: i64) -> Result<Vec<CheckRecord>> {
    let params = [
        ("backend", voa.name().to_string()),
        ("w", max_weight.to_string()),
    ];
    let mut star = CheckRecord::new(Suite::Zhu, "star-specialization", &params);
    let mut circ = CheckRecord::new(Suite::Zhu, "circ-specialization", &params);
    let z = Mode::ZERO;
    let p = ZhuParams::new(z, z, z, 1)?;
    let keys = voa.basis_up_to(max_weight);
    for u in &keys {
        for v in &keys {
            let w = || {
                format!(
                    "u = {}, v = {}",
                    format_element(voa, &el(u)),
                    format_element(voa, &el(v))
                )
            };
            star.case(
                star_product(voa, &el(u), &el(v), &p)? == zhu_expansion(voa, u, v, 1),
                w,
            );
            circ.case(
                circ_product(voa, &el(u), &el(v), z, z)? == zhu_expansion(voa, u, v, 2),
                w,
            );
        }
    }
    Ok(vec![star, circ])
}

/// The quotient and its tables as report data.
pub fn describe_quotient(voa: &VoaBackend, q: &QuotientAlgebra) -> Value {
    let entry = |e: &TableEntry| match e {
        TableEntry::Class(x) => format_element(voa, x),
        TableEntry::Escaped { weight } => format!("escaped (weight {weight})"),
    };
    let table = |t: &BTreeMap<(BasisKey, BasisKey), TableEntry>| {
        t.iter()
            .map(|((a, b), e)| {
                json!([
                    format_element(voa, &el(a)),
                    format_element(voa, &el(b)),
                    entry(e)
                ])
            })
            .collect::<Vec<_>>()
    };
    json!({
        "n": q.n.to_string(),
        "m": q.m.to_string(),
        "dim": q.dim(),
        "slice_dim": q.o.slice_dim(),
        "span_rank": q.o.rank(),
        "basis": q.basis.iter().map(|k| format_element(voa, &el(k))).collect::<Vec<_>>(),
        "mult": table(&q.mult),
        "left": table(&q.left),
        "right": table(&q.right),
    })
}

/// Unit law of the truncated quotient: `[1] * x = x * [1] = x` on the basis.
fn unit_law(
    voa: &VoaBackend,
    q: &QuotientAlgebra,
    params: &[(&str, String)],
) -> Result<CheckRecord> {
    let mut rec = CheckRecord::new(Suite::Zhu, "unit-law", params);
    let one = match q.class(voa, &voa.vacuum())? {
        TableEntry::Class(x) => x,
        TableEntry::Escaped { .. } => unreachable!("vacuum has weight 0"),
    };
    let t = voa.order();
    let p = ZhuParams::new(q.n, q.n, q.n, t)?;
    let mut escaped = 0;
    let mut unproven = Vec::new();
    for x in &q.basis {
        for (a, b) in [(&one, &el(x)), (&el(x), &one)] {
            rec.checked += 1;
            match q.class(voa, &star_product(voa, a, b, &p)?)? {
                TableEntry::Class(y) if y == el(x) => {}
                TableEntry::Class(_) => unproven.push(format_element(voa, &el(x))),
                TableEntry::Escaped { .. } => escaped += 1,
            }
        }
    }
    // O is only known from inside, so a mismatch is not a disproof.
    if let Some(x) = unproven.first() {
        rec.verdict = Status::Inconclusive;
        rec.witness = Some(format!(
            "unit law not certified on {x} ({} cases)",
            unproven.len()
        ));
    } else if escaped > 0 {
        rec.verdict = Status::Inconclusive;
        rec.witness = Some(format!("{escaped} products left the slice"));
    }
    Ok(rec)
}

/// Annihilation of the `O` generators on every implemented module, then the
/// truncated quotients `A_{g,n}` and `A_{g,n,m}`.
pub fn zhu_checks(voa: &VoaBackend, cfg: &Config) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    if voa.order() == 1 {
        out.extend(specialization_checks(voa, cfg.w.max(1))?);
    }
    let bounds = cfg.annihilation;
    for engine in implemented_modules(voa) {
        let (reports, stats) = certify_annihilation(voa, engine.clone(), &cfg.ns, &cfg.ms, bounds)?;
        for r in reports {
            let params = [
                ("module", engine.module().name().to_string()),
                ("n", r.n.to_string()),
                ("m", r.m.to_string()),
                ("G", bounds.weight.to_string()),
                ("P", bounds.p.to_string()),
            ];
            let mut rec = CheckRecord::new(Suite::Zhu, "annihilation", &params);
            rec.checked = r.checked.values().sum();
            if let Some(v) = r.violations.first() {
                rec.verdict = Status::Fail;
                rec.witness = Some(format!(
                    "{:?} on {}",
                    v.label,
                    format_state(&**engine.module(), &ModVec::basis(v.state.clone()))
                ));
            }
            rec.detail = json!({
                "by_kind": r.checked.iter().map(|(k, c)| (format!("{k:?}"), *c)).collect::<BTreeMap<_, _>>(),
                "violations": r.violations.len(),
                "fallbacks": stats.fallbacks,
            });
            out.push(rec);
        }
    }
    for &(n, m) in &cfg.pairs {
        let q = quotient(voa, n, m, cfg.cutoffs)?;
        let params = [
            ("n", n.to_string()),
            ("m", m.to_string()),
            ("N", cfg.cutoffs.n.to_string()),
        ];
        if q.is_algebra() {
            let mut rec = unit_law(voa, &q, &params)?;
            rec.detail = describe_quotient(voa, &q);
            out.push(rec);
        } else {
            let mut rec = CheckRecord::new(Suite::Zhu, "bimodule", &params);
            rec.checked = q.left.len() + q.right.len();
            rec.detail = describe_quotient(voa, &q);
            out.push(rec);
        }
    }
    Ok(out)
}

pub fn straighten_checks(voa: &VoaBackend, cfg: &Config) -> Result<Vec<CheckRecord>> {
    let r = straighten_suite(
        voa,
        cfg.samples,
        cfg.mode_bound,
        cfg.w,
        cfg.budget,
        cfg.seed,
    )?;
    let params = [
        ("samples", cfg.samples.to_string()),
        ("mode-bound", cfg.mode_bound.to_string()),
        ("w", cfg.w.to_string()),
        ("seed", cfg.seed.to_string()),
    ];
    let mut rec = CheckRecord::new(Suite::Straighten, "action-equality", &params);
    rec.checked = r.checked;
    if !r.failures.is_empty() {
        rec.verdict = Status::Fail;
        rec.witness = r.failures.first().cloned();
    }
    rec.detail = json!({ "passed": r.passed, "max_steps": r.max_steps, "failures": r.failures });
    Ok(vec![rec])
}

pub fn lemma84_checks(voa: &VoaBackend, cfg: &Config) -> Result<Vec<CheckRecord>> {
    let r = lemma84_grid(
        voa,
        &cfg.ns,
        &cfg.ms,
        &cfg.ps,
        cfg.w,
        cfg.cutoffs,
        cfg.budget,
    )?;
    let params = [("w", cfg.w.to_string()), ("N", cfg.cutoffs.n.to_string())];
    let mut rec = CheckRecord::new(Suite::Lemma84, "two-factor-congruence", &params);
    rec.checked = r.checked;
    if let Some(f) = r.failures.first() {
        rec.verdict = Status::Fail;
        rec.witness = Some(f.clone());
    } else if let Some(g) = r.inconclusive.first() {
        rec.verdict = Status::Inconclusive;
        rec.witness = Some(format!(
            "u = {}, v = {}, (n, m, p) = ({}, {}, {}): {}",
            g.u, g.v, g.n, g.m, g.p, g.gap
        ));
    }
    rec.detail = json!({ "equal": r.equal, "unequal": r.unequal, "gaps": r.inconclusive, "failures": r.failures });
    Ok(vec![rec])
}

pub fn theorem11_checks(voa: &VoaBackend, cfg: &Config) -> Result<Vec<CheckRecord>> {
    let tc = Theorem11Config {
        cutoffs: cfg.cutoffs,
        monomials: cfg.samples,
        mode_bound: cfg.mode_bound,
        max_weight: cfg.w,
        budget: cfg.budget,
        seed: cfg.seed,
    };
    let mut out = Vec::new();
    for &(n, m) in &cfg.pairs {
        let r = verify_theorem11(voa, n, m, &tc)?;
        let params = [
            ("n", n.to_string()),
            ("m", m.to_string()),
            ("N", cfg.cutoffs.n.to_string()),
        ];
        for sub in [
            &r.well_defined,
            &r.multiplicative,
            &r.surjective,
            &r.injective,
        ] {
            let mut rec = CheckRecord::from_sub(Suite::Theorem11, &params, sub);
            rec.detail["quotient_dim"] = json!(r.quotient_dim);
            out.push(rec);
        }
    }
    Ok(out)
}
