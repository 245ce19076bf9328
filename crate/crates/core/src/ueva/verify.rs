use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    binom, j_map, phi, sign, upoly_act, upoly_mul, FiltrationCtx, Straightener, UMonomial, UPoly,
};
use crate::error::{Error, Result};
use crate::modules::{FieldEngine, FockModule, ModState, ModVec, ModuleBackend};
use crate::scalars::Mode;
use crate::text::{format_element, format_monomial};
use crate::voa::{BasisKey, Element, Kind, VoaBackend};
use crate::zhu::{
    build_o_span_keeping, quotient, star_product, star_weight_bound, OSpan, SpanCutoffs, ZhuParams,
};

fn ek(voa: &VoaBackend, k: &BasisKey) -> String {
    format_element(voa, &Element::basis(k.clone()))
}

/// Creation parts of a module state in ticks, e.g. `(3, 1)`.
fn show_state(module: &str, s: &ModState) -> String {
    let parts: Vec<String> = s.parts().iter().map(|p| p.to_string()).collect();
    let body = if parts.is_empty() {
        "top".to_string()
    } else {
        format!("({})", parts.join(", "))
    };
    if module.is_empty() {
        body
    } else {
        format!("{body} of {module}")
    }
}

/// Outcome of comparing two elements of the working quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The straightened difference lies in the computed O-span.
    EqualProven {
        difference: Element,
    },
    /// The two sides act differently on a state of degree `<= m`.
    UnequalProven {
        module: String,
        state: ModState,
        difference: ModVec,
    },
    Inconclusive {
        gap: String,
    },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::EqualProven { .. })
    }

    pub fn is_unequal(&self) -> bool {
        matches!(self, Verdict::UnequalProven { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::EqualProven { .. } => "equal-proven",
            Verdict::UnequalProven { .. } => "unequal-proven",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// The `g`-twisted modules shipped for a backend: twisted Fock space for the
/// Heisenberg algebra, the vacuum module for Virasoro.
pub fn implemented_modules(voa: &VoaBackend) -> Vec<Arc<FieldEngine>> {
    match voa.structure().kind() {
        Kind::Heisenberg => {
            let m: Arc<dyn ModuleBackend> = Arc::new(FockModule::twisted(voa.structure().clone()));
            vec![Arc::new(FieldEngine::new(m))]
        }
        Kind::Virasoro => vec![voa.adjoint().clone()],
    }
}

/// Decides `x ≡ y` in `U(V[g])_{n-m} / U(V[g])_{n-m}^{-m-1/T}` as far as the
/// modules and the span allow.
pub fn u_equals_mod_filtration(
    voa: &VoaBackend,
    x: &UPoly,
    y: &UPoly,
    ctx: &FiltrationCtx,
    modules: &[Arc<FieldEngine>],
    o_span: Option<&OSpan>,
    budget: usize,
) -> Result<Verdict> {
    let diff = x.sub(y);
    if diff.is_zero() {
        return Ok(Verdict::EqualProven {
            difference: Element::zero(),
        });
    }
    for engine in modules {
        for state in engine.module().states_up_to(ctx.m) {
            let w = ModVec::basis(state.clone());
            let out = upoly_act(voa, engine, &diff, &w);
            if !out.is_zero() {
                return Ok(Verdict::UnequalProven {
                    module: engine.module().name().to_string(),
                    state,
                    difference: out,
                });
            }
        }
    }
    let d = Straightener::new(voa, *ctx, budget).poly(&diff)?;
    if d.is_zero() {
        return Ok(Verdict::EqualProven { difference: d });
    }
    let Some(o) = o_span else {
        return Ok(Verdict::Inconclusive {
            gap: "no span supplied".into(),
        });
    };
    if (o.n, o.m) != (ctx.n, ctx.m) {
        return Err(Error::InvalidParameter(format!(
            "span for (n, m) = ({}, {}) used at ({}, {})",
            o.n, o.m, ctx.n, ctx.m
        )));
    }
    Ok(match o.contains(&d) {
        Some(true) => Verdict::EqualProven { difference: d },
        Some(false) => Verdict::Inconclusive {
            gap: format!(
                "residue {} not in span of rank {}",
                format_element(voa, &o.reduce(&d)?),
                o.rank()
            ),
        },
        None => Verdict::Inconclusive {
            gap: format!(
                "difference of weight {} leaves the slice V_<={}",
                voa.max_weight(&d).unwrap_or(0),
                o.cutoffs.n
            ),
        },
    })
}

/// The defining relation of `U(V[g])` for `u, v` at `(l, s, t)`, and
/// `1(i) = δ_{i,-1}`, as operators on states of degree `<= max_degree`.
#[allow(clippy::too_many_arguments)]
pub fn check_univ_relation(
    voa: &VoaBackend,
    engine: &FieldEngine,
    u: &BasisKey,
    v: &BasisKey,
    l: i64,
    s: Mode,
    t: Mode,
    max_degree: Mode,
) -> bool {
    let (eu, ev) = (Element::basis(u.clone()), Element::basis(v.clone()));
    let (wu, wv) = (voa.weight(u), voa.weight(v));
    let j = |mode: Mode, x: &Element| j_map(voa, mode, x);
    let mut rhs = UPoly::zero();
    for i in 0..(wu + wv - l).max(0) {
        let c = binom(s + (wu - l - 1), i);
        let uv = voa.mode_product(&eu, l + i, &ev);
        for (mono, cm) in j(s + t, &uv).iter() {
            rhs.add_term(mono.clone(), &c * cm);
        }
    }
    let module = engine.module();
    let vacuum = voa.vacuum();
    for state in module.states_up_to(max_degree) {
        let d = module.degree(&state);
        let w = ModVec::basis(state.clone());
        let top = (d - t).floor().max((d - s).floor() + l).max(-1);
        let mut lhs = UPoly::zero();
        for i in 0..=top {
            let c = sign(i) * binom(Mode::int(l), i);
            let a = upoly_mul(voa, &j(s - i, &eu), &j(t + i, &ev));
            let b = upoly_mul(voa, &j(t + (l - i), &ev), &j(s + (i - l), &eu));
            lhs.add_scaled(&a, &c);
            lhs.add_scaled(&b, &-(c * sign(l)));
        }
        if upoly_act(voa, engine, &lhs, &w) != upoly_act(voa, engine, &rhs, &w) {
            return false;
        }
        for i in -3..=3 {
            let want = if i == -1 { w.clone() } else { ModVec::zero() };
            if engine.act(&vacuum, Mode::int(i), &w) != want {
                return false;
            }
        }
    }
    true
}

/// A monomial of `len` factors with vectors of weight `1..=max_weight` and
/// modes in the right cosets with `|mode| <= mode_bound`.
pub fn random_monomial<R: Rng>(
    voa: &VoaBackend,
    rng: &mut R,
    len: usize,
    mode_bound: Mode,
    max_weight: i64,
) -> UMonomial {
    let t = voa.order();
    let keys: Vec<BasisKey> = voa
        .basis_up_to(max_weight)
        .into_iter()
        .filter(|k| !k.is_empty())
        .collect();
    let ticks = (mode_bound.0 * t as i64).floor().to_integer();
    loop {
        let mut factors = Vec::with_capacity(len);
        for _ in 0..len {
            let k = keys.choose(rng).expect("nonempty basis").clone();
            let r = voa.sector(&k) as i64;
            let choices: Vec<i64> = (-ticks..=ticks)
                .filter(|x| (x - r).rem_euclid(t as i64) == 0)
                .collect();
            let q = *choices.choose(rng).expect("coset meets the window");
            factors.push((Mode::new(q, t as i64), k));
        }
        if let Some(m) = UMonomial::new(voa, factors) {
            return m;
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SubVerdict {
    pub name: &'static str,
    pub status: Status,
    pub checked: usize,
    pub equal: usize,
    pub unequal: usize,
    pub inconclusive: usize,
    /// Text of the first few offending cases.
    pub witnesses: Vec<String>,
}

const WITNESS_CAP: usize = 8;

impl SubVerdict {
    fn new(name: &'static str) -> Self {
        SubVerdict {
            name,
            status: Status::Pass,
            checked: 0,
            equal: 0,
            unequal: 0,
            inconclusive: 0,
            witnesses: Vec::new(),
        }
    }

    fn witness(&mut self, text: String) {
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push(text);
        }
    }

    fn record(&mut self, v: &Verdict, what: impl FnOnce() -> String) {
        self.checked += 1;
        match v {
            Verdict::EqualProven { .. } => self.equal += 1,
            Verdict::UnequalProven { module, state, .. } => {
                self.unequal += 1;
                self.witness(format!(
                    "{} differs on state {}",
                    what(),
                    show_state(module, state)
                ));
            }
            Verdict::Inconclusive { gap } => {
                self.inconclusive += 1;
                self.witness(format!("{}: {gap}", what()));
            }
        }
    }

    /// Pass iff every case was proven equal.
    fn settle_equalities(&mut self) {
        self.status = if self.unequal > 0 {
            Status::Fail
        } else if self.inconclusive > 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        };
    }
}

#[derive(Clone, Debug)]
pub struct Theorem11Config {
    pub cutoffs: SpanCutoffs,
    /// Monomials sampled in (c), split evenly between 2 and 3 factors.
    pub monomials: usize,
    pub mode_bound: Mode,
    pub max_weight: i64,
    pub budget: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem11Report {
    pub n: String,
    pub m: String,
    pub slice_dim: usize,
    pub span_rank: usize,
    pub quotient_dim: usize,
    pub well_defined: SubVerdict,
    pub multiplicative: SubVerdict,
    pub surjective: SubVerdict,
    pub injective: SubVerdict,
}

impl Theorem11Report {
    /// (a)-(c) pass and (d) makes no false zero claim.
    pub fn passed(&self) -> bool {
        self.well_defined.status == Status::Pass
            && self.multiplicative.status == Status::Pass
            && self.surjective.status == Status::Pass
            && self.injective.status != Status::Fail
    }
}

/// Checks the four parts of the isomorphism `A_{g,n,m}(V) -> U(V[g])_{n-m}/U^{-m-1/T}`
/// at the given truncation.
pub fn verify_theorem11(
    voa: &VoaBackend,
    n: Mode,
    m: Mode,
    cfg: &Theorem11Config,
) -> Result<Theorem11Report> {
    let t = voa.order();
    let ctx = FiltrationCtx::new(n, m, t)?;
    let modules = implemented_modules(voa);
    let (o, generators) = build_o_span_keeping(voa, n, m, cfg.cutoffs)?;
    let q = quotient(voa, n, m, cfg.cutoffs)?;
    let zero = UPoly::zero();
    let eq = |x: &UPoly, y: &UPoly| {
        u_equals_mod_filtration(voa, x, y, &ctx, &modules, Some(&o), cfg.budget)
    };

    let mut a = SubVerdict::new("well-definedness");
    for (kind, x) in &generators {
        let v = eq(&phi(voa, &ctx, x), &zero)?;
        a.record(&v, || {
            format!("{kind:?} generator {}", format_element(voa, x))
        });
    }
    a.settle_equalities();

    let mut b = SubVerdict::new("multiplicativity");
    let e = |k: &BasisKey| Element::basis(k.clone());
    let jm = |mode: Mode, k: &BasisKey| j_map(voa, mode, &e(k));
    let mut pairs: Vec<(&BasisKey, &BasisKey, bool)> = Vec::new();
    if n == m {
        pairs.extend(q.mult.keys().map(|(x, y)| (x, y, false)));
    } else {
        pairs.extend(q.right.keys().map(|(x, u)| (x, u, false)));
        pairs.extend(q.left.keys().map(|(u, x)| (u, x, true)));
    }
    for (x, y, left) in pairs {
        let p = if left { n } else { m };
        if star_weight_bound(voa.weight(x), voa.weight(y), &ZhuParams::new(n, m, p, t)?)
            > cfg.cutoffs.n
        {
            continue;
        }
        let (params, lhs_rhs) = if left {
            // a *̄ x against J_0(a) J_{m-n}(x)
            (
                ZhuParams::new(n, m, n, t)?,
                upoly_mul(voa, &jm(Mode::ZERO, x), &jm(m - n, y)),
            )
        } else {
            // x * u against J_{m-n}(x) J_0(u)
            (
                ZhuParams::new(n, m, m, t)?,
                upoly_mul(voa, &jm(m - n, x), &jm(Mode::ZERO, y)),
            )
        };
        let prod = star_product(voa, &e(x), &e(y), &params)?;
        let v = eq(&phi(voa, &ctx, &prod), &lhs_rhs)?;
        b.record(&v, || {
            format!(
                "{} ({}, {})",
                if left { "left" } else { "right" },
                ek(voa, x),
                ek(voa, y)
            )
        });
    }
    b.settle_equalities();

    let mut c = SubVerdict::new("surjectivity");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut made = 0;
    let mut attempts = 0;
    while made < cfg.monomials && attempts < cfg.monomials * 1000 {
        attempts += 1;
        let len = 2 + made % 2;
        let mono = random_monomial(voa, &mut rng, len, cfg.mode_bound, cfg.max_weight);
        if mono.degree() != ctx.degree() {
            continue;
        }
        made += 1;
        c.checked += 1;
        let mut st = Straightener::new(voa, ctx, cfg.budget);
        match st.monomial(&mono) {
            Ok(u) => {
                let lhs = phi(voa, &ctx, &u);
                let rhs = UPoly::term(mono.clone(), crate::scalars::int(1));
                let ok = modules.iter().all(|engine| {
                    engine.module().states_up_to(m).into_iter().all(|s| {
                        let w = ModVec::basis(s);
                        upoly_act(voa, engine, &lhs, &w) == upoly_act(voa, engine, &rhs, &w)
                    })
                });
                if ok {
                    c.equal += 1;
                } else {
                    c.unequal += 1;
                    c.witness(format!(
                        "{} -> {} acts differently",
                        format_monomial(voa, &mono),
                        format_element(voa, &u)
                    ));
                }
            }
            Err(err) => {
                c.inconclusive += 1;
                c.witness(format!("{}: {err}", format_monomial(voa, &mono)));
            }
        }
    }
    c.settle_equalities();

    let mut d = SubVerdict::new("injectivity");
    for k in &q.basis {
        let image = jm(m - n, k);
        if image.is_zero() {
            // J vanishes on this sector, so k lies in O; the span has not certified it
            d.checked += 1;
            d.inconclusive += 1;
            d.witness(format!(
                "class [{}]: phi vanishes identically, membership in O not certified",
                ek(voa, k)
            ));
            continue;
        }
        d.checked += 1;
        match eq(&image, &zero)? {
            Verdict::EqualProven { .. } => {
                d.equal += 1;
                d.witness(format!("class [{}] claimed to map to 0", ek(voa, k)));
            }
            Verdict::UnequalProven { .. } => d.unequal += 1,
            Verdict::Inconclusive { gap } => {
                d.inconclusive += 1;
                d.witness(format!("class [{}]: {gap}", ek(voa, k)));
            }
        }
    }
    d.status = if d.equal > 0 {
        Status::Fail
    } else if d.inconclusive > 0 {
        Status::Inconclusive
    } else {
        Status::Pass
    };

    Ok(Theorem11Report {
        n: n.to_string(),
        m: m.to_string(),
        slice_dim: o.slice_dim(),
        span_rank: o.rank(),
        quotient_dim: q.dim(),
        well_defined: a,
        multiplicative: b,
        surjective: c,
        injective: d,
    })
}

/// One inconclusive instance of the two-factor congruence.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma84Gap {
    pub u: String,
    pub v: String,
    pub n: String,
    pub m: String,
    pub p: String,
    pub gap: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma84Report {
    pub checked: usize,
    pub equal: usize,
    pub unequal: usize,
    pub inconclusive: Vec<Lemma84Gap>,
    /// Text of unequal-proven instances.
    pub failures: Vec<String>,
}

impl Lemma84Report {
    pub fn passed(&self) -> bool {
        self.unequal == 0
    }
}

/// `J_{m-n}(u *^n_{g,m,p} v)` against `J_{p-n}(u) J_{m-p}(v)` for all basis
/// vectors of weight `<= max_weight` and all `(n, m, p)` in `ns × ms × ps`,
/// with one span per `(n, m)` at `cutoffs`.
pub fn lemma84_grid(
    voa: &VoaBackend,
    ns: &[Mode],
    ms: &[Mode],
    ps: &[Mode],
    max_weight: i64,
    cutoffs: SpanCutoffs,
    budget: usize,
) -> Result<Lemma84Report> {
    let t = voa.order();
    let modules = implemented_modules(voa);
    let keys = voa.basis_up_to(max_weight);
    let mut report = Lemma84Report {
        checked: 0,
        equal: 0,
        unequal: 0,
        inconclusive: Vec::new(),
        failures: Vec::new(),
    };
    let e = |k: &BasisKey| Element::basis(k.clone());
    for &n in ns {
        for &m in ms {
            let ctx = FiltrationCtx::new(n, m, t)?;
            let o = crate::zhu::build_o_span(voa, n, m, cutoffs)?;
            for &p in ps {
                let params = ZhuParams::new(n, m, p, t)?;
                for u in &keys {
                    for v in &keys {
                        let prod = star_product(voa, &e(u), &e(v), &params)?;
                        let x = phi(voa, &ctx, &prod);
                        let y =
                            upoly_mul(voa, &j_map(voa, p - n, &e(u)), &j_map(voa, m - p, &e(v)));
                        let verdict =
                            u_equals_mod_filtration(voa, &x, &y, &ctx, &modules, Some(&o), budget)?;
                        report.checked += 1;
                        match verdict {
                            Verdict::EqualProven { .. } => report.equal += 1,
                            Verdict::UnequalProven { module, state, .. } => {
                                report.unequal += 1;
                                report
                                    .failures
                                    .push(format!("u = {}, v = {}, (n, m, p) = ({n}, {m}, {p}): differs on state {}", ek(voa, u), ek(voa, v), show_state(&module, &state)));
                            }
                            Verdict::Inconclusive { gap } => report.inconclusive.push(Lemma84Gap {
                                u: ek(voa, u),
                                v: ek(voa, v),
                                n: n.to_string(),
                                m: m.to_string(),
                                p: p.to_string(),
                                gap,
                            }),
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct StraightenReport {
    pub checked: usize,
    pub passed: usize,
    pub max_steps: usize,
    /// Text of failing monomials with the reason.
    pub failures: Vec<String>,
}

/// Straightens `count` random 2- and 3-factor monomials and compares
/// `J_{m-n}(result)` with the monomial on all module states of degree `<= m`.
/// `m` is the least admissible value plus a random offset in `[0, 1]`.
pub fn straighten_suite(
    voa: &VoaBackend,
    count: usize,
    mode_bound: Mode,
    max_weight: i64,
    budget: usize,
    seed: u64,
) -> Result<StraightenReport> {
    let t = voa.order();
    let modules = implemented_modules(voa);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = StraightenReport {
        checked: 0,
        passed: 0,
        max_steps: 0,
        failures: Vec::new(),
    };
    for i in 0..count {
        let mono = random_monomial(voa, &mut rng, 2 + i % 2, mode_bound, max_weight);
        let d = mono.degree();
        let least = if d.is_negative() { -d } else { Mode::ZERO };
        let m = least + Mode::new(rng.gen_range(0..=t as i64), t as i64);
        let ctx = FiltrationCtx::new(m + d, m, t)?;
        report.checked += 1;
        let mut st = Straightener::new(voa, ctx, budget);
        let u = match st.monomial(&mono) {
            Ok(u) => u,
            Err(err) => {
                report.failures.push(format!(
                    "{} at (n, m) = ({}, {m}): {err}",
                    format_monomial(voa, &mono),
                    m + d
                ));
                continue;
            }
        };
        report.max_steps = report.max_steps.max(st.steps());
        let lhs = phi(voa, &ctx, &u);
        let rhs = UPoly::term(mono.clone(), crate::scalars::int(1));
        let bad = modules.iter().find_map(|engine| {
            engine.module().states_up_to(m).into_iter().find(|s| {
                let w = ModVec::basis(s.clone());
                upoly_act(voa, engine, &lhs, &w) != upoly_act(voa, engine, &rhs, &w)
            })
        });
        match bad {
            None => report.passed += 1,
            Some(s) => report.failures.push(format!(
                "{} at (n, m) = ({}, {m}): differs on state {}",
                format_monomial(voa, &mono),
                m + d,
                show_state("", &s)
            )),
        }
    }
    Ok(report)
}
