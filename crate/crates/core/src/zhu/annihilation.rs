use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::error::Result;
use crate::lincomb::LinComb;
use crate::modules::{FieldEngine, ModState, ModVec};
use crate::scalars::Mode;
use crate::voa::{BasisKey, Element, VoaBackend};

use super::generators::{for_each_generator, GeneratorBounds, GeneratorKind, GeneratorLabel};

/// Entry `(i, s)`: coefficient of state `s` in `o_{m-n}(x)` applied to the
/// `i`-th domain state.
pub type Trace = LinComb<(u32, ModState)>;

/// `x -> o_{m-n}(x)` restricted to the module states of degree `<= m`,
/// memoized on basis vectors.
pub struct ZeroModeTrace {
    engine: Arc<FieldEngine>,
    shift: Mode,
    domain: Vec<ModState>,
    memo: RwLock<HashMap<BasisKey, Arc<Trace>>>,
}

impl ZeroModeTrace {
    pub fn new(engine: Arc<FieldEngine>, n: Mode, m: Mode) -> Self {
        // o_{m-n} lowers degree by m - n, so states below m - n are killed by grading
        let domain = engine
            .module()
            .states_up_to(m)
            .into_iter()
            .filter(|s| !(engine.module().degree(s) + n - m).is_negative())
            .collect();
        ZeroModeTrace {
            engine,
            shift: m - n,
            domain,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn domain(&self) -> &[ModState] {
        &self.domain
    }

    pub fn of_key(&self, key: &BasisKey) -> Arc<Trace> {
        if let Some(hit) = self.memo.read().unwrap().get(key) {
            return hit.clone();
        }
        let q = self.shift + (self.engine.structure().weight(key) - 1);
        let mut out = Trace::zero();
        for (i, w) in self.domain.iter().enumerate() {
            for (s, c) in self.engine.act_key(key, q, w).iter() {
                out.add_term((i as u32, s.clone()), c.clone());
            }
        }
        let out = Arc::new(out);
        self.memo.write().unwrap().insert(key.clone(), out.clone());
        out
    }

    /// `o_{m-n}(x)` on the domain; `o` acts on each weight component.
    pub fn of(&self, x: &Element) -> Trace {
        let mut out = Trace::zero();
        for (k, c) in x.iter() {
            out.add_scaled(&self.of_key(k), c);
        }
        out
    }

    /// The first domain state with a nonzero image, and that image.
    pub fn witness(&self, t: &Trace) -> Option<(ModState, ModVec)> {
        let (first, _) = t.keys().next()?;
        let image = t
            .iter()
            .filter(|((i, _), _)| i == first)
            .map(|((_, s), c)| (s.clone(), c.clone()))
            .collect();
        Some((self.domain[*first as usize].clone(), image))
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub label: GeneratorLabel,
    pub state: ModState,
    pub image: ModVec,
}

#[derive(Clone, Debug)]
pub struct AnnihilationReport {
    pub n: Mode,
    pub m: Mode,
    pub bounds: GeneratorBounds,
    /// Nonzero generators checked, by kind.
    pub checked: BTreeMap<GeneratorKind, usize>,
    pub violations: Vec<Violation>,
}

impl AnnihilationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `o_{m-n}(x) w = 0` for every generator `x` of the requested kinds
/// and every state `w` of degree `<= m` of the engine's module.
pub fn check_annihilation(
    voa: &VoaBackend,
    engine: Arc<FieldEngine>,
    n: Mode,
    m: Mode,
    bounds: GeneratorBounds,
    kinds: &[GeneratorKind],
) -> Result<AnnihilationReport> {
    let trace = ZeroModeTrace::new(engine, n, m);
    let mut checked: BTreeMap<GeneratorKind, usize> = BTreeMap::new();
    let mut violations = Vec::new();
    for_each_generator(voa, n, m, bounds, kinds, &mut |label, x| {
        *checked.entry(label.kind()).or_default() += 1;
        let t = trace.of(x);
        if let Some((state, image)) = trace.witness(&t) {
            violations.push(Violation {
                label: label.clone(),
                state,
                image,
            });
        }
        Ok(())
    })?;
    Ok(AnnihilationReport {
        n,
        m,
        bounds,
        checked,
        violations,
    })
}
