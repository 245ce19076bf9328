//! Weak and admissible `g`-twisted modules.
//!
//! A module backend only supplies its grading and the action of the
//! generator's modes on basis states. [`FieldEngine`] extends that to the
//! full vertex operator `Y_M(u, z)` of every `u` in `V`.

mod checks;
mod engine;

pub(crate) use checks::jacobi_defect;
pub use checks::{check_commutator, check_jacobi, omega_n_approx, OmegaApprox};
pub use engine::{o_apply, o_matrix, FieldAction, FieldEngine, OperatorMatrix};

use crate::lincomb::{LinComb, Partition};
use crate::scalars::Mode;
use crate::voa::{oscillator, BasisKey, Kind, Structure};

/// Module basis state; parts are creation magnitudes in ticks of `1/T`.
pub type ModState = Partition;
pub type ModVec = LinComb<ModState>;

pub trait ModuleBackend: Send + Sync {
    fn structure(&self) -> &Structure;

    fn name(&self) -> &'static str;

    /// Order `T` of the automorphism the module is twisted by.
    fn order(&self) -> u32;

    /// Sector of a basis vector of `V` under that automorphism.
    fn sector(&self, key: &BasisKey) -> u32;

    /// Whether a creation magnitude (in ticks) may occur in a state.
    fn allowed_part(&self, ticks: u32) -> bool;

    /// The generator mode `a_q` on a basis state. Zero off the generator's coset.
    fn generator_action(&self, q: Mode, state: &ModState) -> ModVec;

    /// Text of the top vector, e.g. `|0>` or `|tw>`.
    fn ket(&self) -> &'static str;

    fn degree(&self, state: &ModState) -> Mode {
        Mode::new(state.size() as i64, self.order() as i64)
    }

    fn top(&self) -> ModState {
        Partition::empty()
    }

    fn states_of_degree(&self, d: Mode) -> Vec<ModState> {
        if d.is_negative() || !d.has_order(self.order()) {
            return Vec::new();
        }
        let ticks = d.ticks(self.order()) as u32;
        Partition::all_of_size(ticks, &|p| self.allowed_part(p))
    }

    /// All states of degree `<= d`, graded order.
    fn states_up_to(&self, d: Mode) -> Vec<ModState> {
        let t = self.order() as i64;
        let top = (d.0 * t).floor().to_integer();
        (0..=top)
            .flat_map(|k| self.states_of_degree(Mode::new(k, t)))
            .collect()
    }

    /// Whether the module is twisted by the backend's own automorphism.
    fn is_g_twisted(&self) -> bool {
        self.order() == self.structure().order()
    }
}

/// Heisenberg Fock space, untwisted (`a(n)`, `n` in `Z`) or twisted by
/// `a -> -a` (`a(n)`, `n` in `1/2 + Z`). Zero momentum.
pub struct FockModule {
    structure: Structure,
    twisted: bool,
}

impl FockModule {
    pub fn untwisted(structure: Structure) -> Self {
        assert_eq!(structure.kind(), Kind::Heisenberg);
        FockModule {
            structure,
            twisted: false,
        }
    }

    pub fn twisted(structure: Structure) -> Self {
        assert_eq!(structure.kind(), Kind::Heisenberg);
        FockModule {
            structure,
            twisted: true,
        }
    }
}

impl ModuleBackend for FockModule {
    fn structure(&self) -> &Structure {
        &self.structure
    }

    fn name(&self) -> &'static str {
        if self.twisted {
            "twisted-fock"
        } else {
            "fock"
        }
    }

    fn order(&self) -> u32 {
        if self.twisted {
            2
        } else {
            1
        }
    }

    fn sector(&self, key: &BasisKey) -> u32 {
        if self.twisted {
            (key.len() % 2) as u32
        } else {
            0
        }
    }

    fn allowed_part(&self, ticks: u32) -> bool {
        !self.twisted || ticks % 2 == 1
    }

    fn generator_action(&self, q: Mode, state: &ModState) -> ModVec {
        let r = self.sector(&self.structure.generator_key());
        if !q.in_sector(r, self.order()) {
            return ModVec::zero();
        }
        oscillator(q, self.order(), state)
    }

    fn ket(&self) -> &'static str {
        if self.twisted {
            "|tw>"
        } else {
            "|0>"
        }
    }
}

/// The Virasoro vacuum module, i.e. `V` itself for the Virasoro backend.
pub struct VacuumModule {
    structure: Structure,
}

impl VacuumModule {
    pub fn new(structure: Structure) -> Self {
        assert_eq!(structure.kind(), Kind::Virasoro);
        VacuumModule { structure }
    }
}

impl ModuleBackend for VacuumModule {
    fn structure(&self) -> &Structure {
        &self.structure
    }

    fn name(&self) -> &'static str {
        "vacuum"
    }

    fn order(&self) -> u32 {
        1
    }

    fn sector(&self, _key: &BasisKey) -> u32 {
        0
    }

    fn allowed_part(&self, ticks: u32) -> bool {
        ticks >= 2
    }

    fn generator_action(&self, q: Mode, state: &ModState) -> ModVec {
        match q.to_int() {
            // omega_q = L(q - 1)
            Some(k) => (*self.structure.pbw().apply(k - 1, state)).clone(),
            None => ModVec::zero(),
        }
    }

    fn ket(&self) -> &'static str {
        "|0>"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{frac, int};

    #[test]
    fn twisted_fock_states() {
        let m = FockModule::twisted(Structure::heisenberg());
        assert_eq!(m.states_of_degree(Mode::ZERO).len(), 1);
        assert_eq!(m.states_of_degree(Mode::new(1, 2)).len(), 1);
        assert_eq!(m.states_of_degree(Mode::int(1)).len(), 1);
        assert_eq!(m.states_of_degree(Mode::new(3, 2)).len(), 2);
        assert_eq!(m.states_of_degree(Mode::int(2)).len(), 2);
        assert_eq!(m.states_up_to(Mode::new(3, 2)).len(), 5);
        assert_eq!(m.degree(&Partition::new(vec![3, 1])), Mode::int(2));
    }

    #[test]
    fn twisted_oscillators() {
        let m = FockModule::twisted(Structure::heisenberg());
        let top = m.top();
        assert!(m.generator_action(Mode::new(1, 2), &top).is_zero());
        let up = m.generator_action(Mode::new(-1, 2), &top);
        assert_eq!(up, ModVec::basis(Partition::new(vec![1])));
        let down = m.generator_action(Mode::new(1, 2), &Partition::new(vec![1]));
        assert_eq!(down, ModVec::term(top.clone(), frac(1, 2)));
        // integral modes do not act on the twisted space
        assert!(m.generator_action(Mode::int(-1), &top).is_zero());
    }

    #[test]
    fn vacuum_module_generator() {
        let m = VacuumModule::new(Structure::virasoro(int(1)));
        // omega_{-1}|0> = L(-2)|0>
        let out = m.generator_action(Mode::int(-1), &m.top());
        assert_eq!(out, ModVec::basis(Partition::new(vec![2])));
        assert!(m.generator_action(Mode::new(1, 2), &m.top()).is_zero());
    }
}
