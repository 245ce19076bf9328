//! Vertex operator algebra backends.
//!
//! Elements of `V` are linear combinations of PBW/Fock basis vectors:
//! for the rank-one Heisenberg algebra a partition `n_1 >= ... >= n_k >= 1`
//! labels `a(-n_1)...a(-n_k)|0>`, for the Virasoro vacuum algebra a
//! partition with parts `>= 2` labels `L(-n_1)...L(-n_k)|0>`.
//!
//! Only the action of the single strong generator (`a = a(-1)|0>` resp.
//! `omega`) is hard-coded. Every other vertex operator, including the mode
//! products `u_i v` of `V` itself, is produced by the field engine in
//! [`crate::modules`] acting on the adjoint module.

pub mod axioms;
pub mod virasoro;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::lincomb::{LinComb, Partition};
use crate::modules::{FieldEngine, FockModule, ModuleBackend, VacuumModule};
use crate::scalars::{frac, int, Mode, Scalar};
use virasoro::VirasoroPbw;

pub type BasisKey = Partition;
pub type Element = LinComb<BasisKey>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Heisenberg,
    Virasoro,
}

struct StructureInner {
    kind: Kind,
    c: Scalar,
    pbw: Option<VirasoroPbw>,
}

/// The static data of a backend: grading, sectors, and the primitive
/// action of the generator on `V`. Cheap to clone.
#[derive(Clone)]
pub struct Structure {
    inner: Arc<StructureInner>,
}

impl Structure {
    pub fn heisenberg() -> Self {
        Structure {
            inner: Arc::new(StructureInner {
                kind: Kind::Heisenberg,
                c: int(1),
                pbw: None,
            }),
        }
    }

    pub fn virasoro(c: Scalar) -> Self {
        Structure {
            inner: Arc::new(StructureInner {
                kind: Kind::Virasoro,
                c: c.clone(),
                pbw: Some(VirasoroPbw::new(c)),
            }),
        }
    }

    pub fn kind(&self) -> Kind {
        self.inner.kind
    }

    pub fn name(&self) -> &'static str {
        match self.inner.kind {
            Kind::Heisenberg => "heisenberg",
            Kind::Virasoro => "virasoro",
        }
    }

    /// Letter used for generator modes in text forms.
    pub fn letter(&self) -> char {
        match self.inner.kind {
            Kind::Heisenberg => 'a',
            Kind::Virasoro => 'L',
        }
    }

    /// Order of the automorphism `g` carried by the backend.
    pub fn order(&self) -> u32 {
        match self.inner.kind {
            Kind::Heisenberg => 2,
            Kind::Virasoro => 1,
        }
    }

    pub fn central_charge(&self) -> &Scalar {
        &self.inner.c
    }

    pub fn weight(&self, key: &BasisKey) -> i64 {
        key.size() as i64
    }

    /// Sector `r` with `g key = exp(-2 pi i r / T) key`.
    pub fn sector(&self, key: &BasisKey) -> u32 {
        match self.inner.kind {
            Kind::Heisenberg => (key.len() % 2) as u32,
            Kind::Virasoro => 0,
        }
    }

    pub fn min_part(&self) -> u32 {
        match self.inner.kind {
            Kind::Heisenberg => 1,
            Kind::Virasoro => 2,
        }
    }

    pub fn is_valid_key(&self, key: &BasisKey) -> bool {
        key.parts().iter().all(|&p| p >= self.min_part())
    }

    pub fn generator_key(&self) -> BasisKey {
        Partition::new(vec![self.min_part()])
    }

    pub fn generator_weight(&self) -> i64 {
        self.min_part() as i64
    }

    /// Writes `key = a_l b` with `a` the generator; `None` for the vacuum.
    pub fn split(&self, key: &BasisKey) -> Option<(i64, BasisKey)> {
        let (top, rest) = key.split_first()?;
        let l = match self.inner.kind {
            Kind::Heisenberg => -(top as i64),
            Kind::Virasoro => 1 - top as i64,
        };
        Some((l, rest))
    }

    /// The generator mode `a_k` applied to a basis vector of `V`.
    pub fn generator_product(&self, k: i64, key: &BasisKey) -> Element {
        match self.inner.kind {
            Kind::Heisenberg => oscillator(Mode::int(k), 1, key),
            Kind::Virasoro => (*self.pbw().apply(k - 1, key)).clone(),
        }
    }

    pub(crate) fn pbw(&self) -> &VirasoroPbw {
        self.inner.pbw.as_ref().expect("virasoro backend")
    }

    pub fn basis(&self, weight: i64) -> Vec<BasisKey> {
        if weight < 0 {
            return Vec::new();
        }
        let min = self.min_part();
        Partition::all_of_size(weight as u32, &|p| p >= min)
    }

    pub fn basis_up_to(&self, max_weight: i64) -> Vec<BasisKey> {
        (0..=max_weight).flat_map(|w| self.basis(w)).collect()
    }

    pub fn vacuum(&self) -> Element {
        Element::basis(Partition::empty())
    }

    pub fn omega(&self) -> Element {
        match self.inner.kind {
            Kind::Heisenberg => Element::term(Partition::new(vec![1, 1]), frac(1, 2)),
            Kind::Virasoro => Element::basis(Partition::new(vec![2])),
        }
    }
}

/// Heisenberg oscillator `a(q)` on a Fock state whose parts are creation
/// magnitudes in ticks of `1/order`; `[a(p), a(q)] = p δ_{p+q,0}`.
pub(crate) fn oscillator(q: Mode, order: u32, state: &Partition) -> LinComb<Partition> {
    if !q.has_order(order) {
        return LinComb::zero();
    }
    let t = q.ticks(order);
    match t.signum() {
        -1 => LinComb::basis(state.with((-t) as u32)),
        1 => {
            let n = state.count(t as u32);
            match state.without(t as u32) {
                Some(rest) => LinComb::term(rest, q.to_scalar() * int(n as i64)),
                None => LinComb::zero(),
            }
        }
        _ => LinComb::zero(),
    }
}

/// A backend together with the engine that realizes `V` as a module over
/// itself; this is what computes `u_i v`.
#[derive(Clone)]
pub struct VoaBackend {
    structure: Structure,
    adjoint: Arc<FieldEngine>,
}

impl VoaBackend {
    /// Rank-one free boson, `omega = a(-1)^2|0>/2`, `g: a -> -a` of order 2.
    pub fn heisenberg() -> Self {
        let structure = Structure::heisenberg();
        let module: Arc<dyn ModuleBackend> = Arc::new(FockModule::untwisted(structure.clone()));
        VoaBackend {
            structure,
            adjoint: Arc::new(FieldEngine::new(module)),
        }
    }

    /// Universal Virasoro vacuum algebra at central charge `c`, `g = id`.
    pub fn virasoro(c: Scalar) -> Self {
        let structure = Structure::virasoro(c);
        let module: Arc<dyn ModuleBackend> = Arc::new(VacuumModule::new(structure.clone()));
        VoaBackend {
            structure,
            adjoint: Arc::new(FieldEngine::new(module)),
        }
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn adjoint(&self) -> &Arc<FieldEngine> {
        &self.adjoint
    }

    pub fn name(&self) -> &'static str {
        self.structure.name()
    }

    pub fn order(&self) -> u32 {
        self.structure.order()
    }

    pub fn central_charge(&self) -> &Scalar {
        self.structure.central_charge()
    }

    pub fn vacuum(&self) -> Element {
        self.structure.vacuum()
    }

    pub fn omega(&self) -> Element {
        self.structure.omega()
    }

    pub fn weight(&self, key: &BasisKey) -> i64 {
        self.structure.weight(key)
    }

    pub fn sector(&self, key: &BasisKey) -> u32 {
        self.structure.sector(key)
    }

    pub fn basis(&self, weight: i64) -> Vec<BasisKey> {
        self.structure.basis(weight)
    }

    pub fn basis_up_to(&self, max_weight: i64) -> Vec<BasisKey> {
        self.structure.basis_up_to(max_weight)
    }

    /// `u_i v` for basis vectors.
    pub fn mode_product_keys(&self, u: &BasisKey, i: i64, v: &BasisKey) -> Arc<Element> {
        self.adjoint.act_key(u, Mode::int(i), v)
    }

    /// `u_i v`, bilinear in `u` and `v`.
    pub fn mode_product(&self, u: &Element, i: i64, v: &Element) -> Element {
        let mut out = Element::zero();
        for (ku, cu) in u.iter() {
            for (kv, cv) in v.iter() {
                let p = self.mode_product_keys(ku, i, kv);
                out.add_scaled(&p, &(cu * cv));
            }
        }
        out
    }

    /// `L(n) v = omega_{n+1} v`.
    pub fn virasoro_mode(&self, n: i64, v: &Element) -> Element {
        self.mode_product(&self.omega(), n + 1, v)
    }

    /// Components keyed by `(weight, sector)`.
    pub fn components(&self, u: &Element) -> BTreeMap<(i64, u32), Element> {
        let mut out: BTreeMap<(i64, u32), Element> = BTreeMap::new();
        for (k, c) in u.iter() {
            out.entry((self.weight(k), self.sector(k)))
                .or_default()
                .add_term(k.clone(), c.clone());
        }
        out
    }

    /// The common weight of all terms, if there is one. `None` for zero.
    pub fn homogeneous_weight(&self, u: &Element) -> Option<i64> {
        let mut weights = u.keys().map(|k| self.weight(k));
        let w = weights.next()?;
        weights.all(|x| x == w).then_some(w)
    }

    pub fn homogeneous_sector(&self, u: &Element) -> Option<u32> {
        let mut sectors = u.keys().map(|k| self.sector(k));
        let s = sectors.next()?;
        sectors.all(|x| x == s).then_some(s)
    }

    pub fn max_weight(&self, u: &Element) -> Option<i64> {
        u.keys().map(|k| self.weight(k)).max()
    }

    pub fn min_weight(&self, u: &Element) -> Option<i64> {
        u.keys().map(|k| self.weight(k)).min()
    }

    /// Whether every key is a valid basis label for this backend.
    pub fn is_valid(&self, u: &Element) -> bool {
        u.keys().all(|k| self.structure.is_valid_key(k))
    }

    pub fn is_vacuum_multiple(&self, u: &Element) -> bool {
        u.keys().all(|k| k.is_empty()) && !u.is_zero()
    }
}

impl std::fmt::Debug for VoaBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "VoaBackend({}, c = {})",
            self.name(),
            self.central_charge()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn key(parts: &[u32]) -> BasisKey {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn slices_and_sectors() {
        let h = VoaBackend::heisenberg();
        assert_eq!(h.basis(2), vec![key(&[1, 1]), key(&[2])]);
        assert_eq!(h.sector(&key(&[1, 1])), 0);
        assert_eq!(h.sector(&key(&[2])), 1);
        let v = VoaBackend::virasoro(frac(1, 2));
        assert_eq!(v.basis(4), vec![key(&[2, 2]), key(&[4])]);
        assert_eq!(v.basis(1), Vec::<BasisKey>::new());
        assert_eq!(h.order(), 2);
        assert_eq!(v.order(), 1);
    }

    #[test]
    fn alpha_one_alpha_is_vacuum() {
        let h = VoaBackend::heisenberg();
        let a = Element::basis(key(&[1]));
        assert_eq!(h.mode_product(&a, 1, &a), h.vacuum());
        assert!(h.mode_product(&a, 0, &a).is_zero());
        assert_eq!(h.mode_product(&a, -1, &a), Element::basis(key(&[1, 1])));
    }

    #[test]
    fn vacuum_is_identity_field() {
        for voa in [VoaBackend::heisenberg(), VoaBackend::virasoro(int(26))] {
            let one = voa.vacuum();
            for k in voa.basis_up_to(4) {
                let v = Element::basis(k);
                assert_eq!(voa.mode_product(&one, -1, &v), v);
                assert!(voa.mode_product(&one, -2, &v).is_zero());
                assert!(voa.mode_product(&one, 0, &v).is_zero());
            }
        }
    }

    #[test]
    fn omega_one_omega() {
        for voa in [VoaBackend::heisenberg(), VoaBackend::virasoro(frac(1, 2))] {
            let w = voa.omega();
            assert_eq!(voa.mode_product(&w, 1, &w), w.scaled(&int(2)));
        }
    }

    #[test]
    fn virasoro_examples() {
        let h = VoaBackend::heisenberg();
        assert!(h.virasoro_mode(-1, &h.vacuum()).is_zero());
        for k in h.basis_up_to(4) {
            let v = Element::basis(k.clone());
            assert_eq!(h.virasoro_mode(0, &v), v.scaled(&int(h.weight(&k))));
        }
        let c = frac(1, 2);
        let vir = VoaBackend::virasoro(c.clone());
        let l2 = vir.virasoro_mode(-2, &vir.vacuum());
        assert_eq!(
            vir.virasoro_mode(2, &l2),
            vir.vacuum().scaled(&(c / int(2)))
        );
    }

    #[test]
    fn heisenberg_omega_is_conformal() {
        // L(-1) a = a(-2)|0>
        let h = VoaBackend::heisenberg();
        let a = Element::basis(key(&[1]));
        assert_eq!(h.virasoro_mode(-1, &a), Element::basis(key(&[2])));
        assert_eq!(h.virasoro_mode(-2, &h.vacuum()), h.omega());
    }

    #[test]
    fn components_split_by_weight_and_sector() {
        let h = VoaBackend::heisenberg();
        let mut u = Element::basis(key(&[1, 1]));
        u.add_term(key(&[2]), int(3));
        u.add_term(key(&[]), int(1));
        let comps = h.components(&u);
        assert_eq!(comps.len(), 3);
        assert!(comps.contains_key(&(2, 0)));
        assert!(comps.contains_key(&(2, 1)));
        assert_eq!(h.homogeneous_weight(&u), None);
        assert!(Scalar::zero().is_zero());
    }
}
