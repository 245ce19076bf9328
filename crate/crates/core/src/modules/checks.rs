use std::collections::BTreeMap;

use num_traits::Zero;

use super::{o_apply, FieldEngine, ModState, ModVec};
use crate::error::Result;
use crate::linalg::{SliceBasis, Subspace};
use crate::scalars::{binomial_mode, int, modes_up_to, Mode, Scalar};
use crate::voa::{Element, VoaBackend};

fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// LHS minus RHS of the (twisted) Jacobi identity applied to one state.
pub(crate) fn jacobi_defect(
    voa: &VoaBackend,
    engine: &FieldEngine,
    u: &Element,
    v: &Element,
    l: i64,
    m: Mode,
    n: Mode,
    state: &ModState,
) -> ModVec {
    let (Some(wu), Some(wv)) = (voa.max_weight(u), voa.max_weight(v)) else {
        return ModVec::zero();
    };
    let deg = engine.module().degree(state);
    let w = ModVec::basis(state.clone());
    let mut out = ModVec::zero();

    // Σ_i (-1)^i C(l,i) u_{m+l-i} v_{n+i} w, cut off where v_{n+i} w = 0
    let last = (deg + wv - n - 1).floor();
    for i in 0..=last.max(-1) {
        let c = sign(i) * binomial_mode(Mode::int(l), i as u32);
        if c.is_zero() {
            continue;
        }
        let x = engine.act(v, n + i, &w);
        out.add_scaled(&engine.act(u, m + l - i, &x), &c);
    }
    let last = (deg + wu - m - 1).floor();
    for i in 0..=last.max(-1) {
        let c = -(sign(l) * sign(i) * binomial_mode(Mode::int(l), i as u32));
        if c.is_zero() {
            continue;
        }
        let x = engine.act(u, m + i, &w);
        out.add_scaled(&engine.act(v, n + l - i, &x), &c);
    }
    // RHS: Σ_i C(m,i) (u_{l+i} v)_{m+n-i} w
    for i in 0..(wu + wv - l).max(0) {
        let c = binomial_mode(m, i as u32);
        if c.is_zero() {
            continue;
        }
        let uv = voa.mode_product(u, l + i, v);
        if uv.is_zero() {
            continue;
        }
        out.add_scaled(&engine.act(&uv, m + n - i, &w), &-c);
    }
    out
}

/// Twisted Jacobi identity for `u, v` at `(l, m, n)` on every listed state.
pub fn check_jacobi(
    voa: &VoaBackend,
    engine: &FieldEngine,
    u: &Element,
    v: &Element,
    l: i64,
    m: Mode,
    n: Mode,
    states: &[ModState],
) -> bool {
    states
        .iter()
        .all(|s| jacobi_defect(voa, engine, u, v, l, m, n, s).is_zero())
}

/// `[u_m, v_n] = Σ_i C(m,i) (u_i v)_{m+n-i}` on all states of degree `<= max_degree`.
pub fn check_commutator(
    voa: &VoaBackend,
    engine: &FieldEngine,
    u: &Element,
    v: &Element,
    m: Mode,
    n: Mode,
    max_degree: Mode,
) -> bool {
    let (Some(wu), Some(wv)) = (voa.max_weight(u), voa.max_weight(v)) else {
        return true;
    };
    let products: Vec<(Scalar, Element)> = (0..(wu + wv).max(0))
        .map(|i| (binomial_mode(m, i as u32), voa.mode_product(u, i, v)))
        .collect();
    engine
        .module()
        .states_up_to(max_degree)
        .into_iter()
        .all(|s| {
            let w = ModVec::basis(s);
            let lhs = engine.act(u, m, &engine.act(v, n, &w)).sub(&engine.act(
                v,
                n,
                &engine.act(u, m, &w),
            ));
            let mut rhs = ModVec::zero();
            for (i, (c, uv)) in products.iter().enumerate() {
                if !c.is_zero() && !uv.is_zero() {
                    rhs.add_scaled(&engine.act(uv, m + n - i as i64, &w), c);
                }
            }
            lhs == rhs
        })
}

/// Outer approximation of `Omega_n(M)` inside the states of degree `<= kmax`.
#[derive(Clone, Debug)]
pub struct OmegaApprox {
    pub n: Mode,
    pub test_weight: i64,
    pub i_max: Mode,
    pub kmax: Mode,
    pub subspace: Subspace<ModState>,
}

/// States killed by `o_{n+i}(v)` for all basis `v` with `wt v <= test_weight`
/// and all `0 < i <= i_max` in `(1/T)Z`.
pub fn omega_n_approx(
    voa: &VoaBackend,
    engine: &FieldEngine,
    n: Mode,
    test_weight: i64,
    i_max: Mode,
    kmax: Mode,
) -> Result<OmegaApprox> {
    let module = engine.module();
    let slice = SliceBasis::new(module.states_up_to(kmax))?;
    let mut rows = Vec::new();
    for key in voa.basis_up_to(test_weight) {
        let v = Element::basis(key);
        for i in modes_up_to(i_max, module.order()).into_iter().skip(1) {
            let mut by_output: BTreeMap<ModState, Vec<Scalar>> = BTreeMap::new();
            for (j, s) in slice.keys().iter().enumerate() {
                let image = o_apply(engine, &v, n + i, &ModVec::basis(s.clone()))?;
                for (t, c) in image.iter() {
                    by_output
                        .entry(t.clone())
                        .or_insert_with(|| vec![Scalar::zero(); slice.dim()])[j] = c.clone();
                }
            }
            rows.extend(by_output.into_values());
        }
    }
    Ok(OmegaApprox {
        n,
        test_weight,
        i_max,
        kmax,
        subspace: Subspace::kernel(slice, &rows)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::Partition;
    use crate::modules::{FockModule, VacuumModule};
    use crate::scalars::frac;
    use std::sync::Arc;

    fn key(parts: &[u32]) -> Element {
        Element::basis(Partition::new(parts.to_vec()))
    }

    fn twisted(h: &VoaBackend) -> FieldEngine {
        FieldEngine::new(Arc::new(FockModule::twisted(h.structure().clone())))
    }

    #[test]
    fn half_odd_bracket() {
        let h = VoaBackend::heisenberg();
        let e = twisted(&h);
        let a = key(&[1]);
        assert!(check_commutator(
            &h,
            &e,
            &a,
            &a,
            Mode::new(1, 2),
            Mode::new(-1, 2),
            Mode::int(3)
        ));
        // and the value is 1/2 on every state
        for s in e.module().states_up_to(Mode::int(2)) {
            let w = ModVec::basis(s.clone());
            let lhs = e
                .act(&a, Mode::new(1, 2), &e.act(&a, Mode::new(-1, 2), &w))
                .sub(&e.act(&a, Mode::new(-1, 2), &e.act(&a, Mode::new(1, 2), &w)));
            assert_eq!(lhs, ModVec::term(s, frac(1, 2)));
        }
    }

    #[test]
    fn vacuum_commutes() {
        let h = VoaBackend::heisenberg();
        let e = twisted(&h);
        let one = h.vacuum();
        assert!(check_commutator(
            &h,
            &e,
            &one,
            &key(&[2, 1]),
            Mode::int(-1),
            Mode::new(3, 2),
            Mode::int(2)
        ));
    }

    #[test]
    fn virasoro_l1_lm1() {
        let vir = VoaBackend::virasoro(frac(1, 2));
        let e = FieldEngine::new(Arc::new(VacuumModule::new(vir.structure().clone())));
        let w = vir.omega();
        // [L(1), L(-1)] = 2 L(0)
        assert!(check_commutator(
            &vir,
            &e,
            &w,
            &w,
            Mode::int(2),
            Mode::int(0),
            Mode::int(4)
        ));
    }

    #[test]
    fn jacobi_on_twisted_fock_small() {
        let h = VoaBackend::heisenberg();
        let e = twisted(&h);
        let states = e.module().states_up_to(Mode::new(3, 2));
        let a = key(&[1]);
        let b = key(&[1, 1]);
        for l in -2..=2 {
            for mt in [-3, -1, 1, 3] {
                for n in -2..=2 {
                    assert!(check_jacobi(
                        &h,
                        &e,
                        &a,
                        &b,
                        l,
                        Mode::new(mt, 2),
                        Mode::int(n),
                        &states
                    ));
                }
            }
        }
    }

    #[test]
    fn omega_contains_low_degrees() {
        let h = VoaBackend::heisenberg();
        let e = twisted(&h);
        let kmax = Mode::int(2);
        for n in [Mode::ZERO, Mode::new(1, 2), Mode::int(1)] {
            let om = omega_n_approx(&h, &e, n, 3, Mode::int(2), kmax).unwrap();
            for s in e.module().states_up_to(n) {
                let c = om.subspace.slice().coords(&ModVec::basis(s)).unwrap();
                assert!(om.subspace.contains(&c).unwrap());
            }
        }
        // n = 0: exactly the top state survives in this window
        let om = omega_n_approx(&h, &e, Mode::ZERO, 3, Mode::int(2), kmax).unwrap();
        assert_eq!(om.subspace.rank(), 1);
        // a large n covers everything
        let om = omega_n_approx(&h, &e, Mode::int(3), 3, Mode::int(2), kmax).unwrap();
        assert_eq!(om.subspace.rank(), om.subspace.slice().dim());
    }
}
