//! Exact checks of the vertex operator algebra axioms on finite samples.

use super::{Element, VoaBackend};
use crate::modules::ModVec;
use crate::scalars::{frac, int, Mode};

/// Jacobi identity on `V` applied to `w`.
pub fn check_jacobi_on_v(
    voa: &VoaBackend,
    u: &Element,
    v: &Element,
    w: &Element,
    l: i64,
    m: i64,
    n: i64,
) -> bool {
    let engine = voa.adjoint();
    let mut total = ModVec::zero();
    for (k, c) in w.iter() {
        let d = crate::modules::jacobi_defect(voa, engine, u, v, l, Mode::int(m), Mode::int(n), k);
        total.add_scaled(&d, c);
    }
    total.is_zero()
}

/// `(L(-1) u)_n v = -n u_{n-1} v`.
pub fn check_derivative_axiom(voa: &VoaBackend, u: &Element, n: i64, v: &Element) -> bool {
    let du = voa.virasoro_mode(-1, u);
    voa.mode_product(&du, n, v) == voa.mode_product(u, n - 1, v).scaled(&int(-n))
}

/// `g` acts by a scalar on each sector, so `g(u_i v) = g(u)_i g(v)` is
/// additivity of sectors on every nonzero product of homogeneous parts.
pub fn check_automorphism(voa: &VoaBackend, u: &Element, v: &Element, i: i64) -> bool {
    let t = voa.order();
    voa.components(u).iter().all(|(&(_, su), cu)| {
        voa.components(v).iter().all(|(&(_, sv), cv)| {
            voa.mode_product(cu, i, cv)
                .keys()
                .all(|k| voa.sector(k) == (su + sv) % t)
        })
    })
}

/// `[L(m), L(n)] v = (m-n) L(m+n) v + δ_{m+n,0} (m^3-m)/12 c v`.
pub fn check_virasoro_relation(voa: &VoaBackend, m: i64, n: i64, v: &Element) -> bool {
    let lhs = voa
        .virasoro_mode(m, &voa.virasoro_mode(n, v))
        .sub(&voa.virasoro_mode(n, &voa.virasoro_mode(m, v)));
    let mut rhs = voa.virasoro_mode(m + n, v).scaled(&int(m - n));
    if m + n == 0 {
        rhs.add_scaled(v, &(frac(m * m * m - m, 12) * voa.central_charge()));
    }
    lhs == rhs
}

/// `L(0) v = wt(v) v` on each weight component.
pub fn check_l0_grading(voa: &VoaBackend, v: &Element) -> bool {
    let mut expect = Element::zero();
    for (k, c) in v.iter() {
        expect.add_term(k.clone(), c * int(voa.weight(k)));
    }
    voa.virasoro_mode(0, v) == expect
}

/// `1_n v = δ_{n,-1} v`.
pub fn check_vacuum(voa: &VoaBackend, n: i64, v: &Element) -> bool {
    let out = voa.mode_product(&voa.vacuum(), n, v);
    if n == -1 {
        out == *v
    } else {
        out.is_zero()
    }
}

/// `u_n 1 = δ_{n,-1} u` for `n >= -1`.
pub fn check_creation(voa: &VoaBackend, u: &Element, n: i64) -> bool {
    assert!(n >= -1);
    let out = voa.mode_product(u, n, &voa.vacuum());
    if n == -1 {
        out == *u
    } else {
        out.is_zero()
    }
}

/// `wt(u_i v) = wt u + wt v - i - 1` for homogeneous `u, v`.
pub fn check_grading(voa: &VoaBackend, u: &Element, i: i64, v: &Element) -> bool {
    let (Some(wu), Some(wv)) = (voa.homogeneous_weight(u), voa.homogeneous_weight(v)) else {
        return true;
    };
    let out = voa.mode_product(u, i, v);
    if i >= wu + wv && !out.is_zero() {
        return false;
    }
    let ok = out.keys().all(|k| voa.weight(k) == wu + wv - i - 1);
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::Partition;
    use crate::scalars::frac;

    fn key(parts: &[u32]) -> Element {
        Element::basis(Partition::new(parts.to_vec()))
    }

    #[test]
    fn jacobi_trivial_cases() {
        let h = VoaBackend::heisenberg();
        let one = h.vacuum();
        let a = key(&[1]);
        let b = key(&[2, 1]);
        for (l, m, n) in [(0, 0, 0), (1, -2, 1), (-2, 1, -1)] {
            assert!(check_jacobi_on_v(&h, &one, &a, &b, l, m, n));
            assert!(check_jacobi_on_v(&h, &a, &a, &b, l, m, n));
        }
    }

    #[test]
    fn derivative_examples() {
        let h = VoaBackend::heisenberg();
        let a = key(&[1]);
        for n in -3..=3 {
            for v in h.basis_up_to(3) {
                assert!(check_derivative_axiom(&h, &a, n, &Element::basis(v)));
            }
            assert!(check_derivative_axiom(&h, &h.vacuum(), n, &a));
        }
        let vir = VoaBackend::virasoro(frac(1, 2));
        assert!(check_derivative_axiom(&vir, &vir.omega(), 0, &vir.vacuum()));
    }

    #[test]
    fn automorphism_examples() {
        let h = VoaBackend::heisenberg();
        let a = key(&[1]);
        for i in -3..=3 {
            assert!(check_automorphism(&h, &a, &a, i));
            for p in h.mode_product(&a, i, &a).keys() {
                assert_eq!(h.sector(p), 0);
            }
        }
        assert_eq!(h.sector(&Partition::new(vec![1, 1])), 0);
        assert!(h.omega().keys().all(|k| h.sector(k) == 0));
        assert_eq!(h.sector(&Partition::empty()), 0);
    }

    #[test]
    fn vacuum_creation_grading() {
        let h = VoaBackend::heisenberg();
        for k in h.basis_up_to(4) {
            let u = Element::basis(k);
            assert!(check_creation(&h, &u, -1));
            assert!(check_creation(&h, &u, 2));
            assert!(check_vacuum(&h, -1, &u));
            assert!(check_vacuum(&h, 1, &u));
            assert!(check_grading(&h, &u, -2, &key(&[2])));
            assert!(check_l0_grading(&h, &u));
        }
    }
}
