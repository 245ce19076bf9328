use proptest::prelude::*;

use twzhu::scalars::{frac, int, Mode, Scalar};
use twzhu::text::{format_element, parse_element};
use twzhu::zhu::{star_product, ZhuParams};
use twzhu::{Element, VoaBackend};

fn backend(which: bool) -> VoaBackend {
    if which {
        VoaBackend::heisenberg()
    } else {
        VoaBackend::virasoro(frac(1, 2))
    }
}

fn coeff() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=6).prop_map(|(a, b)| frac(a, b))
}

fn element(voa: &VoaBackend, max_weight: i64) -> impl Strategy<Value = Element> {
    let keys = voa.basis_up_to(max_weight);
    proptest::collection::vec((0..keys.len(), coeff()), 0..5).prop_map(move |terms| {
        let mut x = Element::zero();
        for (i, c) in terms {
            x.add_term(keys[i].clone(), c);
        }
        x
    })
}

fn factorial(k: i64) -> Scalar {
    (1..=k).fold(int(1), |acc, j| acc * int(j))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trips((which, x) in any::<bool>().prop_flat_map(|w| element(&backend(w), 5).prop_map(move |x| (w, x)))) {
        let voa = backend(which);
        prop_assert_eq!(parse_element(&voa, &format_element(&voa, &x)).unwrap(), x);
    }

    /// `u_n v = Σ_j (-1)^{n+j+1} L(-1)^j / j! (v_{n+j} u)`.
    #[test]
    fn skew_symmetry(which in any::<bool>(), i in 0usize..64, k in 0usize..64, n in -3i64..4) {
        let voa = backend(which);
        let keys = voa.basis_up_to(3);
        let u = Element::basis(keys[i % keys.len()].clone());
        let v = Element::basis(keys[k % keys.len()].clone());
        let lhs = voa.mode_product(&u, n, &v);
        let top = voa.max_weight(&u).unwrap() + voa.max_weight(&v).unwrap();
        let mut rhs = Element::zero();
        for j in 0..=(top - n).max(0) + 1 {
            let mut w = voa.mode_product(&v, n + j, &u);
            for _ in 0..j {
                w = voa.virasoro_mode(-1, &w);
            }
            let sign = if (n + j + 1).rem_euclid(2) == 0 { int(1) } else { int(-1) };
            rhs.add_scaled(&w, &(sign / factorial(j)));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn star_is_bilinear(which in any::<bool>(), a in coeff(), b in coeff(), i in 0usize..64, j in 0usize..64, k in 0usize..64, np in 0i64..3, mp in 0i64..3) {
        let voa = backend(which);
        let t = voa.order() as i64;
        let keys = voa.basis_up_to(3);
        let pick = |x: usize| Element::basis(keys[x % keys.len()].clone());
        let (u1, u2, v) = (pick(i), pick(j), pick(k));
        let (n, m) = (Mode::new(np, t), Mode::new(mp, t));
        let p = ZhuParams::new(n, m, n, voa.order()).unwrap();
        let mix = u1.scaled(&a).add(&u2.scaled(&b));
        let lhs = star_product(&voa, &mix, &v, &p).unwrap();
        let rhs = star_product(&voa, &u1, &v, &p).unwrap().scaled(&a).add(&star_product(&voa, &u2, &v, &p).unwrap().scaled(&b));
        prop_assert_eq!(lhs, rhs);
    }
}
