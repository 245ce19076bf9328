//! Virasoro action on PBW states `L(-n_1)...L(-n_k)|v>`, `n_1 >= ... >= n_k`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::Zero;

use crate::lincomb::{LinComb, Partition};
use crate::scalars::{frac, int, Scalar};

type Memo = HashMap<(i64, Partition), Arc<LinComb<Partition>>>;

/// PBW straightening for the vacuum Verma quotient (`L(n)|0> = 0`, `n >= -1`).
pub struct VirasoroPbw {
    c: Scalar,
    memo: RwLock<Memo>,
}

impl VirasoroPbw {
    pub fn new(c: Scalar) -> Self {
        VirasoroPbw {
            c,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn central_charge(&self) -> &Scalar {
        &self.c
    }

    /// `L(k)` applied to the basis state `state`.
    pub fn apply(&self, k: i64, state: &Partition) -> Arc<LinComb<Partition>> {
        if state.size() as i64 - k < 0 {
            return Arc::new(LinComb::zero());
        }
        let key = (k, state.clone());
        if let Some(hit) = self.memo.read().unwrap().get(&key) {
            return hit.clone();
        }
        let out = Arc::new(self.compute(k, state));
        self.memo.write().unwrap().insert(key, out.clone());
        out
    }

    fn compute(&self, k: i64, state: &Partition) -> LinComb<Partition> {
        let Some((top, rest)) = state.split_first() else {
            return if k <= -2 {
                LinComb::basis(Partition::new(vec![(-k) as u32]))
            } else {
                LinComb::zero()
            };
        };
        let top = top as i64;
        if k <= -2 && -k >= top {
            return LinComb::basis(state.with((-k) as u32));
        }
        // L(k) L(-top) X = L(-top) L(k) X + (k + top) L(k - top) X + δ_{k,top} (k^3 - k)/12 c X
        let mut out = LinComb::zero();
        for (s, coeff) in self.apply(k, &rest).iter() {
            out.add_scaled(&self.apply(-top, s), coeff);
        }
        if k + top != 0 {
            out.add_scaled(&self.apply(k - top, &rest), &int(k + top));
        }
        if k == top {
            let anomaly = frac(k * k * k - k, 12) * &self.c;
            if !anomaly.is_zero() {
                out.add_term(rest, anomaly);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn l2_lm2_vacuum_is_half_c() {
        let pbw = VirasoroPbw::new(frac(1, 2));
        let out = pbw.apply(2, &st(&[2]));
        assert_eq!(*out, LinComb::term(st(&[]), frac(1, 4)));
    }

    #[test]
    fn l0_is_grading() {
        let pbw = VirasoroPbw::new(int(26));
        for s in [st(&[2]), st(&[3, 2]), st(&[2, 2, 2]), st(&[5])] {
            let out = pbw.apply(0, &s);
            assert_eq!(*out, LinComb::term(s.clone(), int(s.size() as i64)));
        }
    }

    #[test]
    fn lm1_on_vacuum_vanishes_and_raises() {
        let pbw = VirasoroPbw::new(int(1));
        assert!(pbw.apply(-1, &st(&[])).is_zero());
        // L(-1) L(-2)|0> = L(-3)|0>
        assert_eq!(*pbw.apply(-1, &st(&[2])), LinComb::basis(st(&[3])));
        // L(-2) L(-3)|0> = L(-3) L(-2)|0> + L(-5)|0>
        let out = pbw.apply(-2, &st(&[3]));
        let mut expect = LinComb::basis(st(&[3, 2]));
        expect.add_term(st(&[5]), int(1));
        assert_eq!(*out, expect);
    }
}
