use std::collections::HashMap;

use num_traits::Zero;

use super::{binom, sign, FiltrationCtx, UMonomial, UPoly};
use crate::error::{Error, Result};
use crate::scalars::Mode;
use crate::voa::{BasisKey, Element, VoaBackend};

/// Rewrites monomials of degree `n - m` to a single `J_{m-n}(u')` modulo
/// the filtration ideal.
///
/// With `J_s(u) J_t(v)` the last two factors, `mu` the largest element of
/// `s + Z` not above `m` and `l = s - mu - 1`,
///
/// ```text
/// J_s(u) J_t(v) = -Σ_{k≥1} (-1)^k C(l,k) J_{s-k}(u) J_{t+k}(v)
///                + Σ_{k≥0} C(wt u + mu, k) J_{s+t}(u_{l+k} v)
/// ```
///
/// modulo terms ending in `J_q` with `q > m`. Every new monomial is shorter
/// or ends in a larger mode, so the recursion terminates.
pub struct Straightener<'a> {
    voa: &'a VoaBackend,
    ctx: FiltrationCtx,
    budget: usize,
    steps: usize,
    memo: HashMap<UMonomial, Element>,
}

impl<'a> Straightener<'a> {
    pub fn new(voa: &'a VoaBackend, ctx: FiltrationCtx, budget: usize) -> Self {
        Straightener {
            voa,
            ctx,
            budget,
            steps: 0,
            memo: HashMap::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn ctx(&self) -> &FiltrationCtx {
        &self.ctx
    }

    pub fn monomial(&mut self, mono: &UMonomial) -> Result<Element> {
        let expected = self.ctx.degree();
        if mono.degree() != expected {
            return Err(Error::DegreeMismatch {
                expected: expected.to_string(),
                found: mono.degree().to_string(),
            });
        }
        self.reduce(mono)
    }

    pub fn poly(&mut self, x: &UPoly) -> Result<Element> {
        let mut out = Element::zero();
        for (mono, c) in x.iter() {
            out.add_scaled(&self.monomial(mono)?, c);
        }
        Ok(out)
    }

    fn reduce(&mut self, mono: &UMonomial) -> Result<Element> {
        if self.ctx.is_dropped(mono) {
            return Ok(Element::zero());
        }
        let f = mono.factors();
        if f.len() == 1 {
            return Ok(Element::basis(f[0].1.clone()));
        }
        if let Some(hit) = self.memo.get(mono) {
            return Ok(hit.clone());
        }
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::StepBudget(self.budget));
        }
        let voa = self.voa;
        let n = f.len();
        let prefix = &f[..n - 2];
        let (s, u) = f[n - 2].clone();
        let (t, v) = f[n - 1].clone();
        let mu = self.ctx.anchor(s);
        let l = (s - mu).to_int().expect("anchor in coset") - 1;
        let wu = voa.weight(&u);

        let mut children: Vec<(UMonomial, crate::scalars::Scalar)> = Vec::new();
        let with = |tail: Vec<(Mode, BasisKey)>| {
            let mut all = prefix.to_vec();
            all.extend(tail);
            UMonomial::new(voa, all)
        };
        let kmax = (self.ctx.m - t).floor();
        for k in 1..=kmax {
            let c = -(sign(k) * binom(Mode::int(l), k));
            if c.is_zero() {
                continue;
            }
            if let Some(child) = with(vec![(s - k, u.clone()), (t + k, v.clone())]) {
                children.push((child, c));
            }
        }
        let top = wu + voa.weight(&v);
        for k in 0.. {
            let j = l + k;
            if j >= top {
                break;
            }
            let c = binom(Mode::int(wu) + mu, k);
            if c.is_zero() {
                continue;
            }
            let w = voa.mode_product_keys(&u, j, &v);
            for (key, cw) in w.iter() {
                if let Some(child) = with(vec![(s + t, key.clone())]) {
                    children.push((child, &c * cw));
                }
            }
        }

        let measure = mono.measure();
        let mut out = Element::zero();
        for (child, c) in children {
            if child.measure() >= measure {
                return Err(Error::InvalidParameter(format!(
                    "straightening measure did not decrease: {mono:?} -> {child:?}"
                )));
            }
            out.add_scaled(&self.reduce(&child)?, &c);
        }
        self.memo.insert(mono.clone(), out.clone());
        Ok(out)
    }
}

/// `u'` with `J_{m-n}(u') ≡ mono` modulo `U(V[g])_{n-m}^{-m-1/T}`.
pub fn straighten(
    voa: &VoaBackend,
    mono: &UMonomial,
    ctx: FiltrationCtx,
    budget: usize,
) -> Result<Element> {
    Straightener::new(voa, ctx, budget).monomial(mono)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{FieldEngine, FockModule, ModVec, ModuleBackend};
    use crate::ueva::{phi, upoly_act};
    use crate::zhu::{star_product, ZhuParams};
    use std::sync::Arc;

    fn key(parts: &[u32]) -> BasisKey {
        BasisKey::new(parts.to_vec())
    }

    #[test]
    fn single_factor_is_its_vector() {
        let h = VoaBackend::heisenberg();
        let ctx = FiltrationCtx::new(Mode::ZERO, Mode::new(1, 2), 2).unwrap();
        let mono = UMonomial::new(&h, vec![(Mode::new(1, 2), key(&[1]))]).unwrap();
        assert_eq!(
            straighten(&h, &mono, ctx, 100).unwrap(),
            Element::basis(key(&[1]))
        );
    }

    #[test]
    fn large_last_mode_is_dropped() {
        let h = VoaBackend::heisenberg();
        let ctx = FiltrationCtx::new(Mode::int(2), Mode::ZERO, 2).unwrap();
        let mono = UMonomial::new(
            &h,
            vec![(Mode::new(-5, 2), key(&[1])), (Mode::new(1, 2), key(&[1]))],
        )
        .unwrap();
        assert!(straighten(&h, &mono, ctx, 100).unwrap().is_zero());
    }

    #[test]
    fn degree_is_checked() {
        let h = VoaBackend::heisenberg();
        let ctx = FiltrationCtx::new(Mode::ZERO, Mode::ZERO, 2).unwrap();
        let mono = UMonomial::new(&h, vec![(Mode::new(1, 2), key(&[1]))]).unwrap();
        assert!(matches!(
            straighten(&h, &mono, ctx, 100),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn action_matches_on_twisted_fock() {
        let h = VoaBackend::heisenberg();
        let module: Arc<dyn ModuleBackend> = Arc::new(FockModule::twisted(h.structure().clone()));
        let engine = FieldEngine::new(module.clone());
        let half = |k| Mode::new(k, 2);
        let cases = vec![
            (vec![(half(1), key(&[1])), (half(-1), key(&[1]))], half(0)),
            (vec![(half(-1), key(&[1])), (half(1), key(&[1]))], half(1)),
            (
                vec![
                    (half(-3), key(&[2])),
                    (half(2), key(&[1, 1])),
                    (half(1), key(&[1])),
                ],
                half(2),
            ),
            (
                vec![(half(3), key(&[1])), (half(-4), key(&[2, 1]))],
                half(3),
            ),
        ];
        for (factors, m) in cases {
            let mono = UMonomial::new(&h, factors).unwrap();
            let n = m + mono.degree();
            let ctx = FiltrationCtx::new(n, m, 2).unwrap();
            let u = straighten(&h, &mono, ctx, 10_000).unwrap();
            let lhs = phi(&h, &ctx, &u);
            for s in module.states_up_to(m) {
                let w = ModVec::basis(s);
                assert_eq!(
                    upoly_act(&h, &engine, &lhs, &w),
                    mono.act(&h, &engine, &w),
                    "{mono:?}"
                );
            }
        }
    }

    #[test]
    fn two_factor_case_matches_star_product_at_n_zero() {
        // n = m = p = 0, T = 1: J_0(u) J_0(v) straightens to u * v exactly
        let v = VoaBackend::virasoro(crate::scalars::frac(1, 2));
        let ctx = FiltrationCtx::new(Mode::ZERO, Mode::ZERO, 1).unwrap();
        let p = ZhuParams::new(Mode::ZERO, Mode::ZERO, Mode::ZERO, 1).unwrap();
        for a in v.basis_up_to(4) {
            for b in v.basis_up_to(4) {
                let mono =
                    UMonomial::new(&v, vec![(Mode::ZERO, a.clone()), (Mode::ZERO, b.clone())])
                        .unwrap();
                let got = straighten(&v, &mono, ctx, 10_000).unwrap();
                let want = star_product(
                    &v,
                    &Element::basis(a.clone()),
                    &Element::basis(b.clone()),
                    &p,
                )
                .unwrap();
                assert_eq!(got, want);
            }
        }
    }
}
