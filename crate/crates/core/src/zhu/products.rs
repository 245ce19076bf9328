use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalars::{binomial_mode, delta_indicator, Mode, Scalar};
use crate::voa::{Element, VoaBackend};

/// The indices `n, m, p` of `*^n_{g,m,p}`, each in `(1/T)N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZhuParams {
    pub n: Mode,
    pub m: Mode,
    pub p: Mode,
    order: u32,
}

pub(crate) fn check_natural(x: Mode, order: u32, what: &str) -> Result<()> {
    if x.is_negative() || !x.has_order(order) {
        return Err(Error::InvalidParameter(format!(
            "{what} = {x} is not in (1/{order})N"
        )));
    }
    Ok(())
}

impl ZhuParams {
    pub fn new(n: Mode, m: Mode, p: Mode, order: u32) -> Result<Self> {
        check_natural(n, order, "n")?;
        check_natural(m, order, "m")?;
        check_natural(p, order, "p")?;
        Ok(ZhuParams { n, m, p, order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `d = ⌊m⌋ + ⌊n⌋ - ⌊p⌋ - 1 + δ_{m̄}(r) + δ_{n̄}(T-r)`.
    pub fn d(&self, r: u32) -> i64 {
        self.m.floor() + self.n.floor() - self.p.floor() - 1 + deltas(self.n, self.m, r, self.order)
    }

    /// Whether `p̄ - n̄ ≡ r (mod T)`.
    pub fn gate(&self, r: u32) -> bool {
        let t = self.order as i64;
        (self.p.bar(self.order) as i64 - self.n.bar(self.order) as i64 - r as i64).rem_euclid(t)
            == 0
    }
}

fn deltas(n: Mode, m: Mode, r: u32, order: u32) -> i64 {
    let t = order as i64;
    let dm = delta_indicator(m.bar(order) as i64, r as i64, order).expect("bar below T");
    let dn = delta_indicator(n.bar(order) as i64, t - r as i64, order).expect("bar below T");
    (dm + dn) as i64
}

/// `wt u - 1 + ⌊m⌋ + δ_{m̄}(r) + r/T`.
fn exponent(weight: i64, r: u32, m: Mode, order: u32) -> Mode {
    let dm = delta_indicator(m.bar(order) as i64, r as i64, order).expect("bar below T") as i64;
    Mode::int(weight - 1 + m.floor() + dm) + Mode::new(r as i64, order as i64)
}

/// `Res_z (1+z)^e z^{-pole} Y(u,z) v = Σ_k C(e,k) u_{k-pole} v` for homogeneous `u`.
pub fn residue(voa: &VoaBackend, u: &Element, v: &Element, e: Mode, pole: i64) -> Element {
    let mut out = Element::zero();
    let (Some(wu), Some(wv)) = (voa.max_weight(u), voa.max_weight(v)) else {
        return out;
    };
    for (j, c) in residue_terms(e, pole, wu + wv) {
        out.add_scaled(&voa.mode_product(u, j, v), &c);
    }
    out
}

fn residue_terms(e: Mode, pole: i64, jmax: i64) -> Vec<(i64, Scalar)> {
    (0..(jmax + pole).max(0))
        .map(|k| (k - pole, binomial_mode(e, k as u32)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// `u *^n_{g,m,p} v = Σ_j c_j u_j v` for `u` of weight `wt` in sector `r`;
/// only `j < jmax` is listed (`u_j v = 0` for `j >= wt u + wt v`).
pub fn star_terms(wt: i64, r: u32, params: &ZhuParams, jmax: i64) -> Vec<(i64, Scalar)> {
    if !params.gate(r) {
        return Vec::new();
    }
    let d = params.d(r);
    let e = exponent(wt, r, params.m, params.order);
    let mut acc: BTreeMap<i64, Scalar> = BTreeMap::new();
    for i in 0..=params.p.floor() {
        let c = binomial_mode(Mode::int(d + i), i as u32);
        if c.is_zero() {
            continue;
        }
        let c = if i % 2 == 0 { c } else { -c };
        for (j, b) in residue_terms(e, d + 1 + i, jmax) {
            *acc.entry(j).or_default() += &c * &b;
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// `u ∘^n_{g,m} v = Σ_j c_j u_j v`, as for [`star_terms`].
pub fn circ_terms(wt: i64, r: u32, n: Mode, m: Mode, order: u32, jmax: i64) -> Vec<(i64, Scalar)> {
    let pole = m.floor() + n.floor() + deltas(n, m, r, order) + 1;
    residue_terms(exponent(wt, r, m, order), pole, jmax)
}

/// Upper bound on the weight of `u *^n_{g,m,p} v` for `wt u <= wu`, `wt v <= wv`.
pub fn star_weight_bound(wu: i64, wv: i64, params: &ZhuParams) -> i64 {
    (0..params.order)
        .filter(|&r| params.gate(r))
        .map(|r| wu + wv + params.d(r) + params.p.floor())
        .max()
        .unwrap_or(0)
}

/// Upper bound on the weight of `u ∘^n_{g,m} v`.
pub fn circ_weight_bound(wu: i64, wv: i64, n: Mode, m: Mode, order: u32) -> i64 {
    (0..order)
        .map(|r| wu + wv + m.floor() + n.floor() + deltas(n, m, r, order))
        .max()
        .unwrap_or(0)
}

fn apply_terms(
    voa: &VoaBackend,
    part: &Element,
    v: &Element,
    terms: &[(i64, Scalar)],
    out: &mut Element,
) {
    for (j, c) in terms {
        out.add_scaled(&voa.mode_product(part, *j, v), c);
    }
}

/// `u *^n_{g,m,p} v`, extended bilinearly over the homogeneous parts of `u`.
pub fn star_product(
    voa: &VoaBackend,
    u: &Element,
    v: &Element,
    params: &ZhuParams,
) -> Result<Element> {
    let t = voa.order();
    if params.order != t {
        return Err(Error::InvalidParameter(format!(
            "parameters of order {} for a backend of order {t}",
            params.order
        )));
    }
    let mut out = Element::zero();
    let Some(wv) = voa.max_weight(v) else {
        return Ok(out);
    };
    for ((wt, r), part) in voa.components(u) {
        let terms = star_terms(wt, r, params, wt + wv);
        apply_terms(voa, &part, v, &terms, &mut out);
    }
    Ok(out)
}

/// `u ∘^n_{g,m} v`, bilinear.
pub fn circ_product(
    voa: &VoaBackend,
    u: &Element,
    v: &Element,
    n: Mode,
    m: Mode,
) -> Result<Element> {
    let t = voa.order();
    check_natural(n, t, "n")?;
    check_natural(m, t, "m")?;
    let mut out = Element::zero();
    let Some(wv) = voa.max_weight(v) else {
        return Ok(out);
    };
    for ((wt, r), part) in voa.components(u) {
        let terms = circ_terms(wt, r, n, m, t, wt + wv);
        apply_terms(voa, &part, v, &terms, &mut out);
    }
    Ok(out)
}

/// `(L(-1) + L(0) + m - n) u`.
pub fn l_generator(voa: &VoaBackend, u: &Element, n: Mode, m: Mode) -> Element {
    let mut out = voa.virasoro_mode(-1, u);
    out.add_assign(&voa.virasoro_mode(0, u));
    out.add_scaled(u, &(m - n).to_scalar());
    out
}

/// `u *_{g,n} v = u *^n_{g,n,n} v`.
pub fn zhu_product(voa: &VoaBackend, u: &Element, v: &Element, n: Mode) -> Result<Element> {
    star_product(voa, u, v, &ZhuParams::new(n, n, n, voa.order())?)
}

/// Left action `u *̄^n_{g,m} x = u *^n_{g,m,n} x`.
pub fn left_action(
    voa: &VoaBackend,
    u: &Element,
    x: &Element,
    n: Mode,
    m: Mode,
) -> Result<Element> {
    star_product(voa, u, x, &ZhuParams::new(n, m, n, voa.order())?)
}

/// Right action `x *^n_{g,m} u = x *^n_{g,m,m} u`.
pub fn right_action(
    voa: &VoaBackend,
    x: &Element,
    u: &Element,
    n: Mode,
    m: Mode,
) -> Result<Element> {
    star_product(voa, x, u, &ZhuParams::new(n, m, m, voa.order())?)
}
