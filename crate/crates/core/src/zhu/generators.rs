use std::collections::HashMap;

use crate::error::Result;
use crate::scalars::{modes_up_to, Mode};
use crate::voa::{BasisKey, Element, VoaBackend};

use super::products::{circ_product, l_generator, star_product, ZhuParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    /// `u ∘^n_{g,m} v`
    Circ,
    /// `(L(-1) + L(0) + m - n) u`
    L,
    /// `u *^n_{m,p3} ((a *^{p3}_{p1,p2} b) *^{p3}_{m,p1} c - a *^{p3}_{m,p2} (b *^{p2}_{m,p1} c))`
    Assoc,
    /// `(a *^n_{p1,p2} y) *^n_{m,p1} c` with `y` an `O'_{g,p2,p1}` generator
    Induced,
}

impl GeneratorKind {
    pub const PRIME: [GeneratorKind; 2] = [GeneratorKind::Circ, GeneratorKind::L];
    pub const ALL: [GeneratorKind; 4] = [
        GeneratorKind::Circ,
        GeneratorKind::L,
        GeneratorKind::Assoc,
        GeneratorKind::Induced,
    ];
}

/// Which generator of `O_{g,n,m}(V)` an element is.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorLabel {
    Circ {
        u: BasisKey,
        v: BasisKey,
    },
    L {
        u: BasisKey,
    },
    Assoc {
        u: BasisKey,
        a: BasisKey,
        b: BasisKey,
        c: BasisKey,
        p1: Mode,
        p2: Mode,
        p3: Mode,
    },
    Induced {
        a: BasisKey,
        inner: Box<GeneratorLabel>,
        c: BasisKey,
        p1: Mode,
        p2: Mode,
    },
}

impl GeneratorLabel {
    pub fn kind(&self) -> GeneratorKind {
        match self {
            GeneratorLabel::Circ { .. } => GeneratorKind::Circ,
            GeneratorLabel::L { .. } => GeneratorKind::L,
            GeneratorLabel::Assoc { .. } => GeneratorKind::Assoc,
            GeneratorLabel::Induced { .. } => GeneratorKind::Induced,
        }
    }
}

/// Bounds on generator inputs: basis vectors of weight `<= weight`, and
/// auxiliary indices `p_i <= p` in `(1/T)N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorBounds {
    pub weight: i64,
    pub p: Mode,
}

type Visitor<'a> = dyn FnMut(&GeneratorLabel, &Element) -> Result<()> + 'a;

/// Enumerates the requested generator kinds of `O_{g,n,m}(V)` in a fixed
/// order. Generators that vanish identically are skipped.
pub fn for_each_generator(
    voa: &VoaBackend,
    n: Mode,
    m: Mode,
    bounds: GeneratorBounds,
    kinds: &[GeneratorKind],
    visit: &mut Visitor<'_>,
) -> Result<()> {
    let t = voa.order();
    super::products::check_natural(n, t, "n")?;
    super::products::check_natural(m, t, "m")?;
    let basis: Vec<BasisKey> = voa.basis_up_to(bounds.weight);
    let ps = modes_up_to(bounds.p, t);

    if kinds.contains(&GeneratorKind::Circ) || kinds.contains(&GeneratorKind::L) {
        for (label, x) in prime_generators(voa, n, m, &basis, kinds)? {
            visit(&label, &x)?;
        }
    }

    if kinds.contains(&GeneratorKind::Assoc) {
        let mut star = StarCache::new(voa);
        for &p3 in &ps {
            for &p1 in &ps {
                for &p2 in &ps {
                    for a in &basis {
                        for b in &basis {
                            for c in &basis {
                                let ab = star.keys(a, b, ZhuParams::new(p3, p1, p2, t)?)?;
                                let left = star.elem(&ab, c, ZhuParams::new(p3, m, p1, t)?)?;
                                let bc = star.keys(b, c, ZhuParams::new(p2, m, p1, t)?)?;
                                let right = star_product(
                                    voa,
                                    &Element::basis(a.clone()),
                                    &bc,
                                    &ZhuParams::new(p3, m, p2, t)?,
                                )?;
                                let x = left.sub(&right);
                                if x.is_zero() {
                                    continue;
                                }
                                for u in &basis {
                                    let g = star_product(
                                        voa,
                                        &Element::basis(u.clone()),
                                        &x,
                                        &ZhuParams::new(n, m, p3, t)?,
                                    )?;
                                    if g.is_zero() {
                                        continue;
                                    }
                                    let label = GeneratorLabel::Assoc {
                                        u: u.clone(),
                                        a: a.clone(),
                                        b: b.clone(),
                                        c: c.clone(),
                                        p1,
                                        p2,
                                        p3,
                                    };
                                    visit(&label, &g)?;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    if kinds.contains(&GeneratorKind::Induced) {
        for &p1 in &ps {
            for &p2 in &ps {
                let inner = prime_generators(voa, p2, p1, &basis, &GeneratorKind::PRIME)?;
                let outer = ZhuParams::new(n, p1, p2, t)?;
                let last = ZhuParams::new(n, m, p1, t)?;
                for a in &basis {
                    let ea = Element::basis(a.clone());
                    for (ylabel, y) in &inner {
                        let z = star_product(voa, &ea, y, &outer)?;
                        if z.is_zero() {
                            continue;
                        }
                        for c in &basis {
                            let g = star_product(voa, &z, &Element::basis(c.clone()), &last)?;
                            if g.is_zero() {
                                continue;
                            }
                            let label = GeneratorLabel::Induced {
                                a: a.clone(),
                                inner: Box::new(ylabel.clone()),
                                c: c.clone(),
                                p1,
                                p2,
                            };
                            visit(&label, &g)?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// The `∘` and `L` generators of `O'_{g,n,m}(V)` on the given basis vectors.
pub fn prime_generators(
    voa: &VoaBackend,
    n: Mode,
    m: Mode,
    basis: &[BasisKey],
    kinds: &[GeneratorKind],
) -> Result<Vec<(GeneratorLabel, Element)>> {
    let mut out = Vec::new();
    if kinds.contains(&GeneratorKind::Circ) {
        for u in basis {
            let eu = Element::basis(u.clone());
            for v in basis {
                let x = circ_product(voa, &eu, &Element::basis(v.clone()), n, m)?;
                if !x.is_zero() {
                    out.push((
                        GeneratorLabel::Circ {
                            u: u.clone(),
                            v: v.clone(),
                        },
                        x,
                    ));
                }
            }
        }
    }
    if kinds.contains(&GeneratorKind::L) {
        for u in basis {
            let x = l_generator(voa, &Element::basis(u.clone()), n, m);
            if !x.is_zero() {
                out.push((GeneratorLabel::L { u: u.clone() }, x));
            }
        }
    }
    Ok(out)
}

struct StarCache<'a> {
    voa: &'a VoaBackend,
    keys: HashMap<(BasisKey, BasisKey, ZhuParams), Element>,
}

impl<'a> StarCache<'a> {
    fn new(voa: &'a VoaBackend) -> Self {
        StarCache {
            voa,
            keys: HashMap::new(),
        }
    }

    fn keys(&mut self, a: &BasisKey, b: &BasisKey, p: ZhuParams) -> Result<Element> {
        let k = (a.clone(), b.clone(), p);
        if let Some(x) = self.keys.get(&k) {
            return Ok(x.clone());
        }
        let x = star_product(
            self.voa,
            &Element::basis(a.clone()),
            &Element::basis(b.clone()),
            &p,
        )?;
        self.keys.insert(k, x.clone());
        Ok(x)
    }

    /// `x * c` computed through the cached basis products `key * c`.
    fn elem(&mut self, x: &Element, c: &BasisKey, p: ZhuParams) -> Result<Element> {
        let mut out = Element::zero();
        for (k, coeff) in x.iter() {
            out.add_scaled(&self.keys(k, c, p)?, coeff);
        }
        Ok(out)
    }
}
