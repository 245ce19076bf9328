use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::linalg::{SliceBasis, Subspace};
use crate::scalars::{modes_up_to, Mode};
use crate::voa::{BasisKey, Element, VoaBackend};

use super::generators::GeneratorKind;
use super::products::{
    check_natural, circ_product, circ_weight_bound, l_generator, star_product, star_weight_bound,
    ZhuParams,
};

/// Cutoffs of a truncated span: the slice `V_{<=N}`, generator inputs of
/// weight `<= G`, auxiliary indices `<= P`.
///
/// Generators are collected in `V_{<=N+slack}` and the span is then cut
/// down to `V_{<=N}`; with `slack = 0` only generators lying in `V_{<=N}`
/// contribute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpanCutoffs {
    pub n: i64,
    pub g: i64,
    pub p: Mode,
    pub slack: i64,
}

impl SpanCutoffs {
    pub fn new(n: i64, g: i64, p: Mode) -> Self {
        SpanCutoffs { n, g, p, slack: 0 }
    }

    pub fn with_slack(self, slack: i64) -> Self {
        SpanCutoffs { slack, ..self }
    }
}

/// An inner approximation of `O_{g,n,m}(V) ∩ V_{<=N}`.
#[derive(Clone, Debug)]
pub struct OSpan {
    pub n: Mode,
    pub m: Mode,
    pub cutoffs: SpanCutoffs,
    pub span: Subspace<BasisKey>,
    /// Nonzero generators that fit the working slice, by kind.
    pub used: BTreeMap<GeneratorKind, usize>,
    /// Nonzero generators discarded for leaving the working slice.
    pub discarded: BTreeMap<GeneratorKind, usize>,
}

impl OSpan {
    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    pub fn slice_dim(&self) -> usize {
        self.span.slice().dim()
    }

    /// `Some(true)` is a proof of membership in `O_{g,n,m}(V)`; `Some(false)`
    /// is inconclusive; `None` when `x` leaves the slice.
    pub fn contains(&self, x: &Element) -> Option<bool> {
        self.span.contains_lincomb(x)
    }

    pub fn reduce(&self, x: &Element) -> Result<Element> {
        self.span.reduce_lincomb(x)
    }
}

struct SpanBuilder<'a> {
    voa: &'a VoaBackend,
    top: i64,
    sub: Subspace<BasisKey>,
    used: BTreeMap<GeneratorKind, usize>,
    discarded: BTreeMap<GeneratorKind, usize>,
    keep: Option<(i64, Vec<(GeneratorKind, Element)>)>,
}

impl SpanBuilder<'_> {
    fn offer(&mut self, kind: GeneratorKind, x: &Element) -> Result<()> {
        if x.is_zero() {
            return Ok(());
        }
        if self.voa.max_weight(x).unwrap_or(0) > self.top {
            *self.discarded.entry(kind).or_default() += 1;
            return Ok(());
        }
        *self.used.entry(kind).or_default() += 1;
        self.sub.insert_lincomb(x)?;
        if let Some((n, kept)) = &mut self.keep {
            if self.voa.max_weight(x).unwrap_or(0) <= *n {
                kept.push((kind, x.clone()));
            }
        }
        Ok(())
    }
}

/// The span of the `O'`, `O''` and `O'''` generators within `cutoffs`
/// (`O'` only when `n = m`), cut down to `V_{<=N}`. Generators whose weight
/// bound exceeds the working slice are skipped without being formed.
pub fn build_o_span(voa: &VoaBackend, n: Mode, m: Mode, cutoffs: SpanCutoffs) -> Result<OSpan> {
    Ok(span_impl(voa, n, m, cutoffs, false)?.0)
}

/// [`build_o_span`], also returning every used generator lying in `V_{<=N}`.
pub fn build_o_span_keeping(
    voa: &VoaBackend,
    n: Mode,
    m: Mode,
    cutoffs: SpanCutoffs,
) -> Result<(OSpan, Vec<(GeneratorKind, Element)>)> {
    span_impl(voa, n, m, cutoffs, true)
}

fn span_impl(
    voa: &VoaBackend,
    n: Mode,
    m: Mode,
    cutoffs: SpanCutoffs,
    keep: bool,
) -> Result<(OSpan, Vec<(GeneratorKind, Element)>)> {
    let t = voa.order();
    check_natural(n, t, "n")?;
    check_natural(m, t, "m")?;
    check_natural(cutoffs.p, t, "P")?;
    if cutoffs.n < 0 || cutoffs.g < 0 || cutoffs.slack < 0 {
        return Err(Error::InvalidParameter(
            "cutoffs must be nonnegative".into(),
        ));
    }
    let top = cutoffs.n + cutoffs.slack;
    // descending weight, so pivots fall on the heaviest keys and
    // representatives stay low
    let mut keys = voa.basis_up_to(top);
    keys.reverse();
    let work = SliceBasis::new(keys)?;
    let mut b = SpanBuilder {
        voa,
        top,
        sub: Subspace::zero(work),
        used: BTreeMap::new(),
        discarded: BTreeMap::new(),
        keep: keep.then(|| (cutoffs.n, Vec::new())),
    };
    let basis = voa.basis_up_to(cutoffs.g);
    let wt = |k: &BasisKey| voa.weight(k);
    let e = |k: &BasisKey| Element::basis(k.clone());

    for u in &basis {
        for v in &basis {
            b.offer(GeneratorKind::Circ, &circ_product(voa, &e(u), &e(v), n, m)?)?;
        }
    }
    for u in &basis {
        b.offer(GeneratorKind::L, &l_generator(voa, &e(u), n, m))?;
    }

    if n != m {
        let ps = modes_up_to(cutoffs.p, t);
        let params = |a: Mode, b: Mode, c: Mode| ZhuParams::new(a, b, c, t);
        let mut cache: HashMap<(BasisKey, BasisKey, ZhuParams), Element> = HashMap::new();
        let mut star = |x: &BasisKey, y: &BasisKey, p: ZhuParams| -> Result<Element> {
            if let Some(hit) = cache.get(&(x.clone(), y.clone(), p)) {
                return Ok(hit.clone());
            }
            let out = star_product(voa, &e(x), &e(y), &p)?;
            cache.insert((x.clone(), y.clone(), p), out.clone());
            Ok(out)
        };
        for &p3 in &ps {
            for &p1 in &ps {
                for &p2 in &ps {
                    let (pab, pleft, pbc, pright) = (
                        params(p3, p1, p2)?,
                        params(p3, m, p1)?,
                        params(p2, m, p1)?,
                        params(p3, m, p2)?,
                    );
                    let outer = params(n, m, p3)?;
                    for a in &basis {
                        for bb in &basis {
                            for c in &basis {
                                let (wa, wb, wc) = (wt(a), wt(bb), wt(c));
                                let xw =
                                    star_weight_bound(star_weight_bound(wa, wb, &pab), wc, &pleft)
                                        .max(star_weight_bound(
                                            wa,
                                            star_weight_bound(wb, wc, &pbc),
                                            &pright,
                                        ));
                                let fits: Vec<&BasisKey> = basis
                                    .iter()
                                    .filter(|u| star_weight_bound(wt(u), xw, &outer) <= top)
                                    .collect();
                                if fits.is_empty() {
                                    continue;
                                }
                                let ab = star(a, bb, pab)?;
                                let mut x = Element::zero();
                                for (k, coeff) in ab.iter() {
                                    x.add_scaled(&star(k, c, pleft)?, coeff);
                                }
                                let bc = star(bb, c, pbc)?;
                                x = x.sub(&star_product(voa, &e(a), &bc, &pright)?);
                                if x.is_zero() {
                                    continue;
                                }
                                for u in fits {
                                    b.offer(
                                        GeneratorKind::Assoc,
                                        &star_product(voa, &e(u), &x, &outer)?,
                                    )?;
                                }
                            }
                        }
                    }
                }
            }
        }
        for &p1 in &ps {
            for &p2 in &ps {
                let outer = params(n, p1, p2)?;
                let last = params(n, m, p1)?;
                let mut inner: Vec<(i64, Element)> = Vec::new();
                for u in &basis {
                    for v in &basis {
                        inner.push((
                            circ_weight_bound(wt(u), wt(v), p2, p1, t),
                            circ_product(voa, &e(u), &e(v), p2, p1)?,
                        ));
                    }
                    inner.push((wt(u) + 1, l_generator(voa, &e(u), p2, p1)));
                }
                for a in &basis {
                    for (yw, y) in &inner {
                        if y.is_zero() {
                            continue;
                        }
                        let zw = star_weight_bound(wt(a), *yw, &outer);
                        if basis
                            .iter()
                            .all(|c| star_weight_bound(zw, wt(c), &last) > top)
                        {
                            continue;
                        }
                        let z = star_product(voa, &e(a), y, &outer)?;
                        if z.is_zero() {
                            continue;
                        }
                        for c in &basis {
                            if star_weight_bound(zw, wt(c), &last) > top {
                                continue;
                            }
                            b.offer(
                                GeneratorKind::Induced,
                                &star_product(voa, &z, &e(c), &last)?,
                            )?;
                        }
                    }
                }
            }
        }
    }

    let span = b
        .sub
        .intersect_coordinates(|k| voa.weight(k) <= cutoffs.n)?;
    let kept = b.keep.map(|(_, k)| k).unwrap_or_default();
    Ok((
        OSpan {
            n,
            m,
            cutoffs,
            span,
            used: b.used,
            discarded: b.discarded,
        },
        kept,
    ))
}

/// A reduced class, or a product that left the slice (inconclusive).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableEntry {
    Class(Element),
    Escaped { weight: i64 },
}

impl TableEntry {
    pub fn class(&self) -> Option<&Element> {
        match self {
            TableEntry::Class(x) => Some(x),
            TableEntry::Escaped { .. } => None,
        }
    }
}

/// Truncation of `A_{g,n}(V)` (`n = m`) or of the bimodule `A_{g,n,m}(V)`.
#[derive(Clone, Debug)]
pub struct QuotientAlgebra {
    pub n: Mode,
    pub m: Mode,
    pub o: OSpan,
    /// Representatives of a basis of `V_{<=N} / O`.
    pub basis: Vec<BasisKey>,
    /// `x *_{g,n} y` when `n = m`.
    pub mult: BTreeMap<(BasisKey, BasisKey), TableEntry>,
    /// `u *̄^n_{g,m} x` for `u` in the basis of `A_{g,n}(V)` at the same cutoffs.
    pub left: BTreeMap<(BasisKey, BasisKey), TableEntry>,
    /// `x *^n_{g,m} u` for `u` in the basis of `A_{g,m}(V)` at the same cutoffs.
    pub right: BTreeMap<(BasisKey, BasisKey), TableEntry>,
}

impl QuotientAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_algebra(&self) -> bool {
        self.n == self.m
    }

    /// The canonical representative of `x + O`.
    pub fn class(&self, voa: &VoaBackend, x: &Element) -> Result<TableEntry> {
        let w = voa.max_weight(x).unwrap_or(0);
        if w > self.o.cutoffs.n {
            return Ok(TableEntry::Escaped { weight: w });
        }
        Ok(TableEntry::Class(self.o.reduce(x)?))
    }
}

/// Builds the truncated quotient and its product or action tables.
pub fn quotient(
    voa: &VoaBackend,
    n: Mode,
    m: Mode,
    cutoffs: SpanCutoffs,
) -> Result<QuotientAlgebra> {
    let t = voa.order();
    let o = build_o_span(voa, n, m, cutoffs)?;
    let mut basis = o.span.quotient_basis();
    basis.sort();
    let mut q = QuotientAlgebra {
        n,
        m,
        o,
        basis,
        mult: BTreeMap::new(),
        left: BTreeMap::new(),
        right: BTreeMap::new(),
    };
    let e = |k: &BasisKey| Element::basis(k.clone());
    if n == m {
        let p = ZhuParams::new(n, n, n, t)?;
        for x in &q.basis {
            for y in &q.basis {
                let entry = q.class(voa, &star_product(voa, &e(x), &e(y), &p)?)?;
                q.mult.insert((x.clone(), y.clone()), entry);
            }
        }
        return Ok(q);
    }
    let left_basis = quotient_keys(voa, n, cutoffs)?;
    let right_basis = quotient_keys(voa, m, cutoffs)?;
    let (pl, pr) = (ZhuParams::new(n, m, n, t)?, ZhuParams::new(n, m, m, t)?);
    for x in &q.basis {
        for u in &left_basis {
            let entry = q.class(voa, &star_product(voa, &e(u), &e(x), &pl)?)?;
            q.left.insert((u.clone(), x.clone()), entry);
        }
        for u in &right_basis {
            let entry = q.class(voa, &star_product(voa, &e(x), &e(u), &pr)?)?;
            q.right.insert((x.clone(), u.clone()), entry);
        }
    }
    Ok(q)
}

fn quotient_keys(voa: &VoaBackend, n: Mode, cutoffs: SpanCutoffs) -> Result<Vec<BasisKey>> {
    let mut keys = build_o_span(voa, n, n, cutoffs)?.span.quotient_basis();
    keys.sort();
    Ok(keys)
}

/// The graded pieces `M(n) = A_{g,n,m}(V)` of the induced module for a fixed `m`.
pub struct InducedModule {
    m: Mode,
    pieces: BTreeMap<Mode, QuotientAlgebra>,
}

impl InducedModule {
    pub fn new(m: Mode, pieces: Vec<QuotientAlgebra>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for q in pieces {
            if q.m != m {
                return Err(Error::InvalidParameter(format!(
                    "piece A_(n={}, m={}) in a module with m = {m}",
                    q.n, q.m
                )));
            }
            map.insert(q.n, q);
        }
        Ok(InducedModule { m, pieces: map })
    }

    pub fn m(&self) -> Mode {
        self.m
    }

    pub fn piece(&self, n: Mode) -> Option<&QuotientAlgebra> {
        self.pieces.get(&n)
    }

    /// `u_p (x + O_{g,n,m}) = u *^{n'}_{g,m,n} x + O_{g,n',m}` with
    /// `n' = n + wt u - p - 1`; `None` when `n' < 0` (the action is zero).
    pub fn act(
        &self,
        voa: &VoaBackend,
        u: &Element,
        p: Mode,
        n: Mode,
        x: &Element,
    ) -> Result<Option<(Mode, TableEntry)>> {
        let t = voa.order();
        let wt = voa
            .homogeneous_weight(u)
            .ok_or_else(|| Error::InvalidParameter("u_p needs a weight-homogeneous u".into()))?;
        if self.piece(n).is_none() {
            return Err(Error::MissingQuotient(format!("source degree {n}")));
        }
        let target = n + (wt - 1) - p;
        if target.is_negative() {
            return Ok(None);
        }
        let q = self
            .piece(target)
            .ok_or_else(|| Error::MissingQuotient(format!("target degree {target}")))?;
        let y = star_product(voa, u, x, &ZhuParams::new(target, self.m, n, t)?)?;
        Ok(Some((target, q.class(voa, &y)?)))
    }
}
