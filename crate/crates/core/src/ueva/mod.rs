//! The graded enveloping algebra `U(V[g])`: monomials in the `J_m(u)`,
//! their action on modules, straightening modulo the filtration and the
//! map `phi_{n,m}`.

mod straighten;
mod verify;

use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::modules::{FieldEngine, ModVec};
use crate::scalars::{binomial_mode, Mode, Scalar};
use crate::voa::{BasisKey, Element, VoaBackend};

pub use straighten::{straighten, Straightener};
pub use verify::{
    check_univ_relation, implemented_modules, lemma84_grid, random_monomial, straighten_suite,
    u_equals_mod_filtration, verify_theorem11, Lemma84Gap, Lemma84Report, Status, StraightenReport,
    SubVerdict, Theorem11Config, Theorem11Report, Verdict,
};

/// `J_{m_1}(u_1) ... J_{m_k}(u_k)` with every `u_j` a basis key of `V`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UMonomial {
    factors: Vec<(Mode, BasisKey)>,
}

pub type UPoly = LinComb<UMonomial>;

impl UMonomial {
    /// `J_0(1)`, the identity.
    pub fn identity() -> Self {
        UMonomial {
            factors: vec![(Mode::ZERO, BasisKey::empty())],
        }
    }

    /// Builds a monomial; `None` when a factor vanishes (coset mismatch or
    /// `J_s(1)` with `s != 0`). `J_0(1)` factors are dropped.
    pub fn new(voa: &VoaBackend, factors: Vec<(Mode, BasisKey)>) -> Option<Self> {
        let t = voa.order();
        let mut out = Vec::with_capacity(factors.len());
        for (s, k) in factors {
            if !s.in_sector(voa.sector(&k), t) {
                return None;
            }
            if k.is_empty() {
                if s != Mode::ZERO {
                    return None;
                }
                continue;
            }
            out.push((s, k));
        }
        if out.is_empty() {
            return Some(Self::identity());
        }
        Some(UMonomial { factors: out })
    }

    pub fn factors(&self) -> &[(Mode, BasisKey)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1.is_empty()
    }

    /// `-Σ m_j`.
    pub fn degree(&self) -> Mode {
        self.factors.iter().fold(Mode::ZERO, |acc, (s, _)| acc - *s)
    }

    pub fn last_mode(&self) -> Mode {
        self.factors.last().expect("nonempty").0
    }

    /// `(length, -last mode)`; strictly decreases along straightening.
    pub fn measure(&self) -> (usize, Mode) {
        (self.len(), -self.last_mode())
    }

    /// Formal product `self * other`.
    pub fn concat(&self, voa: &VoaBackend, other: &UMonomial) -> UMonomial {
        let mut f = self.factors.clone();
        f.extend(other.factors.iter().cloned());
        UMonomial::new(voa, f).expect("factors already valid")
    }

    /// Action on a module vector, rightmost factor first.
    pub fn act(&self, voa: &VoaBackend, engine: &FieldEngine, w: &ModVec) -> ModVec {
        let mut out = w.clone();
        for (s, k) in self.factors.iter().rev() {
            if k.is_empty() {
                continue;
            }
            let q = *s + (voa.weight(k) - 1);
            out = engine.act(&Element::basis(k.clone()), q, &out);
            if out.is_zero() {
                break;
            }
        }
        out
    }
}

impl fmt::Debug for UMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, k)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "J[{s}]({k:?})")?;
        }
        Ok(())
    }
}

/// `J_m(u)`: keeps the components of `u` whose sector matches the coset of `m`.
pub fn j_map(voa: &VoaBackend, mode: Mode, u: &Element) -> UPoly {
    let mut out = UPoly::zero();
    for (k, c) in u.iter() {
        if let Some(mono) = UMonomial::new(voa, vec![(mode, k.clone())]) {
            out.add_term(mono, c.clone());
        }
    }
    out
}

/// Formal product of two polynomials.
pub fn upoly_mul(voa: &VoaBackend, x: &UPoly, y: &UPoly) -> UPoly {
    let mut out = UPoly::zero();
    for (a, ca) in x.iter() {
        for (b, cb) in y.iter() {
            out.add_term(a.concat(voa, b), ca * cb);
        }
    }
    out
}

/// Action of a polynomial on a module vector.
pub fn upoly_act(voa: &VoaBackend, engine: &FieldEngine, x: &UPoly, w: &ModVec) -> ModVec {
    let mut out = ModVec::zero();
    for (mono, c) in x.iter() {
        out.add_scaled(&mono.act(voa, engine, w), c);
    }
    out
}

/// The working quotient `U(V[g])_{n-m} / U(V[g])_{n-m}^{-m-1/T}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FiltrationCtx {
    pub n: Mode,
    pub m: Mode,
    order: u32,
}

impl FiltrationCtx {
    pub fn new(n: Mode, m: Mode, order: u32) -> Result<Self> {
        for (x, name) in [(n, "n"), (m, "m")] {
            if x.is_negative() || !x.has_order(order) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {x} is not in (1/{order})N"
                )));
            }
        }
        Ok(FiltrationCtx { n, m, order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `n - m`, the degree of the working piece.
    pub fn degree(&self) -> Mode {
        self.n - self.m
    }

    /// Whether the monomial lies in the filtration ideal.
    pub fn is_dropped(&self, mono: &UMonomial) -> bool {
        mono.last_mode() > self.m
    }

    /// The largest `q` in `s + Z` with `q <= m`.
    pub fn anchor(&self, s: Mode) -> Mode {
        s + (self.m - s).floor()
    }
}

/// `phi_{n,m}(u) = J_{m-n}(u)`.
pub fn phi(voa: &VoaBackend, ctx: &FiltrationCtx, u: &Element) -> UPoly {
    j_map(voa, ctx.m - ctx.n, u)
}

pub(crate) fn binom(q: Mode, k: i64) -> Scalar {
    if k < 0 {
        return num_traits::Zero::zero();
    }
    binomial_mode(q, k as u32)
}

pub(crate) fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}
