//! Exact rational scalars, fractional mode indices and the small
//! combinatorial helpers (generalized binomials, floor/bar splits and the
//! sector indicator) that every product formula is built from.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
pub use crate::rational::Rational;

/// The coefficient field. Always reduced, denominator positive.
pub type Scalar = Rational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

pub fn frac(num: i64, den: i64) -> Scalar {
    Scalar::new(num, den)
}

/// Parses `p`, `-p` or `p/q` exactly.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let text = text.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("invalid rational `{text}`"),
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::from_big(BigRational::new(num, den)))
}

/// Canonical `p/q` text, `q` omitted when it is 1.
pub fn format_scalar(x: &Scalar) -> String {
    x.to_string()
}

/// Falling-factorial binomial `q(q-1)...(q-i+1)/i!` for any rational `q`.
pub fn binomial(q: &Scalar, i: u32) -> Scalar {
    let mut acc = Scalar::one();
    let mut top = q.clone();
    for k in 1..=i {
        acc = acc * &top / int(k as i64);
        if acc.is_zero() {
            break;
        }
        top -= Scalar::one();
    }
    acc
}

/// Binomial with a mode as upper argument; the common case in mode formulas.
pub fn binomial_mode(q: Mode, i: u32) -> Scalar {
    // small integer arguments dominate; keep them off the bignum path
    let r = q.0;
    if r.is_integer() {
        let n = *r.numer();
        if n >= 0 && (n as u64) < i as u64 {
            return Scalar::zero();
        }
        if i <= 20 && n.abs() <= 40 {
            let mut acc: i128 = 1;
            for k in 0..i as i128 {
                acc = acc * (n as i128 - k) / (k + 1);
            }
            return match i64::try_from(acc) {
                Ok(v) => Scalar::from_int(v),
                Err(_) => Scalar::from_big(BigRational::from_integer(BigInt::from(acc))),
            };
        }
    }
    binomial(&q.to_scalar(), i)
}

/// An index in `(1/T)Z`, stored exactly.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode(pub Rational64);

impl Mode {
    pub const ZERO: Mode = Mode(Rational64::new_raw(0, 1));

    pub fn new(num: i64, den: i64) -> Mode {
        Mode(Rational64::new(num, den))
    }

    pub fn int(n: i64) -> Mode {
        Mode(Rational64::from_integer(n))
    }

    /// The unique element `r/T + k`; used to build coset representatives.
    pub fn in_coset(r: u32, order: u32, k: i64) -> Mode {
        Mode::new(r as i64 + k * order as i64, order as i64)
    }

    pub fn from_scalar(x: &Scalar) -> Result<Mode> {
        let num = x.numer().to_i64();
        let den = x.denom().to_i64();
        match (num, den) {
            (Some(n), Some(d)) => Ok(Mode::new(n, d)),
            _ => Err(Error::InvalidParameter(format!("mode {x} out of range"))),
        }
    }

    pub fn to_scalar(self) -> Scalar {
        Scalar::new(*self.0.numer(), *self.0.denom())
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(self) -> bool {
        self.0.is_negative()
    }

    /// Whether `self * order` is an integer.
    pub fn has_order(self, order: u32) -> bool {
        order as i64 % *self.0.denom() == 0
    }

    /// Numerator of `self` written over `order`; caller guarantees `has_order`.
    pub fn ticks(self, order: u32) -> i64 {
        self.0.numer() * (order as i64 / self.0.denom())
    }

    /// Whether `self` lies in `r/T + Z`.
    pub fn in_sector(self, r: u32, order: u32) -> bool {
        self.has_order(order) && (self.ticks(order) - r as i64).rem_euclid(order as i64) == 0
    }

    pub fn floor(self) -> i64 {
        self.0.numer().div_floor(self.0.denom())
    }

    /// `(n - floor n) T`, in `[0, T-1]`.
    pub fn bar(self, order: u32) -> u32 {
        self.ticks(order).rem_euclid(order as i64) as u32
    }

    /// Integer value, if the mode is integral.
    pub fn to_int(self) -> Option<i64> {
        self.0.is_integer().then(|| *self.0.numer())
    }
}

impl std::ops::Add for Mode {
    type Output = Mode;
    fn add(self, rhs: Mode) -> Mode {
        Mode(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Mode {
    type Output = Mode;
    fn sub(self, rhs: Mode) -> Mode {
        Mode(self.0 - rhs.0)
    }
}

impl std::ops::Neg for Mode {
    type Output = Mode;
    fn neg(self) -> Mode {
        Mode(-self.0)
    }
}

impl std::ops::Add<i64> for Mode {
    type Output = Mode;
    fn add(self, rhs: i64) -> Mode {
        Mode(self.0 + rhs)
    }
}

impl std::ops::Sub<i64> for Mode {
    type Output = Mode;
    fn sub(self, rhs: i64) -> Mode {
        Mode(self.0 - rhs)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        Mode::from_scalar(&parse_scalar(s)?)
    }
}

pub fn floor_part(n: Mode) -> i64 {
    n.floor()
}

pub fn bar_part(n: Mode, order: u32) -> u32 {
    n.bar(order)
}

/// `1` iff `r <= i <= T-1`; always `0` when `r = T`.
pub fn delta_indicator(i: i64, r: i64, order: u32) -> Result<u32> {
    let t = order as i64;
    if !(0..t).contains(&i) || !(0..=t).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "delta indicator needs 0 <= i < {t} and 0 <= r <= {t}, got i={i}, r={r}"
        )));
    }
    Ok(u32::from(r < t && r <= i))
}

/// Enumerates `{0, 1/T, ..., bound}`.
pub fn modes_up_to(bound: Mode, order: u32) -> Vec<Mode> {
    let top = (bound.0 * order as i64).floor().to_integer();
    (0..=top).map(|k| Mode::new(k, order as i64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(&frac(7, 3), 0), int(1));
        assert_eq!(binomial(&int(5), 2), int(10));
        // (1/2)(-1/2)/2
        assert_eq!(binomial(&frac(1, 2), 2), frac(-1, 8));
        assert_eq!(binomial(&int(-1), 3), int(-1));
        assert_eq!(binomial(&int(3), 5), int(0));
    }

    #[test]
    fn binomial_mode_agrees_with_generic() {
        for n in -12..12 {
            for i in 0..10 {
                assert_eq!(
                    binomial_mode(Mode::int(n), i),
                    binomial(&int(n), i),
                    "{n} {i}"
                );
                let m = Mode::new(2 * n + 1, 2);
                assert_eq!(binomial_mode(m, i), binomial(&m.to_scalar(), i));
            }
        }
    }

    #[test]
    fn floor_and_bar() {
        assert_eq!(floor_part(Mode::new(3, 2)), 1);
        assert_eq!(floor_part(Mode::int(2)), 2);
        assert_eq!(floor_part(Mode::ZERO), 0);
        assert_eq!(floor_part(Mode::new(-1, 2)), -1);
        assert_eq!(bar_part(Mode::new(5, 2), 2), 1);
        assert_eq!(bar_part(Mode::int(2), 2), 0);
        assert_eq!(bar_part(Mode::new(4, 3), 3), 1);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_indicator(1, 1, 2).unwrap(), 1);
        assert_eq!(delta_indicator(0, 1, 2).unwrap(), 0);
        assert_eq!(delta_indicator(0, 2, 2).unwrap(), 0);
        assert_eq!(delta_indicator(0, 0, 1).unwrap(), 1);
        assert!(delta_indicator(2, 0, 2).is_err());
        assert!(delta_indicator(0, 3, 2).is_err());
    }

    #[test]
    fn scalar_text() {
        assert_eq!(format_scalar(&frac(2, 4)), "1/2");
        assert_eq!(format_scalar(&int(-3)), "-3");
        assert_eq!(parse_scalar(" -6/4 ").unwrap(), frac(-3, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
    }

    #[test]
    fn sector_membership() {
        assert!(Mode::new(1, 2).in_sector(1, 2));
        assert!(Mode::new(-3, 2).in_sector(1, 2));
        assert!(!Mode::ZERO.in_sector(1, 2));
        assert!(Mode::int(4).in_sector(0, 1));
        assert!(!Mode::new(1, 3).in_sector(0, 2));
    }

    fn rational() -> impl Strategy<Value = Scalar> {
        (-60i64..60, 1i64..12).prop_map(|(n, d)| frac(n, d))
    }

    proptest! {
        #[test]
        fn pascal(q in rational(), i in 1u32..=12) {
            let one = int(1);
            prop_assert_eq!(
                binomial(&q, i),
                binomial(&(&q - &one), i) + binomial(&(&q - &one), i - 1)
            );
        }

        #[test]
        fn binomial_vanishes_below(n in 0i64..20, extra in 1u32..6) {
            prop_assert!(binomial(&int(n), n as u32 + extra).is_zero());
        }

        #[test]
        fn bar_floor_split(k in 0i64..200, t in 1u32..6) {
            let n = Mode::new(k, t as i64);
            prop_assert_eq!(
                int(bar_part(n, t) as i64) + int(t as i64) * int(floor_part(n)),
                int(t as i64) * n.to_scalar()
            );
            prop_assert!(bar_part(n, t) < t);
        }

        #[test]
        fn scalar_text_round_trip(q in rational()) {
            prop_assert_eq!(parse_scalar(&format_scalar(&q)).unwrap(), q);
        }
    }
}
