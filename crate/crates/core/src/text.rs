//! Text forms of elements, module states and `J`-monomials.
//!
//! ```text
//! element  := term (('+'|'-') term)*
//! term     := [scalar '*'] word
//! word     := mode-op* ket
//! mode-op  := ('a'|'L') '[' rational ']'
//! ket      := '|0>' | '|tw>'
//! monomial := jfactor ('*' jfactor)*
//! jfactor  := 'J[' rational '](' element ')'
//! ```
//!
//! Whitespace is insignificant; a leading sign is accepted. Words are
//! evaluated, so `a[1]a[-1]|0>` parses to `|0>`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::modules::{ModVec, ModuleBackend};
use crate::scalars::{format_scalar, parse_scalar, Mode, Scalar};
use crate::ueva::{j_map, upoly_mul, UMonomial, UPoly};
use crate::voa::{Element, VoaBackend};

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`"))
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// `[-]digits[/digits]`, whitespace allowed around the slash.
    fn rational(&mut self) -> Result<Scalar> {
        self.skip_ws();
        let start = self.pos;
        let mut body = String::new();
        if self.eat("-") {
            body.push('-');
        }
        let digits = |c: &mut Cursor, out: &mut String| {
            c.skip_ws();
            let s = c.pos;
            while let Some(ch) = c.text[c.pos..].chars().next() {
                if !ch.is_ascii_digit() {
                    break;
                }
                out.push(ch);
                c.pos += 1;
            }
            c.pos > s
        };
        if !digits(self, &mut body) {
            self.pos = start;
            return self.error("expected a rational");
        }
        if self.eat("/") {
            body.push('/');
            if !digits(self, &mut body) {
                return self.error("expected a denominator");
            }
        }
        parse_scalar(&body).map_err(|_| Error::Parse {
            pos: start,
            msg: format!("invalid rational `{body}`"),
        })
    }

    fn mode(&mut self) -> Result<Mode> {
        let start = self.pos;
        let x = self.rational()?;
        Mode::from_scalar(&x).map_err(|_| Error::Parse {
            pos: start,
            msg: format!("mode {x} out of range"),
        })
    }
}

fn letter_of(module: &dyn ModuleBackend) -> char {
    module.structure().letter()
}

/// `a[n]` is `alpha_n`; `L[n]` is `omega_{n+1}`.
fn generator_mode(module: &dyn ModuleBackend, index: Mode) -> Mode {
    index + (module.structure().generator_weight() - 1)
}

fn word(c: &mut Cursor, module: &dyn ModuleBackend) -> Result<ModVec> {
    let letter = letter_of(module);
    let mut ops = Vec::new();
    loop {
        match c.peek() {
            Some('|') => break,
            Some(ch) if ch == 'a' || ch == 'L' => {
                if ch != letter {
                    return c.error(format!(
                        "mode `{ch}` is not defined for the {} backend",
                        module.structure().name()
                    ));
                }
                c.pos += 1;
                c.expect("[")?;
                let q = c.mode()?;
                c.expect("]")?;
                ops.push(q);
            }
            _ => return c.error("expected a mode `a[..]`, `L[..]` or a ket"),
        }
    }
    let ket_pos = c.pos;
    let ket = if c.eat("|0>") {
        "|0>"
    } else if c.eat("|tw>") {
        "|tw>"
    } else {
        return c.error("expected `|0>` or `|tw>`");
    };
    if ket != module.ket() {
        return Err(Error::Parse {
            pos: ket_pos,
            msg: format!(
                "ket `{ket}` does not belong to the {} module",
                module.name()
            ),
        });
    }
    let mut v = ModVec::basis(module.top());
    for &q in ops.iter().rev() {
        let mut next = ModVec::zero();
        for (s, coeff) in v.iter() {
            next.add_scaled(
                &module.generator_action(generator_mode(module, q), s),
                coeff,
            );
        }
        v = next;
    }
    Ok(v)
}

fn term(c: &mut Cursor, module: &dyn ModuleBackend) -> Result<ModVec> {
    let coeff = match c.peek() {
        Some(ch) if ch.is_ascii_digit() => {
            let x = c.rational()?;
            c.expect("*")?;
            x
        }
        _ => Scalar::one(),
    };
    Ok(word(c, module)?.scaled(&coeff))
}

fn vector(c: &mut Cursor, module: &dyn ModuleBackend) -> Result<ModVec> {
    let mut sign = Scalar::one();
    if c.eat("-") {
        sign = -sign;
    } else {
        c.eat("+");
    }
    let mut out = term(c, module)?.scaled(&sign);
    loop {
        if c.eat("+") {
            out.add_assign(&term(c, module)?);
        } else if c.eat("-") {
            out = out.sub(&term(c, module)?);
        } else {
            return Ok(out);
        }
    }
}

fn finish<T>(c: &mut Cursor, v: T) -> Result<T> {
    if c.at_end() {
        Ok(v)
    } else {
        c.error("unexpected trailing input")
    }
}

/// An element of `V` (ket `|0>`).
pub fn parse_element(voa: &VoaBackend, text: &str) -> Result<Element> {
    let mut c = Cursor::new(text);
    let v = vector(&mut c, &**voa.adjoint().module())?;
    finish(&mut c, v)
}

/// A vector of `module`, written with the module's own ket.
pub fn parse_state(module: &dyn ModuleBackend, text: &str) -> Result<ModVec> {
    let mut c = Cursor::new(text);
    let v = vector(&mut c, module)?;
    finish(&mut c, v)
}

/// A product of `J` factors, expanded multilinearly over basis keys.
pub fn parse_monomial(voa: &VoaBackend, text: &str) -> Result<UPoly> {
    let module = voa.adjoint().module().clone();
    let mut c = Cursor::new(text);
    let mut out: Option<UPoly> = None;
    loop {
        c.expect("J")?;
        c.expect("[")?;
        let q = c.mode()?;
        c.expect("]")?;
        c.expect("(")?;
        let u = vector(&mut c, &*module)?;
        c.expect(")")?;
        let f = j_map(voa, q, &u);
        out = Some(match out {
            None => f,
            Some(acc) => upoly_mul(voa, &acc, &f),
        });
        if !c.eat("*") {
            break;
        }
    }
    let out = out.expect("at least one factor");
    finish(&mut c, out)
}

fn format_word(module: &dyn ModuleBackend, key: &crate::lincomb::Partition) -> String {
    let t = module.order() as i64;
    let mut s = String::new();
    for &p in key.parts() {
        let index = Mode::new(-(p as i64), t);
        s.push(letter_of(module));
        s.push('[');
        s.push_str(&index.to_string());
        s.push(']');
    }
    s.push_str(module.ket());
    s
}

fn format_vector(module: &dyn ModuleBackend, v: &ModVec) -> String {
    if v.is_zero() {
        return format!("0*{}", module.ket());
    }
    let mut out = String::new();
    for (i, (k, c)) in v.iter().enumerate() {
        let mag = if c.is_negative() {
            -c.clone()
        } else {
            c.clone()
        };
        if i == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&format_scalar(&mag));
            out.push('*');
        }
        out.push_str(&format_word(module, k));
    }
    out
}

/// Canonical text of an element of `V`; [`parse_element`] inverts it.
pub fn format_element(voa: &VoaBackend, x: &Element) -> String {
    format_vector(&**voa.adjoint().module(), x)
}

pub fn format_state(module: &dyn ModuleBackend, w: &ModVec) -> String {
    format_vector(module, w)
}

pub fn format_monomial(voa: &VoaBackend, mono: &UMonomial) -> String {
    mono.factors()
        .iter()
        .map(|(s, k)| {
            format!(
                "J[{s}]({})",
                format_element(voa, &Element::basis(k.clone()))
            )
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

/// Verifies that every basis key of `V` at weight `<= w` has a canonical text
/// that parses back to itself.
pub fn round_trips(voa: &VoaBackend, max_weight: i64) -> Result<bool> {
    for k in voa.basis_up_to(max_weight) {
        let x = Element::basis(k);
        if parse_element(voa, &format_element(voa, &x))? != x {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::FockModule;
    use crate::scalars::{frac, int};
    use crate::voa::BasisKey;

    fn key(parts: &[u32]) -> BasisKey {
        BasisKey::new(parts.to_vec())
    }

    #[test]
    fn alpha_and_omega() {
        let h = VoaBackend::heisenberg();
        assert_eq!(
            parse_element(&h, "a[-1]|0>").unwrap(),
            Element::basis(key(&[1]))
        );
        let x = parse_element(&h, "1/2*a[-1]a[-1]|0> + a[-2]|0>").unwrap();
        let want = Element::from_terms([(key(&[1, 1]), frac(1, 2)), (key(&[2]), int(1))]);
        assert_eq!(x, want);
        assert_eq!(
            h.omega(),
            parse_element(&h, "1/2 * a[-1] a[-1] |0>").unwrap()
        );
    }

    #[test]
    fn words_are_evaluated() {
        let h = VoaBackend::heisenberg();
        assert_eq!(parse_element(&h, "a[1]a[-1]|0>").unwrap(), h.vacuum());
        assert!(parse_element(&h, "a[0]|0>").unwrap().is_zero());
        let v = VoaBackend::virasoro(frac(1, 2));
        assert_eq!(parse_element(&v, "L[-2]|0>").unwrap(), v.omega());
        // L(2) L(-2)|0> = c/2 |0>
        assert_eq!(
            parse_element(&v, "L[2]L[-2]|0>").unwrap(),
            Element::term(BasisKey::empty(), frac(1, 4))
        );
    }

    #[test]
    fn round_trip_on_bases() {
        let h = VoaBackend::heisenberg();
        let v = VoaBackend::virasoro(frac(1, 2));
        assert!(round_trips(&h, 6).unwrap());
        assert!(round_trips(&v, 8).unwrap());
        let x = Element::from_terms([
            (key(&[2, 1]), frac(-3, 2)),
            (key(&[3]), int(-1)),
            (key(&[]), int(4)),
        ]);
        let s = format_element(&h, &x);
        assert_eq!(parse_element(&h, &s).unwrap(), x);
        assert_eq!(format_element(&h, &Element::zero()), "0*|0>");
        assert!(parse_element(&h, "0*|0>").unwrap().is_zero());
    }

    #[test]
    fn twisted_states() {
        let h = VoaBackend::heisenberg();
        let m = FockModule::twisted(h.structure().clone());
        let w = parse_state(&m, "a[-3/2]a[-1/2]|tw>").unwrap();
        assert_eq!(w, ModVec::basis(key(&[3, 1])));
        assert_eq!(format_state(&m, &w), "a[-3/2]a[-1/2]|tw>");
        assert!(parse_state(&m, "a[-1]|tw>").unwrap().is_zero());
        assert!(matches!(
            parse_state(&m, "a[-1/2]|0>"),
            Err(Error::Parse { pos: 7, .. })
        ));
    }

    #[test]
    fn monomials() {
        let h = VoaBackend::heisenberg();
        let p = parse_monomial(&h, "J[1/2](a[-1]|0>) * J[-1/2](a[-1]|0>)").unwrap();
        assert_eq!(p.len(), 1);
        let (mono, c) = p.iter().next().unwrap();
        assert!(c.is_one());
        assert_eq!(
            format_monomial(&h, mono),
            "J[1/2](a[-1]|0>) * J[-1/2](a[-1]|0>)"
        );
        assert!(parse_monomial(&h, "J[0](a[-1]|0>)").unwrap().is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        let h = VoaBackend::heisenberg();
        assert!(matches!(
            parse_element(&h, "a[-1|0>"),
            Err(Error::Parse { pos: 4, .. })
        ));
        assert!(matches!(
            parse_element(&h, "L[-2]|0>"),
            Err(Error::Parse { pos: 0, .. })
        ));
        assert!(matches!(
            parse_element(&h, "a[-1]|0> +"),
            Err(Error::Parse { pos: 10, .. })
        ));
        assert!(matches!(
            parse_element(&h, "2 a[-1]|0>"),
            Err(Error::Parse { pos: 2, .. })
        ));
        assert!(matches!(
            parse_element(&h, "a[-1]|0> x"),
            Err(Error::Parse { pos: 9, .. })
        ));
    }
}
