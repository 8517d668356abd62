//! Text literals for polynomials, rationals, Laurent series and quotient
//! streams.
//!
//! ```text
//! poly      := term (('+'|'-') term)*
//! term      := coeff ['*' mono] | mono
//! mono      := 'T' ['^' int]
//! coeff     := uint | '[' uint (',' uint)* ']'
//! laurent   := poly-like terms with signed exponents, then
//!              '@floor=' int            (exact)
//!            | '+O(T^' int ')'          (known down to int + 1)
//! rational  := poly | '(' poly ')' '/' '(' poly ')'
//! cfstream  := poly (',' poly)* [',...']
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::laurent::Laurent;
use crate::poly::{Poly, RationalFn};
use crate::value::Value;

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str, base: usize) -> Self {
        Cursor {
            s: s.as_bytes(),
            pos: 0,
            base,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.base + self.pos, msg)
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse(self.base + start, "integer out of range"))
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let v = self.uint()? as i64;
        Ok(if neg { -v } else { v })
    }

    fn coeff(&mut self, field: &Field) -> Result<Elem> {
        if self.eat(b'[') {
            let mut cs = vec![self.uint()?];
            while self.eat(b',') {
                cs.push(self.uint()?);
            }
            self.expect(b']')?;
            let cs: Vec<u32> = cs.into_iter().map(|c| c as u32).collect();
            field.from_coeffs(&cs).map_err(|e| self.err(e.to_string()))
        } else {
            let n = self.uint()?;
            Ok(field.from_int((n % field.characteristic() as u64) as i64))
        }
    }

    fn mono(&mut self) -> Result<i64> {
        self.expect(b'T')?;
        if self.eat(b'^') {
            self.int()
        } else {
            Ok(1)
        }
    }
}

enum Tail {
    None,
    Floor(i64),
    BigO(i64),
}

/// Parse a signed sum of terms; stops at the end of input or before a
/// `@floor=` / `O(...)` tail.
fn terms(c: &mut Cursor, field: &Field, allow_tail: bool) -> Result<(Vec<(i64, Elem)>, Tail)> {
    let mut out = Vec::new();
    let mut first = true;
    loop {
        let neg = if first {
            c.eat(b'-')
        } else if c.eat(b'+') {
            false
        } else if c.eat(b'-') {
            true
        } else if c.at_end() || (allow_tail && c.peek() == Some(b'@')) {
            break;
        } else {
            return Err(c.err("expected '+' or '-'"));
        };
        first = false;
        if allow_tail && c.peek() == Some(b'O') {
            if neg {
                return Err(c.err("big-O term cannot be negated"));
            }
            c.pos += 1;
            c.expect(b'(')?;
            let k = c.mono()?;
            c.expect(b')')?;
            if !c.at_end() {
                return Err(c.err("trailing input after O(...)"));
            }
            return Ok((out, Tail::BigO(k)));
        }
        let (coef, k) = match c.peek() {
            Some(b'T') => (Elem::ONE, c.mono()?),
            Some(b'0'..=b'9') | Some(b'[') => {
                let e = c.coeff(field)?;
                if c.eat(b'*') || c.peek() == Some(b'T') {
                    (e, c.mono()?)
                } else {
                    (e, 0)
                }
            }
            _ => return Err(c.err("expected a term")),
        };
        out.push((k, if neg { field.neg(coef) } else { coef }));
    }
    if allow_tail && c.eat(b'@') {
        for &b in b"floor=" {
            c.expect(b)?;
        }
        let fl = c.int()?;
        if !c.at_end() {
            return Err(c.err("trailing input"));
        }
        return Ok((out, Tail::Floor(fl)));
    }
    if out.is_empty() {
        return Err(c.err("empty expression"));
    }
    Ok((out, Tail::None))
}

pub fn parse_poly(field: &Arc<Field>, s: &str) -> Result<Poly> {
    parse_poly_at(field, s, 0)
}

fn parse_poly_at(field: &Arc<Field>, s: &str, base: usize) -> Result<Poly> {
    let mut c = Cursor::new(s, base);
    let (ts, _) = terms(&mut c, field, false)?;
    let top = ts.iter().map(|t| t.0).max().unwrap_or(0);
    if let Some(&(k, _)) = ts.iter().find(|t| t.0 < 0) {
        return Err(Error::parse(base, format!("negative exponent {k} in a polynomial")));
    }
    let mut cs = vec![Elem::ZERO; top as usize + 1];
    for (k, e) in ts {
        cs[k as usize] = field.add(cs[k as usize], e);
    }
    Ok(Poly::new(field, cs))
}

/// Index of the top-level `/`, ignoring brackets and parentheses.
fn top_level(s: &str, target: u8) -> Vec<usize> {
    let mut depth = 0i32;
    let mut out = Vec::new();
    for (i, b) in s.bytes().enumerate() {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            _ if b == target && depth == 0 => out.push(i),
            _ => {}
        }
    }
    out
}

fn strip_parens(s: &str, base: usize) -> (&str, usize) {
    let t = s.trim();
    let lead = s.len() - s.trim_start().len();
    if t.starts_with('(') && t.ends_with(')') && top_level(&t[1..t.len() - 1], b')').is_empty() {
        (&t[1..t.len() - 1], base + lead + 1)
    } else {
        (t, base + lead)
    }
}

pub fn parse_rational(field: &Arc<Field>, s: &str) -> Result<RationalFn> {
    let slashes = top_level(s, b'/');
    match slashes.as_slice() {
        [] => {
            let (body, b) = strip_parens(s, 0);
            Ok(RationalFn::from_poly(parse_poly_at(field, body, b)?))
        }
        [i] => {
            let (n, bn) = strip_parens(&s[..*i], 0);
            let (d, bd) = strip_parens(&s[i + 1..], i + 1);
            let num = parse_poly_at(field, n, bn)?;
            let den = parse_poly_at(field, d, bd)?;
            RationalFn::new(num, den).map_err(|_| Error::parse(i + 1, "zero denominator"))
        }
        [_, j, ..] => Err(Error::parse(*j, "more than one '/'")),
    }
}

pub fn parse_laurent(field: &Arc<Field>, s: &str) -> Result<Laurent> {
    let mut c = Cursor::new(s, 0);
    let (ts, tail) = terms(&mut c, field, true)?;
    let ts: Vec<(i64, Elem)> = ts.into_iter().filter(|t| !t.1.is_zero()).collect();
    let lowest = ts.iter().map(|t| t.0).min().unwrap_or(0);
    match tail {
        Tail::None => Ok(Laurent::from_terms(field, &ts, lowest.min(0), true)),
        Tail::Floor(fl) => {
            if !ts.is_empty() && lowest < fl {
                return Err(Error::parse(s.len(), format!("term T^{lowest} lies below floor {fl}")));
            }
            Ok(Laurent::from_terms(field, &ts, fl, true))
        }
        Tail::BigO(k) => {
            if lowest <= k && !ts.is_empty() {
                return Err(Error::parse(s.len(), format!("term T^{lowest} is inside O(T^{k})")));
            }
            Ok(Laurent::from_terms(field, &ts, k + 1, false))
        }
    }
}

/// A list of partial quotients; a trailing `...` repeats the listed block.
#[derive(Clone, Debug, PartialEq)]
pub struct CfLiteral {
    pub terms: Vec<Poly>,
    pub periodic: bool,
}

pub fn parse_cfstream(field: &Arc<Field>, s: &str) -> Result<CfLiteral> {
    let (s, base) = match s.strip_prefix("cf:") {
        Some(rest) => (rest, 3),
        None => (s, 0),
    };
    let mut parts: Vec<(usize, &str)> = Vec::new();
    let mut start = 0;
    for i in top_level(s, b',') {
        parts.push((start, &s[start..i]));
        start = i + 1;
    }
    parts.push((start, &s[start..]));
    let periodic = parts.last().is_some_and(|p| p.1.trim() == "...");
    if periodic {
        parts.pop();
    }
    if parts.is_empty() {
        return Err(Error::parse(base, "empty quotient list"));
    }
    let terms = parts
        .into_iter()
        .map(|(off, p)| parse_poly_at(field, p.trim(), base + off))
        .collect::<Result<Vec<_>>>()?;
    Ok(CfLiteral { terms, periodic })
}

/// A value literal: `cf:...`, a Laurent literal (anything with a negative
/// exponent or a precision tail), or a rational.
pub fn parse_value(field: &Arc<Field>, s: &str, floor: i64) -> Result<Value> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("cf:") {
        let lit = parse_cfstream(field, rest)?;
        return crate::contfrac::literal_value(&lit, floor);
    }
    if t.contains('@') || t.contains("O(") || t.contains("^-") {
        return Ok(Value::from_laurent(parse_laurent(field, t)?));
    }
    Ok(Value::Rational(parse_rational(field, t)?))
}

/// Comma-separated polynomial vector, e.g. a hyperplane `a1,a2,...`.
pub fn parse_poly_vec(field: &Arc<Field>, s: &str) -> Result<Vec<Poly>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in top_level(s, b',') {
        out.push(parse_poly_at(field, s[start..i].trim(), start)?);
        start = i + 1;
    }
    out.push(parse_poly_at(field, s[start..].trim(), start)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn literal_examples() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(parse_poly(&f3, "T^2+2*T+1").unwrap(), Poly::from_ints(&f3, &[1, 2, 1]));
        let l = parse_laurent(&f3, "T+T^-1@floor=-8").unwrap();
        assert!(l.is_exact());
        assert_eq!(l.floor(), -8);
        assert_eq!(l.top_known(), Some(1));
        assert!(matches!(parse_poly(&f3, "T^+"), Err(Error::Parse { .. })));
        assert!(matches!(parse_rational(&f3, "garbage"), Err(Error::Parse { .. })));
    }

    #[test]
    fn forms() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(parse_poly(&f3, "T - 1").unwrap(), Poly::from_ints(&f3, &[2, 1]));
        assert_eq!(parse_rational(&f3, "(T^2+1)/T").unwrap().to_string(), "(T^2+1)/T");
        let l = parse_laurent(&f3, "T^-1+2*T^-3+O(T^-9)").unwrap();
        assert!(!l.is_exact());
        assert_eq!(l.floor(), -8);
        let cf = parse_cfstream(&f3, "T,T,T,...").unwrap();
        assert!(cf.periodic);
        assert_eq!(cf.terms.len(), 3);
        let f4 = Field::new(2, 2, None).unwrap();
        let p = parse_poly(&f4, "[0,1]*T^2+[1,0]").unwrap();
        assert_eq!(p.to_string(), "[0,1]*T^2+[1,0]");
    }

    fn arb_laurent() -> impl Strategy<Value = (u64, Laurent)> {
        (
            prop_oneof![Just(2u64), Just(3), Just(5)],
            -10i64..4,
            proptest::collection::vec(0u32..5, 0..10),
            any::<bool>(),
        )
            .prop_map(|(p, floor, cs, exact)| {
                let f = Field::prime(p).unwrap();
                let cs = cs.into_iter().map(|c| Elem(c % p as u32)).collect();
                (p, Laurent::new(&f, floor, cs, exact))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn laurent_round_trip((p, l) in arb_laurent()) {
            let f = Field::prime(p).unwrap();
            let s = l.to_string();
            let back = parse_laurent(&f, &s).unwrap();
            prop_assert_eq!(back.to_string(), s);
            if !l.is_exact() {
                prop_assert_eq!(back, l);
            } else {
                prop_assert_eq!(back.terms(), l.terms());
            }
        }

        #[test]
        fn rational_round_trip(n in proptest::collection::vec(0i64..3, 0..6), mut d in proptest::collection::vec(0i64..3, 0..5)) {
            let f = Field::prime(3).unwrap();
            d.push(1);
            let den = Poly::from_ints(&f, &d);
            let r = RationalFn::new(Poly::from_ints(&f, &n), den).unwrap();
            let s = r.to_string();
            let back = parse_rational(&f, &s).unwrap();
            prop_assert_eq!(back.to_string(), s);
            prop_assert_eq!(back, r);
        }

        #[test]
        fn extension_poly_round_trip(cs in proptest::collection::vec(0u32..9, 0..6)) {
            let f = Field::new(3, 2, None).unwrap();
            let p = Poly::new(&f, cs.into_iter().map(Elem).collect());
            let s = p.to_string();
            prop_assert_eq!(parse_poly(&f, &s).unwrap(), p);
        }
    }
}
