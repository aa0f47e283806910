//! Text syntax for field elements, polynomials and rational functions.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (['*' | '/'] factor)*      juxtaposition multiplies
//! factor := atom ['^' uint]
//! atom   := uint | '[' uint (',' uint)* ']' | 't' | '(' expr ')'
//! ```
//!
//! Integers are read modulo p; `[c0,c1,..]` is a coordinate vector in the basis of
//! the field's modulus. The printers emit a subset of this grammar, so printing and
//! re-parsing is the identity.

use super::fq::{Fq, FqElem};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

pub fn format_elem(field: &Fq, c: FqElem) -> String {
    if field.is_prime_field() {
        c.index().to_string()
    } else {
        let coords: Vec<String> = field.coords(c).iter().map(|d| d.to_string()).collect();
        format!("[{}]", coords.join(","))
    }
}

/// Terms in decreasing degree, e.g. `2*t^3+t+1`.
pub fn format_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let field = p.field();
    let mut terms = Vec::new();
    for (k, &c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{k}"),
        };
        let term = if k == 0 {
            format_elem(field, c)
        } else if c == field.one() {
            mono
        } else {
            format!("{}*{}", format_elem(field, c), mono)
        };
        terms.push(term);
    }
    terms.join("+")
}

fn needs_parens(s: &str) -> bool {
    s.contains('+')
}

pub fn format_ratfunc(x: &RatFunc) -> String {
    let num = format_poly(x.num());
    if x.den().is_one() {
        return num;
    }
    let den = format_poly(x.den());
    let wrap = |s: String| if needs_parens(&s) || s.contains('*') { format!("({s})") } else { s };
    format!("{}/{}", wrap(num), wrap(den))
}

struct Parser<'a> {
    field: &'a Fq,
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, String::from_utf8_lossy(self.src))))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        s.parse::<u64>().or_else(|_| self.err("integer too large"))
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let negate = self.eat(b'-');
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat(b'+') {
                acc = acc.try_add(&self.term()?)?;
            } else if self.eat(b'-') {
                acc = acc.try_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.try_mul(&self.factor()?)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.factor()?;
                    if d.is_zero() {
                        return self.err("division by zero");
                    }
                    acc = acc.try_div(&d)?;
                }
                Some(c) if c == b't' || c == b'(' || c == b'[' || c.is_ascii_digit() => {
                    acc = acc.try_mul(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.uint()?;
            if k > 1 << 20 {
                return self.err("exponent too large");
            }
            return base.pow(k as i64);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some(b't') => {
                self.pos += 1;
                Ok(RatFunc::t(self.field))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(b'[') => {
                self.pos += 1;
                let mut coords = vec![];
                loop {
                    let c = self.uint()?;
                    if c >= self.field.p() as u64 {
                        return self.err("coordinate not reduced mod p");
                    }
                    coords.push(c as u32);
                    if self.eat(b']') {
                        break;
                    }
                    if !self.eat(b',') {
                        return self.err("expected ',' or ']'");
                    }
                }
                let c = self.field.from_coords(&coords)?;
                Ok(RatFunc::constant(self.field, c))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                let c = self.field.from_int((n % self.field.p() as u64) as i64);
                Ok(RatFunc::constant(self.field, c))
            }
            _ => self.err("expected t, an integer, '[' or '('"),
        }
    }
}

pub fn parse_ratfunc(field: &Fq, s: &str) -> Result<RatFunc> {
    let mut p = Parser { field, src: s.as_bytes(), pos: 0 };
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

pub fn parse_poly(field: &Fq, s: &str) -> Result<Poly> {
    let x = parse_ratfunc(field, s)?;
    match x.as_poly() {
        Some(p) => Ok(p.clone()),
        None => Err(Error::Parse(format!("{s:?} is not a polynomial"))),
    }
}

pub fn parse_elem(field: &Fq, s: &str) -> Result<FqElem> {
    let x = parse_ratfunc(field, s)?;
    x.as_constant().ok_or_else(|| Error::Parse(format!("{s:?} is not a constant")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FqConfig;

    #[test]
    fn parses_common_forms() {
        let f3 = Fq::prime(3).unwrap();
        let x = parse_ratfunc(&f3, "(t^2+1)/t").unwrap();
        assert_eq!(x.num(), &Poly::from_ints(&f3, &[1, 0, 1]));
        assert_eq!(x.den(), &Poly::t(&f3));
        assert_eq!(parse_poly(&f3, "2*t^3 + t - 1").unwrap(), Poly::from_ints(&f3, &[2, 1, 0, 2]));
        assert_eq!(parse_poly(&f3, "2t").unwrap(), Poly::from_ints(&f3, &[0, 2]));
        assert_eq!(parse_ratfunc(&f3, "1/t").unwrap().to_string(), "1/t");
        assert!(matches!(parse_ratfunc(&f3, "1/0"), Err(Error::Parse(_))));
        assert!(matches!(parse_ratfunc(&f3, "t+"), Err(Error::Parse(_))));
        assert!(matches!(parse_poly(&f3, "1/t"), Err(Error::Parse(_))));
    }

    #[test]
    fn prints_canonically() {
        let f3 = Fq::prime(3).unwrap();
        assert_eq!(Poly::from_ints(&f3, &[2, 0, 1]).to_string(), "t^2+2");
        assert_eq!(Poly::zero(&f3).to_string(), "0");
        let x = parse_ratfunc(&f3, "2*t/(t+1)").unwrap();
        assert_eq!(x.to_string(), "(2*t)/(t+1)");
        assert_eq!(parse_ratfunc(&f3, &x.to_string()).unwrap(), x);
    }

    #[test]
    fn extension_field_coordinates() {
        let f9 = Fq::new(FqConfig { p: 3, e: 2, modulus: Some(vec![1, 0, 1]) }).unwrap();
        let x = parse_ratfunc(&f9, "[0,1]*t^2 + [2,1]").unwrap();
        let s = x.to_string();
        assert_eq!(s, "[0,1]*t^2+[2,1]");
        assert_eq!(parse_ratfunc(&f9, &s).unwrap(), x);
        assert_eq!(parse_elem(&f9, "[0,1]*[0,1]").unwrap(), f9.from_int(2));
    }
}
