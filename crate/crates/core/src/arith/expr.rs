//! Tiny parser for element expressions such as `2*x^5 - 3`, `t^(1/2) + t`,
//! `g^3` or `t^(-2/p^1)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Denominator {
    Int(u64),
    PrimePower(u32),
}

impl Denominator {
    pub fn resolve(self, p: u64) -> Result<u64> {
        match self {
            Denominator::Int(d) if d > 0 => Ok(d),
            Denominator::Int(_) => Err(Error::Parse("zero denominator".into())),
            Denominator::PrimePower(j) => crate::arith::modular::checked_pow(p, j)
                .ok_or_else(|| Error::BadParameter("exponent denominator overflows".into())),
        }
    }
}

/// One monomial `coeff * var^(num/den)`; `var` is `None` for constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: i128,
    pub var: Option<char>,
    pub num: i64,
    pub den: Denominator,
}

struct Cursor<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!(
            "{msg} at offset {} in `{}`",
            self.i,
            String::from_utf8_lossy(self.s)
        ))
    }

    fn int(&mut self) -> Result<i128> {
        let start = self.i;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.s[start..self.i])
            .unwrap()
            .parse::<i128>()
            .map_err(|_| self.err("integer out of range"))
    }

    fn signed_int(&mut self) -> Result<i128> {
        let neg = self.eat(b'-');
        let v = self.int()?;
        Ok(if neg { -v } else { v })
    }
}

fn exponent(c: &mut Cursor) -> Result<(i64, Denominator)> {
    if c.eat(b'(') {
        let num = c.signed_int()?;
        let den = if c.eat(b'/') {
            if c.eat(b'p') {
                c.expect(b'^')?;
                Denominator::PrimePower(c.int()? as u32)
            } else {
                Denominator::Int(c.int()? as u64)
            }
        } else {
            Denominator::Int(1)
        };
        c.expect(b')')?;
        Ok((num as i64, den))
    } else {
        Ok((c.signed_int()? as i64, Denominator::Int(1)))
    }
}

/// Parse a sum of monomials in the given variables.
pub fn parse_terms(input: &str, vars: &[char]) -> Result<Vec<Term>> {
    let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    let mut c = Cursor { s: cleaned.as_bytes(), i: 0 };
    let mut terms = Vec::new();
    let mut first = true;
    while c.peek().is_some() {
        let sign: i128 = if c.eat(b'-') {
            -1
        } else if c.eat(b'+') || first {
            1
        } else {
            return Err(c.err("expected `+` or `-`"));
        };
        first = false;
        let mut coeff = 1i128;
        let mut has_coeff = false;
        if matches!(c.peek(), Some(b'0'..=b'9')) {
            coeff = c.int()?;
            has_coeff = true;
            if !c.eat(b'*') {
                terms.push(Term { coeff: sign * coeff, var: None, num: 0, den: Denominator::Int(1) });
                continue;
            }
        }
        let v = c.peek().map(|b| b as char);
        match v {
            Some(ch) if vars.contains(&ch) => {
                c.i += 1;
                let (num, den) = if c.eat(b'^') { exponent(&mut c)? } else { (1, Denominator::Int(1)) };
                terms.push(Term { coeff: sign * coeff, var: Some(ch), num, den });
            }
            _ if has_coeff => return Err(c.err("expected variable after `*`")),
            _ => return Err(c.err("unexpected character")),
        }
    }
    Ok(terms)
}

/// Parse a single exponent written as `t`, `t^e`, `t^(a/b)` or `t^(a/p^j)`.
pub fn parse_monomial_exponent(input: &str, var: char) -> Result<(i64, Denominator)> {
    let terms = parse_terms(input, &[var])?;
    match terms.as_slice() {
        [Term { coeff: 1, var: Some(_), num, den }] => Ok((*num, *den)),
        [Term { coeff: 1, var: None, .. }] => Ok((0, Denominator::Int(1))),
        _ => Err(Error::Parse(format!("`{input}` is not a monomial in {var}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_polynomials() {
        let t = parse_terms("2*x^5 - 3 + x", &['x']).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0], Term { coeff: 2, var: Some('x'), num: 5, den: Denominator::Int(1) });
        assert_eq!(t[1].coeff, -3);
        assert_eq!(t[2].num, 1);
    }

    #[test]
    fn parses_fractional_exponents() {
        let t = parse_terms("t^(1/2)+t^(-2/p^1)", &['t']).unwrap();
        assert_eq!(t[0].den, Denominator::Int(2));
        assert_eq!((t[1].num, t[1].den), (-2, Denominator::PrimePower(1)));
        assert_eq!(parse_monomial_exponent("t^2", 't').unwrap(), (2, Denominator::Int(1)));
        assert_eq!(parse_monomial_exponent("t", 't').unwrap(), (1, Denominator::Int(1)));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_terms("", &['x']).is_err());
        assert!(parse_terms("3*", &['x']).is_err());
        assert!(parse_terms("y", &['x']).is_err());
        assert!(parse_terms("x^(1/2", &['x']).is_err());
    }
}
