use rug::Integer;

use super::Monomial;
use crate::error::{Error, Result};

fn syntax(column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: 1,
        column: column + 1,
        message: message.into(),
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
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

    fn number(&mut self) -> Option<Integer> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            std::str::from_utf8(&self.s[start..self.pos])
                .expect("ascii")
                .parse()
                .expect("digits")
        })
    }

    fn ident(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
            while self.pos < self.s.len()
                && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
            {
                self.pos += 1;
            }
            Some(std::str::from_utf8(&self.s[start..self.pos]).expect("ascii"))
        } else {
            None
        }
    }
}

fn index_of(unknowns: &[String], params: &[String], name: &str) -> Option<usize> {
    unknowns.iter().chain(params).position(|v| v == name)
}

fn monomial(c: &mut Cursor<'_>, unknowns: &[String], params: &[String]) -> Result<Monomial> {
    let mut m = Monomial::constant(1, unknowns.len() + params.len());
    loop {
        let at = c.pos;
        if let Some(v) = c.number() {
            if c.eat(b'^') {
                let at = c.pos;
                let name = c
                    .ident()
                    .ok_or_else(|| syntax(at, "expected a variable exponent"))?;
                let i = index_of(unknowns, params, name)
                    .ok_or_else(|| syntax(at, format!("unknown variable `{name}`")))?;
                if v == 0 {
                    return Err(syntax(at, "exponential base must be at least 1"));
                }
                m.factors[i].v *= v;
            } else {
                m.coeff *= v;
            }
        } else if let Some(name) = c.ident() {
            let name = name.to_string();
            let i = index_of(unknowns, params, &name)
                .ok_or_else(|| syntax(at, format!("unknown variable `{name}`")))?;
            let r = if c.eat(b'^') {
                let at = c.pos;
                c.number()
                    .and_then(|r| r.to_u32())
                    .ok_or_else(|| syntax(at, "expected a small power"))?
            } else {
                1
            };
            m.factors[i].r += r;
        } else {
            return Err(syntax(at, "expected a number or variable"));
        }
        if !c.eat(b'*') {
            return Ok(m);
        }
    }
}

pub(super) fn parse_sum(
    unknowns: &[String],
    params: &[String],
    text: &str,
) -> Result<Vec<Monomial>> {
    let mut c = Cursor {
        s: text.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    let mut negative = c.eat(b'-');
    loop {
        let mut m = monomial(&mut c, unknowns, params)?;
        if negative {
            m.coeff = -m.coeff;
        }
        out.push(m);
        if c.eat(b'+') {
            negative = false;
        } else if c.eat(b'-') {
            negative = true;
        } else if c.peek().is_none() {
            return Ok(out);
        } else {
            return Err(syntax(c.pos, "expected `+`, `-` or end of input"));
        }
    }
}

fn render_monomial(names: &[&String], m: &Monomial) -> (bool, String) {
    let negative = m.coeff < 0;
    let mag = Integer::from(m.coeff.abs_ref());
    let mut parts = Vec::new();
    if mag != 1 || m.is_constant() {
        parts.push(mag.to_string());
    }
    for (name, f) in names.iter().zip(&m.factors) {
        if f.v != 1 {
            parts.push(format!("{}^{}", f.v, name));
        }
        match f.r {
            0 => {}
            1 => parts.push(name.to_string()),
            r => parts.push(format!("{name}^{r}")),
        }
    }
    (negative, parts.join("*"))
}

pub(super) fn render_sum(unknowns: &[String], params: &[String], monomials: &[Monomial]) -> String {
    if monomials.is_empty() {
        return "0".into();
    }
    let names: Vec<&String> = unknowns.iter().chain(params).collect();
    let mut out = String::new();
    for (i, m) in monomials.iter().enumerate() {
        let (neg, body) = render_monomial(&names, m);
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{ExpPolynomial, Factor};
    use super::*;

    #[test]
    fn monomial_forms() {
        let u = vec!["a".to_string(), "b".to_string(), "f".to_string()];
        let m = parse_sum(&u, &[], "2*11^f*121^a*b^2").unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].coeff, 2);
        assert_eq!(
            m[0].factors[0],
            Factor {
                v: Integer::from(121),
                r: 0
            }
        );
        assert_eq!(
            m[0].factors[1],
            Factor {
                v: Integer::from(1),
                r: 2
            }
        );
        assert_eq!(
            m[0].factors[2],
            Factor {
                v: Integer::from(11),
                r: 0
            }
        );
        let m = parse_sum(&u, &[], "2^a*3^a*a*a").unwrap();
        assert_eq!(
            m[0].factors[0],
            Factor {
                v: Integer::from(6),
                r: 2
            }
        );
    }

    #[test]
    fn render_round_trip() {
        for text in ["x^2 - 2*x + 1", "-3*2^x*y + 5", "0"] {
            let p = ExpPolynomial::parse(&["x", "y"], &[], text).unwrap();
            let q = ExpPolynomial::parse(&["x", "y"], &[], &p.to_text()).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn syntax_errors() {
        let u = vec!["x".to_string()];
        assert!(parse_sum(&u, &[], "z").is_err());
        assert!(parse_sum(&u, &[], "x +").is_err());
        assert!(parse_sum(&u, &[], "0^x").is_err());
        assert!(parse_sum(&u, &[], "x x").is_err());
    }
}
