use rug::Integer;

use super::{BinOp, Term, UnOp};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Nat(Integer),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Spanned {
                tok: Tok::Nat(digits.parse().expect("ascii digits")),
                line: l0,
                column: c0,
            });
            continue;
        } else if c.is_ascii_lowercase() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_lowercase() || chars[i].is_ascii_digit() || chars[i] == '_')
            {
                i += 1;
            }
            column += i - start;
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
            continue;
        } else {
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '%' => Tok::Percent,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                other => {
                    return Err(Error::Syntax {
                        line: l0,
                        column: c0,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        out.push(Spanned {
            tok,
            line: l0,
            column: c0,
        });
        i += 1;
        column += 1;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let s = &self.toks[self.pos];
        Err(Error::Syntax {
            line: s.line,
            column: s.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn sum(&mut self) -> Result<Term> {
        let mut lhs = self.prod()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Monus,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.prod()?;
            lhs = Term::bin(op, lhs, rhs);
        }
    }

    fn prod(&mut self) -> Result<Term> {
        let mut lhs = self.pow()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::DivFloor,
                Tok::Percent => BinOp::Mod,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.pow()?;
            lhs = Term::bin(op, lhs, rhs);
        }
    }

    fn pow(&mut self) -> Result<Term> {
        // A bare literal `2` as base denotes the primitive 2^x; any other base,
        // including a parenthesised `(2)`, is the general power.
        let bare_two = matches!(self.peek(), Tok::Nat(v) if *v == 2);
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = self.pow()?;
        if bare_two {
            Ok(Term::pow2(exp))
        } else {
            Ok(Term::pow(base, exp))
        }
    }

    fn atom(&mut self) -> Result<Term> {
        match self.bump() {
            Tok::Nat(v) => Ok(Term::Const(v)),
            Tok::LParen => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() != Tok::LParen {
                    return Ok(Term::Var(name));
                }
                let call_at = self.pos;
                self.bump();
                let mut args = vec![self.sum()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.sum()?);
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                call(&name, args).ok_or_else(|| {
                    let s = &self.toks[call_at - 1];
                    Error::Syntax {
                        line: s.line,
                        column: s.column,
                        message: format!("unknown function or wrong arity: `{name}`"),
                    }
                })
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.error("expected a number, identifier or `(`")
            }
        }
    }
}

fn call(name: &str, mut args: Vec<Term>) -> Option<Term> {
    let bin = match name {
        "min" => Some(BinOp::Min),
        "absdiff" => Some(BinOp::AbsDiff),
        "binom" => Some(BinOp::Binom),
        "gcd" => Some(BinOp::Gcd),
        "mod" => Some(BinOp::Mod),
        _ => None,
    };
    if let Some(op) = bin {
        if args.len() != 2 {
            return None;
        }
        let r = args.pop()?;
        let l = args.pop()?;
        return Some(Term::bin(op, l, r));
    }
    let un = match name {
        "fact" => UnOp::Fact,
        "nu2" => UnOp::Nu2,
        "hw" => UnOp::Hw,
        _ => return None,
    };
    if args.len() != 1 {
        return None;
    }
    Some(Term::un(un, args.pop()?))
}

/// Parses the ASCII term grammar. `-` is truncated subtraction and `^` is
/// right-associative.
pub fn parse(text: &str) -> Result<Term> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let t = p.sum()?;
    if *p.peek() != Tok::Eof {
        return p.error("unexpected trailing input");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse("2^n - 1").unwrap(),
            Term::monus(Term::pow2(v("n")), Term::int(1))
        );
        assert_eq!(
            parse("(3*fact(n)) % (n+1)").unwrap(),
            Term::rem(
                Term::mul(Term::int(3), Term::fact(v("n"))),
                Term::add(v("n"), Term::int(1))
            )
        );
        assert_eq!(parse("x ^ y").unwrap(), Term::pow(v("x"), v("y")));
    }

    #[test]
    fn associativity_and_precedence() {
        assert_eq!(
            parse("a - b - c").unwrap(),
            Term::monus(Term::monus(v("a"), v("b")), v("c"))
        );
        assert_eq!(
            parse("a ^ b ^ c").unwrap(),
            Term::pow(v("a"), Term::pow(v("b"), v("c")))
        );
        assert_eq!(
            parse("a + b * c").unwrap(),
            Term::add(v("a"), Term::mul(v("b"), v("c")))
        );
        assert_eq!(parse("mod(a, b)").unwrap(), Term::rem(v("a"), v("b")));
        assert_eq!(parse("(2)^x").unwrap(), Term::pow(Term::int(2), v("x")));
    }

    #[test]
    fn big_literals_are_exact() {
        let t = parse("123456789012345678901234567890").unwrap();
        assert_eq!(
            t,
            Term::Const("123456789012345678901234567890".parse().unwrap())
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse("1 +\n  * 2") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("foo(1)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("min(1)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(1 + 2"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("X"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("1 2"), Err(Error::Syntax { .. })));
    }
}
