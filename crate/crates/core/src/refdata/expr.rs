//! A tiny arithmetic expression evaluator for exact reference values.
//!
//! Grammar (ASCII or the usual Unicode glyphs):
//!
//! ```text
//! expr   := term (('+' | '-' | '−') term)*
//! term   := unary (('*' | '×' | '/' | '÷') unary | <implicit product>)*
//! unary  := ('-' | '−' | '+') unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'pi' | 'π' | func '(' expr ')' | '√' atom | '(' expr ')'
//! func   := sqrt | sin | cos | tan | asin | acos | atan | asec | acsc | acot
//!           (also written sin⁻¹, cos⁻¹, ..., csc⁻¹)
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::Expression(format!("bad number '{text}' in '{src}'")))?;
                out.push(Tok::Num(v));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let mut name: String = chars[start..i].iter().collect::<String>().to_ascii_lowercase();
                // sin⁻¹ style inverse
                if i + 1 < chars.len() && chars[i] == '⁻' && chars[i + 1] == '¹' {
                    name = format!("a{name}");
                    i += 2;
                }
                out.push(Tok::Ident(name));
            }
            'π' => {
                out.push(Tok::Ident("pi".into()));
                i += 1;
            }
            '√' => {
                out.push(Tok::Ident("√".into()));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            '−' => {
                out.push(Tok::Op('-'));
                i += 1;
            }
            '×' | '·' => {
                out.push(Tok::Op('*'));
                i += 1;
            }
            '÷' => {
                out.push(Tok::Op('/'));
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            _ => return Err(Error::Expression(format!("unexpected character '{c}' in '{src}'"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err(&self, msg: &str) -> Error {
        Error::Expression(format!("{msg} at token {} in '{}'", self.pos, self.src))
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            v = if op == '+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::LParen))
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    v *= self.unary()?;
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    v /= self.unary()?;
                }
                _ if self.starts_atom() => v *= self.power()?,
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<f64> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(base.powf(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end"))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(v),
            Tok::LParen => {
                let v = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    _ => Err(self.err("missing ')'")),
                }
            }
            Tok::Ident(name) if name == "pi" => Ok(PI),
            Tok::Ident(name) if name == "√" => Ok(self.atom()?.sqrt()),
            Tok::Ident(name) => {
                let f: fn(f64) -> f64 = match name.as_str() {
                    "sqrt" => f64::sqrt,
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "asin" => f64::asin,
                    "acos" => f64::acos,
                    "atan" => f64::atan,
                    "asec" => |x| (1.0 / x).acos(),
                    "acsc" => |x| (1.0 / x).asin(),
                    "acot" => |x| (1.0 / x).atan(),
                    _ => return Err(self.err(&format!("unknown name '{name}'"))),
                };
                if self.peek() != Some(&Tok::LParen) {
                    return Err(self.err(&format!("'{name}' needs a parenthesised argument")));
                }
                Ok(f(self.atom()?))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

/// Evaluates an expression string.
pub fn eval(src: &str) -> Result<f64> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Expression("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, src };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14 * b.abs().max(1.0)
    }

    #[test]
    fn arithmetic() {
        assert_eq!(eval("1+2*3").unwrap(), 7.0);
        assert_eq!(eval("-2^2").unwrap(), -4.0);
        assert_eq!(eval("2^3^2").unwrap(), 512.0);
        assert_eq!(eval("(1+2)/4").unwrap(), 0.75);
        assert_eq!(eval("1.5e-3").unwrap(), 0.0015);
        assert_eq!(eval("2*-3").unwrap(), -6.0);
    }

    #[test]
    fn constants_and_functions() {
        assert!(close(eval("2*sqrt(2)/3").unwrap(), 2.0 * 2f64.sqrt() / 3.0));
        assert!(close(eval("pi/4").unwrap(), PI / 4.0));
        assert!(close(eval("acsc(sqrt(6))").unwrap(), (1.0 / 6f64.sqrt()).asin()));
        assert!(close(eval("asec(2)").unwrap(), PI / 3.0));
        assert!(close(eval("acot(1)").unwrap(), PI / 4.0));
    }

    #[test]
    fn unicode_forms() {
        assert!(close(eval("2√2 ÷ 3").unwrap(), 2.0 * 2f64.sqrt() / 3.0));
        assert!(close(eval("π×2").unwrap(), 2.0 * PI));
        assert!(close(eval("sin⁻¹(1/√6)").unwrap(), (1.0 / 6f64.sqrt()).asin()));
        assert!(close(
            eval("−49/192 + √14/3").unwrap(),
            -49.0 / 192.0 + 14f64.sqrt() / 3.0
        ));
        assert!(close(
            eval("3(4+5cos⁻¹(3/5))").unwrap(),
            3.0 * (4.0 + 5.0 * 0.6f64.acos())
        ));
    }

    #[test]
    fn errors() {
        for bad in ["", "1+", "(1", "foo(2)", "sqrt 2", "1 $ 2", "1)"] {
            assert!(eval(bad).is_err(), "{bad}");
        }
    }
}
