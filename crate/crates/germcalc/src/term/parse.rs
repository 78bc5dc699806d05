//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (("+"|"-") term)*
//! term     := factor (("*"|"/") factor)*
//! factor   := atom ("^" rational)?
//! atom     := rational | "pi" | "x" | "exp" "(" expr ")" | "log" "(" expr ")"
//!           | ("exp_"|"log_") nat "(" expr ")" | "sqrt" "(" expr ")"
//!           | "(" expr ")" | "-" atom
//! rational := int | int "/" int
//! ```
//!
//! Whitespace-insensitive.  Sugar is expanded structurally: `log_k`/`exp_k`
//! iterate the unary node, `sqrt(e)` is `e^(1/2)`, `1/e` is `Recip(e)`,
//! subtraction and unary minus desugar to `Add`/`Mul` with `Const(-1)`, and
//! a minus in front of a literal folds into the constant.  Exponents may be
//! parenthesized (`x^(1/2)`) and negative (`x^(-2)` becomes `Recip`).
//! No semantic checks are performed.

use num_bigint::BigInt;

use crate::constant::{ExactConstant, Rational};
use crate::error::{Error, Result};
use crate::term::{Term, TermKind};

pub fn parse(text: &str) -> Result<Term> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8, what: &str) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn expr(&mut self) -> Result<Term> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                let t = self.term()?;
                terms.push(negate(t));
            } else {
                break;
            }
        }
        if terms.len() == 1 {
            return Ok(terms.pop().unwrap());
        }
        // fold sums of literal constants so exact mixed constants like
        // `2 + pi` round-trip as single nodes
        if terms.iter().all(|t| t.is_const()) {
            let mut acc = ExactConstant::zero();
            for t in &terms {
                acc = acc.add(t.as_const().unwrap());
            }
            return Ok(Term::constant(acc));
        }
        Ok(Term::add_raw(terms))
    }

    fn term(&mut self) -> Result<Term> {
        let first = self.factor()?;
        let mut factors = vec![first];
        let mut leading_one_div = false;
        loop {
            if self.eat(b'*') {
                factors.push(self.factor()?);
            } else if self.eat(b'/') {
                let f = self.factor()?;
                if factors.len() == 1 && factors[0].is_one_const() {
                    // `1/f` sugar: a bare reciprocal, not Mul[1, Recip f].
                    factors[0] = Term::recip_raw(f);
                    leading_one_div = true;
                } else {
                    factors.push(Term::recip_raw(f));
                }
            } else {
                break;
            }
        }
        let _ = leading_one_div;
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        if let Some(folded) = fold_const_product(&factors) {
            return Ok(folded);
        }
        Ok(Term::mul_raw(factors))
    }

    fn factor(&mut self) -> Result<Term> {
        let a = self.atom()?;
        if self.eat(b'^') {
            let r = self.exponent_rational()?;
            return Ok(apply_pow(a, r));
        }
        Ok(a)
    }

    fn exponent_rational(&mut self) -> Result<Rational> {
        if self.eat(b'(') {
            let r = self.signed_rational()?;
            self.expect(b')', "expected `)` after exponent")?;
            Ok(r)
        } else {
            self.signed_rational()
        }
    }

    fn signed_rational(&mut self) -> Result<Rational> {
        let neg = self.eat(b'-');
        let r = self.rational()?;
        Ok(if neg { -r } else { r })
    }

    fn rational(&mut self) -> Result<Rational> {
        let n = self.integer()?;
        // `int / int` is a rational literal only when digits follow the
        // slash; otherwise the slash is term-level division.
        if self.peek() == Some(b'/') {
            let mut look = self.pos + 1;
            while look < self.src.len() && self.src[look].is_ascii_whitespace() {
                look += 1;
            }
            if look < self.src.len() && self.src[look].is_ascii_digit() {
                self.eat(b'/');
                let d = self.integer()?;
                if d == BigInt::from(0) {
                    return Err(self.err("zero denominator"));
                }
                return Ok(Rational::new(n, d));
            }
        }
        Ok(Rational::from_integer(n))
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        self.skip_ws();
        Ok(digits.parse::<BigInt>().unwrap())
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            self.skip_ws();
            Some(s)
        }
    }

    fn atom(&mut self) -> Result<Term> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.eat(b'(');
                let e = self.expr()?;
                self.expect(b')', "expected `)`")?;
                Ok(e)
            }
            Some(b'-') => {
                self.eat(b'-');
                let a = self.atom()?;
                Ok(negate(a))
            }
            Some(c) if c.is_ascii_digit() => {
                let r = self.rational()?;
                Ok(Term::constant(ExactConstant::from_rational(r)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.pos;
                let name = self.ident().unwrap();
                self.named_atom(&name, at)
            }
            _ => Err(self.err("unexpected character")),
        }
    }

    fn named_atom(&mut self, name: &str, at: usize) -> Result<Term> {
        match name {
            "x" => Ok(Term::x()),
            "pi" => Ok(Term::pi()),
            "exp" | "log" | "sqrt" => {
                let arg = self.application_arg(name, at)?;
                Ok(match name {
                    "exp" => Term::exp_raw(arg),
                    "log" => Term::log_raw(arg),
                    _ => Term::pow_raw(arg, Rational::new(1.into(), 2.into())),
                })
            }
            _ => {
                if let Some(k) = name.strip_prefix("exp_") {
                    let n = parse_nat(k).ok_or_else(|| Error::Arity {
                        pos: at,
                        msg: format!("bad iteration count in `{name}`"),
                    })?;
                    let mut t = self.application_arg(name, at)?;
                    for _ in 0..n {
                        t = Term::exp_raw(t);
                    }
                    return Ok(t);
                }
                if let Some(k) = name.strip_prefix("log_") {
                    let n = parse_nat(k).ok_or_else(|| Error::Arity {
                        pos: at,
                        msg: format!("bad iteration count in `{name}`"),
                    })?;
                    let mut t = self.application_arg(name, at)?;
                    for _ in 0..n {
                        t = Term::log_raw(t);
                    }
                    return Ok(t);
                }
                Err(Error::Syntax { pos: at, msg: format!("unknown name `{name}`") })
            }
        }
    }

    fn application_arg(&mut self, name: &str, at: usize) -> Result<Term> {
        if !self.eat(b'(') {
            return Err(Error::Arity {
                pos: at,
                msg: format!("`{name}` must be applied to one parenthesized argument"),
            });
        }
        let e = self.expr()?;
        self.expect(b')', "expected `)` closing application")?;
        Ok(e)
    }
}

fn parse_nat(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn negate(t: Term) -> Term {
    if let TermKind::Const(c) = t.kind() {
        return Term::constant(c.neg());
    }
    Term::mul_raw(vec![Term::int(-1), t])
}

/// Folds a product whose factors are all constant literals (or reciprocals
/// of them), when the result stays in `Q + Q*pi`.
fn fold_const_product(factors: &[Term]) -> Option<Term> {
    let mut acc = ExactConstant::one();
    for f in factors {
        let c = match f.kind() {
            TermKind::Const(c) => c.clone(),
            TermKind::Recip(inner) => inner.as_const()?.recip()?,
            _ => return None,
        };
        acc = acc.mul(&c)?;
    }
    Some(Term::constant(acc))
}

fn apply_pow(base: Term, r: Rational) -> Term {
    use num_traits::{One, Signed};
    if r == -Rational::one() {
        Term::recip_raw(base)
    } else if r.is_negative() {
        Term::recip_raw(Term::pow_raw(base, -r))
    } else {
        Term::pow_raw(base, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::build;

    #[test]
    fn ast_reading() {
        let t = parse("x + exp(-x)").unwrap();
        let expected = Term::add_raw(vec![
            Term::x(),
            Term::exp_raw(Term::mul_raw(vec![Term::int(-1), Term::x()])),
        ]);
        assert_eq!(t, expected);
    }

    #[test]
    fn sugar_expansion() {
        assert_eq!(parse("log_2(x)").unwrap(), Term::log_raw(Term::log_raw(Term::x())));
        assert_eq!(parse("exp_3(x)").unwrap(), Term::exp_iter(3));
        assert_eq!(parse("sqrt(x)").unwrap(), Term::pow_raw(Term::x(), crate::term::q(1, 2)));
    }

    #[test]
    fn pow_with_parenthesized_rational() {
        assert_eq!(parse("x^(1/2)").unwrap(), Term::pow_raw(Term::x(), crate::term::q(1, 2)));
        assert_eq!(parse("x^2").unwrap(), Term::pow_raw(Term::x(), crate::term::qi(2)));
        assert_eq!(parse("x^(-1)").unwrap(), Term::recip_raw(Term::x()));
    }

    #[test]
    fn recip_sugar() {
        assert_eq!(parse("1/x").unwrap(), Term::recip_raw(Term::x()));
        // but 2/x is an ordinary product
        assert_eq!(
            parse("2/x").unwrap(),
            Term::mul_raw(vec![Term::int(2), Term::recip_raw(Term::x())])
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse("x + ") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse("exp x") {
            Err(Error::Arity { .. }) => {}
            other => panic!("expected arity error, got {other:?}"),
        }
    }

    #[test]
    fn negative_literals_fold() {
        assert_eq!(parse("-3").unwrap(), Term::int(-3));
        assert_eq!(parse("x - 3").unwrap(), Term::add_raw(vec![Term::x(), Term::int(-3)]));
        let m = parse("-x").unwrap();
        assert_eq!(m, build::neg(Term::x()));
    }

    #[test]
    fn precedence() {
        // a + b*c^2
        let t = parse("1 + 2*x^2").unwrap();
        let expected = Term::add_raw(vec![
            Term::int(1),
            Term::mul_raw(vec![Term::int(2), Term::pow_raw(Term::x(), crate::term::qi(2))]),
        ]);
        assert_eq!(t, expected);
    }
}
