//! Expression formatting, the inverse of the parser: `parse(format(t))`
//! reproduces `t` structurally for terms in parser shape (negative literal
//! constants folded, negative powers as `Recip`).

use std::fmt;

use num_traits::One;

use crate::constant::{fmt_rational, ExactConstant, Rational};
use crate::term::{Term, TermKind};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_expr(self))
    }
}

fn fmt_expr(t: &Term) -> String {
    match t.kind() {
        TermKind::Add(ss) => {
            let mut out = String::new();
            for (i, s) in ss.iter().enumerate() {
                let (neg, body) = strip_leading_minus(s);
                let body = guard_bare_minus(neg, body);
                if i == 0 {
                    if neg {
                        out.push('-');
                    }
                } else if neg {
                    out.push_str(" - ");
                } else {
                    out.push_str(" + ");
                }
                out.push_str(&body);
            }
            out
        }
        _ => {
            let (neg, body) = strip_leading_minus(t);
            let body = guard_bare_minus(neg, body);
            if neg {
                format!("-{body}")
            } else {
                body
            }
        }
    }
}

// A bare `-` binds to a single atom in the grammar, so a negated body that
// is not atom-shaped (and whose minus does not fold into a literal) needs
// parentheses: `-(x^2)` rather than `-x^2`.
fn guard_bare_minus(neg: bool, body: String) -> String {
    if !neg || atom_shaped(&body) {
        return body;
    }
    format!("({body})")
}

fn atom_shaped(body: &str) -> bool {
    let b = body.as_bytes();
    if b.is_empty() {
        return false;
    }
    if b[0].is_ascii_digit() {
        // the minus folds into the literal; safe as long as no `^` follows
        // the numeral directly, which our numeral formatting never produces
        return true;
    }
    if body == "x" || body == "pi" {
        return true;
    }
    let inner = if let Some(rest) = body.strip_prefix("exp(") {
        Some(rest)
    } else if let Some(rest) = body.strip_prefix("log(") {
        Some(rest)
    } else {
        body.strip_prefix('(')
    };
    match inner {
        None => false,
        Some(rest) => {
            // the opening paren must close exactly at the end
            let mut depth = 1i32;
            for (i, c) in rest.bytes().enumerate() {
                match c {
                    b'(' => depth += 1,
                    b')' => {
                        depth -= 1;
                        if depth == 0 {
                            return i == rest.len() - 1;
                        }
                    }
                    _ => {}
                }
            }
            false
        }
    }
}

/// Splits off a leading minus sign so sums render as `a - b`.
/// Returns the term-level (product-level) rendering of the magnitude.
fn strip_leading_minus(t: &Term) -> (bool, String) {
    match t.kind() {
        TermKind::Const(c) => {
            if c.sign() == std::cmp::Ordering::Less {
                (true, fmt_const(&c.neg(), false))
            } else {
                (false, fmt_const(c, false))
            }
        }
        TermKind::Mul(fs) => {
            if let Some(c) = fs[0].as_const() {
                let rest: Vec<Term> = fs[1..].to_vec();
                if c.sign() == std::cmp::Ordering::Less {
                    let pos = c.neg();
                    return (true, fmt_product(Some(&pos), &rest));
                }
                return (false, fmt_product(Some(c), &rest));
            }
            (false, fmt_product(None, fs))
        }
        _ => (false, fmt_term_level(t)),
    }
}

// Factors print in storage order; reciprocal factors render as division so
// the reparse reproduces the same list.
fn fmt_product(coeff: Option<&ExactConstant>, factors: &[Term]) -> String {
    let mut out = String::new();
    let mut emitted = false;
    if let Some(c) = coeff {
        if !c.is_one() || factors.is_empty() {
            out.push_str(&fmt_const(c, true));
            emitted = true;
        }
    }
    for f in factors {
        match f.kind() {
            TermKind::Recip(inner) => {
                if !emitted {
                    out.push('1');
                    emitted = true;
                }
                out.push('/');
                out.push_str(&fmt_factor_for_div(inner));
            }
            _ => {
                if emitted {
                    out.push('*');
                }
                out.push_str(&fmt_factor(f));
                emitted = true;
            }
        }
    }
    if !emitted {
        out.push('1');
    }
    out
}

fn fmt_term_level(t: &Term) -> String {
    match t.kind() {
        TermKind::Mul(fs) => fmt_product(None, fs),
        TermKind::Recip(inner) => format!("1/{}", fmt_factor_for_div(inner)),
        _ => fmt_factor(t),
    }
}

/// A factor: an atom with an optional exponent.
fn fmt_factor(t: &Term) -> String {
    match t.kind() {
        TermKind::Pow(b, r) => format!("{}^{}", fmt_atom(b), fmt_exponent(r)),
        _ => fmt_atom(t),
    }
}

/// Right operand of `/`: must parse back as a single factor.
fn fmt_factor_for_div(t: &Term) -> String {
    match t.kind() {
        TermKind::Pow(b, r) => format!("{}^{}", fmt_atom(b), fmt_exponent(r)),
        _ => fmt_atom(t),
    }
}

fn fmt_exponent(r: &Rational) -> String {
    if r.is_integer() && !r.numer().sign().eq(&num_bigint::Sign::Minus) {
        format!("{}", r.numer())
    } else {
        format!("({})", fmt_rational(r))
    }
}

fn fmt_atom(t: &Term) -> String {
    match t.kind() {
        TermKind::X => "x".to_string(),
        TermKind::Const(c) => fmt_const_atom(c),
        TermKind::Exp(a) => format!("exp({})", fmt_expr(a)),
        TermKind::Log(a) => format!("log({})", fmt_expr(a)),
        _ => format!("({})", fmt_expr(t)),
    }
}

/// Constant in factor position: parenthesize anything that is not a plain
/// nonnegative literal or `pi`.
fn fmt_const(c: &ExactConstant, factor_pos: bool) -> String {
    let s = fmt_const_plain(c);
    if factor_pos && (s.contains('+') || s.contains('-') || s.contains('/') || s.contains('*')) {
        format!("({s})")
    } else {
        s
    }
}

fn fmt_const_atom(c: &ExactConstant) -> String {
    let s = fmt_const_plain(c);
    if s.contains('+') || s.contains('-') || s.contains('/') || s.contains('*') {
        format!("({s})")
    } else {
        s
    }
}

fn fmt_const_plain(c: &ExactConstant) -> String {
    use num_bigint::BigInt;
    use num_traits::Zero;
    if c.pi_coefficient().is_zero() {
        return fmt_rational(c.rational_part());
    }
    let pc = c.pi_coefficient();
    let pi_str = if pc.is_one() {
        "pi".to_string()
    } else if *pc == -Rational::one() {
        "-pi".to_string()
    } else if pc.is_integer() {
        format!("{}*pi", pc.numer())
    } else if *pc.numer() == BigInt::from(1) {
        format!("pi/{}", pc.denom())
    } else if *pc.numer() == BigInt::from(-1) {
        format!("-pi/{}", pc.denom())
    } else {
        format!("{}*pi/{}", pc.numer(), pc.denom())
    };
    if c.rational_part().is_zero() {
        pi_str
    } else if pi_str.starts_with('-') {
        format!("{} - {}", fmt_rational(c.rational_part()), &pi_str[1..])
    } else {
        format!("{} + {}", fmt_rational(c.rational_part()), pi_str)
    }
}

#[cfg(test)]
mod tests {
    use crate::term::simplify::simplify;
    use crate::term::{build, parse, Term};

    fn roundtrip(t: &Term) {
        let text = format!("{t}");
        let back = parse(&text).unwrap_or_else(|e| panic!("reparse of `{text}` failed: {e}"));
        assert_eq!(&back, t, "round trip of `{text}`");
    }

    #[test]
    fn spec_examples() {
        let t = Term::exp_raw(Term::mul_raw(vec![Term::int(-1), Term::x()]));
        assert_eq!(format!("{t}"), "exp(-x)");
        roundtrip(&t);
        let t = Term::pow_raw(Term::x(), crate::term::q(1, 2));
        assert_eq!(format!("{t}"), "x^(1/2)");
        roundtrip(&t);
        let t = Term::log_raw(Term::log_raw(Term::x()));
        assert_eq!(format!("{t}"), "log(log(x))");
        roundtrip(&t);
    }

    #[test]
    fn negative_powers_and_sums() {
        for text in [
            "x - exp(x)",
            "1/x",
            "2/x^(3/2)",
            "x*log(x)/log(log(x))",
            "-(x^2) + 3",
            "pi/2 - 1/x",
            "(x + 1)^2",
            "exp(x)^1 + 0",
        ] {
            let t = parse(text).unwrap();
            roundtrip(&t);
            let s = simplify(&t);
            roundtrip(&s);
        }
    }

    #[test]
    fn simplified_forms_roundtrip() {
        for text in [
            "exp(x + log(x))",
            "x^(1/2)*x^(1/3)",
            "1/(x*log(x))",
            "(2 + pi)*x",
            "x/(x+1)",
            "3*x^2*log(x)",
        ] {
            let s = simplify(&parse(text).unwrap());
            roundtrip(&s);
        }
        roundtrip(&build::neg(Term::pi()));
    }
}
