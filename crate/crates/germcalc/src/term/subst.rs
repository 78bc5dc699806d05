//! Syntactic composition: replace every `x` in `f` by `g`.

use std::collections::HashMap;

use crate::term::{Term, TermKind};

/// Replaces every occurrence of `x` in `f` by `g`.  The result denotes
/// `f o g` when `g` is infinitely increasing; callers check that via
/// `classify` when it matters.
pub fn substitute(f: &Term, g: &Term) -> Term {
    let mut memo = HashMap::new();
    subst_rec(f, g, &mut memo)
}

fn subst_rec(f: &Term, g: &Term, memo: &mut HashMap<Term, Term>) -> Term {
    if !f.has_x() {
        return f.clone();
    }
    if let Some(hit) = memo.get(f) {
        return hit.clone();
    }
    let out = match f.kind() {
        TermKind::X => g.clone(),
        TermKind::Const(_) => f.clone(),
        TermKind::Add(ss) => {
            Term::add_raw(ss.iter().map(|s| subst_rec(s, g, memo)).collect())
        }
        TermKind::Mul(fs) => {
            Term::mul_raw(fs.iter().map(|s| subst_rec(s, g, memo)).collect())
        }
        TermKind::Recip(t) => Term::recip_raw(subst_rec(t, g, memo)),
        TermKind::Pow(b, r) => Term::pow_raw(subst_rec(b, g, memo), r.clone()),
        TermKind::Exp(a) => Term::exp_raw(subst_rec(a, g, memo)),
        TermKind::Log(a) => Term::log_raw(subst_rec(a, g, memo)),
    };
    memo.insert(f.clone(), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    #[test]
    fn syntactic_replacement() {
        let f = Term::exp_raw(Term::x());
        let g = Term::log_raw(Term::x());
        assert_eq!(substitute(&f, &g), Term::exp_raw(Term::log_raw(Term::x())));
        assert_eq!(substitute(&Term::x(), &g), g);
        let h = Term::add_raw(vec![Term::x(), Term::int(1)]);
        assert_eq!(
            substitute(&h, &f),
            Term::add_raw(vec![Term::exp_raw(Term::x()), Term::int(1)])
        );
    }

    #[test]
    fn associativity() {
        let f = Term::add_raw(vec![Term::x(), Term::exp_raw(Term::x())]);
        let g = Term::pow_raw(Term::x(), crate::term::q(1, 2));
        let h = Term::log_raw(Term::x());
        let lhs = substitute(&substitute(&f, &g), &h);
        let rhs = substitute(&f, &substitute(&g, &h));
        assert_eq!(lhs, rhs);
    }
}
