//! Seeded random term generation for property tests, the oracle corpus,
//! and the acceptance suite.
//!
//! Positive terms are built from a positivity-preserving grammar so that
//! log and power arguments denote; exponential arguments keep rational
//! coefficients so class ratios stay exactly representable.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::asymptotics::{classify, eh, GermClass};
use crate::term::simplify::simplify;
use crate::term::{build, q, Term};

pub fn rng_from_seed(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn small_positive_rational(rng: &mut StdRng) -> Term {
    let choices: [(i64, i64); 8] =
        [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2), (1, 3), (5, 1), (2, 3)];
    let (n, d) = choices[rng.gen_range(0..choices.len())];
    Term::frac(n, d)
}

fn small_exponent(rng: &mut StdRng) -> crate::Rational {
    let choices: [(i64, i64); 7] = [(2, 1), (3, 1), (1, 2), (1, 3), (3, 2), (2, 3), (5, 2)];
    let (n, d) = choices[rng.gen_range(0..choices.len())];
    q(n, d)
}

/// Eventually positive term: leaves are `x`, iterated logs and positive
/// constants; combiners preserve positivity.
pub fn random_positive_term(rng: &mut StdRng, depth: u32, tower: u32) -> Term {
    if depth == 0 {
        return match rng.gen_range(0..10) {
            0..=4 => Term::x(),
            5..=6 => small_positive_rational(rng),
            _ => {
                if tower > 0 {
                    Term::log_iter(rng.gen_range(1..=tower.min(2)))
                } else {
                    Term::x()
                }
            }
        };
    }
    match rng.gen_range(0..12) {
        0..=2 => build::add2(
            random_positive_term(rng, depth - 1, tower),
            random_positive_term(rng, depth - 1, tower),
        ),
        3..=5 => build::mul2(
            random_positive_term(rng, depth - 1, tower),
            random_positive_term(rng, depth - 1, tower),
        ),
        6 => build::recip(random_positive_term(rng, depth - 1, tower)),
        7..=8 => build::pow(random_positive_term(rng, depth - 1, tower), small_exponent(rng)),
        9..=10 => {
            if tower > 0 {
                build::exp(random_signed_term(rng, depth - 1, tower - 1))
            } else {
                random_positive_term(rng, depth - 1, tower)
            }
        }
        _ => {
            if tower > 0 {
                // log of something eventually > 1
                build::log(build::add2(
                    random_positive_term(rng, depth - 1, tower - 1),
                    Term::x(),
                ))
            } else {
                random_positive_term(rng, depth - 1, tower)
            }
        }
    }
}

/// Arbitrary-sign term: a positive skeleton with sign flips on summands.
pub fn random_signed_term(rng: &mut StdRng, depth: u32, tower: u32) -> Term {
    let base = random_positive_term(rng, depth, tower);
    match rng.gen_range(0..4) {
        0 => build::neg(base),
        1 => build::sub(base, random_positive_term(rng, depth.saturating_sub(1), tower)),
        _ => base,
    }
}

/// Draws until `classify` reports an infinitely increasing germ.
pub fn random_inf_increasing(
    rng: &mut StdRng,
    depth: u32,
    tower: u32,
    tries: u32,
) -> Option<Term> {
    for _ in 0..tries {
        let t = simplify(&random_positive_term(rng, depth, tower));
        if !t.has_x() {
            continue;
        }
        if matches!(classify(&t), Ok(GermClass::InfIncreasing)) {
            return Some(t);
        }
    }
    None
}

/// Draws an eventually positive germ with decidable class.
pub fn random_positive_germ(rng: &mut StdRng, depth: u32, tower: u32, tries: u32) -> Option<Term> {
    for _ in 0..tries {
        let t = simplify(&random_positive_term(rng, depth, tower));
        match classify(&t) {
            Ok(c) if c.is_eventually_positive() => return Some(t),
            _ => continue,
        }
    }
    None
}

/// A unit at +infinity: `1 + s` or a ratio `(1 + s1)/(1 + s2)` with small
/// positive `s`.
pub fn random_unit(rng: &mut StdRng, depth: u32, tower: u32) -> Term {
    let small = |rng: &mut StdRng| -> Term {
        let f = random_inf_increasing(rng, depth, tower, 24)
            .unwrap_or_else(|| build::mul2(Term::x(), Term::x()));
        build::recip(f)
    };
    let one_plus = |rng: &mut StdRng| -> Term {
        build::add2(Term::int(1), build::scale_q(q(1, rng.gen_range(1..4)), small(rng)))
    };
    match rng.gen_range(0..3) {
        0 => one_plus(rng),
        1 => build::div(one_plus(rng), one_plus(rng)),
        _ => {
            // a positive constant limit other than 1 also qualifies
            build::add2(small_positive_rational(rng), small(rng))
        }
    }
}

/// Draws terms whose exponential height is exact.
pub fn random_exact_eh_term(
    rng: &mut StdRng,
    depth: u32,
    tower: u32,
    tries: u32,
) -> Option<(Term, i64)> {
    for _ in 0..tries {
        let t = simplify(&random_signed_term(rng, depth, tower));
        if !t.has_x() {
            continue;
        }
        if let Ok(v) = eh(&t) {
            if let Some(crate::asymptotics::Extended::Int(n)) = v.as_exact() {
                return Some((t, n));
            }
        }
    }
    None
}

/// Deterministic corpus for the oracle-vs-engine comparison: a mix of
/// positive and signed terms at several sizes, one per line.
pub fn generate_corpus(seed: u64, count: usize) -> Vec<Term> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let depth = 1 + (out.len() % 4) as u32;
        let tower = 1 + (out.len() % 3) as u32;
        let t = if out.len() % 3 == 0 {
            random_signed_term(&mut rng, depth.min(3), tower.min(2))
        } else {
            random_positive_term(&mut rng, depth, tower.min(2))
        };
        let s = simplify(&t);
        if !s.has_x() {
            continue;
        }
        if s.tower_height() > 3 {
            continue;
        }
        out.push(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a: Vec<String> =
            generate_corpus(7, 20).iter().map(|t| format!("{t}")).collect();
        let b: Vec<String> =
            generate_corpus(7, 20).iter().map(|t| format!("{t}")).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn positive_terms_classify_positive() {
        let mut rng = rng_from_seed(11);
        let mut decided = 0;
        for _ in 0..30 {
            let t = simplify(&random_positive_term(&mut rng, 3, 2));
            match classify(&t) {
                Ok(c) => {
                    decided += 1;
                    assert!(
                        c.is_eventually_positive() || c == GermClass::ZeroGerm,
                        "{t} classified {c:?}"
                    );
                }
                Err(_) => {}
            }
        }
        assert!(decided >= 20, "only {decided} of 30 random terms decided");
    }

    #[test]
    fn units_have_positive_finite_limits() {
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let u = random_unit(&mut rng, 2, 1);
            assert_eq!(classify(&u).unwrap(), GermClass::FinitePositive, "{u}");
        }
    }
}
