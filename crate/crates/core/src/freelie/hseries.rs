//! Formal power series in `h` with Lie-algebra coefficients, under
//! `(f ▷ g)(h) = [∫₀ʰ f(s)/s ds, g(h)]`.
//!
//! The coefficients are Lie words in constant symbols; on `h^k f_k` the
//! integral contributes the factor `1/k`.

use std::collections::BTreeMap;

use crate::exact::Rational;
use crate::freelie::lyndon::{bracket, generator, LieElement};
use crate::Error;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HSeries {
    terms: BTreeMap<usize, LieElement>,
}

impl HSeries {
    pub fn new(terms: BTreeMap<usize, LieElement>) -> Result<Self, Error> {
        if terms.get(&0).is_some_and(|x| !x.is_zero()) {
            return Err(Error::InvalidArgument("series must start at h^1".into()));
        }
        Ok(HSeries { terms: terms.into_iter().filter(|(_, x)| !x.is_zero()).collect() })
    }

    pub fn zero() -> Self {
        HSeries::default()
    }

    /// `x h^power`.
    pub fn monomial(power: usize, x: LieElement) -> Result<Self, Error> {
        HSeries::new([(power, x)].into_iter().collect())
    }

    /// `q_i = a h^i` with `a` the constant symbol `i`.
    pub fn q(i: u32) -> Self {
        HSeries::monomial(i as usize, generator(i)).expect("i ≥ 1")
    }

    pub fn terms(&self) -> &BTreeMap<usize, LieElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, other: &HSeries, s: &Rational) {
        for (p, x) in &other.terms {
            let slot = self.terms.entry(*p).or_default();
            slot.add_scaled(x, s);
            if slot.is_zero() {
                self.terms.remove(p);
            }
        }
    }

    /// `f ▷ g` up to and including `h^max_power`.
    pub fn prelie(&self, other: &HSeries, max_power: usize) -> HSeries {
        let mut out = HSeries::zero();
        for (k, x) in &self.terms {
            for (l, y) in &other.terms {
                if k + l > max_power {
                    continue;
                }
                let term = HSeries { terms: [(k + l, bracket(x, y))].into_iter().collect() };
                out.add_scaled(&term, &Rational::new(1, *k as i64));
            }
        }
        out
    }
}

/// `(f▷g)▷h − f▷(g▷h) − (g▷f)▷h + g▷(f▷h)`, truncated; zero for a pre-Lie product.
pub fn hseries_prelie_check(f: &HSeries, g: &HSeries, h: &HSeries, max_power: usize) -> HSeries {
    let one = Rational::one();
    let mut out = f.prelie(g, max_power).prelie(h, max_power);
    out.add_scaled(&f.prelie(&g.prelie(h, max_power), max_power), &-&one);
    out.add_scaled(&g.prelie(f, max_power).prelie(h, max_power), &-&one);
    out.add_scaled(&g.prelie(&f.prelie(h, max_power), max_power), &one);
    out
}

/// `q_i ▷ q_j` equals `(1/i)[q_i, q_j]` placed at `h^{i+j}`.
pub fn q_prelie_identity_holds(i: u32, j: u32) -> bool {
    let lhs = HSeries::q(i).prelie(&HSeries::q(j), (i + j) as usize);
    let rhs = bracket(&generator(i), &generator(j)).scale(&Rational::new(1, i as i64));
    let expected = HSeries::monomial((i + j) as usize, rhs).expect("positive power");
    lhs == expected
}
