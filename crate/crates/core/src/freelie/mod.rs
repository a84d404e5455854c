//! The free Lie algebra over the graded alphabet `{a_i : |a_i| = i}`, its
//! pre-Lie product `x ▷ y = [x, y] / |x|`, and the projection of the Magnus
//! element from decorated trees.

mod hseries;
mod lyndon;
mod midpoint;
mod phi;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exact::Rational;
use crate::Error;

pub use hseries::{hseries_prelie_check, q_prelie_identity_holds, HSeries};
pub use lyndon::{
    assoc_commutator, bracket, bracket_basis, degrees, expand, expand_word, generator, graded_dimension, is_lyndon,
    lyndon_decompose, lyndon_words_up_to, prelie_on_lie, AssocPoly, GradedDimension, LieElement, LyndonWord, Word,
};
pub use midpoint::{classical_magnus_all, classical_magnus_midpoint, ExpansionPoint};
pub use phi::{lambda_monomial, magnus_lie, phi, phi_linear, phi_psi_bar, PhiEvaluator};

/// JSON form of one basis term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieTermRecord {
    /// Letters joined by dots, e.g. `a1.a2`.
    pub word: String,
    pub bracketing: String,
    pub coeff: Rational,
    /// `{"i": exponent of λ_i}`.
    pub lambda: BTreeMap<String, u32>,
}

const BRACKETING: &str = "lyndon-standard";

/// Terms ordered by degree, then word.
fn sorted_terms(x: &LieElement) -> Vec<(&LyndonWord, &Rational)> {
    let mut terms: Vec<_> = x.iter().collect();
    terms.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.cmp(b.0)));
    terms
}

pub fn lie_records(x: &LieElement) -> Vec<LieTermRecord> {
    sorted_terms(x)
        .into_iter()
        .map(|(w, c)| LieTermRecord {
            word: w.to_string(),
            bracketing: BRACKETING.into(),
            coeff: c.clone(),
            lambda: w.content().into_iter().map(|(i, e)| (i.to_string(), e)).collect(),
        })
        .collect()
}

pub fn lie_from_records(records: &[LieTermRecord]) -> Result<LieElement, Error> {
    let mut out = LieElement::zero();
    for r in records {
        if r.bracketing != BRACKETING {
            return Err(Error::Parse(format!("unsupported bracketing {:?}", r.bracketing)));
        }
        let letters = r
            .word
            .split('.')
            .map(|part| {
                part.strip_prefix('a')
                    .and_then(|d| d.parse::<u32>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad letter {part:?} in {:?}", r.word)))
            })
            .collect::<Result<Vec<u32>, Error>>()?;
        out.add_term(LyndonWord::new(letters)?, r.coeff.clone());
    }
    Ok(out)
}

/// Nested-bracket text, grouped by degree, e.g.
/// `-1/12 [q1,q2] + (-1/80 [q1,q4] + 1/240 [q2,q3])`.
pub fn lie_to_text(x: &LieElement, letter: &str) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (w, c) in sorted_terms(x) {
        groups.entry(w.degree()).or_default().push(format!("{c} {}", w.bracket_string(letter)));
    }
    let several = groups.len() > 1;
    groups
        .into_values()
        .map(|g| if several && g.len() > 1 { format!("({})", g.join(" + ")) } else { g.join(" + ") })
        .collect::<Vec<_>>()
        .join(" + ")
}
