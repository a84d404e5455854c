//! Lyndon basis of the free Lie algebra over a graded alphabet.
//!
//! Letter `i ≥ 1` stands for the generator `a_i` of weight `i`. Words are
//! ordered lexicographically with `a_1 < a_2 < …` and a proper prefix
//! sorting first. Lie elements are reduced to the Lyndon basis by expanding
//! into the free associative algebra and peeling off the smallest word,
//! which for a Lie polynomial is always a Lyndon word whose standard
//! bracketing has that word as its smallest monomial.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::exact::Rational;
use crate::lincomb::LinComb;
use crate::Error;

/// Word over the alphabet of generator indices.
pub type Word = Vec<u32>;

/// Element of the free associative algebra.
pub type AssocPoly = LinComb<Word>;

/// A Lyndon word, standing for its standard bracketing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LyndonWord(Word);

/// Element of the free Lie algebra in the Lyndon basis.
pub type LieElement = LinComb<LyndonWord>;

pub fn is_lyndon(w: &[u32]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|i| w < &w[i..])
}

impl LyndonWord {
    pub fn new(w: Word) -> Result<Self, Error> {
        if is_lyndon(&w) && w.iter().all(|&c| c >= 1) {
            Ok(LyndonWord(w))
        } else {
            Err(Error::InvalidArgument(format!("{w:?} is not a Lyndon word")))
        }
    }

    pub fn letter(i: u32) -> Self {
        assert!(i >= 1, "generator indices start at 1");
        LyndonWord(vec![i])
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    /// Sum of the letter weights.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    /// `w = uv` with `v` the longest proper suffix that is Lyndon.
    pub fn standard_factorization(&self) -> Option<(LyndonWord, LyndonWord)> {
        if self.0.len() < 2 {
            return None;
        }
        let split = (1..self.0.len()).find(|&i| is_lyndon(&self.0[i..]))?;
        Some((LyndonWord(self.0[..split].to_vec()), LyndonWord(self.0[split..].to_vec())))
    }

    /// Standard bracketing written with the given letter prefix, e.g.
    /// `[q1,[q1,q2]]`.
    pub fn bracket_string(&self, prefix: &str) -> String {
        match self.standard_factorization() {
            None => format!("{prefix}{}", self.0[0]),
            Some((u, v)) => format!("[{},{}]", u.bracket_string(prefix), v.bracket_string(prefix)),
        }
    }

    /// Exponents of the letters, `{i: multiplicity}`.
    pub fn content(&self) -> BTreeMap<u32, u32> {
        let mut out = BTreeMap::new();
        for &c in &self.0 {
            *out.entry(c).or_insert(0) += 1;
        }
        out
    }
}

impl fmt::Display for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| format!("a{c}")).collect();
        f.write_str(&parts.join("."))
    }
}

impl fmt::Debug for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bracket_string("a"))
    }
}

fn assoc_mul(x: &AssocPoly, y: &AssocPoly) -> AssocPoly {
    x.bilinear(y, |a, b| {
        let mut w = a.clone();
        w.extend_from_slice(b);
        AssocPoly::single(w)
    })
}

/// `xy − yx` in the free associative algebra.
pub fn assoc_commutator(x: &AssocPoly, y: &AssocPoly) -> AssocPoly {
    &assoc_mul(x, y) - &assoc_mul(y, x)
}

fn expansion_cache() -> &'static Mutex<HashMap<LyndonWord, AssocPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<LyndonWord, AssocPoly>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Associative expansion of the standard bracketing of `w`.
pub fn expand_word(w: &LyndonWord) -> AssocPoly {
    if let Some(hit) = expansion_cache().lock().unwrap_or_else(|e| e.into_inner()).get(w) {
        return hit.clone();
    }
    let out = match w.standard_factorization() {
        None => AssocPoly::single(w.0.clone()),
        Some((u, v)) => assoc_commutator(&expand_word(&u), &expand_word(&v)),
    };
    expansion_cache().lock().unwrap_or_else(|e| e.into_inner()).insert(w.clone(), out.clone());
    out
}

/// Associative expansion of a Lie element.
pub fn expand(x: &LieElement) -> AssocPoly {
    x.linear(expand_word)
}

/// Rewrite a Lie polynomial given in the free associative algebra in the
/// Lyndon basis. Fails if `p` is not a Lie polynomial.
pub fn lyndon_decompose(p: &AssocPoly) -> Result<LieElement, Error> {
    let mut rest = p.clone();
    let mut out = LieElement::zero();
    while let Some((w, c)) = rest.iter().next().map(|(w, c)| (w.clone(), c.clone())) {
        if !is_lyndon(&w) {
            return Err(Error::InvalidArgument(format!("not a Lie polynomial: leading word {w:?}")));
        }
        let lw = LyndonWord(w);
        rest.add_scaled(&expand_word(&lw), &-&c);
        out.add_term(lw, c);
    }
    Ok(out)
}

fn bracket_cache() -> &'static Mutex<HashMap<(LyndonWord, LyndonWord), LieElement>> {
    static CACHE: OnceLock<Mutex<HashMap<(LyndonWord, LyndonWord), LieElement>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `[u, v]` for two basis elements.
pub fn bracket_basis(u: &LyndonWord, v: &LyndonWord) -> LieElement {
    if u == v {
        return LieElement::zero();
    }
    if u > v {
        return -&bracket_basis(v, u);
    }
    let key = (u.clone(), v.clone());
    if let Some(hit) = bracket_cache().lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return hit.clone();
    }
    let p = assoc_commutator(&expand_word(u), &expand_word(v));
    let out = lyndon_decompose(&p).expect("a commutator of Lie polynomials is a Lie polynomial");
    bracket_cache().lock().unwrap_or_else(|e| e.into_inner()).insert(key, out.clone());
    out
}

/// Lie bracket in the Lyndon basis.
pub fn bracket(x: &LieElement, y: &LieElement) -> LieElement {
    x.bilinear(y, bracket_basis)
}

/// The generator `a_i` as a Lie element.
pub fn generator(i: u32) -> LieElement {
    LieElement::single(LyndonWord::letter(i))
}

/// Degrees occurring in `x`, ascending.
pub fn degrees(x: &LieElement) -> Vec<usize> {
    let mut d: Vec<usize> = x.keys().map(LyndonWord::degree).collect();
    d.sort_unstable();
    d.dedup();
    d
}

/// `x ▷ y = [x, y] / |x|` for homogeneous `x`.
pub fn prelie_on_lie(x: &LieElement, y: &LieElement) -> Result<LieElement, Error> {
    let d = degrees(x);
    match d.as_slice() {
        [] => Ok(LieElement::zero()),
        [deg] => Ok(bracket(x, y).scale(&Rational::new(1, *deg as i64))),
        _ => Err(Error::NotHomogeneous(d)),
    }
}

/// All Lyndon words of weight at most `max_degree`, sorted by degree then word.
pub fn lyndon_words_up_to(max_degree: usize) -> Vec<LyndonWord> {
    fn extend(prefix: &mut Word, left: usize, out: &mut Vec<LyndonWord>) {
        if !prefix.is_empty() && is_lyndon(prefix) {
            out.push(LyndonWord(prefix.clone()));
        }
        for c in 1..=left {
            prefix.push(c as u32);
            extend(prefix, left - c, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), max_degree, &mut out);
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedDimension {
    /// `by_degree[d-1]` = number of basis elements of degree `d`.
    pub by_degree: Vec<usize>,
    pub cumulative: Vec<usize>,
}

/// Dimensions of the graded pieces of the free Lie algebra over the weighted
/// alphabet, by exhaustive Lyndon word generation.
pub fn graded_dimension(max_degree: usize) -> GradedDimension {
    let mut by_degree = vec![0; max_degree];
    for w in lyndon_words_up_to(max_degree) {
        by_degree[w.degree() - 1] += 1;
    }
    let cumulative = by_degree
        .iter()
        .scan(0, |acc, &d| {
            *acc += d;
            Some(*acc)
        })
        .collect();
    GradedDimension { by_degree, cumulative }
}
