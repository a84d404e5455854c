//! From decorated trees to the free Lie algebra.

use std::collections::{BTreeMap, HashMap};

use crate::exact::Rational;
use crate::freelie::lyndon::{bracket, generator, LieElement};
use crate::magnus::{check_order, gamma, MAX_ORDER};
use crate::prelie::{graft, PreLieElement};
use crate::trees::{decorate_all, enumerate_e1, PlanarTree, Tree};
use crate::Error;

/// `x ▷ y` when `x` is known to sit in degree `deg`.
fn act(x: &LieElement, deg: usize, y: &LieElement) -> LieElement {
    bracket(x, y).scale(&Rational::new(1, deg as i64))
}

/// Evaluates `Φ` on decorated trees. The root child peeled at each step is
/// chosen by `pick`; the result does not depend on that choice.
pub struct PhiEvaluator<'p> {
    pick: &'p mut dyn FnMut(&Tree) -> usize,
    memo: HashMap<Tree, LieElement>,
}

impl<'p> PhiEvaluator<'p> {
    pub fn new(pick: &'p mut dyn FnMut(&Tree) -> usize) -> Self {
        PhiEvaluator { pick, memo: HashMap::new() }
    }

    pub fn eval(&mut self, t: &Tree) -> Result<LieElement, Error> {
        if let Some(hit) = self.memo.get(t) {
            return Ok(hit.clone());
        }
        let a = t.label().ok_or_else(|| Error::InvalidArgument(format!("undecorated vertex in {t}")))?;
        let out = if t.children().is_empty() {
            generator(a)
        } else {
            // B+_a(c, F) = c → B+_a(F) − Σ_j B+_a(F with c grafted into F_j)
            let k = (self.pick)(t) % t.children().len();
            let c = &t.children()[k];
            let mut rest: Vec<Tree> = t.children().to_vec();
            rest.remove(k);
            let base = Tree::new(Some(a), rest.clone());
            let mut out = act(&self.eval(c)?, c.decorated_degree(), &self.eval(&base)?);
            for j in 0..rest.len() {
                for (g, coeff) in graft(c, &rest[j]).iter() {
                    let mut replaced = rest.clone();
                    replaced[j] = g.clone();
                    let term = self.eval(&Tree::new(Some(a), replaced))?;
                    out.add_scaled(&term, &-coeff);
                }
            }
            out
        };
        self.memo.insert(t.clone(), out.clone());
        Ok(out)
    }

    pub fn eval_linear(&mut self, x: &PreLieElement) -> Result<LieElement, Error> {
        let mut out = LieElement::zero();
        for (t, c) in x.iter() {
            out.add_scaled(&self.eval(t)?, c);
        }
        Ok(out)
    }
}

/// The pre-Lie morphism sending the decorated single vertex `•_{a_i}` to `a_i`.
pub fn phi(t: &Tree) -> Result<LieElement, Error> {
    PhiEvaluator::new(&mut |_| 0).eval(t)
}

pub fn phi_linear(x: &PreLieElement) -> Result<LieElement, Error> {
    PhiEvaluator::new(&mut |_| 0).eval_linear(x)
}

/// `Φ(Ψ̄(σ))` computed along the left-Butcher splitting of `σ`.
pub fn phi_psi_bar(t: &PlanarTree) -> Result<LieElement, Error> {
    match t.split_left() {
        None => match t.label {
            Some(a) => Ok(generator(a)),
            None => Err(Error::InvalidArgument(format!("undecorated vertex in {t}"))),
        },
        Some((first, rest)) => Ok(act(&phi_psi_bar(first)?, first.decorated_degree(), &phi_psi_bar(&rest)?)),
    }
}

/// Degree-`n` component of `Ω̇(x)` for `x = Σ λ_i a_i`.
///
/// With `lambdas = None` every `λ_i` is left symbolic: the coefficient of a
/// basis word is then the coefficient of the monomial `Π λ_i^{m_i}` read off
/// from its letter content (see [`lambda_monomial`]). With `Some(map)` the
/// values are substituted, missing indices counting as zero.
pub fn magnus_lie(n: usize, lambdas: Option<&BTreeMap<u32, Rational>>) -> Result<LieElement, Error> {
    check_order(n, MAX_ORDER)?;
    let mut out = LieElement::zero();
    for size in 1..=n {
        for t in enumerate_e1(size)? {
            let g = gamma(&t);
            if g.is_zero() {
                continue;
            }
            for s in decorate_all(&t, n as u32, n) {
                if s.decorated_degree() != n {
                    continue;
                }
                out.add_scaled(&phi_psi_bar(&s)?, &g);
            }
        }
    }
    Ok(match lambdas {
        None => out,
        Some(values) => out
            .iter()
            .map(|(w, c)| {
                let weight: Rational =
                    w.letters().iter().map(|i| values.get(i).cloned().unwrap_or_else(Rational::zero)).product();
                (w.clone(), c * &weight)
            })
            .collect(),
    })
}

/// The λ-monomial carried by a basis word: `{i: multiplicity of a_i}`.
pub fn lambda_monomial(w: &crate::freelie::LyndonWord) -> BTreeMap<u32, u32> {
    w.content()
}
