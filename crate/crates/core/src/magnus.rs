//! The pre-Lie Magnus expansion over planar and non-planar rooted trees.
//!
//! Three things live here:
//! * the tree-indexed closed form `Ω̇_n = Σ γ(τ) F[τ](x)` over planar trees
//!   whose vertices all have fertility 0, 1 or even ([`magnus_theorem4`]);
//! * the Bernoulli recursion `Ω̇_n = Σ_j B_j/j! Σ L[Ω̇_k1]⋯L[Ω̇_kj](x)`
//!   computed directly by grafting ([`magnus_recursion`]);
//! * bookkeeping for the known reduced forms and their term counts.
//!
//! Everything is taken with the single generator `x = •`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::exact::{bernoulli_weight, Rational};
use crate::prelie::{graft_linear, psi_bar, PreLieElement};
use crate::trees::{b_plus, enumerate_e1, PlanarTree, Tree};
use crate::Error;

/// Largest order accepted by the symbolic expansion routines.
pub const MAX_ORDER: usize = 10;

/// Number of `e_τ` terms that the pre-Lie identity removes at orders 4..=7.
const REMOVABLE: [(usize, usize); 4] = [(4, 2), (5, 3), (6, 11), (7, 23)];

pub(crate) fn check_order(n: usize, cap: usize) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::InvalidOrder { order: n, reason: "orders start at 1".into() });
    }
    if n > cap {
        return Err(Error::InvalidOrder { order: n, reason: format!("exceeds the cap {cap}") });
    }
    Ok(())
}

/// `γ(τ) = Π_v B_{f(v)} / f(v)!` over the vertices of `t`.
pub fn gamma(t: &PlanarTree) -> Rational {
    t.fertilities().into_iter().map(bernoulli_weight).product()
}

/// `F[•](x) = x`, `F[B+(τ1…τk)](x) = F[τ1](x) → (F[τ2](x) → (⋯ → (F[τk](x) → x)))`.
pub fn tree_functional(t: &PlanarTree, arg: &PreLieElement) -> PreLieElement {
    t.children.iter().rev().fold(arg.clone(), |acc, c| graft_linear(&tree_functional(c, arg), &acc))
}

/// Degree-`n` part of the pre-Lie Magnus element in both tree bases.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnusTermTable {
    pub order: usize,
    /// `τ ↦ γ(τ)` over the e1-trees of degree `order` with `γ(τ) ≠ 0`.
    pub planar_terms: BTreeMap<PlanarTree, Rational>,
    /// `Σ γ(τ) Ψ̄(τ)`.
    pub nonplanar: PreLieElement,
}

/// The tree-indexed expansion at order `n`.
pub fn magnus_theorem4(n: usize) -> Result<MagnusTermTable, Error> {
    check_order(n, MAX_ORDER)?;
    let mut planar_terms = BTreeMap::new();
    let mut nonplanar = PreLieElement::zero();
    for t in enumerate_e1(n)? {
        let g = gamma(&t);
        if g.is_zero() {
            continue;
        }
        nonplanar.add_scaled(&psi_bar(&t), &g);
        planar_terms.insert(t, g);
    }
    Ok(MagnusTermTable { order: n, planar_terms, nonplanar })
}

/// `Ω̇_1 … Ω̇_n` by the direct Bernoulli recursion in the free pre-Lie algebra.
pub fn magnus_recursion_all(n: usize) -> Result<Vec<PreLieElement>, Error> {
    check_order(n, MAX_ORDER)?;
    let dot = PreLieElement::single(Tree::leaf());
    // nested[j][m] = Σ_{k1+…+kj = m} L[Ω̇_k1](⋯ L[Ω̇_kj](•))
    let mut nested: Vec<Vec<PreLieElement>> = vec![vec![PreLieElement::zero(); n]; n];
    nested[0][0] = dot.clone();
    let mut omega: Vec<PreLieElement> = vec![PreLieElement::zero()];
    omega.push(dot);
    for order in 2..=n {
        let m = order - 1;
        // Ω̇_1..Ω̇_{m} are known: fill every nested[j][m] for j ≥ 1.
        for j in 1..=m {
            let mut acc = PreLieElement::zero();
            for k in 1..=m {
                if m - k < j - 1 || nested[j - 1][m - k].is_zero() {
                    continue;
                }
                acc = &acc + &graft_linear(&omega[k], &nested[j - 1][m - k]);
            }
            nested[j][m] = acc;
        }
        let mut next = PreLieElement::zero();
        for (j, row) in nested.iter().enumerate().take(m + 1).skip(1) {
            next.add_scaled(&row[m], &bernoulli_weight(j));
        }
        omega.push(next);
    }
    omega.remove(0);
    Ok(omega)
}

/// `Ω̇_n(•)` by the direct recursion.
pub fn magnus_recursion(n: usize) -> Result<PreLieElement, Error> {
    Ok(magnus_recursion_all(n)?.pop().expect("non-empty"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermCounts {
    pub e1_count: usize,
    pub nonplanar_support: usize,
    /// `None` past the end of the known removal table.
    pub reduced_count: Option<usize>,
}

/// How many `e_τ` terms remain once the removable ones are dropped.
pub fn reduced_count(n: usize) -> Result<usize, Error> {
    check_order(n, MAX_ORDER)?;
    let e1 = enumerate_e1(n)?.len();
    if n <= 3 {
        return Ok(e1);
    }
    REMOVABLE
        .iter()
        .find(|(k, _)| *k == n)
        .map(|(_, removed)| e1 - removed)
        .ok_or(Error::TableExhausted { order: n, max: 7 })
}

pub fn term_counts(n: usize) -> Result<TermCounts, Error> {
    let table = magnus_theorem4(n)?;
    Ok(TermCounts {
        e1_count: enumerate_e1(n)?.len(),
        nonplanar_support: table.nonplanar.len(),
        reduced_count: reduced_count(n).ok(),
    })
}

/// `Σ c·Ψ̄(τ)` for a list of planar terms.
pub fn expand_planar<'a>(terms: impl IntoIterator<Item = (&'a PlanarTree, &'a Rational)>) -> PreLieElement {
    let mut out = PreLieElement::zero();
    for (t, c) in terms {
        out.add_scaled(&psi_bar(t), c);
    }
    out
}

/// The two-term reduced form at order four: `−1/6·e_{B+(ladder3)} − 1/12·e_{B+(•, ladder2)}`.
pub fn reduced_order4() -> Vec<(PlanarTree, Rational)> {
    vec![
        (PlanarTree::ladder(4), Rational::new(-1, 6)),
        (b_plus(vec![PlanarTree::leaf(), PlanarTree::ladder(2)]), Rational::new(-1, 12)),
    ]
}

/// Coefficients of the seven-term reduced form at order five, in the order
/// they are usually listed.
pub fn reduced_order5_coefficients() -> Vec<Rational> {
    [(5, 48), (1, 48), (1, 24), (1, 48), (1, 144), (1, 144), (-1, 120)]
        .iter()
        .map(|&(p, q)| Rational::new(p, q))
        .collect()
}

/// Every assignment of `coeffs` to pairwise distinct e1-trees of degree `n`
/// whose expansion `Σ c_i Ψ̄(τ_i)` equals `target`. Assignments that only
/// permute equal coefficients are reported once.
pub fn identify_reduced_form(
    n: usize,
    coeffs: &[Rational],
    target: &PreLieElement,
) -> Result<Vec<Vec<(PlanarTree, Rational)>>, Error> {
    let trees = enumerate_e1(n)?;
    let images: Vec<PreLieElement> = trees.iter().map(psi_bar).collect();
    let mut sorted = coeffs.to_vec();
    sorted.sort();

    struct Search<'a> {
        trees: &'a [PlanarTree],
        images: &'a [PreLieElement],
        coeffs: &'a [Rational],
        target: &'a PreLieElement,
        found: Vec<Vec<(PlanarTree, Rational)>>,
    }

    impl Search<'_> {
        fn go(&mut self, slot: usize, used: &mut Vec<usize>, acc: &PreLieElement) {
            if slot == self.coeffs.len() {
                if acc == self.target {
                    let mut sol: Vec<(PlanarTree, Rational)> =
                        used.iter().zip(self.coeffs).map(|(&i, c)| (self.trees[i].clone(), c.clone())).collect();
                    sol.sort();
                    self.found.push(sol);
                }
                return;
            }
            // equal coefficients take increasing tree indices
            let start = if slot > 0 && self.coeffs[slot] == self.coeffs[slot - 1] { used[slot - 1] + 1 } else { 0 };
            for i in start..self.trees.len() {
                if used.contains(&i) {
                    continue;
                }
                let mut next = acc.clone();
                next.add_scaled(&self.images[i], &self.coeffs[slot]);
                used.push(i);
                self.go(slot + 1, used, &next);
                used.pop();
            }
        }
    }

    let mut s = Search { trees: &trees, images: &images, coeffs: &sorted, target, found: Vec::new() };
    s.go(0, &mut Vec::new(), &PreLieElement::zero());
    let mut found = s.found;
    found.sort();
    found.dedup();
    Ok(found)
}
