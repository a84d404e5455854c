//! The free pre-Lie algebra on rooted trees under grafting.

use crate::exact::Rational;
use crate::lincomb::{LinComb, TermRecord};
use crate::trees::{canonicalize, PlanarTree, Tree};
use crate::Error;

/// Rational linear combination of (possibly decorated) non-planar trees.
pub type PreLieElement = LinComb<Tree>;

/// `s → t`: the sum over all vertices `v` of `t` of the tree obtained by
/// hanging `s` below `v`.
pub fn graft(s: &Tree, t: &Tree) -> PreLieElement {
    (0..t.degree()).map(|v| (t.attach_at(s, v), Rational::one())).collect()
}

/// Bilinear extension of [`graft`].
pub fn graft_linear(x: &PreLieElement, y: &PreLieElement) -> PreLieElement {
    x.bilinear(y, graft)
}

/// `(x→y)→z − x→(y→z) − (y→x)→z + y→(x→z)`; zero for a pre-Lie product.
pub fn prelie_associator_check(x: &PreLieElement, y: &PreLieElement, z: &PreLieElement) -> PreLieElement {
    let a = graft_linear(&graft_linear(x, y), z);
    let b = graft_linear(x, &graft_linear(y, z));
    let c = graft_linear(&graft_linear(y, x), z);
    let d = graft_linear(y, &graft_linear(x, z));
    &(&(&a - &b) - &c) + &d
}

/// Replace every left Butcher product in the monomial expression of `t` by
/// grafting. Decorations are carried through.
pub fn psi_bar(t: &PlanarTree) -> PreLieElement {
    match t.split_left() {
        None => PreLieElement::single(canonicalize(t)),
        Some((first, rest)) => graft_linear(&psi_bar(first), &psi_bar(&rest)),
    }
}

/// Coefficient of `s` in `psi_bar(t)`.
pub fn alpha(s: &Tree, t: &PlanarTree) -> Rational {
    if s.degree() != t.degree() {
        return Rational::zero();
    }
    psi_bar(t).coeff(s)
}

/// Every tree in `x` has exactly `n` vertices.
pub fn is_homogeneous(x: &PreLieElement, n: usize) -> bool {
    x.keys().all(|t| t.degree() == n)
}

/// Parse the JSON record form back into an element.
pub fn from_records(records: &[TermRecord]) -> Result<PreLieElement, Error> {
    let mut out = PreLieElement::zero();
    for r in records {
        out.add_term(r.elem.parse()?, r.coeff.clone());
    }
    Ok(out)
}
