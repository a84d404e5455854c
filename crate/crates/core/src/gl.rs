//! Grossman-Larson algebra of non-planar forests.
//!
//! The product follows the convention
//! `(t1⋯tn) ∗ (t'1⋯t'm) = Σ_f F0 (F1 → t1)⋯(Fn → tn)`, where `f` runs over
//! the maps `{1..m} → {0..n}` and `Fi` is the forest of the `t'j` sent to
//! `i`. Forests act on trees with `(F ∗ F') → t = F' → (F → t)`.

use std::collections::HashMap;
use std::fmt;

use crate::exact::{factorial, Rational};
use crate::lincomb::LinComb;
use crate::magnus::{check_order, MAX_ORDER};
use crate::prelie::{graft, graft_linear, PreLieElement};
use crate::trees::{canonicalize, PlanarTree, Tree};
use crate::Error;

/// Commutative product of trees, kept sorted. The empty forest is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Forest(Vec<Tree>);

impl Forest {
    pub fn new(mut trees: Vec<Tree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn empty() -> Self {
        Forest(Vec::new())
    }

    pub fn single(t: Tree) -> Self {
        Forest(vec![t])
    }

    /// `•^m`, the forest of `m` one-vertex trees.
    pub fn dots(m: usize) -> Self {
        Forest(vec![Tree::leaf(); m])
    }

    pub fn trees(&self) -> &[Tree] {
        &self.0
    }

    /// Number of trees.
    pub fn weight(&self) -> usize {
        self.0.len()
    }

    /// Total vertex count.
    pub fn degree(&self) -> usize {
        self.0.iter().map(Tree::degree).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Forest) -> Forest {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Forest::new(v)
    }

    fn without(&self, i: usize) -> Forest {
        let mut v = self.0.clone();
        v.remove(i);
        Forest(v)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            f.write_str(t.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Forest {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "1" {
            return Ok(Forest::empty());
        }
        s.split('|').map(str::parse).collect::<Result<Vec<Tree>, _>>().map(Forest::new)
    }
}

pub type GlElement = LinComb<Forest>;

/// The unit of the Grossman-Larson algebra.
pub fn gl_unit() -> GlElement {
    GlElement::single(Forest::empty())
}

/// Concatenation product extended bilinearly.
fn concat_linear(x: &GlElement, y: &GlElement) -> GlElement {
    x.bilinear(y, |a, b| GlElement::single(a.concat(b)))
}

/// A combination of trees viewed as a combination of one-tree forests.
fn trees_as_forests(x: &PreLieElement) -> GlElement {
    x.map_keys(|t| Forest::single(t.clone()))
}

/// Attach every tree of `f` to some vertex of `t` (the original vertices
/// only), in all possible ways.
pub fn multi_graft(f: &Forest, t: &Tree) -> PreLieElement {
    let n = t.degree();
    let p = f.weight();
    let grafts: Vec<PlanarTree> = f.trees().iter().map(Tree::to_planar).collect();
    let mut out = PreLieElement::zero();
    let mut choice = vec![0usize; p];
    loop {
        let mut extra: Vec<Vec<PlanarTree>> = vec![Vec::new(); n];
        for (s, &v) in grafts.iter().zip(&choice) {
            extra[v].push(s.clone());
        }
        let mut next_id = 0;
        out.add_term(canonicalize(&with_extra_children(t, &extra, &mut next_id)), Rational::one());
        // next map {1..p} → {0..n-1}
        let mut i = 0;
        loop {
            if i == p {
                return out;
            }
            choice[i] += 1;
            if choice[i] < n {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Rebuild `t` with `extra[v]` appended below the vertex of preorder index `v`.
fn with_extra_children(t: &Tree, extra: &[Vec<PlanarTree>], next_id: &mut usize) -> PlanarTree {
    let id = *next_id;
    *next_id += 1;
    let mut children: Vec<PlanarTree> = t.children().iter().map(|c| with_extra_children(c, extra, next_id)).collect();
    children.extend(extra[id].iter().cloned());
    PlanarTree::with_label(t.label(), children)
}

/// `s → F`: derivation action of a tree on a forest.
fn graft_onto_forest(s: &Tree, f: &Forest) -> GlElement {
    let mut out = GlElement::zero();
    for i in 0..f.weight() {
        let rest = GlElement::single(f.without(i));
        out = &out + &concat_linear(&trees_as_forests(&graft(s, &f.trees()[i])), &rest);
    }
    out
}

/// `F → t`, defined by peeling one tree `s` off `F = s·F'`:
/// `(s·F') → t = s → (F' → t) − (s → F') → t`.
/// `pick` chooses which tree to peel at every step.
pub fn gl_action_with(f: &Forest, t: &Tree, pick: &mut dyn FnMut(&Forest) -> usize) -> PreLieElement {
    ActionCache::new(pick).action(f, t)
}

/// Memo table for the peeling recursion.
pub struct ActionCache<'p> {
    pick: &'p mut dyn FnMut(&Forest) -> usize,
    memo: HashMap<(Forest, Tree), PreLieElement>,
}

impl<'p> ActionCache<'p> {
    pub fn new(pick: &'p mut dyn FnMut(&Forest) -> usize) -> Self {
        ActionCache { pick, memo: HashMap::new() }
    }

    pub fn action(&mut self, f: &Forest, t: &Tree) -> PreLieElement {
        match f.weight() {
            0 => return PreLieElement::single(t.clone()),
            1 => return graft(&f.trees()[0], t),
            _ => {}
        }
        let key = (f.clone(), t.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let i = (self.pick)(f);
        let s = &f.trees()[i];
        let rest = f.without(i);
        let inner = self.action(&rest, t);
        let first = graft_linear(&PreLieElement::single(s.clone()), &inner);
        let mut correction = PreLieElement::zero();
        for (g, c) in graft_onto_forest(s, &rest).iter() {
            correction.add_scaled(&self.action(g, t), c);
        }
        let out = &first - &correction;
        self.memo.insert(key, out.clone());
        out
    }

    pub fn action_linear(&mut self, x: &GlElement, y: &PreLieElement) -> PreLieElement {
        let mut out = PreLieElement::zero();
        for (f, cf) in x.iter() {
            for (t, ct) in y.iter() {
                out.add_scaled(&self.action(f, t), &(cf * ct));
            }
        }
        out
    }
}

/// `F → t`, peeling the first tree in canonical order.
pub fn gl_action(f: &Forest, t: &Tree) -> PreLieElement {
    gl_action_with(f, t, &mut |_| 0)
}

/// Linear extension of the action in both arguments.
pub fn gl_action_linear(x: &GlElement, y: &PreLieElement) -> PreLieElement {
    ActionCache::new(&mut |_| 0).action_linear(x, y)
}

/// Product of two forests.
fn forest_product(a: &Forest, b: &Forest) -> GlElement {
    let n = a.weight();
    let m = b.weight();
    let mut out = GlElement::zero();
    let mut f = vec![0usize; m];
    loop {
        let mut buckets: Vec<Vec<Tree>> = vec![Vec::new(); n + 1];
        for (j, &target) in f.iter().enumerate() {
            buckets[target].push(b.trees()[j].clone());
        }
        let mut term = GlElement::single(Forest::new(std::mem::take(&mut buckets[0])));
        for (i, bucket) in buckets.into_iter().enumerate().skip(1) {
            let grafted = multi_graft(&Forest::new(bucket), &a.trees()[i - 1]);
            term = concat_linear(&term, &trees_as_forests(&grafted));
        }
        out = &out + &term;
        let mut j = 0;
        loop {
            if j == m {
                return out;
            }
            f[j] += 1;
            if f[j] <= n {
                break;
            }
            f[j] = 0;
            j += 1;
        }
    }
}

/// The Grossman-Larson product `x ∗ y`.
pub fn gl_product(x: &GlElement, y: &GlElement) -> GlElement {
    x.bilinear(y, forest_product)
}

/// `x ∗ y` restricted to forests of total degree at most `max_degree`.
/// The product is graded, so pairs past the bound are skipped outright.
pub fn gl_product_truncated(x: &GlElement, y: &GlElement, max_degree: usize) -> GlElement {
    let mut out = GlElement::zero();
    for (a, ca) in x.iter() {
        for (b, cb) in y.iter() {
            if a.degree() + b.degree() <= max_degree {
                out.add_scaled(&forest_product(a, b), &(ca * cb));
            }
        }
    }
    out
}

/// Degree-`n` part of `log∗(exp •) → •`, i.e. of
/// `Σ_{k>0} (−1)^{k−1}/k · (e^• − 1)^{∗(k−1)} → •`.
pub fn log_star_component(n: usize) -> Result<PreLieElement, Error> {
    check_order(n, MAX_ORDER)?;
    let need = n - 1;
    let x: GlElement = (1..=need).map(|m| (Forest::dots(m), factorial(m).recip())).collect();
    let dot = PreLieElement::single(Tree::leaf());
    let mut out = PreLieElement::zero();
    let mut power = gl_unit();
    let mut pick = |_: &Forest| 0;
    let mut cache = ActionCache::new(&mut pick);
    for k in 1..=n {
        let part = power.filter(|f| f.degree() == need);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let weight = Rational::new(sign, k as i64);
        out.add_scaled(&cache.action_linear(&part, &dot), &weight);
        power = gl_product_truncated(&power, &x, need);
    }
    Ok(out.filter(|t| t.degree() == n))
}
