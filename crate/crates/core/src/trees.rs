//! Planar and non-planar rooted trees.
//!
//! Both kinds share one text form: an undecorated vertex is `o`, a vertex
//! decorated by the generator `a_i` is `a<i>`, and a vertex with children is
//! followed by the comma-separated children in parentheses, e.g. `o(o(o),o)`
//! or `a1(a2)`. A [`PlanarTree`] prints its children in stored order, a
//! [`Tree`] in ascending order of their own text forms, which makes the text
//! form a canonical key for non-planar trees.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::Error;

/// Generator index of a decorated vertex; `None` for an undecorated one.
pub type Label = Option<u32>;

fn label_weight(label: Label) -> usize {
    label.map_or(1, |i| i as usize)
}

fn write_label(out: &mut String, label: Label) {
    match label {
        None => out.push('o'),
        Some(i) => {
            out.push('a');
            out.push_str(&i.to_string());
        }
    }
}

/// Rooted tree whose children are ordered.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlanarTree {
    pub label: Label,
    pub children: Vec<PlanarTree>,
}

impl PlanarTree {
    /// The single undecorated vertex.
    pub fn leaf() -> Self {
        PlanarTree { label: None, children: Vec::new() }
    }

    pub fn decorated_leaf(index: u32) -> Self {
        PlanarTree { label: Some(index), children: Vec::new() }
    }

    pub fn with_label(label: Label, children: Vec<PlanarTree>) -> Self {
        PlanarTree { label, children }
    }

    /// Undecorated ladder (path) with `n >= 1` vertices.
    pub fn ladder(n: usize) -> Self {
        assert!(n >= 1);
        (1..n).fold(Self::leaf(), |t, _| b_plus(vec![t]))
    }

    /// Number of vertices.
    pub fn degree(&self) -> usize {
        1 + self.children.iter().map(PlanarTree::degree).sum::<usize>()
    }

    /// Sum of the generator weights `|a_i| = i`; undecorated vertices count 1.
    pub fn decorated_degree(&self) -> usize {
        label_weight(self.label) + self.children.iter().map(PlanarTree::decorated_degree).sum::<usize>()
    }

    pub fn fertility(&self) -> usize {
        self.children.len()
    }

    /// Fertilities of all vertices in preorder.
    pub fn fertilities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(&mut |t| out.push(t.fertility()));
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a PlanarTree)) {
        f(self);
        for c in &self.children {
            c.visit(f);
        }
    }

    /// No vertex has odd fertility greater than one.
    pub fn is_e1(&self) -> bool {
        self.fertilities().into_iter().all(|f| f == 1 || f % 2 == 0)
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.visit(&mut |t| out.push(t.label));
        out
    }

    pub fn is_decorated(&self) -> bool {
        self.labels().iter().all(Option::is_some)
    }

    /// Forget the decoration.
    pub fn undecorated(&self) -> PlanarTree {
        PlanarTree { label: None, children: self.children.iter().map(PlanarTree::undecorated).collect() }
    }

    /// Split `B+(t1 t2 ... tk)` into `(t1, B+(t2 ... tk))`, keeping the root
    /// decoration on the second part. `None` for a single vertex.
    pub fn split_left(&self) -> Option<(&PlanarTree, PlanarTree)> {
        let (first, rest) = self.children.split_first()?;
        Some((first, PlanarTree { label: self.label, children: rest.to_vec() }))
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut String) {
        write_label(out, self.label);
        if !self.children.is_empty() {
            out.push('(');
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.write_to(out);
            }
            out.push(')');
        }
    }
}

impl fmt::Display for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl fmt::Debug for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl PartialOrd for PlanarTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PlanarTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.serialize().cmp(&other.serialize())
    }
}

impl FromStr for PlanarTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { bytes: s.as_bytes(), pos: 0 };
        let t = p.tree()?;
        if p.pos != p.bytes.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {} of {:?}", self.pos, String::from_utf8_lossy(self.bytes)))
    }

    fn tree(&mut self) -> Result<PlanarTree, Error> {
        let label = match self.bytes.get(self.pos) {
            Some(b'o') => {
                self.pos += 1;
                None
            }
            Some(b'a') => {
                self.pos += 1;
                let start = self.pos;
                while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("");
                let i: u32 = digits.parse().map_err(|_| self.error("expected generator index"))?;
                if i == 0 {
                    return Err(self.error("generator indices start at 1"));
                }
                Some(i)
            }
            _ => return Err(self.error("expected 'o' or 'a<i>'")),
        };
        let mut children = Vec::new();
        if self.bytes.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            loop {
                children.push(self.tree()?);
                match self.bytes.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected ',' or ')'")),
                }
            }
        }
        Ok(PlanarTree { label, children })
    }
}

/// Graft a sequence of trees onto a new undecorated root.
pub fn b_plus(children: Vec<PlanarTree>) -> PlanarTree {
    PlanarTree { label: None, children }
}

/// Left Butcher product: `t1` becomes the new leftmost branch of the root of `t2`.
pub fn left_butcher(t1: &PlanarTree, t2: &PlanarTree) -> PlanarTree {
    let mut children = Vec::with_capacity(t2.children.len() + 1);
    children.push(t1.clone());
    children.extend(t2.children.iter().cloned());
    PlanarTree { label: t2.label, children }
}

/// Non-planar rooted tree. Children are kept sorted by their text form,
/// which is cached so comparisons stay cheap.
#[derive(Clone)]
pub struct Tree {
    label: Label,
    children: Vec<Tree>,
    key: String,
    degree: usize,
    weight: usize,
}

impl Tree {
    pub fn new(label: Label, mut children: Vec<Tree>) -> Self {
        children.sort();
        let mut key = String::new();
        write_label(&mut key, label);
        if !children.is_empty() {
            key.push('(');
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    key.push(',');
                }
                key.push_str(&c.key);
            }
            key.push(')');
        }
        let degree = 1 + children.iter().map(|c| c.degree).sum::<usize>();
        let weight = label_weight(label) + children.iter().map(|c| c.weight).sum::<usize>();
        Tree { label, children, key, degree, weight }
    }

    pub fn leaf() -> Self {
        Tree::new(None, Vec::new())
    }

    pub fn decorated_leaf(index: u32) -> Self {
        Tree::new(Some(index), Vec::new())
    }

    pub fn ladder(n: usize) -> Self {
        canonicalize(&PlanarTree::ladder(n))
    }

    /// Undecorated star: a root with `k` leaves.
    pub fn star(k: usize) -> Self {
        Tree::new(None, vec![Tree::leaf(); k])
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    /// Number of vertices.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Sum of generator weights; undecorated vertices count 1.
    pub fn decorated_degree(&self) -> usize {
        self.weight
    }

    pub fn as_str(&self) -> &str {
        &self.key
    }

    /// A planar representative with children in canonical order.
    pub fn to_planar(&self) -> PlanarTree {
        PlanarTree { label: self.label, children: self.children.iter().map(Tree::to_planar).collect() }
    }

    /// Attach `s` as a new child of the vertex with preorder index `at`.
    pub(crate) fn attach_at(&self, s: &Tree, at: usize) -> Tree {
        fn go(t: &Tree, s: &Tree, at: &mut usize) -> Option<Tree> {
            if *at == 0 {
                let mut ch = t.children.clone();
                ch.push(s.clone());
                return Some(Tree::new(t.label, ch));
            }
            *at -= 1;
            for (i, c) in t.children.iter().enumerate() {
                if *at < c.degree {
                    let new_child = go(c, s, at)?;
                    let mut ch = t.children.clone();
                    ch[i] = new_child;
                    return Some(Tree::new(t.label, ch));
                }
                *at -= c.degree;
            }
            None
        }
        let mut at = at;
        go(self, s, &mut at).expect("vertex index out of range")
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Tree {}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

impl FromStr for Tree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(canonicalize(&s.parse::<PlanarTree>()?))
    }
}

/// Forget the planar structure.
pub fn canonicalize(t: &PlanarTree) -> Tree {
    Tree::new(t.label, t.children.iter().map(canonicalize).collect())
}

/// All ordered sequences of planar trees with `m` vertices in total.
fn planar_forests(m: usize, memo: &mut Vec<Option<Vec<Vec<PlanarTree>>>>) -> Vec<Vec<PlanarTree>> {
    if let Some(Some(v)) = memo.get(m) {
        return v.clone();
    }
    let mut out = Vec::new();
    if m == 0 {
        out.push(Vec::new());
    } else {
        for first in 1..=m {
            let heads = planar_forests(first - 1, memo);
            let tails = planar_forests(m - first, memo);
            for h in &heads {
                let head = b_plus(h.clone());
                for t in &tails {
                    let mut seq = Vec::with_capacity(t.len() + 1);
                    seq.push(head.clone());
                    seq.extend(t.iter().cloned());
                    out.push(seq);
                }
            }
        }
    }
    if memo.len() <= m {
        memo.resize(m + 1, None);
    }
    memo[m] = Some(out.clone());
    out
}

/// All undecorated planar rooted trees with `n` vertices, sorted by text form.
pub fn enumerate_planar(n: usize) -> Result<Vec<PlanarTree>, Error> {
    if n == 0 {
        return Err(Error::InvalidOrder { order: n, reason: "trees have at least one vertex".into() });
    }
    let mut memo = Vec::new();
    let mut out: Vec<PlanarTree> = planar_forests(n - 1, &mut memo).into_iter().map(b_plus).collect();
    out.sort();
    Ok(out)
}

/// Planar trees with `n` vertices in which every fertility is 0, 1 or even.
pub fn enumerate_e1(n: usize) -> Result<Vec<PlanarTree>, Error> {
    Ok(enumerate_planar(n)?.into_iter().filter(PlanarTree::is_e1).collect())
}

/// Every decoration of the vertices of `t` by generators `a_1..a_{e_max}`
/// whose total weight is at most `degree_cap`.
pub fn decorate_all(t: &PlanarTree, e_max: u32, degree_cap: usize) -> Vec<PlanarTree> {
    fn go(t: &PlanarTree, e_max: u32, budget: usize, reserve: usize) -> Vec<(PlanarTree, usize)> {
        // `reserve` = vertices still to be decorated after this subtree
        let own = t.degree();
        let mut out = Vec::new();
        for i in 1..=e_max {
            let i_us = i as usize;
            if i_us + (own - 1) + reserve > budget {
                break;
            }
            let mut partial: Vec<(Vec<PlanarTree>, usize)> = vec![(Vec::new(), i_us)];
            let mut left = own - 1;
            for c in &t.children {
                left -= c.degree();
                let mut next = Vec::new();
                for (done, used) in &partial {
                    for (dc, w) in go(c, e_max, budget - used, left + reserve) {
                        let mut v = done.clone();
                        v.push(dc);
                        next.push((v, used + w));
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|(children, used)| (PlanarTree { label: Some(i), children }, used)));
        }
        out
    }
    if t.degree() > degree_cap {
        return Vec::new();
    }
    go(t, e_max, degree_cap, 0).into_iter().map(|(d, _)| d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PlanarTree {
        s.parse().unwrap()
    }

    fn catalan(n: usize) -> usize {
        (0..n).fold(1usize, |c, k| c * 2 * (2 * k + 1) / (k + 2))
    }

    #[test]
    fn b_plus_examples() {
        assert_eq!(b_plus(vec![]).to_string(), "o");
        assert_eq!(b_plus(vec![PlanarTree::leaf()]).to_string(), "o(o)");
        let cherry = b_plus(vec![PlanarTree::leaf(), PlanarTree::leaf()]);
        assert_eq!(cherry.to_string(), "o(o,o)");
        assert_eq!(cherry.degree(), 3);
    }

    #[test]
    fn left_butcher_examples() {
        let dot = PlanarTree::leaf();
        assert_eq!(left_butcher(&dot, &dot), PlanarTree::ladder(2));
        assert_eq!(left_butcher(&dot, &left_butcher(&dot, &dot)), p("o(o,o)"));
        assert_eq!(left_butcher(&PlanarTree::ladder(2), &dot), PlanarTree::ladder(3));
        assert_eq!(left_butcher(&p("a1"), &p("a2(a3)")), p("a2(a1,a3)"));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(&p("o(o(o),o)")), canonicalize(&p("o(o,o(o))")));
        assert_eq!(canonicalize(&p("o")).as_str(), "o");
        assert_eq!(canonicalize(&PlanarTree::ladder(4)).as_str(), "o(o(o(o)))");
        assert_eq!(canonicalize(&p("o(o(o),o)")).as_str(), "o(o,o(o))");
        assert_eq!(canonicalize(&p("a2(a3,a1(a1))")).as_str(), "a2(a1(a1),a3)");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "x", "o(", "o()", "o(o,)", "a", "a0", "o)o", "oo"] {
            assert!(bad.parse::<PlanarTree>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn enumeration_counts() {
        assert!(matches!(enumerate_planar(0), Err(Error::InvalidOrder { .. })));
        assert!(enumerate_e1(0).is_err());
        assert_eq!(enumerate_planar(1).unwrap(), vec![PlanarTree::leaf()]);
        for n in 1..=8 {
            let all = enumerate_planar(n).unwrap();
            assert_eq!(all.len(), catalan(n - 1), "n = {n}");
            let mut dedup = all.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
            assert!(all.iter().all(|t| t.degree() == n));
        }
        assert_eq!(enumerate_planar(3).unwrap().len(), 2);
        assert_eq!(enumerate_planar(4).unwrap().len(), 5);
    }

    #[test]
    fn e1_examples() {
        let three = enumerate_e1(3).unwrap();
        assert_eq!(three, vec![p("o(o(o))"), p("o(o,o)")]);
        assert_eq!(enumerate_e1(1).unwrap(), vec![PlanarTree::leaf()]);
        let four: Vec<String> = enumerate_e1(4).unwrap().iter().map(|t| t.to_string()).collect();
        assert_eq!(four, ["o(o(o(o)))", "o(o(o),o)", "o(o(o,o))", "o(o,o(o))"]);
    }

    #[test]
    fn decorate_examples() {
        let dot = PlanarTree::leaf();
        let got: Vec<String> = decorate_all(&dot, 2, 2).iter().map(|t| t.to_string()).collect();
        assert_eq!(got, ["a1", "a2"]);
        let mut got: Vec<String> = decorate_all(&PlanarTree::ladder(2), 3, 3).iter().map(|t| t.to_string()).collect();
        got.sort();
        assert_eq!(got, ["a1(a1)", "a1(a2)", "a2(a1)"]);
        assert!(decorate_all(&dot, 1, 0).is_empty());
    }

    /// Compare against the plain product of label choices filtered by weight.
    #[test]
    fn decorate_matches_exhaustive_filter() {
        for n in 1..=4 {
            for t in enumerate_planar(n).unwrap() {
                for cap in 1..=6 {
                    let e_max = 3u32;
                    let mut expected = Vec::new();
                    let total = (e_max as usize).pow(n as u32);
                    for code in 0..total {
                        let mut c = code;
                        let mut labels = Vec::new();
                        for _ in 0..n {
                            labels.push((c % e_max as usize) as u32 + 1);
                            c /= e_max as usize;
                        }
                        if labels.iter().map(|&i| i as usize).sum::<usize>() > cap {
                            continue;
                        }
                        let mut it = labels.into_iter();
                        expected.push(relabel(&t, &mut it));
                    }
                    let mut got = decorate_all(&t, e_max, cap);
                    expected.sort();
                    got.sort();
                    assert_eq!(got, expected, "tree {t}, cap {cap}");
                }
            }
        }
    }

    fn relabel(t: &PlanarTree, labels: &mut impl Iterator<Item = u32>) -> PlanarTree {
        let label = labels.next();
        PlanarTree { label, children: t.children.iter().map(|c| relabel(c, labels)).collect() }
    }
}
