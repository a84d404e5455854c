//! Classical Magnus recursion on a Taylor-expanded coefficient matrix.
//!
//! With `t = t_c + h·u`, the integrand `h·A(t)` becomes `Σ_i q_{i+1} u^i`
//! where `q_{i+1} = a_i h^{i+1}` and `a_i` are the Taylor coefficients at
//! `t_c`. Each `Ω_n(u)` is kept as a Lie series whose coefficients are exact
//! polynomials in `u`; the q-letter `q_i` has weight `i`, which equals its
//! power of `h`, so truncating the weight truncates the `h`-order.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::exact::{bernoulli_weight, Rational};
use crate::freelie::lyndon::{bracket_basis, LieElement, LyndonWord};
use crate::Error;

/// Dense polynomial in `u` with exact coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Default)]
struct UPoly(Vec<Rational>);

impl UPoly {
    fn monomial(deg: usize) -> Self {
        let mut c = vec![Rational::zero(); deg + 1];
        c[deg] = Rational::one();
        UPoly(c)
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Rational::is_zero) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    fn add_scaled(&mut self, other: &UPoly, s: &Rational) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), Rational::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += &(b * s);
        }
    }

    fn mul(&self, other: &UPoly) -> UPoly {
        if self.0.is_empty() || other.0.is_empty() {
            return UPoly::default();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UPoly(out).trim()
    }

    fn eval(&self, u: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| &(&acc * u) + c)
    }

    /// `∫_{lo}^{u} p(s) ds` as a polynomial in `u`.
    fn integral_from(&self, lo: &Rational) -> UPoly {
        let mut out = vec![Rational::zero()];
        for (i, c) in self.0.iter().enumerate() {
            out.push(c * &Rational::new(1, i as i64 + 1));
        }
        let mut p = UPoly(out);
        let at_lo = p.eval(lo);
        p.0[0] -= &at_lo;
        p.trim()
    }
}

/// Lie series with polynomial coefficients, truncated in weight.
#[derive(Clone, Debug, Default)]
struct Series(BTreeMap<LyndonWord, UPoly>);

impl Series {
    fn add_scaled(&mut self, other: &Series, s: &Rational) {
        for (w, p) in &other.0 {
            let slot = self.0.entry(w.clone()).or_default();
            slot.add_scaled(p, s);
            if slot.is_zero() {
                self.0.remove(w);
            }
        }
    }

    fn bracket(&self, other: &Series, cap: usize) -> Series {
        let mut out = Series::default();
        for (w, p) in &self.0 {
            for (v, r) in &other.0 {
                if w.degree() + v.degree() > cap {
                    continue;
                }
                let coeff = p.mul(r);
                if coeff.is_zero() {
                    continue;
                }
                for (b, c) in bracket_basis(w, v).iter() {
                    let mut term = Series::default();
                    term.0.insert(b.clone(), coeff.clone());
                    out.add_scaled(&term, c);
                }
            }
        }
        out
    }

    fn integral_from(&self, lo: &Rational) -> Series {
        Series(self.0.iter().map(|(w, p)| (w.clone(), p.integral_from(lo))).filter(|(_, p)| !p.is_zero()).collect())
    }

    fn eval(&self, u: &Rational) -> LieElement {
        self.0.iter().map(|(w, p)| (w.clone(), p.eval(u))).collect()
    }
}

/// Where the Taylor expansion of `A` is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionPoint {
    /// Centre of the step, integration over `u ∈ [−1/2, 1/2]`.
    Midpoint,
    /// Left end of the step, integration over `u ∈ [0, 1]`.
    Left,
}

impl ExpansionPoint {
    fn limits(self) -> (Rational, Rational) {
        match self {
            ExpansionPoint::Midpoint => (Rational::new(-1, 2), Rational::new(1, 2)),
            ExpansionPoint::Left => (Rational::zero(), Rational::one()),
        }
    }
}

/// `Ω_1 … Ω_k` over one step, in the q-letters, truncated at weight `degree_cap`.
pub fn classical_magnus_all(k: usize, degree_cap: usize, point: ExpansionPoint) -> Result<Vec<LieElement>, Error> {
    if k == 0 {
        return Err(Error::InvalidOrder { order: k, reason: "must be positive".into() });
    }
    if degree_cap == 0 {
        return Err(Error::InvalidArgument("degree cap must be positive".into()));
    }
    let (lo, hi) = point.limits();
    let mut a = Series::default();
    for i in 1..=degree_cap {
        a.0.insert(LyndonWord::letter(i as u32), UPoly::monomial(i - 1));
    }
    // omega[n], s[n][j] for 1 ≤ j ≤ n−1
    let mut omega: Vec<Series> = vec![Series::default(), a.integral_from(&lo)];
    let mut s: Vec<Vec<Series>> = vec![Vec::new(), Vec::new()];
    for n in 2..=k {
        let mut row = vec![Series::default(); n];
        row[1] = omega[n - 1].bracket(&a, degree_cap);
        for j in 2..n {
            let mut acc = Series::default();
            for m in 1..=(n - j) {
                acc.add_scaled(&omega[m].bracket(&s[n - m][j - 1], degree_cap), &Rational::one());
            }
            row[j] = acc;
        }
        let mut next = Series::default();
        for (j, sj) in row.iter().enumerate().skip(1) {
            next.add_scaled(&sj.integral_from(&lo), &bernoulli_weight(j));
        }
        s.push(row);
        omega.push(next);
    }
    Ok(omega.iter().skip(1).map(|o| o.eval(&hi)).collect())
}

/// `Ω_k` for the Taylor expansion at the step midpoint.
pub fn classical_magnus_midpoint(k: usize, degree_cap: usize) -> Result<LieElement, Error> {
    Ok(classical_magnus_all(k, degree_cap, ExpansionPoint::Midpoint)?.pop().expect("k ≥ 1"))
}
