//! Double-precision Magnus integrator for `Ẏ = A(t) Y`.
//!
//! Each step samples `A` on the step, recovers the scaled Taylor data
//! `q_i = a_{i−1} h^i` about the midpoint, evaluates the exact commutator
//! table produced by [`classical_magnus_all`] on those matrices and
//! advances with the matrix exponential.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact::Rational;
use crate::freelie::{classical_magnus_all, ExpansionPoint, LieElement, LyndonWord};
use crate::Error;

pub type Matrix = DMatrix<f64>;

/// Half-width, in nodes, of the interpolation stencil.
const STENCIL_HALF: usize = 4;
const STENCIL: usize = 2 * STENCIL_HALF + 1;

/// `W[i][j]`: coefficient of `s^i` in the Lagrange polynomial of node `j`,
/// nodes `s_j = (j − M) / 2M` spanning `[−1/2, 1/2]`.
fn stencil_weights() -> &'static [[f64; STENCIL]; STENCIL] {
    static W: OnceLock<[[f64; STENCIL]; STENCIL]> = OnceLock::new();
    W.get_or_init(|| {
        let m = STENCIL_HALF as i64;
        let nodes: Vec<Rational> = (-m..=m).map(|j| Rational::new(j, 2 * m)).collect();
        let mut w = [[0.0; STENCIL]; STENCIL];
        for (j, sj) in nodes.iter().enumerate() {
            let mut poly = vec![Rational::one()];
            let mut denom = Rational::one();
            for (k, sk) in nodes.iter().enumerate() {
                if k == j {
                    continue;
                }
                // poly *= (s − s_k)
                let mut next = vec![Rational::zero(); poly.len() + 1];
                for (i, c) in poly.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= &(c * sk);
                }
                poly = next;
                denom *= &(sj - sk);
            }
            for (i, c) in poly.iter().enumerate() {
                w[i][j] = (c / &denom).to_f64();
            }
        }
        w
    })
}

fn check_finite(m: &Matrix, what: &str) -> Result<(), Error> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Taylor data of `A` about a step midpoint.
#[derive(Clone, Debug)]
pub struct TaylorData {
    /// `a_i = A^{(i)}(t_mid) / i!`.
    pub a: Vec<Matrix>,
    /// `q_{i+1} = a_i h^{i+1}`.
    pub q: Vec<Matrix>,
}

/// Estimate `a_0 … a_{count−1}` from samples of `A` on `[t_mid − h/2, t_mid + h/2]`
/// by polynomial interpolation on a fixed equispaced stencil.
pub fn taylor_coeffs_midpoint(
    a: &dyn Fn(f64) -> Matrix,
    t_mid: f64,
    count: usize,
    h: f64,
) -> Result<TaylorData, Error> {
    if count == 0 || count > STENCIL - 2 {
        return Err(Error::InvalidArgument(format!("count must be in 1..={}", STENCIL - 2)));
    }
    if !(h > 0.0 && h.is_finite()) || !t_mid.is_finite() {
        return Err(Error::InvalidArgument(format!("bad step {h} at {t_mid}")));
    }
    let m = STENCIL_HALF as f64;
    let samples = (0..STENCIL)
        .map(|j| {
            let t = t_mid + h * (j as f64 - m) / (2.0 * m);
            let s = a(t);
            check_finite(&s, &format!("A({t})")).map(|_| s)
        })
        .collect::<Result<Vec<Matrix>, Error>>()?;
    let d = samples[0].nrows();
    for s in &samples {
        if s.nrows() != d || s.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: s.nrows().max(s.ncols()) });
        }
    }
    let w = stencil_weights();
    let mut out = TaylorData { a: Vec::with_capacity(count), q: Vec::with_capacity(count) };
    for (i, row) in w.iter().enumerate().take(count) {
        // c_i = a_i h^i
        let mut c = Matrix::zeros(d, d);
        for (wj, s) in row.iter().zip(&samples) {
            c += s * *wj;
        }
        out.a.push(&c / h.powi(i as i32));
        out.q.push(c * h);
    }
    Ok(out)
}

/// `Σ_k Ω_k` over one step, truncated at `h`-order `order`.
pub fn omega_table(order: usize) -> Result<LieElement, Error> {
    static TABLES: OnceLock<std::sync::Mutex<HashMap<usize, LieElement>>> = OnceLock::new();
    if !(1..=STENCIL - 2).contains(&order) {
        return Err(Error::InvalidOrder { order, reason: format!("supported orders are 1..={}", STENCIL - 2) });
    }
    let tables = TABLES.get_or_init(Default::default);
    if let Some(hit) = tables.lock().unwrap_or_else(|e| e.into_inner()).get(&order) {
        return Ok(hit.clone());
    }
    let mut sum = LieElement::zero();
    for omega in classical_magnus_all(order, order, ExpansionPoint::Midpoint)? {
        sum = &sum + &omega;
    }
    tables.lock().unwrap_or_else(|e| e.into_inner()).insert(order, sum.clone());
    Ok(sum)
}

fn eval_word(w: &LyndonWord, q: &[Matrix], memo: &mut HashMap<LyndonWord, Matrix>) -> Matrix {
    if let Some(hit) = memo.get(w) {
        return hit.clone();
    }
    let out = match w.standard_factorization() {
        None => q[w.letters()[0] as usize - 1].clone(),
        Some((u, v)) => {
            let (x, y) = (eval_word(&u, q, memo), eval_word(&v, q, memo));
            &x * &y - &y * &x
        }
    };
    memo.insert(w.clone(), out.clone());
    out
}

/// Substitute `q_1, q_2, …` into a Lie element in the q-letters.
pub fn eval_lie(x: &LieElement, q: &[Matrix]) -> Result<Matrix, Error> {
    let d = q.first().map(Matrix::nrows).ok_or_else(|| Error::InvalidArgument("no q matrices".into()))?;
    for m in q {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: m.nrows().max(m.ncols()) });
        }
    }
    let needed = x.keys().flat_map(|w| w.letters().iter().copied()).max().unwrap_or(0) as usize;
    if needed > q.len() {
        return Err(Error::InvalidArgument(format!("need q_1..q_{needed}, got {}", q.len())));
    }
    let mut memo = HashMap::new();
    let mut out = Matrix::zeros(d, d);
    for (w, c) in x.iter() {
        out += eval_word(w, q, &mut memo) * c.to_f64();
    }
    Ok(out)
}

/// The truncated Magnus exponent for one step from `q_1 … q_order`.
pub fn omega_step(q: &[Matrix], order: usize) -> Result<Matrix, Error> {
    eval_lie(&omega_table(order)?, q)
}

pub fn expm(m: &Matrix) -> Result<Matrix, Error> {
    check_finite(m, "expm argument")?;
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    let out = m.exp();
    check_finite(&out, "expm overflow")?;
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct IntegratorConfig {
    pub order: usize,
    pub steps: usize,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Matrix>,
}

impl Trajectory {
    pub fn last(&self) -> &Matrix {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Integrate `Ẏ = A(t) Y`, `Y(t0) = I`.
pub fn integrate(a: &dyn Fn(f64) -> Matrix, config: &IntegratorConfig) -> Result<Trajectory, Error> {
    if ![2, 4, 6].contains(&config.order) {
        return Err(Error::InvalidOrder { order: config.order, reason: "integrator orders are 2, 4 and 6".into() });
    }
    if config.steps == 0 || config.t1.partial_cmp(&config.t0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidArgument("need steps ≥ 1 and t1 > t0".into()));
    }
    let h = (config.t1 - config.t0) / config.steps as f64;
    let d = a(config.t0).nrows();
    let mut y = Matrix::identity(d, d);
    let mut out = Trajectory { times: vec![config.t0], states: vec![y.clone()] };
    for n in 0..config.steps {
        let t = config.t0 + n as f64 * h;
        let data = taylor_coeffs_midpoint(a, t + h / 2.0, config.order, h)?;
        let omega = omega_step(&data.q, config.order)?;
        y = expm(&omega)? * y;
        out.times.push(t + h);
        out.states.push(y.clone());
    }
    Ok(out)
}

/// Classical fourth-order Runge–Kutta, used as an independent reference.
pub fn rk4(a: &dyn Fn(f64) -> Matrix, t0: f64, t1: f64, steps: usize) -> Matrix {
    let h = (t1 - t0) / steps as f64;
    let d = a(t0).nrows();
    let mut y = Matrix::identity(d, d);
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let am = a(t + h / 2.0);
        let k1 = a(t) * &y;
        let k2 = &am * (&y + &k1 * (h / 2.0));
        let k3 = &am * (&y + &k2 * (h / 2.0));
        let k4 = a(t + h) * (&y + &k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    y
}

/// Named test problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    /// `A = [[0, 1], [−2, −0.3]]`.
    Constant,
    /// `A = ω(t)[[0, 1], [−1, 0]]`, `ω(t) = 1 + t`.
    Rotation,
    /// `A = [[t, 1], [0, −t]]`.
    NonCommuting,
    /// `A = [[0, 1], [−t, 0]]`.
    Airy,
}

impl Problem {
    pub const ALL: [Problem; 4] = [Problem::Constant, Problem::Rotation, Problem::NonCommuting, Problem::Airy];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Constant => "constant",
            Problem::Rotation => "rotation",
            Problem::NonCommuting => "non-commuting",
            Problem::Airy => "airy",
        }
    }

    pub fn from_name(name: &str) -> Option<Problem> {
        Problem::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn matrix(self, t: f64) -> Matrix {
        let v = match self {
            Problem::Constant => [0.0, 1.0, -2.0, -0.3],
            Problem::Rotation => [0.0, 1.0 + t, -(1.0 + t), 0.0],
            Problem::NonCommuting => [t, 1.0, 0.0, -t],
            Problem::Airy => [0.0, 1.0, -t, 0.0],
        };
        Matrix::from_row_slice(2, 2, &v)
    }

    /// Closed-form `Y(t)` from `Y(0) = I` where one is available.
    pub fn exact(self, t: f64) -> Option<Matrix> {
        match self {
            Problem::Constant => Some((self.matrix(0.0) * t).exp()),
            Problem::Rotation => {
                let theta = t + t * t / 2.0;
                let (s, c) = theta.sin_cos();
                Some(Matrix::from_row_slice(2, 2, &[c, s, -s, c]))
            }
            _ => None,
        }
    }

    /// Exact solution, or a fine RK4 solve.
    pub fn reference(self, t: f64) -> Matrix {
        self.exact(t).unwrap_or_else(|| rk4(&|s| self.matrix(s), 0.0, t, 20_000))
    }
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest entry of `Y_h(t1) − Y_ref(t1)`.
pub fn global_error(problem: Problem, order: usize, steps: usize, t1: f64) -> Result<f64, Error> {
    let a = |t: f64| problem.matrix(t);
    let traj = integrate(&a, &IntegratorConfig { order, steps, t0: 0.0, t1 })?;
    Ok(max_abs(&(traj.last() - problem.reference(t1))))
}

/// `log2(err(h) / err(h/2))` for `steps, 2·steps, …` (`halvings` ratios).
pub fn convergence_slopes(
    problem: Problem,
    order: usize,
    steps: usize,
    halvings: usize,
    t1: f64,
) -> Result<Vec<f64>, Error> {
    let errs =
        (0..=halvings).map(|k| global_error(problem, order, steps << k, t1)).collect::<Result<Vec<f64>, Error>>()?;
    Ok(errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// Polynomial with matrix coefficients, lowest degree first.
type MatPoly = Vec<Matrix>;

fn poly_mul(x: &MatPoly, y: &MatPoly) -> MatPoly {
    let d = x[0].nrows();
    let mut out = vec![Matrix::zeros(d, d); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_sub(x: &MatPoly, y: &MatPoly) -> MatPoly {
    let d = x[0].nrows();
    (0..x.len().max(y.len()))
        .map(|i| {
            let a = x.get(i).cloned().unwrap_or_else(|| Matrix::zeros(d, d));
            let b = y.get(i).cloned().unwrap_or_else(|| Matrix::zeros(d, d));
            a - b
        })
        .collect()
}

/// `(A ▷ B)(x) = [∫₀ˣ A(s) ds, B(x)]`.
fn poly_prelie(x: &MatPoly, y: &MatPoly) -> MatPoly {
    let d = x[0].nrows();
    let mut integral = vec![Matrix::zeros(d, d)];
    integral.extend(x.iter().enumerate().map(|(i, c)| c / (i as f64 + 1.0)));
    poly_sub(&poly_mul(&integral, y), &poly_mul(y, &integral))
}

fn poly_eval(p: &MatPoly, x: f64) -> Matrix {
    p.iter().rev().fold(Matrix::zeros(p[0].nrows(), p[0].nrows()), |acc, c| acc * x + c)
}

/// Pre-Lie associator `(A▷B)▷C − A▷(B▷C) − (B▷A)▷C + B▷(A▷C)` evaluated at `x`.
pub fn matrix_prelie_residual(a: &[Matrix], b: &[Matrix], c: &[Matrix], x: f64) -> f64 {
    let (a, b, c) = (a.to_vec(), b.to_vec(), c.to_vec());
    let lhs = poly_sub(&poly_prelie(&poly_prelie(&a, &b), &c), &poly_prelie(&a, &poly_prelie(&b, &c)));
    let rhs = poly_sub(&poly_prelie(&poly_prelie(&b, &a), &c), &poly_prelie(&b, &poly_prelie(&a, &c)));
    max_abs(&poly_eval(&poly_sub(&lhs, &rhs), x))
}

/// Largest associator residual over `samples` random triples of 3×3
/// polynomial matrices of the given degree, evaluated at random `x ∈ [−1, 1]`.
pub fn lemma1_numeric_check(samples: usize, degree: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly = |rng: &mut ChaCha8Rng| -> MatPoly {
        (0..=degree).map(|_| Matrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0))).collect()
    };
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let (a, b, c) = (poly(&mut rng), poly(&mut rng), poly(&mut rng));
        let x = rng.random_range(-1.0..1.0);
        worst = worst.max(matrix_prelie_residual(&a, &b, &c, x));
    }
    worst
}
