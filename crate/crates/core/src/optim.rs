//! Small dense optimizers: BFGS with backtracking, damped Newton for square
//! systems, and Levenberg–Marquardt over an arbitrary parameter state.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug)]
pub struct BfgsOptions {
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions { grad_tol: 1e-10, max_iter: 500 }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Projection applied to each accepted iterate.
pub type Retraction<'a> = &'a dyn Fn(&mut [f64]);

/// Minimizes `f` (returning value and gradient) by BFGS with Armijo
/// backtracking. `retract`, when given, maps each accepted iterate back onto
/// the feasible set; `f` should then be invariant under it.
pub fn bfgs<F>(mut f: F, x0: &[f64], opts: BfgsOptions, retract: Option<Retraction<'_>>) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    if let Some(r) = retract {
        r(&mut x);
    }
    let (mut fx, mut g) = f(&x);
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if norm(&g) <= opts.grad_tol {
            break;
        }
        iterations += 1;
        let gv = DVector::from_column_slice(&g);
        let mut p: Vec<f64> = (-(&h * &gv)).iter().copied().collect();
        let mut slope = dot(&p, &g);
        if slope >= 0.0 {
            h = DMatrix::identity(n, n);
            fresh = true;
            p = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            if let Some(r) = retract {
                r(&mut xn);
            }
            let (fnew, gnew) = f(&xn);
            if fnew <= fx + 1e-4 * alpha * slope {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            if fresh {
                break;
            }
            h = DMatrix::identity(n, n);
            fresh = true;
            continue;
        };
        let s = DVector::from_iterator(n, xn.iter().zip(&x).map(|(a, b)| a - b));
        let y = DVector::from_iterator(n, gnew.iter().zip(&g).map(|(a, b)| a - b));
        let sy = s.dot(&y);
        if sy > 1e-16 * s.norm() * y.norm() && sy > 0.0 {
            if fresh {
                h = DMatrix::identity(n, n) * (sy / y.dot(&y));
                fresh = false;
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            h += (&s * s.transpose()) * (rho * rho * yhy + rho) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        let stalled = (fx - fnew).abs() <= f64::EPSILON * fx.abs().max(f64::MIN_POSITIVE) && s.norm() < 1e-15;
        x = xn;
        fx = fnew;
        g = gnew;
        if stalled {
            break;
        }
    }
    let grad_norm = norm(&g);
    Minimum { x, value: fx, grad_norm, iterations, converged: grad_norm <= opts.grad_tol }
}

/// Least-squares solution of `J δ = r` via SVD, discarding singular values
/// below `1e-12 × σ_max`.
pub fn pseudo_solve(j: &DMatrix<f64>, r: &[f64]) -> Vec<f64> {
    let svd = j.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = 1e-12 * smax.max(f64::MIN_POSITIVE);
    let rv = DVector::from_column_slice(r);
    svd.solve(&rv, tol).map(|v| v.iter().copied().collect()).unwrap_or_else(|_| vec![0.0; j.ncols()])
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-12, max_iter: 100 }
    }
}

#[derive(Clone, Debug)]
pub struct Root {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton for `F(x) = 0`: full steps from an SVD pseudo-inverse,
/// halved until `‖F‖` decreases. Stops when `‖F‖ ≤ tol` or progress stalls.
pub fn damped_newton<F>(mut eval: F, x0: &[f64], opts: NewtonOptions) -> Root
where
    F: FnMut(&[f64]) -> (Vec<f64>, DMatrix<f64>),
{
    let mut x = x0.to_vec();
    let (mut fx, mut jx) = eval(&x);
    let mut res = norm(&fx);
    let mut iterations = 0;
    while res > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let delta = pseudo_solve(&jx, &fx);
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a - t * d).collect();
            let (fn_, jn) = eval(&xn);
            let rn = norm(&fn_);
            if rn.is_finite() && rn < res {
                x = xn;
                fx = fn_;
                jx = jn;
                res = rn;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Root { x, residual: res, iterations }
}

#[derive(Clone, Copy, Debug)]
pub struct LmOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { tol: 1e-14, max_iter: 300 }
    }
}

#[derive(Clone, Debug)]
pub struct LmResult<S> {
    pub state: S,
    pub residual: f64,
    pub iterations: usize,
}

/// Levenberg–Marquardt on a nonlinear least-squares problem whose
/// parameters live in `S`. `eval` returns the residual vector and its
/// Jacobian with respect to a local step `δ`; `step` applies `δ` to a state.
pub fn levenberg_marquardt<S, E, T>(state: S, mut eval: E, step: T, opts: LmOptions) -> LmResult<S>
where
    S: Clone,
    E: FnMut(&S) -> (Vec<f64>, DMatrix<f64>),
    T: Fn(&S, &[f64]) -> S,
{
    let mut s = state;
    let (mut r, mut j) = eval(&s);
    let mut cost = dot(&r, &r);
    let mut mu = 1e-3;
    let mut iterations = 0;
    while cost.sqrt() > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let jt = j.transpose();
        let jtj = &jt * &j;
        let jtr = &jt * DVector::from_column_slice(&r);
        let scale = jtj.diagonal().max().max(1e-300);
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..a.nrows() {
                a[(k, k)] += mu * scale;
            }
            let Some(delta) = a.cholesky().map(|c| c.solve(&jtr)) else {
                mu *= 10.0;
                continue;
            };
            let delta: Vec<f64> = delta.iter().map(|v| -v).collect();
            let sn = step(&s, &delta);
            let (rn, jn) = eval(&sn);
            let cn = dot(&rn, &rn);
            if cn < cost {
                s = sn;
                r = rn;
                j = jn;
                cost = cn;
                mu = (mu / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    LmResult { state: s, residual: cost.sqrt(), iterations }
}
