//! Dykstra's alternating projections between an affine set of Hermitian
//! Choi matrices and a closed convex cone.
//!
//! Hermitian n×n matrices are handled as vectors in ℝ^{n²} through an
//! orthonormal coordinate system (diagonal entries, then √2·Re and √2·Im of
//! the strict upper triangle), so the Euclidean geometry of the vectors is
//! the Frobenius geometry of the matrices.

use std::f64::consts::SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cpmaps::SuperOp;
use crate::densela::{psd_project_unchecked, CMatrix, C64};
use crate::error::{Error, Result};

/// Iterations over which a stalled gap is tolerated before giving up.
const STALL_WINDOW: usize = 2000;

/// Near a low-rank point of the intersection the distance to the limit runs
/// at about 3× the final gap between the two sets, so gap and step are held
/// to tol/10; the returned point then lies within tol of the limit.
const MARGIN: f64 = 0.1;

/// Iterations between attempts at an extrapolated shortcut; see [`extrapolate`].
const EXTRAPOLATE_EVERY: usize = 1000;

pub(crate) fn herm_to_vec(m: &CMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        v.push(m[(i, i)].re);
    }
    for i in 0..n {
        for j in i + 1..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            v.push(SQRT_2 * z.re);
            v.push(SQRT_2 * z.im);
        }
    }
    v
}

pub(crate) fn vec_to_herm(v: &[f64], n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(v[i], 0.0);
    }
    let mut idx = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(v[idx], v[idx + 1]) / SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            idx += 2;
        }
    }
    m
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// {x : Qx = b} with orthonormal rows Q.
#[derive(Clone, Debug)]
pub(crate) struct AffineSet {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl AffineSet {
    /// Hermitian Choi matrices C of maps on M_d with φ_C(inputs[k]) =
    /// targets[k] for every k.
    pub(crate) fn agreement(d: usize, inputs: &[CMatrix], targets: &[CMatrix]) -> Result<Self> {
        let n = d * d;
        let dim = n * n;
        let neq = 2 * d * d * inputs.len();
        // Columns of the constraint matrix: images of each coordinate matrix.
        let mut a = vec![vec![0.0; dim]; neq];
        let mut unit = vec![0.0; dim];
        for col in 0..dim {
            unit[col] = 1.0;
            let op = SuperOp::new(d, vec_to_herm(&unit, n)).expect("square Choi");
            unit[col] = 0.0;
            let mut r = 0;
            for v in inputs {
                let img = op.apply_unchecked(v);
                for z in img.data() {
                    a[r][col] = z.re;
                    a[r + 1][col] = z.im;
                    r += 2;
                }
            }
        }
        let mut b = Vec::with_capacity(neq);
        for t in targets {
            for z in t.data() {
                b.push(z.re);
                b.push(z.im);
            }
        }
        let bnorm = norm(&b);

        // Modified Gram–Schmidt on the augmented rows [a | b].
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for (mut row, mut beta) in a.into_iter().zip(b) {
            let orig = norm(&row);
            if orig == 0.0 {
                if beta.abs() > 1e-8 * (1.0 + bnorm) {
                    return Err(inconsistent(beta));
                }
                continue;
            }
            for _ in 0..2 {
                for (q, qb) in rows.iter().zip(&rhs) {
                    let c = dot(q, &row);
                    for (x, y) in row.iter_mut().zip(q) {
                        *x -= c * y;
                    }
                    beta -= c * qb;
                }
            }
            let nr = norm(&row);
            if nr <= 1e-10 * orig {
                if beta.abs() > 1e-8 * (1.0 + bnorm) {
                    return Err(inconsistent(beta));
                }
                continue;
            }
            for x in row.iter_mut() {
                *x /= nr;
            }
            rows.push(row);
            rhs.push(beta / nr);
        }
        Ok(Self { rows, rhs })
    }

    pub(crate) fn project(&self, x: &mut [f64]) {
        for (q, b) in self.rows.iter().zip(&self.rhs) {
            let c = dot(q, x) - b;
            if c != 0.0 {
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= c * qi;
                }
            }
        }
    }

    /// Removes the components of a direction that would leave the set.
    fn project_direction(&self, v: &mut [f64]) {
        for q in &self.rows {
            let c = dot(q, v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }

    pub(crate) fn residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(q, b)| (dot(q, x) - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn inconsistent(beta: f64) -> Error {
    Error::Infeasible(format!(
        "agreement constraints are inconsistent (residual {beta:.3e}); targets must be Hermitian \
         images of a Hermitian-preserving map"
    ))
}

/// Cones the solver projects onto.
#[derive(Clone, Debug)]
pub(crate) enum Cone {
    /// Positive semidefinite Choi matrices (complete positivity).
    Psd,
    /// {C : P C P ⪰ 0}, P the projector orthogonal to the maximally entangled
    /// vector. `frame` is a real orthogonal matrix whose last column is that
    /// vector.
    Ccp { frame: CMatrix },
}

impl Cone {
    pub(crate) fn ccp(d: usize) -> Self {
        Cone::Ccp {
            frame: entangled_frame(d),
        }
    }

    pub(crate) fn project(&self, m: &CMatrix) -> CMatrix {
        match self {
            Cone::Psd => psd_project_unchecked(m),
            Cone::Ccp { frame } => {
                let n = m.rows();
                let rotated = frame.adjoint().matmul(m).matmul(frame);
                let lead = rotated.block(0, 0, n - 1, n - 1);
                let mut out = rotated.clone();
                out.set_block(0, 0, &psd_project_unchecked(&lead));
                frame.matmul(&out).matmul(&frame.adjoint())
            }
        }
    }
}

/// Orthogonal n×n frame (n = d²) whose last column is Σ e_i⊗e_i/√d.
pub(crate) fn entangled_frame(d: usize) -> CMatrix {
    let n = d * d;
    let mut omega = vec![0.0; n];
    for i in 0..d {
        omega[i * d + i] = 1.0 / (d as f64).sqrt();
    }
    let mut cols: Vec<Vec<f64>> = vec![omega];
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for _ in 0..2 {
            for c in &cols {
                let p = dot(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= p * y;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            cols.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    cols.rotate_left(1);
    CMatrix::from_fn(n, n, |r, c| C64::new(cols[c][r], 0.0))
}

/// Starting point of a run.
#[derive(Clone, Debug)]
pub(crate) enum StartPoint {
    Zero,
    Matrix(CMatrix),
    Perturbed {
        base: Option<CMatrix>,
        seed: u64,
        scale: f64,
    },
}

pub(crate) struct Outcome {
    pub(crate) choi: CMatrix,
    pub(crate) iterations: usize,
    pub(crate) cone_residual: f64,
    pub(crate) affine_residual: f64,
    pub(crate) converged: bool,
    pub(crate) stalled: bool,
}

/// Hermitian matrix with i.i.d. standard normal coordinates.
pub(crate) fn gaussian_hermitian(n: usize, seed: u64, scale: f64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..n * n)
        .map(|_| {
            let x: f64 = StandardNormal.sample(&mut rng);
            scale * x
        })
        .collect();
    vec_to_herm(&v, n)
}

pub(crate) fn run(affine: &AffineSet, cone: &Cone, n: usize, start: &StartPoint, tol: f64, max_iter: usize) -> Outcome {
    let x0 = match start {
        StartPoint::Zero => CMatrix::zeros(n, n),
        StartPoint::Matrix(m) => m.hermitian_part(),
        StartPoint::Perturbed { base, seed, scale } => {
            let noise = gaussian_hermitian(n, *seed, *scale);
            match base {
                Some(b) => &b.hermitian_part() + &noise,
                None => noise,
            }
        }
    };
    let mut x = herm_to_vec(&x0);
    let mut q = vec![0.0; n * n];
    let mut prev_z: Option<Vec<f64>> = None;
    let mut y = x.clone();
    let mut stall = 0usize;
    let mut iterations = 0;
    let mut finished = false;
    let mut stalled = false;

    while iterations < max_iter {
        iterations += 1;
        y.copy_from_slice(&x);
        affine.project(&mut y);

        let yq: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        let z = herm_to_vec(&cone.project(&vec_to_herm(&yq, n)));
        for ((qi, yqi), zi) in q.iter_mut().zip(&yq).zip(&z) {
            *qi = yqi - zi;
        }
        let gap = dist(&y, &z);
        let step = dist(&z, prev_z.as_ref().unwrap_or(&y));
        prev_z = Some(z.clone());
        x = z;

        if gap <= MARGIN * tol && step <= MARGIN * tol {
            finished = true;
            break;
        }
        if iterations % EXTRAPOLATE_EVERY == 0 || iterations == max_iter {
            if let Some(found) = extrapolate(affine, cone, n, &y, MARGIN * tol) {
                y = found;
                finished = true;
                break;
            }
        }
        if step <= 1e-2 * tol && gap > 1e3 * tol {
            stall += 1;
            if stall >= STALL_WINDOW {
                stalled = true;
                break;
            }
        } else {
            stall = 0;
        }
    }

    if !finished {
        // Report the affine point of the last completed iteration.
        y.copy_from_slice(&x);
        affine.project(&mut y);
    }
    let choi = vec_to_herm(&y, n);
    let cone_residual = choi.distance(&cone.project(&choi));
    let affine_residual = affine.residual(&y);
    Outcome {
        converged: finished && cone_residual <= tol && affine_residual <= tol,
        choi,
        iterations,
        cone_residual,
        affine_residual,
        stalled,
    }
}

fn cone_gap(cone: &Cone, n: usize, v: &[f64]) -> (f64, Vec<f64>) {
    let m = vec_to_herm(v, n);
    let p = cone.project(&m);
    (m.distance(&p), herm_to_vec(&p))
}

/// Quasi-Newton descent on ½·dist(y, cone)² over the affine set, started
/// from an affine point y. Where the intersection has only a thin interior,
/// plain Dykstra crawls, while L-BFGS steps along the valley. Returns an
/// affine point within `target` of the cone, or None.
fn extrapolate(affine: &AffineSet, cone: &Cone, n: usize, y: &[f64], target: f64) -> Option<Vec<f64>> {
    const MEMORY: usize = 8;
    const MAX_STEPS: usize = 5000;
    // Give up when the gap has not halved within this many steps.
    const PATIENCE: usize = 200;
    let gradient = |v: &[f64]| -> (f64, Vec<f64>) {
        let (r, p) = cone_gap(cone, n, v);
        let mut g: Vec<f64> = v.iter().zip(&p).map(|(a, b)| a - b).collect();
        affine.project_direction(&mut g);
        (r, g)
    };
    let mut y = y.to_vec();
    let (mut r, mut g) = gradient(&y);
    let mut history: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let (mut checkpoint, mut since) = (r, 0);
    for _ in 0..MAX_STEPS {
        if r <= target {
            return (affine.residual(&y) <= target).then_some(y);
        }
        // Two-loop recursion.
        let mut dir: Vec<f64> = g.iter().map(|x| -x).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (sk, tk, rho) in history.iter().rev() {
            let a = rho * dot(sk, &dir);
            for (x, t) in dir.iter_mut().zip(tk) {
                *x -= a * t;
            }
            alphas.push(a);
        }
        if let Some((sk, tk, _)) = history.last() {
            let gamma = dot(sk, tk) / dot(tk, tk);
            dir.iter_mut().for_each(|x| *x *= gamma);
        }
        for ((sk, tk, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(tk, &dir);
            for (x, s) in dir.iter_mut().zip(sk) {
                *x += (a - b) * s;
            }
        }
        if dot(&dir, &g) >= 0.0 {
            history.clear();
            dir = g.iter().map(|x| -x).collect();
        }

        // Armijo backtracking on f = ½·gap², starting from the unit step.
        let slope = dot(&g, &dir);
        let mut s = 1.0;
        let (next, nr, ng) = loop {
            let next: Vec<f64> = y.iter().zip(&dir).map(|(a, b)| a + s * b).collect();
            let (nr, ng) = gradient(&next);
            if 0.5 * nr * nr <= 0.5 * r * r + 1e-4 * s * slope {
                break (next, nr, ng);
            }
            s *= 0.5;
            if s < 1e-12 {
                return None;
            }
        };
        let sk: Vec<f64> = next.iter().zip(&y).map(|(a, b)| a - b).collect();
        let tk: Vec<f64> = ng.iter().zip(&g).map(|(a, b)| a - b).collect();
        let st = dot(&sk, &tk);
        if st > 1e-12 * norm(&sk) * norm(&tk) {
            if history.len() == MEMORY {
                history.remove(0);
            }
            history.push((sk, tk, 1.0 / st));
        }
        y = next;
        r = nr;
        g = ng;
        since += 1;
        if r <= 0.5 * checkpoint {
            (checkpoint, since) = (r, 0);
        } else if since == PATIENCE {
            return None;
        }
    }
    None
}
