//! Oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use ucpext::densela::{herm_eig, CMatrix, HermMatrix};
use ucpext::dynamics::Generator;
use ucpext::{sampling, SuperOp};

/// Largest singular value with its left and right singular vectors.
fn top_singular(a: &CMatrix) -> (f64, Vec<ucpext::C64>, Vec<ucpext::C64>) {
    let ata = HermMatrix::from_hermitian_part(&a.adjoint().matmul(a));
    let eig = herm_eig(&ata);
    let n = a.cols();
    let v: Vec<_> = (0..n).map(|i| eig.vectors[(i, n - 1)]).collect();
    let av = a.mul_vec(&v);
    let s = av.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let u = if s > 0.0 {
        av.iter().map(|z| z / s).collect()
    } else {
        let mut e = vec![ucpext::C64::new(0.0, 0.0); a.rows()];
        e[0] = ucpext::C64::new(1.0, 0.0);
        e
    };
    (s, u, v)
}

/// Unitary X maximizing Re tr(X M): X = Σ v_i u_i† for M = Σ s_i u_i v_i†.
fn polar_maximizer(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    let mtm = HermMatrix::from_hermitian_part(&m.adjoint().matmul(m));
    let eig = herm_eig(&mtm);
    let mut us: Vec<Vec<ucpext::C64>> = Vec::new();
    let mut vs: Vec<Vec<ucpext::C64>> = Vec::new();
    for k in (0..n).rev() {
        let v: Vec<_> = (0..n).map(|i| eig.vectors[(i, k)]).collect();
        let mut u = m.mul_vec(&v);
        // Orthogonalize against earlier left vectors to complete a basis
        // when M is rank deficient.
        for prev in &us {
            let p: ucpext::C64 = prev.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in u.iter_mut().zip(prev) {
                *x -= p * y;
            }
        }
        let mut norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            for e in 0..n {
                let mut c = vec![ucpext::C64::new(0.0, 0.0); n];
                c[e] = ucpext::C64::new(1.0, 0.0);
                for prev in &us {
                    let p: ucpext::C64 = prev.iter().zip(&c).map(|(a, b)| a.conj() * b).sum();
                    for (x, y) in c.iter_mut().zip(prev) {
                        *x -= p * y;
                    }
                }
                let nc = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if nc > 1e-6 {
                    u = c;
                    norm = nc;
                    break;
                }
            }
        }
        us.push(u.into_iter().map(|z| z / norm).collect());
        vs.push(v);
    }
    CMatrix::from_fn(n, n, |i, j| us.iter().zip(&vs).map(|(u, v)| v[i] * u[j].conj()).sum())
}

/// Lower estimate of sup_{‖X‖ ≤ 1} ‖Δ(X)‖ (spectral norms) by alternating
/// ascent over unitaries X and unit vectors, from `starts` random unitaries.
pub fn op_norm_lower<R: Rng>(delta: &SuperOp, starts: usize, rng: &mut R) -> f64 {
    let d = delta.d();
    let adj = delta.hs_adjoint();
    let mut best = 0.0f64;
    for _ in 0..starts {
        let mut x = sampling::random_unitary(d, rng);
        let mut value = 0.0;
        for _ in 0..200 {
            let img = delta.apply(&x).unwrap();
            let (s, u, v) = top_singular(&img);
            // ⟨u, Δ(X) v⟩ = ⟨Δ*(u v†), X⟩_HS = tr(M X) with M = Δ*(u v†)†.
            let rank_one = CMatrix::from_fn(d, d, |i, j| u[i] * v[j].conj());
            let m = adj.apply(&rank_one).unwrap().adjoint();
            x = polar_maximizer(&m);
            if s <= value * (1.0 + 1e-13) {
                value = value.max(s);
                break;
            }
            value = s;
        }
        best = best.max(value);
    }
    best
}

/// Upper bound on the operator norm of a Hermiticity-preserving Δ: split its
/// Choi matrix into positive and negative parts Δ = Δ₊ − Δ₋ (both CP) and
/// use ‖Δ±‖ = ‖Δ±(I)‖.
pub fn op_norm_upper(delta: &SuperOp) -> f64 {
    let d = delta.d();
    let eig = herm_eig(&HermMatrix::from_hermitian_part(delta.choi()));
    let plus = SuperOp::new(d, eig.reconstruct_with(|x| x.max(0.0))).unwrap();
    let minus = SuperOp::new(d, eig.reconstruct_with(|x| (-x).max(0.0))).unwrap();
    let id = CMatrix::identity(d);
    ucpext::densela::spectral_norm(&plus.apply(&id).unwrap())
        + ucpext::densela::spectral_norm(&minus.apply(&id).unwrap())
}

/// Smallest Choi eigenvalue of e^{tG} at t = 1e−4 compared with the
/// second-order allowance 10 t² ‖G‖_F².
pub fn small_time_ccp_oracle(g: &Generator) -> bool {
    let t = 1e-4;
    let phi = ucpext::dynamics::evolve(g, t).unwrap();
    let min = phi.is_completely_positive(0.0).min_choi_eigenvalue;
    min >= -10.0 * t * t * g.op().frobenius_norm().powi(2)
}

/// G + ε(T − id) with T the transpose map: kills I, never ccp for ε > λ_max
/// of G's compressed Choi matrix.
pub fn transpose_perturbation(g: &Generator, eps: f64) -> Generator {
    let d = g.d();
    let t_minus_id = SuperOp::transpose_map(d).sub(&SuperOp::identity(d)).unwrap();
    Generator::new(g.op().add(&t_minus_id.scale(eps)).unwrap())
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}
