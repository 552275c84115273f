//! Random matrices, UCP maps and generators for tests and benchmarks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cpmaps::SuperOp;
use crate::densela::{herm_eig_unchecked, CMatrix, HermMatrix, C64};
use crate::dynamics::{gksl_generator, Generator};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Entries with i.i.d. standard complex Gaussian real and imaginary parts.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(normal(rng), normal(rng)))
}

pub fn gaussian_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermMatrix {
    HermMatrix::from_hermitian_part(&gaussian_matrix(d, d, rng))
}

/// Real symmetric Gaussian matrix.
pub fn gaussian_symmetric<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermMatrix {
    let m = CMatrix::from_fn(d, d, |_, _| C64::new(normal(rng), 0.0));
    HermMatrix::from_hermitian_part(&m)
}

/// Unitary from Gram–Schmidt on a Gaussian matrix (Haar up to phases).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(d, d, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v: Vec<C64> = (0..d).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for c in &cols {
                let p: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= p * y;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Random UCP map with `kraus` Kraus operators, normalized so that
/// Σ K_k†K_k = I.
pub fn random_ucp<R: Rng + ?Sized>(d: usize, kraus: usize, rng: &mut R) -> SuperOp {
    let ks: Vec<CMatrix> = (0..kraus.max(1)).map(|_| gaussian_matrix(d, d, rng)).collect();
    let mut s = CMatrix::zeros(d, d);
    for k in &ks {
        s += &k.adjoint().matmul(k);
    }
    let inv_sqrt = herm_eig_unchecked(&s.hermitian_part()).reconstruct_with(|x| 1.0 / x.sqrt());
    let normalized: Vec<CMatrix> = ks.iter().map(|k| k.matmul(&inv_sqrt)).collect();
    let weights = vec![1.0; normalized.len()];
    SuperOp::from_kraus(d, &normalized, &weights).expect("valid Kraus data")
}

/// Random GKSL generator with `jumps` jump operators and rates in (0, 1].
pub fn random_gksl<R: Rng + ?Sized>(d: usize, jumps: usize, rng: &mut R) -> Generator {
    let h = HermMatrix::from_hermitian_part(&gaussian_matrix(d, d, rng).scale(0.5));
    let js: Vec<(CMatrix, f64)> = (0..jumps)
        .map(|_| {
            let v = gaussian_matrix(d, d, rng).scale(1.0 / (d as f64).sqrt());
            (v, rng.random_range(0.05..=1.0))
        })
        .collect();
    gksl_generator(d, &h, &js).expect("valid GKSL data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_and_ucp() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..=4 {
            let u = random_unitary(d, &mut rng);
            assert!(u.adjoint().matmul(&u).distance(&CMatrix::identity(d)) < 1e-12);
            assert!(random_ucp(d, 3, &mut rng).is_ucp(1e-10));
            assert!(random_gksl(d, 2, &mut rng).is_certified());
        }
    }
}
