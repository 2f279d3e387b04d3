//! Small dense complex-matrix helpers shared by gate classification and
//! channel simulation.
//!
//! Everything here targets desk-scale dimensions (D ≤ a few hundred); the
//! generic `ndarray` matmul is more than fast enough and keeps results
//! bit-reproducible across platforms.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub fn identity(n: usize) -> CMatrix {
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diag().sum()
}

/// Kronecker product with the left factor on the most significant index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    Array2::from_shape_fn((ra * rb, ca * cb), |(i, j)| {
        a[[i / rb, j / cb]] * b[[i % rb, j % cb]]
    })
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let (na, nb) = (a.len(), b.len());
    Array1::from_shape_fn(na * nb, |i| a[i / nb] * b[i % nb])
}

/// Largest entry of `|A - B|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entry of `|A A† - 1|`.
pub fn unitarity_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    max_abs_diff(&a.dot(&dagger(a)), &identity(n))
}

/// Outer product `|v⟩⟨w|`.
pub fn outer(v: &CVector, w: &CVector) -> CMatrix {
    Array2::from_shape_fn((v.len(), w.len()), |(i, j)| v[i] * w[j].conj())
}

pub fn inner(v: &CVector, w: &CVector) -> C64 {
    v.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Gram matrix `G_ij = ⟨v_i | v_j⟩` of the columns of `m`.
pub fn column_gram(m: &CMatrix) -> CMatrix {
    dagger(m).dot(m)
}

/// A Haar-like random unitary: a complex Ginibre matrix orthonormalized by
/// two passes of modified Gram-Schmidt.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut m = Array2::from_shape_fn((n, n), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    orthonormalize_columns(&mut m);
    orthonormalize_columns(&mut m);
    m
}

fn orthonormalize_columns(m: &mut CMatrix) {
    let n = m.ncols();
    for j in 0..n {
        for i in 0..j {
            let qi = m.column(i).to_owned();
            let proj = inner(&qi, &m.column(j).to_owned());
            let mut col = m.column_mut(j);
            for (c, q) in col.iter_mut().zip(qi.iter()) {
                *c -= proj * q;
            }
        }
        let norm = m.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        m.column_mut(j).mapv_inplace(|z| z / norm);
    }
}

/// JSON-facing representation: rows of `[re, im]` pairs.
pub fn to_re_im_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.rows()
        .into_iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn from_re_im_rows(rows: &[Vec<[f64; 2]>]) -> Option<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return None;
    }
    let cols = rows[0].len();
    Some(Array2::from_shape_fn((n, cols), |(i, j)| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}
