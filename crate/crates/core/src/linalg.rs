//! Small dense complex linear-algebra helpers shared by the solver and the codebooks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// One circularly-symmetric CN(0, 1) sample: real and imaginary parts each N(0, 1/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_normal_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

/// Largest entrywise deviation from Hermitian symmetry, relative to the largest entry.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst / scale
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
///
/// Each eigenvector is rotated so that its first entry of non-negligible
/// modulus is real and positive, which makes the output independent of the
/// phase conventions of the underlying routine.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        let sym = (m + m.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut vectors = CMatrix::zeros(n, n);
        let mut values = Vec::with_capacity(n);
        for (dst, &src) in order.iter().enumerate() {
            values.push(eig.eigenvalues[src]);
            let mut col = eig.eigenvectors.column(src).into_owned();
            normalize_phase(&mut col);
            vectors.set_column(dst, &col);
        }
        Self { values, vectors }
    }

    pub fn principal(&self) -> (f64, CVector) {
        (self.values[0], self.vectors.column(0).into_owned())
    }
}

/// Rotate `v` so that its first entry with modulus above 1e-12·‖v‖∞ is real positive.
pub fn normalize_phase(v: &mut CVector) {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return;
    }
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-12 * peak) {
        let rot = lead.conj() / lead.norm();
        v.iter_mut().for_each(|z| *z *= rot);
    }
}

/// Inverse square root of a Hermitian positive-definite matrix.
///
/// Fails when the smallest eigenvalue is not positive relative to the largest.
pub fn hermitian_inv_sqrt(g: &CMatrix) -> Result<CMatrix> {
    let eig = HermitianEigen::new(g);
    let top = eig.values[0];
    let bottom = *eig.values.last().unwrap();
    if !(top > 0.0) || bottom <= 1e-12 * top {
        return Err(Error::Precondition(format!(
            "power gram is not positive definite (eigenvalues in [{bottom:.3e}, {top:.3e}])"
        )));
    }
    let n = g.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (j, &lam) in eig.values.iter().enumerate() {
        let u = eig.vectors.column(j);
        out += (u * u.adjoint()).scale(1.0 / lam.sqrt());
    }
    Ok(out)
}

/// Cholesky factor of a Hermitian matrix, `A = L Lᴴ` with real positive diagonal.
///
/// Returns `None` unless the matrix is numerically positive definite. The
/// generic complex routine in nalgebra cannot detect indefiniteness because a
/// complex square root always exists, so the pivots are checked here.
pub struct HermitianCholesky {
    l: CMatrix,
}

impl HermitianCholesky {
    pub fn new(a: &CMatrix) -> Option<Self> {
        let n = a.nrows();
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut pivot = a[(j, j)].re;
            for p in 0..j {
                pivot -= l[(j, p)].norm_sqr();
            }
            if !(pivot > 0.0) || !pivot.is_finite() {
                return None;
            }
            let d = pivot.sqrt();
            l[(j, j)] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut acc = a[(i, j)];
                for p in 0..j {
                    acc -= l[(i, p)] * l[(j, p)].conj();
                }
                l[(i, j)] = acc / d;
            }
        }
        Some(Self { l })
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.l.diagonal().iter().map(|z| z.re.ln()).sum::<f64>()
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.l.nrows();
        let mut linv = CMatrix::identity(n, n);
        // forward substitution column by column: L X = I
        for c in 0..n {
            for i in 0..n {
                let mut acc = if i == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                for p in 0..i {
                    acc -= self.l[(i, p)] * linv[(p, c)];
                }
                linv[(i, c)] = acc / self.l[(i, i)];
            }
        }
        let inv = linv.adjoint() * &linv;
        (&inv + inv.adjoint()).scale(0.5)
    }
}

/// Orthonormal basis for the column space of a full-column-rank matrix (thin QR).
pub fn orthonormal_columns(f: &CMatrix) -> Result<CMatrix> {
    let (m, n) = f.shape();
    if n == 0 || n > m {
        return Err(Error::Degenerate(format!(
            "{m}x{n} matrix cannot have full column rank"
        )));
    }
    let qr = f.clone().qr();
    let r = qr.r();
    let scale = (0..n).map(|j| f.column(j).norm()).fold(0.0, f64::max);
    for j in 0..n {
        if r[(j, j)].norm() <= 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Degenerate(format!(
                "column {j} of a {m}x{n} matrix is linearly dependent on the previous ones"
            )));
        }
    }
    Ok(qr.q().columns(0, n).into_owned())
}

/// Numerical rank from the singular values, relative threshold `rel_tol`.
pub fn numerical_rank(f: &CMatrix, rel_tol: f64) -> usize {
    let sv = f.clone().singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// |aᴴ b|²
pub fn inner_sq(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm_sqr()
}
