//! Constant-modulus RF codebooks and enumeration of RF precoders drawn from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ula_steering;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, numerical_rank, CMatrix, CVector, HermitianEigen};

const MODULUS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookKind {
    Dft,
    Steering,
    Eigen,
}

/// `M x C` matrix of candidate RF beams, every entry of modulus `1/√M`.
#[derive(Debug, Clone, PartialEq)]
pub struct RfCodebook {
    columns: CMatrix,
    kind: CodebookKind,
}

impl RfCodebook {
    /// Checks the constant-modulus constraint, and full column rank when `C ≤ M`
    /// (rank `M` otherwise).
    pub fn new(columns: CMatrix, kind: CodebookKind) -> Result<Self> {
        let (m, c) = columns.shape();
        if m == 0 || c == 0 {
            return Err(Error::Dimension(format!("codebook is {m}x{c}")));
        }
        let target = 1.0 / (m as f64).sqrt();
        if let Some(z) = columns
            .iter()
            .find(|z| (z.norm() - target).abs() > MODULUS_TOL)
        {
            return Err(Error::Precondition(format!(
                "codebook entry of modulus {} violates the constant-modulus constraint 1/√{m}",
                z.norm()
            )));
        }
        let rank = numerical_rank(&columns, 1e-9);
        if rank < c.min(m) {
            return Err(Error::Degenerate(format!(
                "{m}x{c} codebook has numerical rank {rank}"
            )));
        }
        Ok(Self { columns, kind })
    }

    pub fn kind(&self) -> CodebookKind {
        self.kind
    }

    pub fn num_antennas(&self) -> usize {
        self.columns.nrows()
    }

    pub fn size(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn column(&self, j: usize) -> CVector {
        self.columns.column(j).into_owned()
    }

    /// The RF precoder formed by the given strictly increasing column indices.
    pub fn select(&self, indices: &[usize]) -> Result<RfSelection> {
        if indices.is_empty() {
            return Err(Error::Dimension("empty RF selection".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(format!(
                "selection {indices:?} is not strictly increasing"
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.size()) {
            return Err(Error::Dimension(format!(
                "column {bad} outside a codebook of size {}",
                self.size()
            )));
        }
        Ok(RfSelection {
            indices: indices.to_vec(),
            f_rf: self.columns.select_columns(indices.iter()),
        })
    }
}

/// `N` distinct codebook columns forming `F_RF`.
#[derive(Debug, Clone, PartialEq)]
pub struct RfSelection {
    pub indices: Vec<usize>,
    pub f_rf: CMatrix,
}

/// Square DFT codebook: entry `(m, n)` is `(1/√M) e^{-j2πmn/M}`.
pub fn dft_codebook(num_antennas: usize) -> Result<RfCodebook> {
    if num_antennas == 0 {
        return Err(Error::Dimension("DFT codebook needs M >= 1".into()));
    }
    let m = num_antennas as f64;
    let amp = 1.0 / m.sqrt();
    let cols = CMatrix::from_fn(num_antennas, num_antennas, |r, c| {
        let phase = -2.0 * std::f64::consts::PI * (r * c % num_antennas) as f64 / m;
        Complex64::from_polar(amp, phase)
    });
    RfCodebook::new(cols, CodebookKind::Dft)
}

/// ULA steering vectors at the given departure angles, one column per angle.
pub fn steering_codebook(
    num_antennas: usize,
    aods: &[f64],
    spacing_ratio: f64,
) -> Result<RfCodebook> {
    if aods.is_empty() {
        return Err(Error::Dimension(
            "steering codebook needs at least one angle".into(),
        ));
    }
    let cols: Vec<CVector> = aods
        .iter()
        .map(|&phi| ula_steering(num_antennas, phi, spacing_ratio))
        .collect();
    RfCodebook::new(CMatrix::from_columns(&cols), CodebookKind::Steering).map_err(|e| match e {
        Error::Degenerate(msg) => Error::Degenerate(format!("steering angles: {msg}")),
        other => other,
    })
}

/// `M` angles whose cosines are uniformly spaced on `(-1, 1)`.
///
/// At half-wavelength spacing the resulting steering vectors are mutually
/// orthogonal.
pub fn uniform_cosine_angles(num_antennas: usize) -> Vec<f64> {
    let m = num_antennas as f64;
    (0..num_antennas)
        .map(|j| (-1.0 + (2 * j + 1) as f64 / m).acos())
        .collect()
}

/// Dominant eigenvector of each covariance with every entry projected onto
/// modulus `1/√M`, keeping its phase. Zero entries get phase 0.
///
/// A repeated top eigenvalue is resolved deterministically: the first
/// standard basis vector with a non-negligible projection onto the top
/// eigenspace is projected and normalized.
pub fn eigen_codebook(covariances: &[CMatrix]) -> Result<RfCodebook> {
    let Some(first) = covariances.first() else {
        return Err(Error::Dimension(
            "eigen codebook needs at least one covariance".into(),
        ));
    };
    let m = first.nrows();
    let amp = 1.0 / (m as f64).sqrt();
    let mut cols = Vec::with_capacity(covariances.len());
    for (j, cov) in covariances.iter().enumerate() {
        if cov.shape() != (m, m) {
            return Err(Error::Dimension(format!(
                "covariance {j} is {}x{}, expected {m}x{m}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if hermitian_defect(cov) > 1e-10 {
            return Err(Error::Precondition(format!(
                "covariance {j} is not Hermitian"
            )));
        }
        let eig = HermitianEigen::new(cov);
        let top = eig.values[0];
        let bottom = *eig.values.last().unwrap();
        if bottom < -1e-10 * top.abs().max(1.0) {
            return Err(Error::Precondition(format!(
                "covariance {j} is not positive semidefinite"
            )));
        }
        let dominant = dominant_direction(&eig);
        let peak = dominant.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let col = CVector::from_iterator(
            m,
            dominant.iter().map(|z| {
                if z.norm() <= 1e-12 * peak {
                    Complex64::new(amp, 0.0)
                } else {
                    Complex64::from_polar(amp, z.arg())
                }
            }),
        );
        cols.push(col);
    }
    RfCodebook::new(CMatrix::from_columns(&cols), CodebookKind::Eigen)
}

fn dominant_direction(eig: &HermitianEigen) -> CVector {
    let n = eig.values.len();
    let top = eig.values[0];
    let tol = 1e-9 * top.abs().max(f64::MIN_POSITIVE);
    let mult = eig.values.iter().take_while(|&&v| top - v <= tol).count();
    if mult == 1 {
        return eig.vectors.column(0).into_owned();
    }
    let basis = eig.vectors.columns(0, mult);
    for i in 0..n {
        let mut e = CVector::zeros(n);
        e[i] = Complex64::new(1.0, 0.0);
        let proj = basis * (basis.adjoint() * &e);
        let norm = proj.norm();
        if norm > 1e-8 {
            return proj.scale(1.0 / norm);
        }
    }
    eig.vectors.column(0).into_owned()
}

/// `n` choose `k`, exact.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Lexicographic stream of all `N`-column selections of a codebook.
pub struct Selections<'a> {
    codebook: &'a RfCodebook,
    next: Option<Vec<usize>>,
}

impl Iterator for Selections<'_> {
    type Item = RfSelection;

    fn next(&mut self) -> Option<RfSelection> {
        let current = self.next.take()?;
        let c = self.codebook.size();
        let n = current.len();
        // advance to the lexicographic successor
        let mut succ = current.clone();
        let mut i = n;
        while i > 0 {
            i -= 1;
            if succ[i] < c - n + i {
                succ[i] += 1;
                for j in (i + 1)..n {
                    succ[j] = succ[j - 1] + 1;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(
            self.codebook
                .select(&current)
                .expect("generated indices are valid"),
        )
    }
}

/// All `C choose N` RF precoders in lexicographic index order.
pub fn enumerate_selections(codebook: &RfCodebook, n: usize) -> Result<Selections<'_>> {
    if n == 0 || n > codebook.size() {
        return Err(Error::Dimension(format!(
            "cannot select {n} columns from a codebook of size {}",
            codebook.size()
        )));
    }
    Ok(Selections {
        codebook,
        next: Some((0..n).collect()),
    })
}
