//! Spectrum of `-L` and the biorthogonal zero-eigenvalue eigenstructure.
//!
//! Only the zero eigenspace is ever needed explicitly: everything that
//! depends on the nonzero modes is handled by linear solves or matrix
//! exponentials elsewhere, so no Jordan form is computed.

use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{Complex, DMatrix, DVector, Schur, SVD};

use crate::error::SpectralError;
use crate::graph::Laplacian;

const MAX_SWEEPS_PER_ROW: usize = 1000;

/// Smallest acceptable singular value of `W_rawᵀ V0` (cosine of the largest
/// principal angle between the left and right null spaces).
const MIN_PAIRING: f64 = 1e-8;

/// Eigenvalues of `-L`, sorted by decreasing real part (zeros first).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex<f64>>,
    pub zero_multiplicity: usize,
    /// Absolute magnitude below which an eigenvalue counted as zero.
    pub zero_threshold: f64,
}

impl Spectrum {
    pub fn is_zero(&self, sigma: &Complex<f64>) -> bool {
        sigma.norm_sqr() < self.zero_threshold * self.zero_threshold
    }

    /// `|Re σ|` of the slowest decaying nonzero mode, `None` when `L = 0`.
    pub fn slowest_decay_rate(&self) -> Option<f64> {
        self.eigenvalues
            .iter()
            .filter(|s| !self.is_zero(s))
            .map(|s| -s.re)
            .min_by(|a, b| a.total_cmp(b))
    }
}

fn zero_threshold(l: &Laplacian, eps_zero: f64) -> f64 {
    eps_zero * l.inf_norm().max(1.0)
}

/// Eigenvalues of `-L`. An eigenvalue is classified as zero when
/// `|σ| < eps_zero * max(1, ‖L‖∞)`.
pub fn spectrum(l: &Laplacian, eps_zero: f64) -> Result<Spectrum, SpectralError> {
    let n = l.n();
    let neg = -l.matrix().clone();
    let schur = Schur::try_new(neg, f64::EPSILON, MAX_SWEEPS_PER_ROW * n.max(1))
        .ok_or(SpectralError::EigensolverFailure)?;
    let mut eigenvalues: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| match b.re.total_cmp(&a.re) {
        Ordering::Equal => a.im.total_cmp(&b.im),
        o => o,
    });
    let zero_threshold = zero_threshold(l, eps_zero);
    let zero_multiplicity = eigenvalues
        .iter()
        .filter(|s| s.norm_sqr() < zero_threshold * zero_threshold)
        .count();
    Ok(Spectrum {
        eigenvalues,
        zero_multiplicity,
        zero_threshold,
    })
}

/// Right and left bases of the zero eigenspace of `L`, normalised so that
/// `leftᵀ · right = I`.
///
/// For a simple zero eigenvalue the right vector is the all-ones vector and
/// the left vector sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroEigenstructure {
    right: DMatrix<f64>,
    left: DMatrix<f64>,
}

impl ZeroEigenstructure {
    /// Number of zero modes, `n_z`.
    pub fn dim(&self) -> usize {
        self.right.ncols()
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.right.nrows()
    }

    /// `V0`, one right null vector per column.
    pub fn right(&self) -> &DMatrix<f64> {
        &self.right
    }

    /// `W0`, one left null vector per column.
    pub fn left(&self) -> &DMatrix<f64> {
        &self.left
    }

    pub fn right_vector(&self, mode: usize) -> DVector<f64> {
        self.right.column(mode).into_owned()
    }

    pub fn left_vector(&self, mode: usize) -> DVector<f64> {
        self.left.column(mode).into_owned()
    }

    /// `W0ᵀ x`: the zero-mode coordinates of `x`.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        self.left.tr_mul(x)
    }

    /// `‖W0ᵀ V0 − I‖_max`.
    pub fn biorthogonality_error(&self) -> f64 {
        let m = self.left.tr_mul(&self.right);
        (m - DMatrix::identity(self.dim(), self.dim())).amax()
    }
}

/// Extracts the zero eigenstructure of `L`.
///
/// Right singular vectors with `s < eps_zero * max(1, ‖L‖∞)` span the null
/// space of `L`; the same cut on an SVD of `Lᵀ` gives the left null space.
/// (The `U` factor is not used: with a repeated zero singular value its
/// columns need not annihilate `L`.) The left basis is then corrected by
/// `M⁻ᵀ`, `M = W_rawᵀ V0`, which leaves `V0` untouched and yields
/// `W0ᵀ V0 = I`.
pub fn zero_eigenstructure(l: &Laplacian, eps_zero: f64) -> Result<ZeroEigenstructure, SpectralError> {
    let threshold = zero_threshold(l, eps_zero);
    let right = null_basis(l.matrix().clone(), threshold)?;
    let left_raw = null_basis(l.matrix().transpose(), threshold)?;
    let nz = right.ncols();
    if nz == 0 || left_raw.ncols() != nz {
        return Err(SpectralError::DegenerateNullSpace {
            right: nz,
            left: left_raw.ncols(),
        });
    }
    let n = l.n();
    let mut right = right;

    let pairing = left_raw.tr_mul(&right);
    let pairing_svd = SVD::try_new(pairing, false, false, f64::EPSILON, 0)
        .ok_or(SpectralError::SvdFailure)?;
    if pairing_svd.singular_values.min() < MIN_PAIRING {
        return Err(SpectralError::DegenerateNullSpace { right: nz, left: nz });
    }

    if nz == 1 {
        right = DMatrix::from_element(n, 1, 1.0);
    }
    let m = left_raw.tr_mul(&right);
    let m_inv = m
        .try_inverse()
        .ok_or(SpectralError::DegenerateNullSpace { right: nz, left: nz })?;
    let left = left_raw * m_inv.transpose();

    Ok(ZeroEigenstructure { right, left })
}

/// Orthonormal basis of `{x : m x = 0}` from the rows of `Vᵀ`.
fn null_basis(m: DMatrix<f64>, threshold: f64) -> Result<DMatrix<f64>, SpectralError> {
    let n = m.ncols();
    let svd = SVD::try_new(m, false, true, f64::EPSILON, 0).ok_or(SpectralError::SvdFailure)?;
    let v_t = svd.v_t.as_ref().ok_or(SpectralError::SvdFailure)?;
    let null: Vec<usize> = (0..n).filter(|&k| svd.singular_values[k] < threshold).collect();
    let mut basis = DMatrix::zeros(n, null.len());
    for (c, &k) in null.iter().enumerate() {
        basis.set_column(c, &v_t.row(k).transpose());
    }
    Ok(basis)
}
