//! Gaussian moment fitting and the Fréchet distance between fits.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Tolerated asymmetry in matrices that claim to be symmetric.
const SYMMETRY_TOLERANCE: f64 = 1e-10;
/// Eigenvalues in `[-PSD_EIG_TOLERANCE * trace, 0)` are clamped to zero;
/// anything lower is an error.
const PSD_EIG_TOLERANCE: f64 = 1e-8;
/// Negative distances above this are treated as rounding and clamped to 0.
const FRECHET_CLAMP: f64 = -1e-6;
/// Diagonal regularization applied when the eigensolver fails to converge.
const DIAGONAL_REGULARIZATION: f64 = 1e-10;

/// Mean and covariance of a Gaussian fit to feature activations.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Fit mean and unbiased (n - 1) covariance to at least two samples.
pub fn fit_gaussian(samples: &[DVector<f64>]) -> Result<GaussianStats> {
    if samples.len() < 2 {
        return Err(Error::NotEnoughSamples(samples.len()));
    }
    let dim = samples[0].len();
    for s in samples {
        if s.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.len(),
            });
        }
    }
    let n = samples.len() as f64;
    let mut mean = DVector::zeros(dim);
    for s in samples {
        mean += s;
    }
    mean /= n;

    let mut cov = DMatrix::zeros(dim, dim);
    for s in samples {
        let dev = s - &mean;
        // Fill the upper triangle once and mirror, keeping the result
        // exactly symmetric.
        for i in 0..dim {
            for j in i..dim {
                cov[(i, j)] += dev[i] * dev[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = cov[(i, j)] / (n - 1.0);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(GaussianStats { mean, cov })
}

fn check_symmetry(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let scale = m.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if worst > SYMMETRY_TOLERANCE * scale {
        return Err(Error::AsymmetricMatrix(worst));
    }
    Ok(())
}

fn symmetric_eigen(m: DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = m.nrows();
    let trace = m.trace();
    let eig = match nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0) {
        Some(e) => e,
        None => {
            let mut reg = m;
            let bump = DIAGONAL_REGULARIZATION * trace / n as f64;
            for i in 0..n {
                reg[(i, i)] += bump;
            }
            nalgebra::SymmetricEigen::try_new(reg, f64::EPSILON, 0).ok_or(Error::EigenSolveFailed)?
        }
    };
    Ok((eig.eigenvectors, eig.eigenvalues))
}

/// Principal square root of a symmetric positive semidefinite matrix.
///
/// Slightly negative eigenvalues (down to `-1e-8 * trace`) are treated as
/// rounding and clamped to zero; anything below that is rejected as
/// indefinite.
pub fn matrix_sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetry(m)?;
    let trace = m.trace();
    let tolerance = -PSD_EIG_TOLERANCE * trace;
    let (vectors, values) = symmetric_eigen(m.clone())?;
    let mut roots = DVector::zeros(values.len());
    for (i, &lambda) in values.iter().enumerate() {
        if lambda < tolerance {
            return Err(Error::IndefiniteMatrix {
                eigenvalue: lambda,
                tolerance,
            });
        }
        roots[i] = lambda.max(0.0).sqrt();
    }
    let scaled = &vectors * DMatrix::from_diagonal(&roots);
    Ok(&scaled * vectors.transpose())
}

/// Squared 2-Wasserstein distance between two Gaussians:
/// `|mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1 S2)^{1/2})`.
///
/// The cross term is computed through the symmetrized product
/// `S1^{1/2} S2 S1^{1/2}`, which shares its spectrum with `S1 S2` but stays
/// symmetric PSD. Reported squared, following the usual FID convention.
pub fn frechet_distance(g1: &GaussianStats, g2: &GaussianStats) -> Result<f64> {
    if g1.dim() != g2.dim() {
        return Err(Error::DimensionMismatch {
            expected: g1.dim(),
            got: g2.dim(),
        });
    }
    let root1 = matrix_sqrt_psd(&g1.cov)?;
    check_symmetry(&g2.cov)?;
    let inner = &root1 * &g2.cov * &root1;
    // Exact symmetrization before the second square root.
    let inner = (&inner + inner.transpose()) * 0.5;
    let cross = matrix_sqrt_psd(&inner)?;

    let mean_term = (&g1.mean - &g2.mean).norm_squared();
    let value = mean_term + g1.cov.trace() + g2.cov.trace() - 2.0 * cross.trace();
    if value < FRECHET_CLAMP {
        return Err(Error::NegativeFrechet(value));
    }
    Ok(value.max(0.0))
}
