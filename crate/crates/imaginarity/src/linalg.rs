//! Dense complex matrices, Hermitian eigendecomposition and matrix functions.
//!
//! Everything downstream (divergence kernels, channel application, the
//! optimizers) reduces to small Hermitian eigenproblems, so the solver is a
//! cyclic Jacobi iteration: slower than QR for large matrices but effectively
//! foolproof at the dimensions used here (d <= 8).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::{
    HERMITIAN_TOL, JACOBI_MAX_SWEEPS, JACOBI_OFF_TOL, PSD_TOL, RANK_TOL,
};

/// Dense `dim x dim` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Validation(format!(
                "need {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    /// Builds a real matrix (zero imaginary parts) from row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Validation(format!(
                "need {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self {
            dim,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        })
    }

    /// Builds a matrix from parallel real/imaginary row-major grids.
    pub fn from_re_im(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(Error::Validation(format!(
                "need {} re and im entries for a {dim}x{dim} matrix",
                dim * dim
            )));
        }
        Ok(Self {
            dim,
            data: re
                .iter()
                .zip(im.iter())
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i));
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|Im|` over all entries.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Largest `|M[i][j] - conj(M[j][i])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let diff = self.get(i, j) - self.get(j, i).conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Largest entrywise difference `max |A[i][j] - B[i][j]|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `O * M * O^T` for a (typically real orthogonal) transform `O`.
    pub fn conjugate_by(&self, o: &Self) -> Result<Self> {
        o.matmul(self)?.matmul(&o.transpose())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Eigendecomposition of a Hermitian matrix: `M = V diag(lambda) V^dag` with
/// eigenvalues ascending and eigenvectors in the columns of `V`.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Returns eigenvalues sorted ascending. Inputs whose hermiticity error
/// exceeds [`HERMITIAN_TOL`] are rejected; failure to converge within
/// [`JACOBI_MAX_SWEEPS`] sweeps reports the off-diagonal residual.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let herm_err = m.hermiticity_error();
    if herm_err > HERMITIAN_TOL {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian: max |M[i][j] - conj(M[j][i])| = {herm_err:.3e}"
        )));
    }
    let d = m.dim();
    let mut a = m.clone();
    // Symmetrize exactly so round-off in the input cannot bias the rotations.
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
        let di = a.get(i, i);
        a.set(i, i, Complex64::new(di.re, 0.0));
    }
    let mut v = ComplexMatrix::identity(d);

    let mut converged = d < 2;
    let mut residual = 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        residual = off_diagonal_max(&a);
        if residual <= JACOBI_OFF_TOL {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        residual = off_diagonal_max(&a);
        if residual > JACOBI_OFF_TOL {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps; \
                 off-diagonal residual {residual:.3e}"
            )));
        }
    }
    let _ = residual;

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..d {
            eigenvectors.set(row, new_col, v.get(row, old_col));
        }
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_max(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in (i + 1)..d {
            worst = worst.max(a.get(i, j).norm());
        }
    }
    worst
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let h = apq.norm();
    if h < 1e-300 {
        return;
    }
    let phase = apq / h;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * h);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let d = a.dim();
    // A <- R^dag A R with R the identity except R[p][p]=c, R[p][q]=s*phase,
    // R[q][p]=-s*conj(phase), R[q][q]=c.
    for i in 0..d {
        if i == p || i == q {
            continue;
        }
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        let new_ip = aip * c - aiq * s * phase.conj();
        let new_iq = aip * s * phase + aiq * c;
        a.set(i, p, new_ip);
        a.set(i, q, new_iq);
        a.set(p, i, new_ip.conj());
        a.set(q, i, new_iq.conj());
    }
    let app_new = c * c * app - 2.0 * c * s * h + s * s * aqq;
    let aqq_new = s * s * app + 2.0 * c * s * h + c * c * aqq;
    a.set(p, p, Complex64::new(app_new, 0.0));
    a.set(q, q, Complex64::new(aqq_new, 0.0));
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));

    for i in 0..d {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * c - viq * s * phase.conj());
        v.set(i, q, vip * s * phase + viq * c);
    }
}

impl HermitianEig {
    /// Rebuilds `V diag(f(lambda)) V^dag`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.eigenvectors.dim();
        let mut out = ComplexMatrix::zeros(d);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let flam = f(lambda);
            if flam == 0.0 {
                continue;
            }
            for i in 0..d {
                let vik = self.eigenvectors.get(i, k);
                if vik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + vik * self.eigenvectors.get(j, k).conj() * flam;
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// Fractional power of a PSD Hermitian matrix under the support pseudo-power
/// convention: eigenvalues at or below [`RANK_TOL`] map to zero (covering
/// negative exponents on rank-deficient input), eigenvalues in `[-PSD_TOL, 0)`
/// are clamped to zero, and anything below `-PSD_TOL` is rejected.
pub fn matrix_power(m: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&min) = eig.eigenvalues.first() {
        if min < -PSD_TOL {
            return Err(Error::Validation(format!(
                "matrix is not PSD: minimum eigenvalue {min:.3e}"
            )));
        }
    }
    Ok(eig.apply_spectral(|lam| support_power(lam, p)))
}

/// Scalar side of the pseudo-power: `lam^p` on the support, zero off it.
#[inline]
pub(crate) fn support_power(lam: f64, p: f64) -> f64 {
    let clamped = lam.max(0.0);
    if clamped > RANK_TOL {
        clamped.powf(p)
    } else {
        0.0
    }
}

/// `tr(A B)` for equal-dimension matrices.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let d = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    Ok(acc)
}
