//! Density matrices, pure states, realness tests, canonical qubit forms,
//! direct sums and seeded random sampling.
//!
//! The free set consists of states whose matrix entries are all real in the
//! fixed basis; everything here either tests membership, moves qubit states to
//! the canonical forms used by the closed-form measures (real orthogonal
//! conjugations preserve the measures), or generates reproducible test states.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::tolerances::{HERMITIAN_TOL, PSD_TOL, PURE_NORM_TOL, TRACE_TOL};

/// A `d x d` Hermitian, positive semidefinite, unit-trace state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    #[serde(skip)]
    mat: ComplexMatrix,
    dim: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before wrapping.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let herm = mat.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::Validation(format!(
                "density matrix is not Hermitian: error {herm:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let eig = hermitian_eig(&mat)?;
        let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::Validation(format!(
                "density matrix is not PSD: minimum eigenvalue {min:.3e}"
            )));
        }
        let dim = mat.dim();
        Ok(Self { mat, dim })
    }

    /// Wraps a matrix that is valid by construction (optimizer realizations,
    /// canonical forms). Debug builds still check the trace.
    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        debug_assert!((mat.trace().re - 1.0).abs() < 1e-6);
        let dim = mat.dim();
        Self { mat, dim }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let d = psi.dim();
        let mut mat = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                mat.set(i, j, psi.amps[i] * psi.amps[j].conj());
            }
        }
        Self::from_matrix_unchecked(mat)
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Purity `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        crate::linalg::trace_product(&self.mat, &self.mat)
            .expect("same dims")
            .re
    }

    /// `O rho O^T` for a real orthogonal `O`; revalidates nothing because the
    /// conjugation preserves all state invariants.
    pub fn conjugated_by(&self, o: &ComplexMatrix) -> Result<Self> {
        Ok(Self::from_matrix_unchecked(self.mat.conjugate_by(o)?))
    }
}

/// Normalized pure-state amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::Validation(format!(
                "pure state norm^2 is {norm_sq}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// Applies a (unitary or orthogonal) matrix to the amplitudes.
    pub fn transformed(&self, m: &ComplexMatrix) -> Result<Self> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: m.dim(),
            });
        }
        let d = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (i, slot) in out.iter_mut().enumerate() {
            for j in 0..d {
                *slot += m.get(i, j) * self.amps[j];
            }
        }
        Self::new(out)
    }
}

/// True iff every entry of `rho` has `|Im| <= tol`.
pub fn is_real_state(rho: &DensityMatrix, tol: f64) -> bool {
    rho.matrix().max_imag() <= tol
}

/// The imaginarity parameter `A = |sum_j psi_j^2|` of a pure state.
///
/// `A = 1` iff the state is real up to a global phase, `A = 0` for maximally
/// imaginary states; it is invariant under real orthogonal transformations.
pub fn imaginarity_parameter(psi: &PureState) -> f64 {
    let s: Complex64 = psi.amps().iter().map(|a| a * a).sum();
    s.norm()
}

/// The canonical qubit pure state with imaginarity parameter `a`:
/// `sqrt((1+a)/2)|0> + i sqrt((1-a)/2)|1>`.
pub fn canonical_pure_state(a: f64) -> Result<PureState> {
    if !(-1e-12..=1.0 + 1e-12).contains(&a) {
        return Err(Error::Validation(format!(
            "imaginarity parameter {a} outside [0, 1]"
        )));
    }
    let a = a.clamp(0.0, 1.0);
    PureState::new(vec![
        Complex64::new(((1.0 + a) / 2.0).sqrt(), 0.0),
        Complex64::new(0.0, ((1.0 - a) / 2.0).sqrt()),
    ])
}

/// Rotates a qubit pure state to canonical form.
///
/// Returns the real orthogonal `O` and the canonical state
/// `sqrt((1+A)/2)|0> + i sqrt((1-A)/2)|1>`; the density matrices of `O|psi>`
/// and the returned state agree (a global phase is factored out first, with
/// phase 0 chosen in the degenerate `A = 0` case).
pub fn canonicalize_pure(psi: &PureState) -> Result<(ComplexMatrix, PureState)> {
    if psi.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: psi.dim(),
            context: "pure-state canonicalization is defined for qubits",
        });
    }
    let s: Complex64 = psi.amps().iter().map(|z| z * z).sum();
    let a = s.norm();
    let phase = if a <= 1e-14 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -s.arg() / 2.0)
    };
    let fixed: Vec<Complex64> = psi.amps().iter().map(|z| z * phase).collect();

    // After the phase fix, Re(psi) and Im(psi) are orthogonal vectors of
    // squared lengths (1+A)/2 and (1-A)/2.
    let u = [fixed[0].re, fixed[1].re];
    let v = [fixed[0].im, fixed[1].im];
    let u_norm = (u[0] * u[0] + u[1] * u[1]).sqrt();
    let u_hat = [u[0] / u_norm, u[1] / u_norm];
    let perp = [-u_hat[1], u_hat[0]];
    let v_dot_perp = v[0] * perp[0] + v[1] * perp[1];
    let v_hat = if v_dot_perp < 0.0 {
        [-perp[0], -perp[1]]
    } else {
        perp
    };
    let o = ComplexMatrix::from_real(2, &[u_hat[0], u_hat[1], v_hat[0], v_hat[1]])?;
    Ok((o, canonical_pure_state(a)?))
}

/// The canonical form of a qubit mixed state: parameters of
/// `O rho O^T = [[1/2, x - i y], [x + i y, 1/2]]` with `x, y >= 0`.
#[derive(Debug, Clone)]
pub struct CanonicalQubitForm {
    pub x: f64,
    pub y: f64,
    /// The real orthogonal conjugation that realizes the form.
    pub transform: ComplexMatrix,
}

/// Brings a qubit state to the canonical form with diagonal 1/2 and
/// off-diagonal `x - i y`, `x, y >= 0`, via a Bloch-sphere construction:
/// a reflection fixes the sign of the `Y` component, then a rotation in the
/// `X`-`Z` plane zeroes the `Z` component and makes the `X` component
/// non-negative.
pub fn canonicalize_qubit_mixed(rho: &DensityMatrix) -> Result<CanonicalQubitForm> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: rho.dim(),
            context: "mixed-state canonicalization is defined for qubits",
        });
    }
    let m = rho.matrix();
    let r01 = m.get(0, 1);
    let mut rx = 2.0 * r01.re;
    let mut ry = -2.0 * r01.im;
    let rz = (m.get(0, 0) - m.get(1, 1)).re;

    let reflect = ry < 0.0;
    if reflect {
        rx = -rx;
        ry = -ry;
    }
    let theta = rz.atan2(rx);
    let (s, c) = (theta / 2.0).sin_cos();
    let rotation = ComplexMatrix::from_real(2, &[c, -s, s, c])?;
    let transform = if reflect {
        let refl = ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])?;
        rotation.matmul(&refl)?
    } else {
        rotation
    };
    Ok(CanonicalQubitForm {
        x: rx.hypot(rz) / 2.0,
        y: ry / 2.0,
        transform,
    })
}

/// Block-diagonal mixture `diag(p rho1, (1-p) rho2)`.
pub fn direct_sum(p: f64, rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DensityMatrix> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Validation(format!(
            "direct-sum weight {p} outside (0, 1)"
        )));
    }
    let (d1, d2) = (rho1.dim(), rho2.dim());
    let mut out = ComplexMatrix::zeros(d1 + d2);
    for i in 0..d1 {
        for j in 0..d1 {
            out.set(i, j, rho1.matrix().get(i, j) * p);
        }
    }
    for i in 0..d2 {
        for j in 0..d2 {
            out.set(d1 + i, d1 + j, rho2.matrix().get(i, j) * (1.0 - p));
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-like random pure state: complex-normal amplitudes, normalized.
pub fn random_pure(dim: usize, seed: u64) -> Result<PureState> {
    if dim < 2 {
        return Err(Error::Validation(format!("dimension {dim} below 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(normal(&mut rng), normal(&mut rng)))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    PureState::new(amps)
}

/// Random rank-`rank` state `G G^dag / tr(G G^dag)` with complex-normal `G`.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::Validation(format!("dimension {dim} below 2")));
    }
    if rank < 1 || rank > dim {
        return Err(Error::Validation(format!(
            "rank {rank} outside 1..={dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<Complex64> = (0..dim * rank)
        .map(|_| Complex64::new(normal(&mut rng), normal(&mut rng)))
        .collect();
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..rank {
                acc += g[i * rank + k] * g[j * rank + k].conj();
            }
            m.set(i, j, acc);
        }
    }
    let tr = m.trace().re;
    Ok(DensityMatrix::from_matrix_unchecked(m.scale_re(1.0 / tr)))
}

/// Random full-rank real state `G G^T / tr(G G^T)` with real-normal `G`;
/// always a member of the free set.
pub fn random_real_density(dim: usize, seed: u64) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::Validation(format!("dimension {dim} below 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<f64> = (0..dim * dim).map(|_| normal(&mut rng)).collect();
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = 0.0;
            for k in 0..dim {
                acc += g[i * dim + k] * g[j * dim + k];
            }
            m.set(i, j, Complex64::new(acc, 0.0));
        }
    }
    let tr = m.trace().re;
    Ok(DensityMatrix::from_matrix_unchecked(m.scale_re(1.0 / tr)))
}

/// Random real orthogonal matrix from Gram-Schmidt on a real-normal draw.
pub fn random_real_orthogonal(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| normal(&mut rng)).collect())
        .collect();
    for c in 0..dim {
        // Two orthogonalization passes keep the result orthonormal well below
        // the 1e-10 checks used by the invariance tests.
        for _ in 0..2 {
            for prev in 0..c {
                let dot: f64 = (0..dim).map(|i| cols[c][i] * cols[prev][i]).sum();
                for i in 0..dim {
                    cols[c][i] -= dot * cols[prev][i];
                }
            }
        }
        let norm: f64 = cols[c].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::Numerical(
                "rank-deficient draw while sampling an orthogonal matrix".into(),
            ));
        }
        for x in &mut cols[c] {
            *x /= norm;
        }
    }
    let mut m = ComplexMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            m.set(i, j, Complex64::new(x, 0.0));
        }
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PureJson {
    re: Vec<f64>,
    im: Vec<f64>,
}

/// A state loaded from file: either a density matrix or pure amplitudes.
pub enum StateFile {
    Density(DensityMatrix),
    Pure(PureState),
}

/// Parses the density-matrix JSON format
/// `{ "dim": d, "re": [[..]], "im": [[..]] }` and validates the result.
pub fn load_density_json(text: &str) -> Result<DensityMatrix> {
    let parsed: DensityJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let d = parsed.dim;
    if parsed.re.len() != d || parsed.im.len() != d {
        return Err(Error::Parse(format!(
            "re/im grids must have {d} rows for dim {d}"
        )));
    }
    let mut re = Vec::with_capacity(d * d);
    let mut im = Vec::with_capacity(d * d);
    for (row_re, row_im) in parsed.re.iter().zip(parsed.im.iter()) {
        if row_re.len() != d || row_im.len() != d {
            return Err(Error::Parse(format!("re/im rows must have {d} entries")));
        }
        re.extend_from_slice(row_re);
        im.extend_from_slice(row_im);
    }
    DensityMatrix::new(ComplexMatrix::from_re_im(d, &re, &im)?)
}

/// Parses the pure-state JSON format `{ "re": [..], "im": [..] }`.
pub fn load_pure_json(text: &str) -> Result<PureState> {
    let parsed: PureJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if parsed.re.len() != parsed.im.len() {
        return Err(Error::Parse("re and im must have equal length".into()));
    }
    PureState::new(
        parsed
            .re
            .iter()
            .zip(parsed.im.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect(),
    )
}

/// Loads either state format, deciding by the presence of a `dim` field.
pub fn load_state_json(text: &str) -> Result<StateFile> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("dim").is_some() {
        Ok(StateFile::Density(load_density_json(text)?))
    } else {
        Ok(StateFile::Pure(load_pure_json(text)?))
    }
}

/// Serializes a density matrix to the file format.
pub fn density_to_json(rho: &DensityMatrix) -> String {
    let d = rho.dim();
    let re: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| rho.matrix().get(i, j).re).collect())
        .collect();
    let im: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| rho.matrix().get(i, j).im).collect())
        .collect();
    serde_json::to_string_pretty(&DensityJson { dim: d, re, im }).expect("serializable")
}

/// Serializes pure-state amplitudes to the file format.
pub fn pure_to_json(psi: &PureState) -> String {
    let re: Vec<f64> = psi.amps().iter().map(|a| a.re).collect();
    let im: Vec<f64> = psi.amps().iter().map(|a| a.im).collect();
    serde_json::to_string_pretty(&PureJson { re, im }).expect("serializable")
}
