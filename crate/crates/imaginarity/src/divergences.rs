//! Tsallis, sandwiched Renyi and operator-entropy divergences.
//!
//! Each divergence is driven by a trace kernel; the measures later minimize a
//! monotone transform of these kernels over the free set, so the kernels are
//! also exposed in a prepared form that fixes the first state once and
//! evaluates cheaply across many candidate `sigma`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, matrix_power, support_power, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::tolerances::KERNEL_IMAG_TOL;

/// Divergence order restricted to `[1/2, 1)`, the range where all three
/// kernel transforms are monotone and the measures are well defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&value) {
            return Err(Error::Validation(format!(
                "alpha = {value} outside [1/2, 1)"
            )));
        }
        Ok(Self(value))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `tr(rho^alpha sigma^(1-alpha))`.
pub fn tsallis_kernel(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: Alpha) -> Result<f64> {
    PreparedKernel::tsallis(rho, alpha)?.eval_checked(sigma.matrix())
}

/// `tr[(rho^((1-alpha)/2alpha) sigma rho^((1-alpha)/2alpha))^alpha]`.
pub fn sandwiched_kernel(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: Alpha) -> Result<f64> {
    PreparedKernel::sandwiched(rho, alpha)?.eval_checked(sigma.matrix())
}

/// `tr[rho^(1/2) (rho^(-1/2) sigma rho^(-1/2))^(1-alpha) rho^(1/2)]`, with
/// support pseudo-powers so singular `rho` annihilates the off-support part
/// of `sigma`.
pub fn operator_kernel(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: Alpha) -> Result<f64> {
    PreparedKernel::operator(rho, alpha)?.eval_checked(sigma.matrix())
}

/// Tsallis relative entropy `(1 - tr(rho^alpha sigma^(1-alpha))) / (1 - alpha)`.
pub fn tsallis_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: Alpha,
) -> Result<f64> {
    Ok((1.0 - tsallis_kernel(rho, sigma, alpha)?) / (1.0 - alpha.value()))
}

/// Sandwiched Renyi relative entropy `F_alpha(sigma || rho)`; a vanishing
/// kernel is reported as positive infinity.
pub fn sandwiched_renyi(sigma: &DensityMatrix, rho: &DensityMatrix, alpha: Alpha) -> Result<f64> {
    let k = sandwiched_kernel(rho, sigma, alpha)?;
    if k <= 1e-300 {
        return Ok(f64::INFINITY);
    }
    Ok(k.ln() / (alpha.value() - 1.0))
}

/// Trace of the Tsallis relative operator entropy, `(kernel - 1) / (alpha - 1)`.
pub fn tsallis_operator_entropy_trace(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: Alpha,
) -> Result<f64> {
    Ok((operator_kernel(rho, sigma, alpha)? - 1.0) / (alpha.value() - 1.0))
}

enum Prepared {
    /// Stores `rho^alpha`; evaluation contracts it with `sigma^(1-alpha)`.
    Tsallis { rho_pow: ComplexMatrix },
    /// Stores `W = rho^((1-alpha)/2alpha)`; evaluation sums `alpha`-powers of
    /// the spectrum of `W sigma W`.
    Sandwiched { w: ComplexMatrix },
    /// Stores `rho` and `rho^(-1/2)`; evaluation contracts the `(1-alpha)`
    /// power of `rho^(-1/2) sigma rho^(-1/2)` with `rho`.
    Operator {
        rho: ComplexMatrix,
        inv_sqrt: ComplexMatrix,
    },
}

/// A divergence kernel with the `rho`-dependent matrix functions precomputed,
/// for repeated evaluation against candidate free states.
pub struct PreparedKernel {
    inner: Prepared,
    alpha: f64,
    dim: usize,
}

impl PreparedKernel {
    pub fn tsallis(rho: &DensityMatrix, alpha: Alpha) -> Result<Self> {
        Ok(Self {
            inner: Prepared::Tsallis {
                rho_pow: matrix_power(rho.matrix(), alpha.value())?,
            },
            alpha: alpha.value(),
            dim: rho.dim(),
        })
    }

    pub fn sandwiched(rho: &DensityMatrix, alpha: Alpha) -> Result<Self> {
        let exponent = (1.0 - alpha.value()) / (2.0 * alpha.value());
        Ok(Self {
            inner: Prepared::Sandwiched {
                w: matrix_power(rho.matrix(), exponent)?,
            },
            alpha: alpha.value(),
            dim: rho.dim(),
        })
    }

    pub fn operator(rho: &DensityMatrix, alpha: Alpha) -> Result<Self> {
        Ok(Self {
            inner: Prepared::Operator {
                rho: rho.matrix().clone(),
                inv_sqrt: matrix_power(rho.matrix(), -0.5)?,
            },
            alpha: alpha.value(),
            dim: rho.dim(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Kernel value at `sigma`; returns NaN when the trace fails the
    /// imaginary-part check or the eigensolve fails, so optimizer callers can
    /// surface the offending state.
    pub fn eval(&self, sigma: &ComplexMatrix) -> f64 {
        match self.eval_checked(sigma) {
            Ok(v) => v,
            Err(_) => f64::NAN,
        }
    }

    /// Kernel value at `sigma` with errors propagated.
    pub fn eval_checked(&self, sigma: &ComplexMatrix) -> Result<f64> {
        if sigma.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: sigma.dim(),
            });
        }
        match &self.inner {
            Prepared::Tsallis { rho_pow } => {
                let eig = hermitian_eig(sigma)?;
                self.contract(&eig, 1.0 - self.alpha, rho_pow)
            }
            Prepared::Sandwiched { w } => {
                let sandwiched = w.matmul(sigma)?.matmul(w)?;
                let eig = hermitian_eig(&sandwiched)?;
                Ok(eig
                    .eigenvalues
                    .iter()
                    .map(|&lam| support_power(lam, self.alpha))
                    .sum())
            }
            Prepared::Operator { rho, inv_sqrt } => {
                let m = inv_sqrt.matmul(sigma)?.matmul(inv_sqrt)?;
                let eig = hermitian_eig(&m)?;
                self.contract(&eig, 1.0 - self.alpha, rho)
            }
        }
    }

    /// `sum_k f(lambda_k) <v_k| weight |v_k>` with `f` the support power.
    fn contract(
        &self,
        eig: &crate::linalg::HermitianEig,
        exponent: f64,
        weight: &ComplexMatrix,
    ) -> Result<f64> {
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            let f = support_power(lam, exponent);
            if f == 0.0 {
                continue;
            }
            let mut quad = Complex64::new(0.0, 0.0);
            for i in 0..d {
                let vik = eig.eigenvectors.get(i, k);
                for j in 0..d {
                    quad += vik.conj() * weight.get(i, j) * eig.eigenvectors.get(j, k);
                }
            }
            acc += quad * f;
        }
        if acc.im.abs() > KERNEL_IMAG_TOL {
            return Err(Error::Numerical(format!(
                "kernel trace has imaginary part {:.3e}",
                acc.im
            )));
        }
        Ok(acc.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random_real_channel;
    use crate::linalg::trace_product;
    use crate::states::{
        canonical_pure_state, random_density, random_real_orthogonal, DensityMatrix, PureState,
    };

    fn alpha(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn diag(a: f64, b: f64) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real(2, &[a, 0.0, 0.0, b]).unwrap()).unwrap()
    }

    fn ket0() -> DensityMatrix {
        diag(1.0, 0.0)
    }

    fn maximally_mixed() -> DensityMatrix {
        diag(0.5, 0.5)
    }

    #[test]
    fn alpha_range_is_enforced() {
        assert!(Alpha::new(0.5).is_ok());
        assert!(Alpha::new(0.99).is_ok());
        assert!(Alpha::new(1.0).is_err());
        assert!(Alpha::new(0.49).is_err());
    }

    #[test]
    fn kernels_are_one_on_the_diagonal() {
        for seed in 0..10u64 {
            let rho = random_density(2, 2, seed).unwrap();
            for a in [0.5, 0.75, 0.9] {
                assert!((tsallis_kernel(&rho, &rho, alpha(a)).unwrap() - 1.0).abs() < 1e-9);
                assert!((sandwiched_kernel(&rho, &rho, alpha(a)).unwrap() - 1.0).abs() < 1e-9);
                assert!((operator_kernel(&rho, &rho, alpha(a)).unwrap() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn tsallis_kernel_examples() {
        // Maximally imaginary pure state against I/2 at alpha = 3/4:
        // rho^alpha = rho and sigma^(1-alpha) = 2^(alpha-1) I.
        let rho = canonical_pure_state(0.0).unwrap().density();
        let k = tsallis_kernel(&rho, &maximally_mixed(), alpha(0.75)).unwrap();
        assert!((k - 2f64.powf(-0.25)).abs() < 1e-12);

        let k = tsallis_kernel(&maximally_mixed(), &diag(0.25, 0.75), alpha(0.5)).unwrap();
        let expect = 0.5f64.sqrt() * (0.25f64.sqrt() + 0.75f64.sqrt());
        assert!((k - expect).abs() < 1e-12);
        assert!((expect - 0.9659258262890683).abs() < 1e-12);
    }

    #[test]
    fn tsallis_entropy_examples() {
        let rho = random_density(2, 2, 3).unwrap();
        assert!(tsallis_relative_entropy(&rho, &rho, alpha(0.75)).unwrap().abs() < 1e-9);

        let d = tsallis_relative_entropy(&ket0(), &maximally_mixed(), alpha(0.5)).unwrap();
        assert!((d - (1.0 - 0.5f64.sqrt()) / 0.5).abs() < 1e-12);

        let d = tsallis_relative_entropy(&maximally_mixed(), &diag(0.25, 0.75), alpha(0.5)).unwrap();
        assert!((d - 0.0681483474218634).abs() < 1e-10);
    }

    #[test]
    fn sandwiched_kernel_collapses_on_pure_states() {
        // For pure rho the kernel is <psi| sigma |psi>^alpha.
        for seed in 0..10u64 {
            let psi = crate::states::random_pure(2, seed).unwrap();
            let rho = psi.density();
            let sigma = random_density(2, 2, seed ^ 0xff).unwrap();
            for a in [0.5, 0.75, 0.9] {
                let k = sandwiched_kernel(&rho, &sigma, alpha(a)).unwrap();
                let overlap = trace_product(rho.matrix(), sigma.matrix()).unwrap().re;
                assert!((k - overlap.powf(a)).abs() < 1e-10);
            }
        }

        let rho = canonical_pure_state(0.4).unwrap().density();
        let k = sandwiched_kernel(&rho, &ket0(), alpha(0.75)).unwrap();
        assert!((k - 0.7f64.powf(0.75)).abs() < 1e-12);
    }

    #[test]
    fn operator_kernel_examples() {
        let rho = random_density(2, 2, 11).unwrap();
        assert!((operator_kernel(&rho, &rho, alpha(0.6)).unwrap() - 1.0).abs() < 1e-9);

        // Pure rho against a real pure sigma collapses to the overlap power.
        let psi = crate::states::random_pure(2, 5).unwrap();
        let rho = psi.density();
        let v = PureState::new(vec![
            Complex64::new(0.8, 0.0),
            Complex64::new(0.6, 0.0),
        ])
        .unwrap();
        let sigma = v.density();
        for a in [0.5, 0.75] {
            let k = operator_kernel(&rho, &sigma, alpha(a)).unwrap();
            let overlap = trace_product(rho.matrix(), sigma.matrix()).unwrap().re;
            assert!((k - overlap.powf(1.0 - a)).abs() < 1e-10);
        }

        let rho = canonical_pure_state(0.4).unwrap().density();
        let k = operator_kernel(&rho, &ket0(), alpha(0.75)).unwrap();
        assert!((k - 0.7f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn renyi_and_operator_entropy_examples() {
        let rho = random_density(2, 2, 17).unwrap();
        assert!(sandwiched_renyi(&rho, &rho, alpha(0.75)).unwrap().abs() < 1e-9);
        assert!(tsallis_operator_entropy_trace(&rho, &rho, alpha(0.75)).unwrap().abs() < 1e-9);

        // Kernel 0.5 at alpha = 3/4: F = ln(1/2) / (-1/4).
        let q = 0.5f64.powf(4.0 / 3.0);
        let sigma = diag(q, 1.0 - q);
        let f = sandwiched_renyi(&sigma, &ket0(), alpha(0.75)).unwrap();
        assert!((f - 2.772588722239781).abs() < 1e-10);

        // Orthogonal pure states: kernel 0, divergence +inf.
        let f = sandwiched_renyi(&diag(0.0, 1.0), &ket0(), alpha(0.75)).unwrap();
        assert!(f.is_infinite() && f > 0.0);
    }

    /// Data processing: none of the kernels decreases under a real channel.
    #[test]
    fn kernels_do_not_decrease_under_channels() {
        let alphas = [0.5, 0.75, 0.9];
        for seed in 0..200u64 {
            let rho = random_density(2, 2, seed * 3 + 1).unwrap();
            let sigma = random_density(2, 2, seed * 3 + 2).unwrap();
            let ch = random_real_channel(2, 2, seed * 3 + 3).unwrap();
            let rho_out = ch.apply(&rho).unwrap();
            let sigma_out = ch.apply(&sigma).unwrap();
            for &a in &alphas {
                let a = alpha(a);
                let kt0 = tsallis_kernel(&rho, &sigma, a).unwrap();
                let kt1 = tsallis_kernel(&rho_out, &sigma_out, a).unwrap();
                assert!(kt1 >= kt0 - 1e-7, "tsallis DPI: seed {seed}, {kt0} -> {kt1}");

                let ks0 = sandwiched_kernel(&rho, &sigma, a).unwrap();
                let ks1 = sandwiched_kernel(&rho_out, &sigma_out, a).unwrap();
                assert!(ks1 >= ks0 - 1e-7, "sandwiched DPI: seed {seed}, {ks0} -> {ks1}");

                let ko0 = operator_kernel(&rho, &sigma, a).unwrap();
                let ko1 = operator_kernel(&rho_out, &sigma_out, a).unwrap();
                assert!(ko1 >= ko0 - 1e-7, "operator DPI: seed {seed}, {ko0} -> {ko1}");
            }
        }
    }

    /// Simultaneous real orthogonal conjugation leaves all kernels unchanged.
    #[test]
    fn kernels_are_orthogonal_invariants() {
        for seed in 0..20u64 {
            let rho = random_density(2, 2, seed).unwrap();
            let sigma = random_density(2, 2, seed ^ 0xbeef).unwrap();
            let o = random_real_orthogonal(2, seed ^ 0xfeed).unwrap();
            let rho_r = rho.conjugated_by(&o).unwrap();
            let sigma_r = sigma.conjugated_by(&o).unwrap();
            for a in [0.5, 0.75, 0.9] {
                let a = alpha(a);
                assert!(
                    (tsallis_kernel(&rho, &sigma, a).unwrap()
                        - tsallis_kernel(&rho_r, &sigma_r, a).unwrap())
                    .abs()
                        < 1e-9
                );
                assert!(
                    (sandwiched_kernel(&rho, &sigma, a).unwrap()
                        - sandwiched_kernel(&rho_r, &sigma_r, a).unwrap())
                    .abs()
                        < 1e-9
                );
                assert!(
                    (operator_kernel(&rho, &sigma, a).unwrap()
                        - operator_kernel(&rho_r, &sigma_r, a).unwrap())
                    .abs()
                        < 1e-9
                );
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let rho = random_density(2, 2, 1).unwrap();
        let sigma = random_density(3, 3, 1).unwrap();
        assert!(tsallis_kernel(&rho, &sigma, alpha(0.75)).is_err());
    }
}
