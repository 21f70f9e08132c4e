//! The three imaginarity measures: definitional (optimizer-based),
//! pure-real-restricted, and closed forms for qubits, plus the inequality
//! gaps between the families.
//!
//! All three measures are monotone transforms of a kernel maximized over the
//! free set, so the optimization is implemented once and shared. The
//! definitional and pure-restricted values can genuinely differ for the
//! Tsallis family (the full free set beats pure real states on its kernel);
//! both are first-class here and `MethodComparison` reports them side by side
//! rather than hiding the gap.

use serde::{Deserialize, Serialize};

use crate::divergences::{Alpha, PreparedKernel};
use crate::error::{Error, Result};
use crate::optimizer::{
    grid_oracle_qubit, maximize_over_pure_real_states, maximize_over_real_states, OptConfig,
};
use crate::states::DensityMatrix;
use crate::tolerances::MEASURE_NEG_TOL;

/// Which divergence family a measure is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureFamily {
    TsallisT,
    SandwichedS,
    OperatorO,
}

impl MeasureFamily {
    pub const ALL: [MeasureFamily; 3] = [
        MeasureFamily::TsallisT,
        MeasureFamily::SandwichedS,
        MeasureFamily::OperatorO,
    ];

    pub fn letter(self) -> &'static str {
        match self {
            MeasureFamily::TsallisT => "T",
            MeasureFamily::SandwichedS => "S",
            MeasureFamily::OperatorO => "O",
        }
    }
}

impl std::str::FromStr for MeasureFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(MeasureFamily::TsallisT),
            "S" | "s" => Ok(MeasureFamily::SandwichedS),
            "O" | "o" => Ok(MeasureFamily::OperatorO),
            other => Err(Error::Parse(format!(
                "unknown measure family {other:?}, expected T, S or O"
            ))),
        }
    }
}

/// A measure selection: family plus divergence order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureKind {
    pub family: MeasureFamily,
    pub alpha: Alpha,
}

impl MeasureKind {
    pub fn new(family: MeasureFamily, alpha: Alpha) -> Self {
        Self { family, alpha }
    }
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasureMethod {
    Definitional,
    PureRestricted,
    ClosedForm,
    GridOracle,
}

impl std::fmt::Display for MeasureMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MeasureMethod::Definitional => "definitional",
            MeasureMethod::PureRestricted => "pure-restricted",
            MeasureMethod::ClosedForm => "closed-form",
            MeasureMethod::GridOracle => "grid-oracle",
        };
        f.write_str(s)
    }
}

/// A measure evaluation together with its diagnostics.
#[derive(Debug, Clone)]
pub struct MeasureResult {
    pub value: f64,
    pub method: MeasureMethod,
    /// The maximizing free state, when an optimizer produced one.
    pub optimal_sigma: Option<DensityMatrix>,
    /// The kernel maximum the value was transformed from.
    pub kernel_value: f64,
}

/// The monotone transform taking a kernel maximum to the measure value.
fn kernel_to_measure(family: MeasureFamily, alpha: Alpha, kernel: f64) -> f64 {
    let a = alpha.value();
    let k = kernel.max(0.0);
    match family {
        MeasureFamily::TsallisT => 1.0 - k.powf(1.0 / a),
        MeasureFamily::SandwichedS => (k.powf(1.0 / (1.0 - a)) - 1.0) / (a - 1.0),
        MeasureFamily::OperatorO => (k.powf(1.0 / a) - 1.0) / (a - 1.0),
    }
}

fn finish(
    kind: MeasureKind,
    method: MeasureMethod,
    sigma: DensityMatrix,
    kernel: f64,
) -> Result<MeasureResult> {
    let value = kernel_to_measure(kind.family, kind.alpha, kernel);
    if value < -MEASURE_NEG_TOL {
        return Err(Error::Numerical(format!(
            "measure came out {value:.3e}, below the round-off allowance"
        )));
    }
    Ok(MeasureResult {
        value: value.max(0.0),
        method,
        optimal_sigma: Some(sigma),
        kernel_value: kernel,
    })
}

fn prepared(rho: &DensityMatrix, kind: MeasureKind) -> Result<PreparedKernel> {
    match kind.family {
        MeasureFamily::TsallisT => PreparedKernel::tsallis(rho, kind.alpha),
        MeasureFamily::SandwichedS => PreparedKernel::sandwiched(rho, kind.alpha),
        MeasureFamily::OperatorO => PreparedKernel::operator(rho, kind.alpha),
    }
}

/// The measure as defined: kernel maximized over the whole free set.
pub fn measure_definitional(
    rho: &DensityMatrix,
    kind: MeasureKind,
    cfg: &OptConfig,
) -> Result<MeasureResult> {
    let kernel = prepared(rho, kind)?;
    let (sigma, k) = maximize_over_real_states(|s| kernel.eval(s.matrix()), rho.dim(), cfg)?;
    finish(kind, MeasureMethod::Definitional, sigma, k)
}

/// The measure with the kernel maximized over pure real states only, the
/// restriction used by the qubit closed-form derivations.
pub fn measure_pure_restricted(
    rho: &DensityMatrix,
    kind: MeasureKind,
    cfg: &OptConfig,
) -> Result<MeasureResult> {
    let kernel = prepared(rho, kind)?;
    let (sigma, k) = maximize_over_pure_real_states(|s| kernel.eval(s.matrix()), rho.dim(), cfg)?;
    finish(kind, MeasureMethod::PureRestricted, sigma, k)
}

/// Brute-force ground truth for qubits: the kernel maximum from an exhaustive
/// grid over all real qubit states.
pub fn measure_grid_oracle(
    rho: &DensityMatrix,
    kind: MeasureKind,
    resolution: usize,
) -> Result<MeasureResult> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: rho.dim(),
            context: "the grid oracle scans qubit states only",
        });
    }
    let kernel = prepared(rho, kind)?;
    let (sigma, k) = grid_oracle_qubit(|s| kernel.eval(s.matrix()), resolution)?;
    finish(kind, MeasureMethod::GridOracle, sigma, k)
}

/// Closed form for a qubit pure state with imaginarity parameter `a`.
pub fn closed_form_pure(a: f64, kind: MeasureKind) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&a) {
        return Err(Error::Validation(format!(
            "imaginarity parameter {a} outside [0, 1]"
        )));
    }
    let base = (1.0 + a.clamp(0.0, 1.0)) / 2.0;
    let al = kind.alpha.value();
    Ok(match kind.family {
        MeasureFamily::TsallisT => 1.0 - base.powf(1.0 / al),
        MeasureFamily::SandwichedS => (base.powf(al / (1.0 - al)) - 1.0) / (al - 1.0),
        MeasureFamily::OperatorO => (base.powf((1.0 - al) / al) - 1.0) / (al - 1.0),
    })
}

/// Closed form for a pure qubit state in canonical form with off-diagonal
/// real part `x` (so `x + 1/2` plays the role of `(1 + A)/2`).
pub fn closed_form_canonical_x(x: f64, kind: MeasureKind) -> Result<f64> {
    if !(-1e-12..=0.5 + 1e-12).contains(&x) {
        return Err(Error::Validation(format!(
            "canonical parameter {x} outside [0, 1/2]"
        )));
    }
    Ok(canonical_x_value(x.clamp(0.0, 0.5), kind))
}

pub(crate) fn canonical_x_value(x: f64, kind: MeasureKind) -> f64 {
    let base = x + 0.5;
    let al = kind.alpha.value();
    match kind.family {
        MeasureFamily::TsallisT => 1.0 - base.powf(1.0 / al),
        MeasureFamily::SandwichedS => (base.powf(al / (1.0 - al)) - 1.0) / (al - 1.0),
        MeasureFamily::OperatorO => (base.powf(1.0 / al - 1.0) - 1.0) / (al - 1.0),
    }
}

/// Closed form for a canonical pure state `(x, y)` after the bit-flip channel
/// with parameter `m`, in terms of `X11 = sqrt((1-2m)^2 y^2 + x^2)`.
///
/// The operator-family expression is evaluated with the two trailing signs of
/// its printed source flipped; as printed it fails to vanish on real states
/// (`m = 1/2` gives `1/(alpha-1)` instead of 0) and contradicts both its own
/// derivative and the `m` endpoints, while the sign-corrected form reduces to
/// the canonical-x closed form at `m in {0, 1}` and to 0 at `m = 1/2`.
pub fn closed_form_after_bitflip(x: f64, y: f64, m: f64, kind: MeasureKind) -> Result<f64> {
    if x < -1e-12 || y < -1e-12 {
        return Err(Error::Validation(format!(
            "canonical parameters must be non-negative, got x={x}, y={y}"
        )));
    }
    let circle = x * x + y * y - 0.25;
    if circle.abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "(x, y) must satisfy x^2 + y^2 = 1/4, off by {circle:.3e}"
        )));
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Validation(format!(
            "channel parameter m = {m} outside [0, 1]"
        )));
    }
    Ok(bitflip_value(x.max(0.0), y.max(0.0), m, kind))
}

/// Unvalidated evaluation, shared with the finite-difference probes which
/// must hold `y` fixed while stepping `x` slightly off the circle.
pub(crate) fn bitflip_value(x: f64, y: f64, m: f64, kind: MeasureKind) -> f64 {
    let al = kind.alpha.value();
    let x11 = ((1.0 - 2.0 * m).powi(2) * y * y + x * x).sqrt();
    if x11 < 1e-15 {
        // Off-diagonal of the output vanishes entirely: a real state.
        return 0.0;
    }
    let ratio = x / x11;
    match kind.family {
        MeasureFamily::TsallisT => {
            1.0 - 2f64.powf(-1.0 / al) * (ratio + 1.0).powf(1.0 / al)
        }
        MeasureFamily::SandwichedS => {
            (2f64.powf(al / (al - 1.0)) * (ratio + 1.0).powf(al / (1.0 - al)) - 1.0) / (al - 1.0)
        }
        MeasureFamily::OperatorO => {
            let bracket = x11 * (2f64.powf(1.0 / al) - 2.0 * (ratio + 1.0).powf(1.0 / al))
                + 2f64.powf(1.0 / al) * x;
            -(2f64.powf(-1.0 / al) * bracket) / ((al - 1.0) * (x11 + x))
        }
    }
}

/// The inequality-chain gaps for pure states:
/// `delta1 = M_S - M_O`, `delta2 = M_O - M_T` from the closed forms.
pub fn inequality_gaps(a: f64, alpha: Alpha) -> Result<(f64, f64)> {
    let t = closed_form_pure(a, MeasureKind::new(MeasureFamily::TsallisT, alpha))?;
    let s = closed_form_pure(a, MeasureKind::new(MeasureFamily::SandwichedS, alpha))?;
    let o = closed_form_pure(a, MeasureKind::new(MeasureFamily::OperatorO, alpha))?;
    Ok((s - o, o - t))
}

/// Side-by-side evaluation by every applicable method.
#[derive(Debug)]
pub struct MethodComparison {
    pub definitional: MeasureResult,
    pub pure_restricted: MeasureResult,
    /// Closed form, present when the state is pure with known parameter.
    pub closed_form: Option<f64>,
}

/// Runs the definitional and pure-restricted optimizations and, when the
/// imaginarity parameter is supplied, the closed form, so callers can see the
/// discrepancies directly.
pub fn compare_methods(
    rho: &DensityMatrix,
    a: Option<f64>,
    kind: MeasureKind,
    cfg: &OptConfig,
) -> Result<MethodComparison> {
    Ok(MethodComparison {
        definitional: measure_definitional(rho, kind, cfg)?,
        pure_restricted: measure_pure_restricted(rho, kind, cfg)?,
        closed_form: match a {
            Some(a) => Some(closed_form_pure(a, kind)?),
            None => None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        canonical_pure_state, direct_sum, is_real_state, random_density, random_pure,
        random_real_density, random_real_orthogonal,
    };

    fn kind(family: MeasureFamily, a: f64) -> MeasureKind {
        MeasureKind::new(family, Alpha::new(a).unwrap())
    }

    #[test]
    fn closed_form_pure_spot_values() {
        for family in MeasureFamily::ALL {
            for a in [0.5, 0.75, 0.9] {
                assert!(closed_form_pure(1.0, kind(family, a)).unwrap().abs() < 1e-15);
            }
        }
        assert!((closed_form_pure(0.0, kind(MeasureFamily::TsallisT, 0.5)).unwrap() - 0.75).abs() < 1e-15);
        assert!((closed_form_pure(0.0, kind(MeasureFamily::SandwichedS, 0.5)).unwrap() - 1.0).abs() < 1e-12);
        assert!((closed_form_pure(0.0, kind(MeasureFamily::OperatorO, 0.5)).unwrap() - 1.0).abs() < 1e-12);

        let t = closed_form_pure(0.0, kind(MeasureFamily::TsallisT, 0.75)).unwrap();
        assert!((t - (1.0 - 2f64.powf(-4.0 / 3.0))).abs() < 1e-14);
        let s = closed_form_pure(0.0, kind(MeasureFamily::SandwichedS, 0.75)).unwrap();
        assert!((s - 3.5).abs() < 1e-12);
        let o = closed_form_pure(0.0, kind(MeasureFamily::OperatorO, 0.75)).unwrap();
        assert!((o - 4.0 * (1.0 - 2f64.powf(-1.0 / 3.0))).abs() < 1e-12);

        assert!(closed_form_pure(1.2, kind(MeasureFamily::TsallisT, 0.75)).is_err());
    }

    #[test]
    fn canonical_x_spot_values() {
        for family in MeasureFamily::ALL {
            assert!(closed_form_canonical_x(0.5, kind(family, 0.75)).unwrap().abs() < 1e-14);
        }
        let s = closed_form_canonical_x(0.0, kind(MeasureFamily::SandwichedS, 0.75)).unwrap();
        assert!((s - 3.5).abs() < 1e-12);
        let t = closed_form_canonical_x(0.3, kind(MeasureFamily::TsallisT, 0.5)).unwrap();
        assert!((t - 0.36).abs() < 1e-14);
        assert!(closed_form_canonical_x(0.6, kind(MeasureFamily::TsallisT, 0.5)).is_err());

        // x + 1/2 = (1 + A)/2 with A = 2x: both closed forms agree on pure states.
        for family in MeasureFamily::ALL {
            for xi in 0..=10 {
                let x = 0.05 * xi as f64;
                let via_x = closed_form_canonical_x(x, kind(family, 0.8)).unwrap();
                let via_a = closed_form_pure(2.0 * x, kind(family, 0.8)).unwrap();
                assert!((via_x - via_a).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn after_bitflip_reduces_correctly() {
        // m = 1/2 makes the off-diagonal real: every family reports zero.
        for family in MeasureFamily::ALL {
            let v = closed_form_after_bitflip(0.3, 0.4, 0.5, kind(family, 0.75)).unwrap();
            assert!(v.abs() < 1e-12, "{family:?} at m=1/2 gave {v}");
        }
        // m in {0, 1} leaves the measure at its input value.
        for family in MeasureFamily::ALL {
            for m in [0.0, 1.0] {
                let v = closed_form_after_bitflip(0.3, 0.4, m, kind(family, 0.75)).unwrap();
                let expect = closed_form_canonical_x(0.3, kind(family, 0.75)).unwrap();
                assert!((v - expect).abs() < 1e-12);
            }
        }
        // y = 0 forces x = 1/2: a real pure state, measure zero for all m.
        for family in MeasureFamily::ALL {
            for m in [0.0, 0.3, 0.7, 1.0] {
                let v = closed_form_after_bitflip(0.5, 0.0, m, kind(family, 0.6)).unwrap();
                assert!(v.abs() < 1e-12);
            }
        }
        assert!(closed_form_after_bitflip(0.3, 0.3, 0.5, kind(MeasureFamily::TsallisT, 0.75)).is_err());
        assert!(closed_form_after_bitflip(0.3, 0.4, 1.5, kind(MeasureFamily::TsallisT, 0.75)).is_err());
    }

    #[test]
    fn real_states_measure_zero() {
        let cfg = OptConfig::seeded(5);
        for seed in 0..5u64 {
            let rho = random_real_density(2, seed).unwrap();
            for family in MeasureFamily::ALL {
                for a in [0.5, 0.75, 0.9] {
                    let m = measure_definitional(&rho, kind(family, a), &cfg).unwrap();
                    assert!(
                        m.value <= 1e-7,
                        "real state, {family:?} alpha={a}: {}",
                        m.value
                    );
                }
            }
        }
    }

    #[test]
    fn sandwiched_definitional_matches_closed_form() {
        let cfg = OptConfig::seeded(9);
        let rho = canonical_pure_state(0.0).unwrap().density();
        let m = measure_definitional(&rho, kind(MeasureFamily::SandwichedS, 0.75), &cfg).unwrap();
        assert!((m.value - 3.5).abs() < 1e-5);
        assert!((m.kernel_value - 0.5f64.powf(0.75)).abs() < 1e-6);
    }

    /// Independent oracle for the definitional Tsallis value on canonical
    /// pure states: the kernel reduces to a diagonal two-point problem whose
    /// optimum weight is known in closed form.
    fn tsallis_definitional_oracle(a: f64, alpha: f64) -> f64 {
        let a0 = (1.0 + a) / 2.0;
        let a1 = (1.0 - a) / 2.0;
        if a1 < 1e-15 {
            return 0.0;
        }
        let r = (a0 / a1).powf(1.0 / alpha);
        let q = r / (1.0 + r);
        let kernel = a0 * q.powf(1.0 - alpha) + a1 * (1.0 - q).powf(1.0 - alpha);
        1.0 - kernel.powf(1.0 / alpha)
    }

    #[test]
    fn tsallis_definitional_differs_from_pure_restricted() {
        let cfg = OptConfig::seeded(13);
        let rho = canonical_pure_state(0.0).unwrap().density();
        let k = kind(MeasureFamily::TsallisT, 0.75);

        let definitional = measure_definitional(&rho, k, &cfg).unwrap();
        assert!((definitional.value - (1.0 - 2f64.powf(-1.0 / 3.0))).abs() < 1e-5);
        assert!((definitional.kernel_value - 2f64.powf(-0.25)).abs() < 1e-6);

        let restricted = measure_pure_restricted(&rho, k, &cfg).unwrap();
        assert!((restricted.value - (1.0 - 2f64.powf(-4.0 / 3.0))).abs() < 1e-6);

        let oracle = measure_grid_oracle(&rho, k, 256).unwrap();
        assert!((oracle.value - definitional.value).abs() < 1e-4);

        // The independent diagonal oracle agrees across the A grid.
        for ai in 0..=5 {
            let a = ai as f64 / 5.0;
            let rho = canonical_pure_state(a).unwrap().density();
            let expect = tsallis_definitional_oracle(a, 0.75);
            let got = measure_definitional(&rho, k, &cfg).unwrap().value;
            assert!(
                (got - expect).abs() < 1e-5,
                "A={a}: optimizer {got} vs oracle {expect}"
            );
        }
    }

    #[test]
    fn pure_restricted_spot_values() {
        let cfg = OptConfig::seeded(21);
        let rho = canonical_pure_state(0.0).unwrap().density();
        let m = measure_pure_restricted(&rho, kind(MeasureFamily::OperatorO, 0.5), &cfg).unwrap();
        assert!((m.value - 1.0).abs() < 1e-6);

        let real = canonical_pure_state(1.0).unwrap().density();
        for family in MeasureFamily::ALL {
            let m = measure_pure_restricted(&real, kind(family, 0.75), &cfg).unwrap();
            assert!(m.value < 1e-7);
        }
    }

    #[test]
    fn theorem_consistency_on_a_small_grid() {
        let cfg = OptConfig::seeded(31);
        for family in MeasureFamily::ALL {
            for &(a, al) in &[(0.0, 0.5), (0.5, 0.75), (0.9, 0.9)] {
                let k = kind(family, al);
                let rho = canonical_pure_state(a).unwrap().density();
                let cf = closed_form_pure(a, k).unwrap();
                let pr = measure_pure_restricted(&rho, k, &cfg).unwrap();
                assert!(
                    (pr.value - cf).abs() < 1e-6,
                    "{family:?} A={a} alpha={al}: restricted {} vs closed {cf}",
                    pr.value
                );
                if family != MeasureFamily::TsallisT {
                    let df = measure_definitional(&rho, k, &cfg).unwrap();
                    assert!(
                        (df.value - cf).abs() < 1e-5,
                        "{family:?} A={a} alpha={al}: definitional {} vs closed {cf}",
                        df.value
                    );
                }
            }
        }
    }

    #[test]
    fn measures_are_orthogonal_invariants() {
        let cfg = OptConfig::seeded(17);
        for seed in 0..3u64 {
            let psi = random_pure(2, seed).unwrap();
            let rho = psi.density();
            let o = random_real_orthogonal(2, seed ^ 0x77).unwrap();
            let rotated = rho.conjugated_by(&o).unwrap();
            for family in MeasureFamily::ALL {
                let k = kind(family, 0.75);
                let m1 = measure_definitional(&rho, k, &cfg).unwrap().value;
                let m2 = measure_definitional(&rotated, k, &cfg).unwrap().value;
                assert!((m1 - m2).abs() < 1e-6, "{family:?} seed {seed}: {m1} vs {m2}");
            }
        }
    }

    #[test]
    fn additivity_on_direct_sums() {
        let cfg = OptConfig::seeded(23);
        for (seed, p) in [(1u64, 0.25), (2, 0.5), (3, 0.75)] {
            let rho1 = random_density(2, 2, seed).unwrap();
            let rho2 = random_density(2, 2, seed ^ 0xaa).unwrap();
            let combined = direct_sum(p, &rho1, &rho2).unwrap();
            let k = kind(MeasureFamily::TsallisT, 0.75);
            let lhs = measure_definitional(&combined, k, &cfg).unwrap().value;
            let rhs = p * measure_definitional(&rho1, k, &cfg).unwrap().value
                + (1.0 - p) * measure_definitional(&rho2, k, &cfg).unwrap().value;
            assert!((lhs - rhs).abs() < 1e-4, "p={p}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn inequality_gap_values() {
        let alpha = Alpha::new(0.75).unwrap();
        let (d1, d2) = inequality_gaps(1.0, alpha).unwrap();
        assert!(d1.abs() < 1e-12 && d2.abs() < 1e-12);

        let (d1, d2) = inequality_gaps(0.0, alpha).unwrap();
        assert!((d1 - (3.5 - 4.0 * (1.0 - 2f64.powf(-1.0 / 3.0)))).abs() < 1e-12);
        assert!((d2 - (4.0 * (1.0 - 2f64.powf(-1.0 / 3.0)) - (1.0 - 2f64.powf(-4.0 / 3.0)))).abs() < 1e-12);

        let (d1, d2) = inequality_gaps(0.0, Alpha::new(0.5).unwrap()).unwrap();
        assert!(d1.abs() < 1e-12);
        assert!((d2 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn optimizer_sigma_satisfies_state_invariants() {
        let cfg = OptConfig::seeded(29);
        let rho = canonical_pure_state(0.4).unwrap().density();
        for family in MeasureFamily::ALL {
            let m = measure_definitional(&rho, kind(family, 0.75), &cfg).unwrap();
            let sigma = m.optimal_sigma.unwrap();
            assert!(is_real_state(&sigma, 1e-9));
            assert!(crate::states::DensityMatrix::new(sigma.matrix().clone()).is_ok());
            // Value and kernel stay consistent under the family transform.
            let redone = kernel_to_measure(family, Alpha::new(0.75).unwrap(), m.kernel_value);
            assert!((redone.max(0.0) - m.value).abs() < 1e-10);
        }
    }
}
