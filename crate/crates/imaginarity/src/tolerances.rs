//! Central numerical tolerances.
//!
//! Every threshold used by the validators and numerical routines lives here,
//! so that the invariants checked by the test suites and the ones enforced at
//! runtime cannot drift apart.

/// Maximum allowed `|M[i][j] - conj(M[j][i])|` for a matrix tagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Maximum allowed `|tr(rho) - 1|` for a density matrix.
pub const TRACE_TOL: f64 = 1e-10;

/// Most negative eigenvalue tolerated on a PSD input; anything in
/// `[-PSD_TOL, 0)` is treated as round-off and clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

/// Support detection threshold for matrix pseudo-powers: eigenvalues at or
/// below this are mapped to zero, which extends negative powers to singular
/// states.
pub const RANK_TOL: f64 = 1e-10;

/// Off-diagonal convergence threshold for the cyclic Jacobi eigensolver.
pub const JACOBI_OFF_TOL: f64 = 1e-13;

/// Sweep cap for the Jacobi eigensolver; dimensions here are <= 8, where a
/// handful of sweeps suffices.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Largest imaginary part tolerated on a trace that is real by symmetry.
pub const KERNEL_IMAG_TOL: f64 = 1e-9;

/// Maximum allowed `max|sum_j K_j^dag K_j - I|` for a trace-preserving channel.
pub const CPTP_TOL: f64 = 1e-9;

/// Norm tolerance for pure-state amplitudes.
pub const PURE_NORM_TOL: f64 = 1e-12;

/// Below this squared norm the optimizer parametrizations are degenerate and
/// the step is rejected with a sentinel instead of being evaluated.
pub const DEGENERATE_NORM_TOL: f64 = 1e-12;

/// Restart tie-breaking window: the first restart within this of the best
/// value wins, which keeps multi-start results deterministic.
pub const RESTART_TIE_TOL: f64 = 1e-12;

/// Measures may come out this slightly negative from round-off before being
/// clamped to zero; anything more negative is a hard numerical error.
pub const MEASURE_NEG_TOL: f64 = 1e-9;

/// Square-root arguments in the decay coefficient expressions may round to
/// this slightly negative before being clamped to zero.
pub const SQRT_ARG_TOL: f64 = 1e-9;

/// Tie tolerance for state-ordering comparisons: value gaps at or below this
/// count as ties and are compatible with either direction.
pub const ORDER_TIE_TOL: f64 = 1e-9;
