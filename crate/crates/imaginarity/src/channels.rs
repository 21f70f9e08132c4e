//! Kraus-operator channels: CPTP/realness validation, the bit-flip,
//! phase-damping and amplitude-damping families, their closed-form action on
//! canonical pure states, and random real channels for monotonicity testing.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::DensityMatrix;
use crate::tolerances::CPTP_TOL;

/// A channel presented as a list of equal-dimension Kraus operators.
///
/// Construction checks shape only; completeness is a separate query so that
/// deliberately broken operator lists can be inspected.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Validation("channel needs at least one Kraus operator".into()))?;
        let dim = first.dim();
        for k in &kraus {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
        }
        Ok(Self {
            kraus,
            label: label.into(),
        })
    }

    #[inline]
    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    #[inline]
    pub fn label(&self) -> &str {
        &self.label
    }

    /// True iff `sum_j K_j^dag K_j = I` within [`CPTP_TOL`].
    pub fn validate_cptp(&self) -> bool {
        let d = self.dim();
        let mut acc = ComplexMatrix::zeros(d);
        for k in &self.kraus {
            let kd = k.adjoint();
            acc = acc.add(&kd.matmul(k).expect("same dims")).expect("same dims");
        }
        acc.max_abs_diff(&ComplexMatrix::identity(d))
            .expect("same dims")
            <= CPTP_TOL
    }

    /// True iff every Kraus entry has `|Im| <= tol`.
    pub fn is_real_channel(&self, tol: f64) -> bool {
        self.kraus.iter().all(|k| k.max_imag() <= tol)
    }

    /// `sum_j K_j rho K_j^dag`, validated as a density matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rho.dim(),
            });
        }
        let d = self.dim();
        let mut acc = ComplexMatrix::zeros(d);
        for k in &self.kraus {
            let term = k.matmul(rho.matrix())?.matmul(&k.adjoint())?;
            acc = acc.add(&term)?;
        }
        DensityMatrix::new(acc)
    }
}

/// The three named qubit channel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    BitFlip,
    PhaseDamping,
    AmplitudeDamping,
}

impl ChannelKind {
    /// Short label used in channel specs and CSV output.
    pub fn label(self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "bf",
            ChannelKind::PhaseDamping => "pd",
            ChannelKind::AmplitudeDamping => "ad",
        }
    }

    /// The parameter letter conventionally attached to the family.
    pub fn param_name(self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "m",
            ChannelKind::PhaseDamping => "n",
            ChannelKind::AmplitudeDamping => "p",
        }
    }

    pub fn build(self, param: f64) -> Result<KrausChannel> {
        match self {
            ChannelKind::BitFlip => bit_flip(param),
            ChannelKind::PhaseDamping => phase_damping(param),
            ChannelKind::AmplitudeDamping => amplitude_damping(param),
        }
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bf" => Ok(ChannelKind::BitFlip),
            "pd" => Ok(ChannelKind::PhaseDamping),
            "ad" => Ok(ChannelKind::AmplitudeDamping),
            other => Err(Error::Parse(format!(
                "unknown channel kind {other:?}, expected bf, pd or ad"
            ))),
        }
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Validation(format!(
            "channel parameter {name} = {v} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Bit flip: `E0 = sqrt(m) I`, `E1 = sqrt(1-m) X`.
pub fn bit_flip(m: f64) -> Result<KrausChannel> {
    check_unit_interval("m", m)?;
    let e0 = ComplexMatrix::from_real(2, &[m.sqrt(), 0.0, 0.0, m.sqrt()])?;
    let e1 = ComplexMatrix::from_real(2, &[0.0, (1.0 - m).sqrt(), (1.0 - m).sqrt(), 0.0])?;
    KrausChannel::new(vec![e0, e1], format!("bf:m={m}"))
}

/// Phase damping: `E0 = diag(1, sqrt(1-n))`, `E1 = diag(0, sqrt(n))`.
pub fn phase_damping(n: f64) -> Result<KrausChannel> {
    check_unit_interval("n", n)?;
    let e0 = ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - n).sqrt()])?;
    let e1 = ComplexMatrix::from_real(2, &[0.0, 0.0, 0.0, n.sqrt()])?;
    KrausChannel::new(vec![e0, e1], format!("pd:n={n}"))
}

/// Amplitude damping: `E0 = diag(1, sqrt(1-p))`, `E1 = [[0, sqrt(p)], [0, 0]]`.
pub fn amplitude_damping(p: f64) -> Result<KrausChannel> {
    check_unit_interval("p", p)?;
    let e0 = ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - p).sqrt()])?;
    let e1 = ComplexMatrix::from_real(2, &[0.0, p.sqrt(), 0.0, 0.0])?;
    KrausChannel::new(vec![e0, e1], format!("ad:p={p}"))
}

/// Closed-form image of the canonical pure state with imaginarity parameter
/// `a` under the named channel, written out entry by entry.
///
/// Agrees with `ChannelKind::build(param).apply(...)` on the canonical state
/// to machine precision; the two routes cross-check each other.
pub fn channel_transformed_state(kind: ChannelKind, a: f64, param: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Validation(format!(
            "imaginarity parameter {a} outside [0, 1]"
        )));
    }
    check_unit_interval(kind.param_name(), param)?;
    let root = (1.0 - a * a).max(0.0).sqrt();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let mat = match kind {
        ChannelKind::BitFlip => {
            let m = param;
            ComplexMatrix::from_vec(
                2,
                vec![
                    c(a * (m - 0.5) + 0.5, 0.0),
                    c(0.0, 0.5 * root * (1.0 - 2.0 * m)),
                    c(0.0, 0.5 * root * (2.0 * m - 1.0)),
                    c(0.5 * (-2.0 * a * m + a + 1.0), 0.0),
                ],
            )?
        }
        ChannelKind::PhaseDamping => {
            let n = param;
            ComplexMatrix::from_vec(
                2,
                vec![
                    c((a + 1.0) / 2.0, 0.0),
                    c(0.0, -0.5 * root * (1.0 - n).sqrt()),
                    c(0.0, 0.5 * root * (1.0 - n).sqrt()),
                    c((1.0 - a) / 2.0, 0.0),
                ],
            )?
        }
        ChannelKind::AmplitudeDamping => {
            let p = param;
            ComplexMatrix::from_vec(
                2,
                vec![
                    c(0.5 * (a * (-p) + a + p + 1.0), 0.0),
                    c(0.0, -0.5 * root * (1.0 - p).sqrt()),
                    c(0.0, 0.5 * root * (1.0 - p).sqrt()),
                    c(0.5 * (a - 1.0) * (p - 1.0), 0.0),
                ],
            )?
        }
    };
    DensityMatrix::new(mat)
}

/// Random real channel with `n_kraus` operators: a real-normal
/// `(n_kraus * dim) x dim` draw is column-orthonormalized into a real isometry
/// and sliced into Kraus blocks, so completeness and realness hold by
/// construction.
pub fn random_real_channel(dim: usize, n_kraus: usize, seed: u64) -> Result<KrausChannel> {
    if n_kraus < 1 {
        return Err(Error::Validation("channel needs n_kraus >= 1".into()));
    }
    let rows = n_kraus * dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = (0..dim)
        .map(|_| {
            (0..rows)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect()
        })
        .collect();
    for c in 0..dim {
        for _ in 0..2 {
            for prev in 0..c {
                let dot: f64 = (0..rows).map(|i| cols[c][i] * cols[prev][i]).sum();
                for i in 0..rows {
                    cols[c][i] -= dot * cols[prev][i];
                }
            }
        }
        let norm: f64 = cols[c].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::Numerical(
                "rank-deficient draw while sampling a real isometry".into(),
            ));
        }
        for x in &mut cols[c] {
            *x /= norm;
        }
    }
    let mut kraus = Vec::with_capacity(n_kraus);
    for block in 0..n_kraus {
        let mut k = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for (j, col) in cols.iter().enumerate() {
                k.set(i, j, Complex64::new(col[block * dim + i], 0.0));
            }
        }
        kraus.push(k);
    }
    KrausChannel::new(kraus, format!("random-real(dim={dim},k={n_kraus},seed={seed})"))
}

/// A parsed `--channel` argument.
#[derive(Debug, Clone)]
pub enum ChannelSpec {
    /// A named family, optionally pinned to a parameter value.
    Named(ChannelKind, Option<f64>),
    /// A JSON Kraus file.
    File(std::path::PathBuf),
}

/// Parses channel specs of the form `bf`, `bf:m=0.3`, `pd:n=0.2`, `ad:p=0.1`
/// or `file:<path>`.
pub fn parse_channel_spec(spec: &str) -> Result<ChannelSpec> {
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(ChannelSpec::File(std::path::PathBuf::from(path)));
    }
    match spec.split_once(':') {
        None => Ok(ChannelSpec::Named(spec.parse()?, None)),
        Some((kind, assignment)) => {
            let kind: ChannelKind = kind.parse()?;
            let (name, value) = assignment.split_once('=').ok_or_else(|| {
                Error::Parse(format!("expected {}=<value> in {spec:?}", kind.param_name()))
            })?;
            if name != kind.param_name() {
                return Err(Error::Parse(format!(
                    "channel {} takes parameter {}, got {name:?}",
                    kind.label(),
                    kind.param_name()
                )));
            }
            let value: f64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("bad parameter value in {spec:?}")))?;
            Ok(ChannelSpec::Named(kind, Some(value)))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct KrausJson {
    kraus: Vec<KrausOpJson>,
}

#[derive(Serialize, Deserialize)]
struct KrausOpJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Loads a channel from JSON `{ "kraus": [ { "re": [[..]], "im": [[..]] }, .. ] }`
/// and requires it to be trace preserving.
pub fn load_channel_json(text: &str) -> Result<KrausChannel> {
    let parsed: KrausJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut ops = Vec::with_capacity(parsed.kraus.len());
    for op in &parsed.kraus {
        let d = op.re.len();
        if op.im.len() != d || op.re.iter().chain(op.im.iter()).any(|r| r.len() != d) {
            return Err(Error::Parse("kraus re/im grids must be square".into()));
        }
        let re: Vec<f64> = op.re.iter().flatten().copied().collect();
        let im: Vec<f64> = op.im.iter().flatten().copied().collect();
        ops.push(ComplexMatrix::from_re_im(d, &re, &im)?);
    }
    let ch = KrausChannel::new(ops, "file")?;
    if !ch.validate_cptp() {
        return Err(Error::Validation(
            "channel file is not trace preserving".into(),
        ));
    }
    Ok(ch)
}
