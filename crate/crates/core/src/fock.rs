//! Truncated bosonic Fock spaces and operators embedded into their tensor
//! product.
//!
//! Modes are stored in a fixed canonical order `a_0, b_0, a_1, b_1, ...,
//! a_{N-1}, b_{N-1}, c`, cavity last, and the basis index is the mixed-radix
//! number whose most significant digit is the first mode. Particle indices
//! are zero-based throughout the crate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Hermiticity tolerance applied when an operator carries the Hermitian hint.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest imaginary part accepted from the expectation of a Hermitian operator.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;
/// Normalisation tolerance for constructed states.
pub const NORM_TOL: f64 = 1e-9;

/// Identity of a bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ModeId {
    /// Electronic mode of particle `i`.
    A(usize),
    /// Phonon mode of particle `i`.
    B(usize),
    /// The shared cavity mode.
    Cavity,
}

impl ModeId {
    fn order_key(self) -> (usize, u8) {
        match self {
            ModeId::A(i) => (i, 0),
            ModeId::B(i) => (i, 1),
            ModeId::Cavity => (usize::MAX, 2),
        }
    }
}

impl Ord for ModeId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for ModeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeId::A(i) => write!(f, "a{i}"),
            ModeId::B(i) => write!(f, "b{i}"),
            ModeId::Cavity => f.write_str("c"),
        }
    }
}

impl FromStr for ModeId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "c" {
            return Ok(ModeId::Cavity);
        }
        let (head, tail) = s.split_at(s.len().min(1));
        let index: usize = tail.parse().map_err(|_| format!("bad mode label {s:?}"))?;
        match head {
            "a" => Ok(ModeId::A(index)),
            "b" => Ok(ModeId::B(index)),
            _ => Err(format!("bad mode label {s:?}")),
        }
    }
}

impl From<ModeId> for String {
    fn from(m: ModeId) -> Self {
        m.to_string()
    }
}

impl TryFrom<String> for ModeId {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub mode: ModeId,
    pub dim: usize,
}

impl ModeSpec {
    pub fn new(mode: ModeId, dim: usize) -> Self {
        Self { mode, dim }
    }
}

/// Ordered list of truncated modes and the resulting tensor-product dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    modes: Vec<ModeSpec>,
    strides: Vec<usize>,
    total_dim: usize,
}

/// Builds a space from mode specs given in any order; the result uses the
/// canonical ordering.
pub fn make_space(specs: &[ModeSpec]) -> Result<HilbertSpace> {
    if specs.is_empty() {
        return Err(Error::EmptySpace);
    }
    let mut modes = specs.to_vec();
    modes.sort_by_key(|s| s.mode);
    for pair in modes.windows(2) {
        if pair[0].mode == pair[1].mode {
            return Err(Error::DuplicateMode(pair[0].mode));
        }
    }
    let mut total_dim = 1usize;
    for s in &modes {
        if s.dim < 2 {
            return Err(Error::InvalidDimension {
                mode: s.mode,
                dim: s.dim,
            });
        }
        total_dim = total_dim.checked_mul(s.dim).ok_or(Error::DimensionOverflow)?;
    }
    let mut strides = vec![1usize; modes.len()];
    for k in (0..modes.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * modes[k + 1].dim;
    }
    Ok(HilbertSpace {
        modes,
        strides,
        total_dim,
    })
}

impl HilbertSpace {
    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Position of `mode` in the canonical ordering.
    pub fn position(&self, mode: ModeId) -> Result<usize> {
        self.modes
            .binary_search_by(|s| s.mode.cmp(&mode))
            .map_err(|_| Error::UnknownMode(mode))
    }

    pub fn dim_of(&self, mode: ModeId) -> Result<usize> {
        Ok(self.modes[self.position(mode)?].dim)
    }

    /// Occupation of the mode at canonical position `pos` in basis state `index`.
    pub fn occupation(&self, index: usize, pos: usize) -> usize {
        (index / self.strides[pos]) % self.modes[pos].dim
    }

    /// Basis index of the product state with the given occupations, listed in
    /// canonical mode order.
    pub fn basis_index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes.len() {
            return Err(Error::InvalidRecipe(format!(
                "expected {} occupations, got {}",
                self.modes.len(),
                occupations.len()
            )));
        }
        let mut index = 0;
        for ((spec, &n), &stride) in self.modes.iter().zip(occupations).zip(&self.strides) {
            if n >= spec.dim {
                return Err(Error::OccupationOutOfRange {
                    mode: spec.mode,
                    occupation: n,
                    dim: spec.dim,
                });
            }
            index += n * stride;
        }
        Ok(index)
    }
}

/// A matrix on a single truncated mode, stored column-wise for embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOp {
    dim: usize,
    columns: Vec<Vec<(usize, Complex64)>>,
}

impl LocalOp {
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut columns = vec![Vec::new(); dim];
        for (r, c, v) in entries {
            assert!(r < dim && c < dim);
            columns[c].push((r, v));
        }
        for col in &mut columns {
            col.sort_by_key(|&(r, _)| r);
        }
        Self { dim, columns }
    }

    /// Truncated annihilation operator: `sqrt(n)` on the first superdiagonal.
    pub fn lowering(dim: usize) -> Self {
        Self::from_entries(dim, (1..dim).map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0))))
    }

    pub fn raising(dim: usize) -> Self {
        Self::from_entries(dim, (1..dim).map(|n| (n, n - 1, Complex64::new((n as f64).sqrt(), 0.0))))
    }

    pub fn number(dim: usize) -> Self {
        Self::from_entries(dim, (1..dim).map(|n| (n, n, Complex64::new(n as f64, 0.0))))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_entries(self.dim, self.entries().map(|(r, c, v)| (r, c, v * factor)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut dense = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for (r, c, v) in self.entries().chain(other.entries()) {
            dense[r * self.dim + c] += v;
        }
        Self::from_entries(
            self.dim,
            dense
                .into_iter()
                .enumerate()
                .filter(|(_, v)| v.norm() != 0.0)
                .map(|(k, v)| (k / self.dim, k % self.dim, v)),
        )
    }
}

/// `coeff * (X_1 ⊗ X_2 ⊗ ...)` for local factors acting on distinct modes,
/// identity elsewhere.
#[derive(Debug, Clone)]
pub struct ProductTerm {
    pub coeff: Complex64,
    pub factors: Vec<(ModeId, LocalOp)>,
}

impl ProductTerm {
    pub fn new(coeff: Complex64, factors: Vec<(ModeId, LocalOp)>) -> Self {
        Self { coeff, factors }
    }
}

/// Appends the triplets of an embedded product term without forming any
/// Kronecker product explicitly.
fn push_term_triplets(
    space: &HilbertSpace,
    term: &ProductTerm,
    out: &mut Vec<(usize, usize, Complex64)>,
) -> Result<()> {
    let mut located = Vec::with_capacity(term.factors.len());
    for (mode, op) in &term.factors {
        let pos = space.position(*mode)?;
        if op.dim != space.modes[pos].dim {
            return Err(Error::ParamsMismatch(format!(
                "local operator on {mode} has dim {}, mode has dim {}",
                op.dim, space.modes[pos].dim
            )));
        }
        if located.iter().any(|&(p, _)| p == pos) {
            return Err(Error::DuplicateMode(*mode));
        }
        located.push((pos, op));
    }
    // Walk the cartesian product of per-factor column entries with an odometer.
    let mut cursor = vec![0usize; located.len()];
    for col in 0..space.total_dim {
        let columns: Vec<&[(usize, Complex64)]> = located
            .iter()
            .map(|&(pos, op)| op.columns[space.occupation(col, pos)].as_slice())
            .collect();
        if columns.iter().any(|c| c.is_empty()) {
            continue;
        }
        cursor.iter_mut().for_each(|c| *c = 0);
        loop {
            let mut row = col as isize;
            let mut value = term.coeff;
            for (k, &(pos, _)) in located.iter().enumerate() {
                let (r, v) = columns[k][cursor[k]];
                let n = space.occupation(col, pos);
                row += (r as isize - n as isize) * space.strides[pos] as isize;
                value *= v;
            }
            out.push((row as usize, col, value));
            let mut k = 0;
            while k < cursor.len() {
                cursor[k] += 1;
                if cursor[k] < columns[k].len() {
                    break;
                }
                cursor[k] = 0;
                k += 1;
            }
            if k == cursor.len() {
                break;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "role", content = "mode")]
pub enum OperatorRole {
    Hamiltonian,
    MeanPhononNumber,
    K1,
    K2,
    CavityPhotons,
    Number(ModeId),
    Lowering(ModeId),
    Identity,
    Other,
}

/// Complex sparse operator on a [`HilbertSpace`].
#[derive(Debug, Clone)]
pub struct Operator {
    space: Arc<HilbertSpace>,
    matrix: CsrMatrix,
    role: OperatorRole,
    hermitian_hint: bool,
}

impl Operator {
    /// Wraps a matrix. With `hermitian_hint` the matrix must satisfy
    /// `max |A - A^dagger| <= 1e-12`.
    pub fn new(space: Arc<HilbertSpace>, matrix: CsrMatrix, role: OperatorRole, hermitian_hint: bool) -> Result<Self> {
        if matrix.dim() != space.total_dim {
            return Err(Error::SpaceMismatch);
        }
        if hermitian_hint {
            let residual = matrix.hermiticity_residual();
            if residual > HERMITIAN_TOL {
                return Err(Error::NotHermitian { residual });
            }
        }
        Ok(Self {
            space,
            matrix,
            role,
            hermitian_hint,
        })
    }

    /// Sums embedded product terms into one operator.
    pub fn from_terms(
        space: Arc<HilbertSpace>,
        terms: &[ProductTerm],
        role: OperatorRole,
        hermitian_hint: bool,
    ) -> Result<Self> {
        let mut triplets = Vec::new();
        for term in terms {
            push_term_triplets(&space, term, &mut triplets)?;
        }
        let matrix = CsrMatrix::from_triplets(space.total_dim, triplets);
        Self::new(space, matrix, role, hermitian_hint)
    }

    pub fn identity(space: Arc<HilbertSpace>) -> Self {
        let matrix = CsrMatrix::identity(space.total_dim);
        Self {
            space,
            matrix,
            role: OperatorRole::Identity,
            hermitian_hint: true,
        }
    }

    pub fn zero(space: Arc<HilbertSpace>, role: OperatorRole) -> Self {
        let matrix = CsrMatrix::zeros(space.total_dim);
        Self {
            space,
            matrix,
            role,
            hermitian_hint: true,
        }
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn role(&self) -> OperatorRole {
        self.role
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.matrix.hermiticity_residual()
    }

    fn check_space(&self, other: &HilbertSpace) -> Result<()> {
        if std::ptr::eq(self.space.as_ref(), other) || *self.space == *other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
            role: OperatorRole::Other,
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_space(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.matmul(&other.matrix),
            role: OperatorRole::Other,
            hermitian_hint: false,
        })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_space(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.commutator(&other.matrix),
            role: OperatorRole::Other,
            hermitian_hint: false,
        })
    }

    /// `alpha * self + beta * other`; the result is flagged Hermitian only
    /// when both inputs are and both coefficients are real.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        self.check_space(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.axpby(alpha, &other.matrix, beta),
            role: OperatorRole::Other,
            hermitian_hint: self.hermitian_hint && other.hermitian_hint && alpha.im == 0.0 && beta.im == 0.0,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.scale(Complex64::new(factor, 0.0)),
            role: self.role,
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        self.check_space(&state.space)?;
        Ok(self.matrix.mul_vec(&state.amplitudes))
    }
}

/// Truncated annihilation operator of `mode`, embedded into `space`.
pub fn lowering_op(space: &Arc<HilbertSpace>, mode: ModeId) -> Result<Operator> {
    let dim = space.dim_of(mode)?;
    let term = ProductTerm::new(Complex64::new(1.0, 0.0), vec![(mode, LocalOp::lowering(dim))]);
    Operator::from_terms(space.clone(), &[term], OperatorRole::Lowering(mode), false)
}

/// `x^dagger x` for `mode`.
pub fn number_op(space: &Arc<HilbertSpace>, mode: ModeId) -> Result<Operator> {
    let lower = lowering_op(space, mode)?;
    let matrix = lower.matrix.adjoint().matmul(&lower.matrix);
    Operator::new(space.clone(), matrix, OperatorRole::Number(mode), true)
}

/// Normalised complex amplitude vector on a [`HilbertSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: Arc<HilbertSpace>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Fails unless the amplitudes have unit norm within `1e-9`.
    pub fn new(space: Arc<HilbertSpace>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim {
            return Err(Error::SpaceMismatch);
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { space, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(space: Arc<HilbertSpace>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim {
            return Err(Error::SpaceMismatch);
        }
        let n = norm(&amplitudes);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NotNormalized(n));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(Self { space, amplitudes })
    }

    /// Propagated samples keep their numerical norm drift visible.
    pub(crate) fn from_raw(space: Arc<HilbertSpace>, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), space.total_dim);
        Self { space, amplitudes }
    }

    pub fn basis(space: Arc<HilbertSpace>, occupations: &[usize]) -> Result<Self> {
        let index = space.basis_index(occupations)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); space.total_dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if *self.space != *other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Probability of finding `mode` in its highest retained Fock level.
    pub fn top_level_population(&self, mode: ModeId) -> Result<f64> {
        let pos = self.space.position(mode)?;
        let top = self.space.modes[pos].dim - 1;
        let weight: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.occupation(*i, pos) == top)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(weight / self.norm().powi(2))
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `<psi|A|psi>`. For operators flagged Hermitian the imaginary part must
/// stay below `1e-10`.
pub fn expectation(state: &StateVector, op: &Operator) -> Result<Complex64> {
    op.check_space(&state.space)?;
    let applied = op.matrix.mul_vec(&state.amplitudes);
    let value = inner(&state.amplitudes, &applied);
    if op.hermitian_hint && value.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(Error::ImaginaryExpectation { imag: value.im });
    }
    Ok(value)
}

/// Real part of [`expectation`] after the imaginary-part check.
pub fn expectation_real(state: &StateVector, op: &Operator) -> Result<f64> {
    let value = expectation(state, op)?;
    if value.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(Error::ImaginaryExpectation { imag: value.im });
    }
    Ok(value.re)
}

// JSON layout shared by operators and states:
//   {"kind": "operator"|"state", "modes": [{"mode": "a0", "dim": 2}, ...],
//    "dims": [...], "total_dim": n, ...}
// Operators add "role", "hermitian" and "entries" as [row, col, re, im]
// quadruples in row-major order; states add "amplitudes" as [re, im] pairs.

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Serialized {
    Operator {
        modes: Vec<ModeSpec>,
        dims: Vec<usize>,
        total_dim: usize,
        #[serde(flatten)]
        role: OperatorRole,
        hermitian: bool,
        entries: Vec<(usize, usize, f64, f64)>,
    },
    State {
        modes: Vec<ModeSpec>,
        dims: Vec<usize>,
        total_dim: usize,
        amplitudes: Vec<[f64; 2]>,
    },
}

fn space_from_json(modes: &[ModeSpec], dims: &[usize], total_dim: usize) -> Result<Arc<HilbertSpace>> {
    let space = make_space(modes)?;
    let listed: Vec<usize> = space.modes.iter().map(|m| m.dim).collect();
    if listed != dims || space.total_dim != total_dim || space.modes != modes {
        return Err(Error::Config("serialized mode list is inconsistent or not canonical".into()));
    }
    Ok(Arc::new(space))
}

impl Operator {
    pub fn to_json(&self) -> String {
        let doc = Serialized::Operator {
            modes: self.space.modes.clone(),
            dims: self.space.modes.iter().map(|m| m.dim).collect(),
            total_dim: self.space.total_dim,
            role: self.role,
            hermitian: self.hermitian_hint,
            entries: self.matrix.iter().map(|(r, c, v)| (r, c, v.re, v.im)).collect(),
        };
        serde_json::to_string(&doc).expect("operator serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str(text)? {
            Serialized::Operator {
                modes,
                dims,
                total_dim,
                role,
                hermitian,
                entries,
            } => {
                let space = space_from_json(&modes, &dims, total_dim)?;
                if entries.iter().any(|&(r, c, _, _)| r >= total_dim || c >= total_dim) {
                    return Err(Error::Config("operator entry outside the space".into()));
                }
                let triplets = entries
                    .into_iter()
                    .map(|(r, c, re, im)| (r, c, Complex64::new(re, im)))
                    .collect();
                Operator::new(space, CsrMatrix::from_triplets(total_dim, triplets), role, hermitian)
            }
            Serialized::State { .. } => Err(Error::Config("expected an operator, found a state".into())),
        }
    }
}

impl StateVector {
    pub fn to_json(&self) -> String {
        let doc = Serialized::State {
            modes: self.space.modes.clone(),
            dims: self.space.modes.iter().map(|m| m.dim).collect(),
            total_dim: self.space.total_dim,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        };
        serde_json::to_string(&doc).expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str(text)? {
            Serialized::State {
                modes,
                dims,
                total_dim,
                amplitudes,
            } => {
                let space = space_from_json(&modes, &dims, total_dim)?;
                let amplitudes = amplitudes.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
                StateVector::new(space, amplitudes)
            }
            Serialized::Operator { .. } => Err(Error::Config("expected a state, found an operator".into())),
        }
    }
}
