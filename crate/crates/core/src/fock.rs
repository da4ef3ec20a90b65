//! Multimode states on truncated Fock spaces.
//!
//! Basis kets are flattened row-major with mode 0 varying slowest, so for cutoffs
//! `[d0, d1]` the ket `|n0, n1⟩` sits at `n0 * d1 + n1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{Action, OperatorMonomial};

/// Default tolerance for amplitude lost past the cutoff.
pub const DEFAULT_GUARD_EPSILON: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-8;
// Norms this close to one are left alone so that reloading a saved state is bit-exact.
const RENORMALIZE_SLACK: f64 = 4.0 * f64::EPSILON;

/// Occupation numbers, one per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockBasisIndex(pub Vec<usize>);

impl FockBasisIndex {
    pub fn new(occupations: impl Into<Vec<usize>>) -> Self {
        Self(occupations.into())
    }

    pub fn occupations(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for FockBasisIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[usize; N]> for FockBasisIndex {
    fn from(v: [usize; N]) -> Self {
        Self(v.to_vec())
    }
}

/// Shape of a truncated multimode Fock space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl Layout {
    pub fn new(cutoffs: &[usize]) -> Result<Self> {
        if cutoffs.is_empty() || cutoffs.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "cutoffs must be a non-empty list of positive integers, got {cutoffs:?}"
            )));
        }
        let mut strides = vec![1; cutoffs.len()];
        for i in (0..cutoffs.len() - 1).rev() {
            strides[i] = strides[i + 1] * cutoffs[i + 1];
        }
        let dim = cutoffs
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .ok_or_else(|| Error::InvalidParameter("Fock space dimension overflows".into()))?;
        Ok(Self {
            cutoffs: cutoffs.to_vec(),
            strides,
            dim,
        })
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn mode_count(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flatten(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.cutoffs.len()
            || occupations.iter().zip(&self.cutoffs).any(|(n, c)| n >= c)
        {
            return Err(Error::InvalidIndex {
                occupations: occupations.to_vec(),
                cutoffs: self.cutoffs.clone(),
            });
        }
        Ok(occupations
            .iter()
            .zip(&self.strides)
            .map(|(n, s)| n * s)
            .sum())
    }

    /// Writes the occupations of flat index `flat` into `out`.
    pub fn unflatten_into(&self, mut flat: usize, out: &mut [usize]) {
        for (slot, stride) in out.iter_mut().zip(&self.strides) {
            *slot = flat / stride;
            flat %= stride;
        }
    }

    pub fn occupations(&self, flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.mode_count()];
        self.unflatten_into(flat, &mut out);
        out
    }

    fn flatten_unchecked(&self, occupations: &[usize]) -> usize {
        occupations
            .iter()
            .zip(&self.strides)
            .map(|(n, s)| n * s)
            .sum()
    }
}

/// Storage for a pure or mixed state (or an unnormalized operator image).
#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Pure(Vec<Complex64>),
    Mixed(DMatrix<Complex64>),
}

/// A normalized pure state or density matrix. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    layout: Layout,
    data: StateData,
}

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("non-finite entry {z}")))
    }
}

impl FockState {
    /// Builds a normalized pure state from sparse amplitudes. Repeated indices accumulate.
    pub fn new_pure<I, B>(cutoffs: &[usize], amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (B, Complex64)>,
        B: Into<FockBasisIndex>,
    {
        let layout = Layout::new(cutoffs)?;
        let mut dense = vec![Complex64::new(0.0, 0.0); layout.dim()];
        for (index, amp) in amplitudes {
            check_finite(amp)?;
            let index = index.into();
            dense[layout.flatten(index.occupations())?] += amp;
        }
        Self::from_layout_amplitudes(layout, dense)
    }

    /// Builds a pure state from a dense, flattened amplitude vector.
    pub fn from_amplitudes(cutoffs: &[usize], amplitudes: Vec<Complex64>) -> Result<Self> {
        let layout = Layout::new(cutoffs)?;
        if amplitudes.len() != layout.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                layout.dim(),
                amplitudes.len()
            )));
        }
        amplitudes.iter().try_for_each(|a| check_finite(*a))?;
        Self::from_layout_amplitudes(layout, amplitudes)
    }

    fn from_layout_amplitudes(layout: Layout, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr == 0.0 {
            return Err(Error::ZeroState);
        }
        if (norm_sqr - 1.0).abs() > RENORMALIZE_SLACK {
            let norm = norm_sqr.sqrt();
            amplitudes.iter_mut().for_each(|a| *a /= norm);
        }
        Ok(Self {
            layout,
            data: StateData::Pure(amplitudes),
        })
    }

    /// Builds a trace-normalized density matrix from sparse `(row, col, value)` entries.
    /// Repeated entries accumulate; unlisted entries are zero.
    pub fn new_mixed<I, B>(cutoffs: &[usize], entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (B, B, Complex64)>,
        B: Into<FockBasisIndex>,
    {
        let layout = Layout::new(cutoffs)?;
        let dim = layout.dim();
        let mut matrix = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (row, col, value) in entries {
            check_finite(value)?;
            let (row, col) = (row.into(), col.into());
            let r = layout.flatten(row.occupations())?;
            let c = layout.flatten(col.occupations())?;
            matrix[(r, c)] += value;
        }
        Self::from_layout_matrix(layout, matrix)
    }

    /// Builds a density matrix from a dense matrix over flattened indices.
    pub fn from_density(cutoffs: &[usize], matrix: DMatrix<Complex64>) -> Result<Self> {
        let layout = Layout::new(cutoffs)?;
        if matrix.nrows() != layout.dim() || matrix.ncols() != layout.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                layout.dim(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        matrix.iter().try_for_each(|z| check_finite(*z))?;
        Self::from_layout_matrix(layout, matrix)
    }

    fn from_layout_matrix(layout: Layout, mut matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = layout.dim();
        let trace: f64 = (0..dim).map(|i| matrix[(i, i)].re).sum();
        let mut deviation = 0.0_f64;
        for i in 0..dim {
            for j in i..dim {
                deviation = deviation.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if deviation > HERMITIAN_TOL * trace.abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        for i in 0..dim {
            for j in i..dim {
                let avg = (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5;
                matrix[(i, j)] = avg;
                matrix[(j, i)] = avg.conj();
            }
        }
        if trace <= 0.0 {
            if trace == 0.0 && matrix.iter().all(|z| z.norm() == 0.0) {
                return Err(Error::ZeroState);
            }
            return Err(Error::NotPositive {
                min_eigenvalue: min_eigenvalue(&matrix),
            });
        }
        if (trace - 1.0).abs() > RENORMALIZE_SLACK {
            matrix.iter_mut().for_each(|z| *z /= trace);
        }
        let min = min_eigenvalue(&matrix);
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            layout,
            data: StateData::Mixed(matrix),
        })
    }

    /// Convex combination `Σ p_k ρ_k` of states sharing one layout.
    pub fn convex_mixture(components: &[(f64, &FockState)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?
            .1;
        let dim = first.dim();
        let mut matrix = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (p, state) in components {
            if *p < 0.0 || !p.is_finite() {
                return Err(Error::InvalidParameter(format!("bad mixture weight {p}")));
            }
            if state.layout != first.layout {
                return Err(Error::InvalidParameter(
                    "mixture components have different cutoffs".into(),
                ));
            }
            state.accumulate_density(&mut matrix, *p);
        }
        Self::from_layout_matrix(first.layout.clone(), matrix)
    }

    fn accumulate_density(&self, target: &mut DMatrix<Complex64>, weight: f64) {
        match &self.data {
            StateData::Pure(psi) => {
                for (i, a) in psi.iter().enumerate() {
                    if a.norm_sqr() == 0.0 {
                        continue;
                    }
                    for (j, b) in psi.iter().enumerate() {
                        target[(i, j)] += a * b.conj() * weight;
                    }
                }
            }
            StateData::Mixed(rho) => *target += rho * Complex64::new(weight, 0.0),
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn cutoffs(&self) -> &[usize] {
        self.layout.cutoffs()
    }

    pub fn mode_count(&self) -> usize {
        self.layout.mode_count()
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    /// Amplitude of a basis ket; `None` for mixed states or out-of-range indices.
    pub fn amplitude(&self, occupations: &[usize]) -> Option<Complex64> {
        let flat = self.layout.flatten(occupations).ok()?;
        self.amplitudes().map(|v| v[flat])
    }

    /// The density matrix; pure states are promoted to `|ψ⟩⟨ψ|`.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        match &self.data {
            StateData::Mixed(rho) => rho.clone(),
            StateData::Pure(_) => {
                let dim = self.dim();
                let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
                self.accumulate_density(&mut m, 1.0);
                m
            }
        }
    }

    /// Same state stored as a density matrix.
    pub fn to_mixed(&self) -> FockState {
        Self {
            layout: self.layout.clone(),
            data: StateData::Mixed(self.density_matrix()),
        }
    }

    /// Occupation probabilities over flattened indices.
    pub fn probabilities(&self) -> Vec<f64> {
        match &self.data {
            StateData::Pure(v) => v.iter().map(|a| a.norm_sqr()).collect(),
            StateData::Mixed(m) => (0..self.dim()).map(|i| m[(i, i)].re).collect(),
        }
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        match &self.data {
            StateData::Pure(_) => 1.0,
            StateData::Mixed(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Applies a normal-ordered monomial without renormalizing.
    ///
    /// Pure states map to `M|ψ⟩`, density matrices to `M ρ M†`. Weight that
    /// would be pushed past a cutoff is lost; more than `epsilon` of it is an error.
    pub fn apply_monomial_with(
        &self,
        monomial: &OperatorMonomial,
        epsilon: f64,
    ) -> Result<OperatorImage> {
        if monomial.mode_count() != self.mode_count() {
            return Err(Error::WrongArity {
                expected: self.mode_count(),
                actual: monomial.mode_count(),
            });
        }
        let dim = self.dim();
        let cutoffs = self.cutoffs();
        let mut occ = vec![0; self.mode_count()];
        // (target, coefficient) per source index; target None = lost or annihilated
        let mut map: Vec<Option<(usize, f64)>> = Vec::with_capacity(dim);
        let mut lost_coef: Vec<f64> = vec![0.0; dim];
        for (flat, lost) in lost_coef.iter_mut().enumerate() {
            self.layout.unflatten_into(flat, &mut occ);
            match monomial.act(&mut occ, cutoffs) {
                Action::Zero => map.push(None),
                Action::Outside(c) => {
                    *lost = c;
                    map.push(None);
                }
                Action::Inside(c) => map.push(Some((self.layout.flatten_unchecked(&occ), c))),
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        let (data, leaked) = match &self.data {
            StateData::Pure(psi) => {
                let mut out = vec![zero; dim];
                let mut leaked = 0.0;
                for (j, a) in psi.iter().enumerate() {
                    match map[j] {
                        Some((t, c)) => out[t] += a * c,
                        None => leaked += (a * lost_coef[j]).norm_sqr(),
                    }
                }
                (StateData::Pure(out), leaked)
            }
            StateData::Mixed(rho) => {
                let mut out = DMatrix::from_element(dim, dim, zero);
                let mut leaked = 0.0;
                for i in 0..dim {
                    let Some((ti, ci)) = map[i] else {
                        leaked += lost_coef[i] * lost_coef[i] * rho[(i, i)].re;
                        continue;
                    };
                    for j in 0..dim {
                        if let Some((tj, cj)) = map[j] {
                            out[(ti, tj)] += rho[(i, j)] * (ci * cj);
                        }
                    }
                }
                (StateData::Mixed(out), leaked)
            }
        };
        if leaked > epsilon {
            return Err(Error::TruncationUnsafe { leaked, epsilon });
        }
        Ok(OperatorImage {
            layout: self.layout.clone(),
            data,
            leaked_weight: leaked,
        })
    }

    /// [`apply_monomial_with`](Self::apply_monomial_with) at [`DEFAULT_GUARD_EPSILON`].
    pub fn apply_monomial(&self, monomial: &OperatorMonomial) -> Result<OperatorImage> {
        self.apply_monomial_with(monomial, DEFAULT_GUARD_EPSILON)
    }

    /// Probability mass on kets with some occupation `≥ cutoff − max_creation_power`.
    pub fn guard_band_check(&self, max_creation_power: usize, epsilon: f64) -> GuardBandReport {
        let cutoffs = self.cutoffs();
        let mut occ = vec![0; self.mode_count()];
        let mut leaked = 0.0;
        for (flat, p) in self.probabilities().into_iter().enumerate() {
            self.layout.unflatten_into(flat, &mut occ);
            let in_band = occ
                .iter()
                .zip(cutoffs)
                .any(|(&n, &c)| n + max_creation_power >= c);
            if in_band {
                leaked += p;
            }
        }
        let leaked_weight = leaked.clamp(0.0, 1.0);
        GuardBandReport {
            guard_width: max_creation_power,
            leaked_weight,
            epsilon,
            safe: leaked_weight <= epsilon,
        }
    }
}

/// Unnormalized result of [`FockState::apply_monomial`].
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorImage {
    pub layout: Layout,
    pub data: StateData,
    /// Squared norm (or trace) discarded beyond the cutoffs.
    pub leaked_weight: f64,
}

impl OperatorImage {
    pub fn vector(&self) -> Option<&[Complex64]> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    /// Squared norm for vectors, trace for matrices.
    pub fn weight(&self) -> f64 {
        match &self.data {
            StateData::Pure(v) => v.iter().map(|a| a.norm_sqr()).sum(),
            StateData::Mixed(m) => (0..m.nrows()).map(|i| m[(i, i)].re).sum(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GuardBandReport {
    pub guard_width: usize,
    pub leaked_weight: f64,
    pub epsilon: f64,
    pub safe: bool,
}

pub(crate) fn min_eigenvalue(matrix: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(matrix)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn hermitian_eigenvalues(matrix: &DMatrix<Complex64>) -> Vec<f64> {
    matrix
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect()
}
