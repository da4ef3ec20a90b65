//! Partial-transpose spectrum, used as an independent entanglement oracle on
//! small instances. A negative eigenvalue certifies entanglement across the
//! chosen cut; a positive spectrum proves nothing in general.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{hermitian_eigenvalues, FockState};

pub const DEFAULT_DIMENSION_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PptReport {
    pub min_eigenvalue: f64,
    /// Sum of |λ| over negative eigenvalues.
    pub negativity: f64,
    pub transposed_modes: Vec<usize>,
}

fn check_modes(state: &FockState, modes: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = modes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let n = state.mode_count();
    if sorted.is_empty() || sorted.len() >= n || sorted.iter().any(|&m| m >= n) {
        return Err(Error::InvalidModeSet {
            modes: modes.to_vec(),
            mode_count: n,
        });
    }
    Ok(sorted)
}

/// Swaps row and column occupations of `modes` in the density matrix.
pub fn partial_transpose(state: &FockState, modes: &[usize]) -> Result<DMatrix<Complex64>> {
    let modes = check_modes(state, modes)?;
    Ok(transpose_modes(state, &state.density_matrix(), &modes))
}

fn transpose_modes(
    state: &FockState,
    rho: &DMatrix<Complex64>,
    modes: &[usize],
) -> DMatrix<Complex64> {
    let layout = state.layout();
    let dim = layout.dim();
    let occs: Vec<Vec<usize>> = (0..dim).map(|i| layout.occupations(i)).collect();
    let mut out = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut row = vec![0; state.mode_count()];
    let mut col = vec![0; state.mode_count()];
    for i in 0..dim {
        for j in 0..dim {
            row.copy_from_slice(&occs[i]);
            col.copy_from_slice(&occs[j]);
            for &m in modes {
                std::mem::swap(&mut row[m], &mut col[m]);
            }
            let r = layout.flatten(&row).expect("in range");
            let c = layout.flatten(&col).expect("in range");
            out[(r, c)] = rho[(i, j)];
        }
    }
    out
}

pub fn ppt_check(state: &FockState, modes: &[usize]) -> Result<PptReport> {
    ppt_check_with_limit(state, modes, DEFAULT_DIMENSION_LIMIT)
}

pub fn ppt_check_with_limit(state: &FockState, modes: &[usize], limit: usize) -> Result<PptReport> {
    if state.dim() > limit {
        return Err(Error::DimensionTooLarge {
            dim: state.dim(),
            limit,
        });
    }
    let sorted = check_modes(state, modes)?;
    let pt = transpose_modes(state, &state.density_matrix(), &sorted);
    let eigenvalues = hermitian_eigenvalues(&pt);
    let min_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let negativity = eigenvalues.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
    Ok(PptReport {
        min_eigenvalue,
        negativity,
        transposed_modes: sorted,
    })
}

/// Largest negativity over all single-mode partial transposes.
pub fn max_single_mode_negativity(state: &FockState) -> Result<f64> {
    (0..state.mode_count()).try_fold(0.0_f64, |acc, m| {
        Ok(acc.max(ppt_check(state, &[m])?.negativity))
    })
}
