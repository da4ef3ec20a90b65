//! Expectation values of normal-ordered operators.
//!
//! For a monomial `M` every basis ket `|j⟩` maps to `c_j |t(j)⟩` (or to zero), so
//! `Tr(ρM) = Σ_j c_j ρ[j, t(j)]`. Targets beyond a cutoff meet a zero row of `ρ`,
//! which makes the result exact for the truncated state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState, StateData};
use crate::operators::{Action, HermitianCombination, OperatorMonomial, OperatorSum};

const IMAG_TOL: f64 = 1e-10;
const VARIANCE_TOL: f64 = 1e-10;

/// `Tr(ρ · monomial)`.
pub fn expect(state: &FockState, monomial: &OperatorMonomial) -> Result<Complex64> {
    if monomial.mode_count() != state.mode_count() {
        return Err(Error::WrongArity {
            expected: state.mode_count(),
            actual: monomial.mode_count(),
        });
    }
    let layout = state.layout();
    let cutoffs = state.cutoffs();
    let mut occ = vec![0; state.mode_count()];
    let mut total = Complex64::new(0.0, 0.0);
    match state.data() {
        StateData::Pure(psi) => {
            for (j, amp) in psi.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                layout.unflatten_into(j, &mut occ);
                if let Action::Inside(c) = monomial.act(&mut occ, cutoffs) {
                    let t = layout.flatten(&occ).expect("inside target");
                    total += psi[t].conj() * amp * c;
                }
            }
        }
        StateData::Mixed(rho) => {
            for j in 0..state.dim() {
                layout.unflatten_into(j, &mut occ);
                if let Action::Inside(c) = monomial.act(&mut occ, cutoffs) {
                    let t = layout.flatten(&occ).expect("inside target");
                    total += rho[(j, t)] * c;
                }
            }
        }
    }
    Ok(total)
}

/// Expectation of a linear combination of monomials.
pub fn expect_sum(state: &FockState, op: &OperatorSum) -> Result<Complex64> {
    op.terms()
        .try_fold(Complex64::new(0.0, 0.0), |acc, (m, c)| {
            Ok(acc + c * expect(state, m)?)
        })
}

/// Real expectation of a Hermitian monomial sum or product like `N_a N_b`.
pub fn expect_real(state: &FockState, monomial: &OperatorMonomial) -> Result<f64> {
    Ok(expect(state, monomial)?.re)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanVariance {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of a Hermitian combination; `op²` is normal-ordered symbolically.
pub fn mean_variance(state: &FockState, op: &HermitianCombination) -> Result<MeanVariance> {
    if op.mode_count() != state.mode_count() {
        return Err(Error::WrongArity {
            expected: state.mode_count(),
            actual: op.mode_count(),
        });
    }
    let mean = expect_sum(state, op.as_sum())?;
    let second = expect_sum(state, &op.square()?)?;
    let scale = mean.re.abs().max(1.0);
    if mean.im.abs() > IMAG_TOL * scale {
        return Err(Error::NotHermitianAtRuntime { imag: mean.im });
    }
    if second.im.abs() > IMAG_TOL * second.re.abs().max(1.0) {
        return Err(Error::NotHermitianAtRuntime { imag: second.im });
    }
    let variance = second.re - mean.re * mean.re;
    if variance < -VARIANCE_TOL * second.re.abs().max(1.0) {
        return Err(Error::NegativeVariance(variance));
    }
    Ok(MeanVariance {
        mean: mean.re,
        variance: variance.max(0.0),
    })
}

fn require_modes(state: &FockState, expected: usize) -> Result<()> {
    if state.mode_count() != expected {
        return Err(Error::WrongArity {
            expected,
            actual: state.mode_count(),
        });
    }
    Ok(())
}

pub(crate) fn two_mode(state: &FockState) -> Result<()> {
    require_modes(state, 2)
}

pub(crate) fn three_mode(state: &FockState) -> Result<()> {
    require_modes(state, 3)
}

/// `(ΔL₁)² + (ΔL₂)²` from the closed form
/// `2(⟨(N_a+1)N_b⟩ + ⟨N_a(N_b+1)⟩ − 2|⟨ab†⟩|²)`.
pub fn lsum_via_identity(state: &FockState) -> Result<f64> {
    two_mode(state)?;
    let na_nb = expect_real(state, &OperatorMonomial::from_pairs(&[(1, 1), (1, 1)]))?;
    let na = expect_real(state, &OperatorMonomial::number(2, 0))?;
    let nb = expect_real(state, &OperatorMonomial::number(2, 1))?;
    let cross = expect(state, &OperatorMonomial::from_pairs(&[(0, 1), (1, 0)]))?;
    // (N_a+1)N_b + N_a(N_b+1) = 2 N_a N_b + N_a + N_b
    Ok(2.0 * ((2.0 * na_nb + na + nb) - 2.0 * cross.norm_sqr()))
}
