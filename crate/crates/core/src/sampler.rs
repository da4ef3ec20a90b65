//! Seeded sampling of separable (and, for tests, generic) states.
//!
//! All randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)`. Within one seed, independent draws use separate
//! ChaCha streams: stream 0 for mixture weights, stream `k + 1` for component `k`.
//! Parallel sweeps must give every task its own seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::moments::mean_variance;
use crate::operators::HermitianCombination;
use crate::states::tensor_product;

/// Name of the generator, recorded in sampler manifests.
pub const RNG_NAME: &str = "chacha20";

const MIXTURE_TOL: f64 = 1e-9;

fn stream(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// How a single-mode factor is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ModeSupport {
    /// Uniform on the unit sphere of the truncated mode (normalized complex Gaussians).
    #[default]
    Full,
    /// A single Fock level chosen uniformly.
    BasisState,
}

/// One term `p_k · |φ_k⟩⟨φ_k|` with `|φ_k⟩ = ⊗_i |φ_{k,i}⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductComponent {
    pub probability: f64,
    pub modes: Vec<Vec<Complex64>>,
}

impl ProductComponent {
    pub fn state(&self, cutoffs: &[usize]) -> Result<FockState> {
        FockState::from_amplitudes(cutoffs, tensor_product(&self.modes))
    }
}

/// A convex combination of product pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableEnsemble {
    pub seed: u64,
    pub cutoffs: Vec<usize>,
    pub components: Vec<ProductComponent>,
}

impl SeparableEnsemble {
    pub fn mode_count(&self) -> usize {
        self.cutoffs.len()
    }

    /// Component states paired with their probabilities.
    pub fn weighted_states(&self) -> Result<Vec<(f64, FockState)>> {
        self.components
            .iter()
            .map(|c| Ok((c.probability, c.state(&self.cutoffs)?)))
            .collect()
    }

    /// The assembled state: pure for one component, a density matrix otherwise.
    pub fn to_state(&self) -> Result<FockState> {
        let parts = self.weighted_states()?;
        if let [(_, only)] = parts.as_slice() {
            return Ok(only.clone());
        }
        let refs: Vec<(f64, &FockState)> = parts.iter().map(|(p, s)| (*p, s)).collect();
        FockState::convex_mixture(&refs)
    }

    pub fn check_mixture_variance(
        &self,
        op: &HermitianCombination,
    ) -> Result<MixtureVarianceCheck> {
        check_mixture_variance(&self.weighted_states()?, op)
    }
}

fn sample_mode<R: Rng>(rng: &mut R, cutoff: usize, support: ModeSupport) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    match support {
        ModeSupport::Full => loop {
            let v: Vec<Complex64> = (0..cutoff).map(|_| complex_gaussian(rng)).collect();
            let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                break v.into_iter().map(|a| a / norm).collect();
            }
        },
        ModeSupport::BasisState => {
            let mut v = vec![zero; cutoff];
            v[rng.random_range(0..cutoff)] = Complex64::new(1.0, 0.0);
            v
        }
    }
}

fn check_cutoffs(cutoffs: &[usize]) -> Result<()> {
    if cutoffs.is_empty() || cutoffs.iter().any(|&c| c < 2) {
        return Err(Error::InvalidParameter(format!(
            "sampler needs at least one mode and cutoffs ≥ 2, got {cutoffs:?}"
        )));
    }
    Ok(())
}

/// A single product pure state.
pub fn sample_product_pure(seed: u64, cutoffs: &[usize]) -> Result<SeparableEnsemble> {
    sample_product_pure_with(seed, cutoffs, ModeSupport::Full)
}

pub fn sample_product_pure_with(
    seed: u64,
    cutoffs: &[usize],
    support: ModeSupport,
) -> Result<SeparableEnsemble> {
    check_cutoffs(cutoffs)?;
    let mut rng = stream(seed, 1);
    let modes = cutoffs
        .iter()
        .map(|&c| sample_mode(&mut rng, c, support))
        .collect();
    Ok(SeparableEnsemble {
        seed,
        cutoffs: cutoffs.to_vec(),
        components: vec![ProductComponent {
            probability: 1.0,
            modes,
        }],
    })
}

/// `components` independent product pure states with weights uniform on the simplex.
pub fn sample_separable_mixture(
    seed: u64,
    components: usize,
    cutoffs: &[usize],
) -> Result<SeparableEnsemble> {
    check_cutoffs(cutoffs)?;
    if components == 0 {
        return Err(Error::InvalidParameter(
            "a mixture needs at least one component".into(),
        ));
    }
    let weights: Vec<f64> = if components == 1 {
        vec![1.0]
    } else {
        let mut rng = stream(seed, 0);
        let raw: Vec<f64> = (0..components)
            .map(|_| rng.sample::<f64, _>(Exp1))
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    };
    let components = weights
        .into_iter()
        .enumerate()
        .map(|(k, probability)| {
            let mut rng = stream(seed, k as u64 + 1);
            ProductComponent {
                probability,
                modes: cutoffs
                    .iter()
                    .map(|&c| sample_mode(&mut rng, c, ModeSupport::Full))
                    .collect(),
            }
        })
        .collect();
    Ok(SeparableEnsemble {
        seed,
        cutoffs: cutoffs.to_vec(),
        components,
    })
}

/// A generic (typically entangled) pure state, uniform on the unit sphere.
pub fn sample_random_pure(seed: u64, cutoffs: &[usize]) -> Result<FockState> {
    let dim: usize = cutoffs.iter().product();
    let mut rng = stream(seed, 0);
    let amps = (0..dim).map(|_| complex_gaussian(&mut rng)).collect();
    FockState::from_amplitudes(cutoffs, amps)
}

/// A generic density matrix `G G† / Tr(G G†)` with `G` a `dim × rank` complex Gaussian matrix.
pub fn sample_random_mixed(seed: u64, cutoffs: &[usize], rank: usize) -> Result<FockState> {
    let dim: usize = cutoffs.iter().product();
    if rank == 0 {
        return Err(Error::InvalidParameter("rank must be positive".into()));
    }
    let mut rng = stream(seed, 0);
    let g = DMatrix::from_fn(dim, rank, |_, _| complex_gaussian(&mut rng));
    FockState::from_density(cutoffs, &g * g.adjoint())
}

/// Both sides of `(ΔS)²_ρ ≥ Σ_k p_k (ΔS)²_k` for `ρ = Σ_k p_k ρ_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixtureVarianceCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks concavity of the variance over an explicit decomposition.
pub fn check_mixture_variance(
    components: &[(f64, FockState)],
    op: &HermitianCombination,
) -> Result<MixtureVarianceCheck> {
    let total: f64 = components.iter().map(|(p, _)| p).sum();
    if components.is_empty() || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "mixture probabilities sum to {total}, expected 1"
        )));
    }
    let refs: Vec<(f64, &FockState)> = components.iter().map(|(p, s)| (*p, s)).collect();
    let mixed = if let [(_, only)] = refs.as_slice() {
        (*only).clone()
    } else {
        FockState::convex_mixture(&refs)?
    };
    let lhs = mean_variance(&mixed, op)?.variance;
    let rhs = components.iter().try_fold(0.0, |acc, (p, s)| {
        Ok::<_, Error>(acc + p * mean_variance(s, op)?.variance)
    })?;
    Ok(MixtureVarianceCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - MIXTURE_TOL,
    })
}
