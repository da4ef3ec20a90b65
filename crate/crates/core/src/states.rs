//! Example states and their closed-form moments.
//!
//! Infinite-support states are truncated and renormalized. A generator refuses a
//! cutoff whose discarded probability exceeds [`TAIL_BOUND`]; each one has a
//! companion `*_cutoff` helper returning the smallest admissible cutoff.
//!
//! The tail bound is on probability. Moments that couple neighbouring levels
//! (`⟨ab⟩`, `⟨a²b²⟩`) converge with the discarded amplitude instead, so at the
//! minimal cutoff they can be off by ~1e-8; a few extra levels fix that.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockBasisIndex, FockState};

/// Largest probability a truncation may discard.
pub const TAIL_BOUND: f64 = 1e-10;

const SERIES_REL_TOL: f64 = 1e-14;
const SERIES_MAX_TERMS: usize = 10_000_000;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_two(cutoffs: &[usize], expected: usize) -> Result<()> {
    if cutoffs.len() != expected {
        return Err(Error::WrongArity {
            expected,
            actual: cutoffs.len(),
        });
    }
    Ok(())
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1), got {x}"
        )));
    }
    Ok(())
}

fn check_tail(tail: f64) -> Result<()> {
    if tail > TAIL_BOUND {
        return Err(Error::TruncationUnsafe {
            leaked: tail,
            epsilon: TAIL_BOUND,
        });
    }
    Ok(())
}

/// `(|0,1⟩ + |1,0⟩)/√2`.
pub fn gen_bell01(cutoffs: &[usize]) -> Result<FockState> {
    check_two(cutoffs, 2)?;
    FockState::new_pure(cutoffs, [([0, 1], c(1.0)), ([1, 0], c(1.0))])
}

/// `s |ψ₀₁⟩⟨ψ₀₁| + (1−s)/4 · P₀₁`, with `P₀₁` the projector onto `{|0,0⟩, |0,1⟩, |1,0⟩, |1,1⟩}`.
pub fn gen_mixed_s(s: f64, cutoffs: &[usize]) -> Result<FockState> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "s must lie in [0, 1], got {s}"
        )));
    }
    check_two(cutoffs, 2)?;
    let noise = (1.0 - s) / 4.0;
    let mut entries: Vec<([usize; 2], [usize; 2], Complex64)> = [[0, 0], [0, 1], [1, 0], [1, 1]]
        .map(|k| (k, k, c(noise)))
        .to_vec();
    for (row, col) in [
        ([0, 1], [0, 1]),
        ([0, 1], [1, 0]),
        ([1, 0], [0, 1]),
        ([1, 0], [1, 0]),
    ] {
        entries.push((row, col, c(s / 2.0)));
    }
    FockState::new_mixed(cutoffs, entries)
}

/// Smallest cutoff with TMSV tail `x^(2·cutoff) ≤ TAIL_BOUND`.
pub fn tmsv_cutoff(x: f64) -> Result<usize> {
    check_unit_interval("x", x)?;
    if x == 0.0 {
        return Ok(1);
    }
    let mut n = (TAIL_BOUND.ln() / (2.0 * x.ln())).ceil().max(1.0) as usize;
    while x.powi(2 * n as i32) > TAIL_BOUND {
        n += 1;
    }
    while n > 1 && x.powi(2 * (n - 1) as i32) <= TAIL_BOUND {
        n -= 1;
    }
    Ok(n)
}

/// Two-mode squeezed vacuum `√(1−x²) Σ xⁿ |n,n⟩`, truncated at `n < cutoff` in both modes.
pub fn gen_tmsv(x: f64, cutoff: usize) -> Result<FockState> {
    check_unit_interval("x", x)?;
    if cutoff == 0 {
        return Err(Error::InvalidParameter("cutoff must be positive".into()));
    }
    check_tail(x.powi(2 * cutoff as i32))?;
    let amps = (0..cutoff).map(|n| (FockBasisIndex(vec![n, n]), c(x.powi(n as i32))));
    FockState::new_pure(&[cutoff, cutoff], amps)
}

/// Closed-form TMSV moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TmsvMoments {
    /// `⟨N_a⟩ = ⟨N_b⟩ = x²/(1−x²)`
    pub mean_number: f64,
    /// `⟨ab⟩ = x/(1−x²)`
    pub pair: f64,
}

pub fn analytic_tmsv(x: f64) -> Result<TmsvMoments> {
    check_unit_interval("x", x)?;
    let d = 1.0 - x * x;
    Ok(TmsvMoments {
        mean_number: x * x / d,
        pair: x / d,
    })
}

/// Closed-form moments of the mixed-s family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedSMoments {
    /// `(ΔL₁)² + (ΔL₂)² = 3 − s − s²`
    pub l_variance_sum: f64,
    /// `2(⟨N_a⟩ + ⟨N_b⟩) = 2`
    pub separable_bound: f64,
    /// Smallest partial-transpose eigenvalue `(1 − 3s)/4`.
    pub pt_min_eigenvalue: f64,
}

pub fn analytic_mixed_s(s: f64) -> Result<MixedSMoments> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "s must lie in [0, 1], got {s}"
        )));
    }
    Ok(MixedSMoments {
        l_variance_sum: 3.0 - s - s * s,
        separable_bound: 2.0,
        pt_min_eigenvalue: (1.0 - 3.0 * s) / 4.0,
    })
}

/// `s` above which the lsum criterion detects the mixed-s family: `(√5 − 1)/2`.
pub fn mixed_s_lsum_threshold() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// `η = ln((1+x)/(1−x)) / (2x)`, with `η(0) = 1`.
pub fn eta(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.atanh() / x
    }
}

/// Truncated-series value with the number of terms summed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
}

/// Sums `term(0) + term(1) + …` until the next term is below `1e-14` of the running sum.
fn sum_series(term: impl Fn(usize) -> f64) -> SeriesSum {
    let mut value: f64 = 0.0;
    let mut n = 0;
    loop {
        let t = term(n);
        if n > 0 && t.abs() < SERIES_REL_TOL * value.abs() || t == 0.0 || n >= SERIES_MAX_TERMS {
            return SeriesSum { value, terms: n };
        }
        value += t;
        n += 1;
    }
}

fn alternating_tail(x: f64, retained: usize) -> f64 {
    // Σ_{n≥N} x^{2n}/(2n+1) / η
    let t = x * x;
    let start = t.powi(retained as i32);
    let tail = sum_series(|k| start * t.powi(k as i32) / (2 * (retained + k) + 1) as f64);
    tail.value / eta(x)
}

/// Smallest cutoff whose retained alternating-even terms leave a tail ≤ TAIL_BOUND.
pub fn alternating_even_cutoff(x: f64) -> Result<usize> {
    check_unit_interval("x", x)?;
    let mut retained = 1;
    while alternating_tail(x, retained) > TAIL_BOUND {
        retained += 1;
    }
    Ok(2 * retained - 1)
}

/// `η^{-1/2} Σ (−1)ⁿ xⁿ/√(2n+1) |2n, 2n⟩`, keeping every `n` with `2n < cutoff`.
pub fn gen_alternating_even(x: f64, cutoff: usize) -> Result<FockState> {
    check_unit_interval("x", x)?;
    if cutoff == 0 {
        return Err(Error::InvalidParameter("cutoff must be positive".into()));
    }
    let retained = cutoff.div_ceil(2);
    check_tail(alternating_tail(x, retained))?;
    let amps = (0..retained).map(|n| {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let amp = sign * x.powi(n as i32) / ((2 * n + 1) as f64).sqrt();
        (FockBasisIndex(vec![2 * n, 2 * n]), c(amp))
    });
    FockState::new_pure(&[cutoff, cutoff], amps)
}

/// Closed-form moments of the alternating even-photon state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlternatingEvenMoments {
    pub x: f64,
    pub eta: f64,
    /// `S = Σ (2n+2)(2n+1)/√((2n+3)(2n+1)) x^{2n+1}`.
    pub series: SeriesSum,
    /// `⟨a²b²⟩ = −S/η`
    pub a2b2: f64,
    /// `⟨(N_a+1)(N_b+1)⟩ = (1+x²)/(η(1−x²)²)`
    pub shifted_number_product: f64,
    /// `⟨N_aN_b⟩ = (3x²−1)/(η(1−x²)²) + 1`
    pub number_product: f64,
    /// `(ΔK₁)² = 1 + 4x²/(η(1−x²)²) − 2S/η`
    pub k1_variance: f64,
    /// `1 + (4/η)[−x/√3 + x²(1 − x(2−x²))/(1−x²)²]`.
    ///
    /// This closed form is not a valid bound: its `x³` coefficient is too large and
    /// it lies below `k1_variance` for every `x > 0`.
    pub closed_form_bound: f64,
    /// `1 + (4/η)[−x/√3 + x²(1 − x(3−x²)/2)/(1−x²)²]`, from bounding each series
    /// term with `√((2n+1)(2n+3)) ≤ 2n+2`; always `≥ k1_variance`.
    pub termwise_bound: f64,
}

pub fn analytic_alternating_k1_variance(x: f64) -> Result<AlternatingEvenMoments> {
    check_unit_interval("x", x)?;
    let eta = eta(x);
    let d = 1.0 - x * x;
    let series = sum_series(|n| {
        let k = n as f64;
        (2.0 * k + 2.0) * (2.0 * k + 1.0) / ((2.0 * k + 3.0) * (2.0 * k + 1.0)).sqrt()
            * x.powi(2 * n as i32 + 1)
    });
    let s = series.value;
    let inv_sqrt3 = 1.0 / 3f64.sqrt();
    Ok(AlternatingEvenMoments {
        x,
        eta,
        series,
        a2b2: -s / eta,
        shifted_number_product: (1.0 + x * x) / (eta * d * d),
        number_product: (3.0 * x * x - 1.0) / (eta * d * d) + 1.0,
        k1_variance: 1.0 + 4.0 * x * x / (eta * d * d) - 2.0 * s / eta,
        closed_form_bound: 1.0
            + 4.0 / eta * (-inv_sqrt3 * x + x * x * (1.0 - x * (2.0 - x * x)) / (d * d)),
        termwise_bound: 1.0
            + 4.0 / eta * (-inv_sqrt3 * x + x * x * (1.0 - x * (3.0 - x * x) / 2.0) / (d * d)),
    })
}

/// `(|1,0,0⟩ + |0,1,1⟩)/√2`.
pub fn gen_ghz_like(cutoffs: &[usize]) -> Result<FockState> {
    check_two(cutoffs, 3)?;
    FockState::new_pure(cutoffs, [([1, 0, 0], c(1.0)), ([0, 1, 1], c(1.0))])
}

fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    // P(n ≥ cutoff) for n ~ Poisson(mean), summed upward from the cutoff
    let log_first = -mean + cutoff as f64 * mean.ln() - ln_factorial(cutoff);
    let first = log_first.exp();
    let tail = sum_series(|k| {
        let mut t = first;
        for j in 1..=k {
            t *= mean / (cutoff + j) as f64;
        }
        t
    });
    tail.value
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Smallest single-mode cutoff holding a coherent state's Poisson tail to TAIL_BOUND.
pub fn coherent_cutoff(alpha: Complex64) -> usize {
    let mean = alpha.norm_sqr();
    let mut cutoff = 1;
    while poisson_tail(mean, cutoff) > TAIL_BOUND {
        cutoff += 1;
    }
    cutoff
}

/// Tensor product of coherent states `|α₀⟩|α₁⟩…`, truncated and renormalized.
pub fn gen_product_coherent(alphas: &[Complex64], cutoffs: &[usize]) -> Result<FockState> {
    check_two(cutoffs, alphas.len())?;
    let mut factors = Vec::with_capacity(alphas.len());
    for (&alpha, &cutoff) in alphas.iter().zip(cutoffs) {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) || cutoff == 0 {
            return Err(Error::InvalidParameter(format!(
                "bad coherent mode α={alpha}, cutoff={cutoff}"
            )));
        }
        check_tail(poisson_tail(alpha.norm_sqr(), cutoff))?;
        let mut amp = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        let mut mode = Vec::with_capacity(cutoff);
        for n in 0..cutoff {
            if n > 0 {
                amp = amp * alpha / (n as f64).sqrt();
            }
            mode.push(amp);
        }
        factors.push(mode);
    }
    FockState::from_amplitudes(cutoffs, tensor_product(&factors))
}

/// Kronecker product of single-mode vectors, mode 0 slowest.
pub fn tensor_product(factors: &[Vec<Complex64>]) -> Vec<Complex64> {
    factors.iter().fold(vec![c(1.0)], |acc, f| {
        acc.iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect()
    })
}
