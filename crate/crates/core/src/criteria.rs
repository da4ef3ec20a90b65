//! Moment-based entanglement criteria.
//!
//! Every criterion reports `lhs`, `rhs` and `margin = lhs − rhs`, oriented so that a
//! margin above the tolerance certifies entanglement. All separable states give
//! `margin ≤ 0`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::moments::{expect, expect_real, mean_variance, three_mode, two_mode};
use crate::operators::{HermitianCombination, OperatorMonomial};
use crate::par::Exec;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_PHI_GRID: usize = 16;
pub const DEFAULT_MN_MAX: u32 = 3;

/// Criterion identifiers; the string forms are part of the report format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriterionId {
    /// `lsum`
    LSum,
    /// `hz-cross:m:n`
    HzCross { m: u32, n: u32 },
    /// `hz-pair:m:n`
    HzPair { m: u32, n: u32 },
    /// `k:<grid-size>`
    K { grid: usize },
    /// `three-mode`
    ThreeMode,
}

impl CriterionId {
    /// Number of modes the criterion acts on.
    pub fn arity(self) -> usize {
        match self {
            CriterionId::ThreeMode => 3,
            _ => 2,
        }
    }

    /// All criteria applicable to a state with `mode_count` modes, in report order.
    pub fn defaults_for(mode_count: usize, config: &EvalConfig) -> Result<Vec<CriterionId>> {
        match mode_count {
            2 => {
                let mut ids = vec![CriterionId::LSum];
                let pairs =
                    || (1..=config.mn_max).flat_map(|m| (1..=config.mn_max).map(move |n| (m, n)));
                ids.extend(pairs().map(|(m, n)| CriterionId::HzCross { m, n }));
                ids.extend(pairs().map(|(m, n)| CriterionId::HzPair { m, n }));
                ids.push(CriterionId::K {
                    grid: config.phi_grid,
                });
                Ok(ids)
            }
            3 => Ok(vec![CriterionId::ThreeMode]),
            other => Err(Error::WrongArity {
                expected: 2,
                actual: other,
            }),
        }
    }

    pub const SYNTAX: &'static str = "lsum, hz-cross:M:N, hz-pair:M:N, k:G, three-mode";
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionId::LSum => f.write_str("lsum"),
            CriterionId::HzCross { m, n } => write!(f, "hz-cross:{m}:{n}"),
            CriterionId::HzPair { m, n } => write!(f, "hz-pair:{m}:{n}"),
            CriterionId::K { grid } => write!(f, "k:{grid}"),
            CriterionId::ThreeMode => f.write_str("three-mode"),
        }
    }
}

impl FromStr for CriterionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "unknown criterion '{s}' (valid: {})",
                CriterionId::SYNTAX
            ))
        };
        let positive = |t: &str| -> Result<u32> {
            match t.parse::<u32>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(bad()),
            }
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["lsum"] => Ok(CriterionId::LSum),
            ["three-mode"] => Ok(CriterionId::ThreeMode),
            ["hz-cross", m, n] => Ok(CriterionId::HzCross {
                m: positive(m)?,
                n: positive(n)?,
            }),
            ["hz-pair", m, n] => Ok(CriterionId::HzPair {
                m: positive(m)?,
                n: positive(n)?,
            }),
            ["k", g] => Ok(CriterionId::K {
                grid: positive(g)? as usize,
            }),
            _ => Err(bad()),
        }
    }
}

/// Settings shared by all criteria.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalConfig {
    /// Relative tolerance; the effective tolerance is `tol · max(1, |lhs|, |rhs|)`.
    pub tol: f64,
    pub phi_grid: usize,
    pub mn_max: u32,
    pub exec: Exec,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOLERANCE,
            phi_grid: DEFAULT_PHI_GRID,
            mn_max: DEFAULT_MN_MAX,
            exec: Exec::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be > 0, got {}",
                self.tol
            )));
        }
        if self.phi_grid == 0 {
            return Err(Error::InvalidParameter("phi grid size must be ≥ 1".into()));
        }
        if self.mn_max == 0 {
            return Err(Error::InvalidParameter("m/n range must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    #[serde(rename = "criterion")]
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub detected: bool,
    pub tol: f64,
}

impl CriterionResult {
    pub fn new(
        name: impl Into<String>,
        params: BTreeMap<String, f64>,
        lhs: f64,
        rhs: f64,
        relative_tol: f64,
    ) -> Result<Self> {
        let name = name.into();
        if !lhs.is_finite() || !rhs.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{name}: non-finite sides lhs={lhs} rhs={rhs}"
            )));
        }
        let tol = relative_tol * lhs.abs().max(rhs.abs()).max(1.0);
        let margin = lhs - rhs;
        Ok(Self {
            name,
            params,
            lhs,
            rhs,
            margin,
            detected: margin > tol,
            tol,
        })
    }
}

fn params<const N: usize>(items: [(&str, f64); N]) -> BTreeMap<String, f64> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// `2(⟨N_a⟩ + ⟨N_b⟩)` against `(ΔL₁)² + (ΔL₂)²`.
pub fn criterion_lsum(state: &FockState, tol: f64) -> Result<CriterionResult> {
    two_mode(state)?;
    let na = expect_real(state, &OperatorMonomial::number(2, 0))?;
    let nb = expect_real(state, &OperatorMonomial::number(2, 1))?;
    let v1 = mean_variance(state, &HermitianCombination::l1())?.variance;
    let v2 = mean_variance(state, &HermitianCombination::l2())?.variance;
    CriterionResult::new(
        CriterionId::LSum.to_string(),
        BTreeMap::new(),
        2.0 * (na + nb),
        v1 + v2,
        tol,
    )
}

/// `|⟨aᵐ(b†)ⁿ⟩|²` against `⟨(a†)ᵐaᵐ(b†)ⁿbⁿ⟩`.
pub fn criterion_hz_cross(state: &FockState, m: u32, n: u32, tol: f64) -> Result<CriterionResult> {
    two_mode(state)?;
    check_powers(m, n)?;
    let cross = expect(state, &OperatorMonomial::from_pairs(&[(0, m), (n, 0)]))?;
    let rhs = expect_real(state, &OperatorMonomial::from_pairs(&[(m, m), (n, n)]))?;
    CriterionResult::new(
        CriterionId::HzCross { m, n }.to_string(),
        params([("m", m as f64), ("n", n as f64)]),
        cross.norm_sqr(),
        rhs,
        tol,
    )
}

/// `|⟨aᵐbⁿ⟩|²` against `⟨(a†)ᵐaᵐ⟩⟨(b†)ⁿbⁿ⟩`.
pub fn criterion_hz_pair(state: &FockState, m: u32, n: u32, tol: f64) -> Result<CriterionResult> {
    two_mode(state)?;
    check_powers(m, n)?;
    let pair = expect(state, &OperatorMonomial::from_pairs(&[(0, m), (0, n)]))?;
    let a_side = expect_real(state, &OperatorMonomial::from_pairs(&[(m, m), (0, 0)]))?;
    let b_side = expect_real(state, &OperatorMonomial::from_pairs(&[(0, 0), (n, n)]))?;
    CriterionResult::new(
        CriterionId::HzPair { m, n }.to_string(),
        params([("m", m as f64), ("n", n as f64)]),
        pair.norm_sqr(),
        a_side * b_side,
        tol,
    )
}

fn check_powers(m: u32, n: u32) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "powers must be positive, got m={m} n={n}"
        )));
    }
    Ok(())
}

/// `size` equally spaced phases on `[0, 2π)`.
pub fn phi_grid(size: usize) -> Vec<f64> {
    (0..size).map(|j| TAU * j as f64 / size as f64).collect()
}

/// Per-phase results of the `K(φ)` criterion and the grid minimum of `(ΔK(φ))²`.
#[derive(Clone, Debug, PartialEq)]
pub struct KScan {
    pub points: Vec<CriterionResult>,
    /// The point with the largest margin, renamed `k:<grid-size>`.
    pub best: CriterionResult,
}

/// `1` against `(ΔK(φ))²` for each phase on the grid.
pub fn criterion_k(state: &FockState, phis: &[f64], tol: f64) -> Result<KScan> {
    two_mode(state)?;
    if phis.is_empty() {
        return Err(Error::InvalidParameter("empty phase grid".into()));
    }
    let name = CriterionId::K { grid: phis.len() }.to_string();
    let points = phis
        .iter()
        .map(|&phi| {
            let variance = mean_variance(state, &HermitianCombination::k_phi(phi))?.variance;
            CriterionResult::new(
                name.clone(),
                params([("grid", phis.len() as f64), ("phi", phi)]),
                1.0,
                variance,
                tol,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let best = points
        .iter()
        .fold(None::<&CriterionResult>, |acc, r| match acc {
            Some(b) if b.margin >= r.margin => Some(b),
            _ => Some(r),
        })
        .expect("non-empty grid")
        .clone();
    Ok(KScan { points, best })
}

/// `|⟨ab†c†⟩|²` against `⟨N_aN_bN_c⟩`; detection rules out full separability.
pub fn criterion_three_mode(state: &FockState, tol: f64) -> Result<CriterionResult> {
    three_mode(state)?;
    let cross = expect(
        state,
        &OperatorMonomial::from_pairs(&[(0, 1), (1, 0), (1, 0)]),
    )?;
    let rhs = expect_real(
        state,
        &OperatorMonomial::from_pairs(&[(1, 1), (1, 1), (1, 1)]),
    )?;
    CriterionResult::new(
        CriterionId::ThreeMode.to_string(),
        BTreeMap::new(),
        cross.norm_sqr(),
        rhs,
        tol,
    )
}

/// Runs one criterion; `k:G` yields its grid summary.
pub fn evaluate(
    state: &FockState,
    id: CriterionId,
    config: &EvalConfig,
) -> Result<CriterionResult> {
    config.validate()?;
    if state.mode_count() != id.arity() {
        return Err(Error::WrongArity {
            expected: id.arity(),
            actual: state.mode_count(),
        });
    }
    match id {
        CriterionId::LSum => criterion_lsum(state, config.tol),
        CriterionId::HzCross { m, n } => criterion_hz_cross(state, m, n, config.tol),
        CriterionId::HzPair { m, n } => criterion_hz_pair(state, m, n, config.tol),
        CriterionId::K { grid } => Ok(criterion_k(state, &phi_grid(grid), config.tol)?.best),
        CriterionId::ThreeMode => criterion_three_mode(state, config.tol),
    }
}

/// One entry of a batch evaluation; failures do not abort the batch.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub criterion: CriterionId,
    pub outcome: Result<CriterionResult>,
}

/// Evaluates `ids` concurrently; results keep the order of `ids`.
pub fn evaluate_many(
    state: &FockState,
    ids: &[CriterionId],
    config: &EvalConfig,
) -> Vec<Evaluation> {
    config.exec.map(ids, |&id| Evaluation {
        criterion: id,
        outcome: evaluate(state, id, config),
    })
}

/// Every criterion applicable to the state's arity, with the configured ranges.
pub fn evaluate_all(state: &FockState, config: &EvalConfig) -> Result<Vec<Evaluation>> {
    config.validate()?;
    let ids = CriterionId::defaults_for(state.mode_count(), config)?;
    Ok(evaluate_many(state, &ids, config))
}

/// Grid for the numerical minimization of
/// `F(x, y) = √((x+1)(y+1) − z) − √(xy − z)` over `xy ≥ z ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FGrid {
    pub x_max: f64,
    pub y_max: f64,
    pub steps: usize,
    /// `z` is sampled at `k/(z_fractions−1) · xy` for `k = 0..z_fractions`.
    pub z_fractions: usize,
}

impl Default for FGrid {
    fn default() -> Self {
        Self {
            x_max: 50.0,
            y_max: 50.0,
            steps: 200,
            z_fractions: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FGridReport {
    pub grid: FGrid,
    pub min_f: f64,
    pub argmin: (f64, f64, f64),
    pub evaluated: usize,
}

pub fn f_value(x: f64, y: f64, z: f64) -> f64 {
    ((x + 1.0) * (y + 1.0) - z).sqrt() - (x * y - z).max(0.0).sqrt()
}

pub fn verify_f_bound(grid: &FGrid) -> Result<FGridReport> {
    verify_f_bound_with(grid, Exec::default())
}

pub fn verify_f_bound_with(grid: &FGrid, exec: Exec) -> Result<FGridReport> {
    if !(grid.x_max > 0.0 && grid.y_max > 0.0) || grid.steps < 2 || grid.z_fractions < 2 {
        return Err(Error::InvalidParameter(format!("bad F grid {grid:?}")));
    }
    let coord = |max: f64, i: usize| max * i as f64 / (grid.steps - 1) as f64;
    let rows = exec.map_range(grid.steps, |i| {
        let x = coord(grid.x_max, i);
        let mut best = (f64::INFINITY, (0.0, 0.0, 0.0));
        let mut count = 0usize;
        for j in 0..grid.steps {
            let y = coord(grid.y_max, j);
            let xy = x * y;
            for k in 0..grid.z_fractions {
                let frac = k as f64 / (grid.z_fractions - 1) as f64;
                let z = frac * xy;
                if !(z >= 0.0 && z <= xy) {
                    continue;
                }
                count += 1;
                let f = f_value(x, y, z);
                if f < best.0 {
                    best = (f, (x, y, z));
                }
            }
        }
        (best, count)
    });
    let mut min_f = f64::INFINITY;
    let mut argmin = (0.0, 0.0, 0.0);
    let mut evaluated = 0;
    for ((f, at), count) in rows {
        evaluated += count;
        if f < min_f {
            min_f = f;
            argmin = at;
        }
    }
    Ok(FGridReport {
        grid: *grid,
        min_f,
        argmin,
        evaluated,
    })
}
