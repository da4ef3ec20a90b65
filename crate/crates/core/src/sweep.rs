//! One-parameter sweeps of a generator against a criterion.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::criteria::{evaluate, CriterionId, EvalConfig};
use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::report::{format_number, round_sig};
use crate::sampler::sample_separable_mixture;
use crate::states::{
    alternating_even_cutoff, gen_alternating_even, gen_mixed_s, gen_tmsv, tmsv_cutoff,
};

/// Generator families with a single scalar parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepFamily {
    /// `mixed-s`, parameter `s`
    MixedS,
    /// `tmsv`, parameter `x`
    Tmsv,
    /// `alt-even`, parameter `x`
    AltEven,
}

impl SweepFamily {
    pub fn parameter(self) -> &'static str {
        match self {
            SweepFamily::MixedS => "s",
            SweepFamily::Tmsv | SweepFamily::AltEven => "x",
        }
    }

    /// Builds the state at `value`. `cutoff = None` picks the smallest admissible one.
    pub fn generate(self, value: f64, cutoff: Option<usize>) -> Result<FockState> {
        match self {
            SweepFamily::MixedS => {
                let c = cutoff.unwrap_or(2);
                gen_mixed_s(value, &[c, c])
            }
            SweepFamily::Tmsv => gen_tmsv(value, cutoff.map_or_else(|| tmsv_cutoff(value), Ok)?),
            SweepFamily::AltEven => gen_alternating_even(
                value,
                cutoff.map_or_else(|| alternating_even_cutoff(value), Ok)?,
            ),
        }
    }
}

impl fmt::Display for SweepFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepFamily::MixedS => "mixed-s",
            SweepFamily::Tmsv => "tmsv",
            SweepFamily::AltEven => "alt-even",
        })
    }
}

impl FromStr for SweepFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixed-s" => Ok(SweepFamily::MixedS),
            "tmsv" => Ok(SweepFamily::Tmsv),
            "alt-even" => Ok(SweepFamily::AltEven),
            other => Err(Error::Parse(format!(
                "'{other}' cannot be swept (valid: mixed-s, tmsv, alt-even)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRange {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl SweepRange {
    /// Grid points `from + i·step` up to `to` (inclusive, with a small slack for rounding).
    pub fn points(&self) -> Result<Vec<f64>> {
        let valid =
            self.step > 0.0 && self.to >= self.from && self.from.is_finite() && self.to.is_finite();
        if !valid {
            return Err(Error::InvalidParameter(format!("bad sweep range {self:?}")));
        }
        let count = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| (self.from + i as f64 * self.step).min(self.to))
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub detected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub generator: String,
    pub parameter: String,
    pub criterion: String,
    pub rows: Vec<SweepRow>,
    /// Parameter values where the verdict flips, by linear interpolation of the margin.
    pub thresholds: Vec<f64>,
}

pub fn run_sweep(
    family: SweepFamily,
    range: SweepRange,
    criterion: CriterionId,
    cutoff: Option<usize>,
    config: &EvalConfig,
) -> Result<SweepReport> {
    config.validate()?;
    if criterion.arity() != 2 {
        return Err(Error::WrongArity {
            expected: criterion.arity(),
            actual: 2,
        });
    }
    let points = range.points()?;
    let rows = config
        .exec
        .map(&points, |&p| {
            let state = family.generate(p, cutoff)?;
            let r = evaluate(&state, criterion, config)?;
            Ok(SweepRow {
                param: p,
                lhs: r.lhs,
                rhs: r.rhs,
                margin: r.margin,
                detected: r.detected,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let thresholds = rows
        .windows(2)
        .filter(|w| w[0].detected != w[1].detected)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            if a.margin == b.margin {
                (a.param + b.param) / 2.0
            } else {
                a.param + (b.param - a.param) * (-a.margin) / (b.margin - a.margin)
            }
        })
        .collect();
    Ok(SweepReport {
        generator: family.to_string(),
        parameter: family.parameter().to_string(),
        criterion: criterion.to_string(),
        rows,
        thresholds,
    })
}

impl SweepReport {
    /// Copy with every number rounded for output.
    pub fn rounded(&self) -> SweepReport {
        SweepReport {
            rows: self
                .rows
                .iter()
                .map(|r| SweepRow {
                    param: round_sig(r.param),
                    lhs: round_sig(r.lhs),
                    rhs: round_sig(r.rhs),
                    margin: round_sig(r.margin),
                    detected: r.detected,
                })
                .collect(),
            thresholds: self.thresholds.iter().map(|t| round_sig(*t)).collect(),
            ..self.clone()
        }
    }

    /// CSV table; thresholds follow as `# threshold` comment lines.
    pub fn to_csv(&self) -> String {
        let r = self.rounded();
        let mut out = format!("{},lhs,rhs,margin,detected\n", r.parameter);
        for row in &r.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                format_number(row.param),
                format_number(row.lhs),
                format_number(row.rhs),
                format_number(row.margin),
                row.detected
            ));
        }
        for t in &r.thresholds {
            out.push_str(&format!(
                "# threshold {}={}\n",
                r.parameter,
                format_number(*t)
            ));
        }
        out
    }
}

/// Outcome of running criteria over sampled separable states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SoundnessReport {
    pub samples: usize,
    pub evaluations: usize,
    /// `(seed, criterion)` pairs that reported a detection; empty for a sound criterion set.
    pub detections: Vec<(u64, String)>,
    /// `(seed, message)` for samples or criteria that failed to evaluate.
    pub failures: Vec<(u64, String)>,
}

/// Draws one separable mixture per seed (component count cycling through
/// `component_counts`) and evaluates `ids` on each.
pub fn soundness_sweep(
    seeds: &[u64],
    component_counts: &[usize],
    cutoffs: &[usize],
    ids: &[CriterionId],
    config: &EvalConfig,
) -> Result<SoundnessReport> {
    config.validate()?;
    if component_counts.is_empty() {
        return Err(Error::InvalidParameter("no component counts given".into()));
    }
    let per_seed = config.exec.map(seeds, |&seed| {
        let k = component_counts[(seed % component_counts.len() as u64) as usize];
        let mut detections = Vec::new();
        let mut failures = Vec::new();
        let state = match sample_separable_mixture(seed, k, cutoffs).and_then(|e| e.to_state()) {
            Ok(s) => s,
            Err(e) => return (detections, vec![(seed, e.to_string())], 0),
        };
        let mut count = 0;
        for &id in ids {
            // sequential inside: the fan-out is over seeds
            let inner = EvalConfig {
                exec: crate::par::Exec::Sequential,
                ..*config
            };
            match evaluate(&state, id, &inner) {
                Ok(r) => {
                    count += 1;
                    if r.detected {
                        detections.push((seed, r.name));
                    }
                }
                Err(e) => failures.push((seed, format!("{id}: {e}"))),
            }
        }
        (detections, failures, count)
    });
    let mut report = SoundnessReport {
        samples: seeds.len(),
        evaluations: 0,
        detections: Vec::new(),
        failures: Vec::new(),
    };
    for (d, f, n) in per_seed {
        report.detections.extend(d);
        report.failures.extend(f);
        report.evaluations += n;
    }
    Ok(report)
}
