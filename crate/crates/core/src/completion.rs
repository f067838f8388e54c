//! Completions of partial functions and the FID bounds they imply.
//!
//! A sweep decomposes every deterministic completion (when enumerable), a
//! batch of Dirichlet-sampled probabilistic completions per concentration,
//! and the maximum-entropy completion. Sample `k` draws from its own ChaCha
//! stream derived from `(seed, k)`, so sweeps are reproducible regardless of
//! how the work is scheduled across threads.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Open01};
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::{decompose, FidReport};
use crate::error::{FidError, Result};
use crate::model::{FunctionSpec, OutputDistribution, PartialFunctionSpec};

pub const DEFAULT_ALPHAS: [f64; 4] = [0.1, 0.5, 1.0, 10.0];
pub const DEFAULT_DETERMINISTIC_CAP: usize = 65_536;
pub const DEFAULT_SAMPLES_PER_ALPHA: usize = 1_000;
/// Points in the 1-D grid scan, endpoints included.
pub const GRID_POINTS: usize = 1_001;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletionConfig {
    pub enumerate_deterministic: bool,
    pub samples_per_alpha: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    pub deterministic_cap: usize,
    /// Refine bounds by a grid scan over the single unknown row of a
    /// binary-output partial function.
    pub grid_refine: bool,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        CompletionConfig {
            enumerate_deterministic: true,
            samples_per_alpha: DEFAULT_SAMPLES_PER_ALPHA,
            alphas: DEFAULT_ALPHAS.to_vec(),
            seed: 0,
            deterministic_cap: DEFAULT_DETERMINISTIC_CAP,
            grid_refine: false,
        }
    }
}

impl CompletionConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(&a) = self.alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(FidError::InvalidAlpha(a));
        }
        if self.deterministic_cap == 0 {
            return Err(FidError::InvalidConfig(
                "deterministic cap must be at least 1".into(),
            ));
        }
        if self.samples_per_alpha > 0 && self.alphas.is_empty() {
            return Err(FidError::InvalidConfig(
                "samples requested but no alphas given".into(),
            ));
        }
        Ok(())
    }

    fn probabilistic_count(&self) -> usize {
        self.samples_per_alpha * self.alphas.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionKind {
    Deterministic,
    Probabilistic,
    MaxEntropy,
}

impl fmt::Display for CompletionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompletionKind::Deterministic => "deterministic",
            CompletionKind::Probabilistic => "probabilistic",
            CompletionKind::MaxEntropy => "max_entropy",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletionSample {
    pub sample_id: u64,
    pub kind: CompletionKind,
    /// Present exactly for probabilistic samples.
    pub alpha: Option<f64>,
    pub report: FidReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn point(x: f64) -> Self {
        Range { min: x, max: x }
    }

    fn include(&mut self, x: f64) {
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    fn merge(&mut self, other: Range) {
        self.include(other.min);
        self.include(other.max);
    }

    pub fn contains(&self, x: f64) -> bool {
        self.min <= x && x <= self.max
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariableBounds {
    pub name: String,
    pub label: String,
    pub independent: Range,
    pub solo_synergy: Range,
    pub loss: Range,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantityBounds {
    pub total_information: Range,
    pub synergy: Range,
    pub output_entropy: Range,
    pub residual_entropy: Range,
    pub variables: Vec<VariableBounds>,
}

impl QuantityBounds {
    fn from_report(r: &FidReport) -> Self {
        QuantityBounds {
            total_information: Range::point(r.total_information),
            synergy: Range::point(r.synergy),
            output_entropy: Range::point(r.output_entropy),
            residual_entropy: Range::point(r.residual_entropy),
            variables: r
                .variables
                .iter()
                .map(|v| VariableBounds {
                    name: v.name.clone(),
                    label: v.label.clone(),
                    independent: Range::point(v.independent),
                    solo_synergy: Range::point(v.solo_synergy),
                    loss: Range::point(v.loss),
                })
                .collect(),
        }
    }

    fn include(&mut self, r: &FidReport) {
        self.merge(&QuantityBounds::from_report(r));
    }

    fn merge(&mut self, o: &QuantityBounds) {
        self.total_information.merge(o.total_information);
        self.synergy.merge(o.synergy);
        self.output_entropy.merge(o.output_entropy);
        self.residual_entropy.merge(o.residual_entropy);
        for (a, b) in self.variables.iter_mut().zip(&o.variables) {
            a.independent.merge(b.independent);
            a.solo_synergy.merge(b.solo_synergy);
            a.loss.merge(b.loss);
        }
    }

    /// Exact extrema over a non-empty set of reports.
    pub fn over<'a>(reports: impl IntoIterator<Item = &'a FidReport>) -> Option<Self> {
        let mut it = reports.into_iter();
        let mut b = QuantityBounds::from_report(it.next()?);
        for r in it {
            b.include(r);
        }
        Some(b)
    }

    /// Whether every quantity of `r` lies inside these bounds.
    pub fn contains(&self, r: &FidReport) -> bool {
        self.total_information.contains(r.total_information)
            && self.synergy.contains(r.synergy)
            && self.output_entropy.contains(r.output_entropy)
            && self.residual_entropy.contains(r.residual_entropy)
            && self.variables.iter().zip(&r.variables).all(|(b, v)| {
                b.independent.contains(v.independent)
                    && b.solo_synergy.contains(v.solo_synergy)
                    && b.loss.contains(v.loss)
            })
    }

    /// Whether `other` is nested inside these bounds.
    pub fn contains_bounds(&self, other: &QuantityBounds) -> bool {
        let nested = |a: &Range, b: &Range| a.min <= b.min && b.max <= a.max;
        nested(&self.total_information, &other.total_information)
            && nested(&self.synergy, &other.synergy)
            && nested(&self.output_entropy, &other.output_entropy)
            && nested(&self.residual_entropy, &other.residual_entropy)
            && self.variables.iter().zip(&other.variables).all(|(a, b)| {
                nested(&a.independent, &b.independent)
                    && nested(&a.solo_synergy, &b.solo_synergy)
                    && nested(&a.loss, &b.loss)
            })
    }
}

/// How the reported bounds were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// Deterministic completions plus the max-entropy point only.
    Enumerated,
    /// Includes random probabilistic completions: sampled, not certified.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletionCloud {
    pub samples: Vec<CompletionSample>,
    /// Exact extrema over `samples`.
    pub bounds: QuantityBounds,
    pub source: BoundSource,
    /// `bounds` widened by the grid scan, when one was requested.
    pub grid_refined: Option<QuantityBounds>,
}

impl CompletionCloud {
    /// The tightest-known bounds: grid-refined when available.
    pub fn best_bounds(&self) -> &QuantityBounds {
        self.grid_refined.as_ref().unwrap_or(&self.bounds)
    }

    pub fn count(&self, kind: CompletionKind) -> usize {
        self.samples.iter().filter(|s| s.kind == kind).count()
    }
}

/// |Y|^u for u unknown rows, saturating.
pub fn deterministic_completion_count(partial: &PartialFunctionSpec) -> u128 {
    let k = partial.output().len() as u128;
    let u = partial.unknown_rows().len() as u32;
    k.checked_pow(u).unwrap_or(u128::MAX)
}

/// The `index`-th deterministic completion in mixed-radix order, first
/// unknown row most significant.
fn deterministic_completion(
    partial: &PartialFunctionSpec,
    unknown: &[usize],
    index: u128,
) -> FunctionSpec {
    let k = partial.output().len();
    let mut digits = vec![0usize; unknown.len()];
    let mut rest = index;
    for d in digits.iter_mut().rev() {
        *d = (rest % k as u128) as usize;
        rest /= k as u128;
    }
    partial.complete_with(|row| {
        let slot = unknown.binary_search(&row).expect("unknown row");
        OutputDistribution::point(k, digits[slot])
    })
}

fn check_cap(partial: &PartialFunctionSpec, cap: usize) -> Result<usize> {
    let count = deterministic_completion_count(partial);
    if count > cap as u128 {
        return Err(FidError::CompletionCapExceeded { count, cap });
    }
    Ok(count as usize)
}

/// Every deterministic completion, in mixed-radix order over unknown rows.
pub fn enumerate_deterministic_completions(
    partial: &PartialFunctionSpec,
    cap: usize,
) -> Result<Vec<FunctionSpec>> {
    let count = check_cap(partial, cap)?;
    let unknown = partial.unknown_rows();
    Ok((0..count as u128)
        .map(|i| deterministic_completion(partial, &unknown, i))
        .collect())
}

/// One draw from a symmetric Dirichlet(alpha) over `k` outcomes.
///
/// Gamma variates are formed in log space, using
/// Gamma(a) = Gamma(a + 1) * U^(1/a) for a < 1, so that very small
/// concentrations still yield a normalisable vector.
pub fn sample_dirichlet<R: Rng + ?Sized>(k: usize, alpha: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(FidError::InvalidAlpha(alpha));
    }
    if k == 1 {
        return Ok(vec![1.0]);
    }
    let boosted = alpha < 1.0;
    let shape = if boosted { alpha + 1.0 } else { alpha };
    let gamma = Gamma::new(shape, 1.0).map_err(|_| FidError::InvalidAlpha(alpha))?;
    let logs: Vec<f64> = (0..k)
        .map(|_| {
            let g: f64 = gamma.sample(rng);
            let mut l = g.ln();
            if boosted {
                let u: f64 = Open01.sample(rng);
                l += u.ln() / alpha;
            }
            l
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / sum).collect())
}

/// Fills each unknown row with an independent symmetric Dirichlet(alpha) draw.
pub fn sample_probabilistic_completion<R: Rng + ?Sized>(
    partial: &PartialFunctionSpec,
    alpha: f64,
    rng: &mut R,
) -> Result<FunctionSpec> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(FidError::InvalidAlpha(alpha));
    }
    let k = partial.output().len();
    let mut draws = Vec::new();
    for _ in partial.unknown_rows() {
        draws.push(OutputDistribution::new(sample_dirichlet(k, alpha, rng)?)?);
    }
    let mut draws = draws.into_iter();
    Ok(partial.complete_with(|_| draws.next().expect("one draw per unknown row")))
}

/// Every unknown row set to the uniform output distribution.
pub fn max_entropy_completion(partial: &PartialFunctionSpec) -> FunctionSpec {
    let k = partial.output().len();
    partial.complete_with(|_| OutputDistribution::uniform(k))
}

/// Random stream for one sample of a sweep.
pub fn sample_rng(seed: u64, sample_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_id);
    rng
}

fn grid_scan(partial: &PartialFunctionSpec) -> Result<QuantityBounds> {
    let unknown = partial.unknown_rows();
    if partial.output().len() != 2 || unknown.len() != 1 {
        return Err(FidError::GridRefineUnsupported(format!(
            "needs a binary output and one unknown row, got {} output states and {} unknown rows",
            partial.output().len(),
            unknown.len()
        )));
    }
    let reports = (0..GRID_POINTS)
        .into_par_iter()
        .map(|i| {
            let q = i as f64 / (GRID_POINTS - 1) as f64;
            let spec = partial.complete_with(|_| {
                OutputDistribution::new(vec![1.0 - q, q]).expect("grid point on the simplex")
            });
            decompose(&spec)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantityBounds::over(&reports).expect("grid is non-empty"))
}

pub fn sweep(partial: &PartialFunctionSpec, config: &CompletionConfig) -> Result<CompletionCloud> {
    config.validate()?;
    let n_prob = config.probabilistic_count();
    if !config.enumerate_deterministic && n_prob == 0 {
        return Err(FidError::NoCompletionsRequested);
    }
    let n_det = if config.enumerate_deterministic {
        check_cap(partial, config.deterministic_cap)?
    } else {
        0
    };
    let unknown = partial.unknown_rows();
    let total = n_det + n_prob + 1;

    let samples = (0..total)
        .into_par_iter()
        .map(|id| {
            let sample_id = id as u64;
            let (kind, alpha, spec) = if id < n_det {
                (
                    CompletionKind::Deterministic,
                    None,
                    deterministic_completion(partial, &unknown, id as u128),
                )
            } else if id < n_det + n_prob {
                let alpha = config.alphas[(id - n_det) / config.samples_per_alpha];
                let mut rng = sample_rng(config.seed, sample_id);
                (
                    CompletionKind::Probabilistic,
                    Some(alpha),
                    sample_probabilistic_completion(partial, alpha, &mut rng)?,
                )
            } else {
                (
                    CompletionKind::MaxEntropy,
                    None,
                    max_entropy_completion(partial),
                )
            };
            Ok(CompletionSample {
                sample_id,
                kind,
                alpha,
                report: decompose(&spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let bounds = QuantityBounds::over(samples.iter().map(|s| &s.report))
        .expect("max-entropy sample present");
    let grid_refined = if config.grid_refine {
        let mut b = grid_scan(partial)?;
        b.merge(&bounds);
        Some(b)
    } else {
        None
    };
    Ok(CompletionCloud {
        samples,
        bounds,
        source: if n_prob > 0 {
            BoundSource::Sampled
        } else {
            BoundSource::Enumerated
        },
        grid_refined,
    })
}
