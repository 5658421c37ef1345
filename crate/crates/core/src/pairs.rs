//! Pair enumeration for the pointwise verifiers: exhaustive when the pair
//! count fits the budget, otherwise a seeded sample stratified by distance
//! decile. Reductions use max with index tie-breaks and integer counts, so
//! results do not depend on scheduling.

use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_PAIR_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairSampling {
    pub budget: u64,
    pub seed: u64,
}

impl Default for PairSampling {
    fn default() -> Self {
        PairSampling { budget: DEFAULT_PAIR_BUDGET, seed: 0 }
    }
}

/// How the pairs of a scan were chosen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingInfo {
    /// `"exhaustive"` or `"stratified"`.
    pub mode: String,
    pub budget: u64,
    pub seed: u64,
    pub candidate_pairs: u64,
    pub strata: usize,
}

/// Result of evaluating one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome {
    /// Not part of the check; the payload is one of the `SKIP_*` reasons.
    Skip(usize),
    /// Checked. `score > 1` means the pair violates the inequality.
    Value { score: f64, ratio: f64, tol: f64 },
    /// Violated with a zero bound.
    Hard,
}

pub(crate) const SKIP_ZERO: usize = 0;
pub(crate) const SKIP_MARGIN: usize = 1;
pub(crate) const SKIP_EMPTY_LENS: usize = 2;
pub(crate) const SKIP_OTHER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Worst {
    pub score: f64,
    pub ratio: f64,
    pub tol: f64,
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PairScan {
    pub checked: u64,
    pub skipped: u64,
    pub skipped_by: [u64; 4],
    pub hard: u64,
    pub violations: u64,
    pub worst: Option<Worst>,
    pub first_hard: Option<(usize, usize)>,
    pub sampling: SamplingInfo,
}

#[derive(Clone, Copy, Default)]
struct Acc {
    checked: u64,
    skipped_by: [u64; 4],
    hard: u64,
    violations: u64,
    worst: Option<Worst>,
    first_hard: Option<(usize, usize)>,
}

impl Acc {
    fn push(&mut self, x: usize, y: usize, outcome: Outcome) {
        match outcome {
            Outcome::Skip(reason) => self.skipped_by[reason] += 1,
            Outcome::Hard => {
                self.checked += 1;
                self.hard += 1;
                if self.first_hard.map_or(true, |p| (x, y) < p) {
                    self.first_hard = Some((x, y));
                }
            }
            Outcome::Value { score, ratio, tol } => {
                self.checked += 1;
                if score > 1.0 {
                    self.violations += 1;
                }
                let cand = Worst { score, ratio, tol, x, y };
                self.worst = pick(self.worst, Some(cand));
            }
        }
    }

    fn merge(self, other: Acc) -> Acc {
        Acc {
            checked: self.checked + other.checked,
            skipped_by: std::array::from_fn(|i| self.skipped_by[i] + other.skipped_by[i]),
            hard: self.hard + other.hard,
            violations: self.violations + other.violations,
            worst: pick(self.worst, other.worst),
            first_hard: match (self.first_hard, other.first_hard) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

fn pick(a: Option<Worst>, b: Option<Worst>) -> Option<Worst> {
    match (a, b) {
        (Some(a), Some(b)) => {
            if b.score > a.score || (b.score == a.score && (b.x, b.y) < (a.x, a.y)) {
                Some(b)
            } else {
                Some(a)
            }
        }
        (a, b) => a.or(b),
    }
}

const STRATA: usize = 10;

/// Scans unordered pairs of distinct entries of `points`.
///
/// `dist(x, y)` is only used to assign sampled pairs to strata; `max_dist`
/// is the largest value it can take.
pub(crate) fn scan_pairs<E, D>(
    points: &[usize],
    sampling: PairSampling,
    dist: D,
    max_dist: f64,
    eval: E,
) -> PairScan
where
    E: Fn(usize, usize) -> Outcome + Sync,
    D: Fn(usize, usize) -> f64 + Sync,
{
    let n = points.len() as u64;
    let candidates = n * n.saturating_sub(1) / 2;
    if candidates <= sampling.budget {
        let acc = (0..points.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = Acc::default();
                let x = points[i];
                for &y in &points[i + 1..] {
                    acc.push(x, y, eval(x, y));
                }
                acc
            })
            .reduce(Acc::default, Acc::merge);
        return finish(
            acc,
            SamplingInfo {
                mode: "exhaustive".into(),
                budget: sampling.budget,
                seed: sampling.seed,
                candidate_pairs: candidates,
                strata: 1,
            },
        );
    }

    // Pairs are kept with a per-stratum probability `quota / count`, decided
    // by a seeded hash of the pair, so sparse strata are taken whole and the
    // selection does not depend on scheduling.
    let quota = sampling.budget.div_ceil(STRATA as u64);
    let stratum = |d: f64| -> usize {
        if max_dist > 0.0 {
            ((d / max_dist * STRATA as f64) as usize).min(STRATA - 1)
        } else {
            0
        }
    };
    let counts = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut c = [0u64; STRATA];
            let x = points[i];
            for &y in &points[i + 1..] {
                c[stratum(dist(x, y))] += 1;
            }
            c
        })
        .reduce(|| [0u64; STRATA], |a, b| std::array::from_fn(|k| a[k] + b[k]));
    let thresholds: [Option<u64>; STRATA] = std::array::from_fn(|k| {
        (counts[k] > quota).then(|| ((quota as f64 / counts[k] as f64) * 2f64.powi(64)) as u64)
    });
    let total = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Acc::default();
            let x = points[i];
            for &y in &points[i + 1..] {
                let (a, b) = if x < y { (x, y) } else { (y, x) };
                let keep = match thresholds[stratum(dist(a, b))] {
                    None => true,
                    Some(t) => pair_hash(sampling.seed, a, b) < t,
                };
                if keep {
                    acc.push(a, b, eval(a, b));
                }
            }
            acc
        })
        .reduce(Acc::default, Acc::merge);
    finish(
        total,
        SamplingInfo {
            mode: "stratified".into(),
            budget: sampling.budget,
            seed: sampling.seed,
            candidate_pairs: candidates,
            strata: STRATA,
        },
    )
}

fn pair_hash(seed: u64, x: usize, y: usize) -> u64 {
    let mut z = seed ^ (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (y as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn finish(acc: Acc, sampling: SamplingInfo) -> PairScan {
    PairScan {
        checked: acc.checked,
        skipped: acc.skipped_by.iter().sum(),
        skipped_by: acc.skipped_by,
        hard: acc.hard,
        violations: acc.violations,
        worst: acc.worst,
        first_hard: acc.first_hard,
        sampling,
    }
}
