//! Maximal mean difference quotients and the pointwise inequalities built on
//! them.
//!
//! `M_r Q f(x)` is the counting average of `|f(z) - f(x)| / |z - x|` over the
//! grid points of the open ball `B(x, r)` without its center, and `MQ f(x)`
//! is its supremum over the radius ladder `r = j h`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::{ball_indices, gradient, Grid, GridFunction};
use crate::maximal::{centered_maximal, ScalarField};
use crate::pairs::{
    scan_pairs, Outcome, PairSampling, PairScan, SamplingInfo, SKIP_EMPTY_LENS, SKIP_MARGIN, SKIP_ZERO,
};
use crate::stencil::{
    isqrt_floor, ladder_j_max, ladder_sup, lattice_ball_count, lattice_lens_count, lens_count, BallProfile,
    Stencil,
};

/// Multiplier `κ` of the per-pair discretization tolerance `κ h / |x - y|`.
pub const DEFAULT_KAPPA: f64 = 4.0;

/// A mean-quotient field together with its radius cap.
#[derive(Debug, Clone, PartialEq)]
pub struct MQField {
    pub base: ScalarField,
    pub radius_cap: Option<f64>,
    /// Points where every ladder ball was empty; their value is 0.
    pub empty_points: Vec<usize>,
}

impl MQField {
    pub fn values(&self) -> &[f64] {
        self.base.values()
    }

    pub fn value(&self, index: usize) -> f64 {
        self.base.value(index)
    }

    pub fn grid(&self) -> &Grid {
        self.base.grid()
    }
}

/// Outcome of a pointwise or pairwise inequality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub pairs_checked: u64,
    /// `+inf` (JSON `null`) when a hard failure occurred.
    pub worst_ratio: f64,
    pub worst_pair: Vec<Vec<f64>>,
    pub constant_used: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub hard_failures: u64,
    pub violations: u64,
    pub skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingInfo>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

impl InequalityReport {
    pub(crate) fn from_scan(name: &str, grid_points: impl Fn(usize) -> Vec<f64>, constant: f64, scan: PairScan) -> Self {
        let mut details = BTreeMap::new();
        details.insert("skipped_zero_over_zero".into(), Value::from(scan.skipped_by[SKIP_ZERO]));
        details.insert("skipped_outside_margin".into(), Value::from(scan.skipped_by[SKIP_MARGIN]));
        details.insert("skipped_empty_lens".into(), Value::from(scan.skipped_by[SKIP_EMPTY_LENS]));
        let (worst_ratio, tolerance, worst_pair) = if let Some((x, y)) = scan.first_hard {
            details.insert("first_hard_failure".into(), serde_json::json!([grid_points(x), grid_points(y)]));
            (f64::INFINITY, scan.worst.map_or(0.0, |w| w.tol), vec![grid_points(x), grid_points(y)])
        } else if let Some(w) = scan.worst {
            (w.ratio, w.tol, vec![grid_points(w.x), grid_points(w.y)])
        } else {
            (0.0, 0.0, Vec::new())
        };
        InequalityReport {
            name: name.into(),
            pairs_checked: scan.checked,
            worst_ratio,
            worst_pair,
            constant_used: constant,
            tolerance,
            pass: scan.hard == 0 && scan.violations == 0,
            hard_failures: scan.hard,
            violations: scan.violations,
            skipped: scan.skipped,
            sampling: Some(scan.sampling),
            details,
        }
    }

    pub(crate) fn pointwise(name: &str, constant: f64, tolerance: f64, checked: u64) -> Self {
        InequalityReport {
            name: name.into(),
            pairs_checked: checked,
            worst_ratio: 0.0,
            worst_pair: Vec::new(),
            constant_used: constant,
            tolerance,
            pass: true,
            hard_failures: 0,
            violations: 0,
            skipped: 0,
            sampling: None,
            details: BTreeMap::new(),
        }
    }

    pub fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.into(), value.into());
    }
}

/// Counting average of the difference quotient over `B(x, r) \ {x}`.
pub fn mean_quotient_at(f: &GridFunction, x: usize, r: f64) -> Result<f64> {
    let grid = f.grid();
    let ball = ball_indices(grid, x, r)?;
    if ball.is_empty() {
        return Err(Error::EmptyBall { center: x, radius: r });
    }
    let v = f.values();
    let sum: f64 = ball.iter().map(|&z| (v[z] - v[x]).abs() / grid.distance(x, z)).sum();
    Ok(sum / ball.len() as f64)
}

pub(crate) fn mq_values(grid: &Grid, v: &[f64], cap: Option<f64>) -> (Vec<f64>, Vec<usize>) {
    let j_max = ladder_j_max(grid, cap);
    let stencil = Stencil::new(grid, j_max * j_max);
    let raw: Vec<Option<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|x| ladder_sup(grid, &stencil, x, j_max, None, |z, k| (v[z] - v[x]).abs() / stencil.dist[k]))
        .collect();
    let empty = raw.iter().enumerate().filter(|(_, r)| r.is_none()).map(|(i, _)| i).collect();
    (raw.into_iter().map(|r| r.unwrap_or(0.0)).collect(), empty)
}

/// `MQ f` (uncapped) or `MQ_R f` (radii `r <= R`).
pub fn mq_field(f: &GridFunction, cap: Option<f64>) -> MQField {
    let (values, empty_points) = mq_values(f.grid(), f.values(), cap);
    let label = match cap {
        Some(c) => format!("mq_cap_{c}"),
        None => "mq".to_string(),
    };
    MQField {
        base: ScalarField::new(f.grid().clone(), values, label).expect("quotients are nonnegative"),
        radius_cap: cap,
        empty_points,
    }
}

/// `MQ f` at a single point.
pub fn mq_at(f: &GridFunction, x: usize, cap: Option<f64>) -> Result<f64> {
    let grid = f.grid();
    grid.check_index(x)?;
    let v = f.values();
    let j_max = ladder_j_max(grid, cap);
    let stencil = Stencil::new(grid, j_max * j_max);
    Ok(ladder_sup(grid, &stencil, x, j_max, None, |z, k| (v[z] - v[x]).abs() / stencil.dist[k]).unwrap_or(0.0))
}

/// Ratio `|B(x,r)| / |B(x,r) ∩ B(y,r)|` for `|x - y| = r`.
pub fn lens_constant(dim: usize) -> Result<f64> {
    match dim {
        1 => Ok(2.0),
        2 => {
            let pi = std::f64::consts::PI;
            Ok(pi / (2.0 * pi / 3.0 - 3f64.sqrt() / 2.0))
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Lattice ball count over lattice lens count for the pair `x = 0`,
/// `y = (R, 0)`; tends to `lens_constant(dim)` as `R` grows.
pub fn lattice_count_ratio(dim: usize, radius_units: i64) -> Result<f64> {
    if dim != 1 && dim != 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if radius_units < 2 {
        return Err(Error::InvalidParameter("lattice radius must be at least 2".into()));
    }
    let d = radius_units * radius_units;
    Ok(lattice_ball_count(dim, d) as f64 / lattice_lens_count(dim, [radius_units, 0]) as f64)
}

/// Options for [`verify_pointwise_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseOptions {
    pub constant: f64,
    /// Tolerance multiplier `κ`; 0 disables the tolerance.
    pub kappa: f64,
    pub sampling: PairSampling,
    /// Only pairs whose balls `B(x, |x-y|)`, `B(y, |x-y|)` fit in the domain.
    pub interior: bool,
}

impl PointwiseOptions {
    pub fn new(constant: f64) -> Self {
        PointwiseOptions { constant, kappa: DEFAULT_KAPPA, sampling: PairSampling::default(), interior: false }
    }
}

/// `|f(x) - f(y)| <= c |x - y| (g(x) + g(y))` over all (or sampled) pairs.
pub fn verify_pointwise(f: &GridFunction, g: &ScalarField, c: f64, pair_budget: u64) -> Result<InequalityReport> {
    let mut opts = PointwiseOptions::new(c);
    opts.sampling.budget = pair_budget;
    verify_pointwise_with(f, g, &opts)
}

pub fn verify_pointwise_with(f: &GridFunction, g: &ScalarField, opts: &PointwiseOptions) -> Result<InequalityReport> {
    let grid = f.grid();
    if grid != g.grid() {
        return Err(Error::GridMismatch);
    }
    if !(opts.constant > 0.0) {
        return Err(Error::InvalidParameter(format!("constant must be positive, got {}", opts.constant)));
    }
    let v = f.values();
    let gv = g.values();
    let h = grid.h();
    let c = opts.constant;
    let points: Vec<usize> = (0..grid.len()).collect();
    let scan = scan_pairs(
        &points,
        opts.sampling,
        |x, y| grid.distance(x, y),
        grid.diameter(),
        |x, y| {
            let d2 = grid.dist2_units(x, y);
            if opts.interior && !(grid.ball_fits(x, d2) && grid.ball_fits(y, d2)) {
                return Outcome::Skip(SKIP_MARGIN);
            }
            let dist = crate::grid::units_to_distance(d2, h);
            let num = (v[x] - v[y]).abs();
            let den = dist * (gv[x] + gv[y]);
            pair_outcome(num, den, c, opts.kappa * h / dist)
        },
    );
    let mut rep = InequalityReport::from_scan("pointwise", |i| grid.point(i), c, scan);
    rep.detail("kappa", opts.kappa);
    rep.detail("interior_only", opts.interior);
    rep.detail("g_label", g.label());
    Ok(rep)
}

#[inline]
pub(crate) fn pair_outcome(num: f64, den: f64, c: f64, tol: f64) -> Outcome {
    if den == 0.0 {
        if num == 0.0 {
            Outcome::Skip(SKIP_ZERO)
        } else {
            Outcome::Hard
        }
    } else {
        let ratio = num / den;
        Outcome::Value { score: ratio / (c * (1.0 + tol)), ratio, tol }
    }
}

/// Options for [`lens_chain_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainOptions {
    pub interior_only: bool,
    pub sampling: PairSampling,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { interior_only: true, sampling: PairSampling::default() }
    }
}

/// The averaged triangle inequality over the lens, with the count ratios of
/// the actual point sets:
/// `|f(x)-f(y)|/|x-y| <= (#B_x/#Σ) M_rQf(x) + (#B_y/#Σ) M_rQf(y)`,
/// `r = |x - y|`. Checked with tolerance 0.
pub fn lens_chain_check(f: &GridFunction, opts: &ChainOptions) -> Result<InequalityReport> {
    let grid = f.grid();
    let v = f.values();
    let h = grid.h();
    let dim = grid.dim();
    let margin = |x: usize| -> i64 {
        let mi = grid.multi_index(x);
        (0..dim).map(|a| (mi[a] as i64).min(grid.counts()[a] as i64 - 1 - mi[a] as i64)).min().unwrap()
    };
    let bound = if opts.interior_only {
        let m = (0..grid.len()).map(margin).max().unwrap_or(0);
        m * m + 1
    } else {
        grid.max_dist2_units() + 1
    };
    let stencil = Stencil::new(grid, bound);
    let profiles: Vec<BallProfile> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let levels = if opts.interior_only {
                let m = margin(x);
                stencil.levels_below(m * m + 1)
            } else {
                stencil.levels.len()
            };
            BallProfile::build(grid, &stencil, x, levels, |z, k| (v[z] - v[x]).abs() / stencil.dist[k])
        })
        .collect();
    // Lens counts of interior pairs depend only on the offset up to lattice
    // symmetry.
    let reach = isqrt_floor(bound - 1).max(0) as usize;
    let lattice: Vec<u64> = if opts.interior_only {
        (0..(reach + 1) * (reach + 1))
            .into_par_iter()
            .map(|i| {
                let (a, b) = ((i / (reach + 1)) as i64, (i % (reach + 1)) as i64);
                if b > a || (dim == 1 && b > 0) || a * a + b * b >= bound {
                    0
                } else {
                    lattice_lens_count(dim, [a, b])
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let points: Vec<usize> = (0..grid.len()).collect();
    let scan = scan_pairs(
        &points,
        opts.sampling,
        |x, y| grid.distance(x, y),
        grid.diameter(),
        |x, y| {
            let d2 = grid.dist2_units(x, y);
            let o = grid.offset_units(x, y);
            let interior = grid.ball_fits(x, d2) && grid.ball_fits(y, d2);
            if opts.interior_only && !interior {
                return Outcome::Skip(SKIP_MARGIN);
            }
            let n_lens = if interior && opts.interior_only {
                let (a, b) = (o[0].abs().max(o[1].abs()), o[0].abs().min(o[1].abs()));
                lattice[a as usize * (reach + 1) + b as usize]
            } else {
                lens_count(grid, grid.multi_index(x), o)
            };
            if n_lens == 0 {
                return Outcome::Skip(SKIP_EMPTY_LENS);
            }
            let (sx, nx) = profiles[x].below(&stencil, d2).expect("profile covers interior radii");
            let (sy, ny) = profiles[y].below(&stencil, d2).expect("profile covers interior radii");
            let dist = crate::grid::units_to_distance(d2, h);
            let lhs = (v[x] - v[y]).abs() / dist;
            let nl = n_lens as f64;
            let rhs = (nx as f64 / nl) * (sx / nx as f64) + (ny as f64 / nl) * (sy / ny as f64);
            pair_outcome(lhs, rhs, 1.0, 0.0)
        },
    );
    let mut rep = InequalityReport::from_scan("lens_chain", |i| grid.point(i), 1.0, scan);
    rep.detail("interior_only", opts.interior_only);
    Ok(rep)
}

/// Outcome of the lattice check for metric gradients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeReport {
    pub g1: InequalityReport,
    pub g2: InequalityReport,
    pub min: InequalityReport,
    pub upward: InequalityReport,
    pub pass: bool,
}

/// Checks whether `min(g1, g2)` and `g1 + |f|` remain admissible for `f`
/// given that `g1` and `g2` are.
pub fn smg_lattice_check(
    f: &GridFunction,
    g1: &ScalarField,
    g2: &ScalarField,
    opts: &PointwiseOptions,
) -> Result<LatticeReport> {
    let r1 = verify_pointwise_with(f, g1, opts)?;
    let r2 = verify_pointwise_with(f, g2, opts)?;
    if !r1.pass || !r2.pass {
        return Err(Error::Precondition(format!(
            "both candidates must pass the pointwise check first (g1: {}, g2: {})",
            r1.pass, r2.pass
        )));
    }
    let min = g1.pointwise_min(g2)?;
    let mut rmin = verify_pointwise_with(f, &min, opts)?;
    rmin.name = "smg_min".into();
    let extra = ScalarField::new(f.grid().clone(), f.values().iter().map(|v| v.abs()).collect(), "abs_f")?;
    let up = g1.pointwise_sum(&extra)?;
    let mut rup = verify_pointwise_with(f, &up, opts)?;
    rup.name = "smg_upward".into();
    let pass = rmin.pass && rup.pass;
    Ok(LatticeReport { g1: r1, g2: r2, min: rmin, upward: rup, pass })
}

/// Supremum over ladder balls of the average of `g` over `B(x,r) \ {x}`.
pub fn punctured_maximal(g: &ScalarField) -> ScalarField {
    let grid = g.grid();
    let v = g.values();
    let j_max = ladder_j_max(grid, None);
    let stencil = Stencil::new(grid, j_max * j_max);
    let values = (0..grid.len())
        .into_par_iter()
        .map(|x| ladder_sup(grid, &stencil, x, j_max, None, |z, _| v[z]).unwrap_or(0.0))
        .collect();
    ScalarField::new(grid.clone(), values, "punctured_maximal").expect("averages of a nonnegative field")
}

/// `MQf <= g + M̂g <= 2 M̂g` for an admissible `g` (constant 1).
///
/// The first inequality is checked with the per-point tolerance `κ h`, since
/// `M̂` averages over the center while the quotient balls exclude it; the
/// same chain with the punctured maximal function is checked exactly.
pub fn verify_minimality(f: &GridFunction, g: &ScalarField, opts: &PointwiseOptions) -> Result<InequalityReport> {
    let grid = f.grid();
    if grid != g.grid() {
        return Err(Error::GridMismatch);
    }
    let mut pre_opts = *opts;
    pre_opts.constant = 1.0;
    let pre = verify_pointwise_with(f, g, &pre_opts)?;
    if !pre.pass {
        return Err(Error::Precondition(format!(
            "candidate `{}` is not an admissible gradient (worst ratio {})",
            g.label(),
            pre.worst_ratio
        )));
    }
    let mq = mq_field(f, None);
    let mg = centered_maximal(&g.to_grid_function());
    let pg = punctured_maximal(g);
    let tol = opts.kappa * grid.h();
    let mut worst = (0.0f64, 0usize);
    let mut violations = 0u64;
    let mut punctured_worst = 0.0f64;
    let mut punctured_violations = 0u64;
    let mut majorization_violations = 0u64;
    for x in 0..grid.len() {
        let q = mq.value(x);
        let bound = g.value(x) + mg.value(x);
        if bound > 0.0 {
            let r = q / bound;
            if r > worst.0 {
                worst = (r, x);
            }
            if r > 1.0 + tol {
                violations += 1;
            }
        } else if q > 0.0 {
            violations += 1;
            worst = (f64::INFINITY, x);
        }
        let pbound = g.value(x) + pg.value(x);
        if q > pbound {
            punctured_violations += 1;
        }
        if pbound > 0.0 {
            punctured_worst = punctured_worst.max(q / pbound);
        }
        if g.value(x) + mg.value(x) > 2.0 * mg.value(x) {
            majorization_violations += 1;
        }
    }
    let mut rep = InequalityReport::pointwise("minimality", 1.0, tol, grid.len() as u64);
    rep.worst_ratio = worst.0;
    rep.worst_pair = vec![grid.point(worst.1)];
    rep.violations = violations + punctured_violations + majorization_violations;
    rep.pass = rep.violations == 0;
    rep.detail("punctured_worst_ratio", punctured_worst);
    rep.detail("punctured_violations", punctured_violations);
    rep.detail("majorization_violations", majorization_violations);
    rep.detail("g_label", g.label());
    Ok(rep)
}

/// `MQf <= M̂(|∇f|) (1 + κ h)` at points at least `margin` cells from the
/// boundary.
pub fn verify_grad_domination(f: &GridFunction, kappa: f64, margin: usize) -> Result<InequalityReport> {
    let grid = f.grid();
    let grad = gradient(f)?.magnitude();
    let mg = centered_maximal(&grad.to_grid_function());
    let mq = mq_field(f, None);
    let tol = kappa * grid.h();
    let mut rep = InequalityReport::pointwise("grad_domination", 1.0, tol, 0);
    let mut worst = (0.0f64, None);
    let mut checked = 0u64;
    for x in (0..grid.len()).filter(|&x| grid.is_interior(x, margin)) {
        checked += 1;
        let (q, b) = (mq.value(x), mg.value(x));
        let r = if b > 0.0 {
            q / b
        } else if q == 0.0 {
            continue;
        } else {
            rep.hard_failures += 1;
            f64::INFINITY
        };
        if r > 1.0 + tol {
            rep.violations += 1;
        }
        if worst.1.is_none() || r > worst.0 {
            worst = (r, Some(x));
        }
    }
    rep.pairs_checked = checked;
    rep.worst_ratio = worst.0;
    rep.worst_pair = worst.1.map(|x| vec![grid.point(x)]).unwrap_or_default();
    rep.pass = rep.violations == 0 && rep.hard_failures == 0;
    rep.detail("margin", margin as u64);
    Ok(rep)
}

/// `(|f(x) - f_B|, r MQf(x))` for the ball `B(x, r)` (grid points with
/// `|z - x| < r`, center included).
pub fn poincare_pointwise(f: &GridFunction, x: usize, r: f64) -> Result<(f64, f64)> {
    let grid = f.grid();
    let ball = ball_indices(grid, x, r)?;
    if ball.is_empty() {
        return Err(Error::EmptyBall { center: x, radius: r });
    }
    let v = f.values();
    let mean = (v[x] + ball.iter().map(|&z| v[z]).sum::<f64>()) / (ball.len() + 1) as f64;
    Ok(((v[x] - mean).abs(), r * mq_at(f, x, None)?))
}

/// `|f(x) - f_B| <= r MQf(x)` at every grid point, `B = B(x, r)` with its
/// center. The only slack is the rounding of the ball mean.
pub fn poincare_check(f: &GridFunction, r: f64) -> Result<InequalityReport> {
    let grid = f.grid();
    let v = f.values();
    let mq = mq_field(f, None);
    let rows: Vec<(usize, f64, f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let ball = ball_indices(grid, x, r)?;
            let mean = (v[x] + ball.iter().map(|&z| v[z]).sum::<f64>()) / (ball.len() + 1) as f64;
            let top = ball.iter().fold(v[x].abs(), |m, &z| m.max(v[z].abs()));
            let slack = (ball.len() + 3) as f64 * f64::EPSILON * top;
            Ok((x, (v[x] - mean).abs(), r * mq.value(x), slack))
        })
        .collect::<Result<_>>()?;
    let mut rep = InequalityReport::pointwise("poincare_pointwise", 1.0, 0.0, grid.len() as u64);
    let mut worst: Option<(f64, usize)> = None;
    for &(x, lhs, rhs, slack) in &rows {
        if lhs > rhs + slack {
            if rhs == 0.0 {
                rep.hard_failures += 1;
            } else {
                rep.violations += 1;
            }
        }
        if rhs > 0.0 && worst.map_or(true, |(w, _)| lhs / rhs > w) {
            worst = Some((lhs / rhs, x));
        }
    }
    if let Some((w, x)) = worst {
        rep.worst_ratio = w;
        rep.worst_pair = vec![grid.point(x)];
    }
    rep.pass = rep.violations == 0 && rep.hard_failures == 0;
    rep.detail("radius", r);
    Ok(rep)
}

/// Empirical Poincaré constant on the whole box:
/// `(avg |f - f_Σ|^p)^(1/p) / (diam Σ (avg |∇f|^p)^(1/p))`.
pub fn poincare_integral(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let grid = f.grid();
    let v = f.values();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let num = (v.iter().map(|t| (t - mean).abs().powf(p)).sum::<f64>() / n).powf(1.0 / p);
    let grad = gradient(f)?.magnitude();
    let den = (grad.values().iter().map(|t| t.powf(p)).sum::<f64>() / n).powf(1.0 / p) * grid.diameter();
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// `|f(y) - f(x)| <= |y - x|^(1 - 1/p) ‖f'‖_p` over all pairs, with
/// `‖f'‖_p^p = h Σ |f'|^p` and per-pair tolerance `κ h / |x - y|`.
pub fn holder_check(f: &GridFunction, p: f64, opts: &PointwiseOptions) -> Result<InequalityReport> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p must be > 1, got {p}")));
    }
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let grad = gradient(f)?;
    let norm = if p.is_infinite() {
        grad.component(0).iter().fold(0.0f64, |m, d| m.max(d.abs()))
    } else {
        (grid.h() * grad.component(0).iter().map(|d| d.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    };
    let alpha = 1.0 - 1.0 / p;
    let v = f.values();
    let h = grid.h();
    let points: Vec<usize> = (0..grid.len()).collect();
    let scan = scan_pairs(
        &points,
        opts.sampling,
        |x, y| grid.distance(x, y),
        grid.diameter(),
        |x, y| {
            let dist = grid.distance(x, y);
            pair_outcome((v[x] - v[y]).abs(), dist.powf(alpha) * norm, 1.0, opts.kappa * h / dist)
        },
    );
    let mut rep = InequalityReport::from_scan("holder", |i| grid.point(i), 1.0, scan);
    rep.detail("p", p);
    rep.detail("gradient_norm", norm);
    Ok(rep)
}
