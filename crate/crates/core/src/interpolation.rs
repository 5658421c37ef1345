//! Newton–Lagrange interpolation on simple ordered nodes: divided
//! differences, Newton form, remainders, finite differences, the
//! coalescing-node limit, and the divided-difference pointwise inequalities.

use std::ops::{Add, Div, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ddouble::DoubleDouble;
use crate::error::{Error, Result};
use crate::grid::{sample, Grid, GridFunction, TestFunction};
use crate::jets::{jet_from_function, mq_m_field};
use crate::maximal::ScalarField;
use crate::meanquotient::{pair_outcome, InequalityReport, PointwiseOptions};
use crate::pairs::{scan_pairs, Outcome, SKIP_OTHER};

/// Strictly increasing interpolation nodes `x_0 < ... < x_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationScheme {
    nodes: Vec<f64>,
}

impl InterpolationScheme {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("a scheme needs at least one node".into()));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("nodes must be finite".into()));
        }
        if let Some(w) = nodes.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(format!(
                "nodes must be strictly increasing ({} followed by {})",
                w[0], w[1]
            )));
        }
        Ok(InterpolationScheme { nodes })
    }

    /// Nodes `x, x + h, ..., x + (count - 1) h`.
    pub fn equidistant(x: f64, h: f64, count: usize) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
        }
        InterpolationScheme::new((0..count).map(|i| x + i as f64 * h).collect())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Degree `n` of the interpolating polynomial.
    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Newton basis polynomial `q_k(t) = prod_{i<k} (t - x_i)`.
    pub fn q(&self, k: usize, t: f64) -> f64 {
        self.nodes[..k.min(self.nodes.len())].iter().map(|x| t - x).product()
    }
}

/// A real function of one variable that the interpolation routines can
/// sample, optionally in double-double precision and with known
/// derivatives.
pub trait Evaluable {
    fn eval(&self, x: f64) -> f64;

    fn eval_extended(&self, _x: DoubleDouble) -> Option<DoubleDouble> {
        None
    }

    fn derivative(&self, _order: usize, _x: f64) -> Option<f64> {
        None
    }
}

impl Evaluable for TestFunction {
    fn eval(&self, x: f64) -> f64 {
        self.value(&[x])
    }

    fn eval_extended(&self, x: DoubleDouble) -> Option<DoubleDouble> {
        self.value_extended(x)
    }

    fn derivative(&self, order: usize, x: f64) -> Option<f64> {
        TestFunction::derivative(self, &[order], &[x]).ok()
    }
}

/// Wraps a closure as an [`Evaluable`] without extended precision.
pub struct FnEval<F: Fn(f64) -> f64>(pub F);

impl<F: Fn(f64) -> f64> Evaluable for FnEval<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Triangular table with `entry(i, k) = f[x_i, ..., x_{i+k}]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DividedDifferenceTable {
    scheme: InterpolationScheme,
    /// `columns[k][i] = f[x_i..x_{i+k}]`.
    columns: Vec<Vec<f64>>,
}

impl DividedDifferenceTable {
    pub fn scheme(&self) -> &InterpolationScheme {
        &self.scheme
    }

    pub fn entry(&self, i: usize, k: usize) -> f64 {
        self.columns[k][i]
    }

    /// Newton coefficients `c_k = f[x_0, ..., x_k]`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c[0]).collect()
    }
}

trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> {}
impl Scalar for f64 {}
impl Scalar for DoubleDouble {}

fn dd_columns<T: Scalar>(nodes: &[T], values: &[T]) -> Vec<Vec<T>> {
    let mut columns = vec![values.to_vec()];
    for k in 1..nodes.len() {
        let prev = &columns[k - 1];
        let col = (0..nodes.len() - k).map(|i| (prev[i + 1] - prev[i]) / (nodes[i + k] - nodes[i])).collect();
        columns.push(col);
    }
    columns
}

fn top_dd<T: Scalar>(nodes: &[T], values: &[T]) -> T {
    let mut col = values.to_vec();
    for k in 1..nodes.len() {
        for i in 0..nodes.len() - k {
            col[i] = (col[i + 1] - col[i]) / (nodes[i + k] - nodes[i]);
        }
    }
    col[0]
}

/// Divided-difference table of `values` on the scheme.
pub fn divided_differences(scheme: &InterpolationScheme, values: &[f64]) -> Result<DividedDifferenceTable> {
    let nodes = scheme.nodes();
    if values.len() != nodes.len() {
        return Err(Error::LengthMismatch { expected: nodes.len(), got: values.len() });
    }
    for w in nodes.windows(2) {
        if w[1] - w[0] < 1e3 * f64::EPSILON * w[0].abs().max(w[1].abs()) {
            return Err(Error::InvalidParameter(format!(
                "nodes {} and {} are too close for a stable divided difference",
                w[0], w[1]
            )));
        }
    }
    Ok(DividedDifferenceTable { scheme: scheme.clone(), columns: dd_columns(nodes, values) })
}

/// Horner evaluation of the Newton form `sum_i c_i q_i(t)`.
pub fn newton_eval(table: &DividedDifferenceTable, t: f64) -> f64 {
    let c = table.coefficients();
    let x = table.scheme.nodes();
    let mut p = c[c.len() - 1];
    for k in (0..c.len() - 1).rev() {
        p = p * (t - x[k]) + c[k];
    }
    p
}

/// `f(t) - p_n(t)` and its divided-difference form
/// `f[x_0, ..., x_n, t] q_{n+1}(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderReport {
    pub t: f64,
    pub remainder: f64,
    pub divided_form: f64,
    /// `|remainder - divided_form| / max(|remainder|, |divided_form|, 1e-12 * scale)`,
    /// `scale` the largest `|f|` on the nodes and `t`.
    pub relative_difference: f64,
    pub extended_precision: bool,
    pub pass: bool,
}

/// Interpolation remainder at `t`, cross-checked against the extended
/// divided difference (agreement within `1e-10` relative).
pub fn remainder(f: &dyn Evaluable, scheme: &InterpolationScheme, t: f64) -> Result<RemainderReport> {
    let nodes = scheme.nodes();
    if nodes.contains(&t) {
        return Ok(RemainderReport {
            t,
            remainder: 0.0,
            divided_form: 0.0,
            relative_difference: 0.0,
            extended_precision: false,
            pass: true,
        });
    }
    let values: Vec<f64> = nodes.iter().map(|&x| f.eval(x)).collect();
    let ft = f.eval(t);
    let scale = values.iter().fold(ft.abs(), |m, v| m.max(v.abs()));
    let ext: Option<Vec<DoubleDouble>> = nodes.iter().map(|&x| f.eval_extended(DoubleDouble::from(x))).collect();
    let ext_t = f.eval_extended(DoubleDouble::from(t));
    let (rem, divided, extended) = match (ext, ext_t) {
        (Some(vals), Some(vt)) => {
            let xs: Vec<DoubleDouble> = nodes.iter().map(|&x| DoubleDouble::from(x)).collect();
            let cols = dd_columns(&xs, &vals);
            let tt = DoubleDouble::from(t);
            let mut p = cols[cols.len() - 1][0];
            for k in (0..cols.len() - 1).rev() {
                p = p * (tt - xs[k]) + cols[k][0];
            }
            let rem = vt - p;
            let mut all = xs.clone();
            all.push(tt);
            let mut all_v = vals.clone();
            all_v.push(vt);
            let lead = top_dd(&all, &all_v);
            let q = xs.iter().fold(DoubleDouble::ONE, |acc, &x| acc * (tt - x));
            (rem.to_f64(), (lead * q).to_f64(), true)
        }
        _ => {
            let table = divided_differences(scheme, &values)?;
            let rem = ft - newton_eval(&table, t);
            let mut all = nodes.to_vec();
            all.push(t);
            let mut all_v = values.clone();
            all_v.push(ft);
            let lead = top_dd(&all, &all_v);
            (rem, lead * scheme.q(nodes.len(), t), false)
        }
    };
    let denom = rem.abs().max(divided.abs()).max(1e-12 * scale);
    let rel = if denom == 0.0 { 0.0 } else { (rem - divided).abs() / denom };
    Ok(RemainderReport {
        t,
        remainder: rem,
        divided_form: divided,
        relative_difference: rel,
        extended_precision: extended,
        pass: rel <= 1e-10,
    })
}

fn binomial(m: usize, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, k| acc * (m - k) as f64 / (k + 1) as f64).round()
}

/// `Δ^m f = sum_i (-1)^(m-i) C(m,i) f(x + i h)`.
pub fn finite_difference(f: &dyn Evaluable, x: f64, h: f64, m: usize) -> Result<f64> {
    if !(h > 0.0) || m == 0 {
        return Err(Error::InvalidParameter(format!("need h > 0 and m >= 1, got h={h}, m={m}")));
    }
    Ok((0..=m)
        .map(|i| {
            let sign = if (m - i) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(m, i) * f.eval(x + i as f64 * h)
        })
        .sum())
}

fn finite_difference_extended(f: &dyn Evaluable, x: f64, h: f64, m: usize) -> Option<DoubleDouble> {
    let mut acc = DoubleDouble::ZERO;
    for i in 0..=m {
        let node = DoubleDouble::from(x) + DoubleDouble::from(i as f64) * DoubleDouble::from(h);
        let term = f.eval_extended(node)? * DoubleDouble::from(binomial(m, i));
        acc = if (m - i) % 2 == 0 { acc + term } else { acc - term };
    }
    Some(acc)
}

/// Comparison of the equidistant remainder with the finite difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquidistantReport {
    pub x: f64,
    pub h: f64,
    pub m: usize,
    pub remainder: f64,
    pub finite_difference: f64,
    /// `remainder / finite_difference` (1 when both vanish).
    pub factor: f64,
    pub relative_difference: f64,
    pub pass: bool,
}

/// `R^{m-1} f(x + m h, x)` on nodes `x, ..., x + (m-1) h` against `Δ^m f`.
pub fn equidistant_identity_check(f: &dyn Evaluable, x: f64, h: f64, m: usize) -> Result<EquidistantReport> {
    if m == 0 || !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("need h > 0 and m >= 1, got h={h}, m={m}")));
    }
    let scale = (0..=m).fold(0.0f64, |acc, i| acc.max(f.eval(x + i as f64 * h).abs()));
    let ext_nodes: Vec<DoubleDouble> =
        (0..m).map(|i| DoubleDouble::from(x) + DoubleDouble::from(i as f64) * DoubleDouble::from(h)).collect();
    let t = DoubleDouble::from(x) + DoubleDouble::from(m as f64) * DoubleDouble::from(h);
    let ext_vals: Option<Vec<DoubleDouble>> = ext_nodes.iter().map(|&n| f.eval_extended(n)).collect();
    let (rem, fd) = match (ext_vals, f.eval_extended(t), finite_difference_extended(f, x, h, m)) {
        (Some(vals), Some(vt), Some(fd)) => {
            let cols = dd_columns(&ext_nodes, &vals);
            let mut p = cols[m - 1][0];
            for k in (0..m - 1).rev() {
                p = p * (t - ext_nodes[k]) + cols[k][0];
            }
            ((vt - p).to_f64(), fd.to_f64())
        }
        _ => {
            let scheme = InterpolationScheme::equidistant(x, h, m)?;
            let rep = remainder(f, &scheme, x + m as f64 * h)?;
            (rep.remainder, finite_difference(f, x, h, m)?)
        }
    };
    let denom = rem.abs().max(fd.abs()).max(1e-12 * scale);
    let rel = if denom == 0.0 { 0.0 } else { (rem - fd).abs() / denom };
    let factor = if fd != 0.0 { rem / fd } else if rem == 0.0 { 1.0 } else { f64::INFINITY };
    Ok(EquidistantReport { x, h, m, remainder: rem, finite_difference: fd, factor, relative_difference: rel, pass: rel <= 1e-10 })
}

/// Empirical `R^{m-1} / Δ^m` on the monomial `t^m` at `x`, step `h`.
pub fn normalization_factor(m: usize, x: f64, h: f64) -> Result<f64> {
    let mono = TestFunction::Polynomial { coeffs: (0..=m).map(|i| if i == m { 1.0 } else { 0.0 }).collect() };
    Ok(equidistant_identity_check(&mono, x, h, m)?.factor)
}

/// Errors of `f[x, x + ε/m, ..., x + ε]` against `f^(m)(x)/m!` along
/// `ε = 2^-j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub x: f64,
    pub m: usize,
    pub target: f64,
    pub spreads: Vec<f64>,
    pub errors: Vec<f64>,
    /// Estimated exponent `p` in `error ~ ε^p` from the last two rungs.
    pub observed_order: f64,
    /// Rounding level per rung; errors below it count as converged.
    pub noise_floor: Vec<f64>,
    pub monotone: bool,
    pub final_error: f64,
    pub bound: f64,
    pub extended_precision: bool,
    pub pass: bool,
}

/// Divided-difference limit ladder with spreads `2^-1, ..., 2^-j_max`.
/// Passes when errors never increase (values below the rounding level of
/// the rung count as converged) and the final error is at most `c_bound * ε_J`.
pub fn dd_limit_check(f: &dyn Evaluable, x: f64, m: usize, j_max: u32, c_bound: f64) -> Result<LimitReport> {
    if m == 0 || j_max == 0 {
        return Err(Error::InvalidParameter("need m >= 1 and at least one rung".into()));
    }
    let deriv = f.derivative(m, x).ok_or(Error::DerivativeUnavailable { order: m, function: "f".into() })?;
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    let target = deriv / fact;
    let extended = f.eval_extended(DoubleDouble::from(x)).is_some();
    let mut spreads = Vec::new();
    let mut errors = Vec::new();
    for j in 1..=j_max {
        let eps = 2f64.powi(-(j as i32));
        let value = if extended {
            let nodes: Vec<DoubleDouble> = (0..=m)
                .map(|i| DoubleDouble::from(x) + DoubleDouble::from(i as f64) * DoubleDouble::from(eps) / DoubleDouble::from(m as f64))
                .collect();
            let vals: Vec<DoubleDouble> = nodes.iter().map(|&n| f.eval_extended(n).expect("checked above")).collect();
            (top_dd(&nodes, &vals) - DoubleDouble::from(target)).to_f64()
        } else {
            let nodes: Vec<f64> = (0..=m).map(|i| x + i as f64 * eps / m as f64).collect();
            let vals: Vec<f64> = nodes.iter().map(|&n| f.eval(n)).collect();
            top_dd(&nodes, &vals) - target
        };
        spreads.push(eps);
        errors.push(value.abs());
    }
    // Rounding level of the divided difference at each rung: the m-th
    // difference of values of size `fmax`, divided by `m! (ε/m)^m`.
    let unit = if extended { 2f64.powi(-104) } else { f64::EPSILON / 2.0 };
    let fact_m: f64 = (1..=m).map(|k| k as f64).product();
    let noise_floor: Vec<f64> = spreads
        .iter()
        .map(|&eps| {
            let fmax = (0..=m).fold(0.0f64, |a, i| a.max(f.eval(x + i as f64 * eps / m as f64).abs()));
            let floor = 4.0 * unit * 2f64.powi(m as i32) * fmax / (fact_m * (eps / m as f64).powi(m as i32));
            floor.max(1e-14 * target.abs())
        })
        .collect();
    let monotone = errors.windows(2).zip(&noise_floor[1..]).all(|(w, &fl)| w[1] <= w[0] || w[1] <= fl);
    let n = errors.len();
    let observed_order = if n >= 2 && errors[n - 1] > 0.0 && errors[n - 2] > 0.0 {
        (errors[n - 2] / errors[n - 1]).log2()
    } else {
        f64::NAN
    };
    let final_error = errors[n - 1];
    let bound = c_bound * spreads[n - 1];
    Ok(LimitReport {
        x,
        m,
        target,
        spreads,
        errors,
        observed_order,
        noise_floor,
        monotone,
        final_error,
        bound,
        extended_precision: extended,
        pass: monotone && final_error <= bound,
    })
}

/// The two divided-difference inequalities on grid pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DividedInequalityReport {
    /// `|Δ^m f(y,x)| <= |y-x|^m (g(x) + g(y))`, equidistant grid nodes.
    pub equidistant: InequalityReport,
    /// `|f[x, x_1, ..., x_{m-1}, y]| <= g(x) + g(y)`, random grid nodes.
    pub random_nodes: InequalityReport,
    pub pass: bool,
}

fn pair_seed(seed: u64, x: usize, y: usize) -> u64 {
    seed ^ (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (y as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
}

/// Draws `k` distinct indices strictly between `x` and `y` (`y - x > k`).
fn interior_nodes(rng: &mut ChaCha8Rng, x: usize, y: usize, k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(k);
    while out.len() < k {
        let c = rng.random_range(x + 1..y);
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out.sort_unstable();
    out
}

/// Checks both divided-difference inequalities over grid pairs; per-pair
/// tolerance `κ h / |x - y|`.
pub fn verify_divided_inequality(
    f: &GridFunction,
    m: usize,
    g: &ScalarField,
    opts: &PointwiseOptions,
) -> Result<DividedInequalityReport> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    if grid != g.grid() {
        return Err(Error::GridMismatch);
    }
    if m == 0 || grid.len() < m + 1 {
        return Err(Error::InvalidParameter(format!("order {m} needs at least {} grid points", m + 1)));
    }
    let v = f.values();
    let gv = g.values();
    let h = grid.h();
    let points: Vec<usize> = (0..grid.len()).collect();
    let coords: Vec<f64> = (0..grid.len()).map(|i| grid.coord(i)[0]).collect();
    let c = opts.constant;
    let equidistant = scan_pairs(&points, opts.sampling, |x, y| grid.distance(x, y), grid.diameter(), |x, y| {
        let gap = y - x;
        if gap % m != 0 {
            return Outcome::Skip(SKIP_OTHER);
        }
        let s = gap / m;
        let delta: f64 = (0..=m)
            .map(|i| {
                let sign = if (m - i) % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(m, i) * v[x + i * s]
            })
            .sum();
        let dist = grid.distance(x, y);
        pair_outcome(delta.abs(), dist.powi(m as i32) * (gv[x] + gv[y]), c, opts.kappa * h / dist)
    });
    let seed = opts.sampling.seed;
    let random = scan_pairs(&points, opts.sampling, |x, y| grid.distance(x, y), grid.diameter(), |x, y| {
        if y - x < m {
            return Outcome::Skip(SKIP_OTHER);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(seed, x, y));
        let mut idx = vec![x];
        idx.extend(interior_nodes(&mut rng, x, y, m - 1));
        idx.push(y);
        let nodes: Vec<f64> = idx.iter().map(|&i| coords[i]).collect();
        let vals: Vec<f64> = idx.iter().map(|&i| v[i]).collect();
        let dd = top_dd(&nodes, &vals);
        let dist = grid.distance(x, y);
        pair_outcome(dd.abs(), gv[x] + gv[y], c, opts.kappa * h / dist)
    });
    let mut eq = InequalityReport::from_scan("divided_equidistant", |i| grid.point(i), c, equidistant);
    eq.detail("m", m as u64);
    let mut rn = InequalityReport::from_scan("divided_random_nodes", |i| grid.point(i), c, random);
    rn.detail("m", m as u64);
    let pass = eq.pass && rn.pass;
    Ok(DividedInequalityReport { equidistant: eq, random_nodes: rn, pass })
}

/// Statistics of the scheme-witness versus Taylor–Whitney-witness
/// experiment. Exploratory: no reference value exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub label: String,
    pub m: usize,
    pub samples: usize,
    pub empirical_c: f64,
    pub worst_scheme_nodes: Vec<f64>,
    pub worst_point: Option<f64>,
    /// Points where the Taylor–Whitney witness vanishes.
    pub flagged_points: Vec<f64>,
    pub seed: u64,
}

/// Samples random schemes `x = x_0 < x_1 < ... < x_{m-1} < y` on the grid,
/// charges half of `|R_Z^{m-1} f(y,x)| / |y-x|^m` to each endpoint, and
/// compares the resulting witness with `MQ^m f` from the jet of `f`.
pub fn conjecture_31_experiment(
    tf: &TestFunction,
    grid: &Grid,
    m: usize,
    scheme_samples: usize,
    seed: u64,
) -> Result<ConjectureReport> {
    if m < 2 {
        return Err(Error::InvalidParameter("the experiment needs m >= 2".into()));
    }
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    if !tf.is_smooth() {
        return Err(Error::DerivativeUnavailable { order: m - 1, function: tf.name() });
    }
    let n = grid.len();
    if n < m + 2 {
        return Err(Error::InvalidParameter("grid too coarse for the requested order".into()));
    }
    let f = sample(tf, grid)?;
    let jet = jet_from_function(tf, grid, m - 1)?;
    let g_tw = mq_m_field(&jet, &f, m, None)?;
    let coords: Vec<f64> = (0..n).map(|i| grid.coord(i)[0]).collect();
    let v = f.values();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schemes: Vec<Vec<usize>> = (0..scheme_samples)
        .map(|_| loop {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            let (x, y) = (a.min(b), a.max(b));
            if y - x >= m {
                let mut idx = vec![x];
                idx.extend(interior_nodes(&mut rng, x, y, m - 1));
                idx.push(y);
                break idx;
            }
        })
        .collect();
    let charges: Vec<f64> = schemes
        .par_iter()
        .map(|idx| {
            let nodes: Vec<f64> = idx.iter().map(|&i| coords[i]).collect();
            let vals: Vec<f64> = idx.iter().map(|&i| v[i]).collect();
            let (x, y) = (nodes[0], nodes[m]);
            let q: f64 = nodes[..m].iter().map(|xi| y - xi).product();
            let rem = top_dd(&nodes, &vals) * q;
            0.5 * rem.abs() / (y - x).abs().powi(m as i32)
        })
        .collect();
    let mut g_z = vec![0.0f64; n];
    let mut source = vec![usize::MAX; n];
    for (s, (idx, &charge)) in schemes.iter().zip(&charges).enumerate() {
        for &end in [idx[0], idx[m]].iter() {
            if charge > g_z[end] {
                g_z[end] = charge;
                source[end] = s;
            }
        }
    }
    let mut flagged = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    for x in 0..n {
        let tw = g_tw.value(x);
        if tw == 0.0 {
            flagged.push(coords[x]);
            continue;
        }
        let r = g_z[x] / tw;
        if best.map_or(true, |(b, _)| r > b) {
            best = Some((r, x));
        }
    }
    let (empirical_c, worst_point, worst_nodes) = match best {
        Some((r, x)) => {
            let nodes = if source[x] == usize::MAX {
                Vec::new()
            } else {
                schemes[source[x]].iter().map(|&i| coords[i]).collect()
            };
            (r, Some(coords[x]), nodes)
        }
        None => (1.0, None, Vec::new()),
    };
    Ok(ConjectureReport {
        label: "EXPLORATORY".into(),
        m,
        samples: scheme_samples,
        empirical_c,
        worst_scheme_nodes: worst_nodes,
        worst_point,
        flagged_points: flagged,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mono(k: usize) -> TestFunction {
        TestFunction::Polynomial { coeffs: (0..=k).map(|i| if i == k { 1.0 } else { 0.0 }).collect() }
    }

    #[test]
    fn square_table_by_hand() {
        let s = InterpolationScheme::new(vec![0.0, 1.0, 2.0]).unwrap();
        let t = divided_differences(&s, &[0.0, 1.0, 4.0]).unwrap();
        assert_eq!(t.coefficients(), vec![0.0, 1.0, 1.0]);
        assert_eq!(t.entry(1, 1), 3.0);
        assert_eq!(newton_eval(&t, 1.0), 1.0);
        assert_eq!(newton_eval(&t, 3.0), 9.0);
        let single = divided_differences(&InterpolationScheme::new(vec![0.3]).unwrap(), &[7.0]).unwrap();
        assert_eq!(newton_eval(&single, 100.0), 7.0);
    }

    #[test]
    fn table_errors() {
        let s = InterpolationScheme::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(divided_differences(&s, &[1.0]), Err(Error::LengthMismatch { .. })));
        assert!(InterpolationScheme::new(vec![0.0, 0.0]).is_err());
        assert!(InterpolationScheme::new(vec![]).is_err());
        let close = InterpolationScheme::new(vec![1.0, 1.0 + 4.0 * f64::EPSILON]).unwrap();
        assert!(divided_differences(&close, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn cubic_remainder_example() {
        let s = InterpolationScheme::new(vec![0.0, 1.0, 2.0]).unwrap();
        let r = remainder(&mono(3), &s, 3.0).unwrap();
        assert!((r.remainder - 6.0).abs() < 1e-12);
        assert!((r.divided_form - 6.0).abs() < 1e-12);
        assert!(r.pass);
        assert_eq!(s.q(3, 3.0), 6.0);
        assert_eq!(remainder(&mono(3), &s, 1.0).unwrap().remainder, 0.0);
    }

    #[test]
    fn finite_difference_examples() {
        let sq = mono(2);
        for &x in &[-1.0, 0.0, 0.375] {
            let d = finite_difference(&sq, x, 0.125, 2).unwrap();
            assert_eq!(d, 2.0 * 0.125 * 0.125);
        }
        assert!((finite_difference(&sq, 0.37, 0.1, 2).unwrap() - 0.02).abs() < 1e-15);
        let lin = TestFunction::Polynomial { coeffs: vec![1.0, 2.0] };
        assert_eq!(finite_difference(&lin, 0.5, 0.25, 2).unwrap(), 0.0);
        let f = FnEval(|t: f64| t.exp());
        assert_eq!(finite_difference(&f, 0.2, 0.1, 1).unwrap(), 0.3f64.exp() - 0.2f64.exp());
    }

    #[test]
    fn normalization_is_one() {
        for m in [2usize, 3] {
            for &(x, h) in &[(0.0, 0.5), (-0.3, 0.1), (1.7, 0.25)] {
                let factor = normalization_factor(m, x, h).unwrap();
                assert!((factor - 1.0).abs() < 1e-12, "m={m} factor={factor}");
            }
        }
    }

    #[test]
    fn equidistant_identity_sin() {
        let s = TestFunction::SinComposite { freq: 1.0 };
        let rep = equidistant_identity_check(&s, 0.3, 1e-2, 2).unwrap();
        assert!(rep.pass, "{rep:?}");
        let low = TestFunction::Polynomial { coeffs: vec![1.0, -2.0] };
        let rep = equidistant_identity_check(&low, 0.3, 0.1, 3).unwrap();
        assert!(rep.remainder.abs() < 1e-14 && rep.finite_difference.abs() < 1e-14);
        assert!(rep.pass);
    }

    #[test]
    fn limit_ladder_examples() {
        let e = TestFunction::Exp { rate: 1.0 };
        let rep = dd_limit_check(&e, 0.0, 2, 20, 1.0).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.final_error <= 1e-6);
        assert!((rep.observed_order - 1.0).abs() < 0.05);
        let cube = mono(3);
        let rep = dd_limit_check(&cube, 0.7, 3, 20, 1.0).unwrap();
        assert!(rep.errors.iter().all(|&e| e < 1e-12));
        assert!(rep.pass);
        // In plain f64 the rounding level of the last rungs exceeds the bound.
        let plain = FnEval(|t: f64| t.exp());
        struct WithDeriv<F: Fn(f64) -> f64>(FnEval<F>);
        impl<F: Fn(f64) -> f64> Evaluable for WithDeriv<F> {
            fn eval(&self, x: f64) -> f64 {
                self.0.eval(x)
            }
            fn derivative(&self, _k: usize, x: f64) -> Option<f64> {
                Some(x.exp())
            }
        }
        let rep = dd_limit_check(&WithDeriv(plain), 0.0, 2, 20, 1.0).unwrap();
        assert!(!rep.extended_precision);
        assert!(rep.noise_floor[19] > 1e3 * rep.bound);
    }

    #[test]
    fn divided_inequality_examples() {
        let g = Grid::new(1, &[0.0], &[1.0], 0.0625).unwrap();
        let lin = sample(&TestFunction::Polynomial { coeffs: vec![0.5, 2.0] }, &g).unwrap();
        let zero = ScalarField::constant(&g, 0.0, "zero").unwrap();
        let opts = PointwiseOptions::new(1.0);
        let rep = verify_divided_inequality(&lin, 2, &zero, &opts).unwrap();
        assert!(rep.equidistant.pass);
        let sq = sample(&mono(2), &g).unwrap();
        let one = ScalarField::constant(&g, 1.0, "one").unwrap();
        let rep = verify_divided_inequality(&sq, 2, &one, &opts).unwrap();
        assert!(rep.pass);
        assert!((rep.equidistant.worst_ratio - 0.25).abs() < 1e-9);
        assert!((rep.random_nodes.worst_ratio - 0.5).abs() < 1e-9);
    }

    #[test]
    fn conjecture_polynomial_below_order_is_flagged() {
        // Dyadic nodes and coefficients keep every remainder exactly zero.
        let g = Grid::new(1, &[0.0], &[1.0], 0.0625).unwrap();
        let lin = TestFunction::Polynomial { coeffs: vec![0.5, 2.0] };
        let rep = conjecture_31_experiment(&lin, &g, 2, 200, 0).unwrap();
        assert_eq!(rep.empirical_c, 1.0);
        assert_eq!(rep.flagged_points.len(), g.len());
        let cube = mono(2);
        let rep = conjecture_31_experiment(&cube, &g, 2, 500, 0).unwrap();
        assert!(rep.empirical_c.is_finite() && rep.empirical_c > 0.0);
        assert_eq!(rep.label, "EXPLORATORY");
    }

    fn scheme_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::btree_set(-1000i32..1000, 1..8)
            .prop_map(|s| s.into_iter().map(|k| k as f64 / 500.0).collect())
    }

    proptest! {
        #[test]
        fn permutation_symmetry(nodes in scheme_strategy(), seed in 0u64..1000) {
            let f = TestFunction::SinComposite { freq: 1.3 };
            let vals: Vec<f64> = nodes.iter().map(|&x| f.eval(x)).collect();
            let a = top_dd(&nodes, &vals);
            let mut perm: Vec<usize> = (0..nodes.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let pn: Vec<f64> = perm.iter().map(|&i| nodes[i]).collect();
            let pv: Vec<f64> = perm.iter().map(|&i| vals[i]).collect();
            let b = top_dd(&pn, &pv);
            // Both tables carry rounding amplified by the node spread.
            let gap = nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            let tol = 1e-12 * (2.0 / gap.max(1e-3)).powi(nodes.len() as i32);
            prop_assert!((a - b).abs() <= tol, "a={a} b={b}");
        }

        #[test]
        fn exactness_and_leading_coefficient(nodes in scheme_strategy(), coeffs in prop::collection::vec(-3.0f64..3.0, 1..6), t in -2.0f64..2.0) {
            prop_assume!(coeffs.len() <= nodes.len());
            let p = TestFunction::Polynomial { coeffs: coeffs.clone() };
            let s = InterpolationScheme::new(nodes.clone()).unwrap();
            let r = remainder(&p, &s, t).unwrap();
            let scale = coeffs.iter().map(|c| c.abs()).sum::<f64>() * 3f64.powi(coeffs.len() as i32);
            prop_assert!(r.remainder.abs() <= 1e-12 * scale);
            if coeffs.len() == nodes.len() {
                let vals: Vec<f64> = nodes.iter().map(|&x| p.eval(x)).collect();
                let t = divided_differences(&s, &vals).unwrap();
                let lead = t.entry(0, nodes.len() - 1);
                prop_assert!((lead - coeffs[coeffs.len() - 1]).abs() <= 1e-6 * scale);
            }
        }

        #[test]
        fn q_majorized_on_enclosed_schemes(nodes in scheme_strategy(), extra in 0.0f64..1.0) {
            let y = nodes[nodes.len() - 1] + extra;
            let s = InterpolationScheme::new(nodes.clone()).unwrap();
            let m = nodes.len();
            prop_assert!(s.q(m, y).abs() <= (y - nodes[0]).abs().powi(m as i32) * (1.0 + 1e-12));
        }

        #[test]
        fn normalized_remainder_is_extended_divided_difference(nodes in scheme_strategy(), t in -2.5f64..2.5) {
            prop_assume!(nodes.iter().all(|&x| (x - t).abs() > 1e-3));
            let f = TestFunction::Exp { rate: 0.7 };
            let s = InterpolationScheme::new(nodes.clone()).unwrap();
            let r = remainder(&f, &s, t).unwrap();
            prop_assert!(r.pass, "{r:?}");
        }
    }
}
