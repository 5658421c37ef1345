//! Hardy–Littlewood maximal operators on grid functions.
//!
//! In 1D every operator reduces to averages of `|f|` over runs of
//! consecutive grid points, computed from one prefix-sum table, so the
//! centered, uncentered and one-sided fields are mutually comparable without
//! rounding slack.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{values_to_csv, Grid, GridFunction};
use crate::stencil::{ladder_j_max, ladder_sup, Stencil};

/// Nonnegative values on a grid, tagged with the operator that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    label: String,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "field value {} at point {i} is not a finite nonnegative number",
                values[i]
            )));
        }
        Ok(ScalarField { grid, values, label: label.into() })
    }

    /// Constant field.
    pub fn constant(grid: &Grid, value: f64, label: impl Into<String>) -> Result<Self> {
        ScalarField::new(grid.clone(), vec![value; grid.len()], label)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        ScalarField::new(
            self.grid.clone(),
            self.values.iter().map(|v| v * c).collect(),
            format!("{}*{c}", self.label),
        )
    }

    pub fn pointwise_min(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, f64::min, "min")
    }

    pub fn pointwise_sum(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, |a, b| a + b, "sum")
    }

    fn zip(&self, other: &ScalarField, op: impl Fn(f64, f64) -> f64, name: &str) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        ScalarField::new(self.grid.clone(), values, format!("{name}({},{})", self.label, other.label))
    }

    /// The field viewed as a grid function.
    pub fn to_grid_function(&self) -> GridFunction {
        GridFunction::new(self.grid.clone(), self.values.clone()).expect("field values are finite")
    }

    pub fn to_csv(&self) -> String {
        values_to_csv(&self.grid, &self.values, Some(&self.label))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Prefix sums of `|f|` in index order.
fn abs_prefix(values: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(values.len() + 1);
    p.push(0.0);
    let mut acc = 0.0;
    for v in values {
        acc += v.abs();
        p.push(acc);
    }
    p
}

/// Average of `|f|` over indices `a..=b`; exact `|f(a)|` for a single point.
#[inline]
fn interval_avg(values: &[f64], prefix: &[f64], a: usize, b: usize) -> f64 {
    if a == b {
        values[a].abs()
    } else {
        (prefix[b + 1] - prefix[a]) / (b - a + 1) as f64
    }
}

fn fmax(a: f64, b: f64) -> f64 {
    if b > a {
        b
    } else {
        a
    }
}

/// Centered maximal function `sup_r avg_{B(x,r)} |f|` over the radius ladder,
/// center included, balls clipped to the domain.
pub fn centered_maximal(f: &GridFunction) -> ScalarField {
    centered_maximal_capped(f, None)
}

/// Centered maximal function restricted to radii `r <= cap`.
pub fn centered_maximal_capped(f: &GridFunction, cap: Option<f64>) -> ScalarField {
    let grid = f.grid();
    let v = f.values();
    let j_max = ladder_j_max(grid, cap);
    let values: Vec<f64> = if grid.dim() == 1 {
        let p = abs_prefix(v);
        let n = v.len();
        (0..n)
            .into_par_iter()
            .map(|x| {
                let mut best = v[x].abs();
                for j in 2..=j_max {
                    let k = (j - 1) as usize;
                    let a = x.saturating_sub(k);
                    let b = (x + k).min(n - 1);
                    best = fmax(best, interval_avg(v, &p, a, b));
                    if a == 0 && b == n - 1 {
                        break;
                    }
                }
                best
            })
            .collect()
    } else {
        let stencil = Stencil::new(grid, j_max * j_max);
        (0..grid.len())
            .into_par_iter()
            .map(|x| {
                ladder_sup(grid, &stencil, x, j_max, Some(v[x].abs()), |z, _| v[z].abs())
                    .unwrap_or(v[x].abs())
            })
            .collect()
    };
    ScalarField::new(grid.clone(), values, "centered_maximal").expect("averages of |f| are nonnegative")
}

/// Uncentered maximal function in 1D: the largest average of `|f|` over runs
/// of grid points `a..=b` containing `x`.
pub fn uncentered_maximal(f: &GridFunction) -> Result<ScalarField> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let v = f.values();
    let n = v.len();
    let p = abs_prefix(v);
    // For each left end a, suffix maxima over right ends give the best run
    // starting at a that reaches each x >= a. Left ends are split into
    // blocks so the reduction below is independent of the thread count.
    let block = 256usize;
    let partials: Vec<Vec<f64>> = (0..n.div_ceil(block))
        .into_par_iter()
        .map(|bi| {
            let lo = bi * block;
            let hi = ((bi + 1) * block).min(n);
            let mut best = vec![0.0f64; n];
            let mut suffix = vec![0.0f64; n];
            for a in lo..hi {
                let mut run = 0.0f64;
                for b in (a..n).rev() {
                    run = fmax(run, interval_avg(v, &p, a, b));
                    suffix[b] = run;
                }
                for x in a..n {
                    best[x] = fmax(best[x], suffix[x]);
                }
            }
            best
        })
        .collect();
    let mut values = vec![0.0f64; n];
    for part in &partials {
        for (o, &b) in values.iter_mut().zip(part) {
            *o = fmax(*o, b);
        }
    }
    ScalarField::new(grid.clone(), values, "uncentered_maximal")
}

/// One-sided maximal function in 1D over windows `[x, x + k h]` (right) or
/// `[x - k h, x]` (left), `k = 0, 1, ...`, clipped to the domain.
pub fn one_sided_maximal(f: &GridFunction, side: Side) -> Result<ScalarField> {
    one_sided_maximal_capped(f, side, None)
}

pub fn one_sided_maximal_capped(f: &GridFunction, side: Side, cap: Option<f64>) -> Result<ScalarField> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let v = f.values();
    let n = v.len();
    let p = abs_prefix(v);
    let k_max = ladder_j_max(grid, cap).max(0) as usize;
    let values = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = v[x].abs();
            let reach = match side {
                Side::Right => (n - 1 - x).min(k_max),
                Side::Left => x.min(k_max),
            };
            for k in 1..=reach {
                let (a, b) = match side {
                    Side::Right => (x, x + k),
                    Side::Left => (x - k, x),
                };
                best = fmax(best, interval_avg(v, &p, a, b));
            }
            best
        })
        .collect();
    let label = match side {
        Side::Left => "left_maximal",
        Side::Right => "right_maximal",
    };
    ScalarField::new(grid.clone(), values, label)
}

/// Outcome of the comparison `M̂f <= Mf <= 2^n M̂f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub name: String,
    pub points: usize,
    /// Largest `M̂f / Mf` (must not exceed 1).
    pub worst_lower_ratio: f64,
    pub worst_lower_point: Vec<f64>,
    /// Largest `Mf / M̂f` (must not exceed `2^n`).
    pub worst_upper_ratio: f64,
    pub worst_upper_point: Vec<f64>,
    pub upper_constant: f64,
    pub lower_violations: usize,
    pub upper_violations: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks both sides of the sandwich exactly at every grid point.
pub fn sandwich_check(f: &GridFunction) -> Result<SandwichReport> {
    let grid = f.grid();
    let centered = centered_maximal(f);
    let uncentered = uncentered_maximal(f)?;
    let bound = 2f64.powi(grid.dim() as i32);
    let mut lower = (0.0f64, 0usize);
    let mut upper = (0.0f64, 0usize);
    let mut lower_violations = 0;
    let mut upper_violations = 0;
    for x in 0..grid.len() {
        let c = centered.value(x);
        let u = uncentered.value(x);
        if c > u {
            lower_violations += 1;
        }
        if u > bound * c {
            upper_violations += 1;
        }
        if u > 0.0 && c / u > lower.0 {
            lower = (c / u, x);
        }
        if c > 0.0 && u / c > upper.0 {
            upper = (u / c, x);
        }
    }
    Ok(SandwichReport {
        name: "maximal_sandwich".into(),
        points: grid.len(),
        worst_lower_ratio: lower.0,
        worst_lower_point: grid.point(lower.1),
        worst_upper_ratio: upper.0,
        worst_upper_point: grid.point(upper.1),
        upper_constant: bound,
        lower_violations,
        upper_violations,
        tolerance: 0.0,
        pass: lower_violations == 0 && upper_violations == 0,
    })
}
