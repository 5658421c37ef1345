//! Uniform grids over boxes in one or two dimensions, sampled functions, the
//! analytic test-function corpus, and the discrete ball and lens geometry
//! every other module builds on.
//!
//! Distances between grid points are computed from integer index offsets:
//! `|x - z| = sqrt(d2) * h` with `d2` the squared offset in index units. Ball
//! and lens membership tests compare integers wherever the radius is itself a
//! grid distance, so they are exact.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ddouble::DoubleDouble;
use crate::error::{Error, Result};
use crate::maximal::ScalarField;

/// Uniform grid with the same spacing `h` on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    origin: Vec<f64>,
    extent: Vec<f64>,
    h: f64,
    counts: Vec<usize>,
}

impl Grid {
    /// Builds a grid with `round(extent[i] / h) + 1` points along axis `i`.
    pub fn new(dim: usize, origin: &[f64], extent: &[f64], h: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if origin.len() != dim || extent.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "origin and extent need {dim} components, got {} and {}",
                origin.len(),
                extent.len()
            )));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        let mut counts = Vec::with_capacity(dim);
        for (axis, &e) in extent.iter().enumerate() {
            if !e.is_finite() || e < h {
                return Err(Error::InvalidGrid(format!(
                    "extent {e} on axis {axis} is smaller than the spacing {h}"
                )));
            }
            counts.push((e / h).round() as usize + 1);
        }
        Ok(Grid { dim, origin: origin.to_vec(), extent: extent.to_vec(), h, counts })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.len() })
        }
    }

    /// Per-axis index of a point; the first axis varies fastest.
    pub fn multi_index(&self, index: usize) -> [usize; 2] {
        match self.dim {
            1 => [index, 0],
            _ => [index % self.counts[0], index / self.counts[0]],
        }
    }

    pub fn linear_index(&self, mi: [usize; 2]) -> usize {
        match self.dim {
            1 => mi[0],
            _ => mi[0] + self.counts[0] * mi[1],
        }
    }

    /// Coordinates `origin + index * h`; the unused axis of a 1D grid is 0.
    pub fn coord(&self, index: usize) -> [f64; 2] {
        let mi = self.multi_index(index);
        let mut c = [0.0; 2];
        for axis in 0..self.dim {
            c[axis] = self.origin[axis] + mi[axis] as f64 * self.h;
        }
        c
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        self.coord(index)[..self.dim].to_vec()
    }

    pub fn offset_units(&self, from: usize, to: usize) -> [i64; 2] {
        let a = self.multi_index(from);
        let b = self.multi_index(to);
        [b[0] as i64 - a[0] as i64, b[1] as i64 - a[1] as i64]
    }

    /// Squared distance in index units.
    pub fn dist2_units(&self, a: usize, b: usize) -> i64 {
        let o = self.offset_units(a, b);
        o[0] * o[0] + o[1] * o[1]
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        units_to_distance(self.dist2_units(a, b), self.h)
    }

    /// The point reached from `index` by an offset in index units, if it lies
    /// on the grid.
    pub fn shift(&self, index: usize, offset: [i64; 2]) -> Option<usize> {
        let mi = self.multi_index(index);
        let mut out = [0usize; 2];
        for axis in 0..self.dim {
            let v = mi[axis] as i64 + offset[axis];
            if v < 0 || v >= self.counts[axis] as i64 {
                return None;
            }
            out[axis] = v as usize;
        }
        if self.dim == 1 && offset[1] != 0 {
            return None;
        }
        Some(self.linear_index(out))
    }

    /// Largest squared index distance between two grid points.
    pub fn max_dist2_units(&self) -> i64 {
        self.counts.iter().map(|&c| ((c - 1) as i64).pow(2)).sum()
    }

    /// Euclidean diameter of the box spanned by the grid points.
    pub fn diameter(&self) -> f64 {
        units_to_distance(self.max_dist2_units(), self.h)
    }

    /// True when the open ball of radius `sqrt(d2) * h` around the point lies
    /// inside the closed box of grid points.
    pub fn ball_fits(&self, index: usize, d2: i64) -> bool {
        let mi = self.multi_index(index);
        (0..self.dim).all(|axis| {
            let lo = mi[axis] as i64;
            let hi = (self.counts[axis] - 1) as i64 - lo;
            lo * lo >= d2 && hi * hi >= d2
        })
    }

    /// Cell measure `h^n` used to turn point counts into areas/lengths.
    pub fn cell_measure(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Number of points with every index at least `margin` away from the
    /// boundary.
    pub fn is_interior(&self, index: usize, margin: usize) -> bool {
        let mi = self.multi_index(index);
        (0..self.dim).all(|axis| mi[axis] >= margin && mi[axis] + margin < self.counts[axis])
    }
}

/// Free-function constructor matching [`Grid::new`].
pub fn make_grid(dim: usize, origin: &[f64], extent: &[f64], h: f64) -> Result<Grid> {
    Grid::new(dim, origin, extent, h)
}

#[inline]
pub(crate) fn units_to_distance(d2: i64, h: f64) -> f64 {
    (d2 as f64).sqrt() * h
}

/// Real values sampled at every point of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("value at point {i} is not finite")));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        GridFunction::new(grid, values)
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

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        GridFunction::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn to_csv(&self) -> String {
        values_to_csv(&self.grid, &self.values, None)
    }
}

pub(crate) fn values_to_csv(grid: &Grid, values: &[f64], label: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(label) = label {
        let _ = writeln!(out, "# label: {label}");
    }
    out.push_str(if grid.dim() == 1 { "index,x,value\n" } else { "index,x,y,value\n" });
    for (i, v) in values.iter().enumerate() {
        let _ = write!(out, "{i}");
        for c in grid.point(i) {
            let _ = write!(out, ",{c:.16e}");
        }
        let _ = writeln!(out, ",{v:.16e}");
    }
    out
}

/// Parses the CSV layout written by [`GridFunction::to_csv`] back onto a
/// known grid. Comment lines starting with `#` are ignored.
pub fn parse_grid_csv(grid: &Grid, text: &str) -> Result<Vec<f64>> {
    let mut values = vec![f64::NAN; grid.len()];
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::InvalidParameter("empty csv".into()))?;
    let columns = header.split(',').count();
    if columns != grid.dim() + 2 {
        return Err(Error::InvalidParameter(format!("unexpected csv header `{header}`")));
    }
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(Error::InvalidParameter(format!("malformed csv row `{line}`")));
        }
        let index: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad index in `{line}`")))?;
        grid.check_index(index)?;
        let value: f64 = fields[columns - 1]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad value in `{line}`")))?;
        values[index] = value;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("csv does not cover every grid point".into()));
    }
    Ok(values)
}

/// Analytic test functions. In 2D, polynomials use graded monomial order
/// `1, x, y, x^2, xy, y^2, ...`; the cusp is radial; Weierstrass and the
/// indicator act per axis (sum and box respectively); the sine and exponential
/// are products over axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Polynomial { coeffs: Vec<f64> },
    HolderCusp { alpha: f64 },
    Weierstrass { a: f64, b: u32, terms: usize },
    SinComposite { freq: f64 },
    Exp { rate: f64 },
    Indicator { lo: Vec<f64>, hi: Vec<f64> },
    /// Piecewise-linear 1D table through `(nodes[i], values[i])`, constant
    /// beyond the end nodes.
    Table { nodes: Vec<f64>, values: Vec<f64> },
}

impl TestFunction {
    /// Weierstrass function with `a = 0.5`, `b = 3` and 30 terms.
    pub fn weierstrass_default() -> Self {
        TestFunction::Weierstrass { a: 0.5, b: 3, terms: 30 }
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::Polynomial { coeffs } => format!("poly:{}", join(coeffs)),
            TestFunction::HolderCusp { alpha } => format!("cusp:{alpha}"),
            TestFunction::Weierstrass { a, b, terms } => format!("weierstrass:{a},{b},{terms}"),
            TestFunction::SinComposite { freq } => format!("sin:{freq}"),
            TestFunction::Exp { rate } => format!("exp:{rate}"),
            TestFunction::Indicator { lo, hi } => {
                let mut parts = Vec::new();
                for (l, h) in lo.iter().zip(hi) {
                    parts.push(*l);
                    parts.push(*h);
                }
                format!("indicator:{}", join(&parts))
            }
            TestFunction::Table { nodes, values } => {
                let mut parts = Vec::new();
                for (x, y) in nodes.iter().zip(values) {
                    parts.push(*x);
                    parts.push(*y);
                }
                format!("table:{}", join(&parts))
            }
        }
    }

    /// Checks parameter constraints for use on a grid of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            TestFunction::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return bad("polynomial needs at least one finite coefficient".into());
                }
            }
            TestFunction::HolderCusp { alpha } => {
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return bad(format!("holder_cusp needs 0 < alpha <= 1, got {alpha}"));
                }
            }
            TestFunction::Weierstrass { a, b, terms } => {
                if !(*a > 0.0 && *a < 1.0) {
                    return bad(format!("weierstrass needs 0 < a < 1, got {a}"));
                }
                if *b < 3 || b % 2 == 0 {
                    return bad(format!("weierstrass needs an odd integer b >= 3, got {b}"));
                }
                if a * (*b as f64) < 1.0 {
                    return bad(format!("weierstrass needs a*b >= 1, got {}", a * *b as f64));
                }
                if *terms == 0 {
                    return bad("weierstrass needs at least one term".into());
                }
            }
            TestFunction::SinComposite { freq } => {
                if !freq.is_finite() {
                    return bad("sine frequency must be finite".into());
                }
            }
            TestFunction::Exp { rate } => {
                if !rate.is_finite() {
                    return bad("exponential rate must be finite".into());
                }
            }
            TestFunction::Indicator { lo, hi } => {
                if lo.len() != dim || hi.len() != dim {
                    return bad(format!("indicator needs {dim} intervals"));
                }
                if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                    return bad("indicator intervals need lo <= hi".into());
                }
            }
            TestFunction::Table { nodes, values } => {
                if dim != 1 {
                    return Err(Error::UnsupportedDimension(dim));
                }
                if nodes.len() != values.len() || nodes.is_empty() {
                    return bad("table needs matching, nonempty node and value lists".into());
                }
                if nodes.windows(2).any(|w| !(w[0] < w[1])) {
                    return bad("table nodes must be strictly increasing".into());
                }
            }
        }
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(())
    }

    /// True for the members of the corpus with analytic derivatives of every
    /// order.
    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            TestFunction::Polynomial { .. } | TestFunction::SinComposite { .. } | TestFunction::Exp { .. }
        )
    }

    /// Value at a point with `p.len()` equal to the dimension (1 or 2).
    pub fn value(&self, p: &[f64]) -> f64 {
        match self {
            TestFunction::Polynomial { coeffs } => {
                if p.len() == 1 {
                    coeffs.iter().rev().fold(0.0, |acc, &c| acc * p[0] + c)
                } else {
                    poly2_derivative(coeffs, [0, 0], p[0], p[1])
                }
            }
            TestFunction::HolderCusp { alpha } => {
                let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                r.powf(*alpha)
            }
            TestFunction::Weierstrass { a, b, terms } => {
                p.iter().map(|&x| weierstrass_1d(*a, *b, *terms, x)).sum()
            }
            TestFunction::SinComposite { freq } => p.iter().map(|&x| (freq * x).sin()).product(),
            TestFunction::Exp { rate } => (rate * p.iter().sum::<f64>()).exp(),
            TestFunction::Indicator { lo, hi } => {
                let inside = p.iter().zip(lo.iter().zip(hi)).all(|(&x, (&l, &h))| x >= l && x <= h);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Table { nodes, values } => table_value(nodes, values, p[0]),
        }
    }

    /// Partial derivative `D^alpha f(p)`, `alpha` given per axis.
    pub fn derivative(&self, alpha: &[usize], p: &[f64]) -> Result<f64> {
        let order: usize = alpha.iter().sum();
        if order == 0 {
            return Ok(self.value(p));
        }
        match self {
            TestFunction::Polynomial { coeffs } => {
                if p.len() == 1 {
                    Ok(poly1_derivative(coeffs, alpha[0], p[0]))
                } else {
                    Ok(poly2_derivative(coeffs, [alpha[0], alpha[1]], p[0], p[1]))
                }
            }
            TestFunction::SinComposite { freq } => Ok(p
                .iter()
                .zip(alpha)
                .map(|(&x, &k)| freq.powi(k as i32) * sin_derivative(k, freq * x))
                .product()),
            TestFunction::Exp { rate } => {
                Ok(rate.powi(order as i32) * (rate * p.iter().sum::<f64>()).exp())
            }
            _ => Err(Error::DerivativeUnavailable { order, function: self.name() }),
        }
    }

    /// 1D value in double-double precision, for the smooth members.
    pub fn value_extended(&self, x: DoubleDouble) -> Option<DoubleDouble> {
        match self {
            TestFunction::Polynomial { coeffs } => Some(
                coeffs
                    .iter()
                    .rev()
                    .fold(DoubleDouble::ZERO, |acc, &c| acc * x + DoubleDouble::from(c)),
            ),
            TestFunction::SinComposite { freq } => Some((DoubleDouble::from(*freq) * x).sin_cos().0),
            TestFunction::Exp { rate } => Some((DoubleDouble::from(*rate) * x).exp()),
            _ => None,
        }
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn weierstrass_1d(a: f64, b: u32, terms: usize, x: f64) -> f64 {
    let mut amp = 1.0;
    let mut freq = 1.0;
    let mut sum = 0.0;
    for _ in 0..terms {
        sum += amp * (freq * std::f64::consts::PI * x).cos();
        amp *= a;
        freq *= b as f64;
    }
    sum
}

fn table_value(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    if x <= nodes[0] {
        return values[0];
    }
    let last = nodes.len() - 1;
    if x >= nodes[last] {
        return values[last];
    }
    let k = nodes.partition_point(|&n| n <= x) - 1;
    let t = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
    values[k] + t * (values[k + 1] - values[k])
}

fn sin_derivative(k: usize, t: f64) -> f64 {
    match k % 4 {
        0 => t.sin(),
        1 => t.cos(),
        2 => -t.sin(),
        _ => -t.cos(),
    }
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

fn poly1_derivative(coeffs: &[f64], k: usize, x: f64) -> f64 {
    if k >= coeffs.len() {
        return 0.0;
    }
    let mut acc = 0.0;
    for n in (k..coeffs.len()).rev() {
        acc = acc * x + coeffs[n] * falling(n, k);
    }
    acc
}

/// Graded monomial exponents `(i, j)` for coefficient slot `s`.
pub(crate) fn graded_exponents(s: usize) -> (usize, usize) {
    let mut degree = 0;
    let mut start = 0;
    while start + degree + 1 <= s {
        start += degree + 1;
        degree += 1;
    }
    let j = s - start;
    (degree - j, j)
}

fn poly2_derivative(coeffs: &[f64], alpha: [usize; 2], x: f64, y: f64) -> f64 {
    let mut sum = 0.0;
    for (s, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let (i, j) = graded_exponents(s);
        if i < alpha[0] || j < alpha[1] {
            continue;
        }
        let factor = falling(i, alpha[0]) * falling(j, alpha[1]);
        sum += c * factor * x.powi((i - alpha[0]) as i32) * y.powi((j - alpha[1]) as i32);
    }
    sum
}

impl FromStr for TestFunction {
    type Err = Error;

    /// Parses `poly:c0,c1,..`, `cusp:alpha`, `weierstrass[:a,b,K]`,
    /// `sin:freq`, `exp:rate`, `indicator:lo,hi[,lo,hi]` and
    /// `table:x0,y0,x1,y1,..`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), a.trim()),
            None => (s.trim(), ""),
        };
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidParameter(format!("bad number `{t}` in `{s}`")))
                })
                .collect::<Result<_>>()?
        };
        let want = |n: usize| -> Result<()> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("`{kind}` takes {n} parameters, got {}", nums.len())))
            }
        };
        let tf = match kind {
            "poly" | "polynomial" => TestFunction::Polynomial { coeffs: nums.clone() },
            "cusp" | "holder_cusp" => {
                want(1)?;
                TestFunction::HolderCusp { alpha: nums[0] }
            }
            "weierstrass" => {
                if nums.is_empty() {
                    TestFunction::weierstrass_default()
                } else {
                    want(3)?;
                    if nums[1].fract() != 0.0 || nums[2].fract() != 0.0 || nums[1] < 0.0 || nums[2] < 0.0 {
                        return Err(Error::InvalidParameter("weierstrass b and K must be integers".into()));
                    }
                    TestFunction::Weierstrass { a: nums[0], b: nums[1] as u32, terms: nums[2] as usize }
                }
            }
            "sin" | "sin_composite" => {
                want(1)?;
                TestFunction::SinComposite { freq: nums[0] }
            }
            "exp" => {
                if nums.is_empty() {
                    TestFunction::Exp { rate: 1.0 }
                } else {
                    want(1)?;
                    TestFunction::Exp { rate: nums[0] }
                }
            }
            "indicator" => {
                if nums.len() != 2 && nums.len() != 4 {
                    return Err(Error::InvalidParameter("indicator takes 2 or 4 parameters".into()));
                }
                let lo = nums.iter().step_by(2).copied().collect();
                let hi = nums.iter().skip(1).step_by(2).copied().collect();
                TestFunction::Indicator { lo, hi }
            }
            "table" => {
                if nums.len() < 2 || nums.len() % 2 != 0 {
                    return Err(Error::InvalidParameter("table takes x,y pairs".into()));
                }
                TestFunction::Table {
                    nodes: nums.iter().step_by(2).copied().collect(),
                    values: nums.iter().skip(1).step_by(2).copied().collect(),
                }
            }
            other => return Err(Error::InvalidParameter(format!("unknown function kind `{other}`"))),
        };
        Ok(tf)
    }
}

/// Samples a test function at every grid point.
pub fn sample(tf: &TestFunction, grid: &Grid) -> Result<GridFunction> {
    tf.validate(grid.dim())?;
    let values = (0..grid.len()).map(|i| tf.value(&grid.point(i))).collect();
    GridFunction::new(grid.clone(), values)
}

/// Grid points `z` with `0 < |z - center| < r`.
pub fn ball_indices(grid: &Grid, center: usize, r: f64) -> Result<Vec<usize>> {
    grid.check_index(center)?;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius must be positive, got {r}")));
    }
    let reach = (r / grid.h()).ceil() as i64;
    let mut out = Vec::new();
    let (ylo, yhi) = if grid.dim() == 2 { (-reach, reach) } else { (0, 0) };
    for dy in ylo..=yhi {
        for dx in -reach..=reach {
            let d2 = dx * dx + dy * dy;
            if d2 == 0 || units_to_distance(d2, grid.h()) >= r {
                continue;
            }
            if let Some(z) = grid.shift(center, [dx, dy]) {
                out.push(z);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// The lens `B(x, r) ∩ B(y, r)` with `r = |x - y|`, as grid points other
/// than `x` and `y`. Membership is decided on integer squared distances.
pub fn lens_indices(grid: &Grid, x: usize, y: usize) -> Result<Vec<usize>> {
    grid.check_index(x)?;
    grid.check_index(y)?;
    if x == y {
        return Err(Error::InvalidParameter("lens needs two distinct points".into()));
    }
    let d2 = grid.dist2_units(x, y);
    let reach = (d2 as f64).sqrt().ceil() as i64;
    let mut out = Vec::new();
    let (ylo, yhi) = if grid.dim() == 2 { (-reach, reach) } else { (0, 0) };
    for dy in ylo..=yhi {
        for dx in -reach..=reach {
            if dx * dx + dy * dy >= d2 {
                continue;
            }
            if let Some(z) = grid.shift(x, [dx, dy]) {
                if z != x && z != y && grid.dist2_units(z, y) < d2 {
                    out.push(z);
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Number of lattice points strictly inside both balls of an offset `(dx, dy)`
/// pair on an unbounded lattice.
#[cfg(test)]
pub(crate) fn lattice_lens_count(offset: [i64; 2]) -> usize {
    let d2 = offset[0] * offset[0] + offset[1] * offset[1];
    let reach = (d2 as f64).sqrt().ceil() as i64;
    let mut count = 0;
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            if dx * dx + dy * dy >= d2 {
                continue;
            }
            let ex = dx - offset[0];
            let ey = dy - offset[1];
            if ex * ex + ey * ey < d2 && (dx, dy) != (0, 0) {
                count += 1;
            }
        }
    }
    count
}

/// Per-axis derivative estimates on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    grid: Grid,
    components: Vec<Vec<f64>>,
}

impl GradientField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.components[axis]
    }

    /// Pointwise Euclidean norm `|∇f|`.
    pub fn magnitude(&self) -> ScalarField {
        let values = (0..self.grid.len())
            .map(|i| self.components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect();
        ScalarField::new(self.grid.clone(), values, "grad_norm").expect("norms are nonnegative")
    }
}

/// Central differences inside, first-order one-sided differences on the
/// boundary.
pub fn gradient(f: &GridFunction) -> Result<GradientField> {
    let grid = f.grid();
    if grid.counts().iter().any(|&c| c < 3) {
        return Err(Error::InvalidGrid("gradient needs at least 3 points per axis".into()));
    }
    let h = grid.h();
    let v = f.values();
    let mut components = Vec::with_capacity(grid.dim());
    for axis in 0..grid.dim() {
        let mut unit = [0i64; 2];
        unit[axis] = 1;
        let back = [-unit[0], -unit[1]];
        let comp = (0..grid.len())
            .map(|i| match (grid.shift(i, back), grid.shift(i, unit)) {
                (Some(l), Some(r)) => (v[r] - v[l]) / (2.0 * h),
                (None, Some(r)) => (v[r] - v[i]) / h,
                (Some(l), None) => (v[i] - v[l]) / h,
                (None, None) => 0.0,
            })
            .collect();
        components.push(comp);
    }
    Ok(GradientField { grid: grid.clone(), components })
}
