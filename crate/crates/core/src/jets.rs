//! Whitney jets on grids, Taylor fields and remainders, the identities of
//! the first-order Taylor algebra, and the higher-order mean quotients
//! `MQ^m`.
//!
//! A jet of order `k` stores one value field per multi-index `α` with
//! `|α| <= k`, in graded order (`1, x, y, x^2, xy, y^2` in 2D). Taylor
//! fields between grid points use the lattice displacement `offset * h`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{graded_exponents, lens_indices, values_to_csv, Grid, GridFunction, TestFunction};
use crate::maximal::ScalarField;
use crate::meanquotient::{pair_outcome, ChainOptions, InequalityReport, MQField};
use crate::pairs::{scan_pairs, Outcome, PairSampling, SKIP_EMPTY_LENS, SKIP_MARGIN, SKIP_ZERO};
use crate::stencil::{ladder_j_max, ladder_sup, BallProfile, Stencil};

/// Whitney `k`-jet sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    grid: Grid,
    order: usize,
    alphas: Vec<[usize; 2]>,
    components: Vec<Vec<f64>>,
}

fn alphas_for(dim: usize, order: usize) -> Vec<[usize; 2]> {
    if dim == 1 {
        (0..=order).map(|l| [l, 0]).collect()
    } else {
        (0..(order + 1) * (order + 2) / 2)
            .map(|s| {
                let (i, j) = graded_exponents(s);
                [i, j]
            })
            .collect()
    }
}

fn slot_of(dim: usize, alpha: [usize; 2]) -> usize {
    if dim == 1 {
        alpha[0]
    } else {
        let d = alpha[0] + alpha[1];
        d * (d + 1) / 2 + alpha[1]
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_order(dim: usize, order: usize) -> Result<()> {
    if dim == 2 && order > 2 {
        return Err(Error::InvalidParameter(format!("2D jets support order <= 2, got {order}")));
    }
    if dim != 1 && dim != 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    Ok(())
}

impl Jet {
    /// `components[s]` holds the values of `f_α` for the `s`-th multi-index
    /// in graded order.
    pub fn new(grid: Grid, order: usize, components: Vec<Vec<f64>>) -> Result<Self> {
        check_order(grid.dim(), order)?;
        let alphas = alphas_for(grid.dim(), order);
        if components.len() != alphas.len() {
            return Err(Error::LengthMismatch { expected: alphas.len(), got: components.len() });
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), got: c.len() });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("jet components must be finite".into()));
            }
        }
        Ok(Jet { grid, order, alphas, components })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Multi-indices of the components, in storage order.
    pub fn alphas(&self) -> &[[usize; 2]] {
        &self.alphas
    }

    /// Values of `f_α`; in 1D `alpha = [l, 0]`.
    pub fn component(&self, alpha: [usize; 2]) -> Option<&[f64]> {
        let s = slot_of(self.grid.dim(), alpha);
        (s < self.components.len() && self.alphas[s] == alpha).then(|| self.components[s].as_slice())
    }

    /// Gradient `(f_(1,0), f_(0,1))` at a point (1D: second entry 0).
    fn gradient_at(&self, x: usize) -> [f64; 2] {
        if self.grid.dim() == 1 {
            [self.components[1][x], 0.0]
        } else {
            [self.components[1][x], self.components[2][x]]
        }
    }

    /// `T^k F` at displacement `d = y - x` from the grid point `x`.
    fn taylor_at(&self, x: usize, d: [f64; 2]) -> f64 {
        let mut acc = 0.0;
        for (s, a) in self.alphas.iter().enumerate() {
            acc += self.components[s][x] * monomial(*a, d);
        }
        acc
    }

    /// One block per component, each headed by `# component <s> alpha=<i>,<j>`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# jet order={} dim={}\n", self.order, self.grid.dim());
        for (s, a) in self.alphas.iter().enumerate() {
            out.push_str(&format!("# component {s} alpha={},{}\n", a[0], a[1]));
            out.push_str(&values_to_csv(&self.grid, &self.components[s], None));
        }
        out
    }
}

/// `d^α / α!`.
fn monomial(alpha: [usize; 2], d: [f64; 2]) -> f64 {
    match alpha {
        [0, 0] => 1.0,
        [1, 0] => d[0],
        [0, 1] => d[1],
        _ => d[0].powi(alpha[0] as i32) * d[1].powi(alpha[1] as i32) / (factorial(alpha[0]) * factorial(alpha[1])),
    }
}

/// Jet of analytic derivatives `f_α = D^α f`.
pub fn jet_from_function(tf: &TestFunction, grid: &Grid, k: usize) -> Result<Jet> {
    tf.validate(grid.dim())?;
    check_order(grid.dim(), k)?;
    let alphas = alphas_for(grid.dim(), k);
    let mut components = Vec::with_capacity(alphas.len());
    for a in &alphas {
        let alpha = &a[..grid.dim()];
        let comp = (0..grid.len()).map(|i| tf.derivative(alpha, &grid.point(i))).collect::<Result<Vec<f64>>>()?;
        components.push(comp);
    }
    Jet::new(grid.clone(), k, components)
}

fn displacement(grid: &Grid, y: &[f64], x: usize) -> Result<[f64; 2]> {
    if y.len() != grid.dim() {
        return Err(Error::LengthMismatch { expected: grid.dim(), got: y.len() });
    }
    let c = grid.coord(x);
    let mut d = [0.0; 2];
    for a in 0..grid.dim() {
        d[a] = y[a] - c[a];
    }
    Ok(d)
}

fn lattice_displacement(grid: &Grid, y: usize, x: usize) -> [f64; 2] {
    let o = grid.offset_units(x, y);
    [o[0] as f64 * grid.h(), o[1] as f64 * grid.h()]
}

/// `T^k F(y, x) = sum_α f_α(x) (y - x)^α / α!` for a grid point `x` and any
/// point `y`.
pub fn taylor_field(jet: &Jet, y: &[f64], x: usize) -> Result<f64> {
    jet.grid.check_index(x)?;
    Ok(jet.taylor_at(x, displacement(&jet.grid, y, x)?))
}

/// `R^k F(y, x) = f(y) - T^k F(y, x)` for grid points `x`, `y`.
pub fn tw_remainder(jet: &Jet, f: &GridFunction, y: usize, x: usize) -> Result<f64> {
    if f.grid() != jet.grid() {
        return Err(Error::GridMismatch);
    }
    jet.grid.check_index(x)?;
    jet.grid.check_index(y)?;
    Ok(f.value(y) - jet.taylor_at(x, lattice_displacement(&jet.grid, y, x)))
}

/// Formal derivative `D_l F`: the jet of order `k - |l|` with
/// `(D_l F)_α = f_{α + l}`.
pub fn jet_derivative(jet: &Jet, l: &[usize]) -> Result<Jet> {
    let dim = jet.grid.dim();
    if l.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: l.len() });
    }
    let shift = [l[0], if dim == 2 { l[1] } else { 0 }];
    let total = shift[0] + shift[1];
    if total > jet.order {
        return Err(Error::InvalidParameter(format!("derivative order {total} exceeds jet order {}", jet.order)));
    }
    let order = jet.order - total;
    let components = alphas_for(dim, order)
        .iter()
        .map(|a| jet.components[slot_of(dim, [a[0] + shift[0], a[1] + shift[1]])].clone())
        .collect();
    Jet::new(jet.grid.clone(), order, components)
}

/// Outcome of a single numeric identity `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Magnitude of the quantities entering the identity.
    pub scale: f64,
    /// `|lhs - rhs| / scale` (0 when both sides agree exactly).
    pub relative_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    fn new(name: &str, lhs: f64, rhs: f64, scale: f64, tolerance: f64) -> Self {
        let diff = (lhs - rhs).abs();
        let relative_error = if diff == 0.0 {
            0.0
        } else if scale > 0.0 {
            diff / scale
        } else {
            f64::INFINITY
        };
        IdentityReport {
            name: name.into(),
            lhs,
            rhs,
            scale,
            relative_error,
            tolerance,
            pass: relative_error <= tolerance,
        }
    }
}

/// Monomial coefficients in `s` of the polynomial through `(nodes[i], vals[i])`.
fn fit_coefficients(nodes: &[f64], vals: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut dd = vals.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - k]);
        }
    }
    // Horner expansion of the Newton form.
    let mut coeffs = vec![0.0; n];
    coeffs[0] = dd[n - 1];
    for k in (0..n - 1).rev() {
        for j in (1..n).rev() {
            coeffs[j] = coeffs[j - 1] - nodes[k] * coeffs[j];
        }
        coeffs[0] = dd[k] - nodes[k] * coeffs[0];
    }
    coeffs
}

/// `D^l_y T^k F(y, x) = T^{k-|l|}(D_l F)(y, x)`. The left side is the exact
/// derivative of the interpolant of `T^k F(·, x)` on a tensor stencil of
/// `k + 1` nodes per axis around `y`, which reproduces a polynomial of
/// degree `k`.
pub fn commutation_check(jet: &Jet, l: &[usize], y: &[f64], x: usize) -> Result<IdentityReport> {
    let derived = jet_derivative(jet, l)?;
    let dim = jet.grid.dim();
    let k = jet.order;
    let d = displacement(&jet.grid, y, x)?;
    let delta = 0.25f64.max(jet.grid.h());
    let nodes: Vec<f64> = (0..=k).map(|i| (i as f64 - k as f64 / 2.0) * delta).collect();
    let lhs = if dim == 1 {
        let vals: Vec<f64> = nodes.iter().map(|&s| jet.taylor_at(x, [d[0] + s, 0.0])).collect();
        fit_coefficients(&nodes, &vals)[l[0]] * factorial(l[0])
    } else {
        let rows: Vec<f64> = nodes
            .iter()
            .map(|&s2| {
                let vals: Vec<f64> = nodes.iter().map(|&s1| jet.taylor_at(x, [d[0] + s1, d[1] + s2])).collect();
                fit_coefficients(&nodes, &vals)[l[0]]
            })
            .collect();
        fit_coefficients(&nodes, &rows)[l[1]] * factorial(l[0]) * factorial(l[1])
    };
    let rhs = derived.taylor_at(x, d);
    let r = (d[0] * d[0] + d[1] * d[1]).sqrt().max(delta);
    let scale = jet
        .alphas
        .iter()
        .enumerate()
        .map(|(s, a)| jet.components[s][x].abs() * r.powi((a[0] + a[1]) as i32 - (l.iter().sum::<usize>()) as i32))
        .fold(0.0, f64::max);
    Ok(IdentityReport::new("commutation", lhs, rhs, scale, 1e-10))
}

/// `R^{k-|l|}(D_l F)(y, x) + T^{k-|l|}(D_l F)(y, x) = f_l(y)`, with the
/// remainder formed from the component values of the jet itself.
pub fn component_identity_check(jet: &Jet, l: &[usize], y: usize, x: usize) -> Result<IdentityReport> {
    let derived = jet_derivative(jet, l)?;
    jet.grid.check_index(x)?;
    jet.grid.check_index(y)?;
    let fl_y = derived.components[0][y];
    let t = derived.taylor_at(x, lattice_displacement(&jet.grid, y, x));
    let r = fl_y - t;
    Ok(IdentityReport::new("component_identity", r + t, fl_y, fl_y.abs().max(t.abs()), 1e-12))
}

/// All identities of one Taylor-algebra check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub identities: Vec<IdentityReport>,
    pub pass: bool,
}

struct Point1 {
    f: f64,
    grad: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u - v).collect()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn eval_point(tf: &TestFunction, p: &[f64]) -> Result<Point1> {
    let dim = p.len();
    let grad = (0..dim)
        .map(|a| {
            let mut alpha = vec![0; dim];
            alpha[a] = 1;
            tf.derivative(&alpha, p)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Point1 { f: tf.value(p), grad })
}

/// `R^1 f(b, a) = f(b) - f(a) - <f'(a), b - a>`.
fn r1(fb: &Point1, fa: &Point1, b: &[f64], a: &[f64]) -> f64 {
    fb.f - fa.f - dot(&fa.grad, &sub(b, a))
}

/// The zeroth- and first-order Taylor-algebra identities at three points:
///
/// * `R(y,x) + R(x,y) = 0`
/// * `R(y,x) - R(y,z) = -R(x,z)`
/// * `R^1 f(y,x) + R^1 f(x,y) = <f'(y) - f'(x), y - x>`
/// * `P^1(x,y,z) = R^1 f(y,x) - R^1 f(y,z) = R^1 f(z,x) + <f'(z) - f'(x), y - z>`
/// * `D_y P^1(x,y,z) = f'(z) - f'(x)`, by differencing the affine `P^1` in `y`
pub fn taylor_algebra_check(tf: &TestFunction, x: &[f64], y: &[f64], z: &[f64]) -> Result<AlgebraReport> {
    let dim = x.len();
    if y.len() != dim || z.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: if y.len() != dim { y.len() } else { z.len() } });
    }
    tf.validate(dim)?;
    let (px, py, pz) = (eval_point(tf, x)?, eval_point(tf, y)?, eval_point(tf, z)?);
    let tol = 1e-10;
    let mut ids = Vec::new();

    let r = |b: &Point1, a: &Point1| b.f - a.f;
    let fscale = px.f.abs().max(py.f.abs()).max(pz.f.abs());
    ids.push(IdentityReport::new("antisymmetry", r(&py, &px) + r(&px, &py), 0.0, fscale, tol));
    ids.push(IdentityReport::new("cocycle", r(&py, &px) - r(&py, &pz), -r(&px, &pz), fscale, tol));

    let gscale = |p: &Point1, d: f64| norm(&p.grad) * d;
    let dxy = norm(&sub(y, x));
    let dyz = norm(&sub(y, z));
    let dxz = norm(&sub(x, z));
    let s1 = fscale.max(gscale(&px, dxy)).max(gscale(&py, dxy));
    ids.push(IdentityReport::new(
        "first_order_symmetrization",
        r1(&py, &px, y, x) + r1(&px, &py, x, y),
        dot(&sub(&py.grad, &px.grad), &sub(y, x)),
        s1,
        tol,
    ));

    let p1 = |yy: &[f64], fy: f64| {
        let q = Point1 { f: fy, grad: Vec::new() };
        r1(&q, &px, yy, x) - r1(&q, &pz, yy, z)
    };
    let s2 = s1.max(gscale(&px, dxz)).max(gscale(&pz, dyz)).max(gscale(&pz, dxz));
    ids.push(IdentityReport::new(
        "three_point",
        p1(y, py.f),
        r1(&pz, &px, z, x) + dot(&sub(&pz.grad, &px.grad), &sub(y, z)),
        s2,
        tol,
    ));

    // P^1 is affine in y, so a forward difference is its gradient.
    let delta = 0.1;
    let target = sub(&pz.grad, &px.grad);
    let mut fd = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut ys = y.to_vec();
        ys[a] += delta;
        fd.push((p1(&ys, py.f) - p1(y, py.f)) / delta);
    }
    let err = norm(&sub(&fd, &target));
    let gs = norm(&px.grad).max(norm(&pz.grad));
    ids.push(IdentityReport::new("three_point_gradient", err, 0.0, gs.max(s2 / delta * 1e-3), tol));

    let pass = ids.iter().all(|r| r.pass);
    Ok(AlgebraReport { identities: ids, pass })
}

/// `M_R Q^m F` (`cap = Some(R)`) or `MQ^m F`: the supremum over the radius
/// ladder of the counting average of `|R^{m-1} F(z, x)| / |z - x|^m`.
/// For `m = 1` this coincides bitwise with [`crate::meanquotient::mq_field`].
pub fn mq_m_field(jet: &Jet, f: &GridFunction, m: usize, cap: Option<f64>) -> Result<MQField> {
    if m == 0 {
        return Err(Error::InvalidParameter("MQ^m needs m >= 1".into()));
    }
    if jet.order + 1 != m {
        return Err(Error::InvalidParameter(format!("MQ^{m} needs a jet of order {}, got {}", m - 1, jet.order)));
    }
    if f.grid() != jet.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = jet.grid();
    let v = f.values();
    let j_max = ladder_j_max(grid, cap);
    let stencil = Stencil::new(grid, j_max * j_max);
    let table = MonomialTable::new(jet, &stencil, m);
    let raw: Vec<Option<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|x| ladder_sup(grid, &stencil, x, j_max, None, |z, k| table.quotient(jet, v, x, z, k)))
        .collect();
    let empty_points = raw.iter().enumerate().filter(|(_, r)| r.is_none()).map(|(i, _)| i).collect();
    let values = raw.into_iter().map(|r| r.unwrap_or(0.0)).collect();
    let label = match cap {
        Some(c) => format!("mq{m}_cap_{c}"),
        None => format!("mq{m}"),
    };
    Ok(MQField { base: ScalarField::new(grid.clone(), values, label)?, radius_cap: cap, empty_points })
}

/// Per-offset monomials `d^α / α!` and powers `|d|^m`.
struct MonomialTable {
    n_alpha: usize,
    mono: Vec<f64>,
    dist_m: Vec<f64>,
}

impl MonomialTable {
    fn new(jet: &Jet, stencil: &Stencil, m: usize) -> Self {
        let h = jet.grid.h();
        let n_alpha = jet.alphas.len();
        let mut mono = Vec::with_capacity(stencil.offsets.len() * n_alpha);
        for o in &stencil.offsets {
            let d = [o[0] as f64 * h, o[1] as f64 * h];
            mono.extend(jet.alphas.iter().map(|&a| monomial(a, d)));
        }
        let dist_m = stencil.dist.iter().map(|d| d.powi(m as i32)).collect();
        MonomialTable { n_alpha, mono, dist_m }
    }

    #[inline]
    fn taylor(&self, jet: &Jet, x: usize, k: usize) -> f64 {
        let row = &self.mono[k * self.n_alpha..(k + 1) * self.n_alpha];
        let mut acc = 0.0;
        for (s, &mv) in row.iter().enumerate() {
            acc += jet.components[s][x] * mv;
        }
        acc
    }

    #[inline]
    fn quotient(&self, jet: &Jet, v: &[f64], x: usize, z: usize, k: usize) -> f64 {
        (v[z] - self.taylor(jet, x, k)).abs() / self.dist_m[k]
    }
}

/// Which first term the second-order lemma uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaVariant {
    /// `|R^1 f(y,z)| / |z-y|^2`, the form that follows from the three-point
    /// identity.
    Derived,
    /// `|R^1 f(z,y)| / |z-y|^2`; fails for some smooth functions.
    Printed,
}

fn check_first_order(jet: &Jet, f: &GridFunction) -> Result<()> {
    if jet.order < 1 {
        return Err(Error::InvalidParameter("the second-order lemma needs a jet of order >= 1".into()));
    }
    if f.grid() != jet.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `R^1 F(b, a)` and a bound on its rounding error.
fn r1_grid(jet: &Jet, v: &[f64], b: usize, a: usize) -> (f64, f64) {
    let d = lattice_displacement(&jet.grid, b, a);
    let g = jet.gradient_at(a);
    let (p0, p1) = (g[0] * d[0], g[1] * d[1]);
    let value = v[b] - v[a] - (p0 + p1);
    (value, ROUNDING * (v[b].abs() + v[a].abs() + p0.abs() + p1.abs()))
}

/// Generous multiple of the unit roundoff for a handful of operations.
const ROUNDING: f64 = 4.0 * f64::EPSILON;

fn grad_gap(jet: &Jet, a: usize, b: usize) -> f64 {
    let (ga, gb) = (jet.gradient_at(a), jet.gradient_at(b));
    ((ga[0] - gb[0]).powi(2) + (ga[1] - gb[1]).powi(2)).sqrt()
}

/// Left and right sides of the second-order lemma at three points, from
/// analytic values and gradients.
pub fn second_order_lemma_terms(
    tf: &TestFunction,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    variant: LemmaVariant,
) -> Result<(f64, f64)> {
    let (px, py, pz) = (eval_point(tf, x)?, eval_point(tf, y)?, eval_point(tf, z)?);
    let dxy = norm(&sub(y, x));
    let dzy = norm(&sub(z, y));
    let dzx = norm(&sub(z, x));
    let lhs = r1(&py, &px, y, x).abs() / (dxy * dxy);
    let first = match variant {
        LemmaVariant::Derived => r1(&py, &pz, y, z),
        LemmaVariant::Printed => r1(&pz, &py, z, y),
    };
    let rhs = first.abs() / (dzy * dzy) + r1(&pz, &px, z, x).abs() / (dzx * dzx) + norm(&sub(&pz.grad, &px.grad)) / dzx;
    Ok((lhs, rhs))
}

/// The second-order lemma on grid triples `(x, y, z)`, `z` in the lens of
/// `(x, y)`. The comparison allows only the floating-point evaluation error
/// of the remainders; the inequality itself is checked without slack. Each
/// pair reports its worst `lhs / rhs` over the lens.
pub fn second_order_lemma_check(
    jet: &Jet,
    f: &GridFunction,
    variant: LemmaVariant,
    sampling: PairSampling,
) -> Result<InequalityReport> {
    check_first_order(jet, f)?;
    let grid = jet.grid();
    let v = f.values();
    let triples = AtomicU64::new(0);
    let points: Vec<usize> = (0..grid.len()).collect();
    let scan = scan_pairs(&points, sampling, |x, y| grid.distance(x, y), grid.diameter(), |x, y| {
        let lens = lens_indices(grid, x, y).expect("valid pair");
        if lens.is_empty() {
            return Outcome::Skip(SKIP_EMPTY_LENS);
        }
        triples.fetch_add(lens.len() as u64, Ordering::Relaxed);
        let r2 = grid.distance(x, y).powi(2);
        let (ryx, eyx) = r1_grid(jet, v, y, x);
        let lhs = ryx.abs() / r2;
        let mut worst = Outcome::Skip(SKIP_ZERO);
        for &z in &lens {
            let dzy = grid.distance(z, y);
            let dzx = grid.distance(z, x);
            let (first, e1) = match variant {
                LemmaVariant::Derived => r1_grid(jet, v, y, z),
                LemmaVariant::Printed => r1_grid(jet, v, z, y),
            };
            let (rzx, e2) = r1_grid(jet, v, z, x);
            let rhs = first.abs() / (dzy * dzy) + rzx.abs() / (dzx * dzx) + grad_gap(jet, z, x) / dzx;
            let slack = eyx / r2 + e1 / (dzy * dzy) + e2 / (dzx * dzx) + ROUNDING * (lhs + rhs);
            worst = worse(worst, pair_outcome(lhs, rhs + slack, 1.0, 0.0));
        }
        worst
    });
    let name = match variant {
        LemmaVariant::Derived => "second_order_lemma",
        LemmaVariant::Printed => "second_order_lemma_printed",
    };
    let mut rep = InequalityReport::from_scan(name, |i| grid.point(i), 1.0, scan);
    rep.detail("triples_checked", triples.load(Ordering::Relaxed));
    Ok(rep)
}

fn worse(a: Outcome, b: Outcome) -> Outcome {
    match (a, b) {
        (Outcome::Hard, _) | (_, Outcome::Hard) => Outcome::Hard,
        (Outcome::Value { score: sa, .. }, Outcome::Value { score: sb, .. }) => {
            if sb > sa {
                b
            } else {
                a
            }
        }
        (Outcome::Value { .. }, _) => a,
        (_, Outcome::Value { .. }) => b,
        _ => a,
    }
}

/// Lens average of the symmetric second-order lemma against the ball
/// averages of the second-order quotient, with exact point counts:
///
/// `|R^1 f(y,x)|/r^2 <= (#B_x/#Σ) A_r Q^2(x) + (#B_y/#Σ) A_r Q^2(y)
///   + (1/#Σ) sum_{z∈Σ} (|f'(z)-f'(x)|/|z-x| + |f'(z)-f'(y)|/|z-y|)`,
///
/// where `r = |x-y|`, `Σ` is the lens and `A_r Q^2` the average of
/// `|R^1 f(z,·)|/|z-·|^2` over the open ball of radius `r`. As in
/// [`second_order_lemma_check`], only evaluation rounding is allowed for.
pub fn averaged_lemma_check(jet: &Jet, f: &GridFunction, opts: &ChainOptions) -> Result<InequalityReport> {
    check_first_order(jet, f)?;
    let grid = jet.grid();
    let v = f.values();
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
    let first = jet_derivative_order1(jet)?;
    let table = MonomialTable::new(&first, &stencil, 2);
    let profiles: Vec<BallProfile> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let levels = if opts.interior_only {
                let m = margin(x);
                stencil.levels_below(m * m + 1)
            } else {
                stencil.levels.len()
            };
            BallProfile::build(grid, &stencil, x, levels, |z, k| table.quotient(&first, v, x, z, k))
        })
        .collect();
    let points: Vec<usize> = (0..grid.len()).collect();
    let scan = scan_pairs(&points, opts.sampling, |x, y| grid.distance(x, y), grid.diameter(), |x, y| {
        let d2 = grid.dist2_units(x, y);
        if opts.interior_only && !(grid.ball_fits(x, d2) && grid.ball_fits(y, d2)) {
            return Outcome::Skip(SKIP_MARGIN);
        }
        let lens = lens_indices(grid, x, y).expect("valid pair");
        if lens.is_empty() {
            return Outcome::Skip(SKIP_EMPTY_LENS);
        }
        let (sx, nx) = profiles[x].below(&stencil, d2).expect("profile covers the pair radius");
        let (sy, ny) = profiles[y].below(&stencil, d2).expect("profile covers the pair radius");
        let nl = lens.len() as f64;
        let mut grad_sum = 0.0;
        let mut err_sum = 0.0;
        for &z in &lens {
            let (dzx, dzy) = (grid.distance(z, x), grid.distance(z, y));
            grad_sum += grad_gap(jet, z, x) / dzx + grad_gap(jet, z, y) / dzy;
            err_sum += r1_grid(jet, v, z, x).1 / (dzx * dzx) + r1_grid(jet, v, z, y).1 / (dzy * dzy);
        }
        let r2 = grid.distance(x, y).powi(2);
        let (ryx, eyx) = r1_grid(jet, v, y, x);
        let lhs = ryx.abs() / r2;
        let rhs = (nx as f64 / nl) * (sx / nx as f64) + (ny as f64 / nl) * (sy / ny as f64) + grad_sum / nl;
        let terms = (nx + ny) as f64 + nl;
        let slack = eyx / r2 + err_sum / nl + terms * f64::EPSILON * (lhs + rhs);
        pair_outcome(lhs, rhs + slack, 1.0, 0.0)
    });
    let mut rep = InequalityReport::from_scan("averaged_second_order_lemma", |i| grid.point(i), 1.0, scan);
    rep.detail("interior_only", opts.interior_only);
    Ok(rep)
}

/// Truncation of a jet to order 1.
fn jet_derivative_order1(jet: &Jet) -> Result<Jet> {
    let n = if jet.grid.dim() == 1 { 2 } else { 3 };
    Jet::new(jet.grid.clone(), 1, jet.components[..n].to_vec())
}
