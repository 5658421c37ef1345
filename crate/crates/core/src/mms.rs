//! Mean quotients and pointwise inequalities on finite metric measure
//! spaces `(X, d, μ)` with atoms `μ({x}) = w_x`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanquotient::{pair_outcome, InequalityReport};
use crate::pairs::{scan_pairs, Outcome, PairSampling, SKIP_EMPTY_LENS};

/// Relative slack for the triangle inequality of generated metrics, whose
/// Euclidean distances carry rounding.
const TRIANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMetricMeasureSpace {
    n: usize,
    dist: Vec<f64>,
    weights: Vec<f64>,
}

impl FiniteMetricMeasureSpace {
    /// Validates symmetry, positivity off the diagonal, the triangle
    /// inequality and positive weights.
    pub fn new(dist: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidMetric("the space has no points".into()));
        }
        if weights.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidMetric(format!("weights must be positive, got {w}")));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            flat.extend_from_slice(row);
        }
        for i in 0..n {
            if flat[i * n + i] != 0.0 {
                return Err(Error::InvalidMetric(format!("d({i},{i}) = {} is not zero", flat[i * n + i])));
            }
            for j in 0..n {
                let d = flat[i * n + j];
                if i != j && !(d > 0.0 && d.is_finite()) {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) = {d} must be positive and finite")));
                }
                if d != flat[j * n + i] {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) != d({j},{i})")));
                }
            }
        }
        let violation = (0..n).into_par_iter().find_map_first(|i| {
            for j in 0..n {
                for k in 0..n {
                    if flat[i * n + k] > (flat[i * n + j] + flat[j * n + k]) * (1.0 + TRIANGLE_SLACK) {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        if let Some((i, j, k)) = violation {
            return Err(Error::InvalidMetric(format!("triangle inequality fails for d({i},{k}) via {j}")));
        }
        Ok(FiniteMetricMeasureSpace { n, dist: flat, weights })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// The same space with `d` replaced by `s d`.
    pub fn scaled_metric(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!("metric scale must be positive, got {s}")));
        }
        Ok(FiniteMetricMeasureSpace {
            n: self.n,
            dist: self.dist.iter().map(|d| d * s).collect(),
            weights: self.weights.clone(),
        })
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        FiniteMetricMeasureSpace::new(self.distance_matrix(), weights)
    }

    /// Other points sorted by `(d(x, z), z)`.
    fn neighbors(&self, x: usize) -> Vec<usize> {
        let mut z: Vec<usize> = (0..self.n).filter(|&z| z != x).collect();
        z.sort_by(|&a, &b| self.d(x, a).total_cmp(&self.d(x, b)).then(a.cmp(&b)));
        z
    }
}

/// Generators for finite metric measure spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SpaceKind {
    /// Shortest-path metric of a connected weighted graph with edges
    /// `(i, j, length)`. Every edge must be a shortest path between its ends.
    GraphShortestPath { n: usize, edges: Vec<(usize, usize, f64)> },
    /// Euclidean distances between distinct points.
    PointCloud { coords: Vec<Vec<f64>> },
    /// Euclidean distances raised to `exponent` in `(0, 1]`.
    Snowflake { coords: Vec<Vec<f64>>, exponent: f64 },
    /// An explicit distance matrix.
    Matrix { dist: Vec<Vec<f64>> },
}

/// `weights = None` means unit weights.
pub fn build_space(kind: &SpaceKind, weights: Option<Vec<f64>>) -> Result<FiniteMetricMeasureSpace> {
    let dist = match kind {
        SpaceKind::GraphShortestPath { n, edges } => graph_metric(*n, edges)?,
        SpaceKind::PointCloud { coords } => euclidean(coords, 1.0)?,
        SpaceKind::Snowflake { coords, exponent } => {
            if !(*exponent > 0.0 && *exponent <= 1.0) {
                return Err(Error::InvalidParameter(format!("snowflake exponent must lie in (0, 1], got {exponent}")));
            }
            euclidean(coords, *exponent)?
        }
        SpaceKind::Matrix { dist } => dist.clone(),
    };
    let n = dist.len();
    FiniteMetricMeasureSpace::new(dist, weights.unwrap_or_else(|| vec![1.0; n]))
}

fn graph_metric(n: usize, edges: &[(usize, usize, f64)]) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidMetric("a graph needs at least one node".into()));
    }
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, w) in edges {
        if a >= n || b >= n {
            return Err(Error::IndexOutOfRange { index: a.max(b), len: n });
        }
        if a == b || !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidMetric(format!("edge ({a},{b}) needs distinct ends and a positive length")));
        }
        d[a][b] = d[a][b].min(w);
        d[b][a] = d[b][a].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    if d.iter().flatten().any(|v| v.is_infinite()) {
        return Err(Error::InvalidMetric("the graph is not connected".into()));
    }
    for &(a, b, w) in edges {
        if w > d[a][b] {
            return Err(Error::InvalidMetric(format!(
                "edge ({a},{b}) of length {w} is longer than the path of length {}; triangle inequality fails",
                d[a][b]
            )));
        }
    }
    Ok(d)
}

fn euclidean(coords: &[Vec<f64>], exponent: f64) -> Result<Vec<Vec<f64>>> {
    let n = coords.len();
    if n == 0 {
        return Err(Error::InvalidMetric("the point cloud is empty".into()));
    }
    let dim = coords[0].len();
    if coords.iter().any(|c| c.len() != dim || c.iter().any(|v| !v.is_finite())) {
        return Err(Error::InvalidMetric("points must be finite and of equal dimension".into()));
    }
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let e = coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if e == 0.0 {
                return Err(Error::InvalidMetric(format!("points {i} and {j} coincide")));
            }
            let v = if exponent == 1.0 { e } else { e.powf(exponent) };
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    Ok(d)
}

/// JSON space description `{kind, params, weights}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceInput {
    #[serde(flatten)]
    pub kind: SpaceKind,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
}

pub fn parse_space_json(text: &str) -> Result<FiniteMetricMeasureSpace> {
    let input: SpaceInput =
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("bad space description: {e}")))?;
    build_space(&input.kind, input.weights)
}

/// Distance matrix as CSV rows; blank lines and `#` comments are ignored.
pub fn parse_distance_csv(text: &str, weights: Option<Vec<f64>>) -> Result<FiniteMetricMeasureSpace> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::InvalidParameter(format!("line {}: {e}", ln + 1)))?;
        rows.push(row);
    }
    build_space(&SpaceKind::Matrix { dist: rows }, weights)
}

/// `MQ_R f` (radii `r <= R`) or `MQ f`: the supremum over radii of the
/// `μ`-weighted average of `|f(z) - f(x)| / d(z, x)` over `0 < d(z, x) < r`.
/// The balls change only past each distinct distance from `x`, so the
/// candidates are the prefixes `d(z, x) <= d_k` with `d_k < R`.
pub fn mq_field_mms(f: &[f64], space: &FiniteMetricMeasureSpace, cap: Option<f64>) -> Result<Vec<f64>> {
    if f.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: f.len() });
    }
    Ok((0..space.len())
        .into_par_iter()
        .map(|x| {
            let mut best = 0.0f64;
            let mut sum = 0.0;
            let mut mass = 0.0;
            let nb = space.neighbors(x);
            for (i, &z) in nb.iter().enumerate() {
                let d = space.d(x, z);
                if cap.is_some_and(|r| d >= r) {
                    break;
                }
                let w = space.weights[z];
                sum += w * ((f[z] - f[x]).abs() / d);
                mass += w;
                let level_ends = nb.get(i + 1).map_or(true, |&next| space.d(x, next) != d);
                if level_ends {
                    best = best.max(sum / mass);
                }
            }
            best
        })
        .collect())
}

/// `sup_{x, r > 0} μ(B(x, 2r)) / μ(B(x, r))` over closed balls. The ratio is
/// piecewise constant in `r` with jumps at `d(x,z)` and `d(x,z)/2`; the sup
/// is taken over those radii and the left limits there.
pub fn doubling_constant(space: &FiniteMetricMeasureSpace) -> f64 {
    (0..space.len())
        .into_par_iter()
        .map(|x| {
            let nb = space.neighbors(x);
            let ds: Vec<f64> = nb.iter().map(|&z| space.d(x, z)).collect();
            let mut cum = Vec::with_capacity(nb.len() + 1);
            cum.push(space.weights[x]);
            for &z in &nb {
                cum.push(cum.last().unwrap() + space.weights[z]);
            }
            let closed = |r: f64| cum[ds.partition_point(|&d| d <= r)];
            let open = |r: f64| cum[ds.partition_point(|&d| d < r)];
            let mut best = 1.0f64;
            for &d in &ds {
                for c in [d, d / 2.0] {
                    best = best.max(closed(2.0 * c) / closed(c)).max(open(2.0 * c) / open(c));
                }
            }
            best
        })
        .reduce(|| 1.0, f64::max)
}

/// The lens overlap of one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapEntry {
    pub x: usize,
    pub y: usize,
    pub lens_mass: f64,
    /// `max(μ(B*(x,r)), μ(B*(y,r))) / μ(Σ)` with punctured open balls, or
    /// `None` for an empty lens.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    /// Supremum over pairs with a nonempty lens; `None` if there is none.
    pub constant: Option<f64>,
    pub worst_pair: Option<(usize, usize)>,
    pub empty_lens_pairs: u64,
    pub pairs: Vec<OverlapEntry>,
}

fn lens_mass(space: &FiniteMetricMeasureSpace, x: usize, y: usize) -> f64 {
    let r = space.d(x, y);
    (0..space.len())
        .filter(|&z| z != x && z != y && space.d(z, x) < r && space.d(z, y) < r)
        .map(|z| space.weights[z])
        .sum()
}

fn punctured_ball_mass(space: &FiniteMetricMeasureSpace, x: usize, r: f64) -> f64 {
    (0..space.len()).filter(|&z| z != x && space.d(z, x) < r).map(|z| space.weights[z]).sum()
}

/// Lens overlap `|B|/|Σ|` for `r = d(x, y)`. Balls are punctured and open,
/// the sets over which [`mq_field_mms`] averages, so the two-ball argument
/// for the pointwise inequality holds with this constant.
pub fn overlap_constant(space: &FiniteMetricMeasureSpace) -> Result<OverlapReport> {
    let n = space.len();
    if n < 2 {
        return Err(Error::InvalidParameter("the overlap needs at least two points".into()));
    }
    let pairs: Vec<OverlapEntry> = (0..n)
        .into_par_iter()
        .flat_map_iter(|x| {
            (x + 1..n).map(move |y| {
                let lm = lens_mass(space, x, y);
                let ratio = (lm > 0.0).then(|| {
                    let r = space.d(x, y);
                    punctured_ball_mass(space, x, r).max(punctured_ball_mass(space, y, r)) / lm
                });
                OverlapEntry { x, y, lens_mass: lm, ratio }
            })
        })
        .collect();
    let mut constant: Option<f64> = None;
    let mut worst_pair = None;
    for p in &pairs {
        if let Some(r) = p.ratio {
            if constant.map_or(true, |c| r > c) {
                constant = Some(r);
                worst_pair = Some((p.x, p.y));
            }
        }
    }
    let empty_lens_pairs = pairs.iter().filter(|p| p.ratio.is_none()).count() as u64;
    Ok(OverlapReport { constant, worst_pair, empty_lens_pairs, pairs })
}

/// `|f(x) - f(y)| <= C d(x, y) (g(x) + g(y))` over all pairs with a nonempty
/// lens; `C` defaults to the measured overlap constant. Pairs with an empty
/// lens are counted and checked separately in the details.
pub fn verify_pointwise_mms(
    f: &[f64],
    space: &FiniteMetricMeasureSpace,
    g: &[f64],
    constant: Option<f64>,
) -> Result<InequalityReport> {
    let n = space.len();
    if f.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: f.len() });
    }
    if g.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: g.len() });
    }
    if g.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidParameter("g must be nonnegative".into()));
    }
    let c = match constant {
        Some(c) if c > 0.0 => c,
        Some(c) => return Err(Error::InvalidParameter(format!("constant must be positive, got {c}"))),
        None => match overlap_constant(space) {
            Ok(rep) => rep.constant.unwrap_or(1.0),
            Err(_) => 1.0,
        },
    };
    let points: Vec<usize> = (0..n).collect();
    let max_d = space.dist.iter().cloned().fold(0.0, f64::max);
    let check = |x: usize, y: usize| pair_outcome((f[x] - f[y]).abs(), space.d(x, y) * (g[x] + g[y]), c, 0.0);
    let sampling = PairSampling { budget: u64::MAX, seed: 0 };
    let scan = scan_pairs(&points, sampling, |x, y| space.d(x, y), max_d, |x, y| {
        if lens_mass(space, x, y) == 0.0 {
            Outcome::Skip(SKIP_EMPTY_LENS)
        } else {
            check(x, y)
        }
    });
    let empty = scan_pairs(&points, sampling, |x, y| space.d(x, y), max_d, |x, y| {
        if lens_mass(space, x, y) == 0.0 {
            check(x, y)
        } else {
            Outcome::Skip(SKIP_EMPTY_LENS)
        }
    });
    let mut rep = InequalityReport::from_scan("pointwise_mms", |i| vec![i as f64], c, scan);
    rep.detail("empty_lens_pairs", rep.skipped);
    rep.detail("empty_lens_violations", empty.violations + empty.hard);
    rep.detail("constant_source", if constant.is_some() { "caller" } else { "overlap" });
    Ok(rep)
}
