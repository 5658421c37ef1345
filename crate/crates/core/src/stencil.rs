//! Radially sorted lattice offsets and the radius-ladder supremum shared by
//! the maximal and mean-quotient fields.
//!
//! Offsets are visited in `(d2, dy, dx)` order and running sums are taken in
//! that order, so every field built on this module sums the same terms in the
//! same sequence and agrees bitwise with every other one.

use crate::grid::{units_to_distance, Grid};

pub(crate) struct Stencil {
    pub offsets: Vec<[i64; 2]>,
    pub d2: Vec<i64>,
    pub dist: Vec<f64>,
    /// Index into `offsets` where each distinct `d2` level starts, plus a
    /// final sentinel equal to `offsets.len()`.
    pub level_starts: Vec<usize>,
    pub levels: Vec<i64>,
}

impl Stencil {
    /// All nonzero offsets with `d2 < bound` that can connect two points of
    /// the grid.
    pub fn new(grid: &Grid, bound: i64) -> Self {
        let rx = ((grid.counts()[0] - 1) as i64).min(isqrt_ceil(bound));
        let ry = if grid.dim() == 2 { ((grid.counts()[1] - 1) as i64).min(isqrt_ceil(bound)) } else { 0 };
        let mut offsets = Vec::new();
        for dy in -ry..=ry {
            for dx in -rx..=rx {
                let d2 = dx * dx + dy * dy;
                if d2 > 0 && d2 < bound {
                    offsets.push([dx, dy]);
                }
            }
        }
        offsets.sort_by_key(|o| (o[0] * o[0] + o[1] * o[1], o[1], o[0]));
        let d2: Vec<i64> = offsets.iter().map(|o| o[0] * o[0] + o[1] * o[1]).collect();
        let dist = d2.iter().map(|&v| units_to_distance(v, grid.h())).collect();
        let mut level_starts = Vec::new();
        let mut levels = Vec::new();
        for (k, &v) in d2.iter().enumerate() {
            if levels.last() != Some(&v) {
                levels.push(v);
                level_starts.push(k);
            }
        }
        level_starts.push(d2.len());
        Stencil { offsets, d2, dist, level_starts, levels }
    }

    /// Number of distinct levels strictly below `d2`.
    pub fn levels_below(&self, d2: i64) -> usize {
        self.levels.partition_point(|&l| l < d2)
    }
}

/// Largest `r >= 0` with `r * r <= v`; `-1` for negative `v`.
pub(crate) fn isqrt_floor(v: i64) -> i64 {
    if v < 0 {
        return -1;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// Number of grid points strictly inside both `B(x, r)` and `B(x + o, r)`,
/// `r^2 = |o|^2`, counted row by row and clipped to the grid. Neither center
/// is ever inside the other ball, so no exclusion is needed.
pub(crate) fn lens_count(grid: &Grid, mi: [usize; 2], o: [i64; 2]) -> u64 {
    let d = o[0] * o[0] + o[1] * o[1];
    let c = grid.counts();
    let (xlo, xhi) = (-(mi[0] as i64), c[0] as i64 - 1 - mi[0] as i64);
    let reach = isqrt_floor(d - 1);
    let (ylo, yhi) = if grid.dim() == 2 {
        ((-reach).max(-(mi[1] as i64)), reach.min(c[1] as i64 - 1 - mi[1] as i64))
    } else {
        (0, 0)
    };
    let mut count = 0u64;
    for dy in ylo..=yhi {
        let s1 = isqrt_floor(d - dy * dy - 1);
        let s2 = isqrt_floor(d - (dy - o[1]) * (dy - o[1]) - 1);
        if s1 < 0 || s2 < 0 {
            continue;
        }
        let lo = (-s1).max(o[0] - s2).max(xlo);
        let hi = s1.min(o[0] + s2).min(xhi);
        if hi >= lo {
            count += (hi - lo + 1) as u64;
        }
    }
    count
}

/// Lattice lens count on an unbounded lattice of dimension `dim`.
pub(crate) fn lattice_lens_count(dim: usize, o: [i64; 2]) -> u64 {
    let d = o[0] * o[0] + o[1] * o[1];
    let reach = isqrt_floor(d - 1);
    let (ylo, yhi) = if dim == 2 { (-reach, reach) } else { (0, 0) };
    let mut count = 0u64;
    for dy in ylo..=yhi {
        let s1 = isqrt_floor(d - dy * dy - 1);
        let s2 = isqrt_floor(d - (dy - o[1]) * (dy - o[1]) - 1);
        if s1 < 0 || s2 < 0 {
            continue;
        }
        let lo = (-s1).max(o[0] - s2);
        let hi = s1.min(o[0] + s2);
        if hi >= lo {
            count += (hi - lo + 1) as u64;
        }
    }
    count
}

/// Lattice points `z != 0` with `|z|^2 < d`.
pub(crate) fn lattice_ball_count(dim: usize, d: i64) -> u64 {
    let reach = isqrt_floor(d - 1);
    let (ylo, yhi) = if dim == 2 { (-reach, reach) } else { (0, 0) };
    let mut count = 0u64;
    for dy in ylo..=yhi {
        let s = isqrt_floor(d - dy * dy - 1);
        if s >= 0 {
            count += (2 * s + 1) as u64;
        }
    }
    count.saturating_sub(if d > 0 { 1 } else { 0 })
}

pub(crate) fn isqrt_ceil(v: i64) -> i64 {
    let mut r = (v.max(0) as f64).sqrt() as i64;
    while r * r < v {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= v {
        r -= 1;
    }
    r
}

/// Largest ladder index `j` with `j * h <= cap`, or the index whose ball
/// covers the whole grid when uncapped.
pub(crate) fn ladder_j_max(grid: &Grid, cap: Option<f64>) -> i64 {
    let full = isqrt_ceil(grid.max_dist2_units()) + 1;
    match cap {
        None => full,
        Some(c) => (((c / grid.h()) * (1.0 + 1e-12)).floor() as i64).min(full).max(0),
    }
}

/// Offset position check and target index without re-deriving the
/// multi-index of the center for every offset.
#[inline]
pub(crate) fn shift_from(grid: &Grid, mi: [usize; 2], off: [i64; 2]) -> Option<usize> {
    let c = grid.counts();
    let nx = mi[0] as i64 + off[0];
    if nx < 0 || nx >= c[0] as i64 {
        return None;
    }
    if grid.dim() == 1 {
        return Some(nx as usize);
    }
    let ny = mi[1] as i64 + off[1];
    if ny < 0 || ny >= c[1] as i64 {
        return None;
    }
    Some(nx as usize + c[0] * ny as usize)
}

/// Supremum over ladder radii `j*h`, `1 <= j <= j_max`, of the average of
/// `term(z, k)` over on-grid offsets `k` with `d2 < j^2`. With `center =
/// Some(v)` the center contributes `v` to every average. Radii whose ball is
/// empty are skipped; `None` when every ball is empty.
pub(crate) fn ladder_sup(
    grid: &Grid,
    stencil: &Stencil,
    x: usize,
    j_max: i64,
    center: Option<f64>,
    mut term: impl FnMut(usize, usize) -> f64,
) -> Option<f64> {
    let mi = grid.multi_index(x);
    let mut sum = center.unwrap_or(0.0);
    let mut count: u64 = center.is_some() as u64;
    let mut best: Option<f64> = None;
    let mut recorded: u64 = 0;
    let mut j: i64 = 1;
    let record = |sum: f64, count: u64, best: &mut Option<f64>, recorded: &mut u64| {
        if count > 0 && count != *recorded {
            let avg = sum / count as f64;
            if best.map_or(true, |b| avg > b) {
                *best = Some(avg);
            }
            *recorded = count;
        }
    };
    'outer: for k in 0..stencil.offsets.len() {
        let d2 = stencil.d2[k];
        while d2 >= j * j {
            if j > j_max {
                break 'outer;
            }
            record(sum, count, &mut best, &mut recorded);
            j += 1;
        }
        if j > j_max {
            break;
        }
        if let Some(z) = shift_from(grid, mi, stencil.offsets[k]) {
            sum += term(z, k);
            count += 1;
        }
    }
    if j <= j_max {
        record(sum, count, &mut best, &mut recorded);
    }
    best
}

/// Cumulative sums of `term` per distinct stencil level around one point,
/// in stencil order. Entry `i` covers all offsets on levels `0..=i`.
pub(crate) struct BallProfile {
    pub cum_sum: Vec<f64>,
    pub cum_count: Vec<u32>,
}

impl BallProfile {
    pub fn build(
        grid: &Grid,
        stencil: &Stencil,
        x: usize,
        n_levels: usize,
        mut term: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mi = grid.multi_index(x);
        let n_levels = n_levels.min(stencil.levels.len());
        let mut cum_sum = Vec::with_capacity(n_levels);
        let mut cum_count = Vec::with_capacity(n_levels);
        let mut sum = 0.0;
        let mut count = 0u32;
        for level in 0..n_levels {
            for k in stencil.level_starts[level]..stencil.level_starts[level + 1] {
                if let Some(z) = shift_from(grid, mi, stencil.offsets[k]) {
                    sum += term(z, k);
                    count += 1;
                }
            }
            cum_sum.push(sum);
            cum_count.push(count);
        }
        BallProfile { cum_sum, cum_count }
    }

    /// `(sum, count)` over the open ball of squared radius `d2` (center
    /// excluded), or `None` if the profile does not reach that far.
    pub fn below(&self, stencil: &Stencil, d2: i64) -> Option<(f64, u32)> {
        let n = stencil.levels_below(d2);
        if n == 0 {
            return Some((0.0, 0));
        }
        if n > self.cum_sum.len() {
            return None;
        }
        Some((self.cum_sum[n - 1], self.cum_count[n - 1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens_and_ball_counts_match_enumeration() {
        let g = Grid::new(2, &[0.0, 0.0], &[4.0, 3.0], 0.25).unwrap();
        for x in [0usize, 7, 100, 150, g.len() - 1] {
            let mi = g.multi_index(x);
            for o in [[1i64, 0i64], [2, 1], [-3, 2], [0, -4], [5, 5]] {
                let Some(y) = g.shift(x, o) else { continue };
                let brute = crate::grid::lens_indices(&g, x, y).unwrap().len() as u64;
                assert_eq!(lens_count(&g, mi, o), brute, "x={x} o={o:?}");
            }
        }
        let g1 = Grid::new(1, &[0.0], &[3.0], 0.25).unwrap();
        assert_eq!(lens_count(&g1, [2, 0], [5, 0]), 4);
        assert_eq!(lattice_lens_count(1, [7, 0]), 6);
        assert_eq!(lattice_ball_count(1, 49), 12);
        assert_eq!(lattice_ball_count(2, 2), 4);
        assert_eq!(lattice_ball_count(2, 5), 12);
        for o in [[3i64, 0i64], [4, 2], [6, 6]] {
            let brute = crate::grid::lattice_lens_count(o) as u64;
            assert_eq!(lattice_lens_count(2, o), brute);
        }
    }

    #[test]
    fn isqrt_ceil_values() {
        assert_eq!(isqrt_floor(0), 0);
        assert_eq!(isqrt_floor(8), 2);
        assert_eq!(isqrt_floor(9), 3);
        assert_eq!(isqrt_floor(-1), -1);
        assert_eq!(isqrt_ceil(0), 0);
        assert_eq!(isqrt_ceil(1), 1);
        assert_eq!(isqrt_ceil(2), 2);
        assert_eq!(isqrt_ceil(16), 4);
        assert_eq!(isqrt_ceil(17), 5);
    }

    #[test]
    fn stencil_is_sorted_and_grouped() {
        let g = Grid::new(2, &[0.0, 0.0], &[2.0, 2.0], 0.25).unwrap();
        let s = Stencil::new(&g, 10);
        assert!(s.d2.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(s.levels, vec![1, 2, 4, 5, 8, 9]);
        assert_eq!(s.level_starts.len(), s.levels.len() + 1);
        assert_eq!(s.levels_below(5), 3);
    }

    #[test]
    fn ladder_sup_matches_brute_force() {
        let g = Grid::new(2, &[0.0, 0.0], &[1.0, 1.0], 0.125).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|i| ((i * 37) % 11) as f64).collect();
        let jm = ladder_j_max(&g, None);
        let s = Stencil::new(&g, jm * jm);
        for x in [0usize, 10, 40] {
            let got = ladder_sup(&g, &s, x, jm, Some(vals[x]), |z, _| vals[z]).unwrap();
            let mut best = 0.0f64;
            for j in 1..=jm {
                let members: Vec<usize> = (0..g.len()).filter(|&z| g.dist2_units(x, z) < j * j).collect();
                let avg = members.iter().map(|&z| vals[z]).sum::<f64>() / members.len() as f64;
                best = best.max(avg);
            }
            assert!((got - best).abs() < 1e-12);
        }
    }
}
