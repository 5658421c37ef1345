//! Luzin-type Lipschitz approximation: sublevel sets of a metric gradient,
//! the Tschebyscheff bound on their complements, and McShane extension off
//! the sublevel set.

use rayon::prelude::*;
use serde::Serialize;

use crate::ddouble::DoubleDouble;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::maximal::ScalarField;
use crate::meanquotient::{lens_constant, mq_field, InequalityReport};
use crate::pairs::{scan_pairs, Outcome, PairSampling};

/// `E_L = {x : g(x) <= L}` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSet {
    #[serde(skip)]
    grid: Grid,
    #[serde(skip)]
    members: Vec<bool>,
    pub level: f64,
    pub member_count: usize,
    /// `h^n` times the number of points outside the set.
    pub complement_measure: f64,
}

impl LevelSet {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members[index]
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i]).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.member_count == 0
    }
}

pub fn sublevel_set(g: &ScalarField, level: f64) -> Result<LevelSet> {
    if !(level >= 0.0) {
        return Err(Error::InvalidParameter(format!("level must be nonnegative, got {level}")));
    }
    let members: Vec<bool> = g.values().iter().map(|&v| v <= level).collect();
    let member_count = members.iter().filter(|&&m| m).count();
    let grid = g.grid().clone();
    let complement_measure = (members.len() - member_count) as f64 * grid.cell_measure();
    Ok(LevelSet { grid, members, level, member_count, complement_measure })
}

/// One rung of the Tschebyscheff check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TschebyscheffRung {
    pub level: f64,
    pub complement_measure: f64,
    /// `||g||_1 / L`.
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TschebyscheffReport {
    pub l1_norm: f64,
    pub rungs: Vec<TschebyscheffRung>,
    pub monotone: bool,
    pub pass: bool,
}

/// `|CE_L| <= ||g||_1 / L` on every rung, and `|CE_L|` nonincreasing along
/// the ladder. The comparison `#{g > L} L <= sum g` is made in double-double
/// so the sum's rounding cannot flip it.
pub fn tschebyscheff_check(g: &ScalarField, ladder: &[f64]) -> Result<TschebyscheffReport> {
    if ladder.is_empty() {
        return Err(Error::InvalidParameter("the level ladder is empty".into()));
    }
    if ladder.iter().any(|&l| !(l > 0.0)) || ladder.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("levels must be positive and increasing".into()));
    }
    let cell = g.grid().cell_measure();
    let sum = g.values().iter().fold(DoubleDouble::ZERO, |acc, &v| acc + DoubleDouble::from(v));
    let l1_norm = (sum * DoubleDouble::from(cell)).to_f64();
    let mut rungs = Vec::with_capacity(ladder.len());
    for &level in ladder {
        let set = sublevel_set(g, level)?;
        let outside = (g.values().len() - set.member_count) as f64;
        let lhs = DoubleDouble::from(outside) * DoubleDouble::from(level);
        rungs.push(TschebyscheffRung {
            level,
            complement_measure: set.complement_measure,
            bound: l1_norm / level,
            pass: (sum - lhs).hi >= 0.0,
        });
    }
    let monotone = rungs.windows(2).all(|w| w[1].complement_measure <= w[0].complement_measure);
    let pass = monotone && rungs.iter().all(|r| r.pass);
    Ok(TschebyscheffReport { l1_norm, rungs, monotone, pass })
}

/// McShane extension and how far it moved `f` on the kept set.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub values: GridFunction,
    pub lambda: f64,
    /// `max_{x∈E} |f̃(x) - f(x)|`; zero when `f` is `λ`-Lipschitz on `E`.
    pub agreement_defect: f64,
    /// `|f(e)| + λ |x - e|` for the minimizing `e`, which bounds the rounding
    /// error of `f̃(x)`.
    pub magnitudes: Vec<f64>,
}

/// `f̃(x) = min_{y∈E} f(y) + λ |x - y|`.
pub fn mcshane_extend(f: &GridFunction, set: &LevelSet, lambda: f64) -> Result<Extension> {
    let grid = f.grid();
    if grid != set.grid() {
        return Err(Error::GridMismatch);
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let kept = set.indices();
    if kept.is_empty() {
        return Err(Error::EmptySet("the kept set of the extension is empty".into()));
    }
    let v = f.values();
    let (ext, magnitudes): (Vec<f64>, Vec<f64>) = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let mut best = (f64::INFINITY, 0.0);
            for &y in &kept {
                let step = lambda * grid.distance(x, y);
                let val = v[y] + step;
                if val < best.0 {
                    best = (val, v[y].abs() + step);
                }
            }
            best
        })
        .unzip();
    let agreement_defect = kept.iter().map(|&x| (ext[x] - v[x]).abs()).fold(0.0, f64::max);
    Ok(Extension { values: GridFunction::new(grid.clone(), ext)?, lambda, agreement_defect, magnitudes })
}

/// Largest `|f(x) - f(y)| / |x - y|` over all pairs.
pub fn lipschitz_constant(f: &GridFunction) -> f64 {
    let grid = f.grid();
    let v = f.values();
    (0..grid.len())
        .into_par_iter()
        .map(|x| (x + 1..grid.len()).map(|y| (v[x] - v[y]).abs() / grid.distance(x, y)).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

/// Relative rounding allowance for one McShane value.
const ROUNDING: f64 = 4.0 * f64::EPSILON;

/// `|f(x) - f(y)| <= λ |x - y|` over pairs. Only rounding is allowed for:
/// `magnitudes[x]` bounds the terms that produced `f(x)` (see
/// [`Extension::magnitudes`]); `None` uses `|f(x)|`.
pub fn lipschitz_check(
    f: &GridFunction,
    lambda: f64,
    magnitudes: Option<&[f64]>,
    sampling: PairSampling,
) -> Result<InequalityReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let grid = f.grid();
    let v = f.values();
    let own: Vec<f64>;
    let mag = match magnitudes {
        Some(m) if m.len() == v.len() => m,
        Some(m) => return Err(Error::LengthMismatch { expected: v.len(), got: m.len() }),
        None => {
            own = v.iter().map(|t| t.abs()).collect();
            &own
        }
    };
    let points: Vec<usize> = (0..grid.len()).collect();
    let scan = scan_pairs(&points, sampling, |x, y| grid.distance(x, y), grid.diameter(), |x, y| {
        let d = grid.distance(x, y);
        let num = (v[x] - v[y]).abs();
        let allowance = ROUNDING * (1.0 + (mag[x] + mag[y]) / (lambda * d));
        let ratio = num / d;
        Outcome::Value { score: ratio / (lambda * (1.0 + allowance)), ratio, tol: allowance }
    });
    let mut rep = InequalityReport::from_scan("lipschitz", |i| grid.point(i), lambda, scan);
    rep.detail("lambda", lambda);
    Ok(rep)
}

/// Result of one run of the approximation pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuzinReport {
    #[serde(rename = "L")]
    pub level: f64,
    pub lambda: f64,
    pub exceptional_measure: f64,
    /// Measured Lipschitz constant of the approximant.
    pub lipschitz_witness: f64,
    pub agreement_defect: f64,
    pub kept_points: usize,
    /// The approximant is `λ`-Lipschitz over all pairs.
    pub lipschitz_pass: bool,
    #[serde(skip)]
    pub approximant: GridFunction,
}

/// `MQ f` → `E_L` → McShane extension with `λ = 2 c(n) L`.
pub fn luzin_pipeline(f: &GridFunction, level: f64) -> Result<LuzinReport> {
    let g = mq_field(f, None).base;
    luzin_with_gradient(f, &g, level)
}

/// The pipeline for a precomputed metric gradient `g`.
pub fn luzin_with_gradient(f: &GridFunction, g: &ScalarField, level: f64) -> Result<LuzinReport> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let set = sublevel_set(g, level)?;
    if set.is_empty() {
        return Err(Error::EmptySet(format!("E_L is empty for L = {level}")));
    }
    let lambda = 2.0 * lens_constant(f.grid().dim())? * level;
    let ext = mcshane_extend(f, &set, lambda)?;
    let check = lipschitz_check(&ext.values, lambda, Some(&ext.magnitudes), PairSampling { budget: u64::MAX, seed: 0 })?;
    Ok(LuzinReport {
        level,
        lambda,
        exceptional_measure: set.complement_measure,
        lipschitz_witness: lipschitz_constant(&ext.values),
        agreement_defect: ext.agreement_defect,
        kept_points: set.member_count,
        lipschitz_pass: check.pass,
        approximant: ext.values,
    })
}

/// The pipeline over a ladder of levels, sharing one `MQ f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuzinLadder {
    pub rungs: Vec<LuzinReport>,
    pub tschebyscheff: TschebyscheffReport,
    /// Exceptional measure nonincreasing in `L`.
    pub monotone: bool,
    pub pass: bool,
}

/// Levels for which `E_L` is empty are rejected.
pub fn luzin_ladder(f: &GridFunction, ladder: &[f64]) -> Result<LuzinLadder> {
    let g = mq_field(f, None).base;
    let tschebyscheff = tschebyscheff_check(&g, ladder)?;
    let rungs = ladder.iter().map(|&l| luzin_with_gradient(f, &g, l)).collect::<Result<Vec<_>>>()?;
    let monotone = rungs.windows(2).all(|w| w[1].exceptional_measure <= w[0].exceptional_measure);
    let pass = monotone && tschebyscheff.pass && rungs.iter().all(|r| r.lipschitz_pass);
    Ok(LuzinLadder { rungs, tschebyscheff, monotone, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, TestFunction};
    use proptest::prelude::*;

    fn line(lo: f64, len: f64, h: f64) -> Grid {
        Grid::new(1, &[lo], &[len], h).unwrap()
    }

    #[test]
    fn sublevel_examples() {
        let g = line(0.0, 1.0, 0.25);
        let zero = ScalarField::constant(&g, 0.0, "z").unwrap();
        let s = sublevel_set(&zero, 1.0).unwrap();
        assert_eq!(s.member_count, 5);
        assert_eq!(s.complement_measure, 0.0);
        let two = ScalarField::constant(&g, 2.0, "two").unwrap();
        let s = sublevel_set(&two, 1.0).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.complement_measure, 5.0 * 0.25);
        assert!(sublevel_set(&two, -1.0).is_err());
    }

    #[test]
    fn cusp_complement_sits_at_the_cusp() {
        let g = line(-1.0, 2.0, 0.01);
        let f = sample(&TestFunction::HolderCusp { alpha: 0.5 }, &g).unwrap();
        let mq = mq_field(&f, None).base;
        let s = sublevel_set(&mq, 8.0).unwrap();
        assert!(s.member_count < g.len());
        for i in 0..g.len() {
            if !s.contains(i) {
                assert!(g.point(i)[0].abs() < 0.05, "outside point at {}", g.point(i)[0]);
            }
        }
    }

    #[test]
    fn tschebyscheff_examples() {
        let g = line(0.0, 1.0, 0.125);
        let one = ScalarField::constant(&g, 1.0, "one").unwrap();
        let rep = tschebyscheff_check(&one, &[0.5, 2.0]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.rungs[0].complement_measure, 9.0 * 0.125);
        assert_eq!(rep.rungs[1].complement_measure, 0.0);
        assert!(tschebyscheff_check(&one, &[2.0, 1.0]).is_err());
        assert!(tschebyscheff_check(&one, &[]).is_err());
    }

    #[test]
    fn mcshane_examples() {
        let g = line(-1.0, 2.0, 0.1);
        let f = sample(&TestFunction::Polynomial { coeffs: vec![0.0, 0.5, 1.0] }, &g).unwrap();
        let all = sublevel_set(&ScalarField::constant(&g, 0.0, "z").unwrap(), 0.0).unwrap();
        let lip = lipschitz_constant(&f);
        let ext = mcshane_extend(&f, &all, lip * 1.01).unwrap();
        assert_eq!(ext.values.values(), f.values());
        assert_eq!(ext.agreement_defect, 0.0);
        let c = sample(&TestFunction::Polynomial { coeffs: vec![3.0] }, &g).unwrap();
        let mut flags = ScalarField::constant(&g, 5.0, "g").unwrap().values().to_vec();
        flags[7] = 0.0;
        let one = sublevel_set(&ScalarField::new(g.clone(), flags, "g").unwrap(), 1.0).unwrap();
        let ext = mcshane_extend(&c, &one, 2.0).unwrap();
        assert_eq!(ext.values.value(7), 3.0);
        assert!(ext.values.values().iter().all(|&v| v >= 3.0));
        let none = sublevel_set(&ScalarField::constant(&g, 5.0, "g").unwrap(), 1.0).unwrap();
        assert!(matches!(mcshane_extend(&c, &none, 1.0), Err(Error::EmptySet(_))));
    }

    #[test]
    fn cusp_pipeline() {
        let g = line(-1.0, 2.0, 0.01);
        let f = sample(&TestFunction::HolderCusp { alpha: 0.5 }, &g).unwrap();
        let ladder = luzin_ladder(&f, &[2.0, 4.0, 8.0, 16.0, 32.0]).unwrap();
        assert!(ladder.pass, "{ladder:?}");
        for r in &ladder.rungs {
            assert_eq!(r.agreement_defect, 0.0, "{r:?}");
            assert!(r.lipschitz_witness <= r.lambda * (1.0 + 1e-12));
        }
        assert!(ladder.rungs[4].exceptional_measure < ladder.rungs[0].exceptional_measure);
    }

    #[test]
    fn linear_pipeline_keeps_f() {
        let g = line(0.0, 1.0, 0.05);
        let f = sample(&TestFunction::Polynomial { coeffs: vec![1.0, -3.0] }, &g).unwrap();
        let rep = luzin_pipeline(&f, 3.0 * 1.001).unwrap();
        assert_eq!(rep.exceptional_measure, 0.0);
        assert_eq!(rep.approximant.values(), f.values());
        assert!(matches!(luzin_pipeline(&f, 1.0), Err(Error::EmptySet(_))));
    }

    proptest! {
        #[test]
        fn mcshane_is_lambda_lipschitz(vals in prop::collection::vec(-10.0f64..10.0, 2..40), keep in prop::collection::vec(any::<bool>(), 40), lambda in 0.1f64..20.0) {
            let n = vals.len();
            let g = line(0.0, (n - 1) as f64 * 0.1, 0.1);
            let f = GridFunction::new(g.clone(), vals.clone()).unwrap();
            let mut gv: Vec<f64> = (0..n).map(|i| if keep[i] { 0.0 } else { 1.0 }).collect();
            gv[0] = 0.0;
            let set = sublevel_set(&ScalarField::new(g.clone(), gv, "g").unwrap(), 0.5).unwrap();
            let ext = mcshane_extend(&f, &set, lambda).unwrap();
            let rep = lipschitz_check(&ext.values, lambda, Some(&ext.magnitudes), PairSampling::default()).unwrap();
            prop_assert!(rep.pass, "{:?}", rep);
            for i in set.indices() {
                prop_assert!(ext.values.value(i) <= vals[i]);
            }
        }
    }
}
