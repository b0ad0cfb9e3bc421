//! The computations behind each subcommand. Every function returns a
//! [`Table`] whose row order follows the input grids.

use clap::ValueEnum;
use dispersia::exponents::{blocklength_dispersion, blocklength_exponent};
use dispersia::oracles::{binning_simulator, SimConfig};
use dispersia::probkit::{mvn_lower_orthant, q_inv};
use dispersia::regions::{trace_boundary, BoundaryPolyline, Correction, RegionQuery, RegionSource, Side};
use dispersia::solvers::{classify, local_dispersion, BoundaryCase};
use dispersia::{CovMatrix, EntropyTriple, JointPmf2, SwDispersion};
use rayon::prelude::*;

use crate::grid::Grid;
use crate::problem::{Kind, Stats};
use crate::table::Table;
use crate::{invalid, Error, Result};

/// Largest integer the 12-digit CSV format holds exactly.
pub const MAX_EXACT_INT: u64 = 999_999_999_999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    SwInner,
    SwOuter,
    SwSied,
    MacInner,
    AbcInner,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::SwInner => Side::SwInner,
            SideArg::SwOuter => Side::SwOuter,
            SideArg::SwSied => Side::SwSied,
            SideArg::MacInner => Side::MacInner,
            SideArg::AbcInner => Side::AbcInner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum CorrectionArg {
    Log,
    #[default]
    None,
}

impl From<CorrectionArg> for Correction {
    fn from(c: CorrectionArg) -> Correction {
        match c {
            CorrectionArg::Log => Correction::WithLogTerms,
            CorrectionArg::None => Correction::GaussianOnly,
        }
    }
}

/// Boundary location for `local-disp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Point {
    Vertical,
    Horizontal,
    SumRate,
    UpperCorner,
    #[default]
    LowerCorner,
}

fn sw_parts(stats: &Stats) -> Result<(&JointPmf2, &EntropyTriple, &SwDispersion)> {
    match stats {
        Stats::Sw { pmf, h, d } => Ok((pmf, h, d)),
        Stats::Net { kind, .. } => invalid(format!("this command needs an sw problem, got {kind:?}")),
    }
}

pub fn region(
    stats: &Stats,
    n: u64,
    epsilon: f64,
    side: Option<SideArg>,
    correction: CorrectionArg,
    grid: Option<Grid>,
) -> Result<BoundaryPolyline> {
    let (src, default_side, default_hi) = match stats {
        Stats::Sw { h, d, .. } => (RegionSource::Sw(h, d), SideArg::SwInner, h.h12),
        Stats::Net { kind, info } => {
            let s = if *kind == Kind::Mac { SideArg::MacInner } else { SideArg::AbcInner };
            (RegionSource::Net(info), s, info.i[0])
        }
    };
    let side = side.unwrap_or(default_side);
    let ok = match stats {
        Stats::Sw { .. } => matches!(side, SideArg::SwInner | SideArg::SwOuter | SideArg::SwSied),
        Stats::Net { kind: Kind::Mac, .. } => side == SideArg::MacInner,
        Stats::Net { .. } => side == SideArg::AbcInner,
    };
    if !ok {
        return invalid(format!("side {side:?} does not match the problem"));
    }
    let grid = match grid {
        Some(g) => g,
        None => Grid::new(0.0, default_hi.max(1e-6), 101)?,
    };
    let q = RegionQuery::new(n, epsilon, correction.into(), side.into())?;
    Ok(trace_boundary(src, &q, &grid.values(), None)?)
}

pub fn region_table(poly: &BoundaryPolyline) -> Table {
    let mut t = Table::new(&["R1", "R2"]);
    for &(a, b) in &poly.points {
        t.push(vec![Some(a), Some(b)]);
    }
    t
}

/// The rate pair `local-disp` evaluates at for a given selector.
pub fn point_rates(h: &EntropyTriple, point: Point, offset: f64) -> (f64, f64) {
    let h1 = h.h12 - h.h2g1;
    let h2 = h.h12 - h.h1g2;
    match point {
        Point::Vertical => (h.h1g2, h2 + offset),
        Point::Horizontal => (h1 + offset, h.h2g1),
        Point::SumRate => {
            let r1 = 0.5 * (h.h1g2 + h1);
            (r1, h.h12 - r1)
        }
        Point::UpperCorner => (h.h1g2, h2),
        Point::LowerCorner => (h1, h.h2g1),
    }
}

pub fn default_theta_grid(case: BoundaryCase) -> Grid {
    let (lo, hi) = case.angle_range();
    Grid { start: lo + 0.05, stop: hi - 0.05, count: 61 }
}

pub fn local_disp(
    stats: &Stats,
    point: Point,
    rates: Option<(f64, f64)>,
    offset: f64,
    theta: Option<Grid>,
    epsilons: &[f64],
) -> Result<Table> {
    let (_, h, d) = sw_parts(stats)?;
    if !(offset > 0.0) {
        return invalid("offset must be positive");
    }
    let (r1, r2) = rates.unwrap_or_else(|| point_rates(h, point, offset));
    let case = classify(h, r1, r2)?;
    let thetas = theta.unwrap_or_else(|| default_theta_grid(case)).values();
    let jobs: Vec<(f64, f64)> = epsilons
        .iter()
        .flat_map(|&e| thetas.iter().map(move |&t| (e, t)))
        .collect();
    let out: Vec<f64> = jobs
        .par_iter()
        .map(|&(e, t)| local_dispersion(h, &d.v, r1, r2, t, e).map(|r| r.f))
        .collect::<dispersia::Result<_>>()?;
    let mut t = Table::new(&["theta", "epsilon", "F"]);
    for (&(e, th), f) in jobs.iter().zip(out) {
        t.push(vec![Some(th), Some(e), Some(f)]);
    }
    Ok(t)
}

/// `n_D` and `n_E` at `R_j = (1+η) H(X_j | X_other)`. Points whose rates are
/// not inside the asymptotic region get empty fields.
pub fn blocklength(stats: &Stats, eta: Grid, epsilons: &[f64]) -> Result<Table> {
    let (pmf, h, d) = sw_parts(stats)?;
    let jobs: Vec<(f64, f64)> = eta
        .values()
        .into_iter()
        .flat_map(|x| epsilons.iter().map(move |&e| (x, e)))
        .collect();
    let infeasible_as_none = |r: dispersia::Result<u64>| match r {
        Ok(n) => Ok(Some(n as f64)),
        Err(dispersia::Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let out: Vec<(Option<f64>, Option<f64>)> = jobs
        .par_iter()
        .map(|&(x, e)| {
            let (r1, r2) = ((1.0 + x) * h.h1g2, (1.0 + x) * h.h2g1);
            if !(r1 + r2 > h.h12) {
                return Ok((None, None));
            }
            let nd = infeasible_as_none(blocklength_dispersion(h, &d.v, e, r1, r2))?;
            let ne = infeasible_as_none(blocklength_exponent(pmf, e, r1, r2))?;
            Ok((nd, ne))
        })
        .collect::<dispersia::Result<_>>()?;
    let mut t = Table::new(&["eta", "epsilon", "n_D", "n_E"]);
    for (&(x, e), (nd, ne)) in jobs.iter().zip(out) {
        t.push(vec![Some(x), Some(e), nd, ne]);
    }
    Ok(t)
}

pub fn simulate(stats: &Stats, n: u64, r1: f64, r2: f64, trials: u64, seed: u64) -> Result<Table> {
    let (pmf, _, _) = sw_parts(stats)?;
    if seed > MAX_EXACT_INT || trials > MAX_EXACT_INT {
        return invalid(format!("seed and trials must not exceed {MAX_EXACT_INT}"));
    }
    let n_usize = usize::try_from(n).map_err(|_| Error::Invalid("n too large".into()))?;
    let cfg = SimConfig::new(n_usize, trials, seed)?;
    let rep = binning_simulator(pmf, r1, r2, &cfg)?;
    let mut t = Table::new(&["n", "R1", "R2", "trials", "seed", "estimate", "stderr", "exhaustive"]);
    t.push(vec![
        Some(n as f64),
        Some(r1),
        Some(r2),
        Some(rep.trials as f64),
        Some(rep.seed as f64),
        Some(rep.estimate),
        Some(rep.stderr),
        Some(if rep.exhaustive { 1.0 } else { 0.0 }),
    ]);
    Ok(t)
}

/// Parse a 2×2 covariance written `a,b;c,d`, or one of the names `sv-left`
/// (correlation 0.01) and `sv-right` (correlation 0.96).
pub fn parse_cov2(s: &str) -> Result<CovMatrix> {
    let m = match s.trim() {
        "sv-left" => [[1.0, 0.01], [0.01, 1.0]],
        "sv-right" => [[1.0, 0.96], [0.96, 1.0]],
        text => {
            let rows: Vec<Vec<f64>> = text
                .split(';')
                .map(|r| r.split(',').map(|x| x.trim().parse::<f64>()).collect())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Invalid(format!("cannot parse covariance `{text}`")))?;
            if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
                return invalid("covariance must be 2x2, written a,b;c,d");
            }
            [[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]]
        }
    };
    Ok(CovMatrix::from_array2(m)?)
}

/// Points of `{z : P(Z ≤ z) = 1−ε}` for `Z ~ N(0, V)`, traced along rays from
/// a far point on the diagonal. Angles run over `(0, π/2)`.
pub fn sv_curve(v: &CovMatrix, epsilon: f64, count: usize) -> Result<Vec<(f64, f64)>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return invalid(format!("epsilon {epsilon} outside (0,1)"));
    }
    if v.dim() != 2 {
        return invalid("sv-set needs a 2x2 covariance");
    }
    if count < 3 {
        return invalid("need at least 3 curve points");
    }
    let sig = v.get(0, 0).max(v.get(1, 1)).sqrt();
    if !(sig > 0.0) {
        return Err(dispersia::Error::Degenerate("zero covariance".into()).into());
    }
    let far = sig * (q_inv(epsilon / 4.0)?.max(0.0) + 4.0);
    let target = 1.0 - epsilon;
    let (min_a, max_a) = (1e-3, std::f64::consts::FRAC_PI_2 - 1e-3);
    (0..count)
        .into_par_iter()
        .map(|k| {
            let a = min_a + (max_a - min_a) * k as f64 / (count - 1) as f64;
            let (dx, dy) = (-a.cos(), -a.sin());
            let g = |r: f64| -> Result<f64> { Ok(mvn_lower_orthant(v, &[far + r * dx, far + r * dy])? - target) };
            let mut hi = sig;
            while g(hi)? > 0.0 {
                hi *= 2.0;
                if hi > 1e6 * sig {
                    return Err(Error::Core(dispersia::Error::NonConvergence { what: "sv-set ray", estimate: hi }));
                }
            }
            let mut lo = 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-13 * sig {
                    break;
                }
            }
            let r = 0.5 * (lo + hi);
            Ok((far + r * dx, far + r * dy))
        })
        .collect()
}

pub fn sv_set(v: &CovMatrix, epsilons: &[f64], n_list: &[u64], count: usize) -> Result<Table> {
    let mut t = Table::new(&["epsilon", "n", "z1", "z2"]);
    for &e in epsilons {
        let curve = sv_curve(v, e, count)?;
        for &n in n_list {
            if n == 0 || n > MAX_EXACT_INT {
                return invalid(format!("n = {n} out of range"));
            }
            let s = (n as f64).sqrt();
            for &(a, b) in &curve {
                t.push(vec![Some(e), Some(n as f64), Some(a / s), Some(b / s)]);
            }
        }
    }
    Ok(t)
}
