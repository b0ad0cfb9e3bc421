//! Second-order optimizers: the general constrained dispersion problem, local
//! dispersion at points of the asymptotic Slepian-Wolf boundary, and weighted
//! sum-rate dispersion.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::numeric::{brent, golden_min};
use crate::probkit::{mvn_lower_orthant, psi_raw, q_inv_raw, CovMatrix};
use crate::sw_stats::EntropyTriple;
use crate::{domain, invalid, Error, Result};

/// Tolerance used to decide which asymptotic constraints are tight.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Largest allowed `|P − (1−ε)|` at a returned solution.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Minimize `cᵀu` subject to `P(Z_N ≤ A_N u) = 1−ε`, `Z ~ N(0, V)`.
///
/// Constraint indices are 0-based: 0 and 1 use the rows of `a`, 2 uses their
/// sum.
#[derive(Debug, Clone, PartialEq)]
pub struct GenDispProblem {
    pub c: Vec<f64>,
    pub a: [Vec<f64>; 2],
    pub active: Vec<usize>,
    pub v: CovMatrix,
    pub epsilon: f64,
}

impl GenDispProblem {
    pub fn k(&self) -> usize {
        self.c.len()
    }

    fn row(&self, j: usize) -> Vec<f64> {
        match j {
            0 => self.a[0].clone(),
            1 => self.a[1].clone(),
            _ => self.a[0].iter().zip(&self.a[1]).map(|(x, y)| x + y).collect(),
        }
    }

    fn validate(&self) -> Result<Vec<usize>> {
        let k = self.k();
        if k == 0 {
            return invalid("c must have at least one entry");
        }
        if self.a.iter().any(|r| r.len() != k) {
            return invalid("rows of A must have the same length as c");
        }
        if self.c.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return invalid("c must be finite and nonnegative");
        }
        if self.a.iter().flatten().any(|x| !x.is_finite()) {
            return invalid("A must be finite");
        }
        if self.v.dim() != 3 {
            return invalid("V must be 3x3");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return domain(format!("epsilon {} outside (0,1)", self.epsilon));
        }
        let mut n = self.active.clone();
        n.sort_unstable();
        n.dedup();
        if n.is_empty() || n.len() != self.active.len() || n.iter().any(|&j| j > 2) {
            return invalid("active set must be a nonempty subset of {0, 1, 2}");
        }
        Ok(n)
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Solve a [`GenDispProblem`], returning the optimal `u`.
pub fn solve_gen_disp(p: &GenDispProblem) -> Result<Vec<f64>> {
    let n = p.validate()?;
    let q = q_inv_raw(p.epsilon);
    if n.len() == 1 {
        let j = n[0];
        let a = p.row(j);
        let vjj = p.v.get(j, j);
        let aa = dot(&a, &a);
        if vjj <= 0.0 || aa == 0.0 {
            return Err(Error::Infeasible(format!("constraint {j} cannot hold with probability 1-ε")));
        }
        let lam = dot(&p.c, &a) / aa;
        let off: f64 = p.c.iter().zip(&a).map(|(c, a)| (c - lam * a).powi(2)).sum::<f64>().sqrt();
        if off > 1e-12 * (1.0 + dot(&p.c, &p.c).sqrt()) {
            return Err(Error::Unbounded("c is not parallel to the active constraint".into()));
        }
        let t = vjj.sqrt() * q;
        return Ok(a.iter().map(|x| x * t / aa).collect());
    }
    let sub = p.v.sub(&n)?;
    if p.k() == 1 {
        return solve_scalar(p, &n, &sub);
    }
    solve_plane(p, &n, &sub, q)
}

fn solve_scalar(p: &GenDispProblem, n: &[usize], sub: &CovMatrix) -> Result<Vec<f64>> {
    let a: Vec<f64> = n.iter().map(|&j| p.row(j)[0]).collect();
    let target = 1.0 - p.epsilon;
    let g = |u: f64| -> Result<f64> {
        let z: Vec<f64> = a.iter().map(|x| x * u).collect();
        Ok(mvn_lower_orthant(sub, &z)? - target)
    };
    let amin = a.iter().filter(|x| **x != 0.0).fold(f64::INFINITY, |m, x| m.min(x.abs()));
    if !amin.is_finite() {
        return Err(Error::Infeasible("all active coefficients vanish".into()));
    }
    let smax = n.iter().map(|&j| p.v.get(j, j).sqrt()).fold(0.0, f64::max);
    let scale = 10.0 * smax.max(1e-300) / amin;
    let mut grid: Vec<f64> = (-30..=8).map(|k| scale * 2f64.powi(k)).collect();
    let neg: Vec<f64> = grid.iter().rev().map(|x| -x).collect();
    grid = neg.into_iter().chain(std::iter::once(0.0)).chain(grid).collect();
    let mut prev = (grid[0], g(grid[0])?);
    for &u in &grid[1..] {
        let gu = g(u)?;
        if gu == 0.0 {
            return Ok(vec![u]);
        }
        if prev.1.signum() != gu.signum() && prev.1 != 0.0 {
            let mut err = None;
            let root = brent(
                |x| match g(x) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                },
                prev.0,
                u,
                1e-15 * scale,
            )?;
            if let Some(e) = err {
                return Err(e);
            }
            let res = g(root)?;
            if res.abs() > RESIDUAL_TOL {
                return Err(Error::NonConvergence { what: "scalar dispersion constraint", estimate: res.abs() });
            }
            return Ok(vec![root]);
        }
        prev = (u, gu);
    }
    Err(Error::Infeasible("probability constraint has no solution along A".into()))
}

// Every k ≥ 2 problem is reduced to w = A u ∈ R², where the objective becomes d·w
// and constraint j reads Z_j ≤ m_j·w with m = (1,0), (0,1), (1,1).
fn solve_plane(p: &GenDispProblem, n: &[usize], sub: &CovMatrix, q: f64) -> Result<Vec<f64>> {
    let (a1, a2) = (&p.a[0], &p.a[1]);
    let g11 = dot(a1, a1);
    let g12 = dot(a1, a2);
    let g22 = dot(a2, a2);
    let det = g11 * g22 - g12 * g12;
    if det <= 1e-14 * (g11 * g22).max(1e-300) {
        return Err(Error::Unbounded("A must have full row rank".into()));
    }
    // d = (A Aᵀ)⁻¹ A c
    let b1 = dot(a1, &p.c);
    let b2 = dot(a2, &p.c);
    let d = [(g22 * b1 - g12 * b2) / det, (g11 * b2 - g12 * b1) / det];
    let off: f64 = p
        .c
        .iter()
        .enumerate()
        .map(|(i, c)| (c - d[0] * a1[i] - d[1] * a2[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    if off > 1e-10 * (1.0 + dot(&p.c, &p.c).sqrt()) {
        return Err(Error::Unbounded("c is not in the row space of A".into()));
    }
    let w = minimize_on_curve(n, sub, d, p.epsilon, q)?;
    // u = Aᵀ (A Aᵀ)⁻¹ w
    let y = [(g22 * w[0] - g12 * w[1]) / det, (g11 * w[1] - g12 * w[0]) / det];
    Ok((0..p.k()).map(|i| a1[i] * y[0] + a2[i] * y[1]).collect())
}

fn minimize_on_curve(n: &[usize], sub: &CovMatrix, d: [f64; 2], eps: f64, q: f64) -> Result<[f64; 2]> {
    let target = 1.0 - eps;
    // the free coordinate t, and the one solved for along the curve
    let ti = if n == [1, 2] { 1 } else { 0 };
    let si = 1 - ti;
    let pos_t = n.iter().position(|&j| j == ti).unwrap();
    let sig_t = sub.get(pos_t, pos_t).sqrt();
    if sig_t == 0.0 {
        return Err(Error::Degenerate("zero variance on an active constraint".into()));
    }
    let scale = (0..n.len()).map(|i| sub.get(i, i).sqrt()).fold(0.0, f64::max);
    let t_min = sig_t * q;
    let point = |t: f64, s: f64| {
        let mut w = [0.0; 2];
        w[ti] = t;
        w[si] = s;
        w
    };
    let g = |w: [f64; 2]| -> Result<f64> {
        let z: Vec<f64> = n
            .iter()
            .map(|&j| match j {
                0 => w[0],
                1 => w[1],
                _ => w[0] + w[1],
            })
            .collect();
        Ok(mvn_lower_orthant(sub, &z)? - target)
    };
    let phi = |t: f64| -> Result<Option<f64>> {
        let mut hi = scale;
        let mut k = 0;
        while g(point(t, hi))? < 0.0 {
            hi = hi.abs() * 2.0 + scale;
            k += 1;
            if k > 80 {
                return Ok(None);
            }
        }
        let mut lo = hi - scale;
        k = 0;
        while g(point(t, lo))? >= 0.0 {
            lo -= scale * 2f64.powi(k);
            k += 1;
            if k > 80 {
                return Ok(None);
            }
        }
        let mut err = None;
        let s = brent(
            |s| match g(point(t, s)) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            lo,
            hi,
            1e-14 * scale,
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(Some(s)),
        }
    };
    let (dt, ds) = (d[ti], d[si]);
    let f = |t: f64| -> Result<f64> {
        Ok(match phi(t)? {
            Some(s) => dt * t + ds * s,
            None => f64::INFINITY,
        })
    };
    let mut ts = vec![t_min + 1e-12 * scale];
    ts.extend((-20..=10).map(|k| t_min + scale * 2f64.powi(k)));
    let fs: Vec<f64> = ts.iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let best = (0..fs.len())
        .min_by(|&i, &j| fs[i].partial_cmp(&fs[j]).unwrap())
        .unwrap();
    if !fs[best].is_finite() {
        return Err(Error::Infeasible("no point on the constraint curve".into()));
    }
    if best == ts.len() - 1 {
        return Err(Error::Unbounded("objective decreases without bound along the constraint".into()));
    }
    let lo = ts[best.saturating_sub(1)];
    let hi = ts[best + 1];
    let mut err = None;
    let (t, _) = golden_min(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        1e-12 * scale,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let s = phi(t)?.ok_or_else(|| Error::Internal("lost the constraint curve".into()))?;
    let w = point(t, s);
    let res = g(w)?;
    if res.abs() > RESIDUAL_TOL {
        return Err(Error::NonConvergence { what: "dispersion constraint", estimate: res.abs() });
    }
    Ok(w)
}

/// Which part of the asymptotic Slepian-Wolf boundary a rate pair sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCase {
    /// `R1 = H(X1|X2)`, `R2 > H(X2)`
    Vertical,
    /// `R2 = H(X2|X1)`, `R1 > H(X1)`
    Horizontal,
    /// sum-rate face away from both corners
    SumRate,
    /// the corner `(H(X1|X2), H(X2))`
    UpperCorner,
    /// the corner `(H(X1), H(X2|X1))`
    LowerCorner,
}

impl BoundaryCase {
    /// 1-based case number.
    pub fn id(self) -> u8 {
        match self {
            BoundaryCase::Vertical => 1,
            BoundaryCase::Horizontal => 2,
            BoundaryCase::SumRate => 3,
            BoundaryCase::UpperCorner => 4,
            BoundaryCase::LowerCorner => 5,
        }
    }

    /// Open interval of approach angles with finite local dispersion.
    pub fn angle_range(self) -> (f64, f64) {
        match self {
            BoundaryCase::Vertical => (-FRAC_PI_2, FRAC_PI_2),
            BoundaryCase::Horizontal => (0.0, PI),
            BoundaryCase::SumRate => (-FRAC_PI_4, 3.0 * FRAC_PI_4),
            BoundaryCase::UpperCorner => (-FRAC_PI_4, FRAC_PI_2),
            BoundaryCase::LowerCorner => (0.0, 3.0 * FRAC_PI_4),
        }
    }

    fn contains(self, theta: f64) -> bool {
        let (lo, hi) = self.angle_range();
        let t = lo + (theta - lo).rem_euclid(2.0 * PI);
        t > lo && t < hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDispersionResult {
    /// Local dispersion F; `+∞` outside the case's angle range.
    pub f: f64,
    pub case: BoundaryCase,
    /// `Ψ − (1−ε)` at the returned F for corner cases, 0 otherwise.
    pub residual: f64,
    /// Set when the approach direction runs along (or out of) the boundary.
    pub boundary_parallel: bool,
}

/// Classify a point of the asymptotic Slepian-Wolf boundary.
pub fn classify(h: &EntropyTriple, r1: f64, r2: f64) -> Result<BoundaryCase> {
    let tol = CLASSIFY_TOL;
    let h1 = h.h12 - h.h2g1;
    let h2 = h.h12 - h.h1g2;
    let on1 = (r1 - h.h1g2).abs() <= tol;
    let on2 = (r2 - h.h2g1).abs() <= tol;
    let on3 = (r1 + r2 - h.h12).abs() <= tol;
    let case = if on1 && on3 {
        BoundaryCase::UpperCorner
    } else if on2 && on3 {
        BoundaryCase::LowerCorner
    } else if on1 && r2 > h2 {
        BoundaryCase::Vertical
    } else if on2 && r1 > h1 {
        BoundaryCase::Horizontal
    } else if on3 && r1 > h.h1g2 && r2 > h.h2g1 {
        BoundaryCase::SumRate
    } else {
        return domain(format!("({r1}, {r2}) is not on the asymptotic boundary"));
    };
    Ok(case)
}

/// Local dispersion F(θ, ε) at `(r1, r2)` on the asymptotic boundary.
pub fn local_dispersion(
    h: &EntropyTriple,
    v: &CovMatrix,
    r1: f64,
    r2: f64,
    theta: f64,
    epsilon: f64,
) -> Result<LocalDispersionResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon {epsilon} outside (0,1)"));
    }
    if !theta.is_finite() {
        return invalid("theta must be finite");
    }
    if v.dim() != 3 {
        return invalid("V must be 3x3");
    }
    let case = classify(h, r1, r2)?;
    if !case.contains(theta) {
        return Ok(LocalDispersionResult { f: f64::INFINITY, case, residual: 0.0, boundary_parallel: true });
    }
    let (c, s) = (theta.cos(), theta.sin());
    let closed = |f: f64| Ok(LocalDispersionResult { f, case, residual: 0.0, boundary_parallel: false });
    match case {
        BoundaryCase::Vertical => closed(v.get(0, 0) / (c * c)),
        BoundaryCase::Horizontal => closed(v.get(1, 1) / (s * s)),
        BoundaryCase::SumRate => closed(v.get(2, 2) / (c + s).powi(2)),
        BoundaryCase::UpperCorner => corner(v, 0, c, c + s, epsilon, case),
        BoundaryCase::LowerCorner => corner(v, 1, s, c + s, epsilon, case),
    }
}

fn corner(v: &CovMatrix, j: usize, aj: f64, a3: f64, eps: f64, case: BoundaryCase) -> Result<LocalDispersionResult> {
    let q = q_inv_raw(eps);
    if q == 0.0 {
        return domain("corner local dispersion is undefined at epsilon = 1/2");
    }
    let (vj, v3) = (v.get(j, j), v.get(2, 2));
    if vj <= 0.0 || v3 <= 0.0 {
        return Err(Error::Degenerate("zero variance at a corner".into()));
    }
    let rho = v.get(j, 2) / (vj * v3).sqrt();
    let target = 1.0 - eps;
    let h = |f: f64| psi_raw(rho, -(f / vj).sqrt() * aj * q, -(f / v3).sqrt() * a3 * q) - target;
    // Ψ rises with F when q > 0 and falls when q < 0
    let up = q > 0.0;
    let h0 = h(0.0);
    if (h0 < 0.0) != up || h0 == 0.0 {
        return Err(Error::Infeasible("no positive F solves the corner equation".into()));
    }
    let mut hi = vj.max(v3);
    let mut k = 0;
    while (h(hi) > 0.0) != up {
        hi *= 2.0;
        k += 1;
        if k > 200 {
            return Err(Error::NonConvergence { what: "corner F bracket", estimate: hi });
        }
    }
    let probes: Vec<f64> = (0..=8).map(|i| h(hi * i as f64 / 8.0)).collect();
    if probes.windows(2).any(|w| if up { w[1] < w[0] - 1e-12 } else { w[1] > w[0] + 1e-12 }) {
        return Err(Error::Internal("corner equation not monotone in F".into()));
    }
    let f = brent(h, 0.0, hi, 1e-15 * hi)?;
    let residual = h(f);
    if residual.abs() > RESIDUAL_TOL {
        return Err(Error::NonConvergence { what: "corner local dispersion", estimate: residual.abs() });
    }
    Ok(LocalDispersionResult { f, case, residual, boundary_parallel: false })
}

/// Weighted sum-rate dispersion G(ε; α, β).
pub fn sum_rate_dispersion(v: &CovMatrix, alpha: f64, beta: f64, epsilon: f64) -> Result<f64> {
    if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
        return invalid("weights must be finite and nonnegative");
    }
    if alpha == 0.0 && beta == 0.0 {
        return domain("at least one weight must be positive");
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon {epsilon} outside (0,1)"));
    }
    if v.dim() != 3 {
        return invalid("V must be 3x3");
    }
    if beta == 0.0 {
        return Ok(alpha * alpha * v.get(0, 0));
    }
    if alpha == 0.0 {
        return Ok(beta * beta * v.get(1, 1));
    }
    if alpha == beta {
        return Ok(alpha * alpha * v.get(2, 2));
    }
    let q = q_inv_raw(epsilon);
    if q == 0.0 {
        return domain("weighted sum-rate dispersion is undefined at epsilon = 1/2");
    }
    let p = GenDispProblem {
        c: vec![alpha, beta],
        a: [vec![1.0, 0.0], vec![0.0, 1.0]],
        active: if alpha >= beta { vec![0, 2] } else { vec![1, 2] },
        v: v.clone(),
        epsilon,
    };
    let u = solve_gen_disp(&p)?;
    Ok(((alpha * u[0] + beta * u[1]) / q).powi(2))
}
