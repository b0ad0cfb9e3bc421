//! Gaussian probability kernels in dimension at most three.
//!
//! `q_func` and `q_inv` are the standard normal tail and its inverse, `psi` is the
//! upper-orthant probability of a standardized bivariate normal, and
//! [`mvn_lower_orthant`] evaluates `P(Z ≤ z)` for `Z ~ N(0, V)`, including
//! singular `V`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::numeric::integrate;
use crate::{domain, invalid, Error, Result};

/// Membership in S(V, ε) is granted when the orthant probability is within this
/// distance below `1 - ε`.
pub const TIE_TOL: f64 = 1e-7;

/// Relative eigenvalue threshold used to decide the rank of a covariance matrix.
pub const EIGEN_FLOOR: f64 = 1e-12;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Standard normal tail `1 - Φ(x)` without input checks.
#[inline]
pub(crate) fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal CDF.
#[inline]
pub(crate) fn phi_cdf(x: f64) -> f64 {
    q(-x)
}

#[inline]
pub(crate) fn phi_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// `P(lo ≤ X ≤ hi)` for a standard normal, computed on the side with less
/// cancellation.
#[inline]
pub(crate) fn normal_interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo > 0.0 {
        q(lo) - q(hi)
    } else if hi < 0.0 {
        phi_cdf(hi) - phi_cdf(lo)
    } else {
        1.0 - q(hi) - phi_cdf(lo)
    }
}

/// Q-function `1 - Φ(x)`.
pub fn q_func(x: f64) -> Result<f64> {
    if x.is_nan() {
        return invalid("q_func argument is NaN");
    }
    Ok(q(x))
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let tail = |p: f64| {
        let t = (-2.0 * p.ln()).sqrt();
        (((((C[0] * t + C[1]) * t + C[2]) * t + C[3]) * t + C[4]) * t + C[5])
            / ((((D[0] * t + D[1]) * t + D[2]) * t + D[3]) * t + 1.0)
    };
    if p < 0.02425 {
        tail(p)
    } else if p > 1.0 - 0.02425 {
        -tail(1.0 - p)
    } else {
        let t = p - 0.5;
        let r = t * t;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * t
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Lower-tail quantile Φ⁻¹(p) for p ≤ 1/2, refined by Halley steps.
fn lower_quantile(p: f64) -> f64 {
    let mut x = acklam(p);
    for _ in 0..3 {
        let e = phi_cdf(x) - p;
        let u = e * SQRT_2PI * (0.5 * x * x).exp();
        let step = u / (1.0 + 0.5 * x * u);
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}

/// Inverse Q-function: the `x` with `q_func(x) = eps`.
pub fn q_inv(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("q_inv needs eps in (0,1), got {eps}"));
    }
    Ok(q_inv_raw(eps))
}

pub(crate) fn q_inv_raw(eps: f64) -> f64 {
    if eps == 0.5 {
        0.0
    } else if eps < 0.5 {
        -lower_quantile(eps)
    } else {
        lower_quantile(1.0 - eps)
    }
}

const GL_X: [&[f64]; 3] = [
    &[-0.932_469_514_203_152_2, -0.661_209_386_466_264_7, -0.238_619_186_083_197],
    &[
        -0.981_560_634_246_719_1,
        -0.904_117_256_370_475,
        -0.769_902_674_194_305,
        -0.587_317_954_286_617_1,
        -0.367_831_498_998_180_2,
        -0.125_233_408_511_469_2,
    ],
    &[
        -0.993_128_599_185_094_9,
        -0.963_971_927_277_913_8,
        -0.912_234_428_251_325_9,
        -0.839_116_971_822_218_8,
        -0.746_331_906_460_150_8,
        -0.636_053_680_726_515,
        -0.510_867_001_950_827_1,
        -0.373_706_088_715_419_6,
        -0.227_785_851_141_645_1,
        -0.076_526_521_133_497_33,
    ],
];
const GL_W: [&[f64]; 3] = [
    &[0.171_324_492_379_170_5, 0.360_761_573_048_138_4, 0.467_913_934_572_690_4],
    &[
        0.047_175_336_386_511_77,
        0.106_939_325_995_318_3,
        0.160_078_328_543_346_4,
        0.203_167_426_723_065_9,
        0.233_492_536_538_354_7,
        0.249_147_045_813_402_9,
    ],
    &[
        0.017_614_007_139_152_12,
        0.040_601_429_800_386_94,
        0.062_672_048_334_109_06,
        0.083_276_741_576_704_75,
        0.101_930_119_817_240_4,
        0.118_194_531_961_518_4,
        0.131_688_638_449_176_6,
        0.142_096_109_318_382_1,
        0.149_172_986_472_603_7,
        0.152_753_387_130_725_9,
    ],
];

/// Upper-orthant probability `P(X > h, Y > k)` for a standardized bivariate
/// normal with correlation `r`, |r| < 1. Integrates the density derivative over
/// the arcsine of the correlation; strong correlations use a series expansion of
/// the singular part plus a regularized remainder.
fn bvn_upper(h: f64, k: f64, r: f64) -> f64 {
    let tp = 2.0 * std::f64::consts::PI;
    let ng = if r.abs() < 0.3 {
        0
    } else if r.abs() < 0.75 {
        1
    } else {
        2
    };
    let (xs, ws) = (GL_X[ng], GL_W[ng]);
    let mut hk = h * k;
    let mut bvn = 0.0;
    if r.abs() < 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = r.asin();
        for (x, w) in xs.iter().zip(ws.iter()) {
            for sgn in [1.0, -1.0] {
                let sn = (asr * (sgn * x + 1.0) * 0.5).sin();
                bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        bvn = bvn * asr / (2.0 * tp) + phi_cdf(-h) * phi_cdf(-k);
    } else {
        let mut k = k;
        if r < 0.0 {
            k = -k;
            hk = -hk;
        }
        if r.abs() < 1.0 {
            let a2 = (1.0 - r) * (1.0 + r);
            let mut a = a2.sqrt();
            let bs = (h - k) * (h - k);
            let c = (4.0 - hk) / 8.0;
            let d = (12.0 - hk) / 16.0;
            let asr = -0.5 * (bs / a2 + hk);
            if asr > -100.0 {
                bvn = a
                    * asr.exp()
                    * (1.0 - c * (bs - a2) * (1.0 - d * bs / 5.0) / 3.0 + c * d * a2 * a2 / 5.0);
            }
            if -hk < 100.0 {
                let b = bs.sqrt();
                bvn -= (-hk / 2.0).exp()
                    * tp.sqrt()
                    * phi_cdf(-b / a)
                    * b
                    * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a /= 2.0;
            for (x, w) in xs.iter().zip(ws.iter()) {
                for sgn in [1.0, -1.0] {
                    let xs2 = (a * (sgn * x + 1.0)).powi(2);
                    let rs = (1.0 - xs2).sqrt();
                    let asr = -0.5 * (bs / xs2 + hk);
                    if asr > -100.0 {
                        bvn += a
                            * w
                            * asr.exp()
                            * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs
                                - (1.0 + c * xs2 * (1.0 + d * xs2)));
                    }
                }
            }
            bvn = -bvn / tp;
        }
        if r > 0.0 {
            bvn += phi_cdf(-h.max(k));
        } else {
            bvn = -bvn;
            if k > h {
                if h < 0.0 {
                    bvn += phi_cdf(k) - phi_cdf(h);
                } else {
                    bvn += phi_cdf(-h) - phi_cdf(-k);
                }
            }
        }
    }
    bvn.clamp(0.0, 1.0)
}

/// Ψ without input validation; `rho` is clamped to [-1, 1].
pub(crate) fn psi_raw(rho: f64, x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return q(y);
    }
    if y == f64::NEG_INFINITY {
        return q(x);
    }
    if x == f64::INFINITY || y == f64::INFINITY {
        return 0.0;
    }
    let rho = rho.clamp(-1.0, 1.0);
    if rho >= 1.0 - 1e-9 {
        q(x.max(y))
    } else if rho <= -1.0 + 1e-9 {
        // X ≥ x and -X ≥ y
        normal_interval(x, -y)
    } else {
        bvn_upper(x, y, rho)
    }
}

/// Ψ(ρ; x', y') = P(X ≥ x', Y ≥ y') for a standardized bivariate normal with
/// correlation ρ.
pub fn psi(rho: f64, xp: f64, yp: f64) -> Result<f64> {
    if rho.is_nan() || xp.is_nan() || yp.is_nan() {
        return invalid("psi argument is NaN");
    }
    if rho.abs() > 1.0 {
        return domain(format!("correlation {rho} outside [-1,1]"));
    }
    Ok(psi_raw(rho, xp, yp))
}

/// A symmetric positive-semidefinite covariance matrix of dimension 1 to 3 with
/// its eigendecomposition and numerical rank.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    dim: usize,
    entries: Vec<f64>,
    eigenvalues: Vec<f64>,
    // column k is the eigenvector of eigenvalues[k]
    eigenvectors: Vec<Vec<f64>>,
    rank: usize,
    eigen_floor: f64,
}

impl CovMatrix {
    /// Build from a row-major entry list of length `dim * dim`.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return invalid(format!("covariance dimension {dim} not in 1..=3"));
        }
        if entries.len() != dim * dim {
            return invalid(format!(
                "expected {} covariance entries, got {}",
                dim * dim,
                entries.len()
            ));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return invalid("covariance has non-finite entries");
        }
        let scale = entries.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut sym = entries.clone();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (a, b) = (entries[i * dim + j], entries[j * dim + i]);
                if (a - b).abs() > 1e-12 * scale {
                    return invalid(format!("covariance not symmetric at ({i},{j})"));
                }
                let m = 0.5 * (a + b);
                sym[i * dim + j] = m;
                sym[j * dim + i] = m;
            }
        }
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(dim, dim, &sym));
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors: Vec<Vec<f64>> = order
            .iter()
            .map(|&k| (0..dim).map(|i| eig.eigenvectors[(i, k)]).collect())
            .collect();
        let top = eigenvalues[0];
        let neg_ref = if top > 0.0 { top } else { 1.0 };
        if eigenvalues.iter().any(|&l| l < -1e-10 * neg_ref) {
            return invalid("covariance is not positive semidefinite");
        }
        let rank = if top > 0.0 {
            eigenvalues.iter().filter(|&&l| l > EIGEN_FLOOR * top).count()
        } else {
            0
        };
        Ok(CovMatrix {
            dim,
            entries: sym,
            eigenvalues,
            eigenvectors,
            rank,
            eigen_floor: EIGEN_FLOOR,
        })
    }

    pub fn from_array2(m: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(2, m.iter().flatten().copied().collect())
    }

    pub fn from_array3(m: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(3, m.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn eigen_floor(&self) -> f64 {
        self.eigen_floor
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest eigenvalue on the nonsingular subspace (the smallest of the
    /// `rank` leading eigenvalues).
    pub fn lambda_min_positive(&self) -> Option<f64> {
        if self.rank == 0 {
            None
        } else {
            Some(self.eigenvalues[self.rank - 1])
        }
    }

    pub fn to_array3(&self) -> Option<[[f64; 3]; 3]> {
        if self.dim != 3 {
            return None;
        }
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        Some(m)
    }

    /// Principal sub-matrix on the given coordinates.
    pub fn sub(&self, idx: &[usize]) -> Result<CovMatrix> {
        if idx.is_empty() || idx.iter().any(|&i| i >= self.dim) {
            return invalid("bad sub-matrix index set");
        }
        let d = idx.len();
        let mut e = Vec::with_capacity(d * d);
        for &i in idx {
            for &j in idx {
                e.push(self.get(i, j));
            }
        }
        CovMatrix::new(d, e)
    }
}

/// A membership query for S(V, ε).
#[derive(Debug, Clone)]
pub struct SQuery {
    pub cov: CovMatrix,
    pub epsilon: f64,
    pub z: Vec<f64>,
}

/// `P(Z ≤ z)` componentwise for `Z ~ N(0, cov)`.
///
/// Singular covariances are integrated on their support. A rank-0 matrix is
/// rejected.
pub fn mvn_lower_orthant(cov: &CovMatrix, z: &[f64]) -> Result<f64> {
    orthant(cov, z, true)
}

fn orthant(cov: &CovMatrix, z: &[f64], top: bool) -> Result<f64> {
    if z.len() != cov.dim {
        return invalid(format!(
            "z has length {} but covariance has dimension {}",
            z.len(),
            cov.dim
        ));
    }
    if z.iter().any(|v| v.is_nan()) {
        return invalid("z contains NaN");
    }
    if top && cov.rank == 0 {
        return Err(Error::Degenerate("covariance has rank 0".into()));
    }
    if z.iter().any(|&v| v == f64::NEG_INFINITY) {
        return Ok(0.0);
    }
    let keep: Vec<usize> = (0..cov.dim).filter(|&i| z[i].is_finite()).collect();
    if keep.is_empty() {
        return Ok(1.0);
    }
    if keep.len() < cov.dim {
        let sub = cov.sub(&keep)?;
        let zs: Vec<f64> = keep.iter().map(|&i| z[i]).collect();
        return orthant(&sub, &zs, false);
    }
    if cov.rank == 0 {
        return Ok(if z.iter().all(|&v| v >= 0.0) { 1.0 } else { 0.0 });
    }
    if cov.rank == cov.dim {
        full_rank(cov, z)
    } else {
        reduced(cov, z)
    }
}

fn full_rank(cov: &CovMatrix, z: &[f64]) -> Result<f64> {
    let sd: Vec<f64> = (0..cov.dim).map(|i| cov.get(i, i).sqrt()).collect();
    let a: Vec<f64> = z.iter().zip(&sd).map(|(zi, s)| zi / s).collect();
    match cov.dim {
        1 => Ok(phi_cdf(a[0])),
        2 => {
            let rho = cov.get(0, 1) / (sd[0] * sd[1]);
            Ok(psi_raw(rho, -a[0], -a[1]))
        }
        _ => {
            let r = |i: usize, j: usize| (cov.get(i, j) / (sd[i] * sd[j])).clamp(-1.0, 1.0);
            // condition on the coordinate least correlated with the others
            let k = (0..3)
                .min_by(|&x, &y| {
                    let mx = (0..3).filter(|&j| j != x).map(|j| r(x, j).abs()).fold(0.0, f64::max);
                    let my = (0..3).filter(|&j| j != y).map(|j| r(y, j).abs()).fold(0.0, f64::max);
                    mx.partial_cmp(&my).unwrap()
                })
                .unwrap();
            let others: Vec<usize> = (0..3).filter(|&j| j != k).collect();
            let (i, j) = (others[0], others[1]);
            let (rki, rkj, rij) = (r(k, i), r(k, j), r(i, j));
            let si = (1.0 - rki * rki).max(0.0).sqrt();
            let sj = (1.0 - rkj * rkj).max(0.0).sqrt();
            let rho = if si > 0.0 && sj > 0.0 {
                ((rij - rki * rkj) / (si * sj)).clamp(-1.0, 1.0)
            } else {
                1.0
            };
            let (ai, aj, ak) = (a[i], a[j], a[k]);
            if ak <= -9.0 {
                return Ok(0.0);
            }
            let upper = ak.min(9.0);
            let cond = |t: f64| {
                let bi = if si > 0.0 {
                    (ai - rki * t) / si
                } else if ai - rki * t >= 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                };
                let bj = if sj > 0.0 {
                    (aj - rkj * t) / sj
                } else if aj - rkj * t >= 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                };
                let p = if bi == f64::NEG_INFINITY || bj == f64::NEG_INFINITY {
                    0.0
                } else {
                    psi_raw(rho, -bi, -bj)
                };
                phi_pdf(t) * p
            };
            let mut breaks = Vec::new();
            if rki != 0.0 {
                breaks.push(ai / rki);
            }
            if rkj != 0.0 {
                breaks.push(aj / rkj);
            }
            let (v, _) = integrate(cond, -9.0, upper, &breaks, 1e-11, 1e-7)?;
            Ok(v.clamp(0.0, 1.0))
        }
    }
}

/// Orthant probability on the support of a singular covariance: write
/// `Z = B W` with `W ~ N(0, I_r)` and integrate over the polyhedron
/// `{w : B w ≤ z}`.
fn reduced(cov: &CovMatrix, z: &[f64]) -> Result<f64> {
    let r = cov.rank;
    let d = cov.dim;
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..r)
                .map(|k| cov.eigenvectors[k][i] * cov.eigenvalues[k].sqrt())
                .collect()
        })
        .collect();
    let norms: Vec<f64> = rows.iter().map(|b| b.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let nmax = norms.iter().cloned().fold(0.0, f64::max);
    // (unit direction, threshold) half-planes
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..d {
        if norms[i] <= 1e-6 * nmax {
            // component is (numerically) constant zero
            if z[i] < -1e-12 {
                return Ok(0.0);
            }
            continue;
        }
        let u: Vec<f64> = rows[i].iter().map(|v| v / norms[i]).collect();
        cons.push((u, z[i] / norms[i]));
    }
    if cons.is_empty() {
        return Ok(1.0);
    }
    if r == 1 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (u, c) in &cons {
            if u[0] > 0.0 {
                hi = hi.min(c / u[0]);
            } else {
                lo = lo.max(c / u[0]);
            }
        }
        return Ok(normal_interval(lo, hi));
    }
    // r == 2
    if cons.len() == 1 {
        return Ok(phi_cdf(cons[0].1));
    }
    let (u1, c1) = cons[0].clone();
    let perp = [-u1[1], u1[0]];
    let mut t_lo = -9.0f64;
    let mut t_hi = c1.min(9.0);
    // s-bounds as (c_i, alpha_i, beta_i): beta s ≤ c - alpha t
    let mut upper_s: Vec<(f64, f64, f64)> = Vec::new();
    let mut lower_s: Vec<(f64, f64, f64)> = Vec::new();
    for (u, c) in cons.iter().skip(1) {
        let alpha = u[0] * u1[0] + u[1] * u1[1];
        let beta = u[0] * perp[0] + u[1] * perp[1];
        if beta.abs() <= 1e-12 {
            if alpha > 0.0 {
                t_hi = t_hi.min(c / alpha);
            } else {
                t_lo = t_lo.max(c / alpha);
            }
        } else if beta > 0.0 {
            upper_s.push((*c, alpha, beta));
        } else {
            lower_s.push((*c, alpha, beta));
        }
    }
    if t_hi <= t_lo {
        return Ok(0.0);
    }
    let line = |&(c, alpha, beta): &(f64, f64, f64), t: f64| (c - alpha * t) / beta;
    let f = |t: f64| {
        let hi = upper_s.iter().map(|l| line(l, t)).fold(f64::INFINITY, f64::min);
        let lo = lower_s.iter().map(|l| line(l, t)).fold(f64::NEG_INFINITY, f64::max);
        phi_pdf(t) * normal_interval(lo, hi)
    };
    let all: Vec<&(f64, f64, f64)> = upper_s.iter().chain(lower_s.iter()).collect();
    let mut breaks = Vec::new();
    for x in 0..all.len() {
        for y in (x + 1)..all.len() {
            let (ca, aa, ba) = *all[x];
            let (cb, ab, bb) = *all[y];
            // (ca - aa t)/ba = (cb - ab t)/bb
            let den = aa / ba - ab / bb;
            if den.abs() > 1e-14 {
                breaks.push((ca / ba - cb / bb) / den);
            }
        }
    }
    let (v, _) = integrate(f, t_lo, t_hi, &breaks, 1e-11, 1e-6)?;
    Ok(v.clamp(0.0, 1.0))
}

/// Whether `z ∈ S(V, ε)`, i.e. `P(Z ≤ z) ≥ 1 - ε`, with ties within
/// [`TIE_TOL`] resolved toward membership.
pub fn in_s(query: &SQuery) -> Result<bool> {
    if !(query.epsilon > 0.0 && query.epsilon < 1.0) {
        return domain(format!("epsilon {} outside (0,1)", query.epsilon));
    }
    let p = mvn_lower_orthant(&query.cov, &query.z)?;
    Ok(p >= 1.0 - query.epsilon - TIE_TOL)
}

/// Berry-Esseen type bound `400 d^{1/4} ξ / (λ_min^{3/2} √n)`.
pub fn berry_esseen_bound(d: usize, xi: f64, lambda_min: f64, n: u64) -> Result<f64> {
    if !(lambda_min > 0.0) {
        return domain("lambda_min must be positive; reduce to the nonsingular subspace first");
    }
    if d == 0 || n == 0 || !(xi >= 0.0) {
        return invalid("berry_esseen_bound needs d ≥ 1, n ≥ 1, xi ≥ 0");
    }
    Ok(400.0 * (d as f64).powf(0.25) * xi / (lambda_min.powf(1.5) * (n as f64).sqrt()))
}
