//! Small one-dimensional numerical routines shared across modules.

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod (7/15) integration over `[a, b]`, split
/// first at the given interior breakpoints.
///
/// Returns `(value, error_estimate)`. Fails only when the estimate after
/// `max_intervals` subdivisions is still above `fail_tol`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    fail_tol: f64,
) -> Result<(f64, f64)> {
    if !(b > a) {
        return Ok((0.0, 0.0));
    }
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > a && x < b && x.is_finite())
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.extend(inner);
    pts.push(b);
    pts.dedup();

    // (lo, hi, value, err)
    let mut segs: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    let max_intervals = 4000;
    loop {
        let total_err: f64 = segs.iter().map(|s| s.3).sum();
        if total_err <= abs_tol || segs.len() >= max_intervals {
            let total: f64 = segs.iter().map(|s| s.2).sum();
            if total_err > fail_tol {
                return Err(Error::NonConvergence {
                    what: "adaptive quadrature",
                    estimate: total_err,
                });
            }
            return Ok((total, total_err));
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, _, _) = segs[idx];
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // interval cannot be split further; accept it as is
            segs[idx].3 = 0.0;
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        segs[idx] = (lo, mid, v1, e1);
        segs.push((mid, hi, v2, e2));
    }
}

/// Brent's root finder on a bracket with `f(a)` and `f(b)` of opposite sign
/// (or one of them zero).
pub(crate) fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Internal("root not bracketed".into()));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NonConvergence {
        what: "Brent root finder",
        estimate: (c - b).abs(),
    })
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
/// Returns `(x, f(x))`, also comparing against the interval endpoints.
pub(crate) fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Spectral norm of the central finite-difference Hessian of `f` at `x`.
///
/// The step is `h`, shrunk when needed so that every probe stays inside the
/// positive orthant.
pub(crate) fn fd_hessian_norm<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> f64 {
    let k = x.len();
    let min_x = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let h = h.min(0.5 * min_x);
    let f0 = f(x);
    let mut y = x.to_vec();
    let eval = |y: &mut Vec<f64>, moves: &[(usize, f64)]| {
        for &(i, d) in moves {
            y[i] += d;
        }
        let v = f(y);
        for &(i, _) in moves {
            y[i] = x[i];
        }
        v
    };
    let mut hess = nalgebra::DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        let fp = eval(&mut y, &[(i, h)]);
        let fm = eval(&mut y, &[(i, -h)]);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in (i + 1)..k {
            let fpp = eval(&mut y, &[(i, h), (j, h)]);
            let fpm = eval(&mut y, &[(i, h), (j, -h)]);
            let fmp = eval(&mut y, &[(i, -h), (j, h)]);
            let fmm = eval(&mut y, &[(i, -h), (j, -h)]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(hess);
    eig.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
}

/// `-Σ v log₂ v` over the positive entries of an arbitrary nonnegative vector.
pub(crate) fn ent(v: &[f64]) -> f64 {
    v.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}
