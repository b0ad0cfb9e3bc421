//! Information-density statistics for the two-user multiple-access channel
//! (MAC) and the asymmetric broadcast channel (ABC).

use crate::numeric::{ent, fd_hessian_norm};
use crate::probkit::CovMatrix;
use crate::sw_stats::{moments, KAPPA_STEP};
use crate::{invalid, Error, Result};

const ROW_TOL: f64 = 1e-12;

fn check_dist(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return invalid(format!("{what} is empty"));
    }
    if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return invalid(format!("{what} has negative or non-finite entries"));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > ROW_TOL {
        return invalid(format!("{what} sums to {s}, not 1"));
    }
    Ok(())
}

/// Input distributions and channel of a two-user MAC with time sharing Q.
#[derive(Debug, Clone, PartialEq)]
pub struct MacSpec {
    pub q_size: usize,
    pub x1_size: usize,
    pub x2_size: usize,
    pub y_size: usize,
    pub p_q: Vec<f64>,
    /// `p_x1_given_q[q][x1]`
    pub p_x1_given_q: Vec<Vec<f64>>,
    /// `p_x2_given_q[q][x2]`
    pub p_x2_given_q: Vec<Vec<f64>>,
    /// `w[x1][x2][y]`
    pub w: Vec<Vec<Vec<f64>>>,
}

impl MacSpec {
    pub fn new(
        p_q: Vec<f64>,
        p_x1_given_q: Vec<Vec<f64>>,
        p_x2_given_q: Vec<Vec<f64>>,
        w: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        check_dist(&p_q, "p_q")?;
        let q_size = p_q.len();
        if p_x1_given_q.len() != q_size || p_x2_given_q.len() != q_size {
            return invalid("conditional input distributions need one row per q");
        }
        let x1_size = p_x1_given_q[0].len();
        let x2_size = p_x2_given_q[0].len();
        for (q, (r1, r2)) in p_x1_given_q.iter().zip(&p_x2_given_q).enumerate() {
            if r1.len() != x1_size || r2.len() != x2_size {
                return invalid("ragged conditional input distribution");
            }
            check_dist(r1, &format!("p_x1_given_q[{q}]"))?;
            check_dist(r2, &format!("p_x2_given_q[{q}]"))?;
        }
        if w.len() != x1_size || w.iter().any(|r| r.len() != x2_size) {
            return invalid("channel must be indexed [x1][x2][y]");
        }
        let y_size = w[0][0].len();
        for (a, row) in w.iter().enumerate() {
            for (b, out) in row.iter().enumerate() {
                if out.len() != y_size {
                    return invalid("ragged channel output rows");
                }
                check_dist(out, &format!("W(.|{a},{b})"))?;
            }
        }
        Ok(MacSpec { q_size, x1_size, x2_size, y_size, p_q, p_x1_given_q, p_x2_given_q, w })
    }

    fn dims(&self) -> [usize; 4] {
        [self.q_size, self.x1_size, self.x2_size, self.y_size]
    }

    /// The joint p(q, x1, x2, y) flattened in (q, x1, x2, y) order.
    pub fn joint(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dims().iter().product());
        for q in 0..self.q_size {
            for a in 0..self.x1_size {
                for b in 0..self.x2_size {
                    for y in 0..self.y_size {
                        out.push(
                            self.p_q[q] * self.p_x1_given_q[q][a] * self.p_x2_given_q[q][b] * self.w[a][b][y],
                        );
                    }
                }
            }
        }
        out
    }
}

/// Joint input distribution and channel of a two-receiver ABC.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcSpec {
    pub u_size: usize,
    pub x_size: usize,
    pub y1_size: usize,
    pub y2_size: usize,
    /// `p_ux[u][x]`
    pub p_ux: Vec<Vec<f64>>,
    /// `w[x][y1][y2]`
    pub w: Vec<Vec<Vec<f64>>>,
}

impl AbcSpec {
    pub fn new(p_ux: Vec<Vec<f64>>, w: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let u_size = p_ux.len();
        if u_size == 0 {
            return invalid("p_ux is empty");
        }
        let x_size = p_ux[0].len();
        if p_ux.iter().any(|r| r.len() != x_size) {
            return invalid("ragged p_ux");
        }
        let flat: Vec<f64> = p_ux.iter().flatten().copied().collect();
        check_dist(&flat, "p_ux")?;
        if w.len() != x_size || w.is_empty() {
            return invalid("channel must be indexed [x][y1][y2]");
        }
        let y1_size = w[0].len();
        let y2_size = w[0].first().map_or(0, |r| r.len());
        for (x, m) in w.iter().enumerate() {
            if m.len() != y1_size || m.iter().any(|r| r.len() != y2_size) {
                return invalid("ragged channel matrix");
            }
            let flat: Vec<f64> = m.iter().flatten().copied().collect();
            check_dist(&flat, &format!("W(.,.|{x})"))?;
        }
        Ok(AbcSpec { u_size, x_size, y1_size, y2_size, p_ux, w })
    }

    /// Channel given as independent branches `w1[x][y1]` and `w2[x][y2]`.
    pub fn from_branches(p_ux: Vec<Vec<f64>>, w1: Vec<Vec<f64>>, w2: Vec<Vec<f64>>) -> Result<Self> {
        if w1.len() != w2.len() {
            return invalid("branches need the same input alphabet");
        }
        for (x, (r1, r2)) in w1.iter().zip(&w2).enumerate() {
            check_dist(r1, &format!("W1(.|{x})"))?;
            check_dist(r2, &format!("W2(.|{x})"))?;
        }
        let w = w1
            .iter()
            .zip(&w2)
            .map(|(r1, r2)| r1.iter().map(|a| r2.iter().map(|b| a * b).collect()).collect())
            .collect();
        Self::new(p_ux, w)
    }

    /// Marginal W1(y1|x).
    pub fn w1(&self) -> Vec<Vec<f64>> {
        self.w.iter().map(|m| m.iter().map(|r| r.iter().sum()).collect()).collect()
    }

    /// Marginal W2(y2|x).
    pub fn w2(&self) -> Vec<Vec<f64>> {
        self.w
            .iter()
            .map(|m| (0..self.y2_size).map(|b| m.iter().map(|r| r[b]).sum()).collect())
            .collect()
    }

    fn dims(&self) -> [usize; 4] {
        [self.u_size, self.x_size, self.y1_size, self.y2_size]
    }

    /// The joint p(u, x, y1, y2) flattened in that order.
    pub fn joint(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dims().iter().product());
        for u in 0..self.u_size {
            for x in 0..self.x_size {
                for a in 0..self.y1_size {
                    for b in 0..self.y2_size {
                        out.push(self.p_ux[u][x] * self.w[x][a][b]);
                    }
                }
            }
        }
        out
    }
}

/// Mutual-information vector and the statistics of the information density.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoDispersion {
    pub i: [f64; 3],
    pub v: CovMatrix,
    /// `None` when the joint distribution has a zero cell.
    pub kappa: Option<f64>,
    pub xi: f64,
    pub nu: Option<f64>,
    /// `(E|A_t|³)^{1/3}` for the centered components `A_t`.
    pub component_l3: [f64; 3],
    /// Set when V has rank 0.
    pub degenerate: bool,
}

impl InfoDispersion {
    pub fn kappa(&self) -> Result<f64> {
        self.kappa.ok_or(Error::KappaUnavailable)
    }

    pub fn nu(&self) -> Result<f64> {
        self.nu.ok_or(Error::KappaUnavailable)
    }
}

/// Sum a 4-D array (row-major with `dims`) onto the axes flagged in `keep`.
fn marg(p: &[f64], dims: [usize; 4], keep: [bool; 4]) -> Vec<f64> {
    let out_dims: Vec<usize> = (0..4).map(|k| if keep[k] { dims[k] } else { 1 }).collect();
    let mut out = vec![0.0; out_dims.iter().product()];
    let mut idx = [0usize; 4];
    for v in p {
        let mut o = 0;
        for k in 0..4 {
            o = o * out_dims[k] + if keep[k] { idx[k] } else { 0 };
        }
        out[o] += v;
        for k in (0..4).rev() {
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

fn h(p: &[f64], dims: [usize; 4], keep: [bool; 4]) -> f64 {
    ent(&marg(p, dims, keep))
}

fn mac_mi(p: &[f64], dims: [usize; 4]) -> [f64; 3] {
    const T: bool = true;
    const F: bool = false;
    let all = h(p, dims, [T, T, T, T]);
    let qx1x2 = h(p, dims, [T, T, T, F]);
    let i1 = qx1x2 + h(p, dims, [T, F, T, T]) - h(p, dims, [T, F, T, F]) - all;
    let i2 = qx1x2 + h(p, dims, [T, T, F, T]) - h(p, dims, [T, T, F, F]) - all;
    let i3 = qx1x2 + h(p, dims, [T, F, F, T]) - h(p, dims, [T, F, F, F]) - all;
    [i1, i2, i3]
}

fn abc_mi(p: &[f64], dims: [usize; 4]) -> [f64; 3] {
    const T: bool = true;
    const F: bool = false;
    let hu = h(p, dims, [T, F, F, F]);
    let i1 = h(p, dims, [T, T, F, F]) + h(p, dims, [T, F, T, F]) - hu - h(p, dims, [T, T, T, F]);
    let i2 = hu + h(p, dims, [F, F, F, T]) - h(p, dims, [T, F, F, T]);
    let i3 = h(p, dims, [F, T, F, F]) + h(p, dims, [F, F, T, F]) - h(p, dims, [F, T, T, F]);
    [i1, i2, i3]
}

fn finish(
    dens: Vec<(f64, [f64; 3])>,
    joint: &[f64],
    dims: [usize; 4],
    mi: fn(&[f64], [usize; 4]) -> [f64; 3],
    alphabet: f64,
) -> Result<InfoDispersion> {
    let (mean, cov, xi) = moments(&dens);
    let mut l3 = [0.0; 3];
    for (w, x) in &dens {
        for t in 0..3 {
            l3[t] += w * (x[t] - mean[t]).abs().powi(3);
        }
    }
    let component_l3 = l3.map(|v| v.cbrt());
    let v = CovMatrix::from_array3(cov)?;
    let kappa = if joint.iter().all(|&x| x > 0.0) {
        Some(
            (0..3)
                .map(|t| fd_hessian_norm(|x| mi(x, dims)[t], joint, KAPPA_STEP))
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    let degenerate = v.rank() == 0;
    Ok(InfoDispersion {
        i: mean,
        v,
        kappa,
        xi,
        nu: kappa.map(|k| alphabet + k + 1.5),
        component_l3,
        degenerate,
    })
}

/// Mutual informations (I(X1;Y|X2,Q), I(X2;Y|X1,Q), I(X1,X2;Y|Q)) and the
/// statistics of the MAC information density vector.
pub fn mac_statistics(spec: &MacSpec) -> Result<InfoDispersion> {
    let joint = spec.joint();
    let mut dens = Vec::new();
    for q in 0..spec.q_size {
        let p1 = &spec.p_x1_given_q[q];
        let p2 = &spec.p_x2_given_q[q];
        for a in 0..spec.x1_size {
            for b in 0..spec.x2_size {
                for y in 0..spec.y_size {
                    let pj = spec.p_q[q] * p1[a] * p2[b] * spec.w[a][b][y];
                    if pj <= 0.0 {
                        continue;
                    }
                    let w = spec.w[a][b][y];
                    let py_x2q: f64 = (0..spec.x1_size).map(|a2| p1[a2] * spec.w[a2][b][y]).sum();
                    let py_x1q: f64 = (0..spec.x2_size).map(|b2| p2[b2] * spec.w[a][b2][y]).sum();
                    let py_q: f64 = (0..spec.x1_size)
                        .flat_map(|a2| (0..spec.x2_size).map(move |b2| (a2, b2)))
                        .map(|(a2, b2)| p1[a2] * p2[b2] * spec.w[a2][b2][y])
                        .sum();
                    dens.push((pj, [(w / py_x2q).log2(), (w / py_x1q).log2(), (w / py_q).log2()]));
                }
            }
        }
    }
    let alphabet = (spec.q_size * spec.x1_size * spec.x2_size * spec.y_size) as f64;
    finish(dens, &joint, spec.dims(), mac_mi, alphabet)
}

/// Mutual informations (I(X;Y1|U), I(U;Y2), I(X;Y1)) and the statistics of the
/// ABC information density vector.
pub fn abc_statistics(spec: &AbcSpec) -> Result<InfoDispersion> {
    let joint = spec.joint();
    let w1 = spec.w1();
    let w2 = spec.w2();
    let pu: Vec<f64> = spec.p_ux.iter().map(|r| r.iter().sum()).collect();
    // p(y1|u), p(y2|u), p(y1), p(y2)
    let mut py1_u = vec![vec![0.0; spec.y1_size]; spec.u_size];
    let mut py2_u = vec![vec![0.0; spec.y2_size]; spec.u_size];
    for u in 0..spec.u_size {
        if pu[u] <= 0.0 {
            continue;
        }
        for x in 0..spec.x_size {
            let px_u = spec.p_ux[u][x] / pu[u];
            for a in 0..spec.y1_size {
                py1_u[u][a] += px_u * w1[x][a];
            }
            for b in 0..spec.y2_size {
                py2_u[u][b] += px_u * w2[x][b];
            }
        }
    }
    let py1: Vec<f64> = (0..spec.y1_size).map(|a| (0..spec.u_size).map(|u| pu[u] * py1_u[u][a]).sum()).collect();
    let py2: Vec<f64> = (0..spec.y2_size).map(|b| (0..spec.u_size).map(|u| pu[u] * py2_u[u][b]).sum()).collect();
    let mut dens = Vec::new();
    for u in 0..spec.u_size {
        for x in 0..spec.x_size {
            for a in 0..spec.y1_size {
                for b in 0..spec.y2_size {
                    let pj = spec.p_ux[u][x] * spec.w[x][a][b];
                    if pj <= 0.0 {
                        continue;
                    }
                    dens.push((
                        pj,
                        [
                            (w1[x][a] / py1_u[u][a]).log2(),
                            (py2_u[u][b] / py2[b]).log2(),
                            (w1[x][a] / py1[a]).log2(),
                        ],
                    ));
                }
            }
        }
    }
    let alphabet = (spec.u_size * spec.x_size * spec.y1_size.max(spec.y2_size)) as f64;
    finish(dens, &joint, spec.dims(), abc_mi, alphabet)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Mac,
    Abc,
}

/// Whether an auxiliary alphabet is within the sufficient cardinality:
/// |Q| ≤ 9 for the MAC, |U| ≤ |X| + 6 for the ABC.
pub fn cardinality_guard(problem: Problem, aux_size: usize, x_size: usize) -> bool {
    match problem {
        Problem::Mac => aux_size <= 9,
        Problem::Abc => aux_size <= x_size + 6,
    }
}

/// The binary MAC with output flip probability `b` on `x1 ⊕ x2` and
/// Bernoulli inputs, no time sharing.
pub fn binary_adder_mac(b: f64, p1: f64, p2: f64) -> Result<MacSpec> {
    let row = |flip: bool| if flip { vec![b, 1.0 - b] } else { vec![1.0 - b, b] };
    let w = vec![vec![row(false), row(true)], vec![row(true), row(false)]];
    MacSpec::new(vec![1.0], vec![vec![1.0 - p1, p1]], vec![vec![1.0 - p2, p2]], w)
}
