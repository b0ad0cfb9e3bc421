//! Entropy statistics of a two-component discrete memoryless source.

use crate::numeric::{ent, fd_hessian_norm};
use crate::probkit::CovMatrix;
use crate::{domain, invalid, Error, Result};

/// Finite-difference step for κ.
pub const KAPPA_STEP: f64 = 1e-5;

/// Joint pmf of (X1, X2), stored row-major with `p[x1 * cols + x2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf2 {
    rows: usize,
    cols: usize,
    p: Vec<f64>,
}

impl JointPmf2 {
    pub fn new(matrix: &[Vec<f64>]) -> Result<Self> {
        let rows = matrix.len();
        if rows < 2 {
            return invalid("pmf needs at least two rows");
        }
        let cols = matrix[0].len();
        if cols < 2 {
            return invalid("pmf needs at least two columns");
        }
        if matrix.iter().any(|r| r.len() != cols) {
            return invalid("pmf rows have unequal length");
        }
        let p: Vec<f64> = matrix.iter().flatten().copied().collect();
        if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("pmf entries must be finite and nonnegative");
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("pmf sums to {total}, not 1"));
        }
        Ok(JointPmf2 { rows, cols, p })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x1: usize, x2: usize) -> f64 {
        self.p[x1 * self.cols + x2]
    }

    /// Row-major cell probabilities.
    pub fn cells(&self) -> &[f64] {
        &self.p
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        self.p.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn marginal1(&self) -> Vec<f64> {
        row_sums(&self.p, self.rows, self.cols)
    }

    pub fn marginal2(&self) -> Vec<f64> {
        col_sums(&self.p, self.rows, self.cols)
    }

    /// H(X1) in bits.
    pub fn h1(&self) -> f64 {
        ent(&self.marginal1())
    }

    /// H(X2) in bits.
    pub fn h2(&self) -> f64 {
        ent(&self.marginal2())
    }

    pub fn strictly_positive(&self) -> bool {
        self.p.iter().all(|&v| v > 0.0)
    }

    pub fn mutual_information(&self) -> f64 {
        (self.h1() + self.h2() - ent(&self.p)).max(0.0)
    }

    /// True when I(X1;X2) exceeds 1e-12 bits.
    pub fn dependent(&self) -> bool {
        self.mutual_information() > 1e-12
    }

    /// The pmf with the roles of X1 and X2 exchanged.
    pub fn transposed(&self) -> JointPmf2 {
        let mut p = vec![0.0; self.p.len()];
        for a in 0..self.rows {
            for b in 0..self.cols {
                p[b * self.rows + a] = self.get(a, b);
            }
        }
        JointPmf2 { rows: self.cols, cols: self.rows, p }
    }
}

fn row_sums(p: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    (0..rows).map(|a| p[a * cols..(a + 1) * cols].iter().sum()).collect()
}

fn col_sums(p: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    (0..cols).map(|b| (0..rows).map(|a| p[a * cols + b]).sum()).collect()
}

/// (H(X1|X2), H(X2|X1), H(X1,X2)) in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyTriple {
    pub h1g2: f64,
    pub h2g1: f64,
    pub h12: f64,
}

impl EntropyTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.h1g2, self.h2g1, self.h12]
    }
}

/// Second- and third-order statistics of the entropy density vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SwDispersion {
    pub v: CovMatrix,
    /// `None` when the pmf has a zero cell.
    pub kappa: Option<f64>,
    pub xi: f64,
    /// |X1||X2| + κ + 3/2, when κ is available.
    pub nu: Option<f64>,
    /// Set when V has rank 0.
    pub degenerate: bool,
}

impl SwDispersion {
    pub fn kappa(&self) -> Result<f64> {
        self.kappa.ok_or(Error::KappaUnavailable)
    }

    pub fn nu(&self) -> Result<f64> {
        self.nu.ok_or(Error::KappaUnavailable)
    }
}

/// Entropy density `(-log p(x1|x2), -log p(x2|x1), -log p(x1,x2))`.
pub fn entropy_density(pmf: &JointPmf2, x1: usize, x2: usize) -> Result<[f64; 3]> {
    if x1 >= pmf.rows || x2 >= pmf.cols {
        return invalid("symbol out of range");
    }
    let pj = pmf.get(x1, x2);
    if pj <= 0.0 {
        return domain(format!("cell ({x1},{x2}) has zero probability"));
    }
    let p1 = pmf.marginal1()[x1];
    let p2 = pmf.marginal2()[x2];
    let joint = -pj.log2();
    let c1 = joint + p2.log2();
    let c2 = joint + p1.log2();
    Ok([c1, c2, joint])
}

fn sw_entropies(p: &[f64], rows: usize, cols: usize) -> [f64; 3] {
    let h12 = ent(p);
    let h1 = ent(&row_sums(p, rows, cols));
    let h2 = ent(&col_sums(p, rows, cols));
    [h12 - h2, h12 - h1, h12]
}

/// Entropy vector, dispersion matrix, κ, ξ and ν of a source.
pub fn sw_statistics(pmf: &JointPmf2) -> Result<(EntropyTriple, SwDispersion)> {
    let (rows, cols) = (pmf.rows, pmf.cols);
    let mut dens = Vec::new();
    for a in 0..rows {
        for b in 0..cols {
            let w = pmf.get(a, b);
            if w > 0.0 {
                dens.push((w, entropy_density(pmf, a, b)?));
            }
        }
    }
    let (mean, v, xi) = moments(&dens);
    let h = EntropyTriple { h1g2: mean[0], h2g1: mean[1], h12: mean[2] };
    let v = CovMatrix::from_array3(v)?;
    let kappa = if pmf.strictly_positive() {
        let k = (0..3)
            .map(|t| fd_hessian_norm(|x| sw_entropies(x, rows, cols)[t], &pmf.p, KAPPA_STEP))
            .fold(0.0, f64::max);
        Some(k)
    } else {
        None
    };
    let nu = kappa.map(|k| (rows * cols) as f64 + k + 1.5);
    let degenerate = v.rank() == 0;
    Ok((h, SwDispersion { v, kappa, xi, nu, degenerate }))
}

/// Mean, covariance and E‖X − EX‖³ of a weighted list of 3-vectors.
pub(crate) fn moments(pts: &[(f64, [f64; 3])]) -> ([f64; 3], [[f64; 3]; 3], f64) {
    let mut mean = [0.0; 3];
    for (w, x) in pts {
        for i in 0..3 {
            mean[i] += w * x[i];
        }
    }
    let mut cov = [[0.0; 3]; 3];
    let mut xi = 0.0;
    for (w, x) in pts {
        let d = [x[0] - mean[0], x[1] - mean[1], x[2] - mean[2]];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += w * d[i] * d[j];
            }
        }
        xi += w * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).powf(1.5);
    }
    (mean, cov, xi)
}

/// Doubly symmetric binary source with crossover ζ and its scalar dispersion
/// `V_ζ = ζ(1−ζ) log₂²((1−ζ)/ζ)`.
pub fn dsbs(zeta: f64) -> Result<(JointPmf2, f64)> {
    if !(zeta > 0.0 && zeta < 0.5) {
        return domain(format!("DSBS crossover {zeta} outside (0, 0.5)"));
    }
    let a = (1.0 - zeta) / 2.0;
    let b = zeta / 2.0;
    let pmf = JointPmf2::new(&[vec![a, b], vec![b, a]])?;
    let l = ((1.0 - zeta) / zeta).log2();
    Ok((pmf, zeta * (1.0 - zeta) * l * l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pmf_from(raw: &[f64], rows: usize) -> JointPmf2 {
        let s: f64 = raw.iter().sum();
        let cols = raw.len() / rows;
        let m: Vec<Vec<f64>> = raw.chunks(cols).map(|r| r.iter().map(|v| v / s).collect()).collect();
        // renormalize exactly enough for the 1e-12 check
        JointPmf2::new(&m).unwrap()
    }

    #[test]
    fn density_examples() {
        let u = JointPmf2::new(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert_eq!(entropy_density(&u, 1, 0).unwrap(), [1.0, 1.0, 2.0]);
        let (d, _) = dsbs(0.25).unwrap();
        let h = entropy_density(&d, 0, 0).unwrap();
        let expect = [-(0.75f64).log2(), -(0.75f64).log2(), -(0.375f64).log2()];
        for i in 0..3 {
            assert!((h[i] - expect[i]).abs() < 1e-14);
        }
        assert!((h[0] - 0.415037).abs() < 1e-6 && (h[2] - 1.415037).abs() < 1e-6);
        let ind = JointPmf2::new(&[vec![0.12, 0.28], vec![0.18, 0.42]]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let h = entropy_density(&ind, a, b).unwrap();
                assert!((h[2] - h[0] - h[1]).abs() < 1e-12);
            }
        }
        let z = JointPmf2::new(&[vec![0.5, 0.0], vec![0.25, 0.25]]).unwrap();
        assert!(entropy_density(&z, 0, 1).is_err());
    }

    #[test]
    fn statistics_examples() {
        let (d, vz) = dsbs(0.25).unwrap();
        assert!((vz - 0.1875 * 3f64.log2().powi(2)).abs() < 1e-15);
        assert!((vz - 0.471020).abs() < 1e-6);
        let (_, disp) = sw_statistics(&d).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((disp.v.get(i, j) - vz).abs() < 1e-12);
            }
        }
        assert_eq!(disp.v.rank(), 1);

        let ind = JointPmf2::new(&[vec![0.12, 0.28], vec![0.18, 0.42]]).unwrap();
        assert!(!ind.dependent());
        let (_, di) = sw_statistics(&ind).unwrap();
        assert!(di.v.rank() <= 2);

        let a = JointPmf2::new(&[vec![0.7, 0.1], vec![0.1, 0.1]]).unwrap();
        let (h, _) = sw_statistics(&a).unwrap();
        let direct = -(0.7f64 * 0.7f64.log2() + 3.0 * 0.1 * 0.1f64.log2());
        assert!((h.h12 - direct).abs() < 1e-14);
        assert!((h.h12 - 1.356779).abs() < 1e-6);
    }

    #[test]
    fn zero_cell_withholds_kappa() {
        let z = JointPmf2::new(&[vec![0.5, 0.0], vec![0.25, 0.25]]).unwrap();
        let (_, d) = sw_statistics(&z).unwrap();
        assert_eq!(d.kappa(), Err(Error::KappaUnavailable));
        assert!(d.nu().is_err());
        assert!(d.xi > 0.0);
    }

    #[test]
    fn dsbs_examples() {
        let (p, _) = dsbs(0.3).unwrap();
        assert_eq!(p.get(0, 1), p.get(1, 0));
        assert!((p.marginal1()[0] - 0.5).abs() < 1e-15 && (p.marginal2()[1] - 0.5).abs() < 1e-15);
        let (_, v) = dsbs(0.5 - 1e-9).unwrap();
        assert!(v < 1e-15);
        assert!(dsbs(0.5).is_err() && dsbs(0.0).is_err());
    }

    #[test]
    fn kappa_dominated_by_joint_entropy_curvature() {
        let a = JointPmf2::new(&[vec![0.7, 0.1], vec![0.1, 0.1]]).unwrap();
        let (_, d) = sw_statistics(&a).unwrap();
        let lower = std::f64::consts::LOG2_E / 0.1;
        let k = d.kappa().unwrap();
        assert!(k >= lower * (1.0 - 1e-6));
        assert!((k - lower).abs() / lower < 0.02);
        assert!((d.nu().unwrap() - (4.0 + k + 1.5)).abs() < 1e-12);
    }

    // brute-force moments over the cells
    fn brute(pmf: &JointPmf2) -> ([f64; 3], [[f64; 3]; 3], f64) {
        let m1 = pmf.marginal1();
        let m2 = pmf.marginal2();
        let mut cells = Vec::new();
        for a in 0..pmf.rows() {
            for b in 0..pmf.cols() {
                let p = pmf.get(a, b);
                let h = [-(p / m2[b]).log2(), -(p / m1[a]).log2(), -p.log2()];
                cells.push((p, h));
            }
        }
        let mut mean = [0.0; 3];
        for (p, h) in &cells {
            for i in 0..3 {
                mean[i] += p * h[i];
            }
        }
        let mut cov = [[0.0; 3]; 3];
        let mut xi = 0.0;
        for (p, h) in &cells {
            let mut n2 = 0.0;
            for i in 0..3 {
                n2 += (h[i] - mean[i]).powi(2);
                for j in 0..3 {
                    cov[i][j] += p * (h[i] - mean[i]) * (h[j] - mean[j]);
                }
            }
            xi += p * n2.sqrt().powi(3);
        }
        (mean, cov, xi)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn entropy_identities(raw in proptest::collection::vec(0.01f64..1.0, 6)) {
            let p = pmf_from(&raw, 2);
            let (h, _) = sw_statistics(&p).unwrap();
            prop_assert!((h.h12 - h.h1g2 - p.h2()).abs() < 1e-12);
            prop_assert!((h.h12 - h.h2g1 - p.h1()).abs() < 1e-12);
        }

        #[test]
        fn moments_match_brute_force(raw in proptest::collection::vec(0.01f64..1.0, 9)) {
            let p = pmf_from(&raw, 3);
            let (h, d) = sw_statistics(&p).unwrap();
            let (m, c, xi) = brute(&p);
            prop_assert!((h.h1g2 - m[0]).abs() < 1e-12);
            for i in 0..3 { for j in 0..3 {
                prop_assert!((d.v.get(i, j) - c[i][j]).abs() < 1e-12);
            }}
            prop_assert!((d.xi - xi).abs() < 1e-12);
        }

        #[test]
        fn kappa_lower_bound_within_two_percent(raw in proptest::collection::vec(0.02f64..1.0, 4)) {
            let p = pmf_from(&raw, 2);
            let (_, d) = sw_statistics(&p).unwrap();
            let minp = p.cells().iter().cloned().fold(1.0, f64::min);
            let lower = std::f64::consts::LOG2_E / minp;
            let k = d.kappa().unwrap();
            prop_assert!(k >= lower * (1.0 - 1e-4));
            prop_assert!((k - lower).abs() / lower < 0.02);
        }

        #[test]
        fn label_permutation_invariance(raw in proptest::collection::vec(0.02f64..1.0, 6)) {
            let p = pmf_from(&raw, 2);
            let m = p.to_matrix();
            // swap the X1 labels and reverse the X2 labels
            let perm: Vec<Vec<f64>> = vec![
                m[1].iter().rev().cloned().collect(),
                m[0].iter().rev().cloned().collect(),
            ];
            let q = JointPmf2::new(&perm).unwrap();
            let (h1, d1) = sw_statistics(&p).unwrap();
            let (h2, d2) = sw_statistics(&q).unwrap();
            for (a, b) in h1.as_array().iter().zip(h2.as_array().iter()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in d1.v.eigenvalues().iter().zip(d2.v.eigenvalues()) {
                prop_assert!((a - b).abs() < 1e-10);
            }
            prop_assert!((d1.xi - d2.xi).abs() < 1e-12);
            let (k1, k2) = (d1.kappa().unwrap(), d2.kappa().unwrap());
            prop_assert!((k1 - k2).abs() / k1 < 1e-4);
        }
    }
}
