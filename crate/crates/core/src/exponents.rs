//! Random-binning error exponents and blocklength estimates.

use crate::numeric::golden_min;
use crate::probkit::{mvn_lower_orthant, CovMatrix};
use crate::sw_stats::{EntropyTriple, JointPmf2};
use crate::{domain, invalid, Error, Result};

/// Golden-section tolerance on ρ.
pub const RHO_TOL: f64 = 1e-8;

/// Exponents at or below this are treated as zero.
pub const EXPONENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    E1g2,
    E2g1,
    E12,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentEval {
    pub rho_star: f64,
    /// Lower bound on the error exponent, bits per symbol.
    pub e_lower: f64,
    /// `[E_{1|2}, E_{2|1}, E_{1,2}]` at `rho_star`.
    pub components: [f64; 3],
}

fn e_raw(pmf: &JointPmf2, which: Which, r1: f64, r2: f64, rho: f64) -> f64 {
    let s = 1.0 / (1.0 + rho);
    let pw = |x1: usize, x2: usize| {
        let p = pmf.get(x1, x2);
        if p > 0.0 {
            p.powf(s)
        } else {
            0.0
        }
    };
    match which {
        Which::E1g2 => {
            let tot: f64 = (0..pmf.cols())
                .map(|x2| (0..pmf.rows()).map(|x1| pw(x1, x2)).sum::<f64>().powf(1.0 + rho))
                .sum();
            rho * r1 - tot.log2()
        }
        Which::E2g1 => {
            let tot: f64 = (0..pmf.rows())
                .map(|x1| (0..pmf.cols()).map(|x2| pw(x1, x2)).sum::<f64>().powf(1.0 + rho))
                .sum();
            rho * r2 - tot.log2()
        }
        Which::E12 => {
            let tot: f64 = pmf.cells().iter().filter(|p| **p > 0.0).map(|p| p.powf(s)).sum();
            rho * (r1 + r2) - (1.0 + rho) * tot.log2()
        }
    }
}

/// Gallager-type constituent exponent in bits.
pub fn gallager_e(pmf: &JointPmf2, which: Which, rates: (f64, f64), rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return domain(format!("rho {rho} outside [0,1]"));
    }
    if !(rates.0.is_finite() && rates.1.is_finite()) {
        return invalid("rates must be finite");
    }
    Ok(e_raw(pmf, which, rates.0, rates.1, rho))
}

fn components(pmf: &JointPmf2, r1: f64, r2: f64, rho: f64) -> [f64; 3] {
    [Which::E1g2, Which::E2g1, Which::E12].map(|w| e_raw(pmf, w, r1, r2, rho))
}

/// `max_ρ min(E_{1|2}, E_{2|1}, E_{1,2})` over ρ ∈ [0, 1].
pub fn lower_exponent(pmf: &JointPmf2, r1: f64, r2: f64) -> Result<ExponentEval> {
    if !(r1.is_finite() && r2.is_finite()) {
        return invalid("rates must be finite");
    }
    let obj = |rho: f64| {
        let c = components(pmf, r1, r2, rho);
        -c[0].min(c[1]).min(c[2])
    };
    let (rho_star, neg) = golden_min(obj, 0.0, 1.0, RHO_TOL);
    Ok(ExponentEval { rho_star, e_lower: -neg, components: components(pmf, r1, r2, rho_star) })
}

fn gauss_prob(h: &EntropyTriple, v: &CovMatrix, r1: f64, r2: f64, n: u64) -> Result<f64> {
    let sn = (n as f64).sqrt();
    let hh = h.as_array();
    let r = [r1, r2, r1 + r2];
    let z: Vec<f64> = (0..3).map(|t| sn * (r[t] - hh[t])).collect();
    mvn_lower_orthant(v, &z)
}

/// Least n with `P(Z ≤ √n(R − H)) ≥ 1−ε` (no log-term correction).
pub fn blocklength_dispersion(h: &EntropyTriple, v: &CovMatrix, epsilon: f64, r1: f64, r2: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon {epsilon} outside (0,1)"));
    }
    if v.dim() != 3 || v.rank() == 0 {
        return invalid("V must be 3x3 with rank at least 1");
    }
    let target = 1.0 - epsilon;
    let p = |n: u64| gauss_prob(h, v, r1, r2, n);
    let mut lo = 2u64;
    let mut p_lo = p(lo)?;
    if p_lo >= target {
        return Ok(lo);
    }
    let mut hi = 4u64;
    loop {
        let p_hi = p(hi)?;
        if p_hi < p_lo - 1e-12 {
            return Err(Error::Infeasible(format!(
                "probability decreases with n between {lo} and {hi}; rates are not inside the region"
            )));
        }
        if p_hi >= target {
            break;
        }
        lo = hi;
        p_lo = p_hi;
        if hi >= 1 << 50 {
            return Err(Error::Infeasible("probability never reaches 1-ε".into()));
        }
        hi *= 2;
    }
    // p(lo) < target ≤ p(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if p(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `⌈log₂(3/ε) / E_lower⌉`.
pub fn blocklength_exponent(pmf: &JointPmf2, epsilon: f64, r1: f64, r2: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon {epsilon} outside (0,1)"));
    }
    let e = lower_exponent(pmf, r1, r2)?.e_lower;
    n_from_exponent(epsilon, e)
}

pub(crate) fn n_from_exponent(epsilon: f64, e: f64) -> Result<u64> {
    if e <= EXPONENT_FLOOR {
        return Err(Error::Infeasible(format!("exponent {e} is not positive")));
    }
    let x = (3.0 / epsilon).log2() / e;
    if !(x < 1.8e19) {
        return Err(Error::Resource(format!("blocklength {x} does not fit in 64 bits")));
    }
    let r = x.round();
    let n = if (x - r).abs() <= 1e-9 * x.max(1.0) { r } else { x.ceil() };
    Ok(n.max(1.0) as u64)
}
