//! (n, ε) rate-region membership and boundary tracing.

use rayon::prelude::*;

use crate::net_stats::InfoDispersion;
use crate::probkit::{in_s, mvn_lower_orthant, q_inv_raw, SQuery};
use crate::sw_stats::{EntropyTriple, SwDispersion};
use crate::{invalid, Error, Result};

/// Bisection tolerance on R2, in bits.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// MAC/ABC answers below this blocklength carry a warning flag.
pub const SMALL_N: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Correction {
    WithLogTerms,
    #[default]
    GaussianOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    SwInner,
    SwOuter,
    SwSied,
    MacInner,
    AbcInner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionQuery {
    pub n: u64,
    pub epsilon: f64,
    pub correction: Correction,
    pub side: Side,
}

impl RegionQuery {
    pub fn new(n: u64, epsilon: f64, correction: Correction, side: Side) -> Result<Self> {
        if n < 2 {
            return invalid(format!("blocklength {n} < 2"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return invalid(format!("epsilon {epsilon} outside (0,1)"));
        }
        Ok(RegionQuery { n, epsilon, correction, side })
    }

    fn log_term(&self) -> f64 {
        let n = self.n as f64;
        n.log2() / n
    }
}

/// Statistics a region is built from.
#[derive(Debug, Clone, Copy)]
pub enum RegionSource<'a> {
    Sw(&'a EntropyTriple, &'a SwDispersion),
    Net(&'a InfoDispersion),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPolyline {
    pub points: Vec<(f64, f64)>,
    pub query: RegionQuery,
    /// Set for MAC/ABC regions evaluated at n below [`SMALL_N`].
    pub small_n_warning: bool,
}

fn rate_vec(r1: f64, r2: f64) -> [f64; 3] {
    [r1, r2, r1 + r2]
}

fn sw_z(h: &EntropyTriple, d: &SwDispersion, q: &RegionQuery, r1: f64, r2: f64) -> Result<Vec<f64>> {
    let shift = match (q.side, q.correction) {
        (_, Correction::GaussianOnly) => 0.0,
        (Side::SwInner, Correction::WithLogTerms) => d.nu()? * q.log_term(),
        (Side::SwOuter, Correction::WithLogTerms) => -q.log_term(),
        _ => return invalid("sw_member needs side sw_inner or sw_outer"),
    };
    let sn = (q.n as f64).sqrt();
    let r = rate_vec(r1, r2);
    let hh = h.as_array();
    Ok((0..3).map(|t| sn * (r[t] - hh[t] - shift)).collect())
}

fn net_z(info: &InfoDispersion, q: &RegionQuery, r1: f64, r2: f64) -> Result<Vec<f64>> {
    let shift = match q.correction {
        Correction::GaussianOnly => 0.0,
        Correction::WithLogTerms => info.nu()? * q.log_term(),
    };
    let sn = (q.n as f64).sqrt();
    let r = rate_vec(r1, r2);
    Ok((0..3).map(|t| sn * (info.i[t] - r[t] - shift)).collect())
}

/// `P(Z ≤ √n(R − H − c·1))` for the SW inner/outer tests.
pub fn sw_probability(h: &EntropyTriple, d: &SwDispersion, q: &RegionQuery, r1: f64, r2: f64) -> Result<f64> {
    mvn_lower_orthant(&d.v, &sw_z(h, d, q, r1, r2)?)
}

/// Slepian-Wolf inner (achievable) or outer (converse) (n, ε) region membership.
pub fn sw_member(h: &EntropyTriple, d: &SwDispersion, q: &RegionQuery, r1: f64, r2: f64) -> Result<bool> {
    if !matches!(q.side, Side::SwInner | Side::SwOuter) {
        return invalid("sw_member needs side sw_inner or sw_outer");
    }
    let z = sw_z(h, d, q, r1, r2)?;
    in_s(&SQuery { cov: d.v.clone(), epsilon: q.epsilon, z })
}

/// Decoupled side-information region: three scalar constraints.
pub fn sied_member(h: &EntropyTriple, d: &SwDispersion, q: &RegionQuery, r1: f64, r2: f64) -> Result<bool> {
    if q.side != Side::SwSied {
        return invalid("sied_member needs side sw_sied");
    }
    let qe = q_inv_raw(q.epsilon);
    let n = q.n as f64;
    let r = rate_vec(r1, r2);
    let hh = h.as_array();
    Ok((0..3).all(|t| r[t] >= hh[t] + (d.v.get(t, t) / n).sqrt() * qe - 1e-12))
}

fn net_member(info: &InfoDispersion, q: &RegionQuery, r1: f64, r2: f64) -> Result<bool> {
    let z = net_z(info, q, r1, r2)?;
    in_s(&SQuery { cov: info.v.clone(), epsilon: q.epsilon, z })
}

/// `P(Z ≤ √n(I − R − c·1))` for the MAC/ABC inner tests.
pub fn net_probability(info: &InfoDispersion, q: &RegionQuery, r1: f64, r2: f64) -> Result<f64> {
    mvn_lower_orthant(&info.v, &net_z(info, q, r1, r2)?)
}

/// MAC inner-region membership.
pub fn mac_member(info: &InfoDispersion, q: &RegionQuery, r1: f64, r2: f64) -> Result<bool> {
    if q.side != Side::MacInner {
        return invalid("mac_member needs side mac_inner");
    }
    net_member(info, q, r1, r2)
}

/// ABC inner-region membership.
pub fn abc_member(info: &InfoDispersion, q: &RegionQuery, r1: f64, r2: f64) -> Result<bool> {
    if q.side != Side::AbcInner {
        return invalid("abc_member needs side abc_inner");
    }
    net_member(info, q, r1, r2)
}

/// Membership for any side/source combination.
pub fn member(src: RegionSource, q: &RegionQuery, r1: f64, r2: f64) -> Result<bool> {
    match (src, q.side) {
        (RegionSource::Sw(h, d), Side::SwInner | Side::SwOuter) => sw_member(h, d, q, r1, r2),
        (RegionSource::Sw(h, d), Side::SwSied) => sied_member(h, d, q, r1, r2),
        (RegionSource::Net(i), Side::MacInner) => mac_member(i, q, r1, r2),
        (RegionSource::Net(i), Side::AbcInner) => abc_member(i, q, r1, r2),
        _ => invalid("region side does not match the supplied statistics"),
    }
}

/// Default R2 search cap: the sum entropy (or sum mutual information) plus 5 bits.
pub fn default_cap(src: RegionSource) -> f64 {
    match src {
        RegionSource::Sw(h, _) => h.h12 + 5.0,
        RegionSource::Net(i) => i.i[2] + 5.0,
    }
}

fn boundary_point(src: RegionSource, q: &RegionQuery, r1: f64, cap: f64) -> Result<Option<f64>> {
    // SW regions are upward closed in R2, MAC/ABC regions downward closed.
    let upward = matches!(q.side, Side::SwInner | Side::SwOuter | Side::SwSied);
    let inside = |r2: f64| member(src, q, r1, r2);
    let probes = 9;
    let mut seen_flip = false;
    let mut prev: Option<bool> = None;
    for k in 0..probes {
        let r2 = cap * k as f64 / (probes - 1) as f64;
        let m = inside(r2)?;
        if let Some(p) = prev {
            if p != m {
                if seen_flip || m != upward {
                    return Err(Error::Internal(format!(
                        "membership not monotone in R2 at R1 = {r1}"
                    )));
                }
                seen_flip = true;
            }
        }
        prev = Some(m);
    }
    let (at0, atcap) = (inside(0.0)?, inside(cap)?);
    if upward {
        if at0 {
            return Ok(Some(0.0));
        }
        if !atcap {
            return Ok(None);
        }
    } else {
        if !at0 {
            return Ok(None);
        }
        if atcap {
            return Ok(Some(cap));
        }
    }
    // invariant: inside(good) holds, inside(bad) does not
    let (mut good, mut bad) = if upward { (cap, 0.0) } else { (0.0, cap) };
    while (good - bad).abs() > BOUNDARY_TOL {
        let mid = 0.5 * (good + bad);
        if inside(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(Some(good))
}

/// Trace the boundary of a region over a strictly increasing R1 grid.
///
/// SW regions report the least R2 in `[0, cap]` that is inside; MAC/ABC
/// regions the largest. Grid points with no feasible R2 are omitted.
pub fn trace_boundary(
    src: RegionSource,
    q: &RegionQuery,
    r1_grid: &[f64],
    cap: Option<f64>,
) -> Result<BoundaryPolyline> {
    if r1_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("R1 grid must be strictly increasing");
    }
    let cap = cap.unwrap_or_else(|| default_cap(src));
    if !(cap > 0.0) {
        return invalid("R2 cap must be positive");
    }
    let pts: Vec<Result<Option<f64>>> = r1_grid
        .par_iter()
        .map(|&r1| boundary_point(src, q, r1, cap))
        .collect();
    let mut points = Vec::new();
    for (r1, p) in r1_grid.iter().zip(pts) {
        if let Some(r2) = p? {
            points.push((*r1, r2));
        }
    }
    let small_n_warning = matches!(q.side, Side::MacInner | Side::AbcInner) && q.n < SMALL_N;
    Ok(BoundaryPolyline { points, query: *q, small_n_warning })
}
