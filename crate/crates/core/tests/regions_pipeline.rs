use dispersia::net_stats::{abc_statistics, binary_adder_mac, mac_statistics, AbcSpec};
use dispersia::probkit::q_inv;
use dispersia::regions::{
    member, net_probability, trace_boundary, Correction, RegionQuery, RegionSource, Side, SMALL_N,
};
use dispersia::sw_stats::sw_statistics;
use dispersia::JointPmf2;

fn source() -> JointPmf2 {
    JointPmf2::new(&[vec![0.5, 0.1], vec![0.15, 0.25]]).unwrap()
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

#[test]
fn boundary_converges_to_asymptotic() {
    let p = source();
    let (h, d) = sw_statistics(&p).unwrap();
    let lmax = d.v.eigenvalues().iter().cloned().fold(0.0, f64::max);
    let g = linspace(h.h1g2 + 0.01, p.h1() + 0.3, 40);
    for eps in [0.01, 0.1, 0.3] {
        let envelope = 2.0 * (lmax / 1e6).sqrt() * q_inv(eps).unwrap();
        let mut last = f64::INFINITY;
        for n in [1_000u64, 10_000, 100_000, 1_000_000] {
            let q = RegionQuery::new(n, eps, Correction::GaussianOnly, Side::SwInner).unwrap();
            let b = trace_boundary(RegionSource::Sw(&h, &d), &q, &g, None).unwrap();
            let gap = b
                .points
                .iter()
                .map(|&(r1, r2)| r2 - (h.h12 - r1).max(h.h2g1))
                .fold(0.0, f64::max);
            assert!(gap <= last + 1e-12, "gap grew at n = {n}");
            last = gap;
            if n == 1_000_000 {
                assert_eq!(b.points.len(), g.len());
                assert!(gap <= envelope, "ε {eps}: {gap} > {envelope}");
            }
        }
    }
}

/// Least R1 in the region at fixed R2, by bisection.
fn min_r1(side: Side, n: u64, eps: f64, r2: f64) -> f64 {
    let p = source();
    let (h, d) = sw_statistics(&p).unwrap();
    let q = RegionQuery::new(n, eps, Correction::GaussianOnly, side).unwrap();
    let inside = |r1: f64| member(RegionSource::Sw(&h, &d), &q, r1, r2).unwrap();
    let (mut lo, mut hi) = (0.0, h.h12 + 1.0);
    assert!(inside(hi) && !inside(lo));
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[test]
fn sied_matches_sw_away_from_corners() {
    let p = source();
    let r2 = p.h2() + 0.1;
    for eps in [0.01, 0.1] {
        let a = min_r1(Side::SwInner, 100_000, eps, r2);
        let b = min_r1(Side::SwSied, 100_000, eps, r2);
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }
    // near the corner they separate at moderate n
    let a = min_r1(Side::SwInner, 1000, 0.1, p.h2());
    let b = min_r1(Side::SwSied, 1000, 0.1, p.h2());
    assert!(a - b > 1e-4);
}

#[test]
fn mac_pipeline() {
    let info = mac_statistics(&binary_adder_mac(0.1, 0.1, 0.9).unwrap()).unwrap();
    let src = RegionSource::Net(&info);
    // pentagon vertices and edge midpoints are never inside at finite n
    let corner_a = (info.i[0], info.i[2] - info.i[0]);
    let corner_b = (info.i[2] - info.i[1], info.i[1]);
    let on_edge = [
        (info.i[0], 0.0),
        corner_a,
        ((corner_a.0 + corner_b.0) / 2.0, (corner_a.1 + corner_b.1) / 2.0),
        corner_b,
        (0.0, info.i[1]),
    ];
    for n in [100u64, 1000, 100_000, 10_000_000] {
        let q = RegionQuery::new(n, 0.1, Correction::GaussianOnly, Side::MacInner).unwrap();
        for &(r1, r2) in &on_edge {
            assert!(!member(src, &q, r1, r2).unwrap(), "n {n} ({r1}, {r2})");
        }
        assert!(member(src, &q, 0.0, 0.0).unwrap() || n < 1000);
        let b = trace_boundary(src, &q, &linspace(0.0, info.i[0], 30), None).unwrap();
        assert_eq!(b.small_n_warning, n < SMALL_N);
        for &(r1, r2) in &b.points {
            assert!(r1 + r2 < info.i[2] && r2 < info.i[1]);
            if r2 > 0.0 {
                let pr = net_probability(&info, &q, r1, r2).unwrap();
                assert!((pr - 0.9).abs() < 1e-6);
            }
        }
    }
    // boundaries grow with n
    let at = |n: u64| {
        let q = RegionQuery::new(n, 0.1, Correction::GaussianOnly, Side::MacInner).unwrap();
        trace_boundary(src, &q, &[0.05], None).unwrap().points[0].1
    };
    assert!(at(1000) < at(10_000) && at(10_000) < at(100_000));
}

#[test]
fn abc_pipeline() {
    // U = X uniform, two independent BSC branches
    let w1 = vec![vec![0.9, 0.1], vec![0.1, 0.9]];
    let w2 = vec![vec![0.8, 0.2], vec![0.2, 0.8]];
    let spec = AbcSpec::from_branches(vec![vec![0.5, 0.0], vec![0.0, 0.5]], w1, w2).unwrap();
    let info = abc_statistics(&spec).unwrap();
    assert!(info.i.iter().all(|&x| x.is_finite() && x >= 0.0));
    let q = RegionQuery::new(2000, 0.05, Correction::GaussianOnly, Side::AbcInner).unwrap();
    let src = RegionSource::Net(&info);
    let b = trace_boundary(src, &q, &linspace(0.0, info.i[0].max(1e-3), 20), None).unwrap();
    for &(r1, r2) in &b.points {
        assert!(r1 <= info.i[0] && r2 <= info.i[1] + 1e-12 && r1 + r2 <= info.i[2] + 1e-12);
    }
    let bad = RegionQuery { side: Side::SwInner, ..q };
    assert!(matches!(member(src, &bad, 0.0, 0.0), Err(dispersia::Error::InvalidInput(_))));
}
