use hcma::tube::*;
use hcma::geom::SurfaceMetric;
use std::time::Instant;

fn main() {
    let config = TubeScanConfig { sigma_samples: 8, ..Default::default() };
    let t0 = Instant::now();
    let round = tube_radius(&SurfaceMetric::round_sphere(), 32, 6.0, &config).unwrap();
    println!("round: entire={} radius={:.4} breaches={} limit={:?} [{:.1?}]",
        round.entire_flag, round.radius_estimate, round.per_geodesic_breach.len(), round.limit_value, t0.elapsed());
    let mut prev = f64::INFINITY;
    for eps in [0.1, 0.2, 0.3] {
        let t0 = Instant::now();
        let m = SurfaceMetric::zoll(eps).unwrap();
        let r = tube_radius(&m, 32, 6.0, &config).unwrap();
        println!("zoll({eps}): entire={} radius={:.4} breaches={} [{:.1?}]",
            r.entire_flag, r.radius_estimate, r.per_geodesic_breach.len(), t0.elapsed());
        assert!(r.radius_estimate < prev);
        prev = r.radius_estimate;
    }
    println!("monotone decreasing: ok");
}
