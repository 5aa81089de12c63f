use mimo_ic::network::{ChannelSet, NetworkConfig};

fn entries(set: &mimo_ic::ChannelMap) -> Vec<mimo_ic::Complex64> {
    set.links().flat_map(|(_, m)| m.iter().copied().collect::<Vec<_>>()).collect()
}

fn big_config(sigma2: f64) -> NetworkConfig {
    // 16 links × 80×80 = 102 400 entries per map
    NetworkConfig::symmetric(4, 80, 80, 1, 10.0, 1.0, sigma2).unwrap()
}

fn mean_var(xs: &[mimo_ic::Complex64]) -> (mimo_ic::Complex64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<mimo_ic::Complex64>() / n;
    let var = xs.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn channel_moments() {
    let set = ChannelSet::sample(&big_config(0.1), 2024);
    let g = entries(&set.truth);
    assert!(g.len() >= 100_000);
    let (mean, var) = mean_var(&g);
    assert!(mean.norm() < 0.02, "mean {mean}");
    assert!((var - 1.0).abs() < 0.02, "var {var}");
    // half the power in each component
    let re_var = g.iter().map(|z| z.re * z.re).sum::<f64>() / g.len() as f64;
    assert!((re_var - 0.5).abs() < 0.02);

    let (_, evar) = mean_var(&entries(&set.error));
    assert!((evar - 0.1).abs() < 0.005, "error var {evar}");
}

#[test]
fn errors_independent_of_channels() {
    let set = ChannelSet::sample(&big_config(0.1), 77);
    let g = entries(&set.truth);
    let e = entries(&set.error);
    let n = g.len() as f64;
    let cross = g.iter().zip(&e).map(|(a, b)| a * b.conj()).sum::<mimo_ic::Complex64>() / n;
    let gp = g.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
    let ep = e.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
    let rho = cross.norm() / (gp * ep).sqrt();
    assert!(rho < 0.02, "rho {rho}");
}

#[test]
fn same_seed_same_channels() {
    let cfg = NetworkConfig::symmetric(3, 2, 2, 1, 10.0, 1.0, 0.05).unwrap();
    assert_eq!(ChannelSet::sample(&cfg, 3), ChannelSet::sample(&cfg, 3));
    assert_ne!(ChannelSet::sample(&cfg, 3), ChannelSet::sample(&cfg, 4));
}

#[test]
fn truth_is_shared_across_error_levels() {
    let a = NetworkConfig::symmetric(3, 2, 2, 1, 10.0, 1.0, 0.05).unwrap();
    let b = a.with_sigma2(0.1);
    let sa = ChannelSet::sample(&a, 3);
    let sb = ChannelSet::sample(&b, 3);
    assert_eq!(sa.truth, sb.truth);
    assert_ne!(sa.error, sb.error);
}

#[test]
fn reciprocal_is_an_involution() {
    let cfg = NetworkConfig::symmetric(3, 2, 4, 2, 10.0, 1.0, 0.05).unwrap();
    let set = ChannelSet::sample(&cfg, 1);
    let rev = set.estimate.reciprocal();
    assert_eq!(rev.shape(), (2, 4));
    for ((k, j), h) in set.estimate.links() {
        let back = rev.link(j, k);
        for a in 0..h.nrows() {
            for b in 0..h.ncols() {
                assert_eq!(back[(b, a)], h[(a, b)]);
            }
        }
    }
    assert_eq!(rev.reciprocal(), set.estimate);
}
