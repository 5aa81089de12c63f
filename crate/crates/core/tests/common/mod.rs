//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use mimo_ic::network::{ChannelMap, NetworkConfig};
use mimo_ic::numerics::{complex_gaussian, CMatrix, CVector};
use mimo_ic::rng::SimRng;
use mimo_ic::Complex64;

pub fn random_matrix(rng: &mut SimRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng, 1.0))
}

/// Hermitian PSD, rank ≤ `rank`.
pub fn random_psd(rng: &mut SimRng, n: usize, rank: usize) -> CMatrix {
    let a = random_matrix(rng, n, rank);
    &a * a.adjoint()
}

/// Hermitian PD with smallest eigenvalue at least `floor`.
pub fn random_pd(rng: &mut SimRng, n: usize, floor: f64) -> CMatrix {
    random_psd(rng, n, n) + CMatrix::identity(n, n).scale(floor)
}

pub fn random_unit(rng: &mut SimRng, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| complex_gaussian(rng, 1.0));
    let norm = v.norm();
    v.unscale(norm)
}

/// Every generalized eigenvalue of `(Q, F)`, computed the brute-force way:
/// explicit inverse, then the complex Schur form of `F⁻¹Q`.
pub fn generalized_spectrum(q: &CMatrix, f: &CMatrix) -> Vec<f64> {
    let finv = f.clone().try_inverse().expect("invertible F");
    let product = finv * q;
    let mut values: Vec<f64> = product
        .eigenvalues()
        .expect("complex Schur form")
        .iter()
        .map(|z| z.re)
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn hermitian_spectrum(s: &CMatrix) -> Vec<f64> {
    generalized_spectrum(s, &CMatrix::identity(s.nrows(), s.ncols()))
}

fn abs2(z: Complex64) -> f64 {
    z.re * z.re + z.im * z.im
}

/// `a† M b` with explicit loops.
pub fn bilinear(a: &[Complex64], m: &CMatrix, b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            acc += a[r].conj() * m[(r, c)] * b[c];
        }
    }
    acc
}

fn column(m: &CMatrix, c: usize) -> Vec<Complex64> {
    (0..m.nrows()).map(|r| m[(r, c)]).collect()
}

/// SINR written out term by term: signal over total received power minus the
/// own signal plus noise.
pub fn sinr_direct(channels: &ChannelMap, v: &[CMatrix], u: &[CMatrix], cfg: &NetworkConfig, k: usize, d: usize) -> f64 {
    let ud = column(&u[k], d);
    let p = cfg.power;
    let signal = p * abs2(bilinear(&ud, channels.link(k, k), &column(&v[k], d)));
    let mut total = 0.0;
    for j in 0..cfg.users {
        for m in 0..cfg.streams[j] {
            total += p * abs2(bilinear(&ud, channels.link(k, j), &column(&v[j], m)));
        }
    }
    let unorm2: f64 = ud.iter().map(|z| abs2(*z)).sum();
    signal / (total - signal + cfg.noise * unorm2)
}

/// The approximate mean SINR written out from its closed form:
/// `(P|u†H_kk v|² + Pσ²‖u‖²) / (P Σ|u†H_kj v_m|² − P|u†H_kk v|² + (Pσ²ΣD − Pσ² + N0)‖u‖²)`.
pub fn approx_mean_direct(h: &ChannelMap, v: &[CMatrix], u: &[CMatrix], cfg: &NetworkConfig, k: usize, d: usize) -> f64 {
    let ud = column(&u[k], d);
    let p = cfg.power;
    let s2 = cfg.sigma2;
    let unorm2: f64 = ud.iter().map(|z| abs2(*z)).sum();
    let own = p * abs2(bilinear(&ud, h.link(k, k), &column(&v[k], d)));
    let mut total = 0.0;
    for j in 0..cfg.users {
        for m in 0..cfg.streams[j] {
            total += p * abs2(bilinear(&ud, h.link(k, j), &column(&v[j], m)));
        }
    }
    let sum_d = cfg.total_streams() as f64;
    let num = own + p * s2 * unorm2;
    let den = total - own + (p * s2 * sum_d - p * s2 + cfg.noise) * unorm2;
    num / den
}

/// `(A, B)` of the SINR for one realization of the true channel `h + e`.
pub fn sinr_parts_direct(
    h: &ChannelMap,
    e: &[CMatrix],
    v: &[CMatrix],
    u: &[CMatrix],
    cfg: &NetworkConfig,
    k: usize,
    d: usize,
) -> (f64, f64) {
    let ud = column(&u[k], d);
    let p = cfg.power;
    let users = cfg.users;
    let mut signal = 0.0;
    let mut total = 0.0;
    for j in 0..users {
        let g = h.link(k, j) + &e[k * users + j];
        for m in 0..cfg.streams[j] {
            let x = p * abs2(bilinear(&ud, &g, &column(&v[j], m)));
            total += x;
            if j == k && m == d {
                signal = x;
            }
        }
    }
    let unorm2: f64 = ud.iter().map(|z| abs2(*z)).sum();
    (signal, total - signal + cfg.noise * unorm2)
}

/// Error matrices for every link, receiver-major, entries row by row.
pub fn random_errors(rng: &mut SimRng, cfg: &NetworkConfig) -> Vec<CMatrix> {
    let (n, m) = (cfg.rx_antennas, cfg.tx_antennas);
    (0..cfg.users * cfg.users)
        .map(|_| CMatrix::from_row_iterator(n, m, (0..n * m).map(|_| complex_gaussian(rng, cfg.sigma2)).collect::<Vec<_>>()))
        .collect()
}
