//! Shared fixtures for unit tests: the reference link sets and seeded
//! random ensembles.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::gauge::{GaugeConfig, LatticeMode, Mat2};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// fig2a link set: U1 = U4 = 1, U2 = [[0,1],[1,0]], U3 = [[0,1],[-1,0]].
pub fn fig2a_links() -> [Mat2; 4] {
    [
        Mat2::identity(),
        Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]),
        Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]]),
        Mat2::identity(),
    ]
}

/// fig2b link set: U2 = [[0,i],[i,0]], U3 = [[0,1],[-1,0]].
pub fn fig2b_links() -> [Mat2; 4] {
    [
        Mat2::identity(),
        Mat2([[c(0.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
        Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]]),
        Mat2::identity(),
    ]
}

/// fig3 link set: U2 = [[0,i],[i,0]], U3 = diag(1,-1).
pub fn fig3_links() -> [Mat2; 4] {
    [
        Mat2::identity(),
        Mat2([[c(0.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
        Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]),
        Mat2::identity(),
    ]
}

/// fig4 link set: U1 = U2 = U4 = 1, U3 = diag(1,-1).
pub fn fig4_links() -> [Mat2; 4] {
    [
        Mat2::identity(),
        Mat2::identity(),
        Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]),
        Mat2::identity(),
    ]
}

/// Ideal-mode config at the reference J/h = 2.5 kHz.
pub fn config(links: [Mat2; 4]) -> GaugeConfig {
    GaugeConfig::new(links, 2.5, LatticeMode::Ideal).unwrap()
}

/// Ion-mode config at the reference J/h = 2.5 kHz.
pub fn ion_config(links: [Mat2; 4]) -> GaugeConfig {
    GaugeConfig::new(links, 2.5, LatticeMode::Ion).unwrap()
}

/// Exactly-unitary U(2) sample from the standard four-angle parameterization.
pub fn random_unitary<R: Rng>(rng: &mut R) -> Mat2 {
    let alpha: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let beta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let gamma: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let theta: f64 = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
    let (s, ct) = theta.sin_cos();
    let g = C64::from_polar(1.0, alpha);
    Mat2([
        [g * C64::from_polar(ct, beta), g * C64::from_polar(s, gamma)],
        [
            g * C64::from_polar(-s, -gamma),
            g * C64::from_polar(ct, -beta),
        ],
    ])
}

/// Random 2x2 complex matrix with entries uniform in [-1, 1]^2.
pub fn random_mat2<R: Rng>(rng: &mut R) -> Mat2 {
    let mut draw = || {
        c(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        )
    };
    Mat2([[draw(), draw()], [draw(), draw()]])
}

/// Random config of four unitary links.
pub fn random_config<R: Rng>(rng: &mut R, mode: LatticeMode) -> GaugeConfig {
    GaugeConfig::new(
        [
            random_unitary(rng),
            random_unitary(rng),
            random_unitary(rng),
            random_unitary(rng),
        ],
        2.5,
        mode,
    )
    .unwrap()
}
