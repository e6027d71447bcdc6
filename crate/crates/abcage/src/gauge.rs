//! Exact and toleranced algebra of U(2) link variables.
//!
//! A rhombic plaquette carries four link variables `U1..U4`. Two path-ordered
//! products connect consecutive A sites, and their half-sum is the rightward
//! interference matrix
//!
//! ```text
//! I = (U2 U1 + U4 U3) / 2 .
//! ```
//!
//! Caging is governed by the nilpotency of `I`: a wave packet launched from an
//! A site cannot pass the m-th A site to its right when `I^m` annihilates its
//! spinor. The loop operator `W = U3† U4† U2 U1` classifies the field as
//! Abelian (`W ∝ 1`) or non-Abelian.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unitarity tolerance enforced on link variables at construction.
pub const UNITARY_TOL: f64 = 1e-10;

/// Default tolerance for nilpotency / Abelian classification.
///
/// All presets are exact integer or half-integer matrices, far from the
/// threshold, so the precise value is uncritical.
pub const ALGEBRA_TOL: f64 = 1e-9;

/// A 2x2 complex matrix in row-major layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[C64::ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[C64::ONE, C64::ZERO], [C64::ZERO, C64::ONE]])
    }

    /// Build from real entries.
    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Mat2(rows.map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    pub fn at(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn scale(&self, z: C64) -> Self {
        Mat2(self.0.map(|r| r.map(|x| x * z)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][j] + other.0[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * other.0[0][j] + self.0[i][1] * other.0[1][j];
            }
        }
        out
    }

    pub fn mul_spinor(&self, chi: &Spinor) -> Spinor {
        Spinor {
            up: self.0[0][0] * chi.up + self.0[0][1] * chi.down,
            down: self.0[1][0] * chi.up + self.0[1][1] * chi.down,
        }
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Entrywise maximum modulus.
    pub fn max_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.sub(other).max_norm() <= tol
    }
}

impl std::ops::Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: &Mat2) -> Mat2 {
        Mat2::mul(self, rhs)
    }
}

/// `true` iff `m† m` is within `tol` of the identity in max norm.
pub fn validate_unitary(m: &Mat2, tol: f64) -> bool {
    m.is_finite() && m.adjoint().mul(m).sub(&Mat2::identity()).max_norm() <= tol
}

/// A U(2) link variable, unitary within [`UNITARY_TOL`] by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkVariable {
    mat: Mat2,
}

impl LinkVariable {
    pub fn new(mat: Mat2) -> Result<Self> {
        Self::with_tol(mat, UNITARY_TOL, "link")
    }

    pub(crate) fn with_tol(mat: Mat2, tol: f64, which: &'static str) -> Result<Self> {
        if validate_unitary(&mat, tol) {
            Ok(LinkVariable { mat })
        } else {
            Err(Error::NonUnitaryLink {
                which,
                deviation: mat.adjoint().mul(&mat).sub(&Mat2::identity()).max_norm(),
                tol,
            })
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.mat
    }
}

/// Flat lattice (uniform hopping) vs ion realization (sqrt(n+1) modulation on
/// inter-cell bonds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeMode {
    Ideal,
    Ion,
}

/// The four link variables plus hopping strength and lattice mode.
#[derive(Debug, Clone, Copy)]
pub struct GaugeConfig {
    pub u1: LinkVariable,
    pub u2: LinkVariable,
    pub u3: LinkVariable,
    pub u4: LinkVariable,
    /// Hopping strength J/h in kHz.
    pub hopping_j_khz: f64,
    pub mode: LatticeMode,
}

impl GaugeConfig {
    pub fn new(links: [Mat2; 4], hopping_j_khz: f64, mode: LatticeMode) -> Result<Self> {
        if !(hopping_j_khz > 0.0) {
            return Err(Error::Config(format!(
                "hopping_j_khz must be positive, got {hopping_j_khz}"
            )));
        }
        Ok(GaugeConfig {
            u1: LinkVariable::with_tol(links[0], UNITARY_TOL, "u1")?,
            u2: LinkVariable::with_tol(links[1], UNITARY_TOL, "u2")?,
            u3: LinkVariable::with_tol(links[2], UNITARY_TOL, "u3")?,
            u4: LinkVariable::with_tol(links[3], UNITARY_TOL, "u4")?,
            hopping_j_khz,
            mode,
        })
    }

    /// Hopping strength as an angular frequency in rad/ms (`2π · J/h[kHz]`).
    pub fn j_rad_per_ms(&self) -> f64 {
        std::f64::consts::TAU * self.hopping_j_khz
    }

    /// Rightward interference matrix `I = (U2 U1 + U4 U3) / 2`.
    pub fn interference_matrix(&self) -> Mat2 {
        let up = self.u2.matrix().mul(self.u1.matrix());
        let down = self.u4.matrix().mul(self.u3.matrix());
        up.add(&down).scale(C64::new(0.5, 0.0))
    }

    /// Loop operator `W = U3† U4† U2 U1` (clockwise plaquette transport from A).
    pub fn loop_operator(&self) -> Mat2 {
        self.u3
            .matrix()
            .adjoint()
            .mul(&self.u4.matrix().adjoint())
            .mul(self.u2.matrix())
            .mul(self.u1.matrix())
    }
}

/// Nilpotency index of a 2x2 matrix: smallest `m` with `m-th` power zero.
///
/// For 2x2 matrices this is decided exactly by Cayley-Hamilton: the index is 1
/// for the zero matrix, 2 when trace and determinant both vanish, and the
/// matrix is otherwise not nilpotent.
pub fn nilpotency_index(m: &Mat2, tol: f64) -> Option<u32> {
    if m.max_norm() <= tol {
        Some(1)
    } else if m.trace().norm() <= tol && m.det().norm() <= tol {
        Some(2)
    } else {
        None
    }
}

/// `true` iff `w` is proportional to the identity within `tol`.
pub fn is_abelian(w: &Mat2, tol: f64) -> bool {
    w.at(0, 1).norm() <= tol && w.at(1, 0).norm() <= tol && (w.at(0, 0) - w.at(1, 1)).norm() <= tol
}

/// The two internal amplitudes of a site, ordered (up, down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub up: C64,
    pub down: C64,
}

impl Spinor {
    pub fn new(up: C64, down: C64) -> Self {
        Spinor { up, down }
    }

    /// Rescale to unit norm. Returns `None` for the zero spinor.
    pub fn normalized(up: C64, down: C64) -> Option<Self> {
        let n = (up.norm_sqr() + down.norm_sqr()).sqrt();
        (n > 0.0).then(|| Spinor {
            up: up / n,
            down: down / n,
        })
    }

    pub fn norm(&self) -> f64 {
        (self.up.norm_sqr() + self.down.norm_sqr()).sqrt()
    }
}

/// Predicted caging sizes from the spinor-kernel criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CagingPrediction {
    /// Smallest `m` with `I^m χ = 0`, if any within the search cap.
    pub s_right: Option<u32>,
    /// Smallest `m` with `(I†)^m χ = 0`, if any within the search cap.
    pub s_left: Option<u32>,
    /// Overall caging size, the maximum of the two when both exist.
    pub s: Option<u32>,
}

/// Power-chain search cap; 2x2 kernel chains stabilize by m = 2 already.
const CAGING_POWER_CAP: u32 = 4;

/// Predict caging sizes for an initial spinor `chi` on an A site.
///
/// `s_right` is the smallest `m >= 1` with `‖I^m χ‖ <= tol` (none if no
/// `m <= 4` qualifies), and `s_left` likewise for `I†`.
pub fn predict_caging(cfg: &GaugeConfig, chi: &Spinor, tol: f64) -> CagingPrediction {
    let interference = cfg.interference_matrix();
    let s_right = kernel_power(&interference, chi, tol);
    let s_left = kernel_power(&interference.adjoint(), chi, tol);
    CagingPrediction {
        s_right,
        s_left,
        s: s_right.zip(s_left).map(|(r, l)| r.max(l)),
    }
}

fn kernel_power(m: &Mat2, chi: &Spinor, tol: f64) -> Option<u32> {
    let mut v = *chi;
    for k in 1..=CAGING_POWER_CAP {
        v = m.mul_spinor(&v);
        if v.norm() <= tol {
            return Some(k);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{config, fig2a_links, fig2b_links, fig3_links, fig4_links};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validate_unitary_accepts_identity() {
        assert!(validate_unitary(&Mat2::identity(), 1e-10));
    }

    #[test]
    fn validate_unitary_accepts_permutation() {
        let swap = Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]);
        assert!(validate_unitary(&swap, 1e-10));
    }

    #[test]
    fn validate_unitary_rejects_subunit_column() {
        let m = Mat2::from_real([[1.0, 0.0], [0.0, 0.5]]);
        assert!(!validate_unitary(&m, 1e-10));
    }

    #[test]
    fn interference_matrix_all_identity() {
        let i = config([Mat2::identity(); 4]).interference_matrix();
        assert!(i.approx_eq(&Mat2::identity(), 1e-15));
    }

    #[test]
    fn interference_matrix_fig2a() {
        let i = config(fig2a_links()).interference_matrix();
        assert!(i.approx_eq(&Mat2::from_real([[0.0, 1.0], [0.0, 0.0]]), 1e-15));
    }

    #[test]
    fn interference_matrix_fig3() {
        let i = config(fig3_links()).interference_matrix();
        let expected = Mat2([[c(0.5, 0.0), c(0.0, 0.5)], [c(0.0, 0.5), c(-0.5, 0.0)]]);
        assert!(i.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn nilpotency_index_shift_matrix() {
        let m = Mat2::from_real([[0.0, 1.0], [0.0, 0.0]]);
        assert_eq!(nilpotency_index(&m, ALGEBRA_TOL), Some(2));
    }

    #[test]
    fn nilpotency_index_zero_matrix() {
        assert_eq!(nilpotency_index(&Mat2::zero(), ALGEBRA_TOL), Some(1));
    }

    #[test]
    fn nilpotency_index_fig2b_interference() {
        // (U2 U1 + U4 U3)/2 for the fig2b link set, multiplied out by hand.
        let m = Mat2([[c(0.0, 0.0), c(0.5, 0.5)], [c(-0.5, 0.5), c(0.0, 0.0)]]);
        assert!(config(fig2b_links())
            .interference_matrix()
            .approx_eq(&m, 1e-15));
        assert_eq!(nilpotency_index(&m, ALGEBRA_TOL), None);
    }

    #[test]
    fn loop_operator_fig2a() {
        let w = config(fig2a_links()).loop_operator();
        assert!(w.approx_eq(&Mat2::from_real([[-1.0, 0.0], [0.0, 1.0]]), 1e-15));
    }

    #[test]
    fn loop_operator_trivial() {
        let w = config([Mat2::identity(); 4]).loop_operator();
        assert!(w.approx_eq(&Mat2::identity(), 1e-15));
    }

    #[test]
    fn loop_operator_fig4() {
        let w = config(fig4_links()).loop_operator();
        assert!(w.approx_eq(&Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]), 1e-15));
    }

    #[test]
    fn abelian_scalar_phase() {
        let phase = C64::from_polar(1.0, std::f64::consts::PI / 7.0);
        let w = Mat2::identity().scale(phase);
        assert!(is_abelian(&w, ALGEBRA_TOL));
    }

    #[test]
    fn non_abelian_diagonal_sign_flip() {
        let w = Mat2::from_real([[-1.0, 0.0], [0.0, 1.0]]);
        assert!(!is_abelian(&w, ALGEBRA_TOL));
    }

    #[test]
    fn non_abelian_off_diagonal() {
        let w = Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]]);
        assert!(!is_abelian(&w, ALGEBRA_TOL));
    }

    #[test]
    fn predict_caging_fig3_plus_state() {
        // (A_dn2 + i A_up2)/sqrt(2): spinor (i, 1)/sqrt(2).
        let chi = Spinor::normalized(c(0.0, 1.0), c(1.0, 0.0)).unwrap();
        let p = predict_caging(&config(fig3_links()), &chi, ALGEBRA_TOL);
        assert_eq!((p.s_right, p.s_left, p.s), (Some(2), Some(1), Some(2)));
    }

    #[test]
    fn predict_caging_fig3_minus_state() {
        let chi = Spinor::normalized(c(0.0, -1.0), c(1.0, 0.0)).unwrap();
        let p = predict_caging(&config(fig3_links()), &chi, ALGEBRA_TOL);
        assert_eq!((p.s_right, p.s_left, p.s), (Some(1), Some(2), Some(2)));
    }

    #[test]
    fn predict_caging_fig4_down_state() {
        // I = diag(1, 0) annihilates the pure-down spinor.
        let cfg = config(fig4_links());
        assert!(cfg
            .interference_matrix()
            .approx_eq(&Mat2::from_real([[1.0, 0.0], [0.0, 0.0]]), 1e-15));
        let chi = Spinor::new(C64::ZERO, C64::ONE);
        let p = predict_caging(&cfg, &chi, ALGEBRA_TOL);
        assert_eq!((p.s_right, p.s_left, p.s), (Some(1), Some(1), Some(1)));
    }

    #[test]
    fn predict_caging_fig2a_up_state() {
        let chi = Spinor::new(C64::ONE, C64::ZERO);
        let p = predict_caging(&config(fig2a_links()), &chi, ALGEBRA_TOL);
        assert_eq!((p.s_right, p.s_left, p.s), (Some(1), Some(2), Some(2)));
    }
}
