//! Site encoding and Hamiltonian construction.
//!
//! One unit cell of the rhombic lattice holds three sites A, B, C with two
//! spin modes each. The ion realization stores A on the ground Zeeman levels
//! |g=1,2>, B on |e=3,4>, C on |e=5,6>, and replicates cells along the Fock
//! ladder |n> of the motional mode:
//!
//! ```text
//! A_{up/dn n} <-> (1/2, n)     B_{up/dn n} <-> (3/4, n)     C_{up/dn n} <-> (5/6, n)
//! ```
//!
//! Intra-cell bonds (A_n - B_n, A_n - C_n) are carrier transitions; inter-cell
//! bonds (B_n - A_{n+1}, C_n - A_{n+1}) are red sidebands and therefore carry
//! a sqrt(n+1) amplitude factor.
//!
//! All energies are angular frequencies in rad/ms (hbar = 1); configuration
//! accepts J/h in kHz and trap frequencies in MHz and converts via 2 pi.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gauge::GaugeConfig;

/// Number of encoded internal levels.
pub const LEVELS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SiteKind {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// A lattice site: unit cell, sublattice letter, and spin mode.
///
/// The derived ordering is the enumeration order used throughout:
/// `A_up0, A_dn0, B_up0, B_dn0, C_up0, C_dn0, A_up1, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteIndex {
    pub cell: usize,
    pub kind: SiteKind,
    pub spin: Spin,
}

impl SiteIndex {
    pub fn new(kind: SiteKind, spin: Spin, cell: usize) -> Self {
        SiteIndex { cell, kind, spin }
    }

    /// Internal level 1..=6 carrying this site.
    pub fn level(&self) -> u8 {
        let base = match self.kind {
            SiteKind::A => 1,
            SiteKind::B => 3,
            SiteKind::C => 5,
        };
        base + match self.spin {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    fn from_level(level: u8, cell: usize) -> Option<Self> {
        let (kind, spin) = match level {
            1 => (SiteKind::A, Spin::Up),
            2 => (SiteKind::A, Spin::Down),
            3 => (SiteKind::B, Spin::Up),
            4 => (SiteKind::B, Spin::Down),
            5 => (SiteKind::C, Spin::Up),
            6 => (SiteKind::C, Spin::Down),
            _ => return None,
        };
        Some(SiteIndex { cell, kind, spin })
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            SiteKind::A => 'A',
            SiteKind::B => 'B',
            SiteKind::C => 'C',
        };
        let spin = match self.spin {
            Spin::Up => "up",
            Spin::Down => "dn",
        };
        write!(f, "{kind}_{spin}{}", self.cell)
    }
}

impl FromStr for SiteIndex {
    type Err = Error;

    /// Parses labels like `A_up2`, `B_dn0`, `c_down12` (underscores optional).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse site label {s:?}"));
        let mut rest = s.trim();
        let kind = match rest.chars().next().ok_or_else(bad)? {
            'A' | 'a' => SiteKind::A,
            'B' | 'b' => SiteKind::B,
            'C' | 'c' => SiteKind::C,
            _ => return Err(bad()),
        };
        rest = rest[1..].trim_start_matches('_');
        let spin = if let Some(r) = rest.strip_prefix("up") {
            rest = r;
            Spin::Up
        } else if let Some(r) = rest
            .strip_prefix("down")
            .or_else(|| rest.strip_prefix("dn"))
        {
            rest = r;
            Spin::Down
        } else {
            return Err(bad());
        };
        let digits = rest.trim_start_matches('_');
        let cell = digits.parse::<usize>().map_err(|_| bad())?;
        Ok(SiteIndex { cell, kind, spin })
    }
}

/// Trapped-ion parameters: Lamb-Dicke factor, trap frequency, and cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonSpec {
    /// Lamb-Dicke factor, dimensionless, in (0, 1).
    pub eta: f64,
    /// Trap frequency as an angular rate in rad/ms.
    pub omega_trap: f64,
    /// Phonon simulation cutoff: Fock states 0..=n_max are kept.
    pub n_max: usize,
    /// Phonon detection cutoff (n_detect <= n_max).
    pub n_detect: usize,
}

impl IonSpec {
    pub fn new(eta: f64, trap_freq_mhz: f64, n_max: usize, n_detect: usize) -> Result<Self> {
        let spec = IonSpec {
            eta,
            omega_trap: TAU * trap_freq_mhz * 1e3,
            n_max,
            n_detect,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::Config(format!(
                "eta must lie in (0, 1), got {}",
                self.eta
            )));
        }
        if self.n_detect > self.n_max {
            return Err(Error::Config(format!(
                "detection window exceeds simulation cutoff: n_detect = {} > n_max = {}",
                self.n_detect, self.n_max
            )));
        }
        Ok(())
    }

    /// Full Hilbert-space dimension, 6 (n_max + 1).
    pub fn dim(&self) -> usize {
        LEVELS * (self.n_max + 1)
    }
}

impl Default for IonSpec {
    /// The reference operating point: eta = 0.1, omega = 2 pi x 2 MHz,
    /// simulation cutoff 15, detection cutoff 7.
    fn default() -> Self {
        IonSpec {
            eta: 0.1,
            omega_trap: TAU * 2e3,
            n_max: 15,
            n_detect: 7,
        }
    }
}

/// Bijection between lattice sites and (internal level, Fock number) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodingMap {
    n_max: usize,
}

impl EncodingMap {
    pub fn new(n_max: usize) -> Self {
        EncodingMap { n_max }
    }

    pub fn for_ion(ion: &IonSpec) -> Self {
        EncodingMap { n_max: ion.n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        LEVELS * (self.n_max + 1)
    }

    /// Map a site to its (internal level, Fock number) pair.
    pub fn encode(&self, site: &SiteIndex) -> Result<(u8, usize)> {
        if site.cell > self.n_max {
            return Err(Error::OutOfLattice {
                site: site.to_string(),
                n_max: self.n_max,
            });
        }
        Ok((site.level(), site.cell))
    }

    /// Inverse of [`encode`](Self::encode).
    pub fn decode(&self, level: u8, fock: usize) -> Result<SiteIndex> {
        if fock > self.n_max {
            return Err(Error::OutOfLattice {
                site: format!("(level {level}, n {fock})"),
                n_max: self.n_max,
            });
        }
        SiteIndex::from_level(level, fock)
            .ok_or_else(|| Error::Config(format!("internal level {level} out of 1..=6")))
    }

    /// Flat basis index of a site; internal level is the slow axis.
    pub fn basis_index(&self, site: &SiteIndex) -> Result<usize> {
        let (level, fock) = self.encode(site)?;
        Ok(self.index_of(level, fock))
    }

    pub fn index_of(&self, level: u8, fock: usize) -> usize {
        (level as usize - 1) * (self.n_max + 1) + fock
    }

    pub fn site_of_index(&self, index: usize) -> SiteIndex {
        let per = self.n_max + 1;
        let level = (index / per) as u8 + 1;
        let fock = index % per;
        SiteIndex::from_level(level, fock).expect("index within 6 (n_max+1)")
    }

    /// Detected sites in enumeration order: cells `0..n_detect` in full plus
    /// the two spins of `A_{n_detect}` (44 sites for n_detect = 7).
    pub fn detection_window(&self, n_detect: usize) -> Vec<SiteIndex> {
        let mut sites = Vec::with_capacity(LEVELS * n_detect + 2);
        for cell in 0..n_detect {
            for level in 1..=LEVELS as u8 {
                sites.push(SiteIndex::from_level(level, cell).unwrap());
            }
        }
        sites.push(SiteIndex::new(SiteKind::A, Spin::Up, n_detect));
        sites.push(SiteIndex::new(SiteKind::A, Spin::Down, n_detect));
        sites
    }
}

/// One laser tone: coupling strength (rad/ms) and phase (rad, in [0, 2 pi)).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Tone {
    pub rabi: f64,
    pub phase: f64,
}

impl Tone {
    fn from_complex(z: C64) -> Self {
        let rabi = z.norm();
        if rabi == 0.0 {
            Tone::default()
        } else {
            Tone {
                rabi,
                phase: z.arg().rem_euclid(TAU),
            }
        }
    }

    fn as_complex(&self) -> C64 {
        C64::from_polar(self.rabi, self.phase)
    }
}

/// Carrier and red-sideband tone table indexed by (g in 1..=2, e in 3..=6).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LaserParams {
    car: [[Tone; 4]; 2],
    rsb: [[Tone; 4]; 2],
}

impl LaserParams {
    pub fn car(&self, g: u8, e: u8) -> Tone {
        self.car[g as usize - 1][e as usize - 3]
    }

    pub fn rsb(&self, g: u8, e: u8) -> Tone {
        self.rsb[g as usize - 1][e as usize - 3]
    }

    pub fn set_car(&mut self, g: u8, e: u8, tone: Tone) {
        self.car[g as usize - 1][e as usize - 3] = tone;
    }

    pub fn set_rsb(&mut self, g: u8, e: u8, tone: Tone) {
        self.rsb[g as usize - 1][e as usize - 3] = tone;
    }

    pub fn rsb_tones(&self) -> impl Iterator<Item = Tone> + '_ {
        self.rsb.iter().flatten().copied()
    }
}

/// Laser amplitudes and phases realizing the four links of `cfg`.
///
/// Carrier tones couple A_n to B_n / C_n with the U1 / U3 entries; red
/// sidebands couple B_n / C_n to A_{n+1} with the U2 / U4 entries. The
/// inversion is fixed by requiring that the driven Hamiltonian reproduce the
/// lattice form exactly, which resolves the index-layout ambiguity between
/// the carrier and sideband tone tables:
///
/// ```text
/// Omega_car(g,e)  e^{i phi} = (J/hbar)        U_{1|3}[e-base, g-1]
/// Omega_rsb(g,e)  e^{i phi} = -i (J/hbar eta) conj(U_{2|4}[g-1, e-base])
/// ```
pub fn link_to_laser(cfg: &GaugeConfig, ion: &IonSpec) -> LaserParams {
    let j = cfg.j_rad_per_ms();
    let mut params = LaserParams::default();
    for g in 1..=2u8 {
        for e in 3..=6u8 {
            let (car_link, rsb_link, base) = if e < 5 {
                (cfg.u1.matrix(), cfg.u2.matrix(), 3)
            } else {
                (cfg.u3.matrix(), cfg.u4.matrix(), 5)
            };
            let row = (e - base) as usize;
            let col = (g - 1) as usize;
            params.set_car(g, e, Tone::from_complex(car_link.at(row, col) * j));
            let z = -C64::i() * (j / ion.eta) * rsb_link.at(col, row).conj();
            params.set_rsb(g, e, Tone::from_complex(z));
        }
    }
    params
}

/// Ion-frame Hamiltonian from explicit laser parameters:
///
/// ```text
/// H = sum Omega_car (|e><g| e^{i phi} ⊗ I_ph + h.c.)
///   + sum eta Omega_rsb (i |e><g| e^{i phi} ⊗ a_ph + h.c.)
/// ```
///
/// truncated at `n_max`, with `a_ph |n> = sqrt(n) |n-1>`.
pub fn build_ion_hamiltonian(params: &LaserParams, ion: &IonSpec) -> DMatrix<C64> {
    let enc = EncodingMap::for_ion(ion);
    let mut h = DMatrix::zeros(enc.dim(), enc.dim());
    for g in 1..=2u8 {
        for e in 3..=6u8 {
            let car = params.car(g, e).as_complex();
            if car != C64::ZERO {
                for n in 0..=ion.n_max {
                    let gi = enc.index_of(g, n);
                    let ei = enc.index_of(e, n);
                    h[(ei, gi)] += car;
                    h[(gi, ei)] += car.conj();
                }
            }
            let rsb = C64::i() * ion.eta * params.rsb(g, e).as_complex();
            if rsb != C64::ZERO {
                for n in 0..ion.n_max {
                    let root = ((n + 1) as f64).sqrt();
                    let gi = enc.index_of(g, n + 1);
                    let ei = enc.index_of(e, n);
                    h[(ei, gi)] += rsb * root;
                    h[(gi, ei)] += rsb.conj() * root;
                }
            }
        }
    }
    h
}

/// Couplings of one rhombic bond pattern, shared by the flat and modulated
/// builders. `inter_scale(n)` multiplies the B_n/C_n -> A_{n+1} bonds.
fn build_lattice_hamiltonian<F>(cfg: &GaugeConfig, n_max: usize, inter_scale: F) -> DMatrix<C64>
where
    F: Fn(usize) -> f64,
{
    let enc = EncodingMap::new(n_max);
    let j = cfg.j_rad_per_ms();
    let mut h = DMatrix::zeros(enc.dim(), enc.dim());
    let mut couple = |to_level: [u8; 2],
                      from_level: [u8; 2],
                      to_n: usize,
                      from_n: usize,
                      u: &crate::gauge::Mat2,
                      scale: f64| {
        for (r, &tl) in to_level.iter().enumerate() {
            for (cidx, &fl) in from_level.iter().enumerate() {
                let z = u.at(r, cidx) * (j * scale);
                if z != C64::ZERO {
                    let ti = enc.index_of(tl, to_n);
                    let fi = enc.index_of(fl, from_n);
                    h[(ti, fi)] += z;
                    h[(fi, ti)] += z.conj();
                }
            }
        }
    };
    let a = [1u8, 2];
    let b = [3u8, 4];
    let c = [5u8, 6];
    for n in 0..=n_max {
        // Intra-cell: b_n† U1 a_n and c_n† U3 a_n.
        couple(b, a, n, n, cfg.u1.matrix(), 1.0);
        couple(c, a, n, n, cfg.u3.matrix(), 1.0);
    }
    for n in 0..n_max {
        // Inter-cell: a_{n+1}† U2 b_n and a_{n+1}† U4 c_n.
        let s = inter_scale(n);
        couple(a, b, n + 1, n, cfg.u2.matrix(), s);
        couple(a, c, n + 1, n, cfg.u4.matrix(), s);
    }
    h
}

/// Flat rhombic-lattice Hamiltonian with uniform hopping J on every bond.
///
/// `extent` is the number of inter-cell bonds; A sites span cells
/// `0..=extent`. Couplings that would leave the truncated ladder are dropped.
pub fn build_ideal_hamiltonian(cfg: &GaugeConfig, extent: usize) -> Result<DMatrix<C64>> {
    if extent < 2 {
        return Err(Error::Config(format!(
            "lattice extent must be >= 2, got {extent}"
        )));
    }
    Ok(build_lattice_hamiltonian(cfg, extent, |_| 1.0))
}

/// Ion-realized lattice Hamiltonian: identical to the flat lattice except the
/// inter-cell bonds B_n/C_n -> A_{n+1} carry the red-sideband factor
/// sqrt(n+1). Equals [`build_ion_hamiltonian`] of [`link_to_laser`] entrywise.
pub fn ion_hamiltonian_lattice_form(cfg: &GaugeConfig, ion: &IonSpec) -> DMatrix<C64> {
    build_lattice_hamiltonian(cfg, ion.n_max, |n| ((n + 1) as f64).sqrt())
}

/// Worst-case population lost to off-resonant carrier excitation by a
/// sideband tone: `max over RSB tones of Omega^2 / (Omega^2 + omega^2)`.
pub fn off_resonant_excitation_estimate(cfg: &GaugeConfig, ion: &IonSpec) -> f64 {
    let params = link_to_laser(cfg, ion);
    params
        .rsb_tones()
        .map(|t| {
            let o2 = t.rabi * t.rabi;
            if o2 == 0.0 {
                0.0
            } else {
                o2 / (o2 + ion.omega_trap * ion.omega_trap)
            }
        })
        .fold(0.0, f64::max)
}
