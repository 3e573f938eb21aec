//! Laboratory inputs to dimensionless wave parameters, and quantum numbers
//! back to particle momenta.
//!
//! Spectral work elsewhere in the crate runs in units with hbar = c = 1 and
//! k_p = 1. This module is the only place SI quantities appear.
//!
//! Conventions:
//! * `F0` is the peak field of a linearly polarized wave, `I = eps0 c F0^2 / 2`.
//! * The vector potential amplitude is kept in field units, `A0 = F0 / k0`
//!   (volts), so that the coupling constant is `eps = e / (hbar c)`.
//! * `mu0 = e F0 / (m c omega0)`.

use serde::{Deserialize, Serialize};

use crate::constants::{
    angular_frequency_from_ev, ELECTRON_MASS, ELECTRON_VOLT, ELEMENTARY_CHARGE, HBAR,
    SPEED_OF_LIGHT, VACUUM_PERMITTIVITY,
};
use crate::error::{domain, Error, Result};
use crate::inceop::SolutionKind;

/// Relative tolerance for the density / plasma-energy consistency check.
pub const DENSITY_CONSISTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserInput {
    /// Photon energy hbar*omega0 in eV.
    pub photon_energy_ev: f64,
    /// Peak intensity in W/cm^2.
    pub intensity_w_cm2: f64,
}

impl LaserInput {
    pub fn new(photon_energy_ev: f64, intensity_w_cm2: f64) -> Result<Self> {
        if !(photon_energy_ev > 0.0) || !photon_energy_ev.is_finite() {
            return Err(domain(format!(
                "photon energy must be positive, got {photon_energy_ev}"
            )));
        }
        if !(intensity_w_cm2 >= 0.0) || !intensity_w_cm2.is_finite() {
            return Err(domain(format!(
                "intensity must be non-negative, got {intensity_w_cm2}"
            )));
        }
        Ok(Self {
            photon_energy_ev,
            intensity_w_cm2,
        })
    }

    pub fn omega(&self) -> f64 {
        angular_frequency_from_ev(self.photon_energy_ev)
    }

    /// Vacuum wavenumber omega0/c, 1/m.
    pub fn k0(&self) -> f64 {
        self.omega() / SPEED_OF_LIGHT
    }

    /// Peak electric field F0 in V/m.
    pub fn field_amplitude(&self) -> f64 {
        field_amplitude_from_intensity(self.intensity_w_cm2).unwrap_or(f64::NAN)
    }

    /// Vector potential amplitude A0 = F0/k0 in volts.
    pub fn vector_potential_amplitude(&self) -> f64 {
        self.field_amplitude() / self.k0()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmaInput {
    /// Plasmon energy hbar*omega_p in eV.
    pub plasma_energy_ev: f64,
    /// Free-electron density in 1/cm^3, when the plasma was specified by density.
    pub electron_density_cm3: Option<f64>,
}

impl PlasmaInput {
    pub fn new(plasma_energy_ev: f64) -> Result<Self> {
        if !(plasma_energy_ev > 0.0) || !plasma_energy_ev.is_finite() {
            return Err(domain(format!(
                "plasma energy must be positive, got {plasma_energy_ev}"
            )));
        }
        Ok(Self {
            plasma_energy_ev,
            electron_density_cm3: None,
        })
    }

    /// Plasma specified by its free-electron density (omega_p^2 = n_e e^2 / (eps0 m_e)).
    pub fn from_density(electron_density_cm3: f64) -> Result<Self> {
        if !(electron_density_cm3 > 0.0) || !electron_density_cm3.is_finite() {
            return Err(domain(format!(
                "electron density must be positive, got {electron_density_cm3}"
            )));
        }
        let omega_p = plasma_frequency_from_density(electron_density_cm3);
        Ok(Self {
            plasma_energy_ev: HBAR * omega_p / ELECTRON_VOLT,
            electron_density_cm3: Some(electron_density_cm3),
        })
    }

    /// Both energy and density given; they must agree.
    pub fn with_density(plasma_energy_ev: f64, electron_density_cm3: f64) -> Result<Self> {
        let from_energy = Self::new(plasma_energy_ev)?;
        let from_density = Self::from_density(electron_density_cm3)?;
        let rel = (from_density.plasma_energy_ev - plasma_energy_ev).abs() / plasma_energy_ev;
        if rel > DENSITY_CONSISTENCY_TOL {
            return Err(domain(format!(
                "electron density {electron_density_cm3} cm^-3 implies hbar*omega_p = {} eV, \
                 inconsistent with the given {plasma_energy_ev} eV",
                from_density.plasma_energy_ev
            )));
        }
        Ok(Self {
            electron_density_cm3: Some(electron_density_cm3),
            ..from_energy
        })
    }

    pub fn omega(&self) -> f64 {
        angular_frequency_from_ev(self.plasma_energy_ev)
    }

    /// Plasma wavenumber k_p = omega_p / c, 1/m.
    pub fn k_p(&self) -> f64 {
        self.omega() / SPEED_OF_LIGHT
    }
}

/// omega_p in rad/s for a density in 1/cm^3.
pub fn plasma_frequency_from_density(electron_density_cm3: f64) -> f64 {
    let n_e = electron_density_cm3 * 1e6;
    (n_e * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (VACUUM_PERMITTIVITY * ELECTRON_MASS)).sqrt()
}

/// Peak electric field (V/m) of a linearly polarized wave of the given intensity (W/cm^2).
pub fn field_amplitude_from_intensity(intensity_w_cm2: f64) -> Result<f64> {
    if !(intensity_w_cm2 >= 0.0) {
        return Err(domain(format!(
            "intensity must be non-negative, got {intensity_w_cm2}"
        )));
    }
    let intensity_si = intensity_w_cm2 * 1e4;
    Ok((2.0 * intensity_si / (VACUUM_PERMITTIVITY * SPEED_OF_LIGHT)).sqrt())
}

/// Drude refractive index n_m = sqrt(1 - (omega_p/omega)^2).
pub fn refractive_index(plasma_energy_ev: f64, photon_energy_ev: f64) -> Result<f64> {
    if !(photon_energy_ev > 0.0) {
        return Err(domain(format!(
            "photon energy must be positive, got {photon_energy_ev}"
        )));
    }
    if !(plasma_energy_ev >= 0.0) {
        return Err(domain(format!(
            "plasma energy must be non-negative, got {plasma_energy_ev}"
        )));
    }
    if plasma_energy_ev >= photon_energy_ev {
        return Err(Error::Overdense {
            plasma_ev: plasma_energy_ev,
            photon_ev: photon_energy_ev,
        });
    }
    let ratio = plasma_energy_ev / photon_energy_ev;
    Ok(((1.0 - ratio) * (1.0 + ratio)).sqrt())
}

/// The coupling parameter a = 4 |eps| A0 / k_p = 4 e F0 c / (hbar omega0 omega_p).
///
/// No particle mass enters.
pub fn coupling_parameter_a(laser: &LaserInput, plasma: &PlasmaInput) -> Result<f64> {
    refractive_index(plasma.plasma_energy_ev, laser.photon_energy_ev)?;
    let f0 = field_amplitude_from_intensity(laser.intensity_w_cm2)?;
    Ok(4.0 * ELEMENTARY_CHARGE * f0 * SPEED_OF_LIGHT / (HBAR * laser.omega() * plasma.omega()))
}

/// The usual intensity parameter mu0 = e F0 / (m c omega0).
pub fn intensity_parameter_mu0(laser: &LaserInput, particle_mass_kg: f64) -> Result<f64> {
    if !(particle_mass_kg > 0.0) {
        return Err(domain(format!(
            "particle mass must be positive, got {particle_mass_kg}"
        )));
    }
    let f0 = field_amplitude_from_intensity(laser.intensity_w_cm2)?;
    Ok(ELEMENTARY_CHARGE * f0 / (particle_mass_kg * SPEED_OF_LIGHT * laser.omega()))
}

/// a / mu0 = 4 m c^2 / (hbar omega_p), independent of the laser.
pub fn coupling_to_intensity_ratio(plasma: &PlasmaInput, particle_mass_kg: f64) -> f64 {
    4.0 * particle_mass_kg * SPEED_OF_LIGHT * SPEED_OF_LIGHT / (HBAR * plasma.omega())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dispersion {
    /// rad/s
    pub omega: f64,
    /// m/s; infinite at the cutoff k_y = 0.
    pub v_ph: f64,
    /// m/s
    pub v_gr: f64,
}

/// Plasma-wave dispersion omega(k_y) = sqrt(omega_p^2 + (c k_y)^2).
pub fn dispersion(k_y: f64, plasma: &PlasmaInput) -> Result<Dispersion> {
    if !(k_y >= 0.0) {
        return Err(domain(format!("k_y must be non-negative, got {k_y}")));
    }
    let omega_p = plasma.omega();
    let ck = SPEED_OF_LIGHT * k_y;
    let omega = omega_p.hypot(ck);
    let v_ph = if k_y == 0.0 {
        f64::INFINITY
    } else {
        omega / k_y
    };
    let v_gr = SPEED_OF_LIGHT * ck / omega;
    Ok(Dispersion { omega, v_ph, v_gr })
}

/// Inverse of [`dispersion`]: k_y for a propagating frequency omega >= omega_p.
pub fn wavenumber_from(omega: f64, plasma: &PlasmaInput) -> Result<f64> {
    let omega_p = plasma.omega();
    if !(omega >= omega_p) {
        return Err(Error::Overdense {
            plasma_ev: plasma.plasma_energy_ev,
            photon_ev: HBAR * omega / ELECTRON_VOLT,
        });
    }
    Ok(((omega - omega_p) * (omega + omega_p)).sqrt() / SPEED_OF_LIGHT)
}

/// Laser, plasma and particle, from which every derived quantity follows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveConfig {
    pub laser: LaserInput,
    pub plasma: PlasmaInput,
    pub particle_mass_kg: f64,
}

impl WaveConfig {
    pub fn new(laser: LaserInput, plasma: PlasmaInput, particle_mass_kg: f64) -> Result<Self> {
        let cfg = Self {
            laser,
            plasma,
            particle_mass_kg,
        };
        cfg.derive()?;
        Ok(cfg)
    }

    pub fn electron(laser: LaserInput, plasma: PlasmaInput) -> Result<Self> {
        Self::new(laser, plasma, ELECTRON_MASS)
    }

    pub fn derive(&self) -> Result<DerivedQuantities> {
        DerivedQuantities::compute(&self.laser, &self.plasma, self.particle_mass_kg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub n_m: f64,
    /// 1/m
    pub k_p: f64,
    /// sqrt(1 - n_m^2)
    pub lambda: f64,
    pub a: f64,
    /// mc/hbar, 1/m
    pub kappa: f64,
    /// sqrt(kappa^2 + (eps A0)^2), 1/m
    pub kappa_star: f64,
    pub mu0: f64,
    /// m/s
    pub v_ph: f64,
    /// m/s
    pub v_gr: f64,
    /// V/m
    pub field_amplitude: f64,
    /// V
    pub vector_potential: f64,
    /// rad/s
    pub omega0: f64,
    /// rad/s
    pub omega_p: f64,
    /// 1/m
    pub k0: f64,
}

impl DerivedQuantities {
    pub fn compute(
        laser: &LaserInput,
        plasma: &PlasmaInput,
        particle_mass_kg: f64,
    ) -> Result<Self> {
        let n_m = refractive_index(plasma.plasma_energy_ev, laser.photon_energy_ev)?;
        let a = coupling_parameter_a(laser, plasma)?;
        let mu0 = intensity_parameter_mu0(laser, particle_mass_kg)?;
        let lambda = plasma.plasma_energy_ev / laser.photon_energy_ev;
        let k0 = laser.k0();
        let k_y = n_m * k0;
        let disp = dispersion(k_y, plasma)?;
        let field_amplitude = laser.field_amplitude();
        let vector_potential = field_amplitude / k0;
        let kappa = particle_mass_kg * SPEED_OF_LIGHT / HBAR;
        let eps_a0 = ELEMENTARY_CHARGE / (HBAR * SPEED_OF_LIGHT) * vector_potential;
        Ok(Self {
            n_m,
            k_p: plasma.k_p(),
            lambda,
            a,
            kappa,
            kappa_star: kappa.hypot(eps_a0),
            mu0,
            v_ph: disp.v_ph,
            v_gr: disp.v_gr,
            field_amplitude,
            vector_potential,
            omega0: laser.omega(),
            omega_p: plasma.omega(),
            k0,
        })
    }

    /// Dressed mass parameter in units of k_p.
    pub fn kappa_star_reduced(&self) -> f64 {
        self.kappa_star / self.k_p
    }
}

/// Quantized transverse momentum p_x in units of hbar*k_p, from 2 p_x = (q + 1) k_p.
///
/// Dirac families and the odd-q Klein-Gordon families (q = 2n - 1) give `n`;
/// the even-q Klein-Gordon families (q = 2n) give `n + 1/2`.
pub fn quantized_transverse_momentum(kind: SolutionKind, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(domain("quantum number n must be >= 1"));
    }
    Ok(0.5 * (kind.q(n) as f64 + 1.0))
}

/// Longitudinal parameter |k.p| / k_p^2 recovered from eta = 4 (k.p)^2 / k_p^4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Longitudinal {
    Propagating {
        k_dot_p: f64,
    },
    /// eta < 0: no real k.p.
    Evanescent {
        abs_eta: f64,
    },
}

impl Longitudinal {
    pub fn k_dot_p(&self) -> Option<f64> {
        match *self {
            Longitudinal::Propagating { k_dot_p } => Some(k_dot_p),
            Longitudinal::Evanescent { .. } => None,
        }
    }
}

pub fn eta_to_longitudinal(eta: f64) -> Longitudinal {
    if eta >= 0.0 {
        Longitudinal::Propagating {
            k_dot_p: 0.5 * eta.sqrt(),
        }
    } else {
        Longitudinal::Evanescent { abs_eta: -eta }
    }
}

/// Four-momentum of one polynomial state, in units of hbar*k_p.
///
/// `px` is the quantized value of the transverse momentum as it appears in
/// 2 p_x = (q + 1) k_p. For a negative charge in a wave with positive
/// amplitude A0 this is the covariant component, i.e. the contravariant
/// component is `-px` (see [`DeBroglieMomentum::contravariant`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeBroglieMomentum {
    pub p0: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub eta: f64,
    pub q: i64,
    pub n: u32,
    pub k_index: usize,
}

impl DeBroglieMomentum {
    /// Builds the momentum with k.p fixed by `eta` for a wave k = k0 (1, 0, n_m, 0)
    /// normalized to k^2 = 1, with the given p_y and p_z = 0.
    ///
    /// The dressed mass follows as p^2; see [`DeBroglieMomentum::invariant_mass_sq`].
    pub fn resolve(
        kind: SolutionKind,
        n: u32,
        k_index: usize,
        eta: f64,
        n_m: f64,
        py: f64,
    ) -> Result<Self> {
        if !(n_m > 0.0 && n_m < 1.0) {
            return Err(domain(format!(
                "refractive index must lie in (0,1), got {n_m}"
            )));
        }
        let k_dot_p = match eta_to_longitudinal(eta) {
            Longitudinal::Propagating { k_dot_p } => k_dot_p,
            Longitudinal::Evanescent { abs_eta } => {
                return Err(Error::Precondition(format!(
                    "eta = -{abs_eta} is evanescent; no real four-momentum"
                )))
            }
        };
        let px = quantized_transverse_momentum(kind, n)?;
        let k0 = 1.0 / ((1.0 - n_m) * (1.0 + n_m)).sqrt();
        // k.p = k0 (p0 - n_m py)
        let p0 = k_dot_p / k0 + n_m * py;
        Ok(Self {
            p0,
            px,
            py,
            pz: 0.0,
            eta,
            q: kind.q(n),
            n,
            k_index,
        })
    }

    /// Contravariant components (p^0, p^x, p^y, p^z) for a negative charge.
    pub fn contravariant(&self) -> [f64; 4] {
        [self.p0, -self.px, self.py, self.pz]
    }

    /// p^2 = p0^2 - px^2 - py^2 - pz^2.
    pub fn invariant_mass_sq(&self) -> f64 {
        self.p0 * self.p0 - self.px * self.px - self.py * self.py - self.pz * self.pz
    }

    pub fn k_dot_p(&self, n_m: f64) -> f64 {
        let k0 = 1.0 / ((1.0 - n_m) * (1.0 + n_m)).sqrt();
        k0 * (self.p0 - n_m * self.py)
    }
}
