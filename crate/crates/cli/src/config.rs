//! Run configuration: one TOML file with dotted sections, overridden by flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ince_volkov::constants::{ELECTRON_MASS, PROTON_MASS};
use ince_volkov::{LaserInput, PlasmaInput, SolutionFamily, SolutionKind};
use serde::Deserialize;

use crate::CliError;

/// Reference inputs used when neither a config file nor flags give them.
pub const DEFAULT_PHOTON_EV: f64 = 1.563;
pub const DEFAULT_INTENSITY_W_CM2: f64 = 1.0e8;
pub const DEFAULT_PLASMA_EV: f64 = 1.0;
pub const DEFAULT_FAMILY: &str = "dirac";
pub const DEFAULT_N: u32 = 20;
pub const DEFAULT_SEED: u64 = ince_volkov::verify::DEFAULT_SEED;
pub const DEFAULT_SAMPLES: usize = 1001;
pub const DEFAULT_FIGURE1_COUPLINGS: [f64; 2] = [14.0, 20.0];

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub laser: Option<LaserSection>,
    pub plasma: Option<PlasmaSection>,
    pub particle: Option<ParticleSection>,
    pub solution: Option<SolutionSection>,
    pub output: Option<OutputSection>,
    pub figure: Option<FigureSection>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LaserSection {
    pub photon_energy_ev: Option<f64>,
    pub intensity_w_cm2: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PlasmaSection {
    pub plasma_energy_ev: Option<f64>,
    pub electron_density_cm3: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParticleSection {
    pub species: Option<String>,
    pub mass_kg: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolutionSection {
    pub family: Option<String>,
    pub n: Option<u32>,
    /// Sets a directly instead of deriving it from laser and plasma.
    pub a: Option<f64>,
    pub k_select: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<String>,
    pub path: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FigureSection {
    pub couplings: Option<Vec<f64>>,
    pub samples: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Input(format!(
                "unknown format '{other}' (json|csv)"
            ))),
        }
    }
}

/// Values given on the command line; each one wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub family: Option<String>,
    pub n: Option<u32>,
    pub a: Option<f64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub photon_ev: Option<f64>,
    pub intensity: Option<f64>,
    pub plasma_ev: Option<f64>,
    pub k_select: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physical {
    pub laser: LaserInput,
    pub plasma: PlasmaInput,
    pub mass_kg: f64,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Absent when the file fixes `a` directly.
    pub physical: Option<Physical>,
    pub a_override: Option<f64>,
    pub family: SolutionFamily,
    pub k_select: Option<Vec<usize>>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub figure_couplings: Vec<f64>,
    pub samples: usize,
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

impl RunConfig {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Self, CliError> {
        let laser = file.laser.unwrap_or_default();
        let plasma = file.plasma.unwrap_or_default();
        let has_physical = laser != LaserSection::default() || plasma != PlasmaSection::default();
        let solution = file.solution.unwrap_or_default();
        if has_physical && solution.a.is_some() {
            return Err(CliError::Input(
                "config sets both [laser]/[plasma] and solution.a; exactly one may determine a"
                    .into(),
            ));
        }
        let a_override = flags.a.or(solution.a);
        if let Some(a) = a_override {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(CliError::Input(format!(
                    "a must be a finite non-negative number, got {a}"
                )));
            }
        }

        let physical =
            if solution.a.is_some() && flags.photon_ev.is_none() && flags.plasma_ev.is_none() {
                None
            } else {
                let photon = flags
                    .photon_ev
                    .or(laser.photon_energy_ev)
                    .unwrap_or(DEFAULT_PHOTON_EV);
                let intensity = flags
                    .intensity
                    .or(laser.intensity_w_cm2)
                    .unwrap_or(DEFAULT_INTENSITY_W_CM2);
                let laser = LaserInput::new(photon, intensity).map_err(input)?;
                let plasma = match (
                    flags.plasma_ev.or(plasma.plasma_energy_ev),
                    plasma.electron_density_cm3,
                ) {
                    (Some(e), Some(d)) => PlasmaInput::with_density(e, d),
                    (Some(e), None) => PlasmaInput::new(e),
                    (None, Some(d)) => PlasmaInput::from_density(d),
                    (None, None) => PlasmaInput::new(DEFAULT_PLASMA_EV),
                }
                .map_err(input)?;
                let particle = file.particle.unwrap_or_default();
                let mass_kg = match (particle.species.as_deref(), particle.mass_kg) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::Input(
                            "particle: give either species or mass_kg".into(),
                        ));
                    }
                    (None, Some(m)) if m > 0.0 && m.is_finite() => m,
                    (None, Some(m)) => {
                        return Err(CliError::Input(format!(
                            "particle mass must be positive, got {m}"
                        )))
                    }
                    (Some("electron"), None) | (None, None) => ELECTRON_MASS,
                    (Some("proton"), None) => PROTON_MASS,
                    (Some(other), None) => {
                        return Err(CliError::Input(format!(
                            "unknown species '{other}' (electron|proton)"
                        )));
                    }
                };
                Some(Physical {
                    laser,
                    plasma,
                    mass_kg,
                })
            };

        let family_name = flags
            .family
            .or(solution.family)
            .unwrap_or_else(|| DEFAULT_FAMILY.to_string());
        let kind = SolutionKind::from_str(&family_name).map_err(input)?;
        let n = flags.n.or(solution.n).unwrap_or(DEFAULT_N);
        let family = SolutionFamily::new(kind, n).map_err(input)?;

        let output = file.output.unwrap_or_default();
        let format = match flags.format.or(output.format) {
            Some(f) => f.parse()?,
            None => Format::Json,
        };
        let figure = file.figure.unwrap_or_default();
        let samples = figure.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(CliError::Input(format!(
                "figure.samples must be at least 2, got {samples}"
            )));
        }
        let figure_couplings = figure
            .couplings
            .unwrap_or_else(|| DEFAULT_FIGURE1_COUPLINGS.to_vec());
        if figure_couplings
            .iter()
            .any(|&a| !(a >= 0.0 && a.is_finite()))
        {
            return Err(CliError::Input(
                "figure.couplings must be finite and non-negative".into(),
            ));
        }
        let k_select = flags.k_select.or(solution.k_select);
        if let Some(ks) = &k_select {
            if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k > family.dim()) {
                return Err(CliError::Input(format!(
                    "k = {bad} outside 1..={} for {family}",
                    family.dim()
                )));
            }
        }
        Ok(Self {
            physical,
            a_override,
            family,
            k_select,
            format,
            out: flags.out.or(output.path),
            seed: flags.seed.or(output.seed).unwrap_or(DEFAULT_SEED),
            figure_couplings,
            samples,
        })
    }

    /// The coupling a: the override if present, otherwise derived from the
    /// physical inputs.
    pub fn coupling(&self) -> Result<f64, CliError> {
        if let Some(a) = self.a_override {
            return Ok(a);
        }
        let p = self
            .physical
            .as_ref()
            .ok_or_else(|| CliError::Input("no inputs determine a".into()))?;
        ince_volkov::physparams::coupling_parameter_a(&p.laser, &p.plasma).map_err(CliError::from)
    }
}
