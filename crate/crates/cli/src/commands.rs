use rayon::prelude::*;
use serde::Serialize;

use ince_volkov::eigensolve::{pair_splittings, PairSplitting};
use ince_volkov::physparams::{coupling_to_intensity_ratio, eta_to_longitudinal, Longitudinal};
use ince_volkov::verify::{
    default_grid, solve_and_verify, verify_point, CheckOptions, PointReport, ResidualReport,
};
use ince_volkov::wavefn::{
    contrast, envelope_profile, harmonic_strengths, nonpositive_fraction, sample_density,
};
use ince_volkov::{
    build_operator, DerivedQuantities, Normalization, SolutionFamily, SolutionKind, Spectrum,
};

use crate::config::{Format, RunConfig};
use crate::output::{emit, json, num, Csv, SCHEMA};
use crate::CliError;

fn write(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    emit(cfg.out.as_deref(), text)
}

fn solve(
    family: SolutionFamily,
    a: f64,
    seed: u64,
) -> Result<(Spectrum, Vec<ResidualReport>), CliError> {
    let op = build_operator(family, a)?;
    Ok(solve_and_verify(&op, seed)?)
}

fn count_note(family: SolutionFamily) -> Option<String> {
    match family.kind {
        SolutionKind::KgCosEven => Some(format!(
            "cosine family includes the constant harmonic r = 0: n + 1 = {} eigenvalues",
            family.dim()
        )),
        _ => None,
    }
}

#[derive(Serialize)]
struct Inputs {
    photon_energy_ev: f64,
    intensity_w_cm2: f64,
    plasma_energy_ev: f64,
    electron_density_cm3: Option<f64>,
    particle_mass_kg: f64,
}

#[derive(Serialize)]
struct ParamsReport {
    schema: &'static str,
    command: &'static str,
    inputs: Inputs,
    derived: DerivedQuantities,
    kappa_star_reduced: f64,
    a_over_mu0: f64,
    amplitude_contrast: f64,
    density_contrast: f64,
}

pub fn params(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.physical.ok_or_else(|| {
        CliError::Input("params needs laser and plasma inputs, not a fixed a".into())
    })?;
    let d = DerivedQuantities::compute(&p.laser, &p.plasma, p.mass_kg)?;
    let c = contrast(d.a)?;
    let a_over_mu0 = coupling_to_intensity_ratio(&p.plasma, p.mass_kg);
    match cfg.format {
        Format::Json => {
            let report = ParamsReport {
                schema: SCHEMA,
                command: "params",
                inputs: Inputs {
                    photon_energy_ev: p.laser.photon_energy_ev,
                    intensity_w_cm2: p.laser.intensity_w_cm2,
                    plasma_energy_ev: p.plasma.plasma_energy_ev,
                    electron_density_cm3: p.plasma.electron_density_cm3,
                    particle_mass_kg: p.mass_kg,
                },
                derived: d,
                kappa_star_reduced: d.kappa_star_reduced(),
                a_over_mu0,
                amplitude_contrast: c.amplitude,
                density_contrast: c.density,
            };
            write(cfg, &json(&report)?)
        }
        Format::Csv => {
            let mut csv = Csv::new(&["quantity", "value", "unit", "definition"]);
            let rows: [(&str, f64, &str, &str); 18] = [
                ("photon_energy", p.laser.photon_energy_ev, "eV", "hbar w0"),
                (
                    "intensity",
                    p.laser.intensity_w_cm2,
                    "W/cm^2",
                    "cycle-averaged I0",
                ),
                ("plasma_energy", p.plasma.plasma_energy_ev, "eV", "hbar w_p"),
                ("particle_mass", p.mass_kg, "kg", "m"),
                ("n_m", d.n_m, "1", "sqrt(1 - (w_p/w0)^2)"),
                ("lambda", d.lambda, "1", "w_p/w0 = sqrt(1 - n_m^2)"),
                ("k_p", d.k_p, "1/m", "w_p/c"),
                ("k0", d.k0, "1/m", "w0/c"),
                ("a", d.a, "1", "4 e F0 c/(hbar w0 w_p)"),
                ("mu0", d.mu0, "1", "e F0/(m c w0)"),
                ("a_over_mu0", a_over_mu0, "1", "4 m c^2/(hbar w_p)"),
                ("kappa", d.kappa, "1/m", "m c/hbar"),
                (
                    "kappa_star",
                    d.kappa_star,
                    "1/m",
                    "sqrt(kappa^2 + (e A0/(hbar c))^2)",
                ),
                ("v_ph", d.v_ph, "m/s", "w/k_y"),
                ("v_gr", d.v_gr, "m/s", "dw/dk_y = c^2/v_ph"),
                (
                    "field_amplitude",
                    d.field_amplitude,
                    "V/m",
                    "F0 = sqrt(2 I0/(eps0 c))",
                ),
                ("amplitude_contrast", c.amplitude, "1", "exp(a/2)"),
                ("density_contrast", c.density, "1", "exp(a)"),
            ];
            for (q, v, u, def) in rows {
                csv.row(vec![q.into(), num(v), u.into(), def.into()]);
            }
            write(cfg, &csv.render())
        }
    }
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    schema: &'static str,
    command: &'static str,
    family: SolutionKind,
    n: u32,
    q: i64,
    a: f64,
    dim: usize,
    etas: &'a [f64],
    vectors: &'a [Vec<f64>],
    residuals: &'a [f64],
    residual_tolerances: Vec<f64>,
    k_labels: &'a [usize],
    harmonics: Vec<f64>,
    longitudinal: Vec<Longitudinal>,
    notes: Vec<String>,
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let a = cfg.coupling()?;
    let (dec, reports) = solve(cfg.family, a, cfg.seed)?;
    let notes: Vec<String> = count_note(cfg.family).into_iter().collect();
    match cfg.format {
        Format::Json => {
            let report = SpectrumReport {
                schema: SCHEMA,
                command: "spectrum",
                family: cfg.family.kind,
                n: cfg.family.n,
                q: cfg.family.q(),
                a,
                dim: dec.dim(),
                etas: &dec.etas,
                vectors: &dec.vectors,
                residuals: &dec.residuals,
                residual_tolerances: reports.iter().map(|r| r.tol * r.scale).collect(),
                k_labels: &dec.k_labels,
                harmonics: cfg.family.harmonics(),
                longitudinal: dec.etas.iter().map(|&e| eta_to_longitudinal(e)).collect(),
                notes,
            };
            write(cfg, &json(&report)?)
        }
        Format::Csv => {
            let mut csv = Csv::new(&[
                "k (mode label; 1 = largest eta)",
                "eta (dimensionless eigenvalue of the three-term recurrence)",
                "ode_residual (max |f'' + a sin2z (f' + i s f) + (eta - q a cos2z) f| over sample points)",
                "residual_tolerance (1e-9 (1 + |eta| + a dim))",
                "k_dot_p (units of hbar k_p^2; sqrt(eta)/2; empty if eta < 0)",
            ]);
            csv.comment(format!(
                "family={} n={} q={} a={}",
                cfg.family.kind,
                cfg.family.n,
                cfg.family.q(),
                num(a)
            ));
            for n in &notes {
                csv.comment(n.clone());
            }
            for k in 1..=dec.dim() {
                let i = dec.index_of_label(k).expect("labels cover 1..=dim");
                let kdp = eta_to_longitudinal(dec.etas[i])
                    .k_dot_p()
                    .map(num)
                    .unwrap_or_default();
                let r = &reports[i];
                csv.row(vec![
                    k.to_string(),
                    num(dec.etas[i]),
                    num(r.max_residual),
                    num(r.tol * r.scale),
                    kdp,
                ]);
            }
            write(cfg, &csv.render())
        }
    }
}

#[derive(Serialize)]
struct ModeEntry {
    k: usize,
    eta: f64,
    ode_residual: f64,
    harmonics: Vec<f64>,
    coefficients: Vec<f64>,
    nonpositive_fraction: f64,
    xi: Vec<f64>,
    density: Vec<f64>,
}

#[derive(Serialize)]
struct ModesReport {
    schema: &'static str,
    command: &'static str,
    family: SolutionKind,
    n: u32,
    a: f64,
    density_definition: &'static str,
    modes: Vec<ModeEntry>,
}

pub fn modes(cfg: &RunConfig) -> Result<(), CliError> {
    let a = cfg.coupling()?;
    let (dec, _) = solve(cfg.family, a, cfg.seed)?;
    let ks: Vec<usize> = cfg
        .k_select
        .clone()
        .unwrap_or_else(|| (1..=dec.dim()).collect());
    let strengths = harmonic_strengths(&dec);
    let mut entries = Vec::with_capacity(ks.len());
    for &k in &ks {
        let m = ince_volkov::Modulation::from_decomposition(&dec, k)?;
        let prof = sample_density(&m, cfg.samples)?;
        let i = dec.index_of_label(k).expect("validated label");
        entries.push(ModeEntry {
            k,
            eta: m.eta,
            ode_residual: dec.residuals[i],
            harmonics: cfg.family.harmonics(),
            coefficients: m.coefficients.clone(),
            nonpositive_fraction: nonpositive_fraction(&strengths, k),
            xi: prof.xi,
            density: prof.values,
        });
    }
    match cfg.format {
        Format::Json => write(
            cfg,
            &json(&ModesReport {
                schema: SCHEMA,
                command: "modes",
                family: cfg.family.kind,
                n: cfg.family.n,
                a,
                density_definition: "|polynomial part|^2 exp(-(a/2) cos xi)",
                modes: entries,
            })?,
        ),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "k (mode label)",
                "eta (eigenvalue)",
                "xi (rad; phase k.x)",
                "density (|polynomial part|^2 exp(-(a/2) cos xi); unnormalized)",
            ]);
            csv.comment(format!(
                "family={} n={} a={}",
                cfg.family.kind,
                cfg.family.n,
                num(a)
            ));
            for e in &entries {
                for (x, d) in e.xi.iter().zip(&e.density) {
                    csv.row(vec![e.k.to_string(), num(e.eta), num(*x), num(*d)]);
                }
            }
            write(cfg, &csv.render())
        }
    }
}

pub fn figure(cfg: &RunConfig, which: u8) -> Result<(), CliError> {
    match which {
        1 => figure1(cfg),
        2 => figure2(cfg),
        3 => figure3(cfg),
        other => Err(CliError::Input(format!("no figure {other} (1, 2 or 3)"))),
    }
}

#[derive(Serialize)]
struct EnvelopeCurve {
    a: f64,
    min: f64,
    max: f64,
    min_over_max: f64,
    amplitude_contrast: f64,
    density_contrast: f64,
    density: Vec<f64>,
}

#[derive(Serialize)]
struct Figure1Report {
    schema: &'static str,
    command: &'static str,
    definition: &'static str,
    xi: Vec<f64>,
    curves: Vec<EnvelopeCurve>,
}

fn figure1(cfg: &RunConfig) -> Result<(), CliError> {
    let mut curves = Vec::new();
    let mut xi = Vec::new();
    for &a in &cfg.figure_couplings {
        let prof = envelope_profile(a, cfg.samples, Normalization::PeakOne)?;
        let c = contrast(a)?;
        let (min, max) = (prof.min(), prof.max());
        xi = prof.xi;
        curves.push(EnvelopeCurve {
            a,
            min,
            max,
            min_over_max: min / max,
            amplitude_contrast: c.amplitude,
            density_contrast: c.density,
            density: prof.values,
        });
    }
    match cfg.format {
        Format::Json => write(
            cfg,
            &json(&Figure1Report {
                schema: SCHEMA,
                command: "figure1",
                definition: "exp(-(a/2)(1 + cos xi)), peak value 1",
                xi,
                curves,
            })?,
        ),
        Format::Csv => {
            let mut header = vec!["xi (rad; phase k.x)".to_string()];
            for c in &curves {
                header.push(format!(
                    "density_a{} (exp(-(a/2)(1 + cos xi)); peak 1)",
                    c.a
                ));
            }
            let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let mut csv = Csv::new(&header);
            for c in &curves {
                csv.comment(format!(
                    "a={} min/max={} amplitude_contrast={} density_contrast={}",
                    c.a,
                    num(c.min_over_max),
                    num(c.amplitude_contrast),
                    num(c.density_contrast)
                ));
            }
            for (i, x) in xi.iter().enumerate() {
                let mut row = vec![num(*x)];
                row.extend(curves.iter().map(|c| num(c.density[i])));
                csv.row(row);
            }
            write(cfg, &csv.render())
        }
    }
}

fn figure_families(cfg: &RunConfig) -> Result<[SolutionFamily; 2], CliError> {
    let n = cfg.family.n;
    Ok([
        SolutionFamily::new(SolutionKind::DiracPlus, n)?,
        SolutionFamily::new(SolutionKind::KgCosEven, n)?,
    ])
}

fn particle(kind: SolutionKind) -> &'static str {
    if kind.is_dirac() {
        "dirac"
    } else {
        "klein-gordon"
    }
}

#[derive(Serialize)]
struct SpectrumSummary {
    particle: &'static str,
    family: SolutionKind,
    n: u32,
    a: f64,
    etas: Vec<f64>,
    k_labels: Vec<usize>,
    min_relative_gap: f64,
    pairs: Vec<PairSplitting<f64>>,
}

#[derive(Serialize)]
struct Figure2Report {
    schema: &'static str,
    command: &'static str,
    spectra: Vec<SpectrumSummary>,
    notes: Vec<String>,
}

fn figure2(cfg: &RunConfig) -> Result<(), CliError> {
    let a = cfg.coupling()?;
    let mut spectra = Vec::new();
    let mut notes = Vec::new();
    for f in figure_families(cfg)? {
        let (dec, _) = solve(f, a, cfg.seed)?;
        notes.extend(count_note(f));
        spectra.push(SpectrumSummary {
            particle: particle(f.kind),
            family: f.kind,
            n: f.n,
            a,
            etas: dec.etas.clone(),
            k_labels: dec.k_labels.clone(),
            min_relative_gap: dec.min_relative_gap(),
            pairs: pair_splittings(&dec),
        });
    }
    match cfg.format {
        Format::Json => write(
            cfg,
            &json(&Figure2Report {
                schema: SCHEMA,
                command: "figure2",
                spectra,
                notes,
            })?,
        ),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "particle",
                "k (mode label; 1 = largest eta)",
                "eta (dimensionless eigenvalue)",
                "pair_partner_k (mutual nearest neighbour; empty if unpaired)",
                "pair_relative_splitting (|eta_k - eta_partner| / spectral spread)",
            ]);
            csv.comment(format!("n={} a={}", cfg.family.n, num(a)));
            for n in &notes {
                csv.comment(n.clone());
            }
            for s in &spectra {
                let mut rows: Vec<(usize, f64)> = s
                    .k_labels
                    .iter()
                    .copied()
                    .zip(s.etas.iter().copied())
                    .collect();
                rows.sort_by_key(|r| r.0);
                for (k, eta) in rows {
                    let pair = s.pairs.iter().find(|p| p.k_upper == k || p.k_lower == k);
                    let (partner, rel) = match pair {
                        Some(p) => {
                            let other = if p.k_upper == k { p.k_lower } else { p.k_upper };
                            (other.to_string(), num(p.relative_splitting))
                        }
                        None => (String::new(), String::new()),
                    };
                    csv.row(vec![
                        s.particle.into(),
                        k.to_string(),
                        num(eta),
                        partner,
                        rel,
                    ]);
                }
            }
            write(cfg, &csv.render())
        }
    }
}

#[derive(Serialize)]
struct StrengthRow {
    particle: &'static str,
    k: usize,
    r: f64,
    strength: f64,
}

#[derive(Serialize)]
struct Figure3Report {
    schema: &'static str,
    command: &'static str,
    n: u32,
    a: f64,
    definition: &'static str,
    nonpositive_fraction_k1: Vec<(&'static str, f64)>,
    rows: Vec<StrengthRow>,
}

fn figure3(cfg: &RunConfig) -> Result<(), CliError> {
    let a = cfg.coupling()?;
    let mut rows = Vec::new();
    let mut fractions = Vec::new();
    for f in figure_families(cfg)? {
        let (dec, _) = solve(f, a, cfg.seed)?;
        let strengths = harmonic_strengths(&dec);
        fractions.push((particle(f.kind), nonpositive_fraction(&strengths, 1)));
        rows.extend(strengths.into_iter().map(|h| StrengthRow {
            particle: particle(f.kind),
            k: h.k,
            r: h.r,
            strength: h.strength,
        }));
    }
    match cfg.format {
        Format::Json => write(
            cfg,
            &json(&Figure3Report {
                schema: SCHEMA,
                command: "figure3",
                n: cfg.family.n,
                a,
                definition: "squared coefficient of harmonic r in mode k; each k sums to 1",
                nonpositive_fraction_k1: fractions,
                rows,
            })?,
        ),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "particle",
                "k (mode label; 1 = largest eta)",
                "r (harmonic number in xi)",
                "strength (squared coefficient; sums to 1 over r)",
            ]);
            csv.comment(format!("n={} a={}", cfg.family.n, num(a)));
            for (p, frac) in &fractions {
                csv.comment(format!(
                    "{p}: fraction of k=1 strength at r <= 0 = {}",
                    num(*frac)
                ));
            }
            for r in rows {
                csv.row(vec![
                    r.particle.into(),
                    r.k.to_string(),
                    num(r.r),
                    num(r.strength),
                ]);
            }
            write(cfg, &csv.render())
        }
    }
}

#[derive(Serialize)]
struct VerifyReport {
    schema: &'static str,
    command: &'static str,
    seed: u64,
    pass: bool,
    point_count: usize,
    failures: Vec<String>,
    notes: Vec<String>,
    points: Vec<PointReport>,
}

/// Largest |eta - m^2| over a spectrum at a = 0, with eta and m sorted.
fn degeneration_deviation(family: SolutionFamily, seed: u64) -> Result<f64, CliError> {
    let (dec, _) = solve(family, 0.0, seed)?;
    let mut squares: Vec<f64> = family
        .frequencies()
        .iter()
        .map(|&m| (m * m) as f64)
        .collect();
    squares.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    Ok(dec
        .etas
        .iter()
        .zip(&squares)
        .map(|(e, s)| (e - s).abs())
        .fold(0.0, f64::max))
}

pub fn verify(cfg: &RunConfig, all: bool, corrupt_eta: f64) -> Result<(), CliError> {
    let grid: Vec<(SolutionFamily, f64)> = if all {
        default_grid()
    } else {
        vec![(cfg.family, cfg.coupling()?)]
    };
    let opts = CheckOptions {
        seed: cfg.seed,
        eta_perturbation: corrupt_eta,
    };
    let mut points = grid
        .par_iter()
        .map(|&(f, a)| verify_point(f, a, opts))
        .collect::<Result<Vec<_>, _>>()?;
    points.sort_by(|x, y| x.family.cmp(&y.family).then(x.a.total_cmp(&y.a)));

    let mut notes = Vec::new();
    let mut families: Vec<SolutionFamily> =
        grid.iter().filter(|g| g.1 == 0.0).map(|g| g.0).collect();
    families.dedup();
    for f in families {
        let dev = degeneration_deviation(f, cfg.seed)?;
        notes.push(format!(
            "{f} a=0: exact degeneration, max |eta - m^2| = {}",
            num(dev)
        ));
    }
    let failures: Vec<String> = points
        .iter()
        .flat_map(|p| p.failures.iter().cloned())
        .collect();
    let pass = failures.is_empty();
    let report = VerifyReport {
        schema: SCHEMA,
        command: "verify",
        seed: cfg.seed,
        pass,
        point_count: points.len(),
        failures: failures.clone(),
        notes,
        points,
    };
    match cfg.format {
        Format::Json => write(cfg, &json(&report)?)?,
        Format::Csv => {
            let mut csv = Csv::new(&[
                "family",
                "n",
                "a",
                "dim",
                "max_ode_ratio (residual / (1 + |eta| + a dim); limit 1e-9)",
                "worst_k",
                "sturm_discrepancy (max |eta - bisection eta|; limit 1e-9)",
                "dense_discrepancy (max |eta - dense eta|; limit 1e-9)",
                "dense_max_imag (limit 1e-10)",
                "min_relative_gap (smallest gap / spread)",
                "pass",
            ]);
            csv.comment(format!("seed={} pass={}", cfg.seed, report.pass));
            for n in &report.notes {
                csv.comment(n.clone());
            }
            for p in &report.points {
                csv.row(vec![
                    p.family.kind.to_string(),
                    p.family.n.to_string(),
                    num(p.a),
                    p.dim.to_string(),
                    num(p.max_ode_ratio),
                    p.worst_k.to_string(),
                    num(p.sturm_discrepancy),
                    num(p.dense_discrepancy),
                    num(p.dense_max_imag),
                    num(p.min_relative_gap),
                    p.pass.to_string(),
                ]);
            }
            write(cfg, &csv.render())?
        }
    }
    if pass {
        Ok(())
    } else {
        for f in &failures {
            eprintln!("FAIL {f}");
        }
        Err(CliError::Verification(format!(
            "{} failing checks",
            failures.len()
        )))
    }
}
