//! Independent checks of the computed solutions.
//!
//! * [`ode_residual`] plugs an eigenpair back into the reduced equation, with
//!   derivatives of the trigonometric sum taken term by term.
//! * [`dense_oracle_crosscheck`] solves the unsymmetrized operator with a
//!   general dense eigensolver.
//! * [`pde_residual_fd`] assembles the full wave in (t, x, y) and applies the
//!   second-order operator with central differences.
//!
//! None of these reuse the QL path or the symmetrization of `eigensolve`.
//!
//! Charge conventions for the assembled wave: eps < 0 and A0 > 0, so that
//! eps*A0 = -a/4 in units of k_p. With these signs the reduced equation with
//! `+i f` belongs to lambda_s = +lambda, and the quantized p_x is the covariant
//! component (p^x = -(q+1)/2).

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eigensolve::{
    solve_spectrum, sturm_bisection_oracle, symmetrize, SpectralDecomposition,
};
use crate::error::{Error, Result};
use crate::inceop::{build_operator, Basis, SolutionFamily, SolutionKind, TridiagonalOperator};
use crate::physparams::{quantized_transverse_momentum, DeBroglieMomentum};
use crate::scalar::Real;
use crate::wavefn::ModulationFunction;

/// Seed of the pseudo-random sample points.
pub const DEFAULT_SEED: u64 = 0x11CE;
/// ODE residual tolerance, relative to 1 + |eta| + a*dim.
pub const ODE_TOL: f64 = 1e-9;
/// Allowed eigenvalue disagreement between solver, Sturm oracle and dense oracle.
pub const ORACLE_TOL: f64 = 1e-9;
/// Bracket width for the Sturm oracle.
pub const STURM_BRACKET: f64 = 1e-11;
/// Largest imaginary part tolerated in the dense spectrum.
pub const DENSE_IMAG_TOL: f64 = 1e-10;
/// Largest operator handed to the dense oracle.
pub const DENSE_MAX_DIM: usize = 200;
/// Equidistant z samples per residual report.
pub const EQUIDISTANT_SAMPLES: usize = 256;
/// Pseudo-random z samples per residual report.
pub const RANDOM_SAMPLES: usize = 32;
/// Spacetime points for the PDE check.
pub const PDE_POINTS: usize = 64;
/// Default finite-difference step, in plasma lengths 1/k_p.
pub const PDE_STEP: f64 = 1e-3;
/// Coupling values of the default verification grid.
pub const GRID_COUPLINGS: [f64; 6] = [0.0, 0.5, 1.0, 5.0, 14.0, 20.0];
/// Largest n of the default verification grid.
pub const GRID_MAX_N: u32 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Summation {
    Plain,
    /// Neumaier-compensated accumulation of the per-harmonic terms.
    Compensated,
}

/// 256 equidistant points on [0, 2 pi) followed by 32 seeded uniform points.
pub fn residual_samples(seed: u64) -> Vec<f64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out: Vec<f64> = (0..EQUIDISTANT_SAMPLES)
        .map(|i| two_pi * i as f64 / EQUIDISTANT_SAMPLES as f64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.extend((0..RANDOM_SAMPLES).map(|_| rng.gen_range(0.0..two_pi)));
    out
}

#[derive(Debug, Clone, Copy)]
struct Accumulator<T> {
    sum: T,
    comp: T,
    compensated: bool,
}

impl<T: Real> Accumulator<T> {
    fn new(compensated: bool) -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
            compensated,
        }
    }

    fn add(&mut self, x: T) {
        if !self.compensated {
            self.sum = self.sum + x;
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    fn value(&self) -> T {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub family: SolutionFamily,
    pub n: u32,
    pub a: f64,
    pub k_index: usize,
    pub eta: f64,
    pub max_residual: f64,
    pub sample_count: usize,
    pub seed: u64,
    /// 1 + |eta| + a * dim
    pub scale: f64,
    pub tol: f64,
    pub summation: Summation,
    pub pass: bool,
}

/// Max over `z_samples` of |f'' + a sin2z (f' + i s f) + (eta - q a cos2z) f|
/// for `f` the trigonometric sum with the given coefficients.
pub fn ode_residual_at<T: Real>(
    family: SolutionFamily,
    a: T,
    eta: T,
    coefficients: &[T],
    z_samples: &[T],
    summation: Summation,
) -> Result<T> {
    let freqs = family.frequencies();
    if coefficients.len() != freqs.len() {
        return Err(Error::DimensionMismatch {
            expected: freqs.len(),
            got: coefficients.len(),
        });
    }
    let q = T::from_int(family.q());
    let s = T::from_int(family.kind.spin_sign());
    let two = T::lit(2.0);
    let mut worst = T::zero();
    for &z in z_samples {
        let (sin2, cos2) = ((two * z).sin(), (two * z).cos());
        let potential = eta - q * a * cos2;
        let mut re = Accumulator::new(summation == Summation::Compensated);
        let mut im = Accumulator::new(summation == Summation::Compensated);
        for (&m, &c) in freqs.iter().zip(coefficients) {
            let mf = T::from_int(m);
            let (sn, cs) = ((mf * z).sin(), (mf * z).cos());
            // basis value, first and second derivative, as complex numbers
            let (phi, dphi, ddphi) = match family.kind.basis() {
                Basis::Exponential => {
                    let phi = Complex::new(cs, -sn);
                    (phi, phi * Complex::new(T::zero(), -mf), phi * (-mf * mf))
                }
                Basis::Cosine => (
                    Complex::new(cs, T::zero()),
                    Complex::new(-mf * sn, T::zero()),
                    Complex::new(-mf * mf * cs, T::zero()),
                ),
                Basis::Sine => (
                    Complex::new(sn, T::zero()),
                    Complex::new(mf * cs, T::zero()),
                    Complex::new(-mf * mf * sn, T::zero()),
                ),
            };
            let term =
                ddphi + (dphi + phi * Complex::new(T::zero(), s)) * (a * sin2) + phi * potential;
            re.add(c * term.re);
            im.add(c * term.im);
        }
        worst = worst.max(re.value().hypot(im.value()));
    }
    Ok(worst)
}

/// Residual report for one eigenpair over the standard sample set.
pub fn ode_residual(
    family: SolutionFamily,
    a: f64,
    k_index: usize,
    eta: f64,
    coefficients: &[f64],
    seed: u64,
    summation: Summation,
) -> Result<ResidualReport> {
    let samples = residual_samples(seed);
    let max_residual = ode_residual_at(family, a, eta, coefficients, &samples, summation)?;
    let scale = 1.0 + eta.abs() + a * family.dim() as f64;
    Ok(ResidualReport {
        family,
        n: family.n,
        a,
        k_index,
        eta,
        max_residual,
        sample_count: samples.len(),
        seed,
        scale,
        tol: ODE_TOL,
        summation,
        pass: max_residual < ODE_TOL * scale,
    })
}

/// Like [`ode_residual`], re-running in compensated mode when the plain result
/// lands within a factor 10 of the tolerance.
pub fn ode_residual_checked(
    family: SolutionFamily,
    a: f64,
    k_index: usize,
    eta: f64,
    coefficients: &[f64],
    seed: u64,
) -> Result<ResidualReport> {
    let plain = ode_residual(
        family,
        a,
        k_index,
        eta,
        coefficients,
        seed,
        Summation::Plain,
    )?;
    if plain.max_residual * 10.0 < plain.tol * plain.scale {
        return Ok(plain);
    }
    ode_residual(
        family,
        a,
        k_index,
        eta,
        coefficients,
        seed,
        Summation::Compensated,
    )
}

/// Fills `dec.residuals` with the ODE residual of every pair.
pub fn attach_residuals(
    dec: &mut SpectralDecomposition<f64>,
    seed: u64,
) -> Result<Vec<ResidualReport>> {
    let mut reports = Vec::with_capacity(dec.dim());
    for i in 0..dec.dim() {
        reports.push(ode_residual_checked(
            dec.family,
            dec.a,
            dec.k_labels[i],
            dec.etas[i],
            &dec.vectors[i],
            seed,
        )?);
    }
    dec.residuals = reports.iter().map(|r| r.max_residual).collect();
    Ok(reports)
}

pub fn solve_and_verify(
    op: &TridiagonalOperator<f64>,
    seed: u64,
) -> Result<(SpectralDecomposition<f64>, Vec<ResidualReport>)> {
    let mut dec = solve_spectrum(op)?;
    let reports = attach_residuals(&mut dec, seed)?;
    Ok((dec, reports))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseCheck {
    /// Sorted real parts of the dense spectrum.
    pub eigenvalues: Vec<f64>,
    pub max_imag: f64,
    pub max_discrepancy: f64,
}

/// Spectrum of the dense, unsymmetrized operator; compared against `reference`
/// (ascending) when given.
pub fn dense_oracle_crosscheck(
    op: &TridiagonalOperator<f64>,
    reference: &[f64],
) -> Result<DenseCheck> {
    let dim = op.dim();
    if dim > DENSE_MAX_DIM {
        return Err(Error::Precondition(format!(
            "dense oracle limited to dim <= {DENSE_MAX_DIM}, got {dim}"
        )));
    }
    let rows = op.to_dense();
    let mut m = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
    balance(&mut m);
    let spectrum = m.complex_eigenvalues();
    let max_imag = spectrum.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag >= DENSE_IMAG_TOL {
        return Err(Error::Structural(format!(
            "{}: dense spectrum has imaginary part {max_imag:e}",
            op.family
        )));
    }
    let mut eigenvalues: Vec<f64> = spectrum.iter().map(|z| z.re).collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let max_discrepancy = if reference.is_empty() {
        0.0
    } else {
        if reference.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: reference.len(),
            });
        }
        eigenvalues
            .iter()
            .zip(reference)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    Ok(DenseCheck {
        eigenvalues,
        max_imag,
        max_discrepancy,
    })
}

/// Diagonal balancing: Parlett-Reinsch sweeps by powers of two, then
/// Osborne sweeps with exact factors until row and column 2-norms agree.
/// Leaves the spectrum unchanged.
pub fn balance(m: &mut DMatrix<f64>) {
    let pattern = OffDiagonalPattern::of(m);
    balance_radix2(m, &pattern);
    for _ in 0..BALANCE_MAX_SWEEPS {
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            let (c, r) = pattern.norms(m, i, |x| x * x);
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let f = (r / c).sqrt().sqrt();
            worst = worst.max((f - 1.0).abs());
            pattern.rescale(m, i, f);
        }
        if worst < 1e-12 {
            break;
        }
    }
}

const BALANCE_MAX_SWEEPS: usize = 500;

/// Off-diagonal nonzeros of each row and column. Diagonal similarity keeps
/// the pattern fixed, so it is computed once.
struct OffDiagonalPattern {
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl OffDiagonalPattern {
    fn of(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let rows = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && m[(i, j)] != 0.0).collect())
            .collect();
        let cols = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && m[(j, i)] != 0.0).collect())
            .collect();
        Self { rows, cols }
    }

    /// (column sum, row sum) of `g` over the off-diagonal entries of index i.
    fn norms(&self, m: &DMatrix<f64>, i: usize, g: impl Fn(f64) -> f64) -> (f64, f64) {
        let c = self.cols[i].iter().map(|&j| g(m[(j, i)])).sum();
        let r = self.rows[i].iter().map(|&j| g(m[(i, j)])).sum();
        (c, r)
    }

    /// Row i divided by f, column i multiplied by f.
    fn rescale(&self, m: &mut DMatrix<f64>, i: usize, f: f64) {
        for &j in &self.rows[i] {
            m[(i, j)] /= f;
        }
        for &j in &self.cols[i] {
            m[(j, i)] *= f;
        }
    }
}

fn balance_radix2(m: &mut DMatrix<f64>, pattern: &OffDiagonalPattern) {
    let radix = 2.0f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..m.nrows() {
            let (mut c, r) = pattern.norms(m, i, f64::abs);
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * total {
                done = false;
                pattern.rescale(m, i, f);
            }
        }
    }
}

/// Max disagreement between `reference` and the Sturm bisection oracle.
pub fn sturm_crosscheck(op: &TridiagonalOperator<f64>, reference: &[f64]) -> Result<f64> {
    let (sym, _) = symmetrize(op)?;
    let oracle = sturm_bisection_oracle(&sym, STURM_BRACKET)?;
    Ok(oracle
        .iter()
        .zip(reference)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// One spacetime point (t, x, y) in units of 1/k_p (c = 1).
pub type SpacetimePoint = [f64; 3];

/// Seeded points inside one period of the wave along t, x and y.
pub fn pde_sample_points(n_m: f64, count: usize, seed: u64) -> Vec<SpacetimePoint> {
    let k0 = 1.0 / ((1.0 - n_m) * (1.0 + n_m)).sqrt();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            [
                rng.gen_range(0.0..two_pi / k0),
                rng.gen_range(0.0..two_pi),
                rng.gen_range(0.0..two_pi / (k0 * n_m)),
            ]
        })
        .collect()
}

/// Full wave `Psi(t, x, y) = modulation(xi) exp(-i P.x)` with `xi = k.x`.
#[derive(Debug, Clone)]
pub struct AssembledWave<'a> {
    pub modulation: &'a ModulationFunction<f64>,
    pub k0: f64,
    pub n_m: f64,
    /// Contravariant P = p - (k.p / k^2) k.
    pub transverse: [f64; 4],
}

impl<'a> AssembledWave<'a> {
    pub fn new(
        modulation: &'a ModulationFunction<f64>,
        momentum: &DeBroglieMomentum,
        n_m: f64,
    ) -> Self {
        let k0 = 1.0 / ((1.0 - n_m) * (1.0 + n_m)).sqrt();
        let k = [k0, 0.0, k0 * n_m, 0.0];
        let p = momentum.contravariant();
        let k_dot_p = k[0] * p[0] - k[2] * p[2];
        let transverse = [p[0] - k_dot_p * k[0], p[1], p[2] - k_dot_p * k[2], p[3]];
        Self {
            modulation,
            k0,
            n_m,
            transverse,
        }
    }

    pub fn phase(&self, t: f64, y: f64) -> f64 {
        self.k0 * (t - self.n_m * y)
    }

    pub fn value(&self, t: f64, x: f64, y: f64) -> Complex64 {
        let [p0, px, py, _] = self.transverse;
        let dot = p0 * t - px * x - py * y;
        self.modulation.value(self.phase(t, y)) * Complex64::from_polar(1.0, -dot)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeReport {
    pub family: SolutionFamily,
    pub k_index: usize,
    pub eta: f64,
    pub step: f64,
    pub residual_h: f64,
    pub residual_half_h: f64,
    /// log2(residual_h / residual_half_h)
    pub order: f64,
    /// max |Psi| over the sample points
    pub wave_scale: f64,
}

fn pde_max_residual(
    wave: &AssembledWave<'_>,
    a: f64,
    spin_sign: f64,
    kappa_sq: f64,
    points: &[SpacetimePoint],
    h: f64,
) -> (f64, f64) {
    let eps_a0 = -a / 4.0;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &[t, x, y] in points {
        let psi = wave.value(t, x, y);
        let d2 = |f: &dyn Fn(f64) -> Complex64| (f(h) - psi * 2.0 + f(-h)) / (h * h);
        let psi_tt = d2(&|d| wave.value(t + d, x, y));
        let psi_xx = d2(&|d| wave.value(t, x + d, y));
        let psi_yy = d2(&|d| wave.value(t, x, y + d));
        let psi_x = (wave.value(t, x + h, y) - wave.value(t, x - h, y)) / (2.0 * h);
        let xi = wave.phase(t, y);
        let (s, c) = xi.sin_cos();
        let i = Complex64::i();
        // Pi^2 Psi for A^mu = (0, A0 cos xi, 0, 0)
        let pi_sq = -(psi_tt - psi_xx - psi_yy)
            - i * (2.0 * eps_a0 * c) * psi_x
            - psi * (eps_a0 * eps_a0 * c * c);
        // -i eps F0 chi'(xi) lambda_s Psi, with eps F0 lambda = eps A0 k_p = -a/4
        let spin = -i * (eps_a0 * (-s) * spin_sign) * psi;
        let residual = pi_sq - psi * kappa_sq + spin;
        worst = worst.max(residual.norm());
        scale = scale.max(psi.norm());
    }
    (worst, scale)
}

/// Finite-difference residual of the second-order wave equation on the
/// assembled wave, at steps `h` and `h/2`.
///
/// The mass enters only through `kappa_sq`; the momentum must lie on the
/// dressed shell p^2 = kappa^2 + (a/4)^2 and carry the family's quantized p_x.
pub fn pde_residual_fd(
    modulation: &ModulationFunction<f64>,
    momentum: &DeBroglieMomentum,
    n_m: f64,
    kappa_sq: f64,
    points: &[SpacetimePoint],
    h: f64,
) -> Result<PdeReport> {
    let family = modulation.family;
    let a = modulation.a;
    if !(h > 0.0 && h < 0.1) {
        return Err(Error::Precondition(format!(
            "finite-difference step must lie in (0, 0.1), got {h}"
        )));
    }
    let px = quantized_transverse_momentum(family.kind, family.n)?;
    if momentum.px != px {
        return Err(Error::Precondition(format!(
            "p_x = {} is not the quantized value {px} of {family}",
            momentum.px
        )));
    }
    let shell = kappa_sq + a * a / 16.0;
    let p_sq = momentum.invariant_mass_sq();
    if (p_sq - shell).abs() > 1e-9 * (1.0 + shell.abs()) {
        return Err(Error::Precondition(format!(
            "momentum is off the dressed mass shell: p^2 = {p_sq}, kappa*^2 = {shell}"
        )));
    }
    let wave = AssembledWave::new(modulation, momentum, n_m);
    let spin_sign = family.kind.spin_sign() as f64;
    let (residual_h, wave_scale) = pde_max_residual(&wave, a, spin_sign, kappa_sq, points, h);
    let (residual_half_h, _) = pde_max_residual(&wave, a, spin_sign, kappa_sq, points, h / 2.0);
    Ok(PdeReport {
        family,
        k_index: modulation.k_index,
        eta: momentum.eta,
        step: h,
        residual_h,
        residual_half_h,
        order: (residual_h / residual_half_h).log2(),
        wave_scale,
    })
}

/// Momentum with p_y = 0 for a mode, together with the kappa^2 that puts it on
/// the dressed shell.
pub fn on_shell_momentum(
    modulation: &ModulationFunction<f64>,
    eta: f64,
    n_m: f64,
) -> Result<(DeBroglieMomentum, f64)> {
    let f = modulation.family;
    let m = DeBroglieMomentum::resolve(f.kind, f.n, modulation.k_index, eta, n_m, 0.0)?;
    let kappa_sq = m.invariant_mass_sq() - modulation.a * modulation.a / 16.0;
    Ok((m, kappa_sq))
}

/// Central-difference residual of a free plane wave exp(-i p.x), which is
/// not zero but known in closed form: sum over axes of g^{mu mu} times the
/// stencil defect p_mu^2 - (2 - 2 cos(p_mu h)) / h^2.
pub fn plane_wave_stencil_defect(p: [f64; 3], h: f64) -> f64 {
    let defect = |k: f64| k * k - (2.0 - 2.0 * (k * h).cos()) / (h * h);
    // Pi^2 = -(d_tt - d_xx - d_yy); the symbol of d_tt is -p0^2.
    (defect(p[0]) - defect(p[1]) - defect(p[2])).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub kind: SolutionKind,
    pub n: u32,
    pub a_milli: u64,
}

/// Result of all checks at one (family, n, a).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub family: SolutionFamily,
    pub a: f64,
    pub dim: usize,
    pub eigenvalue_count: usize,
    pub max_ode_ratio: f64,
    pub worst_k: usize,
    pub compensated_reruns: usize,
    pub sturm_discrepancy: f64,
    pub dense_discrepancy: f64,
    pub dense_max_imag: f64,
    pub min_relative_gap: f64,
    pub pass: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Added to every eigenvalue before the residual check. Zero in normal runs.
    pub eta_perturbation: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            eta_perturbation: 0.0,
        }
    }
}

/// Runs the residual, Sturm and dense checks for one grid point.
pub fn verify_point(family: SolutionFamily, a: f64, opts: CheckOptions) -> Result<PointReport> {
    let op = build_operator(family, a)?;
    let dec = solve_spectrum(&op)?;
    let mut failures = Vec::new();
    let mut max_ratio: f64 = 0.0;
    let mut worst_k = 0;
    let mut reruns = 0;
    for i in 0..dec.dim() {
        let eta = dec.etas[i] + opts.eta_perturbation;
        let rep =
            ode_residual_checked(family, a, dec.k_labels[i], eta, &dec.vectors[i], opts.seed)?;
        if rep.summation == Summation::Compensated {
            reruns += 1;
        }
        let ratio = rep.max_residual / rep.scale;
        if ratio > max_ratio {
            max_ratio = ratio;
            worst_k = rep.k_index;
        }
        if !rep.pass {
            failures.push(format!(
                "ode residual {family} a={a} k={}: {:e} >= {:e}",
                rep.k_index,
                rep.max_residual,
                rep.tol * rep.scale
            ));
        }
    }
    let sturm_discrepancy = match sturm_crosscheck(&op, &dec.etas) {
        Ok(d) => d,
        Err(e) => {
            failures.push(format!("sturm oracle {family} a={a}: {e}"));
            f64::NAN
        }
    };
    if !(sturm_discrepancy < ORACLE_TOL) {
        failures.push(format!(
            "sturm discrepancy {family} a={a}: {sturm_discrepancy:e}"
        ));
    }
    let (dense_discrepancy, dense_max_imag) = match dense_oracle_crosscheck(&op, &dec.etas) {
        Ok(d) => (d.max_discrepancy, d.max_imag),
        Err(e) => {
            failures.push(format!("dense oracle {family} a={a}: {e}"));
            (f64::NAN, f64::NAN)
        }
    };
    if !(dense_discrepancy < ORACLE_TOL) {
        failures.push(format!(
            "dense discrepancy {family} a={a}: {dense_discrepancy:e}"
        ));
    }
    if dec.dim() != family.dim() {
        failures.push(format!(
            "eigenvalue count {} != {}",
            dec.dim(),
            family.dim()
        ));
    }
    Ok(PointReport {
        family,
        a,
        dim: family.dim(),
        eigenvalue_count: dec.dim(),
        max_ode_ratio: max_ratio,
        worst_k,
        compensated_reruns: reruns,
        sturm_discrepancy,
        dense_discrepancy,
        dense_max_imag,
        min_relative_gap: dec.min_relative_gap(),
        pass: failures.is_empty(),
        failures,
    })
}

/// Every family, n = 1..=25, a in {0, 0.5, 1, 5, 14, 20}.
pub fn default_grid() -> Vec<(SolutionFamily, f64)> {
    let mut grid = Vec::new();
    for kind in SolutionKind::ALL {
        for n in 1..=GRID_MAX_N {
            for &a in &GRID_COUPLINGS {
                grid.push((SolutionFamily { kind, n }, a));
            }
        }
    }
    grid
}

/// Runs [`verify_point`] over a grid; reports sorted by (family, n, a).
pub fn verify_grid(grid: &[(SolutionFamily, f64)], opts: CheckOptions) -> Result<Vec<PointReport>> {
    let mut reports = grid
        .iter()
        .map(|&(f, a)| verify_point(f, a, opts))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|x, y| {
        x.family
            .cmp(&y.family)
            .then(x.a.partial_cmp(&y.a).expect("finite a"))
    });
    Ok(reports)
}
