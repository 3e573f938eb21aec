//! Gamma matrices in the Majorana representation and the spin-field
//! interaction eigenproblem.
//!
//! For k = k0 (1, 0, n_m, 0) and e_x = (0, 1, 0, 0) the matrix
//! `M = (gamma.k)(gamma.e_x) / k0` squares to `(1 - n_m^2) I`, so its spectrum
//! is `+-lambda`, each twice, with `lambda = sqrt(1 - n_m^2)`. The eigenvectors
//! are taken from the spectral projectors `(I +- M/lambda) / 2`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Metric signature (+, -, -, -).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Eigen-equation residual accepted for M u = lambda_s u.
const EIGEN_RESIDUAL_TOL: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn block(
    tl: [[Complex64; 2]; 2],
    tr: [[Complex64; 2]; 2],
    bl: [[Complex64; 2]; 2],
    br: [[Complex64; 2]; 2],
) -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    for r in 0..2 {
        for col in 0..2 {
            m[(r, col)] = tl[r][col];
            m[(r, col + 2)] = tr[r][col];
            m[(r + 2, col)] = bl[r][col];
            m[(r + 2, col + 2)] = br[r][col];
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    /// gamma^0 .. gamma^3 (upper index).
    pub gammas: [Matrix4<Complex64>; 4],
    pub metric: [f64; 4],
}

impl GammaSet {
    /// gamma.v = g_{mu nu} gamma^mu v^nu for a contravariant v.
    pub fn slash(&self, v: [f64; 4]) -> Matrix4<Complex64> {
        (0..4).fold(Matrix4::zeros(), |acc, mu| {
            acc + self.gammas[mu] * c(self.metric[mu] * v[mu])
        })
    }

    /// Largest entrywise deviation of {gamma^mu, gamma^nu} from 2 g^{mu nu} I.
    pub fn anticommutator_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let ac = self.gammas[mu] * self.gammas[nu] + self.gammas[nu] * self.gammas[mu];
                let g = if mu == nu { 2.0 * self.metric[mu] } else { 0.0 };
                let target = Matrix4::<Complex64>::identity() * c(g);
                worst = worst.max((ac - target).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Largest |Re| over all entries; zero for a Majorana set.
    pub fn max_real_part(&self) -> f64 {
        self.gammas
            .iter()
            .flat_map(|g| g.iter())
            .map(|z| z.re.abs())
            .fold(0.0, f64::max)
    }

    /// sigma_{mu nu} = (i/2) [gamma_mu, gamma_nu], lower indices.
    pub fn sigma_lower(&self, mu: usize, nu: usize) -> Matrix4<Complex64> {
        let gl = |k: usize| self.gammas[k] * c(self.metric[k]);
        (gl(mu) * gl(nu) - gl(nu) * gl(mu)) * (I * 0.5)
    }
}

/// The purely imaginary Majorana representation.
pub fn build_majorana_gammas() -> GammaSet {
    let z = c(0.0);
    let one = c(1.0);
    // sigma_1, sigma_2, sigma_3
    let s1 = [[z, one], [one, z]];
    let s2 = [[z, -I], [I, z]];
    let s3 = [[one, z], [z, -one]];
    let zero = [[z, z], [z, z]];
    let scale = |m: [[Complex64; 2]; 2], f: Complex64| m.map(|row| row.map(|x| x * f));
    let g0 = block(zero, s2, s2, zero);
    let g1 = block(scale(s3, I), zero, zero, scale(s3, I));
    let g2 = block(zero, scale(s2, -one), s2, zero);
    let g3 = block(scale(s1, -I), zero, zero, scale(s1, -I));
    GammaSet {
        gammas: [g0, g1, g2, g3],
        metric: METRIC,
    }
}

/// sigma_{mu nu} F^{mu nu} for the plane wave A^mu = e_x^mu A0 chi(k.x),
/// evaluated where chi'(xi) = `chi_prime`.
pub fn field_spin_coupling(
    gammas: &GammaSet,
    k: [f64; 4],
    a0: f64,
    chi_prime: f64,
) -> Matrix4<Complex64> {
    let e = [0.0, 1.0, 0.0, 0.0];
    let mut out = Matrix4::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let f = a0 * chi_prime * (k[mu] * e[nu] - k[nu] * e[mu]);
            if f != 0.0 {
                out += gammas.sigma_lower(mu, nu) * c(f);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinEigensystem {
    pub n_m: f64,
    /// sqrt(1 - n_m^2)
    pub lambda: f64,
    /// (gamma.k)(gamma.e_x) / k0
    pub matrix: Matrix4<Complex64>,
    /// Descending: (+lambda, +lambda, -lambda, -lambda).
    pub eigenvalues: [f64; 4],
    pub eigenvectors: [Vector4<Complex64>; 4],
}

impl SpinEigensystem {
    /// max_s ||M u_s - lambda_s u_s||_inf
    pub fn eigen_residual(&self) -> f64 {
        (0..4)
            .map(|s| {
                let r = self.matrix * self.eigenvectors[s]
                    - self.eigenvectors[s] * c(self.eigenvalues[s]);
                r.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Smallest singular value of the matrix whose columns are u_1..u_4.
    pub fn basis_min_singular_value(&self) -> f64 {
        let u = Matrix4::from_columns(&self.eigenvectors);
        u.svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// (gamma.k)(gamma.e_x) with k = k0 (1, 0, n_m, 0), not divided by k0.
pub fn spin_interaction_raw(gammas: &GammaSet, k0: f64, n_m: f64) -> Matrix4<Complex64> {
    gammas.slash([k0, 0.0, k0 * n_m, 0.0]) * gammas.slash([0.0, 1.0, 0.0, 0.0])
}

fn gram_schmidt_pick(columns: &[Vector4<Complex64>], count: usize) -> Vec<Vector4<Complex64>> {
    let mut basis: Vec<Vector4<Complex64>> = Vec::with_capacity(count);
    for col in columns {
        let mut v = *col;
        for b in &basis {
            let proj = b.dotc(&v);
            v -= b * proj;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / c(norm));
            if basis.len() == count {
                break;
            }
        }
    }
    basis
}

pub fn spin_interaction_matrix(n_m: f64, gammas: &GammaSet) -> Result<SpinEigensystem> {
    if !(n_m > 0.0 && n_m < 1.0) {
        return Err(domain(format!(
            "refractive index must lie in (0,1), got {n_m}"
        )));
    }
    let k0 = 1.0;
    let matrix = spin_interaction_raw(gammas, k0, n_m) / c(k0);
    let lambda = ((1.0 - n_m) * (1.0 + n_m)).sqrt();

    let schur_vals = matrix.schur().eigenvalues().ok_or_else(|| {
        Error::Structural("Schur form of the spin matrix is not triangular".into())
    })?;
    let mut eigenvalues = [0.0; 4];
    for (slot, z) in eigenvalues.iter_mut().zip(schur_vals.iter()) {
        if z.im.abs() > 1e-12 {
            return Err(Error::Structural(format!(
                "spin matrix has a complex eigenvalue {z}"
            )));
        }
        *slot = z.re;
    }
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).expect("finite"));

    let id = Matrix4::<Complex64>::identity();
    let mut eigenvectors = Vec::with_capacity(4);
    for sign in [1.0, -1.0] {
        let projector = (id + matrix * c(sign / lambda)) * c(0.5);
        let cols: Vec<Vector4<Complex64>> =
            (0..4).map(|j| projector.column(j).into_owned()).collect();
        let picked = gram_schmidt_pick(&cols, 2);
        if picked.len() != 2 {
            return Err(Error::Structural(format!(
                "eigenspace for {} lambda is not two-dimensional",
                if sign > 0.0 { "+" } else { "-" }
            )));
        }
        eigenvectors.extend(picked);
    }
    let eigenvectors: [Vector4<Complex64>; 4] = eigenvectors.try_into().expect("four vectors");
    let sys = SpinEigensystem {
        n_m,
        lambda,
        matrix,
        eigenvalues,
        eigenvectors,
    };
    // Pair the projector vectors with +lambda, +lambda, -lambda, -lambda.
    let paired = SpinEigensystem {
        eigenvalues: [lambda, lambda, -lambda, -lambda],
        ..sys.clone()
    };
    let res = paired.eigen_residual();
    if res > EIGEN_RESIDUAL_TOL {
        return Err(Error::Structural(format!(
            "spin eigenvector residual {res} too large"
        )));
    }
    Ok(sys)
}
