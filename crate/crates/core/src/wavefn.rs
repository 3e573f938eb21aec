//! Modulation functions, densities and harmonic tables.

use num_complex::Complex;
use serde::Serialize;

use crate::eigensolve::SpectralDecomposition;
use crate::error::{domain, Error, Result};
use crate::inceop::{Basis, SolutionFamily};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Values as evaluated.
    Raw,
    /// Scaled so the maximum is exactly one.
    PeakOne,
    /// Scaled to unit integral over one period in xi.
    UnitIntegral,
}

/// Finite trigonometric sum of one family at phase `xi`.
pub fn eval_polynomial_part<T: Real>(
    family: SolutionFamily,
    coefficients: &[T],
    xi: T,
) -> Result<Complex<T>> {
    let freqs = family.frequencies();
    if coefficients.len() != freqs.len() {
        return Err(Error::DimensionMismatch {
            expected: freqs.len(),
            got: coefficients.len(),
        });
    }
    let z = xi / T::lit(2.0);
    let mut re = T::zero();
    let mut im = T::zero();
    for (&m, &c) in freqs.iter().zip(coefficients) {
        let arg = T::from_int(m) * z;
        match family.kind.basis() {
            Basis::Exponential => {
                re = re + c * arg.cos();
                im = im - c * arg.sin();
            }
            Basis::Cosine => re = re + c * arg.cos(),
            Basis::Sine => re = re + c * arg.sin(),
        }
    }
    Ok(Complex::new(re, im))
}

/// exp[-(a/4) cos xi]
pub fn envelope<T: Real>(a: T, xi: T) -> T {
    (-(a / T::lit(4.0)) * xi.cos()).exp()
}

/// Modified Bessel function I0 by its power series.
fn bessel_i0<T: Real>(x: T) -> T {
    let quarter_x2 = x * x / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = T::zero();
    loop {
        k = k + T::one();
        term = term * quarter_x2 / (k * k);
        sum = sum + term;
        if term <= T::epsilon() * sum {
            return sum;
        }
    }
}

/// Squared envelope exp[-(a/2) cos xi] under the chosen normalization.
pub fn envelope_density<T: Real>(a: T, xi: T, normalization: Normalization) -> Result<T> {
    if !(a >= T::zero()) {
        return Err(domain(format!("a must be non-negative, got {a}")));
    }
    let half_a = a / T::lit(2.0);
    Ok(match normalization {
        Normalization::Raw => (-half_a * xi.cos()).exp(),
        // max is exp(a/2) at xi = +-pi
        Normalization::PeakOne => (-half_a * (T::one() + xi.cos())).exp(),
        Normalization::UnitIntegral => {
            (-half_a * xi.cos()).exp() / (T::lit(2.0) * T::PI() * bessel_i0(half_a))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contrast<T> {
    /// max/min of |exp[-(a/4) cos xi]| = e^(a/2)
    pub amplitude: T,
    /// max/min of the squared envelope = e^a
    pub density: T,
}

pub fn contrast<T: Real>(a: T) -> Result<Contrast<T>> {
    if !(a >= T::zero()) {
        return Err(domain(format!("a must be non-negative, got {a}")));
    }
    Ok(Contrast {
        amplitude: (a / T::lit(2.0)).exp(),
        density: a.exp(),
    })
}

/// Psi_ps(xi) or Phi_p(xi): trigonometric polynomial times exp[-(a/4) cos xi].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulationFunction<T> {
    pub family: SolutionFamily,
    pub a: T,
    pub k_index: usize,
    pub coefficients: Vec<T>,
    pub eta: T,
}

impl<T: Real> ModulationFunction<T> {
    pub fn from_decomposition(dec: &SpectralDecomposition<T>, k_label: usize) -> Result<Self> {
        let i = dec
            .index_of_label(k_label)
            .ok_or_else(|| domain(format!("no mode with k = {k_label} (1..={})", dec.dim())))?;
        Ok(Self {
            family: dec.family,
            a: dec.a,
            k_index: k_label,
            coefficients: dec.vectors[i].clone(),
            eta: dec.etas[i],
        })
    }

    pub fn polynomial_part(&self, xi: T) -> Complex<T> {
        eval_polynomial_part(self.family, &self.coefficients, xi)
            .expect("coefficients match family")
    }

    pub fn value(&self, xi: T) -> Complex<T> {
        self.polynomial_part(xi) * envelope(self.a, xi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile<T> {
    pub xi: Vec<T>,
    pub values: Vec<T>,
    pub normalization: Normalization,
}

impl<T: Real> DensityProfile<T> {
    fn from_values(xi: Vec<T>, values: Vec<T>) -> Self {
        Self {
            xi,
            values,
            normalization: Normalization::Raw,
        }
    }

    pub fn max(&self) -> T {
        self.values.iter().cloned().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().cloned().fold(T::infinity(), T::min)
    }

    /// Trapezoid integral over the sampled interval.
    pub fn integral(&self) -> T {
        self.xi
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (x[1] - x[0]) * (v[0] + v[1]) / T::lit(2.0))
            .sum()
    }

    /// Rescales to the given normalization. The unit-integral case uses the
    /// trapezoid rule on the samples.
    pub fn normalized(mut self, normalization: Normalization) -> Self {
        let divisor = match normalization {
            Normalization::Raw => T::one(),
            Normalization::PeakOne => self.max(),
            Normalization::UnitIntegral => self.integral(),
        };
        if divisor > T::zero() {
            for v in self.values.iter_mut() {
                *v = *v / divisor;
            }
        }
        self.normalization = normalization;
        self
    }
}

/// Equidistant grid on [-pi, pi] including both ends.
pub fn phase_grid<T: Real>(n_points: usize) -> Result<Vec<T>> {
    if n_points < 2 {
        return Err(domain(format!(
            "need at least 2 sample points, got {n_points}"
        )));
    }
    let pi = T::PI();
    let step = T::lit(2.0) * pi / T::from_int(n_points as i64 - 1);
    Ok((0..n_points)
        .map(|i| {
            if i + 1 == n_points {
                pi
            } else {
                -pi + step * T::from_int(i as i64)
            }
        })
        .collect())
}

/// |modulation(xi)|^2 on an equidistant grid over [-pi, pi].
pub fn sample_density<T: Real>(
    modulation: &ModulationFunction<T>,
    n_points: usize,
) -> Result<DensityProfile<T>> {
    let xi = phase_grid(n_points)?;
    let values = xi.iter().map(|&x| modulation.value(x).norm_sqr()).collect();
    Ok(DensityProfile::from_values(xi, values))
}

/// Squared envelope on an equidistant grid over [-pi, pi].
pub fn envelope_profile<T: Real>(
    a: T,
    n_points: usize,
    normalization: Normalization,
) -> Result<DensityProfile<T>> {
    let xi = phase_grid(n_points)?;
    let values = xi
        .iter()
        .map(|&x| envelope_density(a, x, normalization))
        .collect::<Result<Vec<T>>>()?;
    Ok(DensityProfile {
        xi,
        values,
        normalization,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicStrength<T> {
    pub k: usize,
    /// Harmonic number in xi (half-integer for odd-q families).
    pub r: f64,
    pub strength: T,
}

/// Squared coefficients, ordered by k then r.
pub fn harmonic_strengths<T: Real>(dec: &SpectralDecomposition<T>) -> Vec<HarmonicStrength<T>> {
    let harmonics = dec.family.harmonics();
    let mut rows = Vec::with_capacity(dec.dim() * harmonics.len());
    for k in 1..=dec.dim() {
        let i = dec.index_of_label(k).expect("labels cover 1..=dim");
        for (&r, &c) in harmonics.iter().zip(&dec.vectors[i]) {
            rows.push(HarmonicStrength {
                k,
                r,
                strength: c * c,
            });
        }
    }
    rows
}

/// Fraction of the strength of mode `k` sitting at harmonics r <= 0.
pub fn nonpositive_fraction<T: Real>(rows: &[HarmonicStrength<T>], k: usize) -> T {
    let (neg, total) = rows
        .iter()
        .filter(|h| h.k == k)
        .fold((T::zero(), T::zero()), |(n, t), h| {
            (if h.r <= 0.0 { n + h.strength } else { n }, t + h.strength)
        });
    if total == T::zero() {
        T::zero()
    } else {
        neg / total
    }
}
