//! Finite three-term recurrences for the polynomial solutions.
//!
//! Both reduced equations are written in `z = xi/2`:
//!
//! ```text
//! f'' + a sin2z (f' + i s f) + (eta - q a cos2z) f = 0
//! ```
//!
//! with `s = +1` / `s = -1` for the two Dirac spin projections and `s = 0` for
//! the Klein-Gordon (Ince) equation. Expanding `f = sum_m D_m exp(-i m z)` and
//! projecting onto `exp(-i m z)` gives
//!
//! ```text
//! eta D_m = m^2 D_m + (a/2)(q + m + 2 - s) D_{m+2} + (a/2)(q - m + 2 + s) D_{m-2}
//! ```
//!
//! The coupling from row `U + 2` down to `D_U` vanishes at `U = q + s`, and the
//! one from row `L - 2` up to `D_L` vanishes at `L = s - q`, so the window
//! `m = s - q, s - q + 2, ..., q + s` is invariant. For the Dirac case
//! (`q = 2n - 1`) this is `m = 2r` with `r = -n+1..n` for `s = +1` and
//! `r = -n..n-1` for `s = -1`. For `s = 0` the window is symmetric and splits
//! into cosine and sine parts; folding `D_{-m} = +-D_m` doubles the coupling
//! into the constant mode (cosine, `m = 2`) and shifts the diagonal of the
//! `m = 1` row by `+-(a/2)(q+1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    /// Spin projection lambda_s = +lambda (s = 1, 2).
    DiracPlus,
    /// Spin projection lambda_s = -lambda (s = 3, 4).
    DiracMinus,
    /// cos(r xi), r = 0..n, q = 2n.
    KgCosEven,
    /// cos((r + 1/2) xi), r = 0..n-1, q = 2n - 1.
    KgCosOdd,
    /// sin((r + 1/2) xi), r = 0..n-1, q = 2n - 1.
    KgSinOdd,
    /// sin(r xi), r = 1..n, q = 2n.
    KgSinEven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// exp(-i m z)
    Exponential,
    /// cos(m z)
    Cosine,
    /// sin(m z)
    Sine,
}

impl SolutionKind {
    pub const ALL: [SolutionKind; 6] = [
        SolutionKind::DiracPlus,
        SolutionKind::DiracMinus,
        SolutionKind::KgCosEven,
        SolutionKind::KgCosOdd,
        SolutionKind::KgSinOdd,
        SolutionKind::KgSinEven,
    ];

    pub fn is_dirac(self) -> bool {
        matches!(self, SolutionKind::DiracPlus | SolutionKind::DiracMinus)
    }

    /// Sign `s` of the `i f` term.
    pub fn spin_sign(self) -> i64 {
        match self {
            SolutionKind::DiracPlus => 1,
            SolutionKind::DiracMinus => -1,
            _ => 0,
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            SolutionKind::DiracPlus | SolutionKind::DiracMinus => Basis::Exponential,
            SolutionKind::KgCosEven | SolutionKind::KgCosOdd => Basis::Cosine,
            SolutionKind::KgSinEven | SolutionKind::KgSinOdd => Basis::Sine,
        }
    }

    /// Ince parameter q for quantum number n.
    pub fn q(self, n: u32) -> i64 {
        let n = n as i64;
        match self {
            SolutionKind::KgCosEven | SolutionKind::KgSinEven => 2 * n,
            _ => 2 * n - 1,
        }
    }

    /// Frequencies m (in z) of the basis functions, ascending.
    pub fn frequencies(self, n: u32) -> Vec<i64> {
        let q = self.q(n);
        let s = self.spin_sign();
        match self.basis() {
            Basis::Exponential => (0..=q).map(|i| s - q + 2 * i).collect(),
            Basis::Cosine => (q % 2..=q).step_by(2).collect(),
            Basis::Sine => (if q % 2 == 0 { 2 } else { 1 }..=q).step_by(2).collect(),
        }
    }

    pub fn dim(self, n: u32) -> usize {
        self.frequencies(n).len()
    }

    pub fn name(self) -> &'static str {
        match self {
            SolutionKind::DiracPlus => "dirac-plus",
            SolutionKind::DiracMinus => "dirac-minus",
            SolutionKind::KgCosEven => "kg-cos-even",
            SolutionKind::KgCosOdd => "kg-cos-odd",
            SolutionKind::KgSinOdd => "kg-sin-odd",
            SolutionKind::KgSinEven => "kg-sin-even",
        }
    }
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolutionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match norm.as_str() {
            "dirac" | "dirac-plus" | "dirac+" => SolutionKind::DiracPlus,
            "dirac-minus" | "dirac-" => SolutionKind::DiracMinus,
            "kg" | "kg-cos-even" => SolutionKind::KgCosEven,
            "kg-cos-odd" => SolutionKind::KgCosOdd,
            "kg-sin-odd" => SolutionKind::KgSinOdd,
            "kg-sin-even" => SolutionKind::KgSinEven,
            _ => return Err(domain(format!("unknown solution family '{s}'"))),
        })
    }
}

/// One solution family at a fixed quantum number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SolutionFamily {
    pub kind: SolutionKind,
    pub n: u32,
}

impl SolutionFamily {
    pub fn new(kind: SolutionKind, n: u32) -> Result<Self> {
        if n < 1 {
            return Err(domain(format!("quantum number n must be >= 1, got {n}")));
        }
        Ok(Self { kind, n })
    }

    pub fn q(&self) -> i64 {
        self.kind.q(self.n)
    }

    pub fn dim(&self) -> usize {
        self.kind.dim(self.n)
    }

    pub fn frequencies(&self) -> Vec<i64> {
        self.kind.frequencies(self.n)
    }

    /// Harmonic numbers in xi (m/2), as used to label the coefficient tables.
    pub fn harmonics(&self) -> Vec<f64> {
        self.frequencies()
            .into_iter()
            .map(|m| m as f64 / 2.0)
            .collect()
    }

    /// `value(xi + 2 pi) = period_sign * value(xi)`.
    pub fn period_sign(&self) -> i32 {
        if self.kind.is_dirac() || self.q() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for SolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={})", self.kind, self.n)
    }
}

/// Couplings of row `m`: extra diagonal term, coefficient of `D_{m+2}`, of `D_{m-2}`.
///
/// Integer prefactors are formed exactly before scaling by `a/2`, so the
/// terminating couplings are exact zeros.
fn row_couplings<T: Real>(kind: SolutionKind, q: i64, a: T, m: i64) -> (T, T, T) {
    let half_a = a / T::lit(2.0);
    let s = kind.spin_sign();
    let up = q + m + 2 - s;
    let mut down = q - m + 2 + s;
    let mut diag_extra = 0;
    match kind.basis() {
        Basis::Exponential => {}
        Basis::Cosine => {
            if m == 1 {
                diag_extra = q + 1;
            }
            if m == 2 {
                down *= 2;
            }
        }
        Basis::Sine => {
            if m == 1 {
                diag_extra = -(q + 1);
            }
            if m == 2 {
                down = 0;
            }
        }
    }
    (
        half_a * T::from_int(diag_extra),
        half_a * T::from_int(up),
        half_a * T::from_int(down),
    )
}

/// Tridiagonal matrix of one recurrence, acting on the coefficient vector.
///
/// `sup[i]` is the entry (i, i+1) and `sub[i]` the entry (i+1, i).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator<T> {
    pub diag: Vec<T>,
    pub sup: Vec<T>,
    pub sub: Vec<T>,
    pub family: SolutionFamily,
    pub a: T,
}

impl<T: Real> TridiagonalOperator<T> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn frequencies(&self) -> Vec<i64> {
        self.family.frequencies()
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        let mut rows = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            rows[i][i] = self.diag[i];
            if i + 1 < n {
                rows[i][i + 1] = self.sup[i];
                rows[i + 1][i] = self.sub[i];
            }
        }
        rows
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i + 1 < n {
                    acc = acc + self.sup[i] * v[i + 1];
                }
                if i > 0 {
                    acc = acc + self.sub[i - 1] * v[i - 1];
                }
                acc
            })
            .collect()
    }

    /// Products sup[i]*sub[i]; all positive means the matrix is similar to a
    /// symmetric one through a positive diagonal scaling.
    pub fn coupling_products(&self) -> Vec<T> {
        self.sup
            .iter()
            .zip(&self.sub)
            .map(|(&u, &l)| u * l)
            .collect()
    }

    pub fn is_symmetrizable(&self) -> bool {
        self.coupling_products().iter().all(|&p| p > T::zero())
    }
}

fn check_inputs<T: Real>(n: u32, a: T) -> Result<()> {
    if n < 1 {
        return Err(domain(format!("quantum number n must be >= 1, got {n}")));
    }
    if !(a >= T::zero()) || !a.is_finite() {
        return Err(domain(format!(
            "coupling parameter a must be finite and >= 0, got {a}"
        )));
    }
    Ok(())
}

/// Builds the operator on an arbitrary ascending window of frequencies.
///
/// Used for closure checks; the physical window is `SolutionKind::frequencies`.
pub fn build_on_window<T: Real>(
    kind: SolutionKind,
    q: i64,
    a: T,
    window: &[i64],
) -> (Vec<T>, Vec<T>, Vec<T>) {
    let dim = window.len();
    let mut diag = Vec::with_capacity(dim);
    let mut sup = Vec::with_capacity(dim.saturating_sub(1));
    let mut sub = Vec::with_capacity(dim.saturating_sub(1));
    for (i, &m) in window.iter().enumerate() {
        let (extra, up, down) = row_couplings(kind, q, a, m);
        diag.push(T::from_int(m * m) + extra);
        if i + 1 < dim {
            debug_assert_eq!(window[i + 1], m + 2);
            sup.push(up);
        }
        if i > 0 {
            sub.push(down);
        }
    }
    (diag, sup, sub)
}

/// Largest coupling from rows just outside the physical window into it.
///
/// Zero means the finite window is an invariant subspace of the infinite
/// recurrence.
pub fn closure_leakage<T: Real>(family: SolutionFamily, a: T) -> T {
    let kind = family.kind;
    let q = family.q();
    let freqs = family.frequencies();
    let lo = freqs[0];
    let hi = *freqs.last().unwrap();
    // Row hi+2 couples down into D_hi.
    let (_, _, down) = row_couplings(kind, q, a, hi + 2);
    let mut leak = down.abs();
    // Below the window only the exponential basis has further rows.
    if kind.basis() == Basis::Exponential {
        let (_, up, _) = row_couplings(kind, q, a, lo - 2);
        leak = leak.max(up.abs());
    }
    leak
}

fn finish<T: Real>(family: SolutionFamily, a: T) -> Result<TridiagonalOperator<T>> {
    let freqs = family.frequencies();
    let (diag, sup, sub) = build_on_window(family.kind, family.q(), a, &freqs);
    let leak = closure_leakage(family, a);
    if leak != T::zero() {
        return Err(Error::Structural(format!(
            "{family}: recurrence does not terminate at the window edge (leak {leak})"
        )));
    }
    let op = TridiagonalOperator {
        diag,
        sup,
        sub,
        family,
        a,
    };
    if op
        .diag
        .iter()
        .chain(&op.sup)
        .chain(&op.sub)
        .any(|x| !x.is_finite())
    {
        return Err(Error::Structural(format!(
            "{family}: non-finite operator entry"
        )));
    }
    Ok(op)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinSign {
    Plus,
    Minus,
}

/// Dirac operator of dimension 2n over r = -n+1..n (`Plus`) or r = -n..n-1 (`Minus`).
pub fn build_dirac_operator<T: Real>(
    n: u32,
    a: T,
    sign: SpinSign,
) -> Result<TridiagonalOperator<T>> {
    check_inputs(n, a)?;
    let kind = match sign {
        SpinSign::Plus => SolutionKind::DiracPlus,
        SpinSign::Minus => SolutionKind::DiracMinus,
    };
    finish(SolutionFamily::new(kind, n)?, a)
}

/// Klein-Gordon (Ince) operator for one of the four parity classes.
pub fn build_kg_operator<T: Real>(
    kind: SolutionKind,
    n: u32,
    a: T,
) -> Result<TridiagonalOperator<T>> {
    check_inputs(n, a)?;
    if kind.is_dirac() {
        return Err(domain(format!("{kind} is not a Klein-Gordon family")));
    }
    finish(SolutionFamily::new(kind, n)?, a)
}

pub fn build_operator<T: Real>(family: SolutionFamily, a: T) -> Result<TridiagonalOperator<T>> {
    match family.kind {
        SolutionKind::DiracPlus => build_dirac_operator(family.n, a, SpinSign::Plus),
        SolutionKind::DiracMinus => build_dirac_operator(family.n, a, SpinSign::Minus),
        kind => build_kg_operator(kind, family.n, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eig2(op: &TridiagonalOperator<f64>) -> (f64, f64) {
        let (p, s) = (op.diag[0], op.diag[1]);
        let tr = p + s;
        let disc = ((p - s).powi(2) + 4.0 * op.sup[0] * op.sub[0]).sqrt();
        ((tr - disc) / 2.0, (tr + disc) / 2.0)
    }

    #[test]
    fn dimensions_and_windows() {
        assert_eq!(SolutionKind::DiracPlus.frequencies(1), vec![0, 2]);
        assert_eq!(SolutionKind::DiracMinus.frequencies(1), vec![-2, 0]);
        assert_eq!(SolutionKind::KgCosEven.frequencies(2), vec![0, 2, 4]);
        assert_eq!(SolutionKind::KgSinEven.frequencies(2), vec![2, 4]);
        assert_eq!(SolutionKind::KgCosOdd.frequencies(2), vec![1, 3]);
        assert_eq!(SolutionKind::KgSinOdd.frequencies(2), vec![1, 3]);
        assert_eq!(SolutionKind::DiracPlus.dim(20), 40);
        assert_eq!(SolutionKind::KgCosEven.dim(20), 21);
        let h = SolutionFamily::new(SolutionKind::DiracPlus, 20)
            .unwrap()
            .harmonics();
        assert_eq!(h.first(), Some(&-19.0));
        assert_eq!(h.last(), Some(&20.0));
    }

    #[test]
    fn zero_coupling_is_diagonal() {
        let op = build_dirac_operator(1, 0.0, SpinSign::Plus).unwrap();
        assert_eq!(op.diag, vec![0.0, 4.0]);
        assert!(op.sup.iter().chain(&op.sub).all(|&x| x == 0.0));
        let kg = build_kg_operator(SolutionKind::KgCosEven, 1, 0.0).unwrap();
        assert_eq!(kg.diag, vec![0.0, 4.0]);
    }

    #[test]
    fn dirac_two_by_two_closed_form() {
        for &a in &[0.3, 1.0, 3.0, 14.0] {
            let op = build_dirac_operator(1, a, SpinSign::Plus).unwrap();
            assert_eq!(op.sup[0], op.sub[0]);
            let (lo, hi) = eig2(&op);
            let r = (4.0 + a * a).sqrt();
            assert!((lo - (2.0 - r)).abs() < 1e-12);
            assert!((hi - (2.0 + r)).abs() < 1e-12);
        }
    }

    #[test]
    fn kg_two_by_two_closed_form() {
        for &a in &[0.3, 1.0, 3.0, 14.0] {
            let op = build_kg_operator(SolutionKind::KgCosEven, 1, a).unwrap();
            // constant mode couples with doubled weight
            assert_eq!(op.sub[0], 2.0 * a);
            let (lo, hi) = eig2(&op);
            let r = 2.0 * (1.0 + a * a).sqrt();
            assert!((lo - (2.0 - r)).abs() < 1e-12);
            assert!((hi - (2.0 + r)).abs() < 1e-12);
        }
    }

    #[test]
    fn one_dimensional_odd_families() {
        // cos z: eta = 1 + a; sin z: eta = 1 - a; sin 2z at q = 2: eta = 4.
        let a = 2.5;
        assert_eq!(
            build_kg_operator(SolutionKind::KgCosOdd, 1, a)
                .unwrap()
                .diag,
            vec![1.0 + a]
        );
        assert_eq!(
            build_kg_operator(SolutionKind::KgSinOdd, 1, a)
                .unwrap()
                .diag,
            vec![1.0 - a]
        );
        assert_eq!(
            build_kg_operator(SolutionKind::KgSinEven, 1, a)
                .unwrap()
                .diag,
            vec![4.0]
        );
    }

    #[test]
    fn closure_for_every_family() {
        for kind in SolutionKind::ALL {
            for n in 1..=25 {
                let fam = SolutionFamily::new(kind, n).unwrap();
                assert_eq!(closure_leakage(fam, 14.0), 0.0, "{fam}");
                // The window three steps wider must decouple from the outside.
                let freqs = fam.frequencies();
                let lo = freqs[0]
                    - if kind.basis() == Basis::Exponential {
                        6
                    } else {
                        0
                    };
                let hi = freqs.last().unwrap() + 6;
                let wide: Vec<i64> = (lo..=hi).step_by(2).collect();
                let (_, sup, sub) = build_on_window(kind, fam.q(), 14.0, &wide);
                let first = wide.iter().position(|&m| m == freqs[0]).unwrap();
                let last = first + freqs.len() - 1;
                // Row last+1 -> column last, and row first-1 -> column first.
                assert_eq!(sub[last], 0.0, "{fam} upper edge");
                if first > 0 {
                    assert_eq!(sup[first - 1], 0.0, "{fam} lower edge");
                }
            }
        }
    }

    #[test]
    fn symmetrizable_for_positive_a() {
        for kind in SolutionKind::ALL {
            for n in 1..=25 {
                let op = build_operator(SolutionFamily::new(kind, n).unwrap(), 0.5).unwrap();
                assert!(op.is_symmetrizable(), "{kind} n={n}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_dirac_operator(0, 1.0, SpinSign::Plus).is_err());
        assert!(build_dirac_operator(1, -1.0, SpinSign::Plus).is_err());
        assert!(build_kg_operator(SolutionKind::DiracPlus, 1, 1.0).is_err());
        assert!("kg-nope".parse::<SolutionKind>().is_err());
        assert_eq!(
            "dirac".parse::<SolutionKind>().unwrap(),
            SolutionKind::DiracPlus
        );
    }

    #[test]
    fn single_precision_build() {
        let op = build_dirac_operator::<f32>(3, 2.0, SpinSign::Plus).unwrap();
        assert_eq!(op.dim(), 6);
        assert!(op.is_symmetrizable());
    }
}
