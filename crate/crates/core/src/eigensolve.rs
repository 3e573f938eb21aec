//! Eigenpairs of the recurrence operators.
//!
//! The operators are real, tridiagonal, and similar to a symmetric matrix
//! through a positive diagonal scaling. The primary path symmetrizes and runs
//! implicit QL; [`sturm_bisection_oracle`] is an independent check that shares
//! none of that code.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inceop::{SolutionFamily, TridiagonalOperator};
use crate::scalar::Real;

/// Relative gap (to the spectral spread) below which two eigenvalues count as
/// not separated.
pub const MIN_RELATIVE_GAP: f64 = 1e-8;

/// Iteration cap per eigenvalue for the QL sweep.
const QL_MAX_SWEEPS: usize = 60;

/// Bisection steps allowed per eigenvalue in the Sturm oracle.
const STURM_MAX_STEPS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal<T> {
    pub diag: Vec<T>,
    /// off[i] is entry (i, i+1) = (i+1, i).
    pub off: Vec<T>,
}

impl<T: Real> SymmetricTridiagonal<T> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }
}

/// Symmetrizes `op` by a diagonal similarity `S = D T D^-1` with `D[0] = 1`.
///
/// Returns `S` and the diagonal of `D`.
pub fn symmetrize<T: Real>(
    op: &TridiagonalOperator<T>,
) -> Result<(SymmetricTridiagonal<T>, Vec<T>)> {
    let n = op.dim();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut scale = Vec::with_capacity(n);
    if n > 0 {
        scale.push(T::one());
    }
    for i in 0..n.saturating_sub(1) {
        let (u, l) = (op.sup[i], op.sub[i]);
        let prod = u * l;
        if prod > T::zero() {
            off.push(u.signum() * prod.sqrt());
            scale.push(scale[i] * (u.abs().sqrt() / l.abs().sqrt()));
        } else if u == T::zero() && l == T::zero() {
            off.push(T::zero());
            scale.push(scale[i]);
        } else {
            return Err(Error::Structural(format!(
                "{}: coupling product sup*sub = {prod} at row {i} is not positive; \
                 the recurrence is not symmetrizable",
                op.family
            )));
        }
    }
    Ok((
        SymmetricTridiagonal {
            diag: op.diag.clone(),
            off,
        },
        scale,
    ))
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
///
/// Returns unsorted eigenvalues and the eigenvectors as `vecs[k]`.
pub fn tridiagonal_ql<T: Real>(s: &SymmetricTridiagonal<T>) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = s.dim();
    let mut d = s.diag.clone();
    let mut e: Vec<T> = s.off.clone();
    e.push(T::zero());
    // z[row][col]; columns are eigenvectors.
    let mut z = vec![vec![T::zero(); n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let eps = T::epsilon();
    let two = T::lit(2.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::Structural(format!(
                    "QL failed to converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s_, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s_ * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s_ = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s_ + two * c * b;
                p = s_ * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s_ * row[i] + c * f;
                    row[i] = c * row[i] - s_ * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    let vecs = (0..n)
        .map(|k| (0..n).map(|row| z[row][k]).collect())
        .collect();
    Ok((d, vecs))
}

/// Eigenvalues and coefficient vectors of one family at one coupling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDecomposition<T> {
    pub family: SolutionFamily,
    pub a: T,
    /// Ascending.
    pub etas: Vec<T>,
    /// vectors[i] belongs to etas[i]; unit norm, largest component positive.
    pub vectors: Vec<Vec<T>>,
    /// ODE residual per pair; empty until filled by the verification layer.
    pub residuals: Vec<T>,
    /// Mode labels k (1-based). k = 1 is the largest eta, k = dim the smallest.
    pub k_labels: Vec<usize>,
    /// Diagonal similarity used for symmetrization.
    pub scale: Vec<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.etas.len()
    }

    /// Position in `etas` of mode label `k`.
    pub fn index_of_label(&self, k: usize) -> Option<usize> {
        self.k_labels.iter().position(|&l| l == k)
    }

    pub fn spread(&self) -> T {
        match (self.etas.first(), self.etas.last()) {
            (Some(&lo), Some(&hi)) => hi - lo,
            _ => T::zero(),
        }
    }

    /// Smallest neighbouring gap divided by the spread.
    pub fn min_relative_gap(&self) -> T {
        let spread = self.spread();
        if spread == T::zero() {
            return T::zero();
        }
        self.etas
            .windows(2)
            .map(|w| (w[1] - w[0]) / spread)
            .fold(T::infinity(), T::min)
    }

    /// Whether every gap exceeds `MIN_RELATIVE_GAP` of the spread.
    pub fn is_strictly_separated(&self) -> bool {
        self.dim() < 2 || self.min_relative_gap() > T::lit(MIN_RELATIVE_GAP)
    }

    /// Largest |<D v_j, D v_k>| over j != k, after normalizing D v.
    pub fn weighted_orthogonality_defect(&self) -> T {
        let scaled: Vec<Vec<T>> = self
            .vectors
            .iter()
            .map(|v| {
                let w: Vec<T> = v.iter().zip(&self.scale).map(|(&x, &s)| x * s).collect();
                let norm = w.iter().map(|&x| x * x).sum::<T>().sqrt();
                w.into_iter().map(|x| x / norm).collect()
            })
            .collect();
        let mut worst = T::zero();
        for j in 0..scaled.len() {
            for k in j + 1..scaled.len() {
                let dot: T = scaled[j].iter().zip(&scaled[k]).map(|(&x, &y)| x * y).sum();
                worst = worst.max(dot.abs());
            }
        }
        worst
    }
}

/// Two neighbouring modes (k, k+1) that are each other's nearest neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSplitting<T> {
    pub k_upper: usize,
    pub k_lower: usize,
    pub eta_upper: T,
    pub eta_lower: T,
    pub splitting: T,
    /// splitting / spread
    pub relative_splitting: T,
    /// Smaller of the distances to the modes just outside the pair.
    pub separation: T,
}

/// Mutual-nearest-neighbour pairs of the spectrum, scanning from the top.
/// For the Dirac families the upper spectrum forms close doublets; this is a
/// descriptive measure only.
pub fn pair_splittings<T: Real>(dec: &SpectralDecomposition<T>) -> Vec<PairSplitting<T>> {
    let desc: Vec<T> = dec.etas.iter().rev().copied().collect();
    let n = desc.len();
    let gap = |i: usize| desc[i] - desc[i + 1];
    let spread = dec.spread();
    let mut out = Vec::new();
    let mut j = 0;
    while j + 1 < n {
        let left = if j > 0 { gap(j - 1) } else { T::infinity() };
        let right = if j + 2 < n { gap(j + 1) } else { T::infinity() };
        let splitting = gap(j);
        if splitting <= left && splitting <= right {
            out.push(PairSplitting {
                k_upper: j + 1,
                k_lower: j + 2,
                eta_upper: desc[j],
                eta_lower: desc[j + 1],
                splitting,
                relative_splitting: if spread > T::zero() {
                    splitting / spread
                } else {
                    T::zero()
                },
                separation: left.min(right),
            });
            j += 2;
        } else {
            j += 1;
        }
    }
    out
}

/// Normalizes to unit Euclidean norm with the largest-magnitude entry positive.
pub fn normalize_sign_fixed<T: Real>(v: &mut [T]) {
    let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm == T::zero() {
        return;
    }
    let mut pivot = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    let factor = if v[pivot] < T::zero() {
        -T::one() / norm
    } else {
        T::one() / norm
    };
    for x in v.iter_mut() {
        *x = *x * factor;
    }
}

/// max |(T - eta) v|_i
pub fn operator_residual<T: Real>(op: &TridiagonalOperator<T>, eta: T, v: &[T]) -> T {
    op.apply(v)
        .iter()
        .zip(v)
        .map(|(&t, &x)| (t - eta * x).abs())
        .fold(T::zero(), T::max)
}

/// Solves (T - shift) y = rhs by Gaussian elimination with partial pivoting.
/// Zero pivots are replaced by `tiny`.
fn shifted_tridiagonal_solve<T: Real>(
    op: &TridiagonalOperator<T>,
    shift: T,
    rhs: &[T],
    tiny: T,
) -> Vec<T> {
    let n = op.dim();
    // Row i of U holds u0[i] (diagonal), u1[i], u2[i] (two superdiagonals).
    let mut u0: Vec<T> = op.diag.iter().map(|&d| d - shift).collect();
    let mut u1: Vec<T> = op.sup.clone();
    u1.push(T::zero());
    let mut u2 = vec![T::zero(); n];
    let mut lower = op.sub.clone();
    let mut b = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if lower[i].abs() > u0[i].abs() {
            // swap rows i and i+1
            let (d, e) = (u0[i], u1[i]);
            u0[i] = lower[i];
            u1[i] = u0[i + 1];
            u2[i] = u1[i + 1];
            lower[i] = d;
            u0[i + 1] = e;
            u1[i + 1] = T::zero();
            b.swap(i, i + 1);
        }
        if u0[i] == T::zero() {
            u0[i] = tiny;
        }
        let l = lower[i] / u0[i];
        u0[i + 1] = u0[i + 1] - l * u1[i];
        if i + 1 < n - 1 {
            u1[i + 1] = u1[i + 1] - l * u2[i];
        }
        b[i + 1] = b[i + 1] - l * b[i];
    }
    if n > 0 && u0[n - 1] == T::zero() {
        u0[n - 1] = tiny;
    }
    let mut y = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        if i + 1 < n {
            acc = acc - u1[i] * y[i + 1];
        }
        if i + 2 < n {
            acc = acc - u2[i] * y[i + 2];
        }
        y[i] = acc / u0[i];
    }
    y
}

/// One step of inverse iteration on the unsymmetrized operator. The
/// back-transformed vector from the symmetric problem can carry a residual
/// amplified by the spread of the similarity scale; this removes it. The step
/// is kept only if it lowers the residual.
pub fn refine_vector<T: Real>(op: &TridiagonalOperator<T>, eta: T, v: Vec<T>) -> Vec<T> {
    let norm = op
        .diag
        .iter()
        .chain(&op.sup)
        .chain(&op.sub)
        .map(|x| x.abs())
        .fold(T::one(), T::max);
    let tiny = T::epsilon() * norm;
    let mut y = shifted_tridiagonal_solve(op, eta, &v, tiny);
    if y.iter().any(|x| !x.is_finite()) {
        return v;
    }
    normalize_sign_fixed(&mut y);
    if operator_residual(op, eta, &y) < operator_residual(op, eta, &v) {
        y
    } else {
        v
    }
}

pub fn solve_spectrum<T: Real>(op: &TridiagonalOperator<T>) -> Result<SpectralDecomposition<T>> {
    let (sym, scale) = symmetrize(op)?;
    let (vals, vecs) = tridiagonal_ql(&sym)?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| {
        vals[i]
            .partial_cmp(&vals[j])
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });
    let dim = vals.len();
    let mut etas = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(dim);
    for &i in &order {
        etas.push(vals[i]);
        // Eigenvector of T is D^-1 times that of S.
        let mut v: Vec<T> = vecs[i].iter().zip(&scale).map(|(&x, &s)| x / s).collect();
        normalize_sign_fixed(&mut v);
        vectors.push(refine_vector(op, vals[i], v));
    }
    Ok(SpectralDecomposition {
        family: op.family,
        a: op.a,
        etas,
        vectors,
        residuals: Vec::new(),
        k_labels: (0..dim).map(|i| dim - i).collect(),
        scale,
    })
}

/// Number of eigenvalues of `s` strictly below `x`, from the signs of the
/// LDL^T pivots.
pub fn sturm_count<T: Real>(s: &SymmetricTridiagonal<T>, x: T) -> usize {
    let guard = T::min_positive_value().sqrt();
    let mut count = 0;
    let mut pivot = T::one();
    for i in 0..s.dim() {
        let coupling = if i == 0 {
            T::zero()
        } else {
            s.off[i - 1] * s.off[i - 1]
        };
        pivot = s.diag[i] - x - if i == 0 { T::zero() } else { coupling / pivot };
        if pivot.abs() < guard {
            pivot = -guard;
        }
        if pivot < T::zero() {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of `s`, ascending, each bracketed by bisection to width `tol`.
pub fn sturm_bisection_oracle<T: Real>(s: &SymmetricTridiagonal<T>, tol: T) -> Result<Vec<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Oracle(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = s.dim();
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for i in 0..n {
        let left = if i > 0 { s.off[i - 1].abs() } else { T::zero() };
        let right = if i + 1 < n { s.off[i].abs() } else { T::zero() };
        lo = lo.min(s.diag[i] - left - right);
        hi = hi.max(s.diag[i] + left + right);
    }
    let pad = tol + (hi - lo).abs() * T::epsilon();
    lo = lo - pad;
    hi = hi + pad;
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (mut a, mut b) = (lo, hi);
        let mut steps = 0;
        while b - a > tol {
            steps += 1;
            let mid = a + (b - a) / two;
            if steps > STURM_MAX_STEPS || mid <= a || mid >= b {
                return Err(Error::Oracle(format!(
                    "bisection for eigenvalue {k} stalled at width {} > tol {tol}",
                    b - a
                )));
            }
            if sturm_count(s, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(a + (b - a) / two);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inceop::{
        build_dirac_operator, build_kg_operator, build_operator, SolutionKind, SpinSign,
    };
    use proptest::prelude::*;

    #[test]
    fn diagonal_operator_is_already_symmetric() {
        let op = build_dirac_operator(3, 0.0, SpinSign::Plus).unwrap();
        let (s, scale) = symmetrize(&op).unwrap();
        assert_eq!(s.diag, op.diag);
        assert!(s.off.iter().all(|&x| x == 0.0));
        assert!(scale.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn dirac_n1_needs_no_scaling() {
        let op = build_dirac_operator(1, 2.7, SpinSign::Plus).unwrap();
        let (s, scale) = symmetrize(&op).unwrap();
        assert_eq!(scale, vec![1.0, 1.0]);
        assert_eq!(s.off, vec![2.7]);
    }

    #[test]
    fn rejects_sign_changing_couplings() {
        let mut op = build_dirac_operator(2, 1.0, SpinSign::Plus).unwrap();
        op.sub[1] = -op.sub[1];
        assert!(matches!(symmetrize(&op), Err(Error::Structural(_))));
    }

    #[test]
    fn zero_coupling_spectra() {
        let d = solve_spectrum(&build_dirac_operator(1, 0.0, SpinSign::Plus).unwrap()).unwrap();
        assert_eq!(d.etas, vec![0.0, 4.0]);
        let d = solve_spectrum(&build_dirac_operator(4, 0.0, SpinSign::Plus).unwrap()).unwrap();
        let mut expect: Vec<f64> = (-3..=4).map(|r: i32| 4.0 * (r * r) as f64).collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(d.etas, expect);
    }

    #[test]
    fn kg_cos_even_closed_form() {
        let d =
            solve_spectrum(&build_kg_operator(SolutionKind::KgCosEven, 1, 3.0).unwrap()).unwrap();
        let r = 2.0 * 10f64.sqrt();
        assert!((d.etas[0] - (2.0 - r)).abs() < 1e-12);
        assert!((d.etas[1] - (2.0 + r)).abs() < 1e-12);
    }

    #[test]
    fn counts_and_labels() {
        let d = solve_spectrum(&build_dirac_operator(20, 14.0, SpinSign::Plus).unwrap()).unwrap();
        assert_eq!(d.dim(), 40);
        assert_eq!(d.k_labels[0], 40);
        assert_eq!(d.k_labels[39], 1);
        assert_eq!(d.index_of_label(1), Some(39));
        assert!(d.etas.windows(2).all(|w| w[0] <= w[1]));
        let kg =
            solve_spectrum(&build_kg_operator(SolutionKind::KgCosEven, 20, 14.0).unwrap()).unwrap();
        assert_eq!(kg.dim(), 21);
        assert!(kg.is_strictly_separated());
    }

    #[test]
    fn vectors_are_normalized_and_sign_fixed() {
        let d =
            solve_spectrum(&build_kg_operator(SolutionKind::KgCosEven, 6, 5.0).unwrap()).unwrap();
        for v in &d.vectors {
            let norm: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-13);
            let big = v
                .iter()
                .cloned()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(big > 0.0);
        }
        assert!(d.weighted_orthogonality_defect() < 1e-10);
    }

    #[test]
    fn eigenpairs_satisfy_operator() {
        let op = build_kg_operator(SolutionKind::KgSinOdd, 7, 14.0f64).unwrap();
        let d = solve_spectrum(&op).unwrap();
        for (eta, v) in d.etas.iter().zip(&d.vectors) {
            let tv = op.apply(v);
            let res = tv
                .iter()
                .zip(v)
                .map(|(t, x)| (t - eta * x).abs())
                .fold(0.0, f64::max);
            assert!(res < 1e-10 * (1.0 + eta.abs()), "{res}");
        }
    }

    #[test]
    fn dirac_top_spectrum_pairs_up() {
        let d =
            solve_spectrum(&build_dirac_operator(20, 14.0f64, SpinSign::Plus).unwrap()).unwrap();
        let pairs = pair_splittings(&d);
        assert_eq!((pairs[0].k_upper, pairs[0].k_lower), (2, 3));
        assert!(pairs[0].relative_splitting < 1e-8);
        assert!(pairs[0].separation > 1.0);
        assert!(pairs.windows(2).all(|w| w[0].k_lower < w[1].k_upper));
    }

    #[test]
    fn sturm_oracle_simple_cases() {
        let s = SymmetricTridiagonal {
            diag: vec![0.0f64, 4.0],
            off: vec![0.0],
        };
        let ev = sturm_bisection_oracle(&s, 1e-12).unwrap();
        assert!((ev[0]).abs() < 1e-12 && (ev[1] - 4.0).abs() < 1e-12);
        let (s, _) = symmetrize(&build_dirac_operator(1, 3.0f64, SpinSign::Plus).unwrap()).unwrap();
        let ev = sturm_bisection_oracle(&s, 1e-12).unwrap();
        let r = 13f64.sqrt();
        assert!((ev[0] - (2.0 - r)).abs() < 1e-12);
        assert!((ev[1] - (2.0 + r)).abs() < 1e-12);
        assert!(sturm_bisection_oracle(&s, 0.0).is_err());
        assert!(sturm_bisection_oracle(&s, 1e-40).is_err());
    }

    #[test]
    fn sturm_agrees_with_ql_at_large_n() {
        let op = build_dirac_operator(25, 20.0f64, SpinSign::Plus).unwrap();
        let d = solve_spectrum(&op).unwrap();
        let (s, _) = symmetrize(&op).unwrap();
        let ev = sturm_bisection_oracle(&s, 1e-11).unwrap();
        let worst = ev
            .iter()
            .zip(&d.etas)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn solving_is_deterministic() {
        let op = build_operator(
            SolutionFamily::new(SolutionKind::DiracMinus, 9).unwrap(),
            5.0,
        )
        .unwrap();
        let a = solve_spectrum(&op).unwrap();
        let b = solve_spectrum(&op).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_precision_solve() {
        let op = build_kg_operator::<f32>(SolutionKind::KgCosEven, 1, 3.0).unwrap();
        let d = solve_spectrum(&op).unwrap();
        let r = 2.0 * 10f32.sqrt();
        assert!((d.etas[1] - (2.0 + r)).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn symmetrization_is_a_similarity(
            diag in prop::collection::vec(-50.0f64..50.0, 2..12),
            seeds in prop::collection::vec((0.1f64..20.0, 0.1f64..20.0, any::<bool>()), 11),
        ) {
            let n = diag.len();
            let mut sup = Vec::new();
            let mut sub = Vec::new();
            for &(u, l, neg) in seeds.iter().take(n - 1) {
                let sign = if neg { -1.0 } else { 1.0 };
                sup.push(sign * u);
                sub.push(sign * l);
            }
            let op = TridiagonalOperator {
                diag, sup, sub,
                family: SolutionFamily::new(SolutionKind::KgCosEven, 1).unwrap(),
                a: 1.0,
            };
            let (s, scale) = symmetrize(&op).unwrap();
            prop_assert_eq!(scale[0], 1.0);
            for i in 0..n - 1 {
                let upper = scale[i] * op.sup[i] / scale[i + 1];
                let lower = scale[i + 1] * op.sub[i] / scale[i];
                prop_assert!((upper - s.off[i]).abs() < 1e-13);
                prop_assert!((lower - s.off[i]).abs() < 1e-13);
            }
        }
    }
}
