//! Dense complex Hermitian kernels.
//!
//! The workhorse is [`leading_generalized_eigvec`], which maximizes the
//! generalized Rayleigh quotient `u†Qu / u†Fu` for a PSD numerator and a PD
//! denominator. It whitens the pencil with a Cholesky factor of `F` and
//! solves a standard Hermitian eigenproblem, so `F⁻¹Q` is never formed.
//!
//! Outputs follow a fixed convention so that results are reproducible:
//! eigenvectors have unit norm, their largest-modulus entry is real and
//! non-negative, and inside a degenerate eigenspace the vector closest to the
//! lowest-index coordinate axis is chosen.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative asymmetry tolerated by the Hermitian checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative eigenvalue gap below which two eigenvalues are treated as equal.
const DEGENERACY_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct EigPair {
    pub vector: CVector,
    pub value: f64,
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn ensure_finite(m: &CMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn ensure_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub fn check_hermitian(m: &CMatrix) -> Result<()> {
    let asymmetry = frobenius(&(m - m.adjoint()));
    if asymmetry <= HERMITIAN_TOL * frobenius(m) {
        Ok(())
    } else {
        Err(Error::NotHermitian { asymmetry })
    }
}

/// `(M + M†) / 2`, removing round-off asymmetry.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Lower-triangular `L` with `F = L·L†`.
pub fn cholesky(f: &CMatrix) -> Result<CMatrix> {
    ensure_square(f, "Cholesky input")?;
    ensure_finite(f, "Cholesky input")?;
    check_hermitian(f)?;
    let n = f.nrows();
    let max_diag = (0..n).map(|i| f[(i, i)].re.abs()).fold(0.0, f64::max);
    let floor = n as f64 * f64::EPSILON * max_diag;
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = f[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > floor) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = f[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L·X = B` for lower-triangular `L`.
fn solve_lower(l: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = l.nrows();
    let mut x = b.clone();
    for c in 0..x.ncols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Solves `L†·x = y` for lower-triangular `L`.
fn solve_lower_adjoint(l: &CMatrix, y: &CVector) -> CVector {
    let n = l.nrows();
    let mut x = y.clone();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)].conj();
    }
    x
}

/// Rotates `v` so that its largest-modulus entry is real and non-negative.
pub fn phase_normalize(v: &mut CVector) {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return;
    }
    let idx = v
        .iter()
        .position(|z| z.norm() >= peak * (1.0 - 1e-12))
        .unwrap_or(0);
    let pivot = v[idx];
    let rot = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[idx] = Complex64::new(v[idx].norm(), 0.0);
}

fn normalize(v: &mut CVector) -> f64 {
    let norm = v.norm();
    if norm > 0.0 {
        v.unscale_mut(norm);
    }
    norm
}

/// Euclidean orthonormal basis of `span(vectors)` via modified Gram-Schmidt
/// applied twice.
fn orthonormal_basis(vectors: &[CVector]) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w.axpy(-c, b, Complex64::new(1.0, 0.0));
            }
        }
        let scale = v.norm();
        if normalize(&mut w) > 1e-10 * scale {
            basis.push(w);
        }
    }
    basis
}

/// Picks `count` orthonormal vectors from `span(vectors)` deterministically:
/// project `e₀, e₁, …` onto the span (minus what is already chosen) and keep
/// the first that survive. Independent of which basis spans the subspace.
fn canonical_in_span(vectors: &[CVector], count: usize) -> Vec<CVector> {
    let basis = orthonormal_basis(vectors);
    let n = vectors[0].len();
    let mut chosen: Vec<CVector> = Vec::with_capacity(count);
    for axis in 0..n {
        if chosen.len() == count {
            break;
        }
        let mut p = CVector::zeros(n);
        for b in &basis {
            p.axpy(b[axis].conj(), b, Complex64::new(1.0, 0.0));
        }
        for c in &chosen {
            let coef = c.dotc(&p);
            p.axpy(-coef, c, Complex64::new(1.0, 0.0));
        }
        if normalize(&mut p) > 1e-6 {
            phase_normalize(&mut p);
            chosen.push(p);
        }
    }
    chosen
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalue indices sorted
/// ascending (or descending) and grouped into degenerate clusters.
struct SortedSpectrum {
    values: Vec<f64>,
    vectors: Vec<CVector>,
    clusters: Vec<std::ops::Range<usize>>,
}

impl SortedSpectrum {
    fn new(m: CMatrix, descending: bool) -> Self {
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            let ord = eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]);
            if descending {
                ord.reverse()
            } else {
                ord
            }
        });
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors: Vec<CVector> = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut clusters = Vec::new();
        let mut start = 0;
        for i in 1..=values.len() {
            if i == values.len() || (values[i] - values[start]).abs() > DEGENERACY_TOL * scale {
                clusters.push(start..i);
                start = i;
            }
        }
        Self { values, vectors, clusters }
    }
}

/// Leading eigenpair of the pencil `(Q, F)`: the unit vector maximizing
/// `u†Qu / u†Fu` and the maximal generalized eigenvalue.
pub fn leading_generalized_eigvec(q: &CMatrix, f: &CMatrix) -> Result<EigPair> {
    ensure_square(q, "Q")?;
    if q.shape() != f.shape() {
        return Err(Error::DimensionMismatch(format!(
            "Q is {:?} but F is {:?}",
            q.shape(),
            f.shape()
        )));
    }
    ensure_finite(q, "Q")?;
    check_hermitian(q)?;
    let l = cholesky(f)?;

    let x = solve_lower(&l, q);
    let whitened = hermitize(&solve_lower(&l, &x.adjoint()));
    let spectrum = SortedSpectrum::new(whitened, true);
    let top = spectrum.clusters[0].clone();
    let value = spectrum.values[0];

    let mapped: Vec<CVector> = spectrum.vectors[top]
        .iter()
        .map(|y| solve_lower_adjoint(&l, y))
        .collect();
    let vector = if mapped.len() == 1 {
        let mut u = mapped.into_iter().next().unwrap();
        normalize(&mut u);
        phase_normalize(&mut u);
        u
    } else {
        canonical_in_span(&mapped, 1).remove(0)
    };
    if !vector.iter().all(|z| z.re.is_finite() && z.im.is_finite()) || !value.is_finite() {
        return Err(Error::NonFinite("generalized eigenvector"));
    }
    Ok(EigPair { vector, value })
}

/// The `count` eigenvectors of smallest eigenvalue of a Hermitian matrix, as
/// orthonormal columns ordered by increasing eigenvalue.
pub fn smallest_eigvecs(s: &CMatrix, count: usize) -> Result<(CMatrix, Vec<f64>)> {
    ensure_square(s, "S")?;
    if count == 0 || count > s.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "cannot take {count} eigenvectors of a {0}x{0} matrix",
            s.nrows()
        )));
    }
    ensure_finite(s, "S")?;
    check_hermitian(s)?;
    let spectrum = SortedSpectrum::new(hermitize(s), false);
    let mut columns: Vec<CVector> = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for cluster in &spectrum.clusters {
        let need = count - columns.len();
        if need == 0 {
            break;
        }
        let take = need.min(cluster.len());
        columns.extend(canonical_in_span(&spectrum.vectors[cluster.clone()], take));
        values.extend_from_slice(&spectrum.values[cluster.start..cluster.start + take]);
    }
    Ok((CMatrix::from_columns(&columns), values))
}

/// Smallest eigenvalue of a Hermitian PSD matrix and its eigenvector.
pub fn min_eigvec(s: &CMatrix) -> Result<EigPair> {
    let (columns, values) = smallest_eigvecs(s, 1)?;
    Ok(EigPair {
        vector: columns.column(0).into_owned(),
        value: values[0],
    })
}

/// One circularly-symmetric complex Gaussian sample of total variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Random `rows × cols` matrix with orthonormal columns.
pub fn orthonormal_columns<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Result<CMatrix> {
    if cols == 0 || cols > rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot build {cols} orthonormal columns in dimension {rows}"
        )));
    }
    loop {
        let draws: Vec<CVector> = (0..cols)
            .map(|_| CVector::from_fn(rows, |_, _| complex_gaussian(rng, 1.0)))
            .collect();
        let basis = orthonormal_basis(&draws);
        // a rank-deficient Gaussian draw has probability zero; redraw anyway
        if basis.len() == cols {
            return Ok(CMatrix::from_columns(&basis));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(rows: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, data.len() / rows, data.iter().map(|&x| c(x, 0.0)))
    }

    #[test]
    fn cholesky_of_scaled_identity() {
        let l = cholesky(&CMatrix::identity(2, 2).scale(4.0)).unwrap();
        assert_eq!(l, CMatrix::identity(2, 2).scale(2.0));
    }

    #[test]
    fn cholesky_reconstructs() {
        let f = real(2, &[2.0, 1.0, 1.0, 2.0]);
        let l = cholesky(&f).unwrap();
        assert!(frobenius(&(&l * l.adjoint() - &f)) < 1e-12);
        assert_eq!(l[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let f = real(2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(cholesky(&f), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn cholesky_rejects_non_hermitian() {
        let f = real(2, &[2.0, 1.0, 0.0, 2.0]);
        assert!(matches!(cholesky(&f), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn leading_of_diagonal_problem() {
        let q = real(2, &[2.0, 0.0, 0.0, 1.0]);
        let pair = leading_generalized_eigvec(&q, &CMatrix::identity(2, 2)).unwrap();
        assert!((pair.value - 2.0).abs() < 1e-14);
        assert_eq!(pair.vector, CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
    }

    #[test]
    fn leading_tie_break_on_identity() {
        let id = CMatrix::identity(3, 3);
        let pair = leading_generalized_eigvec(&id, &id).unwrap();
        assert!((pair.value - 1.0).abs() < 1e-14);
        assert!((&pair.vector - CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])).norm() < 1e-14);
    }

    #[test]
    fn leading_rejects_mismatch() {
        let err = leading_generalized_eigvec(&CMatrix::identity(2, 2), &CMatrix::identity(3, 3));
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn min_eigvec_diagonal_and_zero() {
        let s = real(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let pair = min_eigvec(&s).unwrap();
        assert!((pair.value - 1.0).abs() < 1e-14);
        assert!((pair.vector[1] - c(1.0, 0.0)).norm() < 1e-14);

        let pair = min_eigvec(&CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(pair.value, 0.0);
        assert!((pair.vector[0] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn smallest_eigvecs_is_orthonormal() {
        let mut rng = stream(3, Stream::Filters);
        let a = CMatrix::from_fn(4, 4, |_, _| complex_gaussian(&mut rng, 1.0));
        let s = &a * a.adjoint();
        let (cols, values) = smallest_eigvecs(&s, 2).unwrap();
        assert!(values[0] <= values[1]);
        assert!(frobenius(&(cols.adjoint() * &cols - CMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn phase_convention() {
        let mut v = CVector::from_vec(vec![c(0.1, 0.2), c(0.0, -3.0)]);
        phase_normalize(&mut v);
        assert_eq!(v[1], c(3.0, 0.0));
        assert!((v[0].norm() - c(0.1, 0.2).norm()).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_columns_contracts() {
        let mut rng = stream(11, Stream::Filters);
        let a = orthonormal_columns(&mut rng, 3, 3).unwrap();
        assert!(frobenius(&(a.adjoint() * &a - CMatrix::identity(3, 3))) < 1e-12);
        let b = orthonormal_columns(&mut rng, 4, 2).unwrap();
        assert!(frobenius(&(b.adjoint() * &b - CMatrix::identity(2, 2))) < 1e-12);

        let again = orthonormal_columns(&mut stream(11, Stream::Filters), 3, 3).unwrap();
        assert_eq!(a, again);

        assert!(matches!(
            orthonormal_columns(&mut rng, 2, 3),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
