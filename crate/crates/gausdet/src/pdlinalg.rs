//! Symmetric positive-definite matrix primitives.
//!
//! Everything downstream reduces to a handful of operations on symmetric
//! matrices: Cholesky factorization (with a scaled pivot tolerance standing in
//! for exact positive definiteness), log-determinants accumulated in nats,
//! linear solves, and a Jacobi eigendecomposition. Matrices carry a storage
//! tag: diagonal-tagged matrices skip factorization and use per-entry
//! formulas, and the two paths are required to agree.
//!
//! All log-scale quantities are carried in nats; raw determinants of magnitude
//! `e^{±n}` are never materialized.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Default relative tolerance deciding positive definiteness.
///
/// A pivot is accepted when it exceeds `tol * max(1, ||m||_inf)`.
pub const DEFAULT_PD_TOL: f64 = 1e-10;

/// Relative tolerance for the symmetry check at construction.
pub const SYM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Row-major `n * n` entries.
    Dense(Vec<f64>),
    /// Diagonal entries only.
    Diagonal(Vec<f64>),
}

/// Real symmetric matrix with dense or diagonal-only storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    storage: Storage,
}

impl SymMatrix {
    /// Builds a dense symmetric matrix from row-major entries.
    ///
    /// Entries must be symmetric to within [`SYM_TOL`] relative to the largest
    /// magnitude entry; the stored matrix is the symmetrized average.
    pub fn from_dense(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        let scale = entries.iter().fold(0.0_f64, |m, &x| m.max(x.abs())).max(1.0);
        let mut data = entries;
        for i in 0..n {
            for j in (i + 1)..n {
                let a = data[i * n + j];
                let b = data[j * n + i];
                let dev = (a - b).abs();
                if dev > SYM_TOL * scale {
                    return Err(Error::NotSymmetric { i, j, deviation: dev });
                }
                let avg = 0.5 * (a + b);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Ok(Self {
            n,
            storage: Storage::Dense(data),
        })
    }

    /// Builds a dense symmetric matrix from rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_dense(n, entries)
    }

    /// Builds a diagonal-tagged matrix from its diagonal.
    pub fn from_diagonal(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self {
            n: diag.len(),
            storage: Storage::Diagonal(diag),
        })
    }

    /// The identity matrix, diagonal-tagged.
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            storage: Storage::Diagonal(vec![1.0; n]),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.storage, Storage::Diagonal(_))
    }

    /// Diagonal entries when diagonal-tagged.
    pub fn diagonal(&self) -> Option<&[f64]> {
        match &self.storage {
            Storage::Diagonal(d) => Some(d),
            Storage::Dense(_) => None,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d[i * self.n + j],
            Storage::Diagonal(d) => {
                if i == j {
                    d[i]
                } else {
                    0.0
                }
            }
        }
    }

    /// Row-major dense copy of the entries.
    pub fn to_dense_entries(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(d) => d.clone(),
            Storage::Diagonal(d) => {
                let mut out = vec![0.0; self.n * self.n];
                for (i, &x) in d.iter().enumerate() {
                    out[i * self.n + i] = x;
                }
                out
            }
        }
    }

    /// Same matrix with dense storage (forces the general code paths).
    pub fn densified(&self) -> Self {
        Self {
            n: self.n,
            storage: Storage::Dense(self.to_dense_entries()),
        }
    }

    /// Max-row-sum norm.
    pub fn inf_norm(&self) -> f64 {
        match &self.storage {
            Storage::Diagonal(d) => d.iter().fold(0.0_f64, |m, &x| m.max(x.abs())),
            Storage::Dense(d) => (0..self.n)
                .map(|i| d[i * self.n..(i + 1) * self.n].iter().map(|x| x.abs()).sum())
                .fold(0.0_f64, f64::max),
        }
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        match &self.storage {
            Storage::Diagonal(d) => d.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Storage::Dense(d) => d.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(match &self.storage {
            Storage::Diagonal(d) => d.iter().zip(v).map(|(&di, &vi)| di * vi).collect(),
            Storage::Dense(d) => (0..self.n)
                .map(|i| {
                    d[i * self.n..(i + 1) * self.n]
                        .iter()
                        .zip(v)
                        .map(|(&a, &b)| a * b)
                        .sum()
                })
                .collect(),
        })
    }
}

fn pivot_tolerance(m: &SymMatrix, pd_tol: f64) -> f64 {
    pd_tol * m.inf_norm().max(1.0)
}

enum CholKind {
    /// Row-major lower triangle, diagonal included.
    Dense(Vec<f64>),
    /// Square roots of the diagonal entries.
    Diagonal(Vec<f64>),
}

/// Lower-triangular Cholesky factor of a positive-definite matrix.
pub struct CholFactor {
    n: usize,
    kind: CholKind,
    log_det: f64,
}

impl CholFactor {
    pub fn order(&self) -> usize {
        self.n
    }

    /// `ln det(M)` in nats, accumulated from the factor diagonal.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Solves `M x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        match &self.kind {
            CholKind::Diagonal(sq) => {
                Ok(rhs.iter().zip(sq).map(|(&b, &s)| b / (s * s)).collect())
            }
            CholKind::Dense(l) => {
                let n = self.n;
                // forward: L y = rhs
                let mut y = vec![0.0; n];
                for i in 0..n {
                    let mut s = rhs[i];
                    for k in 0..i {
                        s -= l[i * n + k] * y[k];
                    }
                    y[i] = s / l[i * n + i];
                }
                // backward: L' x = y
                let mut x = vec![0.0; n];
                for i in (0..n).rev() {
                    let mut s = y[i];
                    for k in (i + 1)..n {
                        s -= l[k * n + i] * x[k];
                    }
                    x[i] = s / l[i * n + i];
                }
                Ok(x)
            }
        }
    }

    /// Applies the factor: `L z`. Maps standard normals to `N(0, M)` draws.
    pub fn mul_factor(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        self.mul_factor_into(z, &mut out);
        Ok(out)
    }

    /// `mul_factor` without allocation; `z` and `out` must have length `n`.
    pub fn mul_factor_into(&self, z: &[f64], out: &mut [f64]) {
        debug_assert_eq!(z.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        match &self.kind {
            CholKind::Diagonal(sq) => {
                for ((o, &zi), &s) in out.iter_mut().zip(z).zip(sq) {
                    *o = s * zi;
                }
            }
            CholKind::Dense(l) => {
                let n = self.n;
                for i in (0..n).rev() {
                    let mut s = 0.0;
                    for k in 0..=i {
                        s += l[i * n + k] * z[k];
                    }
                    out[i] = s;
                }
            }
        }
    }
}

/// Cholesky factorization with a scaled pivot threshold.
///
/// A pivot at or below `pd_tol * max(1, ||m||_inf)` fails the factorization
/// with [`Error::NotPositiveDefinite`].
pub fn cholesky(m: &SymMatrix, pd_tol: f64) -> Result<CholFactor> {
    let tol = pivot_tolerance(m, pd_tol);
    match &m.storage {
        Storage::Diagonal(d) => {
            let mut log_det = 0.0;
            let mut sq = Vec::with_capacity(m.n);
            for (i, &x) in d.iter().enumerate() {
                if x <= tol {
                    return Err(Error::NotPositiveDefinite {
                        index: i,
                        pivot: x,
                        tol,
                    });
                }
                log_det += x.ln();
                sq.push(x.sqrt());
            }
            Ok(CholFactor {
                n: m.n,
                kind: CholKind::Diagonal(sq),
                log_det,
            })
        }
        Storage::Dense(a) => {
            let n = m.n;
            let mut l = vec![0.0; n * n];
            let mut log_det = 0.0;
            for i in 0..n {
                for j in 0..=i {
                    let mut s = a[i * n + j];
                    for k in 0..j {
                        s -= l[i * n + k] * l[j * n + k];
                    }
                    if i == j {
                        if s <= tol {
                            return Err(Error::NotPositiveDefinite {
                                index: i,
                                pivot: s,
                                tol,
                            });
                        }
                        log_det += s.ln();
                        l[i * n + i] = s.sqrt();
                    } else {
                        l[i * n + j] = s / l[j * n + j];
                    }
                }
            }
            Ok(CholFactor {
                n,
                kind: CholKind::Dense(l),
                log_det,
            })
        }
    }
}

/// `ln det(m)` for positive-definite `m`, via triangular factorization.
pub fn chol_logdet(m: &SymMatrix, pd_tol: f64) -> Result<f64> {
    cholesky(m, pd_tol).map(|f| f.log_det())
}

/// Whether every factorization pivot exceeds `tol * max(1, ||m||_inf)`.
pub fn is_pd(m: &SymMatrix, tol: f64) -> bool {
    cholesky(m, tol).is_ok()
}

/// Solves `m x = v` for positive-definite `m`.
pub fn solve_pd(m: &SymMatrix, v: &[f64], pd_tol: f64) -> Result<Vec<f64>> {
    cholesky(m, pd_tol)?.solve(v)
}

/// Inverse of a positive-definite matrix, computed column-wise from the
/// Cholesky factor and symmetrized.
pub fn inverse_pd(m: &SymMatrix, pd_tol: f64) -> Result<SymMatrix> {
    let n = m.order();
    if let Some(d) = m.diagonal() {
        let tol = pivot_tolerance(m, pd_tol);
        let mut inv = Vec::with_capacity(n);
        for (i, &x) in d.iter().enumerate() {
            if x <= tol {
                return Err(Error::NotPositiveDefinite {
                    index: i,
                    pivot: x,
                    tol,
                });
            }
            inv.push(1.0 / x);
        }
        return SymMatrix::from_diagonal(inv);
    }
    let chol = cholesky(m, pd_tol)?;
    let mut entries = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = chol.solve(&e)?;
        e[j] = 0.0;
        for i in 0..n {
            entries[i * n + j] = col[i];
        }
    }
    // symmetrize roundoff
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (entries[i * n + j] + entries[j * n + i]);
            entries[i * n + j] = avg;
            entries[j * n + i] = avg;
        }
    }
    Ok(SymMatrix {
        n,
        storage: Storage::Dense(entries),
    })
}

/// Orthogonal matrix, row-major storage with orthonormal columns.
#[derive(Debug, Clone)]
pub struct Orthogonal {
    n: usize,
    data: Vec<f64>,
}

impl Orthogonal {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `Q v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect()
    }

    /// `Q' v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j] * v[i]).sum())
            .collect()
    }

    /// `Q diag(lambdas) Q'` as a dense symmetric matrix.
    pub fn conjugate_diagonal(&self, lambdas: &[f64]) -> Result<SymMatrix> {
        let n = self.n;
        if lambdas.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: lambdas.len(),
            });
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..n)
                    .map(|k| self.data[i * n + k] * lambdas[k] * self.data[j * n + k])
                    .sum();
                entries[i * n + j] = s;
                entries[j * n + i] = s;
            }
        }
        Ok(SymMatrix {
            n,
            storage: Storage::Dense(entries),
        })
    }

    /// Max absolute entry of `Q'Q - I`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in a..n {
                let dot: f64 = (0..n).map(|i| self.data[i * n + a] * self.data[i * n + b]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Haar-distributed random orthogonal matrix via Householder QR of a standard
/// normal matrix, with the R-diagonal sign fixed.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Orthogonal {
    let mut a = vec![0.0_f64; n * n];
    for x in a.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
    // Householder QR: accumulate Q explicitly.
    let mut q = Orthogonal::identity(n).data;
    for k in 0..n {
        let mut norm2 = 0.0;
        for i in k..n {
            norm2 += a[i * n + k] * a[i * n + k];
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k * n + k] > 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n];
        v[k] = a[k * n + k] - alpha;
        for i in (k + 1)..n {
            v[i] = a[i * n + k];
        }
        let vtv: f64 = v[k..].iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        // A <- (I - 2 v v' / v'v) A
        for j in k..n {
            let dot: f64 = (k..n).map(|i| v[i] * a[i * n + j]).sum();
            let c = 2.0 * dot / vtv;
            for i in k..n {
                a[i * n + j] -= c * v[i];
            }
        }
        // Q <- Q (I - 2 v v' / v'v)
        for i in 0..n {
            let dot: f64 = (k..n).map(|j| q[i * n + j] * v[j]).sum();
            let c = 2.0 * dot / vtv;
            for j in k..n {
                q[i * n + j] -= c * v[j];
            }
        }
    }
    // Fix column signs so the distribution is Haar (R diagonal positive).
    for j in 0..n {
        if a[j * n + j] < 0.0 {
            for i in 0..n {
                q[i * n + j] = -q[i * n + j];
            }
        }
    }
    Orthogonal { n, data: q }
}

/// Eigendecomposition of a symmetric matrix: `m = T diag(eigenvalues) T'`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the corresponding eigenvectors.
    pub basis: Orthogonal,
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigendecomposition.
///
/// Diagonal-tagged input skips the iteration: the eigenvalues are the sorted
/// diagonal and the basis is the sorting permutation.
pub fn eigen_sym(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.order();
    if let Some(d) = m.diagonal() {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
        let eigenvalues = idx.iter().map(|&i| d[i]).collect();
        let mut data = vec![0.0; n * n];
        for (col, &src) in idx.iter().enumerate() {
            data[src * n + col] = 1.0;
        }
        return Ok(EigenDecomposition {
            eigenvalues,
            basis: Orthogonal { n, data },
        });
    }

    let mut a = m.to_dense_entries();
    let mut v = Orthogonal::identity(n).data;
    let scale = m.fro_norm().max(1.0);
    let target = 1e-14 * scale;

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > target {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence {
                sweeps,
                off_norm: off_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // rotate rows/columns p, q of A
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                // accumulate V <- V J
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let eigenvalues: Vec<f64> = idx.iter().map(|&i| a[i * n + i]).collect();
    let mut data = vec![0.0; n * n];
    for (col, &src) in idx.iter().enumerate() {
        for row in 0..n {
            data[row * n + col] = v[row * n + src];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        basis: Orthogonal { n, data },
    })
}

/// Plain-text matrix format.
///
/// Dense: first line `n`, then `n` lines of `n` whitespace-separated reals.
/// Diagonal: first line `diag n`, then one line of `n` reals.
pub mod textio {
    use super::SymMatrix;
    use crate::error::{Error, Result};
    use std::fmt::Write as _;

    pub fn format_matrix(m: &SymMatrix) -> String {
        let n = m.order();
        let mut out = String::new();
        if let Some(d) = m.diagonal() {
            let _ = writeln!(out, "diag {n}");
            let row: Vec<String> = d.iter().map(|x| format!("{x}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        } else {
            let _ = writeln!(out, "{n}");
            for i in 0..n {
                let row: Vec<String> = (0..n).map(|j| format!("{}", m.get(i, j))).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }

    fn parse_reals(line: &str, expected: usize) -> Result<Vec<f64>> {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("invalid real `{t}`")))
            })
            .collect::<Result<_>>()?;
        if vals.len() != expected {
            return Err(Error::Parse(format!(
                "expected {expected} values, got {}",
                vals.len()
            )));
        }
        Ok(vals)
    }

    /// Parses a matrix block from lines; returns the matrix and the number of
    /// lines consumed.
    pub fn parse_matrix_lines(lines: &[&str]) -> Result<(SymMatrix, usize)> {
        let header = lines
            .first()
            .ok_or_else(|| Error::Parse("empty matrix block".into()))?
            .trim();
        if let Some(rest) = header.strip_prefix("diag") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid diag header `{header}`")))?;
            let line = lines
                .get(1)
                .ok_or_else(|| Error::Parse("missing diagonal line".into()))?;
            let d = parse_reals(line, n)?;
            Ok((SymMatrix::from_diagonal(d)?, 2))
        } else {
            let n: usize = header
                .parse()
                .map_err(|_| Error::Parse(format!("invalid matrix header `{header}`")))?;
            let mut entries = Vec::with_capacity(n * n);
            for i in 0..n {
                let line = lines
                    .get(1 + i)
                    .ok_or_else(|| Error::Parse(format!("missing matrix row {}", i + 1)))?;
                entries.extend(parse_reals(line, n)?);
            }
            Ok((SymMatrix::from_dense(n, entries)?, 1 + n))
        }
    }

    pub fn parse_matrix(text: &str) -> Result<SymMatrix> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let (m, used) = parse_matrix_lines(&lines)?;
        if used != lines.len() {
            return Err(Error::Parse("trailing content after matrix block".into()));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!(
            (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0),
            "{x} vs {y} (tol {tol})"
        );
    }

    /// Random dense PD matrix with spectrum drawn in `[lo, hi]`.
    fn random_pd(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> (SymMatrix, Vec<f64>) {
        let t = random_orthogonal(n, rng);
        let mut lambdas: Vec<f64> =
            (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
        lambdas.sort_by(f64::total_cmp);
        (t.conjugate_diagonal(&lambdas).unwrap(), lambdas)
    }

    #[test]
    fn eigen_identity() {
        let m = SymMatrix::identity(3).densified();
        let e = eigen_sym(&m).unwrap();
        for &l in &e.eigenvalues {
            assert_close(l, 1.0, 1e-12);
        }
        assert!(e.basis.orthonormality_defect() < 1e-10);
        let rec = e.basis.conjugate_diagonal(&e.eigenvalues).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((rec.get(i, j) - m.get(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn eigen_diagonal_sorts_ascending() {
        let m = SymMatrix::from_diagonal(vec![2.0, 0.5]).unwrap();
        let e = eigen_sym(&m).unwrap();
        assert_eq!(e.eigenvalues, vec![0.5, 2.0]);
        // and the dense path agrees
        let e2 = eigen_sym(&m.densified()).unwrap();
        assert_close(e2.eigenvalues[0], 0.5, 1e-12);
        assert_close(e2.eigenvalues[1], 2.0, 1e-12);
    }

    #[test]
    fn eigen_two_by_two_against_characteristic_roots() {
        // independent oracle: roots of the characteristic polynomial of
        // [[a, b], [b, c]] are (a+c)/2 ± sqrt(((a-c)/2)^2 + b^2)
        let (a, b, c) = (2.0_f64, 1.0_f64, 2.0_f64);
        let mean = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let expected = [mean - rad, mean + rad];
        assert_eq!(expected, [1.0, 3.0]);

        let m = SymMatrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap();
        let e = eigen_sym(&m).unwrap();
        assert_close(e.eigenvalues[0], expected[0], 1e-12);
        assert_close(e.eigenvalues[1], expected[1], 1e-12);
    }

    #[test]
    fn eigen_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[2usize, 5, 16, 33] {
            let (m, lambdas) = random_pd(n, 0.2, 3.0, &mut rng);
            let e = eigen_sym(&m).unwrap();
            assert!(e.basis.orthonormality_defect() < 1e-10);
            for (computed, expected) in e.eigenvalues.iter().zip(&lambdas) {
                assert_close(*computed, *expected, 1e-9);
            }
            let rec = e.basis.conjugate_diagonal(&e.eigenvalues).unwrap();
            let mut err = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    err += (rec.get(i, j) - m.get(i, j)).powi(2);
                }
            }
            assert!(err.sqrt() <= 1e-9 * m.fro_norm());
        }
    }

    #[test]
    fn logdet_identity_is_zero() {
        for n in [1usize, 4, 9] {
            assert_eq!(chol_logdet(&SymMatrix::identity(n), DEFAULT_PD_TOL).unwrap(), 0.0);
            assert_close(
                chol_logdet(&SymMatrix::identity(n).densified(), DEFAULT_PD_TOL).unwrap(),
                0.0,
                1e-14,
            );
        }
    }

    #[test]
    fn logdet_diag_two_twos() {
        let m = SymMatrix::from_diagonal(vec![2.0, 2.0]).unwrap();
        assert_close(chol_logdet(&m, DEFAULT_PD_TOL).unwrap(), 2.0 * 2.0_f64.ln(), 1e-14);
    }

    #[test]
    fn logdet_near_singular_two_by_two() {
        // det = 1 - 0.999^2 by the 2x2 formula
        let m = SymMatrix::from_rows(&[vec![1.0, 0.999], vec![0.999, 1.0]]).unwrap();
        let expected = (1.0 - 0.999_f64 * 0.999).ln();
        assert_close(chol_logdet(&m, DEFAULT_PD_TOL).unwrap(), expected, 1e-9);
        assert!((expected + 6.215).abs() < 1e-3);
    }

    #[test]
    fn is_pd_examples() {
        assert!(is_pd(&SymMatrix::identity(2), DEFAULT_PD_TOL));
        assert!(!is_pd(
            &SymMatrix::from_diagonal(vec![1.0, 0.0]).unwrap(),
            1e-10
        ));
        assert!(!is_pd(
            &SymMatrix::from_diagonal(vec![1.0, -0.5]).unwrap(),
            DEFAULT_PD_TOL
        ));
    }

    #[test]
    fn solve_examples() {
        let x = solve_pd(&SymMatrix::identity(3), &[1.0, 2.0, 3.0], DEFAULT_PD_TOL).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);

        let m = SymMatrix::from_diagonal(vec![2.0, 4.0]).unwrap();
        let x = solve_pd(&m, &[2.0, 4.0], DEFAULT_PD_TOL).unwrap();
        assert_close(x[0], 1.0, 1e-14);
        assert_close(x[1], 1.0, 1e-14);

        // hand inversion: [[2,1],[1,2]]^{-1} (3,3)' = (1,1)'
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let x = solve_pd(&m, &[3.0, 3.0], DEFAULT_PD_TOL).unwrap();
        assert_close(x[0], 1.0, 1e-12);
        assert_close(x[1], 1.0, 1e-12);
    }

    #[test]
    fn solve_errors() {
        let m = SymMatrix::from_diagonal(vec![1.0, -1.0]).unwrap();
        assert!(matches!(
            solve_pd(&m, &[1.0, 1.0], DEFAULT_PD_TOL),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let m = SymMatrix::identity(2);
        assert!(matches!(
            solve_pd(&m, &[1.0], DEFAULT_PD_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn asymmetric_input_rejected() {
        let r = SymMatrix::from_dense(2, vec![1.0, 0.5, 0.2, 1.0]);
        assert!(matches!(r, Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn inverse_pd_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (m, _) = random_pd(8, 0.3, 2.5, &mut rng);
        let inv = inverse_pd(&m, DEFAULT_PD_TOL).unwrap();
        for col in 0..8 {
            let e: Vec<f64> = (0..8).map(|i| if i == col { 1.0 } else { 0.0 }).collect();
            let x = m.mul_vec(&inv.mul_vec(&e).unwrap()).unwrap();
            for i in 0..8 {
                assert!((x[i] - e[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn is_pd_agrees_with_eigenvalue_sign_rule() {
        // random symmetric matrices, n <= 16; skip cases within roundoff of
        // the decision boundary so the two rules cannot disagree spuriously
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let tol = 1e-10;
        let mut checked = 0;
        while checked < 1000 {
            let n = 1 + (rng.random::<u64>() % 16) as usize;
            let mut entries = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let x: f64 = rng.sample(StandardNormal);
                    entries[i * n + j] = x;
                    entries[j * n + i] = x;
                }
            }
            let m = SymMatrix::from_dense(n, entries).unwrap();
            let e = eigen_sym(&m).unwrap();
            let scaled = tol * m.inf_norm().max(1.0);
            let min_eig = e.eigenvalues[0];
            if (min_eig - scaled).abs() < 1e-6 * m.inf_norm().max(1.0) {
                continue;
            }
            assert_eq!(is_pd(&m, tol), min_eig > scaled, "n={n} min_eig={min_eig}");
            checked += 1;
        }
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &n in &[1usize, 2, 7, 24] {
            let q = random_orthogonal(n, &mut rng);
            assert!(q.orthonormality_defect() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn textio_roundtrip() {
        let m = SymMatrix::from_rows(&[vec![2.0, 0.25], vec![0.25, 1.5]]).unwrap();
        let s = textio::format_matrix(&m);
        let back = textio::parse_matrix(&s).unwrap();
        assert_eq!(m, back);

        let d = SymMatrix::from_diagonal(vec![1.0, 2.0, 0.5]).unwrap();
        let s = textio::format_matrix(&d);
        assert!(s.starts_with("diag 3"));
        let back = textio::parse_matrix(&s).unwrap();
        assert_eq!(d, back);

        assert!(textio::parse_matrix("2\n1 0\n0").is_err());
        assert!(textio::parse_matrix("diag 2\n1 x").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_logdet_matches_eigenvalue_sum(seed in 0u64..1000, n in 1usize..64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (m, _) = random_pd(n, 0.1, 4.0, &mut rng);
            let ld = chol_logdet(&m, DEFAULT_PD_TOL).unwrap();
            let e = eigen_sym(&m).unwrap();
            let sum: f64 = e.eigenvalues.iter().map(|l| l.ln()).sum();
            prop_assert!((ld - sum).abs() <= 1e-8 * ld.abs().max(1.0));
        }

        #[test]
        fn prop_solve_multiply_back(seed in 0u64..1000, n in 1usize..64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(7777));
            let (m, _) = random_pd(n, 0.1, 4.0, &mut rng);
            let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let x = solve_pd(&m, &v, DEFAULT_PD_TOL).unwrap();
            let back = m.mul_vec(&x).unwrap();
            let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt().max(1e-300);
            let rnorm = back.iter().zip(&v).map(|(b, t)| (b - t) * (b - t)).sum::<f64>().sqrt();
            prop_assert!(rnorm <= 1e-9 * vnorm.max(1.0));
        }
    }
}
