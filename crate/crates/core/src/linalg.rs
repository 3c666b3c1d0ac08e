//! Small linear-algebra layer: a row-sparse complex matrix, dense Hermitian
//! diagonalization, and a locking Lanczos solver for the lowest eigenvalues
//! of large sparse Hermitian matrices.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Complex matrix stored as sorted rows of `(column, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    /// Sums duplicate entries and drops exact zeros.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (i, j, v) in triplets {
            *acc[i].entry(j).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let rows = acc
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, v)| *v != Complex64::new(0.0, 0.0)).collect())
            .collect();
        Self { dim, rows }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let rows = (0..dim)
            .map(|i| {
                (0..dim)
                    .filter(|&j| m[(i, j)] != Complex64::new(0.0, 0.0))
                    .map(|j| (j, m[(i, j)]))
                    .collect()
            })
            .collect();
        Self { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(p) => self.rows[i][p].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(j, v)| v * x[*j]).sum())
            .collect()
    }

    pub fn matvec_into(&self, x: &CVector, out: &mut CVector) {
        for (i, r) in self.rows.iter().enumerate() {
            out[i] = r.iter().map(|(j, v)| v * x[*j]).sum();
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                m[(i, *j)] = *v;
            }
        }
        m
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                worst = worst.max((v - self.get(*j, i).conj()).norm());
            }
        }
        worst
    }

    /// `max |[A, N]_ij|` for the diagonal operator `N = diag(n)`.
    pub fn commutator_with_diagonal(&self, n: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                worst = worst.max((v * (n[*j] - n[i])).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().map(|(_, v)| v.norm()))
            .fold(0.0, f64::max)
    }
}

/// Dense Hermitian eigendecomposition, eigenvalues ascending, eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let dim = m.nrows();
    if dim == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    // symmetrize to remove round-off asymmetry before the solver sees it
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(dim, dim);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (values, vecs)
}

fn orthogonalize(v: &mut CVector, against: &[CVector]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in against {
            let c = q.dotc(v);
            v.axpy(-c, q, Complex64::new(1.0, 0.0));
        }
    }
}

/// Lowest `count` eigenvalues of a sparse Hermitian matrix by restarted
/// Lanczos with locking. Degenerate eigenvalues are found one copy at a
/// time, each search orthogonal to the locked vectors.
pub fn lowest_eigenvalues(m: &SparseMatrix, count: usize, tol: f64, seed: u64) -> Result<Vec<f64>> {
    let dim = m.dim();
    if count > dim {
        return Err(Error::Precondition(format!(
            "requested {count} eigenvalues of a {dim}-dimensional matrix"
        )));
    }
    let scale = m.max_abs().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locked: Vec<CVector> = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    let krylov = 80.min(dim);

    for _ in 0..count {
        let mut start = CVector::from_fn(dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let mut found = None;
        for _restart in 0..200 {
            orthogonalize(&mut start, &locked);
            let nrm = start.norm();
            if nrm < 1e-300 {
                break;
            }
            start.unscale_mut(nrm);

            let mut basis: Vec<CVector> = vec![start.clone()];
            let mut alpha = Vec::new();
            let mut beta: Vec<f64> = Vec::new();
            let mut w = CVector::zeros(dim);
            for step in 0..krylov {
                m.matvec_into(&basis[step], &mut w);
                let a = basis[step].dotc(&w).re;
                alpha.push(a);
                orthogonalize(&mut w, &locked);
                orthogonalize(&mut w, &basis);
                let b = w.norm();
                if step + 1 == krylov || b < 1e-13 * scale {
                    break;
                }
                beta.push(b);
                basis.push(w.unscale(b));
            }
            let k = alpha.len();
            let mut t = DMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                t[(i, i)] = alpha[i];
                if i + 1 < k {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = t.symmetric_eigen();
            let lowest = (0..k)
                .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
                .expect("non-empty");
            let theta = eig.eigenvalues[lowest];
            let mut ritz = CVector::zeros(dim);
            for (i, q) in basis.iter().enumerate() {
                ritz.axpy(Complex64::new(eig.eigenvectors[(i, lowest)], 0.0), q, Complex64::new(1.0, 0.0));
            }
            let nrm = ritz.norm();
            ritz.unscale_mut(nrm);
            let mut hr = CVector::zeros(dim);
            m.matvec_into(&ritz, &mut hr);
            let residual = (&hr - &ritz * Complex64::new(theta, 0.0)).norm();
            start = ritz;
            if residual <= tol * scale {
                found = Some(theta);
                break;
            }
        }
        match found {
            Some(theta) => {
                values.push(theta);
                locked.push(start);
            }
            None => {
                return Err(Error::Precondition(
                    "Lanczos iteration did not converge".into(),
                ))
            }
        }
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}
