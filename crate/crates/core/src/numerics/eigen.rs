//! Dense symmetric eigensolver (cyclic Jacobi rotations).
#![allow(clippy::needless_range_loop)]

use super::NumericsError;

/// Real symmetric matrix stored as its packed lower triangle.
///
/// Symmetry holds by construction: `get(i, j)` and `get(j, i)` read the same
/// storage slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    packed: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(order: usize) -> Result<Self, NumericsError> {
        if order == 0 {
            return Err(NumericsError::Malformed(
                "matrix order must be at least 1".into(),
            ));
        }
        Ok(Self {
            order,
            packed: vec![0.0; order * (order + 1) / 2],
        })
    }

    pub fn identity(order: usize) -> Result<Self, NumericsError> {
        let mut m = Self::zeros(order)?;
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        Ok(m)
    }

    /// Builds from dense rows, rejecting non-square or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumericsError> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(NumericsError::Malformed(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate().take(i + 1) {
                if v != rows[j][i] {
                    return Err(NumericsError::Malformed(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn slot(i: usize, j: usize) -> usize {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        r * (r + 1) / 2 + c
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[Self::slot(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.order && j < self.order, "index out of range");
        self.packed[Self::slot(i, j)] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.order {
            for j in 0..self.order {
                acc += self.get(i, j).powi(2);
            }
        }
        acc.sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Eigen-decomposition result: `values[k]` pairs with `vectors[k]`, sorted by
/// ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 100;

/// Full eigen-decomposition of a symmetric matrix.
///
/// Cyclic Jacobi: each sweep annihilates every off-diagonal entry once with a
/// plane rotation, accumulating the rotations into the eigenvector matrix. It
/// stops when the off-diagonal mass is negligible against the diagonal.
pub fn eig_sym(m: &SymmetricMatrix) -> Result<SymmetricEigen, NumericsError> {
    let n = m.order();
    let mut a = m.to_dense();
    if a.iter().flatten().any(|x| !x.is_finite()) {
        return Err(NumericsError::Malformed(
            "matrix has non-finite entries".into(),
        ));
    }
    // v[i][k]: component i of eigenvector k.
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = m.norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p][p];
                let aqq = a[q][q];
                // Skip rotations too small to change the diagonal.
                if apq.abs() < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                // signum(0.0) == 1.0, so a zero theta gives the 45° rotation.
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&k| a[k][k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i][k]).collect())
        .collect();
    Ok(SymmetricEigen { values, vectors })
}
