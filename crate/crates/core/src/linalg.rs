//! Exact solvers over ℚ.

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Monomial coefficients `c_0..c_{n-1}` of the unique polynomial of degree
/// below `n` with `p(nodes[i]) = values[i]`.
///
/// Solves the Vandermonde system through Newton divided differences and
/// then expands the Newton form, `O(n²)` exact operations in total.
pub fn solve_vandermonde(nodes: &[Rational], values: &[Rational]) -> Result<Vec<Rational>> {
    let n = nodes.len();
    if values.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: values.len(),
        });
    }
    let mut dd = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let gap = &nodes[i] - &nodes[i - j];
            if gap.is_zero() {
                return Err(Error::DuplicateNodes);
            }
            dd[i] = (&dd[i] - &dd[i - 1]) / gap;
        }
    }

    // Horner on the Newton basis: p = dd[n-1]; p = p·(x − x_i) + dd[i]
    let mut coeffs = vec![Rational::zero(); n];
    if n == 0 {
        return Ok(coeffs);
    }
    coeffs[0] = dd[n - 1].clone();
    for i in (0..n - 1).rev() {
        // multiply the current polynomial (degree n-2-i) by (x − x_i)
        for k in (1..n - i).rev() {
            coeffs[k] = &coeffs[k - 1] - &(&nodes[i] * &coeffs[k]);
        }
        coeffs[0] = &dd[i] - &(&nodes[i] * &coeffs[0]);
    }
    Ok(coeffs)
}

/// Coefficients `c[k][j]` of `P(z, y) = Σ c[k][j] z^k y^j` from its values
/// `values[a][b] = P(z_nodes[a], y_nodes[b])` on a rectangular grid.
///
/// Interpolates in `z` along each `y` column, then in `y` for each
/// `z`-coefficient; the tensor-product Vandermonde matrix is never formed.
pub fn solve_bivariate(
    z_nodes: &[Rational],
    y_nodes: &[Rational],
    values: &[Vec<Rational>],
) -> Result<Vec<Vec<Rational>>> {
    if values.len() != z_nodes.len() {
        return Err(Error::DimensionMismatch {
            expected: z_nodes.len(),
            actual: values.len(),
        });
    }
    if let Some(row) = values.iter().find(|row| row.len() != y_nodes.len()) {
        return Err(Error::DimensionMismatch {
            expected: y_nodes.len(),
            actual: row.len(),
        });
    }
    // by_column[b][k] = Σ_j c[k][j] y_b^j
    let by_column = (0..y_nodes.len())
        .map(|b| {
            let column: Vec<Rational> = values.iter().map(|row| row[b].clone()).collect();
            solve_vandermonde(z_nodes, &column)
        })
        .collect::<Result<Vec<_>>>()?;
    (0..z_nodes.len())
        .map(|k| {
            let samples: Vec<Rational> = by_column.iter().map(|col| col[k].clone()).collect();
            solve_vandermonde(y_nodes, &samples)
        })
        .collect()
}

/// Evaluates `Σ coeffs[k] x^k` by Horner's rule.
pub fn eval_poly(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Solves the square system `matrix · x = rhs` by Gaussian elimination with
/// first-nonzero pivoting (exact, so no numerical pivoting is needed).
pub fn solve_linear(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<Rational>> {
    let n = matrix.len();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: rhs.len(),
        });
    }
    if let Some(row) = matrix.iter().find(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: row.len(),
        });
    }
    let mut a: Vec<Vec<Rational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::Singular)?;
        a.swap(col, pivot);
        let inv = a[col][col].recip().expect("pivot is nonzero");
        for entry in a[col][col..].iter_mut() {
            *entry *= &inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..=n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    Ok(a.into_iter()
        .map(|mut row| row.pop().expect("augmented column"))
        .collect())
}

/// Determinant by exact elimination.
pub fn determinant(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    let mut a = matrix.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        let inv = a[col][col].recip().expect("pivot is nonzero");
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}
