use crate::error::{Error, Result};
use crate::linalg::dense::{dot, DenseMatrix};

/// Tikhonov-regularized readout fit.
///
/// Solves `W = targets states^T (states states^T + beta I)^{-1}` where
/// `states` is n×T and `targets` is p×T, returning the p×n weight matrix.
/// The Gram system is factorized (Cholesky) rather than inverted; with
/// `beta = 0` the Gram matrix must be nonsingular.
pub fn ridge_solve(states: &DenseMatrix, targets: &DenseMatrix, beta: f64) -> Result<DenseMatrix> {
    if states.cols() != targets.cols() {
        return Err(Error::Dimension(format!(
            "ridge: states {}x{} vs targets {}x{}",
            states.rows(),
            states.cols(),
            targets.rows(),
            targets.cols()
        )));
    }
    if states.cols() == 0 {
        return Err(Error::InsufficientData("ridge: no training columns".into()));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(
            "ridge: regularization must be finite and nonnegative".into(),
        ));
    }

    let n = states.rows();
    let p = targets.rows();

    // Gram matrix G = states states^T + beta I (symmetric, n x n).
    let mut gram = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let g = dot(states.row(i), states.row(j));
            gram.set(i, j, g);
            gram.set(j, i, g);
        }
        gram.set(i, i, gram.get(i, i) + beta);
    }

    let chol = cholesky(&gram)?;

    // Right-hand sides B = states targets^T, one column per output.
    let mut w = DenseMatrix::zeros(p, n);
    for out in 0..p {
        let rhs: Vec<f64> = (0..n).map(|i| dot(states.row(i), targets.row(out))).collect();
        let sol = chol.solve(&rhs);
        w.row_mut(out).copy_from_slice(&sol);
    }
    Ok(w)
}

struct Cholesky {
    // Lower-triangular factor, row-major.
    l: Vec<f64>,
    n: usize,
}

fn cholesky(g: &DenseMatrix) -> Result<Cholesky> {
    let n = g.rows();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g.get(i, j);
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return Err(Error::SingularSystem);
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Ok(Cholesky { l, n })
}

impl Cholesky {
    /// Solve `L L^T x = b`.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.l[i * n + k] * y[k];
            }
            y[i] = sum / self.l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in i + 1..n {
                sum -= self.l[k * n + i] * x[k];
            }
            x[i] = sum / self.l[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;

    fn to_dense_rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
        (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
    }

    #[test]
    fn identity_gram_reproduces_targets() {
        let states = DenseMatrix::identity(2);
        let targets = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let w = ridge_solve(&states, &targets, 0.0).unwrap();
        assert_eq!(w.row(0), &[1.0, 2.0]);
    }

    #[test]
    fn unit_regularization_halves_identity_solution() {
        let states = DenseMatrix::identity(2);
        let targets = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let w = ridge_solve(&states, &targets, 1.0).unwrap();
        assert!((w.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((w.get(0, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_explicit_inverse_oracle() {
        let mut rng = testutil::rng(3);
        for _ in 0..10 {
            let (_, states) = testutil::random_sparse_with_dense(&mut rng, 4, 50, 1.0);
            let (_, targets) = testutil::random_sparse_with_dense(&mut rng, 1, 50, 1.0);
            let beta = 1e-6;
            let states_m = DenseMatrix::from_rows(&states).unwrap();
            let targets_m = DenseMatrix::from_rows(&targets).unwrap();
            let got = ridge_solve(&states_m, &targets_m, beta).unwrap();
            let want = testutil::ridge_oracle(&states, &targets, beta);
            for (g, w) in got.row(0).iter().zip(&want[0]) {
                let rel = (g - w).abs() / w.abs().max(1e-12);
                assert!(rel < 1e-8, "got {g}, want {w}");
            }
        }
    }

    #[test]
    fn singular_gram_without_regularization_fails() {
        // Rank-1 states with two rows: Gram is singular at beta = 0.
        let states = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let targets = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            ridge_solve(&states, &targets, 0.0),
            Err(Error::SingularSystem)
        ));
        // The same system is fine once regularized.
        assert!(ridge_solve(&states, &targets, 1e-6).is_ok());
    }

    #[test]
    fn solution_is_local_minimum_of_objective() {
        let mut rng = testutil::rng(17);
        let (_, states) = testutil::random_sparse_with_dense(&mut rng, 5, 30, 1.0);
        let (_, targets) = testutil::random_sparse_with_dense(&mut rng, 2, 30, 1.0);
        for beta in [1e-6, 0.1, 1.0] {
            let w = ridge_solve(
                &DenseMatrix::from_rows(&states).unwrap(),
                &DenseMatrix::from_rows(&targets).unwrap(),
                beta,
            )
            .unwrap();
            let w_rows = to_dense_rows(&w);
            let base = testutil::ridge_objective(&states, &targets, &w_rows, beta);
            for i in 0..w.rows() {
                for j in 0..w.cols() {
                    for delta in [1e-4, -1e-4] {
                        let mut perturbed = w_rows.clone();
                        perturbed[i][j] += delta;
                        let obj = testutil::ridge_objective(&states, &targets, &perturbed, beta);
                        assert!(
                            obj >= base - 1e-12,
                            "perturbing ({i},{j}) by {delta} lowered the objective"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let states = DenseMatrix::zeros(3, 10);
        let targets = DenseMatrix::zeros(1, 9);
        assert!(matches!(
            ridge_solve(&states, &targets, 1.0),
            Err(Error::Dimension(_))
        ));
    }
}
