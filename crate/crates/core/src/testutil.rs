//! Brute-force reference implementations used only by the test suites.
//!
//! Everything here is deliberately naive (dense loops, explicit inverses,
//! characteristic polynomials) so it stays independent of the optimized
//! code paths it checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{SparseMatrix, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

/// Draw a random sparse matrix and its dense mirror.
pub fn random_sparse_with_dense(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    density: f64,
) -> (SparseMatrix, Vec<Vec<f64>>) {
    let mut dense = vec![vec![0.0; cols]; rows];
    let mut triplets = Vec::new();
    for (i, row) in dense.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if rng.random::<f64>() < density {
                let v = rng.random_range(-1.0..1.0);
                *cell = v;
                triplets.push((i, j, v));
            }
        }
    }
    (
        SparseMatrix::from_triplets(rows, cols, &triplets).unwrap(),
        dense,
    )
}

pub fn dense_matvec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for l in 0..k {
            let ail = a[i][l];
            for j in 0..m {
                out[i][j] += ail * b[l][j];
            }
        }
    }
    out
}

pub fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m) = (a.len(), a[0].len());
    let mut out = vec![vec![0.0; n]; m];
    for i in 0..n {
        for j in 0..m {
            out[j][i] = a[i][j];
        }
    }
    out
}

/// Gauss-Jordan inverse with partial pivoting. Panics on singular input;
/// fine for an oracle.
pub fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        assert!(aug[pivot][col].abs() > 1e-14, "oracle: singular matrix");
        aug.swap(col, pivot);
        let p = aug[col][col];
        for v in &mut aug[col] {
            *v /= p;
        }
        for row in 0..n {
            if row != col {
                let f = aug[row][col];
                if f != 0.0 {
                    for j in 0..2 * n {
                        aug[row][j] -= f * aug[col][j];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// Normal-equation ridge oracle: `Y R^T (R R^T + beta I)^{-1}` with the
/// inverse taken explicitly.
pub fn ridge_oracle(states: &[Vec<f64>], targets: &[Vec<f64>], beta: f64) -> Vec<Vec<f64>> {
    let rt = transpose(states);
    let mut gram = matmul(states, &rt);
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] += beta;
    }
    matmul(&matmul(targets, &rt), &invert(&gram))
}

/// The Tikhonov objective `||Y - W R||_F^2 + beta ||W||_F^2`.
pub fn ridge_objective(
    states: &[Vec<f64>],
    targets: &[Vec<f64>],
    w: &[Vec<f64>],
    beta: f64,
) -> f64 {
    let fit = matmul(w, states);
    let mut obj = 0.0;
    for (frow, trow) in fit.iter().zip(targets) {
        for (f, t) in frow.iter().zip(trow) {
            obj += (t - f) * (t - f);
        }
    }
    for row in w {
        for v in row {
            obj += beta * v * v;
        }
    }
    obj
}

// ---------------------------------------------------------------------------
// Dense eigenvalue oracle: characteristic polynomial by Faddeev-LeVerrier,
// all roots by Durand-Kerner, spectral radius = max |root|.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Cpx {
    re: f64,
    im: f64,
}

impl Cpx {
    fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    fn add(self, o: Cpx) -> Cpx {
        Cpx::new(self.re + o.re, self.im + o.im)
    }

    fn sub(self, o: Cpx) -> Cpx {
        Cpx::new(self.re - o.re, self.im - o.im)
    }

    fn mul(self, o: Cpx) -> Cpx {
        Cpx::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    fn div(self, o: Cpx) -> Cpx {
        let d = o.re * o.re + o.im * o.im;
        Cpx::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
}

/// Monic characteristic polynomial coefficients `[c0, c1, ..., c_{n-1}]` of
/// `lambda^n + c_{n-1} lambda^{n-1} + ... + c0`.
fn char_poly(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut coeffs = vec![0.0; n];
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for k in 1..=n {
        let am = matmul(a, &m);
        let trace: f64 = (0..n).map(|i| am[i][i]).sum();
        let c = -trace / k as f64;
        coeffs[n - k] = c;
        if k < n {
            m = am;
            for i in 0..n {
                m[i][i] += c;
            }
        }
    }
    coeffs
}

fn poly_eval(coeffs: &[f64], z: Cpx) -> Cpx {
    // Horner over the monic polynomial.
    let mut acc = Cpx::new(1.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc.mul(z).add(Cpx::new(c, 0.0));
    }
    acc
}

/// All roots of the monic polynomial via Durand-Kerner.
fn poly_roots(coeffs: &[f64]) -> Vec<Cpx> {
    let n = coeffs.len();
    let radius = 1.0 + coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let seed = Cpx::new(0.4, 0.9);
    let mut roots: Vec<Cpx> = Vec::with_capacity(n);
    let mut z = Cpx::new(radius, 0.0);
    for _ in 0..n {
        z = z.mul(seed);
        roots.push(z);
    }
    for _ in 0..1000 {
        let mut max_move = 0.0_f64;
        for i in 0..n {
            let mut denom = Cpx::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom = denom.mul(roots[i].sub(roots[j]));
                }
            }
            let delta = poly_eval(coeffs, roots[i]).div(denom);
            roots[i] = roots[i].sub(delta);
            max_move = max_move.max(delta.abs());
        }
        if max_move < 1e-13 * radius.max(1.0) {
            break;
        }
    }
    roots
}

/// Spectral radius of a dense matrix via the characteristic polynomial.
pub fn spectral_radius_oracle(a: &[Vec<f64>]) -> f64 {
    poly_roots(&char_poly(a))
        .into_iter()
        .fold(0.0, |m, r| m.max(r.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_handles_known_spectra() {
        // Companion-style matrix with eigenvalues 3, -2, 1.
        let a = vec![
            vec![3.0, 0.0, 0.0],
            vec![1.0, -2.0, 0.0],
            vec![0.0, 1.0, 1.0],
        ];
        assert!((spectral_radius_oracle(&a) - 3.0).abs() < 1e-10);

        // Rotation by 90 degrees scaled by 2: eigenvalues +-2i.
        let r = vec![vec![0.0, -2.0], vec![2.0, 0.0]];
        assert!((spectral_radius_oracle(&r) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn invert_recovers_identity() {
        let a = vec![vec![4.0, 1.0], vec![2.0, 3.0]];
        let inv = invert(&a);
        let prod = matmul(&a, &inv);
        for (i, row) in prod.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12);
            }
        }
    }
}
