//! Smallest eigenpairs of the symmetric pencil `K v = λ M v` by shift-invert
//! block Lanczos with full reorthogonalization in the `M` inner product.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BasePoint, Immersion};
use crate::meshing::{assemble, ball_mesh, FemPair};
use crate::sparse::{CsrMatrix, EnvelopeCholesky};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Relative residual `‖Kv − λMv‖ / (‖Kv‖ + |λ|‖Mv‖)` required of every pair.
    pub tol: f64,
    /// Maximum number of block steps.
    pub max_iters: usize,
    /// Shift `σ`; the factorized operator is `K − σM`.
    pub shift: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 500,
            shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    /// `M`-orthonormal eigenvectors.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Relative residual per pair.
    pub residuals: Vec<f64>,
    /// Block Lanczos steps taken.
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Deterministic start and replacement vectors.
fn seed_vector(j: usize, n: usize) -> Vec<f64> {
    if j == 0 {
        return vec![1.0; n];
    }
    const PHI: f64 = 0.618_033_988_749_894_9;
    (0..n)
        .map(|i| (j as f64 * (i + 1) as f64 * PHI).cos())
        .collect()
}

struct Basis<'a> {
    m: &'a CsrMatrix,
    q: Vec<Vec<f64>>,
    mq: Vec<Vec<f64>>,
    next_seed: usize,
}

impl Basis<'_> {
    fn project_out(&self, v: &mut [f64]) {
        for _ in 0..2 {
            for (q, mq) in self.q.iter().zip(&self.mq) {
                let c = dot(mq, v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
    }

    /// `M`-normalizes `v` against the basis and appends it. Dependent
    /// directions are replaced by fresh seed vectors.
    fn push(&mut self, mut v: Vec<f64>) -> Result<()> {
        let n = v.len();
        if self.q.len() >= n {
            return Ok(());
        }
        for _attempt in 0..n + 8 {
            let before = norm(&v);
            self.project_out(&mut v);
            let mv = self.m.mul_vec(&v);
            let nrm2 = dot(&v, &mv);
            if before > 0.0 && nrm2 < 0.0 {
                return Err(Error::SingularMass);
            }
            let after = norm(&v);
            if before > 0.0 && after > 1e-10 * before && nrm2 > 0.0 {
                let s = 1.0 / nrm2.sqrt();
                self.q.push(v.iter().map(|x| x * s).collect());
                self.mq.push(mv.iter().map(|x| x * s).collect());
                return Ok(());
            }
            v = seed_vector(self.next_seed, n);
            self.next_seed += 1;
        }
        Err(Error::SingularMass)
    }
}

/// `k` smallest eigenpairs of `K v = λ M v` for symmetric `K`, SPD `M`, and
/// `K − σM` positive definite.
pub fn pencil_eigenpairs(
    k_mat: &CsrMatrix,
    m_mat: &CsrMatrix,
    k: usize,
    opts: &EigenOptions,
) -> Result<EigenResult> {
    let n = k_mat.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidSpec(format!(
            "requested {k} eigenpairs of a {n}-dimensional pencil"
        )));
    }
    let shifted = if opts.shift == 0.0 {
        k_mat.clone()
    } else {
        k_mat.add_scaled(-opts.shift, m_mat)
    };
    let chol = EnvelopeCholesky::factor(&shifted)?;
    let block = n.min(k.max(2));

    let mut basis = Basis {
        m: m_mat,
        q: Vec::new(),
        mq: Vec::new(),
        next_seed: block,
    };
    for j in 0..block {
        basis.push(seed_vector(j, n))?;
    }

    let mut h = DMatrix::<f64>::zeros(0, 0);
    let mut processed = 0usize;
    let mut best: Option<EigenResult> = None;

    for iter in 1..=opts.max_iters {
        let end = basis.q.len();
        let ws: Vec<Vec<f64>> = (processed..end).map(|j| chol.solve(&basis.mq[j])).collect();
        let mut grown = DMatrix::zeros(end, end);
        grown.view_mut((0, 0), (processed, processed)).copy_from(&h);
        for (c, w) in ws.iter().enumerate() {
            let j = processed + c;
            for i in 0..end {
                let v = dot(&basis.mq[i], w);
                grown[(i, j)] = v;
                grown[(j, i)] = v;
            }
        }
        h = grown;
        processed = end;

        if processed >= k {
            let result = ritz_pairs(&h, &basis.q, k_mat, m_mat, k, iter)?;
            let converged = result.residuals.iter().all(|r| *r <= opts.tol);
            let exhausted = processed >= n;
            best = Some(result);
            if converged || exhausted {
                return Ok(best.unwrap());
            }
        }

        for w in ws {
            basis.push(w)?;
        }
        if basis.q.len() == processed {
            // No new directions: the basis spans an invariant subspace.
            if let Some(b) = best {
                return Ok(b);
            }
            return Err(Error::NoConvergence {
                max_iters: opts.max_iters,
            });
        }
    }
    Err(Error::NoConvergence {
        max_iters: opts.max_iters,
    })
}

fn ritz_pairs(
    h: &DMatrix<f64>,
    q: &[Vec<f64>],
    k_mat: &CsrMatrix,
    m_mat: &CsrMatrix,
    k: usize,
    iterations: usize,
) -> Result<EigenResult> {
    let p = h.nrows();
    let n = k_mat.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut pairs: Vec<(f64, Vec<f64>, f64)> = Vec::with_capacity(k);
    for &c in idx.iter().take(k) {
        let y = eig.eigenvectors.column(c);
        let mut x = vec![0.0; n];
        for (i, qi) in q.iter().take(p).enumerate() {
            let yi = y[i];
            x.iter_mut().zip(qi).for_each(|(a, b)| *a += yi * b);
        }
        let kx = k_mat.mul_vec(&x);
        let mx = m_mat.mul_vec(&x);
        let xmx = dot(&x, &mx);
        if !(xmx > 0.0) {
            return Err(Error::SingularMass);
        }
        let s = 1.0 / xmx.sqrt();
        x.iter_mut().for_each(|v| *v *= s);
        let lambda = dot(&x, &kx) * s;
        let r: Vec<f64> = kx
            .iter()
            .zip(&mx)
            .map(|(a, b)| (a - lambda * b) * s)
            .collect();
        let denom = norm(&kx) * s + lambda.abs() * norm(&mx) * s;
        let res = if denom > 0.0 {
            norm(&r) / denom
        } else {
            norm(&r)
        };
        pairs.push((lambda, x, res));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(EigenResult {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        residuals: pairs.iter().map(|p| p.2).collect(),
        eigenvectors: pairs.into_iter().map(|p| p.1).collect(),
        iterations,
    })
}

/// `k` smallest Dirichlet eigenpairs of a finite-element pair. Eigenvectors are
/// indexed by interior vertices (see [`FemPair::interior`]).
pub fn smallest_eigenpairs(pair: &FemPair, k: usize, tol: f64) -> Result<EigenResult> {
    let opts = EigenOptions {
        tol,
        ..EigenOptions::default()
    };
    let (kr, mr) = pair.reduced();
    pencil_eigenpairs(&kr, &mr, k, &opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lambda1Point {
    pub r: f64,
    pub lambda1: f64,
    pub lambda1_r2: f64,
    pub vertices: usize,
    pub max_edge: f64,
    pub residual: f64,
}

/// First Dirichlet eigenvalue of extrinsic balls `{r̃ ≤ r}` for each radius.
pub fn lambda1_curve(
    imm: &Immersion,
    base: &BasePoint,
    radii: &[f64],
    resolution: usize,
) -> Result<Vec<Lambda1Point>> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec(
            "radii must be strictly ascending".into(),
        ));
    }
    radii
        .iter()
        .map(|&r| {
            let mesh = ball_mesh(imm, base, r, resolution)?;
            let pair = assemble(&mesh)?;
            let res = smallest_eigenpairs(&pair, 1, EigenOptions::default().tol)?;
            Ok(Lambda1Point {
                r,
                lambda1: res.eigenvalues[0],
                lambda1_r2: res.eigenvalues[0] * r * r,
                vertices: mesh.vertex_count(),
                max_edge: mesh.max_edge_length(),
                residual: res.residuals[0],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_pencil() {
        let k = CsrMatrix::from_triplets(1, 1, &[(0, 0, 2.0)]);
        let m = CsrMatrix::identity(1);
        let r = pencil_eigenpairs(&k, &m, 1, &EigenOptions::default()).unwrap();
        assert!((r.eigenvalues[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_pencil_orders_ascending() {
        let n = 40;
        let kt: Vec<_> = (0..n).map(|i| (i, i, 1.0 + ((i * 7) % n) as f64)).collect();
        let mt: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        let r = pencil_eigenpairs(
            &CsrMatrix::from_triplets(n, n, &kt),
            &CsrMatrix::from_triplets(n, n, &mt),
            4,
            &EigenOptions::default(),
        )
        .unwrap();
        assert_eq!(r.eigenvalues.len(), 4);
        for (i, l) in r.eigenvalues.iter().enumerate() {
            assert!((l - (i + 1) as f64).abs() < 1e-10, "{l}");
        }
    }
}
