//! Brute-force ground state of a short harmonic chain in a truncated Fock basis.
//!
//! Each site is expanded in the number basis of a local oscillator with
//! frequency `sqrt(K_ii)`; the nearest-neighbour couplings then create and
//! destroy pairs of quanta. Truncating the total occupation gives a finite
//! sparse Hamiltonian whose lowest eigenvector is found by Lanczos iteration.
//! Entropies of this state are an independent check on the Gaussian formulas,
//! which never touch a Fock space.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::fock::{Complex64, FockBasis, FockState};
use crate::lattice::LatticeModel;

/// Residual `|H v - E v|` at which the Lanczos iteration stops.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const KRYLOV_DIM: usize = 120;
const MAX_RESTARTS: usize = 50;
const DENSE_LIMIT: usize = 400;

#[derive(Debug, Clone)]
pub struct ChainGroundState {
    pub state: FockState,
    /// Ground-state energy of the truncated Hamiltonian in units of `1/a`.
    pub energy: f64,
    pub residual: f64,
}

/// Sparse symmetric matrix in row-list form.
struct Sparse {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Sparse {
    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|row| row.iter().map(|&(j, h)| h * v[j]).sum()),
        )
    }
}

fn hamiltonian(basis: &FockBasis, k: &DMatrix<f64>) -> Sparse {
    let n = k.nrows();
    let omegas: Vec<f64> = (0..n).map(|i| k[(i, i)].sqrt()).collect();
    let mut rows = Vec::with_capacity(basis.dimension());
    let mut target = vec![0u32; n];
    for s in 0..basis.dimension() {
        let occ = basis.occupation(s);
        let diagonal: f64 = (0..n).map(|i| omegas[i] * (f64::from(occ[i]) + 0.5)).sum();
        let mut row = vec![(s, diagonal)];
        for i in 0..n {
            for j in i + 1..n {
                if k[(i, j)] == 0.0 {
                    continue;
                }
                // K_ij q_i q_j with q = (b + b^dagger) / sqrt(2 omega).
                let scale = k[(i, j)] / (2.0 * (omegas[i] * omegas[j]).sqrt());
                for (di, dj) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                    let ni = i64::from(occ[i]) + di;
                    let nj = i64::from(occ[j]) + dj;
                    if ni < 0 || nj < 0 {
                        continue;
                    }
                    target.copy_from_slice(occ);
                    target[i] = ni as u32;
                    target[j] = nj as u32;
                    let Some(t) = basis.index_of(&target) else {
                        continue;
                    };
                    let fi = f64::from(occ[i].max(target[i])).sqrt();
                    let fj = f64::from(occ[j].max(target[j])).sqrt();
                    row.push((t, scale * fi * fj));
                }
            }
        }
        rows.push(row);
    }
    Sparse { rows }
}

fn lowest_dense(h: &Sparse) -> (f64, DVector<f64>) {
    let dim = h.rows.len();
    let mut dense = DMatrix::zeros(dim, dim);
    for (i, row) in h.rows.iter().enumerate() {
        for &(j, v) in row {
            dense[(i, j)] += v;
        }
    }
    let eig = dense.symmetric_eigen();
    let (idx, e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a: &(usize, &f64), b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    (*e, eig.eigenvectors.column(idx).into_owned())
}

/// Restarted Lanczos with full reorthogonalization.
fn lowest_lanczos(h: &Sparse, start: DVector<f64>) -> Result<(f64, DVector<f64>, f64)> {
    let mut v = start.normalize();
    let mut best = (f64::INFINITY, v.clone(), f64::INFINITY);
    for _ in 0..MAX_RESTARTS {
        let mut basis: Vec<DVector<f64>> = vec![v.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for step in 0..KRYLOV_DIM {
            let mut w = h.apply(&basis[step]);
            alpha.push(basis[step].dot(&w));
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&w);
                    w.axpy(-c, q, 1.0);
                }
            }
            let b = w.norm();
            if b < 1e-14 || step + 1 == KRYLOV_DIM {
                break;
            }
            beta.push(b);
            basis.push(w / b);
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (idx, &energy) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a: &(usize, &f64), b| a.1.total_cmp(b.1))
            .expect("nonempty Krylov space");
        let y = eig.eigenvectors.column(idx);
        let mut ritz = DVector::zeros(v.len());
        for (coef, q) in y.iter().zip(&basis) {
            ritz.axpy(*coef, q, 1.0);
        }
        let ritz = ritz.normalize();
        let residual = (h.apply(&ritz) - &ritz * energy).norm();
        best = (energy, ritz.clone(), residual);
        if residual < RESIDUAL_TOLERANCE {
            return Ok(best);
        }
        v = ritz;
    }
    Err(Error::QuadratureNotConverged {
        estimate: best.2,
        tolerance: RESIDUAL_TOLERANCE,
    })
}

/// Ground state of the lattice chain with at most `max_total` local quanta.
///
/// Intended for a handful of sites: the basis dimension is `C(N + n_max, N)`.
pub fn chain_ground_state(model: &LatticeModel, max_total: usize) -> Result<ChainGroundState> {
    let k = model.coupling_matrix()?;
    if (0..k.nrows()).any(|i| k[(i, i)] <= 0.0) {
        return Err(invalid("mass", "local oscillator frequency must be positive"));
    }
    let basis = Arc::new(FockBasis::new(model.num_sites(), max_total, false)?);
    let h = hamiltonian(&basis, &k);
    let (energy, vector, residual) = if basis.dimension() <= DENSE_LIMIT {
        let (e, v) = lowest_dense(&h);
        let r = (h.apply(&v) - &v * e).norm();
        (e, v, r)
    } else {
        // Start from the local vacuum; the coupling preserves occupation parity,
        // and the ground state lives in the even sector.
        let mut start = DVector::zeros(basis.dimension());
        start[0] = 1.0;
        lowest_lanczos(&h, start)?
    };
    let sign = if vector[0] < 0.0 { -1.0 } else { 1.0 };
    let amplitudes = vector.map(|x| Complex64::new(sign * x, 0.0));
    Ok(ChainGroundState {
        state: FockState::normalized(basis, amplitudes)?,
        energy,
        residual,
    })
}
