//! Recovery of Fock-chain observables from the optical field: modal-power
//! projection onto the per-channel guided modes and the centroid-based
//! imbalance estimate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::jacobi_eigh;
use crate::optics::{mode_on_grid, ArrayLayout};

use super::{Field, Grid};

/// Per-channel guided modes on the propagation grid, plus their symmetric
/// (Loewdin) orthonormalization. Neighboring channel modes overlap
/// slightly; projecting on the orthonormalized set keeps the channel powers
/// additive (sum bounded by total power), while the raw overlaps remain
/// available as a diagnostic.
pub struct ModalBasis {
    raw: Vec<Vec<f64>>,
    ortho: Vec<Vec<f64>>,
    dx: f64,
}

impl ModalBasis {
    pub fn new(layout: &ArrayLayout, grid: &Grid) -> Result<Self> {
        let xs = grid.xs();
        let dx = grid.dx();
        let raw: Vec<Vec<f64>> = layout
            .positions
            .iter()
            .zip(&layout.contrasts)
            .map(|(&x_l, &dn)| {
                let contrast: Vec<f64> =
                    xs.iter().map(|&x| dn * layout.channel.g(x - x_l)).collect();
                mode_on_grid(&layout.material, &contrast, dx).map(|(_, u)| u)
            })
            .collect::<Result<_>>()?;

        // Overlap matrix S and S^{-1/2} through its eigendecomposition.
        let m = raw.len();
        let mut overlap = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let s: f64 = raw[i].iter().zip(&raw[j]).map(|(a, b)| a * b).sum::<f64>() * dx;
                overlap[i][j] = s;
                overlap[j][i] = s;
            }
        }
        let (values, vectors) = jacobi_eigh(&overlap);
        if values.iter().any(|&v| v <= 0.0) {
            return Err(Error::DesignFailure(
                "mode overlap matrix is not positive definite".into(),
            ));
        }
        // ortho_l = sum_j (S^{-1/2})_{l j} raw_j.
        let n_samples = raw[0].len();
        let mut ortho = vec![vec![0.0; n_samples]; m];
        for l in 0..m {
            for j in 0..m {
                let mut w = 0.0;
                for (k, &lam) in values.iter().enumerate() {
                    w += vectors[k][l] * vectors[k][j] / lam.sqrt();
                }
                if w == 0.0 {
                    continue;
                }
                for (o, r) in ortho[l].iter_mut().zip(&raw[j]) {
                    *o += w * r;
                }
            }
        }
        Ok(Self { raw, ortho, dx })
    }

    pub fn sites(&self) -> usize {
        self.raw.len()
    }

    /// Channel powers `p_l = |<u~_l | phi>|^2` in the orthonormalized basis.
    pub fn project(&self, field: &Field) -> Vec<f64> {
        Self::project_on(&self.ortho, field, self.dx)
    }

    /// Raw-overlap powers (diagnostic; slightly over-counts shared power).
    pub fn project_raw(&self, field: &Field) -> Vec<f64> {
        Self::project_on(&self.raw, field, self.dx)
    }

    fn project_on(modes: &[Vec<f64>], field: &Field, dx: f64) -> Vec<f64> {
        modes
            .iter()
            .map(|u| {
                let mut acc = Complex64::ZERO;
                for (m, s) in u.iter().zip(&field.samples) {
                    acc += m * s;
                }
                (acc * dx).norm_sqr()
            })
            .collect()
    }
}

/// Imbalance of a guided-power distribution,
/// `P = sum_l ((N - 2l)/N) p_l / sum_l p_l`.
pub fn modal_imbalance(powers: &[f64]) -> f64 {
    let n = (powers.len() - 1) as f64;
    let total: f64 = powers.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    powers
        .iter()
        .enumerate()
        .map(|(l, p)| (n - 2.0 * l as f64) / n * p)
        .sum::<f64>()
        / total
}

/// Centroid estimate of the population imbalance,
/// `P = 1 - 2 <x - x_0> / (N d_ref)`, with `<x>` measured relative to the
/// launch-edge channel so that edge excitation starts at P = +1.
pub fn centroid_imbalance(field: &Field, grid: &Grid, layout: &ArrayLayout) -> Result<f64> {
    let n = (layout.sites() - 1) as f64;
    let x0 = layout.positions[0];
    let centroid = field.centroid(grid)?;
    Ok(1.0 - 2.0 * (centroid - x0) / (n * layout.reference_spacing))
}
