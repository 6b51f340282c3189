//! The (N+1)-site Fock-space chain for N bosons in a double well:
//! construction of the couplings and detunings, exact spectral evolution of
//! amplitude vectors, and the derived observables.
//!
//! Conventions: index `l` counts the Fock basis states `l = 0..N`; the
//! launch state `c_l(0) = delta_{l,0}` has population imbalance `P = +1`
//! and transfers fully to `P = -1` at half the revival period when `U = 0`.
//! The amplitude equation is `i dc/dz = H c` with `H` real symmetric
//! tridiagonal, so `c(z) = exp(-i H (z - z0)) c(z0)` evaluated through the
//! spectral decomposition of `H` — exact for the z-independent chain and
//! structurally norm-conserving.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::SymTridiagonal;

/// Norm tolerance for state validation.
pub const NORM_TOL: f64 = 1e-10;

/// Bose-Hubbard model parameters. Rates are per millimetre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Particle count N >= 1.
    pub particles: usize,
    /// Hopping rate J > 0, 1/mm.
    pub hopping: f64,
    /// On-site interaction U (signed; positive = repulsive), 1/mm.
    pub interaction: f64,
}

impl ModelParams {
    pub fn new(particles: usize, hopping: f64, interaction: f64) -> Result<Self> {
        if particles == 0 {
            return Err(Error::InvalidParameter(
                "particle count must be >= 1 (N = 0 is a degenerate single-site lattice)".into(),
            ));
        }
        if !(hopping > 0.0) || !hopping.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "hopping must be positive and finite, got {hopping}"
            )));
        }
        if !interaction.is_finite() {
            return Err(Error::InvalidParameter("interaction must be finite".into()));
        }
        Ok(Self { particles, hopping, interaction })
    }

    /// Number of Fock lattice sites, N + 1.
    pub fn sites(&self) -> usize {
        self.particles + 1
    }
}

/// Engineered couplings and detunings of the Fock chain, 1/mm.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCoefficients {
    /// kappa_l = J sqrt((l+1)(N-l)), l = 0..N-1.
    pub kappa: Vec<f64>,
    /// V_l = (U/2) (l^2 + (N-l)^2 - N), l = 0..N.
    pub detuning: Vec<f64>,
}

impl LatticeCoefficients {
    /// Lattice size N + 1.
    pub fn sites(&self) -> usize {
        self.detuning.len()
    }

    pub fn particles(&self) -> usize {
        self.kappa.len()
    }
}

/// Couplings and detunings from the model parameters.
pub fn build_coefficients(params: &ModelParams) -> LatticeCoefficients {
    let n = params.particles;
    let kappa = (0..n)
        .map(|l| params.hopping * (((l + 1) * (n - l)) as f64).sqrt())
        .collect();
    let detuning = (0..=n)
        .map(|l| {
            let l2 = (l * l) as f64;
            let r2 = ((n - l) * (n - l)) as f64;
            0.5 * params.interaction * (l2 + r2 - n as f64)
        })
        .collect();
    LatticeCoefficients { kappa, detuning }
}

/// The chain Hamiltonian as a real symmetric tridiagonal matrix: diagonal
/// V_l, off-diagonal -kappa_l; evolution is `i dc/dz = H c`.
pub fn build_hamiltonian(coeffs: &LatticeCoefficients) -> SymTridiagonal {
    SymTridiagonal::new(
        coeffs.detuning.clone(),
        coeffs.kappa.iter().map(|k| -k).collect(),
    )
}

/// Ascending eigenvalues of the chain Hamiltonian, 1/mm.
pub fn spectrum(coeffs: &LatticeCoefficients) -> Vec<f64> {
    build_hamiltonian(coeffs).eigenvalues()
}

/// Fock amplitude vector at evolution coordinate `z` (mm).
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: Vec<Complex64>,
    z: f64,
}

impl FockState {
    /// Validates the normalization `sum |c_l|^2 = 1` within `NORM_TOL`.
    pub fn new(amplitudes: Vec<Complex64>, z: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("empty amplitude vector".into()));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm, tol: NORM_TOL });
        }
        Ok(Self { amplitudes, z })
    }

    /// The one-hot state `c_m = delta_{m,site}` at z = 0.
    pub fn delta(particles: usize, site: usize) -> Result<Self> {
        if site > particles {
            return Err(Error::InvalidSite { site, sites: particles + 1 });
        }
        let mut amplitudes = vec![Complex64::ZERO; particles + 1];
        amplitudes[site] = Complex64::ONE;
        Self::new(amplitudes, 0.0)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn particles(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// |c_l|^2 for each site; sums to 1 for a valid state.
    pub fn occupation_probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Normalized population imbalance `P = sum_l ((N - 2l)/N) |c_l|^2`,
    /// fixed so that the delta_{l,0} launch gives P = +1.
    pub fn population_imbalance(&self) -> f64 {
        let n = self.particles() as f64;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(l, c)| (n - 2.0 * l as f64) / n * c.norm_sqr())
            .sum()
    }
}

/// z-sampled evolution record.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub z_grid: Vec<f64>,
    pub states: Vec<FockState>,
    pub imbalance: Vec<f64>,
}

/// Exact propagator built from the spectral decomposition of the chain
/// Hamiltonian. Reusable across states and evolution distances.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    eigenvalues: Vec<f64>,
    /// eigenvectors[k][l]: component l of eigenvector k.
    eigenvectors: Vec<Vec<f64>>,
}

impl SpectralPropagator {
    pub fn new(coeffs: &LatticeCoefficients) -> Self {
        let (eigenvalues, eigenvectors) = build_hamiltonian(coeffs).eigh();
        Self { eigenvalues, eigenvectors }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    /// c(z0 + dz) = Q exp(-i Lambda dz) Q^T c(z0).
    pub fn advance(&self, state: &FockState, dz: f64) -> FockState {
        let n = self.eigenvalues.len();
        assert_eq!(n, state.amplitudes.len(), "state size mismatch");
        let mut modal = vec![Complex64::ZERO; n];
        for (k, vec_k) in self.eigenvectors.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for (l, c) in state.amplitudes.iter().enumerate() {
                acc += vec_k[l] * c;
            }
            modal[k] = acc * Complex64::from_polar(1.0, -self.eigenvalues[k] * dz);
        }
        let mut amplitudes = vec![Complex64::ZERO; n];
        for (k, vec_k) in self.eigenvectors.iter().enumerate() {
            for (l, a) in amplitudes.iter_mut().enumerate() {
                *a += vec_k[l] * modal[k];
            }
        }
        FockState { amplitudes, z: state.z + dz }
    }
}

/// Evolve `state` over `z_grid` (mm). The grid must be strictly increasing
/// and start at the state's position.
pub fn evolve(
    state: &FockState,
    coeffs: &LatticeCoefficients,
    z_grid: &[f64],
) -> Result<EvolutionTrace> {
    if coeffs.sites() != state.amplitudes.len() {
        return Err(Error::InvalidParameter(format!(
            "state has {} sites but coefficients describe {}",
            state.amplitudes.len(),
            coeffs.sites()
        )));
    }
    if z_grid.is_empty() || (z_grid[0] - state.z).abs() > 1e-9 {
        return Err(Error::BadZGrid);
    }
    if z_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadZGrid);
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm, tol: NORM_TOL });
    }

    let propagator = SpectralPropagator::new(coeffs);
    let mut states = Vec::with_capacity(z_grid.len());
    let mut imbalance = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let s = propagator.advance(state, z - state.z);
        imbalance.push(s.population_imbalance());
        states.push(s);
    }
    Ok(EvolutionTrace { z_grid: z_grid.to_vec(), states, imbalance })
}
