//! Physical realization of the Fock chain as a waveguide array: erf-channel
//! index profiles, transverse mode solves, coupling characterization, and
//! the inverse design of spacings and index contrasts.
//!
//! Transverse geometry is in micrometres; propagation-constant shifts and
//! couplings are reported in 1/mm to match the tight-binding layer. The
//! physical index is raised inside a channel, `n(x) = n_s + sum_l dn_l
//! g(x - x_l)`, so the wave-equation potential `[n_s - n(x)]` is attractive;
//! a positive chain detuning `V_l` is realized by lowering the propagation
//! constant relative to the reference channel, `V_l = -(beta_l - beta_ref)`.

mod design;
mod modes;

pub use design::{
    assemble_array, characterize_coupling, design_contrasts, design_spacings, fit_coupling_law,
    ArrayDesigner, DesignParams,
};
pub use modes::{
    coupling_vs_distance, mode_on_grid, neighbor_beta_shift, pair_supermode_betas,
    solve_single_mode, uniform_grid, BoundMode, MODE_DOMAIN_MARGIN, MODE_SOLVER_DX,
};

use crate::error::{Error, Result};

/// Host material and operating wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialContext {
    /// Vacuum wavelength, um.
    pub wavelength: f64,
    /// Substrate refractive index (> 1).
    pub substrate_index: f64,
}

impl MaterialContext {
    pub fn new(wavelength: f64, substrate_index: f64) -> Result<Self> {
        if !(wavelength > 0.0) || !(substrate_index > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "material needs wavelength > 0 and substrate index > 1, got {wavelength}, {substrate_index}"
            )));
        }
        Ok(Self { wavelength, substrate_index })
    }

    /// Reduced wavelength lambda / 2 pi, um.
    pub fn reduced_wavelength(&self) -> f64 {
        self.wavelength / (2.0 * std::f64::consts::PI)
    }

    /// Kinetic prefactor of the Schroedinger-form wave operator,
    /// `lambdabar / (2 n_s)`, um.
    pub fn kinetic_factor(&self) -> f64 {
        self.reduced_wavelength() / (2.0 * self.substrate_index)
    }
}

/// Normalized erf channel profile
/// `g(x) = (erf[(x+w)/D_x] - erf[(x-w)/D_x]) / (2 erf(w/D_x))`,
/// even, with g(0) -> 1 for D_x << w and vanishing far from the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelProfile {
    /// Channel half-width w, um.
    pub half_width: f64,
    /// Diffusion length D_x, um.
    pub diffusion_length: f64,
}

impl ChannelProfile {
    pub fn new(half_width: f64, diffusion_length: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(diffusion_length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "channel needs w > 0 and D_x > 0, got {half_width}, {diffusion_length}"
            )));
        }
        Ok(Self { half_width, diffusion_length })
    }

    /// Evaluate the normalized profile at `x` um from the channel center.
    pub fn g(&self, x: f64) -> f64 {
        let w = self.half_width;
        let d = self.diffusion_length;
        (libm::erf((x + w) / d) - libm::erf((x - w) / d)) / (2.0 * libm::erf(w / d))
    }
}

/// Exponential coupling law `kappa(d) = kappa0 exp(-gamma (d - d_ref))`
/// fitted around the reference spacing at the reference contrast.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingFit {
    /// Coupling at the reference spacing, 1/mm.
    pub kappa0: f64,
    /// Decay rate, 1/um.
    pub gamma: f64,
    /// Reference spacing, um.
    pub d_ref: f64,
    /// Reference contrast the samples were computed at.
    pub dn_ref: f64,
    /// RMS relative residual of the fit over its samples.
    pub rms_residual: f64,
}

impl CouplingFit {
    /// kappa(d) from the fitted law, 1/mm.
    pub fn kappa_at(&self, d: f64) -> f64 {
        self.kappa0 * (-self.gamma * (d - self.d_ref)).exp()
    }

    /// Invert the law for the spacing that realizes `kappa`, um.
    pub fn distance_for(&self, kappa: f64) -> f64 {
        self.d_ref - (kappa / self.kappa0).ln() / self.gamma
    }
}

/// Fabrication-ready description of the designed array.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayLayout {
    /// Channel center positions, um, ascending and centered on 0.
    pub positions: Vec<f64>,
    /// Per-channel index contrasts dn_l.
    pub contrasts: Vec<f64>,
    /// Reference spacing d_ref used by the centroid imbalance estimate, um.
    pub reference_spacing: f64,
    pub channel: ChannelProfile,
    pub material: MaterialContext,
}

impl ArrayLayout {
    pub fn new(
        positions: Vec<f64>,
        contrasts: Vec<f64>,
        reference_spacing: f64,
        channel: ChannelProfile,
        material: MaterialContext,
    ) -> Result<Self> {
        if positions.is_empty() || positions.len() != contrasts.len() {
            return Err(Error::InvalidParameter(
                "positions and contrasts must be non-empty and equally long".into(),
            ));
        }
        for w in positions.windows(2) {
            let d = w[1] - w[0];
            let min = 2.0 * channel.half_width;
            if d <= min {
                return Err(Error::ChannelOverlap { d, min });
            }
        }
        if contrasts.iter().any(|&dn| !(dn > 0.0)) {
            return Err(Error::InvalidParameter("contrasts must be positive".into()));
        }
        Ok(Self { positions, contrasts, reference_spacing, channel, material })
    }

    /// Number of channels (N + 1).
    pub fn sites(&self) -> usize {
        self.positions.len()
    }

    /// Spacings d_l = x_l - x_{l-1}, um (length sites - 1).
    pub fn spacings(&self) -> Vec<f64> {
        self.positions.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Index contrast above the substrate at `x`:
    /// `n(x) - n_s = sum_l dn_l g(x - x_l)`.
    pub fn index_contrast(&self, x: f64) -> f64 {
        self.positions
            .iter()
            .zip(&self.contrasts)
            .map(|(&xl, &dn)| dn * self.channel.g(x - xl))
            .sum()
    }
}
