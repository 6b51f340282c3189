//! Finite-difference transverse mode solves: single-channel bound modes,
//! two-channel supermode splitting (the coupling), and the neighbor-induced
//! propagation-constant shift used by the design compensation.
//!
//! The stationary problem associated with the paraxial equation is
//! `-alpha u'' - (contrast(x)/lambdabar) u = E u` with `alpha =
//! lambdabar/(2 n_s)`; bound modes have `E < 0` and propagation-constant
//! shift `beta = -E`. Discretization is the three-point Laplacian on a
//! uniform grid with Dirichlet ends; every quoted eigenvalue is Richardson
//! extrapolated from two resolutions, which lifts the O(dx^2) bias to
//! O(dx^4).

use crate::error::{Error, Result};
use crate::linalg::SymTridiagonal;
use crate::UM_PER_MM;

use super::{ChannelProfile, MaterialContext};

/// Solver domain margin beyond the outermost channel, um. Mode tails decay
/// at ~0.6/um at the reference design, so 25 um buys ~e^-30 truncation.
pub const MODE_DOMAIN_MARGIN: f64 = 25.0;

/// Base grid step of the mode solver, um; fine enough for ~6 samples across
/// the erf transition of the reference channel.
pub const MODE_SOLVER_DX: f64 = 0.05;

/// Uniform inclusive grid from `lo` to `hi` with step close to `dx`.
pub fn uniform_grid(lo: f64, hi: f64, dx: f64) -> Vec<f64> {
    let n = ((hi - lo) / dx).round() as usize + 1;
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// FD operator for a given index-contrast sampling, eigenvalues in 1/um.
fn mode_operator(material: &MaterialContext, contrast: &[f64], dx: f64) -> SymTridiagonal {
    let alpha = material.kinetic_factor();
    let lb = material.reduced_wavelength();
    let k = alpha / (dx * dx);
    let diag = contrast.iter().map(|&c| 2.0 * k - c / lb).collect();
    let offdiag = vec![-k; contrast.len() - 1];
    SymTridiagonal::new(diag, offdiag)
}

/// Lowest `count` eigenvalues (1/um) of the transverse operator for an
/// index-contrast function sampled on a fresh grid over [lo, hi].
fn lowest_energies(
    material: &MaterialContext,
    contrast_at: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    dx: f64,
    count: usize,
) -> Vec<f64> {
    let xs = uniform_grid(lo, hi, dx);
    let contrast: Vec<f64> = xs.iter().map(|&x| contrast_at(x)).collect();
    let step = xs[1] - xs[0];
    mode_operator(material, &contrast, step).smallest_eigenvalues(count)
}

/// Richardson-extrapolated lowest energies from the base grid and its
/// refinement: (4 E_fine - E_coarse) / 3.
pub(crate) fn extrapolated_energies(
    material: &MaterialContext,
    contrast_at: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    count: usize,
) -> Vec<f64> {
    let coarse = lowest_energies(material, contrast_at, lo, hi, MODE_SOLVER_DX, count);
    let fine = lowest_energies(material, contrast_at, lo, hi, MODE_SOLVER_DX / 2.0, count);
    (0..count).map(|k| (4.0 * fine[k] - coarse[k]) / 3.0).collect()
}

/// A guided transverse mode.
#[derive(Debug, Clone)]
pub struct BoundMode {
    /// Propagation-constant shift above the substrate, 1/mm.
    pub beta_shift: f64,
    /// Sample positions of the stored profile, um.
    pub xs: Vec<f64>,
    /// Real mode profile, L2-normalized with the grid weight
    /// (`sum u^2 dx = 1`), positive at its peak.
    pub amplitude: Vec<f64>,
    /// Bound modes beyond the fundamental (0 for a single-mode channel).
    /// A nonzero value is reported, not treated as a failure.
    pub extra_bound_modes: usize,
}

/// Fundamental bound mode of a single channel of contrast `dn`.
///
/// The quoted `beta_shift` is Richardson extrapolated; the profile is taken
/// from the fine grid.
pub fn solve_single_mode(
    material: &MaterialContext,
    profile: &ChannelProfile,
    dn: f64,
) -> Result<BoundMode> {
    if !(dn > 0.0) {
        return Err(Error::NoBoundMode { dn });
    }
    let half = profile.half_width + MODE_DOMAIN_MARGIN;
    let contrast = |x: f64| dn * profile.g(x);
    let energies = extrapolated_energies(material, &contrast, -half, half, 2);
    if energies[0] >= 0.0 {
        return Err(Error::NoBoundMode { dn });
    }
    let extra_bound_modes = usize::from(energies[1] < 0.0);

    // Profile on the fine grid, at the fine-grid eigenvalue.
    let dx_fine = MODE_SOLVER_DX / 2.0;
    let xs = uniform_grid(-half, half, dx_fine);
    let samples: Vec<f64> = xs.iter().map(|&x| contrast(x)).collect();
    let step = xs[1] - xs[0];
    let op = mode_operator(material, &samples, step);
    let lambda = op.smallest_eigenvalues(1)[0];
    let mut amplitude = op.eigenvector(lambda);
    normalize_mode(&mut amplitude, step);

    Ok(BoundMode {
        beta_shift: -energies[0] * UM_PER_MM,
        xs,
        amplitude,
        extra_bound_modes,
    })
}

/// Fundamental mode of an arbitrary contrast sampling on a caller-supplied
/// grid (used to launch and project fields on the propagation grid; no
/// Richardson step so that the mode is exactly the grid's own).
pub fn mode_on_grid(
    material: &MaterialContext,
    contrast: &[f64],
    dx: f64,
) -> Result<(f64, Vec<f64>)> {
    let op = mode_operator(material, contrast, dx);
    let lambda = op.smallest_eigenvalues(1)[0];
    if lambda >= 0.0 {
        return Err(Error::NoBoundMode { dn: f64::NAN });
    }
    let mut amplitude = op.eigenvector(lambda);
    normalize_mode(&mut amplitude, dx);
    Ok((-lambda * UM_PER_MM, amplitude))
}

fn normalize_mode(u: &mut [f64], dx: f64) {
    let norm = (u.iter().map(|v| v * v).sum::<f64>() * dx).sqrt();
    let peak = u.iter().fold(0.0f64, |m, &v| if v.abs() > m.abs() { v } else { m });
    let sign = if peak < 0.0 { -1.0 } else { 1.0 };
    u.iter_mut().for_each(|v| *v *= sign / norm);
}

/// Symmetric and antisymmetric supermode shifts (beta_s, beta_a) in 1/mm of
/// two identical channels of contrast `dn` separated by `d`.
pub fn pair_supermode_betas(
    material: &MaterialContext,
    profile: &ChannelProfile,
    dn: f64,
    d: f64,
) -> Result<(f64, f64)> {
    let min = 2.0 * profile.half_width;
    if d <= min {
        return Err(Error::ChannelOverlap { d, min });
    }
    let half = d / 2.0 + profile.half_width + MODE_DOMAIN_MARGIN;
    let contrast = |x: f64| dn * (profile.g(x - d / 2.0) + profile.g(x + d / 2.0));
    let energies = extrapolated_energies(material, &contrast, -half, half, 2);
    if energies[0] >= 0.0 || energies[1] >= 0.0 {
        return Err(Error::NoBoundMode { dn });
    }
    Ok((-energies[0] * UM_PER_MM, -energies[1] * UM_PER_MM))
}

/// Coupling rate between two adjacent channels from the supermode
/// splitting, `kappa = (beta_s - beta_a) / 2`, 1/mm.
pub fn coupling_vs_distance(
    material: &MaterialContext,
    profile: &ChannelProfile,
    dn: f64,
    d: f64,
) -> Result<f64> {
    let (beta_s, beta_a) = pair_supermode_betas(material, profile, dn, d)?;
    let kappa = 0.5 * (beta_s - beta_a);
    // The splitting must clear the extrapolation noise floor.
    if kappa <= 1e-9 * beta_s.abs() {
        return Err(Error::SplittingBelowResolution { d });
    }
    Ok(kappa)
}

/// Shift of the mean supermode propagation constant relative to the
/// isolated channel, `(beta_s + beta_a)/2 - beta_iso`, in 1/mm. This is the
/// per-neighbor on-site correction a channel acquires in an array.
pub fn neighbor_beta_shift(
    material: &MaterialContext,
    profile: &ChannelProfile,
    dn: f64,
    d: f64,
) -> Result<f64> {
    let (beta_s, beta_a) = pair_supermode_betas(material, profile, dn, d)?;
    let iso = solve_single_mode(material, profile, dn)?.beta_shift;
    Ok(0.5 * (beta_s + beta_a) - iso)
}
