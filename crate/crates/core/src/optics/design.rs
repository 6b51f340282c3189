//! Inverse design of the waveguide array realizing a given Fock chain.
//!
//! The pipeline has three stages of increasing fidelity:
//!
//! 1. *Coupling characterization*: kappa(d) is computed from supermode
//!    splittings at the reference contrast and fitted to the exponential
//!    law; spacings follow from its closed-form inversion plus one round of
//!    root polishing against the solver itself.
//! 2. *First-order contrasts*: each detuning target is realized through the
//!    isolated-channel propagation constant, `V_l = -(beta_l - beta_ref)`,
//!    after correcting the targets for the neighbor-induced shift every
//!    channel acquires from its adjacent channels (edge channels have one
//!    neighbor, interior channels two).
//! 3. *Spectral refinement*: the lowest (N+1) supermode constants of the
//!    whole array are matched, up to a uniform offset, to the chain
//!    spectrum by a small Gauss-Newton iteration over the contrasts (plus
//!    one uniform spacing shift for the anchor design, which sets the band
//!    gap scale that contrast knobs cannot reach). Residual rows are
//!    weighted by the launch-state overlap of each chain eigenstate, which
//!    is what the observable dynamics is sensitive to.
//!
//! Spacings depend only on (N, J) and are shared by every interaction
//! strength; designs for different U differ in their contrasts alone.

use crate::error::{Error, Result};
use crate::fock::{build_coefficients, build_hamiltonian, ModelParams};
use crate::linalg::solve_least_squares;
use crate::UM_PER_MM;

use super::modes::{
    coupling_vs_distance, extrapolated_energies, neighbor_beta_shift, solve_single_mode,
    MODE_DOMAIN_MARGIN,
};
use super::{ArrayLayout, ChannelProfile, CouplingFit, MaterialContext};

/// Reference constants and knobs of the design procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    /// Reference index contrast.
    pub dn_ref: f64,
    /// Reference spacing, um.
    pub d_ref: f64,
    /// Coupling characterization range, um.
    pub fit_d_min: f64,
    pub fit_d_max: f64,
    /// Number of kappa(d) samples across the range.
    pub fit_samples: usize,
    /// Rounds of spacing root-polishing against the mode solver.
    pub polish_rounds: usize,
    /// Enable the whole-array spectral refinement stage.
    pub refine_spectrum: bool,
    /// Gauss-Newton iteration cap for the refinement.
    pub refine_max_iters: usize,
}

impl Default for DesignParams {
    fn default() -> Self {
        Self {
            dn_ref: 2e-3,
            d_ref: 8.0,
            fit_d_min: 6.5,
            fit_d_max: 9.5,
            fit_samples: 7,
            polish_rounds: 1,
            refine_spectrum: true,
            refine_max_iters: 6,
        }
    }
}

/// Contrast root-finding tolerance, as a fraction of max |V_target|.
const CONTRAST_TOL_FRACTION: f64 = 1e-3;
/// Contrast search window around the reference, as factors.
const CONTRAST_RANGE: (f64, f64) = (0.2, 3.0);
/// Finite-difference steps of the refinement Jacobian.
const JACOBIAN_DN_STEP: f64 = 2e-6;
const JACOBIAN_SHIFT_STEP: f64 = 2e-3;
/// Refinement convergence threshold on the weighted residual, 1/mm.
const REFINE_TOL: f64 = 5e-5;
/// Floor added to the launch weights so edge eigenstates are not ignored
/// entirely.
const WEIGHT_FLOOR: f64 = 1e-4;

/// Sample kappa(d) over the characterization range at the reference
/// contrast.
pub fn characterize_coupling(
    material: &MaterialContext,
    profile: &ChannelProfile,
    params: &DesignParams,
) -> Result<Vec<(f64, f64)>> {
    let n = params.fit_samples;
    if n < 2 {
        return Err(Error::TooFewSamples { need: 4, got: n });
    }
    (0..n)
        .map(|i| {
            let d = params.fit_d_min
                + (params.fit_d_max - params.fit_d_min) * i as f64 / (n - 1) as f64;
            coupling_vs_distance(material, profile, params.dn_ref, d).map(|k| (d, k))
        })
        .collect()
}

/// Least-squares fit of `ln kappa = ln kappa0 - gamma (d - d_ref)`.
pub fn fit_coupling_law(samples: &[(f64, f64)], d_ref: f64, dn_ref: f64) -> Result<CouplingFit> {
    if samples.len() < 4 {
        return Err(Error::TooFewSamples { need: 4, got: samples.len() });
    }
    let d_lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let d_hi = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    if d_ref < d_lo || d_ref > d_hi {
        return Err(Error::TargetOutsideRange { what: "d_ref", value: d_ref });
    }
    for &(d, k) in samples {
        if !(k > 0.0) {
            return Err(Error::NonPositiveCoupling { d });
        }
    }
    // Linear regression of y = ln kappa on t = d - d_ref.
    let n = samples.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(d, k) in samples {
        let t = d - d_ref;
        let y = k.ln();
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let slope = (n * sty - st * sy) / (n * stt - st * st);
    let intercept = (sy - slope * st) / n;
    let fit = CouplingFit {
        kappa0: intercept.exp(),
        gamma: -slope,
        d_ref,
        dn_ref,
        rms_residual: 0.0,
    };
    let mut ss = 0.0;
    for &(d, k) in samples {
        let rel = fit.kappa_at(d) / k - 1.0;
        ss += rel * rel;
    }
    Ok(CouplingFit { rms_residual: (ss / n).sqrt(), ..fit })
}

/// Spacings realizing the coupling targets: closed-form inversion of the
/// fitted law, then `polish_rounds` of correction against the mode solver,
/// then exact mirror symmetrization.
pub fn design_spacings(
    material: &MaterialContext,
    profile: &ChannelProfile,
    fit: &CouplingFit,
    kappa_targets: &[f64],
    polish_rounds: usize,
) -> Result<Vec<f64>> {
    // Usable range of the law: strong couplings run into channel overlap
    // well before the small-coupling side runs into splitting resolution,
    // so the range is asymmetric around d_ref.
    let k_min = fit.kappa_at(fit.d_ref + 8.0);
    let k_max = fit.kappa_at(fit.d_ref - 2.0);
    let mut spacings = Vec::with_capacity(kappa_targets.len());
    for &target in kappa_targets {
        if !(target > 0.0) || target < k_min || target > k_max {
            return Err(Error::TargetOutsideRange { what: "kappa", value: target });
        }
        let mut d = fit.distance_for(target);
        let min = 2.0 * profile.half_width;
        if d <= min {
            return Err(Error::ChannelOverlap { d, min });
        }
        for _ in 0..polish_rounds {
            let realized = coupling_vs_distance(material, profile, fit.dn_ref, d)?;
            d += (realized / target).ln() / fit.gamma;
        }
        spacings.push(d);
    }
    let n = spacings.len();
    let mirrored: Vec<f64> = (0..n)
        .map(|i| 0.5 * (spacings[i] + spacings[n - 1 - i]))
        .collect();
    Ok(mirrored)
}

/// First-order contrasts realizing detuning targets through the isolated
/// channel constant: `beta(dn_l) = beta_ref - V_l`. Zero targets return the
/// reference contrast exactly. Targets are taken as given (already
/// gauge-reduced by the caller); tolerance is
/// `CONTRAST_TOL_FRACTION * max |V|`.
pub fn design_contrasts(
    material: &MaterialContext,
    profile: &ChannelProfile,
    dn_ref: f64,
    v_targets: &[f64],
) -> Result<Vec<f64>> {
    let v_max = v_targets.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if v_max == 0.0 {
        return Ok(vec![dn_ref; v_targets.len()]);
    }
    let beta_ref = solve_single_mode(material, profile, dn_ref)?.beta_shift;
    let slope = contrast_slope(material, profile, dn_ref)?;
    let tol = CONTRAST_TOL_FRACTION * v_max;
    let n = v_targets.len();
    let mut contrasts = vec![dn_ref; n];
    for l in 0..(n + 1) / 2 {
        // Mirror symmetry: solve the left half, copy to the right.
        let target = v_targets[l];
        let dn = if target == 0.0 {
            dn_ref
        } else {
            solve_contrast(material, profile, dn_ref, beta_ref - target, slope, tol)?
        };
        contrasts[l] = dn;
        contrasts[n - 1 - l] = dn;
    }
    Ok(contrasts)
}

/// d beta / d dn around the reference contrast, (1/mm) per unit contrast.
fn contrast_slope(
    material: &MaterialContext,
    profile: &ChannelProfile,
    dn_ref: f64,
) -> Result<f64> {
    let hi = solve_single_mode(material, profile, dn_ref * 1.05)?.beta_shift;
    let lo = solve_single_mode(material, profile, dn_ref * 0.95)?.beta_shift;
    Ok((hi - lo) / (0.1 * dn_ref))
}

/// Newton iteration for `beta(dn) = beta_target` with the precomputed
/// slope; beta(dn) is smooth and monotone over the search window.
fn solve_contrast(
    material: &MaterialContext,
    profile: &ChannelProfile,
    dn_ref: f64,
    beta_target: f64,
    slope: f64,
    tol: f64,
) -> Result<f64> {
    let (lo, hi) = (CONTRAST_RANGE.0 * dn_ref, CONTRAST_RANGE.1 * dn_ref);
    let mut dn = dn_ref + (beta_target - solve_single_mode(material, profile, dn_ref)?.beta_shift) / slope;
    for _ in 0..60 {
        if dn < lo || dn > hi {
            return Err(Error::TargetOutsideRange { what: "contrast", value: dn });
        }
        let beta = match solve_single_mode(material, profile, dn) {
            Ok(m) => m.beta_shift,
            Err(Error::NoBoundMode { dn }) => {
                return Err(Error::DesignFailure(format!(
                    "channel became unguided at contrast {dn:.3e} while bracketing"
                )))
            }
            Err(e) => return Err(e),
        };
        let f = beta - beta_target;
        if f.abs() <= tol {
            return Ok(dn);
        }
        dn -= f / slope;
    }
    Err(Error::DesignFailure(format!(
        "contrast iteration did not reach tolerance {tol:.2e}"
    )))
}

/// Precomputed design context for one (N, J); layouts for any interaction
/// strength share its spacings.
#[derive(Debug, Clone)]
pub struct ArrayDesigner {
    material: MaterialContext,
    profile: ChannelProfile,
    params: DesignParams,
    particles: usize,
    hopping: f64,
    fit: CouplingFit,
    /// Final spacings (after polish and, if enabled, the anchor-refinement
    /// uniform shift), um.
    spacings: Vec<f64>,
    /// Neighbor-induced beta shift per spacing, 1/mm.
    neighbor_shifts: Vec<f64>,
    /// Refined contrasts of the non-interacting anchor design.
    anchor_contrasts: Option<Vec<f64>>,
}

impl ArrayDesigner {
    pub fn new(
        material: MaterialContext,
        profile: ChannelProfile,
        particles: usize,
        hopping: f64,
        params: DesignParams,
    ) -> Result<Self> {
        let model = ModelParams::new(particles, hopping, 0.0)?;
        let coeffs = build_coefficients(&model);

        let samples = characterize_coupling(&material, &profile, &params)?;
        let fit = fit_coupling_law(&samples, params.d_ref, params.dn_ref)?;
        let spacings = design_spacings(&material, &profile, &fit, &coeffs.kappa, params.polish_rounds)?;

        let mut designer = Self {
            material,
            profile,
            params,
            particles,
            hopping,
            fit,
            neighbor_shifts: Vec::new(),
            spacings,
            anchor_contrasts: None,
        };
        designer.recompute_neighbor_shifts()?;

        if params.refine_spectrum {
            // Anchor refinement at U = 0 fixes the band-gap scale through a
            // uniform spacing shift; those spacings are then frozen for
            // every interaction strength.
            let first = designer.first_order_contrasts(0.0)?;
            let (contrasts, shift) = designer.refine(0.0, first, true)?;
            if shift != 0.0 {
                designer.spacings.iter_mut().for_each(|d| *d += shift);
                designer.recompute_neighbor_shifts()?;
            }
            designer.anchor_contrasts = Some(contrasts);
        }
        Ok(designer)
    }

    pub fn fit(&self) -> &CouplingFit {
        &self.fit
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    pub fn material(&self) -> &MaterialContext {
        &self.material
    }

    pub fn profile(&self) -> &ChannelProfile {
        &self.profile
    }

    /// Channel positions from the current spacings, centered on x = 0.
    pub fn positions(&self) -> Vec<f64> {
        positions_from(&self.spacings)
    }

    fn recompute_neighbor_shifts(&mut self) -> Result<()> {
        self.neighbor_shifts = self
            .spacings
            .iter()
            .map(|&d| neighbor_beta_shift(&self.material, &self.profile, self.params.dn_ref, d))
            .collect::<Result<_>>()?;
        Ok(())
    }

    /// Detuning targets corrected for the neighbor-induced shifts and
    /// gauge-reduced so the smallest target is zero (a uniform detuning is
    /// a global phase).
    fn corrected_targets(&self, interaction: f64) -> Result<Vec<f64>> {
        let model = ModelParams::new(self.particles, self.hopping, interaction)?;
        let coeffs = build_coefficients(&model);
        let n = self.particles;
        let mut targets: Vec<f64> = (0..=n)
            .map(|l| {
                let mut v = coeffs.detuning[l];
                if l > 0 {
                    v += self.neighbor_shifts[l - 1];
                }
                if l < n {
                    v += self.neighbor_shifts[l];
                }
                v
            })
            .collect();
        let min = targets.iter().cloned().fold(f64::INFINITY, f64::min);
        targets.iter_mut().for_each(|v| *v -= min);
        // Clean the gauge zero so reference channels stay exactly at dn_ref.
        let scale = targets.iter().cloned().fold(0.0f64, f64::max);
        targets.iter_mut().for_each(|v| {
            if v.abs() < 1e-12 * scale.max(1.0) {
                *v = 0.0;
            }
        });
        Ok(targets)
    }

    fn first_order_contrasts(&self, interaction: f64) -> Result<Vec<f64>> {
        let targets = self.corrected_targets(interaction)?;
        design_contrasts(&self.material, &self.profile, self.params.dn_ref, &targets)
    }

    /// Chain spectrum and launch weights (site-0 overlap of each
    /// eigenstate) for the refinement targets.
    fn chain_targets(&self, interaction: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let model = ModelParams::new(self.particles, self.hopping, interaction)?;
        let h = build_hamiltonian(&build_coefficients(&model));
        let (values, vectors) = h.eigh();
        let weights = vectors
            .iter()
            .map(|v| (v[0] * v[0] + WEIGHT_FLOOR).sqrt())
            .collect();
        Ok((values, weights))
    }

    /// Lowest-band supermode energies (1/mm, ascending) of the full array
    /// with the given contrasts and a uniform spacing shift.
    fn band_energies(&self, contrasts: &[f64], shift: f64) -> Vec<f64> {
        let spac: Vec<f64> = self.spacings.iter().map(|d| d + shift).collect();
        let positions = positions_from(&spac);
        let lo = positions[0] - self.profile.half_width - MODE_DOMAIN_MARGIN;
        let hi = positions[positions.len() - 1] + self.profile.half_width + MODE_DOMAIN_MARGIN;
        let profile = self.profile;
        let contrast_at = move |x: f64| {
            positions
                .iter()
                .zip(contrasts)
                .map(|(&xl, &dn)| dn * profile.g(x - xl))
                .sum::<f64>()
        };
        extrapolated_energies(&self.material, &contrast_at, lo, hi, self.particles + 1)
            .iter()
            .map(|e| e * UM_PER_MM)
            .collect()
    }

    /// Gauss-Newton spectral matching: adjust contrasts (and, when
    /// `with_shift`, a uniform spacing shift) so the array band matches the
    /// chain spectrum up to a constant, weighted by launch overlap.
    ///
    /// The layout is mirror symmetric, which would make the per-site
    /// Jacobian exactly rank deficient; the iteration therefore works on
    /// the independent symmetric knobs (site pairs l and N-l move
    /// together), keeping the solve full rank and the symmetry exact.
    fn refine(
        &self,
        interaction: f64,
        start: Vec<f64>,
        with_shift: bool,
    ) -> Result<(Vec<f64>, f64)> {
        let (tb_values, weights) = self.chain_targets(interaction)?;
        let sites = self.particles + 1;
        let half = (sites + 1) / 2;
        let cols = half + usize::from(with_shift);
        let mut contrasts = start;
        let mut shift = 0.0;

        let residual = |energies: &[f64]| -> Vec<f64> {
            let em: f64 = energies.iter().sum::<f64>() / energies.len() as f64;
            let tm: f64 = tb_values.iter().sum::<f64>() / tb_values.len() as f64;
            energies
                .iter()
                .zip(&tb_values)
                .map(|(e, t)| (e - em) - (t - tm))
                .collect()
        };

        // Frozen finite-difference Jacobian about the first-order point;
        // each knob perturbs a mirror pair together.
        let e0 = self.band_energies(&contrasts, shift);
        let mut jac = vec![vec![0.0; cols]; sites];
        for p in 0..half {
            let q = sites - 1 - p;
            let mut probe = contrasts.clone();
            probe[p] += JACOBIAN_DN_STEP;
            if q != p {
                probe[q] += JACOBIAN_DN_STEP;
            }
            let ep = self.band_energies(&probe, shift);
            for k in 0..sites {
                jac[k][p] = (ep[k] - e0[k]) / JACOBIAN_DN_STEP;
            }
        }
        if with_shift {
            let ep = self.band_energies(&contrasts, shift + JACOBIAN_SHIFT_STEP);
            for k in 0..sites {
                jac[k][half] = (ep[k] - e0[k]) / JACOBIAN_SHIFT_STEP;
            }
        }

        let mut r = residual(&e0);
        let wmax = weights.iter().cloned().fold(0.0f64, f64::max);
        for _ in 0..self.params.refine_max_iters {
            // Weighted rows plus a gauge row pinning the net contrast
            // update to zero (a uniform contrast change is nearly a gauge).
            let mut a = Vec::with_capacity(sites + 1);
            let mut b = Vec::with_capacity(sites + 1);
            for k in 0..sites {
                a.push(jac[k].iter().map(|j| j * weights[k]).collect::<Vec<f64>>());
                b.push(-r[k] * weights[k]);
            }
            let mut gauge = vec![0.0; cols];
            for (p, g) in gauge.iter_mut().enumerate().take(half) {
                let multiplicity = if sites - 1 - p == p { 1.0 } else { 2.0 };
                *g = 1e3 * multiplicity;
            }
            a.push(gauge);
            b.push(0.0);

            let update = solve_least_squares(&a, &b);
            for p in 0..half {
                contrasts[p] += update[p];
                contrasts[sites - 1 - p] = contrasts[p];
            }
            if with_shift {
                shift += update[half];
            }
            if contrasts.iter().any(|&dn| !(dn > 0.0)) {
                return Err(Error::DesignFailure(
                    "spectral refinement drove a contrast non-positive".into(),
                ));
            }

            r = residual(&self.band_energies(&contrasts, shift));
            let weighted = r
                .iter()
                .zip(&weights)
                .map(|(ri, wi)| (ri * wi / wmax).abs())
                .fold(0.0f64, f64::max);
            if weighted < REFINE_TOL {
                break;
            }
        }
        Ok((contrasts, shift))
    }

    /// Design the layout for one interaction strength on the shared
    /// spacings.
    pub fn layout_for(&self, interaction: f64) -> Result<ArrayLayout> {
        let contrasts = if self.params.refine_spectrum {
            if interaction == 0.0 {
                self.anchor_contrasts
                    .clone()
                    .expect("anchor contrasts exist when refinement is enabled")
            } else {
                let first = self.first_order_contrasts(interaction)?;
                self.refine(interaction, first, false)?.0
            }
        } else {
            self.first_order_contrasts(interaction)?
        };
        ArrayLayout::new(
            self.positions(),
            contrasts,
            self.params.d_ref,
            self.profile,
            self.material,
        )
    }

    /// Residual of the array band against the chain spectrum (gauge-free,
    /// 1/mm per level); diagnostic for design round-trip checks.
    pub fn spectral_residual(&self, layout: &ArrayLayout, interaction: f64) -> Result<Vec<f64>> {
        let (tb_values, _) = self.chain_targets(interaction)?;
        let energies = self.band_energies(&layout.contrasts, 0.0);
        let em: f64 = energies.iter().sum::<f64>() / energies.len() as f64;
        let tm: f64 = tb_values.iter().sum::<f64>() / tb_values.len() as f64;
        Ok(energies
            .iter()
            .zip(&tb_values)
            .map(|(e, t)| (e - em) - (t - tm))
            .collect())
    }
}

fn positions_from(spacings: &[f64]) -> Vec<f64> {
    let mut positions = Vec::with_capacity(spacings.len() + 1);
    positions.push(0.0);
    for &d in spacings {
        positions.push(positions.last().unwrap() + d);
    }
    let mean: f64 = positions.iter().sum::<f64>() / positions.len() as f64;
    positions.iter_mut().for_each(|x| *x -= mean);
    positions
}

/// One-call design: compose coefficient construction, spacing design, and
/// contrast design into a fabrication-ready, centered layout.
pub fn assemble_array(
    model: &ModelParams,
    material: &MaterialContext,
    profile: &ChannelProfile,
    params: &DesignParams,
) -> Result<ArrayLayout> {
    ArrayDesigner::new(*material, *profile, model.particles, model.hopping, *params)?
        .layout_for(model.interaction)
}
