//! Split-step pseudospectral propagation of the paraxial envelope through
//! the designed index landscape, with the bookkeeping needed to read
//! Fock-chain observables back out of the optical field.
//!
//! The envelope obeys `i lambdabar phi_z = -(lambdabar^2 / 2 n_s) phi_xx +
//! [n_s - n(x)] phi`. One Strang step is: half potential phase
//! `exp(-i [n_s - n] dz / 2 lambdabar)`, full spectral diffraction
//! `exp(-i lambdabar k^2 dz / 2 n_s)`, half potential phase, then the
//! absorber mask. All grid quantities are in micrometres.

mod modal;

pub use modal::{centroid_imbalance, modal_imbalance, ModalBasis};

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::optics::{ArrayLayout, MaterialContext};
use crate::UM_PER_MM;

/// Required clear margin between the outermost channel and the domain edge.
pub const MIN_MARGIN: f64 = 20.0;
/// Per-step potential phase bound, radians.
pub const MAX_STEP_PHASE: f64 = 0.1;

/// Transverse/longitudinal discretization, um.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    /// Power-of-two transverse sample count.
    pub n_x: usize,
    /// Longitudinal step, um.
    pub dz: f64,
    /// Propagation length, um.
    pub z_end: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_x: usize, dz: f64, z_end: f64) -> Result<Self> {
        if !(x_max > x_min) || !(dz > 0.0) || !(z_end >= 0.0) {
            return Err(Error::GridInvariant("ordering of extents and steps".into()));
        }
        if n_x < 2 || !n_x.is_power_of_two() {
            return Err(Error::GridInvariant(format!(
                "n_x must be a power of two, got {n_x}"
            )));
        }
        Ok(Self { x_min, x_max, n_x, dz, z_end })
    }

    /// Grid centered on the array with at least `margin` um of clearance on
    /// each side (the periodic point at x_max is excluded, making the grid
    /// exactly mirror symmetric about the array center).
    pub fn for_layout(
        layout: &ArrayLayout,
        margin: f64,
        n_x: usize,
        dz: f64,
        z_end: f64,
    ) -> Result<Self> {
        if margin < MIN_MARGIN {
            return Err(Error::GridInvariant(format!(
                "margin {margin} um is below the required {MIN_MARGIN} um"
            )));
        }
        let first = layout.positions[0];
        let last = layout.positions[layout.sites() - 1];
        let mid = 0.5 * (first + last);
        let half = 0.5 * (last - first) + margin;
        Self::new(mid - half, mid + half, n_x, dz, z_end)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_x as f64
    }

    /// Sample positions; x_max itself is the periodic wrap of x_min.
    pub fn xs(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_x).map(|i| self.x_min + i as f64 * dx).collect()
    }

    /// FFT angular wavenumbers in the layout matching `xs`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_x;
        let dk = 2.0 * std::f64::consts::PI / (n as f64 * self.dx());
        (0..n)
            .map(|i| {
                let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
                m * dk
            })
            .collect()
    }

    pub fn steps(&self) -> usize {
        (self.z_end / self.dz).round() as usize
    }
}

/// Complex envelope sampled on the grid.
#[derive(Debug, Clone)]
pub struct Field {
    pub samples: Vec<Complex64>,
    /// Current z, um.
    pub z: f64,
}

impl Field {
    pub fn power(&self, dx: f64) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx
    }

    /// Intensity-weighted transverse center of mass, um.
    pub fn centroid(&self, grid: &Grid) -> Result<f64> {
        let dx = grid.dx();
        let mut power = 0.0;
        let mut moment = 0.0;
        for (x, c) in grid.xs().iter().zip(&self.samples) {
            let i = c.norm_sqr();
            power += i;
            moment += x * i;
        }
        if power * dx <= 0.0 {
            return Err(Error::ZeroPower);
        }
        Ok(moment / power)
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Mirror about the array center; on the symmetric grid index 0 maps to
    /// itself through the periodic wrap.
    pub fn mirrored(&self) -> Field {
        let n = self.samples.len();
        let samples = (0..n).map(|i| self.samples[(n - i) % n]).collect();
        Field { samples, z: self.z }
    }
}

/// Raised-cosine edge absorber; transmission is exactly 1 outside the two
/// ramps, so a confined field sees no loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorber {
    /// Ramp width at each edge, um.
    pub width: f64,
}

impl Default for Absorber {
    fn default() -> Self {
        Self { width: 10.0 }
    }
}

impl Absorber {
    fn mask(&self, grid: &Grid) -> Vec<f64> {
        let w = self.width;
        grid.xs()
            .iter()
            .map(|&x| {
                let from_lo = x - grid.x_min;
                let from_hi = grid.x_max - x;
                let edge = from_lo.min(from_hi);
                if edge >= w {
                    1.0
                } else {
                    0.5 * (1.0 - (std::f64::consts::PI * edge / w).cos())
                }
            })
            .collect()
    }
}

/// Prepared split-step propagator; phase factors and FFT plans are built
/// once per (grid, index profile).
pub struct SplitStep {
    grid: Grid,
    half_potential: Vec<Complex64>,
    diffraction: Vec<Complex64>,
    /// Second half potential folded with the absorber mask and the inverse
    /// FFT normalization.
    post: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SplitStep {
    /// Propagator for an arbitrary index-contrast function `n(x) - n_s`.
    pub fn new(
        grid: &Grid,
        material: &MaterialContext,
        contrast_at: &dyn Fn(f64) -> f64,
        absorber: Option<Absorber>,
    ) -> Result<Self> {
        let lb = material.reduced_wavelength();
        let xs = grid.xs();
        let dz = grid.dz;

        let mut max_phase = 0.0f64;
        let half_potential: Vec<Complex64> = xs
            .iter()
            .map(|&x| {
                // [n_s - n(x)] dz / lambdabar, split over two half steps.
                let phase = -(-contrast_at(x)) * dz / lb;
                max_phase = max_phase.max(phase.abs());
                Complex64::from_polar(1.0, 0.5 * phase)
            })
            .collect();
        if max_phase >= MAX_STEP_PHASE {
            return Err(Error::GridInvariant(format!(
                "per-step potential phase {max_phase:.3} rad exceeds {MAX_STEP_PHASE}"
            )));
        }

        let alpha = material.kinetic_factor();
        let diffraction: Vec<Complex64> = grid
            .wavenumbers()
            .iter()
            .map(|&k| Complex64::from_polar(1.0, -alpha * k * k * dz))
            .collect();

        let mask = match absorber {
            Some(a) => a.mask(grid),
            None => vec![1.0; grid.n_x],
        };
        let inv_n = 1.0 / grid.n_x as f64;
        let post: Vec<Complex64> = half_potential
            .iter()
            .zip(&mask)
            .map(|(hp, m)| hp * m * inv_n)
            .collect();

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(grid.n_x);
        let ifft = planner.plan_fft_inverse(grid.n_x);
        let scratch_len = fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len());

        Ok(Self {
            grid: *grid,
            half_potential,
            diffraction,
            post,
            fft,
            ifft,
            scratch: vec![Complex64::ZERO; scratch_len],
        })
    }

    /// Propagator over a designed array.
    pub fn for_layout(grid: &Grid, layout: &ArrayLayout, absorber: Option<Absorber>) -> Result<Self> {
        let first = layout.positions[0];
        let last = layout.positions[layout.sites() - 1];
        if first - grid.x_min < MIN_MARGIN || grid.x_max - last < MIN_MARGIN {
            return Err(Error::GridInvariant(format!(
                "domain [{}, {}] leaves less than {MIN_MARGIN} um of margin around the array",
                grid.x_min, grid.x_max
            )));
        }
        let layout = layout.clone();
        Self::new(grid, &layout.material.clone(), &move |x| layout.index_contrast(x), absorber)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Advance one Strang step; aborts if the field stops being finite.
    pub fn step(&mut self, field: &mut Field) -> Result<()> {
        for (s, hp) in field.samples.iter_mut().zip(&self.half_potential) {
            *s *= hp;
        }
        self.fft.process_with_scratch(&mut field.samples, &mut self.scratch);
        for (s, d) in field.samples.iter_mut().zip(&self.diffraction) {
            *s *= d;
        }
        self.ifft.process_with_scratch(&mut field.samples, &mut self.scratch);
        for (s, p) in field.samples.iter_mut().zip(&self.post) {
            *s *= p;
        }
        field.z += self.grid.dz;
        if !field.is_finite() {
            return Err(Error::NonFiniteField { z_um: field.z });
        }
        Ok(())
    }
}

/// Unit-power fundamental mode of channel `site`, solved on the propagation
/// grid itself so that launch and projection share one discretization.
/// Realizes the one-hot initial condition of the chain.
pub fn launch_site(layout: &ArrayLayout, grid: &Grid, site: usize) -> Result<Field> {
    if site >= layout.sites() {
        return Err(Error::InvalidSite { site, sites: layout.sites() });
    }
    let xs = grid.xs();
    let x_site = layout.positions[site];
    let dn = layout.contrasts[site];
    let contrast: Vec<f64> = xs.iter().map(|&x| dn * layout.channel.g(x - x_site)).collect();
    let (_beta, amplitude) = crate::optics::mode_on_grid(&layout.material, &contrast, grid.dx())?;
    let samples = amplitude.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    Ok(Field { samples, z: 0.0 })
}

/// z-sampled observables of one propagation run.
#[derive(Debug, Clone)]
pub struct BpmTrace {
    pub z_mm: Vec<f64>,
    /// Guided power per channel from the orthonormalized modal projection.
    pub modal_powers: Vec<Vec<f64>>,
    pub imbalance_modal: Vec<f64>,
    pub imbalance_centroid: Vec<f64>,
    /// Power not captured by the guided-mode basis (radiation).
    pub residual_power: Vec<f64>,
    pub total_power: Vec<f64>,
}

/// |phi(x, z)|^2 snapshots.
#[derive(Debug, Clone)]
pub struct IntensityMap {
    pub z_mm: Vec<f64>,
    pub xs_um: Vec<f64>,
    /// rows[i] is the intensity profile at z_mm[i] (row-major z then x).
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct BpmRun {
    pub trace: BpmTrace,
    pub map: IntensityMap,
    pub final_field: Field,
}

/// Run the split-step method to `grid.z_end`, recording trace observables
/// every `trace_every` um and intensity snapshots every `map_every` um.
pub fn propagate_and_record(
    layout: &ArrayLayout,
    grid: &Grid,
    absorber: Option<Absorber>,
    launch: Field,
    trace_every: f64,
    map_every: f64,
) -> Result<BpmRun> {
    let mut stepper = SplitStep::for_layout(grid, layout, absorber)?;
    let basis = ModalBasis::new(layout, grid)?;
    let trace_stride = (trace_every / grid.dz).round().max(1.0) as usize;
    let map_stride = (map_every / grid.dz).round().max(1.0) as usize;

    let mut field = launch;
    let mut trace = BpmTrace {
        z_mm: Vec::new(),
        modal_powers: Vec::new(),
        imbalance_modal: Vec::new(),
        imbalance_centroid: Vec::new(),
        residual_power: Vec::new(),
        total_power: Vec::new(),
    };
    let mut map = IntensityMap { z_mm: Vec::new(), xs_um: grid.xs(), rows: Vec::new() };

    let steps = grid.steps();
    for step in 0..=steps {
        if step % trace_stride == 0 || step == steps {
            let powers = basis.project(&field);
            let total = field.power(grid.dx());
            trace.z_mm.push(field.z / UM_PER_MM);
            trace.imbalance_modal.push(modal_imbalance(&powers));
            trace.imbalance_centroid.push(centroid_imbalance(&field, grid, layout)?);
            trace.residual_power.push(total - powers.iter().sum::<f64>());
            trace.total_power.push(total);
            trace.modal_powers.push(powers);
        }
        if step % map_stride == 0 || step == steps {
            map.z_mm.push(field.z / UM_PER_MM);
            map.rows.push(field.intensity());
        }
        if step < steps {
            stepper.step(&mut field)?;
        }
    }
    Ok(BpmRun { trace, map, final_field: field })
}
