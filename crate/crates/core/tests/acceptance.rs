//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured numbers. Tolerances are pinned here; run with
//! `cargo test -p fockbeam --test acceptance` (add `-- --nocapture` to see
//! every line).
//!
//! Reference scenario: N = 9 bosons, J = 0.0781 /mm, interactions
//! U in {0, 0.0174, 0.1043} /mm, with the non-interacting revival length
//! z_R = pi / J = 40.22 mm; the two-boson criteria use the N = 2 closed
//! forms.

use std::f64::consts::PI;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fockbeam::analysis::{interior_maxima, period_from_zero_crossings, zero_crossings};
use fockbeam::bpm::{launch_site, propagate_and_record, Absorber, BpmRun, Grid};
use fockbeam::fock::{
    build_coefficients, evolve, spectrum, FockState, ModelParams, SpectralPropagator,
};
use fockbeam::linalg::jacobi_eigh;
use fockbeam::optics::{
    coupling_vs_distance, ArrayDesigner, ArrayLayout, ChannelProfile, DesignParams,
    MaterialContext,
};
use fockbeam::two_boson::{closed_form_probs, p_pair, p_right, TwoBosonParams};
use fockbeam::UM_PER_MM;

const PARTICLES: usize = 9;
const HOPPING: f64 = 0.0781;
const INTERACTIONS: [f64; 3] = [0.0, 0.0174, 0.1043];
const Z_END_MM: f64 = 100.0;
const TRACE_STEP_MM: f64 = 0.2;

fn z_revival() -> f64 {
    PI / HOPPING
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

fn material() -> MaterialContext {
    MaterialContext::new(0.633, 1.45).unwrap()
}

fn channel() -> ChannelProfile {
    ChannelProfile::new(2.0, 0.3).unwrap()
}

static DESIGNER: Lazy<ArrayDesigner> = Lazy::new(|| {
    ArrayDesigner::new(material(), channel(), PARTICLES, HOPPING, DesignParams::default())
        .expect("reference design")
});

static LAYOUTS: Lazy<Vec<ArrayLayout>> = Lazy::new(|| {
    INTERACTIONS
        .iter()
        .map(|&u| DESIGNER.layout_for(u).expect("layout"))
        .collect()
});

/// One full-wave run per interaction strength at the default grid.
static BPM_RUNS: Lazy<Vec<BpmRun>> = Lazy::new(|| {
    LAYOUTS
        .iter()
        .map(|layout| {
            let grid = Grid::for_layout(layout, 20.0, 2048, 0.5, Z_END_MM * UM_PER_MM)
                .expect("grid");
            let launch = launch_site(layout, &grid, 0).expect("launch");
            propagate_and_record(
                layout,
                &grid,
                Some(Absorber::default()),
                launch,
                TRACE_STEP_MM * UM_PER_MM,
                UM_PER_MM,
            )
            .expect("propagation")
        })
        .collect()
});

fn tb_trace(interaction: f64) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let coeffs = build_coefficients(&ModelParams::new(PARTICLES, HOPPING, interaction).unwrap());
    let state = FockState::delta(PARTICLES, 0).unwrap();
    let samples = (Z_END_MM / TRACE_STEP_MM) as usize + 1;
    let z_grid: Vec<f64> = (0..samples).map(|i| i as f64 * TRACE_STEP_MM).collect();
    let trace = evolve(&state, &coeffs, &z_grid).unwrap();
    let probs = trace.states.iter().map(|s| s.occupation_probabilities()).collect();
    (trace.z_grid, probs, trace.imbalance)
}

/// Exact chain imbalance at arbitrary z for the delta launch.
fn tb_imbalance_fn(interaction: f64) -> impl Fn(f64) -> f64 {
    let coeffs = build_coefficients(&ModelParams::new(PARTICLES, HOPPING, interaction).unwrap());
    let propagator = SpectralPropagator::new(&coeffs);
    let state = FockState::delta(PARTICLES, 0).unwrap();
    move |z: f64| propagator.advance(&state, z).population_imbalance()
}

#[test]
fn criterion_01_josephson_period() {
    // Tight-binding: crossings of the exact P(z), each root polished by
    // bisection, must give the analytic period pi/J to 1e-6 relative.
    let p_of = tb_imbalance_fn(0.0);
    let (z, _, imbalance) = tb_trace(0.0);
    let rough = zero_crossings(&z, &imbalance);
    let mut refined = Vec::new();
    for c in &rough {
        let (mut lo, mut hi) = (c - TRACE_STEP_MM, c + TRACE_STEP_MM);
        let (mut flo, fhi) = (p_of(lo), p_of(hi));
        assert!(flo * fhi < 0.0, "crossing not bracketed");
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let fm = p_of(mid);
            if flo * fm <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        refined.push(0.5 * (lo + hi));
    }
    let tb_period = 2.0 * (refined[refined.len() - 1] - refined[0]) / (refined.len() - 1) as f64;
    let tb_err = (tb_period / z_revival() - 1.0).abs();

    // Full wave: period of the modal imbalance on the U = 0 array within 5%.
    let trace = &BPM_RUNS[0].trace;
    let bpm_period = period_from_zero_crossings(&trace.z_mm, &trace.imbalance_modal)
        .expect("BPM trace has crossings");
    let bpm_err = (bpm_period / z_revival() - 1.0).abs();

    report(
        "01 josephson-period",
        tb_err <= 1e-6 && bpm_err <= 0.05,
        &format!(
            "tight-binding {tb_period:.6} mm (rel err {tb_err:.2e}, tol 1e-6), \
             wave {bpm_period:.4} mm (rel err {bpm_err:.2e}, tol 5e-2), target {:.6} mm",
            z_revival()
        ),
    );
}

#[test]
fn criterion_02_self_imaging() {
    // Tight-binding revival of the one-hot launch at z_R.
    let coeffs = build_coefficients(&ModelParams::new(PARTICLES, HOPPING, 0.0).unwrap());
    let state = FockState::delta(PARTICLES, 0).unwrap();
    let revived = SpectralPropagator::new(&coeffs).advance(&state, z_revival());
    let tb_dev = revived
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .map(|(a, b)| (a.norm() - b.norm()).abs())
        .fold(0.0f64, f64::max);

    // Wave: modal powers at the trace sample nearest z_R, one-hot within
    // 0.1 per site.
    let trace = &BPM_RUNS[0].trace;
    let idx = trace
        .z_mm
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - z_revival()).abs().total_cmp(&(b.1 - z_revival()).abs()))
        .map(|(i, _)| i)
        .unwrap();
    let powers = &trace.modal_powers[idx];
    let bpm_dev = powers
        .iter()
        .enumerate()
        .map(|(l, &p)| if l == 0 { (p - 1.0).abs() } else { p })
        .fold(0.0f64, f64::max);

    report(
        "02 self-imaging",
        tb_dev <= 1e-8 && bpm_dev <= 0.1,
        &format!(
            "tight-binding revival dev {tb_dev:.2e} (tol 1e-8), \
             wave one-hot dev {bpm_dev:.3} at z = {:.1} mm (tol 0.1)",
            trace.z_mm[idx]
        ),
    );
}

#[test]
fn criterion_03_full_transfer() {
    let p_half = tb_imbalance_fn(0.0)(z_revival() / 2.0);
    let dev = (p_half - (-1.0)).abs();
    report(
        "03 full-transfer",
        dev <= 1e-8,
        &format!("P(z_R/2) = {p_half:.12} (tol 1e-8 from -1)"),
    );
}

#[test]
fn criterion_04_self_trapping() {
    // U = 0.1043: tight-binding imbalance stays positive over 100 mm; the
    // wave run agrees in sign everywhere. The floor is recorded from the
    // tight-binding evolution, not asserted from any quoted value.
    let (_, _, tb_imbalance) = tb_trace(INTERACTIONS[2]);
    let tb_floor = tb_imbalance.iter().cloned().fold(f64::INFINITY, f64::min);

    let trace = &BPM_RUNS[2].trace;
    let bpm_floor = trace.imbalance_modal.iter().cloned().fold(f64::INFINITY, f64::min);
    let centroid_floor = trace
        .imbalance_centroid
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);

    report(
        "04 self-trapping",
        tb_floor > 0.0 && bpm_floor > 0.0,
        &format!(
            "recorded floors: tight-binding {tb_floor:.4}, wave modal {bpm_floor:.4}, \
             wave centroid {centroid_floor:.4} (all must stay positive)"
        ),
    );
}

#[test]
fn criterion_05_damped_regime() {
    // U = 0.0174: successive imbalance maxima decrease over the first two
    // periods in both models.
    let horizon = 2.2 * z_revival();
    let decreasing = |z: &[f64], p: &[f64]| -> (bool, Vec<f64>) {
        let maxima: Vec<f64> = interior_maxima(z, p)
            .into_iter()
            .filter(|(zm, _)| *zm <= horizon)
            .map(|(_, v)| v)
            .collect();
        let ok = maxima.len() >= 2
            && maxima[0] < 1.0
            && maxima.windows(2).all(|w| w[1] < w[0]);
        (ok, maxima)
    };

    let (tb_z, _, tb_p) = tb_trace(INTERACTIONS[1]);
    let (tb_ok, tb_maxima) = decreasing(&tb_z, &tb_p);
    let trace = &BPM_RUNS[1].trace;
    let (bpm_ok, bpm_maxima) = decreasing(&trace.z_mm, &trace.imbalance_modal);

    report(
        "05 damped-regime",
        tb_ok && bpm_ok,
        &format!(
            "tight-binding maxima {:?}, wave maxima {:?} (each must decrease)",
            tb_maxima.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
            bpm_maxima.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_06_coupling_characterization() {
    let kappa8 = coupling_vs_distance(&material(), &channel(), 2e-3, 8.0).unwrap();
    let kappa_err = (kappa8 / 0.3907 - 1.0).abs();
    let fit = DESIGNER.fit();
    let gamma_err = (fit.gamma / 0.6 - 1.0).abs();
    report(
        "06 coupling-characterization",
        kappa_err <= 0.10 && gamma_err <= 0.15,
        &format!(
            "kappa(8um) = {kappa8:.4} /mm (rel err {kappa_err:.3}, tol 0.10), \
             gamma = {:.4} /um (rel err {gamma_err:.3}, tol 0.15), fit rms {:.4}",
            fit.gamma, fit.rms_residual
        ),
    );
}

#[test]
fn criterion_07_two_boson_closed_forms() {
    // (a) closed forms against the exact N = 2 chain on random triples.
    let mut rng = ChaCha8Rng::seed_from_u64(7777);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let j = rng.random_range(0.05..1.5);
        let u = rng.random_range(-4.0..4.0);
        let t = rng.random_range(0.0..120.0);
        let params = TwoBosonParams::new(j, u).unwrap();
        let want = closed_form_probs(&params, t);
        let coeffs = build_coefficients(&ModelParams::new(2, j, u).unwrap());
        let got = SpectralPropagator::new(&coeffs)
            .advance(&FockState::delta(2, 0).unwrap(), t)
            .occupation_probabilities();
        for k in 0..3 {
            worst = worst.max((got[k] - want[k]).abs());
        }
    }

    // (b) pair-probability floor 1 - 2 J^2 / M^2 at its analytic minimum.
    let params = TwoBosonParams::new(HOPPING, 0.35).unwrap();
    let m = params.m();
    let floor_want = 1.0 - 2.0 * HOPPING * HOPPING / (m * m);
    let floor_dev = (p_pair(&params, PI / (2.0 * m)) - floor_want).abs();

    // (c) qualitative features: tunneling period grows with U/J, and the
    // pair floor rises from 0.5 (U = 0) to 0.9 (U/J = 8).
    let half_transfer = |u_over_j: f64| {
        let p = TwoBosonParams::new(HOPPING, u_over_j * HOPPING).unwrap();
        let dt = 1e-3 / HOPPING;
        let mut t = dt;
        while p_right(&p, t) > 0.5 {
            t += dt;
        }
        t
    };
    let (t0, t4, t8) = (half_transfer(0.0), half_transfer(4.0), half_transfer(8.0));
    let floor_at = |u_over_j: f64| {
        let p = TwoBosonParams::new(HOPPING, u_over_j * HOPPING).unwrap();
        p_pair(&p, PI / (2.0 * p.m()))
    };
    let qualitative = t4 > t0
        && t8 > t4
        && (floor_at(0.0) - 0.5).abs() <= 1e-9
        && (floor_at(8.0) - 0.9).abs() <= 1e-9;

    report(
        "07 two-boson-closed-forms",
        worst <= 1e-9 && floor_dev <= 1e-9 && qualitative,
        &format!(
            "max |closed form - chain| = {worst:.2e} over 100 samples (tol 1e-9), \
             p2 floor dev {floor_dev:.2e}, half-transfer times ({t0:.1}, {t4:.1}, {t8:.1}) mm, \
             floors (0.5, 0.9) reproduced"
        ),
    );
}

#[test]
fn criterion_08_spectrum_equispacing() {
    // Uniform gaps 2J within 1e-10 J against a brute-force dense Jacobi
    // diagonalization, for several particle numbers.
    let mut worst_gap = 0.0f64;
    let mut worst_xcheck = 0.0f64;
    for &n in &[1usize, 2, 5, 9] {
        let coeffs = build_coefficients(&ModelParams::new(n, HOPPING, 0.0).unwrap());
        let values = spectrum(&coeffs);
        for w in values.windows(2) {
            worst_gap = worst_gap.max(((w[1] - w[0]) - 2.0 * HOPPING).abs());
        }
        // Independent oracle: dense symmetric Jacobi rotations.
        let mut dense = vec![vec![0.0; n + 1]; n + 1];
        for l in 0..=n {
            dense[l][l] = coeffs.detuning[l];
            if l < n {
                dense[l][l + 1] = -coeffs.kappa[l];
                dense[l + 1][l] = -coeffs.kappa[l];
            }
        }
        let (brute, _) = jacobi_eigh(&dense);
        for (a, b) in values.iter().zip(&brute) {
            worst_xcheck = worst_xcheck.max((a - b).abs());
        }
    }
    report(
        "08 spectrum-equispacing",
        worst_gap <= 1e-10 * HOPPING && worst_xcheck <= 1e-11,
        &format!(
            "max gap deviation {worst_gap:.2e} (tol {:.1e}), \
             max vs brute-force {worst_xcheck:.2e}",
            1e-10 * HOPPING
        ),
    );
}

#[test]
fn criterion_09_norm_and_power_conservation() {
    // Tight-binding norm drift along the 100 mm traces for all three U.
    let mut norm_drift = 0.0f64;
    for &u in &INTERACTIONS {
        let coeffs = build_coefficients(&ModelParams::new(PARTICLES, HOPPING, u).unwrap());
        let state = FockState::delta(PARTICLES, 0).unwrap();
        let zgrid: Vec<f64> = (0..=500).map(|i| i as f64 * 0.2).collect();
        let trace = evolve(&state, &coeffs, &zgrid).unwrap();
        for s in &trace.states {
            norm_drift = norm_drift.max((s.norm_sqr() - 1.0).abs());
        }
    }

    // Wave power drift for a confined field over 100 mm: a single
    // reference channel carrying its own mode.
    let layout = ArrayLayout::new(
        vec![0.0],
        vec![2e-3],
        8.0,
        channel(),
        material(),
    )
    .unwrap();
    let grid = Grid::for_layout(&layout, 25.0, 512, 0.5, Z_END_MM * UM_PER_MM).unwrap();
    let launch = launch_site(&layout, &grid, 0).unwrap();
    let run = propagate_and_record(
        &layout,
        &grid,
        Some(Absorber::default()),
        launch,
        UM_PER_MM,
        10.0 * UM_PER_MM,
    )
    .unwrap();
    let power_drift = run
        .trace
        .total_power
        .iter()
        .map(|p| (p - 1.0).abs())
        .fold(0.0f64, f64::max);

    report(
        "09 norm-and-power-conservation",
        norm_drift <= 1e-10 && power_drift <= 1e-4,
        &format!(
            "tight-binding norm drift {norm_drift:.2e} (tol 1e-10), \
             confined wave power drift {power_drift:.2e} over 100 mm (tol 1e-4)"
        ),
    );
}

#[test]
fn criterion_10_order_of_accuracy() {
    // Strang order on the analytic displaced-Gaussian (harmonic contrast)
    // reference; the free-diffraction Gaussian alone cannot expose the
    // splitting error because split-step is exact when the potential
    // vanishes. Global L2 field error slope must be 2.0 +- 0.1.
    use fockbeam::bpm::{Field, SplitStep};
    let mat = material();
    let alpha = mat.kinetic_factor();
    let v2 = 3e-6;
    let contrast = move |x: f64| -v2 * mat.reduced_wavelength() * x * x;
    let omega = 2.0 * (alpha * v2).sqrt();
    let m_omega = omega / (2.0 * alpha);
    let x_c = 6.0;
    let z_end = 3000.0;

    let analytic = |xs: &[f64], t: f64| -> Vec<Complex64> {
        xs.iter()
            .map(|&x| {
                let envelope = (m_omega / PI).powf(0.25)
                    * (-(m_omega) * (x - x_c * (omega * t).cos()).powi(2) / 2.0).exp();
                let phase = omega * t / 2.0 + m_omega * x * x_c * (omega * t).sin()
                    - m_omega * x_c * x_c / 4.0 * (2.0 * omega * t).sin();
                Complex64::from_polar(envelope, -phase)
            })
            .collect()
    };

    let dzs = [4.0, 2.0, 1.0, 0.5];
    let mut errors = Vec::new();
    for &dz in &dzs {
        let grid = Grid::new(-80.0, 80.0, 512, dz, z_end).unwrap();
        let xs = grid.xs();
        let mut field = Field { samples: analytic(&xs, 0.0), z: 0.0 };
        let mut stepper = SplitStep::new(&grid, &mat, &contrast, None).unwrap();
        for _ in 0..grid.steps() {
            stepper.step(&mut field).unwrap();
        }
        let want = analytic(&xs, z_end);
        let err = (field
            .samples
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * grid.dx())
        .sqrt();
        errors.push(err);
    }
    let n = dzs.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for (dz, err) in dzs.iter().zip(&errors) {
        st += dz.ln();
        sy += err.ln();
        stt += dz.ln() * dz.ln();
        sty += dz.ln() * err.ln();
    }
    let slope = (n * sty - st * sy) / (n * stt - st * st);
    report(
        "10 order-of-accuracy",
        (slope - 2.0).abs() <= 0.1,
        &format!("error slope {slope:.3} vs dz (tol 2.0 +- 0.1), errors {errors:?}"),
    );
}
