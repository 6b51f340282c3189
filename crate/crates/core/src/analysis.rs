//! Small estimators shared by the comparison tooling: oscillation period
//! from zero crossings and interior extrema of sampled traces. Zero
//! crossings are robust for records holding only a few periods, which is
//! the regime here.

/// Linear-interpolation zero crossings of a sampled signal.
pub fn zero_crossings(z: &[f64], p: &[f64]) -> Vec<f64> {
    assert_eq!(z.len(), p.len());
    let mut out = Vec::new();
    for i in 0..p.len().saturating_sub(1) {
        if p[i] == 0.0 {
            out.push(z[i]);
        } else if p[i] * p[i + 1] < 0.0 {
            let t = p[i] / (p[i] - p[i + 1]);
            out.push(z[i] + t * (z[i + 1] - z[i]));
        }
    }
    out
}

/// Oscillation period as twice the mean spacing of successive zero
/// crossings; needs at least two crossings.
pub fn period_from_zero_crossings(z: &[f64], p: &[f64]) -> Option<f64> {
    let crossings = zero_crossings(z, p);
    if crossings.len() < 2 {
        return None;
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    Some(2.0 * span / (crossings.len() - 1) as f64)
}

/// Strict interior maxima (z, value) of a sampled trace.
pub fn interior_maxima(z: &[f64], p: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..p.len().saturating_sub(1) {
        if p[i] > p[i - 1] && p[i] > p[i + 1] {
            out.push((z[i], p[i]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn recovers_cosine_period() {
        let t = 7.3;
        let z: Vec<f64> = (0..4000).map(|i| i as f64 * 0.01).collect();
        let p: Vec<f64> = z.iter().map(|&x| (2.0 * PI * x / t).cos()).collect();
        let period = period_from_zero_crossings(&z, &p).unwrap();
        assert_abs_diff_eq!(period, t, epsilon = 1e-4);
    }

    #[test]
    fn too_few_crossings_is_none() {
        let z = [0.0, 1.0, 2.0];
        let p = [1.0, 0.5, 0.2];
        assert!(period_from_zero_crossings(&z, &p).is_none());
    }

    #[test]
    fn finds_interior_maxima_in_order() {
        let z: Vec<f64> = (0..1000).map(|i| i as f64 * 0.01).collect();
        let p: Vec<f64> = z.iter().map(|&x| (-0.2 * x).exp() * (3.0 * x).cos()).collect();
        let maxima = interior_maxima(&z, &p);
        assert!(maxima.len() >= 3);
        for w in maxima.windows(2) {
            assert!(w[1].1 < w[0].1, "damped maxima must decrease");
        }
    }
}
