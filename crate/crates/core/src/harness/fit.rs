use serde::Serialize;

/// Least-squares power law `err ≈ C τ^slope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// `ln C`.
    pub intercept: f64,
    pub points: usize,
}

/// Fits `ln err = intercept + slope ln τ` over the pairs with a positive,
/// finite error. Needs at least two distinct step sizes.
pub fn fit_slope(taus: &[f64], errors: &[f64]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(errors)
        .filter(|(t, e)| **t > 0.0 && **e > 0.0 && e.is_finite())
        .map(|(t, e)| (t.ln(), e.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(SlopeFit {
        slope,
        intercept: my - slope * mx,
        points: n,
    })
}

/// Rows with an error below this multiple of the self-convergence floor are
/// excluded from slope fits.
pub const FLOOR_FACTOR: f64 = 100.0;

/// Slope over the rows that converged and sit clearly above `floor`.
pub fn fit_convergence(taus: &[f64], errors: &[Option<f64>], floor: f64) -> Option<SlopeFit> {
    let (t, e): (Vec<f64>, Vec<f64>) = taus
        .iter()
        .zip(errors)
        .filter_map(|(t, e)| e.filter(|e| *e >= FLOOR_FACTOR * floor).map(|e| (*t, e)))
        .unzip();
    fit_slope(&t, &e)
}

/// Half-width of the moving window defining the local envelope of a sweep.
pub const ENVELOPE_HALF_WIDTH: usize = 5;
/// A sweep point is a spike when it exceeds its local envelope by this factor.
pub const SPIKE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAnalysis {
    /// Running median of the errors over `±ENVELOPE_HALF_WIDTH` neighbours.
    pub envelope: Vec<Option<f64>>,
    /// Power law fitted to the points at or below their local envelope.
    pub envelope_fit: Option<SlopeFit>,
    /// Indices of points above `SPIKE_FACTOR` times their local envelope.
    pub spikes: Vec<usize>,
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Envelope fit and spike detection for errors sampled at increasing `taus`.
/// Diverged points (`None`) are skipped.
pub fn analyze_sweep(taus: &[f64], errors: &[Option<f64>]) -> SweepAnalysis {
    let n = errors.len();
    let envelope: Vec<Option<f64>> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(ENVELOPE_HALF_WIDTH);
            let hi = (i + ENVELOPE_HALF_WIDTH + 1).min(n);
            let mut w: Vec<f64> = errors[lo..hi].iter().flatten().copied().collect();
            median(&mut w)
        })
        .collect();
    let mut spikes = Vec::new();
    let (mut ft, mut fe) = (Vec::new(), Vec::new());
    for i in 0..n {
        let (Some(e), Some(b)) = (errors[i], envelope[i]) else {
            continue;
        };
        if e > SPIKE_FACTOR * b {
            spikes.push(i);
        } else if e <= b {
            ft.push(taus[i]);
            fe.push(e);
        }
    }
    SweepAnalysis {
        envelope,
        envelope_fit: fit_slope(&ft, &fe),
        spikes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_synthetic_power_laws() {
        let taus: Vec<f64> = (4..=10).map(|k| 2f64.powi(-k)).collect();
        for (c, p) in [(1.0, 2.0), (3.7, 1.0), (0.02, 2.5), (1e-3, 0.5)] {
            let errs: Vec<f64> = taus.iter().map(|t| c * t.powf(p)).collect();
            let fit = fit_slope(&taus, &errs).unwrap();
            assert!((fit.slope - p).abs() < 1e-10, "{fit:?}");
            assert!((fit.intercept - f64::ln(c)).abs() < 1e-9);
            assert_eq!(fit.points, taus.len());
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_slope(&[0.1], &[1.0]).is_none());
        assert!(fit_slope(&[0.1, 0.1], &[1.0, 2.0]).is_none());
        assert!(fit_slope(&[0.1, 0.05], &[0.0, 0.0]).is_none());
    }

    #[test]
    fn convergence_fit_skips_diverged_and_floor_rows() {
        let taus = [0.1, 0.05, 0.025, 0.0125];
        let errs = [None, Some(0.05f64.powi(2)), Some(0.025f64.powi(2)), Some(1e-9)];
        let fit = fit_convergence(&taus, &errs, 1e-10).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-10);
        assert_eq!(fit.points, 2);
    }

    #[test]
    fn detects_isolated_spike() {
        let taus: Vec<f64> = (0..50).map(|i| 0.01 * (1.0 + i as f64 * 0.1)).collect();
        let mut errs: Vec<Option<f64>> = taus.iter().map(|t| Some(t * t)).collect();
        errs[20] = errs[20].map(|e| e * 50.0);
        errs[30] = None;
        let a = analyze_sweep(&taus, &errs);
        assert_eq!(a.spikes, vec![20]);
        assert!((a.envelope_fit.unwrap().slope - 2.0).abs() < 1e-10);
    }

    #[test]
    fn zero_errors_give_no_spikes() {
        let taus = [0.1, 0.2, 0.3];
        let a = analyze_sweep(&taus, &[Some(0.0); 3]);
        assert!(a.spikes.is_empty());
        assert!(a.envelope_fit.is_none());
    }
}
