use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Equispaced collocation grid on the torus with `M` retained Fourier modes.
///
/// The retained modes are `-M/2+1, ..., M/2`. Coefficient vectors are stored
/// in FFT order: slot `k` holds mode `k` for `k <= M/2` and mode `k - M`
/// otherwise. Physical samples are stored at `x_k = 2πk/M`, `k = 0..M`,
/// which coincides (mod 2π) with the collocation set `2πj/M`,
/// `j = -M/2+1, ..., M/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GridSpec {
    modes: usize,
}

impl GridSpec {
    pub fn new(modes: usize) -> Result<Self, SpectralError> {
        if modes < 4 || !modes.is_multiple_of(2) {
            return Err(SpectralError::InvalidGrid(modes));
        }
        Ok(Self { modes })
    }

    /// Number of modes (and of collocation points).
    #[inline]
    pub fn modes(&self) -> usize {
        self.modes
    }

    #[inline]
    pub fn nyquist(&self) -> i64 {
        (self.modes / 2) as i64
    }

    /// Largest mode carrying data; the Nyquist mode is pinned to zero.
    #[inline]
    pub fn max_active_mode(&self) -> i64 {
        self.nyquist() - 1
    }

    /// Mode number stored in FFT slot `k`.
    #[inline]
    pub fn mode_of(&self, k: usize) -> i64 {
        debug_assert!(k < self.modes);
        if k <= self.modes / 2 {
            k as i64
        } else {
            k as i64 - self.modes as i64
        }
    }

    /// FFT slot holding `mode`, or `None` if the mode is outside the index set.
    #[inline]
    pub fn slot_of(&self, mode: i64) -> Option<usize> {
        let half = self.nyquist();
        if mode <= -half || mode > half {
            return None;
        }
        Some(mode.rem_euclid(self.modes as i64) as usize)
    }

    /// Wraps an arbitrary integer frequency onto the retained index set.
    #[inline]
    pub fn wrap(&self, freq: i64) -> i64 {
        let m = self.modes as i64;
        let r = freq.rem_euclid(m);
        if r > m / 2 {
            r - m
        } else {
            r
        }
    }

    /// Collocation points `2πk/M` in sample order.
    pub fn points(&self) -> Vec<f64> {
        (0..self.modes)
            .map(|k| 2.0 * PI * k as f64 / self.modes as f64)
            .collect()
    }

    /// Iterator over `(slot, mode)` pairs for the active modes `1 <= |m| <= M/2-1`.
    pub fn active_modes(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        (0..self.modes)
            .map(move |k| (k, self.mode_of(k)))
            .filter(move |&(_, m)| m != 0 && m != self.nyquist())
    }
}

impl TryFrom<usize> for GridSpec {
    type Error = SpectralError;

    fn try_from(value: usize) -> Result<Self, Self::Error> {
        GridSpec::new(value)
    }
}

impl From<GridSpec> for usize {
    fn from(g: GridSpec) -> usize {
        g.modes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_tiny() {
        assert!(GridSpec::new(2).is_err());
        assert!(GridSpec::new(7).is_err());
        assert!(GridSpec::new(0).is_err());
        assert!(GridSpec::new(4).is_ok());
    }

    #[test]
    fn slot_mode_roundtrip() {
        let g = GridSpec::new(8).unwrap();
        let modes: Vec<i64> = (0..8).map(|k| g.mode_of(k)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        for k in 0..8 {
            assert_eq!(g.slot_of(g.mode_of(k)), Some(k));
        }
        assert_eq!(g.slot_of(-4), None);
        assert_eq!(g.slot_of(5), None);
    }

    #[test]
    fn wrap_lands_in_index_set() {
        let g = GridSpec::new(16).unwrap();
        assert_eq!(g.wrap(9), -7);
        assert_eq!(g.wrap(8), 8);
        assert_eq!(g.wrap(-8), 8);
        assert_eq!(g.wrap(-9), 7);
        assert_eq!(g.wrap(16), 0);
    }

    #[test]
    fn active_modes_skip_mean_and_nyquist() {
        let g = GridSpec::new(8).unwrap();
        let active: Vec<i64> = g.active_modes().map(|(_, m)| m).collect();
        assert_eq!(active, vec![1, 2, 3, -3, -2, -1]);
    }
}
