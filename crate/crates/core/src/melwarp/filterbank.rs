use super::config::FeatureConfig;
use super::scale::mel_unchecked;
use crate::error::{Error, Result};

/// Triangular filters evaluated at (possibly warped) DFT-bin Mel coordinates.
///
/// Triangle placement is fixed in the normalized Mel axis; the warp lives
/// entirely in the bin coordinates passed to [`build_filterbank`].
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    weights: Vec<Vec<f64>>,
    centers_mel: Vec<f64>,
}

impl MelFilterbank {
    pub fn num_filters(&self) -> usize {
        self.weights.len()
    }

    pub fn num_bins(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn centers_mel(&self) -> &[f64] {
        &self.centers_mel
    }

    /// First and last bin with positive weight in filter `j`.
    pub fn support(&self, j: usize) -> Option<(usize, usize)> {
        let row = &self.weights[j];
        let first = row.iter().position(|&w| w > 0.0)?;
        let last = row.iter().rposition(|&w| w > 0.0)?;
        Some((first, last))
    }

    /// Highest bin index with positive weight in any filter.
    pub fn top_contributing_bin(&self) -> Option<usize> {
        (0..self.num_filters()).filter_map(|j| self.support(j).map(|s| s.1)).max()
    }

    /// Filter energies `E_j = sum_k w[j][k] * power[k]`.
    pub fn apply(&self, power: &[f64], out: &mut [f64]) {
        debug_assert_eq!(power.len(), self.num_bins());
        for (e, row) in out.iter_mut().zip(&self.weights) {
            *e = row.iter().zip(power).map(|(w, p)| w * p).sum();
        }
    }
}

/// Builds `cfg.num_filters` triangles with edges equally spaced in Mel over
/// `[mel(lo_freq), mel(hi_freq)]` and samples each at `bin_mels`.
pub fn build_filterbank(cfg: &FeatureConfig, bin_mels: &[f64]) -> Result<MelFilterbank> {
    if cfg.num_filters == 0 {
        return Err(Error::InvalidConfig("num_filters must be positive".into()));
    }
    if bin_mels.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::InvalidConfig("bin coordinates must be strictly ascending".into()));
    }
    let lo = mel_unchecked(cfg.lo_freq);
    let hi = mel_unchecked(cfg.hi_freq);
    let step = (hi - lo) / (cfg.num_filters + 1) as f64;
    let edge = |i: usize| lo + i as f64 * step;

    let mut weights = Vec::with_capacity(cfg.num_filters);
    let mut centers_mel = Vec::with_capacity(cfg.num_filters);
    for j in 0..cfg.num_filters {
        let (left, center, right) = (edge(j), edge(j + 1), edge(j + 2));
        let row: Vec<f64> = bin_mels
            .iter()
            .map(|&m| {
                if m > left && m <= center {
                    (m - left) / (center - left)
                } else if m > center && m < right {
                    (right - m) / (right - center)
                } else {
                    0.0
                }
            })
            .collect();
        if !row.iter().any(|&w| w > 0.0) {
            return Err(Error::EmptyFilter { index: j });
        }
        weights.push(row);
        centers_mel.push(center);
    }
    Ok(MelFilterbank {
        weights,
        centers_mel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melwarp::warp::{compute_warp, from_raw_delta, warp_bin_mels, WarpSpec};

    fn bank(cfg: &FeatureConfig, warp: &WarpSpec) -> Result<MelFilterbank> {
        build_filterbank(cfg, &warp_bin_mels(cfg.dft_size, cfg.sample_rate, warp))
    }

    #[test]
    fn defaults_have_no_empty_rows() {
        let cfg = FeatureConfig::baseline();
        let fb = bank(&cfg, &WarpSpec::identity(100.0)).unwrap();
        assert_eq!(fb.num_filters(), 23);
        assert_eq!(fb.num_bins(), 257);
        for j in 0..23 {
            assert!(fb.support(j).is_some());
        }
        assert!(fb.weights().iter().flatten().all(|&w| (0.0..=1.0).contains(&w)));
    }

    #[test]
    fn centers_equally_spaced() {
        let cfg = FeatureConfig::baseline();
        let fb = bank(&cfg, &WarpSpec::identity(100.0)).unwrap();
        let c = fb.centers_mel();
        let step = c[1] - c[0];
        for p in c.windows(2) {
            assert!((p[1] - p[0] - step).abs() < 1e-9);
        }
        let lo = mel_unchecked(20.0);
        assert!((c[0] - (lo + step)).abs() < 1e-9);
    }

    #[test]
    fn max_upward_shift_stays_below_nyquist() {
        let cfg = FeatureConfig::warped();
        let fb = bank(&cfg, &from_raw_delta(100.0, 100.0, 250.0)).unwrap();
        let top = fb.top_contributing_bin().unwrap();
        let hz = top as f64 * 16_000.0 / 512.0;
        assert!(hz <= 8_000.0);
        // the top edge maps to ~7.91 kHz, so the Nyquist bin itself carries no weight
        assert!(top < 256);
    }

    #[test]
    fn vowel_demo_config_builds() {
        let cfg = FeatureConfig::vowel_demo();
        bank(&cfg, &WarpSpec::identity(100.0)).unwrap();
        bank(&cfg, &compute_warp(270.0, 100.0).unwrap()).unwrap();
    }

    #[test]
    fn too_many_filters_is_empty_filter_error() {
        let mut cfg = FeatureConfig::baseline();
        // 23 filters squeezed into 20-100 Hz are narrower than one bin
        cfg.hi_freq = 100.0;
        let err = bank(&cfg, &WarpSpec::identity(100.0)).unwrap_err();
        assert!(matches!(err, Error::EmptyFilter { index: 0 }));
    }

    #[test]
    fn shifting_bins_down_moves_energy_up_the_filters() {
        // A positive shift lowers every bin coordinate, so a given filter now
        // draws from higher physical bins.
        let cfg = FeatureConfig::warped();
        let plain = bank(&cfg, &WarpSpec::identity(100.0)).unwrap();
        let shifted = bank(&cfg, &compute_warp(200.0, 100.0).unwrap()).unwrap();
        for j in 0..cfg.num_filters {
            assert!(shifted.support(j).unwrap().0 >= plain.support(j).unwrap().0);
        }
    }

    #[test]
    fn unsorted_coordinates_rejected() {
        let cfg = FeatureConfig::baseline();
        assert!(build_filterbank(&cfg, &[0.0, 10.0, 5.0]).is_err());
    }
}
