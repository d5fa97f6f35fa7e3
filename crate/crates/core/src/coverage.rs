//! SNR coverage of an indoor MS under Nakagami-m fading.
//!
//! The MS sits at distance `d_a + d_n` from the BS at normal incidence. It is
//! LoS with probability [`p_los_at_distance`]; each state has its own
//! path-loss exponent and Nakagami shape. Coverage is the probability that
//! the instantaneous SNR exceeds the threshold, averaged over both states.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::diffraction::fresnel_radius;
use crate::geometry::{Point2D, SceneGeometry};
use crate::los::{self, CLEARANCE_RATIO};
use crate::special::gamma_q;
use crate::{wavelength, Error, Result};

/// Trials per independently seeded Monte Carlo block.
const MC_BLOCK: usize = 8192;

/// Nakagami shapes and path-loss exponents for the LoS and NLoS states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingModel {
    pub m_los: f64,
    pub m_nlos: f64,
    pub n_los: f64,
    pub n_nlos: f64,
}

impl Default for FadingModel {
    fn default() -> Self {
        Self {
            m_los: 10.0,
            m_nlos: 1.0,
            n_los: 1.2,
            n_nlos: 2.9,
        }
    }
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("m_los", self.m_los), ("m_nlos", self.m_nlos)] {
            if !(m.is_finite() && m >= 0.5) {
                return Err(Error::Domain(format!("{name} must be >= 0.5, got {m}")));
            }
        }
        for (name, n) in [("n_los", self.n_los), ("n_nlos", self.n_nlos)] {
            if !(n > 0.5 && n < 6.0) {
                return Err(Error::Domain(format!("{name} must lie in (0.5, 6), got {n}")));
            }
        }
        Ok(())
    }
}

/// Transmit power, noise floor and SNR threshold for one carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub noise_floor_dbm: f64,
    pub snr_threshold_db: f64,
    pub frequency_hz: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            tx_power_dbm: 30.0,
            noise_floor_dbm: -100.0,
            snr_threshold_db: -5.0,
            frequency_hz: 28e9,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.tx_power_dbm.is_finite()
            && self.noise_floor_dbm.is_finite()
            && self.snr_threshold_db.is_finite())
        {
            return Err(Error::Domain("link budget values must be finite".into()));
        }
        if self.noise_floor_dbm >= self.tx_power_dbm {
            return Err(Error::Domain("noise floor must lie below transmit power".into()));
        }
        wavelength(self.frequency_hz).map(|_| ())
    }

    pub fn snr_threshold(&self) -> f64 {
        db_to_linear(self.snr_threshold_db)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub p_cov: f64,
    pub p_los: f64,
    pub snr_los_db: f64,
    pub snr_nlos_db: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Mean received SNR (linear) at distance `d` with path-loss exponent `n`:
/// `λ²/(16π²) · P_t / dⁿ / N`.
pub fn mean_snr(d: f64, exponent: f64, budget: &LinkBudget) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {d}")));
    }
    budget.validate()?;
    let lambda = wavelength(budget.frequency_hz)?;
    let gain = lambda * lambda / (16.0 * PI * PI) / d.powf(exponent);
    Ok(gain * db_to_linear(budget.tx_power_dbm - budget.noise_floor_dbm))
}

/// LoS probability for an MS on the segment at depth `d_n` behind the
/// window, BS at normal incidence `d_a` in front of it:
/// `((d_a + d_n)/d_n) · (L_w − 1.2·r_d)/d_a`, clamped to `[0, 1]`.
///
/// This is the LoS width `2φ(d_a + d_n)` divided by a segment width equal to
/// `d_n`, which matches [`p_los_segment_oracle`] on a room of side `d_n`.
pub fn p_los_at_distance(bs_distance: f64, ms_depth: f64, window_width: f64, frequency: f64) -> Result<f64> {
    if !(window_width.is_finite() && window_width > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "window width must be positive, got {window_width}"
        )));
    }
    let rd = fresnel_radius(bs_distance, ms_depth, wavelength(frequency)?)?;
    let p = (bs_distance + ms_depth) / ms_depth * (window_width - 2.0 * CLEARANCE_RATIO * rd)
        / bs_distance;
    Ok(p.clamp(0.0, 1.0))
}

/// Fraction of `samples` evenly spaced MS positions on the back wall of a
/// room of side `d_n` that pass the per-point LoS test.
pub fn p_los_segment_oracle(
    bs_distance: f64,
    ms_depth: f64,
    window_width: f64,
    frequency: f64,
    samples: usize,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Domain("segment oracle needs at least one sample".into()));
    }
    let scene = SceneGeometry::new(ms_depth, window_width, bs_distance, 0.0)?;
    let half = ms_depth / 2.0;
    let step = ms_depth / samples as f64;
    let mut hits = 0usize;
    for j in 0..samples {
        let ms = Point2D::new(ms_depth, -half + (j as f64 + 0.5) * step);
        if los::is_los(&scene, &ms, frequency)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// `P(γ > γ_T)` for Gamma-distributed power with shape `m` and mean
/// `mean_snr`: `Q(m, m·γ_T/γ̄)`.
pub fn nakagami_ccdf(m: f64, mean_snr: f64, threshold: f64) -> Result<f64> {
    if !(m.is_finite() && m >= 0.5) {
        return Err(Error::Domain(format!("Nakagami shape must be >= 0.5, got {m}")));
    }
    if !(mean_snr.is_finite() && mean_snr > 0.0) {
        return Err(Error::Domain(format!("mean SNR must be positive, got {mean_snr}")));
    }
    if !(threshold >= 0.0) {
        return Err(Error::Domain(format!("threshold must be >= 0, got {threshold}")));
    }
    gamma_q(m, m * threshold / mean_snr)
}

/// Coverage for an explicit LoS probability and state mean SNRs (linear).
pub fn coverage_given_states(
    p_los: f64,
    snr_los: f64,
    snr_nlos: f64,
    fading: &FadingModel,
    threshold: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_los) {
        return Err(Error::Domain(format!("LoS probability must lie in [0, 1], got {p_los}")));
    }
    fading.validate()?;
    let los = nakagami_ccdf(fading.m_los, snr_los, threshold)?;
    let nlos = nakagami_ccdf(fading.m_nlos, snr_nlos, threshold)?;
    Ok((los * p_los + nlos * (1.0 - p_los)).clamp(0.0, 1.0))
}

pub fn coverage_probability(
    bs_distance: f64,
    ms_depth: f64,
    window_width: f64,
    fading: &FadingModel,
    budget: &LinkBudget,
) -> Result<CoverageResult> {
    fading.validate()?;
    let p_los = p_los_at_distance(bs_distance, ms_depth, window_width, budget.frequency_hz)?;
    let d = bs_distance + ms_depth;
    let snr_los = mean_snr(d, fading.n_los, budget)?;
    let snr_nlos = mean_snr(d, fading.n_nlos, budget)?;
    let p_cov = coverage_given_states(p_los, snr_los, snr_nlos, fading, budget.snr_threshold())?;
    Ok(CoverageResult {
        p_cov,
        p_los,
        snr_los_db: linear_to_db(snr_los),
        snr_nlos_db: linear_to_db(snr_nlos),
    })
}

/// Unit-mean fading power gain, `Gamma(m, 1/m)`.
pub fn fading_gain_distribution(m: f64) -> Result<Gamma<f64>> {
    Gamma::new(m, 1.0 / m).map_err(|e| Error::Domain(format!("Nakagami shape {m}: {e}")))
}

/// Monte Carlo estimate of [`coverage_probability`].
///
/// Each trial draws the LoS state, then a `Gamma(m, 1/m)` power gain for that
/// state, and counts `gain·γ̄ > γ_T`. Trials are split into fixed blocks of
/// 8192; block `k` runs ChaCha8 seeded with `seed` on stream `k`, so the
/// estimate depends only on `seed` and `trials`, not on the thread count.
pub fn coverage_mc_oracle(
    bs_distance: f64,
    ms_depth: f64,
    window_width: f64,
    fading: &FadingModel,
    budget: &LinkBudget,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials < 10_000 {
        return Err(Error::Domain(format!("Monte Carlo needs >= 10000 trials, got {trials}")));
    }
    fading.validate()?;
    let p_los = p_los_at_distance(bs_distance, ms_depth, window_width, budget.frequency_hz)?;
    let d = bs_distance + ms_depth;
    let snr_los = mean_snr(d, fading.n_los, budget)?;
    let snr_nlos = mean_snr(d, fading.n_nlos, budget)?;
    let threshold = budget.snr_threshold();
    let los_gain = fading_gain_distribution(fading.m_los)?;
    let nlos_gain = fading_gain_distribution(fading.m_nlos)?;

    let blocks = trials.div_ceil(MC_BLOCK);
    let covered: u64 = (0..blocks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = MC_BLOCK.min(trials - k * MC_BLOCK);
            let mut hits = 0u64;
            for _ in 0..len {
                let snr = if rng.random::<f64>() < p_los {
                    los_gain.sample(&mut rng) * snr_los
                } else {
                    nlos_gain.sample(&mut rng) * snr_nlos
                };
                if snr > threshold {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(covered as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn budget() -> LinkBudget {
        LinkBudget::default()
    }

    #[test]
    fn snr_unit_geometry() {
        // λ = 4π makes λ²/(16π²) = 1.
        let b = LinkBudget {
            frequency_hz: crate::SPEED_OF_LIGHT / (4.0 * PI),
            ..budget()
        };
        assert_relative_eq!(linear_to_db(mean_snr(1.0, 2.0, &b).unwrap()), 130.0, epsilon = 1e-9);
    }

    #[test]
    fn snr_matches_db_budget() {
        let snr_db = linear_to_db(mean_snr(25.0, 1.2, &budget()).unwrap());
        let lambda = wavelength(28e9).unwrap();
        let by_hand = 130.0 - 20.0 * (4.0 * PI / lambda).log10() - 12.0 * 25f64.log10();
        assert_relative_eq!(snr_db, by_hand, epsilon = 1e-9);
        assert_relative_eq!(snr_db, 51.84, epsilon = 0.01);
    }

    #[test]
    fn snr_inverse_square() {
        let a = mean_snr(10.0, 2.0, &budget()).unwrap();
        let b = mean_snr(20.0, 2.0, &budget()).unwrap();
        assert_relative_eq!(linear_to_db(a) - linear_to_db(b), 6.0206, epsilon = 1e-4);
        assert!(mean_snr(0.0, 2.0, &budget()).is_err());
    }

    #[test]
    fn p_los_at_distance_vanishes_when_clearance_fills_window() {
        let lambda = wavelength(28e9).unwrap();
        let rd = fresnel_radius(5.0, 20.0, lambda).unwrap();
        let p = p_los_at_distance(5.0, 20.0, 1.2 * rd * (1.0 + 1e-12), 28e9).unwrap();
        assert!(p < 1e-9);
        assert_eq!(p_los_at_distance(5.0, 20.0, 1.2 * rd * 0.5, 28e9).unwrap(), 0.0);
    }

    #[test]
    fn p_los_at_distance_matches_segment_oracle() {
        for &da in &[2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
            for &lw in &[1.0, 2.0, 3.0] {
                let closed = p_los_at_distance(da, 20.0, lw, 28e9).unwrap();
                let oracle = p_los_segment_oracle(da, 20.0, lw, 28e9, 100_000).unwrap();
                assert!((closed - oracle).abs() <= 0.01, "d_a={da} L_w={lw}: {closed} vs {oracle}");
            }
        }
    }

    #[test]
    fn ccdf_special_cases() {
        for &(mean, thr) in &[(1.0, 0.5), (3.0, 10.0), (0.2, 0.01)] {
            let c = nakagami_ccdf(1.0, mean, thr).unwrap();
            assert!((c - (-thr / mean as f64).exp()).abs() < 1e-12);
        }
        assert_eq!(nakagami_ccdf(10.0, 2.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(nakagami_ccdf(10.0, 3.0, 3.0).unwrap(), 0.457_929_714_5, epsilon = 1e-9);
        assert!(nakagami_ccdf(0.4, 1.0, 1.0).is_err());
        assert!(nakagami_ccdf(1.0, 0.0, 1.0).is_err());
        assert!(nakagami_ccdf(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn coverage_limits() {
        let f = FadingModel::default();
        let certain = coverage_given_states(1.0, 1e6, 1e-6, &f, 1.0).unwrap();
        assert!(certain > 1.0 - 1e-12);
        let hopeless = coverage_given_states(0.0, 1e6, 1e-6, &f, 1.0).unwrap();
        assert!(hopeless < 1e-5);
        let r = coverage_probability(5.0, 20.0, 1e-6, &f, &LinkBudget {
            snr_threshold_db: 80.0,
            ..budget()
        })
        .unwrap();
        assert_eq!(r.p_los, 0.0);
        assert!(r.p_cov < 1e-9);
    }

    #[test]
    fn coverage_trends_for_window_and_distance() {
        let f = FadingModel::default();
        for &thr in &[-5.0, 5.0] {
            let b = LinkBudget { snr_threshold_db: thr, ..budget() };
            let mut prev = [f64::INFINITY; 3];
            for da in (2..=100).step_by(2) {
                let p: Vec<f64> = [1.0, 2.0, 3.0]
                    .iter()
                    .map(|&w| coverage_probability(da as f64, 20.0, w, &f, &b).unwrap().p_cov)
                    .collect();
                assert!(p[2] >= p[1] && p[1] >= p[0]);
                for i in 0..3 {
                    assert!(p[i] <= prev[i] + 1e-15, "not decreasing at d_a = {da}");
                    prev[i] = p[i];
                }
            }
        }
    }

    #[test]
    fn mc_reproducible_and_thread_independent() {
        let f = FadingModel::default();
        let b = LinkBudget { snr_threshold_db: 45.0, ..budget() };
        let a = coverage_mc_oracle(10.0, 20.0, 2.0, &f, &b, 50_000, 7).unwrap();
        let again = coverage_mc_oracle(10.0, 20.0, 2.0, &f, &b, 50_000, 7).unwrap();
        assert_eq!(a.to_bits(), again.to_bits());
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = single.install(|| coverage_mc_oracle(10.0, 20.0, 2.0, &f, &b, 50_000, 7).unwrap());
        assert_eq!(a.to_bits(), serial.to_bits());
        assert!(coverage_mc_oracle(10.0, 20.0, 2.0, &f, &b, 9_999, 7).is_err());
    }

    #[test]
    fn mc_indistinguishable_states() {
        let f = FadingModel { m_los: 1.0, m_nlos: 1.0, n_los: 2.0, n_nlos: 2.0 };
        let b = LinkBudget { snr_threshold_db: 55.0, ..budget() };
        let mean = mean_snr(25.0, 2.0, &b).unwrap();
        let expected = (-b.snr_threshold() / mean).exp();
        let trials = 200_000;
        let se = (expected * (1.0 - expected) / trials as f64).sqrt();
        for &lw in &[0.5, 2.0, 4.0] {
            let mc = coverage_mc_oracle(5.0, 20.0, lw, &f, &b, trials, 11).unwrap();
            assert!((mc - expected).abs() <= 4.0 * se, "L_w={lw}: {mc} vs {expected}");
        }
    }

    #[test]
    fn gamma_gain_has_unit_mean() {
        let trials = 200_000;
        for &m in &[0.5, 1.0, 3.0, 10.0] {
            let dist = fading_gain_distribution(m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let mean: f64 = (0..trials).map(|_| dist.sample(&mut rng)).sum::<f64>() / trials as f64;
            // Var = 1/m.
            let sigma = (1.0 / m).sqrt();
            assert!((mean - 1.0).abs() <= 3.0 * sigma / (trials as f64).sqrt(), "m={m}: {mean}");
        }
    }

    #[test]
    fn analytic_vs_mc_within_three_standard_errors() {
        let f = FadingModel::default();
        // A threshold that puts coverage well inside (0, 1).
        let b = LinkBudget { snr_threshold_db: 40.0, ..budget() };
        let trials = 100_000;
        for da in [2.0, 14.0, 26.0, 38.0, 50.0] {
            for lw in [1.0, 2.0, 3.0, 4.0, 5.0] {
                let exact = coverage_probability(da, 20.0, lw, &f, &b).unwrap().p_cov;
                let mc = coverage_mc_oracle(da, 20.0, lw, &f, &b, trials, 2024).unwrap();
                let se = (exact * (1.0 - exact) / trials as f64).sqrt().max(1e-12);
                assert!((mc - exact).abs() <= 3.0 * se, "d_a={da} L_w={lw}: {mc} vs {exact}");
            }
        }
    }

    proptest! {
        #[test]
        fn ccdf_monotone(m in 0.5f64..20.0, mean in 0.01f64..100.0, thr in 0.0f64..100.0, step in 0.0f64..10.0) {
            let base = nakagami_ccdf(m, mean, thr).unwrap();
            prop_assert!(nakagami_ccdf(m, mean, thr + step).unwrap() <= base + 1e-15);
            prop_assert!(nakagami_ccdf(m, mean * (1.0 + step), thr).unwrap() >= base - 1e-15);
        }

        #[test]
        fn coverage_bounded_and_monotone(
            da in 1.0f64..100.0,
            lw in 0.5f64..5.0,
            extra_w in 0.0f64..2.0,
            tx in 0.0f64..40.0,
            extra_tx in 0.0f64..10.0,
            thr in -10.0f64..60.0,
        ) {
            let f = FadingModel::default();
            let b = LinkBudget { tx_power_dbm: tx, snr_threshold_db: thr, ..budget() };
            let base = coverage_probability(da, 20.0, lw, &f, &b).unwrap().p_cov;
            prop_assert!((0.0..=1.0).contains(&base));
            let wider = coverage_probability(da, 20.0, lw + extra_w, &f, &b).unwrap().p_cov;
            prop_assert!(wider >= base - 1e-12);
            let louder = LinkBudget { tx_power_dbm: tx + extra_tx, ..b };
            prop_assert!(coverage_probability(da, 20.0, lw, &f, &louder).unwrap().p_cov >= base - 1e-12);
        }
    }
}
