//! Tilt-aware link model.
//!
//! SNR on each hop follows a free-space law scaled by the antenna power
//! gains at both ends,
//!
//! ```text
//! SNR = K₀ · D_tx² · D_rx² · g_tx · g_rx · P / (d² σ²)
//! ```
//!
//! where `g` is the normalized radiation pattern evaluated in the direction
//! of the other node, expressed in the antenna's body frame. Because the
//! vehicles carry body-fixed dipoles, the pattern terms are where motion
//! couples into link quality. `K₀` folds the Friis wavelength/reference
//! factor `(λ/4π)²` so SNR values stay physically scaled.

use crate::geometry::{rotate_to_body, Pose};
use crate::kinematics::Trajectory;
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Normalized directivity of an ideal half-wave dipole.
pub const HALF_WAVE_DIPOLE_DIRECTIVITY: f64 = 1.64;

/// Objective value substituted when a link rate collapses below 1e-12,
/// keeping penalized objectives finite near antenna nulls.
pub const ZERO_RATE_CEILING: f64 = 1e12;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("transmitter and receiver positions coincide")]
    CoincidentNodes,
    #[error("trajectory horizons differ: {left} vs {right} samples (Ts {ts_left} vs {ts_right})")]
    HorizonMismatch {
        left: usize,
        right: usize,
        ts_left: f64,
        ts_right: f64,
    },
}

/// Antenna type carried by a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntennaKind {
    HalfWaveDipole,
    Isotropic,
}

/// Radiation pattern plus mounting axis in the carrying body's frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    pub kind: AntennaKind,
    /// Directivity D ≥ 1 (1.64 for the half-wave dipole; a beamforming
    /// array is modeled as isotropic with its array gain here).
    pub directivity: f64,
    /// Unit pattern axis in the body frame; only meaningful for the dipole.
    pub axis_body: Vector3<f64>,
}

impl AntennaPattern {
    /// Half-wave dipole mounted along body z.
    pub fn half_wave_dipole() -> Self {
        Self {
            kind: AntennaKind::HalfWaveDipole,
            directivity: HALF_WAVE_DIPOLE_DIRECTIVITY,
            axis_body: Vector3::z(),
        }
    }

    pub fn isotropic() -> Self {
        Self {
            kind: AntennaKind::Isotropic,
            directivity: 1.0,
            axis_body: Vector3::z(),
        }
    }

    /// Isotropic pattern with beamforming gain `d_b ≥ 1` (base-station
    /// array tracking the relay).
    pub fn beamforming(d_b: f64) -> Self {
        Self {
            kind: AntennaKind::Isotropic,
            directivity: d_b,
            axis_body: Vector3::z(),
        }
    }

    pub fn with_axis(mut self, axis_body: Vector3<f64>) -> Self {
        self.axis_body = axis_body.normalize();
        self
    }

    /// Normalized power gain in `direction_body` (unit vector in the
    /// carrying body's frame); in [0, 1].
    pub fn normalized_gain(&self, direction_body: &Vector3<f64>) -> f64 {
        match self.kind {
            AntennaKind::Isotropic => 1.0,
            AntennaKind::HalfWaveDipole => dipole_gain_about(direction_body, &self.axis_body),
        }
    }
}

/// Normalized half-wave dipole power gain for a unit direction in the
/// antenna frame (axis along +z): `g(θ) = [cos(π/2·cosθ)/sinθ]²`.
///
/// Broadside (θ = 90°) gives 1, the axis (θ = 0) gives 0; the value depends
/// only on the polar angle, so it is symmetric under direction negation.
pub fn dipole_gain(direction_antenna_frame: &Vector3<f64>) -> f64 {
    dipole_gain_about(direction_antenna_frame, &Vector3::z())
}

/// Same pattern about an arbitrary unit axis.
pub fn dipole_gain_about(direction: &Vector3<f64>, axis: &Vector3<f64>) -> f64 {
    debug_assert!(
        (direction.norm() - 1.0).abs() < 1e-6,
        "direction must be unit norm"
    );
    let c = direction.dot(axis).clamp(-1.0, 1.0);
    let s2 = 1.0 - c * c;
    if s2 < 1e-12 {
        // Analytic limit along the axis: the numerator vanishes faster.
        return 0.0;
    }
    let num = (std::f64::consts::FRAC_PI_2 * c).cos();
    (num * num / s2).clamp(0.0, 1.0)
}

/// Physical constants of one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Transmit power P [W].
    pub tx_power_w: f64,
    /// Receiver noise power σ² [W].
    pub noise_w: f64,
    /// Channel gain constant K₀ = (λ/4π)², dimensionless.
    pub k0: f64,
    /// Beamforming gain D_B ≥ 1 applied at a base-station endpoint;
    /// 1.0 on hops that never touch the BS.
    pub bs_beamforming_gain: f64,
}

impl LinkParams {
    pub fn new(tx_power_w: f64, noise_w: f64, k0: f64) -> Self {
        Self {
            tx_power_w,
            noise_w,
            k0,
            bs_beamforming_gain: 1.0,
        }
    }

    pub fn with_bs_gain(mut self, d_b: f64) -> Self {
        self.bs_beamforming_gain = d_b;
        self
    }
}

/// Linear SNR of a single hop between two posed nodes.
///
/// `fading_draw`, when present, multiplies the received power (unit-mean
/// gain from a [`FadingModel`]).
pub fn link_snr(
    tx: &Pose,
    rx: &Pose,
    tx_ant: &AntennaPattern,
    rx_ant: &AntennaPattern,
    params: &LinkParams,
    fading_draw: Option<f64>,
) -> Result<f64, ChannelError> {
    let delta = rx.position - tx.position;
    let dist2 = delta.norm_squared();
    if dist2 < 1e-18 {
        return Err(ChannelError::CoincidentNodes);
    }
    let dir = delta / dist2.sqrt();
    let g_tx = tx_ant.normalized_gain(&rotate_to_body(&tx.orientation, &dir));
    let g_rx = rx_ant.normalized_gain(&rotate_to_body(&rx.orientation, &(-dir)));
    let d2 = tx_ant.directivity * tx_ant.directivity * rx_ant.directivity * rx_ant.directivity;
    let snr =
        params.k0 * d2 * g_tx * g_rx * params.tx_power_w / (dist2 * params.noise_w);
    Ok(snr * fading_draw.unwrap_or(1.0))
}

/// Spectral efficiency [bits/s/Hz] at a given linear SNR.
pub fn rate(snr: f64) -> f64 {
    debug_assert!(snr >= 0.0, "SNR must be non-negative");
    (1.0 + snr).log2()
}

/// End-to-end rate of a two-hop relay: the weaker hop limits the chain.
pub fn end_to_end_rate(snr1: f64, snr2: f64) -> f64 {
    rate(snr1).min(rate(snr2))
}

/// Smooth p-norm surrogate for the inverse end-to-end rate,
/// `(R₁⁻ᵖ + R₂⁻ᵖ)^(1/p)`.
///
/// Sandwiched between `max(1/R₁, 1/R₂)` and `2^(1/p)` times it, so large p
/// approaches the exact inverse min-rate while staying differentiable.
/// Returns [`ZERO_RATE_CEILING`] when either rate falls below 1e-12.
pub fn smooth_objective_term(snr1: f64, snr2: f64, p: u32) -> f64 {
    debug_assert!(p >= 1, "p-norm exponent must be >= 1");
    let r1 = rate(snr1);
    let r2 = rate(snr2);
    if r1 < 1e-12 || r2 < 1e-12 {
        return ZERO_RATE_CEILING;
    }
    let inv1 = 1.0 / r1;
    let inv2 = 1.0 / r2;
    let m = inv1.max(inv2);
    // Factor out the max so the powers stay in [0, 1].
    m * ((inv1 / m).powi(p as i32) + (inv2 / m).powi(p as i32)).powf(1.0 / f64::from(p))
}

/// Multiplicative small-scale/shadowing model on received power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingKind {
    /// Deterministic channel (the default for the tilt-coupling studies).
    None,
    /// Rayleigh envelope: unit-mean exponential power gain.
    Rayleigh,
    /// Log-normal shadowing with the given dB standard deviation,
    /// mean-corrected to a unit-mean power gain.
    LogNormalShadowing { sigma_db: f64 },
}

/// Seeded fading model; draws are keyed on (sample, replicate) so Monte
/// Carlo results are independent of evaluation order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingModel {
    pub kind: FadingKind,
    pub seed: u64,
}

impl FadingModel {
    pub fn none() -> Self {
        Self {
            kind: FadingKind::None,
            seed: 0,
        }
    }

    pub fn rayleigh(seed: u64) -> Self {
        Self {
            kind: FadingKind::Rayleigh,
            seed,
        }
    }

    pub fn log_normal(sigma_db: f64, seed: u64) -> Self {
        Self {
            kind: FadingKind::LogNormalShadowing { sigma_db },
            seed,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.kind, FadingKind::None)
    }

    /// Unit-mean power gains for the two hops at trajectory sample
    /// `sample_idx`, Monte-Carlo replicate `mc_idx`.
    pub fn draw_pair(&self, sample_idx: u64, mc_idx: u64) -> (f64, f64) {
        match self.kind {
            FadingKind::None => (1.0, 1.0),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix64(self.seed, sample_idx, mc_idx));
                (self.draw_one(&mut rng), self.draw_one(&mut rng))
            }
        }
    }

    fn draw_one(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.kind {
            FadingKind::None => 1.0,
            FadingKind::Rayleigh => {
                // Power of a Rayleigh envelope is Exp(1).
                let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                -u.ln()
            }
            FadingKind::LogNormalShadowing { sigma_db } => {
                let ln10_over_10 = std::f64::consts::LN_10 / 10.0;
                // Mean in dB chosen so E[10^(Z/10)] = 1.
                let mu_db = -sigma_db * sigma_db * ln10_over_10 / 2.0;
                let z: f64 = StandardNormal.sample(rng);
                ((mu_db + sigma_db * z) * ln10_over_10).exp()
            }
        }
    }
}

/// SplitMix64-style mixing of the seed with the sample/replicate counters.
fn mix64(seed: u64, a: u64, b: u64) -> u64 {
    let mut x = seed
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// The two-hop relay system: a base station, the relay's dipole, and the
/// peer UAV's dipole, with per-hop link constants.
#[derive(Debug, Clone)]
pub struct RelayChannel {
    pub bs: Pose,
    pub bs_antenna: AntennaPattern,
    pub relay_antenna: AntennaPattern,
    pub peer_antenna: AntennaPattern,
    /// Relay → BS hop (receiver noise σ₀²).
    pub relay_bs_link: LinkParams,
    /// Peer → relay hop (receiver noise σ₁²).
    pub peer_relay_link: LinkParams,
}

impl RelayChannel {
    /// SNR pair (ξ relay→BS, ξ peer→relay) for one geometry snapshot.
    pub fn snr_pair(
        &self,
        relay: &Pose,
        peer: &Pose,
        fading_draws: Option<(f64, f64)>,
    ) -> Result<(f64, f64), ChannelError> {
        let (f1, f2) = fading_draws.unwrap_or((1.0, 1.0));
        let xi_bs = link_snr(
            relay,
            &self.bs,
            &self.relay_antenna,
            &self.bs_antenna,
            &self.relay_bs_link,
            Some(f1),
        )?;
        let xi_peer = link_snr(
            peer,
            relay,
            &self.peer_antenna,
            &self.relay_antenna,
            &self.peer_relay_link,
            Some(f2),
        )?;
        Ok((xi_bs, xi_peer))
    }

    fn check_grids(relay: &Trajectory, peer: &Trajectory) -> Result<(), ChannelError> {
        if relay.len() != peer.len()
            || (relay.sampling_period - peer.sampling_period).abs() > 1e-12
        {
            return Err(ChannelError::HorizonMismatch {
                left: relay.len(),
                right: peer.len(),
                ts_left: relay.sampling_period,
                ts_right: peer.sampling_period,
            });
        }
        Ok(())
    }

    /// Mean end-to-end rate at each sample, averaged over `n_mc` fading
    /// replicates (a single deterministic evaluation when fading is none).
    pub fn mean_rate_trace(
        &self,
        relay_traj: &Trajectory,
        peer_traj: &Trajectory,
        fading: &FadingModel,
        n_mc: usize,
    ) -> Result<Vec<f64>, ChannelError> {
        Self::check_grids(relay_traj, peer_traj)?;
        let draws = if fading.is_deterministic() { 1 } else { n_mc.max(1) };
        let mut trace = Vec::with_capacity(relay_traj.len());
        for (k, (rs, ps)) in relay_traj
            .samples
            .iter()
            .zip(peer_traj.samples.iter())
            .enumerate()
        {
            let relay_pose = Pose::new(rs.position, rs.attitude);
            let peer_pose = Pose::new(ps.position, ps.attitude);
            let mut acc = 0.0;
            for i in 0..draws {
                let pair = fading.draw_pair(k as u64, i as u64);
                let (xi1, xi2) = self.snr_pair(&relay_pose, &peer_pose, Some(pair))?;
                acc += end_to_end_rate(xi1, xi2);
            }
            trace.push(acc / draws as f64);
        }
        Ok(trace)
    }

    /// Expected number of bits (normalized bandwidth) relayed along the
    /// trajectory pair: the trapezoidal time-integral of the Monte-Carlo
    /// mean end-to-end rate.
    pub fn expected_bits(
        &self,
        relay_traj: &Trajectory,
        peer_traj: &Trajectory,
        fading: &FadingModel,
        n_mc: usize,
    ) -> Result<f64, ChannelError> {
        let trace = self.mean_rate_trace(relay_traj, peer_traj, fading, n_mc)?;
        Ok(trapezoid(&trace, relay_traj.sampling_period))
    }

    /// Checks the per-sample connectivity requirement
    /// `Pr(min-hop SNR ≥ γ₀) ≥ 1 − ε` and returns the estimated
    /// probability trace.
    pub fn outage_satisfied(
        &self,
        relay_traj: &Trajectory,
        peer_traj: &Trajectory,
        fading: &FadingModel,
        gamma0: f64,
        epsilon: f64,
        n_mc: usize,
    ) -> Result<OutageReport, ChannelError> {
        assert!(gamma0 > 0.0, "gamma0 must be positive");
        assert!(
            epsilon > 0.0 && epsilon < 1.0,
            "epsilon must lie in (0, 1)"
        );
        Self::check_grids(relay_traj, peer_traj)?;
        let draws = if fading.is_deterministic() { 1 } else { n_mc.max(1) };
        let mut trace = Vec::with_capacity(relay_traj.len());
        let mut satisfied = true;
        for (k, (rs, ps)) in relay_traj
            .samples
            .iter()
            .zip(peer_traj.samples.iter())
            .enumerate()
        {
            let relay_pose = Pose::new(rs.position, rs.attitude);
            let peer_pose = Pose::new(ps.position, ps.attitude);
            let mut hits = 0usize;
            for i in 0..draws {
                let pair = fading.draw_pair(k as u64, i as u64);
                let (xi1, xi2) = self.snr_pair(&relay_pose, &peer_pose, Some(pair))?;
                if xi1.min(xi2) >= gamma0 {
                    hits += 1;
                }
            }
            let prob = hits as f64 / draws as f64;
            satisfied &= prob >= 1.0 - epsilon;
            trace.push(prob);
        }
        Ok(OutageReport {
            satisfied,
            probability_trace: trace,
        })
    }
}

/// Result of [`RelayChannel::outage_satisfied`].
#[derive(Debug, Clone)]
pub struct OutageReport {
    pub satisfied: bool,
    pub probability_trace: Vec<f64>,
}

fn trapezoid(values: &[f64], dt: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    dt * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{attitude_from_acceleration, GRAVITY};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn unit_params() -> LinkParams {
        LinkParams::new(1.0, 1.0, 1.0)
    }

    fn iso_channel(bs_z: f64) -> RelayChannel {
        RelayChannel {
            bs: Pose::level(Vector3::new(0.0, 0.0, bs_z)),
            bs_antenna: AntennaPattern::isotropic(),
            relay_antenna: AntennaPattern::isotropic(),
            peer_antenna: AntennaPattern::isotropic(),
            relay_bs_link: unit_params(),
            peer_relay_link: unit_params(),
        }
    }

    #[test]
    fn dipole_broadside_and_null() {
        assert_relative_eq!(dipole_gain(&Vector3::x()), 1.0, epsilon = 1e-15);
        assert_relative_eq!(dipole_gain(&Vector3::y()), 1.0, epsilon = 1e-15);
        assert_eq!(dipole_gain(&Vector3::z()), 0.0);
        assert_eq!(dipole_gain(&(-Vector3::z())), 0.0);
    }

    #[test]
    fn dipole_at_45_degrees() {
        // Frozen from direct evaluation of cos²(π/(2√2))/0.5, cross-checked
        // against the spherical directivity integral below.
        let d = Vector3::new(1.0, 0.0, 1.0).normalize();
        assert_relative_eq!(dipole_gain(&d), 0.394_300_132_921_186_76, epsilon = 1e-12);
    }

    #[test]
    fn dipole_symmetric_under_negation_and_azimuth() {
        let d = Vector3::new(0.3, -0.5, 0.81).normalize();
        assert_relative_eq!(dipole_gain(&d), dipole_gain(&(-d)), epsilon = 1e-15);
        // Depends only on the polar angle.
        let rot = nalgebra::UnitQuaternion::from_axis_angle(&Vector3::z_axis(), 1.234);
        assert_relative_eq!(
            dipole_gain(&(rot * d)),
            dipole_gain(&d),
            epsilon = 1e-12
        );
    }

    #[test]
    fn dipole_directivity_integral() {
        // ∫ D·g dΩ should equal 4π; midpoint quadrature on a 100×100 grid.
        let (n_th, n_ph) = (100usize, 100usize);
        let mut integral = 0.0;
        for i in 0..n_th {
            let th = std::f64::consts::PI * (i as f64 + 0.5) / n_th as f64;
            for j in 0..n_ph {
                let ph = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_ph as f64;
                let dir = Vector3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
                integral += HALF_WAVE_DIPOLE_DIRECTIVITY
                    * dipole_gain(&dir)
                    * th.sin()
                    * (std::f64::consts::PI / n_th as f64)
                    * (2.0 * std::f64::consts::PI / n_ph as f64);
            }
        }
        let four_pi = 4.0 * std::f64::consts::PI;
        assert!(
            (integral - four_pi).abs() / four_pi < 0.005,
            "integral {integral} vs 4π {four_pi}"
        );
    }

    #[test]
    fn snr_unit_normalization_and_inverse_square() {
        let tx = Pose::level(Vector3::zeros());
        let rx1 = Pose::level(Vector3::new(1.0, 0.0, 0.0));
        let rx2 = Pose::level(Vector3::new(2.0, 0.0, 0.0));
        let iso = AntennaPattern::isotropic();
        let p = unit_params();
        let s1 = link_snr(&tx, &rx1, &iso, &iso, &p, None).unwrap();
        let s2 = link_snr(&tx, &rx2, &iso, &iso, &p, None).unwrap();
        assert_relative_eq!(s1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(s2, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn coincident_nodes_rejected() {
        let tx = Pose::level(Vector3::new(1.0, 2.0, 3.0));
        let iso = AntennaPattern::isotropic();
        assert_eq!(
            link_snr(&tx, &tx, &iso, &iso, &unit_params(), None),
            Err(ChannelError::CoincidentNodes)
        );
    }

    #[test]
    fn hover_above_bs_hits_dipole_null() {
        // Relay hovering directly above the BS with a vertical dipole: the
        // inter-node direction is along the pattern axis, so SNR = 0.
        let hover = attitude_from_acceleration(&Vector3::zeros(), GRAVITY, 0.0).unwrap();
        let relay = Pose::new(Vector3::new(0.0, 0.0, 10.0), hover);
        let bs = Pose::level(Vector3::zeros());
        let snr = link_snr(
            &relay,
            &bs,
            &AntennaPattern::half_wave_dipole(),
            &AntennaPattern::beamforming(2.0),
            &unit_params(),
            None,
        )
        .unwrap();
        assert_eq!(snr, 0.0);
    }

    #[test]
    fn snr_symmetric_under_role_swap() {
        let a = Pose::new(
            Vector3::new(1.0, -2.0, 3.0),
            attitude_from_acceleration(&Vector3::new(1.0, 0.5, 0.0), GRAVITY, 0.0).unwrap(),
        );
        let b = Pose::new(
            Vector3::new(-4.0, 0.0, 7.0),
            attitude_from_acceleration(&Vector3::new(-0.5, 1.0, 0.0), GRAVITY, 0.0).unwrap(),
        );
        let ant_a = AntennaPattern::half_wave_dipole();
        let ant_b = AntennaPattern::half_wave_dipole();
        let p = LinkParams::new(0.5, 1e-9, 1e-4);
        let fwd = link_snr(&a, &b, &ant_a, &ant_b, &p, None).unwrap();
        let rev = link_snr(&b, &a, &ant_b, &ant_a, &p, None).unwrap();
        assert_relative_eq!(fwd, rev, epsilon = 1e-12);
    }

    #[test]
    fn rate_table() {
        assert_eq!(rate(0.0), 0.0);
        assert_relative_eq!(rate(1.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(rate(3.0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(end_to_end_rate(3.0, 3.0), 2.0, epsilon = 1e-15);
        assert_eq!(end_to_end_rate(3.0, 0.0), 0.0);
        assert_relative_eq!(end_to_end_rate(1.0, 3.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn smooth_term_values() {
        assert_relative_eq!(smooth_objective_term(3.0, 3.0, 1), 1.0, epsilon = 1e-12);
        // Large p approaches 1/min-rate.
        assert_relative_eq!(smooth_objective_term(3.0, 3.0, 64), 0.5, epsilon = 1e-2);
        assert_eq!(smooth_objective_term(0.0, 3.0, 8), ZERO_RATE_CEILING);
        // p = 8 with rates (1, 2): within the 2^(1/8) sandwich of max = 1.
        let term = smooth_objective_term(1.0, 3.0, 8);
        assert!(term >= 1.0 && term <= 2f64.powf(1.0 / 8.0));
    }

    #[test]
    fn expected_bits_constant_snr() {
        // SNR 3 on both hops for 10 s: rate 2 integrates to 20 bits.
        let relay = Trajectory::hover(Vector3::new(0.0, 0.0, 1.0), 0.5, 10.0, GRAVITY).unwrap();
        let peer = Trajectory::hover(Vector3::new(0.0, 2.0, 1.0), 0.5, 10.0, GRAVITY).unwrap();
        let mut ch = iso_channel(1.0);
        // Place BS 1 m from the relay; scale powers for SNR exactly 3.
        ch.bs = Pose::level(Vector3::new(1.0, 0.0, 1.0));
        ch.relay_bs_link = LinkParams::new(3.0, 1.0, 1.0);
        ch.peer_relay_link = LinkParams::new(12.0, 1.0, 1.0); // distance 2 m
        let bits = ch
            .expected_bits(&relay, &peer, &FadingModel::none(), 1)
            .unwrap();
        assert_relative_eq!(bits, 20.0, epsilon = 1e-9);
    }

    #[test]
    fn expected_bits_zero_duration() {
        let relay = Trajectory::hover(Vector3::zeros(), 0.5, 0.0, GRAVITY).unwrap();
        let peer = Trajectory::hover(Vector3::new(2.0, 0.0, 0.0), 0.5, 0.0, GRAVITY).unwrap();
        let mut ch = iso_channel(0.0);
        ch.bs = Pose::level(Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(
            ch.expected_bits(&relay, &peer, &FadingModel::none(), 1)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn expected_bits_independent_of_n_mc_when_deterministic() {
        let relay = Trajectory::hover(Vector3::new(0.0, 0.0, 1.0), 1.0, 4.0, GRAVITY).unwrap();
        let peer = Trajectory::hover(Vector3::new(3.0, 0.0, 1.0), 1.0, 4.0, GRAVITY).unwrap();
        let mut ch = iso_channel(1.0);
        ch.bs = Pose::level(Vector3::new(-2.0, 0.0, 1.0));
        let b1 = ch
            .expected_bits(&relay, &peer, &FadingModel::none(), 1)
            .unwrap();
        let b2 = ch
            .expected_bits(&relay, &peer, &FadingModel::none(), 5000)
            .unwrap();
        assert_eq!(b1, b2);
    }

    #[test]
    fn horizon_mismatch_detected() {
        let relay = Trajectory::hover(Vector3::zeros(), 0.5, 2.0, GRAVITY).unwrap();
        let peer = Trajectory::hover(Vector3::new(1.0, 0.0, 0.0), 0.5, 3.0, GRAVITY).unwrap();
        let ch = iso_channel(0.0);
        assert!(matches!(
            ch.expected_bits(&relay, &peer, &FadingModel::none(), 1),
            Err(ChannelError::HorizonMismatch { .. })
        ));
    }

    #[test]
    fn rayleigh_mean_rate_matches_quadrature() {
        // Oracle: E[log2(1 + 3X)], X ~ Exp(1), by numerical integration
        // (1.668918331999242, confirmed against exp(1/3)E₁(1/3)/ln 2).
        let relay = Trajectory::hover(Vector3::new(0.0, 0.0, 1.0), 1.0, 1.0, GRAVITY).unwrap();
        let peer = Trajectory::hover(Vector3::new(0.0, 1.0, 1.0), 1.0, 1.0, GRAVITY).unwrap();
        let mut ch = iso_channel(1.0);
        ch.bs = Pose::level(Vector3::new(1.0, 0.0, 1.0));
        ch.relay_bs_link = LinkParams::new(3.0, 1.0, 1.0);
        // Make the peer hop overwhelmingly strong so the BS hop dominates.
        ch.peer_relay_link = LinkParams::new(3e12, 1.0, 1.0);
        let trace = ch
            .mean_rate_trace(&relay, &peer, &FadingModel::rayleigh(42), 100_000)
            .unwrap();
        let expected = 1.668_918_331_999_242;
        for v in &trace {
            assert!(
                (v - expected).abs() / expected < 0.01,
                "MC mean rate {v} vs quadrature {expected}"
            );
        }
    }

    #[test]
    fn outage_deterministic_indicator() {
        let relay = Trajectory::hover(Vector3::new(0.0, 0.0, 1.0), 0.5, 2.0, GRAVITY).unwrap();
        let peer = Trajectory::hover(Vector3::new(1.0, 0.0, 1.0), 0.5, 2.0, GRAVITY).unwrap();
        let mut ch = iso_channel(1.0);
        ch.bs = Pose::level(Vector3::new(-1.0, 0.0, 1.0));
        ch.relay_bs_link = LinkParams::new(4.0, 1.0, 1.0);
        ch.peer_relay_link = LinkParams::new(4.0, 1.0, 1.0);
        // Deterministic SNR 4 on both hops.
        let report = ch
            .outage_satisfied(&relay, &peer, &FadingModel::none(), 3.0, 0.05, 1)
            .unwrap();
        assert!(report.satisfied);
        assert!(report.probability_trace.iter().all(|p| *p == 1.0));
        let fail = ch
            .outage_satisfied(&relay, &peer, &FadingModel::none(), 5.0, 0.05, 1)
            .unwrap();
        assert!(!fail.satisfied);
        assert!(fail.probability_trace.iter().all(|p| *p == 0.0));
    }

    #[test]
    fn outage_rayleigh_boundary_margins() {
        // Closed-form Rayleigh exceedance: Pr(X·S ≥ γ₀) = exp(−γ₀/S).
        // With γ₀ = 1, ε = 0.1 the boundary mean SNR is −1/ln(0.9);
        // ±10 % margins push the probability to 0.9087 / 0.8895.
        let boundary_snr = -1.0 / 0.9f64.ln();
        let relay = Trajectory::hover(Vector3::new(0.0, 0.0, 1.0), 1.0, 1.0, GRAVITY).unwrap();
        let peer = Trajectory::hover(Vector3::new(0.0, 1.0, 1.0), 1.0, 1.0, GRAVITY).unwrap();
        let mut run = |snr_scale: f64| {
            let mut ch = iso_channel(1.0);
            ch.bs = Pose::level(Vector3::new(1.0, 0.0, 1.0));
            ch.relay_bs_link = LinkParams::new(boundary_snr * snr_scale, 1.0, 1.0);
            ch.peer_relay_link = LinkParams::new(1e14, 1.0, 1.0);
            ch.outage_satisfied(&relay, &peer, &FadingModel::rayleigh(7), 1.0, 0.1, 100_000)
                .unwrap()
        };
        assert!(run(1.1).satisfied);
        assert!(!run(0.9).satisfied);
    }

    proptest! {
        // Sandwich bound of the smooth max over random SNR pairs.
        #[test]
        fn smooth_term_sandwich(
            snr1 in 1e-3..1e4f64,
            snr2 in 1e-3..1e4f64,
            p_idx in 0usize..5,
        ) {
            let p = [1u32, 2, 4, 8, 16][p_idx];
            let term = smooth_objective_term(snr1, snr2, p);
            let m = (1.0 / rate(snr1)).max(1.0 / rate(snr2));
            prop_assert!(term >= m * (1.0 - 1e-12));
            prop_assert!(term <= m * 2f64.powf(1.0 / f64::from(p)) * (1.0 + 1e-12));
        }

        // Pattern upper bound on the SNR.
        #[test]
        fn snr_bounded_by_pattern_peak(
            dx in 0.5..50.0f64,
            dz in -20.0..20.0f64,
            ax in -3.0..3.0f64,
            ay in -3.0..3.0f64,
        ) {
            let q = attitude_from_acceleration(
                &Vector3::new(ax, ay, 0.0), GRAVITY, 0.0).unwrap();
            let tx = Pose::new(Vector3::zeros(), q);
            let rx = Pose::level(Vector3::new(dx, 0.0, dz));
            let ant = AntennaPattern::half_wave_dipole();
            let p = LinkParams::new(2.0, 1e-6, 1e-4);
            let snr = link_snr(&tx, &rx, &ant, &ant, &p, None).unwrap();
            let d2 = ant.directivity.powi(2) * ant.directivity.powi(2);
            let bound = p.k0 * d2 * p.tx_power_w
                / ((dx * dx + dz * dz) * p.noise_w);
            prop_assert!(snr >= 0.0);
            prop_assert!(snr <= bound * (1.0 + 1e-12));
        }
    }
}
