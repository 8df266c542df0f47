//! Quintic motion primitives and sampled trajectories.
//!
//! Each axis of translation is described by a closed-form quintic in
//! position,
//!
//! ```text
//! p(t) = α/120 t⁵ + β/24 t⁴ + γ/6 t³ + ½ a₀ t² + v₀ t + p₀
//! v(t) = α/24  t⁴ + β/6  t³ + γ/2 t² +   a₀ t  + v₀
//! a(t) = α/6   t³ + β/2  t² + γ   t  +   a₀
//! ```
//!
//! so that velocity is the exact derivative of position and acceleration of
//! velocity. The three design parameters (α, β, γ) are enough to meet an
//! arbitrary position/velocity/acceleration target at the end of a segment,
//! which makes generation and feasibility checks cheap.

use crate::geometry::{attitude_from_acceleration, GeometryError};
use nalgebra::{UnitQuaternion, Vector3};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    #[error("time {t} outside segment domain [0, {duration}]")]
    OutOfDomain { t: f64, duration: f64 },
    #[error("boundary fit is singular (duration {duration}, |det| = {det:.3e})")]
    SingularFit { duration: f64, det: f64 },
    #[error("segment chain discontinuous at junction {junction}: |gap| = {gap:.3e} in {field}")]
    DiscontinuousChain {
        junction: usize,
        field: &'static str,
        gap: f64,
    },
    #[error("segment triple at index {index} has mismatched axis durations")]
    MismatchedDurations { index: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Position, velocity, and acceleration of one translational axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisState {
    /// Position [m].
    pub p: f64,
    /// Velocity [m/s].
    pub v: f64,
    /// Acceleration [m/s²].
    pub a: f64,
}

impl AxisState {
    pub fn new(p: f64, v: f64, a: f64) -> Self {
        Self { p, v, a }
    }

    pub fn rest(p: f64) -> Self {
        Self { p, v: 0.0, a: 0.0 }
    }
}

/// One-axis quintic segment with design parameters (α, β, γ) and an initial
/// state; valid for `t ∈ [0, duration]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveSegment {
    /// Design parameter [m/s⁵].
    pub alpha: f64,
    /// Design parameter [m/s⁴].
    pub beta: f64,
    /// Design parameter [m/s³].
    pub gamma: f64,
    pub initial: AxisState,
    /// Segment duration [s], strictly positive.
    pub duration: f64,
}

impl PrimitiveSegment {
    /// Constant-state segment (zero design parameters, zero initial motion).
    pub fn hold(p: f64, duration: f64) -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            initial: AxisState::rest(p),
            duration,
        }
    }

    /// State at the end of the segment.
    pub fn terminal(&self) -> AxisState {
        self.eval_unchecked(self.duration)
    }

    fn eval_unchecked(&self, t: f64) -> AxisState {
        let AxisState { p, v, a } = self.initial;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t2 * t2, t2 * t3);
        AxisState {
            p: self.alpha / 120.0 * t5
                + self.beta / 24.0 * t4
                + self.gamma / 6.0 * t3
                + 0.5 * a * t2
                + v * t
                + p,
            v: self.alpha / 24.0 * t4
                + self.beta / 6.0 * t3
                + self.gamma / 2.0 * t2
                + a * t
                + v,
            a: self.alpha / 6.0 * t3 + self.beta / 2.0 * t2 + self.gamma * t + a,
        }
    }
}

/// Evaluates a segment at time `t`, erroring outside `[0, duration]`.
///
/// A slack of 1e-9 s absorbs junction round-off when segments are chained.
pub fn evaluate_segment(seg: &PrimitiveSegment, t: f64) -> Result<AxisState, KinematicsError> {
    const SLACK: f64 = 1e-9;
    if t < -SLACK || t > seg.duration + SLACK {
        return Err(KinematicsError::OutOfDomain {
            t,
            duration: seg.duration,
        });
    }
    Ok(seg.eval_unchecked(t.clamp(0.0, seg.duration)))
}

/// Solves for the (α, β, γ) that drive `initial` to `final_state` in time
/// `duration`, by Cramer's rule on the 3×3 endpoint system.
pub fn fit_boundary(
    initial: AxisState,
    final_state: AxisState,
    duration: f64,
) -> Result<PrimitiveSegment, KinematicsError> {
    if duration <= 0.0 {
        return Err(KinematicsError::SingularFit {
            duration,
            det: 0.0,
        });
    }
    let t = duration;
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t2 * t2, t2 * t3);

    // Endpoint residuals after the free (coast) motion of the initial state.
    let dp = final_state.p - (initial.p + initial.v * t + 0.5 * initial.a * t2);
    let dv = final_state.v - (initial.v + initial.a * t);
    let da = final_state.a - initial.a;

    let m = [
        [t5 / 120.0, t4 / 24.0, t3 / 6.0],
        [t4 / 24.0, t3 / 6.0, t2 / 2.0],
        [t3 / 6.0, t2 / 2.0, t],
    ];
    let det3 = |a: &[[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let det = det3(&m);
    if det.abs() < 1e-12 {
        return Err(KinematicsError::SingularFit { duration, det });
    }
    let rhs = [dp, dv, da];
    let mut cols = [0.0; 3];
    for (j, col) in cols.iter_mut().enumerate() {
        let mut mj = m;
        for i in 0..3 {
            mj[i][j] = rhs[i];
        }
        *col = det3(&mj) / det;
    }
    Ok(PrimitiveSegment {
        alpha: cols[0],
        beta: cols[1],
        gamma: cols[2],
        initial,
        duration,
    })
}

/// A time slice of a 3-axis trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySample {
    /// Sample time [s].
    pub time: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    /// Attitude recovered from the sampled acceleration (zero yaw).
    pub attitude: UnitQuaternion<f64>,
}

/// A trajectory sampled on a uniform grid `t_k = k·Ts`, with the tilt
/// attitude derived at each sample.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Sampling period Ts [s].
    pub sampling_period: f64,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of the final sample [s].
    pub fn horizon(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.time)
    }

    /// Builds a stationary (hover) trajectory at `position`.
    pub fn hover(
        position: Vector3<f64>,
        sampling_period: f64,
        horizon: f64,
        gravity: f64,
    ) -> Result<Self, KinematicsError> {
        let steps = grid_steps(horizon, sampling_period);
        let attitude = attitude_from_acceleration(&Vector3::zeros(), gravity, 0.0)?;
        let samples = (0..=steps)
            .map(|k| TrajectorySample {
                time: k as f64 * sampling_period,
                position,
                velocity: Vector3::zeros(),
                acceleration: Vector3::zeros(),
                attitude,
            })
            .collect();
        Ok(Self {
            sampling_period,
            samples,
        })
    }

    /// Writes the trajectory as CSV with 9-significant-digit values.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,px,py,pz,vx,vy,vz,ax,ay,az,qw,qx,qy,qz")?;
        for s in &self.samples {
            let q = s.attitude.quaternion();
            let row = [
                s.time,
                s.position.x,
                s.position.y,
                s.position.z,
                s.velocity.x,
                s.velocity.y,
                s.velocity.z,
                s.acceleration.x,
                s.acceleration.y,
                s.acceleration.z,
                q.w,
                q.i,
                q.j,
                q.k,
            ];
            let row: Vec<String> = row.iter().map(|x| crate::fmt_sig9(*x)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Number of whole sampling periods in `horizon` (grid has `steps + 1`
/// samples).
pub fn grid_steps(horizon: f64, sampling_period: f64) -> usize {
    (horizon / sampling_period + 1e-9).floor() as usize
}

/// One chain link: simultaneous x/y/z segments sharing a duration.
pub type SegmentTriple = [PrimitiveSegment; 3];

const JUNCTION_TOL: f64 = 1e-6;

/// Samples a chain of 3-axis segments on the grid `t_k = k·Ts`.
///
/// The chain must be continuous through acceleration at every junction
/// (within 1e-6 per component); the tilt attitude is computed from the
/// sampled acceleration with zero yaw.
pub fn sample_trajectory(
    chain: &[SegmentTriple],
    sampling_period: f64,
    gravity: f64,
) -> Result<Trajectory, KinematicsError> {
    assert!(sampling_period > 0.0, "sampling period must be positive");
    assert!(!chain.is_empty(), "segment chain must be non-empty");

    for (i, triple) in chain.iter().enumerate() {
        let d = triple[0].duration;
        if (triple[1].duration - d).abs() > 1e-12 || (triple[2].duration - d).abs() > 1e-12 {
            return Err(KinematicsError::MismatchedDurations { index: i });
        }
    }
    for (i, pair) in chain.windows(2).enumerate() {
        for axis in 0..3 {
            let end = pair[0][axis].terminal();
            let start = pair[1][axis].initial;
            for (field, gap) in [
                ("position", end.p - start.p),
                ("velocity", end.v - start.v),
                ("acceleration", end.a - start.a),
            ] {
                if gap.abs() > JUNCTION_TOL {
                    return Err(KinematicsError::DiscontinuousChain {
                        junction: i + 1,
                        field,
                        gap: gap.abs(),
                    });
                }
            }
        }
    }

    let total: f64 = chain.iter().map(|t| t[0].duration).sum();
    let steps = grid_steps(total, sampling_period);

    let mut samples = Vec::with_capacity(steps + 1);
    let mut seg_index = 0usize;
    let mut seg_start = 0.0f64;
    for k in 0..=steps {
        let t = k as f64 * sampling_period;
        while seg_index + 1 < chain.len()
            && t > seg_start + chain[seg_index][0].duration + 1e-9
        {
            seg_start += chain[seg_index][0].duration;
            seg_index += 1;
        }
        let local = (t - seg_start).min(chain[seg_index][0].duration);
        let x = evaluate_segment(&chain[seg_index][0], local)?;
        let y = evaluate_segment(&chain[seg_index][1], local)?;
        let z = evaluate_segment(&chain[seg_index][2], local)?;
        let acceleration = Vector3::new(x.a, y.a, z.a);
        let attitude = attitude_from_acceleration(&acceleration, gravity, 0.0)?;
        samples.push(TrajectorySample {
            time: t,
            position: Vector3::new(x.p, y.p, z.p),
            velocity: Vector3::new(x.v, y.v, z.v),
            acceleration,
            attitude,
        });
    }
    Ok(Trajectory {
        sampling_period,
        samples,
    })
}
