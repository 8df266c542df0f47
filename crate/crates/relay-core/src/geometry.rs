//! Frames, rotations, and the coupling between commanded acceleration and
//! body attitude.
//!
//! World frame is ENU with gravity acting along −z. A multirotor can only
//! produce thrust along its body z-axis, so commanding a lateral
//! acceleration forces the body to tilt; [`attitude_from_acceleration`]
//! recovers that attitude from the acceleration and a free yaw angle.

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};
use thiserror::Error;

/// Default gravitational acceleration [m/s²], acting along world −z.
pub const GRAVITY: f64 = 9.81;

/// Unit-norm tolerance enforced on every quaternion this module returns.
pub const QUAT_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    /// The commanded acceleration cancels gravity: the total thrust vector
    /// vanishes and the attitude is undefined (free-fall command).
    #[error("degenerate thrust: |accel + g*z| = {norm:.3e} m/s^2")]
    DegenerateThrust { norm: f64 },
}

/// Position and orientation of a rigid body in the world frame.
///
/// `orientation` maps body-frame vectors into the world frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Self {
            position,
            orientation,
        }
    }

    /// Pose at `position` with the body frame aligned to the world frame.
    pub fn level(position: Vector3<f64>) -> Self {
        Self {
            position,
            orientation: UnitQuaternion::identity(),
        }
    }
}

/// Recovers the attitude a multirotor must hold to produce `accel_world`.
///
/// The body z-axis aligns with the total thrust direction
/// `(accel_world + g·ẑ)/‖·‖` and the body x-axis heading matches `yaw`.
/// Hover (`accel = 0`, `yaw = 0`) maps to the identity.
pub fn attitude_from_acceleration(
    accel_world: &Vector3<f64>,
    gravity: f64,
    yaw: f64,
) -> Result<UnitQuaternion<f64>, GeometryError> {
    let thrust = accel_world + Vector3::new(0.0, 0.0, gravity);
    let norm = thrust.norm();
    if norm <= 1e-6 {
        return Err(GeometryError::DegenerateThrust { norm });
    }
    let z_b = thrust / norm;

    // Intermediate heading vector; the attitude is undefined when the
    // thrust axis itself points along the heading (tilt of 90 deg).
    let x_c = Vector3::new(yaw.cos(), yaw.sin(), 0.0);
    let y_raw = z_b.cross(&x_c);
    let y_norm = y_raw.norm();
    if y_norm <= 1e-9 {
        return Err(GeometryError::DegenerateThrust { norm: y_norm });
    }
    let y_b = y_raw / y_norm;
    let x_b = y_b.cross(&z_b);

    let rot = Rotation3::from_matrix_unchecked(Matrix3::from_columns(&[x_b, y_b, z_b]));
    let q = UnitQuaternion::from_rotation_matrix(&rot);
    Ok(UnitQuaternion::new_normalize(q.into_inner()))
}

/// Expresses a world-frame vector in the body frame of `q`.
pub fn rotate_to_body(q: &UnitQuaternion<f64>, v_world: &Vector3<f64>) -> Vector3<f64> {
    q.inverse_transform_vector(v_world)
}

/// Expresses a body-frame vector in the world frame. Inverse of
/// [`rotate_to_body`].
pub fn rotate_to_world(q: &UnitQuaternion<f64>, v_body: &Vector3<f64>) -> Vector3<f64> {
    q.transform_vector(v_body)
}

/// Yaw angle [rad] of `q` (rotation of the body x-axis about world z).
pub fn yaw_of(q: &UnitQuaternion<f64>) -> f64 {
    let (w, x, y, z) = (q.w, q.i, q.j, q.k);
    (2.0 * (w * z + x * y)).atan2(1.0 - 2.0 * (y * y + z * z))
}
