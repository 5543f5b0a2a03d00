//! Pointwise wake of a single fixed-wing vehicle: two counter-rotating tip
//! vortices with rotational cores, modulated streamwise by a Gaussian.

use crate::error::ParamError;
use crate::geom::{Vec2, VehicleState};
use crate::scalar::{two, Scalar};

/// Tip-vortex strength and geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexParams<T> {
    /// Circulation, m^2/s.
    pub gamma: T,
    /// Core rotation rate, 1/s.
    pub omega: T,
    /// Core radius, m. Always `sqrt(gamma / (2 pi omega))`.
    pub r_star: T,
    /// Half-span `b`, m.
    pub half_span: T,
}

impl<T: Scalar> VortexParams<T> {
    /// Build from circulation and core rate; the core radius follows.
    pub fn new(gamma: T, omega: T, half_span: T) -> Result<Self, ParamError> {
        if !(gamma > T::zero() && gamma.is_finite()) {
            return Err(ParamError::new("gamma", "must be positive and finite"));
        }
        if !(omega > T::zero() && omega.is_finite()) {
            return Err(ParamError::new("omega", "must be positive and finite"));
        }
        if !(half_span > T::zero() && half_span.is_finite()) {
            return Err(ParamError::new("half_span", "must be positive and finite"));
        }
        let r_star = (gamma / (two::<T>() * T::PI() * omega)).sqrt();
        if r_star >= half_span {
            return Err(ParamError::new(
                "omega",
                format!("core radius {r_star} must be smaller than the half-span {half_span}"),
            ));
        }
        Ok(Self {
            gamma,
            omega,
            r_star,
            half_span,
        })
    }

    /// Build from circulation and core radius; the core rate follows.
    pub fn with_core_radius(gamma: T, r_star: T, half_span: T) -> Result<Self, ParamError> {
        if !(r_star > T::zero()) {
            return Err(ParamError::new("r_star", "must be positive"));
        }
        let omega = gamma / (two::<T>() * T::PI() * r_star * r_star);
        let mut vp = Self::new(gamma, omega, half_span)?;
        vp.r_star = r_star;
        Ok(vp)
    }

    /// `Gamma / 2 pi`, the coefficient of the irrotational branch.
    pub fn strength(&self) -> T {
        self.gamma / (two::<T>() * T::PI())
    }
}

/// Streamwise placement of the wake benefit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WakeShape<T> {
    /// Trailing distance of peak influence, m.
    pub mu: T,
    /// Streamwise length scale, m.
    pub sigma: T,
}

impl<T: Scalar> WakeShape<T> {
    pub fn new(mu: T, sigma: T) -> Result<Self, ParamError> {
        if !(mu > T::zero() && mu.is_finite()) {
            return Err(ParamError::new("mu", "must be positive and finite"));
        }
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(ParamError::new("sigma", "must be positive and finite"));
        }
        Ok(Self { mu, sigma })
    }
}

/// Vertical velocity induced at signed distance `r` from a vortex centre.
pub fn vortex_velocity<T: Scalar>(r: T, vp: &VortexParams<T>) -> T {
    if r.abs() < vp.r_star {
        vp.omega * r
    } else {
        vp.strength() / r
    }
}

/// Upwash (positive) or downwash (negative) at spanwise offset `y` behind a wing.
pub fn spanwise_profile<T: Scalar>(y: T, vp: &VortexParams<T>) -> T {
    vortex_velocity(y - vp.half_span, vp) - vortex_velocity(y + vp.half_span, vp)
}

/// Streamwise gain at trailing distance `d` (positive when behind the wake's source).
pub fn streamwise_gain<T: Scalar>(d: T, ws: &WakeShape<T>) -> T {
    let z = (d - ws.mu) / ws.sigma;
    two::<T>() * (-(z * z) / two::<T>()).exp()
}

/// `d/dd` of [`streamwise_gain`].
pub fn streamwise_gain_slope<T: Scalar>(d: T, ws: &WakeShape<T>) -> T {
    -streamwise_gain(d, ws) * (d - ws.mu) / (ws.sigma * ws.sigma)
}

/// Position of `p` relative to `source` in wake coordinates: (trailing distance, spanwise offset).
pub fn wake_coordinates<T: Scalar>(p: Vec2<T>, source: &VehicleState<T>) -> (T, T) {
    let (along, left) = source.to_body(p);
    (-along, left)
}

/// Upwash of the vehicle at `pose_j` felt at the point `pos_i`.
pub fn point_upwash<T: Scalar>(
    pos_i: Vec2<T>,
    pose_j: &VehicleState<T>,
    vp: &VortexParams<T>,
    ws: &WakeShape<T>,
) -> T {
    let (d, y) = wake_coordinates(pos_i, pose_j);
    spanwise_profile(y, vp) * streamwise_gain(d, ws)
}
