//! Drag model, the drag-minimizing airspeed, and vehicle-data parameter derivation.

use crate::error::ParamError;
use crate::scalar::{two, Scalar};
use crate::wake::VortexParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragParams<T> {
    /// Profile-drag coefficient `C1`.
    pub c1: T,
    /// Induced-drag coefficient `C2`.
    pub c2: T,
    /// Lift `L`, N.
    pub lift: T,
}

impl<T: Scalar> DragParams<T> {
    pub fn new(c1: T, c2: T, lift: T) -> Result<Self, ParamError> {
        for (name, v) in [("c1", c1), ("c2", c2), ("lift", lift)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(ParamError::new(name, "must be positive and finite"));
            }
        }
        Ok(Self { c1, c2, lift })
    }

    /// Drag-minimizing speed with no upwash, `(C2/C1)^(1/4)`.
    pub fn isolated_speed(&self) -> T {
        (self.c2 / self.c1).sqrt().sqrt()
    }

    /// `v^4 + (L/(2 C1)) W v - C2/C1`, whose positive root is the optimal airspeed.
    pub fn quartic(&self, v: T, w: T) -> T {
        let v2 = v * v;
        v2 * v2 + self.lift / (two::<T>() * self.c1) * w * v - self.c2 / self.c1
    }
}

/// What the speed tracker minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Drag force.
    #[default]
    Drag,
    /// Drag times airspeed.
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("airspeed must be positive")]
pub struct NonPositiveSpeed;

/// `C1 v^2 + C2 / v^2 - (L/v) W`.
pub fn drag_force<T: Scalar>(v: T, w: T, dp: &DragParams<T>) -> Result<T, NonPositiveSpeed> {
    if !(v > T::zero()) {
        return Err(NonPositiveSpeed);
    }
    Ok(dp.c1 * v * v + dp.c2 / (v * v) - dp.lift / v * w)
}

/// The unique positive root of the drag-optimality quartic, by bisection.
pub fn optimal_airspeed<T: Scalar>(w: T, dp: &DragParams<T>) -> T {
    let iso = dp.isolated_speed();
    let lean = (dp.lift * w.abs() / (two::<T>() * dp.c1)).cbrt();
    let mut lo = T::lit(1e-6);
    let mut hi = two::<T>() * iso.max(lean);
    let tol = T::lit(1e-12);
    // The quartic is negative at 0+ and positive beyond the root.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / two::<T>();
        if mid <= lo || mid >= hi {
            break;
        }
        if dp.quartic(mid, w) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / two::<T>()
}

/// Speed minimizing the chosen objective under upwash `w`.
pub fn preferred_speed<T: Scalar>(w: T, dp: &DragParams<T>, objective: Objective) -> T {
    match objective {
        Objective::Drag => optimal_airspeed(w, dp),
        Objective::Power => (dp.c2 / (T::lit(3.0) * dp.c1)).sqrt().sqrt(),
    }
}

/// Vehicle data used to estimate wake and drag constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleData<T> {
    /// Weight, equal to lift in level flight, N.
    pub weight: T,
    /// Full wing span, m.
    pub span: T,
    /// Design cruise speed, taken as drag-optimal, m/s.
    pub cruise_speed: T,
    /// Airspeed used in the circulation estimate, m/s.
    pub wake_speed: T,
    /// kg/m^3.
    pub air_density: T,
    /// Core radius as a fraction of the half-span.
    pub core_fraction: T,
}

pub fn derive_params<T: Scalar>(
    data: &VehicleData<T>,
) -> Result<(VortexParams<T>, DragParams<T>), ParamError> {
    let VehicleData {
        weight,
        span,
        cruise_speed,
        wake_speed,
        air_density,
        core_fraction,
    } = *data;
    for (name, v) in [
        ("weight", weight),
        ("span", span),
        ("cruise_speed", cruise_speed),
        ("wake_speed", wake_speed),
        ("air_density", air_density),
    ] {
        if !(v > T::zero() && v.is_finite()) {
            return Err(ParamError::new(name, "must be positive and finite"));
        }
    }
    if !(core_fraction > T::zero() && core_fraction < T::lit(0.2)) {
        return Err(ParamError::new("core_fraction", "must lie in (0, 0.2)"));
    }
    let b = span / two::<T>();
    let gamma = weight / (two::<T>() * b * air_density * wake_speed);
    let vortex = VortexParams::with_core_radius(gamma, core_fraction * b, b)?;
    let c2 = weight * weight / (two::<T>() * air_density * T::PI() * b * b);
    let v2 = cruise_speed * cruise_speed;
    let drag = DragParams::new(c2 / (v2 * v2), c2, weight)?;
    Ok((vortex, drag))
}
