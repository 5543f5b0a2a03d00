//! Wing-integrated wake effects: upwash force and rolling tendency of a wing
//! immersed in a neighbour's wake, their sums over all neighbours, and the
//! cost-to-flock field `E = kappa |M| - W` with its derivatives.

use crate::geom::{Vec2, VehicleState};
use crate::scalar::{half, two, Scalar};
use crate::wake::{
    streamwise_gain, streamwise_gain_slope, vortex_velocity, wake_coordinates, VortexParams,
    WakeShape,
};

/// Everything about a vehicle's wake.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroParams<T> {
    pub vortex: VortexParams<T>,
    pub wake: WakeShape<T>,
}

/// `U(r) = int_0^r u`, even in `r`.
fn vortex_potential<T: Scalar>(r: T, vp: &VortexParams<T>) -> T {
    let r = r.abs();
    if r < vp.r_star {
        half::<T>() * vp.omega * r * r
    } else {
        vp.strength() * (half::<T>() + (r / vp.r_star).ln())
    }
}

/// `V(r) = int_0^r s u(s) ds`, odd in `r`.
fn vortex_first_moment<T: Scalar>(r: T, vp: &VortexParams<T>) -> T {
    if r.abs() < vp.r_star {
        vp.omega * r * r * r / T::lit(3.0)
    } else {
        let core = two::<T>() * vp.r_star / T::lit(3.0);
        vp.strength() * (r - core.copysign(r))
    }
}

/// Spanwise upwash integrated over a wing centred at `y`: `int_{y-b}^{y+b} f`.
pub fn upwash_integral<T: Scalar>(y: T, vp: &VortexParams<T>) -> T {
    let b2 = two::<T>() * vp.half_span;
    two::<T>() * vortex_potential(y, vp) - vortex_potential(y - b2, vp) - vortex_potential(y + b2, vp)
}

/// `d/dy` of [`upwash_integral`].
pub fn upwash_integral_slope<T: Scalar>(y: T, vp: &VortexParams<T>) -> T {
    let b2 = two::<T>() * vp.half_span;
    two::<T>() * vortex_velocity(y, vp) - vortex_velocity(y - b2, vp) - vortex_velocity(y + b2, vp)
}

/// Rolling moment about the wing centre: `int_{y-b}^{y+b} (xi - y) f(xi) dxi`.
pub fn moment_integral<T: Scalar>(y: T, vp: &VortexParams<T>) -> T {
    let b = vp.half_span;
    let b2 = two::<T>() * b;
    let first = two::<T>() * vortex_first_moment(y, vp)
        - vortex_first_moment(y - b2, vp)
        - vortex_first_moment(y + b2, vp)
        + b * (vortex_potential(y + b2, vp) - vortex_potential(y - b2, vp));
    first - y * upwash_integral(y, vp)
}

/// `d/dy` of [`moment_integral`].
pub fn moment_integral_slope<T: Scalar>(y: T, vp: &VortexParams<T>) -> T {
    let b = vp.half_span;
    let b2 = two::<T>() * b;
    b * (vortex_velocity(y - b2, vp) - vortex_velocity(y + b2, vp)) - upwash_integral(y, vp)
}

/// Upwash force on a wing at streamwise offset `x` (negative behind the source) and
/// spanwise offset `y` in the source's wake frame.
pub fn upwash_force<T: Scalar>(x: T, y: T, vp: &VortexParams<T>, ws: &WakeShape<T>) -> T {
    streamwise_gain(-x, ws) * upwash_integral(y, vp)
}

/// Rolling tendency on a wing at offset `(x, y)` in the source's wake frame.
pub fn roll_moment<T: Scalar>(x: T, y: T, vp: &VortexParams<T>, ws: &WakeShape<T>) -> T {
    streamwise_gain(-x, ws) * moment_integral(y, vp)
}

/// When a neighbour's wake is treated as absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Negligibility<T> {
    /// Streamwise gains below this are ignored.
    pub min_gain: T,
    /// Spanwise offsets beyond this many half-spans are ignored.
    pub span_multiple: T,
}

impl<T: Scalar> Default for Negligibility<T> {
    fn default() -> Self {
        Self {
            min_gain: T::lit(1e-9),
            span_multiple: T::lit(8.0),
        }
    }
}

/// What one agent knows about a neighbour when it plans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborSnapshot<T> {
    pub pose: VehicleState<T>,
    /// Assumed constant over the planning step.
    pub speed: T,
    pub aero: AeroParams<T>,
}

/// One neighbour's contribution to W and M, with gradients w.r.t. the own position.
#[derive(Debug, Clone, Copy)]
struct Contribution<T> {
    w: T,
    m: T,
    grad_w: Vec2<T>,
    grad_m: Vec2<T>,
    velocity: Vec2<T>,
}

fn contribution<T: Scalar>(
    self_pos: Vec2<T>,
    nb: &NeighborSnapshot<T>,
    cut: &Negligibility<T>,
) -> Option<Contribution<T>> {
    let vp = &nb.aero.vortex;
    let ws = &nb.aero.wake;
    let (d, y) = wake_coordinates(self_pos, &nb.pose);
    if y.abs() > cut.span_multiple * vp.half_span {
        return None;
    }
    let g = streamwise_gain(d, ws);
    if g < cut.min_gain {
        return None;
    }
    let gd = streamwise_gain_slope(d, ws);
    let f = upwash_integral(y, vp);
    let m = moment_integral(y, vp);
    let xh = Vec2::heading(nb.pose.heading);
    let yh = xh.perp();
    // d = -(s . xh), so grad d = -xh; grad y = yh.
    let grad_w = xh * (-gd * f) + yh * (g * upwash_integral_slope(y, vp));
    let grad_m = xh * (-gd * m) + yh * (g * moment_integral_slope(y, vp));
    Some(Contribution {
        w: g * f,
        m: g * m,
        grad_w,
        grad_m,
        velocity: xh * nb.speed,
    })
}

/// Aggregate upwash `W` and rolling tendency `M` at `self_pos`.
pub fn aggregate_fields<T: Scalar>(
    self_pos: Vec2<T>,
    neighbors: &[NeighborSnapshot<T>],
    cut: &Negligibility<T>,
) -> (T, T) {
    neighbors
        .iter()
        .filter_map(|nb| contribution(self_pos, nb, cut))
        .fold((T::zero(), T::zero()), |(w, m), c| (w + c.w, m + c.m))
}

/// Cost to flock and its derivatives at one agent's position.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FlockCostSample<T> {
    pub upwash_w: T,
    pub moment_m: T,
    /// `kappa |M| - W`.
    pub cost_e: T,
    pub grad_e: Vec2<T>,
    /// Rate of change of E from neighbour motion alone.
    pub de_dt: T,
}

/// Below this `|M|` the derivative of `|M|` is taken as 0.
pub const MOMENT_KINK: f64 = 1e-9;

pub fn flock_cost<T: Scalar>(
    self_pos: Vec2<T>,
    neighbors: &[NeighborSnapshot<T>],
    kappa: T,
    cut: &Negligibility<T>,
) -> FlockCostSample<T> {
    let parts: Vec<Contribution<T>> = neighbors
        .iter()
        .filter_map(|nb| contribution(self_pos, nb, cut))
        .collect();
    let mut w = T::zero();
    let mut m = T::zero();
    let mut grad_w = Vec2::zero();
    let mut grad_m = Vec2::zero();
    for c in &parts {
        w = w + c.w;
        m = m + c.m;
        grad_w += c.grad_w;
        grad_m += c.grad_m;
    }
    let sgn = if m.abs() < T::lit(MOMENT_KINK) {
        T::zero()
    } else {
        m.signum()
    };
    let k = kappa * sgn;
    // A neighbour moving by dp shifts the relative position by -dp.
    let de_dt = parts.iter().fold(T::zero(), |acc, c| {
        let grad = c.grad_m * k - c.grad_w;
        acc - grad.dot(c.velocity)
    });
    FlockCostSample {
        upwash_w: w,
        moment_m: m,
        cost_e: kappa * m.abs() - w,
        grad_e: grad_m * k - grad_w,
        de_dt,
    }
}
