//! Reference computations that share no code with the model: numerical
//! quadrature of the pointwise wake, brute-force drag minimization, Sturm root
//! counting and central differences.

use anseroid::DragParams;

/// Vortex description used by the oracles (plain numbers, no validation).
#[derive(Debug, Clone, Copy)]
pub struct Vortex {
    pub gamma: f64,
    pub r_star: f64,
    pub half_span: f64,
}

impl Vortex {
    pub fn omega(&self) -> f64 {
        self.gamma / (2.0 * std::f64::consts::PI * self.r_star * self.r_star)
    }

    /// Induced velocity of one vortex at signed distance `r`.
    pub fn velocity(&self, r: f64) -> f64 {
        if r.abs() < self.r_star {
            self.omega() * r
        } else {
            self.gamma / (2.0 * std::f64::consts::PI * r)
        }
    }

    /// Upwash from the vortex pair at spanwise offset `y`.
    pub fn profile(&self, y: f64) -> f64 {
        self.velocity(y - self.half_span) - self.velocity(y + self.half_span)
    }

    /// Points where the profile's derivative jumps.
    pub fn kinks(&self) -> [f64; 4] {
        let (b, r) = (self.half_span, self.r_star);
        [-b - r, -b + r, b - r, b + r]
    }
}

/// Gaussian streamwise gain with peak 2 at `mu`.
pub fn gain(d: f64, mu: f64, sigma: f64) -> f64 {
    2.0 * (-(d - mu) * (d - mu) / (2.0 * sigma * sigma)).exp()
}

/// Double-exponential quadrature of `f` over `[a, b]`, split at `breaks` so each
/// piece is smooth.
pub fn integrate_piecewise(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.insert(0, a);
    pts.push(b);
    pts.windows(2)
        .map(|w| quadrature::integrate(&f, w[0], w[1], tol).integral)
        .sum()
}

/// `int_{y-b}^{y+b} f(xi) dxi` by quadrature.
pub fn upwash_integral(y: f64, v: &Vortex) -> f64 {
    let b = v.half_span;
    integrate_piecewise(|xi| v.profile(xi), y - b, y + b, &v.kinks(), 1e-15)
}

/// `int_{y-b}^{y+b} (xi - y) f(xi) dxi` by quadrature.
pub fn moment_integral(y: f64, v: &Vortex) -> f64 {
    let b = v.half_span;
    integrate_piecewise(|xi| (xi - y) * v.profile(xi), y - b, y + b, &v.kinks(), 1e-15)
}

/// `C1 v^2 + C2/v^2 - L W / v`, written out independently of the model.
pub fn drag(v: f64, w: f64, c1: f64, c2: f64, lift: f64) -> f64 {
    c1 * v * v + c2 / (v * v) - lift * w / v
}

/// Upper end of the brute-force search: twice the larger of the no-upwash
/// optimum and the speed at which the upwash term alone balances profile drag.
pub fn speed_bracket(dp: &DragParams, w: f64) -> f64 {
    let c1 = dp.c1.abs();
    let iso = (dp.c2.abs() / c1).powf(0.25);
    let lean = (dp.lift * w.abs() / (2.0 * c1)).cbrt();
    2.0 * iso.max(lean)
}

/// Grid point in `(0, v_hi]` with spacing `step` that minimizes drag.
pub fn brute_force_speed(dp: &DragParams, w: f64, step: f64) -> f64 {
    let v_hi = speed_bracket(dp, w);
    let n = (v_hi / step).ceil() as u64;
    let mut best = (f64::INFINITY, f64::NAN);
    for k in 1..=n {
        let v = k as f64 * step;
        let d = drag(v, w, dp.c1, dp.c2, dp.lift);
        if d < best.0 {
            best = (d, v);
        }
    }
    best.1
}

/// Polynomial with coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    fn trim(mut self, tol: f64) -> Self {
        while self.0.len() > 1 && self.0.last().map_or(false, |c| c.abs() <= tol) {
            self.0.pop();
        }
        self
    }

    fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect())
    }

    fn degree(&self) -> usize {
        self.0.len() - 1
    }

    fn rem(&self, d: &Poly) -> Poly {
        let mut r = self.0.clone();
        let dd = d.degree();
        let lead = *d.0.last().unwrap();
        while r.len() > dd && r.len() > 1 {
            let q = r.last().unwrap() / lead;
            let shift = r.len() - 1 - dd;
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= q * c;
            }
            r.pop();
        }
        Poly(r)
    }

    fn sign_at_zero(&self) -> f64 {
        self.0[0]
    }

    fn sign_at_inf(&self, negative: bool) -> f64 {
        let lead = *self.0.last().unwrap();
        if negative && self.degree() % 2 == 1 {
            -lead
        } else {
            lead
        }
    }
}

fn variations(values: impl Iterator<Item = f64>) -> usize {
    let signs: Vec<f64> = values.filter(|v| *v != 0.0).map(f64::signum).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct real roots in `(-inf, 0)` and `(0, inf)` by Sturm's theorem.
/// Coefficients are trimmed at `tol` relative to the largest one.
pub fn sturm_root_counts(p: &Poly) -> (usize, usize) {
    let scale = p.0.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-12 * scale;
    let mut chain = vec![p.clone().trim(tol), p.derivative().trim(tol)];
    loop {
        let n = chain.len();
        if chain[n - 1].degree() == 0 {
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]);
        let r = Poly(r.0.into_iter().map(|c| -c).collect()).trim(tol);
        if r.0.iter().all(|c| c.abs() <= tol) {
            break;
        }
        chain.push(r);
    }
    let at_neg = variations(chain.iter().map(|q| q.sign_at_inf(true)));
    let at_zero = variations(chain.iter().map(|q| q.sign_at_zero()));
    let at_pos = variations(chain.iter().map(|q| q.sign_at_inf(false)));
    (at_neg.saturating_sub(at_zero), at_zero.saturating_sub(at_pos))
}

/// The drag-optimality quartic `v^4 + (L W / 2 C1) v - C2 / C1`, rescaled by
/// `v = s u` so its coefficients are of order one.
pub fn optimality_quartic(dp: &DragParams, w: f64) -> Poly {
    let s = speed_bracket(dp, w) / 2.0;
    let a = dp.lift * w / (2.0 * dp.c1);
    let c = dp.c2 / dp.c1;
    Poly(vec![-c / s.powi(4), a / s.powi(3), 0.0, 0.0, 1.0])
}

/// Central-difference gradient of a scalar field.
pub fn central_gradient(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> (f64, f64) {
    (
        (f(x + h, y) - f(x - h, y)) / (2.0 * h),
        (f(x, y + h) - f(x, y - h)) / (2.0 * h),
    )
}

/// Root of `f` on `[a, b]` by bisection, assuming a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Option<f64> {
    let fa = f(a);
    if fa.signum() == f(b).signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Number of sign changes of `f` sampled at `n` evenly spaced points of `[a, b]`.
pub fn sign_changes(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> usize {
    variations((0..n).map(|k| f(a + (b - a) * k as f64 / (n - 1) as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_counts_known_roots() {
        // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
        assert_eq!(sturm_root_counts(&Poly(vec![6.0, -7.0, 0.0, 1.0])), (1, 2));
        // x^2 + 1
        assert_eq!(sturm_root_counts(&Poly(vec![1.0, 0.0, 1.0])), (0, 0));
        // x^4 - 1
        assert_eq!(sturm_root_counts(&Poly(vec![-1.0, 0.0, 0.0, 0.0, 1.0])), (1, 1));
    }

    #[test]
    fn quadrature_of_polynomial_is_exact() {
        let v = integrate_piecewise(|x| x * x, 0.0, 3.0, &[1.0, 2.0], 1e-14);
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn brute_force_finds_isolated_optimum() {
        let dp = DragParams { c1: 1.0, c2: 16.0, lift: 1.0 };
        assert!((brute_force_speed(&dp, 0.0, 1e-3) - 2.0).abs() <= 1e-3);
    }
}
