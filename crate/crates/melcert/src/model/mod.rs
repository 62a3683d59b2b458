//! System models, closed-form periodic-orbit families, and the action-angle
//! machinery that turns a planar forced oscillator into action-angle form.

pub mod catalog;

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

type OrbitFn = Arc<dyn Fn(f64, Complex64) -> Result<[Complex64; 2]> + Send + Sync>;
type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn([Complex64; 2]) -> [Complex64; 2] + Send + Sync>;
type PoleFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
type LatticeFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// A one-parameter family of periodic orbits of a planar Hamiltonian system,
/// stored as a closed-form elliptic expression so that it can be evaluated
/// at complex time (contour integrands need that; numerically integrated
/// trajectories cannot provide it).
pub struct OrbitFamily {
    pub name: String,
    /// Admissible open parameter interval, already restricted to the
    /// numerically workable subrange.
    pub param_range: (f64, f64),
    orbit: OrbitFn,
    period: ScalarFn,
    d_period: ScalarFn,
    energy_gradient: GradientFn,
    pole: PoleFn,
    lattice: LatticeFn,
}

impl OrbitFamily {
    fn check_param(&self, param: f64) -> Result<()> {
        let (lo, hi) = self.param_range;
        if param.is_finite() && param >= lo && param <= hi {
            Ok(())
        } else {
            Err(Error::ParamOutOfRange(param, lo, hi))
        }
    }

    /// Orbit state at complex time.
    pub fn orbit(&self, param: f64, t: Complex64) -> Result<[Complex64; 2]> {
        self.check_param(param)?;
        (self.orbit)(param, t)
    }

    /// Orbit state at real time (imaginary parts are discarded; they are
    /// zero up to rounding for real arguments).
    pub fn orbit_real(&self, param: f64, t: f64) -> Result<[f64; 2]> {
        let x = self.orbit(param, Complex64::new(t, 0.0))?;
        Ok([x[0].re, x[1].re])
    }

    pub fn period(&self, param: f64) -> Result<f64> {
        self.check_param(param)?;
        Ok((self.period)(param))
    }

    /// dT/dparam from the symbolically differentiated closed-form period.
    pub fn d_period(&self, param: f64) -> Result<f64> {
        self.check_param(param)?;
        Ok((self.d_period)(param))
    }

    /// Gradient DH of the unperturbed Hamiltonian at a (complexified) state.
    pub fn energy_gradient(&self, x: [Complex64; 2]) -> [Complex64; 2] {
        (self.energy_gradient)(x)
    }

    /// The principal pure-imaginary pole i*Lambda(param) of the orbit's
    /// analytic continuation (upper half-plane representative).
    pub fn principal_pole(&self, param: f64) -> Result<Complex64> {
        self.check_param(param)?;
        Ok((self.pole)(param))
    }

    /// (real step, imaginary step) of the pole lattice in complex time.
    pub fn pole_lattice_steps(&self, param: f64) -> Result<(f64, f64)> {
        self.check_param(param)?;
        Ok((self.lattice)(param))
    }

    /// Principal pole plus lattice translates within `n_steps` real-axis
    /// steps in either direction (both half-planes).
    pub fn pole_locations(&self, param: f64, n_steps: i32) -> Result<Vec<Complex64>> {
        let p = self.principal_pole(param)?;
        let (re_step, _) = self.pole_lattice_steps(param)?;
        let mut out = Vec::new();
        for m in -n_steps..=n_steps {
            let shifted = p + m as f64 * re_step;
            out.push(shifted);
            out.push(shifted.conj());
        }
        out.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        Ok(out)
    }
}

type FreqFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacobianFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;
type RateFn = Arc<dyn Fn(&[f64], &[Complex64], f64) -> Vec<Complex64> + Send + Sync>;
type SingularityFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<Complex64> + Send + Sync>;

/// A perturbed integrable system in action-angle form:
/// dI/dt = eps*h(I, theta; eps), dtheta/dt = omega(I) + eps*g(I, theta; eps).
///
/// The angle argument of `h` and `g` accepts complex values so that theta
/// can be substituted by omega(I)*tau + theta with complex tau.
pub struct SystemModel {
    pub name: String,
    pub dim_action: usize,
    pub dim_angle: usize,
    pub parameters: BTreeMap<String, f64>,
    omega: FreqFn,
    d_omega: JacobianFn,
    h: RateFn,
    g: RateFn,
    /// Singularity hint for the certificate contour, when the singularity
    /// structure is known in closed form: the first entry is the loop
    /// center, the rest are nearby singularities the loop must avoid.
    singularity: Option<SingularityFn>,
}

impl SystemModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        dim_action: usize,
        dim_angle: usize,
        parameters: BTreeMap<String, f64>,
        omega: FreqFn,
        d_omega: JacobianFn,
        h: RateFn,
        g: RateFn,
        singularity: Option<SingularityFn>,
    ) -> Self {
        Self {
            name: name.into(),
            dim_action,
            dim_angle,
            parameters,
            omega,
            d_omega,
            h,
            g,
            singularity,
        }
    }

    pub fn omega(&self, action: &[f64]) -> Vec<f64> {
        debug_assert_eq!(action.len(), self.dim_action);
        (self.omega)(action)
    }

    /// Jacobian D omega, `dim_angle` rows by `dim_action` columns.
    pub fn d_omega(&self, action: &[f64]) -> Vec<Vec<f64>> {
        (self.d_omega)(action)
    }

    pub fn h(&self, action: &[f64], angle: &[Complex64], eps: f64) -> Vec<Complex64> {
        (self.h)(action, angle, eps)
    }

    pub fn g(&self, action: &[f64], angle: &[Complex64], eps: f64) -> Vec<Complex64> {
        (self.g)(action, angle, eps)
    }

    /// h along the complexified resonant orbit: tau -> h(I, omega(I)tau + theta; 0).
    pub fn h_along_orbit(&self, action: &[f64], theta: &[f64], tau: Complex64) -> Vec<Complex64> {
        let om = self.omega(action);
        let angle: Vec<Complex64> = om
            .iter()
            .zip(theta.iter())
            .map(|(w, th)| tau * *w + *th)
            .collect();
        self.h(action, &angle, 0.0)
    }

    /// Complex-time singularities of the resonant orbit: the first entry is
    /// the principal upper-half-plane pole, the rest its nearby companions.
    pub fn singularity(&self, action: &[f64], theta: &[f64]) -> Option<Vec<Complex64>> {
        self.singularity.as_ref().map(|f| f(action, theta))
    }
}

/// Doubling trapezoidal quadrature of a periodic function over one period.
/// Exponentially convergent for analytic periodic integrands.
pub(crate) fn periodic_trapezoid<F>(f: F, period: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut n = 64_usize;
    let mut sum = 0.0;
    for j in 0..n {
        sum += f(period * j as f64 / n as f64)?;
    }
    let mut value = sum * period / n as f64;
    let mut err = f64::INFINITY;
    while n < 1 << 22 {
        let mut odd = 0.0;
        for j in 0..n {
            odd += f(period * (j as f64 + 0.5) / n as f64)?;
        }
        sum += odd;
        n *= 2;
        let next = sum * period / n as f64;
        err = (next - value).abs();
        value = next;
        if err < tol * (1.0 + value.abs()) {
            return Ok(value);
        }
    }
    Err(Error::QuadratureNotConverged(err))
}

/// Action of a periodic orbit, I = (1/2*pi) closed-integral of x2 dx1,
/// by trapezoidal quadrature over one real period. The velocity dx1/dt is
/// taken from the unperturbed field J*DH.
pub fn action_of_orbit(family: &OrbitFamily, param: f64) -> Result<f64> {
    let period = family.period(param)?;
    let value = periodic_trapezoid(
        |t| {
            let x = family.orbit(param, Complex64::new(t, 0.0))?;
            let grad = family.energy_gradient(x);
            // J*DH = (dH/dx2, -dH/dx1)
            Ok((x[1] * grad[1]).re)
        },
        period,
        1e-12,
    )?;
    Ok(value / (2.0 * PI))
}

/// Action-angle chart for an orbit family: the monotone action map sampled
/// on a grid, inverted by bisection.
pub struct ActionAngleChart {
    family: Arc<OrbitFamily>,
    params: Vec<f64>,
    actions: Vec<f64>,
}

/// Builds the chart, verifying on a sampled grid that both the period map
/// and the action map are strictly monotone (dT/dparam must not vanish).
pub fn frequency_chart(family: Arc<OrbitFamily>) -> Result<ActionAngleChart> {
    const GRID: usize = 33;
    let (lo, hi) = family.param_range;
    let mut params = Vec::with_capacity(GRID);
    let mut actions = Vec::with_capacity(GRID);
    let mut periods = Vec::with_capacity(GRID);
    for i in 0..GRID {
        let p = lo + (hi - lo) * i as f64 / (GRID - 1) as f64;
        params.push(p);
        actions.push(action_of_orbit(&family, p)?);
        periods.push(family.period(p)?);
    }
    let monotone = |v: &[f64]| {
        let up = v.windows(2).all(|w| w[1] > w[0]);
        let down = v.windows(2).all(|w| w[1] < w[0]);
        up || down
    };
    if !monotone(&periods) {
        return Err(Error::NonMonotonePeriod);
    }
    if !monotone(&actions) {
        return Err(Error::NonMonotoneAction);
    }
    Ok(ActionAngleChart {
        family,
        params,
        actions,
    })
}

impl ActionAngleChart {
    pub fn family(&self) -> &Arc<OrbitFamily> {
        &self.family
    }

    pub fn action_of_param(&self, param: f64) -> Result<f64> {
        action_of_orbit(&self.family, param)
    }

    /// Inverse of the action map by bisection on the bracketing grid cell.
    pub fn param_of_action(&self, action: f64) -> Result<f64> {
        let increasing = self.actions.last().unwrap() > self.actions.first().unwrap();
        let idx = self
            .actions
            .windows(2)
            .position(|w| {
                let (a, b) = if increasing { (w[0], w[1]) } else { (w[1], w[0]) };
                action >= a && action <= b
            })
            .ok_or(Error::ChartInversion(action))?;
        let (mut lo, mut hi) = (self.params[idx], self.params[idx + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let val = action_of_orbit(&self.family, mid)?;
            let below = if increasing { val < action } else { val > action };
            if below {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo).abs() < 1e-14 * (1.0 + mid.abs()) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn omega_of_param(&self, param: f64) -> Result<f64> {
        Ok(2.0 * PI / self.family.period(param)?)
    }

    pub fn omega(&self, action: f64) -> Result<f64> {
        self.omega_of_param(self.param_of_action(action)?)
    }

    /// dOmega/dI by the chain rule (dOmega/dparam)/(dI/dparam), both sides
    /// by central differences with relative step 1e-5.
    pub fn d_omega_d_action(&self, action: f64) -> Result<f64> {
        let p = self.param_of_action(action)?;
        let h = 1e-5 * p.abs().max(1e-3);
        let om_p = self.omega_of_param(p + h)?;
        let om_m = self.omega_of_param(p - h)?;
        let i_p = action_of_orbit(&self.family, p + h)?;
        let i_m = action_of_orbit(&self.family, p - h)?;
        Ok((om_p - om_m) / (i_p - i_m))
    }
}

/// The transformed action rate of the action-angle reduction:
/// h(I, theta1, theta2) = DH(x) . u(x, theta2) / Omega(I)
/// evaluated at x = x^{param(I)}(theta1 / Omega(I)).
pub fn transformed_h<U>(chart: &ActionAngleChart, u: U, action: f64, theta1: f64, theta2: f64) -> Result<f64>
where
    U: Fn([f64; 2], f64) -> [f64; 2],
{
    let param = chart.param_of_action(action)?;
    let omega = chart.omega_of_param(param)?;
    let x = chart.family.orbit_real(param, theta1 / omega)?;
    let grad = chart.family.energy_gradient([
        Complex64::new(x[0], 0.0),
        Complex64::new(x[1], 0.0),
    ]);
    let uu = u(x, theta2);
    Ok((grad[0].re * uu[0] + grad[1].re * uu[1]) / omega)
}
