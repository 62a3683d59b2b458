//! Closed-loop quadrature in the complex plane.
//!
//! Circular contours only; the trapezoidal rule on a uniformly parametrized
//! circle converges exponentially for integrands analytic on an annulus
//! around the circle, so the loop integrals here need only sample doubling
//! with a last-doubling error estimate.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Margin used by the strict forbidden-line inequality.
const LINE_MARGIN: f64 = 1e-12;

/// Smallest radius `default_contour` will accept.
pub const RADIUS_FLOOR: f64 = 1e-6;

/// A closed circular loop in complex time.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ContourSpec {
    #[serde(serialize_with = "crate::certificate::serialize_complex")]
    pub center: Complex64,
    pub radius: f64,
    pub initial_samples: usize,
    pub tol: f64,
    pub max_samples: usize,
}

impl ContourSpec {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self {
            center,
            radius,
            initial_samples: 64,
            tol: 1e-10,
            max_samples: 65536,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_samples(mut self, initial: usize, max: usize) -> Self {
        self.initial_samples = initial.max(8).next_power_of_two();
        self.max_samples = max;
        self
    }

    /// Geometric check of assumption (A2): the loop must stay clear of the
    /// vertical lines Re = 0 and Re = t_star.
    pub fn check_forbidden_lines(&self, t_star: f64) -> Result<()> {
        if self.center.re.abs() > self.radius + LINE_MARGIN
            && (self.center.re - t_star).abs() > self.radius + LINE_MARGIN
        {
            Ok(())
        } else {
            Err(Error::ForbiddenLine {
                center: self.center,
                t_star,
            })
        }
    }
}

/// Converged loop integral with its last-doubling error estimate.
#[derive(Debug, Clone, Copy)]
pub struct ContourResult {
    pub value: Complex64,
    pub samples_used: usize,
    pub est_error: f64,
}

/// Counterclockwise loop integral of `f` over the circle described by `spec`.
///
/// The sample count doubles until successive trapezoidal values differ by
/// less than `spec.tol`; previously evaluated nodes are reused at every
/// doubling.
pub fn integrate_loop<F>(f: F, spec: &ContourSpec) -> Result<ContourResult>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let c = spec.center;
    let r = spec.radius;
    let eval = |theta: f64| -> Result<Complex64> {
        let dir = Complex64::new(theta.cos(), theta.sin());
        let z = c + r * dir;
        let fz = f(z).map_err(|e| Error::ContourSample {
            at: z,
            source: Box::new(e),
        })?;
        // dz = i r e^{i theta} d theta
        Ok(fz * Complex64::new(0.0, 1.0) * r * dir)
    };

    let mut n = spec.initial_samples.max(8);
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..n {
        sum += eval(2.0 * PI * j as f64 / n as f64)?;
    }
    let mut value = sum * 2.0 * PI / n as f64;
    let mut est_error = f64::INFINITY;
    while n < spec.max_samples {
        // new nodes interleave midway between the old ones
        let mut odd = Complex64::new(0.0, 0.0);
        for j in 0..n {
            odd += eval(2.0 * PI * (j as f64 + 0.5) / n as f64)?;
        }
        sum += odd;
        n *= 2;
        let next = sum * 2.0 * PI / n as f64;
        est_error = (next - value).norm();
        value = next;
        if est_error < spec.tol {
            return Ok(ContourResult {
                value,
                samples_used: n,
                est_error,
            });
        }
    }
    Err(Error::ContourNotConverged {
        max_samples: spec.max_samples,
        est_error,
    })
}

/// Residue of `f` at an isolated pole: (1/2*pi*i) times the loop integral
/// over a circle of the given radius.
pub fn residue_at<F>(f: F, pole: Complex64, radius: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let res = integrate_loop(f, &ContourSpec::new(pole, radius))?;
    Ok(res.value / Complex64::new(0.0, 2.0 * PI))
}

/// Circle around `pole` with radius chosen as the minimum of half the
/// distance to the nearest other singularity and half the distance to each
/// forbidden vertical line Re = 0, Re = t_star.
pub fn default_contour(
    pole: Complex64,
    nearby_singularities: &[Complex64],
    t_star: f64,
) -> Result<ContourSpec> {
    if pole.re.abs() <= LINE_MARGIN || (pole.re - t_star).abs() <= LINE_MARGIN {
        return Err(Error::ForbiddenLine {
            center: pole,
            t_star,
        });
    }
    let mut radius = 0.5 * pole.re.abs().min((pole.re - t_star).abs());
    for s in nearby_singularities {
        let d = (s - pole).norm();
        if d > 0.0 {
            radius = radius.min(0.5 * d);
        }
    }
    if radius < RADIUS_FLOOR {
        return Err(Error::RadiusFloor(radius));
    }
    Ok(ContourSpec::new(pole, radius))
}
