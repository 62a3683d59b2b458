//! Direct numerical verification of the subharmonic-orbit prediction:
//! stroboscopic-map fixed points by Newton iteration with continuation in
//! epsilon, and stability via monodromy multipliers.

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::melnikov::{closed_form_j, simple_zeros, ResonanceSpec};
use crate::model::catalog::DuffingBundle;

/// Solutions escaping this radius are declared blown up.
const ESCAPE_RADIUS: f64 = 1e6;

/// Adaptive integrator settings; tolerances are per map, never global.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OdeSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
        }
    }
}

/// Dormand-Prince 5(4) with PI step-size control. Integrates from t0 to t1
/// in either direction.
pub fn dopri5<F, const N: usize>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    settings: &OdeSettings,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if t1 == t0 {
        return Ok(y0);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = dir * (1e-4 * span).min(settings.max_step);
    let mut err_old: f64 = 1.0e-4;
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::StepUnderflow(t));
        }
        steps += 1;
        if steps > 50_000_000 {
            return Err(Error::StepUnderflow(t));
        }

        let stage = |c: &[f64], ks: &[[f64; N]]| -> [f64; N] {
            let mut out = y;
            for (cj, kj) in c.iter().zip(ks.iter()) {
                for i in 0..N {
                    out[i] += h * cj * kj[i];
                }
            }
            out
        };
        let k2 = f(t + h / 5.0, &stage(&[1.0 / 5.0], &[k1]));
        let k3 = f(
            t + 3.0 * h / 10.0,
            &stage(&[3.0 / 40.0, 9.0 / 40.0], &[k1, k2]),
        );
        let k4 = f(
            t + 4.0 * h / 5.0,
            &stage(&[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0], &[k1, k2, k3]),
        );
        let k5 = f(
            t + 8.0 * h / 9.0,
            &stage(
                &[
                    19372.0 / 6561.0,
                    -25360.0 / 2187.0,
                    64448.0 / 6561.0,
                    -212.0 / 729.0,
                ],
                &[k1, k2, k3, k4],
            ),
        );
        let k6 = f(
            t + h,
            &stage(
                &[
                    9017.0 / 3168.0,
                    -355.0 / 33.0,
                    46732.0 / 5247.0,
                    49.0 / 176.0,
                    -5103.0 / 18656.0,
                ],
                &[k1, k2, k3, k4, k5],
            ),
        );
        let y5 = stage(
            &[
                35.0 / 384.0,
                0.0,
                500.0 / 1113.0,
                125.0 / 192.0,
                -2187.0 / 6784.0,
                11.0 / 84.0,
            ],
            &[k1, k2, k3, k4, k5, k6],
        );
        let k7 = f(t + h, &y5);
        // difference of the 5th- and embedded 4th-order solutions
        let e = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut de = 0.0;
            for (ej, kj) in e.iter().zip(ks.iter()) {
                de += ej * kj[i];
            }
            de *= h;
            let sc = settings.abs_tol + settings.rel_tol * y[i].abs().max(y5[i].abs());
            err += (de / sc) * (de / sc);
        }
        err = (err / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y5;
            k1 = k7; // FSAL
            if y.iter().any(|v| !v.is_finite()) || y.iter().any(|v| v.abs() > ESCAPE_RADIUS) {
                return Err(Error::Blowup(t));
            }
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_old.powf(0.4 / 5.0);
            err_old = err.max(1e-10);
            h = (h * fac.clamp(0.2, 5.0)).clamp(-settings.max_step, settings.max_step);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok(y)
}

type Rhs = Arc<dyn Fn(f64, [f64; 2]) -> [f64; 2] + Send + Sync>;

/// The period map of a planar periodically forced system
/// dx/dt = J DH(x) + eps*u(x, nu*t): integrate over one resonant period
/// 2*pi*l/nu.
#[derive(Clone)]
pub struct StroboscopicMap {
    rhs: Rhs,
    pub period: f64,
    pub settings: OdeSettings,
}

impl StroboscopicMap {
    pub fn new(rhs: Rhs, period: f64) -> Self {
        Self {
            rhs,
            period,
            settings: OdeSettings::default(),
        }
    }

    /// The forced Duffing oscillator
    /// x1' = x2, x2' = -(a*x1 + x1^3) + eps*(beta*cos(nu*t) - delta*x2).
    pub fn duffing(a: f64, beta: f64, delta: f64, nu: f64, eps: f64, l: u32) -> Self {
        let rhs: Rhs = Arc::new(move |t, x| {
            [
                x[1],
                -(a * x[0] + x[0] * x[0] * x[0]) + eps * (beta * (nu * t).cos() - delta * x[1]),
            ]
        });
        Self::new(rhs, 2.0 * PI * l as f64 / nu)
    }

    /// Solution at t0 + period starting from x0 at t0.
    pub fn strobe(&self, x0: [f64; 2], t0: f64) -> Result<[f64; 2]> {
        dopri5(
            |t, y: &[f64; 2]| (self.rhs)(t, *y),
            t0,
            x0,
            t0 + self.period,
            &self.settings,
        )
    }

    /// Arbitrary-horizon flow, for energy-drift and return-time checks.
    pub fn flow(&self, x0: [f64; 2], t0: f64, t1: f64) -> Result<[f64; 2]> {
        dopri5(
            |t, y: &[f64; 2]| (self.rhs)(t, *y),
            t0,
            x0,
            t1,
            &self.settings,
        )
    }
}

fn serialize_multipliers<S: Serializer>(
    m: &[Complex64; 2],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [[m[0].re, m[0].im], [m[1].re, m[1].im]].serialize(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Elliptic,
    HyperbolicSaddle,
    Node,
    Degenerate,
}

/// A located subharmonic periodic orbit of the stroboscopic map.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicOrbitResult {
    pub initial_state: [f64; 2],
    pub residual: f64,
    #[serde(serialize_with = "serialize_multipliers")]
    pub floquet_multipliers: [Complex64; 2],
    pub stability: Stability,
    /// The Melnikov phase the orbit locks to.
    pub phase: f64,
    pub eps: f64,
    pub newton_iterations: usize,
}

/// Eigenvalues of a real 2x2 matrix.
fn eigenvalues(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [
            Complex64::new(0.5 * (tr + s), 0.0),
            Complex64::new(0.5 * (tr - s), 0.0),
        ]
    } else {
        let s = (-disc).sqrt();
        [
            Complex64::new(0.5 * tr, 0.5 * s),
            Complex64::new(0.5 * tr, -0.5 * s),
        ]
    }
}

/// Classification by multiplier moduli against the unit circle; moduli
/// within `tol` of 1 are considered on it.
pub fn classify(multipliers: [Complex64; 2], tol: f64) -> Stability {
    let m1 = multipliers[0].norm();
    let m2 = multipliers[1].norm();
    let on1 = (m1 - 1.0).abs() <= tol;
    let on2 = (m2 - 1.0).abs() <= tol;
    let complex_pair = multipliers[0].im != 0.0;
    match (on1, on2) {
        (true, true) => {
            if complex_pair {
                Stability::Elliptic
            } else {
                Stability::Degenerate
            }
        }
        (true, false) | (false, true) => Stability::Degenerate,
        (false, false) => {
            if (m1 - 1.0) * (m2 - 1.0) < 0.0 {
                Stability::HyperbolicSaddle
            } else {
                Stability::Node
            }
        }
    }
}

const FD_STEP: f64 = 1e-7;

/// Finite-difference monodromy matrix of the strobe map at `x`.
pub fn monodromy(map: &StroboscopicMap, x: [f64; 2], t0: f64) -> Result<[[f64; 2]; 2]> {
    let mut m = [[0.0; 2]; 2];
    for j in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[j] += FD_STEP;
        xm[j] -= FD_STEP;
        let pp = map.strobe(xp, t0)?;
        let pm = map.strobe(xm, t0)?;
        for i in 0..2 {
            m[i][j] = (pp[i] - pm[i]) / (2.0 * FD_STEP);
        }
    }
    Ok(m)
}

/// Floquet multipliers and stability of a fixed point of the strobe map.
pub fn floquet(map: &StroboscopicMap, x: [f64; 2], t0: f64) -> Result<([Complex64; 2], Stability)> {
    let m = monodromy(map, x, t0)?;
    let mult = eigenvalues(m);
    Ok((mult, classify(mult, 1e-6)))
}

const NEWTON_MAX_ITERS: usize = 50;
const NEWTON_TOL: f64 = 1e-10;

/// Newton iteration on F(x) = P(x) - x with finite-difference Jacobian.
pub fn newton_fixed_point(
    map: &StroboscopicMap,
    seed: [f64; 2],
    t0: f64,
) -> Result<([f64; 2], f64, usize)> {
    let norm = |v: [f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt();
    let mut x = seed;
    let px = map.strobe(x, t0)?;
    let mut f = [px[0] - x[0], px[1] - x[1]];
    for iter in 1..=NEWTON_MAX_ITERS {
        let residual = norm(f);
        if residual < NEWTON_TOL {
            return Ok((x, residual, iter - 1));
        }
        let m = monodromy(map, x, t0)?;
        let j = [
            [m[0][0] - 1.0, m[0][1]],
            [m[1][0], m[1][1] - 1.0],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return Err(Error::NewtonDiverged {
                iters: iter,
                residual,
                x,
            });
        }
        let dx = [
            (f[0] * j[1][1] - f[1] * j[0][1]) / det,
            (f[1] * j[0][0] - f[0] * j[1][0]) / det,
        ];
        // The map contracts only weakly along the unperturbed orbit, so full
        // Newton steps computed from a noisy near-singular Jacobian can leave
        // the basin; backtrack until the residual actually drops.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let xt = [x[0] - lambda * dx[0], x[1] - lambda * dx[1]];
            if xt[0].is_finite() && xt[1].is_finite() && norm(xt) <= ESCAPE_RADIUS {
                let pt = map.strobe(xt, t0)?;
                let ft = [pt[0] - xt[0], pt[1] - xt[1]];
                if norm(ft) < residual {
                    x = xt;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonDiverged {
                iters: iter,
                residual,
                x,
            });
        }
    }
    let px = map.strobe(x, t0)?;
    let residual = ((px[0] - x[0]).powi(2) + (px[1] - x[1]).powi(2)).sqrt();
    Err(Error::NewtonDiverged {
        iters: NEWTON_MAX_ITERS,
        residual,
        x,
    })
}

/// Continuation range guard for the subharmonic finder.
pub const EPS_MAX: f64 = 0.05;

/// Locates the subharmonic periodic orbit predicted at a simple zero of the
/// Melnikov function near `phi_seed`: seeds Newton on the unperturbed
/// resonant orbit at the matching phase and continues from eps = 0 in four
/// geometric steps.
pub fn find_subharmonic(
    bundle: &DuffingBundle,
    res: &ResonanceSpec,
    delta: f64,
    beta: f64,
    eps: f64,
    phi_seed: f64,
) -> Result<PeriodicOrbitResult> {
    if eps.abs() > EPS_MAX {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} outside continuation range |eps| <= {EPS_MAX}"
        )));
    }
    let cf = closed_form_j(bundle, res)?;
    let zeros = simple_zeros(&cf, delta, beta)?;
    let two_pi = 2.0 * PI;
    let dist = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(two_pi);
        d.min(two_pi - d)
    };
    let (phi0, _) = zeros
        .iter()
        .copied()
        .min_by(|x, y| dist(x.0, phi_seed).partial_cmp(&dist(y.0, phi_seed)).unwrap())
        .expect("simple_zeros returns at least one zero");

    let x0 = bundle.family.orbit_real(res.param_star, -phi0 / res.nu)?;
    let mut x = x0;
    let mut residual = 0.0;
    let mut iters = 0;
    let schedule = if eps == 0.0 {
        vec![0.0]
    } else {
        vec![eps / 8.0, eps / 4.0, eps / 2.0, eps]
    };
    let mut map = StroboscopicMap::duffing(bundle.a, beta, delta, res.nu, 0.0, res.l);
    // secant continuation: extrapolate the branch to the next eps before
    // correcting, since the Newton basin shrinks with eps
    let mut prev: (f64, [f64; 2]) = (0.0, x0);
    let mut cur: (f64, [f64; 2]) = (0.0, x0);
    for &e in &schedule {
        map = StroboscopicMap::duffing(bundle.a, beta, delta, res.nu, e, res.l);
        let seed = if cur.0 > prev.0 {
            let t = (e - cur.0) / (cur.0 - prev.0);
            [
                cur.1[0] + t * (cur.1[0] - prev.1[0]),
                cur.1[1] + t * (cur.1[1] - prev.1[1]),
            ]
        } else {
            cur.1
        };
        let (xs, r, it) = newton_fixed_point(&map, seed, 0.0)?;
        x = xs;
        residual = r;
        iters += it;
        prev = cur;
        cur = (e, xs);
    }
    let (multipliers, stability) = floquet(&map, x, 0.0)?;
    Ok(PeriodicOrbitResult {
        initial_state: x,
        residual,
        floquet_multipliers: multipliers,
        stability,
        phase: phi0,
        eps,
        newton_iterations: iters,
    })
}

/// Unperturbed Duffing energy H = a*x1^2/2 + x1^4/4 + x2^2/2.
pub fn duffing_energy(a: f64, x: [f64; 2]) -> f64 {
    0.5 * a * x[0] * x[0] + 0.25 * x[0].powi(4) + 0.5 * x[1] * x[1]
}

/// Maximum drift of a first-integral candidate of the torqued pendulum
/// dI/dt = eps*(sin th/(1 - kappa cos th) + 1), dth/dt = I, sampled once per
/// nominal period over `periods` periods. With `corrected` the logarithm
/// carries the 1/kappa factor; without it the bare form is monitored.
pub fn pendulum_first_integral_drift(
    kappa: f64,
    eps: f64,
    i0: f64,
    theta0: f64,
    periods: usize,
    corrected: bool,
) -> Result<f64> {
    let f_val = |y: &[f64; 2]| {
        let log_term = (1.0 - kappa * y[1].cos()).ln();
        let scaled = if corrected { log_term / kappa } else { log_term };
        0.5 * y[0] * y[0] - eps * (scaled + y[1])
    };
    // tighter than the map default: drift accumulates over many periods
    let settings = OdeSettings {
        rel_tol: 1e-13,
        abs_tol: 1e-13,
        max_step: f64::INFINITY,
    };
    let period = 2.0 * PI / i0.abs();
    let mut y = [i0, theta0];
    let f0 = f_val(&y);
    let mut drift = 0.0_f64;
    let mut t = 0.0;
    for _ in 0..periods {
        y = dopri5(
            |_t, y: &[f64; 2]| {
                [
                    eps * (y[1].sin() / (1.0 - kappa * y[1].cos()) + 1.0),
                    y[0],
                ]
            },
            t,
            y,
            t + period,
            &settings,
        )?;
        t += period;
        drift = drift.max((f_val(&y) - f0).abs());
    }
    Ok(drift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melnikov::solve_resonance;
    use crate::model::catalog::{duffing, DuffingVariant};

    #[test]
    fn harmonic_oscillator_exact() {
        // y'' = -y over one period
        let y = dopri5(
            |_t, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            2.0 * PI,
            &OdeSettings::default(),
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
    }

    #[test]
    fn integrator_reversibility() {
        let s = OdeSettings::default();
        let f = |t: f64, y: &[f64; 2]| [y[1], -y[0] - y[0].powi(3) + 0.3 * t.cos()];
        let fwd = dopri5(f, 0.0, [0.4, -0.2], 7.7, &s).unwrap();
        let back = dopri5(f, 7.7, fwd, 0.0, &s).unwrap();
        assert!(
            (back[0] - 0.4).abs() < 1e-9 && (back[1] + 0.2).abs() < 1e-9,
            "{back:?}"
        );
    }

    #[test]
    fn strobe_is_identity_on_resonant_orbit() {
        let b = duffing(DuffingVariant::PureCubic).unwrap();
        let res = solve_resonance(&b.family, 1, 1, 1.0).unwrap();
        let x0 = b.family.orbit_real(res.param_star, 0.0).unwrap();
        let map = StroboscopicMap::duffing(b.a, 1.0, 0.0, 1.0, 0.0, 1);
        let px = map.strobe(x0, 0.0).unwrap();
        assert!(
            (px[0] - x0[0]).abs() < 1e-9 && (px[1] - x0[1]).abs() < 1e-9,
            "{px:?} vs {x0:?}"
        );
    }

    #[test]
    fn strobe_preserves_energy_off_resonance() {
        let b = duffing(DuffingVariant::Hardening).unwrap();
        let x0 = b.family.orbit_real(0.31, 0.0).unwrap();
        let map = StroboscopicMap::duffing(b.a, 1.0, 0.0, 1.3, 0.0, 1);
        let px = map.strobe(x0, 0.0).unwrap();
        assert!((duffing_energy(b.a, px) - duffing_energy(b.a, x0)).abs() < 1e-10);
    }

    #[test]
    fn dissipation_shrinks_energy() {
        let map = StroboscopicMap::duffing(1.0, 0.0, 0.5, 1.3, 0.02, 1);
        let x0 = [0.7, 0.0];
        let px = map.strobe(x0, 0.0).unwrap();
        assert!(duffing_energy(1.0, px) < duffing_energy(1.0, x0));
    }

    #[test]
    fn energy_drift_over_hundred_periods() {
        let b = duffing(DuffingVariant::Outer).unwrap();
        let k = 0.9;
        let x0 = b.family.orbit_real(k, 0.0).unwrap();
        let t = 100.0 * b.family.period(k).unwrap();
        let map = StroboscopicMap::duffing(b.a, 0.0, 0.0, 1.0, 0.0, 1);
        let x = map.flow(x0, 0.0, t).unwrap();
        assert!(
            (duffing_energy(b.a, x) - duffing_energy(b.a, x0)).abs() < 1e-10,
            "drift {}",
            (duffing_energy(b.a, x) - duffing_energy(b.a, x0)).abs()
        );
    }

    #[test]
    fn return_time_matches_closed_form_period() {
        for v in [
            DuffingVariant::Hardening,
            DuffingVariant::PureCubic,
            DuffingVariant::InnerPlus,
            DuffingVariant::Outer,
        ] {
            let b = duffing(v).unwrap();
            let p = 0.5 * (b.family.param_range.0 + b.family.param_range.1);
            let x0 = b.family.orbit_real(p, 0.0).unwrap();
            let period = b.family.period(p).unwrap();
            let map = StroboscopicMap::duffing(b.a, 0.0, 0.0, 1.0, 0.0, 1);
            let x = map.flow(x0, 0.0, period).unwrap();
            assert!(
                (x[0] - x0[0]).abs() < 1e-8 && (x[1] - x0[1]).abs() < 1e-8,
                "{v:?}: {x:?} vs {x0:?}"
            );
        }
    }

    #[test]
    fn subharmonic_pair_and_multiplier_product() {
        // conservative case: delta = 0, zeros at phi = 0 and pi
        let b = duffing(DuffingVariant::PureCubic).unwrap();
        let res = solve_resonance(&b.family, 1, 1, 1.0).unwrap();
        let o1 = find_subharmonic(&b, &res, 0.0, 1.0, 0.01, 0.0).unwrap();
        let o2 = find_subharmonic(&b, &res, 0.0, 1.0, 0.01, PI).unwrap();
        assert!(o1.residual < 1e-10 && o2.residual < 1e-10);
        assert!((o1.phase - 0.0).abs() < 1e-12);
        assert!((o2.phase - PI).abs() < 1e-12);
        // opposite stability types of the resonance pair
        let kinds = [o1.stability, o2.stability];
        assert!(kinds.contains(&Stability::HyperbolicSaddle), "{kinds:?}");
        assert!(kinds.contains(&Stability::Elliptic), "{kinds:?}");
        for o in [&o1, &o2] {
            let prod = o.floquet_multipliers[0] * o.floquet_multipliers[1];
            assert!(
                (prod - Complex64::new(1.0, 0.0)).norm() < 1e-6,
                "product {prod}"
            );
        }
    }

    #[test]
    fn multiplier_product_obeys_abel_identity() {
        let b = duffing(DuffingVariant::Hardening).unwrap();
        let res = solve_resonance(&b.family, 1, 1, 1.3).unwrap();
        let (delta, beta, eps) = (0.1, 1.0, 0.01);
        let orbit = find_subharmonic(&b, &res, delta, beta, eps, 0.0).unwrap();
        let expected = (-eps * delta * res.t_star).exp();
        let prod = (orbit.floquet_multipliers[0] * orbit.floquet_multipliers[1]).re;
        assert!(
            (prod - expected).abs() < 1e-6,
            "product {prod} vs {expected}"
        );
    }

    #[test]
    fn unperturbed_fixed_point_multipliers_near_unity() {
        // The unperturbed monodromy is a unipotent shear; finite differences
        // cannot resolve the defective eigenvalue below the shear-amplified
        // noise floor, but the determinant (multiplier product) is clean.
        let b = duffing(DuffingVariant::PureCubic).unwrap();
        let res = solve_resonance(&b.family, 1, 1, 1.0).unwrap();
        let x0 = b.family.orbit_real(res.param_star, 0.0).unwrap();
        let map = StroboscopicMap::duffing(b.a, 1.0, 0.0, 1.0, 0.0, 1);
        let (mult, _) = floquet(&map, x0, 0.0).unwrap();
        for m in mult {
            assert!((m - Complex64::new(1.0, 0.0)).norm() < 1e-3, "{m}");
        }
        let prod = mult[0] * mult[1];
        assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-6, "{prod}");
    }

    #[test]
    fn classification_bands() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let im = (1.0_f64 - 0.94 * 0.94).sqrt();
        assert_eq!(
            classify([c(0.94, im), c(0.94, -im)], 1e-6),
            Stability::Elliptic
        );
        assert_eq!(
            classify([c(1.4, 0.0), c(1.0 / 1.4, 0.0)], 1e-6),
            Stability::HyperbolicSaddle
        );
        assert_eq!(
            classify([c(0.8, 0.0), c(0.9, 0.0)], 1e-6),
            Stability::Node
        );
        assert_eq!(
            classify([c(1.0, 0.0), c(1.0, 0.0)], 1e-6),
            Stability::Degenerate
        );
        assert_eq!(
            classify([c(1.0, 0.0), c(0.9, 0.0)], 1e-6),
            Stability::Degenerate
        );
    }

    #[test]
    fn overdamped_case_reports_no_simple_zero() {
        let b = duffing(DuffingVariant::PureCubic).unwrap();
        let res = solve_resonance(&b.family, 1, 1, 1.0).unwrap();
        assert!(matches!(
            find_subharmonic(&b, &res, 10.0, 0.01, 0.01, 0.0),
            Err(Error::NoSimpleZero { .. })
        ));
    }

    #[test]
    fn eps_range_guard() {
        let b = duffing(DuffingVariant::PureCubic).unwrap();
        let res = solve_resonance(&b.family, 1, 1, 1.0).unwrap();
        assert!(find_subharmonic(&b, &res, 0.0, 1.0, 0.2, 0.0).is_err());
    }

    #[test]
    fn pendulum_first_integral_forms() {
        let corrected = pendulum_first_integral_drift(0.5, 0.05, 1.0, 0.3, 100, true).unwrap();
        let printed = pendulum_first_integral_drift(0.5, 0.05, 1.0, 0.3, 100, false).unwrap();
        assert!(corrected < 1e-8, "corrected drift {corrected:e}");
        assert!(printed > 1e-4, "printed-form drift {printed:e}");
    }
}
