//! Subharmonic Melnikov functions: resonance solving, direct quadrature of
//! the real-time Melnikov integral, and the elliptic closed forms for the
//! built-in Duffing families.

use std::f64::consts::PI;

use crate::elliptic::{complete_elliptic_e, complete_elliptic_k, EllipticModulus};
use crate::error::{Error, Result};
use crate::model::catalog::{DuffingBundle, DuffingVariant};
use crate::model::{periodic_trapezoid, OrbitFamily};

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// A solved l/n resonance: n orbit periods equal l forcing periods.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ResonanceSpec {
    pub l: u32,
    pub n: u32,
    pub nu: f64,
    /// Family parameter at resonance.
    pub param_star: f64,
    /// Orbit frequency 2*pi/T(param_star) = n*nu/l.
    pub omega_star: f64,
    /// Full resonant period 2*pi*l/nu = n*T(param_star).
    pub t_star: f64,
}

/// Solves n*T(param) = 2*pi*l/nu for the family parameter by bisection,
/// after a 64-point scan that locates the bracket and checks that the period
/// map is strictly monotone across the scanned range.
pub fn solve_resonance(family: &OrbitFamily, l: u32, n: u32, nu: f64) -> Result<ResonanceSpec> {
    if l == 0 || n == 0 || gcd(l, n) != 1 {
        return Err(Error::NotCoprime(l, n));
    }
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::NonFinite("forcing frequency nu"));
    }
    let target = 2.0 * PI * l as f64 / (n as f64 * nu);
    let (lo, hi) = family.param_range;
    const SCAN: usize = 64;
    let mut prev_p = lo;
    let mut prev_g = family.period(lo)? - target;
    let mut prev_t = prev_g + target;
    let mut direction = 0.0_f64;
    let mut bracket = None;
    for i in 1..=SCAN {
        let p = lo + (hi - lo) * i as f64 / SCAN as f64;
        let t = family.period(p)?;
        let step = t - prev_t;
        if direction == 0.0 {
            direction = step.signum();
        } else if step.signum() != direction {
            return Err(Error::NonMonotonePeriod);
        }
        let g = t - target;
        if bracket.is_none() && (prev_g == 0.0 || prev_g.signum() != g.signum()) {
            bracket = Some((prev_p, p));
        }
        prev_p = p;
        prev_g = g;
        prev_t = t;
    }
    let (mut a, mut b) = bracket.ok_or(Error::NoBracket(lo, hi))?;
    let mut ga = family.period(a)? - target;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let gm = family.period(mid)? - target;
        if gm == 0.0 || (b - a).abs() < 1e-15 * (1.0 + mid.abs()) {
            a = mid;
            b = mid;
            break;
        }
        if ga.signum() == gm.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    let param_star = 0.5 * (a + b);
    let t_orbit = family.period(param_star)?;
    Ok(ResonanceSpec {
        l,
        n,
        nu,
        param_star,
        omega_star: 2.0 * PI / t_orbit,
        t_star: 2.0 * PI * l as f64 / nu,
    })
}

/// The Duffing forcing field u(x, theta) = (0, beta*cos(theta) - delta*x2).
pub fn duffing_forcing(beta: f64, delta: f64) -> impl Fn([f64; 2], f64) -> [f64; 2] {
    move |x, theta| [0.0, beta * theta.cos() - delta * x[1]]
}

/// The subharmonic Melnikov function at phase `phi` by doubling trapezoidal
/// quadrature of DH(x(t)) . u(x(t), nu*t + phi) over one resonant period.
pub fn melnikov_quadrature<U>(
    family: &OrbitFamily,
    res: &ResonanceSpec,
    u: U,
    phi: f64,
) -> Result<f64>
where
    U: Fn([f64; 2], f64) -> [f64; 2],
{
    periodic_trapezoid(
        |t| {
            let x = family.orbit_real(res.param_star, t)?;
            let grad = family.energy_gradient([x[0].into(), x[1].into()]);
            let uu = u(x, res.nu * t + phi);
            Ok(grad[0].re * uu[0] + grad[1].re * uu[1])
        },
        res.t_star,
        1e-10,
    )
}

/// Closed-form Melnikov coefficients for a Duffing family:
/// M(phi) = -delta*j1 + branch_sign*beta*j2*sin(phi).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MelnikovClosedForm {
    pub j1: f64,
    pub j2: f64,
    pub branch_sign: f64,
}

impl MelnikovClosedForm {
    pub fn eval(&self, delta: f64, beta: f64, phi: f64) -> f64 {
        -delta * self.j1 + self.branch_sign * beta * self.j2 * phi.sin()
    }

    pub fn derivative(&self, beta: f64, phi: f64) -> f64 {
        self.branch_sign * beta * self.j2 * phi.cos()
    }
}

/// Elliptic closed forms of j1 and j2 at a solved resonance.
///
/// j1 integrates x2^2 over the full resonant window (n orbit periods). j2 is
/// the resonant Fourier coefficient of x2 against cos(nu*t + phi); it
/// vanishes unless n = 1, and for the cn-based families additionally unless
/// l is odd.
pub fn closed_form_j(bundle: &DuffingBundle, res: &ResonanceSpec) -> Result<MelnikovClosedForm> {
    let nf = res.n as f64;
    let lf = res.l as f64;
    let nu = res.nu;
    let (j1, j2) = match bundle.variant {
        DuffingVariant::Hardening | DuffingVariant::Outer => {
            let k = res.param_star;
            let m = EllipticModulus::new(k)?;
            let kk = complete_elliptic_k(&m);
            let ee = complete_elliptic_e(&m);
            let kp = complete_elliptic_k(&m.complementary());
            let c2 = if bundle.variant == DuffingVariant::Hardening {
                1.0 - 2.0 * k * k
            } else {
                2.0 * k * k - 1.0
            };
            let c = c2.sqrt();
            let j1 = nf * 8.0 / (3.0 * c2 * c)
                * ((2.0 * k * k - 1.0) * ee + (1.0 - k * k) * kk);
            let j2 = if res.n == 1 && res.l % 2 == 1 {
                2.0 * std::f64::consts::SQRT_2 * PI * nu
                    / (PI * lf * kp / (2.0 * kk)).cosh()
            } else {
                0.0
            };
            (j1, j2)
        }
        DuffingVariant::PureCubic => {
            let m = EllipticModulus::new(1.0 / std::f64::consts::SQRT_2)?;
            let kk = complete_elliptic_k(&m);
            let alpha = res.param_star;
            let j1 = nf * 4.0 / 3.0 * alpha.powi(3) * kk;
            let j2 = if res.n == 1 && res.l % 2 == 1 {
                2.0 * std::f64::consts::SQRT_2 * PI * nu / (PI * lf / 2.0).cosh()
            } else {
                0.0
            };
            (j1, j2)
        }
        DuffingVariant::InnerPlus | DuffingVariant::InnerMinus => {
            let k = res.param_star;
            let m = EllipticModulus::new(k)?;
            let kk = complete_elliptic_k(&m);
            let ee = complete_elliptic_e(&m);
            let kp = complete_elliptic_k(&m.complementary());
            let c2 = 2.0 - k * k;
            let c = c2.sqrt();
            let j1 = nf * 4.0 / (3.0 * c2 * c)
                * ((2.0 - k * k) * ee - 2.0 * (1.0 - k * k) * kk);
            let j2 = if res.n == 1 {
                std::f64::consts::SQRT_2 * PI * nu / (PI * lf * kp / kk).cosh()
            } else {
                0.0
            };
            (j1, j2)
        }
    };
    Ok(MelnikovClosedForm {
        j1,
        j2,
        branch_sign: bundle.variant.branch_sign(),
    })
}

/// (j1, signed j2) recovered from quadrature alone: j1 from the dissipative
/// part at beta = 0, signed j2 from the forced part at phi = pi/2.
pub fn quadrature_coefficients(
    family: &OrbitFamily,
    res: &ResonanceSpec,
) -> Result<(f64, f64)> {
    let j1 = -melnikov_quadrature(family, res, duffing_forcing(0.0, 1.0), 0.0)?;
    let j2_signed = melnikov_quadrature(family, res, duffing_forcing(1.0, 0.0), 0.5 * PI)?;
    Ok((j1, j2_signed))
}

/// Simple zeros of M(phi) = -delta*j1 + s*beta*j2*sin(phi) on [0, 2*pi),
/// each returned with dM/dphi there. Requires |delta*j1| < |beta*j2|.
pub fn simple_zeros(
    cf: &MelnikovClosedForm,
    delta: f64,
    beta: f64,
) -> Result<Vec<(f64, f64)>> {
    let dj1 = delta * cf.j1;
    let bj2 = cf.branch_sign * beta * cf.j2;
    if dj1.abs() >= bj2.abs() {
        return Err(Error::NoSimpleZero {
            phi: 0.0,
            dj1: dj1.abs(),
            bj2: bj2.abs(),
        });
    }
    let s = dj1 / bj2; // sin(phi) at the zero, |s| < 1
    let phi0 = s.asin();
    let mut zeros = vec![phi0, PI - phi0];
    for z in zeros.iter_mut() {
        if *z < 0.0 {
            *z += 2.0 * PI;
        }
    }
    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(zeros.into_iter().map(|phi| (phi, bj2 * phi.cos())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::catalog::duffing;

    fn resonant(
        variant: DuffingVariant,
        l: u32,
        n: u32,
        nu: f64,
    ) -> (DuffingBundle, ResonanceSpec) {
        let b = duffing(variant).unwrap();
        let r = solve_resonance(&b.family, l, n, nu).unwrap();
        (b, r)
    }

    #[test]
    fn resonance_satisfies_period_identity() {
        for (variant, l, n, nu) in [
            (DuffingVariant::Hardening, 1, 1, 1.3),
            (DuffingVariant::Hardening, 3, 1, 3.9),
            (DuffingVariant::Hardening, 1, 2, 0.65),
            (DuffingVariant::PureCubic, 1, 1, 2.0),
            (DuffingVariant::InnerPlus, 2, 1, 2.0),
            (DuffingVariant::Outer, 1, 1, 1.0),
        ] {
            let (b, r) = resonant(variant, l, n, nu);
            let t = b.family.period(r.param_star).unwrap();
            let residual = (n as f64 * t - 2.0 * PI * l as f64 / nu).abs();
            assert!(residual < 1e-10, "{variant:?} {l}/{n}: residual {residual:e}");
            assert!((r.omega_star - n as f64 * nu / l as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_cubic_resonance_closed_form() {
        // T = 4K/alpha = 2*pi*l/(n*nu) gives alpha* = 2*K*n*nu/(pi*l)
        let m = EllipticModulus::new(1.0 / std::f64::consts::SQRT_2).unwrap();
        let kk = complete_elliptic_k(&m);
        let (_, r) = resonant(DuffingVariant::PureCubic, 1, 1, 2.0);
        assert!((r.param_star - 2.0 * kk * 2.0 / PI).abs() < 1e-11);
    }

    #[test]
    fn non_coprime_rejected() {
        let b = duffing(DuffingVariant::Hardening).unwrap();
        assert!(matches!(
            solve_resonance(&b.family, 2, 4, 1.0),
            Err(Error::NotCoprime(2, 4))
        ));
    }

    #[test]
    fn out_of_reach_resonance_has_no_bracket() {
        // hardening periods lie strictly below 2*pi, so nu = 1, l = n = 1 has
        // no solution
        let b = duffing(DuffingVariant::Hardening).unwrap();
        assert!(matches!(
            solve_resonance(&b.family, 1, 1, 1.0),
            Err(Error::NoBracket(..))
        ));
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for (variant, l, n, nu) in [
            (DuffingVariant::Hardening, 1, 1, 1.3),
            (DuffingVariant::Hardening, 3, 1, 3.9),
            (DuffingVariant::PureCubic, 1, 1, 2.0),
            (DuffingVariant::PureCubic, 3, 1, 1.0),
            (DuffingVariant::InnerPlus, 1, 1, 1.0),
            (DuffingVariant::InnerPlus, 2, 1, 2.0),
            (DuffingVariant::InnerMinus, 1, 1, 1.0),
            (DuffingVariant::Outer, 1, 1, 1.0),
            (DuffingVariant::Outer, 3, 1, 3.0),
        ] {
            let (b, r) = resonant(variant, l, n, nu);
            let cf = closed_form_j(&b, &r).unwrap();
            let (j1q, j2q) = quadrature_coefficients(&b.family, &r).unwrap();
            assert!(
                (cf.j1 - j1q).abs() < 1e-8 * (1.0 + j1q.abs()),
                "{variant:?} {l}/{n}: j1 closed {} vs quad {}",
                cf.j1,
                j1q
            );
            assert!(
                (cf.branch_sign * cf.j2 - j2q).abs() < 1e-8 * (1.0 + j2q.abs()),
                "{variant:?} {l}/{n}: j2 closed {} vs quad {}",
                cf.branch_sign * cf.j2,
                j2q
            );
        }
    }

    #[test]
    fn even_l_or_higher_n_kills_forcing_term() {
        // cn-based families couple to cos(nu*t) only at odd l with n = 1
        let (b, r) = resonant(DuffingVariant::Hardening, 1, 2, 0.65);
        let cf = closed_form_j(&b, &r).unwrap();
        assert_eq!(cf.j2, 0.0);
        let (_, j2q) = quadrature_coefficients(&b.family, &r).unwrap();
        assert!(j2q.abs() < 1e-9, "j2 quad = {j2q:e}");

        let (b, r) = resonant(DuffingVariant::Hardening, 2, 1, 2.6);
        let cf = closed_form_j(&b, &r).unwrap();
        assert_eq!(cf.j2, 0.0);
        let (_, j2q) = quadrature_coefficients(&b.family, &r).unwrap();
        assert!(j2q.abs() < 1e-9, "j2 quad = {j2q:e}");
    }

    #[test]
    fn inner_families_accept_even_l() {
        // dn-based families have all integer harmonics
        let (b, r) = resonant(DuffingVariant::InnerPlus, 2, 1, 2.0);
        let cf = closed_form_j(&b, &r).unwrap();
        assert!(cf.j2 > 0.0);
    }

    #[test]
    fn inner_branch_signs_are_opposite() {
        let (bp, rp) = resonant(DuffingVariant::InnerPlus, 1, 1, 1.0);
        let (bm, rm) = resonant(DuffingVariant::InnerMinus, 1, 1, 1.0);
        let (_, j2p) = quadrature_coefficients(&bp.family, &rp).unwrap();
        let (_, j2m) = quadrature_coefficients(&bm.family, &rm).unwrap();
        assert!((j2p + j2m).abs() < 1e-9, "{j2p} vs {j2m}");
        assert!(j2p != 0.0);
    }

    #[test]
    fn melnikov_zeros_are_zeros_of_quadrature() {
        let (b, r) = resonant(DuffingVariant::Hardening, 1, 1, 1.3);
        let cf = closed_form_j(&b, &r).unwrap();
        let (delta, beta) = (0.1, 1.0);
        let zeros = simple_zeros(&cf, delta, beta).unwrap();
        assert_eq!(zeros.len(), 2);
        for (phi, dm) in zeros {
            let m = melnikov_quadrature(&b.family, &r, duffing_forcing(beta, delta), phi)
                .unwrap();
            assert!(m.abs() < 1e-8, "M({phi}) = {m:e}");
            assert!(dm.abs() > 1e-3);
            // dM/dphi against a central difference of the quadrature
            let h = 1e-5;
            let mp = melnikov_quadrature(&b.family, &r, duffing_forcing(beta, delta), phi + h)
                .unwrap();
            let mm = melnikov_quadrature(&b.family, &r, duffing_forcing(beta, delta), phi - h)
                .unwrap();
            assert!((dm - (mp - mm) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn no_simple_zero_when_dissipation_dominates() {
        let (b, r) = resonant(DuffingVariant::Hardening, 1, 1, 1.3);
        let cf = closed_form_j(&b, &r).unwrap();
        assert!(matches!(
            simple_zeros(&cf, 10.0, 0.01),
            Err(Error::NoSimpleZero { .. })
        ));
    }
}
