//! Jacobi elliptic functions for real and complex arguments, together with
//! the complete elliptic integrals K(k) and E(k).
//!
//! Real arguments go through an AGM/Landen descent; complex arguments are
//! assembled from two real evaluations (at moduli k and k') via the Jacobi
//! imaginary transformation. Everything here is a pure function.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default guard distance from the pole lattice below which evaluation
/// is refused instead of returning huge values.
pub const POLE_GUARD: f64 = 1e-8;

/// Elliptic modulus k with its complementary modulus k' = sqrt(1 - k^2).
///
/// The open interval (0, 1) is enforced on construction; the degenerate
/// endpoints belong to trigonometric/hyperbolic limits, not to this type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    k: f64,
    k_prime: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::NonFinite("elliptic modulus"));
        }
        if k <= 0.0 || k >= 1.0 {
            return Err(Error::ModulusOutOfRange(k));
        }
        // k'^2 = 1 - k^2 computed as (1-k)(1+k) to keep precision near k = 1
        let k_prime = ((1.0 - k) * (1.0 + k)).sqrt();
        Ok(Self { k, k_prime })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn k_prime(&self) -> f64 {
        self.k_prime
    }

    /// The modulus of the complementary functions, k' as a full modulus.
    pub fn complementary(&self) -> Self {
        Self {
            k: self.k_prime,
            k_prime: self.k,
        }
    }
}

/// One simultaneous evaluation of sn, cn, dn at a complex argument.
#[derive(Debug, Clone, Copy)]
pub struct EllipticPoint {
    pub u: Complex64,
    pub k: EllipticModulus,
    pub sn: Complex64,
    pub cn: Complex64,
    pub dn: Complex64,
}

/// Complete elliptic integral of the first kind by the arithmetic-geometric
/// mean, converged to machine precision.
pub fn complete_elliptic_k(k: &EllipticModulus) -> f64 {
    let mut a = 1.0_f64;
    let mut b = k.k_prime();
    // quadratic convergence: machine precision in well under 32 rounds; the
    // iteration cap matters because a and b can stall one ulp apart
    for _ in 0..32 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    PI / (2.0 * a)
}

/// Complete elliptic integral of the second kind via the AGM sum
/// E = K * (1 - sum 2^(n-1) c_n^2).
pub fn complete_elliptic_e(k: &EllipticModulus) -> f64 {
    let mut a = 1.0_f64;
    let mut b = k.k_prime();
    let mut c = k.k();
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..32 {
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
        if c.abs() <= f64::EPSILON * a {
            break;
        }
    }
    PI / (2.0 * a) * (1.0 - sum)
}

/// dK/dk = (E - k'^2 K) / (k k'^2).
pub fn complete_elliptic_k_derivative(k: &EllipticModulus) -> f64 {
    let kk = complete_elliptic_k(k);
    let ee = complete_elliptic_e(k);
    let kp2 = k.k_prime() * k.k_prime();
    (ee - kp2 * kk) / (k.k() * kp2)
}

/// sn, cn, dn for a real argument by descending Landen transformation
/// (Gauss/AGM chain with backward phase recursion).
pub fn jacobi_real(u: f64, k: &EllipticModulus) -> (f64, f64, f64) {
    let mut emc = k.k_prime() * k.k_prime();
    const CA: f64 = 1e-16;
    let mut a = 1.0_f64;
    let mut dn = 1.0_f64;
    let mut em = [0.0_f64; 16];
    let mut en = [0.0_f64; 16];
    let mut l = 0;
    let mut c = 0.0;
    for i in 0..16 {
        l = i;
        em[i] = a;
        emc = emc.sqrt();
        en[i] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= CA * a {
            break;
        }
        emc *= a;
        a = c;
    }
    let phi = u * c;
    let mut sn = phi.sin();
    let mut cn = phi.cos();
    if sn != 0.0 {
        a = cn / sn;
        c *= a;
        for i in (0..=l).rev() {
            let b = em[i];
            a *= c;
            c *= dn;
            dn = (en[i] + a) / (b + a);
            a = c / b;
        }
        a = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn >= 0.0 { a } else { -a };
        cn = c * sn;
    }
    (sn, cn, dn)
}

/// Distance from `u` to the nearest point of the pole lattice
/// {2mK + (2j+1) i K'}, together with that lattice point.
pub fn nearest_pole(u: Complex64, k: &EllipticModulus) -> (f64, Complex64) {
    let kk = complete_elliptic_k(k);
    let kp = complete_elliptic_k(&k.complementary());
    let m0 = (u.re / (2.0 * kk)).round() as i64;
    let j0 = ((u.im / kp - 1.0) / 2.0).round() as i64;
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    for dm in -1..=1 {
        for dj in -1..=1 {
            let pole = Complex64::new(
                2.0 * (m0 + dm) as f64 * kk,
                (2 * (j0 + dj) + 1) as f64 * kp,
            );
            let d = (u - pole).norm();
            if d < best.0 {
                best = (d, pole);
            }
        }
    }
    best
}

/// sn, cn, dn at a complex argument via the Jacobi imaginary transformation:
/// two real AGM evaluations at moduli k (real part) and k' (imaginary part)
/// are combined through the addition formulas.
///
/// Refuses arguments within `pole_guard` of the pole lattice.
pub fn jacobi_sn_cn_dn_guarded(
    u: Complex64,
    k: &EllipticModulus,
    pole_guard: f64,
) -> Result<EllipticPoint> {
    if !u.re.is_finite() || !u.im.is_finite() {
        return Err(Error::NonFinite("jacobi argument"));
    }
    let (dist, pole) = nearest_pole(u, k);
    if dist <= pole_guard {
        return Err(Error::NearPole {
            arg: u,
            pole,
            guard: pole_guard,
        });
    }
    let (s, c, d) = jacobi_real(u.re, k);
    let (s1, c1, d1) = jacobi_real(u.im, &k.complementary());
    let k2 = k.k() * k.k();
    let denom = c1 * c1 + k2 * (s * s1) * (s * s1);
    let sn = Complex64::new(s * d1, c * d * s1 * c1) / denom;
    let cn = Complex64::new(c * c1, -s * d * s1 * d1) / denom;
    let dn = Complex64::new(d * c1 * d1, -k2 * s * c * s1) / denom;
    Ok(EllipticPoint {
        u,
        k: *k,
        sn,
        cn,
        dn,
    })
}

/// `jacobi_sn_cn_dn_guarded` with the default pole guard.
pub fn jacobi_sn_cn_dn(u: Complex64, k: &EllipticModulus) -> Result<EllipticPoint> {
    jacobi_sn_cn_dn_guarded(u, k, POLE_GUARD)
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy)]
pub struct ComplexWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl ComplexWindow {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::EmptyWindow);
        }
        if ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("window bounds"));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }
}

/// All simple poles of sn/cn/dn inside the window, i.e. the lattice points
/// 2mK + (2j+1) i K', sorted by real part then imaginary part.
pub fn pole_lattice(k: &EllipticModulus, window: &ComplexWindow) -> Vec<Complex64> {
    let kk = complete_elliptic_k(k);
    let kp = complete_elliptic_k(&k.complementary());
    let m_lo = (window.re_min / (2.0 * kk)).ceil() as i64;
    let m_hi = (window.re_max / (2.0 * kk)).floor() as i64;
    let j_lo = (((window.im_min / kp) - 1.0) / 2.0).ceil() as i64;
    let j_hi = (((window.im_max / kp) - 1.0) / 2.0).floor() as i64;
    let mut poles = Vec::new();
    for m in m_lo..=m_hi {
        for j in j_lo..=j_hi {
            poles.push(Complex64::new(
                2.0 * m as f64 * kk,
                (2 * j + 1) as f64 * kp,
            ));
        }
    }
    poles.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    poles
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn modulus(k: f64) -> EllipticModulus {
        EllipticModulus::new(k).unwrap()
    }

    /// Independent oracle: adaptive Simpson quadrature of the defining
    /// integrals of K and E.
    fn quadrature_oracle(k: f64, second_kind: bool) -> f64 {
        fn integrand(theta: f64, k: f64, second_kind: bool) -> f64 {
            let s = k * theta.sin();
            let w = 1.0 - s * s;
            if second_kind {
                w.sqrt()
            } else {
                1.0 / w.sqrt()
            }
        }
        fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64, k: f64, sk: bool, tol: f64) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = integrand(lm, k, sk);
            let frm = integrand(rm, k, sk);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (left + right - whole).abs() < 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                simpson(a, m, fa, flm, fm, k, sk, tol / 2.0)
                    + simpson(m, b, fm, frm, fb, k, sk, tol / 2.0)
            }
        }
        let (a, b) = (0.0, PI / 2.0);
        let fa = integrand(a, k, second_kind);
        let fb = integrand(b, k, second_kind);
        let fm = integrand(0.5 * (a + b), k, second_kind);
        simpson(a, b, fa, fm, fb, k, second_kind, 1e-14)
    }

    /// Independent oracle: Jacobi theta series. Valid for complex z off the
    /// pole lattice; converges geometrically in the nome q.
    fn theta_oracle(u: Complex64, k: &EllipticModulus) -> (Complex64, Complex64, Complex64) {
        let kk = complete_elliptic_k(k);
        let kp = complete_elliptic_k(&k.complementary());
        let q: f64 = (-PI * kp / kk).exp();
        let z = u * PI / (2.0 * kk);
        let mut t1 = Complex64::new(0.0, 0.0);
        let mut t2 = Complex64::new(0.0, 0.0);
        let mut t3 = Complex64::new(1.0, 0.0);
        let mut t4 = Complex64::new(1.0, 0.0);
        let mut t10 = 0.0;
        let mut t20 = 0.0;
        let mut t30 = 1.0;
        let mut t40 = 1.0;
        for n in 0..40_i32 {
            let half = q.powf((n as f64 + 0.5) * (n as f64 + 0.5));
            let full = q.powf(((n + 1) * (n + 1)) as f64);
            let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
            let m = (2 * n + 1) as f64;
            t1 += 2.0 * sgn * half * (m * z).sin();
            t2 += 2.0 * half * (m * z).cos();
            t3 += 2.0 * full * (2.0 * (n as f64 + 1.0) * z).cos();
            t4 += 2.0 * (-sgn) * full * (2.0 * (n as f64 + 1.0) * z).cos();
            t10 += 2.0 * sgn * half * m; // theta1'(0)/... not needed; keep zero-arg values
            let _ = t10;
            t20 += 2.0 * half;
            t30 += 2.0 * full;
            t40 += 2.0 * (-sgn) * full;
        }
        let sn = (t30 / t20) * (t1 / t4);
        let cn = (t40 / t20) * (t2 / t4);
        let dn = (t40 / t30) * (t3 / t4);
        (sn, cn, dn)
    }

    #[test]
    fn modulus_rejects_endpoints() {
        assert!(EllipticModulus::new(0.0).is_err());
        assert!(EllipticModulus::new(1.0).is_err());
        assert!(EllipticModulus::new(f64::NAN).is_err());
        let k = modulus(0.6);
        assert_abs_diff_eq!(k.k() * k.k() + k.k_prime() * k.k_prime(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn complete_k_small_modulus_limit() {
        let k = modulus(1e-8);
        assert_abs_diff_eq!(complete_elliptic_k(&k), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn complete_k_at_one_over_sqrt2() {
        // printed to three decimals as 1.854...
        let k = modulus(1.0 / 2.0_f64.sqrt());
        let kk = complete_elliptic_k(&k);
        assert_abs_diff_eq!(kk, 1.8540746773013719, epsilon = 1e-12);
        assert_eq!(format!("{kk:.3}"), "1.854");
    }

    #[test]
    fn complete_k_matches_quadrature_and_increases() {
        let mut prev = 0.0;
        for i in 1..=9 {
            let kv = 0.1 * i as f64;
            let kk = complete_elliptic_k(&modulus(kv));
            assert_abs_diff_eq!(kk, quadrature_oracle(kv, false), epsilon = 1e-12);
            assert!(kk > prev);
            prev = kk;
        }
    }

    #[test]
    fn complete_e_limits_and_quadrature() {
        assert_abs_diff_eq!(complete_elliptic_e(&modulus(1e-8)), PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(complete_elliptic_e(&modulus(1.0 - 1e-12)), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(
            complete_elliptic_e(&modulus(0.5)),
            quadrature_oracle(0.5, true),
            epsilon = 1e-12
        );
    }

    #[test]
    fn k_derivative_matches_central_difference() {
        let h = 1e-6;
        for &kv in &[0.3, 0.5, 0.8] {
            let d = complete_elliptic_k_derivative(&modulus(kv));
            let fd = (complete_elliptic_k(&modulus(kv + h)) - complete_elliptic_k(&modulus(kv - h)))
                / (2.0 * h);
            assert_abs_diff_eq!(d, fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn jacobi_origin_values() {
        let p = jacobi_sn_cn_dn(Complex64::new(0.0, 0.0), &modulus(0.6)).unwrap();
        assert_abs_diff_eq!(p.sn.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((p.cn - 1.0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((p.dn - 1.0).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_circular_limit() {
        let k = modulus(1e-7);
        for &u in &[0.3, 1.0, 2.5] {
            let p = jacobi_sn_cn_dn(Complex64::new(u, 0.0), &k).unwrap();
            assert_abs_diff_eq!(p.sn.re, u.sin(), epsilon = 1e-10);
            assert_abs_diff_eq!(p.cn.re, u.cos(), epsilon = 1e-10);
        }
    }

    #[test]
    fn jacobi_complex_matches_theta_oracle() {
        let k = modulus(0.6);
        let u = Complex64::new(0.3, 0.4);
        let p = jacobi_sn_cn_dn(u, &k).unwrap();
        let (sn, cn, dn) = theta_oracle(u, &k);
        assert!((p.sn - sn).norm() < 1e-10, "sn {} vs {}", p.sn, sn);
        assert!((p.cn - cn).norm() < 1e-10, "cn {} vs {}", p.cn, cn);
        assert!((p.dn - dn).norm() < 1e-10, "dn {} vs {}", p.dn, dn);
    }

    #[test]
    fn jacobi_theta_oracle_more_points() {
        for &(kv, re, im) in &[(0.3, 1.1, 0.2), (0.8, -0.7, 0.5), (0.95, 0.2, -0.6)] {
            let k = modulus(kv);
            let u = Complex64::new(re, im);
            let p = jacobi_sn_cn_dn(u, &k).unwrap();
            let (sn, cn, dn) = theta_oracle(u, &k);
            assert!((p.sn - sn).norm() < 1e-10);
            assert!((p.cn - cn).norm() < 1e-10);
            assert!((p.dn - dn).norm() < 1e-10);
        }
    }

    #[test]
    fn pole_guard_reports_offending_lattice_point() {
        let k = modulus(0.5);
        let kp = complete_elliptic_k(&k.complementary());
        let u = Complex64::new(1e-10, kp);
        match jacobi_sn_cn_dn(u, &k) {
            Err(Error::NearPole { pole, .. }) => {
                assert_abs_diff_eq!(pole.re, 0.0, epsilon = 1e-14);
                assert_abs_diff_eq!(pole.im, kp, epsilon = 1e-14);
            }
            other => panic!("expected NearPole, got {other:?}"),
        }
    }

    #[test]
    fn identities_on_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        let mut checked = 0;
        while checked < 1000 {
            let kv: f64 = rng.gen_range(0.05..0.95);
            let k = modulus(kv);
            let u = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-3.0..3.0));
            if nearest_pole(u, &k).0 < 1e-2 {
                continue;
            }
            let p = jacobi_sn_cn_dn(u, &k).unwrap();
            let id1 = p.sn * p.sn + p.cn * p.cn - 1.0;
            let id2 = p.dn * p.dn + kv * kv * p.sn * p.sn - 1.0;
            assert!(id1.norm() < 1e-10, "sn^2+cn^2 at u={u} k={kv}: {}", id1.norm());
            assert!(id2.norm() < 1e-10, "dn^2+k^2 sn^2 at u={u} k={kv}: {}", id2.norm());
            checked += 1;
        }
    }

    #[test]
    fn periodicity() {
        let k = modulus(0.7);
        let kk = complete_elliptic_k(&k);
        let kp = complete_elliptic_k(&k.complementary());
        let u = Complex64::new(0.37, 0.21);
        let p = jacobi_sn_cn_dn(u, &k).unwrap();
        let p4k = jacobi_sn_cn_dn(u + 4.0 * kk, &k).unwrap();
        let p2k = jacobi_sn_cn_dn(u + 2.0 * kk, &k).unwrap();
        let pim = jacobi_sn_cn_dn(u + Complex64::new(0.0, 2.0 * kp), &k).unwrap();
        assert!((p4k.sn - p.sn).norm() < 1e-10);
        assert!((p4k.cn - p.cn).norm() < 1e-10);
        assert!((p2k.dn - p.dn).norm() < 1e-10);
        assert!((pim.sn - p.sn).norm() < 1e-10);
    }

    #[test]
    fn derivative_relation() {
        let k = modulus(0.55);
        let h = 1e-5;
        let u = Complex64::new(0.8, 0.3);
        let plus = jacobi_sn_cn_dn(u + h, &k).unwrap();
        let minus = jacobi_sn_cn_dn(u - h, &k).unwrap();
        let p = jacobi_sn_cn_dn(u, &k).unwrap();
        let fd = (plus.sn - minus.sn) / (2.0 * h);
        assert!((fd - p.cn * p.dn).norm() < 1e-6);
    }

    #[test]
    fn pole_lattice_window_around_ikprime() {
        let k = modulus(0.5);
        let kp = complete_elliptic_k(&k.complementary());
        let w = ComplexWindow::new(-0.5, 0.5, 0.5 * kp, 1.5 * kp).unwrap();
        let poles = pole_lattice(&k, &w);
        assert_eq!(poles.len(), 1);
        assert_abs_diff_eq!(poles[0].im, kp, epsilon = 1e-14);
        assert_abs_diff_eq!(poles[0].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn pole_lattice_conjugation_symmetry() {
        let k = modulus(0.5);
        let kp = complete_elliptic_k(&k.complementary());
        let upper = pole_lattice(&k, &ComplexWindow::new(-1.0, 1.0, 0.1, 3.0 * kp).unwrap());
        let lower = pole_lattice(&k, &ComplexWindow::new(-1.0, 1.0, -3.0 * kp, -0.1).unwrap());
        assert_eq!(upper.len(), lower.len());
        for p in &upper {
            assert!(lower.iter().any(|q| (q - p.conj()).norm() < 1e-12));
        }
    }

    #[test]
    fn pole_lattice_count_in_two_periods() {
        // oracle: dense |dn| blow-up scan over a 2-period x 2-period window
        let k = modulus(0.6);
        let kk = complete_elliptic_k(&k);
        let kp = complete_elliptic_k(&k.complementary());
        let w = ComplexWindow::new(-0.1, 4.0 * kk - 0.1, 0.1, 4.0 * kp + 0.1).unwrap();
        let poles = pole_lattice(&k, &w);
        assert_eq!(poles.len(), 4);
        // scan confirms 4 spots where |dn| exceeds 1e3
        let mut hits = 0;
        for p in &poles {
            let probe = p + Complex64::new(5e-4, 0.0);
            let v = jacobi_sn_cn_dn(probe, &k).unwrap();
            if v.dn.norm() > 1e3 {
                hits += 1;
            }
        }
        assert_eq!(hits, 4);
    }

    #[test]
    fn pole_lattice_rejects_empty_window() {
        assert!(ComplexWindow::new(1.0, 1.0, 0.0, 1.0).is_err());
    }
}
