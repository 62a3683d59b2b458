//! The built-in systems: the three forced Duffing oscillators with their
//! closed-form periodic-orbit families, the second-order coupled oscillators,
//! and the pendulum with constant torque.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::elliptic::{
    complete_elliptic_k, complete_elliptic_k_derivative, jacobi_sn_cn_dn, EllipticModulus,
};
use crate::error::{Error, Result};
use crate::model::{OrbitFamily, SystemModel};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Which closed-form Duffing orbit family a bundle carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuffingVariant {
    /// a = +1: oscillations around the single center, parameter k in (0, 1/sqrt2).
    Hardening,
    /// a = 0: the scaling family, parameter alpha > 0.
    PureCubic,
    /// a = -1: orbits inside the right homoclinic loop.
    InnerPlus,
    /// a = -1: orbits inside the left homoclinic loop.
    InnerMinus,
    /// a = -1: orbits outside the separatrix, parameter k in (1/sqrt2, 1).
    Outer,
}

impl DuffingVariant {
    pub fn label(&self) -> &'static str {
        match self {
            DuffingVariant::Hardening => "duffing:a=1",
            DuffingVariant::PureCubic => "duffing:a=0",
            DuffingVariant::InnerPlus => "duffing:a=-1:inner+",
            DuffingVariant::InnerMinus => "duffing:a=-1:inner-",
            DuffingVariant::Outer => "duffing:a=-1:outer",
        }
    }

    pub fn linear_coefficient(&self) -> f64 {
        match self {
            DuffingVariant::Hardening => 1.0,
            DuffingVariant::PureCubic => 0.0,
            DuffingVariant::InnerPlus | DuffingVariant::InnerMinus | DuffingVariant::Outer => -1.0,
        }
    }

    /// The branch sign carried by the Melnikov sine term (the inner families
    /// come in a +/- pair).
    pub fn branch_sign(&self) -> f64 {
        match self {
            DuffingVariant::InnerMinus => -1.0,
            _ => 1.0,
        }
    }
}

/// A Duffing orbit family together with its metadata.
pub struct DuffingBundle {
    pub variant: DuffingVariant,
    /// Coefficient a of the linear stiffness term.
    pub a: f64,
    pub family: Arc<OrbitFamily>,
}

fn duffing_gradient(a: f64) -> impl Fn([Complex64; 2]) -> [Complex64; 2] {
    // H = a x1^2/2 + x1^4/4 + x2^2/2
    move |x| [a * x[0] + x[0] * x[0] * x[0], x[1]]
}

pub fn duffing(variant: DuffingVariant) -> Result<DuffingBundle> {
    let a = variant.linear_coefficient();
    let family = match variant {
        DuffingVariant::Hardening => OrbitFamily {
            name: variant.label().to_string(),
            param_range: (0.02, 0.70),
            orbit: Arc::new(|k, t| {
                let m = EllipticModulus::new(k)?;
                let c = (1.0 - 2.0 * k * k).sqrt();
                let p = jacobi_sn_cn_dn(t / c, &m)?;
                Ok([
                    SQRT2 * k / c * p.cn,
                    -SQRT2 * k / (c * c) * p.sn * p.dn,
                ])
            }),
            period: Arc::new(|k| {
                let m = EllipticModulus::new(k).expect("range-checked");
                4.0 * complete_elliptic_k(&m) * (1.0 - 2.0 * k * k).sqrt()
            }),
            d_period: Arc::new(|k| {
                let m = EllipticModulus::new(k).expect("range-checked");
                let c = (1.0 - 2.0 * k * k).sqrt();
                4.0 * (complete_elliptic_k_derivative(&m) * c
                    - 2.0 * k * complete_elliptic_k(&m) / c)
            }),
            energy_gradient: Arc::new(duffing_gradient(a)),
            pole: Arc::new(|k| {
                let m = EllipticModulus::new(k).expect("range-checked");
                let c = (1.0 - 2.0 * k * k).sqrt();
                Complex64::new(0.0, c * complete_elliptic_k(&m.complementary()))
            }),
            lattice: Arc::new(|k| {
                let m = EllipticModulus::new(k).expect("range-checked");
                let c = (1.0 - 2.0 * k * k).sqrt();
                (
                    2.0 * complete_elliptic_k(&m) * c,
                    2.0 * complete_elliptic_k(&m.complementary()) * c,
                )
            }),
        },
        DuffingVariant::PureCubic => {
            let m = EllipticModulus::new(1.0 / SQRT2).expect("fixed modulus");
            let kk = complete_elliptic_k(&m); // K(1/sqrt2) = K'(1/sqrt2)
            OrbitFamily {
                name: variant.label().to_string(),
                param_range: (0.05, 20.0),
                orbit: Arc::new(move |alpha, t| {
                    let p = jacobi_sn_cn_dn(t * alpha, &m)?;
                    Ok([alpha * p.cn, -alpha * alpha * p.sn * p.dn])
                }),
                period: Arc::new(move |alpha| 4.0 * kk / alpha),
                d_period: Arc::new(move |alpha| -4.0 * kk / (alpha * alpha)),
                energy_gradient: Arc::new(duffing_gradient(a)),
                // the family as printed, x^alpha(t) with argument alpha*t, has
                // its cn-pole at t = i K(1/sqrt2)/alpha
                pole: Arc::new(move |alpha| Complex64::new(0.0, kk / alpha)),
                lattice: Arc::new(move |alpha| (2.0 * kk / alpha, 2.0 * kk / alpha)),
            }
        }
        DuffingVariant::InnerPlus | DuffingVariant::InnerMinus => {
            let sign = variant.branch_sign();
            OrbitFamily {
                name: variant.label().to_string(),
                param_range: (0.02, 0.995),
                orbit: Arc::new(move |k, t| {
                    let m = EllipticModulus::new(k)?;
                    let c = (2.0 - k * k).sqrt();
                    let p = jacobi_sn_cn_dn(t / c, &m)?;
                    Ok([
                        sign * SQRT2 / c * p.dn,
                        -sign * SQRT2 * k * k / (c * c) * p.sn * p.cn,
                    ])
                }),
                period: Arc::new(|k| {
                    let m = EllipticModulus::new(k).expect("range-checked");
                    2.0 * complete_elliptic_k(&m) * (2.0 - k * k).sqrt()
                }),
                d_period: Arc::new(|k| {
                    let m = EllipticModulus::new(k).expect("range-checked");
                    let c = (2.0 - k * k).sqrt();
                    2.0 * (complete_elliptic_k_derivative(&m) * c
                        - k * complete_elliptic_k(&m) / c)
                }),
                energy_gradient: Arc::new(duffing_gradient(a)),
                pole: Arc::new(|k| {
                    let m = EllipticModulus::new(k).expect("range-checked");
                    let c = (2.0 - k * k).sqrt();
                    Complex64::new(0.0, c * complete_elliptic_k(&m.complementary()))
                }),
                lattice: Arc::new(|k| {
                    let m = EllipticModulus::new(k).expect("range-checked");
                    let c = (2.0 - k * k).sqrt();
                    (
                        2.0 * complete_elliptic_k(&m) * c,
                        2.0 * complete_elliptic_k(&m.complementary()) * c,
                    )
                }),
            }
        }
        DuffingVariant::Outer => OrbitFamily {
            // sqrt(2k^2-1) needs k > 1/sqrt2; resonance solving degenerates
            // as k -> 1/sqrt2 from above (period -> 0), hence the 0.72 floor
            name: variant.label().to_string(),
            param_range: (0.72, 0.995),
            orbit: Arc::new(|k, t| {
                let m = EllipticModulus::new(k)?;
                let c = (2.0 * k * k - 1.0).sqrt();
                let p = jacobi_sn_cn_dn(t / c, &m)?;
                Ok([
                    SQRT2 * k / c * p.cn,
                    -SQRT2 * k / (c * c) * p.sn * p.dn,
                ])
            }),
            period: Arc::new(|k| {
                let m = EllipticModulus::new(k).expect("range-checked");
                4.0 * complete_elliptic_k(&m) * (2.0 * k * k - 1.0).sqrt()
            }),
            d_period: Arc::new(|k| {
                let m = EllipticModulus::new(k).expect("range-checked");
                let c = (2.0 * k * k - 1.0).sqrt();
                4.0 * (complete_elliptic_k_derivative(&m) * c
                    + 2.0 * k * complete_elliptic_k(&m) / c)
            }),
            energy_gradient: Arc::new(duffing_gradient(a)),
            pole: Arc::new(|k| {
                let m = EllipticModulus::new(k).expect("range-checked");
                let c = (2.0 * k * k - 1.0).sqrt();
                Complex64::new(0.0, c * complete_elliptic_k(&m.complementary()))
            }),
            lattice: Arc::new(|k| {
                let m = EllipticModulus::new(k).expect("range-checked");
                let c = (2.0 * k * k - 1.0).sqrt();
                (
                    2.0 * complete_elliptic_k(&m) * c,
                    2.0 * complete_elliptic_k(&m.complementary()) * c,
                )
            }),
        },
    };
    Ok(DuffingBundle {
        variant,
        a,
        family: Arc::new(family),
    })
}

/// Second-order coupled oscillators:
/// dI_j/dt = eps(-delta I_j + Omega_j + beta sum_k sin(th_k - th_j)/(1 - kappa cos(th_k - th_j))),
/// dth_j/dt = I_j.
pub fn coupled_oscillators(
    delta: f64,
    beta: f64,
    kappa: f64,
    natural_frequencies: &[f64],
) -> Result<Arc<SystemModel>> {
    let ell = natural_frequencies.len();
    if ell < 2 {
        return Err(Error::InvalidParameter(
            "coupled oscillators need at least 2 nodes".into(),
        ));
    }
    if !(0.0 < kappa && kappa < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa must lie in (0,1), got {kappa}"
        )));
    }
    if delta < 0.0 || beta <= 0.0 || natural_frequencies.iter().any(|w| *w <= 0.0) {
        return Err(Error::InvalidParameter(
            "delta >= 0, beta > 0, Omega_j > 0 required".into(),
        ));
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("delta".into(), delta);
    parameters.insert("beta".into(), beta);
    parameters.insert("kappa".into(), kappa);
    for (j, w) in natural_frequencies.iter().enumerate() {
        parameters.insert(format!("Omega_{}", j + 1), *w);
    }
    let omegas: Vec<f64> = natural_frequencies.to_vec();
    Ok(Arc::new(SystemModel::new(
        "coupled_oscillators",
        ell,
        ell,
        parameters,
        Arc::new(|i: &[f64]| i.to_vec()),
        Arc::new(move |i: &[f64]| {
            let n = i.len();
            (0..n)
                .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
                .collect()
        }),
        Arc::new(move |i: &[f64], theta: &[Complex64], _eps: f64| {
            (0..i.len())
                .map(|jn| {
                    let mut coupling = Complex64::new(0.0, 0.0);
                    for kn in 0..i.len() {
                        if kn == jn {
                            continue;
                        }
                        let d = theta[kn] - theta[jn];
                        coupling += d.sin() / (1.0 - kappa * d.cos());
                    }
                    Complex64::new(-delta * i[jn] + omegas[jn], 0.0) + beta * coupling
                })
                .collect()
        }),
        Arc::new(|i: &[f64], _theta: &[Complex64], _eps: f64| {
            vec![Complex64::new(0.0, 0.0); i.len()]
        }),
        Some(Arc::new(move |i: &[f64], theta: &[f64]| {
            // pole of each pairwise coupling term along the resonant orbit:
            // theta_k - theta_j + (omega_k - omega_j)*tau = +/- i*arccosh(1/kappa);
            // the (1,2) pole leads, followed by every companion the contour
            // must stay clear of (horizontal translates and conjugates)
            let a = (1.0 / kappa).acosh();
            let mut poles = Vec::new();
            for j in 0..i.len() {
                for k in (j + 1)..i.len() {
                    let rate = i[k] - i[j];
                    if rate == 0.0 {
                        continue;
                    }
                    let base = (Complex64::new(0.0, a * rate.signum())
                        - (theta[k] - theta[j]))
                        / rate;
                    let step = 2.0 * PI / rate.abs();
                    if poles.is_empty() {
                        poles.push(base);
                    }
                    for m in -1..=1 {
                        let p = base + m as f64 * step;
                        if (p - poles[0]).norm() > 1e-14 {
                            poles.push(p);
                        }
                        poles.push(p.conj());
                    }
                }
            }
            poles
        })),
    )))
}

/// Pendulum-type oscillator with constant torque:
/// dI/dt = eps(sin th/(1 - kappa cos th) + 1), dth/dt = I.
pub fn pendulum_torque(kappa: f64) -> Result<Arc<SystemModel>> {
    if !(0.0 < kappa && kappa < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa must lie in (0,1), got {kappa}"
        )));
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("kappa".into(), kappa);
    Ok(Arc::new(SystemModel::new(
        "pendulum_torque",
        1,
        1,
        parameters,
        Arc::new(|i: &[f64]| vec![i[0]]),
        Arc::new(|_i: &[f64]| vec![vec![1.0]]),
        Arc::new(move |_i: &[f64], theta: &[Complex64], _eps: f64| {
            vec![theta[0].sin() / (1.0 - kappa * theta[0].cos()) + 1.0]
        }),
        Arc::new(|_i: &[f64], _theta: &[Complex64], _eps: f64| {
            vec![Complex64::new(0.0, 0.0)]
        }),
        Some(Arc::new(move |i: &[f64], theta: &[f64]| {
            let base = Complex64::new(-theta[0] / i[0], (1.0 / kappa).acosh() / i[0]);
            let step = 2.0 * PI / i[0].abs();
            let mut poles = vec![base];
            for m in -1..=1 {
                let p = base + m as f64 * step;
                if m != 0 {
                    poles.push(p);
                }
                poles.push(p.conj());
            }
            poles
        })),
    )))
}

/// One entry of the built-in catalog.
pub enum CatalogEntry {
    Duffing(DuffingBundle),
    System(Arc<SystemModel>),
}

impl CatalogEntry {
    pub fn name(&self) -> String {
        match self {
            CatalogEntry::Duffing(b) => b.variant.label().to_string(),
            CatalogEntry::System(s) => s.name.clone(),
        }
    }
}

/// All built-in systems at reference parameters.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut entries: Vec<CatalogEntry> = [
        DuffingVariant::Hardening,
        DuffingVariant::PureCubic,
        DuffingVariant::InnerPlus,
        DuffingVariant::InnerMinus,
        DuffingVariant::Outer,
    ]
    .into_iter()
    .map(|v| CatalogEntry::Duffing(duffing(v).expect("catalog variants are valid")))
    .collect();
    entries.push(CatalogEntry::System(
        coupled_oscillators(0.1, 1.0, 0.5, &[1.0, 1.0, 1.0]).expect("valid defaults"),
    ));
    entries.push(CatalogEntry::System(
        pendulum_torque(0.5).expect("valid default"),
    ));
    entries
}
