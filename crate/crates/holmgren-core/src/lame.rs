//! Lamé parameters and truncated Fourier–Bessel eigenfunction evaluation.
//!
//! A Lamé eigenfunction −L(u) = κu admits a radial wave expansion around the
//! origin with coefficients {a_m, b_m}. In the complex basis e₁ = (1, i)ᵀ,
//! e₂ = (1, −i)ᵀ the expansion, its gradient, and the boundary traction
//! T_ν u = 2μ∂_ν u + λν(∇·u) + μτ(∂₂u₁ − ∂₁u₂) on the two sector arms
//!
//! * Γ⁻ — the segment along the positive x-axis (φ = 0, ν = (0, −1)),
//! * Γ⁺ — the segment at opening angle φ₀ (ν = (−sin φ₀, cos φ₀)),
//!
//! all reduce to series in Bessel functions J_{m−2}, …, J_{m+2}. This module
//! provides both the direct evaluators (value/gradient/traction from the
//! chain rule) and the arm series; agreement between the two code paths is a
//! key correctness certificate, exercised in the tests and the acceptance
//! suite.
//!
//! The complex 2-vector dot product used throughout is bilinear
//! (unconjugated): e₁·e₁ = e₂·e₂ = 0 and e₁·e₂ = 2.

use num_complex::Complex64;
use thiserror::Error;

use crate::specfun::bessel_j;

/// e₁ = (1, i)ᵀ.
pub const E1: [Complex64; 2] = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
/// e₂ = (1, −i)ᵀ.
pub const E2: [Complex64; 2] = [Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Errors raised by parameter construction and evaluator preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LameError {
    #[error("strong convexity violated: {0}")]
    ConvexityViolated(String),
    #[error("eigenvalue must be positive, got {0}")]
    NonPositiveEigenvalue(f64),
    #[error("normal vector must have unit length, |nu| = {0}")]
    NonUnitNormal(f64),
}

/// Lamé constants, eigenvalue, and the derived wavenumbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParams {
    pub lambda: f64,
    pub mu: f64,
    pub kappa: f64,
    /// Compressional wavenumber k_p = √(κ/(λ+2μ)).
    pub k_p: f64,
    /// Shear wavenumber k_s = √(κ/μ); always k_p < k_s under convexity.
    pub k_s: f64,
}

/// Validates strong convexity (μ > 0, λ + μ > 0) and κ > 0, then derives the
/// wavenumbers.
pub fn make_params(lambda: f64, mu: f64, kappa: f64) -> Result<LameParams, LameError> {
    if !(mu > 0.0) {
        return Err(LameError::ConvexityViolated(format!("mu = {mu} must be > 0")));
    }
    if !(lambda + mu > 0.0) {
        return Err(LameError::ConvexityViolated(format!(
            "lambda + mu = {} must be > 0",
            lambda + mu
        )));
    }
    if !(kappa > 0.0) {
        return Err(LameError::NonPositiveEigenvalue(kappa));
    }
    Ok(LameParams {
        lambda,
        mu,
        kappa,
        k_p: (kappa / (lambda + 2.0 * mu)).sqrt(),
        k_s: (kappa / mu).sqrt(),
    })
}

/// Truncated coefficient sequence {a_m, b_m}, m = 0..=M.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl CoeffSeq {
    /// All-zero sequence of truncation order M (so M+1 entries per family).
    pub fn zeros(order: usize) -> Self {
        assert!(order <= 60, "truncation order exceeds the cylinder-order cap");
        CoeffSeq {
            a: vec![Complex64::new(0.0, 0.0); order + 1],
            b: vec![Complex64::new(0.0, 0.0); order + 1],
        }
    }

    /// Truncation order M.
    pub fn order(&self) -> usize {
        debug_assert_eq!(self.a.len(), self.b.len());
        self.a.len() - 1
    }
}

/// Point in polar coordinates, r ≥ 0, φ ∈ (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(r: f64, phi: f64) -> Self {
        PolarPoint { r, phi }
    }

    pub fn to_cartesian(self) -> [f64; 2] {
        [self.r * self.phi.cos(), self.r * self.phi.sin()]
    }

    pub fn from_cartesian(x: [f64; 2]) -> Self {
        PolarPoint {
            r: x[0].hypot(x[1]),
            phi: x[1].atan2(x[0]),
        }
    }
}

/// Which sector arm a boundary series lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    /// Γ⁻: the arm along the positive x-axis, outward normal (0, −1).
    Minus,
    /// Γ⁺: the arm at angle φ₀, outward normal (−sin φ₀, cos φ₀).
    Plus { phi0: f64 },
}

impl Side {
    /// Outward unit normal of the arm.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Side::Minus => [0.0, -1.0],
            Side::Plus { phi0 } => [-phi0.sin(), phi0.cos()],
        }
    }

    /// Polar angle of points on the arm.
    pub fn angle(self) -> f64 {
        match self {
            Side::Minus => 0.0,
            Side::Plus { phi0 } => phi0,
        }
    }
}

/// Converts e-basis coefficients (c₁, c₂) to Cartesian components
/// c₁e₁ + c₂e₂ = (c₁ + c₂, i(c₁ − c₂)).
pub fn from_e_basis(c1: Complex64, c2: Complex64) -> [Complex64; 2] {
    [c1 + c2, I * (c1 - c2)]
}

/// Bilinear (unconjugated) dot product of complex 2-vectors.
pub fn dot(u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
    u[0] * v[0] + u[1] * v[1]
}

fn jn(order: i64, t: f64) -> f64 {
    bessel_j(order as i32, t).expect("cylinder order within cap and argument finite")
}

/// Evaluates the truncated radial wave expansion u(x).
pub fn eval_u(c: &CoeffSeq, p: &LameParams, x: PolarPoint) -> [Complex64; 2] {
    let (kp, ks) = (p.k_p, p.k_s);
    let mut c1 = Complex64::default();
    let mut c2 = Complex64::default();
    for m in 0..=c.order() as i64 {
        let em1 = (I * (m - 1) as f64 * x.phi).exp();
        let ep1 = (I * (m + 1) as f64 * x.phi).exp();
        let (am, bm) = (c.a[m as usize], c.b[m as usize]);
        c1 += kp / 2.0 * am * em1 * jn(m - 1, kp * x.r)
            + I * ks / 2.0 * bm * em1 * jn(m - 1, ks * x.r);
        c2 += -kp / 2.0 * am * ep1 * jn(m + 1, kp * x.r)
            + I * ks / 2.0 * bm * ep1 * jn(m + 1, ks * x.r);
    }
    from_e_basis(c1, c2)
}

/// Evaluates the gradient ∂u_i/∂x_j (row i, column j).
///
/// The polar chain rule ∂/∂x₁ = cos φ ∂_r − (sin φ/r)∂_φ is applied after the
/// φ-derivative has been reduced with (m±1)J_{m±1}(kr)/r =
/// (k/2)(J_{m±1−1}(kr) + J_{m±1+1}(kr)), which removes the 1/r factor; the
/// result is therefore finite at r = 0 (the analytic series limit).
pub fn eval_grad_u(c: &CoeffSeq, p: &LameParams, x: PolarPoint) -> [[Complex64; 2]; 2] {
    let (kp, ks) = (p.k_p, p.k_s);
    let (kp2, ks2) = (kp * kp, ks * ks);
    // ∂u_i/∂r and (1/r)∂u_i/∂φ accumulated separately.
    let mut dr = [Complex64::default(); 2];
    let mut dphi_over_r = [Complex64::default(); 2];
    for m in 0..=c.order() as i64 {
        let em1 = (I * (m - 1) as f64 * x.phi).exp();
        let ep1 = (I * (m + 1) as f64 * x.phi).exp();
        let (am, bm) = (c.a[m as usize], c.b[m as usize]);
        let (jpm2, jpm, jpp2) = (jn(m - 2, kp * x.r), jn(m, kp * x.r), jn(m + 2, kp * x.r));
        let (jsm2, jsm, jsp2) = (jn(m - 2, ks * x.r), jn(m, ks * x.r), jn(m + 2, ks * x.r));

        dr[0] += kp2 / 4.0 * am * (em1 * jpm2 - (em1 + ep1) * jpm + ep1 * jpp2)
            + I * ks2 / 4.0 * bm * (em1 * jsm2 - (em1 - ep1) * jsm - ep1 * jsp2);
        dr[1] += I * kp2 / 4.0 * am * (em1 * jpm2 - (em1 - ep1) * jpm - ep1 * jpp2)
            + ks2 / 4.0 * bm * (-em1 * jsm2 + (em1 + ep1) * jsm - ep1 * jsp2);

        // (m−1)J_{m−1}/r → (k/2)(J_{m−2}+J_m), (m+1)J_{m+1}/r → (k/2)(J_m+J_{m+2}).
        let ap = em1 * (jpm2 + jpm);
        let bp = ep1 * (jpm + jpp2);
        let as_ = em1 * (jsm2 + jsm);
        let bs = ep1 * (jsm + jsp2);
        dphi_over_r[0] += I * kp2 / 4.0 * am * (ap - bp) - ks2 / 4.0 * bm * (as_ + bs);
        dphi_over_r[1] += -kp2 / 4.0 * am * (ap + bp) - I * ks2 / 4.0 * bm * (as_ - bs);
    }
    let (cp, sp) = (x.phi.cos(), x.phi.sin());
    let mut grad = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        grad[i][0] = cp * dr[i] - sp * dphi_over_r[i];
        grad[i][1] = sp * dr[i] + cp * dphi_over_r[i];
    }
    grad
}

/// Assembles T_ν u = 2μ(∇u)ν + λν(∇·u) + μτ(∂₂u₁ − ∂₁u₂), τ = (−ν₂, ν₁),
/// from a precomputed gradient.
pub fn traction_from_grad(
    grad: &[[Complex64; 2]; 2],
    nu: [f64; 2],
    lambda: f64,
    mu: f64,
) -> [Complex64; 2] {
    let div = grad[0][0] + grad[1][1];
    let curl = grad[0][1] - grad[1][0];
    let tau = [-nu[1], nu[0]];
    [
        2.0 * mu * (grad[0][0] * nu[0] + grad[0][1] * nu[1]) + lambda * nu[0] * div
            + mu * tau[0] * curl,
        2.0 * mu * (grad[1][0] * nu[0] + grad[1][1] * nu[1]) + lambda * nu[1] * div
            + mu * tau[1] * curl,
    ]
}

/// Traction evaluated by direct differentiation of the expansion.
pub fn traction_direct(
    c: &CoeffSeq,
    p: &LameParams,
    x: PolarPoint,
    normal: [f64; 2],
) -> Result<[Complex64; 2], LameError> {
    let norm = normal[0].hypot(normal[1]);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(LameError::NonUnitNormal(norm));
    }
    let grad = eval_grad_u(c, p, x);
    Ok(traction_from_grad(&grad, normal, p.lambda, p.mu))
}

/// Traction on an arm evaluated through its radial wave series.
///
/// For Γ⁻ the series reads (in e-basis coefficients)
///   c₁ = Σ −(i k_p²/2) a_m [μ J_{m−2}(k_p r) + (λ+μ) J_m(k_p r)]
///        + (k_s²/2) b_m μ J_{m−2}(k_s r),
///   c₂ = Σ (i k_p²/2) a_m [(λ+μ) J_m(k_p r) + μ J_{m+2}(k_p r)]
///        + (k_s²/2) b_m μ J_{m+2}(k_s r),
/// and for Γ⁺ the same structure with phases E^{m−1}, E^{m+1} (E = e^{iφ₀})
/// and globally flipped orientation of the normal.
pub fn traction_series(c: &CoeffSeq, p: &LameParams, side: Side, r: f64) -> [Complex64; 2] {
    let (c1, c2) = traction_series_e_basis(c, p, side, r);
    from_e_basis(c1, c2)
}

fn traction_series_e_basis(c: &CoeffSeq, p: &LameParams, side: Side, r: f64) -> (Complex64, Complex64) {
    let (kp, ks) = (p.k_p, p.k_s);
    let (kp2, ks2) = (kp * kp, ks * ks);
    let (lam, mu) = (p.lambda, p.mu);
    let mut c1 = Complex64::default();
    let mut c2 = Complex64::default();
    match side {
        Side::Minus => {
            for m in 0..=c.order() as i64 {
                let (am, bm) = (c.a[m as usize], c.b[m as usize]);
                c1 += -I * kp2 / 2.0 * am * (mu * jn(m - 2, kp * r) + (lam + mu) * jn(m, kp * r))
                    + ks2 / 2.0 * bm * mu * jn(m - 2, ks * r);
                c2 += I * kp2 / 2.0 * am * ((lam + mu) * jn(m, kp * r) + mu * jn(m + 2, kp * r))
                    + ks2 / 2.0 * bm * mu * jn(m + 2, ks * r);
            }
        }
        Side::Plus { phi0 } => {
            for m in 0..=c.order() as i64 {
                let em1 = (I * (m - 1) as f64 * phi0).exp();
                let ep1 = (I * (m + 1) as f64 * phi0).exp();
                let (am, bm) = (c.a[m as usize], c.b[m as usize]);
                c1 += I * kp2 / 2.0
                    * am
                    * em1
                    * (mu * jn(m - 2, kp * r) + (lam + mu) * jn(m, kp * r))
                    - ks2 / 2.0 * bm * em1 * mu * jn(m - 2, ks * r);
                c2 += -I * kp2 / 2.0
                    * am
                    * ep1
                    * ((lam + mu) * jn(m, kp * r) + mu * jn(m + 2, kp * r))
                    - ks2 / 2.0 * bm * ep1 * mu * jn(m + 2, ks * r);
            }
        }
    }
    (c1, c2)
}

/// Impedance boundary series T_ν u + η u on an arm, evaluated as one fused
/// series (traction terms plus η times the displacement terms).
pub fn impedance_series(
    c: &CoeffSeq,
    p: &LameParams,
    side: Side,
    eta: Complex64,
    r: f64,
) -> [Complex64; 2] {
    let (kp, ks) = (p.k_p, p.k_s);
    let (mut c1, mut c2) = traction_series_e_basis(c, p, side, r);
    let phi = side.angle();
    for m in 0..=c.order() as i64 {
        let em1 = (I * (m - 1) as f64 * phi).exp();
        let ep1 = (I * (m + 1) as f64 * phi).exp();
        let (am, bm) = (c.a[m as usize], c.b[m as usize]);
        c1 += eta * (kp / 2.0 * am * em1 * jn(m - 1, kp * r) + I * ks / 2.0 * bm * em1 * jn(m - 1, ks * r));
        c2 += eta * (-kp / 2.0 * am * ep1 * jn(m + 1, kp * r) + I * ks / 2.0 * bm * ep1 * jn(m + 1, ks * r));
    }
    from_e_basis(c1, c2)
}
