//! Complex geometrical optics (CGO) test field on the corner sector.
//!
//! The field `v = exp(s√r ζ(φ)) e1` with `ζ(φ) = −e^{iφ/2}` solves the
//! homogeneous Navier system for every admissible (λ, μ) and concentrates at
//! the sector vertex as `s → ∞`.  This module provides the field itself, its
//! traction on the two arms, closed forms for the weighted radial integrals
//! `∫₀^h r^ℓ e^{s√r ζ} dr`, the boundary-integral identity
//! `I₃ = I₁⁺ + I₁⁻ + I₂`, and the constants `S₀, …, S₃` that dominate the
//! series remainders of the pairings `T_ν u · v`, `T_ν v · u` and `u · v`.

use num_complex::Complex64;
use thiserror::Error;

use crate::lame::{
    dot, eval_u, traction_direct, traction_from_grad, CoeffSeq, LameParams, PolarPoint,
    Side, E1,
};
use crate::quad;

/// Relative tolerance at which the S-constant tail sums are truncated.
const TAIL_TOL: f64 = 1e-15;

#[derive(Debug, Error, PartialEq)]
pub enum CgoError {
    #[error("large parameter s must be positive and finite, got {0}")]
    InvalidS(f64),
    #[error("sector requires phi0 in (0, pi] and h > 0, got phi0 = {phi0}, h = {h}")]
    InvalidSector { phi0: f64, h: f64 },
    #[error("arm traction is singular at the vertex; r must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("weighted integral requires Re zeta < 0, got Re zeta = {0}")]
    DivergentRegime(f64),
    #[error("exponent must be a half-integer in [0, 3], got {0}")]
    UnsupportedExponent(f64),
    #[error("quadrature order must be at least 64, got {0}")]
    QuadratureOrderTooLow(usize),
    #[error("quadrature did not converge: refinement changed the result by {residual:e}, tolerance {tol:e}")]
    QuadratureNotConverged { residual: f64, tol: f64 },
}

/// The CGO field `v(x) = exp(s √r ζ(φ)) e1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgoField {
    pub s: f64,
}

impl CgoField {
    pub fn new(s: f64) -> Result<Self, CgoError> {
        if !s.is_finite() || s <= 0.0 {
            return Err(CgoError::InvalidS(s));
        }
        Ok(CgoField { s })
    }
}

/// The open sector K of aperture `phi0` truncated at radius `h`, with arms
/// Γ_h⁻ along φ = 0 and Γ_h⁺ along φ = φ₀ and the arc Λ_h at r = h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGeom {
    pub phi0: f64,
    pub h: f64,
}

impl SectorGeom {
    pub fn new(phi0: f64, h: f64) -> Result<Self, CgoError> {
        if !(phi0 > 0.0 && phi0 <= std::f64::consts::PI) || !(h > 0.0) || !h.is_finite() {
            return Err(CgoError::InvalidSector { phi0, h });
        }
        Ok(SectorGeom { phi0, h })
    }

    /// δ_K = min_{0<φ<φ₀} cos(φ/2) = cos(φ₀/2), the decay rate constant.
    pub fn delta_k(self) -> f64 {
        (self.phi0 / 2.0).cos()
    }
}

/// ζ(φ) = −e^{iφ/2}, the phase direction of the CGO field.
pub fn zeta(phi: f64) -> Complex64 {
    -(Complex64::i() * (phi / 2.0)).exp()
}

/// Evaluates v(x) = exp(s √r ζ(φ)) (1, i)ᵀ.
pub fn eval_v(f: &CgoField, x: PolarPoint) -> [Complex64; 2] {
    let amp = (f.s * x.r.sqrt() * zeta(x.phi)).exp();
    [amp * E1[0], amp * E1[1]]
}

/// Cartesian gradient of v; entry `[j][k]` is ∂v_j/∂x_k.  Requires r > 0.
pub fn grad_v(f: &CgoField, x: PolarPoint) -> [[Complex64; 2]; 2] {
    let rt = x.r.sqrt();
    let z = zeta(x.phi);
    let g = (f.s * rt * z).exp();
    // ∂g/∂r = s ζ/(2√r) g,   (1/r) ∂g/∂φ = s ζ'(φ)/√r g with ζ' = (i/2) ζ.
    let g_r = g * z * (f.s / (2.0 * rt));
    let g_phi_over_r = g * z * Complex64::i() * (f.s / (2.0 * rt));
    let (sin_phi, cos_phi) = x.phi.sin_cos();
    let d1 = g_r * cos_phi - g_phi_over_r * sin_phi;
    let d2 = g_r * sin_phi + g_phi_over_r * cos_phi;
    [[E1[0] * d1, E1[0] * d2], [E1[1] * d1, E1[1] * d2]]
}

/// Traction of the CGO field on an arm, in closed form:
/// Γ⁻: i s μ e^{−s√r} r^{−1/2} e1;  Γ⁺: i s μ ζ(φ₀) e^{s√r ζ(φ₀)} r^{−1/2} e1.
pub fn traction_v_on_arm(
    f: &CgoField,
    p: &LameParams,
    side: Side,
    r: f64,
) -> Result<[Complex64; 2], CgoError> {
    if !(r > 0.0) {
        return Err(CgoError::NonPositiveRadius(r));
    }
    let z = zeta(side.angle());
    let nu = side.normal();
    // General arm formula μ(ν₁+iν₂) s e^{s√r ζ}/(√r ζ): the ζ factors cancel
    // on Γ⁻ (giving i s μ e^{−s√r} r^{−1/2}) and combine to i s μ ζ(φ₀) on Γ⁺.
    let amp = p.mu * Complex64::new(nu[0], nu[1]) * f.s * (f.s * r.sqrt() * z).exp()
        / (r.sqrt() * z);
    Ok([amp * E1[0], amp * E1[1]])
}

/// Closed form of `∫₀^h r^ℓ e^{s√r ζ} dr` for half-integer ℓ and Re ζ < 0:
///
///   (2/s^{2ℓ+2}) [ (−1)^{2ℓ} (2ℓ+1)!/ζ^{2ℓ+2}
///                  + e^{s√h ζ} Σ_{j=0}^{2ℓ+1} (−1)^j (2ℓ+1)!/((2ℓ+1−j)! ζ^{j+1}) (s²h)^{(2ℓ+1−j)/2} ].
pub fn weighted_r_integral(
    ell: f64,
    f: &CgoField,
    zeta: Complex64,
    h: f64,
) -> Result<Complex64, CgoError> {
    if zeta.re >= 0.0 {
        return Err(CgoError::DivergentRegime(zeta.re));
    }
    let two_ell = 2.0 * ell;
    if !(0.0..=6.0).contains(&two_ell) || (two_ell - two_ell.round()).abs() > 1e-12 {
        return Err(CgoError::UnsupportedExponent(ell));
    }
    let n = two_ell.round() as i32 + 1; // 2ℓ+1, an integer
    let s = f.s;
    let s2h = s * s * h;
    let fact_n = fact(n as usize);
    let mut tail = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * fact_n / fact((n - j) as usize);
        tail += coeff / zeta.powi(j + 1) * s2h.powf((n - j) as f64 / 2.0);
    }
    // (−1)^{2ℓ} = (−1)^{n+1}: negative exactly for half-integer ℓ.
    let lead_sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    let lead = lead_sign * fact_n / zeta.powi(n + 1);
    Ok(2.0 / s.powf(two_ell + 2.0) * (lead + (s * h.sqrt() * zeta).exp() * tail))
}

/// The four boundary integrals of Green's identity on the truncated sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryIntegrals {
    pub i1_plus: Complex64,
    pub i1_minus: Complex64,
    pub i2: Complex64,
    pub i3: Complex64,
    /// |I₃ − I₁⁺ − I₁⁻ − I₂|.
    pub identity_residual: f64,
}

/// Evaluates I₁^± = ∫_{Γ_h^±} [(T_ν u)·v − (T_ν v)·u] dσ, I₂ the same pairing
/// over the arc Λ_h, and I₃ = −κ ∬_{S_h} u·v, then records the residual of
/// the identity I₃ = I₁⁺ + I₁⁻ + I₂.
///
/// The arm integrals use the substitution t = √r, which removes the r^{−1/2}
/// singularity of T_ν v exactly.  Convergence is certified by doubling the
/// panel count and comparing.
pub fn boundary_integrals(
    c: &CoeffSeq,
    p: &LameParams,
    g: &SectorGeom,
    f: &CgoField,
    quad_n: usize,
) -> Result<BoundaryIntegrals, CgoError> {
    if quad_n < 64 {
        return Err(CgoError::QuadratureOrderTooLow(quad_n));
    }
    let coarse = integrals_once(c, p, g, f, quad_n, 8);
    let fine = integrals_once(c, p, g, f, quad_n, 16);
    let max_abs = fine.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let residual_est = coarse
        .iter()
        .zip(fine.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let tol = 1e-8 * (1.0 + max_abs);
    if residual_est > tol {
        return Err(CgoError::QuadratureNotConverged {
            residual: residual_est,
            tol,
        });
    }
    let [i1_plus, i1_minus, i2, i3] = fine;
    Ok(BoundaryIntegrals {
        i1_plus,
        i1_minus,
        i2,
        i3,
        identity_residual: (i3 - i1_plus - i1_minus - i2).norm(),
    })
}

fn integrals_once(
    c: &CoeffSeq,
    p: &LameParams,
    g: &SectorGeom,
    f: &CgoField,
    quad_n: usize,
    panels: usize,
) -> [Complex64; 4] {
    let rt_h = g.h.sqrt();

    let arm = |side: Side| -> Complex64 {
        let nu = side.normal();
        let phi = side.angle();
        quad::integrate(
            |t: f64| {
                let r = t * t;
                let x = PolarPoint::new(r, phi);
                let u = eval_u(c, p, x);
                let tu = traction_direct(c, p, x, nu).expect("unit normal");
                let v = eval_v(f, x);
                let tv = traction_v_on_arm(f, p, side, r).expect("r > 0 at Gauss nodes");
                (dot(&tu, &v) - dot(&tv, &u)) * (2.0 * t)
            },
            0.0,
            rt_h,
            panels,
            quad_n,
        )
    };
    let i1_plus = arm(Side::Plus { phi0: g.phi0 });
    let i1_minus = arm(Side::Minus);

    let i2 = quad::integrate(
        |phi: f64| {
            let x = PolarPoint::new(g.h, phi);
            let nu = [phi.cos(), phi.sin()];
            let u = eval_u(c, p, x);
            let tu = traction_direct(c, p, x, nu).expect("unit normal");
            let v = eval_v(f, x);
            let tv = traction_from_grad(&grad_v(f, x), nu, p.lambda, p.mu);
            (dot(&tu, &v) - dot(&tv, &u)) * g.h
        },
        0.0,
        g.phi0,
        panels.div_ceil(4),
        quad_n,
    );

    let i3 = -p.kappa * sector_uv_integral(c, p, g, f, quad_n, panels);

    [i1_plus, i1_minus, i2, i3]
}

/// ∬_{S_h} u·v dA via the substitution r = t² and the observation that
/// u·v = e^{s√r ζ(φ)} Σ_m e^{i(m+1)φ} [−k_p a_m J_{m+1}(k_p r) + i k_s b_m J_{m+1}(k_s r)],
/// so the Bessel factors depend on t only and are cached per t node.
fn sector_uv_integral(
    c: &CoeffSeq,
    p: &LameParams,
    g: &SectorGeom,
    f: &CgoField,
    quad_n: usize,
    panels_t: usize,
) -> Complex64 {
    let order = c.order();
    let (nodes, weights) = quad::gauss_legendre(quad_n);
    let rt_h = g.h.sqrt();

    // φ nodes with weights, plus per-node phase data.
    let panels_phi = panels_t.div_ceil(4);
    let mut phi_nodes = Vec::with_capacity(panels_phi * quad_n);
    let width_phi = g.phi0 / panels_phi as f64;
    for pnl in 0..panels_phi {
        let lo = pnl as f64 * width_phi;
        let mid = lo + width_phi / 2.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let phi = mid + width_phi / 2.0 * x;
            phi_nodes.push((phi, w * width_phi / 2.0, zeta(phi), (Complex64::i() * phi).exp()));
        }
    }

    let mut total = Complex64::new(0.0, 0.0);
    let width_t = rt_h / panels_t as f64;
    for pnl in 0..panels_t {
        let lo = pnl as f64 * width_t;
        let mid = lo + width_t / 2.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let t = mid + width_t / 2.0 * x;
            let wt = w * width_t / 2.0;
            let r = t * t;
            // d_m = −k_p a_m J_{m+1}(k_p r) + i k_s b_m J_{m+1}(k_s r)
            let mut d = Vec::with_capacity(order);
            for m in 0..=order {
                let jp = crate::specfun::bessel_j((m + 1) as i32, p.k_p * r).expect("in range");
                let js = crate::specfun::bessel_j((m + 1) as i32, p.k_s * r).expect("in range");
                d.push(-p.k_p * c.a[m] * jp + Complex64::i() * p.k_s * c.b[m] * js);
            }
            // dA = r dr dφ = 2 t³ dt dφ
            let jac = 2.0 * t * t * t * wt;
            for &(_, wphi, z, e_iphi) in &phi_nodes {
                let mut series = Complex64::new(0.0, 0.0);
                let mut phase = e_iphi; // e^{i(m+1)φ}, starting at m = 0
                for dm in &d {
                    series += phase * dm;
                    phase *= e_iphi;
                }
                total += series * (f.s * t * z).exp() * (jac * wphi);
            }
        }
    }
    total
}

/// ∫_{K ∩ B_R} v₁ r dr dφ for the sector of aperture `phi0`, via t = √r.
/// For R large enough this approximates the infinite-sector value
/// 6i(e^{−2φ₀ i} − 1) s^{−4}.
pub fn sector_v1_integral(f: &CgoField, phi0: f64, radius: f64, quad_n: usize) -> Complex64 {
    let rt = radius.sqrt();
    // exp(s t Re ζ) decays on the t scale 1/(s δ_K); resolve it adequately.
    let panels_t = ((f.s * rt / 8.0).ceil() as usize).clamp(8, 256);
    quad::integrate(
        |t: f64| {
            let inner: Complex64 = quad::integrate(
                |phi: f64| (f.s * t * zeta(phi)).exp(),
                0.0,
                phi0,
                2,
                quad_n,
            );
            inner * (2.0 * t * t * t)
        },
        0.0,
        rt,
        panels_t,
        quad_n,
    )
}

/// The constants dominating the expansion remainders:
/// |R₁| ≤ r³S₂, |R₂| ≤ r^{7/2}S₃, |R₀| ≤ r²S₀, |R̂₂| ≤ r^{ℓ+7/2}Ŝ₃,
/// |R̂₀| ≤ r^{ℓ+2}Ŝ₀, and S₁/S₁(ℓ) bounding the u·v series tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderBounds {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s0_hat: f64,
    pub s3_hat: f64,
    pub s1_ell: f64,
}

/// Computes the remainder-bound constants for the coefficient sequence `c`
/// on arms of length `h`.  The hatted constants assume the first `ell`
/// coefficient pairs vanish and bound the shifted remainders.
pub fn remainder_bounds(
    c: &CoeffSeq,
    p: &LameParams,
    _phi0: f64,
    h: f64,
    ell: usize,
) -> RemainderBounds {
    RemainderBounds {
        s0: s0_hat_sum(c, p, h, 0),
        s1: s1_ell_sum(c, p, h, 0),
        s2: s2_sum(c, p, h),
        s3: s3_hat_sum(c, p, h, 0),
        s0_hat: s0_hat_sum(c, p, h, ell),
        s3_hat: s3_hat_sum(c, p, h, ell),
        s1_ell: s1_ell_sum(c, p, h, ell),
    }
}

fn fact(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Σ_{k≥k0} σ_k (x h)^{2k} / (4^k k! (k+c)!) with σ_k = (−1)^k when `signed`,
/// truncated at the module tail tolerance.
fn tail(k0: usize, c: usize, x: f64, h: f64, signed: bool) -> f64 {
    let xh2 = (x * h / 2.0) * (x * h / 2.0);
    let mut mag = xh2.powi(k0 as i32) / (fact(k0) * fact(k0 + c));
    let mut sign = if signed && k0 % 2 == 1 { -1.0 } else { 1.0 };
    let mut sum = 0.0;
    let mut k = k0;
    loop {
        sum += sign * mag;
        if mag <= TAIL_TOL * (1.0 + sum.abs()) || k > k0 + 300 {
            break;
        }
        mag *= xh2 / ((k + 1) as f64 * (k + 1 + c) as f64);
        if signed {
            sign = -sign;
        }
        k += 1;
    }
    sum
}

/// S₂: dominates R₁ of the T_ν u · v expansion.
fn s2_sum(c: &CoeffSeq, p: &LameParams, h: f64) -> f64 {
    let (kp, ks) = (p.k_p, p.k_s);
    let lm = p.lambda + p.mu;
    let order = c.order();
    let am = |m: usize| if m <= order { c.a[m] } else { Complex64::default() };
    let bm = |m: usize| if m <= order { c.b[m] } else { Complex64::default() };

    let mut s = kp * kp * lm * am(0).norm() * h.powi(-3) * tail(2, 0, kp, h, false);
    for m in 1..=2usize {
        s += kp * kp
            * lm
            * am(m).norm()
            * (kp.powi(m as i32) / 2f64.powi(m as i32))
            * h.powi(m as i32 - 3)
            * tail(1, m, kp, h, false);
    }
    s += kp * kp * p.mu * am(0).norm() * (kp * kp / 4.0) / h * tail(1, 2, kp, h, false);
    s += ks * ks * p.mu * bm(0).norm() * (ks * ks / 4.0) / h * tail(1, 2, ks, h, false);
    for m in 1..=2usize {
        let pref = |k: f64| k.powi(m as i32 + 2) / 2f64.powi(m as i32 + 2) * h.powi(m as i32 - 1);
        s += kp * kp * p.mu * am(m).norm() * pref(kp) * tail(0, m + 2, kp, h, false);
        s += ks * ks * p.mu * bm(m).norm() * pref(ks) * tail(0, m + 2, ks, h, false);
    }
    for m in 3..=order {
        let i = Complex64::i();
        let t_lm = i * kp * kp * lm * am(m) * (kp.powi(m as i32) / 2f64.powi(m as i32))
            * h.powi(m as i32 - 3)
            * tail(0, m, kp, h, true);
        let pref = |k: f64| k.powi(m as i32 + 2) / 2f64.powi(m as i32 + 2) * h.powi(m as i32 - 1);
        let t_mu_a = i * kp * kp * p.mu * am(m) * pref(kp) * tail(0, m + 2, kp, h, true);
        let t_mu_b = ks * ks * p.mu * bm(m) * pref(ks) * tail(0, m + 2, ks, h, true);
        s += (t_lm + t_mu_a + t_mu_b).norm();
    }
    s
}

/// Ŝ₃ (S₃ at ℓ = 0): dominates R̂₂ of the T_ν v · u expansion.
fn s3_hat_sum(c: &CoeffSeq, p: &LameParams, h: f64, ell: usize) -> f64 {
    let (kp, ks) = (p.k_p, p.k_s);
    let order = c.order();
    let am = |m: usize| if m <= order { c.a[m] } else { Complex64::default() };
    let bm = |m: usize| if m <= order { c.b[m] } else { Complex64::default() };
    let pref = |k: f64, m: usize| k.powi(m as i32 + 2) / 2f64.powi(m as i32 + 1);

    let mut s = am(ell).norm() * pref(kp, ell) * h.powi(-3) * tail(2, ell + 1, kp, h, false)
        + bm(ell).norm() * pref(ks, ell) * h.powi(-3) * tail(2, ell + 1, ks, h, false);
    for m in (ell + 1)..=(ell + 2) {
        let hp = h.powi(m as i32 - ell as i32 - 3);
        s += am(m).norm() * pref(kp, m) * hp * tail(1, m + 1, kp, h, false);
        s += bm(m).norm() * pref(ks, m) * hp * tail(1, m + 1, ks, h, false);
    }
    for m in (ell + 3)..=order {
        let hp = h.powi(m as i32 - ell as i32 - 3);
        let t = am(m) * pref(kp, m) * hp * tail(0, m + 1, kp, h, true)
            + Complex64::i() * bm(m) * pref(ks, m) * hp * tail(0, m + 1, ks, h, true);
        s += t.norm();
    }
    s
}

/// Ŝ₀ (S₀ at ℓ = 0): dominates R̂₀ of the u · v expansion.
fn s0_hat_sum(c: &CoeffSeq, p: &LameParams, h: f64, ell: usize) -> f64 {
    let (kp, ks) = (p.k_p, p.k_s);
    let order = c.order();
    let am = |m: usize| if m <= order { c.a[m] } else { Complex64::default() };
    let bm = |m: usize| if m <= order { c.b[m] } else { Complex64::default() };
    let pref = |k: f64, m: usize| k.powi(m as i32 + 2) / 2f64.powi(m as i32 + 1);

    let mut s = am(ell).norm() * pref(kp, ell) / h * tail(1, ell + 1, kp, h, false)
        + bm(ell).norm() * pref(ks, ell) / h * tail(1, ell + 1, ks, h, false);
    for m in (ell + 1)..=order {
        let hp = h.powi(m as i32 - ell as i32 - 1);
        let t = -am(m) * pref(kp, m) * hp * tail(0, m + 1, kp, h, true)
            + Complex64::i() * bm(m) * pref(ks, m) * hp * tail(0, m + 1, ks, h, true);
        s += t.norm();
    }
    s
}

/// S₁(ℓ): bounds the order-(ℓ+2) tail of the u · v series on the arms.
fn s1_ell_sum(c: &CoeffSeq, p: &LameParams, h: f64, ell: usize) -> f64 {
    let (kp, ks) = (p.k_p, p.k_s);
    let order = c.order();
    let am = |m: usize| if m <= order { c.a[m] } else { Complex64::default() };
    let bm = |m: usize| if m <= order { c.b[m] } else { Complex64::default() };

    let first = (-am(ell) * kp.powi(ell as i32 + 2) * tail(1, ell + 1, kp, h, true)
        + Complex64::i() * bm(ell) * ks.powi(ell as i32 + 2) * tail(1, ell + 1, ks, h, true))
        / (2f64.powi(ell as i32 + 1) * h);
    let mut s = first.norm();
    for m in (ell + 1)..=order {
        let hp = h.powi(m as i32 - ell as i32 - 1) / 2f64.powi(m as i32 + 1);
        let t = -am(m) * kp.powi(m as i32 + 2) * hp * tail(0, m + 1, kp, h, true)
            + Complex64::i() * bm(m) * ks.powi(m as i32 + 2) * hp * tail(0, m + 1, ks, h, true);
        s += t.norm();
    }
    s
}

/// u · e1 on the arm at angle φ, through the radial series
/// Σ_m e^{i(m+1)φ} [−k_p a_m J_{m+1}(k_p r) + i k_s b_m J_{m+1}(k_s r)].
/// Since v = e^{s√r ζ(φ)} e1, this is the bracket of the u · v expansion.
pub fn u_dot_e1_series(c: &CoeffSeq, p: &LameParams, r: f64, phi: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..=c.order() {
        let jp = crate::specfun::bessel_j((m + 1) as i32, p.k_p * r).expect("in range");
        let js = crate::specfun::bessel_j((m + 1) as i32, p.k_s * r).expect("in range");
        sum += (Complex64::i() * ((m + 1) as f64 * phi)).exp()
            * (-p.k_p * c.a[m] * jp + Complex64::i() * p.k_s * c.b[m] * js);
    }
    sum
}
