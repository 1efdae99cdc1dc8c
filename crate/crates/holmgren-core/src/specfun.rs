//! Cylinder functions of integer order: J_m, J_m', Y_m and H_m^{(1)}.
//!
//! The evaluation strategy favours the small-argument regime where the
//! radial expansions live:
//!
//! * J_m uses the ascending power series for t < max(12, 2m), accumulated in
//!   double-double arithmetic to absorb the cancellation near the top of that
//!   range, and a normalised backward (Miller) recurrence for larger t.
//! * Y_0 and Y_1 use the logarithmic series for t < 12 and the large-argument
//!   Hankel asymptotic expansions above; higher orders follow by the forward
//!   recurrence, which is stable for Y.
//! * Negative orders are reduced by the reflection J_{-m} = (−1)^m J_m (and
//!   likewise for Y and H), so reflection holds bit-compatibly.
//!
//! Orders are capped at |m| ≤ 64: the expansion truncations used elsewhere in
//! the crate never exceed a few tens, and the cap keeps the recurrences in a
//! well-tested range.

use std::f64::consts::PI;

use thiserror::Error;

/// Largest admissible |order| for every function in this module.
pub const MAX_ORDER: i32 = 64;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Errors for the cylinder-function API.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("argument must be finite, got {0}")]
    NonFiniteArgument(f64),
    #[error("argument must be positive, got {0} (logarithmic singularity at 0)")]
    NonPositiveArgument(f64),
    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("|order| must be <= {MAX_ORDER}, got {0}")]
    OrderTooLarge(i32),
}

// ---------------------------------------------------------------------------
// Double-double helpers: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
// Only the handful of operations the power series needs.
// ---------------------------------------------------------------------------

#[derive(Copy, Clone)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        let err = a.mul_add(b, -p);
        Dd { hi: p, lo: err }
    }

    fn add(self, other: Dd) -> Self {
        let s = Dd::two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        let t = Dd::two_sum(s.hi, lo);
        Dd { hi: t.hi, lo: t.lo }
    }

    fn mul_f64(self, b: f64) -> Self {
        let p = Dd::two_prod(self.hi, b);
        let lo = p.lo + self.lo * b;
        let t = Dd::two_sum(p.hi, lo);
        Dd { hi: t.hi, lo: t.lo }
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self.add(Dd::two_prod(q1, -b));
        let q2 = (r.hi + r.lo) / b;
        let t = Dd::two_sum(q1, q2);
        Dd { hi: t.hi, lo: t.lo }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

// ---------------------------------------------------------------------------
// First kind
// ---------------------------------------------------------------------------

fn check_order(order: i32) -> Result<(), SpecFunError> {
    if order.unsigned_abs() > MAX_ORDER as u32 {
        return Err(SpecFunError::OrderTooLarge(order));
    }
    Ok(())
}

/// First-kind Bessel function J_m(t) for integer order, t ≥ 0.
pub fn bessel_j(order: i32, t: f64) -> Result<f64, SpecFunError> {
    check_order(order)?;
    if !t.is_finite() {
        return Err(SpecFunError::NonFiniteArgument(t));
    }
    if t < 0.0 {
        return Err(SpecFunError::NegativeArgument(t));
    }
    let m = order.unsigned_abs() as usize;
    let sign = if order < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    Ok(sign * bessel_j_nonneg(m, t))
}

/// J_m for m ≥ 0, dispatching between the power series and Miller recurrence.
fn bessel_j_nonneg(m: usize, t: f64) -> f64 {
    if t == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if t < (12.0f64).max(2.0 * m as f64) {
        bessel_j_series(m, t)
    } else {
        bessel_j_miller(m, t)
    }
}

/// Ascending power series J_m(t) = Σ_k (−1)^k (t/2)^{m+2k} / (k! (m+k)!),
/// accumulated in double-double arithmetic.
fn bessel_j_series(m: usize, t: f64) -> f64 {
    let x = t / 2.0;
    let x2 = x * x;
    // term_0 = x^m / m!
    let mut term = Dd::from(1.0);
    for j in 1..=m {
        term = term.mul_f64(x).div_f64(j as f64);
    }
    let mut sum = term;
    let mut max_term = term.hi.abs();
    let mut k = 1usize;
    loop {
        term = term.mul_f64(-x2).div_f64(k as f64).div_f64((m + k) as f64);
        sum = sum.add(term);
        max_term = max_term.max(term.hi.abs());
        // Terminate relative to the largest term: cancellation means the sum
        // itself can be many orders smaller than the terms.
        if term.hi.abs() <= 1e-25 * max_term || k > 200 {
            break;
        }
        k += 1;
    }
    sum.value()
}

/// Backward (Miller) recurrence normalised with J_0 + 2 Σ_k J_{2k} = 1.
fn bessel_j_miller(m: usize, t: f64) -> f64 {
    let start = {
        // High enough that the downward recurrence has converged onto J by
        // the time it reaches order m. Above the turning point the decay of
        // J_n sets in over a range ~ t^{1/3} (Airy regime), hence the scaling.
        let base = (t + 16.0 * t.cbrt() + 20.0).ceil() as usize;
        let s = base.max(m + 20);
        s + (s % 2) // even start keeps the normalisation sum aligned
    };
    let mut jp1 = 0.0f64; // J_{n+1} (un-normalised)
    let mut jn = 1e-300f64; // J_n
    let mut norm = 0.0f64;
    let mut jm = 0.0f64;
    let mut n = start;
    loop {
        let jm1 = (2.0 * n as f64 / t) * jn - jp1;
        jp1 = jn;
        jn = jm1;
        n -= 1;
        if n % 2 == 0 {
            norm += 2.0 * jn;
        }
        if n == m {
            jm = jn;
        }
        if n == 0 {
            break;
        }
        // Rescale to avoid overflow of the un-normalised recurrence.
        if jn.abs() > 1e250 {
            jp1 /= 1e250;
            jn /= 1e250;
            norm /= 1e250;
            jm /= 1e250;
        }
    }
    norm -= jn; // the k = 0 term enters once, not twice
    jm / norm
}

/// Derivative J_m'(t) = (J_{m−1}(t) − J_{m+1}(t)) / 2.
pub fn bessel_j_prime(order: i32, t: f64) -> Result<f64, SpecFunError> {
    let lo = bessel_j(order - 1, t)?;
    let hi = bessel_j(order + 1, t)?;
    Ok((lo - hi) / 2.0)
}

// ---------------------------------------------------------------------------
// Second kind
// ---------------------------------------------------------------------------

/// Second-kind Bessel function Y_m(t), t > 0.
pub fn bessel_y(order: i32, t: f64) -> Result<f64, SpecFunError> {
    check_order(order)?;
    if !t.is_finite() {
        return Err(SpecFunError::NonFiniteArgument(t));
    }
    if t <= 0.0 {
        return Err(SpecFunError::NonPositiveArgument(t));
    }
    let m = order.unsigned_abs() as usize;
    let sign = if order < 0 && m % 2 == 1 { -1.0 } else { 1.0 };

    let (mut y0, y1) = if t < 12.0 {
        (bessel_y_series(0, t), bessel_y_series(1, t))
    } else {
        (bessel_y_asymptotic(0, t), bessel_y_asymptotic(1, t))
    };
    let ym = match m {
        0 => y0,
        1 => y1,
        _ => {
            // Forward recurrence Y_{n+1} = (2n/t) Y_n − Y_{n−1} (stable for Y).
            let mut yn = y1;
            for n in 1..m {
                let next = (2.0 * n as f64 / t) * yn - y0;
                y0 = yn;
                yn = next;
            }
            let _ = y0;
            yn
        }
    };
    let _ = y1;
    Ok(sign * ym)
}

/// Logarithmic series for Y_m, m ∈ {0, 1}, small argument.
///
/// Y_m(t) = (2/π)(ln(t/2) + γ) J_m(t) − (1/π) Σ_{k<m} (m−1−k)!/k! (t/2)^{2k−m}
///          − (1/π) Σ_k (−1)^k (H_k + H_{k+m}) / (k! (k+m)!) (t/2)^{2k+m},
/// with H_n the harmonic numbers (ψ(n+1) = −γ + H_n).
fn bessel_y_series(m: usize, t: f64) -> f64 {
    debug_assert!(m <= 1);
    let x = t / 2.0;
    let x2 = x * x;
    let log_part = (2.0 / PI) * (x.ln() + EULER_GAMMA) * bessel_j_nonneg(m, t);
    let negative_powers = if m == 1 { (1.0 / PI) * (1.0 / x) } else { 0.0 };

    // Σ_k (−1)^k (H_k + H_{k+m}) / (k!(k+m)!) x^{2k+m}, double-double.
    let mut fac = Dd::from(1.0); // x^{2k+m}/(k!(k+m)!) at k = 0
    for j in 1..=m {
        fac = fac.mul_f64(x).div_f64(j as f64);
    }
    let mut harmonic_k = 0.0f64; // H_0
    let mut harmonic_km = if m == 1 { 1.0 } else { 0.0 }; // H_m
    let mut sum = fac.mul_f64(harmonic_k + harmonic_km);
    let mut k = 1usize;
    loop {
        fac = fac.mul_f64(-x2).div_f64(k as f64).div_f64((k + m) as f64);
        harmonic_k += 1.0 / k as f64;
        harmonic_km += 1.0 / (k + m) as f64;
        let term = fac.mul_f64(harmonic_k + harmonic_km);
        sum = sum.add(term);
        if fac.hi.abs() * (harmonic_k + harmonic_km) <= 1e-20 * (1.0 + sum.hi.abs()) || k > 200 {
            break;
        }
        k += 1;
    }
    log_part - negative_powers - sum.value() / PI
}

/// Large-argument Hankel asymptotic expansion for Y_m, m ∈ {0, 1}, t ≥ 12.
fn bessel_y_asymptotic(m: usize, t: f64) -> f64 {
    let (p, q) = hankel_pq(m, t);
    let chi = t - (m as f64 / 2.0 + 0.25) * PI;
    (2.0 / (PI * t)).sqrt() * (p * chi.sin() + q * chi.cos())
}

/// The P/Q amplitude series of the large-argument expansion,
/// truncated when the terms stop decreasing (t ≥ 12 keeps this far below
/// double precision round-off for m ≤ 1).
fn hankel_pq(m: usize, t: f64) -> (f64, f64) {
    let mu = 4.0 * (m as f64) * (m as f64);
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    let mut term = 1.0f64; // a_k(m) / (8t)^k with alternating signs folded in
    let mut k = 0usize;
    let mut prev = f64::INFINITY;
    loop {
        if k % 2 == 0 {
            p += if k % 4 == 0 { term } else { -term };
        } else {
            q += if k % 4 == 1 { term } else { -term };
        }
        let odd = (2 * k + 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * t * (k + 1) as f64);
        if next.abs() >= prev.abs() || next.abs() < 1e-18 || k > 40 {
            break;
        }
        prev = next;
        term = next;
        k += 1;
    }
    (p, q)
}

// ---------------------------------------------------------------------------
// Hankel function of the first kind
// ---------------------------------------------------------------------------

/// H_m^{(1)}(t) = J_m(t) + i Y_m(t), t > 0.
pub fn hankel1(order: i32, t: f64) -> Result<num_complex::Complex64, SpecFunError> {
    if t <= 0.0 && t.is_finite() {
        return Err(SpecFunError::NonPositiveArgument(t));
    }
    let j = bessel_j(order, t)?;
    let y = bessel_y(order, t)?;
    Ok(num_complex::Complex64::new(j, y))
}

/// Derivative H_m^{(1)}'(t) = (H_{m−1}^{(1)}(t) − H_{m+1}^{(1)}(t)) / 2.
pub fn hankel1_prime(order: i32, t: f64) -> Result<num_complex::Complex64, SpecFunError> {
    let lo = hankel1(order - 1, t)?;
    let hi = hankel1(order + 1, t)?;
    Ok((lo - hi) / 2.0)
}

/// Both H_0^{(1)}(t) and H_1^{(1)}(t) in a single pass.
///
/// The scattering kernels evaluate these two orders together millions of
/// times per solve, so this path shares the series work between J_0, J_1,
/// Y_0, Y_1 and accumulates in plain f64. The worst-case cancellation of the
/// ascending series near the t = 12 crossover costs ~5 digits, leaving
/// ~1e-11 relative accuracy — far below the solver tolerances — while the
/// certified 1e-12 entry points above keep their double-double accumulation.
pub(crate) fn hankel01(
    t: f64,
) -> Result<(num_complex::Complex64, num_complex::Complex64), SpecFunError> {
    use num_complex::Complex64;
    if !t.is_finite() {
        return Err(SpecFunError::NonFiniteArgument(t));
    }
    if t <= 0.0 {
        return Err(SpecFunError::NonPositiveArgument(t));
    }
    if t >= 12.0 {
        // H_m = sqrt(2/(pi t)) (P_m + i Q_m) e^{i chi_m}, chi_m = t - (m/2 + 1/4) pi.
        let amp = (2.0 / (PI * t)).sqrt();
        let (p0, q0) = hankel_pq(0, t);
        let (p1, q1) = hankel_pq(1, t);
        let chi0 = t - 0.25 * PI;
        let chi1 = t - 0.75 * PI;
        let h0 = amp * Complex64::new(p0, q0) * Complex64::new(chi0.cos(), chi0.sin());
        let h1 = amp * Complex64::new(p1, q1) * Complex64::new(chi1.cos(), chi1.sin());
        return Ok((h0, h1));
    }
    let x = t / 2.0;
    let x2 = x * x;
    let mut tj0 = 1.0f64; // x^{2k} / (k!)^2
    let mut tj1 = x; // x^{2k+1} / (k! (k+1)!)
    let mut j0 = tj0;
    let mut j1 = tj1;
    let mut s0 = 0.0f64; // sum (-1)^k 2 H_k x^{2k} / (k!)^2       (k = 0 term vanishes)
    let mut s1 = x; // sum (-1)^k (H_k + H_{k+1}) x^{2k+1} / (k!(k+1)!), k = 0 term = x
    let mut hk = 0.0f64;
    let mut hk1 = 1.0f64;
    let mut sign = 1.0f64;
    for k in 1..=200usize {
        tj0 *= x2 / ((k * k) as f64);
        tj1 *= x2 / ((k * (k + 1)) as f64);
        hk += 1.0 / k as f64;
        hk1 += 1.0 / (k + 1) as f64;
        sign = -sign;
        j0 += sign * tj0;
        j1 += sign * tj1;
        s0 += sign * tj0 * 2.0 * hk;
        s1 += sign * tj1 * (hk + hk1);
        if tj0 * (1.0 + 2.0 * hk) < 1e-18 {
            break;
        }
    }
    let lg = (2.0 / PI) * (x.ln() + EULER_GAMMA);
    let y0 = lg * j0 - s0 / PI;
    let y1 = lg * j1 - 1.0 / (PI * x) - s1 / PI;
    Ok((Complex64::new(j0, y0), Complex64::new(j1, y1)))
}
