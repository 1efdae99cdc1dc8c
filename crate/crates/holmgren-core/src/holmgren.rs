//! Linear-algebra certificates for boundary-condition vanishing.
//!
//! A Lamé eigenfunction restricted to a small sector is described by its
//! Fourier–Bessel coefficients (a_m, b_m).  Imposing a homogeneous boundary
//! condition (rigid, traction-free, or impedance) along one or two arms of
//! the sector, plus optional point conditions at the vertex, yields an
//! infinite linear system on the coefficients.  This module assembles the
//! finite sections of that system that are *exact* — every row is the
//! complete coefficient of a power of r in the boundary series, with no
//! truncation residue — and certifies whether the null space is trivial
//! (all coefficients must vanish) or not.
//!
//! Column layout throughout: column 2m holds a_m, column 2m+1 holds b_m,
//! for m = 0..=M, so a system at order M has 2(M+1) unknowns.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::lame::{LameParams, Side};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default relative singular-value threshold for rank decisions.
///
/// Row entries span a wide dynamic range (powers of the wave numbers up to
/// k^{M+2}), so rows and columns are rescaled before the decomposition and
/// singular values below `tol * sigma_max` count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum HolmgrenError {
    #[error("impedance parameter must be nonzero")]
    ZeroImpedance,
    #[error("order too small to express the coupled rows (need M >= 4, got {0})")]
    OrderTooSmall(usize),
    #[error("two-arm configuration requires an opening angle")]
    MissingAngle,
    #[error("opening angle {0} outside (0, pi]")]
    InvalidAngle(f64),
    #[error("degenerate straight intersection (opening angle pi)")]
    DegenerateIntersection,
    #[error("outside proven regime: two traction-free arms need phi0 < {phi_root}, got {phi0}")]
    OutsideProvenRegime { phi0: f64, phi_root: f64 },
    #[error("inadmissible impedance pair: eta2 exp(-i phi0) + eta1 = 0")]
    InadmissibleImpedancePair,
}

/// Homogeneous condition imposed along one arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LineCondition {
    /// u = 0 on the arm.
    Rigid,
    /// T_nu u = 0 on the arm.
    TractionFree,
    /// T_nu u + eta u = 0 on the arm, eta != 0.
    Impedance(Complex64),
}

/// Extra point conditions at the sector vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VertexConditions {
    /// u(0) = 0.
    pub u_vanishes: bool,
    /// tau . d_nu u(0) = 0 on the horizontal arm (equivalently d2 u1(0) = 0).
    pub tau_dnu_vanishes: bool,
}

/// A sector configuration: one mandatory arm along the positive x-axis,
/// an optional second arm at opening angle phi0, vertex point conditions,
/// material parameters, and the truncation order M.
#[derive(Clone, Debug)]
pub struct HolmgrenConfig {
    pub arm_minus: LineCondition,
    pub arm_plus: Option<LineCondition>,
    /// Opening angle in (0, pi]; required iff `arm_plus` is present.
    pub phi0: Option<f64>,
    pub vertex: VertexConditions,
    pub params: LameParams,
    /// Truncation order M; the unknowns are (a_m, b_m) for m = 0..=M.
    pub order: usize,
}

impl HolmgrenConfig {
    /// Single-arm configuration.
    pub fn single(
        arm: LineCondition,
        vertex: VertexConditions,
        params: LameParams,
        order: usize,
    ) -> Self {
        Self { arm_minus: arm, arm_plus: None, phi0: None, vertex, params, order }
    }

    /// Two intersecting arms with opening angle `phi0`.
    pub fn pair(
        arm_minus: LineCondition,
        arm_plus: LineCondition,
        phi0: f64,
        vertex: VertexConditions,
        params: LameParams,
        order: usize,
    ) -> Self {
        Self { arm_minus, arm_plus: Some(arm_plus), phi0: Some(phi0), vertex, params, order }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    AllCoefficientsVanish,
    NontrivialNullSpace,
}

/// Outcome of a rank computation on the assembled condition system.
#[derive(Clone, Debug)]
pub struct VanishingCertificate {
    pub system_rows: usize,
    pub unknowns: usize,
    pub numerical_rank: usize,
    /// Smallest singular value counted as nonzero (after row/column scaling);
    /// 0 if every singular value fell below the threshold.
    pub smallest_kept_singular_value: f64,
    /// Absolute threshold `tol * sigma_max` used for the rank decision.
    pub threshold: f64,
    pub null_space_dim: usize,
    pub verdict: Verdict,
    /// True when a singular value lies within a decade of the threshold,
    /// i.e. the rank decision is sensitive to the tolerance.
    pub marginal: bool,
}

/// A sparse row over the global columns (2m -> a_m, 2m+1 -> b_m).
pub type Row = Vec<(usize, Complex64)>;

/// Column index of a_m.
pub fn col_a(m: usize) -> usize {
    2 * m
}

/// Column index of b_m.
pub fn col_b(m: usize) -> usize {
    2 * m + 1
}

fn fct(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Coefficient of r^j in the power series of J_n(k r), for any integer n
/// (negative orders included via J_{-n} = (-1)^n J_n).
fn jn_poly_coeff(n: i64, k: f64, j: i64) -> f64 {
    if j < n.abs() || (j - n).rem_euclid(2) != 0 {
        return 0.0;
    }
    let l = (j - n) / 2;
    let p = (j + n) / 2;
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    sign * (k / 2.0).powi(j as i32) / (fct(l) * fct(p))
}

/// Which e-basis component of the boundary series a power-matched row
/// comes from (u = c1 e1 + c2 e2 with e1 = (1, i), e2 = (1, -i)).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EComp {
    C1,
    C2,
}

/// The complete coefficient row of r^j in one e-basis component of the
/// boundary series for `cond` on `side`, as a dense row over the 2(M+1)
/// unknowns.  "Complete" means every mode that contributes to this power
/// is within the truncation; see [`arm_series_rows`] for the caps.
pub fn arm_power_row(
    cond: LineCondition,
    side: Side,
    p: &LameParams,
    order: usize,
    j: usize,
    comp: EComp,
) -> Result<Vec<Complex64>, HolmgrenError> {
    if let LineCondition::Impedance(eta) = cond {
        if eta == Complex64::new(0.0, 0.0) {
            return Err(HolmgrenError::ZeroImpedance);
        }
    }
    let (kp, ks) = (p.k_p, p.k_s);
    let (lam, mu) = (p.lambda, p.mu);
    let phi = side.angle();
    // The traction series flips orientation on the upper arm.
    let sigma = match side {
        Side::Minus => 1.0,
        Side::Plus { .. } => -1.0,
    };
    let j = j as i64;
    let mut row = vec![Complex64::new(0.0, 0.0); 2 * (order + 1)];
    for m in 0..=order as i64 {
        let em1 = (I * (m - 1) as f64 * phi).exp();
        let ep1 = (I * (m + 1) as f64 * phi).exp();
        let (mut a, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        // Displacement contributions (used directly for Rigid, scaled by eta
        // for Impedance).
        let (da, db) = match comp {
            EComp::C1 => (
                kp / 2.0 * em1 * jn_poly_coeff(m - 1, kp, j),
                I * ks / 2.0 * em1 * jn_poly_coeff(m - 1, ks, j),
            ),
            EComp::C2 => (
                -kp / 2.0 * ep1 * jn_poly_coeff(m + 1, kp, j),
                I * ks / 2.0 * ep1 * jn_poly_coeff(m + 1, ks, j),
            ),
        };
        // Traction contributions.
        let (ta, tb) = match comp {
            EComp::C1 => (
                sigma
                    * em1
                    * (-I * kp * kp / 2.0)
                    * (mu * jn_poly_coeff(m - 2, kp, j) + (lam + mu) * jn_poly_coeff(m, kp, j)),
                sigma * em1 * (ks * ks / 2.0) * mu * jn_poly_coeff(m - 2, ks, j),
            ),
            EComp::C2 => (
                sigma
                    * ep1
                    * (I * kp * kp / 2.0)
                    * ((lam + mu) * jn_poly_coeff(m, kp, j) + mu * jn_poly_coeff(m + 2, kp, j)),
                sigma * ep1 * (ks * ks / 2.0) * mu * jn_poly_coeff(m + 2, ks, j),
            ),
        };
        match cond {
            LineCondition::Rigid => {
                a += da;
                b += db;
            }
            LineCondition::TractionFree => {
                a += ta;
                b += tb;
            }
            LineCondition::Impedance(eta) => {
                a += ta + eta * da;
                b += tb + eta * db;
            }
        }
        row[col_a(m as usize)] = a;
        row[col_b(m as usize)] = b;
    }
    Ok(row)
}

/// All complete power-matched rows for one arm condition, up to the largest
/// power of r whose coefficient is unaffected by truncating at order M.
///
/// The c1 component of the displacement series involves J_{m-1}, so the row
/// at power j is complete iff j <= M-1; the c2 component involves J_{m+1}
/// and stays complete up to j = M+1.  The traction series shifts both caps
/// down by one Bessel order: j <= M-2 for c1 and j <= M for c2.  Impedance
/// rows mix the two and inherit the traction caps.
pub fn arm_series_rows(
    cond: LineCondition,
    side: Side,
    p: &LameParams,
    order: usize,
) -> Result<Vec<Vec<Complex64>>, HolmgrenError> {
    let (cap1, cap2) = match cond {
        LineCondition::Rigid => (order - 1, order + 1),
        LineCondition::TractionFree | LineCondition::Impedance(_) => (order - 2, order),
    };
    let mut rows = Vec::new();
    for j in 0..=cap1 {
        rows.push(arm_power_row(cond, side, p, order, j, EComp::C1)?);
    }
    for j in 0..=cap2 {
        rows.push(arm_power_row(cond, side, p, order, j, EComp::C2)?);
    }
    rows.retain(|r| r.iter().any(|z| z.norm() > 0.0));
    Ok(rows)
}

/// Reduced condition rows for a rigid arm at level m, valid once all lower
/// coefficients vanish: the leading row k_p^m a_m + i k_s^m b_m = 0 (for
/// m >= 1) and the coupled pair relating (a_m, b_m) to (a_{m+2}, b_{m+2}).
/// The coupled rows require m <= M-2 when embedded at order M.
pub fn condition_rows_rigid(m: usize, p: &LameParams) -> Vec<Row> {
    let (kp, ks) = (p.k_p, p.k_s);
    let mi = m as i32;
    let mf = m as f64;
    let mut rows = Vec::new();
    if m >= 1 {
        rows.push(vec![
            (col_a(m), Complex64::from(kp.powi(mi))),
            (col_b(m), I * ks.powi(mi)),
        ]);
    }
    rows.push(vec![
        (col_a(m), Complex64::from(-(mf + 1.0) * kp.powi(mi + 2))),
        (col_b(m), -I * (mf + 1.0) * ks.powi(mi + 2)),
        (col_a(m + 2), Complex64::from(kp.powi(mi + 2))),
        (col_b(m + 2), I * ks.powi(mi + 2)),
    ]);
    rows.push(vec![
        (col_a(m), Complex64::from(kp.powi(mi + 2))),
        (col_b(m), -I * ks.powi(mi + 2)),
    ]);
    rows
}

/// Reduced condition rows for a traction-free arm at level m: a_m = 0, the
/// coupled row relating (a_m, b_m) to (a_{m+2}, b_{m+2}), and for m >= 2
/// the leading row i k_p^m a_m - k_s^m b_m = 0.
pub fn condition_rows_traction(m: usize, p: &LameParams) -> Vec<Row> {
    let (kp, ks) = (p.k_p, p.k_s);
    let (lam, mu) = (p.lambda, p.mu);
    let mi = m as i32;
    let mf = m as f64;
    let mut rows = vec![
        vec![(col_a(m), Complex64::from(1.0))],
        vec![
            (col_a(m), I * kp.powi(mi + 2) * (lam - (mf - 1.0) * mu)),
            (col_b(m), Complex64::from(mf * mu * ks.powi(mi + 2))),
            (col_a(m + 2), I * mu * kp.powi(mi + 2)),
            (col_b(m + 2), Complex64::from(-mu * ks.powi(mi + 2))),
        ],
    ];
    if m >= 2 {
        rows.push(vec![
            (col_a(m), I * kp.powi(mi)),
            (col_b(m), Complex64::from(-ks.powi(mi))),
        ]);
    }
    rows
}

/// Reduced condition rows for an impedance arm at level m: a_m = 0, the
/// coupled row (which also picks up eta times the displacement at the next
/// level, linking (a_{m+1}, b_{m+1})), and for m >= 2 the leading row.
pub fn condition_rows_impedance(
    m: usize,
    p: &LameParams,
    eta: Complex64,
) -> Result<Vec<Row>, HolmgrenError> {
    if eta == Complex64::new(0.0, 0.0) {
        return Err(HolmgrenError::ZeroImpedance);
    }
    let (kp, ks) = (p.k_p, p.k_s);
    let (lam, mu) = (p.lambda, p.mu);
    let mi = m as i32;
    let mf = m as f64;
    let mut rows = vec![
        vec![(col_a(m), Complex64::from(1.0))],
        vec![
            (col_a(m), -I * kp.powi(mi + 2) * (lam + (1.0 - mf) * mu)),
            (col_b(m), Complex64::from(-mf * mu * ks.powi(mi + 2))),
            (col_a(m + 1), eta * kp.powi(mi + 1)),
            (col_b(m + 1), I * eta * ks.powi(mi + 1)),
            (col_a(m + 2), -I * mu * kp.powi(mi + 2)),
            (col_b(m + 2), Complex64::from(mu * ks.powi(mi + 2))),
        ],
    ];
    if m >= 2 {
        rows.push(vec![
            (col_a(m), I * kp.powi(mi)),
            (col_b(m), Complex64::from(-ks.powi(mi))),
        ]);
    }
    Ok(rows)
}

/// Point-condition rows at the vertex.
pub fn vertex_rows(v: VertexConditions, p: &LameParams) -> Vec<Row> {
    let (kp, ks) = (p.k_p, p.k_s);
    let mut rows = Vec::new();
    if v.u_vanishes {
        // u(0) = 0: only the m = 1 modes survive at the origin.
        rows.push(vec![(col_a(1), Complex64::from(kp)), (col_b(1), I * ks)]);
    }
    if v.tau_dnu_vanishes {
        // d2 u1(0) = 0.
        rows.push(vec![
            (col_b(0), Complex64::from(-2.0 * ks * ks)),
            (col_a(2), I * kp * kp),
            (col_b(2), Complex64::from(-ks * ks)),
        ]);
    }
    rows
}

/// The algebraic relations on the lowest coefficients that two intersecting
/// arms force, per pair type.  These rows are established identities coming
/// from complex-geometric-optics test fields (validated separately in the
/// cgo module); here they are consumed as rows.
pub fn intersection_rows(config: &HolmgrenConfig) -> Result<Vec<Row>, HolmgrenError> {
    let plus = config.arm_plus.ok_or(HolmgrenError::MissingAngle)?;
    let phi0 = config.phi0.ok_or(HolmgrenError::MissingAngle)?;
    if !(phi0 > 0.0 && phi0 <= std::f64::consts::PI) {
        return Err(HolmgrenError::InvalidAngle(phi0));
    }
    if (phi0 - std::f64::consts::PI).abs() < 1e-12 {
        return Err(HolmgrenError::DegenerateIntersection);
    }
    let p = &config.params;
    let (kp, ks) = (p.k_p, p.k_s);
    let (kp2, ks2) = (kp * kp, ks * ks);
    let (lam, mu) = (p.lambda, p.mu);
    use LineCondition::*;
    let check_eta = |eta: Complex64| {
        if eta == Complex64::new(0.0, 0.0) {
            Err(HolmgrenError::ZeroImpedance)
        } else {
            Ok(())
        }
    };
    let rows = match (config.arm_minus, plus) {
        (Rigid, Rigid) => vec![vec![
            (col_a(0), -I * kp2 * kp2 * (2.0 * lam + mu)),
            (col_b(0), Complex64::from(mu * ks2 * ks2)),
        ]],
        (TractionFree, TractionFree) => {
            let root = phi_root(1e-14);
            if phi0 >= root {
                return Err(HolmgrenError::OutsideProvenRegime { phi0, phi_root: root });
            }
            vec![vec![(col_b(0), Complex64::from(1.0))]]
        }
        (Rigid, TractionFree) | (TractionFree, Rigid) => vec![vec![
            (col_a(0), I * lam * kp2),
            (col_b(0), Complex64::from(-mu * ks2)),
        ]],
        (Rigid, Impedance(eta)) | (Impedance(eta), Rigid) => {
            check_eta(eta)?;
            vec![vec![(col_a(0), I * lam * kp2), (col_b(0), Complex64::from(-mu * ks2))]]
        }
        (TractionFree, Impedance(eta)) | (Impedance(eta), TractionFree) => {
            check_eta(eta)?;
            vec![vec![(col_a(0), Complex64::from(kp2)), (col_b(0), -I * ks2)]]
        }
        (Impedance(eta1), Impedance(eta2)) => {
            check_eta(eta1)?;
            check_eta(eta2)?;
            let combo = eta2 * (-I * phi0).exp() + eta1;
            if combo.norm() <= 1e-12 * (eta1.norm() + eta2.norm()) {
                return Err(HolmgrenError::InadmissibleImpedancePair);
            }
            vec![
                vec![(col_a(0), Complex64::from(kp2)), (col_b(0), -I * ks2)],
                vec![(col_a(1), Complex64::from(kp2 * kp)), (col_b(1), -I * ks2 * ks)],
            ]
        }
    };
    Ok(rows)
}

fn densify(row: &Row, unknowns: usize) -> Vec<Complex64> {
    let mut dense = vec![Complex64::new(0.0, 0.0); unknowns];
    for &(col, z) in row {
        dense[col] = z;
    }
    dense
}

fn rank_summary(mut rows: Vec<Vec<Complex64>>, unknowns: usize, tol: f64) -> VanishingCertificate {
    // Scale each row to unit max-magnitude entry.
    for row in &mut rows {
        let max = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max > 0.0 {
            for z in row.iter_mut() {
                *z /= max;
            }
        }
    }
    let system_rows = rows.len();
    let mut mat = DMatrix::from_fn(system_rows, unknowns, |i, j| rows[i][j]);
    // Scale each nonzero column to unit max-magnitude entry.
    for j in 0..unknowns {
        let max = mat.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max > 0.0 {
            for i in 0..system_rows {
                mat[(i, j)] /= max;
            }
        }
    }
    let sv = mat.svd(false, false).singular_values;
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    let threshold = tol * sigma_max;
    let kept: Vec<f64> = sv.iter().cloned().filter(|&s| s > threshold).collect();
    let numerical_rank = kept.len();
    let smallest_kept = kept.iter().cloned().fold(f64::INFINITY, f64::min);
    let smallest_kept = if numerical_rank == 0 { 0.0 } else { smallest_kept };
    let null_space_dim = unknowns - numerical_rank;
    let marginal = sv
        .iter()
        .any(|&s| s > threshold / 10.0 && s <= threshold * 10.0 && sigma_max > 0.0);
    VanishingCertificate {
        system_rows,
        unknowns,
        numerical_rank,
        smallest_kept_singular_value: smallest_kept,
        threshold,
        null_space_dim,
        verdict: if null_space_dim == 0 {
            Verdict::AllCoefficientsVanish
        } else {
            Verdict::NontrivialNullSpace
        },
        marginal,
    }
}

/// Assembles every applicable complete row for the configuration and decides
/// whether the coefficients are forced to vanish.
pub fn certify_vanishing(
    config: &HolmgrenConfig,
    tol: f64,
) -> Result<VanishingCertificate, HolmgrenError> {
    let m = config.order;
    if m < 4 {
        return Err(HolmgrenError::OrderTooSmall(m));
    }
    let unknowns = 2 * (m + 1);
    let p = &config.params;
    let mut rows = arm_series_rows(config.arm_minus, Side::Minus, p, m)?;
    if let Some(plus) = config.arm_plus {
        let phi0 = config.phi0.ok_or(HolmgrenError::MissingAngle)?;
        if !(phi0 > 0.0 && phi0 <= std::f64::consts::PI) {
            return Err(HolmgrenError::InvalidAngle(phi0));
        }
        rows.extend(arm_series_rows(plus, Side::Plus { phi0 }, p, m)?);
        for row in intersection_rows(config)? {
            rows.push(densify(&row, unknowns));
        }
    }
    for row in vertex_rows(config.vertex, p) {
        rows.push(densify(&row, unknowns));
    }
    Ok(rank_summary(rows, unknowns, tol))
}

/// The unique root in (0, pi) of g(phi) = (4/3) phi / cos^6(phi/2) - 1,
/// the threshold opening angle below which the two-traction-arm argument
/// applies.  g is strictly increasing on (0, pi), g -> -1 as phi -> 0 and
/// g -> +inf as phi -> pi, so the root is simple and bracketed.
pub fn phi_root(tol: f64) -> f64 {
    assert!(tol >= 1e-15, "tolerance below achievable double precision");
    let g = |phi: f64| 4.0 / 3.0 * phi / (phi / 2.0).cos().powi(6) - 1.0;
    let dg = |phi: f64| {
        let c = (phi / 2.0).cos();
        4.0 / 3.0 / c.powi(6) + 4.0 * phi * (phi / 2.0).sin() / c.powi(7)
    };
    let (mut lo, mut hi) = (1e-3, 3.0);
    debug_assert!(g(lo) < 0.0 && g(hi) > 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..40 {
        let step = g(x) / dg(x);
        x -= step;
        if step.abs() < tol * x.abs() {
            break;
        }
    }
    x
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_f64(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64
}

/// Independent oracle for [`certify_vanishing`]: impose the boundary
/// conditions by collocation at `n_points` radii on each arm, using the
/// direct field evaluators rather than power-matched coefficient rows, and
/// return the smallest singular value of the column-normalized matrix.
/// A value near zero signals a nontrivial null space.
pub fn collocation_null_test(config: &HolmgrenConfig, n_points: usize, seed: u64) -> f64 {
    collocation_sigma(config, n_points, seed, COLLOCATION_SPAN)
}

/// Arm length used by [`collocation_null_test`].  Long enough that the
/// sampled Bessel columns decorrelate from plain monomials (keeping the
/// matrix well conditioned when the system is injective), short enough that
/// a truncated null field still satisfies the condition to round-off.
const COLLOCATION_SPAN: f64 = 0.3;

fn collocation_sigma(config: &HolmgrenConfig, n_points: usize, seed: u64, h: f64) -> f64 {
    use crate::lame::{eval_u, traction_direct, CoeffSeq, PolarPoint};
    let m = config.order;
    assert!(n_points >= 4 * (m + 1), "need at least 4(M+1) collocation points");
    let p = &config.params;
    let unknowns = 2 * (m + 1);
    let mut state = seed ^ 0xD1B5_4A32_D192_ED03;
    let radii: Vec<f64> = (0..n_points)
        .map(|i| h * (i as f64 + 0.05 + 0.9 * unit_f64(&mut state)) / n_points as f64)
        .collect();

    let mut arms = vec![(config.arm_minus, Side::Minus)];
    if let Some(plus) = config.arm_plus {
        arms.push((plus, Side::Plus { phi0: config.phi0.expect("angle required") }));
    }

    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(unknowns);
    for k in 0..unknowns {
        let mut c = CoeffSeq::zeros(m);
        if k % 2 == 0 {
            c.a[k / 2] = Complex64::from(1.0);
        } else {
            c.b[k / 2] = Complex64::from(1.0);
        }
        let mut col = Vec::new();
        for &(cond, side) in &arms {
            let normal = side.normal();
            for &r in &radii {
                let x = PolarPoint::new(r, side.angle());
                let value = match cond {
                    LineCondition::Rigid => eval_u(&c, p, x),
                    LineCondition::TractionFree => {
                        traction_direct(&c, p, x, normal).expect("unit normal")
                    }
                    LineCondition::Impedance(eta) => {
                        let t = traction_direct(&c, p, x, normal).expect("unit normal");
                        let u = eval_u(&c, p, x);
                        [t[0] + eta * u[0], t[1] + eta * u[1]]
                    }
                };
                col.push(value[0]);
                col.push(value[1]);
            }
        }
        if config.vertex.u_vanishes {
            let u0 = eval_u(&c, p, PolarPoint::new(0.0, 0.0));
            col.push(u0[0]);
            col.push(u0[1]);
        }
        if config.vertex.tau_dnu_vanishes {
            // Central difference for d2 u1 at the origin.
            let delta = 1e-4;
            let up = eval_u(&c, p, PolarPoint::from_cartesian([0.0, delta]));
            let dn = eval_u(&c, p, PolarPoint::from_cartesian([0.0, -delta]));
            col.push((up[0] - dn[0]) / (2.0 * delta));
        }
        columns.push(col);
    }

    let rows = columns[0].len();
    if rows == 0 {
        return 0.0;
    }
    let mut mat = DMatrix::from_fn(rows, unknowns, |i, j| columns[j][i]);
    for j in 0..unknowns {
        let max = mat.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max > 0.0 {
            for i in 0..rows {
                mat[(i, j)] /= max;
            }
        }
    }
    let sv = mat.svd(false, false).singular_values;
    sv.iter().cloned().fold(f64::INFINITY, f64::min)
}
