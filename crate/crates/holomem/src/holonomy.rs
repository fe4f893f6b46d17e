//! Connection and holonomy of the dark manifold.
//!
//! As the controls move, a state pinned to the dark manifold of sector l is
//! transported by the first-order coefficient equation ∂ₜc = K_l(t)c, where
//! K_l is built from four scalar overlaps of the moving mode pair: writing
//! f_XY = ⟨X-mode|∂ₜ(Y-mode)⟩ for X, Y ∈ {D, E},
//!
//!   f_DD = −i sin²θ (δ₁cos²κ + δ₂sin²κ),
//!   f_ED = −κ̇ sinθ + i(δ₂−δ₁) sinθ cosκ sinκ,
//!   f_DE = −conj(f_ED),
//!   f_EE = −i (δ₁sin²κ + δ₂cos²κ),
//!
//! and K_l = −(frame overlap matrix) is tridiagonal with bosonic √ factors.
//! The solution W_l = T exp[∫K_l dt] is the non-abelian holonomy. On two-
//! photon resonance (δ₁ = δ₂ = 0) the connection collapses to a single
//! generator, K_l = κ̇ sinθ · K⁰_l, the time ordering becomes irrelevant, and
//! W_l = exp[φ K⁰_l] with the loop angle φ = ∫ κ̇ sinθ dt. A constant basis
//! change V_l maps to the primed frame where that closed form is diagonal,
//! diag(e^{−i(l−2m)φ}).
//!
//! Four independent routes to the same object live here: the analytic
//! connection (formulas above), the numeric connection (finite-difference
//! overlaps of explicitly constructed frames), time-ordered integration, and
//! the δ = 0 closed form. Tests and the acceptance gate play them against
//! one another.

use crate::darkspace::dark_basis;
use crate::error::{Error, Result};
use crate::linalg::{expm_antihermitian, frobenius, CMat, C64, I1};
use crate::model::{mixing_angles, MixingAngles, PulseSchedule, SystemParams};

/// The four frame-motion overlaps at one instant.
#[derive(Clone, Copy, Debug)]
pub struct FCoefficients {
    pub f_dd: C64,
    pub f_ed: C64,
    pub f_de: C64,
    pub f_ee: C64,
}

/// Overlap coefficients for explicitly given mixing angles.
pub fn f_coefficients_from_angles(p: &SystemParams, m: &MixingAngles) -> FCoefficients {
    let st = m.theta.sin();
    let (sk, ck) = m.kappa.sin_cos();
    let (d1, d2) = (p.delta_1, p.delta_2);
    let f_dd = -I1 * (st * st * (d1 * ck * ck + d2 * sk * sk));
    let f_ed = C64::new(-m.kappa_dot * st, (d2 - d1) * st * ck * sk);
    let f_de = -f_ed.conj();
    let f_ee = -I1 * (d1 * sk * sk + d2 * ck * ck);
    FCoefficients {
        f_dd,
        f_ed,
        f_de,
        f_ee,
    }
}

/// Overlap coefficients at time t of the schedule.
pub fn f_coefficients(p: &SystemParams, s: &PulseSchedule, t: f64) -> Result<FCoefficients> {
    Ok(f_coefficients_from_angles(p, &mixing_angles(p, s, t)?))
}

/// Connection matrix of one sector at one instant.
#[derive(Clone, Debug)]
pub struct ConnectionMatrix {
    pub l: u32,
    pub entries: CMat,
}

/// Numeric connection plus quality metadata.
#[derive(Clone, Debug)]
pub struct NumericConnection {
    pub connection: ConnectionMatrix,
    /// Set when the requested finite-difference step is too coarse to trust.
    pub accuracy_warning: Option<String>,
}

/// Assemble the tridiagonal connection from overlap coefficients.
pub fn connection_from_f(f: &FCoefficients, l: u32) -> CMat {
    let n = l as usize + 1;
    let mut k = CMat::zeros(n, n);
    for m in 0..n {
        let lm = (l as usize - m) as f64;
        let mf = m as f64;
        k[(m, m)] = -(lm * f.f_dd + mf * f.f_ee);
        if m + 1 < n {
            k[(m, m + 1)] = -((mf + 1.0) * lm).sqrt() * f.f_de;
        }
        if m >= 1 {
            k[(m, m - 1)] = -(mf * (lm + 1.0)).sqrt() * f.f_ed;
        }
    }
    k
}

/// Connection K_l(t) from the analytic overlap formulas.
pub fn connection_analytic(
    p: &SystemParams,
    s: &PulseSchedule,
    t: f64,
    l: u32,
) -> Result<ConnectionMatrix> {
    let f = f_coefficients(p, s, t)?;
    Ok(ConnectionMatrix {
        l,
        entries: connection_from_f(&f, l),
    })
}

/// Connection K_l(t) from central-difference overlaps of constructed dark
/// frames: K[m,n] = −⟨D_m(t)|[D_n(t+dt) − D_n(t−dt)]/(2dt)⟩.
pub fn connection_numeric(
    p: &SystemParams,
    s: &PulseSchedule,
    t: f64,
    l: u32,
    dt: f64,
) -> Result<NumericConnection> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParams(format!(
            "finite-difference step must be positive, got {dt}"
        )));
    }
    let duration = s.duration();
    if t - dt < 0.0 || t + dt > duration {
        return Err(Error::BadTimeWindow {
            t0: t - dt,
            t1: t + dt,
        });
    }
    let bras = dark_basis(p, s, t, l, false)?;
    let ahead = dark_basis(p, s, t + dt, l, false)?;
    let behind = dark_basis(p, s, t - dt, l, false)?;
    let n = l as usize + 1;
    let mut k = CMat::zeros(n, n);
    let half = 0.5 / dt;
    for m in 0..n {
        for j in 0..n {
            let fwd = bras.column(m).inner(ahead.column(j))?;
            let bwd = bras.column(m).inner(behind.column(j))?;
            k[(m, j)] = -(fwd - bwd) * half;
        }
    }
    let accuracy_warning = if dt > 1e-2 * duration {
        Some(format!(
            "finite-difference step {dt} exceeds 1e-2 of the schedule duration {duration}; \
             O(dt^2) truncation may dominate"
        ))
    } else {
        None
    };
    Ok(NumericConnection {
        connection: ConnectionMatrix { l, entries: k },
        accuracy_warning,
    })
}

/// The constant generator K⁰_l of the resonant (δ = 0) connection:
/// K_l = κ̇ sinθ · K⁰_l. Real antisymmetric, spectrum {i(l−2m)}.
pub fn k0_matrix(l: u32) -> CMat {
    let n = l as usize + 1;
    let mut k = CMat::zeros(n, n);
    for m in 0..n {
        let lm = (l as usize - m) as f64;
        let mf = m as f64;
        if m >= 1 {
            k[(m, m - 1)] = C64::new((mf * (lm + 1.0)).sqrt(), 0.0);
        }
        if m + 1 < n {
            k[(m, m + 1)] = C64::new(-((mf + 1.0) * lm).sqrt(), 0.0);
        }
    }
    k
}

/// Loop angle φ(t) = ∫₀ᵗ κ̇ sinθ dt′ by adaptive quadrature (absolute
/// tolerance 1e-10), split at schedule breakpoints.
pub fn phi_of_t(p: &SystemParams, s: &PulseSchedule, t: f64) -> Result<f64> {
    phi_between(p, s, 0.0, t)
}

/// Loop angle accrued over [t0, t1].
pub fn phi_between(p: &SystemParams, s: &PulseSchedule, t0: f64, t1: f64) -> Result<f64> {
    let grace = 1e-9 * (1.0 + s.duration());
    if !(t0 >= -grace && t1 <= s.duration() + grace && t0 <= t1) {
        return Err(Error::BadTimeWindow { t0, t1 });
    }
    let (t0, t1) = (t0.max(0.0), t1.min(s.duration()));
    // Probe once so a degenerate schedule fails loudly instead of inside the
    // quadrature closure.
    mixing_angles(p, s, t0)?;
    let integrand = |x: f64| {
        let m = mixing_angles(p, s, x).expect("validated schedule point");
        m.kappa_dot * m.theta.sin()
    };
    let mut pieces: Vec<f64> = vec![t0];
    for &b in &s.smooth_breakpoints() {
        if b > t0 && b < t1 {
            pieces.push(b);
        }
    }
    pieces.push(t1);
    let total_len = (t1 - t0).max(f64::MIN_POSITIVE);
    let mut phi = 0.0;
    for w in pieces.windows(2) {
        let tol = 1e-10 * ((w[1] - w[0]) / total_len).max(1e-3);
        phi += crate::linalg::adaptive_simpson(&integrand, w[0], w[1], tol);
    }
    Ok(phi)
}

/// A transported holonomy matrix on the dark coefficients of one sector.
#[derive(Clone, Debug)]
pub struct HolonomyMatrix {
    pub l: u32,
    pub entries: CMat,
}

impl HolonomyMatrix {
    pub fn unitarity_defect(&self) -> f64 {
        crate::linalg::unitarity_defect(&self.entries)
    }
}

/// Tuning for the time-ordered integration.
#[derive(Clone, Copy, Debug)]
pub struct HolonomyOptions {
    /// Total absolute error budget over the window.
    pub tolerance: f64,
    /// Cap on ‖K‖·dt per step.
    pub generator_step_cap: f64,
}

impl Default for HolonomyOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            generator_step_cap: 0.05,
        }
    }
}

/// W_l over [t0, t1]: the time-ordered exponential of the analytic
/// connection, by adaptive exponential-midpoint steps (each step multiplies
/// by exp(dt·K(midpoint)), so W stays unitary to machine precision).
pub fn holonomy_integrate(
    p: &SystemParams,
    s: &PulseSchedule,
    l: u32,
    t0: f64,
    t1: f64,
) -> Result<HolonomyMatrix> {
    holonomy_integrate_with(p, s, l, t0, t1, &HolonomyOptions::default())
}

pub fn holonomy_integrate_with(
    p: &SystemParams,
    s: &PulseSchedule,
    l: u32,
    t0: f64,
    t1: f64,
    opts: &HolonomyOptions,
) -> Result<HolonomyMatrix> {
    let duration = s.duration();
    let grace = 1e-9 * (1.0 + duration);
    if !(t0 >= -grace && t1 <= duration + grace && t0 <= t1) {
        return Err(Error::BadTimeWindow { t0, t1 });
    }
    let (t0, t1) = (t0.max(0.0), t1.min(duration));
    let n = l as usize + 1;
    let mut w = CMat::identity(n, n);
    if t1 - t0 <= 0.0 {
        return Ok(HolonomyMatrix { l, entries: w });
    }
    let tol_rate = opts.tolerance / (t1 - t0);
    let mut pieces: Vec<f64> = vec![t0];
    for &b in &s.smooth_breakpoints() {
        if b > t0 && b < t1 {
            pieces.push(b);
        }
    }
    pieces.push(t1);
    let conn = |t: f64| -> Result<CMat> { Ok(connection_analytic(p, s, t, l)?.entries) };
    for piece in pieces.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        let mut t = a;
        let mut dt_next = b - a;
        while t < b {
            let mut dt = dt_next.min(b - t);
            // Cap the generator step; K varies smoothly, so one re-probe at
            // the shrunken midpoint is enough.
            let mut k_mid = conn(t + 0.5 * dt)?;
            let k_norm = frobenius(&k_mid);
            if k_norm * dt > opts.generator_step_cap {
                dt = opts.generator_step_cap / k_norm;
                k_mid = conn(t + 0.5 * dt)?;
            }
            if dt <= 1e-14 * (b - a) {
                return Err(Error::StepUnderflow { t, dt });
            }
            let coarse = expm_antihermitian(&k_mid.scale(dt));
            let k_q1 = conn(t + 0.25 * dt)?;
            let k_q3 = conn(t + 0.75 * dt)?;
            let fine = expm_antihermitian(&k_q3.scale(0.5 * dt))
                * expm_antihermitian(&k_q1.scale(0.5 * dt));
            let err = frobenius(&(&coarse - &fine));
            // The rate budget must not force steps below the roundoff of the
            // two exponentials themselves.
            let allowed = (tol_rate * dt).max(64.0 * f64::EPSILON);
            if err <= allowed {
                w = &fine * w;
                t += dt;
                let grow = if err > 0.0 {
                    (0.9 * (allowed / err).powf(1.0 / 3.0)).clamp(1.0, 5.0)
                } else {
                    5.0
                };
                dt_next = dt * grow;
            } else {
                dt_next = dt * (0.9 * (allowed / err).powf(1.0 / 3.0)).clamp(0.1, 0.9);
            }
        }
    }
    Ok(HolonomyMatrix { l, entries: w })
}

/// The resonant closed form W_l = exp[φ·K⁰_l].
pub fn holonomy_closed_form(l: u32, phi: f64) -> HolonomyMatrix {
    let k = k0_matrix(l).scale(phi);
    HolonomyMatrix {
        l,
        entries: expm_antihermitian(&k),
    }
}

/// The primed-frame holonomy: diag(e^{−i(l−2m)φ}), m = 0..l.
pub fn primed_holonomy(l: u32, phi: f64) -> HolonomyMatrix {
    let n = l as usize + 1;
    let mut entries = CMat::zeros(n, n);
    for m in 0..n {
        let exponent = -((l as f64) - 2.0 * m as f64) * phi;
        entries[(m, m)] = C64::from_polar(1.0, exponent);
    }
    HolonomyMatrix { l, entries }
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// The constant unitary V_l relating the frames: primed basis columns
/// expressed in the unprimed basis, V[n, m] = ⟨D_{l−n,n}|D′_{l−m,m}⟩.
///
/// Derived by expanding D′†^{l−m} E′†^m with D′† = (−iD†+E†)/√2 and
/// E′† = (iD†+E†)/√2 binomially; it satisfies
/// holonomy_closed_form(l, φ) = V_l · primed_holonomy(l, φ) · V_l†.
pub fn basis_change_matrix(l: u32) -> CMat {
    let dim = l as usize + 1;
    let mut v = CMat::zeros(dim, dim);
    for m in 0..=l {
        let norm = 1.0 / (2f64.powi(l as i32) * factorial(l - m) * factorial(m)).sqrt();
        for n in 0..=l {
            // p quanta of D† in the expanded product.
            let p = l - n;
            let mut coeff = C64::new(0.0, 0.0);
            let k_lo = p.saturating_sub(l - m);
            let k_hi = m.min(p);
            for k in k_lo..=k_hi {
                let ways = binomial(l - m, p - k) * binomial(m, k);
                // (−i)^(p−k) from D′† factors, (+i)^k from E′† factors.
                coeff += i_pow(k as i64 - (p - k) as i64) * ways;
            }
            v[(n as usize, m as usize)] =
                coeff * (factorial(p) * factorial(l - p)).sqrt() * norm;
        }
    }
    v
}
