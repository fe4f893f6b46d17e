//! System parameters, control-pulse schedules, and the Hamiltonian.
//!
//! One quantized probe mode a couples to the collective excited mode A with
//! strength g√N while two classical control fields with Rabi frequencies
//! Ω₁(t), Ω₂(t) and three-photon mismatches δ₁, δ₂ couple A to the
//! meta-stable modes C1, C2. In the frame rotating with the drives the
//! one-particle Hamiltonian is the arrow matrix
//!
//!   h = Δ_p A†A + (g√N A†a + Ω₁e^{iφ₁} A†C₁ + Ω₂e^{iφ₂} A†C₂ + h.c.),
//!
//! with φ_k(t) = δ_k t, and the many-body Hamiltonian on a fixed-excitation
//! sector is its second quantization Σ h_ij a_i†a_j. All frequencies are
//! quoted in units of g√N and times in 1/(g√N) unless a caller chooses
//! otherwise; nothing below depends on the unit choice.
//!
//! Schedules come in two forms. The parametric form is a chain of segments
//! in the polar control plane (Ω, κ) with Ω = √(Ω₁²+Ω₂²) and
//! κ = arctan(Ω₂/Ω₁); each segment interpolates its endpoints with the
//! cosine smoothstep s(u) = (1 − cos πu)/2, so the chain is C¹ globally and
//! smooth inside segments, and κ̇ is available in closed form. The sampled
//! form interpolates per-field waveforms (Ω₁, Ω₂ on a time grid) with the
//! monotone cubic of Fritsch and Carlson, which never overshoots adjacent
//! samples; positivity of Ω can therefore be certified from the samples.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{sector_basis, Mode, SectorBasis, NUM_MODES};
use crate::linalg::{C64, CMat};

/// Relative floor on Ω(t): schedules must keep Ω ≥ 1e-6·g√N, because the
/// mixing angle κ degenerates where both control fields vanish.
pub const OMEGA_FLOOR_RELATIVE: f64 = 1e-6;

/// Static parameters of the coupled atom-field system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Collective coupling g√N (> 0); the natural frequency unit.
    pub g_sqrt_n: f64,
    /// Probe detuning Δ_p.
    pub delta_p: f64,
    /// Three-photon mismatch δ₁ of control field 1.
    pub delta_1: f64,
    /// Three-photon mismatch δ₂ of control field 2.
    pub delta_2: f64,
}

impl SystemParams {
    pub fn new(g_sqrt_n: f64, delta_p: f64, delta_1: f64, delta_2: f64) -> Result<Self> {
        let p = Self {
            g_sqrt_n,
            delta_p,
            delta_1,
            delta_2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Fully resonant system: Δ_p = δ₁ = δ₂ = 0.
    pub fn resonant(g_sqrt_n: f64) -> Result<Self> {
        Self::new(g_sqrt_n, 0.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g_sqrt_n", self.g_sqrt_n),
            ("delta_p", self.delta_p),
            ("delta_1", self.delta_1),
            ("delta_2", self.delta_2),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite, got {value}"
                )));
            }
        }
        if self.g_sqrt_n <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "g_sqrt_n must be positive, got {}",
                self.g_sqrt_n
            )));
        }
        Ok(())
    }

    /// Smallest admissible Ω(t) for schedules used with these parameters.
    pub fn omega_floor(&self) -> f64 {
        OMEGA_FLOOR_RELATIVE * self.g_sqrt_n
    }
}

/// A point of the polar control plane: total Rabi frequency and branching
/// angle, Ω₁ = Ω cos κ, Ω₂ = Ω sin κ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlPoint {
    pub omega: f64,
    pub kappa: f64,
}

impl ControlPoint {
    pub fn new(omega: f64, kappa: f64) -> Self {
        Self { omega, kappa }
    }
}

/// Instantaneous polar controls and their time derivatives.
#[derive(Clone, Copy, Debug)]
pub struct PolarControls {
    pub omega: f64,
    pub kappa: f64,
    pub omega_dot: f64,
    pub kappa_dot: f64,
}

/// Mixing angles of the instantaneous polariton frame.
#[derive(Clone, Copy, Debug)]
pub struct MixingAngles {
    /// Total control Rabi frequency Ω = √(Ω₁²+Ω₂²).
    pub omega: f64,
    /// θ = arctan(g√N/Ω); θ→0 for strong controls, θ→π/2 for weak ones.
    pub theta: f64,
    /// κ = arctan(Ω₂/Ω₁) ∈ [0, π/2].
    pub kappa: f64,
    /// dκ/dt.
    pub kappa_dot: f64,
    /// φ₁(t) = δ₁·t.
    pub phi_1: f64,
    /// φ₂(t) = δ₂·t.
    pub phi_2: f64,
}

/// Cosine smoothstep and its derivative with respect to u ∈ [0,1].
fn smoothstep(u: f64) -> (f64, f64) {
    let s = 0.5 * (1.0 - (std::f64::consts::PI * u).cos());
    let ds = 0.5 * std::f64::consts::PI * (std::f64::consts::PI * u).sin();
    (s, ds)
}

/// Piecewise-smoothstep path through polar control points.
#[derive(Clone, Debug)]
pub struct SegmentSchedule {
    nodes: Vec<ControlPoint>,
    durations: Vec<f64>,
    /// Cumulative start times; starts[i] begins segment i, last entry is T.
    starts: Vec<f64>,
}

impl SegmentSchedule {
    pub fn from_nodes(nodes: Vec<ControlPoint>, durations: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || durations.len() + 1 != nodes.len() {
            return Err(Error::InvalidSchedule(format!(
                "need n+1 control points for n segments, got {} points and {} durations",
                nodes.len(),
                durations.len()
            )));
        }
        for (i, &d) in durations.iter().enumerate() {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i} has non-positive duration {d}"
                )));
            }
        }
        for (i, n) in nodes.iter().enumerate() {
            if !(n.omega.is_finite() && n.kappa.is_finite()) {
                return Err(Error::InvalidSchedule(format!(
                    "control point {i} is not finite"
                )));
            }
            if n.omega < 0.0 {
                return Err(Error::InvalidSchedule(format!(
                    "control point {i} has negative Omega {}",
                    n.omega
                )));
            }
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&n.kappa) {
                return Err(Error::InvalidSchedule(format!(
                    "control point {i} has kappa {} outside [0, pi/2]",
                    n.kappa
                )));
            }
        }
        let mut starts = Vec::with_capacity(durations.len() + 1);
        let mut acc = 0.0;
        starts.push(0.0);
        for &d in &durations {
            acc += d;
            starts.push(acc);
        }
        Ok(Self {
            nodes,
            durations,
            starts,
        })
    }

    pub fn duration(&self) -> f64 {
        *self.starts.last().unwrap()
    }

    pub fn nodes(&self) -> &[ControlPoint] {
        &self.nodes
    }

    fn segment_index(&self, t: f64) -> usize {
        let n = self.durations.len();
        self.starts[1..n].partition_point(|&s| s <= t).min(n - 1)
    }

    fn polar(&self, t: f64) -> PolarControls {
        let i = self.segment_index(t);
        let d = self.durations[i];
        let u = ((t - self.starts[i]) / d).clamp(0.0, 1.0);
        let (s, ds) = smoothstep(u);
        let a = self.nodes[i];
        let b = self.nodes[i + 1];
        PolarControls {
            omega: a.omega + (b.omega - a.omega) * s,
            kappa: a.kappa + (b.kappa - a.kappa) * s,
            omega_dot: (b.omega - a.omega) * ds / d,
            kappa_dot: (b.kappa - a.kappa) * ds / d,
        }
    }
}

/// Builder for [`SegmentSchedule`] chains.
#[derive(Clone, Debug)]
pub struct ScheduleBuilder {
    nodes: Vec<ControlPoint>,
    durations: Vec<f64>,
}

impl ScheduleBuilder {
    pub fn start(omega: f64, kappa: f64) -> Self {
        Self {
            nodes: vec![ControlPoint::new(omega, kappa)],
            durations: Vec::new(),
        }
    }

    /// Hold the current control point for `duration`.
    pub fn hold(mut self, duration: f64) -> Self {
        let last = *self.nodes.last().unwrap();
        self.nodes.push(last);
        self.durations.push(duration);
        self
    }

    /// Smoothly move to a new control point over `duration`.
    pub fn ramp_to(mut self, omega: f64, kappa: f64, duration: f64) -> Self {
        self.nodes.push(ControlPoint::new(omega, kappa));
        self.durations.push(duration);
        self
    }

    pub fn build(self) -> Result<PulseSchedule> {
        Ok(PulseSchedule::Parametric(SegmentSchedule::from_nodes(
            self.nodes,
            self.durations,
        )?))
    }
}

/// Monotone-cubic slopes in the style of Fritsch and Carlson: interpolants
/// built from them are monotone on every interval, hence bounded by the
/// neighboring samples.
fn monotone_cubic_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 2 {
        let s = (y[1] - y[0]) / (x[1] - x[0]);
        return vec![s, s];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let sec: Vec<f64> = y
        .windows(2)
        .zip(&h)
        .map(|(w, &hi)| (w[1] - w[0]) / hi)
        .collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if sec[i - 1] * sec[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
        }
    }
    d[0] = edge_slope(h[0], h[1], sec[0], sec[1]);
    d[n - 1] = edge_slope(h[n - 2], h[n - 3], sec[n - 2], sec[n - 3]);
    d
}

/// One-sided three-point edge slope, clamped to preserve monotonicity.
fn edge_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let mut d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= 0.0 {
        d = 0.0;
    } else if s0 * s1 < 0.0 && d.abs() > 3.0 * s0.abs() {
        d = 3.0 * s0;
    }
    d
}

/// Per-field control waveforms on a time grid with monotone-cubic
/// interpolation.
#[derive(Clone, Debug)]
pub struct SampledSchedule {
    times: Vec<f64>,
    omega1: Vec<f64>,
    omega2: Vec<f64>,
    slope1: Vec<f64>,
    slope2: Vec<f64>,
}

impl SampledSchedule {
    pub fn new(times: Vec<f64>, omega1: Vec<f64>, omega2: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidSchedule(format!(
                "sampled schedule needs at least 2 grid points, got {}",
                times.len()
            )));
        }
        if times.len() != omega1.len() || times.len() != omega2.len() {
            return Err(Error::InvalidSchedule(format!(
                "grid and sample lengths differ: {} times, {} and {} samples",
                times.len(),
                omega1.len(),
                omega2.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidSchedule(format!(
                "time grid must start at 0, got {}",
                times[0]
            )));
        }
        for w in times.windows(2) {
            if !(w[1].is_finite() && w[1] > w[0]) {
                return Err(Error::InvalidSchedule(format!(
                    "time grid must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for (k, samples) in [(1, &omega1), (2, &omega2)] {
            for (i, &v) in samples.iter().enumerate() {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidSchedule(format!(
                        "Omega_{k} sample {i} must be finite and non-negative, got {v}"
                    )));
                }
            }
        }
        let slope1 = monotone_cubic_slopes(&times, &omega1);
        let slope2 = monotone_cubic_slopes(&times, &omega2);
        Ok(Self {
            times,
            omega1,
            omega2,
            slope1,
            slope2,
        })
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    fn interval_index(&self, t: f64) -> usize {
        let n = self.times.len() - 1;
        self.times[1..n].partition_point(|&s| s <= t).min(n - 1)
    }

    /// Value and derivative of one field's Hermite cubic at t.
    fn eval_field(&self, y: &[f64], d: &[f64], t: f64) -> (f64, f64) {
        let i = self.interval_index(t);
        let h = self.times[i + 1] - self.times[i];
        let u = ((t - self.times[i]) / h).clamp(0.0, 1.0);
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let value = h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
        let g00 = 6.0 * u2 - 6.0 * u;
        let g10 = 3.0 * u2 - 4.0 * u + 1.0;
        let g01 = -6.0 * u2 + 6.0 * u;
        let g11 = 3.0 * u2 - 2.0 * u;
        let deriv = (g00 * y[i] + g01 * y[i + 1]) / h + g10 * d[i] + g11 * d[i + 1];
        (value, deriv)
    }

    fn controls_and_rates(&self, t: f64) -> (f64, f64, f64, f64) {
        let (w1, r1) = self.eval_field(&self.omega1, &self.slope1, t);
        let (w2, r2) = self.eval_field(&self.omega2, &self.slope2, t);
        (w1.max(0.0), w2.max(0.0), r1, r2)
    }
}

/// A control-pulse schedule over [0, T].
#[derive(Clone, Debug)]
pub enum PulseSchedule {
    Parametric(SegmentSchedule),
    Sampled(SampledSchedule),
}

impl PulseSchedule {
    /// Time-independent controls (Ω₁, Ω₂) for `duration`.
    pub fn constant(omega1: f64, omega2: f64, duration: f64) -> Result<Self> {
        let omega = omega1.hypot(omega2);
        let kappa = omega2.atan2(omega1);
        ScheduleBuilder::start(omega, kappa).hold(duration).build()
    }

    pub fn duration(&self) -> f64 {
        match self {
            PulseSchedule::Parametric(s) => s.duration(),
            PulseSchedule::Sampled(s) => s.duration(),
        }
    }

    /// Clamp t into [0, T], tolerating integrator-roundoff overshoot.
    fn domain(&self, t: f64) -> Result<f64> {
        let duration = self.duration();
        let tol = 1e-9 * (1.0 + duration);
        if t < -tol || t > duration + tol {
            return Err(Error::TimeOutOfDomain { t, duration });
        }
        Ok(t.clamp(0.0, duration))
    }

    /// Control amplitudes (Ω₁, Ω₂) at time t.
    pub fn controls(&self, t: f64) -> Result<(f64, f64)> {
        let (w1, w2, _, _) = self.controls_and_rates(t)?;
        Ok((w1, w2))
    }

    /// Control amplitudes and their time derivatives (Ω₁, Ω₂, Ω̇₁, Ω̇₂).
    pub fn controls_and_rates(&self, t: f64) -> Result<(f64, f64, f64, f64)> {
        let t = self.domain(t)?;
        match self {
            PulseSchedule::Parametric(s) => {
                let p = s.polar(t);
                let (sk, ck) = p.kappa.sin_cos();
                let w1 = p.omega * ck;
                let w2 = p.omega * sk;
                let r1 = p.omega_dot * ck - p.omega * p.kappa_dot * sk;
                let r2 = p.omega_dot * sk + p.omega * p.kappa_dot * ck;
                Ok((w1, w2, r1, r2))
            }
            PulseSchedule::Sampled(s) => Ok(s.controls_and_rates(t)),
        }
    }

    /// Polar controls (Ω, κ) and their rates at time t.
    pub fn polar(&self, t: f64) -> Result<PolarControls> {
        let t = self.domain(t)?;
        match self {
            PulseSchedule::Parametric(s) => Ok(s.polar(t)),
            PulseSchedule::Sampled(s) => {
                let (w1, w2, r1, r2) = s.controls_and_rates(t);
                let omega = w1.hypot(w2);
                let omega_sq = omega * omega;
                let kappa = w2.atan2(w1);
                let (omega_dot, kappa_dot) = if omega_sq > 0.0 {
                    ((w1 * r1 + w2 * r2) / omega, (r2 * w1 - w2 * r1) / omega_sq)
                } else {
                    (0.0, 0.0)
                };
                Ok(PolarControls {
                    omega,
                    kappa,
                    omega_dot,
                    kappa_dot,
                })
            }
        }
    }

    /// Times where the schedule is merely C¹: integrators should not step
    /// across these. Includes 0 and T; strictly increasing.
    pub fn smooth_breakpoints(&self) -> Vec<f64> {
        match self {
            PulseSchedule::Parametric(s) => s.starts.clone(),
            PulseSchedule::Sampled(s) => s.times.clone(),
        }
    }

    /// Check the schedule against the positivity floor Ω ≥ 1e-6·g√N.
    ///
    /// Both schedule forms are bounded by their node/sample values inside
    /// every piece (smoothstep is monotone; the sampled interpolant is
    /// monotone per interval), so piecewise endpoint checks are sufficient.
    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        params.validate()?;
        let floor = params.omega_floor();
        match self {
            PulseSchedule::Parametric(s) => {
                for (i, n) in s.nodes.iter().enumerate() {
                    if n.omega < floor {
                        let t = s.starts[i.min(s.starts.len() - 1)];
                        return Err(Error::DegenerateSchedule {
                            t,
                            omega: n.omega,
                            floor,
                        });
                    }
                }
            }
            PulseSchedule::Sampled(s) => {
                for i in 0..s.times.len() - 1 {
                    let w1 = s.omega1[i].min(s.omega1[i + 1]);
                    let w2 = s.omega2[i].min(s.omega2[i + 1]);
                    let lower_bound = w1.hypot(w2);
                    if lower_bound < floor {
                        return Err(Error::DegenerateSchedule {
                            t: s.times[i],
                            omega: lower_bound,
                            floor,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Instantaneous mixing angles θ, κ and the phases φ_k = δ_k t.
pub fn mixing_angles(p: &SystemParams, s: &PulseSchedule, t: f64) -> Result<MixingAngles> {
    let polar = s.polar(t)?;
    if polar.omega <= 0.0 {
        return Err(Error::DegenerateSchedule {
            t,
            omega: polar.omega,
            floor: 0.0,
        });
    }
    Ok(MixingAngles {
        omega: polar.omega,
        theta: p.g_sqrt_n.atan2(polar.omega),
        kappa: polar.kappa,
        kappa_dot: polar.kappa_dot,
        phi_1: p.delta_1 * t,
        phi_2: p.delta_2 * t,
    })
}

/// The 4×4 one-particle Hamiltonian for explicitly given control amplitudes.
///
/// Exists so oracle tests can probe limits (such as Ω₁ = Ω₂ = 0) that a
/// valid schedule cannot reach.
pub fn single_particle_h_from(p: &SystemParams, omega1: f64, omega2: f64, t: f64) -> CMat {
    let mut h = CMat::zeros(NUM_MODES, NUM_MODES);
    let a = Mode::Photon.index();
    let e = Mode::Excited.index();
    let c1 = Mode::Meta1.index();
    let c2 = Mode::Meta2.index();
    h[(e, e)] = C64::new(p.delta_p, 0.0);
    h[(e, a)] = C64::new(p.g_sqrt_n, 0.0);
    h[(e, c1)] = C64::from_polar(omega1, p.delta_1 * t);
    h[(e, c2)] = C64::from_polar(omega2, p.delta_2 * t);
    h[(a, e)] = h[(e, a)].conj();
    h[(c1, e)] = h[(e, c1)].conj();
    h[(c2, e)] = h[(e, c2)].conj();
    h
}

/// The 4×4 one-particle Hamiltonian at time t of the schedule.
pub fn single_particle_h(p: &SystemParams, s: &PulseSchedule, t: f64) -> Result<CMat> {
    let (w1, w2) = s.controls(t)?;
    Ok(single_particle_h_from(p, w1, w2, t))
}

/// Cached bilinear blocks of one sector, for assembling sector Hamiltonians
/// without re-enumerating ladder algebra at every time step.
#[derive(Clone, Debug)]
pub struct SectorOperators {
    basis: SectorBasis,
    /// blocks[4i+j] is the matrix of a_i† a_j on the sector.
    blocks: Vec<DMatrix<f64>>,
}

impl SectorOperators {
    pub fn new(l: u32) -> Result<Self> {
        let basis = sector_basis(l)?;
        let mut blocks = Vec::with_capacity(NUM_MODES * NUM_MODES);
        for i in Mode::ALL {
            for j in Mode::ALL {
                blocks.push(basis.bilinear(i, j));
            }
        }
        Ok(Self { basis, blocks })
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Σ_ij h_ij · (a_i†a_j on the sector), written into `out`.
    pub fn assemble_into(&self, h4: &CMat, out: &mut CMat) {
        let dim = self.dim();
        assert_eq!(out.nrows(), dim);
        assert_eq!(out.ncols(), dim);
        out.fill(C64::new(0.0, 0.0));
        for i in 0..NUM_MODES {
            for j in 0..NUM_MODES {
                let coeff = h4[(i, j)];
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let block = &self.blocks[NUM_MODES * i + j];
                for col in 0..dim {
                    for row in 0..dim {
                        let b = block[(row, col)];
                        if b != 0.0 {
                            out[(row, col)] += coeff * b;
                        }
                    }
                }
            }
        }
    }

    pub fn assemble(&self, h4: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim(), self.dim());
        self.assemble_into(h4, &mut out);
        out
    }
}

/// The Hamiltonian on the total-excitation-l sector at time t.
pub fn sector_h(p: &SystemParams, s: &PulseSchedule, t: f64, l: u32) -> Result<CMat> {
    let ops = SectorOperators::new(l)?;
    Ok(ops.assemble(&single_particle_h(p, s, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn resonant() -> SystemParams {
        SystemParams::resonant(1.0).unwrap()
    }

    #[test]
    fn params_reject_nonsense() {
        assert!(SystemParams::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, f64::NAN, 0.0, 0.0).is_err());
        assert!(SystemParams::new(2.5, 0.3, -0.1, 0.2).is_ok());
    }

    #[test]
    fn mixing_angles_match_symmetric_points() {
        let p = resonant();
        // Ω₁ = Ω₂ = g√N/√2 puts Ω = g√N, so θ = π/4 and κ = π/4.
        let s = PulseSchedule::constant(0.5f64.sqrt(), 0.5f64.sqrt(), 1.0).unwrap();
        let m = mixing_angles(&p, &s, 0.5).unwrap();
        assert!((m.omega - 1.0).abs() < 1e-14);
        assert!((m.theta - PI / 4.0).abs() < 1e-14);
        assert!((m.kappa - PI / 4.0).abs() < 1e-14);
        assert_eq!(m.kappa_dot, 0.0);

        // Weak controls push θ towards π/2.
        let weak = PulseSchedule::constant(2e-6, 0.0, 1.0).unwrap();
        let mw = mixing_angles(&p, &weak, 0.0).unwrap();
        assert!(mw.theta > 1.5);

        let detuned = SystemParams::new(1.0, 0.0, 0.25, -0.5).unwrap();
        let md = mixing_angles(&detuned, &s, 0.8).unwrap();
        assert!((md.phi_1 - 0.2).abs() < 1e-15);
        assert!((md.phi_2 + 0.4).abs() < 1e-15);
    }

    #[test]
    fn degenerate_controls_are_reported() {
        let p = resonant();
        let s = PulseSchedule::constant(0.0, 0.0, 1.0).unwrap();
        match mixing_angles(&p, &s, 0.3) {
            Err(Error::DegenerateSchedule { omega, .. }) => assert_eq!(omega, 0.0),
            other => panic!("expected degenerate-schedule error, got {other:?}"),
        }
        // validate flags the same schedule against the 1e-6·g√N floor.
        match s.validate(&p) {
            Err(Error::DegenerateSchedule { floor, .. }) => {
                assert!((floor - 1e-6).abs() < 1e-20);
            }
            other => panic!("expected floor violation, got {other:?}"),
        }
    }

    #[test]
    fn decoupled_hamiltonian_splits_into_photon_rabi_pair() {
        // With both controls off and Δ_p = 0, only a↔A couple: eigenvalues
        // {−g√N, 0, 0, +g√N}.
        let p = resonant();
        let h = single_particle_h_from(&p, 0.0, 0.0, 0.0);
        let (vals, _) = hermitian_eigen(&h);
        let want = [-1.0, 0.0, 0.0, 1.0];
        for (got, want) in vals.iter().zip(want) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn resonant_spectrum_has_two_dark_eigenvalues() {
        // Δ_p = 0, δ = 0: eigenvalues {0, 0, ±√(g²N+Ω²)}.
        let p = resonant();
        let (w1, w2) = (0.8, 1.7);
        let h = single_particle_h_from(&p, w1, w2, 0.0);
        let (vals, _) = hermitian_eigen(&h);
        let r = (1.0 + w1 * w1 + w2 * w2).sqrt();
        let want = [-r, 0.0, 0.0, r];
        for (got, want) in vals.iter().zip(want) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn detuned_spectrum_matches_arrow_matrix_roots() {
        // For general Δ_p the two bright eigenvalues solve λ(λ−Δ_p) = R²,
        // R² = g²N + Ω²; the dark pair stays pinned at zero.
        let mut rng = ChaCha8Rng::seed_from_u64(0x4d0d);
        for _ in 0..25 {
            let p = SystemParams::new(
                rng.gen_range(0.5..2.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-0.4..0.4),
                rng.gen_range(-0.4..0.4),
            )
            .unwrap();
            let (w1, w2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let t = rng.gen_range(0.0..3.0);
            let h = single_particle_h_from(&p, w1, w2, t);
            assert!((&h - h.adjoint()).norm() < 1e-14, "hermiticity");
            let (vals, _) = hermitian_eigen(&h);
            let r_sq = p.g_sqrt_n * p.g_sqrt_n + w1 * w1 + w2 * w2;
            let disc = (p.delta_p * p.delta_p + 4.0 * r_sq).sqrt();
            let lo = 0.5 * (p.delta_p - disc);
            let hi = 0.5 * (p.delta_p + disc);
            assert!((vals[0] - lo).abs() < 1e-12);
            assert!(vals[1].abs() < 1e-12);
            assert!(vals[2].abs() < 1e-12);
            assert!((vals[3] - hi).abs() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_is_real_when_phases_vanish() {
        let p = SystemParams::new(1.0, 0.4, 0.2, -0.3).unwrap();
        let h = single_particle_h_from(&p, 0.9, 1.1, 0.0);
        assert!(h.iter().all(|x| x.im == 0.0));
        let h_later = single_particle_h_from(&p, 0.9, 1.1, 1.3);
        assert!(h_later.iter().any(|x| x.im != 0.0));
    }

    #[test]
    fn sector_one_reproduces_the_single_particle_matrix() {
        let p = SystemParams::new(1.3, -0.2, 0.1, 0.35).unwrap();
        let s = PulseSchedule::constant(0.7, 1.2, 2.0).unwrap();
        let h4 = single_particle_h(&p, &s, 0.9).unwrap();
        let h1 = sector_h(&p, &s, 0.9, 1).unwrap();
        assert!((h4 - h1).iter().map(|x| x.norm()).sum::<f64>() < 1e-14);

        let h0 = sector_h(&p, &s, 0.9, 0).unwrap();
        assert_eq!(h0.nrows(), 1);
        assert!(h0[(0, 0)].norm() == 0.0);
    }

    #[test]
    fn sector_assembly_matches_ladder_arithmetic_oracle() {
        // Independent oracle: matrix elements ⟨p|Σ h_ij a_i†a_j|q⟩ computed
        // directly from occupation arithmetic, bypassing the bilinear cache.
        let p = SystemParams::new(1.0, 0.6, 0.15, -0.4).unwrap();
        let s = PulseSchedule::constant(0.8, 0.5, 3.0).unwrap();
        let t = 1.7;
        let h4 = single_particle_h(&p, &s, t).unwrap();
        for l in [2u32, 3] {
            let basis = sector_basis(l).unwrap();
            let got = sector_h(&p, &s, t, l).unwrap();
            let mut want = CMat::zeros(basis.dim(), basis.dim());
            for (q, occ) in basis.states().iter().enumerate() {
                for i in Mode::ALL {
                    for j in Mode::ALL {
                        let coeff = h4[(i.index(), j.index())];
                        if coeff.norm_sqr() == 0.0 {
                            continue;
                        }
                        let Some(mid) = occ.lowered(j) else { continue };
                        let target = mid.raised(i);
                        let amp =
                            (occ.n(j) as f64).sqrt() * ((mid.n(i) + 1) as f64).sqrt();
                        let row = basis.index_of(&target).unwrap();
                        want[(row, q)] += coeff * amp;
                    }
                }
            }
            assert!((&got - &want).norm() < 1e-13, "assembly mismatch at l={l}");
            // Δ_p enters only via the A-mode number operator, so at Δ_p = 0
            // the sector matrix is traceless.
            let p0 = resonant();
            let h0 = sector_h(&p0, &s, t, l).unwrap();
            let trace: C64 = (0..h0.nrows()).map(|i| h0[(i, i)]).sum();
            assert!(trace.norm() < 1e-13);
        }
    }

    #[test]
    fn parametric_rates_agree_with_finite_differences() {
        let schedule = ScheduleBuilder::start(2.0, 0.2)
            .hold(0.5)
            .ramp_to(0.3, 1.2, 2.0)
            .ramp_to(1.5, 0.4, 1.5)
            .build()
            .unwrap();
        assert!((schedule.duration() - 4.0).abs() < 1e-15);
        let eps = 1e-6;
        for &t in &[0.2, 0.9, 1.4, 2.2, 3.1, 3.9] {
            let (w1, w2, r1, r2) = schedule.controls_and_rates(t).unwrap();
            let (a1, a2) = schedule.controls(t - eps).unwrap();
            let (b1, b2) = schedule.controls(t + eps).unwrap();
            assert!((r1 - (b1 - a1) / (2.0 * eps)).abs() < 1e-6);
            assert!((r2 - (b2 - a2) / (2.0 * eps)).abs() < 1e-6);
            assert!(w1 >= 0.0 && w2 >= 0.0);
        }
        // C¹ at segment junctions: derivative vanishes from both sides.
        for &t in &[0.5, 2.5] {
            let before = schedule.polar(t - 1e-9).unwrap();
            let after = schedule.polar(t + 1e-9).unwrap();
            assert!((before.omega - after.omega).abs() < 1e-6);
            assert!(before.omega_dot.abs() < 1e-6 && after.omega_dot.abs() < 1e-6);
        }
    }

    #[test]
    fn schedule_domain_is_enforced_with_roundoff_grace() {
        let s = PulseSchedule::constant(1.0, 1.0, 2.0).unwrap();
        assert!(s.controls(2.0 + 1e-10).is_ok());
        assert!(s.controls(-1e-10).is_ok());
        assert!(matches!(
            s.controls(2.1),
            Err(Error::TimeOutOfDomain { .. })
        ));
        assert!(matches!(
            s.controls(-0.1),
            Err(Error::TimeOutOfDomain { .. })
        ));
    }

    #[test]
    fn sampled_schedule_tracks_its_parametric_source() {
        let source = ScheduleBuilder::start(1.8, 0.1)
            .ramp_to(0.2, 1.3, 3.0)
            .ramp_to(1.8, 0.1, 2.0)
            .build()
            .unwrap();
        let n = 1600;
        let duration = source.duration();
        let mut times = Vec::with_capacity(n + 1);
        let mut w1 = Vec::with_capacity(n + 1);
        let mut w2 = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = duration * i as f64 / n as f64;
            let (a, b) = source.controls(t).unwrap();
            times.push(t);
            w1.push(a);
            w2.push(b);
        }
        let sampled = PulseSchedule::Sampled(SampledSchedule::new(times, w1, w2).unwrap());
        let p = resonant();
        sampled.validate(&p).unwrap();
        for i in 0..=40 {
            let t = duration * i as f64 / 40.0;
            let (a1, a2) = source.controls(t).unwrap();
            let (b1, b2) = sampled.controls(t).unwrap();
            assert!((a1 - b1).abs() < 5e-6, "field 1 deviates at t={t}");
            assert!((a2 - b2).abs() < 5e-6, "field 2 deviates at t={t}");
            let pa = source.polar(t).unwrap();
            let pb = sampled.polar(t).unwrap();
            assert!((pa.kappa - pb.kappa).abs() < 2e-5);
            assert!((pa.kappa_dot - pb.kappa_dot).abs() < 2e-3);
        }
    }

    #[test]
    fn sampled_interpolant_respects_sample_bounds() {
        // Monotone data: the interpolant may not overshoot, so a floor check
        // on samples certifies positivity between them.
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let w1: Vec<f64> = (0..=10).map(|i| 2.0 - 0.19 * i as f64).collect();
        let w2 = vec![0.4; 11];
        let s = SampledSchedule::new(times, w1.clone(), w2).unwrap();
        for i in 0..=500 {
            let t = 5.0 * i as f64 / 500.0;
            let (v, _) = s.eval_field(&s.omega1, &s.slope1, t);
            assert!(v <= w1[0] + 1e-12 && v >= w1[10] - 1e-12);
        }
        let held: Vec<f64> = (0..=500)
            .map(|i| s.eval_field(&s.omega2, &s.slope2, 5.0 * i as f64 / 500.0).0)
            .collect();
        assert!(held.iter().all(|&v| (v - 0.4).abs() < 1e-12));
    }

    #[test]
    fn sampled_schedule_rejects_bad_grids() {
        assert!(SampledSchedule::new(vec![0.0], vec![1.0], vec![1.0]).is_err());
        assert!(SampledSchedule::new(vec![0.5, 1.0], vec![1.0; 2], vec![1.0; 2]).is_err());
        assert!(SampledSchedule::new(vec![0.0, 0.0], vec![1.0; 2], vec![1.0; 2]).is_err());
        assert!(SampledSchedule::new(vec![0.0, 1.0], vec![1.0, -0.1], vec![1.0; 2]).is_err());
        assert!(SampledSchedule::new(vec![0.0, 1.0], vec![1.0; 2], vec![1.0; 3]).is_err());
    }
}
