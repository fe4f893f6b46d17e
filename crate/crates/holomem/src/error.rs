//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong when building bases, evaluating schedules,
/// integrating, or setting up a protocol run.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Requested excitation sector exceeds the configured capacity.
    #[error("sector l = {l} exceeds the configured capacity (max sector {max})")]
    SectorCapacity { l: u32, max: u32 },

    /// Ensemble size or photon cutoff beyond the brute-force caps.
    #[error("finite ensemble size out of range: n_atoms = {n_atoms} (1..={max_atoms}), n_max = {n_max} (1..={max_photons})")]
    FiniteCaps {
        n_atoms: usize,
        n_max: usize,
        max_atoms: usize,
        max_photons: usize,
    },

    /// A vector had the wrong length for the operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Two states live in different excitation sectors.
    #[error("sector mismatch: l = {left} vs l = {right}")]
    SectorMismatch { left: u32, right: u32 },

    /// System parameters failed validation.
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    /// A schedule could not be constructed from the given data.
    #[error("invalid pulse schedule: {0}")]
    InvalidSchedule(String),

    /// Evaluation time outside the schedule domain.
    #[error("time t = {t} outside schedule domain [0, {duration}]")]
    TimeOutOfDomain { t: f64, duration: f64 },

    /// Total control amplitude fell below the positivity floor, so the
    /// mixing angles are undefined.
    #[error("degenerate schedule at t = {t}: total control amplitude {omega} below floor {floor}")]
    DegenerateSchedule { t: f64, omega: f64, floor: f64 },

    /// Integration window is empty or reversed.
    #[error("bad time window: t0 = {t0}, t1 = {t1}")]
    BadTimeWindow { t0: f64, t1: f64 },

    /// The adaptive integrator could not meet its tolerance.
    #[error("integration step size underflow at t = {t} (dt = {dt}); tolerance unattainable")]
    StepUnderflow { t: f64, dt: f64 },

    /// Input state is not normalized.
    #[error("state not normalized: |norm - 1| = {deviation} exceeds {tolerance}")]
    NotNormalized { deviation: f64, tolerance: f64 },

    /// Protocol preconditions on the schedule endpoints are violated.
    #[error("protocol setup failed: {0}")]
    ProtocolSetup(String),

    /// Phase-schedule design target outside the reachable range.
    #[error("design target phi = {target} unreachable: reachable range [{lo}, {hi}] with the given family")]
    DesignUnreachable { target: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
