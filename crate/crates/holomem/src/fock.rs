//! Fixed-excitation Fock sectors of the four collective modes.
//!
//! The memory couples one quantized probe mode to three collective atomic
//! modes: the excited-state mode A and the two meta-stable modes C1, C2.
//! Every Hamiltonian in this crate is a sum of number-conserving bilinears
//! a_i† a_j over these four oscillators, so the total excitation number is a
//! constant of motion and the Fock space splits into sectors of fixed total
//! l with binomial(l+3, 3) occupation states each. This module owns the
//! sector bases (lexicographically descending, so indices are deterministic
//! and shared by every consumer), the bilinear matrices on them, and the
//! ladder maps that connect adjacent sectors.

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{C64, CVec};

/// Number of bosonic modes (probe photon plus three collective atomic modes).
pub const NUM_MODES: usize = 4;

/// Default cap on the sector index; protocols use l <= 4, kept at twice that.
pub const DEFAULT_MAX_SECTOR: u32 = 8;

static MAX_SECTOR: AtomicU32 = AtomicU32::new(DEFAULT_MAX_SECTOR);

/// Current process-wide sector cap.
pub fn max_sector() -> u32 {
    MAX_SECTOR.load(AtomicOrdering::Relaxed)
}

/// Raise or lower the process-wide sector cap. Intended to be called once at
/// startup (the command-line tool maps an environment override here); library
/// code only ever reads it.
pub fn set_max_sector(limit: u32) {
    MAX_SECTOR.store(limit, AtomicOrdering::Relaxed);
}

/// One of the four bosonic modes, in the fixed storage order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Quantized probe field a.
    Photon = 0,
    /// Collective excited-state mode A.
    Excited = 1,
    /// Meta-stable collective mode C1.
    Meta1 = 2,
    /// Meta-stable collective mode C2.
    Meta2 = 3,
}

impl Mode {
    pub const ALL: [Mode; NUM_MODES] = [Mode::Photon, Mode::Excited, Mode::Meta1, Mode::Meta2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::Photon => "a",
            Mode::Excited => "A",
            Mode::Meta1 => "C1",
            Mode::Meta2 => "C2",
        }
    }
}

/// Occupation numbers of the four modes, in the order (a, A, C1, C2).
///
/// The derived ordering is ascending lexicographic on that tuple; sector
/// bases store states in descending order and handle the reversal in their
/// lookups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationState([u32; NUM_MODES]);

impl OccupationState {
    pub fn new(counts: [u32; NUM_MODES]) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> [u32; NUM_MODES] {
        self.0
    }

    pub fn n(&self, mode: Mode) -> u32 {
        self.0[mode.index()]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// State with one more quantum in `mode`.
    pub fn raised(&self, mode: Mode) -> OccupationState {
        let mut c = self.0;
        c[mode.index()] += 1;
        Self(c)
    }

    /// State with one quantum removed from `mode`, or None on an empty mode.
    pub fn lowered(&self, mode: Mode) -> Option<OccupationState> {
        let mut c = self.0;
        if c[mode.index()] == 0 {
            return None;
        }
        c[mode.index()] -= 1;
        Some(Self(c))
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{},{},{}>", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// Ordered basis of the total-excitation-l sector.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    l: u32,
    states: Vec<OccupationState>,
}

/// Basis of sector l under the process-wide capacity limit.
pub fn sector_basis(l: u32) -> Result<SectorBasis> {
    SectorBasis::with_limit(l, max_sector())
}

impl SectorBasis {
    /// Basis of sector l, refusing l beyond `limit`.
    pub fn with_limit(l: u32, limit: u32) -> Result<Self> {
        if l > limit {
            return Err(Error::SectorCapacity { l, max: limit });
        }
        let mut states = Vec::with_capacity(Self::dimension_of(l));
        for n_a in (0..=l).rev() {
            for n_e in (0..=l - n_a).rev() {
                for n_c1 in (0..=l - n_a - n_e).rev() {
                    let n_c2 = l - n_a - n_e - n_c1;
                    states.push(OccupationState::new([n_a, n_e, n_c1, n_c2]));
                }
            }
        }
        Ok(Self { l, states })
    }

    /// Number of occupation states in sector l: binomial(l+3, 3).
    pub fn dimension_of(l: u32) -> usize {
        let l = l as usize;
        (l + 1) * (l + 2) * (l + 3) / 6
    }

    pub fn excitation(&self) -> u32 {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[OccupationState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> OccupationState {
        self.states[index]
    }

    /// Position of an occupation state, by binary search in the descending
    /// ordering.
    pub fn index_of(&self, state: &OccupationState) -> Option<usize> {
        self.states.binary_search_by(|s| state.cmp(s)).ok()
    }

    /// Matrix of a_create† a_annihilate on this sector, with the standard
    /// bosonic amplitudes. Entries are real because no phases enter the
    /// ladder algebra; column q holds the image of basis state q.
    pub fn bilinear(&self, create: Mode, annihilate: Mode) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for (q, occ) in self.states.iter().enumerate() {
            let Some(mid) = occ.lowered(annihilate) else {
                continue;
            };
            let amp = (occ.n(annihilate) as f64 * (mid.n(create) + 1) as f64).sqrt();
            let raised = mid.raised(create);
            let p = self
                .index_of(&raised)
                .expect("number-conserving move stays inside the sector");
            m[(p, q)] += amp;
        }
        m
    }
}

/// Matrix of a_create† a_annihilate on sector l (capacity-checked).
pub fn bilinear(create: Mode, annihilate: Mode, l: u32) -> Result<DMatrix<f64>> {
    Ok(sector_basis(l)?.bilinear(create, annihilate))
}

/// Complex amplitude vector over one sector basis.
#[derive(Clone, Debug)]
pub struct SectorVector {
    l: u32,
    amplitudes: CVec,
}

impl SectorVector {
    pub fn zeros(basis: &SectorBasis) -> Self {
        Self {
            l: basis.excitation(),
            amplitudes: CVec::zeros(basis.dim()),
        }
    }

    /// The vacuum, the sole state of sector 0.
    pub fn vacuum() -> Self {
        Self {
            l: 0,
            amplitudes: CVec::from_element(1, C64::new(1.0, 0.0)),
        }
    }

    pub fn basis_state(basis: &SectorBasis, index: usize) -> Self {
        let mut v = Self::zeros(basis);
        v.amplitudes[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_amplitudes(l: u32, amplitudes: CVec) -> Result<Self> {
        let expected = SectorBasis::dimension_of(l);
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        Ok(Self { l, amplitudes })
    }

    pub fn excitation(&self) -> u32 {
        self.l
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut CVec {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Hermitian inner product, conjugating `self`.
    pub fn inner(&self, other: &SectorVector) -> Result<C64> {
        if self.l != other.l {
            return Err(Error::SectorMismatch {
                left: self.l,
                right: other.l,
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Expectation of the number operator of `mode`, with the amplitudes
    /// taken as given (no normalization applied).
    pub fn occupancy(&self, mode: Mode) -> f64 {
        let basis =
            SectorBasis::with_limit(self.l, u32::MAX).expect("unlimited basis always builds");
        self.amplitudes
            .iter()
            .zip(basis.states())
            .map(|(c, occ)| c.norm_sqr() * occ.n(mode) as f64)
            .sum()
    }

    pub fn assert_normalized(&self, tolerance: f64) -> Result<()> {
        let deviation = (self.norm() - 1.0).abs();
        if deviation > tolerance {
            return Err(Error::NotNormalized {
                deviation,
                tolerance,
            });
        }
        Ok(())
    }
}

/// Apply the creation operator Σ_i weights[i] a_i† , mapping sector l to
/// sector l+1. The target sector is capacity-checked.
pub fn apply_creation(weights: &[C64; NUM_MODES], v: &SectorVector) -> Result<SectorVector> {
    let src = SectorBasis::with_limit(v.l, u32::MAX).expect("source sector exists");
    let dst = sector_basis(v.l + 1)?;
    let mut out = SectorVector::zeros(&dst);
    for (q, amp) in v.amplitudes.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let occ = src.state(q);
        for mode in Mode::ALL {
            let w = weights[mode.index()];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            let p = dst
                .index_of(&occ.raised(mode))
                .expect("raised state lies in the next sector");
            out.amplitudes[p] += w * amp * ((occ.n(mode) + 1) as f64).sqrt();
        }
    }
    Ok(out)
}

/// Apply the annihilation operator Σ_i weights[i] a_i , mapping sector l to
/// sector l−1. Annihilating the vacuum sector is a caller error.
pub fn apply_annihilation(weights: &[C64; NUM_MODES], v: &SectorVector) -> Result<SectorVector> {
    if v.l == 0 {
        return Err(Error::InvalidParams(
            "annihilation out of the vacuum sector has no target sector".into(),
        ));
    }
    let src = SectorBasis::with_limit(v.l, u32::MAX).expect("source sector exists");
    let dst = SectorBasis::with_limit(v.l - 1, u32::MAX).expect("lower sector exists");
    let mut out = SectorVector::zeros(&dst);
    for (q, amp) in v.amplitudes.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let occ = src.state(q);
        for mode in Mode::ALL {
            let w = weights[mode.index()];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            let Some(lowered) = occ.lowered(mode) else {
                continue;
            };
            let p = dst
                .index_of(&lowered)
                .expect("lowered state lies in the previous sector");
            out.amplitudes[p] += w * amp * (occ.n(mode) as f64).sqrt();
        }
    }
    Ok(out)
}
