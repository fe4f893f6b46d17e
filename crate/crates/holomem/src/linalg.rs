//! Dense complex linear algebra helpers shared by the solvers.
//!
//! Every generator in this crate is Hermitian (Hamiltonians) or
//! anti-Hermitian (connections), so matrix exponentials are computed through
//! the Hermitian eigendecomposition, which keeps propagators unitary to
//! machine precision. Time stepping uses a scaled Taylor expansion of
//! exp(z H) applied directly to vectors; with sub-steps capped at
//! ‖z H‖ <= 1/4 the order-12 tail is below 6e-17, i.e. unitary to roundoff.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I1: C64 = C64::new(0.0, 1.0);

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted ascending.
/// Returns (eigenvalues, eigenvectors as columns).
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let se = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// exp(z H) for Hermitian H, via eigendecomposition. Exactly normal; unitary
/// when z is purely imaginary.
pub fn expm_hermitian(h: &CMat, z: C64) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let phase = (z * l).exp();
        for r in 0..scaled.nrows() {
            scaled[(r, j)] *= phase;
        }
    }
    scaled * vecs.adjoint()
}

/// exp(K) for anti-Hermitian K (K† = −K). Unitary by construction.
pub fn expm_antihermitian(k: &CMat) -> CMat {
    // K = i H with H = −i K Hermitian.
    let h = k.map(|x| -I1 * x);
    expm_hermitian(&h, I1)
}

/// Reusable buffers for [`expm_apply`].
#[derive(Clone)]
pub struct ExpBuffers {
    term: CVec,
    next: CVec,
    acc: CVec,
}

impl ExpBuffers {
    pub fn new(dim: usize) -> Self {
        Self {
            term: CVec::zeros(dim),
            next: CVec::zeros(dim),
            acc: CVec::zeros(dim),
        }
    }
}

const TAYLOR_ORDER: usize = 12;
const TAYLOR_STEP_NORM: f64 = 0.25;

/// v <- exp(z H) v for Hermitian (or any) H with scaled Taylor summation.
/// Sub-steps keep ‖z H‖_1 <= 1/4 so the truncation tail is < 6e-17 ‖v‖.
pub fn expm_apply(h: &CMat, z: C64, v: &mut CVec, buf: &mut ExpBuffers) {
    let norm1 = h
        .column_iter()
        .map(|c| c.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let scale = norm1 * z.norm();
    let substeps = ((scale / TAYLOR_STEP_NORM).ceil() as usize).max(1);
    let zs = z / substeps as f64;
    for _ in 0..substeps {
        buf.acc.copy_from(v);
        buf.term.copy_from(v);
        for k in 1..=TAYLOR_ORDER {
            h.mul_to(&buf.term, &mut buf.next);
            let f = zs / k as f64;
            for x in buf.next.iter_mut() {
                *x *= f;
            }
            std::mem::swap(&mut buf.term, &mut buf.next);
            buf.acc += &buf.term;
        }
        v.copy_from(&buf.acc);
    }
}

/// Frobenius norm.
pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral (operator 2-) norm via the Hermitian eigenproblem of M†M.
pub fn spectral_norm(m: &CMat) -> f64 {
    let g = m.adjoint() * m;
    let (vals, _) = hermitian_eigen(&g);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Largest |eigenvalue| of a Hermitian matrix.
pub fn hermitian_spectral_norm(h: &CMat) -> f64 {
    let (vals, _) = hermitian_eigen(h);
    vals.iter().fold(0.0_f64, |a, &x| a.max(x.abs()))
}

/// ‖U†U − 1‖ in the spectral norm.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u - CMat::identity(n, n);
    spectral_norm(&g)
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.norm()))
}

/// Adaptive Simpson quadrature with an absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            left + right + err / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}
