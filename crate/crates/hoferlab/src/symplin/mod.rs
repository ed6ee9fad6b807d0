//! Symplectic linear algebra on R^{2n} ~ C^n and Maslov indices of loops of
//! Lagrangian subspaces.
//!
//! A Lagrangian subspace is stored as U * R^n for a unitary frame U, with the
//! identification z = x + iy and omega_0 = sum dx_j ^ dy_j, so that
//! omega_0(v, w) = Im <v, w>. The Maslov index of a closed loop of frames is
//! the winding number of det(U(t))^2, normalized so that t -> e^{i pi t} R
//! in C has index +1.

mod oracle;

pub use oracle::crossing_index;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const UNITARITY_TOL: f64 = 1e-12;
pub const CLOSURE_TOL: f64 = 1e-9;
pub const ISOTROPY_TOL: f64 = 1e-10;

/// An n x n complex matrix with orthonormal columns. The columns span a
/// Lagrangian subspace U * R^n of R^{2n}.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFrame {
    entries: DMatrix<Complex64>,
}

impl UnitaryFrame {
    /// Wrap a matrix that is already unitary to within `UNITARITY_TOL`
    /// in the max-entry norm of U*U - I.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let dev = unitarity_deviation(&entries);
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(UnitaryFrame { entries })
    }

    pub fn identity(n: usize) -> Self {
        UnitaryFrame {
            entries: DMatrix::identity(n, n),
        }
    }

    /// Diagonal frame diag(e^{i phi_1}, ..., e^{i phi_n}).
    pub fn diagonal_phases(phases: &[f64]) -> Self {
        let n = phases.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, &p) in phases.iter().enumerate() {
            m[(j, j)] = Complex64::from_polar(1.0, p);
        }
        UnitaryFrame { entries: m }
    }

    /// Modified Gram-Schmidt orthonormalization of linearly independent
    /// columns; the span is preserved. Fails when the condition estimate
    /// (post-projection column norm over original norm) drops below 1e-10.
    pub fn orthonormalize(basis: &[DVector<Complex64>]) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty basis".into()));
        }
        for v in basis {
            if v.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "expected {} columns of dimension {}, got dimension {}",
                    n,
                    n,
                    v.len()
                )));
            }
        }
        let mut cols: Vec<DVector<Complex64>> = basis.to_vec();
        for j in 0..n {
            let original = cols[j].norm();
            for i in 0..j {
                let proj = cols[i].dotc(&cols[j]);
                let prev = cols[i].clone();
                cols[j] -= prev * proj;
            }
            let remaining = cols[j].norm();
            if original == 0.0 || remaining / original < 1e-10 {
                return Err(Error::DegenerateBasis(if original == 0.0 {
                    0.0
                } else {
                    remaining / original
                }));
            }
            cols[j] /= Complex64::new(remaining, 0.0);
        }
        // second pass tightens orthogonality to machine precision
        for j in 0..n {
            for i in 0..j {
                let proj = cols[i].dotc(&cols[j]);
                let prev = cols[i].clone();
                cols[j] -= prev * proj;
            }
            let nrm = cols[j].norm();
            cols[j] /= Complex64::new(nrm, 0.0);
        }
        let m = DMatrix::from_columns(&cols);
        UnitaryFrame::new(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn det(&self) -> Complex64 {
        self.entries.clone().lu().determinant()
    }

    /// arg det(U)^2 in (-pi, pi].
    pub fn squared_det_phase(&self) -> f64 {
        let d = self.det();
        (d * d).arg()
    }

    /// U(t)^T U(t): the complex symmetric unitary that determines the
    /// Lagrangian U * R^n independently of the real-orthogonal frame choice.
    pub fn symmetric_square(&self) -> DMatrix<Complex64> {
        self.entries.transpose() * &self.entries
    }
}

fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    if n != m.ncols() {
        return f64::INFINITY;
    }
    let gram = m.adjoint() * m;
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            dev = dev.max((gram[(i, j)] - target).norm());
        }
    }
    dev
}

/// omega_0(v, w) for real vectors in R^{2n}, stored as (x_1..x_n, y_1..y_n).
pub fn standard_symplectic_form(v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let n = v.len() / 2;
    let mut s = 0.0;
    for j in 0..n {
        s += v[j] * w[n + j] - v[n + j] * w[j];
    }
    s
}

/// True iff the n given vectors in R^{2n} span an n-dimensional
/// omega_0-isotropic subspace. Returns false (not an error) on rank
/// deficiency.
pub fn is_lagrangian(vectors: &[DVector<f64>]) -> bool {
    let n = vectors.len();
    if n == 0 || vectors.iter().any(|v| v.len() != 2 * n) {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if standard_symplectic_form(&vectors[i], &vectors[j]).abs() > ISOTROPY_TOL {
                return false;
            }
        }
    }
    let m = DMatrix::from_columns(vectors);
    m.rank(1e-10) == n
}

/// Convert a real vector (x, y) in R^{2n} to x + iy in C^n.
pub fn real_to_complex(v: &DVector<f64>) -> DVector<Complex64> {
    let n = v.len() / 2;
    DVector::from_fn(n, |j, _| Complex64::new(v[j], v[n + j]))
}

/// Convert z in C^n to (Re z, Im z) in R^{2n}.
pub fn complex_to_real(z: &DVector<Complex64>) -> DVector<f64> {
    let n = z.len();
    DVector::from_fn(2 * n, |i, _| if i < n { z[i].re } else { z[i - n].im })
}

/// A sampled loop of Lagrangian subspaces, t in [0, 1], represented by
/// unitary frames.
#[derive(Debug, Clone)]
pub struct LagrangianPath {
    samples: Vec<(f64, UnitaryFrame)>,
    closed: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct PathJson {
    n: usize,
    samples: Vec<SampleJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleJson {
    t: f64,
    /// Row-major n*n entries, each [re, im].
    frame: Vec<[f64; 2]>,
}

impl LagrangianPath {
    /// Validates: strictly increasing sample times with t_0 = 0 and
    /// t_last = 1, closure (U(0)^-1 U(1) real orthogonal to 1e-9 when
    /// `closed`), and the phase-continuity bound |delta arg det^2| < pi/2.
    pub fn new(samples: Vec<(f64, UnitaryFrame)>, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidPath("need at least two samples".into()));
        }
        let n = samples[0].1.dim();
        if samples.iter().any(|(_, f)| f.dim() != n) {
            return Err(Error::InvalidPath("frames have mixed dimensions".into()));
        }
        if samples[0].0 != 0.0 || samples[samples.len() - 1].0 != 1.0 {
            return Err(Error::InvalidPath("sample times must start at 0 and end at 1".into()));
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidPath("sample times must be strictly increasing".into()));
            }
        }
        if closed {
            let c = samples[0].1.matrix().adjoint() * samples[samples.len() - 1].1.matrix();
            let mut im_max: f64 = 0.0;
            for v in c.iter() {
                im_max = im_max.max(v.im.abs());
            }
            if im_max > CLOSURE_TOL {
                return Err(Error::NotClosed(format!(
                    "U(0)^-1 U(1) deviates from real by {:.3e}",
                    im_max
                )));
            }
        }
        let path = LagrangianPath { samples, closed };
        path.check_phase_steps()?;
        Ok(path)
    }

    fn check_phase_steps(&self) -> Result<()> {
        let mut prev = self.samples[0].1.squared_det_phase();
        for (i, (_, frame)) in self.samples.iter().enumerate().skip(1) {
            let cur = frame.squared_det_phase();
            let step = principal_branch(cur - prev);
            if step.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::Undersampled {
                    index: i,
                    step: step.abs(),
                });
            }
            prev = cur;
        }
        Ok(())
    }

    pub fn samples(&self) -> &[(f64, UnitaryFrame)] {
        &self.samples
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn dim(&self) -> usize {
        self.samples[0].1.dim()
    }

    /// Maslov index: winding number of t -> det(U(t))^2, accumulated by
    /// principal-branch phase increments. Hard failure instead of silent
    /// interpolation when a step reaches pi/2.
    pub fn maslov_index(&self) -> Result<i64> {
        if !self.closed {
            return Err(Error::NotClosed("maslov index needs a closed path".into()));
        }
        let mut total = 0.0;
        let mut prev = self.samples[0].1.squared_det_phase();
        for (i, (_, frame)) in self.samples.iter().enumerate().skip(1) {
            let cur = frame.squared_det_phase();
            let step = principal_branch(cur - prev);
            if step.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::Undersampled {
                    index: i,
                    step: step.abs(),
                });
            }
            total += step;
            prev = cur;
        }
        let winding = total / (2.0 * std::f64::consts::PI);
        let rounded = winding.round();
        if (winding - rounded).abs() >= 0.1 {
            return Err(Error::NonIntegralWinding(winding));
        }
        Ok(rounded as i64)
    }

    /// Independent crossing oracle; see [`crossing_index`].
    pub fn maslov_crossing_oracle(&self) -> Result<i64> {
        crossing_index(self)
    }

    /// Concatenation of two closed loops (self followed by other, each
    /// traversed in half the parameter time).
    pub fn concatenate(&self, other: &LagrangianPath) -> Result<LagrangianPath> {
        let mut samples = Vec::new();
        for (t, f) in &self.samples {
            samples.push((0.5 * t, f.clone()));
        }
        for (t, f) in other.samples.iter().skip(1) {
            samples.push((0.5 + 0.5 * t, f.clone()));
        }
        LagrangianPath::new(samples, self.closed && other.closed)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: PathJson = serde_json::from_str(text)?;
        let n = parsed.n;
        let mut samples = Vec::with_capacity(parsed.samples.len());
        for s in parsed.samples {
            if s.frame.len() != n * n {
                return Err(Error::InvalidPath(format!(
                    "frame at t = {} has {} entries, expected {}",
                    s.t,
                    s.frame.len(),
                    n * n
                )));
            }
            let m = DMatrix::from_fn(n, n, |i, j| {
                let e = s.frame[i * n + j];
                Complex64::new(e[0], e[1])
            });
            samples.push((s.t, UnitaryFrame::new(m)?));
        }
        LagrangianPath::new(samples, true)
    }

    pub fn to_json(&self) -> String {
        let n = self.dim();
        let doc = PathJson {
            n,
            samples: self
                .samples
                .iter()
                .map(|(t, f)| SampleJson {
                    t: *t,
                    frame: f
                        .matrix()
                        .row_iter()
                        .flat_map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("path serialization cannot fail")
    }
}

/// Wrap an angle difference to (-pi, pi].
pub fn principal_branch(mut d: f64) -> f64 {
    use std::f64::consts::PI;
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// The loop t -> diag(e^{i pi t} x k, 1 x (n - k)) sampled uniformly.
pub fn diagonal_phase_loop(k: usize, n: usize, samples: usize) -> LagrangianPath {
    assert!(k <= n && n >= 1 && samples >= 2);
    let pts = (0..=samples)
        .map(|i| {
            let t = i as f64 / samples as f64;
            let phases: Vec<f64> = (0..n)
                .map(|j| if j < k { std::f64::consts::PI * t } else { 0.0 })
                .collect();
            (t, UnitaryFrame::diagonal_phases(&phases))
        })
        .collect();
    LagrangianPath::new(pts, true).expect("diagonal loop is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_complex_matrix(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        DMatrix::from_fn(n, n, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
    }

    pub(crate) fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> UnitaryFrame {
        let m = random_complex_matrix(n, rng);
        let cols: Vec<DVector<Complex64>> = m.column_iter().map(|c| c.into_owned()).collect();
        UnitaryFrame::orthonormalize(&cols).expect("random matrix is full rank a.s.")
    }

    #[test]
    fn orthonormalize_identity_passthrough() {
        let cols: Vec<DVector<Complex64>> = (0..3)
            .map(|j| DVector::from_fn(3, |i, _| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)))
            .collect();
        let u = UnitaryFrame::orthonormalize(&cols).unwrap();
        assert_eq!(u, UnitaryFrame::identity(3));
    }

    #[test]
    fn orthonormalize_removes_scaling() {
        let mut cols: Vec<DVector<Complex64>> = (0..2)
            .map(|j| DVector::from_fn(2, |i, _| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)))
            .collect();
        cols[0] *= Complex64::new(2.0, 0.0);
        let u = UnitaryFrame::orthonormalize(&cols).unwrap();
        assert_eq!(u, UnitaryFrame::identity(2));
    }

    #[test]
    fn orthonormalize_random_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_complex_matrix(3, &mut rng);
            let cols: Vec<DVector<Complex64>> = m.column_iter().map(|c| c.into_owned()).collect();
            let u = UnitaryFrame::orthonormalize(&cols).unwrap();
            assert!(unitarity_deviation(u.matrix()) < 1e-12);
        }
    }

    #[test]
    fn orthonormalize_rejects_rank_deficiency() {
        let a = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        let b = a.clone() * Complex64::new(2.0, 1.0);
        assert!(matches!(
            UnitaryFrame::orthonormalize(&[a, b]),
            Err(Error::DegenerateBasis(_))
        ));
    }

    #[test]
    fn standard_real_subspace_is_lagrangian() {
        let vs: Vec<DVector<f64>> = (0..2)
            .map(|j| DVector::from_fn(4, |i, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        assert!(is_lagrangian(&vs));
    }

    #[test]
    fn span_e1_je1_is_not_lagrangian() {
        // (e1, J e1) in R^4: J(x, y) = (-y, x), so J e1 = e3 in (x1,x2,y1,y2)
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let je1 = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(standard_symplectic_form(&e1, &je1), 1.0);
        assert!(!is_lagrangian(&[e1, je1]));
    }

    #[test]
    fn unitary_images_of_reals_are_lagrangian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            for _ in 0..10 {
                let u = random_unitary(n, &mut rng);
                let vectors: Vec<DVector<f64>> = (0..n)
                    .map(|j| {
                        let col = u.matrix().column(j).into_owned();
                        complex_to_real(&col)
                    })
                    .collect();
                assert!(is_lagrangian(&vectors));
            }
        }
    }

    #[test]
    fn rank_deficient_reals_return_false() {
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert!(!is_lagrangian(&[e1.clone(), e1]));
    }

    #[test]
    fn constant_loop_has_index_zero() {
        let samples: Vec<(f64, UnitaryFrame)> = (0..=8)
            .map(|i| (i as f64 / 8.0, UnitaryFrame::identity(2)))
            .collect();
        let path = LagrangianPath::new(samples, true).unwrap();
        assert_eq!(path.maslov_index().unwrap(), 0);
    }

    #[test]
    fn half_turn_line_has_index_one() {
        let path = diagonal_phase_loop(1, 1, 64);
        assert_eq!(path.maslov_index().unwrap(), 1);
    }

    #[test]
    fn diagonal_loops_have_index_k() {
        for n in 1..=4 {
            for k in 0..=n {
                let path = diagonal_phase_loop(k, n, 96);
                assert_eq!(path.maslov_index().unwrap(), k as i64, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn index_is_reparametrization_and_refinement_invariant() {
        // same loop, warped times and doubled resolution
        let base = diagonal_phase_loop(2, 3, 50);
        let warped: Vec<(f64, UnitaryFrame)> = (0..=200)
            .map(|i| {
                let s = i as f64 / 200.0;
                let t = s * s * (3.0 - 2.0 * s); // smooth monotone warp
                let phases: Vec<f64> = (0..3)
                    .map(|j| if j < 2 { std::f64::consts::PI * t } else { 0.0 })
                    .collect();
                (s, UnitaryFrame::diagonal_phases(&phases))
            })
            .collect();
        let warped = LagrangianPath::new(warped, true).unwrap();
        assert_eq!(base.maslov_index().unwrap(), warped.maslov_index().unwrap());
    }

    #[test]
    fn concatenation_adds_indices() {
        let a = diagonal_phase_loop(1, 2, 80);
        let b = diagonal_phase_loop(2, 2, 80);
        let c = a.concatenate(&b).unwrap();
        assert_eq!(
            c.maslov_index().unwrap(),
            a.maslov_index().unwrap() + b.maslov_index().unwrap()
        );
    }

    #[test]
    fn undersampled_loop_is_rejected() {
        let samples: Vec<(f64, UnitaryFrame)> = (0..=3)
            .map(|i| {
                let t = i as f64 / 3.0;
                (t, UnitaryFrame::diagonal_phases(&[2.0 * std::f64::consts::PI * t]))
            })
            .collect();
        // det^2 advances by 4pi/3 >= pi/2 per step
        assert!(matches!(
            LagrangianPath::new(samples, true),
            Err(Error::Undersampled { .. })
        ));
    }

    #[test]
    fn json_roundtrip_preserves_index() {
        let path = diagonal_phase_loop(2, 2, 40);
        let text = path.to_json();
        let back = LagrangianPath::from_json(&text).unwrap();
        assert_eq!(back.maslov_index().unwrap(), 2);
        assert_relative_eq!(back.samples()[7].0, path.samples()[7].0);
    }
}
