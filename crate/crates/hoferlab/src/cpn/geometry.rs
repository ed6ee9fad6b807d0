//! Fubini-Study form, chart differentials, Hamiltonian vector fields, and
//! extremum search on spheres.
//!
//! All differential-geometric work happens in an affine chart. For a real
//! function f on CP^n the chart differential is packed as a complex covector
//! c with df(v) = Re(c^T v), and the Hamiltonian vector field defined by
//! i(X) omega = df has the closed form
//!
//! ```text
//! X = -i pi (1 + |zeta|^2) (I + zeta zeta^*) conj(c)
//! ```
//!
//! which follows from the Sherman-Morrison inverse of the Fubini-Study
//! Gram matrix. No linear solve is needed.

use crate::cpn::point::{Chart, ProjectivePoint};
use crate::error::{Error, Result};
use crate::quad::golden_max;
use nalgebra::DVector;
use num_complex::Complex64;

/// omega(v, w) at a chart point, for the Fubini-Study form normalized so
/// that CP^1 has unit area (standard form divided by pi).
pub fn fs_form_at(zeta: &DVector<Complex64>, v: &DVector<Complex64>, w: &DVector<Complex64>) -> f64 {
    let u = zeta.norm_squared();
    let vw = v.dotc(w);
    let vz = v.dotc(zeta);
    let zw = zeta.dotc(w);
    let h = ((1.0 + u) * vw - vz * zw) / (std::f64::consts::PI * (1.0 + u) * (1.0 + u));
    h.im
}

/// Squared Fubini-Study norm |v|^2 = omega(v, Jv) at a chart point.
pub fn fs_norm_sq_at(zeta: &DVector<Complex64>, v: &DVector<Complex64>) -> f64 {
    let u = zeta.norm_squared();
    let vv = v.norm_squared();
    let vz = v.dotc(zeta).norm_sqr();
    ((1.0 + u) * vv - vz) / (std::f64::consts::PI * (1.0 + u) * (1.0 + u))
}

/// The spec'd chart z_0 != 0 version of the form, taking the chart point and
/// tangents directly.
pub fn fubini_study_form(chart_point: &DVector<Complex64>, v: &DVector<Complex64>, w: &DVector<Complex64>) -> f64 {
    fs_form_at(chart_point, v, w)
}

fn hermitian_dot(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.dotc(b)
}

/// Chart differential of a real function on CP^n by central differences of
/// step `h` (one Richardson step when `richardson` is set): the complex
/// covector c with df(v) = Re(c^T v).
pub fn differential_in_chart(
    f: &dyn Fn(&ProjectivePoint) -> f64,
    chart: Chart,
    zeta: &DVector<Complex64>,
    h: f64,
    richardson: bool,
) -> DVector<Complex64> {
    let n = zeta.len();
    let mut c = DVector::zeros(n);
    let mut probe = zeta.clone();
    let mut dir = |probe: &mut DVector<Complex64>, j: usize, delta: Complex64| -> f64 {
        probe[j] += delta;
        let val = f(&chart.to_point(probe));
        probe[j] -= delta;
        val
    };
    for j in 0..n {
        let d_real = |step: f64, probe: &mut DVector<Complex64>, dir: &mut dyn FnMut(&mut DVector<Complex64>, usize, Complex64) -> f64| {
            (dir(probe, j, Complex64::new(step, 0.0)) - dir(probe, j, Complex64::new(-step, 0.0)))
                / (2.0 * step)
        };
        let d_imag = |step: f64, probe: &mut DVector<Complex64>, dir: &mut dyn FnMut(&mut DVector<Complex64>, usize, Complex64) -> f64| {
            (dir(probe, j, Complex64::new(0.0, step)) - dir(probe, j, Complex64::new(0.0, -step)))
                / (2.0 * step)
        };
        let (a, b) = if richardson {
            let a1 = d_real(h, &mut probe, &mut dir);
            let a2 = d_real(0.5 * h, &mut probe, &mut dir);
            let b1 = d_imag(h, &mut probe, &mut dir);
            let b2 = d_imag(0.5 * h, &mut probe, &mut dir);
            ((4.0 * a2 - a1) / 3.0, (4.0 * b2 - b1) / 3.0)
        } else {
            (d_real(h, &mut probe, &mut dir), d_imag(h, &mut probe, &mut dir))
        };
        // df(v) = Re(c^T v) with c_j = a_j - i b_j
        c[j] = Complex64::new(a, -b);
    }
    c
}

/// Hamiltonian vector field at a chart point from the packed differential.
pub fn hamiltonian_vector_field(c: &DVector<Complex64>, zeta: &DVector<Complex64>) -> DVector<Complex64> {
    let u = zeta.norm_squared();
    let cbar = c.map(|v| v.conj());
    let zc = hermitian_dot(zeta, &cbar); // zeta^* conj(c)
    let v = &cbar + zeta * zc;
    v * Complex64::new(0.0, -std::f64::consts::PI * (1.0 + u))
}

/// Poisson bracket {F, G} = omega(X_F, X_G) = dF(X_G) of two real functions
/// at a point of CP^n, evaluated in the chart best suited to the point.
pub fn poisson_bracket(
    f: &dyn Fn(&ProjectivePoint) -> f64,
    g: &dyn Fn(&ProjectivePoint) -> f64,
    z: &ProjectivePoint,
    h: f64,
) -> f64 {
    let chart = Chart::best_for(z);
    let zeta = chart.to_chart(z);
    let cf = differential_in_chart(f, chart, &zeta, h, false);
    let cg = differential_in_chart(g, chart, &zeta, h, false);
    let xg = hamiltonian_vector_field(&cg, &zeta);
    // dF(X_G) = Re(cf^T X_G)
    cf.iter().zip(xg.iter()).map(|(a, b)| (a * b).re).sum()
}

/// Result of an extremum search.
#[derive(Debug, Clone)]
pub struct Extremum {
    pub point: DVector<f64>,
    pub value: f64,
    /// Improvement achieved by the last polish sweep; serves as the
    /// refinement-delta error estimate.
    pub last_delta: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PolishParams {
    pub sweeps: usize,
    pub golden_iters: usize,
    pub tol: f64,
}

impl Default for PolishParams {
    fn default() -> Self {
        PolishParams {
            sweeps: 8,
            golden_iters: 28,
            tol: 1e-12,
        }
    }
}

/// Maximize `f` over the unit sphere of R^m by best-of-pool selection and
/// golden-section polish along great circles in the coordinate directions.
/// CP^n extrema use m = 2(n+1) with a phase-invariant objective; fiber
/// extrema over a Lagrangian loop pull back to the real sphere.
pub fn maximize_on_sphere(
    f: &dyn Fn(&DVector<f64>) -> f64,
    pool: &[DVector<f64>],
    params: PolishParams,
) -> Result<Extremum> {
    if pool.is_empty() {
        return Err(Error::InvalidArgument("empty sample pool".into()));
    }
    let mut best = pool[0].clone();
    let mut best_val = f(&best);
    for p in pool.iter().skip(1) {
        let v = f(p);
        if v > best_val {
            best_val = v;
            best = p.clone();
        }
    }
    polish_on_sphere(f, best, best_val, params)
}

/// Great-circle coordinate-descent polish from a given starting point.
pub fn polish_on_sphere(
    f: &dyn Fn(&DVector<f64>) -> f64,
    start: DVector<f64>,
    start_val: f64,
    params: PolishParams,
) -> Result<Extremum> {
    let m = start.len();
    let mut best = start;
    let mut best_val = start_val;
    let mut last_delta = f64::INFINITY;
    let mut sweeps_done = 0;
    while sweeps_done < params.sweeps.max(1) {
        if sweeps_done >= 100 {
            return Err(Error::ExtremumConvergence(100));
        }
        let before = best_val;
        for axis in 0..m {
            // great-circle direction: e_axis orthogonalized against the point
            let mut d = DVector::zeros(m);
            d[axis] = 1.0;
            let proj = d.dot(&best);
            d -= &best * proj;
            let norm = d.norm();
            if norm < 1e-10 {
                continue;
            }
            d /= norm;
            let base = best.clone();
            let (theta, val, _) = golden_max(
                |t| {
                    let candidate = &base * t.cos() + &d * t.sin();
                    f(&candidate)
                },
                -std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_2,
                params.golden_iters,
            );
            if val > best_val {
                best_val = val;
                best = &base * theta.cos() + &d * theta.sin();
                let norm = best.norm();
                best /= norm;
            }
        }
        last_delta = best_val - before;
        sweeps_done += 1;
        if last_delta.abs() < params.tol && sweeps_done >= 2 {
            break;
        }
    }
    Ok(Extremum {
        point: best,
        value: best_val,
        last_delta: last_delta.abs(),
    })
}

/// Pack a real vector of length 2(n+1) as a point of CP^n.
pub fn sphere_to_projective(v: &DVector<f64>) -> ProjectivePoint {
    let n2 = v.len() / 2;
    let z = DVector::from_fn(n2, |j, _| Complex64::new(v[2 * j], v[2 * j + 1]));
    ProjectivePoint::new(z).expect("unit sphere point is nonzero")
}

/// Seeded pool on the unit sphere of R^m.
pub fn sphere_pool(m: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: DVector<f64> = DVector::from_fn(m, |_, _| StandardNormal.sample(&mut rng));
            let n = v.norm();
            if n > 1e-8 {
                return v / n;
            }
        })
        .collect()
}
