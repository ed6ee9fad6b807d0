//! Hamiltonian connection 2-forms on D x M.
//!
//! A connection is the data (F, G, c) of the closed 2-form
//!
//! ```text
//! tau = omega + dF ^ dx + dG ^ dy + (d_x G - d_y F + c) dx ^ dy
//! ```
//!
//! with F, G mean zero over M for every base point. Its curvature is the
//! function {F, G} + d_y F - d_x G. The connection built from an exact
//! Lagrangian loop with generator H and a radial cutoff rho is
//!
//! ```text
//! F = -sin(2 pi t) rho(r) H_t / (2 pi r),   G = cos(2 pi t) rho(r) H_t / (2 pi r)
//! ```
//!
//! at x + iy = r e^{2 pi i t}, extended by zero over the flat core r <= eps,
//! and has curvature -rho'(r) H_t / (2 pi r).

mod karea;

pub use karea::{
    class_difference, curvature_extremals, epsilon_width_certificate, hofer_norm_curvature,
    nondegeneracy_interval, pairing_with_class, CurvatureExtremals, EpsilonCertificate, KArea,
    NodeSample, QuadratureGrid, SectionClass,
};

use crate::cpn::{
    complex_sampler, differential_in_chart, hamiltonian_vector_field, Chart, ExactLoopSpec,
    ProjectivePoint,
};
use crate::error::{Error, Result};
use crate::quad::richardson_derivative;
use std::sync::Arc;

pub type FiberFn = Arc<dyn Fn(f64, f64, &ProjectivePoint) -> f64 + Send + Sync>;
pub type BaseFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Smooth nondecreasing cutoff: 0 on [0, eps], 1 on [1-eps, 1], a quintic
/// smoothstep in between. All integrals only use int rho' = 1.
#[derive(Debug, Clone, Copy)]
pub struct CutoffRho {
    eps: f64,
}

impl CutoffRho {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0 / 3.0) {
            return Err(Error::InvalidArgument(format!(
                "cutoff eps must lie in (0, 1/3), got {eps}"
            )));
        }
        Ok(CutoffRho { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn value(&self, r: f64) -> f64 {
        let (a, b) = (self.eps, 1.0 - self.eps);
        if r <= a {
            0.0
        } else if r >= b {
            1.0
        } else {
            let s = (r - a) / (b - a);
            s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let (a, b) = (self.eps, 1.0 - self.eps);
        if r <= a || r >= b {
            0.0
        } else {
            let s = (r - a) / (b - a);
            30.0 * s * s * (s - 1.0) * (s - 1.0) / (b - a)
        }
    }

    /// Radial panel joins for composite quadrature.
    pub fn breakpoints(&self) -> [f64; 4] {
        [0.0, self.eps, 1.0 - self.eps, 1.0]
    }
}

/// Where a connection came from; loop-built connections carry their loop and
/// cutoff and expose analytic cross-checks.
#[derive(Clone)]
pub enum Provenance {
    LoopBuilt { spec: ExactLoopSpec, rho: CutoffRho },
    Custom { label: String },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::LoopBuilt { spec, rho } => {
                write!(f, "loop-built({}, eps={})", spec.label(), rho.eps())
            }
            Provenance::Custom { label } => write!(f, "custom({label})"),
        }
    }
}

/// Finite-difference steps for curvature evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FdParams {
    /// Base (x, y) step; Richardson-extrapolated central differences.
    pub base_h: f64,
    /// Fiber chart step; plain central differences.
    pub fiber_h: f64,
}

impl Default for FdParams {
    fn default() -> Self {
        FdParams {
            base_h: 1e-5,
            fiber_h: 1e-5,
        }
    }
}

/// The data (F, G, c) of a Hamiltonian connection 2-form on D x CP^n.
#[derive(Clone)]
pub struct HamiltonianConnection {
    n: usize,
    f: FiberFn,
    g: FiberFn,
    c: BaseFn,
    provenance: Provenance,
    mean_zero_certified: bool,
}

impl HamiltonianConnection {
    /// The connection of a loop spec and cutoff. The generator of a loop
    /// spec is a coordinate quadratic, which is mean zero analytically, so
    /// the mean-zero requirement holds by construction.
    pub fn build_from_loop(spec: &ExactLoopSpec, rho: CutoffRho) -> Self {
        let n = spec.dim();
        let spec_f = spec.clone();
        let spec_g = spec.clone();
        let f: FiberFn = Arc::new(move |x: f64, y: f64, z: &ProjectivePoint| {
            let r2 = x * x + y * y;
            let r = r2.sqrt();
            if r <= rho.eps() {
                return 0.0;
            }
            let t = y.atan2(x) / (2.0 * std::f64::consts::PI);
            // -sin(2 pi t) rho(r) H_t / (2 pi r) with sin(2 pi t) = y / r
            -y * rho.value(r) * spec_f.generator_at(t, z) / (2.0 * std::f64::consts::PI * r2)
        });
        let g: FiberFn = Arc::new(move |x: f64, y: f64, z: &ProjectivePoint| {
            let r2 = x * x + y * y;
            let r = r2.sqrt();
            if r <= rho.eps() {
                return 0.0;
            }
            let t = y.atan2(x) / (2.0 * std::f64::consts::PI);
            x * rho.value(r) * spec_g.generator_at(t, z) / (2.0 * std::f64::consts::PI * r2)
        });
        HamiltonianConnection {
            n,
            f,
            g,
            c: Arc::new(|_, _| 0.0),
            provenance: Provenance::LoopBuilt {
                spec: spec.clone(),
                rho,
            },
            mean_zero_certified: true,
        }
    }

    /// A custom connection from closures. F and G are required to be mean
    /// zero over M for every base point; this is checked by Monte-Carlo
    /// quadrature at tolerance 3e-3 on a probe set of base points.
    pub fn custom(
        n: usize,
        f: FiberFn,
        g: FiberFn,
        c: BaseFn,
        label: &str,
        mc_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let pool = complex_sampler(n, mc_samples.max(1000), seed);
        let probes = [(0.31, 0.2), (-0.55, 0.41), (0.0, -0.73), (0.62, 0.62)];
        for &(x, y) in &probes {
            let mean_f: f64 =
                pool.iter().map(|z| f(x, y, z)).sum::<f64>() / pool.len() as f64;
            let mean_g: f64 =
                pool.iter().map(|z| g(x, y, z)).sum::<f64>() / pool.len() as f64;
            if mean_f.abs() > 3e-3 || mean_g.abs() > 3e-3 {
                return Err(Error::NotMeanZero(mean_f.abs().max(mean_g.abs())));
            }
        }
        Ok(HamiltonianConnection {
            n,
            f,
            g,
            c,
            provenance: Provenance::Custom {
                label: label.to_string(),
            },
            mean_zero_certified: false,
        })
    }

    /// The flat connection F = G = 0, c = 0.
    pub fn flat(n: usize) -> Self {
        HamiltonianConnection {
            n,
            f: Arc::new(|_, _, _| 0.0),
            g: Arc::new(|_, _, _| 0.0),
            c: Arc::new(|_, _| 0.0),
            provenance: Provenance::Custom {
                label: "flat".to_string(),
            },
            mean_zero_certified: true,
        }
    }

    /// Same connection with the base term replaced by a constant.
    pub fn with_constant_c(&self, c0: f64) -> Self {
        let mut out = self.clone();
        out.c = Arc::new(move |_, _| c0);
        out
    }

    /// Same connection with an arbitrary base term.
    pub fn with_c(&self, c: BaseFn) -> Self {
        let mut out = self.clone();
        out.c = c;
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn mean_zero_certified(&self) -> bool {
        self.mean_zero_certified
    }

    pub fn f_at(&self, x: f64, y: f64, z: &ProjectivePoint) -> f64 {
        (self.f)(x, y, z)
    }

    pub fn g_at(&self, x: f64, y: f64, z: &ProjectivePoint) -> f64 {
        (self.g)(x, y, z)
    }

    pub fn c_at(&self, x: f64, y: f64) -> f64 {
        (self.c)(x, y)
    }

    /// Boundary Hamiltonian reconstructed by parallel transport along
    /// t -> e^{2 pi i t}:
    /// H_t = -2 pi sin(2 pi t) F + 2 pi cos(2 pi t) G at (cos 2 pi t, sin 2 pi t).
    pub fn boundary_hamiltonian(&self, t: f64, z: &ProjectivePoint) -> f64 {
        let (s, c) = (2.0 * std::f64::consts::PI * t).sin_cos();
        2.0 * std::f64::consts::PI * (-s * self.f_at(c, s, z) + c * self.g_at(c, s, z))
    }

    /// Curvature {F, G}(z) + d_y F(z) - d_x G(z) at a base point of D and a
    /// fiber point z. The Poisson bracket uses the Fubini-Study form in the
    /// chart best suited to z; base derivatives are Richardson-extrapolated
    /// central differences of step `fd.base_h`.
    pub fn curvature(&self, x: f64, y: f64, z: &ProjectivePoint, fd: &FdParams) -> Result<f64> {
        if x * x + y * y > 1.0 + 1e-9 {
            return Err(Error::OutsideDisc { x, y });
        }
        Ok(self.curvature_unchecked(x, y, z, fd))
    }

    pub(crate) fn curvature_unchecked(&self, x: f64, y: f64, z: &ProjectivePoint, fd: &FdParams) -> f64 {
        let chart = Chart::best_for(z);
        let zeta = chart.to_chart(z);
        let f_here = |p: &ProjectivePoint| self.f_at(x, y, p);
        let g_here = |p: &ProjectivePoint| self.g_at(x, y, p);
        let cf = differential_in_chart(&f_here, chart, &zeta, fd.fiber_h, false);
        let cg = differential_in_chart(&g_here, chart, &zeta, fd.fiber_h, false);
        let xg = hamiltonian_vector_field(&cg, &zeta);
        let bracket: f64 = cf.iter().zip(xg.iter()).map(|(a, b)| (a * b).re).sum();
        let dyf = richardson_derivative(|yy| self.f_at(x, yy, z), y, fd.base_h);
        let dxg = richardson_derivative(|xx| self.g_at(xx, y, z), x, fd.base_h);
        bracket + dyf - dxg
    }

    /// Closed-form curvature -rho'(r) H_t(z) / (2 pi r) of loop-built
    /// connections; None for custom provenance.
    pub fn curvature_analytic(&self, x: f64, y: f64, z: &ProjectivePoint) -> Option<f64> {
        match &self.provenance {
            Provenance::LoopBuilt { spec, rho } => {
                let r = (x * x + y * y).sqrt();
                if r <= rho.eps() {
                    return Some(0.0);
                }
                let t = y.atan2(x) / (2.0 * std::f64::consts::PI);
                Some(-rho.derivative(r) * spec.generator_at(t, z) / (2.0 * std::f64::consts::PI * r))
            }
            Provenance::Custom { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpn::real_locus_sampler;

    fn psi_connection(k: usize, n: usize, eps: f64) -> HamiltonianConnection {
        let spec = ExactLoopSpec::psi(k, n).unwrap();
        HamiltonianConnection::build_from_loop(&spec, CutoffRho::new(eps).unwrap())
    }

    #[test]
    fn cutoff_shape() {
        let rho = CutoffRho::new(0.1).unwrap();
        assert_eq!(rho.value(0.05), 0.0);
        assert_eq!(rho.value(0.95), 1.0);
        assert!(rho.value(0.5) > 0.0 && rho.value(0.5) < 1.0);
        // int rho' = 1 by the fundamental theorem; checked by quadrature on
        // the smooth panel
        let rule = crate::quad::gauss_legendre_on(32, 0.1, 0.9);
        let total = rule.integrate(|r| rho.derivative(r));
        assert!((total - 1.0).abs() < 1e-12);
        assert!(CutoffRho::new(0.4).is_err());
    }

    #[test]
    fn boundary_recovers_generator() {
        let spec = ExactLoopSpec::psi(1, 2).unwrap();
        let conn = HamiltonianConnection::build_from_loop(&spec, CutoffRho::new(0.1).unwrap());
        for (i, z) in real_locus_sampler(2, 12, 3).iter().enumerate() {
            let t = i as f64 / 12.0;
            let recon = conn.boundary_hamiltonian(t, z);
            let direct = spec.generator_at(t, z);
            assert!((recon - direct).abs() < 1e-12, "t={t}: {recon} vs {direct}");
        }
    }

    #[test]
    fn cutoff_core_is_flat() {
        let conn = psi_connection(1, 1, 0.1);
        let z = ProjectivePoint::basis(1, 1);
        assert_eq!(conn.f_at(0.03, 0.05, &z), 0.0);
        assert_eq!(conn.g_at(0.03, 0.05, &z), 0.0);
        let fd = FdParams::default();
        assert!(conn.curvature(0.04, 0.02, &z, &fd).unwrap().abs() < 1e-12);
    }

    #[test]
    fn loop_built_bracket_vanishes() {
        // F and G are proportional to the same Hamiltonian, so {F, G} = 0;
        // the full curvature must match the base-derivative part alone
        let conn = psi_connection(2, 2, 0.1);
        let fd = FdParams::default();
        for (i, z) in real_locus_sampler(2, 6, 9).iter().enumerate() {
            let (x, y) = (0.5 + 0.03 * i as f64, 0.2 - 0.05 * i as f64);
            let full = conn.curvature(x, y, z, &fd).unwrap();
            let analytic = conn.curvature_analytic(x, y, z).unwrap();
            assert!((full - analytic).abs() < 1e-6, "{full} vs {analytic}");
        }
    }

    #[test]
    fn flat_connection_curvature_is_zero() {
        let conn = HamiltonianConnection::flat(2);
        let fd = FdParams::default();
        let z = ProjectivePoint::basis(0, 2);
        assert_eq!(conn.curvature(0.3, -0.4, &z, &fd).unwrap(), 0.0);
    }

    #[test]
    fn curvature_outside_disc_is_rejected() {
        let conn = psi_connection(1, 1, 0.1);
        let z = ProjectivePoint::basis(0, 1);
        assert!(matches!(
            conn.curvature(0.9, 0.9, &z, &FdParams::default()),
            Err(Error::OutsideDisc { .. })
        ));
    }

    #[test]
    fn custom_rejects_non_mean_zero() {
        let f: FiberFn = Arc::new(|_, _, _| 0.25);
        let g: FiberFn = Arc::new(|_, _, _| 0.0);
        let c: BaseFn = Arc::new(|_, _| 0.0);
        assert!(matches!(
            HamiltonianConnection::custom(1, f, g, c, "offset", 2000, 1),
            Err(Error::NotMeanZero(_))
        ));
    }

    #[test]
    fn gauge_transformed_curvature_matches_composition() {
        // pull back the psi connection by a fiberwise rotation built from
        // the flow with angle profile theta(x, y); curvature must transform
        // by composition with the rotation
        let k = 1;
        let n = 1;
        let spec = ExactLoopSpec::psi(k, n).unwrap();
        let conn = HamiltonianConnection::build_from_loop(&spec, CutoffRho::new(0.1).unwrap());
        let theta = |x: f64, y: f64| 0.3 * (x * x - 0.5 * y);
        let theta_x = |x: f64, _y: f64| 0.6 * x;
        let theta_y = |_x: f64, _y: f64| -0.15;

        let spec_f = spec.clone();
        let conn_f = conn.clone();
        let f_tilde: FiberFn = Arc::new(move |x, y, z| {
            let w = spec_f.flow(theta(x, y), z);
            conn_f.f_at(x, y, &w) - theta_x(x, y) * spec_f.generator_at(0.0, &w)
        });
        let spec_g = spec.clone();
        let conn_g = conn.clone();
        let g_tilde: FiberFn = Arc::new(move |x, y, z| {
            let w = spec_g.flow(theta(x, y), z);
            conn_g.g_at(x, y, &w) - theta_y(x, y) * spec_g.generator_at(0.0, &w)
        });
        let pulled = HamiltonianConnection::custom(
            n,
            f_tilde,
            g_tilde,
            Arc::new(|_, _| 0.0),
            "gauge-pullback",
            4000,
            7,
        )
        .unwrap();

        let fd = FdParams::default();
        for (i, z) in crate::cpn::complex_sampler(n, 8, 21).iter().enumerate() {
            let (x, y) = (0.45 + 0.04 * i as f64, -0.3 + 0.05 * i as f64);
            let w = spec.flow(theta(x, y), z);
            let lhs = pulled.curvature(x, y, z, &fd).unwrap();
            let rhs = conn.curvature(x, y, &w, &fd).unwrap();
            assert!((lhs - rhs).abs() < 2e-6, "node {i}: {lhs} vs {rhs}");
        }
    }
}
