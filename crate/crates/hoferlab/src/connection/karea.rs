//! Curvature quadrature: Hofer norms, relative cohomology pairings, and the
//! non-symplectic interval bounds.
//!
//! All integrals are tensor-product Gauss-Legendre in polar coordinates,
//! with radial panels split at the cutoff joins for loop-built connections.
//! Fiber extrema of the curvature are found by seeded pool sampling plus
//! great-circle polish, the same engine the Hofer length uses. Parallel
//! evaluation collects node values in order, so reductions are
//! bit-reproducible for any worker count.

use super::{FdParams, HamiltonianConnection, Provenance};
use crate::cpn::{
    polish_on_sphere, sphere_pool, sphere_to_projective, Extremum, ExactLoopSpec, PolishParams,
    ProjectivePoint,
};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre_on, DiscRule};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Quadrature and extremum-search resolution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub radial: usize,
    pub angular: usize,
    /// Fiber sample pool size per node for extремum seeding.
    pub pool: usize,
    pub seed: u64,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid {
            radial: 64,
            angular: 128,
            pool: 96,
            seed: 0x4b41_5245,
        }
    }
}

impl QuadratureGrid {
    pub fn coarse(radial: usize, angular: usize) -> Self {
        QuadratureGrid {
            radial,
            angular,
            ..Default::default()
        }
    }
}

/// One base node record, for CSV emission and diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NodeSample {
    pub r: f64,
    pub theta: f64,
    pub max: f64,
    pub min: f64,
}

/// Integrals of the fiberwise curvature extrema over the disc.
#[derive(Debug, Clone)]
pub struct CurvatureExtremals {
    pub int_max: f64,
    pub int_min: f64,
    /// Accumulated last-sweep polish improvements, weighted: the
    /// refinement-delta error estimate.
    pub refinement: f64,
    pub nodes: Vec<NodeSample>,
}

fn radial_breaks(conn: &HamiltonianConnection) -> Vec<f64> {
    match conn.provenance() {
        Provenance::LoopBuilt { rho, .. } => rho.breakpoints().to_vec(),
        Provenance::Custom { .. } => vec![0.0, 1.0],
    }
}

/// Fiberwise max and min of the curvature over M at every quadrature node,
/// integrated over D.
pub fn curvature_extremals(
    conn: &HamiltonianConnection,
    grid: &QuadratureGrid,
    fd: &FdParams,
) -> Result<CurvatureExtremals> {
    let rule = DiscRule::new(grid.radial, grid.angular, &radial_breaks(conn));
    let pool = sphere_pool(2 * (conn.dim() + 1), grid.pool, grid.seed);
    let params = PolishParams {
        sweeps: 6,
        golden_iters: 24,
        tol: 1e-13,
    };
    let per_node: Vec<Result<(f64, f64, f64)>> = rule
        .nodes
        .par_iter()
        .map(|&(x, y, _, _)| {
            let objective = |v: &DVector<f64>| -> f64 {
                conn.curvature_unchecked(x, y, &sphere_to_projective(v), fd)
            };
            let (min, max) = extremal_pair(&objective, &pool, params)?;
            Ok((max.value, min.value, max.last_delta + min.last_delta))
        })
        .collect();
    let mut int_max = 0.0;
    let mut int_min = 0.0;
    let mut refinement = 0.0;
    let mut nodes = Vec::with_capacity(rule.len());
    for ((res, &w), &(_, _, r, theta)) in per_node.iter().zip(&rule.weights).zip(&rule.nodes) {
        let (hi, lo, delta) = match res {
            Ok(v) => *v,
            Err(e) => return Err(Error::InvalidArgument(e.to_string())),
        };
        int_max += w * hi;
        int_min += w * lo;
        refinement += w.abs() * delta;
        nodes.push(NodeSample {
            r,
            theta,
            max: hi,
            min: lo,
        });
    }
    Ok(CurvatureExtremals {
        int_max,
        int_min,
        refinement,
        nodes,
    })
}

/// Max and min of an objective over the sphere: one pool scan shared by both
/// polishes. A pool spread below 1e-10 short-circuits the polish; at that
/// level the extremum is finite-difference noise, not structure.
fn extremal_pair(
    objective: &dyn Fn(&DVector<f64>) -> f64,
    pool: &[DVector<f64>],
    params: PolishParams,
) -> Result<(Extremum, Extremum)> {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    let mut best_hi = 0;
    let mut best_lo = 0;
    for (i, p) in pool.iter().enumerate() {
        let v = objective(p);
        if v > hi {
            hi = v;
            best_hi = i;
        }
        if v < lo {
            lo = v;
            best_lo = i;
        }
    }
    if hi - lo < 1e-10 {
        let max = Extremum {
            point: pool[best_hi].clone(),
            value: hi,
            last_delta: hi - lo,
        };
        let min = Extremum {
            point: pool[best_lo].clone(),
            value: lo,
            last_delta: hi - lo,
        };
        return Ok((min, max));
    }
    let max = polish_on_sphere(objective, pool[best_hi].clone(), hi, params)?;
    let neg = |v: &DVector<f64>| -objective(v);
    let min_neg = polish_on_sphere(&neg, pool[best_lo].clone(), -lo, params)?;
    let min = Extremum {
        point: min_neg.point,
        value: -min_neg.value,
        last_delta: min_neg.last_delta,
    };
    Ok((min, max))
}

/// Hofer norm of the curvature with the analytic separable cross-check for
/// loop-built connections.
#[derive(Debug, Clone)]
pub struct KArea {
    /// int_D (max_z - min_z) of the curvature, by quadrature.
    pub value: f64,
    /// int rho' dr * int ||H_t|| dt for loop-built connections.
    pub separable: Option<f64>,
    pub error_estimate: f64,
    pub nodes: Vec<NodeSample>,
}

/// The Hofer norm ||Omega_tau|| = int_D (max_z - min_z) dx dy.
pub fn hofer_norm_curvature(
    conn: &HamiltonianConnection,
    grid: &QuadratureGrid,
    fd: &FdParams,
) -> Result<KArea> {
    let ext = curvature_extremals(conn, grid, fd)?;
    let separable = match conn.provenance() {
        Provenance::LoopBuilt { spec, rho } => {
            let r_rule = gauss_legendre_on(32, rho.eps(), 1.0 - rho.eps());
            let rho_mass = r_rule.integrate(|r| rho.derivative(r));
            let t_rule = gauss_legendre_on(16, 0.0, 1.0);
            let pool = sphere_pool(2 * (spec.dim() + 1), grid.pool.max(128), grid.seed ^ 0x5e);
            let params = PolishParams::default();
            let mut osc = 0.0;
            for (&t, &w) in t_rule.nodes.iter().zip(&t_rule.weights) {
                let f = |v: &DVector<f64>| spec.generator_at(t, &sphere_to_projective(v));
                let (min, max) = extremal_pair(&f, &pool, params)?;
                osc += w * (max.value - min.value);
            }
            Some(rho_mass * osc)
        }
        Provenance::Custom { .. } => None,
    };
    Ok(KArea {
        value: ext.int_max - ext.int_min,
        separable,
        error_estimate: ext.refinement,
        nodes: ext.nodes,
    })
}

/// (int_D min_z Omega, int_D max_z Omega) for a connection with c = 0.
/// These bound the non-symplectic interval: eps^+ <= upper and
/// eps^- >= lower.
pub fn nondegeneracy_interval(
    conn: &HamiltonianConnection,
    grid: &QuadratureGrid,
    fd: &FdParams,
) -> Result<(f64, f64)> {
    for &(x, y) in &[(0.3, 0.2), (-0.5, 0.1), (0.0, 0.66)] {
        let c = conn.c_at(x, y);
        if c.abs() > 1e-14 {
            return Err(Error::NonzeroC(c));
        }
    }
    let ext = curvature_extremals(conn, grid, fd)?;
    Ok((ext.int_min, ext.int_max))
}

/// Homology classes of the constant admissible sections of the rotation
/// loops: A+ sits over the minimum locus of the generator, A- over the
/// maximum locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionClass {
    APlus,
    AMinus,
}

impl SectionClass {
    /// A base point of the corresponding critical real locus.
    pub fn base_point(&self, n: usize) -> ProjectivePoint {
        match self {
            SectionClass::APlus => ProjectivePoint::basis(1, n),
            SectionClass::AMinus => ProjectivePoint::basis(0, n),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "A+" | "a+" | "plus" => Ok(SectionClass::APlus),
            "A-" | "a-" | "minus" => Ok(SectionClass::AMinus),
            other => Err(Error::Parse(format!("unknown section class '{other}'"))),
        }
    }
}

impl std::fmt::Display for SectionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SectionClass::APlus => write!(f, "A+"),
            SectionClass::AMinus => write!(f, "A-"),
        }
    }
}

/// Pairing of [tau] with the class of the constant section at `z_star`,
/// from the energy identity with E = 0:
/// <[tau], A> = -int_D (Omega(x, y, z*) - c(x, y)) dx dy.
pub fn pairing_with_class(
    conn: &HamiltonianConnection,
    z_star: &ProjectivePoint,
    grid: &QuadratureGrid,
    fd: &FdParams,
) -> Result<f64> {
    let spec = match conn.provenance() {
        Provenance::LoopBuilt { spec, .. } => spec.clone(),
        Provenance::Custom { label } => {
            return Err(Error::UnsupportedProvenance(format!(
                "pairing needs a loop-built connection, got custom({label})"
            )))
        }
    };
    // the constant section is admissible iff its value stays on every fiber
    let mut worst = 0.0f64;
    for i in 0..64 {
        let t = i as f64 / 64.0;
        worst = worst.max(spec.fiber_distance(t, z_star));
    }
    if worst > 1e-8 {
        return Err(Error::BoundaryViolation(worst));
    }
    let rule = DiscRule::new(grid.radial, grid.angular, &radial_breaks(conn));
    let vals: Vec<f64> = rule
        .nodes
        .par_iter()
        .map(|&(x, y, _, _)| conn.curvature_unchecked(x, y, z_star, fd) - conn.c_at(x, y))
        .collect();
    Ok(-crate::quad::dot(&vals, &rule.weights))
}

/// The class difference s(tau_1, tau_0) = int h(t) dt + int_D (c_1 - c_0),
/// where h(t) is the fiberwise-constant boundary Hamiltonian difference.
/// Errors when the difference is not constant on fibers, i.e. when the two
/// connections do not preserve the same loop.
pub fn class_difference(
    conn1: &HamiltonianConnection,
    conn0: &HamiltonianConnection,
    t_nodes: usize,
    fiber_count: usize,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let spec = match (conn1.provenance(), conn0.provenance()) {
        (Provenance::LoopBuilt { spec, .. }, _) => spec.clone(),
        (_, Provenance::LoopBuilt { spec, .. }) => spec.clone(),
        _ => {
            return Err(Error::UnsupportedProvenance(
                "class difference needs at least one loop-built connection".into(),
            ))
        }
    };
    let t_rule = gauss_legendre_on(t_nodes.max(4), 0.0, 1.0);
    let mut boundary_integral = 0.0;
    for (&t, &w) in t_rule.nodes.iter().zip(&t_rule.weights) {
        let fiber = spec.fiber_samples(t, fiber_count.max(8), grid.seed ^ 0x17);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for z in &fiber {
            let d = conn1.boundary_hamiltonian(t, z) - conn0.boundary_hamiltonian(t, z);
            lo = lo.min(d);
            hi = hi.max(d);
            sum += d;
        }
        if hi - lo > 1e-8 {
            return Err(Error::NotSameLoop(hi - lo));
        }
        boundary_integral += w * sum / fiber.len() as f64;
    }
    let rule = DiscRule::new(grid.radial, grid.angular, &radial_breaks(conn1));
    let base_vals: Vec<f64> = rule
        .nodes
        .iter()
        .map(|&(x, y, _, _)| conn1.c_at(x, y) - conn0.c_at(x, y))
        .collect();
    Ok(boundary_integral + crate::quad::dot(&base_vals, &rule.weights))
}

/// Two-sided certificate for the width of the non-symplectic interval of the
/// rotation loops: the upper bound comes from the curvature integrals, the
/// lower bound from the pairings against the constant-section classes. When
/// the two meet, the chain eps <= K-area = minimal length pins the minimal
/// Hofer length at 1/2.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonCertificate {
    pub upper: f64,
    pub lower: Option<f64>,
    pub certified: bool,
    /// (int_D min Omega, int_D max Omega)
    pub interval: (f64, f64),
    /// (<[tau], A+>, <[tau], A->)
    pub pairings: Option<(f64, f64)>,
    /// 1/2 when certified.
    pub pinned_nu: Option<f64>,
}

pub fn epsilon_width_certificate(
    k: usize,
    n: usize,
    eps: f64,
    grid: &QuadratureGrid,
    fd: &FdParams,
) -> Result<EpsilonCertificate> {
    if n < 1 {
        return Err(Error::InvalidArgument("need n >= 1".into()));
    }
    let reduced = k % (n + 1);
    if reduced == 0 {
        // constant loop: the flat connection has vanishing curvature, so the
        // interval collapses; the pairing route has no nonvanishing class to
        // stand on, so there is no lower certificate
        let flat = HamiltonianConnection::flat(n);
        let (lo, hi) = nondegeneracy_interval(&flat, grid, fd)?;
        return Ok(EpsilonCertificate {
            upper: hi - lo,
            lower: None,
            certified: false,
            interval: (lo, hi),
            pairings: None,
            pinned_nu: None,
        });
    }
    let spec = ExactLoopSpec::psi(reduced, n)?;
    let conn = HamiltonianConnection::build_from_loop(&spec, super::CutoffRho::new(eps)?);
    let (lo, hi) = nondegeneracy_interval(&conn, grid, fd)?;
    let p_plus = pairing_with_class(&conn, &SectionClass::APlus.base_point(n), grid, fd)?;
    let p_minus = pairing_with_class(&conn, &SectionClass::AMinus.base_point(n), grid, fd)?;
    let upper = hi - lo;
    let lower = p_minus - p_plus; // (-<A+>) - (-<A->)
    let certified = (upper - lower).abs() < 1e-5;
    Ok(EpsilonCertificate {
        upper,
        lower: Some(lower),
        certified,
        interval: (lo, hi),
        pairings: Some((p_plus, p_minus)),
        pinned_nu: if certified { Some(0.5) } else { None },
    })
}
