//! Exact loops of Lagrangian submanifolds of CP^n generated by coordinate
//! quadratic Hamiltonians, and their Hofer lengths.

use crate::cpn::geometry::{polish_on_sphere, sphere_pool, Extremum, PolishParams};
use crate::cpn::point::{real_locus_sampler, ProjectivePoint};
use crate::error::{Error, Result};
use crate::quad::gauss_legendre_on;
use crate::symplin::LagrangianPath;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The rotation Hamiltonian H(z) = k/(2n+2) - (|z_1|^2 + ... + |z_k|^2)/2
/// on unit representatives. Mean zero, Hofer norm 1/2, extrema attained on
/// the critical loci [z_0:0..0:z_{k+1}..] (max) and [0:z_1..z_k:0..] (min).
pub fn hamiltonian_h(z: &ProjectivePoint, k: usize, n: usize) -> f64 {
    assert!(k >= 1 && k <= n && z.dim() == n);
    CoordinateQuadratic::psi_generator(k, n).eval(z)
}

/// A coordinate quadratic Hamiltonian
///
/// ```text
/// H(z) = sum_j c_j (|z_j|^2 - 1/(n+1))
/// ```
///
/// on unit representatives. These have mean zero for the Fubini-Study
/// volume by symmetry, and their flows are the diagonal phase rotations
/// z_j -> e^{-2 pi i c_j t} z_j.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoordinateQuadratic {
    coeffs: Vec<f64>,
}

impl CoordinateQuadratic {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("need at least one coefficient".into()));
        }
        Ok(CoordinateQuadratic { coeffs })
    }

    /// Generator of the rotation loop multiplying coordinates 1..=k by
    /// e^{i pi t}.
    pub fn psi_generator(k: usize, n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        for c in coeffs.iter_mut().take(k + 1).skip(1) {
            *c = -0.5;
        }
        CoordinateQuadratic { coeffs }
    }

    /// Generator of the loop multiplying coordinate 0 by e^{i pi t}.
    pub fn phi_generator(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[0] = -0.5;
        CoordinateQuadratic { coeffs }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CoordinateQuadratic {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: &ProjectivePoint) -> f64 {
        let h = z.homogeneous();
        let mean = 1.0 / self.coeffs.len() as f64;
        self.coeffs
            .iter()
            .zip(h.iter())
            .map(|(c, v)| c * (v.norm_sqr() - mean))
            .sum()
    }

    /// Time-t flow: z_j -> e^{-2 pi i c_j t} z_j.
    pub fn flow(&self, t: f64, z: &ProjectivePoint) -> ProjectivePoint {
        let h = z.homogeneous();
        let rotated = DVector::from_fn(h.len(), |j, _| {
            h[j] * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * self.coeffs[j] * t)
        });
        ProjectivePoint::new(rotated).expect("rotation preserves the norm")
    }

    /// The fiber loop t -> flow_t(RP^n) closes up at t = 1 exactly when all
    /// pairwise coefficient differences are half-integers.
    pub fn closes_real_locus_loop(&self) -> bool {
        let c0 = self.coeffs[0];
        self.coeffs.iter().all(|c| {
            let twice = 2.0 * (c - c0);
            (twice - twice.round()).abs() < 1e-9
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoopLabel {
    /// Rotation loop of RP^n with Hofer length 1/2, Maslov residue k.
    Psi { k: usize },
    /// The loop winding coordinate 0 by k half-turns; Hofer length k/2.
    PhiPower { k: usize },
    /// Constant loop of RP^n.
    Constant,
    Custom(String),
}

impl std::fmt::Display for LoopLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoopLabel::Psi { k } => write!(f, "psi:{k}"),
            LoopLabel::PhiPower { k } => write!(f, "phi:{k}"),
            LoopLabel::Constant => write!(f, "const"),
            LoopLabel::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

/// An exact loop of Lagrangian submanifolds of CP^n: fibers are
/// flow_t(RP^n) for the flow of a coordinate quadratic generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactLoopSpec {
    n: usize,
    label: LoopLabel,
    generator: CoordinateQuadratic,
}

/// Gauss-Legendre length with the extremum-refinement error estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HoferLength {
    pub value: f64,
    pub error_estimate: f64,
}

/// Maslov residue with its witness frame loop.
#[derive(Debug, Clone)]
pub struct MaslovResidue {
    pub residue: usize,
    pub modulus: usize,
    pub witness: LagrangianPath,
}

impl ExactLoopSpec {
    pub fn psi(k: usize, n: usize) -> Result<Self> {
        if k < 1 || k > n {
            return Err(Error::InvalidArgument(format!("psi loop needs 1 <= k <= n, got k={k}, n={n}")));
        }
        Ok(ExactLoopSpec {
            n,
            label: LoopLabel::Psi { k },
            generator: CoordinateQuadratic::psi_generator(k, n),
        })
    }

    pub fn phi_power(k: usize, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("need n >= 1".into()));
        }
        Ok(ExactLoopSpec {
            n,
            label: LoopLabel::PhiPower { k },
            generator: CoordinateQuadratic::phi_generator(n).scaled(k as f64),
        })
    }

    pub fn constant(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("need n >= 1".into()));
        }
        Ok(ExactLoopSpec {
            n,
            label: LoopLabel::Constant,
            generator: CoordinateQuadratic::new(vec![0.0; n + 1])?,
        })
    }

    /// Custom loop from a coordinate quadratic coefficient vector. Rejects
    /// coefficient vectors whose flow does not close the real-locus loop at
    /// t = 1.
    pub fn custom(name: &str, coeffs: Vec<f64>) -> Result<Self> {
        let generator = CoordinateQuadratic::new(coeffs)?;
        if !generator.closes_real_locus_loop() {
            return Err(Error::InvalidArgument(
                "coefficients do not close the loop: pairwise differences must be half-integers".into(),
            ));
        }
        Ok(ExactLoopSpec {
            n: generator.dim(),
            label: LoopLabel::Custom(name.to_string()),
            generator,
        })
    }

    /// Parse a CLI selector: `psi:k,n`, `phi:k,n`, or `const:n`.
    pub fn parse(selector: &str) -> Result<Self> {
        let (kind, rest) = selector
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad loop selector '{selector}'")))?;
        let nums: Vec<usize> = rest
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?;
        match (kind, nums.as_slice()) {
            ("psi", [k, n]) => ExactLoopSpec::psi(*k, *n),
            ("phi", [k, n]) => ExactLoopSpec::phi_power(*k, *n),
            ("const", [n]) => ExactLoopSpec::constant(*n),
            _ => Err(Error::Parse(format!(
                "bad loop selector '{selector}': expected psi:k,n | phi:k,n | const:n"
            ))),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &LoopLabel {
        &self.label
    }

    pub fn generator(&self) -> &CoordinateQuadratic {
        &self.generator
    }

    /// The generator H_t; coordinate quadratic families are autonomous, so
    /// this does not depend on t.
    pub fn generator_at(&self, _t: f64, z: &ProjectivePoint) -> f64 {
        self.generator.eval(z)
    }

    pub fn flow(&self, t: f64, z: &ProjectivePoint) -> ProjectivePoint {
        self.generator.flow(t, z)
    }

    /// Deterministic samples of the fiber Lambda_t = flow_t(RP^n).
    pub fn fiber_samples(&self, t: f64, count: usize, seed: u64) -> Vec<ProjectivePoint> {
        real_locus_sampler(self.n, count, seed)
            .into_iter()
            .map(|z| self.flow(t, &z))
            .collect()
    }

    /// Chordal distance from z to the fiber Lambda_t (exact membership test
    /// via the inverse flow, not a nearest-sample search).
    pub fn fiber_distance(&self, t: f64, z: &ProjectivePoint) -> f64 {
        self.flow(-t, z).distance_to_real_locus()
    }

    /// Fiberwise oscillation max - min of the generator over Lambda_t,
    /// computed by pool sampling plus great-circle polish on the real
    /// sphere (the fiber pulled back through the flow).
    pub fn fiber_oscillation(
        &self,
        t: f64,
        pool: &[DVector<f64>],
        params: PolishParams,
    ) -> Result<(Extremum, Extremum)> {
        let objective = |x: &DVector<f64>| -> f64 {
            let p = ProjectivePoint::from_real(x).expect("sphere point");
            self.generator.eval(&self.generator.flow(t, &p))
        };
        let neg = |x: &DVector<f64>| -objective(x);
        let mut best_hi = 0usize;
        let mut best_lo = 0usize;
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
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
        let max = polish_on_sphere(&objective, pool[best_hi].clone(), hi, params)?;
        let min_neg = polish_on_sphere(&neg, pool[best_lo].clone(), -lo, params)?;
        let min = Extremum {
            point: min_neg.point,
            value: -min_neg.value,
            last_delta: min_neg.last_delta,
        };
        Ok((min, max))
    }

    /// Hofer length: Gauss-Legendre quadrature in t of the fiberwise
    /// oscillation of the generator, each extremum found numerically even
    /// where analytic values are known.
    pub fn hofer_length(&self, t_nodes: usize, fiber_samples: usize) -> Result<HoferLength> {
        let rule = gauss_legendre_on(t_nodes.max(2), 0.0, 1.0);
        let pool = sphere_pool(self.n + 1, fiber_samples.max(8), 0x484c_5350);
        let params = PolishParams::default();
        let mut value = 0.0;
        let mut err = 0.0;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (min, max) = self.fiber_oscillation(t, &pool, params)?;
            value += w * (max.value - min.value);
            err += w.abs() * (max.last_delta + min.last_delta);
        }
        Ok(HoferLength {
            value,
            error_estimate: err,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpn::geometry::{differential_in_chart, hamiltonian_vector_field};
    use crate::cpn::point::{complex_sampler, Chart};
    use approx::assert_relative_eq;

    #[test]
    fn hamiltonian_extremes_on_critical_loci() {
        for n in 1..=3 {
            for k in 1..=n {
                let max_pt = ProjectivePoint::basis(0, n);
                let min_pt = ProjectivePoint::basis(1, n);
                let d = (2 * n + 2) as f64;
                assert_relative_eq!(hamiltonian_h(&max_pt, k, n), k as f64 / d, epsilon = 1e-14);
                assert_relative_eq!(
                    hamiltonian_h(&min_pt, k, n),
                    (k as f64 - n as f64 - 1.0) / d,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn hamiltonian_is_phase_invariant() {
        let z = ProjectivePoint::from_parts(&[(0.3, 0.1), (0.2, -0.5), (0.7, 0.2)]).unwrap();
        let rotated =
            ProjectivePoint::new(z.homogeneous() * Complex64::from_polar(1.0, 0.87)).unwrap();
        // the formula reads only coordinate moduli, so invariance holds to
        // the rounding of the phase multiplication
        assert!((hamiltonian_h(&z, 1, 2) - hamiltonian_h(&rotated, 1, 2)).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_mean_is_zero() {
        // sphere-uniform sampling oracle for the FS mean
        let samples = complex_sampler(1, 1_000_000, 99);
        let mean: f64 = samples.iter().map(|z| hamiltonian_h(z, 1, 1)).sum::<f64>()
            / samples.len() as f64;
        assert!(mean.abs() < 3e-3, "mean {mean}");
    }

    #[test]
    fn flow_psi_is_identity_at_zero_and_two_periodic() {
        let z = ProjectivePoint::from_parts(&[(0.4, 0.2), (0.1, -0.6), (0.5, 0.0)]).unwrap();
        assert!(crate::cpn::flow_psi(0.0, &z, 2).approx_eq(&z));
        assert!(crate::cpn::flow_psi(2.0, &z, 2).approx_eq(&z));
    }

    #[test]
    fn flow_preserves_its_hamiltonian() {
        let spec = ExactLoopSpec::psi(2, 3).unwrap();
        for z in complex_sampler(3, 20, 3) {
            let moved = spec.flow(0.371, &z);
            assert!((spec.generator.eval(&moved) - spec.generator.eval(&z)).abs() < 1e-12);
        }
    }

    #[test]
    fn flow_phi_halfway_example() {
        // the fiber of the phi-loop at t = 1/2 contains [i : 1]/sqrt(2)
        let spec = ExactLoopSpec::phi_power(1, 1).unwrap();
        let z = ProjectivePoint::from_parts(&[(0.0, 1.0 / 2f64.sqrt()), (1.0 / 2f64.sqrt(), 0.0)])
            .unwrap();
        assert!(spec.fiber_distance(0.5, &z) < 1e-9);
    }

    #[test]
    fn flow_phi_full_phase() {
        let z = ProjectivePoint::from_parts(&[
            (1.0 / 2f64.sqrt(), 0.0),
            (1.0 / 2f64.sqrt(), 0.0),
        ])
        .unwrap();
        let w = crate::cpn::flow_phi(1.0, &z);
        let expected = ProjectivePoint::from_parts(&[
            (-1.0 / 2f64.sqrt(), 0.0),
            (1.0 / 2f64.sqrt(), 0.0),
        ])
        .unwrap();
        assert!(w.approx_eq(&expected));
    }

    #[test]
    fn flow_velocity_matches_hamiltonian_vector_field() {
        // central differences of the flow against i(X) omega = dH
        let spec = ExactLoopSpec::psi(1, 1).unwrap();
        let chart = Chart::standard();
        let h_fn = |z: &ProjectivePoint| spec.generator.eval(z);
        for z in complex_sampler(1, 20, 17) {
            if z.homogeneous()[0].norm() < 0.3 {
                continue; // stay inside the chart
            }
            let zeta = chart.to_chart(&z);
            let c = differential_in_chart(&h_fn, chart, &zeta, 1e-5, true);
            let x_field = hamiltonian_vector_field(&c, &zeta);
            let dt = 1e-6;
            let plus = chart.to_chart(&spec.flow(dt, &z));
            let minus = chart.to_chart(&spec.flow(-dt, &z));
            let fd = (plus - minus) / Complex64::new(2.0 * dt, 0.0);
            for j in 0..1 {
                assert!(
                    (fd[j] - x_field[j]).norm() < 1e-6,
                    "fd {} field {}",
                    fd[j],
                    x_field[j]
                );
            }
        }
    }

    #[test]
    fn real_locus_flow_relation_holds() {
        let spec = ExactLoopSpec::psi(2, 2).unwrap();
        for z in spec.fiber_samples(0.37, 25, 11) {
            assert!(spec.fiber_distance(0.37, &z) < 1e-9);
        }
        // closure at t = 1
        for z in spec.fiber_samples(0.0, 10, 5) {
            assert!(spec.fiber_distance(1.0, &spec.flow(1.0, &z)) < 1e-9);
            assert!(spec.flow(1.0, &z).distance_to_real_locus() < 1e-9);
        }
    }

    #[test]
    fn empirical_real_max_approaches_critical_value() {
        let spec = ExactLoopSpec::psi(1, 2).unwrap();
        let samples = real_locus_sampler(2, 10_000, 7);
        let best = samples
            .iter()
            .map(|z| spec.generator.eval(z))
            .fold(f64::NEG_INFINITY, f64::max);
        let target = 1.0 / 6.0;
        assert!(target - best < 1e-3, "gap {}", target - best);
        assert!(best <= target + 1e-12);
    }

    #[test]
    fn hofer_length_of_psi_loops_is_half() {
        for (k, n) in [(1, 1), (1, 2), (2, 2)] {
            let spec = ExactLoopSpec::psi(k, n).unwrap();
            let len = spec.hofer_length(16, 200).unwrap();
            assert!((len.value - 0.5).abs() < 1e-6, "k={k} n={n}: {}", len.value);
        }
    }

    #[test]
    fn hofer_length_of_phi_powers_is_k_halves() {
        for (k, n) in [(1, 1), (2, 2), (3, 2)] {
            let spec = ExactLoopSpec::phi_power(k, n).unwrap();
            let len = spec.hofer_length(16, 200).unwrap();
            assert!(
                (len.value - k as f64 / 2.0).abs() < 1e-6,
                "k={k} n={n}: {}",
                len.value
            );
        }
    }

    #[test]
    fn constant_loop_has_zero_length() {
        let spec = ExactLoopSpec::constant(2).unwrap();
        let len = spec.hofer_length(8, 64).unwrap();
        assert!(len.value.abs() < 1e-12);
    }

    #[test]
    fn custom_selector_rejects_nonclosing_coeffs() {
        assert!(ExactLoopSpec::custom("bad", vec![0.0, 0.3]).is_err());
        assert!(ExactLoopSpec::custom("ok", vec![0.0, -0.5, 1.0]).is_ok());
    }

    #[test]
    fn selector_parsing() {
        assert_eq!(*ExactLoopSpec::parse("psi:2,3").unwrap().label(), LoopLabel::Psi { k: 2 });
        assert_eq!(
            *ExactLoopSpec::parse("phi:1,2").unwrap().label(),
            LoopLabel::PhiPower { k: 1 }
        );
        assert_eq!(*ExactLoopSpec::parse("const:2").unwrap().label(), LoopLabel::Constant);
        assert!(ExactLoopSpec::parse("psi:0,2").is_err());
        assert!(ExactLoopSpec::parse("nope").is_err());
    }
}
