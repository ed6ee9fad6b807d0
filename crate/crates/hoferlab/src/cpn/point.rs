//! Points of CP^n as unit homogeneous coordinate vectors modulo phase.

use crate::error::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const NORM_TOL: f64 = 1e-12;
pub const EQUALITY_TOL: f64 = 1e-10;

/// A point [z_0 : ... : z_n] of CP^n stored as a unit vector in C^{n+1}.
#[derive(Debug, Clone)]
pub struct ProjectivePoint {
    z: DVector<Complex64>,
}

impl ProjectivePoint {
    pub fn new(v: DVector<Complex64>) -> Result<Self> {
        let norm = v.norm();
        if norm < 1e-14 {
            return Err(Error::InvalidArgument(
                "zero vector is not a projective point".into(),
            ));
        }
        let z = v / Complex64::new(norm, 0.0);
        debug_assert!((z.norm() - 1.0).abs() < NORM_TOL);
        Ok(ProjectivePoint { z })
    }

    /// Construct from homogeneous coordinates given as (re, im) pairs.
    pub fn from_parts(parts: &[(f64, f64)]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            parts.len(),
            parts.iter().map(|&(re, im)| Complex64::new(re, im)),
        ))
    }

    pub fn from_real(x: &DVector<f64>) -> Result<Self> {
        Self::new(DVector::from_iterator(
            x.len(),
            x.iter().map(|&v| Complex64::new(v, 0.0)),
        ))
    }

    /// The j-th standard basis point [0 : ... : 1 : ... : 0] in CP^n.
    pub fn basis(j: usize, n: usize) -> Self {
        let mut v = DVector::zeros(n + 1);
        v[j] = Complex64::new(1.0, 0.0);
        ProjectivePoint { z: v }
    }

    /// Complex projective dimension n.
    pub fn dim(&self) -> usize {
        self.z.len() - 1
    }

    pub fn homogeneous(&self) -> &DVector<Complex64> {
        &self.z
    }

    /// Projective equality: |<z, w>| = 1 up to `EQUALITY_TOL`.
    pub fn approx_eq(&self, other: &ProjectivePoint) -> bool {
        if self.z.len() != other.z.len() {
            return false;
        }
        (self.z.dotc(&other.z).norm() - 1.0).abs() < EQUALITY_TOL
    }

    /// Chordal distance of the phase orbit of this point to the real locus
    /// RP^n: min over unit phases of || Im(e^{i phi} z) ||.
    pub fn distance_to_real_locus(&self) -> f64 {
        let x: Vec<f64> = self.z.iter().map(|c| c.re).collect();
        let y: Vec<f64> = self.z.iter().map(|c| c.im).collect();
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        // min over unit (s, c) of || s x + c y ||^2: smallest eigenvalue of
        // [[xx, xy], [xy, yy]]
        let tr = xx + yy;
        let det = xx * yy - xy * xy;
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        (0.5 * tr - disc).max(0.0).sqrt()
    }

    /// Unit-phase representative with the largest coordinate rotated real.
    /// Purely cosmetic; used for reporting.
    pub fn dephased(&self) -> ProjectivePoint {
        let idx = self.largest_coordinate();
        let phase = self.z[idx].arg();
        let factor = Complex64::from_polar(1.0, -phase);
        ProjectivePoint { z: &self.z * factor }
    }

    pub fn largest_coordinate(&self) -> usize {
        let mut best = 0;
        let mut best_norm = 0.0;
        for (j, v) in self.z.iter().enumerate() {
            let n = v.norm_sqr();
            if n > best_norm {
                best_norm = n;
                best = j;
            }
        }
        best
    }
}

/// Affine chart z_idx != 0 of CP^n. Chart coordinates keep the remaining
/// homogeneous coordinates in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chart {
    pub index: usize,
}

impl Chart {
    pub fn standard() -> Self {
        Chart { index: 0 }
    }

    /// Chart whose boundary is farthest from `z`; used for automatic chart
    /// rotation near |z_0| = 0.
    pub fn best_for(z: &ProjectivePoint) -> Self {
        Chart {
            index: z.largest_coordinate(),
        }
    }

    pub fn to_chart(&self, z: &ProjectivePoint) -> DVector<Complex64> {
        let h = z.homogeneous();
        let pivot = h[self.index];
        debug_assert!(pivot.norm() > 1e-14, "point on chart boundary");
        DVector::from_iterator(
            h.len() - 1,
            h.iter()
                .enumerate()
                .filter(|(j, _)| *j != self.index)
                .map(|(_, v)| v / pivot),
        )
    }

    pub fn to_point(&self, zeta: &DVector<Complex64>) -> ProjectivePoint {
        let n = zeta.len();
        let mut v = DVector::zeros(n + 1);
        let mut k = 0;
        for j in 0..=n {
            if j == self.index {
                v[j] = Complex64::new(1.0, 0.0);
            } else {
                v[j] = zeta[k];
                k += 1;
            }
        }
        ProjectivePoint::new(v).expect("chart point is nonzero")
    }
}

/// Deterministic sample of `count` points of RP^n inside CP^n (real unit
/// vectors modulo sign), drawn uniformly from the round sphere.
pub fn real_locus_sampler(n: usize, count: usize, seed: u64) -> Vec<ProjectivePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            loop {
                let v = DVector::from_fn(n + 1, |_, _| StandardNormal.sample(&mut rng));
                if v.norm() > 1e-8 {
                    return ProjectivePoint::from_real(&v).expect("nonzero");
                }
            }
        })
        .collect()
}

/// Deterministic sample of `count` points of CP^n, uniform for the
/// Fubini-Study volume (normalized complex Gaussian vectors).
pub fn complex_sampler(n: usize, count: usize, seed: u64) -> Vec<ProjectivePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            loop {
                let v = DVector::from_fn(n + 1, |_, _| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                });
                if v.norm() > 1e-8 {
                    return ProjectivePoint::new(v).expect("nonzero");
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_orbit_is_projectively_equal() {
        let z = ProjectivePoint::from_parts(&[(1.0, 0.5), (0.2, -0.3)]).unwrap();
        let rotated = ProjectivePoint::new(z.homogeneous() * Complex64::from_polar(1.0, 1.234)).unwrap();
        assert!(z.approx_eq(&rotated));
    }

    #[test]
    fn distinct_points_are_not_equal() {
        let a = ProjectivePoint::basis(0, 2);
        let b = ProjectivePoint::basis(1, 2);
        assert!(!a.approx_eq(&b));
    }

    #[test]
    fn real_sampler_outputs_are_real() {
        for z in real_locus_sampler(3, 50, 42) {
            assert!(z.homogeneous().iter().all(|c| c.im == 0.0));
            assert!(z.distance_to_real_locus() < 1e-12);
        }
    }

    #[test]
    fn dephasing_detects_real_orbit() {
        // i * real vector is still in RP^n as a projective point
        let v = DVector::from_vec(vec![
            Complex64::new(0.0, 0.6),
            Complex64::new(0.0, 0.8),
        ]);
        let z = ProjectivePoint::new(v).unwrap();
        assert!(z.distance_to_real_locus() < 1e-12);
    }

    #[test]
    fn chart_roundtrip() {
        let z = ProjectivePoint::from_parts(&[(0.1, 0.2), (0.9, -0.1), (0.3, 0.0)]).unwrap();
        let chart = Chart::best_for(&z);
        assert_eq!(chart.index, 1);
        let zeta = chart.to_chart(&z);
        let back = chart.to_point(&zeta);
        assert!(z.approx_eq(&back));
    }
}
