//! Fubini-Study geometry of CP^n, the explicit loop families of projective
//! Lagrangian planes, their Hamiltonians, Hofer lengths, and Maslov data.
//!
//! The symplectic form is the Fubini-Study form divided by pi, normalized so
//! that CP^1 has unit area; this is validated by quadrature in the tests
//! rather than trusted symbolically.

mod geometry;
mod loops;
mod point;

pub use geometry::{
    differential_in_chart, fs_form_at, fs_norm_sq_at, fubini_study_form, hamiltonian_vector_field,
    maximize_on_sphere, poisson_bracket, polish_on_sphere, sphere_pool, sphere_to_projective,
    Extremum, PolishParams,
};
pub use loops::{
    hamiltonian_h, CoordinateQuadratic, ExactLoopSpec, HoferLength, LoopLabel, MaslovResidue,
};
pub use point::{complex_sampler, real_locus_sampler, Chart, ProjectivePoint};

/// Minimal Maslov number of the pair (CP^n, RP^n).
pub fn minimal_maslov_number(n: usize) -> usize {
    n + 1
}

/// Flow multiplying homogeneous coordinates 1..=k by e^{i pi t}.
pub fn flow_psi(t: f64, z: &ProjectivePoint, k: usize) -> ProjectivePoint {
    CoordinateQuadratic::psi_generator(k, z.dim()).flow(t, z)
}

/// Flow multiplying homogeneous coordinate 0 by e^{i pi t}.
pub fn flow_phi(t: f64, z: &ProjectivePoint) -> ProjectivePoint {
    CoordinateQuadratic::phi_generator(z.dim()).flow(t, z)
}

/// Loop of tangent frames t -> diag(e^{i pi t} x k, 1 x (n-k)) at the fixed
/// point [1:0:...:0], in the chart trivialization. Its Maslov index is k.
pub fn tangent_loop_at_fixed_point(k: usize, n: usize, samples: usize) -> crate::symplin::LagrangianPath {
    assert!(k <= n);
    crate::symplin::diagonal_phase_loop(k, n, samples)
}

/// Maslov residue k mod (n+1) of the loop Lambda^k, with the witness frame
/// loop attached.
pub fn maslov_residue(k: usize, n: usize, witness_samples: usize) -> MaslovResidue {
    let modulus = n + 1;
    let residue = k % modulus;
    MaslovResidue {
        residue,
        modulus,
        witness: tangent_loop_at_fixed_point(residue, n, witness_samples),
    }
}
