//! Crossing-count oracle for the Maslov index.
//!
//! The Lagrangian U * R^n meets the reference Lagrangian e^{i chi/2} R^n
//! exactly when U^T U has eigenvalue e^{i chi}. Tracking the eigenvalue
//! angles of W(t) = U(t)^T U(t) and counting signed passages through a
//! generic reference angle chi gives the same integer as the winding of
//! det(U)^2 = det W, computed along an entirely different route: no phase
//! accumulation of determinants is involved.
//!
//! W is symmetric unitary, so W = A + iB with A, B commuting real symmetric
//! matrices and A^2 + B^2 = I; the eigenvalue angles come from a
//! simultaneous orthogonal diagonalization of (A, B).

use crate::error::{Error, Result};
use crate::symplin::{principal_branch, LagrangianPath};
use nalgebra::{DMatrix, DVector};

const DEGENERACY_GUARD: f64 = 1e-7;
const MAX_REFERENCE_PERTURBATIONS: usize = 3;

/// Signed count of eigenangle passages of U(t)^T U(t) through a generic
/// reference angle. Agrees with [`LagrangianPath::maslov_index`] on every
/// valid closed path.
pub fn crossing_index(path: &LagrangianPath) -> Result<i64> {
    if !path.is_closed() {
        return Err(Error::NotClosed("crossing oracle needs a closed path".into()));
    }
    let angles: Vec<Vec<f64>> = path
        .samples()
        .iter()
        .map(|(_, frame)| symmetric_unitary_angles(&frame.symmetric_square()))
        .collect::<Result<_>>()?;

    // pseudo-random but fixed reference angles, perturbed when degenerate
    let candidates = [2.399_963_229_728_653, 2.711_211_289_728, 1.237_645_118_3, 0.588_002_603_55];
    for (attempt, &chi) in candidates.iter().enumerate() {
        if attempt > MAX_REFERENCE_PERTURBATIONS {
            break;
        }
        if angles
            .iter()
            .flatten()
            .all(|&a| principal_branch(a - chi).abs() > DEGENERACY_GUARD)
        {
            return count_crossings(&angles, chi);
        }
    }
    Err(Error::OracleDegenerate(MAX_REFERENCE_PERTURBATIONS))
}

fn count_crossings(angles: &[Vec<f64>], chi: f64) -> Result<i64> {
    let mut total = 0i64;
    for (i, pair) in angles.windows(2).enumerate() {
        let perm = best_matching(&pair[0], &pair[1]);
        for (j, &p) in perm.iter().enumerate() {
            let a = pair[0][j];
            let b = pair[1][p];
            let arc = principal_branch(b - a);
            if arc.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::Undersampled {
                    index: i + 1,
                    step: arc.abs(),
                });
            }
            let d = principal_branch(chi - a);
            if arc > 0.0 && d > 0.0 && d <= arc {
                total += 1;
            } else if arc < 0.0 && d <= 0.0 && d > arc {
                total -= 1;
            }
        }
    }
    Ok(total)
}

/// Minimum-total-circular-distance matching between two small angle
/// multisets, by exhaustion over permutations.
fn best_matching(from: &[f64], to: &[f64]) -> Vec<usize> {
    let n = from.len();
    let mut best: Vec<usize> = (0..n).collect();
    let mut best_cost = f64::INFINITY;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let cost: f64 = (0..n)
            .map(|j| principal_branch(to[p[j]] - from[j]).abs())
            .sum();
        if cost < best_cost {
            best_cost = cost;
            best = p.to_vec();
        }
    });
    best
}

fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Eigenvalue angles of a symmetric unitary matrix W = A + iB, via a
/// simultaneous diagonalization of the commuting pair (A, B): diagonalize
/// A cos(g) + B sin(g) for a generic angle g and read the angles off the
/// diagonal quadratic forms. Retries with a different g when an accidental
/// eigenvalue collision of the combination mixes distinct angle spaces.
pub fn symmetric_unitary_angles(w: &DMatrix<num_complex::Complex64>) -> Result<Vec<f64>> {
    let n = w.nrows();
    let a = DMatrix::from_fn(n, n, |i, j| w[(i, j)].re);
    let b = DMatrix::from_fn(n, n, |i, j| w[(i, j)].im);
    let sym_dev = (&a - a.transpose()).abs().max() + (&b - b.transpose()).abs().max();
    if sym_dev > 1e-9 {
        return Err(Error::InvalidPath(format!(
            "U^T U deviates from symmetric by {:.3e}",
            sym_dev
        )));
    }
    let gammas: [f64; 5] = [0.912_763_001, 2.157_331_907, 0.318_555_77, 1.711_019_23, 2.901_187_4];
    for &g in &gammas {
        let c = &a * g.cos() + &b * g.sin();
        let eig = nalgebra::SymmetricEigen::new(c);
        let mut angles = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let o: DVector<f64> = eig.eigenvectors.column(j).into_owned();
            let ao = &a * &o;
            let bo = &b * &o;
            let ca = o.dot(&ao);
            let cb = o.dot(&bo);
            let res = (ao - &o * ca).norm() + (bo - &o * cb).norm();
            if res > 1e-8 {
                ok = false;
                break;
            }
            let mut ang = cb.atan2(ca);
            if ang < 0.0 {
                ang += 2.0 * std::f64::consts::PI;
            }
            angles.push(ang);
        }
        if ok {
            return Ok(angles);
        }
    }
    Err(Error::OracleDegenerate(gammas.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::{diagonal_phase_loop, UnitaryFrame};

    #[test]
    fn constant_loop_counts_zero() {
        let samples: Vec<(f64, UnitaryFrame)> = (0..=16)
            .map(|i| (i as f64 / 16.0, UnitaryFrame::identity(2)))
            .collect();
        let path = LagrangianPath::new(samples, true).unwrap();
        assert_eq!(crossing_index(&path).unwrap(), 0);
    }

    #[test]
    fn half_turn_counts_one() {
        let path = diagonal_phase_loop(1, 1, 64);
        assert_eq!(crossing_index(&path).unwrap(), 1);
    }

    #[test]
    fn diagonal_loops_agree_with_winding() {
        for n in 1..=4 {
            for k in 0..=n {
                let path = diagonal_phase_loop(k, n, 128);
                assert_eq!(
                    crossing_index(&path).unwrap(),
                    path.maslov_index().unwrap(),
                    "k={k} n={n}"
                );
            }
        }
    }

    #[test]
    fn angles_of_diagonal_symmetric_unitary() {
        let w = UnitaryFrame::diagonal_phases(&[0.4, 1.9, 5.1]).symmetric_square();
        let mut angles = symmetric_unitary_angles(&w).unwrap();
        angles.sort_by(f64::total_cmp);
        let expected = [0.8, 3.8, 10.2 - 2.0 * std::f64::consts::PI];
        let mut expected: Vec<f64> = expected.to_vec();
        for e in &mut expected {
            if *e < 0.0 {
                *e += 2.0 * std::f64::consts::PI;
            }
        }
        expected.sort_by(f64::total_cmp);
        for (a, e) in angles.iter().zip(&expected) {
            assert!((a - e).abs() < 1e-10, "{a} vs {e}");
        }
    }
}
