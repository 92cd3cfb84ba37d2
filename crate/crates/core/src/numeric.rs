//! Dense linear-algebra helpers and the fixed-step integrator shared by the
//! other modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Absolute tolerance used to decide whether a matrix is symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Returns `(A + Aᵀ) / 2`.
pub fn symmetric_part(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_square(a)?;
    Ok((a + a.transpose()) * 0.5)
}

/// Largest entrywise difference between `a` and its transpose.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    (a - a.transpose()).amax()
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues_sym(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    ensure_square(a)?;
    let asym = asymmetry(a);
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    // Symmetrize away sub-tolerance noise before handing to the solver.
    let sym = (a + a.transpose()) * 0.5;
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue_sym(a: &DMatrix<f64>) -> Result<f64> {
    let values = eigenvalues_sym(a)?;
    values
        .last()
        .copied()
        .ok_or_else(|| Error::param("matrix", "empty matrix has no eigenvalues"))
}

/// Smallest eigenvalue of a symmetric matrix; positive iff the matrix is
/// positive definite.
pub fn min_eigenvalue_sym(a: &DMatrix<f64>) -> Result<f64> {
    let values = eigenvalues_sym(a)?;
    values
        .first()
        .copied()
        .ok_or_else(|| Error::param("matrix", "empty matrix has no eigenvalues"))
}

pub fn is_positive_definite(a: &DMatrix<f64>) -> Result<bool> {
    Ok(min_eigenvalue_sym(a)? > 0.0)
}

fn ensure_square(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

/// One classical fourth-order Runge–Kutta step of `ẋ = f(t, x)`.
pub fn rk4_step<F>(f: F, t: f64, x: &DVector<f64>, dt: f64) -> DVector<f64>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
{
    let half = 0.5 * dt;
    let k1 = f(t, x);
    let k2 = f(t + half, &(x + &k1 * half));
    let k3 = f(t + half, &(x + &k2 * half));
    let k4 = f(t + dt, &(x + &k3 * dt));
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

pub(crate) fn is_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    /// Larger root of the characteristic polynomial of a symmetric 2x2.
    fn quadratic_max_root(a: f64, b: f64, d: f64) -> f64 {
        let tr = a + d;
        let det = a * d - b * b;
        (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0
    }

    #[test]
    fn symmetric_part_examples() {
        assert_eq!(symmetric_part(&m2(0.0, 2.0, 0.0, 0.0)).unwrap(), m2(0.0, 1.0, 1.0, 0.0));
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(symmetric_part(&id).unwrap(), id);
        assert_eq!(symmetric_part(&m2(1.0, 3.0, 1.0, 2.0)).unwrap(), m2(1.0, 2.0, 2.0, 2.0));
    }

    #[test]
    fn symmetric_part_rejects_rectangular() {
        let a = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(symmetric_part(&a), Err(Error::NotSquare { rows: 2, cols: 3 })));
    }

    #[test]
    fn max_eigenvalue_examples() {
        assert_eq!(max_eigenvalue_sym(&m2(1.0, 0.0, 0.0, -3.0)).unwrap(), 1.0);
        assert_eq!(max_eigenvalue_sym(&DMatrix::zeros(2, 2)).unwrap(), 0.0);
        // (−100 + √(10000 + 4·1249.5²)) / 2 = (−100 + 2501) / 2
        let oracle = (-100.0 + (10000.0_f64 + 4.0 * 1249.5 * 1249.5).sqrt()) / 2.0;
        assert_eq!(oracle, 1200.5);
        let got = max_eigenvalue_sym(&m2(0.0, -1249.5, -1249.5, -100.0)).unwrap();
        assert_relative_eq!(got, oracle, max_relative = 1e-12);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let err = max_eigenvalue_sym(&m2(0.0, 1.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));
        // Within tolerance is accepted.
        assert!(max_eigenvalue_sym(&m2(0.0, 1.0, 1.0 + 1e-12, 0.0)).is_ok());
    }

    #[test]
    fn rk4_exact_for_cubic() {
        // ẋ = 3t² integrates exactly under RK4.
        let x = rk4_step(
            |t, _| DVector::from_element(1, 3.0 * t * t),
            0.5,
            &DVector::from_element(1, 0.0),
            0.25,
        );
        assert_relative_eq!(x[0], 0.75f64.powi(3) - 0.5f64.powi(3), epsilon = 1e-15);
    }

    fn sym_matrix(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
        proptest::collection::vec(-10.0..10.0f64, n * n).prop_map(move |v| {
            let a = DMatrix::from_vec(n, n, v);
            (&a + a.transpose()) * 0.5
        })
    }

    proptest! {
        #[test]
        fn symmetric_part_idempotent(v in proptest::collection::vec(-100.0..100.0f64, 16)) {
            let a = DMatrix::from_vec(4, 4, v);
            let once = symmetric_part(&a).unwrap();
            let twice = symmetric_part(&once).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn max_eigenvalue_positively_homogeneous(a in sym_matrix(4), c in 0.01..100.0f64) {
            let base = max_eigenvalue_sym(&a).unwrap();
            let scaled = max_eigenvalue_sym(&(&a * c)).unwrap();
            prop_assert!((scaled - c * base).abs() <= 1e-9 * (1.0 + (c * base).abs()));
        }

        #[test]
        fn two_by_two_matches_closed_form(a in -50.0..50.0f64, b in -50.0..50.0f64, d in -50.0..50.0f64) {
            let got = max_eigenvalue_sym(&m2(a, b, b, d)).unwrap();
            let want = quadratic_max_root(a, b, d);
            prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }
}
