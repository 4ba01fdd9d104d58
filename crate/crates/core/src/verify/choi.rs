use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Largest Choi dimension handled by the dense eigensolver.
pub const MAX_CHOI_DIM: usize = 1 << 8;

/// Choi matrix `J = Σ_ij V|i⟩⟨j|V† ⊗ |i⟩⟨j|` of an isometry channel. For an
/// isometry it is `M |J⟩⟨J|` with `|J⟩ = M^{-1/2} Σ_x V|x⟩ ⊗ |x⟩`.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    matrix: DMatrix<Complex64>,
    /// `Σ_x V|x⟩ ⊗ |x⟩`, unnormalized.
    vector: DVector<Complex64>,
    inputs: usize,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Smallest eigenvalue, for positivity checks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Builds the Choi matrix from the columns `V|x⟩`; they must be orthonormal
/// within 1e-9.
pub fn choi_of_isometry(columns: &[StateVector]) -> Result<ChoiMatrix> {
    let inputs = columns.len();
    if inputs == 0 || !inputs.is_power_of_two() {
        return Err(Error::Stats(format!("{inputs} columns is not a power of two")));
    }
    let out_dim = columns[0].dim();
    let dim = out_dim * inputs;
    if dim > MAX_CHOI_DIM {
        return Err(Error::Stats(format!("Choi dimension {dim} exceeds {MAX_CHOI_DIM}")));
    }
    for (i, a) in columns.iter().enumerate() {
        for (j, b) in columns.iter().enumerate().skip(i) {
            let g = a.inner(b)?;
            let want = if i == j { 1.0 } else { 0.0 };
            if (g - Complex64::new(want, 0.0)).norm() > 1e-9 {
                return Err(Error::Stats(format!(
                    "columns {i} and {j} are not orthonormal: <v_i|v_j> = {g}"
                )));
            }
        }
    }
    let mut vector = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for (x, col) in columns.iter().enumerate() {
        for (k, a) in col.amplitudes().iter().enumerate() {
            vector[k * inputs + x] = *a;
        }
    }
    let matrix = &vector * vector.adjoint();
    Ok(ChoiMatrix { matrix, vector, inputs })
}

/// `½ ‖J₁ − J₂‖₁`, from the eigenvalues of the Hermitian difference.
pub fn choi_trace_distance(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let diff = &a.matrix - &b.matrix;
    let norm: f64 = diff.symmetric_eigenvalues().iter().map(|l| l.abs()).sum();
    Ok(0.5 * norm)
}

/// The same quantity from the rank-two closed form
/// `‖|a⟩⟨a| − |b⟩⟨b|‖₁ = 2 √(((‖a‖² + ‖b‖²)/2)² − |⟨a|b⟩|²)`.
pub fn choi_trace_distance_rank2(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let na = a.vector.norm_squared();
    let nb = b.vector.norm_squared();
    let ov = a.vector.dotc(&b.vector).norm_sqr();
    let half_sum = 0.5 * (na + nb);
    Ok((half_sum * half_sum - ov).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{isometry_from_params, perturb_params, random_params};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn columns(seed: u64) -> Vec<StateVector> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let params: Vec<_> = (0..4).map(|_| random_params(2, &mut rng).unwrap()).collect();
        isometry_from_params(&params).unwrap()
    }

    #[test]
    fn structure_of_isometry_choi() {
        let j = choi_of_isometry(&columns(1)).unwrap();
        assert_eq!(j.dim(), 64);
        assert!((j.trace() - Complex64::new(4.0, 0.0)).norm() < 1e-9);
        assert!(j.min_eigenvalue() > -1e-9);
        assert_eq!(choi_trace_distance(&j, &j).unwrap(), 0.0);
    }

    #[test]
    fn eigen_and_closed_form_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..20 {
            let params: Vec<_> = (0..4).map(|_| random_params(2, &mut rng).unwrap()).collect();
            let moved: Vec<_> = params.iter().map(|p| perturb_params(p, 0.05, 0.02, &mut rng).unwrap()).collect();
            let a = choi_of_isometry(&isometry_from_params(&params).unwrap()).unwrap();
            let b = choi_of_isometry(&isometry_from_params(&moved).unwrap()).unwrap();
            let eig = choi_trace_distance(&a, &b).unwrap();
            let closed = choi_trace_distance_rank2(&a, &b).unwrap();
            assert!((eig - closed).abs() < 1e-9, "{eig} vs {closed}");
        }
    }

    #[test]
    fn rejects_non_isometries() {
        let mut cols = columns(3);
        cols[1] = cols[0].clone();
        assert!(choi_of_isometry(&cols).is_err());
        assert!(choi_of_isometry(&cols[..3]).is_err());
    }

    #[test]
    fn bounds_single_query_distinguishability() {
        // Feeding |x⟩ to both channels gives output states whose trace
        // distance can never exceed the Choi bound.
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let params: Vec<_> = (0..4).map(|_| random_params(2, &mut rng).unwrap()).collect();
        let moved: Vec<_> = params.iter().map(|p| perturb_params(p, 0.1, 0.1, &mut rng).unwrap()).collect();
        let ca = isometry_from_params(&params).unwrap();
        let cb = isometry_from_params(&moved).unwrap();
        let bound = choi_trace_distance(&choi_of_isometry(&ca).unwrap(), &choi_of_isometry(&cb).unwrap()).unwrap();
        for (a, b) in ca.iter().zip(&cb) {
            let td = crate::verify::trace_distance_pure(a, b).unwrap();
            assert!(td <= bound + 1e-12);
        }
    }
}
