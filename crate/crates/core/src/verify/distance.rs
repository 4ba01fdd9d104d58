use crate::error::Result;
use crate::state::StateVector;

/// `√(1 − |⟨a|b⟩|²)` for pure states (inputs are normalized first).
///
/// Evaluated as `√(½ ‖a − w b‖² (1 + |⟨a|b⟩|))` with `w` the phase aligning
/// `b` to `a`, which keeps full relative accuracy for nearly equal states.
/// Both argument orders are averaged so the result is exactly symmetric.
pub fn trace_distance_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(0.5 * (aligned_distance(a, b)? + aligned_distance(b, a)?))
}

fn aligned_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    let (na, nb) = (a.norm(), b.norm());
    let c = a.inner(b)? / (na * nb);
    let r = c.norm();
    if r == 0.0 {
        return Ok(1.0);
    }
    let w = c.conj() / r;
    let gap: f64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x / na - w * y / nb).norm_sqr())
        .sum();
    Ok((0.5 * gap * (1.0 + r.min(1.0))).sqrt().min(1.0))
}
