use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::StateVector;

use super::layout::RegisterLayout;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// `[[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
    Ry { wire: usize, angle: f64 },
    /// `diag(1, e^{iθ})`.
    Phase { wire: usize, angle: f64 },
    /// `gate` applied where every control wire is 1.
    Controlled { controls: Vec<usize>, gate: Box<Gate> },
    /// Writes the level-`t` angle (or, at `t = n`, the phase word) into the ancilla.
    OracleCompute { level: u32 },
    /// Erases what the matching compute wrote.
    OracleUncompute { level: u32 },
}

impl Gate {
    pub fn controlled(controls: Vec<usize>, gate: Gate) -> Gate {
        Gate::Controlled {
            controls,
            gate: Box::new(gate),
        }
    }

    fn matrix(&self) -> Option<(usize, [[Complex64; 2]; 2])> {
        match *self {
            Gate::Ry { wire, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                Some((wire, [[c, -s], [s, c]]))
            }
            Gate::Phase { wire, angle } => {
                let one = Complex64::new(1.0, 0.0);
                let zero = Complex64::new(0.0, 0.0);
                Some((wire, [[one, zero], [zero, Complex64::from_polar(1.0, angle)]]))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Ry { wire, angle } => write!(f, "RY({angle:.9}) q{wire}"),
            Gate::Phase { wire, angle } => write!(f, "P({angle:.9}) q{wire}"),
            Gate::Controlled { controls, gate } => {
                let c: Vec<String> = controls.iter().map(|w| format!("q{w}")).collect();
                write!(f, "C[{}] {gate}", c.join(","))
            }
            Gate::OracleCompute { level } => write!(f, "ORACLE_COMPUTE t={level}"),
            Gate::OracleUncompute { level } => write!(f, "ORACLE_UNCOMPUTE t={level}"),
        }
    }
}

/// Applies a (possibly controlled) single-qubit gate. Oracle gates need the
/// oracle tables and are run by the simulator instead.
pub fn apply_gate(state: &mut StateVector, gate: &Gate, layout: &RegisterLayout) -> Result<()> {
    if state.dim() != layout.dim() {
        return Err(Error::Dimension {
            expected: layout.dim(),
            actual: state.dim(),
        });
    }
    let (controls, base) = match gate {
        Gate::Controlled { controls, gate } => (controls.as_slice(), gate.as_ref()),
        g => (&[][..], g),
    };
    let (target, u) = base
        .matrix()
        .ok_or_else(|| Error::Wire(format!("{gate} cannot be applied without oracle tables")))?;
    let wires = layout.wires() as usize;
    if target >= wires || controls.iter().any(|&c| c >= wires) {
        return Err(Error::Wire(format!("{gate} names a wire outside 0..{wires}")));
    }
    if controls.contains(&target) {
        return Err(Error::Wire(format!("{gate} uses its target as a control")));
    }
    let tbit = 1usize << layout.bit(target);
    let cmask = controls.iter().fold(0usize, |acc, &c| acc | 1usize << layout.bit(c));
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & tbit != 0 || i & cmask != cmask {
            continue;
        }
        let j = i | tbit;
        let (a0, a1) = (amps[i], amps[j]);
        amps[i] = u[0][0] * a0 + u[0][1] * a1;
        amps[j] = u[1][0] * a0 + u[1][1] * a1;
    }
    Ok(())
}

/// Turns `|θ>|0>` into `|θ>(cos 2πθ |0> + sin 2πθ |1>)`, reading `θ` as a
/// binary fraction on `theta_wires` (first wire = weight 1/2), one controlled
/// `RY(2π / 2^k)` per wire.
pub fn controlled_rotation(
    state: &mut StateVector,
    layout: &RegisterLayout,
    theta_wires: &[usize],
    target: usize,
) -> Result<Vec<Gate>> {
    check_target_clear(state, layout, target)?;
    let mut gates = Vec::with_capacity(theta_wires.len());
    for (k, &w) in theta_wires.iter().enumerate() {
        let angle = 2.0 * std::f64::consts::PI / (1u64 << k) as f64;
        let gate = Gate::controlled(vec![w], Gate::Ry { wire: target, angle });
        apply_gate(state, &gate, layout)?;
        gates.push(gate);
    }
    Ok(gates)
}

/// Same map as [`controlled_rotation`] as one rotation per basis branch.
pub fn controlled_rotation_fused(
    state: &mut StateVector,
    layout: &RegisterLayout,
    theta_wires: &[usize],
    target: usize,
) -> Result<()> {
    check_target_clear(state, layout, target)?;
    let tbit = 1usize << layout.bit(target);
    let bits: Vec<usize> = theta_wires.iter().map(|&w| 1usize << layout.bit(w)).collect();
    let scale = 1u64 << theta_wires.len();
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & tbit != 0 {
            continue;
        }
        let theta = bits
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(i & b != 0));
        let (s, c) = (2.0 * std::f64::consts::PI * theta as f64 / scale as f64).sin_cos();
        let a0 = amps[i];
        amps[i] = a0 * c;
        amps[i | tbit] = a0 * s;
    }
    Ok(())
}

fn check_target_clear(state: &StateVector, layout: &RegisterLayout, target: usize) -> Result<()> {
    if state.dim() != layout.dim() {
        return Err(Error::Dimension {
            expected: layout.dim(),
            actual: state.dim(),
        });
    }
    if target >= layout.wires() as usize {
        return Err(Error::Wire(format!("target q{target} outside the register")));
    }
    let tbit = 1usize << layout.bit(target);
    let stray: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & tbit != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if stray > 1e-24 {
        return Err(Error::Wire(format!(
            "rotation target q{target} is not |0> on every branch (mass {stray:e})"
        )));
    }
    Ok(())
}
