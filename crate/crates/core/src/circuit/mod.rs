//! Gate-level statevector simulation of the state circuits, including the
//! ancilla register and its uncomputation. The oracle's scratch output wires
//! are not materialized: each oracle gate applies its net basis-state action
//! (XOR of a classical value into the ancilla) directly.

mod gate;
mod layout;
mod sim;

pub use gate::{apply_gate, controlled_rotation, controlled_rotation_fused, Gate};
pub use layout::{RegisterLayout, MAX_CIRCUIT_LAMBDA_PRIME, MAX_CIRCUIT_WIRES};
pub use sim::{
    run_ra, run_rp, run_rs, run_rs_prfs, simulate, CircuitOptions, CircuitRun, Direction, OracleTables, RotationMode,
    Stages, ANCILLA_TOLERANCE,
};
