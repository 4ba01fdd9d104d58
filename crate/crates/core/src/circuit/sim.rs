use num_complex::Complex64;

use crate::config::PrecisionConfig;
use crate::error::{Error, Result};
use crate::generator::{sample_tree, theta_from_beta};
use crate::oracle::FunctionOracle;
use crate::state::StateVector;

use super::gate::{apply_gate, controlled_rotation, controlled_rotation_fused, Gate};
use super::layout::RegisterLayout;

/// Residual mass outside the all-zero ancilla subspace tolerated at the end of a run.
pub const ANCILLA_TOLERANCE: f64 = 1e-20;

/// The classical values the oracle gates write: per input `x`, the truncated
/// angle numerators (heap order) and the phase words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTables {
    cfg: PrecisionConfig,
    thetas: Vec<Vec<u64>>,
    phases: Vec<Vec<u64>>,
}

impl OracleTables {
    pub fn new(cfg: PrecisionConfig, thetas: Vec<Vec<u64>>, phases: Vec<Vec<u64>>) -> Result<Self> {
        let inputs = 1usize << cfg.m;
        let ok = thetas.len() == inputs
            && phases.len() == inputs
            && thetas.iter().all(|t| t.len() == cfg.dim() - 1 && t.iter().all(|v| v >> cfg.grid_bits() == 0))
            && phases.iter().all(|p| p.len() == cfg.dim() && p.iter().all(|v| v >> cfg.phase_bits() == 0));
        if !ok {
            return Err(Error::IncompleteParams("oracle tables do not match the configuration".into()));
        }
        Ok(Self { cfg, thetas, phases })
    }

    pub fn from_oracle(oracle: &FunctionOracle) -> Result<Self> {
        let cfg = oracle.config();
        let mut thetas = Vec::new();
        let mut phases = Vec::new();
        for x in 0..1u64 << cfg.m {
            let tree = sample_tree(oracle, (cfg.m > 0).then_some(x))?;
            thetas.push(
                tree.betas
                    .iter()
                    .map(|b| theta_from_beta(*b, &cfg).map(|(t, _)| t.numerator() as u64))
                    .collect::<Result<Vec<_>>>()?,
            );
            phases.push(tree.phases.iter().map(|u| u.numerator() as u64).collect());
        }
        Self::new(cfg, thetas, phases)
    }

    pub fn config(&self) -> PrecisionConfig {
        self.cfg
    }

    /// Angle numerator on the `2^-(n+λ')` grid for input `x`, level `t`, prefix `z`.
    pub fn theta(&self, x: u64, level: u32, prefix: u64) -> u64 {
        self.thetas[x as usize][(1usize << level) + prefix as usize - 1]
    }

    pub fn phase_word(&self, x: u64, leaf: u64) -> u64 {
        self.phases[x as usize][leaf as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RotationMode {
    /// One controlled `RY` per angle bit.
    #[default]
    Ladder,
    /// One rotation per basis branch.
    Fused,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Compute,
    Uncompute,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CircuitOptions {
    pub rotation: RotationMode,
    pub trace: bool,
}

/// Result of one simulated run.
#[derive(Clone, Debug)]
pub struct CircuitRun {
    /// State on the input and data wires after the ancilla was projected out.
    pub state: StateVector,
    /// Largest squared norm seen outside the zero-ancilla subspace at a check point.
    pub ancilla_mass: f64,
    pub trace: Vec<String>,
}

struct Simulator<'t> {
    layout: RegisterLayout,
    tables: &'t OracleTables,
    opts: CircuitOptions,
    trace: Vec<String>,
    ancilla_mass: f64,
}

impl<'t> Simulator<'t> {
    fn new(tables: &'t OracleTables, opts: CircuitOptions) -> Result<Self> {
        Ok(Self {
            layout: RegisterLayout::for_config(&tables.cfg)?,
            tables,
            opts,
            trace: Vec::new(),
            ancilla_mass: 0.0,
        })
    }

    fn record(&mut self, line: impl FnOnce() -> String) {
        if self.opts.trace {
            self.trace.push(line());
        }
    }

    /// Value XORed into the ancilla on the branch with input `x`, data `z`.
    fn oracle_value(&self, level: u32, x: u64, z: u64) -> u64 {
        let l = &self.layout;
        if level == l.n {
            self.tables.phase_word(x, z) << (l.ancilla - l.phase_bits)
        } else {
            self.tables.theta(x, level, z >> (l.n - level))
        }
    }

    fn apply_bft(&mut self, state: &mut StateVector, level: u32, direction: Direction) -> Result<()> {
        let gate = match direction {
            Direction::Compute => Gate::OracleCompute { level },
            Direction::Uncompute => Gate::OracleUncompute { level },
        };
        self.record(|| gate.to_string());
        let l = self.layout;
        let amps = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (i, a) in amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let v = self.oracle_value(level, l.input_of(i), l.data_of(i));
            let expected = match direction {
                Direction::Compute => 0,
                Direction::Uncompute => v,
            };
            if l.ancilla_of(i) != expected {
                return Err(Error::Wire(format!(
                    "{gate}: branch {i:#x} holds ancilla {:#x}, expected {expected:#x}",
                    l.ancilla_of(i)
                )));
            }
            out[i ^ v as usize] = *a;
        }
        *state = StateVector::new(out)?;
        Ok(())
    }

    fn ra(&mut self, state: &mut StateVector) -> Result<()> {
        let l = self.layout;
        let wires = l.ancilla_wires();
        for t in 0..l.n {
            self.apply_bft(state, t, Direction::Compute)?;
            let target = l.data_wire(t);
            match self.opts.rotation {
                RotationMode::Ladder => {
                    let gates = controlled_rotation(state, &l, &wires, target)?;
                    for g in gates {
                        self.record(|| g.to_string());
                    }
                }
                RotationMode::Fused => {
                    controlled_rotation_fused(state, &l, &wires, target)?;
                    self.record(|| format!("FUSED_ROTATION q{target}"));
                }
            }
            self.apply_bft(state, t, Direction::Uncompute)?;
        }
        self.check_ancilla(state);
        Ok(())
    }

    fn rp(&mut self, state: &mut StateVector) -> Result<()> {
        let l = self.layout;
        self.apply_bft(state, l.n, Direction::Compute)?;
        for k in 0..l.phase_bits {
            let gate = Gate::Phase {
                wire: l.ancilla_wire(k),
                angle: 2.0 * std::f64::consts::PI / (1u64 << (k + 1)) as f64,
            };
            apply_gate(state, &gate, &l)?;
            self.record(|| gate.to_string());
        }
        self.apply_bft(state, l.n, Direction::Uncompute)?;
        self.check_ancilla(state);
        Ok(())
    }

    fn check_ancilla(&mut self, state: &StateVector) {
        let mask = self.layout.ancilla_mask();
        let mass: f64 = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        self.ancilla_mass = self.ancilla_mass.max(mass);
    }

    fn embed(&self, register: &StateVector) -> Result<StateVector> {
        let l = self.layout;
        let expected = 1usize << (l.m + l.n);
        if register.dim() != expected {
            return Err(Error::Dimension {
                expected,
                actual: register.dim(),
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); l.dim()];
        for (i, a) in register.amplitudes().iter().enumerate() {
            amps[i << l.ancilla] = *a;
        }
        StateVector::new(amps)
    }

    fn finish(self, state: StateVector) -> Result<CircuitRun> {
        if self.ancilla_mass > ANCILLA_TOLERANCE {
            return Err(Error::Ancilla(self.ancilla_mass));
        }
        let shift = self.layout.ancilla;
        let amps = state
            .amplitudes()
            .iter()
            .step_by(1 << shift)
            .copied()
            .collect();
        Ok(CircuitRun {
            state: StateVector::new(amps)?,
            ancilla_mass: self.ancilla_mass,
            trace: self.trace,
        })
    }
}

/// Which stages to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stages {
    Amplitudes,
    Phases,
    Both,
}

/// Runs the selected stages on `register` (input and data wires, ancilla
/// implicit and zero).
pub fn simulate(tables: &OracleTables, register: &StateVector, stages: Stages, opts: CircuitOptions) -> Result<CircuitRun> {
    let mut sim = Simulator::new(tables, opts)?;
    let mut state = sim.embed(register)?;
    if matches!(stages, Stages::Amplitudes | Stages::Both) {
        sim.ra(&mut state)?;
    }
    if matches!(stages, Stages::Phases | Stages::Both) {
        sim.rp(&mut state)?;
    }
    sim.finish(state)
}

fn prs_tables(oracle: &FunctionOracle) -> Result<OracleTables> {
    if oracle.config().m != 0 {
        return Err(Error::Config(crate::error::ConfigError::Invalid(
            "state circuit expects m = 0; use the function-like entry point".into(),
        )));
    }
    OracleTables::from_oracle(oracle)
}

/// Random-amplitudes stage alone, on `|0^n>`.
pub fn run_ra(oracle: &FunctionOracle) -> Result<StateVector> {
    let tables = prs_tables(oracle)?;
    let zero = StateVector::zero_state(tables.cfg.n);
    Ok(simulate(&tables, &zero, Stages::Amplitudes, CircuitOptions::default())?.state)
}

/// Phase stage applied to an `n`-qubit state.
pub fn run_rp(state: &StateVector, oracle: &FunctionOracle) -> Result<StateVector> {
    let tables = prs_tables(oracle)?;
    Ok(simulate(&tables, state, Stages::Phases, CircuitOptions::default())?.state)
}

/// Full state circuit on `|0^n>`.
pub fn run_rs(oracle: &FunctionOracle) -> Result<StateVector> {
    let tables = prs_tables(oracle)?;
    let zero = StateVector::zero_state(tables.cfg.n);
    Ok(simulate(&tables, &zero, Stages::Both, CircuitOptions::default())?.state)
}

/// Function-like circuit on an `m`-qubit input; the result lives on `m + n` qubits.
pub fn run_rs_prfs(oracle: &FunctionOracle, input: &StateVector) -> Result<StateVector> {
    let cfg = oracle.config();
    if cfg.m == 0 {
        return Err(Error::Config(crate::error::ConfigError::Invalid(
            "function-like circuit needs m >= 1".into(),
        )));
    }
    if input.num_qubits() != cfg.m {
        return Err(Error::Dimension {
            expected: 1 << cfg.m,
            actual: input.dim(),
        });
    }
    let tables = OracleTables::from_oracle(oracle)?;
    let register = input.tensor(&StateVector::zero_state(cfg.n));
    Ok(simulate(&tables, &register, Stages::Both, CircuitOptions::default())?.state)
}
