//! Time stepping with periodic diagnostics.

use super::grid::Grid2D;
use super::solver::{Solver, SolverConfig, SpectralState};
use crate::diagnostics::{conserved_integrals_with, DiagnosticsRecord, FTriple};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub state: SpectralState,
    pub record: DiagnosticsRecord,
}

/// Iterator over snapshots: the initial state, every `snapshot_every`
/// steps, and the final state.
pub struct Simulation {
    solver: Solver,
    state: SpectralState,
    total_steps: usize,
    momenta: Vec<FTriple>,
    projection_rms: f64,
    started: bool,
    finished: bool,
}

/// Prepares a run from `initial` (physical samples). Each diagnostics
/// record carries the generalized momenta for `momenta` in its `aux` list.
pub fn simulate(config: SolverConfig, grid: Grid2D, initial: &[f64], momenta: &[FTriple]) -> Result<Simulation> {
    let solver = Solver::new(config, grid)?;
    let (state, projection_rms) = SpectralState::from_field(solver.fourier(), initial, 0.0)?;
    Ok(Simulation {
        total_steps: config.step_count(),
        solver,
        state,
        momenta: momenta.to_vec(),
        projection_rms,
        started: false,
        finished: false,
    })
}

impl Simulation {
    /// RMS amplitude of the `kx = 0, ky ≠ 0` content removed from the
    /// initial data.
    pub fn projection_rms(&self) -> f64 {
        self.projection_rms
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    fn snapshot(&self) -> Result<Snapshot> {
        let record =
            conserved_integrals_with(self.solver.fourier(), &self.state, &self.solver.config().params, &self.momenta)?;
        Ok(Snapshot { state: self.state.clone(), record })
    }

    fn advance(&mut self) -> Result<()> {
        let cfg = *self.solver.config();
        let target = (self.state.step + cfg.snapshot_every).min(self.total_steps);
        while self.state.step < target {
            let k = self.state.step;
            let dt = if k + 1 == self.total_steps { cfg.t_end - k as f64 * cfg.dt } else { cfg.dt };
            self.solver.step(&mut self.state, dt)?;
            self.state.t =
                if self.state.step == self.total_steps { cfg.t_end } else { self.state.step as f64 * cfg.dt };
        }
        Ok(())
    }
}

impl Iterator for Simulation {
    type Item = Result<Snapshot>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.total_steps == 0 {
                self.finished = true;
            }
            return Some(self.snapshot());
        }
        let out = self.advance().and_then(|_| self.snapshot());
        if out.is_err() || self.state.step >= self.total_steps {
            self.finished = true;
        }
        Some(out)
    }
}
