//! Fourier pseudospectral evolution on a periodic box.

pub mod fft;
pub mod grid;
pub mod init;
pub mod simulate;
pub mod solver;

pub use fft::Fourier;
pub use grid::Grid2D;
pub use init::{check_commensurate, init_line_soliton, tilted_packet, wrap, Background};
pub use simulate::{simulate, Simulation, Snapshot};
pub use solver::{linear_symbol, project, travelling_wave_residual, Mode, Solver, SolverConfig, SpectralState};
