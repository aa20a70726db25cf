//! Shared run parameters for the CLI and the self-test suite.

/// Knobs shared by every front-end entry point. `trunc` is the Dirichlet
/// truncation N (coefficients 1..N), `taylor_trunc` the Taylor degree cap M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub trunc: usize,
    pub taylor_trunc: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            trunc: 64,
            taylor_trunc: 32,
            tol: 1e-9,
            max_iter: 10_000,
        }
    }
}
