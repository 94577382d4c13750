//! Circle maximizers selectable by name.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use super::argmax::{brute_force_mset, circle_argmax, cluster_angles, CircleMax, CircleProblem};
use super::{TraceConfig, TraceError};

pub trait CircleMaximizer: Send + Sync {
    fn name(&self) -> &'static str;

    fn maximize(
        &self,
        problem: &CircleProblem,
        r: f64,
        cfg: &TraceConfig,
    ) -> Result<Vec<CircleMax>, TraceError>;

    /// Whether returned angles satisfy the stationarity conditions to
    /// `newton_tol`, i.e. are refined rather than grid points.
    fn refined(&self) -> bool;
}

/// Grid seeding followed by safeguarded Newton on `∂θ |p|^2 = 0`.
#[derive(Debug, Default, Clone, Copy)]
pub struct NewtonRefined;

impl CircleMaximizer for NewtonRefined {
    fn name(&self) -> &'static str {
        "newton"
    }

    fn maximize(
        &self,
        problem: &CircleProblem,
        r: f64,
        cfg: &TraceConfig,
    ) -> Result<Vec<CircleMax>, TraceError> {
        circle_argmax(problem, r, cfg)
    }

    fn refined(&self) -> bool {
        true
    }
}

/// Unrefined dense scan: one grid point per cluster of near-maximal values.
/// Resolution is the grid spacing; ties closer than `tie_tol` of the
/// oscillation are reported together.
#[derive(Debug, Clone, Copy)]
pub struct DenseScan {
    pub tie_tol: f64,
}

impl Default for DenseScan {
    fn default() -> Self {
        Self { tie_tol: 1e-6 }
    }
}

impl CircleMaximizer for DenseScan {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn maximize(
        &self,
        problem: &CircleProblem,
        r: f64,
        cfg: &TraceConfig,
    ) -> Result<Vec<CircleMax>, TraceError> {
        let angles = brute_force_mset(problem.poly(), r, cfg.grid, self.tie_tol);
        let gap = 1.5 * TAU / cfg.grid as f64;
        let e = problem.expansion();
        let radial = e.radial(r);
        let mut out: Vec<CircleMax> = cluster_angles(&angles, gap)
            .into_iter()
            .map(|cluster| {
                cluster
                    .into_iter()
                    .map(|theta| {
                        let angular = e.angular(r, theta);
                        CircleMax {
                            theta,
                            mod2: radial + angular,
                            angular,
                        }
                    })
                    .max_by(|a, b| a.angular.total_cmp(&b.angular))
                    .expect("clusters are nonempty")
            })
            .collect();
        out.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        Ok(out)
    }

    fn refined(&self) -> bool {
        false
    }
}

pub struct MaximizerRegistry {
    entries: BTreeMap<&'static str, Arc<dyn CircleMaximizer>>,
}

impl MaximizerRegistry {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, m: Arc<dyn CircleMaximizer>) {
        self.entries.insert(m.name(), m);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn CircleMaximizer>, TraceError> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| TraceError::UnknownMethod(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

impl Default for MaximizerRegistry {
    fn default() -> Self {
        let mut reg = Self::new();
        reg.register(Arc::new(NewtonRefined));
        reg.register(Arc::new(DenseScan::default()));
        reg
    }
}
