//! The `(μ, J, ∫_k)` triple every saddle-point quantity depends on.

use std::sync::Arc;

use sdm_core::grid::ContinuumLine;
use sdm_core::{KMeasure, ModelParams, MomentumGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    /// Single site, `d = 0`.
    Point,
    /// Finite hypercubic lattice.
    Lattice,
    /// `d = 1` continuum with `t = 1`.
    Line,
}

#[derive(Clone)]
pub struct Model {
    /// Effective mass `μ − E`.
    pub mu: f64,
    pub j: f64,
    pub kind: MeasureKind,
    measure: Arc<dyn KMeasure>,
    /// When false, closed forms are bypassed in favour of the generic solver.
    pub closed_forms: bool,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model").field("mu", &self.mu).field("j", &self.j).field("kind", &self.kind).finish()
    }
}

impl Model {
    pub fn zero_dim(mu: f64, j: f64) -> Self {
        Model { mu, j, kind: MeasureKind::Point, measure: Arc::new(MomentumGrid::point().measure(1.0)), closed_forms: true }
    }

    pub fn continuum(mu: f64, j: f64) -> Self {
        Model { mu, j, kind: MeasureKind::Line, measure: Arc::new(ContinuumLine::default()), closed_forms: true }
    }

    /// Lattice model at the canonical mass `μ − E`.
    pub fn lattice(p: &ModelParams) -> Self {
        let grid = MomentumGrid::for_params(p);
        let kind = if p.d == 0 { MeasureKind::Point } else { MeasureKind::Lattice };
        Model { mu: p.mass(), j: p.j, kind, measure: Arc::new(grid.measure(p.t)), closed_forms: true }
    }

    /// Same model with closed forms disabled.
    pub fn numeric(&self) -> Self {
        Model { closed_forms: false, ..self.clone() }
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Model { mu, ..self.clone() }
    }

    pub fn measure(&self) -> &dyn KMeasure {
        self.measure.as_ref()
    }

    pub(crate) fn point_closed(&self) -> bool {
        self.closed_forms && self.kind == MeasureKind::Point
    }

    pub(crate) fn line_closed(&self) -> bool {
        self.closed_forms && self.kind == MeasureKind::Line
    }
}
