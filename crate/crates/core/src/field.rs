//! Per-vertex scalar and vector data bound to one graph.

use crate::error::{GacError, Result};
use crate::geometry::Point2;
use crate::graph::{GraphId, SpatialGraph};

/// One real value per vertex of a specific graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    graph: GraphId,
    values: Vec<f64>,
}

/// One 2-vector per vertex of a specific graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    graph: GraphId,
    values: Vec<[f64; 2]>,
}

fn check_len(graph: &SpatialGraph, found: usize) -> Result<()> {
    if graph.len() != found {
        return Err(GacError::FieldMismatch { expected: graph.len(), found });
    }
    Ok(())
}

impl ScalarField {
    pub fn new(graph: &SpatialGraph, values: Vec<f64>) -> Result<Self> {
        check_len(graph, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GacError::InvalidParameter(format!("non-finite value at vertex {i}")));
        }
        Ok(ScalarField { graph: graph.id(), values })
    }

    pub fn constant(graph: &SpatialGraph, c: f64) -> Self {
        ScalarField { graph: graph.id(), values: vec![c; graph.len()] }
    }

    /// Samples `f` at every vertex position.
    pub fn from_fn(graph: &SpatialGraph, f: impl Fn(Point2) -> f64) -> Self {
        ScalarField { graph: graph.id(), values: graph.points().iter().map(|&p| f(p)).collect() }
    }

    pub(crate) fn from_raw(graph: GraphId, values: Vec<f64>) -> Self {
        ScalarField { graph, values }
    }

    pub fn graph_id(&self) -> GraphId {
        self.graph
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField { graph: self.graph, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Elementwise combination of two fields on the same graph.
    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.graph, other.graph);
        ScalarField { graph: self.graph, values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect() }
    }

    /// Fails unless this field was created for `graph`.
    pub fn check(&self, graph: &SpatialGraph) -> Result<()> {
        if self.graph != graph.id() || self.values.len() != graph.len() {
            return Err(GacError::FieldMismatch { expected: graph.len(), found: self.values.len() });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;

    fn index(&self, v: usize) -> &f64 {
        &self.values[v]
    }
}

impl VectorField {
    pub fn new(graph: &SpatialGraph, values: Vec<[f64; 2]>) -> Result<Self> {
        check_len(graph, values.len())?;
        if let Some(i) = values.iter().position(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(GacError::InvalidParameter(format!("non-finite vector at vertex {i}")));
        }
        Ok(VectorField { graph: graph.id(), values })
    }

    pub fn constant(graph: &SpatialGraph, c: [f64; 2]) -> Self {
        VectorField { graph: graph.id(), values: vec![c; graph.len()] }
    }

    pub fn from_fn(graph: &SpatialGraph, f: impl Fn(Point2) -> [f64; 2]) -> Self {
        VectorField { graph: graph.id(), values: graph.points().iter().map(|&p| f(p)).collect() }
    }

    pub(crate) fn from_raw(graph: GraphId, values: Vec<[f64; 2]>) -> Self {
        VectorField { graph, values }
    }

    /// Assembles a vector field from its two component fields.
    pub fn from_components(x: &ScalarField, y: &ScalarField) -> Result<Self> {
        if x.graph != y.graph || x.len() != y.len() {
            return Err(GacError::FieldMismatch { expected: x.len(), found: y.len() });
        }
        let values = x.values.iter().zip(&y.values).map(|(&a, &b)| [a, b]).collect();
        Ok(VectorField { graph: x.graph, values })
    }

    pub fn component(&self, axis: usize) -> ScalarField {
        ScalarField { graph: self.graph, values: self.values.iter().map(|v| v[axis]).collect() }
    }

    pub fn norms(&self) -> ScalarField {
        ScalarField { graph: self.graph, values: self.values.iter().map(|v| v[0].hypot(v[1])).collect() }
    }

    pub fn graph_id(&self) -> GraphId {
        self.graph
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    pub fn into_values(self) -> Vec<[f64; 2]> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check(&self, graph: &SpatialGraph) -> Result<()> {
        if self.graph != graph.id() || self.values.len() != graph.len() {
            return Err(GacError::FieldMismatch { expected: graph.len(), found: self.values.len() });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for VectorField {
    type Output = [f64; 2];

    fn index(&self, v: usize) -> &[f64; 2] {
        &self.values[v]
    }
}
