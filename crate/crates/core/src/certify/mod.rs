//! Exact vertex certification.
//!
//! The rank test is authoritative. The graph criterion is a fast path for
//! arrays whose every constraint set is either a single `1` or exactly two
//! `1/2` entries.

mod enumerate;
mod graph;
mod rank;

use serde_json::{json, Value};

use crate::array::{Array, Kind, PolytopeSpec};
use crate::json::array_to_value;

pub use enumerate::enumerate_vertices;
pub use graph::{
    build_support_graph, is_vertex_graph, is_vertex_half_integral, Component, GraphMode,
    SupportGraph,
};
pub use rank::{constraint_matrix, constraint_rank, is_vertex_rank};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    GraphCriterion,
    RankTest,
    Enumeration,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::GraphCriterion => "graph",
            Method::RankTest => "rank",
            Method::Enumeration => "enumeration",
        }
    }
}

/// Outcome of a vertex test. A non-vertex carries `(X, Y)` with
/// `X != Y`, both members, and `A = (X + Y) / 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCertificate {
    pub is_vertex: bool,
    pub method: Method,
    pub witness: Option<(Array, Array)>,
}

impl VertexCertificate {
    pub fn vertex(method: Method) -> Self {
        VertexCertificate {
            is_vertex: true,
            method,
            witness: None,
        }
    }

    pub fn non_vertex(method: Method, x: Array, y: Array) -> Self {
        VertexCertificate {
            is_vertex: false,
            method,
            witness: Some((x, y)),
        }
    }

    /// Checks the witness against `a` exactly. Vertices trivially pass.
    pub fn witness_is_valid(&self, a: &Array, spec: &PolytopeSpec) -> bool {
        match (&self.witness, self.is_vertex) {
            (None, true) => true,
            (Some((x, y)), false) => {
                x != y
                    && x.is_member(spec).unwrap_or(false)
                    && y.is_member(spec).unwrap_or(false)
                    && &x.midpoint(y) == a
            }
            _ => false,
        }
    }

    pub fn to_json(&self, kind: Kind) -> Value {
        let mut v = json!({
            "is_vertex": self.is_vertex,
            "method": self.method.as_str(),
        });
        if let Some((x, y)) = &self.witness {
            v["witness"] = json!({ "x": array_to_value(x, kind), "y": array_to_value(y, kind) });
        }
        v
    }
}
