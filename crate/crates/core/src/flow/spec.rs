//! JSON flow specifications: a builtin fixture by name, or per-vertex vectors
//! on a mesh file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{example1_fixture, example2_fixture, generator, sphere_circle, torus_nonsep, Fixture, Flow};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{read_mesh, TriangulatedSurface};

pub use crate::SCHEMA;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum FlowSource {
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ks: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default)]
        level: usize,
    },
    /// Vectors per vertex of `mesh`; K is the sidecar subcomplex named `K`.
    Vertex { mesh: String, sidecar: String, vectors: Vec<Vec3> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub schema: u32,
    #[serde(flatten)]
    pub source: FlowSource,
}

impl FlowSpec {
    pub fn builtin(name: &str, level: usize) -> Self {
        FlowSpec {
            schema: SCHEMA,
            source: FlowSource::Builtin { name: name.into(), g: None, ks: None, lambda: None, level },
        }
    }

    pub fn generator(g: u32, ks: &[usize], level: usize) -> Self {
        FlowSpec {
            schema: SCHEMA,
            source: FlowSource::Builtin {
                name: "generator".into(),
                g: Some(g),
                ks: Some(ks.to_vec()),
                lambda: None,
                level,
            },
        }
    }

    /// Build the fixture; relative mesh paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<Fixture> {
        if self.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported flow spec schema {}", self.schema)));
        }
        match &self.source {
            FlowSource::Builtin { name, g, ks, lambda, level } => {
                builtin_fixture(name, *g, ks.as_deref(), *lambda, *level)
            }
            FlowSource::Vertex { mesh, sidecar, vectors } => {
                let off = std::fs::read_to_string(base.join(mesh))?;
                let side = std::fs::read_to_string(base.join(sidecar))?;
                let (m, subs) = read_mesh(&off, &side)?;
                if vectors.len() != m.num_vertices() {
                    return Err(Error::Parse(format!("{} vectors for {} vertices", vectors.len(), m.num_vertices())));
                }
                let k =
                    subs.get("K").cloned().ok_or_else(|| Error::Parse("sidecar has no subcomplex named K".into()))?;
                let surface = TriangulatedSurface::from_mesh(m)?;
                let flow = Flow::from_vertex_vectors(&surface, vectors.clone());
                let genus = surface.genus();
                Ok(Fixture { name: "vertex-field".into(), surface, k, flow, genus, ks: vec![], annulus_variant: None })
            }
        }
    }
}

/// Builtin fixture names accepted by [`builtin_fixture`].
pub const FIXTURE_NAMES: [&str; 5] = ["generator", "example1", "example2", "torus-nonsep", "sphere-circle"];

pub fn builtin_fixture(
    name: &str,
    g: Option<u32>,
    ks: Option<&[usize]>,
    lambda: Option<f64>,
    level: usize,
) -> Result<Fixture> {
    match name {
        "generator" => generator(g.unwrap_or(0), ks.unwrap_or(&[]), level),
        "example1" => example1_fixture(level),
        "example2" => example2_fixture(level),
        "torus-nonsep" => torus_nonsep(level),
        "sphere-circle" => Ok(sphere_circle(lambda.unwrap_or(0.0), level + 3)),
        _ => Err(Error::Param(format!("unknown fixture {name}; known: {}", FIXTURE_NAMES.join(", ")))),
    }
}

pub fn load_flow_spec(path: &Path) -> Result<Fixture> {
    let text = std::fs::read_to_string(path)?;
    let spec: FlowSpec = serde_json::from_str(&text)?;
    spec.load(path.parent().unwrap_or(Path::new(".")))
}
