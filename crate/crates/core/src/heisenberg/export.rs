use std::io::Write;

use super::lift_graph;
use crate::area::Rect;
use crate::error::{Error, Result};
use crate::field::IntrinsicFunction;

/// A triangulated surface for external plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices.
    pub faces: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    /// Wavefront OBJ: `v x y z` lines then `f i j k` lines with one-based indices.
    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// First-kind lift of `f` over a uniform `(n_eta + 1) × (n_tau + 1)` vertex grid on `rect`.
pub fn lift_graph_mesh(
    func: &IntrinsicFunction,
    rect: &Rect,
    n_eta: usize,
    n_tau: usize,
) -> Result<SurfaceMesh> {
    if n_eta == 0 || n_tau == 0 {
        return Err(Error::InvalidInput("mesh needs at least one cell per direction".into()));
    }
    let mut vertices = Vec::with_capacity((n_eta + 1) * (n_tau + 1));
    for i in 0..=n_eta {
        let eta = rect.eta0 + (rect.eta1 - rect.eta0) * i as f64 / n_eta as f64;
        for j in 0..=n_tau {
            let tau = rect.tau0 + (rect.tau1 - rect.tau0) * j as f64 / n_tau as f64;
            vertices.push(lift_graph(func, eta, tau)?.coords());
        }
    }
    let idx = |i: usize, j: usize| i * (n_tau + 1) + j;
    let mut faces = Vec::with_capacity(2 * n_eta * n_tau);
    for i in 0..n_eta {
        for j in 0..n_tau {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    Ok(SurfaceMesh { vertices, faces })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_mesh_obj() {
        let f = IntrinsicFunction::constant(1.0);
        let m = lift_graph_mesh(&f, &Rect::unit(), 1, 1).unwrap();
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.faces.len(), 2);
        let mut out = Vec::new();
        m.write_obj(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("v 1 0 0\n"));
        assert!(s.ends_with("f 1 4 2\n"));
    }
}
