//! tg-paths: shortest connections in the subject view.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::Error;
use crate::graph::{ProtectionGraph, VertexId};
use crate::views::{build_subject_view, DerivedView};

/// A simple path whose consecutive vertices are joined by a `t` or `g` edge
/// in some direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TgPath {
    pub vertices: Vec<VertexId>,
}

impl TgPath {
    /// Number of edges on the path.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Unit-weight Dijkstra from `origin` over an undirected view.
pub(crate) fn distances(view: &DerivedView<'_>, origin: usize) -> Vec<Option<usize>> {
    let n = view.base().vertex_count();
    let mut dist: Vec<Option<usize>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[origin] = Some(0);
    heap.push(Reverse((0usize, origin)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for &v in view.neighbors(u) {
            let nd = d + 1;
            if dist[v].map_or(true, |best| nd < best) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Lexicographically smallest shortest path from `src` to `dst` in `view`,
/// as vertex positions.
pub(crate) fn shortest_in_view(view: &DerivedView<'_>, src: usize, dst: usize) -> Option<Vec<usize>> {
    // Distances are taken towards dst so that the walk from src can pick the
    // smallest neighbour that still lies on a shortest route.
    let to_dst = distances(view, dst);
    let mut remaining = to_dst[src]?;
    let mut path = vec![src];
    let mut cur = src;
    while remaining > 0 {
        let next = view
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&v| to_dst[v] == Some(remaining - 1))
            .expect("a shortest route continues through some neighbour");
        path.push(next);
        cur = next;
        remaining -= 1;
    }
    Some(path)
}

/// Finds a shortest tg-path between `src` and `dst`, breaking ties by the
/// lexicographically smallest vertex sequence. `src == dst` gives the
/// single-vertex path.
pub fn tg_path(g: &ProtectionGraph, src: &str, dst: &str) -> Result<Option<TgPath>, Error> {
    let s = g.require(src)?;
    let d = g.require(dst)?;
    let view = build_subject_view(g);
    Ok(shortest_in_view(&view, s, d).map(|p| TgPath {
        vertices: p.into_iter().map(|ix| g.name(ix).clone()).collect(),
    }))
}
