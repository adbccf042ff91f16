//! Undirected, unit-weight views derived from a protection graph.
//!
//! The subject view keeps every edge carrying `t` or `g`; the island view
//! further requires both endpoints to be subjects. Orientation is erased, so
//! antiparallel edges collapse into one undirected pair, and self-loops are
//! dropped.

use crate::graph::{ProtectionGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViewMode {
    SubjectView,
    IslandView,
}

#[derive(Clone, Debug)]
pub struct DerivedView<'g> {
    base: &'g ProtectionGraph,
    mode: ViewMode,
    adjacency: Vec<Vec<usize>>,
    dropped: Vec<usize>,
    edge_visits: usize,
}

impl<'g> DerivedView<'g> {
    fn build(base: &'g ProtectionGraph, mode: ViewMode) -> Self {
        let n = base.vertex_count();
        let mut adjacency = vec![Vec::new(); n];
        let mut dropped = Vec::new();
        let mut edge_visits = 0;
        for (e, edge) in base.edges().iter().enumerate() {
            edge_visits += 1;
            let (u, v) = base.ends(e);
            let keep = u != v
                && edge.rights.has_take_or_grant()
                && (mode == ViewMode::SubjectView || (base.is_subject(u) && base.is_subject(v)));
            if keep {
                adjacency[u].push(v);
                adjacency[v].push(u);
            } else {
                dropped.push(e);
            }
        }
        // Antiparallel edges leave duplicates behind.
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        DerivedView {
            base,
            mode,
            adjacency,
            dropped,
            edge_visits,
        }
    }

    pub fn base(&self) -> &'g ProtectionGraph {
        self.base
    }

    pub fn mode(&self) -> ViewMode {
        self.mode
    }

    /// Sorted neighbour positions of vertex position `ix`.
    pub fn neighbors(&self, ix: usize) -> &[usize] {
        &self.adjacency[ix]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Undirected pairs `(u, v)` with `u < v`, in sorted order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    /// Same as [`pairs`](Self::pairs) but with vertex names.
    pub fn named_pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.pairs()
            .into_iter()
            .map(|(u, v)| (self.base.name(u).clone(), self.base.name(v).clone()))
            .collect()
    }

    /// Positions (in `base().edges()`) of the edges the view left out.
    pub fn dropped_edges(&self) -> &[usize] {
        &self.dropped
    }

    /// Number of base edges inspected during construction.
    pub fn edge_visits(&self) -> usize {
        self.edge_visits
    }
}

pub fn build_subject_view(g: &ProtectionGraph) -> DerivedView<'_> {
    DerivedView::build(g, ViewMode::SubjectView)
}

pub fn build_island_view(g: &ProtectionGraph) -> DerivedView<'_> {
    DerivedView::build(g, ViewMode::IslandView)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_text;

    fn names(view: &DerivedView<'_>) -> Vec<(String, String)> {
        view.named_pairs()
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn pair(a: &str, b: &str) -> (String, String) {
        (a.to_owned(), b.to_owned())
    }

    #[test]
    fn subject_view_drops_plain_rights() {
        let g = parse_text("subject p\nsubject q\nobject o\nedge p q t\nedge q o r\n").unwrap();
        let view = build_subject_view(&g);
        assert_eq!(names(&view), vec![pair("p", "q")]);
        assert_eq!(view.dropped_edges().len(), 1);
    }

    #[test]
    fn antiparallel_edges_collapse() {
        let g = parse_text("subject p\nsubject q\nedge p q g\nedge q p t\n").unwrap();
        let view = build_subject_view(&g);
        assert_eq!(names(&view), vec![pair("p", "q")]);
        assert_eq!(view.neighbors(0), &[1]);
    }

    #[test]
    fn no_take_grant_means_no_adjacency() {
        let g = parse_text("subject p\nsubject q\nedge p q r,w\nedge q p x\n").unwrap();
        assert!(build_subject_view(&g).pairs().is_empty());
        assert!(build_island_view(&g).pairs().is_empty());
    }

    #[test]
    fn island_view_requires_subject_endpoints() {
        let g =
            parse_text("subject u\nsubject v\nobject o\nedge u o t\nedge u v t\n").unwrap();
        assert_eq!(names(&build_island_view(&g)), vec![pair("u", "v")]);
        assert_eq!(build_subject_view(&g).pairs().len(), 2);
    }

    #[test]
    fn island_view_of_objects_is_empty() {
        let g = parse_text("object a\nobject b\nedge a b t,g\n").unwrap();
        assert!(build_island_view(&g).pairs().is_empty());
    }

    #[test]
    fn views_coincide_on_subject_only_graphs() {
        let g = parse_text("subject a\nsubject b\nsubject c\nedge a b t\nedge c b g\nedge a c r\n")
            .unwrap();
        assert_eq!(build_island_view(&g).pairs(), build_subject_view(&g).pairs());
    }

    #[test]
    fn self_loops_are_dropped() {
        let g = parse_text("subject a\nedge a a t,g\n").unwrap();
        let view = build_subject_view(&g);
        assert!(view.pairs().is_empty());
        assert_eq!(view.edge_visits(), 1);
    }
}
