//! Islands: maximal sets of subjects connected by tg-paths that run through
//! subjects only.
//!
//! Two independent computations are provided. [`compute_islands_floyd`] takes
//! the all-pairs (Warshall) closure of the island view;
//! [`compute_islands`] uses a disjoint-set forest and is the one the rest of
//! the crate relies on. Both must produce identical partitions.

use serde::Serialize;

use crate::error::Error;
use crate::graph::{ProtectionGraph, VertexId};
use crate::views::{build_island_view, DerivedView};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Island {
    /// Dense index; islands are numbered in order of their smallest member.
    pub id: usize,
    /// Sorted member names, all subjects.
    pub members: Vec<VertexId>,
}

impl Island {
    pub fn contains(&self, v: &str) -> bool {
        self.members
            .binary_search_by(|m| m.as_str().cmp(v))
            .is_ok()
    }
}

/// Island partition together with a per-vertex lookup table.
#[derive(Clone, Debug)]
pub struct IslandMap {
    islands: Vec<Island>,
    members: Vec<Vec<usize>>,
    of_vertex: Vec<Option<usize>>,
}

impl IslandMap {
    fn from_groups(g: &ProtectionGraph, mut groups: Vec<Vec<usize>>) -> Self {
        for grp in &mut groups {
            grp.sort_unstable();
        }
        groups.sort_unstable_by_key(|grp| grp[0]);
        let mut of_vertex = vec![None; g.vertex_count()];
        let islands = groups
            .iter()
            .enumerate()
            .map(|(id, grp)| {
                for &v in grp {
                    of_vertex[v] = Some(id);
                }
                Island {
                    id,
                    members: grp.iter().map(|&v| g.name(v).clone()).collect(),
                }
            })
            .collect();
        IslandMap {
            islands,
            members: groups,
            of_vertex,
        }
    }

    pub fn islands(&self) -> &[Island] {
        &self.islands
    }

    pub fn into_islands(self) -> Vec<Island> {
        self.islands
    }

    pub fn len(&self) -> usize {
        self.islands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.islands.is_empty()
    }

    /// Island id of the vertex at position `ix`; `None` for objects.
    pub fn island_of(&self, ix: usize) -> Option<usize> {
        self.of_vertex[ix]
    }

    /// Sorted member positions of island `id`.
    pub fn member_positions(&self, id: usize) -> &[usize] {
        &self.members[id]
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

pub(crate) fn island_map(g: &ProtectionGraph) -> IslandMap {
    let view = build_island_view(g);
    let n = g.vertex_count();
    let mut dsu = DisjointSet::new(n);
    for (u, v) in view.pairs() {
        dsu.union(u, v);
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| g.is_subject(v)) {
        let root = dsu.find(v);
        by_root[root].push(v);
    }
    let groups = by_root.into_iter().filter(|grp| !grp.is_empty()).collect();
    IslandMap::from_groups(g, groups)
}

pub(crate) fn island_map_floyd(g: &ProtectionGraph) -> IslandMap {
    let view = build_island_view(g);
    let subjects: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.is_subject(v)).collect();
    let mut slot = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in subjects.iter().enumerate() {
        slot[v] = i;
    }
    let m = subjects.len();
    let words = m.div_ceil(64);
    let mut reach = vec![vec![0u64; words]; m];
    for (i, &v) in subjects.iter().enumerate() {
        reach[i][i / 64] |= 1 << (i % 64);
        for &w in view.neighbors(v) {
            let j = slot[w];
            reach[i][j / 64] |= 1 << (j % 64);
        }
    }
    for k in 0..m {
        let via = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k / 64] & (1 << (k % 64)) != 0 {
                for (x, y) in row.iter_mut().zip(&via) {
                    *x |= *y;
                }
            }
        }
    }
    let mut assigned = vec![false; m];
    let mut groups = Vec::new();
    for i in 0..m {
        if assigned[i] {
            continue;
        }
        let grp: Vec<usize> = (0..m)
            .filter(|&j| reach[i][j / 64] & (1 << (j % 64)) != 0)
            .inspect(|&j| assigned[j] = true)
            .map(|j| subjects[j])
            .collect();
        groups.push(grp);
    }
    IslandMap::from_groups(g, groups)
}

/// Partitions the subjects into islands (disjoint-set implementation).
pub fn compute_islands(g: &ProtectionGraph) -> Vec<Island> {
    island_map(g).into_islands()
}

/// Partitions the subjects into islands via the all-pairs closure of the
/// island view.
pub fn compute_islands_floyd(g: &ProtectionGraph) -> Vec<Island> {
    island_map_floyd(g).into_islands()
}

pub fn same_island(g: &ProtectionGraph, u: &str, v: &str) -> Result<bool, Error> {
    let a = g.require(u)?;
    let b = g.require(v)?;
    for (ix, name) in [(a, u), (b, v)] {
        if !g.is_subject(ix) {
            return Err(Error::NotSubject(name.to_owned()));
        }
    }
    let map = island_map(g);
    Ok(map.island_of(a) == map.island_of(b))
}

/// Shortest path between two subjects of the same island, through the
/// island view.
pub(crate) fn path_within_island(view: &DerivedView<'_>, u: usize, v: usize) -> Option<Vec<usize>> {
    crate::path::shortest_in_view(view, u, v)
}
