//! Seeded random protection graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{GraphBuilder, ProtectionGraph, Right, RightSet, VertexId, VertexKind};

#[derive(Clone, Debug)]
pub struct RandomGraphParams {
    pub n: usize,
    /// Probability that an ordered pair of distinct vertices gets an edge.
    pub density: f64,
    pub alphabet: Vec<Right>,
    pub subject_fraction: f64,
    pub seed: u64,
}

impl RandomGraphParams {
    pub fn new(n: usize, density: f64, seed: u64) -> Self {
        RandomGraphParams {
            n,
            density,
            alphabet: vec![Right::take(), Right::grant(), Right::new("r").unwrap()],
            subject_fraction: 0.5,
            seed,
        }
    }

    pub fn subject_fraction(mut self, fraction: f64) -> Self {
        self.subject_fraction = fraction;
        self
    }

    pub fn alphabet(mut self, alphabet: Vec<Right>) -> Self {
        self.alphabet = alphabet;
        self
    }
}

/// Vertex names `v0, v1, ...`, zero-padded so name order matches index order.
pub fn vertex_name(i: usize, n: usize) -> VertexId {
    let width = n.saturating_sub(1).to_string().len();
    VertexId::new(format!("v{i:0width$}")).expect("generated names are valid")
}

/// Draws a graph: each vertex is a subject with probability
/// `subject_fraction`, each ordered pair of distinct vertices carries an edge
/// with probability `density`, and edge rights are a uniformly chosen
/// nonempty subset of the alphabet.
///
/// Panics if the alphabet is empty or has more than 63 distinct rights.
pub fn gen_random(params: &RandomGraphParams) -> ProtectionGraph {
    let mut alphabet = params.alphabet.clone();
    alphabet.sort();
    alphabet.dedup();
    assert!(
        !alphabet.is_empty() && alphabet.len() < 64,
        "alphabet must hold between 1 and 63 rights"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let density = params.density.clamp(0.0, 1.0);
    let subject_fraction = params.subject_fraction.clamp(0.0, 1.0);
    let n = params.n;

    let mut b = GraphBuilder::new();
    let names: Vec<VertexId> = (0..n).map(|i| vertex_name(i, n)).collect();
    for name in &names {
        let kind = if rng.gen_bool(subject_fraction) {
            VertexKind::Subject
        } else {
            VertexKind::Object
        };
        b.vertex(name.clone(), kind).expect("fresh names");
    }
    let subsets = (1u64 << alphabet.len()) - 1;
    for from in 0..n {
        for to in 0..n {
            if from == to || !rng.gen_bool(density) {
                continue;
            }
            let mask = rng.gen_range(1..=subsets);
            let rights: RightSet = alphabet
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, r)| r.clone())
                .collect();
            b.edge(names[from].clone(), names[to].clone(), rights)
                .expect("nonempty rights");
        }
    }
    b.build().expect("generated graph is valid")
}
