//! Contextuality hypergraphs and the objects derived from them.

mod cliques;
pub mod io;
pub mod library;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use fixedbitset::FixedBitSet;
use num_traits::{One, Signed};
use std::collections::{HashMap, HashSet};

pub use cliques::{maximal_cliques, CLIQUE_LIMIT};

/// A hypergraph Γ of measurement events (vertices) and measurements
/// (hyperedges). Hyperedge members are stored as sorted vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextualityScenario {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    hyperedges: Vec<Vec<usize>>,
}

impl ContextualityScenario {
    /// Validates raw ids. Vertex order is kept as given.
    pub fn new(vertices: Vec<String>, hyperedges: Vec<Vec<String>>) -> Result<Self> {
        let index = build_index(&vertices)?;
        let mut edges = Vec::with_capacity(hyperedges.len());
        for edge in &hyperedges {
            let mut members = Vec::with_capacity(edge.len());
            for id in edge {
                let &i = index
                    .get(id)
                    .ok_or_else(|| Error::UnknownVertex(id.clone()))?;
                members.push(i);
            }
            edges.push(members);
        }
        Self::assemble(vertices, index, edges)
    }

    pub fn from_indices(vertices: Vec<String>, hyperedges: Vec<Vec<usize>>) -> Result<Self> {
        let index = build_index(&vertices)?;
        if let Some(&bad) = hyperedges.iter().flatten().find(|&&i| i >= vertices.len()) {
            return Err(Error::UnknownVertex(format!("#{bad}")));
        }
        Self::assemble(vertices, index, hyperedges)
    }

    fn assemble(
        vertices: Vec<String>,
        index: HashMap<String, usize>,
        mut hyperedges: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = vertices.len();
        for (k, edge) in hyperedges.iter_mut().enumerate() {
            if edge.is_empty() {
                return Err(Error::EmptyHyperedge { index: k });
            }
            edge.sort_unstable();
            edge.dedup();
        }
        let sets: Vec<FixedBitSet> = hyperedges.iter().map(|e| bitset(n, e)).collect();
        let ids = |e: &[usize]| e.iter().map(|&i| vertices[i].clone()).collect::<Vec<_>>();

        let mut seen = HashSet::new();
        for edge in &hyperedges {
            if !seen.insert(edge.clone()) {
                return Err(Error::DuplicateHyperedge(ids(edge)));
            }
        }
        for (a, sa) in sets.iter().enumerate() {
            for (b, sb) in sets.iter().enumerate() {
                if a != b && hyperedges[a].len() < hyperedges[b].len() && sa.is_subset(sb) {
                    return Err(Error::SpernerViolation {
                        smaller: ids(&hyperedges[a]),
                        larger: ids(&hyperedges[b]),
                    });
                }
            }
        }
        let mut covered = FixedBitSet::with_capacity(n);
        for s in &sets {
            covered.union_with(s);
        }
        if let Some(v) = (0..n).find(|&v| !covered.contains(v)) {
            return Err(Error::DanglingVertex(vertices[v].clone()));
        }
        Ok(Self {
            vertices,
            index,
            hyperedges,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_hyperedges(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn hyperedge_ids(&self, e: usize) -> Vec<String> {
        self.ids(&self.hyperedges[e])
    }

    pub fn ids(&self, members: &[usize]) -> Vec<String> {
        members.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    pub fn contains_hyperedge(&self, members: &[usize]) -> bool {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        self.hyperedges.contains(&sorted)
    }

    pub fn orthogonality_graph(&self) -> OrthoGraph {
        OrthoGraph::from_scenario(self)
    }
}

fn build_index(vertices: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        if index.insert(v.clone(), i).is_some() {
            return Err(Error::DuplicateVertexId(v.clone()));
        }
    }
    Ok(index)
}

fn bitset(n: usize, members: &[usize]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    for &i in members {
        s.insert(i);
    }
    s
}

/// Simple undirected graph on string ids; used for O(Γ) and its subgraphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthoGraph {
    vertices: Vec<String>,
    adjacency: Vec<FixedBitSet>,
}

impl OrthoGraph {
    pub fn from_scenario(s: &ContextualityScenario) -> Self {
        let n = s.num_vertices();
        let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
        for edge in s.hyperedges() {
            for &a in edge {
                for &b in edge {
                    if a != b {
                        adjacency[a].insert(b);
                    }
                }
            }
        }
        Self {
            vertices: s.vertices().to_vec(),
            adjacency,
        }
    }

    /// Graph from explicit id pairs. Self-loops and unknown ids are rejected.
    pub fn new(vertices: Vec<String>, edges: &[(String, String)]) -> Result<Self> {
        let index = build_index(&vertices)?;
        let n = vertices.len();
        let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
        for (a, b) in edges {
            let ia = *index.get(a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = *index.get(b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if ia == ib {
                return Err(Error::InvalidGraph(format!("self-loop on {a:?}")));
            }
            adjacency[ia].insert(ib);
            adjacency[ib].insert(ia);
        }
        Ok(Self {
            vertices,
            adjacency,
        })
    }

    pub fn cycle(n: usize) -> Self {
        let vertices: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
        let edges: Vec<(String, String)> = (0..n)
            .map(|i| (vertices[i].clone(), vertices[(i + 1) % n].clone()))
            .collect();
        Self::new(vertices, &edges).expect("cycle ids are distinct")
    }

    pub fn complete(n: usize) -> Self {
        let vertices: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((vertices[i].clone(), vertices[j].clone()));
            }
        }
        Self::new(vertices, &edges).expect("complete graph ids are distinct")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(b)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones(..)
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].ones()
    }

    /// All edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.num_vertices() {
            out.extend(self.adjacency[a].ones().filter(|&b| b > a).map(|b| (a, b)));
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(|s| s.count_ones(..)).sum::<usize>() / 2
    }

    /// Subgraph induced on the given vertex indices, in the given order.
    pub fn induced(&self, members: &[usize]) -> OrthoGraph {
        let m = members.len();
        let mut adjacency = vec![FixedBitSet::with_capacity(m); m];
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                if self.has_edge(a, b) {
                    adjacency[i].insert(j);
                }
            }
        }
        OrthoGraph {
            vertices: members.iter().map(|&i| self.vertices[i].clone()).collect(),
            adjacency,
        }
    }

    pub fn is_clique(&self, members: &[usize]) -> bool {
        members
            .iter()
            .enumerate()
            .all(|(i, &a)| members[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    pub fn is_independent(&self, members: &[usize]) -> bool {
        members
            .iter()
            .enumerate()
            .all(|(i, &a)| members[i + 1..].iter().all(|&b| !self.has_edge(a, b)))
    }
}

/// Subgraph G of O(Γ) with strictly positive rational vertex weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    graph: OrthoGraph,
    weights: Vec<Rational>,
}

impl WeightedGraph {
    pub fn new(graph: OrthoGraph, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != graph.num_vertices() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} vertices",
                weights.len(),
                graph.num_vertices()
            )));
        }
        for (v, w) in graph.vertices().iter().zip(&weights) {
            if !w.is_positive() {
                return Err(Error::NonPositiveWeight {
                    vertex: v.clone(),
                    value: rational::format(w),
                });
            }
        }
        Ok(Self { graph, weights })
    }

    pub fn unit(graph: OrthoGraph) -> Self {
        let weights = vec![Rational::one(); graph.num_vertices()];
        Self { graph, weights }
    }

    /// G induced from a parent O(Γ) on the listed ids.
    pub fn induced(parent: &OrthoGraph, ids: &[String], weights: Vec<Rational>) -> Result<Self> {
        let mut members = Vec::with_capacity(ids.len());
        let mut seen = HashSet::new();
        for id in ids {
            if !seen.insert(id) {
                return Err(Error::DuplicateVertexId(id.clone()));
            }
            members.push(
                parent
                    .index_of(id)
                    .ok_or_else(|| Error::UnknownVertex(id.clone()))?,
            );
        }
        Self::new(parent.induced(&members), weights)
    }

    pub fn graph(&self) -> &OrthoGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        Self::new(
            self.graph.clone(),
            self.weights.iter().map(|w| w * factor).collect(),
        )
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(One::is_one)
    }
}

/// Role of a vertex of Γ_G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexRole {
    Event,
    NoDetection,
}

/// Γ_G together with its bookkeeping. Vertex `i < |V(G)|` of the scenario is
/// vertex `i` of G; the no-detection vertex of hyperedge `k` is `|V(G)| + k`.
#[derive(Debug, Clone)]
pub struct GammaG {
    pub scenario: ContextualityScenario,
    pub roles: Vec<VertexRole>,
    pub cliques: Vec<Vec<usize>>,
    pub graph: WeightedGraph,
}

impl GammaG {
    pub fn event_vertices(&self) -> std::ops::Range<usize> {
        0..self.graph.num_vertices()
    }

    pub fn no_detection_vertex(&self, e: usize) -> usize {
        self.graph.num_vertices() + e
    }
}

fn fresh_id(base: String, taken: &HashSet<String>) -> String {
    let mut id = base;
    while taken.contains(&id) {
        id.push('\'');
    }
    id
}

fn no_detection_id(ids: &[String], members: &[usize], taken: &HashSet<String>) -> String {
    let names: Vec<&str> = members.iter().map(|&i| ids[i].as_str()).collect();
    fresh_id(format!("nd:{}", names.join(",")), taken)
}

/// Promotes every maximal clique of G to a hyperedge with its own
/// no-detection vertex.
pub fn build_gamma_g(g: &WeightedGraph) -> Result<GammaG> {
    let cliques = maximal_cliques(g.graph())?;
    let ids = g.graph().vertices();
    let n = ids.len();
    let mut taken: HashSet<String> = ids.iter().cloned().collect();
    let mut vertices = ids.to_vec();
    let mut roles = vec![VertexRole::Event; n];
    let mut hyperedges = Vec::with_capacity(cliques.len());
    for (k, c) in cliques.iter().enumerate() {
        let id = no_detection_id(ids, c, &taken);
        taken.insert(id.clone());
        vertices.push(id);
        roles.push(VertexRole::NoDetection);
        let mut edge = c.clone();
        edge.push(n + k);
        hyperedges.push(edge);
    }
    let scenario = ContextualityScenario::from_indices(vertices, hyperedges)?;
    Ok(GammaG {
        scenario,
        roles,
        cliques,
        graph: g.clone(),
    })
}

/// Γ′ and the cliques C that received an extra vertex. The vertex added for
/// `added_cliques[k]` has index `|V(Γ)| + k`.
#[derive(Debug, Clone)]
pub struct SpeckerExtension {
    pub scenario: ContextualityScenario,
    pub added_cliques: Vec<Vec<usize>>,
    pub original_vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpeckerVerdict {
    Holds,
    Violated { clique: Vec<usize> },
}

impl SpeckerVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SpeckerVerdict::Holds)
    }
}

/// Checks that every maximal clique of O(Γ) lies inside a hyperedge.
pub fn structural_specker_check(s: &ContextualityScenario) -> Result<SpeckerVerdict> {
    let n = s.num_vertices();
    let edges: Vec<FixedBitSet> = s.hyperedges().iter().map(|e| bitset(n, e)).collect();
    for clique in maximal_cliques(&s.orthogonality_graph())? {
        let c = bitset(n, &clique);
        if !edges.iter().any(|e| c.is_subset(e)) {
            return Ok(SpeckerVerdict::Violated { clique });
        }
    }
    Ok(SpeckerVerdict::Holds)
}

/// Builds Γ′: every maximal clique of O(Γ) that is not a hyperedge gains a
/// fresh vertex and becomes a hyperedge. Fails with `SpernerViolation` when
/// such a clique strictly contains an existing hyperedge, since Γ′ would then
/// not be a valid scenario.
pub fn specker_extension(s: &ContextualityScenario) -> Result<SpeckerExtension> {
    let n = s.num_vertices();
    let added: Vec<Vec<usize>> = maximal_cliques(&s.orthogonality_graph())?
        .into_iter()
        .filter(|c| !s.contains_hyperedge(c))
        .collect();
    let mut taken: HashSet<String> = s.vertices().iter().cloned().collect();
    let mut vertices = s.vertices().to_vec();
    let mut hyperedges = s.hyperedges().to_vec();
    for (k, c) in added.iter().enumerate() {
        let id = no_detection_id(s.vertices(), c, &taken);
        taken.insert(id.clone());
        vertices.push(id);
        let mut edge = c.clone();
        edge.push(n + k);
        hyperedges.push(edge);
    }
    Ok(SpeckerExtension {
        scenario: ContextualityScenario::from_indices(vertices, hyperedges)?,
        added_cliques: added,
        original_vertices: n,
    })
}

/// One source setting S_e of Σ_G.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSetting {
    pub events: Vec<String>,
    /// `paired[m]` is the position in `events` of the source event whose
    /// label matches outcome `m` of the paired measurement.
    pub paired: Vec<usize>,
}

/// Σ_G: one source setting per hyperedge of Γ_G plus the two-outcome star
/// setting S_{e*}.
///
/// Each S_e carries one source event per vertex of Γ_G so the counts are
/// |V(Σ_G)| = |V(Γ_G)|·|E(Γ_G)| + 2. Only the events labelled by members of e
/// are paired with measurement outcomes; the others are never prepared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceScenario {
    pub settings: Vec<SourceSetting>,
    pub star: [String; 2],
}

impl SourceScenario {
    pub fn num_events(&self) -> usize {
        self.settings.iter().map(|s| s.events.len()).sum::<usize>() + 2
    }

    pub fn num_settings(&self) -> usize {
        self.settings.len() + 1
    }
}

pub fn build_sigma_g(gamma_g: &ContextualityScenario) -> SourceScenario {
    let settings = gamma_g
        .hyperedges()
        .iter()
        .enumerate()
        .map(|(e, members)| SourceSetting {
            events: gamma_g
                .vertices()
                .iter()
                .map(|v| format!("{v}@S{}", e + 1))
                .collect(),
            paired: members.clone(),
        })
        .collect();
    SourceScenario {
        settings,
        star: ["s*=0".to_string(), "s*=1".to_string()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn minimal_sperner_family_is_valid() {
        let s = ContextualityScenario::new(ids(&["a", "b", "c"]), vec![ids(&["a", "b"]), ids(&["b", "c"])])
            .unwrap();
        assert_eq!(s.num_hyperedges(), 2);
        assert_eq!(s.vertices(), ids(&["a", "b", "c"]).as_slice());
    }

    #[test]
    fn rejects_bad_input() {
        let e = ContextualityScenario::new(
            ids(&["a", "b", "c"]),
            vec![ids(&["a", "b"]), ids(&["a", "b", "c"])],
        )
        .unwrap_err();
        assert!(matches!(e, Error::SpernerViolation { .. }));
        let e = ContextualityScenario::new(ids(&["a", "a"]), vec![ids(&["a"])]).unwrap_err();
        assert_eq!(e, Error::DuplicateVertexId("a".into()));
        let e = ContextualityScenario::new(ids(&["a", "b"]), vec![ids(&["a"])]).unwrap_err();
        assert_eq!(e, Error::DanglingVertex("b".into()));
        let e = ContextualityScenario::new(ids(&["a"]), vec![vec![]]).unwrap_err();
        assert_eq!(e, Error::EmptyHyperedge { index: 0 });
        let e = ContextualityScenario::new(ids(&["a", "b"]), vec![ids(&["a", "b"]), ids(&["b", "a"])])
            .unwrap_err();
        assert!(matches!(e, Error::DuplicateHyperedge(_)));
        let e = ContextualityScenario::new(ids(&["a"]), vec![ids(&["z"])]).unwrap_err();
        assert_eq!(e, Error::UnknownVertex("z".into()));
    }

    #[test]
    fn single_hyperedge_gives_triangle() {
        let s = ContextualityScenario::new(ids(&["a", "b", "c"]), vec![ids(&["a", "b", "c"])]).unwrap();
        let g = s.orthogonality_graph();
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(structural_specker_check(&s).unwrap().holds());
        let ext = specker_extension(&s).unwrap();
        assert_eq!(ext.scenario, s);
    }

    #[test]
    fn gamma_g_of_single_vertex() {
        let g = WeightedGraph::unit(OrthoGraph::new(ids(&["v"]), &[]).unwrap());
        let gg = build_gamma_g(&g).unwrap();
        assert_eq!(gg.scenario.vertices(), ids(&["v", "nd:v"]).as_slice());
        assert_eq!(gg.scenario.hyperedges(), &[vec![0, 1]]);
        let sigma = build_sigma_g(&gg.scenario);
        assert_eq!(sigma.num_events(), 4);
        assert_eq!(sigma.num_settings(), 2);
    }

    #[test]
    fn gamma_g_of_four_cycle() {
        let gg = build_gamma_g(&WeightedGraph::unit(OrthoGraph::cycle(4))).unwrap();
        assert_eq!(gg.scenario.num_vertices(), 8);
        assert_eq!(gg.scenario.num_hyperedges(), 4);
        assert!(gg.scenario.hyperedges().iter().all(|e| e.len() == 3));
        assert!(structural_specker_check(&gg.scenario).unwrap().holds());
        let sigma = build_sigma_g(&gg.scenario);
        assert_eq!(sigma.num_events(), 34);
        assert_eq!(sigma.num_settings(), 5);
    }

    #[test]
    fn weights_must_be_positive() {
        let e = WeightedGraph::new(OrthoGraph::cycle(3), vec![rational::int(1), rational::int(0), rational::int(1)])
            .unwrap_err();
        assert!(matches!(e, Error::NonPositiveWeight { .. }));
    }

    #[test]
    fn induced_subgraph_keeps_parent_edges() {
        let parent = OrthoGraph::cycle(5);
        let g = WeightedGraph::induced(&parent, &ids(&["v1", "v2", "v4"]), vec![rational::one(); 3]).unwrap();
        assert_eq!(g.graph().edges(), vec![(0, 1)]);
    }
}
