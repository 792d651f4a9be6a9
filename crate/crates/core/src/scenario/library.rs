//! Built-in scenarios: the KCBS family, cycles, the 18-ray set and its
//! 27-vertex extension, and the 4-cycle.

use super::{
    build_gamma_g, maximal_cliques, ContextualityScenario, GammaG, OrthoGraph, WeightedGraph,
};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use std::fmt;
use std::str::FromStr;

const CEGA_BASES: &str = include_str!("../../data/cega18.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LibraryName {
    KcbsGamma,
    KcbsG,
    KcbsGammaG,
    NCycle(usize),
    Cega18,
    Cega27,
    Chsh4Cycle,
}

impl LibraryName {
    pub const FIXED: [LibraryName; 6] = [
        LibraryName::KcbsGamma,
        LibraryName::KcbsG,
        LibraryName::KcbsGammaG,
        LibraryName::Cega18,
        LibraryName::Cega27,
        LibraryName::Chsh4Cycle,
    ];
}

impl FromStr for LibraryName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let name = match s {
            "kcbs_gamma" => LibraryName::KcbsGamma,
            "kcbs_g" => LibraryName::KcbsG,
            "kcbs_gamma_g" => LibraryName::KcbsGammaG,
            "cega_18" => LibraryName::Cega18,
            "cega_27" => LibraryName::Cega27,
            "chsh_4cycle" => LibraryName::Chsh4Cycle,
            _ => {
                let n = s
                    .strip_prefix("n_cycle(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| s.strip_prefix("n_cycle:"))
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 3)
                    .ok_or_else(|| Error::UnknownName(s.to_string()))?;
                LibraryName::NCycle(n)
            }
        };
        Ok(name)
    }
}

impl fmt::Display for LibraryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LibraryName::KcbsGamma => f.write_str("kcbs_gamma"),
            LibraryName::KcbsG => f.write_str("kcbs_g"),
            LibraryName::KcbsGammaG => f.write_str("kcbs_gamma_g"),
            LibraryName::NCycle(n) => write!(f, "n_cycle({n})"),
            LibraryName::Cega18 => f.write_str("cega_18"),
            LibraryName::Cega27 => f.write_str("cega_27"),
            LibraryName::Chsh4Cycle => f.write_str("chsh_4cycle"),
        }
    }
}

/// A library scenario and, where one is attached, the weighted graph G.
#[derive(Debug, Clone)]
pub struct LibraryItem {
    pub scenario: ContextualityScenario,
    pub graph: Option<WeightedGraph>,
}

pub fn library_scenario(name: LibraryName) -> Result<LibraryItem> {
    let item = match name {
        LibraryName::KcbsGamma | LibraryName::KcbsG => LibraryItem {
            scenario: kcbs_gamma(),
            graph: Some(kcbs_g()),
        },
        LibraryName::KcbsGammaG => {
            let gg = kcbs_gamma_g();
            LibraryItem {
                scenario: gg.scenario,
                graph: Some(gg.graph),
            }
        }
        LibraryName::NCycle(n) => {
            let (scenario, graph) = n_cycle(n);
            LibraryItem {
                scenario,
                graph: Some(graph),
            }
        }
        LibraryName::Cega18 => {
            let scenario = cega_18();
            let graph = WeightedGraph::unit(scenario.orthogonality_graph());
            LibraryItem {
                scenario,
                graph: Some(graph),
            }
        }
        LibraryName::Cega27 => {
            let scenario = cega_27();
            let ids = scenario.vertices()[..18].to_vec();
            let graph = WeightedGraph::induced(
                &scenario.orthogonality_graph(),
                &ids,
                vec![rational::int(2); 18],
            )?;
            LibraryItem {
                scenario,
                graph: Some(graph),
            }
        }
        LibraryName::Chsh4Cycle => {
            let gg = chsh_4cycle();
            LibraryItem {
                scenario: gg.scenario,
                graph: Some(gg.graph),
            }
        }
    };
    Ok(item)
}

fn next(i: usize) -> usize {
    i % 5 + 1
}

fn prev(i: usize) -> usize {
    (i + 3) % 5 + 1
}

/// Id of outcome `ab` (values of m_i, m_{i+1}) of the joint measurement
/// M_{i,i+1}. The outcome `10` is the KCBS event `v{i}`.
fn kcbs_outcome(i: usize, ab: &str) -> String {
    if ab == "10" {
        format!("v{i}")
    } else {
        format!("M{i}{}:{ab}", next(i))
    }
}

/// The 20-event KCBS scenario: five 4-outcome joint measurements M_{i,i+1}
/// plus, for each i, the coarse-graining hyperedge stating that
/// [m_i = 0 | M_{i-1,i}] and [m_i = 1 | M_{i,i+1}] are exclusive and
/// exhaustive.
pub fn kcbs_gamma() -> ContextualityScenario {
    let mut vertices: Vec<String> = (1..=5).map(|i| format!("v{i}")).collect();
    for i in 1..=5 {
        for ab in ["00", "01", "11"] {
            vertices.push(kcbs_outcome(i, ab));
        }
    }
    let mut hyperedges = Vec::new();
    for i in 1..=5 {
        hyperedges.push(
            ["00", "01", "10", "11"]
                .iter()
                .map(|ab| kcbs_outcome(i, ab))
                .collect(),
        );
    }
    for j in 1..=5 {
        let p = prev(j);
        hyperedges.push(vec![
            kcbs_outcome(p, "00"),
            kcbs_outcome(p, "10"),
            kcbs_outcome(j, "10"),
            kcbs_outcome(j, "11"),
        ]);
    }
    ContextualityScenario::new(vertices, hyperedges).expect("KCBS scenario is valid")
}

/// The unweighted 5-cycle on the events v1..v5 of [`kcbs_gamma`].
pub fn kcbs_g() -> WeightedGraph {
    let ids: Vec<String> = (1..=5).map(|i| format!("v{i}")).collect();
    WeightedGraph::induced(
        &kcbs_gamma().orthogonality_graph(),
        &ids,
        vec![Rational::from_integer(1.into()); 5],
    )
    .expect("v1..v5 are KCBS events")
}

pub fn kcbs_gamma_g() -> GammaG {
    build_gamma_g(&kcbs_g()).expect("C5 is within the clique guard")
}

/// The n-cycle as a hypergraph of two-element hyperedges, with the cycle as
/// unit-weight graph.
pub fn n_cycle(n: usize) -> (ContextualityScenario, WeightedGraph) {
    let graph = OrthoGraph::cycle(n);
    let hyperedges = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    let scenario = ContextualityScenario::from_indices(graph.vertices().to_vec(), hyperedges)
        .expect("cycle hypergraph is valid");
    (scenario, WeightedGraph::unit(graph))
}

/// Γ_G for the unweighted 4-cycle.
pub fn chsh_4cycle() -> GammaG {
    build_gamma_g(&WeightedGraph::unit(OrthoGraph::cycle(4))).expect("C4 is small")
}

fn cega_bases() -> Vec<Vec<String>> {
    CEGA_BASES
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect()
}

/// Decodes a ray id such as `"+-0+"` into its integer coordinates.
pub fn cega_ray(id: &str) -> Option<[i32; 4]> {
    let mut out = [0; 4];
    if id.chars().count() != 4 {
        return None;
    }
    for (slot, c) in out.iter_mut().zip(id.chars()) {
        *slot = match c {
            '0' => 0,
            '+' => 1,
            '-' => -1,
            _ => return None,
        };
    }
    Some(out)
}

/// The KS-uncolourable 18-ray, 9-basis hypergraph.
pub fn cega_18() -> ContextualityScenario {
    let bases = cega_bases();
    let mut vertices: Vec<String> = Vec::new();
    for id in bases.iter().flatten() {
        if !vertices.contains(id) {
            vertices.push(id.clone());
        }
    }
    ContextualityScenario::new(vertices, bases).expect("embedded bases are valid")
}

/// [`cega_18`] with one no-detection vertex added to every hyperedge.
pub fn cega_27() -> ContextualityScenario {
    let base = cega_18();
    let mut vertices = base.vertices().to_vec();
    let mut hyperedges = Vec::new();
    for (k, e) in base.hyperedges().iter().enumerate() {
        vertices.push(format!("nd:{}", base.ids(e).join(",")));
        let mut edge = e.clone();
        edge.push(18 + k);
        hyperedges.push(edge);
    }
    ContextualityScenario::from_indices(vertices, hyperedges).expect("extension is valid")
}

/// The triangle Γ₃: the first maximal clique of O(Γ₁₈) that is not a
/// hyperedge. Indices refer to the first 18 vertices of either scenario.
pub fn gamma_3() -> Vec<usize> {
    let s = cega_18();
    maximal_cliques(&s.orthogonality_graph())
        .expect("18 vertices")
        .into_iter()
        .find(|c| !s.contains_hyperedge(c))
        .expect("O(Γ18) has non-hyperedge cliques")
}

/// Weights of the three Bell-KS expressions on the vertices of [`cega_27`].
///
/// `Expr₁` counts every ray once per basis it belongs to (weight 2), `Expr₂`
/// is the Γ₃ triangle sum and `Expr₃ = Expr₁ + Expr₂`.
pub fn cega_expression(k: usize) -> Result<Vec<Rational>> {
    if !(1..=3).contains(&k) {
        return Err(Error::UnknownName(format!("Expr{k}")));
    }
    let mut w = vec![rational::zero(); 27];
    if k != 2 {
        for x in w.iter_mut().take(18) {
            *x += rational::int(2);
        }
    }
    if k != 1 {
        for v in gamma_3() {
            w[v] += rational::one();
        }
    }
    Ok(w)
}
