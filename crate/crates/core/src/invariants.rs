//! α(G,w), θ(G,w), α*(G,w) and the weighted max-predictability β(Γ_G,q).

use crate::error::{Error, Result};
use crate::models::{extremal_partition, ProbModel};
use crate::rational::{self, serde_text, Rational};
use crate::scenario::{build_gamma_g, maximal_cliques, ContextualityScenario, GammaG, WeightedGraph};
use crate::solvers::{lp_solve, sdp, sdp_solve, DenseSdp, RationalLP, Sense};
use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// Graphs below this size are searched exhaustively for α.
pub const EXHAUSTIVE_BELOW: usize = 20;
pub const GRAPH_LIMIT: usize = 64;
/// Reported accuracy of θ.
pub const THETA_TOLERANCE: f64 = 1e-6;

fn guard(g: &WeightedGraph) -> Result<()> {
    if g.num_vertices() > GRAPH_LIMIT {
        return Err(Error::TooLarge {
            what: "graph",
            size: g.num_vertices(),
            limit: GRAPH_LIMIT,
        });
    }
    Ok(())
}

fn masks(g: &WeightedGraph) -> Vec<u64> {
    (0..g.num_vertices())
        .map(|v| g.graph().neighbours(v).fold(0u64, |m, u| m | (1 << u)))
        .collect()
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Maximum weight of an independent set, with a maximizing set.
pub fn independence_number(g: &WeightedGraph) -> Result<(Rational, Vec<usize>)> {
    guard(g)?;
    let adj = masks(g);
    let w = g.weights();
    let n = g.num_vertices();
    if n < EXHAUSTIVE_BELOW {
        let mut best = (Rational::zero(), Vec::new());
        for mask in 0u64..(1 << n) {
            let set = members(mask);
            if set.iter().any(|&v| adj[v] & mask != 0) {
                continue;
            }
            let weight = set.iter().fold(Rational::zero(), |acc, &v| acc + &w[v]);
            if weight > best.0 || (weight == best.0 && set < best.1) {
                best = (weight, set);
            }
        }
        return Ok(best);
    }
    let mut best = (Rational::zero(), 0u64);
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    branch(&adj, w, 0, Rational::zero(), all, &mut best);
    Ok((best.0, members(best.1)))
}

/// Upper bound on the weight addable from `candidates`: greedily partition
/// them into cliques and take the heaviest vertex of each.
fn clique_cover_bound(adj: &[u64], w: &[Rational], mut candidates: u64) -> Rational {
    let mut bound = Rational::zero();
    while candidates != 0 {
        let first = candidates.trailing_zeros() as usize;
        let mut clique = 1u64 << first;
        let mut heaviest = w[first].clone();
        let mut open = candidates & adj[first];
        while open != 0 {
            let v = open.trailing_zeros() as usize;
            clique |= 1 << v;
            if w[v] > heaviest {
                heaviest = w[v].clone();
            }
            open &= adj[v];
        }
        candidates &= !clique;
        bound += heaviest;
    }
    bound
}

fn branch(adj: &[u64], w: &[Rational], chosen: u64, weight: Rational, candidates: u64, best: &mut (Rational, u64)) {
    if candidates == 0 {
        if weight > best.0 {
            *best = (weight, chosen);
        }
        return;
    }
    if &weight + clique_cover_bound(adj, w, candidates) <= best.0 {
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let bit = 1u64 << v;
    branch(adj, w, chosen | bit, &weight + &w[v], candidates & !bit & !adj[v], best);
    branch(adj, w, chosen, weight, candidates & !bit, best);
}

/// Weighted Lovász θ from its SDP; returns the primal solution as well.
pub fn lovasz_theta_sdp(g: &WeightedGraph) -> Result<sdp::SdpSolution> {
    guard(g)?;
    let n = g.num_vertices();
    let w: Vec<f64> = g.weights().iter().map(rational::to_f64).collect();
    let objective = DMatrix::from_fn(n, n, |i, j| (w[i] * w[j]).sqrt());
    let mut constraints = vec![(DMatrix::identity(n, n), 1.0)];
    for (a, b) in g.graph().edges() {
        let mut e = DMatrix::zeros(n, n);
        e[(a, b)] = std::f64::consts::FRAC_1_SQRT_2;
        e[(b, a)] = std::f64::consts::FRAC_1_SQRT_2;
        constraints.push((e, 0.0));
    }
    sdp_solve(
        &DenseSdp {
            objective,
            constraints,
        },
        Sense::Max,
    )
}

pub fn lovasz_theta(g: &WeightedGraph) -> Result<f64> {
    Ok(lovasz_theta_sdp(g)?.primal_value)
}

/// α*(G,w): the LP over the maximal-clique constraints.
pub fn fractional_packing(g: &WeightedGraph) -> Result<(Rational, Vec<Rational>)> {
    guard(g)?;
    let n = g.num_vertices();
    let mut lp = RationalLP::new(n);
    lp.objective = g.weights().to_vec();
    for c in maximal_cliques(g.graph())? {
        let mut row = vec![Rational::zero(); n];
        for v in c {
            row[v] = Rational::one();
        }
        lp.add_le(row, Rational::one());
    }
    let sol = lp_solve(&lp, Sense::Max)?;
    Ok((sol.value, sol.x))
}

/// ζ(M_e, p) = max over v ∈ e of p(v).
pub fn zeta(s: &ContextualityScenario, e: usize, p: &ProbModel) -> Rational {
    s.hyperedges()[e]
        .iter()
        .map(|&v| p.get(v).clone())
        .max()
        .unwrap_or_else(Rational::zero)
}

pub fn uniform_q(s: &ContextualityScenario) -> Vec<Rational> {
    let m = s.num_hyperedges() as i64;
    vec![rational::ratio(1, m); s.num_hyperedges()]
}

pub fn check_distribution(s: &ContextualityScenario, q: &[Rational]) -> Result<()> {
    if q.len() != s.num_hyperedges() {
        return Err(Error::InvalidDistribution(format!(
            "{} weights for {} hyperedges",
            q.len(),
            s.num_hyperedges()
        )));
    }
    if q.iter().any(Signed::is_negative) {
        return Err(Error::InvalidDistribution("negative weight".into()));
    }
    let total = q.iter().fold(Rational::zero(), |a, x| a + x);
    if !total.is_one() {
        return Err(Error::InvalidDistribution(format!(
            "weights sum to {}",
            rational::format(&total)
        )));
    }
    Ok(())
}

/// `Σ_e q_e ζ(M_e, p)`.
pub fn predictability(s: &ContextualityScenario, q: &[Rational], p: &ProbModel) -> Rational {
    q.iter()
        .enumerate()
        .filter(|(_, qe)| !qe.is_zero())
        .fold(Rational::zero(), |acc, (e, qe)| acc + qe * zeta(s, e, p))
}

/// β over a given Λ_ind; ties go to the lexicographically smallest vertex.
pub fn beta_over(
    s: &ContextualityScenario,
    q: &[Rational],
    indeterministic: &[ProbModel],
) -> Result<(Rational, ProbModel)> {
    check_distribution(s, q)?;
    let mut best: Option<(Rational, &ProbModel)> = None;
    for p in indeterministic {
        let value = predictability(s, q, p);
        let better = match &best {
            None => true,
            Some((b, m)) => value > *b || (value == *b && p < *m),
        };
        if better {
            best = Some((value, p));
        }
    }
    best.map(|(v, p)| (v, p.clone()))
        .ok_or(Error::NoIndeterministicVertices)
}

/// β(Γ_G, q), enumerating Λ_ind first.
pub fn weighted_max_predictability(
    gamma_g: &ContextualityScenario,
    q: &[Rational],
) -> Result<(Rational, ProbModel)> {
    check_distribution(gamma_g, q)?;
    let ext = extremal_partition(gamma_g)?;
    beta_over(gamma_g, q, &ext.indeterministic)
}

/// The q minimizing β, from the epigraph LP `min t` subject to
/// `Σ_e q_e ζ(M_e,p) ≤ t` for every p ∈ Λ_ind.
pub fn optimal_q_over(
    s: &ContextualityScenario,
    indeterministic: &[ProbModel],
) -> Result<(Vec<Rational>, Rational)> {
    if indeterministic.is_empty() {
        return Err(Error::NoIndeterministicVertices);
    }
    let m = s.num_hyperedges();
    let mut lp = RationalLP::new(m + 1);
    lp.objective[m] = Rational::one();
    lp.set_bounds(m, None, None);
    let mut total = vec![Rational::one(); m + 1];
    total[m] = Rational::zero();
    lp.add_eq(total, Rational::one());
    for p in indeterministic {
        let mut row: Vec<Rational> = (0..m).map(|e| zeta(s, e, p)).collect();
        row.push(-Rational::one());
        lp.add_le(row, Rational::zero());
    }
    let sol = lp_solve(&lp, Sense::Min)?;
    Ok((sol.x[..m].to_vec(), sol.value))
}

pub fn optimal_q(gamma_g: &ContextualityScenario) -> Result<(Vec<Rational>, Rational)> {
    let ext = extremal_partition(gamma_g)?;
    optimal_q_over(gamma_g, &ext.indeterministic)
}

/// How q is chosen for β.
#[derive(Debug, Clone, PartialEq)]
pub enum QChoice {
    Uniform,
    Given(Vec<Rational>),
    Optimal,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantBundle {
    #[serde(serialize_with = "serde_text::one")]
    pub alpha: Rational,
    pub alpha_witness: Vec<String>,
    pub theta: f64,
    pub theta_tolerance: f64,
    #[serde(serialize_with = "serde_text::one")]
    pub alpha_star: Rational,
    /// `None` when Λ_ind is empty and β is undefined.
    #[serde(serialize_with = "serde_text::option")]
    pub beta: Option<Rational>,
    pub beta_vertex: Option<BTreeMap<String, String>>,
    #[serde(serialize_with = "serde_text::many")]
    pub q_used: Vec<Rational>,
    /// Vertex counts of G(Γ_G); `None` when Γ_G is past the enumeration guard.
    pub indeterministic_vertices: Option<usize>,
    pub deterministic_vertices: Option<usize>,
    pub notes: Vec<String>,
}

impl InvariantBundle {
    /// The sandwich α ≤ θ ≤ α* within the SDP tolerance.
    pub fn sandwich_holds(&self) -> bool {
        let a = rational::to_f64(&self.alpha);
        let s = rational::to_f64(&self.alpha_star);
        a <= self.theta + self.theta_tolerance && self.theta <= s + self.theta_tolerance
    }
}

/// Builds Γ_G from `g` and computes every invariant.
pub fn compute_invariants(g: &WeightedGraph, q: &QChoice) -> Result<(GammaG, InvariantBundle)> {
    let gamma_g = build_gamma_g(g)?;
    let bundle = invariants_for(&gamma_g, q)?;
    Ok((gamma_g, bundle))
}

pub fn invariants_for(gamma_g: &GammaG, q: &QChoice) -> Result<InvariantBundle> {
    let g = &gamma_g.graph;
    let s = &gamma_g.scenario;
    let (alpha, witness) = independence_number(g)?;
    let theta = lovasz_theta(g)?;
    let (alpha_star, _) = fractional_packing(g)?;
    let mut notes = Vec::new();
    let ext = match extremal_partition(s) {
        Ok(ext) => Some(ext),
        Err(Error::TooLarge { what, size, limit }) => {
            notes.push(format!("beta unavailable: {what} of size {size} exceeds {limit}"));
            None
        }
        Err(e) => return Err(e),
    };
    let q_used = match q {
        QChoice::Uniform => uniform_q(s),
        QChoice::Given(q) => {
            check_distribution(s, q)?;
            q.clone()
        }
        QChoice::Optimal => match &ext {
            Some(ext) if !ext.indeterministic.is_empty() => optimal_q_over(s, &ext.indeterministic)?.0,
            _ => uniform_q(s),
        },
    };
    let (beta, beta_vertex) = match ext.as_ref().map(|ext| beta_over(s, &q_used, &ext.indeterministic)) {
        None => (None, None),
        Some(Ok((b, p))) => (Some(b), Some(p.to_map(s))),
        Some(Err(Error::NoIndeterministicVertices)) => {
            notes.push("no indeterministic extremal models: beta undefined".to_string());
            (None, None)
        }
        Some(Err(e)) => return Err(e),
    };
    if beta.as_ref().is_some_and(Zero::is_zero) {
        notes.push("beta = 0 for this q".to_string());
    }
    Ok(InvariantBundle {
        alpha,
        alpha_witness: witness.iter().map(|&v| g.graph().vertices()[v].clone()).collect(),
        theta,
        theta_tolerance: THETA_TOLERANCE,
        alpha_star,
        beta,
        beta_vertex,
        q_used,
        indeterministic_vertices: ext.as_ref().map(|e| e.indeterministic.len()),
        deterministic_vertices: ext.as_ref().map(|e| e.deterministic.len()),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::scenario::{library, OrthoGraph};

    #[test]
    fn pentagon() {
        let g = library::kcbs_g();
        assert_eq!(independence_number(&g).unwrap(), (int(2), vec![0, 2]));
        assert_eq!(fractional_packing(&g).unwrap().0, ratio(5, 2));
        assert!((lovasz_theta(&g).unwrap() - 5f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn complete_and_edgeless() {
        let k3 = WeightedGraph::unit(OrthoGraph::complete(3));
        assert_eq!(independence_number(&k3).unwrap().0, int(1));
        assert_eq!(fractional_packing(&k3).unwrap().0, int(1));
        assert!((lovasz_theta(&k3).unwrap() - 1.0).abs() < 1e-5);
        let ids: Vec<String> = (0..6).map(|i| format!("x{i}")).collect();
        let empty = WeightedGraph::unit(OrthoGraph::new(ids, &[]).unwrap());
        assert_eq!(independence_number(&empty).unwrap().0, int(6));
    }

    #[test]
    fn branch_and_bound_matches_formula_on_long_cycles() {
        for n in [20, 21, 25] {
            let g = WeightedGraph::unit(OrthoGraph::cycle(n));
            let (a, set) = independence_number(&g).unwrap();
            assert_eq!(a, int((n / 2) as i64));
            assert!(g.graph().is_independent(&set));
        }
    }

    #[test]
    fn beta_on_kcbs() {
        let gg = library::kcbs_gamma_g();
        let s = &gg.scenario;
        let (b, p) = weighted_max_predictability(s, &uniform_q(s)).unwrap();
        assert_eq!(b, ratio(1, 2));
        assert!((0..5).all(|v| *p.get(v) == ratio(1, 2)));
        let q = vec![int(1), int(0), int(0), int(0), int(0)];
        assert_eq!(weighted_max_predictability(s, &q).unwrap().0, ratio(1, 2));
        let (_, v) = optimal_q(s).unwrap();
        assert_eq!(v, ratio(1, 2));
    }

    #[test]
    fn beta_undefined_without_indeterministic_vertices() {
        let s = ContextualityScenario::new(vec!["a".into(), "b".into()], vec![vec!["a".into(), "b".into()]]).unwrap();
        assert_eq!(
            weighted_max_predictability(&s, &[int(1)]),
            Err(Error::NoIndeterministicVertices)
        );
    }

    #[test]
    fn bad_q_is_rejected() {
        let gg = library::kcbs_gamma_g();
        let q = vec![ratio(1, 2); 5];
        assert!(matches!(
            weighted_max_predictability(&gg.scenario, &q),
            Err(Error::InvalidDistribution(_))
        ));
    }
}
