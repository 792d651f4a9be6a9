//! Probabilistic models on a scenario and the classes C ⊆ CE¹ ⊆ G.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::scenario::{maximal_cliques, ContextualityScenario, SpeckerExtension};
use crate::solvers::{enumerate_vertices, lp_solve, HRepPolytope, RationalLP, Sense};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Deserialize;
use std::collections::{BTreeMap, HashMap};

/// Vertex-count guard for the deterministic-assignment search.
pub const DETERMINISTIC_LIMIT: usize = 64;

/// Probabilities indexed like the vertices of the scenario they live on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProbModel {
    values: Vec<Rational>,
}

impl ProbModel {
    /// Validates values given in vertex order.
    pub fn new(s: &ContextualityScenario, values: Vec<Rational>) -> Result<Self> {
        if values.len() != s.num_vertices() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {} vertices",
                values.len(),
                s.num_vertices()
            )));
        }
        for (v, p) in values.iter().enumerate() {
            if p.is_negative() {
                return Err(Error::NegativeProbability {
                    vertex: s.id(v).to_string(),
                    value: rational::format(p),
                });
            }
        }
        for (e, members) in s.hyperedges().iter().enumerate() {
            let sum = members
                .iter()
                .fold(Rational::zero(), |acc, &v| acc + &values[v]);
            if !sum.is_one() {
                return Err(Error::NormalizationFailure {
                    hyperedge: s.hyperedge_ids(e),
                    sum: rational::format(&sum),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, v: usize) -> &Rational {
        &self.values[v]
    }

    pub fn is_deterministic(&self) -> bool {
        self.values.iter().all(|p| p.is_zero() || p.is_one())
    }

    pub fn to_map(&self, s: &ContextualityScenario) -> BTreeMap<String, String> {
        s.vertices()
            .iter()
            .zip(&self.values)
            .map(|(v, p)| (v.clone(), rational::format(p)))
            .collect()
    }

    /// `Σ_v w_v p(v)`.
    pub fn weighted_sum(&self, weights: &[Rational]) -> Rational {
        crate::solvers::lp::dot(weights, &self.values)
    }
}

/// Validates an id → probability assignment against `s`.
pub fn check_model(
    s: &ContextualityScenario,
    raw: &HashMap<String, Rational>,
) -> Result<ProbModel> {
    for id in raw.keys() {
        if s.index_of(id).is_none() {
            return Err(Error::UnknownVertex(id.clone()));
        }
    }
    let values = s
        .vertices()
        .iter()
        .map(|v| {
            raw.get(v)
                .cloned()
                .ok_or_else(|| Error::MissingProbability(v.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    ProbModel::new(s, values)
}

/// Model JSON: `{"scenario": "<name-or-path>", "probabilities": {"v": "p/q"}}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub scenario: String,
    pub probabilities: BTreeMap<String, serde_json::Value>,
}

impl ModelJson {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn into_model(self, s: &ContextualityScenario) -> Result<ProbModel> {
        let raw = self
            .probabilities
            .iter()
            .map(|(k, v)| Ok((k.clone(), crate::scenario::io::rational_value(v)?)))
            .collect::<Result<HashMap<_, _>>>()?;
        check_model(s, &raw)
    }
}

/// G(Γ) as an H-polytope: hyperedge sums equal 1, probabilities nonnegative.
pub fn general_polytope(s: &ContextualityScenario) -> HRepPolytope {
    let n = s.num_vertices();
    let mut p = HRepPolytope::new(n).with_nonnegativity();
    for e in s.hyperedges() {
        p.eq.push((indicator(n, e), Rational::one()));
    }
    p
}

fn indicator(n: usize, members: &[usize]) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); n];
    for &v in members {
        row[v] = Rational::one();
    }
    row
}

/// Every extremal point of G(Γ), sorted.
pub fn extremal_models(s: &ContextualityScenario) -> Result<Vec<ProbModel>> {
    Ok(enumerate_vertices(&general_polytope(s))?
        .into_iter()
        .map(|values| ProbModel { values })
        .collect())
}

/// The partition of extremal models into Λ_det and Λ_ind.
#[derive(Debug, Clone, Default)]
pub struct Extremal {
    pub deterministic: Vec<ProbModel>,
    pub indeterministic: Vec<ProbModel>,
}

pub fn classify_extremal(vertices: &[ProbModel]) -> Extremal {
    let (deterministic, indeterministic) =
        vertices.iter().cloned().partition(ProbModel::is_deterministic);
    Extremal {
        deterministic,
        indeterministic,
    }
}

/// Λ_det and Λ_ind of `s`, via vertex enumeration.
pub fn extremal_partition(s: &ContextualityScenario) -> Result<Extremal> {
    Ok(classify_extremal(&extremal_models(s)?))
}

fn check_search_size(s: &ContextualityScenario) -> Result<()> {
    if s.num_vertices() > DETERMINISTIC_LIMIT {
        return Err(Error::TooLarge {
            what: "deterministic model search",
            size: s.num_vertices(),
            limit: DETERMINISTIC_LIMIT,
        });
    }
    Ok(())
}

/// Backtracking over 0/1 assignments with exactly one 1 per hyperedge.
/// `limit` stops the search after that many models.
fn deterministic_search(s: &ContextualityScenario, limit: usize) -> Vec<ProbModel> {
    let n = s.num_vertices();
    let incident: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            (0..s.num_hyperedges())
                .filter(|&e| s.hyperedges()[e].contains(&v))
                .collect()
        })
        .collect();

    struct State<'a> {
        s: &'a ContextualityScenario,
        incident: &'a [Vec<usize>],
        covered: Vec<bool>,
        blocked: Vec<u32>,
        chosen: Vec<usize>,
        out: Vec<ProbModel>,
        limit: usize,
    }

    fn go(st: &mut State) {
        if st.out.len() >= st.limit {
            return;
        }
        // uncovered hyperedge with the fewest free vertices
        let mut best: Option<(usize, usize)> = None;
        for (e, members) in st.s.hyperedges().iter().enumerate() {
            if st.covered[e] {
                continue;
            }
            let free = members.iter().filter(|&&v| st.blocked[v] == 0).count();
            if best.is_none_or(|(_, f)| free < f) {
                best = Some((e, free));
            }
        }
        let Some((e, free)) = best else {
            let mut values = vec![Rational::zero(); st.s.num_vertices()];
            for &v in &st.chosen {
                values[v] = Rational::one();
            }
            st.out.push(ProbModel { values });
            return;
        };
        if free == 0 {
            return;
        }
        let candidates: Vec<usize> = st.s.hyperedges()[e]
            .iter()
            .copied()
            .filter(|&v| st.blocked[v] == 0)
            .collect();
        for v in candidates {
            // choosing v covers its hyperedges and blocks all their members
            let edges = st.incident[v].clone();
            for &f in &edges {
                st.covered[f] = true;
                for &u in &st.s.hyperedges()[f] {
                    st.blocked[u] += 1;
                }
            }
            st.chosen.push(v);
            go(st);
            st.chosen.pop();
            for &f in &edges {
                st.covered[f] = false;
                for &u in &st.s.hyperedges()[f] {
                    st.blocked[u] -= 1;
                }
            }
        }
    }

    let mut st = State {
        s,
        incident: &incident,
        covered: vec![false; s.num_hyperedges()],
        blocked: vec![0; n],
        chosen: Vec::new(),
        out: Vec::new(),
        limit,
    };
    go(&mut st);
    let mut out = st.out;
    out.sort();
    out.dedup();
    out
}

/// Λ_det: all deterministic models, sorted.
pub fn deterministic_models(s: &ContextualityScenario) -> Result<Vec<ProbModel>> {
    check_search_size(s)?;
    Ok(deterministic_search(s, usize::MAX))
}

/// One deterministic model if Γ is KS-colourable.
pub fn ks_colourable(s: &ContextualityScenario) -> Result<Option<ProbModel>> {
    check_search_size(s)?;
    Ok(deterministic_search(s, 1).into_iter().next())
}

/// Outcome of a C(Γ) membership test.
#[derive(Debug, Clone, PartialEq)]
pub enum Classical {
    /// Convex weights on indices into the deterministic list.
    Member { weights: Vec<(usize, Rational)> },
    /// Exact L1 distance from the model to C(Γ); positive.
    Outside { distance: Rational },
    /// Γ is KS-uncolourable.
    EmptyClass,
}

impl Classical {
    pub fn is_member(&self) -> bool {
        matches!(self, Classical::Member { .. })
    }
}

/// Decides `m ∈ C(Γ)` by minimizing the L1 distance to the convex hull of
/// `dets`. Zero distance yields the convex weights; a positive distance is
/// the certificate of exclusion.
pub fn in_classical(
    s: &ContextualityScenario,
    m: &ProbModel,
    dets: &[ProbModel],
) -> Result<Classical> {
    if dets.is_empty() {
        return Ok(Classical::EmptyClass);
    }
    let n = s.num_vertices();
    let k = dets.len();
    // variables: λ (k), s⁺ (n), s⁻ (n)
    let mut lp = RationalLP::new(k + 2 * n);
    for i in k..k + 2 * n {
        lp.objective[i] = Rational::one();
    }
    let mut total = vec![Rational::zero(); k + 2 * n];
    for t in total.iter_mut().take(k) {
        *t = Rational::one();
    }
    lp.add_eq(total, Rational::one());
    for v in 0..n {
        let mut row = vec![Rational::zero(); k + 2 * n];
        for (j, d) in dets.iter().enumerate() {
            row[j] = d.values[v].clone();
        }
        row[k + v] = Rational::one();
        row[k + n + v] = -Rational::one();
        lp.add_eq(row, m.values[v].clone());
    }
    let sol = lp_solve(&lp, Sense::Min)?;
    if sol.value.is_zero() {
        let weights = sol.x[..k]
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(j, w)| (j, w.clone()))
            .collect();
        Ok(Classical::Member { weights })
    } else {
        Ok(Classical::Outside {
            distance: sol.value,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueViolation {
    pub clique: Vec<usize>,
    pub sum: Rational,
}

/// The first maximal clique of O(Γ) whose probability sum exceeds 1.
pub fn ce1_violation(s: &ContextualityScenario, m: &ProbModel) -> Result<Option<CliqueViolation>> {
    for clique in maximal_cliques(&s.orthogonality_graph())? {
        let sum = clique
            .iter()
            .fold(Rational::zero(), |acc, &v| acc + &m.values[v]);
        if sum > Rational::one() {
            return Ok(Some(CliqueViolation { clique, sum }));
        }
    }
    Ok(None)
}

pub fn in_ce1(s: &ContextualityScenario, m: &ProbModel) -> Result<bool> {
    Ok(ce1_violation(s, m)?.is_none())
}

/// CE¹(Γ) as an H-polytope: G(Γ) plus one row per maximal clique.
pub fn ce1_polytope(s: &ContextualityScenario) -> Result<HRepPolytope> {
    let n = s.num_vertices();
    let mut p = general_polytope(s);
    for c in maximal_cliques(&s.orthogonality_graph())? {
        if !s.contains_hyperedge(&c) {
            p.le.push((indicator(n, &c), Rational::one()));
        }
    }
    Ok(p)
}

/// Flags of the class hierarchy for one model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ModelClass {
    pub deterministic_extremal: bool,
    pub indeterministic_extremal: bool,
    pub classical: bool,
    pub consistent_exclusivity: bool,
    pub general: bool,
}

/// Rank of a set of rational column vectors.
fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            if !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                for j in c..width {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// True when `m` is a vertex of G(Γ): the hyperedge incidence columns on its
/// support are linearly independent.
pub fn is_extremal(s: &ContextualityScenario, m: &ProbModel) -> bool {
    let support: Vec<usize> = (0..s.num_vertices())
        .filter(|&v| !m.values[v].is_zero())
        .collect();
    let columns: Vec<Vec<Rational>> = support
        .iter()
        .map(|&v| {
            s.hyperedges()
                .iter()
                .map(|e| {
                    if e.contains(&v) {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    rank(columns) == support.len()
}

pub fn classify_model(
    s: &ContextualityScenario,
    m: &ProbModel,
    dets: &[ProbModel],
) -> Result<ModelClass> {
    let extremal = is_extremal(s, m);
    let deterministic = m.is_deterministic();
    Ok(ModelClass {
        deterministic_extremal: extremal && deterministic,
        indeterministic_extremal: extremal && !deterministic,
        classical: in_classical(s, m, dets)?.is_member(),
        consistent_exclusivity: in_ce1(s, m)?,
        general: true,
    })
}

/// Maps `m ∈ CE¹(Γ)` to G(Γ′) by giving each added vertex the missing mass
/// of its clique.
pub fn ce1_forward(ext: &SpeckerExtension, s: &ContextualityScenario, m: &ProbModel) -> Result<ProbModel> {
    if let Some(v) = ce1_violation(s, m)? {
        return Err(Error::NotInCE1 {
            clique: s.ids(&v.clique),
            sum: rational::format(&v.sum),
        });
    }
    let mut values = m.values.clone();
    for c in &ext.added_cliques {
        let sum = c.iter().fold(Rational::zero(), |acc, &v| acc + &m.values[v]);
        values.push(Rational::one() - sum);
    }
    ProbModel::new(&ext.scenario, values)
}

/// Restricts a model on Γ′ to the vertices of Γ.
pub fn ce1_back(ext: &SpeckerExtension, s: &ContextualityScenario, m: &ProbModel) -> Result<ProbModel> {
    ProbModel::new(s, m.values[..ext.original_vertices].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ModelSet {
    #[serde(rename = "C")]
    Classical,
    #[serde(rename = "CE1")]
    Ce1,
    #[serde(rename = "G")]
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassBound {
    Attained { value: Rational, model: ProbModel },
    EmptyClass,
}

impl ClassBound {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            ClassBound::Attained { value, .. } => Some(value),
            ClassBound::EmptyClass => None,
        }
    }
}

/// Exact maximum of `Σ w_v p(v)` over the chosen class.
pub fn max_expression(
    s: &ContextualityScenario,
    weights: &[Rational],
    class: ModelSet,
) -> Result<ClassBound> {
    if weights.len() != s.num_vertices() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} vertices",
            weights.len(),
            s.num_vertices()
        )));
    }
    let polytope = match class {
        ModelSet::Classical => {
            let dets = deterministic_models(s)?;
            // ties go to the lexicographically largest model
            let best = dets
                .into_iter()
                .map(|m| (m.weighted_sum(weights), m))
                .max_by(|a, b| a.cmp(b));
            return Ok(match best {
                Some((value, model)) => ClassBound::Attained { value, model },
                None => ClassBound::EmptyClass,
            });
        }
        ModelSet::Ce1 => ce1_polytope(s)?,
        ModelSet::General => general_polytope(s),
    };
    let mut lp = RationalLP::new(s.num_vertices());
    lp.objective = weights.to_vec();
    lp.eq = polytope.eq;
    lp.le = polytope
        .le
        .into_iter()
        .filter(|(row, _)| !row.iter().any(|a| a.is_negative()))
        .collect();
    let sol = lp_solve(&lp, Sense::Max)?;
    Ok(ClassBound::Attained {
        value: sol.value,
        model: ProbModel { values: sol.x },
    })
}

/// Positive integer weights drawn uniformly and normalized: a reproducible
/// Dirichlet-style rational mixture of `points`.
pub fn random_mixture<R: Rng + ?Sized>(points: &[ProbModel], rng: &mut R) -> ProbModel {
    assert!(!points.is_empty(), "mixture of no models");
    let raw: Vec<i64> = points.iter().map(|_| rng.gen_range(1..=1000)).collect();
    let total: i64 = raw.iter().sum();
    let n = points[0].values.len();
    let mut values = vec![Rational::zero(); n];
    for (p, &w) in points.iter().zip(&raw) {
        let w = rational::ratio(w, total);
        for (acc, x) in values.iter_mut().zip(&p.values) {
            if !x.is_zero() {
                *acc += &w * x;
            }
        }
    }
    ProbModel { values }
}

/// Harness for the open CE¹ = G question: true when every vertex of G(Γ)
/// satisfies all clique constraints.
pub fn ce1_equals_general(s: &ContextualityScenario) -> Result<bool> {
    for m in extremal_models(s)? {
        if !in_ce1(s, &m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::scenario::library;

    fn two_outcome() -> ContextualityScenario {
        ContextualityScenario::new(vec!["a".into(), "b".into()], vec![vec!["a".into(), "b".into()]]).unwrap()
    }

    #[test]
    fn check_model_errors() {
        let s = two_outcome();
        let mut raw = HashMap::new();
        raw.insert("a".to_string(), int(0));
        raw.insert("b".to_string(), int(0));
        match check_model(&s, &raw) {
            Err(Error::NormalizationFailure { sum, .. }) => assert_eq!(sum, "0"),
            other => panic!("{other:?}"),
        }
        raw.insert("a".to_string(), int(-1));
        raw.insert("b".to_string(), int(2));
        assert!(matches!(check_model(&s, &raw), Err(Error::NegativeProbability { .. })));
        raw.remove("b");
        assert!(matches!(check_model(&s, &raw), Err(Error::MissingProbability(_))));
    }

    #[test]
    fn single_hyperedge_has_only_deterministic_vertices() {
        let s = two_outcome();
        let ext = extremal_partition(&s).unwrap();
        assert_eq!(ext.deterministic.len(), 2);
        assert!(ext.indeterministic.is_empty());
        assert_eq!(ext.deterministic[0].values(), &[int(0), int(1)]);
    }

    #[test]
    fn kcbs_gamma_g_vertices() {
        let gg = library::kcbs_gamma_g();
        let ext = extremal_partition(&gg.scenario).unwrap();
        assert_eq!(ext.deterministic.len(), 11);
        assert_eq!(ext.indeterministic.len(), 1);
        let half = &ext.indeterministic[0];
        assert!((0..5).all(|v| *half.get(v) == ratio(1, 2)));
        assert!((5..10).all(|v| half.get(v).is_zero()));
        assert_eq!(deterministic_models(&gg.scenario).unwrap(), ext.deterministic);
    }

    #[test]
    fn half_model_is_not_classical() {
        let gg = library::kcbs_gamma_g();
        let dets = deterministic_models(&gg.scenario).unwrap();
        let mut values = vec![ratio(1, 2); 5];
        values.extend(vec![int(0); 5]);
        let m = ProbModel::new(&gg.scenario, values).unwrap();
        assert!(matches!(
            in_classical(&gg.scenario, &m, &dets).unwrap(),
            Classical::Outside { .. }
        ));
        let class = classify_model(&gg.scenario, &m, &dets).unwrap();
        assert!(class.indeterministic_extremal && class.consistent_exclusivity && !class.classical);
        for (k, d) in dets.iter().enumerate() {
            match in_classical(&gg.scenario, d, &dets).unwrap() {
                Classical::Member { weights } => assert_eq!(weights, vec![(k, int(1))]),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn colourability() {
        assert!(ks_colourable(&library::kcbs_gamma()).unwrap().is_some());
        assert!(ks_colourable(&library::cega_18()).unwrap().is_none());
        assert!(ks_colourable(&library::cega_27()).unwrap().is_some());
    }

    #[test]
    fn max_expression_on_pentagon_gamma_g() {
        let gg = library::kcbs_gamma_g();
        let mut w = vec![int(1); 5];
        w.extend(vec![int(0); 5]);
        let c = max_expression(&gg.scenario, &w, ModelSet::Classical).unwrap();
        assert_eq!(c.value(), Some(&int(2)));
        let g = max_expression(&gg.scenario, &w, ModelSet::General).unwrap();
        assert_eq!(g.value(), Some(&ratio(5, 2)));
    }
}
