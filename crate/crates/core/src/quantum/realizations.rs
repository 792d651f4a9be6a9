use super::{
    depolarize_effect, depolarize_state, hermitian_eigenvalues, identity, max_abs_diff, real_projector, Operator,
    QuantumRealization, SourceEvent, StarTable, DataTable, MAX_DIM,
};
use crate::error::{Error, Result};
use crate::models::ProbModel;
use crate::rational::{self, Rational};
use crate::scenario::library::kcbs_gamma_g;
use crate::scenario::ContextualityScenario;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;

fn scalar(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn event(state: Operator, prior: f64) -> SourceEvent {
    SourceEvent { state, prior }
}

/// The five KCBS rays `(sinθ cosφ_i, sinθ sinφ_i, cosθ)` with `φ_i = 4πi/5`
/// and `cos θ = 5^{-1/4}`; consecutive rays are orthogonal.
pub fn kcbs_rays() -> [[f64; 3]; 5] {
    let c = 5f64.powf(-0.25);
    let s = (1.0 - c * c).sqrt();
    std::array::from_fn(|k| {
        let phi = 4.0 * std::f64::consts::PI * (k + 1) as f64 / 5.0;
        [s * phi.cos(), s * phi.sin(), c]
    })
}

/// Qutrit realization of KCBS Γ_G with preparation noise `r1` and
/// measurement noise `r2`.
pub fn kcbs_realization(r1: f64, r2: f64) -> Result<QuantumRealization> {
    for (name, r) in [("r1", r1), ("r2", r2)] {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::BadParameter { name, value: r });
        }
    }
    let gamma_g = kcbs_gamma_g();
    let d = 3;
    let n = gamma_g.graph.num_vertices();
    let proj: Vec<Operator> = kcbs_rays().iter().map(|l| real_projector(l)).collect();
    let s = &gamma_g.scenario;
    let mut effects = vec![Operator::zeros(d, d); s.num_vertices()];
    for (v, p) in proj.iter().enumerate() {
        effects[v] = depolarize_effect(p, r2)?;
    }
    let mut sources = Vec::with_capacity(s.num_hyperedges());
    for (k, members) in s.hyperedges().iter().enumerate() {
        let nd = gamma_g.no_detection_vertex(k);
        let events_sum = members
            .iter()
            .filter(|&&v| v < n)
            .fold(Operator::zeros(d, d), |acc, &v| acc + &proj[v]);
        let complement = identity(d) - events_sum;
        effects[nd] = depolarize_effect(&complement, r2)?;
        let events = members
            .iter()
            .map(|&v| {
                let p = if v < n { &proj[v] } else { &complement };
                Ok(event(depolarize_state(p, r1)?, 1.0 / 3.0))
            })
            .collect::<Result<Vec<_>>>()?;
        sources.push(events);
    }
    let psi = real_projector(&[0.0, 0.0, 1.0]);
    let rest = (identity(d) - &psi) * scalar(0.5);
    let star = [
        event(depolarize_state(&psi, r1)?, 1.0 / 3.0),
        event(depolarize_state(&rest, r1)?, 2.0 / 3.0),
    ];
    Ok(QuantumRealization {
        dim: d,
        scenario: gamma_g.scenario.clone(),
        effects,
        sources,
        star: Some(star),
    })
}

/// Three two-outcome measurements `M_i` with vertices `m{i}={b}`.
pub fn fcf_scenario() -> ContextualityScenario {
    let vertices: Vec<String> = (1..=3)
        .flat_map(|i| (0..2).map(move |b| format!("m{i}={b}")))
        .collect();
    let hyperedges = (0..3).map(|i| vec![2 * i, 2 * i + 1]).collect();
    ContextualityScenario::from_indices(vertices, hyperedges).expect("three disjoint pairs")
}

/// Trine Bloch vectors.
pub fn trine() -> [[f64; 3]; 3] {
    let h = 3f64.sqrt() / 2.0;
    [[0.0, 0.0, 1.0], [h, 0.0, -0.5], [-h, 0.0, -0.5]]
}

fn bloch_projector(n: &[f64; 3], sign: f64) -> Operator {
    let i = Complex64::new(0.0, 1.0);
    let half = scalar(0.5);
    let one = scalar(1.0);
    Operator::from_row_slice(
        2,
        2,
        &[
            half * (one + sign * n[2]),
            half * sign * (n[0] - i * n[1]),
            half * sign * (n[0] + i * n[1]),
            half * (one - sign * n[2]),
        ],
    )
}

/// Qubit trine preparations and measurements: source `S_i` prepares
/// `Π^s_i = (I ± σ·n_i)/2` with prior 1/2 and `M_i` measures `{Π^0_i, Π^1_i}`.
pub fn fcf_realization() -> QuantumRealization {
    let scenario = fcf_scenario();
    let mut effects = Vec::with_capacity(6);
    let mut sources = Vec::with_capacity(3);
    for n in trine() {
        let pi = [bloch_projector(&n, 1.0), bloch_projector(&n, -1.0)];
        effects.extend(pi.iter().cloned());
        sources.push(pi.into_iter().map(|p| event(p, 0.5)).collect());
    }
    QuantumRealization {
        dim: 2,
        scenario,
        effects,
        sources,
        star: None,
    }
}

/// Largest entry of `|(1/3) Σ_i Π^0_i − I/2|`.
pub fn fcf_measurement_residual(r: &QuantumRealization) -> f64 {
    let avg = (0..3).fold(Operator::zeros(2, 2), |acc, i| acc + &r.effects[2 * i]) * scalar(1.0 / 3.0);
    max_abs_diff(&avg, &(identity(2) * scalar(0.5)))
}

/// Preparations for every hyperedge of a scenario plus an optional star
/// setting, all sharing one coarse-grained state.
#[derive(Debug, Clone)]
pub struct SourceAssignment {
    pub dim: usize,
    pub settings: Vec<Vec<SourceEvent>>,
    pub star: Option<[SourceEvent; 2]>,
}

impl SourceAssignment {
    /// Every state `I/d`, uniform priors within each setting.
    pub fn maximally_mixed(s: &ContextualityScenario, d: usize, p0: Option<f64>) -> Self {
        let mixed = identity(d) * scalar(1.0 / d as f64);
        let settings = s
            .hyperedges()
            .iter()
            .map(|e| {
                let prior = 1.0 / e.len() as f64;
                e.iter().map(|_| event(mixed.clone(), prior)).collect()
            })
            .collect();
        let star = p0.map(|p| [event(mixed.clone(), p), event(mixed.clone(), 1.0 - p)]);
        Self { dim: d, settings, star }
    }

    /// Random priors and random states `I/d + εH_s` with `Σ_s p_s H_s = 0`,
    /// so every setting averages to `I/d`.
    pub fn random<R: Rng + ?Sized>(
        s: &ContextualityScenario,
        d: usize,
        p0: Option<f64>,
        rng: &mut R,
    ) -> Self {
        let settings = s
            .hyperedges()
            .iter()
            .map(|e| {
                let raw: Vec<f64> = e.iter().map(|_| rng.gen_range(1..=1000) as f64).collect();
                let total: f64 = raw.iter().sum();
                let priors: Vec<f64> = raw.iter().map(|x| x / total).collect();
                random_equivalent(&priors, d, rng)
            })
            .collect();
        let star = p0.map(|p| {
            let mut ev = random_equivalent(&[p, 1.0 - p], d, rng).into_iter();
            [ev.next().unwrap(), ev.next().unwrap()]
        });
        Self { dim: d, settings, star }
    }
}

fn random_traceless<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Operator {
    let mut h = Operator::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = scalar(rng.gen_range(-1.0..1.0));
        for j in i + 1..d {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let shift = h.trace() / d as f64;
    h - identity(d) * shift
}

fn random_equivalent<R: Rng + ?Sized>(priors: &[f64], d: usize, rng: &mut R) -> Vec<SourceEvent> {
    let k = priors.len();
    let mut hs: Vec<Operator> = (0..k.saturating_sub(1)).map(|_| random_traceless(d, rng)).collect();
    if k > 1 && priors[k - 1] > 0.0 {
        let acc = hs
            .iter()
            .zip(priors)
            .fold(Operator::zeros(d, d), |acc, (h, &p)| acc + h * scalar(p));
        hs.push(acc * scalar(-1.0 / priors[k - 1]));
    } else {
        // a zero final prior leaves nothing to balance against
        hs = vec![Operator::zeros(d, d); k];
    }
    let norm = hs
        .iter()
        .flat_map(hermitian_eigenvalues)
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let eps = if norm > 0.0 { 0.9 / (d as f64 * norm) } else { 0.0 };
    let mixed = identity(d) * scalar(1.0 / d as f64);
    hs.iter()
        .zip(priors)
        .map(|(h, &p)| event(&mixed + h * scalar(eps), p))
        .collect()
}

/// Realizes `m` with trivial effects `E_v = p(v) I` against any equivalent
/// source assignment.
pub fn trivial_povm_realization(
    s: &ContextualityScenario,
    m: &ProbModel,
    sources: SourceAssignment,
) -> Result<QuantumRealization> {
    let d = sources.dim;
    if d == 0 || d > MAX_DIM {
        return Err(Error::TooLarge {
            what: "operator dimension",
            size: d,
            limit: MAX_DIM,
        });
    }
    if m.values().len() != s.num_vertices() {
        return Err(Error::DimensionMismatch("model does not match scenario".into()));
    }
    let effects = m
        .values()
        .iter()
        .map(|p| identity(d) * scalar(rational::to_f64(p)))
        .collect();
    Ok(QuantumRealization {
        dim: d,
        scenario: s.clone(),
        effects,
        sources: sources.settings,
        star: sources.star,
    })
}

/// Exact table of a trivial-POVM realization: `p(m, s) = p(v_m) p(s)` and
/// `p(v | S*, s*) = p(v)`.
pub fn trivial_table(
    s: &ContextualityScenario,
    m: &ProbModel,
    priors: Option<&[Vec<Rational>]>,
    p0: Option<Rational>,
) -> Result<DataTable<Rational>> {
    let uniform: Vec<Vec<Rational>> = s
        .hyperedges()
        .iter()
        .map(|e| vec![rational::ratio(1, e.len() as i64); e.len()])
        .collect();
    let priors = priors.unwrap_or(&uniform);
    if priors.len() != s.num_hyperedges() {
        return Err(Error::DimensionMismatch("one prior list per hyperedge".into()));
    }
    let mut pairings = Vec::with_capacity(priors.len());
    for (e, members) in s.hyperedges().iter().enumerate() {
        let pr = &priors[e];
        let total = pr.iter().fold(Rational::zero(), |a, x| a + x);
        if pr.len() != members.len() || !total.is_one() || pr.iter().any(|x| *x < Rational::zero()) {
            return Err(Error::InvalidDistribution(format!("priors of setting {}", e + 1)));
        }
        let joint = members
            .iter()
            .map(|&v| pr.iter().map(|x| m.get(v) * x).collect())
            .collect();
        pairings.push(Some(joint));
    }
    let star = match p0 {
        None => None,
        Some(p0) => {
            if p0 < Rational::zero() || p0 > Rational::one() {
                return Err(Error::BadParameter {
                    name: "p0",
                    value: rational::to_f64(&p0),
                });
            }
            Some(StarTable {
                conditional: [m.values().to_vec(), m.values().to_vec()],
                p0,
            })
        }
    };
    Ok(DataTable {
        vertices: s.vertices().to_vec(),
        hyperedges: s.hyperedges().to_vec(),
        pairings,
        star,
    })
}
