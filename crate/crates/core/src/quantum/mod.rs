//! Dense complex-matrix backend: operators, realizations and Born-rule tables.

mod realizations;
mod table;

pub use realizations::{
    fcf_measurement_residual, fcf_realization, fcf_scenario, kcbs_rays, kcbs_realization, trine, trivial_povm_realization,
    trivial_table, SourceAssignment,
};
pub use table::{compute_corr, compute_r, DataTable, StarTable};

use crate::error::{Error, Result};
use crate::scenario::ContextualityScenario;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type Operator = DMatrix<Complex64>;

pub const MAX_DIM: usize = 16;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-10;
pub const EQUIVALENCE_TOL: f64 = 1e-9;
pub const PRIOR_TOL: f64 = 1e-12;
pub const BORN_TOL: f64 = 1e-12;

pub fn identity(d: usize) -> Operator {
    Operator::identity(d, d)
}

/// `|v⟩⟨v|` for a normalized copy of `v`.
pub fn projector(v: &[Complex64]) -> Operator {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let d = v.len();
    Operator::from_fn(d, d, |i, j| v[i] * v[j].conj() / (norm * norm))
}

pub fn real_projector(v: &[f64]) -> Operator {
    let c: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    projector(&c)
}

pub fn trace(a: &Operator) -> Complex64 {
    a.trace()
}

/// Largest entry of `|A − A†|`.
pub fn hermiticity_residual(a: &Operator) -> f64 {
    (a - a.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Largest entry of `|A − B|`.
pub fn max_abs_diff(a: &Operator, b: &Operator) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending. Uses the real symmetric
/// embedding `[[Re, −Im], [Im, Re]]`, whose spectrum is each eigenvalue twice.
pub fn hermitian_eigenvalues(a: &Operator) -> Vec<f64> {
    let d = a.nrows();
    let h = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let m = DMatrix::<f64>::from_fn(2 * d, 2 * d, |i, j| {
        let z = h[(i % d, j % d)];
        match (i < d, j < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev.into_iter().step_by(2).collect()
}

fn check_r(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::BadParameter { name: "r", value: r });
    }
    Ok(())
}

/// `D_r(ρ) = rρ + (1−r) Tr(ρ) I/d`.
pub fn depolarize_state(rho: &Operator, r: f64) -> Result<Operator> {
    check_r(r)?;
    let d = rho.nrows();
    let tr = trace(rho);
    Ok(rho * Complex64::new(r, 0.0) + identity(d) * (tr * (1.0 - r) / d as f64))
}

/// The adjoint channel on effects. The depolarizing channel is self-adjoint
/// with respect to the Hilbert-Schmidt product, so the formula is the same.
pub fn depolarize_effect(e: &Operator, r: f64) -> Result<Operator> {
    depolarize_state(e, r)
}

/// One source event: a density operator and its prior within its setting.
#[derive(Debug, Clone)]
pub struct SourceEvent {
    pub state: Operator,
    pub prior: f64,
}

/// POVM elements for every vertex of a scenario, one source setting per
/// hyperedge (outcome `m` of S_e matches the `m`-th member of e) and an
/// optional two-outcome star setting.
#[derive(Debug, Clone)]
pub struct QuantumRealization {
    pub dim: usize,
    pub scenario: ContextualityScenario,
    pub effects: Vec<Operator>,
    pub sources: Vec<Vec<SourceEvent>>,
    pub star: Option<[SourceEvent; 2]>,
}

fn violation(check: impl Into<String>, residual: f64) -> Error {
    Error::InvariantViolation {
        check: check.into(),
        residual,
    }
}

impl QuantumRealization {
    /// Coarse-grained source `Σ_s p(s) ρ_s` of a setting.
    fn mixture(events: &[SourceEvent], d: usize) -> Operator {
        events.iter().fold(Operator::zeros(d, d), |acc, ev| {
            acc + &ev.state * Complex64::new(ev.prior, 0.0)
        })
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 || d > MAX_DIM {
            return Err(Error::TooLarge {
                what: "operator dimension",
                size: d,
                limit: MAX_DIM,
            });
        }
        let s = &self.scenario;
        if self.effects.len() != s.num_vertices() || self.sources.len() != s.num_hyperedges() {
            return Err(Error::DimensionMismatch(
                "realization does not match its scenario".into(),
            ));
        }
        let square = |a: &Operator| a.nrows() == d && a.ncols() == d;
        for (v, e) in self.effects.iter().enumerate() {
            if !square(e) {
                return Err(Error::DimensionMismatch(format!("effect of {}", s.id(v))));
            }
            let h = hermiticity_residual(e);
            if h >= HERMITICITY_TOL {
                return Err(violation(format!("effect {} hermitian", s.id(v)), h));
            }
            let ev = hermitian_eigenvalues(e);
            let low = ev[0];
            let high = ev[d - 1];
            if low < -EIGEN_TOL {
                return Err(violation(format!("effect {} >= 0", s.id(v)), -low));
            }
            if high > 1.0 + EIGEN_TOL {
                return Err(violation(format!("effect {} <= I", s.id(v)), high - 1.0));
            }
        }
        for (k, members) in s.hyperedges().iter().enumerate() {
            let sum = members
                .iter()
                .fold(Operator::zeros(d, d), |acc, &v| acc + &self.effects[v]);
            let res = max_abs_diff(&sum, &identity(d));
            if res >= EQUIVALENCE_TOL {
                return Err(violation(format!("POVM completeness on hyperedge {}", k + 1), res));
            }
            if self.sources[k].len() != members.len() {
                return Err(Error::DimensionMismatch(format!(
                    "source setting {} has {} events for {} outcomes",
                    k + 1,
                    self.sources[k].len(),
                    members.len()
                )));
            }
        }
        let settings: Vec<(String, &[SourceEvent])> = self
            .sources
            .iter()
            .enumerate()
            .map(|(k, ev)| (format!("S{}", k + 1), ev.as_slice()))
            .chain(self.star.iter().map(|st| ("S*".to_string(), st.as_slice())))
            .collect();
        let mut reference: Option<Operator> = None;
        for (name, events) in &settings {
            let total: f64 = events.iter().map(|e| e.prior).sum();
            if (total - 1.0).abs() > PRIOR_TOL || events.iter().any(|e| e.prior < 0.0) {
                return Err(violation(format!("priors of {name}"), (total - 1.0).abs()));
            }
            for (i, ev) in events.iter().enumerate() {
                if !square(&ev.state) {
                    return Err(Error::DimensionMismatch(format!("state {i} of {name}")));
                }
                let h = hermiticity_residual(&ev.state);
                if h >= HERMITICITY_TOL {
                    return Err(violation(format!("state {i} of {name} hermitian"), h));
                }
                let tr = (trace(&ev.state) - 1.0).norm();
                if tr > TRACE_TOL {
                    return Err(violation(format!("state {i} of {name} unit trace"), tr));
                }
                let low = hermitian_eigenvalues(&ev.state)[0];
                if low < -EIGEN_TOL {
                    return Err(violation(format!("state {i} of {name} >= 0"), -low));
                }
            }
            let mix = Self::mixture(events, d);
            match &reference {
                None => reference = Some(mix),
                Some(r) => {
                    let res = max_abs_diff(r, &mix);
                    if res >= EQUIVALENCE_TOL {
                        return Err(violation(format!("source equivalence of {name}"), res));
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest deviation between coarse-grained sources across all settings.
    pub fn source_equivalence_residual(&self) -> f64 {
        let d = self.dim;
        let mixes: Vec<Operator> = self
            .sources
            .iter()
            .map(|ev| Self::mixture(ev, d))
            .chain(self.star.iter().map(|st| Self::mixture(st, d)))
            .collect();
        mixes
            .iter()
            .map(|m| max_abs_diff(m, &mixes[0]))
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `Σ_{v∈e} E_v` from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim;
        self.scenario
            .hyperedges()
            .iter()
            .map(|members| {
                let sum = members
                    .iter()
                    .fold(Operator::zeros(d, d), |acc, &v| acc + &self.effects[v]);
                max_abs_diff(&sum, &identity(d))
            })
            .fold(0.0, f64::max)
    }

    pub fn coarse_grained_source(&self, setting: usize) -> Operator {
        Self::mixture(&self.sources[setting], self.dim)
    }
}

fn born(rho: &Operator, e: &Operator) -> Result<f64> {
    let z = (rho * e).trace();
    if z.im.abs() >= BORN_TOL {
        return Err(violation("Born probability real", z.im.abs()));
    }
    let p = z.re;
    if !(-BORN_TOL..=1.0 + BORN_TOL).contains(&p) {
        return Err(violation("Born probability in [0,1]", p.min(1.0 - p).abs()));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `p(m, s | M_e, S_e) = Tr(ρ_s E_m) p(s | S_e)` for every pairing, plus the
/// star-source conditionals.
pub fn born_table(r: &QuantumRealization) -> Result<DataTable<f64>> {
    r.validate()?;
    let s = &r.scenario;
    let mut pairings = Vec::with_capacity(s.num_hyperedges());
    for (k, members) in s.hyperedges().iter().enumerate() {
        let mut joint = Vec::with_capacity(members.len());
        for &v in members {
            let row = r.sources[k]
                .iter()
                .map(|ev| Ok(born(&ev.state, &r.effects[v])? * ev.prior))
                .collect::<Result<Vec<f64>>>()?;
            joint.push(row);
        }
        pairings.push(Some(joint));
    }
    let star = match &r.star {
        None => None,
        Some([zero, one]) => {
            let cond = |ev: &SourceEvent| {
                r.effects
                    .iter()
                    .map(|e| born(&ev.state, e))
                    .collect::<Result<Vec<f64>>>()
            };
            Some(StarTable {
                conditional: [cond(zero)?, cond(one)?],
                p0: zero.prior,
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
