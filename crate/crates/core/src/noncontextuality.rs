//! The noise-robust tradeoff between Corr, R and p0, its witness conditions,
//! the fair-coin-flip bound and the trivial-POVM certificate.

use crate::error::{Error, Result};
use crate::invariants::InvariantBundle;
use crate::models::{extremal_partition, Extremal, ProbModel};
use crate::rational::{self, serde_text, Rational, Scalar};
use crate::scenario::ContextualityScenario;
use crate::solvers::{enumerate_vertices, lp_solve, HRepPolytope, RationalLP, Sense};
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Witness {
    Violation,
    NoViolation,
    TrivialBound,
}

/// Which of the three witness conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Conditions {
    pub p0_positive_and_beta_below_one: bool,
    pub r_exceeds_alpha: bool,
    pub corr_exceeds_one_minus_p0_gap: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NCIReport {
    pub corr: f64,
    pub r_value: f64,
    pub p0: f64,
    pub invariants: InvariantBundle,
    /// `None` when β is undefined.
    pub lhs_nci3: Option<f64>,
    pub bound_nci1: Option<f64>,
    /// `None` when p0 = 0 or β ≥ 1, where R is unconstrained.
    pub bound_nci2: Option<f64>,
    pub saturation_residual: Option<f64>,
    pub witness: Witness,
    pub conditions: Conditions,
}

fn lift<T: Scalar>(x: &Rational) -> T {
    T::from_rational(x)
}

/// `Corr + p0 (1−β)(R−α)/(α*−α)`.
pub fn nci_lhs<T: Scalar>(corr: &T, r: &T, p0: &T, alpha: &Rational, alpha_star: &Rational, beta: &Rational) -> T {
    let gap: T = lift(&(alpha_star - alpha));
    let one_minus_beta: T = lift(&(Rational::one() - beta));
    corr.clone() + p0.clone() * one_minus_beta * (r.clone() - lift(alpha)) / gap
}

fn check_unit<T: Scalar>(name: &'static str, x: &T) -> Result<()> {
    let v = x.to_f64();
    if *x < T::zero() || *x > T::one() || !v.is_finite() {
        return Err(Error::BadParameter { name, value: v });
    }
    Ok(())
}

/// Evaluates the tradeoff in all three forms. Comparisons happen in `T`, so
/// rational inputs give exact verdicts.
pub fn evaluate_nci<T: Scalar>(corr: &T, r_value: &T, p0: &T, inv: &InvariantBundle) -> Result<NCIReport> {
    check_unit("corr", corr)?;
    check_unit("p0", p0)?;
    if *r_value < T::zero() || !r_value.to_f64().is_finite() {
        return Err(Error::BadParameter {
            name: "r_value",
            value: r_value.to_f64(),
        });
    }
    let (alpha, alpha_star) = (&inv.alpha, &inv.alpha_star);
    if alpha_star == alpha {
        return Err(Error::DegenerateInvariants);
    }
    let one = T::one();
    let r_exceeds_alpha = *r_value > lift(alpha);
    let mut conditions = Conditions {
        p0_positive_and_beta_below_one: false,
        r_exceeds_alpha,
        corr_exceeds_one_minus_p0_gap: false,
    };
    let mut report = NCIReport {
        corr: corr.to_f64(),
        r_value: r_value.to_f64(),
        p0: p0.to_f64(),
        invariants: inv.clone(),
        lhs_nci3: None,
        bound_nci1: None,
        bound_nci2: None,
        saturation_residual: None,
        witness: Witness::TrivialBound,
        conditions,
    };
    let Some(beta) = &inv.beta else {
        return Ok(report);
    };
    let one_minus_beta: T = lift(&(Rational::one() - beta));
    let gap: T = lift(&(alpha_star - alpha));
    let beta_below_one = *beta < Rational::one();
    conditions.p0_positive_and_beta_below_one = *p0 > T::zero() && beta_below_one;
    conditions.corr_exceeds_one_minus_p0_gap = *corr > one.clone() - p0.clone() * one_minus_beta.clone();

    let lhs = nci_lhs(corr, r_value, p0, alpha, alpha_star, beta);
    let bound1 = one.clone() - p0.clone() * one_minus_beta.clone() * (r_value.clone() - lift(alpha)) / gap.clone();
    report.lhs_nci3 = Some(lhs.to_f64());
    report.bound_nci1 = Some(bound1.to_f64());
    if conditions.p0_positive_and_beta_below_one {
        let bound2 = lift::<T>(alpha) + gap.clone() / p0.clone() * (one.clone() - corr.clone()) / one_minus_beta.clone();
        report.bound_nci2 = Some(bound2.to_f64());
    }
    report.saturation_residual = Some(saturation_value(corr, r_value, p0, alpha, alpha_star, beta).to_f64());
    report.conditions = conditions;
    report.witness = if !beta_below_one {
        Witness::TrivialBound
    } else if lhs > one {
        Witness::Violation
    } else {
        Witness::NoViolation
    };
    Ok(report)
}

fn saturation_value<T: Scalar>(corr: &T, r: &T, p0: &T, alpha: &Rational, alpha_star: &Rational, beta: &Rational) -> T {
    let gap: T = lift(&(alpha_star - alpha));
    let omb: T = lift(&(Rational::one() - beta));
    let lhs = gap.clone() * corr.clone() + p0.clone() * omb.clone() * r.clone();
    let rhs = gap + p0.clone() * lift::<T>(alpha) * omb;
    lhs - rhs
}

/// `(α*−α)Corr + p0(1−β)R − [(α*−α) + p0 α (1−β)]`: zero exactly on the
/// boundary of the tradeoff, positive when it is violated.
pub fn saturation_ledger(report: &NCIReport) -> Option<f64> {
    let inv = &report.invariants;
    let beta = inv.beta.as_ref()?;
    Some(saturation_value(
        &report.corr,
        &report.r_value,
        &report.p0,
        &inv.alpha,
        &inv.alpha_star,
        beta,
    ))
}

/// Noise threshold for the depolarized KCBS realization.
#[derive(Debug, Clone, Serialize)]
pub struct Threshold {
    pub product: f64,
    pub product_expression: &'static str,
    pub corr: f64,
    pub corr_expression: &'static str,
}

/// The product `r1 r2` above which KCBS violates the tradeoff, and the
/// matching Corr value.
pub fn violation_threshold_kcbs() -> Threshold {
    let s5 = 5f64.sqrt();
    let product = 1.0 - (s5 - 2.0) / (s5 + 1.0 / 3.0);
    Threshold {
        product,
        product_expression: "1 - (sqrt(5) - 2)/(sqrt(5) + 1/3)",
        corr: 1.0 / 3.0 + 2.0 / 3.0 * product,
        corr_expression: "1/3 + (2/3)(1 - (sqrt(5) - 2)/(sqrt(5) + 1/3))",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FcfBound {
    #[serde(serialize_with = "serde_text::one")]
    pub value: Rational,
    /// `ξ(0|M_i)` at the reported maximizer.
    #[serde(serialize_with = "serde_text::many")]
    pub vertex: Vec<Rational>,
    pub polytope_vertices: usize,
}

/// `(1/3) Σ_i max(ξ_i, 1−ξ_i)`, the best guess of a response assignment.
pub fn fcf_objective(xi: &[Rational]) -> Rational {
    let one = Rational::one();
    let total = xi.iter().fold(Rational::zero(), |acc, x| {
        let other = &one - x;
        acc + if *x >= other { x.clone() } else { other }
    });
    total / rational::int(3)
}

/// Maximizes the fair-coin-flip objective over `ξ ∈ [0,1]³, Σξ = 3/2` by
/// exact vertex enumeration. Ties go to the lexicographically largest vertex.
pub fn fcf_bound() -> Result<FcfBound> {
    let mut p = HRepPolytope::new(3).with_unit_box();
    p.eq.push((vec![Rational::one(); 3], rational::ratio(3, 2)));
    let vertices = enumerate_vertices(&p)?;
    let best = vertices
        .iter()
        .map(|v| (fcf_objective(v), v))
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)))
        .ok_or(Error::Infeasible)?;
    Ok(FcfBound {
        value: best.0,
        vertex: best.1.clone(),
        polytope_vertices: vertices.len(),
    })
}

/// One p0 row of the certificate.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateRow {
    #[serde(serialize_with = "serde_text::one")]
    pub p0: Rational,
    #[serde(serialize_with = "serde_text::option")]
    pub lhs_nci3: Option<Rational>,
    pub witness: Witness,
}

/// Proof record that a trivial-POVM realization of a model cannot violate
/// the tradeoff.
#[derive(Debug, Clone, Serialize)]
pub struct TrivialPovmCertificate {
    #[serde(serialize_with = "serde_text::one")]
    pub weight_deterministic: Rational,
    #[serde(serialize_with = "serde_text::one")]
    pub weight_indeterministic: Rational,
    #[serde(serialize_with = "serde_text::one")]
    pub corr_bound: Rational,
    #[serde(serialize_with = "serde_text::one")]
    pub r_bound: Rational,
    pub rows: Vec<CertificateRow>,
    pub verdict: Witness,
}

pub fn certificate_p0_grid() -> Vec<Rational> {
    (0..=4).map(|k| rational::ratio(k, 4)).collect()
}

/// As [`certify_trivial_povm`], with the extremal partition of G(Γ_G)
/// precomputed.
pub fn certify_trivial_povm_with(
    ext: &Extremal,
    m: &ProbModel,
    inv: &InvariantBundle,
) -> Result<TrivialPovmCertificate> {
    let det = &ext.deterministic;
    let ind = &ext.indeterministic;
    let k = det.len() + ind.len();
    let points: Vec<&ProbModel> = det.iter().chain(ind).collect();
    let n = m.values().len();
    let mut lp = RationalLP::new(k);
    for v in 0..n {
        let row = points.iter().map(|p| p.get(v).clone()).collect();
        lp.add_eq(row, m.get(v).clone());
    }
    lp.add_eq(vec![Rational::one(); k], Rational::one());
    lp.objective = (0..k)
        .map(|j| if j < det.len() { Rational::one() } else { Rational::zero() })
        .collect();
    let sol = lp_solve(&lp, Sense::Max).map_err(|e| {
        Error::DecompositionFailure(format!("model is not a mixture of extremal models: {e}"))
    })?;
    let p_det = sol.value;
    let p_ind = Rational::one() - &p_det;
    let beta_term = match &inv.beta {
        Some(b) => &p_ind * b,
        None if p_ind.is_zero() => Rational::zero(),
        None => {
            return Err(Error::DecompositionFailure(
                "indeterministic weight without indeterministic vertices".into(),
            ))
        }
    };
    let corr_bound = &p_det + beta_term;
    let r_bound = &p_det * &inv.alpha + &p_ind * &inv.alpha_star;

    let classical_path = r_bound <= inv.alpha;
    let mut rows = Vec::new();
    let mut verdict = Witness::NoViolation;
    for p0 in certificate_p0_grid() {
        let row = if classical_path {
            // R ≤ α leaves no constraint to violate
            let lhs = inv
                .beta
                .as_ref()
                .filter(|_| inv.alpha_star != inv.alpha)
                .map(|b| nci_lhs(&corr_bound, &r_bound, &p0, &inv.alpha, &inv.alpha_star, b));
            CertificateRow {
                p0,
                lhs_nci3: lhs,
                witness: Witness::NoViolation,
            }
        } else {
            let report = evaluate_nci(&corr_bound, &r_bound, &p0, inv)?;
            let lhs = inv
                .beta
                .as_ref()
                .map(|b| nci_lhs(&corr_bound, &r_bound, &p0, &inv.alpha, &inv.alpha_star, b));
            CertificateRow {
                p0,
                lhs_nci3: lhs,
                witness: report.witness,
            }
        };
        if row.witness == Witness::Violation {
            verdict = Witness::Violation;
        }
        rows.push(row);
    }
    Ok(TrivialPovmCertificate {
        weight_deterministic: p_det,
        weight_indeterministic: p_ind,
        corr_bound,
        r_bound,
        rows,
        verdict,
    })
}

/// Decomposes `m` over Λ_det ⊔ Λ_ind with maximal deterministic weight,
/// bounds Corr and R for any trivial-POVM realization, and checks the
/// tradeoff at those bounds for p0 ∈ {0, 1/4, 1/2, 3/4, 1}.
pub fn certify_trivial_povm(
    s: &ContextualityScenario,
    m: &ProbModel,
    inv: &InvariantBundle,
) -> Result<TrivialPovmCertificate> {
    let ext = extremal_partition(s)?;
    certify_trivial_povm_with(&ext, m, inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{invariants_for, QChoice};
    use crate::scenario::library::{chsh_4cycle, kcbs_gamma_g};

    fn kcbs_inv() -> InvariantBundle {
        invariants_for(&kcbs_gamma_g(), &QChoice::Uniform).unwrap()
    }

    #[test]
    fn noiseless_kcbs_violates() {
        let inv = kcbs_inv();
        let r = 5f64.sqrt();
        let rep = evaluate_nci(&1.0, &r, &(1.0 / 3.0), &inv).unwrap();
        assert_eq!(rep.witness, Witness::Violation);
        assert!((rep.lhs_nci3.unwrap() - (1.0 + (r - 2.0) / 3.0)).abs() < 1e-12);
        assert!(rep.saturation_residual.unwrap() > 0.0);
        assert!(rep.conditions.r_exceeds_alpha);
    }

    #[test]
    fn boundary_is_not_a_violation() {
        let inv = kcbs_inv();
        let one = Rational::one();
        let rep = evaluate_nci(&one, &rational::int(2), &rational::ratio(1, 3), &inv).unwrap();
        assert_eq!(rep.witness, Witness::NoViolation);
        assert_eq!(rep.lhs_nci3, Some(1.0));
        assert_eq!(rep.saturation_residual, Some(0.0));
        assert_eq!(rep.bound_nci2, Some(2.0));
        // other corner: Corr = 1 − p0(1−β), R = α*
        let p0 = rational::ratio(1, 3);
        let corr = &one - &p0 * rational::ratio(1, 2);
        let rep = evaluate_nci(&corr, &rational::ratio(5, 2), &p0, &inv).unwrap();
        assert_eq!(rep.saturation_residual, Some(0.0));
        assert_eq!(rep.witness, Witness::NoViolation);
    }

    #[test]
    fn threshold_values() {
        let t = violation_threshold_kcbs();
        assert!((t.product - 0.908).abs() < 5e-4);
        assert!((t.corr - 0.939).abs() < 5e-4);
        let inv = kcbs_inv();
        for (x, want) in [(t.product + 1e-6, Witness::Violation), (0.9, Witness::NoViolation)] {
            let corr = 1.0 / 3.0 + 2.0 / 3.0 * x;
            let r = x * 5f64.sqrt() + 5.0 / 3.0 * (1.0 - x);
            assert_eq!(evaluate_nci(&corr, &r, &(1.0 / 3.0), &inv).unwrap().witness, want);
        }
    }

    #[test]
    fn fcf_is_five_sixths() {
        let b = fcf_bound().unwrap();
        assert_eq!(b.value, rational::ratio(5, 6));
        assert_eq!(b.vertex, vec![rational::int(1), rational::ratio(1, 2), rational::int(0)]);
        assert_eq!(b.polytope_vertices, 6);
    }

    #[test]
    fn bad_inputs() {
        let inv = kcbs_inv();
        assert!(matches!(evaluate_nci(&1.5, &1.0, &0.5, &inv), Err(Error::BadParameter { name: "corr", .. })));
        let gg = chsh_4cycle();
        let flat = invariants_for(&gg, &QChoice::Uniform).unwrap();
        assert_eq!(evaluate_nci(&1.0, &2.0, &0.5, &flat).unwrap_err(), Error::DegenerateInvariants);
    }

    #[test]
    fn certificates() {
        let gg = kcbs_gamma_g();
        let s = &gg.scenario;
        let inv = kcbs_inv();
        let ext = extremal_partition(s).unwrap();
        let half = ext.indeterministic[0].clone();
        let c = certify_trivial_povm_with(&ext, &half, &inv).unwrap();
        assert_eq!(c.weight_indeterministic, Rational::one());
        assert_eq!(c.corr_bound, rational::ratio(1, 2));
        assert_eq!(c.r_bound, rational::ratio(5, 2));
        assert_eq!(c.verdict, Witness::NoViolation);
        for d in &ext.deterministic {
            let c = certify_trivial_povm_with(&ext, d, &inv).unwrap();
            assert_eq!(c.corr_bound, Rational::one());
            assert!(c.r_bound <= inv.alpha);
            assert_eq!(c.verdict, Witness::NoViolation);
        }
    }
}
