use crate::error::{Error, Result};
use crate::rational::{self, Rational, Scalar};
use crate::scenario::WeightedGraph;
use std::fmt::Write as _;

/// Star-source statistics: `p(v | S*, s*)` for `s* ∈ {0, 1}` and `p0 = p(s*=0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarTable<T> {
    pub conditional: [Vec<T>; 2],
    pub p0: T,
}

/// Joint statistics `p(m, s | M_e, S_e)` for every paired hyperedge, indexed
/// `[e][m][s]` by outcome position within the hyperedge.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable<T> {
    pub vertices: Vec<String>,
    pub hyperedges: Vec<Vec<usize>>,
    pub pairings: Vec<Option<Vec<Vec<T>>>>,
    pub star: Option<StarTable<T>>,
}

impl<T: Scalar> DataTable<T> {
    /// Largest deviation of a pairing's total from 1, and the smallest entry.
    pub fn normalization_residual(&self) -> (f64, f64) {
        let mut worst = 0.0f64;
        let mut smallest = f64::INFINITY;
        for joint in self.pairings.iter().flatten() {
            let mut total = 0.0;
            for x in joint.iter().flatten() {
                let v = x.to_f64();
                smallest = smallest.min(v);
                total += v;
            }
            worst = worst.max((total - 1.0).abs());
        }
        (worst, smallest)
    }

    /// CSV with one row per joint probability, then the star section.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("hyperedge,m,s,probability\n");
        for (e, joint) in self.pairings.iter().enumerate() {
            let Some(joint) = joint else { continue };
            for (m, row) in joint.iter().enumerate() {
                for (s, p) in row.iter().enumerate() {
                    let _ = writeln!(out, "{},{},{},{}", e + 1, m, s, rational::significant(p.to_f64(), 12));
                }
            }
        }
        if let Some(star) = &self.star {
            out.push_str("\nstar_vertex,s,probability\n");
            for (s, cond) in star.conditional.iter().enumerate() {
                for (v, p) in cond.iter().enumerate() {
                    let _ = writeln!(out, "{},{},{}", self.vertices[v], s, rational::significant(p.to_f64(), 12));
                }
            }
            let _ = writeln!(out, "p0,,{}", rational::significant(star.p0.to_f64(), 12));
        }
        out
    }
}

/// `Σ_e q_e Σ_m p(m, s=m | M_e, S_e)`.
pub fn compute_corr<T: Scalar>(t: &DataTable<T>, q: &[Rational]) -> Result<T> {
    if q.len() != t.pairings.len() {
        return Err(Error::InvalidDistribution(format!(
            "q has {} entries for {} hyperedges",
            q.len(),
            t.pairings.len()
        )));
    }
    let mut corr = T::zero();
    for (e, qe) in q.iter().enumerate() {
        if rational::zero() == *qe {
            continue;
        }
        let joint = t.pairings[e].as_ref().ok_or(Error::MissingPairing(e))?;
        let mut diag = T::zero();
        for (m, row) in joint.iter().enumerate() {
            diag += &row[m];
        }
        corr += &(T::from_rational(qe) * diag);
    }
    Ok(corr)
}

/// `Σ_{v∈V(G)} w_v p(v | S*, s*=0)`, looking up G's vertex ids in the table.
pub fn compute_r<T: Scalar>(t: &DataTable<T>, g: &WeightedGraph) -> Result<T> {
    let star = t.star.as_ref().ok_or(Error::MissingStarSource)?;
    let mut r = T::zero();
    for (id, w) in g.graph().vertices().iter().zip(g.weights()) {
        let v = t
            .vertices
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| Error::UnknownVertex(id.clone()))?;
        r += &(T::from_rational(w) * star.conditional[0][v].clone());
    }
    Ok(r)
}
