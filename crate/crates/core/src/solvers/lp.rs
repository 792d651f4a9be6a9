//! Dense two-phase simplex over exact rationals with Bland's rule.

use crate::error::{Error, Result};
use crate::rational::Rational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

/// `objective · x` subject to `eq` rows (`a·x = b`), `le` rows (`a·x ≤ b`)
/// and per-variable bounds. [`RationalLP::new`] starts every variable at
/// `x ≥ 0` with no upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLP {
    pub objective: Vec<Rational>,
    pub eq: Vec<(Vec<Rational>, Rational)>,
    pub le: Vec<(Vec<Rational>, Rational)>,
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
}

impl RationalLP {
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![Rational::zero(); n],
            eq: Vec::new(),
            le: Vec::new(),
            lower: vec![Some(Rational::zero()); n],
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_eq(&mut self, row: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.eq.push((row, rhs));
        self
    }

    pub fn add_le(&mut self, row: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.le.push((row, rhs));
        self
    }

    pub fn add_ge(&mut self, row: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.le.push((row.into_iter().map(|a| -a).collect(), -rhs));
        self
    }

    pub fn set_bounds(&mut self, i: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.lower[i] = lower;
        self.upper[i] = upper;
    }

    fn check_dimensions(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} variables but {} lower / {} upper bounds",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (row, _) in self.eq.iter().chain(&self.le) {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint row of length {} for {n} variables",
                    row.len()
                )));
            }
        }
        for (l, u) in self.lower.iter().zip(&self.upper) {
            if let (Some(l), Some(u)) = (l, u) {
                if l > u {
                    return Err(Error::Infeasible);
                }
            }
        }
        Ok(())
    }

    /// True when `x` satisfies every constraint and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = x.iter().enumerate().all(|(i, xi)| {
            self.lower[i].as_ref().is_none_or(|l| xi >= l)
                && self.upper[i].as_ref().is_none_or(|u| xi <= u)
        });
        bounds_ok
            && self.eq.iter().all(|(a, b)| &dot(a, x) == b)
            && self.le.iter().all(|(a, b)| &dot(a, x) <= b)
    }
}

pub fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter()
        .zip(x)
        .filter(|(ai, _)| !ai.is_zero())
        .fold(Rational::zero(), |acc, (ai, xi)| acc + ai * xi)
}

/// How an original variable is expressed through standard-form columns.
enum Column {
    Shift { col: usize, offset: Rational },
    Mirror { col: usize, offset: Rational },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !num_traits::One::is_one(&p) {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..self.ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let delta = &f * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` from the current feasible basis. Columns with
    /// `allowed[j] == false` never enter.
    fn maximize(&mut self, cost: &[Rational], allowed: &[bool]) -> Result<()> {
        loop {
            // reduced cost of column j: c_B B⁻¹ A_j − c_j
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = -cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        rc += &cost[b] * &self.rows[i][j];
                    }
                }
                if rc.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    let better = match &leaving {
                        None => true,
                        Some((k, best)) => {
                            ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(Error::Unbounded),
            }
        }
    }
}

/// Exact optimum of `p` in the given sense.
pub fn lp_solve(p: &RationalLP, sense: Sense) -> Result<LpSolution> {
    p.check_dimensions()?;
    let n = p.num_vars();

    // map original variables onto nonnegative columns
    let mut columns = Vec::with_capacity(n);
    let mut extra_upper: Vec<(usize, Rational)> = Vec::new();
    let mut ncols = 0;
    for i in 0..n {
        let col = ncols;
        match (&p.lower[i], &p.upper[i]) {
            (Some(l), u) => {
                columns.push(Column::Shift {
                    col,
                    offset: l.clone(),
                });
                if let Some(u) = u {
                    extra_upper.push((col, u - l));
                }
                ncols += 1;
            }
            (None, Some(u)) => {
                columns.push(Column::Mirror {
                    col,
                    offset: u.clone(),
                });
                ncols += 1;
            }
            (None, None) => {
                columns.push(Column::Split {
                    pos: col,
                    neg: col + 1,
                });
                ncols += 2;
            }
        }
    }
    let structural = ncols;

    let translate = |row: &[Rational], rhs: &Rational| -> (Vec<Rational>, Rational) {
        let mut out = vec![Rational::zero(); structural];
        let mut b = rhs.clone();
        for (i, a) in row.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            match &columns[i] {
                Column::Shift { col, offset } => {
                    out[*col] += a;
                    b -= a * offset;
                }
                Column::Mirror { col, offset } => {
                    out[*col] -= a;
                    b -= a * offset;
                }
                Column::Split { pos, neg } => {
                    out[*pos] += a;
                    out[*neg] -= a;
                }
            }
        }
        (out, b)
    };

    let mut eq_rows = Vec::new();
    let mut le_rows = Vec::new();
    for (a, b) in &p.eq {
        eq_rows.push(translate(a, b));
    }
    for (a, b) in &p.le {
        le_rows.push(translate(a, b));
    }
    for (col, u) in extra_upper {
        let mut row = vec![Rational::zero(); structural];
        row[col] = Rational::from_integer(1.into());
        le_rows.push((row, u));
    }

    let m = eq_rows.len() + le_rows.len();
    let slack0 = structural;
    let art0 = structural + le_rows.len();
    let total = art0 + m;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let one = Rational::from_integer(1.into());
    for (k, (a, b)) in eq_rows.into_iter().chain(le_rows).enumerate() {
        let mut row = a;
        row.resize(total, Rational::zero());
        if k >= p.eq.len() {
            row[slack0 + k - p.eq.len()] = one.clone();
        }
        let mut b = b;
        if b.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            b = -b;
        }
        row[art0 + k] = one.clone();
        rows.push(row);
        rhs.push(b);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (art0..total).collect(),
        ncols: total,
    };

    // phase 1: maximize −Σ artificials
    let mut cost1 = vec![Rational::zero(); total];
    for c in cost1.iter_mut().skip(art0) {
        *c = -one.clone();
    }
    let all = vec![true; total];
    t.maximize(&cost1, &all)?;
    let infeasibility: Rational = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&b, _)| b >= art0)
        .fold(Rational::zero(), |acc, (_, v)| acc + v);
    if infeasibility.is_positive() {
        return Err(Error::Infeasible);
    }
    // drive remaining artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= art0 {
            match (0..art0).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // phase 2
    let mut cost2 = vec![Rational::zero(); total];
    for (i, c) in p.objective.iter().enumerate() {
        let c = match sense {
            Sense::Max => c.clone(),
            Sense::Min => -c.clone(),
        };
        match &columns[i] {
            Column::Shift { col, .. } => cost2[*col] += &c,
            Column::Mirror { col, .. } => cost2[*col] -= &c,
            Column::Split { pos, neg } => {
                cost2[*pos] += &c;
                cost2[*neg] -= &c;
            }
        }
    }
    let allowed: Vec<bool> = (0..total).map(|j| j < art0).collect();
    t.maximize(&cost2, &allowed)?;

    let mut values = vec![Rational::zero(); total];
    for (i, &b) in t.basis.iter().enumerate() {
        values[b] = t.rhs[i].clone();
    }
    let x: Vec<Rational> = columns
        .iter()
        .map(|c| match c {
            Column::Shift { col, offset } => offset + &values[*col],
            Column::Mirror { col, offset } => offset - &values[*col],
            Column::Split { pos, neg } => &values[*pos] - &values[*neg],
        })
        .collect();
    let value = dot(&p.objective, &x);
    Ok(LpSolution { value, x })
}

/// Some point satisfying the constraints of `p` (its objective is ignored).
pub fn lp_feasible_point(p: &RationalLP) -> Result<Vec<Rational>> {
    let mut q = p.clone();
    q.objective = vec![Rational::zero(); p.num_vars()];
    Ok(lp_solve(&q, Sense::Max)?.x)
}
