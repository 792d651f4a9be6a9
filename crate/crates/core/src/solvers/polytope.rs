//! Vertex enumeration by the double description method over exact integers.

use crate::error::{Error, Result};
use crate::rational::{denominator_lcm, Rational};
use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Largest ambient dimension accepted by [`enumerate_vertices`].
pub const VERTEX_ENUM_LIMIT: usize = 32;

/// `{x : eq rows a·x = b, le rows a·x ≤ b}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HRepPolytope {
    pub dim: usize,
    pub eq: Vec<(Vec<Rational>, Rational)>,
    pub le: Vec<(Vec<Rational>, Rational)>,
}

impl HRepPolytope {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Self::default()
        }
    }

    /// Adds `0 ≤ x_i ≤ 1` for every coordinate.
    pub fn with_unit_box(mut self) -> Self {
        for i in 0..self.dim {
            let mut row = vec![Rational::zero(); self.dim];
            row[i] = -Rational::one();
            self.le.push((row.clone(), Rational::zero()));
            row[i] = Rational::one();
            self.le.push((row, Rational::one()));
        }
        self
    }

    /// Adds only `x_i ≥ 0` for every coordinate.
    pub fn with_nonnegativity(mut self) -> Self {
        for i in 0..self.dim {
            let mut row = vec![Rational::zero(); self.dim];
            row[i] = -Rational::one();
            self.le.push((row, Rational::zero()));
        }
        self
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        let dot = |a: &[Rational]| crate::solvers::lp::dot(a, x);
        x.len() == self.dim
            && self.eq.iter().all(|(a, b)| &dot(a) == b)
            && self.le.iter().all(|(a, b)| &dot(a) <= b)
    }
}

struct Ray {
    coords: Vec<BigInt>,
    zeros: FixedBitSet,
}

fn normalize(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Row-reduces `[A | b]`. Returns `None` if inconsistent, else the reduced
/// rows and their pivot columns.
fn rref(rows: &[(Vec<Rational>, Rational)], n: usize) -> Option<(Vec<Vec<Rational>>, Vec<usize>)> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(a, b)| {
            let mut r = a.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=n {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    m.truncate(r);
    Some((m, pivots))
}

/// Rank-revealing elimination over rationals; returns the indices of a
/// maximal independent subset of `rows`, greedily in order.
fn independent_rows(rows: &[Vec<BigInt>], d: usize) -> Vec<usize> {
    let mut basis: Vec<(Vec<Rational>, usize)> = Vec::new();
    let mut chosen = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let mut v: Vec<Rational> = row.iter().map(|x| Rational::from_integer(x.clone())).collect();
        for (b, pc) in &basis {
            if !v[*pc].is_zero() {
                let f = v[*pc].clone();
                for j in 0..d {
                    let t = &f * &b[j];
                    v[j] -= t;
                }
            }
        }
        if let Some(pc) = (0..d).find(|&j| !v[j].is_zero()) {
            let inv = v[pc].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            basis.push((v, pc));
            chosen.push(k);
            if chosen.len() == d {
                break;
            }
        }
    }
    chosen
}

/// Inverse of a square rational matrix, assumed nonsingular.
fn inverse(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&i| !a[i][c].is_zero()).expect("nonsingular");
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..d {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * d {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    a.into_iter().map(|r| r[d..].to_vec()).collect()
}

/// Every vertex of a bounded polytope, exact, deduplicated and sorted.
pub fn enumerate_vertices(p: &HRepPolytope) -> Result<Vec<Vec<Rational>>> {
    let n = p.dim;
    if n > VERTEX_ENUM_LIMIT {
        return Err(Error::TooLarge {
            what: "vertex enumeration",
            size: n,
            limit: VERTEX_ENUM_LIMIT,
        });
    }
    for (a, _) in p.eq.iter().chain(&p.le) {
        if a.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in dimension {n}",
                a.len()
            )));
        }
    }
    let Some((reduced, pivots)) = rref(&p.eq, n) else {
        return Ok(Vec::new());
    };
    // x = x0 + N y over the free coordinates
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let k = free.len();
    let mut x0 = vec![Rational::zero(); n];
    for (r, &pc) in pivots.iter().enumerate() {
        x0[pc] = reduced[r][n].clone();
    }
    let mut basis_n = vec![vec![Rational::zero(); k]; n];
    for (j, &f) in free.iter().enumerate() {
        basis_n[f][j] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            basis_n[pc][j] = -reduced[r][f].clone();
        }
    }

    // homogenized cone {(y, t) : G (y, t) ≥ 0}, first row t ≥ 0
    let d = k + 1;
    let mut g_rows: Vec<Vec<BigInt>> = Vec::with_capacity(p.le.len() + 1);
    let mut t_row = vec![BigInt::zero(); d];
    t_row[k] = BigInt::one();
    g_rows.push(t_row);
    for (a, b) in &p.le {
        let mut row: Vec<Rational> = (0..k)
            .map(|j| -(0..n).fold(Rational::zero(), |acc, i| acc + &a[i] * &basis_n[i][j]))
            .collect();
        row.push(b - crate::solvers::lp::dot(a, &x0));
        let scale = Rational::from_integer(denominator_lcm(&row));
        let ints: Vec<BigInt> = row.iter().map(|v| (v * &scale).to_integer()).collect();
        g_rows.push(normalize(ints));
    }
    let m = g_rows.len();

    let init = independent_rows(&g_rows, d);
    if init.len() < d {
        return Err(Error::Unbounded);
    }
    let init_matrix: Vec<Vec<Rational>> = init
        .iter()
        .map(|&i| g_rows[i].iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    let inv = inverse(&init_matrix);
    let mut rays: Vec<Ray> = (0..d)
        .map(|col| {
            let column: Vec<Rational> = (0..d).map(|r| inv[r][col].clone()).collect();
            let scale = Rational::from_integer(denominator_lcm(&column));
            let coords = normalize(column.iter().map(|v| (v * &scale).to_integer()).collect());
            let mut zeros = FixedBitSet::with_capacity(m);
            for (pos, &row) in init.iter().enumerate() {
                if pos != col {
                    zeros.insert(row);
                }
            }
            Ray { coords, zeros }
        })
        .collect();
    let mut processed = FixedBitSet::with_capacity(m);
    for &i in &init {
        processed.insert(i);
    }

    for i in 0..m {
        if processed.contains(i) {
            continue;
        }
        processed.insert(i);
        let row = &g_rows[i];
        let values: Vec<BigInt> = rays.iter().map(|r| int_dot(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&r| values[r].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&r| values[r].is_negative()).collect();
        if neg.is_empty() {
            for (r, ray) in rays.iter_mut().enumerate() {
                if values[r].is_zero() {
                    ray.zeros.insert(i);
                }
            }
            continue;
        }
        let mut created = Vec::new();
        for &a in &pos {
            for &b in &neg {
                let mut common = rays[a].zeros.clone();
                common.intersect_with(&rays[b].zeros);
                if common.count_ones(..) + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|r| r == a || r == b || !common.is_subset(&rays[r].zeros));
                if !adjacent {
                    continue;
                }
                let va = &values[a];
                let vb = -&values[b];
                let coords: Vec<BigInt> = rays[a]
                    .coords
                    .iter()
                    .zip(&rays[b].coords)
                    .map(|(x, y)| va * y + &vb * x)
                    .collect();
                common.insert(i);
                created.push(Ray {
                    coords: normalize(coords),
                    zeros: common,
                });
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (r, mut ray) in rays.into_iter().enumerate() {
            if values[r].is_negative() {
                continue;
            }
            if values[r].is_zero() {
                ray.zeros.insert(i);
            }
            kept.push(ray);
        }
        kept.extend(created);
        rays = kept;
    }

    let mut vertices = Vec::with_capacity(rays.len());
    for ray in &rays {
        let t = &ray.coords[k];
        if t.is_zero() {
            return Err(Error::Unbounded);
        }
        let t = Rational::from_integer(t.clone());
        let y: Vec<Rational> = ray.coords[..k]
            .iter()
            .map(|c| Rational::from_integer(c.clone()) / &t)
            .collect();
        let x: Vec<Rational> = (0..n)
            .map(|i| {
                (0..k).fold(x0[i].clone(), |acc, j| {
                    if basis_n[i][j].is_zero() {
                        acc
                    } else {
                        acc + &basis_n[i][j] * &y[j]
                    }
                })
            })
            .collect();
        vertices.push(x);
    }
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}
