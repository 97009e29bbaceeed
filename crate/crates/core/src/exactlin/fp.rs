//! Linear algebra over prime fields `F_p`.
//!
//! Vectors are `Vec<u64>` with entries in `0..p`. Every subspace is stored by
//! its reduced row echelon basis, which makes equality of subspaces a plain
//! comparison of bases.

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// `dst -= k * src`, entrywise mod p.
fn axpy_neg(dst: &mut [u64], src: &[u64], k: u64, p: u64) {
    if k == 0 {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = (*d + p - mul_mod(k, s, p)) % p;
    }
}

/// Reduced row echelon form of the given rows; zero rows dropped.
/// Returns the nonzero rows and their pivot columns.
fn rref(mut rows: Vec<Vec<u64>>, p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r {
                let f = row[c];
                axpy_neg(row, &pivot_row, f, p);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Subspace of `F_p^n`, held as a canonical echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpSubspace {
    p: u64,
    ambient_dim: usize,
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl FpSubspace {
    pub fn zero(p: u64, ambient_dim: usize) -> Self {
        FpSubspace {
            p,
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(p: u64, ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut v = vec![0; ambient_dim];
                v[i] = 1;
                v
            })
            .collect();
        FpSubspace {
            p,
            ambient_dim,
            basis,
            pivots: (0..ambient_dim).collect(),
        }
    }

    fn from_rows_unchecked(p: u64, ambient_dim: usize, rows: Vec<Vec<u64>>) -> Self {
        let rows = rows.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
        let (basis, pivots) = rref(rows, p);
        FpSubspace {
            p,
            ambient_dim,
            basis,
            pivots,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Residue of `v` after clearing all pivot coordinates.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.ambient_dim, "vector has wrong length");
        let mut r: Vec<u64> = v.iter().map(|x| x % self.p).collect();
        for (b, &c) in self.basis.iter().zip(&self.pivots) {
            let f = r[c];
            axpy_neg(&mut r, b, f, self.p);
        }
        r
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains_subspace(&self, other: &FpSubspace) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// Span of `self` together with `v`.
    pub fn with_vector(&self, v: &[u64]) -> FpSubspace {
        let mut rows = self.basis.clone();
        rows.push(v.iter().map(|x| x % self.p).collect());
        Self::from_rows_unchecked(self.p, self.ambient_dim, rows)
    }

    pub fn sum(&self, other: &FpSubspace) -> FpSubspace {
        assert_eq!((self.p, self.ambient_dim), (other.p, other.ambient_dim));
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::from_rows_unchecked(self.p, self.ambient_dim, rows)
    }

    /// Intersection by the Zassenhaus sum-intersection construction.
    pub fn intersect(&self, other: &FpSubspace) -> FpSubspace {
        assert_eq!((self.p, self.ambient_dim), (other.p, other.ambient_dim));
        let n = self.ambient_dim;
        let mut rows = Vec::new();
        for b in &self.basis {
            let mut r = b.clone();
            r.extend_from_slice(b);
            rows.push(r);
        }
        for b in &other.basis {
            let mut r = b.clone();
            r.extend(std::iter::repeat_n(0, n));
            rows.push(r);
        }
        let (reduced, _) = rref(rows, self.p);
        let inter = reduced
            .into_iter()
            .filter(|r| r[..n].iter().all(|&x| x == 0))
            .map(|r| r[n..].to_vec())
            .collect();
        Self::from_rows_unchecked(self.p, n, inter)
    }

    /// Every vector of the subspace with first nonzero coordinate 1, in
    /// lexicographic order. Exponential in the dimension; meant for the
    /// exhaustive oracle only.
    pub fn normalized_vectors(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let d = self.dim();
        let total = (self.p as u128).pow(d as u32);
        for code in 1..total {
            let mut c = code;
            let mut v = vec![0u64; self.ambient_dim];
            for b in &self.basis {
                let coef = (c % self.p as u128) as u64;
                c /= self.p as u128;
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = (*x + mul_mod(coef, y, self.p)) % self.p;
                }
            }
            if v.iter().find(|&&x| x != 0) == Some(&1) {
                out.push(v);
            }
        }
        out.sort();
        out
    }
}

/// Span of `vectors` inside `F_p^ambient_dim`.
pub fn fp_span(vectors: &[Vec<u64>], p: u64, ambient_dim: usize) -> Result<FpSubspace> {
    check_prime(p)?;
    for v in vectors {
        if v.len() != ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient dimension {}",
                v.len(),
                ambient_dim
            )));
        }
    }
    let rows = vectors.iter().map(|v| v.iter().map(|x| x % p).collect()).collect();
    Ok(FpSubspace::from_rows_unchecked(p, ambient_dim, rows))
}

/// Rank over `F_p` of a matrix given by rows.
pub fn fp_rank(rows: &[Vec<u64>], p: u64) -> usize {
    let rows = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    rref(rows, p).0.len()
}

/// Some `c` with `sum_j c_j * columns[j] = target` over `F_p`; free
/// variables are set to zero.
pub fn fp_solve(columns: &[Vec<u64>], target: &[u64], p: u64) -> Option<Vec<u64>> {
    let s = target.len();
    let k = columns.len();
    let rows: Vec<Vec<u64>> = (0..s)
        .map(|i| {
            let mut r: Vec<u64> = columns.iter().map(|c| c[i] % p).collect();
            r.push(target[i] % p);
            r
        })
        .collect();
    let (reduced, pivots) = rref(rows, p);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut c = vec![0u64; k];
    for (row, &pc) in reduced.iter().zip(&pivots) {
        c[pc] = row[k];
    }
    Some(c)
}

/// Result of [`min_cost_spanning_tower`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTower {
    pub total_cost: u64,
    /// Chosen vectors with the index of the subspace each was drawn from.
    pub chosen: Vec<(Vec<u64>, usize)>,
    /// `(c, dim W_c)` per distinct cost level, ascending.
    pub levels: Vec<(u64, usize)>,
}

/// Cheapest family of vectors spanning `target`, each vector drawn from one
/// of the costed subspaces (a subspace may be drawn from repeatedly).
///
/// Vectors from a subspace span a linear matroid with weights, so processing
/// cost levels in ascending order and extending the running span with
/// echelon basis vectors of each subspace is optimal. Within a level the
/// subspaces are visited in input order.
pub fn min_cost_spanning_tower(subspaces: &[(FpSubspace, u64)], target: &FpSubspace) -> Result<SpanningTower> {
    for (s, cost) in subspaces {
        if s.p != target.p || s.ambient_dim != target.ambient_dim {
            return Err(Error::DimensionMismatch(
                "subspace and target live in different spaces".into(),
            ));
        }
        if *cost == 0 {
            return Err(Error::InvalidParameter("costs must be positive".into()));
        }
    }
    let mut order: Vec<usize> = (0..subspaces.len()).collect();
    order.sort_by_key(|&i| (subspaces[i].1, i));

    let mut span = FpSubspace::zero(target.p, target.ambient_dim);
    let mut chosen = Vec::new();
    let mut levels: Vec<(u64, usize)> = Vec::new();
    let mut total_cost = 0u64;
    for &i in &order {
        let (sub, cost) = &subspaces[i];
        let eligible = sub.intersect(target);
        for v in eligible.basis() {
            if span.dim() == target.dim() {
                break;
            }
            if !span.contains(v) {
                span = span.with_vector(v);
                chosen.push((v.clone(), i));
                total_cost += cost;
            }
        }
        match levels.last_mut() {
            Some(last) if last.0 == *cost => last.1 = span.dim(),
            _ => levels.push((*cost, span.dim())),
        }
    }
    if span.dim() != target.dim() {
        return Err(Error::Infeasible);
    }
    Ok(SpanningTower {
        total_cost,
        chosen,
        levels,
    })
}
