use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{is_zero_vec, IntMatrix};

/// `U * M * V = D` with `U`, `V` unimodular and `D` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl SmithDecomposition {
    /// The nonzero diagonal entries `d_1 | d_2 | ... | d_rank`, all positive.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Position of the entry of least nonzero absolute value in the trailing
/// submatrix starting at `(t, t)`; ties go to the first in row-major order.
fn smallest_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d[(bi, bj)].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form with transformation matrices.
///
/// The pivot is always the entry of smallest absolute value in the remaining
/// submatrix (ties broken row-major), so the output is a deterministic
/// function of the input.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = m.shape();
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut t = 0;

    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_pivot(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let pivot = d[(t, t)].clone();
            let mut leftover = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&pivot);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                leftover |= !d[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&pivot);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                leftover |= !d[(t, j)].is_zero();
            }
            if leftover {
                // a remainder smaller than the pivot survived; re-pivot
                let (pi, pj) = smallest_pivot(&d, t).expect("nonzero entry present");
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            // row and column are clear; enforce divisibility of the rest
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&pivot));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }

    SmithDecomposition { u, d, v, rank: t }
}

/// Canonical basis of the lattice spanned by the given columns, in column
/// Hermite normal form: pivots strictly descend to the right, are positive,
/// entries above a pivot are zero, and entries to the left of a pivot in
/// its row lie in `0..pivot`.
pub fn lattice_basis(generators: &IntMatrix) -> IntMatrix {
    let n = generators.rows();
    let mut pending: Vec<Vec<BigInt>> = generators.columns().into_iter().filter(|c| !is_zero_vec(c)).collect();
    let mut basis: Vec<(usize, Vec<BigInt>)> = Vec::new();

    for row in 0..n {
        loop {
            let nz: Vec<usize> = (0..pending.len()).filter(|&j| !pending[j][row].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz
                .iter()
                .min_by(|&&a, &&b| pending[a][row].abs().cmp(&pending[b][row].abs()))
                .unwrap();
            let pcol = pending[piv].clone();
            for &j in &nz {
                if j == piv {
                    continue;
                }
                let q = pending[j][row].div_floor(&pcol[row]);
                for (x, y) in pending[j].iter_mut().zip(&pcol) {
                    *x -= &q * y;
                }
            }
            pending.retain(|c| !is_zero_vec(c));
        }
        if let Some(j) = (0..pending.len()).find(|&j| !pending[j][row].is_zero()) {
            let mut col = pending.remove(j);
            if col[row].is_negative() {
                col.iter_mut().for_each(|x| *x = -std::mem::take(x));
            }
            basis.push((row, col));
        }
    }
    debug_assert!(pending.is_empty());

    // reduce entries left of each pivot
    for j in 1..basis.len() {
        let (prow, pcol) = basis[j].clone();
        for entry in basis.iter_mut().take(j) {
            let q = entry.1[prow].div_floor(&pcol[prow]);
            if !q.is_zero() {
                for (x, y) in entry.1.iter_mut().zip(&pcol) {
                    *x -= &q * y;
                }
            }
        }
    }

    let cols: Vec<Vec<BigInt>> = basis.into_iter().map(|(_, c)| c).collect();
    IntMatrix::from_columns(n, &cols)
}

/// Basis of `{x in Z^cols : M x = 0}` as columns, in Hermite normal form.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let raw = snf.v.col_range(snf.rank, m.cols());
    lattice_basis(&raw)
}

/// Rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank
}

/// Inverse of a unimodular square matrix, or `None` if `m` is not unimodular.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    if !m.is_square() {
        return None;
    }
    let snf = smith_normal_form(m);
    if snf.rank != m.rows() || !snf.invariant_factors().iter().all(One::is_one) {
        return None;
    }
    // U M V = I  =>  M^{-1} = V U
    Some(snf.v.mul(&snf.u))
}

/// Solves `B y = v` over the integers for a fixed generator matrix `B`,
/// reusing one Smith decomposition for many right-hand sides.
#[derive(Clone, Debug)]
pub struct LatticeSolver {
    snf: SmithDecomposition,
    rows: usize,
    cols: usize,
}

impl LatticeSolver {
    pub fn new(generators: &IntMatrix) -> Self {
        LatticeSolver {
            snf: smith_normal_form(generators),
            rows: generators.rows(),
            cols: generators.cols(),
        }
    }

    pub fn rank(&self) -> usize {
        self.snf.rank
    }

    /// Some integer `y` with `B y = v`, if `v` lies in the column lattice.
    pub fn solve(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.rows, "right-hand side has wrong length");
        let w = self.snf.u.mul_vec(v);
        let mut z = vec![BigInt::zero(); self.cols];
        for (i, wi) in w.iter().enumerate() {
            if i < self.snf.rank {
                let (q, r) = wi.div_rem(&self.snf.d[(i, i)]);
                if !r.is_zero() {
                    return None;
                }
                z[i] = q;
            } else if !wi.is_zero() {
                return None;
            }
        }
        Some(self.snf.v.mul_vec(&z))
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.solve(v).is_some()
    }

    /// Whether every column of `m` lies in the lattice.
    pub fn contains_columns(&self, m: &IntMatrix) -> bool {
        (0..m.cols()).all(|j| self.contains(&m.col(j)))
    }

    /// Solves `B Y = M` column by column.
    pub fn solve_columns(&self, m: &IntMatrix) -> Option<IntMatrix> {
        let cols = (0..m.cols())
            .map(|j| self.solve(&m.col(j)))
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix::from_columns(self.cols, &cols))
    }
}
