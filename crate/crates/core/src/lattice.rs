//! Exact integer linear algebra: Smith and Hermite normal forms, saturated
//! kernels, quotient lattices and finite abelian groups.
//!
//! Everything here works over arbitrary-precision integers. Rational
//! elimination is used only where a field is required (rank over `Q`,
//! determinants, square solves), and it is exact as well.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. All rows must have
    /// length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row {r}");
            for (c, x) in row.iter().enumerate() {
                m[(r, c)] = BigInt::from(*x);
            }
        }
        m
    }

    /// The matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged column {c}");
            for (r, x) in col.iter().enumerate() {
                m[(r, c)] = BigInt::from(*x);
            }
        }
        m
    }

    pub fn from_big_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols);
            data.extend(row);
        }
        IntMatrix { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let prod = a * &other[(k, c)];
                    out[(r, c)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul_vec_i64(&self, v: &[i64]) -> Vec<BigInt> {
        let big: Vec<BigInt> = v.iter().map(|x| BigInt::from(*x)).collect();
        self.mul_vec(&big)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Rows as machine integers; fails if an entry does not fit in `i64`.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows).map(|r| to_i64_vec(self.row(r))).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let delta = k * &self[(src, c)];
            self[(dst, c)] += delta;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let delta = k * &self[(r, src)];
            self[(r, dst)] += delta;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let x = -std::mem::take(&mut self[(r, c)]);
            self[(r, c)] = x;
        }
    }
}

pub fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::Overflow(format!("integer {x} exceeds 64 bits")))
        })
        .collect()
}

pub fn to_big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|x| BigInt::from(*x)).collect()
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, x| g.gcd(x))
}

/// Result of [`smith_normal_form`]: `u * a * v == d`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `d_0 | d_1 | ...`, including trailing zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form with unimodular transforms.
///
/// Pivoting always takes the smallest nonzero absolute value in the active
/// submatrix, ties broken in row-major order, so `u` and `v` are
/// deterministic.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pr, pc)) = smallest_entry(&d, t) else {
                return SmithForm { u, d, v };
            };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);

            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&pivot);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&pivot);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Pivot must divide the whole remaining block.
            let bad_row = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match bad_row {
                Some(i) => {
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
    }
    SmithForm { u, d, v }
}

fn smallest_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for r in t..d.rows {
        for c in t..d.cols {
            let x = &d[(r, c)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((br, bc)) if d[(br, bc)].abs() <= x.abs() => {}
                _ => best = Some((r, c)),
            }
        }
    }
    best
}

/// Basis of the saturated integer kernel `{x : a x = 0}`.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    (rank..a.cols).map(|c| snf.v.column(c)).collect()
}

/// Some integral `x` with `a x = b`, if one exists.
pub fn solve_integral(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len());
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let rank = snf.rank();
    let mut y = vec![BigInt::zero(); a.cols];
    for i in 0..a.rows {
        if i < rank {
            let (q, r) = ub[i].div_rem(&diag[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Row-style Hermite normal form of the lattice spanned by the rows of
/// `gens`, with zero rows dropped. Pivots are positive and entries above a
/// pivot lie in `[0, pivot)`.
pub fn hermite_normal_form(gens: &IntMatrix) -> IntMatrix {
    let mut h = gens.clone();
    let mut lead = 0usize;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for c in 0..h.cols {
        if lead == h.rows {
            break;
        }
        // Euclid down the column until a single nonzero entry remains.
        loop {
            let mut best: Option<usize> = None;
            for r in lead..h.rows {
                if h[(r, c)].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if h[(b, c)].abs() <= h[(r, c)].abs() => {}
                    _ => best = Some(r),
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(lead, b);
            let mut done = true;
            for r in lead + 1..h.rows {
                if h[(r, c)].is_zero() {
                    continue;
                }
                let q = -h[(r, c)].div_floor(&h[(lead, c)]);
                h.add_row_multiple(r, lead, &q);
                if !h[(r, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(lead, c)].is_zero() {
            continue;
        }
        if h[(lead, c)].is_negative() {
            h.negate_row(lead);
        }
        let p = h[(lead, c)].clone();
        for &(r, _) in &pivots {
            let q = -h[(r, c)].div_floor(&p);
            h.add_row_multiple(r, lead, &q);
        }
        pivots.push((lead, c));
        lead += 1;
    }
    let kept: Vec<Vec<BigInt>> = (0..lead).map(|r| h.row(r).to_vec()).collect();
    IntMatrix::from_big_rows(h.cols, kept)
}

/// Canonical representatives of `Z^cols / L` for a lattice `L` given by
/// generators, via Hermite reduction.
#[derive(Clone, Debug)]
pub struct HermiteReducer {
    hnf: IntMatrix,
    pivots: Vec<usize>,
}

impl HermiteReducer {
    pub fn new(cols: usize, generators: &[Vec<i64>]) -> Self {
        let hnf = hermite_normal_form(&IntMatrix::from_rows(cols, generators));
        let pivots = (0..hnf.rows)
            .map(|r| {
                (0..hnf.cols)
                    .find(|&c| !hnf[(r, c)].is_zero())
                    .expect("HNF rows are nonzero")
            })
            .collect();
        HermiteReducer { hnf, pivots }
    }

    pub fn hnf(&self) -> &IntMatrix {
        &self.hnf
    }

    /// Pivot column and pivot value for each HNF row.
    pub fn pivots(&self) -> Vec<(usize, i64)> {
        self.pivots
            .iter()
            .enumerate()
            .map(|(r, &c)| (c, self.hnf[(r, c)].to_i64().expect("small pivot")))
            .collect()
    }

    /// Columns carrying no pivot; they index a basis of the free part.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.hnf.cols).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// The unique representative of `x + L` whose pivot entries lie in
    /// `[0, pivot)`.
    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        let mut v = to_big_vec(x);
        for (r, &c) in self.pivots.iter().enumerate() {
            let q = v[c].div_floor(&self.hnf[(r, c)]);
            if q.is_zero() {
                continue;
            }
            for (j, entry) in v.iter_mut().enumerate() {
                *entry -= &q * &self.hnf[(r, j)];
            }
        }
        to_i64_vec(&v).expect("reduced class fits in i64")
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.reduce(x).iter().all(|v| *v == 0)
    }
}

/// Exact rank over `Q`.
pub fn rank_rational(a: &IntMatrix) -> usize {
    let mut m: Vec<Vec<BigRational>> = (0..a.rows)
        .map(|r| a.row(r).iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    row_reduce(&mut m, a.cols)
}

fn row_reduce(m: &mut [Vec<BigRational>], cols: usize) -> usize {
    let rows = m.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let width = m[rank].len();
        let inv = m[rank][c].recip();
        for j in c..width {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for r in 0..rows {
            if r == rank || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone();
            for j in c..width {
                let delta = &f * &m[rank][j];
                m[r][j] -= delta;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn determinant(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|r| a.row(r).iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        let inv = m[c][c].recip();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] * &inv;
            for j in c..n {
                let delta = &f * &m[c][j];
                m[r][j] -= delta;
            }
        }
    }
    debug_assert!(det.is_integer());
    det.to_integer()
}

/// Unique rational solution of a square nonsingular system.
pub fn solve_rational(a: &IntMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(a.rows, a.cols);
    assert_eq!(a.rows, b.len());
    let n = a.rows;
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            let mut row: Vec<BigRational> = a.row(r).iter().cloned().map(BigRational::from_integer).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    if row_reduce(&mut m, n) < n {
        return None;
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Finite abelian group `Z/d_1 + ... + Z/d_k` with `d_i | d_{i+1}`, each at
/// least 2, together with the projection from the ambient lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<BigInt>,
    projection: IntMatrix,
}

impl FiniteAbelianGroup {
    pub fn trivial(ambient_rank: usize) -> Self {
        FiniteAbelianGroup {
            invariant_factors: Vec::new(),
            projection: IntMatrix::zeros(0, ambient_rank),
        }
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().fold(BigInt::one(), |acc, d| acc * d)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Residues of an ambient vector, one per invariant factor.
    pub fn project(&self, x: &[i64]) -> Vec<BigInt> {
        self.projection
            .mul_vec_i64(x)
            .into_iter()
            .zip(&self.invariant_factors)
            .map(|(y, d)| y.mod_floor(d))
            .collect()
    }
}

/// Quotient of `Z^ambient_rank` by the sublattice spanned by `gens`.
#[derive(Clone, Debug)]
pub struct QuotientProjection {
    /// Maps the ambient lattice onto the free quotient `N / (span_R(gens) ∩ N)`.
    pub proj: IntMatrix,
    /// Finite part of `N / <gens>`.
    pub torsion: FiniteAbelianGroup,
}

pub fn quotient_projection(ambient_rank: usize, gens: &[Vec<i64>]) -> QuotientProjection {
    if gens.is_empty() {
        return QuotientProjection {
            proj: IntMatrix::identity(ambient_rank),
            torsion: FiniteAbelianGroup::trivial(ambient_rank),
        };
    }
    let g = IntMatrix::from_columns(ambient_rank, gens);
    let snf = smith_normal_form(&g);
    let rank = snf.rank();
    let diag = snf.diagonal();
    let free_rows: Vec<Vec<BigInt>> = (rank..ambient_rank).map(|r| snf.u.row(r).to_vec()).collect();
    let proj = IntMatrix::from_big_rows(ambient_rank, free_rows);

    let mut factors = Vec::new();
    let mut rows = Vec::new();
    for (i, d) in diag.iter().enumerate().take(rank) {
        if *d > BigInt::one() {
            factors.push(d.clone());
            rows.push(snf.u.row(i).to_vec());
        }
    }
    QuotientProjection {
        proj,
        torsion: FiniteAbelianGroup {
            invariant_factors: factors,
            projection: IntMatrix::from_big_rows(ambient_rank, rows),
        },
    }
}
