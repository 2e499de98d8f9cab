//! Symmetric bilinear forms over the rationals and integer matrices.
//!
//! Every computation here is exact. Signatures come from congruent
//! diagonalization with rational pivots; a block whose diagonal has vanished
//! but still carries an off-diagonal entry `b` is split off as the hyperbolic
//! pair `[[0, b], [b, 0]]`, contributing one positive and one negative square.
//!
//! The empty form has determinant 1, rank 0 and signature 0.

#![allow(clippy::needless_range_loop)]

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numbers::{format_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index error: {0}")]
    IndexError(String),
    #[error("block {0:?} is degenerate")]
    SingularBlock(Vec<usize>),
}

/// Counts of positive, negative and zero squares after diagonalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }

    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }
}

/// Symmetric rational matrix with a named basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymmetricForm {
    labels: Vec<String>,
    entries: Vec<Vec<Rational>>,
}

impl SymmetricForm {
    pub fn new(labels: Vec<String>, entries: Vec<Vec<Rational>>) -> Result<Self, LatticeError> {
        let dim = labels.len();
        if entries.len() != dim || entries.iter().any(|row| row.len() != dim) {
            return Err(LatticeError::DimensionMismatch(format!("{dim} labels for a {}-row matrix", entries.len())));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(LatticeError::DuplicateLabel(label.clone()));
            }
        }
        for i in 0..dim {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
        }
        Ok(SymmetricForm { labels, entries })
    }

    pub fn from_integers<S: AsRef<str>>(labels: &[S], rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let entries = rows.iter().map(|row| row.iter().map(|&x| rat(x)).collect()).collect();
        Self::new(labels.iter().map(|s| s.as_ref().to_string()).collect(), entries)
    }

    /// Integer form with generated labels `v1, v2, ...`.
    pub fn unlabeled(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let labels: Vec<String> = (1..=rows.len()).map(|i| format!("v{i}")).collect();
        Self::from_integers(&labels, rows)
    }

    pub fn empty() -> Self {
        SymmetricForm { labels: Vec::new(), entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_integer())
    }

    pub(crate) fn set_symmetric(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i][j] = value.clone();
        self.entries[j][i] = value;
    }

    /// Appends a basis vector with the given couplings to the existing basis.
    pub fn extended(&self, label: &str, couplings: &[Rational], square: Rational) -> Result<Self, LatticeError> {
        if couplings.len() != self.dim() {
            return Err(LatticeError::DimensionMismatch(format!(
                "{} couplings for a form of dimension {}",
                couplings.len(),
                self.dim()
            )));
        }
        let mut labels = self.labels.clone();
        labels.push(label.to_string());
        let mut entries = self.entries.clone();
        for (row, c) in entries.iter_mut().zip(couplings) {
            row.push(c.clone());
        }
        let mut last = couplings.to_vec();
        last.push(square);
        entries.push(last);
        Self::new(labels, entries)
    }

    /// Principal submatrix on `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> SymmetricForm {
        SymmetricForm {
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            entries: indices.iter().map(|&i| indices.iter().map(|&j| self.entries[i][j].clone()).collect()).collect(),
        }
    }

    /// Removes the basis vectors at `indices` (their rows and columns).
    pub fn without(&self, indices: &[usize]) -> SymmetricForm {
        let keep: Vec<usize> = (0..self.dim()).filter(|i| !indices.contains(i)).collect();
        self.restrict(&keep)
    }

    pub fn direct_sum(&self, other: &SymmetricForm) -> Result<SymmetricForm, LatticeError> {
        let n = self.dim();
        let m = other.dim();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut entries = vec![vec![Rational::zero(); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                entries[i][j] = self.entries[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                entries[n + i][n + j] = other.entries[i][j].clone();
            }
        }
        SymmetricForm::new(labels, entries)
    }

    /// Gram matrix `v_i^T F v_j` of integer coordinate vectors.
    pub fn gram(&self, vectors: &[Vec<BigInt>], labels: Vec<String>) -> Result<SymmetricForm, LatticeError> {
        if vectors.iter().any(|v| v.len() != self.dim()) || labels.len() != vectors.len() {
            return Err(LatticeError::DimensionMismatch("gram vectors".into()));
        }
        let images: Vec<Vec<Rational>> = vectors
            .iter()
            .map(|v| {
                (0..self.dim())
                    .map(|row| {
                        v.iter()
                            .zip(&self.entries[row])
                            .filter(|(c, _)| !c.is_zero())
                            .fold(Rational::zero(), |acc, (c, x)| acc + x * Rational::from_integer(c.clone()))
                    })
                    .collect()
            })
            .collect();
        let entries = vectors
            .iter()
            .map(|u| {
                images
                    .iter()
                    .map(|fv| {
                        u.iter()
                            .zip(fv)
                            .filter(|(c, _)| !c.is_zero())
                            .fold(Rational::zero(), |acc, (c, x)| acc + x * Rational::from_integer(c.clone()))
                    })
                    .collect()
            })
            .collect();
        SymmetricForm::new(labels, entries)
    }

    pub fn determinant(&self) -> Rational {
        let mut a = self.entries.clone();
        let n = a.len();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &p;
                for c in col..n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
        det
    }

    pub fn rank(&self) -> usize {
        rational_rank(self.entries.clone())
    }

    pub fn inertia(&self) -> Inertia {
        let mut a = self.entries.clone();
        let mut inertia = Inertia::default();
        while !a.is_empty() {
            if let Some(i) = (0..a.len()).find(|&i| !a[i][i].is_zero()) {
                let p = a[i][i].clone();
                if p.is_positive() {
                    inertia.positive += 1;
                } else {
                    inertia.negative += 1;
                }
                let row = a[i].clone();
                let rest: Vec<usize> = (0..a.len()).filter(|&r| r != i).collect();
                a = rest.iter().map(|&r| rest.iter().map(|&s| &a[r][s] - &a[r][i] * &row[s] / &p).collect()).collect();
                continue;
            }
            let off = (0..a.len()).find_map(|i| (i + 1..a.len()).find(|&j| !a[i][j].is_zero()).map(|j| (i, j)));
            let Some((i, j)) = off else {
                inertia.zero += a.len();
                break;
            };
            // Hyperbolic pivot [[0, b], [b, 0]] with inverse [[0, 1/b], [1/b, 0]].
            inertia.positive += 1;
            inertia.negative += 1;
            let b = a[i][j].clone();
            let rest: Vec<usize> = (0..a.len()).filter(|&r| r != i && r != j).collect();
            a = rest
                .iter()
                .map(|&r| rest.iter().map(|&s| &a[r][s] - (&a[r][i] * &a[j][s] + &a[r][j] * &a[i][s]) / &b).collect())
                .collect();
        }
        inertia
    }

    pub fn signature(&self) -> i64 {
        self.inertia().signature()
    }

    pub fn is_negative_definite(&self) -> bool {
        let inertia = self.inertia();
        inertia.negative == self.dim()
    }

    /// Elementary congruence `b_i <- b_i + sign * b_j`, the lattice effect of
    /// sliding handle `i` over handle `j`.
    pub fn congruence_slide(&self, i: usize, j: usize, sign: i64) -> Result<SymmetricForm, LatticeError> {
        let n = self.dim();
        if i >= n || j >= n {
            return Err(LatticeError::IndexError(format!("slide ({i}, {j}) in dimension {n}")));
        }
        if i == j {
            return Err(LatticeError::IndexError(format!("cannot slide basis vector {i} over itself")));
        }
        if sign != 1 && sign != -1 {
            return Err(LatticeError::IndexError(format!("slide sign must be +1 or -1, got {sign}")));
        }
        let s = rat(sign);
        let mut a = self.entries.clone();
        for c in 0..n {
            let delta = &s * &a[j][c];
            a[i][c] += delta;
        }
        for r in 0..n {
            let delta = &s * &a[r][j];
            a[r][i] += delta;
        }
        Ok(SymmetricForm { labels: self.labels.clone(), entries: a })
    }

    /// `F_rest - L^T B^{-1} L` for the principal block on `block`.
    pub fn schur_complement(&self, block: &[usize]) -> Result<SymmetricForm, LatticeError> {
        let n = self.dim();
        let mut seen = HashSet::new();
        for &b in block {
            if b >= n || !seen.insert(b) {
                return Err(LatticeError::IndexError(format!("bad block index {b}")));
            }
        }
        if block.is_empty() {
            return Ok(self.clone());
        }
        let inverse =
            invert(&self.restrict(block).entries).ok_or_else(|| LatticeError::SingularBlock(block.to_vec()))?;
        let rest: Vec<usize> = (0..n).filter(|i| !block.contains(i)).collect();
        // coupling[r][k] = F[rest_r][block_k]
        let coupling: Vec<Vec<Rational>> =
            rest.iter().map(|&r| block.iter().map(|&b| self.entries[r][b].clone()).collect()).collect();
        let solved: Vec<Vec<Rational>> = coupling
            .iter()
            .map(|row| {
                (0..block.len())
                    .map(|k| row.iter().zip(&inverse).fold(Rational::zero(), |acc, (x, inv_row)| acc + x * &inv_row[k]))
                    .collect()
            })
            .collect();
        let entries = rest
            .iter()
            .enumerate()
            .map(|(ri, &r)| {
                rest.iter()
                    .enumerate()
                    .map(|(si, &s)| {
                        let correction =
                            solved[ri].iter().zip(&coupling[si]).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
                        &self.entries[r][s] - correction
                    })
                    .collect()
            })
            .collect();
        Ok(SymmetricForm { labels: rest.iter().map(|&r| self.labels[r].clone()).collect(), entries })
    }
}

impl fmt::Display for SymmetricForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", format_rational(x))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn determinant(f: &SymmetricForm) -> Rational {
    f.determinant()
}

pub fn signature(f: &SymmetricForm) -> i64 {
    f.signature()
}

pub fn rank(f: &SymmetricForm) -> usize {
    f.rank()
}

pub fn is_negative_definite(f: &SymmetricForm) -> bool {
    f.is_negative_definite()
}

pub fn congruence_slide(f: &SymmetricForm, i: usize, j: usize, sign: i64) -> Result<SymmetricForm, LatticeError> {
    f.congruence_slide(i, j, sign)
}

pub fn schur_complement(f: &SymmetricForm, block: &[usize]) -> Result<SymmetricForm, LatticeError> {
    f.schur_complement(block)
}

fn rational_rank(mut a: Vec<Vec<Rational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(pivot, rank);
        for r in rank + 1..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[rank][col];
            for c in col..cols {
                let delta = &factor * &a[rank][c];
                a[r][c] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

/// Gauss-Jordan inverse; `None` when singular.
pub(crate) fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot, col);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= &p;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * y;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Dense integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<BigInt>>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(LatticeError::DimensionMismatch(format!("expected {rows}x{cols} integer matrix")));
        }
        Ok(IntegerMatrix { rows, cols, entries })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::new(rows.len(), cols, rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, entries: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    /// Smith normal form diagonal `d1 | d2 | ...`, `min(rows, cols)` entries.
    pub fn smith_normal_form(&self) -> Vec<BigInt> {
        let mut a = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let size = rows.min(cols);
        let mut diagonal = Vec::with_capacity(size);
        for t in 0..size {
            let Some((pr, pc)) = min_nonzero(&a, t) else {
                diagonal.extend(std::iter::repeat_n(BigInt::zero(), size - t));
                break;
            };
            a.swap(t, pr);
            for row in a.iter_mut() {
                row.swap(t, pc);
            }
            loop {
                let mut dirty = false;
                for r in t + 1..rows {
                    if a[r][t].is_zero() {
                        continue;
                    }
                    let q = a[r][t].div_floor(&a[t][t]);
                    for c in t..cols {
                        let delta = &q * &a[t][c];
                        a[r][c] -= delta;
                    }
                    if !a[r][t].is_zero() {
                        dirty = true;
                    }
                }
                for c in t + 1..cols {
                    if a[t][c].is_zero() {
                        continue;
                    }
                    let q = a[t][c].div_floor(&a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        let delta = &q * &row[t];
                        row[c] -= delta;
                    }
                    if !a[t][c].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    let (pr, pc) = min_nonzero_cross(&a, t);
                    a.swap(t, pr);
                    for row in a.iter_mut() {
                        row.swap(t, pc);
                    }
                    continue;
                }
                let offender = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| !a[r][c].is_multiple_of(&a[t][t])));
                match offender {
                    Some(r) => {
                        for c in t..cols {
                            let v = a[r][c].clone();
                            a[t][c] += v;
                        }
                    }
                    None => break,
                }
            }
            diagonal.push(a[t][t].abs());
        }
        diagonal
    }

    /// Returns `(rank, basis)` where `basis` is a Z-basis of the integer
    /// kernel `{x : A x = 0}`, found by unimodular column reduction.
    pub fn kernel_basis(&self) -> (usize, Vec<Vec<BigInt>>) {
        let mut a = self.entries.clone();
        let n = self.cols;
        let mut v: Vec<Vec<BigInt>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
        let mut pivot = 0;
        for r in 0..self.rows {
            if pivot >= n {
                break;
            }
            for j in pivot + 1..n {
                let b = a[r][j].clone();
                if b.is_zero() {
                    continue;
                }
                let x = a[r][pivot].clone();
                let e = x.extended_gcd(&b);
                let (g, s, t) = (e.gcd, e.x, e.y);
                let (bg, xg) = (&b / &g, &x / &g);
                // col_p <- s col_p + t col_j ; col_j <- -b/g col_p + x/g col_j
                combine_columns(&mut a, pivot, j, &s, &t, &bg, &xg);
                combine_columns(&mut v, pivot, j, &s, &t, &bg, &xg);
            }
            if !a[r][pivot].is_zero() {
                pivot += 1;
            }
        }
        let basis = (pivot..n).map(|c| v.iter().map(|row| row[c].clone()).collect()).collect();
        (pivot, basis)
    }

    pub fn rank(&self) -> usize {
        self.kernel_basis().0
    }
}

fn combine_columns(m: &mut [Vec<BigInt>], p: usize, j: usize, s: &BigInt, t: &BigInt, bg: &BigInt, xg: &BigInt) {
    for row in m.iter_mut() {
        let (cp, cj) = (row[p].clone(), row[j].clone());
        row[p] = s * &cp + t * &cj;
        row[j] = xg * &cj - bg * &cp;
    }
}

fn min_nonzero(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (r, row) in a.iter().enumerate().skip(t) {
        for (c, x) in row.iter().enumerate().skip(t) {
            if !x.is_zero() && best.is_none_or(|(br, bc)| x.abs() < a[br][bc].abs()) {
                best = Some((r, c));
            }
        }
    }
    best
}

fn min_nonzero_cross(a: &[Vec<BigInt>], t: usize) -> (usize, usize) {
    let mut best = (t, t);
    for r in t..a.len() {
        if !a[r][t].is_zero() && (a[best.0][best.1].is_zero() || a[r][t].abs() < a[best.0][best.1].abs()) {
            best = (r, t);
        }
    }
    for c in t..a[t].len() {
        if !a[t][c].is_zero() && (a[best.0][best.1].is_zero() || a[t][c].abs() < a[best.0][best.1].abs()) {
            best = (t, c);
        }
    }
    best
}

pub fn smith_normal_form(m: &IntegerMatrix) -> Vec<BigInt> {
    m.smith_normal_form()
}
