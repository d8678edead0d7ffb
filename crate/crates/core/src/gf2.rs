//! Sparse linear algebra over GF(2) and poset-graded matrices.
//!
//! Columns are stored as strictly increasing lists of row indices; adding
//! two columns is a symmetric difference of sorted lists.

use std::collections::HashMap;

use thiserror::Error;

use crate::poset::{Grade, Poset};

/// Sorted nonzero row indices of a column.
pub type Column = Vec<usize>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("row index {row} out of range for {rows} rows")]
    RowOutOfRange { row: usize, rows: usize },
    #[error("column {0} is not strictly increasing")]
    UnsortedColumn(usize),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("entry ({row}, {col}) violates the grading: row grade is not below column grade")]
    GradingViolation { row: String, col: String },
    #[error("inner labels differ: `{0}` vs `{1}`")]
    LabelMismatch(String, String),
}

/// `acc += col` over GF(2).
pub fn add_into(acc: &mut Column, col: &[usize]) {
    if col.is_empty() {
        return;
    }
    let mut out = Vec::with_capacity(acc.len() + col.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() && j < col.len() {
        match acc[i].cmp(&col[j]) {
            std::cmp::Ordering::Less => {
                out.push(acc[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(col[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&acc[i..]);
    out.extend_from_slice(&col[j..]);
    *acc = out;
}

/// Sorts indices and keeps those occurring an odd number of times.
pub fn parity_sum(mut indices: Vec<usize>) -> Column {
    indices.sort_unstable();
    let mut out = Vec::with_capacity(indices.len());
    let mut i = 0;
    while i < indices.len() {
        let mut j = i;
        while j < indices.len() && indices[j] == indices[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(indices[i]);
        }
        i = j;
    }
    out
}

/// Column-major sparse matrix over GF(2).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: Vec<Column>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<Column>) -> Result<Self, Gf2Error> {
        for (j, col) in cols.iter().enumerate() {
            if col.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Gf2Error::UnsortedColumn(j));
            }
            if let Some(&r) = col.last() {
                if r >= rows {
                    return Err(Gf2Error::RowOutOfRange { row: r, rows });
                }
            }
        }
        Ok(Self { rows, cols })
    }

    /// Builds a matrix from dense rows of 0/1 values.
    pub fn from_dense(rows: &[&[u8]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let cols = (0..ncols)
            .map(|j| (0..rows.len()).filter(|&i| rows[i][j] != 0).collect())
            .collect();
        Self {
            rows: rows.len(),
            cols,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0; self.cols.len()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &i in col {
                out[i][j] = 1;
            }
        }
        out
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Column] {
        &self.cols
    }

    pub fn into_columns(self) -> Vec<Column> {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cols[col].binary_search(&row).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn push_column(&mut self, col: Column) -> Result<(), Gf2Error> {
        let j = self.cols.len();
        if col.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Gf2Error::UnsortedColumn(j));
        }
        if let Some(&r) = col.last() {
            if r >= self.rows {
                return Err(Gf2Error::RowOutOfRange {
                    row: r,
                    rows: self.rows,
                });
            }
        }
        self.cols.push(col);
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut cols = vec![Vec::new(); self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &i in col {
                cols[i].push(j);
            }
        }
        Self {
            rows: self.cols.len(),
            cols,
        }
    }

    /// `self * other`.
    pub fn multiply(&self, other: &Gf2Matrix) -> Result<Self, Gf2Error> {
        if self.cols.len() != other.rows {
            return Err(Gf2Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows,
                self.cols.len(),
                other.rows,
                other.cols.len()
            )));
        }
        let cols = other
            .cols
            .iter()
            .map(|col| {
                parity_sum(
                    col.iter()
                        .flat_map(|&k| self.cols[k].iter().copied())
                        .collect(),
                )
            })
            .collect();
        Ok(Self {
            rows: self.rows,
            cols,
        })
    }

    /// `self * x` for a sparse vector `x`.
    pub fn apply(&self, x: &[usize]) -> Column {
        parity_sum(
            x.iter()
                .flat_map(|&k| self.cols[k].iter().copied())
                .collect(),
        )
    }

    /// Submatrix on the given rows and columns, reindexed in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut remap = HashMap::with_capacity(rows.len());
        for (new, &old) in rows.iter().enumerate() {
            remap.insert(old, new);
        }
        let cols = cols
            .iter()
            .map(|&j| {
                let mut c: Column = self.cols[j]
                    .iter()
                    .filter_map(|r| remap.get(r).copied())
                    .collect();
                c.sort_unstable();
                c
            })
            .collect();
        Self {
            rows: rows.len(),
            cols,
        }
    }

    /// Places blocks with equal row counts side by side.
    pub fn hstack(blocks: &[&Gf2Matrix]) -> Result<Self, Gf2Error> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Gf2Error::DimensionMismatch("hstack row counts".into()));
        }
        Ok(Self {
            rows,
            cols: blocks.iter().flat_map(|b| b.cols.iter().cloned()).collect(),
        })
    }

    /// Stacks blocks with equal column counts on top of each other.
    pub fn vstack(blocks: &[&Gf2Matrix]) -> Result<Self, Gf2Error> {
        let ncols = blocks.first().map_or(0, |b| b.cols.len());
        if blocks.iter().any(|b| b.cols.len() != ncols) {
            return Err(Gf2Error::DimensionMismatch("vstack column counts".into()));
        }
        let mut cols = vec![Vec::new(); ncols];
        let mut offset = 0;
        for b in blocks {
            for (j, col) in b.cols.iter().enumerate() {
                cols[j].extend(col.iter().map(|&r| r + offset));
            }
            offset += b.rows;
        }
        Ok(Self { rows: offset, cols })
    }
}

/// Left-to-right column echelon form of a matrix.
#[derive(Clone, Debug)]
pub struct ColumnReduction {
    /// Reduced columns; nonzero ones have pairwise distinct pivots.
    pub reduced: Gf2Matrix,
    /// `reduced = original * transform`, upper unitriangular.
    pub transform: Gf2Matrix,
    /// Pivot (largest row index) of each reduced column.
    pub pivots: Vec<Option<usize>>,
    /// Columns that reduced to zero, in increasing order.
    pub zeroed: Vec<usize>,
}

/// Reduces columns left to right, adding only earlier columns to later ones.
pub fn column_reduce(m: &Gf2Matrix) -> ColumnReduction {
    let mut reduced = m.cols.clone();
    let mut transform: Vec<Column> = (0..m.cols.len()).map(|j| vec![j]).collect();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    let mut pivots = Vec::with_capacity(m.cols.len());
    let mut zeroed = Vec::new();
    for j in 0..reduced.len() {
        while let Some(&low) = reduced[j].last() {
            match owner.get(&low) {
                Some(&k) => {
                    let (head, tail) = reduced.split_at_mut(j);
                    add_into(&mut tail[0], &head[k]);
                    let (head, tail) = transform.split_at_mut(j);
                    add_into(&mut tail[0], &head[k]);
                }
                None => break,
            }
        }
        match reduced[j].last() {
            Some(&low) => {
                owner.insert(low, j);
                pivots.push(Some(low));
            }
            None => {
                pivots.push(None);
                zeroed.push(j);
            }
        }
    }
    let n = m.cols.len();
    ColumnReduction {
        reduced: Gf2Matrix {
            rows: m.rows,
            cols: reduced,
        },
        transform: Gf2Matrix {
            rows: n,
            cols: transform,
        },
        pivots,
        zeroed,
    }
}

pub fn rank(m: &Gf2Matrix) -> usize {
    let mut e = Echelon::new();
    m.cols.iter().filter(|c| e.insert(c)).count()
}

/// A basis of the null space, as sparse vectors over the column indices.
pub fn kernel_basis(m: &Gf2Matrix) -> Vec<Column> {
    let r = column_reduce(m);
    r.zeroed
        .iter()
        .map(|&j| r.transform.column(j).to_vec())
        .collect()
}

/// Some `x` with `m x = b`, or `None` if `b` is not in the column space.
pub fn solve(m: &Gf2Matrix, b: &[usize]) -> Option<Column> {
    let mut e = Echelon::new();
    for (j, col) in m.cols.iter().enumerate() {
        e.insert_tagged(col, j);
    }
    let (residual, combo) = e.reduce_tagged(b);
    residual.is_empty().then_some(combo)
}

/// Incrementally built echelon basis keyed by pivot (largest row index).
///
/// Each stored vector carries the set of inserted tags it is a sum of, so
/// reductions can report which inserted vectors were used.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    by_pivot: HashMap<usize, (Column, Column)>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.by_pivot.len()
    }

    /// Reduces `v` against the basis.
    pub fn reduce(&self, v: &[usize]) -> Column {
        let mut v = v.to_vec();
        while let Some(&low) = v.last() {
            match self.by_pivot.get(&low) {
                Some((b, _)) => add_into(&mut v, b),
                None => break,
            }
        }
        v
    }

    /// Reduces `v` and returns the residual and the tags used.
    pub fn reduce_tagged(&self, v: &[usize]) -> (Column, Column) {
        let mut v = v.to_vec();
        let mut tags = Vec::new();
        while let Some(&low) = v.last() {
            match self.by_pivot.get(&low) {
                Some((b, t)) => {
                    add_into(&mut v, b);
                    add_into(&mut tags, t);
                }
                None => break,
            }
        }
        (v, tags)
    }

    pub fn contains(&self, v: &[usize]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns whether it was independent of the basis.
    pub fn insert(&mut self, v: &[usize]) -> bool {
        let r = self.reduce(v);
        match r.last() {
            Some(&low) => {
                self.by_pivot.insert(low, (r, Vec::new()));
                true
            }
            None => false,
        }
    }

    /// Adds `v` under `tag`; returns whether it was independent.
    pub fn insert_tagged(&mut self, v: &[usize], tag: usize) -> bool {
        let (r, mut tags) = self.reduce_tagged(v);
        match r.last() {
            Some(&low) => {
                add_into(&mut tags, &[tag]);
                self.by_pivot.insert(low, (r, tags));
                true
            }
            None => false,
        }
    }
}

/// A row or column label of a graded matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub name: String,
    pub grade: Grade,
}

impl Label {
    pub fn new(name: impl Into<String>, grade: Grade) -> Self {
        Self {
            name: name.into(),
            grade,
        }
    }
}

/// A morphism between projective modules: a GF(2) matrix whose rows and
/// columns carry grades, with entries only where row grade <= column grade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMatrix {
    rows: Vec<Label>,
    cols: Vec<Label>,
    entries: Gf2Matrix,
}

/// A graded matrix evaluated at a grade, with the surviving indices.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub matrix: Gf2Matrix,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

fn check_unique(labels: &[Label]) -> Result<(), Gf2Error> {
    let mut seen = std::collections::HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert((&l.name, l.grade)) {
            return Err(Gf2Error::DuplicateLabel(l.name.clone()));
        }
    }
    Ok(())
}

impl GradedMatrix {
    pub fn new(
        poset: &Poset,
        rows: Vec<Label>,
        cols: Vec<Label>,
        entries: Gf2Matrix,
    ) -> Result<Self, Gf2Error> {
        if entries.row_count() != rows.len() || entries.col_count() != cols.len() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "{} row and {} column labels for a {}x{} matrix",
                rows.len(),
                cols.len(),
                entries.row_count(),
                entries.col_count()
            )));
        }
        check_unique(&rows)?;
        check_unique(&cols)?;
        for (j, col) in entries.columns().iter().enumerate() {
            for &i in col {
                if !poset.leq(rows[i].grade, cols[j].grade) {
                    return Err(Gf2Error::GradingViolation {
                        row: format!("{}@{}", rows[i].name, poset.name(rows[i].grade)),
                        col: format!("{}@{}", cols[j].name, poset.name(cols[j].grade)),
                    });
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zero(rows: Vec<Label>, cols: Vec<Label>) -> Self {
        let entries = Gf2Matrix::zeros(rows.len(), cols.len());
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn row_labels(&self) -> &[Label] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[Label] {
        &self.cols
    }

    pub fn entries(&self) -> &Gf2Matrix {
        &self.entries
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_zero()
    }

    /// The linear map at `x`: rows and columns of grade `<= x`.
    pub fn restrict_at(&self, poset: &Poset, x: Grade) -> Restriction {
        self.restrict_where(poset, x, |g| poset.leq(g, x))
    }

    /// Rows of grade `<= x` and columns of grade strictly below `x`.
    pub fn restrict_below(&self, poset: &Poset, x: Grade) -> Restriction {
        self.restrict_where(poset, x, |g| poset.lt(g, x))
    }

    fn restrict_where(
        &self,
        poset: &Poset,
        x: Grade,
        keep_col: impl Fn(Grade) -> bool,
    ) -> Restriction {
        let rows: Vec<usize> = (0..self.rows.len())
            .filter(|&i| poset.leq(self.rows[i].grade, x))
            .collect();
        let cols: Vec<usize> = (0..self.cols.len())
            .filter(|&j| keep_col(self.cols[j].grade))
            .collect();
        Restriction {
            matrix: self.entries.submatrix(&rows, &cols),
            rows,
            cols,
        }
    }

    /// Composition `self * other`; the inner labels must agree.
    pub fn multiply(&self, other: &GradedMatrix, poset: &Poset) -> Result<Self, Gf2Error> {
        if self.cols.len() != other.rows.len() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "{} columns against {} rows",
                self.cols.len(),
                other.rows.len()
            )));
        }
        if let Some((a, b)) = self.cols.iter().zip(&other.rows).find(|(a, b)| a != b) {
            return Err(Gf2Error::LabelMismatch(a.name.clone(), b.name.clone()));
        }
        let entries = self.entries.multiply(&other.entries)?;
        Self::new(poset, self.rows.clone(), other.cols.clone(), entries)
    }

    /// Column indices sorted by (linear-extension position of grade, index).
    pub fn grade_order(&self, poset: &Poset) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.cols.len()).collect();
        idx.sort_by_key(|&j| (poset.position(self.cols[j].grade), j));
        idx
    }

    /// Keeps the given columns in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let all: Vec<usize> = (0..self.rows.len()).collect();
        Self {
            rows: self.rows.clone(),
            cols: cols.iter().map(|&j| self.cols[j].clone()).collect(),
            entries: self.entries.submatrix(&all, cols),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_matrix(rows: usize, bits: &[Vec<bool>]) -> Gf2Matrix {
        let cols = bits
            .iter()
            .map(|c| {
                (0..rows)
                    .filter(|&i| c.get(i).copied().unwrap_or(false))
                    .collect()
            })
            .collect();
        Gf2Matrix::from_columns(rows, cols).unwrap()
    }

    /// Dense rank by row elimination, written independently of `Echelon`.
    fn dense_rank(m: &Gf2Matrix) -> usize {
        let mut rows = m.to_dense();
        let ncols = m.col_count();
        let mut r = 0;
        for c in 0..ncols {
            if let Some(p) = (r..rows.len()).find(|&i| rows[i][c] == 1) {
                rows.swap(r, p);
                for i in 0..rows.len() {
                    if i != r && rows[i][c] == 1 {
                        for k in 0..ncols {
                            rows[i][k] ^= rows[r][k];
                        }
                    }
                }
                r += 1;
            }
        }
        r
    }

    fn kernel_example() -> Gf2Matrix {
        Gf2Matrix::from_dense(&[
            &[1, 1, 0, 0, 0],
            &[1, 0, 1, 0, 0],
            &[0, 1, 0, 1, 1],
            &[0, 0, 1, 1, 1],
        ])
    }

    #[test]
    fn add_into_is_xor() {
        let mut a = vec![0, 2, 5];
        add_into(&mut a, &[2, 3]);
        assert_eq!(a, vec![0, 3, 5]);
        add_into(&mut a, &[0, 3, 5]);
        assert!(a.is_empty());
    }

    #[test]
    fn equal_columns_zero_the_second() {
        let m = Gf2Matrix::from_dense(&[&[1, 1], &[1, 1]]);
        let r = column_reduce(&m);
        assert_eq!(r.zeroed, vec![1]);
        assert_eq!(r.reduced.column(0), &[0, 1]);
    }

    #[test]
    fn identity_is_reduced() {
        let m = Gf2Matrix::identity(4);
        let r = column_reduce(&m);
        assert_eq!(r.reduced, m);
        assert!(r.zeroed.is_empty());
    }

    #[test]
    fn kernel_example_rank_and_nullity() {
        let m = kernel_example();
        assert_eq!(rank(&m), 3);
        assert_eq!(dense_rank(&m), 3);
        let ker = kernel_basis(&m);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.apply(v).is_empty());
        }
    }

    #[test]
    fn solve_identity() {
        let b = vec![1, 3];
        assert_eq!(solve(&Gf2Matrix::identity(4), &b), Some(b));
        let m = Gf2Matrix::from_dense(&[&[1], &[1]]);
        assert_eq!(solve(&m, &[0]), None);
    }

    #[test]
    fn transpose_and_stack() {
        let m = kernel_example();
        assert_eq!(m.transpose().transpose(), m);
        let h = Gf2Matrix::hstack(&[&m, &m]).unwrap();
        assert_eq!(h.col_count(), 10);
        let v = Gf2Matrix::vstack(&[&m, &Gf2Matrix::identity(5)]).unwrap();
        assert_eq!(v.row_count(), 9);
        assert_eq!(v.column(4), &[2, 3, 8]);
        assert!(Gf2Matrix::vstack(&[&m, &Gf2Matrix::identity(2)]).is_err());
    }

    #[test]
    fn from_columns_rejects_bad_input() {
        assert_eq!(
            Gf2Matrix::from_columns(2, vec![vec![1, 0]]),
            Err(Gf2Error::UnsortedColumn(0))
        );
        assert!(matches!(
            Gf2Matrix::from_columns(2, vec![vec![2]]),
            Err(Gf2Error::RowOutOfRange { .. })
        ));
    }

    fn chain3() -> Poset {
        Poset::new(&["x0", "x1", "x2"], &[("x0", "x1"), ("x1", "x2")]).unwrap()
    }

    #[test]
    fn graded_rejects_invalid_entries() {
        let p = chain3();
        let rows = vec![Label::new("a", Grade(2))];
        let cols = vec![Label::new("b", Grade(0))];
        let err = GradedMatrix::new(&p, rows, cols, Gf2Matrix::from_dense(&[&[1]])).unwrap_err();
        assert!(matches!(err, Gf2Error::GradingViolation { .. }));
    }

    #[test]
    fn graded_rejects_duplicate_labels() {
        let p = chain3();
        let rows = vec![Label::new("a", Grade(0)), Label::new("a", Grade(0))];
        let err = GradedMatrix::new(&p, rows, vec![], Gf2Matrix::zeros(2, 0)).unwrap_err();
        assert!(matches!(err, Gf2Error::DuplicateLabel(_)));
        // Same name at different grades is fine.
        let rows = vec![Label::new("a", Grade(0)), Label::new("a", Grade(1))];
        assert!(GradedMatrix::new(&p, rows, vec![], Gf2Matrix::zeros(2, 0)).is_ok());
    }

    #[test]
    fn restrict_below_all_labels_is_empty() {
        let p = Poset::new(&["lo", "a", "b"], &[("lo", "a"), ("lo", "b")]).unwrap();
        let m = GradedMatrix::new(
            &p,
            vec![Label::new("r", Grade(1))],
            vec![Label::new("c", Grade(1))],
            Gf2Matrix::identity(1),
        )
        .unwrap();
        let r = m.restrict_at(&p, Grade(0));
        assert_eq!((r.matrix.row_count(), r.matrix.col_count()), (0, 0));
        let r = m.restrict_at(&p, Grade(2));
        assert_eq!((r.matrix.row_count(), r.matrix.col_count()), (0, 0));
    }

    #[test]
    fn graded_identity_product() {
        let p = chain3();
        let labels = vec![Label::new("a", Grade(0)), Label::new("b", Grade(1))];
        let m = GradedMatrix::new(
            &p,
            labels.clone(),
            vec![Label::new("c", Grade(2))],
            Gf2Matrix::from_dense(&[&[1], &[1]]),
        )
        .unwrap();
        let id = GradedMatrix::new(&p, labels.clone(), labels, Gf2Matrix::identity(2)).unwrap();
        assert_eq!(id.multiply(&m, &p).unwrap(), m);
        assert!(matches!(
            m.multiply(&m, &p),
            Err(Gf2Error::DimensionMismatch(_))
        ));
    }

    fn random_poset(n: usize, raw: &[(usize, usize)]) -> Poset {
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        // Keep edges i -> j with i < j, greedily skipping implied ones.
        let mut kept: Vec<(Grade, Grade)> = Vec::new();
        for &(a, b) in raw {
            let (a, b) = (a % n, b % n);
            if a >= b || kept.contains(&(Grade(a), Grade(b))) {
                continue;
            }
            let mut trial = kept.clone();
            trial.push((Grade(a), Grade(b)));
            if Poset::from_edges(names.clone(), trial.clone()).is_ok() {
                kept = trial;
            }
        }
        Poset::from_edges(names, kept).unwrap()
    }

    fn random_graded(
        p: &Poset,
        row_grades: &[usize],
        col_grades: &[usize],
        bits: &[bool],
    ) -> GradedMatrix {
        let n = p.len();
        let rows: Vec<Label> = row_grades
            .iter()
            .enumerate()
            .map(|(i, &g)| Label::new(format!("r{i}"), Grade(g % n)))
            .collect();
        let cols: Vec<Label> = col_grades
            .iter()
            .enumerate()
            .map(|(j, &g)| Label::new(format!("c{j}"), Grade(g % n)))
            .collect();
        let mut k = 0;
        let mut columns = Vec::new();
        for c in &cols {
            let mut col = Vec::new();
            for (i, r) in rows.iter().enumerate() {
                let bit = bits.get(k).copied().unwrap_or(false);
                k += 1;
                if bit && p.leq(r.grade, c.grade) {
                    col.push(i);
                }
            }
            columns.push(col);
        }
        let entries = Gf2Matrix::from_columns(rows.len(), columns).unwrap();
        GradedMatrix::new(p, rows, cols, entries).unwrap()
    }

    proptest! {
        #[test]
        fn reduction_preserves_prefix_spans(
            rows in 1usize..12,
            bits in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 12), 0..14),
        ) {
            let m = random_matrix(rows, &bits);
            let r = column_reduce(&m);
            // reduced = m * transform
            prop_assert_eq!(&m.multiply(&r.transform).unwrap(), &r.reduced);
            let mut seen = std::collections::HashSet::new();
            for (j, p) in r.pivots.iter().enumerate() {
                prop_assert_eq!(*p, r.reduced.column(j).last().copied());
                if let Some(p) = p {
                    prop_assert!(seen.insert(*p));
                }
                // Transform is unitriangular: only earlier columns are used.
                prop_assert_eq!(r.transform.column(j).last().copied(), Some(j));
                let prefix: Vec<usize> = (0..=j).collect();
                let all: Vec<usize> = (0..rows).collect();
                let a = m.submatrix(&all, &prefix);
                let b = r.reduced.submatrix(&all, &prefix);
                let both = Gf2Matrix::hstack(&[&a, &b]).unwrap();
                prop_assert_eq!(dense_rank(&a), dense_rank(&both));
                prop_assert_eq!(dense_rank(&b), dense_rank(&both));
            }
            prop_assert_eq!(rank(&m), dense_rank(&m));
            let ker = kernel_basis(&m);
            prop_assert_eq!(ker.len(), m.col_count() - dense_rank(&m));
            for v in &ker {
                prop_assert!(m.apply(v).is_empty());
            }
        }

        #[test]
        fn solve_agrees_with_membership(
            rows in 1usize..10,
            bits in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 10), 0..10),
            target in proptest::collection::vec(any::<bool>(), 10),
        ) {
            let m = random_matrix(rows, &bits);
            let b: Column = (0..rows).filter(|&i| target[i]).collect();
            let all: Vec<usize> = (0..m.col_count()).collect();
            let mut with_b = m.submatrix(&(0..rows).collect::<Vec<_>>(), &all);
            with_b.push_column(b.clone()).unwrap();
            let solvable = dense_rank(&with_b) == dense_rank(&m);
            match solve(&m, &b) {
                Some(x) => {
                    prop_assert!(solvable);
                    prop_assert_eq!(m.apply(&x), b);
                }
                None => prop_assert!(!solvable),
            }
        }

        #[test]
        fn restriction_is_functorial(
            n in 1usize..7,
            raw in proptest::collection::vec((0usize..7, 0usize..7), 0..12),
            row_grades in proptest::collection::vec(0usize..7, 0..8),
            col_grades in proptest::collection::vec(0usize..7, 0..8),
            bits in proptest::collection::vec(any::<bool>(), 64),
        ) {
            let p = random_poset(n, &raw);
            let m = random_graded(&p, &row_grades, &col_grades, &bits);
            for x in p.grades() {
                for y in p.grades() {
                    if !p.leq(x, y) {
                        continue;
                    }
                    let rx = m.restrict_at(&p, x);
                    let ry = m.restrict_at(&p, y);
                    // Positions of x's labels inside y's restriction.
                    let rows: Vec<usize> = rx.rows.iter().map(|i| ry.rows.iter().position(|k| k == i).unwrap()).collect();
                    let cols: Vec<usize> = rx.cols.iter().map(|j| ry.cols.iter().position(|k| k == j).unwrap()).collect();
                    prop_assert_eq!(ry.matrix.submatrix(&rows, &cols), rx.matrix.clone());
                }
            }
        }
    }
}
