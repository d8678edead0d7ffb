//! Linear-time solver for GF(2) systems whose coefficient matrix has at most
//! two nonzeros per column.
//!
//! Two-entry columns are edges of a multigraph on the rows, one-entry
//! columns are loops at a single vertex. Only a spanning forest and one loop
//! per component are needed for the column space; the remaining system is
//! solved by back-substitution along a leaf order of each tree.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use thiserror::Error;

use crate::gf2::{Column, Gf2Error, Gf2Matrix, GradedMatrix, Label};
use crate::poset::{Grade, Poset};
use crate::union_find::UnionFind;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("input is not a tree")]
    NotATree,
    #[error("column {0} has more than two nonzero entries")]
    TooManyEntries(usize),
    #[error("right-hand side is not in the column space")]
    InconsistentSystem,
    #[error("row index {0} out of range")]
    RowOutOfRange(usize),
    #[error("row labels of the two matrices differ")]
    LabelMismatch,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// A vertex order in which each vertex is a leaf of the tree that remains
/// after deleting its predecessors. A distinguished vertex comes last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafOrder {
    pub order: Vec<usize>,
    pub distinguished: Option<usize>,
}

/// One removal step of the leaf-order procedure: the vertex and, unless it
/// is the last of its component, the edge `(column, neighbour)` it hangs on.
type Step = (usize, Option<(usize, usize)>);

/// Runs the queue procedure on a forest. Each distinguished vertex has its
/// degree bumped by one so that it is removed last in its component.
fn peel(adjacency: &[Vec<(usize, usize)>], distinguished: &[bool], ops: &mut u64) -> Vec<Step> {
    let n = adjacency.len();
    let mut degree: Vec<usize> = adjacency
        .iter()
        .zip(distinguished)
        .map(|(adj, &d)| adj.len() + usize::from(d))
        .collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut removed = vec![false; n];
    let mut steps = Vec::with_capacity(n);
    *ops += n as u64;
    while let Some(v) = queue.pop_front() {
        removed[v] = true;
        let mut hang = None;
        for &(nb, col) in &adjacency[v] {
            *ops += 1;
            if !removed[nb] {
                hang = Some((col, nb));
                degree[nb] -= 1;
                if degree[nb] == 1 {
                    queue.push_back(nb);
                }
            }
        }
        steps.push((v, hang));
    }
    steps
}

/// Leaf order of a tree on vertices `0..vertices`.
pub fn leaf_order(
    vertices: usize,
    edges: &[(usize, usize)],
    distinguished: Option<usize>,
) -> Result<LeafOrder, SolverError> {
    if vertices == 0 || edges.len() + 1 != vertices {
        return Err(SolverError::NotATree);
    }
    let mut uf = UnionFind::new(vertices);
    let mut adjacency = vec![Vec::new(); vertices];
    for (k, &(a, b)) in edges.iter().enumerate() {
        if a >= vertices || b >= vertices || !uf.union(a, b) {
            return Err(SolverError::NotATree);
        }
        adjacency[a].push((b, k));
        adjacency[b].push((a, k));
    }
    let mut marks = vec![false; vertices];
    if let Some(w) = distinguished {
        if w >= vertices {
            return Err(SolverError::NotATree);
        }
        marks[w] = true;
    }
    let steps = peel(&adjacency, &marks, &mut 0);
    Ok(LeafOrder {
        order: steps.into_iter().map(|(v, _)| v).collect(),
        distinguished,
    })
}

/// A coefficient matrix with at most two nonzeros per column, decomposed
/// into a spanning forest plus at most one single-entry column per tree.
#[derive(Clone, Debug)]
pub struct MultigraphSystem {
    rows: usize,
    columns: usize,
    /// Kept single-entry column at each distinguished vertex.
    loop_at: Vec<Option<usize>>,
    steps: Vec<Step>,
    prepare_ops: u64,
}

impl MultigraphSystem {
    /// Decomposes `a`. Zero columns are allowed; their variables stay 0.
    pub fn new(a: &Gf2Matrix) -> Result<Self, SolverError> {
        let rows = a.row_count();
        let mut ops = 0u64;
        let mut uf = UnionFind::new(rows);
        let mut adjacency = vec![Vec::new(); rows];
        let mut singles = Vec::new();
        for (j, col) in a.columns().iter().enumerate() {
            ops += 1;
            match col.as_slice() {
                [] => {}
                &[r] => singles.push((j, r)),
                &[r, s] => {
                    if uf.union(r, s) {
                        adjacency[r].push((s, j));
                        adjacency[s].push((r, j));
                    }
                }
                _ => return Err(SolverError::TooManyEntries(j)),
            }
        }
        let mut loop_at = vec![None; rows];
        let mut taken = vec![false; rows];
        let mut marks = vec![false; rows];
        for (j, r) in singles {
            ops += 1;
            let root = uf.find(r);
            if !taken[root] {
                taken[root] = true;
                loop_at[r] = Some(j);
                marks[r] = true;
            }
        }
        let steps = peel(&adjacency, &marks, &mut ops);
        Ok(Self {
            rows,
            columns: a.col_count(),
            loop_at,
            steps,
            prepare_ops: ops,
        })
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.columns
    }

    /// Operations spent on the decomposition.
    pub fn prepare_ops(&self) -> u64 {
        self.prepare_ops
    }

    /// Solves `A x = b` and returns the support of `x`.
    pub fn solve(&self, b: &[usize]) -> Result<Column, SolverError> {
        self.solve_counted(b, &mut 0)
    }

    /// Like [`solve`](Self::solve), adding the work done to `ops`.
    pub fn solve_counted(&self, b: &[usize], ops: &mut u64) -> Result<Column, SolverError> {
        let mut acc = vec![false; self.rows];
        for &r in b {
            if r >= self.rows {
                return Err(SolverError::RowOutOfRange(r));
            }
            acc[r] ^= true;
        }
        let mut x = Vec::new();
        for &(v, hang) in &self.steps {
            *ops += 1;
            let value = acc[v];
            match (hang, self.loop_at[v]) {
                (Some((col, nb)), _) => {
                    if value {
                        x.push(col);
                        acc[nb] ^= true;
                    }
                }
                (None, Some(col)) => {
                    if value {
                        x.push(col);
                    }
                }
                (None, None) => {
                    if value {
                        return Err(SolverError::InconsistentSystem);
                    }
                }
            }
        }
        x.sort_unstable();
        Ok(x)
    }
}

/// Solves `A x = b` for `A` with at most two nonzeros per column.
pub fn solve_multigraph(a: &Gf2Matrix, b: &[usize]) -> Result<Column, SolverError> {
    MultigraphSystem::new(a)?.solve(b)
}

/// Like [`solve_multigraph`], also returning the number of elementary
/// operations (decomposition plus back-substitution).
pub fn solve_multigraph_counted(a: &Gf2Matrix, b: &[usize]) -> (Result<Column, SolverError>, u64) {
    match MultigraphSystem::new(a) {
        Ok(sys) => {
            let mut ops = sys.prepare_ops();
            let x = sys.solve_counted(b, &mut ops);
            (x, ops)
        }
        Err(e) => (Err(e), a.col_count() as u64),
    }
}

/// Solution of a tree system: which edges are used, and whether the
/// single-entry column is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeSolution {
    pub edges: Vec<bool>,
    pub single: bool,
}

/// Solves a system whose matrix is the incidence matrix of a tree, plus at
/// most one single-entry column at vertex `single`.
pub fn solve_tree(
    vertices: usize,
    edges: &[(usize, usize)],
    single: Option<usize>,
    b: &[usize],
) -> Result<TreeSolution, SolverError> {
    leaf_order(vertices, edges, single)?;
    let mut cols: Vec<Column> = edges
        .iter()
        .map(|&(a, b)| if a < b { vec![a, b] } else { vec![b, a] })
        .collect();
    if let Some(s) = single {
        cols.push(vec![s]);
    }
    let a = Gf2Matrix::from_columns(vertices, cols)?;
    let x = solve_multigraph(&a, b)?;
    let mut used = vec![false; edges.len()];
    let mut single_used = false;
    for j in x {
        if j < edges.len() {
            used[j] = true;
        } else {
            single_used = true;
        }
    }
    Ok(TreeSolution {
        edges: used,
        single: single_used,
    })
}

/// Finds a grading-valid `X` with `A X = B`.
///
/// For each column of `B` only the columns of `A` whose grade lies below the
/// column's grade may be used; the rest are forced to zero. Columns of `B`
/// sharing a grade share one decomposition of `A`.
pub fn constrained_lift(
    a: &GradedMatrix,
    b: &GradedMatrix,
    poset: &Poset,
) -> Result<GradedMatrix, SolverError> {
    if a.row_labels() != b.row_labels() {
        return Err(SolverError::LabelMismatch);
    }
    let mut by_grade: BTreeMap<Grade, Vec<usize>> = BTreeMap::new();
    for (j, l) in b.col_labels().iter().enumerate() {
        by_grade.entry(l.grade).or_default().push(j);
    }
    let all_rows: Vec<usize> = (0..a.row_count()).collect();
    let mut columns: Vec<Column> = vec![Vec::new(); b.col_count()];
    for (grade, targets) in by_grade {
        let allowed: Vec<usize> = (0..a.col_count())
            .filter(|&k| poset.leq(a.col_labels()[k].grade, grade))
            .collect();
        let sys = MultigraphSystem::new(&a.entries().submatrix(&all_rows, &allowed))?;
        for j in targets {
            let x = sys.solve(b.entries().column(j))?;
            columns[j] = x.into_iter().map(|k| allowed[k]).collect();
        }
    }
    let rows: Vec<Label> = a.col_labels().to_vec();
    let entries = Gf2Matrix::from_columns(rows.len(), columns)?;
    Ok(GradedMatrix::new(
        poset,
        rows,
        b.col_labels().to_vec(),
        entries,
    )?)
}
