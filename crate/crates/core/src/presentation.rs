//! Minimal presentations of the chain modules of a poset tower.
//!
//! The sweep visits grades in linear-extension order and keeps, per grade
//! and degree, the list of active simplices with the generator that owns
//! them. Identifications between generators and collapses of simplices are
//! recorded as edges of a relation graph whose extra vertex `Ω` (index 0)
//! absorbs vanishing simplices. An edge is only kept if it closes no cycle,
//! which makes the relation matrix minimal; cycles formed when predecessor
//! forests are merged yield relations between relations.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::gf2::{parity_sum, Column, Echelon, Gf2Error, Gf2Matrix, GradedMatrix, Label};
use crate::poset::Grade;
use crate::tower::{GenId, PosetTower, Simplex, TowerError};
use crate::union_find::UnionFind;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("face {{{face}}} of generator {{{simplex}}} at `{grade}` has no active owner")]
    BoundaryFaceMissing {
        grade: String,
        simplex: String,
        face: String,
    },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PresentationOptions {
    /// Also compute relations between relations.
    pub relrel: bool,
    /// Drop relations between relations that are not needed at their grade.
    pub reduce: bool,
    /// Keep the active simplex lists of every grade for inspection.
    pub record_active: bool,
}

impl PresentationOptions {
    pub fn full() -> Self {
        Self {
            relrel: true,
            reduce: true,
            record_active: false,
        }
    }
}

/// The matrices of one degree.
#[derive(Clone, Debug)]
pub struct DegreePresentation {
    pub degree: usize,
    /// Tower generator behind each generator row.
    pub sources: Vec<GenId>,
    /// Relations: rows are generators, columns relations. Each column has
    /// one or two entries.
    pub p1: GradedMatrix,
    /// Boundary lift: rows are generators one degree down.
    pub f: GradedMatrix,
    /// Relations between relations, if requested.
    pub p2: Option<GradedMatrix>,
}

impl DegreePresentation {
    pub fn generators(&self) -> &[Label] {
        self.p1.row_labels()
    }

    pub fn relations(&self) -> &[Label] {
        self.p1.col_labels()
    }

    pub fn relrels(&self) -> Option<&[Label]> {
        self.p2.as_ref().map(GradedMatrix::col_labels)
    }
}

/// Active simplices at one grade and degree, each with its generator row.
pub type ActiveList = Vec<(Simplex, usize)>;

/// Output of [`run_presentation`].
#[derive(Clone, Debug)]
pub struct ChainPresentation {
    degrees: Vec<DegreePresentation>,
    options: PresentationOptions,
    active: Option<Vec<Vec<ActiveList>>>,
}

impl ChainPresentation {
    pub fn options(&self) -> PresentationOptions {
        self.options
    }

    /// Number of degrees, one more than the top generator dimension.
    pub fn degree_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, l: usize) -> Option<&DegreePresentation> {
        self.degrees.get(l)
    }

    pub fn degrees(&self) -> &[DegreePresentation] {
        &self.degrees
    }

    /// Swaps in a different relation matrix, e.g. to check that a verifier
    /// notices a damaged presentation.
    pub fn replace_p1(&mut self, l: usize, p1: GradedMatrix) {
        self.degrees[l].p1 = p1;
    }

    /// Active lists per grade and degree, when recorded.
    pub fn active(&self, x: Grade, l: usize) -> Option<&ActiveList> {
        self.active.as_ref().and_then(|a| a[x.0].get(l))
    }
}

/// Label of the generator row for a simplex, e.g. `g:u,v`.
pub fn generator_label(tower: &PosetTower, simplex: &[crate::tower::VertexId]) -> String {
    format!("g:{}", tower.simplex_name(simplex))
}

/// An edge of the relation graph; vertex 0 is `Ω`, row `i` is vertex `i + 1`.
#[derive(Clone, Copy, Debug)]
struct RelationEdge {
    grade: Grade,
    ends: (usize, usize),
}

#[derive(Clone, Debug)]
struct RelRel {
    grade: Grade,
    support: Column,
    alive: bool,
}

struct DegreeState {
    rows: Vec<(GenId, Grade)>,
    relations: Vec<RelationEdge>,
    f_cols: Vec<Column>,
    relrels: Vec<RelRel>,
    forests: Vec<Option<Vec<usize>>>,
    active: Vec<Option<ActiveList>>,
    uf: UnionFind,
}

/// Validates the tower and runs the sweep.
pub fn run_presentation(
    tower: &PosetTower,
    options: PresentationOptions,
) -> Result<ChainPresentation, PresentationError> {
    let report = tower.validate();
    if !report.is_ok() {
        return Err(TowerError::Invalid(report).into());
    }
    run_presentation_unchecked(tower, options)
}

/// Runs the sweep on a tower assumed to be valid.
pub fn run_presentation_unchecked(
    tower: &PosetTower,
    options: PresentationOptions,
) -> Result<ChainPresentation, PresentationError> {
    let poset = tower.poset();
    let t0 = poset.len();
    let degree_count = tower.max_dim().map_or(0, |d| d + 1);
    let mut per_degree_total = vec![0usize; degree_count];
    for g in tower.generators() {
        per_degree_total[g.degree()] += 1;
    }
    let mut states: Vec<DegreeState> = per_degree_total
        .iter()
        .map(|&total| DegreeState {
            rows: Vec::with_capacity(total),
            relations: Vec::new(),
            f_cols: Vec::with_capacity(total),
            relrels: Vec::new(),
            forests: vec![None; t0],
            active: vec![None; t0],
            uf: UnionFind::new(total + 1),
        })
        .collect();
    let mut pending_succ: Vec<usize> = poset.grades().map(|x| poset.successors(x).len()).collect();
    let mut recorded: Option<Vec<Vec<ActiveList>>> =
        options.record_active.then(|| vec![Vec::new(); t0]);

    for &x in poset.linear_extension().order() {
        let preds = poset.predecessors(x);
        let pred_edges: Vec<usize> = preds
            .iter()
            .map(|&y| poset.edge_index(y, x).expect("Hasse edge"))
            .collect();
        let new_gens: Vec<GenId> = tower.generators_at(x).to_vec();

        // Owners of (l-1)-simplices at x, for boundaries.
        let mut lower_owner: HashMap<Simplex, usize> = HashMap::new();

        for (l, st) in states.iter_mut().enumerate() {
            st.uf.reset();

            // Union of the predecessor forests.
            let mut seen = HashSet::new();
            let mut forest = Vec::new();
            let mut cycles = Vec::new();
            for &y in preds {
                for &r in st.forests[y.0].as_ref().expect("predecessor processed") {
                    if seen.insert(r) {
                        let (a, b) = st.relations[r].ends;
                        if st.uf.union(a, b) {
                            forest.push(r);
                        } else {
                            cycles.push(r);
                        }
                    }
                }
            }

            // Collapse: push active simplices forward; degenerate ones die.
            let mut active: ActiveList = Vec::new();
            for (&y, &edge) in preds.iter().zip(&pred_edges) {
                for (simplex, row) in st.active[y.0].as_ref().expect("predecessor processed") {
                    let image = tower.map_simplex(edge, simplex);
                    if image.len() == simplex.len() {
                        active.push((image, *row));
                    } else if st.uf.union(0, row + 1) {
                        forest.push(st.relations.len());
                        st.relations.push(RelationEdge {
                            grade: x,
                            ends: (0, row + 1),
                        });
                    }
                }
            }

            // Generator: new rows and their boundaries.
            for &g in &new_gens {
                let gen = tower.generator(g);
                if gen.degree() != l {
                    continue;
                }
                let row = st.rows.len();
                st.rows.push((g, x));
                active.push((gen.simplex.clone(), row));
                let mut owners = Vec::with_capacity(gen.simplex.len());
                if l > 0 {
                    for i in 0..gen.simplex.len() {
                        let mut face = gen.simplex.clone();
                        face.remove(i);
                        match lower_owner.get(&face) {
                            Some(&r) => owners.push(r),
                            None => {
                                return Err(PresentationError::BoundaryFaceMissing {
                                    grade: poset.name(x).to_string(),
                                    simplex: tower.simplex_name(&gen.simplex),
                                    face: tower.simplex_name(&face),
                                })
                            }
                        }
                    }
                }
                st.f_cols.push(parity_sum(owners));
            }

            // Identify duplicates: adjacent entries of each run of equal simplices.
            active.sort_unstable();
            active.dedup();
            let mut survivors: ActiveList = Vec::with_capacity(active.len());
            for (simplex, row) in active {
                match survivors.last() {
                    Some((prev, prev_row)) if *prev == simplex => {
                        let (a, b) = (prev_row + 1, row + 1);
                        if st.uf.union(a, b) {
                            forest.push(st.relations.len());
                            st.relations.push(RelationEdge {
                                grade: x,
                                ends: (a, b),
                            });
                        }
                        // Keep the previous entry for the next comparison so
                        // pairs stay adjacent, but record only the first owner.
                        survivors.push((simplex, row));
                    }
                    _ => survivors.push((simplex, row)),
                }
            }
            survivors.dedup_by(|later, earlier| later.0 == earlier.0);

            if options.relrel && !cycles.is_empty() {
                let first_new = st.relrels.len();
                for &e in &cycles {
                    let mut support = forest_path(&st.relations, &forest, st.relations[e].ends);
                    support.push(e);
                    support.sort_unstable();
                    st.relrels.push(RelRel {
                        grade: x,
                        support,
                        alive: true,
                    });
                }
                if options.reduce {
                    reduce_at(st, poset, x, first_new);
                }
            }

            lower_owner = survivors.iter().map(|(s, r)| (s.clone(), *r)).collect();
            if let Some(rec) = recorded.as_mut() {
                rec[x.0].push(survivors.clone());
            }
            st.forests[x.0] = Some(forest);
            st.active[x.0] = Some(survivors);
        }

        for &y in preds {
            pending_succ[y.0] -= 1;
            if pending_succ[y.0] == 0 {
                for st in states.iter_mut() {
                    st.forests[y.0] = None;
                    st.active[y.0] = None;
                }
            }
        }
    }

    let mut degrees = Vec::with_capacity(states.len());
    let mut lower_labels: Vec<Label> = Vec::new();
    for (l, st) in states.iter().enumerate() {
        let labels: Vec<Label> = st
            .rows
            .iter()
            .map(|&(g, x)| Label::new(generator_label(tower, &tower.generator(g).simplex), x))
            .collect();
        let rel_labels: Vec<Label> = st
            .relations
            .iter()
            .enumerate()
            .map(|(k, r)| Label::new(format!("r{k}"), r.grade))
            .collect();
        let rel_cols: Vec<Column> = st
            .relations
            .iter()
            .map(|r| match r.ends {
                (0, b) => vec![b - 1],
                (a, b) => {
                    let mut c = vec![a - 1, b - 1];
                    c.sort_unstable();
                    c
                }
            })
            .collect();
        let p1 = GradedMatrix::new(
            poset,
            labels.clone(),
            rel_labels.clone(),
            Gf2Matrix::from_columns(labels.len(), rel_cols)?,
        )?;
        let f = GradedMatrix::new(
            poset,
            lower_labels.clone(),
            labels.clone(),
            Gf2Matrix::from_columns(lower_labels.len(), st.f_cols.clone())?,
        )?;
        let p2 = if options.relrel {
            let (cols, cells): (Vec<Label>, Vec<Column>) = st
                .relrels
                .iter()
                .enumerate()
                .filter(|(_, rr)| rr.alive)
                .map(|(k, rr)| (Label::new(format!("rr{k}"), rr.grade), rr.support.clone()))
                .unzip();
            Some(GradedMatrix::new(
                poset,
                rel_labels,
                cols,
                Gf2Matrix::from_columns(st.relations.len(), cells)?,
            )?)
        } else {
            None
        };
        degrees.push(DegreePresentation {
            degree: l,
            sources: st.rows.iter().map(|&(g, _)| g).collect(),
            p1,
            f,
            p2,
        });
        lower_labels = labels;
    }

    Ok(ChainPresentation {
        degrees,
        options,
        active: recorded,
    })
}

/// Relation ids on the forest path between the two ends.
fn forest_path(relations: &[RelationEdge], forest: &[usize], ends: (usize, usize)) -> Column {
    let mut adjacency: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for &r in forest {
        let (a, b) = relations[r].ends;
        adjacency.entry(a).or_default().push((b, r));
        adjacency.entry(b).or_default().push((a, r));
    }
    // Root the tree containing `ends.0` and record parent links.
    let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut depth: HashMap<usize, usize> = HashMap::from([(ends.0, 0)]);
    let mut stack = vec![ends.0];
    while let Some(v) = stack.pop() {
        let d = depth[&v];
        for &(nb, r) in adjacency.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if let Entry::Vacant(e) = depth.entry(nb) {
                e.insert(d + 1);
                parent.insert(nb, (v, r));
                stack.push(nb);
            }
        }
    }
    let (mut u, mut v) = ends;
    let mut path = Vec::new();
    let depth_of = |w: usize| {
        depth
            .get(&w)
            .copied()
            .expect("ends are connected in the forest")
    };
    while depth_of(u) > depth_of(v) {
        let (p, r) = parent[&u];
        path.push(r);
        u = p;
    }
    while depth_of(v) > depth_of(u) {
        let (p, r) = parent[&v];
        path.push(r);
        v = p;
    }
    while u != v {
        let (pu, ru) = parent[&u];
        let (pv, rv) = parent[&v];
        path.push(ru);
        path.push(rv);
        u = pu;
        v = pv;
    }
    path
}

/// Deletes new relations between relations at `x` that lie in the span of
/// the surviving ones at grades below `x` and the earlier new ones.
fn reduce_at(st: &mut DegreeState, poset: &crate::poset::Poset, x: Grade, first_new: usize) {
    let mut basis = Echelon::new();
    let mut earlier: Vec<usize> = (0..first_new)
        .filter(|&k| st.relrels[k].alive && poset.lt(st.relrels[k].grade, x))
        .collect();
    earlier.sort_by_key(|&k| (poset.position(st.relrels[k].grade), k));
    for k in earlier {
        basis.insert(&st.relrels[k].support);
    }
    for k in first_new..st.relrels.len() {
        if !basis.insert(&st.relrels[k].support) {
            st.relrels[k].alive = false;
        }
    }
}
