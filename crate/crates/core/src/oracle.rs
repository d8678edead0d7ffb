//! Brute-force ground truth, computed grade by grade from the explicit
//! complexes with plain dense elimination.
//!
//! Nothing here goes through the sparse reductions of [`crate::gf2`]: the
//! oracle has its own dense matrix type so that a bug in one cannot hide
//! a bug in the other.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::gf2::{GradedMatrix, Label};
use crate::homology_presentation::HomologyPresentation;
use crate::pirep::PiRep;
use crate::poset::{Grade, Poset};
use crate::presentation::{ChainPresentation, DegreePresentation};
use crate::tower::{GenId, PointwiseTower, PosetTower, Simplex};

/// Row-major dense matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dense {
    cols: usize,
    data: Vec<FixedBitSet>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            data: vec![FixedBitSet::with_capacity(cols); rows],
        }
    }

    pub fn from_columns(rows: usize, columns: &[FixedBitSet]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for i in c.ones() {
                m.data[i].insert(j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.data.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].contains(j)
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.data[i].insert(j);
    }

    pub fn column(&self, j: usize) -> FixedBitSet {
        let mut c = FixedBitSet::with_capacity(self.rows());
        for (i, row) in self.data.iter().enumerate() {
            if row.contains(j) {
                c.insert(i);
            }
        }
        c
    }

    pub fn columns(&self) -> Vec<FixedBitSet> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_clear())
    }

    pub fn mul(&self, other: &Dense) -> Dense {
        assert_eq!(self.cols, other.rows(), "inner dimensions");
        let mut out = Dense::zeros(self.rows(), other.cols);
        for (i, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[i].symmetric_difference_with(&other.data[k]);
            }
        }
        out
    }

    pub fn apply(&self, v: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.rows());
        for (i, row) in self.data.iter().enumerate() {
            if row.intersection(v).count() % 2 == 1 {
                out.insert(i);
            }
        }
        out
    }

    pub fn hstack(blocks: &[&Dense]) -> Dense {
        let rows = blocks.first().map_or(0, |b| b.rows());
        let cols: Vec<FixedBitSet> = blocks.iter().flat_map(|b| b.columns()).collect();
        Dense::from_columns(rows, &cols)
    }

    pub fn rank(&self) -> usize {
        rref(self.data.clone(), self.cols).1.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// A basis of the null space.
    pub fn kernel(&self) -> Vec<FixedBitSet> {
        let (rows, pivots) = rref(self.data.clone(), self.cols);
        let pivot_set: FixedBitSet = pivots.iter().copied().collect();
        (0..self.cols)
            .filter(|j| !pivot_set.contains(*j))
            .map(|free| {
                let mut v = FixedBitSet::with_capacity(self.cols);
                v.insert(free);
                for (row, &p) in rows.iter().zip(&pivots) {
                    if row.contains(free) {
                        v.insert(p);
                    }
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self x = b`.
    pub fn solve(&self, b: &FixedBitSet) -> Option<FixedBitSet> {
        let width = self.cols + 1;
        let augmented: Vec<FixedBitSet> = self
            .data
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = FixedBitSet::with_capacity(width);
                r.union_with(row);
                r.grow(width);
                if b.contains(i) {
                    r.insert(self.cols);
                }
                r
            })
            .collect();
        let (rows, pivots) = rref(augmented, width);
        let mut x = FixedBitSet::with_capacity(self.cols);
        for (row, &p) in rows.iter().zip(&pivots) {
            if p == self.cols {
                return None;
            }
            if row.contains(self.cols) {
                x.insert(p);
            }
        }
        Some(x)
    }
}

/// Gauss-Jordan elimination; returns the nonzero reduced rows and their pivots.
fn rref(mut rows: Vec<FixedBitSet>, width: usize) -> (Vec<FixedBitSet>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..width {
        let Some(found) = (top..rows.len()).find(|&i| rows[i].contains(col)) else {
            continue;
        };
        rows.swap(top, found);
        let pivot = rows[top].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != top && row.contains(col) {
                row.symmetric_difference_with(&pivot);
            }
        }
        pivots.push(col);
        top += 1;
    }
    rows.truncate(top);
    (rows, pivots)
}

/// Reduces vectors modulo a fixed subspace to a normal form supported on
/// the non-pivot coordinates.
struct Quotient {
    rows: Vec<FixedBitSet>,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl Quotient {
    fn new(ambient: usize, spanning: Vec<FixedBitSet>) -> Self {
        let (rows, pivots) = rref(spanning, ambient);
        let pivot_set: FixedBitSet = pivots.iter().copied().collect();
        let free = (0..ambient).filter(|i| !pivot_set.contains(*i)).collect();
        Self { rows, pivots, free }
    }

    fn dim(&self) -> usize {
        self.free.len()
    }

    /// Coordinates of `v` in the quotient basis.
    fn coordinates(&self, v: &FixedBitSet) -> FixedBitSet {
        let mut w = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w.contains(p) {
                w.symmetric_difference_with(row);
            }
        }
        let mut c = FixedBitSet::with_capacity(self.free.len());
        for (k, &i) in self.free.iter().enumerate() {
            if w.contains(i) {
                c.insert(k);
            }
        }
        c
    }
}

/// A persistence module given pointwise: a vector space per grade and a
/// matrix per Hasse edge, indexed like [`Poset::edges`].
#[derive(Clone, Debug)]
pub struct PointwiseModule {
    pub dims: Vec<usize>,
    pub labels: Vec<Vec<String>>,
    pub maps: Vec<Dense>,
}

impl PointwiseModule {
    pub fn is_consistent(&self, poset: &Poset) -> bool {
        poset
            .edges()
            .iter()
            .zip(&self.maps)
            .all(|(&(x, y), m)| m.cols() == self.dims[x.0] && m.rows() == self.dims[y.0])
    }

    /// Images of the given vector at `from` pushed to every grade above it.
    fn push_forward(&self, poset: &Poset, from: Grade, v: FixedBitSet) -> Vec<Option<FixedBitSet>> {
        let mut img: Vec<Option<FixedBitSet>> = vec![None; poset.len()];
        img[from.0] = Some(v);
        for &x in poset.linear_extension().order() {
            if x == from || !poset.leq(from, x) {
                continue;
            }
            let y = poset
                .predecessors(x)
                .iter()
                .copied()
                .find(|&y| poset.leq(from, y))
                .expect("some predecessor lies above the source");
            let e = poset.edge_index(y, x).expect("Hasse edge");
            img[x.0] = Some(self.maps[e].apply(img[y.0].as_ref().expect("visited earlier")));
        }
        img
    }
}

/// Chains in degree `l`, one basis vector per `l`-simplex.
pub fn chain_module(pt: &PointwiseTower, l: usize) -> PointwiseModule {
    let p = pt.poset();
    let bases: Vec<Vec<&Simplex>> = p.grades().map(|x| pt.simplices(x, l)).collect();
    let index: Vec<HashMap<&Simplex, usize>> = bases
        .iter()
        .map(|b| b.iter().enumerate().map(|(i, s)| (*s, i)).collect())
        .collect();
    let maps = p
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(x, y))| {
            let mut m = Dense::zeros(bases[y.0].len(), bases[x.0].len());
            for (j, s) in bases[x.0].iter().enumerate() {
                let image = pt.map_simplex(e, s);
                if image.len() == s.len() {
                    m.set(index[y.0][&image], j);
                }
            }
            m
        })
        .collect();
    let names = |s: &Simplex| {
        s.iter()
            .map(|v| pt.vertex_names()[v.0 as usize].as_str())
            .collect::<Vec<_>>()
            .join(",")
    };
    PointwiseModule {
        dims: bases.iter().map(Vec::len).collect(),
        labels: bases
            .iter()
            .map(|b| b.iter().map(|s| names(s)).collect())
            .collect(),
        maps,
    }
}

/// The simplicial boundary `C_l(x) -> C_{l-1}(x)` at every grade.
pub fn boundary(pt: &PointwiseTower, l: usize) -> Vec<Dense> {
    pt.poset()
        .grades()
        .map(|x| {
            let cols = pt.simplices(x, l);
            if l == 0 {
                return Dense::zeros(0, cols.len());
            }
            let rows = pt.simplices(x, l - 1);
            let index: HashMap<&Simplex, usize> =
                rows.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            let mut m = Dense::zeros(rows.len(), cols.len());
            for (j, s) in cols.iter().enumerate() {
                for skip in 0..s.len() {
                    let mut face = (*s).clone();
                    face.remove(skip);
                    m.set(index[&face], j);
                }
            }
            m
        })
        .collect()
}

/// `dim H_l` at every grade.
pub fn homology_dims(pt: &PointwiseTower, l: usize) -> Vec<usize> {
    let here = boundary(pt, l);
    let above = boundary(pt, l + 1);
    here.iter()
        .zip(&above)
        .map(|(d, u)| d.nullity() - u.rank())
        .collect()
}

/// A graded matrix evaluated at `x`, with the surviving row and column indices.
pub fn evaluate(m: &GradedMatrix, poset: &Poset, x: Grade) -> (Dense, Vec<usize>, Vec<usize>) {
    evaluate_where(m, poset, x, |g| poset.leq(g, x))
}

fn evaluate_where(
    m: &GradedMatrix,
    poset: &Poset,
    x: Grade,
    keep_col: impl Fn(Grade) -> bool,
) -> (Dense, Vec<usize>, Vec<usize>) {
    let rows = below(m.row_labels(), poset, x);
    let cols: Vec<usize> = (0..m.col_count())
        .filter(|&j| keep_col(m.col_labels()[j].grade))
        .collect();
    let position: HashMap<usize, usize> = rows.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut d = Dense::zeros(rows.len(), cols.len());
    for (k, &j) in cols.iter().enumerate() {
        for i in m.entries().column(j) {
            // Entries below the column grade always survive.
            d.set(position[i], k);
        }
    }
    (d, rows, cols)
}

fn below(labels: &[Label], poset: &Poset, x: Grade) -> Vec<usize> {
    (0..labels.len())
        .filter(|&i| poset.leq(labels[i].grade, x))
        .collect()
}

/// The cokernel of a map of projective modules, evaluated pointwise.
pub fn module_of_coker(m: &GradedMatrix, poset: &Poset) -> PointwiseModule {
    let quotients: Vec<(Quotient, Vec<usize>)> = poset
        .grades()
        .map(|x| {
            let (d, rows, _) = evaluate(m, poset, x);
            (Quotient::new(rows.len(), d.columns()), rows)
        })
        .collect();
    let maps = poset
        .edges()
        .iter()
        .map(|&(x, y)| {
            let (qx, rows_x) = &quotients[x.0];
            let (qy, rows_y) = &quotients[y.0];
            let position: HashMap<usize, usize> =
                rows_y.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let columns: Vec<FixedBitSet> = qx
                .free
                .iter()
                .map(|&local| {
                    let mut v = FixedBitSet::with_capacity(rows_y.len());
                    v.insert(position[&rows_x[local]]);
                    qy.coordinates(&v)
                })
                .collect();
            Dense::from_columns(qy.dim(), &columns)
        })
        .collect();
    PointwiseModule {
        dims: quotients.iter().map(|(q, _)| q.dim()).collect(),
        labels: quotients
            .iter()
            .map(|(q, rows)| {
                q.free
                    .iter()
                    .map(|&i| m.row_labels()[rows[i]].name.clone())
                    .collect()
            })
            .collect(),
        maps,
    }
}

/// Dimension of the radical at each grade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalReport {
    pub dims: Vec<usize>,
}

pub fn radical(module: &PointwiseModule, poset: &Poset) -> RadicalReport {
    RadicalReport {
        dims: poset
            .grades()
            .map(|x| radical_at(module, poset, x).1)
            .collect(),
    }
}

/// Spanning images from the predecessors and the rank of their span.
fn radical_at(module: &PointwiseModule, poset: &Poset, x: Grade) -> (Vec<FixedBitSet>, usize) {
    let images: Vec<FixedBitSet> = poset
        .predecessors(x)
        .iter()
        .flat_map(|&y| module.maps[poset.edge_index(y, x).expect("Hasse edge")].columns())
        .collect();
    let rank = Dense::from_columns(module.dims[x.0], &images).rank();
    (images, rank)
}

/// Minimal number of generators per grade and the kernel of a minimal
/// free cover, as a module.
pub fn cover_and_kernel(module: &PointwiseModule, poset: &Poset) -> (Vec<usize>, PointwiseModule) {
    let mut gens: Vec<(Grade, FixedBitSet)> = Vec::new();
    let mut counts = vec![0; poset.len()];
    for &x in poset.linear_extension().order() {
        let dim = module.dims[x.0];
        let (mut span, mut rank) = radical_at(module, poset, x);
        for i in 0..dim {
            let mut e = FixedBitSet::with_capacity(dim);
            e.insert(i);
            span.push(e.clone());
            let grown = Dense::from_columns(dim, &span).rank();
            if grown > rank {
                rank = grown;
                gens.push((x, e));
                counts[x.0] += 1;
            } else {
                span.pop();
            }
        }
    }
    let images: Vec<Vec<Option<FixedBitSet>>> = gens
        .iter()
        .map(|(g, v)| module.push_forward(poset, *g, v.clone()))
        .collect();
    let active: Vec<Vec<usize>> = poset
        .grades()
        .map(|x| {
            (0..gens.len())
                .filter(|&k| poset.leq(gens[k].0, x))
                .collect()
        })
        .collect();
    // Kernel bases, in the global generator coordinates.
    let kernels: Vec<Vec<FixedBitSet>> = poset
        .grades()
        .map(|x| {
            let cols: Vec<FixedBitSet> = active[x.0]
                .iter()
                .map(|&k| images[k][x.0].clone().expect("generator below x"))
                .collect();
            Dense::from_columns(module.dims[x.0], &cols)
                .kernel()
                .into_iter()
                .map(|v| {
                    let mut global = FixedBitSet::with_capacity(gens.len());
                    for local in v.ones() {
                        global.insert(active[x.0][local]);
                    }
                    global
                })
                .collect()
        })
        .collect();
    let maps = poset
        .edges()
        .iter()
        .map(|&(x, y)| {
            let target = Dense::from_columns(gens.len(), &kernels[y.0]);
            let columns: Vec<FixedBitSet> = kernels[x.0]
                .iter()
                .map(|v| target.solve(v).expect("kernel maps into kernel"))
                .collect();
            Dense::from_columns(kernels[y.0].len(), &columns)
        })
        .collect();
    let kernel = PointwiseModule {
        dims: kernels.iter().map(Vec::len).collect(),
        labels: kernels
            .iter()
            .map(|b| (0..b.len()).map(|k| format!("#{k}")).collect())
            .collect(),
        maps,
    };
    (counts, kernel)
}

/// Betti numbers `β_0 .. β_{count-1}` per grade.
pub fn minimal_betti(module: &PointwiseModule, poset: &Poset, count: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(count);
    let mut current = module.clone();
    for _ in 0..count {
        let (b, kernel) = cover_and_kernel(&current, poset);
        out.push(b);
        current = kernel;
    }
    out
}

/// `α_l(x)`: sends each generator row of grade `<= x` to its simplex pushed
/// to `x`, or to zero once it has degenerated.
pub fn alpha(
    pt: &PointwiseTower,
    tower: &PosetTower,
    sources: &[GenId],
    rows: &[Label],
    l: usize,
) -> Vec<Dense> {
    let p = pt.poset();
    let images: Vec<Vec<Option<Simplex>>> = sources
        .iter()
        .map(|&g| {
            let gen = tower.generator(g);
            let mut img: Vec<Option<Simplex>> = vec![None; p.len()];
            img[gen.grade.0] = Some(gen.simplex.clone());
            for &x in p.linear_extension().order() {
                if x == gen.grade || !p.leq(gen.grade, x) {
                    continue;
                }
                let y = p
                    .predecessors(x)
                    .iter()
                    .copied()
                    .find(|&y| p.leq(gen.grade, y))
                    .expect("predecessor above generator");
                let e = p.edge_index(y, x).expect("Hasse edge");
                img[x.0] = img[y.0]
                    .as_ref()
                    .map(|s| pt.map_simplex(e, s))
                    .filter(|s| s.len() == l + 1);
            }
            img
        })
        .collect();
    p.grades()
        .map(|x| {
            let basis = pt.simplices(x, l);
            let index: HashMap<&Simplex, usize> =
                basis.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            let active = below(rows, p, x);
            let mut m = Dense::zeros(basis.len(), active.len());
            for (k, &r) in active.iter().enumerate() {
                if let Some(s) = &images[r][x.0] {
                    m.set(index[s], k);
                }
            }
            m
        })
        .collect()
}

/// Outcome of one invariant in one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub invariant: &'static str,
    pub degree: usize,
    /// First failing grade, by name.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.failure.is_none())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failure.is_some())
    }

    fn record(&mut self, invariant: &'static str, degree: usize, failure: Option<String>) {
        self.checks.push(Check {
            invariant,
            degree,
            failure,
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.failure {
                None => writeln!(f, "{} degree {} PASS", c.invariant, c.degree)?,
                Some(g) => writeln!(f, "{} degree {} FAIL @{g}", c.invariant, c.degree)?,
            }
        }
        Ok(())
    }
}

/// First grade in linear-extension order where `ok` fails.
fn first_failure(poset: &Poset, mut ok: impl FnMut(Grade) -> bool) -> Option<String> {
    poset
        .linear_extension()
        .order()
        .iter()
        .find(|&&x| !ok(x))
        .map(|&x| poset.name(x).to_string())
}

fn count_at(labels: &[Label], x: Grade) -> usize {
    labels.iter().filter(|l| l.grade == x).count()
}

/// Columns of grade exactly `x` independent modulo those strictly below.
fn independent_at(m: &GradedMatrix, poset: &Poset, x: Grade) -> bool {
    let (upto, _, _) = evaluate(m, poset, x);
    let (strict, _, _) = evaluate_where(m, poset, x, |g| poset.lt(g, x));
    upto.rank() - strict.rank() == count_at(m.col_labels(), x)
}

/// Runs every invariant the artifacts allow. PiReps and homology
/// presentations are checked in their own degree.
pub fn verify(
    tower: &PosetTower,
    cp: &ChainPresentation,
    pireps: &[PiRep],
    homologies: &[HomologyPresentation],
) -> VerifyReport {
    let mut report = VerifyReport::default();
    let pt = match tower.materialize() {
        Ok(pt) => pt,
        Err(_) => {
            report.record("materialize", 0, Some("?".into()));
            return report;
        }
    };
    let p = tower.poset();
    let mut alphas: Vec<Vec<Dense>> = Vec::new();
    for d in cp.degrees() {
        alphas.push(alpha(&pt, tower, &d.sources, d.generators(), d.degree));
    }
    for d in cp.degrees() {
        verify_degree(&mut report, &pt, cp, d, &alphas);
    }
    for pr in pireps {
        let h = homology_dims(&pt, pr.degree);
        let composed = pr.d_low.entries().multiply(pr.d_high.entries());
        let complex_ok = composed.is_ok_and(|m| m.is_zero());
        report.record(
            "pirep_complex",
            pr.degree,
            (!complex_ok).then(|| "all".to_string()),
        );
        let fail = first_failure(p, |x| {
            let (low, _, _) = evaluate(&pr.d_low, p, x);
            let (high, _, _) = evaluate(&pr.d_high, p, x);
            low.nullity() - high.rank() == h[x.0]
        });
        report.record("pirep_homology", pr.degree, fail);
    }
    for hp in homologies {
        let h = homology_dims(&pt, hp.degree);
        let coker = module_of_coker(&hp.matrix, p);
        let fail = first_failure(p, |x| coker.dims[x.0] == h[x.0]);
        report.record("homology_presentation", hp.degree, fail);
    }
    report
}

/// Failure of one of the computations checked by [`check_tower`].
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Presentation(#[from] crate::presentation::PresentationError),
    #[error(transparent)]
    PiRep(#[from] crate::pirep::PiRepError),
    #[error(transparent)]
    Homology(#[from] crate::homology_presentation::HomologyError),
}

/// Computes everything for a tower and checks it. `quick` stops after the
/// chain presentation; `degree` keeps only that degree's lines.
pub fn check_tower(
    tower: &PosetTower,
    degree: Option<usize>,
    quick: bool,
) -> Result<VerifyReport, PipelineError> {
    use crate::presentation::{run_presentation, PresentationOptions};
    let opts = PresentationOptions {
        record_active: true,
        ..PresentationOptions::full()
    };
    let cp = run_presentation(tower, opts)?;
    let p = tower.poset();
    let mut pireps = Vec::new();
    let mut homologies = Vec::new();
    if !quick {
        for l in (0..cp.degree_count()).filter(|&l| degree.is_none_or(|d| d == l)) {
            let pr = crate::pirep::assemble_pirep(&cp, p, l)?;
            homologies.push(crate::homology_presentation::homology_presentation(
                &pr, p, true,
            )?);
            pireps.push(pr);
        }
    }
    let mut report = verify(tower, &cp, &pireps, &homologies);
    if let Some(d) = degree {
        report.checks.retain(|c| c.degree == d);
    }
    Ok(report)
}

fn verify_degree(
    report: &mut VerifyReport,
    pt: &PointwiseTower,
    cp: &ChainPresentation,
    d: &DegreePresentation,
    alphas: &[Vec<Dense>],
) {
    let p = pt.poset();
    let l = d.degree;
    let chains = chain_module(pt, l);
    let alpha_l = &alphas[l];

    let fail = first_failure(p, |x| {
        let (rel, _, _) = evaluate(&d.p1, p, x);
        let a = &alpha_l[x.0];
        let dim = chains.dims[x.0];
        a.mul(&rel).is_zero() && a.rank() == dim && rel.rows() - rel.rank() == dim
    });
    report.record("exactness_g", l, fail);

    let fail = if l == 0 {
        (d.f.row_count() != 0).then(|| "all".to_string())
    } else {
        let bd = boundary(pt, l);
        first_failure(p, |x| {
            let (f, _, _) = evaluate(&d.f, p, x);
            alphas[l - 1][x.0].mul(&f) == bd[x.0].mul(&alpha_l[x.0])
        })
    };
    report.record("lift", l, fail);

    let f_ok =
        d.f.entries()
            .columns()
            .iter()
            .all(|c| c.len() == if l == 0 { 0 } else { l + 1 });
    report.record("boundary_columns", l, (!f_ok).then(|| "all".to_string()));

    let rad = radical(&chains, p);
    let fail = first_failure(p, |x| {
        count_at(d.generators(), x) == chains.dims[x.0] - rad.dims[x.0]
    });
    report.record("generator_minimality", l, fail);

    let fail = first_failure(p, |x| independent_at(&d.p1, p, x));
    report.record("relation_minimality", l, fail);

    let fail = first_failure(p, |x| {
        let (rel, _, _) = evaluate(&d.p1, p, x);
        let mut closed = Dense::zeros(rel.rows() + 1, rel.cols());
        let shape_ok = rel.columns().iter().enumerate().all(|(j, c)| {
            for i in c.ones() {
                closed.set(i, j);
            }
            match c.count_ones(..) {
                1 => {
                    closed.set(rel.rows(), j);
                    true
                }
                2 => true,
                _ => false,
            }
        });
        shape_ok
            && closed.columns().iter().all(|c| c.count_ones(..) == 2)
            && closed.nullity() == rel.nullity()
            && closed.rows() - closed.rank() == rel.rows() - rel.rank() + 1
    });
    report.record("graph_structure", l, fail);

    if let Some(p2) = &d.p2 {
        let composed_zero =
            d.p1.entries()
                .multiply(p2.entries())
                .is_ok_and(|m| m.is_zero());
        let fail = if composed_zero {
            first_failure(p, |x| {
                let (rel, _, _) = evaluate(&d.p1, p, x);
                let (rr, _, _) = evaluate(p2, p, x);
                rr.rank() == rel.nullity()
            })
        } else {
            Some("all".to_string())
        };
        report.record("exactness_r", l, fail);

        if cp.options().reduce {
            let fail = first_failure(p, |x| independent_at(p2, p, x));
            report.record("relrel_minimality", l, fail);

            let betti = minimal_betti(&chains, p, 3);
            let fail = first_failure(p, |x| {
                betti[0][x.0] == count_at(d.generators(), x)
                    && betti[1][x.0] == count_at(d.relations(), x)
                    && betti[2][x.0] == count_at(p2.col_labels(), x)
            });
            report.record("betti_numbers", l, fail);
        }
    }

    if cp
        .active(p.grades().next().unwrap_or(Grade(0)), l)
        .is_some()
    {
        let fail = first_failure(p, |x| {
            let list = cp.active(x, l).expect("recorded");
            let simplices: Vec<&Simplex> = list.iter().map(|(s, _)| s).collect();
            let mut owners: Vec<usize> = list.iter().map(|&(_, r)| r).collect();
            owners.sort_unstable();
            owners.dedup();
            simplices == pt.simplices(x, l) && owners.len() == list.len()
        });
        report.record("active_bijection", l, fail);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::gf2::Gf2Matrix;
    use crate::homology_presentation::homology_presentation;
    use crate::pirep::assemble_pirep;
    use crate::presentation::{run_presentation, PresentationOptions};

    fn bits(len: usize, ones: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(len);
        for &i in ones {
            b.insert(i);
        }
        b
    }

    #[test]
    fn dense_basics() {
        let m = Dense::from_columns(3, &[bits(3, &[0, 1]), bits(3, &[1, 2]), bits(3, &[0, 2])]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k, vec![bits(3, &[0, 1, 2])]);
        assert!(m.apply(&k[0]).is_clear());
        assert_eq!(m.solve(&bits(3, &[0, 2])), Some(bits(3, &[0, 1])));
        assert_eq!(m.solve(&bits(3, &[0])), None);
    }

    #[test]
    fn filtration_homology() {
        // t0: a, b. t1: c, ab, bc. t2: ac, abc.
        let pt = examples::triangle_filtration().materialize().unwrap();
        assert_eq!(homology_dims(&pt, 0), [2, 1, 1]);
        assert_eq!(homology_dims(&pt, 1), [0, 0, 0]);
    }

    #[test]
    fn constant_circle_and_point() {
        let t = crate::io::parse_tower(
            "poset\nnode a\nnode b\nedge a b\ntower\ngen a u\ngen a v\ngen a w\ngen a u v\ngen a v w\ngen a u w\n",
        )
        .unwrap();
        let pt = t.materialize().unwrap();
        assert_eq!(homology_dims(&pt, 1), [1, 1]);
        assert_eq!(homology_dims(&pt, 0), [1, 1]);
        let t =
            crate::io::parse_tower("poset\nnode a\nnode b\nedge a b\ntower\ngen a u\n").unwrap();
        assert_eq!(homology_dims(&t.materialize().unwrap(), 0), [1, 1]);
    }

    #[test]
    fn two_triangles_pointwise() {
        let t = examples::two_triangles();
        let pt = t.materialize().unwrap();
        let dims =
            |name: &str, l: usize| chain_module(&pt, l).dims[t.poset().grade(name).unwrap().0];
        // uv is born at x1, which is incomparable to x2.
        assert_eq!((dims("x2", 0), dims("x2", 1)), (3, 2));
        assert_eq!((dims("x3", 0), dims("x3", 1)), (3, 3));
        assert_eq!(homology_dims(&pt, 1), [0, 0, 0, 1, 1, 1, 0]);
        let c0 = chain_module(&pt, 0);
        let betti = minimal_betti(&c0, t.poset(), 3);
        let totals: Vec<usize> = betti.iter().map(|b| b.iter().sum()).collect();
        assert_eq!(totals, [4, 2, 2]);
    }

    #[test]
    fn collapse_kills_edge() {
        let t = examples::collapse_tower();
        let pt = t.materialize().unwrap();
        let p = t.poset();
        let e = p
            .edge_index(p.grade("x4").unwrap(), p.grade("x5").unwrap())
            .unwrap();
        let c1 = chain_module(&pt, 1);
        let x4 = p.grade("x4").unwrap();
        let vw = c1.labels[x4.0].iter().position(|s| s == "v,w").unwrap();
        assert!(c1.maps[e].column(vw).is_clear());
    }

    #[test]
    fn coker_of_relations_at_x5() {
        let t = examples::two_triangles();
        let cp = run_presentation(&t, PresentationOptions::default()).unwrap();
        let m = module_of_coker(&cp.degree(0).unwrap().p1, t.poset());
        let x5 = t.poset().grade("x5").unwrap();
        assert_eq!(m.dims[x5.0], 3);
        assert!(m.is_consistent(t.poset()));
    }

    #[test]
    fn free_module_betti() {
        let p = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let b = Grade(1);
        let m = GradedMatrix::new(
            &p,
            vec![Label::new("e", b)],
            Vec::new(),
            Gf2Matrix::zeros(1, 0),
        )
        .unwrap();
        let module = module_of_coker(&m, &p);
        let betti = minimal_betti(&module, &p, 3);
        assert_eq!(betti, vec![vec![0, 1, 0], vec![0; 3], vec![0; 3]]);
    }

    #[test]
    fn examples_verify() {
        for t in [
            examples::collapse_tower(),
            examples::two_triangles(),
            examples::triangle_filtration(),
        ] {
            let opts = PresentationOptions {
                record_active: true,
                ..PresentationOptions::full()
            };
            let cp = run_presentation(&t, opts).unwrap();
            let mut prs = Vec::new();
            let mut hps = Vec::new();
            for l in 0..=cp.degree_count() {
                let pr = assemble_pirep(&cp, t.poset(), l).unwrap();
                hps.push(homology_presentation(&pr, t.poset(), true).unwrap());
                hps.push(homology_presentation(&pr, t.poset(), false).unwrap());
                prs.push(pr);
            }
            let report = verify(&t, &cp, &prs, &hps);
            assert!(report.all_pass(), "{report}");
        }
    }

    #[test]
    fn deleted_relation_is_reported() {
        let t = examples::collapse_tower();
        let cp = run_presentation(&t, PresentationOptions::default()).unwrap();
        let mut broken = cp.clone();
        let d0 = &broken.degree(0).unwrap().p1;
        // Drop r2, the collapse-time identification at x5.
        let trimmed = d0.select_columns(&[0, 1]);
        broken.replace_p1(0, trimmed);
        let report = verify(&t, &broken, &[], &[]);
        let exact = report
            .checks
            .iter()
            .find(|c| c.invariant == "exactness_g" && c.degree == 0)
            .unwrap();
        assert_eq!(exact.failure.as_deref(), Some("x5"));
    }
}
