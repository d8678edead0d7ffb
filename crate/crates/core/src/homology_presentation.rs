//! A presentation of the homology of a PiRep segment `Q_{-1} <- Q_0 <- Q_1`.
//!
//! The kernel of `q_0` is covered by a free module `U_0` and that cover's
//! kernel by `U_1`. A lift `s` of `q_1` through `u_0` gives the relation
//! matrix `(u_1 | s)` on the generators `U_0`.

use thiserror::Error;

use crate::gf2::{self, Column, Echelon, Gf2Error, Gf2Matrix, GradedMatrix, Label};
use crate::pirep::PiRep;
use crate::poset::{Grade, Poset};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("column `{0}` of q1 is not in the image of u0")]
    InconsistentSystem(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Clone, Debug)]
pub struct KernelResolution {
    /// `U_0 -> Q_0`, image equal to `ker q_0` at every grade.
    pub u0: GradedMatrix,
    /// `U_1 -> U_0`, image equal to `ker u_0` at every grade.
    pub u1: GradedMatrix,
}

#[derive(Clone, Debug)]
pub struct HomologyPresentation {
    pub degree: usize,
    /// Rows are the homology generators, columns the relations.
    pub matrix: GradedMatrix,
    pub minimized: bool,
}

impl HomologyPresentation {
    pub fn generators(&self) -> &[Label] {
        self.matrix.row_labels()
    }

    pub fn relations(&self) -> &[Label] {
        self.matrix.col_labels()
    }
}

/// Free cover of `ker m`: one column per generator, placed at the first
/// grade where it is not already implied by the kernels below.
pub fn cover_kernel(m: &GradedMatrix, poset: &Poset, prefix: &str) -> GradedMatrix {
    let mut kernels: Vec<Option<Vec<Column>>> = vec![None; poset.len()];
    let mut pending: Vec<usize> = poset.grades().map(|x| poset.successors(x).len()).collect();
    let mut labels = Vec::new();
    let mut columns = Vec::new();
    for &x in poset.linear_extension().order() {
        let local = m.restrict_at(poset, x);
        let mut span = Echelon::new();
        let mut basis: Vec<Column> = Vec::new();
        for &y in poset.predecessors(x) {
            for v in kernels[y.0].as_ref().expect("predecessor processed") {
                if span.insert(v) {
                    basis.push(v.clone());
                }
            }
        }
        for k in gf2::kernel_basis(&local.matrix) {
            let v: Column = k.into_iter().map(|j| local.cols[j]).collect();
            if span.insert(&v) {
                labels.push(Label::new(format!("{prefix}{}", labels.len()), x));
                columns.push(v.clone());
                basis.push(v);
            }
        }
        kernels[x.0] = Some(basis);
        for &y in poset.predecessors(x) {
            pending[y.0] -= 1;
            if pending[y.0] == 0 {
                kernels[y.0] = None;
            }
        }
    }
    let entries =
        Gf2Matrix::from_columns(m.col_count(), columns).expect("kernel vectors index columns");
    GradedMatrix::new(poset, m.col_labels().to_vec(), labels, entries)
        .expect("kernel vectors live below their grade")
}

pub fn kernel_resolution(q0: &GradedMatrix, poset: &Poset) -> KernelResolution {
    let u0 = cover_kernel(q0, poset, "z");
    let u1 = cover_kernel(&u0, poset, "zr");
    KernelResolution { u0, u1 }
}

/// `s` with `u_0 s = q_1`, each column using only generators below its grade.
pub fn lift_s(
    q1: &GradedMatrix,
    kr: &KernelResolution,
    poset: &Poset,
) -> Result<GradedMatrix, HomologyError> {
    let u0 = &kr.u0;
    let all_rows: Vec<usize> = (0..u0.row_count()).collect();
    let mut columns = Vec::with_capacity(q1.col_count());
    for (j, label) in q1.col_labels().iter().enumerate() {
        let allowed: Vec<usize> = (0..u0.col_count())
            .filter(|&k| poset.leq(u0.col_labels()[k].grade, label.grade))
            .collect();
        let sub = u0.entries().submatrix(&all_rows, &allowed);
        let x = gf2::solve(&sub, q1.entries().column(j))
            .ok_or_else(|| HomologyError::InconsistentSystem(label.name.clone()))?;
        columns.push(x.into_iter().map(|k| allowed[k]).collect());
    }
    Ok(GradedMatrix::new(
        poset,
        u0.col_labels().to_vec(),
        q1.col_labels().to_vec(),
        Gf2Matrix::from_columns(u0.col_count(), columns)?,
    )?)
}

pub fn homology_presentation(
    pr: &PiRep,
    poset: &Poset,
    minimize: bool,
) -> Result<HomologyPresentation, HomologyError> {
    let kr = kernel_resolution(&pr.d_low, poset);
    let s = lift_s(&pr.d_high, &kr, poset)?;
    let labels: Vec<Label> = kr
        .u1
        .col_labels()
        .iter()
        .chain(s.col_labels())
        .cloned()
        .collect();
    let entries = Gf2Matrix::hstack(&[kr.u1.entries(), s.entries()])?;
    let matrix = GradedMatrix::new(poset, kr.u0.col_labels().to_vec(), labels, entries)?;
    let matrix = if minimize {
        minimize_presentation(&matrix, poset)
    } else {
        matrix
    };
    Ok(HomologyPresentation {
        degree: pr.degree,
        matrix,
        minimized: minimize,
    })
}

/// Drops redundant relations and cancels generator/relation pairs of equal
/// grade until neither applies.
pub fn minimize_presentation(m: &GradedMatrix, poset: &Poset) -> GradedMatrix {
    let mut rows: Vec<Label> = m.row_labels().to_vec();
    let mut cols: Vec<(Label, Column)> = m
        .col_labels()
        .iter()
        .cloned()
        .zip(m.entries().columns().iter().cloned())
        .collect();
    loop {
        cols = drop_redundant(cols, poset);
        let Some((j, i)) = find_cancellation(&rows, &cols) else {
            break;
        };
        let (_, pivot) = cols.remove(j);
        for (_, c) in cols.iter_mut() {
            if c.binary_search(&i).is_ok() {
                gf2::add_into(c, &pivot);
            }
        }
        rows.remove(i);
        for (_, c) in cols.iter_mut() {
            for r in c.iter_mut() {
                debug_assert_ne!(*r, i);
                if *r > i {
                    *r -= 1;
                }
            }
        }
    }
    let (labels, columns): (Vec<Label>, Vec<Column>) = cols.into_iter().unzip();
    let entries = Gf2Matrix::from_columns(rows.len(), columns).expect("rows renumbered");
    GradedMatrix::new(poset, rows, labels, entries).expect("column operations respect grades")
}

/// Removes each column lying in the span of kept columns of lower or equal
/// grade, visiting columns by linear-extension position.
fn drop_redundant(cols: Vec<(Label, Column)>, poset: &Poset) -> Vec<(Label, Column)> {
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by_key(|&j| (poset.position(cols[j].0.grade), j));
    let mut keep = vec![false; cols.len()];
    for (step, &j) in order.iter().enumerate() {
        let grade: Grade = cols[j].0.grade;
        let mut span = Echelon::new();
        for &k in &order[..step] {
            if keep[k] && poset.leq(cols[k].0.grade, grade) {
                span.insert(&cols[k].1);
            }
        }
        keep[j] = !span.contains(&cols[j].1);
    }
    cols.into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// A column and one of its rows with the same grade.
fn find_cancellation(rows: &[Label], cols: &[(Label, Column)]) -> Option<(usize, usize)> {
    cols.iter().enumerate().find_map(|(j, (label, c))| {
        c.iter()
            .find(|&&i| rows[i].grade == label.grade)
            .map(|&i| (j, i))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::pirep::assemble_pirep;
    use crate::presentation::{run_presentation, PresentationOptions};

    fn two_triangles_pirep() -> (crate::tower::PosetTower, PiRep) {
        let t = examples::two_triangles();
        let cp = run_presentation(&t, PresentationOptions::full()).unwrap();
        let pr = assemble_pirep(&cp, t.poset(), 1).unwrap();
        (t, pr)
    }

    fn grade_names(labels: &[Label], p: &Poset) -> Vec<String> {
        labels.iter().map(|l| p.name(l.grade).to_string()).collect()
    }

    #[test]
    fn kernel_generators_are_the_two_triangles() {
        let (t, pr) = two_triangles_pirep();
        let p = t.poset();
        let kr = kernel_resolution(&pr.d_low, p);
        assert_eq!(grade_names(kr.u0.col_labels(), p), ["x3", "x4"]);
        assert!(pr.d_low.multiply(&kr.u0, p).unwrap().is_zero());
        // The two cycles differ in their relation coordinate, so u0 is
        // injective; the identification at x5 comes through the lift of q1.
        assert_eq!(kr.u1.col_count(), 0);
        let s = lift_s(&pr.d_high, &kr, p).unwrap();
        let rr: Vec<&[usize]> = s
            .col_labels()
            .iter()
            .enumerate()
            .filter(|(_, l)| l.name.starts_with("rr"))
            .map(|(j, _)| s.entries().column(j))
            .collect();
        assert_eq!(rr, [&[0usize, 1][..], &[0, 1]]);
    }

    #[test]
    fn lift_multiplies_back() {
        let (t, pr) = two_triangles_pirep();
        let p = t.poset();
        let kr = kernel_resolution(&pr.d_low, p);
        let s = lift_s(&pr.d_high, &kr, p).unwrap();
        assert_eq!(
            kr.u0.multiply(&s, p).unwrap().entries(),
            pr.d_high.entries()
        );
    }

    #[test]
    fn minimized_two_triangles() {
        let (t, pr) = two_triangles_pirep();
        let p = t.poset();
        let hp = homology_presentation(&pr, p, true).unwrap();
        assert_eq!(grade_names(hp.generators(), p), ["x3", "x4"]);
        let mut rel_grades = grade_names(hp.relations(), p);
        rel_grades.sort();
        assert_eq!(rel_grades, ["x5", "x6", "x6"]);
    }

    #[test]
    fn injective_map_has_no_kernel() {
        let p = Poset::new(&["a"], &[]).unwrap();
        let a = Grade(0);
        let m = GradedMatrix::new(
            &p,
            vec![Label::new("e", a)],
            vec![Label::new("c", a)],
            Gf2Matrix::identity(1),
        )
        .unwrap();
        let kr = kernel_resolution(&m, &p);
        assert_eq!(kr.u0.col_count(), 0);
        assert_eq!(kr.u1.col_count(), 0);
    }

    #[test]
    fn cancellation_removes_split_pair() {
        // Generator z at a killed by a relation at a; w at b untouched.
        let p = Poset::new(&["a", "b"], &[("a", "b")]).unwrap();
        let (a, b) = (Grade(0), Grade(1));
        let m = GradedMatrix::new(
            &p,
            vec![Label::new("z", a), Label::new("w", b)],
            vec![Label::new("k", a), Label::new("q", b), Label::new("k2", b)],
            Gf2Matrix::from_columns(2, vec![vec![0], vec![0, 1], vec![0]]).unwrap(),
        )
        .unwrap();
        // After z goes, q reduces to w at w's own grade and cancels it too.
        let min = minimize_presentation(&m, &p);
        assert_eq!(min.row_count(), 0);
        assert_eq!(min.col_count(), 0);
    }

    #[test]
    fn cancellation_keeps_live_generator() {
        let p = Poset::new(&["a", "b"], &[("a", "b")]).unwrap();
        let (a, b) = (Grade(0), Grade(1));
        let m = GradedMatrix::new(
            &p,
            vec![Label::new("z", a), Label::new("w", a)],
            vec![Label::new("k", a), Label::new("q", b)],
            Gf2Matrix::from_columns(2, vec![vec![0, 1], vec![1]]).unwrap(),
        )
        .unwrap();
        // k identifies z with w at a; q kills w (and so z) at b.
        let min = minimize_presentation(&m, &p);
        assert_eq!(min.row_labels(), &[Label::new("w", a)]);
        assert_eq!(min.col_labels(), &[Label::new("q", b)]);
        assert_eq!(min.entries().column(0), &[0]);
    }
}
