//! Projective implicit representation of `H_ℓ` built from the presentations
//! of two consecutive chain modules.
//!
//! With generators `G`, relations `R` and relations between relations `RR`,
//! the segment is
//!
//! ```text
//! G_{ℓ-1}  <--d_low--  G_ℓ ⊕ R_{ℓ-1}  <--d_high--  G_{ℓ+1} ⊕ R_ℓ ⊕ RR_{ℓ-1}
//!
//! d_low  = ( f_ℓ | p1_{ℓ-1} )
//! d_high = [ f_{ℓ+1}  p1_ℓ   0        ]
//!          [ theta    gamma  p2_{ℓ-1} ]
//! ```
//!
//! where `gamma` and `theta` are lifts through `p1_{ℓ-1}` of `f_ℓ p1_ℓ` and
//! `f_ℓ f_{ℓ+1}`. Both are graph-structured systems, solved in linear time.

use thiserror::Error;

use crate::gf2::{Gf2Error, Gf2Matrix, GradedMatrix, Label};
use crate::graph_solver::{constrained_lift, SolverError};
use crate::poset::Poset;
use crate::presentation::ChainPresentation;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PiRepError {
    #[error("relations between relations were not computed")]
    MissingRelRel,
    #[error("lift failed: {0}")]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("assembled maps do not compose to zero")]
    NotAComplex,
}

#[derive(Clone, Debug)]
pub struct PiRep {
    pub degree: usize,
    /// `G_{ℓ-1} <- G_ℓ ⊕ R_{ℓ-1}`.
    pub d_low: GradedMatrix,
    /// `G_ℓ ⊕ R_{ℓ-1} <- G_{ℓ+1} ⊕ R_ℓ ⊕ RR_{ℓ-1}`.
    pub d_high: GradedMatrix,
    pub gamma: GradedMatrix,
    pub theta: GradedMatrix,
}

impl PiRep {
    pub fn codomain(&self) -> &[Label] {
        self.d_low.row_labels()
    }

    pub fn middle(&self) -> &[Label] {
        self.d_low.col_labels()
    }

    pub fn domain(&self) -> &[Label] {
        self.d_high.col_labels()
    }
}

/// Matrices of one degree, with empty stand-ins outside the computed range.
struct Blocks {
    gens: Vec<Label>,
    rels: Vec<Label>,
    p1: GradedMatrix,
    f: GradedMatrix,
    p2: Option<GradedMatrix>,
}

fn blocks(cp: &ChainPresentation, l: isize) -> Blocks {
    match (l >= 0).then(|| cp.degree(l as usize)).flatten() {
        Some(d) => Blocks {
            gens: d.generators().to_vec(),
            rels: d.relations().to_vec(),
            p1: d.p1.clone(),
            f: d.f.clone(),
            p2: d.p2.clone(),
        },
        None => {
            // No generators in this degree. The boundary still needs the
            // generators one degree down as its rows.
            let lower = if l > 0 {
                cp.degree(l as usize - 1)
                    .map(|d| d.generators().to_vec())
                    .unwrap_or_default()
            } else {
                Vec::new()
            };
            Blocks {
                gens: Vec::new(),
                rels: Vec::new(),
                p1: GradedMatrix::zero(Vec::new(), Vec::new()),
                f: GradedMatrix::zero(lower, Vec::new()),
                p2: Some(GradedMatrix::zero(Vec::new(), Vec::new())),
            }
        }
    }
}

/// `gamma` with `p1_{ℓ-1} gamma = f_ℓ p1_ℓ`.
pub fn compute_gamma(
    cp: &ChainPresentation,
    poset: &Poset,
    l: usize,
) -> Result<GradedMatrix, PiRepError> {
    let cur = blocks(cp, l as isize);
    let low = blocks(cp, l as isize - 1);
    let target = cur.f.multiply(&cur.p1, poset)?;
    Ok(constrained_lift(&low.p1, &target, poset)?)
}

/// `theta` with `p1_{ℓ-1} theta = f_ℓ f_{ℓ+1}`.
pub fn compute_theta(
    cp: &ChainPresentation,
    poset: &Poset,
    l: usize,
) -> Result<GradedMatrix, PiRepError> {
    let cur = blocks(cp, l as isize);
    let low = blocks(cp, l as isize - 1);
    let high = blocks(cp, l as isize + 1);
    let target = cur.f.multiply(&high.f, poset)?;
    Ok(constrained_lift(&low.p1, &target, poset)?)
}

pub fn assemble_pirep(
    cp: &ChainPresentation,
    poset: &Poset,
    l: usize,
) -> Result<PiRep, PiRepError> {
    let cur = blocks(cp, l as isize);
    let low = blocks(cp, l as isize - 1);
    let high = blocks(cp, l as isize + 1);
    let p2_low = low.p2.clone().ok_or(PiRepError::MissingRelRel)?;
    if cp.degree(l).is_some_and(|d| d.p2.is_none()) {
        return Err(PiRepError::MissingRelRel);
    }
    let gamma = compute_gamma(cp, poset, l)?;
    let theta = compute_theta(cp, poset, l)?;

    let middle: Vec<Label> = cur.gens.iter().chain(&low.rels).cloned().collect();
    let d_low = GradedMatrix::new(
        poset,
        low.gens.clone(),
        middle.clone(),
        Gf2Matrix::hstack(&[cur.f.entries(), low.p1.entries()])?,
    )?;

    let rr_low = p2_low.col_labels().to_vec();
    let domain: Vec<Label> = high
        .gens
        .iter()
        .chain(&cur.rels)
        .chain(&rr_low)
        .cloned()
        .collect();
    let top = Gf2Matrix::hstack(&[
        high.f.entries(),
        cur.p1.entries(),
        &Gf2Matrix::zeros(cur.gens.len(), rr_low.len()),
    ])?;
    let bottom = Gf2Matrix::hstack(&[theta.entries(), gamma.entries(), p2_low.entries()])?;
    let d_high = GradedMatrix::new(poset, middle, domain, Gf2Matrix::vstack(&[&top, &bottom])?)?;

    if !d_low.entries().multiply(d_high.entries())?.is_zero() {
        return Err(PiRepError::NotAComplex);
    }
    Ok(PiRep {
        degree: l,
        d_low,
        d_high,
        gamma,
        theta,
    })
}
