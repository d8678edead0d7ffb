//! Poset towers: simplex generators and edge events over a poset, plus the
//! pointwise complexes and vertex maps they describe.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::poset::{Grade, Poset, PosetError};

/// A vertex, as its index in the sorted vertex-name table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Strictly increasing list of vertices.
pub type Simplex = Vec<VertexId>;

/// Position of a generator in the input list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexGenerator {
    pub id: GenId,
    pub simplex: Simplex,
    pub grade: Grade,
}

impl SimplexGenerator {
    pub fn degree(&self) -> usize {
        self.simplex.len() - 1
    }
}

/// Vertex `source` maps to `target` along the Hasse edge `from -> to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeEvent {
    pub from: Grade,
    pub to: Grade,
    pub source: VertexId,
    pub target: VertexId,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("invalid name `{0}`: names may not contain whitespace or any of @,:#")]
    InvalidName(String),
    #[error("generator at `{0}` has no vertices")]
    EmptySimplex(String),
    #[error("generator {{{simplex}}} at `{grade}` repeats a vertex")]
    RepeatedVertex { grade: String, simplex: String },
    #[error("event on {0} -> {1}, which is not a Hasse edge")]
    NotAHasseEdge(String, String),
    #[error("event on {from} -> {to} maps `{vertex}` to itself")]
    FixedPointEvent {
        from: String,
        to: String,
        vertex: String,
    },
    #[error("two events for vertex `{vertex}` on {from} -> {to}")]
    DuplicateEvent {
        from: String,
        to: String,
        vertex: String,
    },
    #[error("simplex {{{simplex}}} at `{grade}` is missing its face {{{face}}}")]
    FaceClosure {
        grade: String,
        simplex: String,
        face: String,
    },
    #[error("invalid tower:\n{0}")]
    Invalid(ValidationReport),
}

fn check_name(name: &str) -> Result<(), TowerError> {
    let bad = name.is_empty()
        || name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '@' | ',' | ':' | '#'));
    if bad {
        Err(TowerError::InvalidName(name.to_string()))
    } else {
        Ok(())
    }
}

/// Collects generators and events by name before interning vertices.
#[derive(Debug)]
pub struct TowerBuilder {
    poset: Poset,
    generators: Vec<(String, Vec<String>)>,
    events: Vec<[String; 4]>,
}

impl TowerBuilder {
    pub fn new(poset: Poset) -> Self {
        Self {
            poset,
            generators: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn generator<S: AsRef<str>>(&mut self, grade: &str, vertices: &[S]) -> &mut Self {
        self.generators.push((
            grade.to_string(),
            vertices.iter().map(|v| v.as_ref().to_string()).collect(),
        ));
        self
    }

    pub fn event(&mut self, from: &str, to: &str, source: &str, target: &str) -> &mut Self {
        self.events
            .push([from, to, source, target].map(str::to_string));
        self
    }

    /// Interns vertices and checks the structural constraints that do not
    /// need the pointwise complexes. See [`PosetTower::validate`] for the rest.
    pub fn build(self) -> Result<PosetTower, TowerError> {
        for name in self.poset.names() {
            check_name(name)?;
        }
        let mut names: Vec<&str> = self
            .generators
            .iter()
            .flat_map(|(_, vs)| vs.iter().map(String::as_str))
            .chain(
                self.events
                    .iter()
                    .flat_map(|e| [e[2].as_str(), e[3].as_str()]),
            )
            .collect();
        names.sort_unstable();
        names.dedup();
        for name in &names {
            check_name(name)?;
        }
        let index: HashMap<&str, VertexId> = names
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, VertexId(i as u32)))
            .collect();

        let mut generators = Vec::with_capacity(self.generators.len());
        for (grade_name, vs) in &self.generators {
            let grade = self.poset.grade(grade_name)?;
            if vs.is_empty() {
                return Err(TowerError::EmptySimplex(grade_name.clone()));
            }
            let mut simplex: Simplex = vs.iter().map(|v| index[v.as_str()]).collect();
            simplex.sort_unstable();
            if simplex.windows(2).any(|w| w[0] == w[1]) {
                return Err(TowerError::RepeatedVertex {
                    grade: grade_name.clone(),
                    simplex: vs.join(","),
                });
            }
            generators.push(SimplexGenerator {
                id: GenId(generators.len()),
                simplex,
                grade,
            });
        }

        let mut events = Vec::with_capacity(self.events.len());
        let mut seen = BTreeSet::new();
        for [from, to, v, w] in &self.events {
            let x = self.poset.grade(from)?;
            let y = self.poset.grade(to)?;
            if !self.poset.is_hasse_edge(x, y) {
                return Err(TowerError::NotAHasseEdge(from.clone(), to.clone()));
            }
            if v == w {
                return Err(TowerError::FixedPointEvent {
                    from: from.clone(),
                    to: to.clone(),
                    vertex: v.clone(),
                });
            }
            let source = index[v.as_str()];
            if !seen.insert((x, y, source)) {
                return Err(TowerError::DuplicateEvent {
                    from: from.clone(),
                    to: to.clone(),
                    vertex: v.clone(),
                });
            }
            events.push(EdgeEvent {
                from: x,
                to: y,
                source,
                target: index[w.as_str()],
            });
        }

        Ok(PosetTower::assemble(
            self.poset,
            names.into_iter().map(String::from).collect(),
            generators,
            events,
        ))
    }
}

/// The compact encoding of a poset tower.
#[derive(Clone, Debug)]
pub struct PosetTower {
    poset: Poset,
    vertices: Vec<String>,
    generators: Vec<SimplexGenerator>,
    events: Vec<EdgeEvent>,
    by_grade: Vec<Vec<GenId>>,
    edge_maps: Vec<HashMap<VertexId, VertexId>>,
}

impl PosetTower {
    fn assemble(
        poset: Poset,
        vertices: Vec<String>,
        generators: Vec<SimplexGenerator>,
        events: Vec<EdgeEvent>,
    ) -> Self {
        let mut by_grade = vec![Vec::new(); poset.len()];
        for g in &generators {
            by_grade[g.grade.0].push(g.id);
        }
        let mut edge_maps = vec![HashMap::new(); poset.edge_count()];
        for e in &events {
            let k = poset
                .edge_index(e.from, e.to)
                .expect("event on a Hasse edge");
            edge_maps[k].insert(e.source, e.target);
        }
        Self {
            poset,
            vertices,
            generators,
            events,
            by_grade,
            edge_maps,
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0 as usize]
    }

    pub fn generators(&self) -> &[SimplexGenerator] {
        &self.generators
    }

    pub fn generator(&self, id: GenId) -> &SimplexGenerator {
        &self.generators[id.0]
    }

    /// Generators at `x` in input order.
    pub fn generators_at(&self, x: Grade) -> &[GenId] {
        &self.by_grade[x.0]
    }

    pub fn events(&self) -> &[EdgeEvent] {
        &self.events
    }

    /// Input size: generators plus events.
    pub fn size(&self) -> usize {
        self.generators.len() + self.events.len()
    }

    /// Largest generator dimension, or `None` for an empty tower.
    pub fn max_dim(&self) -> Option<usize> {
        self.generators.iter().map(SimplexGenerator::degree).max()
    }

    /// Image of a vertex along the Hasse edge with index `edge`.
    pub fn map_vertex(&self, edge: usize, v: VertexId) -> VertexId {
        self.edge_maps[edge].get(&v).copied().unwrap_or(v)
    }

    /// Image of a simplex along a Hasse edge, with repeated vertices merged.
    pub fn map_simplex(&self, edge: usize, simplex: &[VertexId]) -> Simplex {
        let mut image: Simplex = simplex.iter().map(|&v| self.map_vertex(edge, v)).collect();
        image.sort_unstable();
        image.dedup();
        image
    }

    /// Comma separated vertex names.
    pub fn simplex_name(&self, simplex: &[VertexId]) -> String {
        simplex
            .iter()
            .map(|&v| self.vertex_name(v))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Pointwise complexes built in linear-extension order, without checks.
    fn complexes(&self) -> Vec<BTreeSet<Simplex>> {
        let p = &self.poset;
        let mut out: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); p.len()];
        for &x in p.linear_extension().order() {
            let mut here = BTreeSet::new();
            for &y in p.predecessors(x) {
                let edge = p.edge_index(y, x).expect("Hasse edge");
                for s in &out[y.0] {
                    here.insert(self.map_simplex(edge, s));
                }
            }
            for &g in &self.by_grade[x.0] {
                here.insert(self.generators[g.0].simplex.clone());
            }
            out[x.0] = here;
        }
        out
    }

    /// Reconstructs every complex `K(x)` and the maps between them.
    ///
    /// Fails on the first generator with a missing face. Use
    /// [`validate`](Self::validate) for the full list of problems.
    pub fn materialize(&self) -> Result<PointwiseTower, TowerError> {
        let complexes = self.complexes();
        for g in &self.generators {
            if let Some(face) = missing_face(&complexes[g.grade.0], &g.simplex) {
                return Err(TowerError::FaceClosure {
                    grade: self.poset.name(g.grade).to_string(),
                    simplex: self.simplex_name(&g.simplex),
                    face: self.simplex_name(&face),
                });
            }
        }
        Ok(self.pointwise(complexes))
    }

    fn pointwise(&self, complexes: Vec<BTreeSet<Simplex>>) -> PointwiseTower {
        PointwiseTower {
            poset: self.poset.clone(),
            vertices: self.vertices.clone(),
            complexes,
            maps: self.edge_maps.clone(),
        }
    }

    /// Runs every validity check and lists all violations.
    pub fn validate(&self) -> ValidationReport {
        let p = &self.poset;
        let complexes = self.complexes();
        let mut violations = Vec::new();

        let mut seen = BTreeSet::new();
        for g in &self.generators {
            if !seen.insert((g.grade, g.simplex.clone())) {
                violations.push(Violation::DuplicateGenerator {
                    grade: g.grade,
                    simplex: g.simplex.clone(),
                });
            }
            if let Some(face) = missing_face(&complexes[g.grade.0], &g.simplex) {
                violations.push(Violation::FaceClosure {
                    grade: g.grade,
                    simplex: g.simplex.clone(),
                    face,
                });
            }
        }

        // Each predecessor's image is built once per grade that has generators.
        for x in p.grades().filter(|x| !self.by_grade[x.0].is_empty()) {
            let images: Vec<(Grade, BTreeSet<Simplex>)> = p
                .predecessors(x)
                .iter()
                .map(|&y| {
                    let edge = p.edge_index(y, x).expect("Hasse edge");
                    let image = complexes[y.0]
                        .iter()
                        .map(|s| self.map_simplex(edge, s))
                        .collect();
                    (y, image)
                })
                .collect();
            for &g in &self.by_grade[x.0] {
                let simplex = &self.generators[g.0].simplex;
                if let Some((y, _)) = images.iter().find(|(_, im)| im.contains(simplex)) {
                    violations.push(Violation::NotGenuine {
                        grade: x,
                        simplex: simplex.clone(),
                        predecessor: *y,
                    });
                }
            }
        }

        for e in &self.events {
            if !complexes[e.from.0].contains(&vec![e.source]) {
                violations.push(Violation::AbsentEventSource {
                    from: e.from,
                    to: e.to,
                    vertex: e.source,
                });
            }
        }

        // Composite maps agree along all paths iff every vertex generator
        // has a single image at every grade above it.
        let mut images: Vec<BTreeMap<GenId, VertexId>> = vec![BTreeMap::new(); p.len()];
        for &x in p.linear_extension().order() {
            let mut here: BTreeMap<GenId, VertexId> = BTreeMap::new();
            let mut clash = BTreeSet::new();
            for &y in p.predecessors(x) {
                let edge = p.edge_index(y, x).expect("Hasse edge");
                for (&g, &v) in &images[y.0] {
                    let w = self.map_vertex(edge, v);
                    match here.get(&g) {
                        Some(&prev) if prev != w => {
                            clash.insert(g);
                        }
                        _ => {
                            here.insert(g, w);
                        }
                    }
                }
            }
            for g in clash {
                violations.push(Violation::NotFunctorial {
                    grade: x,
                    vertex: self.generators[g.0].simplex[0],
                    origin: self.generators[g.0].grade,
                });
            }
            for &g in &self.by_grade[x.0] {
                let gen = &self.generators[g.0];
                if gen.simplex.len() == 1 {
                    here.entry(g).or_insert(gen.simplex[0]);
                }
            }
            images[x.0] = here;
        }

        ValidationReport {
            violations: violations
                .into_iter()
                .map(|v| (v.clone(), self.describe(&v)))
                .collect(),
        }
    }

    /// Returns `self` if [`validate`](Self::validate) reports nothing.
    pub fn validated(self) -> Result<Self, TowerError> {
        let report = self.validate();
        if report.is_ok() {
            Ok(self)
        } else {
            Err(TowerError::Invalid(report))
        }
    }

    fn describe(&self, v: &Violation) -> String {
        let p = &self.poset;
        match v {
            Violation::DuplicateGenerator { grade, simplex } => format!(
                "duplicate generator {{{}}} at {}",
                self.simplex_name(simplex),
                p.name(*grade)
            ),
            Violation::FaceClosure {
                grade,
                simplex,
                face,
            } => format!(
                "face closure: {{{}}} at {} lacks face {{{}}}",
                self.simplex_name(simplex),
                p.name(*grade),
                self.simplex_name(face)
            ),
            Violation::NotGenuine {
                grade,
                simplex,
                predecessor,
            } => format!(
                "generator {{{}}} at {} is already the image of {}",
                self.simplex_name(simplex),
                p.name(*grade),
                p.name(*predecessor)
            ),
            Violation::AbsentEventSource { from, to, vertex } => format!(
                "event on {} -> {} moves `{}`, which is not a vertex at {}",
                p.name(*from),
                p.name(*to),
                self.vertex_name(*vertex),
                p.name(*from)
            ),
            Violation::NotFunctorial {
                grade,
                vertex,
                origin,
            } => format!(
                "maps into {} disagree on vertex `{}` generated at {}",
                p.name(*grade),
                self.vertex_name(*vertex),
                p.name(*origin)
            ),
        }
    }

    /// Generators and events sorted canonically, for set comparisons.
    pub fn canonical_content(&self) -> (Vec<(Grade, Simplex)>, Vec<EdgeEvent>) {
        let mut gens: Vec<_> = self
            .generators
            .iter()
            .map(|g| (g.grade, g.simplex.clone()))
            .collect();
        gens.sort();
        let mut events = self.events.clone();
        events.sort();
        (gens, events)
    }
}

fn missing_face(complex: &BTreeSet<Simplex>, simplex: &[VertexId]) -> Option<Simplex> {
    if simplex.len() < 2 {
        return None;
    }
    (0..simplex.len())
        .map(|i| {
            let mut face = simplex.to_vec();
            face.remove(i);
            face
        })
        .find(|face| !complex.contains(face))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateGenerator {
        grade: Grade,
        simplex: Simplex,
    },
    FaceClosure {
        grade: Grade,
        simplex: Simplex,
        face: Simplex,
    },
    NotGenuine {
        grade: Grade,
        simplex: Simplex,
        predecessor: Grade,
    },
    AbsentEventSource {
        from: Grade,
        to: Grade,
        vertex: VertexId,
    },
    NotFunctorial {
        grade: Grade,
        vertex: VertexId,
        origin: Grade,
    },
}

/// Outcome of [`PosetTower::validate`]: each violation with a readable message.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<(Violation, String)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (_, msg) in &self.violations {
            writeln!(f, "{msg}")?;
        }
        Ok(())
    }
}

/// Every complex `K(x)` listed explicitly, with the vertex maps on Hasse edges.
#[derive(Clone, Debug)]
pub struct PointwiseTower {
    poset: Poset,
    vertices: Vec<String>,
    complexes: Vec<BTreeSet<Simplex>>,
    /// Moved vertices per Hasse edge; all others are fixed.
    maps: Vec<HashMap<VertexId, VertexId>>,
}

impl PointwiseTower {
    /// Assembles a pointwise tower from explicit data. Complexes are indexed
    /// by grade and maps by Hasse edge index.
    pub fn new(
        poset: Poset,
        vertices: Vec<String>,
        complexes: Vec<BTreeSet<Simplex>>,
        maps: Vec<HashMap<VertexId, VertexId>>,
    ) -> Self {
        assert_eq!(complexes.len(), poset.len());
        assert_eq!(maps.len(), poset.edge_count());
        Self {
            poset,
            vertices,
            complexes,
            maps,
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn complex(&self, x: Grade) -> &BTreeSet<Simplex> {
        &self.complexes[x.0]
    }

    /// The `dim`-simplices of `K(x)` in sorted order.
    pub fn simplices(&self, x: Grade, dim: usize) -> Vec<&Simplex> {
        self.complexes[x.0]
            .iter()
            .filter(|s| s.len() == dim + 1)
            .collect()
    }

    pub fn map_vertex(&self, edge: usize, v: VertexId) -> VertexId {
        self.maps[edge].get(&v).copied().unwrap_or(v)
    }

    pub fn map_simplex(&self, edge: usize, simplex: &[VertexId]) -> Simplex {
        let mut image: Simplex = simplex.iter().map(|&v| self.map_vertex(edge, v)).collect();
        image.sort_unstable();
        image.dedup();
        image
    }

    /// Recovers generators and events: simplices outside every predecessor
    /// image, and vertices of `K(x)` moved along `x -> y`.
    pub fn extract(&self) -> (Vec<(Grade, Simplex)>, Vec<EdgeEvent>) {
        let p = &self.poset;
        let mut gens = Vec::new();
        for x in p.grades() {
            let mut image = BTreeSet::new();
            for &y in p.predecessors(x) {
                let edge = p.edge_index(y, x).expect("Hasse edge");
                for s in &self.complexes[y.0] {
                    image.insert(self.map_simplex(edge, s));
                }
            }
            for s in &self.complexes[x.0] {
                if !image.contains(s) {
                    gens.push((x, s.clone()));
                }
            }
        }
        let mut events = Vec::new();
        for (k, &(x, y)) in p.edges().iter().enumerate() {
            for s in &self.complexes[x.0] {
                if s.len() == 1 {
                    let w = self.map_vertex(k, s[0]);
                    if w != s[0] {
                        events.push(EdgeEvent {
                            from: x,
                            to: y,
                            source: s[0],
                            target: w,
                        });
                    }
                }
            }
        }
        gens.sort();
        events.sort();
        (gens, events)
    }

    /// Checks that every map sends simplices of `K(x)` into `K(y)` and that
    /// every complex is closed under faces.
    pub fn is_consistent(&self) -> bool {
        let p = &self.poset;
        let closed = self.complexes.iter().all(|c| {
            c.iter()
                .all(|s| missing_face(c, s).is_none() && !s.is_empty())
        });
        let maps_ok = p.edges().iter().enumerate().all(|(k, &(x, y))| {
            self.complexes[x.0]
                .iter()
                .all(|s| self.complexes[y.0].contains(&self.map_simplex(k, s)))
        });
        closed && maps_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn vid(t: &PosetTower, name: &str) -> VertexId {
        VertexId(t.vertex_names().iter().position(|v| v == name).unwrap() as u32)
    }

    fn simplex(t: &PosetTower, names: &[&str]) -> Simplex {
        let mut s: Simplex = names.iter().map(|n| vid(t, n)).collect();
        s.sort();
        s
    }

    #[test]
    fn collapse_maps_edges() {
        let t = examples::collapse_tower();
        let pt = t.materialize().unwrap();
        let p = t.poset();
        let (x4, x5) = (p.grade("x4").unwrap(), p.grade("x5").unwrap());
        let edge = p.edge_index(x4, x5).unwrap();
        assert_eq!(
            pt.map_simplex(edge, &simplex(&t, &["u", "v"])),
            simplex(&t, &["u", "w"])
        );
        // vw degenerates to the single vertex w and so leaves the edges.
        let image = pt.map_simplex(edge, &simplex(&t, &["v", "w"]));
        assert_eq!(image, simplex(&t, &["w"]));
        assert!(!pt.simplices(x5, 1).contains(&&simplex(&t, &["v", "w"])));
        assert_eq!(pt.simplices(x5, 1), vec![&simplex(&t, &["u", "w"])]);
    }

    #[test]
    fn filtration_is_union_of_lower_generators() {
        let t = examples::triangle_filtration();
        let pt = t.materialize().unwrap();
        for x in t.poset().grades() {
            let expected: BTreeSet<Simplex> = t
                .generators()
                .iter()
                .filter(|g| t.poset().leq(g.grade, x))
                .map(|g| g.simplex.clone())
                .collect();
            assert_eq!(pt.complex(x), &expected);
        }
    }

    #[test]
    fn examples_validate() {
        assert!(examples::collapse_tower().validate().is_ok());
        assert!(examples::two_triangles().validate().is_ok());
    }

    #[test]
    fn two_triangles_extract() {
        let t = examples::two_triangles();
        let (gens, events) = t.materialize().unwrap().extract();
        assert_eq!(gens.len(), 8);
        assert!(events.is_empty());
        let v = simplex(&t, &["v"]);
        let copies: Vec<_> = gens.iter().filter(|(_, s)| *s == v).collect();
        assert_eq!(copies.len(), 2);
    }

    #[test]
    fn extract_chain_filtration() {
        let poset = Poset::new(&["x0", "x1"], &[("x0", "x1")]).unwrap();
        let (v, w) = (VertexId(0), VertexId(1));
        let complexes = vec![
            BTreeSet::from([vec![v]]),
            BTreeSet::from([vec![v], vec![w], vec![v, w]]),
        ];
        let pt = PointwiseTower::new(
            poset,
            vec!["v".into(), "w".into()],
            complexes,
            vec![HashMap::new()],
        );
        let (gens, events) = pt.extract();
        assert_eq!(
            gens,
            vec![
                (Grade(0), vec![v]),
                (Grade(1), vec![v, w]),
                (Grade(1), vec![w]),
            ]
        );
        assert!(events.is_empty());
    }

    fn chain2() -> Poset {
        Poset::new(&["x0", "x1"], &[("x0", "x1")]).unwrap()
    }

    #[test]
    fn duplicate_generator_reported() {
        let mut b = TowerBuilder::new(chain2());
        b.generator("x1", &["v"]).generator("x1", &["v"]);
        let report = b.build().unwrap().validate();
        assert!(report
            .violations
            .iter()
            .any(|(v, _)| matches!(v, Violation::DuplicateGenerator { .. })));
        assert!(report.to_string().contains("duplicate generator"));
    }

    #[test]
    fn missing_face_reported() {
        let mut b = TowerBuilder::new(chain2());
        b.generator("x1", &["v"]).generator("x1", &["u", "v"]);
        let t = b.build().unwrap();
        let report = t.validate();
        assert!(report
            .violations
            .iter()
            .any(|(v, _)| matches!(v, Violation::FaceClosure { .. })));
        assert!(matches!(
            t.materialize(),
            Err(TowerError::FaceClosure { .. })
        ));
    }

    #[test]
    fn non_genuine_generator_reported() {
        let mut b = TowerBuilder::new(chain2());
        b.generator("x0", &["v"]).generator("x1", &["v"]);
        let report = b.build().unwrap().validate();
        assert!(matches!(
            report.violations[0].0,
            Violation::NotGenuine { .. }
        ));
    }

    #[test]
    fn event_errors() {
        let mut b = TowerBuilder::new(chain2());
        b.generator("x0", &["v"]).event("x0", "x1", "v", "v");
        assert!(matches!(b.build(), Err(TowerError::FixedPointEvent { .. })));

        let mut b = TowerBuilder::new(chain2());
        b.generator("x0", &["v"]).event("x1", "x0", "v", "w");
        assert!(matches!(b.build(), Err(TowerError::NotAHasseEdge(..))));

        let mut b = TowerBuilder::new(chain2());
        b.generator("x0", &["v"])
            .event("x0", "x1", "v", "w")
            .event("x0", "x1", "v", "u");
        assert!(matches!(b.build(), Err(TowerError::DuplicateEvent { .. })));

        let mut b = TowerBuilder::new(chain2());
        b.generator("x0", &["v"]).event("x0", "x1", "u", "v");
        let report = b.build().unwrap().validate();
        assert!(matches!(
            report.violations[0].0,
            Violation::AbsentEventSource { .. }
        ));
    }

    #[test]
    fn chained_events_are_not_composed() {
        let mut b = TowerBuilder::new(chain2());
        b.generator("x0", &["u"])
            .generator("x0", &["v"])
            .generator("x0", &["w"])
            .event("x0", "x1", "v", "w")
            .event("x0", "x1", "w", "u");
        let t = b.build().unwrap();
        assert!(t.validate().is_ok());
        let pt = t.materialize().unwrap();
        let x1 = t.poset().grade("x1").unwrap();
        assert_eq!(
            pt.simplices(x1, 0),
            vec![&simplex(&t, &["u"]), &simplex(&t, &["w"])]
        );
    }

    #[test]
    fn non_functorial_diamond_reported() {
        let poset = Poset::new(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
        )
        .unwrap();
        let mut b = TowerBuilder::new(poset);
        b.generator("a", &["u"])
            .generator("a", &["v"])
            .event("a", "b", "u", "v");
        let report = b.build().unwrap().validate();
        assert!(report
            .violations
            .iter()
            .any(|(v, _)| matches!(v, Violation::NotFunctorial { .. })));
    }

    #[test]
    fn invalid_names_rejected() {
        let mut b = TowerBuilder::new(chain2());
        b.generator("x0", &["a@b"]);
        assert!(matches!(b.build(), Err(TowerError::InvalidName(_))));
    }
}
