//! Finite posets given by their Hasse diagram.
//!
//! Nodes are identified by name and addressed internally by [`Grade`], the
//! index of the node in declaration order. Order queries are answered from
//! per-node reachability bitsets computed once at construction.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// A node of the indexing poset, as its declaration index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grade(pub usize);

impl Grade {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` declared twice")]
    DuplicateNode(String),
    #[error("edge {0} -> {1} declared twice")]
    DuplicateEdge(String, String),
    #[error("the Hasse diagram contains a directed cycle through `{0}`")]
    Cycle(String),
    #[error("edge {0} -> {1} is implied by a longer path")]
    RedundantEdge(String, String),
}

/// A finite poset stored as a transitively reduced DAG.
#[derive(Clone, Debug)]
pub struct Poset {
    names: Vec<String>,
    lookup: HashMap<String, Grade>,
    edges: Vec<(Grade, Grade)>,
    preds: Vec<Vec<Grade>>,
    succs: Vec<Vec<Grade>>,
    /// `up[x]` holds every `y` with `x <= y`.
    up: Vec<FixedBitSet>,
    order: LinearExtension,
}

/// A topological order of the nodes together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearExtension {
    order: Vec<Grade>,
    position: Vec<usize>,
}

impl LinearExtension {
    pub fn order(&self) -> &[Grade] {
        &self.order
    }

    pub fn position(&self, x: Grade) -> usize {
        self.position[x.0]
    }
}

impl Poset {
    /// Builds a poset from node names and Hasse edges `(pred, succ)`.
    pub fn new<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Result<Self, PosetError> {
        let mut lookup = HashMap::new();
        let mut names = Vec::with_capacity(nodes.len());
        for name in nodes {
            let name = name.as_ref();
            if lookup
                .insert(name.to_string(), Grade(names.len()))
                .is_some()
            {
                return Err(PosetError::DuplicateNode(name.to_string()));
            }
            names.push(name.to_string());
        }
        let mut resolved = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let x = *lookup
                .get(a.as_ref())
                .ok_or_else(|| PosetError::UnknownNode(a.as_ref().to_string()))?;
            let y = *lookup
                .get(b.as_ref())
                .ok_or_else(|| PosetError::UnknownNode(b.as_ref().to_string()))?;
            resolved.push((x, y));
        }
        Self::from_indices(names, lookup, resolved)
    }

    /// Builds a poset on nodes `0..names.len()` from index pairs.
    pub fn from_edges(names: Vec<String>, edges: Vec<(Grade, Grade)>) -> Result<Self, PosetError> {
        let mut lookup = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if lookup.insert(name.clone(), Grade(i)).is_some() {
                return Err(PosetError::DuplicateNode(name.clone()));
            }
        }
        for &(x, y) in &edges {
            for g in [x, y] {
                if g.0 >= names.len() {
                    return Err(PosetError::UnknownNode(g.to_string()));
                }
            }
        }
        Self::from_indices(names, lookup, edges)
    }

    fn from_indices(
        names: Vec<String>,
        lookup: HashMap<String, Grade>,
        edges: Vec<(Grade, Grade)>,
    ) -> Result<Self, PosetError> {
        let n = names.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(x, y) in &edges {
            if x == y {
                return Err(PosetError::Cycle(names[x.0].clone()));
            }
            if succs[x.0].contains(&y) {
                return Err(PosetError::DuplicateEdge(
                    names[x.0].clone(),
                    names[y.0].clone(),
                ));
            }
            succs[x.0].push(y);
            preds[y.0].push(x);
        }
        for list in preds.iter_mut().chain(succs.iter_mut()) {
            list.sort_unstable();
        }

        let order = kahn(&preds, &succs).map_err(|g| PosetError::Cycle(names[g.0].clone()))?;

        let mut up: Vec<FixedBitSet> = (0..n)
            .map(|i| {
                let mut set = FixedBitSet::with_capacity(n);
                set.insert(i);
                set
            })
            .collect();
        for &x in order.order.iter().rev() {
            for &y in &succs[x.0] {
                let above = up[y.0].clone();
                up[x.0].union_with(&above);
            }
        }

        for &(x, y) in &edges {
            let implied = succs[x.0].iter().any(|&z| z != y && up[z.0].contains(y.0));
            if implied {
                return Err(PosetError::RedundantEdge(
                    names[x.0].clone(),
                    names[y.0].clone(),
                ));
            }
        }

        Ok(Self {
            names,
            lookup,
            edges,
            preds,
            succs,
            up,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Number of Hasse edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn grades(&self) -> impl Iterator<Item = Grade> + '_ {
        (0..self.names.len()).map(Grade)
    }

    pub fn name(&self, x: Grade) -> &str {
        &self.names[x.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn grade(&self, name: &str) -> Result<Grade, PosetError> {
        self.lookup
            .get(name)
            .copied()
            .ok_or_else(|| PosetError::UnknownNode(name.to_string()))
    }

    /// Hasse edges in declaration order.
    pub fn edges(&self) -> &[(Grade, Grade)] {
        &self.edges
    }

    /// Index of the Hasse edge `x -> y`, if it exists.
    pub fn edge_index(&self, x: Grade, y: Grade) -> Option<usize> {
        self.edges.iter().position(|&e| e == (x, y))
    }

    pub fn is_hasse_edge(&self, x: Grade, y: Grade) -> bool {
        self.succs[x.0].binary_search(&y).is_ok()
    }

    /// Immediate predecessors of `x` in declaration order.
    pub fn predecessors(&self, x: Grade) -> &[Grade] {
        &self.preds[x.0]
    }

    /// Immediate successors of `x` in declaration order.
    pub fn successors(&self, x: Grade) -> &[Grade] {
        &self.succs[x.0]
    }

    pub fn leq(&self, x: Grade, y: Grade) -> bool {
        self.up[x.0].contains(y.0)
    }

    pub fn lt(&self, x: Grade, y: Grade) -> bool {
        x != y && self.leq(x, y)
    }

    /// Looks up both names and compares them.
    pub fn leq_by_name(&self, x: &str, y: &str) -> Result<bool, PosetError> {
        Ok(self.leq(self.grade(x)?, self.grade(y)?))
    }

    /// The set of nodes above `x`, including `x`.
    pub fn up_set(&self, x: Grade) -> &FixedBitSet {
        &self.up[x.0]
    }

    pub fn linear_extension(&self) -> &LinearExtension {
        &self.order
    }

    pub fn position(&self, x: Grade) -> usize {
        self.order.position(x)
    }
}

/// Kahn's algorithm taking the ready node with the smallest declaration index.
fn kahn(preds: &[Vec<Grade>], succs: &[Vec<Grade>]) -> Result<LinearExtension, Grade> {
    let n = preds.len();
    let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(i)) = ready.pop() {
        order.push(Grade(i));
        for &s in &succs[i] {
            indegree[s.0] -= 1;
            if indegree[s.0] == 0 {
                ready.push(Reverse(s.0));
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
        return Err(Grade(stuck));
    }
    let mut position = vec![0; n];
    for (p, g) in order.iter().enumerate() {
        position[g.0] = p;
    }
    Ok(LinearExtension { order, position })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chain() -> Poset {
        Poset::new(&["x0", "x1", "x2"], &[("x0", "x1"), ("x1", "x2")]).unwrap()
    }

    fn diamond() -> Poset {
        Poset::new(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
        )
        .unwrap()
    }

    fn names_of(p: &Poset) -> Vec<&str> {
        p.linear_extension()
            .order()
            .iter()
            .map(|&g| p.name(g))
            .collect()
    }

    #[test]
    fn chain_order() {
        let p = chain();
        assert!(p.leq_by_name("x0", "x2").unwrap());
        assert!(!p.leq_by_name("x2", "x0").unwrap());
        assert_eq!(names_of(&p), ["x0", "x1", "x2"]);
    }

    #[test]
    fn diamond_incomparable() {
        let p = diamond();
        assert!(!p.leq_by_name("b", "c").unwrap());
        assert!(!p.leq_by_name("c", "b").unwrap());
        assert!(p.leq_by_name("a", "d").unwrap());
        let d = p.grade("d").unwrap();
        let preds: Vec<_> = p.predecessors(d).iter().map(|&g| p.name(g)).collect();
        assert_eq!(preds, ["b", "c"]);
        assert_eq!(names_of(&p), ["a", "b", "c", "d"]);
    }

    #[test]
    fn antichain_keeps_declaration_order() {
        let p = Poset::new::<&str>(&["p", "q"], &[]).unwrap();
        assert_eq!(names_of(&p), ["p", "q"]);
    }

    #[test]
    fn ready_nodes_by_declaration_index() {
        // c is declared before b but only becomes ready after a.
        let p = Poset::new(&["a", "c", "b"], &[("b", "c")]).unwrap();
        assert_eq!(names_of(&p), ["a", "b", "c"]);
    }

    #[test]
    fn reflexive() {
        let p = diamond();
        for x in p.grades() {
            assert!(p.leq(x, x));
        }
    }

    #[test]
    fn rejects_cycles() {
        let err = Poset::new(&["x0", "x1"], &[("x0", "x1"), ("x1", "x0")]).unwrap_err();
        assert!(matches!(err, PosetError::Cycle(_)));
        let err = Poset::new(&["x0"], &[("x0", "x0")]).unwrap_err();
        assert!(matches!(err, PosetError::Cycle(_)));
    }

    #[test]
    fn rejects_redundant_edges() {
        let err = Poset::new(
            &["x0", "x1", "x2"],
            &[("x0", "x1"), ("x1", "x2"), ("x0", "x2")],
        )
        .unwrap_err();
        assert_eq!(err, PosetError::RedundantEdge("x0".into(), "x2".into()));
    }

    #[test]
    fn rejects_unknown_and_duplicate_nodes() {
        assert_eq!(
            Poset::new(&["x0"], &[("x0", "y")]).unwrap_err(),
            PosetError::UnknownNode("y".into())
        );
        assert_eq!(
            Poset::new::<&str>(&["x0", "x0"], &[]).unwrap_err(),
            PosetError::DuplicateNode("x0".into())
        );
        assert!(chain().grade("nope").is_err());
    }

    /// Random DAG on `n` nodes with edges only from lower to higher index,
    /// transitively reduced by brute force.
    fn reduced_dag(n: usize, raw: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in raw {
            let (a, b) = (a % n, b % n);
            if a < b {
                adj[a][b] = true;
            }
        }
        let closure = floyd_closure(n, &adj);
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if adj[a][b] && !(0..n).any(|c| c != a && c != b && closure[a][c] && closure[c][b])
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn floyd_closure(n: usize, adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let mut r = adj.to_vec();
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    proptest! {
        #[test]
        fn leq_matches_closure(
            n in 1usize..30,
            raw in proptest::collection::vec((0usize..30, 0usize..30), 0..80),
            perm_seed in any::<u64>(),
        ) {
            let edges = reduced_dag(n, &raw);
            // Shuffle declaration order so the linear extension is non-trivial.
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = perm_seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let names: Vec<String> = (0..n).map(|i| format!("n{}", perm[i])).collect();
            let named: Vec<(String, String)> = edges
                .iter()
                .map(|&(a, b)| (names[a].clone(), names[b].clone()))
                .collect();
            let p = Poset::new(&names, &named).unwrap();

            let mut adj = vec![vec![false; n]; n];
            for &(a, b) in &edges {
                adj[a][b] = true;
            }
            let closure = floyd_closure(n, &adj);
            for a in 0..n {
                for b in 0..n {
                    prop_assert_eq!(p.leq(Grade(a), Grade(b)), closure[a][b]);
                }
            }
            for &(x, y) in p.edges() {
                prop_assert!(p.position(x) < p.position(y));
            }
            let mut seen = p.linear_extension().order().to_vec();
            seen.sort();
            prop_assert_eq!(seen, p.grades().collect::<Vec<_>>());
        }
    }
}
