//! Seeded generators for test and benchmark towers.
//!
//! Random towers are valid by construction: a set of vertex merges, each
//! active from some grade upward, defines at every grade a partition of the
//! vertex pool that only coarsens along the order. Every complex lives on
//! the class representatives (the smallest member) and every structure map
//! is induced by the quotient, so the maps compose consistently.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poset::{Grade, Poset};
use crate::tower::{PosetTower, TowerBuilder, TowerError};
use crate::union_find::UnionFind;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random multi-critical tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TowerParams {
    /// Random simplices drawn; each arrives with all of its faces.
    pub simplices: usize,
    /// Vertex merges, each turned into collapse events on Hasse edges.
    pub merges: usize,
    pub vertices: usize,
    pub max_dim: usize,
}

/// A random DAG on `nodes` grades with up to `edges` Hasse edges. Edges go
/// from lower to higher index; candidates that would be implied by, or
/// would imply, existing edges are skipped.
pub fn random_poset(rng: &mut impl Rng, nodes: usize, edges: usize) -> Poset {
    let names: Vec<String> = (0..nodes).map(|i| format!("x{i}")).collect();
    let mut up: Vec<HashSet<usize>> = (0..nodes).map(|i| HashSet::from([i])).collect();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let max_attempts = edges * 20 + 20;
    for _ in 0..max_attempts {
        if chosen.len() >= edges || nodes < 2 {
            break;
        }
        let a = rng.gen_range(0..nodes - 1);
        let b = rng.gen_range(a + 1..nodes);
        if up[a].contains(&b) {
            continue;
        }
        // An existing edge (c, d) with c <= a and b <= d would become implied.
        if chosen
            .iter()
            .any(|&(c, d)| up[c].contains(&a) && up[b].contains(&d))
        {
            continue;
        }
        chosen.push((a, b));
        let above: Vec<usize> = up[b].iter().copied().collect();
        for c in 0..nodes {
            if up[c].contains(&a) {
                up[c].extend(above.iter().copied());
            }
        }
    }
    let edges: Vec<(Grade, Grade)> = chosen
        .into_iter()
        .map(|(a, b)| (Grade(a), Grade(b)))
        .collect();
    Poset::from_edges(names, edges).expect("generated edges are Hasse edges of a DAG")
}

/// The zigzag `z0 < z1 > z2 < z3 > ...` on `nodes` grades.
pub fn zigzag_poset(nodes: usize) -> Poset {
    let names: Vec<String> = (0..nodes).map(|i| format!("z{i}")).collect();
    let edges = (1..nodes)
        .map(|i| {
            if i % 2 == 1 {
                (Grade(i - 1), Grade(i))
            } else {
                (Grade(i), Grade(i - 1))
            }
        })
        .collect();
    Poset::from_edges(names, edges).expect("zigzag is a poset")
}

/// The `nx` by `ny` grid with the product order.
pub fn grid_poset(nx: usize, ny: usize) -> Poset {
    let names: Vec<String> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| format!("g{i}_{j}")))
        .collect();
    let id = |i: usize, j: usize| Grade(i * ny + j);
    let mut edges = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            if i + 1 < nx {
                edges.push((id(i, j), id(i + 1, j)));
            }
            if j + 1 < ny {
                edges.push((id(i, j), id(i, j + 1)));
            }
        }
    }
    Poset::from_edges(names, edges).expect("grid is a poset")
}

pub fn chain_poset(len: usize) -> Poset {
    let names: Vec<String> = (0..len).map(|i| format!("c{i}")).collect();
    let edges = (1..len).map(|i| (Grade(i - 1), Grade(i))).collect();
    Poset::from_edges(names, edges).expect("chain is a poset")
}

fn vertex_name(v: usize) -> String {
    format!("v{v}")
}

/// Every nonempty face of a simplex, the simplex included.
fn closure(simplex: &[usize]) -> Vec<Vec<usize>> {
    let k = simplex.len();
    (1u32..(1 << k))
        .map(|mask| {
            (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| simplex[i])
                .collect()
        })
        .collect()
}

/// A random tower over the given poset, with multi-critical births and
/// collapse events.
pub fn tower_on(poset: Poset, params: TowerParams, rng: &mut impl Rng) -> PosetTower {
    let t = poset.len();
    let pool = params.vertices.max(1);
    if t == 0 {
        return TowerBuilder::new(poset).build().expect("empty tower");
    }
    let grades: Vec<Grade> = poset.grades().collect();

    let merges: Vec<(Grade, usize, usize)> = (0..params.merges)
        .filter(|_| pool >= 2)
        .map(|_| {
            let x = grades[rng.gen_range(0..t)];
            let v = rng.gen_range(0..pool);
            let mut w = rng.gen_range(0..pool - 1);
            if w >= v {
                w += 1;
            }
            (x, v, w)
        })
        .collect();

    // Class representative of every vertex at every grade.
    let rep: Vec<Vec<usize>> = grades
        .iter()
        .map(|&x| {
            let mut uf = UnionFind::new(pool);
            for &(g, v, w) in &merges {
                if poset.leq(g, x) {
                    uf.union(v, w);
                }
            }
            let mut smallest = vec![usize::MAX; pool];
            for v in 0..pool {
                let root = uf.find(v);
                smallest[root] = smallest[root].min(v);
            }
            (0..pool).map(|v| smallest[uf.find(v)]).collect()
        })
        .collect();
    let project = |x: Grade, s: &[usize]| -> Vec<usize> {
        let mut out: Vec<usize> = s.iter().map(|&v| rep[x.0][v]).collect();
        out.sort_unstable();
        out.dedup();
        out
    };

    let mut births: Vec<Vec<Vec<usize>>> = vec![Vec::new(); t];
    let mut drawn: Vec<Vec<usize>> = Vec::new();
    for _ in 0..params.simplices {
        let x = grades[rng.gen_range(0..t)];
        let reuse = !drawn.is_empty() && rng.gen_bool(0.25);
        let simplex = if reuse {
            project(x, &drawn[rng.gen_range(0..drawn.len())])
        } else {
            let mut classes: Vec<usize> = rep[x.0].clone();
            classes.sort_unstable();
            classes.dedup();
            classes.shuffle(rng);
            let size = rng.gen_range(1..=params.max_dim + 1).min(classes.len());
            let mut s = classes[..size].to_vec();
            s.sort_unstable();
            s
        };
        drawn.push(simplex.clone());
        births[x.0].push(simplex);
    }

    let mut complexes: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); t];
    let mut builder = TowerBuilder::new(poset.clone());
    for &x in poset.linear_extension().order() {
        let mut inherited = BTreeSet::new();
        for &y in poset.predecessors(x) {
            for s in &complexes[y.0] {
                let image = project(x, s);
                inherited.insert(image);
            }
        }
        let mut complex = inherited.clone();
        for s in &births[x.0] {
            complex.extend(closure(s));
        }
        let mut fresh: Vec<&Vec<usize>> = complex.difference(&inherited).collect();
        fresh.sort_by_key(|s| (s.len(), (*s).clone()));
        for s in fresh {
            let names: Vec<String> = s.iter().map(|&v| vertex_name(v)).collect();
            builder.generator(poset.name(x), &names);
        }
        complexes[x.0] = complex;
    }
    for &(y, x) in poset.edges() {
        for s in complexes[y.0].iter().filter(|s| s.len() == 1) {
            let v = s[0];
            let w = rep[x.0][v];
            if w != v {
                builder.event(
                    poset.name(y),
                    poset.name(x),
                    &vertex_name(v),
                    &vertex_name(w),
                );
            }
        }
    }
    builder
        .build()
        .and_then(PosetTower::validated)
        .expect("generated towers are valid by construction")
}

/// A random DAG with a random tower on it.
pub fn random_tower(nodes: usize, edges: usize, params: TowerParams, seed: u64) -> PosetTower {
    let mut r = rng(seed);
    let poset = random_poset(&mut r, nodes, edges);
    tower_on(poset, params, &mut r)
}

pub fn zigzag_tower(nodes: usize, params: TowerParams, seed: u64) -> PosetTower {
    tower_on(zigzag_poset(nodes), params, &mut rng(seed))
}

/// One-critical filtration: each simplex gets one random grade, raised to
/// the join of its faces' grades so that faces always come first.
fn one_critical(
    poset: Poset,
    coords: impl Fn(Grade) -> Vec<usize>,
    from_coords: impl Fn(&[usize]) -> Grade,
    vertices: usize,
    rng: &mut impl Rng,
) -> Result<PosetTower, TowerError> {
    let t = poset.len();
    let vertices = vertices.max(3);
    let mut simplices: BTreeSet<Vec<usize>> = (0..vertices).map(|v| vec![v]).collect();
    for _ in 0..vertices / 2 {
        let mut tri: Vec<usize> = rand::seq::index::sample(rng, vertices, 3).into_vec();
        tri.sort_unstable();
        simplices.extend(closure(&tri));
        let mut edge: Vec<usize> = rand::seq::index::sample(rng, vertices, 2).into_vec();
        edge.sort_unstable();
        simplices.insert(edge);
    }
    let mut order: Vec<Vec<usize>> = simplices.into_iter().collect();
    order.sort_by_key(|s| (s.len(), s.clone()));
    let mut grade_of: std::collections::HashMap<Vec<usize>, Vec<usize>> =
        std::collections::HashMap::new();
    let mut gens: Vec<(Grade, Vec<usize>)> = Vec::new();
    for s in order {
        let mut c = coords(Grade(rng.gen_range(0..t)));
        if s.len() > 1 {
            for skip in 0..s.len() {
                let mut face = s.clone();
                face.remove(skip);
                for (a, b) in c.iter_mut().zip(&grade_of[&face]) {
                    *a = (*a).max(*b);
                }
            }
        }
        gens.push((from_coords(&c), s.clone()));
        grade_of.insert(s, c);
    }
    let grade_names = poset.names().to_vec();
    let mut builder = TowerBuilder::new(poset);
    let names: Vec<String> = (0..vertices).map(vertex_name).collect();
    for (x, s) in &gens {
        let vs: Vec<&str> = s.iter().map(|&v| names[v].as_str()).collect();
        builder.generator(&grade_names[x.0], &vs);
    }
    builder.build()
}

/// One-critical bifiltration on an `nx` by `ny` grid over `vertices` vertices.
pub fn grid_tower(nx: usize, ny: usize, vertices: usize, seed: u64) -> PosetTower {
    let poset = grid_poset(nx.max(1), ny.max(1));
    let ny = ny.max(1);
    one_critical(
        poset,
        |g| vec![g.0 / ny, g.0 % ny],
        |c| Grade(c[0] * ny + c[1]),
        vertices,
        &mut rng(seed),
    )
    .expect("grid filtrations are valid")
}

/// A one-parameter filtration with about `simplices` simplices.
pub fn chain_tower(len: usize, simplices: usize, seed: u64) -> PosetTower {
    let poset = chain_poset(len.max(1));
    one_critical(
        poset,
        |g| vec![g.0],
        |c| Grade(c[0]),
        (simplices / 3).max(3),
        &mut rng(seed),
    )
    .expect("filtrations are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_tower;

    const SMALL: TowerParams = TowerParams {
        simplices: 8,
        merges: 3,
        vertices: 6,
        max_dim: 2,
    };

    #[test]
    fn random_poset_has_only_hasse_edges() {
        let mut r = rng(3);
        for _ in 0..50 {
            let p = random_poset(&mut r, 12, 20);
            assert!(p.edge_count() <= 20);
            for &(x, y) in p.edges() {
                assert!(p.is_hasse_edge(x, y));
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = write_tower(&random_tower(10, 15, SMALL, 7));
        let b = write_tower(&random_tower(10, 15, SMALL, 7));
        let c = write_tower(&random_tower(10, 15, SMALL, 8));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_towers_validate() {
        for seed in 0..100 {
            let t = random_tower(8, 12, SMALL, seed);
            assert!(t.validate().is_ok(), "seed {seed}");
        }
    }

    #[test]
    fn some_random_towers_collapse() {
        let with_events = (0..50)
            .filter(|&s| !random_tower(8, 12, SMALL, s).events().is_empty())
            .count();
        assert!(with_events > 10);
    }

    #[test]
    fn zigzag_shape() {
        let p = zigzag_poset(5);
        let (z0, z1, z2) = (Grade(0), Grade(1), Grade(2));
        assert!(p.lt(z0, z1) && p.lt(z2, z1));
        assert!(!p.leq(z0, z2) && !p.leq(z2, z0));
        assert!(zigzag_tower(7, SMALL, 1).validate().is_ok());
    }

    #[test]
    fn grid_and_chain_are_one_critical() {
        let g = grid_tower(3, 4, 20, 5);
        assert_eq!(g.poset().len(), 12);
        assert!(g.events().is_empty());
        let mut seen = HashSet::new();
        assert!(g
            .generators()
            .iter()
            .all(|s| seen.insert(s.simplex.clone())));
        let c = chain_tower(6, 30, 5);
        assert_eq!(c.poset().len(), 6);
        assert!(c.validate().is_ok());
    }
}
