//! Small hand-checkable towers used in tests, docs and the CLI golden files.

use crate::io::parse_tower;
use crate::tower::PosetTower;

/// Vertex `v` is born at three incomparable grades and identified at `x4`;
/// the edge `x4 -> x5` collapses `v` onto `w`.
pub const COLLAPSE_TOWER: &str = "\
poset
node x0
node x1
node x2
node x3
node x4
node x5
edge x0 x1
edge x0 x2
edge x0 x3
edge x1 x4
edge x2 x4
edge x3 x4
edge x4 x5
tower
gen x0 u
gen x0 w
gen x1 v
gen x2 v
gen x3 v
gen x1 u v
gen x2 u w
gen x3 v w
event x4 x5 v w
";

/// Two copies of `v` (at `x1` and `x2`) close two triangular cycles at the
/// incomparable grades `x3` and `x4`. Both cycles are identified at `x5`;
/// at `x6` they are filled by the triangle `uvw`.
pub const TWO_TRIANGLES: &str = "\
poset
node x0
node x1
node x2
node x3
node x4
node x5
node x6
edge x0 x1
edge x0 x2
edge x1 x3
edge x2 x3
edge x1 x4
edge x2 x4
edge x3 x5
edge x4 x5
edge x3 x6
edge x4 x6
tower
gen x0 u
gen x0 w
gen x0 u w
gen x1 v
gen x1 u v
gen x2 v
gen x2 v w
gen x6 u v w
";

/// A one-parameter filtration of a filled triangle.
pub const TRIANGLE_FILTRATION: &str = "\
poset
node t0
node t1
node t2
edge t0 t1
edge t1 t2
tower
gen t0 a
gen t0 b
gen t1 c
gen t1 a b
gen t1 b c
gen t2 a c
gen t2 a b c
";

pub fn collapse_tower() -> PosetTower {
    parse_tower(COLLAPSE_TOWER).expect("valid example")
}

pub fn two_triangles() -> PosetTower {
    parse_tower(TWO_TRIANGLES).expect("valid example")
}

pub fn triangle_filtration() -> PosetTower {
    parse_tower(TRIANGLE_FILTRATION).expect("valid example")
}
