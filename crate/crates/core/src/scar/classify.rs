//! Point classes of the scar.

use super::{EdgeKind, ScarPoint, ScarTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    /// Two-point fiber away from polygon vertices and from every unexpanded tail.
    Planar,
    /// Fiber of size `k ≠ 2`, or of size 2 containing a polygon vertex.
    Vertex(usize),
    DeclaredSingular,
    /// Inside or too close to an unexpanded gap to decide.
    TruncationUnknown,
}

/// Classifies a scar point; points within the tail measure of a gap are never called planar.
pub fn classify_point(tree: &ScarTree, x: &ScarPoint) -> PointClass {
    let scheme = &tree.fs.scheme;
    let near_tail = || tree.tail_distance(x).is_some_and(|d| d <= tree.fs.tail_measure);
    match x {
        ScarPoint::Node(n) => {
            let node = &tree.nodes[*n];
            if node.fiber.iter().any(|p| scheme.is_singular(p.poly, &p.t)) {
                return PointClass::DeclaredSingular;
            }
            if node.tail || node.gap_adjacent {
                return PointClass::TruncationUnknown;
            }
            if node.valence() != 2 || node.polygon_vertex {
                return PointClass::Vertex(node.valence());
            }
            if near_tail() {
                PointClass::TruncationUnknown
            } else {
                PointClass::Planar
            }
        }
        ScarPoint::Edge { edge, .. } => {
            if matches!(tree.kinds[*edge], EdgeKind::Gap(_)) || near_tail() {
                PointClass::TruncationUnknown
            } else {
                PointClass::Planar
            }
        }
    }
}
