//! Visibility graphs over inflated polygonal obstacles.
//!
//! Every passively deformed robot path runs along edges of the visibility
//! graph built from the inflated obstacle corners plus the launch point
//! (and, for robots with a discrete turn, a movable turn vertex). Wall
//! edges are flagged so collision resolution can tell sliding surfaces
//! from free chords.

use crate::geometry::{line_of_sight, GeometryError, Point2, PointLocation, Polygon};
use serde::{Deserialize, Serialize};

/// Where a graph vertex came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    /// Corner `vertex` of inflated obstacle `obstacle`.
    ObstacleCorner { obstacle: usize, vertex: usize },
    Launch,
    Turn,
}

impl VertexKind {
    pub fn is_obstacle_corner(&self) -> bool {
        matches!(self, VertexKind::ObstacleCorner { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub to: usize,
    /// True when the edge runs along an inflated-obstacle wall.
    pub is_wall: bool,
}

/// Symmetric visibility graph. Vertices are referred to by index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VisibilityGraph {
    positions: Vec<Point2>,
    kinds: Vec<VertexKind>,
    adjacency: Vec<Vec<GraphEdge>>,
}

impl VisibilityGraph {
    /// Build the graph of `obstacles` (already inflated) plus `extra`
    /// free-space points such as launch positions.
    ///
    /// Corners that fall strictly inside another obstacle (possible for
    /// sampled environments with overlapping hulls) are kept as vertices
    /// but acquire no edges. An `extra` point inside an obstacle is an
    /// error.
    pub fn build(obstacles: &[Polygon], extra: &[Point2]) -> Result<Self, GeometryError> {
        let mut positions = Vec::new();
        let mut kinds = Vec::new();
        for (oi, poly) in obstacles.iter().enumerate() {
            for (vi, v) in poly.vertices().iter().enumerate() {
                positions.push(*v);
                kinds.push(VertexKind::ObstacleCorner {
                    obstacle: oi,
                    vertex: vi,
                });
            }
        }
        for p in extra {
            if obstacles
                .iter()
                .any(|poly| poly.locate(*p) == PointLocation::Inside)
            {
                return Err(GeometryError::InvalidVertex { x: p.x, y: p.y });
            }
            positions.push(*p);
            kinds.push(VertexKind::Launch);
        }

        let n = positions.len();
        let mut adjacency = vec![Vec::new(); n];
        // A corner buried inside a different obstacle can never be reached.
        let buried: Vec<bool> = positions
            .iter()
            .zip(&kinds)
            .map(|(p, k)| match k {
                VertexKind::ObstacleCorner { obstacle, .. } => obstacles
                    .iter()
                    .enumerate()
                    .any(|(oi, poly)| oi != *obstacle && poly.locate(*p) == PointLocation::Inside),
                _ => false,
            })
            .collect();
        for i in 0..n {
            if buried[i] {
                continue;
            }
            for j in (i + 1)..n {
                if buried[j] {
                    continue;
                }
                let wall = is_wall_pair(&kinds[i], &kinds[j], obstacles);
                if wall || line_of_sight(positions[i], positions[j], obstacles) {
                    adjacency[i].push(GraphEdge { to: j, is_wall: wall });
                    adjacency[j].push(GraphEdge { to: i, is_wall: wall });
                }
            }
        }
        Ok(Self {
            positions,
            kinds,
            adjacency,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, id: usize) -> Point2 {
        self.positions[id]
    }

    pub fn kind(&self, id: usize) -> VertexKind {
        self.kinds[id]
    }

    pub fn neighbors(&self, id: usize) -> &[GraphEdge] {
        &self.adjacency[id]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Index of the vertex at `p`, if one coincides within `tol`.
    pub fn find_vertex(&self, p: Point2, tol: f64) -> Option<usize> {
        self.positions
            .iter()
            .position(|q| q.dist(p) <= tol)
    }

    /// Insert a free-space vertex (used for the turn point) and connect it
    /// by line-of-sight against `obstacles`.
    pub fn add_vertex(
        &mut self,
        p: Point2,
        kind: VertexKind,
        obstacles: &[Polygon],
    ) -> Result<usize, GeometryError> {
        if obstacles
            .iter()
            .any(|poly| poly.locate(p) == PointLocation::Inside)
        {
            return Err(GeometryError::InvalidVertex { x: p.x, y: p.y });
        }
        let id = self.positions.len();
        self.positions.push(p);
        self.kinds.push(kind);
        self.adjacency.push(Vec::new());
        for other in 0..id {
            if line_of_sight(p, self.positions[other], obstacles) {
                self.adjacency[id].push(GraphEdge {
                    to: other,
                    is_wall: false,
                });
                self.adjacency[other].push(GraphEdge {
                    to: id,
                    is_wall: false,
                });
            }
        }
        Ok(id)
    }

    /// Relocate a turn vertex and recompute all of its edges.
    pub fn update_turn_vertex(
        &mut self,
        id: usize,
        new_pos: Point2,
        obstacles: &[Polygon],
    ) -> Result<(), GeometryError> {
        assert_eq!(self.kinds[id], VertexKind::Turn, "vertex {id} is not a turn");
        if new_pos.dist(self.positions[id]) == 0.0 {
            return Ok(());
        }
        if obstacles
            .iter()
            .any(|poly| poly.locate(new_pos) == PointLocation::Inside)
        {
            return Err(GeometryError::InvalidVertex {
                x: new_pos.x,
                y: new_pos.y,
            });
        }
        // Drop old edges referencing this vertex, then reconnect.
        for other in 0..self.positions.len() {
            if other != id {
                self.adjacency[other].retain(|e| e.to != id);
            }
        }
        self.adjacency[id].clear();
        self.positions[id] = new_pos;
        for other in 0..self.positions.len() {
            if other == id {
                continue;
            }
            if line_of_sight(new_pos, self.positions[other], obstacles) {
                self.adjacency[id].push(GraphEdge {
                    to: other,
                    is_wall: false,
                });
                self.adjacency[other].push(GraphEdge {
                    to: id,
                    is_wall: false,
                });
            }
        }
        Ok(())
    }

    /// Degree of a vertex.
    pub fn degree(&self, id: usize) -> usize {
        self.adjacency[id].len()
    }
}

fn is_wall_pair(a: &VertexKind, b: &VertexKind, obstacles: &[Polygon]) -> bool {
    match (a, b) {
        (
            VertexKind::ObstacleCorner {
                obstacle: oa,
                vertex: va,
            },
            VertexKind::ObstacleCorner {
                obstacle: ob,
                vertex: vb,
            },
        ) if oa == ob => {
            let n = obstacles[*oa].len();
            (va + 1) % n == *vb || (vb + 1) % n == *va
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2, Polygon};

    fn square_at(x: f64, y: f64, s: f64) -> Polygon {
        Polygon::new(vec![
            Point2::new(x, y),
            Point2::new(x + s, y),
            Point2::new(x + s, y + s),
            Point2::new(x, y + s),
        ])
        .unwrap()
    }

    #[test]
    fn empty_environment_single_launch() {
        let g = VisibilityGraph::build(&[], &[Point2::new(0.0, 0.0)]).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.kind(0), VertexKind::Launch);
    }

    #[test]
    fn single_square_launch_sees_hull_visible_corners() {
        let sq = square_at(1.0, -0.5, 1.0);
        let launch = Point2::new(0.0, 0.0);
        let g = VisibilityGraph::build(&[sq.clone()], &[launch]).unwrap();
        let launch_id = g.find_vertex(launch, 1e-12).unwrap();
        // Brute-force oracle over corner pairs.
        let visible: Vec<Point2> = sq
            .vertices()
            .iter()
            .copied()
            .filter(|v| line_of_sight(launch, *v, &[sq.clone()]))
            .collect();
        assert_eq!(g.degree(launch_id), visible.len());
        assert!(visible.len() <= 3);
    }

    #[test]
    fn wall_edges_flagged_and_complete() {
        let sq = square_at(0.0, 0.0, 1.0);
        let g = VisibilityGraph::build(&[sq], &[]).unwrap();
        let mut wall_edges = 0;
        for i in 0..g.len() {
            for e in g.neighbors(i) {
                if e.is_wall {
                    wall_edges += 1;
                }
            }
        }
        assert_eq!(wall_edges / 2, 4);
    }

    #[test]
    fn symmetry_and_brute_force_count_two_squares() {
        let a = square_at(0.0, 0.0, 1.0);
        let b = square_at(2.5, 0.5, 1.0);
        let obstacles = vec![a, b];
        let extra = vec![Point2::new(-1.0, -1.0)];
        let g = VisibilityGraph::build(&obstacles, &extra).unwrap();
        // Symmetry.
        for i in 0..g.len() {
            for e in g.neighbors(i) {
                assert!(
                    g.neighbors(e.to).iter().any(|r| r.to == i),
                    "missing reverse edge {} -> {}",
                    e.to,
                    i
                );
            }
        }
        // Brute-force O(V^2) count: all visible pairs plus wall edges.
        let mut expected = 0;
        for i in 0..g.len() {
            for j in (i + 1)..g.len() {
                let wall = is_wall_pair(&g.kind(i), &g.kind(j), &obstacles);
                if wall || line_of_sight(g.position(i), g.position(j), &obstacles) {
                    expected += 1;
                }
            }
        }
        assert_eq!(g.edge_count(), expected);
    }

    #[test]
    fn extra_point_inside_obstacle_is_rejected() {
        let sq = square_at(0.0, 0.0, 1.0);
        let r = VisibilityGraph::build(&[sq], &[Point2::new(0.5, 0.5)]);
        assert!(matches!(r, Err(GeometryError::InvalidVertex { .. })));
    }

    #[test]
    fn turn_vertex_relocation_recomputes_degree() {
        let sq = square_at(1.0, -0.5, 1.0);
        let mut g = VisibilityGraph::build(&[sq.clone()], &[Point2::new(0.0, 0.0)]).unwrap();
        let t = g
            .add_vertex(Point2::new(0.0, 1.0), VertexKind::Turn, &[sq.clone()])
            .unwrap();
        let deg_before = g.degree(t);
        assert!(deg_before > 0);

        // Same point: no change.
        let snapshot = g.clone();
        g.update_turn_vertex(t, Point2::new(0.0, 1.0), &[sq.clone()]).unwrap();
        assert_eq!(g.degree(t), snapshot.degree(t));

        // Move behind the obstacle from the launch: edge to launch drops.
        g.update_turn_vertex(t, Point2::new(3.0, 0.0), &[sq.clone()]).unwrap();
        let launch_id = g.find_vertex(Point2::new(0.0, 0.0), 1e-12).unwrap();
        assert!(!g.neighbors(t).iter().any(|e| e.to == launch_id));
        // Degree equals brute-force visibility count.
        let brute = (0..g.len() - 1)
            .filter(|&i| i != t && line_of_sight(g.position(t), g.position(i), &[sq.clone()]))
            .count();
        assert_eq!(g.degree(t), brute);
    }
}
