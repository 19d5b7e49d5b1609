//! Benchmark target graphs.

use alloc::vec::Vec;

use crate::model::TargetGraph;

pub fn complete(n: usize) -> TargetGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            edges.push((a, b));
        }
    }
    TargetGraph::from_edges(n, &edges).expect("complete graph edges are valid")
}

pub fn path(n: usize) -> TargetGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    TargetGraph::from_edges(n, &edges).expect("path edges are valid")
}

pub fn cycle(n: usize) -> TargetGraph {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n > 2 {
        edges.push((n - 1, 0));
    }
    TargetGraph::from_edges(n, &edges).expect("cycle edges are valid")
}

/// Two complete binary trees with `layers` levels each, glued by identifying
/// their leaves.
///
/// Vertices are numbered level by level: the first root is 0, the shared
/// leaves sit in the middle, and the second root is the last vertex. With
/// three layers this gives 10 vertices and 12 edges.
pub fn glued_binary_tree(layers: usize) -> TargetGraph {
    assert!(layers >= 2, "a glued tree needs at least two layers");
    // Level sizes: 1, 2, ..., 2^(layers-1) (shared), ..., 2, 1.
    let mut level_sizes: Vec<usize> = (0..layers).map(|l| 1usize << l).collect();
    let mut mirror: Vec<usize> = level_sizes[..layers - 1].iter().rev().copied().collect();
    level_sizes.append(&mut mirror);
    let mut starts = Vec::with_capacity(level_sizes.len());
    let mut n = 0;
    for &s in &level_sizes {
        starts.push(n);
        n += s;
    }
    let mid = layers - 1;
    let mut edges = Vec::new();
    for l in 0..level_sizes.len() - 1 {
        if l < mid {
            // expanding: vertex k of level l feeds 2k, 2k+1 of level l+1
            for k in 0..level_sizes[l] {
                edges.push((starts[l] + k, starts[l + 1] + 2 * k));
                edges.push((starts[l] + k, starts[l + 1] + 2 * k + 1));
            }
        } else {
            // contracting: vertices 2k, 2k+1 of level l join k of level l+1
            for k in 0..level_sizes[l + 1] {
                edges.push((starts[l] + 2 * k, starts[l + 1] + k));
                edges.push((starts[l] + 2 * k + 1, starts[l + 1] + k));
            }
        }
    }
    TargetGraph::from_edges(n, &edges).expect("glued tree edges are valid")
}

/// A ladder of `count` tetrahedra (copies of K4), each sharing two vertices
/// with its neighbour. Vertices `2i` and `2i + 1` form rung `i`; tetrahedron
/// `i` spans rungs `i` and `i + 1`.
pub fn glued_tetrahedra(count: usize) -> TargetGraph {
    let n = 2 * (count + 1);
    let mut edges = Vec::new();
    for r in 0..=count {
        edges.push((2 * r, 2 * r + 1));
    }
    for t in 0..count {
        let (a0, b0, a1, b1) = (2 * t, 2 * t + 1, 2 * t + 2, 2 * t + 3);
        edges.extend_from_slice(&[(a0, a1), (b0, b1), (a0, b1), (b0, a1)]);
    }
    TargetGraph::from_edges(n, &edges).expect("tetrahedron ladder edges are valid")
}

/// The fullerene C20 cage (dodecahedral graph), in Schlegel-diagram order:
/// outer pentagon 0..5, middle decagon 5..15, inner pentagon 15..20.
pub fn fullerene_20() -> TargetGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, 5 + 2 * i));
        edges.push((5 + 2 * i + 1, 15 + i));
        edges.push((15 + i, 15 + (i + 1) % 5));
    }
    for j in 0..10 {
        edges.push((5 + j, 5 + (j + 1) % 10));
    }
    TargetGraph::from_edges(20, &edges).expect("fullerene edges are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glued_tree_layer_three() {
        let g = glued_binary_tree(3);
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 12);
        // roots have degree 2, the two inner levels degree 3, leaves degree 2
        let degrees: Vec<_> = (0..10).map(|v| g.degree(v)).collect();
        assert_eq!(degrees, [2, 3, 3, 2, 2, 2, 2, 3, 3, 2]);
        assert!(g.has_edge(0, 2) && g.has_edge(7, 9));
    }

    #[test]
    fn fullerene_is_cubic_with_30_edges() {
        let g = fullerene_20();
        assert_eq!(g.edge_count(), 30);
        assert!((0..20).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn tetrahedra_ladder_contains_k4_blocks() {
        let g = glued_tetrahedra(3);
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 4 + 4 * 3);
        for t in 0..3 {
            let vs = [2 * t, 2 * t + 1, 2 * t + 2, 2 * t + 3];
            for &a in &vs {
                for &b in &vs {
                    assert!(a == b || g.has_edge(a, b));
                }
            }
        }
    }

    #[test]
    fn complete_k3() {
        let g = complete(3);
        assert_eq!(g.adjacency_rows(), [[0, 1, 1], [1, 0, 1], [1, 1, 0]]);
    }
}
