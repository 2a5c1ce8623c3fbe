//! Components of the fan complement and their adjacency graph.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BitGrid;

/// Labels of the complement: 0 on fan pixels, `1..=n_components` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentMap {
    pub nx: usize,
    pub ny: usize,
    pub labels: Vec<u32>,
    pub n_components: u32,
}

impl ComponentMap {
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.nx + x]
    }

    /// Pixel count per label, index 0 being the fan.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.n_components as usize + 1];
        for &l in &self.labels {
            s[l as usize] += 1;
        }
        s
    }

    /// Labels whose class touches the image frame.
    pub fn touching_frame(&self) -> BTreeSet<u32> {
        let (nx, ny) = (self.nx, self.ny);
        let mut out = BTreeSet::new();
        for x in 0..nx {
            out.insert(self.get(x, 0));
            out.insert(self.get(x, ny - 1));
        }
        for y in 0..ny {
            out.insert(self.get(0, y));
            out.insert(self.get(nx - 1, y));
        }
        out.remove(&0);
        out
    }
}

/// 4-connected labelling of the pixels not in `raster`, in scan order.
pub fn extract_components(raster: &BitGrid) -> ComponentMap {
    let (nx, ny) = (raster.nx, raster.ny);
    let mut labels = vec![0u32; nx * ny];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..nx * ny {
        if raster.bits[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % nx, i / nx);
            let mut visit = |j: usize| {
                if !raster.bits[j] && labels[j] == 0 {
                    labels[j] = next;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < nx {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - nx);
            }
            if y + 1 < ny {
                visit(i + nx);
            }
        }
    }
    ComponentMap {
        nx,
        ny,
        labels,
        n_components: next,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyGraph {
    /// Vertices are `1..=n`.
    pub n: u32,
    /// Unordered pairs stored as `(min, max)`.
    pub edges: BTreeSet<(u32, u32)>,
}

impl AdjacencyGraph {
    pub fn neighbours(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n as usize + 1];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }
}

/// `U ~ V` when at least `min_witnesses` fan pixels are each 8-adjacent to
/// pixels of both `U` and `V`. `min_witnesses = 1` is the plain rule.
pub fn adjacency_graph(cm: &ComponentMap, min_witnesses: usize) -> AdjacencyGraph {
    adjacency_graph_with(cm, min_witnesses, 1, |_, _| true)
}

/// General form of [`adjacency_graph`]: a witness is a label-0 pixel
/// accepted by `witness` with both components inside its
/// `(2·reach+1)²` window (`reach = 1` is the 8-neighbourhood).
pub fn adjacency_graph_with(
    cm: &ComponentMap,
    min_witnesses: usize,
    reach: usize,
    witness: impl Fn(usize, usize) -> bool,
) -> AdjacencyGraph {
    let r = reach.max(1) as i64;
    let (nx, ny) = (cm.nx as i64, cm.ny as i64);
    let mut counts = std::collections::BTreeMap::<(u32, u32), usize>::new();
    let mut around = Vec::with_capacity(8);
    for y in 0..ny {
        for x in 0..nx {
            if cm.labels[(y * nx + x) as usize] != 0 || !witness(x as usize, y as usize) {
                continue;
            }
            around.clear();
            for dy in -r..=r {
                for dx in -r..=r {
                    let (u, v) = (x + dx, y + dy);
                    if (dx, dy) == (0, 0) || u < 0 || v < 0 || u >= nx || v >= ny {
                        continue;
                    }
                    let l = cm.labels[(v * nx + u) as usize];
                    if l != 0 && !around.contains(&l) {
                        around.push(l);
                    }
                }
            }
            for i in 0..around.len() {
                for j in i + 1..around.len() {
                    let e = (around[i].min(around[j]), around[i].max(around[j]));
                    *counts.entry(e).or_default() += 1;
                }
            }
        }
    }
    let need = min_witnesses.max(1);
    AdjacencyGraph {
        n: cm.n_components,
        edges: counts.into_iter().filter(|&(_, c)| c >= need).map(|(e, _)| e).collect(),
    }
}

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        let p = parent[parent[i as usize] as usize];
        parent[i as usize] = p;
        i = p;
    }
    i
}

/// Whether the graph is connected, and its number of connected components.
/// The empty graph counts as connected with zero components.
pub fn is_connected(g: &AdjacencyGraph) -> (bool, usize) {
    let mut parent: Vec<u32> = (0..=g.n).collect();
    let mut classes = g.n as usize;
    for &(u, v) in &g.edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b) as usize] = a.min(b);
            classes -= 1;
        }
    }
    (classes <= 1, classes)
}

/// Shortest chain `u = U₁, …, U_n = v` of pairwise adjacent components, or
/// `None` when `u` and `v` lie in different graph components.
pub fn chain_between(g: &AdjacencyGraph, u: u32, v: u32) -> Result<Option<Vec<u32>>> {
    for w in [u, v] {
        if w == 0 || w > g.n {
            return Err(Error::param(format!("label {w} is not a vertex of 1..={}", g.n)));
        }
    }
    let adj = g.neighbours();
    let mut prev = vec![0u32; g.n as usize + 1];
    let mut seen = vec![false; g.n as usize + 1];
    seen[u as usize] = true;
    let mut queue = VecDeque::from([u]);
    while let Some(w) = queue.pop_front() {
        if w == v {
            let mut chain = vec![v];
            let mut c = v;
            while c != u {
                c = prev[c as usize];
                chain.push(c);
            }
            chain.reverse();
            return Ok(Some(chain));
        }
        for &x in &adj[w as usize] {
            if !seen[x as usize] {
                seen[x as usize] = true;
                prev[x as usize] = w;
                queue.push_back(x);
            }
        }
    }
    Ok(None)
}

/// Checks that consecutive labels of `chain` are adjacent in `g`.
pub fn verify_chain(g: &AdjacencyGraph, chain: &[u32]) -> bool {
    !chain.is_empty() && chain.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&str]) -> BitGrid {
        let ny = rows.len();
        let nx = rows[0].len();
        let mut g = BitGrid::new(nx, ny);
        for (r, row) in rows.iter().enumerate() {
            for (x, c) in row.bytes().enumerate() {
                if c == b'#' {
                    g.set(x, ny - 1 - r);
                }
            }
        }
        g
    }

    #[test]
    fn simple_counts() {
        assert_eq!(extract_components(&BitGrid::new(5, 4)).n_components, 1);
        let g = grid(&["..#..", "..#..", "..#.."]);
        let cm = extract_components(&g);
        assert_eq!(cm.n_components, 2);
        let ag = adjacency_graph(&cm, 1);
        assert_eq!(ag.edges, BTreeSet::from([(1, 2)]));
    }

    #[test]
    fn nested_rectangles() {
        let g = grid(&[
            "#########",
            "#.......#",
            "#.#####.#",
            "#.#...#.#",
            "#.#####.#",
            "#.......#",
            "#########",
        ]);
        let cm = extract_components(&g);
        // the frame rectangle leaves nothing outside it
        assert_eq!(cm.n_components, 2);
        let g = grid(&[
            "...........",
            ".#########.",
            ".#.......#.",
            ".#.#####.#.",
            ".#.#...#.#.",
            ".#.#####.#.",
            ".#.......#.",
            ".#########.",
            "...........",
        ]);
        let cm = extract_components(&g);
        assert_eq!(cm.n_components, 3);
        let ag = adjacency_graph(&cm, 1);
        let (outer, ring, inner) = (cm.get(0, 0), cm.get(2, 2), cm.get(5, 4));
        assert!(ag.has_edge(inner, ring));
        assert!(ag.has_edge(ring, outer));
        assert!(!ag.has_edge(inner, outer));
    }

    #[test]
    fn graph_connectivity() {
        let g = AdjacencyGraph {
            n: 1,
            edges: BTreeSet::new(),
        };
        assert_eq!(is_connected(&g), (true, 1));
        let g = AdjacencyGraph {
            n: 2,
            edges: BTreeSet::new(),
        };
        assert_eq!(is_connected(&g), (false, 2));
        let path = AdjacencyGraph {
            n: 5,
            edges: (1..5).map(|i| (i, i + 1)).collect(),
        };
        assert_eq!(is_connected(&path), (true, 1));
        assert_eq!(chain_between(&path, 1, 3).unwrap(), Some(vec![1, 2, 3]));
        assert_eq!(chain_between(&path, 4, 4).unwrap(), Some(vec![4]));
        assert!(chain_between(&path, 0, 3).is_err());
        assert!(chain_between(&path, 1, 6).is_err());
        let split = AdjacencyGraph {
            n: 3,
            edges: BTreeSet::from([(1, 2)]),
        };
        assert_eq!(chain_between(&split, 1, 3).unwrap(), None);
    }

    #[test]
    fn witness_threshold() {
        // a one-pixel pinch between two blobs plus a long wall
        let g = grid(&["..#..", "..#..", "..#.."]);
        let cm = extract_components(&g);
        assert_eq!(adjacency_graph(&cm, 3).edges.len(), 1);
        assert_eq!(adjacency_graph(&cm, 4).edges.len(), 0);
    }
}
