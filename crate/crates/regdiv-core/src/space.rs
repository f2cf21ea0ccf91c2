//! Industry-space construction: maximum spanning tree over the proximity
//! matrix, the proximity-threshold network, and their superposition, plus
//! deterministic exports for external layout tools.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::ProximityMatrix;
use crate::panel::IndustryRegistry;
use crate::table::fmt_f64;

/// Weighted undirected edge between industries `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub a: usize,
    pub b: usize,
    pub phi: f64,
}

#[derive(Debug, Clone)]
pub struct MstResult {
    pub edges: Vec<WeightedEdge>,
    /// Number of connected components among nodes with nonzero proximity
    /// edges; a value above 1 means the result is a spanning forest.
    pub components: usize,
    /// Nodes with an all-zero proximity row (no incident edges at all).
    pub isolated_nodes: Vec<usize>,
}

impl MstResult {
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.phi).sum()
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let rx = self.find(x);
        let ry = self.find(y);
        if rx == ry {
            return false;
        }
        if self.rank[rx] < self.rank[ry] {
            self.parent[rx] = ry;
        } else if self.rank[rx] > self.rank[ry] {
            self.parent[ry] = rx;
        } else {
            self.parent[ry] = rx;
            self.rank[rx] += 1;
        }
        true
    }
}

/// Kruskal's algorithm over the nonzero-proximity edges, maximizing total
/// weight. Ties are broken by (phi descending, a ascending, b ascending) so
/// the edge set is deterministic.
///
/// If the nonzero-proximity graph is disconnected the result spans each
/// component separately (`components > 1`).
pub fn max_spanning_tree(phi: &ProximityMatrix) -> MstResult {
    let n = phi.len();
    let mut edges: Vec<WeightedEdge> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let w = phi.get(a, b);
            if w > 0.0 {
                edges.push(WeightedEdge { a, b, phi: w });
            }
        }
    }
    edges.sort_by(|x, y| {
        y.phi
            .partial_cmp(&x.phi)
            .unwrap()
            .then(x.a.cmp(&y.a))
            .then(x.b.cmp(&y.b))
    });

    let mut dsu = DisjointSet::new(n);
    let mut tree = Vec::new();
    for e in edges {
        if dsu.union(e.a, e.b) {
            tree.push(e);
        }
    }

    let mut has_edge = vec![false; n];
    for e in &tree {
        has_edge[e.a] = true;
        has_edge[e.b] = true;
    }
    let isolated_nodes: Vec<usize> = (0..n)
        .filter(|&v| !has_edge[v] && (0..n).all(|u| u == v || phi.get(v, u) == 0.0))
        .collect();
    let connected_nodes = n - isolated_nodes.len();
    let components = connected_nodes.saturating_sub(tree.len());

    tree.sort_by(|x, y| x.a.cmp(&y.a).then(x.b.cmp(&y.b)));
    MstResult {
        edges: tree,
        components,
        isolated_nodes,
    }
}

/// All unordered pairs whose proximity strictly exceeds the threshold.
pub fn threshold_network(phi: &ProximityMatrix, threshold: f64) -> Result<Vec<WeightedEdge>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Validation(format!(
            "threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let n = phi.len();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let w = phi.get(a, b);
            if w > threshold {
                edges.push(WeightedEdge { a, b, phi: w });
            }
        }
    }
    Ok(edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrigin {
    Mst,
    Threshold,
    Both,
}

impl EdgeOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeOrigin::Mst => "mst",
            EdgeOrigin::Threshold => "threshold",
            EdgeOrigin::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceEdge {
    pub a: usize,
    pub b: usize,
    pub phi: f64,
    pub origin: EdgeOrigin,
}

/// The superposed industry space: the union of the spanning tree and the
/// threshold network, with origin tags and node sizes (firm counts in the
/// reference year).
#[derive(Debug, Clone)]
pub struct IndustrySpaceGraph {
    pub node_sizes: Vec<u64>,
    pub edges: Vec<SpaceEdge>,
    adjacency: Vec<Vec<usize>>,
}

pub fn superpose(
    mst_edges: &[WeightedEdge],
    threshold_edges: &[WeightedEdge],
    node_sizes: Vec<u64>,
) -> IndustrySpaceGraph {
    let n = node_sizes.len();
    let mut merged: std::collections::BTreeMap<(usize, usize), SpaceEdge> = Default::default();
    for e in mst_edges {
        merged.insert(
            (e.a, e.b),
            SpaceEdge {
                a: e.a,
                b: e.b,
                phi: e.phi,
                origin: EdgeOrigin::Mst,
            },
        );
    }
    for e in threshold_edges {
        merged
            .entry((e.a, e.b))
            .and_modify(|existing| existing.origin = EdgeOrigin::Both)
            .or_insert(SpaceEdge {
                a: e.a,
                b: e.b,
                phi: e.phi,
                origin: EdgeOrigin::Threshold,
            });
    }
    let edges: Vec<SpaceEdge> = merged.into_values().collect();
    let mut adjacency = vec![Vec::new(); n];
    for e in &edges {
        adjacency[e.a].push(e.b);
        adjacency[e.b].push(e.a);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    IndustrySpaceGraph {
        node_sizes,
        edges,
        adjacency,
    }
}

impl IndustrySpaceGraph {
    pub fn n_nodes(&self) -> usize {
        self.node_sizes.len()
    }

    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        self.adjacency[node].clone()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_nodes();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Edge-list export: `source,target,phi,origin`, sorted by (a, b).
    pub fn edge_list_csv(&self, industries: &IndustryRegistry) -> String {
        let mut out = String::from("source,target,phi,origin\n");
        for e in &self.edges {
            out.push_str(&format!(
                "{},{},{},{}\n",
                industries.get(e.a),
                industries.get(e.b),
                fmt_f64(e.phi),
                e.origin.as_str()
            ));
        }
        out
    }

    /// GraphML export with node size and sector attributes, byte-deterministic
    /// for a fixed input.
    pub fn graphml(&self, industries: &IndustryRegistry) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        out.push_str("  <key id=\"size\" for=\"node\" attr.name=\"size\" attr.type=\"long\"/>\n");
        out.push_str(
            "  <key id=\"sector\" for=\"node\" attr.name=\"sector\" attr.type=\"string\"/>\n",
        );
        out.push_str("  <key id=\"phi\" for=\"edge\" attr.name=\"phi\" attr.type=\"double\"/>\n");
        out.push_str(
            "  <key id=\"origin\" for=\"edge\" attr.name=\"origin\" attr.type=\"string\"/>\n",
        );
        out.push_str("  <graph id=\"industry-space\" edgedefault=\"undirected\">\n");
        for a in 0..self.n_nodes() {
            let code = industries.get(a);
            writeln!(out, "    <node id=\"{code}\">").unwrap();
            writeln!(out, "      <data key=\"size\">{}</data>", self.node_sizes[a]).unwrap();
            writeln!(out, "      <data key=\"sector\">{}</data>", code.sector).unwrap();
            out.push_str("    </node>\n");
        }
        for e in &self.edges {
            writeln!(
                out,
                "    <edge source=\"{}\" target=\"{}\">",
                industries.get(e.a),
                industries.get(e.b)
            )
            .unwrap();
            writeln!(out, "      <data key=\"phi\">{}</data>", fmt_f64(e.phi)).unwrap();
            writeln!(out, "      <data key=\"origin\">{}</data>", e.origin.as_str()).unwrap();
            out.push_str("    </edge>\n");
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proximity(n: usize, entries: &[(usize, usize, f64)]) -> ProximityMatrix {
        let mut values = vec![0.0; n * n];
        for a in 0..n {
            values[a * n + a] = 1.0;
        }
        for &(a, b, w) in entries {
            values[a * n + b] = w;
            values[b * n + a] = w;
        }
        ProximityMatrix::from_raw(2000, n, values)
    }

    #[test]
    fn mst_triangle_picks_two_heaviest() {
        let phi = proximity(3, &[(0, 1, 0.9), (1, 2, 0.8), (0, 2, 0.5)]);
        let mst = max_spanning_tree(&phi);
        assert_eq!(mst.edges.len(), 2);
        assert!((mst.total_weight() - 1.7).abs() < 1e-15);
        assert_eq!(mst.components, 1);
        let pairs: Vec<(usize, usize)> = mst.edges.iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn mst_of_tree_input_returns_it() {
        let phi = proximity(4, &[(0, 1, 0.5), (1, 2, 0.4), (2, 3, 0.3)]);
        let mst = max_spanning_tree(&phi);
        assert_eq!(mst.edges.len(), 3);
        assert!((mst.total_weight() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn mst_on_70_connected_nodes_has_69_edges() {
        let n = 70;
        let mut rng = crate::rng::Xoshiro256::new(5);
        let mut entries = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                entries.push((a, b, 0.01 + 0.98 * rng.next_f64()));
            }
        }
        let phi = proximity(n, &entries);
        let mst = max_spanning_tree(&phi);
        assert_eq!(mst.edges.len(), 69);
        assert_eq!(mst.components, 1);
    }

    #[test]
    fn mst_disconnected_yields_forest() {
        // Two components: {0,1} and {2,3}.
        let phi = proximity(4, &[(0, 1, 0.9), (2, 3, 0.7)]);
        let mst = max_spanning_tree(&phi);
        assert_eq!(mst.edges.len(), 2);
        assert_eq!(mst.components, 2);
        assert!(mst.isolated_nodes.is_empty());
    }

    #[test]
    fn mst_deterministic_under_ties() {
        let phi = proximity(3, &[(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)]);
        let first = max_spanning_tree(&phi);
        for _ in 0..5 {
            let again = max_spanning_tree(&phi);
            assert_eq!(again.edges, first.edges);
        }
        let pairs: Vec<(usize, usize)> = first.edges.iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn threshold_strictness_and_extremes() {
        let phi = proximity(3, &[(0, 1, 0.81), (1, 2, 0.9), (0, 2, 0.3)]);
        // Exactly at the threshold does not qualify (strict inequality).
        let edges = threshold_network(&phi, 0.81).unwrap();
        assert_eq!(edges.len(), 1);
        assert_eq!((edges[0].a, edges[0].b), (1, 2));
        // Nothing exceeds 1.
        assert!(threshold_network(&phi, 1.0).unwrap().is_empty());
        assert!(threshold_network(&phi, 0.0).is_err());
        assert!(threshold_network(&phi, 1.5).is_err());
    }

    #[test]
    fn threshold_low_cutoff_gives_complete_graph() {
        let phi = proximity(4, &[(0, 1, 0.2), (0, 2, 0.3), (0, 3, 0.4), (1, 2, 0.5), (1, 3, 0.6), (2, 3, 0.7)]);
        let edges = threshold_network(&phi, 0.1).unwrap();
        assert_eq!(edges.len(), 6);
    }

    #[test]
    fn superpose_union_sizes_and_origin_tags() {
        let mst = vec![
            WeightedEdge { a: 0, b: 1, phi: 0.9 },
            WeightedEdge { a: 1, b: 2, phi: 0.8 },
        ];
        let thr = vec![
            WeightedEdge { a: 0, b: 1, phi: 0.9 },
            WeightedEdge { a: 0, b: 2, phi: 0.85 },
        ];
        let graph = superpose(&mst, &thr, vec![5, 3, 2]);
        assert_eq!(graph.edges.len(), 3);
        let origin_of = |a: usize, b: usize| {
            graph
                .edges
                .iter()
                .find(|e| (e.a, e.b) == (a, b))
                .map(|e| e.origin)
                .unwrap()
        };
        assert_eq!(origin_of(0, 1), EdgeOrigin::Both);
        assert_eq!(origin_of(1, 2), EdgeOrigin::Mst);
        assert_eq!(origin_of(0, 2), EdgeOrigin::Threshold);
        assert!(graph.is_connected());
    }

    #[test]
    fn superpose_with_subset_or_empty_threshold_is_mst() {
        let mst = vec![
            WeightedEdge { a: 0, b: 1, phi: 0.9 },
            WeightedEdge { a: 1, b: 2, phi: 0.8 },
        ];
        let subset = vec![WeightedEdge { a: 0, b: 1, phi: 0.9 }];
        let graph = superpose(&mst, &subset, vec![1, 1, 1]);
        assert_eq!(graph.edges.len(), 2);
        let graph = superpose(&mst, &[], vec![1, 1, 1]);
        assert_eq!(graph.edges.len(), 2);
        assert_eq!(
            graph.edges.iter().filter(|e| e.origin == EdgeOrigin::Mst).count(),
            2
        );
    }

    #[test]
    fn disjoint_edge_set_sizes_add_up() {
        // 2 mst edges and 1 disjoint threshold edge: 3 total.
        let mst = vec![
            WeightedEdge { a: 0, b: 1, phi: 0.9 },
            WeightedEdge { a: 2, b: 3, phi: 0.8 },
        ];
        let thr = vec![WeightedEdge { a: 1, b: 2, phi: 0.95 }];
        let graph = superpose(&mst, &thr, vec![1; 4]);
        assert_eq!(graph.edges.len(), 3);
    }

    #[test]
    fn exports_are_deterministic() {
        use crate::panel::IndustryCode;
        let industries = IndustryRegistry::from_codes([
            IndustryCode { sector: 'A', subsector: 1 },
            IndustryCode { sector: 'B', subsector: 2 },
            IndustryCode { sector: 'C', subsector: 3 },
        ]);
        let mst = vec![
            WeightedEdge { a: 0, b: 1, phi: 0.9 },
            WeightedEdge { a: 1, b: 2, phi: 0.8 },
        ];
        let graph = superpose(&mst, &[], vec![5, 3, 2]);
        let csv1 = graph.edge_list_csv(&industries);
        let csv2 = graph.edge_list_csv(&industries);
        assert_eq!(csv1, csv2);
        assert!(csv1.starts_with("source,target,phi,origin\nA01,B02,0.9,mst\n"));
        let xml = graph.graphml(&industries);
        assert!(xml.contains("<node id=\"A01\">"));
        assert!(xml.contains("<data key=\"size\">5</data>"));
        assert!(xml.contains("<data key=\"sector\">A</data>"));
        assert!(xml.contains("edgedefault=\"undirected\""));
    }
}
