use std::collections::BTreeSet;

use orbigw::graphs::{enumerate_graphs, enumerate_shapes, StableLabeledGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Edge,
    Ordered(usize),
    Unordered,
    Dilaton,
}

struct Half {
    vertex: usize,
    height: u32,
    kind: Kind,
    partner: Option<usize>,
}

fn halves(g: &StableLabeledGraph) -> Vec<Half> {
    let mut out = Vec::new();
    for e in &g.edges {
        let i = out.len();
        out.push(Half { vertex: e.v1, height: e.k1, kind: Kind::Edge, partner: Some(i + 1) });
        out.push(Half { vertex: e.v2, height: e.k2, kind: Kind::Edge, partner: Some(i) });
    }
    for l in &g.ordered_leaves {
        out.push(Half { vertex: l.vertex, height: l.height, kind: Kind::Ordered(l.slot), partner: None });
    }
    for l in &g.unordered_leaves {
        out.push(Half { vertex: l.vertex, height: l.height, kind: Kind::Unordered, partner: None });
    }
    for l in &g.dilaton_leaves {
        out.push(Half { vertex: l.vertex, height: l.height, kind: Kind::Dilaton, partner: None });
    }
    out
}

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Number of label-preserving isomorphisms `a → b` (vertex and half-edge bijections).
fn count_isos(a: &StableLabeledGraph, b: &StableLabeledGraph) -> u64 {
    let (ha, hb) = (halves(a), halves(b));
    if a.vertices.len() != b.vertices.len() || ha.len() != hb.len() {
        return 0;
    }
    fn assign(
        i: usize,
        sigma: &[usize],
        ha: &[Half],
        hb: &[Half],
        pi: &mut Vec<Option<usize>>,
        used: &mut [bool],
    ) -> u64 {
        if i == ha.len() {
            return 1;
        }
        let mut total = 0;
        for j in 0..hb.len() {
            let (x, y) = (&ha[i], &hb[j]);
            if used[j] || y.vertex != sigma[x.vertex] || y.height != x.height || y.kind != x.kind {
                continue;
            }
            if let Some(p) = x.partner {
                if let Some(pj) = pi[p] {
                    if y.partner != Some(pj) {
                        continue;
                    }
                }
            }
            used[j] = true;
            pi[i] = Some(j);
            total += assign(i + 1, sigma, ha, hb, pi, used);
            pi[i] = None;
            used[j] = false;
        }
        total
    }
    let mut total = 0;
    for sigma in perms(a.vertices.len()) {
        if (0..a.vertices.len()).any(|v| a.vertices[v] != b.vertices[sigma[v]]) {
            continue;
        }
        total += assign(0, &sigma, &ha, &hb, &mut vec![None; ha.len()], &mut vec![false; hb.len()]);
    }
    total
}

#[test]
fn aut_orders_match_brute_force() {
    let cases = [
        (0u32, 3usize, 0usize),
        (0, 4, 0),
        (0, 2, 2),
        (0, 0, 5),
        (1, 1, 0),
        (1, 0, 2),
        (1, 2, 0),
        (1, 1, 2),
        (0, 3, 2),
        (2, 0, 1),
        (2, 1, 0),
        (2, 0, 2),
    ];
    let mut checked = 0;
    for (g, n_ord, n_un) in cases {
        for graph in enumerate_graphs(g, n_ord, n_un, 2, None).unwrap() {
            if graph.vertices.len() > 4 {
                continue;
            }
            assert_eq!(graph.aut_order, count_isos(&graph, &graph), "({g},{n_ord},{n_un}) {graph:?}");
            checked += 1;
        }
    }
    assert!(checked > 1000, "only {checked} graphs checked");
}

#[test]
fn emitted_graphs_are_pairwise_non_isomorphic_and_valid() {
    for (g, n_ord, n_un) in [(0u32, 4usize, 0usize), (1, 1, 1), (1, 0, 2), (2, 0, 1)] {
        let list = enumerate_graphs(g, n_ord, n_un, 2, None).unwrap();
        for (i, a) in list.iter().enumerate() {
            assert!(a.is_valid());
            assert_eq!(a.genus(), g);
            for b in &list[i + 1..] {
                assert_eq!(count_isos(a, b), 0, "duplicate isomorphism class: {a:?} {b:?}");
            }
        }
    }
}

#[test]
fn markings_pin_ordered_leaves() {
    let fixed = [Some(1), None];
    for graph in enumerate_graphs(1, 2, 0, 3, Some(&fixed)).unwrap() {
        let leaf = graph.ordered_leaves.iter().find(|l| l.slot == 0).unwrap();
        assert_eq!(graph.vertices[leaf.vertex].marking, 1);
    }
}

/// Undecorated stable graph with labeled legs, built by degenerations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Plain {
    genera: Vec<u32>,
    edges: Vec<(usize, usize)>,
    legs: Vec<usize>,
}

impl Plain {
    fn canonical(&self) -> Plain {
        perms(self.genera.len())
            .into_iter()
            .map(|p| {
                let mut genera = vec![0; self.genera.len()];
                for (v, &q) in p.iter().enumerate() {
                    genera[q] = self.genera[v];
                }
                let mut edges: Vec<(usize, usize)> =
                    self.edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
                edges.sort_unstable();
                Plain { genera, edges, legs: self.legs.iter().map(|&v| p[v]).collect() }
            })
            .min()
            .unwrap()
    }

    fn valence(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum::<usize>()
            + self.legs.iter().filter(|&&x| x == v).count()
    }

    fn stable(&self) -> bool {
        (0..self.genera.len()).all(|v| 2 * self.genera[v] as usize + self.valence(v) > 2)
    }

    /// All one-step degenerations: a self-loop lowering a genus, or a vertex split.
    fn degenerations(&self) -> Vec<Plain> {
        let mut out = Vec::new();
        let nv = self.genera.len();
        for v in 0..nv {
            if self.genera[v] > 0 {
                let mut d = self.clone();
                d.genera[v] -= 1;
                d.edges.push((v, v));
                out.push(d);
            }
            // Half-edges at v: (edge index, side) or leg index.
            let mut hs: Vec<(bool, usize, usize)> = Vec::new();
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                if a == v {
                    hs.push((true, i, 0));
                }
                if b == v {
                    hs.push((true, i, 1));
                }
            }
            for (j, &x) in self.legs.iter().enumerate() {
                if x == v {
                    hs.push((false, j, 0));
                }
            }
            for mask in 0u32..(1 << hs.len()) {
                for h1 in 0..=self.genera[v] {
                    let mut d = self.clone();
                    d.genera[v] = h1;
                    d.genera.push(self.genera[v] - h1);
                    for (k, &(is_edge, i, side)) in hs.iter().enumerate() {
                        if mask >> k & 1 == 1 {
                            if is_edge {
                                if side == 0 {
                                    d.edges[i].0 = nv;
                                } else {
                                    d.edges[i].1 = nv;
                                }
                            } else {
                                d.legs[i] = nv;
                            }
                        }
                    }
                    d.edges.push((v, nv));
                    if d.stable() {
                        out.push(d);
                    }
                }
            }
        }
        out
    }
}

fn closure(g: u32, n: usize) -> BTreeSet<Plain> {
    let start = Plain { genera: vec![g], edges: vec![], legs: vec![0; n] }.canonical();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut frontier = vec![start];
    while let Some(p) = frontier.pop() {
        for d in p.degenerations() {
            let c = d.canonical();
            if seen.insert(c.clone()) {
                frontier.push(c);
            }
        }
    }
    seen
}

#[test]
fn shapes_match_degeneration_closure() {
    for (g, n) in [(0u32, 3usize), (0, 4), (0, 5), (0, 6), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (3, 0)] {
        let shapes: BTreeSet<Plain> = enumerate_shapes(g, n, 0)
            .unwrap()
            .into_iter()
            .filter(|s| s.dilatons.iter().all(|&d| d == 0))
            .map(|s| Plain { genera: s.genera.clone(), edges: s.edges.clone(), legs: s.ordered.clone() }.canonical())
            .collect();
        assert_eq!(shapes, closure(g, n), "(g, n) = ({g}, {n})");
    }
}

#[test]
fn known_stable_graph_counts() {
    for ((g, n), count) in [((0u32, 4usize), 4usize), ((0, 5), 26), ((1, 1), 2), ((1, 2), 5), ((2, 0), 7), ((3, 0), 42)]
    {
        assert_eq!(closure(g, n).len(), count, "({g},{n})");
    }
}
