//! Exact, brute-force counterparts of everything the counters estimate.
//!
//! Intended for graphs of a few thousand nodes. Triangle and wedge counts come
//! in two flavours: "touching"/"centered" (what counter propagation computes)
//! and "inside" (the induced subgraph on the ball).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hyperball::{BallKind, CanonicalItem};

/// Nodes within graph distance `radius` of `center`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallSet {
    pub center: usize,
    pub radius: usize,
    pub members: Vec<usize>,
}

impl BallSet {
    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Canonical `(a < b < c)` triangles.
pub type TriangleList = Vec<[usize; 3]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConductanceForm {
    /// `|boundary| / vol(S)`.
    #[default]
    Simplified,
    /// `|boundary| / min(vol(S), 2m - vol(S))`.
    Full,
}

/// BFS distances from `source`, truncated at `max_radius`.
pub fn distances(g: &Graph, source: usize, max_radius: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(x) = queue.pop_front() {
        let d = dist[x].unwrap();
        if d == max_radius {
            continue;
        }
        for &y in g.adj(x) {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

pub fn exact_ball(g: &Graph, v: usize, r: usize) -> Result<BallSet> {
    g.check_node(v)?;
    let members = distances(g, v, r).iter().enumerate().filter_map(|(x, d)| d.map(|_| x)).collect();
    Ok(BallSet { center: v, radius: r, members })
}

/// Largest eccentricity, or `None` for a disconnected or empty graph.
pub fn diameter(g: &Graph) -> Option<usize> {
    let mut best = 0;
    for v in 0..g.node_count() {
        let d = distances(g, v, usize::MAX);
        for x in d {
            best = best.max(x?);
        }
    }
    (g.node_count() > 0).then_some(best)
}

fn membership(g: &Graph, set: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; g.node_count()];
    for &x in set {
        g.check_node(x)?;
        mask[x] = true;
    }
    Ok(mask)
}

/// Undirected edges with at least one endpoint in `B_r(v)`, by incidence scan.
pub fn exact_edgeball(g: &Graph, v: usize, r: usize) -> Result<usize> {
    let ball = exact_ball(g, v, r)?;
    let mask = membership(g, &ball.members)?;
    Ok(ball.members.iter().map(|&x| g.adj(x).iter().filter(|&&y| !mask[y] || x < y).count()).sum())
}

/// Directed edges `(x, y)` with `x` in `B_r(v)`.
pub fn exact_out_edgeball(g: &Graph, v: usize, r: usize) -> Result<usize> {
    let ball = exact_ball(g, v, r)?;
    Ok(ball.members.iter().map(|&x| g.adj(x).len()).sum())
}

/// Directed edges `(x, y)` with `y` in `B_r(v)`.
pub fn exact_in_edgeball(g: &Graph, v: usize, r: usize) -> Result<usize> {
    let ball = exact_ball(g, v, r)?;
    let mask = membership(g, &ball.members)?;
    // Scan sources rather than reuse degrees so this stays a separate count.
    Ok((0..g.node_count()).map(|x| g.adj(x).iter().filter(|&&y| mask[y]).count()).sum())
}

pub fn volume(g: &Graph, set: &[usize]) -> Result<usize> {
    let mask = membership(g, set)?;
    Ok((0..g.node_count()).filter(|&x| mask[x]).map(|x| g.deg(x)).sum())
}

pub fn exact_boundary(g: &Graph, set: &[usize]) -> Result<usize> {
    let mask = membership(g, set)?;
    Ok((0..g.node_count()).filter(|&x| mask[x]).map(|x| g.adj(x).iter().filter(|&&y| !mask[y]).count()).sum())
}

pub fn exact_conductance(g: &Graph, set: &[usize], form: ConductanceForm) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::Undefined("conductance of an empty set".into()));
    }
    let vol = volume(g, set)?;
    let denom = match form {
        ConductanceForm::Simplified => vol,
        ConductanceForm::Full => vol.min(g.total_volume() - vol),
    };
    if denom == 0 {
        return Err(Error::Undefined(format!("conductance with zero volume term (vol={vol})")));
    }
    Ok(exact_boundary(g, set)? as f64 / denom as f64)
}

/// Compact-forward triangle listing: nodes ranked by (degree, id), each
/// triangle found once from its lowest-ranked corner.
pub fn enumerate_triangles(g: &Graph) -> TriangleList {
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.deg(v), v));
    let mut rank = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    // forward[v] holds ranks of lower-ranked neighbors seen so far, ascending.
    let mut forward: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut out = Vec::new();
    for &s in &order {
        for &t in g.adj(s) {
            if rank[t] <= rank[s] {
                continue;
            }
            let (a, b) = (&forward[s], &forward[t]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let mut tri = [s, t, order[a[i]]];
                        tri.sort_unstable();
                        out.push(tri);
                        i += 1;
                        j += 1;
                    }
                }
            }
            forward[t].push(rank[s]);
        }
    }
    out.sort_unstable();
    out
}

/// Wedges centered at `v`: `C(deg(v), 2)`.
pub fn wedges_at(g: &Graph, v: usize) -> usize {
    let d = g.deg(v);
    d * d.saturating_sub(1) / 2
}

pub fn exact_triangles_touching_ball(g: &Graph, v: usize, r: usize) -> Result<usize> {
    let ball = exact_ball(g, v, r)?;
    Ok(enumerate_triangles(g).iter().filter(|t| t.iter().any(|&x| ball.contains(x))).count())
}

pub fn exact_wedges_centered_in_ball(g: &Graph, v: usize, r: usize) -> Result<usize> {
    let ball = exact_ball(g, v, r)?;
    Ok(ball.members.iter().map(|&x| wedges_at(g, x)).sum())
}

/// Triangles of the subgraph induced by `set`.
pub fn triangles_inside(g: &Graph, set: &[usize]) -> Result<usize> {
    let mask = membership(g, set)?;
    Ok(enumerate_triangles(g).iter().filter(|t| t.iter().all(|&x| mask[x])).count())
}

/// Wedges of the subgraph induced by `set`.
pub fn wedges_inside(g: &Graph, set: &[usize]) -> Result<usize> {
    let mask = membership(g, set)?;
    Ok((0..g.node_count())
        .filter(|&x| mask[x])
        .map(|x| {
            let d = g.adj(x).iter().filter(|&&y| mask[y]).count();
            d * d.saturating_sub(1) / 2
        })
        .sum())
}

/// `3 * triangles / wedges` of the induced subgraph on `set`.
pub fn exact_transitivity(g: &Graph, set: &[usize]) -> Result<f64> {
    let w = wedges_inside(g, set)?;
    if w == 0 {
        return Err(Error::Undefined("transitivity of a wedge-free subgraph".into()));
    }
    Ok(3.0 * triangles_inside(g, set)? as f64 / w as f64)
}

/// The exact item set a counter of `kind` holds for `v` after `r` rounds,
/// sorted and deduplicated.
pub fn ball_item_set(g: &Graph, kind: &BallKind, v: usize, r: usize) -> Result<Vec<CanonicalItem>> {
    let ball = exact_ball(g, v, r)?;
    let inside = |x: usize| ball.contains(x);
    let mut items = Vec::new();
    match kind {
        BallKind::Node => items.extend(ball.members.iter().map(|&x| CanonicalItem::Node(x))),
        BallKind::Edge => {
            for (x, y) in g.edges() {
                if inside(x) || inside(y) {
                    items.push(CanonicalItem::Edge(x, y));
                }
            }
        }
        BallKind::OutEdge | BallKind::InEdge => {
            let out = matches!(kind, BallKind::OutEdge);
            for x in 0..g.node_count() {
                for &y in g.adj(x) {
                    if out && inside(x) {
                        items.push(CanonicalItem::OutEdge(x, y));
                    } else if !out && inside(y) {
                        items.push(CanonicalItem::InEdge(x, y));
                    }
                }
            }
        }
        BallKind::Triangle => {
            for [a, b, c] in enumerate_triangles(g) {
                if inside(a) || inside(b) || inside(c) {
                    items.push(CanonicalItem::Triangle([a, b, c]));
                }
            }
        }
        BallKind::Wedge => {
            for &c in &ball.members {
                let adj = g.adj(c);
                for (i, &a) in adj.iter().enumerate() {
                    for &b in &adj[i + 1..] {
                        items.push(CanonicalItem::wedge(c, a, b));
                    }
                }
            }
        }
        BallKind::Graphlet(lists) => {
            for &x in &ball.members {
                items.extend(lists.ids(x).iter().map(|&id| CanonicalItem::Graphlet(id)));
            }
        }
    }
    items.sort_unstable();
    items.dedup();
    Ok(items)
}

/// Every exact quantity for one `(node, radius)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BallStats {
    pub node: usize,
    pub radius: usize,
    pub ball_size: usize,
    pub edgeball: usize,
    pub out_edgeball: usize,
    pub in_edgeball: usize,
    pub boundary: usize,
    pub volume: usize,
    pub triangles_touching: usize,
    pub wedges_centered: usize,
}

impl BallStats {
    /// Simplified conductance; `None` when the volume is zero.
    pub fn conductance(&self) -> Option<f64> {
        (self.volume > 0).then(|| self.boundary as f64 / self.volume as f64)
    }

    /// `3 * triangles_touching / wedges_centered`, the quantity the counter
    /// estimators target. `None` without wedges.
    pub fn transitivity(&self) -> Option<f64> {
        (self.wedges_centered > 0).then(|| 3.0 * self.triangles_touching as f64 / self.wedges_centered as f64)
    }
}

/// Stats for `v` at every radius `0..=max_radius` from a single BFS.
///
/// `triangles_by_node[x]` must list indices into one triangle enumeration of
/// every triangle containing `x`.
pub fn ball_stats_with(
    g: &Graph,
    triangles_by_node: &[Vec<usize>],
    v: usize,
    max_radius: usize,
) -> Result<Vec<BallStats>> {
    g.check_node(v)?;
    let dist = distances(g, v, max_radius);
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); max_radius + 1];
    for (x, d) in dist.iter().enumerate() {
        if let Some(d) = d {
            layers[*d].push(x);
        }
    }
    let total_triangles = triangles_by_node.iter().map(Vec::len).sum::<usize>() / 3;
    let mut seen_triangle = vec![false; total_triangles];
    let mut in_ball = vec![false; g.node_count()];
    let mut stats = Vec::with_capacity(max_radius + 1);
    let (mut size, mut volume, mut internal_twice, mut touching, mut wedges) = (0, 0, 0, 0, 0);
    for (r, layer) in layers.iter().enumerate() {
        for &x in layer {
            in_ball[x] = true;
        }
        for &x in layer {
            size += 1;
            volume += g.deg(x);
            // each new internal edge is seen twice across the two endpoints
            internal_twice += 2 * g.adj(x).iter().filter(|&&y| in_ball[y] && (dist[y] < Some(r) || y < x)).count();
            wedges += wedges_at(g, x);
            for &t in &triangles_by_node[x] {
                if !seen_triangle[t] {
                    seen_triangle[t] = true;
                    touching += 1;
                }
            }
        }
        let boundary = volume - internal_twice;
        let internal = internal_twice / 2;
        stats.push(BallStats {
            node: v,
            radius: r,
            ball_size: size,
            edgeball: internal + boundary,
            out_edgeball: volume,
            in_edgeball: volume,
            boundary,
            volume,
            triangles_touching: touching,
            wedges_centered: wedges,
        });
    }
    Ok(stats)
}

/// Triangle incidence lists for [`ball_stats_with`].
pub fn triangles_by_node(g: &Graph) -> Vec<Vec<usize>> {
    let mut by_node = vec![Vec::new(); g.node_count()];
    for (i, t) in enumerate_triangles(g).iter().enumerate() {
        for &x in t {
            by_node[x].push(i);
        }
    }
    by_node
}

pub fn ball_stats(g: &Graph, v: usize, max_radius: usize) -> Result<Vec<BallStats>> {
    ball_stats_with(g, &triangles_by_node(g), v, max_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use std::collections::BTreeSet;

    #[test]
    fn balls_on_small_graphs() {
        let p = path(3);
        assert_eq!(exact_ball(&p, 1, 1).unwrap().members, vec![0, 1, 2]);
        assert_eq!(exact_ball(&p, 0, 0).unwrap().members, vec![0]);
        assert_eq!(exact_ball(&complete(4), 2, 1).unwrap().len(), 4);
        assert!(exact_ball(&p, 3, 1).is_err());
    }

    #[test]
    fn edgeball_examples() {
        let k3 = complete(3);
        assert!((0..3).all(|v| exact_edgeball(&k3, v, 0).unwrap() == 2));
        assert_eq!(exact_edgeball(&path(4), 0, 1).unwrap(), 2);
    }

    #[test]
    fn edgeball_matches_set_enumeration() {
        for seed in 0..5 {
            let g = gnp(50, 0.1, seed);
            for v in 0..50 {
                let ball = exact_ball(&g, v, 2).unwrap();
                let set: BTreeSet<(usize, usize)> =
                    g.edges().filter(|&(x, y)| ball.contains(x) || ball.contains(y)).collect();
                assert_eq!(exact_edgeball(&g, v, 2).unwrap(), set.len());
            }
        }
    }

    #[test]
    fn directed_edgeballs() {
        let k3 = complete(3);
        assert_eq!(exact_out_edgeball(&k3, 0, 0).unwrap(), 2);
        assert_eq!(exact_in_edgeball(&k3, 0, 0).unwrap(), 2);
        let s = star(3);
        assert_eq!(exact_out_edgeball(&s, 1, 0).unwrap(), 1);
        assert_eq!(exact_in_edgeball(&s, 1, 0).unwrap(), 1);
        assert_eq!(exact_out_edgeball(&s, 1, 1).unwrap(), 4);
        assert_eq!(exact_in_edgeball(&s, 1, 1).unwrap(), 4);
        let g = gnp(30, 0.3, 1);
        let d = diameter(&g).unwrap();
        assert_eq!(exact_out_edgeball(&g, 0, d).unwrap(), 2 * g.edge_count());
        assert_eq!(exact_in_edgeball(&g, 0, d).unwrap(), 2 * g.edge_count());
    }

    #[test]
    fn boundary_and_conductance() {
        let k3 = complete(3);
        let p = path(3);
        assert_eq!(exact_boundary(&k3, &[0]).unwrap(), 2);
        assert_eq!(exact_boundary(&p, &[0, 1]).unwrap(), 1);
        let two = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(exact_boundary(&two, &[0, 1]).unwrap(), 0);

        let s = ConductanceForm::Simplified;
        assert_eq!(exact_conductance(&k3, &[0], s).unwrap(), 1.0);
        assert_eq!(exact_conductance(&p, &[0, 1], s).unwrap(), 1.0 / 3.0);
        assert_eq!(exact_conductance(&p, &[0, 1, 2], s).unwrap(), 0.0);
        // Full form: min(3, 4 - 3) = 1
        assert_eq!(exact_conductance(&p, &[0, 1], ConductanceForm::Full).unwrap(), 1.0);
        assert!(exact_conductance(&p, &[0, 1, 2], ConductanceForm::Full).is_err());

        let isolated = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(exact_conductance(&isolated, &[2], s), Err(Error::Undefined(_))));
        assert!(exact_conductance(&isolated, &[], s).is_err());
    }

    #[test]
    fn triangles_and_wedges_closed_forms() {
        let k4 = complete(4);
        assert_eq!(enumerate_triangles(&k4).len(), 4);
        assert_eq!((0..4).map(|v| wedges_at(&k4, v)).sum::<usize>(), 12);
        assert_eq!(enumerate_triangles(&complete(3)), vec![[0, 1, 2]]);
        assert_eq!((0..3).map(|v| wedges_at(&complete(3), v)).sum::<usize>(), 3);
        let s = star(5);
        assert!(enumerate_triangles(&s).is_empty());
        assert_eq!(wedges_at(&s, 0), 10);
    }

    fn trace_triangles(g: &Graph) -> usize {
        let n = g.node_count();
        let a: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(g.has_edge(i, j))).collect()).collect();
        let mul = |x: &Vec<Vec<u64>>, y: &Vec<Vec<u64>>| -> Vec<Vec<u64>> {
            (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
        };
        let a3 = mul(&mul(&a, &a), &a);
        ((0..n).map(|i| a3[i][i]).sum::<u64>() / 6) as usize
    }

    #[test]
    fn compact_forward_matches_trace() {
        for seed in 0..10 {
            let g = gnp(45, 0.05 + 0.04 * seed as f64, seed);
            let tris = enumerate_triangles(&g);
            assert_eq!(tris.len(), trace_triangles(&g), "seed {seed}");
            assert!(tris.iter().all(|&[a, b, c]| a < b
                && b < c
                && g.has_edge(a, b)
                && g.has_edge(b, c)
                && g.has_edge(a, c)));
            let unique: BTreeSet<_> = tris.iter().collect();
            assert_eq!(unique.len(), tris.len());
        }
    }

    #[test]
    fn ball_triangle_counts() {
        let k4 = complete(4);
        assert!((0..4).all(|v| exact_triangles_touching_ball(&k4, v, 0).unwrap() == 3));
        assert!((0..4).all(|v| exact_wedges_centered_in_ball(&k4, v, 0).unwrap() == 3));
        let two = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        for r in 0..4 {
            assert_eq!(exact_triangles_touching_ball(&two, 0, r).unwrap(), 1);
        }
        let g = gnp(40, 0.15, 3);
        let all = enumerate_triangles(&g);
        for v in 0..40 {
            let ball = exact_ball(&g, v, 1).unwrap();
            let brute = all.iter().filter(|t| t.iter().any(|&x| ball.contains(x))).count();
            assert_eq!(exact_triangles_touching_ball(&g, v, 1).unwrap(), brute);
        }
    }

    #[test]
    fn transitivity_closed_forms() {
        assert_eq!(exact_transitivity(&complete(4), &[0, 1, 2, 3]).unwrap(), 1.0);
        assert_eq!(exact_transitivity(&path(3), &[0, 1, 2]).unwrap(), 0.0);
        assert_eq!(exact_transitivity(&cycle(5), &[0, 1, 2, 3, 4]).unwrap(), 0.0);
        assert!(exact_transitivity(&path(3), &[0, 2]).is_err());
    }

    #[test]
    fn edge_boundary_identity() {
        for seed in 0..8 {
            let g = gnp(60, 0.06, seed);
            for v in 0..60 {
                for r in 0..=3 {
                    let ball = exact_ball(&g, v, r).unwrap();
                    let e = exact_edgeball(&g, v, r).unwrap();
                    let out = exact_out_edgeball(&g, v, r).unwrap();
                    assert_eq!(2 * e - out, exact_boundary(&g, &ball.members).unwrap());
                    assert_eq!(out, volume(&g, &ball.members).unwrap());
                }
            }
        }
    }

    #[test]
    fn balls_grow_then_stabilize() {
        let g = gnp(40, 0.1, 5);
        let mut prev = 0;
        for r in 0..10 {
            let s = exact_ball(&g, 0, r).unwrap().len();
            assert!(s >= prev);
            prev = s;
        }
        let far = exact_ball(&g, 0, 40).unwrap();
        assert_eq!(far, BallSet { radius: 40, ..exact_ball(&g, 0, 39).unwrap() });
    }

    #[test]
    fn single_bfs_stats_match_individual_oracles() {
        let g = gnp(50, 0.08, 12);
        let by_node = triangles_by_node(&g);
        for v in 0..50 {
            for s in ball_stats_with(&g, &by_node, v, 3).unwrap() {
                let r = s.radius;
                let ball = exact_ball(&g, v, r).unwrap();
                assert_eq!(s.ball_size, ball.len());
                assert_eq!(s.edgeball, exact_edgeball(&g, v, r).unwrap());
                assert_eq!(s.out_edgeball, exact_out_edgeball(&g, v, r).unwrap());
                assert_eq!(s.in_edgeball, exact_in_edgeball(&g, v, r).unwrap());
                assert_eq!(s.boundary, exact_boundary(&g, &ball.members).unwrap());
                assert_eq!(s.triangles_touching, exact_triangles_touching_ball(&g, v, r).unwrap());
                assert_eq!(s.wedges_centered, exact_wedges_centered_in_ball(&g, v, r).unwrap());
            }
        }
    }

    #[test]
    fn item_sets_have_oracle_sizes() {
        let g = gnp(30, 0.15, 2);
        for v in 0..30 {
            for r in 0..3 {
                let s = &ball_stats(&g, v, r).unwrap()[r];
                assert_eq!(ball_item_set(&g, &BallKind::Node, v, r).unwrap().len(), s.ball_size);
                assert_eq!(ball_item_set(&g, &BallKind::Edge, v, r).unwrap().len(), s.edgeball);
                assert_eq!(ball_item_set(&g, &BallKind::OutEdge, v, r).unwrap().len(), s.out_edgeball);
                assert_eq!(ball_item_set(&g, &BallKind::InEdge, v, r).unwrap().len(), s.in_edgeball);
                assert_eq!(ball_item_set(&g, &BallKind::Triangle, v, r).unwrap().len(), s.triangles_touching);
                assert_eq!(ball_item_set(&g, &BallKind::Wedge, v, r).unwrap().len(), s.wedges_centered);
            }
        }
    }
}
