use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use petgraph::algo::{is_cyclic_directed, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};

use super::{Constraint, FlatClause, Node};
use crate::logic::KVar;

/// Edge `κ → κ′` when κ occurs in a hypothesis and κ′ in the goal of one
/// flat clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    vertices: BTreeSet<KVar>,
    edges: BTreeSet<(KVar, KVar)>,
}

impl DependencyGraph {
    pub fn of_constraint(c: &Constraint) -> Self {
        fn go(c: &Constraint, above: &mut Vec<BTreeSet<KVar>>, g: &mut DependencyGraph) {
            match c.node() {
                Node::Goal(p, _) => {
                    let heads = p.kvars();
                    g.vertices.extend(heads.iter().cloned());
                    for body in above.iter() {
                        for k in body {
                            for h in &heads {
                                g.edges.insert((k.clone(), h.clone()));
                            }
                        }
                    }
                }
                Node::And(cs) => cs.iter().for_each(|c| go(c, above, g)),
                Node::Forall(b, body) => {
                    let ks = b.pred.kvars();
                    g.vertices.extend(ks.iter().cloned());
                    let pushed = !ks.is_empty();
                    if pushed {
                        above.push(ks);
                    }
                    go(body, above, g);
                    if pushed {
                        above.pop();
                    }
                }
            }
        }
        let mut g = DependencyGraph::default();
        go(c, &mut Vec::new(), &mut g);
        g
    }

    pub fn of_clauses(cs: &[FlatClause]) -> Self {
        let mut g = DependencyGraph::default();
        for c in cs {
            let body = c.body_kvars();
            let head = c.goal.kvars();
            g.vertices.extend(body.iter().cloned());
            g.vertices.extend(head.iter().cloned());
            for k in &body {
                for h in &head {
                    g.edges.insert((k.clone(), h.clone()));
                }
            }
        }
        g
    }

    pub fn vertices(&self) -> &BTreeSet<KVar> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(KVar, KVar)> {
        &self.edges
    }

    pub fn has_edge(&self, from: &KVar, to: &KVar) -> bool {
        self.edges.contains(&(from.clone(), to.clone()))
    }

    /// Drop every edge incident to a vertex of `ks`.
    pub fn excluding(&self, ks: &BTreeSet<KVar>) -> Self {
        DependencyGraph {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().filter(|(a, b)| !ks.contains(a) && !ks.contains(b)).cloned().collect(),
        }
    }

    /// The subgraph induced by `ks`.
    pub fn restrict(&self, ks: &BTreeSet<KVar>) -> Self {
        DependencyGraph {
            vertices: self.vertices.intersection(ks).cloned().collect(),
            edges: self.edges.iter().filter(|(a, b)| ks.contains(a) && ks.contains(b)).cloned().collect(),
        }
    }

    fn to_petgraph(&self) -> (DiGraph<KVar, ()>, BTreeMap<KVar, NodeIndex>) {
        let mut g = DiGraph::new();
        let mut ix = BTreeMap::new();
        for v in &self.vertices {
            ix.insert(v.clone(), g.add_node(v.clone()));
        }
        for (a, b) in &self.edges {
            g.add_edge(ix[a], ix[b], ());
        }
        (g, ix)
    }

    pub fn is_acyclic(&self) -> bool {
        !is_cyclic_directed(&self.to_petgraph().0)
    }

    /// Strongly connected components that contain a cycle.
    pub fn cyclic_components(&self) -> Vec<BTreeSet<KVar>> {
        let (g, _) = self.to_petgraph();
        let mut out: Vec<BTreeSet<KVar>> = tarjan_scc(&g)
            .into_iter()
            .filter(|scc| scc.len() > 1 || g.contains_edge(scc[0], scc[0]))
            .map(|scc| scc.into_iter().map(|i| g[i].clone()).collect())
            .collect();
        out.sort();
        out
    }

    pub fn in_degree(&self, k: &KVar) -> usize {
        self.edges.iter().filter(|(_, b)| b == k).count()
    }

    pub fn out_degree(&self, k: &KVar) -> usize {
        self.edges.iter().filter(|(a, _)| a == k).count()
    }

    /// Every vertex after all of its successors, ties by name; `None` when
    /// cyclic.
    pub fn reverse_topological(&self) -> Option<Vec<KVar>> {
        let mut out_deg: BTreeMap<&KVar, usize> = self.vertices.iter().map(|v| (v, 0)).collect();
        let mut preds: BTreeMap<&KVar, Vec<&KVar>> = BTreeMap::new();
        for (a, b) in &self.edges {
            *out_deg.get_mut(a).expect("edge endpoint is a vertex") += 1;
            preds.entry(b).or_default().push(a);
        }
        let mut ready: BTreeSet<&KVar> = out_deg.iter().filter(|(_, d)| **d == 0).map(|(v, _)| *v).collect();
        let mut order = Vec::with_capacity(self.vertices.len());
        while let Some(v) = ready.pop_first() {
            order.push(v.clone());
            for p in preds.get(v).into_iter().flatten() {
                let d = out_deg.get_mut(p).expect("vertex");
                *d -= 1;
                if *d == 0 {
                    ready.insert(p);
                }
            }
        }
        (order.len() == self.vertices.len()).then_some(order)
    }
}

/// Cut variables by the greedy heuristic, starting from no cuts.
pub fn cut_vars(c: &Constraint) -> BTreeSet<KVar> {
    cut_vars_with(&DependencyGraph::of_constraint(c), BTreeSet::new())
}

/// Extend `cuts` until the remaining graph is acyclic: repeatedly, from each
/// cyclic strongly connected component, cut the vertex with the largest
/// in-degree × out-degree, ties to the smaller name.
pub fn cut_vars_with(g: &DependencyGraph, mut cuts: BTreeSet<KVar>) -> BTreeSet<KVar> {
    loop {
        let rest: BTreeSet<KVar> = g.vertices.difference(&cuts).cloned().collect();
        let sub = g.restrict(&rest);
        let comps = sub.cyclic_components();
        if comps.is_empty() {
            return cuts;
        }
        for comp in comps {
            let best = comp
                .iter()
                .map(|k| (sub.in_degree(k) * sub.out_degree(k), k))
                .fold(None::<(usize, &KVar)>, |acc, (score, k)| match acc {
                    Some((s, _)) if s >= score => acc,
                    _ => Some((score, k)),
                })
                .map(|(_, k)| k.clone())
                .expect("component is non-empty");
            cuts.insert(best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Bind;
    use crate::logic::{Pred, Sort};
    use alloc::vec;

    fn kv(n: &str) -> KVar {
        KVar::new(n.into(), vec![(alloc::format!("{n}.z").as_str().into(), Sort::Int)])
    }

    /// `∀x. from(x) ⇒ ∀y. true ⇒ to(y)`
    fn clause(from: &KVar, to: &KVar) -> Constraint {
        Constraint::forall(
            Bind::new("x", Sort::Int, Pred::kapp(from.clone(), vec!["x".into()])),
            Constraint::forall(
                Bind::new("y", Sort::Int, Pred::tt()),
                Constraint::goal(Pred::kapp(to.clone(), vec!["y".into()]), None),
            ),
        )
    }

    fn graph(edges: &[(&KVar, &KVar)]) -> DependencyGraph {
        DependencyGraph::of_constraint(&Constraint::and(edges.iter().map(|(a, b)| clause(a, b))))
    }

    #[test]
    fn body_to_head_edge() {
        let (a, b) = (kv("a"), kv("b"));
        let g = graph(&[(&a, &b)]);
        assert!(g.has_edge(&a, &b));
        assert!(!g.has_edge(&b, &a));
        assert!(g.is_acyclic());
        assert!(cut_vars_with(&g, BTreeSet::new()).is_empty());
    }

    #[test]
    fn self_loop_is_cut() {
        let a = kv("a");
        let g = graph(&[(&a, &a)]);
        assert!(!g.is_acyclic());
        assert_eq!(cut_vars_with(&g, BTreeSet::new()), [a].into_iter().collect());
    }

    #[test]
    fn two_cycle_cuts_smaller_name() {
        let (a, b) = (kv("k1"), kv("k2"));
        let g = graph(&[(&a, &b), (&b, &a)]);
        let cuts = cut_vars_with(&g, BTreeSet::new());
        assert_eq!(cuts, [a].into_iter().collect());
        assert!(g.excluding(&cuts).is_acyclic());
    }

    #[test]
    fn hub_is_preferred() {
        // a ↔ h, b ↔ h: h has in = out = 2.
        let (a, b, h) = (kv("a"), kv("b"), kv("h"));
        let g = graph(&[(&a, &h), (&h, &a), (&b, &h), (&h, &b)]);
        assert_eq!(cut_vars_with(&g, BTreeSet::new()), [h].into_iter().collect());
    }

    #[test]
    fn reverse_topological_puts_sinks_first() {
        let (a, b, c) = (kv("a"), kv("b"), kv("c"));
        let g = graph(&[(&a, &b), (&b, &c)]);
        assert_eq!(g.reverse_topological().unwrap(), vec![c, b, a.clone()]);
        let cyc = graph(&[(&a, &a)]);
        assert!(cyc.reverse_topological().is_none());
    }

    #[test]
    fn clause_and_tree_views_agree() {
        let (a, b, c) = (kv("a"), kv("b"), kv("c"));
        let cons = Constraint::and([clause(&a, &b), clause(&b, &c), clause(&c, &a)]);
        assert_eq!(DependencyGraph::of_constraint(&cons), DependencyGraph::of_clauses(&cons.flatten()));
    }
}
