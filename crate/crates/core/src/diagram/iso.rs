use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Diagram, Node, NodeId, NodeKind, Source, Target};

/// Port class: ordered ports keep their index, symmetric ports collapse to 0.
fn in_class(node: &Node, k: usize) -> usize {
    match &node.kind {
        NodeKind::Box { .. } => k,
        NodeKind::Spider { .. } => 0,
        NodeKind::Cap if node.inputs[0] == node.inputs[1] => 0,
        NodeKind::Cap => k,
        NodeKind::Cup => k,
    }
}

fn out_class(node: &Node, k: usize) -> usize {
    match &node.kind {
        NodeKind::Box { .. } => k,
        NodeKind::Spider { .. } => 0,
        NodeKind::Cup if node.outputs[0] == node.outputs[1] => 0,
        NodeKind::Cup => k,
        NodeKind::Cap => k,
    }
}

fn same_label(a: &Node, b: &Node) -> bool {
    a.kind == b.kind && a.inputs == b.inputs && a.outputs == b.outputs
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum End {
    Boundary(usize),
    Port(u32, usize),
}

/// Descriptor of a wire whose ends are both resolved, in the coordinates of the second diagram.
type Desc = (End, End);

fn src_end(d: &Diagram, s: Source, map: &dyn Fn(NodeId) -> Option<NodeId>) -> Option<End> {
    match s {
        Source::Input(i) => Some(End::Boundary(i)),
        Source::Out(n, k) => map(n).map(|m| End::Port(m.0, out_class(&d.nodes[&n], k))),
    }
}

fn tgt_end(d: &Diagram, t: Target, map: &dyn Fn(NodeId) -> Option<NodeId>) -> Option<End> {
    match t {
        Target::Output(j) => Some(End::Boundary(j)),
        Target::In(n, k) => map(n).map(|m| End::Port(m.0, in_class(&d.nodes[&n], k))),
    }
}

fn touches(t: Target, s: Source, n: NodeId) -> bool {
    matches!(t, Target::In(x, _) if x == n) || matches!(s, Source::Out(x, _) if x == n)
}

struct Search<'a> {
    d1: &'a Diagram,
    d2: &'a Diagram,
    order: Vec<NodeId>,
    map: BTreeMap<NodeId, NodeId>,
    used: BTreeSet<NodeId>,
    incident1: BTreeMap<NodeId, Vec<(Target, Source)>>,
    incident2: BTreeMap<NodeId, Vec<(Target, Source)>>,
}

impl Search<'_> {
    fn local_descs(&self, n: NodeId, m: NodeId) -> Option<(Vec<Desc>, Vec<Desc>)> {
        let map1 = |x: NodeId| if x == n { Some(m) } else { self.map.get(&x).copied() };
        let mut a = Vec::new();
        for &(t, s) in &self.incident1[&n] {
            if let (Some(ts), Some(tt)) = (src_end(self.d1, s, &map1), tgt_end(self.d1, t, &map1)) {
                a.push((ts, tt));
            }
        }
        let known2 = |x: NodeId| if x == m || self.used.contains(&x) { Some(x) } else { None };
        let mut b = Vec::new();
        for &(t, s) in &self.incident2[&m] {
            if let (Some(ts), Some(tt)) = (src_end(self.d2, s, &known2), tgt_end(self.d2, t, &known2)) {
                b.push((ts, tt));
            }
        }
        a.sort();
        b.sort();
        Some((a, b))
    }

    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let n = self.order[depth];
        let node = &self.d1.nodes[&n];
        let candidates: Vec<NodeId> = self
            .d2
            .nodes
            .iter()
            .filter(|(id, m)| !self.used.contains(id) && same_label(node, m))
            .map(|(&id, _)| id)
            .collect();
        for m in candidates {
            let (a, b) = self.local_descs(n, m).unwrap();
            if a != b {
                continue;
            }
            self.map.insert(n, m);
            self.used.insert(m);
            if self.run(depth + 1) {
                return true;
            }
            self.map.remove(&n);
            self.used.remove(&m);
        }
        false
    }
}

fn incidence(d: &Diagram) -> BTreeMap<NodeId, Vec<(Target, Source)>> {
    let mut out: BTreeMap<NodeId, Vec<(Target, Source)>> = d.nodes.keys().map(|&id| (id, vec![])).collect();
    for (&t, &s) in &d.links {
        for &id in d.nodes.keys() {
            if touches(t, s, id) {
                out.get_mut(&id).unwrap().push((t, s));
            }
        }
    }
    out
}

/// Search order: breadth-first from boundary-attached nodes, then remaining components.
fn search_order(d: &Diagram) -> Vec<NodeId> {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = d.nodes.keys().map(|&id| (id, vec![])).collect();
    let mut seeds = Vec::new();
    for (&t, &s) in &d.links {
        match (t, s) {
            (Target::In(b, _), Source::Out(a, _)) => {
                adj.get_mut(&a).unwrap().push(b);
                adj.get_mut(&b).unwrap().push(a);
            }
            (Target::In(b, _), Source::Input(_)) => seeds.push(b),
            (Target::Output(_), Source::Out(a, _)) => seeds.push(a),
            _ => {}
        }
    }
    seeds.extend(d.nodes.keys().copied());
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    for s in seeds {
        if !seen.insert(s) {
            continue;
        }
        let mut queue = VecDeque::from([s]);
        while let Some(n) = queue.pop_front() {
            order.push(n);
            for &m in &adj[&n] {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
    }
    order
}

pub(super) fn isomorphic(d1: &Diagram, d2: &Diagram) -> bool {
    if d1.inputs != d2.inputs || d1.outputs != d2.outputs || d1.nodes.len() != d2.nodes.len() || d1.links.len() != d2.links.len() {
        return false;
    }
    let bare = |d: &Diagram| -> Vec<(Target, Source)> {
        d.links
            .iter()
            .filter(|(t, s)| matches!(t, Target::Output(_)) && matches!(s, Source::Input(_)))
            .map(|(&t, &s)| (t, s))
            .collect()
    };
    if bare(d1) != bare(d2) {
        return false;
    }
    let mut labels1: Vec<String> = d1.nodes.values().map(|n| format!("{:?}", (&n.inputs, &n.outputs))).collect();
    let mut labels2: Vec<String> = d2.nodes.values().map(|n| format!("{:?}", (&n.inputs, &n.outputs))).collect();
    labels1.sort();
    labels2.sort();
    if labels1 != labels2 {
        return false;
    }
    let mut search = Search {
        d1,
        d2,
        order: search_order(d1),
        map: BTreeMap::new(),
        used: BTreeSet::new(),
        incident1: incidence(d1),
        incident2: incidence(d2),
    };
    search.run(0)
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn q() -> SystemType {
        SystemType::self_dual("Q")
    }

    #[test]
    fn relabelled_nodes_are_isomorphic() {
        let f = Diagram::spider("w", &q(), 1, 2, Phase::Zero);
        let g = Diagram::spider("g", &q(), 2, 1, Phase::angle(1.0));
        let d = f.compose(&g).unwrap();
        let mut map = BTreeMap::new();
        let ids: Vec<NodeId> = d.nodes().keys().copied().collect();
        map.insert(ids[0], NodeId(7));
        map.insert(ids[1], NodeId(3));
        let e = d.renumbered(&map);
        assert_ne!(d, e);
        assert!(d.iso_equal(&e));
    }

    #[test]
    fn phase_and_port_order_matter() {
        let g1 = Diagram::spider("g", &q(), 2, 1, Phase::angle(1.0));
        let g2 = Diagram::spider("g", &q(), 2, 1, Phase::angle(1.5));
        assert!(!g1.iso_equal(&g2));
        let b = Diagram::from_node(Node {
            kind: NodeKind::Box { name: "f".into(), phase: None, dagger: None },
            inputs: vec![q(), q()],
            outputs: vec![q()],
        });
        let swapped = Diagram::swap(&q(), &q()).compose(&b).unwrap();
        assert!(!swapped.iso_equal(&b));
        let sp = Diagram::spider("g", &q(), 2, 1, Phase::Zero);
        assert!(Diagram::swap(&q(), &q()).compose(&sp).unwrap().iso_equal(&sp));
    }

    #[test]
    fn scalars_components_are_matched() {
        let s1 = Diagram::spider("w", &q(), 0, 0, Phase::Zero);
        let s2 = Diagram::spider("g", &q(), 0, 0, Phase::Zero);
        let id = Diagram::identity(&[q()]);
        assert!(s1.tensor(&s2).tensor(&id).iso_equal(&id.tensor(&s2).tensor(&s1)));
        assert!(!s1.tensor(&s1).iso_equal(&s1.tensor(&s2)));
    }
}
