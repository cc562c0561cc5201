//! Port-graph string diagrams for symmetric monoidal categories with duals.
//!
//! Swaps are not nodes: a permutation of wires is just a different wiring. Cups and
//! caps are explicit nodes, so every wire is directed from a source (diagram input or
//! node output port) to a target (diagram output or node input port) and a diagram is
//! a DAG.

mod iso;
mod phase;
pub mod text;
mod types;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

pub use phase::{Phase, PhaseMismatch, ANGLE_TOL};
pub use types::{fmt_types, Duality, SystemType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Where a wire starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Input(usize),
    Out(NodeId, usize),
}

/// Where a wire ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Output(usize),
    In(NodeId, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    /// Generator box from a signature. `dagger` names its dagger partner.
    Box { name: String, phase: Option<Phase>, dagger: Option<String> },
    /// Frobenius spider; the colour selects an observable in a model.
    Spider { colour: String, phase: Phase },
    /// `I -> A* ⊗ A`.
    Cup,
    /// `A ⊗ A* -> I`.
    Cap,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub inputs: Vec<SystemType>,
    pub outputs: Vec<SystemType>,
}

impl Node {
    pub fn spider(colour: &str, sys: &SystemType, n_in: usize, n_out: usize, phase: Phase) -> Node {
        Node {
            kind: NodeKind::Spider { colour: colour.into(), phase },
            inputs: vec![sys.clone(); n_in],
            outputs: vec![sys.clone(); n_out],
        }
    }

    pub fn cup(sys: &SystemType) -> Result<Node, DiagramError> {
        let dual = sys.dual().ok_or_else(|| DiagramError::NoDual(sys.to_string()))?;
        Ok(Node { kind: NodeKind::Cup, inputs: vec![], outputs: vec![dual, sys.clone()] })
    }

    pub fn cap(sys: &SystemType) -> Result<Node, DiagramError> {
        let dual = sys.dual().ok_or_else(|| DiagramError::NoDual(sys.to_string()))?;
        Ok(Node { kind: NodeKind::Cap, inputs: vec![sys.clone(), dual], outputs: vec![] })
    }

    pub fn is_spider_of(&self, colour: &str) -> bool {
        matches!(&self.kind, NodeKind::Spider { colour: c, .. } if c == colour)
    }

    pub fn spider_phase(&self) -> Option<&Phase> {
        match &self.kind {
            NodeKind::Spider { phase, .. } => Some(phase),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DiagramError {
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },
    #[error("generator '{0}' has no dagger partner")]
    NoDaggerPartner(String),
    #[error("system '{0}' has no declared dual")]
    NoDual(String),
    #[error("partial trace index {index} out of range or input/output types differ")]
    BadTraceIndex { index: usize },
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error(transparent)]
    Phase(#[from] PhaseMismatch),
}

pub type DiagramResult<T> = Result<T, DiagramError>;

/// A morphism `inputs -> outputs` as a port graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    nodes: BTreeMap<NodeId, Node>,
    inputs: Vec<SystemType>,
    outputs: Vec<SystemType>,
    /// Each target is fed by exactly one source.
    links: BTreeMap<Target, Source>,
    next_id: u32,
}

fn mismatch(expected: &[SystemType], found: &[SystemType]) -> DiagramError {
    DiagramError::TypeMismatch { expected: fmt_types(expected), found: fmt_types(found) }
}

impl Diagram {
    /// Empty diagram `I -> I`.
    pub fn empty() -> Diagram {
        Diagram { nodes: BTreeMap::new(), inputs: vec![], outputs: vec![], links: BTreeMap::new(), next_id: 0 }
    }

    pub fn identity(types: &[SystemType]) -> Diagram {
        let links = (0..types.len()).map(|i| (Target::Output(i), Source::Input(i))).collect();
        Diagram { nodes: BTreeMap::new(), inputs: types.to_vec(), outputs: types.to_vec(), links, next_id: 0 }
    }

    /// Wire permutation sending input `i` to output `perm[i]`.
    pub fn permutation(types: &[SystemType], perm: &[usize]) -> DiagramResult<Diagram> {
        let n = types.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(DiagramError::Malformed("not a permutation".into()));
        }
        let mut outputs = types.to_vec();
        for i in 0..n {
            outputs[perm[i]] = types[i].clone();
        }
        let links = (0..n).map(|i| (Target::Output(perm[i]), Source::Input(i))).collect();
        Ok(Diagram { nodes: BTreeMap::new(), inputs: types.to_vec(), outputs, links, next_id: 0 })
    }

    pub fn swap(a: &SystemType, b: &SystemType) -> Diagram {
        Diagram::permutation(&[a.clone(), b.clone()], &[1, 0]).unwrap()
    }

    /// A single node with its inputs and outputs on the boundary, in port order.
    pub fn from_node(node: Node) -> Diagram {
        let mut d = Diagram::empty();
        d.inputs = node.inputs.clone();
        d.outputs = node.outputs.clone();
        let (n_in, n_out) = (node.inputs.len(), node.outputs.len());
        let id = d.add_node(node);
        for k in 0..n_in {
            d.links.insert(Target::In(id, k), Source::Input(k));
        }
        for k in 0..n_out {
            d.links.insert(Target::Output(k), Source::Out(id, k));
        }
        d
    }

    pub fn spider(colour: &str, sys: &SystemType, n_in: usize, n_out: usize, phase: Phase) -> Diagram {
        Diagram::from_node(Node::spider(colour, sys, n_in, n_out, phase))
    }

    pub fn cup(sys: &SystemType) -> DiagramResult<Diagram> {
        Ok(Diagram::from_node(Node::cup(sys)?))
    }

    pub fn cap(sys: &SystemType) -> DiagramResult<Diagram> {
        Ok(Diagram::from_node(Node::cap(sys)?))
    }

    pub fn inputs(&self) -> &[SystemType] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[SystemType] {
        &self.outputs
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, Node> {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut Node> {
        self.nodes.get_mut(&id)
    }

    pub fn links(&self) -> &BTreeMap<Target, Source> {
        &self.links
    }

    pub fn source_of(&self, t: Target) -> Option<Source> {
        self.links.get(&t).copied()
    }

    /// The target a source feeds, by linear scan.
    pub fn target_of(&self, s: Source) -> Option<Target> {
        self.links.iter().find(|(_, &v)| v == s).map(|(&t, _)| t)
    }

    /// Inverse of the link map.
    pub fn targets(&self) -> BTreeMap<Source, Target> {
        self.links.iter().map(|(&t, &s)| (s, t)).collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn add_node(&mut self, node: Node) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        self.nodes.insert(id, node);
        id
    }

    /// Removes a node and every link touching it.
    pub fn remove_node(&mut self, id: NodeId) -> Option<Node> {
        let node = self.nodes.remove(&id)?;
        self.links.retain(|t, s| !matches!(t, Target::In(n, _) if *n == id) && !matches!(s, Source::Out(n, _) if *n == id));
        Some(node)
    }

    pub fn connect(&mut self, s: Source, t: Target) {
        self.links.insert(t, s);
    }

    pub fn disconnect(&mut self, t: Target) -> Option<Source> {
        self.links.remove(&t)
    }

    pub fn set_boundary(&mut self, inputs: Vec<SystemType>, outputs: Vec<SystemType>) {
        self.inputs = inputs;
        self.outputs = outputs;
    }

    pub fn source_type(&self, s: Source) -> Option<&SystemType> {
        match s {
            Source::Input(i) => self.inputs.get(i),
            Source::Out(n, k) => self.nodes.get(&n)?.outputs.get(k),
        }
    }

    pub fn target_type(&self, t: Target) -> Option<&SystemType> {
        match t {
            Target::Output(j) => self.outputs.get(j),
            Target::In(n, k) => self.nodes.get(&n)?.inputs.get(k),
        }
    }

    /// Checks that every port carries exactly one well-typed wire and that the graph is acyclic.
    pub fn validate(&self) -> DiagramResult<()> {
        let mut expected_targets = BTreeSet::new();
        let mut expected_sources = BTreeSet::new();
        for j in 0..self.outputs.len() {
            expected_targets.insert(Target::Output(j));
        }
        for i in 0..self.inputs.len() {
            expected_sources.insert(Source::Input(i));
        }
        for (&id, node) in &self.nodes {
            for k in 0..node.inputs.len() {
                expected_targets.insert(Target::In(id, k));
            }
            for k in 0..node.outputs.len() {
                expected_sources.insert(Source::Out(id, k));
            }
        }
        let targets: BTreeSet<Target> = self.links.keys().copied().collect();
        if targets != expected_targets {
            return Err(DiagramError::Malformed("some target port is unconnected or unknown".into()));
        }
        let mut used = BTreeSet::new();
        for (&t, &s) in &self.links {
            if !expected_sources.contains(&s) {
                return Err(DiagramError::Malformed(format!("unknown source {s:?}")));
            }
            if !used.insert(s) {
                return Err(DiagramError::Malformed(format!("source {s:?} feeds two targets")));
            }
            let (ts, tt) = (self.source_type(s).unwrap(), self.target_type(t).unwrap());
            if ts != tt {
                return Err(mismatch(std::slice::from_ref(tt), std::slice::from_ref(ts)));
            }
        }
        if used.len() != expected_sources.len() {
            return Err(DiagramError::Malformed("some source port is unconnected".into()));
        }
        if self.topo_order().is_none() {
            return Err(DiagramError::Malformed("diagram contains a directed cycle".into()));
        }
        Ok(())
    }

    /// Node ids in a deterministic topological order, or `None` on a cycle.
    pub fn topo_order(&self) -> Option<Vec<NodeId>> {
        self.topo_order_by(|ready| *ready.iter().next().unwrap())
    }

    /// Topological order where `pick` chooses among ready nodes.
    pub fn topo_order_by(&self, mut pick: impl FnMut(&BTreeSet<NodeId>) -> NodeId) -> Option<Vec<NodeId>> {
        let mut indeg: BTreeMap<NodeId, usize> = self.nodes.keys().map(|&id| (id, 0)).collect();
        let mut succ: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for (&t, &s) in &self.links {
            if let (Target::In(b, _), Source::Out(a, _)) = (t, s) {
                *indeg.get_mut(&b)? += 1;
                succ.entry(a).or_default().push(b);
            }
        }
        let mut ready: BTreeSet<NodeId> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&id, _)| id).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while !ready.is_empty() {
            let id = pick(&ready);
            ready.remove(&id);
            order.push(id);
            for &b in succ.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indeg.get_mut(&b).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(b);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Renumbers nodes `0..n` in the current id order.
    pub fn compact(&self) -> Diagram {
        let map: BTreeMap<NodeId, NodeId> =
            self.nodes.keys().enumerate().map(|(i, &id)| (id, NodeId(i as u32))).collect();
        self.renumbered(&map)
    }

    /// Relabels nodes by `map`, which must be injective on the node ids.
    pub fn renumbered(&self, map: &BTreeMap<NodeId, NodeId>) -> Diagram {
        let nodes = self.nodes.iter().map(|(id, n)| (map[id], n.clone())).collect();
        let links = self
            .links
            .iter()
            .map(|(&t, &s)| {
                let t = match t {
                    Target::In(n, k) => Target::In(map[&n], k),
                    o => o,
                };
                let s = match s {
                    Source::Out(n, k) => Source::Out(map[&n], k),
                    i => i,
                };
                (t, s)
            })
            .collect();
        let next_id = map.values().map(|n| n.0 + 1).max().unwrap_or(0);
        Diagram { nodes, inputs: self.inputs.clone(), outputs: self.outputs.clone(), links, next_id }
    }

    fn shifted(&self, offset: u32) -> Diagram {
        let map = self.nodes.keys().map(|&id| (id, NodeId(id.0 + offset))).collect();
        self.renumbered(&map)
    }

    /// Sequential composition: `self` first, then `next`.
    pub fn compose(&self, next: &Diagram) -> DiagramResult<Diagram> {
        if self.outputs != next.inputs {
            return Err(mismatch(&next.inputs, &self.outputs));
        }
        let next = next.shifted(self.next_id);
        let mut links: BTreeMap<Target, Source> =
            self.links.iter().filter(|(t, _)| !matches!(t, Target::Output(_))).map(|(&t, &s)| (t, s)).collect();
        for (&t, &s) in &next.links {
            let s = match s {
                Source::Input(i) => self.links[&Target::Output(i)],
                other => other,
            };
            links.insert(t, s);
        }
        let mut nodes = self.nodes.clone();
        nodes.extend(next.nodes);
        Ok(Diagram {
            nodes,
            inputs: self.inputs.clone(),
            outputs: next.outputs,
            links,
            next_id: self.next_id.max(next.next_id),
        })
    }

    /// Parallel composition, `self` on the left.
    pub fn tensor(&self, other: &Diagram) -> Diagram {
        let other = other.shifted(self.next_id);
        let (ni, no) = (self.inputs.len(), self.outputs.len());
        let mut links = self.links.clone();
        for (&t, &s) in &other.links {
            let t = match t {
                Target::Output(j) => Target::Output(j + no),
                t => t,
            };
            let s = match s {
                Source::Input(i) => Source::Input(i + ni),
                s => s,
            };
            links.insert(t, s);
        }
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes);
        Diagram {
            nodes,
            inputs: [self.inputs.clone(), other.inputs].concat(),
            outputs: [self.outputs.clone(), other.outputs].concat(),
            links,
            next_id: self.next_id.max(other.next_id),
        }
    }

    pub fn tensor_all<'a>(items: impl IntoIterator<Item = &'a Diagram>) -> Diagram {
        items.into_iter().fold(Diagram::empty(), |acc, d| acc.tensor(d))
    }

    /// Mirror image: reverses wires, replaces boxes by their partners, negates phases
    /// and exchanges cups with caps.
    pub fn dagger(&self) -> DiagramResult<Diagram> {
        let mut nodes = BTreeMap::new();
        for (&id, node) in &self.nodes {
            let kind = match &node.kind {
                NodeKind::Box { name, phase, dagger } => {
                    let partner = dagger.clone().ok_or_else(|| DiagramError::NoDaggerPartner(name.clone()))?;
                    NodeKind::Box { name: partner, phase: phase.as_ref().map(Phase::neg), dagger: Some(name.clone()) }
                }
                NodeKind::Spider { colour, phase } => NodeKind::Spider { colour: colour.clone(), phase: phase.neg() },
                NodeKind::Cup => NodeKind::Cap,
                NodeKind::Cap => NodeKind::Cup,
            };
            nodes.insert(id, Node { kind, inputs: node.outputs.clone(), outputs: node.inputs.clone() });
        }
        let links = self
            .links
            .iter()
            .map(|(&t, &s)| {
                let nt = match s {
                    Source::Input(i) => Target::Output(i),
                    Source::Out(n, k) => Target::In(n, k),
                };
                let ns = match t {
                    Target::Output(j) => Source::Input(j),
                    Target::In(n, k) => Source::Out(n, k),
                };
                (nt, ns)
            })
            .collect();
        Ok(Diagram { nodes, inputs: self.outputs.clone(), outputs: self.inputs.clone(), links, next_id: self.next_id })
    }

    /// Bends every wire with cups and caps: `f: A -> B` becomes `f*: B* -> A*`, with tensor
    /// factors reversed.
    pub fn transpose_upper(&self) -> DiagramResult<Diagram> {
        self.bend(&|t| Node::cup(t), &|t| Node::cap(t))
    }

    /// Transpose using the cups and caps of a spider colour; all wires must have type `sys`.
    pub fn transpose_with(&self, colour: &str, sys: &SystemType) -> DiagramResult<Diagram> {
        for t in self.inputs.iter().chain(&self.outputs) {
            if t != sys {
                return Err(mismatch(std::slice::from_ref(sys), std::slice::from_ref(t)));
            }
        }
        self.bend(&|t| Ok(Node::spider(colour, t, 0, 2, Phase::Zero)), &|t| Ok(Node::spider(colour, t, 2, 0, Phase::Zero)))
    }

    fn bend(
        &self,
        cup: &dyn Fn(&SystemType) -> DiagramResult<Node>,
        cap: &dyn Fn(&SystemType) -> DiagramResult<Node>,
    ) -> DiagramResult<Diagram> {
        let (n, m) = (self.inputs.len(), self.outputs.len());
        let mut d = Diagram { links: BTreeMap::new(), ..self.clone() };
        let mut new_in = Vec::with_capacity(m);
        let mut new_out = Vec::with_capacity(n);
        for j in (0..m).rev() {
            new_in.push(self.outputs[j].dual().ok_or_else(|| DiagramError::NoDual(self.outputs[j].to_string()))?);
        }
        for i in (0..n).rev() {
            new_out.push(self.inputs[i].dual().ok_or_else(|| DiagramError::NoDual(self.inputs[i].to_string()))?);
        }
        let cups: Vec<NodeId> = (0..n).map(|i| cup(&self.inputs[i]).map(|c| d.add_node(c))).collect::<Result<_, _>>()?;
        let caps: Vec<NodeId> = (0..m).map(|j| cap(&self.outputs[j]).map(|c| d.add_node(c))).collect::<Result<_, _>>()?;
        for (&t, &s) in &self.links {
            let s = match s {
                Source::Input(i) => Source::Out(cups[i], 1),
                s => s,
            };
            let t = match t {
                Target::Output(j) => Target::In(caps[j], 0),
                t => t,
            };
            d.links.insert(t, s);
        }
        for i in 0..n {
            d.links.insert(Target::Output(n - 1 - i), Source::Out(cups[i], 0));
        }
        for j in 0..m {
            d.links.insert(Target::In(caps[j], 1), Source::Input(m - 1 - j));
        }
        d.inputs = new_in;
        d.outputs = new_out;
        Ok(d)
    }

    /// `f_* = (f†)*`, the conjugate.
    pub fn conjugate_lower(&self) -> DiagramResult<Diagram> {
        self.dagger()?.transpose_upper()
    }

    /// Closes input `index` against output `index` with a cup and a cap.
    pub fn partial_trace(&self, index: usize) -> DiagramResult<Diagram> {
        if index >= self.inputs.len() || index >= self.outputs.len() || self.inputs[index] != self.outputs[index] {
            return Err(DiagramError::BadTraceIndex { index });
        }
        let sys = self.inputs[index].clone();
        let mut d = self.clone();
        let cup = d.add_node(Node::cup(&sys)?);
        let cap = d.add_node(Node::cap(&sys)?);
        let mut links = BTreeMap::new();
        for (&t, &s) in &self.links {
            let s = match s {
                Source::Input(i) if i == index => Source::Out(cup, 1),
                Source::Input(i) if i > index => Source::Input(i - 1),
                s => s,
            };
            let t = match t {
                Target::Output(j) if j == index => Target::In(cap, 0),
                Target::Output(j) if j > index => Target::Output(j - 1),
                t => t,
            };
            links.insert(t, s);
        }
        links.insert(Target::In(cap, 1), Source::Out(cup, 0));
        d.links = links;
        d.inputs.remove(index);
        d.outputs.remove(index);
        Ok(d)
    }

    /// Full trace of an endomorphism.
    pub fn trace(&self) -> DiagramResult<Diagram> {
        if self.inputs != self.outputs {
            return Err(mismatch(&self.inputs, &self.outputs));
        }
        let mut d = self.clone();
        while !d.inputs.is_empty() {
            d = d.partial_trace(0)?;
        }
        Ok(d)
    }

    /// Removes cup–cap zig-zags until none remain. Closed loops are kept.
    pub fn yank_normalize(&self) -> Diagram {
        let mut d = self.clone();
        'outer: loop {
            let cups: Vec<NodeId> =
                d.nodes.iter().filter(|(_, n)| n.kind == NodeKind::Cup).map(|(&id, _)| id).collect();
            for c in cups {
                for a in 0..2 {
                    let Some(Target::In(k, b)) = d.target_of(Source::Out(c, a)) else { continue };
                    if d.nodes[&k].kind != NodeKind::Cap {
                        continue;
                    }
                    let t1 = d.target_of(Source::Out(c, 1 - a)).unwrap();
                    let s1 = d.links[&Target::In(k, 1 - b)];
                    if t1 == Target::In(k, 1 - b) {
                        continue;
                    }
                    d.remove_node(c);
                    d.remove_node(k);
                    d.links.insert(t1, s1);
                    continue 'outer;
                }
            }
            return d;
        }
    }

    /// Equality up to yanking and relabelling of internal nodes.
    pub fn iso_equal(&self, other: &Diagram) -> bool {
        iso::isomorphic(&self.yank_normalize(), &other.yank_normalize())
    }

    /// Undirected connected components of nodes; boundary wires do not connect.
    pub fn components(&self) -> Vec<BTreeSet<NodeId>> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> = self.nodes.keys().map(|&id| (id, vec![])).collect();
        for (&t, &s) in &self.links {
            if let (Target::In(b, _), Source::Out(a, _)) = (t, s) {
                adj.get_mut(&a).unwrap().push(b);
                adj.get_mut(&b).unwrap().push(a);
            }
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.nodes.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(n) = queue.pop_front() {
                comp.insert(n);
                for &m in &adj[&n] {
                    if seen.insert(m) {
                        queue.push_back(m);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}
