//! Rewriting: subdiagram matching, rule application, spider fusion, and the
//! characteristic-matrix normal form of the bialgebra fragment.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::diagram::text::RuleText;
use crate::diagram::{Diagram, DiagramError, Node, NodeId, NodeKind, Phase, Source, SystemType, Target};
use crate::signatures::Signature;

/// Default step budget for rewriting loops.
pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RewriteError {
    #[error("rule sides have different boundaries: {0}")]
    Boundary(String),
    #[error("matching no longer fits the host diagram")]
    StaleMatching,
    #[error("unsupported fragment: {0}")]
    UnsupportedFragment(String),
    #[error("bad region: {0}")]
    Region(String),
    #[error("step budget of {0} exhausted")]
    Budget(usize),
    #[error("characteristic matrix changed during normalisation")]
    Invariant,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

pub type RewriteResult<T> = Result<T, RewriteError>;

/// A rewrite rule `lhs => rhs`. Frame wires running straight through both sides are
/// removed on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub name: String,
    pub lhs: Diagram,
    pub rhs: Diagram,
    /// Spiders in the left side may match host spiders with more legs.
    pub spider_aware: bool,
}

impl Rule {
    pub fn new(name: impl Into<String>, lhs: Diagram, rhs: Diagram, spider_aware: bool) -> RewriteResult<Rule> {
        if lhs.inputs() != rhs.inputs() || lhs.outputs() != rhs.outputs() {
            return Err(RewriteError::Boundary(format!(
                "{} -> {} vs {} -> {}",
                crate::diagram::fmt_types(lhs.inputs()),
                crate::diagram::fmt_types(lhs.outputs()),
                crate::diagram::fmt_types(rhs.inputs()),
                crate::diagram::fmt_types(rhs.outputs())
            )));
        }
        let (mut lhs, mut rhs) = (lhs, rhs);
        while let Some((i, j)) = bare_wire(&lhs) {
            if rhs.source_of(Target::Output(j)) != Some(Source::Input(i)) {
                return Err(RewriteError::Boundary(format!("left side passes input {i} straight to output {j} but the right side does not")));
            }
            lhs = strip_wire(&lhs, i, j);
            rhs = strip_wire(&rhs, i, j);
        }
        Ok(Rule { name: name.into(), lhs, rhs, spider_aware })
    }

    pub fn from_text(t: RuleText) -> RewriteResult<Rule> {
        Rule::new(t.name, t.lhs, t.rhs, t.spider_aware)
    }

    /// The rule read right to left.
    pub fn reversed(&self) -> Rule {
        Rule { name: format!("{}⁻¹", self.name), lhs: self.rhs.clone(), rhs: self.lhs.clone(), spider_aware: self.spider_aware }
    }
}

fn bare_wire(d: &Diagram) -> Option<(usize, usize)> {
    d.links().iter().find_map(|(t, s)| match (t, s) {
        (Target::Output(j), Source::Input(i)) => Some((*i, *j)),
        _ => None,
    })
}

/// Drops input `i` and output `j`, which must be joined by a bare wire.
fn strip_wire(d: &Diagram, i: usize, j: usize) -> Diagram {
    let mut e = d.clone();
    let links: Vec<(Target, Source)> = d.links().iter().map(|(&t, &s)| (t, s)).collect();
    for (t, _) in &links {
        e.disconnect(*t);
    }
    for (t, s) in links {
        if t == Target::Output(j) {
            continue;
        }
        let t = match t {
            Target::Output(k) if k > j => Target::Output(k - 1),
            t => t,
        };
        let s = match s {
            Source::Input(k) if k > i => Source::Input(k - 1),
            s => s,
        };
        e.connect(s, t);
    }
    let mut ins = d.inputs().to_vec();
    ins.remove(i);
    let mut outs = d.outputs().to_vec();
    outs.remove(j);
    e.set_boundary(ins, outs);
    e
}

/// Spider introduced when a spider-aware match absorbs extra host legs or phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub colour: String,
    pub system: SystemType,
    pub phase: Phase,
    /// `true`: sits before the match, feeding pattern inputs `slots`; otherwise after,
    /// fed by pattern outputs `slots`.
    pub before: bool,
    pub slots: Vec<usize>,
    pub sources: Vec<Source>,
    pub targets: Vec<Target>,
}

/// An occurrence of a pattern in a host diagram.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    /// Pattern node to host node.
    pub nodes: BTreeMap<NodeId, NodeId>,
    /// Host source feeding each pattern input, unless a split spider does.
    pub inputs: Vec<Option<Source>>,
    /// Host target fed by each pattern output, unless a split spider takes it.
    pub outputs: Vec<Option<Target>>,
    pub splits: Vec<Split>,
    snapshot_nodes: Vec<(NodeId, Node)>,
    snapshot_links: Vec<(Target, Source)>,
}

impl Matching {
    /// Host ids in pattern-node order.
    pub fn image(&self) -> Vec<NodeId> {
        self.nodes.values().copied().collect()
    }
}

fn is_spider(n: &Node) -> bool {
    matches!(n.kind, NodeKind::Spider { .. })
}

fn spider_system(n: &Node) -> Option<&SystemType> {
    n.inputs.first().or(n.outputs.first())
}

fn compatible(p: &Node, h: &Node, aware: bool) -> bool {
    match (&p.kind, &h.kind) {
        (NodeKind::Spider { colour: a, phase: pa }, NodeKind::Spider { colour: b, phase: pb }) => {
            if a != b {
                return false;
            }
            if let (Some(x), Some(y)) = (spider_system(p), spider_system(h)) {
                if x != y {
                    return false;
                }
            }
            if aware {
                h.inputs.len() >= p.inputs.len() && h.outputs.len() >= p.outputs.len() && pb.add(&pa.neg()).is_ok()
            } else {
                h.inputs.len() == p.inputs.len() && h.outputs.len() == p.outputs.len() && pa == pb
            }
        }
        (a, b) => a == b && p.inputs == h.inputs && p.outputs == h.outputs,
    }
}

type EdgeMap = BTreeMap<(NodeId, NodeId), Vec<(usize, usize)>>;

fn internal_edges(d: &Diagram) -> EdgeMap {
    let mut m: EdgeMap = BTreeMap::new();
    for (&t, &s) in d.links() {
        if let (Source::Out(a, k), Target::In(b, l)) = (s, t) {
            m.entry((a, b)).or_default().push((k, l));
        }
    }
    m
}

fn successors(d: &Diagram) -> BTreeMap<NodeId, Vec<NodeId>> {
    let mut m: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (&t, &s) in d.links() {
        if let (Source::Out(a, _), Target::In(b, _)) = (s, t) {
            m.entry(a).or_default().push(b);
        }
    }
    m
}

struct Matcher<'a> {
    p: &'a Diagram,
    h: &'a Diagram,
    aware: bool,
    order: Vec<NodeId>,
    pe: EdgeMap,
    he: EdgeMap,
    succ: BTreeMap<NodeId, Vec<NodeId>>,
    found: Vec<Matching>,
}

impl Matcher<'_> {
    fn edge_sig(&self, edges: Option<&Vec<(usize, usize)>>, a_sym: bool, b_sym: bool) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = edges
            .map(|e| e.iter().map(|&(k, l)| (if a_sym { usize::MAX } else { k }, if b_sym { usize::MAX } else { l })).collect())
            .unwrap_or_default();
        v.sort_unstable();
        v
    }

    fn consistent(&self, map: &BTreeMap<NodeId, NodeId>, p: NodeId, h: NodeId) -> bool {
        let ps = is_spider(&self.p.nodes()[&p]);
        for (&q, &g) in map {
            let qs = is_spider(&self.p.nodes()[&q]);
            let fwd = self.edge_sig(self.pe.get(&(p, q)), ps, qs) == self.edge_sig(self.he.get(&(h, g)), ps, qs);
            let bwd = self.edge_sig(self.pe.get(&(q, p)), qs, ps) == self.edge_sig(self.he.get(&(g, h)), qs, ps);
            if !fwd || !bwd {
                return false;
            }
        }
        true
    }

    fn search(&mut self, i: usize, map: &mut BTreeMap<NodeId, NodeId>, used: &mut BTreeSet<NodeId>) {
        if i == self.order.len() {
            if let Some(m) = self.finish(map) {
                self.found.push(m);
            }
            return;
        }
        let p = self.order[i];
        let pn = &self.p.nodes()[&p];
        let cands: Vec<NodeId> = self.h.nodes().iter().filter(|(id, n)| !used.contains(id) && compatible(pn, n, self.aware)).map(|(&id, _)| id).collect();
        for h in cands {
            if !self.consistent(map, p, h) {
                continue;
            }
            map.insert(p, h);
            used.insert(h);
            self.search(i + 1, map, used);
            map.remove(&p);
            used.remove(&h);
        }
    }

    fn convex(&self, image: &BTreeSet<NodeId>) -> bool {
        let mut queue: VecDeque<NodeId> = VecDeque::new();
        let mut seen = BTreeSet::new();
        for m in image {
            for &x in self.succ.get(m).map(Vec::as_slice).unwrap_or(&[]) {
                if !image.contains(&x) && seen.insert(x) {
                    queue.push_back(x);
                }
            }
        }
        while let Some(x) = queue.pop_front() {
            for &y in self.succ.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if image.contains(&y) {
                    return false;
                }
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        true
    }

    fn finish(&self, map: &BTreeMap<NodeId, NodeId>) -> Option<Matching> {
        let image: BTreeSet<NodeId> = map.values().copied().collect();
        if !self.convex(&image) {
            return None;
        }
        let (p, h) = (self.p, self.h);
        let mut inputs = vec![None; p.inputs().len()];
        let mut outputs = vec![None; p.outputs().len()];
        let mut splits = Vec::new();
        let host_targets = h.targets();
        for (&pid, &hid) in map {
            let pn = &p.nodes()[&pid];
            let hn = &h.nodes()[&hid];
            // Pattern legs on the boundary, with the pattern input/output they attach to.
            let b_in: Vec<(usize, usize)> = (0..pn.inputs.len())
                .filter_map(|k| match p.source_of(Target::In(pid, k)) {
                    Some(Source::Input(i)) => Some((k, i)),
                    _ => None,
                })
                .collect();
            let p_targets = p.targets();
            let b_out: Vec<(usize, usize)> = (0..pn.outputs.len())
                .filter_map(|k| match p_targets.get(&Source::Out(pid, k)) {
                    Some(Target::Output(j)) => Some((k, *j)),
                    _ => None,
                })
                .collect();
            if !is_spider(pn) {
                for &(k, i) in &b_in {
                    inputs[i] = Some(h.source_of(Target::In(hid, k))?);
                }
                for &(k, j) in &b_out {
                    outputs[j] = Some(*host_targets.get(&Source::Out(hid, k))?);
                }
                continue;
            }
            // Host legs not wired to other matched nodes.
            let left_in: Vec<Source> = (0..hn.inputs.len())
                .filter_map(|k| h.source_of(Target::In(hid, k)))
                .filter(|s| !matches!(s, Source::Out(n, _) if image.contains(n)))
                .collect();
            let left_out: Vec<Target> = (0..hn.outputs.len())
                .filter_map(|k| host_targets.get(&Source::Out(hid, k)).copied())
                .filter(|t| !matches!(t, Target::In(n, _) if image.contains(n)))
                .collect();
            if left_in.len() < b_in.len() || left_out.len() < b_out.len() {
                return None;
            }
            let (pp, hp) = (pn.spider_phase()?, hn.spider_phase()?);
            let rem = hp.add(&pp.neg()).ok()?;
            let exact = left_in.len() == b_in.len() && left_out.len() == b_out.len() && rem.is_zero();
            if exact {
                for (&(_, i), s) in b_in.iter().zip(&left_in) {
                    inputs[i] = Some(*s);
                }
                for (&(_, j), t) in b_out.iter().zip(&left_out) {
                    outputs[j] = Some(*t);
                }
                continue;
            }
            if !self.aware {
                return None;
            }
            let (NodeKind::Spider { colour, .. }, Some(system)) = (&hn.kind, spider_system(hn)) else { return None };
            if !b_in.is_empty() {
                // Everything extra goes through a spider feeding the pattern's boundary inputs.
                for (&(_, j), t) in b_out.iter().zip(&left_out) {
                    outputs[j] = Some(*t);
                }
                splits.push(Split {
                    colour: colour.clone(),
                    system: system.clone(),
                    phase: rem,
                    before: true,
                    slots: b_in.iter().map(|&(_, i)| i).collect(),
                    sources: left_in,
                    targets: left_out[b_out.len()..].to_vec(),
                });
            } else if !b_out.is_empty() {
                splits.push(Split {
                    colour: colour.clone(),
                    system: system.clone(),
                    phase: rem,
                    before: false,
                    slots: b_out.iter().map(|&(_, j)| j).collect(),
                    sources: left_in,
                    targets: left_out,
                });
            } else {
                return None;
            }
        }
        let mut snapshot_links: Vec<(Target, Source)> = h
            .links()
            .iter()
            .filter(|(t, s)| matches!(t, Target::In(n, _) if image.contains(n)) || matches!(s, Source::Out(n, _) if image.contains(n)))
            .map(|(&t, &s)| (t, s))
            .collect();
        snapshot_links.sort();
        Some(Matching {
            nodes: map.clone(),
            inputs,
            outputs,
            splits,
            snapshot_nodes: image.iter().map(|&id| (id, h.nodes()[&id].clone())).collect(),
            snapshot_links,
        })
    }
}

/// Pattern nodes ordered so that each (after the first of a component) touches an earlier one.
fn search_order(p: &Diagram) -> Vec<NodeId> {
    let mut order = Vec::new();
    for comp in p.components() {
        let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for (&t, &s) in p.links() {
            if let (Source::Out(a, _), Target::In(b, _)) = (s, t) {
                adj.entry(a).or_default().insert(b);
                adj.entry(b).or_default().insert(a);
            }
        }
        let start = *comp.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            order.push(n);
            for &m in adj.get(&n).into_iter().flatten() {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
    }
    order
}

fn find_matchings_with(pattern: &Diagram, host: &Diagram, aware: bool) -> Vec<Matching> {
    let mut m = Matcher {
        p: pattern,
        h: host,
        aware,
        order: search_order(pattern),
        pe: internal_edges(pattern),
        he: internal_edges(host),
        succ: successors(host),
        found: Vec::new(),
    };
    m.search(0, &mut BTreeMap::new(), &mut BTreeSet::new());
    let mut found = m.found;
    found.sort_by_key(|a| a.image());
    found.dedup_by(|a, b| a.nodes == b.nodes);
    found
}

/// All convex, label-compatible occurrences of `pattern` in `host`, ordered
/// lexicographically by host node ids. Spider legs are interchangeable; arities must
/// match exactly.
pub fn find_matchings(pattern: &Diagram, host: &Diagram) -> Vec<Matching> {
    find_matchings_with(pattern, host, false)
}

/// Occurrences of a rule's left side, honouring its spider-awareness.
pub fn rule_matchings(rule: &Rule, host: &Diagram) -> Vec<Matching> {
    find_matchings_with(&rule.lhs, host, rule.spider_aware)
}

fn check_fresh(host: &Diagram, m: &Matching) -> RewriteResult<()> {
    for (id, node) in &m.snapshot_nodes {
        if host.node(*id) != Some(node) {
            return Err(RewriteError::StaleMatching);
        }
    }
    let image: BTreeSet<NodeId> = m.snapshot_nodes.iter().map(|(id, _)| *id).collect();
    let mut now: Vec<(Target, Source)> = host
        .links()
        .iter()
        .filter(|(t, s)| matches!(t, Target::In(n, _) if image.contains(n)) || matches!(s, Source::Out(n, _) if image.contains(n)))
        .map(|(&t, &s)| (t, s))
        .collect();
    now.sort();
    if now != m.snapshot_links {
        return Err(RewriteError::StaleMatching);
    }
    Ok(())
}

/// Replaces the matched occurrence of `rule.lhs` by `rule.rhs`.
pub fn apply_rule(rule: &Rule, host: &Diagram, m: &Matching) -> RewriteResult<Diagram> {
    check_fresh(host, m)?;
    if m.inputs.len() != rule.rhs.inputs().len() || m.outputs.len() != rule.rhs.outputs().len() {
        return Err(RewriteError::StaleMatching);
    }
    let mut d = host.clone();
    for id in m.nodes.values() {
        d.remove_node(*id);
    }
    let mut rhs_in: Vec<Option<Source>> = m.inputs.clone();
    let mut rhs_out: Vec<Option<Target>> = m.outputs.clone();
    for s in &m.splits {
        let n = s.slots.len();
        if s.before {
            let id = d.add_node(Node::spider(&s.colour, &s.system, s.sources.len(), n + s.targets.len(), s.phase.clone()));
            for (k, &src) in s.sources.iter().enumerate() {
                d.connect(src, Target::In(id, k));
            }
            for (k, &slot) in s.slots.iter().enumerate() {
                rhs_in[slot] = Some(Source::Out(id, k));
            }
            for (k, &t) in s.targets.iter().enumerate() {
                d.connect(Source::Out(id, n + k), t);
            }
        } else {
            let id = d.add_node(Node::spider(&s.colour, &s.system, n + s.sources.len(), s.targets.len(), s.phase.clone()));
            for (k, &slot) in s.slots.iter().enumerate() {
                rhs_out[slot] = Some(Target::In(id, k));
            }
            for (k, &src) in s.sources.iter().enumerate() {
                d.connect(src, Target::In(id, n + k));
            }
            for (k, &t) in s.targets.iter().enumerate() {
                d.connect(Source::Out(id, k), t);
            }
        }
    }
    let mut ids = BTreeMap::new();
    for (&rid, node) in rule.rhs.nodes() {
        ids.insert(rid, d.add_node(node.clone()));
    }
    for (&t, &s) in rule.rhs.links() {
        let s = match s {
            Source::Input(i) => rhs_in[i].ok_or(RewriteError::StaleMatching)?,
            Source::Out(n, k) => Source::Out(ids[&n], k),
        };
        let t = match t {
            Target::Output(j) => rhs_out[j].ok_or(RewriteError::StaleMatching)?,
            Target::In(n, k) => Target::In(ids[&n], k),
        };
        d.connect(s, t);
    }
    d.validate()?;
    Ok(d)
}

/// Outcome of a bounded rewriting run.
#[derive(Clone, Debug, PartialEq)]
pub struct RewriteRun {
    pub result: Diagram,
    pub steps: usize,
    /// Whether no rule applies to the result.
    pub normal: bool,
}

/// One leftmost step: the matching with the smallest host-id image across all rules,
/// earlier rules winning ties. Host ids grow with insertion, so this favours the oldest
/// (innermost, most deeply nested) redex.
pub fn rewrite_once(rules: &[Rule], host: &Diagram) -> RewriteResult<Option<Diagram>> {
    let mut best: Option<(Vec<NodeId>, &Rule, Matching)> = None;
    for rule in rules {
        if let Some(m) = rule_matchings(rule, host).into_iter().next() {
            let img = m.image();
            if best.as_ref().is_none_or(|(b, _, _)| img < *b) {
                best = Some((img, rule, m));
            }
        }
    }
    match best {
        Some((_, rule, m)) => Ok(Some(apply_rule(rule, host, &m)?)),
        None => Ok(None),
    }
}

/// Applies rules until none matches or `budget` steps are taken.
pub fn rewrite_to_fixpoint(rules: &[Rule], host: &Diagram, budget: usize) -> RewriteResult<RewriteRun> {
    let mut d = host.clone();
    for steps in 0..budget {
        match rewrite_once(rules, &d)? {
            Some(next) => d = next,
            None => return Ok(RewriteRun { result: d, steps, normal: true }),
        }
    }
    let normal = rules.iter().all(|r| rule_matchings(r, &d).is_empty());
    Ok(RewriteRun { result: d, steps: budget, normal })
}

/// Successors of `d` under every rule in both directions, at every matching.
fn neighbours(rules: &[Rule], d: &Diagram) -> Vec<Diagram> {
    let mut out = Vec::new();
    for rule in rules {
        for r in [rule.clone(), rule.reversed()] {
            for m in rule_matchings(&r, d) {
                if let Ok(next) = apply_rule(&r, d, &m) {
                    out.push(next);
                }
            }
        }
    }
    out
}

/// Searches the symmetric closure of `rules` from both ends for a common diagram (up to
/// isomorphism), expanding at most `budget` diagrams. Returns the derivation length.
pub fn derive_equal(a: &Diagram, b: &Diagram, rules: &[Rule], budget: usize) -> Option<usize> {
    if a.iso_equal(b) {
        return Some(0);
    }
    let mut sides = [vec![(a.clone(), 0usize)], vec![(b.clone(), 0usize)]];
    let mut frontier = [VecDeque::from([(a.clone(), 0usize)]), VecDeque::from([(b.clone(), 0usize)])];
    let mut expanded = 0;
    while expanded < budget && (!frontier[0].is_empty() || !frontier[1].is_empty()) {
        for side in 0..2 {
            let Some((d, depth)) = frontier[side].pop_front() else { continue };
            expanded += 1;
            for next in neighbours(rules, &d) {
                if sides[side].iter().any(|(x, _)| x.iso_equal(&next)) {
                    continue;
                }
                if let Some((_, k)) = sides[1 - side].iter().find(|(x, _)| x.iso_equal(&next)) {
                    return Some(depth + 1 + k);
                }
                sides[side].push((next.clone(), depth + 1));
                frontier[side].push_back((next, depth + 1));
            }
        }
    }
    None
}

/// Rebuilds the node set `merge` as one node, dropping wires listed in `drop`.
fn replace_nodes(d: &Diagram, remove: &[NodeId], node: Node, ins: Vec<Source>, outs: Vec<Target>) -> Diagram {
    let mut e = d.clone();
    for id in remove {
        e.remove_node(*id);
    }
    let id = e.add_node(node);
    for (k, s) in ins.into_iter().enumerate() {
        e.connect(s, Target::In(id, k));
    }
    for (k, t) in outs.into_iter().enumerate() {
        e.connect(Source::Out(id, k), t);
    }
    e
}

fn reachable_avoiding_direct(d: &Diagram, a: NodeId, b: NodeId) -> bool {
    let succ = successors(d);
    let mut queue: VecDeque<NodeId> = succ.get(&a).into_iter().flatten().copied().filter(|&x| x != b).collect();
    let mut seen: BTreeSet<NodeId> = queue.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        for &y in succ.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            if y == b {
                return true;
            }
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    false
}

/// One spider-fusion step: the first pair of same-colour spiders joined by a wire,
/// merged with their phases added. Parallel wires between them vanish.
pub fn fuse_once(d: &Diagram) -> RewriteResult<Option<Diagram>> {
    let edges = internal_edges(d);
    for &(a, b) in edges.keys() {
        let (na, nb) = (&d.nodes()[&a], &d.nodes()[&b]);
        let (NodeKind::Spider { colour: ca, phase: pa }, NodeKind::Spider { colour: cb, phase: pb }) = (&na.kind, &nb.kind) else { continue };
        if ca != cb || spider_system(na) != spider_system(nb) || reachable_avoiding_direct(d, a, b) {
            continue;
        }
        let phase = pa.add(pb).map_err(DiagramError::from)?;
        let targets = d.targets();
        let mut ins: Vec<Source> = (0..na.inputs.len()).map(|k| d.source_of(Target::In(a, k)).unwrap()).collect();
        ins.extend((0..nb.inputs.len()).map(|k| d.source_of(Target::In(b, k)).unwrap()).filter(|s| !matches!(s, Source::Out(n, _) if *n == a)));
        let mut outs: Vec<Target> =
            (0..na.outputs.len()).map(|k| targets[&Source::Out(a, k)]).filter(|t| !matches!(t, Target::In(n, _) if *n == b)).collect();
        outs.extend((0..nb.outputs.len()).map(|k| targets[&Source::Out(b, k)]));
        let sys = spider_system(na).unwrap().clone();
        let node = Node::spider(ca, &sys, ins.len(), outs.len(), phase);
        return Ok(Some(replace_nodes(d, &[a, b], node, ins, outs)));
    }
    Ok(None)
}

/// Fuses same-colour adjacent spiders until no two share a wire.
pub fn spider_fuse(d: &Diagram) -> RewriteResult<Diagram> {
    let mut d = d.clone();
    while let Some(next) = fuse_once(&d)? {
        d = next;
    }
    Ok(d)
}

/// Replaces every phase-free one-in one-out spider by a plain wire.
pub fn remove_identity_spiders(d: &Diagram) -> Diagram {
    let mut d = d.clone();
    loop {
        let found = d.nodes().iter().find(|(_, n)| is_spider(n) && n.inputs.len() == 1 && n.outputs.len() == 1 && n.spider_phase().is_some_and(Phase::is_zero)).map(|(&id, _)| id);
        let Some(id) = found else { return d };
        let s = d.source_of(Target::In(id, 0)).unwrap();
        let t = d.target_of(Source::Out(id, 0)).unwrap();
        d.remove_node(id);
        d.connect(s, t);
    }
}

/// Moves a spider's phase onto a new one-legged spider of the same colour feeding an
/// extra last input.
pub fn unfuse_phase(d: &Diagram, id: NodeId) -> RewriteResult<Diagram> {
    let n = d.node(id).ok_or_else(|| RewriteError::Region(format!("no node {}", id.0)))?;
    let NodeKind::Spider { colour, phase } = &n.kind else { return Err(RewriteError::Region("not a spider".into())) };
    if phase.is_zero() {
        return Ok(d.clone());
    }
    let sys = spider_system(n).ok_or_else(|| RewriteError::Region("spider without legs".into()))?.clone();
    let targets = d.targets();
    let ins: Vec<Source> = (0..n.inputs.len()).map(|k| d.source_of(Target::In(id, k)).unwrap()).collect();
    let outs: Vec<Target> = (0..n.outputs.len()).map(|k| targets[&Source::Out(id, k)]).collect();
    let mut e = d.clone();
    let point = e.add_node(Node::spider(colour, &sys, 0, 1, phase.clone()));
    let mut ins = ins;
    ins.push(Source::Out(point, 0));
    let zero = zero_like(phase);
    Ok(replace_nodes(&e, &[id], Node::spider(colour, &sys, ins.len(), outs.len(), zero), ins, outs))
}

fn zero_like(p: &Phase) -> Phase {
    p.add(&p.neg()).unwrap_or(Phase::Zero)
}

/// Unfuses every nonzero spider phase in the diagram.
pub fn unfuse_all_phases(d: &Diagram) -> RewriteResult<Diagram> {
    let mut d = d.clone();
    let ids: Vec<NodeId> = d.nodes().iter().filter(|(_, n)| n.spider_phase().is_some_and(|p| !p.is_zero())).map(|(&id, _)| id).collect();
    for id in ids {
        d = unfuse_phase(&d, id)?;
    }
    Ok(d)
}

/// Which colour copies (one input) and which merges (one output) in the bialgebra fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub copy: String,
    pub merge: String,
}

impl Default for Fragment {
    fn default() -> Self {
        Self { copy: "white".into(), merge: "gray".into() }
    }
}

impl Fragment {
    fn role(&self, n: &Node) -> RewriteResult<Role> {
        let NodeKind::Spider { colour, phase } = &n.kind else {
            return Err(RewriteError::UnsupportedFragment("non-spider node".into()));
        };
        if !phase.is_zero() {
            return Err(RewriteError::UnsupportedFragment(format!("phase {phase} on a {colour} spider")));
        }
        if *colour == self.copy && n.inputs.len() == 1 {
            Ok(Role::Copy)
        } else if *colour == self.merge && n.outputs.len() == 1 {
            Ok(Role::Merge)
        } else {
            Err(RewriteError::UnsupportedFragment(format!("{colour} spider with {} inputs and {} outputs", n.inputs.len(), n.outputs.len())))
        }
    }

    fn check(&self, d: &Diagram) -> RewriteResult<()> {
        d.nodes().values().try_for_each(|n| self.role(n).map(|_| ()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Copy,
    Merge,
}

/// Forward path counts from inputs (rows) to outputs (columns).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacteristicMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl CharacteristicMatrix {
    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        (0..self.cols).map(|j| self.get(i, j)).sum()
    }

    pub fn col_sum(&self, j: usize) -> u64 {
        (0..self.rows).map(|i| self.get(i, j)).sum()
    }
}

impl fmt::Display for CharacteristicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows).map(|i| format!("[{}]", (0..self.cols).map(|j| self.get(i, j).to_string()).collect::<Vec<_>>().join(","))).collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Path counts of a bialgebra-fragment diagram.
pub fn characteristic_matrix(d: &Diagram, frag: &Fragment) -> RewriteResult<CharacteristicMatrix> {
    frag.check(d)?;
    let n = d.inputs().len();
    let order = d.topo_order().ok_or_else(|| RewriteError::UnsupportedFragment("cyclic diagram".into()))?;
    let mut counts: BTreeMap<Source, Vec<u64>> = BTreeMap::new();
    for i in 0..n {
        let mut v = vec![0; n];
        v[i] = 1;
        counts.insert(Source::Input(i), v);
    }
    for id in order {
        let node = &d.nodes()[&id];
        let mut total = vec![0u64; n];
        for k in 0..node.inputs.len() {
            let s = d.source_of(Target::In(id, k)).ok_or(DiagramError::Malformed("unconnected input".into()))?;
            for (t, c) in total.iter_mut().zip(&counts[&s]) {
                *t += c;
            }
        }
        for k in 0..node.outputs.len() {
            counts.insert(Source::Out(id, k), total.clone());
        }
    }
    let m = d.outputs().len();
    let mut data = vec![0; n * m];
    for j in 0..m {
        let s = d.source_of(Target::Output(j)).ok_or(DiagramError::Malformed("unconnected output".into()))?;
        for i in 0..n {
            data[i * m + j] = counts[&s][i];
        }
    }
    Ok(CharacteristicMatrix { rows: n, cols: m, data })
}

/// The canonical normal form of a characteristic matrix: a copy spider per input with
/// one leg per path, a merge spider per output, `χ_ij` parallel wires between them, and
/// one-in one-out spiders drawn as plain wires.
pub fn normal_form_of(chi: &CharacteristicMatrix, sys: &SystemType, frag: &Fragment) -> Diagram {
    let (n, m) = (chi.rows, chi.cols);
    let mut d = Diagram::identity(&[]);
    d.set_boundary(vec![sys.clone(); n], vec![sys.clone(); m]);
    let copies: Vec<Option<NodeId>> = (0..n)
        .map(|i| {
            let r = chi.row_sum(i) as usize;
            (r != 1).then(|| d.add_node(Node::spider(&frag.copy, sys, 1, r, Phase::Zero)))
        })
        .collect();
    let merges: Vec<Option<NodeId>> = (0..m)
        .map(|j| {
            let c = chi.col_sum(j) as usize;
            (c != 1).then(|| d.add_node(Node::spider(&frag.merge, sys, c, 1, Phase::Zero)))
        })
        .collect();
    for (i, c) in copies.iter().enumerate() {
        if let Some(id) = c {
            d.connect(Source::Input(i), Target::In(*id, 0));
        }
    }
    for (j, g) in merges.iter().enumerate() {
        if let Some(id) = g {
            d.connect(Source::Out(*id, 0), Target::Output(j));
        }
    }
    let mut out_leg = vec![0usize; n];
    let mut in_leg = vec![0usize; m];
    for j in 0..m {
        for i in 0..n {
            for _ in 0..chi.get(i, j) {
                let s = match copies[i] {
                    Some(id) => Source::Out(id, out_leg[i]),
                    None => Source::Input(i),
                };
                let t = match merges[j] {
                    Some(id) => Target::In(id, in_leg[j]),
                    None => Target::Output(j),
                };
                out_leg[i] += 1;
                in_leg[j] += 1;
                d.connect(s, t);
            }
        }
    }
    // Copy legs must be ordered by output, which the loop above interleaves by column.
    sort_copy_legs(&d, &copies)
}

fn sort_copy_legs(d: &Diagram, copies: &[Option<NodeId>]) -> Diagram {
    let mut e = d.clone();
    let targets = d.targets();
    for id in copies.iter().flatten() {
        let n = d.nodes()[id].outputs.len();
        let mut ts: Vec<Target> = (0..n).map(|k| targets[&Source::Out(*id, k)]).collect();
        ts.sort_by_key(|t| match t {
            Target::In(g, k) => (1, g.0 as usize, *k),
            Target::Output(j) => (0, *j, 0),
        });
        for (k, t) in ts.into_iter().enumerate() {
            e.connect(Source::Out(*id, k), t);
        }
    }
    e
}

/// Gray-merge feeding white-copy becomes the complete bipartite graph of copies
/// feeding merges: `δ ∘ μ = (μ ⊗ μ)(1 ⊗ σ ⊗ 1)(δ ⊗ δ)` and its unit/counit cases.
pub fn bialgebra_once(d: &Diagram, frag: &Fragment) -> RewriteResult<Option<Diagram>> {
    for (&(g, w), wires) in &internal_edges(d) {
        let (ng, nw) = (&d.nodes()[&g], &d.nodes()[&w]);
        if frag.role(ng).ok() != Some(Role::Merge) || frag.role(nw).ok() != Some(Role::Copy) || wires.len() != 1 {
            continue;
        }
        let Some(sys) = spider_system(ng).or(spider_system(nw)).cloned() else { continue };
        let targets = d.targets();
        let ins: Vec<Source> = (0..ng.inputs.len()).map(|k| d.source_of(Target::In(g, k)).unwrap()).collect();
        let outs: Vec<Target> = (0..nw.outputs.len()).map(|k| targets[&Source::Out(w, k)]).collect();
        let mut e = d.clone();
        e.remove_node(g);
        e.remove_node(w);
        let copies: Vec<NodeId> = ins.iter().map(|_| e.add_node(Node::spider(&frag.copy, &sys, 1, outs.len(), Phase::Zero))).collect();
        let merges: Vec<NodeId> = outs.iter().map(|_| e.add_node(Node::spider(&frag.merge, &sys, ins.len(), 1, Phase::Zero))).collect();
        for (i, s) in ins.iter().enumerate() {
            e.connect(*s, Target::In(copies[i], 0));
            for (j, m) in merges.iter().enumerate() {
                e.connect(Source::Out(copies[i], j), Target::In(*m, i));
            }
        }
        for (j, t) in outs.iter().enumerate() {
            e.connect(Source::Out(merges[j], 0), *t);
        }
        return Ok(Some(e));
    }
    Ok(None)
}

/// Normalises a fragment diagram by bialgebra moves, fusion and identity removal,
/// checking the characteristic matrix after every step. Returns the rewritten
/// diagram and the number of steps.
pub fn bialg_normalize_by_rewriting(d: &Diagram, frag: &Fragment, budget: usize) -> RewriteResult<(Diagram, usize)> {
    let chi = characteristic_matrix(d, frag)?;
    let mut d = remove_identity_spiders(d);
    for step in 0..budget {
        let next = match fuse_once(&d)? {
            Some(x) => Some(x),
            None => bialgebra_once(&d, frag)?,
        };
        let Some(next) = next else { return Ok((d, step)) };
        d = remove_identity_spiders(&next);
        if characteristic_matrix(&d, frag)? != chi {
            return Err(RewriteError::Invariant);
        }
    }
    Err(RewriteError::Budget(budget))
}

/// Bialgebra normal form, a function of the characteristic matrix alone.
pub fn bialg_normal_form(d: &Diagram, frag: &Fragment) -> RewriteResult<Diagram> {
    let chi = characteristic_matrix(d, frag)?;
    let sys = d
        .inputs()
        .first()
        .or(d.outputs().first())
        .or_else(|| d.nodes().values().find_map(spider_system))
        .cloned()
        .unwrap_or_else(|| SystemType::self_dual("X"));
    Ok(normal_form_of(&chi, &sys, frag))
}

/// Collapses a complete bipartite region, copies (one external input each) wired once to
/// every merge (one external output each), into a single merge feeding a single copy.
pub fn collapse_bipartite(d: &Diagram, region: &BTreeSet<NodeId>, frag: &Fragment) -> RewriteResult<Diagram> {
    let mut copies = Vec::new();
    let mut merges = Vec::new();
    for id in region {
        let n = d.node(*id).ok_or_else(|| RewriteError::Region(format!("no node {}", id.0)))?;
        match frag.role(n).map_err(|e| RewriteError::Region(e.to_string()))? {
            Role::Copy => copies.push(*id),
            Role::Merge => merges.push(*id),
        }
    }
    if copies.is_empty() || merges.is_empty() {
        return Err(RewriteError::Region("region needs both colours".into()));
    }
    let edges = internal_edges(d);
    let count = |a: NodeId, b: NodeId| edges.get(&(a, b)).map_or(0, Vec::len);
    for &a in region {
        for &b in region {
            let same = copies.contains(&a) == copies.contains(&b);
            if same && count(a, b) > 0 {
                return Err(RewriteError::Region("region is not bipartite".into()));
            }
            if merges.contains(&a) && copies.contains(&b) && count(a, b) > 0 {
                return Err(RewriteError::Region("edge runs from a merge to a copy".into()));
            }
        }
    }
    let sub: Vec<BTreeSet<NodeId>> = {
        // Connectivity inside the region.
        let mut comps: Vec<BTreeSet<NodeId>> = Vec::new();
        let mut seen = BTreeSet::new();
        for &s in region {
            if !seen.insert(s) {
                continue;
            }
            let mut comp = BTreeSet::from([s]);
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in region {
                    if (count(x, y) > 0 || count(y, x) > 0) && seen.insert(y) {
                        comp.insert(y);
                        queue.push_back(y);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    };
    if sub.len() != 1 {
        return Err(RewriteError::Region("region is not connected".into()));
    }
    for &c in &copies {
        for &m in &merges {
            if count(c, m) != 1 {
                return Err(RewriteError::Region("region is not complete bipartite with single edges".into()));
            }
        }
    }
    let targets = d.targets();
    let mut ins = Vec::new();
    for &c in &copies {
        let s = d.source_of(Target::In(c, 0)).unwrap();
        if matches!(s, Source::Out(n, _) if region.contains(&n)) {
            return Err(RewriteError::Region("copy fed from inside the region".into()));
        }
        if d.nodes()[&c].outputs.len() != merges.len() {
            return Err(RewriteError::Region("copy has legs leaving the region".into()));
        }
        ins.push(s);
    }
    let mut outs = Vec::new();
    for &m in &merges {
        if d.nodes()[&m].inputs.len() != copies.len() {
            return Err(RewriteError::Region("merge has legs entering from outside the region".into()));
        }
        outs.push(targets[&Source::Out(m, 0)]);
    }
    let sys = spider_system(&d.nodes()[&copies[0]]).unwrap().clone();
    let mut e = d.clone();
    for id in region {
        e.remove_node(*id);
    }
    let g = e.add_node(Node::spider(&frag.merge, &sys, ins.len(), 1, Phase::Zero));
    let w = e.add_node(Node::spider(&frag.copy, &sys, 1, outs.len(), Phase::Zero));
    for (k, s) in ins.into_iter().enumerate() {
        e.connect(s, Target::In(g, k));
    }
    e.connect(Source::Out(g, 0), Target::In(w, 0));
    for (k, t) in outs.into_iter().enumerate() {
        e.connect(Source::Out(w, k), t);
    }
    e.validate()?;
    Ok(e)
}

/// Removes `k` parallel wires from a `copy`-coloured spider into a `merge`-coloured
/// spider, the first such pair found. Holds up to a scalar for strongly complementary
/// pairs whose gray classical points have exponent dividing `k` and a trivial antipode.
pub fn hopf_once(d: &Diagram, copy: &str, merge: &str, k: usize) -> Option<Diagram> {
    for (&(a, b), wires) in &internal_edges(d) {
        let (na, nb) = (&d.nodes()[&a], &d.nodes()[&b]);
        if !na.is_spider_of(copy) || !nb.is_spider_of(merge) || wires.len() < k || k == 0 {
            continue;
        }
        let drop: BTreeSet<(usize, usize)> = wires.iter().take(k).copied().collect();
        let targets = d.targets();
        let a_outs: Vec<Target> = (0..na.outputs.len()).filter(|o| !drop.iter().any(|(x, _)| x == o)).map(|o| targets[&Source::Out(a, o)]).collect();
        let b_ins: Vec<Source> = (0..nb.inputs.len()).filter(|i| !drop.iter().any(|(_, y)| y == i)).map(|i| d.source_of(Target::In(b, i)).unwrap()).collect();
        let a_ins: Vec<Source> = (0..na.inputs.len()).map(|i| d.source_of(Target::In(a, i)).unwrap()).collect();
        let b_outs: Vec<Target> = (0..nb.outputs.len()).map(|o| targets[&Source::Out(b, o)]).collect();
        let mut e = d.clone();
        e.remove_node(a);
        e.remove_node(b);
        let sys = spider_system(na).unwrap().clone();
        let na2 = e.add_node(Node::spider(copy, &sys, a_ins.len(), a_outs.len(), na.spider_phase().unwrap().clone()));
        let nb2 = e.add_node(Node::spider(merge, &sys, b_ins.len(), b_outs.len(), nb.spider_phase().unwrap().clone()));
        let remap_s = |s: Source| match s {
            Source::Out(n, o) if n == a => {
                let pos = (0..na.outputs.len()).filter(|x| !drop.iter().any(|(y, _)| y == x)).position(|x| x == o).unwrap();
                Source::Out(na2, pos)
            }
            s => s,
        };
        let remap_t = |t: Target| match t {
            Target::In(n, i) if n == b => {
                let pos = (0..nb.inputs.len()).filter(|x| !drop.iter().any(|(_, y)| y == x)).position(|x| x == i).unwrap();
                Target::In(nb2, pos)
            }
            t => t,
        };
        for (i, s) in a_ins.into_iter().enumerate() {
            e.connect(s, Target::In(na2, i));
        }
        for (o, t) in a_outs.into_iter().enumerate() {
            e.connect(Source::Out(na2, o), remap_t(t));
        }
        for (i, s) in b_ins.into_iter().enumerate() {
            e.connect(remap_s(s), Target::In(nb2, i));
        }
        for (o, t) in b_outs.into_iter().enumerate() {
            e.connect(Source::Out(nb2, o), t);
        }
        return Some(e);
    }
    None
}

/// Rules of the Boolean-circuit theory: distributivity of `and` over `or` (with `x`
/// fanned out) and the De Morgan law for `not (x and y)`.
pub fn boolcirc_rules(sig: &Signature) -> Vec<Rule> {
    vec![distributivity(sig), de_morgan(sig)]
}

fn b(sig: &Signature, n: usize) -> Diagram {
    sig.identity("b", n)
}

/// `and(x, or(y, z)) = or(and(x, y), and(x, z))`.
pub fn distributivity(sig: &Signature) -> Rule {
    let lhs = b(sig, 1).tensor(&sig.gen("or")).compose(&sig.gen("and")).unwrap();
    let fan_x = sig.gen("fan").tensor(&b(sig, 2));
    let shuffle = Diagram::permutation(&vec![sig.ty("b").unwrap(); 4], &[0, 2, 1, 3]).unwrap();
    let rhs = fan_x.compose(&shuffle).unwrap().compose(&sig.gen("and").tensor(&sig.gen("and"))).unwrap().compose(&sig.gen("or")).unwrap();
    Rule::new("distributivity", lhs, rhs, false).unwrap()
}

/// `not(and(x, y)) = or(not x, not y)`.
pub fn de_morgan(sig: &Signature) -> Rule {
    let lhs = sig.gen("and").compose(&sig.gen("not")).unwrap();
    let rhs = sig.gen("not").tensor(&sig.gen("not")).compose(&sig.gen("or")).unwrap();
    Rule::new("de-morgan", lhs, rhs, false).unwrap()
}

/// `(x ∧ ¬y) ∨ ¬(y ∧ z)` on inputs `x, y, z`, with `y` fanned out.
pub fn example_circuit(sig: &Signature) -> Diagram {
    let fan_y = b(sig, 1).tensor(&sig.gen("fan")).tensor(&b(sig, 1));
    let left = b(sig, 1).tensor(&sig.gen("not")).compose(&sig.gen("and")).unwrap();
    let right = sig.gen("and").compose(&sig.gen("not")).unwrap();
    fan_y.compose(&left.tensor(&right)).unwrap().compose(&sig.gen("or")).unwrap()
}

/// The three stages `x ∧ ¬(y ∧ z)`, `x ∧ (¬y ∨ ¬z)`, `(x ∧ ¬y) ∨ (x ∧ ¬z)` of a
/// disjunctive-normal-form derivation.
pub fn dnf_sequence(sig: &Signature) -> [Diagram; 3] {
    let id = b(sig, 1);
    let first = id.tensor(&sig.gen("and").compose(&sig.gen("not")).unwrap()).compose(&sig.gen("and")).unwrap();
    let nots = sig.gen("not").tensor(&sig.gen("not")).compose(&sig.gen("or")).unwrap();
    let second = id.tensor(&nots).compose(&sig.gen("and")).unwrap();
    let fan_x = sig.gen("fan").tensor(&b(sig, 2));
    let shuffle = Diagram::permutation(&vec![sig.ty("b").unwrap(); 4], &[0, 2, 1, 3]).unwrap();
    let ands = sig.gen("and").tensor(&sig.gen("and"));
    let negate = b(sig, 2).tensor(&sig.gen("not").tensor(&sig.gen("not")));
    let third = fan_x.compose(&negate).unwrap().compose(&shuffle).unwrap().compose(&ands).unwrap().compose(&sig.gen("or")).unwrap();
    [first, second, third]
}

/// Built-in rule by name, for the `boolcirc` theory.
pub fn builtin_rule(name: &str, sig: &Signature) -> Option<Rule> {
    match name {
        "distributivity" => Some(distributivity(sig)),
        "de-morgan" | "demorgan" => Some(de_morgan(sig)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fixtures::{bool_b, qubit};
    use crate::models::{compare, EqualityMode, Matrix};
    use crate::signatures::{bialg, boolcirc, qucirc};

    fn close_up_to_scalar(a: &Matrix<num_complex::Complex64>, b: &Matrix<num_complex::Complex64>) -> bool {
        compare(a, b, EqualityMode::UpToScalar(1e-9)).equal
    }

    #[test]
    fn and_pattern_matches_twice() {
        let sig = boolcirc();
        let host = example_circuit(&sig);
        assert_eq!(find_matchings(&sig.gen("and"), &host).len(), 2);
        assert_eq!(find_matchings(&sig.gen("or"), &host).len(), 1);
        assert!(find_matchings(&sig.gen("fan").compose(&sig.gen("or")).unwrap(), &host).is_empty());
    }

    #[test]
    fn pattern_equal_to_host_matches() {
        let sig = boolcirc();
        let host = example_circuit(&sig);
        let ms = find_matchings(&host, &host);
        assert!(!ms.is_empty());
        let rule = Rule::new("id", host.clone(), host.clone(), false).unwrap();
        let out = apply_rule(&rule, &host, &ms[0]).unwrap();
        assert!(out.iso_equal(&host));
    }

    #[test]
    fn dnf_steps() {
        let sig = boolcirc();
        let [a, b, c] = dnf_sequence(&sig);
        let dm = de_morgan(&sig);
        let m = rule_matchings(&dm, &a);
        assert_eq!(m.len(), 1);
        let a2 = apply_rule(&dm, &a, &m[0]).unwrap();
        assert!(a2.iso_equal(&b));
        let dist = distributivity(&sig);
        let m = rule_matchings(&dist, &b);
        assert_eq!(m.len(), 1);
        let b2 = apply_rule(&dist, &b, &m[0]).unwrap();
        assert!(b2.iso_equal(&c), "{}", crate::diagram::text::print_diagram(&b2, "boolcirc"));
        let model = bool_b();
        let ev = |d: &Diagram| model.interpret(d).unwrap();
        assert_eq!(ev(&a), ev(&b));
        assert_eq!(ev(&b), ev(&c));
    }

    #[test]
    fn stale_matching_is_rejected() {
        let sig = boolcirc();
        let host = example_circuit(&sig);
        let dm = de_morgan(&sig);
        let ms = rule_matchings(&dm, &host);
        let once = apply_rule(&dm, &host, &ms[0]).unwrap();
        assert_eq!(apply_rule(&dm, &once, &ms[0]), Err(RewriteError::StaleMatching));
    }

    #[test]
    fn fixpoint_pushes_negations() {
        let sig = boolcirc();
        let run = rewrite_to_fixpoint(&[de_morgan(&sig)], &example_circuit(&sig), DEFAULT_BUDGET).unwrap();
        assert!(run.normal);
        assert_eq!(run.steps, 1);
        let model = bool_b();
        assert_eq!(model.interpret(&run.result).unwrap(), model.interpret(&example_circuit(&sig)).unwrap());
    }

    #[test]
    fn derive_equal_both_directions() {
        let sig = boolcirc();
        let [a, b, c] = dnf_sequence(&sig);
        let rules = boolcirc_rules(&sig);
        assert_eq!(derive_equal(&a, &c, &rules, 200), Some(2));
        assert_eq!(derive_equal(&c, &b, &rules, 200), Some(1));
    }

    #[test]
    fn frame_wires_are_stripped() {
        let sig = boolcirc();
        let lhs = b(&sig, 1).tensor(&sig.gen("not"));
        let rhs = b(&sig, 1).tensor(&sig.gen("not"));
        let r = Rule::new("framed", lhs, rhs, false).unwrap();
        assert_eq!(r.lhs.inputs().len(), 1);
        let bad = Rule::new("bad", b(&sig, 1).tensor(&sig.gen("not")), sig.gen("not").tensor(&b(&sig, 1)), false);
        assert!(bad.is_err());
    }

    #[test]
    fn chain_fuses_with_phase_sum() {
        let sig = qucirc();
        let (a, b2, c) = (0.3, 1.1, -0.4);
        let chain = sig
            .spider("white", 1, 1, Phase::angle(a))
            .compose(&sig.spider("white", 1, 1, Phase::angle(b2)))
            .unwrap()
            .compose(&sig.spider("white", 1, 1, Phase::angle(c)))
            .unwrap();
        let fused = spider_fuse(&chain).unwrap();
        assert_eq!(fused.node_count(), 1);
        let phase = fused.nodes().values().next().unwrap().spider_phase().unwrap().clone();
        assert_eq!(phase, Phase::angle(a + b2 + c));
        let m = qubit();
        assert!(m.interpret(&fused).unwrap().max_abs_diff(&m.interpret(&chain).unwrap()) < 1e-12);
    }

    #[test]
    fn alternating_chain_is_unchanged() {
        let sig = qucirc();
        let z = sig.spider("white", 1, 1, Phase::angle(0.2));
        let x = sig.spider("gray", 1, 1, Phase::angle(0.5));
        let chain = z.compose(&x).unwrap().compose(&z).unwrap();
        assert_eq!(spider_fuse(&chain).unwrap(), chain);
    }

    #[test]
    fn closed_spider_loop_is_dimension() {
        let sig = qucirc();
        let d = sig.spider("white", 0, 2, Phase::Zero).compose(&sig.spider("white", 2, 0, Phase::Zero)).unwrap();
        let fused = spider_fuse(&d).unwrap();
        assert_eq!(fused.node_count(), 1);
        let m = qubit();
        assert!((m.interpret(&fused).unwrap().get(0, 0).re - 2.0).abs() < 1e-12);
        assert!((m.interpret(&d).unwrap().get(0, 0).re - 2.0).abs() < 1e-12);
    }

    fn frag_sig() -> Signature {
        bialg()
    }

    fn first_example(sig: &Signature) -> [Diagram; 2] {
        let x = sig.ty("X").unwrap();
        let eps = sig.spider("white", 1, 0, Phase::Zero);
        let eta = sig.spider("gray", 0, 1, Phase::Zero);
        let t1 = Diagram::identity(std::slice::from_ref(&x)).tensor(&eps).tensor(&eta).compose(&Diagram::swap(&x, &x)).unwrap();
        let split = sig.spider("white", 1, 2, Phase::Zero);
        let path = split.compose(&eps.tensor(&Diagram::identity(std::slice::from_ref(&x)))).unwrap().compose(&eta.tensor(&Diagram::identity(std::slice::from_ref(&x)))).unwrap().compose(&sig.spider("gray", 2, 1, Phase::Zero)).unwrap();
        let t2 = path.tensor(&eps).tensor(&eta).compose(&Diagram::swap(&x, &x)).unwrap();
        [t1, t2]
    }

    #[test]
    fn characteristic_examples() {
        let sig = frag_sig();
        let frag = Fragment::default();
        let want = CharacteristicMatrix::from_rows(&[vec![0, 1], vec![0, 0]]);
        let [t1, t2] = first_example(&sig);
        assert_eq!(characteristic_matrix(&t1, &frag).unwrap(), want);
        assert_eq!(characteristic_matrix(&t2, &frag).unwrap(), want);
        assert_eq!(bialg_normal_form(&t1, &frag).unwrap(), bialg_normal_form(&t2, &frag).unwrap());
        let x = sig.ty("X").unwrap();
        let id2 = Diagram::identity(&[x.clone(), x.clone()]);
        assert_eq!(characteristic_matrix(&id2, &frag).unwrap(), CharacteristicMatrix::from_rows(&[vec![1, 0], vec![0, 1]]));
        let collapsed = sig.spider("gray", 3, 1, Phase::Zero).compose(&sig.spider("white", 1, 2, Phase::Zero)).unwrap();
        let ones = CharacteristicMatrix::from_rows(&[vec![1, 1], vec![1, 1], vec![1, 1]]);
        assert_eq!(characteristic_matrix(&collapsed, &frag).unwrap(), ones);
        let nf = bialg_normal_form(&collapsed, &frag).unwrap();
        assert_eq!(characteristic_matrix(&nf, &frag).unwrap(), ones);
        assert_eq!(nf.node_count(), 5);
    }

    #[test]
    fn normal_form_reads_off_matrix() {
        let rows = vec![vec![1, 0, 0], vec![0, 0, 0], vec![1, 2, 0], vec![0, 0, 1], vec![0, 0, 3]];
        let chi = CharacteristicMatrix::from_rows(&rows);
        let frag = Fragment::default();
        let nf = normal_form_of(&chi, &SystemType::self_dual("X"), &frag);
        nf.validate().unwrap();
        assert_eq!(characteristic_matrix(&nf, &frag).unwrap(), chi);
        assert_eq!(bialg_normal_form(&nf, &frag).unwrap(), nf);
    }

    #[test]
    fn rewriting_reaches_normal_form() {
        let sig = frag_sig();
        let frag = Fragment::default();
        let collapsed = sig.spider("gray", 3, 1, Phase::Zero).compose(&sig.spider("white", 1, 2, Phase::Zero)).unwrap();
        let (r, steps) = bialg_normalize_by_rewriting(&collapsed, &frag, DEFAULT_BUDGET).unwrap();
        assert!(steps >= 1);
        assert!(r.iso_equal(&bialg_normal_form(&collapsed, &frag).unwrap()));
        for t in first_example(&sig) {
            let (r, _) = bialg_normalize_by_rewriting(&t, &frag, DEFAULT_BUDGET).unwrap();
            assert!(r.iso_equal(&bialg_normal_form(&t, &frag).unwrap()));
        }
    }

    #[test]
    fn foreign_generators_are_rejected() {
        let sig = qucirc();
        let d = sig.spider("white", 1, 1, Phase::angle(0.1));
        assert!(matches!(characteristic_matrix(&d, &Fragment::default()), Err(RewriteError::UnsupportedFragment(_))));
        let g = sig.spider("gray", 1, 2, Phase::Zero);
        assert!(characteristic_matrix(&g, &Fragment::default()).is_err());
    }

    #[test]
    fn collapse_k22_and_errors() {
        let sig = qucirc();
        let q = sig.ty("Q").unwrap();
        let whites = sig.spider("white", 1, 2, Phase::Zero).tensor(&sig.spider("white", 1, 2, Phase::Zero));
        let shuffle = Diagram::permutation(&[q.clone(), q.clone(), q.clone(), q.clone()], &[0, 2, 1, 3]).unwrap();
        let grays = sig.spider("gray", 2, 1, Phase::Zero).tensor(&sig.spider("gray", 2, 1, Phase::Zero));
        let k22 = whites.compose(&shuffle).unwrap().compose(&grays).unwrap();
        let region: BTreeSet<NodeId> = k22.nodes().keys().copied().collect();
        let frag = Fragment::default();
        let c = collapse_bipartite(&k22, &region, &frag).unwrap();
        assert_eq!(c.node_count(), 2);
        let m = qubit();
        assert!(close_up_to_scalar(&m.interpret(&c).unwrap(), &m.interpret(&k22).unwrap()));
        let single = sig.spider("gray", 2, 1, Phase::Zero).compose(&sig.spider("white", 1, 2, Phase::Zero)).unwrap();
        let (bi, _) = bialg_normalize_by_rewriting(&single, &frag, 100).unwrap();
        assert!(close_up_to_scalar(&m.interpret(&bi).unwrap(), &m.interpret(&single).unwrap()));
        let two = sig.spider("white", 1, 1, Phase::Zero).compose(&sig.spider("gray", 1, 1, Phase::Zero)).unwrap();
        let apart = two.tensor(&two);
        let region: BTreeSet<NodeId> = apart.nodes().keys().copied().collect();
        assert!(matches!(collapse_bipartite(&apart, &region, &frag), Err(RewriteError::Region(_))));
    }

    #[test]
    fn hopf_removes_wire_pairs() {
        let sig = qucirc();
        let d = sig.spider("white", 1, 2, Phase::Zero).compose(&sig.spider("gray", 2, 1, Phase::Zero)).unwrap();
        let h = hopf_once(&d, "white", "gray", 2).unwrap();
        let m = qubit();
        assert!(close_up_to_scalar(&m.interpret(&h).unwrap(), &m.interpret(&d).unwrap()));
        assert!(hopf_once(&d, "white", "gray", 3).is_none());
    }

    #[test]
    fn spider_aware_rule_absorbs_legs() {
        let sig = qucirc();
        let lhs = sig.spider("white", 1, 2, Phase::Zero).compose(&sig.spider("gray", 2, 1, Phase::Zero)).unwrap();
        let rhs = sig.spider("white", 1, 0, Phase::Zero).tensor(&sig.spider("gray", 0, 1, Phase::Zero));
        let plain = Rule::new("hopf", lhs.clone(), rhs.clone(), false).unwrap();
        let aware = Rule::new("hopf", lhs, rhs, true).unwrap();
        let q = sig.ty("Q").unwrap();
        let host = sig
            .spider("white", 1, 3, Phase::angle(0.4))
            .compose(&sig.spider("gray", 2, 1, Phase::Zero).tensor(&Diagram::identity(&[q])))
            .unwrap();
        assert!(rule_matchings(&plain, &host).is_empty());
        let ms = rule_matchings(&aware, &host);
        assert_eq!(ms.len(), 1);
        let out = apply_rule(&aware, &host, &ms[0]).unwrap();
        let m = qubit();
        assert!(close_up_to_scalar(&m.interpret(&out).unwrap(), &m.interpret(&host).unwrap()));
    }

    #[test]
    fn unfused_phase_evaluates_equal() {
        let sig = qucirc();
        let d = sig.spider("white", 1, 2, Phase::angle(0.7));
        let u = unfuse_phase(&d, *d.nodes().keys().next().unwrap()).unwrap();
        assert_eq!(u.node_count(), 2);
        let m = qubit();
        assert!(m.interpret(&u).unwrap().max_abs_diff(&m.interpret(&d).unwrap()) < 1e-12);
    }
}
