//! Vertex cover kernelization: singleton, pendant, degree-two (triangle and
//! folding), high-degree and LP reduction rules applied to a fixed point,
//! with exact reconstruction of covers of the original graph.
//!
//! Everything here speaks in vertex *labels*. Vertices created by folding get
//! fresh labels counted upward from one past the largest input label, so a
//! fold trace can be replayed against any cover of the reduced graph.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{Graph, VertexSubset};
use crate::lp::{solve_vc_lp, HalfValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Singleton,
    Pendant,
    DegreeTwo,
    HighDegree,
    Lp,
}

impl Rule {
    /// Per-pass application order.
    pub const ALL: [Rule; 5] = [
        Rule::Singleton,
        Rule::Pendant,
        Rule::DegreeTwo,
        Rule::HighDegree,
        Rule::Lp,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Rule::Singleton => "sr",
            Rule::Pendant => "pr",
            Rule::DegreeTwo => "d2r",
            Rule::HighDegree => "hdr",
            Rule::Lp => "lpr",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Set of enabled rules. Always applied in [`Rule::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct RuleSet {
    bits: u8,
}

impl RuleSet {
    pub const fn all() -> Self {
        Self { bits: 0b11111 }
    }

    pub const fn none() -> Self {
        Self { bits: 0 }
    }

    pub fn with(mut self, rule: Rule) -> Self {
        self.bits |= 1 << rule as u8;
        self
    }

    pub fn without(mut self, rule: Rule) -> Self {
        self.bits &= !(1 << rule as u8);
        self
    }

    pub fn contains(self, rule: Rule) -> bool {
        self.bits >> rule as u8 & 1 == 1
    }

    pub fn iter(self) -> impl Iterator<Item = Rule> {
        Rule::ALL.into_iter().filter(move |&r| self.contains(r))
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::all()
    }
}

impl FromStr for RuleSet {
    type Err = Error;

    /// Comma-separated short names (`sr,pr,d2r,hdr,lpr`), or `all` / `none`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => return Ok(Self::all()),
            "none" | "" => return Ok(Self::none()),
            _ => {}
        }
        let mut set = Self::none();
        for name in s.split(',').map(str::trim) {
            let rule = Rule::ALL
                .into_iter()
                .find(|r| r.short_name() == name)
                .ok_or_else(|| domain(format!("unknown reduction rule '{name}'")))?;
            set = set.with(rule);
        }
        Ok(set)
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::all() {
            return f.write_str("all");
        }
        if *self == Self::none() {
            return f.write_str("none");
        }
        let names: Vec<_> = self.iter().map(Rule::short_name).collect();
        f.write_str(&names.join(","))
    }
}

impl From<RuleSet> for String {
    fn from(r: RuleSet) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for RuleSet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A degree-two vertex `folded` whose non-adjacent neighbours `merged_pair`
/// were contracted into the fresh vertex `merged_into`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub folded: u64,
    pub merged_pair: (u64, u64),
    pub merged_into: u64,
}

/// How often each rule fired, counted in affected vertices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCounts {
    pub singletons_removed: usize,
    pub pendant_covers: usize,
    pub triangle_covers: usize,
    pub folds: usize,
    pub high_degree_covers: usize,
    pub lp_covers: usize,
    pub lp_removed: usize,
    pub passes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelResult {
    /// Labels of the input graph, in its dense order.
    pub original_labels: Vec<u64>,
    /// Residual graph G′. Labels are input labels or fold labels.
    pub reduced: Graph,
    /// Vertices committed to the cover (input or fold labels), in commit order.
    pub v_safe: Vec<u64>,
    pub folds: Vec<FoldRecord>,
    pub rule_counts: RuleCounts,
    /// G′ has no edges.
    pub solved: bool,
}

impl KernelResult {
    /// Cover size of the original graph implied by an optimal cover of G′:
    /// every fold contributes exactly one vertex on replay.
    pub fn committed_size(&self) -> usize {
        self.v_safe.len() + self.folds.len()
    }

    pub fn dump(&self) -> KernelDump {
        KernelDump {
            v_safe: self.v_safe.clone(),
            reduced_vertices: self.reduced.labels().to_vec(),
            reduced_edges: self.reduced.label_edges(),
            folds: self.folds.clone(),
            rule_counts: self.rule_counts,
            solved: self.solved,
        }
    }
}

/// JSON-serializable audit record of a kernelization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDump {
    pub v_safe: Vec<u64>,
    pub reduced_vertices: Vec<u64>,
    pub reduced_edges: Vec<(u64, u64)>,
    pub folds: Vec<FoldRecord>,
    pub rule_counts: RuleCounts,
    pub solved: bool,
}

/// Mutable adjacency over internal ids; ids index `labels`.
#[derive(Debug, Clone)]
struct Working {
    adj: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
    labels: Vec<u64>,
    next_label: u64,
    /// Vertices whose degree changed since the last drain.
    touched: BTreeSet<usize>,
}

impl Working {
    fn from_graph(g: &Graph, next_label: u64) -> Self {
        let n = g.num_vertices();
        Self {
            adj: (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect(),
            alive: vec![true; n],
            labels: g.labels().to_vec(),
            next_label,
            touched: BTreeSet::new(),
        }
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn alive_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.adj.len()).filter(|&v| self.alive[v])
    }

    fn num_edges(&self) -> usize {
        self.alive_ids().map(|v| self.degree(v)).sum::<usize>() / 2
    }

    fn remove(&mut self, v: usize) {
        debug_assert!(self.alive[v]);
        let nbrs = std::mem::take(&mut self.adj[v]);
        for w in nbrs {
            self.adj[w].remove(&v);
            self.touched.insert(w);
        }
        self.alive[v] = false;
    }

    fn add_vertex(&mut self, nbrs: BTreeSet<usize>) -> usize {
        let id = self.adj.len();
        for &w in &nbrs {
            self.adj[w].insert(id);
            self.touched.insert(w);
        }
        self.adj.push(nbrs);
        self.alive.push(true);
        self.labels.push(self.next_label);
        self.next_label += 1;
        self.touched.insert(id);
        id
    }

    fn to_graph(&self) -> Graph {
        let ids: Vec<usize> = self.alive_ids().collect();
        let mut pos = HashMap::with_capacity(ids.len());
        for (i, &v) in ids.iter().enumerate() {
            pos.insert(v, i);
        }
        let labels = ids.iter().map(|&v| self.labels[v]).collect();
        let edges = ids.iter().enumerate().flat_map(|(i, &v)| {
            let pos = &pos;
            self.adj[v]
                .iter()
                .map(move |w| (i, pos[w]))
                .filter(|&(a, b)| a < b)
        });
        Graph::with_labels(labels, edges).expect("working graph is simple")
    }
}

/// Reduction state: the working graph plus everything needed to undo it.
#[derive(Debug, Clone)]
struct Reducer {
    w: Working,
    cover: Vec<usize>,
    folds: Vec<FoldRecord>,
    counts: RuleCounts,
}

impl Reducer {
    fn new(g: &Graph) -> Self {
        let next = g.labels().iter().max().map_or(0, |&m| m + 1);
        Self {
            w: Working::from_graph(g, next),
            cover: Vec::new(),
            folds: Vec::new(),
            counts: RuleCounts::default(),
        }
    }

    fn commit(&mut self, v: usize) {
        self.cover.push(v);
        self.w.remove(v);
    }

    /// Repeatedly handles the smallest-id live vertex of degree `deg` until
    /// none is left.
    fn exhaust(&mut self, deg: usize, mut handle: impl FnMut(&mut Self, usize)) -> bool {
        let mut pending: BTreeSet<usize> = self.w.alive_ids().collect();
        self.w.touched.clear();
        let mut changed = false;
        while let Some(v) = pending.pop_first() {
            if self.w.alive[v] && self.w.degree(v) == deg {
                handle(self, v);
                changed = true;
            }
            pending.extend(std::mem::take(&mut self.w.touched));
        }
        changed
    }

    fn singleton(&mut self) -> bool {
        self.exhaust(0, |r, v| {
            r.w.remove(v);
            r.counts.singletons_removed += 1;
        })
    }

    fn pendant(&mut self) -> bool {
        self.exhaust(1, |r, u| {
            let w = *r.w.adj[u].first().expect("degree one");
            r.commit(w);
            r.w.remove(u);
            r.counts.pendant_covers += 1;
        })
    }

    fn degree_two(&mut self) -> bool {
        self.exhaust(2, |r, u| {
            let mut it = r.w.adj[u].iter().copied();
            let (v, w) = (it.next().unwrap(), it.next().unwrap());
            if r.w.adj[v].contains(&w) {
                r.commit(v);
                r.commit(w);
                r.w.remove(u);
                r.counts.triangle_covers += 1;
            } else {
                let mut merged: BTreeSet<usize> = r.w.adj[v].union(&r.w.adj[w]).copied().collect();
                merged.remove(&u);
                r.w.remove(u);
                r.w.remove(v);
                r.w.remove(w);
                let x = r.w.add_vertex(merged);
                r.folds.push(FoldRecord {
                    folded: r.w.labels[u],
                    merged_pair: (r.w.labels[v], r.w.labels[w]),
                    merged_into: r.w.labels[x],
                });
                r.counts.folds += 1;
            }
        })
    }

    fn high_degree(&mut self) -> bool {
        let g = self.w.to_graph();
        if g.num_edges() == 0 {
            return false;
        }
        let (k_ub, _) = greedy_upper_bound(&g);
        let heavy: Vec<usize> = self.w.alive_ids().filter(|&v| self.w.degree(v) > k_ub).collect();
        for &v in &heavy {
            self.commit(v);
        }
        self.counts.high_degree_covers += heavy.len();
        !heavy.is_empty()
    }

    fn lp(&mut self) -> bool {
        let ids: Vec<usize> = self.w.alive_ids().collect();
        let g = self.w.to_graph();
        let lp = solve_vc_lp(&g);
        let mut changed = false;
        for (i, &v) in ids.iter().enumerate() {
            if lp.values[i] == HalfValue::One {
                self.commit(v);
                self.counts.lp_covers += 1;
                changed = true;
            }
        }
        for (i, &v) in ids.iter().enumerate() {
            if lp.values[i] == HalfValue::Zero {
                self.w.remove(v);
                self.counts.lp_removed += 1;
                changed = true;
            }
        }
        changed
    }

    fn apply(&mut self, rule: Rule) -> bool {
        match rule {
            Rule::Singleton => self.singleton(),
            Rule::Pendant => self.pendant(),
            Rule::DegreeTwo => self.degree_two(),
            Rule::HighDegree => self.high_degree(),
            Rule::Lp => self.lp(),
        }
    }

    fn cover_labels(&self) -> Vec<u64> {
        self.cover.iter().map(|&v| self.w.labels[v]).collect()
    }
}

/// Replays folds in reverse over a label set: a merged vertex in the set is
/// replaced by both merged neighbours, otherwise the folded vertex joins.
fn unfold(mut set: BTreeSet<u64>, folds: &[FoldRecord]) -> BTreeSet<u64> {
    for f in folds.iter().rev() {
        if set.remove(&f.merged_into) {
            set.insert(f.merged_pair.0);
            set.insert(f.merged_pair.1);
        } else {
            set.insert(f.folded);
        }
    }
    set
}

fn labels_to_subset(g: &Graph, labels: impl IntoIterator<Item = u64>) -> VertexSubset {
    let index: HashMap<u64, usize> = g.labels().iter().enumerate().map(|(i, &l)| (l, i)).collect();
    VertexSubset::from_members(
        g.num_vertices(),
        labels
            .into_iter()
            .map(|l| *index.get(&l).expect("label belongs to the input graph")),
    )
    .expect("indices come from the graph")
}

/// Removes every degree-0 vertex. Returns the residual graph and the removed
/// labels.
pub fn rule_singleton(g: &Graph) -> (Graph, Vec<u64>) {
    let mut r = Reducer::new(g);
    let before: BTreeSet<u64> = g.labels().iter().copied().collect();
    r.singleton();
    let out = r.w.to_graph();
    let kept: BTreeSet<u64> = out.labels().iter().copied().collect();
    (out, before.difference(&kept).copied().collect())
}

/// Exhausts the pendant rule. Returns the residual graph and the labels put
/// into the cover.
pub fn rule_pendant(g: &Graph) -> (Graph, Vec<u64>) {
    let mut r = Reducer::new(g);
    r.pendant();
    (r.w.to_graph(), r.cover_labels())
}

/// Exhausts the degree-two rule (triangle covering and folding).
pub fn rule_degree2(g: &Graph) -> (Graph, Vec<u64>, Vec<FoldRecord>) {
    let mut r = Reducer::new(g);
    r.degree_two();
    let cover = r.cover_labels();
    (r.w.to_graph(), cover, r.folds)
}

/// Greedy cover: between picks of a maximum-degree vertex (ties to the
/// smallest label), singleton, pendant and degree-two rules are exhausted.
/// Returns the cover size and the cover itself.
pub fn greedy_upper_bound(g: &Graph) -> (usize, VertexSubset) {
    let mut r = Reducer::new(g);
    loop {
        r.singleton();
        r.pendant();
        r.degree_two();
        if r.w.num_edges() == 0 {
            break;
        }
        let pick = r
            .w
            .alive_ids()
            .max_by(|&a, &b| {
                r.w.degree(a)
                    .cmp(&r.w.degree(b))
                    .then(r.w.labels[b].cmp(&r.w.labels[a]))
            })
            .expect("graph has edges");
        r.commit(pick);
    }
    let set = unfold(r.cover_labels().into_iter().collect(), &r.folds);
    let cover = labels_to_subset(g, set);
    (cover.len(), cover)
}

/// Moves every vertex of degree greater than `k_ub` into the cover. `k_ub`
/// must be the size of some vertex cover of `g`.
pub fn rule_high_degree(g: &Graph, k_ub: usize) -> (Graph, Vec<u64>) {
    let mut r = Reducer::new(g);
    let heavy: Vec<usize> = r.w.alive_ids().filter(|&v| r.w.degree(v) > k_ub).collect();
    for v in heavy {
        r.commit(v);
    }
    (r.w.to_graph(), r.cover_labels())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpReduction {
    pub reduced: Graph,
    pub into_cover: Vec<u64>,
    pub removed: Vec<u64>,
}

/// LP reduction: vertices at 1 join the cover, vertices at 0 are dropped, and
/// the graph induced on the half vertices remains.
pub fn rule_lp(g: &Graph) -> LpReduction {
    let lp = solve_vc_lp(g);
    let pick = |t| lp.with_value(t).into_iter().map(|v| g.label(v)).collect();
    LpReduction {
        reduced: g.induced_subgraph(&lp.with_value(HalfValue::Half)),
        into_cover: pick(HalfValue::One),
        removed: pick(HalfValue::Zero),
    }
}

/// Applies the enabled rules in passes (singleton, pendant, degree-two,
/// high-degree, LP) until a whole pass changes nothing.
pub fn reduce(g: &Graph, rules: RuleSet) -> KernelResult {
    let mut r = Reducer::new(g);
    loop {
        r.counts.passes += 1;
        let mut changed = false;
        for rule in rules.iter() {
            changed |= r.apply(rule);
        }
        if !changed {
            break;
        }
    }
    let reduced = r.w.to_graph();
    KernelResult {
        original_labels: g.labels().to_vec(),
        solved: reduced.num_edges() == 0,
        v_safe: r.cover_labels(),
        folds: r.folds,
        rule_counts: r.counts,
        reduced,
    }
}

/// Lifts a vertex cover of the reduced graph to a vertex cover of the graph
/// the kernel was computed from.
pub fn reconstruct(
    kernel: &KernelResult,
    original: &Graph,
    cover_on_reduced: &VertexSubset,
) -> Result<VertexSubset> {
    if original.labels() != kernel.original_labels.as_slice() {
        return Err(domain("graph does not match the kernel's input"));
    }
    if !kernel.reduced.is_vertex_cover(cover_on_reduced)? {
        return Err(domain("input is not a vertex cover of the reduced graph"));
    }
    let mut set: BTreeSet<u64> = kernel.v_safe.iter().copied().collect();
    set.extend(cover_on_reduced.iter().map(|v| kernel.reduced.label(v)));
    Ok(labels_to_subset(original, unfold(set, &kernel.folds)))
}
