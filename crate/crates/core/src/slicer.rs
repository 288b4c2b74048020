//! Framework-related statements and the primary API usage graph.
//!
//! A statement is framework-related when it instantiates, invokes or
//! accesses a framework type directly, or an application type that inherits
//! from one. The SDG of one entrypoint is then contracted onto those
//! statements: data paths running through other statements become single
//! data edges, and execution order becomes a chain of sequence edges.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::frontend::{CallGraph1Cfa, ContextId, MethodId, NodeId, ProgramIR, Sdg, Statement, StmtId, StmtKind};
use crate::manifest::FrameworkManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiKind {
    Init,
    Invoke,
    FieldAccess,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ApiLabel {
    pub kind: ApiKind,
    /// Framework type the statement targets; for inheritance-mediated
    /// statements, the nearest framework ancestor of the application type.
    pub target: String,
    /// `name/arity` for invocations, `<init>` for instantiations, the field
    /// name for field accesses.
    pub member: String,
    pub direct: bool,
    /// Application type behind an indirect statement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
}

impl ApiLabel {
    pub fn init(target: &str) -> Self {
        ApiLabel { kind: ApiKind::Init, target: target.into(), member: "<init>".into(), direct: true, via: None }
    }

    pub fn invoke(target: &str, member: &str) -> Self {
        ApiLabel { kind: ApiKind::Invoke, target: target.into(), member: member.into(), direct: true, via: None }
    }

    pub fn field(target: &str, field: &str) -> Self {
        ApiLabel { kind: ApiKind::FieldAccess, target: target.into(), member: field.into(), direct: true, via: None }
    }

    /// Identity used for matching: instruction type, target and member.
    /// Whether the match was direct, and through which application type, is
    /// not part of it.
    pub fn sig(&self) -> String {
        let kind = match self.kind {
            ApiKind::Init => "init",
            ApiKind::Invoke => "invoke",
            ApiKind::FieldAccess => "field",
        };
        format!("{kind} {}.{}", self.target, self.member)
    }
}

impl fmt::Display for ApiLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let short = self.target.rsplit('.').next().unwrap_or(&self.target);
        match self.kind {
            ApiKind::Init => write!(f, "init {short}"),
            ApiKind::Invoke => {
                let name = self.member.split('/').next().unwrap_or(&self.member);
                write!(f, "{short}.{name}()")
            }
            ApiKind::FieldAccess => write!(f, "{short}.{}", self.member),
        }
    }
}

/// A framework-related statement under one calling context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrameworkStmt {
    pub ctx: ContextId,
    pub stmt: StmtId,
    pub label: ApiLabel,
}

/// Applies conditions (a)–(f) to a single statement.
pub fn classify(ir: &ProgramIR, s: &Statement, manifest: &FrameworkManifest) -> Option<ApiLabel> {
    let kind = match s.kind {
        StmtKind::ObjectInstantiation => ApiKind::Init,
        StmtKind::MethodInvocation | StmtKind::StaticInvocation => ApiKind::Invoke,
        StmtKind::FieldRead | StmtKind::FieldWrite => ApiKind::FieldAccess,
        _ => return None,
    };
    let ty = s.target_type.as_deref()?;
    let member = match kind {
        ApiKind::Init => "<init>".to_string(),
        _ => s.member.clone()?,
    };
    if manifest.is_framework_type(ty) {
        return Some(ApiLabel { kind, target: ty.to_string(), member, direct: true, via: None });
    }
    ir.type_decl(ty)?;
    let ancestor = ir.ancestors(ty).into_iter().find(|a| manifest.is_framework_type(a))?;
    Some(ApiLabel { kind, target: ancestor, member, direct: false, via: Some(ty.to_string()) })
}

/// Every framework-related statement of the application code, per context.
pub fn identify_framework_statements(
    ir: &ProgramIR,
    cg: &CallGraph1Cfa,
    manifest: &FrameworkManifest,
) -> Vec<FrameworkStmt> {
    let mut out = Vec::new();
    for (i, c) in cg.contexts.iter().enumerate() {
        let m = ir.method(c.method);
        if manifest.is_framework_type(&m.owner) {
            continue;
        }
        for &sid in &m.statements {
            if let Some(label) = classify(ir, ir.stmt(sid), manifest) {
                out.push(FrameworkStmt { ctx: ContextId(i as u32), stmt: sid, label });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaugNodeKind {
    Start,
    End,
    Api,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    pub ctx: ContextId,
    pub stmt: StmtId,
    pub method: String,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaugNode {
    pub id: u32,
    pub kind: PaugNodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<ApiLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Origin>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaugEdgeKind {
    Seq,
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PaugEdge {
    pub from: u32,
    pub to: u32,
    pub kind: PaugEdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
}

/// Primary API usage graph of one entrypoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paug {
    pub unit: String,
    pub entry: String,
    pub nodes: Vec<PaugNode>,
    pub edges: Vec<PaugEdge>,
}

impl Paug {
    pub fn start(&self) -> u32 {
        self.nodes.iter().find(|n| n.kind == PaugNodeKind::Start).map(|n| n.id).expect("start node")
    }

    pub fn api_nodes(&self) -> impl Iterator<Item = &PaugNode> {
        self.nodes.iter().filter(|n| n.kind == PaugNodeKind::Api)
    }

    pub fn node(&self, id: u32) -> &PaugNode {
        self.nodes.iter().find(|n| n.id == id).expect("node id")
    }

    pub fn label(&self, id: u32) -> Option<&ApiLabel> {
        self.node(id).label.as_ref()
    }

    pub fn edges_of(&self, kind: PaugEdgeKind) -> impl Iterator<Item = &PaugEdge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    fn reach(&self, kind: PaugEdgeKind, from: u32, forward: bool) -> BTreeSet<u32> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            for e in self.edges_of(kind) {
                let (a, b) = if forward { (e.from, e.to) } else { (e.to, e.from) };
                if a == n && seen.insert(b) {
                    queue.push_back(b);
                }
            }
        }
        seen
    }

    /// Nodes that come strictly before `id` along sequence edges.
    pub fn seq_ancestors(&self, id: u32) -> BTreeSet<u32> {
        self.reach(PaugEdgeKind::Seq, id, false)
    }

    pub fn data_ancestors(&self, id: u32) -> BTreeSet<u32> {
        self.reach(PaugEdgeKind::Data, id, false)
    }

    /// API nodes in sequence order (a topological order of E_s).
    pub fn seq_order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = self.api_nodes().map(|n| n.id).collect();
        let depth: BTreeMap<u32, usize> = order.iter().map(|&n| (n, self.seq_ancestors(n).len())).collect();
        order.sort_by_key(|n| (depth[n], *n));
        order
    }

    /// Drops an API node, joining its predecessors to its successors so
    /// that both orders and data flow through it are kept.
    pub fn without_node(&self, id: u32) -> Paug {
        let mut edges: BTreeSet<PaugEdge> = BTreeSet::new();
        for kind in [PaugEdgeKind::Seq, PaugEdgeKind::Data] {
            let preds: Vec<&PaugEdge> = self.edges_of(kind).filter(|e| e.to == id).collect();
            let succs: Vec<&PaugEdge> = self.edges_of(kind).filter(|e| e.from == id).collect();
            for e in self.edges_of(kind).filter(|e| e.from != id && e.to != id) {
                edges.insert(e.clone());
            }
            for p in &preds {
                for s in &succs {
                    edges.insert(PaugEdge { from: p.from, to: s.to, kind, via: p.via.clone() });
                }
            }
        }
        let mut out = Paug {
            unit: self.unit.clone(),
            entry: self.entry.clone(),
            nodes: self.nodes.iter().filter(|n| n.id != id).cloned().collect(),
            edges: edges.into_iter().collect(),
        };
        out.reduce_seq();
        out
    }

    fn reduce_seq(&mut self) {
        let seq: Vec<(u32, u32)> = self.edges_of(PaugEdgeKind::Seq).map(|e| (e.from, e.to)).collect();
        let redundant: BTreeSet<(u32, u32)> = seq
            .iter()
            .filter(|(a, b)| {
                seq.iter().any(|(x, y)| *x == *a && *y != *b && self.reach(PaugEdgeKind::Seq, *y, true).contains(b))
            })
            .copied()
            .collect();
        self.edges
            .retain(|e| e.kind != PaugEdgeKind::Seq || !redundant.contains(&(e.from, e.to)));
    }
}

/// Contracts the SDG of `entry` onto its framework-related statements.
pub fn slice_and_build_paug(
    ir: &ProgramIR,
    sdg: &Sdg,
    fw: &[FrameworkStmt],
    entry: MethodId,
) -> Result<Paug, Error> {
    let entry_name = ir.method(entry).qualified();
    let trace = sdg.trace(entry).ok_or_else(|| Error::EmptyUsage(entry_name.clone()))?;
    let labels: BTreeMap<NodeId, &ApiLabel> = fw
        .iter()
        .filter_map(|f| sdg.node_id(f.ctx, f.stmt).map(|n| (n, &f.label)))
        .collect();
    let in_trace: BTreeSet<NodeId> = trace.order.iter().copied().collect();
    let api: Vec<NodeId> = trace.order.iter().copied().filter(|n| labels.contains_key(n)).collect();
    if api.is_empty() {
        return Err(Error::EmptyUsage(entry_name));
    }

    let mut succ: BTreeMap<NodeId, Vec<(NodeId, &str)>> = BTreeMap::new();
    for e in sdg.data_edges() {
        if in_trace.contains(&e.from) && in_trace.contains(&e.to) {
            if let crate::frontend::Dependence::Data { via } = &e.dep {
                succ.entry(e.from).or_default().push((e.to, via.as_str()));
            }
        }
    }

    // start = 0, API nodes 1..=n in execution order, end = n + 1
    let pos: BTreeMap<NodeId, u32> = api.iter().enumerate().map(|(i, n)| (*n, i as u32 + 1)).collect();
    let end = api.len() as u32 + 1;
    let mut nodes = vec![PaugNode { id: 0, kind: PaugNodeKind::Start, label: None, origin: None }];
    for &n in &api {
        let sn = sdg.node(n);
        let s = ir.stmt(sn.stmt);
        nodes.push(PaugNode {
            id: pos[&n],
            kind: PaugNodeKind::Api,
            label: Some(labels[&n].clone()),
            origin: Some(Origin {
                ctx: sn.ctx,
                stmt: sn.stmt,
                method: ir.method(s.method).qualified(),
                line: s.line,
                col: s.col,
            }),
        });
    }
    nodes.push(PaugNode { id: end, kind: PaugNodeKind::End, label: None, origin: None });

    let mut edges = BTreeSet::new();
    let chain: Vec<u32> = std::iter::once(0).chain(1..=end).collect();
    for w in chain.windows(2) {
        edges.insert(PaugEdge { from: w[0], to: w[1], kind: PaugEdgeKind::Seq, via: None });
    }
    let mut data: BTreeMap<(u32, u32), String> = BTreeMap::new();
    for &f in &api {
        for (first, via) in succ.get(&f).into_iter().flatten() {
            let mut seen = BTreeSet::from([*first]);
            let mut queue = VecDeque::from([*first]);
            while let Some(n) = queue.pop_front() {
                if let Some(&p) = pos.get(&n) {
                    if n != f {
                        let key = (pos[&f], p);
                        let slot = data.entry(key).or_insert_with(|| via.to_string());
                        if via < &slot.as_str() {
                            *slot = via.to_string();
                        }
                    }
                    continue;
                }
                for (next, _) in succ.get(&n).into_iter().flatten() {
                    if seen.insert(*next) {
                        queue.push_back(*next);
                    }
                }
            }
        }
    }
    for ((from, to), via) in data {
        edges.insert(PaugEdge { from, to, kind: PaugEdgeKind::Data, via: Some(via) });
    }
    Ok(Paug { unit: ir.unit.clone(), entry: entry_name, nodes, edges: edges.into_iter().collect() })
}

/// One PAUG per entrypoint that reaches the framework.
pub fn build_paugs(ir: &ProgramIR, manifest: &FrameworkManifest) -> Vec<Result<Paug, Error>> {
    let cg = crate::frontend::build_call_graph(ir);
    let sdg = crate::frontend::build_sdg(ir, &cg);
    let fw = identify_framework_statements(ir, &cg, manifest);
    ir.entrypoints.iter().map(|&e| slice_and_build_paug(ir, &sdg, &fw, e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{build_call_graph, build_sdg, parse};

    fn jaas() -> FrameworkManifest {
        FrameworkManifest::new("jaas", &["jaas."])
    }

    #[test]
    fn application_only_program_has_no_framework_statements() {
        let ir = parse("class A { static void main() { A a = new A(); } }", "t").unwrap();
        let cg = build_call_graph(&ir);
        assert!(identify_framework_statements(&ir, &cg, &jaas()).is_empty());
        let sdg = build_sdg(&ir, &cg);
        let err = slice_and_build_paug(&ir, &sdg, &[], ir.entrypoints[0]).unwrap_err();
        assert!(matches!(err, Error::EmptyUsage(_)));
    }

    #[test]
    fn inheritance_makes_statements_indirect() {
        let ir = parse(
            "import jaas.CallbackHandler;\nclass H implements CallbackHandler { void handle() { } }\n\
             class M { static void main() { H h = new H(); h.handle(); } }",
            "t",
        )
        .unwrap();
        let cg = build_call_graph(&ir);
        let fw = identify_framework_statements(&ir, &cg, &jaas());
        assert_eq!(fw.len(), 2);
        assert!(fw.iter().all(|f| !f.label.direct && f.label.target == "jaas.CallbackHandler"));
        assert_eq!(fw[0].label.via.as_deref(), Some("H"));
    }

    #[test]
    fn single_statement_gives_start_api_end() {
        let ir = parse("import jaas.Subject;\nclass M { static void main() { Subject s = new Subject(); } }", "t")
            .unwrap();
        let paug = build_paugs(&ir, &jaas()).remove(0).unwrap();
        assert_eq!(paug.nodes.len(), 3);
        assert!(paug.edges.iter().all(|e| e.kind == PaugEdgeKind::Seq));
        assert_eq!(paug.edges.len(), 2);
    }

    #[test]
    fn data_flows_through_non_framework_statements() {
        let ir = parse(
            "import jaas.Subject;\nclass M {\nstatic void main() {\nSubject s = new Subject();\n\
             Subject t = id(s);\nt.getPrincipals();\n}\nstatic Subject id(Subject x) { return x; }\n}",
            "t",
        )
        .unwrap();
        let paug = build_paugs(&ir, &jaas()).remove(0).unwrap();
        let data: Vec<_> = paug.edges_of(PaugEdgeKind::Data).map(|e| (e.from, e.to)).collect();
        assert_eq!(data, vec![(1, 2)]);
    }

    #[test]
    fn removing_a_node_keeps_order() {
        let ir = parse(
            "import jaas.Subject;\nclass M { static void main() { Subject a = new Subject(); \
             Subject b = new Subject(); Subject c = new Subject(); } }",
            "t",
        )
        .unwrap();
        let paug = build_paugs(&ir, &jaas()).remove(0).unwrap();
        let smaller = paug.without_node(2);
        let seq: Vec<_> = smaller.edges_of(PaugEdgeKind::Seq).map(|e| (e.from, e.to)).collect();
        assert_eq!(seq, vec![(0, 1), (1, 3), (3, 4)]);
    }
}
