use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::callgraph::{CallGraph1Cfa, ContextId};
use super::ir::{MethodId, ProgramIR, StmtId, StmtKind};
use super::reaching::{reaching_definitions, ReachingDefs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SdgNode {
    pub ctx: ContextId,
    pub stmt: StmtId,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "dep", rename_all = "snake_case")]
pub enum Dependence {
    /// Flow of a local, a parameter, a return value or a field.
    Data { via: String },
    Control,
}

impl Dependence {
    pub fn is_data(&self) -> bool {
        matches!(self, Dependence::Data { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SdgEdge {
    pub from: NodeId,
    pub to: NodeId,
    #[serde(flatten)]
    pub dep: Dependence,
}

/// Execution order of the nodes reachable from one entrypoint. A callee's
/// body is listed before the call-site node that receives its result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryTrace {
    pub entry: MethodId,
    pub order: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sdg {
    pub nodes: Vec<SdgNode>,
    pub edges: Vec<SdgEdge>,
    pub traces: Vec<EntryTrace>,
}

impl Sdg {
    pub fn node(&self, id: NodeId) -> SdgNode {
        self.nodes[id.0 as usize]
    }

    pub fn node_id(&self, ctx: ContextId, stmt: StmtId) -> Option<NodeId> {
        self.nodes
            .binary_search(&SdgNode { ctx, stmt })
            .ok()
            .map(|i| NodeId(i as u32))
    }

    pub fn trace(&self, entry: MethodId) -> Option<&EntryTrace> {
        self.traces.iter().find(|t| t.entry == entry)
    }

    pub fn data_edges(&self) -> impl Iterator<Item = &SdgEdge> {
        self.edges.iter().filter(|e| e.dep.is_data())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("SDG serializes")
    }
}

struct Builder<'a> {
    ir: &'a ProgramIR,
    cg: &'a CallGraph1Cfa,
    nodes: Vec<SdgNode>,
    index: BTreeMap<SdgNode, NodeId>,
    edges: BTreeSet<SdgEdge>,
    rd: BTreeMap<MethodId, ReachingDefs>,
}

impl<'a> Builder<'a> {
    fn id(&self, ctx: ContextId, stmt: StmtId) -> NodeId {
        self.index[&SdgNode { ctx, stmt }]
    }

    fn data(&mut self, from: NodeId, to: NodeId, via: &str) {
        self.edges.insert(SdgEdge { from, to, dep: Dependence::Data { via: via.to_string() } });
    }

    fn method_edges(&mut self, ctx: ContextId) {
        let ir = self.ir;
        let method = ir.method(self.cg.context(ctx).method);
        let rd = self.rd.entry(method.id).or_insert_with(|| reaching_definitions(ir, method.id)).clone();
        for &sid in &method.statements {
            let s = ir.stmt(sid);
            let to = self.id(ctx, sid);
            let callees = if s.is_call() { self.cg.callees(ctx, sid) } else { Vec::new() };
            let passed: BTreeSet<&str> = if callees.is_empty() {
                BTreeSet::new()
            } else {
                s.receiver.iter().chain(s.args.iter().flatten()).map(String::as_str).collect()
            };
            for u in &s.uses {
                if passed.contains(u.as_str()) {
                    continue;
                }
                for d in rd.defs_for(sid, u) {
                    let from = self.id(ctx, d);
                    self.data(from, to, u);
                }
            }
            for callee in callees {
                self.link_call(ctx, sid, callee, &rd);
            }
            if let Some(h) = s.control {
                let from = self.id(ctx, h);
                self.edges.insert(SdgEdge { from, to, dep: Dependence::Control });
            }
        }
    }

    fn link_call(&mut self, ctx: ContextId, site: StmtId, callee: ContextId, rd: &ReachingDefs) {
        let ir = self.ir;
        let s = ir.stmt(site);
        let m = ir.method(self.cg.context(callee).method);
        let mut actuals: Vec<Option<&String>> = Vec::new();
        if !m.is_static {
            actuals.push(if m.is_constructor { None } else { s.receiver.as_ref() });
        }
        actuals.extend(s.args.iter().map(Option::as_ref));
        for (&formal, actual) in m.formals.iter().zip(actuals) {
            let Some(var) = actual else { continue };
            let to = self.id(callee, formal);
            for d in rd.defs_for(site, var) {
                let from = self.id(ctx, d);
                self.data(from, to, var);
            }
        }
        if s.def.is_some() {
            let to = self.id(ctx, site);
            for &r in &m.statements {
                let rs = ir.stmt(r);
                if rs.kind == StmtKind::Return && !rs.uses.is_empty() {
                    let from = self.id(callee, r);
                    self.data(from, to, "return");
                }
            }
        }
    }

    fn walk(&self, ctx: ContextId, stack: &mut Vec<ContextId>, seen: &mut BTreeSet<NodeId>, out: &mut Vec<NodeId>) {
        stack.push(ctx);
        let method = self.ir.method(self.cg.context(ctx).method);
        for &sid in &method.statements {
            if self.ir.stmt(sid).is_call() {
                for callee in self.cg.callees(ctx, sid) {
                    if !stack.contains(&callee) {
                        self.walk(callee, stack, seen, out);
                    }
                }
            }
            let n = self.id(ctx, sid);
            if seen.insert(n) {
                out.push(n);
            }
        }
        stack.pop();
    }

    /// Field write → field read on the same field of related types, when the
    /// write comes first in some entry trace.
    fn heap_edges(&mut self, traces: &[EntryTrace]) {
        let ir = self.ir;
        for t in traces {
            let mut writes: Vec<(NodeId, &str, &str)> = Vec::new();
            for &n in &t.order {
                let s = ir.stmt(self.nodes[n.0 as usize].stmt);
                let (Some(ty), Some(field)) = (s.target_type.as_deref(), s.member.as_deref()) else {
                    continue;
                };
                match s.kind {
                    StmtKind::FieldWrite => writes.push((n, ty, field)),
                    StmtKind::FieldRead => {
                        let hits: Vec<NodeId> = writes
                            .iter()
                            .filter(|(_, wt, wf)| {
                                *wf == field && (ir.is_subtype(wt, ty) || ir.is_subtype(ty, wt))
                            })
                            .map(|(w, _, _)| *w)
                            .collect();
                        for w in hits {
                            self.data(w, n, &format!("{ty}.{field}"));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
}

/// Builds the inter-procedural SDG over every context of `cg`.
pub fn build_sdg(ir: &ProgramIR, cg: &CallGraph1Cfa) -> Sdg {
    let mut nodes = Vec::new();
    for (i, c) in cg.contexts.iter().enumerate() {
        for &sid in &ir.method(c.method).statements {
            nodes.push(SdgNode { ctx: ContextId(i as u32), stmt: sid });
        }
    }
    nodes.sort();
    let index = nodes.iter().enumerate().map(|(i, n)| (*n, NodeId(i as u32))).collect();
    let mut b = Builder { ir, cg, nodes, index, edges: BTreeSet::new(), rd: BTreeMap::new() };
    for i in 0..cg.contexts.len() {
        b.method_edges(ContextId(i as u32));
    }
    let mut traces = Vec::new();
    for &(entry, root) in &cg.roots {
        let mut order = Vec::new();
        b.walk(root, &mut Vec::new(), &mut BTreeSet::new(), &mut order);
        traces.push(EntryTrace { entry, order });
    }
    b.heap_edges(&traces);
    Sdg { nodes: b.nodes, edges: b.edges.into_iter().collect(), traces }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{build_call_graph, parse};

    fn sdg(src: &str) -> (ProgramIR, Sdg) {
        let ir = parse(src, "t").unwrap();
        let cg = build_call_graph(&ir);
        let g = build_sdg(&ir, &cg);
        (ir, g)
    }

    fn data_lines(ir: &ProgramIR, g: &Sdg) -> Vec<(u32, u32, String)> {
        g.data_edges()
            .map(|e| {
                let via = match &e.dep {
                    Dependence::Data { via } => via.clone(),
                    Dependence::Control => unreachable!(),
                };
                (ir.stmt(g.node(e.from).stmt).line, ir.stmt(g.node(e.to).stmt).line, via)
            })
            .collect()
    }

    #[test]
    fn def_use_straight_line() {
        let (ir, g) = sdg("import q.F;\nclass A { static void main() {\nint x = F.f();\nF.g(x);\n} }");
        assert_eq!(data_lines(&ir, &g), vec![(3, 4, "x".to_string())]);
    }

    #[test]
    fn disjoint_variables_have_no_edge() {
        let (_, g) = sdg("class A { static void main() { int x = 1; int y = 2; } }");
        assert_eq!(g.data_edges().count(), 0);
    }

    #[test]
    fn arguments_flow_into_formals_and_returns_back() {
        let src = "class A {\nstatic void main() {\nint a = 1;\nint b = id(a);\nint c = b;\n}\n\
                   static int id(int v) {\nreturn v;\n}\n}";
        let (ir, g) = sdg(src);
        let lines = data_lines(&ir, &g);
        assert!(lines.contains(&(3, 7, "a".into())), "{lines:?}");
        assert!(lines.contains(&(7, 8, "v".into())));
        assert!(lines.contains(&(8, 4, "return".into())));
        assert!(lines.contains(&(4, 5, "b".into())));
        assert!(!lines.iter().any(|(f, t, _)| *f == 3 && *t == 4));
    }

    #[test]
    fn data_edges_point_forward_in_trace() {
        let src = "class A {\nstatic void main() {\nint a = 1;\nint b = id(a);\nint c = id(b);\n}\n\
                   static int id(int v) {\nint w = v;\nreturn w;\n}\n}";
        let (_, g) = sdg(src);
        let t = &g.traces[0];
        let pos: BTreeMap<NodeId, usize> = t.order.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        for e in g.data_edges() {
            assert!(pos[&e.from] < pos[&e.to]);
        }
    }

    #[test]
    fn control_edges_from_headers() {
        let (ir, g) = sdg("class A { static void main() {\nint x = 1;\nif (x) {\nx = 2;\n}\n} }");
        let c: Vec<_> = g
            .edges
            .iter()
            .filter(|e| e.dep == Dependence::Control)
            .map(|e| (ir.stmt(g.node(e.from).stmt).line, ir.stmt(g.node(e.to).stmt).line))
            .collect();
        assert_eq!(c, vec![(3, 4)]);
    }

    #[test]
    fn field_write_reaches_later_read() {
        let src = "class C {\nint f;\nstatic void main() {\nC c = new C();\nc.set(1);\nint v = c.get();\n}\n\
                   void set(int v) {\nf = v;\n}\nint get() {\nreturn f;\n}\n}";
        let (ir, g) = sdg(src);
        let lines = data_lines(&ir, &g);
        assert!(lines.contains(&(9, 12, "C.f".into())), "{lines:?}");
    }

    #[test]
    fn serialization_is_deterministic() {
        let src = "class A { static void main() { int a = 1; int b = f(a); } static int f(int x) { return x; } }";
        assert_eq!(sdg(src).1.to_json(), sdg(src).1.to_json());
    }
}
