use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::ir::{MethodId, ProgramIR, Statement, StmtId, StmtKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextId(pub u32);

/// A method analysed under its immediate call site; `site == None` is the
/// ROOT context of an entrypoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Context {
    pub method: MethodId,
    pub site: Option<StmtId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CallEdge {
    pub caller: ContextId,
    pub site: StmtId,
    pub callee: ContextId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallGraph1Cfa {
    pub contexts: Vec<Context>,
    pub edges: Vec<CallEdge>,
    pub roots: Vec<(MethodId, ContextId)>,
}

impl CallGraph1Cfa {
    pub fn context(&self, id: ContextId) -> Context {
        self.contexts[id.0 as usize]
    }

    pub fn context_id(&self, ctx: Context) -> Option<ContextId> {
        self.contexts.iter().position(|c| *c == ctx).map(|i| ContextId(i as u32))
    }

    pub fn root(&self, entry: MethodId) -> Option<ContextId> {
        self.roots.iter().find(|(m, _)| *m == entry).map(|(_, c)| *c)
    }

    pub fn callees(&self, caller: ContextId, site: StmtId) -> Vec<ContextId> {
        self.edges
            .iter()
            .filter(|e| e.caller == caller && e.site == site)
            .map(|e| e.callee)
            .collect()
    }

    pub fn callers(&self, callee: ContextId) -> Vec<(ContextId, StmtId)> {
        self.edges.iter().filter(|e| e.callee == callee).map(|e| (e.caller, e.site)).collect()
    }
}

/// Application methods a call statement may dispatch to. Instance calls use
/// class-hierarchy analysis over the receiver's static type; calls whose
/// target is not declared in the unit resolve to nothing.
pub fn resolve_targets(ir: &ProgramIR, s: &Statement) -> Vec<MethodId> {
    let Some(target) = s.target_type.as_deref() else {
        return Vec::new();
    };
    let Some((name, arity)) = s.call_signature() else {
        return Vec::new();
    };
    let mut out = BTreeSet::new();
    match s.kind {
        StmtKind::ObjectInstantiation => {
            if let Some(m) = ir.constructor(target, arity) {
                out.insert(m.id);
            }
        }
        StmtKind::StaticInvocation => {
            if let Some(m) = ir.lookup_method(target, name, arity) {
                if !m.is_abstract {
                    out.insert(m.id);
                }
            }
        }
        StmtKind::MethodInvocation => {
            for sub in ir.subtypes(target) {
                if let Some(m) = ir.lookup_method(sub, name, arity) {
                    if !m.is_abstract && !m.is_static {
                        out.insert(m.id);
                    }
                }
            }
        }
        _ => {}
    }
    out.into_iter().collect()
}

pub fn build_call_graph(ir: &ProgramIR) -> CallGraph1Cfa {
    let mut contexts: Vec<Context> = Vec::new();
    let mut index: BTreeMap<Context, ContextId> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern = |ctx: Context, contexts: &mut Vec<Context>, queue: &mut VecDeque<ContextId>| {
        *index.entry(ctx).or_insert_with(|| {
            let id = ContextId(contexts.len() as u32);
            contexts.push(ctx);
            queue.push_back(id);
            id
        })
    };

    for &entry in &ir.entrypoints {
        let id = intern(Context { method: entry, site: None }, &mut contexts, &mut queue);
        roots.push((entry, id));
    }
    while let Some(caller) = queue.pop_front() {
        let method = contexts[caller.0 as usize].method;
        for &sid in &ir.method(method).statements {
            let s = ir.stmt(sid);
            if !s.is_call() {
                continue;
            }
            for target in resolve_targets(ir, s) {
                let callee =
                    intern(Context { method: target, site: Some(sid) }, &mut contexts, &mut queue);
                edges.push(CallEdge { caller, site: sid, callee });
            }
        }
    }
    edges.sort();
    edges.dedup();
    CallGraph1Cfa { contexts, edges, roots }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    #[test]
    fn distinct_call_sites_give_distinct_contexts() {
        let ir = parse(
            "class A {\n static void main() { m1(); m2(); }\n static void m1() { m3(); }\n\
             static void m2() { m3(); }\n static void m3() { }\n}",
            "t",
        )
        .unwrap();
        let cg = build_call_graph(&ir);
        let m3 = ir.methods.iter().find(|m| m.name == "m3").unwrap().id;
        let m3_contexts: Vec<_> = cg.contexts.iter().filter(|c| c.method == m3).collect();
        assert_eq!(m3_contexts.len(), 2);
        assert_ne!(m3_contexts[0].site, m3_contexts[1].site);
    }

    #[test]
    fn no_calls_means_entry_contexts_only() {
        let ir = parse("class A { static void main() { int x = 1; } }", "t").unwrap();
        let cg = build_call_graph(&ir);
        assert_eq!(cg.contexts.len(), 1);
        assert!(cg.edges.is_empty());
    }

    #[test]
    fn virtual_calls_reach_overrides() {
        let ir = parse(
            "interface I { void run(); }\n\
             class X implements I { void run() { } }\n\
             class Y implements I { void run() { } }\n\
             class M { static void main() { I i = new X(); i.run(); } }",
            "t",
        )
        .unwrap();
        let cg = build_call_graph(&ir);
        let owners: BTreeSet<_> =
            cg.contexts.iter().map(|c| ir.method(c.method).owner.clone()).collect();
        assert!(owners.contains("X") && owners.contains("Y"));
    }

    #[test]
    fn recursion_terminates() {
        let ir = parse("class A { static void main() { f(); } static void f() { f(); } }", "t").unwrap();
        let cg = build_call_graph(&ir);
        assert_eq!(cg.contexts.len(), 3);
    }
}
