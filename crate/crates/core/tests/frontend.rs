use std::collections::BTreeSet;
use std::path::PathBuf;

use fspec_miner::frontend::{build_call_graph, build_sdg, parse, parse_many, Dependence, StmtKind};

fn fixture(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn listing1_shape() {
    let ir = parse(&fixture("jaas/listing1.mini"), "listing1").unwrap();
    assert_eq!(ir.application_types().count(), 1);
    assert_eq!(ir.methods.len(), 2);
    assert_eq!(ir.entrypoints.len(), 1);
    assert!(ir.diagnostics.is_empty());
}

#[test]
fn listing1_contexts() {
    let ir = parse(&fixture("jaas/listing1.mini"), "listing1").unwrap();
    let cg = build_call_graph(&ir);
    let names: Vec<(String, Option<u32>)> = cg
        .contexts
        .iter()
        .map(|c| (ir.method(c.method).name.clone(), c.site.map(|s| ir.stmt(s).line)))
        .collect();
    assert_eq!(names, vec![("main".to_string(), None), ("getLoginContext".to_string(), Some(14))]);
    assert_eq!(cg.edges.len(), 1);
}

#[test]
fn listing1_handler_flows_into_login_context() {
    let ir = parse(&fixture("jaas/listing1.mini"), "listing1").unwrap();
    let cg = build_call_graph(&ir);
    let sdg = build_sdg(&ir, &cg);
    let hit = sdg.edges.iter().any(|e| {
        let (a, b) = (ir.stmt(sdg.node(e.from).stmt), ir.stmt(sdg.node(e.to).stmt));
        a.kind == StmtKind::ObjectInstantiation
            && a.line == 22
            && b.kind == StmtKind::ObjectInstantiation
            && b.line == 24
            && e.dep == Dependence::Data { via: "handler".into() }
    });
    assert!(hit);
}

#[test]
fn listing2_parses_with_redeclared_local() {
    let ir = parse(&fixture("jaas/listing2.mini"), "listing2").unwrap();
    assert_eq!(ir.entrypoints.len(), 1);
    let calls: BTreeSet<_> = ir
        .statements
        .iter()
        .filter(|s| s.kind == StmtKind::MethodInvocation)
        .filter_map(|s| s.member.clone())
        .collect();
    assert!(calls.contains("getSubject/0") && calls.contains("getPrincipals/0"));
}

#[test]
fn framework_sources_parse_together() {
    let files: Vec<(String, String)> = ["LoginContext.mini", "Subject.mini", "Callbacks.mini"]
        .iter()
        .map(|f| (f.to_string(), fixture(&format!("jaas/framework/{f}"))))
        .collect();
    let ir = parse_many(&files, "jaas").unwrap();
    assert_eq!(ir.package.as_deref(), Some("jaas"));
    assert!(ir.type_decl("jaas.LoginContext").is_some());
}
