//! Inter-framework dependencies: which framework members read a field that
//! another member of the same class writes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::frontend::{MethodDecl, MethodId, ProgramIR, StmtKind};
use crate::manifest::FrameworkManifest;
use crate::slicer::{ApiKind, Paug, PaugNodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IfdEntry {
    #[serde(rename = "type")]
    pub ty: String,
    pub writer: String,
    pub field: String,
    pub reader: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IfdModel {
    pub framework: String,
    pub entries: Vec<IfdEntry>,
}

impl IfdModel {
    /// Distinct `(type, writer, reader)` orders.
    pub fn orders(&self) -> BTreeSet<(String, String, String)> {
        self.entries
            .iter()
            .map(|e| (e.ty.clone(), e.writer.clone(), e.reader.clone()))
            .collect()
    }

    pub fn entries_for_reader<'a>(&'a self, ty: &'a str, reader: &'a str) -> impl Iterator<Item = &'a IfdEntry> {
        self.entries.iter().filter(move |e| e.ty == ty && e.reader == reader)
    }

    pub fn requires(&self, ty: &str, writer: &str, reader: &str) -> bool {
        self.entries.iter().any(|e| e.ty == ty && e.writer == writer && e.reader == reader)
    }
}

/// Member signature as it appears in API labels.
pub fn member_sig(m: &MethodDecl) -> String {
    if m.is_constructor {
        "<init>".to_string()
    } else {
        format!("{}/{}", m.name, m.arity())
    }
}

type Access = (BTreeSet<(String, String)>, BTreeSet<(String, String)>);

fn direct_access(ir: &ProgramIR, m: &MethodDecl) -> Access {
    let mut reads = BTreeSet::new();
    let mut writes = BTreeSet::new();
    for &sid in &m.statements {
        let s = ir.stmt(sid);
        let (Some(ty), Some(field)) = (s.target_type.as_deref(), s.member.as_deref()) else {
            continue;
        };
        let decl = ir.field_of(ty, field).map(|(d, _)| d.to_string()).unwrap_or_else(|| ty.to_string());
        match s.kind {
            StmtKind::FieldRead => {
                reads.insert((decl, field.to_string()));
            }
            StmtKind::FieldWrite => {
                writes.insert((decl, field.to_string()));
            }
            _ => {}
        }
    }
    (reads, writes)
}

/// Same-class methods `m` calls on `this` or statically.
fn self_calls(ir: &ProgramIR, m: &MethodDecl) -> Vec<MethodId> {
    let mut out = Vec::new();
    for &sid in &m.statements {
        let s = ir.stmt(sid);
        let Some((name, arity)) = s.call_signature() else { continue };
        let same_receiver = match s.kind {
            StmtKind::MethodInvocation => s.receiver.as_deref() == Some("this"),
            StmtKind::StaticInvocation => s.target_type.as_deref() == Some(m.owner.as_str()),
            _ => false,
        };
        if same_receiver {
            if let Some(callee) = ir.lookup_method(&m.owner, name, arity) {
                out.push(callee.id);
            }
        }
    }
    out
}

/// Reader/writer roles of every framework method, closed over calls to
/// helpers of the same class, crossed per class and field.
pub fn extract_ifd(ir: &ProgramIR, manifest: &FrameworkManifest) -> IfdModel {
    let methods: Vec<&MethodDecl> =
        ir.methods.iter().filter(|m| manifest.is_framework_type(&m.owner)).collect();
    let mut access: BTreeMap<MethodId, Access> =
        methods.iter().map(|m| (m.id, direct_access(ir, m))).collect();
    let calls: BTreeMap<MethodId, Vec<MethodId>> = methods.iter().map(|m| (m.id, self_calls(ir, m))).collect();
    loop {
        let mut changed = false;
        for m in &methods {
            for callee in &calls[&m.id] {
                let Some((r, w)) = access.get(callee).cloned() else { continue };
                let mine = access.get_mut(&m.id).expect("method access");
                let before = mine.0.len() + mine.1.len();
                mine.0.extend(r);
                mine.1.extend(w);
                changed |= mine.0.len() + mine.1.len() != before;
            }
        }
        if !changed {
            break;
        }
    }

    let mut entries = BTreeSet::new();
    for ty in ir.types.iter().filter(|t| manifest.is_framework_type(&t.name)) {
        let own: Vec<&&MethodDecl> = methods.iter().filter(|m| m.owner == ty.name).collect();
        let mut fields: BTreeMap<(String, String), (BTreeSet<String>, BTreeSet<String>)> = BTreeMap::new();
        for m in &own {
            let (reads, writes) = &access[&m.id];
            for f in writes {
                if ir.is_subtype(&ty.name, &f.0) {
                    fields.entry(f.clone()).or_default().0.insert(member_sig(m));
                }
            }
            for f in reads {
                if ir.is_subtype(&ty.name, &f.0) {
                    fields.entry(f.clone()).or_default().1.insert(member_sig(m));
                }
            }
        }
        for ((_, field), (writers, readers)) in fields {
            for w in &writers {
                for r in readers.iter().filter(|r| *r != w) {
                    entries.insert(IfdEntry {
                        ty: ty.name.clone(),
                        writer: w.clone(),
                        field: field.clone(),
                        reader: r.clone(),
                    });
                }
            }
        }
    }
    IfdModel { framework: manifest.name.clone(), entries: entries.into_iter().collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    MissingWriter,
    ReaderBeforeWriter,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub entry: IfdEntry,
    pub reader_node: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub writer_node: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SoundnessVerdict {
    Sound,
    Unsound { violations: Vec<Violation> },
}

impl SoundnessVerdict {
    pub fn is_sound(&self) -> bool {
        matches!(self, SoundnessVerdict::Sound)
    }
}

fn member_of(paug: &Paug, id: u32) -> Option<(&str, &str)> {
    let l = paug.label(id)?;
    matches!(l.kind, ApiKind::Init | ApiKind::Invoke).then_some((l.target.as_str(), l.member.as_str()))
}

/// Instantiations of the node's own target type it depends on by data,
/// itself included when it is one.
pub fn lineage(paug: &Paug, id: u32) -> BTreeSet<u32> {
    let Some(label) = paug.label(id) else { return BTreeSet::new() };
    let mut roots: BTreeSet<u32> = paug
        .data_ancestors(id)
        .into_iter()
        .filter(|&a| {
            paug.label(a).is_some_and(|l| l.kind == ApiKind::Init && l.target == label.target)
        })
        .collect();
    if label.kind == ApiKind::Init {
        roots.insert(id);
    }
    roots
}

/// Whether two nodes may act on the same object. Without instantiation
/// roots on either side the check falls back to the type.
pub fn same_lineage(paug: &Paug, a: u32, b: u32) -> bool {
    let (la, lb) = (lineage(paug, a), lineage(paug, b));
    la.is_empty() || lb.is_empty() || !la.is_disjoint(&lb)
}

/// Writer nodes that can serve reader `r` under `entry`.
pub fn writers_for(paug: &Paug, entry: &IfdEntry, r: u32) -> Vec<u32> {
    paug.api_nodes()
        .map(|n| n.id)
        .filter(|&w| w != r)
        .filter(|&w| member_of(paug, w) == Some((entry.ty.as_str(), entry.writer.as_str())))
        .filter(|&w| same_lineage(paug, w, r))
        .collect()
}

/// A reader needs some writer of the field, on the same object, earlier in
/// the sequence order.
pub fn validate(paug: &Paug, ifd: &IfdModel) -> SoundnessVerdict {
    let mut violations = BTreeSet::new();
    for node in paug.api_nodes().filter(|n| n.kind == PaugNodeKind::Api) {
        let Some((ty, member)) = member_of(paug, node.id) else { continue };
        let before = paug.seq_ancestors(node.id);
        let mut by_field: BTreeMap<&str, Vec<&IfdEntry>> = BTreeMap::new();
        for e in ifd.entries_for_reader(ty, member) {
            by_field.entry(e.field.as_str()).or_default().push(e);
        }
        for entries in by_field.values() {
            let writers: Vec<(u32, &IfdEntry)> = entries
                .iter()
                .flat_map(|e| writers_for(paug, e, node.id).into_iter().map(move |w| (w, *e)))
                .collect();
            if writers.iter().any(|(w, _)| before.contains(w)) {
                continue;
            }
            let (kind, entry, writer_node) = match writers.iter().min_by_key(|(w, _)| *w) {
                Some((w, e)) => (ViolationKind::ReaderBeforeWriter, *e, Some(*w)),
                None => (ViolationKind::MissingWriter, entries[0], None),
            };
            if !violations.iter().any(|v: &Violation| {
                v.reader_node == node.id && v.entry.writer == entry.writer
            }) {
                violations.insert(Violation { kind, entry: entry.clone(), reader_node: node.id, writer_node });
            }
        }
    }
    if violations.is_empty() {
        SoundnessVerdict::Sound
    } else {
        SoundnessVerdict::Unsound { violations: violations.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn model(src: &str) -> IfdModel {
        let ir = parse(src, "fw").unwrap();
        extract_ifd(&ir, &FrameworkManifest::new("fw", &["fw."]))
    }

    #[test]
    fn readers_only_gives_empty_model() {
        let m = model("package fw; class C { int f; int a() { return f; } int b() { return f; } }");
        assert!(m.entries.is_empty());
    }

    #[test]
    fn two_writers_one_reader() {
        let m = model(
            "package fw; class C { int f; void w1() { f = 1; } void w2() { f = 2; } int r() { return f; } }",
        );
        let pairs: Vec<_> = m.entries.iter().map(|e| (e.writer.as_str(), e.reader.as_str())).collect();
        assert_eq!(pairs, vec![("w1/0", "r/0"), ("w2/0", "r/0")]);
    }

    #[test]
    fn read_and_write_in_one_method_is_not_a_dependency() {
        let m = model("package fw; class C { int f; void inc() { f = f + 1; } }");
        assert!(m.entries.is_empty());
    }

    #[test]
    fn helper_writes_count_for_the_caller() {
        let m = model(
            "package fw; class C { int f; void open() { this.reset(); } private void reset() { f = 0; } \
             int get() { return f; } }",
        );
        assert!(m.requires("fw.C", "open/0", "get/0"));
        assert!(m.requires("fw.C", "reset/0", "get/0"));
    }
}
