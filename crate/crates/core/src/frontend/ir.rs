use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StmtId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MethodId(pub u32);

impl fmt::Display for StmtId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StmtKind {
    ObjectInstantiation,
    MethodInvocation,
    StaticInvocation,
    FieldRead,
    FieldWrite,
    Assignment,
    Return,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub id: StmtId,
    pub method: MethodId,
    pub kind: StmtKind,
    /// Static type the statement operates on; `None` when it is unknown.
    pub target_type: Option<String>,
    /// `name/arity` for calls, `<init>/arity` for instantiations, the field
    /// name for field accesses.
    pub member: Option<String>,
    pub def: Option<String>,
    pub uses: Vec<String>,
    pub receiver: Option<String>,
    /// Positional call arguments; `None` marks a constant.
    pub args: Vec<Option<String>>,
    /// Position within the owning method, in lexical order.
    pub index: u32,
    /// Innermost enclosing `if`/`while`/`try` header.
    pub control: Option<StmtId>,
    pub line: u32,
    pub col: u32,
}

impl Statement {
    pub fn is_call(&self) -> bool {
        matches!(
            self.kind,
            StmtKind::MethodInvocation | StmtKind::StaticInvocation | StmtKind::ObjectInstantiation
        )
    }

    /// Method name and arity of a call; constructors report `<init>`.
    pub fn call_signature(&self) -> Option<(&str, usize)> {
        if !self.is_call() {
            return None;
        }
        let member = self.member.as_deref()?;
        let (name, arity) = member.rsplit_once('/')?;
        Some((name, arity.parse().ok()?))
    }
}

/// Structured view of a method body, kept for flow analyses that need to
/// know which statements sit on alternative branches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum Region {
    Stmt { id: StmtId },
    Branch { header: StmtId, arms: Vec<Vec<Region>> },
    Loop { header: StmtId, body: Vec<Region> },
    Try { header: StmtId, body: Vec<Region>, handlers: Vec<Vec<Region>>, finally: Vec<Region> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeKind {
    Class,
    Interface,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDecl {
    pub name: String,
    pub ty: String,
    pub is_static: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: String,
    pub kind: TypeKind,
    pub super_type: Option<String>,
    pub interfaces: Vec<String>,
    pub fields: Vec<FieldDecl>,
    /// Declared here, defined in another unit.
    pub stub: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodDecl {
    pub id: MethodId,
    pub owner: String,
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: Option<String>,
    pub is_static: bool,
    pub is_entry: bool,
    pub is_constructor: bool,
    pub is_abstract: bool,
    /// Formal-parameter statements; `this` first for instance methods.
    pub formals: Vec<StmtId>,
    /// Every statement of the body in lexical order, formals included.
    pub statements: Vec<StmtId>,
    pub body: Vec<Region>,
}

impl MethodDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// `Owner.name/arity`
    pub fn qualified(&self) -> String {
        format!("{}.{}/{}", self.owner, self.name, self.params.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramIR {
    pub unit: String,
    pub package: Option<String>,
    pub imports: BTreeMap<String, String>,
    pub types: Vec<TypeDecl>,
    pub methods: Vec<MethodDecl>,
    pub statements: Vec<Statement>,
    pub entrypoints: Vec<MethodId>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ProgramIR {
    pub fn stmt(&self, id: StmtId) -> &Statement {
        &self.statements[id.0 as usize]
    }

    pub fn method(&self, id: MethodId) -> &MethodDecl {
        &self.methods[id.0 as usize]
    }

    pub fn type_decl(&self, name: &str) -> Option<&TypeDecl> {
        self.types.iter().find(|t| t.name == name)
    }

    /// Types with a body in this unit.
    pub fn application_types(&self) -> impl Iterator<Item = &TypeDecl> {
        self.types.iter().filter(|t| !t.stub)
    }

    pub fn direct_supertypes(&self, name: &str) -> Vec<&str> {
        match self.type_decl(name) {
            Some(t) => t
                .super_type
                .iter()
                .chain(t.interfaces.iter())
                .map(String::as_str)
                .collect(),
            None => Vec::new(),
        }
    }

    /// Breadth-first supertypes, superclass before interfaces, without `name`.
    pub fn ancestors(&self, name: &str) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::from([name.to_string()]);
        while let Some(t) = queue.pop_front() {
            for s in self.direct_supertypes(&t) {
                if seen.insert(s.to_string()) {
                    out.push(s.to_string());
                    queue.push_back(s.to_string());
                }
            }
        }
        out
    }

    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        sub == sup || self.ancestors(sub).iter().any(|a| a == sup)
    }

    /// Declared types that are `name` or inherit from it.
    pub fn subtypes(&self, name: &str) -> Vec<&str> {
        self.types
            .iter()
            .filter(|t| self.is_subtype(&t.name, name))
            .map(|t| t.name.as_str())
            .collect()
    }

    pub fn methods_of<'a, 'b>(&'a self, owner: &'b str) -> impl Iterator<Item = &'a MethodDecl> + 'b
    where
        'a: 'b,
    {
        self.methods.iter().filter(move |m| m.owner == owner)
    }

    /// Method visible on `ty` with this name and arity, searching superclasses.
    pub fn lookup_method(&self, ty: &str, name: &str, arity: usize) -> Option<&MethodDecl> {
        std::iter::once(ty.to_string())
            .chain(self.ancestors(ty))
            .find_map(|t| {
                self.methods
                    .iter()
                    .find(|m| m.owner == t && m.name == name && m.arity() == arity && !m.is_constructor)
            })
    }

    pub fn constructor(&self, ty: &str, arity: usize) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.owner == ty && m.is_constructor && m.arity() == arity)
    }

    pub fn field_of(&self, ty: &str, field: &str) -> Option<(&str, &FieldDecl)> {
        std::iter::once(ty.to_string())
            .chain(self.ancestors(ty))
            .find_map(|t| {
                let decl = self.type_decl(&t)?;
                decl.fields.iter().find(|f| f.name == field).map(|f| (decl.name.as_str(), f))
            })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("IR serializes")
    }
}
