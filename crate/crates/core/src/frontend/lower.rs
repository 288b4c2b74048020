//! Name resolution and lowering of the syntax tree into one IR statement per
//! instantiation, call, field access, copy, or return.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::ir::*;
use super::{Diagnostic, DiagnosticKind};
use crate::manifest::BUILTIN_TYPES;

pub fn lower(unit: &Unit, unit_name: &str) -> Result<ProgramIR, Vec<Diagnostic>> {
    let mut lw = Lowerer::new(unit, unit_name);
    lw.declare_types();
    lw.check_inheritance();
    lw.declare_methods();
    lw.lower_bodies();
    if !lw.errors.is_empty() {
        lw.errors.sort_by_key(|d| (d.line, d.col));
        return Err(lw.errors);
    }
    let mut ir = lw.ir;
    ir.entrypoints = ir
        .methods
        .iter()
        .filter(|m| (m.is_static && m.name == "main") || m.is_entry)
        .map(|m| m.id)
        .collect();
    if ir.entrypoints.is_empty() {
        ir.diagnostics.push(Diagnostic::new(DiagnosticKind::NoEntrypoint, 0, 0, "no entrypoint"));
    }
    Ok(ir)
}

struct Lowerer<'a> {
    unit: &'a Unit,
    ir: ProgramIR,
    /// Simple or qualified spelling -> qualified name.
    names: BTreeMap<String, String>,
    errors: Vec<Diagnostic>,
}

#[derive(Clone)]
enum Val {
    Const,
    Var(String, Option<String>),
    Type(String),
}

impl Val {
    fn var(&self) -> Option<String> {
        match self {
            Val::Var(v, _) => Some(v.clone()),
            _ => None,
        }
    }

    fn ty(&self) -> Option<String> {
        match self {
            Val::Var(_, t) => t.clone(),
            _ => None,
        }
    }
}

impl<'a> Lowerer<'a> {
    fn new(unit: &'a Unit, unit_name: &str) -> Self {
        let ir = ProgramIR {
            unit: unit_name.to_string(),
            package: unit.package.clone(),
            imports: BTreeMap::new(),
            types: Vec::new(),
            methods: Vec::new(),
            statements: Vec::new(),
            entrypoints: Vec::new(),
            diagnostics: Vec::new(),
        };
        let mut names = BTreeMap::new();
        for b in BUILTIN_TYPES {
            names.insert(b.to_string(), b.to_string());
        }
        Lowerer { unit, ir, names, errors: Vec::new() }
    }

    fn err(&mut self, kind: DiagnosticKind, line: u32, col: u32, msg: impl Into<String>) {
        self.errors.push(Diagnostic::new(kind, line, col, msg));
    }

    fn qualify(&self, simple: &str) -> String {
        match &self.unit.package {
            Some(p) => format!("{p}.{simple}"),
            None => simple.to_string(),
        }
    }

    fn resolve_type(&mut self, name: &str, line: u32, col: u32) -> String {
        let (base, dims) = match name.find('[') {
            Some(i) => (&name[..i], &name[i..]),
            None => (name, ""),
        };
        match self.names.get(base) {
            Some(q) => format!("{q}{dims}"),
            None => {
                self.err(
                    DiagnosticKind::UnresolvedType,
                    line,
                    col,
                    format!("unresolved type `{base}`"),
                );
                name.to_string()
            }
        }
    }

    fn declare_types(&mut self) {
        for (import, line, col) in &self.unit.imports {
            let simple = import.rsplit('.').next().unwrap_or(import).to_string();
            if let Some(prev) = self.names.get(&simple) {
                if prev != import && !BUILTIN_TYPES.contains(&simple.as_str()) {
                    self.err(
                        DiagnosticKind::DuplicateDeclaration,
                        *line,
                        *col,
                        format!("import `{import}` clashes with `{prev}`"),
                    );
                }
            }
            self.names.insert(simple, import.clone());
            self.names.insert(import.clone(), import.clone());
            self.ir.imports.insert(import.rsplit('.').next().unwrap_or(import).into(), import.clone());
        }
        let mut seen = BTreeSet::new();
        for t in &self.unit.types {
            if !seen.insert(t.name.clone()) {
                self.err(
                    DiagnosticKind::DuplicateDeclaration,
                    t.line,
                    t.col,
                    format!("type `{}` declared twice", t.name),
                );
                continue;
            }
            let q = self.qualify(&t.name);
            self.names.insert(t.name.clone(), q.clone());
            self.names.insert(q, self.qualify(&t.name));
        }
        for t in &self.unit.types {
            let name = self.qualify(&t.name);
            if self.ir.type_decl(&name).is_some() {
                continue;
            }
            let (super_type, mut interfaces) = if t.is_interface {
                (None, t.extends.clone())
            } else {
                (t.extends.first().cloned(), Vec::new())
            };
            if !t.is_interface && t.extends.len() > 1 {
                self.err(DiagnosticKind::Syntax, t.line, t.col, "a class extends at most one type");
            }
            interfaces.extend(t.implements.iter().cloned());
            let super_type = super_type.map(|s| self.resolve_type(&s, t.line, t.col));
            let interfaces =
                interfaces.iter().map(|i| self.resolve_type(i, t.line, t.col)).collect();
            let mut fields: Vec<FieldDecl> = Vec::new();
            for f in &t.fields {
                if fields.iter().any(|g| g.name == f.name) {
                    self.err(
                        DiagnosticKind::DuplicateDeclaration,
                        f.line,
                        f.col,
                        format!("field `{}` declared twice in `{}`", f.name, t.name),
                    );
                    continue;
                }
                let ty = self.resolve_type(&f.ty, f.line, f.col);
                fields.push(FieldDecl { name: f.name.clone(), ty, is_static: f.is_static });
            }
            self.ir.types.push(TypeDecl {
                name,
                kind: if t.is_interface { TypeKind::Interface } else { TypeKind::Class },
                super_type,
                interfaces,
                fields,
                stub: t.stub,
            });
        }
    }

    fn check_inheritance(&mut self) {
        // Colors: 0 unvisited, 1 on stack, 2 done.
        let mut color: BTreeMap<String, u8> = BTreeMap::new();
        let names: Vec<String> = self.ir.types.iter().map(|t| t.name.clone()).collect();
        let mut cyclic = BTreeSet::new();
        fn visit(
            ir: &ProgramIR,
            n: &str,
            color: &mut BTreeMap<String, u8>,
            cyclic: &mut BTreeSet<String>,
        ) {
            color.insert(n.to_string(), 1);
            for s in ir.direct_supertypes(n) {
                match color.get(s).copied().unwrap_or(0) {
                    0 => visit(ir, s, color, cyclic),
                    1 => {
                        cyclic.insert(s.to_string());
                    }
                    _ => {}
                }
            }
            color.insert(n.to_string(), 2);
        }
        for n in &names {
            if color.get(n).copied().unwrap_or(0) == 0 {
                visit(&self.ir, n, &mut color, &mut cyclic);
            }
        }
        for n in cyclic {
            let (line, col) = self
                .unit
                .types
                .iter()
                .find(|t| self.qualify(&t.name) == n)
                .map(|t| (t.line, t.col))
                .unwrap_or((0, 0));
            self.err(
                DiagnosticKind::InheritanceCycle,
                line,
                col,
                format!("inheritance cycle through `{n}`"),
            );
        }
        if !self.errors.is_empty() {
            // Hierarchy queries below would not terminate on a cycle.
            for t in &mut self.ir.types {
                t.super_type = None;
                t.interfaces.clear();
            }
        }
    }

    fn declare_methods(&mut self) {
        for t in &self.unit.types {
            let owner = self.qualify(&t.name);
            let mut sigs = BTreeSet::new();
            for m in &t.methods {
                if !sigs.insert((m.name.clone(), m.params.len(), m.is_constructor)) {
                    self.err(
                        DiagnosticKind::DuplicateDeclaration,
                        m.line,
                        m.col,
                        format!("method `{}/{}` declared twice in `{}`", m.name, m.params.len(), t.name),
                    );
                    continue;
                }
                let mut params = Vec::new();
                let mut pnames = BTreeSet::new();
                for (ty, name) in &m.params {
                    if !pnames.insert(name.clone()) {
                        self.err(
                            DiagnosticKind::DuplicateDeclaration,
                            m.line,
                            m.col,
                            format!("parameter `{name}` declared twice"),
                        );
                    }
                    let ty = self.resolve_type(ty, m.line, m.col);
                    params.push(Param { name: name.clone(), ty });
                }
                for th in &m.throws {
                    self.resolve_type(th, m.line, m.col);
                }
                let return_type = match &m.return_type {
                    Some(r) if r == "void" => None,
                    Some(r) => Some(self.resolve_type(r, m.line, m.col)),
                    None => None,
                };
                let id = MethodId(self.ir.methods.len() as u32);
                self.ir.methods.push(MethodDecl {
                    id,
                    owner: owner.clone(),
                    name: if m.is_constructor { "<init>".into() } else { m.name.clone() },
                    params,
                    return_type,
                    is_static: m.is_static,
                    is_entry: m.is_entry,
                    is_constructor: m.is_constructor,
                    is_abstract: m.body.is_none(),
                    formals: Vec::new(),
                    statements: Vec::new(),
                    body: Vec::new(),
                });
            }
        }
    }

    fn lower_bodies(&mut self) {
        let mut next = 0usize;
        for t in &self.unit.types {
            let mut sigs = BTreeSet::new();
            for m in &t.methods {
                if !sigs.insert((m.name.clone(), m.params.len(), m.is_constructor)) {
                    continue;
                }
                let id = MethodId(next as u32);
                next += 1;
                let mut body = BodyLowerer::new(self, id);
                body.lower_method(m);
            }
        }
    }
}

struct BodyLowerer<'l, 'a> {
    lw: &'l mut Lowerer<'a>,
    method: MethodId,
    owner: String,
    is_static: bool,
    scopes: Vec<BTreeMap<String, Option<String>>>,
    stmts: Vec<StmtId>,
    regions: Vec<Region>,
    control: Vec<StmtId>,
    temps: u32,
}

impl<'l, 'a> BodyLowerer<'l, 'a> {
    fn new(lw: &'l mut Lowerer<'a>, method: MethodId) -> Self {
        let decl = &lw.ir.methods[method.0 as usize];
        let owner = decl.owner.clone();
        let is_static = decl.is_static;
        BodyLowerer {
            lw,
            method,
            owner,
            is_static,
            scopes: vec![BTreeMap::new()],
            stmts: Vec::new(),
            regions: Vec::new(),
            control: Vec::new(),
            temps: 0,
        }
    }

    fn lower_method(&mut self, m: &MethodAst) {
        let mut formals = Vec::new();
        if !self.is_static {
            let id = self.emit(StmtKind::Other, None, None, Some("this".into()), vec![], m.line, m.col);
            self.declare("this", Some(self.owner.clone()));
            formals.push(id);
        }
        let params = self.lw.ir.methods[self.method.0 as usize].params.clone();
        for p in &params {
            let id =
                self.emit(StmtKind::Other, None, None, Some(p.name.clone()), vec![], m.line, m.col);
            self.declare(&p.name, Some(p.ty.clone()));
            formals.push(id);
        }
        if let Some(body) = &m.body {
            self.block(body);
        }
        let regions = std::mem::take(&mut self.regions);
        let decl = &mut self.lw.ir.methods[self.method.0 as usize];
        decl.formals = formals;
        decl.statements = std::mem::take(&mut self.stmts);
        decl.body = regions;
    }

    fn declare(&mut self, name: &str, ty: Option<String>) {
        self.scopes.last_mut().expect("scope").insert(name.to_string(), ty);
    }

    fn local(&self, name: &str) -> Option<Option<String>> {
        self.scopes.iter().rev().find_map(|s| s.get(name).cloned())
    }

    fn temp(&mut self) -> String {
        let t = format!("${}", self.temps);
        self.temps += 1;
        t
    }

    #[allow(clippy::too_many_arguments)]
    fn emit(
        &mut self,
        kind: StmtKind,
        target_type: Option<String>,
        member: Option<String>,
        def: Option<String>,
        uses: Vec<String>,
        line: u32,
        col: u32,
    ) -> StmtId {
        let id = StmtId(self.lw.ir.statements.len() as u32);
        self.lw.ir.statements.push(Statement {
            id,
            method: self.method,
            kind,
            target_type,
            member,
            def,
            uses,
            receiver: None,
            args: Vec::new(),
            index: self.stmts.len() as u32,
            control: self.control.last().copied(),
            line,
            col,
        });
        self.stmts.push(id);
        self.regions.push(Region::Stmt { id });
        id
    }

    fn emit_call(
        &mut self,
        kind: StmtKind,
        target: Option<String>,
        member: String,
        receiver: Option<String>,
        args: Vec<Option<String>>,
        def: Option<String>,
        at: (u32, u32),
    ) -> StmtId {
        let uses = receiver.iter().cloned().chain(args.iter().flatten().cloned()).collect();
        let id = self.emit(kind, target, Some(member), def, uses, at.0, at.1);
        let s = &mut self.lw.ir.statements[id.0 as usize];
        s.receiver = receiver;
        s.args = args;
        id
    }

    fn nested<F: FnOnce(&mut Self)>(&mut self, header: Option<StmtId>, f: F) -> Vec<Region> {
        let saved = std::mem::take(&mut self.regions);
        self.scopes.push(BTreeMap::new());
        if let Some(h) = header {
            self.control.push(h);
        }
        f(self);
        if header.is_some() {
            self.control.pop();
        }
        self.scopes.pop();
        std::mem::replace(&mut self.regions, saved)
    }

    fn block(&mut self, stmts: &[StmtAst]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &StmtAst) {
        match s {
            StmtAst::Local { ty, name, init, line, col } => {
                let ty = self.lw.resolve_type(ty, *line, *col);
                if let Some(init) = init {
                    self.assign_local(name, init, (*line, *col));
                }
                self.declare(name, Some(ty));
            }
            StmtAst::Assign { target, value, line, col } => self.assign(target, value, (*line, *col)),
            StmtAst::Expr(e) => {
                self.expr(e, None, false);
            }
            StmtAst::Return { value, line, col } => {
                let uses = match value {
                    Some(v) => self.expr(v, None, true).var().into_iter().collect(),
                    None => Vec::new(),
                };
                self.emit(StmtKind::Return, None, None, None, uses, *line, *col);
            }
            StmtAst::If { cond, then, els, line, col } => {
                let c = self.expr(cond, None, true);
                let header =
                    self.emit(StmtKind::Other, None, None, None, c.var().into_iter().collect(), *line, *col);
                let then = self.nested(Some(header), |b| b.block(then));
                let els = self.nested(Some(header), |b| b.block(els));
                self.pop_header_region(header);
                self.regions.push(Region::Branch { header, arms: vec![then, els] });
            }
            StmtAst::While { cond, body, line, col } => {
                let c = self.expr(cond, None, true);
                let header =
                    self.emit(StmtKind::Other, None, None, None, c.var().into_iter().collect(), *line, *col);
                let body = self.nested(Some(header), |b| b.block(body));
                self.pop_header_region(header);
                self.regions.push(Region::Loop { header, body });
            }
            StmtAst::Try { body, catches, finally, line, col } => {
                let header = self.emit(StmtKind::Other, None, None, None, vec![], *line, *col);
                let body = self.nested(Some(header), |b| b.block(body));
                let mut handlers = Vec::new();
                for (ty, name, hbody) in catches {
                    let region = self.nested(Some(header), |b| {
                        let ty = b.lw.resolve_type(ty, *line, *col);
                        b.emit(StmtKind::Other, None, None, Some(name.clone()), vec![], *line, *col);
                        b.declare(name, Some(ty));
                        b.block(hbody);
                    });
                    handlers.push(region);
                }
                let finally = self.nested(Some(header), |b| b.block(finally));
                self.pop_header_region(header);
                self.regions.push(Region::Try { header, body, handlers, finally });
            }
            StmtAst::Block(inner) => {
                let regions = self.nested(None, |b| b.block(inner));
                self.regions.extend(regions);
            }
        }
    }

    /// Header statements are emitted as plain regions; the structured region
    /// replaces that entry.
    fn pop_header_region(&mut self, header: StmtId) {
        if let Some(pos) = self.regions.iter().rposition(|r| *r == Region::Stmt { id: header }) {
            self.regions.remove(pos);
        }
    }

    fn field_of_self(&self, name: &str) -> Option<(String, FieldDecl)> {
        self.lw
            .ir
            .field_of(&self.owner, name)
            .map(|(owner, f)| (owner.to_string(), f.clone()))
    }

    fn assign_local(&mut self, name: &str, value: &Expr, at: (u32, u32)) {
        let v = self.expr(value, Some(name.to_string()), true);
        match v {
            Val::Var(ref n, _) if n == name => {}
            other => {
                let uses = other.var().into_iter().collect();
                self.emit(StmtKind::Assignment, None, None, Some(name.to_string()), uses, at.0, at.1);
            }
        }
    }

    fn assign(&mut self, target: &Expr, value: &Expr, at: (u32, u32)) {
        match &target.kind {
            ExprKind::Name(n) if self.local(n).is_some() || self.field_of_self(n).is_none() => {
                let existing = self.local(n);
                self.assign_local(n, value, at);
                if existing.is_none() {
                    let ty = self.value_type_of_def(n);
                    self.declare(n, ty);
                }
            }
            ExprKind::Name(n) => {
                let (owner, field) = self.field_of_self(n).expect("checked above");
                let v = self.expr(value, None, true);
                let receiver = if field.is_static { None } else { Some("this".to_string()) };
                self.field_write(owner, n, receiver, v, at);
            }
            ExprKind::Field { receiver, name } => {
                let r = self.expr(receiver, None, true);
                let v = self.expr(value, None, true);
                match r {
                    Val::Type(t) => self.field_write(t, name, None, v, at),
                    other => {
                        let ty = other.ty();
                        let (owner, _) = self.field_owner(ty.as_deref(), name);
                        self.field_write_opt(owner, name, other.var(), v, at)
                    }
                }
            }
            _ => unreachable!("parser rejects other assignment targets"),
        }
    }

    fn value_type_of_def(&self, name: &str) -> Option<String> {
        // The last statement emitted defined `name`; recover its type.
        let last = self.stmts.last()?;
        let s = &self.lw.ir.statements[last.0 as usize];
        match s.kind {
            StmtKind::ObjectInstantiation => s.target_type.clone(),
            StmtKind::Assignment => s.uses.first().and_then(|u| self.local(u)).flatten(),
            _ if s.def.as_deref() == Some(name) => self.call_return_type(s),
            _ => None,
        }
    }

    fn call_return_type(&self, s: &Statement) -> Option<String> {
        let target = s.target_type.as_deref()?;
        match s.kind {
            StmtKind::MethodInvocation | StmtKind::StaticInvocation => {
                let (name, arity) = s.call_signature()?;
                self.lw.ir.lookup_method(target, name, arity)?.return_type.clone()
            }
            StmtKind::FieldRead => {
                self.lw.ir.field_of(target, s.member.as_deref()?).map(|(_, f)| f.ty.clone())
            }
            _ => None,
        }
    }

    fn field_owner(&self, ty: Option<&str>, field: &str) -> (Option<String>, Option<String>) {
        match ty {
            Some(t) => match self.lw.ir.field_of(t, field) {
                Some((owner, f)) => (Some(owner.to_string()), Some(f.ty.clone())),
                None => (Some(t.to_string()), None),
            },
            None => (None, None),
        }
    }

    fn field_write(&mut self, owner: String, field: &str, receiver: Option<String>, v: Val, at: (u32, u32)) {
        self.field_write_opt(Some(owner), field, receiver, v, at)
    }

    fn field_write_opt(
        &mut self,
        owner: Option<String>,
        field: &str,
        receiver: Option<String>,
        v: Val,
        at: (u32, u32),
    ) {
        let uses: Vec<String> = receiver.iter().cloned().chain(v.var()).collect();
        let id = self.emit(StmtKind::FieldWrite, owner, Some(field.to_string()), None, uses, at.0, at.1);
        self.lw.ir.statements[id.0 as usize].receiver = receiver;
    }

    fn dest(&mut self, dest: Option<String>, want: bool) -> Option<String> {
        match dest {
            Some(d) => Some(d),
            None if want => Some(self.temp()),
            None => None,
        }
    }

    fn args(&mut self, args: &[Expr]) -> Vec<Option<String>> {
        args.iter().map(|a| self.expr(a, None, true).var()).collect()
    }

    /// Lowers `e`; when `dest` is given, the producing statement defines it.
    fn expr(&mut self, e: &Expr, dest: Option<String>, want: bool) -> Val {
        let at = (e.line, e.col);
        match &e.kind {
            ExprKind::Literal => Val::Const,
            ExprKind::This => Val::Var("this".into(), Some(self.owner.clone())),
            ExprKind::Name(n) => {
                if let Some(ty) = self.local(n) {
                    return Val::Var(n.clone(), ty);
                }
                if let Some((owner, field)) = self.field_of_self(n) {
                    let receiver = if field.is_static { None } else { Some("this".to_string()) };
                    let def = self.dest(dest, true);
                    let id = self.emit(
                        StmtKind::FieldRead,
                        Some(owner),
                        Some(n.clone()),
                        def.clone(),
                        receiver.iter().cloned().collect(),
                        at.0,
                        at.1,
                    );
                    self.lw.ir.statements[id.0 as usize].receiver = receiver;
                    return Val::Var(def.expect("field read defines"), Some(field.ty));
                }
                if let Some(q) = self.lw.names.get(n).cloned() {
                    return Val::Type(q);
                }
                self.lw.err(DiagnosticKind::UnresolvedType, at.0, at.1, format!("unresolved name `{n}`"));
                Val::Const
            }
            ExprKind::New { ty, args } => {
                let ty = self.lw.resolve_type(ty, at.0, at.1);
                let args = self.args(args);
                let def = self.dest(dest, true);
                let member = format!("<init>/{}", args.len());
                self.emit_call(
                    StmtKind::ObjectInstantiation,
                    Some(ty.clone()),
                    member,
                    None,
                    args,
                    def.clone(),
                    at,
                );
                Val::Var(def.expect("new defines"), Some(ty))
            }
            ExprKind::Call { receiver, name, args } => {
                let (kind, target, recv) = match receiver {
                    None => {
                        let found = self
                            .lw
                            .ir
                            .lookup_method(&self.owner, name, args.len())
                            .map(|m| (m.is_static, m.owner.clone()));
                        match found {
                            Some((true, owner)) => (StmtKind::StaticInvocation, Some(owner), None),
                            Some((false, _)) => (
                                StmtKind::MethodInvocation,
                                Some(self.owner.clone()),
                                Some("this".to_string()),
                            ),
                            None if self.is_static => {
                                (StmtKind::StaticInvocation, Some(self.owner.clone()), None)
                            }
                            None => (
                                StmtKind::MethodInvocation,
                                Some(self.owner.clone()),
                                Some("this".to_string()),
                            ),
                        }
                    }
                    Some(r) => match self.expr(r, None, true) {
                        Val::Type(t) => (StmtKind::StaticInvocation, Some(t), None),
                        Val::Var(v, ty) => (StmtKind::MethodInvocation, ty, Some(v)),
                        Val::Const => (StmtKind::MethodInvocation, None, None),
                    },
                };
                let args = self.args(args);
                let member = format!("{}/{}", name, args.len());
                let def = self.dest(dest, want);
                let id = self.emit_call(kind, target, member, recv, args, def.clone(), at);
                let ret = self.call_return_type(&self.lw.ir.statements[id.0 as usize].clone());
                match def {
                    Some(d) => Val::Var(d, ret),
                    None => Val::Const,
                }
            }
            ExprKind::Field { receiver, name } => {
                let r = self.expr(receiver, None, true);
                let (target, recv, ty) = match r {
                    Val::Type(t) => {
                        let (owner, ty) = self.field_owner(Some(&t), name);
                        (owner, None, ty)
                    }
                    other => {
                        let (owner, ty) = self.field_owner(other.ty().as_deref(), name);
                        (owner, other.var(), ty)
                    }
                };
                let def = self.dest(dest, true);
                let id = self.emit(
                    StmtKind::FieldRead,
                    target,
                    Some(name.clone()),
                    def.clone(),
                    recv.iter().cloned().collect(),
                    at.0,
                    at.1,
                );
                self.lw.ir.statements[id.0 as usize].receiver = recv;
                Val::Var(def.expect("field read defines"), ty)
            }
            ExprKind::Binary { lhs, rhs } => {
                let a = self.expr(lhs, None, true);
                let b = self.expr(rhs, None, true);
                let def = self.dest(dest, want);
                let uses = a.var().into_iter().chain(b.var()).collect();
                self.emit(StmtKind::Other, None, None, def.clone(), uses, at.0, at.1);
                def.map(|d| Val::Var(d, None)).unwrap_or(Val::Const)
            }
            ExprKind::Unary(inner) => {
                let a = self.expr(inner, None, true);
                let def = self.dest(dest, want);
                self.emit(StmtKind::Other, None, None, def.clone(), a.var().into_iter().collect(), at.0, at.1);
                def.map(|d| Val::Var(d, None)).unwrap_or(Val::Const)
            }
        }
    }
}
