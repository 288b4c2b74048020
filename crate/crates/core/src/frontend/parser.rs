use super::ast::*;
use super::lexer::{Tok, Token};
use super::{Diagnostic, DiagnosticKind};

const MODIFIERS: &[&str] =
    &["static", "entry", "public", "private", "protected", "final", "abstract", "synchronized"];

const KEYWORDS: &[&str] = &[
    "class", "interface", "extends", "implements", "import", "package", "return", "new", "if",
    "else", "while", "for", "try", "catch", "finally", "this", "true", "false", "null", "throws",
    "static", "entry",
];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (u32, u32) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Diagnostic {
        let (line, col) = self.here();
        let mut d = Diagnostic::new(
            DiagnosticKind::Syntax,
            line,
            col,
            format!("unexpected {}", self.peek()),
        );
        d.expected = expected.iter().map(|s| s.to_string()).collect();
        d
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&[p]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?;
        while self.is_punct(".") && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            name.push('.');
            name.push_str(&self.ident()?);
        }
        Ok(name)
    }

    fn type_name(&mut self) -> PResult<String> {
        let mut name = self.qualified_name()?;
        while self.is_punct("[") && matches!(self.peek_at(1), Tok::Punct("]")) {
            self.bump();
            self.bump();
            name.push_str("[]");
        }
        Ok(name)
    }

    pub fn unit(&mut self) -> PResult<Unit> {
        let mut package = None;
        if self.eat_kw("package") {
            package = Some(self.qualified_name()?);
            self.expect_punct(";")?;
        }
        let mut imports = Vec::new();
        while self.is_kw("import") {
            self.bump();
            let (line, col) = self.here();
            imports.push((self.qualified_name()?, line, col));
            self.expect_punct(";")?;
        }
        let mut types = Vec::new();
        while *self.peek() != Tok::Eof {
            types.push(self.type_decl()?);
        }
        Ok(Unit { package, imports, types })
    }

    fn skip_modifiers(&mut self) -> (bool, bool) {
        let (mut is_static, mut is_entry) = (false, false);
        while let Tok::Ident(s) = self.peek() {
            if !MODIFIERS.contains(&s.as_str()) {
                break;
            }
            is_static |= s == "static";
            is_entry |= s == "entry";
            self.bump();
        }
        (is_static, is_entry)
    }

    fn type_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.type_name()?];
        while self.eat_punct(",") {
            out.push(self.type_name()?);
        }
        Ok(out)
    }

    fn type_decl(&mut self) -> PResult<TypeAst> {
        self.skip_modifiers();
        let (line, col) = self.here();
        let is_interface = if self.eat_kw("class") {
            false
        } else if self.eat_kw("interface") {
            true
        } else {
            return Err(self.error(&["class", "interface"]));
        };
        let name = self.ident()?;
        let extends = if self.eat_kw("extends") { self.type_list()? } else { Vec::new() };
        let implements = if self.eat_kw("implements") { self.type_list()? } else { Vec::new() };
        let mut decl = TypeAst {
            name,
            is_interface,
            extends,
            implements,
            fields: Vec::new(),
            methods: Vec::new(),
            stub: false,
            line,
            col,
        };
        if self.eat_punct(";") {
            decl.stub = true;
            return Ok(decl);
        }
        self.expect_punct("{")?;
        while !self.eat_punct("}") {
            if *self.peek() == Tok::Eof {
                return Err(self.error(&["}"]));
            }
            self.member(&mut decl)?;
        }
        Ok(decl)
    }

    fn member(&mut self, decl: &mut TypeAst) -> PResult<()> {
        let (is_static, is_entry) = self.skip_modifiers();
        let (line, col) = self.here();
        // Constructor: `Name(`
        if matches!(self.peek(), Tok::Ident(s) if *s == decl.name)
            && matches!(self.peek_at(1), Tok::Punct("("))
        {
            let name = self.ident()?;
            let (params, throws, body) = self.method_rest(decl.is_interface)?;
            decl.methods.push(MethodAst {
                name,
                return_type: None,
                params,
                throws,
                is_static: false,
                is_entry,
                is_constructor: true,
                body,
                line,
                col,
            });
            return Ok(());
        }
        let ty = self.type_name()?;
        let name = self.ident()?;
        if self.is_punct("(") {
            let (params, throws, body) = self.method_rest(decl.is_interface)?;
            decl.methods.push(MethodAst {
                name,
                return_type: Some(ty),
                params,
                throws,
                is_static,
                is_entry,
                is_constructor: false,
                body,
                line,
                col,
            });
        } else {
            // Field initializers are parsed for syntax only.
            if self.eat_punct("=") {
                self.expr()?;
            }
            self.expect_punct(";")?;
            decl.fields.push(FieldAst { ty, name, is_static, line, col });
        }
        Ok(())
    }

    #[allow(clippy::type_complexity)]
    fn method_rest(
        &mut self,
        in_interface: bool,
    ) -> PResult<(Vec<(String, String)>, Vec<String>, Option<Vec<StmtAst>>)> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.eat_punct(")") {
            loop {
                let ty = self.type_name()?;
                let name = self.ident()?;
                params.push((ty, name));
                if self.eat_punct(")") {
                    break;
                }
                if !self.eat_punct(",") {
                    return Err(self.error(&[",", ")"]));
                }
            }
        }
        let throws = if self.eat_kw("throws") { self.type_list()? } else { Vec::new() };
        if self.eat_punct(";") {
            let _ = in_interface;
            return Ok((params, throws, None));
        }
        let body = self.block()?;
        Ok((params, throws, Some(body)))
    }

    fn block(&mut self) -> PResult<Vec<StmtAst>> {
        self.expect_punct("{")?;
        let mut out = Vec::new();
        while !self.eat_punct("}") {
            if *self.peek() == Tok::Eof {
                return Err(self.error(&["}"]));
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn block_or_stmt(&mut self) -> PResult<Vec<StmtAst>> {
        if self.is_punct("{") {
            self.block()
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    /// `Type name` at the cursor (qualified type, optional `[]`, identifier)?
    fn looks_like_local(&self) -> bool {
        let mut i = 0;
        if !matches!(self.peek_at(i), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
            return false;
        }
        i += 1;
        while matches!(self.peek_at(i), Tok::Punct("."))
            && matches!(self.peek_at(i + 1), Tok::Ident(_))
        {
            i += 2;
        }
        while matches!(self.peek_at(i), Tok::Punct("["))
            && matches!(self.peek_at(i + 1), Tok::Punct("]"))
        {
            i += 2;
        }
        matches!(self.peek_at(i), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
            && matches!(self.peek_at(i + 1), Tok::Punct("=") | Tok::Punct(";"))
    }

    fn stmt(&mut self) -> PResult<StmtAst> {
        let (line, col) = self.here();
        if self.is_punct("{") {
            return Ok(StmtAst::Block(self.block()?));
        }
        if self.eat_kw("if") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then = self.block_or_stmt()?;
            let els = if self.eat_kw("else") { self.block_or_stmt()? } else { Vec::new() };
            return Ok(StmtAst::If { cond, then, els, line, col });
        }
        if self.eat_kw("while") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let body = self.block_or_stmt()?;
            return Ok(StmtAst::While { cond, body, line, col });
        }
        if self.eat_kw("try") {
            let body = self.block()?;
            let mut catches = Vec::new();
            while self.eat_kw("catch") {
                self.expect_punct("(")?;
                let ty = self.type_name()?;
                let name = self.ident()?;
                self.expect_punct(")")?;
                catches.push((ty, name, self.block()?));
            }
            let finally = if self.eat_kw("finally") { self.block()? } else { Vec::new() };
            if catches.is_empty() && finally.is_empty() {
                return Err(self.error(&["catch", "finally"]));
            }
            return Ok(StmtAst::Try { body, catches, finally, line, col });
        }
        if self.eat_kw("return") {
            let value = if self.is_punct(";") { None } else { Some(self.expr()?) };
            self.expect_punct(";")?;
            return Ok(StmtAst::Return { value, line, col });
        }
        if self.looks_like_local() {
            let ty = self.type_name()?;
            let name = self.ident()?;
            let init = if self.eat_punct("=") { Some(self.expr()?) } else { None };
            self.expect_punct(";")?;
            return Ok(StmtAst::Local { ty, name, init, line, col });
        }
        let target = self.expr()?;
        if self.eat_punct("=") {
            if !matches!(target.kind, ExprKind::Name(_) | ExprKind::Field { .. }) {
                return Err(Diagnostic::new(
                    DiagnosticKind::Syntax,
                    line,
                    col,
                    "left-hand side of assignment must be a name or field",
                ));
            }
            let value = self.expr()?;
            self.expect_punct(";")?;
            return Ok(StmtAst::Assign { target, value, line, col });
        }
        self.expect_punct(";")?;
        Ok(StmtAst::Expr(target))
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["==", "!="],
            &["<", ">", "<=", ">="],
            &["+", "-"],
            &["*", "/", "%"],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while LEVELS[level].iter().any(|op| self.is_punct(op)) {
            let (line, col) = self.here();
            self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = Expr {
                kind: ExprKind::Binary { lhs: Box::new(lhs), rhs: Box::new(rhs) },
                line,
                col,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let (line, col) = self.here();
        if self.eat_punct("!") || self.eat_punct("-") {
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Unary(Box::new(inner)), line, col });
        }
        self.postfix()
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if self.eat_punct(")") {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat_punct(")") {
                return Ok(out);
            }
            if !self.eat_punct(",") {
                return Err(self.error(&[",", ")"]));
            }
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.is_punct(".") {
            self.bump();
            let (line, col) = self.here();
            let name = self.ident()?;
            if self.is_punct("(") {
                let args = self.args()?;
                e = Expr {
                    kind: ExprKind::Call { receiver: Some(Box::new(e)), name, args },
                    line,
                    col,
                };
            } else {
                e = Expr { kind: ExprKind::Field { receiver: Box::new(e), name }, line, col };
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let (line, col) = self.here();
        let kind = match self.peek().clone() {
            Tok::Str(_) | Tok::Int(_) => {
                self.bump();
                ExprKind::Literal
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                return Ok(e);
            }
            Tok::Ident(s) if s == "true" || s == "false" || s == "null" => {
                self.bump();
                ExprKind::Literal
            }
            Tok::Ident(s) if s == "this" => {
                self.bump();
                ExprKind::This
            }
            Tok::Ident(s) if s == "new" => {
                self.bump();
                let ty = self.qualified_name()?;
                let args = self.args()?;
                ExprKind::New { ty, args }
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                if self.is_punct("(") {
                    let args = self.args()?;
                    ExprKind::Call { receiver: None, name: s, args }
                } else {
                    ExprKind::Name(s)
                }
            }
            _ => return Err(self.error(&["expression"])),
        };
        Ok(Expr { kind, line, col })
    }
}

#[cfg(test)]
mod tests {
    use super::super::lexer::tokenize;
    use super::*;

    fn parse(src: &str) -> PResult<Unit> {
        Parser::new(tokenize(src).unwrap()).unit()
    }

    #[test]
    fn parses_class_with_members() {
        let unit = parse(
            "package app; import jaas.Subject;\n\
             class A extends B implements C, D { int x; A(int y) { x = y; }\n\
             static void main(String[] args) { Subject s = new Subject(); s.go(1, \"a\"); } }",
        )
        .unwrap();
        assert_eq!(unit.package.as_deref(), Some("app"));
        let a = &unit.types[0];
        assert_eq!(a.extends, vec!["B"]);
        assert_eq!(a.implements, vec!["C", "D"]);
        assert_eq!(a.fields.len(), 1);
        assert_eq!(a.methods.len(), 2);
        assert!(a.methods[0].is_constructor);
        assert_eq!(a.methods[1].params, vec![("String[]".to_string(), "args".to_string())]);
    }

    #[test]
    fn syntax_error_reports_expected_tokens() {
        let err = parse("class A { void m() { x = ; } }").unwrap_err();
        assert_eq!(err.kind, DiagnosticKind::Syntax);
        assert_eq!((err.line, err.col), (1, 26));
        assert_eq!(err.expected, vec!["expression"]);
    }

    #[test]
    fn stub_declaration() {
        let unit = parse("class H implements jaas.CallbackHandler;").unwrap();
        assert!(unit.types[0].stub);
    }
}
