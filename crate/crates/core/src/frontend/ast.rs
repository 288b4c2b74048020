//! Surface syntax tree produced by the parser, before name resolution and
//! lowering into the statement-level IR.

#[derive(Debug, Clone)]
pub struct Unit {
    pub package: Option<String>,
    pub imports: Vec<(String, u32, u32)>,
    pub types: Vec<TypeAst>,
}

#[derive(Debug, Clone)]
pub struct TypeAst {
    pub name: String,
    pub is_interface: bool,
    pub extends: Vec<String>,
    pub implements: Vec<String>,
    pub fields: Vec<FieldAst>,
    pub methods: Vec<MethodAst>,
    /// `class X implements Y;` declares a type whose body lives elsewhere.
    pub stub: bool,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub struct FieldAst {
    pub ty: String,
    pub name: String,
    pub is_static: bool,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub struct MethodAst {
    pub name: String,
    pub return_type: Option<String>,
    pub params: Vec<(String, String)>,
    pub throws: Vec<String>,
    pub is_static: bool,
    pub is_entry: bool,
    pub is_constructor: bool,
    pub body: Option<Vec<StmtAst>>,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub enum StmtAst {
    Local { ty: String, name: String, init: Option<Expr>, line: u32, col: u32 },
    Assign { target: Expr, value: Expr, line: u32, col: u32 },
    Expr(Expr),
    Return { value: Option<Expr>, line: u32, col: u32 },
    If { cond: Expr, then: Vec<StmtAst>, els: Vec<StmtAst>, line: u32, col: u32 },
    While { cond: Expr, body: Vec<StmtAst>, line: u32, col: u32 },
    Try {
        body: Vec<StmtAst>,
        catches: Vec<(String, String, Vec<StmtAst>)>,
        finally: Vec<StmtAst>,
        line: u32,
        col: u32,
    },
    Block(Vec<StmtAst>),
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Literal,
    This,
    Name(String),
    New { ty: String, args: Vec<Expr> },
    Call { receiver: Option<Box<Expr>>, name: String, args: Vec<Expr> },
    Field { receiver: Box<Expr>, name: String },
    Binary { lhs: Box<Expr>, rhs: Box<Expr> },
    Unary(Box<Expr>),
}
