use crate::bigraph::ParamSort;
use crate::engine::Semantics;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

/// Arithmetic over control parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum PExpr {
    Num(String),
    Str(String),
    Var(String, Pos),
    Neg(Box<PExpr>),
    Bin(char, Box<PExpr>, Box<PExpr>),
}

/// Bigraph expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    One,
    Id,
    /// `id{x, ...}`
    IdLink(Vec<String>),
    /// `{x, ...}`
    Idle(Vec<String>),
    /// `( )`
    Empty,
    /// A control, a named bigraph, or a parameterised one.
    Ref {
        name: String,
        args: Vec<PExpr>,
        names: Option<Vec<String>>,
        pos: Pos,
    },
    Nest(Box<Expr>, Box<Expr>),
    Merge(Box<Expr>, Box<Expr>),
    Par(Box<Expr>, Box<Expr>),
    Close(String, Box<Expr>, Pos),
    Share {
        contents: Box<Expr>,
        placement: Vec<Vec<usize>>,
        sites: usize,
        host: Box<Expr>,
        pos: Pos,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondAst {
    pub present: bool,
    pub pattern: Expr,
    pub in_param: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValuesAst {
    Set(Vec<PExpr>),
    /// `[start:end]` or `[start:step:end]`, both ends inclusive.
    Range(PExpr, Option<PExpr>, PExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactAst {
    pub name: String,
    pub params: Option<Vec<String>>,
    pub lhs: Expr,
    pub rhs: Expr,
    pub label: Option<PExpr>,
    pub inst: Option<Vec<usize>>,
    pub conds: Vec<CondAst>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Ctrl {
        name: String,
        atomic: bool,
        params: Option<Vec<String>>,
        arity: usize,
        pos: Pos,
    },
    Big {
        name: String,
        params: Option<Vec<String>>,
        expr: Expr,
        pos: Pos,
    },
    React(ReactAst),
    Values {
        name: String,
        sort: ParamSort,
        values: ValuesAst,
        pos: Pos,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleRef {
    pub name: String,
    pub args: Option<Vec<PExpr>>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassAst {
    pub instantaneous: bool,
    pub rules: Vec<RuleRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrsAst {
    pub kind: Semantics,
    pub decls: Vec<Decl>,
    pub init: Option<RuleRef>,
    pub classes: Vec<ClassAst>,
    pub preds: Vec<RuleRef>,
    pub actions: Vec<(String, Vec<RuleRef>)>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ast {
    pub decls: Vec<Decl>,
    pub brs: BrsAst,
}

impl Ast {
    pub fn ctrl_count(&self) -> usize {
        self.decls.iter().filter(|d| matches!(d, Decl::Ctrl { .. })).count()
    }

    pub fn react_count(&self) -> usize {
        self.decls.iter().filter(|d| matches!(d, Decl::React(_))).count()
    }
}
