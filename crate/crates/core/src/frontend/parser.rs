use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::FrontendError;
use crate::bigraph::ParamSort;
use crate::engine::Semantics;

const KEYWORDS: &[&str] = &[
    "ctrl", "atomic", "fun", "big", "react", "begin", "end", "init", "rules", "preds", "actions",
    "int", "float", "if", "in", "param", "ctx", "share", "by", "id",
];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, FrontendError>;

/// Parses a complete model.
pub fn parse(src: &str) -> PResult<Ast> {
    Parser::new(src)?.program()
}

/// Parses a single bigraph expression.
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

impl Parser {
    pub fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> Pos {
        let t = &self.toks[self.pos];
        Pos {
            line: t.line,
            col: t.col,
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let p = self.here();
        Err(FrontendError::Syntax {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(s) => format!("number {s}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.error(format!("expected `{k}`, found {}", self.describe()))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn usize_lit(&mut self) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Num(s) => match s.parse() {
                Ok(n) => {
                    self.bump();
                    Ok(n)
                }
                Err(_) => self.error(format!("expected a natural number, found {s}")),
            },
            _ => self.error(format!("expected a natural number, found {}", self.describe())),
        }
    }

    fn program(&mut self) -> PResult<Ast> {
        let mut decls = Vec::new();
        let mut brs = None;
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Ident(k) if k == "begin" => {
                    if brs.is_some() {
                        return self.error("a model has exactly one brs block");
                    }
                    brs = Some(self.brs_block()?);
                }
                _ => decls.push(self.decl()?),
            }
        }
        match brs {
            Some(brs) => Ok(Ast { decls, brs }),
            None => self.error("missing `begin brs ... end` block"),
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        let pos = self.here();
        if self.is_kw("int") || self.is_kw("float") {
            return self.values_decl();
        }
        let atomic = self.eat_kw("atomic");
        let fun = self.eat_kw("fun");
        if self.eat_kw("ctrl") {
            let name = self.ident()?;
            let params = if fun { Some(self.param_names()?) } else { None };
            self.expect_sym("=")?;
            let arity = self.usize_lit()?;
            self.expect_sym(";")?;
            return Ok(Decl::Ctrl {
                name,
                atomic,
                params,
                arity,
                pos,
            });
        }
        if atomic {
            return self.error(format!("expected `ctrl`, found {}", self.describe()));
        }
        if self.eat_kw("big") {
            let name = self.ident()?;
            let params = if fun { Some(self.param_names()?) } else { None };
            self.expect_sym("=")?;
            let expr = self.expr()?;
            self.expect_sym(";")?;
            return Ok(Decl::Big {
                name,
                params,
                expr,
                pos,
            });
        }
        if self.eat_kw("react") {
            let name = self.ident()?;
            let params = if fun { Some(self.param_names()?) } else { None };
            self.expect_sym("=")?;
            let lhs = self.expr()?;
            let label = if self.eat_sym("-->") {
                None
            } else if self.eat_sym("-[") {
                let e = self.pexpr()?;
                self.expect_sym("]->")?;
                Some(e)
            } else {
                return self.error(format!("expected `-->` or `-[`, found {}", self.describe()));
            };
            let rhs = self.expr()?;
            let inst = if self.eat_sym("@") {
                self.expect_sym("[")?;
                let mut v = Vec::new();
                if !self.is_sym("]") {
                    v.push(self.usize_lit()?);
                    while self.eat_sym(",") {
                        v.push(self.usize_lit()?);
                    }
                }
                self.expect_sym("]")?;
                Some(v)
            } else {
                None
            };
            let mut conds = Vec::new();
            if self.eat_kw("if") {
                conds.push(self.condition()?);
                while self.eat_sym(",") {
                    conds.push(self.condition()?);
                }
            }
            self.expect_sym(";")?;
            return Ok(Decl::React(ReactAst {
                name,
                params,
                lhs,
                rhs,
                label,
                inst,
                conds,
                pos,
            }));
        }
        self.error(format!("expected a declaration, found {}", self.describe()))
    }

    fn param_names(&mut self) -> PResult<Vec<String>> {
        self.expect_sym("(")?;
        let mut v = vec![self.ident()?];
        while self.eat_sym(",") {
            v.push(self.ident()?);
        }
        self.expect_sym(")")?;
        Ok(v)
    }

    fn values_decl(&mut self) -> PResult<Decl> {
        let pos = self.here();
        let sort = if self.eat_kw("int") {
            ParamSort::Int
        } else {
            self.expect_kw("float")?;
            ParamSort::Float
        };
        let name = self.ident()?;
        self.expect_sym("=")?;
        let values = if self.eat_sym("{") {
            let mut v = Vec::new();
            if !self.is_sym("}") {
                v.push(self.pexpr()?);
                while self.eat_sym(",") {
                    v.push(self.pexpr()?);
                }
            }
            self.expect_sym("}")?;
            ValuesAst::Set(v)
        } else if self.eat_sym("[") {
            let a = self.pexpr()?;
            self.expect_sym(":")?;
            let b = self.pexpr()?;
            let range = if self.eat_sym(":") {
                let c = self.pexpr()?;
                ValuesAst::Range(a, Some(b), c)
            } else {
                ValuesAst::Range(a, None, b)
            };
            self.expect_sym("]")?;
            range
        } else {
            ValuesAst::Set(vec![self.pexpr()?])
        };
        self.expect_sym(";")?;
        Ok(Decl::Values {
            name,
            sort,
            values,
            pos,
        })
    }

    fn condition(&mut self) -> PResult<CondAst> {
        let present = !self.eat_sym("!");
        let pattern = self.expr()?;
        self.expect_kw("in")?;
        let in_param = if self.eat_kw("param") {
            true
        } else if self.eat_kw("ctx") {
            false
        } else {
            return self.error(format!("expected `param` or `ctx`, found {}", self.describe()));
        };
        Ok(CondAst {
            present,
            pattern,
            in_param,
        })
    }

    fn rule_ref(&mut self) -> PResult<RuleRef> {
        let pos = self.here();
        let name = self.ident()?;
        let args = if self.eat_sym("(") {
            let mut v = vec![self.pexpr()?];
            while self.eat_sym(",") {
                v.push(self.pexpr()?);
            }
            self.expect_sym(")")?;
            Some(v)
        } else {
            None
        };
        Ok(RuleRef { name, args, pos })
    }

    fn rule_refs(&mut self, close: &str) -> PResult<Vec<RuleRef>> {
        let mut v = Vec::new();
        if !self.is_sym(close) {
            v.push(self.rule_ref()?);
            while self.eat_sym(",") {
                v.push(self.rule_ref()?);
            }
        }
        self.expect_sym(close)?;
        Ok(v)
    }

    fn brs_block(&mut self) -> PResult<BrsAst> {
        let pos = self.here();
        self.expect_kw("begin")?;
        let kind = match self.peek() {
            Tok::Ident(k) => match k.as_str() {
                "brs" => Semantics::Brs,
                "pbrs" => Semantics::Pbrs,
                "sbrs" => Semantics::Sbrs,
                "abrs" => Semantics::Abrs,
                _ => return self.error(format!("unknown system kind `{k}`")),
            },
            _ => return self.error(format!("expected a system kind, found {}", self.describe())),
        };
        self.bump();
        let mut brs = BrsAst {
            kind,
            decls: Vec::new(),
            init: None,
            classes: Vec::new(),
            preds: Vec::new(),
            actions: Vec::new(),
            pos,
        };
        loop {
            if self.eat_kw("end") {
                self.eat_sym(";");
                return Ok(brs);
            }
            if self.is_kw("int") || self.is_kw("float") {
                brs.decls.push(self.values_decl()?);
            } else if self.eat_kw("init") {
                brs.init = Some(self.rule_ref()?);
                self.expect_sym(";")?;
            } else if self.eat_kw("rules") {
                self.expect_sym("=")?;
                self.expect_sym("[")?;
                if !self.is_sym("]") {
                    brs.classes.push(self.class()?);
                    while self.eat_sym(",") {
                        brs.classes.push(self.class()?);
                    }
                }
                self.expect_sym("]")?;
                self.expect_sym(";")?;
            } else if self.eat_kw("preds") {
                self.expect_sym("=")?;
                self.expect_sym("{")?;
                brs.preds = self.rule_refs("}")?;
                self.expect_sym(";")?;
            } else if self.eat_kw("actions") {
                self.expect_sym("=")?;
                self.expect_sym("[")?;
                if !self.is_sym("]") {
                    loop {
                        let name = self.ident()?;
                        self.expect_sym("=")?;
                        self.expect_sym("{")?;
                        let refs = self.rule_refs("}")?;
                        brs.actions.push((name, refs));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("]")?;
                self.expect_sym(";")?;
            } else {
                return self.error(format!("unexpected {} in brs block", self.describe()));
            }
        }
    }

    fn class(&mut self) -> PResult<ClassAst> {
        if self.eat_sym("{") {
            Ok(ClassAst {
                instantaneous: false,
                rules: self.rule_refs("}")?,
            })
        } else if self.eat_sym("(") {
            Ok(ClassAst {
                instantaneous: true,
                rules: self.rule_refs(")")?,
            })
        } else {
            self.error(format!("expected `{{` or `(`, found {}", self.describe()))
        }
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let mut a = self.merge()?;
        while self.eat_sym("||") {
            let b = self.merge()?;
            a = Expr::Par(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn merge(&mut self) -> PResult<Expr> {
        let mut a = self.nest()?;
        while self.eat_sym("|") {
            let b = self.nest()?;
            a = Expr::Merge(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn nest(&mut self) -> PResult<Expr> {
        let pos = self.here();
        if self.eat_sym("/") {
            let names = if self.eat_sym("{") {
                let mut v = vec![self.ident()?];
                while self.eat_sym(",") {
                    v.push(self.ident()?);
                }
                self.expect_sym("}")?;
                v
            } else {
                vec![self.ident()?]
            };
            let mut e = self.nest()?;
            for n in names.into_iter().rev() {
                e = Expr::Close(n, Box::new(e), pos);
            }
            return Ok(e);
        }
        if self.eat_kw("share") {
            let contents = self.nest()?;
            self.expect_kw("by")?;
            self.expect_sym("(")?;
            self.expect_sym("[")?;
            let mut placement = Vec::new();
            if !self.is_sym("]") {
                loop {
                    self.expect_sym("{")?;
                    let mut set = Vec::new();
                    if !self.is_sym("}") {
                        set.push(self.usize_lit()?);
                        while self.eat_sym(",") {
                            set.push(self.usize_lit()?);
                        }
                    }
                    self.expect_sym("}")?;
                    placement.push(set);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym("]")?;
            self.expect_sym(",")?;
            let sites = self.usize_lit()?;
            self.expect_sym(")")?;
            self.expect_kw("in")?;
            let host = self.nest()?;
            return Ok(Expr::Share {
                contents: Box::new(contents),
                placement,
                sites,
                host: Box::new(host),
                pos,
            });
        }
        let p = self.primary()?;
        if self.eat_sym(".") {
            let inner = self.nest()?;
            return Ok(Expr::Nest(Box::new(p), Box::new(inner)));
        }
        Ok(p)
    }

    fn names(&mut self) -> PResult<Vec<String>> {
        // Assumes the opening brace has been consumed.
        let mut v = Vec::new();
        if !self.is_sym("}") {
            v.push(self.ident()?);
            while self.eat_sym(",") {
                v.push(self.ident()?);
            }
        }
        self.expect_sym("}")?;
        Ok(v)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.here();
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    return Ok(Expr::Empty);
                }
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("{") => {
                self.bump();
                Ok(Expr::Idle(self.names()?))
            }
            Tok::Num(n) if n == "1" => {
                self.bump();
                Ok(Expr::One)
            }
            Tok::Ident(k) if k == "id" => {
                self.bump();
                if self.eat_sym("{") {
                    Ok(Expr::IdLink(self.names()?))
                } else {
                    Ok(Expr::Id)
                }
            }
            Tok::Ident(k) if !KEYWORDS.contains(&k.as_str()) => {
                self.bump();
                let args = if self.is_sym("(") && !matches!(self.peek_at(1), Tok::Sym(")")) {
                    self.bump();
                    let mut v = vec![self.pexpr()?];
                    while self.eat_sym(",") {
                        v.push(self.pexpr()?);
                    }
                    self.expect_sym(")")?;
                    v
                } else {
                    Vec::new()
                };
                let names = if self.eat_sym("{") {
                    Some(self.names()?)
                } else {
                    None
                };
                Ok(Expr::Ref {
                    name: k,
                    args,
                    names,
                    pos,
                })
            }
            _ => self.error(format!("expected a bigraph, found {}", self.describe())),
        }
    }

    fn pexpr(&mut self) -> PResult<PExpr> {
        let mut a = self.pterm()?;
        loop {
            let op = if self.eat_sym("+") {
                '+'
            } else if self.eat_sym("-") {
                '-'
            } else {
                return Ok(a);
            };
            let b = self.pterm()?;
            a = PExpr::Bin(op, Box::new(a), Box::new(b));
        }
    }

    fn pterm(&mut self) -> PResult<PExpr> {
        let mut a = self.pfactor()?;
        loop {
            let op = if self.eat_sym("*") {
                '*'
            } else if self.eat_sym("/") {
                '/'
            } else {
                return Ok(a);
            };
            let b = self.pfactor()?;
            a = PExpr::Bin(op, Box::new(a), Box::new(b));
        }
    }

    fn pfactor(&mut self) -> PResult<PExpr> {
        let pos = self.here();
        match self.peek().clone() {
            Tok::Sym("-") => {
                self.bump();
                Ok(PExpr::Neg(Box::new(self.pfactor()?)))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.pexpr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Num(n) => {
                self.bump();
                Ok(PExpr::Num(n))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(PExpr::Str(s))
            }
            Tok::Ident(_) => Ok(PExpr::Var(self.ident()?, pos)),
            _ => self.error(format!("expected a value, found {}", self.describe())),
        }
    }
}
