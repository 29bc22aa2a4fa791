use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::ast::*;
use super::FrontendError;
use crate::bigraph::{
    close, make_atom, merge, nest, parallel, share, Bigraph, BigraphError, Control, Param, ParamSort,
    Signature,
};
use crate::engine::{Action, BrsSpec, PriorityClass, Semantics};
use crate::matcher::{ConditionPlace, MatchConstraint};
use crate::rewriting::{ReactionRule, RuleLabel};
use crate::scalar::{parse_decimal, Scalar};

type EResult<T> = Result<T, FrontendError>;

/// Value of a parameter expression. Floats are kept exact until they become
/// node parameters.
#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i64),
    Float(BigRational),
    Str(String),
}

impl Value {
    fn to_param(&self) -> Param {
        match self {
            Value::Int(i) => Param::Int(*i),
            Value::Float(r) => Param::Float(Scalar::to_f64(r)),
            Value::Str(s) => Param::Str(s.clone()),
        }
    }

    fn sort(&self) -> ParamSort {
        match self {
            Value::Int(_) => ParamSort::Int,
            Value::Float(_) => ParamSort::Float,
            Value::Str(_) => ParamSort::Str,
        }
    }

    fn to_rational(&self) -> Option<BigRational> {
        match self {
            Value::Int(i) => Some(BigRational::from_integer(BigInt::from(*i))),
            Value::Float(r) => Some(r.clone()),
            Value::Str(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(r) => {
                let s = r.render();
                if s.contains('.') || s.contains('e') {
                    f.write_str(&s)
                } else {
                    write!(f, "{s}.0")
                }
            }
            Value::Str(s) => write!(f, "{s:?}"),
        }
    }
}

fn eval_err<T>(msg: impl Into<String>) -> EResult<T> {
    Err(FrontendError::Eval(msg.into()))
}

fn arith(op: char, a: Value, b: Value) -> EResult<Value> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => {
            let r = match op {
                '+' => x.checked_add(y),
                '-' => x.checked_sub(y),
                '*' => x.checked_mul(y),
                _ => {
                    if y == 0 {
                        return eval_err("division by zero");
                    }
                    x.checked_div(y)
                }
            };
            r.map(Value::Int)
                .ok_or_else(|| FrontendError::Eval("integer overflow".into()))
        }
        (a, b) => {
            let (Some(x), Some(y)) = (a.to_rational(), b.to_rational()) else {
                return eval_err("arithmetic on string values");
            };
            Ok(Value::Float(match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                _ => {
                    if y.is_zero() {
                        return eval_err("division by zero");
                    }
                    x / y
                }
            }))
        }
    }
}

fn literal(text: &str) -> EResult<Value> {
    if text.contains(['.', 'e', 'E']) {
        parse_decimal(text)
            .map(Value::Float)
            .ok_or_else(|| FrontendError::Eval(format!("bad number {text}")))
    } else {
        text.parse()
            .map(Value::Int)
            .map_err(|_| FrontendError::Eval(format!("integer literal {text} out of range")))
    }
}

type Env = HashMap<String, Value>;

struct BigDef {
    params: Option<Vec<String>>,
    expr: Expr,
    order: usize,
    value: Option<Bigraph>,
}

enum ReactDef {
    Plain(Box<ReactionRule>),
    Fun(Box<ReactAst>),
}

struct Elab {
    semantics: Semantics,
    sig: Signature,
    ctrl_order: HashMap<String, usize>,
    /// Parameterised controls whose sorts are fixed at first use.
    pending: HashMap<String, usize>,
    domains: HashMap<String, Vec<Value>>,
    bigs: HashMap<String, BigDef>,
    reacts: HashMap<String, ReactDef>,
    defined: HashMap<String, usize>,
    instances: HashMap<String, ReactionRule>,
}

/// Evaluates an expression that may only use the controls of `sig`.
pub(super) fn eval_closed(expr: &Expr, sig: &Signature) -> EResult<Bigraph> {
    let mut e = Elab::new(Semantics::Brs);
    for c in sig.iter() {
        e.ctrl_order.insert(c.name.clone(), 0);
    }
    e.sig = sig.clone();
    e.eval(expr, &Env::new(), usize::MAX, "expression")
}

/// Builds a validated system from a parsed model.
pub fn elaborate(ast: &Ast) -> EResult<BrsSpec> {
    let mut e = Elab::new(ast.brs.kind);
    for (order, d) in ast.decls.iter().enumerate() {
        e.declare(d, order)?;
    }
    e.block(&ast.brs, ast.decls.len())
}

fn sorts_of(values: &[Value]) -> Vec<ParamSort> {
    values.iter().map(Value::sort).collect()
}

fn instance_name(name: &str, args: &[Value]) -> String {
    let parts: Vec<String> = args.iter().map(|v| v.to_string()).collect();
    format!("{name}({})", parts.join(","))
}

fn free_vars(p: &PExpr, out: &mut Vec<String>) {
    match p {
        PExpr::Var(v, _) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        PExpr::Neg(a) => free_vars(a, out),
        PExpr::Bin(_, a, b) => {
            free_vars(a, out);
            free_vars(b, out);
        }
        PExpr::Num(_) | PExpr::Str(_) => {}
    }
}

impl Elab {
    fn new(semantics: Semantics) -> Self {
        Elab {
            semantics,
            sig: Signature::new(),
            ctrl_order: HashMap::new(),
            pending: HashMap::new(),
            domains: HashMap::new(),
            bigs: HashMap::new(),
            reacts: HashMap::new(),
            defined: HashMap::new(),
            instances: HashMap::new(),
        }
    }

    fn define(&mut self, name: &str, pos: Pos, order: usize) -> EResult<()> {
        if self.defined.contains_key(name) {
            return Err(FrontendError::DuplicateDefinition {
                name: name.to_string(),
                line: pos.line,
            });
        }
        self.defined.insert(name.to_string(), order);
        Ok(())
    }

    fn declare(&mut self, d: &Decl, order: usize) -> EResult<()> {
        match d {
            Decl::Ctrl {
                name,
                atomic,
                params,
                arity,
                pos,
            } => {
                self.define(name, *pos, order)?;
                let c = if *atomic {
                    Control::atomic(name.clone(), *arity)
                } else {
                    Control::new(name.clone(), *arity)
                };
                self.sig.insert(c);
                self.ctrl_order.insert(name.clone(), order);
                if let Some(ps) = params {
                    self.pending.insert(name.clone(), ps.len());
                }
            }
            Decl::Values {
                name,
                sort,
                values,
                pos,
            } => {
                self.define(name, *pos, order)?;
                let vs = self.domain(*sort, values)?;
                self.domains.insert(name.clone(), vs);
            }
            Decl::Big {
                name,
                params,
                expr,
                pos,
            } => {
                self.define(name, *pos, order)?;
                let value = if params.is_none() {
                    Some(self.eval(expr, &Env::new(), order, &format!("big {name}"))?)
                } else {
                    None
                };
                self.bigs.insert(
                    name.clone(),
                    BigDef {
                        params: params.clone(),
                        expr: expr.clone(),
                        order,
                        value,
                    },
                );
            }
            Decl::React(r) => {
                self.define(&r.name, r.pos, order)?;
                let def = if r.params.is_none() {
                    let rule = self.build_rule(r, &Env::new(), r.name.clone(), order)?;
                    ReactDef::Plain(Box::new(rule))
                } else {
                    ReactDef::Fun(Box::new(r.clone()))
                };
                self.reacts.insert(r.name.clone(), def);
            }
        }
        Ok(())
    }

    fn domain(&self, sort: ParamSort, values: &ValuesAst) -> EResult<Vec<Value>> {
        let env = Env::new();
        let coerce = |v: Value| -> EResult<Value> {
            match (sort, v) {
                (ParamSort::Int, v @ Value::Int(_)) => Ok(v),
                (ParamSort::Float, Value::Int(i)) => {
                    Ok(Value::Float(BigRational::from_integer(BigInt::from(i))))
                }
                (ParamSort::Float, v @ Value::Float(_)) => Ok(v),
                (s, v) => eval_err(format!("value {v} is not of sort {s}")),
            }
        };
        match values {
            ValuesAst::Set(items) => items
                .iter()
                .map(|p| self.pexpr(p, &env).and_then(coerce))
                .collect(),
            ValuesAst::Range(a, step, b) => {
                let a = coerce(self.pexpr(a, &env)?)?;
                let b = coerce(self.pexpr(b, &env)?)?;
                let step = match step {
                    Some(s) => coerce(self.pexpr(s, &env)?)?,
                    None => coerce(Value::Int(1))?,
                };
                let (a, s, b) = (
                    a.to_rational().unwrap(),
                    step.to_rational().unwrap(),
                    b.to_rational().unwrap(),
                );
                if s <= BigRational::zero() {
                    return eval_err("range step must be positive");
                }
                let mut out = Vec::new();
                let mut x = a;
                while x <= b {
                    out.push(match sort {
                        ParamSort::Int => Value::Int(x.to_integer().to_i64().unwrap_or(i64::MAX)),
                        _ => Value::Float(x.clone()),
                    });
                    if out.len() > 1_000_000 {
                        return eval_err("range too large");
                    }
                    x += &s;
                }
                Ok(out)
            }
        }
    }

    fn pexpr(&self, p: &PExpr, env: &Env) -> EResult<Value> {
        match p {
            PExpr::Num(t) => literal(t),
            PExpr::Str(s) => Ok(Value::Str(s.clone())),
            PExpr::Var(v, pos) => {
                if let Some(x) = env.get(v) {
                    return Ok(x.clone());
                }
                match self.domains.get(v) {
                    Some(vs) if vs.len() == 1 => Ok(vs[0].clone()),
                    Some(_) => eval_err(format!(
                        "`{v}` (line {}) denotes a set of values; it can only instantiate \
                         parameterised rules, bigraphs or predicates in the brs block",
                        pos.line
                    )),
                    None => Err(FrontendError::UnknownIdentifier {
                        name: v.clone(),
                        line: pos.line,
                        col: pos.col,
                    }),
                }
            }
            PExpr::Neg(a) => arith('-', Value::Int(0), self.pexpr(a, env)?),
            PExpr::Bin(op, a, b) => arith(*op, self.pexpr(a, env)?, self.pexpr(b, env)?),
        }
    }

    fn eval(&mut self, e: &Expr, env: &Env, limit: usize, ctx: &str) -> EResult<Bigraph> {
        let wrap = |source: BigraphError| FrontendError::Bigraph {
            context: ctx.to_string(),
            source,
        };
        Ok(match e {
            Expr::One => Bigraph::unit(),
            Expr::Id => Bigraph::id(),
            Expr::IdLink(ns) => Bigraph::id_link(ns.iter().cloned()),
            Expr::Idle(ns) => Bigraph::idle(ns.iter().cloned()),
            Expr::Empty => Bigraph::empty(),
            Expr::Nest(a, b) => {
                let a = self.eval(a, env, limit, ctx)?;
                let b = self.eval(b, env, limit, ctx)?;
                nest(&a, &b).map_err(wrap)?
            }
            Expr::Merge(a, b) => {
                let a = self.eval(a, env, limit, ctx)?;
                let b = self.eval(b, env, limit, ctx)?;
                merge(&a, &b).map_err(wrap)?
            }
            Expr::Par(a, b) => {
                let a = self.eval(a, env, limit, ctx)?;
                let b = self.eval(b, env, limit, ctx)?;
                parallel(&a, &b).map_err(wrap)?
            }
            Expr::Close(x, a, _) => {
                let a = self.eval(a, env, limit, ctx)?;
                close(x, &a).map_err(wrap)?
            }
            Expr::Share {
                contents,
                placement,
                sites,
                host,
                ..
            } => {
                let c = self.eval(contents, env, limit, ctx)?;
                let h = self.eval(host, env, limit, ctx)?;
                share(&c, placement, *sites, &h).map_err(wrap)?
            }
            Expr::Ref {
                name,
                args,
                names,
                pos,
            } => self.eval_ref(name, args, names.as_deref(), *pos, env, limit, ctx)?,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn eval_ref(
        &mut self,
        name: &str,
        args: &[PExpr],
        names: Option<&[String]>,
        pos: Pos,
        env: &Env,
        limit: usize,
        ctx: &str,
    ) -> EResult<Bigraph> {
        let values = args
            .iter()
            .map(|a| self.pexpr(a, env))
            .collect::<EResult<Vec<_>>>()?;
        if self.ctrl_order.get(name).is_some_and(|&o| o < limit) {
            if let Some(&n) = self.pending.get(name) {
                if values.len() != n {
                    return eval_err(format!(
                        "control `{name}` takes {n} parameter(s), {} given (line {})",
                        values.len(),
                        pos.line
                    ));
                }
                let c = self.sig.get(name).expect("declared control");
                let c = Control::clone(c).with_params(sorts_of(&values));
                self.sig.replace(c);
                self.pending.remove(name);
            }
            let control = self.sig.get(name).expect("declared control").clone();
            let params = values.iter().map(Value::to_param).collect();
            let names = names.unwrap_or(&[]);
            return make_atom(control, params, names).map_err(|source| FrontendError::Bigraph {
                context: ctx.to_string(),
                source,
            });
        }
        let Some(def) = self.bigs.get(name).filter(|d| d.order < limit) else {
            return Err(FrontendError::UnknownIdentifier {
                name: name.to_string(),
                line: pos.line,
                col: pos.col,
            });
        };
        if names.is_some() {
            return eval_err(format!(
                "`{name}` is a bigraph, not a control; names cannot be attached to it (line {})",
                pos.line
            ));
        }
        match (&def.params, &def.value) {
            (None, Some(v)) => {
                if !values.is_empty() {
                    return eval_err(format!("bigraph `{name}` takes no parameters (line {})", pos.line));
                }
                Ok(v.clone())
            }
            (Some(ps), _) => {
                if ps.len() != values.len() {
                    return eval_err(format!(
                        "bigraph `{name}` takes {} parameter(s), {} given (line {})",
                        ps.len(),
                        values.len(),
                        pos.line
                    ));
                }
                let local: Env = ps.iter().cloned().zip(values).collect();
                let (expr, order) = (def.expr.clone(), def.order);
                self.eval(&expr, &local, order, &format!("big {name}"))
            }
            (None, None) => unreachable!("plain bigraphs are evaluated eagerly"),
        }
    }

    fn build_rule(&mut self, r: &ReactAst, env: &Env, name: String, limit: usize) -> EResult<ReactionRule> {
        let ctx = format!("react {name}");
        let lhs = self.eval(&r.lhs, env, limit, &ctx)?;
        let rhs = self.eval(&r.rhs, env, limit, &ctx)?;
        let label = match &r.label {
            None => RuleLabel::Plain,
            Some(p) => {
                let Some(v) = self.pexpr(p, env)?.to_rational() else {
                    return eval_err(format!("reaction `{name}`: label must be numeric"));
                };
                match self.semantics {
                    Semantics::Brs => {
                        return Err(FrontendError::MixedLabelKinds(format!(
                            "reaction `{name}` carries a label but the system is brs"
                        )))
                    }
                    Semantics::Sbrs => RuleLabel::Rate(v),
                    Semantics::Pbrs | Semantics::Abrs => RuleLabel::Weight(v),
                }
            }
        };
        let mut conds = Vec::with_capacity(r.conds.len());
        for c in &r.conds {
            conds.push(MatchConstraint {
                present: c.present,
                place: if c.in_param {
                    ConditionPlace::Param
                } else {
                    ConditionPlace::Ctx
                },
                pattern: self.eval(&c.pattern, env, limit, &ctx)?,
            });
        }
        let rule_err = |source| FrontendError::Rule {
            name: name.clone(),
            source,
        };
        ReactionRule::new(name.clone(), lhs, rhs, r.inst.clone())
            .and_then(|rule| rule.with_conditions(conds))
            .and_then(|rule| rule.with_label(label))
            .map_err(rule_err)
    }

    /// All argument tuples of a reference, ranging set-valued identifiers over
    /// their domains.
    fn expand(&self, args: &[PExpr]) -> EResult<Vec<Vec<Value>>> {
        let mut vars = Vec::new();
        for a in args {
            free_vars(a, &mut vars);
        }
        let mut envs = vec![Env::new()];
        for v in vars {
            let Some(vs) = self.domains.get(&v) else {
                continue;
            };
            envs = envs
                .into_iter()
                .flat_map(|env| {
                    let v = v.clone();
                    vs.iter().map(move |x| {
                        let mut e = env.clone();
                        e.insert(v.clone(), x.clone());
                        e
                    })
                })
                .collect();
        }
        let mut out: Vec<Vec<Value>> = Vec::new();
        for env in &envs {
            let tuple = args
                .iter()
                .map(|a| self.pexpr(a, env))
                .collect::<EResult<Vec<_>>>()?;
            if !out.contains(&tuple) {
                out.push(tuple);
            }
        }
        Ok(out)
    }

    fn rule_instances(&mut self, r: &RuleRef) -> EResult<Vec<ReactionRule>> {
        let unknown = || FrontendError::UnknownRuleInBlock {
            name: r.name.clone(),
            line: r.pos.line,
        };
        match (self.reacts.get(&r.name), &r.args) {
            (None, _) => Err(unknown()),
            (Some(ReactDef::Plain(rule)), None) => Ok(vec![(**rule).clone()]),
            (Some(ReactDef::Plain(_)), Some(_)) => eval_err(format!(
                "reaction `{}` takes no parameters (line {})",
                r.name, r.pos.line
            )),
            (Some(ReactDef::Fun(_)), None) => eval_err(format!(
                "parameterised reaction `{}` needs arguments (line {})",
                r.name, r.pos.line
            )),
            (Some(ReactDef::Fun(ast)), Some(args)) => {
                let ast = ast.clone();
                let params = ast.params.clone().unwrap_or_default();
                if params.len() != args.len() {
                    return eval_err(format!(
                        "reaction `{}` takes {} parameter(s), {} given (line {})",
                        r.name,
                        params.len(),
                        args.len(),
                        r.pos.line
                    ));
                }
                let order = self.defined[&r.name];
                let mut out = Vec::new();
                for tuple in self.expand(args)? {
                    let name = instance_name(&r.name, &tuple);
                    if let Some(rule) = self.instances.get(&name) {
                        out.push(rule.clone());
                        continue;
                    }
                    let env: Env = params.iter().cloned().zip(tuple).collect();
                    let rule = self.build_rule(&ast, &env, name.clone(), order)?;
                    self.instances.insert(name, rule.clone());
                    out.push(rule);
                }
                Ok(out)
            }
        }
    }

    fn big_instances(&mut self, r: &RuleRef) -> EResult<Vec<(String, Bigraph)>> {
        let Some(def) = self.bigs.get(&r.name) else {
            return Err(FrontendError::UnknownIdentifier {
                name: r.name.clone(),
                line: r.pos.line,
                col: r.pos.col,
            });
        };
        match &r.args {
            None => {
                if def.params.is_some() {
                    return eval_err(format!(
                        "parameterised bigraph `{}` needs arguments (line {})",
                        r.name, r.pos.line
                    ));
                }
                Ok(vec![(r.name.clone(), def.value.clone().expect("evaluated"))])
            }
            Some(args) => {
                let mut out = Vec::new();
                for tuple in self.expand(args)? {
                    let pexprs: Vec<PExpr> = tuple.iter().map(value_expr).collect();
                    let b = self.eval_ref(&r.name, &pexprs, None, r.pos, &Env::new(), usize::MAX, "brs block")?;
                    out.push((instance_name(&r.name, &tuple), b));
                }
                Ok(out)
            }
        }
    }

    fn block(mut self, brs: &BrsAst, base: usize) -> EResult<BrsSpec> {
        for (i, d) in brs.decls.iter().enumerate() {
            match d {
                Decl::Values { .. } => self.declare(d, base + i)?,
                _ => return eval_err("only int and float declarations may appear in a brs block"),
            }
        }

        let Some(init_ref) = &brs.init else {
            return Err(FrontendError::Syntax {
                line: brs.pos.line,
                col: brs.pos.col,
                msg: "brs block has no `init`".into(),
            });
        };
        let mut inits = self.big_instances(init_ref)?;
        if inits.len() != 1 {
            return eval_err("init must denote a single bigraph");
        }
        let (init_name, init) = inits.pop().unwrap();
        if !init.is_ground() {
            return Err(FrontendError::InitNotGround);
        }

        let mut classes = Vec::new();
        for c in &brs.classes {
            let mut rules: Vec<ReactionRule> = Vec::new();
            for r in &c.rules {
                for rule in self.rule_instances(r)? {
                    if self.semantics != Semantics::Brs && !c.instantaneous && rule.label == RuleLabel::Plain {
                        return Err(FrontendError::MixedLabelKinds(format!(
                            "reaction `{}` has no {} but the system is {}",
                            rule.name,
                            if self.semantics == Semantics::Sbrs { "rate" } else { "weight" },
                            self.semantics
                        )));
                    }
                    if !rules.iter().any(|x| x.name == rule.name) {
                        rules.push(rule);
                    }
                }
            }
            classes.push(PriorityClass {
                rules,
                instantaneous: c.instantaneous,
            });
        }

        let mut preds = Vec::new();
        for p in &brs.preds {
            for (name, b) in self.big_instances(p)? {
                if !b.is_solid() {
                    return Err(FrontendError::PredicateNotSolid(name));
                }
                preds.push((name, b));
            }
        }

        let actions = self.actions(brs, &classes)?;
        Ok(BrsSpec {
            semantics: self.semantics,
            signature: self.sig,
            init_name,
            init,
            classes,
            preds,
            actions,
        })
    }

    fn actions(&mut self, brs: &BrsAst, classes: &[PriorityClass]) -> EResult<Vec<Action>> {
        if self.semantics != Semantics::Abrs {
            if !brs.actions.is_empty() {
                return Err(FrontendError::ActionPartition(format!(
                    "actions are only allowed in abrs, not {}",
                    self.semantics
                )));
            }
            return Ok(Vec::new());
        }
        let stepping: BTreeSet<&str> = classes
            .iter()
            .filter(|c| !c.instantaneous)
            .flat_map(|c| c.rules.iter().map(|r| r.name.as_str()))
            .collect();
        let mut owner: HashMap<String, String> = HashMap::new();
        let mut out = Vec::new();
        for (name, refs) in &brs.actions {
            if out.iter().any(|a: &Action| &a.name == name) {
                return Err(FrontendError::ActionPartition(format!("action `{name}` is declared twice")));
            }
            let mut rules = Vec::new();
            for r in refs {
                for rule in self.rule_instances(r)? {
                    if !stepping.contains(rule.name.as_str()) {
                        return Err(FrontendError::ActionPartition(format!(
                            "rule `{}` of action `{name}` is not in a non-instantaneous class",
                            rule.name
                        )));
                    }
                    if let Some(prev) = owner.insert(rule.name.clone(), name.clone()) {
                        if &prev != name {
                            return Err(FrontendError::ActionPartition(format!(
                                "rule `{}` belongs to actions `{prev}` and `{name}`",
                                rule.name
                            )));
                        }
                        continue;
                    }
                    rules.push(rule.name);
                }
            }
            out.push(Action {
                name: name.clone(),
                rules,
            });
        }
        if let Some(r) = stepping.iter().find(|r| !owner.contains_key(**r)) {
            return Err(FrontendError::ActionPartition(format!("rule `{r}` belongs to no action")));
        }
        Ok(out)
    }
}

fn value_expr(v: &Value) -> PExpr {
    match v {
        Value::Int(i) if *i < 0 => PExpr::Neg(Box::new(PExpr::Num((-(*i as i128)).to_string()))),
        Value::Int(i) => PExpr::Num(i.to_string()),
        Value::Float(r) => PExpr::Bin(
            '/',
            Box::new(PExpr::Num(format!("{}.0", r.numer()))),
            Box::new(PExpr::Num(r.denom().to_string())),
        ),
        Value::Str(s) => PExpr::Str(s.clone()),
    }
}
