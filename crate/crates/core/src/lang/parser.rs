//! Recursive-descent parser with a small layout rule: a token that starts a
//! line at or left of the innermost open block's column ends the current
//! construct, unless an expression is required there (after `=`, `in`, `->`
//! or an infix operator). Top-level items open a block at column 1; each
//! `let` opens one at its first binding.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexer::{lex, Tok, Token};
use super::syntax::{BaseTy, Const, Expr, ExprKind, Item, Program, RType, UType, UfDecl};
use super::LangError;
use crate::logic::{ArithOp, Pred, RelOp, Sort};
use crate::name::Name;
use crate::span::Span;

type PResult<T> = Result<T, LangError>;

/// Surface names of list and composition sugar.
pub const NIL: &str = "nil";
pub const CONS: &str = "cons";
pub const COMPOSE: &str = "compose";

pub fn parse_program(src: &str) -> PResult<Program> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        if !p.tok().bol || p.tok().span.col != 1 {
            return Err(p.error("top-level items must start in column 1"));
        }
        items.push(p.item()?);
        if p.peek() != &Tok::Eof && !p.tok().bol {
            return Err(p.unexpected("end of item"));
        }
    }
    Ok(Program { items })
}

pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    p.layout = alloc::vec![0];
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_type(src: &str) -> PResult<RType> {
    let mut p = Parser::new(src)?;
    p.layout = alloc::vec![0];
    let t = p.rtype()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_pred(src: &str) -> PResult<Pred> {
    let mut p = Parser::new(src)?;
    p.layout = alloc::vec![0];
    let t = p.pred()?;
    p.expect_eof()?;
    Ok(t)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Columns of the open layout blocks.
    layout: Vec<u32>,
    /// Token index exempt from the layout rule: the start of a required
    /// expression.
    required: Option<usize>,
}

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0, layout: alloc::vec![1], required: None })
    }

    fn tok(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek(&self) -> &Tok {
        &self.tok().tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.tok().span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    /// The current token closes the innermost layout block.
    fn at_boundary(&self) -> bool {
        let t = self.tok();
        t.tok == Tok::Eof
            || (self.required != Some(self.pos) && t.bol && t.span.col <= *self.layout.last().unwrap_or(&0))
    }

    fn error(&self, msg: impl Into<String>) -> LangError {
        LangError::new(self.span(), msg.into())
    }

    fn unexpected(&self, wanted: &str) -> LangError {
        let found = match self.peek() {
            Tok::Eof => String::from("end of input"),
            t => describe(t),
        };
        self.error(format!("expected {wanted}, found {found}"))
    }

    fn is_op(&self, s: &str) -> bool {
        !self.at_boundary() && matches!(self.peek(), Tok::Op(o) if o == s)
    }

    fn eat_op(&mut self, s: &str) -> bool {
        if self.is_op(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, s: &str) -> PResult<()> {
        if self.eat_op(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if !self.at_boundary() && self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&describe(&t)))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(x) if !self.at_boundary() => {
                self.bump();
                Ok(Name::from(x))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    /// A variable name or a parenthesized operator.
    fn binder_name(&mut self) -> PResult<Name> {
        if let (Tok::LParen, Tok::Op(o), Tok::RParen) = (self.peek(), self.peek_at(1), self.peek_at(2)) {
            let o = o.clone();
            self.bump();
            self.bump();
            self.bump();
            return Ok(Name::from(o));
        }
        self.ident()
    }

    /// The name starting a binding, which sits on the block boundary.
    fn head_name(&mut self) -> PResult<Name> {
        self.layout.push(0);
        let name = self.binder_name();
        self.layout.pop();
        name
    }

    // ---- items ----

    fn item(&mut self) -> PResult<Item> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Data => {
                self.bump();
                let name = self.con_name()?;
                let mut params = Vec::new();
                while let Tok::Ident(_) = self.peek() {
                    if self.at_boundary() {
                        break;
                    }
                    params.push(self.ident()?);
                }
                Ok(Item::Data { name, params, span: start.join(self.prev_span()) })
            }
            Tok::Type => {
                self.bump();
                let name = self.con_name()?;
                let mut params = Vec::new();
                while !self.is_op("=") {
                    params.push(self.ident()?);
                }
                self.expect_op("=")?;
                let body = self.rtype()?;
                Ok(Item::Alias { name, params, body, span: start.join(self.prev_span()) })
            }
            Tok::Uninterpreted => {
                self.bump();
                let name = self.ident()?;
                self.expect_op("::")?;
                let mut sorts = alloc::vec![self.sort()?];
                while self.eat_op("->") {
                    sorts.push(self.sort()?);
                }
                let ret = sorts.pop().expect("at least one sort");
                let span = start.join(self.prev_span());
                Ok(Item::Uninterpreted(UfDecl { name, args: sorts, ret, span }))
            }
            Tok::Primitive => {
                self.bump();
                let name = self.binder_name()?;
                self.expect_op("::")?;
                let sig = self.rtype()?;
                Ok(Item::Primitive { name, sig, span: start.join(self.prev_span()) })
            }
            _ => {
                let name = self.head_name()?;
                if self.eat_op("::") {
                    let sig = self.rtype()?;
                    return Ok(Item::Signature { name, sig, span: start.join(self.prev_span()) });
                }
                let params = self.lambda_params("=")?;
                self.expect_op("=")?;
                let body = self.expr()?;
                let span = start.join(self.prev_span());
                Ok(Item::Define { name, body: wrap_lambdas(params, body), span })
            }
        }
    }

    fn con_name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Con(c) => {
                self.bump();
                Ok(Name::from(c))
            }
            _ => Err(self.unexpected("a capitalized name")),
        }
    }

    /// `x`, `_` or `(x:T)` parameters up to the operator `stop`.
    fn lambda_params(&mut self, stop: &str) -> PResult<Vec<(Name, Option<UType>, Span)>> {
        let mut out = Vec::new();
        while !self.is_op(stop) {
            let s = self.span();
            if self.eat(&Tok::LParen) {
                let x = self.ident()?;
                self.expect_op(":")?;
                let t = self.rtype()?.shape();
                self.expect(Tok::RParen)?;
                out.push((x, Some(t), s.join(self.prev_span())));
            } else {
                let x = self.ident()?;
                out.push((x, None, s));
            }
        }
        Ok(out)
    }

    // ---- expressions ----

    /// Exempt the current token from the layout rule.
    fn require(&mut self) {
        self.required = Some(self.pos);
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.require();
        let start = self.span();
        match self.peek() {
            Tok::Backslash if !self.at_boundary() => {
                self.bump();
                let params = self.lambda_params("->")?;
                if params.is_empty() {
                    return Err(self.unexpected("a lambda parameter"));
                }
                self.expect_op("->")?;
                let body = self.expr()?;
                let mut e = wrap_lambdas(params, body);
                e.span = start.join(e.span);
                Ok(e)
            }
            Tok::Op(o) if o == "/\\" && !self.at_boundary() => {
                self.bump();
                let a = self.ident()?;
                self.expect_op("->")?;
                let body = self.expr()?;
                let span = start.join(body.span);
                Ok(Expr::new(ExprKind::TyAbs(a, Box::new(body)), span))
            }
            Tok::Let if !self.at_boundary() => self.let_expr(),
            Tok::If if !self.at_boundary() => {
                self.bump();
                let c = self.expr()?;
                self.expect(Tok::Then)?;
                let a = self.expr()?;
                self.expect(Tok::Else)?;
                let b = self.expr()?;
                let span = start.join(b.span);
                Ok(Expr::new(ExprKind::If(Box::new(c), Box::new(a), Box::new(b)), span))
            }
            _ => self.binary(0),
        }
    }

    fn let_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        self.bump();
        if self.at_boundary() {
            return Err(self.unexpected("a binding"));
        }
        let col = self.span().col;
        self.layout.push(col);
        let mut binds = Vec::new();
        loop {
            let bstart = self.span();
            let x = match self.head_name() {
                Ok(x) => x,
                Err(e) => {
                    self.layout.pop();
                    return Err(e);
                }
            };
            let params = self.lambda_params("=")?;
            self.expect_op("=")?;
            if matches!(self.peek(), Tok::In | Tok::Semi | Tok::Eof) {
                let e = self.unexpected("an expression");
                self.layout.pop();
                return Err(e);
            }
            let rhs = match self.expr() {
                Ok(e) => e,
                Err(e) => {
                    self.layout.pop();
                    return Err(e);
                }
            };
            binds.push((x, wrap_lambdas(params, rhs), bstart));
            if self.peek() == &Tok::Semi {
                self.bump();
                continue;
            }
            let t = self.tok();
            if t.bol && t.span.col == col && matches!(t.tok, Tok::Ident(_) | Tok::LParen) {
                continue;
            }
            break;
        }
        self.layout.pop();
        if self.peek() != &Tok::In {
            return Err(self.unexpected("`in`"));
        }
        self.bump();
        let body = self.expr()?;
        let end = body.span;
        Ok(binds
            .into_iter()
            .rev()
            .fold(body, |acc, (x, rhs, s)| Expr::let_(x, rhs, acc, s.join(end)))
            .with_span_start(start))
    }

    fn binary(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.application()?;
        while let Tok::Op(op) = self.peek().clone() {
            if self.at_boundary() {
                break;
            }
            let Some((prec, assoc)) = infix(&op) else { break };
            if prec < min {
                break;
            }
            let op_span = self.span();
            self.bump();
            self.require();
            let next = match assoc {
                Assoc::Left | Assoc::Non => prec + 1,
                Assoc::Right => prec,
            };
            let rhs = if self.starts_block_expr() { self.expr()? } else { self.binary(next)? };
            let f = Expr::var(surface_operator(&op), op_span);
            lhs = Expr::app(Expr::app(f, lhs), rhs);
            if assoc == Assoc::Non {
                if let Tok::Op(o) = self.peek() {
                    if infix(o).map(|(p, _)| p) == Some(prec) && !self.at_boundary() {
                        return Err(self.error(format!("`{o}` is non-associative")));
                    }
                }
            }
        }
        Ok(lhs)
    }

    fn starts_block_expr(&self) -> bool {
        !self.at_boundary()
            && (matches!(self.peek(), Tok::Backslash | Tok::Let | Tok::If)
                || matches!(self.peek(), Tok::Op(o) if o == "/\\"))
    }

    fn application(&mut self) -> PResult<Expr> {
        if self.is_op("-") {
            if let Tok::Int(n) = *self.peek_at(1) {
                let s = self.span();
                self.bump();
                self.bump();
                return Ok(Expr::new(ExprKind::Const(Const::Int(-n)), s.join(self.prev_span())));
            }
        }
        let mut head = self.atom()?;
        loop {
            if self.at_boundary() {
                break;
            }
            if self.is_op("@") {
                self.bump();
                let t = self.atype()?.shape();
                let span = head.span.join(self.prev_span());
                head = Expr::new(ExprKind::TyApp(Box::new(head), t), span);
            } else if self.starts_atom() {
                let a = self.atom()?;
                head = Expr::app(head, a);
            } else if self.starts_block_expr() {
                let a = self.expr()?;
                head = Expr::app(head, a);
                break;
            } else {
                break;
            }
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        if self.at_boundary() {
            return false;
        }
        match self.peek() {
            Tok::Ident(_) | Tok::Int(_) | Tok::LBracket | Tok::LParen => true,
            Tok::Con(c) => c == "True" || c == "False",
            _ => false,
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let s = self.span();
        if self.at_boundary() {
            return Err(self.unexpected("an expression"));
        }
        let kind = match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                ExprKind::Var(Name::from(x))
            }
            Tok::Int(n) => {
                self.bump();
                ExprKind::Const(Const::Int(n))
            }
            Tok::Con(c) if c == "True" || c == "False" => {
                self.bump();
                ExprKind::Const(Const::Bool(c == "True"))
            }
            Tok::LBracket => {
                self.bump();
                self.expect(Tok::RBracket)?;
                ExprKind::Var(Name::new(NIL))
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    ExprKind::Const(Const::Unit)
                } else if let (Tok::Op(o), Tok::RParen) = (self.peek().clone(), self.peek_at(1).clone()) {
                    self.bump();
                    self.bump();
                    ExprKind::Var(Name::from(surface_operator(&o)))
                } else {
                    let e = self.expr_nested()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr { span: s.join(self.prev_span()), ..e });
                }
            }
            _ => return Err(self.unexpected("an expression")),
        };
        Ok(Expr::new(kind, s.join(self.prev_span())))
    }

    /// An expression inside brackets, where layout is suspended.
    fn expr_nested(&mut self) -> PResult<Expr> {
        self.layout.push(0);
        let r = self.expr();
        self.layout.pop();
        r
    }

    // ---- types ----

    pub fn rtype(&mut self) -> PResult<RType> {
        if matches!(self.peek(), Tok::Ident(x) if x == "forall") && !self.at_boundary() {
            self.bump();
            let mut vars = Vec::new();
            while !self.is_op(".") {
                vars.push(self.ident()?);
            }
            if vars.is_empty() {
                return Err(self.unexpected("a type variable"));
            }
            self.expect_op(".")?;
            let body = self.rtype()?;
            return Ok(vars.into_iter().rev().fold(body, |t, a| RType::Forall(a, Box::new(t))));
        }
        let binder = match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(x), Tok::Op(o)) if o == ":" && !self.at_boundary() => {
                let x = Name::new(x);
                self.bump();
                self.bump();
                Some(x)
            }
            _ => None,
        };
        let dom = self.btype()?;
        if self.eat_op("->") {
            let cod = self.rtype()?;
            Ok(RType::fun(binder.unwrap_or_else(|| Name::new("_")), dom, cod))
        } else if let Some(x) = binder {
            Err(LangError::new(self.prev_span(), format!("binder `{x}` must be followed by `->`")))
        } else {
            Ok(dom)
        }
    }

    fn btype(&mut self) -> PResult<RType> {
        if let Tok::Con(c) = self.peek().clone() {
            if !self.at_boundary() && base_ty(&c).is_none() {
                self.bump();
                let mut args = Vec::new();
                while self.starts_atype() {
                    args.push(self.atype()?);
                }
                return Ok(RType::Con(Name::from(c), args));
            }
        }
        self.atype()
    }

    fn starts_atype(&self) -> bool {
        !self.at_boundary() && matches!(self.peek(), Tok::Con(_) | Tok::Ident(_) | Tok::LParen | Tok::LBrace)
    }

    fn atype(&mut self) -> PResult<RType> {
        if self.at_boundary() {
            return Err(self.unexpected("a type"));
        }
        match self.peek().clone() {
            Tok::Con(c) => {
                self.bump();
                Ok(match base_ty(&c) {
                    Some(b) => RType::trivial(b),
                    None => RType::Con(Name::from(c), Vec::new()),
                })
            }
            Tok::Ident(a) => {
                self.bump();
                Ok(RType::Var(Name::from(a)))
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok(RType::trivial(BaseTy::Unit));
                }
                self.layout.push(0);
                let t = self.rtype();
                self.layout.pop();
                let t = t?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::LBrace => {
                self.bump();
                self.layout.push(0);
                let r = self.refined_base();
                self.layout.pop();
                let r = r?;
                self.expect(Tok::RBrace)?;
                Ok(r)
            }
            _ => Err(self.unexpected("a type")),
        }
    }

    fn refined_base(&mut self) -> PResult<RType> {
        let v = self.ident()?;
        self.expect_op(":")?;
        let base = match self.peek().clone() {
            Tok::Con(c) => match base_ty(&c) {
                Some(b) => {
                    self.bump();
                    b
                }
                None => return Err(self.error(format!("only Int, Bool and Unit can be refined, not `{c}`"))),
            },
            Tok::LParen if self.peek_at(1) == &Tok::RParen => {
                self.bump();
                self.bump();
                BaseTy::Unit
            }
            _ => return Err(self.unexpected("a base type")),
        };
        self.expect_op("|")?;
        if matches!(self.peek(), Tok::Ident(x) if x == "_") && self.peek_at(1) == &Tok::RBrace {
            self.bump();
            return Ok(RType::Hole { v, base });
        }
        let pred = self.pred()?;
        Ok(RType::Base { v, base, pred })
    }

    fn sort(&mut self) -> PResult<Sort> {
        match self.peek().clone() {
            Tok::Con(c) if !self.at_boundary() => {
                self.bump();
                Ok(match c.as_str() {
                    "Int" => Sort::Int,
                    "Bool" => Sort::Bool,
                    "Unit" => Sort::Unit,
                    _ => Sort::Uninterp(Name::from(c)),
                })
            }
            _ => Err(self.unexpected("a sort")),
        }
    }

    // ---- predicates ----

    pub fn pred(&mut self) -> PResult<Pred> {
        if let Tok::Ident(q) = self.peek().clone() {
            if q == "forall" || q == "exists" {
                self.bump();
                let x = self.ident()?;
                self.expect_op(":")?;
                let s = self.sort()?;
                self.expect_op(".")?;
                let body = self.pred()?;
                return Ok(if q == "forall" { Pred::forall(x, s, body) } else { Pred::exists(x, s, body) });
            }
        }
        self.pred_iff()
    }

    fn pred_iff(&mut self) -> PResult<Pred> {
        let a = self.pred_imp()?;
        if self.eat_op("<=>") {
            let b = self.pred_iff()?;
            return Ok(Pred::new(crate::logic::PredKind::Iff(a, b)));
        }
        Ok(a)
    }

    fn pred_imp(&mut self) -> PResult<Pred> {
        let a = self.pred_or()?;
        if self.eat_op("=>") {
            let b = self.pred_imp()?;
            return Ok(Pred::new(crate::logic::PredKind::Imp(a, b)));
        }
        Ok(a)
    }

    fn pred_or(&mut self) -> PResult<Pred> {
        let a = self.pred_and()?;
        if self.eat_op("||") {
            let b = self.pred_or()?;
            return Ok(Pred::new(crate::logic::PredKind::Or(a, b)));
        }
        Ok(a)
    }

    fn pred_and(&mut self) -> PResult<Pred> {
        let a = self.pred_not()?;
        if self.eat_op("&&") {
            let b = self.pred_and()?;
            return Ok(Pred::new(crate::logic::PredKind::And(a, b)));
        }
        Ok(a)
    }

    fn pred_not(&mut self) -> PResult<Pred> {
        if matches!(self.peek(), Tok::Ident(x) if x == "not") && !self.at_boundary() {
            self.bump();
            let a = self.pred_not()?;
            return Ok(Pred::new(crate::logic::PredKind::Not(a)));
        }
        self.pred_rel()
    }

    fn pred_rel(&mut self) -> PResult<Pred> {
        let a = self.pred_sum()?;
        let op = match self.peek() {
            Tok::Op(o) if !self.at_boundary() => match o.as_str() {
                "=" | "==" => Some(RelOp::Eq),
                "!=" | "/=" => Some(RelOp::Ne),
                "<" => Some(RelOp::Lt),
                "<=" => Some(RelOp::Le),
                ">" => Some(RelOp::Gt),
                ">=" => Some(RelOp::Ge),
                _ => None,
            },
            _ => None,
        };
        match op {
            Some(op) => {
                self.bump();
                let b = self.pred_sum()?;
                Ok(Pred::rel(op, a, b))
            }
            None => Ok(a),
        }
    }

    fn pred_sum(&mut self) -> PResult<Pred> {
        let mut a = self.pred_product()?;
        loop {
            let op = if self.is_op("+") {
                ArithOp::Add
            } else if self.is_op("-") {
                ArithOp::Sub
            } else {
                break;
            };
            self.bump();
            let b = self.pred_product()?;
            a = Pred::arith(op, a, b);
        }
        Ok(a)
    }

    fn pred_product(&mut self) -> PResult<Pred> {
        let mut a = self.pred_unary()?;
        while self.eat_op("*") {
            let b = self.pred_unary()?;
            a = Pred::arith(ArithOp::Mul, a, b);
        }
        Ok(a)
    }

    fn pred_unary(&mut self) -> PResult<Pred> {
        if self.eat_op("-") {
            let a = self.pred_unary()?;
            return Ok(Pred::neg(a));
        }
        self.pred_atom()
    }

    fn pred_atom(&mut self) -> PResult<Pred> {
        if self.at_boundary() {
            return Err(self.unexpected("a predicate"));
        }
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Pred::int(n))
            }
            Tok::Ident(x) if x == "true" => {
                self.bump();
                Ok(Pred::tt())
            }
            Tok::Ident(x) if x == "false" => {
                self.bump();
                Ok(Pred::ff())
            }
            Tok::Con(c) if c == "True" || c == "False" => {
                self.bump();
                Ok(Pred::boolean(c == "True"))
            }
            Tok::Ident(x) => {
                self.bump();
                if self.peek() == &Tok::LParen && !self.at_boundary() {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.pred()?);
                            if self.eat(&Tok::Comma) {
                                continue;
                            }
                            self.expect(Tok::RParen)?;
                            break;
                        }
                    }
                    return Ok(Pred::app(Name::from(x), args));
                }
                Ok(Pred::var(Name::from(x)))
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok(Pred::unit());
                }
                let p = self.pred()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            _ => Err(self.unexpected("a predicate")),
        }
    }
}

fn base_ty(c: &str) -> Option<BaseTy> {
    match c {
        "Int" => Some(BaseTy::Int),
        "Bool" => Some(BaseTy::Bool),
        "Unit" => Some(BaseTy::Unit),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Left,
    Right,
    Non,
}

fn infix(op: &str) -> Option<(u8, Assoc)> {
    Some(match op {
        "." => (9, Assoc::Right),
        "*" | "/" => (7, Assoc::Left),
        "+" | "-" => (6, Assoc::Left),
        ":" => (5, Assoc::Right),
        "==" | "/=" | "<" | "<=" | ">" | ">=" => (4, Assoc::Non),
        "&&" => (3, Assoc::Right),
        "||" => (2, Assoc::Right),
        _ => return None,
    })
}

/// The prelude name an infix operator stands for.
fn surface_operator(op: &str) -> &str {
    match op {
        ":" => CONS,
        "." => COMPOSE,
        _ => op,
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(x) | Tok::Con(x) => format!("`{x}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Op(o) => format!("`{o}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Backslash => "`\\`".into(),
        Tok::Let => "`let`".into(),
        Tok::In => "`in`".into(),
        Tok::If => "`if`".into(),
        Tok::Then => "`then`".into(),
        Tok::Else => "`else`".into(),
        Tok::Data => "`data`".into(),
        Tok::Type => "`type`".into(),
        Tok::Primitive => "`primitive`".into(),
        Tok::Uninterpreted => "`uninterpreted`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn wrap_lambdas(params: Vec<(Name, Option<UType>, Span)>, body: Expr) -> Expr {
    params.into_iter().rev().fold(body, |b, (x, t, s)| {
        let span = s.join(b.span);
        Expr::new(ExprKind::Lam(x, t, Box::new(b)), span)
    })
}

impl Expr {
    fn with_span_start(mut self, start: Span) -> Expr {
        self.span = start.join(self.span);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn let_with_constant() {
        let e = parse_expr("let x = 1 in x").unwrap();
        match &e.kind {
            ExprKind::Let(x, a, b) => {
                assert_eq!(x.as_str(), "x");
                assert_eq!(a.kind, ExprKind::Const(Const::Int(1)));
                assert_eq!(b.as_var().map(Name::as_str), Some("x"));
            }
            k => panic!("expected let, got {k:?}"),
        }
    }

    #[test]
    fn empty_binding_is_a_syntax_error() {
        let err = parse_expr("let x = in x").unwrap_err();
        assert_eq!((err.span.line, err.span.col), (1, 9));
    }

    #[test]
    fn layout_groups_let_bindings() {
        let src = "ex2 x =\n  let ys = let n  = dec x\n               p  = inc x\n               xs = n : []\n           in p : xs\n      y  = last ys\n  in\n    inc y\n";
        let p = parse_program(src).unwrap();
        assert_eq!(p.items.len(), 1);
        let Item::Define { body, .. } = &p.items[0] else { panic!() };
        assert_eq!(
            body.to_string(),
            "\\x -> let ys = let n = dec x in let p = inc x in let xs = cons n nil in cons p xs in let y = last ys in inc y"
        );
    }

    #[test]
    fn operators_follow_haskell_precedence() {
        let e = parse_expr("f . g").unwrap();
        assert_eq!(e.to_string(), "compose f g");
        let e = parse_expr("a + b * c <= d && p || q").unwrap();
        assert_eq!(e.to_string(), "(||) ((&&) ((<=) ((+) a ((*) b c)) d) p) q");
        let e = parse_expr("x : y : []").unwrap();
        assert_eq!(e.to_string(), "cons x (cons y nil)");
    }

    #[test]
    fn dependent_function_types() {
        let t = parse_type("x:Int -> {v:Int | v = x + 1}").unwrap();
        assert_eq!(t.to_string(), "x:{v:Int | true} -> {v:Int | v = x + 1}");
        let t = parse_type("forall a b. (b -> a) -> List a").unwrap();
        assert_eq!(t.to_string(), "forall a. forall b. _:(_:b -> a) -> List a");
    }

    #[test]
    fn holes_in_signatures() {
        let t = parse_type("n:Int -> {v:Int | _}").unwrap();
        assert!(t.has_holes());
    }

    #[test]
    fn predicates() {
        let p = parse_pred("exists b:Int. q(b) && (x = a || x = b)").unwrap();
        assert_eq!(p.to_string(), "exists b:Int. q(b) && (x = a || x = b)");
        let p = parse_pred("not (v != 0) => v <=> true").unwrap();
        assert_eq!(p.to_string(), "not v != 0 => v <=> true");
    }

    #[test]
    fn items() {
        let src = "data List a\ntype Nat = {v:Int | 0 <= v}\nuninterpreted len :: Int -> Int\nprimitive (+) :: x:Int -> y:Int -> {v:Int | v = x + y}\nid :: forall a. a -> a\nid x = x\n";
        let p = parse_program(src).unwrap();
        assert_eq!(p.items.len(), 6);
        let reparsed = parse_program(&p.to_string()).unwrap();
        assert_eq!(reparsed.to_string(), p.to_string());
    }

    #[test]
    fn items_must_start_in_column_one() {
        assert!(parse_program("  f = 1").is_err());
        assert!(parse_program("f = 1 g").is_ok());
        assert!(parse_program("f = 1\ng = 2").is_ok());
    }
}
