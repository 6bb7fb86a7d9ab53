use super::ast::*;
use super::lexer::{Tok, Token};
use super::{DslError, Span};

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    eof: Span,
}

type P<T> = Result<T, DslError>;

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [Token], eof: Span) -> Self {
        Parser { toks, pos: 0, eof }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> Span {
        self.peek().map_or(self.eof, |t| t.span)
    }

    fn error<T>(&self, message: impl Into<String>) -> P<T> {
        Err(DslError::SyntaxError {
            message: message.into(),
            span: self.here(),
        })
    }

    fn skip_seps(&mut self) {
        while matches!(self.peek(), Some(Token { tok: Tok::Sep, .. })) {
            self.pos += 1;
        }
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek().is_some_and(|t| &t.tok == tok)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> P<Span> {
        match self.peek() {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(t.span)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    /// Is the next token the bare keyword `kw`?
    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident { text, quoted: false }, .. }) if text == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let yes = self.at_kw(kw);
        if yes {
            self.pos += 1;
        }
        yes
    }

    fn kw(&mut self, kw: &str) -> P<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(format!("expected `{kw}`"))
        }
    }

    fn name(&mut self) -> P<Name> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident { text, .. },
                span,
            }) => {
                self.pos += 1;
                Ok(Name {
                    text: text.clone(),
                    span: *span,
                })
            }
            _ => self.error("expected a name"),
        }
    }

    pub fn file(&mut self) -> P<Vec<Decl>> {
        let mut out = Vec::new();
        loop {
            self.skip_seps();
            if self.peek().is_none() {
                return Ok(out);
            }
            out.push(self.decl()?);
        }
    }

    fn decl(&mut self) -> P<Decl> {
        if self.eat_kw("category") {
            return self.category().map(Decl::Category);
        }
        if self.eat_kw("functor") {
            return self.functor().map(Decl::Functor);
        }
        if self.eat_kw("wide") {
            return self.wide().map(Decl::Wide);
        }
        if self.eat_kw("triple") {
            return self.triple().map(Decl::Triple);
        }
        if self.eat_kw("family") {
            return self.family().map(Decl::Family);
        }
        if self.eat_kw("task") {
            return self.task().map(Decl::Task);
        }
        self.error("expected `category`, `functor`, `wide`, `triple`, `family` or `task`")
    }

    fn arrow(&mut self) -> P<Arrow> {
        let name = self.name()?;
        self.expect(Tok::Colon, "`:`")?;
        let source = self.name()?;
        self.expect(Tok::Arrow, "`->`")?;
        let target = self.name()?;
        Ok(Arrow { name, source, target })
    }

    fn path(&mut self) -> P<Vec<Name>> {
        let mut out = vec![self.name()?];
        while self.at(&Tok::Dot) {
            self.pos += 1;
            out.push(self.name()?);
        }
        Ok(out)
    }

    /// Names up to the next bare keyword among `stops` or `}`.
    fn names_until(&mut self, stops: &[&str]) -> P<Vec<Name>> {
        let mut out = Vec::new();
        loop {
            self.skip_seps();
            if self.at(&Tok::RBrace) || stops.iter().any(|k| self.at_kw(k)) {
                return Ok(out);
            }
            out.push(self.name()?);
        }
    }

    fn category(&mut self) -> P<CategoryDecl> {
        let name = self.name()?;
        if self.at(&Tok::Eq) {
            self.pos += 1;
            let fixture = self.name()?;
            let mut args = Vec::new();
            if self.at(&Tok::LParen) {
                self.pos += 1;
                loop {
                    self.skip_seps();
                    if self.at(&Tok::RParen) {
                        self.pos += 1;
                        break;
                    }
                    args.push(self.name()?);
                }
            }
            return Ok(CategoryDecl {
                name,
                body: CategoryBody::Fixture { fixture, args },
            });
        }
        let table = self.eat_kw("table");
        self.expect(Tok::LBrace, "`{`")?;
        let mut objects = Vec::new();
        let (mut gens, mut rels) = (Vec::new(), Vec::new());
        let (mut mors, mut identities, mut comps) = (Vec::new(), Vec::new(), Vec::new());
        let stops: &[&str] = if table {
            &["objects", "mor", "identity", "comp"]
        } else {
            &["objects", "gen", "rel"]
        };
        loop {
            self.skip_seps();
            if self.at(&Tok::RBrace) {
                self.pos += 1;
                break;
            }
            if self.eat_kw("objects") {
                objects.extend(self.names_until(stops)?);
            } else if !table && self.eat_kw("gen") {
                gens.push(self.arrow()?);
            } else if !table && self.at_kw("rel") {
                let start = self.here();
                self.pos += 1;
                let lhs = self.path()?;
                self.expect(Tok::Eq, "`=`")?;
                let rhs = self.path()?;
                let end = rhs.last().map_or(start, |n| n.span);
                rels.push(Relation {
                    lhs,
                    rhs,
                    span: start.to(end),
                });
            } else if table && self.eat_kw("mor") {
                mors.push(self.arrow()?);
            } else if table && self.eat_kw("identity") {
                let o = self.name()?;
                self.expect(Tok::Eq, "`=`")?;
                identities.push((o, self.name()?));
            } else if table && self.eat_kw("comp") {
                let g = self.name()?;
                self.expect(Tok::Dot, "`.`")?;
                let f = self.name()?;
                self.expect(Tok::Eq, "`=`")?;
                let h = self.name()?;
                comps.push(Composite { g, f, h });
            } else {
                let items = if table {
                    "`objects`, `mor`, `identity` or `comp`"
                } else {
                    "`objects`, `gen` or `rel`"
                };
                return self.error(format!("expected {items}"));
            }
        }
        let body = if table {
            CategoryBody::Table {
                objects,
                mors,
                identities,
                comps,
            }
        } else {
            CategoryBody::Gen { objects, gens, rels }
        };
        Ok(CategoryDecl { name, body })
    }

    /// `a -> b` pairs up to `}`.
    fn mapping(&mut self) -> P<Vec<(Name, Name)>> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        loop {
            self.skip_seps();
            if self.at(&Tok::RBrace) {
                self.pos += 1;
                return Ok(out);
            }
            let a = self.name()?;
            self.expect(Tok::Arrow, "`->`")?;
            out.push((a, self.name()?));
        }
    }

    fn functor(&mut self) -> P<FunctorDecl> {
        let name = self.name()?;
        self.expect(Tok::Colon, "`:`")?;
        let source = self.name()?;
        self.expect(Tok::Arrow, "`->`")?;
        let target = self.name()?;
        let entries = self.mapping()?;
        Ok(FunctorDecl {
            name,
            source,
            target,
            entries,
        })
    }

    fn class(&mut self) -> P<ClassRef> {
        if self.eat_kw("all") {
            Ok(ClassRef::All)
        } else if self.eat_kw("isos") {
            Ok(ClassRef::Isos)
        } else {
            self.name().map(ClassRef::Named)
        }
    }

    fn wide(&mut self) -> P<WideDecl> {
        let name = self.name()?;
        self.kw("on")?;
        let on = self.name()?;
        let body = if self.at(&Tok::Eq) {
            self.pos += 1;
            match self.class()? {
                ClassRef::Named(n) => {
                    return Err(DslError::SyntaxError {
                        message: "expected `all` or `isos`".into(),
                        span: n.span,
                    })
                }
                c => WideBody::Class(c),
            }
        } else {
            self.expect(Tok::LBrace, "`{` or `=`")?;
            let m = self.names_until(&[])?;
            self.expect(Tok::RBrace, "`}`")?;
            WideBody::Members(m)
        };
        Ok(WideDecl { name, on, body })
    }

    fn triple(&mut self) -> P<TripleDecl> {
        let name = self.name()?;
        self.kw("on")?;
        let on = self.name()?;
        let local = self.eat_kw("local");
        self.expect(Tok::LBrace, "`{`")?;
        self.skip_seps();
        self.kw("left")?;
        self.expect(Tok::Colon, "`:`")?;
        let left = self.class()?;
        self.skip_seps();
        self.kw("right")?;
        self.expect(Tok::Colon, "`:`")?;
        let right = self.class()?;
        self.skip_seps();
        self.expect(Tok::RBrace, "`}`")?;
        Ok(TripleDecl {
            name,
            on,
            local,
            left,
            right,
        })
    }

    fn family(&mut self) -> P<FamilyDecl> {
        let name = self.name()?;
        let covariant = if self.eat_kw("covariant") {
            true
        } else if self.eat_kw("contravariant") {
            false
        } else {
            return self.error("expected `covariant` or `contravariant`");
        };
        self.kw("over")?;
        let base = self.name()?;
        self.expect(Tok::LBrace, "`{`")?;
        let (mut fibers, mut transports, mut coherence) = (Vec::new(), Vec::new(), Vec::new());
        loop {
            self.skip_seps();
            if self.at(&Tok::RBrace) {
                self.pos += 1;
                break;
            }
            if self.eat_kw("fiber") {
                let o = self.name()?;
                self.expect(Tok::Eq, "`=`")?;
                fibers.push((o, self.name()?));
            } else if self.eat_kw("transport") {
                let m = self.name()?;
                self.expect(Tok::Eq, "`=`")?;
                transports.push((m, self.name()?));
            } else if self.eat_kw("coherence") {
                let g = self.name()?;
                let f = self.name()?;
                let components = self.mapping()?;
                coherence.push(CoherenceDecl { g, f, components });
            } else {
                return self.error("expected `fiber`, `transport` or `coherence`");
            }
        }
        Ok(FamilyDecl {
            name,
            covariant,
            base,
            fibers,
            transports,
            coherence,
        })
    }

    fn task(&mut self) -> P<TaskDecl> {
        let name = self.name()?;
        let kind = self.name()?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut fields = Vec::new();
        loop {
            self.skip_seps();
            if self.at(&Tok::RBrace) {
                self.pos += 1;
                break;
            }
            let k = self.name()?;
            self.expect(Tok::Colon, "`:`")?;
            fields.push((k, self.name()?));
        }
        Ok(TaskDecl { name, kind, fields })
    }
}
