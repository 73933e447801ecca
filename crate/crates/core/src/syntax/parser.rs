//! Recursive descent parser for the ASCII concrete syntax.
//!
//! ```text
//! program     ::= '{' [ behaviour { ',' behaviour } ] '}'
//! behaviour   ::= Name '{' ... '}'                 compartment
//!               | '[' names ']' '{' ... '}'         context
//!               | label '::' states                 observation spot
//!               | names (':' | '::') attspec        attribute declaration
//!               | states arrow states               dependence
//! arrow       ::= '->' | '=>' | '~>' | '+>' | '-|'
//! states      ::= state { '+' state }
//! state       ::= { name '.' } ( '~' name | name [ '(' [ '~' ] name ')' ] )
//! attspec     ::= ('exclusion' | 'inclusion') '{' names '}' | '{' chain { ',' chain } '}'
//! chain       ::= item { ('<' | '><') item }
//! item        ::= name | '{' chain { ',' chain } '}'
//! ```

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::{ParseError, SyntaxError};

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let program = parser.program()?;
    if let Some(label) = program.duplicate_label() {
        return Err(ParseError::DuplicateLabel(label));
    }
    Ok(program)
}

/// Parses a single state collection such as `G(Low) + ~C.h`.
pub fn parse_states(text: &str) -> Result<StateCollection, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let states = parser.states()?;
    parser.expect(TokenKind::Eof)?;
    Ok(states)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

/// An element of an attribute chain: either a single name or a braced group.
struct ChainItem {
    members: Vec<Ident>,
    inner: Vec<AttrRel>,
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].kind
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let tok = &self.tokens[self.pos];
        ParseError::Syntax(SyntaxError {
            line: tok.line,
            column: tok.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.kind.to_string(),
        })
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if *self.peek() == kind {
            Ok(self.bump())
        } else {
            Err(self.error(&[&kind.to_string()]))
        }
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if *self.peek() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                let tok = self.bump();
                Ident::new(name).map_err(|e| {
                    ParseError::Syntax(SyntaxError {
                        line: tok.line,
                        column: tok.column,
                        expected: vec!["a name starting with a letter".into()],
                        found: e.to_string(),
                    })
                })
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        self.expect(TokenKind::LBrace)?;
        let behaviours = self.block_body()?;
        self.expect(TokenKind::Eof)?;
        Ok(Program { behaviours })
    }

    /// Behaviours up to and including the closing brace.
    fn block_body(&mut self) -> Result<Vec<Behaviour>, ParseError> {
        let mut out = Vec::new();
        if self.eat(TokenKind::RBrace) {
            return Ok(out);
        }
        loop {
            out.extend(self.behaviour()?);
            match self.peek() {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::RBrace => {
                    self.bump();
                    return Ok(out);
                }
                _ => return Err(self.error(&["','", "'}'"])),
            }
        }
    }

    fn behaviour(&mut self) -> Result<Vec<Behaviour>, ParseError> {
        match self.peek() {
            TokenKind::LBracket => {
                self.bump();
                let contexts = self.ident_list()?;
                self.expect(TokenKind::RBracket)?;
                self.expect(TokenKind::LBrace)?;
                let body = self.block_body()?;
                Ok(vec![Behaviour::Context { contexts, body }])
            }
            TokenKind::Ident(_) => {
                if *self.peek_at(1) == TokenKind::LBrace {
                    let name = self.ident()?;
                    self.bump();
                    let body = self.block_body()?;
                    return Ok(vec![Behaviour::Compartment { name, body }]);
                }
                if self.looks_like_attr_decl() {
                    return self.attr_decl().map(|b| vec![b]);
                }
                if *self.peek_at(1) == TokenKind::ColonColon {
                    let label = self.ident()?;
                    self.bump();
                    let states = self.states()?;
                    return Ok(vec![Behaviour::Observation { label, states }]);
                }
                self.dependence()
            }
            TokenKind::Tilde => self.dependence(),
            _ => Err(self.error(&["identifier", "'['", "'~'"])),
        }
    }

    /// `a, b, c :: {` or `a : exclusion {` and friends.
    fn looks_like_attr_decl(&self) -> bool {
        let mut i = 0;
        loop {
            if !matches!(self.peek_at(i), TokenKind::Ident(_)) {
                return false;
            }
            i += 1;
            match self.peek_at(i) {
                TokenKind::Comma => i += 1,
                TokenKind::Colon | TokenKind::ColonColon => break,
                _ => return false,
            }
        }
        i += 1;
        match self.peek_at(i) {
            TokenKind::LBrace => true,
            TokenKind::Ident(kw) if kw == "exclusion" || kw == "inclusion" => {
                *self.peek_at(i + 1) == TokenKind::LBrace
            }
            _ => false,
        }
    }

    fn ident_list(&mut self) -> Result<Vec<Ident>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.eat(TokenKind::Comma) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn attr_decl(&mut self) -> Result<Behaviour, ParseError> {
        let agents = self.ident_list()?;
        if !self.eat(TokenKind::Colon) {
            self.expect(TokenKind::ColonColon)?;
        }
        let relations = match self.peek().clone() {
            TokenKind::Ident(kw) if kw == "exclusion" || kw == "inclusion" => {
                self.bump();
                self.expect(TokenKind::LBrace)?;
                let names = self.ident_list()?;
                self.expect(TokenKind::RBrace)?;
                if kw == "exclusion" {
                    exclusion(&names)
                } else {
                    inclusion(&names)
                }
            }
            _ => {
                self.expect(TokenKind::LBrace)?;
                let rels = self.attr_rels()?;
                self.expect(TokenKind::RBrace)?;
                rels
            }
        };
        Ok(Behaviour::AttrDecl { agents, relations })
    }

    fn attr_rels(&mut self) -> Result<Vec<AttrRel>, ParseError> {
        let mut out = self.attr_chain()?;
        while self.eat(TokenKind::Comma) {
            out.extend(self.attr_chain()?);
        }
        Ok(out)
    }

    fn chain_item(&mut self) -> Result<ChainItem, ParseError> {
        match self.peek() {
            TokenKind::LBrace => {
                self.bump();
                let inner = self.attr_rels()?;
                self.expect(TokenKind::RBrace)?;
                let mut members: Vec<Ident> = Vec::new();
                for rel in &inner {
                    for id in rel.idents() {
                        if !members.contains(id) {
                            members.push(id.clone());
                        }
                    }
                }
                Ok(ChainItem { members, inner })
            }
            TokenKind::Ident(_) => Ok(ChainItem {
                members: vec![self.ident()?],
                inner: Vec::new(),
            }),
            _ => Err(self.error(&["identifier", "'{'"])),
        }
    }

    /// `a < b >< {c < d}`: `<` links neighbouring items, a run of `><`
    /// makes every pair of items in the run mutually exclusive.
    fn attr_chain(&mut self) -> Result<Vec<AttrRel>, ParseError> {
        let mut items = vec![self.chain_item()?];
        let mut ops = Vec::new();
        loop {
            match self.peek() {
                TokenKind::Lt => ops.push(TokenKind::Lt),
                TokenKind::Napprox => ops.push(TokenKind::Napprox),
                _ => break,
            }
            self.bump();
            items.push(self.chain_item()?);
        }

        let mut out = Vec::new();
        if ops.is_empty() && items[0].inner.is_empty() {
            out.push(AttrRel::Bare(items[0].members[0].clone()));
            return Ok(out);
        }
        for item in &items {
            out.extend(item.inner.iter().cloned());
        }
        let mut j = 0;
        while j < ops.len() {
            if ops[j] == TokenKind::Lt {
                for x in &items[j].members {
                    for y in &items[j + 1].members {
                        out.push(AttrRel::Prec(x.clone(), y.clone()));
                    }
                }
                j += 1;
            } else {
                let start = j;
                while j < ops.len() && ops[j] == TokenKind::Napprox {
                    j += 1;
                }
                for a in start..=j {
                    for b in a + 1..=j {
                        for x in &items[a].members {
                            for y in &items[b].members {
                                out.push(AttrRel::Napprox(x.clone(), y.clone()));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn dependence(&mut self) -> Result<Vec<Behaviour>, ParseError> {
        let cause = self.states()?;
        let arrow = self.peek().clone();
        let make = |kind, cause, effect| Behaviour::Dependence(Dependence { kind, cause, effect });
        match arrow {
            TokenKind::Normal | TokenKind::Persistent | TokenKind::Remanent => {
                self.bump();
                let effect = self.states()?;
                let kind = match arrow {
                    TokenKind::Normal => DependenceKind::Normal,
                    TokenKind::Persistent => DependenceKind::Persistent,
                    _ => DependenceKind::Remanent,
                };
                Ok(vec![make(kind, cause, effect)])
            }
            // g1 +> g2  ==  g1 => g2, ~g1 -> ~g2
            TokenKind::Activate => {
                self.bump();
                let effect = self.states()?;
                Ok(vec![
                    make(DependenceKind::Persistent, cause.clone(), effect.clone()),
                    make(DependenceKind::Normal, cause.negated(), effect.negated()),
                ])
            }
            // g1 -| g2  ==  ~g1 => g2, g1 -> ~g2
            TokenKind::Inhibit => {
                self.bump();
                let effect = self.states()?;
                Ok(vec![
                    make(DependenceKind::Persistent, cause.negated(), effect.clone()),
                    make(DependenceKind::Normal, cause, effect.negated()),
                ])
            }
            _ => Err(self.error(&["'->'", "'=>'", "'~>'", "'+>'", "'-|'", "'+'"])),
        }
    }

    fn states(&mut self) -> Result<StateCollection, ParseError> {
        let mut out = vec![self.state()?];
        while self.eat(TokenKind::Plus) {
            out.push(self.state()?);
        }
        Ok(StateCollection::new(out).expect("at least one state"))
    }

    fn state(&mut self) -> Result<AgentState, ParseError> {
        let mut path = Vec::new();
        loop {
            if self.eat(TokenKind::Tilde) {
                let agent = self.ident()?;
                if *self.peek() == TokenKind::LParen {
                    return Err(self.error(&["a negated attribute written g(~A)"]));
                }
                return Ok(AgentState {
                    path,
                    agent,
                    attribute: None,
                    polarity: Polarity::Negative,
                });
            }
            let name = self.ident()?;
            match self.peek() {
                TokenKind::Dot => {
                    self.bump();
                    path.push(name);
                }
                TokenKind::LParen => {
                    self.bump();
                    let polarity = if self.eat(TokenKind::Tilde) {
                        Polarity::Negative
                    } else {
                        Polarity::Positive
                    };
                    let attribute = self.ident()?;
                    self.expect(TokenKind::RParen)?;
                    return Ok(AgentState {
                        path,
                        agent: name,
                        attribute: Some(attribute),
                        polarity,
                    });
                }
                _ => {
                    return Ok(AgentState {
                        path,
                        agent: name,
                        attribute: None,
                        polarity: Polarity::Positive,
                    })
                }
            }
        }
    }
}

fn exclusion(names: &[Ident]) -> Vec<AttrRel> {
    if names.len() == 1 {
        return vec![AttrRel::Bare(names[0].clone())];
    }
    let mut out = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            out.push(AttrRel::Napprox(a.clone(), b.clone()));
        }
    }
    out
}

fn inclusion(names: &[Ident]) -> Vec<AttrRel> {
    if names.len() == 1 {
        return vec![AttrRel::Bare(names[0].clone())];
    }
    names
        .windows(2)
        .map(|w| AttrRel::Prec(w[0].clone(), w[1].clone()))
        .collect()
}
