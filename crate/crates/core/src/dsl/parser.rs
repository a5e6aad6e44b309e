use super::lexer::{tokenize, Tok, Token};
use super::{
    CptDecl, CptRow, Declaration, MechDecl, MechRow, ModelFile, ModelKind, NoiseDecl, ParseError,
    Pos, VarDecl,
};
use crate::scalar::{round_significant, DecimalParts};

/// Source positions of a declaration and of each of its table rows.
#[derive(Debug, Clone)]
pub(super) struct DeclSpan {
    pub pos: Pos,
    pub rows: Vec<Pos>,
}

pub(super) fn parse(text: &str) -> Result<(ModelFile, Vec<DeclSpan>), ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, at: 0 };
    parser.file()
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

fn is_ident(word: &str) -> bool {
    let mut chars = word.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        token
    }

    fn error(&self, message: impl Into<String>, expected: &str) -> ParseError {
        let token = self.peek();
        ParseError::new(
            token.pos,
            format!("{}, found {}", message.into(), token.tok.describe()),
            Some(expected),
        )
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump().pos)
        } else {
            let expected = format!("`{}`", tok.symbol());
            Err(self.error(format!("expected {expected}"), &expected))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Word(w) if is_ident(w) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => Err(self.error("expected an identifier", "identifier")),
        }
    }

    fn value(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Word(w) | Tok::Str(w) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => Err(self.error("expected a value", "value")),
        }
    }

    fn probability(&mut self) -> Result<f64, ParseError> {
        if let Tok::Word(w) = &self.peek().tok {
            if DecimalParts::parse(w).is_some() {
                if let Ok(x) = w.parse::<f64>() {
                    if x.is_finite() {
                        self.bump();
                        return Ok(round_significant(x));
                    }
                }
            }
        }
        Err(self.error("expected a probability", "decimal number"))
    }

    /// `open item (, item)* close`, possibly empty.
    fn list<T>(
        &mut self,
        open: Tok,
        close: Tok,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        self.expect(open)?;
        let mut items = Vec::new();
        if self.eat(close.clone()) {
            return Ok(items);
        }
        loop {
            items.push(item(self)?);
            if self.eat(close.clone()) {
                return Ok(items);
            }
            if !self.eat(Tok::Comma) {
                let expected = format!("`,` or `{}`", close.symbol());
                return Err(self.error(format!("expected {expected}"), &expected));
            }
        }
    }

    /// Comma-separated items up to (not including) `stop`; empty allowed.
    fn items_until<T>(
        &mut self,
        stop: &Tok,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        let mut items = Vec::new();
        if &self.peek().tok == stop {
            return Ok(items);
        }
        loop {
            items.push(item(self)?);
            if !self.eat(Tok::Comma) {
                return Ok(items);
            }
        }
    }

    fn file(&mut self) -> Result<(ModelFile, Vec<DeclSpan>), ParseError> {
        match &self.peek().tok {
            Tok::Word(w) if w == "model" => {
                self.bump();
            }
            _ => return Err(self.error("expected `model`", "`model`")),
        }
        let name = match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.bump();
                s
            }
            _ => return Err(self.error("expected the model name as a quoted string", "string")),
        };
        let mut declarations = Vec::new();
        let mut spans = Vec::new();
        loop {
            let token = self.peek().clone();
            let (decl, span) = match &token.tok {
                Tok::Eof => break,
                Tok::Word(w) if w == "var" => self.var()?,
                Tok::Word(w) if w == "cpt" => self.cpt()?,
                Tok::Word(w) if w == "noise" => self.noise()?,
                Tok::Word(w) if w == "mech" => self.mech()?,
                _ => {
                    return Err(self.error(
                        "expected a declaration",
                        "`var`, `cpt`, `noise` or `mech`",
                    ))
                }
            };
            declarations.push(decl);
            spans.push(DeclSpan { pos: token.pos, ..span });
        }
        let kind = if declarations
            .iter()
            .any(|d| matches!(d, Declaration::Noise(_) | Declaration::Mech(_)))
        {
            ModelKind::Scm
        } else {
            ModelKind::Cpt
        };
        Ok((
            ModelFile {
                name,
                kind,
                declarations,
            },
            spans,
        ))
    }

    fn var(&mut self) -> Result<(Declaration, DeclSpan), ParseError> {
        let pos = self.bump().pos;
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let values = self.list(Tok::LBrace, Tok::RBrace, Self::value)?;
        Ok((
            Declaration::Var(VarDecl { name, values }),
            DeclSpan { pos, rows: vec![] },
        ))
    }

    fn cpt(&mut self) -> Result<(Declaration, DeclSpan), ParseError> {
        let pos = self.bump().pos;
        let child = self.ident()?;
        self.expect(Tok::Pipe)?;
        let parents = self.items_until(&Tok::Colon, Self::ident)?;
        self.expect(Tok::Colon)?;
        let mut rows = Vec::new();
        let mut row_pos = Vec::new();
        match self.peek().tok {
            Tok::LBracket => {
                row_pos.push(self.peek().pos);
                let probs = self.list(Tok::LBracket, Tok::RBracket, Self::probability)?;
                rows.push(CptRow { key: vec![], probs });
            }
            Tok::LBrace => {
                self.bump();
                loop {
                    if self.eat(Tok::RBrace) {
                        break;
                    }
                    row_pos.push(self.peek().pos);
                    let key = self.list(Tok::LParen, Tok::RParen, Self::value)?;
                    self.expect(Tok::Colon)?;
                    let probs = self.list(Tok::LBracket, Tok::RBracket, Self::probability)?;
                    rows.push(CptRow { key, probs });
                    self.eat(Tok::Comma);
                    if !matches!(self.peek().tok, Tok::LParen | Tok::RBrace) {
                        return Err(self.error("expected another row or `}`", "`(` or `}`"));
                    }
                }
            }
            _ => return Err(self.error("expected a table", "`[` or `{`")),
        }
        Ok((
            Declaration::Cpt(CptDecl {
                child,
                parents,
                rows,
            }),
            DeclSpan { pos, rows: row_pos },
        ))
    }

    fn noise(&mut self) -> Result<(Declaration, DeclSpan), ParseError> {
        let pos = self.bump().pos;
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let values = self.list(Tok::LBrace, Tok::RBrace, Self::value)?;
        self.expect(Tok::Tilde)?;
        let probs = self.list(Tok::LBracket, Tok::RBracket, Self::probability)?;
        Ok((
            Declaration::Noise(NoiseDecl {
                name,
                values,
                probs,
            }),
            DeclSpan { pos, rows: vec![] },
        ))
    }

    fn mech(&mut self) -> Result<(Declaration, DeclSpan), ParseError> {
        let pos = self.bump().pos;
        let child = self.ident()?;
        self.expect(Tok::LArrow)?;
        self.expect(Tok::LParen)?;
        let parents = self.items_until(&Tok::Semi, Self::ident)?;
        self.expect(Tok::Semi)?;
        let noise = self.ident()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut rows = Vec::new();
        let mut row_pos = Vec::new();
        loop {
            if self.eat(Tok::RBrace) {
                break;
            }
            row_pos.push(self.peek().pos);
            self.expect(Tok::LParen)?;
            let inputs = self.items_until(&Tok::Semi, Self::value)?;
            self.expect(Tok::Semi)?;
            let noise_value = self.value()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::RArrow)?;
            let output = self.value()?;
            rows.push(MechRow {
                inputs,
                noise: noise_value,
                output,
            });
            self.eat(Tok::Comma);
            if !matches!(self.peek().tok, Tok::LParen | Tok::RBrace) {
                return Err(self.error("expected another row or `}`", "`(` or `}`"));
            }
        }
        if rows.is_empty() {
            return Err(ParseError::new(pos, "mechanism table has no rows", Some("`(`")));
        }
        Ok((
            Declaration::Mech(MechDecl {
                child,
                parents,
                noise,
                rows,
            }),
            DeclSpan { pos, rows: row_pos },
        ))
    }
}
