use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::ParseError;

struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.at)
    }

    fn peek_tok(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.at + ahead).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        match self.peek().or(self.toks.last()) {
            Some(t) => Pos {
                line: t.line,
                col: t.col,
            },
            None => Pos { line: 1, col: 1 },
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let p = self.pos();
        ParseError::at(p.line, p.col, msg)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.tok.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn word(&mut self, wanted: &str) -> Result<Name, ParseError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Word(w),
                line,
                col,
            }) => {
                let name = Name {
                    text: w.clone(),
                    pos: Pos { line: *line, col: *col },
                };
                self.at += 1;
                Ok(name)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let w = self.word(&format!("`{kw}`"))?;
        if w.text == kw {
            Ok(())
        } else {
            Err(ParseError::at(
                w.pos.line,
                w.pos.col,
                format!("expected `{kw}`, found `{}`", w.text),
            ))
        }
    }

    fn sym(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.peek_tok(0) == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn eat(&mut self, t: Tok) -> bool {
        if self.peek_tok(0) == Some(&t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn end_line(&mut self) -> Result<(), ParseError> {
        match self.peek_tok(0) {
            None => Ok(()),
            Some(Tok::Newline) => {
                self.at += 1;
                Ok(())
            }
            Some(_) => Err(self.unexpected("end of line")),
        }
    }

    fn skip_blank(&mut self) {
        while self.eat(Tok::Newline) {}
    }

    /// Next line starts with an attribute word rather than a declaration.
    fn at_attribute(&mut self) -> bool {
        self.skip_blank();
        matches!(self.peek_tok(0), Some(Tok::Word(w)) if !KEYWORDS.contains(&w.as_str()))
    }

    fn words_until_brace(&mut self) -> Result<Vec<Name>, ParseError> {
        self.sym(Tok::LBrace)?;
        let mut out = Vec::new();
        while !self.eat(Tok::RBrace) {
            out.push(self.word("a name")?);
            self.eat(Tok::Comma);
        }
        Ok(out)
    }

    fn arrow_pairs(&mut self) -> Result<Vec<(Name, Name)>, ParseError> {
        self.sym(Tok::LBrace)?;
        let mut out = Vec::new();
        while !self.eat(Tok::RBrace) {
            let a = self.word("a name")?;
            self.sym(Tok::Arrow)?;
            let b = self.word("a name")?;
            self.eat(Tok::Comma);
            out.push((a, b));
        }
        Ok(out)
    }

    fn fn_lit(&mut self) -> Result<FnLit, ParseError> {
        let pos = self.pos();
        if self.eat(Tok::LBrace) {
            let mut values = Vec::new();
            while !self.eat(Tok::RBrace) {
                let x = self.word("a point")?;
                self.sym(Tok::Eq)?;
                let e = self.word("an element")?;
                self.eat(Tok::Comma);
                values.push((x, e));
            }
            Ok(FnLit::Inline(values, pos))
        } else {
            Ok(FnLit::Named(self.word("a function literal or name")?))
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let w = self.word(what)?;
        w.text
            .parse()
            .map_err(|_| ParseError::at(w.pos.line, w.pos.col, format!("expected {what}, found `{}`", w.text)))
    }

    fn ramp_lit(&mut self) -> Result<RampLit, ParseError> {
        let pos = self.pos();
        let (mut slope, mut offset, mut cap, mut exceptions, mut at_omega) = (None, None, None, Vec::new(), None);
        loop {
            let field = matches!(
                (self.peek_tok(0), self.peek_tok(1)),
                (Some(Tok::Word(_)), Some(Tok::Eq))
            );
            let except = matches!(
                (self.peek_tok(0), self.peek_tok(1)),
                (Some(Tok::Word(w)), Some(Tok::LBrace)) if w == "except"
            );
            if field {
                let key = self.word("a field")?;
                self.sym(Tok::Eq)?;
                match key.text.as_str() {
                    "slope" => {
                        let s: u8 = self.number("slope 0 or 1")?;
                        if s > 1 {
                            return Err(ParseError::at(key.pos.line, key.pos.col, "slope must be 0 or 1"));
                        }
                        slope = Some(s);
                    }
                    "offset" => offset = Some(self.number("an integer offset")?),
                    "cap" => cap = Some(self.word("an element")?),
                    "at" => at_omega = Some(self.word("an element")?),
                    _ => {
                        return Err(ParseError::at(
                            key.pos.line,
                            key.pos.col,
                            format!("unknown ramp field `{w}`", w = key.text),
                        ))
                    }
                }
            } else if except {
                self.at += 1;
                self.sym(Tok::LBrace)?;
                while !self.eat(Tok::RBrace) {
                    let n = self.number("a natural number")?;
                    self.sym(Tok::Arrow)?;
                    exceptions.push((n, self.word("an element")?));
                    self.eat(Tok::Comma);
                }
            } else {
                break;
            }
        }
        let slope = slope.ok_or_else(|| ParseError::at(pos.line, pos.col, "ramp needs `slope=`"))?;
        let cap = cap.ok_or_else(|| ParseError::at(pos.line, pos.col, "ramp needs `cap=`"))?;
        Ok(RampLit {
            slope,
            offset,
            cap,
            exceptions,
            at_omega,
            pos,
        })
    }

    fn via(&mut self) -> Result<(Name, Name, Name, Option<Name>), ParseError> {
        self.sym(Tok::Colon)?;
        let src = self.word("a source name")?;
        self.sym(Tok::Arrow)?;
        let dst = self.word("a target name")?;
        self.keyword("via")?;
        let map = self.word("a ground map name")?;
        let bmap = match self.peek_tok(0) {
            Some(Tok::Word(_)) => Some(self.word("a basis map name")?),
            _ => None,
        };
        Ok((src, dst, map, bmap))
    }
}

fn set_once<T>(slot: &mut Option<T>, value: T, attr: &Name) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(ParseError::at(
            attr.pos.line,
            attr.pos.col,
            format!("`{}` given twice", attr.text),
        ));
    }
    *slot = Some(value);
    Ok(())
}

fn unknown_attr(attr: &Name, item: &str) -> ParseError {
    ParseError::at(
        attr.pos.line,
        attr.pos.col,
        format!("unknown attribute `{}` in {item}", attr.text),
    )
}

fn item(c: &mut Cursor) -> Result<Item, ParseError> {
    let kw = c.word("a declaration")?;
    let name = c.word("a name")?;
    match kw.text.as_str() {
        "lattice" => {
            let kind = c.word("`finite` or `omega`")?;
            c.end_line()?;
            let omega = match kind.text.as_str() {
                "omega" => true,
                "finite" => false,
                _ => {
                    return Err(ParseError::at(
                        kind.pos.line,
                        kind.pos.col,
                        "expected `finite` or `omega`",
                    ))
                }
            };
            let (mut elements, mut covers, mut bot, mut top) = (None, Vec::new(), None, None);
            while !omega && c.at_attribute() {
                let attr = c.word("an attribute")?;
                match attr.text.as_str() {
                    "elements" => {
                        let mut els = Vec::new();
                        while let Some(Tok::Word(_)) = c.peek_tok(0) {
                            els.push(c.word("an element")?);
                        }
                        set_once(&mut elements, els, &attr)?;
                    }
                    "cover" => {
                        let a = c.word("an element")?;
                        let b = c.word("an element")?;
                        covers.push((a, b));
                    }
                    "bot" => set_once(&mut bot, c.word("an element")?, &attr)?,
                    "top" => set_once(&mut top, c.word("an element")?, &attr)?,
                    _ => return Err(unknown_attr(&attr, "lattice")),
                }
                c.end_line()?;
            }
            if !omega && elements.is_none() {
                return Err(ParseError::at(
                    name.pos.line,
                    name.pos.col,
                    "finite lattice needs `elements`",
                ));
            }
            Ok(Item::Lattice {
                name,
                omega,
                elements: elements.unwrap_or_default(),
                covers,
                bot,
                top,
            })
        }
        "set" => {
            let points = c.words_until_brace()?;
            c.end_line()?;
            Ok(Item::Set { name, points })
        }
        "map" | "bmap" => {
            c.sym(Tok::Colon)?;
            let src = c.word("a source name")?;
            c.sym(Tok::Arrow)?;
            let dst = c.word("a target name")?;
            let it = if kw.text == "map" {
                Item::Map {
                    name,
                    src,
                    dst,
                    pairs: c.arrow_pairs()?,
                }
            } else if matches!(c.peek_tok(0), Some(Tok::Word(w)) if w == "ramp") {
                c.at += 1;
                Item::Bmap {
                    name,
                    src,
                    dst,
                    rule: BmapRule::Ramp(c.ramp_lit()?),
                }
            } else {
                Item::Bmap {
                    name,
                    src,
                    dst,
                    rule: BmapRule::Table(c.arrow_pairs()?),
                }
            };
            c.end_line()?;
            Ok(it)
        }
        "fn" => {
            let values = match c.fn_lit()? {
                FnLit::Inline(v, _) => v,
                FnLit::Named(n) => return Err(ParseError::at(n.pos.line, n.pos.col, "expected `{` after the name")),
            };
            c.end_line()?;
            Ok(Item::Fn { name, values })
        }
        "space" => {
            c.end_line()?;
            let (mut ground, mut basis, mut ideal) = (None, None, None);
            while c.at_attribute() {
                let attr = c.word("an attribute")?;
                match attr.text.as_str() {
                    "ground" => set_once(&mut ground, c.word("a set name")?, &attr)?,
                    "basis" => set_once(&mut basis, c.word("a lattice name")?, &attr)?,
                    "ideal" => {
                        let kind = c.word("`extensional` or `ramp`")?;
                        let lit = match kind.text.as_str() {
                            "extensional" => {
                                let mut members = Vec::new();
                                while !matches!(c.peek_tok(0), None | Some(Tok::Newline)) {
                                    members.push(c.fn_lit()?);
                                }
                                IdealLit::Extensional(members)
                            }
                            "ramp" => {
                                c.keyword("region")?;
                                c.sym(Tok::Eq)?;
                                let region = c.words_until_brace()?;
                                c.keyword("ceiling")?;
                                c.sym(Tok::Eq)?;
                                IdealLit::Ramp {
                                    region,
                                    ceiling: c.fn_lit()?,
                                }
                            }
                            _ => {
                                return Err(ParseError::at(
                                    kind.pos.line,
                                    kind.pos.col,
                                    "expected `extensional` or `ramp`",
                                ))
                            }
                        };
                        set_once(&mut ideal, lit, &attr)?;
                    }
                    _ => return Err(unknown_attr(&attr, "space")),
                }
                c.end_line()?;
            }
            Ok(Item::Space {
                name,
                ground,
                basis,
                ideal,
            })
        }
        "system" => {
            c.end_line()?;
            let (mut ground, mut basis, mut bobj, mut kappa) = (None, None, None, None);
            while c.at_attribute() {
                let attr = c.word("an attribute")?;
                match attr.text.as_str() {
                    "ground" => set_once(&mut ground, c.word("a set name")?, &attr)?,
                    "basis" => set_once(&mut basis, c.word("a lattice name")?, &attr)?,
                    "bobj" => set_once(&mut bobj, c.word("a lattice or space name")?, &attr)?,
                    "kappa" => {
                        let lit = match c.peek_tok(0) {
                            Some(Tok::Word(w)) if w == "ramp" => {
                                c.at += 1;
                                c.sym(Tok::LBrace)?;
                                let mut rows = Vec::new();
                                while !c.eat(Tok::RBrace) {
                                    let x = c.word("a point")?;
                                    c.sym(Tok::Colon)?;
                                    rows.push((x, c.ramp_lit()?));
                                    c.eat(Tok::Comma);
                                }
                                KappaLit::Ramp(rows)
                            }
                            Some(Tok::Word(w)) if w == "inclusion" => {
                                c.at += 1;
                                KappaLit::Inclusion
                            }
                            _ => {
                                c.sym(Tok::LBrace)?;
                                let mut rows = Vec::new();
                                while !c.eat(Tok::RBrace) {
                                    let b = c.word("an element")?;
                                    c.sym(Tok::Arrow)?;
                                    rows.push((b, c.fn_lit()?));
                                    c.eat(Tok::Comma);
                                }
                                KappaLit::Table(rows)
                            }
                        };
                        set_once(&mut kappa, lit, &attr)?;
                    }
                    _ => return Err(unknown_attr(&attr, "system")),
                }
                c.end_line()?;
            }
            Ok(Item::System {
                name,
                ground,
                basis,
                bobj,
                kappa,
            })
        }
        "source" => {
            c.end_line()?;
            let (mut apex, mut basis, mut legs) = (None, None, Vec::new());
            while c.at_attribute() {
                let attr = c.word("an attribute")?;
                match attr.text.as_str() {
                    "apex" => set_once(&mut apex, c.word("a set name")?, &attr)?,
                    "basis" => set_once(&mut basis, c.word("a lattice name")?, &attr)?,
                    "leg" => {
                        let map = c.word("a ground map name")?;
                        let bmap = match c.peek_tok(0) {
                            Some(Tok::Word(_)) => Some(c.word("a basis map name")?),
                            _ => None,
                        };
                        c.sym(Tok::Arrow)?;
                        let space = c.word("a space name")?;
                        legs.push(LegLit { map, bmap, space });
                    }
                    _ => return Err(unknown_attr(&attr, "source")),
                }
                c.end_line()?;
            }
            Ok(Item::Source {
                name,
                apex,
                basis,
                legs,
            })
        }
        "arrow" => {
            let (src, dst, map, bmap) = c.via()?;
            c.end_line()?;
            Ok(Item::Arrow {
                name,
                src,
                dst,
                map,
                bmap,
            })
        }
        "morphism" => {
            let (src, dst, map, bmap) = c.via()?;
            c.end_line()?;
            let mut object = None;
            while c.at_attribute() {
                let attr = c.word("an attribute")?;
                if attr.text != "object" {
                    return Err(unknown_attr(&attr, "morphism"));
                }
                let lit = match c.peek_tok(0) {
                    Some(Tok::LBrace) => ObjectLit::Table(c.arrow_pairs()?),
                    _ => {
                        let w = c.word("`id`, `image`, a table or a basis map name")?;
                        match w.text.as_str() {
                            "id" => ObjectLit::Identity,
                            "image" => ObjectLit::Image,
                            _ => ObjectLit::Map(w),
                        }
                    }
                };
                set_once(&mut object, lit, &attr)?;
                c.end_line()?;
            }
            Ok(Item::Morphism {
                name,
                src,
                dst,
                map,
                bmap,
                object: object.unwrap_or(ObjectLit::Identity),
            })
        }
        other => Err(ParseError::at(
            kw.pos.line,
            kw.pos.col,
            format!("unknown declaration `{other}`"),
        )),
    }
}

/// Parses a whole file into declarations.
pub fn parse_items(src: &str) -> Result<Vec<Item>, ParseError> {
    let mut c = Cursor { toks: lex(src)?, at: 0 };
    let mut out = Vec::new();
    loop {
        c.skip_blank();
        if c.peek().is_none() {
            return Ok(out);
        }
        match c.peek_tok(0) {
            Some(Tok::Word(w)) if KEYWORDS.contains(&w.as_str()) => out.push(item(&mut c)?),
            _ => return Err(c.unexpected("a declaration")),
        }
    }
}
