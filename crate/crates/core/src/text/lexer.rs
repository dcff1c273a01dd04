use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Word(String),
    Arrow,
    LBrace,
    RBrace,
    Eq,
    Comma,
    Colon,
    Newline,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Arrow => "`->`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Newline => "end of line".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

/// Splits `src` into tokens. Newlines inside braces are dropped, so a
/// braced list may span lines; `#` starts a comment.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (li + 1, i + 1);
            let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line, col });
            match c {
                '#' => break,
                c if c.is_whitespace() => {}
                '{' => {
                    depth += 1;
                    push(&mut out, Tok::LBrace);
                }
                '}' => {
                    if depth == 0 {
                        return Err(ParseError::at(line, col, "unmatched `}`"));
                    }
                    depth -= 1;
                    push(&mut out, Tok::RBrace);
                }
                '=' => push(&mut out, Tok::Eq),
                ',' => push(&mut out, Tok::Comma),
                ':' => push(&mut out, Tok::Colon),
                '-' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Tok::Arrow);
                    i += 1;
                }
                '→' | '↦' => push(&mut out, Tok::Arrow),
                c if is_word_char(c) || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                    let start = i;
                    i += 1;
                    while i < chars.len() && is_word_char(chars[i]) {
                        i += 1;
                    }
                    push(&mut out, Tok::Word(chars[start..i].iter().collect()));
                    continue;
                }
                other => return Err(ParseError::at(line, col, format!("unexpected character `{other}`"))),
            }
            i += 1;
        }
        if depth == 0 {
            out.push(Token {
                tok: Tok::Newline,
                line: li + 1,
                col: chars.len() + 1,
            });
        }
    }
    if depth > 0 {
        let line = src.lines().count().max(1);
        return Err(ParseError::at(line, 1, "unclosed `{` at end of input"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn words_and_symbols() {
        assert_eq!(
            kinds("map f : X -> Y { x->y }"),
            vec![
                Tok::Word("map".into()),
                Tok::Word("f".into()),
                Tok::Colon,
                Tok::Word("X".into()),
                Tok::Arrow,
                Tok::Word("Y".into()),
                Tok::LBrace,
                Tok::Word("x".into()),
                Tok::Arrow,
                Tok::Word("y".into()),
                Tok::RBrace,
                Tok::Newline,
            ]
        );
    }

    #[test]
    fn braces_span_lines_and_comments_vanish() {
        let toks = kinds("kappa { # values\n 0 -> {x=0}\n}\n");
        assert_eq!(toks.iter().filter(|t| **t == Tok::Newline).count(), 1);
        assert_eq!(
            kinds("offset=-1"),
            vec![
                Tok::Word("offset".into()),
                Tok::Eq,
                Tok::Word("-1".into()),
                Tok::Newline
            ]
        );
    }

    #[test]
    fn positions_are_reported() {
        let err = lex("set X { x }\n  }").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
        assert!(lex("set X { x").is_err());
        assert!(lex("set X ; x").is_err());
    }
}
