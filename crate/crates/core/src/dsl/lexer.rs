use super::{ParseDiagnostic, SourcePos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// `-?digits(.digits)?`, kept as written.
    Num(String),
    LBrace,
    RBrace,
    Dot,
    At,
    Eq,
    Ge,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Dot => "`.`".into(),
            Tok::At => "`@`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: SourcePos,
}

/// Splits `src` into tokens, ending with [`Tok::Eof`].
pub(crate) fn lex(src: &str) -> Result<Vec<Token>, ParseDiagnostic> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    while let Some(&c) = chars.peek() {
        let pos = SourcePos::new(line, col);
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars>, col: &mut u32| {
            chars.next();
            *col = col.saturating_add(1);
        };
        match c {
            '\n' => {
                chars.next();
                line = line.saturating_add(1);
                col = 1;
            }
            c if c.is_whitespace() => bump(&mut chars, &mut col),
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars, &mut col);
                }
            }
            '{' | '}' | '.' | '@' | '=' => {
                bump(&mut chars, &mut col);
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '.' => Tok::Dot,
                    '@' => Tok::At,
                    _ => Tok::Eq,
                };
                out.push(Token { tok, pos });
            }
            '>' => {
                bump(&mut chars, &mut col);
                if chars.peek() != Some(&'=') {
                    return Err(ParseDiagnostic::error(pos, "syntax", "expected `>=`"));
                }
                bump(&mut chars, &mut col);
                out.push(Token { tok: Tok::Ge, pos });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                        s.push(c);
                        bump(&mut chars, &mut col);
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Ident(s), pos });
            }
            c if c.is_ascii_digit() || c == '-' => {
                let mut s = String::new();
                if c == '-' {
                    s.push(c);
                    bump(&mut chars, &mut col);
                }
                let digits = |chars: &mut std::iter::Peekable<std::str::Chars>, col: &mut u32, s: &mut String| {
                    let mut n = 0;
                    while let Some(&d) = chars.peek() {
                        if !d.is_ascii_digit() {
                            break;
                        }
                        s.push(d);
                        chars.next();
                        *col = col.saturating_add(1);
                        n += 1;
                    }
                    n
                };
                if digits(&mut chars, &mut col, &mut s) == 0 {
                    return Err(ParseDiagnostic::error(pos, "syntax", "expected digits after `-`"));
                }
                // A fraction needs a digit right after the dot; `3.x` is not a number.
                let mut ahead = chars.clone();
                ahead.next();
                if chars.peek() == Some(&'.') && ahead.peek().is_some_and(char::is_ascii_digit) {
                    s.push('.');
                    bump(&mut chars, &mut col);
                    digits(&mut chars, &mut col, &mut s);
                }
                out.push(Token { tok: Tok::Num(s), pos });
            }
            other => {
                return Err(ParseDiagnostic::error(
                    pos,
                    "syntax",
                    format!("unexpected character {other:?}"),
                ));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, pos: SourcePos::new(line, col) });
    Ok(out)
}
