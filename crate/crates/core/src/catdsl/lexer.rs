use super::{DslError, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident { text: String, quoted: bool },
    Arrow,
    Colon,
    Dot,
    Eq,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Sep,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub(crate) fn is_bare(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '*' | '-' | '+')
}

/// Line and column (both 1-based) of every byte offset are computed from
/// this table of line starts.
pub(crate) struct Lines(Vec<usize>);

impl Lines {
    pub fn new(text: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Lines(starts)
    }

    pub fn span(&self, text: &str, start: usize, end: usize) -> Span {
        let line = self.0.partition_point(|&s| s <= start);
        let col = text[self.0[line - 1]..start].chars().count() + 1;
        Span {
            start,
            end,
            line,
            column: col,
        }
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let lines = Lines::new(text);
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        let single = |tok| (tok, i + c.len_utf8());
        let (tok, end) = match c {
            _ if c.is_whitespace() => {
                it.next();
                continue;
            }
            '#' => {
                while it.peek().is_some_and(|&(_, c)| c != '\n') {
                    it.next();
                }
                continue;
            }
            '{' => single(Tok::LBrace),
            '}' => single(Tok::RBrace),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            ':' => single(Tok::Colon),
            '.' => single(Tok::Dot),
            '=' => single(Tok::Eq),
            ';' | ',' => single(Tok::Sep),
            '-' if text[i..].starts_with("->") => (Tok::Arrow, i + 2),
            '"' => {
                it.next();
                let mut s = String::new();
                let mut end = None;
                while let Some((j, c)) = it.next() {
                    match c {
                        '"' => {
                            end = Some(j + 1);
                            break;
                        }
                        '\\' => match it.next() {
                            Some((_, e @ ('"' | '\\'))) => s.push(e),
                            Some((_, 'n')) => s.push('\n'),
                            _ => {
                                return Err(DslError::SyntaxError {
                                    message: "bad escape in quoted name".into(),
                                    span: lines.span(text, j, j + 1),
                                })
                            }
                        },
                        c => s.push(c),
                    }
                }
                let Some(end) = end else {
                    return Err(DslError::SyntaxError {
                        message: "unterminated quoted name".into(),
                        span: lines.span(text, i, text.len()),
                    });
                };
                out.push(Token {
                    tok: Tok::Ident { text: s, quoted: true },
                    span: lines.span(text, i, end),
                });
                continue;
            }
            _ if is_bare(c) => {
                let mut end = i;
                while let Some(&(j, c)) = it.peek() {
                    if !is_bare(c) || text[j..].starts_with("->") {
                        break;
                    }
                    end = j + c.len_utf8();
                    it.next();
                }
                out.push(Token {
                    tok: Tok::Ident {
                        text: text[i..end].to_owned(),
                        quoted: false,
                    },
                    span: lines.span(text, i, end),
                });
                continue;
            }
            _ => {
                return Err(DslError::SyntaxError {
                    message: format!("unexpected character `{c}`"),
                    span: lines.span(text, i, i + c.len_utf8()),
                })
            }
        };
        while it.peek().is_some_and(|&(j, _)| j < end) {
            it.next();
        }
        out.push(Token {
            tok,
            span: lines.span(text, i, end),
        });
    }
    Ok(out)
}
