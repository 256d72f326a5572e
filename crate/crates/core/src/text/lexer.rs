use super::{Diagnostic, DiagnosticKind, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Number(String),
    SubsumedBy,
    Semi,
    Colon,
    Comma,
    Dot,
    At,
    Eq,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::SubsumedBy => "`SUBSUMED-BY`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::At => "`@`".into(),
            Tok::Eq => "`=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, buf: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            buf.push(c);
            self.bump();
        }
    }
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits `text` into tokens. Unknown characters produce a diagnostic and are
/// skipped; the token stream always ends with `Eof`.
pub(crate) fn lex(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let span = |len: usize| Span::new(line, column, len);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if c.is_alphabetic() {
            let mut word = String::new();
            cur.take_while(&mut word, is_ident_continue);
            // SUBSUMED-BY is the only keyword containing a hyphen.
            if word == "SUBSUMED" && cur.peek() == Some('-') {
                let mut rest = cur.chars.clone();
                rest.next();
                if rest.next() == Some('B') && rest.next() == Some('Y') {
                    let after = rest.next();
                    if !after.is_some_and(is_ident_continue) {
                        for _ in 0..3 {
                            cur.bump();
                        }
                        tokens.push(Token {
                            tok: Tok::SubsumedBy,
                            span: span(11),
                        });
                        continue;
                    }
                }
            }
            let len = word.chars().count();
            tokens.push(Token {
                tok: Tok::Ident(word),
                span: span(len),
            });
            continue;
        }
        if c.is_ascii_digit() || c == '-' {
            let mut num = String::new();
            if c == '-' {
                num.push('-');
                cur.bump();
            }
            cur.take_while(&mut num, |c| c.is_ascii_digit());
            if cur.peek() == Some('.') {
                let mut look = cur.chars.clone();
                look.next();
                if look.next().is_some_and(|c| c.is_ascii_digit()) {
                    num.push('.');
                    cur.bump();
                    cur.take_while(&mut num, |c| c.is_ascii_digit());
                }
            }
            let len = num.chars().count();
            if num == "-" {
                diags.push(Diagnostic::error(
                    DiagnosticKind::Lexical,
                    "expected digits after `-`",
                    span(1),
                ));
                continue;
            }
            tokens.push(Token {
                tok: Tok::Number(num),
                span: span(len),
            });
            continue;
        }
        let tok = match c {
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '@' => Tok::At,
            '=' => Tok::Eq,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            other => {
                cur.bump();
                diags.push(Diagnostic::error(
                    DiagnosticKind::Lexical,
                    format!("unexpected character `{other}`"),
                    span(1),
                ));
                continue;
            }
        };
        cur.bump();
        tokens.push(Token { tok, span: span(1) });
    }
    // Eof points at the last character so that its span stays inside the input.
    let eof_span = match tokens.last() {
        Some(t) => Span::new(t.span.line, t.span.column + t.span.length.saturating_sub(1), 0),
        None => Span::new(1, 1, 0),
    };
    tokens.push(Token {
        tok: Tok::Eof,
        span: eof_span,
    });
    (tokens, diags)
}
