use super::ast::{FileId, Span};
use crate::error::FrontendError;

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    Int(i32),
    Double(f64),
    Char(char),
    Str(String),
    /// `@Test`
    TestMarker,
    Punct(Punct),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Class,
    Interface,
    Enum,
    Extends,
    Implements,
    Package,
    Import,
    Public,
    Private,
    Protected,
    Static,
    Abstract,
    Final,
    Default,
    Void,
    Int,
    Boolean,
    Char,
    Double,
    If,
    Else,
    While,
    For,
    Return,
    Throw,
    New,
    This,
    Super,
    Null,
    True,
    False,
    Break,
    Continue,
}

impl Keyword {
    fn from_str(s: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match s {
            "class" => Class,
            "interface" => Interface,
            "enum" => Enum,
            "extends" => Extends,
            "implements" => Implements,
            "package" => Package,
            "import" => Import,
            "public" => Public,
            "private" => Private,
            "protected" => Protected,
            "static" => Static,
            "abstract" => Abstract,
            "final" => Final,
            "default" => Default,
            "void" => Void,
            "int" => Int,
            "boolean" => Boolean,
            "char" => Char,
            "double" => Double,
            "if" => If,
            "else" => Else,
            "while" => While,
            "for" => For,
            "return" => Return,
            "throw" => Throw,
            "new" => New,
            "this" => This,
            "super" => Super,
            "null" => Null,
            "true" => True,
            "false" => False,
            "break" => Break,
            "continue" => Continue,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Punct {
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    Ne,
    Assign,
    PlusAssign,
    MinusAssign,
    StarAssign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Bang,
    AndAnd,
    OrOr,
    PlusPlus,
    MinusMinus,
    Question,
    Amp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Exact source text of the token.
    pub text: String,
    pub span: Span,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    file: FileId,

}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    fn error(&self, at: (u32, u32), message: impl Into<String>) -> FrontendError {
        FrontendError::Lex {
            span: Span::new(self.file, at, at),
            message: message.into(),
        }
    }
}

/// Splits MiniJ source into tokens. Whitespace and comments are dropped.
pub fn tokenize(source: &str, file: FileId) -> Result<Vec<Token>, FrontendError> {
    let mut cur = Cursor {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        file,

    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek_at(1) == Some('/') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if c == '/' && cur.peek_at(1) == Some('*') {
            let start = cur.here();
            cur.bump();
            cur.bump();
            loop {
                match cur.peek() {
                    None => return Err(cur.error(start, "unterminated block comment")),
                    Some('*') if cur.peek_at(1) == Some('/') => {
                        cur.bump();
                        cur.bump();
                        break;
                    }
                    Some(_) => {
                        cur.bump();
                    }
                }
            }
            continue;
        }

        let start = cur.here();
        let start_pos = cur.pos;
        let kind = if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '$') {
                cur.bump();
            }
            let word: String = cur.chars[start_pos..cur.pos].iter().collect();
            match Keyword::from_str(&word) {
                Some(kw) => TokenKind::Keyword(kw),
                None => TokenKind::Ident(word),
            }
        } else if c.is_ascii_digit() {
            lex_number(&mut cur, start)?
        } else if c == '"' {
            cur.bump();
            let mut value = String::new();
            loop {
                match cur.peek() {
                    None | Some('\n') => return Err(cur.error(start, "unterminated string literal")),
                    Some('"') => {
                        cur.bump();
                        break;
                    }
                    Some('\\') => value.push(lex_escape(&mut cur)?),
                    Some(c) => {
                        cur.bump();
                        value.push(c);
                    }
                }
            }
            TokenKind::Str(value)
        } else if c == '\'' {
            cur.bump();
            let value = match cur.peek() {
                Some('\\') => lex_escape(&mut cur)?,
                Some(c) if c != '\'' && c != '\n' => {
                    cur.bump();
                    c
                }
                _ => return Err(cur.error(start, "malformed character literal")),
            };
            if cur.peek() != Some('\'') {
                return Err(cur.error(start, "unterminated character literal"));
            }
            cur.bump();
            TokenKind::Char(value)
        } else if c == '@' {
            cur.bump();
            let word_start = cur.pos;
            while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let word: String = cur.chars[word_start..cur.pos].iter().collect();
            if word != "Test" {
                return Err(cur.error(start, format!("unsupported annotation `@{word}`")));
            }
            TokenKind::TestMarker
        } else {
            TokenKind::Punct(lex_punct(&mut cur, start)?)
        };

        let text: String = cur.chars[start_pos..cur.pos].iter().collect();
        let end = (cur.line, cur.col.saturating_sub(1).max(1));
        tokens.push(Token {
            kind,
            text,
            span: Span::new(file, start, end),
        });
    }
    Ok(tokens)
}

fn lex_number(cur: &mut Cursor, start: (u32, u32)) -> Result<TokenKind, FrontendError> {
    let start_pos = cur.pos;
    while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
        cur.bump();
    }
    let mut is_double = false;
    if cur.peek() == Some('.') && matches!(cur.peek_at(1), Some(c) if c.is_ascii_digit()) {
        is_double = true;
        cur.bump();
        while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
            cur.bump();
        }
    }
    if matches!(cur.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$') {
        return Err(cur.error(start, "identifier cannot start with a digit"));
    }
    let text: String = cur.chars[start_pos..cur.pos].iter().collect();
    if is_double {
        text.parse::<f64>()
            .map(TokenKind::Double)
            .map_err(|_| cur.error(start, "malformed floating point literal"))
    } else {
        text.parse::<i32>()
            .map(TokenKind::Int)
            .map_err(|_| cur.error(start, "integer literal out of range"))
    }
}

fn lex_escape(cur: &mut Cursor) -> Result<char, FrontendError> {
    let at = cur.here();
    cur.bump();
    let c = match cur.bump() {
        Some('n') => '\n',
        Some('t') => '\t',
        Some('r') => '\r',
        Some('0') => '\0',
        Some('\\') => '\\',
        Some('\'') => '\'',
        Some('"') => '"',
        _ => return Err(cur.error(at, "unknown escape sequence")),
    };
    Ok(c)
}

fn lex_punct(cur: &mut Cursor, start: (u32, u32)) -> Result<Punct, FrontendError> {
    use Punct::*;
    let c = cur.bump().expect("caller checked a char is present");
    let next = cur.peek();
    let two = |cur: &mut Cursor, p: Punct| {
        cur.bump();
        p
    };
    let p = match (c, next) {
        ('{', _) => LBrace,
        ('}', _) => RBrace,
        ('(', _) => LParen,
        (')', _) => RParen,
        ('[', _) => LBracket,
        (']', _) => RBracket,
        (';', _) => Semi,
        (',', _) => Comma,
        ('.', _) => Dot,
        ('?', _) => Question,
        ('<', Some('=')) => two(cur, Le),
        ('<', _) => Lt,
        // `>>` is never fused so nested type arguments close one at a time.
        ('>', Some('=')) => two(cur, Ge),
        ('>', _) => Gt,
        ('=', Some('=')) => two(cur, EqEq),
        ('=', _) => Assign,
        ('!', Some('=')) => two(cur, Ne),
        ('!', _) => Bang,
        ('+', Some('+')) => two(cur, PlusPlus),
        ('+', Some('=')) => two(cur, PlusAssign),
        ('+', _) => Plus,
        ('-', Some('-')) => two(cur, MinusMinus),
        ('-', Some('=')) => two(cur, MinusAssign),
        ('-', _) => Minus,
        ('*', Some('=')) => two(cur, StarAssign),
        ('*', _) => Star,
        ('/', _) => Slash,
        ('%', _) => Percent,
        ('&', Some('&')) => two(cur, AndAnd),
        ('&', _) => Amp,
        ('|', Some('|')) => two(cur, OrOr),
        (other, _) => {
            return Err(cur.error(start, format!("unrecognized character `{other}`")));
        }
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src, 0).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn smallest_class() {
        assert_eq!(
            kinds("class A {}"),
            vec![
                TokenKind::Keyword(Keyword::Class),
                TokenKind::Ident("A".into()),
                TokenKind::Punct(Punct::LBrace),
                TokenKind::Punct(Punct::RBrace),
            ]
        );
    }

    #[test]
    fn digit_led_identifier_is_rejected_at_its_start() {
        match tokenize("class 1A {}", 0) {
            Err(FrontendError::Lex { span, .. }) => {
                assert_eq!((span.start_line, span.start_col), (1, 7));
            }
            other => panic!("expected lex error, got {other:?}"),
        }
    }

    #[test]
    fn spans_are_one_based() {
        let toks = tokenize("class A\n{ }", 0).unwrap();
        assert_eq!((toks[0].span.start_line, toks[0].span.start_col), (1, 1));
        assert_eq!((toks[0].span.end_line, toks[0].span.end_col), (1, 5));
        assert_eq!((toks[2].span.start_line, toks[2].span.start_col), (2, 1));
    }

    #[test]
    fn literals_and_escapes() {
        let k = kinds(r#"1 2.5 'a' '\n' "x\"y" true null"#);
        assert_eq!(k[0], TokenKind::Int(1));
        assert_eq!(k[1], TokenKind::Double(2.5));
        assert_eq!(k[2], TokenKind::Char('a'));
        assert_eq!(k[3], TokenKind::Char('\n'));
        assert_eq!(k[4], TokenKind::Str("x\"y".into()));
        assert_eq!(k[5], TokenKind::Keyword(Keyword::True));
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(kinds("// c\n/* x */ a").len(), 1);
    }

    #[test]
    fn only_the_test_marker_annotation_is_accepted() {
        assert_eq!(kinds("@Test"), vec![TokenKind::TestMarker]);
        assert!(tokenize("@Override", 0).is_err());
    }

    #[test]
    fn unknown_character() {
        assert!(matches!(tokenize("a # b", 0), Err(FrontendError::Lex { .. })));
    }
}
