//! Tolerant lexer for the Java subset the indexer understands.
//!
//! Comments and whitespace are dropped; everything else becomes a token with
//! its byte span. Lexical errors that would break a compiler (unterminated
//! literals or block comments) are reported; unknown characters are kept as
//! single-character punctuation.

use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    TextBlock,
    Char,
    Punct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub offset: usize,
    pub message: &'static str,
}

const MULTI_PUNCT: &[&str] = &[
    "...", "<<=", "->", "::", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
    "^=", "<<",
];

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if b == b'/' && bytes.get(i + 1) == Some(&b'*') {
            match src[i + 2..].find("*/") {
                Some(end) => i = i + 2 + end + 2,
                None => {
                    return Err(LexError {
                        offset: i,
                        message: "unterminated block comment",
                    })
                }
            }
            continue;
        }
        let start = i;
        if src[i..].starts_with("\"\"\"") {
            i = lex_text_block(src, i)?;
            tokens.push(Token {
                kind: TokenKind::TextBlock,
                span: Span::new(start, i),
            });
            continue;
        }
        if b == b'"' || b == b'\'' {
            i = lex_quoted(bytes, i, b)?;
            let kind = if b == b'"' { TokenKind::Str } else { TokenKind::Char };
            tokens.push(Token {
                kind,
                span: Span::new(start, i),
            });
            continue;
        }
        if b.is_ascii_digit() || (b == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            i = lex_number(bytes, i);
            tokens.push(Token {
                kind: TokenKind::Number,
                span: Span::new(start, i),
            });
            continue;
        }
        let c = src[i..].chars().next().unwrap();
        if is_ident_start(c) {
            i += c.len_utf8();
            while let Some(c) = src[i..].chars().next() {
                if !is_ident_part(c) {
                    break;
                }
                i += c.len_utf8();
            }
            tokens.push(Token {
                kind: TokenKind::Ident,
                span: Span::new(start, i),
            });
            continue;
        }
        let len = MULTI_PUNCT
            .iter()
            .find(|p| src[i..].starts_with(**p))
            .map(|p| p.len())
            .unwrap_or(c.len_utf8());
        i += len;
        tokens.push(Token {
            kind: TokenKind::Punct,
            span: Span::new(start, i),
        });
    }
    Ok(tokens)
}

fn lex_quoted(bytes: &[u8], start: usize, quote: u8) -> Result<usize, LexError> {
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'\n' => break,
            c if c == quote => return Ok(i + 1),
            _ => i += 1,
        }
    }
    Err(LexError {
        offset: start,
        message: if quote == b'"' {
            "unterminated string literal"
        } else {
            "unterminated character literal"
        },
    })
}

fn lex_text_block(src: &str, start: usize) -> Result<usize, LexError> {
    let bytes = src.as_bytes();
    let mut i = start + 3;
    while i < bytes.len() {
        if bytes[i] == b'\\' {
            i += 2;
            continue;
        }
        if src[i..].starts_with("\"\"\"") {
            return Ok(i + 3);
        }
        i += 1;
    }
    Err(LexError {
        offset: start,
        message: "unterminated text block",
    })
}

fn lex_number(bytes: &[u8], start: usize) -> usize {
    let hex = bytes[start] == b'0' && matches!(bytes.get(start + 1), Some(b'x' | b'X'));
    let mut i = start;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' {
            i += 1;
            continue;
        }
        let exp = if hex { b"pP" } else { b"eE" };
        if (c == b'+' || c == b'-') && i > start && exp.contains(&bytes[i - 1]) {
            i += 1;
            continue;
        }
        break;
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<&str> {
        lex(src)
            .unwrap()
            .iter()
            .map(|t| &src[t.span.start..t.span.end])
            .collect()
    }

    #[test]
    fn skips_comments_and_keeps_literals_whole() {
        let src = "a.b(\"x,(y\", 'c') // f(z)\n/* g(w) */ 1.5e-3f";
        assert_eq!(texts(src), ["a", ".", "b", "(", "\"x,(y\"", ",", "'c'", ")", "1.5e-3f"]);
    }

    #[test]
    fn escapes_and_text_blocks() {
        let src = "s = \"a\\\"b\"; t = \"\"\"\n  q\"r\n  \"\"\";";
        let t = texts(src);
        assert_eq!(t[2], "\"a\\\"b\"");
        assert_eq!(t[6], "\"\"\"\n  q\"r\n  \"\"\"");
    }

    #[test]
    fn multi_char_operators() {
        assert_eq!(
            texts("a -> b :: c >= d >> e"),
            ["a", "->", "b", "::", "c", ">=", "d", ">", ">", "e"]
        );
    }

    #[test]
    fn lexical_errors() {
        assert!(lex("\"abc\nd\"").is_err());
        assert!(lex("/* open").is_err());
        assert!(lex("'x").is_err());
        assert!(lex("\"\"\" never").is_err());
    }
}
