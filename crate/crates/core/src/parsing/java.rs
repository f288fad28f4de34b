//! Single-pass syntactic indexer for subject-source files.
//!
//! The indexer works over the token stream with a precomputed bracket
//! matching table. It understands type bodies, method bodies, statements and
//! the expression shapes needed to find call sites, and skips anything else
//! without failing. Only lexical errors and unbalanced brackets make a file
//! unindexable.

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use super::lexer::{lex, Token, TokenKind};
use super::IndexFailure;
use crate::project::{FileKind, SourceFile};
use crate::span::Span;

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
    "sealed",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// One syntactic invocation: `receiver.name(args)`, `name(args)` or
/// `new Name(args)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSite {
    pub method_name: String,
    pub receiver_text: String,
    pub argument_spans: Vec<Span>,
    pub full_span: Span,
    pub name_span: Span,
    pub constructor: bool,
    pub enclosing_statement: Option<usize>,
    pub enclosing_statement_span: Option<Span>,
    pub enclosing_method_name: String,
    pub enclosing_method_span: Option<Span>,
    pub line: usize,
    pub start_column: usize,
    pub end_column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarKind {
    Local,
    Parameter,
    Field,
    Resource,
    CatchParameter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub declared_type_name: String,
    pub declaration_span: Span,
    pub enclosing_method_span: Option<Span>,
    pub kind: VarKind,
    pub is_final: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringLiteral {
    /// Raw text between the delimiting quotes; escapes are left as written.
    pub value: String,
    pub span: Span,
    pub text_block: bool,
}

impl StringLiteral {
    /// Length in bytes of the opening (and closing) delimiter.
    pub fn quote_len(&self) -> usize {
        if self.text_block {
            3
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: String,
    pub body_span: Span,
    pub top_level: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodDecl {
    pub name: String,
    pub signature_text: String,
    pub body_span: Span,
    pub first_statement: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatementKind {
    Simple,
    Block,
    Compound,
    Labeled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub span: Span,
    pub kind: StatementKind,
    /// Directly inside `{ ... }` (or a colon-form switch group) rather than
    /// the brace-less body of a control statement.
    pub in_block: bool,
    pub enclosing_method_span: Option<Span>,
}

/// Syntactic index of one subject-source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntaxIndex {
    pub file_path: String,
    pub package_name: Option<String>,
    pub call_sites: Vec<CallSite>,
    pub var_declarations: Vec<VarDecl>,
    pub string_literals: Vec<StringLiteral>,
    pub type_declarations: Vec<TypeDecl>,
    pub method_decls: Vec<MethodDecl>,
    pub imported_names: Vec<String>,
    pub statements: Vec<Statement>,
    /// Names `X` of every `R.id.X` reference.
    pub id_references: Vec<String>,
}

impl SyntaxIndex {
    /// The declaration of `name` visible at `offset` inside the method whose
    /// body is `method_span`: the closest preceding one.
    pub fn declaration_before(&self, name: &str, method_span: Span, offset: usize) -> Option<&VarDecl> {
        self.var_declarations
            .iter()
            .filter(|d| {
                d.name == name && d.enclosing_method_span == Some(method_span) && d.declaration_span.start < offset
            })
            .max_by_key(|d| d.declaration_span.start)
    }
}

/// Builds the syntactic index of a subject-source file.
pub fn index_source(file: &SourceFile) -> Result<SyntaxIndex, IndexFailure> {
    if file.kind() != FileKind::SubjectSource {
        return Err(IndexFailure::new(file, 0, "not a subject-source file"));
    }
    let src = file.content();
    let toks = lex(src).map_err(|e| IndexFailure::new(file, e.offset, e.message))?;
    let matching = match_brackets(src, &toks).map_err(|(off, msg)| IndexFailure::new(file, off, msg))?;
    let mut p = Parser {
        file,
        src,
        toks,
        matching,
        type_depth: 0,
        idx: SyntaxIndex {
            file_path: file.relative_path().to_string(),
            package_name: None,
            call_sites: Vec::new(),
            var_declarations: Vec::new(),
            string_literals: Vec::new(),
            type_declarations: Vec::new(),
            method_decls: Vec::new(),
            imported_names: Vec::new(),
            statements: Vec::new(),
            id_references: Vec::new(),
        },
    };
    p.compilation_unit();
    Ok(p.finish())
}

fn match_brackets(src: &str, toks: &[Token]) -> Result<Vec<usize>, (usize, &'static str)> {
    let mut matching = vec![usize::MAX; toks.len()];
    let mut stack: Vec<(u8, usize)> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        if t.kind != TokenKind::Punct || t.span.len() != 1 {
            continue;
        }
        let c = src.as_bytes()[t.span.start];
        match c {
            b'(' | b'[' | b'{' => stack.push((c, i)),
            b')' | b']' | b'}' => {
                let want = match c {
                    b')' => b'(',
                    b']' => b'[',
                    _ => b'{',
                };
                match stack.pop() {
                    Some((open, j)) if open == want => {
                        matching[i] = j;
                        matching[j] = i;
                    }
                    _ => return Err((t.span.start, "unbalanced brackets")),
                }
            }
            _ => {}
        }
    }
    if let Some((_, j)) = stack.pop() {
        return Err((toks[j].span.start, "unclosed bracket"));
    }
    Ok(matching)
}

#[derive(Clone, Default)]
struct Ctx {
    method: Option<(String, Span)>,
    statement: Option<usize>,
}

impl Ctx {
    fn method_span(&self) -> Option<Span> {
        self.method.as_ref().map(|m| m.1)
    }

    fn with_statement(&self, statement: usize) -> Ctx {
        Ctx {
            method: self.method.clone(),
            statement: Some(statement),
        }
    }
}

struct Parser<'a> {
    file: &'a SourceFile,
    src: &'a str,
    toks: Vec<Token>,
    matching: Vec<usize>,
    type_depth: usize,
    idx: SyntaxIndex,
}

impl<'a> Parser<'a> {
    fn text(&self, k: usize) -> &'a str {
        match self.toks.get(k) {
            Some(t) => &self.src[t.span.start..t.span.end],
            None => "",
        }
    }

    fn is(&self, k: usize, s: &str) -> bool {
        self.toks
            .get(k)
            .is_some_and(|t| t.kind != TokenKind::Str && self.text(k) == s)
    }

    fn is_ident(&self, k: usize) -> bool {
        self.toks.get(k).is_some_and(|t| t.kind == TokenKind::Ident)
    }

    fn is_name(&self, k: usize) -> bool {
        self.is_ident(k) && !is_keyword(self.text(k))
    }

    fn close_of(&self, k: usize) -> Option<usize> {
        self.matching.get(k).copied().filter(|&m| m != usize::MAX && m > k)
    }

    fn span_of(&self, from: usize, to: usize) -> Span {
        Span::new(self.toks[from].span.start, self.toks[to].span.end)
    }

    fn slice(&self, from: usize, to: usize) -> &'a str {
        let s = self.span_of(from, to);
        &self.src[s.start..s.end]
    }

    /// Skips a bracketed group if `k` opens one.
    fn skip_group(&self, k: usize) -> usize {
        match self.close_of(k) {
            Some(c) if matches!(self.text(k), "(" | "[" | "{") => c + 1,
            _ => k + 1,
        }
    }

    fn find_at_depth0(&self, from: usize, end: usize, stops: &[&str]) -> Option<usize> {
        let mut j = from;
        while j < end {
            let t = self.text(j);
            if stops.contains(&t) && self.toks[j].kind == TokenKind::Punct {
                return Some(j);
            }
            j = self.skip_group(j);
        }
        None
    }

    fn finish(mut self) -> SyntaxIndex {
        for (k, t) in self.toks.iter().enumerate() {
            match t.kind {
                TokenKind::Str | TokenKind::TextBlock => {
                    let q = if t.kind == TokenKind::Str { 1 } else { 3 };
                    self.idx.string_literals.push(StringLiteral {
                        value: self.src[t.span.start + q..t.span.end - q].to_string(),
                        span: t.span,
                        text_block: t.kind == TokenKind::TextBlock,
                    });
                }
                // Only the app's own `R`; `android.R.id.*` names framework ids.
                TokenKind::Ident
                    if self.text(k) == "R"
                        && !(k > 0 && self.is(k - 1, "."))
                        && self.is(k + 1, ".")
                        && self.is(k + 2, "id")
                        && self.is(k + 3, ".")
                        && self.is_ident(k + 4) =>
                {
                    self.idx.id_references.push(self.text(k + 4).to_string());
                }
                _ => {}
            }
        }
        let statements = self.idx.statements.clone();
        for call in &mut self.idx.call_sites {
            call.enclosing_statement_span = call.enclosing_statement.map(|s| statements[s].span);
        }
        self.idx
            .call_sites
            .sort_by_key(|c| (c.full_span.start, Reverse(c.full_span.end), c.name_span.start));
        self.idx
    }

    fn compilation_unit(&mut self) {
        let n = self.toks.len();
        let mut i = 0;
        while i < n {
            if self.is(i, "package") || self.is(i, "import") {
                let end = self.find_at_depth0(i, n, &[";"]).unwrap_or(n - 1);
                let mut from = i + 1;
                if self.is(from, "static") {
                    from += 1;
                }
                if from < end {
                    let name: String = self.slice(from, end - 1).split_whitespace().collect();
                    if self.is(i, "package") {
                        self.idx.package_name = Some(name);
                    } else {
                        self.idx.imported_names.push(name);
                    }
                }
                i = end + 1;
                continue;
            }
            i = self.member(i, n);
        }
    }

    fn skip_annotation(&self, i: usize) -> usize {
        let mut j = i + 1;
        while self.is_ident(j) && self.is(j + 1, ".") {
            j += 2;
        }
        j += 1;
        if self.is(j, "(") {
            j = self.skip_group(j);
        }
        j
    }

    fn skip_annotations_and_modifiers(&self, mut i: usize, end: usize) -> (usize, bool) {
        let mut is_final = false;
        while i < end {
            if self.is(i, "@") && !self.is(i + 1, "interface") {
                i = self.skip_annotation(i);
            } else if self.is_ident(i) && MODIFIERS.contains(&self.text(i)) {
                is_final |= self.text(i) == "final";
                i += 1;
            } else {
                break;
            }
        }
        (i, is_final)
    }

    fn starts_type_decl(&self, i: usize) -> bool {
        match self.text(i) {
            "class" | "interface" | "enum" => self.is_ident(i + 1),
            "@" => self.is(i + 1, "interface"),
            "record" => self.is_name(i + 1) && (self.is(i + 2, "(") || self.is(i + 2, "<")),
            _ => false,
        }
    }

    /// One member of a type body (or a top-level declaration).
    fn member(&mut self, start: usize, end: usize) -> usize {
        let (i, _) = self.skip_annotations_and_modifiers(start, end);
        if i >= end {
            return end;
        }
        if self.is(i, ";") {
            return i + 1;
        }
        if self.is(i, "{") {
            let close = self.close_of(i).unwrap_or(end);
            let ctx = Ctx {
                method: Some((String::new(), self.span_of(i, close))),
                statement: None,
            };
            self.block(i, &ctx);
            return close + 1;
        }
        if self.starts_type_decl(i) {
            return self.type_decl(i, end);
        }
        let Some(j) = self.find_at_depth0(i, end, &["(", "=", ";", "{"]) else {
            return end;
        };
        match self.text(j) {
            "(" if j > i && self.is_name(j - 1) => self.method_decl(i, j, end),
            "=" | ";" => self.field_decl(i, j, end),
            "(" => self.skip_group(j),
            _ => self.close_of(j).map(|c| c + 1).unwrap_or(end),
        }
    }

    fn type_decl(&mut self, i: usize, end: usize) -> usize {
        let kw = if self.is(i, "@") { i + 1 } else { i };
        let name_k = kw + 1;
        let Some(open) = self.find_at_depth0(name_k + 1, end, &["{", ";"]) else {
            return end;
        };
        if self.is(open, ";") {
            return open + 1;
        }
        let close = self.close_of(open).unwrap_or(end);
        self.idx.type_declarations.push(TypeDecl {
            name: self.text(name_k).to_string(),
            body_span: self.span_of(open, close),
            top_level: self.type_depth == 0,
        });
        self.type_depth += 1;
        if self.is(kw, "enum") {
            self.enum_body(open, close);
        } else {
            self.members(open + 1, close);
        }
        self.type_depth -= 1;
        close + 1
    }

    fn members(&mut self, mut i: usize, end: usize) {
        while i < end {
            i = self.member(i, end);
        }
    }

    fn enum_body(&mut self, open: usize, close: usize) {
        let mut i = open + 1;
        while i < close && !self.is(i, ";") {
            if self.is(i, "{") {
                let c = self.close_of(i).unwrap_or(close);
                self.members(i + 1, c);
                i = c + 1;
            } else if self.is(i, "(") {
                let c = self.close_of(i).unwrap_or(close);
                self.scan_expr(i + 1, c, &Ctx::default());
                i = c + 1;
            } else {
                i += 1;
            }
        }
        if i < close {
            self.members(i + 1, close);
        }
    }

    fn method_decl(&mut self, sig_start: usize, paren: usize, end: usize) -> usize {
        let name = self.text(paren - 1).to_string();
        let params_close = self.close_of(paren).unwrap_or(end);
        let Some(body) = self.find_at_depth0(params_close + 1, end, &["{", ";"]) else {
            return end;
        };
        if self.is(body, ";") {
            return body + 1;
        }
        let close = self.close_of(body).unwrap_or(end);
        let body_span = self.span_of(body, close);
        self.parameters(paren, params_close, body_span, VarKind::Parameter);
        let signature_text = self.slice(sig_start, body - 1).to_string();
        let method_idx = self.idx.method_decls.len();
        self.idx.method_decls.push(MethodDecl {
            name: name.clone(),
            signature_text,
            body_span,
            first_statement: None,
        });
        let ctx = Ctx {
            method: Some((name, body_span)),
            statement: None,
        };
        let first = self.block(body, &ctx);
        self.idx.method_decls[method_idx].first_statement = first;
        close + 1
    }

    fn parameters(&mut self, open: usize, close: usize, method_span: Span, kind: VarKind) {
        for (from, to) in self.split_commas(open, close) {
            let (from, is_final) = self.skip_annotations_and_modifiers(from, to + 1);
            if from >= to || !self.is_name(to) {
                continue;
            }
            let mut type_end = to - 1;
            if self.is(type_end, "...") && type_end > from {
                type_end -= 1;
            }
            self.idx.var_declarations.push(VarDecl {
                name: self.text(to).to_string(),
                declared_type_name: self.slice(from, type_end).to_string(),
                declaration_span: self.span_of(from, to),
                enclosing_method_span: Some(method_span),
                kind,
                is_final,
            });
        }
    }

    fn field_decl(&mut self, start: usize, j: usize, end: usize) -> usize {
        let (from, is_final) = self.skip_annotations_and_modifiers(start, j);
        let mut name_k = j.saturating_sub(1);
        while self.is(name_k, "]") && name_k > from + 1 {
            name_k -= 2;
        }
        if name_k > from && self.is_name(name_k) {
            self.idx.var_declarations.push(VarDecl {
                name: self.text(name_k).to_string(),
                declared_type_name: self.slice(from, name_k - 1).to_string(),
                declaration_span: self.span_of(from, name_k),
                enclosing_method_span: None,
                kind: VarKind::Field,
                is_final,
            });
        }
        if self.is(j, ";") {
            return j + 1;
        }
        let semi = self.find_at_depth0(j + 1, end, &[";"]).unwrap_or(end);
        self.scan_expr(j + 1, semi, &Ctx::default());
        semi + 1
    }

    /// Parses the statements of the block opened at `open`; returns the index
    /// of its first statement.
    fn block(&mut self, open: usize, ctx: &Ctx) -> Option<usize> {
        let close = self.close_of(open).unwrap_or(self.toks.len());
        let mut i = open + 1;
        let mut first = None;
        while i < close {
            let (next, stmt) = self.statement(i, close, ctx, true);
            if first.is_none() {
                first = stmt;
            }
            i = next.max(i + 1);
        }
        first
    }

    fn begin_statement(&mut self, i: usize, kind: StatementKind, in_block: bool, ctx: &Ctx) -> usize {
        let start = self.toks[i].span.start;
        self.idx.statements.push(Statement {
            span: Span::new(start, start),
            kind,
            in_block,
            enclosing_method_span: ctx.method_span(),
        });
        self.idx.statements.len() - 1
    }

    fn finish_statement(&mut self, id: usize, last: usize) {
        let last = last.min(self.toks.len() - 1);
        let end = self.toks[last].span.end.max(self.idx.statements[id].span.start);
        self.idx.statements[id].span.end = end;
    }

    fn statement(&mut self, i: usize, end: usize, ctx: &Ctx, in_block: bool) -> (usize, Option<usize>) {
        if i >= end {
            return (end, None);
        }
        let t = self.text(i);
        if self.is(i, ";") {
            return (i + 1, None);
        }
        if self.is(i, "{") {
            let id = self.begin_statement(i, StatementKind::Block, in_block, ctx);
            let close = self.close_of(i).unwrap_or(end);
            self.block(i, &ctx.with_statement(id));
            self.finish_statement(id, close);
            return (close + 1, Some(id));
        }
        if self.is_name(i) && self.is(i + 1, ":") {
            let id = self.begin_statement(i, StatementKind::Labeled, in_block, ctx);
            let (next, _) = self.statement(i + 2, end, &ctx.with_statement(id), false);
            self.finish_statement(id, next - 1);
            return (next, Some(id));
        }
        let compound = matches!(t, "if" | "while" | "for" | "do" | "try" | "switch" | "synchronized")
            && self.toks[i].kind == TokenKind::Ident;
        if compound {
            let id = self.begin_statement(i, StatementKind::Compound, in_block, ctx);
            let inner = ctx.with_statement(id);
            let next = match t {
                "if" => self.if_statement(i, end, &inner),
                "while" | "synchronized" => self.paren_then_body(i, end, &inner),
                "for" => self.for_statement(i, end, &inner),
                "do" => self.do_statement(i, end, &inner),
                "try" => self.try_statement(i, end, &inner),
                _ => self.switch_statement(i, end, &inner),
            };
            self.finish_statement(id, next - 1);
            return (next, Some(id));
        }
        let (after_mods, is_final) = self.skip_annotations_and_modifiers(i, end);
        if self.starts_type_decl(after_mods) {
            return (self.type_decl(after_mods, end), None);
        }
        self.simple_statement(i, after_mods, is_final, end, ctx, in_block)
    }

    fn simple_statement(
        &mut self,
        i: usize,
        after_mods: usize,
        is_final: bool,
        end: usize,
        ctx: &Ctx,
        in_block: bool,
    ) -> (usize, Option<usize>) {
        let semi = self.find_at_depth0(i, end, &[";"]);
        let last = semi.unwrap_or(end - 1);
        let id = self.begin_statement(i, StatementKind::Simple, in_block, ctx);
        if let Some(method_span) = ctx.method_span() {
            self.local_decl(after_mods, last + 1, is_final, method_span, VarKind::Local);
        }
        self.scan_expr(i, last + 1, &ctx.with_statement(id));
        self.finish_statement(id, last);
        (last + 1, Some(id))
    }

    fn if_statement(&mut self, i: usize, end: usize, ctx: &Ctx) -> usize {
        let mut next = self.paren_then_body(i, end, ctx);
        if self.is(next, "else") && next < end {
            next = self.statement(next + 1, end, ctx, false).0;
        }
        next
    }

    fn paren_then_body(&mut self, i: usize, end: usize, ctx: &Ctx) -> usize {
        if !self.is(i + 1, "(") {
            return i + 1;
        }
        let close = self.close_of(i + 1).unwrap_or(end);
        self.scan_expr(i + 2, close, ctx);
        self.statement(close + 1, end, ctx, false).0
    }

    fn for_statement(&mut self, i: usize, end: usize, ctx: &Ctx) -> usize {
        if !self.is(i + 1, "(") {
            return i + 1;
        }
        let close = self.close_of(i + 1).unwrap_or(end);
        if let Some(method_span) = ctx.method_span() {
            let (from, is_final) = self.skip_annotations_and_modifiers(i + 2, close);
            self.local_decl(from, close, is_final, method_span, VarKind::Local);
        }
        self.scan_expr(i + 2, close, ctx);
        self.statement(close + 1, end, ctx, false).0
    }

    fn do_statement(&mut self, i: usize, end: usize, ctx: &Ctx) -> usize {
        let mut next = self.statement(i + 1, end, ctx, false).0;
        if self.is(next, "while") && self.is(next + 1, "(") {
            let close = self.close_of(next + 1).unwrap_or(end);
            self.scan_expr(next + 2, close, ctx);
            next = close + 1;
            if self.is(next, ";") {
                next += 1;
            }
        }
        next
    }

    fn try_statement(&mut self, i: usize, end: usize, ctx: &Ctx) -> usize {
        let mut k = i + 1;
        if self.is(k, "(") {
            let close = self.close_of(k).unwrap_or(end);
            if let Some(method_span) = ctx.method_span() {
                let mut from = k + 1;
                while from < close {
                    let seg_end = self.find_at_depth0(from, close, &[";"]).unwrap_or(close);
                    let (s, is_final) = self.skip_annotations_and_modifiers(from, seg_end);
                    self.local_decl(s, seg_end, is_final, method_span, VarKind::Resource);
                    from = seg_end + 1;
                }
            }
            self.scan_expr(k + 1, close, ctx);
            k = close + 1;
        }
        if self.is(k, "{") {
            k = self.statement(k, end, ctx, false).0;
        }
        loop {
            if self.is(k, "catch") && self.is(k + 1, "(") {
                let close = self.close_of(k + 1).unwrap_or(end);
                if let Some(method_span) = ctx.method_span() {
                    self.parameters(k + 1, close, method_span, VarKind::CatchParameter);
                }
                k = self.statement(close + 1, end, ctx, false).0;
            } else if self.is(k, "finally") {
                k = self.statement(k + 1, end, ctx, false).0;
            } else {
                return k;
            }
        }
    }

    fn switch_statement(&mut self, i: usize, end: usize, ctx: &Ctx) -> usize {
        if !self.is(i + 1, "(") {
            return i + 1;
        }
        let close = self.close_of(i + 1).unwrap_or(end);
        self.scan_expr(i + 2, close, ctx);
        if !self.is(close + 1, "{") {
            return close + 1;
        }
        self.switch_body(close + 1, ctx)
    }

    fn switch_body(&mut self, open: usize, ctx: &Ctx) -> usize {
        let close = self.close_of(open).unwrap_or(self.toks.len());
        let mut k = open + 1;
        let mut arrow = false;
        while k < close {
            if self.is(k, "case") || self.is(k, "default") {
                let label_end = self.find_at_depth0(k + 1, close, &[":", "->"]).unwrap_or(close);
                self.scan_expr(k + 1, label_end, ctx);
                arrow = self.is(label_end, "->");
                k = label_end + 1;
                continue;
            }
            let (next, _) = self.statement(k, close, ctx, !arrow);
            k = next.max(k + 1);
        }
        close + 1
    }

    /// Records a local variable declaration `Type name (= ...)` starting at
    /// `i`, if the tokens have that shape.
    fn local_decl(&mut self, i: usize, end: usize, is_final: bool, method_span: Span, kind: VarKind) {
        let Some(name_k) = self.type_then_name(i, end) else {
            return;
        };
        if !matches!(self.text(name_k + 1), "=" | ";" | "," | "[" | ":" | "") && name_k + 1 < end {
            return;
        }
        let mut declared = self.slice(i, name_k - 1).to_string();
        if declared == "var" && self.is(name_k + 1, "=") && self.is(name_k + 2, "new") {
            let mut k = name_k + 3;
            let from = k;
            while self.is_ident(k) && self.is(k + 1, ".") {
                k += 2;
            }
            if self.is_ident(k) {
                declared = self.slice(from, k).to_string();
            }
        }
        self.idx.var_declarations.push(VarDecl {
            name: self.text(name_k).to_string(),
            declared_type_name: declared,
            declaration_span: self.span_of(i, name_k),
            enclosing_method_span: Some(method_span),
            kind,
            is_final,
        });
    }

    /// Index of the declared name if tokens from `i` read `Type name`.
    fn type_then_name(&self, i: usize, end: usize) -> Option<usize> {
        if !self.is_ident(i) {
            return None;
        }
        let first = self.text(i);
        if is_keyword(first) && !PRIMITIVES.contains(&first) {
            return None;
        }
        let mut k = i + 1;
        loop {
            if self.is(k, "<") {
                k = self.generic_close(k)? + 1;
            }
            if self.is(k, ".") && self.is_name(k + 1) {
                k += 2;
                continue;
            }
            break;
        }
        while self.is(k, "[") && self.is(k + 1, "]") {
            k += 2;
        }
        (k < end && self.is_name(k)).then_some(k)
    }

    /// Matching `>` for a `<` opening type arguments, if the tokens in
    /// between can only be a type.
    fn generic_close(&self, k: usize) -> Option<usize> {
        let mut depth = 0usize;
        for j in k..(k + 64).min(self.toks.len()) {
            match self.text(j) {
                "<" => depth += 1,
                ">" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(j);
                    }
                }
                "." | "," | "?" | "&" | "[" | "]" | "@" => {}
                _ if self.is_ident(j) => {}
                _ => return None,
            }
        }
        None
    }

    fn is_type_argument_start(&self, k: usize) -> bool {
        if k == 0 {
            return false;
        }
        let prev = self.text(k - 1);
        prev == "." || (self.is_ident(k - 1) && prev.starts_with(|c: char| c.is_uppercase()))
    }

    /// Top-level comma-separated segments of the group opened at `open`, as
    /// inclusive token ranges.
    fn split_commas(&self, open: usize, close: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = open + 1;
        let mut k = open + 1;
        while k < close {
            let t = self.text(k);
            if matches!(t, "(" | "[" | "{") && self.toks[k].kind == TokenKind::Punct {
                k = self.skip_group(k);
                continue;
            }
            if t == "<" && self.is_type_argument_start(k) {
                if let Some(g) = self.generic_close(k).filter(|&g| g < close) {
                    k = g + 1;
                    continue;
                }
            }
            if t == "," && self.toks[k].kind == TokenKind::Punct {
                if start < k {
                    out.push((start, k - 1));
                }
                start = k + 1;
            }
            k += 1;
        }
        if start < close {
            out.push((start, close - 1));
        }
        out
    }

    fn scan_expr(&mut self, lo: usize, hi: usize, ctx: &Ctx) {
        let mut k = lo;
        while k < hi {
            let t = self.text(k);
            let kind = self.toks[k].kind;
            if kind == TokenKind::Ident && t == "new" {
                k = self.constructor_call(k, hi, ctx);
                continue;
            }
            if kind == TokenKind::Punct && t == "{" {
                let close = self.close_of(k).unwrap_or(hi);
                if k > 0 && self.is(k - 1, "->") {
                    self.block(k, ctx);
                    k = close + 1;
                    continue;
                }
                if k > 0 && self.is(k - 1, ")") {
                    let open = self.matching[k - 1];
                    if open > 0 && self.is(open - 1, "switch") {
                        self.switch_body(k, ctx);
                        k = close + 1;
                        continue;
                    }
                    if self.new_before_type(open) {
                        self.type_depth += 1;
                        self.members(k + 1, close);
                        self.type_depth -= 1;
                        k = close + 1;
                        continue;
                    }
                }
                k += 1;
                continue;
            }
            if kind == TokenKind::Ident
                && !is_keyword(t)
                && self.is(k + 1, "(")
                && !(k > 0 && (self.is(k - 1, "@") || self.is(k - 1, "::")))
            {
                self.record_call(k, k + 1, false, ctx);
            }
            k += 1;
        }
    }

    /// Handles `new Type(args)`; returns where scanning resumes.
    fn constructor_call(&mut self, new_k: usize, hi: usize, ctx: &Ctx) -> usize {
        let mut k = new_k + 1;
        while self.is(k, "@") {
            k = self.skip_annotation(k);
        }
        if !self.is_ident(k) {
            return new_k + 1;
        }
        let mut name_k = k;
        loop {
            k = name_k + 1;
            if self.is(k, "<") {
                match self.generic_close(k) {
                    Some(g) => k = g + 1,
                    None => return name_k + 1,
                }
            }
            if self.is(k, ".") && self.is_ident(k + 1) {
                name_k = k + 1;
                continue;
            }
            break;
        }
        if self.is(k, "(") && k < hi {
            self.record_call(name_k, k, true, ctx);
            let call = self.idx.call_sites.last_mut().unwrap();
            call.full_span.start = self.toks[new_k].span.start;
            let (line, col) = self.file.line_col(call.full_span.start);
            call.line = line;
            call.start_column = col;
        }
        k
    }

    /// Whether the `(` at `open` belongs to `new Type(`.
    fn new_before_type(&self, open: usize) -> bool {
        let mut j = open;
        while j > 0 {
            j -= 1;
            match self.text(j) {
                "new" => return true,
                "." | "<" | ">" | "," | "?" | "[" | "]" => {}
                _ if self.is_ident(j) => {}
                _ => return false,
            }
        }
        false
    }

    fn record_call(&mut self, name_k: usize, open: usize, constructor: bool, ctx: &Ctx) {
        let Some(close) = self.close_of(open) else {
            return;
        };
        let argument_spans = self
            .split_commas(open, close)
            .into_iter()
            .map(|(a, b)| self.span_of(a, b))
            .collect();
        let mut start_k = name_k;
        let mut receiver_text = String::new();
        if !constructor && name_k >= 2 && self.is(name_k - 1, ".") {
            if let Some(r) = self.primary_start(name_k - 2) {
                receiver_text = self.slice(r, name_k - 2).to_string();
                start_k = r;
            }
        }
        let full_span = self.span_of(start_k, close);
        let (line, start_column) = self.file.line_col(full_span.start);
        let (_, end_column) = self.file.line_col(full_span.end);
        let (enclosing_method_name, enclosing_method_span) = match &ctx.method {
            Some((n, s)) => (n.clone(), Some(*s)),
            None => (String::new(), None),
        };
        self.idx.call_sites.push(CallSite {
            method_name: self.text(name_k).to_string(),
            receiver_text,
            argument_spans,
            full_span,
            name_span: self.toks[name_k].span,
            constructor,
            enclosing_statement: ctx.statement,
            enclosing_statement_span: None,
            enclosing_method_name,
            enclosing_method_span,
            line,
            start_column,
            end_column,
        });
    }

    /// First token of the postfix expression ending at token `j`.
    fn primary_start(&self, mut j: usize) -> Option<usize> {
        loop {
            let tok = self.toks.get(j)?;
            let start = match self.text(j) {
                ")" if tok.kind == TokenKind::Punct => {
                    let open = self.matching[j];
                    if open > 0 && self.is_name(open - 1) {
                        self.new_prefix(open - 1).unwrap_or(open - 1)
                    } else if open > 0 && self.is(open - 1, ">") {
                        self.generic_ctor_start(open - 1)?
                    } else {
                        open
                    }
                }
                "]" if tok.kind == TokenKind::Punct => {
                    let open = self.matching[j];
                    if open == 0 {
                        return None;
                    }
                    j = open - 1;
                    continue;
                }
                "this" | "super" => j,
                _ if matches!(
                    tok.kind,
                    TokenKind::Str | TokenKind::TextBlock | TokenKind::Char | TokenKind::Number
                ) =>
                {
                    j
                }
                _ if self.is_name(j) => j,
                _ => return None,
            };
            if start >= 2 && self.is(start - 1, ".") {
                j = start - 2;
                continue;
            }
            return Some(start);
        }
    }

    fn new_prefix(&self, name_k: usize) -> Option<usize> {
        let mut k = name_k;
        while k >= 2 && self.is(k - 1, ".") && self.is_ident(k - 2) {
            k -= 2;
        }
        (k >= 1 && self.is(k - 1, "new")).then(|| k - 1)
    }

    fn generic_ctor_start(&self, gt: usize) -> Option<usize> {
        let mut depth = 0usize;
        let mut j = gt;
        loop {
            match self.text(j) {
                ">" => depth += 1,
                "<" => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
            j = j.checked_sub(1)?;
        }
        let name_k = j.checked_sub(1)?;
        self.new_prefix(name_k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(src: &str) -> SyntaxIndex {
        index_source(&SourceFile::new("T.java", FileKind::SubjectSource, src)).unwrap()
    }

    fn slice(src: &str, s: Span) -> &str {
        &src[s.start..s.end]
    }

    #[test]
    fn close_call_with_receiver() {
        let src = "class A { void m() { is.close(); } }";
        let i = idx(src);
        assert_eq!(i.call_sites.len(), 1);
        let c = &i.call_sites[0];
        assert_eq!(c.method_name, "close");
        assert_eq!(c.receiver_text, "is");
        assert!(c.argument_spans.is_empty());
        assert_eq!(slice(src, c.full_span), "is.close()");
        assert_eq!(c.enclosing_method_name, "m");
        assert_eq!(slice(src, c.enclosing_statement_span.unwrap()), "is.close();");
        assert_eq!(c.end_column - c.start_column, c.full_span.len());
    }

    #[test]
    fn nested_calls_and_string_commas() {
        let src = "class A { void m() { f(g(a, b), \"x,y\"); } }";
        let i = idx(src);
        assert_eq!(i.call_sites.len(), 2);
        let f = &i.call_sites[0];
        let g = &i.call_sites[1];
        assert_eq!(f.method_name, "f");
        let args: Vec<_> = f.argument_spans.iter().map(|s| slice(src, *s)).collect();
        assert_eq!(args, ["g(a, b)", "\"x,y\""]);
        assert_eq!(g.method_name, "g");
        let args: Vec<_> = g.argument_spans.iter().map(|s| slice(src, *s)).collect();
        assert_eq!(args, ["a", "b"]);
    }

    #[test]
    fn generics_do_not_split_arguments() {
        let src = "class A { void m() { put(new HashMap<String, Integer>(), x < y, z > w); } }";
        let i = idx(src);
        let put = i.call_sites.iter().find(|c| c.method_name == "put").unwrap();
        let args: Vec<_> = put.argument_spans.iter().map(|s| slice(src, *s)).collect();
        assert_eq!(args, ["new HashMap<String, Integer>()", "x < y", "z > w"]);
        let ctor = i.call_sites.iter().find(|c| c.constructor).unwrap();
        assert_eq!(ctor.method_name, "HashMap");
        assert_eq!(slice(src, ctor.full_span), "new HashMap<String, Integer>()");
    }

    #[test]
    fn comments_and_strings_hide_calls() {
        let src = "class A { void m() { // a.b()\n /* c(d) */ String s = \"e(f)\"; } }";
        assert!(idx(src).call_sites.is_empty());
    }

    #[test]
    fn chained_receivers_and_multiline() {
        let src = "class A { void m() {\n  getWindow()\n    .getDecorView().setOnClickListener(\n      null);\n} }";
        let i = idx(src);
        let c = i
            .call_sites
            .iter()
            .find(|c| c.method_name == "setOnClickListener")
            .unwrap();
        assert_eq!(c.receiver_text, "getWindow()\n    .getDecorView()");
        assert_eq!(c.line, 2);
        assert_eq!(c.start_column, 3);
        assert_eq!(i.call_sites[0].method_name, "setOnClickListener");
    }

    #[test]
    fn anonymous_class_methods_and_lambdas() {
        let src = r#"class A {
  void onCreate(Bundle b) {
    btn.setOnClickListener(new View.OnClickListener() {
      @Override
      public void onClick(View v) {
        go(v);
      }
    });
    run(() -> { inner(); });
  }
}"#;
        let i = idx(src);
        let names: Vec<_> = i.method_decls.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(names, ["onCreate", "onClick"]);
        let go = i.call_sites.iter().find(|c| c.method_name == "go").unwrap();
        assert_eq!(go.enclosing_method_name, "onClick");
        let inner = i.call_sites.iter().find(|c| c.method_name == "inner").unwrap();
        assert_eq!(inner.enclosing_method_name, "onCreate");
        let on_click = &i.method_decls[1];
        let first = &i.statements[on_click.first_statement.unwrap()];
        assert_eq!(slice(src, first.span), "go(v);");
        let listener = i
            .call_sites
            .iter()
            .find(|c| c.method_name == "setOnClickListener")
            .unwrap();
        assert_eq!(listener.argument_spans.len(), 1);
        assert!(slice(src, listener.argument_spans[0]).starts_with("new View.OnClickListener()"));
    }

    #[test]
    fn declarations_of_every_kind() {
        let src = r#"package com.x;
import java.io.*;
import static java.lang.Math.max;
class A {
  private final Cursor c;
  void m(final FileInputStream in, String... rest) {
    BufferedReader r = null;
    var out = new java.io.FileOutputStream("f");
    try (InputStream s = open()) { } catch (IOException | RuntimeException e) { }
    for (int k = 0; k < 3; k++) { }
    for (String t : rest) { }
  }
}"#;
        let i = idx(src);
        assert_eq!(i.package_name.as_deref(), Some("com.x"));
        assert_eq!(i.imported_names, ["java.io.*", "java.lang.Math.max"]);
        let decls: Vec<_> = i
            .var_declarations
            .iter()
            .map(|d| (d.name.as_str(), d.declared_type_name.as_str(), d.kind))
            .collect();
        assert_eq!(
            decls,
            [
                ("c", "Cursor", VarKind::Field),
                ("in", "FileInputStream", VarKind::Parameter),
                ("rest", "String", VarKind::Parameter),
                ("r", "BufferedReader", VarKind::Local),
                ("out", "java.io.FileOutputStream", VarKind::Local),
                ("s", "InputStream", VarKind::Resource),
                ("e", "IOException | RuntimeException", VarKind::CatchParameter),
                ("k", "int", VarKind::Local),
                ("t", "String", VarKind::Local),
            ]
        );
        assert!(i.var_declarations[1].is_final);
    }

    #[test]
    fn statement_shapes() {
        let src =
            "class A { void m() { if (a) b(); else { c(); } switch (x) { case 1: d(); break; case 2 -> e(); } } }";
        let i = idx(src);
        let b = i.call_sites.iter().find(|c| c.method_name == "b").unwrap();
        let stmt = &i.statements[b.enclosing_statement.unwrap()];
        assert!(!stmt.in_block);
        let c = i.call_sites.iter().find(|c| c.method_name == "c").unwrap();
        assert!(i.statements[c.enclosing_statement.unwrap()].in_block);
        let d = i.call_sites.iter().find(|c| c.method_name == "d").unwrap();
        assert!(i.statements[d.enclosing_statement.unwrap()].in_block);
        let e = i.call_sites.iter().find(|c| c.method_name == "e").unwrap();
        assert!(!i.statements[e.enclosing_statement.unwrap()].in_block);
    }

    #[test]
    fn types_and_enums() {
        let src = "public class A { enum E { X(\"a\"), Y; void f() { g(); } } interface I { void h(); } }";
        let i = idx(src);
        let types: Vec<_> = i
            .type_declarations
            .iter()
            .map(|t| (t.name.as_str(), t.top_level))
            .collect();
        assert_eq!(types, [("A", true), ("E", false), ("I", false)]);
        assert_eq!(i.call_sites.len(), 1);
        assert_eq!(i.method_decls.len(), 1);
    }

    #[test]
    fn unbalanced_braces_fail() {
        let f = SourceFile::new("T.java", FileKind::SubjectSource, "class A { void m() { }");
        let err = index_source(&f).unwrap_err();
        assert_eq!(err.path, "T.java");
        let f = SourceFile::new("T.java", FileKind::SubjectSource, "class A { ) }");
        assert!(index_source(&f).is_err());
    }

    #[test]
    fn id_references_and_literals() {
        let src = "class A { void m() { findViewById(R.id.title); f(android.R.id.text1); s = \"q\"; } }";
        let i = idx(src);
        assert_eq!(i.id_references, ["title"]);
        assert_eq!(i.string_literals.len(), 1);
        assert_eq!(i.string_literals[0].value, "q");
    }
}
