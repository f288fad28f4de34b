//! Locators: refine coarse syntactic candidates into exact locations.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;

use super::{exact_location, Candidate, LocateContext, Located, Locator, Target};
use crate::parsing::{CallSite, StatementKind, StringLiteral, SyntaxIndex, VarKind, XmlIndex};
use crate::pfp::{NameMatch, XmlMatch, XmlPattern};
use crate::project::SourceFile;
use crate::span::Span;

use super::LAUNCHER_CATEGORY;

fn captures(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// `span` with surrounding whitespace removed.
pub(crate) fn trim_span(file: &SourceFile, span: Span) -> Span {
    let text = file.slice(span);
    let lead = text.len() - text.trim_start().len();
    let trail = text.len() - text.trim_end().len();
    if lead == text.len() {
        return Span::new(span.start, span.start);
    }
    Span::new(span.start + lead, span.end - trail)
}

/// Byte offset where the line holding `offset` starts.
pub(crate) fn line_start(file: &SourceFile, offset: usize) -> usize {
    let starts = file.line_index();
    match starts.binary_search(&offset) {
        Ok(i) => starts[i],
        Err(i) => starts[i - 1],
    }
}

/// Leading whitespace of the line holding `offset`.
pub(crate) fn line_indent(file: &SourceFile, offset: usize) -> &str {
    let start = line_start(file, offset);
    let line = &file.content()[start..];
    let width = line.len() - line.trim_start_matches([' ', '\t']).len();
    &line[..width]
}

fn only_whitespace_before(file: &SourceFile, offset: usize) -> bool {
    file.content()[line_start(file, offset)..offset]
        .chars()
        .all(|c| c == ' ' || c == '\t')
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '$')
}

/// The string literal occupying exactly `span`, if any.
fn literal_at(source: &SyntaxIndex, span: Span) -> Option<&StringLiteral> {
    source.string_literals.iter().find(|l| l.span == span && !l.text_block)
}

fn call_candidate<'a>(candidate: &Candidate<'a>) -> Option<&'a CallSite> {
    match candidate {
        Candidate::Call(c) => Some(c),
        _ => None,
    }
}

fn argument(file: &SourceFile, call: &CallSite, i: usize) -> Option<Span> {
    call.argument_spans
        .get(i)
        .map(|s| trim_span(file, *s))
        .filter(|s| !s.is_empty())
}

/// Declared type of a local receiver, looked up in the call's own method.
fn receiver_declaration<'a>(source: &'a SyntaxIndex, call: &CallSite) -> Option<&'a crate::parsing::VarDecl> {
    if !is_identifier(&call.receiver_text) {
        return None;
    }
    let method = call.enclosing_method_span?;
    source.declaration_before(&call.receiver_text, method, call.full_span.start)
}

// ---------------------------------------------------------------------------
// GUI listeners.

/// `setOnClickListener(listener)`: the listener argument becomes the
/// injection point.
pub(crate) struct BuggyGuiListenerLocator;

impl Locator for BuggyGuiListenerLocator {
    fn target(&self) -> Target {
        Target::Calls {
            names: &["setOnClickListener"],
            constructor: Some(false),
        }
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let Some(call) = call_candidate(candidate) else {
            return vec![];
        };
        if call.argument_spans.len() != 1 {
            return vec![];
        }
        let Some(arg) = argument(ctx.file, call, 0) else {
            return vec![];
        };
        if ctx.file.slice(arg) == "null" {
            return vec![];
        }
        let (line, column) = ctx.file.line_col(arg.start);
        let mut loc = crate::pfp::MutationLocation {
            operator_id: "BuggyGUIListener".into(),
            file_path: ctx.file.relative_path().into(),
            line,
            start_column: column - 1,
            end_column: 0,
            length: ctx.file.slice(arg).chars().count(),
            captures: BTreeMap::new(),
        };
        // Fix start column
        loc.start_column += 1;
        // Build exact mutation location
        loc.end_column = loc.start_column + loc.length;
        vec![Located {
            location: loc,
            region: arg,
        }]
    }
}

// ---------------------------------------------------------------------------
// Assignments whose right-hand side is a given call: `v = <call>;`.

static ASSIGNMENT_PREFIX: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?x)^
        (?P<mods>(?:final\s+)?)
        (?:[A-Za-z_$][\w$.]*(?:<[^;=]*>)?(?:\s*\[\s*\])*\s+)?   # optional declared type
        (?P<var>(?:this\.)?[A-Za-z_$][\w$]*)
        \s*=\s*
        (?:\(\s*[A-Za-z_$][\w$.]*(?:<[^;=()]*>)?\s*\)\s*)?     # optional cast
        $",
    )
    .expect("valid assignment pattern")
});

/// Assignment statements (`v = new Intent(..);`, `v = (T) findViewById(..);`)
/// after which `v = null;` can be inserted.
pub(crate) struct AssignmentLocator {
    pub id: &'static str,
    pub names: &'static [&'static str],
    pub constructor: bool,
}

impl AssignmentLocator {
    /// The enclosing statement and the assigned variable.
    pub(crate) fn assignment(file: &SourceFile, source: &SyntaxIndex, call: &CallSite) -> Option<(Span, String)> {
        let stmt = source.statements.get(call.enclosing_statement?)?;
        if stmt.kind != StatementKind::Simple || !stmt.in_block || stmt.enclosing_method_span.is_none() {
            return None;
        }
        let prefix = file.content()[stmt.span.start..call.full_span.start].trim_end();
        let suffix = &file.content()[call.full_span.end..stmt.span.end];
        if suffix.trim() != ";" {
            return None;
        }
        let caps = ASSIGNMENT_PREFIX.captures(prefix)?;
        if !caps["mods"].is_empty() {
            return None;
        }
        let var = caps["var"].to_string();
        let field_name = var.strip_prefix("this.").unwrap_or(&var);
        let final_field = source
            .var_declarations
            .iter()
            .any(|d| d.kind == VarKind::Field && d.name == field_name && d.is_final);
        let final_local = !var.starts_with("this.")
            && stmt
                .enclosing_method_span
                .and_then(|m| source.declaration_before(&var, m, call.full_span.start))
                .is_some_and(|d| d.is_final || d.kind == VarKind::Resource);
        if final_field || final_local {
            return None;
        }
        Some((stmt.span, var))
    }
}

impl Locator for AssignmentLocator {
    fn target(&self) -> Target {
        Target::Calls {
            names: self.names,
            constructor: Some(self.constructor),
        }
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let (Some(call), Some(source)) = (call_candidate(candidate), ctx.source) else {
            return vec![];
        };
        match Self::assignment(ctx.file, source, call) {
            Some((_, var)) => vec![exact_location(
                self.id,
                ctx.file,
                call.full_span,
                captures(&[("object", &var)]),
            )],
            None => vec![],
        }
    }
}

// ---------------------------------------------------------------------------
// Argument replacement.

/// Which argument of a call is the injection point, and when.
pub(crate) enum ArgumentRule {
    /// `putExtra("key", v)`: a plain string-literal first argument.
    LiteralKey,
    /// Argument `index` of a call with exactly `arity` arguments, unless it
    /// already reads `unless`.
    Replaceable {
        index: usize,
        arity: usize,
        unless: &'static [&'static str],
    },
}

pub(crate) struct ArgumentLocator {
    pub id: &'static str,
    pub names: &'static [&'static str],
    pub rule: ArgumentRule,
}

impl Locator for ArgumentLocator {
    fn target(&self) -> Target {
        Target::Calls {
            names: self.names,
            constructor: Some(false),
        }
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let (Some(call), Some(source)) = (call_candidate(candidate), ctx.source) else {
            return vec![];
        };
        let region = match &self.rule {
            ArgumentRule::LiteralKey => {
                if call.argument_spans.len() < 2 {
                    return vec![];
                }
                match argument(ctx.file, call, 0) {
                    Some(a) if literal_at(source, a).is_some() => a,
                    _ => return vec![],
                }
            }
            ArgumentRule::Replaceable { index, arity, unless } => {
                if call.argument_spans.len() != *arity {
                    return vec![];
                }
                match argument(ctx.file, call, *index) {
                    Some(a) if !unless.contains(&ctx.file.slice(a)) => a,
                    _ => return vec![],
                }
            }
        };
        vec![exact_location(self.id, ctx.file, region, BTreeMap::new())]
    }
}

static R_ID: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^R\s*\.\s*id\s*\.\s*([A-Za-z_$][\w$]*)$").expect("valid R.id pattern"));

/// `findViewById(R.id.x)` where the project declares another id to swap in.
pub(crate) struct InvalidIdLocator;

impl Locator for InvalidIdLocator {
    fn target(&self) -> Target {
        Target::Calls {
            names: &["findViewById"],
            constructor: Some(false),
        }
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let Some(call) = call_candidate(candidate) else {
            return vec![];
        };
        if call.argument_spans.len() != 1 {
            return vec![];
        }
        let Some(arg) = argument(ctx.file, call, 0) else {
            return vec![];
        };
        let Some(caps) = R_ID.captures(ctx.file.slice(arg)) else {
            return vec![];
        };
        let current = &caps[1];
        let mut found = BTreeMap::new();
        if let Some(ids) = ctx.project_ids {
            // The next id after the current one, wrapping around.
            let other = ids
                .range::<str, _>((std::ops::Bound::Excluded(current), std::ops::Bound::Unbounded))
                .chain(ids.iter())
                .find(|id| id.as_str() != current);
            match other {
                Some(id) => {
                    found.insert("id".to_string(), id.clone());
                }
                None => return vec![],
            }
        }
        vec![exact_location("InvalidIDFindView", ctx.file, arg, found)]
    }
}

static DIGITS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d+$").expect("valid digits pattern"));

/// `cursor.getString(3)`: a column-index literal on a cursor receiver.
pub(crate) struct CursorIndexLocator {
    pub cursor_types: Vec<String>,
}

impl Locator for CursorIndexLocator {
    fn target(&self) -> Target {
        Target::Calls {
            names: &["getString", "getInt", "getLong", "getColumnIndex"],
            constructor: Some(false),
        }
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let (Some(call), Some(source)) = (call_candidate(candidate), ctx.source) else {
            return vec![];
        };
        if call.argument_spans.len() != 1 {
            return vec![];
        }
        let Some(arg) = argument(ctx.file, call, 0) else {
            return vec![];
        };
        if !DIGITS.is_match(ctx.file.slice(arg)) || ctx.file.slice(arg).parse::<u64>().is_err() {
            return vec![];
        }
        let typed = receiver_declaration(source, call).is_some_and(|d| {
            self.cursor_types
                .iter()
                .any(|k| d.declared_type_name.contains(k.as_str()))
        });
        if !typed {
            return vec![];
        }
        vec![exact_location(
            "InvalidIndexQueryParameter",
            ctx.file,
            arg,
            BTreeMap::new(),
        )]
    }
}

// ---------------------------------------------------------------------------
// `x.close()` on a typed local.

pub(crate) struct CloseLocator {
    pub id: &'static str,
    pub type_keywords: Vec<String>,
}

impl Locator for CloseLocator {
    fn target(&self) -> Target {
        Target::Calls {
            names: &["close"],
            constructor: Some(false),
        }
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let (Some(call), Some(source)) = (call_candidate(candidate), ctx.source) else {
            return vec![];
        };
        if !call.argument_spans.is_empty() {
            return vec![];
        }
        // The call must be a whole statement that opens its line, so that a
        // line inserted before it lands in the same block.
        let Some(stmt) = call.enclosing_statement.and_then(|s| source.statements.get(s)) else {
            return vec![];
        };
        let statement_text = ctx.file.slice(stmt.span);
        let call_text = ctx.file.slice(call.full_span);
        if stmt.kind != StatementKind::Simple
            || !stmt.in_block
            || stmt.span.start != call.full_span.start
            || statement_text[call_text.len()..].trim() != ";"
            || !only_whitespace_before(ctx.file, stmt.span.start)
        {
            return vec![];
        }
        let Some(decl) = receiver_declaration(source, call) else {
            return vec![];
        };
        if decl.is_final
            || decl.kind == VarKind::Resource
            || !self
                .type_keywords
                .iter()
                .any(|k| decl.declared_type_name.contains(k.as_str()))
        {
            return vec![];
        }
        vec![exact_location(
            self.id,
            ctx.file,
            call.full_span,
            captures(&[("object", &call.receiver_text)]),
        )]
    }
}

// ---------------------------------------------------------------------------
// Method bodies.

pub(crate) struct FirstStatementLocator {
    pub id: &'static str,
    pub names: &'static [&'static str],
    /// When set, the method must declare a parameter of this simple type
    /// name; `onCreate(Bundle)` is how screens are built, while services and
    /// database helpers have their own `onCreate` overloads.
    pub parameter_type: Option<&'static str>,
}

/// Whether the parameter list in `signature` mentions `type_name` as a
/// whole word (possibly qualified, e.g. `android.os.Bundle`).
fn declares_parameter(signature: &str, type_name: &str) -> bool {
    let Some(open) = signature.find('(') else {
        return false;
    };
    let params = &signature[open + 1..];
    params.match_indices(type_name).any(|(i, _)| {
        let before = params[..i].chars().next_back();
        let after = params[i + type_name.len()..].chars().next();
        !before.is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '$')
            && !after.is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '$')
    })
}

impl Locator for FirstStatementLocator {
    fn target(&self) -> Target {
        Target::MethodBodies { names: self.names }
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let (Candidate::Method(method), Some(source)) = (candidate, ctx.source) else {
            return vec![];
        };
        if self
            .parameter_type
            .is_some_and(|t| !declares_parameter(&method.signature_text, t))
        {
            return vec![];
        }
        let Some(stmt) = method.first_statement.and_then(|s| source.statements.get(s)) else {
            return vec![];
        };
        vec![exact_location(self.id, ctx.file, stmt.span, BTreeMap::new())]
    }
}

// ---------------------------------------------------------------------------
// String literals.

pub(crate) const FILE_CONSTRUCTORS: &[&str] = &[
    "File",
    "FileInputStream",
    "FileOutputStream",
    "FileReader",
    "FileWriter",
    "RandomAccessFile",
];
pub(crate) const FILE_OPEN_CALLS: &[&str] = &["openFileInput", "openFileOutput", "openOrCreateDatabase", "open"];
pub(crate) const DATE_FORMAT_CONSTRUCTORS: &[&str] = &["SimpleDateFormat"];

/// What a literal must look like, and where it must sit.
#[derive(Clone, Copy)]
pub(crate) enum LiteralRule {
    FilePath,
    SqlQuery,
    Uri,
    DatePattern,
}

pub(crate) struct LiteralLocator {
    pub id: &'static str,
    pub rule: LiteralRule,
}

static SQL_START: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^\s*(SELECT|INSERT|UPDATE|DELETE)\b").expect("valid SQL pattern"));

/// Path whose last segment, reversed, is the mutated value.
pub(crate) fn last_segment(path: &str) -> Option<(usize, &str)> {
    let cut = path.rfind('/')? + 1;
    let segment = &path[cut..];
    let reversed: String = segment.chars().rev().collect();
    (segment.contains('.') && reversed != segment && !path.contains('\\')).then_some((cut, segment))
}

impl LiteralRule {
    pub(crate) fn accepts(&self, value: &str) -> bool {
        match self {
            LiteralRule::FilePath => last_segment(value).is_some(),
            LiteralRule::SqlQuery => SQL_START.is_match(value),
            LiteralRule::Uri => {
                (value.starts_with("http://") || value.starts_with("https://")) && !value.contains('\\')
            }
            LiteralRule::DatePattern => (value.contains('d') || value.contains('M')) && !value.contains('\\'),
        }
    }

    fn context_ok(&self, source: &SyntaxIndex, file: &SourceFile, literal: &StringLiteral) -> bool {
        let inside = |names: &[&str], constructor: Option<bool>, exact: bool| {
            source.call_sites.iter().any(|c| {
                names.contains(&c.method_name.as_str())
                    && constructor.is_none_or(|k| k == c.constructor)
                    && c.argument_spans.iter().any(|a| {
                        let a = trim_span(file, *a);
                        if exact {
                            a == literal.span
                        } else {
                            a.contains(literal.span)
                        }
                    })
            })
        };
        match self {
            LiteralRule::FilePath => {
                inside(FILE_CONSTRUCTORS, Some(true), false) || inside(FILE_OPEN_CALLS, Some(false), false)
            }
            LiteralRule::DatePattern => inside(DATE_FORMAT_CONSTRUCTORS, Some(true), true),
            LiteralRule::SqlQuery | LiteralRule::Uri => true,
        }
    }
}

impl Locator for LiteralLocator {
    fn target(&self) -> Target {
        Target::StringLiterals
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let (Candidate::Literal(literal), Some(source)) = (candidate, ctx.source) else {
            return vec![];
        };
        if literal.text_block || !self.rule.accepts(&literal.value) || !self.rule.context_ok(source, ctx.file, literal)
        {
            return vec![];
        }
        vec![exact_location(self.id, ctx.file, literal.span, BTreeMap::new())]
    }
}

// ---------------------------------------------------------------------------
// XML.

fn is_launcher(xml: &XmlIndex, element: usize) -> bool {
    xml.descendants(element).any(|(_, e)| {
        e.tag_name == "category"
            && e.attribute("android:name")
                .is_some_and(|a| a.value_text == LAUNCHER_CATEGORY)
    })
}

fn xml_candidate(candidate: &Candidate<'_>) -> Option<XmlMatch> {
    match candidate {
        Candidate::Xml(m) => Some(*m),
        _ => None,
    }
}

/// Activity elements, launcher or not.
pub(crate) struct ActivityLocator {
    pub launcher: bool,
}

impl Locator for ActivityLocator {
    fn target(&self) -> Target {
        if self.launcher {
            Target::Xml(XmlPattern::attribute(
                NameMatch::Exact("android:name".into()),
                None,
                &["activity"],
            ))
        } else {
            Target::Xml(XmlPattern::element("activity"))
        }
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let (Some(m), Some(xml)) = (xml_candidate(candidate), ctx.xml) else {
            return vec![];
        };
        if is_launcher(xml, m.element) != self.launcher {
            return vec![];
        }
        if !self.launcher {
            return vec![exact_location("ActivityNotDefined", ctx.file, m.span, BTreeMap::new())];
        }
        let own = ctx.file.slice(m.span);
        let replacement = xml
            .elements
            .iter()
            .filter(|e| e.tag_name == "activity")
            .filter_map(|e| e.attribute("android:name"))
            .map(|a| a.value_text.as_str())
            .find(|name| *name != own)
            .map(str::to_string)
            .unwrap_or_else(|| format!("{own}Missing"));
        vec![exact_location(
            "WrongMainActivity",
            ctx.file,
            m.span,
            captures(&[("replacement", &replacement)]),
        )]
    }
}

/// Any match of the pattern, optionally excluding attribute values.
pub(crate) struct XmlLocator {
    pub id: &'static str,
    pub pattern: XmlPattern,
    pub reject_values: &'static [&'static str],
}

impl Locator for XmlLocator {
    fn target(&self) -> Target {
        Target::Xml(self.pattern.clone())
    }

    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located> {
        let Some(m) = xml_candidate(candidate) else {
            return vec![];
        };
        if m.attribute.is_some() && self.reject_values.contains(&ctx.file.slice(m.span)) {
            return vec![];
        }
        vec![exact_location(self.id, ctx.file, m.span, BTreeMap::new())]
    }
}
