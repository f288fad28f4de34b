//! Visitor over a [`SyntaxIndex`]. Locators that need a new kind of
//! candidate add a method here with an empty default, so existing visitors
//! keep compiling.

use super::java::{CallSite, MethodDecl, StringLiteral, SyntaxIndex};

pub trait SyntaxVisitor {
    fn visit_call_site(&mut self, _index: &SyntaxIndex, _call: &CallSite) {}
    fn visit_string_literal(&mut self, _index: &SyntaxIndex, _literal: &StringLiteral) {}
    fn visit_method(&mut self, _index: &SyntaxIndex, _method: &MethodDecl) {}
}

/// Dispatches every call site, then every string literal, then every method
/// body, each in index order.
pub fn walk_index<V: SyntaxVisitor + ?Sized>(index: &SyntaxIndex, visitor: &mut V) {
    for call in &index.call_sites {
        visitor.visit_call_site(index, call);
    }
    for literal in &index.string_literals {
        visitor.visit_string_literal(index, literal);
    }
    for method in &index.method_decls {
        visitor.visit_method(index, method);
    }
}
