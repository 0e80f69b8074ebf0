//! Per-statement expression facts: def/use sets by simple name, literal
//! categories and operator categories.

use std::collections::BTreeSet;

use tree_sitter::Node;

use crate::vocab::{LiteralKind, OpTag};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExprFacts {
    pub defs: BTreeSet<String>,
    pub uses: BTreeSet<String>,
    pub literals: Vec<LiteralKind>,
    pub ops: Vec<OpTag>,
}

pub(crate) fn literal_kind(kind: &str) -> Option<LiteralKind> {
    Some(match kind {
        "decimal_integer_literal" | "hex_integer_literal" | "octal_integer_literal" | "binary_integer_literal" => {
            LiteralKind::Int
        }
        "decimal_floating_point_literal" | "hex_floating_point_literal" => LiteralKind::Float,
        "character_literal" => LiteralKind::Char,
        "string_literal" | "text_block" => LiteralKind::String,
        "true" | "false" => LiteralKind::Bool,
        "null_literal" => LiteralKind::Null,
        _ => return None,
    })
}

pub(crate) fn text<'s>(node: Node<'_>, src: &'s str) -> &'s str {
    &src[node.byte_range()]
}

pub(crate) fn named_children<'t>(node: Node<'t>) -> Vec<Node<'t>> {
    let mut cursor = node.walk();
    node.named_children(&mut cursor).filter(|c| !c.is_extra()).collect()
}

/// Strips any number of enclosing parentheses.
pub(crate) fn unparen(mut node: Node<'_>) -> Node<'_> {
    while node.kind() == "parenthesized_expression" {
        match named_children(node).into_iter().next() {
            Some(inner) => node = inner,
            None => break,
        }
    }
    node
}

fn operator_text<'s>(node: Node<'_>, src: &'s str) -> Option<&'s str> {
    node.child_by_field_name("operator").map(|op| text(op, src))
}

impl ExprFacts {
    pub fn walk(&mut self, node: Node<'_>, src: &str) {
        if node.is_extra() {
            return;
        }
        if let Some(lit) = literal_kind(node.kind()) {
            self.literals.push(lit);
            return;
        }
        match node.kind() {
            "identifier" => {
                self.uses.insert(text(node, src).to_string());
            }
            "this" => {
                self.uses.insert("this".to_string());
            }
            "unary_expression" => {
                let op = operator_text(node, src).unwrap_or("");
                let operand = node.child_by_field_name("operand");
                // A signed numeric literal is a single literal, not an operator.
                if let (Some(operand), "-" | "+") = (operand, op) {
                    if matches!(literal_kind(operand.kind()), Some(LiteralKind::Int | LiteralKind::Float)) {
                        self.walk(operand, src);
                        return;
                    }
                }
                if let Some(tag) = OpTag::from_unary(op) {
                    self.ops.push(tag);
                }
                if let Some(operand) = operand {
                    self.walk(operand, src);
                }
            }
            "binary_expression" => {
                if let Some(tag) = operator_text(node, src).and_then(OpTag::from_binary) {
                    self.ops.push(tag);
                }
                for field in ["left", "right"] {
                    if let Some(c) = node.child_by_field_name(field) {
                        self.walk(c, src);
                    }
                }
            }
            "update_expression" => {
                let mut cursor = node.walk();
                let mut target = None;
                for c in node.children(&mut cursor) {
                    match c.kind() {
                        "++" => self.ops.push(OpTag::Increment),
                        "--" => self.ops.push(OpTag::Decrement),
                        _ if c.is_named() && !c.is_extra() => target = Some(c),
                        _ => {}
                    }
                }
                if let Some(t) = target {
                    self.lvalue(t, src, true);
                }
            }
            "assignment_expression" => {
                let op = operator_text(node, src).unwrap_or("=");
                let compound = OpTag::from_assignment(op);
                if let Some(tag) = compound {
                    self.ops.push(tag);
                }
                if let Some(left) = node.child_by_field_name("left") {
                    self.lvalue(left, src, compound.is_some());
                }
                if let Some(right) = node.child_by_field_name("right") {
                    self.walk(right, src);
                }
            }
            "method_invocation" => {
                self.ops.push(OpTag::Call);
                if let Some(obj) = node.child_by_field_name("object") {
                    self.walk(obj, src);
                }
                if let Some(args) = node.child_by_field_name("arguments") {
                    self.walk(args, src);
                }
            }
            "explicit_constructor_invocation" => {
                self.ops.push(OpTag::Call);
                if let Some(obj) = node.child_by_field_name("object") {
                    self.walk(obj, src);
                }
                if let Some(args) = node.child_by_field_name("arguments") {
                    self.walk(args, src);
                }
            }
            "object_creation_expression" => {
                self.ops.push(OpTag::New);
                for c in named_children(node) {
                    match c.kind() {
                        "argument_list" => self.walk(c, src),
                        // Qualified creation: `outer.new Inner()`.
                        "identifier" | "field_access" | "this" | "method_invocation" | "parenthesized_expression" => {
                            self.walk(c, src)
                        }
                        _ => {}
                    }
                }
            }
            "array_creation_expression" => {
                self.ops.push(OpTag::New);
                for c in named_children(node) {
                    match c.kind() {
                        "dimensions_expr" | "array_initializer" => self.walk(c, src),
                        _ => {}
                    }
                }
            }
            "field_access" => {
                if let Some(obj) = node.child_by_field_name("object") {
                    self.walk(obj, src);
                }
            }
            "array_access" => {
                for field in ["array", "index"] {
                    if let Some(c) = node.child_by_field_name(field) {
                        self.walk(c, src);
                    }
                }
            }
            "cast_expression" => {
                self.ops.push(OpTag::Cast);
                if let Some(v) = node.child_by_field_name("value") {
                    self.walk(v, src);
                }
            }
            "instanceof_expression" => {
                self.ops.push(OpTag::InstanceOf);
                if let Some(left) = node.child_by_field_name("left") {
                    self.walk(left, src);
                }
                if let Some(name) = node.child_by_field_name("name") {
                    self.defs.insert(text(name, src).to_string());
                }
            }
            "ternary_expression" => {
                self.ops.push(OpTag::Ternary);
                for field in ["condition", "consequence", "alternative"] {
                    if let Some(c) = node.child_by_field_name(field) {
                        self.walk(c, src);
                    }
                }
            }
            // Opaque: lambda bodies and anonymous/local classes are not expanded.
            "lambda_expression" => self.ops.push(OpTag::Lambda),
            "class_body" | "block" | "class_literal" | "switch_block" => {}
            "switch_expression" => {
                if let Some(c) = node.child_by_field_name("condition") {
                    self.walk(c, src);
                }
            }
            "method_reference" => {
                if let Some(first) = named_children(node).into_iter().next() {
                    if matches!(first.kind(), "identifier" | "field_access" | "this") {
                        self.walk(first, src);
                    }
                }
            }
            "variable_declarator" => {
                if let Some(name) = node.child_by_field_name("name") {
                    self.defs.insert(text(name, src).to_string());
                }
                if let Some(v) = node.child_by_field_name("value") {
                    self.walk(v, src);
                }
            }
            k if k.ends_with("_type") || k == "type_identifier" || k == "type_arguments" || k.contains("annotation") || k == "modifiers" => {}
            _ => {
                for c in named_children(node) {
                    self.walk(c, src);
                }
            }
        }
    }

    /// Records the variable written by an assignment target. Writes through
    /// an explicit receiver (`o.f = ...`) only count as a use of `o`.
    fn lvalue(&mut self, node: Node<'_>, src: &str, read_too: bool) {
        let node = unparen(node);
        match node.kind() {
            "identifier" => {
                let name = text(node, src).to_string();
                if read_too {
                    self.uses.insert(name.clone());
                }
                self.defs.insert(name);
            }
            "array_access" => {
                if let Some(arr) = node.child_by_field_name("array").map(unparen) {
                    if arr.kind() == "identifier" {
                        let name = text(arr, src).to_string();
                        if read_too {
                            self.uses.insert(name.clone());
                        }
                        self.defs.insert(name);
                    } else {
                        self.walk(arr, src);
                    }
                }
                if let Some(idx) = node.child_by_field_name("index") {
                    self.walk(idx, src);
                }
            }
            _ => self.walk(node, src),
        }
    }
}

/// Def/use sets of a single Java expression or expression statement.
///
/// Compound assignments and `++`/`--` put the variable in both sets.
pub fn defs_uses(expression: &str) -> Option<(BTreeSet<String>, BTreeSet<String>)> {
    let body = expression.trim().trim_end_matches(';');
    let wrapped = format!("class W {{ void m() {{ {body}; }} }}");
    let mut parser = super::builder::java_parser();
    let tree = parser.parse(&wrapped, None)?;
    if tree.root_node().has_error() {
        return None;
    }
    let stmt = find_first(tree.root_node(), "expression_statement")?;
    let mut facts = ExprFacts::default();
    for c in named_children(stmt) {
        facts.walk(c, &wrapped);
    }
    Some((facts.defs, facts.uses))
}

fn find_first<'t>(node: Node<'t>, kind: &str) -> Option<Node<'t>> {
    if node.kind() == kind {
        return Some(node);
    }
    named_children(node).into_iter().find_map(|c| find_first(c, kind))
}
