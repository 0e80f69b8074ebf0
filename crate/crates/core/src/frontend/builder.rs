use std::collections::HashSet;

use tree_sitter::{Node, Parser};

use super::defuse::{literal_kind, named_children, text, unparen, ExprFacts};
use super::{CfgEdge, CfgNode, FrontendError, MethodCfg, MethodRef, NodeId, NodeShape, NullTest, Param, Polarity, Span};
use crate::vocab::{LiteralKind, NodeKind, OpTag, TypeTag};

const WRAP_PREFIX: &str = "class __SugarmineWrapper {\n";
const WRAP_SUFFIX: &str = "\n}\n";

pub(crate) fn java_parser() -> Parser {
    let mut parser = Parser::new();
    parser
        .set_language(&tree_sitter_java::LANGUAGE.into())
        .expect("tree-sitter-java grammar is ABI compatible");
    parser
}

/// Builds the CFG of a single method given its source text. Spans are
/// relative to `source`.
pub fn build_cfg(source: &str, method: MethodRef) -> Result<MethodCfg, FrontendError> {
    build_cfg_at(source, method, 0)
}

/// Like [`build_cfg`], with spans shifted by `offset` (the method's byte
/// position in its file).
pub fn build_cfg_at(source: &str, method: MethodRef, offset: usize) -> Result<MethodCfg, FrontendError> {
    let wrapped = format!("{WRAP_PREFIX}{source}{WRAP_SUFFIX}");
    let mut parser = java_parser();
    let fail = |method: MethodRef, message: &str| FrontendError::Method { method, message: message.to_string() };
    let tree = parser.parse(&wrapped, None).ok_or_else(|| fail(method.clone(), "parser gave up"))?;
    if tree.root_node().has_error() {
        return Err(fail(method, "syntax error in method source"));
    }
    let decl = super::ingest::method_nodes(tree.root_node())
        .into_iter()
        .next()
        .ok_or_else(|| fail(method.clone(), "no method declaration found"))?;
    let shift = offset as isize - WRAP_PREFIX.len() as isize;
    cfg_from_method_node(decl, &wrapped, method, shift)
}

pub(crate) fn method_params(decl: Node<'_>, src: &str) -> Vec<(String, String)> {
    let Some(params) = decl.child_by_field_name("parameters") else {
        return Vec::new();
    };
    named_children(params)
        .into_iter()
        .filter_map(|p| match p.kind() {
            "formal_parameter" => {
                let ty = p.child_by_field_name("type").map(|t| text(t, src)).unwrap_or("");
                let name = p.child_by_field_name("name").map(|n| text(n, src))?;
                let dims = p.child_by_field_name("dimensions").map(|d| text(d, src)).unwrap_or("");
                Some((format!("{ty}{dims}"), name.to_string()))
            }
            "spread_parameter" => {
                let ty = named_children(p)
                    .into_iter()
                    .find(|c| c.kind() != "modifiers" && c.kind() != "variable_declarator")
                    .map(|t| text(t, src))
                    .unwrap_or("");
                let name = named_children(p)
                    .into_iter()
                    .find(|c| c.kind() == "variable_declarator")
                    .and_then(|d| d.child_by_field_name("name"))
                    .map(|n| text(n, src))?;
                Some((format!("{ty}..."), name.to_string()))
            }
            _ => None,
        })
        .collect()
}

pub(crate) fn cfg_from_method_node(
    decl: Node<'_>,
    src: &str,
    method: MethodRef,
    shift: isize,
) -> Result<MethodCfg, FrontendError> {
    let Some(body) = decl.child_by_field_name("body") else {
        return Err(FrontendError::Method { method, message: "method has no body".into() });
    };
    let params: Vec<Param> = method_params(decl, src)
        .into_iter()
        .map(|(ty, name)| Param { type_tag: TypeTag::from_type_name(&ty), name })
        .collect();
    let mut b = Builder {
        src,
        shift,
        nodes: Vec::new(),
        edges: Vec::new(),
        seen: HashSet::new(),
        jumps: Vec::new(),
        to_exit: Vec::new(),
        catch_depth: 0,
        locals: HashSet::new(),
        params: params.iter().map(|p| p.name.clone()).collect(),
    };
    let entry = b.add(NodeKind::Entry, b.span(decl.start_byte(), decl.end_byte()), ExprFacts::default(), None, NodeShape::default());
    let exits = b.seq(named_children(body), vec![(entry, Polarity::None)]);
    let exit_span = b.span(body.end_byte().saturating_sub(1), body.end_byte());
    let exit = b.add(NodeKind::Exit, exit_span, ExprFacts::default(), None, NodeShape::default());
    b.connect(&exits, exit);
    let to_exit = std::mem::take(&mut b.to_exit);
    b.connect(&to_exit, exit);
    Ok(MethodCfg { method, params, nodes: b.nodes, edges: b.edges, entry_id: entry, exit_id: exit })
}

type Exit = (NodeId, Polarity);

#[derive(PartialEq, Eq, Clone, Copy)]
enum Jump {
    Loop,
    Switch,
    Block,
}

struct JumpCtx {
    label: Option<String>,
    kind: Jump,
    breaks: Vec<Exit>,
    continues: Vec<Exit>,
}

struct Builder<'s> {
    src: &'s str,
    shift: isize,
    nodes: Vec<CfgNode>,
    edges: Vec<CfgEdge>,
    seen: HashSet<(NodeId, NodeId, Polarity)>,
    jumps: Vec<JumpCtx>,
    to_exit: Vec<Exit>,
    /// Nesting depth of try bodies that have catch clauses.
    catch_depth: usize,
    locals: HashSet<String>,
    params: HashSet<String>,
}

fn is_loop(kind: &str) -> bool {
    matches!(kind, "while_statement" | "for_statement" | "enhanced_for_statement" | "do_statement")
}

fn stmt_count(node: Node<'_>) -> usize {
    if node.kind() == "block" {
        named_children(node).len()
    } else {
        1
    }
}

/// End of the last non-extra child preceding `body`, i.e. the end of a
/// compound statement's header.
fn header_end(node: Node<'_>, body: Node<'_>) -> usize {
    let mut cursor = node.walk();
    let mut end = node.start_byte();
    for c in node.children(&mut cursor) {
        if c.id() == body.id() {
            break;
        }
        if !c.is_extra() {
            end = c.end_byte();
        }
    }
    end
}

fn top_op(cond: Node<'_>, src: &str) -> Option<OpTag> {
    let cond = unparen(cond);
    let op = || cond.child_by_field_name("operator").map(|o| text(o, src)).unwrap_or("");
    match cond.kind() {
        "binary_expression" => OpTag::from_binary(op()),
        "unary_expression" => OpTag::from_unary(op()),
        "instanceof_expression" => Some(OpTag::InstanceOf),
        _ => None,
    }
}

fn variable_name(node: Node<'_>, src: &str) -> Option<String> {
    let node = unparen(node);
    match node.kind() {
        "identifier" => Some(text(node, src).to_string()),
        "field_access" => node.child_by_field_name("field").map(|f| text(f, src).to_string()),
        _ => None,
    }
}

fn null_test(cond: Node<'_>, src: &str) -> Option<NullTest> {
    let cond = unparen(cond);
    if cond.kind() != "binary_expression" {
        return None;
    }
    let negated = match cond.child_by_field_name("operator").map(|o| text(o, src)) {
        Some("==") => false,
        Some("!=") => true,
        _ => return None,
    };
    let left = unparen(cond.child_by_field_name("left")?);
    let right = unparen(cond.child_by_field_name("right")?);
    let var = if right.kind() == "null_literal" {
        variable_name(left, src)?
    } else if left.kind() == "null_literal" {
        variable_name(right, src)?
    } else {
        return None;
    };
    Some(NullTest { var, negated })
}

fn plus_leaves<'t>(node: Node<'t>, src: &str, out: &mut Vec<Node<'t>>) {
    let node = unparen(node);
    let is_plus = node.kind() == "binary_expression"
        && node.child_by_field_name("operator").map(|o| text(o, src)) == Some("+");
    if is_plus {
        for f in ["left", "right"] {
            if let Some(c) = node.child_by_field_name(f) {
                plus_leaves(c, src, out);
            }
        }
    } else {
        out.push(node);
    }
}

/// True if some `+` chain in the expression mixes a string literal with a
/// variable read.
fn has_concat(node: Node<'_>, src: &str) -> bool {
    if matches!(node.kind(), "lambda_expression" | "class_body") {
        return false;
    }
    if node.kind() == "binary_expression" && node.child_by_field_name("operator").map(|o| text(o, src)) == Some("+") {
        let mut leaves = Vec::new();
        plus_leaves(node, src, &mut leaves);
        let has_str = leaves.iter().any(|l| literal_kind(l.kind()) == Some(LiteralKind::String));
        let has_var = leaves.iter().any(|l| matches!(l.kind(), "identifier" | "field_access"));
        if has_str && has_var {
            return true;
        }
    }
    named_children(node).into_iter().any(|c| has_concat(c, src))
}

impl<'s> Builder<'s> {
    fn span(&self, start: usize, end: usize) -> Span {
        let fix = |p: usize| (p as isize + self.shift).max(0) as usize;
        Span { start: fix(start), end: fix(end) }
    }

    fn add(&mut self, kind: NodeKind, span: Span, facts: ExprFacts, declared_type: Option<TypeTag>, shape: NodeShape) -> NodeId {
        let id = self.nodes.len();
        let ExprFacts { defs, uses, literals, ops } = facts;
        self.nodes.push(CfgNode {
            id,
            kind,
            declared_type,
            literal_kinds: literals,
            operator_tags: ops,
            defs,
            uses,
            span,
            shape,
        });
        id
    }

    fn edge(&mut self, src: NodeId, dst: NodeId, polarity: Polarity) {
        if src != dst && self.seen.insert((src, dst, polarity)) {
            self.edges.push(CfgEdge { src, dst, polarity });
        }
    }

    fn connect(&mut self, exits: &[Exit], dst: NodeId) {
        for &(src, pol) in exits {
            self.edge(src, dst, pol);
        }
    }

    /// Adds a node for a statement and wires `pending` into it.
    fn node_at(&mut self, pending: &[Exit], kind: NodeKind, span: Span, facts: ExprFacts, ty: Option<TypeTag>, shape: NodeShape) -> NodeId {
        let id = self.add(kind, span, facts, ty, shape);
        self.connect(pending, id);
        id
    }

    fn whole(&self, node: Node<'_>) -> Span {
        self.span(node.start_byte(), node.end_byte())
    }

    fn is_field_name(&self, name: &str) -> bool {
        !self.locals.contains(name) && !self.params.contains(name)
    }

    fn seq(&mut self, stmts: Vec<Node<'_>>, mut pending: Vec<Exit>) -> Vec<Exit> {
        for s in stmts {
            pending = self.stmt(s, pending, None);
        }
        pending
    }

    fn stmt(&mut self, node: Node<'_>, pending: Vec<Exit>, label: Option<String>) -> Vec<Exit> {
        if node.is_extra() {
            return pending;
        }
        // Unreachable statements get no nodes.
        if pending.is_empty() {
            return pending;
        }
        let src = self.src;
        match node.kind() {
            "block" | "constructor_body" => self.seq(named_children(node), pending),
            "labeled_statement" => {
                let children = named_children(node);
                let name = children.first().map(|l| text(*l, src).to_string());
                let Some(inner) = children.last().copied() else {
                    return pending;
                };
                if is_loop(inner.kind()) || inner.kind() == "switch_expression" {
                    self.stmt(inner, pending, name)
                } else {
                    self.jumps.push(JumpCtx { label: name, kind: Jump::Block, breaks: vec![], continues: vec![] });
                    let mut exits = self.stmt(inner, pending, None);
                    let ctx = self.jumps.pop().expect("pushed above");
                    exits.extend(ctx.breaks);
                    exits
                }
            }
            "local_variable_declaration" => {
                let ty = node.child_by_field_name("type").map(|t| TypeTag::from_type_name(text(t, src)));
                let mut facts = ExprFacts::default();
                let mut shape = NodeShape::default();
                let mut cursor = node.walk();
                let declarators: Vec<Node<'_>> = node.children_by_field_name("declarator", &mut cursor).collect();
                for d in &declarators {
                    facts.walk(*d, src);
                    if let Some(n) = d.child_by_field_name("name") {
                        let name = text(n, src).to_string();
                        shape.target.get_or_insert_with(|| name.clone());
                        self.locals.insert(name);
                    }
                }
                shape.concat = has_concat(node, src);
                let id = self.node_at(&pending, NodeKind::VarDecl, self.whole(node), facts, ty, shape);
                vec![(id, Polarity::None)]
            }
            "expression_statement" => self.expression_statement(node, pending),
            "explicit_constructor_invocation" => self.call_node(node, node, pending),
            "return_statement" => {
                let mut facts = ExprFacts::default();
                let mut shape = NodeShape::default();
                if let Some(expr) = named_children(node).into_iter().next() {
                    facts.walk(expr, src);
                    let e = unparen(expr);
                    match e.kind() {
                        "field_access" => {
                            let recv_this = e.child_by_field_name("object").map(|o| o.kind()) == Some("this");
                            if recv_this {
                                shape.field_read = true;
                                shape.target = variable_name(e, src);
                            }
                        }
                        "identifier" => {
                            let name = text(e, src);
                            if self.is_field_name(name) {
                                shape.field_read = true;
                                shape.target = Some(name.to_string());
                            }
                        }
                        _ => {}
                    }
                    shape.concat = has_concat(expr, src);
                }
                let id = self.node_at(&pending, NodeKind::Return, self.whole(node), facts, None, shape);
                self.to_exit.push((id, Polarity::None));
                vec![]
            }
            "throw_statement" => {
                let mut facts = ExprFacts::default();
                for c in named_children(node) {
                    facts.walk(c, src);
                }
                let shape = NodeShape { concat: has_concat(node, src), ..Default::default() };
                let id = self.node_at(&pending, NodeKind::Throw, self.whole(node), facts, None, shape);
                if self.catch_depth == 0 {
                    self.to_exit.push((id, Polarity::Exception));
                }
                vec![]
            }
            "if_statement" => self.if_statement(node, pending),
            "while_statement" => {
                let (Some(cond), Some(body)) = (node.child_by_field_name("condition"), node.child_by_field_name("body")) else {
                    return self.other(node, pending);
                };
                let mut facts = ExprFacts::default();
                facts.walk(cond, src);
                let shape = NodeShape {
                    cond_top_op: top_op(cond, src),
                    null_test: null_test(cond, src),
                    body_len: Some(stmt_count(body)),
                    ..Default::default()
                };
                let span = self.span(node.start_byte(), header_end(node, body));
                let id = self.node_at(&pending, NodeKind::Loop, span, facts, None, shape);
                self.loop_body(id, body, label)
            }
            "for_statement" => {
                let Some(body) = node.child_by_field_name("body") else {
                    return self.other(node, pending);
                };
                let mut facts = ExprFacts::default();
                let mut shape = NodeShape { body_len: Some(stmt_count(body)), ..Default::default() };
                let mut cursor = node.walk();
                let inits: Vec<Node<'_>> = node.children_by_field_name("init", &mut cursor).collect();
                for init in inits {
                    facts.walk(init, src);
                    if init.kind() == "local_variable_declaration" {
                        let mut c2 = init.walk();
                        for d in init.children_by_field_name("declarator", &mut c2) {
                            if let Some(n) = d.child_by_field_name("name") {
                                self.locals.insert(text(n, src).to_string());
                            }
                        }
                    }
                }
                if let Some(cond) = node.child_by_field_name("condition") {
                    facts.walk(cond, src);
                    shape.cond_top_op = top_op(cond, src);
                }
                let mut cursor = node.walk();
                let updates: Vec<Node<'_>> = node.children_by_field_name("update", &mut cursor).collect();
                for u in updates {
                    facts.walk(u, src);
                }
                let span = self.span(node.start_byte(), header_end(node, body));
                let id = self.node_at(&pending, NodeKind::Loop, span, facts, None, shape);
                self.loop_body(id, body, label)
            }
            "enhanced_for_statement" => {
                let Some(body) = node.child_by_field_name("body") else {
                    return self.other(node, pending);
                };
                let mut facts = ExprFacts::default();
                let ty = node.child_by_field_name("type").map(|t| TypeTag::from_type_name(text(t, src)));
                let mut shape = NodeShape { body_len: Some(stmt_count(body)), ..Default::default() };
                if let Some(n) = node.child_by_field_name("name") {
                    let name = text(n, src).to_string();
                    facts.defs.insert(name.clone());
                    self.locals.insert(name.clone());
                    shape.target = Some(name);
                }
                if let Some(v) = node.child_by_field_name("value") {
                    facts.walk(v, src);
                }
                let span = self.span(node.start_byte(), header_end(node, body));
                let id = self.node_at(&pending, NodeKind::Loop, span, facts, ty, shape);
                self.loop_body(id, body, label)
            }
            "do_statement" => self.do_statement(node, pending, label),
            "switch_expression" => self.switch_statement(node, pending, label),
            "try_statement" | "try_with_resources_statement" => self.try_statement(node, pending),
            "synchronized_statement" => {
                let children = named_children(node);
                let Some(body) = node.child_by_field_name("body") else {
                    return self.other(node, pending);
                };
                let mut facts = ExprFacts::default();
                if let Some(lock) = children.iter().find(|c| c.kind() == "parenthesized_expression") {
                    facts.walk(*lock, src);
                }
                let shape = NodeShape { body_len: Some(stmt_count(body)), ..Default::default() };
                let span = self.span(node.start_byte(), header_end(node, body));
                let id = self.node_at(&pending, NodeKind::Sync, span, facts, None, shape);
                self.stmt(body, vec![(id, Polarity::None)], None)
            }
            "break_statement" => {
                let target = named_children(node).into_iter().find(|c| c.kind() == "identifier").map(|l| text(l, src).to_string());
                let id = self.node_at(&pending, NodeKind::Break, self.whole(node), ExprFacts::default(), None, NodeShape::default());
                let ctx = self.jumps.iter_mut().rev().find(|c| match &target {
                    Some(l) => c.label.as_deref() == Some(l.as_str()),
                    None => c.kind != Jump::Block,
                });
                if let Some(ctx) = ctx {
                    ctx.breaks.push((id, Polarity::None));
                }
                vec![]
            }
            "continue_statement" => {
                let target = named_children(node).into_iter().find(|c| c.kind() == "identifier").map(|l| text(l, src).to_string());
                let id = self.node_at(&pending, NodeKind::Continue, self.whole(node), ExprFacts::default(), None, NodeShape::default());
                let ctx = self.jumps.iter_mut().rev().find(|c| {
                    c.kind == Jump::Loop
                        && match &target {
                            Some(l) => c.label.as_deref() == Some(l.as_str()),
                            None => true,
                        }
                });
                if let Some(ctx) = ctx {
                    ctx.continues.push((id, Polarity::None));
                }
                vec![]
            }
            _ => self.other(node, pending),
        }
    }

    /// Opaque statement. Declarations (local classes, records ...) contribute
    /// no facts; anything else has its expressions scanned.
    fn other(&mut self, node: Node<'_>, pending: Vec<Exit>) -> Vec<Exit> {
        let mut facts = ExprFacts::default();
        if !node.kind().ends_with("_declaration") {
            for c in named_children(node) {
                facts.walk(c, self.src);
            }
        }
        let id = self.node_at(&pending, NodeKind::Other, self.whole(node), facts, None, NodeShape::default());
        vec![(id, Polarity::None)]
    }

    fn expression_statement(&mut self, node: Node<'_>, pending: Vec<Exit>) -> Vec<Exit> {
        let src = self.src;
        let Some(expr) = named_children(node).into_iter().next() else {
            return self.other(node, pending);
        };
        match expr.kind() {
            "assignment_expression" | "update_expression" => {
                let mut facts = ExprFacts::default();
                facts.walk(expr, src);
                let target = if expr.kind() == "assignment_expression" {
                    expr.child_by_field_name("left")
                } else {
                    named_children(expr).into_iter().next()
                };
                let mut shape = NodeShape::default();
                if let Some(t) = target.map(unparen) {
                    match t.kind() {
                        "identifier" => {
                            let name = text(t, src);
                            shape.target_is_field = self.is_field_name(name);
                            shape.target = Some(name.to_string());
                        }
                        "field_access" => {
                            shape.target_is_field = true;
                            shape.target = variable_name(t, src);
                        }
                        "array_access" => {
                            shape.target = t.child_by_field_name("array").and_then(|a| variable_name(a, src));
                        }
                        _ => {}
                    }
                }
                let kind = if expr.kind() == "assignment_expression" {
                    if let Some(right) = expr.child_by_field_name("right").map(unparen) {
                        shape.param_value = right.kind() == "identifier" && self.params.contains(text(right, src));
                    }
                    NodeKind::Assign
                } else {
                    NodeKind::UnaryUpdate
                };
                shape.concat = has_concat(expr, src);
                let id = self.node_at(&pending, kind, self.whole(node), facts, None, shape);
                vec![(id, Polarity::None)]
            }
            "method_invocation" => self.call_node(node, expr, pending),
            _ => self.other(node, pending),
        }
    }

    fn call_node(&mut self, stmt: Node<'_>, call: Node<'_>, pending: Vec<Exit>) -> Vec<Exit> {
        let src = self.src;
        let mut facts = ExprFacts::default();
        facts.walk(call, src);
        // The statement-level call is the node kind itself.
        if facts.ops.first() == Some(&OpTag::Call) {
            facts.ops.remove(0);
        }
        let mut shape = NodeShape {
            arity: call.child_by_field_name("arguments").map(|a| named_children(a).len()),
            concat: has_concat(call, src),
            ..Default::default()
        };
        if let Some(obj) = call.child_by_field_name("object").map(unparen) {
            shape.target = match obj.kind() {
                "identifier" => Some(text(obj, src).to_string()),
                "this" => Some("this".to_string()),
                _ => None,
            };
        }
        let id = self.node_at(&pending, NodeKind::MethodCall, self.whole(stmt), facts, None, shape);
        vec![(id, Polarity::None)]
    }

    fn if_statement(&mut self, node: Node<'_>, pending: Vec<Exit>) -> Vec<Exit> {
        let src = self.src;
        let (Some(cond), Some(then)) = (node.child_by_field_name("condition"), node.child_by_field_name("consequence")) else {
            return self.other(node, pending);
        };
        let alternative = node.child_by_field_name("alternative");
        let mut facts = ExprFacts::default();
        facts.walk(cond, src);
        let shape = NodeShape {
            cond_top_op: top_op(cond, src),
            null_test: null_test(cond, src),
            concat: has_concat(cond, src),
            body_len: Some(stmt_count(then)),
            else_len: alternative.map(stmt_count),
            ..Default::default()
        };
        let span = self.span(node.start_byte(), cond.end_byte());
        let id = self.node_at(&pending, NodeKind::If, span, facts, None, shape);
        let mut exits = self.stmt(then, vec![(id, Polarity::TrueBranch)], None);
        match alternative {
            Some(alt) => exits.extend(self.stmt(alt, vec![(id, Polarity::FalseBranch)], None)),
            None => exits.push((id, Polarity::FalseBranch)),
        }
        exits
    }

    fn loop_body(&mut self, id: NodeId, body: Node<'_>, label: Option<String>) -> Vec<Exit> {
        self.jumps.push(JumpCtx { label, kind: Jump::Loop, breaks: vec![], continues: vec![] });
        let mut back = self.stmt(body, vec![(id, Polarity::TrueBranch)], None);
        let ctx = self.jumps.pop().expect("pushed above");
        back.extend(ctx.continues);
        // An empty body would otherwise become a self-loop.
        back.retain(|&(src, _)| src != id);
        self.connect(&back, id);
        let mut exits = vec![(id, Polarity::FalseBranch)];
        exits.extend(ctx.breaks);
        exits
    }

    fn do_statement(&mut self, node: Node<'_>, pending: Vec<Exit>, label: Option<String>) -> Vec<Exit> {
        let src = self.src;
        let (Some(body), Some(cond)) = (node.child_by_field_name("body"), node.child_by_field_name("condition")) else {
            return self.other(node, pending);
        };
        let first = self.nodes.len();
        self.jumps.push(JumpCtx { label, kind: Jump::Loop, breaks: vec![], continues: vec![] });
        let mut back = self.stmt(body, pending, None);
        let ctx = self.jumps.pop().expect("pushed above");
        back.extend(ctx.continues);
        let mut facts = ExprFacts::default();
        facts.walk(cond, src);
        let shape = NodeShape {
            cond_top_op: top_op(cond, src),
            null_test: null_test(cond, src),
            body_len: Some(stmt_count(body)),
            ..Default::default()
        };
        let mut cursor = node.walk();
        let while_kw = node.children(&mut cursor).find(|c| c.kind() == "while").map(|c| c.start_byte()).unwrap_or(cond.start_byte());
        let span = self.span(while_kw, cond.end_byte());
        let id = self.node_at(&back, NodeKind::Loop, span, facts, None, shape);
        if first < id {
            self.edge(id, first, Polarity::TrueBranch);
        }
        let mut exits = vec![(id, Polarity::FalseBranch)];
        exits.extend(ctx.breaks);
        exits
    }

    fn switch_statement(&mut self, node: Node<'_>, pending: Vec<Exit>, label: Option<String>) -> Vec<Exit> {
        let src = self.src;
        let (Some(cond), Some(block)) = (node.child_by_field_name("condition"), node.child_by_field_name("body")) else {
            return self.other(node, pending);
        };
        let mut facts = ExprFacts::default();
        facts.walk(cond, src);
        let span = self.span(node.start_byte(), cond.end_byte());
        let id = self.node_at(&pending, NodeKind::Switch, span, facts, None, NodeShape::default());
        self.jumps.push(JumpCtx { label, kind: Jump::Switch, breaks: vec![], continues: vec![] });
        let mut after = Vec::new();
        let mut fallthrough: Vec<Exit> = Vec::new();
        let mut has_default = false;
        for group in named_children(block) {
            let (labels, stmts): (Vec<Node<'_>>, Vec<Node<'_>>) =
                named_children(group).into_iter().partition(|c| c.kind() == "switch_label");
            has_default |= labels.iter().any(|l| text(*l, src).split_whitespace().any(|w| w.trim_end_matches([':', ',']) == "default"));
            let mut entry = vec![(id, Polarity::None)];
            match group.kind() {
                "switch_block_statement_group" => {
                    entry.append(&mut fallthrough);
                    fallthrough = self.seq(stmts, entry);
                }
                "switch_rule" => {
                    if let Some(body) = stmts.last().copied() {
                        after.extend(self.stmt(body, entry, None));
                    }
                }
                _ => {}
            }
        }
        after.extend(fallthrough);
        if !has_default {
            after.push((id, Polarity::None));
        }
        let ctx = self.jumps.pop().expect("pushed above");
        after.extend(ctx.breaks);
        after
    }

    fn try_statement(&mut self, node: Node<'_>, pending: Vec<Exit>) -> Vec<Exit> {
        let src = self.src;
        let Some(body) = node.child_by_field_name("body") else {
            return self.other(node, pending);
        };
        let mut facts = ExprFacts::default();
        let mut header = node.start_byte() + "try".len();
        if let Some(res) = node.child_by_field_name("resources") {
            header = res.end_byte();
            for r in named_children(res) {
                if r.kind() == "resource" {
                    if let Some(n) = r.child_by_field_name("name") {
                        let name = text(n, src).to_string();
                        facts.defs.insert(name.clone());
                        self.locals.insert(name);
                    }
                    if let Some(v) = r.child_by_field_name("value") {
                        facts.walk(v, src);
                    }
                    if r.child_by_field_name("name").is_none() {
                        facts.walk(r, src);
                    }
                }
            }
        }
        let children = named_children(node);
        let catches: Vec<Node<'_>> = children.iter().copied().filter(|c| c.kind() == "catch_clause").collect();
        let finally = children.iter().copied().find(|c| c.kind() == "finally_clause");
        let shape = NodeShape { body_len: Some(stmt_count(body)), ..Default::default() };
        let id = self.node_at(&pending, NodeKind::Try, self.span(node.start_byte(), header), facts, None, shape);

        if !catches.is_empty() {
            self.catch_depth += 1;
        }
        let mut exits = self.stmt(body, vec![(id, Polarity::None)], None);
        if !catches.is_empty() {
            self.catch_depth -= 1;
        }

        for c in catches {
            let mut facts = ExprFacts::default();
            let mut shape = NodeShape::default();
            let mut ty = None;
            if let Some(param) = named_children(c).into_iter().find(|p| p.kind() == "catch_formal_parameter") {
                if let Some(n) = param.child_by_field_name("name") {
                    let name = text(n, src).to_string();
                    facts.defs.insert(name.clone());
                    self.locals.insert(name.clone());
                    shape.target = Some(name);
                }
                if let Some(types) = named_children(param).into_iter().find(|p| p.kind() == "catch_type") {
                    let tags: Vec<TypeTag> = named_children(types).into_iter().map(|t| TypeTag::from_type_name(text(t, src))).collect();
                    ty = match tags.split_first() {
                        Some((first, rest)) if rest.iter().all(|t| t == first) => Some(*first),
                        Some(_) => Some(TypeTag::Object),
                        None => None,
                    };
                }
            }
            let cbody = c.child_by_field_name("body");
            shape.body_len = cbody.map(stmt_count);
            let end = cbody.map(|b| header_end(c, b)).unwrap_or(c.end_byte());
            let cid = self.add(NodeKind::Catch, self.span(c.start_byte(), end), facts, ty, shape);
            self.edge(id, cid, Polarity::Exception);
            match cbody {
                Some(b) => exits.extend(self.stmt(b, vec![(cid, Polarity::None)], None)),
                None => exits.push((cid, Polarity::None)),
            }
        }

        if let Some(f) = finally {
            let block = named_children(f).into_iter().find(|b| b.kind() == "block");
            let shape = NodeShape { body_len: block.map(stmt_count), ..Default::default() };
            let span = self.span(f.start_byte(), f.start_byte() + "finally".len());
            let fid = self.add(NodeKind::Finally, span, ExprFacts::default(), None, shape);
            self.connect(&exits, fid);
            self.edge(id, fid, Polarity::Exception);
            exits = match block {
                Some(b) => self.stmt(b, vec![(fid, Polarity::None)], None),
                None => vec![(fid, Polarity::None)],
            };
        }
        exits
    }
}
