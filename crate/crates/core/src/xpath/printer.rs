//! Canonical concrete syntax for [`Expr`].

use alloc::string::String;
use core::fmt::Write;

use super::ast::{Axis, Expr, FnName, Literal, NodeTest, Step};

const CMP: u8 = 0;
const UNION: u8 = 1;
const PATH: u8 = 2;

pub fn pretty_print(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, CMP, &mut out);
    out
}

impl core::fmt::Display for Expr {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&pretty_print(self))
    }
}

fn write_expr(e: &Expr, level: u8, out: &mut String) {
    match e {
        Expr::Comparison(op, a, b) => {
            let paren = level > CMP;
            if paren {
                out.push('(');
            }
            write_expr(a, CMP, out);
            out.push_str(op.symbol());
            write_expr(b, UNION, out);
            if paren {
                out.push(')');
            }
        }
        Expr::Union(a, b) => {
            let paren = level > UNION;
            if paren {
                out.push('(');
            }
            write_expr(a, UNION, out);
            out.push('|');
            write_expr(b, PATH, out);
            if paren {
                out.push(')');
            }
        }
        _ => write_path(e, out),
    }
}

fn is_abbreviable_dos(e: &Expr) -> bool {
    matches!(e, Expr::Step(s) if s.axis == Axis::DescendantOrSelf && s.test == NodeTest::AnyNode && s.predicates.is_empty())
}

fn write_path(e: &Expr, out: &mut String) {
    let items = e.path_items();
    let mut i = 0;
    // whether the next item is written without a leading '/'
    let mut glued = true;
    if matches!(items[0], Expr::Root) {
        out.push('/');
        i = 1;
    } else {
        write_head(items[0], items.len() == 1, out);
        i += 1;
        glued = false;
    }
    while i < items.len() {
        let item = items[i];
        if !glued {
            out.push('/');
        }
        glued = false;
        if is_abbreviable_dos(item) && i + 1 < items.len() {
            out.push('/');
            glued = true;
        } else {
            match item {
                Expr::Step(s) => write_step(s, false, out),
                other => {
                    out.push('(');
                    write_expr(other, CMP, out);
                    out.push(')');
                }
            }
        }
        i += 1;
    }
}

fn write_head(item: &Expr, alone: bool, out: &mut String) {
    match item {
        Expr::Step(s) => write_step(s, alone, out),
        Expr::FnCall(FnName::Text, args) if args.is_empty() && !alone => out.push_str("(text())"),
        Expr::FnCall(..) | Expr::VarRef(_) | Expr::Literal(_) => write_primary(item, out),
        other => {
            out.push('(');
            write_expr(other, CMP, out);
            out.push(')');
        }
    }
}

fn write_primary(e: &Expr, out: &mut String) {
    match e {
        Expr::Literal(Literal::Str(s)) => {
            let q = if s.contains('\'') { '"' } else { '\'' };
            out.push(q);
            out.push_str(s);
            out.push(q);
        }
        Expr::Literal(Literal::Num(n)) => write_number(*n, out),
        Expr::VarRef(name) => {
            out.push('$');
            out.push_str(name);
        }
        Expr::FnCall(name, args) => {
            out.push_str(name.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(a, CMP, out);
            }
            out.push(')');
        }
        other => write_expr(other, CMP, out),
    }
}

fn write_number(n: f64, out: &mut String) {
    if (-1e15..=1e15).contains(&n) && n == (n as i64) as f64 {
        let _ = write!(out, "{}", n as i64);
    } else {
        let _ = write!(out, "{n}");
    }
}

fn write_test(test: &NodeTest, out: &mut String) {
    match test {
        NodeTest::AnyElement => out.push('*'),
        NodeTest::Name(n) => out.push_str(n),
        NodeTest::Text => out.push_str("text()"),
        NodeTest::AnyNode => out.push_str("node()"),
    }
}

/// `alone` marks a step that is an entire relative path by itself, where a
/// bare `text()` would read back as the string function.
fn write_step(s: &Step, alone: bool, out: &mut String) {
    match (s.axis, &s.test) {
        (Axis::SelfAxis, NodeTest::AnyNode) if s.predicates.is_empty() => out.push('.'),
        (Axis::Parent, NodeTest::AnyNode) if s.predicates.is_empty() => out.push_str(".."),
        (Axis::Attribute, t) => {
            out.push('@');
            write_test(t, out);
        }
        (Axis::Child, NodeTest::Text) if alone && s.predicates.is_empty() => out.push_str("child::text()"),
        (Axis::Child, t) => write_test(t, out),
        (axis, t) => {
            out.push_str(axis.name());
            out.push_str("::");
            write_test(t, out);
        }
    }
    for p in &s.predicates {
        out.push('[');
        write_expr(p, CMP, out);
        out.push(']');
    }
}
