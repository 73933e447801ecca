//! Indented syntax-tree listing for `gubsc parse`.

use std::fmt::Write;

use gubs::syntax::{render_attr_rel, render_states, Behaviour, Program};

pub fn tree(p: &Program) -> String {
    let mut out = String::from("program\n");
    for b in &p.behaviours {
        behaviour(b, 1, &mut out);
    }
    out
}

fn behaviour(b: &Behaviour, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match b {
        Behaviour::Dependence(d) => {
            let _ = writeln!(
                out,
                "{pad}dependence {:?} {} {} {}",
                d.kind,
                render_states(&d.cause),
                d.kind.arrow(),
                render_states(&d.effect)
            );
        }
        Behaviour::Compartment { name, body } => {
            let _ = writeln!(out, "{pad}compartment {name}");
            for b in body {
                behaviour(b, depth + 1, out);
            }
        }
        Behaviour::Context { contexts, body } => {
            let ks: Vec<&str> = contexts.iter().map(|k| k.as_str()).collect();
            let _ = writeln!(out, "{pad}context [{}]", ks.join(", "));
            for b in body {
                behaviour(b, depth + 1, out);
            }
        }
        Behaviour::Observation { label, states } => {
            let _ = writeln!(out, "{pad}observation {label} :: {}", render_states(states));
        }
        Behaviour::AttrDecl { agents, relations } => {
            let ags: Vec<&str> = agents.iter().map(|a| a.as_str()).collect();
            let rels: Vec<String> = relations.iter().map(render_attr_rel).collect();
            let _ = writeln!(out, "{pad}attributes {} {{{}}}", ags.join(", "), rels.join(", "));
        }
    }
}
