//! Canonical concrete syntax. Output always re-parses to the same AST.

use super::ast::*;

pub fn render_program(p: &Program) -> String {
    render_block(&p.behaviours)
}

fn render_block(bs: &[Behaviour]) -> String {
    if bs.is_empty() {
        "{ }".to_string()
    } else {
        let parts: Vec<String> = bs.iter().map(render_behaviour).collect();
        format!("{{ {} }}", parts.join(", "))
    }
}

pub fn render_behaviour(b: &Behaviour) -> String {
    match b {
        Behaviour::Dependence(d) => render_dependence(d),
        Behaviour::Compartment { name, body } => format!("{name} {}", render_block(body)),
        Behaviour::Context { contexts, body } => {
            format!("[{}] {}", join(contexts.iter()), render_block(body))
        }
        Behaviour::Observation { label, states } => {
            format!("{label} :: {}", render_states(states))
        }
        Behaviour::AttrDecl { agents, relations } => {
            let rels: Vec<String> = relations.iter().map(render_attr_rel).collect();
            format!("{}: {{{}}}", join(agents.iter()), rels.join(", "))
        }
    }
}

pub fn render_dependence(d: &Dependence) -> String {
    format!(
        "{} {} {}",
        render_states(&d.cause),
        d.kind.arrow(),
        render_states(&d.effect)
    )
}

pub fn render_attr_rel(r: &AttrRel) -> String {
    match r {
        AttrRel::Prec(a, b) => format!("{a} < {b}"),
        AttrRel::Napprox(a, b) => format!("{a} >< {b}"),
        AttrRel::Bare(a) => a.to_string(),
    }
}

pub fn render_states(s: &StateCollection) -> String {
    let parts: Vec<String> = s.states().iter().map(render_state).collect();
    parts.join(" + ")
}

pub fn render_state(s: &AgentState) -> String {
    let mut out = String::new();
    for c in &s.path {
        out.push_str(c.as_str());
        out.push('.');
    }
    match (&s.attribute, s.polarity) {
        (None, Polarity::Positive) => out.push_str(s.agent.as_str()),
        (None, Polarity::Negative) => {
            out.push('~');
            out.push_str(s.agent.as_str());
        }
        (Some(a), Polarity::Positive) => out.push_str(&format!("{}({a})", s.agent)),
        (Some(a), Polarity::Negative) => out.push_str(&format!("{}(~{a})", s.agent)),
    }
    out
}

fn join<'a>(ids: impl Iterator<Item = &'a Ident>) -> String {
    ids.map(Ident::as_str).collect::<Vec<_>>().join(", ")
}
