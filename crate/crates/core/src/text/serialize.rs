use std::fmt::Write;

use crate::model::{Degree, KnowledgeBase, RoleKind};

fn degree_suffix(d: Degree) -> String {
    if d.is_one() {
        String::new()
    } else {
        format!(" @ {d}")
    }
}

/// Renders `kb` in the textual format. Output is deterministic: role and
/// concept declarations, then the TBox, then the ABox, each in canonical
/// order. Degree-1 statements omit the `@` suffix.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut sections: Vec<Vec<String>> = Vec::new();

    let decls: Vec<String> = kb
        .roles()
        .map(|(name, kind)| match kind {
            RoleKind::Abstract { closed: false } => format!("role {name} : abstract;"),
            RoleKind::Abstract { closed: true } => format!("role {name} : abstract closed;"),
            RoleKind::Concrete { unit } => format!("role {name} : concrete({unit});"),
        })
        .chain(kb.concepts().iter().map(|c| format!("concept {c};")))
        .collect();
    sections.push(decls);

    sections.push(
        kb.tbox()
            .map(|g| {
                format!(
                    "axiom {} SUBSUMED-BY {}{};",
                    g.lhs,
                    g.rhs,
                    degree_suffix(g.degree)
                )
            })
            .collect(),
    );

    let mut abox: Vec<String> = kb
        .assertions()
        .map(|a| {
            format!(
                "assert {} : {}{};",
                a.individual,
                a.concept,
                degree_suffix(a.degree)
            )
        })
        .collect();
    abox.extend(
        kb.role_assertions()
            .map(|r| format!("assert ({}, {}) : {};", r.subject, r.object, r.role)),
    );
    abox.extend(
        kb.concrete_facts()
            .map(|(ind, role, q)| format!("assert ({ind}, {q}) : {role};")),
    );
    sections.push(abox);

    let mut out = String::new();
    for section in sections.iter().filter(|s| !s.is_empty()) {
        if !out.is_empty() {
            out.push('\n');
        }
        for line in section {
            let _ = writeln!(out, "{line}");
        }
    }
    if out.is_empty() {
        out.push('\n');
    }
    out
}
