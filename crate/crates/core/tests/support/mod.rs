//! Shared test helpers: fixture loading, a naive fixpoint oracle, and a
//! seeded generator of small random knowledge bases.
#![allow(dead_code)]

pub mod checks;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::str::FromStr;

use fdlb::decision::UtilityBox;
use fdlb::model::{FuzzyGci, RoleKind};
use fdlb::text::{parse_kb, parse_ubox};
use fdlb::{Comparator, ConceptExpr, ConcretePredicate, Degree, KnowledgeBase, Quantity};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture_kb(name: &str) -> KnowledgeBase {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_kb(&text).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

pub fn fixture_ubox(name: &str) -> UtilityBox {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_ubox(&text).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

pub fn dec(s: &str) -> Decimal {
    Decimal::from_str(s).unwrap()
}

pub fn deg(s: &str) -> Degree {
    Degree::parse(s).unwrap()
}

// ---------------------------------------------------------------------------
// Oracle

/// Result of the naive fixpoint: the bounds of every closure cell, computed
/// without clamping, so an inconsistent knowledge base shows up as some
/// `lo > hi`.
pub struct OracleResult {
    pub consistent: bool,
    pub cells: BTreeMap<(String, ConceptExpr), (Degree, Degree)>,
}

fn close(set: &mut BTreeSet<ConceptExpr>, e: &ConceptExpr) {
    if !set.insert(e.clone()) {
        return;
    }
    for sub in e.subexpressions().into_iter().skip(1) {
        close(set, sub);
    }
    close(set, &e.dual());
}

/// Recomputes every rule over every cell until nothing changes.
pub fn oracle(kb: &KnowledgeBase) -> OracleResult {
    let mut closure = BTreeSet::new();
    close(&mut closure, &ConceptExpr::Top);
    for a in kb.concepts() {
        close(&mut closure, &ConceptExpr::atom(a.clone()));
    }
    for g in kb.tbox() {
        close(&mut closure, &g.lhs.normalize());
        close(&mut closure, &g.rhs.normalize());
    }
    for a in kb.assertions() {
        close(&mut closure, &a.concept.normalize());
    }
    let inds: Vec<String> = kb.individuals().iter().cloned().collect();
    let closed: BTreeSet<&str> = kb
        .roles()
        .filter(|(_, k)| matches!(k, RoleKind::Abstract { closed: true }))
        .map(|(r, _)| r)
        .collect();
    let fillers = |a: &str, r: &str| -> Vec<String> {
        kb.role_assertions()
            .filter(|ra| ra.subject == a && ra.role == r)
            .map(|ra| ra.object.clone())
            .collect()
    };

    let mut lo: BTreeMap<(String, ConceptExpr), Degree> = BTreeMap::new();
    let mut hi: BTreeMap<(String, ConceptExpr), Degree> = BTreeMap::new();
    for i in &inds {
        for e in &closure {
            lo.insert((i.clone(), e.clone()), Degree::ZERO);
            hi.insert((i.clone(), e.clone()), Degree::ONE);
        }
    }
    let key = |i: &str, e: &ConceptExpr| (i.to_string(), e.clone());

    loop {
        let mut up: Vec<((String, ConceptExpr), Degree)> = Vec::new();
        let mut down: Vec<((String, ConceptExpr), Degree)> = Vec::new();
        let l = |i: &str, e: &ConceptExpr| lo[&key(i, e)];
        let h = |i: &str, e: &ConceptExpr| hi[&key(i, e)];

        for a in kb.assertions() {
            up.push((key(&a.individual, &a.concept.normalize()), a.degree));
        }
        for g in kb.tbox() {
            let (c, d, t) = (g.lhs.normalize(), g.rhs.normalize(), g.degree);
            for i in &inds {
                if l(i, &c) > t.complement() {
                    up.push((key(i, &d), t));
                }
                if l(i, &d.dual()) > t.complement() {
                    up.push((key(i, &c.dual()), t));
                }
            }
        }
        for i in &inds {
            for e in &closure {
                let k = key(i, e);
                let n = e.dual();
                up.push((k.clone(), h(i, &n).complement()));
                down.push((k.clone(), l(i, &n).complement()));
                match e {
                    ConceptExpr::Top => up.push((k, Degree::ONE)),
                    ConceptExpr::Bottom => down.push((k, Degree::ZERO)),
                    ConceptExpr::And(x, y) => {
                        up.push((k.clone(), l(i, x).min(l(i, y))));
                        down.push((k.clone(), h(i, x).min(h(i, y))));
                        up.push((key(i, x), l(i, e)));
                        up.push((key(i, y), l(i, e)));
                        if l(i, y) > h(i, e) {
                            down.push((key(i, x), h(i, e)));
                        }
                        if l(i, x) > h(i, e) {
                            down.push((key(i, y), h(i, e)));
                        }
                    }
                    ConceptExpr::Or(x, y) => {
                        up.push((k.clone(), l(i, x).max(l(i, y))));
                        down.push((k.clone(), h(i, x).max(h(i, y))));
                        down.push((key(i, x), h(i, e)));
                        down.push((key(i, y), h(i, e)));
                        if h(i, y) < l(i, e) {
                            up.push((key(i, x), l(i, e)));
                        }
                        if h(i, x) < l(i, e) {
                            up.push((key(i, y), l(i, e)));
                        }
                    }
                    ConceptExpr::Restriction(r, p) => {
                        if let Some(v) = kb.concrete_value(i, r) {
                            let d = p.degree(v).unwrap();
                            up.push((k.clone(), d));
                            down.push((k, d));
                        }
                    }
                    ConceptExpr::Exists(r, c) => {
                        let fs = fillers(i, r);
                        for b in &fs {
                            up.push((k.clone(), l(b, c)));
                            down.push((key(b, c), h(i, e)));
                        }
                        if closed.contains(r.as_str()) {
                            let max = fs.iter().map(|b| h(b, c)).max().unwrap_or(Degree::ZERO);
                            down.push((k.clone(), max));
                            for b in &fs {
                                if fs.iter().filter(|o| *o != b).all(|o| h(o, c) < l(i, e)) {
                                    up.push((key(b, c), l(i, e)));
                                }
                            }
                        }
                    }
                    ConceptExpr::Forall(r, c) => {
                        let fs = fillers(i, r);
                        for b in &fs {
                            down.push((k.clone(), h(b, c)));
                            up.push((key(b, c), l(i, e)));
                        }
                        if closed.contains(r.as_str()) {
                            let min = fs.iter().map(|b| l(b, c)).min().unwrap_or(Degree::ONE);
                            up.push((k.clone(), min));
                            for b in &fs {
                                if fs.iter().filter(|o| *o != b).all(|o| l(o, c) > h(i, e)) {
                                    down.push((key(b, c), h(i, e)));
                                }
                            }
                        }
                    }
                    ConceptExpr::Atom(_) | ConceptExpr::Not(_) => {}
                }
            }
        }

        let mut changed = false;
        for (k, v) in up {
            let cur = lo.get_mut(&k).expect("closure cell");
            if v > *cur {
                *cur = v;
                changed = true;
            }
        }
        for (k, v) in down {
            let cur = hi.get_mut(&k).expect("closure cell");
            if v < *cur {
                *cur = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let consistent = lo.iter().all(|(k, l)| *l <= hi[k]);
    let cells = lo.into_iter().map(|(k, l)| {
        let h = hi[&k];
        (k, (l, h))
    });
    OracleResult {
        consistent,
        cells: cells.collect(),
    }
}

/// Every degree obtainable from `seeds`, 0 and 1 under `min`, `max` and
/// `1 - x`. Sets of degrees are closed under `min` and `max`, so only
/// complements add members.
pub fn degree_closure(seeds: &BTreeSet<Degree>) -> BTreeSet<Degree> {
    let mut out: BTreeSet<Degree> = [Degree::ZERO, Degree::ONE].into();
    for &d in seeds {
        out.insert(d);
        out.insert(d.complement());
    }
    out
}

// ---------------------------------------------------------------------------
// Random knowledge bases

pub const ATOMS: [&str; 4] = ["A", "B", "C", "D"];
const DEGREES: [&str; 9] = ["0", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "1"];

pub struct KbShape {
    pub max_individuals: usize,
    pub max_axioms: usize,
    pub crisp: bool,
}

impl Default for KbShape {
    fn default() -> Self {
        KbShape {
            max_individuals: 8,
            max_axioms: 12,
            crisp: false,
        }
    }
}

fn random_degree(rng: &mut ChaCha8Rng, crisp: bool, allow_zero: bool) -> Degree {
    if crisp {
        return Degree::ONE;
    }
    let pool = if allow_zero { &DEGREES[..] } else { &DEGREES[1..] };
    deg(pool.choose(rng).unwrap())
}

pub fn random_concept(rng: &mut ChaCha8Rng, depth: u32) -> ConceptExpr {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        return match rng.gen_range(0..20) {
            0 | 1 => ConceptExpr::Top,
            2 => ConceptExpr::Bottom,
            3..=6 => {
                let cmp = *[Comparator::Gt, Comparator::Ge, Comparator::Lt, Comparator::Le]
                    .choose(rng)
                    .unwrap();
                let t = *[300i64, 500, 900].choose(rng).unwrap();
                ConceptExpr::restriction(
                    "w",
                    ConcretePredicate::new(cmp, Quantity::new(Decimal::from(t), "g")),
                )
            }
            _ => ConceptExpr::atom(*ATOMS.choose(rng).unwrap()),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_concept(rng, depth - 1);
    match rng.gen_range(0..6) {
        0 => ConceptExpr::not(sub(rng)),
        1 => ConceptExpr::and(sub(rng), sub(rng)),
        2 => ConceptExpr::or(sub(rng), sub(rng)),
        3 => ConceptExpr::exists(*["r", "s"].choose(rng).unwrap(), sub(rng)),
        _ => ConceptExpr::forall(*["r", "s"].choose(rng).unwrap(), sub(rng)),
    }
}

/// Concepts for assertions: mostly literals, so that fewer random
/// knowledge bases clash outright.
fn random_assertion_concept(rng: &mut ChaCha8Rng) -> ConceptExpr {
    let atom = |rng: &mut ChaCha8Rng| ConceptExpr::atom(*ATOMS.choose(rng).unwrap());
    match rng.gen_range(0..8) {
        0..=2 => atom(rng),
        3 => ConceptExpr::not(atom(rng)),
        4 => ConceptExpr::exists("r", atom(rng)),
        5 => ConceptExpr::forall(*["r", "s"].choose(rng).unwrap(), atom(rng)),
        _ => random_concept(rng, 1),
    }
}

/// A knowledge base with roles `r` (open), `s` (closed) and `w` (grams),
/// atoms `A`..`D`, and individuals `i0`.. .
pub fn random_kb(seed: u64, shape: &KbShape) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kb = KnowledgeBase::new();
    kb.declare_role("r", RoleKind::Abstract { closed: false }).unwrap();
    kb.declare_role("s", RoleKind::Abstract { closed: true }).unwrap();
    kb.declare_role("w", RoleKind::Concrete { unit: "g".into() }).unwrap();
    for a in ATOMS {
        kb.declare_concept(a);
    }
    let n = rng.gen_range(1..=shape.max_individuals);
    let inds: Vec<String> = (0..n).map(|i| format!("i{i}")).collect();

    for _ in 0..rng.gen_range(0..=shape.max_axioms) {
        let lhs = random_concept(&mut rng, 2);
        let rhs = random_concept(&mut rng, 1);
        let d = random_degree(&mut rng, shape.crisp, true);
        kb.add_gci(FuzzyGci::new(lhs, rhs, d)).unwrap();
    }
    for i in &inds {
        for _ in 0..rng.gen_range(0..3) {
            let c = random_assertion_concept(&mut rng);
            if shape.crisp && rng.gen_bool(0.5) {
                continue;
            }
            let d = if !shape.crisp && rng.gen_bool(0.5) {
                random_degree(&mut rng, shape.crisp, false).min(deg("0.5"))
            } else {
                random_degree(&mut rng, shape.crisp, false)
            };
            kb.assert_concept(i.clone(), c, d).unwrap();
        }
        if rng.gen_bool(0.5) {
            let v = *[100i64, 300, 500, 700, 900, 1100].choose(&mut rng).unwrap();
            kb.assert_value(i.clone(), Quantity::new(Decimal::from(v), "g"), "w")
                .unwrap();
        }
        // Registers the individual even if nothing else mentions it.
        kb.assert_concept(i.clone(), ConceptExpr::Top, Degree::ONE).unwrap();
    }
    for _ in 0..rng.gen_range(0..=n + 2) {
        let a = inds.choose(&mut rng).unwrap().clone();
        let b = inds.choose(&mut rng).unwrap().clone();
        let role = *["r", "s"].choose(&mut rng).unwrap();
        kb.assert_role(a, b, role).unwrap();
    }
    kb
}

/// A utility box over a random subset of the atoms.
pub fn random_ubox(seed: u64, id: &str) -> UtilityBox {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut u = UtilityBox::new(id);
    for a in ATOMS {
        if rng.gen_bool(0.7) {
            u.insert(a, Decimal::from(rng.gen_range(0..=100))).unwrap();
        }
    }
    u
}

// ---------------------------------------------------------------------------
// Renaming

/// Applies `f` to every atom and individual name of `kb`. With a
/// bijective `f` the result is the same knowledge base up to names, but its
/// statements sort differently, so saturation visits them in another order.
pub fn rename(kb: &KnowledgeBase, f: &dyn Fn(&str) -> String) -> KnowledgeBase {
    let mut out = KnowledgeBase::new();
    for (r, k) in kb.roles() {
        out.declare_role(r, k.clone()).unwrap();
    }
    for c in kb.concepts() {
        out.declare_concept(f(c));
    }
    for g in kb.tbox() {
        let gci = FuzzyGci {
            lhs: rename_concept(&g.lhs, f),
            rhs: rename_concept(&g.rhs, f),
            degree: g.degree,
        };
        out.add_gci(gci).unwrap();
    }
    for a in kb.assertions() {
        out.assert_concept(f(&a.individual), rename_concept(&a.concept, f), a.degree)
            .unwrap();
    }
    for ra in kb.role_assertions() {
        out.assert_role(f(&ra.subject), f(&ra.object), ra.role.clone()).unwrap();
    }
    for (i, r, q) in kb.concrete_facts() {
        out.assert_value(f(i), q.clone(), r).unwrap();
    }
    out
}

pub fn rename_concept(c: &ConceptExpr, f: &dyn Fn(&str) -> String) -> ConceptExpr {
    use ConceptExpr::*;
    match c {
        Top => Top,
        Bottom => Bottom,
        Atom(a) => Atom(f(a)),
        Not(x) => ConceptExpr::not(rename_concept(x, f)),
        And(x, y) => ConceptExpr::and(rename_concept(x, f), rename_concept(y, f)),
        Or(x, y) => ConceptExpr::or(rename_concept(x, f), rename_concept(y, f)),
        Exists(r, x) => ConceptExpr::exists(r.clone(), rename_concept(x, f)),
        Forall(r, x) => ConceptExpr::forall(r.clone(), rename_concept(x, f)),
        Restriction(r, p) => Restriction(r.clone(), p.clone()),
    }
}

/// A name permutation that reverses the sort order of atoms and individuals.
pub fn reversing(name: &str) -> String {
    if let Some(i) = name.strip_prefix('i') {
        if let Ok(n) = i.parse::<u32>() {
            return format!("i{}", 99 - n);
        }
    }
    match name {
        "A" => "Z".into(),
        "B" => "Y".into(),
        "C" => "X".into(),
        "D" => "W".into(),
        "Z" => "A".into(),
        "Y" => "B".into(),
        "X" => "C".into(),
        "W" => "D".into(),
        other => other.into(),
    }
}

/// Shuffles the statement lines of a serialized knowledge base; declarations
/// stay first.
pub fn shuffle_statements(text: &str, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut decls, mut rest): (Vec<&str>, Vec<&str>) = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .partition(|l| l.starts_with("role ") || l.starts_with("concept "));
    decls.shuffle(&mut rng);
    rest.shuffle(&mut rng);
    let mut out = decls.join("\n");
    out.push('\n');
    out.push_str(&rest.join("\n"));
    out.push('\n');
    out
}
