//! Property checks shared by the proptest suite and the acceptance target.
//! Each returns `Err` with a description of the first violation.

use std::collections::BTreeMap;

use fdlb::decision::{rank, sigma_utility, ubox_fuzzy_utility, FuzzyDecisionBase, UtilityBox};
use fdlb::reasoner::saturate;
use fdlb::text::{parse_kb, serialize_kb};
use fdlb::{ConceptExpr, Degree, DegreeInterval, KnowledgeBase};
use rust_decimal::Decimal;

use super::{degree_closure, oracle, rename, rename_concept, reversing, shuffle_statements};

type Map = BTreeMap<(String, ConceptExpr), DegreeInterval>;

fn intervals(kb: &KnowledgeBase) -> Option<Map> {
    saturate(kb).ok().map(|s| s.interval_map())
}

/// Engine and oracle agree on consistency and, when consistent, on every
/// cell. Returns the consistency verdict.
pub fn oracle_agrees(kb: &KnowledgeBase) -> Result<bool, String> {
    let expected = oracle(kb);
    let got = saturate(kb);
    match (expected.consistent, got) {
        (true, Ok(sat)) => {
            let map: BTreeMap<_, _> = sat
                .interval_map()
                .into_iter()
                .map(|(k, iv)| (k, (iv.lo(), iv.hi())))
                .collect();
            if map == expected.cells {
                return Ok(true);
            }
            for (k, v) in &expected.cells {
                if map.get(k) != Some(v) {
                    return Err(format!(
                        "{} : {}: oracle {:?}, engine {:?}",
                        k.0,
                        k.1,
                        v,
                        map.get(k)
                    ));
                }
            }
            let extra: Vec<_> = map.keys().filter(|k| !expected.cells.contains_key(*k)).collect();
            Err(format!("engine closure has extra cells {extra:?}"))
        }
        (false, Err(_)) => Ok(false),
        (true, Err(r)) => Err(format!("engine reports a conflict the oracle lacks:\n{r}")),
        (false, Ok(_)) => Err("oracle finds an inconsistency the engine missed".into()),
    }
}

/// Reordering the text and permuting names leave every interval unchanged.
pub fn confluent(kb: &KnowledgeBase, seed: u64) -> Result<(), String> {
    let base = intervals(kb);
    let shuffled = parse_kb(&shuffle_statements(&serialize_kb(kb), seed))
        .map_err(|d| format!("shuffled text does not parse: {d:?}"))?;
    if intervals(&shuffled) != base {
        return Err("shuffled statements changed the result".into());
    }
    let renamed = rename(kb, &reversing);
    let back = intervals(&renamed).map(|m| {
        m.into_iter()
            .map(|((i, c), iv)| ((reversing(&i), rename_concept(&c, &reversing).normalize()), iv))
            .collect::<Map>()
    });
    if back != base {
        return Err("renaming changed the result".into());
    }
    Ok(())
}

/// Saturating the fixpoint again derives nothing.
pub fn idempotent(kb: &KnowledgeBase) -> Result<(), String> {
    let Ok(sat) = saturate(kb) else {
        return Ok(());
    };
    let again = sat.resaturate();
    if again.interval_map() != sat.interval_map() {
        return Err("resaturation changed an interval".into());
    }
    if again.derivation_count() != sat.derivation_count() {
        return Err("resaturation logged new derivations".into());
    }
    Ok(())
}

/// Adding an assertion only narrows intervals.
pub fn monotone(kb: &KnowledgeBase, individual: &str, concept: ConceptExpr, d: Degree) -> Result<(), String> {
    let Some(before) = intervals(kb) else {
        return Ok(());
    };
    let mut bigger = kb.clone();
    bigger
        .assert_concept(individual, concept, d)
        .map_err(|e| e.to_string())?;
    let Some(after) = intervals(&bigger) else {
        return Ok(());
    };
    for (k, iv) in &before {
        match after.get(k) {
            Some(n) if n.is_subset_of(iv) => {}
            other => return Err(format!("{} : {} widened from {iv} to {other:?}", k.0, k.1)),
        }
    }
    Ok(())
}

/// Serializing and parsing gives back the same knowledge base and text.
pub fn round_trip(kb: &KnowledgeBase) -> Result<(), String> {
    let text = serialize_kb(kb);
    let parsed = parse_kb(&text).map_err(|d| format!("{d:?}\n{text}"))?;
    if &parsed != kb {
        return Err(format!("parsed knowledge base differs:\n{text}"));
    }
    if serialize_kb(&parsed) != text {
        return Err("second serialization differs".into());
    }
    Ok(())
}

fn choices(kb: &KnowledgeBase) -> Vec<String> {
    kb.individuals().iter().cloned().collect()
}

/// Scaling all weights by a positive factor keeps order and ideal choice,
/// and scales each score.
pub fn scaling_invariant(kb: &KnowledgeBase, ubox: &UtilityBox, factor: Decimal) -> Result<(), String> {
    let Ok(sat) = saturate(kb) else {
        return Ok(());
    };
    let scaled = ubox.scaled(factor).map_err(|e| e.to_string())?;
    let a = rank(&FuzzyDecisionBase::new(&sat, ubox, choices(kb)).unwrap()).unwrap();
    let b = rank(&FuzzyDecisionBase::new(&sat, &scaled, choices(kb)).unwrap()).unwrap();
    let order = |r: &fdlb::decision::DecisionReport| -> Vec<String> {
        r.ranking.iter().map(|c| c.choice.clone()).collect()
    };
    if order(&a) != order(&b) || a.ideal != b.ideal {
        return Err(format!("scaling by {factor} changed the ranking"));
    }
    for (x, y) in a.ranking.iter().zip(&b.ranking) {
        if x.score * factor != y.score {
            return Err(format!("score of {} did not scale", x.choice));
        }
    }
    Ok(())
}

/// With only crisp degrees the fuzzy utility is the σ-utility.
pub fn crisp_reduction(kb: &KnowledgeBase, ubox: &UtilityBox) -> Result<(), String> {
    let Ok(sat) = saturate(kb) else {
        return Ok(());
    };
    for c in choices(kb) {
        let fuzzy = ubox_fuzzy_utility(&sat, ubox, &c).map_err(|e| e.to_string())?;
        let sigma = sigma_utility(&sat, ubox, &c).map_err(|e| e.to_string())?;
        if fuzzy != sigma {
            return Err(format!("{c}: fuzzy {fuzzy} vs sigma {sigma}"));
        }
    }
    Ok(())
}

/// Every derived degree lies in the min/max/complement closure of the input
/// degrees. Returns the number of distinct derived degrees checked.
pub fn degrees_in_closure(kb: &KnowledgeBase) -> Result<usize, String> {
    let Ok(sat) = saturate(kb) else {
        return Ok(0);
    };
    let allowed = degree_closure(&kb.degree_constants());
    let derived = sat.derived_degrees();
    match derived.iter().find(|d| !allowed.contains(d)) {
        Some(d) => Err(format!("derived {d} outside {allowed:?}")),
        None => Ok(derived.len()),
    }
}

/// Splitting a box into two disjoint halves splits every utility.
pub fn additive(kb: &KnowledgeBase, ubox: &UtilityBox) -> Result<(), String> {
    let Ok(sat) = saturate(kb) else {
        return Ok(());
    };
    let (mut left, mut right) = (UtilityBox::new("left"), UtilityBox::new("right"));
    for (i, (a, w)) in ubox.entries().enumerate() {
        let half = if i % 2 == 0 { &mut left } else { &mut right };
        half.insert(a, w).unwrap();
    }
    for c in choices(kb) {
        let whole = ubox_fuzzy_utility(&sat, ubox, &c).unwrap();
        let parts = ubox_fuzzy_utility(&sat, &left, &c).unwrap() + ubox_fuzzy_utility(&sat, &right, &c).unwrap();
        if whole != parts {
            return Err(format!("{c}: {whole} != {parts}"));
        }
    }
    Ok(())
}
