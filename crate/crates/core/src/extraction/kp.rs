//! Item lists, per-item weights and values, and the capacity.

use super::text::{find_words, is_sentence_break, sentence_end, sentence_start, Kind, Token};
use std::collections::BTreeSet;

const LIST_CUES: [&str; 9] = [
    "items", "objects", "things", "options", "from", "pack", "packing", "include", "includes",
];
const LEAD_SKIP: [&str; 6] = ["are", "is", "following", "namely", "including", "available"];
const ARTICLES: [&str; 6] = ["a", "an", "the", "one", "some", "my"];
const STOP: [&str; 32] = [
    "and", "or", "with", "each", "weighing", "weighs", "weigh", "that", "which", "worth", "of",
    "for", "to", "in", "into", "is", "are", "has", "have", "having", "whose", "where", "it",
    "can", "could", "i", "my", "the", "a", "an", "on", "but",
];
const WEIGHT_UNITS: [&str; 10] = [
    "kg", "kgs", "kilograms", "kilogram", "g", "grams", "lb", "lbs", "pounds", "pound",
];
const WEIGHT_CUES: [&str; 6] = ["weighs", "weigh", "weight", "weighing", "weights", "heavy"];
const VALUE_CUES: [&str; 7] = ["worth", "value", "valued", "values", "price", "priced", "profit"];
const VALUE_UNITS: [&str; 6] = ["points", "point", "dollars", "euros", "coins", "credits"];
const CAPACITY_CUES: [&str; 12] = [
    "capacity", "limit", "most", "maximum", "maximal", "max", "holds", "hold", "carry", "carries",
    "supports", "handle",
];
const CAPACITY_NOUNS: [&str; 6] = ["capacity", "knapsack", "backpack", "bag", "limit", "rucksack"];

#[derive(Debug, Clone, PartialEq)]
pub struct ItemList {
    pub names: Vec<String>,
    pub start: usize,
    pub end: usize,
}

fn element_at(src: &str, toks: &[Token], i: usize) -> Option<(usize, usize, usize)> {
    let mut j = i;
    if toks.get(j).is_some_and(|t| t.is_any_word(src, &ARTICLES)) {
        j += 1;
    }
    let first = j;
    while j < toks.len() && j - first < 3 {
        let t = toks[j];
        if t.kind != Kind::Word || t.is_any_word(src, &STOP) {
            break;
        }
        j += 1;
    }
    (j > first).then_some((i, first, j - 1))
}

fn list_at(src: &str, toks: &[Token], i: usize) -> Option<ItemList> {
    let (s, f, l) = element_at(src, toks, i)?;
    let mut names = vec![src[toks[f].start..toks[l].end].to_string()];
    let mut last = l;
    loop {
        let mut k = last + 1;
        match toks.get(k) {
            Some(t) if t.is_punct(src, ",") => {
                k += 1;
                if toks.get(k).is_some_and(|t| t.is_word(src, "and") || t.is_punct(src, "&")) {
                    k += 1;
                }
            }
            Some(t) if t.is_word(src, "and") || t.is_punct(src, "&") => k += 1,
            _ => break,
        }
        let Some((_, f, l)) = element_at(src, toks, k) else { break };
        names.push(src[toks[f].start..toks[l].end].to_string());
        last = l;
    }
    Some(ItemList {
        names,
        start: toks[s].start,
        end: toks[last].end,
    })
}

/// The longest list following a list cue; earliest on ties.
pub fn item_list(src: &str, toks: &[Token]) -> Option<ItemList> {
    let mut best: Option<ItemList> = None;
    for (i, t) in toks.iter().enumerate() {
        if !t.is_any_word(src, &LIST_CUES) {
            continue;
        }
        let mut j = i + 1;
        while toks
            .get(j)
            .is_some_and(|t| t.is_punct(src, ":") || t.is_any_word(src, &LEAD_SKIP))
        {
            j += 1;
        }
        if let Some(list) = list_at(src, toks, j) {
            if best.as_ref().is_none_or(|b| list.names.len() > b.names.len()) {
                best = Some(list);
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attr {
    Weight,
    Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumberMention {
    pub token: usize,
    pub value: f64,
    pub start: usize,
    pub end: usize,
}

fn mention(src: &str, toks: &[Token], k: usize) -> NumberMention {
    NumberMention {
        token: k,
        value: toks[k].number(src).unwrap_or(f64::NAN),
        start: toks[k].start,
        end: toks[k].end,
    }
}

/// Numbers anchored by a capacity cue.
pub fn capacity_mentions(src: &str, toks: &[Token]) -> Vec<NumberMention> {
    let mut out: Vec<NumberMention> = Vec::new();
    let mut push = |m: NumberMention| {
        if !out.iter().any(|o| o.token == m.token) {
            out.push(m);
        }
    };
    for i in 0..toks.len() {
        let t = toks[i];
        let is_cue = t.is_any_word(src, &CAPACITY_CUES)
            || (t.is_word(src, "up") && toks.get(i + 1).is_some_and(|n| n.is_word(src, "to")));
        if is_cue {
            let mut k = i + 1;
            while k < toks.len() && k <= i + 5 && !is_sentence_break(src, toks, k) {
                if toks[k].kind == Kind::Number {
                    push(mention(src, toks, k));
                    break;
                }
                k += 1;
            }
        }
        if t.kind == Kind::Number {
            let mut k = i + 1;
            if toks.get(k).is_some_and(|u| u.is_any_word(src, &WEIGHT_UNITS)) {
                k += 1;
            }
            if toks.get(k).is_some_and(|u| u.is_any_word(src, &CAPACITY_NOUNS)) && k > i + 1 {
                push(mention(src, toks, i));
            }
        }
    }
    out.sort_by_key(|m| m.token);
    out
}

fn classify(src: &str, toks: &[Token], k: usize, lo: usize) -> Option<Attr> {
    let next = toks.get(k + 1);
    let mut weight_dist = None;
    let mut value_dist = None;
    if next.is_some_and(|t| t.is_any_word(src, &WEIGHT_UNITS)) {
        weight_dist = Some(0);
    }
    if next.is_some_and(|t| t.is_any_word(src, &VALUE_UNITS)) {
        value_dist = Some(0);
    }
    if k > 0 && (toks[k - 1].is_punct(src, "$") || toks[k - 1].is_punct(src, "€")) {
        value_dist = Some(0);
    }
    for d in 1..=3 {
        let Some(p) = k.checked_sub(d).filter(|&p| p >= lo) else { break };
        if weight_dist.is_none() && toks[p].is_any_word(src, &WEIGHT_CUES) {
            weight_dist = Some(d);
        }
        if value_dist.is_none() && toks[p].is_any_word(src, &VALUE_CUES) {
            value_dist = Some(d);
        }
    }
    match (weight_dist, value_dist) {
        (Some(w), Some(v)) => Some(if w <= v { Attr::Weight } else { Attr::Value }),
        (Some(_), None) => Some(Attr::Weight),
        (None, Some(_)) => Some(Attr::Value),
        (None, None) => None,
    }
}

/// Attribute keyword nearest before token `k` within its sentence.
fn section(src: &str, toks: &[Token], k: usize) -> Option<Attr> {
    let s = sentence_start(src, toks, k);
    (s..k).rev().find_map(|p| {
        if toks[p].is_any_word(src, &WEIGHT_CUES) {
            Some(Attr::Weight)
        } else if toks[p].is_any_word(src, &VALUE_CUES) {
            Some(Attr::Value)
        } else {
            None
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeMention {
    pub item: usize,
    pub attr: Attr,
    pub number: NumberMention,
}

/// Token index ranges of item-name mentions outside the list, longest first on overlaps.
fn item_mentions(src: &str, toks: &[Token], list: &ItemList) -> Vec<(usize, usize)> {
    let mut spans: Vec<(usize, usize, usize)> = Vec::new();
    for (idx, name) in list.names.iter().enumerate() {
        for at in find_words(src, name) {
            if at >= list.start && at < list.end {
                continue;
            }
            spans.push((at, at + name.len(), idx));
        }
    }
    spans.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)));
    let mut kept: Vec<(usize, usize, usize)> = Vec::new();
    for s in spans {
        if !kept.iter().any(|k| s.0 < k.1 && k.0 < s.1) {
            kept.push(s);
        }
    }
    kept.sort();
    kept.into_iter()
        .filter_map(|(start, _, idx)| toks.iter().position(|t| t.start == start).map(|k| (k, idx)))
        .collect()
}

pub fn attribute_mentions(src: &str, toks: &[Token], list: &ItemList) -> Vec<AttributeMention> {
    let capacity: BTreeSet<usize> = capacity_mentions(src, toks).iter().map(|m| m.token).collect();
    let mut claimed: BTreeSet<usize> = capacity.clone();
    let mut out = Vec::new();

    // "the weights are 3, 1 and 2 kg ... respectively"
    for r in (0..toks.len()).filter(|&k| toks[k].is_word(src, "respectively")) {
        let (s, e) = (sentence_start(src, toks, r), sentence_end(src, toks, r));
        let keys: Vec<(usize, Attr)> = (s..e)
            .filter_map(|k| {
                let t = toks[k];
                if t.is_any_word(src, &["weights", "weight", "weigh"]) {
                    Some((k, Attr::Weight))
                } else if t.is_any_word(src, &["values", "value", "worth"]) {
                    Some((k, Attr::Value))
                } else {
                    None
                }
            })
            .collect();
        for (n, &(k, attr)) in keys.iter().enumerate() {
            let stop = keys.get(n + 1).map_or(e, |x| x.0);
            let nums: Vec<usize> = (k + 1..stop)
                .filter(|&j| toks[j].kind == Kind::Number && !capacity.contains(&j))
                .collect();
            if nums.len() == list.names.len() {
                for (item, &j) in nums.iter().enumerate() {
                    claimed.insert(j);
                    out.push(AttributeMention {
                        item,
                        attr,
                        number: mention(src, toks, j),
                    });
                }
            }
        }
    }

    let mentions = item_mentions(src, toks, list);
    for (n, &(k, item)) in mentions.iter().enumerate() {
        let stop = mentions
            .get(n + 1)
            .map_or(usize::MAX, |m| m.0)
            .min(sentence_end(src, toks, k));
        for j in k + 1..stop {
            if toks[j].kind != Kind::Number || claimed.contains(&j) {
                continue;
            }
            let attr = classify(src, toks, j, k).or_else(|| section(src, toks, k));
            if let Some(attr) = attr {
                out.push(AttributeMention {
                    item,
                    attr,
                    number: mention(src, toks, j),
                });
            }
        }
    }
    out
}

pub fn find_item(list: &ItemList, name: &str) -> Option<usize> {
    let key = name.trim().to_lowercase();
    list.names.iter().position(|n| n.to_lowercase() == key)
}
