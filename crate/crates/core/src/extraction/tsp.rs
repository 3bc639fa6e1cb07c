//! City lists and pairwise distances.

use super::text::{sentence_end, sentence_start, tokenize, Kind, Token};

/// Capitalized words that open sentences rather than name places.
const NOT_NAMES: [&str; 44] = [
    "I", "A", "An", "The", "Visit", "Visiting", "Plan", "Find", "Compute", "Solve", "Help", "Please",
    "Travel", "Tour", "Route", "Start", "Starting", "Begin", "Go", "Drive", "Fly", "From", "Between",
    "Cities", "Distances", "Distance", "We", "My", "Our", "He", "She", "They", "It", "In", "On",
    "At", "To", "And", "Then", "Also", "Which", "What", "How", "Trip",
];
const COUNT_NOUNS: [&str; 6] = ["cities", "city", "towns", "places", "stops", "locations"];

#[derive(Debug, Clone, PartialEq)]
pub struct NameList {
    pub names: Vec<String>,
    pub start: usize,
    pub end: usize,
    /// Token index one past the list.
    pub end_token: usize,
}

/// A capitalized, possibly multiword name starting at `i`; returns its last token.
fn name_at(src: &str, toks: &[Token], i: usize) -> Option<usize> {
    let t = toks.get(i)?;
    if !t.capitalized(src) || NOT_NAMES.contains(&t.text(src)) {
        return None;
    }
    let mut last = i;
    loop {
        let cur = toks[last];
        match (toks.get(last + 1), toks.get(last + 2)) {
            (Some(h), Some(w))
                if h.is_punct(src, "-") && h.start == cur.end && w.start == h.end && w.kind == Kind::Word =>
            {
                last += 2;
            }
            (Some(w), _) if w.capitalized(src) && w.start == cur.end + 1 && &src[cur.end..w.start] == " " => {
                last += 1;
            }
            _ => return Some(last),
        }
    }
}

/// Separator tokens at `i`; returns the index of the token after them.
fn separator(src: &str, toks: &[Token], i: usize) -> Option<usize> {
    let t = toks.get(i)?;
    if t.is_punct(src, ",") {
        let after = i + 1;
        return Some(if toks.get(after).is_some_and(|n| n.is_word(src, "and")) {
            after + 1
        } else {
            after
        });
    }
    if t.is_word(src, "and") || t.is_punct(src, "&") {
        return Some(i + 1);
    }
    None
}

/// The longest list of two or more capitalized names; earliest on ties.
pub fn city_list(src: &str, toks: &[Token]) -> Option<NameList> {
    let mut best: Option<NameList> = None;
    let mut i = 0;
    while i < toks.len() {
        let Some(mut last) = name_at(src, toks, i) else {
            i += 1;
            continue;
        };
        let mut names = vec![src[toks[i].start..toks[last].end].to_string()];
        while let Some((next, l)) = separator(src, toks, last + 1).and_then(|n| Some((n, name_at(src, toks, n)?))) {
            names.push(src[toks[next].start..toks[l].end].to_string());
            last = l;
        }
        if names.len() >= 2 && best.as_ref().is_none_or(|b| names.len() > b.names.len()) {
            best = Some(NameList {
                names,
                start: toks[i].start,
                end: toks[last].end,
                end_token: last + 1,
            });
        }
        i = last + 1;
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMention {
    pub from: String,
    pub to: String,
    pub value: f64,
    pub start: usize,
    pub end: usize,
}

/// Known-name mentions inside the token range, in order, without repeats.
fn names_in(src: &str, toks: &[Token], lo: usize, hi: usize, names: &[String]) -> Vec<String> {
    let name_toks: Vec<Vec<Token>> = names.iter().map(|n| tokenize(n)).collect();
    let mut out: Vec<String> = Vec::new();
    let mut k = lo;
    while k < hi {
        let hit = names.iter().zip(&name_toks).find(|(n, nt)| {
            k + nt.len() <= hi
                && nt.iter().enumerate().all(|(o, t)| {
                    toks[k + o].text(src).eq_ignore_ascii_case(t.text(n))
                })
        });
        match hit {
            Some((n, nt)) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
                k += nt.len();
            }
            None => k += 1,
        }
    }
    out
}

pub fn distance_mentions(src: &str, toks: &[Token], list: &NameList) -> Vec<DistanceMention> {
    let numbers: Vec<usize> = (list.end_token..toks.len())
        .filter(|&k| toks[k].kind == Kind::Number)
        .filter(|&k| !toks.get(k + 1).is_some_and(|t| t.is_any_word(src, &COUNT_NOUNS)))
        .collect();
    let mut out = Vec::new();
    for (n, &k) in numbers.iter().enumerate() {
        let prev = if n == 0 { list.end_token } else { numbers[n - 1] + 1 };
        let lo = prev.max(sentence_start(src, toks, k)).max(list.end_token);
        let mut found = names_in(src, toks, lo, k, &list.names);
        if found.is_empty() {
            let next = numbers.get(n + 1).copied().unwrap_or(toks.len());
            found = names_in(src, toks, k + 1, next.min(sentence_end(src, toks, k)), &list.names);
        }
        if let [a, b] = found.as_slice() {
            out.push(DistanceMention {
                from: a.clone(),
                to: b.clone(),
                value: toks[k].number(src).unwrap_or(f64::NAN),
                start: toks[k].start,
                end: toks[k].end,
            });
        }
    }
    out
}

/// Mentions answering "distance between `a` and `b`": the `a → b` direction if stated, else `b → a`.
pub fn distance_between<'m>(mentions: &'m [DistanceMention], a: &str, b: &str) -> Vec<&'m DistanceMention> {
    let is = |m: &DistanceMention, x: &str, y: &str| {
        m.from.eq_ignore_ascii_case(x) && m.to.eq_ignore_ascii_case(y)
    };
    let forward: Vec<&DistanceMention> = mentions.iter().filter(|m| is(m, a, b)).collect();
    if !forward.is_empty() {
        return forward;
    }
    mentions.iter().filter(|m| is(m, b, a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CTX: &str = "A salesperson wants to visit Bern, Basel and Zurich. \
        The distance from Bern to Basel is 95 km, Bern to Zurich is 120 km and Basel to Zurich is 85 km.";

    #[test]
    fn lists() {
        let t = tokenize(CTX);
        let l = city_list(CTX, &t).unwrap();
        assert_eq!(l.names, vec!["Bern", "Basel", "Zurich"]);
        assert_eq!(&CTX[l.start..l.end], "Bern, Basel and Zurich");
        let s = "Cities: New York, San Francisco, and Baden-Baden.";
        let l = city_list(s, &tokenize(s)).unwrap();
        assert_eq!(l.names, vec!["New York", "San Francisco", "Baden-Baden"]);
        assert!(city_list("I like Bern", &tokenize("I like Bern")).is_none());
    }

    #[test]
    fn distances() {
        let t = tokenize(CTX);
        let l = city_list(CTX, &t).unwrap();
        let ms = distance_mentions(CTX, &t, &l);
        let got: Vec<(&str, &str, f64)> = ms.iter().map(|m| (m.from.as_str(), m.to.as_str(), m.value)).collect();
        assert_eq!(
            got,
            vec![("Bern", "Basel", 95.0), ("Bern", "Zurich", 120.0), ("Basel", "Zurich", 85.0)]
        );
        assert_eq!(distance_between(&ms, "Zurich", "Basel")[0].value, 85.0);
        let s = "Visit Oslo and Rome. It is 2000 km from Oslo to Rome.";
        let t = tokenize(s);
        let ms = distance_mentions(s, &t, &city_list(s, &t).unwrap());
        assert_eq!(ms.len(), 1);
        assert_eq!((ms[0].from.as_str(), ms[0].value), ("Oslo", 2000.0));
    }

    #[test]
    fn counts_are_not_distances() {
        let s = "Plan a tour of 3 cities: Oslo, Rome and Bern. Oslo and Rome are 3 km apart.";
        let t = tokenize(s);
        let ms = distance_mentions(s, &t, &city_list(s, &t).unwrap());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].value, 3.0);
    }
}
