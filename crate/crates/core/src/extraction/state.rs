//! Locating initial-state expressions such as `(|00⟩+|11⟩)/sqrt(2)` in free text.

use crate::ket::{parse_ket, KetExpression};

const CLOSERS: [char; 3] = ['⟩', '>', '〉'];

/// Characters that may appear in a state expression outside the kets.
fn expr_char(c: char) -> bool {
    c.is_ascii_digit()
        || matches!(
            c,
            '.' | '(' | ')' | '/' | '√' | '*' | '·' | '+' | '-' | '−' | ' ' | 'i' | 's' | 'q' | 'r' | 't'
        )
}

/// Byte ranges of bare kets `|bits⟩`.
fn kets(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (at, _) in text.match_indices('|') {
        let rest = &text[at + 1..];
        let digits = rest.chars().take_while(|c| *c == '0' || *c == '1').count();
        if digits == 0 {
            continue;
        }
        if let Some(close) = rest[digits..].chars().next().filter(|c| CLOSERS.contains(c)) {
            out.push((at, at + 1 + digits + close.len_utf8()));
        }
    }
    out
}

fn boundary_ok(text: &str, start: usize, end: usize) -> bool {
    let before = text[..start].chars().next_back();
    let after = text[end..].chars().next();
    !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateMention {
    pub start: usize,
    pub end: usize,
    pub expr: KetExpression,
}

/// Maximal substrings around each cluster of kets that parse as a state.
pub fn find_states(text: &str) -> Vec<StateMention> {
    let ks = kets(text);
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    for (s, e) in ks {
        match clusters.last_mut() {
            Some(last) if text[last.1..s].chars().all(expr_char) && text[last.1..s].contains(['+', '-', '−']) => {
                last.1 = e;
            }
            _ => clusters.push((s, e)),
        }
    }
    let mut out: Vec<StateMention> = Vec::new();
    for (s, e) in clusters {
        if out.last().is_some_and(|m| m.end > s) {
            continue;
        }
        let lefts: Vec<usize> = {
            let mut v = vec![s];
            for (i, c) in text[..s].char_indices().rev() {
                if !expr_char(c) {
                    break;
                }
                v.push(i);
            }
            v.reverse();
            v
        };
        let rights: Vec<usize> = {
            let mut v = vec![e];
            for (i, c) in text[e..].char_indices() {
                if !expr_char(c) {
                    break;
                }
                v.push(e + i + c.len_utf8());
            }
            v.reverse();
            v
        };
        let found = lefts.iter().find_map(|&l| {
            rights.iter().find_map(|&r| {
                let raw = &text[l..r];
                let trimmed_l = l + (raw.len() - raw.trim_start().len());
                let trimmed_r = r - (raw.len() - raw.trim_end().len());
                if trimmed_l >= trimmed_r || !boundary_ok(text, trimmed_l, trimmed_r) {
                    return None;
                }
                let candidate = &text[trimmed_l..trimmed_r];
                if !balanced(candidate) {
                    return None;
                }
                parse_ket(candidate).ok().map(|expr| StateMention {
                    start: trimmed_l,
                    end: trimmed_r,
                    expr,
                })
            })
        });
        if let Some(m) = found {
            out.push(m);
        }
    }
    out
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spans(text: &str) -> Vec<&str> {
        find_states(text).iter().map(|m| &text[m.start..m.end]).collect()
    }

    #[test]
    fn finds_expressions() {
        assert_eq!(spans("Apply H to |0⟩."), vec!["|0⟩"]);
        assert_eq!(
            spans("apply X to the state (|00⟩+|11⟩)/sqrt(2) please"),
            vec!["(|00⟩+|11⟩)/sqrt(2)"]
        );
        assert_eq!(spans("state is 3|0⟩ + 4|1⟩, then"), vec!["3|0⟩ + 4|1⟩"]);
        assert_eq!(spans("on 1/√2|0> - 1/√2|1> now"), vec!["1/√2|0> - 1/√2|1>"]);
        assert_eq!(spans("Apply S (shift pi/2) to |1⟩"), vec!["|1⟩"]);
        assert!(spans("no state here |x⟩").is_empty());
    }

    #[test]
    fn separate_mentions() {
        assert_eq!(spans("from |0⟩ to |1⟩"), vec!["|0⟩", "|1⟩"]);
    }
}
