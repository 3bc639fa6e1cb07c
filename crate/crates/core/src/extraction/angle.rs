//! Angle expressions: fractions of π, degrees, and radians (the default unit).

use super::text::{Kind, Token};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleMention {
    /// Token range `[first, last]`, inclusive.
    pub first: usize,
    pub last: usize,
    pub start: usize,
    pub end: usize,
    pub radians: f64,
    /// No π and no unit: a plain number read as radians.
    pub bare: bool,
}

const PI_WORDS: [&str; 2] = ["pi", "π"];
const DEGREE_WORDS: [&str; 4] = ["degrees", "degree", "deg", "degs"];
const RADIAN_WORDS: [&str; 4] = ["radians", "radian", "rad", "rads"];

fn adjacent(a: &Token, b: &Token) -> bool {
    a.end == b.start
}

/// Every angle-like expression, leftmost-longest.
pub fn scan(src: &str, toks: &[Token]) -> Vec<AngleMention> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if let Some(m) = at(src, toks, i) {
            i = m.last + 1;
            out.push(m);
        } else {
            i += 1;
        }
    }
    out
}

fn at(src: &str, toks: &[Token], i: usize) -> Option<AngleMention> {
    let mut j = i;
    let mut sign = 1.0;
    if toks[j].kind == Kind::Punct && matches!(toks[j].text(src), "-" | "−") {
        let next = toks.get(j + 1)?;
        if !adjacent(&toks[j], next) {
            return None;
        }
        let prev_is_operand = j > 0
            && matches!(toks[j - 1].kind, Kind::Number | Kind::Word)
            && adjacent(&toks[j - 1], &toks[j]);
        if prev_is_operand {
            return None;
        }
        sign = -1.0;
        j += 1;
    }
    let first = i;
    let mut coeff = 1.0;
    let mut coeff_tok = false;
    if let Some(n) = toks[j].number(src) {
        coeff = n;
        coeff_tok = true;
    }
    // k · π form
    let pi_at = if coeff_tok {
        let mut k = j + 1;
        if toks.get(k).is_some_and(|t| t.is_punct(src, "*") || t.is_punct(src, "·")) {
            k += 1;
        }
        toks.get(k).filter(|t| t.is_any_word(src, &PI_WORDS)).map(|_| k)
    } else {
        toks[j].is_any_word(src, &PI_WORDS).then_some(j)
    };
    if let Some(p) = pi_at {
        let mut last = p;
        let mut value = sign * coeff * PI;
        if let (Some(slash), Some(den)) = (toks.get(p + 1), toks.get(p + 2)) {
            if slash.is_punct(src, "/") {
                if let Some(d) = den.number(src).filter(|d| *d != 0.0) {
                    value /= d;
                    last = p + 2;
                }
            }
        }
        if toks.get(last + 1).is_some_and(|t| t.is_any_word(src, &RADIAN_WORDS)) {
            last += 1;
        }
        return Some(mention(toks, first, last, value, false));
    }
    if !coeff_tok {
        return None;
    }
    let value = sign * coeff;
    match toks.get(j + 1) {
        Some(t) if t.is_punct(src, "°") => Some(mention(toks, first, j + 1, value.to_radians(), false)),
        Some(t) if t.is_any_word(src, &DEGREE_WORDS) => {
            Some(mention(toks, first, j + 1, value.to_radians(), false))
        }
        Some(t) if t.is_any_word(src, &RADIAN_WORDS) => Some(mention(toks, first, j + 1, value, false)),
        _ => Some(mention(toks, first, j, value, true)),
    }
}

fn mention(toks: &[Token], first: usize, last: usize, radians: f64, bare: bool) -> AngleMention {
    AngleMention {
        first,
        last,
        start: toks[first].start,
        end: toks[last].end,
        radians,
        bare,
    }
}

/// Parses a standalone angle expression such as `"3π/4"` or `"90 degrees"`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let toks = super::text::tokenize(text);
    let m = at(text, &toks, 0)?;
    (m.last + 1 == toks.len()).then_some(m.radians)
}
