//! Tokenizer with byte spans into the original utterance.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Word,
    Number,
    Punct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: Kind,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }

    pub fn is_word(&self, src: &str, w: &str) -> bool {
        self.kind == Kind::Word && self.text(src).eq_ignore_ascii_case(w)
    }

    pub fn is_any_word(&self, src: &str, ws: &[&str]) -> bool {
        self.kind == Kind::Word && ws.iter().any(|w| self.text(src).eq_ignore_ascii_case(w))
    }

    pub fn is_punct(&self, src: &str, p: &str) -> bool {
        self.kind == Kind::Punct && self.text(src) == p
    }

    pub fn number(&self, src: &str) -> Option<f64> {
        (self.kind == Kind::Number).then(|| self.text(src).parse().ok()).flatten()
    }

    pub fn capitalized(&self, src: &str) -> bool {
        self.kind == Kind::Word && self.text(src).chars().next().is_some_and(char::is_uppercase)
    }
}

pub fn tokenize(src: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let end_of = |k: usize| chars.get(k).map_or(src.len(), |c| c.0);
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (start, ch) = chars[k];
        let next_digit = chars.get(k + 1).is_some_and(|c| c.1.is_ascii_digit());
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() || (ch == '.' && next_digit) {
            let mut seen_dot = ch == '.';
            k += 1;
            while k < chars.len() {
                let c = chars[k].1;
                let digit_after = chars.get(k + 1).is_some_and(|c| c.1.is_ascii_digit());
                if c.is_ascii_digit() {
                    k += 1;
                } else if c == '.' && !seen_dot && digit_after {
                    seen_dot = true;
                    k += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                kind: Kind::Number,
                start,
                end: end_of(k),
            });
        } else if ch.is_alphabetic() {
            k += 1;
            while k < chars.len() {
                let c = chars[k].1;
                let apostrophe = c == '\'' && chars.get(k + 1).is_some_and(|c| c.1.is_alphabetic());
                if c.is_alphabetic() || apostrophe {
                    k += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                kind: Kind::Word,
                start,
                end: end_of(k),
            });
        } else {
            k += 1;
            out.push(Token {
                kind: Kind::Punct,
                start,
                end: end_of(k),
            });
        }
    }
    out
}

/// Index of the first token of the sentence containing token `i`.
pub fn sentence_start(src: &str, toks: &[Token], i: usize) -> usize {
    (0..i)
        .rev()
        .find(|&j| is_sentence_break(src, toks, j))
        .map_or(0, |j| j + 1)
}

/// One past the last token of the sentence containing token `i`.
pub fn sentence_end(src: &str, toks: &[Token], i: usize) -> usize {
    (i..toks.len())
        .find(|&j| is_sentence_break(src, toks, j))
        .unwrap_or(toks.len())
}

pub fn is_sentence_break(src: &str, toks: &[Token], j: usize) -> bool {
    let t = toks[j];
    if t.kind != Kind::Punct {
        return false;
    }
    matches!(t.text(src), "." | "!" | "?" | ";")
}

/// True when `needle` occurs at byte offset `at` with non-alphanumeric neighbors.
pub fn word_bounded(hay: &str, at: usize, len: usize) -> bool {
    let before = hay[..at].chars().next_back();
    let after = hay[at + len..].chars().next();
    !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
}

/// Whole-word, ASCII-case-insensitive occurrences of `needle`.
pub fn find_words(hay: &str, needle: &str) -> Vec<usize> {
    let lower = hay.to_ascii_lowercase();
    let needle = needle.to_ascii_lowercase();
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(pos) = lower[from..].find(&needle) {
        let at = from + pos;
        if word_bounded(hay, at, needle.len()) {
            out.push(at);
        }
        from = at + needle.len().max(1);
        while !lower.is_char_boundary(from) {
            from += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<(Kind, &str)> {
        tokenize(s).iter().map(|t| (t.kind, t.text(s))).collect()
    }

    #[test]
    fn tokens() {
        assert_eq!(
            kinds("Rx(3π/4), 2.5 kg."),
            vec![
                (Kind::Word, "Rx"),
                (Kind::Punct, "("),
                (Kind::Number, "3"),
                (Kind::Word, "π"),
                (Kind::Punct, "/"),
                (Kind::Number, "4"),
                (Kind::Punct, ")"),
                (Kind::Punct, ","),
                (Kind::Number, "2.5"),
                (Kind::Word, "kg"),
                (Kind::Punct, "."),
            ]
        );
        assert_eq!(kinds("what's |0⟩")[0], (Kind::Word, "what's"));
        assert_eq!(kinds(".5")[0], (Kind::Number, ".5"));
        assert_eq!(kinds("v 3.")[1], (Kind::Number, "3"));
    }

    #[test]
    fn sentences_and_words() {
        let s = "Bern is nice. Basel too";
        let t = tokenize(s);
        assert_eq!(sentence_start(s, &t, 4), 4);
        assert_eq!(sentence_end(s, &t, 0), 3);
        assert_eq!(find_words("a Bern, bernese BERN", "bern"), vec![2, 16]);
    }
}
