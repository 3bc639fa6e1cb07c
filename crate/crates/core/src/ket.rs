//! Ket-notation parsing and rendering.
//!
//! A ket label lists qubit values starting with qubit 0, so `|10⟩` has
//! qubit 0 set and corresponds to basis index 1.
//!
//! Grammar (whitespace ignored between tokens):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := ['+' | '-'] [coeff ['*' | '·']] (ket | '(' expr ')') ('/' real)*
//! coeff  := real ['i'] | 'i' | '(' real ('+' | '-') real 'i' ')'
//! real   := atom ('/' atom)*
//! atom   := number | '√' number | 'sqrt(' number ')' | '√(' number ')'
//! ket    := '|' ('0' | '1')+ ('⟩' | '>' | '〉')
//! ```

use crate::format::significant;
use crate::quantum::{Amplitude, Statevector};
use thiserror::Error;

/// Input norms further than this from 1 are renormalized with a notice.
pub const RENORMALIZE_NOTICE_TOL: f64 = 1e-6;
const DROP_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KetError {
    #[error("cannot parse state at position {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
    #[error("terms have differing qubit counts ({0} vs {1})")]
    MixedArity(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KetTerm {
    pub coefficient: Amplitude,
    /// `bits[b]` is the value of qubit `b`.
    pub bits: Vec<u8>,
}

impl KetTerm {
    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |z, (b, &v)| z | ((v as usize) << b))
    }
}

/// A normalized superposition of computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct KetExpression {
    pub terms: Vec<KetTerm>,
    /// Norm of the expression as written, before normalization.
    pub input_norm: f64,
    /// Set when the input norm differed from 1 by more than 1e-6.
    pub renormalized: bool,
}

impl KetExpression {
    pub fn n_qubits(&self) -> usize {
        self.terms.first().map_or(0, |t| t.bits.len())
    }

    pub fn to_statevector(&self) -> Statevector {
        let mut amps = vec![Amplitude::new(0.0, 0.0); 1 << self.n_qubits()];
        for t in &self.terms {
            amps[t.index()] += t.coefficient;
        }
        Statevector::from_amplitudes_unchecked(amps)
    }

    pub fn notice(&self) -> Option<String> {
        self.renormalized.then(|| {
            format!(
                "The state as written has norm {}; it was renormalized to norm 1.",
                significant(self.input_norm, 6)
            )
        })
    }
}

pub fn parse_ket(text: &str) -> Result<KetExpression, KetError> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = Parser { chars, pos: 0 };
    let raw = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }

    let n = raw[0].1.len();
    for (_, bits) in &raw {
        if bits.len() != n {
            return Err(KetError::MixedArity(n, bits.len()));
        }
    }
    let mut amps = vec![Amplitude::new(0.0, 0.0); 1 << n];
    for (c, bits) in &raw {
        let z = bits.iter().enumerate().fold(0usize, |z, (b, &v)| z | ((v as usize) << b));
        amps[z] += c;
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < DROP_TOL || !norm.is_finite() {
        return Err(KetError::ParseError {
            pos: 0,
            msg: "state has zero norm".into(),
        });
    }
    let terms = amps
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() / norm > DROP_TOL)
        .map(|(z, a)| KetTerm {
            coefficient: a / norm,
            bits: index_bits(z, n),
        })
        .collect();
    Ok(KetExpression {
        terms,
        input_norm: norm,
        renormalized: (norm - 1.0).abs() > RENORMALIZE_NOTICE_TOL,
    })
}

fn index_bits(z: usize, n: usize) -> Vec<u8> {
    (0..n).map(|b| ((z >> b) & 1) as u8).collect()
}

pub fn ket_label(bits: &[u8]) -> String {
    let body: String = bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
    format!("|{body}⟩")
}

/// Renders a statevector in ket notation, dropping negligible amplitudes.
pub fn render_state(state: &Statevector) -> String {
    let n = state.n_qubits();
    let terms: Vec<KetTerm> = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > DROP_TOL)
        .map(|(z, &a)| KetTerm {
            coefficient: a,
            bits: index_bits(z, n),
        })
        .collect();
    render_terms(&terms)
}

pub fn render_ket(expr: &KetExpression) -> String {
    let mut terms = expr.terms.clone();
    terms.sort_by_key(KetTerm::index);
    render_terms(&terms)
}

fn render_terms(terms: &[KetTerm]) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let (negative, coeff) = render_coefficient(t.coefficient);
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&coeff);
        out.push_str(&ket_label(&t.bits));
    }
    out
}

fn is_half(v: f64) -> bool {
    (v * v - 0.5).abs() < 1e-12
}

/// Returns the sign and magnitude text of a coefficient ("" for exactly 1).
fn render_coefficient(c: Amplitude) -> (bool, String) {
    let re_zero = significant(c.re, 6) == "0";
    let im_zero = significant(c.im, 6) == "0";
    if im_zero {
        let neg = c.re < 0.0;
        let mag = if is_half(c.re) {
            "1/√2".to_string()
        } else {
            significant(c.re.abs(), 6)
        };
        return (neg, if mag == "1" { String::new() } else { mag });
    }
    if re_zero {
        let neg = c.im < 0.0;
        let mag = if is_half(c.im) {
            "i/√2".to_string()
        } else {
            let m = significant(c.im.abs(), 6);
            if m == "1" {
                "i".into()
            } else {
                format!("{m}i")
            }
        };
        return (neg, mag);
    }
    let sign = if c.im < 0.0 { '-' } else { '+' };
    (
        false,
        format!(
            "({}{}{}i)",
            significant(c.re, 6),
            sign,
            significant(c.im.abs(), 6)
        ),
    )
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

type RawTerm = (Amplitude, Vec<u8>);

impl Parser {
    fn error(&self, msg: &str) -> KetError {
        KetError::ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        let wc: Vec<char> = w.chars().collect();
        let end = self.pos + wc.len();
        if end <= self.chars.len()
            && self.chars[self.pos..end]
                .iter()
                .zip(&wc)
                .all(|(a, b)| a.eq_ignore_ascii_case(b))
        {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Vec<RawTerm>, KetError> {
        let mut terms = self.term()?;
        loop {
            let sign = if self.eat('+') {
                1.0
            } else if self.eat('-') || self.eat('−') {
                -1.0
            } else {
                break;
            };
            let more = self.term()?;
            terms.extend(more.into_iter().map(|(c, b)| (c * sign, b)));
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Vec<RawTerm>, KetError> {
        let mut sign = 1.0;
        loop {
            if self.eat('+') {
            } else if self.eat('-') || self.eat('−') {
                sign = -sign;
            } else {
                break;
            }
        }
        let coeff = self.coefficient()?;
        let had_coeff = coeff.is_some();
        let coeff = coeff.unwrap_or(Amplitude::new(1.0, 0.0)) * sign;
        if had_coeff {
            let _ = self.eat('*') || self.eat('·');
        }
        let mut body = match self.peek() {
            Some('|') => vec![self.ket()?],
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                inner
            }
            _ => return Err(self.error("expected a ket such as |0⟩")),
        };
        let mut scale = coeff;
        while self.peek() == Some('/') {
            self.pos += 1;
            let d = self.atom()?;
            if d == 0.0 {
                return Err(self.error("division by zero"));
            }
            scale /= d;
        }
        body.iter_mut().for_each(|(c, _)| *c *= scale);
        Ok(body)
    }

    /// Optional coefficient; restores position when none is present.
    fn coefficient(&mut self) -> Result<Option<Amplitude>, KetError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                if let Ok(re) = self.real() {
                    let sign = if self.eat('+') {
                        Some(1.0)
                    } else if self.eat('-') || self.eat('−') {
                        Some(-1.0)
                    } else {
                        None
                    };
                    if let Some(sign) = sign {
                        let im = if self.peek() == Some('i') {
                            1.0
                        } else {
                            self.real()?
                        };
                        if self.eat('i') && self.eat(')') {
                            return Ok(Some(Amplitude::new(re, sign * im)));
                        }
                    }
                }
                self.pos = start;
                Ok(None)
            }
            Some('i') => {
                self.pos += 1;
                let mut c = Amplitude::new(0.0, 1.0);
                while self.peek() == Some('/') {
                    self.pos += 1;
                    c /= self.atom()?;
                }
                Ok(Some(c))
            }
            Some(ch) if ch.is_ascii_digit() || ch == '.' || ch == '√' || ch == 's' || ch == 'S' => {
                let r = self.real()?;
                if self.eat('i') {
                    let mut c = Amplitude::new(0.0, r);
                    while self.peek() == Some('/') {
                        self.pos += 1;
                        c /= self.atom()?;
                    }
                    Ok(Some(c))
                } else {
                    Ok(Some(Amplitude::new(r, 0.0)))
                }
            }
            _ => Ok(None),
        }
    }

    fn real(&mut self) -> Result<f64, KetError> {
        let mut v = self.atom()?;
        loop {
            self.skip_ws();
            let save = self.pos;
            if self.eat('/') {
                match self.atom() {
                    Ok(d) if d != 0.0 => v /= d,
                    Ok(_) => return Err(self.error("division by zero")),
                    Err(_) => {
                        self.pos = save;
                        break;
                    }
                }
            } else {
                break;
            }
        }
        Ok(v)
    }

    fn atom(&mut self) -> Result<f64, KetError> {
        if self.eat('√') {
            let paren = self.eat('(');
            let v = self.number()?;
            if paren && !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(v.sqrt());
        }
        if self.eat_word("sqrt") {
            if !self.eat('(') {
                return Err(self.error("expected '(' after sqrt"));
            }
            let v = self.number()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(v.sqrt());
        }
        self.number()
    }

    fn number(&mut self) -> Result<f64, KetError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.')
        {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<f64>().map_err(|_| {
            self.pos = start;
            self.error("expected a number")
        })
    }

    fn ket(&mut self) -> Result<RawTerm, KetError> {
        if !self.eat('|') {
            return Err(self.error("expected '|'"));
        }
        let mut bits = Vec::new();
        while let Some(&c) = self.chars.get(self.pos) {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => break,
            }
            self.pos += 1;
        }
        if bits.is_empty() {
            return Err(self.error("ket label must be a string of 0 and 1"));
        }
        match self.chars.get(self.pos) {
            Some('⟩') | Some('>') | Some('〉') => {
                self.pos += 1;
                Ok((Amplitude::new(1.0, 0.0), bits))
            }
            _ => Err(self.error("expected a closing '⟩'")),
        }
    }
}
