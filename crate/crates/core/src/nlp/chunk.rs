//! Regular-expression chunking over POS-tag sequences.
//!
//! Each rule is compiled to a [`regex::Regex`] that runs over an encoding of
//! the sentence where every token becomes `STX tag US word US flag ETX`. The
//! flag is `U` for unit surface forms, `-` otherwise, which lets INDICATOR
//! captures exclude units without touching the tag set.

use std::fmt::Write as _;
use std::path::Path;

use regex::Regex;

use crate::docmodel::{Entity, ExtractionRecord, RecordSpans, Sentence, Span};

use super::value::{normalize_value, scale_exponent};
use super::{Gazetteer, NlpError};

const TOK_START: char = '\u{2}';
const TOK_END: char = '\u{3}';
const SEP: char = '\u{1f}';

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Indicator,
    Value,
    Unit,
}

impl Slot {
    fn parse(name: &str) -> Option<Slot> {
        match name {
            "INDICATOR" => Some(Slot::Indicator),
            "VALUE" => Some(Slot::Value),
            "UNIT" => Some(Slot::Unit),
            _ => None,
        }
    }

    fn group(self) -> &'static str {
        match self {
            Slot::Indicator => "INDICATOR",
            Slot::Value => "VALUE",
            Slot::Unit => "UNIT",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChunkRule {
    pub name: String,
    pub source: String,
    regex: Regex,
}

impl ChunkRule {
    /// Compiles one rule body, e.g.
    /// `(INDICATOR:(NN|NNS){1,6}) (VB.?|RB)* (VALUE:CD) (UNIT:NN|NNS|%)`.
    pub fn compile(name: &str, body: &str) -> Result<Self, NlpError> {
        let err = |msg: String| NlpError::Grammar(format!("rule {name}: {msg}"));
        let mut parser = RuleParser { src: body, pos: 0, counts: [0; 3] };
        let pattern = parser.sequence(None, false).map_err(err)?;
        if parser.pos < body.len() {
            return Err(err(format!("unexpected `{}` at {}", &body[parser.pos..], parser.pos)));
        }
        let [ind, val, unit] = parser.counts;
        if val != 1 {
            return Err(err(format!("VALUE must be captured exactly once, found {val}")));
        }
        if ind > 1 || unit > 1 {
            return Err(err("INDICATOR and UNIT may be captured at most once".into()));
        }
        let regex = Regex::new(&pattern).map_err(|e| err(e.to_string()))?;
        Ok(Self { name: name.to_owned(), source: body.trim().to_owned(), regex })
    }
}

struct RuleParser<'a> {
    src: &'a str,
    pos: usize,
    counts: [usize; 3],
}

impl RuleParser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// Sequence of elements up to `)` or end of input.
    fn sequence(&mut self, slot: Option<Slot>, nested: bool) -> Result<String, String> {
        let mut out = String::new();
        loop {
            self.skip_ws();
            if self.rest().is_empty() {
                if nested {
                    return Err("unbalanced `(`".into());
                }
                break;
            }
            if self.rest().starts_with(')') {
                if !nested {
                    return Err("unbalanced `)`".into());
                }
                break;
            }
            out.push_str(&self.element(slot)?);
        }
        if out.is_empty() {
            return Err("empty sequence".into());
        }
        Ok(out)
    }

    fn element(&mut self, slot: Option<Slot>) -> Result<String, String> {
        let atom = if self.eat('(') {
            let rest = self.rest();
            let capture = rest.find(':').filter(|&i| {
                rest[..i].chars().all(|c| c.is_ascii_uppercase()) && Slot::parse(&rest[..i]).is_some()
            });
            if let Some(i) = capture {
                let s = Slot::parse(&rest[..i]).unwrap();
                if slot.is_some() {
                    return Err("captures cannot nest".into());
                }
                self.pos += i + 1;
                self.counts[s as usize] += 1;
                let inner = self.sequence(Some(s), true)?;
                if !self.eat(')') {
                    return Err("unbalanced `(`".into());
                }
                format!("(?P<{}>{inner})", s.group())
            } else {
                let inner = self.sequence(slot, true)?;
                if !self.eat(')') {
                    return Err("unbalanced `(`".into());
                }
                format!("(?:{inner})")
            }
        } else {
            let end = self
                .rest()
                .find(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | '{' | '*' | '+'))
                .unwrap_or(self.rest().len());
            let mut word = self.rest()[..end].to_owned();
            // a trailing `?` is a quantifier unless it is part of a tag pattern like `VB.?`
            if word.ends_with('?') && !word.ends_with(".?") && word.len() > 1 {
                word.pop();
            }
            if word.is_empty() {
                return Err(format!("expected an element at `{}`", self.rest()));
            }
            self.pos += word.len();
            alternation(&word, slot)?
        };
        Ok(format!("{atom}{}", self.quantifier()?))
    }

    fn quantifier(&mut self) -> Result<String, String> {
        let mut q = String::new();
        if self.eat('*') {
            q.push('*');
        } else if self.eat('+') {
            q.push('+');
        } else if self.eat('?') {
            q.push('?');
        } else if self.rest().starts_with('{') {
            let close = self.rest().find('}').ok_or("unterminated `{`")?;
            let body = &self.rest()[1..close];
            let valid = body.split(',').count() <= 2
                && body.split(',').all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()));
            if !valid {
                return Err(format!("bad repetition `{{{body}}}`"));
            }
            q = format!("{{{body}}}");
            self.pos += close + 1;
        }
        if !q.is_empty() && self.eat('?') {
            q.push('?');
        }
        Ok(q)
    }
}

/// One token matching any of the `|`-separated alternatives.
fn alternation(spec: &str, slot: Option<Slot>) -> Result<String, String> {
    let flag = if slot == Some(Slot::Indicator) { "-" } else { "[U-]" };
    let mut alts = Vec::new();
    for alt in spec.split('|') {
        if alt.is_empty() {
            return Err(format!("empty alternative in `{spec}`"));
        }
        let is_tag = alt.starts_with(|c: char| c.is_ascii_uppercase());
        let pat = if is_tag {
            let mut tag = String::new();
            for c in alt.chars() {
                match c {
                    '.' => tag.push_str("[^\u{1f}]"),
                    '?' | '*' | '+' => tag.push(c),
                    c if c.is_ascii_alphanumeric() => tag.push(c),
                    c => {
                        let _ = write!(tag, "{}", regex::escape(&c.to_string()));
                    }
                }
            }
            format!("(?:{tag}){SEP}[^{SEP}]*")
        } else {
            format!("[^{SEP}]*{SEP}{}", regex::escape(&alt.to_lowercase()))
        };
        alts.push(pat);
    }
    Ok(format!("{TOK_START}(?:{}){SEP}{flag}{TOK_END}", alts.join("|")))
}

/// Ordered list of chunk rules.
#[derive(Debug, Clone)]
pub struct ChunkGrammar {
    pub rules: Vec<ChunkRule>,
}

impl ChunkGrammar {
    /// Parses `NAME: body` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, NlpError> {
        let mut rules = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, body) = line
                .split_once(':')
                .ok_or_else(|| NlpError::Grammar(format!("missing rule name in `{line}`")))?;
            rules.push(ChunkRule::compile(name.trim(), body)?);
        }
        if rules.is_empty() {
            return Err(NlpError::Grammar("grammar has no rules".into()));
        }
        Ok(Self { rules })
    }

    pub fn load(path: &Path) -> Result<Self, NlpError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| NlpError::Grammar(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The grammar shipped in `resources/grammar.txt`.
    pub fn builtin() -> Self {
        Self::parse(include_str!("../../resources/grammar.txt")).expect("builtin grammar compiles")
    }
}

/// A token (or merged token group) as seen by the chunk rules.
#[derive(Debug)]
struct MatchToken {
    tag: String,
    word: String,
    is_unit: bool,
    /// Index range into the sentence tokens.
    first: usize,
    last: usize,
}

/// Merges `number + scale word` into one CD token and multi-word unit forms
/// into one noun token.
fn match_tokens(sentence: &Sentence, gaz: &Gazetteer) -> Vec<MatchToken> {
    let toks = &sentence.tokens;
    let mut out = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        let t = &toks[i];
        if t.pos == "CD" && super::pos::is_numeric(&t.text) {
            if let Some(next) = toks.get(i + 1) {
                if scale_exponent(&next.text).is_some() {
                    out.push(MatchToken {
                        tag: "CD".into(),
                        word: format!("{} {}", t.text, next.text.to_lowercase()),
                        is_unit: false,
                        first: i,
                        last: i + 1,
                    });
                    i += 2;
                    continue;
                }
            }
        }
        let words: Vec<&str> = toks[i..].iter().take(6).map(|t| t.text.as_str()).collect();
        if let Some(n) = gaz.multiword_unit(&words) {
            let last = &toks[i + n - 1];
            out.push(MatchToken {
                tag: last.pos.clone(),
                word: words[..n].join(" ").to_lowercase(),
                is_unit: true,
                first: i,
                last: i + n - 1,
            });
            i += n;
            continue;
        }
        out.push(MatchToken {
            tag: t.pos.clone(),
            word: t.text.to_lowercase(),
            is_unit: gaz.is_unit(&t.text),
            first: i,
            last: i,
        });
        i += 1;
    }
    out
}

fn encode(tokens: &[MatchToken]) -> (String, Vec<usize>) {
    let mut s = String::new();
    let mut starts = Vec::with_capacity(tokens.len());
    for t in tokens {
        starts.push(s.len());
        let clean = |x: &str| x.replace(|c: char| c.is_control(), "?");
        s.push(TOK_START);
        s.push_str(&clean(&t.tag));
        s.push(SEP);
        s.push_str(&clean(&t.word));
        s.push(SEP);
        s.push(if t.is_unit { 'U' } else { '-' });
        s.push(TOK_END);
    }
    (s, starts)
}

/// Applies the rules in order. The first match claiming a VALUE token wins;
/// a sentence may yield one record per distinct VALUE token. Every record
/// carries the sentence's entities.
pub fn chunk_extract(
    sentence: &Sentence,
    grammar: &ChunkGrammar,
    gaz: &Gazetteer,
    entities: &[Entity],
) -> Vec<ExtractionRecord> {
    let mtoks = match_tokens(sentence, gaz);
    if !mtoks.iter().any(|t| t.tag == "CD") {
        return Vec::new();
    }
    let (encoded, starts) = encode(&mtoks);
    let token_at = |byte: usize| starts.partition_point(|&s| s <= byte) - 1;
    let span_of = |range: regex::Match<'_>| {
        let (a, b) = (token_at(range.start()), token_at(range.end() - 1));
        let first = &sentence.tokens[mtoks[a].first];
        let last = &sentence.tokens[mtoks[b].last];
        (a, b, Span(first.span.start(), last.span.end()))
    };

    let mut claimed: Vec<(usize, ExtractionRecord)> = Vec::new();
    for rule in &grammar.rules {
        let mut pos = 0;
        while let Some(caps) = rule.regex.captures_at(&encoded, pos) {
            let value_m = caps.name("VALUE").expect("VALUE is mandatory");
            let (vi, _, value_span) = span_of(value_m);
            pos = starts.get(vi + 1).copied().unwrap_or(encoded.len());
            if claimed.iter().any(|(i, _)| *i == vi) || mtoks[vi].tag != "CD" {
                continue;
            }
            let Ok(value) = normalize_value(value_span.slice(&sentence.text)) else {
                continue;
            };
            let Some(ind_m) = caps.name("INDICATOR") else { continue };
            let (_, _, ind_span) = span_of(ind_m);
            let indicator = ind_span.slice(&sentence.text).trim().to_owned();
            if indicator.is_empty() {
                continue;
            }
            let (unit, unit_unmatched, unit_span) = match caps.name("UNIT") {
                Some(m) => {
                    let (ui, _, span) = span_of(m);
                    let raw = span.slice(&sentence.text);
                    match gaz.canonical_unit(&mtoks[ui].word) {
                        Some(c) => (c.to_owned(), false, span),
                        None => (raw.to_owned(), true, span),
                    }
                }
                None => (String::new(), true, Span(value_span.end(), value_span.end())),
            };
            claimed.push((
                vi,
                ExtractionRecord {
                    sentence_ref: sentence.sentence_ref(),
                    indicator_phrase: indicator,
                    value,
                    unit,
                    unit_unmatched,
                    entities: entities.to_vec(),
                    spans: Some(RecordSpans { indicator: ind_span, value: value_span, unit: unit_span }),
                },
            ));
        }
    }
    claimed.sort_by_key(|(i, _)| *i);
    claimed.into_iter().map(|(_, r)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::DocId;
    use crate::nlp::analyze_sentence;
    use rust_decimal::Decimal;

    fn extract(text: &str) -> Vec<ExtractionRecord> {
        let g = Gazetteer::builtin();
        let s = analyze_sentence(DocId::new("D"), 0, text, &g);
        chunk_extract(&s, &ChunkGrammar::builtin(), &g, &[])
    }

    #[test]
    fn reproduces_the_hectares_example() {
        let recs = extract("The average hectares planted per participant increased slightly 1,518 hectares.");
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].indicator_phrase, "planted per participant");
        assert_eq!(recs[0].value, Decimal::from(1518));
        assert_eq!(recs[0].unit, "hectares");
        assert!(!recs[0].unit_unmatched);
    }

    #[test]
    fn no_numbers_no_records() {
        assert!(extract("No numbers here.").is_empty());
    }

    #[test]
    fn scale_words_fold_into_value() {
        let recs = extract("Exports reached 2.3 million tonnes in 2016.");
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].indicator_phrase, "Exports reached");
        assert_eq!(recs[0].value, Decimal::from(2_300_000));
        assert_eq!(recs[0].unit, "tonnes");
    }

    #[test]
    fn value_unit_of_indicator_rule() {
        let recs = extract("In 2016, 1,200 hectares of dryland cotton were planted.");
        assert_eq!(recs.len(), 1, "{recs:?}");
        // no indicator-class token directly precedes 1,200, so only R2 applies
        assert_eq!(recs[0].indicator_phrase, "dryland cotton");
        assert_eq!(recs[0].value, Decimal::from(1200));
        assert_eq!(recs[0].unit, "hectares");
    }

    #[test]
    fn unknown_unit_is_flagged_raw() {
        let recs = extract("Participating farms grew 12 growers.");
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].unit, "growers");
        assert!(recs[0].unit_unmatched);
    }

    #[test]
    fn multiple_triples_per_sentence() {
        let recs = extract("Irrigated area increased 300 ha and dryland area fell 120 ha.");
        let got: Vec<(&str, String)> =
            recs.iter().map(|r| (r.indicator_phrase.as_str(), r.value.to_string())).collect();
        assert_eq!(got, [("Irrigated area", "300".to_owned()), ("dryland area", "120".to_owned())]);
    }

    #[test]
    fn percent_and_multiword_units() {
        let recs = extract("Crop rotation adoption reached 63 %.");
        assert_eq!(recs[0].unit, "%");
        let recs = extract("Total production reached 4.6 metric tonnes.");
        assert_eq!(recs[0].unit, "metric tonnes");
        assert_eq!(recs[0].value.to_string(), "4.6");
    }

    #[test]
    fn grammar_errors() {
        assert!(ChunkGrammar::parse("R: (INDICATOR:NN) (UNIT:NN)").is_err());
        assert!(ChunkGrammar::parse("R: (VALUE:CD) (VALUE:CD)").is_err());
        assert!(ChunkGrammar::parse("R: (VALUE:CD").is_err());
        assert!(ChunkGrammar::parse("R: (VALUE:CD) NN{x}").is_err());
        assert!(ChunkGrammar::parse("# only comments\n").is_err());
        assert!(ChunkGrammar::parse("R: (INDICATOR:NN+?) (VALUE:CD) (UNIT:NN)").is_ok());
    }
}
