//! Pattern and gazetteer entity recognition for the seven entity kinds.

use crate::docmodel::{Entity, EntityKind, Sentence, Span, Token};

use super::pos::is_numeric;
use super::value::scale_exponent;
use super::Gazetteer;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    kind: EntityKind,
    first: usize,
    last: usize,
    from_pattern: bool,
}

fn is_year(t: &str) -> bool {
    t.len() == 4 && t.bytes().all(|b| b.is_ascii_digit()) && matches!(t.parse::<u32>(), Ok(1900..=2099))
}

fn is_day(t: &str) -> bool {
    t.len() <= 2 && t.bytes().all(|b| b.is_ascii_digit()) && matches!(t.parse::<u32>(), Ok(1..=31))
}

fn is_clock(t: &str) -> bool {
    t.split_once(':').is_some_and(|(h, m)| {
        h.len() <= 2 && m.len() == 2 && h.bytes().chain(m.bytes()).all(|b| b.is_ascii_digit())
    })
}

fn is_meridiem(t: &str) -> bool {
    matches!(t.to_ascii_lowercase().as_str(), "am" | "pm" | "a.m" | "p.m")
}

fn capitalized(t: &str) -> bool {
    t.chars().next().is_some_and(char::is_uppercase)
}

fn pattern_candidates(toks: &[Token], gaz: &Gazetteer, out: &mut Vec<Candidate>) {
    let text = |i: usize| toks.get(i).map_or("", |t| t.text.as_str());
    let mut push = |kind, first, last| out.push(Candidate { kind, first, last, from_pattern: true });
    for i in 0..toks.len() {
        let t = text(i);
        if is_numeric(t) {
            // PERCENT: number + % / percent / per cent
            let next = text(i + 1).to_ascii_lowercase();
            if next == "%" || next == "percent" {
                push(EntityKind::Percent, i, i + 1);
            } else if next == "per" && text(i + 2).eq_ignore_ascii_case("cent") {
                push(EntityKind::Percent, i, i + 2);
            }
        }
        // MONEY: currency symbol + number (+ scale word)
        if matches!(t, "$" | "€" | "£") && is_numeric(text(i + 1)) {
            let last = if scale_exponent(text(i + 2)).is_some() { i + 2 } else { i + 1 };
            push(EntityKind::Money, i, last);
        }
        if is_year(t) {
            push(EntityKind::Date, i, i);
        }
        // DATE: [day] Month [day][,] [year]
        if capitalized(t) && gaz.is_month(t) {
            let first = if i > 0 && is_day(text(i - 1)) { i - 1 } else { i };
            let mut last = i;
            if is_day(text(last + 1)) {
                last += 1;
            }
            if is_year(text(last + 1)) {
                last += 1;
            } else if text(last + 1) == "," && is_year(text(last + 2)) && last > i {
                last += 2;
            }
            push(EntityKind::Date, first, last);
        }
        // TIME: clock pattern [am|pm], bare hour + am|pm, time words
        if is_clock(t) {
            let last = if is_meridiem(text(i + 1)) { i + 1 } else { i };
            push(EntityKind::Time, i, last);
        } else if t.len() <= 2 && t.bytes().all(|b| b.is_ascii_digit()) && !t.is_empty() && is_meridiem(text(i + 1)) {
            push(EntityKind::Time, i, i + 1);
        } else if gaz.is_time_word(t) {
            push(EntityKind::Time, i, i);
        }
    }
}

fn gazetteer_candidates(toks: &[Token], gaz: &Gazetteer, out: &mut Vec<Candidate>) {
    let lists = [
        (EntityKind::Location, &gaz.locations),
        (EntityKind::Organization, &gaz.organizations),
        (EntityKind::Person, &gaz.persons),
    ];
    let words: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
    for i in 0..words.len() {
        for (kind, list) in &lists {
            if let Some(n) = list.longest_match(&words[i..]) {
                out.push(Candidate { kind: *kind, first: i, last: i + n - 1, from_pattern: false });
            }
        }
    }
}

/// Recognizes entities in a tokenized sentence. Overlaps resolve to the
/// longest span first, then pattern rules over gazetteer hits, then the
/// earlier start. Returned entities are ordered by position.
pub fn ner(sentence: &Sentence, gaz: &Gazetteer) -> Vec<Entity> {
    let toks = &sentence.tokens;
    let mut cands = Vec::new();
    pattern_candidates(toks, gaz, &mut cands);
    gazetteer_candidates(toks, gaz, &mut cands);

    let span = |c: &Candidate| Span(toks[c.first].span.start(), toks[c.last].span.end());
    cands.sort_by(|a, b| {
        span(b)
            .len()
            .cmp(&span(a).len())
            .then(b.from_pattern.cmp(&a.from_pattern))
            .then(a.first.cmp(&b.first))
            .then(a.kind.cmp(&b.kind))
    });
    let mut taken: Vec<Entity> = Vec::new();
    for c in &cands {
        let s = span(c);
        if taken.iter().all(|e| !e.span.overlaps(s)) {
            taken.push(Entity { kind: c.kind, text: s.slice(&sentence.text).to_owned(), span: s });
        }
    }
    taken.sort_by_key(|e| e.span);
    taken
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::DocId;
    use crate::nlp::analyze_sentence;
    use crate::nlp::gazetteer::GazetteerFile;
    use proptest::prelude::*;

    fn run(text: &str, gaz: &Gazetteer) -> Vec<(EntityKind, String)> {
        let s = analyze_sentence(DocId::new("D"), 0, text, gaz);
        ner(&s, gaz).into_iter().map(|e| (e.kind, e.text)).collect()
    }

    #[test]
    fn location_and_year() {
        let g = Gazetteer::builtin();
        assert_eq!(
            run("in Australia during 2016", &g),
            [(EntityKind::Location, "Australia".into()), (EntityKind::Date, "2016".into())]
        );
    }

    #[test]
    fn percent_money_time_date() {
        let g = Gazetteer::builtin();
        assert_eq!(run("63%", &g), [(EntityKind::Percent, "63%".into())]);
        assert_eq!(run("12 per cent", &g), [(EntityKind::Percent, "12 per cent".into())]);
        assert_eq!(run("worth $2.1 billion", &g), [(EntityKind::Money, "$2.1 billion".into())]);
        assert_eq!(run("at 10:30 am each morning", &g), [
            (EntityKind::Time, "10:30 am".into()),
            (EntityKind::Time, "morning".into()),
        ]);
        assert_eq!(run("on 12 March 2016", &g), [(EntityKind::Date, "12 March 2016".into())]);
        assert_eq!(run("by March 12, 2016", &g), [(EntityKind::Date, "March 12, 2016".into())]);
        assert!(run("growers may plant 1,518 ha", &g).is_empty());
        assert!(run("in 2150", &g).is_empty());
    }

    #[test]
    fn longest_gazetteer_match_wins() {
        let g = Gazetteer::builtin();
        assert_eq!(run("New South Wales", &g), [(EntityKind::Location, "New South Wales".into())]);
        assert_eq!(run("Cotton Australia said", &g), [(EntityKind::Organization, "Cotton Australia".into())]);
    }

    /// Brute-force oracle: every (start, length) whose words form a term.
    fn all_phrase_matches(words: &[&str], terms: &[&str]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..words.len() {
            for n in 1..=words.len() - i {
                let phrase = words[i..i + n].join(" ").to_lowercase();
                if terms.iter().any(|t| t.to_lowercase() == phrase) {
                    out.push((i, n));
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn gazetteer_matches_agree_with_oracle(picks in proptest::collection::vec(0usize..6, 0..10)) {
            let vocab = ["new", "south", "wales", "river", "basin", "x"];
            let terms = ["New South Wales", "Wales", "South", "river basin", "Wales river"];
            let file = GazetteerFile {
                locations: terms.iter().map(|s| s.to_string()).collect(),
                ..Default::default()
            };
            let g = Gazetteer::from_file(&file).unwrap();
            let words: Vec<&str> = picks.iter().map(|&i| vocab[i]).collect();
            let s = analyze_sentence(DocId::new("D"), 0, &words.join(" "), &g);
            let ents = ner(&s, &g);
            // entities never overlap
            for w in ents.windows(2) {
                prop_assert!(w[0].span.end() <= w[1].span.start());
            }
            for e in &ents {
                prop_assert!(terms.iter().any(|t| t.eq_ignore_ascii_case(&e.text)));
            }
            // the longest phrase anywhere in the sentence is always chosen
            let oracle = all_phrase_matches(&words, &terms);
            prop_assert_eq!(ents.is_empty(), oracle.is_empty());
            if let Some(max) = oracle.iter().map(|(_, n)| *n).max() {
                let got = ents.iter().map(|e| e.text.split(' ').count()).max().unwrap_or(0);
                prop_assert!(got >= max);
            }
        }
    }
}
