//! Rule-based sentence segmentation.

use crate::docmodel::Span;

/// Lowercased tokens that end in a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "approx", "e.g", "i.e", "cf", "mr", "mrs", "ms", "dr", "prof", "st", "vs", "fig", "figs", "ca", "inc", "ltd",
    "co", "corp", "dept", "est", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov",
    "dec", "vol", "pp", "avg", "max", "min", "tab", "eq", "al", "u.s", "a.m", "resp", "incl", "govt",
];

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '”' | '’')
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Whether the period ending `word` (which excludes the period) is an
/// abbreviation rather than a sentence end. `next` is the first character
/// of the following word.
fn is_abbreviation(word: &str, next: char) -> bool {
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // "No. 5"
    if lower == "no" && next.is_ascii_digit() {
        return true;
    }
    // single-letter initials such as "J. Smith"
    let mut chars = word.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if c.is_uppercase())
}

/// Byte spans of the sentences in `text`. Spans are trimmed and never
/// empty; everything outside them is whitespace.
pub fn segment_spans(text: &str) -> Vec<Span> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < chars.len() {
        let (b, c) = chars[i];
        if start.is_none() {
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            start = Some(b);
        }
        if !is_terminal(c) {
            i += 1;
            continue;
        }
        let mut end = i + 1;
        while end < chars.len() && (is_terminal(chars[end].1) || is_closer(chars[end].1)) {
            end += 1;
        }
        if end < chars.len() && !chars[end].1.is_whitespace() {
            i = end;
            continue;
        }
        let next = chars[end..].iter().map(|&(_, c)| c).find(|c| !c.is_whitespace());
        let boundary = match next {
            None => true,
            Some(n) if n.is_lowercase() => false,
            Some(n) if c == '.' && end == i + 1 => {
                let s = start.unwrap();
                let word_start = text[s..b].rfind(char::is_whitespace).map_or(s, |p| s + p + 1);
                !is_abbreviation(&text[word_start..b], n)
            }
            Some(_) => true,
        };
        if boundary {
            spans.push(Span(start.take().unwrap(), byte_at(end)));
        }
        i = end;
    }
    if let Some(s) = start {
        let trimmed = text[s..].trim_end();
        spans.push(Span(s, s + trimmed.len()));
    }
    spans
}

/// Splits `text` into sentences on sentence-final punctuation, guarding
/// abbreviations, initials and decimal numbers.
pub fn segment_sentences(text: &str) -> Vec<String> {
    segment_spans(text).into_iter().map(|s| s.slice(text).to_owned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(segment_sentences("A rose. A bale."), ["A rose.", "A bale."]);
        assert_eq!(segment_sentences("Approx. 1,518 ha planted."), ["Approx. 1,518 ha planted."]);
        assert!(segment_sentences("").is_empty());
        assert!(segment_sentences("   ").is_empty());
    }

    #[test]
    fn guards() {
        assert_eq!(segment_sentences("Yield was 2.5 bales. Next year?"), ["Yield was 2.5 bales.", "Next year?"]);
        assert_eq!(segment_sentences("See Fig. 2 for details. Done"), ["See Fig. 2 for details.", "Done"]);
        assert_eq!(segment_sentences("Written by J. Smith in 2016."), ["Written by J. Smith in 2016."]);
        assert_eq!(segment_sentences("He said \"stop.\" Then left!"), ["He said \"stop.\"", "Then left!"]);
        assert_eq!(segment_sentences("e.g. cotton. Wheat."), ["e.g. cotton.", "Wheat."]);
        assert_eq!(segment_sentences("Growth was strong. and then"), ["Growth was strong. and then"]);
        assert_eq!(segment_sentences("Really?! Yes."), ["Really?!", "Yes."]);
    }

    proptest! {
        #[test]
        fn sentences_and_separators_reproduce_input(s in "[A-Za-z0-9 .,!?\n]{0,80}") {
            let spans = segment_spans(&s);
            let mut pos = 0;
            for sp in &spans {
                prop_assert!(sp.end() > sp.start());
                prop_assert!(s[pos..sp.start()].chars().all(char::is_whitespace));
                let sent = sp.slice(&s);
                prop_assert_eq!(sent.trim(), sent);
                pos = sp.end();
            }
            prop_assert!(s[pos..].chars().all(char::is_whitespace));
        }
    }
}
