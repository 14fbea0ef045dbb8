//! Lexicon and suffix-rule POS tagger (Penn tag set).
//!
//! Order of precedence: closed-class lexicon, unit gazetteer, numeric
//! pattern, suffix rules, default `NN`.

use crate::docmodel::Token;

use super::Gazetteer;

const LEXICON: &[(&str, &[&str])] = &[
    ("DT", &["the", "a", "an", "this", "that", "these", "those", "each", "every", "some", "any", "no", "all", "both", "another"]),
    (
        "IN",
        &[
            "of", "in", "on", "at", "per", "for", "from", "by", "with", "during", "over", "under", "between", "into",
            "across", "since", "than", "about", "after", "before", "through", "within", "without", "among", "against",
            "upon", "via", "including", "toward", "towards", "around", "throughout", "while", "because", "if",
        ],
    ),
    ("TO", &["to"]),
    ("CC", &["and", "or", "but", "nor"]),
    ("PRP", &["i", "we", "you", "he", "she", "it", "they", "them", "us", "him", "her"]),
    ("PRP$", &["its", "their", "our", "his", "my", "your"]),
    ("MD", &["will", "would", "can", "could", "may", "might", "shall", "should", "must"]),
    ("VB", &["be"]),
    ("VBZ", &["is", "has", "does"]),
    ("VBP", &["are", "have", "do"]),
    // Finite forms of the change verbs that typically separate an indicator
    // phrase from its reported value.
    (
        "VBD",
        &[
            "was", "were", "had", "did", "increased", "decreased", "rose", "fell", "declined", "grew", "dropped",
            "remained", "totalled", "totaled", "averaged", "climbed", "doubled", "halved",
        ],
    ),
    ("VBN", &["been"]),
    ("VBG", &["being"]),
    ("WDT", &["which", "whichever"]),
    ("WP", &["who", "what", "whom"]),
    ("WRB", &["where", "when", "how", "why"]),
    ("EX", &["there"]),
    ("RB", &["not", "also", "very", "only", "approximately", "approx", "nearly", "almost", "just", "still"]),
    ("CD", &["thousand", "million", "billion"]),
];

fn lexicon_tag(lower: &str) -> Option<&'static str> {
    LEXICON.iter().find(|(_, words)| words.contains(&lower)).map(|(tag, _)| *tag)
}

fn punctuation_tag(text: &str) -> Option<&'static str> {
    let mut chars = text.chars();
    let c = chars.next()?;
    if chars.next().is_some() || c.is_alphanumeric() || c == '%' {
        return None;
    }
    Some(match c {
        '.' | '!' | '?' => ".",
        ',' => ",",
        ':' | ';' => ":",
        '(' | '[' | '{' => "-LRB-",
        ')' | ']' | '}' => "-RRB-",
        '$' | '€' | '£' => "$",
        '"' | '“' | '”' | '\'' | '‘' | '’' => "''",
        '#' => "#",
        _ => "SYM",
    })
}

pub(crate) fn is_numeric(text: &str) -> bool {
    let b = text.as_bytes();
    !b.is_empty()
        && b[0].is_ascii_digit()
        && b[b.len() - 1].is_ascii_digit()
        && b.iter().all(|c| c.is_ascii_digit() || *c == b',' || *c == b'.')
}

fn looks_plural(lower: &str) -> bool {
    lower.len() > 3 && lower.ends_with('s') && !lower.ends_with("ss")
}

/// Tag of a single word.
pub fn tag_word(word: &str, gaz: &Gazetteer) -> &'static str {
    if let Some(tag) = punctuation_tag(word) {
        return tag;
    }
    let lower = word.to_lowercase();
    if let Some(tag) = lexicon_tag(&lower) {
        return tag;
    }
    if gaz.is_unit(word) {
        return if looks_plural(&lower) { "NNS" } else { "NN" };
    }
    if is_numeric(word) || is_clock(word) {
        return "CD";
    }
    if lower.len() > 3 {
        if lower.ends_with("ed") {
            return "VBN";
        }
        if lower.ends_with("ing") {
            return "VBG";
        }
        if lower.ends_with("ly") {
            return "RB";
        }
    }
    if looks_plural(&lower) {
        return "NNS";
    }
    "NN"
}

fn is_clock(word: &str) -> bool {
    let Some((h, m)) = word.split_once(':') else { return false };
    !h.is_empty() && h.len() <= 2 && m.len() == 2 && h.bytes().chain(m.bytes()).all(|c| c.is_ascii_digit())
}

/// Assigns `pos` on every token.
pub fn pos_tag(tokens: &mut [Token], gaz: &Gazetteer) {
    for tok in tokens {
        tok.pos = tag_word(&tok.text, gaz).to_owned();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlp::tokenize;

    #[test]
    fn single_word_tags() {
        let g = Gazetteer::builtin();
        assert_eq!(tag_word("1,518", &g), "CD");
        assert_eq!(tag_word("planted", &g), "VBN");
        assert_eq!(tag_word("hectares", &g), "NNS");
        assert_eq!(tag_word("ha", &g), "NN");
        assert_eq!(tag_word("%", &g), "NN");
        assert_eq!(tag_word("slightly", &g), "RB");
        assert_eq!(tag_word("The", &g), "DT");
        assert_eq!(tag_word(".", &g), ".");
        assert_eq!(tag_word("growing", &g), "VBG");
        assert_eq!(tag_word("cotton", &g), "NN");
        assert_eq!(tag_word("Exports", &g), "NNS");
        assert_eq!(tag_word("class", &g), "NN");
    }

    #[test]
    fn paper_sentence_tags() {
        let g = Gazetteer::builtin();
        let mut toks = tokenize(
            "The average hectares planted per participant increased slightly 1,518 hectares.",
            &g,
        );
        pos_tag(&mut toks, &g);
        let tags: Vec<&str> = toks.iter().map(|t| t.pos.as_str()).collect();
        assert_eq!(tags, ["DT", "NN", "NNS", "VBN", "IN", "NN", "VBD", "RB", "CD", "NNS", "."]);
    }
}
