use crate::docmodel::{Span, Token};

use super::Gazetteer;

/// Splits on whitespace and punctuation. Numbers keep internal `,`/`.`
/// (`1,518`, `2.3`), clock times keep their colon, words keep internal
/// apostrophes and hyphens, and `a/b` stays whole when it is a unit form or
/// both halves are.
pub fn tokenize(text: &str, gaz: &Gazetteer) -> Vec<Token> {
    scan(text, Some(gaz))
}

/// [`tokenize`] without slash-compound handling.
pub fn tokenize_plain(text: &str) -> Vec<Token> {
    scan(text, None)
}

fn scan(text: &str, gaz: Option<&Gazetteer>) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let end = if c.is_ascii_digit() {
            scan_number(&chars, i)
        } else if c.is_alphanumeric() {
            let w = scan_word(&chars, i);
            match gaz {
                Some(g) if chars.get(w).is_some_and(|&(_, c)| c == '/') => {
                    let w2 = if chars.get(w + 1).is_some_and(|&(_, c)| c.is_alphanumeric()) {
                        scan_word(&chars, w + 1)
                    } else {
                        w + 1
                    };
                    let left = &text[byte_at(start)..byte_at(w)];
                    let right = &text[byte_at(w + 1)..byte_at(w2)];
                    let whole = &text[byte_at(start)..byte_at(w2)];
                    if w2 > w + 1 && (g.is_unit(whole) || (g.is_unit(left) && g.is_unit(right))) {
                        w2
                    } else {
                        w
                    }
                }
                _ => w,
            }
        } else {
            i + 1
        };
        let (b0, b1) = (byte_at(start), byte_at(end));
        out.push(Token { text: text[b0..b1].to_owned(), span: Span(b0, b1), pos: String::new() });
        i = end;
    }
    out
}

fn scan_number(chars: &[(usize, char)], mut i: usize) -> usize {
    let digit = |j: usize| chars.get(j).is_some_and(|&(_, c)| c.is_ascii_digit());
    let run = |mut j: usize| {
        while digit(j) {
            j += 1;
        }
        j
    };
    let first = run(i);
    // clock time 10:30
    if first - i <= 2 && chars.get(first).is_some_and(|&(_, c)| c == ':') && digit(first + 1) && digit(first + 2) && !digit(first + 3) {
        return first + 3;
    }
    i = first;
    while chars.get(i).is_some_and(|&(_, c)| c == ',' || c == '.') && digit(i + 1) {
        i = run(i + 1);
    }
    i
}

fn scan_word(chars: &[(usize, char)], mut i: usize) -> usize {
    let alnum = |j: usize| chars.get(j).is_some_and(|&(_, c)| c.is_alphanumeric());
    while alnum(i) {
        i += 1;
        if chars.get(i).is_some_and(|&(_, c)| matches!(c, '-' | '\'' | '’')) && alnum(i + 1) {
            i += 1;
        }
    }
    i
}
