use crate::nlp::tokenize_plain;

/// Lowercases, splits like the NLP tokenizer, drops punctuation other than
/// `%` and `$`, strips digit grouping, and optionally folds plurals.
pub fn analyze(text: &str, stem: bool) -> Vec<String> {
    tokenize_plain(text)
        .into_iter()
        .filter_map(|t| {
            let lower = t.text.to_lowercase();
            let keep = lower.chars().any(char::is_alphanumeric) || lower == "%" || lower == "$";
            if !keep {
                return None;
            }
            if lower.starts_with(|c: char| c.is_ascii_digit()) {
                return Some(lower.replace(',', ""));
            }
            Some(if stem { fold_plural(&lower) } else { lower })
        })
        .collect()
}

/// Deliberately small plural folding: `-ies` → `-y`, `-(s|x|ch|sh)es` → stem,
/// other `-s` (not `-ss`) dropped.
pub fn fold_plural(word: &str) -> String {
    if word.len() <= 3 || !word.ends_with('s') || word.ends_with("ss") {
        return word.to_owned();
    }
    if let Some(stem) = word.strip_suffix("ies") {
        return format!("{stem}y");
    }
    if let Some(stem) = word.strip_suffix("es") {
        if ["s", "x", "ch", "sh"].iter().any(|e| stem.ends_with(e)) {
            return stem.to_owned();
        }
    }
    word[..word.len() - 1].to_owned()
}
