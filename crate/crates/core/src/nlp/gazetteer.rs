use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::NlpError;

/// On-disk gazetteer layout.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GazetteerFile {
    /// Canonical unit name to its surface forms.
    pub units: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub locations: Vec<String>,
    #[serde(default)]
    pub organizations: Vec<String>,
    #[serde(default)]
    pub persons: Vec<String>,
    #[serde(default)]
    pub month_names: Vec<String>,
    #[serde(default)]
    pub time_words: Vec<String>,
}

/// Multi-word term list with longest-match lookup over lowercased tokens.
#[derive(Debug, Clone, Default)]
pub struct TermList {
    /// first token -> candidate token sequences, longest first
    by_first: HashMap<String, Vec<Vec<String>>>,
}

impl TermList {
    fn new(terms: &[String]) -> Self {
        let mut by_first: HashMap<String, Vec<Vec<String>>> = HashMap::new();
        for term in terms {
            let words = split_term(term);
            if let Some(first) = words.first() {
                by_first.entry(first.clone()).or_default().push(words);
            }
        }
        for seqs in by_first.values_mut() {
            seqs.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            seqs.dedup();
        }
        Self { by_first }
    }

    /// Length in tokens of the longest term starting at `words[0]`.
    pub fn longest_match<S: AsRef<str>>(&self, words: &[S]) -> Option<usize> {
        let first = words.first()?.as_ref().to_lowercase();
        let seqs = self.by_first.get(&first)?;
        seqs.iter()
            .find(|seq| {
                seq.len() <= words.len()
                    && seq.iter().zip(words).all(|(a, b)| a.eq_ignore_ascii_case(b.as_ref()) || *a == b.as_ref().to_lowercase())
            })
            .map(Vec::len)
    }

    pub fn max_words(&self) -> usize {
        self.by_first.values().flatten().map(Vec::len).max().unwrap_or(0)
    }
}

/// Splits a gazetteer term into lowercase words the same way the tokenizer
/// would, without slash-compound handling.
fn split_term(term: &str) -> Vec<String> {
    super::tokenize::tokenize_plain(term).into_iter().map(|t| t.text.to_lowercase()).collect()
}

/// Unit, place, organization, person, month and time-word lists.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    canonical_units: Vec<String>,
    unit_forms: HashMap<String, usize>,
    multiword_units: TermList,
    pub locations: TermList,
    pub organizations: TermList,
    pub persons: TermList,
    month_names: HashSet<String>,
    time_words: HashSet<String>,
}

impl Gazetteer {
    pub fn from_file(file: &GazetteerFile) -> Result<Self, NlpError> {
        let mut canonical_units = Vec::new();
        let mut unit_forms = HashMap::new();
        let mut multi = Vec::new();
        let mut seen_canonical = HashSet::new();
        for (canonical, forms) in &file.units {
            if !seen_canonical.insert(canonical.to_lowercase()) {
                return Err(NlpError::Gazetteer(format!("duplicate canonical unit `{canonical}`")));
            }
            let idx = canonical_units.len();
            canonical_units.push(canonical.clone());
            for form in forms.iter().chain(std::iter::once(canonical)) {
                let key = form.to_lowercase();
                match unit_forms.insert(key.clone(), idx) {
                    Some(prev) if prev != idx => {
                        return Err(NlpError::Gazetteer(format!(
                            "unit form `{form}` maps to both `{}` and `{canonical}`",
                            canonical_units[prev]
                        )));
                    }
                    _ => {}
                }
                if split_term(form).len() > 1 {
                    multi.push(form.clone());
                }
            }
        }
        let lower = |v: &[String]| v.iter().map(|s| s.to_lowercase()).collect::<HashSet<_>>();
        Ok(Self {
            canonical_units,
            unit_forms,
            multiword_units: TermList::new(&multi),
            locations: TermList::new(&file.locations),
            organizations: TermList::new(&file.organizations),
            persons: TermList::new(&file.persons),
            month_names: lower(&file.month_names),
            time_words: lower(&file.time_words),
        })
    }

    pub fn load(path: &Path) -> Result<Self, NlpError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| NlpError::Gazetteer(format!("{}: {e}", path.display())))?;
        let file: GazetteerFile = serde_json::from_str(&text)
            .map_err(|e| NlpError::Gazetteer(format!("{}: {e}", path.display())))?;
        Self::from_file(&file)
    }

    /// The gazetteer shipped in `resources/gazetteer.json`.
    pub fn builtin() -> Self {
        let file: GazetteerFile =
            serde_json::from_str(include_str!("../../resources/gazetteer.json")).expect("builtin gazetteer parses");
        Self::from_file(&file).expect("builtin gazetteer is consistent")
    }

    /// Canonical unit name for a single-token surface form.
    pub fn canonical_unit(&self, form: &str) -> Option<&str> {
        self.unit_forms.get(&form.to_lowercase()).map(|&i| self.canonical_units[i].as_str())
    }

    pub fn is_unit(&self, form: &str) -> bool {
        self.unit_forms.contains_key(&form.to_lowercase())
    }

    /// Longest multi-word unit form starting at `words[0]`, in tokens.
    pub fn multiword_unit<S: AsRef<str>>(&self, words: &[S]) -> Option<usize> {
        self.multiword_units.longest_match(words)
    }

    pub fn canonical_units(&self) -> &[String] {
        &self.canonical_units
    }

    /// Canonical unit to all of its surface forms.
    pub fn unit_synonym_map(&self) -> BTreeMap<String, Vec<String>> {
        self.canonical_units
            .iter()
            .map(|c| (c.clone(), self.unit_synonyms(c).into_iter().map(str::to_owned).collect()))
            .collect()
    }

    /// Every surface form of the canonical unit `canonical` (including itself).
    pub fn unit_synonyms(&self, canonical: &str) -> Vec<&str> {
        let Some(idx) = self.canonical_units.iter().position(|c| c.eq_ignore_ascii_case(canonical)) else {
            return Vec::new();
        };
        let mut forms: Vec<&str> =
            self.unit_forms.iter().filter(|(_, &i)| i == idx).map(|(f, _)| f.as_str()).collect();
        forms.sort_unstable();
        forms
    }

    pub fn is_month(&self, word: &str) -> bool {
        self.month_names.contains(&word.to_lowercase())
    }

    pub fn is_time_word(&self, word: &str) -> bool {
        self.time_words.contains(&word.to_lowercase())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups_ignore_case() {
        let g = Gazetteer::builtin();
        assert_eq!(g.canonical_unit("HA"), Some("hectares"));
        assert_eq!(g.canonical_unit("Hectares"), Some("hectares"));
        assert_eq!(g.canonical_unit("ml"), Some("ML"));
        assert!(g.is_month("MARCH"));
        assert_eq!(g.locations.longest_match(&["new", "SOUTH", "wales", "x"]), Some(3));
    }

    #[test]
    fn duplicate_canonical_rejected() {
        let mut file = GazetteerFile::default();
        file.units.insert("ha".into(), vec![]);
        file.units.insert("HA".into(), vec![]);
        assert!(Gazetteer::from_file(&file).is_err());
    }

    #[test]
    fn synonyms_cover_forms() {
        let g = Gazetteer::builtin();
        assert_eq!(g.unit_synonyms("hectares"), vec!["ha", "hectare", "hectares"]);
        assert_eq!(g.multiword_unit(&["metric", "tonnes", "of"]), Some(2));
    }
}
