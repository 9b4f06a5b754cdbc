//! Bundled English stopword list plus file loading for user extensions.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use crate::vectorizer::tokenize;
use crate::Result;

// Standard English stopword list (NLTK's 179 entries). Contractions are
// normalized through `tokenize` at init so they match tokenizer output.
const ENGLISH_RAW: &[&str] = &[
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
    "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
    "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself", "they", "them",
    "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "that'll",
    "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
    "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
    "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above", "below", "to", "from",
    "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then", "once",
    "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
    "too", "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
    "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn",
    "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn",
    "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
    "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
    "wouldn't",
];

static ENGLISH: LazyLock<BTreeSet<String>> = LazyLock::new(|| {
    ENGLISH_RAW
        .iter()
        .flat_map(|entry| tokenize(entry))
        .collect()
});

/// The bundled English stopword set, in tokenized form.
pub fn english() -> &'static BTreeSet<String> {
    &ENGLISH
}

/// Loads a stopword file: one word per line, UTF-8. Each line is passed
/// through the tokenizer, so contraction forms contribute their tokens.
pub fn load_stopword_file(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path)?;
    Ok(text.lines().flat_map(tokenize).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn common_words_present_in_tokenized_form() {
        let set = english();
        for word in ["the", "and", "don", "t", "re", "should"] {
            assert!(set.contains(word), "missing {word}");
        }
        // apostrophe forms are normalized away
        assert!(!set.iter().any(|w| w.contains('\'')));
    }

    #[test]
    fn stopword_file_lines_are_tokenized() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stop.txt");
        std::fs::write(&path, "Smith\n\ndoesn't\n").unwrap();
        let set = load_stopword_file(&path).unwrap();
        assert_eq!(
            set,
            BTreeSet::from(["smith".into(), "doesn".into(), "t".into()])
        );
    }
}
