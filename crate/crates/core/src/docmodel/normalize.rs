/// Leading words never part of an entity span.
pub const DETERMINERS: &[&str] = &["the", "a", "an", "this", "its", "these", "such"];

/// Words without specific meaning at the edges of entity names.
pub const GENERIC_HEADS: &[&str] = &["network", "networks", "neural", "model"];

/// Lowercases and collapses whitespace; nothing is removed.
pub fn fold_surface(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical form used to match the same entity across documents and
/// modalities: case-folded, leading determiners removed, and generic
/// heads ("network", "neural", "model") trimmed from either edge as long
/// as at least one word remains. Idempotent.
pub fn normalize_surface(s: &str) -> String {
    let folded = fold_surface(s);
    let mut words: Vec<&str> = folded.split(' ').filter(|w| !w.is_empty()).collect();
    loop {
        let before = words.len();
        if words.len() > 1 && DETERMINERS.contains(&words[0]) {
            words.remove(0);
        }
        if words.len() > 1 && GENERIC_HEADS.contains(&words[0]) {
            words.remove(0);
        }
        if words.len() > 1 && GENERIC_HEADS.contains(&words[words.len() - 1]) {
            words.pop();
        }
        if words.len() == before {
            break;
        }
    }
    words.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(normalize_surface("question answering model"), "question answering");
        assert_eq!(normalize_surface("BERT"), "bert");
        assert_eq!(normalize_surface("the Bidirectional LSTM"), "bidirectional lstm");
        assert_eq!(normalize_surface("FasterRCNN network"), "fasterrcnn");
        assert_eq!(normalize_surface("neural machine translation"), "machine translation");
        assert_eq!(normalize_surface("  model  "), "model");
        assert_eq!(normalize_surface(""), "");
    }

    proptest! {
        #[test]
        fn idempotent(words in proptest::collection::vec(
            prop_oneof![
                Just("the".to_string()), Just("The".to_string()), Just("model".to_string()),
                Just("neural".to_string()), Just("Networks".to_string()), Just("a".to_string()),
                "[A-Za-z\\-]{1,8}",
            ], 0..7)) {
            let s = words.join("  ");
            let once = normalize_surface(&s);
            prop_assert_eq!(normalize_surface(&once), once);
        }
    }
}
