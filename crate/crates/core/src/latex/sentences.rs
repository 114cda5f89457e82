use super::Sentence;

/// Words that end in a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "al.", "fig.", "figs.", "eq.", "eqs.", "sec.", "secs.", "tab.", "e.g.", "i.e.", "cf.",
    "vs.", "approx.", "resp.", "no.", "dr.", "mr.", "ms.", "prof.", "ref.", "refs.", "etc.)",
    "ch.", "app.", "st.",
];

/// Whitespace tokenization with control characters removed.
pub fn split_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.chars().filter(|c| !c.is_control()).collect::<String>())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Splits a paragraph's words into sentences. A word ending in `.`, `?` or
/// `!` (optionally followed by closing quotes/brackets) ends a sentence
/// when the next word starts with an uppercase letter, unless it is a known
/// abbreviation.
pub fn split_sentences(words: Vec<String>) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut current: Sentence = Vec::new();
    let n = words.len();
    let mut iter = words.into_iter().peekable();
    let mut idx = 0;
    while let Some(word) = iter.next() {
        idx += 1;
        let ends = is_terminal(&word);
        current.push(word);
        let boundary = ends
            && idx < n
            && iter.peek().is_some_and(|next| starts_upper(next))
            && !is_abbreviation(&current);
        if boundary {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

fn is_terminal(word: &str) -> bool {
    let core = word.trim_end_matches(['"', '\'', ')', ']', '}']);
    core.ends_with(['.', '?', '!'])
}

fn starts_upper(word: &str) -> bool {
    word.trim_start_matches(['"', '\'', '(', '[', '`'])
        .chars()
        .next()
        .is_some_and(char::is_uppercase)
}

fn is_abbreviation(sentence: &[String]) -> bool {
    let last = sentence.last().map(|w| w.to_lowercase()).unwrap_or_default();
    if ABBREVIATIONS.contains(&last.as_str()) {
        return true;
    }
    // Single-letter initials such as "J." in author names.
    let letters: Vec<char> = last.chars().collect();
    letters.len() == 2 && letters[0].is_alphabetic() && letters[1] == '.'
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sents(text: &str) -> Vec<String> {
        split_sentences(split_words(text))
            .into_iter()
            .map(|s| s.join(" "))
            .collect()
    }

    #[test]
    fn basic_split() {
        assert_eq!(sents("Hello world. Next one! Third?"), vec!["Hello world.", "Next one!", "Third?"]);
    }

    #[test]
    fn abbreviations_do_not_split() {
        assert_eq!(
            sents("As in Smith et al. The method works. See Fig. 3 and Eq. Two."),
            vec!["As in Smith et al. The method works.", "See Fig. 3 and Eq. Two."]
        );
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(sents("We use v. large models. Done."), vec!["We use v. large models.", "Done."]);
        assert_eq!(sents("It scored 92.2 on SQuAD."), vec!["It scored 92.2 on SQuAD."]);
    }

    #[test]
    fn words_drop_control_chars() {
        assert_eq!(split_words("a\u{7}b  c"), vec!["ab", "c"]);
    }
}
