//! Small shared text helpers.

/// Splits text into sentences, breaking after `.`, `!` or `?` when followed
/// by whitespace. Terminal punctuation stays attached to its sentence.
pub(crate) fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            if let Some(&(_, next)) = chars.peek() {
                if next.is_whitespace() {
                    let end = i + c.len_utf8();
                    let piece = text[start..end].trim();
                    if !piece.is_empty() {
                        out.push(piece);
                    }
                    start = end;
                }
            }
        }
    }
    let piece = text[start..].trim();
    if !piece.is_empty() {
        out.push(piece);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_terminal_punctuation() {
        assert_eq!(
            split_sentences("First one. Second one! A third? Tail"),
            vec!["First one.", "Second one!", "A third?", "Tail"]
        );
    }

    #[test]
    fn keeps_interior_periods() {
        assert_eq!(split_sentences("about 3.5 goals per game."), vec!["about 3.5 goals per game."]);
    }

    #[test]
    fn empty_input_gives_no_sentences() {
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   ").is_empty());
    }
}
