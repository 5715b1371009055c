//! Rule-based sentence splitting and word tokenization.

/// Tokens that end in a period without ending a sentence.
pub const ABBREVIATIONS: &[&str] = &[
    "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "Sr.", "Jr.", "St.", "Mt.", "Gen.", "Gov.", "Sen.", "Rep.", "Rev.", "Capt.",
    "Col.", "Lt.", "Sgt.", "Fig.", "No.", "Vol.", "vs.", "e.g.", "i.e.", "cf.", "approx.", "Inc.", "Ltd.", "Co.",
    "Corp.", "Jan.", "Feb.", "Mar.", "Apr.", "Jun.", "Jul.", "Aug.", "Sep.", "Sept.", "Oct.", "Nov.", "Dec.", "U.S.",
    "U.K.", "a.m.", "p.m.",
];

/// Quoted spans shorter than this many characters are never split.
const PROTECTED_QUOTE_LEN: usize = 40;

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_abbreviation(word: &str) -> bool {
    if ABBREVIATIONS.contains(&word) {
        return true;
    }
    // single-letter initials such as "J."
    let mut chars = word.chars();
    matches!(
        (chars.next(), chars.next(), chars.next()),
        (Some(c), Some('.'), None) if c.is_alphabetic()
    )
}

/// Character ranges covered by paired `"` quotes shorter than the protection length.
fn protected_spans(chars: &[char]) -> Vec<(usize, usize)> {
    let quotes: Vec<usize> = chars
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == '"')
        .map(|(i, _)| i)
        .collect();
    quotes
        .chunks_exact(2)
        .filter(|pair| pair[1] - pair[0] - 1 < PROTECTED_QUOTE_LEN)
        .map(|pair| (pair[0], pair[1]))
        .collect()
}

/// Splits running text into sentences.
///
/// A boundary is a run of `.`, `!` or `?` (optionally followed by closing
/// quotes or brackets), then whitespace, then an uppercase letter or a quote.
/// Known abbreviations and single-letter initials do not end sentences, and
/// nothing inside a short quoted span is split.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let protected = protected_spans(&chars);
    let inside_quote = |i: usize| protected.iter().any(|&(a, b)| a < i && i < b);
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if !is_terminator(chars[i]) {
            i += 1;
            continue;
        }
        let term_at = i;
        let mut end = i + 1;
        while end < chars.len() && is_terminator(chars[end]) {
            end += 1;
        }
        while end < chars.len() && matches!(chars[end], '"' | '\'' | ')' | ']') {
            end += 1;
        }
        let mut next = end;
        while next < chars.len() && chars[next].is_whitespace() {
            next += 1;
        }
        let boundary = next > end
            && next < chars.len()
            && (chars[next].is_uppercase() || matches!(chars[next], '"' | '\''))
            && !inside_quote(end - 1);
        if boundary && chars[term_at] == '.' {
            let word_start = chars[..term_at]
                .iter()
                .rposition(|c| c.is_whitespace())
                .map_or(start, |p| p + 1)
                .max(start);
            let word: String = chars[word_start..end.min(term_at + 1)].iter().collect();
            let word = word.trim_start_matches(['(', '"', '\'']);
            if is_abbreviation(word) {
                i = end;
                continue;
            }
        }
        if boundary {
            push_trimmed(&mut sentences, &chars[start..end]);
            start = next;
            i = next;
        } else {
            i = end;
        }
    }
    push_trimmed(&mut sentences, &chars[start.min(chars.len())..]);
    sentences
}

fn push_trimmed(out: &mut Vec<String>, chars: &[char]) {
    let s: String = chars.iter().collect();
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Splits on whitespace, then detaches leading and trailing punctuation.
/// A run of one repeated punctuation character ("...", "--") stays a single
/// token. Apostrophes and hyphens between word characters stay attached.
pub fn word_tokenize(sentence: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in sentence.split_whitespace() {
        let mut rest = chunk;
        while let Some(c) = rest.chars().next().filter(|&c| is_punct(c)) {
            let run = rest.len() - rest.trim_start_matches(c).len();
            tokens.push(rest[..run].to_string());
            rest = &rest[run..];
        }
        let mut trailing = Vec::new();
        while let Some(c) = rest.chars().next_back().filter(|&c| is_punct(c)) {
            let keep = rest.trim_end_matches(c).len();
            trailing.push(rest[keep..].to_string());
            rest = &rest[..keep];
        }
        if !rest.is_empty() {
            tokens.push(rest.to_string());
        }
        tokens.extend(trailing.into_iter().rev());
    }
    tokens
}

/// Number of tokens containing at least one alphanumeric character.
pub fn word_count(sentence: &str) -> usize {
    word_tokenize(sentence)
        .iter()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .count()
}
