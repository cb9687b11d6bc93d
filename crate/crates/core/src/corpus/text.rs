//! Turkish-aware casing, syllable counting and the word-token basis shared by
//! every per-word feature.

use super::model::{Document, Token};

/// Lowercase with Turkish dotted/dotless I rules (`I`→`ı`, `İ`→`i`).
pub fn turkish_lowercase(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            'I' => out.push('ı'),
            'İ' => out.push('i'),
            _ => out.extend(c.to_lowercase()),
        }
    }
    out
}

fn is_turkish_vowel(c: char) -> bool {
    matches!(
        c,
        'a' | 'e'
            | 'ı'
            | 'i'
            | 'o'
            | 'ö'
            | 'u'
            | 'ü'
            | 'â'
            | 'î'
            | 'û'
            | 'A'
            | 'E'
            | 'I'
            | 'İ'
            | 'O'
            | 'Ö'
            | 'U'
            | 'Ü'
            | 'Â'
            | 'Î'
            | 'Û'
    )
}

/// Syllables in a Turkish word: one per vowel letter, with a floor of 1 for
/// vowelless tokens such as abbreviations and numerals.
pub fn syllable_count(word: &str) -> usize {
    word.chars().filter(|&c| is_turkish_vowel(c)).count().max(1)
}

/// All tokens that are words (UPOS neither PUNCT nor SYM), in document order.
pub fn word_tokens(document: &Document) -> Vec<&Token> {
    document.tokens().filter(|t| t.is_word()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn syllables() {
        assert_eq!(syllable_count("ev"), 1);
        assert_eq!(syllable_count("merhaba"), 3);
        assert_eq!(syllable_count("TBMM"), 1);
        assert_eq!(syllable_count("1923"), 1);
        assert_eq!(syllable_count("kâğıt"), 2);
        assert_eq!(syllable_count("Dünya’nın"), 3);
        assert_eq!(syllable_count("İSTANBUL"), 3);
    }

    #[test]
    fn dotted_and_dotless_i() {
        assert_eq!(turkish_lowercase("IŞIK"), "ışık");
        assert_eq!(turkish_lowercase("İzmir"), "izmir");
        assert_eq!(turkish_lowercase("Ağaç"), "ağaç");
    }

    proptest! {
        #[test]
        fn syllables_positive_and_case_invariant(w in "[a-zçğıöşüâîûA-ZÇĞİÖŞÜ0-9]{1,20}") {
            let n = syllable_count(&w);
            prop_assert!(n >= 1);
            prop_assert_eq!(n, syllable_count(&w.to_uppercase()));
            prop_assert_eq!(n, syllable_count(&w.to_lowercase()));
            prop_assert_eq!(n, syllable_count(&turkish_lowercase(&w)));
        }
    }
}
