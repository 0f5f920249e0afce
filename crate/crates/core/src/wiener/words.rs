use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

/// Word over the alphabet `{0, 1, …, d}`; letter `0` is time.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word {
    pub letters: Vec<u8>,
}

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Length plus the number of time letters.
    pub fn weight(&self) -> usize {
        weight_of(&self.letters)
    }
}

pub(crate) fn weight_of(letters: &[u8]) -> usize {
    letters.len() + letters.iter().filter(|&&l| l == 0).count()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

fn word_order(a: &[u8], b: &[u8]) -> std::cmp::Ordering {
    weight_of(a)
        .cmp(&weight_of(b))
        .then(a.len().cmp(&b.len()))
        .then(a.cmp(b))
}

/// Non-empty words of weight at most `m` over `{0, …, d}`, ordered by weight,
/// then length, then lexicographically.
pub fn weighted_words(d: usize, m: usize) -> Vec<Word> {
    let mut out: Vec<Vec<u8>> = Vec::new();
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    while let Some(w) = frontier.pop() {
        for l in 0..=d as u8 {
            let mut next = w.clone();
            next.push(l);
            if weight_of(&next) <= m {
                frontier.push(next.clone());
                out.push(next);
            }
        }
    }
    out.sort_by(|a, b| word_order(a, b));
    out.into_iter().map(Word::new).collect()
}

/// Coordinate system of a truncated tensor: the empty word at index 0 followed
/// by [`weighted_words`], with prefix and suffix tables for Chen products.
#[derive(Debug, PartialEq, Eq)]
pub struct WordBasis {
    d: usize,
    m: usize,
    words: Vec<Word>,
    index: HashMap<Vec<u8>, usize>,
    /// `prefixes[w][j]` = index of the first `j` letters of `w`, `j = 0..=len`.
    prefixes: Vec<Vec<usize>>,
    /// `suffixes[w][j]` = index of the letters of `w` from position `j` on.
    suffixes: Vec<Vec<usize>>,
}

impl WordBasis {
    pub fn new(d: usize, m: usize) -> Self {
        assert!((1..255).contains(&d), "alphabet size out of range");
        let mut words = vec![Word::empty()];
        words.extend(weighted_words(d, m));
        let index: HashMap<Vec<u8>, usize> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.letters.clone(), i))
            .collect();
        // Prefixes and suffixes of an admissible word are admissible.
        let prefixes = words
            .iter()
            .map(|w| (0..=w.len()).map(|j| index[&w.letters[..j]]).collect())
            .collect();
        let suffixes = words
            .iter()
            .map(|w| (0..=w.len()).map(|j| index[&w.letters[j..]]).collect())
            .collect();
        WordBasis {
            d,
            m,
            words,
            index,
            prefixes,
            suffixes,
        }
    }

    /// Number of Brownian coordinates (the alphabet is `{0, …, d}`).
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_weight(&self) -> usize {
        self.m
    }

    /// Number of coordinates including the empty word.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn index_of(&self, letters: &[u8]) -> Option<usize> {
        self.index.get(letters).copied()
    }

    pub(crate) fn prefixes(&self, i: usize) -> &[usize] {
        &self.prefixes[i]
    }

    pub(crate) fn suffixes(&self, i: usize) -> &[usize] {
        &self.suffixes[i]
    }
}
