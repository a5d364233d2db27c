//! Set partitions viewed as words over an unbounded alphabet.
//!
//! A word `p = p_1 p_2 ... p_n` describes the partition of the positions
//! `{1, ..., n}` into blocks of equal letters. Two words are equivalent when
//! one is a letter-renaming of the other; [`CanonicalPartition`] holds the
//! restricted-growth representative of each class.
//!
//! Positions are 1-based everywhere in the public interface.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// A letter id. Always `>= 1`.
pub type Letter = u32;

/// Largest letter id that still has a compact `a`..`z` rendering.
const COMPACT_MAX: Letter = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("invalid token {token:?} in partition text")]
    Parse { token: String },
    #[error("letter ids must be positive")]
    ZeroLetter,
    #[error("index {index} out of range for a word of length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("letter {letter} occurs {count} times, crossing needs exactly 2")]
    CrossingMultiplicity { letter: Letter, count: usize },
    #[error("crossing needs two distinct letters, got {0} twice")]
    CrossingSameLetter(Letter),
}

/// A finite word of positive letters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    letters: Vec<Letter>,
}

impl SetPartition {
    pub fn new(letters: Vec<Letter>) -> Result<Self, PartitionError> {
        if letters.contains(&0) {
            return Err(PartitionError::ZeroLetter);
        }
        Ok(SetPartition { letters })
    }

    /// Caller guarantees every letter is nonzero.
    pub(crate) fn from_vec(letters: Vec<Letter>) -> Self {
        debug_assert!(!letters.contains(&0));
        SetPartition { letters }
    }

    pub fn empty() -> Self {
        SetPartition::default()
    }

    /// `letter^count`.
    pub fn run(letter: Letter, count: usize) -> Result<Self, PartitionError> {
        SetPartition::new(vec![letter; count])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// 1-based letter access.
    pub fn get(&self, position: usize) -> Option<Letter> {
        position
            .checked_sub(1)
            .and_then(|i| self.letters.get(i).copied())
    }

    /// Number of distinct letters, `N(p)`.
    pub fn distinct(&self) -> usize {
        self.letters.iter().collect::<HashSet<_>>().len()
    }

    pub fn max_letter(&self) -> Letter {
        self.letters.iter().copied().max().unwrap_or(0)
    }

    pub fn contains_letter(&self, letter: Letter) -> bool {
        self.letters.contains(&letter)
    }

    /// Occurrence count of `letter`.
    pub fn count(&self, letter: Letter) -> usize {
        self.letters.iter().filter(|&&l| l == letter).count()
    }

    /// Distinct letters in order of first occurrence.
    pub fn letters_by_first_occurrence(&self) -> Vec<Letter> {
        let mut seen = HashSet::new();
        self.letters
            .iter()
            .copied()
            .filter(|l| seen.insert(*l))
            .collect()
    }

    /// Occurrence counts, listed in order of first occurrence.
    pub fn multiplicities(&self) -> Vec<(Letter, usize)> {
        let mut counts: HashMap<Letter, usize> = HashMap::new();
        for &l in &self.letters {
            *counts.entry(l).or_default() += 1;
        }
        self.letters_by_first_occurrence()
            .into_iter()
            .map(|l| (l, counts[&l]))
            .collect()
    }

    /// Relabel letters by order of first occurrence.
    pub fn canonicalize(&self) -> CanonicalPartition {
        let mut relabel: HashMap<Letter, Letter> = HashMap::new();
        let letters = self
            .letters
            .iter()
            .map(|&l| {
                let next = relabel.len() as Letter + 1;
                *relabel.entry(l).or_insert(next)
            })
            .collect();
        CanonicalPartition(SetPartition { letters })
    }

    pub fn is_canonical(&self) -> bool {
        let mut max = 0;
        for &l in &self.letters {
            if l > max + 1 {
                return false;
            }
            max = max.max(l);
        }
        true
    }

    pub fn equivalent(&self, other: &SetPartition) -> bool {
        self.len() == other.len() && self.canonicalize() == other.canonicalize()
    }

    /// All 1-based positions holding a letter of `set`, ascending.
    pub fn indices(&self, set: &[Letter]) -> PositionSet {
        PositionSet(
            self.letters
                .iter()
                .enumerate()
                .filter(|(_, l)| set.contains(l))
                .map(|(i, _)| i + 1)
                .collect(),
        )
    }

    pub fn indices_of(&self, letter: Letter) -> PositionSet {
        self.indices(&[letter])
    }

    /// Largest multiplicity of any letter; 0 for the empty word.
    pub fn mcount(&self) -> usize {
        self.multiplicities()
            .into_iter()
            .map(|(_, c)| c)
            .max()
            .unwrap_or(0)
    }

    /// Number of runs each letter is split into, in first-occurrence order.
    fn run_counts(&self) -> Vec<(Letter, usize)> {
        self.truncate().multiplicities()
    }

    /// `C(p)`: letters whose occurrences are contiguous.
    pub fn clumped_count(&self) -> usize {
        self.run_counts()
            .iter()
            .filter(|(_, runs)| *runs == 1)
            .count()
    }

    /// `nc(p)`: the leftmost letter that is not clumped.
    pub fn leftmost_nonclumped(&self) -> Option<Letter> {
        self.run_counts()
            .into_iter()
            .find(|(_, runs)| *runs > 1)
            .map(|(l, _)| l)
    }

    /// True iff every letter is clumped.
    pub fn is_sorted(&self) -> bool {
        let mut finished: HashSet<Letter> = HashSet::new();
        let mut prev: Option<Letter> = None;
        for &l in &self.letters {
            if prev != Some(l) {
                if !finished.insert(l) {
                    return false;
                }
                prev = Some(l);
            }
        }
        true
    }

    pub fn reverse(&self) -> SetPartition {
        SetPartition::from_vec(self.letters.iter().rev().copied().collect())
    }

    /// Collapse each maximal run of equal letters to one letter.
    pub fn truncate(&self) -> SetPartition {
        let mut letters = self.letters.clone();
        letters.dedup();
        SetPartition::from_vec(letters)
    }

    /// Whether two multiplicity-2 letters interleave as `x y x y` or `y x y x`.
    pub fn is_crossing(&self, x: Letter, y: Letter) -> Result<bool, PartitionError> {
        if x == y {
            return Err(PartitionError::CrossingSameLetter(x));
        }
        for letter in [x, y] {
            let count = self.count(letter);
            if count != 2 {
                return Err(PartitionError::CrossingMultiplicity { letter, count });
            }
        }
        let merged = self.indices(&[x, y]);
        let first = self.letters[merged.0[0] - 1];
        let third = self.letters[merged.0[2] - 1];
        Ok(first == third)
    }

    pub fn concat(&self, other: &SetPartition) -> SetPartition {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        SetPartition::from_vec(letters)
    }

    /// `p^m`.
    pub fn repeat(&self, times: usize) -> SetPartition {
        SetPartition::from_vec(self.letters.repeat(times))
    }

    /// Inclusive 1-based sub-word `p_i ... p_j`. `i = j + 1` gives the empty word.
    pub fn slice(&self, i: usize, j: usize) -> Result<SetPartition, PartitionError> {
        let len = self.len();
        if i == 0 || i > len + 1 {
            return Err(PartitionError::OutOfRange { index: i, len });
        }
        if j > len || j + 1 < i {
            return Err(PartitionError::OutOfRange { index: j, len });
        }
        Ok(SetPartition::from_vec(self.letters[i - 1..j].to_vec()))
    }

    /// Compact `a`..`z` form when every letter fits, otherwise comma-separated ids.
    pub fn format(&self) -> String {
        self.to_string()
    }

    pub fn format_numeric(&self) -> String {
        self.letters
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(text: &str) -> Result<SetPartition, PartitionError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(SetPartition::empty());
        }
        let numeric = text.contains(',') || text.chars().any(|c| c.is_ascii_digit());
        let letters = if numeric {
            text.split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    match tok.parse::<Letter>() {
                        Ok(l) if l >= 1 => Ok(l),
                        _ => Err(PartitionError::Parse {
                            token: tok.to_string(),
                        }),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            text.chars()
                .map(|c| match c {
                    'a'..='z' => Ok(c as Letter - 'a' as Letter + 1),
                    _ => Err(PartitionError::Parse {
                        token: c.to_string(),
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(SetPartition::from_vec(letters))
    }
}

/// Renders a single letter in the same style [`SetPartition::format`] would use
/// for a word whose largest letter is `max_letter`.
pub fn format_letter(letter: Letter, max_letter: Letter) -> String {
    if max_letter <= COMPACT_MAX {
        char::from(b'a' + (letter - 1) as u8).to_string()
    } else {
        letter.to_string()
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.max_letter() <= COMPACT_MAX {
            for &l in &self.letters {
                write!(f, "{}", char::from(b'a' + (l - 1) as u8))?;
            }
            Ok(())
        } else {
            f.write_str(&self.format_numeric())
        }
    }
}

impl FromStr for SetPartition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SetPartition::parse(s)
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.format())
    }
}

impl From<CanonicalPartition> for SetPartition {
    fn from(c: CanonicalPartition) -> Self {
        c.0
    }
}

/// A word in restricted-growth form: letter 1 opens the word and each new
/// letter is one more than the largest seen so far.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CanonicalPartition(SetPartition);

impl CanonicalPartition {
    /// Accepts `letters` only if already in restricted-growth form.
    pub fn from_rgs(letters: Vec<Letter>) -> Option<Self> {
        let word = SetPartition::new(letters).ok()?;
        word.is_canonical().then_some(CanonicalPartition(word))
    }

    pub(crate) fn from_rgs_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(SetPartition::from_vec(letters.clone()).is_canonical());
        CanonicalPartition(SetPartition::from_vec(letters))
    }

    pub fn as_partition(&self) -> &SetPartition {
        &self.0
    }

    pub fn into_partition(self) -> SetPartition {
        self.0
    }
}

impl Deref for CanonicalPartition {
    type Target = SetPartition;

    fn deref(&self) -> &SetPartition {
        &self.0
    }
}

impl fmt::Display for CanonicalPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Strictly ascending 1-based positions into a word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PositionSet(Vec<usize>);

impl PositionSet {
    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `ind^i`: the `i`-th smallest position, 1-based.
    pub fn ith(&self, i: usize) -> Result<usize, PartitionError> {
        i.checked_sub(1)
            .and_then(|k| self.0.get(k).copied())
            .ok_or(PartitionError::OutOfRange {
                index: i,
                len: self.0.len(),
            })
    }
}
