//! Restricted-growth enumeration of equivalence classes and the exhaustive
//! search for words that `φ_aba` fails to sort in `N - 1` passes.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::machine::apply_phi_aba;
use crate::partition::{CanonicalPartition, Letter, SetPartition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("witness search needs at least one letter")]
    NoLetters,
    #[error("table needs 3 <= n_min <= n_max, got n_min={n_min}, n_max={n_max}")]
    TableRange { n_min: usize, n_max: usize },
}

/// Words of `length` letters using exactly `n_letters` distinct letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CellSpec {
    pub n_letters: usize,
    pub length: usize,
}

impl CellSpec {
    pub fn new(n_letters: usize, length: usize) -> Self {
        CellSpec { n_letters, length }
    }

    pub fn is_empty(&self) -> bool {
        self.n_letters > self.length || (self.n_letters == 0) != (self.length == 0)
    }
}

/// Stirling number of the second kind, `S(length, n)`.
pub fn stirling2(length: usize, n: usize) -> u128 {
    if n > length {
        return 0;
    }
    // row[k] = S(m, k) for the current m
    let mut row = vec![0u128; n + 1];
    row[0] = 1;
    for _ in 0..length {
        for k in (1..=n).rev() {
            row[k] = k as u128 * row[k] + row[k - 1];
        }
        row[0] = 0;
    }
    row[n]
}

/// Bell number `B(length)`: all classes of that length.
pub fn bell(length: usize) -> u128 {
    (0..=length).map(|n| stirling2(length, n)).sum()
}

/// Lexicographic stream of the restricted-growth words in a cell, optionally
/// restricted to those starting with a fixed prefix.
#[derive(Debug, Clone)]
pub struct CanonicalPartitions {
    cell: CellSpec,
    prefix_len: usize,
    word: Vec<Letter>,
    // prefix_max[i] = max(word[..i])
    prefix_max: Vec<Letter>,
    started: bool,
    done: bool,
}

impl CanonicalPartitions {
    pub fn new(cell: CellSpec) -> Self {
        Self::with_prefix(cell, &[])
    }

    /// Only words beginning with `prefix`. An invalid or unextendable prefix
    /// yields an empty stream.
    pub fn with_prefix(cell: CellSpec, prefix: &[Letter]) -> Self {
        let CellSpec {
            n_letters: n,
            length,
        } = cell;
        let mut stream = CanonicalPartitions {
            cell,
            prefix_len: prefix.len(),
            word: Vec::with_capacity(length),
            prefix_max: vec![0; length + 1],
            started: false,
            done: false,
        };
        let feasible = prefix.len() <= length
            && CanonicalPartition::from_rgs(prefix.to_vec()).is_some()
            && !cell.is_empty();
        if !feasible {
            stream.done = true;
            return stream;
        }
        for &l in prefix {
            stream.push(l);
        }
        let m = stream.current_max();
        if m as usize > n || (length - prefix.len()) < n - m as usize {
            stream.done = true;
            return stream;
        }
        stream.fill_minimal();
        stream
    }

    fn current_max(&self) -> Letter {
        self.prefix_max[self.word.len()]
    }

    fn push(&mut self, l: Letter) {
        let m = self.current_max().max(l);
        self.word.push(l);
        self.prefix_max[self.word.len()] = m;
    }

    /// Complete `word` to the smallest word of the cell extending it.
    fn fill_minimal(&mut self) {
        let n = self.cell.n_letters as Letter;
        while self.word.len() < self.cell.length {
            let remaining = (self.cell.length - self.word.len()) as Letter;
            let m = self.current_max();
            let l = if remaining == n - m { m + 1 } else { 1 };
            self.push(l);
        }
    }

    /// Step to the lexicographic successor; false when exhausted.
    fn advance(&mut self) -> bool {
        let n = self.cell.n_letters as Letter;
        let length = self.cell.length;
        while self.word.len() > self.prefix_len {
            let i = self.word.len() - 1;
            let l = self.word.pop().expect("nonempty");
            let m = self.prefix_max[i];
            let bumped = l + 1;
            if bumped <= m + 1 && bumped <= n {
                let new_max = m.max(bumped);
                if (length - i - 1) as Letter >= n - new_max {
                    self.push(bumped);
                    self.fill_minimal();
                    return true;
                }
            }
        }
        false
    }
}

impl Iterator for CanonicalPartitions {
    type Item = CanonicalPartition;

    fn next(&mut self) -> Option<CanonicalPartition> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(CanonicalPartition::from_rgs_unchecked(self.word.clone()))
    }
}

pub fn canonical_partitions(cell: CellSpec) -> CanonicalPartitions {
    CanonicalPartitions::new(cell)
}

/// All valid prefixes of length `min(depth, length)` that extend into the
/// cell, in lexicographic order. Streams over these shards concatenate to the
/// full cell stream.
pub fn shard_prefixes(cell: CellSpec, depth: usize) -> Vec<Vec<Letter>> {
    let depth = depth.min(cell.length);
    if cell.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(depth);
    extend_prefixes(cell, depth, 0, &mut prefix, &mut out);
    out
}

fn extend_prefixes(
    cell: CellSpec,
    depth: usize,
    max: Letter,
    prefix: &mut Vec<Letter>,
    out: &mut Vec<Vec<Letter>>,
) {
    let n = cell.n_letters as Letter;
    if prefix.len() == depth {
        out.push(prefix.clone());
        return;
    }
    for l in 1..=(max + 1).min(n) {
        let new_max = max.max(l);
        let remaining = (cell.length - prefix.len() - 1) as Letter;
        if remaining < n - new_max {
            continue;
        }
        prefix.push(l);
        extend_prefixes(cell, depth, new_max, prefix, out);
        prefix.pop();
    }
}

/// Which structural family a length `2N+1` witness belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// The first letter occurs three times.
    HeadTriple,
    /// First letter occurs twice; two of the tripled letter's occurrences lie
    /// after the second occurrence of the first letter.
    TailHeavy,
    /// First letter occurs twice; two of the tripled letter's occurrences lie
    /// before the second occurrence of the first letter.
    PrefixHeavy,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::HeadTriple => "head-triple",
            Family::TailHeavy => "tail-heavy",
            Family::PrefixHeavy => "prefix-heavy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessProfile {
    pub witness: CanonicalPartition,
    /// Occurrence count of letter `i + 1` at index `i`.
    pub multiplicities: Vec<usize>,
    /// The unique letter of multiplicity 3, if exactly one exists.
    pub triple_letter: Option<Letter>,
    pub first_letter_mult: usize,
    pub family: Option<Family>,
}

impl WitnessProfile {
    pub fn new(witness: CanonicalPartition) -> Self {
        let n = witness.distinct();
        let mut multiplicities = vec![0usize; n];
        for &l in witness.letters() {
            multiplicities[l as usize - 1] += 1;
        }
        let triples: Vec<Letter> = multiplicities
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 3)
            .map(|(i, _)| i as Letter + 1)
            .collect();
        let triple_letter = (triples.len() == 1).then(|| triples[0]);
        let first_letter_mult = multiplicities.first().copied().unwrap_or(0);
        let family = if witness.len() == 2 * n + 1 {
            classify(&witness, triple_letter, first_letter_mult)
        } else {
            None
        };
        WitnessProfile {
            witness,
            multiplicities,
            triple_letter,
            first_letter_mult,
            family,
        }
    }
}

fn classify(word: &SetPartition, triple: Option<Letter>, first_mult: usize) -> Option<Family> {
    let triple = triple?;
    match first_mult {
        3 if triple == 1 => Some(Family::HeadTriple),
        2 => {
            let second_head = word.indices_of(1).ith(2).ok()?;
            let after = word
                .indices_of(triple)
                .positions()
                .iter()
                .filter(|&&i| i > second_head)
                .count();
            match after {
                2 => Some(Family::TailHeavy),
                1 => Some(Family::PrefixHeavy),
                _ => None,
            }
        }
        _ => None,
    }
}

/// True iff `N - 1` passes of `φ_aba` leave `p` unsorted.
pub fn is_witness(p: &SetPartition) -> bool {
    let n = p.distinct();
    if n == 0 {
        return false;
    }
    let mut current = p.clone();
    for _ in 0..n - 1 {
        if current.is_sorted() {
            return false;
        }
        current = apply_phi_aba(&current);
    }
    !current.is_sorted()
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub cell: CellSpec,
    pub total_classes: u128,
    pub witnesses: Vec<WitnessProfile>,
    #[serde(serialize_with = "serialize_millis", rename = "elapsed_ms")]
    pub elapsed: Duration,
}

fn serialize_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

impl WitnessReport {
    pub fn witness_count(&self) -> usize {
        self.witnesses.len()
    }
}

fn scan(stream: CanonicalPartitions) -> (u128, Vec<CanonicalPartition>) {
    let mut total = 0u128;
    let mut found = Vec::new();
    for p in stream {
        total += 1;
        if is_witness(&p) {
            found.push(p);
        }
    }
    (total, found)
}

fn report(
    cell: CellSpec,
    total: u128,
    found: Vec<CanonicalPartition>,
    start: Instant,
) -> WitnessReport {
    WitnessReport {
        cell,
        total_classes: total,
        witnesses: found.into_iter().map(WitnessProfile::new).collect(),
        elapsed: start.elapsed(),
    }
}

/// Sequential scan of one cell.
pub fn find_witnesses(cell: CellSpec) -> Result<WitnessReport, EnumerationError> {
    if cell.n_letters == 0 {
        return Err(EnumerationError::NoLetters);
    }
    let start = Instant::now();
    let (total, found) = scan(canonical_partitions(cell));
    Ok(report(cell, total, found, start))
}

/// Prefix length used to shard a cell across workers.
pub const DEFAULT_SHARD_DEPTH: usize = 4;

/// Same result as [`find_witnesses`], scanning prefix shards in parallel on
/// the current rayon pool and merging them in prefix order.
pub fn find_witnesses_parallel(
    cell: CellSpec,
    shard_depth: usize,
) -> Result<WitnessReport, EnumerationError> {
    if cell.n_letters == 0 {
        return Err(EnumerationError::NoLetters);
    }
    let start = Instant::now();
    let shards: Vec<(u128, Vec<CanonicalPartition>)> = shard_prefixes(cell, shard_depth)
        .par_iter()
        .map(|prefix| scan(CanonicalPartitions::with_prefix(cell, prefix)))
        .collect();
    let mut total = 0;
    let mut found = Vec::new();
    for (t, f) in shards {
        total += t;
        found.extend(f);
    }
    Ok(report(cell, total, found, start))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub n_letters: usize,
    pub length: usize,
    pub total_classes: u128,
    pub witness_count: usize,
}

/// One row per cell `(N, L)` for `n_min <= N <= n_max`, `N <= L <= 2N + l_offset_max`.
pub fn witness_table(
    n_min: usize,
    n_max: usize,
    l_offset_max: usize,
) -> Result<Vec<TableRow>, EnumerationError> {
    if n_min < 3 || n_min > n_max {
        return Err(EnumerationError::TableRange { n_min, n_max });
    }
    let cells: Vec<CellSpec> = (n_min..=n_max)
        .flat_map(|n| (n..=2 * n + l_offset_max).map(move |l| CellSpec::new(n, l)))
        .collect();
    cells
        .into_iter()
        .map(|cell| {
            let r = find_witnesses_parallel(cell, DEFAULT_SHARD_DEPTH)?;
            Ok(TableRow {
                n_letters: cell.n_letters,
                length: cell.length,
                total_classes: r.total_classes,
                witness_count: r.witness_count(),
            })
        })
        .collect()
}
