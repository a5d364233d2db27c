//! The right-greedy pattern-avoiding stack machine `φ_σ`.
//!
//! One pass reads the input left to right. The next letter is pushed when the
//! stack, with that letter on top, still avoids every subsequence equivalent
//! to `σ`; otherwise the top of the stack is popped to the output. When the
//! input runs out the stack is emptied.
//!
//! The stack is read from top to bottom (the candidate letter first) when
//! testing for `σ`. For palindromic patterns such as `aba` the reading
//! direction does not matter.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::partition::{format_letter, CanonicalPartition, Letter, SetPartition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("pattern must be nonempty")]
    EmptyPattern,
    #[error("not sorted after {cap} passes and no cycle detected")]
    Indeterminate { cap: usize },
}

/// A canonicalized nonempty forbidden pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Pattern(CanonicalPartition);

impl Pattern {
    pub fn new(word: &SetPartition) -> Result<Self, MachineError> {
        if word.is_empty() {
            return Err(MachineError::EmptyPattern);
        }
        Ok(Pattern(word.canonicalize()))
    }

    pub fn aba() -> Self {
        Pattern(CanonicalPartition::from_rgs_unchecked(vec![1, 2, 1]))
    }

    pub fn parse(text: &str) -> Result<Self, PatternParseError> {
        let word = SetPartition::parse(text)?;
        Ok(Pattern::new(&word)?)
    }

    pub fn word(&self) -> &CanonicalPartition {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_aba(&self) -> bool {
        self.0.letters() == [1, 2, 1]
    }

    /// True when the reversed pattern is equivalent to the pattern.
    pub fn is_palindromic(&self) -> bool {
        self.0.reverse().canonicalize() == self.0
    }

    pub fn reversed(&self) -> Pattern {
        Pattern(self.0.reverse().canonicalize())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Error)]
pub enum PatternParseError {
    #[error(transparent)]
    Partition(#[from] crate::partition::PartitionError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Does `word` contain a subsequence equivalent to `pattern`?
pub fn contains_pattern(word: &SetPartition, pattern: &Pattern) -> bool {
    embeds(word.letters(), pattern.word().letters(), false)
}

/// Backtracking search for an injective letter map sending `pattern` onto a
/// subsequence of `word`. With `anchored`, the first pattern entry must land
/// on `word[0]`.
fn embeds(word: &[Letter], pattern: &[Letter], anchored: bool) -> bool {
    // pattern letters are 1..=k after canonicalization
    let k = pattern.iter().copied().max().unwrap_or(0) as usize;
    let mut image: Vec<Option<Letter>> = vec![None; k + 1];
    if anchored {
        if word.is_empty() {
            return pattern.is_empty();
        }
        image[pattern[0] as usize] = Some(word[0]);
        return search(word, 1, pattern, 1, &mut image);
    }
    search(word, 0, pattern, 0, &mut image)
}

fn search(
    word: &[Letter],
    from: usize,
    pattern: &[Letter],
    at: usize,
    image: &mut Vec<Option<Letter>>,
) -> bool {
    if at == pattern.len() {
        return true;
    }
    if word.len() - from < pattern.len() - at {
        return false;
    }
    let p = pattern[at] as usize;
    for i in from..word.len() {
        let x = word[i];
        match image[p] {
            Some(y) if y == x => {
                if search(word, i + 1, pattern, at + 1, image) {
                    return true;
                }
            }
            Some(_) => {}
            None => {
                if image.contains(&Some(x)) {
                    continue;
                }
                image[p] = Some(x);
                let found = search(word, i + 1, pattern, at + 1, image);
                image[p] = None;
                if found {
                    return true;
                }
            }
        }
    }
    false
}

/// Which end of the stack the legality test starts reading from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadDirection {
    #[default]
    TopToBottom,
    BottomToTop,
}

/// Can `x` go on top of `stack` (listed bottom to top) without the stack
/// containing `sigma`, read from top to bottom? Assumes `stack` already avoids it.
pub fn push_is_legal(stack: &[Letter], x: Letter, sigma: &Pattern) -> bool {
    push_is_legal_reading(stack, x, sigma, ReadDirection::TopToBottom)
}

/// [`push_is_legal`] with an explicit reading direction.
pub fn push_is_legal_reading(
    stack: &[Letter],
    x: Letter,
    sigma: &Pattern,
    direction: ReadDirection,
) -> bool {
    // Only subsequences using the new letter can be new occurrences. Reading
    // bottom to top puts the candidate last, which is the same as reading top
    // to bottom against the reversed pattern.
    let anchor_pattern = match direction {
        ReadDirection::TopToBottom => sigma.word().letters().to_vec(),
        ReadDirection::BottomToTop => sigma.reversed().word().letters().to_vec(),
    };
    let mut reading = Vec::with_capacity(stack.len() + 1);
    reading.push(x);
    reading.extend(stack.iter().rev());
    !embeds(&reading, &anchor_pattern, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Push,
    Pop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub letter: Letter,
    /// Bottom to top.
    pub stack_after: Vec<Letter>,
    pub output_after: Vec<Letter>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub input: SetPartition,
    pub sigma: Pattern,
    pub events: Vec<TraceEvent>,
    pub output: SetPartition,
}

impl Trace {
    /// Re-run the events from an empty stack. Returns the output if every event
    /// is consistent with its recorded stack and output.
    pub fn replay(&self) -> Option<SetPartition> {
        let mut input = self.input.letters().iter();
        let mut stack: Vec<Letter> = Vec::new();
        let mut output: Vec<Letter> = Vec::new();
        for ev in &self.events {
            match ev.kind {
                EventKind::Push => {
                    if input.next() != Some(&ev.letter) {
                        return None;
                    }
                    stack.push(ev.letter);
                }
                EventKind::Pop => {
                    if stack.pop() != Some(ev.letter) {
                        return None;
                    }
                    output.push(ev.letter);
                }
            }
            if stack != ev.stack_after || output != ev.output_after {
                return None;
            }
        }
        if input.next().is_some() || !stack.is_empty() {
            return None;
        }
        SetPartition::new(output).ok()
    }

    /// One `PUSH x | stack=... | out=...` line per event.
    pub fn to_text(&self) -> String {
        let max = self.input.max_letter();
        let render = |letters: &[Letter]| -> String {
            let word = SetPartition::from_vec(letters.to_vec());
            if max <= 26 {
                word.format()
            } else {
                word.format_numeric()
            }
        };
        let mut text = String::new();
        for ev in &self.events {
            let kind = match ev.kind {
                EventKind::Push => "PUSH",
                EventKind::Pop => "POP",
            };
            text.push_str(&format!(
                "{kind} {} | stack={} | out={}\n",
                format_letter(ev.letter, max),
                render(&ev.stack_after),
                render(&ev.output_after)
            ));
        }
        text
    }
}

/// Runs one pass, reporting each push/pop with the stack and output after it.
fn run_machine<L, S>(input: &[Letter], mut legal: L, mut sink: S) -> Vec<Letter>
where
    L: FnMut(&[Letter], Letter) -> bool,
    S: FnMut(EventKind, Letter, &[Letter], &[Letter]),
{
    let mut stack: Vec<Letter> = Vec::with_capacity(input.len());
    let mut output: Vec<Letter> = Vec::with_capacity(input.len());
    let mut next = 0;
    while next < input.len() {
        let x = input[next];
        // an empty stack always accepts, otherwise a one-letter pattern would stall
        if stack.is_empty() || legal(&stack, x) {
            stack.push(x);
            next += 1;
            sink(EventKind::Push, x, &stack, &output);
        } else {
            let top = stack.pop().expect("stack nonempty");
            output.push(top);
            sink(EventKind::Pop, top, &stack, &output);
        }
    }
    while let Some(top) = stack.pop() {
        output.push(top);
        sink(EventKind::Pop, top, &stack, &output);
    }
    output
}

/// One pass of `φ_σ` using the general subsequence test.
pub fn apply_phi(p: &SetPartition, sigma: &Pattern) -> SetPartition {
    apply_phi_reading(p, sigma, ReadDirection::TopToBottom)
}

/// [`apply_phi`] with the legality test reading the stack in `direction`.
pub fn apply_phi_reading(
    p: &SetPartition,
    sigma: &Pattern,
    direction: ReadDirection,
) -> SetPartition {
    let out = run_machine(
        p.letters(),
        |stack, x| push_is_legal_reading(stack, x, sigma, direction),
        |_, _, _, _| {},
    );
    SetPartition::from_vec(out)
}

/// Per-letter occurrence counts inside the stack.
enum StackCounts {
    Dense(Vec<u32>),
    Sparse(HashMap<Letter, u32>),
}

impl StackCounts {
    fn for_word(p: &SetPartition) -> Self {
        let max = p.max_letter() as usize;
        if max <= 4 * p.len() + 64 {
            StackCounts::Dense(vec![0; max + 1])
        } else {
            StackCounts::Sparse(HashMap::new())
        }
    }

    fn get(&self, x: Letter) -> u32 {
        match self {
            StackCounts::Dense(v) => v[x as usize],
            StackCounts::Sparse(m) => m.get(&x).copied().unwrap_or(0),
        }
    }

    fn bump(&mut self, x: Letter, delta: i32) {
        match self {
            StackCounts::Dense(v) => v[x as usize] = (v[x as usize] as i32 + delta) as u32,
            StackCounts::Sparse(m) => {
                let e = m.entry(x).or_insert(0);
                *e = (*e as i32 + delta) as u32;
            }
        }
    }
}

/// `φ_aba` in O(1) per event: an `aba`-avoiding stack keeps every letter in a
/// single run, so `x` may be pushed iff it is absent or is the top letter.
pub fn apply_phi_aba(p: &SetPartition) -> SetPartition {
    let input = p.letters();
    let mut counts = StackCounts::for_word(p);
    let mut stack: Vec<Letter> = Vec::with_capacity(input.len());
    let mut output: Vec<Letter> = Vec::with_capacity(input.len());
    let mut next = 0;
    while next < input.len() {
        let x = input[next];
        if counts.get(x) == 0 || stack.last() == Some(&x) {
            stack.push(x);
            counts.bump(x, 1);
            next += 1;
        } else {
            let top = stack.pop().expect("x is in the stack");
            counts.bump(top, -1);
            output.push(top);
        }
    }
    output.extend(stack.iter().rev());
    SetPartition::from_vec(output)
}

/// One pass, dispatching to the fast path for `aba`.
pub fn phi(p: &SetPartition, sigma: &Pattern) -> SetPartition {
    if sigma.is_aba() {
        apply_phi_aba(p)
    } else {
        apply_phi(p, sigma)
    }
}

/// `φ_σ^k(p)`.
pub fn iterate(p: &SetPartition, sigma: &Pattern, k: usize) -> SetPartition {
    let mut current = p.clone();
    for _ in 0..k {
        current = phi(&current, sigma);
    }
    current
}

pub fn trace(p: &SetPartition, sigma: &Pattern) -> Trace {
    let mut events = Vec::with_capacity(2 * p.len());
    let out = run_machine(
        p.letters(),
        |stack, x| push_is_legal(stack, x, sigma),
        |kind, letter, stack, output| {
            events.push(TraceEvent {
                kind,
                letter,
                stack_after: stack.to_vec(),
                output_after: output.to_vec(),
            })
        },
    );
    Trace {
        input: p.clone(),
        sigma: sigma.clone(),
        events,
        output: SetPartition::from_vec(out),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Depth {
    /// Sorted after exactly this many passes, and not before.
    Sorted { passes: usize },
    /// The orbit revisits an unsorted class: pass `cycle_start` and pass
    /// `cycle_start + period` are equivalent, none of them sorted.
    NeverSorts { cycle_start: usize, period: usize },
}

/// Default pass budget: `N(p)` for `aba`, `4|p|` otherwise.
pub fn default_cap(p: &SetPartition, sigma: &Pattern) -> usize {
    if sigma.is_aba() {
        p.distinct()
    } else {
        4 * p.len()
    }
}

/// Smallest `t` with `φ_σ^t(p)` sorted, or a detected cycle of unsorted words.
pub fn sorting_depth(
    p: &SetPartition,
    sigma: &Pattern,
    cap: Option<usize>,
) -> Result<Depth, MachineError> {
    let cap = cap.unwrap_or_else(|| default_cap(p, sigma));
    // φ_σ commutes with relabeling, so classes suffice for cycle detection
    let mut seen: HashMap<CanonicalPartition, usize> = HashMap::new();
    let mut current = p.clone();
    for t in 0..=cap {
        if current.is_sorted() {
            return Ok(Depth::Sorted { passes: t });
        }
        if let Some(&first) = seen.get(&current.canonicalize()) {
            return Ok(Depth::NeverSorts {
                cycle_start: first,
                period: t - first,
            });
        }
        seen.insert(current.canonicalize(), t);
        if t < cap {
            current = phi(&current, sigma);
        }
    }
    Err(MachineError::Indeterminate { cap })
}
