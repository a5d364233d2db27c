//! Executable checks of the structural facts about `φ_aba`: the head
//! decomposition identity, clump growth, the lockstep clump chain of slow
//! words, truncation commutation, the minimal and next-minimal witness
//! theorems, the witness families and the `N(p)` pass bound.
//!
//! Every check runs over an exhaustive, lexicographically ordered corpus and
//! reports the first failure instead of aborting.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::enumeration::{
    canonical_partitions, find_witnesses_parallel, CellSpec, Family, WitnessProfile,
    DEFAULT_SHARD_DEPTH,
};
use crate::machine::{apply_phi_aba, iterate, sorting_depth, Depth, Pattern};
use crate::partition::{Letter, SetPartition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerificationError {
    #[error("the empty word has no head letter")]
    EmptyWord,
    #[error("theorem checks need N >= 3, got {0}")]
    TooFewLetters(usize),
    #[error("probe needs a pattern other than aba")]
    AbaProbe,
}

/// `p = h^{l_1} s_1 h^{l_2} s_2 ... h^{l_m} s_m h^{l_{m+1}}` with `h = p_1`
/// absent from every `s_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadDecomposition {
    pub head: Letter,
    /// `(l_i, s_i)` for `i = 1..=m`; each `l_i >= 1` and `s_i` nonempty.
    pub blocks: Vec<(usize, SetPartition)>,
    /// `l_{m+1}`; may be 0 unless `m = 0`.
    pub trailing: usize,
}

impl HeadDecomposition {
    /// `[l_1, ..., l_{m+1}]`.
    pub fn exponents(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .map(|(l, _)| *l)
            .chain(std::iter::once(self.trailing))
            .collect()
    }

    pub fn segments(&self) -> impl Iterator<Item = &SetPartition> {
        self.blocks.iter().map(|(_, s)| s)
    }

    pub fn reassemble(&self) -> SetPartition {
        let mut letters = Vec::new();
        for (l, s) in &self.blocks {
            letters.extend(std::iter::repeat_n(self.head, *l));
            letters.extend_from_slice(s.letters());
        }
        letters.extend(std::iter::repeat_n(self.head, self.trailing));
        SetPartition::from_vec(letters)
    }
}

pub fn decompose_by_head(p: &SetPartition) -> Result<HeadDecomposition, VerificationError> {
    let head = p.get(1).ok_or(VerificationError::EmptyWord)?;
    let mut blocks = Vec::new();
    let mut exponent = 0;
    let mut segment: Vec<Letter> = Vec::new();
    for &l in p.letters() {
        if l == head {
            if !segment.is_empty() {
                blocks.push((
                    exponent,
                    SetPartition::from_vec(std::mem::take(&mut segment)),
                ));
                exponent = 0;
            }
            exponent += 1;
        } else {
            segment.push(l);
        }
    }
    if !segment.is_empty() {
        blocks.push((exponent, SetPartition::from_vec(segment)));
        exponent = 0;
    }
    Ok(HeadDecomposition {
        head,
        blocks,
        trailing: exponent,
    })
}

/// `φ_aba` evaluated purely through the head decomposition, recursing into
/// the segments: `φ(s_1) ... φ(s_m) h^{l_1 + ... + l_{m+1}}`. Shares no code
/// with the stack machine.
pub fn phi_aba_by_decomposition(p: &SetPartition) -> SetPartition {
    let Ok(d) = decompose_by_head(p) else {
        return SetPartition::empty();
    };
    let mut letters = Vec::with_capacity(p.len());
    for s in d.segments() {
        letters.extend_from_slice(phi_aba_by_decomposition(s).letters());
    }
    let total: usize = d.exponents().iter().sum();
    letters.extend(std::iter::repeat_n(d.head, total));
    SetPartition::from_vec(letters)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub word: SetPartition,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub scope: String,
    pub passed: bool,
    /// Number of words (or values) examined.
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
    /// Free-form supporting figures, e.g. family counts.
    pub detail: String,
}

impl CheckResult {
    fn new(
        name: &str,
        scope: String,
        checked: u64,
        counterexample: Option<Counterexample>,
        detail: String,
    ) -> Self {
        CheckResult {
            name: name.to_string(),
            scope,
            passed: counterexample.is_none(),
            checked,
            counterexample,
            detail,
        }
    }
}

fn mismatch(word: &SetPartition, expected: impl ToString, actual: impl ToString) -> Counterexample {
    Counterexample {
        word: word.clone(),
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

/// The words a corpus check runs over.
#[derive(Debug, Clone)]
pub enum Corpus {
    /// Every class of length `0..=max_len`: shorter first, then by letter
    /// count, then lexicographically.
    Exhaustive {
        max_len: usize,
    },
    Words(Vec<SetPartition>),
}

impl Corpus {
    pub fn exhaustive(max_len: usize) -> Self {
        Corpus::Exhaustive { max_len }
    }

    pub fn describe(&self) -> String {
        match self {
            Corpus::Exhaustive { max_len } => format!("all classes with |p| <= {max_len}"),
            Corpus::Words(w) => format!("{} listed words", w.len()),
        }
    }

    fn cells(max_len: usize) -> Vec<CellSpec> {
        (0..=max_len)
            .flat_map(|l| {
                let lo = if l == 0 { 0 } else { 1 };
                (lo..=l).map(move |n| CellSpec::new(n, l))
            })
            .collect()
    }

    /// Runs `check` on each word, returning the count examined and the first
    /// failure in corpus order.
    fn first_failure<F>(&self, check: F) -> (u64, Option<Counterexample>)
    where
        F: Fn(&SetPartition) -> Option<Counterexample> + Sync,
    {
        match self {
            Corpus::Exhaustive { max_len } => {
                let per_cell: Vec<(u64, Option<Counterexample>)> = Corpus::cells(*max_len)
                    .par_iter()
                    .map(|&cell| {
                        let mut n = 0;
                        for p in canonical_partitions(cell) {
                            n += 1;
                            if let Some(cx) = check(&p) {
                                return (n, Some(cx));
                            }
                        }
                        (n, None)
                    })
                    .collect();
                let checked = per_cell.iter().map(|(n, _)| n).sum();
                (checked, per_cell.into_iter().find_map(|(_, cx)| cx))
            }
            Corpus::Words(words) => {
                let mut n = 0;
                for p in words {
                    n += 1;
                    if let Some(cx) = check(p) {
                        return (n, Some(cx));
                    }
                }
                (n, None)
            }
        }
    }
}

/// Stack machine output against the head-decomposition right-hand side.
pub fn check_lemma_decomposition(corpus: &Corpus) -> CheckResult {
    let (checked, cx) = corpus.first_failure(|p| {
        let machine = apply_phi_aba(p);
        let rhs = phi_aba_by_decomposition(p);
        (machine != rhs).then(|| mismatch(p, &rhs, &machine))
    });
    CheckResult::new(
        "lemma-decomposition",
        corpus.describe(),
        checked,
        cx,
        String::new(),
    )
}

/// One pass strictly increases the clumped count of an unsorted word.
pub fn check_clump_growth(corpus: &Corpus) -> CheckResult {
    let (checked, cx) = corpus.first_failure(|p| {
        if p.is_sorted() {
            return None;
        }
        let before = p.clumped_count();
        let after = apply_phi_aba(p).clumped_count();
        (after <= before).then(|| mismatch(p, format!("C > {before}"), format!("C = {after}")))
    });
    CheckResult::new(
        "clump-growth",
        corpus.describe(),
        checked,
        cx,
        String::new(),
    )
}

/// `trunc(φ(p)) = trunc(φ(trunc(p)))`.
pub fn check_trunc_commute(corpus: &Corpus) -> CheckResult {
    let (checked, cx) = corpus.first_failure(|p| {
        let lhs = apply_phi_aba(p).truncate();
        let rhs = apply_phi_aba(&p.truncate()).truncate();
        (lhs != rhs).then(|| mismatch(p, &lhs, &rhs))
    });
    CheckResult::new(
        "trunc-commute",
        corpus.describe(),
        checked,
        cx,
        String::new(),
    )
}

/// The clumped-count chain `C(φ^i(p))` for `i = 0..=steps`.
pub fn clump_chain(p: &SetPartition, steps: usize) -> Vec<usize> {
    let mut chain = Vec::with_capacity(steps + 1);
    let mut current = p.clone();
    chain.push(current.clumped_count());
    for _ in 0..steps {
        current = apply_phi_aba(&current);
        chain.push(current.clumped_count());
    }
    chain
}

/// Each witness has `C(φ^i(p)) = i` for `0 <= i <= N`, so it is sorted at pass
/// `N` and not before.
pub fn check_cor_lockstep(witnesses: &[SetPartition]) -> CheckResult {
    let cx = witnesses.iter().find_map(|p| {
        let n = p.distinct();
        let chain = clump_chain(p, n);
        let expected: Vec<usize> = (0..=n).collect();
        (chain != expected).then(|| mismatch(p, format!("{expected:?}"), format!("{chain:?}")))
    });
    CheckResult::new(
        "lockstep",
        format!("{} witnesses", witnesses.len()),
        witnesses.len() as u64,
        cx,
        String::new(),
    )
}

fn require_n(n: usize) -> Result<(), VerificationError> {
    if n < 3 {
        return Err(VerificationError::TooFewLetters(n));
    }
    Ok(())
}

fn witnesses(n: usize, length: usize) -> (u128, Vec<WitnessProfile>) {
    let report =
        find_witnesses_parallel(CellSpec::new(n, length), DEFAULT_SHARD_DEPTH).expect("n >= 1");
    (report.total_classes, report.witnesses)
}

/// No witness shorter than `2N`, and `(a_1 ... a_N)^2` is the only one of length `2N`.
pub fn check_theorem_minimal(n: usize) -> Result<CheckResult, VerificationError> {
    require_n(n)?;
    let square = SetPartition::from_vec((1..=n as Letter).collect()).repeat(2);
    let mut checked = 0;
    let mut cx = None;
    for length in n..=2 * n {
        let (total, found) = witnesses(n, length);
        checked += total as u64;
        if length < 2 * n {
            if let Some(w) = found.first() {
                cx = Some(mismatch(
                    &w.witness,
                    "no witness",
                    format!("{} witnesses at L={length}", found.len()),
                ));
                break;
            }
        } else {
            let words: Vec<&SetPartition> =
                found.iter().map(|w| w.witness.as_partition()).collect();
            if words != [&square] {
                let word = words
                    .first()
                    .map(|w| (*w).clone())
                    .unwrap_or_else(|| square.clone());
                let actual = words
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                cx = Some(mismatch(&word, &square, format!("[{actual}]")));
            }
        }
    }
    Ok(CheckResult::new(
        "theorem-minimal",
        format!("N={n}, N <= L <= {}", 2 * n),
        checked,
        cx,
        format!("unique witness {square}"),
    ))
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(N+1, 2) + 2 C(N, 2)`.
pub fn next_minimal_count(n: usize) -> u64 {
    let n = n as u64;
    binomial(n + 1, 2) + 2 * binomial(n, 2)
}

/// Witnesses of length `2(N-1) + m` whose first letter occurs `m` times:
/// `C(2N+m-3, m-1) - m C(N+m-3, m-1)`.
pub fn head_family_count(n: usize, m: usize) -> i128 {
    let (n, m) = (n as u64, m as u64);
    binomial(2 * n + m - 3, m - 1) as i128 - (m * binomial(n + m - 3, m - 1)) as i128
}

pub fn check_theorem_count(n: usize) -> Result<CheckResult, VerificationError> {
    require_n(n)?;
    let (total, found) = witnesses(n, 2 * n + 1);
    let expected = next_minimal_count(n);
    let actual = found.len() as u64;
    let cx = (actual != expected).then(|| {
        let word = found
            .first()
            .map(|w| w.witness.as_partition().clone())
            .unwrap_or_default();
        mismatch(&word, expected, actual)
    });
    Ok(CheckResult::new(
        "theorem-count",
        format!("N={n}, L={}", 2 * n + 1),
        total as u64,
        cx,
        format!("count {actual}"),
    ))
}

/// Exactly one letter of multiplicity 3, the rest 2.
pub fn check_multiplicity_profile(n: usize) -> Result<CheckResult, VerificationError> {
    require_n(n)?;
    let (_, found) = witnesses(n, 2 * n + 1);
    let cx = found.iter().find_map(|w| {
        let mut sorted = w.multiplicities.clone();
        sorted.sort_unstable();
        let mut expected = vec![2; n - 1];
        expected.push(3);
        (sorted != expected)
            .then(|| mismatch(&w.witness, format!("{expected:?}"), format!("{sorted:?}")))
    });
    Ok(CheckResult::new(
        "multiplicity-profile",
        format!("N={n}, L={}", 2 * n + 1),
        found.len() as u64,
        cx,
        String::new(),
    ))
}

/// Family of a `2N+1` witness read off the slice conditions:
/// `mcount` of the part after the second head occurrence, or of the part
/// before it, equals 2.
pub fn classify_by_slices(p: &SetPartition) -> Option<Family> {
    let heads = p.indices_of(p.get(1)?);
    match heads.len() {
        3 => Some(Family::HeadTriple),
        2 => {
            let second = heads.ith(2).ok()?;
            let tail = p.slice(second + 1, p.len()).ok()?.mcount() == 2;
            let prefix = p.slice(1, second - 1).ok()?.mcount() == 2;
            match (tail, prefix) {
                (true, false) => Some(Family::TailHeavy),
                (false, true) => Some(Family::PrefixHeavy),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Both slices around the second head occurrence have `mcount <= 2`.
fn head_slices_bounded(p: &SetPartition) -> bool {
    let Ok(second) = p.indices_of(p.letters()[0]).ith(2) else {
        return false;
    };
    let left = p.slice(1, second).map(|s| s.mcount() <= 2).unwrap_or(false);
    let right = p
        .slice(second, p.len())
        .map(|s| s.mcount() <= 2)
        .unwrap_or(false);
    left && right
}

/// Splits the `2N+1` witnesses into the three families two ways (triple
/// letter position, and slice `mcount`), requires both to agree and to match
/// `(C(N,2), C(N,2), C(N+1,2))`, and checks the slice bounds for two-head
/// witnesses.
pub fn check_family_counts(n: usize) -> Result<CheckResult, VerificationError> {
    require_n(n)?;
    let (_, found) = witnesses(n, 2 * n + 1);
    let mut counts = [0u64; 3];
    let index = |f: Family| match f {
        Family::TailHeavy => 0,
        Family::PrefixHeavy => 1,
        Family::HeadTriple => 2,
    };
    let mut cx = None;
    for w in &found {
        let by_position = w.family;
        let by_slices = classify_by_slices(&w.witness);
        if by_position.is_none() || by_position != by_slices {
            let show = |f: Option<Family>| f.map(Family::name).unwrap_or("none");
            cx = Some(mismatch(
                &w.witness,
                format!("one family, position rule {}", show(by_position)),
                format!("slice rule {}", show(by_slices)),
            ));
            break;
        }
        if w.first_letter_mult == 2 && !head_slices_bounded(&w.witness) {
            cx = Some(mismatch(
                &w.witness,
                "mcount <= 2 on both head slices",
                "mcount > 2",
            ));
            break;
        }
        counts[index(by_position.expect("checked above"))] += 1;
    }
    let n64 = n as u64;
    let expected = [binomial(n64, 2), binomial(n64, 2), binomial(n64 + 1, 2)];
    if cx.is_none() && counts != expected {
        let word = found
            .first()
            .map(|w| w.witness.as_partition().clone())
            .unwrap_or_default();
        cx = Some(mismatch(
            &word,
            format!("{expected:?}"),
            format!("{counts:?}"),
        ));
    }
    if cx.is_none() && head_family_count(n, 3) != binomial(n64 + 1, 2) as i128 {
        cx = Some(mismatch(
            &SetPartition::empty(),
            binomial(n64 + 1, 2),
            head_family_count(n, 3),
        ));
    }
    Ok(CheckResult::new(
        "family-counts",
        format!("N={n}, L={}", 2 * n + 1),
        found.len() as u64,
        cx,
        format!(
            "tail-heavy={} prefix-heavy={} head-triple={}",
            counts[0], counts[1], counts[2]
        ),
    ))
}

/// `C(2N, 2) - 3 C(N, 2) = C(N+1, 2)` for every `N` in the range.
pub fn check_binomial_identity(range: std::ops::RangeInclusive<usize>) -> CheckResult {
    let scope = format!("N in {}..={}", range.start(), range.end());
    let mut checked = 0;
    let mut cx = None;
    for n in range {
        checked += 1;
        let n64 = n as u64;
        let lhs = binomial(2 * n64, 2) as i128 - 3 * binomial(n64, 2) as i128;
        let rhs = binomial(n64 + 1, 2) as i128;
        if lhs != rhs {
            cx = Some(mismatch(
                &SetPartition::empty(),
                format!("N={n}: {rhs}"),
                lhs,
            ));
            break;
        }
    }
    CheckResult::new("binomial-identity", scope, checked, cx, String::new())
}

/// Every class of length `<= max_len` is sorted after `N(p)` passes.
pub fn check_upper_bound(max_len: usize) -> CheckResult {
    let corpus = Corpus::exhaustive(max_len);
    let (checked, cx) = corpus.first_failure(|p| {
        let out = iterate(p, &Pattern::aba(), p.distinct());
        (!out.is_sorted()).then(|| mismatch(p, "sorted", &out))
    });
    CheckResult::new("upper-bound", corpus.describe(), checked, cx, String::new())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ProbeOutcome {
    /// `word` never sorts: its orbit cycles through unsorted classes.
    Found {
        word: SetPartition,
        cycle_start: usize,
        period: usize,
    },
    /// Nothing found within the bounds; not a proof that none exists.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub sigma: Pattern,
    pub max_len: usize,
    pub cap: usize,
    pub checked: u64,
    pub outcome: ProbeOutcome,
}

/// Looks for a class of length `<= max_len` that `φ_σ` never sorts, in corpus
/// order. Words that exhaust `cap` passes without cycling are skipped.
pub fn probe_sigma(
    sigma: &Pattern,
    max_len: usize,
    cap: usize,
) -> Result<ProbeReport, VerificationError> {
    if sigma.is_aba() {
        return Err(VerificationError::AbaProbe);
    }
    let mut checked = 0;
    for cell in Corpus::cells(max_len) {
        for p in canonical_partitions(cell) {
            checked += 1;
            if let Ok(Depth::NeverSorts {
                cycle_start,
                period,
            }) = sorting_depth(&p, sigma, Some(cap))
            {
                return Ok(ProbeReport {
                    sigma: sigma.clone(),
                    max_len,
                    cap,
                    checked,
                    outcome: ProbeOutcome::Found {
                        word: p.into_partition(),
                        cycle_start,
                        period,
                    },
                });
            }
        }
    }
    Ok(ProbeReport {
        sigma: sigma.clone(),
        max_len,
        cap,
        checked,
        outcome: ProbeOutcome::Indeterminate,
    })
}

/// Names accepted by [`run_suite`], in the order `all` runs them.
pub const SUITES: &[&str] = &[
    "lemma-decomposition",
    "clump-growth",
    "trunc-commute",
    "upper-bound",
    "theorem-minimal",
    "theorem-count",
    "lockstep",
    "multiplicity-profile",
    "family-counts",
    "binomial-identity",
];

#[derive(Debug, Clone)]
pub struct SuiteBounds {
    pub n_min: usize,
    pub n_max: usize,
    /// Length bound of the exhaustive corpus for the per-word identities.
    pub corpus_len: usize,
    /// Length bound for the `N(p)`-pass bound.
    pub upper_len: usize,
    pub identity_n_max: usize,
}

impl Default for SuiteBounds {
    fn default() -> Self {
        SuiteBounds {
            n_min: 3,
            n_max: 5,
            corpus_len: 8,
            upper_len: 9,
            identity_n_max: 20,
        }
    }
}

/// Runs one named suite (or `all`), one result per check and letter count.
/// Returns `None` for an unknown name.
pub fn run_suite(name: &str, bounds: &SuiteBounds) -> Option<Vec<CheckResult>> {
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(s, bounds)?);
        }
        return Some(out);
    }
    let corpus = Corpus::exhaustive(bounds.corpus_len);
    let per_n = |f: fn(usize) -> Result<CheckResult, VerificationError>| -> Vec<CheckResult> {
        (bounds.n_min.max(3)..=bounds.n_max)
            .map(|n| f(n).expect("n >= 3"))
            .collect()
    };
    let results = match name {
        "lemma-decomposition" => vec![check_lemma_decomposition(&corpus)],
        "clump-growth" => vec![check_clump_growth(&corpus)],
        "trunc-commute" => vec![check_trunc_commute(&corpus)],
        "upper-bound" => vec![check_upper_bound(bounds.upper_len)],
        "theorem-minimal" => per_n(check_theorem_minimal),
        "theorem-count" => per_n(check_theorem_count),
        "multiplicity-profile" => per_n(check_multiplicity_profile),
        "family-counts" => per_n(check_family_counts),
        "lockstep" => {
            let mut words = Vec::new();
            for n in bounds.n_min.max(3)..=bounds.n_max {
                for length in [2 * n, 2 * n + 1] {
                    let (_, found) = witnesses(n, length);
                    words.extend(found.into_iter().map(|w| w.witness.into_partition()));
                }
            }
            vec![check_cor_lockstep(&words)]
        }
        "binomial-identity" => vec![check_binomial_identity(3..=bounds.identity_n_max)],
        _ => return None,
    };
    Some(results)
}
