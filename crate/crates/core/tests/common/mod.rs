//! Brute-force oracles that share no code with the library's algorithms.

#![allow(dead_code)]

use stacksort::SetPartition;

pub fn word(s: &str) -> SetPartition {
    SetPartition::parse(s).unwrap()
}

/// Relabel by first occurrence with a linear scan.
pub fn relabel(letters: &[u32]) -> Vec<u32> {
    let mut order: Vec<u32> = Vec::new();
    letters
        .iter()
        .map(|l| match order.iter().position(|o| o == l) {
            Some(i) => i as u32 + 1,
            None => {
                order.push(*l);
                order.len() as u32
            }
        })
        .collect()
}

/// Every subsequence of exactly `pattern.len()` letters, by bitmask.
pub fn contains_by_subsets(letters: &[u32], pattern: &[u32]) -> bool {
    let n = letters.len();
    assert!(n < 25, "oracle is exponential");
    (0u32..(1 << n))
        .filter(|mask| mask.count_ones() as usize == pattern.len())
        .any(|mask| {
            let sub: Vec<u32> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| letters[i])
                .collect();
            relabel(&sub) == relabel(pattern)
        })
}

/// Stack machine whose legality test enumerates subsets of the whole stack.
pub fn naive_phi(letters: &[u32], pattern: &[u32]) -> Vec<u32> {
    let mut stack: Vec<u32> = Vec::new();
    let mut out = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let mut reading = vec![letters[i]];
        reading.extend(stack.iter().rev());
        if stack.is_empty() || !contains_by_subsets(&reading, pattern) {
            stack.push(letters[i]);
            i += 1;
        } else {
            out.push(stack.pop().unwrap());
        }
    }
    while let Some(t) = stack.pop() {
        out.push(t);
    }
    out
}

pub fn naive_sorted(letters: &[u32]) -> bool {
    // a letter reappearing after a different one means a split
    letters.iter().enumerate().all(|(i, a)| {
        letters[i..]
            .iter()
            .position(|b| b != a)
            .map(|gap| !letters[i + gap..].contains(a))
            .unwrap_or(true)
    })
}

/// All words over `1..=n` of length `len`, filtered to restricted-growth words
/// using exactly `n` letters, in lexicographic order.
pub fn rgs_by_filter(n: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if n == 0 {
        if len == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let total = (n as u64).pow(len as u32);
    for code in 0..total {
        let mut c = code;
        let mut w = vec![0u32; len];
        for slot in w.iter_mut().rev() {
            *slot = (c % n as u64) as u32 + 1;
            c /= n as u64;
        }
        if relabel(&w) == w && w.iter().max().copied() == Some(n) {
            out.push(w);
        }
    }
    out
}

/// Stirling numbers of the second kind by inclusion-exclusion.
pub fn stirling_inclusion_exclusion(len: u32, n: u32) -> i128 {
    let binom = |a: u32, b: u32| -> i128 {
        (0..b).fold(1i128, |acc, i| acc * (a - i) as i128 / (i + 1) as i128)
    };
    let fact: i128 = (1..=n as i128).product();
    let sum: i128 = (0..=n)
        .map(|j| {
            let sign = if (n - j).is_multiple_of(2) { 1 } else { -1 };
            sign * binom(n, j) * (j as i128).pow(len)
        })
        .sum();
    sum / fact
}

/// Bell numbers via the Bell triangle.
pub fn bell_triangle(len: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..len {
        let mut next = vec![*row.last().unwrap()];
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

/// `n` random words of length `0..=max_len` over up to `alphabet` letters.
pub fn random_words(seed: u64, n: usize, max_len: usize, alphabet: u32) -> Vec<SetPartition> {
    use rand::{rngs::StdRng, Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            let k = rng.gen_range(1..=alphabet);
            SetPartition::new((0..len).map(|_| rng.gen_range(1..=k)).collect()).unwrap()
        })
        .collect()
}
