//! Greedy phonetic-coverage ordering of a corpus.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::types::Utterance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageResult {
    pub ordering: Vec<String>,
    /// Length of the shortest prefix covering every target phone, if any.
    pub cover_prefix_len: Option<usize>,
    pub uncovered: BTreeSet<String>,
    /// Target phones newly covered at each position of `ordering`.
    pub gains: Vec<usize>,
}

struct Candidate<'a> {
    id: &'a str,
    phones: BTreeSet<&'a str>,
    duration_s: f64,
}

/// More distinct phones first, then shorter, then by id.
fn diversity_order(a: &Candidate, b: &Candidate) -> Ordering {
    b.phones
        .len()
        .cmp(&a.phones.len())
        .then(a.duration_s.total_cmp(&b.duration_s))
        .then(a.id.cmp(b.id))
}

/// Repeatedly takes the utterance adding the most uncovered target phones
/// (ties: more distinct phones, shorter, smaller id). Once nothing adds
/// coverage the rest follow in descending phone diversity. `budget`
/// truncates the ordering; coverage is reported for the truncated list.
///
/// `targets` defaults to every phone observed in the corpus.
pub fn select_cover(
    utterances: &[Utterance],
    targets: Option<&BTreeSet<String>>,
    budget: Option<usize>,
) -> CoverageResult {
    let mut pool: Vec<Candidate> = utterances
        .iter()
        .map(|u| Candidate {
            id: &u.id,
            phones: u.phones().map(|(l, _)| l).collect(),
            duration_s: u.speech_duration_s(),
        })
        .collect();
    let targets: BTreeSet<String> = match targets {
        Some(t) => t.clone(),
        None => pool
            .iter()
            .flat_map(|c| c.phones.iter().map(|p| p.to_string()))
            .collect(),
    };

    let mut covered: BTreeSet<&str> = BTreeSet::new();
    let mut ordering = Vec::with_capacity(pool.len());
    let mut gains = Vec::with_capacity(pool.len());
    let gain = |c: &Candidate, covered: &BTreeSet<&str>| {
        c.phones
            .iter()
            .filter(|p| targets.contains(**p) && !covered.contains(**p))
            .count()
    };

    while !pool.is_empty() {
        let best = pool
            .iter()
            .enumerate()
            .map(|(i, c)| (i, gain(c, &covered)))
            .filter(|&(_, g)| g > 0)
            .min_by(|&(i, gi), &(j, gj)| gj.cmp(&gi).then(diversity_order(&pool[i], &pool[j])));
        let Some((i, g)) = best else { break };
        let c = pool.remove(i);
        covered.extend(c.phones.iter().filter(|p| targets.contains(**p)));
        ordering.push(c.id.to_string());
        gains.push(g);
    }
    pool.sort_by(diversity_order);
    for c in pool {
        ordering.push(c.id.to_string());
        gains.push(0);
    }

    if let Some(b) = budget {
        ordering.truncate(b);
        gains.truncate(b);
    }
    let mut running = 0;
    let mut cover_prefix_len = None;
    for (i, g) in gains.iter().enumerate() {
        running += g;
        if running == targets.len() {
            cover_prefix_len = Some(i + 1);
            break;
        }
    }
    let reached: usize = gains.iter().sum();
    let uncovered = if reached == targets.len() {
        BTreeSet::new()
    } else {
        let chosen: BTreeSet<&str> = ordering.iter().map(String::as_str).collect();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for u in utterances.iter().filter(|u| chosen.contains(u.id.as_str())) {
            seen.extend(u.phones().map(|(l, _)| l));
        }
        targets
            .iter()
            .filter(|t| !seen.contains(t.as_str()))
            .cloned()
            .collect()
    };

    CoverageResult {
        ordering,
        cover_prefix_len,
        uncovered,
        gains,
    }
}

/// Prefix length at which `ordering` first covers all targets.
pub fn prefix_cover_len(
    utterances: &[Utterance],
    ordering: &[&str],
    targets: &BTreeSet<String>,
) -> Option<usize> {
    let mut covered: BTreeSet<&str> = BTreeSet::new();
    if targets.is_empty() {
        return Some(0);
    }
    for (i, id) in ordering.iter().enumerate() {
        if let Some(u) = utterances.iter().find(|u| u.id == *id) {
            covered.extend(u.phones().map(|(l, _)| l).filter(|l| targets.contains(*l)));
        }
        if covered.len() == targets.len() {
            return Some(i + 1);
        }
    }
    None
}

pub const COVERAGE_HEADER: &str = "rank\tutterance_id\tnew_phones\tcovered";

pub fn coverage_to_tsv(result: &CoverageResult) -> String {
    let mut out = String::new();
    out.push_str(COVERAGE_HEADER);
    out.push('\n');
    let mut running = 0;
    for (i, (id, g)) in result.ordering.iter().zip(&result.gains).enumerate() {
        running += g;
        writeln!(out, "{}\t{}\t{}\t{}", i + 1, id, g, running).unwrap();
    }
    out
}
