//! Exact finite-`n` chain expectations for Gaussian entries.
//!
//! `E[Tr M^k]` and `E[Tr M^k Tr M^l]` expand into sums over cyclic index
//! chains of products of entries. For a fixed chain the entries fall into
//! reflection classes with multiplicities `m_c`, and independence plus the
//! Gaussian moments give `prod_c E[x^{m_c}]`. Summing over every chain is
//! exhaustive enumeration: `n^k` (or `n^{k+l}`) terms.
//!
//! Each term is an integer (a product of double factorials), so the sum is
//! accumulated exactly in `u128` and only the final normalisation by
//! `n^{(k+l)/2}` is done in floating point.

use rayon::prelude::*;

use crate::centro::class_index;
use crate::{Error, Result};

pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// `E[x^m]` for a standard normal: `(m-1)!!` for even `m`, zero for odd `m`.
pub fn gaussian_moment(m: u32) -> f64 {
    gaussian_moment_exact(m) as f64
}

fn gaussian_moment_exact(m: u32) -> u128 {
    if m % 2 == 1 {
        return 0;
    }
    (1..m).step_by(2).map(u128::from).product()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainExpectation {
    pub n: usize,
    pub k: usize,
    /// Second chain length, absent for a single chain.
    pub l: Option<usize>,
    /// The expectation including its `1/n^{(k+l)/2}` normalisation.
    pub value: f64,
    /// Exact integer sum before normalisation.
    pub numerator: u128,
    pub terms: u128,
}

fn term_count(n: usize, len: usize) -> Option<u128> {
    (n as u128).checked_pow(len as u32)
}

fn check_budget(n: usize, chains: &[usize], budget: u128) -> Result<u128> {
    let len: usize = chains.iter().sum();
    let what = match chains {
        [k] => format!("single chain (n={n}, k={k})"),
        [k, l] => format!("double chain (n={n}, k={k}, l={l})"),
        _ => format!("chains {chains:?} at n={n}"),
    };
    match term_count(n, len) {
        Some(t) if t <= budget => Ok(t),
        Some(t) => Err(Error::Budget { what, terms: t, budget }),
        None => Err(Error::Budget {
            what,
            terms: u128::MAX,
            budget,
        }),
    }
}

/// Exact integer sum over all index tuples for the given chain lengths.
fn enumerate(n: usize, chains: &[usize]) -> u128 {
    let len: usize = chains.iter().sum();
    // Parallel over the first index; each worker runs its own odometer.
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; len];
            idx[0] = first;
            let mut tally: Vec<(usize, u32)> = Vec::with_capacity(len);
            let mut total: u128 = 0;
            loop {
                total += chain_term(n, chains, &idx, &mut tally);
                // Advance positions 1..len as an odometer.
                let mut pos = len;
                loop {
                    pos -= 1;
                    if pos == 0 {
                        return total;
                    }
                    idx[pos] += 1;
                    if idx[pos] < n {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        })
        .sum()
}

#[inline]
fn chain_term(n: usize, chains: &[usize], idx: &[usize], tally: &mut Vec<(usize, u32)>) -> u128 {
    tally.clear();
    let mut start = 0;
    for &len in chains {
        let chain = &idx[start..start + len];
        for t in 0..len {
            let cell = chain[t] * n + chain[(t + 1) % len];
            let class = class_index(n, cell);
            match tally.iter_mut().find(|(c, _)| *c == class) {
                Some((_, m)) => *m += 1,
                None => tally.push((class, 1)),
            }
        }
        start += len;
    }
    let mut product: u128 = 1;
    for &(_, m) in tally.iter() {
        if m % 2 == 1 {
            return 0;
        }
        product *= gaussian_moment_exact(m);
    }
    product
}

fn normalise(numerator: u128, n: usize, total_len: usize) -> f64 {
    let nf = n as f64;
    let scale = nf.powi((total_len / 2) as i32);
    let value = numerator as f64 / scale;
    if total_len % 2 == 1 {
        value / nf.sqrt()
    } else {
        value
    }
}

fn check_args(n: usize, lens: &[usize]) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("order must be positive".into()));
    }
    if lens.contains(&0) {
        return Err(Error::Config("chain lengths must be positive".into()));
    }
    Ok(())
}

/// Exact `E[Tr M^k]`.
pub fn oracle_single_chain(n: usize, k: usize) -> Result<ChainExpectation> {
    oracle_single_chain_with_budget(n, k, DEFAULT_BUDGET)
}

pub fn oracle_single_chain_with_budget(n: usize, k: usize, budget: u128) -> Result<ChainExpectation> {
    check_args(n, &[k])?;
    let terms = check_budget(n, &[k], budget)?;
    let numerator = enumerate(n, &[k]);
    Ok(ChainExpectation {
        n,
        k,
        l: None,
        value: normalise(numerator, n, k),
        numerator,
        terms,
    })
}

/// Exact `E[Tr M^k Tr M^l]`.
pub fn oracle_double_chain(n: usize, k: usize, l: usize) -> Result<ChainExpectation> {
    oracle_double_chain_with_budget(n, k, l, DEFAULT_BUDGET)
}

pub fn oracle_double_chain_with_budget(n: usize, k: usize, l: usize, budget: u128) -> Result<ChainExpectation> {
    check_args(n, &[k, l])?;
    let terms = check_budget(n, &[k, l], budget)?;
    let numerator = enumerate(n, &[k, l]);
    Ok(ChainExpectation {
        n,
        k,
        l: Some(l),
        value: normalise(numerator, n, k + l),
        numerator,
        terms,
    })
}

/// Exact values over a grid, `n` outermost. An empty `l_list` gives single
/// chains. Every tuple is checked against the budget before any enumeration
/// starts.
pub fn convergence_table(
    k_list: &[usize],
    l_list: &[usize],
    n_list: &[usize],
    budget: u128,
) -> Result<Vec<ChainExpectation>> {
    let mut plan = Vec::new();
    for &n in n_list {
        for &k in k_list {
            if l_list.is_empty() {
                check_args(n, &[k])?;
                check_budget(n, &[k], budget)?;
                plan.push((n, k, None));
            } else {
                for &l in l_list {
                    check_args(n, &[k, l])?;
                    check_budget(n, &[k, l], budget)?;
                    plan.push((n, k, Some(l)));
                }
            }
        }
    }
    plan.into_iter()
        .map(|(n, k, l)| match l {
            None => oracle_single_chain_with_budget(n, k, budget),
            Some(l) => oracle_double_chain_with_budget(n, k, l, budget),
        })
        .collect()
}
