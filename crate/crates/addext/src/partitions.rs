//! Vector-space partitions of `K^m`: verification, the exact minimum part
//! count `σ(m)` by backtracking exact cover, and the classical lower bound
//! `q^⌈m/2⌉ + 1`.
//!
//! The searcher covers the nonzero vectors with pairwise trivially
//! intersecting proper subspaces, always branching on the candidates that
//! contain the lexicographically smallest uncovered vector, with iterative
//! deepening on the part count. That branching rule is a sound symmetry
//! cut: some part must contain that vector.

use thiserror::Error;

use crate::exec::{self, Exec};
use crate::linalg::{enumerate_subspaces, vec_index, LinalgError, Subspace};
use crate::field::KField;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("no partition into proper nonzero subspaces exists for m = {0}")]
    Degenerate(usize),
    #[error("budget exceeded after {used} nodes (budget {budget})")]
    BudgetExceeded { used: u64, budget: u64 },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A collection of proper nonzero subspaces covering every nonzero vector of
/// `K^m` exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub ambient: usize,
    pub parts: Vec<Subspace>,
}

/// Checks the exact-cover property for the given parts.
pub fn is_partition(k: &KField, m: usize, parts: &[Subspace]) -> Result<bool, PartitionError> {
    for p in parts {
        if p.ambient() != m {
            return Err(PartitionError::AmbientMismatch(m, p.ambient()));
        }
    }
    if parts.iter().any(|p| p.dim() == 0 || p.dim() >= m) {
        return Ok(false);
    }
    let total = (u64::from(k.q())).pow(m as u32) as usize;
    let mut counts = vec![0u32; total];
    for p in parts {
        for v in p.enumerate_vectors(k)? {
            let idx = vec_index(k, &v) as usize;
            if idx != 0 {
                counts[idx] += 1;
            }
        }
    }
    Ok(counts[1..].iter().all(|&c| c == 1))
}

/// The lower bound `q^⌈m/2⌉ + 1` on the number of parts, `m ≥ 2`.
pub fn beutelspacher_bound(q: u32, m: usize) -> Result<u64, PartitionError> {
    if m < 2 {
        return Err(PartitionError::Degenerate(m));
    }
    Ok(u64::from(q).pow(m.div_ceil(2) as u32) + 1)
}

struct CoverProblem {
    alphabet: Vec<Subspace>,
    masks: Vec<u128>,
    containing: Vec<Vec<usize>>, // per nonzero-vector bit
    full: u128,
}

fn build_problem(k: &KField, m: usize) -> Result<CoverProblem, PartitionError> {
    let nonzero = u128::from(k.q()).pow(m as u32) - 1;
    if nonzero > 127 {
        return Err(PartitionError::TooLarge(format!(
            "q^m − 1 = {nonzero} nonzero vectors exceed the 127-bit cover mask"
        )));
    }
    let dims: Vec<usize> = (1..m).collect();
    let mut alphabet = enumerate_subspaces(k, m, Some(&dims))?;
    // large parts first: covers complete sooner, order stays deterministic
    alphabet.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.cmp(b)));
    let mut masks = Vec::with_capacity(alphabet.len());
    for s in &alphabet {
        let mut mask = 0u128;
        for v in s.enumerate_vectors(k)? {
            let idx = vec_index(k, &v);
            if idx != 0 {
                mask |= 1u128 << (idx - 1);
            }
        }
        masks.push(mask);
    }
    let mut containing = vec![Vec::new(); nonzero as usize];
    for (ci, &mask) in masks.iter().enumerate() {
        for bit in 0..nonzero as usize {
            if mask & (1u128 << bit) != 0 {
                containing[bit].push(ci);
            }
        }
    }
    Ok(CoverProblem {
        alphabet,
        masks,
        containing,
        full: (1u128 << nonzero) - 1,
    })
}

fn dfs(
    problem: &CoverProblem,
    covered: u128,
    chosen: &mut Vec<usize>,
    remaining: usize,
    nodes: &mut u64,
    budget: u64,
) -> Result<Option<Vec<usize>>, PartitionError> {
    if covered == problem.full {
        return Ok(Some(chosen.clone()));
    }
    if remaining == 0 {
        return Ok(None);
    }
    let bit = (!covered & problem.full).trailing_zeros() as usize;
    for &ci in &problem.containing[bit] {
        *nodes += 1;
        if *nodes > budget {
            return Err(PartitionError::BudgetExceeded {
                used: *nodes,
                budget,
            });
        }
        if problem.masks[ci] & covered != 0 {
            continue;
        }
        chosen.push(ci);
        let res = dfs(
            problem,
            covered | problem.masks[ci],
            chosen,
            remaining - 1,
            nodes,
            budget,
        )?;
        chosen.pop();
        if res.is_some() {
            return Ok(res);
        }
    }
    Ok(None)
}

/// Searches for a partition of `K^m` with at most `max_parts` parts. Returns
/// the first witness in deterministic order, or `None` as an exhaustive
/// nonexistence certificate. The node budget is split across the first
/// branching level, so outcomes are reproducible even in parallel.
pub fn exists_partition_with_at_most(
    k: &KField,
    m: usize,
    max_parts: usize,
    budget: u64,
    exec: Exec,
) -> Result<(Option<Partition>, u64), PartitionError> {
    if m < 2 {
        return Err(PartitionError::Degenerate(m));
    }
    let problem = build_problem(k, m)?;
    if max_parts == 0 {
        return Ok((None, 0));
    }
    let roots = problem.containing[0].clone();
    let share = (budget / roots.len().max(1) as u64).max(1);
    let outcomes = exec::map_ordered(exec, roots, |ci| {
        let mut nodes = 1u64;
        let mut chosen = vec![ci];
        let res = dfs(
            &problem,
            problem.masks[ci],
            &mut chosen,
            max_parts - 1,
            &mut nodes,
            share,
        );
        (res, nodes)
    });
    let mut total_nodes = 0u64;
    let mut first_hit: Option<Vec<usize>> = None;
    let mut budget_tripped = false;
    for (res, nodes) in outcomes {
        total_nodes += nodes;
        match res {
            Ok(Some(ids)) if first_hit.is_none() => first_hit = Some(ids),
            Ok(_) => {}
            Err(PartitionError::BudgetExceeded { .. }) => budget_tripped = true,
            Err(e) => return Err(e),
        }
    }
    if let Some(ids) = first_hit {
        let parts = ids.iter().map(|&i| problem.alphabet[i].clone()).collect();
        return Ok((
            Some(Partition {
                ambient: m,
                parts,
            }),
            total_nodes,
        ));
    }
    if budget_tripped {
        return Err(PartitionError::BudgetExceeded {
            used: total_nodes,
            budget,
        });
    }
    Ok((None, total_nodes))
}

/// Result of the exact minimum-part search.
#[derive(Clone, Debug)]
pub struct SigmaResult {
    pub sigma: usize,
    pub witness: Partition,
    pub nodes: u64,
}

pub fn sigma(k: &KField, m: usize, budget: u64) -> Result<SigmaResult, PartitionError> {
    sigma_exec(k, m, budget, Exec::default())
}

/// Exact `σ(m)` by iterative deepening on the part count.
pub fn sigma_exec(
    k: &KField,
    m: usize,
    budget: u64,
    exec: Exec,
) -> Result<SigmaResult, PartitionError> {
    if m < 2 {
        return Err(PartitionError::Degenerate(m));
    }
    let lines = (u64::from(k.q()).pow(m as u32) - 1) / u64::from(k.q() - 1);
    let mut used = 0u64;
    for t in 1..=lines as usize {
        let remaining = budget.saturating_sub(used);
        if remaining == 0 {
            return Err(PartitionError::BudgetExceeded {
                used,
                budget,
            });
        }
        let (hit, nodes) = exists_partition_with_at_most(k, m, t, remaining, exec)?;
        used += nodes;
        if let Some(witness) = hit {
            debug_assert!(is_partition(k, m, &witness.parts)?);
            return Ok(SigmaResult {
                sigma: t,
                witness,
                nodes: used,
            });
        }
    }
    unreachable!("the set of all lines always partitions K^m for m ≥ 2")
}
