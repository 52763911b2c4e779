//! Verification campaigns: enumerate codes and maps at small parameters,
//! assert the claimed conclusions case by case, and emit replayable JSON
//! reports.
//!
//! Campaign modes: `exhaustive` walks the whole map space, `pruned` walks
//! only weight-preserving maps via incremental pruning (partial image
//! assignments die as soon as any K-combination of assigned rows breaks
//! weight preservation), `sampled` draws seed-deterministic map indices.
//! An over-budget exhaustive run fails loudly instead of silently sampling.
//! Budgets for pruned runs are split across the first branching level, so
//! coverage figures are reproducible run to run.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{column_tuple_of_rows, weight, AdditiveCode, CodeError};
use crate::field::FieldError;
use crate::constructions::{self, BuildError};
use crate::exec::{self, Exec};
use crate::field::{enumerate_gl, FieldTower, KElem, KField, LElem};
use crate::isometry::{
    self, brute_force_extension_with_pool, is_isometry_direct, tuples_equivalent, AdditiveMap,
    IsometryError,
};
use crate::linalg::{enumerate_subspaces, LinalgError, Subspace};
use crate::lmat;
use crate::partitions::{self, PartitionError};
use crate::wire::{CodeJson, MapJson};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("budget exceeded: {needed} cases over budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Isometry(#[from] IsometryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Campaign identifiers; the serialized names are the wire vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Every K-linear isometry of a code of length at most `|K|` extends.
    Prop1,
    /// Oracle equivalence: direct weight preservation matches the profile
    /// criterion, and multiset equivalence matches brute-force existence.
    Prop2,
    /// MDS codes with `k_L ≠ 2`: every isometry extends.
    Prop3,
    /// MDS codes with `k_L = 2` and `n ≤ q^⌈m/2⌉`: every isometry extends;
    /// mechanism is the nonexistence of small partitions.
    Prop4,
    /// L-linear codes with `n ≤ q^⌈m/2⌉`: isometries with L-linear image
    /// extend.
    Prop5,
    /// MDS column spaces: `dim Σ_{i∈I} V_i = m·min(k_L, |I|)` for all subsets.
    LemmaMds,
    /// Expanded L-linear codes: column spaces have dimension 0 or `m` and
    /// distinct nonzero ones coincide or intersect trivially.
    LemmaLinear,
    /// Smallest tuple length admitting profile-equal inequivalent tuples.
    ThresholdN,
}

impl TheoremId {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Prop1 => "prop1",
            TheoremId::Prop2 => "prop2",
            TheoremId::Prop3 => "prop3",
            TheoremId::Prop4 => "prop4",
            TheoremId::Prop5 => "prop5",
            TheoremId::LemmaMds => "lemma_mds",
            TheoremId::LemmaLinear => "lemma_linear",
            TheoremId::ThresholdN => "threshold_n",
        }
    }

    pub fn parse(s: &str) -> Option<TheoremId> {
        Some(match s {
            "prop1" => TheoremId::Prop1,
            "prop2" => TheoremId::Prop2,
            "prop3" => TheoremId::Prop3,
            "prop4" => TheoremId::Prop4,
            "prop5" => TheoremId::Prop5,
            "lemma_mds" => TheoremId::LemmaMds,
            "lemma_linear" => TheoremId::LemmaLinear,
            "threshold_n" => TheoremId::ThresholdN,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Pruned,
    Sampled { seed: u64, samples: u64 },
}

impl Mode {
    pub fn label(&self) -> String {
        match self {
            Mode::Exhaustive => "exhaustive".into(),
            Mode::Pruned => "pruned".into(),
            Mode::Sampled { .. } => "sampled".into(),
        }
    }
}

/// One verification run: a claim, a tower, size limits, a mode and a budget.
/// `n` doubles as `n_max` and `k_max` as the ambient `k` for the threshold
/// scan.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub theorem: TheoremId,
    pub tower: FieldTower,
    pub n: usize,
    pub k_max: usize,
    pub k_l: usize,
    pub mode: Mode,
    pub budget: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub p: u32,
    pub s: usize,
    pub m: usize,
    pub n: usize,
    pub k_max: usize,
    pub k_l: usize,
    pub budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Everything needed to replay a decision offline.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecisionTrace {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_isometry: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force_found: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extends: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_dims: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureRecord {
    pub case: u64,
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<MapJson>,
    pub trace: DecisionTrace,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Coverage {
    pub fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covered: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub theorem: TheoremId,
    pub params: ParamsEcho,
    pub mode: String,
    pub cases_checked: u64,
    pub failures: Vec<FailureRecord>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Coverage>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    fn assemble(
        campaign: &Campaign,
        cases_checked: u64,
        mut failures: Vec<FailureRecord>,
        notes: Vec<String>,
        coverage: Option<Coverage>,
        started: Instant,
    ) -> Report {
        for (i, f) in failures.iter_mut().enumerate() {
            f.case = i as u64;
        }
        let verdict = if failures.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let (seed, samples) = match campaign.mode {
            Mode::Sampled { seed, samples } => (Some(seed), Some(samples)),
            _ => (None, None),
        };
        Report {
            theorem: campaign.theorem,
            params: ParamsEcho {
                p: campaign.tower.p(),
                s: campaign.tower.s(),
                m: campaign.tower.m(),
                n: campaign.n,
                k_max: campaign.k_max,
                k_l: campaign.k_l,
                budget: campaign.budget,
                seed,
                samples,
            },
            mode: campaign.mode.label(),
            cases_checked,
            failures,
            verdict,
            notes,
            coverage,
            elapsed: started.elapsed(),
        }
    }
}

// ---------------------------------------------------------------------------
// case generation

/// All K-linear codes in `L^n` with `k ≤ k_max`, one per K-subspace of
/// `K^(nm)`, in subspace enumeration order.
pub fn enumerate_codes(
    tower: &FieldTower,
    n: usize,
    k_max: usize,
) -> Result<Vec<AdditiveCode>, HarnessError> {
    let nm = n * tower.m();
    let dims: Vec<usize> = (0..=k_max.min(nm)).collect();
    let subs = enumerate_subspaces(tower.k(), nm, Some(&dims))?;
    let mut out = Vec::with_capacity(subs.len());
    for s in &subs {
        out.push(AdditiveCode::from_k_subspace(tower, n, s)?);
    }
    Ok(out)
}

struct MapSpace<'a> {
    code: &'a AdditiveCode,
    q_l: u128,
    positions: usize,
}

impl<'a> MapSpace<'a> {
    fn new(code: &'a AdditiveCode) -> MapSpace<'a> {
        MapSpace {
            code,
            q_l: u128::from(code.tower().order()),
            positions: code.k() * code.n(),
        }
    }

    fn count(&self) -> u128 {
        self.q_l.saturating_pow(self.positions as u32)
    }

    /// Image rows for a map index: position `r·n + i` is a base-`|L|` digit,
    /// least significant first.
    fn images_at(&self, idx: u128) -> Vec<Vec<LElem>> {
        let n = self.code.n();
        let mut rows = vec![vec![LElem::ZERO; n]; self.code.k()];
        let mut rem = idx;
        for r in 0..self.code.k() {
            for i in 0..n {
                rows[r][i] = LElem((rem % self.q_l) as u32);
                rem /= self.q_l;
            }
        }
        rows
    }
}

/// Walks map indices per the campaign mode, collecting failures in index
/// order. Returns (cases examined, failures).
fn scan_maps<F>(
    code: &AdditiveCode,
    mode: &Mode,
    budget: u64,
    exec: Exec,
    check: F,
) -> Result<(u64, Vec<FailureRecord>), HarnessError>
where
    F: Fn(u64, Vec<Vec<LElem>>) -> Option<FailureRecord> + Sync,
{
    let space = MapSpace::new(code);
    let count = space.count();
    match mode {
        Mode::Pruned | Mode::Exhaustive => {
            if count > u128::from(budget) {
                return Err(HarnessError::BudgetExceeded {
                    needed: count,
                    budget,
                });
            }
            let failures = exec::range_filter_map(exec, 0..count as u64, |idx| {
                check(idx, space.images_at(u128::from(idx)))
            });
            Ok((count as u64, failures))
        }
        Mode::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let indices: Vec<u128> =
                (0..*samples).map(|_| rng.gen_range(0..count)).collect();
            let failures = exec::range_filter_map(exec, 0..indices.len() as u64, |i| {
                check(i, space.images_at(indices[i as usize]))
            });
            Ok((*samples, failures))
        }
    }
}

// ---------------------------------------------------------------------------
// pruned isometry enumeration

struct PrunedOutcome {
    isometries: u64,
    nodes: u64,
    coverage: Coverage,
    complete: bool,
    failures: Vec<FailureRecord>,
}

struct IsoScan<'a> {
    code: &'a AdditiveCode,
    q: u64,
    n: usize,
    k: usize,
    domain_w: Vec<u8>,
    classes: Vec<Vec<Vec<LElem>>>, // candidate images per level
    class_sizes: Vec<usize>,
    words_per_level: u128, // |L|^n
    leaf_exact: Vec<Option<u128>>,
    leaf_frac: Vec<f64>,
}

struct RootRun {
    found: u64,
    nodes: u64,
    covered_exact: Option<u128>,
    covered_frac: f64,
    complete: bool,
    failures: Vec<FailureRecord>,
}

fn add_exact(acc: &mut Option<u128>, v: Option<u128>) {
    *acc = match (acc.take(), v) {
        (Some(a), Some(b)) => a.checked_add(b),
        _ => None,
    };
}

impl<'a> IsoScan<'a> {
    fn new(code: &'a AdditiveCode) -> Result<IsoScan<'a>, HarnessError> {
        let tower = code.tower();
        let q = u64::from(tower.q());
        let n = code.n();
        let k = code.k();
        let combos = code.cardinality();
        if combos > 1 << 24 {
            return Err(HarnessError::TooLarge(format!(
                "q^k = {combos} combination table too large"
            )));
        }
        let words = u128::from(tower.order()).pow(n as u32);
        if words > 1 << 24 {
            return Err(HarnessError::TooLarge(format!(
                "|L|^n = {words} candidate words too large"
            )));
        }
        let domain_w: Vec<u8> = (0..combos as u64)
            .map(|c| weight(&code.codeword(c)) as u8)
            .collect();
        // candidate image words bucketed by weight, in word-index order
        let mut by_weight: Vec<Vec<Vec<LElem>>> = vec![Vec::new(); n + 1];
        for widx in 0..words as u64 {
            let mut rem = widx;
            let word: Vec<LElem> = (0..n)
                .map(|_| {
                    let e = LElem((rem % u64::from(tower.order())) as u32);
                    rem /= u64::from(tower.order());
                    e
                })
                .collect();
            by_weight[weight(&word)].push(word);
        }
        let classes: Vec<Vec<Vec<LElem>>> = (0..k)
            .map(|j| by_weight[weight(&code.generators()[j])].clone())
            .collect();
        let class_sizes = classes.iter().map(Vec::len).collect();
        let words_f = words as f64;
        let leaf_exact: Vec<Option<u128>> = (0..k)
            .map(|j| {
                let e = (n as u32).checked_mul((k - j - 1) as u32)?;
                u128::from(tower.order()).checked_pow(e)
            })
            .collect();
        let leaf_frac: Vec<f64> = (0..k).map(|j| words_f.powi(-((j + 1) as i32))).collect();
        Ok(IsoScan {
            code,
            q,
            n,
            k,
            domain_w,
            classes,
            class_sizes,
            words_per_level: words,
            leaf_exact,
            leaf_frac,
        })
    }

    fn total_exact(&self) -> Option<u128> {
        let e = (self.n as u32).checked_mul(self.k as u32)?;
        u128::from(self.code.tower().order()).checked_pow(e)
    }

    /// Bulk elimination of the off-weight-class candidates entering level `j`.
    fn off_class(&self, j: usize, run: &mut RootRun) {
        let off = self.words_per_level - self.class_sizes[j] as u128;
        if off == 0 {
            return;
        }
        add_exact(
            &mut run.covered_exact,
            self.leaf_exact[j].and_then(|l| l.checked_mul(off)),
        );
        run.covered_frac += off as f64 * self.leaf_frac[j];
    }

    fn dfs<F>(
        &self,
        level: usize,
        images: &mut Vec<Vec<LElem>>,
        words: &[Vec<LElem>],
        budget: u64,
        run: &mut RootRun,
        check: &F,
    ) where
        F: Fn(&AdditiveMap) -> Option<FailureRecord> + Sync,
    {
        let tower = self.code.tower();
        self.off_class(level, run);
        let prefix_combos = (self.q as u128).pow(level as u32) as u64;
        for cand in &self.classes[level] {
            run.nodes += 1;
            if run.nodes > budget {
                run.complete = false;
                return;
            }
            // all combinations that involve the new row must stay
            // weight-preserving
            let mut ok = true;
            let mut new_words: Vec<Vec<LElem>> = Vec::new();
            'combo: for hi in 1..self.q {
                let scalar = KElem(hi as u16);
                for lo in 0..prefix_combos {
                    let combo = lo + hi * prefix_combos;
                    let mut w = 0usize;
                    let base = &words[lo as usize];
                    let mut word = Vec::with_capacity(self.n);
                    for i in 0..self.n {
                        let e = tower.add(base[i], tower.scalar_mul(scalar, cand[i]));
                        if !e.is_zero() {
                            w += 1;
                        }
                        word.push(e);
                    }
                    if w != self.domain_w[combo as usize] as usize {
                        ok = false;
                        break 'combo;
                    }
                    new_words.push(word);
                }
            }
            if !ok {
                add_exact(&mut run.covered_exact, self.leaf_exact[level]);
                run.covered_frac += self.leaf_frac[level];
                continue;
            }
            images.push(cand.clone());
            if level + 1 == self.k {
                run.found += 1;
                add_exact(&mut run.covered_exact, Some(1));
                run.covered_frac += self.leaf_frac[level];
                let map = AdditiveMap::from_images(self.code, images.clone())
                    .expect("well-shaped candidate");
                if let Some(f) = check(&map) {
                    run.failures.push(f);
                }
            } else {
                let mut all_words = words.to_vec();
                all_words.extend(new_words);
                self.dfs(level + 1, images, &all_words, budget, run, check);
            }
            images.pop();
            if !run.complete {
                return;
            }
        }
    }
}

/// Enumerates every weight-preserving K-linear map on `code` (all its
/// isometries) with incremental pruning, invoking `check` on each one found.
fn scan_isometries<F>(
    code: &AdditiveCode,
    budget: u64,
    exec: Exec,
    check: F,
) -> Result<PrunedOutcome, HarnessError>
where
    F: Fn(&AdditiveMap) -> Option<FailureRecord> + Sync + Send,
{
    if code.k() == 0 {
        let map = AdditiveMap::identity(code);
        let failures: Vec<FailureRecord> = check(&map).into_iter().collect();
        return Ok(PrunedOutcome {
            isometries: 1,
            nodes: 1,
            coverage: Coverage {
                fraction: 1.0,
                covered: Some("1".into()),
                total: Some("1".into()),
            },
            complete: true,
            failures,
        });
    }
    let scan = IsoScan::new(code)?;
    let zero_word = vec![vec![LElem::ZERO; scan.n]];

    // first branching level runs in parallel with a deterministic budget split
    let roots: Vec<usize> = (0..scan.classes[0].len()).collect();
    let share = (budget / roots.len().max(1) as u64).max(1);
    let runs: Vec<RootRun> = exec::map_ordered(exec, roots, |root| {
        let mut run = RootRun {
            found: 0,
            nodes: 1,
            covered_exact: Some(0),
            covered_frac: 0.0,
            complete: true,
            failures: Vec::new(),
        };
        let cand = scan.classes[0][root].clone();
        let prefix_combos = 1u64;
        let tower = scan.code.tower();
        let mut ok = true;
        'combo: for hi in 1..scan.q {
            let scalar = KElem(hi as u16);
            for lo in 0..prefix_combos {
                let combo = lo + hi * prefix_combos;
                let w = (0..scan.n)
                    .filter(|&i| !tower.scalar_mul(scalar, cand[i]).is_zero())
                    .count();
                if w != scan.domain_w[combo as usize] as usize {
                    ok = false;
                    break 'combo;
                }
            }
        }
        if !ok {
            add_exact(&mut run.covered_exact, scan.leaf_exact[0]);
            run.covered_frac += scan.leaf_frac[0];
            return run;
        }
        let mut images = vec![cand.clone()];
        if scan.k == 1 {
            run.found = 1;
            add_exact(&mut run.covered_exact, Some(1));
            run.covered_frac += scan.leaf_frac[0];
            let map = AdditiveMap::from_images(scan.code, images.clone())
                .expect("well-shaped candidate");
            if let Some(f) = check(&map) {
                run.failures.push(f);
            }
            return run;
        }
        let mut words = zero_word.clone();
        for hi in 1..scan.q {
            let scalar = KElem(hi as u16);
            words.push(
                (0..scan.n)
                    .map(|i| tower.scalar_mul(scalar, cand[i]))
                    .collect(),
            );
        }
        scan.dfs(1, &mut images, &words, share, &mut run, &check);
        run
    });

    let mut isometries = 0u64;
    let mut nodes = 0u64;
    let mut covered_exact = Some(0u128);
    let mut covered_frac = 0.0f64;
    let mut complete = true;
    let mut failures = Vec::new();
    // candidates outside the level-0 weight class
    {
        let mut seed = RootRun {
            found: 0,
            nodes: 0,
            covered_exact: Some(0),
            covered_frac: 0.0,
            complete: true,
            failures: Vec::new(),
        };
        scan.off_class(0, &mut seed);
        add_exact(&mut covered_exact, seed.covered_exact);
        covered_frac += seed.covered_frac;
    }
    for run in runs {
        isometries += run.found;
        nodes += run.nodes;
        add_exact(&mut covered_exact, run.covered_exact);
        covered_frac += run.covered_frac;
        complete &= run.complete;
        failures.extend(run.failures);
    }
    let total_exact = scan.total_exact();
    if complete {
        covered_frac = 1.0;
        if let Some(t) = total_exact {
            covered_exact = Some(t);
        }
    }
    Ok(PrunedOutcome {
        isometries,
        nodes,
        coverage: Coverage {
            fraction: covered_frac.min(1.0),
            covered: covered_exact.map(|v| v.to_string()),
            total: total_exact.map(|v| v.to_string()),
        },
        complete,
        failures,
    })
}

// ---------------------------------------------------------------------------
// per-map decision helpers

struct MapVerdicts {
    is_isometry: bool,
    criterion: bool,
    equivalent: bool,
    extends_claim: bool,
    u_dims: Vec<usize>,
}

fn judge_map(
    code: &AdditiveCode,
    images: &[Vec<LElem>],
    domain_w: &[u8],
    v_profile: &isometry::WeightProfile,
    v_sorted: &[Subspace],
) -> Result<MapVerdicts, HarnessError> {
    let tower = code.tower();
    let k = code.k();
    let q = u64::from(tower.q());
    let combos = domain_w.len() as u64;
    let mut is_isometry = true;
    for combo in 0..combos {
        let mut rem = combo;
        let mut word = vec![LElem::ZERO; code.n()];
        for row in images {
            let a = KElem((rem % q) as u16);
            rem /= q;
            if !a.is_zero() {
                for (w, &g) in word.iter_mut().zip(row) {
                    *w = tower.add(*w, tower.scalar_mul(a, g));
                }
            }
        }
        if weight(&word) != domain_w[combo as usize] as usize {
            is_isometry = false;
            break;
        }
    }
    let u_tuple = column_tuple_of_rows(tower, images, k, code.n());
    let u_profile = isometry::weight_profile(tower.k(), &u_tuple)?;
    let criterion = *v_profile == u_profile;
    let equivalent = v_sorted == u_tuple.sorted_spaces().as_slice();
    Ok(MapVerdicts {
        is_isometry,
        criterion,
        equivalent,
        extends_claim: equivalent,
        u_dims: u_tuple.dims(),
    })
}

fn failure(
    code: &AdditiveCode,
    images: Option<&[Vec<LElem>]>,
    note: String,
    trace: DecisionTrace,
) -> FailureRecord {
    let map = images.map(|im| {
        let f = AdditiveMap::from_images(code, im.to_vec()).expect("well-shaped images");
        MapJson::from_map(&f)
    });
    FailureRecord {
        case: 0,
        note,
        code: Some(CodeJson::from_code(code)),
        map,
        trace,
    }
}

// ---------------------------------------------------------------------------
// campaign drivers

fn ceil_half_pow(q: u32, m: usize) -> u64 {
    u64::from(q).pow(m.div_ceil(2) as u32)
}

pub fn verify_theorem(campaign: &Campaign) -> Result<Report, HarnessError> {
    verify_theorem_exec(campaign, Exec::default())
}

pub fn verify_theorem_exec(campaign: &Campaign, exec: Exec) -> Result<Report, HarnessError> {
    let started = Instant::now();
    match campaign.theorem {
        TheoremId::Prop1 => drive_prop1(campaign, exec, started),
        TheoremId::Prop2 => drive_prop2(campaign, exec, started),
        TheoremId::Prop3 => drive_prop3(campaign, exec, started),
        TheoremId::Prop4 => drive_prop4(campaign, exec, started),
        TheoremId::Prop5 => drive_prop5(campaign, exec, started),
        TheoremId::LemmaMds => drive_lemma_mds(campaign, exec, started),
        TheoremId::LemmaLinear => drive_lemma_linear(campaign, exec, started),
        TheoremId::ThresholdN => {
            let report = threshold_n_scan(
                campaign.tower.k(),
                campaign.k_max,
                campaign.n,
                campaign.budget,
            )?;
            Ok(Report {
                elapsed: started.elapsed(),
                ..report
            })
        }
    }
}

/// Runs the extendibility conclusion over every isometry of every code in
/// the campaign's scope. Shared by the short-length and MDS drivers.
fn extendibility_scan(
    codes: &[AdditiveCode],
    campaign: &Campaign,
    exec: Exec,
) -> Result<(u64, Vec<FailureRecord>, Vec<String>, Option<Coverage>), HarnessError> {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut cases = 0u64;
    let mut coverage: Option<Coverage> = None;
    for code in codes {
        let v_tuple = code.column_tuple();
        let v_sorted = v_tuple.sorted_spaces();
        let v_dims = v_tuple.dims();
        let v_profile = isometry::weight_profile(code.tower().k(), &v_tuple)?;
        match campaign.mode {
            Mode::Pruned => {
                let isometry_check = |f: &AdditiveMap| -> Option<FailureRecord> {
                    let u_tuple = column_tuple_of_rows(
                        f.domain().tower(),
                        f.images(),
                        f.domain().k(),
                        f.domain().n(),
                    );
                    if u_tuple.sorted_spaces() == v_sorted {
                        None
                    } else {
                        Some(failure(
                            code,
                            Some(f.images()),
                            "isometry does not extend".into(),
                            DecisionTrace {
                                is_isometry: Some(true),
                                equivalent: Some(false),
                                extends: Some(false),
                                v_dims: Some(v_dims.clone()),
                                u_dims: Some(u_tuple.dims()),
                                ..DecisionTrace::default()
                            },
                        ))
                    }
                };
                let out = scan_isometries(code, campaign.budget, exec, isometry_check)?;
                cases += out.isometries;
                failures.extend(out.failures);
                if !out.complete {
                    notes.push(format!(
                        "code k={} scan incomplete at budget {} ({} nodes)",
                        code.k(),
                        campaign.budget,
                        out.nodes
                    ));
                }
                coverage = Some(match coverage.take() {
                    None => out.coverage,
                    Some(prev) => Coverage {
                        // multi-code campaigns report the weakest coverage
                        fraction: prev.fraction.min(out.coverage.fraction),
                        covered: None,
                        total: None,
                    },
                });
            }
            Mode::Exhaustive | Mode::Sampled { .. } => {
                let domain_w: Vec<u8> = (0..code.cardinality() as u64)
                    .map(|c| weight(&code.codeword(c)) as u8)
                    .collect();
                let counter = AtomicU64::new(0);
                let check = |_idx: u64, images: Vec<Vec<LElem>>| -> Option<FailureRecord> {
                    let verdicts =
                        judge_map(code, &images, &domain_w, &v_profile, &v_sorted).ok()?;
                    if !verdicts.is_isometry {
                        return None;
                    }
                    counter.fetch_add(1, Ordering::Relaxed);
                    if verdicts.extends_claim {
                        None
                    } else {
                        Some(failure(
                            code,
                            Some(&images),
                            "isometry does not extend".into(),
                            DecisionTrace {
                                is_isometry: Some(true),
                                equivalent: Some(false),
                                extends: Some(false),
                                v_dims: Some(v_dims.clone()),
                                u_dims: Some(verdicts.u_dims),
                                ..DecisionTrace::default()
                            },
                        ))
                    }
                };
                let (examined, fails) =
                    scan_maps(code, &campaign.mode, campaign.budget, exec, check)?;
                notes.push(format!(
                    "code k={}: {} maps examined, {} isometries",
                    code.k(),
                    examined,
                    counter.load(Ordering::Relaxed)
                ));
                cases += counter.load(Ordering::Relaxed);
                failures.extend(fails);
            }
        }
    }
    Ok((cases, failures, notes, coverage))
}

fn drive_prop1(
    campaign: &Campaign,
    exec: Exec,
    started: Instant,
) -> Result<Report, HarnessError> {
    let q = campaign.tower.q() as usize;
    if campaign.n > q {
        return Err(HarnessError::HypothesisViolated(format!(
            "short-length extension requires n ≤ q; got n = {}, q = {q}",
            campaign.n
        )));
    }
    let codes = enumerate_codes(&campaign.tower, campaign.n, campaign.k_max)?;
    let (cases, failures, mut notes, coverage) = extendibility_scan(&codes, campaign, exec)?;
    notes.insert(0, format!("{} codes enumerated", codes.len()));
    Ok(Report::assemble(
        campaign, cases, failures, notes, coverage, started,
    ))
}

fn drive_prop2(
    campaign: &Campaign,
    exec: Exec,
    started: Instant,
) -> Result<Report, HarnessError> {
    let tower = &campaign.tower;
    let pool = enumerate_gl(tower)?;
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut cases = 0u64;
    for n in 1..=campaign.n {
        let codes = enumerate_codes(tower, n, campaign.k_max)?;
        let bf_space = isometry::monomial_candidate_count(tower, n);
        if bf_space > u128::from(campaign.budget) {
            return Err(HarnessError::BudgetExceeded {
                needed: bf_space,
                budget: campaign.budget,
            });
        }
        let mut code_cases = 0u64;
        for code in &codes {
            let v_tuple = code.column_tuple();
            let v_sorted = v_tuple.sorted_spaces();
            let v_dims = v_tuple.dims();
            let v_profile = isometry::weight_profile(tower.k(), &v_tuple)?;
            let domain_w: Vec<u8> = (0..code.cardinality() as u64)
                .map(|c| weight(&code.codeword(c)) as u8)
                .collect();
            let check = |_idx: u64, images: Vec<Vec<LElem>>| -> Option<FailureRecord> {
                let verdicts =
                    judge_map(code, &images, &domain_w, &v_profile, &v_sorted).ok()?;
                let f = AdditiveMap::from_images(code, images.clone())
                    .expect("well-shaped images");
                let witness = brute_force_extension_with_pool(
                    &f,
                    &pool,
                    campaign.budget,
                    Exec::Sequential,
                )
                .ok()?;
                let bf_found = witness.is_some();
                let trace = DecisionTrace {
                    is_isometry: Some(verdicts.is_isometry),
                    criterion: Some(verdicts.criterion),
                    equivalent: Some(verdicts.equivalent),
                    brute_force_found: Some(bf_found),
                    extends: Some(verdicts.equivalent),
                    v_dims: Some(v_dims.clone()),
                    u_dims: Some(verdicts.u_dims.clone()),
                };
                if verdicts.is_isometry != verdicts.criterion {
                    return Some(failure(
                        code,
                        Some(&images),
                        "direct weight preservation disagrees with the profile criterion"
                            .into(),
                        trace,
                    ));
                }
                if verdicts.equivalent != bf_found {
                    return Some(failure(
                        code,
                        Some(&images),
                        "tuple equivalence disagrees with brute-force existence".into(),
                        trace,
                    ));
                }
                None
            };
            let (examined, fails) =
                scan_maps(code, &campaign.mode, campaign.budget, exec, check)?;
            code_cases += examined;
            failures.extend(fails);
        }
        notes.push(format!(
            "n={n}: {} codes, {code_cases} maps cross-checked",
            codes.len()
        ));
        cases += code_cases;
    }
    Ok(Report::assemble(
        campaign, cases, failures, notes, None, started,
    ))
}

fn drive_prop3(
    campaign: &Campaign,
    exec: Exec,
    started: Instant,
) -> Result<Report, HarnessError> {
    if campaign.k_l == 2 {
        return Err(HarnessError::HypothesisViolated(
            "this claim excludes k_L = 2; use the k_L = 2 campaign instead".into(),
        ));
    }
    let code = constructions::rs_code_canonical(&campaign.tower, campaign.n, campaign.k_l)?;
    let (cases, failures, mut notes, coverage) =
        extendibility_scan(std::slice::from_ref(&code), campaign, exec)?;
    notes.insert(
        0,
        format!(
            "evaluation code n={}, k_L={}, k={}",
            campaign.n,
            campaign.k_l,
            code.k()
        ),
    );
    Ok(Report::assemble(
        campaign, cases, failures, notes, coverage, started,
    ))
}

fn drive_prop4(
    campaign: &Campaign,
    exec: Exec,
    started: Instant,
) -> Result<Report, HarnessError> {
    let tower = &campaign.tower;
    let (q, m) = (tower.q(), tower.m());
    if m < 2 {
        return Err(HarnessError::HypothesisViolated(
            "the partition mechanism needs m ≥ 2".into(),
        ));
    }
    if campaign.n as u64 > ceil_half_pow(q, m) {
        return Err(HarnessError::HypothesisViolated(format!(
            "requires n ≤ q^⌈m/2⌉ = {}; got n = {}",
            ceil_half_pow(q, m),
            campaign.n
        )));
    }
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    // mechanism: no partition of K^m into at most n parts
    let (hit, nodes) =
        partitions::exists_partition_with_at_most(tower.k(), m, campaign.n, campaign.budget, exec)?;
    match hit {
        None => notes.push(format!(
            "certificate: no partition of K^{m} into ≤ {} proper nonzero subspaces ({} nodes searched)",
            campaign.n, nodes
        )),
        Some(p) => failures.push(FailureRecord {
            case: 0,
            note: format!(
                "mechanism broken: K^{m} admits a partition into {} parts",
                p.parts.len()
            ),
            code: None,
            map: None,
            trace: DecisionTrace::default(),
        }),
    }

    // the MDS column-space facts on the instance
    let code = constructions::rs_code_canonical(tower, campaign.n, 2)?;
    let tuple = code.column_tuple();
    for (i, a) in tuple.spaces().iter().enumerate() {
        if a.dim() != m {
            failures.push(failure(
                &code,
                None,
                format!("column space {i} has dimension {} ≠ m = {m}", a.dim()),
                DecisionTrace::default(),
            ));
        }
        for (j, b) in tuple.spaces().iter().enumerate().skip(i + 1) {
            if !a.intersect(tower.k(), b)?.is_zero() {
                failures.push(failure(
                    &code,
                    None,
                    format!("column spaces {i} and {j} intersect nontrivially"),
                    DecisionTrace::default(),
                ));
            }
        }
    }
    notes.push(format!(
        "column spaces of the k_L=2 instance all have dimension {m} with pairwise trivial intersections"
    ));

    let (cases, case_failures, case_notes, coverage) =
        extendibility_scan(std::slice::from_ref(&code), campaign, exec)?;
    failures.extend(case_failures);
    notes.extend(case_notes);
    Ok(Report::assemble(
        campaign, cases, failures, notes, coverage, started,
    ))
}

fn drive_prop5(
    campaign: &Campaign,
    exec: Exec,
    started: Instant,
) -> Result<Report, HarnessError> {
    let tower = &campaign.tower;
    let (q, m) = (tower.q(), tower.m());
    if m < 2 {
        return Err(HarnessError::HypothesisViolated(
            "a proper subfield is required (m ≥ 2)".into(),
        ));
    }
    if campaign.n as u64 > ceil_half_pow(q, m) {
        return Err(HarnessError::HypothesisViolated(format!(
            "requires n ≤ q^⌈m/2⌉ = {}; got n = {}",
            ceil_half_pow(q, m),
            campaign.n
        )));
    }
    let catalog = lmat::enumerate_l_rref(tower, campaign.n, campaign.k_l)
        .map_err(HarnessError::TooLarge)?;
    let mut failures = Vec::new();
    let mut notes = vec![format!(
        "{} L-linear codes of L-dimension {} in L^{}",
        catalog.len(),
        campaign.k_l,
        campaign.n
    )];
    let mut cases = 0u64;
    for rows_l in &catalog {
        let code = constructions::expand_l_linear(tower, rows_l)?;
        let v_tuple = code.column_tuple();
        let v_sorted = v_tuple.sorted_spaces();
        let v_dims = v_tuple.dims();
        let v_profile = isometry::weight_profile(tower.k(), &v_tuple)?;
        let domain_w: Vec<u8> = (0..code.cardinality() as u64)
            .map(|c| weight(&code.codeword(c)) as u8)
            .collect();
        let check = |_idx: u64, images: Vec<Vec<LElem>>| -> Option<FailureRecord> {
            let verdicts = judge_map(&code, &images, &domain_w, &v_profile, &v_sorted).ok()?;
            if !verdicts.is_isometry {
                return None;
            }
            let f = AdditiveMap::from_images(&code, images.clone()).expect("well-shaped");
            let image_l_linear = f.image_code().ok()?.is_l_linear().ok()?;
            if !image_l_linear {
                return None;
            }
            if verdicts.extends_claim {
                None
            } else {
                Some(failure(
                    &code,
                    Some(&images),
                    "isometry with L-linear image does not extend".into(),
                    DecisionTrace {
                        is_isometry: Some(true),
                        equivalent: Some(false),
                        extends: Some(false),
                        v_dims: Some(v_dims.clone()),
                        u_dims: Some(verdicts.u_dims),
                        ..DecisionTrace::default()
                    },
                ))
            }
        };
        let mode = match campaign.mode {
            Mode::Pruned => Mode::Exhaustive,
            other => other,
        };
        let (examined, fails) = scan_maps(&code, &mode, campaign.budget, exec, check)?;
        cases += examined;
        failures.extend(fails);
    }
    notes.push(format!("{cases} candidate maps examined"));
    Ok(Report::assemble(
        campaign, cases, failures, notes, None, started,
    ))
}

fn drive_lemma_mds(
    campaign: &Campaign,
    _exec: Exec,
    started: Instant,
) -> Result<Report, HarnessError> {
    let tower = &campaign.tower;
    let m = tower.m();
    let code = constructions::rs_code_canonical(tower, campaign.n, campaign.k_l)?;
    let tuple = code.column_tuple();
    let k = tower.k();
    let mut failures = Vec::new();
    let n = campaign.n;
    let mut cases = 0u64;
    for mask in 0u64..(1u64 << n) {
        cases += 1;
        let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut acc = Subspace::zero(code.k());
        for &i in &members {
            acc = acc.sum(k, &tuple.spaces()[i])?;
        }
        let expected = m * campaign.k_l.min(members.len());
        if acc.dim() != expected {
            failures.push(failure(
                &code,
                None,
                format!(
                    "subset {members:?}: dim Σ V_i = {} ≠ m·min(k_L, |I|) = {expected}",
                    acc.dim()
                ),
                DecisionTrace::default(),
            ));
        }
    }
    let notes = vec![format!(
        "all {} coordinate subsets checked on the n={}, k_L={} instance",
        cases, campaign.n, campaign.k_l
    )];
    Ok(Report::assemble(
        campaign, cases, failures, notes, None, started,
    ))
}

fn drive_lemma_linear(
    campaign: &Campaign,
    _exec: Exec,
    started: Instant,
) -> Result<Report, HarnessError> {
    let tower = &campaign.tower;
    let m = tower.m();
    let k = tower.k();
    let mut failures = Vec::new();
    let mut cases = 0u64;
    for n in 1..=campaign.n {
        for d in 1..=campaign.k_l.min(n) {
            let catalog =
                lmat::enumerate_l_rref(tower, n, d).map_err(HarnessError::TooLarge)?;
            for rows_l in &catalog {
                cases += 1;
                let code = constructions::expand_l_linear(tower, rows_l)?;
                let tuple = code.column_tuple();
                for (i, a) in tuple.spaces().iter().enumerate() {
                    if a.dim() != 0 && a.dim() != m {
                        failures.push(failure(
                            &code,
                            None,
                            format!("column space {i} has dimension {} ∉ {{0, {m}}}", a.dim()),
                            DecisionTrace::default(),
                        ));
                    }
                    for (j, b) in tuple.spaces().iter().enumerate().skip(i + 1) {
                        if a.dim() > 0 && b.dim() > 0 && a != b {
                            if !a.intersect(k, b)?.is_zero() {
                                failures.push(failure(
                                    &code,
                                    None,
                                    format!(
                                        "distinct nonzero column spaces {i}, {j} intersect nontrivially"
                                    ),
                                    DecisionTrace::default(),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    let notes = vec![format!("{cases} expanded codes checked (n ≤ {}, k_L ≤ {})", campaign.n, campaign.k_l)];
    Ok(Report::assemble(
        campaign, cases, failures, notes, None, started,
    ))
}

/// For each `n ≤ n_max`, reports whether profile-equal inequivalent tuple
/// pairs over `K^k` exist; the expected first length is `q + 1` for `k ≥ 2`
/// and never for `k ≤ 1`.
pub fn threshold_n_scan(
    k: &KField,
    ambient_k: usize,
    n_max: usize,
    budget: u64,
) -> Result<Report, HarnessError> {
    let started = Instant::now();
    let mut notes = Vec::new();
    let mut first_found: Option<usize> = None;
    let mut cases = 0u64;
    for n in 1..=n_max {
        let sols = isometry::search_nontrivial_solutions(k, ambient_k, n, None, budget)?;
        cases += 1;
        if sols.is_empty() {
            notes.push(format!("n={n}: no nontrivial solutions"));
        } else {
            if first_found.is_none() {
                first_found = Some(n);
            }
            notes.push(format!("n={n}: {} nontrivial solution pairs", sols.len()));
        }
    }
    let expected = if ambient_k >= 2 {
        let t = k.q() as usize + 1;
        if t <= n_max {
            Some(t)
        } else {
            None
        }
    } else {
        None
    };
    let mut failures = Vec::new();
    if first_found != expected {
        failures.push(FailureRecord {
            case: 0,
            note: format!(
                "transition at {first_found:?}, expected {expected:?} (q = {})",
                k.q()
            ),
            code: None,
            map: None,
            trace: DecisionTrace::default(),
        });
    }
    notes.push(format!(
        "expected first nontrivial length: {}",
        expected.map_or("none".into(), |n| n.to_string())
    ));
    let campaign = Campaign {
        theorem: TheoremId::ThresholdN,
        // the scan is K-level only; echo a degree-1 tower over the same K
        tower: FieldTower::new(k.p(), &k.k_poly(), &[0, 1]).expect("degree-1 extension"),
        n: n_max,
        k_max: ambient_k,
        k_l: 0,
        mode: Mode::Exhaustive,
        budget,
    };
    Ok(Report::assemble(
        &campaign, cases, failures, notes, None, started,
    ))
}

/// Recomputes the decisions recorded in a failure record from its embedded
/// JSON. `brute_force_found` is recomputed only when it was recorded.
pub fn replay(record: &FailureRecord, budget: u64) -> Result<DecisionTrace, HarnessError> {
    let Some(map_json) = &record.map else {
        return Ok(DecisionTrace::default());
    };
    let f = map_json
        .to_map()
        .map_err(|e| HarnessError::TooLarge(e.to_string()))?;
    let code = f.domain();
    let v_tuple = code.column_tuple();
    let u_tuple = column_tuple_of_rows(code.tower(), f.images(), code.k(), code.n());
    let is_iso = is_isometry_direct(&f)?;
    let criterion = isometry::criterion_holds(code.tower().k(), &v_tuple, &u_tuple)?;
    let equivalent = tuples_equivalent(&v_tuple, &u_tuple)?;
    let brute_force_found = match record.trace.brute_force_found {
        Some(_) => Some(isometry::brute_force_extension(&f, budget)?.is_some()),
        None => None,
    };
    Ok(DecisionTrace {
        is_isometry: Some(is_iso),
        criterion: Some(criterion),
        equivalent: Some(equivalent),
        brute_force_found,
        extends: Some(equivalent),
        v_dims: Some(v_tuple.dims()),
        u_dims: Some(u_tuple.dims()),
    })
}
