//! Arity-bounded slices of function clones and minimality verdicts.
//!
//! For a finite permutation action `G` on a set `B` and a family `F` of
//! operation tables on `B`, the clone generated by `G ∪ F` is the smallest
//! set of finitary operations containing all projections, all elements of
//! `G` (as unary operations), and all members of `F`, closed under
//! composition.  This module materialises the *arity-`r` slice* of that
//! clone — every member of arity exactly `r` — by a deterministic
//! fixed-point computation, and builds three minimality verdicts on top:
//!
//! * [`is_almost_minimal`]: no slice below the arity of `f` picks up
//!   anything beyond what `G` alone generates;
//! * [`is_strictly_almost_minimal`]: additionally, every essential member
//!   of the arity-`k` slice regenerates `f`;
//! * [`is_minimal_bounded`]: every essential member of every slice up to a
//!   given arity bound regenerates `f`.
//!
//! All searches are budgeted.  Exhausting a budget never silently flips a
//! verdict: it surfaces as [`Verdict::Unknown`].

use std::collections::HashSet;

use thiserror::Error;

use crate::action::{FiniteAction, Permutation};
use crate::op::{self, OpError, OpTable};

/// Resource limits for slice generation.
///
/// `max_evals` counts *cell evaluations*: every composed or restricted
/// table charges one unit per cell it fills, so the bound is proportional
/// to actual work rather than to the number of candidate tables.
#[derive(Debug, Clone, Copy)]
pub struct GenBudget {
    /// Largest number of distinct tables a single slice may hold.
    pub max_tables: usize,
    /// Largest number of table cells computed while generating one slice.
    pub max_evals: u64,
}

impl Default for GenBudget {
    fn default() -> Self {
        GenBudget {
            max_tables: 2_000_000,
            max_evals: 100_000_000,
        }
    }
}

/// Which resource ran out when a search came back inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exhausted {
    /// The table cap was hit before the fixed point was reached.
    Tables,
    /// The evaluation cap was hit before the fixed point was reached.
    Evals,
}

impl std::fmt::Display for Exhausted {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exhausted::Tables => write!(out, "table budget exhausted"),
            Exhausted::Evals => write!(out, "evaluation budget exhausted"),
        }
    }
}

/// Outcome of a budgeted decision procedure.
///
/// `Fails` carries a concrete witness; `Unknown` means a budget ran out
/// before either answer could be certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    /// The property holds; the search ran to completion.
    Holds,
    /// The property fails, with a witness.
    Fails(W),
    /// The search was cut short by a resource budget.
    Unknown(Exhausted),
}

impl<W> Verdict<W> {
    /// True exactly for [`Verdict::Holds`].
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Why a strict-minimality or bounded-minimality check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrictFailure {
    /// A slice below the arity of the operation already grew: the offending
    /// lower-arity table is not generated by the group alone.
    NotAlmostMinimal(OpTable),
    /// An essential member of an inspected slice fails to regenerate the
    /// operation.
    NonRegenerating(OpTable),
}

/// Outcome of [`is_minimal_bounded`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinimalVerdict {
    /// Every slice up to the stated arity bound passed the regeneration
    /// test (and the operation is almost minimal).
    MinimalUpTo(usize),
    /// A definite counterexample was found.
    NotMinimal(StrictFailure),
    /// A budget ran out before the bound was certified.
    Unknown(Exhausted),
}

/// Errors for slice generation and the verdicts built on it.
#[derive(Debug, Error)]
pub enum CloneError {
    /// An underlying table operation failed.
    #[error(transparent)]
    Op(#[from] OpError),
    /// Inputs violate a stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// The arity-`r` slice of the clone generated by a group action together
/// with a family of operation tables.
///
/// `tables` is sorted in the canonical table order and free of duplicates.
/// When `saturated` is false a budget ran out and the slice is only a
/// lower approximation of the true slice.
#[derive(Debug, Clone)]
pub struct CloneSlice {
    n: usize,
    r: usize,
    tables: Vec<OpTable>,
    generators: Vec<OpTable>,
    saturated: bool,
}

impl CloneSlice {
    /// Domain size of every member.
    pub fn domain_size(&self) -> usize {
        self.n
    }

    /// Arity of every member.
    pub fn arity(&self) -> usize {
        self.r
    }

    /// All members, sorted in the canonical table order.
    pub fn tables(&self) -> &[OpTable] {
        &self.tables
    }

    /// The table generators (beyond the group) this slice was built from.
    pub fn generators(&self) -> &[OpTable] {
        &self.generators
    }

    /// Whether the fixed point was reached within budget.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Membership test in canonical order (binary search).
    pub fn contains(&self, table: &OpTable) -> bool {
        self.tables.binary_search(table).is_ok()
    }

    /// Members with at least two essential coordinates, in canonical order.
    pub fn essential_tables(&self) -> Vec<&OpTable> {
        self.tables.iter().filter(|t| t.is_essential()).collect()
    }
}

/// Early-exit condition threaded through slice generation.
enum Stop<'a> {
    /// Run to saturation or budget exhaustion.
    Never,
    /// Abort as soon as a table outside the given (saturated) slice shows up.
    Outside(&'a CloneSlice),
    /// Abort as soon as this exact table shows up.
    Found(&'a OpTable),
}

struct GenOutcome {
    slice: CloneSlice,
    /// The table that triggered the stop condition, if any.
    hit: Option<OpTable>,
    /// Which budget ran out, if the fixed point was not reached.
    exhausted: Option<Exhausted>,
}

/// Generate the arity-`r` slice of the clone of `G ∪ generators`.
///
/// The result is deterministic: seeding and closure both run in a fixed
/// order and the final table list is sorted canonically.
pub fn generate_slice(
    action: &FiniteAction,
    generators: &[OpTable],
    r: usize,
    budget: &GenBudget,
) -> Result<CloneSlice, CloneError> {
    Ok(generate(action, generators, r, budget, Stop::Never)?.slice)
}

fn generate(
    action: &FiniteAction,
    generators: &[OpTable],
    r: usize,
    budget: &GenBudget,
    stop: Stop<'_>,
) -> Result<GenOutcome, CloneError> {
    let n = action.domain_size();
    if r == 0 {
        return Err(OpError::ZeroArity.into());
    }
    for g in generators {
        if g.domain_size() != n {
            return Err(CloneError::Precondition(format!(
                "generator domain size {} does not match the action domain size {n}",
                g.domain_size()
            )));
        }
        if g.arity() == 0 {
            return Err(OpError::ZeroArity.into());
        }
    }
    if let Stop::Outside(base) = &stop {
        if base.n != n || base.r != r {
            return Err(CloneError::Precondition(
                "reference slice has a different domain size or arity".into(),
            ));
        }
    }
    let cells = op::cells_for(n, r)? as u64;

    // Unary tables for the non-identity group elements; the identity would
    // only ever reproduce its argument.
    let unary_gens: Vec<OpTable> = action
        .elements()
        .iter()
        .skip(1)
        .map(|g| OpTable::unary(n, g.image()).expect("group images are valid tables"))
        .collect();
    // Outer generators for the closure step, with a flag marking tables
    // that are invariant under every permutation of their arguments: for
    // those, argument tuples can be enumerated as multisets.
    let mut step_gens: Vec<(&OpTable, bool)> = Vec::new();
    for g in generators.iter().chain(unary_gens.iter()) {
        let symmetric = fully_symmetric(g)?;
        step_gens.push((g, symmetric));
    }

    let mut evals: u64 = 0;
    let mut exhausted = None;
    let mut hit = None;
    // `ordered` carries the discovery order used for tuple enumeration;
    // `seen` answers membership queries.
    let mut ordered: Vec<OpTable> = Vec::new();
    let mut seen: HashSet<OpTable> = HashSet::new();

    // Seed: projections, every arity-r minor of every group unary (that is,
    // x̄ ↦ g(x_i)) and every arity-r minor of every generator.
    let mut seeds: Vec<OpTable> = Vec::new();
    for i in 0..r {
        seeds.push(OpTable::projection(n, r, i));
    }
    'seeding: {
        for g in unary_gens.iter().chain(generators.iter()) {
            let k = g.arity();
            let mut var_map = vec![0usize; k];
            loop {
                if evals + cells > budget.max_evals {
                    exhausted = Some(Exhausted::Evals);
                    break 'seeding;
                }
                evals += cells;
                seeds.push(g.minor(&var_map, r)?);
                // Odometer over variable maps, last coordinate fastest.
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    var_map[pos] += 1;
                    if var_map[pos] < r {
                        break;
                    }
                    var_map[pos] = 0;
                }
                if var_map.iter().all(|&v| v == 0) {
                    break;
                }
            }
        }
    }
    for t in seeds {
        if seen.contains(&t) {
            continue;
        }
        if ordered.len() >= budget.max_tables {
            exhausted = Some(Exhausted::Tables);
            break;
        }
        let stop_hit = match &stop {
            Stop::Never => false,
            Stop::Outside(base) => !base.contains(&t),
            Stop::Found(target) => t == **target,
        };
        seen.insert(t.clone());
        ordered.push(t.clone());
        if stop_hit {
            hit = Some(t);
            break;
        }
    }

    // Closure rounds: apply every outer generator to argument tuples that
    // contain at least one table discovered in the previous round.
    let mut frontier_start = 0usize;
    while hit.is_none() && exhausted.is_none() && frontier_start < ordered.len() {
        let frontier_end = ordered.len();
        let mut round: Vec<OpTable> = Vec::new();
        'gens: for &(g, symmetric) in &step_gens {
            let m = g.arity();
            // Indices below `frontier_start` are old; tuples made purely of
            // old tables were already handled in an earlier round.
            let total = frontier_end;
            let mut idx = vec![0usize; m];
            loop {
                let fresh = idx.iter().any(|&i| i >= frontier_start);
                let admissible = fresh && (!symmetric || idx.windows(2).all(|w| w[0] <= w[1]));
                if admissible {
                    if evals + cells > budget.max_evals {
                        exhausted = Some(Exhausted::Evals);
                        break 'gens;
                    }
                    evals += cells;
                    let args: Vec<&OpTable> = idx.iter().map(|&i| &ordered[i]).collect();
                    let t = g.compose(&args)?;
                    if !seen.contains(&t) {
                        if seen.len() >= budget.max_tables {
                            exhausted = Some(Exhausted::Tables);
                            break 'gens;
                        }
                        let stop_hit = match &stop {
                            Stop::Never => false,
                            Stop::Outside(base) => !base.contains(&t),
                            Stop::Found(target) => t == **target,
                        };
                        seen.insert(t.clone());
                        round.push(t.clone());
                        if stop_hit {
                            hit = Some(t);
                            break 'gens;
                        }
                    }
                }
                // Odometer over index tuples, last position fastest.
                let mut pos = m;
                let mut done = true;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < total {
                        done = false;
                        break;
                    }
                    idx[pos] = 0;
                }
                if done {
                    break;
                }
            }
        }
        frontier_start = frontier_end;
        ordered.extend(round);
    }

    let saturated = hit.is_none() && exhausted.is_none();
    let mut tables = ordered;
    tables.sort_unstable();
    Ok(GenOutcome {
        slice: CloneSlice {
            n,
            r,
            tables,
            generators: generators.to_vec(),
            saturated,
        },
        hit,
        exhausted,
    })
}

/// Whether a table is invariant under every permutation of its arguments.
///
/// Checked on the adjacent transpositions, which generate the full
/// symmetric group on argument positions.
fn fully_symmetric(g: &OpTable) -> Result<bool, OpError> {
    let k = g.arity();
    let identity: Vec<usize> = (0..k).collect();
    for p in 0..k.saturating_sub(1) {
        let mut swapped = identity.clone();
        swapped.swap(p, p + 1);
        if g.minor(&swapped, k)? != *g {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `f` is generated by the group alone, i.e. is essentially unary
/// with a unary part belonging to the action.
pub fn in_group_part(f: &OpTable, action: &FiniteAction) -> bool {
    f.domain_size() == action.domain_size()
        && match f.essentially_unary() {
            Some(part) => Permutation::from_image(part.unary)
                .is_ok_and(|p| action.element_index(&p).is_some()),
            None => false,
        }
}

/// Decide whether `f` is almost minimal over the action: `f` itself lies
/// outside the clone of the group, and for every arity `r` strictly below
/// the arity of `f`, the arity-`r` slice of the clone of `G ∪ {f}` equals
/// the arity-`r` slice of the clone of `G` alone.
///
/// On failure the witness is the first lower-arity table found that the
/// group does not generate.  Requires `f` to lie outside the clone of the
/// group; a violation is reported as a distinct error, not as a verdict.
pub fn is_almost_minimal(
    action: &FiniteAction,
    f: &OpTable,
    budget: &GenBudget,
) -> Result<Verdict<OpTable>, CloneError> {
    if f.domain_size() != action.domain_size() {
        return Err(CloneError::Precondition(format!(
            "operation domain size {} does not match the action domain size {}",
            f.domain_size(),
            action.domain_size()
        )));
    }
    if in_group_part(f, action) {
        return Err(CloneError::Precondition(
            "operation is generated by the group alone".into(),
        ));
    }
    for r in 1..f.arity() {
        let base = generate(action, &[], r, budget, Stop::Never)?;
        if let Some(e) = base.exhausted {
            return Ok(Verdict::Unknown(e));
        }
        let out = generate(action, &[f.clone()], r, budget, Stop::Outside(&base.slice))?;
        if let Some(h) = out.hit {
            return Ok(Verdict::Fails(h));
        }
        if let Some(e) = out.exhausted {
            return Ok(Verdict::Unknown(e));
        }
    }
    Ok(Verdict::Holds)
}

/// Whether `candidate` generates `target` over the action, i.e. `target`
/// lies in the arity slice of the clone of `G ∪ {candidate}` at the arity
/// of `target`.
pub fn regenerates(
    action: &FiniteAction,
    candidate: &OpTable,
    target: &OpTable,
    budget: &GenBudget,
) -> Result<Verdict<()>, CloneError> {
    let out = generate(
        action,
        std::slice::from_ref(candidate),
        target.arity(),
        budget,
        Stop::Found(target),
    )?;
    if out.hit.is_some() {
        return Ok(Verdict::Holds);
    }
    match out.exhausted {
        Some(e) => Ok(Verdict::Unknown(e)),
        None => Ok(Verdict::Fails(())),
    }
}

/// Decide whether `f` is strictly almost minimal: almost minimal, and every
/// essential member of the arity-`k` slice of the clone of `G ∪ {f}`
/// regenerates `f` (where `k` is the arity of `f`).
pub fn is_strictly_almost_minimal(
    action: &FiniteAction,
    f: &OpTable,
    budget: &GenBudget,
) -> Result<Verdict<StrictFailure>, CloneError> {
    match is_almost_minimal(action, f, budget)? {
        Verdict::Fails(t) => return Ok(Verdict::Fails(StrictFailure::NotAlmostMinimal(t))),
        Verdict::Unknown(e) => return Ok(Verdict::Unknown(e)),
        Verdict::Holds => {}
    }
    let out = generate(action, &[f.clone()], f.arity(), budget, Stop::Never)?;
    if let Some(e) = out.exhausted {
        return Ok(Verdict::Unknown(e));
    }
    let mut unknown = None;
    for h in out.slice.essential_tables() {
        match regenerates(action, h, f, budget)? {
            Verdict::Holds => {}
            Verdict::Fails(()) => {
                return Ok(Verdict::Fails(StrictFailure::NonRegenerating(h.clone())));
            }
            Verdict::Unknown(e) => unknown = Some(e),
        }
    }
    match unknown {
        Some(e) => Ok(Verdict::Unknown(e)),
        None => Ok(Verdict::Holds),
    }
}

/// Decide whether `f` is minimal with slice inspection bounded at
/// `max_arity`: `f` is almost minimal, and every essential member of every
/// slice of the clone of `G ∪ {f}` of arity between the arity of `f` and
/// `max_arity` regenerates `f`.
pub fn is_minimal_bounded(
    action: &FiniteAction,
    f: &OpTable,
    max_arity: usize,
    budget: &GenBudget,
) -> Result<MinimalVerdict, CloneError> {
    let k = f.arity();
    if max_arity < k {
        return Err(CloneError::Precondition(format!(
            "arity bound {max_arity} is below the operation arity {k}"
        )));
    }
    match is_almost_minimal(action, f, budget)? {
        Verdict::Fails(t) => {
            return Ok(MinimalVerdict::NotMinimal(StrictFailure::NotAlmostMinimal(
                t,
            )));
        }
        Verdict::Unknown(e) => return Ok(MinimalVerdict::Unknown(e)),
        Verdict::Holds => {}
    }
    let mut unknown = None;
    for r in k..=max_arity {
        let out = generate(action, &[f.clone()], r, budget, Stop::Never)?;
        if let Some(e) = out.exhausted {
            return Ok(MinimalVerdict::Unknown(e));
        }
        for h in out.slice.essential_tables() {
            match regenerates(action, h, f, budget)? {
                Verdict::Holds => {}
                Verdict::Fails(()) => {
                    return Ok(MinimalVerdict::NotMinimal(StrictFailure::NonRegenerating(
                        h.clone(),
                    )));
                }
                Verdict::Unknown(e) => unknown = Some(e),
            }
        }
    }
    match unknown {
        Some(e) => Ok(MinimalVerdict::Unknown(e)),
        None => Ok(MinimalVerdict::MinimalUpTo(max_arity)),
    }
}

/// A clone-slice homomorphism onto projections, obtained by restricting
/// every member to a fixed two-element subset of a nontrivial orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionAssignment {
    /// The two orbit members every table was restricted to.
    pub base_pair: (usize, usize),
    /// For each slice member (in canonical order), the index of the
    /// projection its restriction collapses to.
    pub assignment: Vec<usize>,
}

/// Try to map a saturated slice homomorphically onto projections by
/// restriction to a two-element subset of a nontrivial orbit.
///
/// Every member must restrict to a function depending on exactly one
/// coordinate, and the induced assignment must commute with composition by
/// the slice generators and the group unaries.  Returns `None` when either
/// requirement fails.
pub fn hom_to_projections(
    action: &FiniteAction,
    slice: &CloneSlice,
) -> Result<Option<ProjectionAssignment>, CloneError> {
    if slice.domain_size() != action.domain_size() {
        return Err(CloneError::Precondition(
            "slice domain size does not match the action domain size".into(),
        ));
    }
    if !slice.is_saturated() {
        return Err(CloneError::Precondition(
            "slice is not saturated; the homomorphism law cannot be verified".into(),
        ));
    }
    let pair = action
        .orbits()
        .iter()
        .find(|orbit| orbit.len() >= 2)
        .map(|orbit| (orbit[0], orbit[1]));
    let Some((c, d)) = pair else {
        return Err(CloneError::Precondition(
            "action has no nontrivial orbit to restrict to".into(),
        ));
    };

    // Coordinates the restriction of `t` to {c, d} genuinely depends on.
    let restricted_dependence = |t: &OpTable| -> Vec<usize> {
        let m = t.arity();
        let mut values = vec![0usize; 1usize << m];
        let mut args = vec![0usize; m];
        for mask in 0..(1usize << m) {
            for (i, a) in args.iter_mut().enumerate() {
                *a = if mask >> i & 1 == 1 { d } else { c };
            }
            values[mask] = t.eval(&args);
        }
        (0..m)
            .filter(|&i| (0..(1usize << m)).any(|mask| values[mask] != values[mask ^ (1 << i)]))
            .collect()
    };

    let mut assignment = Vec::with_capacity(slice.tables().len());
    for t in slice.tables() {
        let deps = restricted_dependence(t);
        if deps.len() != 1 {
            return Ok(None);
        }
        assignment.push(deps[0]);
    }

    // The homomorphism law: composing by any generator must act on
    // assignments as the generator's own restriction does.
    let unary_gens: Vec<OpTable> = action
        .elements()
        .iter()
        .skip(1)
        .map(|g| {
            OpTable::unary(action.domain_size(), g.image()).expect("group images are valid tables")
        })
        .collect();
    for g in slice.generators().iter().chain(unary_gens.iter()) {
        let g_deps = restricted_dependence(g);
        if g_deps.len() != 1 {
            return Ok(None);
        }
        let lead = g_deps[0];
        let m = g.arity();
        let count = slice.tables().len();
        let mut idx = vec![0usize; m];
        loop {
            let args: Vec<&OpTable> = idx.iter().map(|&i| &slice.tables()[i]).collect();
            let composed = g.compose(&args)?;
            let Ok(pos) = slice.tables().binary_search(&composed) else {
                return Err(CloneError::Precondition(
                    "slice is not closed under its own generators".into(),
                ));
            };
            if assignment[pos] != assignment[idx[lead]] {
                return Ok(None);
            }
            let mut p = m;
            let mut done = true;
            loop {
                if p == 0 {
                    break;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < count {
                    done = false;
                    break;
                }
                idx[p] = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(Some(ProjectionAssignment {
        base_pair: (c, d),
        assignment,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Permutation;

    fn regular_z2() -> FiniteAction {
        FiniteAction::from_generators(2, &[Permutation::from_image(vec![1, 0]).unwrap()]).unwrap()
    }

    fn xor3() -> OpTable {
        OpTable::from_fn(2, 3, |a| a[0] ^ a[1] ^ a[2])
    }

    fn maj3() -> OpTable {
        OpTable::from_fn(2, 3, |a| (a[0] + a[1] + a[2]) / 2)
    }

    #[test]
    fn group_slices_are_essentially_unary() {
        let action = regular_z2();
        let budget = GenBudget::default();
        let unary = generate_slice(&action, &[], 1, &budget).unwrap();
        assert!(unary.is_saturated());
        let expected1 = {
            let mut v = vec![
                OpTable::unary(2, &[0, 1]).unwrap(),
                OpTable::unary(2, &[1, 0]).unwrap(),
            ];
            v.sort_unstable();
            v
        };
        assert_eq!(unary.tables(), expected1.as_slice());

        let binary = generate_slice(&action, &[], 2, &budget).unwrap();
        assert!(binary.is_saturated());
        let expected2 = {
            let mut v = vec![
                OpTable::projection(2, 2, 0),
                OpTable::projection(2, 2, 1),
                OpTable::from_fn(2, 2, |a| 1 - a[0]),
                OpTable::from_fn(2, 2, |a| 1 - a[1]),
            ];
            v.sort_unstable();
            v
        };
        assert_eq!(binary.tables(), expected2.as_slice());
    }

    #[test]
    fn parity_slice_holds_exactly_the_odd_support_tables() {
        // Every term over {parity, negation} computes an odd-size parity of
        // its variables, possibly complemented: the ternary slice has the
        // six essentially unary literals plus the two full parities.
        let action = regular_z2();
        let slice = generate_slice(&action, &[xor3()], 3, &GenBudget::default()).unwrap();
        assert!(slice.is_saturated());
        assert_eq!(slice.tables().len(), 8);
        assert!(slice.contains(&xor3()));
        assert!(slice.contains(&OpTable::from_fn(2, 3, |a| 1 - (a[0] ^ a[1] ^ a[2]))));
        assert!(slice.contains(&OpTable::projection(2, 3, 2)));
        assert!(slice.contains(&OpTable::from_fn(2, 3, |a| 1 - a[1])));
        assert_eq!(slice.essential_tables().len(), 2);
    }

    #[test]
    fn parity_is_almost_minimal_over_the_regular_involution() {
        let action = regular_z2();
        let verdict = is_almost_minimal(&action, &xor3(), &GenBudget::default()).unwrap();
        assert_eq!(verdict, Verdict::Holds);
    }

    #[test]
    fn conjunction_fails_almost_minimality_with_a_constant_witness() {
        // Already the unary slice of ⟨G ∪ {∧₃}⟩ leaks: identifying the
        // arguments as (x, x, ¬x) yields the constant 0, which no group
        // generates.
        let action = regular_z2();
        let and3 = OpTable::from_fn(2, 3, |a| a[0] & a[1] & a[2]);
        let verdict = is_almost_minimal(&action, &and3, &GenBudget::default()).unwrap();
        let zero = OpTable::unary(2, &[0, 0]).unwrap();
        assert_eq!(verdict, Verdict::Fails(zero));
    }

    #[test]
    fn group_members_are_rejected_as_inputs() {
        let action = regular_z2();
        let not_x1 = OpTable::from_fn(2, 3, |a| 1 - a[1]);
        assert!(in_group_part(&not_x1, &action));
        let err = is_almost_minimal(&action, &not_x1, &GenBudget::default()).unwrap_err();
        assert!(matches!(err, CloneError::Precondition(_)));
    }

    #[test]
    fn parity_is_strictly_almost_minimal() {
        let action = regular_z2();
        let verdict = is_strictly_almost_minimal(&action, &xor3(), &GenBudget::default()).unwrap();
        assert_eq!(verdict, Verdict::Holds);
    }

    #[test]
    fn majority_is_almost_minimal_but_not_strictly() {
        let action = regular_z2();
        let m = maj3();
        assert_eq!(
            is_almost_minimal(&action, &m, &GenBudget::default()).unwrap(),
            Verdict::Holds
        );
        // The slice of the clone of {group, majority} contains the ternary
        // parity (an odd minority), which only generates linear operations
        // and therefore cannot regenerate majority.
        let slice = generate_slice(&action, &[m.clone()], 3, &GenBudget::default()).unwrap();
        assert!(slice.contains(&xor3()));
        assert_eq!(
            regenerates(&action, &xor3(), &m, &GenBudget::default()).unwrap(),
            Verdict::Fails(())
        );
        let verdict = is_strictly_almost_minimal(&action, &m, &GenBudget::default()).unwrap();
        assert!(matches!(
            verdict,
            Verdict::Fails(StrictFailure::NonRegenerating(_))
        ));
    }

    #[test]
    fn parity_is_minimal_within_a_small_arity_bound() {
        let action = regular_z2();
        let verdict = is_minimal_bounded(&action, &xor3(), 4, &GenBudget::default()).unwrap();
        assert_eq!(verdict, MinimalVerdict::MinimalUpTo(4));
    }

    #[test]
    fn tiny_budgets_surface_as_unknown() {
        let action = regular_z2();
        let budget = GenBudget {
            max_tables: 3,
            max_evals: 1_000,
        };
        let slice = generate_slice(&action, &[maj3()], 3, &budget).unwrap();
        assert!(!slice.is_saturated());
        let verdict = is_almost_minimal(&action, &maj3(), &budget).unwrap();
        assert!(matches!(verdict, Verdict::Unknown(_)));
    }

    #[test]
    fn group_slice_maps_onto_projections() {
        let action = FiniteAction::free_boolean(2, 1).unwrap();
        let slice = generate_slice(&action, &[], 2, &GenBudget::default()).unwrap();
        let hom = hom_to_projections(&action, &slice).unwrap().unwrap();
        assert_eq!(hom.base_pair, (0, 1));
        assert_eq!(hom.assignment.len(), slice.tables().len());
        for (t, &coord) in slice.tables().iter().zip(&hom.assignment) {
            let part = t.essentially_unary().unwrap();
            // Constant-free essentially unary tables restrict to their own
            // essential coordinate.
            assert_eq!(part.coord, coord);
        }
    }

    #[test]
    fn parity_slice_has_no_projection_homomorphism() {
        let action = regular_z2();
        let slice = generate_slice(&action, &[xor3()], 3, &GenBudget::default()).unwrap();
        assert_eq!(hom_to_projections(&action, &slice).unwrap(), None);
    }

    #[test]
    fn collision_semiprojection_slice_maps_onto_projections() {
        // Ternary operation on three free involution orbits: any argument
        // tuple with two entries in one orbit returns the first argument,
        // otherwise the argument whose orbit comes last.
        let action = FiniteAction::free_boolean(3, 1).unwrap();
        let f = OpTable::from_fn(6, 3, |a| {
            let orbit = |x: usize| x / 2;
            let collides = orbit(a[0]) == orbit(a[1])
                || orbit(a[0]) == orbit(a[2])
                || orbit(a[1]) == orbit(a[2]);
            if collides {
                a[0]
            } else {
                *a.iter().max_by_key(|&&x| orbit(x)).unwrap()
            }
        });
        let slice = generate_slice(&action, &[f], 3, &GenBudget::default()).unwrap();
        assert!(slice.is_saturated());
        let hom = hom_to_projections(&action, &slice).unwrap();
        assert!(hom.is_some());
    }

    #[test]
    fn unary_operations_outside_the_group_are_almost_minimal() {
        // There are no slices below arity one, so the condition is vacuous.
        let action = regular_z2();
        let constant = OpTable::unary(2, &[0, 0]).unwrap();
        assert_eq!(
            is_almost_minimal(&action, &constant, &GenBudget::default()).unwrap(),
            Verdict::Holds
        );
    }
}
