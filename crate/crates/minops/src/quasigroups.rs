//! Group-invariant Steiner quasigroup operations.
//!
//! A ternary operation `q` on the domain of a free action is a *G-invariant
//! Steiner operation* when it is idempotent, fully symmetric, satisfies the
//! minority law `q(x,x,y) = y`, the quadruple law `q(x,y,q(x,y,z)) = z`,
//! and commutes with the group: `q(αx,βy,γz) = αβγ·q(x,y,z)`. It is
//! *Boolean* when additionally `q(x,y,q(z,y,w)) = q(x,z,w)`.
//!
//! Every such operation decomposes into orbit-level data ([`GWeightedSq`]):
//! a quadruple system on the orbit ids whose blocks drive the orbit of the
//! result, plus a weighting of the blocks by group elements that twists the
//! result inside its orbit on orbit-injective inputs. Boolean operations
//! correspond exactly to Boolean quadruple systems with *transparent*
//! weightings, which lets them be enumerated structurally
//! ([`enumerate_ginv_boolean`]) and counted in closed form
//! ([`ginv_boolean_count_formula`]); a brute-force search over the free
//! table cells ([`brute_force_ginv_boolean`]) confirms both on small
//! domains. [`certify_minimal_boolean`] verifies that a Boolean operation
//! is an iterated abelian-group sum and that its low-arity clone slices
//! contain nothing but twisted odd sums, each of which regenerates the
//! operation.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::action::{FiniteAction, Permutation};
use crate::clones::{generate_slice, regenerates, CloneError, GenBudget, Verdict};
use crate::designs::{
    boolean_sqs, enumerate_sqs, enumerate_transparent, BlockWeighting, DesignError, Sqs,
};
use crate::op::{OpError, OpTable};

/// Largest orbit count for enumeration and extraction.
pub const MAX_ORBITS: usize = 8;

/// Errors of the quasigroup layer.
#[derive(Debug, Error)]
pub enum QuasigroupError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Clone(#[from] CloneError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parameter {name} = {value} outside supported range {min}..={max}")]
    Range { name: &'static str, value: usize, min: usize, max: usize },
}

// ---------------------------------------------------------------------------
// Boolean group bases
// ---------------------------------------------------------------------------

/// Coordinates for an elementary abelian 2-group: a generating basis
/// identifying each group element with a bitmask.
#[derive(Debug, Clone)]
pub struct BooleanBasis {
    rank: u32,
    elem_to_mask: Vec<u32>,
    mask_to_elem: Vec<usize>,
}

impl BooleanBasis {
    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Mask coordinates of a group element (by element index).
    pub fn mask_of(&self, elem: usize) -> u32 {
        self.elem_to_mask[elem]
    }

    /// Element index with the given mask coordinates.
    pub fn element_of(&self, mask: u32) -> usize {
        self.mask_to_elem[mask as usize]
    }
}

/// Picks a basis of the acting group, which must be an elementary abelian
/// 2-group (every element an involution).
pub fn boolean_basis(action: &FiniteAction) -> Result<BooleanBasis, QuasigroupError> {
    if !action.is_boolean() {
        return Err(QuasigroupError::Precondition(
            "the acting group has a non-involution element".into(),
        ));
    }
    let order = action.order();
    let identity = action
        .element_index(&Permutation::identity(action.domain_size()))
        .expect("every group contains the identity");
    let mut elem_to_mask = vec![u32::MAX; order];
    let mut mask_to_elem = vec![usize::MAX; order];
    elem_to_mask[identity] = 0;
    mask_to_elem[0] = identity;
    let mut span = vec![identity];
    let mut rank = 0;
    for cand in 0..order {
        if elem_to_mask[cand] != u32::MAX {
            continue;
        }
        let bit = 1u32 << rank;
        rank += 1;
        let prior: Vec<usize> = span.clone();
        for &known in &prior {
            let product = action.element(cand).compose(action.element(known));
            let idx = action.element_index(&product).expect("group is closed");
            let mask = bit | elem_to_mask[known];
            elem_to_mask[idx] = mask;
            mask_to_elem[mask as usize] = idx;
            span.push(idx);
        }
    }
    debug_assert_eq!(span.len(), order);
    Ok(BooleanBasis { rank, elem_to_mask, mask_to_elem })
}

// ---------------------------------------------------------------------------
// Steiner law checking
// ---------------------------------------------------------------------------

/// The laws defining (Boolean) invariant Steiner operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteinerLaw {
    Idempotence,
    Symmetry,
    Minority,
    Quadruple,
    Invariance,
    Boolean,
}

impl fmt::Display for SteinerLaw {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SteinerLaw::Idempotence => "idempotence",
            SteinerLaw::Symmetry => "symmetry",
            SteinerLaw::Minority => "minority",
            SteinerLaw::Quadruple => "quadruple",
            SteinerLaw::Invariance => "invariance",
            SteinerLaw::Boolean => "interchange",
        };
        write!(out, "{name}")
    }
}

/// A law violation: the failing law, the witnessing arguments (group
/// element indices first for the invariance law), and the two disagreeing
/// values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerViolation {
    pub law: SteinerLaw,
    pub args: Vec<usize>,
    pub got: usize,
    pub want: usize,
}

fn require_ternary(q: &OpTable, action: &FiniteAction) -> Result<(), QuasigroupError> {
    if q.arity() != 3 {
        return Err(QuasigroupError::Precondition(format!(
            "expected a ternary operation, got arity {}",
            q.arity()
        )));
    }
    if q.domain_size() != action.domain_size() {
        return Err(QuasigroupError::Precondition(format!(
            "operation domain size {} does not match the action domain size {}",
            q.domain_size(),
            action.domain_size()
        )));
    }
    Ok(())
}

/// Exhaustively checks the invariant Steiner laws: idempotence, full
/// symmetry, minority, the quadruple law, and equivariance under the
/// acting group.
pub fn check_ginv_steiner(
    action: &FiniteAction,
    q: &OpTable,
) -> Result<Result<(), SteinerViolation>, QuasigroupError> {
    require_ternary(q, action)?;
    let n = q.domain_size();
    for x in 0..n {
        let got = q.eval(&[x, x, x]);
        if got != x {
            return Ok(Err(SteinerViolation {
                law: SteinerLaw::Idempotence,
                args: vec![x, x, x],
                got,
                want: x,
            }));
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let v = q.eval(&[x, y, z]);
                for swapped in [[y, x, z], [x, z, y]] {
                    let got = q.eval(&swapped);
                    if got != v {
                        return Ok(Err(SteinerViolation {
                            law: SteinerLaw::Symmetry,
                            args: swapped.to_vec(),
                            got,
                            want: v,
                        }));
                    }
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let got = q.eval(&[x, x, y]);
            if got != y {
                return Ok(Err(SteinerViolation {
                    law: SteinerLaw::Minority,
                    args: vec![x, x, y],
                    got,
                    want: y,
                }));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let got = q.eval(&[x, y, q.eval(&[x, y, z])]);
                if got != z {
                    return Ok(Err(SteinerViolation {
                        law: SteinerLaw::Quadruple,
                        args: vec![x, y, z],
                        got,
                        want: z,
                    }));
                }
            }
        }
    }
    let order = action.order();
    for a in 0..order {
        for b in 0..order {
            for c in 0..order {
                let product = action
                    .element(a)
                    .compose(action.element(b))
                    .compose(action.element(c));
                for x in 0..n {
                    let ax = action.element(a).apply(x);
                    for y in 0..n {
                        let by = action.element(b).apply(y);
                        for z in 0..n {
                            let got = q.eval(&[ax, by, action.element(c).apply(z)]);
                            let want = product.apply(q.eval(&[x, y, z]));
                            if got != want {
                                return Ok(Err(SteinerViolation {
                                    law: SteinerLaw::Invariance,
                                    args: vec![a, b, c, x, y, z],
                                    got,
                                    want,
                                }));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Ok(()))
}

/// Exhaustively checks the interchange law `q(x,y,q(z,y,w)) = q(x,z,w)`
/// that singles out Boolean operations among invariant Steiner ones.
pub fn check_boolean(q: &OpTable) -> Result<Result<(), SteinerViolation>, QuasigroupError> {
    if q.arity() != 3 {
        return Err(QuasigroupError::Precondition(format!(
            "expected a ternary operation, got arity {}",
            q.arity()
        )));
    }
    let n = q.domain_size();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let got = q.eval(&[x, y, q.eval(&[z, y, w])]);
                    let want = q.eval(&[x, z, w]);
                    if got != want {
                        return Ok(Err(SteinerViolation {
                            law: SteinerLaw::Boolean,
                            args: vec![x, y, z, w],
                            got,
                            want,
                        }));
                    }
                }
            }
        }
    }
    Ok(Ok(()))
}

// ---------------------------------------------------------------------------
// Orbit-level presentation
// ---------------------------------------------------------------------------

/// Orbit-level data of a G-invariant Steiner operation over a free action:
/// a transversal of the orbits, a Steiner quadruple system on the orbit
/// ids, and a weighting of its blocks by group elements.
///
/// The operation it presents sends `(αx_a, βx_b, γx_c)` (decomposed over
/// the transversal `x_·`) to `αβγδ·x_d`, where `d` completes `{a, b, c}`
/// inside the quadruple system when the three orbits are distinct (with
/// `δ` the weight of that block), and otherwise `d` is the minority-forced
/// orbit with `δ` the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GWeightedSq {
    action: FiniteAction,
    transversal: Vec<usize>,
    sqs: Sqs,
    weights: Vec<usize>,
}

impl GWeightedSq {
    /// Builds the presentation over the canonical transversal (the minimal
    /// member of each orbit).
    pub fn new(
        action: FiniteAction,
        sqs: Sqs,
        weights: Vec<usize>,
    ) -> Result<Self, QuasigroupError> {
        let transversal = action.orbit_reps();
        GWeightedSq::with_transversal(action, transversal, sqs, weights)
    }

    /// Builds the presentation over an explicit transversal: one member
    /// per orbit, listed in orbit order.
    pub fn with_transversal(
        action: FiniteAction,
        transversal: Vec<usize>,
        sqs: Sqs,
        weights: Vec<usize>,
    ) -> Result<Self, QuasigroupError> {
        if let Some((elem, witness)) = action.free_violation() {
            return Err(QuasigroupError::Precondition(format!(
                "the action is not free: element {elem} fixes point {witness}"
            )));
        }
        let s = action.orbit_count();
        if sqs.point_count() != s {
            return Err(QuasigroupError::Precondition(format!(
                "quadruple system on {} points does not match {} orbits",
                sqs.point_count(),
                s
            )));
        }
        if transversal.len() != s {
            return Err(QuasigroupError::Precondition(format!(
                "transversal of size {} does not match {} orbits",
                transversal.len(),
                s
            )));
        }
        for (o, &x) in transversal.iter().enumerate() {
            if x >= action.domain_size() || action.orbit_of(x) != o {
                return Err(QuasigroupError::Precondition(format!(
                    "transversal point {x} does not lie on orbit {o}"
                )));
            }
        }
        if weights.len() != sqs.blocks().len() {
            return Err(QuasigroupError::Precondition(format!(
                "{} weights do not match {} blocks",
                weights.len(),
                sqs.blocks().len()
            )));
        }
        if let Some(&w) = weights.iter().find(|&&w| w >= action.order()) {
            return Err(QuasigroupError::Precondition(format!(
                "weight {w} is not a group element index"
            )));
        }
        Ok(GWeightedSq { action, transversal, sqs, weights })
    }

    pub fn action(&self) -> &FiniteAction {
        &self.action
    }

    pub fn transversal(&self) -> &[usize] {
        &self.transversal
    }

    pub fn sqs(&self) -> &Sqs {
        &self.sqs
    }

    /// Block weights as group element indices, parallel to the blocks.
    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    /// The orbit-level ternary operation: minority-forced on repeated
    /// orbit ids, block completion on distinct ones.
    pub fn orbit_value(&self, a: usize, b: usize, c: usize) -> Result<usize, QuasigroupError> {
        if a == b {
            return Ok(c);
        }
        if a == c {
            return Ok(b);
        }
        if b == c {
            return Ok(a);
        }
        self.sqs.fourth_point(a, b, c).ok_or_else(|| {
            QuasigroupError::Precondition(format!(
                "orbit triple ({a}, {b}, {c}) is not covered by the quadruple system"
            ))
        })
    }

    /// Materializes the presented operation as a full table.
    pub fn build_q(&self) -> Result<OpTable, QuasigroupError> {
        let n = self.action.domain_size();
        // Decompose each point over the transversal once.
        let mut orbit = vec![0usize; n];
        let mut shift = vec![0usize; n];
        for x in 0..n {
            let o = self.action.orbit_of(x);
            orbit[x] = o;
            shift[x] = self
                .action
                .transporter(self.transversal[o], x)
                .expect("transversal point lies on the orbit");
        }
        let identity = self
            .action
            .element_index(&Permutation::identity(n))
            .expect("the identity is a group element");
        let mut values = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (oa, ob, oc) = (orbit[a], orbit[b], orbit[c]);
                    let d = self.orbit_value(oa, ob, oc)?;
                    let delta = if oa != ob && oa != oc && ob != oc {
                        let mut block = [oa, ob, oc, d];
                        block.sort_unstable();
                        let idx = self.sqs.block_index(&block).expect("orbit_value used a block");
                        self.weights[idx]
                    } else {
                        identity
                    };
                    let perm = self
                        .action
                        .element(shift[a])
                        .compose(self.action.element(shift[b]))
                        .compose(self.action.element(shift[c]))
                        .compose(self.action.element(delta));
                    values.push(perm.apply(self.transversal[d]));
                }
            }
        }
        Ok(OpTable::new(n, 3, values)?)
    }
}

/// Recovers the orbit-level presentation of a G-invariant Steiner
/// operation over the canonical transversal.
pub fn extract(action: &FiniteAction, q: &OpTable) -> Result<GWeightedSq, QuasigroupError> {
    if let Err(v) = check_ginv_steiner(action, q)? {
        return Err(QuasigroupError::Precondition(format!(
            "operation violates the {} law at {:?}",
            v.law, v.args
        )));
    }
    if action.orbit_count() > MAX_ORBITS {
        return Err(QuasigroupError::Range {
            name: "orbits",
            value: action.orbit_count(),
            min: 1,
            max: MAX_ORBITS,
        });
    }
    let reps = action.orbit_reps();
    let s = reps.len();
    let mut blocks: BTreeMap<[usize; 4], usize> = BTreeMap::new();
    for a in 0..s {
        for b in a + 1..s {
            for c in b + 1..s {
                let v = q.eval(&[reps[a], reps[b], reps[c]]);
                let d = action.orbit_of(v);
                let delta = action
                    .transporter(reps[d], v)
                    .expect("representative lies on the value's orbit");
                let mut block = [a, b, c, d];
                block.sort_unstable();
                if let Some(&prior) = blocks.get(&block) {
                    if prior != delta {
                        return Err(QuasigroupError::Precondition(format!(
                            "block {block:?} received two distinct weights"
                        )));
                    }
                } else {
                    blocks.insert(block, delta);
                }
            }
        }
    }
    let sqs = Sqs::new(s, blocks.keys().copied().collect())?;
    let weights = blocks.values().copied().collect();
    GWeightedSq::new(action.clone(), sqs, weights)
}

// ---------------------------------------------------------------------------
// Enumeration and counting
// ---------------------------------------------------------------------------

fn require_free_boolean(action: &FiniteAction) -> Result<BooleanBasis, QuasigroupError> {
    if let Some((elem, witness)) = action.free_violation() {
        return Err(QuasigroupError::Precondition(format!(
            "the action is not free: element {elem} fixes point {witness}"
        )));
    }
    boolean_basis(action)
}

/// All G-invariant Boolean operations over a free action of an elementary
/// abelian 2-group, built structurally: one operation per pair of a
/// quadruple system on the orbit ids and a transparent block weighting.
/// Empty exactly when no quadruple system exists on the orbit count.
/// Results are sorted by table values.
pub fn enumerate_ginv_boolean(action: &FiniteAction) -> Result<Vec<OpTable>, QuasigroupError> {
    let basis = require_free_boolean(action)?;
    let s = action.orbit_count();
    if s > MAX_ORBITS {
        return Err(QuasigroupError::Range { name: "orbits", value: s, min: 1, max: MAX_ORBITS });
    }
    let systems = if s == 1 {
        vec![Sqs::new(1, Vec::new())?]
    } else {
        enumerate_sqs(s)?
    };
    let mut out = Vec::new();
    for sqs in systems {
        for weighting in enumerate_transparent(&sqs, basis.rank())? {
            let weights: Vec<usize> =
                weighting.values().iter().map(|&m| basis.element_of(m)).collect();
            let gw = GWeightedSq::new(action.clone(), sqs.clone(), weights)?;
            out.push(gw.build_q()?);
        }
    }
    out.sort_by(|a, b| a.values().cmp(b.values()));
    Ok(out)
}

/// Number of G-invariant Boolean operations over a free action with `s`
/// orbits of a group of the given order: `1` at `s = 1`, zero unless `s`
/// is a power of two, and otherwise
/// `(s−1)!·|G|^{s−n−1} / ∏_{k<n}(s−2^k)` for `s = 2^n`.
pub fn ginv_boolean_count_formula(s: usize, group_order: usize) -> u64 {
    if s == 0 || group_order == 0 {
        return 0;
    }
    if s == 1 {
        return 1;
    }
    if !s.is_power_of_two() {
        return 0;
    }
    let n = s.trailing_zeros();
    let mut numerator: u128 = 1;
    for i in 1..s {
        numerator *= i as u128;
    }
    numerator *= (group_order as u128).pow(s as u32 - n - 1);
    let mut denominator: u128 = 1;
    for k in 0..n {
        denominator *= (s - (1usize << k)) as u128;
    }
    u64::try_from(numerator / denominator).expect("count fits in 64 bits")
}

/// Number of G-invariant Steiner operations over a free action with `s ≤ 8`
/// orbits of a group of the given order: the number of labeled quadruple
/// systems times `|G|^{#blocks}`.
pub fn ginv_steiner_count_formula(s: usize, group_order: usize) -> Result<u64, QuasigroupError> {
    if s == 0 || s > MAX_ORBITS {
        return Err(QuasigroupError::Range { name: "s", value: s, min: 1, max: MAX_ORBITS });
    }
    if s == 1 {
        return Ok(1);
    }
    let systems = enumerate_sqs(s)?;
    let Some(first) = systems.first() else {
        return Ok(0);
    };
    let blocks = first.blocks().len() as u32;
    Ok(systems.len() as u64 * (group_order as u64).pow(blocks))
}

fn brute_force_ginv(
    action: &FiniteAction,
    boolean_only: bool,
) -> Result<Vec<OpTable>, QuasigroupError> {
    if let Some((elem, witness)) = action.free_violation() {
        return Err(QuasigroupError::Precondition(format!(
            "the action is not free: element {elem} fixes point {witness}"
        )));
    }
    let n = action.domain_size();
    let s = action.orbit_count();
    if n > 8 || s > 4 {
        return Err(QuasigroupError::Precondition(format!(
            "brute force supports at most 8 points and 4 orbits, got {n} points, {s} orbits"
        )));
    }
    let reps = action.orbit_reps();
    // Decompose each point once.
    let mut orbit = vec![0usize; n];
    let mut shift = vec![0usize; n];
    for x in 0..n {
        let o = action.orbit_of(x);
        orbit[x] = o;
        shift[x] = action.transporter(reps[o], x).expect("representative on orbit");
    }
    // Free cells: one value per unordered orbit-injective representative
    // triple; all other cells follow from invariance, symmetry, and
    // minority.
    let mut free_triples = Vec::new();
    for a in 0..s {
        for b in a + 1..s {
            for c in b + 1..s {
                free_triples.push([a, b, c]);
            }
        }
    }
    let cells = free_triples.len();
    let mut choice = vec![0usize; cells];
    let mut out = Vec::new();
    loop {
        // Build the candidate table from the current free-cell choice.
        let rep_value = |oa: usize, ob: usize, oc: usize| -> usize {
            if oa == ob {
                return reps[oc];
            }
            if oa == oc {
                return reps[ob];
            }
            if ob == oc {
                return reps[oa];
            }
            let mut key = [oa, ob, oc];
            key.sort_unstable();
            choice[free_triples.binary_search(&key).expect("triple enumerated")]
        };
        let q = OpTable::from_fn(n, 3, |args| {
            let (a, b, c) = (args[0], args[1], args[2]);
            let base = rep_value(orbit[a], orbit[b], orbit[c]);
            action
                .element(shift[a])
                .compose(action.element(shift[b]))
                .compose(action.element(shift[c]))
                .apply(base)
        });
        if check_ginv_steiner(action, &q)?.is_ok()
            && (!boolean_only || check_boolean(&q)?.is_ok())
        {
            out.push(q);
        }
        // Advance the mixed-radix counter over free-cell values.
        let mut pos = 0;
        loop {
            if pos == cells {
                out.sort_by(|a, b| a.values().cmp(b.values()));
                return Ok(out);
            }
            choice[pos] += 1;
            if choice[pos] < n {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Brute-force enumeration of G-invariant Boolean operations on domains of
/// at most 8 points: tries every value assignment on the free cells and
/// filters by the exhaustive law checks. Independent of the structural
/// enumeration.
pub fn brute_force_ginv_boolean(action: &FiniteAction) -> Result<Vec<OpTable>, QuasigroupError> {
    brute_force_ginv(action, true)
}

/// Brute-force enumeration of G-invariant Steiner operations (Boolean or
/// not) on domains of at most 8 points.
pub fn brute_force_ginv_steiner(action: &FiniteAction) -> Result<Vec<OpTable>, QuasigroupError> {
    brute_force_ginv(action, false)
}

// ---------------------------------------------------------------------------
// Pointwise weightings
// ---------------------------------------------------------------------------

/// The block weighting of the Boolean quadruple system on `s = 2^m` points
/// induced by weighting the points: each block takes the sum of its four
/// point weights. Pointwise weightings are always transparent; distinct
/// point vectors induce the same block weighting exactly when they differ
/// by an affine map.
pub fn pointwise_boolean_weighting(
    s: usize,
    rank: u32,
    point_weights: &[u32],
) -> Result<BlockWeighting, QuasigroupError> {
    if !s.is_power_of_two() || s > MAX_ORBITS {
        return Err(QuasigroupError::Range { name: "s", value: s, min: 1, max: MAX_ORBITS });
    }
    if point_weights.len() != s {
        return Err(QuasigroupError::Precondition(format!(
            "{} point weights do not match {s} points",
            point_weights.len()
        )));
    }
    let sqs = if s >= 4 { boolean_sqs(s.trailing_zeros())? } else { Sqs::new(s, Vec::new())? };
    let values: Vec<u32> = sqs
        .blocks()
        .iter()
        .map(|b| b.iter().fold(0u32, |acc, &p| acc ^ point_weights[p]))
        .collect();
    Ok(BlockWeighting::new(sqs, rank, values)?)
}

// ---------------------------------------------------------------------------
// The 4-ary collapse operator
// ---------------------------------------------------------------------------

/// The derived 4-ary operation `C(x,y,z,w) = q(x, q(x,z,w), q(z,y,w))`.
///
/// For every invariant Steiner `q` it returns `y` on any input whose four
/// entries do not lie on four distinct orbits; for Boolean `q` it is the
/// second projection outright.
pub fn c_operator(q: &OpTable) -> Result<OpTable, QuasigroupError> {
    if q.arity() != 3 {
        return Err(QuasigroupError::Precondition(format!(
            "expected a ternary operation, got arity {}",
            q.arity()
        )));
    }
    let n = q.domain_size();
    Ok(OpTable::from_fn(n, 4, |a| {
        let inner_left = q.eval(&[a[0], a[2], a[3]]);
        let inner_right = q.eval(&[a[2], a[1], a[3]]);
        q.eval(&[a[0], inner_left, inner_right])
    }))
}

// ---------------------------------------------------------------------------
// Minimality certification
// ---------------------------------------------------------------------------

/// Verified facts about one clone slice of a Boolean operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceReport {
    pub arity: usize,
    /// Total members; every one is a twisted odd sum `α·Σ_{i∈R} x_i`.
    pub table_count: usize,
    /// Members depending on at least two coordinates.
    pub essential_count: usize,
    /// Essential members verified to regenerate the operation.
    pub regenerated: usize,
}

/// Certificate that a G-invariant Boolean operation is the iterated sum of
/// an elementary abelian group structure and that its clone slices of
/// arity 3 and 5 consist exactly of the twisted odd sums, every essential
/// one of which regenerates the operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityCertificate {
    /// The unit used to define the addition `a + b = q(a, b, unit)`.
    pub unit: usize,
    pub domain_size: usize,
    pub group_order: usize,
    /// Addition is associative, commutative, unital, and self-inverse.
    pub group_laws_verified: bool,
    /// `q(a,b,c) = (a + b) + c` everywhere.
    pub sum_form_verified: bool,
    /// The same sum form holds for the addition at every other unit.
    pub unit_independent: bool,
    pub slices: Vec<SliceReport>,
}

impl fmt::Display for MinimalityCertificate {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            out,
            "Boolean operation on {} points over a group of order {}:",
            self.domain_size, self.group_order
        )?;
        writeln!(
            out,
            "  addition at unit {} forms an elementary abelian 2-group; q is its ternary sum",
            self.unit
        )?;
        writeln!(out, "  the sum presentation is independent of the unit")?;
        for s in &self.slices {
            writeln!(
                out,
                "  arity-{} slice: {} members, all twisted odd sums; {}/{} essential members regenerate q",
                s.arity, s.table_count, s.regenerated, s.essential_count
            )?;
        }
        Ok(())
    }
}

fn certify_err(msg: String) -> QuasigroupError {
    QuasigroupError::Precondition(msg)
}

/// Certifies minimality structure for a G-invariant Boolean operation: it
/// is the ternary sum of an elementary abelian 2-group, its clone slices
/// of arity 3 and 5 contain exactly the operations `α·(x_{i₁} + … +
/// x_{i_r})` over odd index sets, and every essential slice member
/// regenerates the operation.
pub fn certify_minimal_boolean(
    action: &FiniteAction,
    q: &OpTable,
) -> Result<MinimalityCertificate, QuasigroupError> {
    if let Err(v) = check_ginv_steiner(action, q)? {
        return Err(certify_err(format!("not an invariant Steiner operation: {} at {:?}", v.law, v.args)));
    }
    if let Err(v) = check_boolean(q)? {
        return Err(certify_err(format!("not Boolean: {} at {:?}", v.law, v.args)));
    }
    let n = q.domain_size();
    let unit = 0usize;
    let add = |a: usize, b: usize| q.eval(&[a, b, unit]);
    // Group laws. Commutativity follows from symmetry, the unit law and
    // self-inverses from minority; associativity needs the full scan.
    for a in 0..n {
        if add(a, unit) != a || add(unit, a) != a || add(a, a) != unit {
            return Err(certify_err(format!("unit or inverse law fails at {a}")));
        }
        for b in 0..n {
            if add(a, b) != add(b, a) {
                return Err(certify_err(format!("commutativity fails at ({a}, {b})")));
            }
            for c in 0..n {
                if add(add(a, b), c) != add(a, add(b, c)) {
                    return Err(certify_err(format!("associativity fails at ({a}, {b}, {c})")));
                }
            }
        }
    }
    // Sum form of q itself, at the chosen unit and at every other one.
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if q.eval(&[a, b, c]) != add(add(a, b), c) {
                    return Err(certify_err(format!("sum form fails at ({a}, {b}, {c})")));
                }
            }
        }
    }
    for e in 0..n {
        let add_e = |a: usize, b: usize| q.eval(&[a, b, e]);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if q.eval(&[a, b, c]) != add_e(add_e(a, b), c) {
                        return Err(certify_err(format!(
                            "sum form at unit {e} fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
    }
    // Slice inspection.
    let budget = GenBudget { max_tables: 10_000, max_evals: 2_000_000_000 };
    let mut slices = Vec::new();
    for r in [3usize, 5] {
        let slice = generate_slice(action, std::slice::from_ref(q), r, &budget)?;
        if !slice.is_saturated() {
            return Err(certify_err(format!("arity-{r} slice generation ran out of budget")));
        }
        let expected = (1usize << (r - 1)) * action.order();
        if slice.tables().len() != expected {
            return Err(certify_err(format!(
                "arity-{r} slice has {} members, expected {expected}",
                slice.tables().len()
            )));
        }
        let mut essential_count = 0;
        let mut regenerated = 0;
        for h in slice.tables() {
            let coords = h.essential_coords();
            if coords.len() % 2 == 0 {
                return Err(certify_err(format!(
                    "arity-{r} slice member depends on an even number of coordinates"
                )));
            }
            // Twist: the group element moving the unit to h(unit, …, unit).
            let at_unit = h.eval(&vec![unit; r]);
            let Some(alpha) = action.transporter(unit, at_unit) else {
                return Err(certify_err(format!(
                    "arity-{r} slice member does not twist the unit inside the group"
                )));
            };
            let alpha = action.element(alpha).clone();
            let mut args = vec![0usize; r];
            loop {
                let mut sum = unit;
                for &i in &coords {
                    sum = add(sum, args[i]);
                }
                if h.eval(&args) != alpha.apply(sum) {
                    return Err(certify_err(format!(
                        "arity-{r} slice member is not a twisted odd sum at {args:?}"
                    )));
                }
                if !advance(&mut args, n) {
                    break;
                }
            }
            if coords.len() >= 2 {
                essential_count += 1;
                match regenerates(action, h, q, &budget)? {
                    Verdict::Holds => regenerated += 1,
                    Verdict::Fails(()) => {
                        return Err(certify_err(format!(
                            "an essential arity-{r} slice member does not regenerate q"
                        )));
                    }
                    Verdict::Unknown(e) => {
                        return Err(certify_err(format!(
                            "regeneration check ran out of budget: {e}"
                        )));
                    }
                }
            }
        }
        slices.push(SliceReport {
            arity: r,
            table_count: slice.tables().len(),
            essential_count,
            regenerated,
        });
    }
    Ok(MinimalityCertificate {
        unit,
        domain_size: n,
        group_order: action.order(),
        group_laws_verified: true,
        sum_form_verified: true,
        unit_independent: true,
        slices,
    })
}

fn advance(args: &mut [usize], n: usize) -> bool {
    for a in args.iter_mut() {
        *a += 1;
        if *a < n {
            return true;
        }
        *a = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::check_transparent;
    use crate::op::is_g_quasi_minority;

    fn z2_action(s: usize) -> FiniteAction {
        FiniteAction::free_boolean(s, 1).unwrap()
    }

    fn klein_action(s: usize) -> FiniteAction {
        FiniteAction::free_boolean(s, 2).unwrap()
    }

    #[test]
    fn boolean_basis_round_trips() {
        let action = klein_action(2);
        let basis = boolean_basis(&action).unwrap();
        assert_eq!(basis.rank(), 2);
        for e in 0..action.order() {
            assert_eq!(basis.element_of(basis.mask_of(e)), e);
        }
        // A cyclic group of order 3 is rejected.
        let cyclic = FiniteAction::free_cyclic(2, 3).unwrap();
        assert!(boolean_basis(&cyclic).is_err());
    }

    #[test]
    fn regular_klein_action_carries_the_klein_sum() {
        let action = klein_action(1);
        let ops = enumerate_ginv_boolean(&action).unwrap();
        assert_eq!(ops.len(), 1);
        // In basis coordinates the operation is the three-fold xor.
        let basis = boolean_basis(&action).unwrap();
        let point_mask: Vec<u32> = (0..4)
            .map(|x| basis.mask_of(action.transporter(0, x).unwrap()))
            .collect();
        for x in 0..4usize {
            for y in 0..4 {
                for z in 0..4 {
                    let got = point_mask[ops[0].eval(&[x, y, z])];
                    assert_eq!(got, point_mask[x] ^ point_mask[y] ^ point_mask[z]);
                }
            }
        }
        assert!(check_ginv_steiner(&action, &ops[0]).unwrap().is_ok());
        assert!(check_boolean(&ops[0]).unwrap().is_ok());
    }

    #[test]
    fn enumeration_counts_match_the_formula_on_small_orbit_counts() {
        for (s, expect) in [(1usize, 1usize), (2, 1), (3, 0), (4, 2)] {
            let action = z2_action(s);
            let ops = enumerate_ginv_boolean(&action).unwrap();
            assert_eq!(ops.len(), expect, "s = {s}");
            assert_eq!(ginv_boolean_count_formula(s, 2), expect as u64);
            for q in &ops {
                assert!(check_ginv_steiner(&action, q).unwrap().is_ok());
                assert!(check_boolean(q).unwrap().is_ok());
            }
        }
        assert_eq!(ginv_boolean_count_formula(1, 4), 1);
        assert_eq!(ginv_boolean_count_formula(2, 4), 1);
        assert_eq!(enumerate_ginv_boolean(&klein_action(2)).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_matches_the_formula_on_eight_orbits() {
        let action = z2_action(8);
        let ops = enumerate_ginv_boolean(&action).unwrap();
        assert_eq!(ops.len(), 480);
        assert_eq!(ginv_boolean_count_formula(8, 2), 480);
        // Spot-check laws on a few members.
        for q in ops.iter().step_by(120) {
            assert!(check_ginv_steiner(&action, q).unwrap().is_ok());
            assert!(check_boolean(q).unwrap().is_ok());
        }
    }

    #[test]
    fn steiner_counts_match_the_block_weighting_formula() {
        assert_eq!(ginv_steiner_count_formula(1, 2).unwrap(), 1);
        assert_eq!(ginv_steiner_count_formula(2, 2).unwrap(), 1);
        assert_eq!(ginv_steiner_count_formula(3, 2).unwrap(), 0);
        assert_eq!(ginv_steiner_count_formula(4, 2).unwrap(), 2);
        assert_eq!(ginv_steiner_count_formula(4, 4).unwrap(), 4);
        assert_eq!(ginv_steiner_count_formula(8, 2).unwrap(), 30 * (1u64 << 14));
    }

    #[test]
    fn brute_force_agrees_with_the_structural_enumeration() {
        for s in [1usize, 2, 4] {
            let action = z2_action(s);
            let brute = brute_force_ginv_boolean(&action).unwrap();
            let structural = enumerate_ginv_boolean(&action).unwrap();
            assert_eq!(brute, structural, "s = {s}");
        }
        for s in [1usize, 2] {
            let action = klein_action(s);
            let brute = brute_force_ginv_boolean(&action).unwrap();
            let structural = enumerate_ginv_boolean(&action).unwrap();
            assert_eq!(brute, structural, "Klein s = {s}");
        }
        // Steiner-only brute force matches the Steiner counting formula.
        let steiner = brute_force_ginv_steiner(&z2_action(4)).unwrap();
        assert_eq!(steiner.len() as u64, ginv_steiner_count_formula(4, 2).unwrap());
        assert!(brute_force_ginv_boolean(&z2_action(8)).is_err());
    }

    #[test]
    fn build_and_extract_are_inverse() {
        let action = z2_action(4);
        for q in enumerate_ginv_boolean(&action).unwrap() {
            let gw = extract(&action, &q).unwrap();
            assert_eq!(gw.build_q().unwrap(), q);
        }
        // Round trip through a non-transparent weighting at 8 orbits.
        let action8 = z2_action(8);
        let sqs = boolean_sqs(3).unwrap();
        let mut weights = vec![0usize; sqs.blocks().len()];
        weights[5] = 1;
        let gw = GWeightedSq::new(action8.clone(), sqs, weights).unwrap();
        let q = gw.build_q().unwrap();
        assert!(check_ginv_steiner(&action8, &q).unwrap().is_ok());
        assert!(check_boolean(&q).unwrap().is_err());
        assert_eq!(extract(&action8, &q).unwrap(), gw);
    }

    #[test]
    fn changing_the_transversal_stays_inside_the_enumeration() {
        let action = z2_action(4);
        let all = enumerate_ginv_boolean(&action).unwrap();
        let sqs = boolean_sqs(2).unwrap();
        for w in 0..2usize {
            let gw = GWeightedSq::with_transversal(
                action.clone(),
                vec![1, 3, 5, 7],
                sqs.clone(),
                vec![w],
            )
            .unwrap();
            let q = gw.build_q().unwrap();
            assert!(all.contains(&q));
        }
    }

    #[test]
    fn law_violations_are_pinpointed() {
        let action = z2_action(2);
        let q = enumerate_ginv_boolean(&action).unwrap().pop().unwrap();
        // Twisting by a group element breaks idempotence but nothing else
        // of the plain composition shape.
        let gamma = OpTable::unary(4, action.element(1).image()).unwrap();
        let twisted = gamma.compose(&[&q]).unwrap();
        let violation = check_ginv_steiner(&action, &twisted).unwrap().unwrap_err();
        assert_eq!(violation.law, SteinerLaw::Idempotence);
        // A projection is not symmetric; symmetry is scanned before
        // minority, so it is the law reported.
        let proj = OpTable::projection(4, 3, 0);
        let violation = check_ginv_steiner(&action, &proj).unwrap().unwrap_err();
        assert_eq!(violation.law, SteinerLaw::Symmetry);
        // A symmetric idempotent majority-style operation fails minority.
        let maj = OpTable::from_fn(4, 3, |a| {
            if a[0] == a[1] || a[0] == a[2] {
                a[0]
            } else if a[1] == a[2] {
                a[1]
            } else {
                a[0].min(a[1]).min(a[2])
            }
        });
        let violation = check_ginv_steiner(&action, &maj).unwrap().unwrap_err();
        assert_eq!(violation.law, SteinerLaw::Minority);
    }

    #[test]
    fn pointwise_weightings_generate_exactly_the_transparent_ones() {
        // Two orbits: everything collapses to the empty weighting.
        let mut seen = Vec::new();
        for v in 0..4u32 {
            let w = pointwise_boolean_weighting(2, 1, &[v & 1, v >> 1]).unwrap();
            if !seen.contains(&w) {
                seen.push(w);
            }
        }
        assert_eq!(seen.len(), 1);
        // Four orbits: the two transparent weightings appear.
        let mut seen = Vec::new();
        for v in 0..16u32 {
            let weights: Vec<u32> = (0..4).map(|i| (v >> i) & 1).collect();
            let w = pointwise_boolean_weighting(4, 1, &weights).unwrap();
            if !seen.contains(&w) {
                seen.push(w);
            }
        }
        let mut expected = enumerate_transparent(&boolean_sqs(2).unwrap(), 1).unwrap();
        seen.sort_by(|a, b| a.values().cmp(b.values()));
        expected.sort_by(|a, b| a.values().cmp(b.values()));
        assert_eq!(seen, expected);
        // Eight orbits: 2^8 point vectors collapse to the 16 transparent
        // weightings (vectors inducing the same weighting differ by an
        // affine map, a kernel of size 16).
        let mut seen = Vec::new();
        for v in 0..256u32 {
            let weights: Vec<u32> = (0..8).map(|i| (v >> i) & 1).collect();
            let w = pointwise_boolean_weighting(8, 1, &weights).unwrap();
            assert!(check_transparent(&w).unwrap().is_ok());
            if !seen.contains(&w) {
                seen.push(w);
            }
        }
        let mut expected = enumerate_transparent(&boolean_sqs(3).unwrap(), 1).unwrap();
        seen.sort_by(|a, b| a.values().cmp(b.values()));
        expected.sort_by(|a, b| a.values().cmp(b.values()));
        assert_eq!(seen, expected);
    }

    #[test]
    fn collapse_operator_is_the_second_projection_for_boolean_operations() {
        let action = z2_action(4);
        for q in enumerate_ginv_boolean(&action).unwrap() {
            let c = c_operator(&q).unwrap();
            assert_eq!(c, OpTable::projection(8, 4, 1));
        }
    }

    #[test]
    fn collapse_operator_projects_on_orbit_collisions_for_steiner_operations() {
        let action = z2_action(8);
        let sqs = boolean_sqs(3).unwrap();
        let mut weights = vec![0usize; sqs.blocks().len()];
        weights[2] = 1;
        let q = GWeightedSq::new(action.clone(), sqs, weights).unwrap().build_q().unwrap();
        assert!(check_boolean(&q).unwrap().is_err());
        let c = c_operator(&q).unwrap();
        let n = action.domain_size();
        let mut off_projection = 0u64;
        let mut args = vec![0usize; 4];
        loop {
            let orbits: Vec<usize> = args.iter().map(|&x| action.orbit_of(x)).collect();
            let collision = (0..4).any(|i| (i + 1..4).any(|j| orbits[i] == orbits[j]));
            let value = c.eval(&args);
            if collision {
                assert_eq!(value, args[1], "collision inputs must project");
            } else if value != args[1] {
                off_projection += 1;
            }
            if !advance(&mut args, n) {
                break;
            }
        }
        assert!(off_projection > 0, "a non-Boolean operation must leave the projection");
    }

    #[test]
    fn minimality_certificate_for_the_two_orbit_operation() {
        let action = z2_action(2);
        let q = enumerate_ginv_boolean(&action).unwrap().pop().unwrap();
        let cert = certify_minimal_boolean(&action, &q).unwrap();
        assert_eq!(cert.unit, 0);
        assert_eq!(cert.slices.len(), 2);
        assert_eq!(cert.slices[0].arity, 3);
        assert_eq!(cert.slices[0].table_count, 8);
        assert_eq!(cert.slices[0].essential_count, 2);
        assert_eq!(cert.slices[0].regenerated, 2);
        assert_eq!(cert.slices[1].arity, 5);
        assert_eq!(cert.slices[1].table_count, 32);
        assert_eq!(cert.slices[1].essential_count, 22);
        assert_eq!(cert.slices[1].regenerated, 22);
        let text = cert.to_string();
        assert!(text.contains("arity-5 slice: 32 members"));
    }

    #[test]
    fn certification_rejects_non_boolean_operations() {
        let action = z2_action(8);
        let sqs = boolean_sqs(3).unwrap();
        let mut weights = vec![0usize; sqs.blocks().len()];
        weights[0] = 1;
        let q = GWeightedSq::new(action.clone(), sqs, weights).unwrap().build_q().unwrap();
        assert!(certify_minimal_boolean(&action, &q).is_err());
    }

    #[test]
    fn enumerated_operations_are_group_quasi_minorities() {
        let action = z2_action(4);
        for q in enumerate_ginv_boolean(&action).unwrap() {
            assert!(is_g_quasi_minority(&q, &action).unwrap());
        }
    }
}
