//! Steiner quadruple/triple systems over GF(2) geometry, line weightings
//! constant on planes, weight-determining line sets, and transparent block
//! weightings.
//!
//! Points of the projective geometry `PG(m, 2)` are encoded as the nonzero
//! bitmasks `1..2^{m+1}`; a line is `{a, b, a⊕b}`. Steiner quadruple
//! systems (SQS) live on points `0..s`; the Boolean one on `2^m` points has
//! blocks `{a, b, c, a⊕b⊕c}`. Weightings take values in an elementary
//! abelian 2-group given by bitmasks below `2^rank`, added by xor.
//!
//! The central pipeline: a weighting of the lines of the triple system
//! induced at a base point extends to a weighting of all blocks
//! ([`lift_to_transparent`]) exactly when it is *constant on planes* —
//! every pencil of three concurrent lines inside a plane has the same sum —
//! and the resulting block weighting is *transparent*: blocks meeting in
//! two points satisfy `g(H₁) + g(H₂) = g(H₁ Δ H₂)`. Constant-on-planes
//! weightings are freely determined by their values on a small
//! *weight-determining* set of lines whose size [`wd`] obeys
//! `WD(m) = 2^{m+1} − m − 2`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Largest point count accepted by [`enumerate_sqs`].
pub const MAX_ENUMERATE_POINTS: usize = 8;

/// Largest dimension accepted by [`boolean_sqs`] (point count `2^m`).
pub const MAX_BOOLEAN_DIM: u32 = 6;

/// Largest `m` for [`weight_determining_set`] and
/// [`extend_constant_on_planes`].
pub const MAX_WD_DIM: u32 = 4;

/// Largest group rank for weightings.
pub const MAX_RANK: u32 = 16;

/// Errors produced by the design layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DesignError {
    #[error("parameter {name} = {value} outside supported range {min}..={max}")]
    Range { name: &'static str, value: usize, min: usize, max: usize },
    #[error("invalid Steiner system: {0}")]
    Invalid(String),
    #[error("point {0} out of range")]
    PointOutOfRange(usize),
    #[error("weighting does not match the expected line system")]
    LineSystemMismatch,
    #[error("value count {got} does not match line/block count {want}")]
    ValueCount { got: usize, want: usize },
    #[error("weighting is not constant on planes")]
    NotConstantOnPlanes,
    #[error("enumeration budget exceeded: {0} candidates")]
    Budget(u64),
}

// ---------------------------------------------------------------------------
// Steiner quadruple systems
// ---------------------------------------------------------------------------

/// A Steiner quadruple system on points `0..s`: a set of 4-element blocks
/// covering every 3-subset exactly once. For `s < 4` the degenerate system
/// with no blocks is the only valid one (there are no blocks to place, and
/// for `s < 3` no triple to cover).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sqs {
    s: usize,
    blocks: Vec<[usize; 4]>,
}

impl fmt::Debug for Sqs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sqs(s={}, blocks={:?})", self.s, self.blocks)
    }
}

impl Sqs {
    /// Validates and canonicalizes a block list.
    pub fn new(s: usize, mut blocks: Vec<[usize; 4]>) -> Result<Self, DesignError> {
        for b in &mut blocks {
            b.sort_unstable();
            if b[3] >= s {
                return Err(DesignError::PointOutOfRange(b[3]));
            }
            if b[0] == b[1] || b[1] == b[2] || b[2] == b[3] {
                return Err(DesignError::Invalid(format!("repeated point in block {b:?}")));
            }
        }
        blocks.sort_unstable();
        blocks.dedup();
        if s < 4 {
            if !blocks.is_empty() {
                return Err(DesignError::Invalid(format!(
                    "{s} points admit no 4-element blocks"
                )));
            }
            return Ok(Sqs { s, blocks });
        }
        // Every 3-subset must be covered exactly once.
        let mut cover = vec![0u8; triple_count(s)];
        for b in &blocks {
            for t in block_triples(b) {
                let idx = triple_rank(s, t);
                if cover[idx] != 0 {
                    return Err(DesignError::Invalid(format!("triple {t:?} covered twice")));
                }
                cover[idx] = 1;
            }
        }
        if let Some(idx) = cover.iter().position(|&c| c == 0) {
            let t = triple_unrank(s, idx);
            return Err(DesignError::Invalid(format!("triple {t:?} not covered")));
        }
        Ok(Sqs { s, blocks })
    }

    /// Number of points.
    pub fn point_count(&self) -> usize {
        self.s
    }

    /// The sorted block list.
    pub fn blocks(&self) -> &[[usize; 4]] {
        &self.blocks
    }

    /// Whether a sorted 4-set is a block.
    pub fn is_block(&self, block: &[usize; 4]) -> bool {
        self.blocks.binary_search(block).is_ok()
    }

    /// The unique fourth point completing a block through three distinct
    /// points, if the triple is in range.
    pub fn fourth_point(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        let t = [a, b, c];
        self.blocks
            .iter()
            .find(|blk| t.iter().all(|p| blk.contains(p)))
            .and_then(|blk| blk.iter().copied().find(|p| !t.contains(p)))
    }

    /// Index of the block containing a sorted 4-set.
    pub fn block_index(&self, block: &[usize; 4]) -> Option<usize> {
        self.blocks.binary_search(block).ok()
    }
}

fn triple_count(s: usize) -> usize {
    s * (s - 1) * (s - 2) / 6
}

/// Lexicographic rank of a sorted triple among all sorted triples of `0..s`.
fn triple_rank(s: usize, t: [usize; 3]) -> usize {
    let mut rank = 0;
    for a in 0..t[0] {
        rank += (s - 1 - a) * (s - 2 - a) / 2;
    }
    for b in t[0] + 1..t[1] {
        rank += s - 1 - b;
    }
    rank + t[2] - t[1] - 1
}

fn triple_unrank(s: usize, mut idx: usize) -> [usize; 3] {
    for a in 0..s {
        for b in a + 1..s {
            let run = s - 1 - b;
            if idx < run {
                return [a, b, b + 1 + idx];
            }
            idx -= run;
        }
    }
    unreachable!("triple index out of range")
}

fn block_triples(b: &[usize; 4]) -> [[usize; 3]; 4] {
    [
        [b[0], b[1], b[2]],
        [b[0], b[1], b[3]],
        [b[0], b[2], b[3]],
        [b[1], b[2], b[3]],
    ]
}

/// The Boolean Steiner quadruple system on the `2^m` bitmask points: blocks
/// are the 4-sets `{a, b, c, a⊕b⊕c}` of distinct points.
pub fn boolean_sqs(m: u32) -> Result<Sqs, DesignError> {
    if !(2..=MAX_BOOLEAN_DIM).contains(&m) {
        return Err(DesignError::Range {
            name: "m",
            value: m as usize,
            min: 2,
            max: MAX_BOOLEAN_DIM as usize,
        });
    }
    let s = 1usize << m;
    let mut blocks = Vec::new();
    for a in 0..s {
        for b in a + 1..s {
            for c in b + 1..s {
                let d = a ^ b ^ c;
                if d > c {
                    blocks.push([a, b, c, d]);
                }
            }
        }
    }
    Sqs::new(s, blocks)
}

/// All labeled Steiner quadruple systems on `s ≤ 8` points, in
/// deterministic lexicographic order. Empty exactly when `s ≢ 2, 4
/// (mod 6)`; the `s = 2` entry is the degenerate blockless system.
pub fn enumerate_sqs(s: usize) -> Result<Vec<Sqs>, DesignError> {
    if s == 0 || s > MAX_ENUMERATE_POINTS {
        return Err(DesignError::Range { name: "s", value: s, min: 1, max: MAX_ENUMERATE_POINTS });
    }
    if s % 6 != 2 && s % 6 != 4 {
        return Ok(Vec::new());
    }
    if s < 4 {
        return Ok(vec![Sqs { s, blocks: Vec::new() }]);
    }
    let mut cover = vec![false; triple_count(s)];
    let mut blocks: Vec<[usize; 4]> = Vec::new();
    let mut out = Vec::new();
    search_sqs(s, &mut cover, &mut blocks, &mut out);
    Ok(out)
}

/// Lexicographic backtracking: complete the smallest uncovered triple with
/// every feasible fourth point. The fourth point always exceeds the
/// triple's maximum, since all triples below the current one are covered.
fn search_sqs(s: usize, cover: &mut [bool], blocks: &mut Vec<[usize; 4]>, out: &mut Vec<Sqs>) {
    let Some(first) = cover.iter().position(|&c| !c) else {
        out.push(Sqs { s, blocks: blocks.clone() });
        return;
    };
    let [a, b, c] = triple_unrank(s, first);
    for d in c + 1..s {
        let block = [a, b, c, d];
        let ranks = block_triples(&block).map(|t| triple_rank(s, t));
        if ranks.iter().any(|&r| cover[r]) {
            continue;
        }
        for &r in &ranks {
            cover[r] = true;
        }
        blocks.push(block);
        search_sqs(s, cover, blocks, out);
        blocks.pop();
        for &r in &ranks {
            cover[r] = false;
        }
    }
}

/// Whether an SQS satisfies the Boolean closure law: any two blocks meeting
/// in exactly two points have their symmetric difference as a block.
pub fn is_boolean_sqs(sqs: &Sqs) -> bool {
    let blocks = sqs.blocks();
    for (i, x) in blocks.iter().enumerate() {
        for y in &blocks[i + 1..] {
            let (common, diff) = block_overlap(x, y);
            if common.len() != 2 {
                continue;
            }
            let sym = [diff[0], diff[1], diff[2], diff[3]];
            if !sqs.is_block(&sym) {
                return false;
            }
        }
    }
    true
}

/// Intersection and sorted symmetric difference of two blocks.
fn block_overlap(x: &[usize; 4], y: &[usize; 4]) -> (Vec<usize>, Vec<usize>) {
    let common: Vec<usize> = x.iter().copied().filter(|p| y.contains(p)).collect();
    let mut diff: Vec<usize> = x
        .iter()
        .chain(y.iter())
        .copied()
        .filter(|p| !common.contains(p))
        .collect();
    diff.sort_unstable();
    (common, diff)
}

// ---------------------------------------------------------------------------
// Steiner triple systems
// ---------------------------------------------------------------------------

/// A Steiner triple system on an explicit point set: every 2-subset of the
/// points lies on exactly one line. Points keep their ambient labels (the
/// system induced at a point of an SQS lives on the remaining points).
#[derive(Clone, PartialEq, Eq)]
pub struct Sts {
    points: Vec<usize>,
    lines: Vec<[usize; 3]>,
}

impl fmt::Debug for Sts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sts(points={:?}, lines={:?})", self.points, self.lines)
    }
}

impl Sts {
    /// Validates and canonicalizes a line list over a point set.
    pub fn new(points: Vec<usize>, mut lines: Vec<[usize; 3]>) -> Result<Self, DesignError> {
        let mut points = points;
        points.sort_unstable();
        points.dedup();
        for l in &mut lines {
            l.sort_unstable();
            if l[0] == l[1] || l[1] == l[2] {
                return Err(DesignError::Invalid(format!("repeated point in line {l:?}")));
            }
            if let Some(&p) = l.iter().find(|p| points.binary_search(p).is_err()) {
                return Err(DesignError::PointOutOfRange(p));
            }
        }
        lines.sort_unstable();
        lines.dedup();
        // Every pair of points on exactly one line.
        let mut seen = BTreeSet::new();
        for l in &lines {
            for (a, b) in [(l[0], l[1]), (l[0], l[2]), (l[1], l[2])] {
                if !seen.insert((a, b)) {
                    return Err(DesignError::Invalid(format!("pair ({a}, {b}) covered twice")));
                }
            }
        }
        for (i, &a) in points.iter().enumerate() {
            for &b in &points[i + 1..] {
                if !seen.contains(&(a, b)) {
                    return Err(DesignError::Invalid(format!("pair ({a}, {b}) not covered")));
                }
            }
        }
        Ok(Sts { points, lines })
    }

    /// The sorted point labels.
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    /// The sorted line list.
    pub fn lines(&self) -> &[[usize; 3]] {
        &self.lines
    }

    /// Whether a sorted 3-set is a line.
    pub fn is_line(&self, line: &[usize; 3]) -> bool {
        self.lines.binary_search(line).is_ok()
    }

    /// Index of a sorted line.
    pub fn line_index(&self, line: &[usize; 3]) -> Option<usize> {
        self.lines.binary_search(line).ok()
    }

    /// The third point on the line through two distinct points.
    pub fn third_point(&self, a: usize, b: usize) -> Option<usize> {
        self.lines
            .iter()
            .find(|l| l.contains(&a) && l.contains(&b))
            .and_then(|l| l.iter().copied().find(|&p| p != a && p != b))
    }

    /// Closure of a point set under completing lines: repeatedly adds the
    /// third point of every line through two members. The closure of a
    /// triangle (three points not on a common line) is the plane they span
    /// when that closure has seven points.
    pub fn span(&self, seed: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = seed.iter().copied().collect();
        loop {
            let members: Vec<usize> = set.iter().copied().collect();
            let before = set.len();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    if let Some(c) = self.third_point(a, b) {
                        set.insert(c);
                    }
                }
            }
            if set.len() == before {
                return set.into_iter().collect();
            }
        }
    }

    /// All planes: closures of triangles that have exactly seven points.
    /// Each plane is returned once, as its sorted point set.
    pub fn planes(&self) -> Vec<Vec<usize>> {
        let mut planes = BTreeSet::new();
        let pts = &self.points;
        for (i, &a) in pts.iter().enumerate() {
            for (j, &b) in pts.iter().enumerate().skip(i + 1) {
                for &c in &pts[j + 1..] {
                    if self.is_line(&[a, b, c]) {
                        continue;
                    }
                    let closure = self.span(&[a, b, c]);
                    if closure.len() == 7 {
                        planes.insert(closure);
                    }
                }
            }
        }
        planes.into_iter().collect()
    }
}

/// The triple system induced at a point of an SQS: the lines are the blocks
/// through the point with the point removed, on the remaining point labels.
pub fn induced_sts(sqs: &Sqs, point: usize) -> Result<Sts, DesignError> {
    if point >= sqs.point_count() {
        return Err(DesignError::PointOutOfRange(point));
    }
    let points: Vec<usize> = (0..sqs.point_count()).filter(|&p| p != point).collect();
    let mut lines = Vec::new();
    for b in sqs.blocks() {
        if b.contains(&point) {
            let mut rest: Vec<usize> = b.iter().copied().filter(|&p| p != point).collect();
            rest.sort_unstable();
            lines.push([rest[0], rest[1], rest[2]]);
        }
    }
    Sts::new(points, lines)
}

// ---------------------------------------------------------------------------
// Projective geometry over GF(2)
// ---------------------------------------------------------------------------

/// The points of `PG(m, 2)`: the nonzero masks `1..2^{m+1}`.
pub fn pg_points(m: u32) -> Vec<usize> {
    (1..1usize << (m + 1)).collect()
}

/// The line system of `PG(m, 2)`: lines are `{a, b, a⊕b}`.
pub fn pg_lines(m: u32) -> Sts {
    let points = pg_points(m);
    let mut lines = Vec::new();
    for &a in &points {
        for &b in &points {
            if b <= a {
                continue;
            }
            let c = a ^ b;
            if c > b {
                lines.push([a, b, c]);
            }
        }
    }
    Sts::new(points, lines).expect("projective lines cover every pair once")
}

// ---------------------------------------------------------------------------
// Line weightings and the constant-on-planes condition
// ---------------------------------------------------------------------------

/// A weighting of the lines of a triple system with values in the Boolean
/// group of bitmasks below `2^rank` (added by xor).
#[derive(Clone, PartialEq, Eq)]
pub struct LineWeighting {
    sts: Sts,
    rank: u32,
    values: Vec<u32>,
}

impl fmt::Debug for LineWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LineWeighting(rank={}, values={:?})", self.rank, self.values)
    }
}

/// A pencil of three concurrent lines inside one plane whose sums disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilViolation {
    /// The plane's sorted point set.
    pub plane: Vec<usize>,
    /// Two common points whose pencils sum differently.
    pub points: (usize, usize),
    /// The disagreeing sums.
    pub sums: (u32, u32),
}

impl LineWeighting {
    /// Wraps values parallel to `sts.lines()`.
    pub fn new(sts: Sts, rank: u32, values: Vec<u32>) -> Result<Self, DesignError> {
        if rank > MAX_RANK {
            return Err(DesignError::Range {
                name: "rank",
                value: rank as usize,
                min: 0,
                max: MAX_RANK as usize,
            });
        }
        if values.len() != sts.lines().len() {
            return Err(DesignError::ValueCount { got: values.len(), want: sts.lines().len() });
        }
        if let Some(&v) = values.iter().find(|&&v| rank < 32 && v >= 1 << rank) {
            return Err(DesignError::Invalid(format!("value {v} exceeds group rank {rank}")));
        }
        Ok(LineWeighting { sts, rank, values })
    }

    pub fn sts(&self) -> &Sts {
        &self.sts
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Value on a line given by any permutation of its points.
    pub fn value_on(&self, a: usize, b: usize, c: usize) -> Option<u32> {
        let mut l = [a, b, c];
        l.sort_unstable();
        self.sts.line_index(&l).map(|i| self.values[i])
    }

    /// Sum of the values on the three lines of one plane through one point.
    fn pencil_sum(&self, plane: &[usize], at: usize) -> u32 {
        let mut sum = 0;
        let mut seen = BTreeSet::new();
        for &p in plane {
            if p == at || seen.contains(&p) {
                continue;
            }
            let q = self.sts.third_point(at, p).expect("plane points are collinear with `at`");
            seen.insert(q);
            sum ^= self.value_on(at, p, q).expect("plane lines are lines");
        }
        sum
    }
}

/// Checks the constant-on-planes condition: inside every plane, all pencils
/// (triples of lines through a common point) have equal sums.
pub fn check_constant_on_planes(
    w: &LineWeighting,
) -> Result<Result<(), PencilViolation>, DesignError> {
    for plane in w.sts().planes() {
        let first = plane[0];
        let theta = w.pencil_sum(&plane, first);
        for &p in &plane[1..] {
            let sum = w.pencil_sum(&plane, p);
            if sum != theta {
                return Ok(Err(PencilViolation {
                    plane: plane.clone(),
                    points: (first, p),
                    sums: (theta, sum),
                }));
            }
        }
    }
    Ok(Ok(()))
}

/// All constant-on-planes weightings of a triple system, by filtered brute
/// force over every assignment. Budget-capped: `rank·#lines ≤ 24` bits.
pub fn enumerate_constant_on_planes(
    sts: &Sts,
    rank: u32,
) -> Result<Vec<LineWeighting>, DesignError> {
    let bits = rank as u64 * sts.lines().len() as u64;
    if bits > 24 {
        return Err(DesignError::Budget(1u64.checked_shl(bits as u32).unwrap_or(u64::MAX)));
    }
    let per = 1u64 << rank;
    let total = per.pow(sts.lines().len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut values = Vec::with_capacity(sts.lines().len());
        for _ in 0..sts.lines().len() {
            values.push((c % per) as u32);
            c /= per;
        }
        let w = LineWeighting::new(sts.clone(), rank, values)?;
        if check_constant_on_planes(&w)?.is_ok() {
            out.push(w);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Weight-determining sets
// ---------------------------------------------------------------------------

/// Size of the constructed weight-determining line set of `PG(m, 2)`:
/// `2^{m+1} − m − 2`.
pub fn wd(m: u32) -> u64 {
    (1u64 << (m + 1)) - m as u64 - 2
}

/// A weight-determining set of lines of `PG(m, 2)`, in construction order:
/// recursively the set for the top-bit-zero hyperplane, then every line
/// through the extra point `2^m`, ordered by their hyperplane point.
///
/// For `m = 1` this is the single line; for `m = 2` it is one line inside
/// the hyperplane plus the three lines through the point `4`.
pub fn weight_determining_set(m: u32) -> Result<Vec<[usize; 3]>, DesignError> {
    if !(1..=MAX_WD_DIM).contains(&m) {
        return Err(DesignError::Range {
            name: "m",
            value: m as usize,
            min: 1,
            max: MAX_WD_DIM as usize,
        });
    }
    if m == 1 {
        return Ok(vec![[1, 2, 3]]);
    }
    let mut set = weight_determining_set(m - 1)?;
    let a = 1usize << m;
    for w in 1..a {
        let mut line = [a, w, a ^ w];
        line.sort_unstable();
        set.push(line);
    }
    Ok(set)
}

/// Extends an assignment on the weight-determining set of `PG(m, 2)`
/// (values parallel to [`weight_determining_set`]) to the unique
/// constant-on-planes weighting of all lines.
///
/// The fill works down the recursive structure: the hyperplane is extended
/// first; a line `L = {u, v, w}` meeting the hyperplane only in `w` lies in
/// the plane spanned by `L` and the extra point `a`, where the pencil at
/// `a` determines the plane's sum `θ` and the pencil at `w` then determines
/// the value on `L`.
pub fn extend_constant_on_planes(
    m: u32,
    rank: u32,
    wd_values: &[u32],
) -> Result<LineWeighting, DesignError> {
    let set = weight_determining_set(m)?;
    if wd_values.len() != set.len() {
        return Err(DesignError::ValueCount { got: wd_values.len(), want: set.len() });
    }
    if let Some(&v) = wd_values.iter().find(|&&v| rank < 32 && v >= 1 << rank) {
        return Err(DesignError::Invalid(format!("value {v} exceeds group rank {rank}")));
    }
    if m == 1 {
        return LineWeighting::new(pg_lines(1), rank, vec![wd_values[0]]);
    }
    let inner_len = weight_determining_set(m - 1)?.len();
    let inner = extend_constant_on_planes(m - 1, rank, &wd_values[..inner_len])?;
    let sts = pg_lines(m);
    let a = 1usize << m;
    let mut values = vec![0u32; sts.lines().len()];
    let mut known = vec![false; sts.lines().len()];
    let value_of = |line: [usize; 3], values: &[u32], known: &[bool]| -> Option<u32> {
        let mut l = line;
        l.sort_unstable();
        let idx = sts.line_index(&l)?;
        known[idx].then(|| values[idx])
    };
    let set_value = |line: [usize; 3], v: u32, values: &mut [u32], known: &mut [bool]| {
        let mut l = line;
        l.sort_unstable();
        let idx = sts.line_index(&l).expect("constructed line exists");
        values[idx] = v;
        known[idx] = true;
    };
    // Hyperplane lines come from the recursive extension.
    for (i, l) in inner.sts().lines().iter().enumerate() {
        set_value(*l, inner.values()[i], &mut values, &mut known);
    }
    // Lines through `a` carry the remaining prescribed values.
    for (line, &v) in set[inner_len..].iter().zip(&wd_values[inner_len..]) {
        set_value(*line, v, &mut values, &mut known);
    }
    // Remaining lines avoid `a` and leave the hyperplane: exactly one point
    // `w` has top bit zero.
    for idx in 0..sts.lines().len() {
        if known[idx] {
            continue;
        }
        let l = sts.lines()[idx];
        let w = *l.iter().find(|&&p| p & a == 0).expect("line meets the hyperplane");
        let mut outside = l.iter().copied().filter(|&p| p & a != 0 && p != a);
        let (u, v) = (outside.next().unwrap(), outside.next().unwrap());
        let at_a = |p: usize| value_of([a, p, a ^ p], &values, &known);
        let theta = at_a(w)
            .zip(at_a(u))
            .zip(at_a(v))
            .map(|((x, y), z)| x ^ y ^ z)
            .expect("lines through the extra point are prescribed");
        let h_line =
            value_of([w, a ^ u, a ^ v], &values, &known).expect("hyperplane line is filled");
        let aw_line = at_a(w).expect("line through the extra point is prescribed");
        values[idx] = theta ^ aw_line ^ h_line;
        known[idx] = true;
    }
    LineWeighting::new(sts, rank, values)
}

// ---------------------------------------------------------------------------
// Transparent block weightings
// ---------------------------------------------------------------------------

/// A weighting of the blocks of an SQS with values in the Boolean group of
/// bitmasks below `2^rank`.
#[derive(Clone, PartialEq, Eq)]
pub struct BlockWeighting {
    sqs: Sqs,
    rank: u32,
    values: Vec<u32>,
}

impl fmt::Debug for BlockWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockWeighting(rank={}, values={:?})", self.rank, self.values)
    }
}

/// Two blocks meeting in two points whose symmetric difference carries the
/// wrong weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransparencyViolation {
    pub blocks: ([usize; 4], [usize; 4]),
    pub symmetric_difference: [usize; 4],
    /// Left-hand sum `g(H₁) + g(H₂)` and the stored `g(H₁ Δ H₂)`.
    pub sums: (u32, u32),
}

impl BlockWeighting {
    /// Wraps values parallel to `sqs.blocks()`.
    pub fn new(sqs: Sqs, rank: u32, values: Vec<u32>) -> Result<Self, DesignError> {
        if rank > MAX_RANK {
            return Err(DesignError::Range {
                name: "rank",
                value: rank as usize,
                min: 0,
                max: MAX_RANK as usize,
            });
        }
        if values.len() != sqs.blocks().len() {
            return Err(DesignError::ValueCount { got: values.len(), want: sqs.blocks().len() });
        }
        if let Some(&v) = values.iter().find(|&&v| rank < 32 && v >= 1 << rank) {
            return Err(DesignError::Invalid(format!("value {v} exceeds group rank {rank}")));
        }
        Ok(BlockWeighting { sqs, rank, values })
    }

    pub fn sqs(&self) -> &Sqs {
        &self.sqs
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Value on a block given by any permutation of its points.
    pub fn value_on(&self, block: [usize; 4]) -> Option<u32> {
        let mut b = block;
        b.sort_unstable();
        self.sqs.block_index(&b).map(|i| self.values[i])
    }
}

/// Checks transparency: whenever two blocks meet in exactly two points,
/// their weights sum to the weight of their symmetric difference.
pub fn check_transparent(
    g: &BlockWeighting,
) -> Result<Result<(), TransparencyViolation>, DesignError> {
    let blocks = g.sqs().blocks();
    for (i, x) in blocks.iter().enumerate() {
        for y in &blocks[i + 1..] {
            let (common, diff) = block_overlap(x, y);
            if common.len() != 2 {
                continue;
            }
            let sym = [diff[0], diff[1], diff[2], diff[3]];
            let Some(rhs) = g.value_on(sym) else {
                return Err(DesignError::Invalid(format!(
                    "symmetric difference {sym:?} is not a block; the system is not Boolean"
                )));
            };
            let lhs = g.values()[i] ^ g.value_on(*y).expect("y is a block");
            if lhs != rhs {
                return Ok(Err(TransparencyViolation {
                    blocks: (*x, *y),
                    symmetric_difference: sym,
                    sums: (lhs, rhs),
                }));
            }
        }
    }
    Ok(Ok(()))
}

/// Lifts a constant-on-planes line weighting of the system induced at
/// `base_point` to a transparent block weighting of the whole SQS.
///
/// Blocks through the base point take the weight of their induced line;
/// a block `{b, c, d, e}` away from the base takes
/// `h({b, c, f}) + h({d, e, f})`, where `f` completes `{base, b, c}` to a
/// block (the Boolean law makes `{d, e, f}` a line as well).
pub fn lift_to_transparent(
    sqs: &Sqs,
    base_point: usize,
    h: &LineWeighting,
) -> Result<BlockWeighting, DesignError> {
    if !is_boolean_sqs(sqs) {
        return Err(DesignError::Invalid("lift requires a Boolean system".into()));
    }
    let induced = induced_sts(sqs, base_point)?;
    if h.sts() != &induced {
        return Err(DesignError::LineSystemMismatch);
    }
    if check_constant_on_planes(h)?.is_err() {
        return Err(DesignError::NotConstantOnPlanes);
    }
    let mut values = Vec::with_capacity(sqs.blocks().len());
    for block in sqs.blocks() {
        if block.contains(&base_point) {
            let rest: Vec<usize> =
                block.iter().copied().filter(|&p| p != base_point).collect();
            values.push(h.value_on(rest[0], rest[1], rest[2]).expect("induced line"));
        } else {
            let [b, c, d, e] = *block;
            let f = sqs
                .fourth_point(base_point, b, c)
                .expect("triples through the base complete to blocks");
            let first = h.value_on(b, c, f).expect("line through f");
            let second = h.value_on(d, e, f).expect("line through f");
            values.push(first ^ second);
        }
    }
    BlockWeighting::new(sqs.clone(), rank_of(h), values)
}

fn rank_of(h: &LineWeighting) -> u32 {
    h.rank()
}

/// Restricts a block weighting to the lines induced at a base point:
/// `h(line) = g(line ∪ {base})`.
pub fn restrict_to_lines(
    g: &BlockWeighting,
    base_point: usize,
) -> Result<LineWeighting, DesignError> {
    let induced = induced_sts(g.sqs(), base_point)?;
    let mut values = Vec::with_capacity(induced.lines().len());
    for l in induced.lines() {
        let v = g
            .value_on([base_point, l[0], l[1], l[2]])
            .expect("induced lines complete to blocks");
        values.push(v);
    }
    LineWeighting::new(induced, g.rank(), values)
}

/// All transparent block weightings of a Boolean SQS, as lifts of the
/// constant-on-planes line weightings at the system's first point.
pub fn enumerate_transparent(sqs: &Sqs, rank: u32) -> Result<Vec<BlockWeighting>, DesignError> {
    if sqs.blocks().is_empty() {
        // Degenerate systems carry exactly one (empty) weighting.
        return Ok(vec![BlockWeighting::new(sqs.clone(), rank, Vec::new())?]);
    }
    if !is_boolean_sqs(sqs) {
        return Err(DesignError::Invalid("enumeration requires a Boolean system".into()));
    }
    let base = 0;
    let induced = induced_sts(sqs, base)?;
    let mut out = Vec::new();
    for h in enumerate_constant_on_planes(&induced, rank)? {
        out.push(lift_to_transparent(sqs, base, &h)?);
    }
    Ok(out)
}
