//! Finite windows into a two-part structure with a canonical binary
//! operation, and the orbital analysis of such operations.
//!
//! A [`Window`] consists of two disjoint parts: part 0 of size `P` with
//! `p` *active* points and part 1 of size `Q` with `q` active points.
//! Binary operations are evaluated on active points with values anywhere
//! in the ambient parts — the ambient room is what lets the defining
//! injections stay injective.
//!
//! The operation class: a member [`MOp`] applies one binary injection on
//! each diagonal quadrant (part 0 pairs land in part 0, part 1 pairs in
//! part 1) and collapses each mixed quadrant through a unary injection of
//! its part-0 argument into part 0. When the images of the part-0 binary
//! injection and the two unary injections are pairwise disjoint, the
//! member is *canonical on pairs*: the orbital of `(m(a,c), m(b,d))`
//! depends only on the orbitals of `(a,b)` and `(c,d)`, where an orbital
//! is one of the six pair patterns (equal or distinct within a part, or
//! mixed in either order). [`xi2`] computes the induced 36-entry
//! [`OrbitalTable`] or reports the canonicality violation.
//!
//! The table is commutative, idempotent and absorptive, so its right
//! towers are weak near-unanimity operations of every arity
//! ([`wnu_tower`]); collapsing the six orbitals onto pairs over `{0,1}`
//! maps the table onto componentwise minimum ([`blow_down`]).
//!
//! Finally, [`refute_binary_injective`] shows that no essential binary
//! operation on a window both is injective and is compatible with the
//! core relations: every candidate is essentially unary, collides
//! somewhere, or violates one of the invariant relations
//! ([`CoreRelation`]), and [`check_core_relations`] verifies that the
//! canonical members themselves are compatible with all of them.

use std::fmt;

use thiserror::Error;

use crate::op::{OpError, OpTable};

/// Errors of the window layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrbitalError {
    #[error("window needs p,q ≥ 2, part sizes ≥ p²+2p and q², got p={p} q={q} P={part0} Q={part1}")]
    Window { p: usize, q: usize, part0: usize, part1: usize },
    #[error("component {name} has {got} values, expected {want}")]
    Length { name: &'static str, got: usize, want: usize },
    #[error("component {name} takes value {value} outside its part of size {size}")]
    Range { name: &'static str, value: usize, size: usize },
    #[error("component {name} repeats the value {value}")]
    NotInjective { name: &'static str, value: usize },
    #[error("operation is not binary")]
    NotBinary,
    #[error("tower arity must be at least 2, got {0}")]
    TowerArity(usize),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("no refutation found: the operation is essential, injective and compatible with every core relation")]
    Unrefuted,
}

/// A point of the window: a part together with an index inside the part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct El {
    pub part: u8,
    pub index: usize,
}

impl El {
    pub fn part0(index: usize) -> El {
        El { part: 0, index }
    }

    pub fn part1(index: usize) -> El {
        El { part: 1, index }
    }
}

impl fmt::Display for El {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "P{}:{}", self.part, self.index)
    }
}

/// A finite window: two parts with active prefixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub p: usize,
    pub q: usize,
    pub part0_size: usize,
    pub part1_size: usize,
}

impl Window {
    /// Validates `p, q ≥ 2` (so every pair pattern occurs among active
    /// points), `part0 ≥ p² + 2p` (room for a binary and two unary
    /// injections with disjoint images) and `part1 ≥ q²`.
    pub fn new(p: usize, q: usize, part0: usize, part1: usize) -> Result<Self, OrbitalError> {
        if p < 2 || q < 2 || part0 < p * p + 2 * p || part1 < q * q {
            return Err(OrbitalError::Window { p, q, part0, part1 });
        }
        Ok(Window { p, q, part0_size: part0, part1_size: part1 })
    }

    /// The active points: `p` from part 0 followed by `q` from part 1.
    pub fn active(&self) -> Vec<El> {
        (0..self.p)
            .map(El::part0)
            .chain((0..self.q).map(El::part1))
            .collect()
    }

    /// Whether a point lies in the ambient window.
    pub fn contains(&self, e: El) -> bool {
        match e.part {
            0 => e.index < self.part0_size,
            1 => e.index < self.part1_size,
            _ => false,
        }
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::new(3, 3, 16, 16).expect("default window is valid")
    }
}

/// The six pair patterns, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orbital {
    /// Equal pair in part 0.
    Diag0,
    /// Equal pair in part 1.
    Diag1,
    /// Distinct pair in part 0.
    Distinct0,
    /// Distinct pair in part 1.
    Distinct1,
    /// Part 0 first, part 1 second.
    LowHigh,
    /// Part 1 first, part 0 second.
    HighLow,
}

impl Orbital {
    pub fn of(x: El, y: El) -> Orbital {
        match (x.part, y.part) {
            (0, 0) if x == y => Orbital::Diag0,
            (0, 0) => Orbital::Distinct0,
            (1, 1) if x == y => Orbital::Diag1,
            (1, 1) => Orbital::Distinct1,
            (0, _) => Orbital::LowHigh,
            _ => Orbital::HighLow,
        }
    }

    pub fn all() -> [Orbital; 6] {
        [
            Orbital::Diag0,
            Orbital::Diag1,
            Orbital::Distinct0,
            Orbital::Distinct1,
            Orbital::LowHigh,
            Orbital::HighLow,
        ]
    }

    pub fn index(self) -> usize {
        Orbital::all().iter().position(|&o| o == self).expect("listed")
    }

    /// The pair over `{0,1}` the orbital collapses to: the parts of its
    /// two points.
    pub fn blow_down(self) -> (u8, u8) {
        match self {
            Orbital::Diag0 | Orbital::Distinct0 => (0, 0),
            Orbital::Diag1 | Orbital::Distinct1 => (1, 1),
            Orbital::LowHigh => (0, 1),
            Orbital::HighLow => (1, 0),
        }
    }
}

impl fmt::Display for Orbital {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Orbital::Diag0 => "0=",
            Orbital::Diag1 => "1=",
            Orbital::Distinct0 => "0≠",
            Orbital::Distinct1 => "1≠",
            Orbital::LowHigh => "01",
            Orbital::HighLow => "10",
        };
        write!(out, "{name}")
    }
}

/// A member of the operation class on a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MOp {
    window: Window,
    /// Part-0 binary injection: `p × p` values in part 0.
    g0: Vec<usize>,
    /// Part-1 binary injection: `q × q` values in part 1.
    g1: Vec<usize>,
    /// Unary injection applied to the part-0 argument of a `(0,1)` pair.
    alpha: Vec<usize>,
    /// Unary injection applied to the part-0 argument of a `(1,0)` pair.
    beta: Vec<usize>,
}

fn check_component(
    name: &'static str,
    values: &[usize],
    want_len: usize,
    part_size: usize,
) -> Result<(), OrbitalError> {
    if values.len() != want_len {
        return Err(OrbitalError::Length { name, got: values.len(), want: want_len });
    }
    let mut seen = vec![false; part_size];
    for &v in values {
        if v >= part_size {
            return Err(OrbitalError::Range { name, value: v, size: part_size });
        }
        if seen[v] {
            return Err(OrbitalError::NotInjective { name, value: v });
        }
        seen[v] = true;
    }
    Ok(())
}

/// Builds a member from its four components, validating shapes, ranges
/// and injectivity. Disjointness of the part-0 images is *not* required
/// here — members without it exist but fail to be canonical on pairs.
pub fn build_m(
    window: Window,
    g0: Vec<usize>,
    g1: Vec<usize>,
    alpha: Vec<usize>,
    beta: Vec<usize>,
) -> Result<MOp, OrbitalError> {
    check_component("g0", &g0, window.p * window.p, window.part0_size)?;
    check_component("g1", &g1, window.q * window.q, window.part1_size)?;
    check_component("alpha", &alpha, window.p, window.part0_size)?;
    check_component("beta", &beta, window.p, window.part0_size)?;
    Ok(MOp { window, g0, g1, alpha, beta })
}

impl MOp {
    pub fn window(&self) -> Window {
        self.window
    }

    /// Whether the images of the part-0 binary injection and the two
    /// unary injections are pairwise disjoint — the canonical subclass.
    pub fn is_image_disjoint(&self) -> bool {
        let mut seen = vec![0u8; self.window.part0_size];
        for &v in &self.g0 {
            seen[v] |= 1;
        }
        for &v in &self.alpha {
            seen[v] |= 2;
        }
        for &v in &self.beta {
            seen[v] |= 4;
        }
        seen.iter().all(|&tag| tag.count_ones() <= 1)
    }

    /// Evaluates the member on two active points.
    pub fn eval(&self, x: El, y: El) -> El {
        let w = &self.window;
        debug_assert!(x.index < if x.part == 0 { w.p } else { w.q });
        debug_assert!(y.index < if y.part == 0 { w.p } else { w.q });
        match (x.part, y.part) {
            (0, 0) => El::part0(self.g0[x.index * w.p + y.index]),
            (1, 1) => El::part1(self.g1[x.index * w.q + y.index]),
            (0, 1) => El::part0(self.alpha[x.index]),
            _ => El::part0(self.beta[y.index]),
        }
    }
}

/// A deterministic family of canonical members: block layouts of the
/// part-0 images in several arrangements.
pub fn member_family(window: Window) -> Vec<MOp> {
    let Window { p, q, .. } = window;
    let g0_forward: Vec<usize> = (0..p * p).collect();
    let g0_reverse: Vec<usize> = (0..p * p).rev().collect();
    let g1_forward: Vec<usize> = (0..q * q).collect();
    let g1_reverse: Vec<usize> = (0..q * q).rev().collect();
    let alpha_low: Vec<usize> = (0..p).map(|i| p * p + i).collect();
    let beta_high: Vec<usize> = (0..p).map(|i| p * p + p + i).collect();
    let builds = [
        (g0_forward.clone(), g1_forward.clone(), alpha_low.clone(), beta_high.clone()),
        (g0_forward.clone(), g1_forward.clone(), beta_high.clone(), alpha_low.clone()),
        (g0_reverse, g1_forward, alpha_low.clone(), beta_high.clone()),
        (g0_forward, g1_reverse, alpha_low, beta_high),
    ];
    builds
        .into_iter()
        .map(|(g0, g1, alpha, beta)| {
            build_m(window, g0, g1, alpha, beta).expect("family members are valid")
        })
        .collect()
}

/// A member outside the canonical subclass: the mixed-pair unary reuses
/// part-0 product values.
pub fn overlapping_member(window: Window) -> MOp {
    let Window { p, q, .. } = window;
    let g0: Vec<usize> = (0..p * p).collect();
    let g1: Vec<usize> = (0..q * q).collect();
    // alpha(i) = g0(i, i): inside the binary image.
    let alpha: Vec<usize> = (0..p).map(|i| i * p + i).collect();
    let beta: Vec<usize> = (0..p).map(|i| p * p + p + i).collect();
    build_m(window, g0, g1, alpha, beta).expect("components are valid")
}

/// The 36-entry table induced on pair patterns by a canonical member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitalTable {
    entries: [[Orbital; 6]; 6],
}

impl OrbitalTable {
    pub fn get(&self, left: Orbital, right: Orbital) -> Orbital {
        self.entries[left.index()][right.index()]
    }

    /// The table as an operation table on the six patterns, in the order
    /// of [`Orbital::all`].
    pub fn as_op_table(&self) -> OpTable {
        let all = Orbital::all();
        OpTable::from_fn(6, 2, |args| self.get(all[args[0]], all[args[1]]).index())
    }

    pub fn is_commutative(&self) -> bool {
        let all = Orbital::all();
        all.iter()
            .all(|&a| all.iter().all(|&b| self.get(a, b) == self.get(b, a)))
    }

    pub fn is_idempotent(&self) -> bool {
        Orbital::all().iter().all(|&a| self.get(a, a) == a)
    }
}

impl fmt::Display for OrbitalTable {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let all = Orbital::all();
        write!(out, "      ")?;
        for b in all {
            write!(out, "{b:>4}")?;
        }
        writeln!(out)?;
        for a in all {
            write!(out, "  {a:>4}")?;
            for b in all {
                write!(out, "{:>4}", self.get(a, b).to_string())?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Two argument quadruples with the same pair patterns whose outputs have
/// different patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalityViolation {
    pub left_pattern: Orbital,
    pub right_pattern: Orbital,
    pub first: [El; 4],
    pub first_output: Orbital,
    pub second: [El; 4],
    pub second_output: Orbital,
}

impl fmt::Display for CanonicalityViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            out,
            "pattern ({}, {}) maps to {} on ({}, {}, {}, {}) but to {} on ({}, {}, {}, {})",
            self.left_pattern,
            self.right_pattern,
            self.first_output,
            self.first[0],
            self.first[1],
            self.first[2],
            self.first[3],
            self.second_output,
            self.second[0],
            self.second[1],
            self.second[2],
            self.second[3],
        )
    }
}

/// Computes the pair-pattern table of a binary operation on the active
/// window: for active points `a, b, c, d`, the pattern of
/// `(f(a,c), f(b,d))` must depend only on the patterns of `(a,b)` and
/// `(c,d)`. Returns the violation otherwise.
pub fn xi2(
    window: &Window,
    f: impl Fn(El, El) -> El,
) -> Result<OrbitalTable, CanonicalityViolation> {
    let active = window.active();
    let mut entries = [[None::<(Orbital, [El; 4])>; 6]; 6];
    let mut table = [[Orbital::Diag0; 6]; 6];
    for &a in &active {
        for &b in &active {
            let left = Orbital::of(a, b);
            for &c in &active {
                for &d in &active {
                    let right = Orbital::of(c, d);
                    let out = Orbital::of(f(a, c), f(b, d));
                    match entries[left.index()][right.index()] {
                        None => {
                            entries[left.index()][right.index()] = Some((out, [a, b, c, d]));
                            table[left.index()][right.index()] = out;
                        }
                        Some((prev, first)) if prev != out => {
                            return Err(CanonicalityViolation {
                                left_pattern: left,
                                right_pattern: right,
                                first,
                                first_output: prev,
                                second: [a, b, c, d],
                                second_output: out,
                            });
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }
    Ok(OrbitalTable { entries: table })
}

/// Whether the operation induces a well-defined pair-pattern table.
pub fn is_canonical_on_pairs(window: &Window, f: impl Fn(El, El) -> El) -> bool {
    xi2(window, f).is_ok()
}

/// Checks the absorption law `g(a, g(a,b)) = g(a,b)` over all 36 pattern
/// pairs.
pub fn check_absorption(table: &OrbitalTable) -> Result<(), (Orbital, Orbital)> {
    for a in Orbital::all() {
        for b in Orbital::all() {
            let ab = table.get(a, b);
            if table.get(a, ab) != ab {
                return Err((a, b));
            }
        }
    }
    Ok(())
}

/// Collapses the pattern table onto pairs over `{0,1}`: the table must
/// project onto componentwise minimum. Returns the offending pair
/// otherwise.
pub fn blow_down(table: &OrbitalTable) -> Result<(), (Orbital, Orbital)> {
    for a in Orbital::all() {
        for b in Orbital::all() {
            let (a1, a2) = a.blow_down();
            let (b1, b2) = b.blow_down();
            if table.get(a, b).blow_down() != (a1.min(b1), a2.min(b2)) {
                return Err((a, b));
            }
        }
    }
    Ok(())
}

/// The right tower `g(x₁, g(x₂, … g(x_{n−1}, x_n)))` of a binary table.
pub fn wnu_tower(g: &OpTable, n: usize) -> Result<OpTable, OrbitalError> {
    if g.arity() != 2 {
        return Err(OrbitalError::NotBinary);
    }
    if n < 2 {
        return Err(OrbitalError::TowerArity(n));
    }
    let dom = g.domain_size();
    crate::op::cells_for(dom, n)?;
    Ok(OpTable::from_fn(dom, n, |args| {
        let mut acc = args[n - 1];
        for &a in args[..n - 1].iter().rev() {
            acc = g.eval(&[a, acc]);
        }
        acc
    }))
}

/// The first failure of the weak near-unanimity laws: two positions of
/// the stray argument with different values.
pub fn wnu_violation(w: &OpTable) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = w.domain_size();
    let k = w.arity();
    for x in 0..n {
        for y in 0..n {
            let mut args = vec![x; k];
            args[0] = y;
            let first = w.eval(&args);
            for pos in 1..k {
                let mut other = vec![x; k];
                other[pos] = y;
                if w.eval(&other) != first {
                    args[0] = y;
                    return Some((args, other));
                }
            }
        }
    }
    None
}

/// The core invariant relations of the window structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreRelation {
    /// `p(x,y)`: an equal pair in part 0, or any pair in part 1.
    P,
    /// `R*(x,y,z)`: the part pattern is not (1,1,0).
    RStar,
    /// `E(x,y,z,w)`: the pairs `(x,y)` and `(z,w)` have the same pattern.
    OrbitalEquivalence,
    /// `x ≠ y`.
    NotEqual,
    /// Membership in part 0.
    Part0,
    /// Membership in part 1.
    Part1,
}

impl CoreRelation {
    /// Scan order of the refuter and the compatibility checker.
    pub fn all() -> [CoreRelation; 6] {
        [
            CoreRelation::P,
            CoreRelation::RStar,
            CoreRelation::OrbitalEquivalence,
            CoreRelation::NotEqual,
            CoreRelation::Part0,
            CoreRelation::Part1,
        ]
    }

    pub fn arity(self) -> usize {
        match self {
            CoreRelation::Part0 | CoreRelation::Part1 => 1,
            CoreRelation::P | CoreRelation::NotEqual => 2,
            CoreRelation::RStar => 3,
            CoreRelation::OrbitalEquivalence => 4,
        }
    }

    /// Membership of a tuple, judged anywhere in the ambient window.
    pub fn holds(self, tuple: &[El]) -> bool {
        match self {
            CoreRelation::P => {
                (tuple[0] == tuple[1] && tuple[0].part == 0)
                    || (tuple[0].part == 1 && tuple[1].part == 1)
            }
            CoreRelation::RStar => {
                !(tuple[0].part == 1 && tuple[1].part == 1 && tuple[2].part == 0)
            }
            CoreRelation::OrbitalEquivalence => {
                Orbital::of(tuple[0], tuple[1]) == Orbital::of(tuple[2], tuple[3])
            }
            CoreRelation::NotEqual => tuple[0] != tuple[1],
            CoreRelation::Part0 => tuple[0].part == 0,
            CoreRelation::Part1 => tuple[0].part == 1,
        }
    }
}

impl fmt::Display for CoreRelation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CoreRelation::P => "p",
            CoreRelation::RStar => "R*",
            CoreRelation::OrbitalEquivalence => "E",
            CoreRelation::NotEqual => "≠",
            CoreRelation::Part0 => "P0",
            CoreRelation::Part1 => "P1",
        };
        write!(out, "{name}")
    }
}

/// Two relation tuples whose coordinatewise image leaves the relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationViolation {
    pub relation: CoreRelation,
    pub left: Vec<El>,
    pub right: Vec<El>,
    pub output: Vec<El>,
}

impl fmt::Display for RelationViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_tuple = |t: &[El]| {
            let parts: Vec<String> = t.iter().map(|e| e.to_string()).collect();
            format!("({})", parts.join(", "))
        };
        write!(
            out,
            "{} maps {} and {} outside the relation: {}",
            self.relation,
            fmt_tuple(&self.left),
            fmt_tuple(&self.right),
            fmt_tuple(&self.output)
        )
    }
}

fn active_tuples(window: &Window, arity: usize) -> Vec<Vec<El>> {
    let active = window.active();
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * active.len());
        for tuple in &out {
            for &e in &active {
                let mut t = tuple.clone();
                t.push(e);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn relation_violation(
    window: &Window,
    f: &dyn Fn(El, El) -> El,
    relation: CoreRelation,
) -> Option<RelationViolation> {
    let members: Vec<Vec<El>> = active_tuples(window, relation.arity())
        .into_iter()
        .filter(|t| relation.holds(t))
        .collect();
    for left in &members {
        for right in &members {
            let output: Vec<El> = left
                .iter()
                .zip(right.iter())
                .map(|(&a, &b)| f(a, b))
                .collect();
            if !relation.holds(&output) {
                return Some(RelationViolation {
                    relation,
                    left: left.clone(),
                    right: right.clone(),
                    output,
                });
            }
        }
    }
    None
}

/// Verifies compatibility of a binary operation with every core relation.
pub fn check_core_relations(
    window: &Window,
    f: impl Fn(El, El) -> El,
) -> Result<(), RelationViolation> {
    for relation in CoreRelation::all() {
        if let Some(v) = relation_violation(window, &f, relation) {
            return Err(v);
        }
    }
    Ok(())
}

/// Why a binary operation cannot be an injective essential polymorphism
/// of the window structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InjectivityRefutation {
    /// The operation depends on at most the given coordinate.
    EssentiallyUnary { coord: usize },
    /// Two distinct argument pairs share a value.
    NonInjective { first: (El, El), second: (El, El), value: El },
    /// The operation is injective and essential but breaks a relation.
    InjectiveViolates(RelationViolation),
}

impl fmt::Display for InjectivityRefutation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InjectivityRefutation::EssentiallyUnary { coord } => {
                write!(out, "depends on coordinate {coord} only")
            }
            InjectivityRefutation::NonInjective { first, second, value } => write!(
                out,
                "collision: ({}, {}) and ({}, {}) both map to {}",
                first.0, first.1, second.0, second.1, value
            ),
            InjectivityRefutation::InjectiveViolates(v) => write!(out, "{v}"),
        }
    }
}

/// Refutes binary injective compatibility on the active window: the
/// operation is essentially unary, or two argument pairs collide, or some
/// core relation is violated (scanned in the order of
/// [`CoreRelation::all`]). Every reported witness can be re-checked
/// directly.
pub fn refute_binary_injective(
    window: &Window,
    f: impl Fn(El, El) -> El,
) -> Result<InjectivityRefutation, OrbitalError> {
    let active = window.active();
    // Essentially unary?
    let depends_on_second_only = active.iter().all(|&y| {
        let base = f(active[0], y);
        active.iter().all(|&x| f(x, y) == base)
    });
    if depends_on_second_only {
        return Ok(InjectivityRefutation::EssentiallyUnary { coord: 1 });
    }
    let depends_on_first_only = active.iter().all(|&x| {
        let base = f(x, active[0]);
        active.iter().all(|&y| f(x, y) == base)
    });
    if depends_on_first_only {
        return Ok(InjectivityRefutation::EssentiallyUnary { coord: 0 });
    }
    // Collision?
    let mut seen: Vec<(El, (El, El))> = Vec::new();
    for &x in &active {
        for &y in &active {
            let value = f(x, y);
            if let Some((_, first)) = seen.iter().find(|(v, _)| *v == value) {
                return Ok(InjectivityRefutation::NonInjective {
                    first: *first,
                    second: (x, y),
                    value,
                });
            }
            seen.push((value, (x, y)));
        }
    }
    // Relation violation?
    for relation in CoreRelation::all() {
        if let Some(v) = relation_violation(window, &f, relation) {
            return Ok(InjectivityRefutation::InjectiveViolates(v));
        }
    }
    Err(OrbitalError::Unrefuted)
}
