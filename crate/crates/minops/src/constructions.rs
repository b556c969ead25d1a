//! Explicit constructions of almost minimal operations over free actions,
//! and exhaustive verifiers for the identities and clone-slice structure
//! each construction promises.
//!
//! The constructions:
//!
//! * [`exmin_minority`] — an idempotent group-quasi-minority that reads the
//!   group element relating the first colliding orbit pair and applies it
//!   to the remaining argument.
//! * [`rank_orbit_semiprojection`] — a `k`-ary orbit-semiprojection that
//!   projects to the first argument on orbit collisions and otherwise
//!   picks the argument on the highest orbit.
//! * [`odd_majority`] / [`odd_malcev`] — the forced quasi-majority over a
//!   free action of a 2-element group, and its Mal'cev twist
//!   `M(x,y,z) = m(x, γy, z)`.
//! * [`mstar`] — the derived minority
//!   `m*(x,y,z) = m(x, γ·m(x,y,z), m(γx,y,z))`, which an odd majority
//!   generates but which does not generate the odd majority back.
//! * [`palfy_op`] — the two-parameter family `f^{(α,β)}` over a base point
//!   `b`: the value is `βb` when the first argument shares its orbit with
//!   `b` and all arguments lie on distinct orbits, and `α·a₁` otherwise.
//!   [`check_palfy_identities`] verifies the composition identities of the
//!   family exhaustively; [`verify_palfy_closure`] certifies that the
//!   family is closed under clone generation and regenerates itself.
//! * [`scan_quasi_majority_weak_osp`] — a complete constraint search over
//!   quasi-majorities that are weak orbit-semiprojections, reporting the
//!   forced candidates or the contradictions that empty the space.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::action::FiniteAction;
use crate::clones::{generate_slice, regenerates, CloneError, GenBudget, Verdict};
use crate::op::{cells_for, OpError, OpTable};

/// Errors of the construction layer.
#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Clone(#[from] CloneError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("identity fails: {identity} at args {args:?} (got {got}, want {want})")]
    IdentityViolation { identity: String, args: Vec<usize>, got: usize, want: usize },
    #[error("clone slice member matches no expected form")]
    UnexpectedSliceMember,
    #[error("search budget exceeded: {0}")]
    Budget(String),
}

fn precondition(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::Precondition(msg.into())
}

fn require_free(action: &FiniteAction, what: &str) -> Result<(), ConstructionError> {
    if let Some((elem, point)) = action.free_violation() {
        return Err(precondition(format!(
            "{what} needs a free action, but element {elem} fixes point {point}"
        )));
    }
    Ok(())
}

fn identity_index(action: &FiniteAction) -> usize {
    action
        .element_index(&crate::action::Permutation::identity(action.domain_size()))
        .expect("every group contains the identity")
}

fn mul(action: &FiniteAction, a: usize, b: usize) -> usize {
    action
        .element_index(&action.element(a).compose(action.element(b)))
        .expect("groups are closed under composition")
}

// ---------------------------------------------------------------------------
// Collision minority
// ---------------------------------------------------------------------------

/// The idempotent group-quasi-minority over a free action of an elementary
/// abelian 2-group: on a triple with two entries in a common orbit, take
/// the lexicographically first such pair `(i, j)`, read the unique group
/// element `α` with `a_j = α·a_i`, and return `α` applied to the remaining
/// argument; on orbit-injective triples, return the first argument.
pub fn exmin_minority(action: &FiniteAction) -> Result<OpTable, ConstructionError> {
    require_free(action, "the collision minority")?;
    if !action.is_boolean() {
        return Err(precondition(
            "the collision minority needs an elementary abelian 2-group",
        ));
    }
    let n = action.domain_size();
    cells_for(n, 3)?;
    Ok(OpTable::from_fn(n, 3, |args| {
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            if action.same_orbit(args[i], args[j]) {
                let alpha = action
                    .transporter(args[i], args[j])
                    .expect("points share an orbit");
                return action.element(alpha).apply(args[k]);
            }
        }
        args[0]
    }))
}

// ---------------------------------------------------------------------------
// Orbit-rank semiprojections
// ---------------------------------------------------------------------------

/// The `k`-ary orbit-semiprojection over an action with at least `k`
/// orbits: the first argument on any orbit collision, and otherwise the
/// argument lying on the orbit with the largest index.
pub fn rank_orbit_semiprojection(
    action: &FiniteAction,
    k: usize,
) -> Result<OpTable, ConstructionError> {
    let s = action.orbit_count();
    if k < 2 || k > s {
        return Err(precondition(format!(
            "arity must satisfy 2 ≤ k ≤ {s} (the orbit count), got {k}"
        )));
    }
    let n = action.domain_size();
    cells_for(n, k)?;
    Ok(OpTable::from_fn(n, k, |args| {
        let orbits: Vec<usize> = args.iter().map(|&a| action.orbit_of(a)).collect();
        for p in 0..k {
            for q in p + 1..k {
                if orbits[p] == orbits[q] {
                    return args[0];
                }
            }
        }
        let top = (0..k).max_by_key(|&t| orbits[t]).expect("k ≥ 2");
        args[top]
    }))
}

// ---------------------------------------------------------------------------
// Odd majority and odd Mal'cev
// ---------------------------------------------------------------------------

fn require_two_element_group(
    action: &FiniteAction,
    what: &str,
) -> Result<usize, ConstructionError> {
    require_free(action, what)?;
    if action.order() != 2 {
        return Err(precondition(format!("{what} needs a group of order 2")));
    }
    Ok(1 - identity_index(action))
}

/// The forced quasi-majority over a free action of a 2-element group:
/// the repeated element when two arguments are equal; the remaining
/// argument when two distinct arguments share an orbit; the first argument
/// on orbit-injective triples.
///
/// Among pairwise distinct arguments at most one pair can share an orbit
/// (orbits have two points), so the table is well defined.
pub fn odd_majority(action: &FiniteAction) -> Result<OpTable, ConstructionError> {
    require_two_element_group(action, "the odd majority")?;
    let n = action.domain_size();
    cells_for(n, 3)?;
    Ok(OpTable::from_fn(n, 3, |args| {
        let (a, b, c) = (args[0], args[1], args[2]);
        if a == b || a == c {
            return a;
        }
        if b == c {
            return b;
        }
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            if action.same_orbit(args[i], args[j]) {
                return args[k];
            }
        }
        a
    }))
}

/// Twists a ternary operation into `f(x, γy, z)`, where `γ` is the
/// non-identity element of a 2-element group. Applied to an odd majority
/// it yields an odd Mal'cev operation, and applying it twice returns the
/// original operation.
pub fn odd_malcev_from(
    action: &FiniteAction,
    m: &OpTable,
) -> Result<OpTable, ConstructionError> {
    let gamma = require_two_element_group(action, "the odd Mal'cev twist")?;
    if m.arity() != 3 || m.domain_size() != action.domain_size() {
        return Err(precondition("the twist needs a ternary operation on the action domain"));
    }
    let n = action.domain_size();
    Ok(OpTable::from_fn(n, 3, |args| {
        m.eval(&[args[0], action.element(gamma).apply(args[1]), args[2]])
    }))
}

/// The odd Mal'cev operation: the twist of [`odd_majority`].
pub fn odd_malcev(action: &FiniteAction) -> Result<OpTable, ConstructionError> {
    let m = odd_majority(action)?;
    odd_malcev_from(action, &m)
}

/// The derived minority `m*(x,y,z) = m(x, γ·m(x,y,z), m(γx,y,z))` of an
/// odd majority. It is a group-quasi-minority with `m*(x,x,y) = y`, lies
/// in the ternary clone slice generated by `m`, and does not generate `m`
/// back.
pub fn mstar(action: &FiniteAction, m: &OpTable) -> Result<OpTable, ConstructionError> {
    let gamma = require_two_element_group(action, "the derived minority")?;
    if m.arity() != 3 || m.domain_size() != action.domain_size() {
        return Err(precondition(
            "the derived minority needs a ternary operation on the action domain",
        ));
    }
    let n = action.domain_size();
    let g = |x: usize| action.element(gamma).apply(x);
    Ok(OpTable::from_fn(n, 3, |args| {
        let (x, y, z) = (args[0], args[1], args[2]);
        let inner = m.eval(&[x, y, z]);
        let shifted = m.eval(&[g(x), y, z]);
        m.eval(&[x, g(inner), shifted])
    }))
}

// ---------------------------------------------------------------------------
// The two-parameter base-point family
// ---------------------------------------------------------------------------

/// Parameters of the base-point family: an arity `2 ≤ k ≤ orbit count`, a
/// base point on an orbit of size at least two, and two group elements.
#[derive(Debug, Clone)]
pub struct PalfyParams<'a> {
    action: &'a FiniteAction,
    k: usize,
    b: usize,
    alpha: usize,
    beta: usize,
}

impl<'a> PalfyParams<'a> {
    pub fn new(
        action: &'a FiniteAction,
        k: usize,
        b: usize,
        alpha: usize,
        beta: usize,
    ) -> Result<Self, ConstructionError> {
        let s = action.orbit_count();
        if k < 2 || k > s {
            return Err(precondition(format!(
                "arity must satisfy 2 ≤ k ≤ {s} (the orbit count), got {k}"
            )));
        }
        if b >= action.domain_size() {
            return Err(precondition(format!("base point {b} is outside the domain")));
        }
        if action.orbits()[action.orbit_of(b)].len() < 2 {
            return Err(precondition(format!(
                "base point {b} lies on a trivial orbit; the family needs an orbit of size at least 2"
            )));
        }
        if alpha >= action.order() || beta >= action.order() {
            return Err(precondition("twist parameters must be group element indices"));
        }
        cells_for(action.domain_size(), k)?;
        Ok(PalfyParams { action, k, b, alpha, beta })
    }
}

/// The least point of the least nontrivial orbit — the canonical base
/// point for the family — or `None` when every orbit is a fixed point.
pub fn default_palfy_base(action: &FiniteAction) -> Option<usize> {
    action.orbits().iter().find(|o| o.len() >= 2).map(|o| o[0])
}

/// The base-point operation `f^{(α,β)}`: the value is `β·b` when the first
/// argument lies on the orbit of `b` and all arguments lie on pairwise
/// distinct orbits, and `α·a₁` otherwise.
pub fn palfy_op(params: &PalfyParams<'_>) -> OpTable {
    let PalfyParams { action, k, b, alpha, beta } = *params;
    let n = action.domain_size();
    let b_orbit = action.orbit_of(b);
    let beta_b = action.element(beta).apply(b);
    OpTable::from_fn(n, k, |args| {
        let orbits: Vec<usize> = args.iter().map(|&a| action.orbit_of(a)).collect();
        let injective =
            (0..k).all(|p| (p + 1..k).all(|q| orbits[p] != orbits[q]));
        if injective && orbits[0] == b_orbit {
            beta_b
        } else {
            action.element(alpha).apply(args[0])
        }
    })
}

/// All permutations of `0..k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for idx in 0..rest.len() {
            let v = rest.remove(idx);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(idx, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out
}

/// A term of the identity form space: a twisted variable or a family
/// member applied to permuted variables.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Term {
    Unary { coeff: usize, var: usize },
    Family { alpha: usize, beta: usize, vars: Vec<usize> },
}

impl Term {
    fn leading(&self) -> usize {
        match self {
            Term::Unary { var, .. } => *var,
            Term::Family { vars, .. } => vars[0],
        }
    }

    fn eval(&self, action: &FiniteAction, tables: &[OpTable], order: usize, args: &[usize]) -> usize {
        match self {
            Term::Unary { coeff, var } => action.element(*coeff).apply(args[*var]),
            Term::Family { alpha, beta, vars } => {
                let permuted: Vec<usize> = vars.iter().map(|&v| args[v]).collect();
                tables[alpha * order + beta].eval(&permuted)
            }
        }
    }
}

/// Identity classes of the family's composition behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PalfyIdentityKind {
    /// The trailing terms have pairwise distinct leading variables, none of
    /// them the first: the outer twist absorbs the first term's
    /// coefficient and the composition is again a family member.
    DistinctLeading,
    /// Some trailing term leads with the first variable or repeats a
    /// leading variable, and the first term is a twisted variable: the
    /// composition collapses to a twisted first variable.
    CollapsedUnary,
    /// Same collapse, but the first term is a family member: the
    /// composition is the outer twist of that member.
    CollapsedFamily,
}

/// Exhaustive verification report for the family's composition identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PalfyIdentityReport {
    pub arity: usize,
    pub base_point: usize,
    /// Term profiles checked (one per choice of `t₁, …, t_k`).
    pub profiles: usize,
    pub distinct_leading: usize,
    pub collapsed_unary: usize,
    pub collapsed_family: usize,
    /// Outer evaluations of the left-hand side performed.
    pub evaluations: u64,
}

impl fmt::Display for PalfyIdentityReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            out,
            "base-point family identities at arity {} (base {}): {} profiles verified",
            self.arity, self.base_point, self.profiles
        )?;
        writeln!(
            out,
            "  {} re-twisted family compositions, {} unary collapses, {} family collapses",
            self.distinct_leading, self.collapsed_unary, self.collapsed_family
        )?;
        write!(out, "  {} left-hand evaluations", self.evaluations)
    }
}

/// Exhaustively verifies the composition identities of the base-point
/// family at arity `k`: for every outer member `f^{(α,β)}`, every
/// admissible first term (a twisted first variable or a family member on
/// the identity variable order) and every profile of trailing terms
/// (twisted variables or family members on permuted variables), the
/// composition collapses as classified by [`PalfyIdentityKind`].
pub fn check_palfy_identities(
    action: &FiniteAction,
    k: usize,
    b: usize,
) -> Result<PalfyIdentityReport, ConstructionError> {
    if k > 4 {
        return Err(precondition("identity checking supports arity at most 4"));
    }
    PalfyParams::new(action, k, b, 0, 0)?;
    let order = action.order();
    let n = action.domain_size();
    // Materialize the whole family once.
    let mut tables = Vec::with_capacity(order * order);
    for alpha in 0..order {
        for beta in 0..order {
            tables.push(palfy_op(&PalfyParams::new(action, k, b, alpha, beta)?));
        }
    }
    // Term spaces.
    let mut first_terms = Vec::new();
    for coeff in 0..order {
        first_terms.push(Term::Unary { coeff, var: 0 });
    }
    for alpha in 0..order {
        for beta in 0..order {
            first_terms.push(Term::Family { alpha, beta, vars: (0..k).collect() });
        }
    }
    let mut trailing_terms = Vec::new();
    for coeff in 0..order {
        for var in 0..k {
            trailing_terms.push(Term::Unary { coeff, var });
        }
    }
    for alpha in 0..order {
        for beta in 0..order {
            for sigma in permutations(k) {
                trailing_terms.push(Term::Family { alpha, beta, vars: sigma });
            }
        }
    }
    let mut report = PalfyIdentityReport {
        arity: k,
        base_point: b,
        profiles: 0,
        distinct_leading: 0,
        collapsed_unary: 0,
        collapsed_family: 0,
        evaluations: 0,
    };
    // Iterate all profiles (t₁, t₂, …, t_k) via a mixed-radix counter over
    // the trailing slots.
    let slots = k - 1;
    for t1 in &first_terms {
        let mut pick = vec![0usize; slots];
        loop {
            let profile: Vec<&Term> =
                std::iter::once(t1).chain(pick.iter().map(|&p| &trailing_terms[p])).collect();
            // Classify by the trailing leading variables.
            let leads: Vec<usize> = profile[1..].iter().map(|t| t.leading()).collect();
            let distinct = leads.iter().all(|&l| l != 0)
                && (0..leads.len()).all(|p| (p + 1..leads.len()).all(|q| leads[p] != leads[q]));
            let kind = if distinct {
                PalfyIdentityKind::DistinctLeading
            } else {
                match t1 {
                    Term::Unary { .. } => PalfyIdentityKind::CollapsedUnary,
                    Term::Family { .. } => PalfyIdentityKind::CollapsedFamily,
                }
            };
            let first_coeff = match *t1 {
                Term::Unary { coeff, .. } => coeff,
                Term::Family { alpha, .. } => alpha,
            };
            // Verify the identity for every outer member and every input.
            for alpha in 0..order {
                for beta in 0..order {
                    let outer = &tables[alpha * order + beta];
                    let mut args = vec![0usize; k];
                    loop {
                        let inner: Vec<usize> = profile
                            .iter()
                            .map(|t| t.eval(action, &tables, order, &args))
                            .collect();
                        let got = outer.eval(&inner);
                        report.evaluations += 1;
                        let want = match kind {
                            PalfyIdentityKind::DistinctLeading => {
                                tables[mul(action, alpha, first_coeff) * order + beta].eval(&args)
                            }
                            PalfyIdentityKind::CollapsedUnary => action
                                .element(mul(action, alpha, first_coeff))
                                .apply(args[0]),
                            PalfyIdentityKind::CollapsedFamily => {
                                let Term::Family { alpha: ga, beta: gb, .. } = t1 else {
                                    unreachable!("collapsed-family profiles start with a family term")
                                };
                                action
                                    .element(alpha)
                                    .apply(tables[ga * order + gb].eval(&args))
                            }
                        };
                        if got != want {
                            return Err(ConstructionError::IdentityViolation {
                                identity: format!("{kind:?} composition"),
                                args: args.clone(),
                                got,
                                want,
                            });
                        }
                        if !advance(&mut args, n) {
                            break;
                        }
                    }
                }
            }
            report.profiles += 1;
            match kind {
                PalfyIdentityKind::DistinctLeading => report.distinct_leading += 1,
                PalfyIdentityKind::CollapsedUnary => report.collapsed_unary += 1,
                PalfyIdentityKind::CollapsedFamily => report.collapsed_family += 1,
            }
            if !advance_radix(&mut pick, trailing_terms.len()) {
                break;
            }
        }
    }
    Ok(report)
}

/// One matched slice member of the closure certificate: a family member
/// applied with the given leading variable first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PalfyForm {
    pub alpha: usize,
    pub beta: usize,
    pub leading_var: usize,
}

/// Certificate that the clone slice generated by the identity member of
/// the base-point family contains, beyond projections and twisted
/// variables, exactly family members up to variable permutation — each of
/// which regenerates the identity member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PalfyClosureCertificate {
    pub arity: usize,
    pub base_point: usize,
    pub slice_size: usize,
    pub essential_count: usize,
    pub forms: Vec<PalfyForm>,
    pub all_regenerate: bool,
}

impl fmt::Display for PalfyClosureCertificate {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            out,
            "arity-{} slice over base {}: {} members, {} essential",
            self.arity, self.base_point, self.slice_size, self.essential_count
        )?;
        writeln!(
            out,
            "  every essential member is a family member up to variable permutation"
        )?;
        write!(
            out,
            "  all essential members regenerate the identity member: {}",
            self.all_regenerate
        )
    }
}

/// Generates the arity-`k` clone slice of the identity family member and
/// certifies that every essential member is a family member up to
/// variable permutation and regenerates the generator.
pub fn verify_palfy_closure(
    action: &FiniteAction,
    k: usize,
    b: usize,
) -> Result<PalfyClosureCertificate, ConstructionError> {
    let id = identity_index(action);
    let f11 = palfy_op(&PalfyParams::new(action, k, b, id, id)?);
    let order = action.order();
    let n = action.domain_size();
    let budget = GenBudget::default();
    let slice = generate_slice(action, std::slice::from_ref(&f11), k, &budget)?;
    if !slice.is_saturated() {
        return Err(ConstructionError::Budget("slice generation ran out of budget".into()));
    }
    // Candidate forms: f^{(α,β)} with variable j pulled to the front (the
    // family is symmetric in its trailing arguments, so the order of the
    // rest does not matter).
    let mut family = Vec::with_capacity(order * order);
    for alpha in 0..order {
        for beta in 0..order {
            family.push(palfy_op(&PalfyParams::new(action, k, b, alpha, beta)?));
        }
    }
    let mut forms = Vec::new();
    let mut all_regenerate = true;
    let essential: Vec<&OpTable> = slice.essential_tables();
    for h in &essential {
        let mut matched = None;
        'search: for lead in 0..k {
            let reorder: Vec<usize> =
                std::iter::once(lead).chain((0..k).filter(|&v| v != lead)).collect();
            for alpha in 0..order {
                for beta in 0..order {
                    let candidate = OpTable::from_fn(n, k, |args| {
                        let permuted: Vec<usize> = reorder.iter().map(|&v| args[v]).collect();
                        family[alpha * order + beta].eval(&permuted)
                    });
                    if candidate == **h {
                        matched = Some(PalfyForm { alpha, beta, leading_var: lead });
                        break 'search;
                    }
                }
            }
        }
        let Some(form) = matched else {
            return Err(ConstructionError::UnexpectedSliceMember);
        };
        forms.push(form);
        match regenerates(action, h, &f11, &budget)? {
            Verdict::Holds => {}
            Verdict::Fails(()) => all_regenerate = false,
            Verdict::Unknown(e) => {
                return Err(ConstructionError::Budget(format!(
                    "regeneration check ran out of budget: {e}"
                )))
            }
        }
    }
    if !all_regenerate {
        return Err(precondition(
            "an essential slice member does not regenerate the identity member",
        ));
    }
    Ok(PalfyClosureCertificate {
        arity: k,
        base_point: b,
        slice_size: slice.tables().len(),
        essential_count: essential.len(),
        forms,
        all_regenerate,
    })
}

// ---------------------------------------------------------------------------
// Quasi-majority scan
// ---------------------------------------------------------------------------

/// A dead end of the scan: while filling the cells of one coordinate-pair
/// class, the forced value collided with an already-forced one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanContradiction {
    /// Index of the group element serving as the diagonal unary.
    pub diagonal: usize,
    /// The cell where the collision happened.
    pub args: [usize; 3],
    pub existing: usize,
    pub attempted: usize,
}

/// Result of the complete search over quasi-majorities that are weak
/// orbit-semiprojections.
#[derive(Debug, Clone)]
pub struct QuasiMajorityScan {
    /// Every operation in the space, sorted canonically.
    pub candidates: Vec<OpTable>,
    /// One record per search branch that died on a forced-cell collision.
    pub contradictions: Vec<ScanContradiction>,
    /// Piece choices explored.
    pub branches: u64,
}

impl fmt::Display for QuasiMajorityScan {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            out,
            "{} candidate(s), {} contradiction record(s), {} branch(es) explored",
            self.candidates.len(),
            self.contradictions.len(),
            self.branches
        )
    }
}

const SCAN_BRANCH_CAP: u64 = 100_000;
const SCAN_FREE_CAP: u64 = 4096;

/// Complete search for quasi-majorities that are weak
/// orbit-semiprojections over a free action.
///
/// The search space collapses by propagation: the diagonal unary
/// `u = m(x,x,x)` is forced into the group (the identity-relation piece
/// must witness the equal-argument cells, whose values a quasi-majority
/// pins to `u`), every equal-argument cell is `u` of the repeated element,
/// and each coordinate-pair piece `(i, j, β)` must choose one coordinate
/// and one twist consistent with those cells. The search branches over the
/// diagonal and the per-piece choices, records a contradiction whenever a
/// branch dies on a cell collision, enumerates any remaining free cells
/// (failing if there are too many), and verifies every completed table
/// against the definitional checkers before reporting it.
pub fn scan_quasi_majority_weak_osp(
    action: &FiniteAction,
) -> Result<QuasiMajorityScan, ConstructionError> {
    require_free(action, "the quasi-majority scan")?;
    let n = action.domain_size();
    cells_for(n, 3)?;
    let order = action.order();
    // Pieces: coordinate pairs with a relating group element.
    let mut pieces = Vec::new();
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        for beta in 0..order {
            pieces.push((i, j, beta));
        }
    }
    let mut scan = QuasiMajorityScan {
        candidates: Vec::new(),
        contradictions: Vec::new(),
        branches: 0,
    };
    let mut seen = BTreeSet::new();
    for diagonal in 0..order {
        // Equal-argument cells are pinned by the quasi-majority laws.
        let mut table: Vec<Option<usize>> = vec![None; n * n * n];
        for x in 0..n {
            let ux = action.element(diagonal).apply(x);
            for y in 0..n {
                table[(x * n + x) * n + y] = Some(ux);
                table[(x * n + y) * n + x] = Some(ux);
                table[(y * n + x) * n + x] = Some(ux);
            }
        }
        dfs_pieces(
            action,
            diagonal,
            &pieces,
            0,
            &mut table,
            &mut scan,
            &mut seen,
        )?;
    }
    scan.candidates.sort();
    Ok(scan)
}

fn dfs_pieces(
    action: &FiniteAction,
    diagonal: usize,
    pieces: &[(usize, usize, usize)],
    at: usize,
    table: &mut Vec<Option<usize>>,
    scan: &mut QuasiMajorityScan,
    seen: &mut BTreeSet<OpTable>,
) -> Result<(), ConstructionError> {
    let n = action.domain_size();
    if at == pieces.len() {
        return finalize_candidate(action, table, scan, seen);
    }
    let (i, j, beta) = pieces[at];
    let mut any_viable = false;
    let mut last_conflict: Option<ScanContradiction> = None;
    for coord in 0..3 {
        for alpha in 0..action.order() {
            scan.branches += 1;
            if scan.branches > SCAN_BRANCH_CAP {
                return Err(ConstructionError::Budget(format!(
                    "scan exceeded {SCAN_BRANCH_CAP} branches"
                )));
            }
            // Fill the piece's cells; log writes for undo.
            let mut writes = Vec::new();
            let mut conflict = None;
            'fill: for ai in 0..n {
                let aj = action.element(beta).apply(ai);
                for rest in 0..n {
                    let mut args = [0usize; 3];
                    args[i] = ai;
                    args[j] = aj;
                    let free_coord = 3 - i - j;
                    args[free_coord] = rest;
                    let idx = (args[0] * n + args[1]) * n + args[2];
                    let value = action.element(alpha).apply(args[coord]);
                    match table[idx] {
                        None => {
                            table[idx] = Some(value);
                            writes.push(idx);
                        }
                        Some(v) if v == value => {}
                        Some(v) => {
                            conflict = Some(ScanContradiction {
                                diagonal,
                                args,
                                existing: v,
                                attempted: value,
                            });
                            break 'fill;
                        }
                    }
                }
            }
            if let Some(c) = conflict {
                last_conflict = Some(c);
                for idx in writes {
                    table[idx] = None;
                }
                continue;
            }
            any_viable = true;
            let wrote = writes.len();
            dfs_pieces(action, diagonal, pieces, at + 1, table, scan, seen)?;
            for idx in &writes {
                table[*idx] = None;
            }
            // A choice that wrote nothing is indistinguishable from any
            // other silent choice: exploring one suffices.
            if wrote == 0 {
                return Ok(());
            }
        }
    }
    if !any_viable {
        if let Some(c) = last_conflict {
            if scan.contradictions.len() < 8 {
                scan.contradictions.push(c);
            }
        }
    }
    Ok(())
}

fn finalize_candidate(
    action: &FiniteAction,
    table: &mut [Option<usize>],
    scan: &mut QuasiMajorityScan,
    seen: &mut BTreeSet<OpTable>,
) -> Result<(), ConstructionError> {
    let n = action.domain_size();
    let free: Vec<usize> =
        (0..table.len()).filter(|&idx| table[idx].is_none()).collect();
    let combos = (n as u64).checked_pow(free.len() as u32).unwrap_or(u64::MAX);
    if combos > SCAN_FREE_CAP {
        return Err(ConstructionError::Budget(format!(
            "{} unconstrained cells leave {combos} completions; the scan only \
             enumerates up to {SCAN_FREE_CAP}",
            free.len()
        )));
    }
    let mut fill = vec![0usize; free.len()];
    loop {
        let values: Vec<usize> = (0..table.len())
            .map(|idx| match table[idx] {
                Some(v) => v,
                None => fill[free.binary_search(&idx).expect("free cell")],
            })
            .collect();
        let candidate = OpTable::new(n, 3, values)?;
        // Verify against the definitional checkers before reporting.
        if candidate.is_quasi_majority()
            && crate::op::weak_orbit_semiprojection_witness(&candidate, action)?.is_some()
            && seen.insert(candidate.clone())
        {
            scan.candidates.push(candidate);
        }
        if !advance_radix(&mut fill, n) {
            return Ok(());
        }
    }
}

fn advance(args: &mut [usize], n: usize) -> bool {
    advance_radix(args, n)
}

fn advance_radix(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clones::{is_almost_minimal, is_strictly_almost_minimal, StrictFailure};
    use crate::op::{
        is_g_quasi_minority, is_odd_majority, is_odd_malcev, orbit_semiprojection_witness,
        weak_orbit_semiprojection_witness,
    };
    use crate::quasigroups::enumerate_ginv_boolean;

    fn z2(s: usize) -> FiniteAction {
        FiniteAction::free_boolean(s, 1).unwrap()
    }

    fn klein(s: usize) -> FiniteAction {
        FiniteAction::free_boolean(s, 2).unwrap()
    }

    #[test]
    fn collision_minority_on_the_regular_klein_action_is_the_klein_sum() {
        let action = klein(1);
        let m = exmin_minority(&action).unwrap();
        let q = enumerate_ginv_boolean(&action).unwrap().pop().unwrap();
        assert_eq!(m, q);
    }

    #[test]
    fn collision_minority_values_and_laws_on_two_free_orbits() {
        let action = z2(2);
        let m = exmin_minority(&action).unwrap();
        // Orbits {0,1} and {2,3}; on (0,1,2) the pair (0,1) relates by the
        // flip, which is then applied to the remaining argument 2.
        assert_eq!(m.eval(&[0, 1, 2]), 3);
        assert_eq!(m.eval(&[0, 2, 1]), 3);
        assert_eq!(m.eval(&[2, 0, 1]), 3);
        assert!(m.is_idempotent());
        assert!(is_g_quasi_minority(&m, &action).unwrap());
        assert!(matches!(
            is_almost_minimal(&action, &m, &GenBudget::default()).unwrap(),
            Verdict::Holds
        ));
    }

    #[test]
    fn collision_minority_preconditions() {
        // Non-boolean group.
        let cyclic = FiniteAction::free_cyclic(2, 3).unwrap();
        assert!(exmin_minority(&cyclic).is_err());
        // Non-free action: a transposition with a fixed point.
        let action = FiniteAction::from_generators(
            3,
            &[crate::action::Permutation::from_cycles(3, &[&[0, 1]]).unwrap()],
        )
        .unwrap();
        assert!(exmin_minority(&action).is_err());
    }

    #[test]
    fn rank_semiprojection_projects_and_ranks() {
        let action = z2(3);
        for k in [2usize, 3] {
            let f = rank_orbit_semiprojection(&action, k).unwrap();
            assert!(f.is_essential());
            let witness = orbit_semiprojection_witness(&f, &action).unwrap().unwrap();
            assert_eq!(witness.coord, 0);
            assert_eq!(action.element(witness.element).image(), (0..6).collect::<Vec<_>>());
            assert!(matches!(
                is_almost_minimal(&action, &f, &GenBudget::default()).unwrap(),
                Verdict::Holds
            ));
        }
        let f = rank_orbit_semiprojection(&action, 2).unwrap();
        // Distinct orbits: the argument on the higher orbit wins.
        assert_eq!(f.eval(&[0, 2]), 2);
        assert_eq!(f.eval(&[2, 0]), 2);
        assert_eq!(f.eval(&[5, 2]), 5);
        // Collision: first argument.
        assert_eq!(f.eval(&[1, 0]), 1);
        assert!(rank_orbit_semiprojection(&action, 1).is_err());
        assert!(rank_orbit_semiprojection(&action, 4).is_err());
    }

    #[test]
    fn odd_majority_laws_and_minimality() {
        let action = z2(2);
        let m = odd_majority(&action).unwrap();
        assert!(m.is_quasi_majority());
        assert!(is_odd_majority(&m, &action).unwrap());
        assert!(weak_orbit_semiprojection_witness(&m, &action).unwrap().is_some());
        assert!(orbit_semiprojection_witness(&m, &action).unwrap().is_none());
        assert!(matches!(
            is_almost_minimal(&action, &m, &GenBudget::default()).unwrap(),
            Verdict::Holds
        ));
        // The Klein group has order 4: no odd majority there.
        assert!(odd_majority(&klein(1)).is_err());
    }

    #[test]
    fn malcev_twist_is_a_self_inverse_duality() {
        let action = z2(2);
        let m = odd_majority(&action).unwrap();
        let mal = odd_malcev(&action).unwrap();
        assert!(mal.is_quasi_malcev());
        assert!(is_odd_malcev(&mal, &action).unwrap());
        assert_eq!(odd_malcev_from(&action, &mal).unwrap(), m);
        assert!(matches!(
            is_almost_minimal(&action, &mal, &GenBudget::default()).unwrap(),
            Verdict::Holds
        ));
    }

    #[test]
    fn derived_minority_blocks_strict_minimality() {
        let action = z2(2);
        let m = odd_majority(&action).unwrap();
        let star = mstar(&action, &m).unwrap();
        assert!(is_g_quasi_minority(&star, &action).unwrap());
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(star.eval(&[x, x, y]), y);
            }
        }
        // The majority generates the minority…
        assert!(matches!(
            regenerates(&action, &m, &star, &GenBudget::default()).unwrap(),
            Verdict::Holds
        ));
        // …but not the other way around.
        assert!(matches!(
            regenerates(&action, &star, &m, &GenBudget::default()).unwrap(),
            Verdict::Fails(())
        ));
        let slice = generate_slice(&action, std::slice::from_ref(&star), 3, &GenBudget::default())
            .unwrap();
        assert!(!slice.contains(&m));
        assert!(matches!(
            is_strictly_almost_minimal(&action, &m, &GenBudget::default()).unwrap(),
            Verdict::Fails(StrictFailure::NonRegenerating(_))
        ));
    }

    #[test]
    fn base_point_family_values_follow_the_two_arms() {
        let action = z2(3);
        assert_eq!(default_palfy_base(&action), Some(0));
        let f = palfy_op(&PalfyParams::new(&action, 3, 0, 0, 0).unwrap());
        // First argument on the base orbit, orbits pairwise distinct.
        assert_eq!(f.eval(&[0, 2, 4]), 0);
        assert_eq!(f.eval(&[1, 2, 4]), 0);
        assert_eq!(f.eval(&[1, 3, 5]), 0);
        // First argument off the base orbit.
        assert_eq!(f.eval(&[2, 0, 4]), 2);
        // Orbit collision.
        assert_eq!(f.eval(&[0, 1, 4]), 0);
        assert_eq!(f.eval(&[1, 2, 3]), 1);
        // Twisting the whole operation re-parameterizes the family.
        for alpha in 0..2 {
            for beta in 0..2 {
                let fab = palfy_op(&PalfyParams::new(&action, 3, 0, alpha, beta).unwrap());
                for gamma in 0..2usize {
                    let twisted =
                        OpTable::unary(6, action.element(gamma).image()).unwrap();
                    let lhs = twisted.compose(&[&fab]).unwrap();
                    let rhs = palfy_op(
                        &PalfyParams::new(
                            &action,
                            3,
                            0,
                            mul(&action, gamma, alpha),
                            mul(&action, gamma, beta),
                        )
                        .unwrap(),
                    );
                    assert_eq!(lhs, rhs);
                }
            }
        }
        // Preconditions.
        assert!(PalfyParams::new(&action, 1, 0, 0, 0).is_err());
        assert!(PalfyParams::new(&action, 4, 0, 0, 0).is_err());
        let trivial = FiniteAction::trivial(4).unwrap();
        assert!(PalfyParams::new(&trivial, 2, 0, 0, 0).is_err());
        assert_eq!(default_palfy_base(&trivial), None);
    }

    #[test]
    fn family_identities_hold_with_frozen_profile_counts() {
        let action = z2(3);
        let report = check_palfy_identities(&action, 2, 0).unwrap();
        assert_eq!(report.profiles, 72);
        assert_eq!(report.distinct_leading, 36);
        assert_eq!(report.collapsed_unary, 12);
        assert_eq!(report.collapsed_family, 24);
        assert_eq!(report.evaluations, 72 * 4 * 36);
        let report = check_palfy_identities(&action, 3, 0).unwrap();
        assert_eq!(report.profiles, 5400);
        assert_eq!(report.distinct_leading, 1200);
        assert_eq!(report.collapsed_unary, 1400);
        assert_eq!(report.collapsed_family, 2800);
        assert_eq!(report.evaluations, 5400 * 4 * 216);
    }

    #[test]
    fn closure_certificates_for_both_example_actions() {
        // Three free orbits of a 2-element group, ternary slice.
        let action = z2(3);
        let cert = verify_palfy_closure(&action, 3, 0).unwrap();
        assert_eq!(cert.essential_count, 12);
        assert!(cert.all_regenerate);
        for form in &cert.forms {
            assert!(form.alpha < 2 && form.beta < 2 && form.leading_var < 3);
        }
        // Two free orbits of a 3-element cyclic group, binary slice.
        let cyclic = FiniteAction::free_cyclic(2, 3).unwrap();
        let cert = verify_palfy_closure(&cyclic, 2, 0).unwrap();
        assert_eq!(cert.essential_count, 18);
        assert!(cert.all_regenerate);
    }

    #[test]
    fn scan_finds_exactly_the_two_twisted_majorities_for_two_element_groups() {
        let action = z2(2);
        let scan = scan_quasi_majority_weak_osp(&action).unwrap();
        assert_eq!(scan.candidates.len(), 2);
        assert!(scan.contradictions.is_empty());
        for c in &scan.candidates {
            assert!(is_odd_majority(c, &action).unwrap());
        }
        let m = odd_majority(&action).unwrap();
        assert!(scan.candidates.contains(&m));
        // The second candidate is the group twist of the first.
        let gamma = OpTable::unary(4, action.element(1).image()).unwrap();
        let twisted = gamma.compose(&[&m]).unwrap();
        assert!(scan.candidates.contains(&twisted));
    }

    #[test]
    fn scan_reports_contradictions_on_larger_orbits() {
        for action in [klein(1), klein(2)] {
            let scan = scan_quasi_majority_weak_osp(&action).unwrap();
            assert!(scan.candidates.is_empty());
            assert!(!scan.contradictions.is_empty());
        }
    }
}
