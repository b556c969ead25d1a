//! Finite permutation groups acting on `{0, …, n-1}`.
//!
//! A [`FiniteAction`] owns the full (generated) element list of a group
//! together with precomputed orbit and orbital data. Elements are stored
//! sorted lexicographically by image vector, so the identity is always
//! element `0` and every derived enumeration is deterministic.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Hard cap on the order of a generated group.
pub const MAX_GROUP_ORDER: usize = 10_000;

/// Hard cap on the domain size of an action.
pub const MAX_DOMAIN: usize = 1024;

/// Errors arising from group construction and parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActionError {
    /// An image vector was not a permutation of `{0, …, n-1}`.
    #[error("image vector {0:?} is not a permutation of 0..{1}")]
    NotAPermutation(Vec<usize>, usize),
    /// A permutation had the wrong domain size.
    #[error("permutation on {found} points where {expected} were expected")]
    DomainMismatch { expected: usize, found: usize },
    /// Closure under composition exceeded [`MAX_GROUP_ORDER`].
    #[error("group order exceeds the budget of {0} elements")]
    OrderBudget(usize),
    /// The requested domain exceeds [`MAX_DOMAIN`].
    #[error("domain of size {0} exceeds the cap of {1} points")]
    DomainBudget(usize, usize),
    /// The domain must have at least one point.
    #[error("empty domain")]
    EmptyDomain,
    /// A textual description could not be parsed.
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A permutation of `{0, …, n-1}`, stored as its image vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// The identity on `n` points.
    pub fn identity(n: usize) -> Self {
        Permutation { image: (0..n).collect() }
    }

    /// Builds a permutation from its image vector, checking bijectivity.
    pub fn from_image(image: Vec<usize>) -> Result<Self, ActionError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return Err(ActionError::NotAPermutation(image.clone(), n));
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    /// Builds a permutation on `n` points from disjoint cycles.
    ///
    /// Points absent from every cycle are fixed. Mostly a convenience for
    /// tests and examples: `Permutation::from_cycles(4, &[&[0, 1], &[2, 3]])`
    /// is the double transposition `(0 1)(2 3)`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, ActionError> {
        let mut image: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for w in 0..cycle.len() {
                let from = cycle[w];
                let to = cycle[(w + 1) % cycle.len()];
                if from >= n || to >= n {
                    return Err(ActionError::NotAPermutation(cycle.to_vec(), n));
                }
                image[from] = to;
            }
        }
        Permutation::from_image(image)
    }

    /// Number of points.
    pub fn degree(&self) -> usize {
        self.image.len()
    }

    /// Applies the permutation to a point.
    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// The image vector.
    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Functional composition `self ∘ other`: `other` is applied first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation { image: other.image.iter().map(|&x| self.image[x]).collect() }
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            image[y] = x;
        }
        Permutation { image }
    }

    /// Whether this is the identity.
    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(x, &y)| x == y)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation(")?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Generates the subgroup of `Sym(n)` generated by `generators`.
///
/// Returns the element list sorted lexicographically by image vector (the
/// identity first). Fails with [`ActionError::OrderBudget`] if the closure
/// exceeds `max_order`.
pub fn generate_group(
    n: usize,
    generators: &[Permutation],
    max_order: usize,
) -> Result<Vec<Permutation>, ActionError> {
    if n == 0 {
        return Err(ActionError::EmptyDomain);
    }
    for g in generators {
        if g.degree() != n {
            return Err(ActionError::DomainMismatch { expected: n, found: g.degree() });
        }
    }
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut queue: Vec<Permutation> = vec![Permutation::identity(n)];
    seen.insert(Permutation::identity(n));
    while let Some(p) = queue.pop() {
        for g in generators {
            let q = g.compose(&p);
            if !seen.contains(&q) {
                if seen.len() >= max_order {
                    return Err(ActionError::OrderBudget(max_order));
                }
                seen.insert(q.clone());
                queue.push(q);
            }
        }
    }
    let mut elements: Vec<Permutation> = seen.into_iter().collect();
    elements.sort();
    Ok(elements)
}

/// A finite permutation group together with its action data.
///
/// Orbits are numbered ascending by their minimal member; orbitals (orbits
/// of the componentwise action on ordered pairs) likewise by their
/// lexicographically minimal pair.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteAction {
    n: usize,
    elements: Vec<Permutation>,
    index: HashMap<Vec<usize>, usize>,
    /// A small generating subset (element indices), used for orbit search.
    generator_ids: Vec<usize>,
    orbit_of: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    orbital_of: Vec<u32>,
    orbital_reps: Vec<(usize, usize)>,
}

impl FiniteAction {
    /// The group generated by `generators` inside `Sym(n)`, with the default
    /// order budget [`MAX_GROUP_ORDER`].
    pub fn from_generators(n: usize, generators: &[Permutation]) -> Result<Self, ActionError> {
        let elements = generate_group(n, generators, MAX_GROUP_ORDER)?;
        Self::from_sorted_elements(n, elements)
    }

    /// The trivial group acting on `n` points.
    pub fn trivial(n: usize) -> Result<Self, ActionError> {
        Self::from_generators(n, &[])
    }

    /// Wraps an explicit element list, closing it under composition first.
    pub fn from_elements(n: usize, elements: &[Permutation]) -> Result<Self, ActionError> {
        Self::from_generators(n, elements)
    }

    /// Convenience form of [`free_boolean_action`].
    pub fn free_boolean(s: usize, m: usize) -> Result<Self, ActionError> {
        free_boolean_action(s, m)
    }

    /// Convenience form of [`free_cyclic_action`].
    pub fn free_cyclic(s: usize, order: usize) -> Result<Self, ActionError> {
        free_cyclic_action(s, order)
    }

    fn from_sorted_elements(n: usize, elements: Vec<Permutation>) -> Result<Self, ActionError> {
        if n == 0 {
            return Err(ActionError::EmptyDomain);
        }
        if n > MAX_DOMAIN {
            return Err(ActionError::DomainBudget(n, MAX_DOMAIN));
        }
        let index: HashMap<Vec<usize>, usize> =
            elements.iter().enumerate().map(|(i, p)| (p.image.clone(), i)).collect();

        // Greedy small generating set: scan elements in canonical order and
        // keep those not generated by the ones kept so far.
        let mut generator_ids: Vec<usize> = Vec::new();
        let mut span: HashSet<Vec<usize>> = HashSet::new();
        span.insert(Permutation::identity(n).image.clone());
        for (i, p) in elements.iter().enumerate() {
            if span.contains(&p.image) {
                continue;
            }
            generator_ids.push(i);
            let gens: Vec<&Permutation> = generator_ids.iter().map(|&j| &elements[j]).collect();
            let mut queue: Vec<Permutation> = span
                .iter()
                .map(|im| Permutation { image: im.clone() })
                .collect();
            while let Some(q) = queue.pop() {
                for g in &gens {
                    let r = g.compose(&q);
                    if span.insert(r.image.clone()) {
                        queue.push(r);
                    }
                }
            }
        }

        let (orbit_of, orbits) = Self::compute_orbits(n, &elements, &generator_ids);
        let (orbital_of, orbital_reps) =
            Self::compute_orbitals(n, &elements, &generator_ids);
        Ok(FiniteAction {
            n,
            elements,
            index,
            generator_ids,
            orbit_of,
            orbits,
            orbital_of,
            orbital_reps,
        })
    }

    fn compute_orbits(
        n: usize,
        elements: &[Permutation],
        generator_ids: &[usize],
    ) -> (Vec<usize>, Vec<Vec<usize>>) {
        let mut orbit_of = vec![usize::MAX; n];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut members = vec![start];
            orbit_of[start] = id;
            let mut head = 0;
            while head < members.len() {
                let x = members[head];
                head += 1;
                for &g in generator_ids {
                    let y = elements[g].apply(x);
                    if orbit_of[y] == usize::MAX {
                        orbit_of[y] = id;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            orbits.push(members);
        }
        (orbit_of, orbits)
    }

    fn compute_orbitals(
        n: usize,
        elements: &[Permutation],
        generator_ids: &[usize],
    ) -> (Vec<u32>, Vec<(usize, usize)>) {
        let mut orbital_of = vec![u32::MAX; n * n];
        let mut reps = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if orbital_of[a * n + b] != u32::MAX {
                    continue;
                }
                let id = reps.len() as u32;
                reps.push((a, b));
                let mut stack = vec![(a, b)];
                orbital_of[a * n + b] = id;
                while let Some((x, y)) = stack.pop() {
                    for &g in generator_ids {
                        let p = elements[g].apply(x);
                        let q = elements[g].apply(y);
                        if orbital_of[p * n + q] == u32::MAX {
                            orbital_of[p * n + q] = id;
                            stack.push((p, q));
                        }
                    }
                }
            }
        }
        (orbital_of, reps)
    }

    /// Domain size.
    pub fn domain_size(&self) -> usize {
        self.n
    }

    /// Group order.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// The elements, sorted lexicographically by image vector.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    /// The element with the given index.
    pub fn element(&self, idx: usize) -> &Permutation {
        &self.elements[idx]
    }

    /// Index of a permutation among the elements, if it belongs to the group.
    pub fn element_index(&self, p: &Permutation) -> Option<usize> {
        self.index.get(&p.image).copied()
    }

    /// Index of the element mapping `from` to `to`, if any.
    ///
    /// When the action is free the witness is unique.
    pub fn transporter(&self, from: usize, to: usize) -> Option<usize> {
        (0..self.elements.len()).find(|&g| self.elements[g].apply(from) == to)
    }

    /// Orbit id of a point (ids ascend by minimal orbit member).
    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x]
    }

    /// Number of orbits.
    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    /// The orbits, each sorted, ordered by minimal member.
    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    /// Minimal member of each orbit.
    pub fn orbit_reps(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o[0]).collect()
    }

    /// Whether two points lie in the same orbit.
    #[inline]
    pub fn same_orbit(&self, x: usize, y: usize) -> bool {
        self.orbit_of[x] == self.orbit_of[y]
    }

    /// Orbital id of an ordered pair (orbit of the componentwise action on
    /// pairs; ids ascend by lexicographically minimal pair).
    pub fn orbital_of(&self, x: usize, y: usize) -> usize {
        self.orbital_of[x * self.n + y] as usize
    }

    /// Number of orbitals.
    pub fn orbital_count(&self) -> usize {
        self.orbital_reps.len()
    }

    /// Lexicographically minimal pair of each orbital.
    pub fn orbital_reps(&self) -> &[(usize, usize)] {
        &self.orbital_reps
    }

    /// Whether every element squares to the identity (so the group is an
    /// elementary abelian 2-group).
    pub fn is_boolean(&self) -> bool {
        self.elements.iter().all(|g| g.compose(g).is_identity())
    }

    /// Whether no non-identity element fixes a point.
    pub fn is_free(&self) -> bool {
        self.free_violation().is_none()
    }

    /// A witness `(element index, fixed point)` against freeness, if any.
    pub fn free_violation(&self) -> Option<(usize, usize)> {
        for (i, g) in self.elements.iter().enumerate() {
            if g.is_identity() {
                continue;
            }
            if let Some(x) = (0..self.n).find(|&x| g.apply(x) == x) {
                return Some((i, x));
            }
        }
        None
    }

    /// Whether the action has a single orbit.
    pub fn is_transitive(&self) -> bool {
        self.orbits.len() == 1
    }

    /// Renders the action as text: domain size, then one line per element.
    ///
    /// `FiniteAction::parse` accepts this format (and regenerates, so a
    /// generator list parses equally well).
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for p in &self.elements {
            let words: Vec<String> = p.image.iter().map(|v| v.to_string()).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses a textual action: first line the domain size, each further
    /// nonempty line a permutation given by its space-separated images.
    /// The listed permutations are closed under composition.
    pub fn parse(text: &str) -> Result<Self, ActionError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (first_no, first) = lines
            .next()
            .ok_or(ActionError::Parse { line: 1, reason: "missing domain size".into() })?;
        let n: usize = first.trim().parse().map_err(|_| ActionError::Parse {
            line: first_no + 1,
            reason: format!("invalid domain size {first:?}"),
        })?;
        let mut perms = Vec::new();
        for (no, line) in lines {
            let mut image = Vec::new();
            for word in line.split_whitespace() {
                let v: usize = word.parse().map_err(|_| ActionError::Parse {
                    line: no + 1,
                    reason: format!("invalid point {word:?}"),
                })?;
                image.push(v);
            }
            if image.len() != n {
                return Err(ActionError::Parse {
                    line: no + 1,
                    reason: format!("expected {n} images, found {}", image.len()),
                });
            }
            perms.push(Permutation::from_image(image).map_err(|e| ActionError::Parse {
                line: no + 1,
                reason: e.to_string(),
            })?);
        }
        Self::from_generators(n, &perms)
    }
}

impl fmt::Debug for FiniteAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteAction")
            .field("n", &self.n)
            .field("order", &self.elements.len())
            .field("orbits", &self.orbits)
            .finish()
    }
}

/// The free action of the Boolean group `(ℤ₂)^m` on `s` orbits.
///
/// The domain is `{0, …, s·2^m - 1}`; the point `o·2^m + v` is the element
/// `v` (an `m`-bit vector) of orbit `o`, and the group acts by xor on the
/// low `m` bits. Orbit representatives are the points `o·2^m`.
pub fn free_boolean_action(s: usize, m: usize) -> Result<FiniteAction, ActionError> {
    if s == 0 {
        return Err(ActionError::EmptyDomain);
    }
    let block = 1usize << m;
    let n = s
        .checked_mul(block)
        .filter(|&n| n <= MAX_DOMAIN)
        .ok_or(ActionError::DomainBudget(s.saturating_mul(block), MAX_DOMAIN))?;
    let mut generators = Vec::new();
    for bit in 0..m {
        let image: Vec<usize> = (0..n).map(|x| x ^ (1 << bit)).collect();
        generators.push(Permutation { image });
    }
    FiniteAction::from_generators(n, &generators)
}

/// The free action of the cyclic group `ℤ_order` on `s` orbits.
///
/// The domain is `{0, …, s·order - 1}`; the point `o·order + v` is position
/// `v` on orbit `o`, and the generator advances every position by one
/// (mod `order`).
pub fn free_cyclic_action(s: usize, order: usize) -> Result<FiniteAction, ActionError> {
    if s == 0 || order == 0 {
        return Err(ActionError::EmptyDomain);
    }
    let n = s
        .checked_mul(order)
        .filter(|&n| n <= MAX_DOMAIN)
        .ok_or(ActionError::DomainBudget(s.saturating_mul(order), MAX_DOMAIN))?;
    let image: Vec<usize> = (0..n)
        .map(|x| {
            let (block, pos) = (x / order, x % order);
            block * order + (pos + 1) % order
        })
        .collect();
    FiniteAction::from_generators(n, &[Permutation { image }])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn klein_on_4() -> FiniteAction {
        let a = Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap();
        let b = Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap();
        FiniteAction::from_generators(4, &[a, b]).unwrap()
    }

    #[test]
    fn identity_composition_inverse() {
        let p = Permutation::from_cycles(5, &[&[0, 1, 2]]).unwrap();
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(5));
        assert_eq!(p.inverse().compose(&p), Permutation::identity(5));
        let q = Permutation::from_cycles(5, &[&[3, 4]]).unwrap();
        // (q ∘ p)(0): p first maps 0 ↦ 1, then q fixes 1.
        assert_eq!(q.compose(&p).apply(0), 1);
        assert_eq!(q.compose(&p).apply(3), 4);
    }

    #[test]
    fn from_image_rejects_non_bijections() {
        assert!(Permutation::from_image(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_image(vec![0, 3]).is_err());
        assert!(Permutation::from_image(vec![1, 0, 2]).is_ok());
    }

    #[test]
    fn klein_group_closure_has_four_elements() {
        let act = klein_on_4();
        assert_eq!(act.order(), 4);
        assert!(act.is_boolean());
        assert!(act.is_free());
        assert!(act.is_transitive());
        // Identity is element 0 in the canonical order.
        assert!(act.element(0).is_identity());
    }

    #[test]
    fn free_boolean_orbits_are_blocks() {
        let act = free_boolean_action(2, 1).unwrap();
        assert_eq!(act.domain_size(), 4);
        assert_eq!(act.order(), 2);
        assert_eq!(act.orbits(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(act.orbit_of(1), 0);
        assert_eq!(act.orbit_of(2), 1);
        assert!(act.is_boolean() && act.is_free());
        assert_eq!(act.orbit_reps(), vec![0, 2]);
    }

    #[test]
    fn free_cyclic_orbits_are_blocks() {
        let act = free_cyclic_action(2, 3).unwrap();
        assert_eq!(act.domain_size(), 6);
        assert_eq!(act.order(), 3);
        assert_eq!(act.orbits(), &[vec![0, 1, 2], vec![3, 4, 5]]);
        assert!(act.is_free());
        assert!(!act.is_boolean());
        // The unique transporter 1 ↦ 0 also maps 5 ↦ 4.
        let g = act.transporter(1, 0).unwrap();
        assert_eq!(act.element(g).apply(5), 4);
    }

    #[test]
    fn symmetric_group_is_not_free_with_witness() {
        let s3 = FiniteAction::from_generators(
            3,
            &[
                Permutation::from_cycles(3, &[&[0, 1]]).unwrap(),
                Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_boolean());
        let (g, x) = s3.free_violation().expect("S3 is not free");
        assert!(!s3.element(g).is_identity());
        assert_eq!(s3.element(g).apply(x), x);
    }

    #[test]
    fn cyclic_four_is_free_but_not_boolean() {
        let z4 = FiniteAction::from_generators(
            4,
            &[Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()],
        )
        .unwrap();
        assert_eq!(z4.order(), 4);
        assert!(z4.is_free());
        assert!(z4.is_transitive());
        assert!(!z4.is_boolean());
    }

    #[test]
    fn order_budget_is_enforced() {
        // ⟨(0 1), (0 1 … 7)⟩ = Sym(8), order 40320 > 10000.
        let res = generate_group(
            8,
            &[
                Permutation::from_cycles(8, &[&[0, 1]]).unwrap(),
                Permutation::from_cycles(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]]).unwrap(),
            ],
            MAX_GROUP_ORDER,
        );
        assert_eq!(res.unwrap_err(), ActionError::OrderBudget(MAX_GROUP_ORDER));
    }

    #[test]
    fn orbitals_of_the_trivial_group_are_singletons() {
        let t = FiniteAction::trivial(3).unwrap();
        assert_eq!(t.orbital_count(), 9);
        assert_eq!(t.orbit_count(), 3);
    }

    #[test]
    fn orbitals_of_free_z2_on_two_orbits() {
        let act = free_boolean_action(2, 1).unwrap();
        // Pairs split by (orbit of x, orbit of y, x = y or x = γy, …):
        // within an orbit: diagonal vs antidiagonal; across orbits: the
        // relative twist. Count: 2·2 within each of 2 orbits + 2 twists in
        // each of 2 directions = 8.
        assert_eq!(act.orbital_count(), 8);
        assert_eq!(act.orbital_of(0, 1), act.orbital_of(1, 0));
        assert_ne!(act.orbital_of(0, 0), act.orbital_of(0, 1));
        assert_eq!(act.orbital_of(0, 2), act.orbital_of(1, 3));
        assert_ne!(act.orbital_of(0, 2), act.orbital_of(1, 2));
    }

    #[test]
    fn transporter_is_unique_for_free_actions() {
        let act = klein_on_4();
        for from in 0..4 {
            for to in 0..4 {
                let g = act.transporter(from, to).expect("transitive");
                assert_eq!(act.element(g).apply(from), to);
                let all: Vec<usize> = (0..act.order())
                    .filter(|&h| act.element(h).apply(from) == to)
                    .collect();
                assert_eq!(all, vec![g], "free transitive actions are regular");
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let act = klein_on_4();
        let text = act.to_text();
        let back = FiniteAction::parse(&text).unwrap();
        assert_eq!(act, back);
        // Generators alone parse to the same group.
        let gens = "4\n1 0 3 2\n2 3 0 1\n";
        assert_eq!(FiniteAction::parse(gens).unwrap(), act);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = FiniteAction::parse("3\n0 1\n").unwrap_err();
        assert!(matches!(err, ActionError::Parse { line: 2, .. }));
        let err = FiniteAction::parse("").unwrap_err();
        assert!(matches!(err, ActionError::Parse { line: 1, .. }));
    }

    #[test]
    fn domain_budget_is_enforced() {
        assert!(matches!(
            free_boolean_action(2, 10),
            Err(ActionError::DomainBudget(2048, _))
        ));
        assert!(free_boolean_action(8, 1).is_ok());
    }
}
