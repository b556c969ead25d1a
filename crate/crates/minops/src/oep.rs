//! Orbital extension over two-colored tournaments with forbidden
//! triangles.
//!
//! Structures here are finite tournaments whose edges carry one of two
//! colors, constrained by a set of forbidden triangles (a *bound set*).
//! Up to isomorphism a triangle is either *linear* — a source vertex, a
//! middle vertex and a sink, written `L(i,j,k)` for the colors of the
//! source→middle, middle→sink and source→sink edges — or an oriented
//! 3-*cycle* `C(i,j,k)`, taken up to rotation.
//!
//! The *orbital extension property* asks: is there an edge type (an
//! *orbital*: a direction together with a color) such that, however a new
//! point is attached to one old point, the new edge can be completed over
//! every second old point without creating a forbidden triangle? The
//! completion forced by attaching over an edge of color `d` is
//! `L(d,c,c)` when the candidate orbital points forward with color `c`,
//! and `L(c,d,c)` when it points backward. [`has_oep`] decides the
//! property for a bound set and reports which attachment colors block
//! which orbitals.
//!
//! Two preset bound sets with known amalgamation classes are provided;
//! for any other bound set the verdict is conditional on the bounds
//! actually axiomatizing an amalgamation class.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors of the orbital-extension layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OepError {
    #[error("edge colors are 1 or 2, got {0}")]
    Color(u8),
    #[error("cannot parse triangle {0:?}: expected C or L followed by three colors")]
    Parse(String),
}

/// Direction of an edge relative to a reference point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Forward,
    Backward,
}

/// An orbital: an edge direction together with a color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel {
    pub orientation: Orientation,
    pub color: u8,
}

impl EdgeLabel {
    pub fn forward(color: u8) -> Result<Self, OepError> {
        check_color(color)?;
        Ok(EdgeLabel { orientation: Orientation::Forward, color })
    }

    pub fn backward(color: u8) -> Result<Self, OepError> {
        check_color(color)?;
        Ok(EdgeLabel { orientation: Orientation::Backward, color })
    }

    /// Exchanges the two edge colors.
    pub fn swap_colors(self) -> Self {
        EdgeLabel { orientation: self.orientation, color: 3 - self.color }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.orientation {
            Orientation::Forward => "→",
            Orientation::Backward => "←",
        };
        write!(out, "{arrow}{}", self.color)
    }
}

/// The four orbitals in scan order.
pub fn orbitals() -> [EdgeLabel; 4] {
    [
        EdgeLabel { orientation: Orientation::Forward, color: 1 },
        EdgeLabel { orientation: Orientation::Backward, color: 1 },
        EdgeLabel { orientation: Orientation::Forward, color: 2 },
        EdgeLabel { orientation: Orientation::Backward, color: 2 },
    ]
}

fn check_color(c: u8) -> Result<(), OepError> {
    if c == 1 || c == 2 {
        Ok(())
    } else {
        Err(OepError::Color(c))
    }
}

/// A two-colored triangle up to isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Triangle {
    /// Oriented 3-cycle with the cyclic color word `colors`, stored as its
    /// lexicographically least rotation.
    Cycle { colors: [u8; 3] },
    /// Source–middle–sink triangle: `first` colors source→middle, `second`
    /// colors middle→sink, `chord` colors source→sink.
    Linear { first: u8, second: u8, chord: u8 },
}

impl Triangle {
    pub fn cycle(i: u8, j: u8, k: u8) -> Result<Self, OepError> {
        check_color(i)?;
        check_color(j)?;
        check_color(k)?;
        let rotations = [[i, j, k], [j, k, i], [k, i, j]];
        let colors = *rotations.iter().min().expect("three rotations");
        Ok(Triangle::Cycle { colors })
    }

    pub fn linear(i: u8, j: u8, k: u8) -> Result<Self, OepError> {
        check_color(i)?;
        check_color(j)?;
        check_color(k)?;
        Ok(Triangle::Linear { first: i, second: j, chord: k })
    }

    /// Exchanges the two edge colors.
    pub fn swap_colors(self) -> Self {
        match self {
            Triangle::Cycle { colors: [i, j, k] } => {
                Triangle::cycle(3 - i, 3 - j, 3 - k).expect("colors stay valid")
            }
            Triangle::Linear { first, second, chord } => {
                Triangle::linear(3 - first, 3 - second, 3 - chord).expect("colors stay valid")
            }
        }
    }

    /// All twelve triangles: four cycle classes and eight linear ones.
    pub fn all() -> Vec<Triangle> {
        let mut out = Vec::with_capacity(12);
        for (i, j, k) in [(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2)] {
            out.push(Triangle::cycle(i, j, k).expect("valid colors"));
        }
        for i in 1..=2 {
            for j in 1..=2 {
                for k in 1..=2 {
                    out.push(Triangle::linear(i, j, k).expect("valid colors"));
                }
            }
        }
        out
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Triangle::Cycle { colors: [i, j, k] } => write!(out, "C{i}{j}{k}"),
            Triangle::Linear { first, second, chord } => {
                write!(out, "L{first}{second}{chord}")
            }
        }
    }
}

impl FromStr for Triangle {
    type Err = OepError;

    fn from_str(text: &str) -> Result<Self, OepError> {
        let bad = || OepError::Parse(text.to_string());
        let mut chars = text.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let mut colors = [0u8; 3];
        for slot in &mut colors {
            let c = chars.next().ok_or_else(bad)?;
            *slot = c.to_digit(10).ok_or_else(bad)? as u8;
        }
        if chars.next().is_some() {
            return Err(bad());
        }
        let [i, j, k] = colors;
        match kind {
            'C' | 'c' => Triangle::cycle(i, j, k),
            'L' | 'l' => Triangle::linear(i, j, k),
            _ => Err(bad()),
        }
    }
}

/// A set of forbidden triangles.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundSet {
    triangles: BTreeSet<Triangle>,
}

impl BoundSet {
    pub fn new(triangles: impl IntoIterator<Item = Triangle>) -> Self {
        BoundSet { triangles: triangles.into_iter().collect() }
    }

    /// No forbidden triangles: the unconstrained two-colored tournaments.
    pub fn empty() -> Self {
        BoundSet::default()
    }

    /// The preset bound set `{C111, C222, L111, L122, L212}`.
    pub fn s3tilde() -> Self {
        BoundSet::parse("C111\nC222\nL111\nL122\nL212").expect("preset parses")
    }

    /// The preset bound set `{C111, C112, L121, L211, L221, L222}`.
    pub fn s4() -> Self {
        BoundSet::parse("C111\nC112\nL121\nL211\nL221\nL222").expect("preset parses")
    }

    /// Parses one triangle per line; blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self, OepError> {
        let mut triangles = BTreeSet::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            triangles.insert(line.parse()?);
        }
        Ok(BoundSet { triangles })
    }

    pub fn contains(&self, t: &Triangle) -> bool {
        self.triangles.contains(t)
    }

    pub fn triangles(&self) -> impl Iterator<Item = &Triangle> {
        self.triangles.iter()
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Exchanges the two edge colors throughout.
    pub fn swap_colors(&self) -> Self {
        BoundSet { triangles: self.triangles.iter().map(|t| t.swap_colors()).collect() }
    }

    /// Whether this bound set is one whose amalgamation class is verified:
    /// the two presets and the empty set.
    pub fn is_known_class(&self) -> bool {
        *self == BoundSet::empty() || *self == BoundSet::s3tilde() || *self == BoundSet::s4()
    }
}

impl fmt::Display for BoundSet {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.triangles {
            writeln!(out, "{t}")?;
        }
        Ok(())
    }
}

/// The triangle forced by attaching a new point over an old edge of the
/// color of `rho` and completing with the candidate orbital: `L(d,c,c)`
/// for a forward orbital of color `c`, `L(c,d,c)` for a backward one,
/// where `d` is the color of `rho`.
pub fn triangle_of(rho: EdgeLabel, orbital: EdgeLabel) -> Triangle {
    let d = rho.color;
    let c = orbital.color;
    match orbital.orientation {
        Orientation::Forward => Triangle::linear(d, c, c),
        Orientation::Backward => Triangle::linear(c, d, c),
    }
    .expect("orbital colors are valid")
}

/// Extension status of one orbital: the attachment labels whose forced
/// triangle is forbidden.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitalStatus {
    pub orbital: EdgeLabel,
    pub blocked_by: Vec<EdgeLabel>,
}

/// Decision report for the orbital extension property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OepReport {
    /// Whether some orbital extends over every attachment.
    pub holds: bool,
    /// Status of all four orbitals in scan order.
    pub orbitals: Vec<OrbitalStatus>,
    /// The first unblocked orbital, when the property holds.
    pub open_orbital: Option<EdgeLabel>,
    /// The first attachment label blocking every orbital at once, when one
    /// exists.
    pub single_rho_witness: Option<EdgeLabel>,
    /// Whether the verdict rests on an unverified amalgamation class.
    pub conditional: bool,
}

impl fmt::Display for OepReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "holds" } else { "fails" };
        write!(out, "orbital extension {verdict}")?;
        if self.conditional {
            write!(out, " (conditional on amalgamation)")?;
        }
        writeln!(out)?;
        for status in &self.orbitals {
            if status.blocked_by.is_empty() {
                writeln!(out, "  {} open", status.orbital)?;
            } else {
                let blockers: Vec<String> =
                    status.blocked_by.iter().map(|b| b.to_string()).collect();
                writeln!(out, "  {} blocked by {}", status.orbital, blockers.join(", "))?;
            }
        }
        if let Some(rho) = self.single_rho_witness {
            writeln!(out, "  attachment {rho} blocks every orbital")?;
        }
        Ok(())
    }
}

/// Decides the orbital extension property for a bound set.
pub fn has_oep(bounds: &BoundSet) -> OepReport {
    let labels = orbitals();
    let mut statuses = Vec::with_capacity(4);
    for orbital in labels {
        let blocked_by: Vec<EdgeLabel> = labels
            .into_iter()
            .filter(|&rho| bounds.contains(&triangle_of(rho, orbital)))
            .collect();
        statuses.push(OrbitalStatus { orbital, blocked_by });
    }
    let open_orbital = statuses
        .iter()
        .find(|s| s.blocked_by.is_empty())
        .map(|s| s.orbital);
    let single_rho_witness = labels
        .into_iter()
        .find(|rho| statuses.iter().all(|s| s.blocked_by.contains(rho)));
    OepReport {
        holds: open_orbital.is_some(),
        orbitals: statuses,
        open_orbital,
        single_rho_witness,
        conditional: !bounds.is_known_class(),
    }
}
