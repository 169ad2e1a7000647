//! Alternating link diagrams as combinatorial planar maps: validation,
//! crossing smoothing, the diagram containment order, Borromean-freeness,
//! Goeritz determinants from checkerboard colorings, and the chain-tree to
//! diagram bridge.

use crate::signmat::{det_exact, IntMatrix};
use crate::surgery::{h1_order, tree_to_framed_link, AwTree, H1Order};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("invalid diagram: {0}")]
    Invalid(DiagramVerdict),
    #[error("diagram must be alternating for this operation")]
    NotAlternating,
    #[error("projection must be connected, found {0} pieces")]
    Disconnected(usize),
    #[error("no consistent over/under assignment makes this map alternating")]
    NotRealizable,
    #[error("containment search budget is {max} crossings, got {got}")]
    BudgetExceeded { got: usize, max: usize },
    #[error("chain construction needs a single path with integer weights >= 1: {0}")]
    NotIntegerPath(String),
    #[error("cannot parse diagram: {0}")]
    Parse(String),
}

/// One crossing: the four incident arc ids in counterclockwise cyclic
/// order, and the index (0 or 1) of the strand axis passing over. Axis 0
/// is the strand through slots 0 and 2, axis 1 through slots 1 and 3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub arcs: [u32; 4],
    pub over: u8,
}

/// A link diagram as a 4-valent planar map with over/under data.
/// Crossing-free circle components are counted in `free_loops`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub crossings: Vec<Crossing>,
    #[serde(default)]
    pub free_loops: usize,
    pub alternating: bool,
}

/// Which of the two planar resolutions replaces the crossing: `A` joins
/// slots (0,1) and (2,3), `B` joins slots (0,3) and (1,2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmoothMode {
    A,
    B,
}

/// A crossing id with a chosen resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothingChoice {
    pub crossing: usize,
    pub mode: SmoothMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagramViolation {
    ArcCount { arc: u32, count: usize },
    BadOverBit { crossing: usize },
    EulerFailure { expected: isize, got: isize },
    AlternationBroken,
}

impl fmt::Display for DiagramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramViolation::ArcCount { arc, count } => {
                write!(f, "arc {arc} appears {count} times, need exactly 2")
            }
            DiagramViolation::BadOverBit { crossing } => {
                write!(f, "crossing {crossing} over bit must be 0 or 1")
            }
            DiagramViolation::EulerFailure { expected, got } => write!(
                f,
                "sphere Euler count failed: expected {expected} faces, got {got}"
            ),
            DiagramViolation::AlternationBroken => {
                write!(f, "flagged alternating but a strand breaks alternation")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiagramVerdict {
    pub violations: Vec<DiagramViolation>,
}

impl DiagramVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for DiagramVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "ok")
        } else {
            let items: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            write!(f, "invalid: {}", items.join("; "))
        }
    }
}

/// A dart is one of the four arc-ends at a crossing.
type Dart = (usize, usize);

impl Diagram {
    pub fn empty() -> Self {
        Diagram {
            crossings: Vec::new(),
            free_loops: 0,
            alternating: true,
        }
    }

    /// The zero-crossing unknot diagram.
    pub fn unknot() -> Self {
        Diagram {
            crossings: Vec::new(),
            free_loops: 1,
            alternating: true,
        }
    }

    /// The standard 2-crossing alternating diagram of the Hopf link.
    pub fn hopf() -> Self {
        from_braid_closure(2, &[1, 1]).expect("fixture braid is alternating")
    }

    /// The standard 3-crossing alternating trefoil diagram.
    pub fn trefoil() -> Self {
        from_braid_closure(2, &[1, 1, 1]).expect("fixture braid is alternating")
    }

    /// The fixed 6-crossing alternating Borromean diagram, realized as the
    /// closure of the three-strand braid (s1 s2^-1)^3.
    pub fn borromean() -> Self {
        from_braid_closure(3, &[1, -2, 1, -2, 1, -2]).expect("fixture braid is alternating")
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Arc-end occurrences keyed by arc id.
    fn arc_darts(&self) -> BTreeMap<u32, Vec<Dart>> {
        let mut map: BTreeMap<u32, Vec<Dart>> = BTreeMap::new();
        for (c, x) in self.crossings.iter().enumerate() {
            for (s, &a) in x.arcs.iter().enumerate() {
                map.entry(a).or_default().push((c, s));
            }
        }
        map
    }

    /// The dart at the other end of every arc; None if pairing fails.
    fn mate_table(&self) -> Option<Vec<[Dart; 4]>> {
        let map = self.arc_darts();
        let mut table = vec![[(usize::MAX, 0); 4]; self.crossings.len()];
        for darts in map.values() {
            if darts.len() != 2 {
                return None;
            }
            let (d0, d1) = (darts[0], darts[1]);
            table[d0.0][d0.1] = d1;
            table[d1.0][d1.1] = d0;
        }
        Some(table)
    }

    /// Connected pieces of the projection graph as sorted index sets.
    fn projection_components(&self) -> Vec<Vec<usize>> {
        let n = self.crossings.len();
        let Some(mate) = self.mate_table() else {
            return if n == 0 { Vec::new() } else { vec![(0..n).collect()] };
        };
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut piece = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(c) = queue.pop_front() {
                piece.push(c);
                for s in 0..4 {
                    let (c2, _) = mate[c][s];
                    if !seen[c2] {
                        seen[c2] = true;
                        queue.push_back(c2);
                    }
                }
            }
            piece.sort_unstable();
            out.push(piece);
        }
        out
    }

    /// Face ids per dart and the face count, by tracing the orbits of
    /// "flip to the mate, then turn one slot counterclockwise".
    fn faces(&self, mate: &[[Dart; 4]]) -> (Vec<[usize; 4]>, usize) {
        let n = self.crossings.len();
        let mut face_of = vec![[usize::MAX; 4]; n];
        let mut count = 0;
        for c in 0..n {
            for s in 0..4 {
                if face_of[c][s] != usize::MAX {
                    continue;
                }
                let mut cur = (c, s);
                while face_of[cur.0][cur.1] == usize::MAX {
                    face_of[cur.0][cur.1] = count;
                    let (mc, ms) = mate[cur.0][cur.1];
                    cur = (mc, (ms + 1) % 4);
                }
                count += 1;
            }
        }
        (face_of, count)
    }

    /// The next strand passage: enter a crossing at `dart`, leave at the
    /// opposite slot, and hop to the mate of that end.
    fn next_passage(&self, mate: &[[Dart; 4]], dart: Dart) -> Dart {
        let (c, s) = dart;
        mate[c][(s + 2) % 4]
    }

    /// Whether the passage entering at `dart` runs over its crossing.
    fn passage_is_over(&self, dart: Dart) -> bool {
        let (c, s) = dart;
        (s % 2) as u8 == self.crossings[c].over
    }

    /// Strand orbits as lists of entry darts.
    fn strand_orbits(&self, mate: &[[Dart; 4]]) -> Vec<Vec<Dart>> {
        let n = self.crossings.len();
        let mut seen = vec![[false; 4]; n];
        let mut orbits = Vec::new();
        for c in 0..n {
            for s in 0..4 {
                if seen[c][s] {
                    continue;
                }
                let mut orbit = Vec::new();
                let mut cur = (c, s);
                while !seen[cur.0][cur.1] {
                    seen[cur.0][cur.1] = true;
                    // The exit end belongs to the same passage.
                    seen[cur.0][(cur.1 + 2) % 4] = true;
                    orbit.push(cur);
                    cur = self.next_passage(mate, cur);
                }
                orbits.push(orbit);
            }
        }
        orbits
    }

    /// Number of link components, counting crossing-free loops.
    pub fn component_count(&self) -> usize {
        match self.mate_table() {
            Some(mate) => self.strand_orbits(&mate).len() + self.free_loops,
            None => self.free_loops,
        }
    }

    /// True iff over/under alternates along every strand.
    pub fn is_alternating(&self) -> bool {
        let Some(mate) = self.mate_table() else {
            return false;
        };
        for orbit in self.strand_orbits(&mate) {
            for (i, &dart) in orbit.iter().enumerate() {
                let next = orbit[(i + 1) % orbit.len()];
                if self.passage_is_over(dart) == self.passage_is_over(next) {
                    return false;
                }
            }
        }
        true
    }
}

/// Checks arc pairing, the sphere Euler count per projection piece, and,
/// when the diagram is flagged alternating, strand alternation. The
/// verdict lists every failure.
pub fn validate_diagram(d: &Diagram) -> DiagramVerdict {
    let mut violations = Vec::new();
    for (c, x) in d.crossings.iter().enumerate() {
        if x.over > 1 {
            violations.push(DiagramViolation::BadOverBit { crossing: c });
        }
    }
    for (arc, darts) in d.arc_darts() {
        if darts.len() != 2 {
            violations.push(DiagramViolation::ArcCount {
                arc,
                count: darts.len(),
            });
        }
    }
    if !violations.is_empty() {
        return DiagramVerdict { violations };
    }
    let mate = d.mate_table().expect("arc pairing verified");
    let (face_of, _) = d.faces(&mate);
    for piece in d.projection_components() {
        let v = piece.len() as isize;
        let faces_in_piece: BTreeSet<usize> = piece
            .iter()
            .flat_map(|&c| face_of[c].iter().copied())
            .collect();
        let f = faces_in_piece.len() as isize;
        // V - E + F = 2 on the sphere with E = 2V.
        if f != v + 2 {
            violations.push(DiagramViolation::EulerFailure {
                expected: v + 2,
                got: f,
            });
        }
    }
    if d.alternating && !d.is_alternating() {
        violations.push(DiagramViolation::AlternationBroken);
    }
    DiagramVerdict { violations }
}

/// Replaces one crossing by the chosen pair of parallel strands. The
/// crossing count drops by exactly one; newly closed circles are retained
/// as crossing-free loop components.
pub fn smooth(d: &Diagram, choice: SmoothingChoice) -> Result<Diagram, DiagramError> {
    let c = choice.crossing;
    if c >= d.crossings.len() {
        return Err(DiagramError::Parse(format!("no crossing {c}")));
    }
    let x = d.crossings[c].clone();
    let joins: [(usize, usize); 2] = match choice.mode {
        SmoothMode::A => [(0, 1), (2, 3)],
        SmoothMode::B => [(0, 3), (1, 2)],
    };
    // Union-find over arc ids; joining two ends of one arc closes a loop.
    fn find(parent: &mut BTreeMap<u32, u32>, a: u32) -> u32 {
        let p = *parent.get(&a).unwrap_or(&a);
        if p == a {
            a
        } else {
            let r = find(parent, p);
            parent.insert(a, r);
            r
        }
    }
    let mut parent: BTreeMap<u32, u32> = BTreeMap::new();
    let mut new_loops = 0;
    for (i, j) in joins {
        let (ra, rb) = (find(&mut parent, x.arcs[i]), find(&mut parent, x.arcs[j]));
        if ra == rb {
            new_loops += 1;
        } else {
            parent.insert(ra, rb);
        }
    }
    let mut crossings = Vec::with_capacity(d.crossings.len() - 1);
    for (i, y) in d.crossings.iter().enumerate() {
        if i == c {
            continue;
        }
        let mut arcs = y.arcs;
        for a in arcs.iter_mut() {
            *a = find(&mut parent, *a);
        }
        crossings.push(Crossing { arcs, over: y.over });
    }
    let mut out = Diagram {
        crossings,
        free_loops: d.free_loops + new_loops,
        alternating: false,
    };
    out.alternating = out.is_alternating();
    Ok(out)
}

/// Splits a diagram into its connected projection pieces; crossing-free
/// loops come last, one diagram each.
pub fn connected_components(d: &Diagram) -> Vec<Diagram> {
    let mut out = Vec::new();
    for piece in d.projection_components() {
        let keep: BTreeSet<usize> = piece.iter().copied().collect();
        let crossings: Vec<Crossing> = d
            .crossings
            .iter()
            .enumerate()
            .filter(|(i, _)| keep.contains(i))
            .map(|(_, x)| x.clone())
            .collect();
        let mut piece_d = Diagram {
            crossings,
            free_loops: 0,
            alternating: false,
        };
        piece_d.alternating = piece_d.is_alternating();
        out.push(piece_d);
    }
    for _ in 0..d.free_loops {
        out.push(Diagram::unknot());
    }
    out
}

const LOOP_CODE: u32 = u32::MAX;

/// Canonical code of a connected diagram under combinatorial planar-map
/// isomorphism preserving over/under, up to sphere symmetry and
/// reflection: the minimum breadth-first encoding over all root darts and
/// both rotation directions.
fn canonical_code(d: &Diagram) -> Vec<u32> {
    if d.crossings.is_empty() {
        return vec![LOOP_CODE];
    }
    let mate = d.mate_table().expect("canonical code needs a valid diagram");
    let n = d.crossings.len();
    let mut best: Option<Vec<u32>> = None;
    for root_c in 0..n {
        for root_s in 0..4 {
            for dir in [1usize, 3usize] {
                // dir 1 reads slots counterclockwise, dir 3 reflected.
                let mut id = vec![usize::MAX; n];
                let mut anchor = vec![0usize; n];
                let mut order = Vec::with_capacity(n);
                id[root_c] = 0;
                anchor[root_c] = root_s;
                order.push(root_c);
                let mut head = 0;
                while head < order.len() {
                    let c = order[head];
                    head += 1;
                    for k in 0..4 {
                        let s = (anchor[c] + dir * k) % 4;
                        let (mc, ms) = mate[c][s];
                        if id[mc] == usize::MAX {
                            id[mc] = order.len();
                            anchor[mc] = ms;
                            order.push(mc);
                        }
                    }
                }
                let mut code = Vec::with_capacity(n * 9 + 1);
                code.push(n as u32);
                for &c in &order {
                    // Over bit normalized by the anchor slot parity.
                    let over = (d.crossings[c].over as usize + anchor[c]) % 2;
                    code.push(over as u32);
                    for k in 0..4 {
                        let s = (anchor[c] + dir * k) % 4;
                        let (mc, ms) = mate[c][s];
                        let rel = if dir == 1 {
                            (ms + 4 - anchor[mc]) % 4
                        } else {
                            (anchor[mc] + 4 - ms) % 4
                        };
                        code.push(id[mc] as u32);
                        code.push(rel as u32);
                    }
                }
                if best.as_ref().map_or(true, |b| code < *b) {
                    best = Some(code);
                }
            }
        }
    }
    best.unwrap()
}

/// Sorted canonical codes of all connected components.
fn component_codes(d: &Diagram) -> Vec<Vec<u32>> {
    let mut codes: Vec<Vec<u32>> = connected_components(d).iter().map(canonical_code).collect();
    codes.sort();
    codes
}

/// True iff the diagrams are isomorphic planar maps with matching
/// over/under structure, up to sphere symmetry and reflection, component
/// by component.
pub fn diagrams_isomorphic(d1: &Diagram, d2: &Diagram) -> bool {
    component_codes(d1) == component_codes(d2)
}

const CONTAINS_BUDGET: usize = 12;

/// The diagram-level smoothing order: true iff some subset of crossings of
/// `d2` can be smoothed, each in one of its two modes, so that `d1` is a
/// connected component of the result. A disconnected `d1` must have every
/// piece matched by a distinct component. Exhaustive over subsets and
/// modes; diagrams beyond the crossing budget are rejected rather than
/// silently truncated.
pub fn diagram_contains(d1: &Diagram, d2: &Diagram) -> Result<bool, DiagramError> {
    for d in [d1, d2] {
        let verdict = validate_diagram(d);
        if !verdict.is_ok() {
            return Err(DiagramError::Invalid(verdict));
        }
        if !d.is_alternating() {
            return Err(DiagramError::NotAlternating);
        }
    }
    let c2 = d2.crossing_count();
    if c2 > CONTAINS_BUDGET {
        return Err(DiagramError::BudgetExceeded {
            got: c2,
            max: CONTAINS_BUDGET,
        });
    }
    let targets = component_codes(d1);
    let needed = d1.crossing_count();
    let mut seen_results: HashSet<Vec<u32>> = HashSet::new();

    for subset in 0u32..(1u32 << c2) {
        let k = subset.count_ones() as usize;
        if c2 - k < needed {
            continue;
        }
        let positions: Vec<usize> = (0..c2).filter(|i| subset >> i & 1 == 1).collect();
        for modes in 0u32..(1u32 << k) {
            let mut cur = d2.clone();
            // Smooth from the highest index down so indices stay stable.
            for (j, &pos) in positions.iter().enumerate().rev() {
                let mode = if modes >> j & 1 == 1 {
                    SmoothMode::B
                } else {
                    SmoothMode::A
                };
                cur = smooth(&cur, SmoothingChoice { crossing: pos, mode })
                    .expect("crossing indices are in range");
            }
            let mut codes = component_codes(&cur);
            let flat: Vec<u32> = codes.iter().flatten().copied().collect();
            if !seen_results.insert(flat) {
                continue;
            }
            // Multiset containment of the target codes.
            let mut matched = true;
            for t in &targets {
                if let Some(pos) = codes.iter().position(|c| c == t) {
                    codes.remove(pos);
                } else {
                    matched = false;
                    break;
                }
            }
            if matched {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Borromean-freeness of a diagram: the fixed Borromean diagram never
/// appears under the smoothing order.
pub fn brm_free(d: &Diagram) -> Result<bool, DiagramError> {
    Ok(!diagram_contains(&Diagram::borromean(), d)?)
}

/// Checkerboard coloring of the faces: colors in {0, 1} differing across
/// every arc. Exists for every valid connected diagram.
fn checkerboard(
    d: &Diagram,
    mate: &[[Dart; 4]],
) -> Option<(Vec<[usize; 4]>, Vec<u8>, usize)> {
    let (face_of, count) = d.faces(mate);
    let n = d.crossings.len();
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
    for c in 0..n {
        for s in 0..4 {
            let f = face_of[c][s];
            let (mc, ms) = mate[c][s];
            let other = face_of[mc][ms];
            adjacency[f].insert(other);
            adjacency[other].insert(f);
        }
    }
    let mut colors = vec![u8::MAX; count];
    for start in 0..count {
        if colors[start] != u8::MAX {
            continue;
        }
        colors[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            for &g in &adjacency[f] {
                if colors[g] == u8::MAX {
                    colors[g] = 1 - colors[f];
                    queue.push_back(g);
                } else if colors[g] == colors[f] {
                    return None;
                }
            }
        }
    }
    Some((face_of, colors, count))
}

/// Goeritz data: the full incidence matrix over the shaded regions (rows
/// sum to zero) and the reduced matrix with one region deleted.
pub struct GoeritzData {
    pub full: IntMatrix,
    pub reduced: IntMatrix,
}

/// Builds the Goeritz matrices for the given shading color and deleted
/// region index (into the shaded region list).
pub fn goeritz_matrix(d: &Diagram, shade: u8, delete: usize) -> Result<GoeritzData, DiagramError> {
    let mate = d
        .mate_table()
        .ok_or_else(|| DiagramError::Invalid(validate_diagram(d)))?;
    let (face_of, colors, count) =
        checkerboard(d, &mate).ok_or(DiagramError::NotRealizable)?;
    let shaded: Vec<usize> = (0..count).filter(|&f| colors[f] == shade).collect();
    let pos: BTreeMap<usize, usize> = shaded.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let k = shaded.len();
    let mut full = vec![BigInt::zero(); k * k];
    for (c, x) in d.crossings.iter().enumerate() {
        // The four corner faces in cyclic order; opposite corners share a
        // color, so the shaded pair is one of the two diagonals.
        let corners = face_of[c];
        let (pair, parity) = if colors[corners[0]] == shade {
            ((corners[0], corners[2]), 0u8)
        } else {
            ((corners[1], corners[3]), 1u8)
        };
        // Crossing type relative to the shading and the over strand; a
        // global flip of this convention negates the matrix and leaves the
        // determinant magnitude unchanged.
        let eta: i64 = if parity == x.over { 1 } else { -1 };
        let (fa, fb) = pair;
        if fa == fb {
            continue;
        }
        let (ia, ib) = (pos[&fa], pos[&fb]);
        full[ia * k + ib] -= BigInt::from(eta);
        full[ib * k + ia] -= BigInt::from(eta);
    }
    for i in 0..k {
        let mut diag = BigInt::zero();
        for j in 0..k {
            if j != i {
                diag -= &full[i * k + j];
            }
        }
        full[i * k + i] = diag;
    }
    let full = IntMatrix::raw(k, full);
    if delete >= k {
        return Err(DiagramError::Parse(format!(
            "cannot delete region {delete} of {k}"
        )));
    }
    let m = k - 1;
    let keep: Vec<usize> = (0..k).filter(|&i| i != delete).collect();
    let mut reduced = vec![BigInt::zero(); m * m];
    for (i, &oi) in keep.iter().enumerate() {
        for (j, &oj) in keep.iter().enumerate() {
            reduced[i * m + j] = full.get(oi, oj).clone();
        }
    }
    Ok(GoeritzData {
        full,
        reduced: IntMatrix::raw(m, reduced),
    })
}

/// |H1| of the branched double cover: the absolute determinant of a
/// reduced Goeritz matrix of a connected diagram. Zero means the cover is
/// not a rational homology sphere. The unknot gives 1 (empty matrix).
pub fn goeritz_h1(d: &Diagram) -> Result<BigUint, DiagramError> {
    let verdict = validate_diagram(d);
    if !verdict.is_ok() {
        return Err(DiagramError::Invalid(verdict));
    }
    let pieces = d.projection_components().len() + d.free_loops;
    if d.crossings.is_empty() {
        if d.free_loops == 1 {
            return Ok(BigUint::from(1u32));
        }
        return Err(DiagramError::Disconnected(pieces));
    }
    if pieces != 1 {
        return Err(DiagramError::Disconnected(pieces));
    }
    let data = goeritz_matrix(d, 0, 0)?;
    Ok(det_exact(&data.reduced).magnitude().clone())
}

/// All reduced Goeritz determinants over both colorings and every deleted
/// region; used to check well-definedness.
pub fn goeritz_h1_all_choices(d: &Diagram) -> Result<Vec<BigUint>, DiagramError> {
    let mut out = Vec::new();
    for shade in [0u8, 1u8] {
        let k = goeritz_matrix(d, shade, 0)?.full.g();
        for delete in 0..k {
            let data = goeritz_matrix(d, shade, delete)?;
            out.push(det_exact(&data.reduced).magnitude().clone());
        }
    }
    Ok(out)
}

/// Solves for over bits making the map alternating: along each strand the
/// passages alternate, a parity constraint between crossing over bits.
fn make_alternating(mut d: Diagram) -> Result<Diagram, DiagramError> {
    let mate = d
        .mate_table()
        .ok_or_else(|| DiagramError::Invalid(validate_diagram(&d)))?;
    let n = d.crossings.len();
    // over-ness of the passage entering slot s is (over == s mod 2), so
    // consecutive passages force over_c + over_c' = 1 + s + s' (mod 2).
    let mut assigned = vec![u8::MAX; n];
    for start in 0..n {
        if assigned[start] != u8::MAX {
            continue;
        }
        assigned[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for s in 0..4 {
                let (c2, s2) = d.next_passage(&mate, (c, s));
                let want = ((1 + s + s2 + assigned[c] as usize) % 2) as u8;
                if assigned[c2] == u8::MAX {
                    assigned[c2] = want;
                    queue.push_back(c2);
                } else if assigned[c2] != want {
                    return Err(DiagramError::NotRealizable);
                }
            }
        }
    }
    for (c, x) in d.crossings.iter_mut().enumerate() {
        x.over = assigned[c];
    }
    d.alternating = true;
    debug_assert!(d.is_alternating());
    Ok(d)
}

/// Closure of a braid word on `strands` strands: letter +i crosses
/// positions i and i+1 with one handedness, -i with the other. Over bits
/// are then solved to make the diagram alternating.
pub fn from_braid_closure(strands: usize, word: &[i32]) -> Result<Diagram, DiagramError> {
    assert!(strands >= 1);
    let mut next_arc: u32 = 0;
    let mut fresh = || {
        let a = next_arc;
        next_arc += 1;
        a
    };
    let start: Vec<u32> = (0..strands).map(|_| fresh()).collect();
    let mut cur = start.clone();
    let mut crossings = Vec::new();
    for &letter in word {
        let i = letter.unsigned_abs() as usize;
        if i == 0 || i >= strands {
            return Err(DiagramError::Parse(format!(
                "braid letter {letter} out of range for {strands} strands"
            )));
        }
        let (lo, hi) = (i - 1, i);
        let nw = fresh();
        let ne = fresh();
        // Counterclockwise from the southwest end: SW, SE, NE, NW.
        crossings.push(Crossing {
            arcs: [cur[lo], cur[hi], ne, nw],
            over: if letter > 0 { 0 } else { 1 },
        });
        cur[lo] = nw;
        cur[hi] = ne;
    }
    // Close the top back onto the bottom.
    fn resolve(rename: &BTreeMap<u32, u32>, mut a: u32) -> u32 {
        while let Some(&b) = rename.get(&a) {
            a = b;
        }
        a
    }
    let mut rename: BTreeMap<u32, u32> = BTreeMap::new();
    let mut free_loops = 0;
    for j in 0..strands {
        let top = resolve(&rename, cur[j]);
        let bottom = resolve(&rename, start[j]);
        if top == bottom {
            free_loops += 1;
        } else {
            rename.insert(top, bottom);
        }
    }
    for x in crossings.iter_mut() {
        for a in x.arcs.iter_mut() {
            *a = resolve(&rename, *a);
        }
    }
    make_alternating(Diagram {
        crossings,
        free_loops,
        alternating: false,
    })
}

/// Imports PD-code text: one `X[a,b,c,d]` entry per crossing, arcs listed
/// counterclockwise from the incoming under-strand (so the over strand is
/// the axis through the second and fourth entries).
pub fn from_pd_text(text: &str) -> Result<Diagram, DiagramError> {
    let mut crossings = Vec::new();
    for token in text.split(|ch: char| ch == '\n' || ch == ';') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let inner = token
            .strip_prefix("X[")
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| DiagramError::Parse(format!("expected X[a,b,c,d], got `{token}`")))?;
        let nums: Result<Vec<u32>, _> =
            inner.split(',').map(|s| s.trim().parse::<u32>()).collect();
        let nums = nums.map_err(|_| DiagramError::Parse(format!("bad arc ids in `{token}`")))?;
        if nums.len() != 4 {
            return Err(DiagramError::Parse(format!(
                "expected four arcs in `{token}`"
            )));
        }
        crossings.push(Crossing {
            arcs: [nums[0], nums[1], nums[2], nums[3]],
            over: 1,
        });
    }
    let mut d = Diagram {
        crossings,
        free_loops: 0,
        alternating: false,
    };
    d.alternating = d.is_alternating();
    Ok(d)
}

/// Builds the standard alternating twist-chain diagram of a weight vector:
/// twist regions of w_i crossings, alternately horizontal and vertical,
/// closed off at both ends. Its branched double cover matches the chain
/// surgery on the corresponding path.
pub fn twist_chain(weights: &[u64]) -> Result<Diagram, DiagramError> {
    if weights.is_empty() || weights.iter().any(|&w| w == 0) {
        return Err(DiagramError::NotIntegerPath(format!(
            "weights must be positive, got {weights:?}"
        )));
    }
    let mut next_arc: u32 = 0;
    let mut fresh = || {
        let a = next_arc;
        next_arc += 1;
        a
    };
    // Tangle state: the arc ids exposed at the four corners of the box.
    // Horizontal twists add an integer to the tangle fraction and vertical
    // twists add to its reciprocal, so the outermost (last) block must be
    // horizontal for the closure determinant to be the continuant of the
    // weights. The seed tangle matches the first block: two horizontal
    // strands before a horizontal block, two vertical strands otherwise.
    let m = weights.len();
    let first_horizontal = (m - 1) % 2 == 0;
    let (a0, a1) = (fresh(), fresh());
    let (nw, mut ne, mut sw, mut se) = if first_horizontal {
        (a0, a0, a1, a1)
    } else {
        (a0, a1, a0, a1)
    };
    let mut crossings: Vec<Crossing> = Vec::new();
    for (block, &w) in weights.iter().enumerate() {
        let horizontal = (m - 1 - block) % 2 == 0;
        for _ in 0..w {
            if horizontal {
                // Horizontal twist on the east side: consumes ne and se.
                let ne2 = fresh();
                let se2 = fresh();
                // Counterclockwise from the northwest end: NW, SW, SE, NE.
                crossings.push(Crossing {
                    arcs: [ne, se, se2, ne2],
                    over: 0,
                });
                ne = ne2;
                se = se2;
            } else {
                // Vertical twist on the south side: consumes sw and se.
                let sw2 = fresh();
                let se2 = fresh();
                crossings.push(Crossing {
                    arcs: [sw, sw2, se2, se],
                    over: 0,
                });
                sw = sw2;
                se = se2;
            }
        }
    }
    // Numerator closure: nw to ne and sw to se.
    fn resolve(rename: &BTreeMap<u32, u32>, mut a: u32) -> u32 {
        while let Some(&b) = rename.get(&a) {
            a = b;
        }
        a
    }
    let mut rename: BTreeMap<u32, u32> = BTreeMap::new();
    let mut free_loops = 0;
    for (x, y) in [(nw, ne), (sw, se)] {
        let (rx, ry) = (resolve(&rename, x), resolve(&rename, y));
        if rx == ry {
            free_loops += 1;
        } else {
            rename.insert(rx, ry);
        }
    }
    for x in crossings.iter_mut() {
        for a in x.arcs.iter_mut() {
            *a = resolve(&rename, *a);
        }
    }
    make_alternating(Diagram {
        crossings,
        free_loops,
        alternating: false,
    })
}

/// The alternating diagram whose branched double cover is the chain
/// surgery of an integer-weighted path: weights must be finite integers at
/// least 1 and the tree must be a single path.
pub fn chain_tree_to_diagram(tree: &AwTree) -> Result<Diagram, DiagramError> {
    let weights = path_weights(tree)?;
    twist_chain(&weights)
}

/// Extracts the ordered weight list of a path-shaped tree with integer
/// weights, or explains why it is not one.
fn path_weights(tree: &AwTree) -> Result<Vec<u64>, DiagramError> {
    use crate::contfrac::Slope;
    use num_traits::ToPrimitive;
    let n = tree.vertices.len();
    if n == 0 {
        return Err(DiagramError::NotIntegerPath("empty tree".into()));
    }
    let mut degree: BTreeMap<u32, usize> = tree.vertices.iter().map(|v| (v.id, 0)).collect();
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(a, b) in &tree.edges {
        for v in [a, b] {
            if !degree.contains_key(&v) {
                return Err(DiagramError::NotIntegerPath(format!(
                    "edge endpoint {v} missing"
                )));
            }
        }
        *degree.get_mut(&a).unwrap() += 1;
        *degree.get_mut(&b).unwrap() += 1;
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if tree.edges.len() + 1 != n || degree.values().any(|&d| d > 2) {
        return Err(DiagramError::NotIntegerPath(
            "tree must be a single path".into(),
        ));
    }
    let start = if n == 1 {
        tree.vertices[0].id
    } else {
        *degree
            .iter()
            .find(|(_, &deg)| deg == 1)
            .map(|(id, _)| id)
            .ok_or_else(|| DiagramError::NotIntegerPath("tree must be a single path".into()))?
    };
    let by_id: BTreeMap<u32, &crate::surgery::AwVertex> =
        tree.vertices.iter().map(|v| (v.id, v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut prev: Option<u32> = None;
    let mut cur = start;
    loop {
        order.push(cur);
        let next = adj
            .get(&cur)
            .into_iter()
            .flatten()
            .find(|&&x| Some(x) != prev)
            .copied();
        match next {
            Some(x) => {
                prev = Some(cur);
                cur = x;
            }
            None => break,
        }
        if order.len() > n {
            return Err(DiagramError::NotIntegerPath("cycle detected".into()));
        }
    }
    if order.len() != n {
        return Err(DiagramError::NotIntegerPath(
            "tree must be connected".into(),
        ));
    }
    order
        .iter()
        .map(|id| {
            let v = by_id[id];
            match &v.weight {
                Slope::Finite(w) if w.is_integer() && w.is_positive() => w
                    .to_integer()
                    .to_u64()
                    .ok_or_else(|| DiagramError::NotIntegerPath("weight too large".into())),
                other => Err(DiagramError::NotIntegerPath(format!(
                    "vertex {id} weight {other:?} is not a positive integer"
                ))),
            }
        })
        .collect()
}

/// Cross-module consistency: the Goeritz determinant of the chain diagram
/// next to the surgery homology order of the same path.
pub fn chain_cover_orders(tree: &AwTree) -> Result<(BigUint, H1Order), DiagramError> {
    let diagram = chain_tree_to_diagram(tree)?;
    let goeritz = goeritz_h1(&diagram)?;
    let link =
        tree_to_framed_link(tree).map_err(|e| DiagramError::NotIntegerPath(e.to_string()))?;
    Ok((goeritz, h1_order(&link)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::Slope;
    use crate::surgery::AwVertex;

    #[test]
    fn fixtures_are_valid_and_alternating() {
        for (name, d, comps) in [
            ("hopf", Diagram::hopf(), 2),
            ("trefoil", Diagram::trefoil(), 1),
            ("borromean", Diagram::borromean(), 3),
        ] {
            let verdict = validate_diagram(&d);
            assert!(verdict.is_ok(), "{name}: {verdict}");
            assert!(d.is_alternating(), "{name} must alternate");
            assert_eq!(d.component_count(), comps, "{name} component count");
        }
        assert_eq!(Diagram::borromean().crossing_count(), 6);
        assert!(validate_diagram(&Diagram::unknot()).is_ok());
    }

    #[test]
    fn validation_catches_bad_arcs() {
        let bad = Diagram {
            crossings: vec![Crossing {
                arcs: [0, 1, 2, 3],
                over: 0,
            }],
            free_loops: 0,
            alternating: false,
        };
        let verdict = validate_diagram(&bad);
        assert!(!verdict.is_ok());
        assert!(verdict
            .violations
            .iter()
            .any(|v| matches!(v, DiagramViolation::ArcCount { .. })));
    }

    #[test]
    fn smooth_trefoil_both_modes() {
        let t = Diagram::trefoil();
        let mut comps = BTreeSet::new();
        for mode in [SmoothMode::A, SmoothMode::B] {
            let s = smooth(&t, SmoothingChoice { crossing: 0, mode }).unwrap();
            assert_eq!(s.crossing_count(), 2);
            assert!(validate_diagram(&s).is_ok(), "{}", validate_diagram(&s));
            comps.insert(s.component_count());
        }
        // One resolution gives the 2-component Hopf diagram, the other a
        // 1-component unknot diagram with two crossings.
        assert_eq!(comps, BTreeSet::from([1, 2]));
    }

    #[test]
    fn smooth_decrements_and_validates() {
        let b = Diagram::borromean();
        for c in 0..b.crossing_count() {
            for mode in [SmoothMode::A, SmoothMode::B] {
                let s = smooth(&b, SmoothingChoice { crossing: c, mode }).unwrap();
                assert_eq!(s.crossing_count(), b.crossing_count() - 1);
                assert!(validate_diagram(&s).is_ok());
            }
        }
    }

    #[test]
    fn components_split() {
        let mut both = Diagram::trefoil();
        let hopf = Diagram::hopf();
        let offset = 100;
        for x in &hopf.crossings {
            both.crossings.push(Crossing {
                arcs: [
                    x.arcs[0] + offset,
                    x.arcs[1] + offset,
                    x.arcs[2] + offset,
                    x.arcs[3] + offset,
                ],
                over: x.over,
            });
        }
        let pieces = connected_components(&both);
        assert_eq!(pieces.len(), 2);
        assert!(connected_components(&Diagram::empty()).is_empty());
        assert_eq!(connected_components(&Diagram::trefoil()).len(), 1);
    }

    #[test]
    fn isomorphism_basics() {
        assert!(diagrams_isomorphic(&Diagram::trefoil(), &Diagram::trefoil()));
        assert!(!diagrams_isomorphic(&Diagram::trefoil(), &Diagram::hopf()));
        let t = Diagram::trefoil();
        let relabeled = Diagram {
            crossings: t
                .crossings
                .iter()
                .map(|x| Crossing {
                    arcs: [x.arcs[0] + 7, x.arcs[1] + 7, x.arcs[2] + 7, x.arcs[3] + 7],
                    over: x.over,
                })
                .collect(),
            free_loops: 0,
            alternating: t.alternating,
        };
        assert!(diagrams_isomorphic(&t, &relabeled));
    }

    #[test]
    fn containment_examples() {
        assert!(diagram_contains(&Diagram::hopf(), &Diagram::trefoil()).unwrap());
        assert!(!diagram_contains(&Diagram::trefoil(), &Diagram::hopf()).unwrap());
        let t = Diagram::trefoil();
        assert!(diagram_contains(&t, &t).unwrap());
        assert!(!brm_free(&Diagram::borromean()).unwrap());
        assert!(brm_free(&Diagram::trefoil()).unwrap());
    }

    #[test]
    fn two_bridge_chains_are_borromean_free() {
        for weights in [vec![2u64, 2], vec![3, 2], vec![2, 3, 2]] {
            let d = twist_chain(&weights).unwrap();
            assert!(brm_free(&d).unwrap(), "chain {weights:?}");
        }
    }

    #[test]
    fn containment_with_crossing_free_targets() {
        // Fully smoothing a diagram leaves circle components, so the
        // unknot diagram sits below everything nonempty.
        assert!(diagram_contains(&Diagram::unknot(), &Diagram::trefoil()).unwrap());
        assert!(diagram_contains(&Diagram::unknot(), &Diagram::unknot()).unwrap());
        // A two-component unlink needs two distinct circle components.
        let unlink = Diagram {
            crossings: Vec::new(),
            free_loops: 2,
            alternating: true,
        };
        assert!(diagram_contains(&unlink, &Diagram::trefoil()).unwrap());
        assert!(diagram_contains(&unlink, &unlink).unwrap());
        assert!(!diagram_contains(&unlink, &Diagram::unknot()).unwrap());
    }

    #[test]
    fn one_crossing_curl_smooths_cleanly() {
        // A single kink: one crossing whose arcs pair up at the crossing.
        let curl = Diagram {
            crossings: vec![Crossing {
                arcs: [0, 0, 1, 1],
                over: 0,
            }],
            free_loops: 0,
            alternating: true,
        };
        assert!(validate_diagram(&curl).is_ok(), "{}", validate_diagram(&curl));
        assert_eq!(curl.component_count(), 1);
        let mut loops = BTreeSet::new();
        for mode in [SmoothMode::A, SmoothMode::B] {
            let s = smooth(&curl, SmoothingChoice { crossing: 0, mode }).unwrap();
            assert_eq!(s.crossing_count(), 0);
            assert!(validate_diagram(&s).is_ok());
            loops.insert(s.free_loops);
        }
        // One resolution splits the kink into two circles, the other
        // merges it into one.
        assert_eq!(loops, BTreeSet::from([1, 2]));
    }

    #[test]
    fn braid_closure_counts_idle_strands() {
        let d = from_braid_closure(3, &[1, 1]).unwrap();
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.free_loops, 1, "the untouched strand closes alone");
        assert_eq!(d.component_count(), 3);
        assert!(validate_diagram(&d).is_ok());
    }

    #[test]
    fn goeritz_examples() {
        assert_eq!(goeritz_h1(&Diagram::unknot()).unwrap(), BigUint::from(1u32));
        assert_eq!(goeritz_h1(&Diagram::hopf()).unwrap(), BigUint::from(2u32));
        assert_eq!(goeritz_h1(&Diagram::trefoil()).unwrap(), BigUint::from(3u32));
        // Branched double cover of the Borromean rings is the
        // Hantzsche-Wendt flat manifold, with first homology of order 16.
        assert_eq!(
            goeritz_h1(&Diagram::borromean()).unwrap(),
            BigUint::from(16u32)
        );
    }

    #[test]
    fn goeritz_choice_invariance() {
        for d in [Diagram::hopf(), Diagram::trefoil(), Diagram::borromean()] {
            let all = goeritz_h1_all_choices(&d).unwrap();
            let first = all[0].clone();
            assert!(all.iter().all(|x| *x == first), "choices disagree: {all:?}");
        }
    }

    #[test]
    fn goeritz_full_matrix_rows_sum_to_zero() {
        for d in [
            Diagram::hopf(),
            Diagram::trefoil(),
            Diagram::borromean(),
            twist_chain(&[3, 2, 4]).unwrap(),
        ] {
            for shade in [0u8, 1u8] {
                let full = goeritz_matrix(&d, shade, 0).unwrap().full;
                for i in 0..full.g() {
                    let sum: BigInt = (0..full.g()).map(|j| full.get(i, j).clone()).sum();
                    assert!(sum.is_zero(), "row {i} sums to {sum}");
                }
            }
        }
    }

    fn path(weights: &[i64]) -> AwTree {
        AwTree {
            vertices: weights
                .iter()
                .enumerate()
                .map(|(i, &w)| AwVertex {
                    id: i as u32,
                    sign: if i % 2 == 0 { 1 } else { -1 },
                    weight: Slope::from_int(w),
                })
                .collect(),
            edges: (1..weights.len())
                .map(|i| ((i - 1) as u32, i as u32))
                .collect(),
        }
    }

    #[test]
    fn chain_tree_examples() {
        let (g, h) = chain_cover_orders(&path(&[2])).unwrap();
        assert_eq!(g, BigUint::from(2u32));
        assert_eq!(h, H1Order::Finite(BigUint::from(2u32)));

        let (g, h) = chain_cover_orders(&path(&[2, 2])).unwrap();
        assert_eq!(g, BigUint::from(5u32));
        assert_eq!(h, H1Order::Finite(BigUint::from(5u32)));

        let (g, h) = chain_cover_orders(&path(&[3])).unwrap();
        assert_eq!(g, BigUint::from(3u32));
        assert_eq!(h, H1Order::Finite(BigUint::from(3u32)));
    }

    #[test]
    fn chain_tree_rejects_non_paths() {
        let star = AwTree {
            vertices: (0..4)
                .map(|i| AwVertex {
                    id: i,
                    sign: if i == 0 { 1 } else { -1 },
                    weight: Slope::from_int(2),
                })
                .collect(),
            edges: vec![(0, 1), (0, 2), (0, 3)],
        };
        assert!(chain_tree_to_diagram(&star).is_err());
        let halfweight = AwTree {
            vertices: vec![AwVertex {
                id: 0,
                sign: 1,
                weight: Slope::from_frac(3, 2),
            }],
            edges: vec![],
        };
        assert!(chain_tree_to_diagram(&halfweight).is_err());
    }

    #[test]
    fn pd_text_import() {
        let t = from_pd_text("X[1,4,2,5]\nX[3,6,4,1]\nX[5,2,6,3]").unwrap();
        assert_eq!(t.crossing_count(), 3);
        assert!(validate_diagram(&t).is_ok(), "{}", validate_diagram(&t));
        assert!(t.is_alternating());
        assert!(diagrams_isomorphic(&t, &Diagram::trefoil()));
    }

    #[test]
    fn goeritz_errors_on_disconnected() {
        let mut two = Diagram::trefoil();
        two.free_loops = 1;
        assert!(matches!(
            goeritz_h1(&two),
            Err(DiagramError::Disconnected(2))
        ));
    }

    #[test]
    fn diagram_json_roundtrip() {
        let d = Diagram::trefoil();
        let json = serde_json::to_string(&d).unwrap();
        let back: Diagram = serde_json::from_str(&json).unwrap();
        assert_eq!(d, back);
        // The free_loops field is optional on input.
        let text = r#"{"crossings":[],"alternating":true}"#;
        let parsed: Diagram = serde_json::from_str(text).unwrap();
        assert_eq!(parsed.free_loops, 0);
    }
}
