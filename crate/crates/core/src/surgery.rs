//! Alternatingly weighted trees, framed links, first homology via surgery
//! presentation matrices, blow-ups and the slope reduction recursion for
//! the genus-three framed link families.

use crate::contfrac::{self, ContFracError, PosRational, Slope};
use crate::signmat::{det_exact, IntMatrix};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurgeryError {
    #[error("invalid alternatingly weighted tree: {0}")]
    InvalidTree(TreeVerdict),
    #[error("link has an infinite framing; erase it first")]
    InfiniteFraming,
    #[error("no edge between components {0} and {1}")]
    UnknownEdge(u32, u32),
    #[error("blow-up precondition failed: {0}")]
    BlowUpPrecondition(String),
    #[error("slope invariant violated: {0}")]
    SlopeInvariant(String),
    #[error("duplicate component id {0}")]
    DuplicateComponent(u32),
    #[error("link entry references missing component {0}")]
    MissingComponent(u32),
    #[error("bad link entry between {0} and {1}: {2}")]
    BadLinkEntry(u32, u32, String),
    #[error("reduction chain search failed: {0}")]
    ReductionSearch(String),
    #[error(transparent)]
    ContFrac(#[from] ContFracError),
}

// ---------------------------------------------------------------------------
// Alternatingly weighted trees
// ---------------------------------------------------------------------------

/// A vertex of an alternatingly weighted forest. The weight is a
/// nonnegative rational or infinity; the sign is recorded separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AwVertex {
    pub id: u32,
    pub sign: i8,
    pub weight: Slope,
}

/// A forest with a proper sign 2-coloring and nonnegative weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AwTree {
    pub vertices: Vec<AwVertex>,
    pub edges: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    DuplicateId(u32),
    BadSign(u32),
    NegativeWeight(u32),
    UnknownEndpoint(u32),
    SelfLoop(u32),
    MultiEdge(u32, u32),
    NotForest,
    NotAlternating(u32, u32),
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::DuplicateId(v) => write!(f, "duplicate vertex id {v}"),
            TreeViolation::BadSign(v) => write!(f, "vertex {v} sign must be +1 or -1"),
            TreeViolation::NegativeWeight(v) => write!(f, "vertex {v} weight must be >= 0"),
            TreeViolation::UnknownEndpoint(v) => write!(f, "edge endpoint {v} is not a vertex"),
            TreeViolation::SelfLoop(v) => write!(f, "self loop at vertex {v}"),
            TreeViolation::MultiEdge(a, b) => write!(f, "repeated edge ({a},{b})"),
            TreeViolation::NotForest => write!(f, "forest: underlying graph has a cycle"),
            TreeViolation::NotAlternating(a, b) => {
                write!(f, "alternating: edge ({a},{b}) joins equal signs")
            }
        }
    }
}

/// Validation result; empty violations means the tree is admissible.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeVerdict {
    pub violations: Vec<TreeViolation>,
}

impl TreeVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for TreeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "ok")
        } else {
            let items: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            write!(f, "invalid: {}", items.join("; "))
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if x and y were already connected.
    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx] = ry;
        true
    }
}

/// Checks the forest, alternating-sign and weight-domain clauses; the
/// verdict lists every violated clause.
pub fn validate_awtree(tree: &AwTree) -> TreeVerdict {
    let mut violations = Vec::new();
    let mut index: BTreeMap<u32, usize> = BTreeMap::new();
    for (i, v) in tree.vertices.iter().enumerate() {
        if index.insert(v.id, i).is_some() {
            violations.push(TreeViolation::DuplicateId(v.id));
        }
        if v.sign != 1 && v.sign != -1 {
            violations.push(TreeViolation::BadSign(v.id));
        }
        if let Slope::Finite(w) = &v.weight {
            if w.is_negative() {
                violations.push(TreeViolation::NegativeWeight(v.id));
            }
        }
    }
    let mut uf = UnionFind::new(tree.vertices.len());
    let mut seen_edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut forest_broken = false;
    for &(a, b) in &tree.edges {
        if a == b {
            violations.push(TreeViolation::SelfLoop(a));
            forest_broken = true;
            continue;
        }
        let key = (a.min(b), a.max(b));
        if !seen_edges.insert(key) {
            violations.push(TreeViolation::MultiEdge(key.0, key.1));
            forest_broken = true;
            continue;
        }
        let (ia, ib) = match (index.get(&a), index.get(&b)) {
            (Some(&ia), Some(&ib)) => (ia, ib),
            _ => {
                for v in [a, b] {
                    if !index.contains_key(&v) {
                        violations.push(TreeViolation::UnknownEndpoint(v));
                    }
                }
                continue;
            }
        };
        if !uf.union(ia, ib) {
            forest_broken = true;
        }
        if tree.vertices[ia].sign == tree.vertices[ib].sign {
            violations.push(TreeViolation::NotAlternating(a, b));
        }
    }
    if forest_broken {
        violations.push(TreeViolation::NotForest);
    }
    TreeVerdict { violations }
}

// ---------------------------------------------------------------------------
// Framed links
// ---------------------------------------------------------------------------

/// An unknotted surgery component with an exact rational or infinite
/// framing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramedComponent {
    pub id: u32,
    pub framing: Slope,
}

/// One linking entry between two components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkEdge {
    pub a: u32,
    pub b: u32,
    pub lk: i64,
}

/// A framed link: components with exact framings and pairwise linking
/// numbers. At most one entry per unordered pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramedLink {
    pub components: Vec<FramedComponent>,
    pub links: Vec<LinkEdge>,
}

impl FramedLink {
    pub fn new(
        components: Vec<FramedComponent>,
        links: Vec<LinkEdge>,
    ) -> Result<Self, SurgeryError> {
        let mut ids = BTreeSet::new();
        for c in &components {
            if !ids.insert(c.id) {
                return Err(SurgeryError::DuplicateComponent(c.id));
            }
        }
        let mut pairs = BTreeSet::new();
        for e in &links {
            if e.a == e.b {
                return Err(SurgeryError::BadLinkEntry(e.a, e.b, "self loop".into()));
            }
            if e.lk == 0 {
                return Err(SurgeryError::BadLinkEntry(
                    e.a,
                    e.b,
                    "linking number must be nonzero".into(),
                ));
            }
            for v in [e.a, e.b] {
                if !ids.contains(&v) {
                    return Err(SurgeryError::MissingComponent(v));
                }
            }
            if !pairs.insert((e.a.min(e.b), e.a.max(e.b))) {
                return Err(SurgeryError::BadLinkEntry(e.a, e.b, "repeated pair".into()));
            }
        }
        Ok(FramedLink { components, links })
    }

    pub fn empty() -> Self {
        FramedLink {
            components: Vec::new(),
            links: Vec::new(),
        }
    }

    pub fn component(&self, id: u32) -> Option<&FramedComponent> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn framing(&self, id: u32) -> Option<&Slope> {
        self.component(id).map(|c| &c.framing)
    }

    fn max_id(&self) -> u32 {
        self.components.iter().map(|c| c.id).max().unwrap_or(0)
    }

    /// True iff the underlying graph is a simple forest.
    pub fn is_forest(&self) -> bool {
        let index: BTreeMap<u32, usize> = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id, i))
            .collect();
        let mut uf = UnionFind::new(self.components.len());
        let mut pairs = BTreeSet::new();
        for e in &self.links {
            if e.a == e.b || !pairs.insert((e.a.min(e.b), e.a.max(e.b))) {
                return false;
            }
            let (Some(&ia), Some(&ib)) = (index.get(&e.a), index.get(&e.b)) else {
                return false;
            };
            if !uf.union(ia, ib) {
                return false;
            }
        }
        true
    }
}

/// Removes every infinitely framed component together with its incident
/// link entries. Idempotent.
pub fn erase_infinity(link: &FramedLink) -> FramedLink {
    let dropped: BTreeSet<u32> = link
        .components
        .iter()
        .filter(|c| c.framing.is_infinite())
        .map(|c| c.id)
        .collect();
    FramedLink {
        components: link
            .components
            .iter()
            .filter(|c| !dropped.contains(&c.id))
            .cloned()
            .collect(),
        links: link
            .links
            .iter()
            .filter(|e| !dropped.contains(&e.a) && !dropped.contains(&e.b))
            .cloned()
            .collect(),
    }
}

/// The integer surgery presentation: row i has diagonal p_i and entries
/// q_i * lk(i, j) off the diagonal, where the framing of component i is
/// p_i / q_i in lowest terms (framing 0 gives p = 0, q = 1).
///
/// Components are ordered by id. Infinite framings are rejected.
pub fn presentation_matrix(link: &FramedLink) -> Result<IntMatrix, SurgeryError> {
    let mut ordered: Vec<&FramedComponent> = link.components.iter().collect();
    ordered.sort_by_key(|c| c.id);
    let n = ordered.len();
    let index: BTreeMap<u32, usize> =
        ordered.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
    let mut entries = vec![BigInt::zero(); n * n];
    for (i, c) in ordered.iter().enumerate() {
        let r = c.framing.as_finite().ok_or(SurgeryError::InfiniteFraming)?;
        entries[i * n + i] = r.numer().clone();
    }
    for e in &link.links {
        let ia = index[&e.a];
        let ib = index[&e.b];
        let qa = ordered[ia]
            .framing
            .as_finite()
            .ok_or(SurgeryError::InfiniteFraming)?
            .denom()
            .clone();
        let qb = ordered[ib]
            .framing
            .as_finite()
            .ok_or(SurgeryError::InfiniteFraming)?
            .denom()
            .clone();
        entries[ia * n + ib] = qa * BigInt::from(e.lk);
        entries[ib * n + ia] = qb * BigInt::from(e.lk);
    }
    Ok(IntMatrix::raw(n, entries))
}

/// Order of the first homology group presented by a framed link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum H1Order {
    Finite(BigUint),
    Infinite,
}

impl fmt::Display for H1Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            H1Order::Finite(n) => write!(f, "{n}"),
            H1Order::Infinite => write!(f, "infinite"),
        }
    }
}

/// |det| of the presentation matrix after erasing infinite framings;
/// determinant zero is reported as infinite first homology.
///
/// Forest-shaped links are evaluated by exact leaf elimination, linear in
/// the number of components; anything else falls back to fraction-free
/// elimination on the full matrix. Both routes are exact.
pub fn h1_order(link: &FramedLink) -> H1Order {
    let link = erase_infinity(link);
    if link.components.is_empty() {
        return H1Order::Finite(BigUint::one());
    }
    let det = if link.is_forest() {
        forest_det(&link)
    } else {
        det_exact(&presentation_matrix(&link).expect("infinities already erased"))
    };
    if det.is_zero() {
        H1Order::Infinite
    } else {
        H1Order::Finite(det.magnitude().clone())
    }
}

/// Exact determinant of a forest presentation by repeated leaf elimination
/// (Schur complement on 1x1 pivots), in rational arithmetic.
fn forest_det(link: &FramedLink) -> BigInt {
    let ids: Vec<u32> = {
        let mut v: Vec<u32> = link.components.iter().map(|c| c.id).collect();
        v.sort_unstable();
        v
    };
    let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let n = ids.len();
    let mut diag: Vec<BigRational> = vec![BigRational::zero(); n];
    let mut scale: Vec<BigInt> = vec![BigInt::one(); n];
    for c in &link.components {
        let r = c
            .framing
            .as_finite()
            .expect("forest determinant needs finite framings");
        let i = index[&c.id];
        diag[i] = BigRational::from(r.numer().clone());
        scale[i] = r.denom().clone();
    }
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for e in &link.links {
        let (ia, ib) = (index[&e.a], index[&e.b]);
        adj[ia].push((ib, e.lk));
        adj[ib].push((ia, e.lk));
    }
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut det = BigRational::one();
    let mut queue: Vec<usize> = (0..n).filter(|&i| degree[i] <= 1).collect();
    let mut processed = 0usize;
    while let Some(v) = queue.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        processed += 1;
        let neighbor = adj[v].iter().find(|&&(u, _)| alive[u]).copied();
        match neighbor {
            None => {
                det *= &diag[v];
                if det.is_zero() {
                    return BigInt::zero();
                }
            }
            Some((u, lk)) => {
                let coupling = BigRational::from(&scale[v] * &scale[u] * lk * lk);
                if diag[v].is_zero() {
                    // Zero pivot on a leaf: expand through the single
                    // coupling, removing both endpoints.
                    det *= -coupling;
                    alive[u] = false;
                    processed += 1;
                    for &(w, _) in &adj[u] {
                        if alive[w] {
                            degree[w] -= 1;
                            if degree[w] <= 1 {
                                queue.push(w);
                            }
                        }
                    }
                } else {
                    det *= &diag[v];
                    let delta = coupling / &diag[v];
                    diag[u] -= delta;
                    degree[u] -= 1;
                    if degree[u] <= 1 {
                        queue.push(u);
                    }
                }
            }
        }
    }
    debug_assert_eq!(processed, n, "forest elimination must consume every vertex");
    debug_assert!(det.is_integer(), "forest determinant must be an integer");
    det.to_integer()
}

/// Replaces the edge (a, b) carrying linking number +-1 between components
/// framed 1 + r1 and 1 + r2 by the chain r1 -- (-1) -- r2: both endpoints
/// lose 1 from their framing and a new (-1)-framed component is inserted
/// with linking number +1 to each. Preserves h1_order.
pub fn blow_up_pair(link: &FramedLink, edge: (u32, u32)) -> Result<FramedLink, SurgeryError> {
    let (a, b) = edge;
    let pos = link
        .links
        .iter()
        .position(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
        .ok_or(SurgeryError::UnknownEdge(a, b))?;
    if link.links[pos].lk.abs() != 1 {
        return Err(SurgeryError::BlowUpPrecondition(format!(
            "edge ({a},{b}) must have linking number +-1, got {}",
            link.links[pos].lk
        )));
    }
    for id in [a, b] {
        if link
            .framing(id)
            .ok_or(SurgeryError::MissingComponent(id))?
            .is_infinite()
        {
            return Err(SurgeryError::BlowUpPrecondition(format!(
                "component {id} must have a finite framing of the form 1 + r"
            )));
        }
    }
    let one = BigRational::one();
    let mut components = link.components.clone();
    for c in components.iter_mut() {
        if c.id == a || c.id == b {
            let r = c.framing.as_finite().unwrap().clone();
            c.framing = Slope::Finite(r - &one);
        }
    }
    let new_id = link.max_id() + 1;
    components.push(FramedComponent {
        id: new_id,
        framing: Slope::from_int(-1),
    });
    let mut links = link.links.clone();
    links.remove(pos);
    links.push(LinkEdge { a, b: new_id, lk: 1 });
    links.push(LinkEdge {
        a: new_id,
        b,
        lk: 1,
    });
    FramedLink::new(components, links)
}

/// Maps each vertex to an unknot framed by sign * weight and each edge to
/// linking number +1. The input must validate.
pub fn tree_to_framed_link(tree: &AwTree) -> Result<FramedLink, SurgeryError> {
    let verdict = validate_awtree(tree);
    if !verdict.is_ok() {
        return Err(SurgeryError::InvalidTree(verdict));
    }
    let components = tree
        .vertices
        .iter()
        .map(|v| {
            let framing = match &v.weight {
                Slope::Infinity => Slope::Infinity,
                Slope::Finite(w) => {
                    let signed = if v.sign >= 0 { w.clone() } else { -w.clone() };
                    Slope::Finite(signed)
                }
            };
            FramedComponent { id: v.id, framing }
        })
        .collect();
    let links = tree
        .edges
        .iter()
        .map(|&(a, b)| LinkEdge { a, b, lk: 1 })
        .collect();
    FramedLink::new(components, links)
}

/// True iff the link graph is a simple forest with all linking numbers +-1
/// and framing signs alternating along every edge. Zero-framed and
/// infinitely framed vertices may take either sign.
pub fn is_alternating_weighted(link: &FramedLink) -> bool {
    if link.links.iter().any(|e| e.lk.abs() != 1) {
        return false;
    }
    if !link.is_forest() {
        return false;
    }
    for e in &link.links {
        let sa = link.framing(e.a).and_then(|s| s.signum()).unwrap_or(0);
        let sb = link.framing(e.b).and_then(|s| s.signum()).unwrap_or(0);
        if sa != 0 && sb != 0 && sa == sb {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Gamma sequences
// ---------------------------------------------------------------------------

/// Which strand family leads the intersection sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaKind {
    NLeading,
    MLeading,
}

/// The intersection count sequence along a handle boundary, together with
/// the required constant values for the interleaved family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaSequence {
    pub kind: GammaKind,
    pub entries: Vec<u64>,
    pub n0: u64,
    pub m0: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GammaViolation {
    Empty,
    ZeroEntry(usize),
    EvenLength,
    InterleavedMismatch {
        index: usize,
        expected: u64,
        got: u64,
    },
    EndpointsDiffer {
        first: u64,
        last: u64,
    },
}

impl fmt::Display for GammaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaViolation::Empty => write!(f, "sequence is empty"),
            GammaViolation::ZeroEntry(i) => write!(f, "entry {i} is zero"),
            GammaViolation::EvenLength => write!(f, "sequence must have odd length"),
            GammaViolation::InterleavedMismatch {
                index,
                expected,
                got,
            } => write!(
                f,
                "interleaved entry {index} must equal {expected}, got {got}"
            ),
            GammaViolation::EndpointsDiffer { first, last } => {
                write!(f, "endpoints must agree, got {first} and {last}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GammaVerdict {
    pub violations: Vec<GammaViolation>,
}

impl GammaVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for GammaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "ok")
        } else {
            let items: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            write!(f, "invalid: {}", items.join("; "))
        }
    }
}

/// Checks the admissible forms: odd length, interleaved entries constant
/// (equal to m0 for an n-leading sequence, n0 for an m-leading one), and
/// equal endpoints. A single entry is vacuously admissible.
pub fn validate_gamma_sequence(x: &GammaSequence) -> GammaVerdict {
    let mut violations = Vec::new();
    if x.entries.is_empty() {
        violations.push(GammaViolation::Empty);
        return GammaVerdict { violations };
    }
    for (i, &e) in x.entries.iter().enumerate() {
        if e == 0 {
            violations.push(GammaViolation::ZeroEntry(i));
        }
    }
    if x.entries.len() % 2 == 0 {
        violations.push(GammaViolation::EvenLength);
    }
    let expected = match x.kind {
        GammaKind::NLeading => x.m0,
        GammaKind::MLeading => x.n0,
    };
    for (i, &e) in x.entries.iter().enumerate().skip(1).step_by(2) {
        if e != expected {
            violations.push(GammaViolation::InterleavedMismatch {
                index: i,
                expected,
                got: e,
            });
        }
    }
    let first = x.entries[0];
    let last = *x.entries.last().unwrap();
    if first != last {
        violations.push(GammaViolation::EndpointsDiffer { first, last });
    }
    GammaVerdict { violations }
}

// ---------------------------------------------------------------------------
// Genus-two slope families
// ---------------------------------------------------------------------------

/// The two genus-two chain families: one or two auxiliary components
/// between the pair of knot components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind2 {
    /// Chain K1 -- C1 -- K2 with a positive auxiliary slope above 2.
    I,
    /// Chain K1 -- C1 -- C2 -- K2 with one positive and one negative
    /// auxiliary slope, both of magnitude above 1.
    II,
}

/// Named slopes for a genus-two chain build.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeSet2 {
    pub kind: Kind2,
    pub r_alpha: Vec<Slope>,
    pub r_beta: Vec<Slope>,
}

fn require_gt(s: &Slope, bound: i64, name: &str, allow_infinity: bool) -> Result<(), SurgeryError> {
    match s {
        Slope::Infinity if allow_infinity => Ok(()),
        Slope::Infinity => Err(SurgeryError::SlopeInvariant(format!(
            "{name} must be finite"
        ))),
        Slope::Finite(r) => {
            if *r > BigRational::from(BigInt::from(bound)) {
                Ok(())
            } else {
                Err(SurgeryError::SlopeInvariant(format!(
                    "{name} must exceed {bound}, got {r}"
                )))
            }
        }
    }
}

fn require_lt(s: &Slope, bound: i64, name: &str, allow_infinity: bool) -> Result<(), SurgeryError> {
    match s {
        Slope::Infinity if allow_infinity => Ok(()),
        Slope::Infinity => Err(SurgeryError::SlopeInvariant(format!(
            "{name} must be finite"
        ))),
        Slope::Finite(r) => {
            if *r < BigRational::from(BigInt::from(bound)) {
                Ok(())
            } else {
                Err(SurgeryError::SlopeInvariant(format!(
                    "{name} must be below {bound}, got {r}"
                )))
            }
        }
    }
}

impl SlopeSet2 {
    pub fn validate(&self) -> Result<(), SurgeryError> {
        if self.r_beta.len() != 2 {
            return Err(SurgeryError::SlopeInvariant(
                "need exactly two beta slopes".into(),
            ));
        }
        match self.kind {
            Kind2::I => {
                if self.r_alpha.len() != 1 {
                    return Err(SurgeryError::SlopeInvariant(
                        "this family needs exactly one alpha slope".into(),
                    ));
                }
                require_gt(&self.r_alpha[0], 2, "r_alpha1", false)?;
                require_gt(&self.r_beta[0], 1, "r_beta1", true)?;
                require_gt(&self.r_beta[1], 1, "r_beta2", true)?;
            }
            Kind2::II => {
                if self.r_alpha.len() != 2 {
                    return Err(SurgeryError::SlopeInvariant(
                        "this family needs exactly two alpha slopes".into(),
                    ));
                }
                require_gt(&self.r_alpha[0], 1, "r_alpha1", false)?;
                require_lt(&self.r_alpha[1], -1, "r_alpha2", false)?;
                require_gt(&self.r_beta[0], 1, "r_beta1", true)?;
                require_lt(&self.r_beta[1], -1, "r_beta2", true)?;
            }
        }
        Ok(())
    }
}

/// Builds the genus-two surgery chain K1 -- C... -- K2 with linking
/// numbers +1, then erases infinite framings, so a slope set with infinite
/// beta slopes collapses onto the auxiliary components.
pub fn build_type2(slopes: &SlopeSet2) -> Result<FramedLink, SurgeryError> {
    slopes.validate()?;
    let mut framings: Vec<Slope> = Vec::new();
    framings.push(slopes.r_beta[0].clone());
    framings.extend(slopes.r_alpha.iter().cloned());
    framings.push(slopes.r_beta[1].clone());
    let components: Vec<FramedComponent> = framings
        .into_iter()
        .enumerate()
        .map(|(i, framing)| FramedComponent {
            id: i as u32,
            framing,
        })
        .collect();
    let links = (0..components.len() - 1)
        .map(|i| LinkEdge {
            a: i as u32,
            b: (i + 1) as u32,
            lk: 1,
        })
        .collect();
    Ok(erase_infinity(&FramedLink::new(components, links)?))
}

// ---------------------------------------------------------------------------
// Genus-three framed link families and the slope reduction
// ---------------------------------------------------------------------------

/// The two genus-three families. They differ in the sign of the residual
/// chain slope and of the first beta slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind3 {
    /// Residual chain slope +p1/q1 > 1 and r_beta1 > +1.
    PositiveChain,
    /// Residual chain slope -p1/q1 < -1 and r_beta1 < -1.
    NegativeChain,
}

/// Slope data for a genus-three build: the residual chain fraction p1/q1,
/// the companion fraction p2/q2 with its partner slope p2'/q2', the third
/// auxiliary fraction p3/q3 and the three beta slopes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeSet3 {
    pub kind: Kind3,
    pub p1q1: PosRational,
    pub p2q2: PosRational,
    pub partner: PosRational,
    pub p3q3: PosRational,
    pub r_beta: [Slope; 3],
}

impl SlopeSet3 {
    pub fn validate(&self) -> Result<(), SurgeryError> {
        if !self.p1q1.gt_one() {
            return Err(SurgeryError::SlopeInvariant(format!(
                "p1/q1 must exceed 1, got {}",
                self.p1q1
            )));
        }
        if !self.p2q2.gt_one() {
            return Err(SurgeryError::SlopeInvariant(format!(
                "p2/q2 must exceed 1, got {}",
                self.p2q2
            )));
        }
        if !self.partner.gt_one() {
            return Err(SurgeryError::SlopeInvariant(format!(
                "partner slope must exceed 1, got {}",
                self.partner
            )));
        }
        match self.kind {
            Kind3::PositiveChain => {
                require_gt(&self.r_beta[0], 1, "r_beta1", false)?;
            }
            Kind3::NegativeChain => {
                require_lt(&self.r_beta[0], -1, "r_beta1", false)?;
            }
        }
        require_lt(&self.r_beta[1], -1, "r_beta2", false)?;
        require_lt(&self.r_beta[2], -1, "r_beta3", false)?;
        Ok(())
    }
}

/// Fixed component ids used by the genus-three builder and reducer.
pub const C2_ID: u32 = 0;
pub const C3_ID: u32 = 1;
pub const K1_ID: u32 = 2;
pub const K2_ID: u32 = 3;
pub const K3_ID: u32 = 4;

/// The symbolic companion knot: a (p2, q2)-torus knot carrying the partner
/// slope, clasping the chain component once. Only its fraction, partner
/// slope and host matter for the homology presentation; it is consumed by
/// the reduction and never drawn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanionRecord {
    pub pq: PosRational,
    pub partner: PosRational,
    pub host: u32,
}

/// Output of the genus-three builder: the concrete part of the link plus
/// the symbolic companion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct L3Link {
    pub kind: Kind3,
    pub link: FramedLink,
    pub companion: CompanionRecord,
}

impl L3Link {
    /// Materializes the companion as a plain component with an edge of
    /// linking number +1 to its host, giving the full presentation link.
    pub fn as_h1_link(&self) -> FramedLink {
        let mut link = self.link.clone();
        let id = link.max_id() + 1;
        link.components.push(FramedComponent {
            id,
            framing: Slope::Finite(self.companion.partner.to_ratio()),
        });
        link.links.push(LinkEdge {
            a: self.companion.host,
            b: id,
            lk: 1,
        });
        link
    }

    pub fn h1_order(&self) -> H1Order {
        h1_order(&self.as_h1_link())
    }

    /// The slope carried by the chain component.
    pub fn chain_slope(&self) -> BigRational {
        self.link
            .framing(C2_ID)
            .and_then(|s| s.as_finite())
            .expect("chain component is finite")
            .clone()
    }
}

/// Builds the genus-three framed link: the chain component carries
/// sign * p1/q1 + p2 + q2 - 1, the auxiliary component carries -p3/q3, the
/// three knot components carry the beta slopes, and the torus-knot
/// companion is recorded symbolically with its partner slope.
pub fn build_l3(slopes: &SlopeSet3) -> Result<L3Link, SurgeryError> {
    slopes.validate()?;
    let p2 = BigInt::from(slopes.p2q2.numer().clone());
    let q2 = BigInt::from(slopes.p2q2.denom().clone());
    let shift = BigRational::from(p2 + q2 - BigInt::one());
    let base = match slopes.kind {
        Kind3::PositiveChain => slopes.p1q1.to_ratio(),
        Kind3::NegativeChain => -slopes.p1q1.to_ratio(),
    };
    let chain = base + shift;
    let components = vec![
        FramedComponent {
            id: C2_ID,
            framing: Slope::Finite(chain),
        },
        FramedComponent {
            id: C3_ID,
            framing: Slope::Finite(-slopes.p3q3.to_ratio()),
        },
        FramedComponent {
            id: K1_ID,
            framing: slopes.r_beta[0].clone(),
        },
        FramedComponent {
            id: K2_ID,
            framing: slopes.r_beta[1].clone(),
        },
        FramedComponent {
            id: K3_ID,
            framing: slopes.r_beta[2].clone(),
        },
    ];
    let links = vec![
        LinkEdge {
            a: K1_ID,
            b: C2_ID,
            lk: 1,
        },
        LinkEdge {
            a: K2_ID,
            b: C2_ID,
            lk: 1,
        },
        LinkEdge {
            a: C3_ID,
            b: C2_ID,
            lk: 1,
        },
        LinkEdge {
            a: K3_ID,
            b: C3_ID,
            lk: 1,
        },
    ];
    Ok(L3Link {
        kind: slopes.kind,
        link: FramedLink::new(components, links)?,
        companion: CompanionRecord {
            pq: slopes.p2q2.clone(),
            partner: slopes.partner.clone(),
            host: C2_ID,
        },
    })
}

/// One step of the reduction bookkeeping.
#[derive(Debug, Clone)]
pub struct ReductionStep {
    /// The continued fraction digit consumed at this step.
    pub k: u64,
    /// Multiplier of the chain slope subtraction: the denominator of the
    /// descending fraction before this step (q at odd steps, p at even
    /// steps in the non-inverted bookkeeping).
    pub multiplier: BigUint,
    /// Chain slope after this step.
    pub chain_slope: BigRational,
    /// Partner slope after this step in stepwise form: the closed form at
    /// odd steps and its reciprocal at even steps (infinite when the
    /// closed form vanishes there).
    pub partner_stepwise: Slope,
    /// Partner slope after this step in closed form.
    pub partner_closed: BigRational,
    /// Remaining companion fraction after this step, if any.
    pub fraction: Option<PosRational>,
}

/// Output of the reduction: the final alternating link, the stage links
/// (one per consumed digit, each presenting the same homology as the
/// input), the two endpoint slopes, and the step trace.
///
/// A stage link keeps the companion as an ordinary clasped component whose
/// slope has absorbed the chain subtractions made so far; the final link
/// instead expands the companion into an integer digit chain with
/// alternating signs and the exact closed-form endpoint slope.
#[derive(Debug, Clone)]
pub struct KirbyReduced {
    pub link: FramedLink,
    pub stages: Vec<FramedLink>,
    pub chain_final: BigRational,
    pub partner_final: BigRational,
    pub trace: Vec<ReductionStep>,
}

/// Sign of a rational as -1, 0, +1.
fn sign_of(v: &BigRational) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Factors a determinant-one integer matrix into generator digits x_i with
/// F(x_1) * ... * F(x_m) = +-M, where F(x) = [[x, -1], [1, 0]].
///
/// Euclidean peeling on the first column terminates at a shear, which the
/// tail word (t, 0) realizes; the projective sign is irrelevant to both
/// the chain value and the presentation determinant magnitude.
fn sl2_word(m: [[BigInt; 2]; 2]) -> Vec<BigInt> {
    use num_integer::Integer as _;
    let [[mut a, mut b], [mut c, mut d]] = m;
    debug_assert!((&a * &d - &b * &c).magnitude().is_one(), "need det +-1");
    let mut out = Vec::new();
    while !c.is_zero() {
        let x = a.div_floor(&c);
        let (na, nb) = (c.clone(), d.clone());
        let nc = &x * &c - &a;
        let nd = &x * &d - &b;
        out.push(x);
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    // Shear tail: the remaining matrix is +-[[1, t], [0, 1]] with t = b/a,
    // realized by the word (t, 0); an identity tail adds nothing.
    debug_assert!(a.magnitude().is_one());
    let t = &b * &a;
    if !t.is_zero() {
        out.push(t);
        out.push(BigInt::zero());
    }
    out
}

/// Digit word realizing the reduced chain between the two endpoints: a
/// path x_1, ..., x_m of integer-framed vertices such that attaching the
/// terminal component (with reduced slope vector `u`) reproduces the tail
/// value with reduced vector `w`, exactly:
/// (prod F(x_i)) * u = +-w.
///
/// Same-sign adjacencies are then broken by inserting pairs of zero-framed
/// vertices: F(0)^2 = -I is projectively trivial, so neither the chain
/// value nor the determinant magnitude changes, and zero weights take
/// either sign. The endpoints' signs are repaired the same way.
fn chain_word(
    u: (BigInt, BigInt),
    w: (BigInt, BigInt),
    head_sign: i8,
    tail_sign: i8,
) -> Vec<BigInt> {
    use num_integer::Integer as _;
    let (un, ud) = u;
    let (wn, wd) = w;
    debug_assert!(ud.is_positive() || (ud.is_zero() && !un.is_zero()));
    debug_assert!(wd.is_positive());
    // U maps u to (1, 0): U = [[a, b], [-ud, un]] with a*un + b*ud = 1.
    let e = un.extended_gcd(&ud);
    debug_assert!(e.gcd.is_one(), "endpoint vectors must be reduced");
    // W^{-1} maps (1, 0) to w: first column w, completed to det 1.
    let f = wn.extended_gcd(&wd);
    debug_assert!(f.gcd.is_one());
    // M0 = W^{-1} * U with W^{-1} = [[wn, -f.y], [wd, f.x]].
    let m0 = [
        [
            &wn * &e.x - &f.y * -&ud,
            &wn * &e.y - &f.y * &un,
        ],
        [
            &wd * &e.x + &f.x * -&ud,
            &wd * &e.y + &f.x * &un,
        ],
    ];
    let word = sl2_word(m0);
    // Alternation repair: a zero vertex separates its neighbors (it takes
    // either sign), so only directly adjacent equal signs need a pair of
    // zeros spliced in between.
    let mut fixed: Vec<BigInt> = Vec::with_capacity(word.len() + 4);
    let mut prev_sign = head_sign;
    for x in word {
        let s = match x.sign() {
            num_bigint::Sign::Plus => 1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Minus => -1,
        };
        if s != 0 && prev_sign != 0 && s == prev_sign {
            fixed.push(BigInt::zero());
            fixed.push(BigInt::zero());
        }
        prev_sign = s;
        fixed.push(x);
    }
    if prev_sign != 0 && tail_sign != 0 && prev_sign == tail_sign {
        fixed.push(BigInt::zero());
        fixed.push(BigInt::zero());
    }
    fixed
}

/// Materializes a mid-reduction state: the chain component carries the
/// partially reduced slope and the companion appears as a plain clasped
/// component carrying the rolled-up slope 1/(1/r_p - consumed).
fn materialize_clasp(
    base: &FramedLink,
    chain_slope: &BigRational,
    companion_slope: &BigRational,
) -> FramedLink {
    let mut components: Vec<FramedComponent> = base
        .components
        .iter()
        .map(|c| {
            if c.id == C2_ID {
                FramedComponent {
                    id: C2_ID,
                    framing: Slope::Finite(chain_slope.clone()),
                }
            } else {
                c.clone()
            }
        })
        .collect();
    let id = base.max_id() + 1;
    components.push(FramedComponent {
        id,
        framing: Slope::Finite(companion_slope.clone()),
    });
    let mut links = base.links.clone();
    links.push(LinkEdge {
        a: C2_ID,
        b: id,
        lk: 1,
    });
    FramedLink::new(components, links).expect("clasp assembly is structurally valid")
}

/// Assembles the fully reduced link: the concrete spectators re-attached
/// through two-vertex zero buffers, plus the digit chain ending in the
/// companion component.
fn assemble_stage(
    base: &FramedLink,
    chain_slope: &BigRational,
    digits: &[BigInt],
    partner: &BigRational,
) -> FramedLink {
    let mut components: Vec<FramedComponent> = Vec::new();
    let mut links: Vec<LinkEdge> = Vec::new();
    for c in &base.components {
        if c.id == C2_ID {
            components.push(FramedComponent {
                id: C2_ID,
                framing: Slope::Finite(chain_slope.clone()),
            });
        } else {
            components.push(c.clone());
        }
    }
    let mut next_id = base.max_id() + 1;
    let mut fresh = |framing: Slope, components: &mut Vec<FramedComponent>| -> u32 {
        let id = next_id;
        next_id += 1;
        components.push(FramedComponent { id, framing });
        id
    };
    // Every spectator edge is re-attached through a pair of zero-framed
    // buffer vertices. The insertion flips the determinant sign only, and
    // zero weights are sign wildcards, so alternation at these junctions
    // never constrains the spectator slopes.
    for e in &base.links {
        let b1 = fresh(Slope::from_int(0), &mut components);
        let b2 = fresh(Slope::from_int(0), &mut components);
        links.push(LinkEdge {
            a: e.a,
            b: b1,
            lk: e.lk,
        });
        links.push(LinkEdge { a: b1, b: b2, lk: 1 });
        links.push(LinkEdge {
            a: b2,
            b: e.b,
            lk: 1,
        });
    }
    // The digit chain: C2 -- x1 -- ... -- xm -- companion.
    let mut prev = C2_ID;
    for d in digits {
        let id = fresh(Slope::Finite(BigRational::from(d.clone())), &mut components);
        links.push(LinkEdge {
            a: prev,
            b: id,
            lk: 1,
        });
        prev = id;
    }
    let companion = fresh(Slope::Finite(partner.clone()), &mut components);
    links.push(LinkEdge {
        a: prev,
        b: companion,
        lk: 1,
    });
    FramedLink::new(components, links).expect("stage assembly is structurally valid")
}

/// Reduces the companion of a genus-three link along the continued
/// fraction expansion of its fraction, alternating the two slope update
/// rules, and returns the final alternating framed link together with the
/// per-digit stage links.
///
/// Endpoint identities, enforced exactly: the chain slope ends at its
/// input value minus (p2 + q2 - 1) and the companion ends at the nested
/// closed-form value of the partner slope. Every stage presents the same
/// first homology as the input.
pub fn kirby_reduce(l3: &L3Link) -> Result<KirbyReduced, SurgeryError> {
    let pq = &l3.companion.pq;
    let ks = contfrac::cfe(pq)?;
    let digits = ks.digits();
    let n = digits.len();
    let r_p = l3.companion.partner.to_ratio();

    // Descending fraction bookkeeping: x_0 = p2/q2, x_i = 1/(x_{i-1} - k_i);
    // the chain multiplier of step i is the denominator of x_{i-1}.
    let mut frac_num = pq.numer().clone();
    let mut frac_den = pq.denom().clone();

    let mut chain = l3.chain_slope();
    let mut s = r_p.recip(); // S_0 = 1/r_p
    let mut trace: Vec<ReductionStep> = Vec::with_capacity(n);
    let mut stages: Vec<FramedLink> = Vec::with_capacity(n);
    let mut consumed = BigRational::zero();

    for (i, &k) in digits.iter().enumerate() {
        let multiplier = frac_den.clone();
        let step_amount = BigRational::from(BigInt::from(k) * BigInt::from(multiplier.clone()));
        chain -= &step_amount;
        consumed += &step_amount;
        // Partner update S_i = 1/S_{i-1} - k_i: plain subtraction at odd
        // steps, the reciprocal rule at even steps, in one uniform form.
        if s.is_zero() {
            return Err(SurgeryError::ContFrac(ContFracError::Inadmissible(i)));
        }
        s = s.recip() - BigRational::from(BigInt::from(k));
        let partner_stepwise = if (i + 1) % 2 == 1 {
            Slope::Finite(s.clone())
        } else if s.is_zero() {
            Slope::Infinity
        } else {
            Slope::Finite(s.clone().recip())
        };
        // Advance the fraction: (num, den) becomes (den, num - k*den).
        let next_den = &frac_num - BigUint::from(k) * &frac_den;
        frac_num = std::mem::replace(&mut frac_den, next_den);
        let fraction = if frac_den.is_zero() {
            None
        } else {
            Some(PosRational::from_biguint(frac_num.clone(), frac_den.clone()).unwrap())
        };

        // Stage link: the blow-ups performed so far roll into the clasped
        // companion slope 1/(1/r_p - consumed); the chain has given up the
        // same amount, so the stage presents the input homology.
        let rolled = (r_p.recip() - &consumed).recip();
        stages.push(materialize_clasp(&l3.link, &chain, &rolled));

        trace.push(ReductionStep {
            k,
            multiplier,
            chain_slope: chain.clone(),
            partner_stepwise,
            partner_closed: s.clone(),
            fraction,
        });
    }
    debug_assert!(frac_num.is_one(), "fraction descent ends at 1");
    debug_assert_eq!(
        consumed,
        BigRational::from(
            BigInt::from(pq.numer().clone()) + BigInt::from(pq.denom().clone()) - BigInt::one()
        ),
        "chain subtractions telescope to p + q - 1"
    );
    debug_assert_eq!(
        s,
        contfrac::r_value(&ks, &l3.companion.partner)?,
        "iterated partner slope equals the nested closed form"
    );

    // Final step: unroll the companion into the alternating digit chain
    // with the exact closed-form endpoint slope. The tail seen from the
    // chain component must take the value -1/W = 1/(1/r_p - (p+q-1)).
    let v_tail = -(&consumed - r_p.recip()).recip();
    let u = (s.numer().clone(), s.denom().clone());
    let w_vec = (v_tail.numer().clone(), v_tail.denom().clone());
    let chain_digits = chain_word(u, w_vec, sign_of(&chain), sign_of(&s));
    let link = assemble_stage(&l3.link, &chain, &chain_digits, &s);
    Ok(KirbyReduced {
        link,
        stages,
        chain_final: chain,
        partner_final: s,
        trace,
    })
}

/// Ids of the two reduction endpoints in the reduced link: the chain
/// component keeps [`C2_ID`]; the companion is always the component with
/// the largest id.
pub fn reduced_companion_id(link: &FramedLink) -> u32 {
    link.components
        .iter()
        .map(|c| c.id)
        .max()
        .expect("reduced link is nonempty")
}
