//! Exact sign and integer matrix algebra: determinants, permanents of
//! absolute values, effectiveness, maximality, equivalence classes under
//! row/column permutations, negations and transpose, and exhaustive
//! enumeration of the effective and maximal-effective classes.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignMatError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires an effective matrix")]
    NotEffective,
    #[error("enumeration budget is g <= {max}, got g = {got}")]
    BudgetExceeded { got: usize, max: usize },
    #[error("invalid intersection data at ({i},{j}): |a| > b or b < 0")]
    InvalidIntersection { i: usize, j: usize },
    #[error("cannot parse matrix from `{0}`")]
    Parse(String),
}

/// Entry of a sign pattern. The ordering Minus < Zero < Plus is the fixed
/// total order used for lexicographic canonical forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn of_int(v: &BigInt) -> Sign {
        match v.sign() {
            num_bigint::Sign::Minus => Sign::Minus,
            num_bigint::Sign::NoSign => Sign::Zero,
            num_bigint::Sign::Plus => Sign::Plus,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Minus => write!(f, "-"),
            Sign::Zero => write!(f, "0"),
            Sign::Plus => write!(f, "+"),
        }
    }
}

/// A square g x g pattern over {+, 0, -}, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    g: usize,
    entries: Vec<Sign>,
}

impl PartialOrd for SignMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SignMatrix {
    fn cmp(&self, other: &Self) -> Ordering {
        self.g
            .cmp(&other.g)
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl SignMatrix {
    pub fn new(g: usize, entries: Vec<Sign>) -> Result<Self, SignMatError> {
        if g == 0 || entries.len() != g * g {
            return Err(SignMatError::Parse(format!(
                "need {g}x{g} = {} entries, got {}",
                g * g,
                entries.len()
            )));
        }
        Ok(SignMatrix { g, entries })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn get(&self, i: usize, j: usize) -> Sign {
        self.entries[i * self.g + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Sign) {
        self.entries[i * self.g + j] = s;
    }

    pub fn entries(&self) -> &[Sign] {
        &self.entries
    }

    pub fn zero_count(&self) -> usize {
        self.entries.iter().filter(|&&s| s == Sign::Zero).count()
    }

    pub fn transpose(&self) -> SignMatrix {
        let g = self.g;
        let mut entries = vec![Sign::Zero; g * g];
        for i in 0..g {
            for j in 0..g {
                entries[j * g + i] = self.get(i, j);
            }
        }
        SignMatrix { g, entries }
    }

    /// The sign pattern of an integer matrix.
    pub fn of_int(m: &IntMatrix) -> SignMatrix {
        SignMatrix {
            g: m.g,
            entries: m.entries.iter().map(Sign::of_int).collect(),
        }
    }
}

impl fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.g {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.g {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

impl FromStr for SignMatrix {
    type Err = SignMatError;

    /// Parses `+ + ; - +` style text; integer entries are accepted and
    /// reduced to their signs.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows: Vec<&str> = s.split(';').map(str::trim).collect();
        let g = rows.len();
        let mut entries = Vec::with_capacity(g * g);
        for row in &rows {
            let cells: Vec<&str> = row.split_whitespace().collect();
            if cells.len() != g {
                return Err(SignMatError::Parse(s.into()));
            }
            for cell in cells {
                let sign = match cell {
                    "+" => Sign::Plus,
                    "-" => Sign::Minus,
                    "0" => Sign::Zero,
                    other => {
                        let v: i64 = other.parse().map_err(|_| SignMatError::Parse(s.into()))?;
                        Sign::of_int(&BigInt::from(v))
                    }
                };
                entries.push(sign);
            }
        }
        SignMatrix::new(g, entries)
    }
}

/// A square g x g matrix of exact integers, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    g: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(g: usize, entries: Vec<BigInt>) -> Result<Self, SignMatError> {
        if g == 0 || entries.len() != g * g {
            return Err(SignMatError::Parse(format!(
                "need {g}x{g} = {} entries, got {}",
                g * g,
                entries.len()
            )));
        }
        Ok(IntMatrix { g, entries })
    }

    pub fn from_i64(g: usize, entries: &[i64]) -> Result<Self, SignMatError> {
        IntMatrix::new(g, entries.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// Internal constructor used for surgery presentations; allows g = 0
    /// (the empty presentation has determinant 1).
    pub(crate) fn raw(g: usize, entries: Vec<BigInt>) -> Self {
        debug_assert_eq!(entries.len(), g * g);
        IntMatrix { g, entries }
    }

    pub fn identity(g: usize) -> Self {
        let mut entries = vec![BigInt::zero(); g * g];
        for i in 0..g {
            entries[i * g + i] = BigInt::one();
        }
        IntMatrix { g, entries }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.g + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.g + j] = v;
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> IntMatrix {
        IntMatrix {
            g: self.g,
            entries: self.entries.iter().map(|v| v.abs()).collect(),
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.g {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.g {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = SignMatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows: Vec<&str> = s.split(';').map(str::trim).collect();
        let g = rows.len();
        let mut entries = Vec::with_capacity(g * g);
        for row in &rows {
            let cells: Vec<&str> = row.split_whitespace().collect();
            if cells.len() != g {
                return Err(SignMatError::Parse(s.into()));
            }
            for cell in cells {
                let v = match cell {
                    "+" => BigInt::one(),
                    "-" => -BigInt::one(),
                    other => {
                        BigInt::from_str(other).map_err(|_| SignMatError::Parse(s.into()))?
                    }
                };
                entries.push(v);
            }
        }
        IntMatrix::new(g, entries)
    }
}

/// An equivalence class, held by its orbit-minimal representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EquivClass {
    canon: SignMatrix,
}

impl EquivClass {
    pub fn of(s: &SignMatrix) -> EquivClass {
        EquivClass {
            canon: canonical_form(s),
        }
    }

    pub fn canon(&self) -> &SignMatrix {
        &self.canon
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_exact(m: &IntMatrix) -> BigInt {
    let n = m.g;
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| m.entries[i * n..(i + 1) * n].to_vec())
        .collect();
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Permanent of the entrywise absolute value: the permutation sum
/// of products of |m_{i sigma(i)}| with no signs.
///
/// Direct symmetric-group expansion for g <= 5, Ryser inclusion-exclusion
/// with Gray code above; the two agree on their overlap.
pub fn perm_abs(m: &IntMatrix) -> BigInt {
    if m.g <= 5 {
        perm_abs_direct(m)
    } else {
        perm_abs_ryser(m)
    }
}

pub(crate) fn perm_abs_direct(m: &IntMatrix) -> BigInt {
    let n = m.g;
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    let mut used = vec![false; n];

    fn rec(
        m: &IntMatrix,
        row: usize,
        used: &mut [bool],
        partial: &BigInt,
        total: &mut BigInt,
    ) {
        let n = m.g;
        if row == n {
            *total += partial;
            return;
        }
        for col in 0..n {
            if used[col] {
                continue;
            }
            let e = m.get(row, col);
            if e.is_zero() {
                continue;
            }
            used[col] = true;
            let next = partial * e.abs();
            rec(m, row + 1, used, &next, total);
            used[col] = false;
        }
    }

    rec(m, 0, &mut used, &BigInt::one(), &mut total);
    total
}

pub(crate) fn perm_abs_ryser(m: &IntMatrix) -> BigInt {
    let n = m.g;
    if n == 0 {
        return BigInt::one();
    }
    let abs: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).abs()).collect())
        .collect();
    // Gray code over nonempty column subsets; row_sums track the current set.
    let mut row_sums = vec![BigInt::zero(); n];
    let mut total = BigInt::zero();
    let mut prev_gray: u64 = 0;
    for t in 1u64..(1u64 << n) {
        let gray = t ^ (t >> 1);
        let diff = gray ^ prev_gray;
        let j = diff.trailing_zeros() as usize;
        if gray & diff != 0 {
            for (i, sums) in row_sums.iter_mut().enumerate() {
                *sums += &abs[i][j];
            }
        } else {
            for (i, sums) in row_sums.iter_mut().enumerate() {
                *sums -= &abs[i][j];
            }
        }
        prev_gray = gray;
        let mut prod = BigInt::one();
        for s in &row_sums {
            if s.is_zero() {
                prod = BigInt::zero();
                break;
            }
            prod *= s;
        }
        let k = gray.count_ones() as usize;
        if (n - k) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total.abs()
}

/// True iff all nonzero signed permutation terms sgn(sigma) * prod s_{i sigma(i)}
/// carry one common sign (vacuously true when every term vanishes).
pub fn is_effective(s: &SignMatrix) -> bool {
    let n = s.g;
    let mut used = vec![false; n];
    let mut seen_pos = false;
    let mut seen_neg = false;

    fn rec(
        s: &SignMatrix,
        row: usize,
        used: &mut [bool],
        term_sign: i8,
        seen_pos: &mut bool,
        seen_neg: &mut bool,
    ) -> bool {
        let n = s.g;
        if *seen_pos && *seen_neg {
            return false;
        }
        if row == n {
            if term_sign > 0 {
                *seen_pos = true;
            } else {
                *seen_neg = true;
            }
            return !(*seen_pos && *seen_neg);
        }
        for col in 0..n {
            if used[col] {
                continue;
            }
            let e = s.get(row, col);
            if e == Sign::Zero {
                continue;
            }
            // Parity bookkeeping: moving column `col` into position `row`
            // costs one transposition per live column skipped before it.
            let skipped = (0..col).filter(|&c| !used[c]).count();
            let parity = if skipped % 2 == 0 { 1 } else { -1 };
            used[col] = true;
            let ok = rec(
                s,
                row + 1,
                used,
                term_sign * parity * e.value(),
                seen_pos,
                seen_neg,
            );
            used[col] = false;
            if !ok {
                return false;
            }
        }
        true
    }

    rec(s, 0, &mut used, 1, &mut seen_pos, &mut seen_neg);
    !(seen_pos && seen_neg)
}

/// True iff the determinant/permanent equality |det A| = perm |B| holds.
///
/// Equivalently: sign(A) is effective and |a_ij| = b_ij wherever b_ij > 0.
pub fn is_strong_pair(a: &IntMatrix, b: &IntMatrix) -> Result<bool, SignMatError> {
    if a.g != b.g {
        return Err(SignMatError::DimensionMismatch(a.g, b.g));
    }
    for i in 0..a.g {
        for j in 0..a.g {
            let bij = b.get(i, j);
            if bij.is_negative() || a.get(i, j).abs() > *bij {
                return Err(SignMatError::InvalidIntersection { i, j });
            }
        }
    }
    Ok(det_exact(a).abs() == perm_abs(b))
}

/// True iff no single zero entry can be replaced by + or - while keeping
/// the matrix effective. Rejects non-effective input.
pub fn is_maximal(s: &SignMatrix) -> Result<bool, SignMatError> {
    if !is_effective(s) {
        return Err(SignMatError::NotEffective);
    }
    let mut work = s.clone();
    for i in 0..s.g {
        for j in 0..s.g {
            if s.get(i, j) != Sign::Zero {
                continue;
            }
            for fill in [Sign::Plus, Sign::Minus] {
                work.set(i, j, fill);
                if is_effective(&work) {
                    return Ok(false);
                }
            }
            work.set(i, j, Sign::Zero);
        }
    }
    Ok(true)
}

/// All permutations of 0..n in a deterministic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        heap(n, &mut cur, &mut out);
    }
    out
}

/// The lexicographically least matrix in the orbit of `s` under row and
/// column permutations, row and column negations, and transpose, with the
/// entry order Minus < Zero < Plus in row-major reading.
///
/// Full brute force over the group; the orbit bound (g!)^2 * 2^(2g) * 2 is
/// small for the supported sizes.
pub fn canonical_form(s: &SignMatrix) -> SignMatrix {
    let g = s.g;
    let perms = permutations(g);
    let mut best: Option<Vec<Sign>> = None;
    let mut candidate = vec![Sign::Zero; g * g];

    for transpose in [false, true] {
        let base = if transpose {
            s.transpose()
        } else {
            s.clone()
        };
        for rp in &perms {
            for cp in &perms {
                // Row-permuted and column-permuted view, before negations.
                for neg_mask in 0u32..(1u32 << (2 * g)) {
                    let row_mask = neg_mask & ((1 << g) - 1);
                    let col_mask = neg_mask >> g;
                    let mut better = match best {
                        None => true,
                        Some(_) => false,
                    };
                    let mut worse = false;
                    for i in 0..g {
                        for j in 0..g {
                            let mut e = base.get(rp[i], cp[j]);
                            if (row_mask >> i) & 1 == 1 {
                                e = e.negate();
                            }
                            if (col_mask >> j) & 1 == 1 {
                                e = e.negate();
                            }
                            let idx = i * g + j;
                            candidate[idx] = e;
                            if !better && !worse {
                                match e.cmp(&best.as_ref().unwrap()[idx]) {
                                    Ordering::Less => better = true,
                                    Ordering::Greater => worse = true,
                                    Ordering::Equal => {}
                                }
                            }
                        }
                        if worse {
                            break;
                        }
                    }
                    if worse {
                        continue;
                    }
                    if better {
                        // Finish filling the candidate before adopting it.
                        best = Some({
                            let mut full = vec![Sign::Zero; g * g];
                            for i in 0..g {
                                for j in 0..g {
                                    let mut e = base.get(rp[i], cp[j]);
                                    if (row_mask >> i) & 1 == 1 {
                                        e = e.negate();
                                    }
                                    if (col_mask >> j) & 1 == 1 {
                                        e = e.negate();
                                    }
                                    full[i * g + j] = e;
                                }
                            }
                            full
                        });
                    }
                }
            }
        }
    }

    SignMatrix {
        g,
        entries: best.expect("orbit is nonempty"),
    }
}

/// True iff two patterns lie in one orbit; errors on dimension mismatch.
pub fn are_equivalent(s1: &SignMatrix, s2: &SignMatrix) -> Result<bool, SignMatError> {
    if s1.g != s2.g {
        return Err(SignMatError::DimensionMismatch(s1.g, s2.g));
    }
    Ok(canonical_form(s1) == canonical_form(s2))
}

/// The class order: [s1] <= [s2] iff some replacement of zero entries of s1
/// by + or - lands in the class of s2. Exhaustive search over the 3^z
/// fillings of the z zero entries. Both inputs must be effective.
pub fn class_le(s1: &SignMatrix, s2: &SignMatrix) -> Result<bool, SignMatError> {
    if s1.g != s2.g {
        return Err(SignMatError::DimensionMismatch(s1.g, s2.g));
    }
    if !is_effective(s1) || !is_effective(s2) {
        return Err(SignMatError::NotEffective);
    }
    let target = canonical_form(s2);
    let target_zeros = target.zero_count();
    let zero_positions: Vec<usize> = (0..s1.entries.len())
        .filter(|&i| s1.entries[i] == Sign::Zero)
        .collect();
    let z = zero_positions.len();
    // Zero count is an orbit invariant, so a filling can only match when it
    // leaves exactly target_zeros zeros behind.
    if z < target_zeros {
        return Ok(false);
    }
    let mut filling = vec![0u8; z];
    loop {
        let kept_zeros = filling.iter().filter(|&&f| f == 0).count();
        if kept_zeros == target_zeros {
            let mut cand = s1.clone();
            for (slot, &pos) in zero_positions.iter().enumerate() {
                cand.entries[pos] = match filling[slot] {
                    0 => Sign::Zero,
                    1 => Sign::Plus,
                    _ => Sign::Minus,
                };
            }
            if is_effective(&cand) && canonical_form(&cand) == target {
                return Ok(true);
            }
        }
        // Odometer over {zero, plus, minus}^z.
        let mut carry = true;
        for slot in filling.iter_mut() {
            if *slot < 2 {
                *slot += 1;
                carry = false;
                break;
            }
            *slot = 0;
        }
        if carry {
            return Ok(false);
        }
    }
}

const ENUM_BUDGET: usize = 4;

fn encode(s: &[Sign]) -> usize {
    s.iter().fold(0usize, |acc, &e| {
        acc * 3
            + match e {
                Sign::Minus => 0,
                Sign::Zero => 1,
                Sign::Plus => 2,
            }
    })
}

fn decode(mut code: usize, g: usize) -> Vec<Sign> {
    let n = g * g;
    let mut entries = vec![Sign::Zero; n];
    for i in (0..n).rev() {
        entries[i] = match code % 3 {
            0 => Sign::Minus,
            1 => Sign::Zero,
            _ => Sign::Plus,
        };
        code /= 3;
    }
    entries
}

/// Applies every generator of the equivalence group once.
fn neighbors(s: &SignMatrix) -> Vec<SignMatrix> {
    let g = s.g;
    let mut out = Vec::with_capacity(2 * (g - 1) + 2 * g + 1);
    for i in 0..g.saturating_sub(1) {
        let mut m = s.clone();
        for j in 0..g {
            let a = m.get(i, j);
            let b = m.get(i + 1, j);
            m.set(i, j, b);
            m.set(i + 1, j, a);
        }
        out.push(m);
        let mut m = s.clone();
        for r in 0..g {
            let a = m.get(r, i);
            let b = m.get(r, i + 1);
            m.set(r, i, b);
            m.set(r, i + 1, a);
        }
        out.push(m);
    }
    for i in 0..g {
        let mut m = s.clone();
        for j in 0..g {
            m.set(i, j, m.get(i, j).negate());
        }
        out.push(m);
        let mut m = s.clone();
        for r in 0..g {
            m.set(r, i, m.get(r, i).negate());
        }
        out.push(m);
    }
    out.push(s.transpose());
    out
}

/// Canonical forms of all effective g x g sign classes, g <= 4.
///
/// Scans all 3^(g^2) patterns once; each newly met effective pattern seeds
/// a breadth-first orbit walk that marks the whole class visited and
/// records its minimum.
pub fn enumerate_effective_classes(g: usize) -> Result<BTreeSet<SignMatrix>, SignMatError> {
    if g == 0 || g > ENUM_BUDGET {
        return Err(SignMatError::BudgetExceeded {
            got: g,
            max: ENUM_BUDGET,
        });
    }
    let n = g * g;
    let total = 3usize.pow(n as u32);
    let mut seen = vec![false; total];
    let mut classes = BTreeSet::new();

    for code in 0..total {
        if seen[code] {
            continue;
        }
        let start = SignMatrix {
            g,
            entries: decode(code, g),
        };
        if !is_effective(&start) {
            seen[code] = true;
            continue;
        }
        // Orbit walk: effectiveness is constant on the orbit.
        let mut min = start.clone();
        let mut queue = std::collections::VecDeque::new();
        seen[code] = true;
        queue.push_back(start);
        while let Some(cur) = queue.pop_front() {
            for next in neighbors(&cur) {
                let c = encode(&next.entries);
                if seen[c] {
                    continue;
                }
                seen[c] = true;
                if next < min {
                    min = next.clone();
                }
                queue.push_back(next);
            }
        }
        classes.insert(min);
    }
    Ok(classes)
}

/// True iff at least one permutation term survives, i.e. the permanent of
/// the entrywise absolute value is positive.
pub fn has_nonzero_term(s: &SignMatrix) -> bool {
    let n = s.g;
    let mut used = vec![false; n];
    fn rec(s: &SignMatrix, row: usize, used: &mut [bool]) -> bool {
        if row == s.g {
            return true;
        }
        for col in 0..s.g {
            if used[col] || s.get(row, col) == Sign::Zero {
                continue;
            }
            used[col] = true;
            if rec(s, row + 1, used) {
                used[col] = false;
                return true;
            }
            used[col] = false;
        }
        false
    }
    rec(s, 0, &mut used)
}

/// The maximal subset of [`enumerate_effective_classes`].
///
/// Vacuously effective classes (no surviving permutation term) are
/// excluded: such a pattern presents infinite first homology and cannot be
/// induced by a strong Heegaard diagram, whose generator count equals the
/// homology order. From dimension three upward some of them cannot be
/// extended either, so without this exclusion they would appear as spurious
/// maximal elements.
pub fn enumerate_maximal_effective_classes(
    g: usize,
) -> Result<BTreeSet<SignMatrix>, SignMatError> {
    let all = enumerate_effective_classes(g)?;
    Ok(all
        .into_iter()
        .filter(|s| {
            has_nonzero_term(s) && is_maximal(s).expect("enumerated classes are effective")
        })
        .collect())
}
