//! Exact positive rationals, continued fraction expansions, mediant
//! predecessors, the blend formula and the nested R-value, plus the
//! exhaustive parity sweep verifiers.
//!
//! All arithmetic is exact big-integer rational. The claims being checked
//! are strict inequalities near boundaries, so no approximation is allowed.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContFracError {
    #[error("rational must be greater than 1, got {0}")]
    NotGreaterThanOne(String),
    #[error("continued fraction digits invalid: {0}")]
    BadDigits(String),
    #[error("no mediant predecessor of {r} with orientation {orientation:+}")]
    NoMediantPair { r: String, orientation: i8 },
    #[error("inadmissible input: nested evaluation divides by zero at level {0}")]
    Inadmissible(usize),
    #[error("cannot parse rational from `{0}`")]
    Parse(String),
    #[error("denominator is zero")]
    ZeroDenominator,
}

/// A positive rational p/q in lowest terms, p, q >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PosRational {
    num: BigUint,
    den: BigUint,
}

impl PosRational {
    pub fn new(num: u64, den: u64) -> Result<Self, ContFracError> {
        Self::from_biguint(BigUint::from(num), BigUint::from(den))
    }

    pub fn from_biguint(num: BigUint, den: BigUint) -> Result<Self, ContFracError> {
        if den.is_zero() {
            return Err(ContFracError::ZeroDenominator);
        }
        if num.is_zero() {
            return Err(ContFracError::Parse("numerator must be positive".into()));
        }
        let g = num.gcd(&den);
        Ok(PosRational {
            num: &num / &g,
            den: &den / &g,
        })
    }

    /// Converts a rational; fails unless it is strictly positive.
    pub fn try_from_ratio(r: &BigRational) -> Result<Self, ContFracError> {
        if !r.is_positive() {
            return Err(ContFracError::Parse(format!("{r} is not positive")));
        }
        Self::from_biguint(
            r.numer().magnitude().clone(),
            r.denom().magnitude().clone(),
        )
    }

    pub fn numer(&self) -> &BigUint {
        &self.num
    }

    pub fn denom(&self) -> &BigUint {
        &self.den
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.num.clone()),
            BigInt::from(self.den.clone()),
        )
    }

    /// True iff the value is strictly greater than 1.
    pub fn gt_one(&self) -> bool {
        self.num > self.den
    }
}

impl PartialOrd for PosRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PosRational {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for PosRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for PosRational {
    type Err = ContFracError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = BigUint::from_str(n).map_err(|_| ContFracError::Parse(s.into()))?;
        let den = BigUint::from_str(d).map_err(|_| ContFracError::Parse(s.into()))?;
        PosRational::from_biguint(num, den)
    }
}

impl serde::Serialize for PosRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PosRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A surgery slope: a signed rational or the symbol infinity.
///
/// Zero is the finite slope 0; infinity carries no sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slope {
    Finite(BigRational),
    Infinity,
}

impl Slope {
    pub fn from_int(n: i64) -> Self {
        Slope::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        assert!(d != 0, "finite slope needs a nonzero denominator");
        Slope::Finite(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Slope::Infinity)
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            Slope::Finite(r) => Some(r),
            Slope::Infinity => None,
        }
    }

    /// Sign of a finite slope: -1, 0 or +1. Infinity has no sign.
    pub fn signum(&self) -> Option<i8> {
        self.as_finite().map(|r| {
            if r.is_positive() {
                1
            } else if r.is_negative() {
                -1
            } else {
                0
            }
        })
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(r) => write!(f, "{r}"),
            Slope::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Slope {
    type Err = ContFracError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" || s == "infinity" || s == "oo" {
            return Ok(Slope::Infinity);
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = BigInt::from_str(n).map_err(|_| ContFracError::Parse(s.into()))?;
        let den = BigInt::from_str(d).map_err(|_| ContFracError::Parse(s.into()))?;
        if den.is_zero() {
            return Err(ContFracError::ZeroDenominator);
        }
        Ok(Slope::Finite(BigRational::new(num, den)))
    }
}

impl serde::Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Slope {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Continued fraction expansion [k1, ..., kn] with k_i >= 1 and k_n >= 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CFrac {
    ks: Vec<u64>,
}

impl CFrac {
    pub fn new(ks: Vec<u64>) -> Result<Self, ContFracError> {
        if ks.is_empty() {
            return Err(ContFracError::BadDigits("empty".into()));
        }
        if ks.iter().any(|&k| k == 0) {
            return Err(ContFracError::BadDigits(format!("{ks:?} has a zero digit")));
        }
        if *ks.last().unwrap() < 2 {
            return Err(ContFracError::BadDigits(format!(
                "{ks:?} must end with a digit >= 2"
            )));
        }
        Ok(CFrac { ks })
    }

    pub fn digits(&self) -> &[u64] {
        &self.ks
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for CFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, k) in self.ks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "]")
    }
}

/// Orientation of a mediant relation: pbar*q - qbar*p = +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Plus,
    Minus,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Plus => 1,
            Orientation::Minus => -1,
        }
    }
}

/// The bounded solution (pbar, qbar) of pbar*q - qbar*p = orientation,
/// with 1 <= pbar <= p and 1 <= qbar <= q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediantPair {
    pub pbar: BigUint,
    pub qbar: BigUint,
    pub orientation: Orientation,
}

impl MediantPair {
    pub fn value(&self) -> PosRational {
        PosRational::from_biguint(self.pbar.clone(), self.qbar.clone())
            .expect("mediant components are positive")
    }
}

/// Plus-convention continued fraction expansion of a rational > 1.
///
/// The Euclidean algorithm produces the unique expansion whose last digit
/// is at least 2.
pub fn cfe(r: &PosRational) -> Result<CFrac, ContFracError> {
    if !r.gt_one() {
        return Err(ContFracError::NotGreaterThanOne(r.to_string()));
    }
    let mut a = r.num.clone();
    let mut b = r.den.clone();
    let mut ks = Vec::new();
    while !b.is_zero() {
        let (q, rem) = a.div_rem(&b);
        ks.push(u64::try_from(&q).expect("continued fraction digit fits in u64"));
        a = b;
        b = rem;
    }
    CFrac::new(ks)
}

/// Evaluates a digit list k1 + 1/(k2 + 1/(...)) bottom-up.
///
/// Accepts any positive digits (the last may be 1), so truncations of valid
/// expansions can be evaluated too. Empty input evaluates to 1/1 by the
/// stated convention.
fn eval_digits(ks: &[u64]) -> PosRational {
    if ks.is_empty() {
        return PosRational::new(1, 1).unwrap();
    }
    // Bottom-up: value = k + 1/prev, kept as num/den over BigUint.
    let mut num = BigUint::from(*ks.last().unwrap());
    let mut den = BigUint::one();
    for &k in ks.iter().rev().skip(1) {
        let new_num = BigUint::from(k) * &num + &den;
        den = num;
        num = new_num;
    }
    PosRational::from_biguint(num, den).expect("digits are positive")
}

/// Exact value of a continued fraction expansion; inverse of [`cfe`].
pub fn eval_cfrac(ks: &CFrac) -> PosRational {
    eval_digits(&ks.ks)
}

/// The unique (pbar, qbar) with 1 <= pbar <= p, 1 <= qbar <= q and
/// pbar*q - qbar*p equal to the requested orientation, found by the
/// extended Euclidean algorithm.
///
/// Integer slopes (q = 1) admit no solution for orientation +1; that case
/// is reported as an error so sweeps can skip and log it.
pub fn mediant_pred(
    r: &PosRational,
    orientation: Orientation,
) -> Result<MediantPair, ContFracError> {
    if !r.gt_one() {
        return Err(ContFracError::NotGreaterThanOne(r.to_string()));
    }
    let p = BigInt::from(r.num.clone());
    let q = BigInt::from(r.den.clone());
    let s = BigInt::from(orientation.sign());
    // x*q - y*p = s  =>  x = s * q^{-1} mod p, normalized into [1, p].
    let ext = q.extended_gcd(&p);
    debug_assert!(ext.gcd.is_one());
    let mut x = (&s * ext.x) % &p;
    if x <= BigInt::zero() {
        x += &p;
    }
    let y = (&x * &q - &s) / &p;
    if y < BigInt::one() || y > q {
        return Err(ContFracError::NoMediantPair {
            r: r.to_string(),
            orientation: orientation.sign(),
        });
    }
    Ok(MediantPair {
        pbar: x.magnitude().clone(),
        qbar: y.magnitude().clone(),
        orientation,
    })
}

/// A truncation value together with the degenerate-empty flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncation {
    pub value: PosRational,
    /// True when the truncated digit list was empty and the 1/1 convention
    /// was applied.
    pub empty_truncation: bool,
}

/// Evaluates the orientation-dependent truncation of an expansion:
/// `[k1..k_{n-1}]` for (+1, n odd) and (-1, n even); `[k1..kn - 1]` for
/// (+1, n even) and (-1, n odd). Must agree with [`mediant_pred`] wherever
/// both are defined.
pub fn truncation_value(ks: &CFrac, orientation: Orientation) -> Truncation {
    let n = ks.len();
    let odd = n % 2 == 1;
    let drop_last = matches!(
        (orientation, odd),
        (Orientation::Plus, true) | (Orientation::Minus, false)
    );
    if drop_last {
        let digits = &ks.ks[..n - 1];
        Truncation {
            value: eval_digits(digits),
            empty_truncation: digits.is_empty(),
        }
    } else {
        let mut digits = ks.ks.clone();
        *digits.last_mut().unwrap() -= 1;
        if *digits.last().unwrap() == 0 {
            // Only possible for n = 1, k1 = 2 is excluded by kn >= 2; a
            // trailing zero would mean kn = 1 which CFrac forbids.
            digits.pop();
        }
        Truncation {
            value: eval_digits(&digits),
            empty_truncation: digits.is_empty(),
        }
    }
}

/// The blend (pbar + p*z) / (qbar + q*z) in lowest terms, z >= 0.
pub fn blend(r: &PosRational, mp: &MediantPair, z: &BigRational) -> PosRational {
    assert!(!z.is_negative(), "blend parameter must be nonnegative");
    let p = BigRational::from(BigInt::from(r.num.clone()));
    let q = BigRational::from(BigInt::from(r.den.clone()));
    let pbar = BigRational::from(BigInt::from(mp.pbar.clone()));
    let qbar = BigRational::from(BigInt::from(mp.qbar.clone()));
    let value = (pbar + &p * z) / (qbar + &q * z);
    PosRational::try_from_ratio(&value).expect("blend of positive data is positive")
}

/// The nested value -(kn + 1/(k_{n-1} + ... + 1/(k1 - rp))).
///
/// For n = 1 this collapses to -(k1 - rp); the blow-up recursion forces
/// that reading, and the parity sweeps only close with it.
pub fn r_value(ks: &CFrac, rp: &PosRational) -> Result<BigRational, ContFracError> {
    let digits = ks.digits();
    let mut t = BigRational::from(BigInt::from(digits[0])) - rp.to_ratio();
    for (level, &k) in digits.iter().enumerate().skip(1) {
        if t.is_zero() {
            return Err(ContFracError::Inadmissible(level));
        }
        t = BigRational::from(BigInt::from(k)) + t.recip();
    }
    Ok(-t)
}

/// Verdict for one sweep case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimVerdict {
    Ok,
    Violation,
    Skip,
}

impl fmt::Display for ClaimVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimVerdict::Ok => write!(f, "ok"),
            ClaimVerdict::Violation => write!(f, "violation"),
            ClaimVerdict::Skip => write!(f, "skip"),
        }
    }
}

/// One line of a claim sweep report.
#[derive(Debug, Clone)]
pub struct ClaimCase {
    pub r: PosRational,
    pub z: Option<BigRational>,
    pub n: usize,
    pub r_value: Option<BigRational>,
    pub verdict: ClaimVerdict,
}

impl fmt::Display for ClaimCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p/q={} z=", self.r)?;
        match &self.z {
            Some(z) => write!(f, "{z}")?,
            None => write!(f, "-")?,
        }
        write!(f, " n={} R=", self.n)?;
        match &self.r_value {
            Some(v) => write!(f, "{v}")?,
            None => write!(f, "-")?,
        }
        write!(f, " VERDICT={}", self.verdict)
    }
}

/// Full report of a parity sweep.
#[derive(Debug, Clone)]
pub struct ClaimReport {
    pub cases: Vec<ClaimCase>,
}

impl ClaimReport {
    pub fn violations(&self) -> usize {
        self.cases
            .iter()
            .filter(|c| c.verdict == ClaimVerdict::Violation)
            .count()
    }

    pub fn evaluated(&self) -> usize {
        self.cases
            .iter()
            .filter(|c| c.verdict != ClaimVerdict::Skip)
            .count()
    }

    pub fn skips(&self) -> usize {
        self.cases
            .iter()
            .filter(|c| c.verdict == ClaimVerdict::Skip)
            .count()
    }
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for case in &self.cases {
            writeln!(f, "{case}")?;
        }
        write!(
            f,
            "violations: {} / cases: {}",
            self.violations(),
            self.evaluated()
        )
    }
}

/// The parity statement checked by a sweep, as a predicate on (n, R).
fn parity_holds(orientation: Orientation, n: usize, r: &BigRational) -> bool {
    let odd = n % 2 == 1;
    let pos = r.is_positive();
    let in_unit = r.is_negative() && *r > BigRational::from_integer(BigInt::from(-1));
    match orientation {
        // R > 0 for odd n, -1 < R < 0 for even n.
        Orientation::Plus => {
            if odd {
                pos
            } else {
                in_unit
            }
        }
        // Dual statement with the mediant orientation reversed.
        Orientation::Minus => {
            if odd {
                in_unit
            } else {
                pos
            }
        }
    }
}

fn check_claim(pmax: u64, dmax: u64, orientation: Orientation) -> ClaimReport {
    assert!(pmax >= 3, "sweep needs pmax >= 3");
    assert!(dmax >= 1, "sweep needs dmax >= 1");
    // z = d2/d1 iterated independently, deduplicated after reduction.
    let mut zs: Vec<BigRational> = Vec::new();
    {
        let mut seen = std::collections::BTreeSet::new();
        for d1 in 1..=dmax {
            for d2 in 1..=dmax {
                let z = BigRational::new(BigInt::from(d2), BigInt::from(d1));
                if seen.insert(z.clone()) {
                    zs.push(z);
                }
            }
        }
        zs.sort();
    }

    let pairs: Vec<(u64, u64)> = (2..=pmax)
        .flat_map(|p| (1..p).filter(move |q| p.gcd(q) == 1).map(move |q| (p, q)))
        .collect();

    let per_pair: Vec<Vec<ClaimCase>> = pairs
        .par_iter()
        .map(|&(p, q)| {
            let r = PosRational::new(p, q).unwrap();
            let ks = cfe(&r).expect("p/q > 1 by construction");
            let n = ks.len();
            let mp = match mediant_pred(&r, orientation) {
                Ok(mp) => mp,
                Err(_) => {
                    return vec![ClaimCase {
                        r,
                        z: None,
                        n,
                        r_value: None,
                        verdict: ClaimVerdict::Skip,
                    }];
                }
            };
            zs.iter()
                .map(|z| {
                    let rp = blend(&r, &mp, z);
                    match r_value(&ks, &rp) {
                        Ok(val) => {
                            let verdict = if parity_holds(orientation, n, &val) {
                                ClaimVerdict::Ok
                            } else {
                                ClaimVerdict::Violation
                            };
                            ClaimCase {
                                r: r.clone(),
                                z: Some(z.clone()),
                                n,
                                r_value: Some(val),
                                verdict,
                            }
                        }
                        Err(_) => ClaimCase {
                            r: r.clone(),
                            z: Some(z.clone()),
                            n,
                            r_value: None,
                            verdict: ClaimVerdict::Violation,
                        },
                    }
                })
                .collect()
        })
        .collect();

    ClaimReport {
        cases: per_pair.into_iter().flatten().collect(),
    }
}

/// Sweeps the orientation +1 parity statement: R > 0 for odd n and
/// -1 < R < 0 for even n, over all reduced q < p <= pmax and all
/// z = d2/d1 with d1, d2 <= dmax.
pub fn check_claim3(pmax: u64, dmax: u64) -> ClaimReport {
    check_claim(pmax, dmax, Orientation::Plus)
}

/// Sweeps the dual orientation -1 statement: -1 < R < 0 for odd n and
/// R > 0 for even n, over the same grid.
pub fn check_claim4(pmax: u64, dmax: u64) -> ClaimReport {
    check_claim(pmax, dmax, Orientation::Minus)
}
