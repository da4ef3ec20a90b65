//! Normal-ordered bosonic operator algebra.
//!
//! An [`OperatorMonomial`] stores, for every mode, the pair `(p, q)` standing for
//! `(a†)^p a^q`. Different modes commute, so a monomial is a tensor product of
//! per-mode normal-ordered factors. Products of monomials are brought back to
//! normal order with the canonical commutator `[a, a†] = 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Powers `(a†)^creation a^annihilation` acting on one mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModePowers {
    pub creation: u32,
    pub annihilation: u32,
}

impl ModePowers {
    pub const IDENTITY: ModePowers = ModePowers {
        creation: 0,
        annihilation: 0,
    };

    pub fn new(creation: u32, annihilation: u32) -> Self {
        Self {
            creation,
            annihilation,
        }
    }

    pub fn adjoint(self) -> Self {
        Self::new(self.annihilation, self.creation)
    }
}

/// Outcome of applying a monomial to a single basis ket.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Action {
    /// An annihilation power exceeded an occupation.
    Zero,
    /// Maps onto the basis ket with the given occupations (stored in the caller's buffer).
    Inside(f64),
    /// Some occupation would reach or exceed its cutoff.
    Outside(f64),
}

/// A normal-ordered product of ladder operators over all modes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperatorMonomial {
    powers: Vec<ModePowers>,
}

impl OperatorMonomial {
    pub fn identity(mode_count: usize) -> Self {
        Self {
            powers: vec![ModePowers::IDENTITY; mode_count],
        }
    }

    pub fn new(powers: Vec<ModePowers>) -> Self {
        Self { powers }
    }

    /// Builds a monomial from `(creation, annihilation)` pairs, one per mode.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        Self {
            powers: pairs.iter().map(|&(p, q)| ModePowers::new(p, q)).collect(),
        }
    }

    /// Replaces the factor on `mode`.
    ///
    /// # Panics
    ///
    /// Panics if `mode` is out of range.
    pub fn with(mut self, mode: usize, creation: u32, annihilation: u32) -> Self {
        self.powers[mode] = ModePowers::new(creation, annihilation);
        self
    }

    /// `N = a†a` on a single mode.
    pub fn number(mode_count: usize, mode: usize) -> Self {
        Self::identity(mode_count).with(mode, 1, 1)
    }

    pub fn mode_count(&self) -> usize {
        self.powers.len()
    }

    pub fn powers(&self) -> &[ModePowers] {
        &self.powers
    }

    pub fn is_identity(&self) -> bool {
        self.powers.iter().all(|p| *p == ModePowers::IDENTITY)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            powers: self.powers.iter().map(|p| p.adjoint()).collect(),
        }
    }

    pub fn max_creation_power(&self) -> u32 {
        self.powers.iter().map(|p| p.creation).max().unwrap_or(0)
    }

    /// Applies the monomial to `|occ⟩`, rewriting `occ` in place to the target ket.
    ///
    /// Coefficients are exact: `a^q|n⟩ = √(n!/(n-q)!)|n-q⟩` followed by
    /// `(a†)^p|m⟩ = √((m+p)!/m!)|m+p⟩`.
    pub(crate) fn act(&self, occ: &mut [usize], cutoffs: &[usize]) -> Action {
        debug_assert_eq!(occ.len(), self.powers.len());
        let mut squared = 1.0_f64;
        let mut outside = false;
        for ((n, powers), &cutoff) in occ.iter_mut().zip(&self.powers).zip(cutoffs) {
            let q = powers.annihilation as usize;
            let p = powers.creation as usize;
            if *n < q {
                return Action::Zero;
            }
            for k in 0..q {
                squared *= (*n - k) as f64;
            }
            let m = *n - q;
            for k in 1..=p {
                squared *= (m + k) as f64;
            }
            *n = m + p;
            if *n >= cutoff {
                outside = true;
            }
        }
        if outside {
            Action::Outside(squared.sqrt())
        } else {
            Action::Inside(squared.sqrt())
        }
    }

    /// Normal-ordered expansion of `self · rhs` as `(coefficient, monomial)` pairs.
    pub fn product(&self, rhs: &OperatorMonomial) -> Result<Vec<(f64, OperatorMonomial)>> {
        if self.mode_count() != rhs.mode_count() {
            return Err(Error::WrongArity {
                expected: self.mode_count(),
                actual: rhs.mode_count(),
            });
        }
        let mut acc: Vec<(f64, Vec<ModePowers>)> =
            vec![(1.0, Vec::with_capacity(self.mode_count()))];
        for (left, right) in self.powers.iter().zip(&rhs.powers) {
            let expansion = mode_product(*left, *right);
            let mut next = Vec::with_capacity(acc.len() * expansion.len());
            for (c, prefix) in &acc {
                for &(d, powers) in &expansion {
                    let mut v = prefix.clone();
                    v.push(powers);
                    next.push((c * d, v));
                }
            }
            acc = next;
        }
        Ok(acc
            .into_iter()
            .map(|(c, p)| (c, OperatorMonomial::new(p)))
            .collect())
    }
}

/// Normal-orders `a^q (a†)^p` by repeatedly applying `a (a†)^k = (a†)^k a + k (a†)^(k-1)`.
///
/// Returns `(coefficient, p', q')` meaning `coefficient · (a†)^p' a^q'`.
pub(crate) fn reorder(q: u32, p: u32) -> Vec<(f64, u32, u32)> {
    let mut terms: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    reorder_into(q, p, 1.0, 0, &mut terms);
    terms.into_iter().map(|((pp, qq), c)| (c, pp, qq)).collect()
}

// Accumulates `coef · a^q (a†)^p a^tail` in normal order.
fn reorder_into(q: u32, p: u32, coef: f64, tail: u32, out: &mut BTreeMap<(u32, u32), f64>) {
    if q == 0 || p == 0 {
        *out.entry((p, q + tail)).or_insert(0.0) += coef;
        return;
    }
    // a^q (a†)^p = a^(q-1) [(a†)^p a + p (a†)^(p-1)]
    reorder_into(q - 1, p, coef, tail + 1, out);
    reorder_into(q - 1, p - 1, coef * p as f64, tail, out);
}

fn mode_product(left: ModePowers, right: ModePowers) -> Vec<(f64, ModePowers)> {
    reorder(left.annihilation, right.creation)
        .into_iter()
        .map(|(c, p, q)| {
            (
                c,
                ModePowers::new(left.creation + p, q + right.annihilation),
            )
        })
        .collect()
}

fn mode_label(mode: usize) -> Option<char> {
    (mode < 26).then(|| (b'a' + mode as u8) as char)
}

/// Text form: one segment per mode separated by `|`, e.g. `ad^1 a^1 | bd^1 b^1`.
/// An all-identity segment prints as `1`.
impl fmt::Display for OperatorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (mode, powers) in self.powers.iter().enumerate() {
            if mode > 0 {
                f.write_str(" | ")?;
            }
            let label = mode_label(mode).ok_or(fmt::Error)?;
            match (powers.creation, powers.annihilation) {
                (0, 0) => f.write_str("1")?,
                (p, 0) => write!(f, "{label}d^{p}")?,
                (0, q) => write!(f, "{label}^{q}")?,
                (p, q) => write!(f, "{label}d^{p} {label}^{q}")?,
            }
        }
        Ok(())
    }
}

/// Parses the monomial text syntax.
///
/// ```text
/// monomial := segment ( '|' segment )*        one segment per mode, in order
/// segment  := '1' | factor ( ('*' | ' ') factor )*
/// factor   := L 'd' [ '^' INT ]               creation power on mode L
///           | L [ '^' INT ]                   annihilation power on mode L
/// ```
///
/// `L` is the mode letter (`a` for mode 0, `b` for mode 1, ...). Creation
/// factors must precede annihilation factors within a segment; repeated
/// factors of the same kind multiply (`ad*ad` is `ad^2`).
impl FromStr for OperatorMonomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut powers = Vec::new();
        for (mode, segment) in s.split('|').enumerate() {
            let label =
                mode_label(mode).ok_or_else(|| Error::Parse(format!("too many modes in '{s}'")))?;
            powers.push(parse_segment(segment.trim(), label)?);
        }
        Ok(Self { powers })
    }
}

fn parse_segment(segment: &str, label: char) -> Result<ModePowers> {
    let mut powers = ModePowers::IDENTITY;
    if segment == "1" || segment.is_empty() {
        return Ok(powers);
    }
    let mut seen_annihilation = false;
    for factor in segment
        .split(|c: char| c == '*' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let (head, exponent) = match factor.split_once('^') {
            Some((h, e)) => {
                let e: u32 = e
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in '{factor}'")))?;
                (h, e)
            }
            None => (factor, 1),
        };
        let mut chars = head.chars();
        if chars.next() != Some(label) {
            return Err(Error::Parse(format!(
                "factor '{factor}' does not act on mode '{label}'"
            )));
        }
        match chars.as_str() {
            "d" => {
                if seen_annihilation {
                    return Err(Error::Parse(format!("'{segment}' is not normal ordered")));
                }
                powers.creation += exponent;
            }
            "" => {
                seen_annihilation = true;
                powers.annihilation += exponent;
            }
            other => {
                return Err(Error::Parse(format!("unknown factor suffix '{other}'")));
            }
        }
    }
    Ok(powers)
}

/// A finite linear combination of normal-ordered monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSum {
    mode_count: usize,
    terms: BTreeMap<OperatorMonomial, Complex64>,
}

impl OperatorSum {
    pub fn zero(mode_count: usize) -> Self {
        Self {
            mode_count,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(mode_count: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, OperatorMonomial)>,
    {
        let mut sum = Self::zero(mode_count);
        for (c, m) in terms {
            sum.add_term(c, m)?;
        }
        Ok(sum)
    }

    pub fn add_term(&mut self, coefficient: Complex64, monomial: OperatorMonomial) -> Result<()> {
        if monomial.mode_count() != self.mode_count {
            return Err(Error::WrongArity {
                expected: self.mode_count,
                actual: monomial.mode_count(),
            });
        }
        let entry = self
            .terms
            .entry(monomial)
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += coefficient;
        Ok(())
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OperatorMonomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, monomial: &OperatorMonomial) -> Complex64 {
        self.terms
            .get(monomial)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mode_count: self.mode_count,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.adjoint(), c.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            mode_count: self.mode_count,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    /// Normal-ordered product `self · rhs`.
    pub fn product(&self, rhs: &OperatorSum) -> Result<OperatorSum> {
        if self.mode_count != rhs.mode_count {
            return Err(Error::WrongArity {
                expected: self.mode_count,
                actual: rhs.mode_count,
            });
        }
        let mut out = Self::zero(self.mode_count);
        for (lm, lc) in &self.terms {
            for (rm, rc) in &rhs.terms {
                for (k, m) in lm.product(rm)? {
                    out.add_term(lc * rc * k, m)?;
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// `[self, rhs] = self·rhs − rhs·self`, normal ordered.
    pub fn commutator(&self, rhs: &OperatorSum) -> Result<OperatorSum> {
        let forward = self.product(rhs)?;
        let backward = rhs.product(self)?;
        let mut out = forward + backward.scale(Complex64::new(-1.0, 0.0));
        out.prune();
        Ok(out)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() != 0.0);
    }
}

impl Add for OperatorSum {
    type Output = OperatorSum;

    fn add(mut self, rhs: OperatorSum) -> OperatorSum {
        assert_eq!(self.mode_count, rhs.mode_count, "mode count mismatch");
        for (m, c) in rhs.terms {
            *self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        self
    }
}

impl Mul<Complex64> for &OperatorSum {
    type Output = OperatorSum;

    fn mul(self, rhs: Complex64) -> OperatorSum {
        self.scale(rhs)
    }
}

impl From<OperatorMonomial> for OperatorSum {
    fn from(m: OperatorMonomial) -> Self {
        let mut terms = BTreeMap::new();
        let mode_count = m.mode_count();
        terms.insert(m, Complex64::new(1.0, 0.0));
        Self { mode_count, terms }
    }
}

/// An [`OperatorSum`] that equals its own adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianCombination {
    sum: OperatorSum,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl HermitianCombination {
    /// Checks term by term that the adjoint monomial carries the conjugate coefficient.
    pub fn new(sum: OperatorSum) -> Result<Self> {
        for (m, coef) in sum.terms() {
            let partner = sum.coefficient(&m.adjoint());
            let scale = coef.norm().max(1.0);
            if (partner - coef.conj()).norm() > HERMITIAN_TOL * scale {
                return Err(Error::NotHermitianCombination(format!(
                    "term {coef} · [{m}] has adjoint coefficient {partner}"
                )));
            }
        }
        Ok(Self { sum })
    }

    pub fn from_terms<I>(mode_count: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, OperatorMonomial)>,
    {
        Self::new(OperatorSum::from_terms(mode_count, terms)?)
    }

    pub fn as_sum(&self) -> &OperatorSum {
        &self.sum
    }

    pub fn mode_count(&self) -> usize {
        self.sum.mode_count()
    }

    /// Normal-ordered square, used for variances.
    pub fn square(&self) -> Result<OperatorSum> {
        self.sum.product(&self.sum)
    }

    fn two_mode(terms: &[(Complex64, [(u32, u32); 2])]) -> Self {
        Self::from_terms(
            2,
            terms
                .iter()
                .map(|(coef, pairs)| (*coef, OperatorMonomial::from_pairs(pairs))),
        )
        .expect("built-in combinations are Hermitian")
    }

    /// `L₁ = ab† + a†b`.
    pub fn l1() -> Self {
        Self::two_mode(&[
            (c(1.0, 0.0), [(0, 1), (1, 0)]),
            (c(1.0, 0.0), [(1, 0), (0, 1)]),
        ])
    }

    /// `L₂ = i(ab† − a†b)`.
    pub fn l2() -> Self {
        Self::two_mode(&[
            (c(0.0, 1.0), [(0, 1), (1, 0)]),
            (c(0.0, -1.0), [(1, 0), (0, 1)]),
        ])
    }

    /// `L₃ = N_a − N_b`; with `J_i = L_i/2` the three close su(2).
    pub fn l3() -> Self {
        Self::two_mode(&[
            (c(1.0, 0.0), [(1, 1), (0, 0)]),
            (c(-1.0, 0.0), [(0, 0), (1, 1)]),
        ])
    }

    /// `K₁ = ab + a†b†`.
    pub fn k1() -> Self {
        Self::k_phi(0.0)
    }

    /// `K₂ = i(a†b† − ab)`.
    pub fn k2() -> Self {
        Self::k_phi(std::f64::consts::FRAC_PI_2)
    }

    /// `K₃ = N_a + N_b + 1`; with `K_i/2` the three close su(1,1).
    pub fn k3() -> Self {
        Self::two_mode(&[
            (c(1.0, 0.0), [(1, 1), (0, 0)]),
            (c(1.0, 0.0), [(0, 0), (1, 1)]),
            (c(1.0, 0.0), [(0, 0), (0, 0)]),
        ])
    }

    /// `K(φ) = e^{iφ} a†b† + e^{−iφ} ab`.
    pub fn k_phi(phi: f64) -> Self {
        let (s, co) = phi.sin_cos();
        // exact zeros at the quarter turns keep K₁/K₂ free of 1e-17 residue
        let clean = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
        let phase = c(clean(co), clean(s));
        Self::two_mode(&[(phase, [(1, 0), (1, 0)]), (phase.conj(), [(0, 1), (0, 1)])])
    }

    /// Number operator on one mode.
    pub fn number(mode_count: usize, mode: usize) -> Self {
        Self::from_terms(
            mode_count,
            [(c(1.0, 0.0), OperatorMonomial::number(mode_count, mode))],
        )
        .expect("number operator is Hermitian")
    }
}
