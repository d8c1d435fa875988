//! Pauli strings in symplectic (x-bits, z-bits) form and their weighted sums.
//!
//! A letter pattern is stored as two `u64` masks: qubit `q` carries `X` when
//! only its x bit is set, `Z` when only its z bit is set and `Y` when both are.
//! Every letter denotes the Hermitian Pauli matrix, so all phases live in the
//! coefficient and a sum is Hermitian exactly when its coefficients are real.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};

/// Widest register a [`PauliWord`] can address.
pub const MAX_QUBITS: usize = 64;
/// Coefficients with modulus below this are dropped after merging.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;
/// Largest register [`PauliSum::to_dense`] will expand.
pub const DENSE_QUBIT_LIMIT: usize = 14;

const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Phase-free letter pattern of a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliWord {
    x: u64,
    z: u64,
}

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord { x: 0, z: 0 };

    pub fn from_masks(x: u64, z: u64) -> Self {
        PauliWord { x, z }
    }

    pub fn single(qubit: usize, letter: Letter) -> Self {
        let mut w = PauliWord::IDENTITY;
        w.set(qubit, letter);
        w
    }

    /// Builds a word from `(qubit, letter)` pairs; later entries overwrite earlier ones.
    pub fn from_pairs(pairs: &[(usize, Letter)]) -> Self {
        let mut w = PauliWord::IDENTITY;
        for &(q, l) in pairs {
            w.set(q, l);
        }
        w
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut w = PauliWord::IDENTITY;
        for (q, &l) in letters.iter().enumerate() {
            w.set(q, l);
        }
        w
    }

    pub fn set(&mut self, qubit: usize, letter: Letter) {
        assert!(qubit < MAX_QUBITS, "qubit {qubit} exceeds word width");
        let bit = 1u64 << qubit;
        let (x, z) = letter.bits();
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        Letter::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Highest qubit index touched, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        let s = self.support();
        (s != 0).then(|| 63 - s.leading_zeros() as usize)
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let s = self.support();
        (0..MAX_QUBITS).filter(move |q| s >> q & 1 == 1)
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Matrix product `self · other` as `(phase, word)` with phase in {±1, ±i}.
    pub fn product(&self, other: &PauliWord) -> (Complex64, PauliWord) {
        let (ax, az, bx, bz) = (self.x, self.z, other.x, other.z);
        let a_x = ax & !az;
        let a_y = ax & az;
        let a_z = !ax & az;
        let b_x = bx & !bz;
        let b_y = bx & bz;
        let b_z = !bx & bz;
        // XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i.
        let plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x);
        let minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z);
        let k = (plus.count_ones() as i64 - minus.count_ones() as i64).rem_euclid(4);
        (
            i_pow(k as u32),
            PauliWord {
                x: ax ^ bx,
                z: az ^ bz,
            },
        )
    }

    /// Action on a computational basis state: `P|s⟩ = phase · |s'⟩`.
    #[inline]
    pub fn apply_to_basis(&self, s: u64) -> (Complex64, u64) {
        let sign = if (s & self.z).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        (i_pow(self.y_count()) * sign, s ^ self.x)
    }

    /// `i^{#Y}`, the constant phase of `P|s⟩` before the z-parity sign.
    #[inline]
    pub fn y_phase(&self) -> Complex64 {
        i_pow(self.y_count())
    }

    pub fn letters(&self, n_qubits: usize) -> Vec<Letter> {
        (0..n_qubits).map(|q| self.letter(q)).collect()
    }

    fn fits(&self, n_qubits: usize) -> bool {
        n_qubits >= MAX_QUBITS || self.support() >> n_qubits == 0
    }
}

impl fmt::Display for PauliWord {
    /// Renders as `X0 Z1 Y4`; the identity renders as `I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for q in self.qubits() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", self.letter(q).as_char(), q)?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => I_UNIT,
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A single weighted Pauli string on `n_qubits`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    pub n_qubits: usize,
    pub word: PauliWord,
    pub coeff: Complex64,
}

impl PauliString {
    pub fn new(n_qubits: usize, word: PauliWord, coeff: Complex64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "qubits per Pauli string",
                requested: n_qubits,
                limit: MAX_QUBITS,
            });
        }
        if !word.fits(n_qubits) {
            return Err(Error::IndexOutOfRange {
                index: word.max_qubit().unwrap_or(0),
                bound: n_qubits,
            });
        }
        Ok(PauliString {
            n_qubits,
            word,
            coeff,
        })
    }

    pub fn from_letters(letters: &[Letter], coeff: Complex64) -> Result<Self> {
        PauliString::new(letters.len(), PauliWord::from_letters(letters), coeff)
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.word.letters(self.n_qubits)
    }
}

/// Matrix product of two Pauli strings with the phase folded into the coefficient.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    check_dim(a.n_qubits, b.n_qubits)?;
    let (phase, word) = a.word.product(&b.word);
    Ok(PauliString {
        n_qubits: a.n_qubits,
        word,
        coeff: a.coeff * b.coeff * phase,
    })
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, &self.word, self.coeff)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, word: &PauliWord, coeff: Complex64) -> fmt::Result {
    write!(f, "({coeff})")?;
    if !word.is_identity() {
        write!(f, " {word}")?;
    }
    Ok(())
}

/// Linear combination of Pauli strings keyed by letter pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliWord, Complex64>,
    tol: f64,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        assert!(
            (1..=MAX_QUBITS).contains(&n_qubits),
            "PauliSum supports 1..={MAX_QUBITS} qubits"
        );
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
            tol: DEFAULT_PRUNE_TOL,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.prune();
        self
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        let mut s = PauliSum::new(n_qubits);
        s.add_term(PauliWord::IDENTITY, Complex64::new(coeff, 0.0));
        s
    }

    pub fn from_string(p: &PauliString) -> Self {
        let mut s = PauliSum::new(p.n_qubits);
        s.add_term(p.word, p.coeff);
        s
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (PauliWord, Complex64)>,
    {
        let mut s = PauliSum::new(n_qubits);
        for (w, c) in terms {
            s.add_term(w, c);
        }
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (letter-pattern) order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, &Complex64)> {
        self.terms.iter()
    }

    pub fn strings(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms.iter().map(move |(w, c)| PauliString {
            n_qubits: self.n_qubits,
            word: *w,
            coeff: *c,
        })
    }

    pub fn coeff(&self, word: &PauliWord) -> Complex64 {
        self.terms.get(word).copied().unwrap_or_default()
    }

    /// Adds `coeff · word`, merging with an existing entry and pruning dust.
    pub fn add_term(&mut self, word: PauliWord, coeff: Complex64) {
        assert!(
            word.fits(self.n_qubits),
            "word {word} does not fit in {} qubits",
            self.n_qubits
        );
        let tol = self.tol;
        let entry = self.terms.entry(word).or_default();
        *entry += coeff;
        if entry.norm() < tol {
            self.terms.remove(&word);
        }
    }

    pub fn add_string(&mut self, p: &PauliString) -> Result<()> {
        check_dim(self.n_qubits, p.n_qubits)?;
        self.add_term(p.word, p.coeff);
        Ok(())
    }

    fn prune(&mut self) {
        let tol = self.tol;
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    fn from_raw(n_qubits: usize, tol: f64, raw: BTreeMap<PauliWord, Complex64>) -> Self {
        let mut s = PauliSum {
            n_qubits,
            terms: raw,
            tol,
        };
        s.prune();
        s
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let raw = self.terms.iter().map(|(w, c)| (*w, c * factor)).collect();
        PauliSum::from_raw(self.n_qubits, self.tol, raw)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn try_add(&self, other: &PauliSum) -> Result<Self> {
        check_dim(self.n_qubits, other.n_qubits)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, *c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &PauliSum) -> Result<Self> {
        self.try_add(&other.scale_real(-1.0))
    }

    /// Operator product `self · other`.
    pub fn try_mul(&self, other: &PauliSum) -> Result<Self> {
        check_dim(self.n_qubits, other.n_qubits)?;
        let mut raw: BTreeMap<PauliWord, Complex64> = BTreeMap::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let (phase, w) = wa.product(wb);
                *raw.entry(w).or_default() += ca * cb * phase;
            }
        }
        Ok(PauliSum::from_raw(self.n_qubits, self.tol, raw))
    }

    /// Hermitian conjugate.
    pub fn dagger(&self) -> Self {
        let raw = self.terms.iter().map(|(w, c)| (*w, c.conj())).collect();
        PauliSum::from_raw(self.n_qubits, self.tol, raw)
    }

    /// True when every coefficient is real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Sum of squared coefficient moduli, i.e. `Tr(A†A) / 2^n`.
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter<F: Fn(&PauliWord, &Complex64) -> bool>(&self, keep: F) -> Self {
        let raw = self
            .terms
            .iter()
            .filter(|(w, c)| keep(w, c))
            .map(|(w, c)| (*w, *c))
            .collect();
        PauliSum::from_raw(self.n_qubits, self.tol, raw)
    }

    /// Dense `2^n × 2^n` matrix; qubit 0 is the least significant index bit.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::Capacity {
                what: "qubits for dense expansion",
                requested: self.n_qubits,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (w, c) in &self.terms {
            for s in 0..dim as u64 {
                let (phase, t) = w.apply_to_basis(s);
                m[(t as usize, s as usize)] += c * phase;
            }
        }
        Ok(m)
    }

    /// Parses one term per non-empty line in the `(re+imi) X0 Z1` format.
    pub fn parse(n_qubits: usize, text: &str) -> Result<Self> {
        let mut s = PauliSum::new(n_qubits);
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, coeff) = parse_term(line)?;
            if !word.fits(n_qubits) {
                return Err(Error::Parse(format!(
                    "term `{line}` exceeds {n_qubits} qubits"
                )));
            }
            s.add_term(word, coeff);
        }
        Ok(s)
    }
}

/// `a·b − b·a`, merged and pruned.
///
/// Only anticommuting pairs contribute (`2ab`); rows of `a` are processed in
/// parallel and merged in canonical order so the result is deterministic.
pub fn commutator(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    check_dim(a.n_qubits, b.n_qubits)?;
    let b_terms: Vec<(PauliWord, Complex64)> = b.terms.iter().map(|(w, c)| (*w, *c)).collect();
    let a_terms: Vec<(PauliWord, Complex64)> = a.terms.iter().map(|(w, c)| (*w, *c)).collect();
    let rows: Vec<Vec<(PauliWord, Complex64)>> = a_terms
        .par_iter()
        .map(|(wa, ca)| {
            b_terms
                .iter()
                .filter(|(wb, _)| !wa.commutes_with(wb))
                .map(|(wb, cb)| {
                    let (phase, w) = wa.product(wb);
                    (w, ca * cb * phase * 2.0)
                })
                .collect()
        })
        .collect();
    let mut raw: BTreeMap<PauliWord, Complex64> = BTreeMap::new();
    for row in rows {
        for (w, c) in row {
            *raw.entry(w).or_default() += c;
        }
    }
    Ok(PauliSum::from_raw(a.n_qubits, a.tol, raw))
}

/// Normalised trace `Tr(a·b) / 2^n`: only matching letter patterns survive.
pub fn trace_product(a: &PauliSum, b: &PauliSum) -> Result<Complex64> {
    check_dim(a.n_qubits, b.n_qubits)?;
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    Ok(small
        .terms
        .iter()
        .filter_map(|(w, c)| large.terms.get(w).map(|d| c * d))
        .sum())
}

fn parse_term(line: &str) -> Result<(PauliWord, Complex64)> {
    let err = || Error::Parse(format!("malformed term `{line}`"));
    let rest = line.strip_prefix('(').ok_or_else(err)?;
    let close = rest.find(')').ok_or_else(err)?;
    let coeff = Complex64::from_str(rest[..close].trim()).map_err(|_| err())?;
    let mut word = PauliWord::IDENTITY;
    for tok in rest[close + 1..].split_whitespace() {
        let mut chars = tok.chars();
        let letter = match chars.next() {
            Some('X') => Letter::X,
            Some('Y') => Letter::Y,
            Some('Z') => Letter::Z,
            Some('I') => Letter::I,
            _ => return Err(err()),
        };
        let idx = chars.as_str();
        if idx.is_empty() {
            if letter == Letter::I {
                continue;
            }
            return Err(err());
        }
        let q: usize = idx.parse().map_err(|_| err())?;
        if q >= MAX_QUBITS {
            return Err(err());
        }
        if word.letter(q) != Letter::I {
            return Err(Error::Parse(format!("qubit {q} repeated in `{line}`")));
        }
        word.set(q, letter);
    }
    Ok((word, coeff))
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses a single term; the register is sized to the highest qubit present.
    fn from_str(s: &str) -> Result<Self> {
        let (word, coeff) = parse_term(s.trim())?;
        let n = word.max_qubit().map_or(1, |q| q + 1);
        PauliString::new(n, word, coeff)
    }
}

impl fmt::Display for PauliSum {
    /// One term per line, canonical order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, c) in &self.terms {
            write_term(f, w, *c)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        self.try_add(rhs).expect("qubit counts differ")
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: &PauliSum) -> PauliSum {
        self.try_sub(rhs).expect("qubit counts differ")
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        self.try_mul(rhs).expect("qubit counts differ")
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one(letters: &str) -> PauliString {
        let ls: Vec<Letter> = letters
            .chars()
            .map(|ch| match ch {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                _ => unreachable!(),
            })
            .collect();
        PauliString::from_letters(&ls, c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        let xy = multiply(&one("X"), &one("Y")).unwrap();
        assert_eq!(xy.word, PauliWord::single(0, Letter::Z));
        assert_eq!(xy.coeff, c(0.0, 1.0));
        let zz = multiply(&one("Z"), &one("Z")).unwrap();
        assert!(zz.word.is_identity());
        assert_eq!(zz.coeff, c(1.0, 0.0));
    }

    #[test]
    fn mismatched_widths_rejected() {
        assert!(matches!(
            multiply(&one("X"), &one("XX")),
            Err(Error::Dimension { .. })
        ));
        let a = PauliSum::identity(1, 1.0);
        let b = PauliSum::identity(2, 1.0);
        assert!(commutator(&a, &b).is_err());
        assert!(trace_product(&a, &b).is_err());
    }

    #[test]
    fn letter_table_anticommutes() {
        let letters = [Letter::X, Letter::Y, Letter::Z];
        for &a in &letters {
            for &b in &letters {
                let pa = PauliString::from_letters(&[a], c(1.0, 0.0)).unwrap();
                let pb = PauliString::from_letters(&[b], c(1.0, 0.0)).unwrap();
                let ab = multiply(&pa, &pb).unwrap();
                let ba = multiply(&pb, &pa).unwrap();
                assert_eq!(ab.word, ba.word);
                if a == b {
                    assert_eq!(ab.coeff, ba.coeff);
                } else {
                    assert_eq!(ab.coeff, -ba.coeff);
                }
            }
        }
    }

    #[test]
    fn basic_commutators() {
        let z = PauliSum::from_string(&one("Z"));
        let x = PauliSum::from_string(&one("X"));
        let zx = commutator(&z, &x).unwrap();
        assert_eq!(zx.len(), 1);
        assert_eq!(zx.coeff(&PauliWord::single(0, Letter::Y)), c(0.0, 2.0));
        assert!(commutator(&x, &x).unwrap().is_empty());
    }

    #[test]
    fn trace_product_orthogonality() {
        let xx = PauliSum::from_string(&one("XX"));
        assert_eq!(trace_product(&xx, &xx).unwrap(), c(1.0, 0.0));
        let x = PauliSum::from_string(&one("X"));
        let z = PauliSum::from_string(&one("Z"));
        assert_eq!(trace_product(&x, &z).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn dense_small_cases() {
        let z = PauliSum::from_string(&one("Z")).to_dense().unwrap();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));
        assert_eq!(z[(0, 1)], c(0.0, 0.0));
        let id = PauliSum::identity(2, 1.0).to_dense().unwrap();
        assert_eq!(id, DMatrix::identity(4, 4));
        let big = PauliSum::identity(15, 1.0);
        assert!(matches!(big.to_dense(), Err(Error::Capacity { .. })));
    }

    #[test]
    fn pruning_removes_cancellation_dust() {
        let mut s = PauliSum::new(2);
        let w = PauliWord::single(1, Letter::X);
        s.add_term(w, c(1.0, 0.0));
        s.add_term(w, c(-1.0 + 1e-14, 0.0));
        assert!(s.is_empty());
    }

    #[test]
    fn text_format() {
        let p: PauliString = "(0.5+0i) X0 Z1 X2".parse().unwrap();
        assert_eq!(p.n_qubits, 3);
        assert_eq!(p.to_string(), "(0.5+0i) X0 Z1 X2");
        let s = PauliSum::parse(3, "(1.5+0i)\n(-0.25+0i) Z0 Z1\n").unwrap();
        assert_eq!(s.coeff(&PauliWord::IDENTITY), c(1.5, 0.0));
        assert_eq!(PauliSum::parse(3, &s.to_string()).unwrap(), s);
        assert!(PauliSum::parse(2, "(1+0i) X5").is_err());
        assert!(PauliSum::parse(2, "X0").is_err());
        assert!(PauliSum::parse(2, "(1+0i) X0 Z0").is_err());
    }
}
