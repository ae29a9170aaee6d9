//! Reduced words in a free group of finite rank.
//!
//! Generators are numbered from zero. In text form generator `i` is the
//! `i`-th lowercase letter and its inverse is the matching uppercase letter,
//! so `"abABa"` is a word in the free group on two generators. Ranks above 26
//! use arrays of signed one-based integers instead.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter {0:?} is not a generator or inverse")]
    UnknownLetter(char),
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("signed generator 0 is not allowed")]
    ZeroGenerator,
    #[error("the identity has no root")]
    Identity,
    #[error("words of different rank ({0} vs {1})")]
    RankMismatch(usize, usize),
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: u16,
    pub inv: bool,
}

impl Letter {
    pub const fn new(gen: u16, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub const fn pos(gen: u16) -> Self {
        Letter { gen, inv: false }
    }

    pub const fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    pub fn from_char(c: char) -> Result<Self, WordError> {
        if c.is_ascii_lowercase() {
            Ok(Letter::new(c as u16 - 'a' as u16, false))
        } else if c.is_ascii_uppercase() {
            Ok(Letter::new(c as u16 - 'A' as u16, true))
        } else {
            Err(WordError::UnknownLetter(c))
        }
    }

    /// Text form, available for the first 26 generators.
    pub fn to_char(self) -> Option<char> {
        if self.gen >= 26 {
            return None;
        }
        let base = if self.inv { b'A' } else { b'a' };
        Some((base + self.gen as u8) as char)
    }

    pub fn from_signed(x: i32) -> Result<Self, WordError> {
        match x {
            0 => Err(WordError::ZeroGenerator),
            x if x > 0 => Ok(Letter::new((x - 1) as u16, false)),
            x => Ok(Letter::new((-x - 1) as u16, true)),
        }
    }

    pub fn to_signed(self) -> i32 {
        let g = self.gen as i32 + 1;
        if self.inv {
            -g
        } else {
            g
        }
    }

    /// Position in the order `a, A, b, B, ...`.
    pub fn index(self) -> usize {
        2 * self.gen as usize + self.inv as usize
    }

    pub fn from_index(i: usize) -> Self {
        Letter::new((i / 2) as u16, i % 2 == 1)
    }
}

/// A freely reduced word together with the rank of its ambient free group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    n: usize,
    letters: Vec<Letter>,
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Word {
    pub fn identity(n: usize) -> Self {
        Word {
            n,
            letters: Vec::new(),
        }
    }

    pub fn generator(n: usize, gen: usize) -> Result<Self, WordError> {
        Word::from_letters(n, [Letter::pos(gen as u16)])
    }

    /// Freely reduces a sequence of letters.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(
        n: usize,
        it: I,
    ) -> Result<Self, WordError> {
        let mut out = Vec::new();
        for l in it {
            if l.gen as usize >= n {
                return Err(WordError::GeneratorOutOfRange {
                    index: l.gen as usize,
                    rank: n,
                });
            }
            push_reduced(&mut out, l);
        }
        Ok(Word { n, letters: out })
    }

    /// Parses the letter form. The empty string and `"1"` denote the identity.
    pub fn parse(n: usize, s: &str) -> Result<Self, WordError> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::identity(n));
        }
        let letters = s
            .chars()
            .map(Letter::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        Word::from_letters(n, letters)
    }

    pub fn from_signed(n: usize, xs: &[i32]) -> Result<Self, WordError> {
        let letters = xs
            .iter()
            .map(|&x| Letter::from_signed(x))
            .collect::<Result<Vec<_>, _>>()?;
        Word::from_letters(n, letters)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            n: self.n,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// The same letters in reverse order. Not the inverse.
    pub fn reversed(&self) -> Word {
        Word {
            n: self.n,
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        Word {
            n: self.n.max(other.n),
            letters: out,
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::identity(self.n);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `g w g^-1`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.mul(self).mul(&g.inverse())
    }

    /// `[x, y] = x y x^-1 y^-1`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.mul(y).mul(&x.inverse()).mul(&y.inverse())
    }

    /// Splits the word as `u r u^-1` with `r` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut k = 0;
        while 2 * k + 1 < l.len() && l[k] == l[l.len() - 1 - k].inverse() {
            k += 1;
        }
        let u = Word {
            n: self.n,
            letters: l[..k].to_vec(),
        };
        let r = Word {
            n: self.n,
            letters: l[k..l.len() - k].to_vec(),
        };
        (u, r)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.letters.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.n];
        for l in &self.letters {
            sums[l.gen as usize] += if l.inv { -1 } else { 1 };
        }
        sums
    }

    pub fn to_signed(&self) -> Vec<i32> {
        self.letters.iter().map(|l| l.to_signed()).collect()
    }

    /// Shortlex comparison with letter order `a < A < b < B < ...`.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        if self.letters.iter().all(|l| l.gen < 26) {
            for l in &self.letters {
                write!(f, "{}", l.to_char().expect("checked above"))?;
            }
            Ok(())
        } else {
            write!(f, "{:?}", self.to_signed())
        }
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.n <= 26 {
            s.serialize_str(&self.to_string())
        } else {
            self.to_signed().serialize(s)
        }
    }
}

/// Serialized word before the rank is known.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum WordRepr {
    Text(String),
    Signed(Vec<i32>),
}

impl WordRepr {
    pub fn to_word(&self, n: usize) -> Result<Word, WordError> {
        match self {
            WordRepr::Text(s) => Word::parse(n, s),
            WordRepr::Signed(xs) => Word::from_signed(n, xs),
        }
    }
}

/// Freely reduces a raw letter sequence.
pub fn reduce(n: usize, raw: &[Letter]) -> Result<Word, WordError> {
    Word::from_letters(n, raw.iter().copied())
}

/// Maximal root of a nontrivial word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Root {
    pub root: Word,
    pub exponent: u64,
}

/// Returns `(a, i)` with `w = a^i` and `a` not a proper power.
pub fn maximal_root(w: &Word) -> Result<Root, WordError> {
    if w.is_identity() {
        return Err(WordError::Identity);
    }
    let (u, r) = w.cyclic_reduction();
    let len = r.len();
    let period = (1..=len)
        .filter(|d| len % d == 0)
        .find(|&d| (d..len).all(|i| r.letters[i] == r.letters[i - d]))
        .expect("full length is always a period");
    let d = Word {
        n: w.n,
        letters: r.letters[..period].to_vec(),
    };
    Ok(Root {
        root: d.conjugate_by(&u),
        exponent: (len / period) as u64,
    })
}

/// Finds `t` with `g = a^t`, for nontrivial `a`.
pub fn power_of(a: &Word, g: &Word) -> Option<i64> {
    if a.is_identity() {
        return g.is_identity().then_some(0);
    }
    if g.is_identity() {
        return Some(0);
    }
    let (u, r) = a.cyclic_reduction();
    let body = g.len().checked_sub(2 * u.len())?;
    if body == 0 || body % r.len() != 0 {
        return None;
    }
    let t = (body / r.len()) as i64;
    [t, -t].into_iter().find(|&t| a.pow(t) == *g)
}

/// All reduced words of length at most `max_len`, in shortlex order.
pub fn words_up_to(n: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::identity(n)];
    let mut start = 0;
    for _ in 0..max_len {
        let end = out.len();
        for i in start..end {
            for li in 0..2 * n {
                let l = Letter::from_index(li);
                if out[i].letters.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut letters = out[i].letters.clone();
                letters.push(l);
                out.push(Word { n, letters });
            }
        }
        start = end;
    }
    out
}
