//! Separating elements from subgroups in finite quotients of prescribed order.
//!
//! Quotients are permutation representations given by images of the free
//! generators. Candidate targets come from a small library of `p`-groups.

use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{is_prime, prime_factors, primes_avoiding, valuation};
use crate::fiber::is_l_root_closed;
use crate::perm::{Perm, PermGroup, StabilizerChain};
use crate::stallings::subgroup_graph;
use crate::word::{maximal_root, power_of, Letter, Word};

/// Largest quotient group order handled anywhere.
pub const MAX_QUOTIENT_ORDER: usize = 10_000;
/// Library groups above this order are skipped.
const MAX_LIBRARY_ORDER: usize = 2_500;
/// Assignments are enumerated exhaustively up to this many per group.
const EXHAUSTIVE_LIMIT: usize = 4_096;
/// Random assignments tried per group otherwise.
const RANDOM_TRIALS: usize = 400;
/// How many primes outside `L` are tried.
const PRIMES_TRIED: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SepError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("word is trivial")]
    Identity,
    #[error("{word} is a proper power: {root}^{exponent}")]
    NotMaximal {
        word: Word,
        root: Word,
        exponent: u64,
    },
    #[error("{0} lies in the subgroup")]
    Member(Word),
    #[error("subgroup is not {l}-root-closed: {witness}^{l} lies in it but {witness} does not")]
    NotRootClosed { l: usize, witness: Word },
    #[error("no separating quotient found within a budget of {0} candidates")]
    SearchExhausted(usize),
    #[error("quotient order exceeds the cap {0}")]
    TooLarge(usize),
    #[error("internal check failed: {0}")]
    ClaimViolated(String),
    #[error("words live in free groups of different rank")]
    RankMismatch,
}

/// Primes allowed to divide the order of a quotient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllowedPrimes {
    Only(Vec<u64>),
    CoprimeTo(Vec<u64>),
}

impl AllowedPrimes {
    pub fn allows(&self, q: u64) -> bool {
        match self {
            AllowedPrimes::Only(ps) => ps.contains(&q),
            AllowedPrimes::CoprimeTo(ls) => !ls.contains(&q),
        }
    }

    pub fn allows_order(&self, order: u64) -> bool {
        prime_factors(order).into_iter().all(|q| self.allows(q))
    }
}

/// A homomorphism from a free group to a permutation group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuotient {
    pub name: String,
    pub degree: usize,
    pub images: Vec<Perm>,
}

impl FiniteQuotient {
    pub fn new(name: impl Into<String>, degree: usize, images: Vec<Perm>) -> Self {
        FiniteQuotient {
            name: name.into(),
            degree,
            images,
        }
    }

    pub fn trivial(n: usize) -> Self {
        FiniteQuotient::new("trivial", 1, vec![Perm::identity(1); n])
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    fn letter(&self, l: Letter) -> Perm {
        let x = &self.images[l.gen as usize];
        if l.inv {
            x.inverse()
        } else {
            x.clone()
        }
    }

    /// Image of a word; the last letter acts first.
    pub fn eval(&self, w: &Word) -> Perm {
        w.letters()
            .iter()
            .fold(Perm::identity(self.degree), |acc, &l| {
                acc.compose(&self.letter(l))
            })
    }

    /// The image group, failing above `cap` elements.
    pub fn image(&self, cap: usize) -> Result<PermGroup, SepError> {
        PermGroup::generate(self.degree, &self.images, cap).map_err(|_| SepError::TooLarge(cap))
    }

    pub fn order(&self, cap: usize) -> Result<usize, SepError> {
        Ok(self.image(cap)?.order())
    }

    /// Order of the image without listing its elements.
    pub fn exact_order(&self) -> u128 {
        StabilizerChain::new(self.degree, &self.images)
            .expect("images share the degree")
            .order()
    }

    /// Diagonal map into the direct product.
    pub fn product(&self, other: &FiniteQuotient) -> FiniteQuotient {
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        FiniteQuotient::new(
            format!("{} x {}", self.name, other.name),
            self.degree + other.degree,
            images,
        )
    }

    /// Image of a subgroup given by generators.
    pub fn subgroup_image(&self, gens: &[Word], cap: usize) -> Result<PermGroup, SepError> {
        let imgs: Vec<Perm> = gens.iter().map(|g| self.eval(g)).collect();
        PermGroup::generate(self.degree, &imgs, cap).map_err(|_| SepError::TooLarge(cap))
    }
}

impl Serialize for FiniteQuotient {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Images<'a>(&'a [Perm]);
        impl Serialize for Images<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (i, p) in self.0.iter().enumerate() {
                    let key = Word::generator(self.0.len(), i)
                        .map(|w| w.to_string())
                        .unwrap_or_default();
                    m.serialize_entry(&key, p)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("name", &self.name)?;
        m.serialize_entry("degree", &self.degree)?;
        m.serialize_entry("images", &Images(&self.images))?;
        m.end()
    }
}

/// A finite quotient in which `excluded` maps outside the image of the subgroup.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationWitness {
    pub order: usize,
    pub quotient: FiniteQuotient,
    pub subgroup: Vec<Word>,
    pub excluded: Word,
    pub allowed: AllowedPrimes,
    pub transcript: Vec<String>,
}

/// Why a witness fails verification.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessDefect {
    #[error("quotient has {got} generator images for rank {want}")]
    Rank { got: usize, want: usize },
    #[error("quotient order exceeds {0}")]
    TooLarge(usize),
    #[error("recorded order {recorded} but the image has order {actual}")]
    OrderMismatch { recorded: usize, actual: usize },
    #[error("order {0} has a forbidden prime factor")]
    ForbiddenPrime(usize),
    #[error("excluded word maps into the subgroup image")]
    NotSeparated,
}

/// Recomputes everything a witness claims.
pub fn check_witness(w: &SeparationWitness) -> Result<(), WitnessDefect> {
    let rank = w.excluded.rank();
    if w.quotient.rank() != rank || w.subgroup.iter().any(|s| s.rank() != rank) {
        return Err(WitnessDefect::Rank {
            got: w.quotient.rank(),
            want: rank,
        });
    }
    let image = w
        .quotient
        .image(MAX_QUOTIENT_ORDER)
        .map_err(|_| WitnessDefect::TooLarge(MAX_QUOTIENT_ORDER))?;
    if image.order() != w.order {
        return Err(WitnessDefect::OrderMismatch {
            recorded: w.order,
            actual: image.order(),
        });
    }
    if !w.allowed.allows_order(w.order as u64) {
        return Err(WitnessDefect::ForbiddenPrime(w.order));
    }
    let sub = w
        .quotient
        .subgroup_image(&w.subgroup, MAX_QUOTIENT_ORDER)
        .map_err(|_| WitnessDefect::TooLarge(MAX_QUOTIENT_ORDER))?;
    if sub.contains(&w.quotient.eval(&w.excluded)) {
        return Err(WitnessDefect::NotSeparated);
    }
    Ok(())
}

pub fn verify_witness(w: &SeparationWitness) -> bool {
    check_witness(w).is_ok()
}

/// Limits on the homomorphism search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_candidates: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_candidates: 200_000,
            seed: 0,
        }
    }
}

/// A permutation group from the `p`-group library.
#[derive(Clone, Debug)]
pub struct LibraryGroup {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Perm>,
}

fn cyclic_group(m: usize) -> LibraryGroup {
    LibraryGroup {
        name: format!("Z/{m}"),
        degree: m,
        generators: vec![Perm::cycle(m)],
    }
}

/// Regular representation of `(Z/p)^k` with the standard generators.
fn elementary_abelian(p: usize, k: usize) -> LibraryGroup {
    let degree = p.pow(k as u32);
    let generators = (0..k)
        .map(|i| {
            let step = p.pow(i as u32);
            let images = (0..degree)
                .map(|x| x - (x / step % p) * step + ((x / step + 1) % p) * step)
                .collect();
            Perm::from_images(images).expect("translation is a bijection")
        })
        .collect();
    LibraryGroup {
        name: format!("(Z/{p})^{k}"),
        degree,
        generators,
    }
}

/// Upper unitriangular 3x3 matrices mod `p`, acting on themselves by left multiplication.
fn heisenberg(p: usize) -> LibraryGroup {
    let idx = |a: usize, b: usize, c: usize| (a * p + b) * p + c;
    let left = |g: (usize, usize, usize)| {
        let images = (0..p * p * p)
            .map(|h| {
                let (a, b, c) = (h / (p * p), h / p % p, h % p);
                idx((g.0 + a) % p, (g.1 + b) % p, (g.2 + c + g.0 * b) % p)
            })
            .collect();
        Perm::from_images(images).expect("left multiplication is a bijection")
    };
    LibraryGroup {
        name: format!("Heis({p})"),
        degree: p * p * p,
        generators: vec![left((1, 0, 0)), left((0, 1, 0))],
    }
}

/// `Z/p ≀ Z/p` acting on `p` blocks of size `p`.
fn wreath(p: usize) -> LibraryGroup {
    let blocks =
        Perm::from_images((0..p * p).map(|x| (x + p) % (p * p)).collect()).expect("bijection");
    let inner = Perm::from_images(
        (0..p * p)
            .map(|x| if x < p { (x + 1) % p } else { x })
            .collect(),
    )
    .expect("bijection");
    LibraryGroup {
        name: format!("Z/{p} wr Z/{p}"),
        degree: p * p,
        generators: vec![blocks, inner],
    }
}

/// Candidate target groups for prime `p`, smallest first (the mod-`p` abelianisation is handled separately).
pub fn p_group_library(p: u64) -> Vec<LibraryGroup> {
    let p = p as usize;
    let mut out = vec![cyclic_group(p), elementary_abelian(p, 2)];
    for k in 2..=4 {
        out.push(cyclic_group(p.pow(k)));
    }
    out.push(heisenberg(p));
    if p <= 3 {
        out.push(wreath(p));
    }
    let order = |g: &LibraryGroup| {
        PermGroup::generate(g.degree, &g.generators, MAX_LIBRARY_ORDER + 1)
            .map(|g| g.order())
            .unwrap_or(usize::MAX)
    };
    let mut with_order: Vec<(usize, LibraryGroup)> = out
        .into_iter()
        .map(|g| (order(&g), g))
        .filter(|(o, _)| *o <= MAX_LIBRARY_ORDER)
        .collect();
    with_order.sort_by_key(|(o, _)| *o);
    with_order.into_iter().map(|(_, g)| g).collect()
}

/// The mod-`p` abelianisation `F_n → (Z/p)^n`.
pub fn abelianization(n: usize, p: u64) -> Option<FiniteQuotient> {
    let degree = (p as usize)
        .checked_pow(n as u32)
        .filter(|&d| d <= MAX_QUOTIENT_ORDER)?;
    let g = elementary_abelian(p as usize, n);
    Some(FiniteQuotient::new(g.name, degree, g.generators))
}

/// Enumerates homomorphisms into library groups and returns the first satisfying `accept`.
struct HomSearch {
    rng: ChaCha8Rng,
    used: usize,
    budget: usize,
}

impl HomSearch {
    fn new(budget: SearchBudget) -> Self {
        HomSearch {
            rng: ChaCha8Rng::seed_from_u64(budget.seed),
            used: 0,
            budget: budget.max_candidates,
        }
    }

    fn charge(&mut self) -> Result<(), SepError> {
        self.used += 1;
        if self.used > self.budget {
            Err(SepError::SearchExhausted(self.budget))
        } else {
            Ok(())
        }
    }

    /// Visits assignments into `group`; `visit` returns true to stop.
    fn scan(
        &mut self,
        group: &LibraryGroup,
        n: usize,
        mut visit: impl FnMut(FiniteQuotient) -> bool,
    ) -> Result<bool, SepError> {
        let elems = PermGroup::generate(group.degree, &group.generators, MAX_LIBRARY_ORDER + 1)
            .map_err(|_| SepError::TooLarge(MAX_LIBRARY_ORDER))?;
        let elems = elems.elements();
        let m = elems.len();
        let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(m));
        let make = |idx: &[usize]| {
            FiniteQuotient::new(
                group.name.clone(),
                group.degree,
                idx.iter().map(|&i| elems[i].clone()).collect(),
            )
        };
        match total {
            Some(t) if t <= EXHAUSTIVE_LIMIT => {
                let mut idx = vec![0usize; n];
                for code in 0..t {
                    let mut c = code;
                    for slot in idx.iter_mut() {
                        *slot = c % m;
                        c /= m;
                    }
                    self.charge()?;
                    if visit(make(&idx)) {
                        return Ok(true);
                    }
                }
            }
            _ => {
                for _ in 0..RANDOM_TRIALS {
                    let idx: Vec<usize> = (0..n).map(|_| self.rng.random_range(0..m)).collect();
                    self.charge()?;
                    if visit(make(&idx)) {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}

fn in_cyclic(x: &Perm, gen: &Perm) -> bool {
    let mut y = Perm::identity(gen.degree());
    loop {
        if &y == x {
            return true;
        }
        y = y.compose(gen);
        if y.is_identity() {
            return false;
        }
    }
}

fn check_prime(p: u64) -> Result<(), SepError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(SepError::NotPrime(p))
    }
}

/// Finds a finite `p`-group quotient in which `g` misses the image of the maximal cyclic subgroup `<a>`.
pub fn separate_maximal_cyclic(
    a: &Word,
    g: &Word,
    p: u64,
    budget: SearchBudget,
) -> Result<SeparationWitness, SepError> {
    check_prime(p)?;
    if a.rank() != g.rank() {
        return Err(SepError::RankMismatch);
    }
    let root = maximal_root(a).map_err(|_| SepError::Identity)?;
    if root.exponent != 1 {
        return Err(SepError::NotMaximal {
            word: a.clone(),
            root: root.root,
            exponent: root.exponent,
        });
    }
    if power_of(a, g).is_some() {
        return Err(SepError::Member(g.clone()));
    }
    let mut search = HomSearch::new(budget);
    let found = maximal_cyclic_search(a, g, p, &mut search)?;
    match found {
        Some((q, transcript)) => {
            let order = q.order(MAX_QUOTIENT_ORDER)?;
            Ok(SeparationWitness {
                order,
                quotient: q,
                subgroup: vec![a.clone()],
                excluded: g.clone(),
                allowed: AllowedPrimes::Only(vec![p]),
                transcript,
            })
        }
        None => Err(SepError::SearchExhausted(search.used)),
    }
}

fn maximal_cyclic_search(
    a: &Word,
    g: &Word,
    p: u64,
    search: &mut HomSearch,
) -> Result<Option<(FiniteQuotient, Vec<String>)>, SepError> {
    let n = a.rank();
    let mut transcript = Vec::new();
    let separates = |q: &FiniteQuotient| !in_cyclic(&q.eval(g), &q.eval(a));
    let note = |q: &FiniteQuotient| {
        let comm = q.eval(&Word::commutator(g, a));
        format!(
            "{} separates {g} from <{a}>; image of [g, a] is {}",
            q.name,
            if comm.is_identity() {
                "trivial"
            } else {
                "nontrivial"
            }
        )
    };
    if let Some(q) = abelianization(n, p) {
        search.charge()?;
        if separates(&q) {
            transcript.push(note(&q));
            return Ok(Some((q, transcript)));
        }
        transcript.push(format!("{} does not separate", q.name));
    }
    for group in p_group_library(p) {
        let mut hit = None;
        search.scan(&group, n, |q| {
            if separates(&q) {
                hit = Some(q);
                true
            } else {
                false
            }
        })?;
        match hit {
            Some(q) => {
                transcript.push(note(&q));
                return Ok(Some((q, transcript)));
            }
            None => transcript.push(format!("no assignment into {} separates", group.name)),
        }
    }
    Ok(None)
}

/// Separates `g` from `<c>` in a finite quotient whose order avoids every prime in `ls`.
///
/// Requires `<c>` to be `l`-root-closed for each `l` in `ls`.
pub fn separate_from_cyclic(
    c: &Word,
    g: &Word,
    ls: &[u64],
    budget: SearchBudget,
) -> Result<SeparationWitness, SepError> {
    for &l in ls {
        check_prime(l)?;
    }
    if c.rank() != g.rank() {
        return Err(SepError::RankMismatch);
    }
    let n = c.rank();
    let root = maximal_root(c).map_err(|_| SepError::Identity)?;
    let h = subgroup_graph(n, std::slice::from_ref(c));
    for &l in ls {
        let rc =
            is_l_root_closed(&h, l as usize).map_err(|e| SepError::ClaimViolated(e.to_string()))?;
        if let Some(w) = rc.witness {
            return Err(SepError::NotRootClosed {
                l: l as usize,
                witness: w,
            });
        }
    }
    if h.contains(g) {
        return Err(SepError::Member(g.clone()));
    }
    let (a, i) = (root.root.clone(), root.exponent);
    let allowed = AllowedPrimes::CoprimeTo(ls.to_vec());
    let mut transcript = vec![format!("maximal root of {c} is {a} with exponent {i}")];
    let mut search = HomSearch::new(budget);
    let witness =
        |q: FiniteQuotient, transcript: Vec<String>| -> Result<SeparationWitness, SepError> {
            let order = q.order(MAX_QUOTIENT_ORDER)?;
            let w = SeparationWitness {
                order,
                quotient: q,
                subgroup: vec![c.clone()],
                excluded: g.clone(),
                allowed: allowed.clone(),
                transcript,
            };
            check_witness(&w).map_err(|d| SepError::ClaimViolated(d.to_string()))?;
            Ok(w)
        };

    match power_of(&a, g) {
        None => {
            transcript.push(format!("{g} is not a power of {a}"));
            for p in primes_avoiding(ls, PRIMES_TRIED) {
                transcript.push(format!("trying p = {p}"));
                if let Some((q, t)) = maximal_cyclic_search(&a, g, p, &mut search)? {
                    transcript.extend(t);
                    return witness(q, transcript);
                }
            }
            Err(SepError::SearchExhausted(search.used))
        }
        Some(t) => {
            transcript.push(format!("{g} = {a}^{t}"));
            let t_abs = t.unsigned_abs();
            let p = prime_factors(i)
                .into_iter()
                .find(|&p| t_abs % p.pow(valuation(p, i)) != 0)
                .ok_or_else(|| {
                    SepError::ClaimViolated(format!("{i} divides {t} but g is not in <c>"))
                })?;
            if ls.contains(&p) {
                return Err(SepError::ClaimViolated(format!(
                    "prime {p} divides the root exponent but lies in L"
                )));
            }
            let e = valuation(p, i);
            let m = p.pow(e) as usize;
            transcript.push(format!("p = {p}, v_p({i}) = {e}, {m} does not divide {t}"));
            let z = Perm::cycle(m);
            let sums = a.exponent_sums();
            let total: i64 = sums.iter().sum();
            let mut attempts: Vec<(String, Vec<Perm>)> = Vec::new();
            if let Some(j) = sums.iter().position(|s| s.rem_euclid(p as i64) != 0) {
                let imgs = (0..n)
                    .map(|k| if k == j { z.clone() } else { Perm::identity(m) })
                    .collect();
                attempts.push((format!("Z/{m}, letter {j} to 1"), imgs));
            }
            if total.rem_euclid(p as i64) != 0 {
                attempts.push((format!("Z/{m}, every letter to 1"), vec![z.clone(); n]));
            }
            for (name, imgs) in attempts {
                let q = FiniteQuotient::new(format!("Z/{m}"), m, imgs);
                search.charge()?;
                if !in_cyclic(&q.eval(g), &q.eval(c)) {
                    transcript.push(format!("{name} separates"));
                    return witness(q, transcript);
                }
            }
            transcript.push("exponent sums vanish mod p; searching p-groups".into());
            for group in p_group_library(p) {
                let mut hit = None;
                search.scan(&group, n, |q| {
                    if !in_cyclic(&q.eval(g), &q.eval(c)) {
                        hit = Some(q);
                        true
                    } else {
                        false
                    }
                })?;
                if let Some(q) = hit {
                    transcript.push(format!("{} separates", group.name));
                    return witness(q, transcript);
                }
            }
            Err(SepError::SearchExhausted(search.used))
        }
    }
}

/// A condition on a normal subgroup `J` of finite index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CosetConstraint {
    /// `word ∉ H J`.
    Exclude { subgroup: Vec<Word>, word: Word },
    /// `⋂ u_i H v_i J = ∅` over the listed pairs `(u_i, v_i)`.
    DisjointCosets {
        subgroup: Vec<Word>,
        translates: Vec<(Word, Word)>,
    },
}

impl CosetConstraint {
    pub fn subgroup(&self) -> &[Word] {
        match self {
            CosetConstraint::Exclude { subgroup, .. }
            | CosetConstraint::DisjointCosets { subgroup, .. } => subgroup,
        }
    }
}

/// Evaluates constraints in one quotient, caching subgroup images.
pub struct ConstraintChecker<'a> {
    q: &'a FiniteQuotient,
    images: HashMap<Vec<Word>, PermGroup>,
}

impl<'a> ConstraintChecker<'a> {
    pub fn new(q: &'a FiniteQuotient) -> Self {
        ConstraintChecker {
            q,
            images: HashMap::new(),
        }
    }

    fn image(&mut self, gens: &[Word]) -> Result<&PermGroup, SepError> {
        if !self.images.contains_key(gens) {
            let g = self.q.subgroup_image(gens, MAX_QUOTIENT_ORDER)?;
            self.images.insert(gens.to_vec(), g);
        }
        Ok(&self.images[gens])
    }

    pub fn holds(&mut self, c: &CosetConstraint) -> Result<bool, SepError> {
        let q = self.q;
        match c {
            CosetConstraint::Exclude { subgroup, word } => {
                let x = q.eval(word);
                Ok(!self.image(subgroup)?.contains(&x))
            }
            CosetConstraint::DisjointCosets {
                subgroup,
                translates,
            } => {
                let Some(((u0, v0), rest)) = translates.split_first() else {
                    return Ok(false);
                };
                let rest: Vec<(Perm, Perm)> = rest
                    .iter()
                    .map(|(u, v)| (q.eval(u).inverse(), q.eval(v).inverse()))
                    .collect();
                let (u0, v0) = (q.eval(u0), q.eval(v0));
                let h = self.image(subgroup)?;
                // x = u0 h v0 lies in u_i H v_i iff u_i^-1 x v_i^-1 ∈ H.
                Ok(!h.elements().iter().any(|e| {
                    let x = u0.compose(e).compose(&v0);
                    rest.iter()
                        .all(|(ui, vi)| h.contains(&ui.compose(&x).compose(vi)))
                }))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CosetStrategy {
    /// Multiply together one witness per constraint.
    ProductOfWitnesses,
    /// Look for one library quotient meeting every constraint first.
    SingleQuotientFirst,
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetSolution {
    pub order: usize,
    pub quotient: FiniteQuotient,
    pub allowed: AllowedPrimes,
    pub transcript: Vec<String>,
}

/// Finds a finite quotient of order prime to every `l` in `ls` satisfying all constraints.
///
/// Constraints are monotone: if a quotient satisfies one, so does any quotient
/// through which it factors. The default strategy therefore multiplies
/// individual witnesses and re-checks everything at the end.
pub fn separate_coset_system(
    n: usize,
    constraints: &[CosetConstraint],
    ls: &[u64],
    budget: SearchBudget,
    strategy: CosetStrategy,
) -> Result<CosetSolution, SepError> {
    for &l in ls {
        check_prime(l)?;
    }
    let allowed = AllowedPrimes::CoprimeTo(ls.to_vec());
    let mut transcript = Vec::new();
    let mut search = HomSearch::new(budget);
    let all_hold = |q: &FiniteQuotient| -> Result<bool, SepError> {
        let mut ch = ConstraintChecker::new(q);
        for c in constraints {
            if !ch.holds(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let finish = |q: FiniteQuotient, transcript: Vec<String>| -> Result<CosetSolution, SepError> {
        let order = usize::try_from(q.exact_order()).map_err(|_| SepError::TooLarge(usize::MAX))?;
        if !allowed.allows_order(order as u64) {
            return Err(SepError::ClaimViolated(format!(
                "quotient order {order} has a prime in L"
            )));
        }
        Ok(CosetSolution {
            order,
            quotient: q,
            allowed: allowed.clone(),
            transcript,
        })
    };

    let trivial = FiniteQuotient::trivial(n);
    if all_hold(&trivial)? {
        transcript.push("trivial quotient satisfies every constraint".into());
        return finish(trivial, transcript);
    }

    if strategy == CosetStrategy::SingleQuotientFirst {
        for p in primes_avoiding(ls, PRIMES_TRIED) {
            let lib = p_group_library(p);
            if let Some(q) = abelianization(n, p) {
                search.charge()?;
                if all_hold(&q)? {
                    transcript.push(format!("{} satisfies every constraint", q.name));
                    return finish(q, transcript);
                }
            }
            for group in lib {
                let mut hit = None;
                let mut err = None;
                let r = search.scan(&group, n, |q| match all_hold(&q) {
                    Ok(true) => {
                        hit = Some(q);
                        true
                    }
                    Ok(false) => false,
                    Err(e) => {
                        err = Some(e);
                        true
                    }
                });
                match r {
                    Err(SepError::SearchExhausted(_)) => break,
                    Err(e) => return Err(e),
                    Ok(_) => {}
                }
                if let Some(e) = err {
                    return Err(e);
                }
                if let Some(q) = hit {
                    transcript.push(format!("{} satisfies every constraint", q.name));
                    return finish(q, transcript);
                }
            }
        }
        transcript.push("no single library quotient works; multiplying witnesses".into());
        search = HomSearch::new(budget);
    }

    let mut current = trivial;
    let mut factors: Vec<FiniteQuotient> = Vec::new();
    for (idx, c) in constraints.iter().enumerate() {
        if ConstraintChecker::new(&current).holds(c)? {
            continue;
        }
        let w = match c {
            CosetConstraint::Exclude { subgroup, word }
                if subgroup.len() == 1 && !subgroup[0].is_identity() =>
            {
                let w = separate_from_cyclic(
                    &subgroup[0],
                    word,
                    ls,
                    SearchBudget {
                        seed: budget.seed.wrapping_add(idx as u64),
                        ..budget
                    },
                )?;
                transcript.push(format!(
                    "constraint {idx}: {} of order {} from the cyclic case",
                    w.quotient.name, w.order
                ));
                w.quotient
            }
            _ => {
                let q = best_single_witness(n, c, constraints, &current, ls, &mut search)?;
                transcript.push(format!("constraint {idx}: {}", q.name));
                q
            }
        };
        current = if factors.is_empty() {
            w.clone()
        } else {
            current.product(&w)
        };
        factors.push(w);
    }
    if !all_hold(&current)? {
        return Err(SepError::ClaimViolated(
            "product quotient lost a constraint".into(),
        ));
    }
    // Drop factors the others make redundant.
    let mut i = 0;
    while factors.len() > 1 && i < factors.len() {
        let rest: Vec<&FiniteQuotient> = factors
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q)
            .collect();
        let candidate = rest[1..]
            .iter()
            .fold(rest[0].clone(), |acc, q| acc.product(q));
        if all_hold(&candidate)? {
            transcript.push(format!("dropped redundant factor {}", factors[i].name));
            factors.remove(i);
            current = candidate;
        } else {
            i += 1;
        }
    }
    finish(current, transcript)
}

/// Among the first few quotients satisfying `target`, keeps the one satisfying most other open constraints.
fn best_single_witness(
    n: usize,
    target: &CosetConstraint,
    all: &[CosetConstraint],
    current: &FiniteQuotient,
    ls: &[u64],
    search: &mut HomSearch,
) -> Result<FiniteQuotient, SepError> {
    const KEEP: usize = 16;
    let mut open = Vec::new();
    {
        let mut ch = ConstraintChecker::new(current);
        for c in all {
            if !ch.holds(c)? {
                open.push(c.clone());
            }
        }
    }
    let score = |q: &FiniteQuotient| -> usize {
        let mut ch = ConstraintChecker::new(q);
        open.iter().filter(|c| ch.holds(c).unwrap_or(false)).count()
    };
    let mut best: Option<(usize, FiniteQuotient)> = None;
    let mut found = 0usize;
    for p in primes_avoiding(ls, PRIMES_TRIED) {
        if let Some(q) = abelianization(n, p) {
            search.charge()?;
            if ConstraintChecker::new(&q).holds(target)? {
                found += 1;
                let s = score(&q);
                if best.as_ref().is_none_or(|(b, _)| s > *b) {
                    best = Some((s, q));
                }
            }
        }
        for group in p_group_library(p) {
            if found >= KEEP {
                break;
            }
            let mut err = None;
            search.scan(&group, n, |q| {
                match ConstraintChecker::new(&q).holds(target) {
                    Ok(true) => {
                        found += 1;
                        let s = score(&q);
                        if best.as_ref().is_none_or(|(b, _)| s > *b) {
                            best = Some((s, q));
                        }
                        found >= KEEP
                    }
                    Ok(false) => false,
                    Err(e) => {
                        err = Some(e);
                        true
                    }
                }
            })?;
            if let Some(e) = err {
                return Err(e);
            }
        }
        if best.is_some() {
            break;
        }
    }
    best.map(|(_, q)| q)
        .ok_or(SepError::SearchExhausted(search.used))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    #[test]
    fn library_orders() {
        let orders: Vec<usize> = p_group_library(2)
            .iter()
            .map(|g| {
                PermGroup::generate(g.degree, &g.generators, 10_000)
                    .unwrap()
                    .order()
            })
            .collect();
        assert_eq!(orders, vec![2, 4, 4, 8, 8, 8, 16]);
        let heis = heisenberg(3);
        assert_eq!(
            PermGroup::generate(heis.degree, &heis.generators, 100)
                .unwrap()
                .order(),
            27
        );
        let wr = wreath(3);
        assert_eq!(
            PermGroup::generate(wr.degree, &wr.generators, 100)
                .unwrap()
                .order(),
            81
        );
    }

    #[test]
    fn square_root_case() {
        let wit = separate_from_cyclic(&w("aa"), &w("a"), &[3], SearchBudget::default()).unwrap();
        assert_eq!(wit.order, 2);
        assert!(verify_witness(&wit));
    }

    #[test]
    fn not_root_closed_is_reported() {
        let err =
            separate_from_cyclic(&w("aa"), &w("a"), &[2], SearchBudget::default()).unwrap_err();
        assert_eq!(
            err,
            SepError::NotRootClosed {
                l: 2,
                witness: w("a")
            }
        );
    }

    #[test]
    fn commutator_outside_cyclic() {
        let wit = separate_maximal_cyclic(&w("ab"), &w("ba"), 2, SearchBudget::default()).unwrap();
        assert!(verify_witness(&wit));
        assert!(crate::arith::is_power_of(2, wit.order as u64));
    }

    #[test]
    fn tampering_is_detected() {
        let mut wit =
            separate_from_cyclic(&w("aa"), &w("a"), &[3], SearchBudget::default()).unwrap();
        wit.excluded = w("aa");
        assert!(!verify_witness(&wit));
        let mut wit =
            separate_from_cyclic(&w("aa"), &w("a"), &[3], SearchBudget::default()).unwrap();
        wit.allowed = AllowedPrimes::CoprimeTo(vec![2]);
        assert_eq!(check_witness(&wit), Err(WitnessDefect::ForbiddenPrime(2)));
    }

    #[test]
    fn product_of_two_witnesses() {
        let cs = vec![
            CosetConstraint::Exclude {
                subgroup: vec![w("aa")],
                word: w("a"),
            },
            CosetConstraint::Exclude {
                subgroup: vec![w("bbbb")],
                word: w("bb"),
            },
        ];
        let sol = separate_coset_system(
            2,
            &cs,
            &[3],
            SearchBudget::default(),
            CosetStrategy::ProductOfWitnesses,
        )
        .unwrap();
        assert_eq!(sol.order, 8);
    }
}
