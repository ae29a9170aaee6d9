//! Brute-force reference implementations used to cross-check the graph algorithms.
//!
//! Nothing here touches Stallings graphs. Membership is decided through a
//! Nielsen-reduced basis: products of such a basis never shrink below the
//! length of any prefix, so bounded enumeration is complete.

use std::collections::{BTreeSet, HashSet, VecDeque};

use itertools::Itertools;
use thiserror::Error;

use crate::hypertournament::Hypertournament;
use crate::word::{words_up_to, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("Nielsen reduction did not converge within {0} states")]
    Stuck(usize),
}

const MAX_STATES: usize = 200_000;

/// Checks the three Nielsen conditions for `ys`.
pub fn is_n_reduced(ys: &[Word]) -> bool {
    if ys.iter().any(Word::is_identity) {
        return false;
    }
    let sym: Vec<Word> = ys.iter().flat_map(|y| [y.clone(), y.inverse()]).collect();
    for u in &sym {
        for v in &sym {
            let uv = u.mul(v);
            if uv.is_identity() {
                continue;
            }
            if uv.len() < u.len() || uv.len() < v.len() {
                return false;
            }
            for w in &sym {
                if v.mul(w).is_identity() {
                    continue;
                }
                if (uv.mul(w).len() as i64) <= u.len() as i64 - v.len() as i64 + w.len() as i64 {
                    return false;
                }
            }
        }
    }
    true
}

/// Greedy length reduction by elementary Nielsen moves.
fn shorten(ys: &mut Vec<Word>) {
    loop {
        ys.retain(|y| !y.is_identity());
        let mut changed = false;
        'outer: for i in 0..ys.len() {
            for j in 0..ys.len() {
                if i == j {
                    continue;
                }
                for u in [ys[i].clone(), ys[i].inverse()] {
                    for v in [ys[j].clone(), ys[j].inverse()] {
                        for cand in [u.mul(&v), v.mul(&u)] {
                            if cand.len() < ys[i].len() {
                                ys[i] = cand;
                                changed = true;
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn normal_form(ys: &[Word]) -> Vec<Word> {
    let mut v: Vec<Word> = ys
        .iter()
        .map(|y| {
            let yi = y.inverse();
            if yi.shortlex_cmp(y).is_lt() {
                yi
            } else {
                y.clone()
            }
        })
        .collect();
    v.sort_by(|a, b| a.shortlex_cmp(b));
    v
}

/// Carries a generating set to a Nielsen-reduced free basis of the same subgroup.
pub fn nielsen_reduce(gens: &[Word]) -> Result<Vec<Word>, OracleError> {
    let mut ys = gens.to_vec();
    loop {
        shorten(&mut ys);
        if is_n_reduced(&ys) {
            return Ok(normal_form(&ys));
        }
        // Explore length-preserving moves until a reduced set or a shortening move appears.
        let start = normal_form(&ys);
        let total: usize = start.iter().map(Word::len).sum();
        let mut seen: HashSet<Vec<Word>> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        let mut next = None;
        'bfs: while let Some(state) = queue.pop_front() {
            for i in 0..state.len() {
                for j in 0..state.len() {
                    if i == j {
                        continue;
                    }
                    for u in [state[i].clone(), state[i].inverse()] {
                        for v in [state[j].clone(), state[j].inverse()] {
                            for cand in [u.mul(&v), v.mul(&u)] {
                                if cand.len() > state[i].len() {
                                    continue;
                                }
                                let mut s = state.clone();
                                s[i] = cand;
                                let len: usize = s.iter().map(Word::len).sum();
                                if len < total || is_n_reduced(&s) {
                                    next = Some(s);
                                    break 'bfs;
                                }
                                let s = normal_form(&s);
                                if seen.insert(s.clone()) {
                                    if seen.len() > MAX_STATES {
                                        return Err(OracleError::Stuck(MAX_STATES));
                                    }
                                    queue.push_back(s);
                                }
                            }
                        }
                    }
                }
            }
        }
        match next {
            Some(s) => ys = s,
            None => return Err(OracleError::Stuck(seen.len())),
        }
    }
}

/// Subgroup membership and enumeration from a Nielsen-reduced basis.
#[derive(Clone, Debug)]
pub struct NielsenOracle {
    n: usize,
    basis: Vec<Word>,
    sym: Vec<Word>,
}

impl NielsenOracle {
    pub fn new(n: usize, gens: &[Word]) -> Result<Self, OracleError> {
        let basis = nielsen_reduce(gens)?;
        let sym = basis
            .iter()
            .flat_map(|y| [y.clone(), y.inverse()])
            .collect();
        Ok(NielsenOracle { n, basis, sym })
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.is_identity() || self.search(&Word::identity(self.n), None, w, 0)
    }

    fn search(&self, p: &Word, last: Option<usize>, w: &Word, depth: usize) -> bool {
        if p == w {
            return true;
        }
        if depth >= w.len() {
            return false;
        }
        for (k, y) in self.sym.iter().enumerate() {
            if last == Some(k ^ 1) {
                continue;
            }
            let q = p.mul(y);
            if q.len() > w.len() + y.len() {
                continue;
            }
            let lcp = q
                .letters()
                .iter()
                .zip(w.letters())
                .take_while(|(a, b)| a == b)
                .count();
            if lcp + y.len() < q.len() {
                continue;
            }
            if self.search(&q, Some(k), w, depth + 1) {
                return true;
            }
        }
        false
    }

    /// All subgroup elements of length at most `radius`.
    pub fn ball(&self, radius: usize) -> HashSet<Word> {
        let mut out = HashSet::from([Word::identity(self.n)]);
        let mut stack = vec![(Word::identity(self.n), None::<usize>)];
        while let Some((p, last)) = stack.pop() {
            for (k, y) in self.sym.iter().enumerate() {
                if last == Some(k ^ 1) {
                    continue;
                }
                let q = p.mul(y);
                if q.len() <= radius {
                    out.insert(q.clone());
                    stack.push((q, Some(k)));
                }
            }
        }
        out
    }
}

/// Searches for `g ∉ H` with `|g| ≤ conj_len` and `1 ≠ h ∈ H`, `|h| ≤ inter_len`, with `g^-1 h g ∈ H`.
pub fn malnormal_counterexample(
    h: &NielsenOracle,
    conj_len: usize,
    inter_len: usize,
) -> Option<(Word, Word)> {
    let elems: Vec<Word> = {
        let mut v: Vec<Word> = h
            .ball(inter_len)
            .into_iter()
            .filter(|w| !w.is_identity())
            .collect();
        v.sort_by(|a, b| a.shortlex_cmp(b));
        v
    };
    let ball: HashSet<Word> = elems.iter().cloned().collect();
    let conj: Vec<Word> = words_up_to(h.n, conj_len)
        .into_iter()
        .filter(|g| !h.contains(g))
        .collect();
    for g in &conj {
        for x in &elems {
            let c = x.conjugate_by(&g.inverse());
            if ball.contains(&c) {
                return Some((g.clone(), x.clone()));
            }
        }
    }
    for g in &conj {
        for x in &elems {
            let c = x.conjugate_by(&g.inverse());
            if c.len() > inter_len && h.contains(&c) {
                return Some((g.clone(), x.clone()));
            }
        }
    }
    None
}

/// Searches for `w ∉ H` with `w^l ∈ H` and `|w| ≤ max_len`.
pub fn root_counterexample(h: &NielsenOracle, l: usize, max_len: usize) -> Option<Word> {
    words_up_to(h.n, max_len)
        .into_iter()
        .find(|w| !h.contains(w) && h.contains(&w.pow(l as i64)))
}

/// Rank of a matrix over `Z/p` by counting its kernel.
pub fn brute_force_rank(p: u64, rows: &[Vec<u64>], cols: usize) -> usize {
    let total = (p as usize).pow(cols as u32);
    let mut kernel = 0usize;
    let mut x = vec![0u64; cols];
    for code in 0..total {
        let mut c = code;
        for xi in x.iter_mut() {
            *xi = (c % p as usize) as u64;
            c /= p as usize;
        }
        if rows
            .iter()
            .all(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum::<u64>() % p == 0)
        {
            kernel += 1;
        }
    }
    let mut dim = 0;
    let mut k = 1;
    while k < kernel {
        k *= p as usize;
        dim += 1;
    }
    cols - dim
}

/// All distinct subgroups of rank-2 free group generated by at most two words of length at most `max_len`,
/// as generator lists.
pub fn small_generating_sets(n: usize, max_len: usize, max_gens: usize) -> Vec<Vec<Word>> {
    let words: Vec<Word> = words_up_to(n, max_len)
        .into_iter()
        .filter(|w| !w.is_identity())
        .collect();
    let mut out: BTreeSet<Vec<Word>> = BTreeSet::new();
    fn rec(
        words: &[Word],
        start: usize,
        cur: &mut Vec<Word>,
        left: usize,
        out: &mut BTreeSet<Vec<Word>>,
    ) {
        if !cur.is_empty() {
            out.insert(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..words.len() {
            cur.push(words[i].clone());
            rec(words, i + 1, cur, left - 1, out);
            cur.pop();
        }
    }
    rec(&words, 0, &mut Vec::new(), max_gens, &mut out);
    out.into_iter().collect()
}

/// Checks the hypertournament axioms literally, over all ordered tuples and all permutations.
///
/// Exponential in the universe size; meant for universes of at most five or six points.
pub fn brute_force_hypertournament(m: &Hypertournament) -> bool {
    let points: HashSet<u32> = m.universe.iter().copied().collect();
    if points.len() != m.universe.len() || m.ls.iter().any(|&l| l < 2) {
        return false;
    }
    for (l, rel) in &m.relations {
        if !rel.is_empty() && !m.ls.contains(l) {
            return false;
        }
        if rel.iter().any(|t| {
            t.len() != *l || t.iter().any(|x| !points.contains(x)) || !t.iter().all_unique()
        }) {
            return false;
        }
    }
    for &l in &m.ls {
        let holds = |t: &[u32]| m.relations.get(&l).is_some_and(|r| r.contains(t));
        let sigmas: Vec<Vec<usize>> = (0..l).permutations(l).collect();
        let r_sigma = |t: &[u32], s: &[usize]| holds(&s.iter().map(|&i| t[i]).collect::<Vec<_>>());
        for x in m.universe.iter().copied().permutations(l) {
            if !sigmas.iter().any(|s| r_sigma(&x, s)) {
                return false;
            }
            for s in &sigmas {
                let mut shifted = x.clone();
                let mut all = true;
                for _ in 0..l {
                    all &= r_sigma(&shifted, s);
                    shifted.rotate_left(1);
                }
                if all {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    #[test]
    fn reduces_to_standard_basis() {
        let o = NielsenOracle::new(2, &[w("aba"), w("ab")]).unwrap();
        assert_eq!(o.rank(), 2);
        assert!(o.contains(&w("a")) && o.contains(&w("b")));
    }

    #[test]
    fn membership_in_figure_one_subgroup() {
        let o = NielsenOracle::new(2, &[w("abABa"), w("b")]).unwrap();
        assert!(o.contains(&w("abABab")));
        assert!(o.contains(&w("bbabABaB")));
        assert!(!o.contains(&w("a")));
        assert!(!o.contains(&w("ab")));
    }

    #[test]
    fn ball_of_cyclic_subgroup() {
        let o = NielsenOracle::new(2, &[w("aa")]).unwrap();
        assert_eq!(o.ball(5).len(), 5);
    }

    #[test]
    fn brute_rank() {
        assert_eq!(brute_force_rank(2, &[vec![1, 1], vec![1, 1]], 2), 1);
        assert_eq!(brute_force_rank(3, &[vec![1, 0, 2], vec![0, 1, 1]], 3), 2);
    }

    #[test]
    fn roots_and_conjugates() {
        let o = NielsenOracle::new(2, &[w("aa")]).unwrap();
        assert_eq!(root_counterexample(&o, 2, 3), Some(w("a")));
        assert!(root_counterexample(&o, 3, 4).is_none());
        assert!(malnormal_counterexample(&o, 2, 4).is_some());
    }
}
