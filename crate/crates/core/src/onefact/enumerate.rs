//! Isomorph-free enumeration of 1-factorizations of K_n for n <= 10.
//!
//! Orderly generation: a partial factorization is a tuple of pairwise
//! disjoint perfect matchings sorted by a total order (packed partner
//! arrays compared as integers), extended one factor at a time. A partial
//! is kept only when it is the lexicographically least tuple in its S_n
//! orbit, so prefixes of the least representative of every class are kept
//! and each class is emitted exactly once.
//!
//! The minimality test only needs permutations mapping some factor to the
//! overall minimum matching M* = {(0,1),(2,3),...}; those form cosets of
//! the stabilizer of M* (the hyperoctahedral group, 2^(n/2) * (n/2)!
//! elements), scanned with a per-factor orbit-minimum bound that skips
//! most cosets outright.

use std::collections::HashMap;

use super::{canonical_form, edge_count, edge_index, OneFactError, OneFactorization};

const MAXN: usize = 12;

type Perm = [u8; MAXN];

#[derive(Clone, Copy)]
struct Matching {
    partner: [u8; MAXN],
    code: u64,
    mask: u64,
}

fn code_of(partner: &[u8; MAXN], n: usize) -> u64 {
    let mut c = 0u64;
    for &p in partner.iter().take(n) {
        c = c << 4 | p as u64;
    }
    c
}

fn matching_of(partner: [u8; MAXN], n: usize) -> Matching {
    let mut mask = 0u64;
    for i in 0..n {
        let j = partner[i] as usize;
        if i < j {
            mask |= 1 << edge_index(n, i, j);
        }
    }
    Matching {
        partner,
        code: code_of(&partner, n),
        mask,
    }
}

/// The minimum matching {(0,1),(2,3),...} under the code order.
fn min_matching(n: usize) -> Matching {
    let mut partner = [0u8; MAXN];
    for i in 0..n {
        partner[i] = (i ^ 1) as u8;
    }
    matching_of(partner, n)
}

/// All perfect matchings avoiding the `used` edge set, sorted by code.
fn perfect_matchings(n: usize, used: u64) -> Vec<Matching> {
    let mut out = Vec::new();
    let mut partner = [0u8; MAXN];
    fn rec(n: usize, used: u64, matched: u16, partner: &mut [u8; MAXN], out: &mut Vec<Matching>) {
        let Some(u) = (0..n).find(|&v| matched >> v & 1 == 0) else {
            out.push(matching_of(*partner, n));
            return;
        };
        for w in u + 1..n {
            if matched >> w & 1 == 1 || used >> edge_index(n, u, w) & 1 == 1 {
                continue;
            }
            partner[u] = w as u8;
            partner[w] = u as u8;
            rec(n, used, matched | 1 << u | 1 << w, partner, out);
        }
    }
    rec(n, used, 0, &mut partner, &mut out);
    out.sort_unstable_by_key(|m| m.code);
    out
}

/// The stabilizer of M* in S_n: permute the pairs, flip within each pair.
fn stabilizer_of_min(n: usize) -> Vec<Perm> {
    let half = n / 2;
    let mut pair_perms: Vec<Vec<usize>> = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let mut free = vec![true; half];
    fn rec(half: usize, cur: &mut Vec<usize>, free: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == half {
            out.push(cur.clone());
            return;
        }
        for p in 0..half {
            if free[p] {
                free[p] = false;
                cur.push(p);
                rec(half, cur, free, out);
                cur.pop();
                free[p] = true;
            }
        }
    }
    rec(half, &mut cur, &mut free, &mut pair_perms);

    let mut stab = Vec::with_capacity(pair_perms.len() << half);
    for rho in &pair_perms {
        for flips in 0u32..1 << half {
            let mut gamma = [0u8; MAXN];
            for (i, &target) in rho.iter().enumerate() {
                let bit = (flips >> i & 1) as u8;
                gamma[2 * i] = 2 * target as u8 + bit;
                gamma[2 * i + 1] = 2 * target as u8 + 1 - bit;
            }
            stab.push(gamma);
        }
    }
    stab
}

/// Some permutation mapping `m` onto M*: send the pairs, ordered by
/// smaller endpoint, to (0,1), (2,3), ...
fn perm_to_min(m: &Matching, n: usize) -> Perm {
    let mut d = [0u8; MAXN];
    let mut k = 0u8;
    for i in 0..n {
        let j = m.partner[i] as usize;
        if i < j {
            d[i] = 2 * k;
            d[j] = 2 * k + 1;
            k += 1;
        }
    }
    d
}

fn relabel_partner(partner: &[u8; MAXN], gamma: &Perm, n: usize) -> [u8; MAXN] {
    let mut out = [0u8; MAXN];
    for i in 0..n {
        out[gamma[i] as usize] = gamma[partner[i] as usize];
    }
    out
}

/// Code of the relabeled matching without materializing the array.
fn relabel_code(partner: &[u8; MAXN], gamma: &Perm, n: usize) -> u64 {
    let mut code = 0u64;
    for i in 0..n {
        code |= (gamma[partner[i] as usize] as u64) << (4 * (n - 1 - gamma[i] as usize));
    }
    code
}

struct Canonicity {
    n: usize,
    stab: Vec<Perm>,
    star_code: u64,
    /// matching code -> minimum code over its stabilizer orbit
    orbit_min: HashMap<u64, u64>,
    /// (target code, source code) -> stabilizer elements mapping source
    /// onto target
    transporters: HashMap<(u64, u64), Vec<u32>>,
}

impl Canonicity {
    fn new(n: usize) -> Canonicity {
        Canonicity {
            n,
            stab: stabilizer_of_min(n),
            star_code: min_matching(n).code,
            orbit_min: HashMap::new(),
            transporters: HashMap::new(),
        }
    }

    /// Stabilizer elements mapping `source` exactly onto the matching with
    /// the given code; memoized, since the target is constant down a whole
    /// generation subtree and sources recur.
    fn transporter(&mut self, source: &[u8; MAXN], target_code: u64) -> Vec<u32> {
        let key = (target_code, code_of(source, self.n));
        if let Some(t) = self.transporters.get(&key) {
            return t.clone();
        }
        let hits: Vec<u32> = self
            .stab
            .iter()
            .enumerate()
            .filter(|(_, s)| relabel_code(source, s, self.n) == target_code)
            .map(|(i, _)| i as u32)
            .collect();
        self.transporters.insert(key, hits.clone());
        hits
    }

    fn orbit_min(&mut self, partner: &[u8; MAXN]) -> u64 {
        let code = code_of(partner, self.n);
        if let Some(&m) = self.orbit_min.get(&code) {
            return m;
        }
        let mut best = u64::MAX;
        for s in &self.stab {
            best = best.min(relabel_code(partner, s, self.n));
        }
        self.orbit_min.insert(code, best);
        best
    }

    /// Is the sorted tuple `partial` the least in its S_n orbit?
    ///
    /// The image tuple of any relevant relabeling starts with M*, so it
    /// beats `partial` iff some factor image sorts at or below the second
    /// entry. Per coset: an orbit minimum strictly below codes[1] rejects
    /// outright; one equal to codes[1] needs only the few stabilizer
    /// elements that hit codes[1] exactly, compared in full.
    fn is_canonical(&mut self, partial: &[Matching]) -> bool {
        let n = self.n;
        let r = partial.len();
        let codes: Vec<u64> = partial.iter().map(|m| m.code).collect();
        debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));
        if codes[0] != self.star_code {
            return false;
        }
        if r == 1 {
            return true;
        }
        let mut imgs = vec![0u64; r];
        for i in 0..r {
            let delta = perm_to_min(&partial[i], n);
            let others: Vec<[u8; MAXN]> = (0..r)
                .filter(|&j| j != i)
                .map(|j| relabel_partner(&partial[j].partner, &delta, n))
                .collect();
            let mut tie_sources: Vec<usize> = Vec::new();
            for (k, p) in others.iter().enumerate() {
                let om = self.orbit_min(p);
                if om < codes[1] {
                    return false; // some image sorts strictly below codes[1]
                }
                if om == codes[1] {
                    tie_sources.push(k);
                }
            }
            if tie_sources.is_empty() {
                continue; // every image sorts above codes[1]
            }
            let mut candidates: Vec<u32> = Vec::new();
            for &k in &tie_sources {
                candidates.extend(self.transporter(&others[k], codes[1]));
            }
            candidates.sort_unstable();
            candidates.dedup();
            for si in candidates {
                let s = &self.stab[si as usize];
                imgs[0] = self.star_code;
                for (k, p) in others.iter().enumerate() {
                    imgs[k + 1] = relabel_code(p, s, n);
                }
                imgs.sort_unstable();
                if imgs[..] < codes[..] {
                    return false;
                }
            }
        }
        true
    }
}

fn to_onefact(partial: &[Matching], n: usize) -> OneFactorization {
    let mut colors = vec![0u8; edge_count(n)];
    for (c, m) in partial.iter().enumerate() {
        for i in 0..n {
            let j = m.partner[i] as usize;
            if i < j {
                colors[edge_index(n, i, j)] = c as u8;
            }
        }
    }
    OneFactorization::from_colors(n, colors).expect("disjoint matchings cover K_n")
}

/// One representative per isomorphism class of 1-factorizations of K_n,
/// each emitted in canonical form, complete and without repeats.
pub fn enumerate(n: usize) -> Result<Vec<OneFactorization>, OneFactError> {
    if !(4..=10).contains(&n) || n % 2 != 0 {
        return Err(OneFactError::EnumRange(n));
    }
    let mut canon = Canonicity::new(n);
    let star = min_matching(n);
    let mut partial = vec![star];
    let mut used = star.mask;
    let mut out = Vec::new();

    fn dfs(
        n: usize,
        partial: &mut Vec<Matching>,
        used: &mut u64,
        canon: &mut Canonicity,
        out: &mut Vec<OneFactorization>,
    ) {
        if partial.len() == n - 1 {
            out.push(canonical_form(&to_onefact(partial, n)));
            return;
        }
        let last = partial.last().expect("non-empty").code;
        for m in perfect_matchings(n, *used) {
            if m.code <= last {
                continue;
            }
            partial.push(m);
            *used |= m.mask;
            if canon.is_canonical(partial) {
                dfs(n, partial, used, canon, out);
            }
            *used &= !m.mask;
            partial.pop();
        }
    }

    dfs(n, &mut partial, &mut used, &mut canon, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_counts() {
        assert_eq!(perfect_matchings(4, 0).len(), 3);
        assert_eq!(perfect_matchings(6, 0).len(), 15);
        assert_eq!(perfect_matchings(8, 0).len(), 105);
        // removing M* leaves the cocktail-party graph
        let star = min_matching(4);
        assert_eq!(perfect_matchings(4, star.mask).len(), 2);
    }

    #[test]
    fn stabilizer_size() {
        assert_eq!(stabilizer_of_min(4).len(), 8);
        assert_eq!(stabilizer_of_min(6).len(), 48);
        let star = min_matching(6);
        for s in stabilizer_of_min(6) {
            assert_eq!(
                code_of(&relabel_partner(&star.partner, &s, 6), 6),
                star.code
            );
        }
    }

    #[test]
    fn enumerate_small_counts() {
        assert_eq!(enumerate(4).unwrap().len(), 1);
        assert_eq!(enumerate(6).unwrap().len(), 1);
        assert_eq!(enumerate(8).unwrap().len(), 6);
    }

    #[test]
    fn enumerate_rejects_out_of_range() {
        assert_eq!(enumerate(12), Err(OneFactError::EnumRange(12)));
        assert_eq!(enumerate(3), Err(OneFactError::EnumRange(3)));
        assert_eq!(enumerate(14), Err(OneFactError::EnumRange(14)));
    }

    #[test]
    fn outputs_are_distinct_canonical_forms() {
        let all = enumerate(8).unwrap();
        let mut forms: Vec<String> = all.iter().map(|f| f.to_compact()).collect();
        for (f, s) in all.iter().zip(&forms) {
            assert_eq!(&canonical_form(f).to_compact(), s);
        }
        forms.sort();
        forms.dedup();
        assert_eq!(forms.len(), all.len());
    }
}
