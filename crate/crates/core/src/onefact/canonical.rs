//! Canonical form of a 1-factorization: the lexicographically smallest
//! color sequence over all vertex permutations combined with color
//! relabelings, found by branch and bound.
//!
//! For any vertex order, the optimal color relabeling is first-appearance
//! order, and the edges at the first vertex carry all n-1 colors, so every
//! normalized string starts with A,B,...; comparison effectively begins
//! with the second vertex row. The search places vertices one at a time
//! and prunes a branch as soon as its determined prefix can no longer beat
//! the best complete string.

use super::{edge_count, edges, OneFactorization};

const UNSET: usize = usize::MAX;

struct Search<'a> {
    f: &'a OneFactorization,
    n: usize,
    best: Vec<u8>,
}

enum Prune {
    Keep,
    Cut,
}

impl Search<'_> {
    /// Full normalized string for a complete vertex placement.
    fn string_of(&self, perm: &[usize], letter: &[usize]) -> Vec<u8> {
        let n = self.n;
        let mut s = Vec::with_capacity(edge_count(n));
        for (a, b) in edges(n) {
            let c = self.f.color(perm[a], perm[b]) as usize;
            debug_assert_ne!(letter[c], UNSET);
            s.push(letter[c] as u8);
        }
        s
    }

    /// Compare the partially determined string against the current best in
    /// row-major position order. Row 0 is identical for every candidate.
    /// Stops at the first position whose letter is still unknown; an
    /// unseen color can only receive a letter >= the number assigned so
    /// far, which is sometimes enough to cut.
    fn check(&self, perm: &[usize], letter: &[usize]) -> Prune {
        let n = self.n;
        let placed = perm.len();
        let assigned = placed - 1;
        let mut pos = n - 1;
        for a in 1..n - 1 {
            for b in a + 1..n {
                if b >= placed {
                    return Prune::Keep;
                }
                let best = self.best[pos] as usize;
                let c = self.f.color(perm[a], perm[b]) as usize;
                let l = letter[c];
                if l == UNSET {
                    if best < assigned {
                        return Prune::Cut;
                    }
                    return Prune::Keep;
                }
                if l < best {
                    return Prune::Keep; // strictly better prefix
                }
                if l > best {
                    return Prune::Cut;
                }
                pos += 1;
            }
        }
        Prune::Keep
    }

    fn dfs(&mut self, perm: &mut Vec<usize>, used: &mut [bool], letter: &mut [usize]) {
        let n = self.n;
        if perm.len() == n {
            let s = self.string_of(perm, letter);
            if s < self.best {
                self.best = s;
            }
            return;
        }
        if perm.len() >= 3 {
            if let Prune::Cut = self.check(perm, letter) {
                return;
            }
        }
        let j = perm.len();
        let mut cands: Vec<(usize, usize)> = (0..n)
            .filter(|&v| !used[v])
            .map(|v| {
                // order by the row-1 letter this placement determines, when known
                let key = if j >= 2 {
                    let c = self.f.color(perm[1], v) as usize;
                    letter[c]
                } else {
                    0
                };
                (key, v)
            })
            .collect();
        cands.sort_unstable();
        for (_, v) in cands {
            let mut new_color = UNSET;
            if j >= 1 {
                let c = self.f.color(perm[0], v) as usize;
                debug_assert_eq!(letter[c], UNSET, "colors at a vertex are distinct");
                letter[c] = j - 1;
                new_color = c;
            }
            perm.push(v);
            used[v] = true;
            self.dfs(perm, used, letter);
            used[v] = false;
            perm.pop();
            if new_color != UNSET {
                letter[new_color] = UNSET;
            }
        }
    }
}

/// The distinguished representative of the isomorphism class of `f`.
pub fn canonical_form(f: &OneFactorization) -> OneFactorization {
    let n = f.n();
    let mut search = Search {
        f,
        n,
        best: vec![u8::MAX; edge_count(n)],
    };
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut letter = vec![UNSET; n - 1];
    search.dfs(&mut perm, &mut used, &mut letter);
    OneFactorization::from_colors(n, search.best).expect("relabeling preserves validity")
}
