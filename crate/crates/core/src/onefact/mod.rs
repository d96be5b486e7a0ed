//! 1-factorizations of complete graphs K_n, 4 <= n <= 12: validation,
//! text/compact serialization, isomorphism, canonical forms, and
//! isomorph-free enumeration for n <= 10.

mod canonical;
mod enumerate;

pub use canonical::canonical_form;
pub use enumerate::enumerate;

use std::fmt::Write as _;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OneFactError {
    #[error("vertex count {0} unsupported (need even n with 4 <= n <= 12)")]
    BadN(usize),
    #[error("color sequence is not a 1-factorization")]
    InvalidColors,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("native enumeration covers even n with 4 <= n <= 10 (got {0}); K_12 data must be ingested from an external dataset via the streaming pipeline")]
    EnumRange(usize),
}

/// Number of edges of K_n.
pub fn edge_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Index of edge (i,j), i<j, in lexicographic order (0,1),(0,2),...,(n-2,n-1).
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All edges of K_n in lexicographic order.
pub fn edges(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn color_letter(c: u8) -> char {
    (b'A' + c) as char
}

/// Check the 1-factorization invariants on a raw color sequence: each of
/// the n-1 colors used exactly n/2 times, each color class a perfect
/// matching.
pub fn validate(n: usize, colors: &[u8]) -> bool {
    if !(4..=12).contains(&n) || n % 2 != 0 || colors.len() != edge_count(n) {
        return false;
    }
    let ncolors = n - 1;
    let mut seen = vec![0u16; ncolors];
    for ((i, j), &c) in edges(n).zip(colors) {
        let c = c as usize;
        if c >= ncolors {
            return false;
        }
        let bits = (1u16 << i) | (1 << j);
        if seen[c] & bits != 0 {
            return false;
        }
        seen[c] |= bits;
    }
    let full = (1u16 << n) - 1;
    seen.iter().all(|&s| s == full)
}

/// An edge coloring of K_n whose color classes are perfect matchings.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OneFactorization {
    n: usize,
    colors: Vec<u8>,
}

impl OneFactorization {
    pub fn from_colors(n: usize, colors: Vec<u8>) -> Result<OneFactorization, OneFactError> {
        if !(4..=12).contains(&n) || n % 2 != 0 {
            return Err(OneFactError::BadN(n));
        }
        if !validate(n, &colors) {
            return Err(OneFactError::InvalidColors);
        }
        Ok(OneFactorization { n, colors })
    }

    /// The unique 1-factorization of K_4.
    pub fn k4() -> OneFactorization {
        OneFactorization::from_colors(4, vec![0, 1, 2, 2, 1, 0]).unwrap()
    }

    /// The circle-method 1-factorization of K_n: factor r pairs the hub
    /// n-1 with r and matches r+i with r-i around the circle.
    pub fn round_robin(n: usize) -> Result<OneFactorization, OneFactError> {
        if !(4..=12).contains(&n) || n % 2 != 0 {
            return Err(OneFactError::BadN(n));
        }
        let m = n - 1;
        let mut colors = vec![0u8; edge_count(n)];
        for r in 0..m {
            let mut place = |a: usize, b: usize| {
                colors[edge_index(n, a.min(b), a.max(b))] = r as u8;
            };
            place(n - 1, r);
            for i in 1..n / 2 {
                place((r + i) % m, (r + m - i) % m);
            }
        }
        OneFactorization::from_colors(n, colors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_colors(&self) -> usize {
        self.n - 1
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn color(&self, i: usize, j: usize) -> u8 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.colors[edge_index(self.n, i, j)]
    }

    /// The edges of one color class, pairs sorted by smaller endpoint.
    pub fn factor(&self, c: u8) -> Vec<(usize, usize)> {
        edges(self.n)
            .zip(&self.colors)
            .filter(|&(_, &cc)| cc == c)
            .map(|(e, _)| e)
            .collect()
    }

    /// Relabel vertices: edge (i,j) of the result is colored like
    /// (perm^-1 applied), so `result(perm[i], perm[j]) = self(i, j)`.
    pub fn relabel_vertices(&self, perm: &[usize]) -> OneFactorization {
        let n = self.n;
        let mut colors = vec![0u8; edge_count(n)];
        for (i, j) in edges(n) {
            let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            colors[edge_index(n, a, b)] = self.color(i, j);
        }
        OneFactorization { n, colors }
    }

    /// Text format: header `onefact n=<int>`, then one line per factor,
    /// `<Letter>: (a,b) (c,d) ...` with pairs sorted by smaller endpoint.
    pub fn to_text(&self) -> String {
        let mut out = format!("onefact n={}\n", self.n);
        for c in 0..self.num_colors() as u8 {
            let _ = write!(out, "{}:", color_letter(c));
            for (i, j) in self.factor(c) {
                let _ = write!(out, " ({i},{j})");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<OneFactorization, OneFactError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(OneFactError::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let n: usize = header
            .trim()
            .strip_prefix("onefact n=")
            .and_then(|v| v.parse().ok())
            .ok_or(OneFactError::Parse {
                line: 1,
                msg: format!("bad header `{header}`, expected `onefact n=<int>`"),
            })?;
        if !(4..=12).contains(&n) || n % 2 != 0 {
            return Err(OneFactError::BadN(n));
        }
        let mut colors = vec![u8::MAX; edge_count(n)];
        let mut seen_factors = 0usize;
        for (idx, raw) in lines {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if seen_factors >= n - 1 {
                return Err(OneFactError::Parse {
                    line: lineno,
                    msg: "too many factor lines".into(),
                });
            }
            let c = seen_factors as u8;
            let expect = format!("{}:", color_letter(c));
            let rest = line.strip_prefix(&expect).ok_or(OneFactError::Parse {
                line: lineno,
                msg: format!("expected line to start with `{expect}`"),
            })?;
            let mut pairs = 0;
            for tok in rest.split_whitespace() {
                let inner = tok
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or(OneFactError::Parse {
                        line: lineno,
                        msg: format!("bad pair `{tok}`"),
                    })?;
                let (a, b) = inner.split_once(',').ok_or(OneFactError::Parse {
                    line: lineno,
                    msg: format!("bad pair `{tok}`"),
                })?;
                let a: usize = a.trim().parse().map_err(|_| OneFactError::Parse {
                    line: lineno,
                    msg: format!("bad vertex in `{tok}`"),
                })?;
                let b: usize = b.trim().parse().map_err(|_| OneFactError::Parse {
                    line: lineno,
                    msg: format!("bad vertex in `{tok}`"),
                })?;
                if a >= n || b >= n || a == b {
                    return Err(OneFactError::Parse {
                        line: lineno,
                        msg: format!("vertex pair ({a},{b}) out of range"),
                    });
                }
                let e = edge_index(n, a.min(b), a.max(b));
                if colors[e] != u8::MAX {
                    return Err(OneFactError::Parse {
                        line: lineno,
                        msg: format!("edge ({a},{b}) colored twice"),
                    });
                }
                colors[e] = c;
                pairs += 1;
            }
            if pairs != n / 2 {
                return Err(OneFactError::Parse {
                    line: lineno,
                    msg: format!(
                        "factor {} has {pairs} pairs, expected {}",
                        color_letter(c),
                        n / 2
                    ),
                });
            }
            seen_factors += 1;
        }
        if seen_factors != n - 1 {
            return Err(OneFactError::Parse {
                line: 0,
                msg: format!("found {seen_factors} factors, expected {}", n - 1),
            });
        }
        OneFactorization::from_colors(n, colors)
    }

    /// Compact format: one record per line, character for edge e is
    /// `'A' + color(e)`, edges in lexicographic order. Bit-exact contract
    /// for bulk streams.
    pub fn to_compact(&self) -> String {
        self.colors.iter().map(|&c| color_letter(c)).collect()
    }

    pub fn parse_compact(record: &str) -> Result<OneFactorization, OneFactError> {
        let record = record.trim_end_matches(['\r', '\n']);
        let len = record.len();
        // invert len = n(n-1)/2
        let n = (1..=12)
            .find(|&n| edge_count(n) == len)
            .ok_or(OneFactError::Parse {
                line: 1,
                msg: format!("record length {len} is not an edge count of K_n, n <= 12"),
            })?;
        let mut colors = Vec::with_capacity(len);
        for (pos, ch) in record.bytes().enumerate() {
            if !(b'A'..=b'A' + 10).contains(&ch) || (ch - b'A') as usize >= n - 1 {
                return Err(OneFactError::Parse {
                    line: 1,
                    msg: format!("bad color character `{}` at column {}", ch as char, pos + 1),
                });
            }
            colors.push(ch - b'A');
        }
        OneFactorization::from_colors(n, colors)
    }
}

/// A color-preserving isomorphism: vertex permutation plus color relabeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoMap {
    pub vertex: Vec<usize>,
    pub color: Vec<usize>,
}

impl IsoMap {
    pub fn identity(n: usize) -> IsoMap {
        IsoMap {
            vertex: (0..n).collect(),
            color: (0..n - 1).collect(),
        }
    }

    /// Apply to a factorization: `result(vertex[i], vertex[j]) = color[f(i,j)]`.
    pub fn apply(&self, f: &OneFactorization) -> OneFactorization {
        let n = f.n();
        let mut colors = vec![0u8; edge_count(n)];
        for (i, j) in edges(n) {
            let (a, b) = (
                self.vertex[i].min(self.vertex[j]),
                self.vertex[i].max(self.vertex[j]),
            );
            colors[edge_index(n, a, b)] = self.color[f.color(i, j) as usize] as u8;
        }
        OneFactorization { n, colors }
    }
}

/// Search for an isomorphism mapping `f1` onto `f2`: backtracking over
/// vertex images, pruning through the induced partial color bijection.
pub fn isomorphic(f1: &OneFactorization, f2: &OneFactorization) -> Option<IsoMap> {
    if f1.n() != f2.n() {
        return None;
    }
    let n = f1.n();
    let ncolors = n - 1;
    let mut vmap = vec![usize::MAX; n];
    let mut vused = vec![false; n];
    let mut cmap = vec![usize::MAX; ncolors];
    let mut cused = vec![false; ncolors];

    fn rec(
        f1: &OneFactorization,
        f2: &OneFactorization,
        v: usize,
        vmap: &mut [usize],
        vused: &mut [bool],
        cmap: &mut [usize],
        cused: &mut [bool],
    ) -> bool {
        let n = f1.n();
        if v == n {
            return true;
        }
        'cand: for w in 0..n {
            if vused[w] {
                continue;
            }
            let mut newly = Vec::new();
            for u in 0..v {
                let c1 = f1.color(u, v) as usize;
                let c2 = f2.color(vmap[u], w) as usize;
                if cmap[c1] == usize::MAX {
                    if cused[c2] {
                        for &c in &newly {
                            cused[cmap[c] as usize] = false;
                            cmap[c] = usize::MAX;
                        }
                        continue 'cand;
                    }
                    cmap[c1] = c2;
                    cused[c2] = true;
                    newly.push(c1);
                } else if cmap[c1] != c2 {
                    for &c in &newly {
                        cused[cmap[c] as usize] = false;
                        cmap[c] = usize::MAX;
                    }
                    continue 'cand;
                }
            }
            vmap[v] = w;
            vused[w] = true;
            if rec(f1, f2, v + 1, vmap, vused, cmap, cused) {
                return true;
            }
            vused[w] = false;
            vmap[v] = usize::MAX;
            for &c in &newly {
                cused[cmap[c] as usize] = false;
                cmap[c] = usize::MAX;
            }
        }
        false
    }

    if rec(f1, f2, 0, &mut vmap, &mut vused, &mut cmap, &mut cused) {
        let out = IsoMap {
            vertex: vmap,
            color: cmap,
        };
        debug_assert_eq!(&out.apply(f1), f2);
        Some(out)
    } else {
        None
    }
}
