//! Necessary conditions for a 1-factorization to embed as a hyperfocused
//! arc, as pure predicates returning auditable witnesses, plus the
//! streaming bulk filter with checkpointed resume.
//!
//! The first check: two edges of one factor span four vertices; of the two
//! other disjoint-pair decompositions of those vertices, if exactly one is
//! monochromatic the factorization cannot embed (a C_4 in the union of two
//! factors must complete to a K_4). The second: two disjoint ordered
//! 4-tuples whose corresponding edges agree in color on exactly five of
//! the six pairs cannot embed either (two equally colored K_4 - e force
//! the remaining edges to share a color).

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::onefact::{edges, OneFactError, OneFactorization};

/// Rejection evidence for the C4-completion check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C4Witness {
    /// Factor whose edge pair spans the four vertices.
    pub factor: u8,
    /// The two edges of that factor.
    pub factor_edges: [(usize, usize); 2],
    /// The monochromatic disjoint pair present in a single factor.
    pub present_pair: [(usize, usize); 2],
    pub present_color: u8,
    /// The disjoint pair no single factor contains.
    pub missing_pair: [(usize, usize); 2],
}

/// Rejection evidence for the doubled K4-minus-edge check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K4eWitness {
    /// Unordered base 4-set.
    pub base: [usize; 4],
    /// Ordered 4-tuple disjoint from the base.
    pub image: [usize; 4],
    /// The five corresponding edge pairs that share colors.
    pub matching_pairs: [((usize, usize), (usize, usize)); 5],
    /// The sixth pair, with differing colors.
    pub mismatched_pair: ((usize, usize), (usize, usize)),
}

fn color_table(f: &OneFactorization) -> [[u8; 12]; 12] {
    let mut t = [[u8::MAX; 12]; 12];
    for (i, j) in edges(f.n()) {
        let c = f.color(i, j);
        t[i][j] = c;
        t[j][i] = c;
    }
    t
}

fn c4_check(f: &OneFactorization, skip_last: bool) -> Option<C4Witness> {
    let n = f.n();
    let t = color_table(f);
    // factor edge lists, one pass, no allocation
    let mut factor_edges = [[(0usize, 0usize); 6]; 11];
    let mut fill = [0usize; 11];
    for (i, j) in edges(n) {
        let c = t[i][j] as usize;
        factor_edges[c][fill[c]] = (i, j);
        fill[c] += 1;
    }
    let half = n / 2;
    let checked = f.num_colors() - usize::from(skip_last);
    for c in 0..checked as u8 {
        let factor = &factor_edges[c as usize][..half];
        for x in 0..half {
            for y in x + 1..half {
                let (a, b) = factor[x];
                let (d, e) = factor[y];
                let first = [(a, d), (b, e)];
                let second = [(a, e), (b, d)];
                let first_mono = t[a][d] == t[b][e];
                let second_mono = t[a][e] == t[b][d];
                if first_mono != second_mono {
                    let (present, missing) = if first_mono {
                        (first, second)
                    } else {
                        (second, first)
                    };
                    return Some(C4Witness {
                        factor: c,
                        factor_edges: [(a, b), (d, e)],
                        present_pair: present,
                        present_color: t[present[0].0][present[0].1],
                        missing_pair: missing,
                    });
                }
            }
        }
    }
    None
}

/// C4-completion filter; `None` means pass. Checks every factor except
/// the last: a violation involves two factors and is detected starting
/// from either, so one factor can always be skipped.
pub fn c4_filter(f: &OneFactorization) -> Option<C4Witness> {
    c4_check(f, true)
}

/// The same check over every factor, kept as the oracle for the
/// skip-one-factor optimization.
pub fn c4_filter_exhaustive(f: &OneFactorization) -> Option<C4Witness> {
    c4_check(f, false)
}

/// Doubled K4-minus-edge filter; `None` means pass. Scans every unordered
/// 4-set against every disjoint ordered 4-tuple and rejects when exactly
/// five of the six corresponding edge pairs share colors.
pub fn k4e_filter(f: &OneFactorization) -> Option<K4eWitness> {
    let n = f.n();
    let t = color_table(f);
    let pairs: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut base = [0usize; 4];
    for u0 in 0..n {
        base[0] = u0;
        for u1 in u0 + 1..n {
            base[1] = u1;
            for u2 in u1 + 1..n {
                base[2] = u2;
                for u3 in u2 + 1..n {
                    base[3] = u3;
                    let in_base = |v: usize| v == u0 || v == u1 || v == u2 || v == u3;
                    let rest: Vec<usize> = (0..n).filter(|&v| !in_base(v)).collect();
                    let mut image = [0usize; 4];
                    for &v0 in &rest {
                        image[0] = v0;
                        for &v1 in &rest {
                            if v1 == v0 {
                                continue;
                            }
                            image[1] = v1;
                            for &v2 in &rest {
                                if v2 == v0 || v2 == v1 {
                                    continue;
                                }
                                image[2] = v2;
                                for &v3 in &rest {
                                    if v3 == v0 || v3 == v1 || v3 == v2 {
                                        continue;
                                    }
                                    image[3] = v3;
                                    let mut same = 0u32;
                                    let mut bad = usize::MAX;
                                    for (k, &(i, j)) in pairs.iter().enumerate() {
                                        if t[base[i]][base[j]] == t[image[i]][image[j]] {
                                            same += 1;
                                        } else {
                                            bad = k;
                                        }
                                    }
                                    if same == 5 {
                                        let mut matching = Vec::with_capacity(5);
                                        let mut mismatched = None;
                                        for (k, &(i, j)) in pairs.iter().enumerate() {
                                            let pair = ((base[i], base[j]), (image[i], image[j]));
                                            if k == bad {
                                                mismatched = Some(pair);
                                            } else {
                                                matching.push(pair);
                                            }
                                        }
                                        return Some(K4eWitness {
                                            base,
                                            image,
                                            matching_pairs: matching
                                                .try_into()
                                                .expect("five matches"),
                                            mismatched_pair: mismatched.expect("one mismatch"),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// Which filter stages a stream run applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Stages {
    pub c4: bool,
    pub k4e: bool,
}

impl Stages {
    pub fn both() -> Stages {
        Stages {
            c4: true,
            k4e: true,
        }
    }

    /// Parse a comma-separated stage list such as `c4,k4e`.
    pub fn parse(s: &str) -> Result<Stages, StreamError> {
        let mut stages = Stages::default();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "c4" => stages.c4 = true,
                "k4e" => stages.k4e = true,
                _ => return Err(StreamError::BadStages(s.to_string())),
            }
        }
        Ok(stages)
    }
}

impl std::fmt::Display for Stages {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.c4 {
            parts.push("c4");
        }
        if self.k4e {
            parts.push("k4e");
        }
        write!(f, "{}", parts.join(","))
    }
}

/// Counts and stream position; doubles as the checkpoint payload.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FilterReport {
    pub read: u64,
    pub rejected_c4: u64,
    pub rejected_k4e: u64,
    pub survived: u64,
    /// Input bytes consumed.
    pub offset: u64,
    /// Bytes written to the survivor stream.
    pub survivor_bytes: u64,
}

impl FilterReport {
    pub fn summary_line(&self) -> String {
        format!(
            "read={} rejected_c4={} rejected_k4e={} survived={}",
            self.read, self.rejected_c4, self.rejected_k4e, self.survived
        )
    }

    fn checkpoint_text(&self) -> String {
        format!(
            "offset={}\nread={}\nrejected_c4={}\nrejected_k4e={}\nsurvived={}\nsurvivor_bytes={}\n",
            self.offset,
            self.read,
            self.rejected_c4,
            self.rejected_k4e,
            self.survived,
            self.survivor_bytes
        )
    }

    fn parse_checkpoint(text: &str) -> Result<FilterReport, StreamError> {
        let mut r = FilterReport::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| StreamError::BadCheckpoint(line.to_string()))?;
            let v: u64 = value
                .parse()
                .map_err(|_| StreamError::BadCheckpoint(line.to_string()))?;
            match key {
                "offset" => r.offset = v,
                "read" => r.read = v,
                "rejected_c4" => r.rejected_c4 = v,
                "rejected_k4e" => r.rejected_k4e = v,
                "survived" => r.survived = v,
                "survivor_bytes" => r.survivor_bytes = v,
                _ => return Err(StreamError::BadCheckpoint(line.to_string())),
            }
        }
        if r.read != r.rejected_c4 + r.rejected_k4e + r.survived {
            return Err(StreamError::BadCheckpoint("counts do not add up".into()));
        }
        Ok(r)
    }
}

impl std::fmt::Display for FilterReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "read={}", self.read)?;
        writeln!(f, "rejected_c4={}", self.rejected_c4)?;
        writeln!(f, "rejected_k4e={}", self.rejected_k4e)?;
        writeln!(f, "survived={}", self.survived)?;
        write!(f, "summary: {}", self.summary_line())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StreamError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("record {line} (byte offset {offset}): {source}")]
    BadRecord {
        line: u64,
        offset: u64,
        source: OneFactError,
    },
    #[error("record {line}: expected n={expected}, found n={found}")]
    MixedN {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("bad stage list `{0}`; stages are a comma-separated subset of c4,k4e")]
    BadStages(String),
    #[error("bad checkpoint entry `{0}`")]
    BadCheckpoint(String),
    #[error("survivor file shorter than checkpoint position; cannot resume")]
    SurvivorTruncated,
}

/// Options for a streaming filter run.
#[derive(Clone, Copy, Debug)]
pub struct StreamOptions {
    pub stages: Stages,
    /// Expected vertex count; inferred from the first record when `None`.
    pub expected_n: Option<usize>,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
    /// Records per parallel batch.
    pub batch: usize,
    /// Stop once the cumulative record count (including any resumed
    /// progress) reaches this; the checkpoint stays resumable.
    pub limit: Option<u64>,
}

impl Default for StreamOptions {
    fn default() -> StreamOptions {
        StreamOptions {
            stages: Stages::both(),
            expected_n: None,
            workers: 0,
            batch: 4096,
            limit: None,
        }
    }
}

enum Verdict {
    Survive,
    RejectC4,
    RejectK4e,
}

fn run_record(record: &str, stages: Stages) -> Result<(usize, Verdict), OneFactError> {
    let f = OneFactorization::parse_compact(record)?;
    let v = if stages.c4 && c4_filter(&f).is_some() {
        Verdict::RejectC4
    } else if stages.k4e && k4e_filter(&f).is_some() {
        Verdict::RejectK4e
    } else {
        Verdict::Survive
    };
    Ok((f.n(), v))
}

/// Stream compact-format records from `input` through the selected stages,
/// writing survivors in input order to `survivors`. When `checkpoint` is
/// given, progress is persisted there after every batch and an existing
/// checkpoint resumes the run; counts and outputs are byte-identical to an
/// uninterrupted run.
pub fn filter_stream(
    input: &Path,
    survivors: &Path,
    checkpoint: Option<&Path>,
    opts: &StreamOptions,
) -> Result<FilterReport, StreamError> {
    let mut report = FilterReport::default();
    let mut resume = false;
    if let Some(ck) = checkpoint {
        if ck.exists() {
            let mut text = String::new();
            File::open(ck)?.read_to_string(&mut text)?;
            report = FilterReport::parse_checkpoint(&text)?;
            resume = true;
        }
    }

    let mut reader = BufReader::new(File::open(input)?);
    reader.seek(SeekFrom::Start(report.offset))?;

    let mut out = if resume {
        let f = OpenOptions::new().read(true).write(true).open(survivors)?;
        if f.metadata()?.len() < report.survivor_bytes {
            return Err(StreamError::SurvivorTruncated);
        }
        f.set_len(report.survivor_bytes)?;
        let mut f = f;
        f.seek(SeekFrom::End(0))?;
        f
    } else {
        File::create(survivors)?
    };

    let pool = if opts.workers > 0 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.workers)
                .build()
                .expect("thread pool"),
        )
    } else {
        None
    };

    let mut expected_n = opts.expected_n;
    let mut done = false;
    while !done {
        // gather one batch of raw lines with their byte extents
        let mut batch: Vec<(u64, u64, String)> = Vec::with_capacity(opts.batch);
        while batch.len() < opts.batch {
            if let Some(limit) = opts.limit {
                if report.read + batch.len() as u64 >= limit {
                    done = true;
                    break;
                }
            }
            let mut raw = String::new();
            let bytes = reader.read_line(&mut raw)?;
            if bytes == 0 {
                done = true;
                break;
            }
            let lineno = report.read + batch.len() as u64 + 1;
            batch.push((lineno, bytes as u64, raw));
        }
        if batch.is_empty() {
            break;
        }

        let stages = opts.stages;
        let work = |items: &[(u64, u64, String)]| {
            items
                .par_iter()
                .map(|(_, _, raw)| run_record(raw.trim_end_matches(['\r', '\n']), stages))
                .collect::<Vec<_>>()
        };
        let results = match &pool {
            Some(p) => p.install(|| work(&batch)),
            None => work(&batch),
        };

        for ((lineno, bytes, raw), result) in batch.iter().zip(results) {
            let (n, verdict) = result.map_err(|source| StreamError::BadRecord {
                line: *lineno,
                offset: report.offset,
                source,
            })?;
            match expected_n {
                None => expected_n = Some(n),
                Some(e) if e != n => {
                    return Err(StreamError::MixedN {
                        line: *lineno,
                        expected: e,
                        found: n,
                    })
                }
                _ => {}
            }
            report.read += 1;
            report.offset += bytes;
            match verdict {
                Verdict::Survive => {
                    report.survived += 1;
                    let line = raw.trim_end_matches(['\r', '\n']);
                    out.write_all(line.as_bytes())?;
                    out.write_all(b"\n")?;
                    report.survivor_bytes += line.len() as u64 + 1;
                }
                Verdict::RejectC4 => report.rejected_c4 += 1,
                Verdict::RejectK4e => report.rejected_k4e += 1,
            }
        }
        out.flush()?;
        if let Some(ck) = checkpoint {
            write_checkpoint(ck, &report)?;
        }
    }
    out.flush()?;
    if let Some(ck) = checkpoint {
        write_checkpoint(ck, &report)?;
    }
    debug_assert_eq!(
        report.read,
        report.rejected_c4 + report.rejected_k4e + report.survived
    );
    Ok(report)
}

fn write_checkpoint(path: &Path, report: &FilterReport) -> Result<(), StreamError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, report.checkpoint_text())?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
