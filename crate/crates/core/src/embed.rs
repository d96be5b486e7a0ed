//! Decide whether a 1-factorization embeds as a hyperfocused arc in
//! PG(2,2^h), per concrete field.
//!
//! The solver fixes a projective frame (two focus points and two arc
//! points, the 4-point frame of PG(2,q)), propagates incidence
//! constraints to a fixpoint, then branches on the most-constrained
//! unassigned vertex. Every deduction is checked against the partial
//! embedding invariants; Unsat is reported only after the search space
//! under the frame is exhausted, with a budget outcome kept distinct so a
//! negative is never reported early.

use crate::arcs::{induced_factorization, is_hyperfocused, Arc};
use crate::gf2m::{FieldCtx, FieldElem};
use crate::onefact::{edges, OneFactorization};
use crate::pg2::{
    all_points, collinear, fit_conic, incident, line_points, line_through, meet, ProjLine,
    ProjPoint, ProjTransform,
};

/// Why a deduction failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contradiction {
    PointOnFocusLine {
        vertex: usize,
        point: ProjPoint,
    },
    ThreeCollinear {
        vertices: [usize; 3],
    },
    DuplicateArcPoint {
        vertices: (usize, usize),
    },
    /// Two focus points forced equal.
    FocusCollision {
        colors: (u8, u8),
        point: ProjPoint,
    },
    IncidenceClash {
        edge: (usize, usize),
        color: u8,
    },
}

impl Contradiction {
    fn kind(&self) -> usize {
        match self {
            Contradiction::PointOnFocusLine { .. } => 0,
            Contradiction::ThreeCollinear { .. } => 1,
            Contradiction::DuplicateArcPoint { .. } => 2,
            Contradiction::FocusCollision { .. } => 3,
            Contradiction::IncidenceClash { .. } => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Vertex(usize),
    Focus(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    Frame,
    /// Rule (i): a fully assigned secant meets the focus line.
    SecantMeetsFocusLine {
        edge: (usize, usize),
    },
    /// Rule (ii): two determined secants through the vertex intersect.
    TwoSecants {
        edges: [(usize, usize); 2],
    },
    Branch,
}

/// One forced assignment with its justification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Deduction {
    pub target: Target,
    pub point: ProjPoint,
    pub reason: Reason,
}

/// A complete embedding: coordinates for every vertex and focus point.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub vertex_points: Vec<ProjPoint>,
    /// Focus point per color.
    pub focus_points: Vec<ProjPoint>,
    pub focus_line: ProjLine,
    /// Deduction log of the satisfying branch.
    pub log: Vec<Deduction>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Branch candidates tried.
    pub nodes: u64,
    pub deductions: u64,
    /// Contradiction tallies, indexed like `Contradiction::kind`.
    pub contradictions: [u64; 5],
    /// First focus-collision contradiction seen, if any.
    pub focus_collision_sample: Option<Contradiction>,
}

impl SearchStats {
    pub fn total_contradictions(&self) -> u64 {
        self.contradictions.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnsatReason {
    /// k-arc size bounds rule the field out before any search.
    SizeBound { k: usize, q: u32 },
    /// Search space under the fixed frame exhausted.
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct UnsatReport {
    pub reason: UnsatReason,
    pub stats: SearchStats,
}

#[derive(Clone, Debug)]
pub enum EmbeddingResult {
    Sat(Box<Embedding>),
    Unsat(Box<UnsatReport>),
    /// Step budget exhausted before a verdict; not a negative answer.
    Budget(SearchStats),
}

impl EmbeddingResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, EmbeddingResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, EmbeddingResult::Unsat(_))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EmbedOptions {
    /// Step budget: branch candidates plus deductions.
    pub budget: u64,
    /// Frame partner vertices (v, w): colors of edges (0,v) and (0,w) get
    /// the frame focus points.
    pub frame: (usize, usize),
    /// Apply the k <= q/2 size bound before searching. Off only to check
    /// the prune against full search.
    pub size_prune: bool,
}

impl Default for EmbedOptions {
    fn default() -> EmbedOptions {
        EmbedOptions {
            budget: 10_000_000,
            frame: (1, 2),
            size_prune: true,
        }
    }
}

struct BudgetExceeded;

struct Solver<'a> {
    f: &'a OneFactorization,
    ctx: &'a FieldCtx,
    n: usize,
    focus_line: ProjLine,
    vpoint: Vec<Option<ProjPoint>>,
    fpoint: Vec<Option<ProjPoint>>,
    log: Vec<Deduction>,
    stats: SearchStats,
    steps: u64,
    budget: u64,
}

impl<'a> Solver<'a> {
    fn new(f: &'a OneFactorization, ctx: &'a FieldCtx, budget: u64) -> Solver<'a> {
        Solver {
            f,
            ctx,
            n: f.n(),
            focus_line: ProjLine::from_bits(ctx, [0, 0, 1]),
            vpoint: vec![None; f.n()],
            fpoint: vec![None; f.num_colors()],
            log: Vec::new(),
            stats: SearchStats::default(),
            steps: 0,
            budget,
        }
    }

    fn step(&mut self) -> Result<(), BudgetExceeded> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(BudgetExceeded)
        } else {
            Ok(())
        }
    }

    fn record(&mut self, c: Contradiction) -> Contradiction {
        self.stats.contradictions[c.kind()] += 1;
        if matches!(c, Contradiction::FocusCollision { .. })
            && self.stats.focus_collision_sample.is_none()
        {
            self.stats.focus_collision_sample = Some(c.clone());
        }
        c
    }

    fn assign_vertex(
        &mut self,
        v: usize,
        p: ProjPoint,
        reason: Reason,
    ) -> Result<(), Contradiction> {
        let ctx = self.ctx;
        if incident(ctx, &p, &self.focus_line) {
            return Err(self.record(Contradiction::PointOnFocusLine {
                vertex: v,
                point: p,
            }));
        }
        for (u, q) in self.vpoint.iter().enumerate() {
            if let Some(q) = q {
                if *q == p {
                    return Err(self.record(Contradiction::DuplicateArcPoint { vertices: (u, v) }));
                }
            }
        }
        let assigned: Vec<(usize, ProjPoint)> = self
            .vpoint
            .iter()
            .enumerate()
            .filter_map(|(u, q)| q.map(|q| (u, q)))
            .collect();
        for a in 0..assigned.len() {
            for b in a + 1..assigned.len() {
                if collinear(ctx, &assigned[a].1, &assigned[b].1, &p) {
                    return Err(self.record(Contradiction::ThreeCollinear {
                        vertices: [assigned[a].0, assigned[b].0, v],
                    }));
                }
            }
        }
        // every determined secant through v must pass its focus point
        for (u, q) in &assigned {
            let c = self.f.color(*u, v);
            if let Some(focus) = self.fpoint[c as usize] {
                if !collinear(ctx, q, &p, &focus) {
                    return Err(self.record(Contradiction::IncidenceClash {
                        edge: (*u.min(&v), *u.max(&v)),
                        color: c,
                    }));
                }
            }
        }
        self.vpoint[v] = Some(p);
        self.log.push(Deduction {
            target: Target::Vertex(v),
            point: p,
            reason,
        });
        self.stats.deductions += 1;
        Ok(())
    }

    fn assign_focus(&mut self, c: u8, p: ProjPoint, reason: Reason) -> Result<(), Contradiction> {
        let ctx = self.ctx;
        debug_assert!(incident(ctx, &p, &self.focus_line));
        for (c2, q) in self.fpoint.iter().enumerate() {
            if *q == Some(p) {
                return Err(self.record(Contradiction::FocusCollision {
                    colors: (c2 as u8, c),
                    point: p,
                }));
            }
        }
        // every fully assigned edge of this color must lie on a secant
        // through p
        for (i, j) in edges(self.n) {
            if self.f.color(i, j) != c {
                continue;
            }
            if let (Some(pi), Some(pj)) = (self.vpoint[i], self.vpoint[j]) {
                if !collinear(ctx, &pi, &pj, &p) {
                    return Err(self.record(Contradiction::IncidenceClash {
                        edge: (i, j),
                        color: c,
                    }));
                }
            }
        }
        self.fpoint[c as usize] = Some(p);
        self.log.push(Deduction {
            target: Target::Focus(c),
            point: p,
            reason,
        });
        self.stats.deductions += 1;
        Ok(())
    }

    /// Propagate rules (i) and (ii) to a fixpoint: one deduction per
    /// iteration, focus deductions first, so an inconsistent focus shows
    /// up as a focus collision rather than a downstream vertex clash.
    fn propagate(&mut self) -> Result<Result<(), Contradiction>, BudgetExceeded> {
        let ctx = self.ctx;
        'outer: loop {
            // (i) focus of a color with a fully assigned edge
            for c in 0..self.f.num_colors() as u8 {
                if self.fpoint[c as usize].is_some() {
                    continue;
                }
                let edge = edges(self.n).find(|&(i, j)| {
                    self.f.color(i, j) == c && self.vpoint[i].is_some() && self.vpoint[j].is_some()
                });
                if let Some((i, j)) = edge {
                    self.step()?;
                    let secant =
                        line_through(ctx, &self.vpoint[i].unwrap(), &self.vpoint[j].unwrap())
                            .expect("arc points distinct");
                    let hit = meet(ctx, &secant, &self.focus_line)
                        .expect("secant differs from the focus line");
                    if let Err(e) =
                        self.assign_focus(c, hit, Reason::SecantMeetsFocusLine { edge: (i, j) })
                    {
                        return Ok(Err(e));
                    }
                    continue 'outer;
                }
            }
            // (ii) vertex on two determined secants
            for v in 0..self.n {
                if self.vpoint[v].is_some() {
                    continue;
                }
                let dls = self.determined_lines(v);
                if dls.len() >= 2 {
                    self.step()?;
                    let (l1, e1) = dls[0];
                    let (l2, e2) = dls[1];
                    let p = meet(ctx, &l1, &l2).expect("distinct determined lines");
                    if let Err(e) = self.assign_vertex(v, p, Reason::TwoSecants { edges: [e1, e2] })
                    {
                        return Ok(Err(e));
                    }
                    continue 'outer;
                }
            }
            return Ok(Ok(()));
        }
    }

    /// Distinct secant lines already determined through an unassigned
    /// vertex: edges whose other endpoint and color focus are both known.
    fn determined_lines(&self, v: usize) -> Vec<(ProjLine, (usize, usize))> {
        let ctx = self.ctx;
        let mut out: Vec<(ProjLine, (usize, usize))> = Vec::new();
        for w in 0..self.n {
            if w == v {
                continue;
            }
            let (Some(pw), Some(focus)) =
                (self.vpoint[w], self.fpoint[self.f.color(v, w) as usize])
            else {
                continue;
            };
            let line = line_through(ctx, &pw, &focus).expect("arc point off the focus line");
            if !out.iter().any(|(l, _)| *l == line) {
                out.push((line, (v.min(w), v.max(w))));
            }
        }
        out
    }

    /// Branch candidates for a vertex, in lexicographic normalized order.
    fn candidates(&self, v: usize) -> Vec<ProjPoint> {
        let ctx = self.ctx;
        let dls = self.determined_lines(v);
        let mut cands: Vec<ProjPoint> = if let Some((line, _)) = dls.first() {
            line_points(ctx, line)
                .into_iter()
                .filter(|p| !incident(ctx, p, &self.focus_line))
                .collect()
        } else {
            all_points(ctx)
                .into_iter()
                .filter(|p| !incident(ctx, p, &self.focus_line))
                .collect()
        };
        cands.retain(|p| !self.vpoint.iter().any(|q| *q == Some(*p)));
        cands.sort_unstable_by_key(|p| p.coords());
        cands
    }

    fn search(&mut self) -> Result<bool, BudgetExceeded> {
        match self.propagate()? {
            Err(_) => return Ok(false),
            Ok(()) => {}
        }
        // pick the unassigned vertex with the most determined lines
        let mut branch: Option<(usize, usize)> = None; // (count, vertex)
        for v in 0..self.n {
            if self.vpoint[v].is_none() {
                let count = self.determined_lines(v).len();
                match branch {
                    Some((best, _)) if best >= count => {}
                    _ => branch = Some((count, v)),
                }
            }
        }
        let Some((_, v)) = branch else {
            return Ok(true); // fully assigned
        };
        let saved_v = self.vpoint.clone();
        let saved_f = self.fpoint.clone();
        let saved_log = self.log.len();
        for p in self.candidates(v) {
            self.stats.nodes += 1;
            self.step()?;
            if self.assign_vertex(v, p, Reason::Branch).is_ok() && self.search()? {
                return Ok(true);
            }
            self.vpoint.clone_from(&saved_v);
            self.fpoint.clone_from(&saved_f);
            self.log.truncate(saved_log);
        }
        Ok(false)
    }
}

/// Decide embeddability of `f` over the given field with default options.
pub fn embed(f: &OneFactorization, ctx: &FieldCtx) -> EmbeddingResult {
    embed_with(f, ctx, &EmbedOptions::default())
}

pub fn embed_with(f: &OneFactorization, ctx: &FieldCtx, opts: &EmbedOptions) -> EmbeddingResult {
    let n = f.n();
    let q = ctx.order();

    // arc size bounds: k <= q+2 always, and k <= q/2 away from the
    // hyperoval sizes q and q+2
    let oversized = n as u32 > q + 2;
    let half_bound = opts.size_prune && n as u32 != q && n as u32 != q + 2 && n as u32 > q / 2;
    if oversized || half_bound {
        return EmbeddingResult::Unsat(Box::new(UnsatReport {
            reason: UnsatReason::SizeBound { k: n, q },
            stats: SearchStats::default(),
        }));
    }

    let mut solver = Solver::new(f, ctx, opts.budget);

    // frame: foci of colors (0,v) and (0,w) at (1,0,0) and (0,1,0);
    // vertex 0 at (0,0,1); the partner of a third color at (1,1,1)
    let (v, w) = opts.frame;
    assert!(
        v != w && v != 0 && w != 0 && v < n && w < n,
        "bad frame choice"
    );
    let c1 = f.color(0, v);
    let c2 = f.color(0, w);
    let t = (1..n).find(|&t| t != v && t != w).expect("n >= 4");
    let frame = [
        (Target::Focus(c1), ProjPoint::from_bits(ctx, [1, 0, 0])),
        (Target::Focus(c2), ProjPoint::from_bits(ctx, [0, 1, 0])),
        (Target::Vertex(0), ProjPoint::from_bits(ctx, [0, 0, 1])),
        (Target::Vertex(t), ProjPoint::from_bits(ctx, [1, 1, 1])),
    ];
    for (target, point) in frame {
        let ok = match target {
            Target::Focus(c) => solver.assign_focus(c, point, Reason::Frame),
            Target::Vertex(v) => solver.assign_vertex(v, point, Reason::Frame),
        };
        ok.expect("frame assignments are consistent");
    }

    match solver.search() {
        Err(BudgetExceeded) => EmbeddingResult::Budget(solver.stats),
        Ok(true) => {
            let emb = Embedding {
                vertex_points: solver.vpoint.iter().map(|p| p.unwrap()).collect(),
                focus_points: solver.fpoint.iter().map(|p| p.unwrap()).collect(),
                focus_line: solver.focus_line,
                log: solver.log.clone(),
            };
            debug_assert!(verify_embedding(ctx, &emb, f));
            EmbeddingResult::Sat(Box::new(emb))
        }
        Ok(false) => EmbeddingResult::Unsat(Box::new(UnsatReport {
            reason: UnsatReason::Exhausted,
            stats: solver.stats,
        })),
    }
}

/// Round-trip check of a Sat witness: rebuild the arc, re-derive the
/// focus data on the witness line, and compare the induced factorization
/// to `f` with colors matched through the witness focus points.
pub fn verify_embedding(ctx: &FieldCtx, emb: &Embedding, f: &OneFactorization) -> bool {
    let n = f.n();
    if emb.vertex_points.len() != n || emb.focus_points.len() != n - 1 {
        return false;
    }
    let Ok(arc) = Arc::new(ctx, emb.vertex_points.clone()) else {
        return false;
    };
    let Some(focus) = is_hyperfocused(ctx, &arc, &emb.focus_line) else {
        return false;
    };
    let Ok(induced) = induced_factorization(&arc, &focus) else {
        return false;
    };
    // focus points must be pairwise distinct for the color match
    for (i, j) in edges(n) {
        let expect = emb.focus_points[f.color(i, j) as usize];
        let got = focus.focus_points[induced.color(i, j) as usize];
        if expect != got {
            return false;
        }
    }
    true
}

/// Recover the conic parameter of a witness whose vertex 0 is the nucleus
/// of the conic through vertices 1..n-1: map (P1,P2,P3,P0) onto the
/// standard frame so the conic becomes x^2 = yz, and read the parameter
/// of vertex 4. Returns `None` when the witness does not have that shape.
pub fn extract_conic_parameter(ctx: &FieldCtx, emb: &Embedding) -> Option<FieldElem> {
    let pts = &emb.vertex_points;
    if pts.len() < 6 {
        return None;
    }
    let five: [ProjPoint; 5] = [pts[1], pts[2], pts[3], pts[4], pts[5]];
    let conic = fit_conic(ctx, &five).ok()?;
    if !conic.is_nondegenerate(ctx) {
        return None;
    }
    for p in &pts[1..] {
        if !conic.contains(ctx, p) {
            return None;
        }
    }
    if conic.nucleus(ctx).ok()? != pts[0] {
        return None;
    }
    let from = [pts[1], pts[2], pts[3], pts[0]];
    let to = [
        ProjPoint::from_bits(ctx, [0, 1, 0]),
        ProjPoint::from_bits(ctx, [0, 0, 1]),
        ProjPoint::from_bits(ctx, [1, 1, 1]),
        ProjPoint::from_bits(ctx, [1, 0, 0]),
    ];
    let t = ProjTransform::between(ctx, &from, &to).ok()?;
    let image = t.apply(ctx, &pts[4]);
    let [x, y, z] = image.coords();
    if z.is_zero() {
        return None;
    }
    let zinv = ctx.inv(z).ok()?;
    let a = ctx.mul(x, zinv);
    debug_assert_eq!(ctx.mul(y, zinv), ctx.mul(a, a));
    Some(a)
}

/// Embeddability verdicts over GF(2^h) for h = 1..h_max.
pub fn scan_fields(
    f: &OneFactorization,
    h_max: u32,
    opts: &EmbedOptions,
) -> Vec<(u32, EmbeddingResult)> {
    (1..=h_max)
        .map(|h| {
            let ctx = FieldCtx::new(h).expect("h within supported degrees");
            (h, embed_with(f, &ctx, opts))
        })
        .collect()
}
