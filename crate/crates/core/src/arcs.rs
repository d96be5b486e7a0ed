//! k-arcs in PG(2,q), hyperfocus verification, the arc-to-1-factorization
//! map, and the subgroup constructions of hyperfocused arcs on a
//! hyperconic (multiplicative subgroups of GF(q)* for secant focus lines,
//! cyclic subgroups of order dividing q+1 for external ones).

use crate::gf2m::{FieldCtx, FieldElem, FieldError, Poly2};
use crate::onefact::{OneFactError, OneFactorization};
use crate::pg2::{
    all_lines, collinear, conic_point, incident, line_through, meet, Conic, GeomError, LineClass,
    ProjLine, ProjPoint,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ArcError {
    #[error("duplicate points in arc input")]
    DuplicatePoints,
    #[error("three of the points are collinear")]
    NotAnArc,
    #[error("an arc needs at least 2 points")]
    TooSmall,
    #[error("subgroup order must be at least 3, got {0}")]
    OrderTooSmall(u32),
    #[error("d = q+1 yields the full hyperconic; that hyperoval case is not constructed here")]
    HyperovalBoundary,
    #[error("focus-line scan supports q <= 1024, got q = {0}")]
    ScanTooLarge(u32),
    #[error("construction verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("arc file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// True iff no three of the points are collinear; duplicates are an error.
pub fn is_arc(ctx: &FieldCtx, points: &[ProjPoint]) -> Result<bool, ArcError> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(ArcError::DuplicatePoints);
            }
        }
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for k in j + 1..points.len() {
                if collinear(ctx, &points[i], &points[j], &points[k]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// An ordered sequence of distinct points, no three collinear. The order
/// fixes vertex labels of the induced factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    points: Vec<ProjPoint>,
}

impl Arc {
    pub fn new(ctx: &FieldCtx, points: Vec<ProjPoint>) -> Result<Arc, ArcError> {
        if points.len() < 2 {
            return Err(ArcError::TooSmall);
        }
        if !is_arc(ctx, &points)? {
            return Err(ArcError::NotAnArc);
        }
        Ok(Arc { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }
}

/// A focus line with its focus set and the pair-to-focus assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FocusData {
    pub line: ProjLine,
    /// The k-1 focus points, in order of first appearance over secants
    /// scanned in lexicographic pair order.
    pub focus_points: Vec<ProjPoint>,
    /// Focus index per unordered arc-point pair, lexicographic pair order.
    pub assignment: Vec<usize>,
}

/// Check whether the arc is hyperfocused on `line`: no arc point on the
/// line and the secants meet it in exactly k-1 points.
pub fn is_hyperfocused(ctx: &FieldCtx, arc: &Arc, line: &ProjLine) -> Option<FocusData> {
    let k = arc.len();
    let pts = arc.points();
    if pts.iter().any(|p| incident(ctx, p, line)) {
        return None;
    }
    let mut focus_points: Vec<ProjPoint> = Vec::with_capacity(k - 1);
    let mut assignment = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let secant = line_through(ctx, &pts[i], &pts[j]).expect("arc points distinct");
            let hit = meet(ctx, &secant, line).expect("arc points lie off the focus line");
            let idx = match focus_points.iter().position(|f| *f == hit) {
                Some(idx) => idx,
                None => {
                    focus_points.push(hit);
                    if focus_points.len() > k - 1 {
                        return None;
                    }
                    focus_points.len() - 1
                }
            };
            assignment.push(idx);
        }
    }
    if focus_points.len() != k - 1 {
        return None;
    }
    #[cfg(debug_assertions)]
    {
        // each focus point's pairs partition the arc: forced by the count
        let mut seen = vec![0u32; k - 1];
        let mut pair = 0;
        for i in 0..k {
            for j in i + 1..k {
                let f = assignment[pair];
                assert_eq!(seen[f] & (1 << i | 1 << j), 0);
                seen[f] |= 1 << i | 1 << j;
                pair += 1;
            }
        }
        assert!(seen.iter().all(|&s| s == (1 << k) - 1));
    }
    Some(FocusData {
        line: *line,
        focus_points,
        assignment,
    })
}

/// The 1-factorization induced by a focus set: vertices are arc-point
/// indices, the color of (i,j) is the focus index of its secant.
pub fn induced_factorization(
    arc: &Arc,
    focus: &FocusData,
) -> Result<OneFactorization, OneFactError> {
    let colors = focus.assignment.iter().map(|&c| c as u8).collect();
    OneFactorization::from_colors(arc.len(), colors)
}

/// All lines on which the arc is hyperfocused, scanning every line of the
/// plane (guarded to q <= 1024).
pub fn find_focus_lines(ctx: &FieldCtx, arc: &Arc) -> Result<Vec<(ProjLine, FocusData)>, ArcError> {
    if ctx.order() > 1 << 10 {
        return Err(ArcError::ScanTooLarge(ctx.order()));
    }
    Ok(all_lines(ctx)
        .into_iter()
        .filter_map(|l| is_hyperfocused(ctx, arc, &l).map(|fd| (l, fd)))
        .collect())
}

/// Hyperfocused (d+1)-arc from a multiplicative subgroup: the conic points
/// {(t,t^2,1) : t^d = 1} plus the nucleus (1,0,0), hyperfocused on the
/// line x = 0, which is secant to the conic. The focus set is
/// {(0,h,1) : h^d = 1}.
pub fn mult_subgroup_arc(ctx: &FieldCtx, d: u32) -> Result<(Arc, ProjLine), ArcError> {
    if d < 3 {
        return Err(ArcError::OrderTooSmall(d));
    }
    let subgroup = ctx.mult_subgroup(d)?;
    let mut points: Vec<ProjPoint> = subgroup
        .iter()
        .map(|&t| conic_point(ctx, Some(t)))
        .collect();
    points.push(ProjPoint::from_bits(ctx, [1, 0, 0]));
    let arc = Arc::new(ctx, points)?;
    let line = ProjLine::from_bits(ctx, [1, 0, 0]);

    let focus = is_hyperfocused(ctx, &arc, &line)
        .ok_or_else(|| ArcError::Verification("subgroup arc not hyperfocused on x=0".into()))?;
    let mut expect: Vec<ProjPoint> = subgroup
        .iter()
        .map(|&h| ProjPoint::new(ctx, [FieldElem::ZERO, h, FieldElem::ONE]).expect("nonzero"))
        .collect();
    let mut got = focus.focus_points.clone();
    expect.sort();
    got.sort();
    if expect != got {
        return Err(ArcError::Verification(
            "focus set is not the expected subgroup column".into(),
        ));
    }
    Ok((arc, line))
}

type Mat2 = [[FieldElem; 2]; 2];

fn mat2_mul(ctx: &FieldCtx, a: Mat2, b: Mat2) -> Mat2 {
    let mut out = [[FieldElem::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j] = ctx.add(out[i][j], ctx.mul(a[i][k], b[k][j]));
            }
        }
    }
    out
}

fn mat2_pow(ctx: &FieldCtx, m: Mat2, mut e: u32) -> Mat2 {
    let mut acc = [
        [FieldElem::ONE, FieldElem::ZERO],
        [FieldElem::ZERO, FieldElem::ONE],
    ];
    let mut base = m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mat2_mul(ctx, acc, base);
        }
        base = mat2_mul(ctx, base, base);
        e >>= 1;
    }
    acc
}

/// Fractional-linear action of a matrix on PG(1,q); `None` is the point
/// at infinity.
fn moebius(ctx: &FieldCtx, m: Mat2, t: Option<FieldElem>) -> Option<FieldElem> {
    let (num, den) = match t {
        Some(t) => (
            ctx.add(ctx.mul(m[0][0], t), m[0][1]),
            ctx.add(ctx.mul(m[1][0], t), m[1][1]),
        ),
        None => (m[0][0], m[1][0]),
    };
    if den.is_zero() {
        None
    } else {
        Some(ctx.mul(num, ctx.inv(den).expect("nonzero denominator")))
    }
}

fn orbit(ctx: &FieldCtx, m: Mat2, start: Option<FieldElem>) -> Vec<Option<FieldElem>> {
    let mut orbit = vec![start];
    let mut t = moebius(ctx, m, start);
    while t != start {
        orbit.push(t);
        t = moebius(ctx, m, t);
    }
    orbit
}

/// Hyperfocused (d+1)-arc from a cyclic subgroup of order d | q+1 acting
/// on the conic: realize a cyclic order-(q+1) group as the Moebius action
/// of a companion matrix of an irreducible t^2 + bt + 1 (searching b by
/// the trace criterion and checking exact order on the q+1 conic points),
/// take the d-element subgroup orbit of the parameter-infinity point, and
/// add the nucleus. The returned focus line is external to the conic;
/// hyperfocus is verified internally via the full line scan.
pub fn cyclic_subgroup_arc(ctx: &FieldCtx, d: u32) -> Result<(Arc, ProjLine), ArcError> {
    let q = ctx.order();
    if d < 3 {
        return Err(ArcError::OrderTooSmall(d));
    }
    if d == q + 1 {
        return Err(ArcError::HyperovalBoundary);
    }
    if (q + 1) % d != 0 {
        return Err(ArcError::Field(FieldError::OrderNotDividing {
            d,
            group: q + 1,
        }));
    }

    // companion matrix of t^2 + bt + 1 with full order q+1
    let mut generator = None;
    for b in ctx.elements().skip(1) {
        // t^2 + bt + 1 irreducible iff trace(1/b^2) = 1
        let binv = ctx.inv(b).expect("nonzero");
        if ctx.trace(ctx.mul(binv, binv)) != 1 {
            continue;
        }
        let m: Mat2 = [[FieldElem::ZERO, FieldElem::ONE], [FieldElem::ONE, b]];
        if orbit(ctx, m, None).len() == (q + 1) as usize {
            generator = Some(m);
            break;
        }
    }
    let m = generator
        .ok_or_else(|| ArcError::Verification("no order-(q+1) conic collineation found".into()))?;

    let sub = mat2_pow(ctx, m, (q + 1) / d);
    let params = orbit(ctx, sub, None);
    if params.len() != d as usize {
        return Err(ArcError::Verification(format!(
            "subgroup orbit has size {}, expected {d}",
            params.len()
        )));
    }
    let mut points: Vec<ProjPoint> = params.iter().map(|&t| conic_point(ctx, t)).collect();
    points.push(ProjPoint::from_bits(ctx, [1, 0, 0]));
    let arc = Arc::new(ctx, points)?;

    let conic = Conic::standard(ctx);
    let lines = find_focus_lines(ctx, &arc)?;
    let external = lines.into_iter().find(|(l, _)| {
        conic
            .classify_line(ctx, l)
            .map(|c| c == LineClass::External)
            == Ok(true)
    });
    match external {
        Some((line, _)) => Ok((arc, line)),
        None => Err(ArcError::Verification(
            "constructed arc has no external focus line".into(),
        )),
    }
}

/// The explicit coordinatization of the hyperfocused 12-arc on a
/// hyperconic over a field containing GF(2^5), together with its labeled
/// focus set and the focus line `[1,1,a]`; `a` is the smallest root of
/// x^5 + x^4 + x^3 + x + 1.
#[derive(Clone, Debug)]
pub struct Hyperconic12 {
    pub a: FieldElem,
    /// Arc points, label order 0..11; point 0 is the nucleus.
    pub arc: Arc,
    /// Focus points, label order A..K.
    pub focus_points: Vec<ProjPoint>,
    pub focus_line: ProjLine,
}

/// The quintic whose roots coordinatize the hyperfocused 12-arc.
pub fn twelve_arc_quintic() -> Poly2 {
    Poly2::from_mask(0b11_1011) // x^5 + x^4 + x^3 + x + 1
}

pub fn hyperconic_12_arc(ctx: &FieldCtx) -> Result<Hyperconic12, ArcError> {
    let roots = ctx.roots(twelve_arc_quintic());
    let a = *roots.first().ok_or_else(|| {
        ArcError::Verification(format!(
            "GF(2^{}) contains no root of {}",
            ctx.degree(),
            twelve_arc_quintic()
        ))
    })?;
    // sum of powers of a; exponent 0 is the constant 1
    let poly = |exps: &[u64]| -> FieldElem {
        exps.iter()
            .fold(FieldElem::ZERO, |acc, &e| ctx.add(acc, ctx.pow(a, e)))
    };
    let pt = |x: FieldElem, y: FieldElem, z: FieldElem| -> Result<ProjPoint, ArcError> {
        Ok(ProjPoint::new(ctx, [x, y, z])?)
    };
    let (zero, one) = (FieldElem::ZERO, FieldElem::ONE);

    let arc_points = vec![
        pt(one, zero, zero)?,                                      // 0, the nucleus
        pt(zero, one, zero)?,                                      // 1
        pt(zero, zero, one)?,                                      // 2
        pt(one, one, one)?,                                        // 3
        pt(a, poly(&[2]), one)?,                                   // 4
        pt(poly(&[1, 0]), poly(&[2, 0]), one)?,                    // 5
        pt(poly(&[2, 1]), poly(&[2]), poly(&[2, 0]))?,             // 6
        pt(poly(&[1, 0]), one, poly(&[2, 0]))?,                    // 7
        pt(poly(&[2, 1]), poly(&[4, 2]), one)?,                    // 8
        pt(poly(&[2, 1, 0]), poly(&[4, 2, 0]), one)?,              // 9
        pt(poly(&[3, 1, 0]), poly(&[3, 2, 1, 0]), poly(&[2, 0]))?, // 10
        pt(poly(&[3, 2, 1]), poly(&[3, 1]), poly(&[2, 0]))?,       // 11
    ];
    let focus_points = vec![
        pt(one, one, zero)?,                                    // A
        pt(a, zero, one)?,                                      // B
        pt(zero, a, one)?,                                      // C
        pt(poly(&[1, 0]), one, one)?,                           // D
        pt(one, poly(&[1, 0]), one)?,                           // E
        pt(poly(&[2, 1]), poly(&[2]), one)?,                    // F
        pt(a, poly(&[2]), poly(&[1, 0]))?,                      // G
        pt(poly(&[2, 1, 0]), poly(&[2, 0]), one)?,              // H
        pt(one, poly(&[2, 1, 0]), poly(&[1, 0]))?,              // I
        pt(poly(&[2, 0]), poly(&[3, 1, 0]), poly(&[2, 1, 0]))?, // J, the meet of secants (0,6) and (3,9)
        pt(one, poly(&[2, 1]), poly(&[4, 3, 2, 1]))?,           // K
    ];
    let focus_line = ProjLine::new(ctx, [one, one, a])?;

    let arc = Arc::new(ctx, arc_points)?;
    let focus = is_hyperfocused(ctx, &arc, &focus_line).ok_or_else(|| {
        ArcError::Verification("12-arc coordinates are not hyperfocused on [1,1,a]".into())
    })?;
    let mut got = focus.focus_points.clone();
    let mut expect = focus_points.clone();
    got.sort();
    expect.sort();
    if got != expect {
        return Err(ArcError::Verification(
            "12-arc focus set differs from the labeled points".into(),
        ));
    }
    Ok(Hyperconic12 {
        a,
        arc,
        focus_points,
        focus_line,
    })
}

/// Render the arc file format: `field` header, one `p` line per point in
/// order, optionally an `l` line for a focus line.
pub fn write_arc_file(ctx: &FieldCtx, arc: &Arc, line: Option<&ProjLine>) -> String {
    let mut out = String::new();
    out.push_str(&ctx.header_line());
    out.push('\n');
    for p in arc.points() {
        out.push_str(&p.file_line());
        out.push('\n');
    }
    if let Some(l) = line {
        out.push_str(&l.file_line());
        out.push('\n');
    }
    out
}

pub struct ArcFile {
    pub ctx: FieldCtx,
    pub arc: Arc,
    pub line: Option<ProjLine>,
}

pub fn parse_arc_file(text: &str) -> Result<ArcFile, ArcError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(ArcError::Parse {
        line: 1,
        msg: "empty arc file".into(),
    })?;
    let ctx = FieldCtx::parse_header(header)?;
    let mut points = Vec::new();
    let mut focus_line = None;
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with("p ") {
            if focus_line.is_some() {
                return Err(ArcError::Parse {
                    line: lineno,
                    msg: "point after focus line".into(),
                });
            }
            points.push(
                crate::pg2::parse_point_line(&ctx, line).map_err(|e| ArcError::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?,
            );
        } else if line.starts_with("l ") {
            if focus_line.is_some() {
                return Err(ArcError::Parse {
                    line: lineno,
                    msg: "multiple focus lines".into(),
                });
            }
            focus_line =
                Some(
                    crate::pg2::parse_line_line(&ctx, line).map_err(|e| ArcError::Parse {
                        line: lineno,
                        msg: e.to_string(),
                    })?,
                );
        } else {
            return Err(ArcError::Parse {
                line: lineno,
                msg: format!("unrecognized line `{line}`"),
            });
        }
    }
    let arc = Arc::new(&ctx, points)?;
    Ok(ArcFile {
        ctx,
        arc,
        line: focus_line,
    })
}
