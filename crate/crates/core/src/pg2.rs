//! Incidence geometry of PG(2,q), q = 2^m.
//!
//! Points and lines are normalized homogeneous triples over GF(2^m) and
//! share one representation (duality). Conics, tangents, nuclei, diagonal
//! lines of quadrangles, and the Pascal/Desargues predicates live here;
//! the predicates double as proof oracles in the test suites.

use std::fmt;

use crate::gf2m::{FieldCtx, FieldElem};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GeomError {
    #[error("the zero triple is not a projective point or line")]
    ZeroVector,
    #[error("the two points coincide; no unique joining line")]
    CoincidentPoints,
    #[error("the two lines coincide; no unique meeting point")]
    CoincidentLines,
    #[error("conic fit system has rank {rank} < 5 (degenerate input)")]
    DegenerateConicFit { rank: usize },
    #[error("conic is degenerate")]
    DegenerateConic,
    #[error("point does not lie on the conic")]
    PointNotOnConic,
    #[error("the four points do not form a quadrangle")]
    DegenerateQuadrangle,
    #[error("the four points do not form a projective frame")]
    DegenerateFrame,
    #[error("malformed geometry line `{0}`")]
    BadLine(String),
}

fn normalize(ctx: &FieldCtx, mut c: [FieldElem; 3]) -> Result<[FieldElem; 3], GeomError> {
    let i = c
        .iter()
        .position(|e| !e.is_zero())
        .ok_or(GeomError::ZeroVector)?;
    let inv = ctx.inv(c[i]).expect("pivot is nonzero");
    for e in &mut c {
        *e = ctx.mul(*e, inv);
    }
    Ok(c)
}

/// Alternating bilinear (cross) product; characteristic 2, so no signs.
fn cross(ctx: &FieldCtx, u: [FieldElem; 3], v: [FieldElem; 3]) -> [FieldElem; 3] {
    [
        ctx.add(ctx.mul(u[1], v[2]), ctx.mul(u[2], v[1])),
        ctx.add(ctx.mul(u[2], v[0]), ctx.mul(u[0], v[2])),
        ctx.add(ctx.mul(u[0], v[1]), ctx.mul(u[1], v[0])),
    ]
}

fn dot(ctx: &FieldCtx, u: [FieldElem; 3], v: [FieldElem; 3]) -> FieldElem {
    ctx.add(
        ctx.add(ctx.mul(u[0], v[0]), ctx.mul(u[1], v[1])),
        ctx.mul(u[2], v[2]),
    )
}

fn det3(ctx: &FieldCtx, r0: [FieldElem; 3], r1: [FieldElem; 3], r2: [FieldElem; 3]) -> FieldElem {
    dot(ctx, r0, cross(ctx, r1, r2))
}

/// A point of PG(2,q): homogeneous triple with first nonzero coordinate 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: [FieldElem; 3],
}

/// A line of PG(2,q), same normalized representation as points.
/// P lies on L iff l0*x + l1*y + l2*z = 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjLine {
    coeffs: [FieldElem; 3],
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.coords;
        write!(f, "({x},{y},{z})")
    }
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.coeffs;
        write!(f, "[{a},{b},{c}]")
    }
}

impl ProjPoint {
    pub fn new(ctx: &FieldCtx, coords: [FieldElem; 3]) -> Result<ProjPoint, GeomError> {
        Ok(ProjPoint {
            coords: normalize(ctx, coords)?,
        })
    }

    /// Convenience constructor from raw masks; panics on the zero triple.
    pub fn from_bits(ctx: &FieldCtx, bits: [u16; 3]) -> ProjPoint {
        ProjPoint::new(ctx, bits.map(|b| ctx.elem(b))).expect("nonzero triple")
    }

    pub fn coords(&self) -> [FieldElem; 3] {
        self.coords
    }

    /// Arc/point file line: `p <x> <y> <z>` with hex element literals.
    pub fn file_line(&self) -> String {
        let [x, y, z] = self.coords;
        format!("p {} {} {}", x.to_hex(), y.to_hex(), z.to_hex())
    }
}

impl ProjLine {
    pub fn new(ctx: &FieldCtx, coeffs: [FieldElem; 3]) -> Result<ProjLine, GeomError> {
        Ok(ProjLine {
            coeffs: normalize(ctx, coeffs)?,
        })
    }

    pub fn from_bits(ctx: &FieldCtx, bits: [u16; 3]) -> ProjLine {
        ProjLine::new(ctx, bits.map(|b| ctx.elem(b))).expect("nonzero triple")
    }

    pub fn coeffs(&self) -> [FieldElem; 3] {
        self.coeffs
    }

    pub fn file_line(&self) -> String {
        let [a, b, c] = self.coeffs;
        format!("l {} {} {}", a.to_hex(), b.to_hex(), c.to_hex())
    }
}

fn parse_triple(ctx: &FieldCtx, line: &str, tag: &str) -> Result<[FieldElem; 3], GeomError> {
    let bad = || GeomError::BadLine(line.to_string());
    let mut toks = line.trim().split_whitespace();
    if toks.next() != Some(tag) {
        return Err(bad());
    }
    let mut c = [FieldElem::ZERO; 3];
    for slot in &mut c {
        let tok = toks.next().ok_or_else(bad)?;
        *slot = ctx.parse_elem(tok).map_err(|_| bad())?;
    }
    if toks.next().is_some() {
        return Err(bad());
    }
    Ok(c)
}

/// Parse a `p <x> <y> <z>` file line.
pub fn parse_point_line(ctx: &FieldCtx, line: &str) -> Result<ProjPoint, GeomError> {
    ProjPoint::new(ctx, parse_triple(ctx, line, "p")?)
}

/// Parse an `l <a> <b> <c>` file line.
pub fn parse_line_line(ctx: &FieldCtx, line: &str) -> Result<ProjLine, GeomError> {
    ProjLine::new(ctx, parse_triple(ctx, line, "l")?)
}

/// The unique line through two distinct points.
pub fn line_through(ctx: &FieldCtx, p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine, GeomError> {
    let c = cross(ctx, p.coords, q.coords);
    ProjLine::new(ctx, c).map_err(|_| GeomError::CoincidentPoints)
}

/// The unique common point of two distinct lines.
pub fn meet(ctx: &FieldCtx, l1: &ProjLine, l2: &ProjLine) -> Result<ProjPoint, GeomError> {
    let c = cross(ctx, l1.coeffs, l2.coeffs);
    ProjPoint::new(ctx, c).map_err(|_| GeomError::CoincidentLines)
}

pub fn incident(ctx: &FieldCtx, p: &ProjPoint, l: &ProjLine) -> bool {
    dot(ctx, p.coords, l.coeffs).is_zero()
}

pub fn collinear(ctx: &FieldCtx, p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> bool {
    det3(ctx, p.coords, q.coords, r.coords).is_zero()
}

pub fn concurrent(ctx: &FieldCtx, l1: &ProjLine, l2: &ProjLine, l3: &ProjLine) -> bool {
    det3(ctx, l1.coeffs, l2.coeffs, l3.coeffs).is_zero()
}

/// All q^2+q+1 points, each exactly once in normalized-lex order.
pub fn all_points(ctx: &FieldCtx) -> Vec<ProjPoint> {
    let mut pts = Vec::with_capacity((ctx.order() * ctx.order() + ctx.order() + 1) as usize);
    let one = FieldElem::ONE;
    for y in ctx.elements() {
        for z in ctx.elements() {
            pts.push(ProjPoint {
                coords: [one, y, z],
            });
        }
    }
    for z in ctx.elements() {
        pts.push(ProjPoint {
            coords: [FieldElem::ZERO, one, z],
        });
    }
    pts.push(ProjPoint {
        coords: [FieldElem::ZERO, FieldElem::ZERO, one],
    });
    pts
}

/// All q^2+q+1 lines, same enumeration as the points (duality).
pub fn all_lines(ctx: &FieldCtx) -> Vec<ProjLine> {
    all_points(ctx)
        .into_iter()
        .map(|p| ProjLine { coeffs: p.coords })
        .collect()
}

/// The q+1 points on a line, deterministic order.
pub fn line_points(ctx: &FieldCtx, l: &ProjLine) -> Vec<ProjPoint> {
    let basis = [
        [FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO],
        [FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO],
        [FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE],
    ];
    let mut base = Vec::new();
    for e in basis {
        let c = cross(ctx, l.coeffs, e);
        if let Ok(p) = ProjPoint::new(ctx, c) {
            if !base.contains(&p) {
                base.push(p);
            }
        }
        if base.len() == 2 {
            break;
        }
    }
    debug_assert_eq!(base.len(), 2, "a line spans a rank-2 solution space");
    let (p, q) = (base[0], base[1]);
    let mut pts = vec![q];
    for t in ctx.elements() {
        let c = [
            ctx.add(p.coords[0], ctx.mul(t, q.coords[0])),
            ctx.add(p.coords[1], ctx.mul(t, q.coords[1])),
            ctx.add(p.coords[2], ctx.mul(t, q.coords[2])),
        ];
        pts.push(ProjPoint::new(ctx, c).expect("independent combination is nonzero"));
    }
    debug_assert!(pts.iter().all(|x| incident(ctx, x, l)));
    pts
}

/// How a line sits relative to a conic.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LineClass {
    External,
    Tangent,
    Secant,
}

/// A conic a*x^2 + b*y^2 + c*z^2 + d*xy + e*xz + f*yz = 0, coefficients
/// normalized like points.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Conic {
    c: [FieldElem; 6],
}

impl fmt::Debug for Conic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Conic{:?}", self.c.map(|e| e.to_hex()))
    }
}

impl Conic {
    pub fn new(ctx: &FieldCtx, coeffs: [FieldElem; 6]) -> Result<Conic, GeomError> {
        let i = coeffs
            .iter()
            .position(|e| !e.is_zero())
            .ok_or(GeomError::ZeroVector)?;
        let inv = ctx.inv(coeffs[i]).expect("pivot is nonzero");
        Ok(Conic {
            c: coeffs.map(|e| ctx.mul(e, inv)),
        })
    }

    /// The standard conic x^2 = yz.
    pub fn standard(_ctx: &FieldCtx) -> Conic {
        Conic {
            c: [
                FieldElem::ONE,
                FieldElem::ZERO,
                FieldElem::ZERO,
                FieldElem::ZERO,
                FieldElem::ZERO,
                FieldElem::ONE,
            ],
        }
    }

    pub fn coeffs(&self) -> [FieldElem; 6] {
        self.c
    }

    pub fn eval(&self, ctx: &FieldCtx, p: &ProjPoint) -> FieldElem {
        let [x, y, z] = p.coords;
        let [a, b, c, d, e, f] = self.c;
        let mut acc = ctx.mul(a, ctx.mul(x, x));
        acc = ctx.add(acc, ctx.mul(b, ctx.mul(y, y)));
        acc = ctx.add(acc, ctx.mul(c, ctx.mul(z, z)));
        acc = ctx.add(acc, ctx.mul(d, ctx.mul(x, y)));
        acc = ctx.add(acc, ctx.mul(e, ctx.mul(x, z)));
        acc = ctx.add(acc, ctx.mul(f, ctx.mul(y, z)));
        acc
    }

    pub fn contains(&self, ctx: &FieldCtx, p: &ProjPoint) -> bool {
        self.eval(ctx, p).is_zero()
    }

    /// Polar bilinear form B(u,v); in characteristic 2 only the mixed
    /// coefficients survive.
    fn bilinear(&self, ctx: &FieldCtx, u: [FieldElem; 3], v: [FieldElem; 3]) -> FieldElem {
        let [_, _, _, d, e, f] = self.c;
        let mut acc = ctx.mul(d, ctx.add(ctx.mul(u[0], v[1]), ctx.mul(u[1], v[0])));
        acc = ctx.add(
            acc,
            ctx.mul(e, ctx.add(ctx.mul(u[0], v[2]), ctx.mul(u[2], v[0]))),
        );
        ctx.add(
            acc,
            ctx.mul(f, ctx.add(ctx.mul(u[1], v[2]), ctx.mul(u[2], v[1]))),
        )
    }

    /// The common point of all tangent lines: (f, e, d).
    pub fn nucleus(&self, ctx: &FieldCtx) -> Result<ProjPoint, GeomError> {
        let [_, _, _, d, e, f] = self.c;
        ProjPoint::new(ctx, [f, e, d]).map_err(|_| GeomError::DegenerateConic)
    }

    /// Nondegenerate iff the mixed part is nonzero and the nucleus is off
    /// the conic.
    pub fn is_nondegenerate(&self, ctx: &FieldCtx) -> bool {
        match self.nucleus(ctx) {
            Ok(n) => !self.contains(ctx, &n),
            Err(_) => false,
        }
    }

    /// Tangent line at a conic point (the characteristic-2 polar).
    pub fn tangent_at(&self, ctx: &FieldCtx, p: &ProjPoint) -> Result<ProjLine, GeomError> {
        if !self.contains(ctx, p) {
            return Err(GeomError::PointNotOnConic);
        }
        let [x, y, z] = p.coords;
        let [_, _, _, d, e, f] = self.c;
        let t = [
            ctx.add(ctx.mul(d, y), ctx.mul(e, z)),
            ctx.add(ctx.mul(d, x), ctx.mul(f, z)),
            ctx.add(ctx.mul(e, x), ctx.mul(f, y)),
        ];
        ProjLine::new(ctx, t).map_err(|_| GeomError::DegenerateConic)
    }

    /// Count conic points on the line by solving the restricted quadratic:
    /// 0, 1, or 2 meets classify it as external, tangent, or secant.
    pub fn classify_line(&self, ctx: &FieldCtx, l: &ProjLine) -> Result<LineClass, GeomError> {
        let pts = line_points(ctx, l);
        let (q0, p0) = (pts[0], pts[1]);
        // points of l are q0 and p0 + t*q0; substituting gives
        // eval(q0) t^2 + B(p0,q0) t + eval(p0) = 0
        let a = self.eval(ctx, &q0);
        let b = self.bilinear(ctx, p0.coords, q0.coords);
        let c0 = self.eval(ctx, &p0);
        let count = if !a.is_zero() {
            if b.is_zero() {
                1 // t^2 = c0/a has exactly one root (Frobenius is bijective)
            } else {
                // substitute t = (b/a)s: s^2 + s + a*c0/b^2, solvable iff trace 0
                let binv = ctx.inv(b).expect("b nonzero");
                let disc = ctx.mul(ctx.mul(a, c0), ctx.mul(binv, binv));
                if ctx.trace(disc) == 0 {
                    2
                } else {
                    0
                }
            }
        } else {
            // q0 on the conic; remaining points satisfy b t + c0 = 0
            if !b.is_zero() {
                2
            } else if !c0.is_zero() {
                1
            } else {
                return Err(GeomError::DegenerateConic); // whole line on the conic
            }
        };
        Ok(match count {
            0 => LineClass::External,
            1 => LineClass::Tangent,
            _ => LineClass::Secant,
        })
    }
}

/// Parametrization of the standard conic: t -> (t, t^2, 1), infinity -> (0,1,0).
pub fn conic_point(ctx: &FieldCtx, t: Option<FieldElem>) -> ProjPoint {
    match t {
        Some(t) => ProjPoint::new(ctx, [t, ctx.mul(t, t), FieldElem::ONE]).expect("nonzero"),
        None => ProjPoint::from_bits(ctx, [0, 1, 0]),
    }
}

/// Conic through five points: solve the 5x6 homogeneous system. Reports
/// rank < 5 (degenerate input) as an error; with no three of the five
/// collinear the solution is unique up to scale.
pub fn fit_conic(ctx: &FieldCtx, pts: &[ProjPoint; 5]) -> Result<Conic, GeomError> {
    let mut rows: Vec<[FieldElem; 6]> = pts
        .iter()
        .map(|p| {
            let [x, y, z] = p.coords;
            [
                ctx.mul(x, x),
                ctx.mul(y, y),
                ctx.mul(z, z),
                ctx.mul(x, y),
                ctx.mul(x, z),
                ctx.mul(y, z),
            ]
        })
        .collect();

    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..6 {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = ctx.inv(rows[r][col]).expect("pivot nonzero");
        for j in 0..6 {
            rows[r][j] = ctx.mul(rows[r][j], inv);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col];
                for j in 0..6 {
                    let sub = ctx.mul(factor, rows[r][j]);
                    rows[i][j] = ctx.add(rows[i][j], sub);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if r < 5 {
        return Err(GeomError::DegenerateConicFit { rank: r });
    }
    let free = (0..6)
        .find(|c| !pivots.contains(c))
        .expect("one free column");
    let mut sol = [FieldElem::ZERO; 6];
    sol[free] = FieldElem::ONE;
    for (ri, &pc) in pivots.iter().enumerate() {
        sol[pc] = rows[ri][free]; // x_pc = row[free] * x_free in characteristic 2
    }
    Conic::new(ctx, sol)
}

/// The line through the three diagonal points of a quadrangle; in
/// characteristic 2 they are always collinear.
pub fn diagonal_line(ctx: &FieldCtx, quad: &[ProjPoint; 4]) -> Result<ProjLine, GeomError> {
    for i in 0..4 {
        for j in i + 1..4 {
            if quad[i] == quad[j] {
                return Err(GeomError::DegenerateQuadrangle);
            }
            for k in j + 1..4 {
                if collinear(ctx, &quad[i], &quad[j], &quad[k]) {
                    return Err(GeomError::DegenerateQuadrangle);
                }
            }
        }
    }
    let [a, b, c, d] = quad;
    let side = |p, q| line_through(ctx, p, q).expect("quadrangle points distinct");
    let d1 = meet(ctx, &side(a, b), &side(c, d)).expect("opposite sides distinct");
    let d2 = meet(ctx, &side(a, c), &side(b, d)).expect("opposite sides distinct");
    let d3 = meet(ctx, &side(a, d), &side(b, c)).expect("opposite sides distinct");
    let line = line_through(ctx, &d1, &d2).expect("diagonal points distinct");
    assert!(
        incident(ctx, &d3, &line),
        "diagonal points of a quadrangle are collinear over GF(2^m)"
    );
    Ok(line)
}

/// Outcome of a configuration predicate that may be fed degenerate input.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConfigOutcome<T> {
    Holds(T),
    Fails,
    Degenerate,
}

impl<T> ConfigOutcome<T> {
    pub fn holds(&self) -> bool {
        matches!(self, ConfigOutcome::Holds(_))
    }
}

/// Pascal predicate: do the three meets of opposite sides of the hexagon
/// lie on one line? Repeated adjacent vertices or coincident opposite
/// sides are reported as degenerate, not as false.
pub fn pascal_collinear(ctx: &FieldCtx, hex: &[ProjPoint; 6]) -> ConfigOutcome<()> {
    let mut sides = [[FieldElem::ZERO; 3]; 6];
    for i in 0..6 {
        match line_through(ctx, &hex[i], &hex[(i + 1) % 6]) {
            Ok(l) => sides[i] = l.coeffs,
            Err(_) => return ConfigOutcome::Degenerate,
        }
    }
    let mut meets = [[FieldElem::ZERO; 3]; 3];
    for i in 0..3 {
        if sides[i] == sides[i + 3] {
            return ConfigOutcome::Degenerate;
        }
        let l1 = ProjLine { coeffs: sides[i] };
        let l2 = ProjLine {
            coeffs: sides[i + 3],
        };
        meets[i] = meet(ctx, &l1, &l2).expect("distinct lines").coords;
    }
    if det3(ctx, meets[0], meets[1], meets[2]).is_zero() {
        ConfigOutcome::Holds(())
    } else {
        ConfigOutcome::Fails
    }
}

fn triangle_ok(ctx: &FieldCtx, t: &[ProjPoint; 3]) -> bool {
    t[0] != t[1] && t[1] != t[2] && t[0] != t[2] && !collinear(ctx, &t[0], &t[1], &t[2])
}

/// Center of perspectivity of two triangles: the common point of the
/// three joins of corresponding vertices, if concurrent.
pub fn perspective_from_point(
    ctx: &FieldCtx,
    t1: &[ProjPoint; 3],
    t2: &[ProjPoint; 3],
) -> ConfigOutcome<ProjPoint> {
    if !triangle_ok(ctx, t1) || !triangle_ok(ctx, t2) {
        return ConfigOutcome::Degenerate;
    }
    let mut joins = [[FieldElem::ZERO; 3]; 3];
    for i in 0..3 {
        match line_through(ctx, &t1[i], &t2[i]) {
            Ok(l) => joins[i] = l.coeffs,
            Err(_) => return ConfigOutcome::Degenerate,
        }
    }
    if joins[0] == joins[1] || joins[1] == joins[2] || joins[0] == joins[2] {
        return ConfigOutcome::Degenerate;
    }
    let l0 = ProjLine { coeffs: joins[0] };
    let l1 = ProjLine { coeffs: joins[1] };
    let l2 = ProjLine { coeffs: joins[2] };
    let center = meet(ctx, &l0, &l1).expect("distinct joins");
    if incident(ctx, &center, &l2) {
        ConfigOutcome::Holds(center)
    } else {
        ConfigOutcome::Fails
    }
}

/// Axis of perspectivity of two triangles: the line through the three
/// meets of corresponding sides, if collinear.
pub fn perspective_from_line(
    ctx: &FieldCtx,
    t1: &[ProjPoint; 3],
    t2: &[ProjPoint; 3],
) -> ConfigOutcome<ProjLine> {
    if !triangle_ok(ctx, t1) || !triangle_ok(ctx, t2) {
        return ConfigOutcome::Degenerate;
    }
    let pairs = [(0, 1), (1, 2), (2, 0)];
    let mut meets = [[FieldElem::ZERO; 3]; 3];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let s1 = line_through(ctx, &t1[i], &t1[j]).expect("triangle sides defined");
        let s2 = line_through(ctx, &t2[i], &t2[j]).expect("triangle sides defined");
        if s1 == s2 {
            return ConfigOutcome::Degenerate;
        }
        meets[k] = meet(ctx, &s1, &s2).expect("distinct sides").coords;
    }
    if meets[0] == meets[1] || meets[1] == meets[2] || meets[0] == meets[2] {
        return ConfigOutcome::Degenerate;
    }
    let m0 = ProjPoint { coords: meets[0] };
    let m1 = ProjPoint { coords: meets[1] };
    let m2 = ProjPoint { coords: meets[2] };
    let axis = line_through(ctx, &m0, &m1).expect("distinct meets");
    if incident(ctx, &m2, &axis) {
        ConfigOutcome::Holds(axis)
    } else {
        ConfigOutcome::Fails
    }
}

/// A projectivity of PG(2,q) given by an invertible 3x3 matrix, up to scale.
#[derive(Clone, Copy, Debug)]
pub struct ProjTransform {
    m: [[FieldElem; 3]; 3],
}

impl ProjTransform {
    /// The projectivity taking the standard frame e0, e1, e2, (1,1,1) to
    /// the given quadrangle, in order.
    pub fn from_frame(ctx: &FieldCtx, frame: &[ProjPoint; 4]) -> Result<ProjTransform, GeomError> {
        // solve [P0 P1 P2] * lambda = P3; columns are lambda_i * P_i
        let cols: Vec<[FieldElem; 3]> = frame.iter().map(|p| p.coords).collect();
        let lambda =
            solve3(ctx, [cols[0], cols[1], cols[2]], cols[3]).ok_or(GeomError::DegenerateFrame)?;
        if lambda.iter().any(|l| l.is_zero()) {
            return Err(GeomError::DegenerateFrame);
        }
        let mut m = [[FieldElem::ZERO; 3]; 3];
        for (j, lam) in lambda.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = ctx.mul(*lam, cols[j][i]);
            }
        }
        Ok(ProjTransform { m })
    }

    /// The projectivity taking one ordered quadrangle to another.
    pub fn between(
        ctx: &FieldCtx,
        from: &[ProjPoint; 4],
        to: &[ProjPoint; 4],
    ) -> Result<ProjTransform, GeomError> {
        let a = ProjTransform::from_frame(ctx, from)?;
        let b = ProjTransform::from_frame(ctx, to)?;
        Ok(b.compose(ctx, &a.inverse(ctx)))
    }

    /// Matrix inverse up to scale: the adjugate (no signs in char 2).
    pub fn inverse(&self, ctx: &FieldCtx) -> ProjTransform {
        let m = &self.m;
        let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
            ctx.add(ctx.mul(m[r0][c0], m[r1][c1]), ctx.mul(m[r0][c1], m[r1][c0]))
        };
        let mut adj = [[FieldElem::ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
                let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
                // adj[j][i]: transpose of the cofactor matrix
                adj[j][i] = minor(r0.min(r1), r0.max(r1), c0.min(c1), c0.max(c1));
            }
        }
        ProjTransform { m: adj }
    }

    pub fn compose(&self, ctx: &FieldCtx, other: &ProjTransform) -> ProjTransform {
        let mut m = [[FieldElem::ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m[i][j] = ctx.add(m[i][j], ctx.mul(self.m[i][k], other.m[k][j]));
                }
            }
        }
        ProjTransform { m }
    }

    pub fn apply(&self, ctx: &FieldCtx, p: &ProjPoint) -> ProjPoint {
        let v = p.coords;
        let mut out = [FieldElem::ZERO; 3];
        for i in 0..3 {
            for k in 0..3 {
                out[i] = ctx.add(out[i], ctx.mul(self.m[i][k], v[k]));
            }
        }
        ProjPoint::new(ctx, out).expect("projectivity is invertible")
    }
}

/// Solve a 3x3 linear system given by columns; `None` if singular.
fn solve3(
    ctx: &FieldCtx,
    cols: [[FieldElem; 3]; 3],
    rhs: [FieldElem; 3],
) -> Option<[FieldElem; 3]> {
    // augmented elimination on rows of the column-matrix
    let mut a = [[FieldElem::ZERO; 4]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = cols[j][i];
        }
        a[i][3] = rhs[i];
    }
    let mut r = 0;
    let mut pivots = [usize::MAX; 3];
    for col in 0..3 {
        let Some(pr) = (r..3).find(|&i| !a[i][col].is_zero()) else {
            return None;
        };
        a.swap(r, pr);
        let inv = ctx.inv(a[r][col]).expect("pivot nonzero");
        for j in 0..4 {
            a[r][j] = ctx.mul(a[r][j], inv);
        }
        for i in 0..3 {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col];
                for j in 0..4 {
                    let sub = ctx.mul(f, a[r][j]);
                    a[i][j] = ctx.add(a[i][j], sub);
                }
            }
        }
        pivots[col] = r;
        r += 1;
    }
    let mut x = [FieldElem::ZERO; 3];
    for col in 0..3 {
        x[col] = a[pivots[col]][3];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: u32) -> FieldCtx {
        FieldCtx::new(m).unwrap()
    }

    #[test]
    fn joins_and_meets() {
        let f = ctx(2);
        let p = ProjPoint::from_bits(&f, [1, 0, 0]);
        let q = ProjPoint::from_bits(&f, [0, 1, 0]);
        assert_eq!(
            line_through(&f, &p, &q).unwrap(),
            ProjLine::from_bits(&f, [0, 0, 1])
        );

        let r = ProjPoint::from_bits(&f, [0, 0, 1]);
        let s = ProjPoint::from_bits(&f, [1, 1, 1]);
        assert_eq!(
            line_through(&f, &r, &s).unwrap(),
            ProjLine::from_bits(&f, [1, 1, 0])
        );

        let l1 = ProjLine::from_bits(&f, [1, 0, 0]);
        let l2 = ProjLine::from_bits(&f, [0, 1, 0]);
        assert_eq!(
            meet(&f, &l1, &l2).unwrap(),
            ProjPoint::from_bits(&f, [0, 0, 1])
        );

        assert_eq!(line_through(&f, &p, &p), Err(GeomError::CoincidentPoints));
        assert_eq!(meet(&f, &l1, &l1), Err(GeomError::CoincidentLines));

        // meet of joins through a common point recovers the point
        let a = ProjPoint::from_bits(&f, [1, 2, 3]);
        let b = ProjPoint::from_bits(&f, [0, 1, 2]);
        let c = ProjPoint::from_bits(&f, [1, 1, 0]);
        assert!(!collinear(&f, &a, &b, &c));
        let ab = line_through(&f, &a, &b).unwrap();
        let ac = line_through(&f, &a, &c).unwrap();
        assert_eq!(meet(&f, &ab, &ac).unwrap(), a);
    }

    #[test]
    fn focus_line_of_quintic_frame_meets_z_axis() {
        // [1,1,a] meets [0,0,1] at (1,1,0)
        let f = ctx(5);
        let quintic_root = f.roots(crate::gf2m::Poly2::from_mask(0b111011))[0];
        let l1 = ProjLine::new(&f, [FieldElem::ONE, FieldElem::ONE, quintic_root]).unwrap();
        let l2 = ProjLine::from_bits(&f, [0, 0, 1]);
        assert_eq!(
            meet(&f, &l1, &l2).unwrap(),
            ProjPoint::from_bits(&f, [1, 1, 0])
        );
    }

    #[test]
    fn collinearity() {
        let f = ctx(3);
        let p = ProjPoint::from_bits(&f, [1, 0, 0]);
        let q = ProjPoint::from_bits(&f, [0, 1, 0]);
        assert!(collinear(&f, &p, &q, &ProjPoint::from_bits(&f, [1, 1, 0])));
        assert!(!collinear(&f, &p, &q, &ProjPoint::from_bits(&f, [0, 0, 1])));
    }

    #[test]
    fn point_count_and_uniqueness() {
        for m in 1..=5 {
            let f = ctx(m);
            let pts = all_points(&f);
            let expect = (f.order() * f.order() + f.order() + 1) as usize;
            assert_eq!(pts.len(), expect);
            let mut dedup = pts.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), expect);
        }
    }

    #[test]
    fn line_points_count() {
        let f = ctx(3);
        for l in all_lines(&f).iter().take(20) {
            let pts = line_points(&f, l);
            let mut d = pts.clone();
            d.sort();
            d.dedup();
            assert_eq!(d.len(), f.order() as usize + 1);
            assert!(pts.iter().all(|p| incident(&f, p, l)));
        }
    }

    #[test]
    fn standard_conic_basics() {
        let f = ctx(5);
        let c = Conic::standard(&f);
        assert!(c.is_nondegenerate(&f));
        assert_eq!(c.nucleus(&f).unwrap(), ProjPoint::from_bits(&f, [1, 0, 0]));
        assert!(c.contains(&f, &conic_point(&f, Some(FieldElem::ONE))));
        assert_eq!(
            conic_point(&f, Some(FieldElem::ONE)),
            ProjPoint::from_bits(&f, [1, 1, 1])
        );
        assert_eq!(conic_point(&f, None), ProjPoint::from_bits(&f, [0, 1, 0]));
        assert!(!c.contains(&f, &ProjPoint::from_bits(&f, [1, 0, 0])));
        // q+1 points on the conic
        let on = all_points(&f)
            .into_iter()
            .filter(|p| c.contains(&f, p))
            .count();
        assert_eq!(on, f.order() as usize + 1);
    }

    #[test]
    fn tangents_pass_through_nucleus() {
        let f = ctx(4);
        let c = Conic::standard(&f);
        let n = c.nucleus(&f).unwrap();
        assert_eq!(
            c.tangent_at(&f, &ProjPoint::from_bits(&f, [1, 1, 1]))
                .unwrap(),
            ProjLine::from_bits(&f, [0, 1, 1])
        );
        assert_eq!(
            c.tangent_at(&f, &ProjPoint::from_bits(&f, [0, 0, 1]))
                .unwrap(),
            ProjLine::from_bits(&f, [0, 1, 0])
        );
        for t in f.elements() {
            let p = conic_point(&f, Some(t));
            let tl = c.tangent_at(&f, &p).unwrap();
            assert!(incident(&f, &n, &tl));
            // tangent meets the conic only at p
            let hits = all_points(&f)
                .into_iter()
                .filter(|x| c.contains(&f, x) && incident(&f, x, &tl))
                .count();
            assert_eq!(hits, 1);
        }
        assert_eq!(
            c.tangent_at(&f, &ProjPoint::from_bits(&f, [1, 0, 0])),
            Err(GeomError::PointNotOnConic)
        );
    }

    #[test]
    fn classify_line_against_exhaustive_count() {
        for m in [2u32, 3, 5] {
            let f = ctx(m);
            let c = Conic::standard(&f);
            for l in all_lines(&f) {
                let count = line_points(&f, &l)
                    .into_iter()
                    .filter(|p| c.contains(&f, p))
                    .count();
                let expect = match count {
                    0 => LineClass::External,
                    1 => LineClass::Tangent,
                    2 => LineClass::Secant,
                    _ => panic!("a line meets a nondegenerate conic in at most 2 points"),
                };
                assert_eq!(c.classify_line(&f, &l).unwrap(), expect);
            }
        }
    }

    #[test]
    fn classify_x_axis_secant() {
        let f = ctx(5);
        let c = Conic::standard(&f);
        let l = ProjLine::from_bits(&f, [1, 0, 0]);
        assert_eq!(c.classify_line(&f, &l).unwrap(), LineClass::Secant);
        assert!(incident(&f, &ProjPoint::from_bits(&f, [0, 1, 0]), &l));
        assert!(incident(&f, &ProjPoint::from_bits(&f, [0, 0, 1]), &l));
    }

    #[test]
    fn fit_conic_recovers_standard() {
        let f = ctx(3);
        let t = f.elem(0b010);
        let s = f.elem(0b011);
        let pts = [
            ProjPoint::from_bits(&f, [0, 1, 0]),
            ProjPoint::from_bits(&f, [0, 0, 1]),
            ProjPoint::from_bits(&f, [1, 1, 1]),
            conic_point(&f, Some(t)),
            conic_point(&f, Some(s)),
        ];
        let c = fit_conic(&f, &pts).unwrap();
        assert_eq!(c, Conic::standard(&f));
    }

    #[test]
    fn fit_conic_through_three_collinear_is_degenerate_conic() {
        let f = ctx(3);
        // (1,0,0),(0,1,0),(1,1,0) collinear on z=0
        let pts = [
            ProjPoint::from_bits(&f, [1, 0, 0]),
            ProjPoint::from_bits(&f, [0, 1, 0]),
            ProjPoint::from_bits(&f, [1, 1, 0]),
            ProjPoint::from_bits(&f, [0, 0, 1]),
            ProjPoint::from_bits(&f, [1, 2, 3]),
        ];
        match fit_conic(&f, &pts) {
            Ok(c) => assert!(!c.is_nondegenerate(&f)),
            Err(GeomError::DegenerateConicFit { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn diagonal_line_of_standard_quadrangle() {
        let f = ctx(2);
        let quad = [
            ProjPoint::from_bits(&f, [1, 0, 0]),
            ProjPoint::from_bits(&f, [0, 1, 0]),
            ProjPoint::from_bits(&f, [0, 0, 1]),
            ProjPoint::from_bits(&f, [1, 1, 1]),
        ];
        assert_eq!(
            diagonal_line(&f, &quad).unwrap(),
            ProjLine::from_bits(&f, [1, 1, 1])
        );
        let bad = [
            ProjPoint::from_bits(&f, [1, 0, 0]),
            ProjPoint::from_bits(&f, [0, 1, 0]),
            ProjPoint::from_bits(&f, [1, 1, 0]),
            ProjPoint::from_bits(&f, [1, 1, 1]),
        ];
        assert_eq!(
            diagonal_line(&f, &bad),
            Err(GeomError::DegenerateQuadrangle)
        );
    }

    #[test]
    fn pascal_on_conic_hexagon() {
        let f = ctx(4);
        let ts = [0u16, 1, 2, 3, 4, 5];
        let hex: Vec<ProjPoint> = ts
            .iter()
            .map(|&t| conic_point(&f, Some(f.elem(t))))
            .collect();
        let hex: [ProjPoint; 6] = hex.try_into().unwrap();
        assert!(pascal_collinear(&f, &hex).holds());

        // repeated vertex is degenerate, not false
        let mut degenerate = hex;
        degenerate[1] = degenerate[0];
        assert_eq!(pascal_collinear(&f, &degenerate), ConfigOutcome::Degenerate);
    }

    #[test]
    fn projectivity_frame_mapping() {
        let f = ctx(3);
        // hyperconic points are never three collinear
        let frame = [
            conic_point(&f, Some(f.elem(0))),
            conic_point(&f, Some(f.elem(2))),
            conic_point(&f, Some(f.elem(5))),
            ProjPoint::from_bits(&f, [1, 0, 0]),
        ];
        for i in 0..4 {
            for j in i + 1..4 {
                for k in j + 1..4 {
                    assert!(!collinear(&f, &frame[i], &frame[j], &frame[k]));
                }
            }
        }
        let std_frame = [
            ProjPoint::from_bits(&f, [1, 0, 0]),
            ProjPoint::from_bits(&f, [0, 1, 0]),
            ProjPoint::from_bits(&f, [0, 0, 1]),
            ProjPoint::from_bits(&f, [1, 1, 1]),
        ];
        let t = ProjTransform::from_frame(&f, &frame).unwrap();
        for (s, target) in std_frame.iter().zip(frame.iter()) {
            assert_eq!(t.apply(&f, s), *target);
        }
        let back = ProjTransform::between(&f, &frame, &std_frame).unwrap();
        for (s, target) in frame.iter().zip(std_frame.iter()) {
            assert_eq!(back.apply(&f, s), *target);
        }
    }

    #[test]
    fn file_line_round_trip() {
        let f = ctx(5);
        let p = ProjPoint::from_bits(&f, [1, 0x1f, 3]);
        assert_eq!(p.file_line(), "p 1 1f 3");
        assert_eq!(parse_point_line(&f, "p 1 1f 3").unwrap(), p);
        let l = ProjLine::from_bits(&f, [0, 0, 1]);
        assert_eq!(parse_line_line(&f, &l.file_line()).unwrap(), l);
        assert!(parse_point_line(&f, "p 1 2").is_err());
        assert!(parse_point_line(&f, "l 1 2 3").is_err());
        assert!(parse_point_line(&f, "p 0 0 0").is_err());
    }
}
