//! Roots, reflections, corners, chains, heights, and the A₂-corner glue
//! theory in the Minkowski model of the hyperbolic plane.
//!
//! All angle computations are exact: corner angles π/m are recognized by the
//! squared cosine (r·s)²/(r²s²), which is an element of F for every allowed
//! m, so no transcendental arithmetic is ever needed.

use crate::lattice::GramLattice;
use crate::linalg::{det, is_integral_vec, mat_vec, vec_add, vec_scale, vec_sub, FVec};
use crate::qring::{canonical_associate, ogcd, square_unit_ratio, FElem, OElem, QringError};
use serde::{Deserialize, Serialize};

/// Errors from hyperbolic-geometry operations.
#[derive(Debug, thiserror::Error)]
pub enum HypError {
    #[error(transparent)]
    Qring(#[from] QringError),
    #[error("vector is not a root: {0}")]
    NotARoot(String),
    #[error("the two mirrors do not meet in a corner")]
    NotACorner,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("norm ratio {0} not allowed for this corner type")]
    BadNormRatio(String),
    #[error("glue inconsistency: {0}")]
    GlueFailure(String),
    #[error("chain condition violated between roots {0} and {1}")]
    ChainViolation(usize, usize),
}

/// A root: a primitive space-like lattice vector whose reflection preserves
/// the lattice.  The norm is cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub vec: FVec,
    pub norm_sq: OElem,
}

impl Root {
    /// Validating constructor.
    pub fn new(vec: FVec, l: &GramLattice) -> Result<Self, HypError> {
        if !is_root(&vec, l) {
            return Err(HypError::NotARoot(render_vec(&vec)));
        }
        let norm_sq = l.norm_sq(&vec);
        Ok(Root { vec, norm_sq })
    }

    /// Constructor for vectors already known to be roots (hot paths).
    pub fn new_unchecked(vec: FVec, l: &GramLattice) -> Self {
        let norm_sq = l.norm_sq(&vec);
        Root { vec, norm_sq }
    }

    /// Rescale by a unit (keeps root-ness; norm scales by the unit squared).
    pub fn rescale(&self, u: &OElem, l: &GramLattice) -> Root {
        Root::new_unchecked(vec_scale(&self.vec, u), l)
    }
}

fn render_vec(v: &FVec) -> String {
    v.iter()
        .map(|x| x.render_pair())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Positive-definite rank-2 corner types, by the angle π/m between the
/// mirror lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CornerType {
    A1xA1, // m = 2
    A2,    // m = 3
    B2,    // m = 4
    G2,    // m = 6
    I2_8,  // m = 8
}

impl CornerType {
    pub fn m(self) -> u32 {
        match self {
            CornerType::A1xA1 => 2,
            CornerType::A2 => 3,
            CornerType::B2 => 4,
            CornerType::G2 => 6,
            CornerType::I2_8 => 8,
        }
    }

    /// Exact squared cosine of π/m as an element of F.
    pub fn cos_sq(self, d: u32) -> FElem {
        let q = |n: i64, den: i64| {
            FElem::new(
                d,
                crate::qring::Rat::new(n.into(), den.into()),
                crate::qring::Rat::from_integer(0.into()),
            )
        };
        match self {
            CornerType::A1xA1 => q(0, 1),
            CornerType::A2 => q(1, 4),
            CornerType::B2 => q(1, 2),
            CornerType::G2 => q(3, 4),
            CornerType::I2_8 => FElem::new(
                d,
                crate::qring::Rat::new(1.into(), 2.into()),
                crate::qring::Rat::new(1.into(), 4.into()),
            ),
        }
    }

    pub fn from_m(m: u32) -> Option<CornerType> {
        match m {
            2 => Some(CornerType::A1xA1),
            3 => Some(CornerType::A2),
            4 => Some(CornerType::B2),
            6 => Some(CornerType::G2),
            8 => Some(CornerType::I2_8),
            _ => None,
        }
    }
}

/// Corner basis at a chamber corner: outward roots r, s and the primitive
/// future-directed vector p along the corner.
#[derive(Clone, Debug)]
pub struct CornerBasis {
    pub r: Root,
    pub s: Root,
    pub p: FVec,
}

/// Reflection R_r(v) = v − (2(r·v)/r²)·r.
pub fn reflect(r: &Root, v: &FVec, l: &GramLattice) -> FVec {
    let rv = l.ip(&r.vec, v);
    let two = FElem::from_ints(l.d(), 2, 0);
    let coeff = (&two * &rv)
        .div_exact(&r.norm_sq)
        .expect("root norm nonzero");
    vec_sub(v, &vec_scale(&r.vec, &coeff))
}

/// Content: gcd of the coordinates (error if the vector is zero).
pub fn content(v: &FVec) -> Result<OElem, HypError> {
    let mut g: Option<OElem> = None;
    for x in v {
        if x.is_zero() {
            continue;
        }
        g = Some(match g {
            None => x.clone(),
            Some(acc) => ogcd(&acc, x)?,
        });
    }
    g.ok_or_else(|| HypError::Degenerate("zero vector has no content".into()))
}

/// Primitive vector spanning the same line, canonicalized so the first
/// nonzero coordinate is a canonical associate (deterministic up to the sign
/// chosen by the caller).
pub fn primitive_vector(v: &FVec) -> Result<FVec, HypError> {
    let g = content(v)?;
    let mut p: FVec = v
        .iter()
        .map(|x| x.div_exact(&g))
        .collect::<Result<_, _>>()?;
    let c = p
        .iter()
        .find(|x| !x.is_zero())
        .expect("nonzero after content division")
        .clone();
    let cc = canonical_associate(&c)?;
    let u = cc.div_exact(&c)?;
    for x in p.iter_mut() {
        *x = &*x * &u;
    }
    Ok(p)
}

/// Primitive vector spanning the same line as `v`, obtained by dividing by
/// the canonical associate of the content.  Unlike [`primitive_vector`] this
/// keeps the orientation and unit class of the input, so the result is a
/// deterministic function of the input vector itself (not just its line).
pub fn primitive_oriented(v: &FVec) -> Result<FVec, HypError> {
    let g = canonical_associate(&content(v)?)?;
    let p: FVec = v
        .iter()
        .map(|x| x.div_exact(&g))
        .collect::<Result<_, _>>()?;
    Ok(p)
}

/// Root test: integral, primitive, totally positive norm, and the
/// crystallographic condition v·eᵢ ∈ (v²/2)O for every basis vector.
pub fn is_root(v: &FVec, l: &GramLattice) -> bool {
    if !is_integral_vec(v) {
        return false;
    }
    let Ok(g) = content(v) else {
        return false;
    };
    if !crate::qring::is_unit(&g) {
        return false;
    }
    let n = l.norm_sq(v);
    if !n.is_totally_positive() {
        return false;
    }
    let two = FElem::from_ints(l.d(), 2, 0);
    let qv = mat_vec(&l.gram, v);
    qv.iter().all(|x| {
        (&two * x)
            .div_exact(&n)
            .map(|q| q.is_integral())
            .unwrap_or(false)
    })
}

/// Euclidean cross product of coordinate triples.
pub fn cross3(u: &FVec, v: &FVec) -> FVec {
    vec![
        &(&u[1] * &v[2]) - &(&u[2] * &v[1]),
        &(&u[2] * &v[0]) - &(&u[0] * &v[2]),
        &(&u[0] * &v[1]) - &(&u[1] * &v[0]),
    ]
}

/// Corner classification: matches the exact squared cosine against the five
/// allowed values, and certifies that the mirrors meet inside hyperbolic
/// space (the common perpendicular line is negative definite).
pub fn classify_corner(r: &Root, s: &Root, l: &GramLattice) -> Option<CornerType> {
    let rs = l.ip(&r.vec, &s.vec);
    let c2 = (&rs * &rs).div_exact(&(&r.norm_sq * &s.norm_sq)).ok()?;
    let ty = [
        CornerType::A1xA1,
        CornerType::A2,
        CornerType::B2,
        CornerType::G2,
        CornerType::I2_8,
    ]
    .into_iter()
    .find(|t| c2 == t.cos_sq(l.d()))?;
    // V_r ∩ V_s is spanned by the cross direction; require p² < 0.
    let p = cross3(&mat_vec(&l.gram, &r.vec), &mat_vec(&l.gram, &s.vec));
    if p.iter().all(|x| x.is_zero()) {
        return None;
    }
    if l.norm_sq(&p).sign_exact() >= 0 {
        return None;
    }
    Some(ty)
}

/// Checks that r²/s² lies in the allowed ratio set for the corner type (up
/// to square units) and returns the unit-rescaled representative pair
/// (r² rescaled to make the ratio exact, s² unchanged).
pub fn norm_ratio_cases(
    m: CornerType,
    r2: &OElem,
    s2: &OElem,
) -> Result<(OElem, OElem), HypError> {
    let d = r2.d();
    let fe = |a: i64, b: i64| FElem::from_ints(d, a, b);
    // Pairs (a, b): the case r²·a = s²·b up to a square unit.
    let cases: Vec<(FElem, FElem)> = match m {
        CornerType::A1xA1 => return Ok((r2.clone(), s2.clone())),
        CornerType::A2 => vec![(fe(1, 0), fe(1, 0))],
        CornerType::B2 => vec![(fe(1, 0), fe(1, 0)), (fe(2, 0), fe(1, 0)), (fe(1, 0), fe(2, 0))],
        CornerType::G2 => vec![(fe(1, 0), fe(3, 0)), (fe(3, 0), fe(1, 0))],
        CornerType::I2_8 => vec![(fe(1, 0), fe(2, 1)), (fe(2, 1), fe(1, 0))],
    };
    for (a, b) in cases {
        let lhs = r2 * &a;
        let rhs = s2 * &b;
        if let Some(u) = square_unit_ratio(&lhs, &rhs)? {
            // r²·u² satisfies the exact ratio against s².
            let u2 = &u * &u;
            return Ok((r2 * &u2, s2.clone()));
        }
    }
    Err(HypError::BadNormRatio(format!(
        "{} : {} at m = {}",
        r2.render_pair(),
        s2.render_pair(),
        m.m()
    )))
}

/// Primitive generator of V_r ∩ V_s.  With a reference future vector the
/// result is future-directed (p·p_ref < 0); otherwise the sign is fixed by
/// requiring det(r, s, p) > 0.
pub fn corner_vector(
    r: &Root,
    s: &Root,
    l: &GramLattice,
    p_ref: Option<&FVec>,
) -> Result<FVec, HypError> {
    let praw = cross3(&mat_vec(&l.gram, &r.vec), &mat_vec(&l.gram, &s.vec));
    if praw.iter().all(|x| x.is_zero()) {
        return Err(HypError::Degenerate("mirrors are parallel".into()));
    }
    let mut p = primitive_vector(&praw)?;
    let flip = match p_ref {
        Some(refv) => l.ip(&p, refv).sign_exact() > 0,
        None => orientation_sign(&r.vec, &s.vec, &p) < 0,
    };
    if flip {
        p = crate::linalg::vec_neg(&p);
    }
    Ok(p)
}

/// Sign of det(r, s, p) for the ordered coordinate triple.
pub fn orientation_sign(r: &FVec, s: &FVec, p: &FVec) -> i32 {
    det(&vec![r.clone(), s.clone(), p.clone()]).sign_exact()
}

/// Glue sign at an A₂ corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Glue {
    Positive,
    Negative,
}

/// Determines the glue sign at an A₂ corner: exactly one of
/// g± = (r+s)/2 ± (r−s)/6 + p/3 lies in L.  The roots are first rescaled by
/// units so r² = s² = 2 (an error if the corner is not in normal form up to
/// square units).
pub fn a2_glue(r: &Root, s: &Root, p: &FVec, l: &GramLattice) -> Result<Glue, HypError> {
    let d = l.d();
    let two = FElem::from_ints(d, 2, 0);
    let norm_to_two = |root: &Root| -> Result<FVec, HypError> {
        match square_unit_ratio(&root.norm_sq, &two)? {
            Some(u) => Ok(vec_scale(&root.vec, &u)),
            None => Err(HypError::GlueFailure(format!(
                "root norm {} is not 2 up to a square unit",
                root.norm_sq.render_pair()
            ))),
        }
    };
    let rv = norm_to_two(r)?;
    let sv = norm_to_two(s)?;
    let half = FElem::new(
        d,
        crate::qring::Rat::new(1.into(), 2.into()),
        crate::qring::Rat::from_integer(0.into()),
    );
    let sixth = FElem::new(
        d,
        crate::qring::Rat::new(1.into(), 6.into()),
        crate::qring::Rat::from_integer(0.into()),
    );
    let third = FElem::new(
        d,
        crate::qring::Rat::new(1.into(), 3.into()),
        crate::qring::Rat::from_integer(0.into()),
    );
    let mid = vec_scale(&vec_add(&rv, &sv), &half);
    let diff = vec_scale(&vec_sub(&rv, &sv), &sixth);
    let pp = vec_scale(p, &third);
    let g_plus = vec_add(&vec_add(&mid, &diff), &pp);
    let g_minus = vec_add(&vec_sub(&mid, &diff), &pp);
    match (is_integral_vec(&g_plus), is_integral_vec(&g_minus)) {
        (true, false) => Ok(Glue::Positive),
        (false, true) => Ok(Glue::Negative),
        (true, true) => Err(HypError::GlueFailure(
            "both glue vectors integral (lattice not strongly squarefree at this corner)".into(),
        )),
        (false, false) => Err(HypError::GlueFailure(
            "neither glue vector integral (lattice not strongly squarefree at this corner)".into(),
        )),
    }
}

/// Raw height (v·p)²/v².
pub fn height(v: &FVec, p: &FVec, l: &GramLattice) -> Result<FElem, HypError> {
    let v2 = l.norm_sq(v);
    if v2.is_zero() {
        return Err(HypError::Degenerate("height of a light-like vector".into()));
    }
    let vp = l.ip(v, p);
    Ok((&vp * &vp).div_exact(&v2)?)
}

/// Height normalized by (p²)², i.e. ((v·p)/p²)²/v²; this is the quantity
/// whose embeddings match reported transcript values, and it only differs
/// from the raw height by the fixed totally positive factor (p²)², so all
/// comparisons against cutoffs anchored to the same p agree.
pub fn height_normalized(v: &FVec, p: &FVec, l: &GramLattice) -> Result<FElem, HypError> {
    let p2 = l.norm_sq(p);
    let h = height(v, p, l)?;
    Ok(h.div_exact(&(&p2 * &p2))?)
}

/// Direction 1 of the simple-root conversion: from simple roots meeting at
/// angle π/m with m ∈ {4, 6, 8}, produce the root r′ through the same corner
/// whose mirror is orthogonal to s's mirror.
pub fn simple_to_orthogonal(r: &Root, s: &Root, l: &GramLattice) -> Result<Root, HypError> {
    let ty = classify_corner(r, s, l).ok_or(HypError::NotACorner)?;
    let v = match ty {
        CornerType::B2 => reflect(r, &s.vec, l),
        CornerType::G2 => {
            let s1 = Root::new_unchecked(reflect(r, &s.vec, l), l);
            reflect(&s1, &r.vec, l)
        }
        CornerType::I2_8 => {
            let r2 = Root::new_unchecked(reflect(r, &s.vec, l), l);
            reflect(&r2, &s.vec, l)
        }
        CornerType::A1xA1 => r.vec.clone(),
        CornerType::A2 => {
            return Err(HypError::Degenerate(
                "A₂ corner admits no root orthogonal to s".into(),
            ))
        }
    };
    Root::new(v, l)
}

/// Direction 2 of the simple-root conversion: from orthogonal (possibly
/// non-simple) roots r ⊥ s, return the simple pair (r′, s′) cutting the same
/// corner, by testing the candidate bisecting mirrors for root-ness.
pub fn orthogonal_to_simple(
    r: &Root,
    s: &Root,
    l: &GramLattice,
) -> Result<(Root, Root), HypError> {
    if !l.ip(&r.vec, &s.vec).is_zero() {
        return Err(HypError::Degenerate(
            "orthogonal_to_simple requires r ⊥ s".into(),
        ));
    }
    let d = l.d();
    let three = FElem::from_ints(d, 3, 0);
    // Case (a): equal norms up to a square unit — candidate bisector at π/4
    // or π/8 in the span of r − s.
    if let Some(u) = square_unit_ratio(&r.norm_sq, &s.norm_sq)? {
        let rv = vec_scale(&r.vec, &u); // now rv² = s² exactly
        let t = primitive_vector(&vec_sub(&rv, &s.vec))?;
        if !is_root(&t, l) {
            return Ok((r.clone(), s.clone()));
        }
        let t = Root::new_unchecked(t, l);
        match square_unit_ratio(&t.norm_sq, &s.norm_sq)? {
            None => Ok((t, s.clone())),
            Some(ut) => {
                // t² = s² after rescale: one more possible bisection (π/8).
                let tv = vec_scale(&t.vec, &ut);
                let t2 = primitive_vector(&vec_sub(&tv, &s.vec))?;
                if is_root(&t2, l) {
                    Ok((Root::new_unchecked(t2, l), s.clone()))
                } else {
                    Ok((t, s.clone()))
                }
            }
        }
    } else if let Some(u) = square_unit_ratio(&r.norm_sq, &(&three * &s.norm_sq))? {
        // Case (b): r² = 3s² — candidate G₂ bisector in the span of (r−3s)/2.
        let rv = vec_scale(&r.vec, &u);
        let t = primitive_vector(&vec_sub(&rv, &vec_scale(&s.vec, &three)))?;
        if is_root(&t, l) {
            Ok((Root::new_unchecked(t, l), s.clone()))
        } else {
            Ok((r.clone(), s.clone()))
        }
    } else if let Some(u) = square_unit_ratio(&s.norm_sq, &(&three * &r.norm_sq))? {
        // Symmetric case with the labels switched.
        let sv = vec_scale(&s.vec, &u);
        let t = primitive_vector(&vec_sub(&sv, &vec_scale(&r.vec, &three)))?;
        if is_root(&t, l) {
            Ok((Root::new_unchecked(t, l), r.clone()))
        } else {
            Ok((r.clone(), s.clone()))
        }
    } else {
        // Norms rule out any bisecting mirror: already simple.
        Ok((r.clone(), s.clone()))
    }
}

/// Image of r under reflection in its projection q onto V_s; guaranteed to
/// be a root (for an A₂ corner it equals R_r∘R_s(r)).
pub fn reflection_in_projection(r: &Root, s: &Root, l: &GramLattice) -> Result<FVec, HypError> {
    let rs = l.ip(&r.vec, &s.vec);
    let coeff = rs.div_exact(&s.norm_sq)?;
    let q = vec_sub(&r.vec, &vec_scale(&s.vec, &coeff));
    let q2 = l.norm_sq(&q);
    if q2.is_zero() {
        return Err(HypError::Degenerate("degenerate projection".into()));
    }
    let two = FElem::from_ints(l.d(), 2, 0);
    let c = (&two * &l.ip(&q, &r.vec)).div_exact(&q2)?;
    let out = vec_sub(&r.vec, &vec_scale(&q, &c));
    if !is_integral_vec(&out) {
        return Err(HypError::NotARoot(render_vec(&out)));
    }
    Ok(out)
}

/// An ordered chain of roots (walls of a chamber in boundary order).
#[derive(Clone, Debug)]
pub struct RootChain {
    pub roots: Vec<Root>,
    pub closed: bool,
}

impl RootChain {
    /// Chain condition: consecutive roots have (rᵢ·rⱼ)² ≤ rᵢ²rⱼ² (mirrors
    /// meet or are parallel) while non-consecutive roots have rᵢ·rⱼ ≤ 0 and
    /// (rᵢ·rⱼ)² > rᵢ²rⱼ² (ultraparallel, on the correct side).  Equality for
    /// a non-consecutive pair (mirrors meeting at infinity) is flagged as a
    /// violation rather than silently accepted.
    pub fn validate(&self, l: &GramLattice) -> Result<(), HypError> {
        let n = self.roots.len();
        for i in 0..n {
            for j in i + 1..n {
                let consecutive = j == i + 1 || (self.closed && i == 0 && j == n - 1);
                let ri = &self.roots[i];
                let rj = &self.roots[j];
                let ip = l.ip(&ri.vec, &rj.vec);
                let lhs = &ip * &ip;
                let rhs = &ri.norm_sq * &rj.norm_sq;
                let diff = (&lhs - &rhs).sign_exact();
                if consecutive {
                    if diff > 0 {
                        return Err(HypError::ChainViolation(i, j));
                    }
                } else if ip.sign_exact() > 0 || diff <= 0 {
                    return Err(HypError::ChainViolation(i, j));
                }
            }
        }
        Ok(())
    }
}

/// Serialized root: coordinates as (a, b) integer pairs with the stated
/// norm kept as a checked redundancy.
#[derive(Serialize, Deserialize)]
pub struct RootJson {
    pub vec: Vec<[i64; 2]>,
    pub norm: [i64; 2],
}

impl Root {
    pub fn to_json(&self) -> RootJson {
        let pair = |x: &FElem| {
            [
                i64::try_from(x.a().to_integer()).expect("coordinate fits i64"),
                i64::try_from(x.b().to_integer()).expect("coordinate fits i64"),
            ]
        };
        RootJson {
            vec: self.vec.iter().map(pair).collect(),
            norm: pair(&self.norm_sq),
        }
    }

    pub fn from_json(j: &RootJson, l: &GramLattice) -> Result<Self, HypError> {
        let vec: FVec = j
            .vec
            .iter()
            .map(|p| FElem::from_ints(l.d(), p[0], p[1]))
            .collect();
        let root = Root::new(vec, l)?;
        let stated = FElem::from_ints(l.d(), j.norm[0], j.norm[1]);
        if root.norm_sq != stated {
            return Err(HypError::NotARoot(format!(
                "stated norm {} disagrees with computed {}",
                stated.render_pair(),
                root.norm_sq.render_pair()
            )));
        }
        Ok(root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qring::FieldDesc;

    fn fe2(a: i64, b: i64) -> FElem {
        FElem::from_ints(2, a, b)
    }

    /// The fully verified worked-example lattice.
    fn walk_example() -> GramLattice {
        let g = vec![
            vec![fe2(60, -5), fe2(20, -20), fe2(10, -10)],
            vec![fe2(20, -20), fe2(18, -12), fe2(9, -6)],
            vec![fe2(10, -10), fe2(9, -6), fe2(6, -4)],
        ];
        GramLattice::new(FieldDesc::new(2).unwrap(), g).unwrap()
    }

    fn r1(l: &GramLattice) -> Root {
        Root::new(vec![fe2(1, 0), fe2(0, 1), fe2(3, 2)], l).unwrap()
    }

    fn r2(l: &GramLattice) -> Root {
        Root::new(vec![fe2(0, 0), fe2(3, 2), fe2(-6, -4)], l).unwrap()
    }

    fn p_tab() -> FVec {
        vec![fe2(-11, -8), fe2(-50, -35), fe2(0, 0)]
    }

    #[test]
    fn worked_example_roots_and_norms() {
        let l = walk_example();
        let r1 = r1(&l);
        let r2 = r2(&l);
        assert_eq!(r1.norm_sq, fe2(2, 1));
        assert_eq!(r2.norm_sq, fe2(6, 4));
        // Doubling breaks primitivity.
        let double: FVec = r1.vec.iter().map(|x| x * &fe2(2, 0)).collect();
        assert!(!is_root(&double, &l));
    }

    #[test]
    fn reflect_involution_and_integrality() {
        let l = walk_example();
        let r1 = r1(&l);
        let r2 = r2(&l);
        let img = reflect(&r1, &r2.vec, &l);
        assert!(is_integral_vec(&img));
        assert_eq!(l.norm_sq(&img), r2.norm_sq);
        assert_eq!(reflect(&r1, &img, &l), r2.vec);
        assert_eq!(reflect(&r1, &r1.vec, &l), crate::linalg::vec_neg(&r1.vec));
    }

    #[test]
    fn worked_example_corner_is_pi_over_8() {
        let l = walk_example();
        let r1 = r1(&l);
        let r2 = r2(&l);
        assert_eq!(classify_corner(&r1, &r2, &l), Some(CornerType::I2_8));
        assert_eq!(classify_corner(&r2, &r1, &l), Some(CornerType::I2_8));
        // r₂² = (2+√2)·r₁² exactly.
        let (new_r2, s2) = norm_ratio_cases(CornerType::I2_8, &r2.norm_sq, &r1.norm_sq).unwrap();
        assert_eq!(new_r2, &fe2(2, 1) * &s2);
        // Ratio 3 is rejected at a B₂ corner.
        assert!(norm_ratio_cases(CornerType::B2, &fe2(3, 0), &fe2(1, 0)).is_err());
    }

    #[test]
    fn corner_vector_canonical_and_future() {
        let l = walk_example();
        let r1 = r1(&l);
        let r2 = r2(&l);
        let p = corner_vector(&r1, &r2, &l, None).unwrap();
        assert_eq!(p, vec![fe2(1, 2), fe2(10, 5), fe2(0, 0)]);
        assert_eq!(l.norm_sq(&p), fe2(0, -5));
        assert!(l.ip(&p, &r1.vec).is_zero());
        assert!(l.ip(&p, &r2.vec).is_zero());
        assert_eq!(orientation_sign(&r1.vec, &r2.vec, &p), 1);
        // Against the published (past-directed relative to it) reference the
        // sign flips.
        let pf = corner_vector(&r1, &r2, &l, Some(&p_tab())).unwrap();
        assert_eq!(pf, crate::linalg::vec_neg(&p));
        // Published corner vector is a unit multiple: −α₀²·p.
        let scaled = vec_scale(&p, &fe2(-3, -2));
        assert_eq!(scaled, p_tab());
    }

    #[test]
    fn heights_match_reported_values() {
        let l = walk_example();
        let p = p_tab();
        let t = vec![fe2(-7, -5), fe2(-85, -60), fe2(0, 0)];
        let ht = height_normalized(&t, &p, &l).unwrap();
        assert_eq!(
            ht,
            FElem::new(
                2,
                crate::qring::Rat::new(17.into(), 5.into()),
                crate::qring::Rat::new((-7).into(), 10.into())
            )
        );
        let r3 = vec![fe2(-22, -16), fe2(-100, -70), fe2(3, 2)];
        let ht3 = height_normalized(&r3, &p, &l).unwrap();
        assert_eq!(
            ht3,
            FElem::new(
                2,
                crate::qring::Rat::new(3.into(), 2.into()),
                crate::qring::Rat::new((-1).into(), 1.into())
            )
        );
        let r4 = vec![fe2(-73, -52), fe2(-340, -240), fe2(35, 25)];
        let ht4 = height_normalized(&r4, &p, &l).unwrap();
        assert_eq!(
            ht4,
            FElem::new(
                2,
                crate::qring::Rat::new(2.into(), 5.into()),
                crate::qring::Rat::new((-1).into(), 5.into())
            )
        );
        // Unit invariance and orthogonality.
        let r3u: FVec = r3.iter().map(|x| x * &fe2(1, 1)).collect();
        assert_eq!(height_normalized(&r3u, &p, &l).unwrap(), ht3);
        assert!(height(&p_perp_witness(&l), &p, &l).unwrap().is_zero());
    }

    fn p_perp_witness(l: &GramLattice) -> FVec {
        // r₁ is orthogonal to the corner vector p₁.
        let _ = l;
        vec![fe2(1, 0), fe2(0, 1), fe2(3, 2)]
    }

    #[test]
    fn a2_glue_sign_fixture() {
        // L = ⟨r,s⟩ ⊕_g ⟨p⟩ with r² = s² = 2, r·s = −1, det = 1−3√2,
        // p² = 3·det, and the basis (r, s, g₊).
        let g = vec![
            vec![fe2(2, 0), fe2(-1, 0), fe2(1, 0)],
            vec![fe2(-1, 0), fe2(2, 0), fe2(0, 0)],
            vec![fe2(1, 0), fe2(0, 0), fe2(1, -1)],
        ];
        let l = GramLattice::new(FieldDesc::new(2).unwrap(), g).unwrap();
        assert_eq!(crate::lattice::det_ideal(&l), fe2(1, -3));
        let r = Root::new(vec![fe2(1, 0), fe2(0, 0), fe2(0, 0)], &l).unwrap();
        let s = Root::new(vec![fe2(0, 0), fe2(1, 0), fe2(0, 0)], &l).unwrap();
        assert_eq!(classify_corner(&r, &s, &l), Some(CornerType::A2));
        let p = vec![fe2(-2, 0), fe2(-1, 0), fe2(3, 0)];
        assert!(l.ip(&p, &r.vec).is_zero());
        assert_eq!(l.norm_sq(&p), fe2(3, -9)); // 3·det(L)
        assert_eq!(a2_glue(&r, &s, &p, &l).unwrap(), Glue::Positive);
        // Reversing the corner direction flips the glue sign.
        let pn = crate::linalg::vec_neg(&p);
        assert_eq!(a2_glue(&r, &s, &pn, &l).unwrap(), Glue::Negative);
    }

    #[test]
    fn simple_root_conversion_b2() {
        // diag(2, 2, −(1+2√2)): e₁ ⊥ e₂, both norm 2; the bisector
        // (1,−1,0) is a root of norm 4 → the simple pair is ((1,−1,0), e₂)
        // at angle π/4.
        let g = vec![
            vec![fe2(2, 0), fe2(0, 0), fe2(0, 0)],
            vec![fe2(0, 0), fe2(2, 0), fe2(0, 0)],
            vec![fe2(0, 0), fe2(0, 0), fe2(-1, -2)],
        ];
        let l = GramLattice::new(FieldDesc::new(2).unwrap(), g).unwrap();
        let e1 = Root::new(vec![fe2(1, 0), fe2(0, 0), fe2(0, 0)], &l).unwrap();
        let e2 = Root::new(vec![fe2(0, 0), fe2(1, 0), fe2(0, 0)], &l).unwrap();
        let (rp, sp) = orthogonal_to_simple(&e1, &e2, &l).unwrap();
        assert_eq!(rp.vec, vec![fe2(1, 0), fe2(-1, 0), fe2(0, 0)]);
        assert_eq!(rp.norm_sq, fe2(4, 0));
        assert_eq!(sp.vec, e2.vec);
        assert_eq!(classify_corner(&rp, &sp, &l), Some(CornerType::B2));
        // Round trip: direction 1 recovers a root orthogonal to e₂ through
        // the same corner, namely ±e₁.
        let back = simple_to_orthogonal(&rp, &sp, &l).unwrap();
        assert!(l.ip(&back.vec, &sp.vec).is_zero());
        assert_eq!(back.norm_sq, fe2(2, 0));
    }

    #[test]
    fn reflection_in_projection_cases() {
        let l = walk_example();
        let r1 = r1(&l);
        let r2 = r2(&l);
        let img = reflection_in_projection(&r1, &r2, &l).unwrap();
        assert!(is_root(&img, &l));
        assert_eq!(l.norm_sq(&img), r1.norm_sq);
        // Orthogonal corner: R_q(r) = −r.
        let g = vec![
            vec![fe2(2, 0), fe2(0, 0), fe2(0, 0)],
            vec![fe2(0, 0), fe2(2, 0), fe2(0, 0)],
            vec![fe2(0, 0), fe2(0, 0), fe2(-1, -2)],
        ];
        let ld = GramLattice::new(FieldDesc::new(2).unwrap(), g).unwrap();
        let e1 = Root::new(vec![fe2(1, 0), fe2(0, 0), fe2(0, 0)], &ld).unwrap();
        let e2 = Root::new(vec![fe2(0, 0), fe2(1, 0), fe2(0, 0)], &ld).unwrap();
        let img = reflection_in_projection(&e1, &e2, &ld).unwrap();
        assert_eq!(img, crate::linalg::vec_neg(&e1.vec));
    }

    #[test]
    fn chain_validation() {
        let l = walk_example();
        let chain = RootChain {
            roots: vec![r1(&l), r2(&l)],
            closed: false,
        };
        chain.validate(&l).unwrap();
        // An open chain repeating a root fails the non-consecutive
        // condition (a root has positive product with itself).
        let bad = RootChain {
            roots: vec![r1(&l), r2(&l), r1(&l)],
            closed: false,
        };
        assert!(bad.validate(&l).is_err());
    }

    #[test]
    fn root_json_roundtrip() {
        let l = walk_example();
        let r = r1(&l);
        let j = r.to_json();
        let back = Root::from_json(&j, &l).unwrap();
        assert_eq!(back.vec, r.vec);
        let mut tampered = r.to_json();
        tampered.norm = [5, 0];
        assert!(Root::from_json(&tampered, &l).is_err());
    }
}
