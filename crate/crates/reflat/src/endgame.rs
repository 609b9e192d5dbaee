//! Resolution of walks that outrun their budget.
//!
//! Two situations admit a closed-form decision.  When the chain starts at an
//! order-3 corner and the current wall could host another one (type I), a
//! candidate chamber symmetry factors through the order-3 rotation at the
//! first corner; either the factor map exists and classifies the symmetry by
//! its trace, or the nearest orthogonal mirror is provably the next wall.
//! When the chain has no order-3 corners but both end walls could host one
//! (type II), the possible rotation center is parametrized along the wall
//! segment, and the trace of the induced symmetry becomes an explicit
//! algebraic function of the parameter; exact Sturm-counted sign conditions
//! certify that the trace stays above 3 on the whole segment, which yields
//! an infinite-order symmetry whether or not the extra corner exists.

use crate::hypgeom::{
    classify_corner, corner_vector, orientation_sign, reflect, CornerBasis, CornerType, HypError,
    Root, RootChain,
};
use crate::lattice::GramLattice;
use crate::linalg::{
    det, identity, inverse, mat_mul, mat_vec, vec_scale, vec_sub, FMatrix, FVec,
};
use crate::qring::{rat, square_unit_ratio, FElem, OElem, QringError, Rat};
use crate::walk::{
    is_automorphism, map_between_bases, matrix_trace, next_non_a2_root, SearchLimits, WalkError,
};

#[derive(Debug, thiserror::Error)]
pub enum EndgameError {
    #[error(transparent)]
    Qring(#[from] QringError),
    #[error(transparent)]
    Hyp(#[from] HypError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("zero polynomial has no root count")]
    ZeroPolynomial,
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("trace system malformed: {0}")]
    SystemShape(String),
}

// ---------------------------------------------------------------------------
// Polynomials over F = Q(√d)
// ---------------------------------------------------------------------------

/// Dense univariate polynomial with coefficients in F, ascending degree,
/// trailing coefficient nonzero (the zero polynomial has no coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPoly {
    d: u32,
    coeffs: Vec<FElem>,
}

impl FPoly {
    pub fn new(d: u32, mut coeffs: Vec<FElem>) -> FPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FPoly { d, coeffs }
    }

    pub fn zero(d: u32) -> FPoly {
        FPoly { d, coeffs: vec![] }
    }

    pub fn constant(c: FElem) -> FPoly {
        let d = c.d();
        FPoly::new(d, vec![c])
    }

    /// Coefficients from integer pairs (a, b) ↦ a + b√d, ascending degree.
    pub fn from_int_pairs(d: u32, pairs: &[(i64, i64)]) -> FPoly {
        FPoly::new(
            d,
            pairs.iter().map(|&(a, b)| FElem::from_ints(d, a, b)).collect(),
        )
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn coeffs(&self) -> &[FElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&FElem> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> FElem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| FElem::zero(self.d))
    }

    pub fn add(&self, o: &FPoly) -> FPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        FPoly::new(self.d, (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &FPoly) -> FPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        FPoly::new(self.d, (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn neg(&self) -> FPoly {
        FPoly::new(self.d, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, c: &FElem) -> FPoly {
        FPoly::new(self.d, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &FPoly) -> FPoly {
        if self.is_zero() || o.is_zero() {
            return FPoly::zero(self.d);
        }
        let mut out = vec![FElem::zero(self.d); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        FPoly::new(self.d, out)
    }

    /// Horner evaluation at an exact point.
    pub fn eval(&self, x: &FElem) -> FElem {
        let mut acc = FElem::zero(self.d);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &Rat) -> FElem {
        self.eval(&FElem::new(self.d, x.clone(), rat(0)))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.embed_f64();
        }
        acc
    }

    pub fn derivative(&self) -> FPoly {
        if self.coeffs.len() <= 1 {
            return FPoly::zero(self.d);
        }
        FPoly::new(
            self.d,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &FElem::from_ints(self.d, i as i64, 0))
                .collect(),
        )
    }

    /// Euclidean division (F is a field): self = q·div + r with
    /// deg r < deg div.
    pub fn divmod(&self, div: &FPoly) -> Result<(FPoly, FPoly), EndgameError> {
        let lead = div.leading().ok_or(EndgameError::ZeroPolynomial)?;
        let lead_inv = lead.inv()?;
        let dd = div.degree().unwrap();
        let mut rem = self.clone();
        let mut quo = vec![FElem::zero(self.d); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = &rem.coeff(rd) * &lead_inv;
            let shift = rd - dd;
            quo[shift] = c.clone();
            let mut new = rem.coeffs.clone();
            for (j, b) in div.coeffs.iter().enumerate() {
                new[shift + j] = &new[shift + j] - &(&c * b);
            }
            rem = FPoly::new(self.d, new);
        }
        Ok((FPoly::new(self.d, quo), rem))
    }

    pub fn div_exact(&self, div: &FPoly) -> Result<FPoly, EndgameError> {
        let (q, r) = self.divmod(div)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(EndgameError::InexactDivision)
        }
    }

    pub fn monic(&self) -> Result<FPoly, EndgameError> {
        let lead = self.leading().ok_or(EndgameError::ZeroPolynomial)?;
        Ok(self.scale(&lead.inv()?))
    }

    /// Monic greatest common divisor (gcd(0, p) = monic p).
    pub fn gcd(&self, o: &FPoly) -> Result<FPoly, EndgameError> {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic()
        }
    }

    /// Square-free part: self / gcd(self, self′), monic.
    pub fn square_free_part(&self) -> Result<FPoly, EndgameError> {
        if self.is_zero() {
            return Err(EndgameError::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative())?;
        if g.is_zero() || g.degree() == Some(0) {
            return self.monic();
        }
        self.div_exact(&g)?.monic()
    }
}

// ---------------------------------------------------------------------------
// Sturm root counting on [0, 1]
// ---------------------------------------------------------------------------

fn sign_variations(signs: &[i32]) -> usize {
    let mut v = 0;
    let mut last = 0;
    for &s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

/// Exact count of distinct real roots of `p` in the closed interval [0, 1]:
/// square-free reduction, explicit endpoint handling, then a Sturm chain
/// with exact sign evaluations.
pub fn sturm_roots_in_unit_interval(p: &FPoly) -> Result<usize, EndgameError> {
    if p.is_zero() {
        return Err(EndgameError::ZeroPolynomial);
    }
    let d = p.d();
    let mut sf = p.square_free_part()?;
    let zero = FElem::zero(d);
    let one = FElem::one(d);
    let mut endpoint_roots = 0usize;
    // Deflate endpoint roots (simple after square-free reduction) so the
    // Sturm count below is over the open interval.
    if sf.eval(&zero).is_zero() {
        endpoint_roots += 1;
        sf = sf.div_exact(&FPoly::from_int_pairs(d, &[(0, 0), (1, 0)]))?;
    }
    if sf.eval(&one).is_zero() {
        endpoint_roots += 1;
        sf = sf.div_exact(&FPoly::from_int_pairs(d, &[(-1, 0), (1, 0)]))?;
    }
    if sf.degree().unwrap_or(0) == 0 {
        return Ok(endpoint_roots);
    }
    // Sturm chain p₀ = sf, p₁ = sf′, pᵢ₊₁ = −rem(pᵢ₋₁, pᵢ).
    let mut chain = vec![sf.clone(), sf.derivative()];
    while let Some(last) = chain.last() {
        if last.is_zero() {
            chain.pop();
            break;
        }
        let prev = &chain[chain.len() - 2];
        let (_, r) = prev.divmod(last)?;
        if r.is_zero() {
            break;
        }
        chain.push(r.neg());
    }
    let at = |x: &FElem| -> usize {
        let signs: Vec<i32> = chain.iter().map(|q| q.eval(x).sign_exact()).collect();
        sign_variations(&signs)
    };
    let v0 = at(&zero);
    let v1 = at(&one);
    Ok(endpoint_roots + v0.saturating_sub(v1))
}

// ---------------------------------------------------------------------------
// Order-3 corner rotation and order classification
// ---------------------------------------------------------------------------

/// Matrix of the reflection in a root's mirror.
pub fn reflection_matrix(r: &Root, l: &GramLattice) -> FMatrix {
    let d = l.d();
    let n = l.gram.len();
    let cols: Vec<FVec> = (0..n)
        .map(|j| {
            let mut e = vec![FElem::zero(d); n];
            e[j] = FElem::one(d);
            reflect(r, &e, l)
        })
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect()
}

/// The rotation by 2π/3 about an order-3 corner, as the composition of the
/// reflections in s and in the image of s's mirror under r's reflection.  A
/// lattice automorphism (product of two root reflections) fixing the corner
/// vector, with trace 0 and cube the identity.
pub fn order3_rotation(corner: &CornerBasis, l: &GramLattice) -> Result<FMatrix, EndgameError> {
    match classify_corner(&corner.r, &corner.s, l) {
        Some(CornerType::A2) => {}
        other => {
            return Err(EndgameError::BadInput(format!(
                "order-3 rotation needs an order-3 corner, found {:?}",
                other.map(|t| t.m())
            )))
        }
    }
    let s_prime = Root::new_unchecked(reflect(&corner.r, &corner.s.vec, l), l);
    Ok(mat_mul(
        &reflection_matrix(&corner.s, l),
        &reflection_matrix(&s_prime, l),
    ))
}

/// Order classification of an automorphism by its trace as a matrix acting
/// on the (2, 1) form: orientation-preserving isometries of infinite order
/// have trace ≥ 3 (parabolic exactly 3, reported with a caveat flag since
/// the boundary case is decided conservatively); everything else is
/// elliptic, hence of finite order in a discrete group.  An
/// orientation-reversing input is classified through its square.
#[derive(Clone, Debug)]
pub enum OrderClass {
    Infinite { trace: FElem, parabolic_caveat: bool },
    Finite { trace: FElem },
}

pub fn classify_order(m: &FMatrix) -> OrderClass {
    let d = m[0][0].d();
    let eff = if det(m).sign_exact() < 0 {
        mat_mul(m, m)
    } else {
        m.clone()
    };
    let tr = matrix_trace(&eff);
    if eff == identity(d, m.len()) {
        return OrderClass::Finite { trace: tr };
    }
    match (&tr - &FElem::from_ints(d, 3, 0)).sign_exact() {
        s if s > 0 => OrderClass::Infinite {
            trace: tr,
            parabolic_caveat: false,
        },
        0 => OrderClass::Infinite {
            trace: tr,
            parabolic_caveat: true,
        },
        _ => OrderClass::Finite { trace: tr },
    }
}

// ---------------------------------------------------------------------------
// Type I resolution
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum TypeIOutcome {
    /// A chamber symmetry ψ = τ∘ρ of infinite order exists: the boundary
    /// component is infinite and the lattice is not reflective.
    InfiniteOrder {
        psi: FMatrix,
        trace: FElem,
        parabolic_caveat: bool,
    },
    /// ψ exists but has finite order; the chain closes along its orbit.
    FiniteSymmetry { psi: FMatrix, trace: FElem },
    /// No factor map: the nearest orthogonal mirror is the next wall and
    /// normal walking resumes.
    NextRoot { root: Root },
}

/// Threads corner anchors along a chain with a consistent time orientation.
fn chain_anchors(roots: &[Root], l: &GramLattice) -> Result<Vec<FVec>, EndgameError> {
    let mut ps: Vec<FVec> = Vec::new();
    for i in 0..roots.len() - 1 {
        let prev = ps.last().cloned();
        let p = corner_vector(&roots[i], &roots[i + 1], l, prev.as_ref())?;
        ps.push(p);
    }
    Ok(ps)
}

/// Resolves a chain whose first corner has order 3 and whose last wall
/// could host another order-3 corner (wall norm 2u²): either produces the
/// chamber symmetry factoring through the first-corner rotation, or proves
/// the nearest orthogonal mirror is the next wall.
pub fn resolve_type_i(
    chain: &RootChain,
    l: &GramLattice,
    limits: &SearchLimits,
) -> Result<TypeIOutcome, EndgameError> {
    let roots = &chain.roots;
    let k = roots.len();
    if k < 3 {
        return Err(EndgameError::BadInput("type I needs at least 3 roots".into()));
    }
    match classify_corner(&roots[0], &roots[1], l) {
        Some(CornerType::A2) => {}
        _ => {
            return Err(EndgameError::BadInput(
                "type I needs an order-3 corner at the start of the chain".into(),
            ))
        }
    }
    let two = FElem::from_ints(l.d(), 2, 0);
    if square_unit_ratio(&roots[k - 1].norm_sq, &two)?.is_none() {
        return Err(EndgameError::BadInput(
            "type I needs a final wall of norm 2u²".into(),
        ));
    }
    let ps = chain_anchors(roots, l)?;
    let art = next_non_a2_root(&roots[k - 2], &roots[k - 1], &ps[k - 2], l, limits)?;
    let t = art.t_simple.clone().ok_or_else(|| {
        EndgameError::BadInput("nearest orthogonal mirror direction is not a root".into())
    })?;
    let p_new = corner_vector(&roots[k - 1], &t, l, Some(&ps[k - 2]))?;
    let tau = map_between_bases(
        &[roots[1].vec.clone(), roots[2].vec.clone(), ps[1].clone()],
        &[roots[k - 1].vec.clone(), t.vec.clone(), p_new],
    )?;
    if !is_automorphism(&tau, l) {
        return Ok(TypeIOutcome::NextRoot { root: t });
    }
    let rho = order3_rotation(
        &CornerBasis {
            r: roots[0].clone(),
            s: roots[1].clone(),
            p: ps[0].clone(),
        },
        l,
    )?;
    let psi = mat_mul(&tau, &rho);
    match classify_order(&psi) {
        OrderClass::Infinite {
            trace,
            parabolic_caveat,
        } => Ok(TypeIOutcome::InfiniteOrder {
            psi,
            trace,
            parabolic_caveat,
        }),
        OrderClass::Finite { trace } => Ok(TypeIOutcome::FiniteSymmetry { psi, trace }),
    }
}

// ---------------------------------------------------------------------------
// Type II: parametrized trace system
// ---------------------------------------------------------------------------

/// One wall segment between two corner anchors, with the previous wall for
/// orientation.  `p_prev` and `q` must be orthogonal to `wall`, timelike,
/// and lie in the same cone.
#[derive(Clone, Debug)]
pub struct EdgeFrame {
    pub r_prev: Root,
    pub wall: Root,
    pub p_prev: FVec,
    pub q: FVec,
}

/// The five polynomials of the parametrized trace
/// tr(ψ(x)) − 3 = (f₁z² + f₂z + f₃)/(f₄z) with z² = f₅, plus the geometric
/// data they were built from.
#[derive(Clone, Debug)]
pub struct TraceSystem {
    pub f1: FPoly,
    pub f2: FPoly,
    pub f3: FPoly,
    pub f4: FPoly,
    pub f5: FPoly,
    pub tau: FMatrix,
    pub frame: EdgeFrame,
    /// Unit u with (wall/u)² = 2.
    pub wall_unit: OElem,
    /// The normalized wall root e = wall/u.
    pub e: FVec,
    /// Polynomial tangent vector along the wall (w̃ = v²·w), sign-fixed so
    /// the induced rotation turns in the walking direction.
    pub w_tilde: Vec<FPoly>,
    /// The segment parametrization v(x) = (1−x)·p_prev + x·q.
    pub v: Vec<FPoly>,
}

fn poly_vec_const(v: &FVec) -> Vec<FPoly> {
    v.iter().map(|c| FPoly::constant(c.clone())).collect()
}

/// Gram pairing of polynomial vectors.
pub fn poly_ip(gram: &FMatrix, a: &[FPoly], b: &[FPoly]) -> FPoly {
    let d = gram[0][0].d();
    let mut acc = FPoly::zero(d);
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            acc = acc.add(&ai.mul(bj).scale(&gram[i][j]));
        }
    }
    acc
}

fn mat_poly_vec(m: &FMatrix, v: &[FPoly]) -> Vec<FPoly> {
    let d = m[0][0].d();
    m.iter()
        .map(|row| {
            let mut acc = FPoly::zero(d);
            for (c, p) in row.iter().zip(v) {
                acc = acc.add(&p.scale(c));
            }
            acc
        })
        .collect()
}

fn det3_poly(cols: &[Vec<FPoly>; 3]) -> FPoly {
    let m = |i: usize, j: usize| -> &FPoly { &cols[j][i] };
    let minor = |a: usize, b: usize, c: usize, e: usize| {
        m(a, b).mul(m(c, e)).sub(&m(a, e).mul(m(c, b)))
    };
    m(0, 0)
        .mul(&minor(1, 1, 2, 2))
        .sub(&m(0, 1).mul(&minor(1, 0, 2, 2)))
        .add(&m(0, 2).mul(&minor(1, 0, 2, 1)))
}

/// Builds the parametrized trace system for a candidate symmetry τ along a
/// wall segment.  The rotation center is v(x) = (1−x)p_prev + xq; the
/// norm-6 tangent direction is z(x)·w(x) with z² = 6/w², carried exactly by
/// the polynomial multiple w̃ = v²·w and the radicand polynomial f₅.  The
/// resulting degrees are checked (f₁: 1, f₂: 2, f₃: 3, f₄: 2, f₅: 2) and
/// the assembled trace is verified against direct matrix evaluation at both
/// endpoints.
pub fn build_trace_system(
    frame: &EdgeFrame,
    tau: &FMatrix,
    l: &GramLattice,
) -> Result<TraceSystem, EndgameError> {
    let d = l.d();
    let g = &l.gram;
    let wall = &frame.wall;
    let p_prev = &frame.p_prev;
    let q = &frame.q;
    if !l.ip(&wall.vec, p_prev).is_zero() || !l.ip(&wall.vec, q).is_zero() {
        return Err(EndgameError::BadInput(
            "segment anchors must be orthogonal to the wall".into(),
        ));
    }
    let p2 = l.norm_sq(p_prev);
    let q2 = l.norm_sq(q);
    if p2.sign_exact() >= 0 || q2.sign_exact() >= 0 {
        return Err(EndgameError::BadInput("segment anchors must be timelike".into()));
    }
    if l.ip(p_prev, q).sign_exact() >= 0 {
        return Err(EndgameError::BadInput(
            "segment anchors must lie in the same cone".into(),
        ));
    }
    let two = FElem::from_ints(d, 2, 0);
    let mut u = square_unit_ratio(&wall.norm_sq, &two)?.ok_or_else(|| {
        EndgameError::BadInput("wall norm is not 2 times a square unit".into())
    })?;
    if u.sign_exact() < 0 {
        u = -&u;
    }
    let e = vec_scale(&wall.vec, &u.inv()?);

    // v(x) and the constant-in-x invariants of the segment plane.
    let v: Vec<FPoly> = (0..3)
        .map(|i| FPoly::new(d, vec![p_prev[i].clone(), &q[i] - &p_prev[i]]))
        .collect();
    let v2 = poly_ip(g, &v, &v);
    let pq = l.ip(p_prev, q);
    let plane_gram = &(&p2 * &q2) - &(&pq * &pq);
    if plane_gram.is_zero() {
        return Err(EndgameError::BadInput("degenerate segment plane".into()));
    }

    // w̃ = v²·Δ − (Δ·v)·v, a polynomial multiple of the projection of
    // Δ = p_prev − q onto v-perp; the quadratic terms cancel exactly.
    let delta = vec_sub(p_prev, q);
    let dv = poly_ip(g, &poly_vec_const(&delta), &v);
    let mut w_tilde: Vec<FPoly> = (0..3)
        .map(|i| v2.scale(&delta[i]).sub(&dv.mul(&v[i])))
        .collect();

    // z² = f₅ = 6v²/Γ with Γ the (constant) Gram determinant of the plane.
    let six = FElem::from_ints(d, 6, 0);
    let f5 = v2.scale(&six.div_exact(&plane_gram)?);

    // det(e, w̃, v) = v²·D₀ with D₀ constant; its sign against the chain
    // orientation fixes the tangent direction so the parametrized rotation
    // turns the same way as the rotation at a genuine corner would.
    let e_cols = poly_vec_const(&e);
    let det_poly = det3_poly(&[e_cols.clone(), w_tilde.clone(), v.clone()]);
    let d0_poly = det_poly.div_exact(&v2)?;
    if d0_poly.degree() != Some(0) {
        return Err(EndgameError::SystemShape(
            "tangent determinant is not a constant multiple of v²".into(),
        ));
    }
    let mut d0 = d0_poly.coeff(0);
    let sigma = orientation_sign(&frame.r_prev.vec, &wall.vec, p_prev);
    if d0.sign_exact() != sigma {
        w_tilde = w_tilde.iter().map(|p| p.neg()).collect();
        d0 = -&d0;
    }

    // Pairings against A = τ⁻¹ through the orthogonal frame (e, z·w, v).
    let a = inverse(tau)?;
    let ae = mat_vec(&a, &e);
    let aw = mat_poly_vec(&a, &w_tilde);
    let av = mat_poly_vec(&a, &v);
    let s1 = l.ip(&e, &ae);
    let s2 = poly_ip(g, &e_cols, &aw);
    let s3 = poly_ip(g, &w_tilde, &aw);
    let s4 = poly_ip(g, &w_tilde, &poly_vec_const(&ae));
    let s5 = poly_ip(g, &v, &av);

    let half = FElem::new(d, Rat::new(1.into(), 2.into()), rat(0));
    let f1 = s2.scale(&(&d0 * &half));
    let f2 = v2
        .scale(&-&(&(&s1 * &half) + &six))
        .sub(&s3.scale(&plane_gram.inv()?))
        .add(&s5.scale(&two))
        .scale(&d0);
    let f3 = v2
        .mul(&s4)
        .scale(&(&-&(&FElem::from_ints(d, 3, 0) * &d0) * &plane_gram.inv()?));
    let f4 = v2.scale(&(&two * &d0));

    let degrees = [
        f1.degree(),
        f2.degree(),
        f3.degree(),
        f4.degree(),
        f5.degree(),
    ];
    if degrees != [Some(1), Some(2), Some(3), Some(2), Some(2)] {
        return Err(EndgameError::SystemShape(format!(
            "trace polynomial degrees {:?} differ from the expected (1, 2, 3, 2, 2)",
            degrees
        )));
    }

    let sys = TraceSystem {
        f1,
        f2,
        f3,
        f4,
        f5,
        tau: tau.clone(),
        frame: frame.clone(),
        wall_unit: u,
        e,
        w_tilde,
        v,
    };
    for x0 in [FElem::zero(d), FElem::one(d)] {
        if !trace_identity_at(&sys, l, &x0)? {
            return Err(EndgameError::SystemShape(format!(
                "assembled trace disagrees with direct evaluation at x = {}",
                x0.render_pair()
            )));
        }
    }
    Ok(sys)
}

// --- arithmetic in F[z]/(z² − c) for the endpoint oracle ---

#[derive(Clone, Debug)]
struct Ext {
    a: FElem,
    b: FElem,
}

impl Ext {
    fn real(a: FElem) -> Ext {
        let d = a.d();
        Ext {
            a,
            b: FElem::zero(d),
        }
    }
    fn zero(d: u32) -> Ext {
        Ext::real(FElem::zero(d))
    }
    fn add(&self, o: &Ext) -> Ext {
        Ext {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }
    fn sub(&self, o: &Ext) -> Ext {
        Ext {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }
    fn mul(&self, o: &Ext, c: &FElem) -> Ext {
        Ext {
            a: &(&self.a * &o.a) + &(&(&self.b * &o.b) * c),
            b: &(&self.a * &o.b) + &(&self.b * &o.a),
        }
    }
    fn scale(&self, s: &FElem) -> Ext {
        Ext {
            a: &self.a * s,
            b: &self.b * s,
        }
    }
    fn inv(&self, c: &FElem) -> Result<Ext, EndgameError> {
        let n = &(&self.a * &self.a) - &(&(&self.b * &self.b) * c);
        if n.is_zero() {
            return Err(EndgameError::SystemShape(
                "non-invertible element in the endpoint evaluation".into(),
            ));
        }
        let ni = n.inv()?;
        Ok(Ext {
            a: &self.a * &ni,
            b: &(-&self.b) * &ni,
        })
    }
}

fn ext_mat_mul(a: &[Vec<Ext>], b: &[Vec<Ext>], c: &FElem) -> Vec<Vec<Ext>> {
    let d = c.d();
    (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let mut acc = Ext::zero(d);
                    for (k, bk) in b.iter().enumerate() {
                        acc = acc.add(&a[i][k].mul(&bk[j], c));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// 3×3 inverse in F[z]/(z² − c) via the adjugate.
fn ext_mat_inv(m: &[Vec<Ext>], c: &FElem) -> Result<Vec<Vec<Ext>>, EndgameError> {
    let cof = |i: usize, j: usize| -> Ext {
        let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let s: Vec<usize> = (0..3).filter(|&x| x != j).collect();
        let minor = m[r[0]][s[0]]
            .mul(&m[r[1]][s[1]], c)
            .sub(&m[r[0]][s[1]].mul(&m[r[1]][s[0]], c));
        if (i + j) % 2 == 0 {
            minor
        } else {
            minor.scale(&-&FElem::one(c.d()))
        }
    };
    let det = m[0][0]
        .mul(&cof(0, 0), c)
        .add(&m[0][1].mul(&cof(0, 1), c))
        .add(&m[0][2].mul(&cof(0, 2), c));
    let det_inv = det.inv(c)?;
    Ok((0..3)
        .map(|i| (0..3).map(|j| cof(j, i).mul(&det_inv, c)).collect())
        .collect())
}

/// Endpoint oracle: at x = x₀ the parametrized rotation is assembled by
/// direct matrix algebra over F[z]/(z² − f₅(x₀)) and the identity
/// f₄·z·(tr(ψ) − 3) = f₁z² + f₂z + f₃ is checked exactly.
pub fn trace_identity_at(
    sys: &TraceSystem,
    l: &GramLattice,
    x0: &FElem,
) -> Result<bool, EndgameError> {
    let d = l.d();
    let c = sys.f5.eval(x0);
    if c.is_zero() {
        return Err(EndgameError::SystemShape(
            "radicand vanishes at the evaluation point".into(),
        ));
    }
    let vv: FVec = sys.v.iter().map(|p| p.eval(x0)).collect();
    let ww: FVec = sys.w_tilde.iter().map(|p| p.eval(x0)).collect();
    let vv2 = l.norm_sq(&vv);
    let vv2_inv = vv2.inv()?;
    // Frame columns: e, Z = z·w̃/v², v; images under the order-3 rotation:
    // (Z − e)/2, (−Z − 3e)/2, v.
    let half = FElem::new(d, Rat::new(1.into(), 2.into()), rat(0));
    let three = FElem::from_ints(d, 3, 0);
    let col_e: Vec<Ext> = sys.e.iter().map(|x| Ext::real(x.clone())).collect();
    let col_z: Vec<Ext> = ww
        .iter()
        .map(|x| Ext {
            a: FElem::zero(d),
            b: x * &vv2_inv,
        })
        .collect();
    let col_v: Vec<Ext> = vv.iter().map(|x| Ext::real(x.clone())).collect();
    let to_mat = |cols: [&Vec<Ext>; 3]| -> Vec<Vec<Ext>> {
        (0..3)
            .map(|i| (0..3).map(|j| cols[j][i].clone()).collect())
            .collect()
    };
    let b_mat = to_mat([&col_e, &col_z, &col_v]);
    let img1: Vec<Ext> = (0..3)
        .map(|i| col_z[i].sub(&col_e[i]).scale(&half))
        .collect();
    let img2: Vec<Ext> = (0..3)
        .map(|i| {
            col_z[i]
                .scale(&-&FElem::one(d))
                .sub(&col_e[i].scale(&three))
                .scale(&half)
        })
        .collect();
    let b_img = to_mat([&img1, &img2, &col_v]);
    let rho = ext_mat_mul(&b_img, &ext_mat_inv(&b_mat, &c)?, &c);
    // ψ = τ⁻¹ ∘ ρ(x₀).
    let a_real = inverse(&sys.tau)?;
    let a_ext: Vec<Vec<Ext>> = a_real
        .iter()
        .map(|row| row.iter().map(|x| Ext::real(x.clone())).collect())
        .collect();
    let psi = ext_mat_mul(&a_ext, &rho, &c);
    let mut tr = Ext::zero(d);
    for (i, row) in psi.iter().enumerate() {
        tr = tr.add(&row[i]);
    }
    // f₄·z·(tr − 3) = (f₁f₅ + f₃) + f₂·z, compared coefficientwise.
    let f4x = sys.f4.eval(x0);
    let lhs_real = &(&f4x * &tr.b) * &c;
    let lhs_z = &f4x * &(&tr.a - &three);
    let rhs_real = &(&sys.f1.eval(x0) * &c) + &sys.f3.eval(x0);
    let rhs_z = sys.f2.eval(x0);
    Ok(lhs_real == rhs_real && lhs_z == rhs_z)
}

// ---------------------------------------------------------------------------
// Type II certification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailedCondition {
    /// The candidate symmetry generator has finite order.
    GeneratorFiniteOrder,
    /// The radicand f₅ has a root in [0, 1] or is not positive there.
    RadicandNotPositive,
    /// The denominator polynomial f₄ vanishes somewhere on [0, 1].
    DenominatorVanishes,
    /// f₂ and f₁f₅ + f₃ are not both root-free with a common sign.
    NumeratorSignAmbiguous,
}

#[derive(Clone, Debug)]
pub enum Certification {
    /// tr(ψ(x)) > 3 on the whole open segment: the chamber has an
    /// infinite-order symmetry whether or not the extra corner exists.
    Certified {
        tau_trace: FElem,
        parabolic_caveat: bool,
        numerator_sign: i32,
    },
    NotCertified {
        condition: FailedCondition,
        detail: String,
    },
}

/// Checks the four certification conditions with exact arithmetic:
/// (a) the generator has infinite order (trace ≥ 3, with a caveat at
/// exactly 3), (b) f₅ is root-free on [0, 1] and positive, (c) f₄ is
/// root-free on [0, 1], (d) f₂ and h = f₁f₅ + f₃ are root-free with the
/// same sign at x = 1/2, and gcd(h, f₂) is constant so no common-root edge
/// case can hide a sign change.
pub fn certify_type_ii(sys: &TraceSystem) -> Result<Certification, EndgameError> {
    let half = Rat::new(1.into(), 2.into());
    let not = |condition: FailedCondition, detail: String| {
        Ok(Certification::NotCertified { condition, detail })
    };
    let (tau_trace, parabolic_caveat) = match classify_order(&sys.tau) {
        OrderClass::Infinite {
            trace,
            parabolic_caveat,
        } => (trace, parabolic_caveat),
        OrderClass::Finite { trace } => {
            return not(
                FailedCondition::GeneratorFiniteOrder,
                format!("generator trace {}", trace.render_pair()),
            )
        }
    };
    if sturm_roots_in_unit_interval(&sys.f5)? != 0 {
        return not(
            FailedCondition::RadicandNotPositive,
            "f5 has a root in [0, 1]".into(),
        );
    }
    if sys.f5.eval_rat(&half).sign_exact() <= 0 {
        return not(
            FailedCondition::RadicandNotPositive,
            "f5 is negative on the segment".into(),
        );
    }
    if sturm_roots_in_unit_interval(&sys.f4)? != 0 {
        return not(
            FailedCondition::DenominatorVanishes,
            "f4 has a root in [0, 1]".into(),
        );
    }
    let h = sys.f1.mul(&sys.f5).add(&sys.f3);
    if sys.f2.is_zero() || h.is_zero() {
        return not(
            FailedCondition::NumeratorSignAmbiguous,
            "numerator component is identically zero".into(),
        );
    }
    if sturm_roots_in_unit_interval(&sys.f2)? != 0 {
        return not(
            FailedCondition::NumeratorSignAmbiguous,
            "f2 has a root in [0, 1]".into(),
        );
    }
    if sturm_roots_in_unit_interval(&h)? != 0 {
        return not(
            FailedCondition::NumeratorSignAmbiguous,
            "f1·f5 + f3 has a root in [0, 1]".into(),
        );
    }
    let s2 = sys.f2.eval_rat(&half).sign_exact();
    let sh = h.eval_rat(&half).sign_exact();
    if s2 != sh {
        return not(
            FailedCondition::NumeratorSignAmbiguous,
            "f2 and f1·f5 + f3 have opposite signs".into(),
        );
    }
    let g = h.gcd(&sys.f2)?;
    if g.degree() != Some(0) {
        return not(
            FailedCondition::NumeratorSignAmbiguous,
            "f2 and f1·f5 + f3 share a nonconstant factor".into(),
        );
    }
    Ok(Certification::Certified {
        tau_trace,
        parabolic_caveat,
        numerator_sign: s2,
    })
}

#[derive(Clone, Debug)]
pub enum TypeIIOutcome {
    /// A candidate symmetry was found and the trace system evaluated.
    Resolved {
        system: Box<TraceSystem>,
        certification: Certification,
    },
    /// No candidate symmetry: the nearest orthogonal mirror is the next
    /// wall and normal walking resumes (the caller should remember this
    /// index as a future comparison corner).
    NextRoot { root: Root },
}

/// Resolves a chain with no order-3 corners whose end walls both have norm
/// 2u²: finds the nearest orthogonal mirror past the last wall, tests for a
/// symmetry mapping the first corner there, and when one exists builds and
/// certifies the parametrized trace system.
pub fn resolve_type_ii(
    chain: &RootChain,
    l: &GramLattice,
    limits: &SearchLimits,
) -> Result<TypeIIOutcome, EndgameError> {
    let roots = &chain.roots;
    let k = roots.len();
    if k <= 3 {
        return Err(EndgameError::BadInput("type II needs more than 3 roots".into()));
    }
    for i in 0..k - 1 {
        if matches!(
            classify_corner(&roots[i], &roots[i + 1], l),
            Some(CornerType::A2)
        ) {
            return Err(EndgameError::BadInput(format!(
                "type II requires no order-3 corners, found one at position {i}"
            )));
        }
    }
    let two = FElem::from_ints(l.d(), 2, 0);
    for idx in [0, k - 1] {
        if square_unit_ratio(&roots[idx].norm_sq, &two)?.is_none() {
            return Err(EndgameError::BadInput(
                "type II needs end walls of norm 2u²".into(),
            ));
        }
    }
    let ps = chain_anchors(roots, l)?;
    let art = next_non_a2_root(&roots[k - 2], &roots[k - 1], &ps[k - 2], l, limits)?;
    let t = art.t_simple.clone().ok_or_else(|| {
        EndgameError::BadInput("nearest orthogonal mirror direction is not a root".into())
    })?;
    let q = corner_vector(&roots[k - 1], &t, l, Some(&ps[k - 2]))?;
    let tau = map_between_bases(
        &[roots[0].vec.clone(), roots[1].vec.clone(), ps[0].clone()],
        &[roots[k - 1].vec.clone(), t.vec.clone(), q.clone()],
    )?;
    if !is_automorphism(&tau, l) {
        return Ok(TypeIIOutcome::NextRoot { root: t });
    }
    let frame = EdgeFrame {
        r_prev: roots[k - 2].clone(),
        wall: roots[k - 1].clone(),
        p_prev: ps[k - 2].clone(),
        q,
    };
    let system = build_trace_system(&frame, &tau, l)?;
    let certification = certify_type_ii(&system)?;
    Ok(TypeIIOutcome::Resolved {
        system: Box::new(system),
        certification,
    })
}
