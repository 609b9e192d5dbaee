//! Exact arithmetic in the real quadratic field F = Q(√d) and its ring of
//! integers O.
//!
//! Elements are stored as pairs of arbitrary-precision rationals `a + b√d`
//! relative to a [`FieldDesc`].  No floating point participates in any
//! decision: ordering under the fixed embedding √d > 0 is decided by exact
//! sign computations, and approximate values exist only as logging views.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

pub type Rat = BigRational;

/// Construct a `BigRational` from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Errors arising from field/ring operations.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QringError {
    #[error("d = {0} is not squarefree or is < 2")]
    BadField(u32),
    #[error("unsupported field d = {0} for this operation")]
    UnsupportedField(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operand is not an algebraic integer: {0}")]
    NotIntegral(String),
    #[error("mixed field descriptors: d = {0} vs d = {1}")]
    MixedFields(u32, u32),
}

/// Descriptor of the field F = Q(√d).
///
/// `half_basis` is true exactly when d ≡ 1 (mod 4), in which case the ring of
/// integers is Z[(1+√d)/2] and coordinates may be half-integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldDesc {
    pub d: u32,
}

impl FieldDesc {
    pub fn new(d: u32) -> Result<Self, QringError> {
        if d < 2 || !is_squarefree_u64(d as u64) {
            return Err(QringError::BadField(d));
        }
        Ok(FieldDesc { d })
    }

    pub fn half_basis(&self) -> bool {
        self.d % 4 == 1
    }
}

fn is_squarefree_u64(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// An element a + b√d of F = Q(√d), with exact rational coordinates.
///
/// Equality is structural, which coincides with numerical equality because
/// the representation is unique (√d is irrational).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FElem {
    d: u32,
    a: Rat,
    b: Rat,
}

/// Alias used where integrality is expected; enforced by predicate, not by
/// representation (half-integer coordinates occur for d ≡ 1 mod 4 and in
/// intermediate relative-extension data).
pub type OElem = FElem;

impl FElem {
    pub fn new(d: u32, a: Rat, b: Rat) -> Self {
        FElem { d, a, b }
    }

    /// Integer-coordinate constructor: a + b√d.
    pub fn from_ints(d: u32, a: i64, b: i64) -> Self {
        FElem::new(d, rat(a), rat(b))
    }

    pub fn zero(d: u32) -> Self {
        FElem::from_ints(d, 0, 0)
    }

    pub fn one(d: u32) -> Self {
        FElem::from_ints(d, 1, 0)
    }

    pub fn sqrt_d(d: u32) -> Self {
        FElem::from_ints(d, 0, 1)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn assert_same_field(&self, other: &FElem) {
        assert_eq!(
            self.d, other.d,
            "mixed field descriptors: d = {} vs d = {}",
            self.d, other.d
        );
    }

    /// Galois conjugate a − b√d.
    pub fn conj(&self) -> FElem {
        FElem::new(self.d, self.a.clone(), -self.b.clone())
    }

    /// Field norm N(a + b√d) = a² − d·b² ∈ Q.
    pub fn field_norm(&self) -> Rat {
        &self.a * &self.a - rat(self.d as i64) * &self.b * &self.b
    }

    /// Field trace 2a.
    pub fn trace(&self) -> Rat {
        rat(2) * &self.a
    }

    /// Sign of the element under the fixed embedding √d ↦ +√d, computed
    /// without floating point: when a and b disagree in sign, the sign of
    /// a + b√d equals the sign of a exactly when a² > d·b².
    pub fn sign_exact(&self) -> i32 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        match (sa, sb) {
            (0, 0) => 0,
            (s, 0) | (0, s) => s,
            (s, t) if s == t => s,
            (s, _) => {
                let n = self.field_norm();
                match rational_sign(&n) {
                    0 => 0, // impossible for squarefree d ≥ 2 unless zero
                    ns => {
                        if ns > 0 {
                            s
                        } else {
                            -s
                        }
                    }
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign_exact() > 0
    }

    /// Totally positive: positive under both embeddings.
    pub fn is_totally_positive(&self) -> bool {
        self.sign_exact() > 0 && self.conj().sign_exact() > 0
    }

    /// Exact comparison under the fixed embedding.
    pub fn cmp_embed(&self, other: &FElem) -> Ordering {
        self.assert_same_field(other);
        match (self - other).sign_exact() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// True iff the element lies in the ring of integers O.
    pub fn is_integral(&self) -> bool {
        if self.d % 4 == 1 {
            let two_a = rat(2) * &self.a;
            let two_b = rat(2) * &self.b;
            two_a.is_integer()
                && two_b.is_integer()
                && (two_a.to_integer() - two_b.to_integer()).is_even()
        } else {
            self.a.is_integer() && self.b.is_integer()
        }
    }

    pub fn inv(&self) -> Result<FElem, QringError> {
        if self.is_zero() {
            return Err(QringError::DivisionByZero);
        }
        let n = self.field_norm();
        Ok(FElem::new(self.d, &self.a / &n, -&self.b / &n))
    }

    pub fn div_exact(&self, other: &FElem) -> Result<FElem, QringError> {
        Ok(self * &other.inv()?)
    }

    /// Integer power (possibly negative).
    pub fn pow(&self, k: i64) -> Result<FElem, QringError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = FElem::one(self.d);
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Rat) -> FElem {
        FElem::new(self.d, &self.a * c, &self.b * c)
    }

    /// Approximate embedding value; logging/diagnostics only, never used in
    /// decision paths.
    pub fn embed_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN)
            + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }

    /// Certified rational bounds lo ≤ value ≤ hi on the embedding, with
    /// |hi − lo| ≤ |b| · 10⁻¹².
    pub fn embed_bounds(&self) -> (Rat, Rat) {
        const SCALE: u64 = 1_000_000_000_000;
        let n = BigInt::from(self.d) * BigInt::from(SCALE) * BigInt::from(SCALE);
        let s = n.sqrt(); // floor(√(d·SCALE²)), so s/SCALE ≤ √d ≤ (s+1)/SCALE
        let lo_sqrt = Rat::new(s.clone(), BigInt::from(SCALE));
        let hi_sqrt = Rat::new(s + 1, BigInt::from(SCALE));
        if self.b.is_negative() {
            (&self.a + &self.b * hi_sqrt, &self.a + &self.b * lo_sqrt)
        } else {
            (&self.a + &self.b * lo_sqrt, &self.a + &self.b * hi_sqrt)
        }
    }

    /// Render as the pair "(a b)" used throughout reports.
    pub fn render_pair(&self) -> String {
        format!("({} {})", self.a, self.b)
    }
}

fn rational_sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Debug for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})√{}", self.a, self.b, self.d)
    }
}

impl fmt::Display for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}√{}", self.b, self.d)
        } else if self.b.is_positive() {
            write!(f, "{}+{}√{}", self.a, self.b, self.d)
        } else {
            write!(f, "{}{}√{}", self.a, self.b, self.d)
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, |$lhs:ident, $rhs:ident| $body:expr) => {
        impl std::ops::$trait<&FElem> for &FElem {
            type Output = FElem;
            fn $method(self, other: &FElem) -> FElem {
                self.assert_same_field(other);
                let $lhs = self;
                let $rhs = other;
                $body
            }
        }
        impl std::ops::$trait<FElem> for FElem {
            type Output = FElem;
            fn $method(self, other: FElem) -> FElem {
                std::ops::$trait::$method(&self, &other)
            }
        }
    };
}

binop!(Add, add, |x, y| FElem::new(x.d, &x.a + &y.a, &x.b + &y.b));
binop!(Sub, sub, |x, y| FElem::new(x.d, &x.a - &y.a, &x.b - &y.b));
binop!(Mul, mul, |x, y| {
    let d = rat(x.d as i64);
    FElem::new(
        x.d,
        &x.a * &y.a + &d * &x.b * &y.b,
        &x.a * &y.b + &x.b * &y.a,
    )
});

impl std::ops::Neg for &FElem {
    type Output = FElem;
    fn neg(self) -> FElem {
        FElem::new(self.d, -self.a.clone(), -self.b.clone())
    }
}

impl std::ops::Neg for FElem {
    type Output = FElem;
    fn neg(self) -> FElem {
        -&self
    }
}

/// Fundamental unit α₀ > 1 generating the positive unit group U⁺.
///
/// Only the fields needed by the classification are precomputed; other d are
/// rejected rather than guessed.
pub fn fundamental_unit(f: FieldDesc) -> Result<OElem, QringError> {
    match f.d {
        2 => Ok(FElem::from_ints(2, 1, 1)),
        3 => Ok(FElem::from_ints(3, 2, 1)),
        5 => Ok(FElem::new(5, Rat::new(1.into(), 2.into()), Rat::new(1.into(), 2.into()))),
        _ => Err(QringError::UnsupportedField(f.d)),
    }
}

/// If x/y = w² for a square unit w ∈ U₁⁺ (i.e. an even power of α₀ up to the
/// positivity convention), returns w; otherwise `None`.
///
/// The discrete log is by repeated exact division: α₀ᵏ is strictly monotone
/// in k under the fixed embedding, so the loop terminates.
pub fn square_unit_ratio(x: &FElem, y: &FElem) -> Result<Option<OElem>, QringError> {
    if y.is_zero() {
        return Err(QringError::DivisionByZero);
    }
    let f = FieldDesc::new(x.d())?;
    let q = x.div_exact(y)?;
    // A square unit is totally positive, integral with integral inverse, and
    // of field norm 1.
    if !q.is_totally_positive() || !q.is_integral() {
        return Ok(None);
    }
    match q.inv() {
        Ok(qi) if qi.is_integral() => {}
        _ => return Ok(None),
    }
    if q.field_norm() != rat(1) {
        return Ok(None);
    }
    let alpha = fundamental_unit(f)?;
    let alpha_sq = &alpha * &alpha;
    let one = FElem::one(q.d());
    // Walk q toward 1 by exact multiplication/division by α₀².
    let mut cur = q;
    let mut k: i64 = 0;
    loop {
        match cur.cmp_embed(&one) {
            Ordering::Equal => break,
            Ordering::Greater => {
                cur = cur.div_exact(&alpha_sq)?;
                k += 1;
                if !cur.is_integral() && !cur.inv()?.is_integral() {
                    return Ok(None);
                }
            }
            Ordering::Less => {
                cur = &cur * &alpha_sq;
                k -= 1;
            }
        }
        if k.abs() > 4096 {
            return Ok(None);
        }
    }
    Ok(Some(alpha.pow(k)?))
}

/// Returns true iff x is a unit of O (integral with integral inverse).
pub fn is_unit(x: &FElem) -> bool {
    x.is_integral() && matches!(x.inv(), Ok(i) if i.is_integral())
}

/// All z ∈ O with lower < z < upper and conj_lower < z̄ < conj_upper (strict),
/// sorted ascending by the fixed embedding.
///
/// The box is finite: 2a = z + z̄ and 2b√d = z − z̄ are each confined to a
/// bounded interval.  Candidate coordinate ranges come from certified
/// rational bounds on √d; membership is then decided exactly.
pub fn strip_elements(
    lower: &FElem,
    upper: &FElem,
    conj_lower: &FElem,
    conj_upper: &FElem,
    f: FieldDesc,
) -> Vec<OElem> {
    let d = f.d;
    let q0: i64 = if f.half_basis() { 2 } else { 1 };
    // Interval endpoints as certified rational bounds on the embeddings.
    let (l_lo, _l_hi) = lower.embed_bounds();
    let (_u_lo, u_hi) = upper.embed_bounds();
    let (cl_lo, _cl_hi) = conj_lower.embed_bounds();
    let (_cu_lo, cu_hi) = conj_upper.embed_bounds();
    // q0·a ranges over an integer interval derived from 2a ∈ (L + CL, U + CU).
    let a_lo = (&l_lo + &cl_lo) / rat(2);
    let a_hi = (&u_hi + &cu_hi) / rat(2);
    let m_lo = (a_lo * rat(q0)).floor().to_integer();
    let m_hi = (a_hi * rat(q0)).ceil().to_integer();
    // For b: 2b√d = z − z̄ ∈ (L − CU, U − CL); bound √d below by 1.
    let sqrt_lo = Rat::new(BigInt::from(1), BigInt::from(1));
    let b_abs_half = {
        let w1 = (&u_hi - &cl_lo).abs();
        let w2 = (&l_lo - &cu_hi).abs();
        let w = if w1 > w2 { w1 } else { w2 };
        w / (rat(2) * sqrt_lo)
    };
    let n_bound = (b_abs_half * rat(q0)).ceil().to_integer();

    let _ = (&m_lo, &m_hi);
    // Certified rational bounds s_lo ≤ √d ≤ s_hi; the final membership test
    // below is exact, so modest precision only costs a few spurious trials.
    let scale = BigInt::from(1_000_000i64);
    let s_num = (BigInt::from(d) * &scale * &scale).sqrt();
    let s_lo = Rat::new(s_num.clone(), scale.clone());
    let s_hi = Rat::new(s_num + 1, scale);
    let q0r = rat(q0);
    let mut out = Vec::new();
    // For each √d-coefficient n, the rational part m lies in the (narrow)
    // intersection of the embedding and conjugate windows, so the walk is
    // linear in the strip length rather than quadratic.
    let mut n = -n_bound.clone();
    while n <= n_bound {
        let nr = Rat::from_integer(n.clone());
        // embed: m ∈ (q0·L − n√d, q0·U − n√d); conj: m ∈ (q0·CL + n√d,
        // q0·CU + n√d).  Widen with the √d bounds to a guaranteed superset.
        let (nl, nh) = if n < BigInt::from(0) {
            (&nr * &s_lo, &nr * &s_hi)
        } else {
            (&nr * &s_hi, &nr * &s_lo)
        };
        let lo1 = &(&l_lo * &q0r) - &nh;
        let hi1 = &(&u_hi * &q0r) - &nl;
        let lo2 = &(&cl_lo * &q0r) + &nl;
        let hi2 = &(&cu_hi * &q0r) + &nh;
        let lo = if lo1 > lo2 { lo1 } else { lo2 };
        let hi = if hi1 < hi2 { hi1 } else { hi2 };
        if lo > hi {
            n += 1;
            continue;
        }
        let mut m = lo.floor().to_integer();
        let m_stop = hi.ceil().to_integer();
        while m <= m_stop {
            if q0 == 2 && (m.clone() - n.clone()).is_odd() {
                m += 1;
                continue;
            }
            let z = FElem::new(
                d,
                Rat::new(m.clone(), BigInt::from(q0)),
                Rat::new(n.clone(), BigInt::from(q0)),
            );
            let zc = z.conj();
            if z.cmp_embed(lower) == Ordering::Greater
                && z.cmp_embed(upper) == Ordering::Less
                && zc.cmp_embed(conj_lower) == Ordering::Greater
                && zc.cmp_embed(conj_upper) == Ordering::Less
            {
                out.push(z);
            }
            m += 1;
        }
        n += 1;
    }
    out.sort_by(|x, y| {
        x.cmp_embed(y)
            .then_with(|| x.a().cmp(y.a()))
            .then_with(|| x.b().cmp(y.b()))
    });
    out
}

/// Fields where O is norm-Euclidean, so the remainder-based gcd below is
/// valid.  The classification only relies on d = 2.
const NORM_EUCLIDEAN_D: &[u32] = &[2, 3, 5, 6, 7, 11, 13, 17, 19, 21, 29, 33, 37, 41, 57, 73];

fn require_euclidean(d: u32) -> Result<(), QringError> {
    if NORM_EUCLIDEAN_D.contains(&d) {
        Ok(())
    } else {
        Err(QringError::UnsupportedField(d))
    }
}

/// Round a rational to a nearest integer (ties toward even, as produced by
/// rounding the doubled value).
fn round_nearest(r: &Rat) -> BigInt {
    (r + Rat::new(1.into(), 2.into())).floor().to_integer()
}

/// Division with remainder in O: q has coordinates of x/y rounded to nearest,
/// which guarantees |N(r)| < |N(y)| in norm-Euclidean fields.
pub fn odivmod(x: &OElem, y: &OElem) -> Result<(OElem, OElem), QringError> {
    require_euclidean(x.d())?;
    if y.is_zero() {
        return Err(QringError::DivisionByZero);
    }
    let exact = x.div_exact(y)?;
    let q = if x.d() % 4 == 1 {
        // Round in half-integer steps respecting the parity constraint: try
        // the four nearby integral points and keep the best remainder.
        let mut best: Option<(OElem, OElem)> = None;
        let qa2 = rat(2) * exact.a();
        let qb2 = rat(2) * exact.b();
        for da in 0..2i64 {
            for db in 0..2i64 {
                let ca = (&qa2 + rat(da)).floor().to_integer();
                let cb = (&qb2 + rat(db)).floor().to_integer();
                let cand = FElem::new(
                    x.d(),
                    Rat::new(ca.clone(), 2.into()),
                    Rat::new(cb.clone(), 2.into()),
                );
                if !cand.is_integral() {
                    continue;
                }
                let r = x - &(y * &cand);
                let better = match &best {
                    None => true,
                    Some((_, br)) => r.field_norm().abs() < br.field_norm().abs(),
                };
                if better {
                    best = Some((cand, r));
                }
            }
        }
        let (q, _r) = best.expect("at least one integral rounding exists");
        q
    } else {
        FElem::new(
            x.d(),
            Rat::from_integer(round_nearest(exact.a())),
            Rat::from_integer(round_nearest(exact.b())),
        )
    };
    let r = x - &(y * &q);
    Ok((q, r))
}

/// Greatest common divisor in O via the norm-Euclidean algorithm; defined up
/// to units.
pub fn ogcd(x: &OElem, y: &OElem) -> Result<OElem, QringError> {
    let mut a = x.clone();
    let mut b = y.clone();
    while !b.is_zero() {
        let (_, r) = odivmod(&a, &b)?;
        a = b;
        b = r;
    }
    Ok(a)
}

/// Extended gcd: returns (g, s, t) with g = s·x + t·y.
pub fn oxgcd(x: &OElem, y: &OElem) -> Result<(OElem, OElem, OElem), QringError> {
    let d = x.d();
    if x.is_zero() {
        return Ok((y.clone(), FElem::zero(d), FElem::one(d)));
    }
    if y.is_zero() {
        return Ok((x.clone(), FElem::one(d), FElem::zero(d)));
    }
    let (mut a, mut b) = (x.clone(), y.clone());
    let (mut s0, mut s1) = (FElem::one(d), FElem::zero(d));
    let (mut t0, mut t1) = (FElem::zero(d), FElem::one(d));
    while !b.is_zero() {
        let (q, r) = odivmod(&a, &b)?;
        a = b;
        b = r;
        let s2 = &s0 - &(&q * &s1);
        s0 = s1;
        s1 = s2;
        let t2 = &t0 - &(&q * &t1);
        t0 = t1;
        t1 = t2;
    }
    Ok((a, s0, t0))
}

/// Canonical associate of a nonzero g ∈ O: the unit multiple h = ±α₀ᵏ·g with
/// h > 0 and h²/|N(h)| ∈ [1, α₀²).  Reproduces the content normalizations
/// used throughout the walking code.
pub fn canonical_associate(g: &OElem) -> Result<OElem, QringError> {
    if g.is_zero() {
        return Err(QringError::DivisionByZero);
    }
    let f = FieldDesc::new(g.d())?;
    let alpha = fundamental_unit(f)?;
    let mut h = if g.sign_exact() < 0 { -g } else { g.clone() };
    let absn = h.field_norm().abs();
    let alpha_sq_rat = {
        let a2 = &alpha * &alpha;
        a2
    };
    loop {
        // ratio = h²/|N| compared against [1, α₀²) exactly in F.
        let h2 = &h * &h;
        let ratio = h2.scale(&absn.recip());
        let upper = FElem::new(
            g.d(),
            alpha_sq_rat.a().clone(),
            alpha_sq_rat.b().clone(),
        );
        if ratio.cmp_embed(&FElem::one(g.d())) == Ordering::Less {
            h = &h * &alpha;
        } else if ratio.cmp_embed(&upper) != Ordering::Less {
            h = h.div_exact(&alpha)?;
        } else {
            break;
        }
        if h.sign_exact() < 0 {
            h = -&h;
        }
    }
    if h.sign_exact() < 0 {
        h = -&h;
    }
    Ok(h)
}

/// Canonical totally positive representative of the square-unit class of a
/// totally positive g: the representative with g²/|N(g)| ∈ [1, α₀⁴).
pub fn canonical_totally_positive(g: &OElem) -> Result<OElem, QringError> {
    if !g.is_totally_positive() {
        return Err(QringError::NotIntegral(format!(
            "expected totally positive element, got {g}"
        )));
    }
    let f = FieldDesc::new(g.d())?;
    let alpha = fundamental_unit(f)?;
    let alpha_sq = &alpha * &alpha;
    let alpha4 = &alpha_sq * &alpha_sq;
    let absn = g.field_norm().abs();
    let mut h = g.clone();
    loop {
        let ratio = (&h * &h).scale(&absn.recip());
        if ratio.cmp_embed(&FElem::one(g.d())) == Ordering::Less {
            h = &h * &alpha_sq;
        } else if ratio.cmp_embed(&alpha4) != Ordering::Less {
            h = h.div_exact(&alpha_sq)?;
        } else {
            break;
        }
    }
    Ok(h)
}

/// Positive divisors of z up to square-unit equivalence, one canonical
/// totally positive representative per unit orbit; representatives whose
/// natural choice has negative norm are replaced by their α₀-multiple, so
/// every output has positive field norm.  Sorted by (|norm|, embedding).
pub fn divisors_up_to_equivalence(z: &OElem) -> Result<Vec<OElem>, QringError> {
    if z.is_zero() {
        return Err(QringError::DivisionByZero);
    }
    let f = FieldDesc::new(z.d())?;
    require_euclidean(f.d)?;
    let nz = z.field_norm().abs().to_integer();
    let alpha = fundamental_unit(f)?;
    let mut out: Vec<OElem> = Vec::new();
    for n in positive_divisors(&nz) {
        // Any totally positive t with N(t) = n has a square-unit-class
        // representative with embeddings in [√n / α₀², √n · α₀²]; enumerate a
        // covering box and filter exactly.
        let bound = {
            let sqrt_hi = Rat::from_integer(n.sqrt() + 1);
            let a2 = (&alpha * &alpha).embed_bounds().1;
            FElem::new(f.d, sqrt_hi * a2 + rat(1), Rat::zero())
        };
        let zero = FElem::zero(f.d);
        for t in strip_elements(&zero, &bound, &zero, &bound, f) {
            if t.field_norm() != Rat::from_integer(n.clone()) {
                continue;
            }
            if !z.div_exact(&t)?.is_integral() {
                continue;
            }
            let c = canonical_totally_positive(&t)?;
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out.sort_by(|x, y| {
        x.field_norm()
            .abs()
            .cmp(&y.field_norm().abs())
            .then_with(|| x.cmp_embed(y))
    });
    Ok(out)
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut divs = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            divs.push(i.clone());
            let j = &n / &i;
            if j != i {
                divs.push(j);
            }
        }
        i += 1;
    }
    divs.sort();
    divs
}

/// Exactly |N(c)| coset representatives of O/cO, computed from the Smith
/// normal form of the multiplication-by-c matrix on the integral basis, then
/// floor-reduced mod c for a stable presentation.
pub fn coset_representatives(c: &OElem) -> Result<Vec<OElem>, QringError> {
    if c.is_zero() {
        return Err(QringError::DivisionByZero);
    }
    let f = FieldDesc::new(c.d())?;
    if !c.is_integral() {
        return Err(QringError::NotIntegral(c.to_string()));
    }
    // Integral basis (1, ω) with ω = √d or (1+√d)/2; mult-by-c matrix columns
    // are the basis images in basis coordinates.
    let omega = if f.half_basis() {
        FElem::new(
            f.d,
            Rat::new(1.into(), 2.into()),
            Rat::new(1.into(), 2.into()),
        )
    } else {
        FElem::sqrt_d(f.d)
    };
    let to_coords = |x: &FElem| -> (BigInt, BigInt) {
        // x = u + v·ω with u, v ∈ Z.
        let v = if f.half_basis() {
            (rat(2) * x.b()).to_integer()
        } else {
            x.b().to_integer()
        };
        let u = (x.a() - Rat::from_integer(v.clone()) * omega.a()).to_integer();
        (u, v)
    };
    let from_coords = |u: &BigInt, v: &BigInt| -> FElem {
        &FElem::new(f.d, Rat::from_integer(u.clone()), Rat::zero())
            + &omega.scale(&Rat::from_integer(v.clone()))
    };
    let col1 = to_coords(c);
    let col2 = to_coords(&(c * &omega));
    let m = [
        [col1.0.clone(), col2.0.clone()],
        [col1.1.clone(), col2.1.clone()],
    ];
    let (u_mat, s) = smith_2x2(&m);
    let mut reps = Vec::new();
    let mut x = BigInt::zero();
    while x < s[0] {
        let mut y = BigInt::zero();
        while y < s[1] {
            // Representative U·(x, y) in basis coordinates.
            let u0 = &u_mat[0][0] * &x + &u_mat[0][1] * &y;
            let v0 = &u_mat[1][0] * &x + &u_mat[1][1] * &y;
            let rep = from_coords(&u0, &v0);
            // Floor-reduce mod c for small canonical coordinates.
            let q = rep.div_exact(c)?;
            let qf = FElem::new(
                f.d,
                Rat::from_integer(q.a().floor().to_integer()),
                Rat::from_integer(q.b().floor().to_integer()),
            );
            let reduced = &rep - &(c * &qf);
            reps.push(reduced);
            y += 1;
        }
        x += 1;
    }
    reps.sort_by(|p, q| {
        p.cmp_embed(q)
            .then_with(|| p.a().cmp(q.a()))
            .then_with(|| p.b().cmp(q.b()))
    });
    Ok(reps)
}

/// Smith normal form of a 2×2 integer matrix M: returns (U, diag) with
/// M = U·diag(s₁,s₂)·V for some unimodular V (not returned), s₁ | s₂,
/// s₁, s₂ > 0.
fn smith_2x2(m: &[[BigInt; 2]; 2]) -> ([[BigInt; 2]; 2], [BigInt; 2]) {
    let mut a = [
        [m[0][0].clone(), m[0][1].clone()],
        [m[1][0].clone(), m[1][1].clone()],
    ];
    let mut u = [
        [BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::one()],
    ];
    // Invariant: M = U·A.  Row operations on A are compensated by inverse
    // column operations on U; column operations on A need no compensation.
    let swap_rows = |a: &mut [[BigInt; 2]; 2], u: &mut [[BigInt; 2]; 2]| {
        a.swap(0, 1);
        for row in u.iter_mut() {
            row.swap(0, 1);
        }
    };
    // row1 -= q·row0  ⇒  U column0 += q·column1.
    let row_reduce = |a: &mut [[BigInt; 2]; 2], u: &mut [[BigInt; 2]; 2], q: &BigInt| {
        a[1][0] = &a[1][0] - q * &a[0][0];
        a[1][1] = &a[1][1] - q * &a[0][1];
        for row in u.iter_mut() {
            row[0] = &row[0] + q * &row[1];
        }
    };
    loop {
        // Clear a[1][0] by the euclidean algorithm on the first column.
        while !a[1][0].is_zero() {
            if a[0][0].is_zero() || (!a[1][0].is_zero() && a[1][0].abs() < a[0][0].abs()) {
                swap_rows(&mut a, &mut u);
                continue;
            }
            let q = &a[1][0] / &a[0][0];
            if q.is_zero() {
                swap_rows(&mut a, &mut u);
            } else {
                row_reduce(&mut a, &mut u, &q);
            }
        }
        // Clear a[0][1] by column operations (free on U).
        while !a[0][1].is_zero() {
            if a[0][0].is_zero() || a[0][1].abs() < a[0][0].abs() {
                for row in a.iter_mut() {
                    row.swap(0, 1);
                }
                continue;
            }
            let q = &a[0][1] / &a[0][0];
            if q.is_zero() {
                for row in a.iter_mut() {
                    row.swap(0, 1);
                }
            } else {
                a[0][1] = &a[0][1] - &q * &a[0][0];
                a[1][1] = &a[1][1] - &q * &a[1][0];
            }
        }
        if a[1][0].is_zero() && a[0][1].is_zero() {
            if (&a[1][1] % &a[0][0]).is_zero() {
                break;
            }
            // Chain violated: column0 += column1 folds a[1][1] back into the
            // working column (a column op, free on U), then redo.
            a[1][0] = &a[1][0] + &a[1][1];
        }
    }
    let s1 = a[0][0].abs();
    let s2 = a[1][1].abs();
    (u, [s1, s2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe2(a: i64, b: i64) -> FElem {
        FElem::from_ints(2, a, b)
    }

    #[test]
    fn conj_is_ring_automorphism() {
        let x = fe2(1, 1);
        let y = fe2(2, -1);
        assert_eq!(x.conj().conj(), x);
        assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
        assert_eq!(fe2(3, 2).conj(), fe2(3, -2));
        assert_eq!(fe2(0, 0).conj(), fe2(0, 0));
    }

    #[test]
    fn field_norm_values() {
        assert_eq!(fe2(1, 1).field_norm(), rat(-1));
        assert_eq!(fe2(2, 1).field_norm(), rat(2));
        assert_eq!(fe2(1, -1).field_norm(), rat(-1));
        let x = fe2(5, 3);
        let y = fe2(-2, 7);
        assert_eq!(
            (&x * &y).field_norm(),
            x.field_norm() * y.field_norm()
        );
        assert_eq!(x.field_norm(), (&x * &x.conj()).a().clone());
    }

    #[test]
    fn sign_exact_values() {
        assert_eq!(fe2(-1, 1).sign_exact(), 1);
        assert_eq!(fe2(3, -2).sign_exact(), 1);
        assert_eq!(fe2(1, -1).sign_exact(), -1);
        assert_eq!(fe2(0, 0).sign_exact(), 0);
        assert_eq!(fe2(0, -1).sign_exact(), -1);
    }

    #[test]
    fn fundamental_units() {
        assert_eq!(fundamental_unit(FieldDesc::new(2).unwrap()).unwrap(), fe2(1, 1));
        assert_eq!(
            fundamental_unit(FieldDesc::new(3).unwrap()).unwrap(),
            FElem::from_ints(3, 2, 1)
        );
        let phi = fundamental_unit(FieldDesc::new(5).unwrap()).unwrap();
        assert_eq!(phi.field_norm(), rat(-1));
        assert!(phi.is_integral());
        assert!(fundamental_unit(FieldDesc::new(7).unwrap()).is_err());
    }

    #[test]
    fn square_unit_ratio_cases() {
        let w = square_unit_ratio(&fe2(3, 2), &fe2(1, 0)).unwrap();
        assert_eq!(w, Some(fe2(1, 1)));
        assert_eq!(
            square_unit_ratio(&fe2(1, 0), &fe2(1, 0)).unwrap(),
            Some(fe2(1, 0))
        );
        assert_eq!(square_unit_ratio(&fe2(1, 1), &fe2(1, 0)).unwrap(), None);
        assert!(square_unit_ratio(&fe2(1, 1), &fe2(0, 0)).is_err());
    }

    #[test]
    fn strip_examples() {
        let f2 = FieldDesc::new(2).unwrap();
        let got = strip_elements(&fe2(0, 0), &fe2(4, 0), &fe2(0, 0), &fe2(4, 0), f2);
        // Ascending by embedding: 2−√2 ≈ 0.586 comes before 1.
        let want = vec![fe2(2, -1), fe2(1, 0), fe2(2, 0), fe2(3, 0), fe2(2, 1)];
        assert_eq!(got, want);

        let f7 = FieldDesc::new(7).unwrap();
        let z = FElem::zero(7);
        let four = FElem::from_ints(7, 4, 0);
        let got = strip_elements(&z, &four, &z, &four, f7);
        assert_eq!(
            got,
            vec![
                FElem::from_ints(7, 1, 0),
                FElem::from_ints(7, 2, 0),
                FElem::from_ints(7, 3, 0)
            ]
        );

        let f326 = FieldDesc::new(326).unwrap();
        let got = strip_elements(
            &FElem::from_ints(326, 4, 0),
            &FElem::from_ints(326, 36, 0),
            &FElem::zero(326),
            &FElem::from_ints(326, 4, 0),
            f326,
        );
        assert!(got.is_empty());
    }

    #[test]
    fn strip_half_basis() {
        // d = 5: half-integer coordinates occur; the golden ratio lies in
        // (1, 2) with conjugate in (−1, 0).
        let f5 = FieldDesc::new(5).unwrap();
        let got = strip_elements(
            &FElem::from_ints(5, 1, 0),
            &FElem::from_ints(5, 2, 0),
            &FElem::from_ints(5, -1, 0),
            &FElem::from_ints(5, 0, 0),
            f5,
        );
        let phi = FElem::new(5, Rat::new(1.into(), 2.into()), Rat::new(1.into(), 2.into()));
        assert_eq!(got, vec![phi]);
    }

    #[test]
    fn gcd_and_divmod() {
        let x = fe2(6, 4);
        let y = fe2(2, 0);
        let (q, r) = odivmod(&x, &y).unwrap();
        assert_eq!(&(&y * &q) + &r, x);
        assert!(r.field_norm().abs() < y.field_norm().abs());
        let g = ogcd(&fe2(4, 0), &fe2(0, 3)).unwrap();
        // gcd(4, 3√2) is a unit times √2·... both share √2? 4 = √2⁴, 3√2 = 3·√2.
        assert_eq!(g.field_norm().abs(), rat(2));
        let (g2, s, t) = oxgcd(&fe2(4, 0), &fe2(0, 3)).unwrap();
        assert_eq!(&(&s * &fe2(4, 0)) + &(&t * &fe2(0, 3)), g2);
    }

    #[test]
    fn canonical_associate_examples() {
        // √2 is its own canonical associate: 2/|−2| = 1 ∈ [1, α₀²).
        assert_eq!(canonical_associate(&fe2(0, 1)).unwrap(), fe2(0, 1));
        assert_eq!(canonical_associate(&fe2(0, -1)).unwrap(), fe2(0, 1));
        // Unit class: canonical associate of any unit is 1.
        assert_eq!(canonical_associate(&fe2(3, 2)).unwrap(), fe2(1, 0));
        assert_eq!(canonical_associate(&fe2(-1, 1)).unwrap(), fe2(1, 0));
    }

    #[test]
    fn divisor_classes_of_two() {
        let divs = divisors_up_to_equivalence(&fe2(2, 0)).unwrap();
        assert_eq!(divs, vec![fe2(1, 0), fe2(2, 1), fe2(2, 0)]);
        assert_eq!(
            divisors_up_to_equivalence(&fe2(1, 0)).unwrap(),
            vec![fe2(1, 0)]
        );
        for t in &divs {
            assert!(t.field_norm() > rat(0));
            assert!(t.is_totally_positive());
        }
    }

    #[test]
    fn coset_reps_examples() {
        let reps = coset_representatives(&fe2(0, 1)).unwrap();
        assert_eq!(reps, vec![fe2(0, 0), fe2(1, 0)]);
        assert_eq!(coset_representatives(&fe2(1, 0)).unwrap(), vec![fe2(0, 0)]);
        let reps3 = coset_representatives(&fe2(3, 0)).unwrap();
        assert_eq!(reps3.len(), 9);
        // Pairwise non-congruent mod 3.
        for (i, p) in reps3.iter().enumerate() {
            for q in reps3.iter().skip(i + 1) {
                let diff = p - q;
                assert!(!diff.div_exact(&fe2(3, 0)).unwrap().is_integral());
            }
        }
    }

    #[test]
    fn embed_bounds_bracket_value() {
        let x = fe2(-7, 5);
        let (lo, hi) = x.embed_bounds();
        assert!(lo <= hi);
        let mid = x.embed_f64();
        assert!(lo.to_f64().unwrap() <= mid + 1e-9);
        assert!(hi.to_f64().unwrap() >= mid - 1e-9);
    }

    #[test]
    fn render_pair_convention() {
        assert_eq!(fe2(3, -2).render_pair(), "(3 -2)");
    }
}
