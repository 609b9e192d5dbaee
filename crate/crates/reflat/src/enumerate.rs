//! Candidate generation: good factorizations, the short-edge / short-pair /
//! close-pair Gram-matrix templates, and discriminant-bound box queries.
//!
//! The geometry of a hyperbolic polygon bounds the pairwise inner products
//! of unit normals of consecutive-ish walls; over a real quadratic field
//! those bounds confine the relevant products z and their conjugates z̄ to
//! small boxes, so all candidate configurations arise by substituting box
//! points into closed-form templates.

use crate::hypgeom::{norm_ratio_cases, CornerType};
use crate::lattice::{conj_positive_definite, signature_of, LatticeError};
use crate::linalg::{det, is_integral_matrix, rank, FMatrix};
use crate::qring::{
    divisors_up_to_equivalence, fundamental_unit, rat, square_unit_ratio, strip_elements, FElem,
    FieldDesc, OElem, QringError, Rat,
};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum EnumError {
    #[error(transparent)]
    Qring(#[from] QringError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("bad input: {0}")]
    BadInput(String),
}

/// A factorization z = u·v with u, v totally positive and conj(uv) < 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodFactorization {
    pub u: OElem,
    pub v: OElem,
}

/// All good factorizations of z, one representative per equivalence class,
/// emitted in both orders (u, v) and (v, u) with exact duplicates removed.
/// Sorted by the embedding of u, then of v.
pub fn good_factorizations(z: &OElem) -> Result<Vec<GoodFactorization>, EnumError> {
    if !z.is_totally_positive() {
        return Err(EnumError::BadInput(format!(
            "good factorizations need totally positive z, got {}",
            z.render_pair()
        )));
    }
    let four = FElem::from_ints(z.d(), 4, 0);
    if (&z.conj() - &four).sign_exact() >= 0 {
        return Err(EnumError::BadInput(format!(
            "good factorizations need conj(z) < 4, got {}",
            z.render_pair()
        )));
    }
    let mut out: Vec<GoodFactorization> = Vec::new();
    for g in divisors_up_to_equivalence(z)? {
        let v = z.div_exact(&g)?;
        for (u, w) in [(g.clone(), v.clone()), (v, g.clone())] {
            let f = GoodFactorization { u, v: w };
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out.sort_by(|x, y| x.u.cmp_embed(&y.u).then_with(|| x.v.cmp_embed(&y.v)));
    Ok(out)
}

/// Positive (at the fixed embedding) divisors of n up to square-unit
/// equivalence: each totally positive class representative g together with
/// g·α₀.
pub fn positive_divisor_classes(n: &OElem) -> Result<Vec<OElem>, EnumError> {
    let alpha = fundamental_unit(FieldDesc::new(n.d())?)?;
    let mut out = Vec::new();
    for g in divisors_up_to_equivalence(n)? {
        out.push(g.clone());
        out.push(&g * &alpha);
    }
    Ok(out)
}

/// Certified rational upper bound for √r (r ≥ 0).
fn sqrt_upper(r: &Rat) -> Rat {
    if r.is_negative() {
        return Rat::from_integer(0.into());
    }
    let scale = BigInt::from(1_000_000i64);
    let scaled = (r.numer() * &scale * &scale) / r.denom(); // floor
    let root = scaled.sqrt() + 1; // ⌈√⌉ overshoot is fine
    Rat::new(root, scale)
}

/// Certified rational upper bound for 4K², K = 1+μ+μ′+2√(1+μ)√(1+μ′),
/// given the exact squared inner products μ², μ′².
pub fn k_constant_sq_bound(mu_sq: &FElem, mup_sq: &FElem) -> Rat {
    let mu_ub = sqrt_upper(&mu_sq.embed_bounds().1);
    let mup_ub = sqrt_upper(&mup_sq.embed_bounds().1);
    let one = Rat::from_integer(1.into());
    let prod_ub = (&one + &mu_ub) * (&one + &mup_ub);
    let k_ub = &one + &mu_ub + &mup_ub + Rat::from_integer(2.into()) * sqrt_upper(&prod_ub);
    Rat::from_integer(4.into()) * &k_ub * &k_ub
}

/// Configuration families, by which walls are adjacent to the short edge T.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigCase {
    ShortEdge,
    ShortPair,
    ClosePair,
}

/// Search cutoff for the CC′ box: an exact field element bounding 4K² from
/// above for each case (enlarging the box only adds candidates, never loses
/// any).
pub fn four_k_sq_cutoff(case: ConfigCase, d: u32) -> FElem {
    match case {
        ConfigCase::ShortEdge => FElem::from_ints(d, 196, 0),
        // 4(5+4√2)² = 228+160√2 ≈ 454.3; exact at d = 2, rational cover
        // otherwise.
        ConfigCase::ShortPair => {
            if d == 2 {
                FElem::from_ints(2, 228, 160)
            } else {
                FElem::from_ints(d, 455, 0)
            }
        }
        ConfigCase::ClosePair => FElem::from_ints(d, 900, 0),
    }
}

/// Outcome of the discriminant-bound box query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundStatus {
    Excluded,
    TriangleOnly,
    Possible,
}

/// Box-emptiness test for a squarefree d: the short-pair/close-pair AB box
/// is (4, 36) × (0, 4); the short-edge CC′ box is (0, 4(3+2√3)²) × (0, 4),
/// with 4(3+2√3)² = 84+48√3 ≈ 167.138 covered by the certified rational
/// bound 167139/1000.  A short-edge box containing only the rational points
/// {1, 2, 3} forces the chamber to be a triangle.
pub fn discriminant_bound_check(d: u32, case: ConfigCase) -> Result<BoundStatus, EnumError> {
    let f = FieldDesc::new(d)?;
    let zero = FElem::from_ints(d, 0, 0);
    let four = FElem::from_ints(d, 4, 0);
    match case {
        ConfigCase::ShortPair | ConfigCase::ClosePair => {
            let lo = four.clone();
            let hi = FElem::from_ints(d, 36, 0);
            let pts = strip_elements(&lo, &hi, &zero, &four, f);
            if pts.is_empty() {
                Ok(BoundStatus::Excluded)
            } else {
                Ok(BoundStatus::Possible)
            }
        }
        ConfigCase::ShortEdge => {
            let hi = FElem::new(d, Rat::new(167_139.into(), 1_000.into()), rat(0));
            let pts = strip_elements(&zero, &hi, &zero, &four, f);
            if pts.is_empty() {
                return Ok(BoundStatus::Excluded);
            }
            let triangle_only = pts.iter().all(|z| {
                z.is_rational()
                    && (*z == FElem::from_ints(d, 1, 0)
                        || *z == FElem::from_ints(d, 2, 0)
                        || *z == FElem::from_ints(d, 3, 0))
            });
            if triangle_only {
                Ok(BoundStatus::TriangleOnly)
            } else {
                Ok(BoundStatus::Possible)
            }
        }
    }
}

/// Which template produced a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigKind {
    ShortEdgeNonOrth,
    ShortEdgeOrth,
    ShortPairNonOrth,
    ShortPairOrth,
    ClosePair,
}

/// Generating parameters of a configuration (entries absent where the
/// template does not use them).
#[derive(Clone, Debug)]
pub struct ConfigParams {
    pub a: OElem,
    pub b: OElem,
    pub ap: Option<OElem>,
    pub bp: Option<OElem>,
    pub c: OElem,
    pub cp: OElem,
    pub u: OElem,
    pub beta: OElem,
    pub k: Option<OElem>,
    pub n: Option<OElem>,
    pub kp: Option<OElem>,
    pub np: Option<OElem>,
    pub gamma: Option<OElem>,
}

/// A candidate root configuration: the Gram matrix of the wall roots in
/// boundary order, plus the parameters that generated it.
#[derive(Clone, Debug)]
pub struct RootConfig {
    pub kind: ConfigKind,
    pub gram: FMatrix,
    pub params: ConfigParams,
}

impl RootConfig {
    /// Indices of the long-wall roots r, t, r′ within the Gram matrix.
    pub fn core_indices(&self) -> Vec<usize> {
        match self.kind {
            ConfigKind::ShortEdgeNonOrth | ConfigKind::ShortEdgeOrth => vec![0, 1, 2],
            ConfigKind::ShortPairNonOrth | ConfigKind::ShortPairOrth => vec![0, 2, 3],
            ConfigKind::ClosePair => vec![0, 2, 4],
        }
    }

    /// The 3×3 Gram of r, t, r′.
    pub fn core_gram(&self) -> FMatrix {
        let idx = self.core_indices();
        idx.iter()
            .map(|&i| idx.iter().map(|&j| self.gram[i][j].clone()).collect())
            .collect()
    }

    /// Wall order along the polygon boundary, as row indices.
    pub fn wall_order(&self) -> Vec<usize> {
        match self.kind {
            ConfigKind::ShortEdgeNonOrth | ConfigKind::ShortEdgeOrth => vec![0, 1, 2],
            // Rows are (r, s, t, r′); boundary order is r, s, t, r′.
            ConfigKind::ShortPairNonOrth | ConfigKind::ShortPairOrth => vec![0, 1, 2, 3],
            // Rows are (r, s, t, s′, r′).
            ConfigKind::ClosePair => vec![0, 1, 2, 3, 4],
        }
    }

    /// Canonical dedup key.
    pub fn dedup_key(&self) -> String {
        self.gram
            .iter()
            .flat_map(|row| row.iter().map(|x| x.render_pair()))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Why a parameter tuple was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reject {
    Compatibility,
    NNotIntegral,
    KNotDivisor,
    GammaGate,
    NotIntegral,
    NotRank3,
    Signature,
    ConjugateNotPd,
    LocallySimple,
}

#[derive(Clone, Debug)]
pub enum BuildOutcome {
    Accepted(Box<RootConfig>),
    Rejected(Reject),
}

fn neg(x: &FElem) -> FElem {
    -x
}

/// Consecutive walls must meet at one of the five allowed corner angles
/// with an allowed norm ratio ("locally simple").
fn locally_simple(gram: &FMatrix, order: &[usize]) -> bool {
    let d = gram[0][0].d();
    for w in order.windows(2) {
        let (i, j) = (w[0], w[1]);
        let ip = &gram[i][j];
        let c2 = match (ip * ip).div_exact(&(&gram[i][i] * &gram[j][j])) {
            Ok(c2) => c2,
            Err(_) => return false,
        };
        let ty = [
            CornerType::A1xA1,
            CornerType::A2,
            CornerType::B2,
            CornerType::G2,
            CornerType::I2_8,
        ]
        .into_iter()
        .find(|t| c2 == t.cos_sq(d));
        let Some(ty) = ty else { return false };
        if norm_ratio_cases(ty, &gram[i][i], &gram[j][j]).is_err() {
            return false;
        }
    }
    true
}

/// Conjugate positive semidefiniteness via non-negativity of all principal
/// minors of the conjugated matrix.
fn conj_psd(gram: &FMatrix) -> bool {
    let n = gram.len();
    let conj: FMatrix = gram
        .iter()
        .map(|r| r.iter().map(|x| x.conj()).collect())
        .collect();
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let minor: FMatrix = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| conj[i][j].clone()).collect())
            .collect();
        if det(&minor).sign_exact() < 0 {
            return false;
        }
    }
    true
}

/// Shared acceptance filter: integral entries, core of signature (2,1) with
/// positive definite conjugate, overall rank 3, locally simple.
fn accept(config: RootConfig) -> BuildOutcome {
    if !is_integral_matrix(&config.gram) {
        return BuildOutcome::Rejected(Reject::NotIntegral);
    }
    let core = config.core_gram();
    if det(&core).is_zero() {
        return BuildOutcome::Rejected(Reject::NotRank3);
    }
    if signature_of(&core) != (2, 1) {
        return BuildOutcome::Rejected(Reject::Signature);
    }
    if !conj_positive_definite(&core) {
        return BuildOutcome::Rejected(Reject::ConjugateNotPd);
    }
    if config.gram.len() > 3 {
        if rank(&config.gram) != 3 {
            return BuildOutcome::Rejected(Reject::NotRank3);
        }
        if !conj_psd(&config.gram) {
            return BuildOutcome::Rejected(Reject::ConjugateNotPd);
        }
    }
    if !locally_simple(&config.gram, &config.wall_order()) {
        return BuildOutcome::Rejected(Reject::LocallySimple);
    }
    BuildOutcome::Accepted(Box::new(config))
}

/// Checks the compatibility equation AB′C′ = A′BC·u² for the supplied square
/// unit, returning β = A′BC·u on success.
fn beta_of(
    a: &OElem,
    b: &OElem,
    ap: &OElem,
    bp: &OElem,
    c: &OElem,
    cp: &OElem,
    u: &OElem,
) -> Result<Option<OElem>, EnumError> {
    let lhs = &(a * bp) * cp;
    let base = &(ap * b) * c;
    let rhs = &base * &(u * u);
    if lhs != rhs {
        return Ok(None);
    }
    Ok(Some(&base * u))
}

/// Short-edge 3×3 template; (A′, B′) = (0, 0) selects the orthogonal
/// variant.  The caller supplies the square unit u witnessing the
/// compatibility equation (u = 1 when orthogonal).
pub fn build_short_edge(
    a: &OElem,
    b: &OElem,
    ap: &OElem,
    bp: &OElem,
    c: &OElem,
    cp: &OElem,
    u: &OElem,
) -> Result<BuildOutcome, EnumError> {
    let d = a.d();
    let orth = ap.is_zero() && bp.is_zero();
    let (gram, kind, beta) = if orth {
        let gram = vec![
            vec![
                FElem::from_ints(d, 2, 0) * (a * c),
                neg(&(&(a * b) * c)),
                neg(&(&(a * c) * cp)),
            ],
            vec![
                neg(&(&(a * b) * c)),
                FElem::from_ints(d, 2, 0) * (b * c),
                FElem::from_ints(d, 0, 0),
            ],
            vec![
                neg(&(&(a * c) * cp)),
                FElem::from_ints(d, 0, 0),
                FElem::from_ints(d, 2, 0) * (a * cp),
            ],
        ];
        (gram, ConfigKind::ShortEdgeOrth, FElem::from_ints(d, 0, 0))
    } else {
        let beta = match beta_of(a, b, ap, bp, c, cp, u)? {
            Some(beta) => beta,
            None => return Ok(BuildOutcome::Rejected(Reject::Compatibility)),
        };
        let gram = vec![
            vec![
                FElem::from_ints(d, 2, 0) * (a * bp),
                neg(&(&(a * b) * bp)),
                neg(&beta),
            ],
            vec![
                neg(&(&(a * b) * bp)),
                FElem::from_ints(d, 2, 0) * (b * bp),
                neg(&(&(ap * bp) * b)),
            ],
            vec![
                neg(&beta),
                neg(&(&(ap * bp) * b)),
                FElem::from_ints(d, 2, 0) * (ap * b),
            ],
        ];
        (gram, ConfigKind::ShortEdgeNonOrth, beta)
    };
    Ok(accept(RootConfig {
        kind,
        gram,
        params: ConfigParams {
            a: a.clone(),
            b: b.clone(),
            ap: (!orth).then(|| ap.clone()),
            bp: (!orth).then(|| bp.clone()),
            c: c.clone(),
            cp: cp.clone(),
            u: u.clone(),
            beta,
            k: None,
            n: None,
            kp: None,
            np: None,
            gamma: None,
        },
    }))
}

/// N = 4 + 4·(CC′+β+A′B′)/(AB−4); `None` when non-integral.
pub fn n_value(
    a: &OElem,
    b: &OElem,
    ap: &OElem,
    bp: &OElem,
    c: &OElem,
    cp: &OElem,
    beta: &OElem,
) -> Result<Option<OElem>, EnumError> {
    let d = a.d();
    let four = FElem::from_ints(d, 4, 0);
    let denom = &(a * b) - &four;
    if denom.is_zero() {
        return Ok(None);
    }
    let numer = &(&(c * cp) + beta) + &(ap * bp);
    let n = &four + &(&four * &numer.div_exact(&denom)?);
    if n.is_integral() {
        Ok(Some(n))
    } else {
        Ok(None)
    }
}

/// Short-pair 4×4 template with rows (r, s, t, r′); (A′, B′) = (0, 0)
/// selects the orthogonal variant.
#[allow(clippy::too_many_arguments)]
pub fn build_short_pair(
    a: &OElem,
    b: &OElem,
    ap: &OElem,
    bp: &OElem,
    c: &OElem,
    cp: &OElem,
    u: &OElem,
    k: &OElem,
) -> Result<BuildOutcome, EnumError> {
    let d = a.d();
    let zero = FElem::from_ints(d, 0, 0);
    let two = FElem::from_ints(d, 2, 0);
    let orth = ap.is_zero() && bp.is_zero();
    let beta = if orth {
        zero.clone()
    } else {
        match beta_of(a, b, ap, bp, c, cp, u)? {
            Some(beta) => beta,
            None => return Ok(BuildOutcome::Rejected(Reject::Compatibility)),
        }
    };
    let n = match n_value(a, b, ap, bp, c, cp, &beta)? {
        Some(n) => n,
        None => return Ok(BuildOutcome::Rejected(Reject::NNotIntegral)),
    };
    let n_over_k = n.div_exact(k)?;
    if !n_over_k.is_integral() {
        return Ok(BuildOutcome::Rejected(Reject::KNotDivisor));
    }
    let n_over_k2 = n_over_k.div_exact(k)?;
    let (gram, kind) = if orth {
        let s_norm = &two * &(&(a * cp) * &n_over_k2);
        let s_rp = neg(&(&(a * cp) * &n_over_k));
        let gram = vec![
            vec![
                &two * &(a * c),
                zero.clone(),
                neg(&(&(a * b) * c)),
                neg(&(&(a * c) * cp)),
            ],
            vec![zero.clone(), s_norm, zero.clone(), s_rp.clone()],
            vec![neg(&(&(a * b) * c)), zero.clone(), &two * &(b * c), zero.clone()],
            vec![neg(&(&(a * c) * cp)), s_rp, zero.clone(), &two * &(a * cp)],
        ];
        (gram, ConfigKind::ShortPairOrth)
    } else {
        let s_norm = &two * &(&(ap * b) * &n_over_k2);
        let s_rp = neg(&(&(ap * b) * &n_over_k));
        let gram = vec![
            vec![
                &two * &(a * bp),
                zero.clone(),
                neg(&(&(a * b) * bp)),
                neg(&beta),
            ],
            vec![zero.clone(), s_norm, zero.clone(), s_rp.clone()],
            vec![
                neg(&(&(a * b) * bp)),
                zero.clone(),
                &two * &(b * bp),
                neg(&(&(ap * bp) * b)),
            ],
            vec![neg(&beta), s_rp, neg(&(&(ap * bp) * b)), &two * &(ap * b)],
        ];
        (gram, ConfigKind::ShortPairNonOrth)
    };
    Ok(accept(RootConfig {
        kind,
        gram,
        params: ConfigParams {
            a: a.clone(),
            b: b.clone(),
            ap: (!orth).then(|| ap.clone()),
            bp: (!orth).then(|| bp.clone()),
            c: c.clone(),
            cp: cp.clone(),
            u: u.clone(),
            beta,
            k: Some(k.clone()),
            n: Some(n),
            kp: None,
            np: None,
            gamma: None,
        },
    }))
}

/// Close-pair 5×5 template with rows (r, s, t, s′, r′).
#[allow(clippy::too_many_arguments)]
pub fn build_close_pair(
    a: &OElem,
    b: &OElem,
    ap: &OElem,
    bp: &OElem,
    c: &OElem,
    cp: &OElem,
    u: &OElem,
    k: &OElem,
    kp: &OElem,
) -> Result<BuildOutcome, EnumError> {
    let d = a.d();
    let zero = FElem::from_ints(d, 0, 0);
    let two = FElem::from_ints(d, 2, 0);
    let four = FElem::from_ints(d, 4, 0);
    let beta = match beta_of(a, b, ap, bp, c, cp, u)? {
        Some(beta) => beta,
        None => return Ok(BuildOutcome::Rejected(Reject::Compatibility)),
    };
    let n = match n_value(a, b, ap, bp, c, cp, &beta)? {
        Some(n) => n,
        None => return Ok(BuildOutcome::Rejected(Reject::NNotIntegral)),
    };
    // N′ swaps primed and unprimed letters (β is symmetric under the swap).
    let np = match n_value(ap, bp, a, b, c, cp, &beta)? {
        Some(np) => np,
        None => return Ok(BuildOutcome::Rejected(Reject::NNotIntegral)),
    };
    let n_over_k = n.div_exact(k)?;
    let np_over_kp = np.div_exact(kp)?;
    if !n_over_k.is_integral() || !np_over_kp.is_integral() {
        return Ok(BuildOutcome::Rejected(Reject::KNotDivisor));
    }
    let n_over_k2 = n_over_k.div_exact(k)?;
    let np_over_kp2 = np_over_kp.div_exact(kp)?;
    // γ = (2β/(kk′))·(2 + β/CC′ − (2CC′+β)³/((AB−4)(A′B′−4)(CC′)²)).
    let cc = c * cp;
    let ab4 = &(a * b) - &four;
    let apbp4 = &(ap * bp) - &four;
    if ab4.is_zero() || apbp4.is_zero() || cc.is_zero() {
        return Ok(BuildOutcome::Rejected(Reject::GammaGate));
    }
    let t = &(&two * &cc) + &beta;
    let t3 = &(&t * &t) * &t;
    let inner = &(&two + &beta.div_exact(&cc)?)
        - &t3.div_exact(&(&(&ab4 * &apbp4) * &(&cc * &cc)))?;
    let gamma = (&(&two * &beta).div_exact(&(k * kp))?) * &inner;
    // Root conditions for s and s′: γ ∈ (s²/2)O and (s′²/2)O, i.e.
    // γk²/(A′BN) and γk′²/(AB′N′) integral.
    let g1 = gamma.div_exact(&(&(ap * b) * &n_over_k2))?;
    let g2 = gamma.div_exact(&(&(a * bp) * &np_over_kp2))?;
    if !g1.is_integral() || !g2.is_integral() {
        return Ok(BuildOutcome::Rejected(Reject::GammaGate));
    }
    let gram = vec![
        vec![
            &two * &(a * bp),
            zero.clone(),
            neg(&(&(a * b) * bp)),
            neg(&(&(a * bp) * &np_over_kp)),
            neg(&beta),
        ],
        vec![
            zero.clone(),
            &two * &(&(ap * b) * &n_over_k2),
            zero.clone(),
            gamma.clone(),
            neg(&(&(ap * b) * &n_over_k)),
        ],
        vec![
            neg(&(&(a * b) * bp)),
            zero.clone(),
            &two * &(b * bp),
            zero.clone(),
            neg(&(&(ap * bp) * b)),
        ],
        vec![
            neg(&(&(a * bp) * &np_over_kp)),
            gamma.clone(),
            zero.clone(),
            &two * &(&(a * bp) * &np_over_kp2),
            zero.clone(),
        ],
        vec![
            neg(&beta),
            neg(&(&(ap * b) * &n_over_k)),
            neg(&(&(ap * bp) * b)),
            zero.clone(),
            &two * &(ap * b),
        ],
    ];
    Ok(accept(RootConfig {
        kind: ConfigKind::ClosePair,
        gram,
        params: ConfigParams {
            a: a.clone(),
            b: b.clone(),
            ap: Some(ap.clone()),
            bp: Some(bp.clone()),
            c: c.clone(),
            cp: cp.clone(),
            u: u.clone(),
            beta,
            k: Some(k.clone()),
            n: Some(n),
            kp: Some(kp.clone()),
            np: Some(np),
            gamma: Some(gamma),
        },
    }))
}

/// Options for a full case enumeration.
#[derive(Clone, Debug, Default)]
pub struct EnumerateOptions {
    /// Restrict the CC′ product to these exact values (e.g. {1, 2, 3} for
    /// the triangle search).
    pub cc_values: Option<Vec<OElem>>,
    /// Shard (index, count) over the outer (A, B, A′, B′) loop.
    pub shard: Option<(usize, usize)>,
}

/// Enumerate all accepted configurations of a case, deduplicated by the
/// exact Gram matrix.
pub fn enumerate_case(
    f: FieldDesc,
    case: ConfigCase,
    opts: &EnumerateOptions,
) -> Result<Vec<RootConfig>, EnumError> {
    let d = f.d;
    let zero = FElem::from_ints(d, 0, 0);
    let four = FElem::from_ints(d, 4, 0);
    let box04 = strip_elements(&zero, &four, &zero, &four, f);
    let ab_zs: Vec<OElem> = match case {
        ConfigCase::ShortEdge => box04.clone(),
        _ => strip_elements(&four, &FElem::from_ints(d, 36, 0), &zero, &four, f),
    };
    let apbp_zs: Vec<OElem> = match case {
        ConfigCase::ClosePair => ab_zs.clone(),
        _ => box04,
    };
    let cc_lo = match case {
        ConfigCase::ShortEdge => zero.clone(),
        _ => four.clone(),
    };
    let cc_zs: Vec<OElem> = match &opts.cc_values {
        Some(vals) => vals.clone(),
        None => strip_elements(&cc_lo, &four_k_sq_cutoff(case, d), &zero, &four, f),
    };
    let mut ab_pairs: Vec<GoodFactorization> = Vec::new();
    for z in &ab_zs {
        ab_pairs.extend(good_factorizations(z)?);
    }
    let mut apbp_pairs: Vec<Option<GoodFactorization>> = Vec::new();
    if case != ConfigCase::ClosePair {
        apbp_pairs.push(None); // the orthogonal variant (A′, B′) = (0, 0)
    }
    for z in &apbp_zs {
        for gf in good_factorizations(z)? {
            apbp_pairs.push(Some(gf));
        }
    }
    let mut cc_pairs: Vec<GoodFactorization> = Vec::new();
    for z in &cc_zs {
        cc_pairs.extend(good_factorizations(z)?);
    }

    let mut out: Vec<RootConfig> = Vec::new();
    let mut seen: std::collections::HashSet<String> = std::collections::HashSet::new();
    let one = FElem::from_ints(d, 1, 0);
    let mut outer_index = 0usize;
    for ab in &ab_pairs {
        for apbp in &apbp_pairs {
            outer_index += 1;
            if let Some((shard, count)) = opts.shard {
                if outer_index % count != shard {
                    continue;
                }
            }
            for ccp in &cc_pairs {
                let (ap, bp) = match apbp {
                    Some(g) => (g.u.clone(), g.v.clone()),
                    None => (zero.clone(), zero.clone()),
                };
                // Find the square unit witnessing compatibility, if any.
                let u = if apbp.is_some() {
                    let lhs = &(&ab.u * &bp) * &ccp.v;
                    let rhs = &(&ap * &ab.v) * &ccp.u;
                    match square_unit_ratio(&lhs, &rhs)? {
                        Some(u) => u,
                        None => continue,
                    }
                } else {
                    one.clone()
                };
                let mut emit = |outcome: BuildOutcome, out: &mut Vec<RootConfig>| {
                    if let BuildOutcome::Accepted(cfg) = outcome {
                        if seen.insert(cfg.dedup_key()) {
                            out.push(*cfg);
                        }
                    }
                };
                match case {
                    ConfigCase::ShortEdge => {
                        let o = build_short_edge(&ab.u, &ab.v, &ap, &bp, &ccp.u, &ccp.v, &u)?;
                        emit(o, &mut out);
                    }
                    ConfigCase::ShortPair => {
                        let beta = if apbp.is_some() {
                            match beta_of(&ab.u, &ab.v, &ap, &bp, &ccp.u, &ccp.v, &u)? {
                                Some(b) => b,
                                None => continue,
                            }
                        } else {
                            zero.clone()
                        };
                        let n = match n_value(&ab.u, &ab.v, &ap, &bp, &ccp.u, &ccp.v, &beta)? {
                            Some(n) => n,
                            None => continue,
                        };
                        for k in positive_divisor_classes(&n)? {
                            let o = build_short_pair(
                                &ab.u, &ab.v, &ap, &bp, &ccp.u, &ccp.v, &u, &k,
                            )?;
                            emit(o, &mut out);
                        }
                    }
                    ConfigCase::ClosePair => {
                        if apbp.is_none() {
                            continue;
                        }
                        let beta =
                            match beta_of(&ab.u, &ab.v, &ap, &bp, &ccp.u, &ccp.v, &u)? {
                                Some(b) => b,
                                None => continue,
                            };
                        let n = match n_value(&ab.u, &ab.v, &ap, &bp, &ccp.u, &ccp.v, &beta)? {
                            Some(n) => n,
                            None => continue,
                        };
                        let np = match n_value(&ap, &bp, &ab.u, &ab.v, &ccp.u, &ccp.v, &beta)? {
                            Some(n) => n,
                            None => continue,
                        };
                        for k in positive_divisor_classes(&n)? {
                            for kp in positive_divisor_classes(&np)? {
                                let o = build_close_pair(
                                    &ab.u, &ab.v, &ap, &bp, &ccp.u, &ccp.v, &u, &k, &kp,
                                )?;
                                emit(o, &mut out);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe2(a: i64, b: i64) -> FElem {
        FElem::from_ints(2, a, b)
    }

    #[test]
    fn good_factorizations_of_two() {
        let gf = good_factorizations(&fe2(2, 0)).unwrap();
        let pairs: Vec<(FElem, FElem)> = gf.into_iter().map(|g| (g.u, g.v)).collect();
        assert_eq!(
            pairs,
            vec![
                (fe2(2, -1), fe2(2, 1)),
                (fe2(1, 0), fe2(2, 0)),
                (fe2(2, 0), fe2(1, 0)),
                (fe2(2, 1), fe2(2, -1)),
            ]
        );
    }

    #[test]
    fn good_factorizations_trivial_and_inert() {
        let gf = good_factorizations(&fe2(1, 0)).unwrap();
        assert_eq!(gf.len(), 1);
        assert_eq!((gf[0].u.clone(), gf[0].v.clone()), (fe2(1, 0), fe2(1, 0)));
        let gf = good_factorizations(&fe2(3, 0)).unwrap();
        let pairs: Vec<(FElem, FElem)> = gf.into_iter().map(|g| (g.u, g.v)).collect();
        assert_eq!(pairs, vec![(fe2(1, 0), fe2(3, 0)), (fe2(3, 0), fe2(1, 0))]);
        // Preconditions.
        assert!(good_factorizations(&fe2(0, 1)).is_err()); // not tot. pos.
        assert!(good_factorizations(&fe2(5, 0)).is_err()); // conj ≥ 4
    }

    #[test]
    fn k_constant_bounds() {
        let b = k_constant_sq_bound(&fe2(1, 0), &fe2(0, 0));
        assert!(b < Rat::from_integer(196.into()));
        assert!(b > Rat::new(93.into(), 1.into())); // 4(2+2√2)² ≈ 93.25
        let cutoff = four_k_sq_cutoff(ConfigCase::ShortPair, 2);
        assert_eq!(cutoff, fe2(228, 160));
    }

    #[test]
    fn discriminant_bounds_match_thresholds() {
        assert_eq!(
            discriminant_bound_check(2, ConfigCase::ShortEdge).unwrap(),
            BoundStatus::Possible
        );
        assert_eq!(
            discriminant_bound_check(2, ConfigCase::ShortPair).unwrap(),
            BoundStatus::Possible
        );
        // 326 ≡ 2 mod 4, > 324: the pair box is empty.
        assert_eq!(
            discriminant_bound_check(326, ConfigCase::ClosePair).unwrap(),
            BoundStatus::Excluded
        );
        // 27941 squarefree > 27935: short edge allows only triangles.
        assert_eq!(
            discriminant_bound_check(27941, ConfigCase::ShortEdge).unwrap(),
            BoundStatus::TriangleOnly
        );
        // Half-basis fields above their threshold are likewise triangle-only…
        assert_eq!(
            discriminant_bound_check(27933, ConfigCase::ShortEdge).unwrap(),
            BoundStatus::TriangleOnly
        );
        // …while small ones still admit irrational box points, e.g.
        // (11+√101)/2 ≈ 10.52 with conjugate ≈ 0.475.
        assert_eq!(
            discriminant_bound_check(101, ConfigCase::ShortEdge).unwrap(),
            BoundStatus::Possible
        );
        assert!(discriminant_bound_check(12, ConfigCase::ShortEdge).is_err()); // not squarefree
    }

    #[test]
    fn short_edge_template_example() {
        // A=1, B=2, A′=1, B′=2, C=C′=1, u=1: template value is fixed, but the
        // conjugate (= the matrix itself, all entries rational) is not
        // positive definite, so the tuple is rejected at that gate.
        let o = build_short_edge(
            &fe2(1, 0),
            &fe2(2, 0),
            &fe2(1, 0),
            &fe2(2, 0),
            &fe2(1, 0),
            &fe2(1, 0),
            &fe2(1, 0),
        )
        .unwrap();
        match o {
            BuildOutcome::Rejected(r) => assert_eq!(r, Reject::ConjugateNotPd),
            BuildOutcome::Accepted(_) => panic!("expected rejection"),
        }
        // The raw template (before filters) matches the closed form.
        let beta = beta_of(
            &fe2(1, 0),
            &fe2(2, 0),
            &fe2(1, 0),
            &fe2(2, 0),
            &fe2(1, 0),
            &fe2(1, 0),
            &fe2(1, 0),
        )
        .unwrap()
        .unwrap();
        assert_eq!(beta, fe2(2, 0));
        // Compatibility failure: C′/C ratio not a square unit.
        let o = build_short_edge(
            &fe2(1, 0),
            &fe2(2, 0),
            &fe2(1, 0),
            &fe2(2, 0),
            &fe2(1, 0),
            &fe2(3, 0),
            &fe2(1, 0),
        )
        .unwrap();
        assert!(matches!(o, BuildOutcome::Rejected(Reject::Compatibility)));
    }

    #[test]
    fn short_edge_orthogonal_variant_shape() {
        // Orthogonal template has a zero (t, r′) entry by construction;
        // verify against the closed form with accepted parameters.
        let zero = fe2(0, 0);
        let o = build_short_edge(
            &fe2(2, 1),
            &fe2(1, 0),
            &zero,
            &zero,
            &fe2(1, 0),
            &fe2(2, 0),
            &fe2(1, 0),
        )
        .unwrap();
        if let BuildOutcome::Accepted(cfg) = o {
            assert_eq!(cfg.kind, ConfigKind::ShortEdgeOrth);
            assert!(cfg.gram[1][2].is_zero());
        }
        // Whether accepted or not, the template entries obey
        // (−r·t)² = r²·t²·AB/4 (the Lemma-level identity).
        let a = fe2(2, 1);
        let b = fe2(1, 0);
        let c = fe2(1, 0);
        let rt = -(&(&a * &b) * &c);
        let r2 = fe2(2, 0) * (&a * &c);
        let t2 = fe2(2, 0) * (&b * &c);
        let lhs = &rt * &rt;
        let rhs = (&(&r2 * &t2) * &(&a * &b)).div_exact(&fe2(4, 0)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn enumerate_short_edge_small() {
        let f = FieldDesc::new(2).unwrap();
        let opts = EnumerateOptions {
            cc_values: Some(vec![fe2(1, 0), fe2(2, 0), fe2(3, 0)]),
            shard: None,
        };
        let configs = enumerate_case(f, ConfigCase::ShortEdge, &opts).unwrap();
        assert!(!configs.is_empty());
        for cfg in &configs {
            // Round-trip: core gram is the whole gram for triangles.
            assert_eq!(cfg.gram.len(), 3);
            assert_eq!(signature_of(&cfg.gram), (2, 1));
            assert!(conj_positive_definite(&cfg.gram));
        }
    }
}
