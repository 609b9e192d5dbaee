//! Embedded catalog of the classified rank-3 reflective lattices over
//! Z[√2] with strongly squarefree determinant: Gram matrices, simple-root
//! systems with norms, boundary angle strings, and determinant data.
//!
//! Entries whose angle string carries a symmetry exponent, e.g.
//! `(2222222222)^2`, list one period of the root system; the full boundary
//! is the orbit under the chamber symmetry.  All other entries list the
//! complete closed chain.

use crate::hypgeom::{classify_corner, HypError, Root, RootChain};
use crate::lattice::{det_matches_up_to_square_unit, GramLattice, LatticeError};
use crate::linalg::FVec;
use crate::qring::{FElem, FieldDesc, QringError};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error(transparent)]
    Qring(#[from] QringError),
    #[error(transparent)]
    Hyp(#[from] HypError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("catalog parse failure: {0}")]
    Parse(String),
    #[error("entry {entry} failed verification: {detail}")]
    Verify { entry: String, detail: String },
}

/// One catalog entry; integer pairs (a, b) stand for a + b√2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub family: String,
    /// Generator of the determinant ideal.
    pub det: [i64; 2],
    /// Rational field norm of the determinant generator.
    pub det_norm: i64,
    /// Corner angle string; `(…)^k` marks a chamber symmetry of order k,
    /// with one period of roots listed.
    pub angle_string: String,
    pub gram: Vec<Vec<[i64; 2]>>,
    pub roots: Vec<Vec<[i64; 2]>>,
    pub norms: Vec<[i64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Catalog {
    pub version: u32,
    pub d: u32,
    pub entries: Vec<CatalogEntry>,
}

static CATALOG: OnceLock<Catalog> = OnceLock::new();

/// The embedded catalog (24 entries over Z[√2]).
pub fn catalog() -> &'static Catalog {
    CATALOG.get_or_init(|| {
        serde_json::from_str(include_str!("../data/appendix.json"))
            .expect("embedded catalog parses")
    })
}

impl CatalogEntry {
    /// True when only one period of the boundary is listed.
    pub fn is_period(&self) -> bool {
        self.angle_string.starts_with('(')
    }

    /// The angle characters of one period (or of the whole boundary).
    pub fn period_angles(&self) -> Vec<u32> {
        self.angle_string
            .chars()
            .filter(|c| c.is_ascii_digit())
            .map(|c| c.to_digit(10).unwrap())
            .collect()
    }

    pub fn lattice(&self) -> Result<GramLattice, DatasetError> {
        let d = catalog_d();
        let f = FieldDesc::new(d)?;
        let gram = self
            .gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&[a, b]| FElem::from_ints(d, a, b))
                    .collect()
            })
            .collect();
        Ok(GramLattice::new(f, gram)?)
    }

    pub fn root_vectors(&self) -> Vec<FVec> {
        let d = catalog_d();
        self.roots
            .iter()
            .map(|v| v.iter().map(|&[a, b]| FElem::from_ints(d, a, b)).collect())
            .collect()
    }

    /// Roots with their stated norms cross-checked against the Gram matrix.
    pub fn checked_roots(&self, l: &GramLattice) -> Result<Vec<Root>, DatasetError> {
        let d = catalog_d();
        let mut out = Vec::new();
        for (i, v) in self.root_vectors().into_iter().enumerate() {
            let r = Root::new(v, l).map_err(|e| DatasetError::Verify {
                entry: self.label(),
                detail: format!("listed vector {i} is not a root: {e}"),
            })?;
            let stated = FElem::from_ints(d, self.norms[i][0], self.norms[i][1]);
            if r.norm_sq != stated {
                return Err(DatasetError::Verify {
                    entry: self.label(),
                    detail: format!(
                        "root {i} has norm {}, catalog states {}",
                        r.norm_sq.render_pair(),
                        stated.render_pair()
                    ),
                });
            }
            out.push(r);
        }
        Ok(out)
    }

    pub fn label(&self) -> String {
        format!("{} {}", self.family, self.angle_string)
    }
}

fn catalog_d() -> u32 {
    catalog().d
}

/// Full verification of one entry: the listed vectors are roots with the
/// stated norms, the determinant generator and its rational norm match the
/// Gram matrix up to square units, consecutive corners reproduce the angle
/// string, and the listed roots form a valid chain (closed for complete
/// entries, open for one-period entries).
pub fn verify_entry(entry: &CatalogEntry) -> Result<(), DatasetError> {
    let l = entry.lattice()?;
    let fail = |detail: String| DatasetError::Verify {
        entry: entry.label(),
        detail,
    };

    let d = catalog_d();
    let published = FElem::from_ints(d, entry.det[0], entry.det[1]);
    if !det_matches_up_to_square_unit(&l, &published) {
        return Err(fail("determinant generator does not match the Gram matrix".into()));
    }
    let norm = published.field_norm();
    if norm != crate::qring::rat(entry.det_norm) {
        return Err(fail(format!(
            "determinant norm {} does not match stated {}",
            norm, entry.det_norm
        )));
    }

    let roots = entry.checked_roots(&l)?;
    let angles = entry.period_angles();
    let closed = !entry.is_period();
    let n = roots.len();
    let corners = if closed { n } else { n - 1 };
    if closed && angles.len() != n {
        return Err(fail("angle string length does not match root count".into()));
    }
    for i in 0..corners {
        let j = (i + 1) % n;
        let m = classify_corner(&roots[i], &roots[j], &l)
            .map(|t| t.m())
            .ok_or_else(|| fail(format!("roots {i}, {j} do not form a corner")))?;
        if m != angles[i] {
            return Err(fail(format!(
                "corner {i} has order {m}, angle string states {}",
                angles[i]
            )));
        }
    }
    let chain = RootChain {
        roots,
        closed,
    };
    chain
        .validate(&l)
        .map_err(|e| fail(format!("chain condition: {e}")))?;
    Ok(())
}

/// Verifies every catalog entry; returns the per-entry labels checked.
pub fn verify_catalog() -> Result<Vec<String>, DatasetError> {
    let mut labels = Vec::new();
    for entry in &catalog().entries {
        verify_entry(entry)?;
        labels.push(entry.label());
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shape() {
        let c = catalog();
        assert_eq!(c.version, 1);
        assert_eq!(c.d, 2);
        assert_eq!(c.entries.len(), 24);
        let fams: Vec<usize> = ["Triangles", "Undecagons", "Icosagons", "24-gons"]
            .iter()
            .map(|f| c.entries.iter().filter(|e| &e.family == f).count())
            .collect();
        assert_eq!(fams, vec![3, 8, 8, 5]);
    }

    #[test]
    fn all_entries_verify() {
        let labels = verify_catalog().expect("catalog verifies");
        assert_eq!(labels.len(), 24);
    }

    #[test]
    fn mutated_entry_fails_verification() {
        let mut entry = catalog().entries[0].clone();
        entry.roots[0][1][0] += 1;
        assert!(verify_entry(&entry).is_err());
    }

    #[test]
    fn period_convention() {
        for e in &catalog().entries {
            match e.family.as_str() {
                "Icosagons" => {
                    assert!(e.is_period());
                    assert_eq!(e.roots.len(), 10);
                    assert_eq!(e.period_angles().len(), 10);
                }
                "24-gons" => {
                    assert!(e.is_period());
                    assert_eq!(e.roots.len(), 12);
                }
                _ => assert!(!e.is_period()),
            }
        }
    }
}
