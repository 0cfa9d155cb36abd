//! Serialized forms of subspaces and families.
//!
//! A subspace serializes as {n, q, rows} with rows in canonical RREF order;
//! a family as {q, n, k, members}. Field elements appear as their integer
//! codes. Strict deserialization rejects anything not already canonical;
//! lenient deserialization re-canonicalizes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::subspace::{Ambient, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceRepr {
    pub n: usize,
    pub q: u64,
    pub rows: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRepr {
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub members: Vec<SubspaceRepr>,
}

impl SubspaceRepr {
    pub fn of(s: &Subspace) -> SubspaceRepr {
        SubspaceRepr {
            n: s.ambient().n(),
            q: s.ambient().q(),
            rows: s.rows().to_vec(),
        }
    }

    pub fn to_subspace(&self, strict: bool) -> Result<Subspace> {
        let amb = Ambient::new(self.n, self.q)?;
        let s = Subspace::canonicalize(&amb, &self.rows)?;
        if strict && (s.rows() != self.rows.as_slice()) {
            return Err(Error::NonCanonical(
                "subspace rows are not in reduced row echelon form".into(),
            ));
        }
        Ok(s)
    }
}

impl FamilyRepr {
    pub fn of(f: &Family) -> FamilyRepr {
        FamilyRepr {
            q: f.ambient().q(),
            n: f.ambient().n(),
            k: f.k(),
            members: f.members().iter().map(SubspaceRepr::of).collect(),
        }
    }

    pub fn to_family(&self, strict: bool) -> Result<Family> {
        let amb = Ambient::new(self.n, self.q)?;
        let mut members = Vec::with_capacity(self.members.len());
        for m in &self.members {
            if m.n != self.n || m.q != self.q {
                return Err(Error::Parse(format!(
                    "member ambient ({}, GF({})) disagrees with family ({}, GF({}))",
                    m.n, m.q, self.n, self.q
                )));
            }
            members.push(m.to_subspace(strict)?);
        }
        let family = Family::new(&amb, self.k, members.clone())?;
        if strict {
            if family.len() != members.len() {
                return Err(Error::NonCanonical(
                    "family contains duplicate members".into(),
                ));
            }
            if family.members() != members.as_slice() {
                return Err(Error::NonCanonical(
                    "family members are not in canonical order".into(),
                ));
            }
        }
        Ok(family)
    }
}
