//! Toric input data: lattice rank, ray generators, nef partitions, the
//! Picard-group presentation via the Smith form of the dual ray map, and
//! the induced superpotential and partition sums.
//!
//! Only rays and the lattice are represented; the maximal-cone structure
//! of the fan never enters any computation here.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::Error;
use crate::lattice::{self, IntMatrix, SnfDecomposition};
use crate::laurent::{ExpVec, LaurentPoly};

/// Set of 1-based ray indices.
pub type IndexSet = BTreeSet<usize>;

/// The ray data of a toric model: rank-n lattice and R primitive ray
/// generators spanning it rationally.
pub struct ToricModel {
    n: usize,
    rays: Vec<ExpVec>,
    /// Smith decomposition of the R x n matrix whose rows are the rays;
    /// this matrix represents the dual ray map, and its cokernel is the
    /// Picard presentation.
    ray_snf: SnfDecomposition,
}

impl ToricModel {
    pub fn new(n: usize, rays: Vec<ExpVec>) -> Result<Self, Error> {
        let issues = validate_rays(n, &rays);
        if !issues.is_empty() {
            return Err(Error::InvalidInput(issues.join("; ")));
        }
        let matrix = IntMatrix::from_exp_rows(&rays);
        let ray_snf = lattice::smith_normal_form(&matrix);
        if ray_snf.rank() < n {
            return Err(Error::InvalidInput(format!(
                "rays span rank {} < {}",
                ray_snf.rank(),
                n
            )));
        }
        Ok(ToricModel { n, rays, ray_snf })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    /// Ray generator by 1-based index.
    pub fn ray(&self, j: usize) -> &ExpVec {
        &self.rays[j - 1]
    }

    pub fn rays(&self) -> &[ExpVec] {
        &self.rays
    }

    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_exp_rows(&self.rays)
    }

    /// W = sum of z^{v_j} over all rays.
    pub fn superpotential(&self) -> LaurentPoly {
        let mut w = LaurentPoly::zero(self.n);
        for v in &self.rays {
            w.add_term(v.clone(), num_traits::One::one());
        }
        w
    }

    /// Sum of z^{v_j} over the rays indexed by `s`.
    pub fn partition_sum(&self, s: &IndexSet) -> Result<LaurentPoly, Error> {
        let mut g = LaurentPoly::zero(self.n);
        for &j in s {
            self.check_index(j)?;
            g.add_term(self.ray(j).clone(), num_traits::One::one());
        }
        Ok(g)
    }

    fn check_index(&self, j: usize) -> Result<(), Error> {
        if j == 0 || j > self.rays.len() {
            return Err(Error::InvalidInput(format!(
                "ray index {} out of range 1..={}",
                j,
                self.rays.len()
            )));
        }
        Ok(())
    }

    /// Divisor class of the indicator vector of `s` in the cokernel of the
    /// dual ray map, in Smith-canonical coordinates.
    pub fn class_of(&self, s: &IndexSet) -> Result<DivisorClass, Error> {
        let r = self.rays.len();
        let mut indicator = vec![BigInt::zero(); r];
        for &j in s {
            self.check_index(j)?;
            indicator[j - 1] += 1;
        }
        Ok(self.class_of_vector(&indicator))
    }

    fn class_of_vector(&self, b: &[BigInt]) -> DivisorClass {
        let y = self.ray_snf.u.mul_vec(b);
        let diag = self.ray_snf.diagonal();
        let coords = y
            .into_iter()
            .enumerate()
            .map(|(i, yi)| {
                if i < diag.len() && !diag[i].is_zero() {
                    ((yi % &diag[i]) + &diag[i]) % &diag[i]
                } else {
                    yi
                }
            })
            .collect();
        DivisorClass { coords }
    }

    /// The unique functional w with <w, v_j> = 1 on S\S', -1 on S'\S and 0
    /// elsewhere. Exists exactly when the two index sets have equal class.
    pub fn weight_vector(&self, s: &IndexSet, s_prime: &IndexSet) -> Result<ExpVec, Error> {
        for &j in s.iter().chain(s_prime) {
            self.check_index(j)?;
        }
        let pattern: Vec<BigInt> = (1..=self.rays.len())
            .map(|j| {
                let in_s = s.contains(&j);
                let in_sp = s_prime.contains(&j);
                BigInt::from(i64::from(in_s && !in_sp) - i64::from(in_sp && !in_s))
            })
            .collect();
        let x = lattice::solve(&self.ray_matrix(), &pattern).ok_or_else(|| {
            Error::InvalidInput(
                "no weight vector: the two index sets have different divisor classes".into(),
            )
        })?;
        let w = ExpVec::new(lattice::vec_big_to_i64(&x));
        // rays span rationally, so the solution is unique; re-check the
        // defining pattern anyway
        for (j, expect) in pattern.iter().enumerate() {
            debug_assert_eq!(BigInt::from(w.dot(&self.rays[j])), *expect);
        }
        Ok(w)
    }
}

/// A class in the Picard presentation, in Smith-canonical coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DivisorClass {
    coords: Vec<BigInt>,
}

impl DivisorClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }
}

/// Ray-level validation issues, one message per violation.
pub fn validate_rays(n: usize, rays: &[ExpVec]) -> Vec<String> {
    let mut issues = Vec::new();
    if n == 0 {
        issues.push("lattice rank must be positive".into());
        return issues;
    }
    for (idx, v) in rays.iter().enumerate() {
        if v.len() != n {
            issues.push(format!(
                "ray {} has length {} (expected {})",
                idx + 1,
                v.len(),
                n
            ));
            return issues;
        }
        if v.is_zero() {
            issues.push(format!("ray {} is zero", idx + 1));
        } else if v.content() != 1 {
            issues.push(format!(
                "ray {} is not primitive (content {})",
                idx + 1,
                v.content()
            ));
        }
    }
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            if rays[i] == rays[j] {
                issues.push(format!("rays {} and {} coincide", i + 1, j + 1));
            }
        }
    }
    if rays.len() <= n {
        issues.push(format!(
            "need more rays than the rank ({} rays, rank {})",
            rays.len(),
            n
        ));
    } else {
        let rank = lattice::smith_normal_form(&IntMatrix::from_exp_rows(rays)).rank();
        if rank < n {
            issues.push(format!("rays span rank {rank} < {n}"));
        }
    }
    issues
}

/// An ordered partition of the ray index set {1..R}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NefPartition {
    parts: Vec<IndexSet>,
}

impl NefPartition {
    pub fn new(parts: Vec<IndexSet>, num_rays: usize) -> Result<Self, Error> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for (i, part) in parts.iter().enumerate() {
            for &j in part {
                if j == 0 || j > num_rays {
                    return Err(Error::InvalidInput(format!(
                        "part {}: ray index {} out of range 1..={}",
                        i + 1,
                        j,
                        num_rays
                    )));
                }
                if !seen.insert(j) {
                    return Err(Error::InvalidInput(format!(
                        "not a partition: ray index {j} appears in more than one part"
                    )));
                }
            }
        }
        if seen.len() != num_rays {
            let missing: Vec<String> = (1..=num_rays)
                .filter(|j| !seen.contains(j))
                .map(|j| j.to_string())
                .collect();
            return Err(Error::InvalidInput(format!(
                "not a partition: ray indices {{{}}} are not covered",
                missing.join(",")
            )));
        }
        if parts.is_empty() {
            return Err(Error::InvalidInput("partition has no parts".into()));
        }
        Ok(NefPartition { parts })
    }

    /// Number of parts, c + 1.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of line bundles c (all parts except the last).
    pub fn codim(&self) -> usize {
        self.parts.len() - 1
    }

    /// Part by 1-based index.
    pub fn part(&self, i: usize) -> &IndexSet {
        &self.parts[i - 1]
    }

    pub fn parts(&self) -> &[IndexSet] {
        &self.parts
    }
}

/// Check that two partitions present the same line bundles: equal length
/// and classwise-equal parts 1..c (the last part then matches
/// automatically).
pub fn validate_pair(
    model: &ToricModel,
    first: &NefPartition,
    second: &NefPartition,
) -> Result<(), Error> {
    if first.len() != second.len() {
        return Err(Error::InvalidInput(format!(
            "partition length mismatch: {} vs {}",
            first.len(),
            second.len()
        )));
    }
    for i in 1..first.len() {
        let a = model.class_of(first.part(i))?;
        let b = model.class_of(second.part(i))?;
        if a != b {
            return Err(Error::InvalidInput(format!(
                "divisor class mismatch at part {i}"
            )));
        }
    }
    Ok(())
}
