//! Laurent-polynomial mirrors from amenable collections: the mutation
//! chain that collapses each partition sum to a distinguished coordinate,
//! the unimodular subtorus basis, mirror extraction by restriction, and
//! mutation-equivalence certificates between mirrors of different nef
//! partitions.

use num_traits::{One, Signed};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::engine::{self, IdentityCheck, VerificationReport};
use crate::error::Error;
use crate::lattice::{self, IntMatrix};
use crate::laurent::{rational_pow, Coeff, ExpVec, LaurentPoly, RationalFn};
use crate::pullback::{self, BirationalMap, MutationStep, Step};
use crate::toric::{NefPartition, ToricModel};

/// Number of exact rational sample points for the mirror point oracle.
pub const MIRROR_ORACLE_SAMPLES: usize = 10;

/// A collection of functionals subordinate to a nef partition: u_i pairs to
/// -1 on its own part, to 0 on earlier parts, and nonnegatively on later
/// parts, together with a distinguished ray in each of the first c parts.
#[derive(Debug, Clone)]
pub struct AmenableCollection {
    /// u_1 .. u_c in the dual lattice.
    pub vectors: Vec<ExpVec>,
    /// Distinguished 1-based ray indices s_1 .. s_c with s_i in part i.
    pub distinguished: Vec<usize>,
}

impl AmenableCollection {
    pub fn codim(&self) -> usize {
        self.vectors.len()
    }
}

/// Check the amenability conditions by exact pairing against every ray.
/// Returns the itemized violations; empty means valid.
pub fn validate_amenable(
    model: &ToricModel,
    partition: &NefPartition,
    amenable: &AmenableCollection,
) -> Vec<String> {
    let mut issues = Vec::new();
    let c = partition.codim();
    if amenable.vectors.len() != c {
        issues.push(format!(
            "expected {} vectors (one per line bundle), got {}",
            c,
            amenable.vectors.len()
        ));
        return issues;
    }
    if amenable.distinguished.len() != c {
        issues.push(format!(
            "expected {} distinguished rays, got {}",
            c,
            amenable.distinguished.len()
        ));
        return issues;
    }
    for (idx, u) in amenable.vectors.iter().enumerate() {
        if u.len() != model.rank() {
            issues.push(format!(
                "vector {} has length {} (expected {})",
                idx + 1,
                u.len(),
                model.rank()
            ));
            return issues;
        }
    }
    for i in 1..=c {
        let s = amenable.distinguished[i - 1];
        if !partition.part(i).contains(&s) {
            issues.push(format!("distinguished ray {s} is not in part {i}"));
        }
    }
    for i in 1..=c {
        let u = &amenable.vectors[i - 1];
        for p in 1..=partition.len() {
            for &j in partition.part(p) {
                let pairing = u.dot(model.ray(j));
                if p == i && pairing != -1 {
                    issues.push(format!(
                        "vector {i} pairs to {pairing} with ray {j} of its own part (need -1)"
                    ));
                } else if p < i && pairing != 0 {
                    issues.push(format!(
                        "vector {i} pairs to {pairing} with ray {j} of earlier part {p} (need 0)"
                    ));
                } else if p > i && pairing < 0 {
                    issues.push(format!(
                        "vector {i} pairs to {pairing} with ray {j} of later part {p} (need >= 0)"
                    ));
                }
            }
        }
    }
    issues
}

fn require_amenable(
    model: &ToricModel,
    partition: &NefPartition,
    amenable: &AmenableCollection,
) -> Result<(), Error> {
    let issues = validate_amenable(model, partition, amenable);
    if issues.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInput(issues.join("; ")))
    }
}

/// The mutation chain to the coordinate subtorus, together with the factor
/// data it was built from.
#[derive(Debug, Clone)]
pub struct MirrorChain {
    pub map: BirationalMap,
    pub factors: Vec<LaurentPoly>,
}

/// Build the chain of mutations whose pullbacks send each partition sum to
/// the monomial of its distinguished ray. The factors are defined
/// inductively from the images of the earlier mutations; each factor is
/// runtime-verified to lie on its weight hyperplane and every image to
/// stay Laurent.
pub fn build_mirror_chain(
    model: &ToricModel,
    partition: &NefPartition,
    amenable: &AmenableCollection,
) -> Result<MirrorChain, Error> {
    require_amenable(model, partition, amenable)?;
    let c = partition.codim();
    let mut sums: Vec<LaurentPoly> = (1..=c)
        .map(|i| model.partition_sum(partition.part(i)))
        .collect::<Result<_, _>>()?;
    let mut steps = Vec::with_capacity(c);
    let mut factors = Vec::with_capacity(c);
    for i in 0..c {
        let s_ray = model.ray(amenable.distinguished[i]).clone();
        let factor = sums[i].shift(&s_ray.neg());
        let step =
            MutationStep::new(amenable.vectors[i].clone(), factor.clone(), true).map_err(|e| {
                Error::InvalidInput(format!(
                    "factor {} does not realize an amenable chain: {e}",
                    i + 1
                ))
            })?;
        for (t, g) in sums.iter_mut().enumerate() {
            let image = step.pullback_poly(g);
            *g = image.to_laurent().ok_or_else(|| {
                Error::InvalidInput(format!(
                    "mutation {} sends partition sum {} off the Laurent ring",
                    i + 1,
                    t + 1
                ))
            })?;
        }
        // the i-th sum must have collapsed to its distinguished monomial
        let expected = LaurentPoly::monomial(s_ray, Coeff::one());
        if sums[i] != expected {
            return Err(Error::Internal(format!(
                "partition sum {} did not collapse to its distinguished monomial",
                i + 1
            )));
        }
        steps.push(Step::Mutation(step));
        factors.push(factor);
    }
    Ok(MirrorChain {
        map: BirationalMap::from_steps(model.rank(), steps),
        factors,
    })
}

/// The adapted lattice basis: the distinguished rays followed by the duals
/// of an extension of the amenable functionals. Columns of the returned
/// matrix are the basis vectors; the matrix is verified unimodular and its
/// pairing matrix against the extended functionals lower triangular with
/// diagonal entries +-1.
pub fn subtorus_coordinates(
    model: &ToricModel,
    partition: &NefPartition,
    amenable: &AmenableCollection,
) -> Result<IntMatrix, Error> {
    require_amenable(model, partition, amenable)?;
    let n = model.rank();
    let c = amenable.codim();
    if c >= n {
        return Err(Error::InvalidInput(format!(
            "{c} line bundles leave no mirror variables in rank {n}"
        )));
    }
    let columns: Vec<Vec<num_bigint::BigInt>> = amenable
        .vectors
        .iter()
        .map(|u| lattice::vec_i64_to_big(u.entries()))
        .collect();
    let extended = lattice::extend_to_unimodular_basis(&columns, n).map_err(|e| {
        Error::InvalidInput(format!(
            "amenable vectors cannot be extended to a basis: {e}"
        ))
    })?;
    // rows of `functionals` are u_1 .. u_n
    let mut functionals = extended.transpose();

    // normalize the extension rows to vanish on the distinguished rays:
    // the c x c pairing block of the amenable rows against those rays is
    // unimodular (zero below the diagonal, -1 on it), so an integer
    // correction by amenable rows always exists
    if c > 0 {
        let mut block = IntMatrix::zero(c, c);
        for k in 0..c {
            for i in 0..c {
                let ray = model.ray(amenable.distinguished[i]);
                block.set(k, i, num_bigint::BigInt::from(amenable.vectors[k].dot(ray)));
            }
        }
        let block_t = block.transpose();
        for j in c..n {
            let pairings: Vec<num_bigint::BigInt> = (0..c)
                .map(|i| {
                    let ray = model.ray(amenable.distinguished[i]);
                    -num_bigint::BigInt::from(
                        ExpVec::new(lattice::vec_big_to_i64(&functionals.row(j))).dot(ray),
                    )
                })
                .collect();
            let correction = lattice::solve(&block_t, &pairings).ok_or_else(|| {
                Error::Internal("extension normalization has no integer solution".into())
            })?;
            for (k, a) in correction.iter().enumerate() {
                for col in 0..n {
                    let v = functionals.get(j, col)
                        + a * num_bigint::BigInt::from(amenable.vectors[k].entries()[col]);
                    functionals.set(j, col, v);
                }
            }
        }
    }
    let duals = lattice::inverse_unimodular(&functionals)?;

    let mut basis = IntMatrix::zero(n, n);
    for i in 0..c {
        let ray = model.ray(amenable.distinguished[i]);
        for r in 0..n {
            basis.set(r, i, num_bigint::BigInt::from(ray.entries()[r]));
        }
    }
    for j in c..n {
        for r in 0..n {
            basis.set(r, j, duals.get(r, j).clone());
        }
    }

    if !basis.det().abs().is_one() {
        return Err(Error::VerificationFailed(format!(
            "subtorus basis has determinant {}",
            basis.det()
        )));
    }
    // pairing of basis element i against functional j must vanish above
    // the diagonal and be +-1 on it
    let pairing = functionals.mul(&basis).transpose();
    for i in 0..n {
        if !pairing.get(i, i).abs().is_one() {
            return Err(Error::VerificationFailed(format!(
                "pairing matrix diagonal entry {} is {}",
                i,
                pairing.get(i, i)
            )));
        }
        for j in i + 1..n {
            if !num_traits::Zero::is_zero(pairing.get(i, j)) {
                return Err(Error::VerificationFailed(format!(
                    "pairing matrix entry ({i},{j}) = {} breaks triangularity",
                    pairing.get(i, j)
                )));
            }
        }
    }
    Ok(basis)
}

/// A mirror Laurent polynomial with the chain and basis that produced it.
#[derive(Debug, Clone)]
pub struct MirrorResult {
    /// Laurent polynomial in n - c variables.
    pub mirror: LaurentPoly,
    /// Adapted basis, columns = basis vectors.
    pub basis: IntMatrix,
    pub chain: MirrorChain,
}

/// Restrict a polynomial expressed in original exponents to the subtorus:
/// re-express the exponents in the adapted basis and set the first c
/// coordinates to 1.
pub fn restrict_poly(poly: &LaurentPoly, basis_inv: &IntMatrix, c: usize) -> LaurentPoly {
    let n = basis_inv.rows();
    let mut out = LaurentPoly::zero(n - c);
    for (e, coeff) in poly.terms() {
        let in_basis = basis_inv.mul_exp(e);
        let tail = ExpVec::new(in_basis.entries()[c..].to_vec());
        out.add_term(tail, coeff.clone());
    }
    out
}

/// Original coordinates of the point whose adapted-basis coordinates are
/// (1, .., 1, q).
pub fn lift_point(basis_inv: &IntMatrix, c: usize, q: &[Coeff]) -> Vec<Coeff> {
    let n = basis_inv.rows();
    let mut eta = vec![Coeff::one(); n];
    eta[c..].clone_from_slice(q);
    (0..n)
        .map(|i| {
            let mut acc = Coeff::one();
            for (k, eta_k) in eta.iter().enumerate() {
                let pow = i64::try_from(basis_inv.get(k, i)).expect("exponent overflow");
                acc *= rational_pow(eta_k, pow);
            }
            acc
        })
        .collect()
}

/// Value of the character of the lattice vector in column `col` of `basis`
/// at a point given in original coordinates.
fn character_value(point: &[Coeff], basis: &IntMatrix, col: usize) -> Coeff {
    let mut acc = Coeff::one();
    for (i, p) in point.iter().enumerate() {
        let pow = i64::try_from(basis.get(i, col)).expect("exponent overflow");
        acc *= rational_pow(p, pow);
    }
    acc
}

/// Run the chain on the superpotential, change to the adapted basis,
/// restrict to the subtorus, and verify the point-evaluation oracle.
pub fn extract_mirror(
    model: &ToricModel,
    partition: &NefPartition,
    amenable: &AmenableCollection,
    seed: u64,
) -> Result<MirrorResult, Error> {
    let chain = build_mirror_chain(model, partition, amenable)?;
    let basis = subtorus_coordinates(model, partition, amenable)?;
    let basis_inv = lattice::inverse_unimodular(&basis)?;
    let c = amenable.codim();

    let image = chain.map.pullback_poly(&model.superpotential());
    let image = image.to_laurent().ok_or_else(|| {
        Error::InvalidInput("pullback of the superpotential is not Laurent; chain invalid".into())
    })?;
    let mirror = restrict_poly(&image, &basis_inv, c);

    // forward point-map oracle: evaluate the chain from lifted points
    let w = model.superpotential();
    let point_map = chain.map.point_map();
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x6d697272);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < MIRROR_ORACLE_SAMPLES {
        attempts += 1;
        if attempts > MIRROR_ORACLE_SAMPLES * 20 {
            return Err(Error::PoleAtSample);
        }
        let q = pullback::sample_torus_point(&mut rng, model.rank() - c);
        let lifted = lift_point(&basis_inv, c, &q);
        let Some(mapped) = point_map.eval(&lifted) else {
            continue;
        };
        if w.eval(&mapped)? != mirror.eval(&q)? {
            return Err(Error::VerificationFailed(
                "mirror point oracle disagrees with the forward chain".into(),
            ));
        }
        accepted += 1;
    }

    Ok(MirrorResult {
        mirror,
        basis,
        chain,
    })
}

/// The verified equivalence between two mirrors: the composite pullback
/// operator, both mirror results, and the verification report.
#[derive(Debug)]
pub struct MirrorEquivalence {
    pub first: MirrorResult,
    pub second: MirrorResult,
    /// Composite operator: inverse first chain, then the partition map,
    /// then the second chain.
    pub composite: BirationalMap,
    pub report: VerificationReport,
    pub seed: u64,
}

/// Build and verify the volume-preserving map identifying the mirrors of
/// two nef partitions with amenable data: the composite sends the first
/// subtorus cut monomials to the second's, transports the first chain's
/// superpotential image to the second's, and restricts to an exact
/// identification of the two mirror polynomials, confirmed independently
/// by seeded point evaluation.
pub fn mirror_equivalence(
    model: &ToricModel,
    first: &NefPartition,
    amenable_first: &AmenableCollection,
    second: &NefPartition,
    amenable_second: &AmenableCollection,
    seed: u64,
) -> Result<MirrorEquivalence, Error> {
    let res_first = extract_mirror(model, first, amenable_first, seed)?;
    let res_second = extract_mirror(model, second, amenable_second, seed)?;
    let equivalence = engine::assemble_phi(model, first, second, seed)?;

    let mut composite = res_first.chain.map.inverse();
    composite.extend(&equivalence.map);
    composite.extend(&res_second.chain.map);

    let report = verify_mirror_equivalence(
        model,
        amenable_first,
        &res_first,
        amenable_second,
        &res_second,
        &composite,
        seed,
    )?;
    Ok(MirrorEquivalence {
        first: res_first,
        second: res_second,
        composite,
        report,
        seed,
    })
}

/// Verification half of the mirror equivalence, reusable by the
/// certificate replayer: all identities are recomputed from the supplied
/// pieces, nothing is trusted.
pub fn verify_mirror_equivalence(
    model: &ToricModel,
    amenable_first: &AmenableCollection,
    res_first: &MirrorResult,
    amenable_second: &AmenableCollection,
    res_second: &MirrorResult,
    composite: &BirationalMap,
    seed: u64,
) -> Result<VerificationReport, Error> {
    let mut report = VerificationReport::default();
    let n = model.rank();
    let c = amenable_first.codim();

    // subtorus transport: the first cut monomials map to the second's
    for i in 0..c {
        let from = LaurentPoly::monomial(
            model.ray(amenable_first.distinguished[i]).clone(),
            Coeff::one(),
        );
        let to = LaurentPoly::monomial(
            model.ray(amenable_second.distinguished[i]).clone(),
            Coeff::one(),
        );
        report.check_pullback(&format!("subtorus-cut-{}", i + 1), composite, &from, &to);
    }

    // transport of the chain images of the superpotential
    let w_first = res_first
        .chain
        .map
        .pullback_poly(&model.superpotential())
        .to_laurent()
        .ok_or_else(|| Error::VerificationFailed("first chain image not Laurent".into()))?;
    let w_second = res_second
        .chain
        .map
        .pullback_poly(&model.superpotential())
        .to_laurent()
        .ok_or_else(|| Error::VerificationFailed("second chain image not Laurent".into()))?;
    report.check_pullback("superpotential-transport", composite, &w_first, &w_second);

    // restricted identity: the second mirror is the first composed with
    // the induced map of the mirror tori
    let basis_inv_second = lattice::inverse_unimodular(&res_second.basis)?;
    let mut psi: Vec<RationalFn> = Vec::with_capacity(n - c);
    for k in c..n {
        let col = res_first.basis.col(k);
        let character =
            LaurentPoly::monomial(ExpVec::new(lattice::vec_big_to_i64(&col)), Coeff::one());
        let image = composite.pullback_poly(&character);
        let num = restrict_poly(image.num(), &basis_inv_second, c);
        let den = restrict_poly(image.den(), &basis_inv_second, c);
        psi.push(RationalFn::new(num, den).map_err(|_| {
            Error::VerificationFailed(format!(
                "mirror coordinate {} restricts to a zero denominator",
                k - c + 1
            ))
        })?);
    }
    let substituted = substitute(&res_first.mirror, &psi)?;
    let passed = substituted.eq_rational(&RationalFn::from_poly(res_second.mirror.clone()));
    report.checks.push(IdentityCheck {
        name: "mirror-identification".into(),
        passed,
        lhs: match substituted.to_laurent() {
            Some(p) => p.canonical_text(),
            None => format!(
                "({}) / ({})",
                substituted.num().canonical_text(),
                substituted.den().canonical_text()
            ),
        },
        rhs: res_second.mirror.canonical_text(),
    });

    // independent point oracle through the big torus
    if let Err(e) = mirror_point_oracle(
        model,
        res_first,
        amenable_second,
        res_second,
        composite,
        seed,
    ) {
        report.failures.push(format!("mirror point oracle: {e}"));
    }

    report.check_volume(composite, engine::VOLUME_SAMPLES, seed);
    Ok(report)
}

/// Substitute rational functions for the variables of a Laurent
/// polynomial, assembling the result over one common denominator: with
/// M_k the largest exponent magnitude of variable k, every term times
/// prod (N_k D_k)^{M_k} is a polynomial.
fn substitute(f: &LaurentPoly, psi: &[RationalFn]) -> Result<RationalFn, Error> {
    let k = psi.len();
    let zero_coord: Vec<bool> = psi.iter().map(|p| p.num().is_zero()).collect();
    for (j, p) in psi.iter().enumerate() {
        if p.num().is_zero() && f.terms().any(|(e, _)| e.entries()[j] < 0) {
            return Err(Error::VerificationFailed(format!(
                "substitution divides by the zero coordinate {}",
                j + 1
            )));
        }
    }
    // terms raising a zero coordinate to a positive power vanish; drop them
    // so the common denominator stays nonzero
    let f = LaurentPoly::from_terms(
        f.n_vars(),
        f.terms()
            .filter(|(e, _)| {
                e.entries()
                    .iter()
                    .zip(&zero_coord)
                    .all(|(&x, &z)| !z || x == 0)
            })
            .map(|(e, c)| (e.clone(), c.clone())),
    );
    let mut bounds = vec![0i64; k];
    for (e, _) in f.terms() {
        for (b, &x) in bounds.iter_mut().zip(e.entries()) {
            *b = (*b).max(x.abs());
        }
    }
    // power tables up to 2 * M_k
    let mut num_pows: Vec<Vec<LaurentPoly>> = Vec::with_capacity(k);
    let mut den_pows: Vec<Vec<LaurentPoly>> = Vec::with_capacity(k);
    for (j, p) in psi.iter().enumerate() {
        let cap = (2 * bounds[j]) as usize;
        let mut np = Vec::with_capacity(cap + 1);
        let mut dp = Vec::with_capacity(cap + 1);
        np.push(LaurentPoly::one(k));
        dp.push(LaurentPoly::one(k));
        for t in 1..=cap {
            np.push(np[t - 1].mul(p.num()));
            dp.push(dp[t - 1].mul(p.den()));
        }
        num_pows.push(np);
        den_pows.push(dp);
    }
    let mut numerator = LaurentPoly::zero(k);
    for (e, coeff) in f.terms() {
        let mut term = LaurentPoly::constant(k, coeff.clone());
        for (j, &exp) in e.entries().iter().enumerate() {
            let up = (bounds[j] + exp) as usize;
            let down = (bounds[j] - exp) as usize;
            term = term.mul(&num_pows[j][up]).mul(&den_pows[j][down]);
        }
        numerator = numerator.add(&term);
    }
    let mut denominator = LaurentPoly::one(k);
    for j in 0..k {
        let m = bounds[j] as usize;
        denominator = denominator.mul(&num_pows[j][m]).mul(&den_pows[j][m]);
    }
    RationalFn::new(numerator, denominator)
}

/// Evaluate the composite as a point map from the second subtorus and check
/// the two mirrors agree numerically: lift a sample, push it through the
/// composite, read off the first basis coordinates, and compare exact
/// values.
fn mirror_point_oracle(
    model: &ToricModel,
    res_first: &MirrorResult,
    amenable_second: &AmenableCollection,
    res_second: &MirrorResult,
    composite: &BirationalMap,
    seed: u64,
) -> Result<(), Error> {
    let n = model.rank();
    let c = amenable_second.codim();
    let basis_inv_second = lattice::inverse_unimodular(&res_second.basis)?;
    let point_map = composite.point_map();
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x657175);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < MIRROR_ORACLE_SAMPLES {
        attempts += 1;
        if attempts > MIRROR_ORACLE_SAMPLES * 20 {
            return Err(Error::PoleAtSample);
        }
        let q = pullback::sample_torus_point(&mut rng, n - c);
        let lifted = lift_point(&basis_inv_second, c, &q);
        let Some(image) = point_map.eval(&lifted) else {
            continue;
        };
        // the image must sit on the first subtorus
        let mut first_coords = Vec::with_capacity(n - c);
        let mut on_subtorus = true;
        for k in 0..n {
            let v = character_value(&image, &res_first.basis, k);
            if k < c {
                if !v.is_one() {
                    on_subtorus = false;
                    break;
                }
            } else {
                first_coords.push(v);
            }
        }
        if !on_subtorus {
            return Err(Error::VerificationFailed(
                "composite image leaves the first subtorus".into(),
            ));
        }
        let lhs = res_first.mirror.eval(&first_coords)?;
        let rhs = res_second.mirror.eval(&q)?;
        if lhs != rhs {
            return Err(Error::VerificationFailed(format!(
                "mirror values disagree at a sample: {lhs} vs {rhs}"
            )));
        }
        accepted += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::IndexSet;
    use num_bigint::BigInt;

    fn set(ids: &[usize]) -> IndexSet {
        ids.iter().copied().collect()
    }

    fn conic() -> (ToricModel, NefPartition, AmenableCollection) {
        let model = ToricModel::new(
            2,
            vec![
                ExpVec::new(vec![1, 0]),
                ExpVec::new(vec![0, 1]),
                ExpVec::new(vec![-1, -1]),
            ],
        )
        .unwrap();
        let partition = NefPartition::new(vec![set(&[1, 2]), set(&[3])], 3).unwrap();
        let amenable = AmenableCollection {
            vectors: vec![ExpVec::new(vec![-1, -1])],
            distinguished: vec![1],
        };
        (model, partition, amenable)
    }

    fn p4_cubic() -> (ToricModel, NefPartition, AmenableCollection) {
        let model = ToricModel::new(
            4,
            vec![
                ExpVec::new(vec![1, 0, 0, 0]),
                ExpVec::new(vec![0, 1, 0, 0]),
                ExpVec::new(vec![0, 0, 1, 0]),
                ExpVec::new(vec![0, 0, 0, 1]),
                ExpVec::new(vec![-1, -1, -1, -1]),
            ],
        )
        .unwrap();
        let partition = NefPartition::new(vec![set(&[1, 2, 3]), set(&[4, 5])], 5).unwrap();
        let amenable = AmenableCollection {
            vectors: vec![ExpVec::new(vec![-1, -1, -1, 0])],
            distinguished: vec![1],
        };
        (model, partition, amenable)
    }

    #[test]
    fn amenable_validation_examples() {
        let (model, partition, amenable) = p4_cubic();
        assert!(validate_amenable(&model, &partition, &amenable).is_empty());

        // zero pairing on the own part violates the -1 condition
        let bad = AmenableCollection {
            vectors: vec![ExpVec::new(vec![0, -1, -1, 0])],
            distinguished: vec![1],
        };
        let issues = validate_amenable(&model, &partition, &bad);
        assert!(issues.iter().any(|m| m.contains("need -1")));

        // wrong distinguished ray
        let bad = AmenableCollection {
            vectors: vec![ExpVec::new(vec![-1, -1, -1, 0])],
            distinguished: vec![4],
        };
        let issues = validate_amenable(&model, &partition, &bad);
        assert!(issues.iter().any(|m| m.contains("not in part 1")));
    }

    #[test]
    fn conic_chain_factor() {
        let (model, partition, amenable) = conic();
        let chain = build_mirror_chain(&model, &partition, &amenable).unwrap();
        // F_1 = z^{-v_1}(z^{v_1} + z^{v_2}) = 1 + x^{-1} y
        assert_eq!(chain.factors[0].canonical_text(), "1*(-1,1) + 1*(0,0)");
        // the chain pullback collapses the partition sum to the cut monomial
        let g = model.partition_sum(&set(&[1, 2])).unwrap();
        let image = chain.map.pullback_poly(&g).to_laurent().unwrap();
        assert_eq!(image.canonical_text(), "1*(1,0)");
    }

    #[test]
    fn conic_subtorus_basis() {
        let (model, partition, amenable) = conic();
        let basis = subtorus_coordinates(&model, &partition, &amenable).unwrap();
        assert!(basis.det().abs().is_one());
        assert_eq!(basis.col(0), lattice::vec_i64_to_big(model.ray(1).entries()));
    }

    #[test]
    fn conic_mirror_is_hand_derived_value() {
        // restricting the chain image of W to the subtorus gives
        // y + 3 + y^{-1}: the partition sum collapses to the cut coordinate
        // (value 1) and the last ray contributes (1+y)^2 / y.
        let (model, partition, amenable) = conic();
        let result = extract_mirror(&model, &partition, &amenable, 17).unwrap();
        let expected = LaurentPoly::from_terms(
            1,
            vec![
                (ExpVec::new(vec![-1]), Coeff::one()),
                (ExpVec::new(vec![0]), Coeff::from_integer(BigInt::from(3))),
                (ExpVec::new(vec![1]), Coeff::one()),
            ],
        );
        assert_eq!(result.mirror, expected);
    }

    #[test]
    fn literal_forward_chain_reproduces_displayed_rational_function() {
        // running the same factor with the opposite mutation sign yields the
        // rational function (1+y)^2 + y^{-1}(1+y)^{-2} after restriction; it
        // has a genuine pole on the subtorus, which is why the chain uses
        // the inverse sign.
        let (model, partition, amenable) = conic();
        let chain = build_mirror_chain(&model, &partition, &amenable).unwrap();
        let Step::Mutation(step) = &chain.map.steps()[0] else {
            panic!("expected a mutation step");
        };
        let forward = step.inverted(); // flips back to the forward sign
        let image = forward.pullback_poly(&model.superpotential());

        let basis = subtorus_coordinates(&model, &partition, &amenable).unwrap();
        let basis_inv = lattice::inverse_unimodular(&basis).unwrap();
        let num = restrict_poly(image.num(), &basis_inv, 1);
        let den = restrict_poly(image.den(), &basis_inv, 1);
        let restricted = RationalFn::new(num, den).unwrap();

        // (1+y)^2 + y^{-1}(1+y)^{-2}, assembled over the common denominator
        let one_plus_y = LaurentPoly::from_terms(
            1,
            vec![
                (ExpVec::new(vec![0]), Coeff::one()),
                (ExpVec::new(vec![1]), Coeff::one()),
            ],
        );
        let expected = RationalFn::from_poly(one_plus_y.pow(2)).add(
            &RationalFn::new(
                LaurentPoly::monomial(ExpVec::new(vec![-1]), Coeff::one()),
                one_plus_y.pow(2),
            )
            .unwrap(),
        );
        assert!(restricted.eq_rational(&expected));
        assert!(restricted.to_laurent().is_none());
    }

    #[test]
    fn trivial_codim_zero_mirror_is_superpotential() {
        let model = ToricModel::new(
            2,
            vec![
                ExpVec::new(vec![1, 0]),
                ExpVec::new(vec![0, 1]),
                ExpVec::new(vec![-1, -1]),
            ],
        )
        .unwrap();
        let partition = NefPartition::new(vec![set(&[1, 2, 3])], 3).unwrap();
        let amenable = AmenableCollection {
            vectors: vec![],
            distinguished: vec![],
        };
        let result = extract_mirror(&model, &partition, &amenable, 3).unwrap();
        assert_eq!(result.mirror, model.superpotential());
        assert!(result.chain.map.is_identity());
    }

    #[test]
    fn p4_cubic_mirror() {
        let (model, partition, amenable) = p4_cubic();
        let result = extract_mirror(&model, &partition, &amenable, 23).unwrap();
        assert_eq!(result.mirror.n_vars(), 3);
        // spot check against the superpotential through the forward chain
        let w = model.superpotential();
        let basis_inv = lattice::inverse_unimodular(&result.basis).unwrap();
        let q = vec![
            Coeff::new(BigInt::from(2), BigInt::from(3)),
            Coeff::new(BigInt::from(-1), BigInt::from(2)),
            Coeff::new(BigInt::from(5), BigInt::from(4)),
        ];
        let lifted = lift_point(&basis_inv, 1, &q);
        let mapped = result.chain.map.point_image(&lifted).unwrap();
        assert_eq!(w.eval(&mapped).unwrap(), result.mirror.eval(&q).unwrap());
    }

    #[test]
    fn rank_bound_is_enforced() {
        let model =
            ToricModel::new(1, vec![ExpVec::new(vec![1]), ExpVec::new(vec![-1])]).unwrap();
        let partition = NefPartition::new(vec![set(&[1]), set(&[2])], 2).unwrap();
        let amenable = AmenableCollection {
            vectors: vec![ExpVec::new(vec![-1])],
            distinguished: vec![1],
        };
        assert!(matches!(
            subtorus_coordinates(&model, &partition, &amenable),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn identity_mirror_equivalence() {
        let (model, partition, amenable) = p4_cubic();
        let eq =
            mirror_equivalence(&model, &partition, &amenable, &partition, &amenable, 29).unwrap();
        assert!(eq.report.all_passed());
        assert_eq!(eq.first.mirror, eq.second.mirror);
    }
}
