//! Birational self-maps of the torus as composable pullback operators:
//! signed algebraic mutations and lattice automorphisms (integral
//! reflections), with exact log-Jacobian volume checking.
//!
//! The pullback operator is the primary semantics. A map is an ordered
//! list of steps; applying the map to a function applies each step's
//! pullback in list order. The underlying point map is realized only
//! through exact evaluation of the coordinate pullbacks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::Error;
use crate::lattice::{self, IntMatrix};
use crate::laurent::{Coeff, ExpVec, LaurentPoly, RationalFn};

/// An algebraic mutation with weight vector `w` and factor `F` supported on
/// the hyperplane w = 0. The forward pullback sends z^v to z^v F^{-<w,v>};
/// with the `inverse` flag set the sign flips, giving the inverse operator
/// without ever inverting the factor as a polynomial.
#[derive(Clone, Debug)]
pub struct MutationStep {
    weight: ExpVec,
    factor: LaurentPoly,
    inverse: bool,
}

impl MutationStep {
    pub fn new(weight: ExpVec, factor: LaurentPoly, inverse: bool) -> Result<Self, Error> {
        if factor.is_zero() {
            return Err(Error::InvalidInput("mutation factor is zero".into()));
        }
        if weight.len() != factor.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: weight.len(),
                got: factor.n_vars(),
            });
        }
        for (e, _) in factor.terms() {
            if weight.dot(e) != 0 {
                return Err(Error::InvalidInput(format!(
                    "factor term {:?} does not lie on the weight hyperplane",
                    e
                )));
            }
        }
        Ok(MutationStep {
            weight,
            factor,
            inverse,
        })
    }

    pub fn weight(&self) -> &ExpVec {
        &self.weight
    }

    pub fn factor(&self) -> &LaurentPoly {
        &self.factor
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn inverted(&self) -> MutationStep {
        MutationStep {
            weight: self.weight.clone(),
            factor: self.factor.clone(),
            inverse: !self.inverse,
        }
    }

    fn exponent_sign(&self) -> i64 {
        if self.inverse {
            1
        } else {
            -1
        }
    }

    /// Monomial-wise substitution z^v -> z^v F^{sign * <w,v>} assembled over
    /// a common denominator.
    pub fn pullback_poly(&self, f: &LaurentPoly) -> RationalFn {
        let sign = self.exponent_sign();
        let groups = f.split_by_pairing(&self.weight);
        if groups.is_empty() {
            return RationalFn::from_poly(LaurentPoly::zero(f.n_vars()));
        }
        let powers: Vec<(i64, &LaurentPoly)> = groups
            .iter()
            .map(|(k, part)| (sign * k, part))
            .collect();
        let min_pow = powers.iter().map(|(p, _)| *p).min().unwrap();
        let mut num = LaurentPoly::zero(f.n_vars());
        for (p, part) in &powers {
            num = num.add(&part.mul(&self.factor.pow((p - min_pow) as u32)));
        }
        let result = if min_pow >= 0 {
            RationalFn::from_poly(num.mul(&self.factor.pow(min_pow as u32)))
        } else {
            RationalFn::new(num, self.factor.pow((-min_pow) as u32)).expect("factor nonzero")
        };
        result.normalized()
    }

    pub fn pullback(&self, f: &RationalFn) -> RationalFn {
        let num = self.pullback_poly(f.num());
        let den = self.pullback_poly(f.den());
        RationalFn::new(
            num.num().mul(den.den()),
            num.den().mul(den.num()),
        )
        .expect("denominator nonzero under ring map")
        .normalized()
    }
}

/// A lattice automorphism acting on functions by exponent transport:
/// z^v -> z^{A v}. Requires |det A| = 1.
#[derive(Clone, Debug)]
pub struct LatticeAutoStep {
    matrix: IntMatrix,
}

impl LatticeAutoStep {
    pub fn new(matrix: IntMatrix) -> Result<Self, Error> {
        if !matrix.is_square() {
            return Err(Error::InvalidInput("automorphism matrix not square".into()));
        }
        if !matrix.det().abs().is_one() {
            return Err(Error::InvalidInput(
                "automorphism matrix is not unimodular".into(),
            ));
        }
        Ok(LatticeAutoStep { matrix })
    }

    pub fn identity(n: usize) -> Self {
        LatticeAutoStep {
            matrix: IntMatrix::identity(n),
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn det(&self) -> i64 {
        i64::try_from(&self.matrix.det()).expect("unimodular determinant")
    }

    pub fn inverted(&self) -> LatticeAutoStep {
        LatticeAutoStep {
            matrix: lattice::inverse_unimodular(&self.matrix).expect("unimodular"),
        }
    }

    pub fn apply_exp(&self, v: &ExpVec) -> ExpVec {
        self.matrix.mul_exp(v)
    }

    pub fn pullback_poly(&self, f: &LaurentPoly) -> LaurentPoly {
        f.map_exponents(|e| self.apply_exp(e))
    }

    pub fn pullback(&self, f: &RationalFn) -> RationalFn {
        RationalFn::new(self.pullback_poly(f.num()), self.pullback_poly(f.den()))
            .expect("automorphism preserves nonzeroness")
    }
}

/// The unique integral reflection fixing the hyperplane w = 0 and swapping
/// u+ and u-: T(v) = v + <w,v>(u- - u+). An involution of determinant -1.
pub fn reflection_from(
    w: &ExpVec,
    u_plus: &ExpVec,
    u_minus: &ExpVec,
) -> Result<LatticeAutoStep, Error> {
    if w.dot(u_plus) != 1 || w.dot(u_minus) != -1 {
        return Err(Error::InvalidInput(format!(
            "reflection data must pair to +1/-1 with the weight (got {}, {})",
            w.dot(u_plus),
            w.dot(u_minus)
        )));
    }
    let n = w.len();
    let delta = u_minus.sub(u_plus);
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j) + BigInt::from(delta.entries()[i]) * BigInt::from(w.entries()[j]);
            m.set(i, j, v);
        }
    }
    LatticeAutoStep::new(m)
}

/// One step of a composed birational map.
#[derive(Clone, Debug)]
pub enum Step {
    Mutation(MutationStep),
    Automorphism(LatticeAutoStep),
}

impl Step {
    pub fn pullback(&self, f: &RationalFn) -> RationalFn {
        match self {
            Step::Mutation(m) => m.pullback(f),
            Step::Automorphism(a) => a.pullback(f),
        }
    }

    /// Signed lattice determinant of the step: +1 for any mutation, det A
    /// for an automorphism.
    pub fn structural_det(&self) -> i64 {
        match self {
            Step::Mutation(_) => 1,
            Step::Automorphism(a) => a.det(),
        }
    }

    pub fn inverted(&self) -> Step {
        match self {
            Step::Mutation(m) => Step::Mutation(m.inverted()),
            Step::Automorphism(a) => Step::Automorphism(a.inverted()),
        }
    }
}

/// An ordered list of steps acting by pullback; the first element is
/// applied first to the input function.
#[derive(Clone, Debug)]
pub struct BirationalMap {
    n_vars: usize,
    steps: Vec<Step>,
}

impl BirationalMap {
    pub fn identity(n_vars: usize) -> Self {
        BirationalMap {
            n_vars,
            steps: Vec::new(),
        }
    }

    pub fn from_steps(n_vars: usize, steps: Vec<Step>) -> Self {
        BirationalMap { n_vars, steps }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    pub fn extend(&mut self, other: &BirationalMap) {
        assert_eq!(self.n_vars, other.n_vars, "dimension mismatch");
        self.steps.extend(other.steps.iter().cloned());
    }

    pub fn pullback(&self, f: &RationalFn) -> RationalFn {
        let mut acc = f.clone();
        for step in &self.steps {
            acc = step.pullback(&acc);
        }
        acc
    }

    pub fn pullback_poly(&self, f: &LaurentPoly) -> RationalFn {
        self.pullback(&RationalFn::from_poly(f.clone()))
    }

    /// The formal inverse: reversed steps, mutation flags toggled,
    /// automorphisms inverted.
    pub fn inverse(&self) -> BirationalMap {
        BirationalMap {
            n_vars: self.n_vars,
            steps: self.steps.iter().rev().map(Step::inverted).collect(),
        }
    }

    /// Product over steps of the signed lattice determinants.
    pub fn structural_det(&self) -> i64 {
        self.steps.iter().map(Step::structural_det).product()
    }

    /// Pullbacks of the coordinate characters z^{e_j}.
    pub fn coordinate_pullbacks(&self) -> Vec<RationalFn> {
        (0..self.n_vars)
            .map(|j| self.pullback_poly(&LaurentPoly::var(self.n_vars, j)))
            .collect()
    }

    /// Precompute the coordinate pullbacks for repeated point evaluation.
    pub fn point_map(&self) -> PointMap {
        PointMap {
            coords: self.coordinate_pullbacks(),
        }
    }

    /// Image of a torus point under the underlying point map, by exact
    /// evaluation of the coordinate pullbacks. None when the point hits a
    /// pole or a zero of a coordinate function. Callers evaluating many
    /// points should hold a `point_map` instead.
    pub fn point_image(&self, point: &[Coeff]) -> Option<Vec<Coeff>> {
        self.point_map().eval(point)
    }
}

/// The underlying point map of a composed pullback operator, realized by
/// exact evaluation of the precomputed coordinate pullbacks.
pub struct PointMap {
    coords: Vec<RationalFn>,
}

impl PointMap {
    pub fn eval(&self, point: &[Coeff]) -> Option<Vec<Coeff>> {
        let mut out = Vec::with_capacity(self.coords.len());
        for c in &self.coords {
            match c.eval(point) {
                Ok(v) if !v.is_zero() => out.push(v),
                _ => return None,
            }
        }
        Some(out)
    }
}

/// Outcome of an exact volume check: the constant log-Jacobian determinant,
/// its structural prediction, and the number of samples that agreed.
#[derive(Clone, Debug)]
pub struct VolumeCheck {
    pub determinant: i64,
    pub structural: i64,
    pub samples: usize,
}

impl VolumeCheck {
    pub fn ok(&self) -> bool {
        self.determinant.abs() == 1 && self.determinant == self.structural
    }
}

/// Draw a torus point with small nonzero rational coordinates.
pub fn sample_torus_point<R: Rng>(rng: &mut R, n: usize) -> Vec<Coeff> {
    (0..n)
        .map(|_| {
            let num = loop {
                let x = rng.gen_range(-9i64..=9);
                if x != 0 {
                    break x;
                }
            };
            let den = rng.gen_range(1i64..=9);
            BigRational::new(BigInt::from(num), BigInt::from(den))
        })
        .collect()
}

/// Compute the log-Jacobian determinant of the composed map at `samples`
/// exact rational torus points drawn from a seeded generator, resampling
/// past poles. The determinant must be +-1 and identical at every sample;
/// the signed value is returned.
pub fn volume_determinant(map: &BirationalMap, samples: usize, seed: u64) -> Result<i64, Error> {
    let n = map.n_vars();
    if n == 0 || samples == 0 {
        return Ok(1);
    }
    let coords = map.coordinate_pullbacks();
    // logarithmic derivative data per coordinate function
    let mut parts = Vec::with_capacity(n);
    for c in &coords {
        let num_d: Vec<LaurentPoly> = (0..n).map(|i| c.num().log_partial(i).unwrap()).collect();
        let den_d: Vec<LaurentPoly> = (0..n).map(|i| c.den().log_partial(i).unwrap()).collect();
        parts.push((c, num_d, den_d));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut result: Option<i64> = None;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < samples {
        attempts += 1;
        if attempts > samples * 20 {
            return Err(Error::PoleAtSample);
        }
        let point = sample_torus_point(&mut rng, n);
        match log_jacobian_det_at(&parts, &point) {
            Some(det) => {
                if det.denom().is_one() {
                    let d = match i64::try_from(det.numer()) {
                        Ok(d) => d,
                        Err(_) => {
                            return Err(Error::VerificationFailed(
                                "log-Jacobian determinant out of range".into(),
                            ))
                        }
                    };
                    match result {
                        None => result = Some(d),
                        Some(prev) if prev == d => {}
                        Some(prev) => {
                            return Err(Error::VerificationFailed(format!(
                                "log-Jacobian determinant not constant: {prev} vs {d}"
                            )))
                        }
                    }
                    accepted += 1;
                } else {
                    return Err(Error::VerificationFailed(format!(
                        "log-Jacobian determinant not an integer: {det}"
                    )));
                }
            }
            None => continue, // pole or zero: resample
        }
    }
    let d = result.expect("samples > 0");
    if d.abs() != 1 {
        return Err(Error::VerificationFailed(format!(
            "log-Jacobian determinant {d} is not of absolute value 1"
        )));
    }
    Ok(d)
}

/// Run the volume check and compare against the structural product of the
/// step determinants.
pub fn volume_check(map: &BirationalMap, samples: usize, seed: u64) -> Result<VolumeCheck, Error> {
    let determinant = volume_determinant(map, samples, seed)?;
    let structural = map.structural_det();
    let check = VolumeCheck {
        determinant,
        structural,
        samples,
    };
    if !check.ok() {
        return Err(Error::VerificationFailed(format!(
            "sampled determinant {} does not match structural product {}",
            check.determinant, check.structural
        )));
    }
    Ok(check)
}

type LogParts<'a> = [(&'a RationalFn, Vec<LaurentPoly>, Vec<LaurentPoly>)];

fn log_jacobian_det_at(parts: &LogParts<'_>, point: &[Coeff]) -> Option<Coeff> {
    let n = point.len();
    let mut jac = vec![vec![Coeff::zero(); n]; n];
    for (j, (c, num_d, den_d)) in parts.iter().enumerate() {
        let nv = c.num().eval(point).ok()?;
        let dv = c.den().eval(point).ok()?;
        if nv.is_zero() || dv.is_zero() {
            return None;
        }
        for i in 0..n {
            let a = num_d[i].eval(point).ok()? / &nv;
            let b = den_d[i].eval(point).ok()? / &dv;
            jac[i][j] = a - b;
        }
    }
    Some(rational_det(jac))
}

fn rational_det(mut m: Vec<Vec<Coeff>>) -> Coeff {
    let n = m.len();
    let mut det = Coeff::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !m[i][k].is_zero());
        let Some(p) = pivot else {
            return Coeff::zero();
        };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let pv = m[k][k].clone();
        det *= &pv;
        let pivot_row = m[k].clone();
        for row in m.iter_mut().skip(k + 1) {
            if row[k].is_zero() {
                continue;
            }
            let factor = &row[k] / &pv;
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(k) {
                let sub = &factor * p;
                *x -= sub;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(entries: &[i64]) -> ExpVec {
        ExpVec::new(entries.to_vec())
    }

    fn poly(n: usize, terms: &[(&[i64], i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(
            n,
            terms
                .iter()
                .map(|(e, k)| (ev(e), Coeff::from_integer(BigInt::from(*k)))),
        )
    }

    /// The standard 3-dimensional hypersurface example: rays e1,e2,e3 and
    /// -e1-e2-e3 with index sets {1,2} vs {3,4}; weight (1,1,-1),
    /// u+ = v1, u- = v3.
    struct Hyper {
        w: ExpVec,
        u_plus: ExpVec,
        u_minus: ExpVec,
        factor: LaurentPoly,
        factor_prime: LaurentPoly,
        superpotential: LaurentPoly,
    }

    fn hyper() -> Hyper {
        let w = ev(&[1, 1, -1]);
        let u_plus = ev(&[1, 0, 0]);
        let u_minus = ev(&[0, 0, 1]);
        // F = z^{-u+} (z^{v1}+z^{v2}) = 1 + x^{-1} y
        let factor = poly(3, &[(&[0, 0, 0], 1), (&[-1, 1, 0], 1)]);
        // F' = z^{-u-} (z^{v3}+z^{v4}) = 1 + z^{-1}(xyz)^{-1}
        let factor_prime = poly(3, &[(&[0, 0, 0], 1), (&[-1, -1, -2], 1)]);
        let superpotential = poly(
            3,
            &[
                (&[1, 0, 0], 1),
                (&[0, 1, 0], 1),
                (&[0, 0, 1], 1),
                (&[-1, -1, -1], 1),
            ],
        );
        Hyper {
            w,
            u_plus,
            u_minus,
            factor,
            factor_prime,
            superpotential,
        }
    }

    #[test]
    fn factor_orthogonality_enforced() {
        let h = hyper();
        assert!(MutationStep::new(h.w.clone(), h.factor.clone(), false).is_ok());
        let bad = poly(3, &[(&[1, 0, 0], 1)]);
        assert!(MutationStep::new(h.w, bad, false).is_err());
    }

    #[test]
    fn mutation_on_monomials() {
        let h = hyper();
        let step = MutationStep::new(h.w.clone(), h.factor.clone(), false).unwrap();
        // <w, v3> = -1, so z -> z * F
        let z = poly(3, &[(&[0, 0, 1], 1)]);
        let img = step.pullback_poly(&z);
        let expected = z.mul(&h.factor);
        assert!(img.eq_rational(&RationalFn::from_poly(expected)));
        // a vector pairing to zero is unchanged
        let fixed = poly(3, &[(&[1, -1, 0], 1)]);
        assert!(step
            .pullback_poly(&fixed)
            .eq_rational(&RationalFn::from_poly(fixed.clone())));
    }

    /// Closed form of the once-mutated superpotential:
    /// z^{u+} + z^{-u+} (sum over S\S')(sum over S'\S) + fixed part.
    fn w1_closed_form(h: &Hyper) -> LaurentPoly {
        let s_minus = poly(3, &[(&[1, 0, 0], 1), (&[0, 1, 0], 1)]);
        let sp_minus = poly(3, &[(&[0, 0, 1], 1), (&[-1, -1, -1], 1)]);
        LaurentPoly::monomial(h.u_plus.clone(), Coeff::one())
            .add(&s_minus.mul(&sp_minus).shift(&h.u_plus.neg()))
    }

    #[test]
    fn mutation_of_superpotential_matches_closed_form() {
        let h = hyper();
        let step = MutationStep::new(h.w.clone(), h.factor.clone(), false).unwrap();
        let w1 = step.pullback_poly(&h.superpotential);
        let expected = w1_closed_form(&h);
        assert!(w1.eq_rational(&RationalFn::from_poly(expected)));
        // and it is genuinely Laurent
        assert!(w1.to_laurent().is_some());
    }

    #[test]
    fn reflection_defining_properties() {
        let h = hyper();
        let t = reflection_from(&h.w, &h.u_plus, &h.u_minus).unwrap();
        assert_eq!(t.apply_exp(&h.u_plus), h.u_minus);
        assert_eq!(t.apply_exp(&h.u_minus), h.u_plus);
        // T(v2) = v2 + 1*(u- - u+) = (-1,1,1)
        assert_eq!(t.apply_exp(&ev(&[0, 1, 0])), ev(&[-1, 1, 1]));
        // involution with determinant -1
        assert_eq!(t.matrix().mul(t.matrix()), IntMatrix::identity(3));
        assert_eq!(t.det(), -1);
        // fixes a basis of the weight hyperplane
        let wall = lattice::kernel_basis(&IntMatrix::from_rows_i64(&[h
            .w
            .entries()
            .to_vec()]));
        assert_eq!(wall.len(), 2);
        for v in wall {
            let fixed = ExpVec::new(lattice::vec_big_to_i64(&v));
            assert_eq!(t.apply_exp(&fixed), fixed);
        }
        // bad pairing rejected
        assert!(reflection_from(&h.w, &h.u_minus, &h.u_plus).is_err());
    }

    #[test]
    fn auto_pullback_examples() {
        let h = hyper();
        let id = LatticeAutoStep::identity(3);
        let f = RationalFn::from_poly(h.superpotential.clone());
        assert!(id.pullback(&f).eq_rational(&f));

        let t = reflection_from(&h.w, &h.u_plus, &h.u_minus).unwrap();
        let v1 = poly(3, &[(&[1, 0, 0], 1)]);
        let v3 = poly(3, &[(&[0, 0, 1], 1)]);
        assert_eq!(t.pullback_poly(&v1), v3);

        // coordinate swap on 2 variables
        let swap = LatticeAutoStep::new(IntMatrix::from_rows_i64(&[vec![0, 1], vec![1, 0]]))
            .unwrap();
        let xy = poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(swap.pullback_poly(&xy), xy);
    }

    fn hypersurface_composite(h: &Hyper) -> BirationalMap {
        let mu = MutationStep::new(h.w.clone(), h.factor.clone(), false).unwrap();
        let mu_prime =
            MutationStep::new(h.w.neg(), h.factor_prime.clone(), false).unwrap();
        let t = reflection_from(&h.w, &h.u_plus, &h.u_minus).unwrap();
        BirationalMap::from_steps(
            3,
            vec![
                Step::Mutation(mu),
                Step::Mutation(mu_prime),
                Step::Automorphism(t),
            ],
        )
    }

    #[test]
    fn empty_map_is_identity() {
        let h = hyper();
        let id = BirationalMap::identity(3);
        let f = RationalFn::from_poly(h.superpotential.clone());
        assert!(id.pullback(&f).eq_rational(&f));
    }

    #[test]
    fn mutation_round_trip() {
        let h = hyper();
        let mu = MutationStep::new(h.w.clone(), h.factor.clone(), false).unwrap();
        let map = BirationalMap::from_steps(
            3,
            vec![Step::Mutation(mu.clone()), Step::Mutation(mu.inverted())],
        );
        let f = RationalFn::from_poly(h.superpotential.clone());
        assert!(map.pullback(&f).eq_rational(&f));
    }

    #[test]
    fn hypersurface_composite_fixes_superpotential() {
        let h = hyper();
        let map = hypersurface_composite(&h);
        let img = map.pullback_poly(&h.superpotential);
        assert!(img.eq_rational(&RationalFn::from_poly(h.superpotential.clone())));
    }

    #[test]
    fn inverse_round_trips_on_monomials() {
        let h = hyper();
        let map = hypersurface_composite(&h);
        let mut round = map.clone();
        round.extend(&map.inverse());
        for j in 0..3 {
            let coord = RationalFn::from_poly(LaurentPoly::var(3, j));
            assert!(round.pullback(&coord).eq_rational(&coord));
        }
    }

    #[test]
    fn volume_of_single_steps() {
        let h = hyper();
        let mu = MutationStep::new(h.w.clone(), h.factor.clone(), false).unwrap();
        let map = BirationalMap::from_steps(3, vec![Step::Mutation(mu)]);
        assert_eq!(volume_determinant(&map, 5, 7).unwrap(), 1);

        let t = reflection_from(&h.w, &h.u_plus, &h.u_minus).unwrap();
        let map = BirationalMap::from_steps(3, vec![Step::Automorphism(t)]);
        assert_eq!(volume_determinant(&map, 5, 7).unwrap(), -1);
    }

    #[test]
    fn volume_of_composite() {
        let h = hyper();
        let map = hypersurface_composite(&h);
        let check = volume_check(&map, 8, 11).unwrap();
        assert_eq!(check.determinant.abs(), 1);
        assert_eq!(check.determinant, map.structural_det());
        assert_eq!(map.structural_det(), -1);
    }

    #[test]
    fn point_map_consistency() {
        let h = hyper();
        let map = hypersurface_composite(&h);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 5 {
            let p = sample_torus_point(&mut rng, 3);
            let Some(img) = map.point_image(&p) else {
                continue;
            };
            let lhs = h.superpotential.eval(&img).unwrap();
            let rhs = h.superpotential.eval(&p).unwrap();
            assert_eq!(lhs, rhs);
            checked += 1;
        }
    }

    fn arb_poly_on_wall(w: ExpVec) -> impl Strategy<Value = LaurentPoly> {
        // factors supported on the weight hyperplane of w = (1,1,-1)
        let gens = [ev(&[0, 0, 0]), ev(&[-1, 1, 0]), ev(&[1, 0, 1])];
        proptest::collection::vec((0usize..3, 1i64..=3), 1..3).prop_map(move |picks| {
            let mut f = LaurentPoly::zero(3);
            for (idx, c) in picks {
                debug_assert_eq!(w.dot(&gens[idx]), 0);
                f.add_term(gens[idx].clone(), Coeff::from_integer(BigInt::from(c)));
            }
            f
        })
    }

    fn arb_poly3() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec(
            (proptest::collection::vec(-2i64..=2, 3), -3i64..=3),
            0..4,
        )
        .prop_map(|terms| {
            LaurentPoly::from_terms(
                3,
                terms
                    .into_iter()
                    .filter(|(_, c)| *c != 0)
                    .map(|(e, c)| (ExpVec::new(e), Coeff::from_integer(BigInt::from(c)))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mutation_pullback_is_multiplicative(
            (factor, f, g) in (arb_poly_on_wall(ev(&[1, 1, -1])), arb_poly3(), arb_poly3())
        ) {
            let step = MutationStep::new(ev(&[1, 1, -1]), factor, false).unwrap();
            let lhs = step.pullback_poly(&f.mul(&g));
            let rhs = step.pullback_poly(&f).mul(&step.pullback_poly(&g));
            prop_assert!(lhs.eq_rational(&rhs));
        }
    }
}
