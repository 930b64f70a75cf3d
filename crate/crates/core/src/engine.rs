//! End-to-end construction of the birational map relating the
//! Landau-Ginzburg models of two nef partitions: the communicating graph,
//! the reflection data, the mutation factor chains, the per-component maps
//! and their composition, and exact verification of every claimed identity.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::Error;
use crate::laurent::{ExpVec, LaurentPoly, RationalFn};
use crate::pullback::{self, reflection_from, BirationalMap, MutationStep, Step, VolumeCheck};
use crate::toric::{validate_pair, IndexSet, NefPartition, ToricModel};

/// Default seed for the deterministic sample generator used by oracle
/// checks; recorded in certificates so replays are bit-identical.
pub const DEFAULT_SAMPLE_SEED: u64 = 0x6e65666d;

/// Number of exact sample points for volume and point-map oracles.
pub const VOLUME_SAMPLES: usize = 20;

/// Graph on the part indices {1..c+1} with an edge between i and j exactly
/// when a part of one partition meets the other partition's part across the
/// pair; its connected components are the communicating sets.
#[derive(Debug, Clone)]
pub struct CommunicatingGraph {
    adjacency: Vec<BTreeSet<usize>>,
    components: Vec<Vec<usize>>,
}

impl CommunicatingGraph {
    pub fn num_vertices(&self) -> usize {
        self.adjacency.len() - 1
    }

    pub fn neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(&j)
    }

    /// Connected components, each sorted ascending, ordered by minimum
    /// element.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }
}

pub fn build_graph(first: &NefPartition, second: &NefPartition) -> CommunicatingGraph {
    let k = first.len();
    let mut adjacency = vec![BTreeSet::new(); k + 1];
    for i in 1..=k {
        for j in i + 1..=k {
            let cross_a = !first.part(i).is_disjoint(second.part(j));
            let cross_b = !second.part(i).is_disjoint(first.part(j));
            if cross_a || cross_b {
                adjacency[i].insert(j);
                adjacency[j].insert(i);
            }
        }
    }
    let mut seen = vec![false; k + 1];
    let mut components = Vec::new();
    for start in 1..=k {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components.sort_by_key(|c| c[0]);
    CommunicatingGraph {
        adjacency,
        components,
    }
}

/// Reflection data for one communicating set: for every member except the
/// distinguished last one, a pair of lattice vectors pairing to +1/-1 with
/// its own weight vector and to 0 with every other weight away from the
/// last member.
#[derive(Debug, Clone)]
pub struct ComponentData {
    /// Global part indices, ascending; the maximum is the distinguished
    /// last element.
    pub members: Vec<usize>,
    /// Weight vectors for members[0..l], indexed locally.
    pub weights: Vec<ExpVec>,
    pub u_plus: Vec<ExpVec>,
    pub u_minus: Vec<ExpVec>,
}

impl ComponentData {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// l = number of members before the distinguished last one.
    pub fn chain_length(&self) -> usize {
        self.members.len() - 1
    }

    pub fn last_member(&self) -> usize {
        *self.members.last().unwrap()
    }
}

/// Build the u vectors for a non-singleton component by induction on the
/// breadth-first distance to the distinguished last member, preferring the
/// lowest-index neighbor and the smallest ray index at every choice point.
pub fn construct_u_vectors(
    model: &ToricModel,
    first: &NefPartition,
    second: &NefPartition,
    graph: &CommunicatingGraph,
    weights: &[ExpVec],
    members: &[usize],
) -> Result<ComponentData, Error> {
    let last = *members.last().unwrap();
    let n = model.rank();

    // breadth-first distances to the last member; the parent is the
    // lowest-index neighbor one level closer
    let mut dist: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([last]);
    dist.insert(last, 0);
    while let Some(v) = queue.pop_front() {
        let next_dist = dist[&v] + 1;
        for &w in graph.neighbors(v) {
            if !members.contains(&w) {
                continue;
            }
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(next_dist);
                queue.push_back(w);
            }
        }
    }
    if dist.len() != members.len() {
        return Err(Error::Internal(
            "communicating set is not connected in its own graph".into(),
        ));
    }
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    for &j in members {
        if j == last {
            continue;
        }
        let p = graph
            .neighbors(j)
            .iter()
            .copied()
            .find(|p| dist.get(p) == Some(&(dist[&j] - 1)))
            .ok_or_else(|| Error::Internal(format!("no tree parent for member {j}")))?;
        parent.insert(j, p);
    }

    // resolve in order of increasing distance so parents come first
    let mut order: Vec<usize> = members.to_vec();
    order.sort_by_key(|m| dist[m]);

    let mut u_map: BTreeMap<usize, (ExpVec, ExpVec)> = BTreeMap::new();
    u_map.insert(last, (ExpVec::zero(n), ExpVec::zero(n)));
    for &j in &order {
        if j == last {
            continue;
        }
        let p = parent[&j];
        let (pu_plus, pu_minus) = u_map[&p].clone();
        let forward: Option<usize> = first.part(j).intersection(second.part(p)).next().copied();
        let backward: Option<usize> = second.part(j).intersection(first.part(p)).next().copied();
        let u_plus = match forward {
            Some(k) => model.ray(k).add(&pu_plus),
            None => {
                let k = backward
                    .ok_or_else(|| Error::Internal(format!("edge {j}-{p} has empty crossings")))?;
                pu_plus.sub(model.ray(k))
            }
        };
        let u_minus = match backward {
            Some(k) => model.ray(k).add(&pu_minus),
            None => {
                let k = forward.expect("edge exists");
                pu_minus.sub(model.ray(k))
            }
        };
        u_map.insert(j, (u_plus, u_minus));
    }

    let l = members.len() - 1;
    let mut data = ComponentData {
        members: members.to_vec(),
        weights: Vec::with_capacity(l),
        u_plus: Vec::with_capacity(l),
        u_minus: Vec::with_capacity(l),
    };
    for &m in &members[..l] {
        let (up, um) = u_map[&m].clone();
        data.weights.push(weights[m - 1].clone());
        data.u_plus.push(up);
        data.u_minus.push(um);
    }

    verify_u_pairings(&data, weights, last)?;
    Ok(data)
}

/// Re-verify the full pairing table of the constructed u vectors against
/// every weight vector. A failure here indicates an internal inconsistency
/// between the graph and the weights, not a user error.
fn verify_u_pairings(data: &ComponentData, weights: &[ExpVec], last: usize) -> Result<(), Error> {
    for (t, &j) in data.members[..data.chain_length()].iter().enumerate() {
        for (a, w_a) in weights.iter().enumerate() {
            let a = a + 1;
            let plus = w_a.dot(&data.u_plus[t]);
            let minus = w_a.dot(&data.u_minus[t]);
            if a == j {
                if plus != 1 || minus != -1 {
                    return Err(Error::Internal(format!(
                        "u pairing failure at member {j}: got ({plus}, {minus})"
                    )));
                }
            } else if a != last && (plus != 0 || minus != 0) {
                return Err(Error::Internal(format!(
                    "u pairing failure: weight {a} against member {j} gives ({plus}, {minus})"
                )));
            }
        }
    }
    Ok(())
}

/// One run of the inductive factor construction: the mutation factors and
/// the snapshots of every member's partition sum after each mutation.
#[derive(Debug, Clone)]
pub struct FactorChain {
    /// factors[k] is the factor of the (k+1)-st mutation.
    pub factors: Vec<LaurentPoly>,
    /// snapshots[j][t] is the image of member t's partition sum after the
    /// first j mutations; snapshots[0] holds the inputs.
    pub snapshots: Vec<Vec<LaurentPoly>>,
    /// The mutation steps, in application order.
    pub steps: Vec<MutationStep>,
}

impl FactorChain {
    pub fn chain_length(&self) -> usize {
        self.factors.len()
    }

    /// Image of member `t` (0-based local) after `j` mutations.
    pub fn snapshot(&self, j: usize, t: usize) -> &LaurentPoly {
        &self.snapshots[j][t]
    }

    pub fn final_snapshots(&self) -> &[LaurentPoly] {
        self.snapshots.last().unwrap()
    }
}

/// Build a factor chain from the local data of one component. `sums` are
/// the partition sums of the active side (one per member, local order);
/// `chain_weights[t]` and `chain_u[t]` supply the weight and the prefix
/// vector of mutation t+1. For the primed run the caller passes the negated
/// weights, the minus vectors, and the other partition's sums.
pub fn build_factor_chain(
    sums: Vec<LaurentPoly>,
    chain_weights: &[ExpVec],
    chain_u: &[ExpVec],
) -> Result<FactorChain, Error> {
    let l = chain_weights.len();
    assert_eq!(sums.len(), l + 1, "need one sum per member");
    let mut snapshots = vec![sums];
    let mut factors = Vec::with_capacity(l);
    let mut steps = Vec::with_capacity(l);
    for k in 0..l {
        let current = &snapshots[k][k];
        let tilde = current.select_by_pairing(&chain_weights[k], 1);
        if tilde.is_zero() {
            return Err(Error::Internal(format!(
                "mutation {} has empty factor: no terms pair to 1",
                k + 1
            )));
        }
        let factor = tilde.shift(&chain_u[k].neg());
        let step = MutationStep::new(chain_weights[k].clone(), factor.clone(), false)
            .map_err(|e| Error::Internal(format!("factor {} invalid: {e}", k + 1)))?;
        let mut next = Vec::with_capacity(l + 1);
        for g in &snapshots[k] {
            let image = step.pullback_poly(g);
            let poly = image.to_laurent().ok_or_else(|| {
                Error::Internal(format!(
                    "mutation {} image is not a Laurent polynomial",
                    k + 1
                ))
            })?;
            next.push(poly);
        }
        snapshots.push(next);
        factors.push(factor);
        steps.push(step);
    }
    Ok(FactorChain {
        factors,
        snapshots,
        steps,
    })
}

/// Everything constructed for one communicating set.
#[derive(Debug, Clone)]
pub struct ComponentOutcome {
    pub data: ComponentData,
    pub chain: FactorChain,
    pub primed_chain: FactorChain,
    pub map: BirationalMap,
}

/// Build the birational map of one non-singleton component: the unprimed
/// mutations, the reflections, then the primed mutations inverted in
/// reverse order.
pub fn build_phi_component(
    model: &ToricModel,
    first: &NefPartition,
    second: &NefPartition,
    data: &ComponentData,
) -> Result<ComponentOutcome, Error> {
    let l = data.chain_length();
    let sums: Vec<LaurentPoly> = data
        .members
        .iter()
        .map(|&m| model.partition_sum(first.part(m)))
        .collect::<Result<_, _>>()?;
    let primed_sums: Vec<LaurentPoly> = data
        .members
        .iter()
        .map(|&m| model.partition_sum(second.part(m)))
        .collect::<Result<_, _>>()?;

    let chain = build_factor_chain(sums, &data.weights, &data.u_plus)?;
    let neg_weights: Vec<ExpVec> = data.weights.iter().map(ExpVec::neg).collect();
    let primed_chain = build_factor_chain(primed_sums, &neg_weights, &data.u_minus)?;

    let mut steps: Vec<Step> = Vec::with_capacity(3 * l);
    for step in &chain.steps {
        steps.push(Step::Mutation(step.clone()));
    }
    for t in 0..l {
        let refl = reflection_from(&data.weights[t], &data.u_plus[t], &data.u_minus[t])?;
        steps.push(Step::Automorphism(refl));
    }
    for step in primed_chain.steps.iter().rev() {
        steps.push(Step::Mutation(step.inverted()));
    }

    Ok(ComponentOutcome {
        data: data.clone(),
        chain,
        primed_chain,
        map: BirationalMap::from_steps(model.rank(), steps),
    })
}

/// One verified identity, with the canonical serializations kept for diff
/// output on failure.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<IdentityCheck>,
    pub volume: Option<VolumeCheck>,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .collect();
        names.extend(self.failures.iter().cloned());
        names
    }

    pub fn check_pullback(
        &mut self,
        name: &str,
        map: &BirationalMap,
        input: &LaurentPoly,
        expected: &LaurentPoly,
    ) {
        let image = map.pullback_poly(input);
        let passed = image.eq_rational(&RationalFn::from_poly(expected.clone()));
        let lhs = match image.to_laurent() {
            Some(p) => p.canonical_text(),
            None => format!(
                "({}) / ({})",
                image.num().canonical_text(),
                image.den().canonical_text()
            ),
        };
        self.checks.push(IdentityCheck {
            name: name.to_string(),
            passed,
            lhs,
            rhs: expected.canonical_text(),
        });
    }

    pub fn check_volume(&mut self, map: &BirationalMap, samples: usize, seed: u64) {
        match pullback::volume_check(map, samples, seed) {
            Ok(check) => self.volume = Some(check),
            Err(e) => self.failures.push(format!("volume check: {e}")),
        }
    }
}

/// Verify the component-level identities: invariance of the component's
/// block of the superpotential, transport of each non-last partition sum to
/// its primed counterpart (the last follows automatically and is checked
/// too), fixing of every ray outside the component, and the volume.
pub fn verify_component(
    model: &ToricModel,
    first: &NefPartition,
    second: &NefPartition,
    data: &ComponentData,
    map: &BirationalMap,
    seed: u64,
) -> Result<VerificationReport, Error> {
    let mut report = VerificationReport::default();
    let mut w_c = LaurentPoly::zero(model.rank());
    for &m in &data.members {
        w_c = w_c.add(&model.partition_sum(first.part(m))?);
    }
    report.check_pullback("component-superpotential", map, &w_c, &w_c);

    for &m in &data.members {
        let g = model.partition_sum(first.part(m))?;
        let g_prime = model.partition_sum(second.part(m))?;
        let name = if m == data.last_member() {
            format!("part-sum-{m} (automatic)")
        } else {
            format!("part-sum-{m}")
        };
        report.check_pullback(&name, map, &g, &g_prime);
    }

    let mut comp_rays: IndexSet = BTreeSet::new();
    let mut comp_rays_primed: IndexSet = BTreeSet::new();
    for &m in &data.members {
        comp_rays.extend(first.part(m).iter().copied());
        comp_rays_primed.extend(second.part(m).iter().copied());
    }
    if comp_rays != comp_rays_primed {
        return Err(Error::Internal(
            "component ray supports differ between the partitions".into(),
        ));
    }
    for j in 1..=model.num_rays() {
        if comp_rays.contains(&j) {
            continue;
        }
        let mono = LaurentPoly::monomial(model.ray(j).clone(), num_traits::One::one());
        report.check_pullback(&format!("ray-{j}-fixed"), map, &mono, &mono);
    }

    report.check_volume(map, VOLUME_SAMPLES, seed);
    Ok(report)
}

/// Verify the global identities claimed for an assembled map: invariance of
/// the superpotential, transport of every partition sum, volume, and
/// agreement of the point map with the symbolic pullback at sampled points.
pub fn verify_assembled(
    model: &ToricModel,
    first: &NefPartition,
    second: &NefPartition,
    map: &BirationalMap,
    seed: u64,
) -> Result<VerificationReport, Error> {
    let mut report = VerificationReport::default();
    let w = model.superpotential();
    report.check_pullback("superpotential", map, &w, &w);
    for i in 1..=first.len() {
        let g = model.partition_sum(first.part(i))?;
        let g_prime = model.partition_sum(second.part(i))?;
        report.check_pullback(&format!("part-sum-{i}"), map, &g, &g_prime);
    }
    report.check_volume(map, VOLUME_SAMPLES, seed);
    if let Err(e) = point_oracle(model, map, VOLUME_SAMPLES, seed) {
        report.failures.push(format!("point oracle: {e}"));
    }
    Ok(report)
}

/// Exact point-map oracle: the superpotential evaluated at the image of a
/// sampled point must equal its value at the point itself.
pub fn point_oracle(
    model: &ToricModel,
    map: &BirationalMap,
    samples: usize,
    seed: u64,
) -> Result<(), Error> {
    use rand_chacha::rand_core::SeedableRng;
    let w = model.superpotential();
    let point_map = map.point_map();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed ^ 0x706f696e74);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < samples {
        attempts += 1;
        if attempts > samples * 20 {
            return Err(Error::PoleAtSample);
        }
        let p = pullback::sample_torus_point(&mut rng, model.rank());
        let Some(image) = point_map.eval(&p) else {
            continue;
        };
        let lhs = w.eval(&image)?;
        let rhs = w.eval(&p)?;
        if lhs != rhs {
            return Err(Error::VerificationFailed(format!(
                "superpotential value changes under the point map: {lhs} vs {rhs}"
            )));
        }
        accepted += 1;
    }
    Ok(())
}

/// The assembled equivalence data: the composed map, the per-component
/// constructions, and the verification reports.
#[derive(Debug)]
pub struct EquivalenceOutcome {
    pub map: BirationalMap,
    pub components: Vec<ComponentOutcome>,
    pub component_reports: Vec<VerificationReport>,
    pub report: VerificationReport,
    pub seed: u64,
}

/// Construct and verify the full birational map for a pair of nef
/// partitions presenting the same line bundles.
pub fn assemble_phi(
    model: &ToricModel,
    first: &NefPartition,
    second: &NefPartition,
    seed: u64,
) -> Result<EquivalenceOutcome, Error> {
    validate_pair(model, first, second)?;
    let c = first.codim();
    let weights: Vec<ExpVec> = (1..=c)
        .map(|i| model.weight_vector(first.part(i), second.part(i)))
        .collect::<Result<_, _>>()?;
    let graph = build_graph(first, second);

    let mut map = BirationalMap::identity(model.rank());
    let mut components = Vec::new();
    let mut component_reports = Vec::new();
    for members in graph.components() {
        if members.len() == 1 {
            let m = members[0];
            if first.part(m) != second.part(m) {
                return Err(Error::Internal(format!(
                    "isolated part {m} differs between the partitions"
                )));
            }
            continue;
        }
        for &m in members {
            if first.part(m) == second.part(m) {
                return Err(Error::Internal(format!(
                    "part {m} of a non-singleton communicating set is unchanged"
                )));
            }
        }
        let data = construct_u_vectors(model, first, second, &graph, &weights, members)?;
        let outcome = build_phi_component(model, first, second, &data)?;
        let report = verify_component(model, first, second, &data, &outcome.map, seed)?;
        if !report.all_passed() {
            return Err(Error::VerificationFailed(format!(
                "component {:?} failed: {}",
                members,
                report.failed_names().join(", ")
            )));
        }
        map.extend(&outcome.map);
        components.push(outcome);
        component_reports.push(report);
    }

    let report = verify_assembled(model, first, second, &map, seed)?;
    Ok(EquivalenceOutcome {
        map,
        components,
        component_reports,
        report,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Coeff;
    use num_bigint::BigInt;

    fn set(ids: &[usize]) -> IndexSet {
        ids.iter().copied().collect()
    }

    fn p3() -> ToricModel {
        ToricModel::new(
            3,
            vec![
                ExpVec::new(vec![1, 0, 0]),
                ExpVec::new(vec![0, 1, 0]),
                ExpVec::new(vec![0, 0, 1]),
                ExpVec::new(vec![-1, -1, -1]),
            ],
        )
        .unwrap()
    }

    fn p3_pair() -> (NefPartition, NefPartition) {
        (
            NefPartition::new(vec![set(&[1, 2]), set(&[3, 4])], 4).unwrap(),
            NefPartition::new(vec![set(&[3, 4]), set(&[1, 2])], 4).unwrap(),
        )
    }

    #[test]
    fn graph_identical_partitions() {
        let p = NefPartition::new(vec![set(&[1, 2]), set(&[3, 4])], 4).unwrap();
        let g = build_graph(&p, &p);
        assert_eq!(g.components().len(), 2);
        assert!(g.components().iter().all(|c| c.len() == 1));
    }

    #[test]
    fn graph_hypersurface_single_component() {
        let (p, q) = p3_pair();
        let g = build_graph(&p, &q);
        assert_eq!(g.components(), &[vec![1, 2]]);
        assert!(g.has_edge(1, 2));
    }

    #[test]
    fn graph_mixed_components() {
        // first part unchanged, the others swapped: {1} isolated, {2,3}
        // joined
        let p = NefPartition::new(vec![set(&[1, 2]), set(&[3]), set(&[4])], 4).unwrap();
        let q = NefPartition::new(vec![set(&[1, 2]), set(&[4]), set(&[3])], 4).unwrap();
        let g = build_graph(&p, &q);
        assert_eq!(g.components(), &[vec![1], vec![2, 3]]);
    }

    #[test]
    fn u_vectors_hypersurface() {
        let model = p3();
        let (p, q) = p3_pair();
        let graph = build_graph(&p, &q);
        let weights = vec![model.weight_vector(p.part(1), q.part(1)).unwrap()];
        let data =
            construct_u_vectors(&model, &p, &q, &graph, &weights, &graph.components()[0]).unwrap();
        assert_eq!(data.members, vec![1, 2]);
        // u+ picked from the first partition's part 1 crossing the second's
        // part 2: smallest ray index 1
        assert_eq!(data.u_plus[0], ExpVec::new(vec![1, 0, 0]));
        // u- from the crossing on the primed side: smallest ray index 3
        assert_eq!(data.u_minus[0], ExpVec::new(vec![0, 0, 1]));
        assert_eq!(weights[0].dot(&data.u_plus[0]), 1);
        assert_eq!(weights[0].dot(&data.u_minus[0]), -1);
    }

    #[test]
    fn factor_chain_hypersurface() {
        let model = p3();
        let (p, q) = p3_pair();
        let outcome = assemble_phi(&model, &p, &q, DEFAULT_SAMPLE_SEED).unwrap();
        assert_eq!(outcome.components.len(), 1);
        let comp = &outcome.components[0];
        // F_1 = z^{-u+}(x + y) = 1 + x^{-1} y
        assert_eq!(
            comp.chain.factors[0].canonical_text(),
            "1*(-1,1,0) + 1*(0,0,0)"
        );
        // after the mutation the first sum collapses to z^{u+} (the overlap
        // of the two index sets is empty here)
        assert_eq!(comp.chain.snapshot(1, 0).canonical_text(), "1*(1,0,0)");
        // step list shape: mutation, reflection, inverse mutation
        assert_eq!(comp.map.steps().len(), 3);
        assert!(outcome.report.all_passed());
        assert_eq!(outcome.map.structural_det(), -1);
    }

    #[test]
    fn tilde_extraction_examples() {
        let model = p3();
        let g = model.partition_sum(&set(&[1, 2])).unwrap();
        let w = ExpVec::new(vec![1, 1, -1]);
        // both rays pair to 1
        assert_eq!(g.select_by_pairing(&w, 1), g);
        // no terms pairing to 1
        let h = model.partition_sum(&set(&[3, 4])).unwrap();
        assert!(h.select_by_pairing(&w, 1).is_zero());
    }

    #[test]
    fn identical_partitions_give_identity_map() {
        let model = p3();
        let p = NefPartition::new(vec![set(&[1, 2]), set(&[3, 4])], 4).unwrap();
        let outcome = assemble_phi(&model, &p, &p, 1).unwrap();
        assert!(outcome.map.is_identity());
        assert!(outcome.report.all_passed());
    }

    #[test]
    fn corrupted_factor_is_caught() {
        let model = p3();
        let (p, q) = p3_pair();
        let outcome = assemble_phi(&model, &p, &q, 5).unwrap();
        let comp = &outcome.components[0];

        // drop one term from the first mutation factor
        let factor = &comp.chain.factors[0];
        let (first_exp, _) = factor.terms().next().unwrap();
        let corrupted = factor.sub(&LaurentPoly::monomial(
            first_exp.clone(),
            factor.coeff(first_exp),
        ));
        let w = comp.data.weights[0].clone();
        let bad_step = MutationStep::new(w, corrupted, false).unwrap();
        let mut steps: Vec<Step> = comp.map.steps().to_vec();
        steps[0] = Step::Mutation(bad_step);
        let bad_map = BirationalMap::from_steps(3, steps);

        let report = verify_component(&model, &p, &q, &comp.data, &bad_map, 5).unwrap();
        assert!(!report.all_passed());
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "component-superpotential" && !c.passed));
    }

    #[test]
    fn three_step_composite_orderings_agree() {
        // the composite written with a forward primed mutation in the middle
        // and the reflection last equals the engine's ordering (reflections
        // in the middle, inverted primed mutations at the end) on every
        // coordinate character
        let model = p3();
        let (p, q) = p3_pair();
        let outcome = assemble_phi(&model, &p, &q, 9).unwrap();
        let comp = &outcome.components[0];
        let mu = comp.chain.steps[0].clone();
        let mu_prime = comp.primed_chain.steps[0].clone();
        let t = reflection_from(
            &comp.data.weights[0],
            &comp.data.u_plus[0],
            &comp.data.u_minus[0],
        )
        .unwrap();
        let literal = BirationalMap::from_steps(
            3,
            vec![
                Step::Mutation(mu),
                Step::Mutation(mu_prime),
                Step::Automorphism(t),
            ],
        );
        for j in 0..3 {
            let coord = RationalFn::from_poly(LaurentPoly::var(3, j));
            let a = literal.pullback(&coord);
            let b = comp.map.pullback(&coord);
            assert!(a.eq_rational(&b), "coordinate {j} differs");
        }
    }

    fn rank6() -> ToricModel {
        let mut rays: Vec<ExpVec> = (0..6).map(|i| ExpVec::unit(6, i)).collect();
        rays.push(ExpVec::new(vec![-1; 6]));
        ToricModel::new(6, rays).unwrap()
    }

    #[test]
    fn one_sided_edges_build_valid_u_vectors() {
        // the edge between parts 1 and 2 is realized only on the primed
        // side, so the minus vectors come from the sign-flip branch
        let model = rank6();
        let p = NefPartition::new(vec![set(&[1, 2]), set(&[3, 4]), set(&[5, 6, 7])], 7).unwrap();
        let q = NefPartition::new(vec![set(&[3, 4]), set(&[5, 6]), set(&[1, 2, 7])], 7).unwrap();
        let graph = build_graph(&p, &q);
        assert_eq!(graph.components(), &[vec![1, 2, 3]]);
        assert!(p.part(1).is_disjoint(q.part(2)));
        assert!(!q.part(1).is_disjoint(p.part(2)));
        let outcome = assemble_phi(&model, &p, &q, 31).unwrap();
        assert!(outcome.report.all_passed(), "{:?}", outcome.report.failed_names());
        assert_eq!(outcome.components[0].data.chain_length(), 2);
    }

    #[test]
    fn component_with_interior_last_element() {
        // parts 1 and 2 swap while part 3 is fixed: the component's
        // distinguished last element is 2, which still has a weight vector
        // of its own, left unconstrained by the pairing table
        let model = ToricModel::new(
            5,
            (0..5)
                .map(|i| ExpVec::unit(5, i))
                .chain([ExpVec::new(vec![-1; 5])])
                .collect(),
        )
        .unwrap();
        let p = NefPartition::new(vec![set(&[1, 2]), set(&[3, 4]), set(&[5, 6])], 6).unwrap();
        let q = NefPartition::new(vec![set(&[3, 4]), set(&[1, 2]), set(&[5, 6])], 6).unwrap();
        let graph = build_graph(&p, &q);
        assert_eq!(graph.components(), &[vec![1, 2], vec![3]]);
        let outcome = assemble_phi(&model, &p, &q, 41).unwrap();
        assert!(outcome.report.all_passed());
        assert_eq!(outcome.components[0].data.last_member(), 2);
    }

    #[test]
    fn two_component_assembly() {
        // parts {1,2} and {3,4} swap independently: two communicating sets,
        // maps concatenated in ascending order of minimum element
        let mut rays: Vec<ExpVec> = (0..7).map(|i| ExpVec::unit(7, i)).collect();
        rays.push(ExpVec::new(vec![-1; 7]));
        let model = ToricModel::new(7, rays).unwrap();
        let p = NefPartition::new(
            vec![set(&[1, 2]), set(&[3, 4]), set(&[5, 6]), set(&[7, 8])],
            8,
        )
        .unwrap();
        let q = NefPartition::new(
            vec![set(&[3, 4]), set(&[1, 2]), set(&[7, 8]), set(&[5, 6])],
            8,
        )
        .unwrap();
        let graph = build_graph(&p, &q);
        assert_eq!(graph.components(), &[vec![1, 2], vec![3, 4]]);
        let outcome = assemble_phi(&model, &p, &q, 37).unwrap();
        assert_eq!(outcome.components.len(), 2);
        assert!(outcome.report.all_passed());
        // two reflections in total, one per component
        assert_eq!(outcome.map.structural_det(), 1);
        assert_eq!(outcome.map.steps().len(), 6);
    }

    #[test]
    fn point_oracle_on_hypersurface() {
        let model = p3();
        let (p, q) = p3_pair();
        let outcome = assemble_phi(&model, &p, &q, 13).unwrap();
        point_oracle(&model, &outcome.map, 10, 13).unwrap();
    }

    #[test]
    fn degenerate_weight_rejected_for_distinct_classes() {
        let model = p3();
        let p = NefPartition::new(vec![set(&[1]), set(&[2, 3, 4])], 4).unwrap();
        let q = NefPartition::new(vec![set(&[1, 2]), set(&[3, 4])], 4).unwrap();
        assert!(matches!(
            assemble_phi(&model, &p, &q, 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn member_snapshots_sum_to_mutated_superpotential() {
        let model = p3();
        let (p, q) = p3_pair();
        let outcome = assemble_phi(&model, &p, &q, 2).unwrap();
        let comp = &outcome.components[0];
        let w1: LaurentPoly = comp.chain.snapshots[1]
            .iter()
            .fold(LaurentPoly::zero(3), |acc, g| acc.add(g));
        let step = comp.chain.steps[0].clone();
        let direct = step.pullback_poly(&model.superpotential());
        assert!(direct.eq_rational(&RationalFn::from_poly(w1)));
    }

    #[test]
    fn randomized_multipart_instances_verify() {
        // random partitions of a projective ray set against a random ray
        // permutation of themselves: every ray has the same class, so the
        // parts stay classwise equal while the communicating structure
        // varies freely
        use rand::seq::SliceRandom;
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0x6d756c7469);
        for round in 0..6 {
            let n = rng.gen_range(3..=5usize);
            let model = ToricModel::new(
                n,
                (0..n)
                    .map(|i| ExpVec::unit(n, i))
                    .chain([ExpVec::new(vec![-1; n])])
                    .collect(),
            )
            .unwrap();
            let r = n + 1;
            let mut rays: Vec<usize> = (1..=r).collect();
            rays.shuffle(&mut rng);
            let parts_count = rng.gen_range(2..=r.min(4));
            // random composition of r into parts_count nonempty parts
            let mut cuts: Vec<usize> = (1..r).collect();
            cuts.shuffle(&mut rng);
            let mut cuts: Vec<usize> = cuts[..parts_count - 1].to_vec();
            cuts.sort_unstable();
            cuts.push(r);
            let mut first_parts = Vec::new();
            let mut start = 0;
            for &end in &cuts {
                first_parts.push(rays[start..end].iter().copied().collect::<IndexSet>());
                start = end;
            }
            let mut perm: Vec<usize> = (1..=r).collect();
            perm.shuffle(&mut rng);
            let second_parts: Vec<IndexSet> = first_parts
                .iter()
                .map(|s| s.iter().map(|&j| perm[j - 1]).collect())
                .collect();
            let first = NefPartition::new(first_parts, r).unwrap();
            let second = NefPartition::new(second_parts, r).unwrap();
            let outcome = assemble_phi(&model, &first, &second, 100 + round).unwrap();
            assert!(
                outcome.report.all_passed(),
                "round {round}: {:?}",
                outcome.report.failed_names()
            );
        }
    }

    #[test]
    fn eval_check_on_composed_map() {
        // the superpotential takes the same value at a point and its image
        let model = p3();
        let (p, q) = p3_pair();
        let outcome = assemble_phi(&model, &p, &q, 21).unwrap();
        let pt = vec![
            Coeff::new(BigInt::from(1), BigInt::from(2)),
            Coeff::new(BigInt::from(3), BigInt::from(1)),
            Coeff::new(BigInt::from(-2), BigInt::from(5)),
        ];
        let img = outcome.map.point_image(&pt).unwrap();
        let w = model.superpotential();
        assert_eq!(w.eval(&img).unwrap(), w.eval(&pt).unwrap());
    }
}
