//! Serialized, independently replayable certificates. A certificate records
//! the step list of a verified map together with the identities it claims;
//! the verifier re-executes every pullback from the serialized data alone
//! and recomputes every claim from the model file, trusting nothing stored.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{self, VerificationReport};
use crate::error::Error;
use crate::lattice::IntMatrix;
use crate::laurent::{ExpVec, LaurentPoly};
use crate::mirror::{self, MirrorResult};
use crate::modelfile::{hex_digest, ModelFile};
use crate::pullback::{BirationalMap, LatticeAutoStep, MutationStep, Step};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CertStep {
    Mutation {
        weight: Vec<i64>,
        factor: String,
        inverse: bool,
    },
    Automorphism {
        rows: Vec<Vec<i64>>,
    },
}

/// A claimed pullback identity: applying the certificate's steps to
/// `input` must give `expected`. Both polynomials are recomputed from the
/// model during verification and the stored texts must match them.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ClaimRecord {
    pub name: String,
    pub input: String,
    pub expected: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceCertificate {
    pub kind: String,
    pub model_hash: String,
    pub first: String,
    pub second: String,
    pub steps: Vec<CertStep>,
    pub claims: Vec<ClaimRecord>,
    pub volume_determinant: i64,
    pub sample_seed: u64,
    #[serde(default)]
    pub cert_hash: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct MirrorCertificate {
    pub kind: String,
    pub model_hash: String,
    pub first_partition: String,
    pub first_amenable: String,
    pub second_partition: String,
    pub second_amenable: String,
    /// Steps of the composite operator: inverse first chain, partition
    /// map, second chain.
    pub steps: Vec<CertStep>,
    /// Adapted bases, serialized as matrix rows.
    pub basis_first: Vec<Vec<i64>>,
    pub basis_second: Vec<Vec<i64>>,
    pub mirror_first: String,
    pub mirror_second: String,
    pub volume_determinant: i64,
    pub sample_seed: u64,
    #[serde(default)]
    pub cert_hash: String,
}

#[derive(Clone, Debug)]
pub enum Certificate {
    Equivalence(EquivalenceCertificate),
    Mirror(MirrorCertificate),
}

impl Certificate {
    pub fn parse(text: &str) -> Result<Certificate, Error> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("certificate: {e}")))?;
        match value.get("kind").and_then(|k| k.as_str()) {
            Some("equivalence") => Ok(Certificate::Equivalence(
                serde_json::from_value(value)
                    .map_err(|e| Error::Parse(format!("certificate: {e}")))?,
            )),
            Some("mirror-equivalence") => Ok(Certificate::Mirror(
                serde_json::from_value(value)
                    .map_err(|e| Error::Parse(format!("certificate: {e}")))?,
            )),
            Some(other) => Err(Error::Parse(format!("unknown certificate kind `{other}`"))),
            None => Err(Error::Parse("certificate has no `kind` field".into())),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        match self {
            Certificate::Equivalence(c) => serde_json::to_string_pretty(c),
            Certificate::Mirror(c) => serde_json::to_string_pretty(c),
        }
        .expect("certificate serialization")
    }
}

/// Canonical hash of any serializable payload: compact JSON with sorted
/// keys, with the stored hash field blanked first.
fn payload_hash<T: Serialize>(payload: &T) -> String {
    let mut value = serde_json::to_value(payload).expect("certificate to value");
    if let Some(obj) = value.as_object_mut() {
        obj.insert("cert_hash".into(), serde_json::Value::String(String::new()));
    }
    let canonical = serde_json::to_string(&value).expect("canonical json");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    hex_digest(hasher)
}

pub fn steps_to_records(map: &BirationalMap) -> Vec<CertStep> {
    map.steps()
        .iter()
        .map(|s| match s {
            Step::Mutation(m) => CertStep::Mutation {
                weight: m.weight().entries().to_vec(),
                factor: m.factor().canonical_text(),
                inverse: m.is_inverse(),
            },
            Step::Automorphism(a) => CertStep::Automorphism {
                rows: a.matrix().to_rows_i64(),
            },
        })
        .collect()
}

/// Rebuild a map from serialized steps, re-validating every step invariant
/// (factor support on the weight hyperplane, unimodularity).
pub fn records_to_map(records: &[CertStep], n_vars: usize) -> Result<BirationalMap, Error> {
    let mut steps = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let step = match record {
            CertStep::Mutation {
                weight,
                factor,
                inverse,
            } => {
                let factor = LaurentPoly::parse_canonical(n_vars, factor)
                    .map_err(|e| Error::VerificationFailed(format!("step {}: {e}", i + 1)))?;
                Step::Mutation(
                    MutationStep::new(ExpVec::new(weight.clone()), factor, *inverse).map_err(
                        |e| Error::VerificationFailed(format!("step {} invalid: {e}", i + 1)),
                    )?,
                )
            }
            CertStep::Automorphism { rows } => Step::Automorphism(
                LatticeAutoStep::new(IntMatrix::from_rows_i64(rows))
                    .map_err(|e| Error::VerificationFailed(format!("step {} invalid: {e}", i + 1)))?,
            ),
        };
        steps.push(step);
    }
    Ok(BirationalMap::from_steps(n_vars, steps))
}

/// Assemble, verify, and serialize an equivalence certificate.
pub fn emit_equivalence(
    file: &ModelFile,
    first_name: &str,
    second_name: &str,
    seed: u64,
) -> Result<(EquivalenceCertificate, engine::EquivalenceOutcome), Error> {
    let model = file.model()?;
    let first = file.partition(first_name)?;
    let second = file.partition(second_name)?;
    let outcome = engine::assemble_phi(&model, &first, &second, seed)?;
    if !outcome.report.all_passed() {
        return Err(Error::VerificationFailed(format!(
            "identities failed: {}",
            outcome.report.failed_names().join(", ")
        )));
    }

    let w = model.superpotential();
    let mut claims = vec![ClaimRecord {
        name: "superpotential".into(),
        input: w.canonical_text(),
        expected: w.canonical_text(),
    }];
    for i in 1..=first.len() {
        claims.push(ClaimRecord {
            name: format!("part-sum-{i}"),
            input: model.partition_sum(first.part(i))?.canonical_text(),
            expected: model.partition_sum(second.part(i))?.canonical_text(),
        });
    }

    let volume = outcome
        .report
        .volume
        .as_ref()
        .ok_or_else(|| Error::Internal("missing volume check".into()))?;
    let mut cert = EquivalenceCertificate {
        kind: "equivalence".into(),
        model_hash: file.hash(),
        first: first_name.into(),
        second: second_name.into(),
        steps: steps_to_records(&outcome.map),
        claims,
        volume_determinant: volume.determinant,
        sample_seed: seed,
        cert_hash: String::new(),
    };
    cert.cert_hash = payload_hash(&cert);
    Ok((cert, outcome))
}

/// Replay an equivalence certificate against a model file. Every claim is
/// recomputed from the model; the steps are re-executed from their
/// serialized form; the volume determinant is re-sampled at the recorded
/// seed. Stored texts that disagree with the recomputation fail the claim.
pub fn verify_equivalence(
    file: &ModelFile,
    cert: &EquivalenceCertificate,
) -> Result<VerificationReport, Error> {
    if cert.model_hash != file.hash() {
        return Err(Error::InvalidInput(format!(
            "certificate is bound to model {} but the file hashes to {}",
            cert.model_hash,
            file.hash()
        )));
    }
    let mut report = VerificationReport::default();
    if payload_hash(cert) != cert.cert_hash {
        report
            .failures
            .push("certificate hash does not match its content".into());
    }

    let model = file.model()?;
    let first = file.partition(&cert.first)?;
    let second = file.partition(&cert.second)?;
    let map = match records_to_map(&cert.steps, model.rank()) {
        Ok(m) => m,
        Err(e) => {
            report.failures.push(e.to_string());
            return Ok(report);
        }
    };

    let w = model.superpotential();
    for claim in &cert.claims {
        let derived = if claim.name == "superpotential" {
            Some((w.clone(), w.clone()))
        } else if let Some(idx) = claim.name.strip_prefix("part-sum-") {
            match idx.parse::<usize>() {
                Ok(i) if i >= 1 && i <= first.len() => Some((
                    model.partition_sum(first.part(i))?,
                    model.partition_sum(second.part(i))?,
                )),
                _ => None,
            }
        } else {
            None
        };
        let Some((input, expected)) = derived else {
            report
                .failures
                .push(format!("unrecognized claim `{}`", claim.name));
            continue;
        };
        if input.canonical_text() != claim.input || expected.canonical_text() != claim.expected {
            report.failures.push(format!(
                "claim `{}` does not match the model-derived polynomials",
                claim.name
            ));
            continue;
        }
        report.check_pullback(&claim.name, &map, &input, &expected);
    }

    // every part must be claimed
    for i in 1..=first.len() {
        let name = format!("part-sum-{i}");
        if !cert.claims.iter().any(|c| c.name == name) {
            report.failures.push(format!("missing claim `{name}`"));
        }
    }
    if !cert.claims.iter().any(|c| c.name == "superpotential") {
        report.failures.push("missing claim `superpotential`".into());
    }

    report.check_volume(&map, engine::VOLUME_SAMPLES, cert.sample_seed);
    if let Some(v) = &report.volume {
        if v.determinant != cert.volume_determinant {
            report.failures.push(format!(
                "stored volume determinant {} but recomputed {}",
                cert.volume_determinant, v.determinant
            ));
        }
    }
    if let Err(e) = engine::point_oracle(&model, &map, engine::VOLUME_SAMPLES, cert.sample_seed) {
        report.failures.push(format!("point oracle: {e}"));
    }
    Ok(report)
}

fn matrix_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.to_rows_i64()
}

/// Build, verify, and serialize a mirror-equivalence certificate.
pub fn emit_mirror(
    file: &ModelFile,
    first_partition: &str,
    first_amenable: &str,
    second_partition: &str,
    second_amenable: &str,
    seed: u64,
) -> Result<(MirrorCertificate, mirror::MirrorEquivalence), Error> {
    let model = file.model()?;
    let fp = file.partition(first_partition)?;
    let fa = file.amenable_collection(first_amenable)?;
    let sp = file.partition(second_partition)?;
    let sa = file.amenable_collection(second_amenable)?;
    let eq = mirror::mirror_equivalence(&model, &fp, &fa, &sp, &sa, seed)?;
    if !eq.report.all_passed() {
        return Err(Error::VerificationFailed(format!(
            "identities failed: {}",
            eq.report.failed_names().join(", ")
        )));
    }
    let volume = eq
        .report
        .volume
        .as_ref()
        .ok_or_else(|| Error::Internal("missing volume check".into()))?;
    let mut cert = MirrorCertificate {
        kind: "mirror-equivalence".into(),
        model_hash: file.hash(),
        first_partition: first_partition.into(),
        first_amenable: first_amenable.into(),
        second_partition: second_partition.into(),
        second_amenable: second_amenable.into(),
        steps: steps_to_records(&eq.composite),
        basis_first: matrix_rows(&eq.first.basis),
        basis_second: matrix_rows(&eq.second.basis),
        mirror_first: eq.first.mirror.canonical_text(),
        mirror_second: eq.second.mirror.canonical_text(),
        volume_determinant: volume.determinant,
        sample_seed: seed,
        cert_hash: String::new(),
    };
    cert.cert_hash = payload_hash(&cert);
    Ok((cert, eq))
}

/// Replay a mirror certificate: rebuild both chains and mirrors from the
/// model file, rebuild the composite from the serialized steps, and re-run
/// the full identification, comparing everything stored.
pub fn verify_mirror(
    file: &ModelFile,
    cert: &MirrorCertificate,
) -> Result<VerificationReport, Error> {
    if cert.model_hash != file.hash() {
        return Err(Error::InvalidInput(format!(
            "certificate is bound to model {} but the file hashes to {}",
            cert.model_hash,
            file.hash()
        )));
    }
    let mut report = VerificationReport::default();
    if payload_hash(cert) != cert.cert_hash {
        report
            .failures
            .push("certificate hash does not match its content".into());
    }

    let model = file.model()?;
    let fp = file.partition(&cert.first_partition)?;
    let fa = file.amenable_collection(&cert.first_amenable)?;
    let sp = file.partition(&cert.second_partition)?;
    let sa = file.amenable_collection(&cert.second_amenable)?;

    let res_first = mirror::extract_mirror(&model, &fp, &fa, cert.sample_seed)?;
    let res_second = mirror::extract_mirror(&model, &sp, &sa, cert.sample_seed)?;
    check_mirror_payload(&mut report, "first", &res_first, &cert.basis_first, &cert.mirror_first);
    check_mirror_payload(
        &mut report,
        "second",
        &res_second,
        &cert.basis_second,
        &cert.mirror_second,
    );

    let composite = match records_to_map(&cert.steps, model.rank()) {
        Ok(m) => m,
        Err(e) => {
            report.failures.push(e.to_string());
            return Ok(report);
        }
    };
    let inner = mirror::verify_mirror_equivalence(
        &model,
        &fa,
        &res_first,
        &sa,
        &res_second,
        &composite,
        cert.sample_seed,
    )?;
    report.checks.extend(inner.checks);
    report.failures.extend(inner.failures);
    report.volume = inner.volume;
    if let Some(v) = &report.volume {
        if v.determinant != cert.volume_determinant {
            report.failures.push(format!(
                "stored volume determinant {} but recomputed {}",
                cert.volume_determinant, v.determinant
            ));
        }
    }
    Ok(report)
}

fn check_mirror_payload(
    report: &mut VerificationReport,
    side: &str,
    result: &MirrorResult,
    stored_basis: &[Vec<i64>],
    stored_mirror: &str,
) {
    if matrix_rows(&result.basis) != stored_basis {
        report
            .failures
            .push(format!("{side} basis does not match the recomputed one"));
    }
    if result.mirror.canonical_text() != stored_mirror {
        report.failures.push(format!(
            "{side} mirror does not match the recomputed one"
        ));
    }
}
