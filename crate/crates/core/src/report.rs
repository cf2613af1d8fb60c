//! The machine-readable report emitted by every CLI command and the JSON
//! entry points of the C API.
//!
//! The key set is stable across commands: `command`, `domain`, `mapping`,
//! `seed`, `samples`, `verdict`, `margins`, `witness`, `timing_ms`, with
//! command-specific scalars added next to them. For a fixed configuration and
//! seed the serialized report is byte-identical across runs and thread
//! counts, except for `timing_ms`.

use serde::{Deserialize, Serialize};

use crate::config::{pairs_from_vector, DomainConfig, MappingConfig};
use crate::criterion::{CriterionEvaluation, ScanReport};
use crate::falsifier::{CampaignReport, SearchResult};
use crate::geometry::RhoResult;
use crate::hypotheses::CheckReport;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginEntry {
    pub condition_id: String,
    pub margin: f64,
    pub witness_z: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub z: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    pub j_value: f64,
    pub residual: f64,
}

impl WitnessEntry {
    fn from_eval(eval: &CriterionEvaluation) -> Self {
        Self {
            z: pairs_from_vector(&eval.z),
            b: pairs_from_vector(&eval.b),
            j_value: eval.j_value,
            residual: eval.constraint_residual,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub domain: DomainConfig,
    pub mapping: Option<MappingConfig>,
    pub seed: u64,
    pub samples: u64,
    pub verdict: String,
    pub margins: Vec<MarginEntry>,
    pub witness: Option<WitnessEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub below_tol: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular_skips: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts_converged: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock duration; the single field excluded from byte-level
    /// reproducibility.
    pub timing_ms: u64,
}

impl Report {
    fn new(command: &str, domain: DomainConfig, mapping: Option<MappingConfig>) -> Self {
        Self {
            command: command.to_string(),
            domain,
            mapping,
            seed: 0,
            samples: 0,
            verdict: String::new(),
            margins: Vec::new(),
            witness: None,
            rho: None,
            residual: None,
            min_j: None,
            below_tol: None,
            singular_skips: None,
            restarts_converged: None,
            notes: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn for_rho(domain: DomainConfig, rho: &RhoResult) -> Self {
        let mut r = Self::new("rho", domain, None);
        r.verdict = "ok".into();
        r.rho = Some(rho.rho);
        r.residual = Some(rho.residual);
        r
    }

    pub fn for_check(
        command: &str,
        domain: DomainConfig,
        mapping: MappingConfig,
        check: &CheckReport,
    ) -> Self {
        let mut r = Self::new(command, domain, Some(mapping));
        r.seed = check.seed;
        r.samples = check.samples_used as u64;
        r.verdict = if check.passed { "pass" } else { "fail" }.into();
        r.margins = check
            .margins
            .iter()
            .map(|m| MarginEntry {
                condition_id: m.condition_id.clone(),
                margin: m.margin,
                witness_z: m.witness_z.as_ref().map(pairs_from_vector),
            })
            .collect();
        r.notes = check.notes.clone();
        r
    }

    pub fn for_scan(domain: DomainConfig, mapping: MappingConfig, scan: &ScanReport) -> Self {
        let mut r = Self::new("scan", domain, Some(mapping));
        r.seed = scan.seed;
        r.samples = scan.samples_used as u64;
        r.verdict = scan_verdict(scan.min_j, scan.tol).into();
        r.min_j = Some(scan.min_j);
        r.below_tol = Some(scan.below_tol as u64);
        r.singular_skips = Some(scan.singular_skips as u64);
        r.witness = Some(WitnessEntry::from_eval(&scan.witness));
        r
    }

    pub fn for_falsify(
        domain: DomainConfig,
        mapping: MappingConfig,
        seed: u64,
        tol: f64,
        result: &SearchResult,
    ) -> Self {
        let mut r = Self::new("falsify", domain, Some(mapping));
        r.seed = seed;
        r.verdict = scan_verdict(result.min_j, tol).into();
        r.min_j = Some(result.min_j);
        r.singular_skips = Some(result.singular_hits as u64);
        r.restarts_converged = Some(result.restarts_converged as u64);
        r.witness = Some(WitnessEntry::from_eval(&result.witness));
        r
    }

    pub fn for_certify(
        domain: DomainConfig,
        mapping: MappingConfig,
        seed: u64,
        campaign: &CampaignReport,
    ) -> Self {
        let mut r = Self::new("certify", domain, Some(mapping));
        r.seed = seed;
        r.samples = campaign.scan.samples_used as u64;
        r.verdict = if campaign.violation_found {
            "violation"
        } else {
            "no violation found"
        }
        .into();
        r.min_j = Some(campaign.min_j);
        r.below_tol = Some(campaign.scan.below_tol as u64);
        r.singular_skips =
            Some((campaign.scan.singular_skips + campaign.search.singular_hits) as u64);
        r.restarts_converged = Some(campaign.search.restarts_converged as u64);
        let best = if campaign.search.min_j <= campaign.scan.min_j {
            &campaign.search.witness
        } else {
            &campaign.scan.witness
        };
        r.witness = Some(WitnessEntry::from_eval(best));
        r
    }

    /// 0 on pass / no violation, 1 on fail / violation.
    pub fn exit_code(&self) -> u8 {
        match self.verdict.as_str() {
            "pass" | "no violation found" | "ok" => 0,
            _ => 1,
        }
    }

    /// Serializes with a trailing newline. `f64` values round-trip exactly
    /// (shortest-representation encoding), so witnesses re-evaluate to the
    /// reported `j_value` bit for bit.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

fn scan_verdict(min_j: f64, tol: f64) -> &'static str {
    if min_j < -tol {
        "violation"
    } else {
        "no violation found"
    }
}
