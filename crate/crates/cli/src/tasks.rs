//! One function per task. Each returns its report files as bytes so the
//! runner controls where and in which order they land.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use swleak::cipher::{self, CipherCase, GapEntry, KeySchedule, RatePoint, RegionCheck, SecurityReport};
use swleak::leakage::{measure_leakage, LeakageReport, WiretapScenario};
use swleak::netsim::{masked_rate_bound, simulate_network, Network, RateBound};
use swleak::probcore::{
    conditional_entropy, conditional_mutual_information, entropy, entropy_decomposition, JointPmf, SourceSubset,
};
use swleak::swcodec::{build_layout, LinearEncoder, PortionLayout};

use crate::config::{ExperimentConfig, Task, SCHEMA_VERSION};
use crate::error::CliError;
use crate::validate::{network_config, ALL_CASES};

/// A report file: name relative to the output directory and its contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Resolved inputs shared by every task.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: ExperimentConfig,
    pub pmf: JointPmf,
    pub base: PathBuf,
    pub config_hash: String,
}

impl Context {
    pub fn new(cfg: ExperimentConfig, base: PathBuf) -> Result<Self, CliError> {
        let pmf = cfg.pmf.load(&base)?;
        let config_hash = cfg.hash();
        Ok(Self {
            cfg,
            pmf,
            base,
            config_hash,
        })
    }

    fn provenance(&self) -> Provenance {
        Provenance {
            config_hash: self.config_hash.clone(),
            seed: self.cfg.seed,
            version: swleak::VERSION.to_string(),
        }
    }

    /// The experiment layout at `k`: the override when its K matches.
    fn layout(&self, k: usize, alpha: f64) -> Result<PortionLayout, CliError> {
        match self.cfg.layout_override()? {
            Some(l) if l.k == k => Ok(l),
            _ => Ok(build_layout(&self.pmf, k, alpha)?),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Serialize)]
struct JsonReport<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    provenance: Provenance,
    task: &'a str,
    data: T,
}

fn json_report<T: Serialize>(ctx: &Context, task: Task, name: &str, data: T) -> Result<Report, CliError> {
    let mut bytes = serde_json::to_vec_pretty(&JsonReport {
        schema_version: SCHEMA_VERSION,
        provenance: ctx.provenance(),
        task: task.name(),
        data,
    })?;
    bytes.push(b'\n');
    Ok(Report {
        name: name.into(),
        bytes,
    })
}

/// CSV with the provenance columns prepended to every row.
fn csv_report(ctx: &Context, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<Report, CliError> {
    let p = ctx.provenance();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["config_hash", "seed", "version"].iter().chain(header))?;
    let seed = p.seed.to_string();
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record([&p.config_hash, &seed, &p.version].into_iter().chain(&row))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Report {
        name: name.into(),
        bytes,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn list(v: &[usize]) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
}

pub fn run_task(ctx: &Context, task: Task) -> Result<Vec<Report>, CliError> {
    match task {
        Task::Entropy => entropy_task(ctx),
        Task::Decompose => decompose_task(ctx),
        Task::Leakage => leakage_task(ctx),
        Task::Cipher => cipher_task(ctx).map(|(reports, _)| reports),
        Task::Region => region_task(ctx),
        Task::Netsim => netsim_task(ctx),
    }
}

fn entropy_task(ctx: &Context) -> Result<Vec<Report>, CliError> {
    let pmf = &ctx.pmf;
    let n = pmf.num_sources();
    let mut rows = Vec::new();
    let mut push =
        |q: &str, s: &[usize], g: &[usize], v: f64| rows.push(vec![q.into(), list(s), list(g), v.to_string()]);
    for i in 0..n {
        push("H", &[i], &[], entropy(pmf, &SourceSubset::single(i))?.value);
    }
    let all: Vec<usize> = (0..n).collect();
    push("H", &all, &[], entropy(pmf, &SourceSubset::new(all.clone())?)?.value);
    for i in 0..n {
        for j in (i + 1)..n {
            push(
                "H_cond",
                &[i],
                &[j],
                conditional_entropy(pmf, &SourceSubset::single(i), &[j])?.value,
            );
            push(
                "H_cond",
                &[j],
                &[i],
                conditional_entropy(pmf, &SourceSubset::single(j), &[i])?.value,
            );
            let pair = SourceSubset::new(vec![i, j])?;
            push(
                "I",
                &[i, j],
                &[],
                conditional_mutual_information(pmf, &pair, &[])?.value,
            );
        }
    }
    if n >= 3 {
        push(
            "I",
            &all,
            &[],
            conditional_mutual_information(pmf, &SourceSubset::new(all.clone())?, &[])?.value,
        );
    }
    Ok(vec![csv_report(
        ctx,
        "entropy.csv",
        &["quantity", "sources", "given", "value_bits"],
        rows,
    )?])
}

fn decompose_task(ctx: &Context) -> Result<Vec<Report>, CliError> {
    let mut rows = Vec::new();
    for i in 0..ctx.pmf.num_sources() {
        for t in entropy_decomposition(&ctx.pmf, i)? {
            rows.push(vec![
                i.to_string(),
                t.to_string(),
                list(&t.subset),
                list(&t.given),
                t.sign.to_string(),
                t.quantity.value.to_string(),
            ]);
        }
    }
    Ok(vec![csv_report(
        ctx,
        "decompose.csv",
        &["source", "term", "subset", "given", "sign", "value_bits"],
        rows,
    )?])
}

#[derive(Serialize)]
struct LeakageEntry {
    alpha: f64,
    layout: String,
    encoder_seed: u64,
    report: LeakageReport,
}

fn leakage_task(ctx: &Context) -> Result<Vec<Report>, CliError> {
    let scenarios = ctx.cfg.scenario_list()?;
    let mut jobs = Vec::new();
    for k in ctx.cfg.block_lengths()? {
        for &alpha in &ctx.cfg.alpha {
            let layout = ctx.layout(k, alpha)?;
            let enc = LinearEncoder::new(layout, ctx.cfg.seed)?;
            for (_, portions) in &scenarios {
                jobs.push((
                    alpha,
                    enc.clone(),
                    WiretapScenario::new(portions, SourceSubset::single(0)),
                ));
            }
        }
    }
    let entries: Vec<LeakageEntry> = jobs
        .par_iter()
        .map(|(alpha, enc, sc)| {
            Ok(LeakageEntry {
                alpha: *alpha,
                layout: enc.layout.to_string(),
                encoder_seed: ctx.cfg.seed,
                report: measure_leakage(&ctx.pmf, enc.k(), enc, sc, ctx.cfg.tolerance)?,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let rows = entries
        .iter()
        .map(|e| {
            let r = &e.report;
            vec![
                r.tag.clone(),
                r.k.to_string(),
                e.alpha.to_string(),
                e.layout.clone(),
                r.measured_bits.to_string(),
                opt(r.lower_bound_bits),
                opt(r.upper_bound_bits),
                opt(r.delta_star),
                r.target_entropy_bits.to_string(),
                r.satisfied.to_string(),
            ]
        })
        .collect();
    Ok(vec![
        csv_report(
            ctx,
            "leakage.csv",
            &[
                "scenario",
                "k",
                "alpha",
                "layout",
                "measured",
                "lower",
                "upper",
                "delta_star",
                "target_entropy",
                "satisfied",
            ],
            rows,
        )?,
        json_report(ctx, Task::Leakage, "leakage.json", &entries)?,
    ])
}

/// Full result of one cipher evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct CipherOutcome {
    pub case: CipherCase,
    pub layout: String,
    pub encoder_seed: u64,
    pub keys: KeySchedule,
    pub security: SecurityReport,
    pub secret_leakage_bits: f64,
    pub point: RatePoint,
    pub region: RegionCheck,
    pub converse_gap: Vec<GapEntry>,
    /// Exhaustive decrypt(encrypt(.)) check; absent above 2^20 combinations.
    pub decryption_identity: Option<bool>,
}

const DECRYPT_CHECK_LIMIT: u64 = 1 << 20;

fn decryption_identity(enc: &LinearEncoder, keys: &KeySchedule) -> Result<Option<bool>, CliError> {
    let bits = 2 * enc.k() as u32 + keys.total_bits();
    if bits > DECRYPT_CHECK_LIMIT.trailing_zeros() {
        return Ok(None);
    }
    let n = 1u64 << enc.k();
    for key in 0..1u64 << keys.total_bits() {
        for x in 0..n {
            for y in 0..n {
                let b = enc.encode_pair(x, y);
                if cipher::decrypt(&cipher::encrypt(&b, keys, key)?, keys, key)? != b {
                    return Ok(Some(false));
                }
            }
        }
    }
    Ok(Some(true))
}

pub fn cipher_outcome(ctx: &Context) -> Result<CipherOutcome, CliError> {
    let s = &ctx.cfg.cipher;
    let case = s.case()?;
    let layout = match s.layout.as_deref() {
        Some(text) => text.parse()?,
        None => build_layout(&ctx.pmf, s.k, s.alpha)?,
    };
    let enc = LinearEncoder::new(layout, ctx.cfg.seed)?;
    let keys = cipher::build_keys(case, &layout, s.target, s.variant()?, &ctx.pmf, s.key_role()?)?;
    let security = cipher::measure_security(&ctx.pmf, layout.k, &enc, &keys, &cipher::default_view(case))?;
    let point = RatePoint::from_construction(&layout, &keys);
    let region = cipher::region_member(&point, case, &ctx.pmf)?;
    Ok(CipherOutcome {
        case,
        layout: layout.to_string(),
        encoder_seed: ctx.cfg.seed,
        secret_leakage_bits: security.secret_leakage(case.secret()),
        converse_gap: cipher::converse_gap(&point, case, &security),
        decryption_identity: decryption_identity(&enc, &keys)?,
        keys,
        security,
        point,
        region,
    })
}

pub fn cipher_task(ctx: &Context) -> Result<(Vec<Report>, CipherOutcome), CliError> {
    let o = cipher_outcome(ctx)?;
    let sec = &o.security;
    let row = vec![
        o.case.id().to_string(),
        serde_json::to_value(o.keys.variant)?
            .as_str()
            .unwrap_or_default()
            .to_string(),
        o.layout.clone(),
        o.keys.target_bits_per_symbol.to_string(),
        o.keys.total_bits().to_string(),
        sec.h_x_measured.to_string(),
        sec.h_y_measured.to_string(),
        sec.h_xy_measured.to_string(),
        o.secret_leakage_bits.to_string(),
        o.region.member.to_string(),
        o.decryption_identity.map(|b| b.to_string()).unwrap_or_default(),
    ];
    let reports = vec![
        csv_report(
            ctx,
            "cipher.csv",
            &[
                "case",
                "variant",
                "layout",
                "target",
                "key_bits",
                "h_x_measured",
                "h_y_measured",
                "h_xy_measured",
                "secret_leakage_bits",
                "region_member",
                "decryption_identity",
            ],
            vec![row],
        )?,
        json_report(ctx, Task::Cipher, "cipher.json", &o)?,
    ];
    Ok((reports, o))
}

/// Slepian-Wolf corner `(H(X|Y), H(Y))` with zero keys and targets.
fn corner_point(pmf: &JointPmf) -> Result<RatePoint, CliError> {
    let e = cipher::PairEntropies::of(pmf)?;
    Ok(RatePoint {
        r_x: e.h_x_given_y,
        r_y: e.h_y,
        r_kx: 0.0,
        r_ky: 0.0,
        h_x: 0.0,
        h_y: 0.0,
        h_xy: 0.0,
    })
}

fn region_task(ctx: &Context) -> Result<Vec<Report>, CliError> {
    let cases = if ctx.cfg.region.cases.is_empty() {
        ALL_CASES.to_vec()
    } else {
        ctx.cfg
            .region
            .cases
            .iter()
            .map(|&id| CipherCase::try_from(id))
            .collect::<Result<_, _>>()?
    };
    let points = if ctx.cfg.region.points.is_empty() {
        vec![corner_point(&ctx.pmf)?]
    } else {
        ctx.cfg.region.points.clone()
    };
    let mut rows = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for &case in &cases {
            let (member, violated, error) = match cipher::region_member(p, case, &ctx.pmf) {
                Ok(r) => (
                    r.member.to_string(),
                    r.violations
                        .iter()
                        .map(|v| v.constraint.as_str())
                        .collect::<Vec<_>>()
                        .join(";"),
                    String::new(),
                ),
                Err(e) => (String::new(), String::new(), e.to_string()),
            };
            rows.push(vec![
                i.to_string(),
                case.id().to_string(),
                p.r_x.to_string(),
                p.r_y.to_string(),
                p.r_kx.to_string(),
                p.r_ky.to_string(),
                p.h_x.to_string(),
                p.h_y.to_string(),
                p.h_xy.to_string(),
                member,
                violated,
                error,
            ]);
        }
    }
    Ok(vec![csv_report(
        ctx,
        "region.csv",
        &[
            "point", "case", "r_x", "r_y", "r_kx", "r_ky", "h_x", "h_y", "h_xy", "member", "violated", "error",
        ],
        rows,
    )?])
}

#[derive(Serialize)]
struct NetsimSummary {
    rate_bound: RateBound,
    layouts: Vec<swleak::netsim::SourceLayout>,
    plan: swleak::netsim::MaskPlan,
}

fn netsim_task(ctx: &Context) -> Result<Vec<Report>, CliError> {
    let pmf = match &ctx.cfg.netsim.pmf {
        Some(spec) => spec.load(&ctx.base)?,
        None => ctx.pmf.clone(),
    };
    let cfg = network_config(&ctx.cfg, pmf);
    cfg.sources.check()?;
    let net = Network::build(&cfg)?;
    let plan = net.plan();
    let adversaries = cfg.effective_adversaries();
    let results: Vec<(Vec<LeakageReport>, Vec<LeakageReport>)> = adversaries
        .par_iter()
        .map(|a| {
            Ok((
                simulate_network(&net, None, a)?,
                simulate_network(&net, Some(&plan), a)?,
            ))
        })
        .collect::<Result<_, CliError>>()?;
    let mut rows = Vec::new();
    for (a, (plain, masked)) in adversaries.iter().zip(&results) {
        for (i, (p, m)) in plain.iter().zip(masked).enumerate() {
            rows.push(vec![
                list(a),
                i.to_string(),
                cfg.sources.k.to_string(),
                p.measured_bits.to_string(),
                m.measured_bits.to_string(),
                (m.measured_bits - p.measured_bits).to_string(),
                p.target_entropy_bits.to_string(),
            ]);
        }
    }
    let summary = NetsimSummary {
        rate_bound: masked_rate_bound(&cfg.sources)?,
        layouts: net.layouts.clone(),
        plan,
    };
    Ok(vec![
        csv_report(
            ctx,
            "netsim.csv",
            &[
                "adversary_links",
                "source",
                "k",
                "unmasked",
                "masked",
                "change",
                "source_entropy",
            ],
            rows,
        )?,
        json_report(ctx, Task::Netsim, "netsim.json", &summary)?,
    ])
}
