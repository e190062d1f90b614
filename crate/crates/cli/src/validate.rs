//! Structural and range checks on an experiment config. Never mutates and
//! never fails: problems come back as diagnostics.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use swleak::cipher::{self, CipherCase, PairEntropies, Secret};
use swleak::netsim::{MultiSourceConfig, NetworkConfig};
use swleak::oracle::{enumeration_size, ORACLE_BUDGET};
use swleak::probcore::JointPmf;
use swleak::swcodec::{build_layout, MAX_BLOCK, MIN_BLOCK};

use crate::config::{parse_scenario, ExperimentConfig, PmfSpec, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{s}: {}: {}", self.field, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

#[derive(Default)]
struct Collector(Vec<Diagnostic>);

impl Collector {
    fn error(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic {
            severity: Severity::Error,
            field: field.into(),
            message: message.into(),
        });
    }

    fn warn(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic {
            severity: Severity::Warning,
            field: field.into(),
            message: message.into(),
        });
    }
}

fn log2_label(n: u128) -> String {
    if n == u128::MAX {
        return "more than 2^64".into();
    }
    format!("about 2^{:.1}", (n as f64).log2())
}

fn check_budget(c: &mut Collector, field: &str, pmf: &JointPmf, k: usize, key_bits: u32) {
    let size = enumeration_size(pmf, k, key_bits);
    if size > ORACLE_BUDGET {
        c.error(
            field,
            format!(
                "K={k} needs {} enumerated outcomes, above the oracle budget of 2^28",
                log2_label(size)
            ),
        );
    }
}

fn check_pmf_spec(c: &mut Collector, field: &str, spec: &PmfSpec, base: &Path) -> Option<JointPmf> {
    if let PmfSpec::Inline { probs, .. } = spec {
        let mut bad = false;
        for (i, p) in probs.iter().enumerate() {
            if *p < 0.0 || !p.is_finite() {
                c.error(
                    format!("{field}.probs[{i}]"),
                    format!("negative or non-finite probability {p}"),
                );
                bad = true;
            }
        }
        if bad {
            return None;
        }
    }
    match spec.load(base) {
        Ok(p) => Some(p),
        Err(e) => {
            c.error(field, e.to_string());
            None
        }
    }
}

fn target_names(case: CipherCase) -> (&'static str, &'static str) {
    match case.secret() {
        Secret::Joint => ("h_XY", "H(X,Y)"),
        Secret::X => ("h_X", "H(X)"),
        Secret::Y => ("h_Y", "H(Y)"),
        Secret::Both => ("h_X = h_Y", "min(H(X), H(Y))"),
    }
}

/// Diagnostics for `cfg`, with relative pmf paths resolved against `base`.
pub fn validate(cfg: &ExperimentConfig, base: &Path) -> Vec<Diagnostic> {
    let mut c = Collector::default();
    let pmf = check_pmf_spec(&mut c, "pmf", &cfg.pmf, base);
    let wants = |t: Task| cfg.tasks.contains(&t);
    let two_source = |c: &mut Collector, task: Task| -> Option<JointPmf> {
        let p = pmf.clone()?;
        if p.num_sources() != 2 {
            c.error(
                "pmf",
                format!(
                    "task {} needs a two-source pmf, got {} sources",
                    task.name(),
                    p.num_sources()
                ),
            );
            return None;
        }
        Some(p)
    };

    let ks = cfg.block_lengths().unwrap_or_default();
    if wants(Task::Leakage) && ks.is_empty() {
        c.error("k", "leakage needs at least one block length");
    }
    for (i, &k) in ks.iter().enumerate() {
        let field = format!("k[{i}]");
        if !(MIN_BLOCK..=MAX_BLOCK).contains(&k) {
            c.error(&field, format!("K={k} outside {MIN_BLOCK}..={MAX_BLOCK}"));
        }
        if let Some(p) = &pmf {
            check_budget(&mut c, &field, p, k, 0);
        }
    }
    for (i, a) in cfg.alpha.iter().enumerate() {
        if !(0.0..=1.0).contains(a) {
            c.error(format!("alpha[{i}]"), format!("alpha={a} outside [0, 1]"));
        }
    }
    for (i, s) in cfg.scenarios.iter().enumerate() {
        if let Err(e) = parse_scenario(s) {
            c.error(format!("scenarios[{i}]"), format!("{s:?}: {e}"));
        }
    }
    let tol = cfg.tolerance;
    if swleak::leakage::Tolerance::new(tol.delta_bits, tol.delta1_bits).is_err() {
        c.error("tolerance", "slack must satisfy 0 <= delta1 <= delta");
    }
    match cfg.layout_override() {
        Err(e) => c.error("layout", e.to_string()),
        Ok(Some(l)) => {
            if !cfg.k.is_empty() && !cfg.k.contains(&l.k) {
                c.warn(
                    "layout",
                    format!("layout has K={} which is not in the K list; it is unused", l.k),
                );
            }
            if let Some(p) = pmf.as_ref().filter(|p| p.num_sources() == 2 && p.is_binary()) {
                if let Err(e) = l.check_targets(p) {
                    c.warn("layout", format!("{e}"));
                }
            }
        }
        Ok(None) => {}
    }
    if wants(Task::Leakage) {
        if let Some(p) = two_source(&mut c, Task::Leakage) {
            for &k in ks.iter().filter(|k| (MIN_BLOCK..=MAX_BLOCK).contains(*k)) {
                for a in cfg.alpha.iter().filter(|a| (0.0..=1.0).contains(*a)) {
                    if let Err(e) = build_layout(&p, k, *a) {
                        c.error("pmf", format!("no layout at K={k}, alpha={a}: {e}"));
                    }
                }
            }
        }
    }

    let cipher_pmf = if wants(Task::Cipher) {
        two_source(&mut c, Task::Cipher)
    } else {
        None
    };
    validate_cipher(&mut c, cfg, cipher_pmf);
    let region_pmf = if wants(Task::Region) {
        two_source(&mut c, Task::Region)
    } else {
        None
    };
    validate_region(&mut c, cfg, region_pmf);
    if wants(Task::Netsim) {
        let net_pmf = match &cfg.netsim.pmf {
            Some(spec) => check_pmf_spec(&mut c, "netsim.pmf", spec, base),
            None => pmf.clone(),
        };
        if let Some(p) = net_pmf {
            validate_netsim(&mut c, cfg, p);
        }
    }
    c.0
}

fn validate_cipher(c: &mut Collector, cfg: &ExperimentConfig, pmf: Option<JointPmf>) {
    let s = &cfg.cipher;
    let case = match s.case() {
        Ok(case) => Some(case),
        Err(_) => {
            c.error("cipher.case", format!("unknown case {}, expected 1..=5", s.case));
            None
        }
    };
    let variant = s.variant();
    if let Err(e) = &variant {
        c.error("cipher.variant", e.to_string());
    }
    let role = s.key_role();
    if let Err(e) = &role {
        c.error("cipher.key_role", e.to_string());
    }
    if !(MIN_BLOCK..=MAX_BLOCK).contains(&s.k) {
        c.error("cipher.k", format!("K={} outside {MIN_BLOCK}..={MAX_BLOCK}", s.k));
        return;
    }
    let layout = match s
        .layout
        .as_deref()
        .map(str::parse::<swleak::swcodec::PortionLayout>)
        .transpose()
    {
        Ok(l) => l,
        Err(e) => {
            c.error("cipher.layout", e.to_string());
            return;
        }
    };
    if let Some(l) = layout.filter(|l| l.k != s.k) {
        c.error("cipher.layout", format!("layout has K={} but cipher.k is {}", l.k, s.k));
        return;
    }
    let (Some(case), Some(pmf), Ok(variant), Ok(role)) = (case, pmf, variant, role) else {
        return;
    };
    let (name, bound) = target_names(case);
    let max = match (case, PairEntropies::of(&pmf)) {
        (CipherCase::Three, Ok(e)) => e.h_x.min(e.h_y),
        (_, _) => case.max_target(&pmf).unwrap_or(f64::NAN),
    };
    if !(s.target >= 0.0 && s.target <= max + cipher::REGION_TOL) {
        c.error(
            "cipher.target",
            format!(
                "case {} requires 0 <= {name} <= {bound} = {max:.6}, got {}",
                case.id(),
                s.target
            ),
        );
        return;
    }
    let layout = match layout.map_or_else(|| build_layout(&pmf, s.k, s.alpha), Ok) {
        Ok(l) => l,
        Err(e) => {
            c.error("cipher", e.to_string());
            return;
        }
    };
    match cipher::build_keys(case, &layout, s.target, variant, &pmf, role) {
        Ok(keys) => check_budget(c, "cipher.k", &pmf, s.k, keys.total_bits()),
        Err(e) => c.error("cipher", e.to_string()),
    }
}

fn validate_region(c: &mut Collector, cfg: &ExperimentConfig, pmf: Option<JointPmf>) {
    let cases: Vec<CipherCase> = cfg
        .region
        .cases
        .iter()
        .enumerate()
        .filter_map(|(i, &id)| match CipherCase::try_from(id) {
            Ok(case) => Some(case),
            Err(_) => {
                c.error(
                    format!("region.cases[{i}]"),
                    format!("unknown case {id}, expected 1..=5"),
                );
                None
            }
        })
        .collect();
    let Some(pmf) = pmf else { return };
    let cases = if cfg.region.cases.is_empty() {
        ALL_CASES.to_vec()
    } else {
        cases
    };
    for (i, p) in cfg.region.points.iter().enumerate() {
        for &case in &cases {
            if let Err(e) = cipher::region_member(p, case, &pmf) {
                c.error(format!("region.points[{i}]"), format!("case {}: {e}", case.id()));
            }
        }
    }
}

pub(crate) const ALL_CASES: [CipherCase; 5] = [
    CipherCase::One,
    CipherCase::Two,
    CipherCase::Three,
    CipherCase::Four,
    CipherCase::Five,
];

pub(crate) fn network_config(cfg: &ExperimentConfig, pmf: JointPmf) -> NetworkConfig {
    let n = &cfg.netsim;
    let mut sources = MultiSourceConfig::new(pmf, n.k, cfg.seed);
    sources.allocations = n.allocations.clone();
    NetworkConfig {
        sources,
        links: n.links.clone(),
        adversaries: n.adversaries.clone(),
        combination_masks: n.combination_masks,
    }
}

fn validate_netsim(c: &mut Collector, cfg: &ExperimentConfig, pmf: JointPmf) {
    let net = network_config(cfg, pmf);
    if let Err(e) = net.sources.check() {
        c.error("netsim", e.to_string());
        return;
    }
    let n = net.sources.num_sources();
    for (i, l) in net.links.iter().enumerate() {
        if l.source >= n {
            c.error(
                format!("netsim.links[{i}]"),
                format!("source {} does not exist", l.source),
            );
        }
    }
    let m = net.effective_links().len();
    for (i, a) in net.adversaries.iter().enumerate() {
        if a.iter().any(|&l| l >= m) {
            c.error(
                format!("netsim.adversaries[{i}]"),
                format!("references a link outside 0..{m}"),
            );
        }
    }
    check_budget(c, "netsim.k", &net.sources.pmf, net.sources.k, 0);
    if let Err(e) = swleak::netsim::allocate_portions(&net.sources) {
        c.error("netsim.allocations", e.to_string());
    }
}
