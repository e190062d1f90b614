//! Wiretap scenarios over the four syndrome portions, exact leakage, and the
//! bound intervals with finite-K slack.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::oracle::{self, FnObservation, ObservationMap, PortionObservation, ORACLE_BUDGET};
use crate::probcore::{conditional_entropy, entropy, JointPmf, SourceSubset};
use crate::swcodec::{LinearEncoder, Portion, SourceEncoder};

/// A set of wiretapped portions and the sources whose leakage is measured.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WiretapScenario {
    pub observed: Vec<Portion>,
    pub target: SourceSubset,
}

/// The four wiretap sets that carry a closed-form bound on leakage about X.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCase {
    /// `{V_X, V_Y}`
    Private,
    /// `{V_CX, V_CY}`
    Common,
    /// `{V_CX, V_CY, V_Y}`
    CommonWithY,
    /// `{V_Y, V_CY}`
    YSyndrome,
}

impl BoundCase {
    pub const ALL: [BoundCase; 4] = [
        BoundCase::Private,
        BoundCase::Common,
        BoundCase::CommonWithY,
        BoundCase::YSyndrome,
    ];

    pub fn portions(self) -> &'static [Portion] {
        match self {
            BoundCase::Private => &[Portion::Vx, Portion::Vy],
            BoundCase::Common => &[Portion::Vcx, Portion::Vcy],
            BoundCase::CommonWithY => &[Portion::Vcx, Portion::Vcy, Portion::Vy],
            BoundCase::YSyndrome => &[Portion::Vcy, Portion::Vy],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            BoundCase::Private => "vx_vy",
            BoundCase::Common => "vcx_vcy",
            BoundCase::CommonWithY => "vcx_vcy_vy",
            BoundCase::YSyndrome => "vy_vcy",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.tag() == tag)
    }

    pub fn scenario(self) -> WiretapScenario {
        WiretapScenario::new(self.portions(), SourceSubset::single(0))
    }
}

impl WiretapScenario {
    pub fn new(observed: &[Portion], target: SourceSubset) -> Self {
        let mut observed = observed.to_vec();
        observed.sort();
        observed.dedup();
        Self { observed, target }
    }

    /// The bound case this scenario falls in, if any; bounds are about X.
    pub fn bound_case(&self) -> Option<BoundCase> {
        if self.target.members() != [0] {
            return None;
        }
        BoundCase::ALL
            .into_iter()
            .find(|c| WiretapScenario::new(c.portions(), self.target.clone()).observed == self.observed)
    }

    /// `vcx_vcy`-style tag, `none` for the empty set.
    pub fn tag(&self) -> String {
        if self.observed.is_empty() {
            return "none".into();
        }
        self.observed
            .iter()
            .map(|p| p.name().replace('_', ""))
            .collect::<Vec<_>>()
            .join("_")
    }
}

impl fmt::Display for WiretapScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {:?}", self.tag(), self.target.members())
    }
}

/// Slack allowed in a bound, in bits per block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub delta_bits: f64,
    pub delta1_bits: f64,
}

impl Tolerance {
    pub fn new(delta_bits: f64, delta1_bits: f64) -> Result<Self> {
        if !(delta_bits >= 0.0 && delta1_bits >= 0.0) {
            return domain("slack must be non-negative");
        }
        if delta1_bits > delta_bits {
            return domain("delta1 cannot exceed delta");
        }
        Ok(Self {
            delta_bits,
            delta1_bits,
        })
    }

    pub fn zero() -> Self {
        Self {
            delta_bits: 0.0,
            delta1_bits: 0.0,
        }
    }
}

/// Realized entropies of the source block and each portion, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortionEntropies {
    pub h_source: f64,
    pub h_vx: f64,
    pub h_vcx: f64,
    pub h_vcy: f64,
    pub h_vy: f64,
}

impl PortionEntropies {
    pub fn get(&self, p: Portion) -> f64 {
        match p {
            Portion::Vx => self.h_vx,
            Portion::Vcx => self.h_vcx,
            Portion::Vcy => self.h_vcy,
            Portion::Vy => self.h_vy,
        }
    }
}

/// Oracle entropies of the realized portions and `H(X^K)`.
pub fn portion_entropies(pmf: &JointPmf, k: usize, enc: &LinearEncoder) -> Result<PortionEntropies> {
    let h = |p| oracle::exact_observation_entropy(pmf, k, &PortionObservation::new(enc, &[p])).map(|r| r.h_bits);
    Ok(PortionEntropies {
        h_source: k as f64 * entropy(pmf, &SourceSubset::single(0))?.value,
        h_vx: h(Portion::Vx)?,
        h_vcx: h(Portion::Vcx)?,
        h_vcy: h(Portion::Vcy)?,
        h_vy: h(Portion::Vy)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInterval {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub has_bound: bool,
}

impl BoundInterval {
    pub fn none() -> Self {
        Self {
            lower: None,
            upper: None,
            has_bound: false,
        }
    }

    /// Smallest non-negative slack that puts `measured` inside the interval
    /// evaluated at zero slack.
    pub fn minimal_slack(scenario: &WiretapScenario, pe: &PortionEntropies, measured: f64) -> Option<f64> {
        let at_zero = bound_interval(scenario, pe, Tolerance::zero());
        if !at_zero.has_bound {
            return None;
        }
        let over = at_zero.upper.map_or(0.0, |u| measured - u);
        let under = at_zero.lower.map_or(0.0, |l| l - measured);
        Some(over.max(under).max(0.0))
    }
}

/// The closed-form interval for the scenario's case, or no bound.
pub fn bound_interval(scenario: &WiretapScenario, pe: &PortionEntropies, tol: Tolerance) -> BoundInterval {
    let d = tol.delta_bits;
    let hx = pe.h_source;
    let (lower, upper) = match scenario.bound_case() {
        None => return BoundInterval::none(),
        Some(BoundCase::Private) => (None, hx - pe.h_vcx - pe.h_vcy + d),
        Some(BoundCase::Common | BoundCase::CommonWithY) => (None, hx - pe.h_vx - pe.h_vcy + d),
        Some(BoundCase::YSyndrome) => (Some(pe.h_vcy - d), hx - pe.h_vx - pe.h_vcx + d),
    };
    BoundInterval {
        lower,
        upper: Some(upper),
        has_bound: true,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub scenario: WiretapScenario,
    pub tag: String,
    pub k: usize,
    pub measured_bits: f64,
    /// `K*H(target)`: the measured value never exceeds it.
    pub target_entropy_bits: f64,
    pub lower_bound_bits: Option<f64>,
    pub upper_bound_bits: Option<f64>,
    pub slack_used: Tolerance,
    pub delta_star: Option<f64>,
    pub satisfied: bool,
    pub has_bound: bool,
    pub note: Option<String>,
}

impl LeakageReport {
    pub fn row(&self) -> LeakageRow {
        LeakageRow {
            scenario: self.tag.clone(),
            k: self.k,
            measured: self.measured_bits,
            lower: self.lower_bound_bits,
            upper: self.upper_bound_bits,
            delta_star: self.delta_star,
        }
    }
}

/// Flat CSV row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageRow {
    pub scenario: String,
    pub k: usize,
    pub measured: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub delta_star: Option<f64>,
}

/// Exact `I(target^K; observed portions)` together with the scenario's bound.
pub fn measure_leakage(
    pmf: &JointPmf,
    k: usize,
    enc: &LinearEncoder,
    scenario: &WiretapScenario,
    tol: Tolerance,
) -> Result<LeakageReport> {
    if enc.k() != k {
        return domain(format!("encoder has K={}, scenario asks for K={k}", enc.k()));
    }
    let obs = PortionObservation::new(enc, &scenario.observed);
    let measured = oracle::exact_mutual_information(pmf, k, &obs, &scenario.target)?.h_bits;
    let target_entropy = k as f64 * entropy(pmf, &scenario.target)?.value;
    let (interval, delta_star) = if scenario.bound_case().is_some() {
        let pe = portion_entropies(pmf, k, enc)?;
        (
            bound_interval(scenario, &pe, tol),
            BoundInterval::minimal_slack(scenario, &pe, measured),
        )
    } else {
        (BoundInterval::none(), None)
    };
    Ok(LeakageReport {
        scenario: scenario.clone(),
        tag: scenario.tag(),
        k,
        measured_bits: measured,
        target_entropy_bits: target_entropy,
        lower_bound_bits: interval.lower,
        upper_bound_bits: interval.upper,
        slack_used: tol,
        delta_star,
        satisfied: delta_star.is_none_or(|d| d <= tol.delta_bits + 1e-12),
        has_bound: interval.has_bound,
        note: (!interval.has_bound).then(|| "no bound for this scenario".to_string()),
    })
}

/// Packs every portion of one source's encoder into an observation.
fn syndrome_observation(enc: &SourceEncoder) -> impl ObservationMap + '_ {
    FnObservation::new(0, move |words: &[u64], _| {
        enc.encode(words[enc.source])
            .iter()
            .fold(0u128, |acc, w| (acc << w.width()) | u128::from(w.bits()))
    })
}

/// Exact `I(S_i^K; T_{S_j})` in an n-source setting.
///
/// For `i == j` the report's lower bound is `K*I(S_i; rest)`, the sum of all
/// common terms of `S_i`'s entropy decomposition, as an annotation.
pub fn multi_source_leakage(
    pmf: &JointPmf,
    k: usize,
    encs: &[SourceEncoder],
    i: usize,
    j: usize,
) -> Result<LeakageReport> {
    let n = pmf.num_sources();
    if i >= n || j >= n {
        return domain(format!("source index out of range for {n} sources"));
    }
    let enc = encs
        .iter()
        .find(|e| e.source == j)
        .ok_or_else(|| crate::Error::Domain(format!("no encoder for source {j}")))?;
    if enc.k != k {
        return domain("encoder block length mismatch");
    }
    let target = SourceSubset::single(i);
    let measured = oracle::exact_mutual_information(pmf, k, &syndrome_observation(enc), &target)?.h_bits;
    let h_i = entropy(pmf, &target)?.value;
    let lower = if i == j {
        let rest = target.complement(n);
        let private = if rest.is_empty() {
            h_i
        } else {
            conditional_entropy(pmf, &target, &rest)?.value
        };
        Some(k as f64 * (h_i - private))
    } else {
        None
    };
    Ok(LeakageReport {
        scenario: WiretapScenario {
            observed: Vec::new(),
            target,
        },
        tag: format!("s{i}_from_t{j}"),
        k,
        measured_bits: measured,
        target_entropy_bits: k as f64 * h_i,
        lower_bound_bits: lower,
        upper_bound_bits: None,
        slack_used: Tolerance::zero(),
        delta_star: None,
        satisfied: true,
        has_bound: false,
        note: lower.map(|_| "lower bound: common information of the source".to_string()),
    })
}

/// Checks that the budget admits the scenario before running it.
pub fn fits_budget(pmf: &JointPmf, k: usize) -> bool {
    oracle::enumeration_size(pmf, k, 0) <= ORACLE_BUDGET
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swcodec::build_layout;

    fn dsbs_encoder(k: usize) -> (JointPmf, LinearEncoder) {
        let pmf = JointPmf::dsbs(0.1).unwrap();
        let enc = LinearEncoder::new(build_layout(&pmf, k, 0.5).unwrap(), 17).unwrap();
        (pmf, enc)
    }

    #[test]
    fn classification() {
        for c in BoundCase::ALL {
            assert_eq!(c.scenario().bound_case(), Some(c));
            assert_eq!(BoundCase::from_tag(c.tag()), Some(c));
            assert_eq!(c.scenario().tag(), c.tag().replace("vy_vcy", "vcy_vy"));
        }
        let y_target = WiretapScenario::new(&[Portion::Vx, Portion::Vy], SourceSubset::single(1));
        assert_eq!(y_target.bound_case(), None);
        assert_eq!(
            WiretapScenario::new(&[Portion::Vx], SourceSubset::single(0)).bound_case(),
            None
        );
    }

    #[test]
    fn tolerance_rules() {
        assert!(Tolerance::new(0.1, 0.2).is_err());
        assert!(Tolerance::new(-0.1, 0.0).is_err());
        assert!(Tolerance::new(0.2, 0.1).is_ok());
    }

    #[test]
    fn interval_shapes() {
        let pe = PortionEntropies {
            h_source: 6.0,
            h_vx: 2.0,
            h_vcx: 1.5,
            h_vcy: 1.25,
            h_vy: 2.5,
        };
        let tol = Tolerance::new(0.5, 0.0).unwrap();
        let b = bound_interval(&BoundCase::Private.scenario(), &pe, tol);
        assert_eq!((b.lower, b.upper), (None, Some(6.0 - 1.5 - 1.25 + 0.5)));
        for c in [BoundCase::Common, BoundCase::CommonWithY] {
            let b = bound_interval(&c.scenario(), &pe, tol);
            assert_eq!((b.lower, b.upper), (None, Some(6.0 - 2.0 - 1.25 + 0.5)));
        }
        let b = bound_interval(&BoundCase::YSyndrome.scenario(), &pe, tol);
        assert_eq!((b.lower, b.upper), (Some(1.25 - 0.5), Some(6.0 - 2.0 - 1.5 + 0.5)));
        let other = WiretapScenario::new(&[Portion::Vx], SourceSubset::single(0));
        assert!(!bound_interval(&other, &pe, tol).has_bound);
    }

    #[test]
    fn independent_sources_collapse_to_delta() {
        let pmf = JointPmf::uniform(vec![2, 2]).unwrap();
        let enc = LinearEncoder::new(build_layout(&pmf, 4, 0.5).unwrap(), 3).unwrap();
        let pe = portion_entropies(&pmf, 4, &enc).unwrap();
        let tol = Tolerance::new(0.25, 0.0).unwrap();
        let b = bound_interval(&BoundCase::YSyndrome.scenario(), &pe, tol);
        assert!((b.lower.unwrap() + 0.25).abs() < 1e-12);
        assert!((b.upper.unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn trivial_leakages() {
        let (pmf, enc) = dsbs_encoder(6);
        let none = measure_leakage(
            &pmf,
            6,
            &enc,
            &WiretapScenario::new(&[], SourceSubset::single(0)),
            Tolerance::zero(),
        )
        .unwrap();
        assert_eq!(none.measured_bits, 0.0);
        assert_eq!(none.note.as_deref(), Some("no bound for this scenario"));

        let full = LinearEncoder::new("6:4,2,2,4".parse().unwrap(), 1).unwrap();
        let all = WiretapScenario::new(&Portion::ALL, SourceSubset::single(0));
        let r = measure_leakage(&pmf, 6, &full, &all, Tolerance::zero()).unwrap();
        assert!((r.measured_bits - 6.0).abs() < 1e-9);
    }

    #[test]
    fn measured_leakage_is_monotone_in_the_observed_set() {
        let (pmf, enc) = dsbs_encoder(6);
        let x = SourceSubset::single(0);
        let mut prev = 0.0;
        let mut seen = Vec::new();
        for p in [Portion::Vy, Portion::Vcy, Portion::Vcx, Portion::Vx] {
            seen.push(p);
            let r = measure_leakage(
                &pmf,
                6,
                &enc,
                &WiretapScenario::new(&seen, x.clone()),
                Tolerance::zero(),
            )
            .unwrap();
            assert!(r.measured_bits + 1e-9 >= prev);
            assert!(r.measured_bits <= r.target_entropy_bits + 1e-9);
            prev = r.measured_bits;
        }
    }

    #[test]
    fn minimal_slack_makes_the_bound_hold() {
        let (pmf, enc) = dsbs_encoder(6);
        for c in BoundCase::ALL {
            let r = measure_leakage(&pmf, 6, &enc, &c.scenario(), Tolerance::zero()).unwrap();
            let d = r.delta_star.unwrap();
            let pe = portion_entropies(&pmf, 6, &enc).unwrap();
            let b = bound_interval(&c.scenario(), &pe, Tolerance::new(d, 0.0).unwrap());
            assert!(r.measured_bits <= b.upper.unwrap() + 1e-12);
            assert!(b.lower.is_none_or(|l| r.measured_bits >= l - 1e-12));
        }
    }

    #[test]
    fn multi_source_identities() {
        use rand::SeedableRng;
        let pmf = JointPmf::uniform(vec![2, 2]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let encs = vec![
            SourceEncoder::new(0, 4, &[("v".into(), 4)], &mut rng).unwrap(),
            SourceEncoder::new(1, 4, &[("v".into(), 4)], &mut rng).unwrap(),
        ];
        let own = multi_source_leakage(&pmf, 4, &encs, 0, 0).unwrap();
        assert!((own.measured_bits - 4.0).abs() < 1e-9);
        assert!(own.lower_bound_bits.unwrap().abs() < 1e-9);
        assert!(multi_source_leakage(&pmf, 4, &encs, 0, 1).unwrap().measured_bits.abs() < 1e-9);
        assert!(multi_source_leakage(&pmf, 4, &encs, 0, 2).is_err());
    }
}
