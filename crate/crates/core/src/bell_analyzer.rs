//! Bell-basis measurement and the measurement-only estimate of Γ_sup.
//!
//! The differences `d1 = P(Φ⁺) − P(Φ⁻) = 2 Re ρ₁₄` and
//! `d2 = P(Ψ⁺) − P(Ψ⁻) = 2 Re ρ₂₃` are the only quantities the protocol
//! reads. Sweeping the local phases so that θ_A + θ_B = s rotates ρ₁₄ alone,
//! and θ_B − θ_A = t rotates ρ₂₃ alone; the maxima over s and t are 2|ρ₁₄|
//! and 2|ρ₂₃|. The estimate of Γ at a setting is the difference of those
//! maxima, and an outer coordinate ascent over the mixing parameters gives
//! Γ_sup.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::local_unitary::{apply, apply_phase_only, build_from_params, LocalUnitaryParams, PhaseOnlyParams};
use crate::optimize::{golden_section_max, guided_restart, select_best, start_point, OptimizerConfig};
use crate::phase_povm::DEFAULT_GRID_POINTS;
use crate::rng::{RngSeed, SimRng};
use crate::states::DensityMatrix;

/// Smallest shot count accepted by the sampled protocol.
pub const MIN_PROTOCOL_SHOTS: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellProbabilities {
    pub p_phi_plus: f64,
    pub p_phi_minus: f64,
    pub p_psi_plus: f64,
    pub p_psi_minus: f64,
}

impl BellProbabilities {
    /// Order (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻).
    pub fn as_array(&self) -> [f64; 4] {
        [self.p_phi_plus, self.p_phi_minus, self.p_psi_plus, self.p_psi_minus]
    }

    pub fn sum(&self) -> f64 {
        self.as_array().iter().sum()
    }

    pub fn d1(&self) -> f64 {
        self.p_phi_plus - self.p_phi_minus
    }

    pub fn d2(&self) -> f64 {
        self.p_psi_plus - self.p_psi_minus
    }
}

/// Born-rule projections onto the four Bell states.
///
/// `⟨Φ±|ρ|Φ±⟩ = (ρ₁₁ + ρ₄₄ ± 2 Re ρ₁₄)/2` and
/// `⟨Ψ±|ρ|Ψ±⟩ = (ρ₂₂ + ρ₃₃ ± 2 Re ρ₂₃)/2`.
pub fn bell_probabilities(rho: &DensityMatrix) -> BellProbabilities {
    let m = rho.matrix();
    let outer = (m.0[0][0].re + m.0[3][3].re) / 2.0;
    let inner = (m.0[1][1].re + m.0[2][2].re) / 2.0;
    let r14 = m.0[0][3].re;
    let r23 = m.0[1][2].re;
    BellProbabilities {
        p_phi_plus: (outer + r14).max(0.0),
        p_phi_minus: (outer - r14).max(0.0),
        p_psi_plus: (inner + r23).max(0.0),
        p_psi_minus: (inner - r23).max(0.0),
    }
}

/// `(P(Φ⁺) − P(Φ⁻), P(Ψ⁺) − P(Ψ⁻))`.
pub fn corner_differences(rho: &DensityMatrix) -> (f64, f64) {
    let p = bell_probabilities(rho);
    (p.d1(), p.d2())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VisibilitySigns {
    /// `P(Φ⁺) + P(Ψ⁺) − P(Φ⁻) − P(Ψ⁻)`.
    #[serde(rename = "++")]
    PlusPlus,
    /// `P(Φ⁺) + P(Ψ⁻) − P(Φ⁻) − P(Ψ⁺)`.
    #[serde(rename = "+-")]
    PlusMinus,
}

pub fn visibility(rho: &DensityMatrix, signs: VisibilitySigns) -> f64 {
    let (d1, d2) = corner_differences(rho);
    match signs {
        VisibilitySigns::PlusPlus => d1 + d2,
        VisibilitySigns::PlusMinus => d1 - d2,
    }
}

/// Visibility maximized over the four-angle local-unitary family.
pub fn max_visibility(rho: &DensityMatrix, signs: VisibilitySigns, cfg: &OptimizerConfig) -> f64 {
    crate::optimize::maximize(
        |x| visibility(&apply(&build_from_params(&LocalUnitaryParams::from_array(*x)), rho), signs),
        cfg,
    )
    .value
}

/// Outcome counts of one Bell-basis measurement run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    /// Order (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻).
    pub counts: [u64; 4],
    pub shots: u64,
}

impl ShotRecord {
    pub fn frequencies(&self) -> [f64; 4] {
        self.counts.map(|c| c as f64 / self.shots as f64)
    }

    pub fn d1(&self) -> f64 {
        let f = self.frequencies();
        f[0] - f[1]
    }

    pub fn d2(&self) -> f64 {
        let f = self.frequencies();
        f[2] - f[3]
    }

    /// Binomial standard error of `d1 − d2`, from the observed frequencies.
    pub fn difference_sigma(&self) -> f64 {
        let f = self.frequencies();
        let n = self.shots as f64;
        let var = |plus: f64, minus: f64| ((plus + minus) - (plus - minus).powi(2)).max(0.0) / n;
        (var(f[0], f[1]) + var(f[2], f[3])).sqrt()
    }
}

/// Multinomial draw of `shots` outcomes as a chain of binomials.
pub fn sample_from<R: Rng + ?Sized>(probs: &BellProbabilities, shots: u64, rng: &mut R) -> ShotRecord {
    let p = probs.as_array();
    let total: f64 = p.iter().sum();
    let mut counts = [0u64; 4];
    let mut left = shots;
    let mut mass = total;
    for k in 0..3 {
        if left == 0 {
            break;
        }
        let q = if mass > 0.0 { (p[k] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let c = Binomial::new(left, q).expect("probability in [0, 1]").sample(rng);
        counts[k] = c;
        left -= c;
        mass -= p[k];
    }
    counts[3] = left;
    ShotRecord { counts, shots }
}

pub fn sample_bell_outcomes(rho: &DensityMatrix, shots: u64, seed: RngSeed) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(usage("shots must be at least 1"));
    }
    Ok(sample_from(&bell_probabilities(rho), shots, &mut seed.rng()))
}

/// Phase sweep of one corner: grid over [0, 2π) then golden-section
/// refinement around the best node. Returns (argmax, max, evaluations).
fn phase_sweep(mut d: impl FnMut(f64) -> f64, grid: usize, tol: f64) -> (f64, f64, usize) {
    let h = TAU / grid as f64;
    let mut evals = 0;
    let (mut best_s, mut best_v) = (0.0, f64::NEG_INFINITY);
    for k in 0..grid {
        let s = k as f64 * h;
        let v = d(s);
        evals += 1;
        if v > best_v {
            best_s = s;
            best_v = v;
        }
    }
    let (s, v) = golden_section_max(
        |s| {
            evals += 1;
            d(s)
        },
        best_s - h,
        best_s + h,
        tol,
    );
    if v > best_v {
        (s.rem_euclid(TAU), v, evals)
    } else {
        (best_s, best_v, evals)
    }
}

fn phases_for_sum(s: f64) -> PhaseOnlyParams {
    PhaseOnlyParams::wrapped(s / 2.0, s / 2.0)
}

fn phases_for_difference(t: f64) -> PhaseOnlyParams {
    PhaseOnlyParams::wrapped(-t / 2.0, t / 2.0)
}

/// |ρ₁₄| and |ρ₂₃| read from Bell probabilities under local phase sweeps.
pub fn measured_abs_corners(rho: &DensityMatrix, phase_grid: usize) -> Result<(f64, f64)> {
    if phase_grid < 8 {
        return Err(usage(format!("phase grid {phase_grid} is below 8")));
    }
    let m = measure_setting(rho, phase_grid, 1e-9, &mut Noiseless);
    Ok((m.d1_max / 2.0, m.d2_max / 2.0))
}

/// Source of Bell probabilities or counts at a phase setting.
trait Detector {
    /// `(d1, d2)` observed on `rho`, plus the record when sampling.
    fn observe(&mut self, rho: &DensityMatrix) -> (f64, f64, Option<ShotRecord>);
}

struct Noiseless;

impl Detector for Noiseless {
    fn observe(&mut self, rho: &DensityMatrix) -> (f64, f64, Option<ShotRecord>) {
        let (d1, d2) = corner_differences(rho);
        (d1, d2, None)
    }
}

struct Sampled<'a> {
    shots: u64,
    rng: &'a mut SimRng,
}

impl Detector for Sampled<'_> {
    fn observe(&mut self, rho: &DensityMatrix) -> (f64, f64, Option<ShotRecord>) {
        let rec = sample_from(&bell_probabilities(rho), self.shots, self.rng);
        (rec.d1(), rec.d2(), Some(rec))
    }
}

struct SettingMeasurement {
    d1_max: f64,
    d2_max: f64,
    estimate: f64,
    record: Option<ShotRecord>,
    sigma: f64,
    phase_evaluations: usize,
}

/// Both phase sweeps, then one final measurement at the phase pair that
/// makes both corners real and positive.
fn measure_setting(rho: &DensityMatrix, grid: usize, tol: f64, det: &mut impl Detector) -> SettingMeasurement {
    let (s, d1_max, e1) = phase_sweep(|s| det.observe(&apply_phase_only(&phases_for_sum(s), rho)).0, grid, tol);
    let (t, d2_max, e2) = phase_sweep(|t| det.observe(&apply_phase_only(&phases_for_difference(t), rho)).1, grid, tol);
    let both = PhaseOnlyParams::wrapped((s - t) / 2.0, (s + t) / 2.0);
    let (d1, d2, record) = det.observe(&apply_phase_only(&both, rho));
    let (estimate, sigma) = match record {
        Some(rec) => ((d1 - d2).abs(), rec.difference_sigma()),
        None => ((d1_max - d2_max).abs(), 0.0),
    };
    SettingMeasurement {
        d1_max,
        d2_max,
        estimate,
        record,
        sigma,
        phase_evaluations: e1 + e2 + 1,
    }
}

/// One evaluated outer setting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingRecord {
    pub index: usize,
    pub params: LocalUnitaryParams,
    pub record: Option<ShotRecord>,
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub gamma_sup_estimate: f64,
    pub settings_evaluated: usize,
    pub inner_phase_settings: usize,
    pub shot_noise_sigma: f64,
    pub best_params: LocalUnitaryParams,
    pub shots: Option<u64>,
    #[serde(skip)]
    pub log: Vec<SettingRecord>,
}

/// Measurement-only estimate of Γ_sup.
///
/// Each restart climbs `|d1max² − d2max²|` first and then the estimate
/// `|d1max − d2max|` itself, the same two-stage scheme as
/// [`crate::gamma_sup::coordinate_ascent`].
///
/// Without `shots` the Bell probabilities are exact. With `shots`, every
/// phase evaluation draws that many outcomes; restart `k` samples from
/// stream `k + 1` of `seed` and the closing measurement at the best setting
/// from stream 0.
pub fn protocol_gamma_sup(
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
    shots: Option<u64>,
    seed: RngSeed,
) -> Result<ProtocolResult> {
    cfg.validate()?;
    if let Some(n) = shots {
        if n < MIN_PROTOCOL_SHOTS {
            return Err(usage(format!("{n} shots is below the minimum of {MIN_PROTOCOL_SHOTS}")));
        }
    }
    let grid = DEFAULT_GRID_POINTS;
    let tol = cfg.refine_tolerance;
    let mut log = Vec::new();
    let mut inner = 0;

    let mut outcomes = Vec::with_capacity(cfg.restarts);
    for k in 0..cfg.restarts {
        let mut rng = seed.stream(k as u64 + 1);
        let measure = RefCell::new(|x: &[f64; 4]| {
            let params = LocalUnitaryParams::from_array(*x);
            let moved = apply(&build_from_params(&params), rho);
            let m = match shots {
                Some(n) => measure_setting(&moved, grid, tol, &mut Sampled { shots: n, rng: &mut rng }),
                None => measure_setting(&moved, grid, tol, &mut Noiseless),
            };
            inner += m.phase_evaluations;
            log.push(SettingRecord {
                index: log.len(),
                params,
                record: m.record,
                estimate: m.estimate,
            });
            m
        });
        let mut guide = |x: &[f64; 4]| {
            let m = (measure.borrow_mut())(x);
            (m.d1_max * m.d1_max - m.d2_max * m.d2_max).abs()
        };
        let mut objective = |x: &[f64; 4]| (measure.borrow_mut())(x).estimate;
        outcomes.push(guided_restart(&mut guide, &mut objective, start_point(cfg, k), cfg));
    }
    let best = select_best(&outcomes);
    let best_params = LocalUnitaryParams::from_array(best.x);

    let (estimate, sigma) = match shots {
        None => (best.value, 0.0),
        Some(n) => {
            let mut rng = seed.stream(0);
            let moved = apply(&build_from_params(&best_params), rho);
            let m = measure_setting(&moved, grid, tol, &mut Sampled { shots: n, rng: &mut rng });
            inner += m.phase_evaluations;
            log.push(SettingRecord {
                index: log.len(),
                params: best_params,
                record: m.record,
                estimate: m.estimate,
            });
            (m.estimate, m.sigma)
        }
    };

    Ok(ProtocolResult {
        gamma_sup_estimate: estimate,
        settings_evaluated: log.len(),
        inner_phase_settings: inner,
        shot_noise_sigma: sigma,
        best_params,
        shots,
        log,
    })
}

pub const SETTINGS_CSV_HEADER: &str =
    "setting_index,phi,vartheta,theta_a,theta_b,n_phi_plus,n_phi_minus,n_psi_plus,n_psi_minus,estimate";

/// One row per evaluated setting. Count columns are empty for exact
/// probabilities.
pub fn write_settings_csv<W: Write>(log: &[SettingRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{SETTINGS_CSV_HEADER}")?;
    for r in log {
        let p = r.params;
        let counts = match r.record {
            Some(rec) => rec.counts.map(|c| c.to_string()).join(","),
            None => ",,,".to_string(),
        };
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            r.index, p.phi_mix, p.theta_mix, p.theta_a, p.theta_b, counts, r.estimate
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma_sup::coordinate_ascent;
    use crate::qmath::{cis, C64};
    use crate::rng::RngSeed;
    use crate::states::{bell_state, density_from_pure, random_mixed, werner_state, BellKind, PureState};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn bell(kind: BellKind) -> DensityMatrix {
        density_from_pure(&bell_state(kind))
    }

    fn plus_plus() -> DensityMatrix {
        let h = C64::new(0.5, 0.0);
        density_from_pure(&PureState::new([h, h, h, h]).unwrap())
    }

    #[test]
    fn probabilities_match_projections() {
        for s in 0..20 {
            let rho = random_mixed(RngSeed(s), 4).unwrap();
            let p = bell_probabilities(&rho);
            for (kind, v) in BellKind::ALL.iter().zip(p.as_array()) {
                assert!((rho.expectation(&bell_state(*kind)) - v).abs() < 1e-14);
            }
            assert!((p.sum() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn probability_examples() {
        assert_eq!(bell_probabilities(&bell(BellKind::PhiPlus)).as_array().map(|x| (x * 1e12).round()), [1e12, 0.0, 0.0, 0.0]);
        let p = bell_probabilities(&DensityMatrix::maximally_mixed()).as_array();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-15));
        let p = bell_probabilities(&plus_plus()).as_array();
        for (x, e) in p.iter().zip([0.5, 0.0, 0.5, 0.0]) {
            assert!((x - e).abs() < 1e-15);
        }
    }

    #[test]
    fn difference_examples() {
        let (d1, d2) = corner_differences(&bell(BellKind::PhiPlus));
        assert!((d1 - 1.0).abs() < 1e-12 && d2.abs() < 1e-12);
        let (d1, d2) = corner_differences(&bell(BellKind::PsiMinus));
        assert!(d1.abs() < 1e-12 && (d2 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_positive_corners_give_moduli() {
        let rho = random_mixed(RngSeed(6), 4).unwrap();
        let (a1, a2) = (rho.rho14().arg(), rho.rho23().arg());
        // ρ₁₄ picks up e^{−i(θ_A+θ_B)}, ρ₂₃ picks up e^{i(θ_B−θ_A)}.
        let phases = PhaseOnlyParams::wrapped((a1 + a2) / 2.0, (a1 - a2) / 2.0);
        let (d1, d2) = corner_differences(&apply_phase_only(&phases, &rho));
        assert!((d1 - 2.0 * rho.rho14().norm()).abs() < 1e-12);
        assert!((d2 - 2.0 * rho.rho23().norm()).abs() < 1e-12);
    }

    #[test]
    fn visibility_examples() {
        assert!((visibility(&bell(BellKind::PhiPlus), VisibilitySigns::PlusPlus) - 1.0).abs() < 1e-12);
        assert!((visibility(&plus_plus(), VisibilitySigns::PlusPlus) - 1.0).abs() < 1e-12);
        for s in [VisibilitySigns::PlusPlus, VisibilitySigns::PlusMinus] {
            assert!(visibility(&DensityMatrix::maximally_mixed(), s).abs() < 1e-15);
        }
        let v = max_visibility(&plus_plus(), VisibilitySigns::PlusPlus, &OptimizerConfig::default());
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn measured_corner_examples() {
        let (a, b) = measured_abs_corners(&bell(BellKind::PhiPlus), 16).unwrap();
        assert!((a - 0.5).abs() < 1e-9 && b.abs() < 1e-9);
        let (a, b) = measured_abs_corners(&werner_state(0.5).unwrap(), 16).unwrap();
        assert!(a.abs() < 1e-9 && (b - 1.0 / 6.0).abs() < 1e-9);
        let rho = random_mixed(RngSeed(10), 4).unwrap();
        let (a, b) = measured_abs_corners(&rho, 8).unwrap();
        assert!((a - rho.rho14().norm()).abs() < 1e-9);
        assert!((b - rho.rho23().norm()).abs() < 1e-9);
        assert!(measured_abs_corners(&rho, 7).is_err());
    }

    #[test]
    fn phased_corner_reads_the_same() {
        let h = FRAC_1_SQRT_2;
        let psi = PureState::new([C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), cis(FRAC_PI_4 * 4.0 / 3.0) * h]).unwrap();
        let (a, _) = measured_abs_corners(&density_from_pure(&psi), 16).unwrap();
        assert!((a - 0.5).abs() < 1e-9);
    }

    #[test]
    fn noiseless_protocol_matches_optimizer() {
        let cfg = OptimizerConfig::default().with_restarts(3);
        for s in 0..3 {
            let rho = random_mixed(RngSeed(50 + s), 3).unwrap();
            let p = protocol_gamma_sup(&rho, &cfg, None, RngSeed(1)).unwrap();
            let g = coordinate_ascent(&rho, &cfg).value;
            assert!((p.gamma_sup_estimate - g).abs() < 1e-4, "{} vs {g}", p.gamma_sup_estimate);
            assert_eq!(p.shot_noise_sigma, 0.0);
            assert_eq!(p.settings_evaluated, p.log.len());
        }
    }

    #[test]
    fn product_state_counterexample() {
        let cfg = OptimizerConfig::default().with_restarts(2);
        let p = protocol_gamma_sup(&plus_plus(), &cfg, None, RngSeed(1)).unwrap();
        assert!(p.gamma_sup_estimate < 1e-4);
    }

    #[test]
    fn sampled_bell_state() {
        let cfg = OptimizerConfig::default().with_restarts(1);
        let p = protocol_gamma_sup(&bell(BellKind::PhiPlus), &cfg, Some(100_000), RngSeed(7)).unwrap();
        assert!((p.gamma_sup_estimate - 1.0).abs() < 0.01);
        assert!(p.gamma_sup_estimate <= 1.0 + 3.0 * p.shot_noise_sigma + 1e-12);
    }

    #[test]
    fn too_few_shots() {
        let r = protocol_gamma_sup(&bell(BellKind::PhiPlus), &OptimizerConfig::default(), Some(999), RngSeed(0));
        assert!(matches!(r, Err(crate::Error::Usage(_))));
    }

    #[test]
    fn sampling_examples() {
        let r = sample_bell_outcomes(&bell(BellKind::PhiPlus), 1234, RngSeed(1)).unwrap();
        assert_eq!(r.counts, [1234, 0, 0, 0]);
        let r = sample_bell_outcomes(&DensityMatrix::maximally_mixed(), 1_000_000, RngSeed(2)).unwrap();
        assert_eq!(r.counts.iter().sum::<u64>(), r.shots);
        assert!(r.frequencies().iter().all(|f| (f - 0.25).abs() < 0.002));
        assert_eq!(
            sample_bell_outcomes(&DensityMatrix::maximally_mixed(), 500, RngSeed(3)).unwrap(),
            sample_bell_outcomes(&DensityMatrix::maximally_mixed(), 500, RngSeed(3)).unwrap()
        );
        assert!(sample_bell_outcomes(&DensityMatrix::maximally_mixed(), 0, RngSeed(3)).is_err());
    }

    #[test]
    fn csv_layout() {
        let cfg = OptimizerConfig::default().with_restarts(1);
        let p = protocol_gamma_sup(&bell(BellKind::PhiPlus), &cfg, Some(1000), RngSeed(3)).unwrap();
        let mut buf = Vec::new();
        write_settings_csv(&p.log, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SETTINGS_CSV_HEADER);
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 10);
        assert!(first.starts_with("0,"));
    }
}
