//! Statistical gates on large simulation runs.
//!
//! Everything here is deterministic: fixed seeds, fixed chunking, fixed
//! reduction order. The gates are sized so a correct sampler passes with
//! enormous margin (5 to 8 standard errors) while a wrong variance, a
//! model mix-up, or a broken correlation fails by orders of magnitude.

use std::sync::OnceLock;

use collapse_core::simulation::{
    compare, run, MeasurementModel, SimulationConfig, SimulationReport,
};
use collapse_core::two_photon_state::TwoPhotonAmplitude;

const N: u64 = 1_000_000;
const SEED: u64 = 20_260_815;

fn collapsed_1m() -> &'static SimulationReport {
    static R: OnceLock<SimulationReport> = OnceLock::new();
    R.get_or_init(|| {
        run(&SimulationConfig::new(MeasurementModel::CollapsedSequential, N, SEED).unwrap())
            .unwrap()
    })
}

fn uncollapsed_1m() -> &'static SimulationReport {
    static R: OnceLock<SimulationReport> = OnceLock::new();
    R.get_or_init(|| {
        run(&SimulationConfig::new(MeasurementModel::UncollapsedDouble, N, SEED).unwrap())
            .unwrap()
    })
}

#[test]
fn collapsed_polarizations_are_perfectly_anticorrelated() {
    let pol = collapsed_1m().polarization.as_ref().unwrap();
    assert_eq!(pol.outcomes.same(), 0);
    assert_eq!(pol.outcomes.total(), N);
    assert_eq!(pol.p_same.value, 0.0);
}

#[test]
fn uncollapsed_p_same_is_half() {
    let pol = uncollapsed_1m().polarization.as_ref().unwrap();
    // se = 0.0005 at n = 1e6; the gate is 5 se.
    assert!(
        (pol.p_same.value - 0.5).abs() < 0.0025,
        "p_same {}",
        pol.p_same.value
    );
}

#[test]
fn uncollapsed_outcome_cells_are_uniform() {
    let pol = uncollapsed_1m().polarization.as_ref().unwrap();
    let cells = [
        pol.outcomes.vv,
        pol.outcomes.vh,
        pol.outcomes.hv,
        pol.outcomes.hh,
    ];
    let expected = N as f64 / 4.0;
    let chi2: f64 = cells
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    // 3 degrees of freedom; 16.27 is the 0.1% point.
    assert!(chi2 < 16.27, "chi2 {chi2}, cells {cells:?}");
}

#[test]
fn collapsed_sum_spread_is_pump_linewidth() {
    let amp = TwoPhotonAmplitude::defaults();
    let f = collapsed_1m().frequency.as_ref().unwrap();
    let sd = f.sd_sum.as_ref().unwrap();
    let expect = amp.sum_sd_correlated();
    // 1% gate; the sampling error itself is ~0.07%.
    assert!(
        (sd.value - expect).abs() < 0.01 * expect,
        "collapsed sd_sum {} vs {expect}",
        sd.value
    );
}

#[test]
fn uncollapsed_sum_spread_is_factorized_width() {
    let amp = TwoPhotonAmplitude::defaults();
    let f = uncollapsed_1m().frequency.as_ref().unwrap();
    let sd = f.sd_sum.as_ref().unwrap();
    let expect = amp.sum_sd_factorized();
    assert!(
        (sd.value - expect).abs() < 0.01 * expect,
        "uncollapsed sd_sum {} vs {expect}",
        sd.value
    );
}

#[test]
fn mean_sum_sits_on_the_pump_for_both_models() {
    let amp = TwoPhotonAmplitude::defaults();
    for report in [collapsed_1m(), uncollapsed_1m()] {
        let f = report.frequency.as_ref().unwrap();
        assert!(
            (f.mean_sum.value - amp.omega_p()).abs() < 5.0 * f.mean_sum.std_error,
            "mean_sum {} vs {} (se {})",
            f.mean_sum.value,
            amp.omega_p(),
            f.mean_sum.std_error
        );
        // Marginal means stay put as well.
        assert!(
            (f.mean_omega_s.value - 1.2e15).abs() < 5.0 * f.mean_omega_s.std_error
        );
        assert!(
            (f.mean_omega_i.value - 1.2e15).abs() < 5.0 * f.mean_omega_i.std_error
        );
    }
}

#[test]
fn three_sigma_exceedance_fractions() {
    // Under the collapsed model the residual IS sigma_sum-Gaussian:
    // P(|r| > 3 sigma_sum) = 2 Phi(-3) = 0.0026998.
    let f = collapsed_1m().frequency.as_ref().unwrap();
    let p = f.frac_beyond_3_sigma_sum.value;
    let expect = 0.002_699_796_063_260_2;
    let se = (expect * (1.0 - expect) / N as f64).sqrt();
    assert!((p - expect).abs() < 6.0 * se, "collapsed exceedance {p}");

    // Under the factorized model the residual is sigma_N-Gaussian with
    // sigma_N ~ 14.16 sigma_sum: P(|r| > 3 sigma_sum) = 2 Phi(-3/14.16).
    let f = uncollapsed_1m().frequency.as_ref().unwrap();
    let p = f.frac_beyond_3_sigma_sum.value;
    let expect = 0.832_210_511_201_864_8;
    let se = (expect * (1.0 - expect) / N as f64).sqrt();
    assert!((p - expect).abs() < 6.0 * se, "uncollapsed exceedance {p}");
}

#[test]
fn histograms_are_complete_and_concentrated() {
    let f = collapsed_1m().frequency.as_ref().unwrap();
    assert_eq!(f.residual_histogram.total(), N);
    // The collapsed ridge spans ~1/14 of the axis: everything in range.
    assert_eq!(f.residual_histogram.underflow + f.residual_histogram.overflow, 0);

    let f = uncollapsed_1m().frequency.as_ref().unwrap();
    assert_eq!(f.residual_histogram.total(), N);
    // +-5 sigma_N bins: expected spill is 2 Phi(-5) * 1e6 ~ 0.6 events.
    assert!(f.residual_histogram.underflow + f.residual_histogram.overflow < 10);
}

#[test]
fn sd_estimate_converges_with_n() {
    let amp = TwoPhotonAmplitude::defaults();
    let expect = amp.sum_sd_factorized();
    for n in [1_000u64, 10_000, 100_000] {
        let cfg = SimulationConfig::new(MeasurementModel::UncollapsedDouble, n, 31).unwrap();
        let report = run(&cfg).unwrap();
        let sd = report.frequency.unwrap().sd_sum.unwrap();
        // Within 6 theoretical standard errors at every size.
        let se = expect / (2.0 * (n as f64 - 1.0)).sqrt();
        assert!(
            (sd.value - expect).abs() < 6.0 * se,
            "n {n}: sd {} vs {expect} (se {se})",
            sd.value
        );
        // The reported standard error tracks the theoretical one.
        assert!((sd.std_error - se).abs() < 0.1 * se);
    }
}

#[test]
fn comparison_variance_ratio_at_scale() {
    let cfg = SimulationConfig::new(MeasurementModel::CollapsedSequential, 200_000, 47).unwrap();
    let cmp = compare(&cfg).unwrap();
    assert!((cmp.variance.expected_variance_ratio - 200.5).abs() < 1e-9);
    let obs = cmp.variance.observed_variance_ratio.unwrap();
    // Each sd carries ~0.16% error at n = 2e5, so the ratio is good to ~1%.
    assert!(
        (obs - 200.5).abs() < 0.05 * 200.5,
        "observed ratio {obs}"
    );
}
