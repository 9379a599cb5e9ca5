use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::expr::{DriftFrame, Expr};
use crate::extremal::{Ellipticity, Pucci66Param};
use crate::geometry::{gauge, GeometrySpec};
use crate::hcalc::{gauge_jet, ExprField, Radial, RadialProfile};
use crate::report::Verdict;
use crate::sampling::SamplePlan;

fn family(g: &GeometrySpec, mode: Mode, frame: DriftFrame, entries: &[(&[&str], &str)]) -> CoefficientFamily {
    let json = CoefficientsJson {
        mode,
        drift_frame: frame,
        entries: entries
            .iter()
            .map(|(b, c)| EntryJson {
                b: b.iter().map(|s| s.to_string()).collect(),
                c: c.to_string(),
            })
            .collect(),
    };
    CoefficientFamily::from_json(&json, g).unwrap()
}

fn mminus(l: f64, u: f64) -> SecondOrder {
    SecondOrder::MMinus(Ellipticity::new(l, u).unwrap())
}

fn field(g: &GeometrySpec, src: &str) -> ExprField {
    ExprField::new(Expr::for_geometry(src, g).unwrap(), 1e-3)
}

fn point(g: &GeometrySpec, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..g.d_amb()).map(|_| rng.random_range(-scale..scale)).collect();
        if g.xh_norm(&p) / gauge(g, &p) > 0.05 {
            return p;
        }
    }
}

fn plan(r0: f64, rungs: usize, per_rung: usize) -> SamplePlan {
    SamplePlan::default().with_ladder(r0, rungs, per_rung)
}

#[test]
fn singleton_hamiltonian_is_linear_and_mode_free() {
    let g = GeometrySpec::heisenberg(1).unwrap();
    let inf = family(&g, Mode::Inf, DriftFrame::Horizontal, &[(&["x1", "2*x2"], "x3^2")]);
    let sup = inf.clone().with_mode(Mode::Sup);
    let p = [0.3, -0.5, 0.7];
    let grad = [1.5, -2.0];
    let expect = 0.49 * 4.0 - (0.3 * 1.5 + 2.0 * -0.5 * -2.0);
    let a = hamiltonian(&inf, &g, &p, 4.0, &grad, 1e-3).unwrap();
    let b = hamiltonian(&sup, &g, &p, 4.0, &grad, 1e-3).unwrap();
    assert!((a - expect).abs() < 1e-14);
    assert_eq!(a, b);
    assert!(matches!(
        hamiltonian(&inf, &g, &p, 1.0, &[1.0], 1e-3),
        Err(LiouvilleError::Arity { expected: 2, got: 1, .. })
    ));
}

#[test]
fn two_entry_hamiltonian_matches_brute_force() {
    let g = GeometrySpec::htype7();
    let fam = family(
        &g,
        Mode::Inf,
        DriftFrame::Horizontal,
        &[(&["x1", "x2", "0", "1"], "rho"), (&["-x3", "0", "x4", "x5"], "1 + x1^2")],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let p = point(&g, &mut rng, 2.0);
        let r: f64 = rng.random_range(-3.0..3.0);
        let grad: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rho = gauge(&g, &p);
        let b1 = [p[0], p[1], 0.0, 1.0];
        let b2 = [-p[2], 0.0, p[3], p[4]];
        let v1 = rho * r - b1.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>();
        let v2 = (1.0 + p[0] * p[0]) * r - b2.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>();
        let h = hamiltonian(&fam, &g, &p, r, &grad, 1e-3).unwrap();
        assert!((h - v1.min(v2)).abs() < 1e-13);
        let hs = hamiltonian(&fam.clone().with_mode(Mode::Sup), &g, &p, r, &grad, 1e-3).unwrap();
        assert!((hs - v1.max(v2)).abs() < 1e-13);
    }
}

#[test]
fn mode_pairing_is_enforced_for_families() {
    let g = GeometrySpec::heisenberg(1).unwrap();
    let two = family(&g, Mode::Sup, DriftFrame::Horizontal, &[(&["0", "0"], "1"), (&["1", "0"], "0")]);
    assert!(matches!(
        OperatorSpec::new(mminus(1.0, 2.0), two.clone()),
        Err(LiouvilleError::Pairing { .. })
    ));
    assert!(OperatorSpec::new(mminus(1.0, 2.0), two.with_mode(Mode::Inf)).is_ok());
    let one = family(&g, Mode::Sup, DriftFrame::Horizontal, &[(&["0", "0"], "1")]);
    assert!(OperatorSpec::new(mminus(1.0, 2.0), one).is_ok());
}

#[test]
fn log_gauge_is_not_a_supersolution_of_the_sublaplacian() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for g in [
        GeometrySpec::htype7(),
        GeometrySpec::heisenberg(2).unwrap(),
        GeometrySpec::grushin(2, 1, 2.0).unwrap(),
        GeometrySpec::heisenberg_greiner(1, 2).unwrap(),
    ] {
        let op = OperatorSpec::pure(mminus(1.5, 1.5), &g);
        for _ in 0..20 {
            let p = point(&g, &mut rng, 3.0);
            let gj = gauge_jet(&g, &p).unwrap();
            let res = pde_residual(&g, &op, &LyapunovCandidate::LogRho, &p, 1e-3).unwrap();
            let expect = -1.5 * (g.q() - 2.0) * gj.drho_sq / (gj.rho * gj.rho);
            assert!(res < 0.0);
            assert!((res - expect).abs() <= 1e-10 * expect.abs(), "{}", g.name());
        }
    }
}

#[test]
fn constant_function_has_zero_residual_without_zero_order_term() {
    let g = GeometrySpec::free_step2(3).unwrap();
    let fam = family(&g, Mode::Inf, DriftFrame::Horizontal, &[(&["x1", "x4", "rho"], "0")]);
    let op = OperatorSpec::new(mminus(1.0, 3.0), fam).unwrap();
    let p = [0.4, -0.2, 0.9, 0.3, 0.1, -0.6];
    assert_eq!(pde_residual(&g, &op, &field(&g, "7"), &p, 1e-3).unwrap(), 0.0);
}

#[test]
fn fundamental_solutions_have_zero_pucci_residual() {
    let g = GeometrySpec::htype7();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (l, u) in [(1.0, 1.0), (1.0, 2.0), (1.0, 9.0), (2.0, 3.0)] {
        let ell = Ellipticity::new(l, u).unwrap();
        for (kind, plus) in [
            (FundamentalKind::Phi1, true),
            (FundamentalKind::Phi2, true),
            (FundamentalKind::Psi1, false),
            (FundamentalKind::Psi2, false),
        ] {
            let prof = fundamental_profile(kind, &ell, 10.0, 1.5, -0.5).unwrap();
            let so = if plus { SecondOrder::MPlus(ell) } else { SecondOrder::MMinus(ell) };
            let op = OperatorSpec::pure(so, &g);
            for _ in 0..30 {
                let p = point(&g, &mut rng, 4.0);
                let jet = crate::hcalc::horizontal_jet(&g, &Radial(&prof), &p).unwrap();
                let res = pde_residual(&g, &op, &Radial(&prof), &p, 1e-3).unwrap();
                let scale = u * jet.hhess.iter().map(|v| v.abs()).sum::<f64>();
                // Eigenvalues inside the absolute zero band are dropped.
                let band = u * 6.0 * 1e-12 * (1.0 + jet.hhess.norm());
                assert!(res.abs() <= 1e-8 * scale + band, "{kind:?} ({l},{u}): {res} {scale} {p:?}");
            }
        }
    }
}

#[test]
fn fundamental_exponents() {
    let ell = Ellipticity::new(1.0, 3.0).unwrap();
    let f = fundamental_profile(FundamentalKind::Phi1, &ell, 10.0, 1.0, 0.0).unwrap();
    assert_eq!(f.alpha, 9.0 / 3.0 + 1.0);
    assert_eq!(f.beta, 9.0 * 3.0 + 1.0);
    let same = Ellipticity::new(2.0, 2.0).unwrap();
    let phi2 = fundamental_profile(FundamentalKind::Phi2, &same, 6.0, 1.0, 0.0).unwrap();
    let kaplan = fundamental_profile(FundamentalKind::Kaplan, &same, 6.0, 1.0, 0.0).unwrap();
    assert_eq!(phi2.alpha, 6.0);
    for rho in [0.5, 1.0, 3.0] {
        assert_eq!(phi2.eval(rho).unwrap(), kaplan.eval(rho).unwrap());
    }
    // α = 2 switches to the logarithm.
    let log_case = fundamental_profile(FundamentalKind::Phi1, &Ellipticity::new(1.0, 9.0).unwrap(), 10.0, 2.0, 1.0)
        .unwrap();
    assert_eq!(log_case.alpha, 2.0);
    assert!((log_case.eval(std::f64::consts::E).unwrap().0 - 3.0).abs() < 1e-15);
    assert!(fundamental_profile(FundamentalKind::Phi1, &ell, 10.0, 0.0, 0.0).is_err());
    assert!(fundamental_profile(FundamentalKind::Phi1, &ell, 2.0, 1.0, 0.0).is_err());
}

#[test]
fn verify_lyapunov_with_positive_zero_order_term() {
    let g = GeometrySpec::htype7();
    let fam = family(&g, Mode::Inf, DriftFrame::Horizontal, &[(&["0", "0", "0", "0"], "0.5")]);
    let op = OperatorSpec::new(mminus(1.0, 2.0), fam).unwrap();
    let rep = verify_lyapunov(&g, &op, &LyapunovCandidate::LogRho, (16.0, 64.0), &plan(1.0, 4, 64)).unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
    assert_eq!(rep.evaluated, 256);

    let pure = OperatorSpec::pure(mminus(1.0, 2.0), &g);
    let rep = verify_lyapunov(&g, &pure, &LyapunovCandidate::LogRho, (16.0, 64.0), &plan(1.0, 4, 64)).unwrap();
    assert_eq!(rep.verdict, Verdict::Violated);
    assert!(!rep.witnesses.is_empty());
}

#[test]
fn negative_zero_order_coefficients_are_excluded() {
    let g = GeometrySpec::heisenberg(1).unwrap();
    let fam = family(&g, Mode::Inf, DriftFrame::Horizontal, &[(&["0", "0"], "-1")]);
    let op = OperatorSpec::new(mminus(1.0, 1.0), fam).unwrap();
    let rep = verify_lyapunov(&g, &op, &LyapunovCandidate::LogRho, (1.0, 4.0), &plan(1.0, 2, 16)).unwrap();
    assert_eq!(rep.evaluated, 0);
    assert_eq!(rep.verdict, Verdict::Inconclusive);
    assert!(rep.notes[0].contains("negative zero-order"));
}

fn mirror_case(g: &GeometrySpec, p: &[f64], l: f64, u: f64) {
    let fam = family(
        g,
        Mode::Inf,
        DriftFrame::Horizontal,
        &[(&["x1", "-x2"], "1 + x1^2"), (&["rho", "0"], "0.25")],
    );
    let op = OperatorSpec::new(mminus(l, u), fam).unwrap();
    let a = pde_residual(g, &op, &LyapunovCandidate::LogRho, p, 1e-3).unwrap();
    let b = pde_residual(g, &op.mirrored(), &LyapunovCandidate::NegLogRho, p, 1e-3).unwrap();
    assert!((a + b).abs() <= 1e-13 * (1.0 + a.abs()), "{a} vs {b}");
}

proptest! {
    #[test]
    fn mirrored_operator_negates_residual(
        x in -3.0f64..3.0, y in -3.0f64..3.0, t in -5.0f64..5.0, l in 0.5f64..2.0, k in 1.0f64..4.0
    ) {
        let g = GeometrySpec::heisenberg(1).unwrap();
        prop_assume!((x * x + y * y).sqrt() / gauge(&g, &[x, y, t]) > 1e-3);
        mirror_case(&g, &[x, y, t], l, l * k);
    }

    #[test]
    fn scaling_all_constants_scales_residual(
        x in -3.0f64..3.0, y in -3.0f64..3.0, t in -5.0f64..5.0, e in -3i32..4
    ) {
        let g = GeometrySpec::heisenberg(1).unwrap();
        prop_assume!((x * x + y * y).sqrt() / gauge(&g, &[x, y, t]) > 1e-3);
        let p = [x, y, t];
        let fam = family(&g, Mode::Inf, DriftFrame::Horizontal, &[(&["x1", "x3"], "2 + x2^2")]);
        let op = OperatorSpec::new(mminus(1.0, 3.0), fam).unwrap();
        let base = pde_residual(&g, &op, &LyapunovCandidate::RhoSquared, &p, 1e-3).unwrap();
        let s = 2f64.powi(e);
        let scaled = pde_residual(&g, &op.scaled(s).unwrap(), &LyapunovCandidate::RhoSquared, &p, 1e-3).unwrap();
        prop_assert_eq!(scaled, s * base);
        let parts = pde_residual_parts(&g, &op, &LyapunovCandidate::RhoSquared, &p, 1e-3).unwrap();
        let three = pde_residual(&g, &op.scaled(3.0).unwrap(), &LyapunovCandidate::RhoSquared, &p, 1e-3).unwrap();
        prop_assert!((three - 3.0 * base).abs() <= 1e-13 * 3.0 * parts.scale());
    }
}

#[test]
fn liohad_gate_boundary() {
    let g = GeometrySpec::htype7();
    let run = |u: f64| {
        let op = OperatorSpec::pure(SecondOrder::MPlus(Ellipticity::new(1.0, u).unwrap()), &g);
        check_condition(ConditionId::LiohadGate, &g, &op, &ConditionParams::default(), &plan(1.0, 4, 128)).unwrap()
    };
    let at = run(9.0);
    assert_eq!(at.verdict, Verdict::Holds);
    assert!(at.min_margin.unwrap().abs() < 1e-12);
    assert_eq!(at.details["Lambda_over_lambda_plus_one"], 10.0);
    assert_eq!(run(8.0).verdict, Verdict::Violated);
    assert_eq!(run(12.0).verdict, Verdict::Holds);
}

#[test]
fn cond_h_with_positive_c_holds_beyond_onset() {
    let g = GeometrySpec::htype7();
    let fam = family(&g, Mode::Inf, DriftFrame::Horizontal, &[(&["0", "0", "0", "0"], "0.5")]);
    let op = OperatorSpec::new(mminus(1.0, 2.0), fam).unwrap();
    let c = check_with_lyapunov(ConditionId::CondH, &g, &op, &ConditionParams::default(), &plan(1.0, 7, 128)).unwrap();
    assert_eq!(c.condition.verdict, Verdict::Holds);
    let onset = c.condition.onset_radius.unwrap();
    assert!(onset > 1.0 && onset <= 16.0, "{onset}");
    assert_eq!(c.lyapunov.unwrap().verdict, Verdict::Holds);
}

#[test]
fn cond_h_without_coefficients_fails_everywhere() {
    let g = GeometrySpec::htype7();
    let op = OperatorSpec::pure(mminus(1.0, 2.0), &g);
    let r = check_condition(ConditionId::CondH, &g, &op, &ConditionParams::default(), &plan(1.0, 4, 64)).unwrap();
    assert_eq!(r.verdict, Verdict::Violated);
    assert_eq!(r.onset_radius, None);
    assert_eq!(r.violations, 256);
}

#[test]
fn grushin_plane_condition_fails_without_coefficients() {
    let g = GeometrySpec::grushin_plane();
    let op = OperatorSpec::pure(mminus(1.0, 2.0), &g);
    let r = check_condition(ConditionId::CondCor1Grushin, &g, &op, &ConditionParams::default(), &plan(1.0, 4, 64))
        .unwrap();
    assert_eq!(r.verdict, Verdict::Violated);
}

#[test]
fn incompatible_pairs_are_rejected() {
    let op = |g: &GeometrySpec| OperatorSpec::pure(mminus(1.0, 1.0), g);
    let params = ConditionParams::default();
    let p = plan(1.0, 2, 8);
    let heis = GeometrySpec::heisenberg(1).unwrap();
    assert!(matches!(
        check_condition(ConditionId::CondH, &heis, &op(&heis), &params, &p),
        Err(LiouvilleError::Incompatible { .. })
    ));
    let free3 = GeometrySpec::free_step2(3).unwrap();
    assert!(check_condition(ConditionId::CondGen, &free3, &op(&free3), &params, &p).is_err());
    let h7 = GeometrySpec::htype7();
    assert!(matches!(
        check_condition(ConditionId::OuType, &h7, &op(&h7), &params, &p),
        Err(LiouvilleError::InvalidParam(_))
    ));
    assert!(certify_counterexample(CounterexampleId::GrushinUbar, &h7, &p, &CertifyOptions::default()).is_err());
    assert_eq!("Grucond".parse::<ConditionId>().unwrap(), ConditionId::GruCond);
    assert!("condX".parse::<ConditionId>().is_err());
}

#[test]
fn every_condition_id_round_trips_through_json() {
    for id in ConditionId::ALL {
        let s = serde_json::to_string(&id).unwrap();
        assert_eq!(s, format!("\"{}\"", id.as_str()));
        assert_eq!(serde_json::from_str::<ConditionId>(&s).unwrap(), id);
    }
    for id in CounterexampleId::ALL {
        assert_eq!(id.as_str().parse::<CounterexampleId>().unwrap(), id);
    }
}

#[test]
fn certificates_hold_on_their_geometries() {
    let p = plan(0.25, 6, 200);
    let opts = CertifyOptions::default();
    for (id, g) in [
        (CounterexampleId::NonexU1, GeometrySpec::heisenberg(1).unwrap()),
        (CounterexampleId::NonexU1, GeometrySpec::htype7()),
        (CounterexampleId::NonexU1, GeometrySpec::free_step2(2).unwrap()),
        (CounterexampleId::GrushinUbar, GeometrySpec::grushin_plane()),
        (CounterexampleId::HgSubsolution, GeometrySpec::heisenberg_greiner(1, 2).unwrap()),
        (CounterexampleId::HgSubsolution, GeometrySpec::heisenberg_greiner(2, 3).unwrap()),
        (CounterexampleId::OptimalityDrift, GeometrySpec::htype7()),
        (CounterexampleId::OptimalityDrift, GeometrySpec::heisenberg(2).unwrap()),
    ] {
        let r = certify_counterexample(id, &g, &p, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{id} on {}: {:?}", g.name(), r.witnesses.first());
        assert_eq!(r.violations, 0);
    }
}

#[test]
fn ubar_matches_inner_closed_form_and_is_c1() {
    let g = GeometrySpec::grushin_plane();
    let r = certify_counterexample(CounterexampleId::GrushinUbar, &g, &plan(1.0, 6, 64), &CertifyOptions::default())
        .unwrap();
    assert_eq!(r.details["c0_gap"], 0.0);
    assert_eq!(r.details["c1_gap"], 0.0);
    assert_eq!(r.shells[0].0, 1.0 / 16.0);
    let p = [0.3, 0.2];
    let jet = crate::hcalc::horizontal_jet(&g, &Radial(&super::certify::Ubar), &p).unwrap();
    let rho = gauge(&g, &p);
    let expect = -7.5 * 0.09 * (1.0 - 1.0 / (rho * rho));
    assert!((-jet.laplacian() - expect).abs() < 1e-12);
}

#[test]
fn u1_is_not_a_supersolution_on_free_groups_with_three_generators() {
    let g = GeometrySpec::free_step2(3).unwrap();
    let r = certify_counterexample(CounterexampleId::NonexU1, &g, &plan(0.25, 6, 200), &CertifyOptions::default())
        .unwrap();
    assert_eq!(r.verdict, Verdict::Violated);
    assert!(r.notes.iter().any(|n| n.contains("r >= 3")));
}

#[test]
fn literal_drift_bound_fails() {
    let g = GeometrySpec::htype7();
    let opts = CertifyOptions {
        bound: Bound::Literal,
        ..CertifyOptions::default()
    };
    let r = certify_counterexample(CounterexampleId::OptimalityDrift, &g, &plan(0.25, 6, 100), &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Violated);
    assert_eq!(r.details["beta"], 19.0);
}

#[test]
fn growth_of_constant_is_zero() {
    let g = GeometrySpec::heisenberg(1).unwrap();
    let opts = GrowthOptions {
        c: 3.0,
        rungs: 4,
        per_rung: 32,
        ..GrowthOptions::default()
    };
    let r = growth_probe(&g, &field(&g, "3"), &opts).unwrap();
    assert!(r.rungs.iter().all(|x| x.sup == 0.0 && x.samples >= 32));
    assert_eq!(r.trend_q, Trend::Bounded);
    assert!(growth_probe(&g, &field(&g, "3"), &GrowthOptions { nu: 1.0, ..opts }).is_err());
}

#[test]
fn growth_sup_is_found_at_inner_edge() {
    let g = GeometrySpec::htype7();
    let opts = GrowthOptions {
        r0: 4.0,
        rungs: 3,
        per_rung: 128,
        ..GrowthOptions::default()
    };
    let r = growth_probe(&g, &field(&g, "-rho"), &opts).unwrap();
    for rung in &r.rungs {
        assert!(rung.sup <= -rung.r * (1.0 - 1e-12) && rung.sup > -rung.r * 1.01, "{rung:?}");
    }
}

fn compare_op(g: &GeometrySpec) -> OperatorSpec {
    let b: Vec<String> = (1..=7).map(|i| format!("-x{i}")).collect();
    let b: Vec<&str> = b.iter().map(|s| s.as_str()).collect();
    let fam = family(g, Mode::Inf, DriftFrame::Euclidean, &[(&b, "0")]);
    OperatorSpec::new(mminus(1.0, 1.0), fam).unwrap()
}

#[test]
fn comparison_premises() {
    let g = GeometrySpec::htype7();
    let op = compare_op(&g);
    let p = plan(4.0, 5, 64);
    let same = comparison_verdict(&g, &op, &field(&g, "2"), &field(&g, "2"), &LyapunovCandidate::LogRho, &p).unwrap();
    assert_eq!(same.verdict, Verdict::Holds, "{:?}", same.notes);
    assert_eq!(same.difference_max, Some(0.0));

    let shift = comparison_verdict(&g, &op, &field(&g, "3"), &field(&g, "2"), &LyapunovCandidate::LogRho, &p).unwrap();
    assert_eq!(shift.verdict, Verdict::Holds, "{:?}", shift.notes);
    assert_eq!((shift.difference_min, shift.difference_max), (Some(1.0), Some(1.0)));

    let log = comparison_verdict(
        &g,
        &op,
        &field(&g, "2 + log(rho)"),
        &field(&g, "2"),
        &LyapunovCandidate::LogRho,
        &p,
    )
    .unwrap();
    assert_eq!(log.verdict, Verdict::Inconclusive);
    assert!(!log.growth.holds);
    assert!((log.growth.fit_a.unwrap() - 1.0).abs() < 1e-9);

    let with_c = OperatorSpec::new(
        mminus(1.0, 1.0),
        family(&g, Mode::Inf, DriftFrame::Horizontal, &[(&["0", "0", "0", "0"], "1")]),
    )
    .unwrap();
    assert!(comparison_verdict(&g, &with_c, &field(&g, "1"), &field(&g, "1"), &LyapunovCandidate::LogRho, &p).is_err());
}

#[test]
fn p66_operator_pairs_with_inf() {
    let g = GeometrySpec::free_step2(3).unwrap();
    let q = Pucci66Param::new(0.2, 3).unwrap();
    let op = OperatorSpec::pure(SecondOrder::P66Minus(q), &g);
    assert_eq!(op.coeffs.mode, Mode::Inf);
    assert_eq!(op.mirrored().coeffs.mode, Mode::Sup);
}

#[test]
fn neg_trace_operator_with_identity_is_minus_laplacian() {
    let g = GeometrySpec::heisenberg(1).unwrap();
    let j = SecondOrderJson::NegTraceA {
        a: vec![vec!["1".into(), "0".into()], vec!["0".into(), "1".into()]],
    };
    let op = OperatorSpec::pure(SecondOrder::from_json(&j, &g).unwrap(), &g);
    let lap = OperatorSpec::pure(mminus(1.0, 1.0), &g);
    let p = [0.4, 0.3, -1.2];
    let u = field(&g, "x1^2 * x3 + rho^3");
    let a = pde_residual(&g, &op, &u, &p, 1e-3).unwrap();
    let b = pde_residual(&g, &lap, &u, &p, 1e-3).unwrap();
    assert!((a - b).abs() < 1e-12);
    let bad = SecondOrderJson::NegTraceA { a: vec![vec!["1".into()]] };
    assert!(SecondOrder::from_json(&bad, &g).is_err());
}
