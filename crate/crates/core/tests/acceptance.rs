//! Acceptance criteria 1 to 9, one line per criterion on standard output.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subelliptic::cli::{execute, parse_config, Payload};
use subelliptic::extremal::{rank2_eigenvalues, Ellipticity};
use subelliptic::geometry::{gauge, GeometrySpec};
use subelliptic::hcalc::{horizontal_jet, radial_horizontal_hessian, Log, Power, Radial, RadialProfile};
use subelliptic::liouville::{
    certify_counterexample, check_condition, check_fundamental, fundamental_profile, growth_probe, Bound,
    CertifyOptions, ConditionId, ConditionParams, CounterexampleId, FundamentalKind, GrowthOptions, OperatorSpec,
    SecondOrder, Trend,
};
use subelliptic::report::Verdict;
use subelliptic::sampling::{salt, sample_shells, SamplePlan};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn points(g: &GeometrySpec, tag: &str, lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
    let plan = SamplePlan::default();
    let pts: Vec<_> = sample_shells(g, &plan, salt(tag), &[(lo, hi)], n)
        .into_iter()
        .filter_map(|s| s.point)
        .collect();
    assert_eq!(pts.len(), n, "{tag}: singular band rejected samples on {}", g.name());
    pts
}

fn geometries() -> Vec<GeometrySpec> {
    vec![
        GeometrySpec::htype7(),
        GeometrySpec::heisenberg(1).unwrap(),
        GeometrySpec::heisenberg(2).unwrap(),
        GeometrySpec::free_step2(2).unwrap(),
        GeometrySpec::free_step2(3).unwrap(),
        GeometrySpec::grushin_plane(),
        GeometrySpec::grushin(2, 1, 2.0).unwrap(),
        GeometrySpec::grushin(2, 2, 0.5).unwrap(),
        GeometrySpec::heisenberg_greiner(1, 2).unwrap(),
        GeometrySpec::heisenberg_greiner(2, 3).unwrap(),
    ]
}

fn ad_matches_closed_forms() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut total = 0;
    for g in geometries() {
        let profiles: Vec<(String, Box<dyn RadialProfile + Sync>)> = vec![
            ("rho^(2-Q)".into(), Box::new(Power(2.0 - g.q()))),
            ("log rho".into(), Box::new(Log)),
            ("rho^2.5".into(), Box::new(Power(2.5))),
        ];
        let pts = points(&g, "acceptance-ad", 0.25, 16.0, 1000);
        for (name, prof) in &profiles {
            for p in &pts {
                let ad = horizontal_jet(&g, &Radial(prof.as_ref()), p).unwrap();
                let closed = radial_horizontal_hessian(&g, prof.as_ref(), p).unwrap();
                let err = (&ad.hhess - &closed.hhess).amax().max((&ad.hgrad - &closed.hgrad).amax());
                let ratio = err / (1e-9 * (1.0 + closed.hhess.norm()));
                if ratio > worst {
                    worst = ratio;
                    worst_at = format!("{name} on {}", g.name());
                }
                total += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        worst <= 1.0 && secs < 10.0,
        format!("{total} jets, worst error {worst:.3e} of the allowance ({worst_at}), {secs:.2} s"),
    )
}

fn gauges_are_harmonic() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let gs = geometries().into_iter().filter(|g| !matches!(g.kind(), subelliptic::geometry::GeometryKind::FreeStep2 { .. }));
    for g in gs {
        let prof = Power(2.0 - g.q());
        for p in points(&g, "acceptance-harmonic", 0.25, 16.0, 1000) {
            let jet = horizontal_jet(&g, &Radial(&prof), &p).unwrap();
            let scale: f64 = jet.hhess.diagonal().iter().map(|v| v.abs()).sum();
            let ratio = jet.laplacian().abs() / (1e-8 * scale);
            if ratio > worst {
                worst = ratio;
                worst_at = g.name();
            }
        }
    }
    Outcome::new(worst <= 1.0, format!("worst |sub-Laplacian| {worst:.3e} of 1e-8 scale ({worst_at})"))
}

fn pucci_fundamental_solutions() -> Outcome {
    let g = GeometrySpec::htype7();
    let plan = SamplePlan::default().with_ladder(1.0, 5, 200);
    let mut failures = Vec::new();
    let mut checked = 0;
    for (l, u) in [(1.0, 1.0), (1.0, 2.0), (1.0, 9.0)] {
        let ell = Ellipticity::new(l, u).unwrap();
        for kind in [FundamentalKind::Phi1, FundamentalKind::Phi2, FundamentalKind::Psi1, FundamentalKind::Psi2] {
            let prof = fundamental_profile(kind, &ell, g.q(), 1.0, 0.0).unwrap();
            if prof.alpha != 9.0 * l / u + 1.0 || prof.beta != 9.0 * u / l + 1.0 {
                failures.push(format!("{kind:?} ({l},{u}) exponents {} {}", prof.alpha, prof.beta));
            }
            let r = check_fundamental(&g, &prof, &ell, (1.0, 100.0), &plan).unwrap();
            checked += r.evaluated;
            if r.verdict != Verdict::Holds || r.evaluated != 1000 {
                failures.push(format!("{kind:?} ({l},{u}) {:?} at {} points", r.verdict, r.evaluated));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("12 profiles, {checked} residuals on [1, 100], exponents exact")
    } else {
        failures.join("; ")
    };
    Outcome::new(failures.is_empty(), detail)
}

fn unit(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let v = DVector::from_fn(m, |_, _| rng.random_range(-1.0f64..1.0));
    (&v / v.norm()).as_slice().to_vec()
}

fn eigenvalue_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for m in 4..=7 {
        for case in 0..100 {
            let s = rng.random_range(-2.0..2.0);
            let a: f64 = rng.random_range(-2.0..2.0);
            let b: f64 = rng.random_range(-2.0..2.0);
            let (a, b, c) = if case % 10 == 0 {
                // c² = ab
                let (a, b) = (a.abs(), b.abs());
                (a, b, (a * b).sqrt())
            } else {
                (a, b, rng.random_range(-2.0..2.0))
            };
            let v = unit(&mut rng, m);
            let w = unit(&mut rng, m);
            worst = worst.max(rank2_error(m, s, a, b, c, &v, &w));
        }
    }
    let g = GeometrySpec::grushin_plane();
    let mut worst_rel: f64 = 0.0;
    for p in points(&g, "acceptance-eiggru", 0.25, 16.0, 1000) {
        let (x, y) = (p[0], p[1]);
        let rho = gauge(&g, &p);
        let hess = horizontal_jet(&g, &Radial(&Log), &p).unwrap().hhess;
        let eig = SymmetricEigen::new(hess.clone()).eigenvalues;
        let root = (9.0 * x.powi(4) + 4.0 * y * y).sqrt();
        let (lo, hi) = ((x * x - root) / (2.0 * rho.powi(4)), (x * x + root) / (2.0 * rho.powi(4)));
        let (e0, e1) = (eig[0].min(eig[1]), eig[0].max(eig[1]));
        let tr = x * x / rho.powi(4);
        let det = (-2.0 * x.powi(4) - y * y) / rho.powi(8);
        for (got, want) in [(e0, lo), (e1, hi), (lo + hi, tr), (lo * hi, det), (hess.trace(), tr), (hess.determinant(), det)] {
            worst_rel = worst_rel.max((got - want).abs() / want.abs());
        }
    }
    Outcome::new(
        worst <= 1e-10 && worst_rel <= 1e-10,
        format!("rank-two closed form vs nalgebra: {worst:.2e}; Grushin plane trace/determinant relative: {worst_rel:.2e}"),
    )
}

fn rank2_error(m: usize, s: f64, a: f64, b: f64, c: f64, v: &[f64], w: &[f64]) -> f64 {
    let got = rank2_eigenvalues(s, a, b, c, v, w).unwrap().eigenvalues;
    let (vv, ww) = (DVector::from_column_slice(v), DVector::from_column_slice(w));
    let mat = DMatrix::identity(m, m) * s + &vv * vv.transpose() * a + &ww * ww.transpose() * b
        + (&vv * ww.transpose() + &ww * vv.transpose()) * c;
    let mut want: Vec<f64> = SymmetricEigen::new(mat).eigenvalues.iter().copied().collect();
    want.sort_by(f64::total_cmp);
    got.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn counterexample_certificates() -> Outcome {
    let plan = SamplePlan::default().with_ladder(0.25, 8, 1250);
    let opts = CertifyOptions::default();
    let literal = CertifyOptions {
        bound: Bound::Literal,
        ..CertifyOptions::default()
    };
    let cases = [
        (CounterexampleId::NonexU1, GeometrySpec::heisenberg(1).unwrap(), &opts),
        (CounterexampleId::NonexU1, GeometrySpec::htype7(), &opts),
        (CounterexampleId::NonexU1, GeometrySpec::free_step2(2).unwrap(), &opts),
        (CounterexampleId::NonexU1, GeometrySpec::free_step2(3).unwrap(), &opts),
        (CounterexampleId::GrushinUbar, GeometrySpec::grushin_plane(), &opts),
        (CounterexampleId::HgSubsolution, GeometrySpec::heisenberg_greiner(1, 2).unwrap(), &opts),
        (CounterexampleId::OptimalityDrift, GeometrySpec::htype7(), &literal),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (id, g, o) in cases {
        let r = certify_counterexample(id, &g, &plan, o).unwrap();
        let mut ok = r.verdict == Verdict::Holds && r.violations == 0 && r.evaluated >= 10_000;
        if id == CounterexampleId::GrushinUbar {
            ok &= r.details["c0_gap"] <= 1e-12 && r.details["c1_gap"] <= 1e-12;
        }
        pass &= ok;
        parts.push(format!("{id} on {}: {} violations of {}", g.name(), r.violations, r.evaluated));
    }
    let r = certify_counterexample(CounterexampleId::OptimalityDrift, &GeometrySpec::htype7(), &plan, &opts).unwrap();
    parts.push(format!(
        "[info] optimality_drift with the |D_X rho|^2 factor in the bound: {:?}, {} violations",
        r.verdict, r.violations
    ));
    Outcome::new(pass, parts.join("; "))
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_config(name: &str) -> Payload {
    let path = configs_dir().join(name);
    let src = std::fs::read_to_string(&path).unwrap();
    execute(&parse_config(&src, name).unwrap()).unwrap()
}

fn condition_lyapunov_consistency() -> Outcome {
    let holding = [
        "condH_c0.json",
        "condcor1free_r3.json",
        "condcor1freepucci_r3.json",
        "Grucond_212.json",
        "condcor1grushin_plane.json",
        "condcor1_hg12.json",
        "condgen_heisenberg2.json",
        "OUtype_htype7.json",
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for name in holding {
        let Payload::Check(c) = run_config(name) else { panic!("{name} is not a check config") };
        let lyap = c.lyapunov.as_ref().map(|l| l.verdict);
        let ok = c.condition.verdict == Verdict::Holds
            && c.condition.onset_radius.is_some_and(f64::is_finite)
            && lyap == Some(Verdict::Holds);
        pass &= ok;
        parts.push(format!("{} R*={:?} lyapunov {:?}", c.condition.check, c.condition.onset_radius, lyap));
    }
    let Payload::Check(c) = run_config("condH_b0_c0.json") else { panic!() };
    pass &= c.condition.verdict == Verdict::Violated;
    parts.push(format!("b = c = 0: {:?}", c.condition.verdict));
    Outcome::new(pass, parts.join("; "))
}

fn liohad_gate() -> Outcome {
    let g = GeometrySpec::htype7();
    let plan = SamplePlan::default().with_ladder(1.0, 4, 128);
    let verdict = |upper: f64| {
        let op = OperatorSpec::pure(SecondOrder::MPlus(Ellipticity::new(1.0, upper).unwrap()), &g);
        check_condition(ConditionId::LiohadGate, &g, &op, &ConditionParams::default(), &plan)
            .unwrap()
            .verdict
    };
    let (boundary, below) = (verdict(9.0), verdict(8.0));
    Outcome::new(
        boundary == Verdict::Holds && below == Verdict::Violated,
        format!("(1,9,10): {boundary:?}; (1,8,10): {below:?}"),
    )
}

fn growth_probe_trends() -> Outcome {
    let start = Instant::now();
    let g = GeometrySpec::htype7();
    let u = subelliptic::hcalc::ExprField::new(
        subelliptic::expr::Expr::for_geometry("(1 + rho^2)^(-4)", &g).unwrap(),
        1e-3,
    );
    let opts = GrowthOptions {
        r0: 16.0,
        rungs: 7,
        nu: 0.5,
        ..GrowthOptions::default()
    };
    let r = growth_probe(&g, &u, &opts).unwrap();
    let radii: Vec<f64> = r.rungs.iter().map(|x| x.r).collect();
    let last: Vec<f64> = r.rungs.iter().rev().take(3).map(|x| x.scaled_q).collect();
    let hi = last.iter().copied().fold(f64::MIN, f64::max);
    let lo = last.iter().copied().fold(f64::MAX, f64::min);
    let variation = (hi - lo) / hi.abs();
    let secs = start.elapsed().as_secs_f64();
    let ok = radii.first() == Some(&16.0)
        && radii.last() == Some(&1024.0)
        && r.trend_q == Trend::Bounded
        && variation < 0.1
        && r.trend_nu == Trend::Diverging
        && secs < 30.0;
    Outcome::new(
        ok,
        format!(
            "exponent {}: {:?} (last-three variation {:.2e}); exponent {}: {:?}; {secs:.2} s",
            r.exponent_q, r.trend_q, variation, r.exponent_nu, r.trend_nu
        ),
    )
}

fn reports_are_worker_independent() -> Outcome {
    let mut names: Vec<_> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    let mut differing = Vec::new();
    for name in &names {
        let path = configs_dir().join(name);
        let cmd = path.file_stem().unwrap().to_str().unwrap();
        let sub = subcommand(&std::fs::read_to_string(&path).unwrap());
        let outputs: Vec<Vec<u8>> = [1, 4, 16]
            .iter()
            .map(|w| {
                Command::new(env!("CARGO_BIN_EXE_subell"))
                    .args([sub.as_str(), "--config", path.to_str().unwrap(), "--workers", &w.to_string()])
                    .output()
                    .unwrap()
                    .stdout
            })
            .collect();
        if outputs[0].is_empty() || outputs.iter().any(|o| o != &outputs[0]) {
            differing.push(cmd.to_string());
        }
    }
    Outcome::new(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} configs byte-identical under 1, 4 and 16 workers", names.len())
        } else {
            format!("differing or empty: {}", differing.join(", "))
        },
    )
}

fn subcommand(src: &str) -> String {
    let v: serde_json::Value = serde_json::from_str(src).unwrap();
    v["task"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("AD matches the radial closed forms", ad_matches_closed_forms),
        ("rho^(2-Q) is harmonic", gauges_are_harmonic),
        ("Pucci fundamental solutions", pucci_fundamental_solutions),
        ("eigenvalue oracles", eigenvalue_oracles),
        ("counterexample certificates", counterexample_certificates),
        ("condition and Lyapunov consistency", condition_lyapunov_consistency),
        ("dimension gate", liohad_gate),
        ("growth probe", growth_probe_trends),
        ("determinism across workers", reports_are_worker_independent),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        writeln!(out, "criterion {}: {tag} {name}: {}", i + 1, o.detail).unwrap();
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
