//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and asserts.
//!
//! Run with `cargo test -p relent --test acceptance -- --nocapture` to see
//! the lines.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};
use std::process::Command;
use std::time::Instant;

use relent::cli::{run_campaign, Identity, Report, Residual, VerifyConfig};
use relent::entropy::{quantum_relative_entropy, ExtendedReal};
use relent::linop::{support_projector, CMatrix, CVector, DensityOperator, Projector, Tolerances, C64};
use relent::lueders::{corollary1_check, theorem2_check, ProjectiveObservable};
use relent::stategen::{derive_seed, Sampler};

fn report(criterion: u32, title: &str, ok: bool, detail: &str) {
    println!("{} criterion {criterion}: {title} ({detail})", if ok { "PASS" } else { "FAIL" });
}

fn campaign(identity: Identity, dims: &[usize], trials: usize, tol: f64, infinite: bool) -> Report {
    let cfg = VerifyConfig {
        dims: dims.to_vec(),
        trials,
        seed: 20_240_601,
        tol: Tolerances::with_identity(tol),
        include_singular: true,
        include_infinite: infinite,
        ..VerifyConfig::new(identity)
    };
    run_campaign(&cfg, None).expect("valid config")
}

fn finite_count(r: &Report) -> usize {
    r.records.iter().filter(|x| matches!(x.residual, Residual::Value(_))).count()
}

fn failures(r: &Report) -> Vec<String> {
    r.records
        .iter()
        .filter(|x| !x.pass)
        .take(5)
        .map(|x| format!("dim={} trial={} residual={:?} note={:?}", x.dim, x.trial, x.residual, x.note))
        .collect()
}

#[test]
fn criterion_1_lemma1_log_decomposition() {
    let start = Instant::now();
    let r = campaign(Identity::Lemma1, &[2, 3, 4, 5, 6, 8, 12, 16], 125, 1e-8, false);
    let secs = start.elapsed().as_secs_f64();
    let zero_weight = r.records.iter().filter(|x| !x.case.contains("zero_weights=0")).count();
    let deficient = r.records.iter().filter(|x| x.case.contains("deficient=true")).count();
    let ok = r.records.len() >= 1000
        && r.summary.failures == 0
        && r.summary.max_residual <= 1e-8
        && zero_weight > 0
        && deficient > 0
        && secs < 30.0;
    report(
        1,
        "logarithm of a block-diagonal state",
        ok,
        &format!(
            "{} trials, max residual {:.2e}, {zero_weight} with zero weights, {deficient} rank-deficient, {secs:.2} s",
            r.records.len(),
            r.summary.max_residual
        ),
    );
    assert!(ok, "{:?}", failures(&r));
}

#[test]
fn criterion_2_theorem1_breakdown() {
    let r = campaign(Identity::Theorem1, &[2, 3, 4, 8, 16], 280, 1e-8, true);
    let finite = finite_count(&r);
    let infinite = r.records.iter().filter(|x| x.residual == Residual::InfiniteConsistent).count();
    let ranks_seen = [0usize, 1, 2].map(|m| r.records.iter().any(|x| x.trial % 3 == m && x.residual != Residual::InfiniteConsistent));
    let confined = r.records.iter().filter(|x| x.case.contains("confined_without_block")).count();
    let ok = finite >= 1000 && infinite >= 100 && r.summary.failures == 0 && r.summary.max_residual <= 1e-8 && ranks_seen.iter().all(|&b| b);
    report(
        2,
        "mixing property of relative entropy",
        ok,
        &format!(
            "{finite} finite trials, max residual {:.2e}, {infinite} infinite-consistent, {confined} with p_k = 0 blocks",
            r.summary.max_residual
        ),
    );
    assert!(ok, "{:?}", failures(&r));
}

#[test]
fn criterion_3_entropy_mixing() {
    let r = campaign(Identity::Eq3a, &[2, 3, 4, 8, 16], 100, 1e-9, false);
    let ok = r.records.len() >= 500 && r.summary.failures == 0 && r.summary.max_residual <= 1e-9;
    report(3, "mixing property of entropy", ok, &format!("{} trials, max residual {:.2e}", r.records.len(), r.summary.max_residual));
    assert!(ok, "{:?}", failures(&r));
}

#[test]
fn criterion_4_corollary1() {
    let r = campaign(Identity::Corollary1, &[2, 3, 4, 5, 8, 16], 100, 1e-8, false);
    // support inclusion is a side condition folded into `pass`
    let plus = DensityOperator::pure(
        &CVector::from_vec(vec![C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)]),
        &Tolerances::default(),
    )
    .unwrap();
    let z = ProjectiveObservable::new(
        vec![1.0, -1.0],
        vec![Projector::coordinate(2, [0]), Projector::coordinate(2, [1])],
        &Tolerances::default(),
    )
    .unwrap();
    let closed = corollary1_check(&plus, &z).unwrap();
    let closed_err = (closed.direct.finite().unwrap() - LN_2).abs().max((closed.entropy_gain - LN_2).abs());
    let ok = r.records.len() >= 500 && r.summary.failures == 0 && r.summary.max_residual <= 1e-8 && closed_err <= 1e-12 && closed.support_included;
    report(
        4,
        "relative entropy to the Lueders state",
        ok,
        &format!("{} trials, max residual {:.2e}, closed form error {closed_err:.1e}", r.records.len(), r.summary.max_residual),
    );
    assert!(ok, "{:?}", failures(&r));
}

#[test]
fn criterion_5_corollary2() {
    let r = campaign(Identity::Corollary2, &[2, 3, 4, 6, 8, 12], 100, 1e-8, false);
    let ok = r.records.len() >= 500 && r.summary.failures == 0 && r.summary.max_residual <= 1e-8;
    report(
        5,
        "refinement straight line and composition",
        ok,
        &format!("{} trials, max residual {:.2e}", r.records.len(), r.summary.max_residual),
    );
    assert!(ok, "{:?}", failures(&r));
}

#[test]
fn criterion_6_corollary3() {
    let r = campaign(Identity::Corollary3, &[2, 3, 4, 8, 16], 120, 1e-10, true);
    let infinite = r.records.iter().filter(|x| x.residual == Residual::InfiniteConsistent).count();
    let ok = r.records.len() >= 500 && r.summary.failures == 0 && r.summary.max_residual <= 1e-10 && infinite > 0;
    report(
        6,
        "classical embedding",
        ok,
        &format!("{} trials, max residual {:.2e}, {infinite} infinite-consistent", r.records.len(), r.summary.max_residual),
    );
    assert!(ok, "{:?}", failures(&r));
}

#[test]
fn criterion_7_theorem2() {
    let r = campaign(Identity::Theorem2, &[2, 3, 4, 6, 8, 16], 100, 1e-8, false);
    let degenerate = r.records.iter().filter(|x| x.case.starts_with("degenerate") && x.case.contains("bases=4")).count();

    let tol = Tolerances::default();
    let plus = DensityOperator::pure(&CVector::from_vec(vec![C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)]), &tol).unwrap();
    let (w0, w1) = (0.9, 0.1);
    let sigma = DensityOperator::from_diagonal(&[w0, w1], &tol).unwrap();
    let t = theorem2_check(&plus, &sigma).unwrap();
    // d_first = S(I/2) − S(|+⟩⟨+|) = ln 2, d_second = H((½,½)‖(w0,w1))
    let h = 0.5 * (0.5f64 / w0).ln() + 0.5 * (0.5f64 / w1).ln();
    let closed_err = [
        (t.line.d_first.finite().unwrap() - LN_2).abs(),
        (t.line.d_second.finite().unwrap() - h).abs(),
        (t.line.d_total.finite().unwrap() - (LN_2 + h)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let ok = r.records.len() >= 500 && r.summary.failures == 0 && r.summary.max_residual <= 1e-8 && degenerate > 0 && closed_err <= 1e-12;
    report(
        7,
        "dephasing in the eigenbasis of sigma",
        ok,
        &format!(
            "{} trials, max residual {:.2e}, {degenerate} degenerate sigma x 4 bases, closed form error {closed_err:.1e}",
            r.records.len(),
            r.summary.max_residual
        ),
    );
    assert!(ok, "{:?}", failures(&r));
}

/// Vectors `|v_i⟩` (columns) with `Σ_i |v_i⟩⟨v_i| = ρ`, mixed by a random
/// isometry so they are neither orthogonal nor eigenvectors.
fn pure_state_decomposition(rho: &DensityOperator, s: &mut Sampler) -> CMatrix {
    let spec = rho.spectrum();
    let support: Vec<usize> = rho.spectrum().support_indices(rho.tolerances().rank).collect();
    let r = support.len();
    let m = r + s.range(0, 3);
    let u = s.unitary(m);
    let d = rho.dim();
    let mut root = CMatrix::zeros(d, r);
    for (j, &n) in support.iter().enumerate() {
        let scale = spec.eigenvalues()[n].sqrt();
        root.set_column(j, &(spec.eigenvectors().column(n) * C64::new(scale, 0.0)));
    }
    root * u.rows(0, r)
}

/// Orthonormal basis of the column span, dropping columns whose remainder
/// falls below `1e-7` of the largest column norm.
fn gram_schmidt(vs: &CMatrix) -> Vec<CVector> {
    let scale = vs.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut basis: Vec<CVector> = Vec::new();
    for c in vs.column_iter() {
        let mut v = c.into_owned();
        for _ in 0..2 {
            for b in &basis {
                v -= b * b.dotc(&v);
            }
        }
        let n = v.norm();
        if n > 1e-7 * scale {
            basis.push(v / C64::new(n, 0.0));
        }
    }
    basis
}

#[test]
fn criterion_8_foundations() {
    const TRIALS: usize = 500;
    let tol = Tolerances::default();
    let mut klein = (0usize, f64::INFINITY);
    let mut invariance = (0usize, 0.0f64);
    let mut span = (0usize, 0.0f64);
    for t in 0..TRIALS {
        let mut s = Sampler::new(derive_seed(8, &[t as u64]));
        let d = s.range(2, 10);
        let rank_rho = s.range(1, d);
        let rank_sigma = s.range(1, d);
        let sigma = s.density(d, rank_sigma, &tol).unwrap();
        let rho = if s.coin(0.5) {
            s.state_in_support(&support_projector(&sigma, &tol), rank_rho.min(rank_sigma), &tol).unwrap()
        } else {
            s.density(d, rank_rho, &tol).unwrap()
        };

        let rel = quantum_relative_entropy(&rho, &sigma).unwrap();
        let self_rel = quantum_relative_entropy(&rho, &rho).unwrap().finite().unwrap();
        if rel.finite().is_none_or(|x| x >= -1e-8) && self_rel.abs() <= 1e-8 {
            klein.0 += 1;
        }
        if let ExtendedReal::Finite(x) = rel {
            klein.1 = klein.1.min(x);
        }

        let u = s.unitary(d);
        let rotated = quantum_relative_entropy(&rho.conjugate_by(&u).unwrap(), &sigma.conjugate_by(&u).unwrap()).unwrap();
        match rel.residual(&rotated) {
            Some(r) if r <= 1e-8 => {
                invariance.0 += 1;
                invariance.1 = invariance.1.max(r);
            }
            _ => invariance.1 = f64::INFINITY,
        }

        // every vector of a pure-state decomposition is fixed by the support
        // projector, and the vectors span exactly the support
        let e = support_projector(&rho, &tol);
        let vs = pure_state_decomposition(&rho, &mut s);
        let fixed = (e.as_matrix() * &vs - &vs).norm();
        let cols = gram_schmidt(&vs);
        let span_proj = Projector::from_orthonormal_columns(&CMatrix::from_columns(&cols));
        let span_err = (span_proj.as_matrix() - e.as_matrix()).norm();
        let worst = fixed.max(span_err);
        if worst <= 1e-8 && span_proj.rank() == e.rank() {
            span.0 += 1;
        }
        span.1 = span.1.max(worst);
    }
    let ok = klein.0 == TRIALS && invariance.0 == TRIALS && span.0 == TRIALS;
    report(
        8,
        "Klein inequality, unitary invariance, support span",
        ok,
        &format!(
            "klein {}/{TRIALS} (min {:.1e}), invariance {}/{TRIALS} (max {:.1e}), span {}/{TRIALS} (max {:.1e})",
            klein.0, klein.1, invariance.0, invariance.1, span.0, span.1
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_9_determinism() {
    let cfg = VerifyConfig {
        dims: vec![2, 3, 5],
        trials: 40,
        seed: 99,
        include_infinite: true,
        ..VerifyConfig::new(Identity::Theorem1)
    };
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).max(2);
    let a = run_campaign(&cfg, Some(1)).unwrap().to_json();
    let b = run_campaign(&cfg, Some(1)).unwrap().to_json();
    let c = run_campaign(&cfg, Some(threads)).unwrap().to_json();
    let in_process = a == b && a == c;

    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: usize| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_relent"))
            .args(["verify", "corollary2", "--dims", "2,4", "--trials", "25", "--seed", "7"])
            .args(["--threads", &threads.to_string(), "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let first = run("a.json", 1);
    let second = run("b.json", 1);
    let parallel = run("c.json", threads);
    let via_cli = first == second && first == parallel;

    let ok = in_process && via_cli;
    report(
        9,
        "byte-identical reports",
        ok,
        &format!("in-process runs equal: {in_process}; CLI runs at 1 and {threads} threads equal: {via_cli}"),
    );
    assert!(ok);
}
