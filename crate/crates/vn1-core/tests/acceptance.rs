//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them all).
//!
//! Criteria 8 and 10 assert claims that turn out to be unattainable as
//! stated; they are implemented faithfully and left red with the measured
//! numbers in their output rather than weakened. Criterion 8: on the
//! specified pure-pure setup with a centered Gaussian the linear and full
//! second-order expansions are *exact* (errors at machine zero), so no error
//! slope exists to fit; the interpolation slope (3.0) and the coupling
//! diagnostic pass. Criterion 10: the discrete phase-space route cannot
//! reproduce the commutator-derived terms of the exact route at finite
//! dimension (the real Wigner table carries no Im⟨k̃|ρP̂|k̃⟩ information, and
//! the sandwich averages differ by wrap-corner commutators), so the two
//! routes differ at O(0.1–1) even at integer coupling; the difference is
//! computed and emitted as required, and the probability route agrees to
//! machine precision.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vn1_core::detector::{
    DetectorModel, DiscreteCanonicalDetector, GaussianDetector, MatrixDetector, QuadratureSpec,
};
use vn1_core::engine::{self, MeasurementSetup, Readout};
use vn1_core::linalg::{self, CMatrix, CVector, C64};
use vn1_core::oracle;
use vn1_core::spin::SpinOperator;
use vn1_core::states::{Postselection, SystemState};
use vn1_core::weak_limit::{self, ValidityOptions};
use vn1_core::weak_values::classify_special_case;

fn report(id: u32, pass: bool, detail: &str) {
    println!(
        "[criterion {id:02}] {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn random_unitary(rng: &mut StdRng, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    g.qr().q()
}

fn conjugated_spin(rng: &mut StdRng, eigs: [f64; 3]) -> SpinOperator {
    let u = random_unitary(rng, 3);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        3,
        eigs.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let m = &u * d * u.adjoint();
    SpinOperator::validate((&m + m.adjoint()).map(|z| z * 0.5)).unwrap()
}

fn random_hermitian(rng: &mut StdRng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&a + a.adjoint()).map(|z| z * 0.5)
}

fn random_density(rng: &mut StdRng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let r = &a * a.adjoint();
    let tr = linalg::trace(&r).re;
    r.map(|z| z / tr)
}

fn random_positive(rng: &mut StdRng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let r = &a * a.adjoint();
    let top = linalg::hermitian_eigenvalues(&r)[n - 1];
    r.map(|z| z / top)
}

fn random_pure(rng: &mut StdRng, n: usize) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        if v.norm() > 0.3 {
            return v;
        }
    }
}

fn random_axis(rng: &mut StdRng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// The worked pure-pure pair: ψ = (|+1⟩ + i|0⟩)/√2, φ = (|+1⟩ + |0⟩)/√2.
fn example_pair() -> (SystemState, Postselection) {
    let psi = CVector::from_vec(vec![
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(0.0, 0.0),
    ]);
    let phi = CVector::from_vec(vec![
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    ]);
    (
        SystemState::pure(&psi).unwrap(),
        Postselection::pure(&phi).unwrap(),
    )
}

#[test]
fn criterion_01_closed_form_exponential() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = SpinOperator::from_axis(random_axis(&mut rng)).unwrap();
        let phi: f64 = rng.random_range(-10.0..10.0);
        let closed = s.exp_phi(phi);
        let dense = linalg::expm(&s.matrix().map(|z| z * linalg::I * phi));
        worst = worst.max(linalg::max_abs(&(closed.matrix() - dense)));
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-12 && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        pass,
        &format!(
            "closed-form exponential vs dense exponential: max deviation {worst:.3e} over 100 draws ({:.3} s)",
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_closed_forms_match_oracle() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(102);
    let dims = [4usize, 8, 16, 32];
    let mut worst_p = 0.0f64;
    let mut worst_avg = 0.0f64;
    for trial in 0..100 {
        let n = dims[trial % dims.len()];
        let s = conjugated_spin(&mut rng, [1.0, 0.0, -1.0]);
        let system = SystemState::new(random_density(&mut rng, 3)).unwrap();
        let post = Postselection::new(random_positive(&mut rng, 3)).unwrap();
        let rho_d = random_density(&mut rng, n);
        let q = random_hermitian(&mut rng, n);
        let o = random_hermitian(&mut rng, n);
        let lambda = rng.random_range(0.0..5.0);

        let result = engine::run(
            &MeasurementSetup::new(
                system.clone(),
                Some(post.clone()),
                s.clone(),
                DetectorModel::Matrix(MatrixDetector::new(rho_d.clone(), q.clone(), o.clone()).unwrap()),
                lambda,
                Readout::Explicit,
            )
            .unwrap(),
        )
        .unwrap();
        let (p_f, avg) =
            oracle::measure_dense(system.matrix(), post.matrix(), &s, &rho_d, &q, &o, lambda)
                .unwrap();
        worst_p = worst_p.max((result.p_f - p_f).abs());
        worst_avg = worst_avg.max((result.avg_output - avg).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst_p <= 1e-10 && worst_avg <= 1e-10 && elapsed.as_secs_f64() < 30.0;
    report(
        2,
        pass,
        &format!(
            "engine vs brute-force oracle over 100 setups (dims 4..32, λ ≤ 5): max |ΔP_f| = {worst_p:.3e}, max |Δ⟨O⟩| = {worst_avg:.3e} ({:.2} s)",
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_03_completeness() {
    let mut rng = StdRng::seed_from_u64(103);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let s = conjugated_spin(&mut rng, [1.0, 0.0, -1.0]);
        let system = SystemState::new(random_density(&mut rng, 3)).unwrap();
        let lambda = rng.random_range(0.0..5.0);
        let detector = match trial % 3 {
            0 => {
                let sq: f64 = rng.random_range(0.3..1.2);
                let corr: f64 = rng.random_range(-0.6..0.6);
                let sp = (0.25 / (sq * sq) + 0.3).sqrt() / (1.0 - corr * corr).sqrt();
                DetectorModel::Gaussian(
                    GaussianDetector::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        sq,
                        sp,
                        corr * sq * sp,
                    )
                    .unwrap(),
                )
            }
            1 => {
                let d = rng.random_range(3..9);
                DetectorModel::Discrete(
                    DiscreteCanonicalDetector::new(d, random_density(&mut rng, d)).unwrap(),
                )
            }
            _ => {
                let n = rng.random_range(4..13);
                DetectorModel::Matrix(
                    MatrixDetector::new(
                        random_density(&mut rng, n),
                        random_hermitian(&mut rng, n),
                        random_hermitian(&mut rng, n),
                    )
                    .unwrap(),
                )
            }
        };
        let readout = match detector {
            DetectorModel::Matrix(_) => Readout::Explicit,
            _ => Readout::CanonicalP,
        };
        let result = engine::run(
            &MeasurementSetup::new(system, None, s, detector, lambda, readout).unwrap(),
        )
        .unwrap();
        worst = worst.max((result.p_f - 1.0).abs());
    }
    let pass = worst <= 1e-12;
    report(
        3,
        pass,
        &format!("identity postselection ⇒ P_f = 1 across all families: max deviation {worst:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_special_case_identities() {
    let mut rng = StdRng::seed_from_u64(104);
    let tol = 1e-12;
    let mut worst = [0.0f64; 4];

    // S² = 1 (two-level-like operators)
    for trial in 0..200 {
        let pattern = if trial % 2 == 0 {
            [1.0, 1.0, -1.0]
        } else {
            [1.0, -1.0, -1.0]
        };
        let s = conjugated_spin(&mut rng, pattern);
        let (system, post) = loop {
            let sys = SystemState::pure(&random_pure(&mut rng, 3)).unwrap();
            let post = Postselection::pure(&random_pure(&mut rng, 3)).unwrap();
            if vn1_core::weak_values::fidelity(&sys, &post).unwrap() > 0.05 {
                break (sys, post);
            }
        };
        let r = classify_special_case(&system, &post, &s).unwrap();
        assert!(r.flags.spin_half_like, "flag missing at trial {trial}");
        worst[0] = worst[0]
            .max(r.spin_half.c_minus_one)
            .max(r.spin_half.d_minus_a)
            .max(r.spin_half.e_minus_one);
    }

    // E_f or ρ_i commuting with S
    for trial in 0..200 {
        let u = random_unitary(&mut rng, 3);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ]));
        let s_m = &u * d * u.adjoint();
        let s = SpinOperator::validate((&s_m + s_m.adjoint()).map(|z| z * 0.5)).unwrap();
        let diag_commuting = |rng: &mut StdRng, u: &CMatrix, floor: f64| -> CMatrix {
            let d = CMatrix::from_diagonal(&CVector::from_iterator(
                3,
                (0..3).map(|_| C64::new(rng.random_range(floor..1.0), 0.0)),
            ));
            let m = u * d * u.adjoint();
            (&m + m.adjoint()).map(|z| z * 0.5)
        };
        let (system, post) = if trial % 2 == 0 {
            // postselection commutes with S
            let e = Postselection::new(diag_commuting(&mut rng, &u, 0.05)).unwrap();
            let sys = SystemState::new(random_density(&mut rng, 3)).unwrap();
            (sys, e)
        } else {
            // preparation commutes with S
            let m = diag_commuting(&mut rng, &u, 0.05);
            let tr = linalg::trace(&m).re;
            let sys = SystemState::new(m.map(|z| z / tr)).unwrap();
            let post = Postselection::new(random_positive(&mut rng, 3)).unwrap();
            (sys, post)
        };
        let r = classify_special_case(&system, &post, &s).unwrap();
        assert!(r.flags.commutes_with_s, "flag missing at trial {trial}");
        worst[1] = worst[1]
            .max(r.commuting.max_imaginary)
            .max(r.commuting.c_minus_b)
            .max(r.commuting.e_minus_b)
            .max(r.commuting.d_minus_a);
    }

    // commuting with S² but not with S
    for trial in 0..200 {
        let u = random_unitary(&mut rng, 3);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ]));
        let s_m = &u * d * u.adjoint();
        let s = SpinOperator::validate((&s_m + s_m.adjoint()).map(|z| z * 0.5)).unwrap();
        // block-diagonal over the S² eigenspaces {±1} ⊕ {0}, with a firmly
        // nonzero off-diagonal inside the ±1 block so [ρ, S] ≠ 0
        let rho = loop {
            let mut block = CMatrix::zeros(3, 3);
            let a: f64 = rng.random_range(0.1..1.0);
            let c: f64 = rng.random_range(0.1..1.0);
            let off = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let off = off * ((a * c).sqrt() * 0.9 / off.norm());
            if off.norm() < 0.05 {
                continue;
            }
            block[(0, 0)] = C64::new(a, 0.0);
            block[(2, 2)] = C64::new(c, 0.0);
            block[(0, 2)] = off;
            block[(2, 0)] = off.conj();
            block[(1, 1)] = C64::new(rng.random_range(0.05..0.5), 0.0);
            let m = &u * block * u.adjoint();
            let m = (&m + m.adjoint()).map(|z| z * 0.5);
            let tr = linalg::trace(&m).re;
            break m.map(|z| z / tr);
        };
        let system = SystemState::new(rho).unwrap();
        let post = loop {
            let p = Postselection::new(random_positive(&mut rng, 3)).unwrap();
            if vn1_core::weak_values::fidelity(&system, &p).unwrap() > 0.05 {
                break p;
            }
        };
        let r = classify_special_case(&system, &post, &s).unwrap();
        assert!(
            r.flags.commutes_with_s_squared,
            "flag missing at trial {trial}"
        );
        worst[2] = worst[2]
            .max(r.s_squared_commuting.c_imaginary)
            .max(r.s_squared_commuting.d_minus_a)
            .max(r.s_squared_commuting.e_minus_c);
    }

    // pure preparation and postselection
    for _ in 0..200 {
        let s = conjugated_spin(&mut rng, [1.0, 0.0, -1.0]);
        let (system, post) = loop {
            let sys = SystemState::pure(&random_pure(&mut rng, 3)).unwrap();
            let post = Postselection::pure(&random_pure(&mut rng, 3)).unwrap();
            if vn1_core::weak_values::fidelity(&sys, &post).unwrap() > 0.05 {
                break (sys, post);
            }
        };
        let r = classify_special_case(&system, &post, &s).unwrap();
        assert!(r.flags.pure_pure);
        worst[3] = worst[3]
            .max(r.pure_pure.b_minus_a_sq)
            .max(r.pure_pure.e_minus_c_sq)
            .max(r.pure_pure.d_minus_a_cstar);
    }

    let pass = worst.iter().all(|w| *w <= tol);
    report(
        4,
        pass,
        &format!(
            "special-case identities over 200 instances each: two-level {:.2e}, commuting {:.2e}, S²-commuting {:.2e}, pure-pure {:.2e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_gaussian_moments_vs_quadrature() {
    let mut rng = StdRng::seed_from_u64(105);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let sq: f64 = rng.random_range(0.3..1.2);
        let corr: f64 = rng.random_range(-0.6..0.6);
        let margin: f64 = rng.random_range(1.0..2.0);
        let sp = margin * (0.25 / (sq * sq)).sqrt() / (1.0 - corr * corr).sqrt();
        let g = GaussianDetector::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            sq,
            sp,
            corr * sq * sp,
        )
        .unwrap();
        let lambda = rng.random_range(0.0..5.0);
        let quad = g.moments_quadrature(lambda, QuadratureSpec::default());
        assert!(!quad.coarse_grid, "quadrature flagged itself as coarse");
        worst = worst.max(quad.moments.max_difference(&g.moments(lambda)));
    }
    let pass = worst <= 1e-8;
    report(
        5,
        pass,
        &format!("analytic vs 2-D quadrature moments over 50 parameter sets: max deviation {worst:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_06_discrete_wigner_marginals() {
    let mut rng = StdRng::seed_from_u64(106);
    let mut worst = 0.0f64;
    for d in [3usize, 4, 5, 8] {
        for _ in 0..20 {
            let det = DiscreteCanonicalDetector::new(d, random_density(&mut rng, d)).unwrap();
            let w = det.wigner();
            let f = vn1_core::detector::fourier_basis(d);
            for j in 0..d {
                worst = worst.max((w.p_marginal(j) - det.state()[(j, j)].re).abs());
            }
            for k in 0..d {
                let col = f.column(k);
                let expect = (col.adjoint() * det.state() * col)[(0, 0)].re;
                worst = worst.max((w.q_marginal(k) - expect).abs());
            }
        }
    }
    let pass = worst <= 1e-12;
    report(
        6,
        pass,
        &format!("discrete Wigner marginals (d ∈ {{3,4,5,8}}, 20 states each): max deviation {worst:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_eigenstate_pointer_shift() {
    let mut worst = 0.0f64;
    for sigma_q in [0.5, 0.9] {
        let g = GaussianDetector::new(0.0, 0.0, sigma_q, 1.0 / sigma_q, 0.0).unwrap();
        for (level, s_val) in [(0usize, 1.0), (1, 0.0), (2, -1.0)] {
            for lambda in [0.1, 1.0, 3.0] {
                let mut v = CVector::zeros(3);
                v[level] = C64::new(1.0, 0.0);
                let result = engine::run(
                    &MeasurementSetup::new(
                        SystemState::pure(&v).unwrap(),
                        None,
                        SpinOperator::from_axis([0.0, 0.0, 1.0]).unwrap(),
                        DetectorModel::Gaussian(g),
                        lambda,
                        Readout::CanonicalP,
                    )
                    .unwrap(),
                )
                .unwrap();
                worst = worst.max((result.avg_output - lambda * s_val).abs());
            }
        }
    }
    let pass = worst <= 1e-10;
    report(
        7,
        pass,
        &format!("eigenstate pointer shift ⟨P⟩ = λs (s ∈ {{−1,0,+1}}, λ ∈ {{0.1,1,3}}): max deviation {worst:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_weak_limit_convergence_orders() {
    let start = Instant::now();
    let (system, post) = example_pair();
    let sigma_q = 0.5;
    let setup = MeasurementSetup::new(
        system,
        Some(post),
        SpinOperator::from_axis([0.0, 0.0, 1.0]).unwrap(),
        DetectorModel::Gaussian(GaussianDetector::new(0.0, 0.0, sigma_q, 1.0, 0.0).unwrap()),
        1.0,
        Readout::CanonicalP,
    )
    .unwrap();
    let lambdas = weak_limit::log_grid(1e-4, 1e-2, 9).unwrap();
    let scan = weak_limit::convergence_scan(&setup, &lambdas, (1e-4, 1e-2)).unwrap();

    let lambda_probe = 0.37;
    let validity = weak_limit::validity_check(&setup.detector, lambda_probe, ValidityOptions::default());
    let wcond_ok = validity.wcond_value == 2.0 * lambda_probe * sigma_q;

    let in_range = |fit: &weak_limit::SlopeFit, target: f64, tol: f64| {
        fit.slope.map(|s| (s - target).abs() <= tol).unwrap_or(false)
    };
    let linear_ok = in_range(&scan.slope_linear, 2.0, 0.2);
    let second_ok = in_range(&scan.slope_second_order, 3.0, 0.3);
    let interp_ok = in_range(&scan.slope_interpolation, 3.0, 0.3);
    let runtime_ok = start.elapsed().as_secs_f64() < 10.0;

    let max_err_linear = scan
        .rows
        .iter()
        .filter_map(|r| r.err_linear)
        .fold(0.0f64, f64::max);
    let max_err_second = scan
        .rows
        .iter()
        .map(|r| r.err_second_order)
        .fold(0.0f64, f64::max);
    let fmt = |fit: &weak_limit::SlopeFit| match fit.slope {
        Some(s) => format!("{s:.3}"),
        None => format!("no fit ({} usable points)", fit.points_used),
    };
    let pass = linear_ok && second_ok && interp_ok && wcond_ok && runtime_ok;
    report(
        8,
        pass,
        &format!(
            "convergence orders on the pure-pure example with a centered Gaussian (σ_Q = 0.5): \
             linear slope {} (want 2±0.2), second-order slope {} (want 3±0.3), interpolation slope {} (want 3±0.3), \
             2λσ_Q diagnostic exact: {}, runtime {:.2} s. \
             Note: the linear and second-order expansions are exact on this setup \
             (max |error| = {:.2e} and {:.2e}, at the f64 noise floor), so those error slopes do not exist; \
             the order claims are instead pinned on non-degenerate setups in the weak-limit module tests.",
            fmt(&scan.slope_linear),
            fmt(&scan.slope_second_order),
            fmt(&scan.slope_interpolation),
            wcond_ok,
            start.elapsed().as_secs_f64(),
            max_err_linear,
            max_err_second,
        ),
    );
    assert!(pass, "criterion 8 slope asserts fail as stated: the expansions are exact on this setup, so the demanded error slopes do not exist (details in the printed line above)");
}

#[test]
fn criterion_09_ideal_discrete_measurement() {
    let mut worst = 0.0f64;
    for d in [3usize, 5] {
        for (level, shift) in [(0usize, 1i64), (1, 0), (2, -1)] {
            let det = DiscreteCanonicalDetector::pointer_state(d, 0).unwrap();
            let mut rho_s = CMatrix::zeros(3, 3);
            rho_s[(level, level)] = C64::new(1.0, 0.0);
            let s = SpinOperator::from_axis([0.0, 0.0, 1.0]).unwrap();
            let (_, q_op) = vn1_core::detector::discrete_conjugate_pair(d);
            let joint = oracle::evolve_joint(&rho_s, det.state(), &s, &q_op, 1.0).unwrap();
            let conditioned = oracle::postselect(&joint, &linalg::identity(3)).unwrap();
            let target = shift.rem_euclid(d as i64) as usize;
            let mut expect = CMatrix::zeros(d, d);
            expect[(target, target)] = C64::new(1.0, 0.0);
            worst = worst.max(linalg::max_abs(&(&conditioned.rho - expect)));
        }
    }
    let pass = worst <= 1e-12;
    report(
        9,
        pass,
        &format!("ideal discrete measurement maps the pointer onto the shifted basis state: max deviation {worst:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_discrete_route_consistency() {
    let mut rng = StdRng::seed_from_u64(110);
    let mut max_pf_delta = 0.0f64;
    let mut max_avg_delta = 0.0f64;
    println!("[criterion 10] discrete phase-space route vs exact route, λ = 1:");
    for d in [3usize, 5, 7] {
        let mut d_pf = 0.0f64;
        let mut d_avg = 0.0f64;
        for _ in 0..6 {
            let det = DiscreteCanonicalDetector::new(d, random_density(&mut rng, d)).unwrap();
            let system = SystemState::pure(&random_pure(&mut rng, 3)).unwrap();
            let post = loop {
                let p = Postselection::new(random_positive(&mut rng, 3)).unwrap();
                if vn1_core::weak_values::fidelity(&system, &p).unwrap() > 0.05 {
                    break p;
                }
            };
            let s = conjugated_spin(&mut rng, [1.0, 0.0, -1.0]);
            let result = engine::run(
                &MeasurementSetup::new(
                    system,
                    Some(post),
                    s,
                    DetectorModel::Discrete(det),
                    1.0,
                    Readout::CanonicalP,
                )
                .unwrap(),
            )
            .unwrap();
            let delta = result.wigner_route.expect("discrete runs report the route delta");
            assert!(delta.integer_coupling);
            d_pf = d_pf.max(delta.p_f_delta);
            d_avg = d_avg.max(delta.avg_delta);
        }
        println!("    d = {d}: max |ΔP_f| = {d_pf:.3e}, max |Δ⟨P⟩| = {d_avg:.3e}");
        max_pf_delta = max_pf_delta.max(d_pf);
        max_avg_delta = max_avg_delta.max(d_avg);
    }
    // non-integer coupling: reported, not asserted
    let det = DiscreteCanonicalDetector::new(5, random_density(&mut rng, 5)).unwrap();
    let system = SystemState::pure(&random_pure(&mut rng, 3)).unwrap();
    let s = conjugated_spin(&mut rng, [1.0, 0.0, -1.0]);
    let result = engine::run(
        &MeasurementSetup::new(
            system,
            None,
            s,
            DetectorModel::Discrete(det),
            0.7,
            Readout::CanonicalP,
        )
        .unwrap(),
    )
    .unwrap();
    let nonint = result.wigner_route.unwrap();
    println!(
        "    non-integer λ = 0.7 (d = 5, reported only): |ΔP_f| = {:.3e}, |Δ⟨P⟩| = {:.3e}",
        nonint.p_f_delta, nonint.avg_delta
    );

    let pass = max_pf_delta <= 1e-9 && max_avg_delta <= 1e-9;
    report(
        10,
        pass,
        &format!(
            "integer-coupling agreement of the two discrete routes: max |ΔP_f| = {max_pf_delta:.3e} (probability route agrees), \
             max |Δ⟨P⟩| = {max_avg_delta:.3e}. The average cannot agree at finite d: the real Wigner table lacks the \
             Im⟨k̃|ρP̂|k̃⟩ data entering the commutator terms, and the sandwich averages differ by wrap-corner \
             commutators — no convention repairs this; the deviation is emitted per run instead."
        ),
    );
    assert!(pass, "criterion 10 asserts route agreement at λ = 1, which is unattainable at finite dimension (measured deviations in the printed lines above)");
}
