//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured numbers before asserting.
//!
//! Three assertions encode universal complete-positivity claims for
//! randomized ensembles (criteria 5, 6 and the family half of 10). Those
//! claims are numerically false — intermediate maps of generic product-state
//! dilations are NCP, which is precisely the non-Markovianity witness — so
//! the three tests fail by design honesty rather than being weakened to
//! pass. The measured violation rates are printed in full. Everything the
//! reference constructions actually publish (criteria 1–4 and 7–9, and the
//! determinism half of 10) passes at the stated tolerances.

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::Command;

use redmap_core::*;

fn line(criterion: &str, pass: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn bell() -> JointPureState {
    let r = 1.0 / 2.0f64.sqrt();
    JointPureState::new(
        vec![
            Complex64::new(r, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(r, 0.0),
        ],
        2,
        2,
        Slot::Second,
    )
    .unwrap()
}

#[test]
fn acceptance_01_golden_inverse_map_displays() {
    let conv = resolved_convention();
    let mut worst = 0.0f64;
    for theta in [PI / 12.0, PI / 6.0, PI / 5.0] {
        let rep = scenario_cnot_twice(theta, &conv).unwrap();
        // residual covers the map display, the Choi display and the
        // closed-form nonzero eigenvalues, all entrywise
        worst = worst.max(rep.residual_vs_reference.unwrap());
    }
    let pass = line(
        "1",
        worst <= 1e-10,
        &format!("double-CNOT inverse map/Choi displays and eigenvalues: worst residual {worst:.3e} (tolerance 1e-10)"),
    );
    assert!(pass);
}

#[test]
fn acceptance_02_sqrtcnot_spectrum_closed_form() {
    // under the convention selected by the search
    let search = convention_search(&linspace(0.05, 1.5, 16)).unwrap();
    let conv = ResolvedConvention {
        gate: search.winner.gate,
        reading: search.winner.reading,
    };
    let grid: Vec<f64> = linspace(0.0, 1.5, 64)
        .into_iter()
        .filter(|t| (t - FRAC_PI_4).abs() > 1e-3)
        .collect();
    let mut worst = 0.0f64;
    let mut min_lambda = f64::INFINITY;
    for &theta in &grid {
        let rep = scenario_sqrtcnot(theta, &conv).unwrap();
        worst = worst.max(rep.residual_vs_reference.unwrap());
        min_lambda = min_lambda.min(rep.lambda_minus);
    }
    let pass = line(
        "2",
        worst <= 1e-8 && min_lambda >= -1e-8,
        &format!(
            "root-of-CNOT spectrum vs closed form over {} grid points: worst residual {worst:.3e} \
             (tolerance 1e-8), min lambda {min_lambda:.3e} (floor -1e-8)",
            grid.len()
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_03_sqrtcphase_reference_spectrum() {
    let conv = resolved_convention();
    let rep = scenario_sqrtcphase(FRAC_PI_4, &conv).unwrap();
    let per_eig = rep
        .spectrum
        .iter()
        .zip(scenario::REFERENCE_SPECTRUM_SQRTCPHASE.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let trace: f64 = rep.spectrum.iter().sum();
    let pass = line(
        "3",
        per_eig <= 5e-4 && (trace - 2.0).abs() <= 1e-9 && rep.verdict == ScenarioVerdict::Ncp,
        &format!(
            "root-of-CPhase spectrum at quarter pi: per-eigenvalue deviation {per_eig:.3e} \
             (tolerance 5e-4), trace deviation {:.3e} (tolerance 1e-9), verdict {}",
            (trace - 2.0).abs(),
            rep.verdict.as_str()
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_04_backward_profile() {
    let grid = linspace(0.0, 2.0 * PI, 64);
    let points = backward_entropy_profile(&grid).unwrap();
    let worst_state = points
        .iter()
        .map(|p| p.residual_vs_reference)
        .fold(0.0, f64::max);
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.entropy_bits), hi.max(p.entropy_bits))
        });
    let (l0, l1) = scenario::reference_backward_eigenvalues();
    let oracle_bits = -(l0 * l0.log2() + l1 * l1.log2());
    let value_dev = (points[0].entropy_bits - oracle_bits).abs();
    // the printed closed-form constant matches neither logarithm base
    let printed_constant = 0.25 * (5.0 - 2.0 * 2.0f64.sqrt() * (1.0 / 2.0f64.sqrt()).atanh());
    let pass = line(
        "4",
        worst_state <= 1e-10 && (hi - lo) <= 1e-9 && value_dev <= 1e-6,
        &format!(
            "backward profile: state residual {worst_state:.3e} (tolerance 1e-10), entropy spread \
             {:.3e} (tolerance 1e-9), entropy {:.6} bits vs eigenvalue oracle {:.6} (tolerance 1e-6); \
             printed closed form {printed_constant:.6} differs from the oracle by {:.4} bits \
             ({:.4} nats) — logged discrepancy",
            hi - lo,
            points[0].entropy_bits,
            oracle_bits,
            (printed_constant - oracle_bits).abs(),
            (printed_constant - oracle_bits * std::f64::consts::LN_2).abs(),
        ),
    );
    assert!(pass);
}

/// Criterion 5 encodes a universal claim: every well-conditioned intermediate
/// map of a product-dilation one-parameter family is CP. The claim is false
/// for generic Hamiltonians, and this test reports the measured rate honestly.
#[test]
fn acceptance_05_randomized_divisibility_suite() {
    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut worst = 0.0f64;
    let mut case = 0u64;
    while checked < 500 {
        let mut rng = CounterRng::new(0xC5, case);
        case += 1;
        // random Hermitian d=4 (Gaussian entries, Hermitized)
        let mut g = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                g.set(i, j, rng.next_complex_gaussian());
            }
        }
        let h = g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
        // random product state: only the environment factor enters the map
        let mut chi = [rng.next_complex_gaussian(), rng.next_complex_gaussian()];
        let norm = (chi[0].norm_sqr() + chi[1].norm_sqr()).sqrt();
        chi[0] /= norm;
        chi[1] /= norm;
        // random 0 < s < t <= 2
        let (mut s, mut t) = (rng.next_f64_open() * 2.0, rng.next_f64_open() * 2.0);
        if s > t {
            std::mem::swap(&mut s, &mut t);
        }
        if t - s < 1e-9 {
            continue;
        }
        let u_s = unitary_exp(&h, s).unwrap();
        let u_t = unitary_exp(&h, t).unwrap();
        let a_s = a_from_kraus(&kraus_from_dilation_slot(&u_s, &chi, Slot::First).unwrap()).unwrap();
        if condition_number(&a_s) >= 1e8 {
            continue;
        }
        let a_t = a_from_kraus(&kraus_from_dilation_slot(&u_t, &chi, Slot::First).unwrap()).unwrap();
        let mid = intermediate_a(&a_t, &a_s, 1e8).unwrap();
        let rep = cp_check(&choi_from_a(&mid), 1e-8).unwrap();
        checked += 1;
        if !rep.is_cp() {
            violations += 1;
            worst = worst.min(rep.min_eigenvalue);
        }
    }
    let pass = line(
        "5",
        violations == 0,
        &format!(
            "randomized divisibility suite: {violations} of {checked} well-conditioned \
             intermediate maps are NCP (worst Choi eigenvalue {worst:.4}); the universal-CP \
             claim fails — NCP intermediate maps are the standard non-Markovianity witness \
             (see README, Known negative results)"
        ),
    );
    assert!(pass, "see the printed line; this criterion is numerically unattainable as stated");
}

/// Criterion 6: fifty constructed unitaries from random local pre-rotations
/// must be pairwise distinct (holds) and all CP-inducing (fails); a maximally
/// entangled input must be rejected (holds).
#[test]
fn acceptance_06_constructive_family_suite() {
    let conv = resolved_convention();
    let phi = psi_theta(PI / 6.0, conv.reading);
    let s = 0.5;
    let mut unitaries: Vec<ComplexMatrix> = Vec::with_capacity(50);
    let mut ncp = 0usize;
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let mut rng = CounterRng::new(0xC6, i);
        let v_local = haar_from_rng(&mut rng, 2).kron(&haar_from_rng(&mut rng, 2));
        let trial = cp_inducing_trial(&phi, &v_local, s, COND_LIMIT).unwrap();
        if !trial.cp.is_cp() {
            ncp += 1;
            worst = worst.min(trial.cp.min_eigenvalue);
        }
        unitaries.push(trial.unitary);
    }
    let mut min_dist = f64::INFINITY;
    for i in 0..unitaries.len() {
        for j in (i + 1)..unitaries.len() {
            min_dist = min_dist.min(unitaries[i].max_abs_diff(&unitaries[j]));
        }
    }
    let distinct = min_dist > 1e-6;
    let rejects_maximal = matches!(
        cp_inducing_unitary(&bell(), &ComplexMatrix::identity(4), s),
        Err(Error::MaximallyEntangled)
    );
    let pass = line(
        "6",
        distinct && ncp == 0 && rejects_maximal,
        &format!(
            "constructive family: pairwise distinct {} (min distance {min_dist:.3e} > 1e-6), \
             maximally-entangled input rejected {}, CP-inducing {} of 50 (NCP {ncp}, worst Choi \
             eigenvalue {worst:.4}); the universal CP guarantee fails for the constructed family \
             (see README, Known negative results)",
            distinct,
            rejects_maximal,
            50 - ncp
        ),
    );
    assert!(pass, "see the printed line; the CP half of this criterion is numerically unattainable");
}

#[test]
fn acceptance_07_singularity_at_maximal_entanglement() {
    let conv = resolved_convention();
    let near = FRAC_PI_4 - 1e-11;
    let u = controlled(&pauli(Pauli::X), conv.gate.control_slot).unwrap();
    let a_near =
        a_from_kraus(&kraus_from_dilation_slot(&u, &chi_theta(near), conv.gate.env_slot()).unwrap())
            .unwrap();
    let cond = condition_number(&a_near);
    let singular = matches!(
        scenario_cnot_twice(FRAC_PI_4, &conv),
        Err(Error::SingularMap { .. })
    );
    let pass = line(
        "7",
        cond > 1e10 && singular,
        &format!(
            "first-leg condition number {cond:.3e} at |θ−π/4| = 1e-11 (> 1e10 within the 1e-5 \
             window), SingularMap raised at π/4 exactly: {singular}"
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_08_augmentation_table() {
    let conv = resolved_convention();
    let phi = psi_theta(PI / 6.0, conv.reading);
    let root = unitary_root(&pauli(Pauli::X), 2, conv.gate.root_branch).unwrap();
    let u_se = controlled(&root, conv.gate.control_slot).unwrap();
    let mut all = true;
    let mut details = String::new();
    let rows: [(&str, ComplexMatrix, bool, bool); 5] = [
        ("Z(x)X", pauli(Pauli::Z).kron(&pauli(Pauli::X)), true, true),
        (
            "Z(x)SQRT_X",
            pauli(Pauli::Z).kron(&unitary_root(&pauli(Pauli::X), 2, RootBranch::Principal).unwrap()),
            true,
            true,
        ),
        (
            "Z(x)ROOT3_X",
            pauli(Pauli::Z).kron(&unitary_root(&pauli(Pauli::X), 3, RootBranch::Principal).unwrap()),
            true,
            true,
        ),
        (
            "Z(x)ROOT4_X",
            pauli(Pauli::Z).kron(&unitary_root(&pauli(Pauli::X), 4, RootBranch::Principal).unwrap()),
            true,
            true,
        ),
        ("X(x)X", pauli(Pauli::X).kron(&pauli(Pauli::X)), false, false),
    ];
    for (label, u_l, want_local, want_cp) in rows {
        let rep = augmentation_check(&u_se, &u_l, &phi, COND_LIMIT).unwrap();
        let ok = rep.locality_preserved == want_local && (rep.verdict == ScenarioVerdict::Cp) == want_cp;
        all &= ok;
        details.push_str(&format!(
            "{label}: locality={} verdict={}; ",
            rep.locality_preserved,
            rep.verdict.as_str()
        ));
    }
    let pass = line("8", all, &details);
    assert!(pass);
}

#[test]
fn acceptance_09_dimension_ratio() {
    let r22 = dimension_ratio(2, 2).unwrap();
    let r2k = dimension_ratio(2, 1 << 10).unwrap();
    let approx_ok = (r22.approx - 0.5).abs() == 0.0;
    let exact_ok = (r22.exact - 0.4).abs() < 1e-15;
    let limit_ok = (r2k.approx * 4.0 - 1.0).abs() < 1e-3;
    let pass = line(
        "9",
        approx_ok && exact_ok && limit_ok,
        &format!(
            "approx(2,2) = {} (exactly 1/2), exact(2,2) = {} (2/5 from the group dimension count), \
             |4·approx(2,2^10) − 1| = {:.3e} (< 1e-3)",
            r22.approx,
            r22.exact,
            (r2k.approx * 4.0 - 1.0).abs()
        ),
    );
    assert!(pass);
}

/// Determinism half of criterion 10: the full reproduction run, executed
/// twice through the installed binary with the same seed, must emit
/// byte-identical files regardless of thread count.
#[test]
fn acceptance_10_determinism_byte_identical() {
    let exe = env!("CARGO_BIN_EXE_redmap");
    let tmp = std::env::temp_dir().join(format!("redmap-acceptance-{}", std::process::id()));
    let dir_a = tmp.join("run_a");
    let dir_b = tmp.join("run_b");
    for (dir, threads) in [(&dir_a, "1"), (&dir_b, "4")] {
        let out = Command::new(exe)
            .args(["reproduce-paper", "--seed", "7", "--out"])
            .arg(dir)
            .env("REDMAP_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "reproduce-paper failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let mut names: Vec<String> = std::fs::read_dir(&dir_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    let mut identical = true;
    for name in &names {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        identical &= a == b;
    }
    let pass = line(
        "10 (determinism)",
        identical,
        &format!(
            "reproduction run twice with seed 7 under 1 and 4 threads: {} files byte-identical",
            names.len()
        ),
    );
    std::fs::remove_dir_all(&tmp).ok();
    assert!(pass);
}

/// Family half of criterion 10: the constructed-family Monte Carlo fraction
/// is asserted to be exactly 1.0 at n = 200. The measured fraction is 0 —
/// the same refuted universal-CP claim as criteria 5 and 6.
#[test]
fn acceptance_10_mc_theorem_family_fraction() {
    let conv = resolved_convention();
    let phi = psi_theta(PI / 6.0, conv.reading);
    let rep = mc_cp_fraction(&phi, Ensemble::TheoremFamily, 200, 7).unwrap();
    let pass = line(
        "10 (family fraction)",
        rep.fraction == 1.0,
        &format!(
            "constructed-family CP fraction at n=200, seed 7: {} (cp={}, ncp={}, singular={}); \
             the asserted value 1.0 encodes the refuted universal-CP claim (see README, Known \
             negative results)",
            rep.fraction, rep.cp, rep.ncp, rep.singular
        ),
    );
    assert!(pass, "see the printed line; this half of the criterion is numerically unattainable");
}
