//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! with status 1 if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::{c, pi_params, random_params, rng, to_na, CMat, Fock};
use nalgebra::DMatrix;
use nhfloquet::bloch::{check_pt_symmetry, quasienergy, raw_cos_quasienergy, Quasimomentum};
use nhfloquet::cli::{execute, parse_config, Cell, Report};
use nhfloquet::entanglement::{
    ee_vs_subsystem, entanglement_entropy, entanglement_scaling, fit_subsystem_profile,
    frame_entropy, EntanglementPhase, EvolutionSettings, RunDiagnostics, SubsystemSpec,
    DEFAULT_SIZES,
};
use nhfloquet::lattice::{
    correlation, evolve_frames, initial_isometry, FloquetLattice, LatticeSpec,
};
use nhfloquet::numerics::BlochMatrix;
use nhfloquet::spectral::{real_ratio, KGrid, DEFAULT_REALITY_TOL};
use num_complex::Complex64;
use rand::Rng;

type Outcome = Result<String, String>;

/// Invariant residuals collected from every run below, checked by criterion 10.
#[derive(Default)]
struct Ledger {
    diagnostics: Vec<(String, RunDiagnostics)>,
    exact_projector_defect: f64,
    exact_checks: usize,
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dense_blocks(block: &BlochMatrix, l: usize, pairs: impl Fn(usize) -> (usize, usize)) -> CMat {
    let n = 2 * l;
    let mut m = CMat::zeros(n, n);
    for cell in 0..l {
        let (p, q) = pairs(cell);
        m[(p, p)] = block.get(0, 0);
        m[(p, q)] = block.get(0, 1);
        m[(q, p)] = block.get(1, 0);
        m[(q, q)] = block.get(1, 1);
    }
    m
}

fn adjugate(b: &BlochMatrix) -> BlochMatrix {
    BlochMatrix::new(b.get(1, 1), -b.get(0, 1), -b.get(1, 0), b.get(0, 0))
}

fn criterion_1() -> Outcome {
    // eig(U) against e^{-/+iE(k_m)} and eig(U^-1) against the reciprocals, each
    // measured relative to max(1, |expected|): large eigenvalues are checked on
    // U, small ones on the inverse.
    let mut r = rng(1001);
    let mut worst: f64 = 0.0;
    for l in [4usize, 8, 12, 16] {
        for _ in 0..20 {
            let p = random_params(&mut r, 3.0, 2.0);
            let f = FloquetLattice::new(&p, l).unwrap();
            let n = 2 * l;
            let intra = |c: usize| (2 * c, 2 * c + 1);
            let inter = |c: usize| (2 * c + 1, (2 * c + 2) % n);
            let e1 = dense_blocks(f.intracell_block(), l, intra);
            let e2 = dense_blocks(f.intercell_block(), l, inter);
            let e1_inv = dense_blocks(&adjugate(f.intracell_block()), l, intra);
            let e2_inv = dense_blocks(&adjugate(f.intercell_block()), l, inter);
            let u = &e2 * &e1;
            let u_inv = &e1_inv * &e2_inv;
            let mut expected = Vec::new();
            for m in 0..l {
                let q = quasienergy(&p, Quasimomentum::new(2.0 * PI * m as f64 / l as f64));
                expected.push((c(0.0, -1.0) * q.e_plus).exp());
                expected.push((c(0.0, -1.0) * q.e_minus).exp());
            }
            let reciprocal: Vec<Complex64> = expected.iter().map(|z| z.inv()).collect();
            worst = worst
                .max(common::multiset_distance(&common::eigenvalues(&u), &expected))
                .max(common::multiset_distance(&common::eigenvalues(&u_inv), &reciprocal));
        }
    }
    check(worst < 1e-9, format!("max relative eigenvalue error {worst:.2e} (tol 1e-9) over 80 operators"))
}

fn criterion_2() -> Outcome {
    let mut r = rng(1002);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = random_params(&mut r, 3.0, 2.0);
        let k = Quasimomentum::new(r.gen_range(-PI..PI));
        worst = worst.max(raw_cos_quasienergy(&p, k).im.abs());
    }
    check(worst < 1e-10, format!("max |Im cos E| {worst:.2e} over 1e4 samples (tol 1e-10)"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(1003);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_params(&mut r, 3.0, 2.0);
        let k = Quasimomentum::new(r.gen_range(-PI..PI));
        worst = worst.max(check_pt_symmetry(&p, k));
    }
    check(worst < 1e-10, format!("max PT violation {worst:.2e} over 1e3 samples (tol 1e-10)"))
}

fn criterion_4(ledger: &mut Ledger) -> Outcome {
    let mi = c(0.0, -1.0);
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for l in [2usize, 3] {
        let fock = Fock { n_modes: 2 * l };
        for (j1, j2, g) in [(1.0 / 3.0, 0.2, 1.0 / 7.0), (0.85, 0.1, 0.5), (2.2, 2.0 / 3.0, 0.4)] {
            let p = pi_params(j1, j2, g);
            let (h1, h2) = common::real_space_hamiltonians(&p, l);
            let step = common::expm(&(fock.quadratic(&h2) * mi)) * common::expm(&(fock.quadratic(&h1) * mi));
            let b_sites: Vec<usize> = (0..l).map(|n| 2 * n + 1).collect();
            let mut psi = fock.product_state(&b_sites);
            let u = FloquetLattice::new(&p, l).unwrap();
            let lattice = LatticeSpec::half_filled(l).unwrap();
            evolve_frames(&u, initial_isometry(&lattice), 5, |period, frame| {
                if period > 0 {
                    psi = common::normalized(&step * &psi);
                }
                record_exact_invariants(ledger, frame);
                for sub in 1..l {
                    let ours = frame_entropy(frame, &SubsystemSpec::leading(sub))?;
                    let oracle = fock.entropy_of_leading_modes(&psi, 2 * sub);
                    worst = worst.max((ours - oracle).abs());
                    compared += 1;
                }
                Ok(())
            })
            .map_err(|e| e.to_string())?;
        }
    }
    check(worst < 1e-9, format!("max |S - S_Fock| {worst:.2e} over {compared} comparisons (tol 1e-9)"))
}

fn record_exact_invariants(ledger: &mut Ledger, frame: &nhfloquet::lattice::IsometryFrame) {
    let c = correlation(frame);
    ledger.exact_projector_defect = ledger.exact_projector_defect.max(c.projector_defect());
    ledger.exact_checks += 1;
    let mut d = RunDiagnostics {
        snapshots: 1,
        isometry_defect: frame.isometry_defect(),
        trace_error: (c.trace() - frame.n_fermions() as f64).abs(),
        projector_defect_bound: c.projector_defect(),
        complementarity_gap: 0.0,
        min_entropy: f64::INFINITY,
    };
    let l = frame.n_sites() / 2;
    for sub in 1..l {
        let a = entanglement_entropy(&c, &SubsystemSpec::leading(sub)).unwrap();
        let b = entanglement_entropy(&c, &SubsystemSpec::new(sub + 1, l - sub)).unwrap();
        d.complementarity_gap = d.complementarity_gap.max((a - b).abs());
        d.min_entropy = d.min_entropy.min(a).min(b);
    }
    ledger.diagnostics.push(("small runs".into(), d));
}

fn criterion_5(ledger: &mut Ledger) -> Outcome {
    let p = pi_params(0.85, 0.1, 0.0);
    let l = 8;
    let u_dense: CMat = common::dense_floquet(&p, l);
    let lattice = LatticeSpec::half_filled(l).unwrap();
    let f0 = to_na(initial_isometry(&lattice).matrix());
    let mut oracle_frame: DMatrix<Complex64> = f0;
    let u = FloquetLattice::new(&p, l).unwrap();
    let mut worst: f64 = 0.0;
    evolve_frames(&u, initial_isometry(&lattice), 50, |period, frame| {
        if period > 0 {
            oracle_frame = &u_dense * &oracle_frame;
        }
        record_exact_invariants(ledger, frame);
        let oracle_c = (&oracle_frame * oracle_frame.adjoint()).conjugate();
        worst = worst.max(common::max_abs_diff(&to_na(correlation(frame).matrix()), &oracle_c));
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    check(worst < 1e-8, format!("max per-entry correlation error {worst:.2e} over 50 periods (tol 1e-8)"))
}

fn criterion_6() -> Outcome {
    let grid = KGrid::default();
    let rs: Vec<f64> = (0..300)
        .map(|i| {
            let j1 = 3.0 * PI * (i as f64 + 0.5) / 300.0;
            real_ratio(&pi_params(j1 / PI, 0.1, 0.5), &grid, DEFAULT_REALITY_TOL)
        })
        .collect();
    let mut plateaus = 0;
    let mut run = 0;
    for &r in rs.iter().chain(std::iter::once(&0.0)) {
        if r == 1.0 {
            run += 1;
        } else {
            if run >= 2 {
                plateaus += 1;
            }
            run = 0;
        }
    }
    check(plateaus >= 2, format!("{plateaus} plateaus with R = 1 separated by R < 1 (need >= 2)"))
}

fn criterion_7() -> Outcome {
    let grid = KGrid::default();
    let r = |g: f64| real_ratio(&pi_params(2.2, 2.0 / 3.0, g), &grid, DEFAULT_REALITY_TOL);
    let (a, b, cc) = (r(0.4), r(0.9), r(1.3));
    check(
        a > 0.0 && b == 0.0 && cc > 0.0,
        format!("R(0.4pi) = {a:.4}, R(0.9pi) = {b:.4}, R(1.3pi) = {cc:.4}"),
    )
}

fn scaling_config(gamma: &str, workers: &str) -> nhfloquet::cli::RunConfig {
    parse_config([
        "nhfloquet", "ee-scaling", "--j1", "2.2pi", "--j2", "0.6666666666666666pi", "--gamma", gamma,
        "--sizes", "40,80,120,160", "--periods", "1000", "--window-start", "800", "--window-end", "1000",
        "--workers", workers,
    ])
    .expect("valid configuration")
}

fn fit_of(report: &Report) -> (f64, String) {
    let row = &report.tables[1].rows[0];
    let g = match row[0] {
        Cell::Float(g) => g,
        _ => f64::NAN,
    };
    let label = match &row[3] {
        Cell::Text(s) => s.clone(),
        _ => String::new(),
    };
    (g, label)
}

fn criterion_8(ledger: &mut Ledger, reports: &mut Vec<Report>) -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (gamma, want) in [("0.4pi", "VOLUME_LAW"), ("0.9pi", "AREA_LAW"), ("1.3pi", "VOLUME_LAW")] {
        let report = execute(&scaling_config(gamma, "1")).map_err(|e| e.to_string())?;
        let (g, label) = fit_of(&report);
        let extra = match gamma {
            "0.4pi" => g > 0.05,
            "0.9pi" => g.abs() < 0.005,
            _ => true,
        };
        ok &= label == want && extra;
        details.push(format!("gamma={gamma}: g={g:.4} {label}"));
        ledger.diagnostics.push((format!("ee-scaling gamma={gamma}"), report.diagnostics.unwrap()));
        reports.push(report);
    }
    check(ok, details.join("; "))
}

fn criterion_9(ledger: &mut Ledger) -> Outcome {
    let settings = EvolutionSettings::default();
    let j1s = [0.3, 0.85, 1.2, 1.55, 2.0, 2.45];
    let mut results = Vec::new();
    for &j1 in &j1s {
        let out = entanglement_scaling(&pi_params(j1, 0.1, 0.5), &DEFAULT_SIZES, &settings)
            .map_err(|e| e.to_string())?;
        ledger.diagnostics.push((format!("ee-scaling J1={j1}pi"), out.diagnostics()));
        results.push((j1, out.fit.g, out.phase));
    }
    let flips = results.windows(2).filter(|w| w[0].2 != w[1].2).count();
    let (_, g_max_j1) = results
        .iter()
        .map(|&(j1, g, _)| (g, j1))
        .fold((f64::NEG_INFINITY, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
    let at_085 = results.iter().find(|r| r.0 == 0.85).unwrap();
    let ok = flips >= 2 && at_085.2 == EntanglementPhase::VolumeLaw && g_max_j1 == 0.85;
    let list: Vec<String> = results.iter().map(|(j1, g, ph)| format!("{j1}pi:{g:.4}:{ph}")).collect();
    check(ok, format!("{flips} label flips, largest g at J1={g_max_j1}pi [{}]", list.join(", ")))
}

fn criterion_10(ledger: &Ledger) -> Outcome {
    let mut merged = RunDiagnostics { min_entropy: f64::INFINITY, ..Default::default() };
    for (_, d) in &ledger.diagnostics {
        merged = merged.merge(d);
    }
    let ok = merged.isometry_defect < 1e-10
        && merged.trace_error < 1e-8
        && merged.projector_defect_bound < 1e-8
        && ledger.exact_projector_defect < 1e-8
        && merged.complementarity_gap < 1e-8
        && merged.min_entropy >= -1e-10;
    check(
        ok,
        format!(
            "{} snapshots in {} runs: isometry {:.1e} (1e-10), trace {:.1e} (1e-8), projector {:.1e} (1e-8), complementarity {:.1e} (1e-8), min S {:.1e}",
            merged.snapshots,
            ledger.diagnostics.len(),
            merged.isometry_defect,
            merged.trace_error,
            merged.projector_defect_bound.max(ledger.exact_projector_defect),
            merged.complementarity_gap,
            merged.min_entropy
        ),
    )
}

fn criterion_11(ledger: &mut Ledger) -> Outcome {
    let l_cells = 80;
    let profile = ee_vs_subsystem(&pi_params(2.2, 2.0 / 3.0, 0.4), l_cells, &EvolutionSettings::default())
        .map_err(|e| e.to_string())?;
    ledger.diagnostics.push(("ee-profile L=80".into(), profile.diagnostics));
    let fit = fit_subsystem_profile(&profile.points, l_cells).map_err(|e| e.to_string())?;
    let interior: Vec<f64> = profile
        .points
        .iter()
        .filter(|&&(l, _)| l >= 2 && l + 2 <= l_cells)
        .map(|p| p.1)
        .collect();
    let mean = interior.iter().sum::<f64>() / interior.len() as f64;
    let per_point = fit.rss / fit.n_points as f64;
    let rms = per_point.sqrt();
    check(
        per_point < 0.01 * mean,
        format!(
            "rss/n = {per_point:.3e} vs 1% of mean S = {:.3e} (rms {rms:.3e}); g0={:.3} g1={:.3} g2={:.3}",
            0.01 * mean,
            fit.g0,
            fit.g1,
            fit.g2
        ),
    )
}

fn criterion_12(reports: &[Report]) -> Outcome {
    if reports.len() != 3 {
        return Err("criterion 8 runs missing".into());
    }
    let mut identical = 0;
    for (gamma, single) in ["0.4pi", "0.9pi", "1.3pi"].iter().zip(reports) {
        let parallel = execute(&scaling_config(gamma, "4")).map_err(|e| e.to_string())?;
        if parallel.body() == single.body() {
            identical += 1;
        }
    }
    check(identical == 3, format!("{identical}/3 CSV bodies byte-identical between 1 and 4 workers"))
}

fn main() {
    let mut ledger = Ledger::default();
    let mut reports = Vec::new();
    let mut failures = 0;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{id:>2}] {name}: {detail} ({secs:.1} s)");
    };
    report(1, "spectral equivalence", &mut criterion_1);
    report(2, "cos E reality", &mut criterion_2);
    report(3, "PT relation", &mut criterion_3);
    report(4, "small-instance EE oracle", &mut || criterion_4(&mut ledger));
    report(5, "Hermitian-limit regression", &mut || criterion_5(&mut ledger));
    report(6, "alternated PT transitions", &mut criterion_6);
    report(7, "reentrant PT behaviour", &mut criterion_7);
    report(8, "entanglement-spectrum correspondence", &mut || criterion_8(&mut ledger, &mut reports));
    report(9, "alternated entanglement transitions", &mut || criterion_9(&mut ledger));
    report(11, "profile-fit quality", &mut || criterion_11(&mut ledger));
    report(10, "invariant suite", &mut || criterion_10(&ledger));
    report(12, "determinism", &mut || criterion_12(&reports));
    println!("{} criteria failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
