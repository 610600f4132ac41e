//! Acceptance criteria, one line each. Tolerances and runtime budgets are
//! pinned here rather than read from `Tolerances::default()`.

use std::path::Path;

use clap::Parser;
use gasket_fgf_cli::{main_with, Cli};
use std::time::{Duration, Instant};

use gasket_fgf::constants::CONSTANTS;
use gasket_fgf::fields::{empirical_covariance, sample_ensemble, TestFunction};
use gasket_fgf::gasket::{build_graph, edge_count, interior_count, vertex_count, Nesting};
use gasket_fgf::lab::{self, Level, LevelSweep, Tolerances};
use gasket_fgf::rng::normals;
use gasket_fgf::spectral::spectrum_at;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn criterion(id: u32, name: &str, budget_s: u64, body: impl FnOnce() -> Verdict) -> bool {
    let t = Instant::now();
    let v = body();
    let elapsed = t.elapsed();
    let in_time = elapsed <= Duration::from_secs(budget_s);
    let pass = v.pass && in_time;
    println!(
        "[{}] {id:>2} {name}: {} ({:.2} s, budget {budget_s} s{})",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64(),
        if in_time { "" } else { ", over budget" }
    );
    pass
}

fn combinatorics() -> Verdict {
    let mut bad = Vec::new();
    let mut prev = None;
    for m in 0..=7 {
        let g = build_graph(m).unwrap();
        let p = 3usize.pow(m as u32);
        if g.vertex_count() != 3 * (p + 1) / 2 || g.vertex_count() != vertex_count(m) {
            bad.push(format!("vertices m={m}"));
        }
        if g.edge_count() != 3 * p || g.edge_count() != edge_count(m) {
            bad.push(format!("edges m={m}"));
        }
        if g.interior_count() != (3 * p - 3) / 2 || g.interior_count() != interior_count(m) {
            bad.push(format!("interior m={m}"));
        }
        if (0..g.vertex_count()).any(|v| g.degree(v) != if g.is_boundary(v) { 2 } else { 4 }) {
            bad.push(format!("degrees m={m}"));
        }
        if let Some(c) = &prev {
            let nest = Nesting::new(c, &g).unwrap();
            if nest.map().iter().enumerate().any(|(v, &w)| c.points()[v] != g.points()[w]) {
                bad.push(format!("nesting m={}", m - 1));
            }
        }
        prev = Some(g);
    }
    verdict(bad.is_empty(), if bad.is_empty() { "m = 0..7 exact".into() } else { bad.join(", ") })
}

fn level_one_oracle() -> Verdict {
    let (g, spec) = spectrum_at(1).unwrap();
    let ev = spec.eigenvalues();
    let ev_err = ev.iter().zip([10.0, 25.0, 25.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let phi = spec.eigenvector_interior(0);
    let mean = phi.iter().sum::<f64>() / 3.0;
    let flat = phi.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    let norm = phi.iter().map(|x| x * x).sum::<f64>() / g.a_m();
    let pass = ev_err <= 1e-9 && flat <= 1e-10 && (norm - 1.0).abs() <= 1e-10;
    verdict(pass, format!("max |λ - oracle| = {ev_err:.1e}, ground spread {flat:.1e}, |‖Φ₁‖² - 1| = {:.1e}", (norm - 1.0).abs()))
}

fn kernel_identities() -> Verdict {
    let mut white = 0.0f64;
    for m in 1..=4 {
        let (g, spec) = spectrum_at(m).unwrap();
        let k = spec.riesz_kernel(0.0).unwrap();
        for i in 0..k.dim() {
            for j in 0..k.dim() {
                let target = if i == j { g.a_m() } else { 0.0 };
                white = white.max((k.get(i, j) - target).abs());
            }
        }
    }
    let mut chain = 0.0f64;
    for m in 1..=5 {
        let (g, spec) = spectrum_at(m).unwrap();
        for trial in 0..20u64 {
            let s = 0.05 * trial as f64;
            let f = g.extend_by_zero(&normals(trial, 500 + m as u64, g.interior_count())).unwrap();
            let h = g.extend_by_zero(&normals(trial + 1000, 500 + m as u64, g.interior_count())).unwrap();
            let a = g.a_m();
            // (1/a²) Σ f G_{2s} h  =  (1/a) Σ (-Δ)^{-s} f (-Δ)^{-s} h  =  (1/a) Σ f (-Δ)^{-2s} h
            let via_kernel = gasket_fgf::fields::covariance_via_kernel(&spec.riesz_kernel(2.0 * s).unwrap(), &f, &h, a);
            let fs = spec.apply_fractional(s, &f).unwrap().values;
            let hs = spec.apply_fractional(s, &h).unwrap().values;
            let via_half = fs.iter().zip(&hs).map(|(x, y)| x * y).sum::<f64>() / a;
            let h2 = spec.apply_fractional(2.0 * s, &h).unwrap().values;
            let via_full = f.iter().zip(&h2).map(|(x, y)| x * y).sum::<f64>() / a;
            let scale = 1.0 + via_full.abs();
            chain = chain.max((via_kernel - via_full).abs() / scale).max((via_half - via_full).abs() / scale);
        }
    }
    verdict(white <= 1e-8 && chain <= 1e-9, format!("max |G₀ - a_m I| = {white:.1e} (m ≤ 4), chain defect {chain:.1e} (m ≤ 5, 20 f each)"))
}

fn covariance_law() -> Verdict {
    let (_, spec) = spectrum_at(2).unwrap();
    let n = 100_000;
    let mut worst_cov = 0.0f64;
    let mut worst_var = 0.0f64;
    for (k, s) in [0.0, CONSTANTS.critical_s, 0.5, 1.0].into_iter().enumerate() {
        let seed = 7_000 + k as u64 * 1_000_003;
        worst_cov = worst_cov.max(empirical_covariance(&spec, s, n, seed).unwrap().max_se_deviation);
        // pair(X, Φ_i) = (1/a) Σ_p Φ_i(p) X(p), through the sampled values
        let ens = sample_ensemble(&spec, s, n, seed);
        let coeffs = spec.eigenvector_matrix().transpose() * &ens;
        for (i, l) in spec.eigenvalues().iter().enumerate() {
            let var_true = l.powf(-2.0 * s);
            let var_hat = (0..n).map(|c| (coeffs[(i, c)] / spec.a_m()).powi(2)).sum::<f64>() / n as f64;
            worst_var = worst_var.max((var_hat - var_true).abs() / (var_true * (2.0 / n as f64).sqrt()));
        }
    }
    verdict(
        worst_cov < 4.0 && worst_var < 4.0,
        format!("max entrywise deviation {worst_cov:.2} SE, max pairing-variance deviation {worst_var:.2} SE (limit 4)"),
    )
}

fn weyl(l6: &Level) -> Verdict {
    let w = lab::weyl_check(&l6.spectrum, &Tolerances::default()).unwrap();
    let slope = w.fit.exponent;
    let spread = w.max_ratio / w.min_ratio;
    let monotone = w.counts.windows(2).all(|p| p[1] >= p[0]);
    let pass = (slope - 0.6826).abs() <= 0.05 && spread <= 3.0 && monotone;
    verdict(
        pass,
        format!(
            "slope {slope:.4} (0.6826 ± 0.05), max/min {spread:.3} (≤ 3) on t ∈ [{:.0}, {:.0}]",
            w.window.0, w.window.1
        ),
    )
}

fn riesz(l5: &Level, l6: &Level) -> Verdict {
    let tol = Tolerances::default();
    let sub = lab::riesz_regime_fit(l6, 0.3, &tol).unwrap();
    let log = lab::riesz_regime_fit(l6, CONSTANTS.spectral_ratio, &tol).unwrap();
    let sweep = LevelSweep::from_levels(vec![l5.clone(), l6.clone()]).unwrap();
    let bounded = lab::riesz_sup_stability(&sweep, 1.0, &tol).unwrap();
    let rel = (bounded.observed[1] / bounded.observed[0] - 1.0).abs();
    let pass = (sub.exponent - -0.888).abs() <= 0.15 && log.r2 >= 0.9 && rel <= 0.2;
    verdict(
        pass,
        format!(
            "s=0.3 exponent {:.3} (-0.888 ± 0.15); s=d_h/d_w R² {:.4} (≥ 0.9); s=1 sup {:.4} → {:.4}, change {:.1}% (≤ 20%)",
            sub.exponent,
            log.r2,
            bounded.observed[0],
            bounded.observed[1],
            100.0 * rel
        ),
    )
}

fn holder(l6: &Level) -> Verdict {
    let tol = Tolerances::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for (s, target) in [(0.5, 0.3685), (1.0, 0.737), (2.0, 0.737)] {
        let r = lab::holder_exponent(l6, s, 200, 31_415, &tol).unwrap();
        pass &= (r.exponent - target).abs() <= 0.1;
        parts.push(format!("s={s}: H {:.3} ({target} ± 0.1)", r.exponent));
    }
    verdict(pass, parts.join("; "))
}

fn log_correlated(l6: &Level) -> Verdict {
    let fit = lab::log_correlation_fit(l6, 0, 0, &Tolerances::default()).unwrap();
    let sweep = LevelSweep::new(3, 5).unwrap();
    let mut levels = sweep.levels;
    levels.push(l6.clone());
    let diag = lab::log_diagonal_growth(&LevelSweep::from_levels(levels).unwrap()).unwrap();
    let increasing = diag.diffs.iter().all(|&d| d > 0.0);
    let shown: Vec<String> = diag.observed.iter().map(|v| format!("{v:.3}")).collect();
    verdict(
        fit.r2 >= 0.9 && increasing,
        format!("exact-kernel R² {:.4} (≥ 0.9), slope {:.3}; max diagonal m=3..6: {}", fit.r2, fit.exponent, shown.join(", ")),
    )
}

fn convergence_lab(sweep: &LevelSweep) -> Verdict {
    let f = TestFunction::ground_state(8).unwrap();
    let tol = Tolerances::default();
    let reports = vec![
        ("integral", lab::integral_convergence(&f, sweep).unwrap()),
        ("semigroup t=0.01", lab::semigroup_convergence(&f, 0.01, sweep).unwrap()),
        ("quadform s=0", lab::quadratic_form_convergence(&f, 0.0, sweep).unwrap()),
        ("quadform s=0.5", lab::quadratic_form_convergence(&f, 0.5, sweep).unwrap()),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, r) in &reports {
        // d_m = v_m - v_{m-1} for m = 3..6; need |d_{m+1}| < |d_m| for m = 3, 4, 5
        let d: Vec<f64> = r.diffs.iter().map(|x| x.abs()).collect();
        let ok = r.levels == vec![2, 3, 4, 5, 6] && d.windows(2).all(|w| w[1] < w[0]);
        pass &= ok;
        parts.push(format!("{name} |d_6|/|d_5| = {:.3}", d[3] / d[2]));
    }
    for s in [0.0, 0.5] {
        let r = lab::characteristic_convergence(&f, s, sweep, &tol).unwrap();
        let rel = r.diffs[3].abs() / r.observed[3];
        pass &= rel < 0.01 && r.observed.iter().all(|&v| v > 0.0 && v <= 1.0);
        parts.push(format!("char s={s} change {rel:.1e}"));
    }
    verdict(pass, parts.join("; "))
}

fn voronoi() -> Verdict {
    let tol = Tolerances::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, f) in [("Φ₁", TestFunction::ground_state(9).unwrap()), ("torsion", TestFunction::torsion(9).unwrap())] {
        let r = lab::voronoi_lifting_rate(&f, &[2, 3, 4, 5], 4, &tol).unwrap();
        let rate = r.fit.unwrap().exponent;
        let decreasing = r.diffs.iter().all(|&d| d < 0.0);
        pass &= decreasing && (0.5..=1.0).contains(&rate);
        let sup_rate = r.checks.iter().find(|c| c.name.starts_with("sup gap")).unwrap().value;
        parts.push(format!("{name}: L² rate {rate:.3} per level (need [0.5, 1.0]), sup-norm rate {sup_rate:.3}"));
    }
    verdict(pass, parts.join("; "))
}

fn supnorm(l5: &Level, l6: &Level) -> Verdict {
    let sweep = LevelSweep::from_levels(vec![l5.clone(), l6.clone()]).unwrap();
    let r = lab::eigenfunction_supnorm_check(&sweep, &Tolerances::default()).unwrap();
    let ratios5 = lab::supnorm_ratios(&l5.spectrum);
    let bounded = ratios5.iter().all(|x| x.is_finite() && *x > 0.0);
    let factor = (r.observed[1] / r.observed[0]).max(r.observed[0] / r.observed[1]);
    verdict(
        bounded && factor <= 1.5,
        format!("max ratio m=5 {:.4}, m=6 {:.4}, factor {factor:.4} (≤ 1.5)", r.observed[0], r.observed[1]),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn run(args: &[&str], out: &Path) -> i32 {
    let mut argv = vec!["gasket-fgf", "--out", out.to_str().unwrap()];
    argv.extend_from_slice(args);
    main_with(Cli::try_parse_from(argv).unwrap())
}

fn determinism() -> Verdict {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 5] = [
        &["graph", "--m", "4"],
        &["spectrum", "--m", "4", "--eigenvectors"],
        &["sample", "--m", "4", "--s", "0.7", "--seed", "5", "--n", "4"],
        &["lab", "holder", "--m", "6", "--s", "2.0", "--n", "200"],
        &["lab", "quadform", "--s", "0.5", "--levels", "2..5"],
    ];
    let mut errors = 0;
    for args in runs {
        errors += (run(args, first.path()) == 1) as usize;
    }
    let mut mismatched = Vec::new();
    let dirs: Vec<_> = std::fs::read_dir(first.path()).unwrap().map(|e| e.unwrap().path()).collect();
    for dir in &dirs {
        let manifest = dir.join("manifest.json");
        errors += (run(&["replay", manifest.to_str().unwrap()], second.path()) == 1) as usize;
        let name = dir.file_name().unwrap();
        if !second.path().join(name).is_dir() || snapshot(dir) != snapshot(&second.path().join(name)) {
            mismatched.push(name.to_string_lossy().into_owned());
        }
    }
    let pass = errors == 0 && dirs.len() == runs.len() && mismatched.is_empty();
    verdict(
        pass,
        if mismatched.is_empty() && errors == 0 {
            format!("{} runs replayed from their manifests, all files byte-identical", dirs.len())
        } else {
            format!("{errors} runs errored; differing outputs: {}", mismatched.join(", "))
        },
    )
}

fn main() {
    println!("acceptance criteria");
    let mut results = Vec::new();
    results.push(criterion(1, "combinatorics", 5, combinatorics));
    results.push(criterion(2, "level-1 spectral oracle", 1, level_one_oracle));
    results.push(criterion(3, "kernel identities", 30, kernel_identities));
    results.push(criterion(4, "covariance law", 120, covariance_law));

    let t = Instant::now();
    let l6 = Level::new(6).unwrap();
    let l6_time = t.elapsed();
    results.push(criterion(5, "Weyl counting", 60, || {
        let mut v = weyl(&l6);
        v.detail.push_str(&format!("; level-6 eigensolve {:.2} s", l6_time.as_secs_f64()));
        v
    }));

    let sweep = LevelSweep::new(2, 5).unwrap();
    let l5 = sweep.get(5).unwrap().clone();
    results.push(criterion(6, "Riesz kernel regimes", 120, || riesz(&l5, &l6)));
    results.push(criterion(7, "Hölder exponents", 300, || holder(&l6)));
    results.push(criterion(8, "log-correlated field", 60, || log_correlated(&l6)));

    let mut levels = sweep.levels.clone();
    levels.push(l6.clone());
    let sweep = LevelSweep::from_levels(levels).unwrap();
    results.push(criterion(9, "convergence lab", 180, || convergence_lab(&sweep)));
    results.push(criterion(10, "Voronoi lifting rate", 120, voronoi));
    results.push(criterion(11, "eigenfunction sup-norm bound", 60, || supnorm(&l5, &l6)));
    results.push(criterion(12, "determinism", 60, determinism));

    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
