//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! The default is a reduced-precision run sized for a single core. `SFFCC_ACCEPTANCE_FULL=1`
//! switches to 10⁴ trials per point on L ∈ {4, 6, 8} with the full tolerances.
//! `SFFCC_ACCEPTANCE_STRICT=1` makes any FAIL line a nonzero exit, and
//! `SFFCC_ACCEPTANCE_ONLY=4,5` restricts the run to the listed criteria.

mod common;

use std::time::Instant;

use common::stats::{chi2_test, within_sigma};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sffcc::fusion::{
    combined_rus_probs, rep_event_probs, simulate_rus, EncodedEvent, EncodedFusionOutcome, EncodedFusionSampler, FusionChannelParams, Strategy, TieRule,
};
use sffcc::graph_rewrite::{verify_rule_corpus, RuleMutation};
use sffcc::lattice::{build_sffcc_network, check_structure, derive_syndrome_graph, verify_small_instance};
use sffcc::montecarlo::*;

struct Budget {
    full: bool,
    sizes: Vec<usize>,
    coarse_trials: usize,
    fine_trials: usize,
    fine_points: usize,
    workers: usize,
}

impl Budget {
    fn from_env() -> Self {
        let full = std::env::var("SFFCC_ACCEPTANCE_FULL").is_ok_and(|v| v != "0");
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        if full {
            Budget { full, sizes: vec![4, 6, 8], coarse_trials: 1000, fine_trials: 10_000, fine_points: 7, workers }
        } else {
            Budget { full, sizes: vec![6, 8], coarse_trials: 80, fine_trials: 250, fine_points: 5, workers }
        }
    }
}

struct Lattices(Vec<LatticeContext>);

impl Lattices {
    fn get(&self, l: usize) -> &LatticeContext {
        self.0.iter().find(|c| c.l() == l).expect("lattice built")
    }
}

#[derive(Clone, Debug)]
struct Located {
    x: Option<f64>,
    sigma: f64,
    note: String,
}

/// Coarse scan for the bracket, then a refined grid around the coarse crossing. The coarse
/// scan stops once every size fails in at least 90% of trials at two consecutive points.
/// Refined windows move towards the crossing until one brackets it; all refined points are
/// pooled for the final estimate.
fn locate(lat: &Lattices, b: &Budget, sizes: &[usize], noise: &NoiseSpec, coarse: &[f64], seed: u64, trials: (usize, usize)) -> Located {
    let sweep = |trials: usize| Sweep { noise, sizes, trials, seed, workers: b.workers };
    let empty = || -> Vec<SizeCurve> { sizes.iter().map(|&l| SizeCurve { l, points: Vec::new() }).collect() };
    let mut curves = empty();
    let mut saturated = 0;
    for &x in coarse {
        for c in curves.iter_mut() {
            c.points.extend(sweep(trials.0).curve(lat.get(c.l), &[x]).expect("valid sweep").points);
        }
        saturated = if curves.iter().all(|c| c.points.last().is_some_and(|p| p.1.rate >= 0.9)) { saturated + 1 } else { 0 };
        if saturated == 2 {
            break;
        }
    }
    let coarse = &coarse[..curves[0].points.len()];
    let x0 = match find_threshold(&curves, BOOTSTRAP_REPLICATES, seed) {
        Ok(t) => t.x_star,
        Err(nc) => {
            // Not fault tolerant even at the lowest grid value: record the threshold as zero.
            let (small, large) = (&curves[curves.len() - 2], &curves[curves.len() - 1]);
            let worse_at_start = large.points[0].1.rate >= small.points[0].1.rate && large.points[0].1.rate > 0.5;
            return Located { x: worse_at_start.then_some(0.0), sigma: 0.0, note: nc.advice };
        }
    };
    let i = coarse.iter().rposition(|&x| x <= x0).unwrap_or(0);
    let j = (i + 1).min(coarse.len() - 1);
    let mut half = 0.5 * (coarse[j] - coarse[i]).max(1e-9);
    let mut centre = x0;
    let mut tried = Vec::new();
    let mut pool = empty();
    for _ in 0..4 {
        let window: Vec<f64> = (0..b.fine_points)
            .map(|k| centre - half + 2.0 * half * k as f64 / (b.fine_points - 1) as f64)
            .filter(|&x| x > 0.0)
            .map(|x| (x * 1e7).round() / 1e7)
            .collect();
        tried.push(format!("[{:.5}, {:.5}]", window[0], window[window.len() - 1]));
        let fresh: Vec<f64> = window.iter().copied().filter(|x| !pool[0].points.iter().any(|p| p.0 == *x)).collect();
        for c in pool.iter_mut() {
            c.points.extend(sweep(trials.1).curve(lat.get(c.l), &fresh).expect("valid sweep").points);
            c.points.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        if let Ok(t) = find_threshold(&pool, BOOTSTRAP_REPLICATES, seed) {
            return Located { x: Some(t.x_star), sigma: t.sigma, note: format!("coarse {x0:.5}, refined over {}", tried.join(" then ")) };
        }
        let (small, large) = (&pool[pool.len() - 2], &pool[pool.len() - 1]);
        let d: f64 = small.points.iter().zip(&large.points).filter(|(p, _)| window.contains(&p.0)).map(|(a, b)| b.1.rate - a.1.rate).sum();
        if d < 0.0 {
            centre += 1.5 * half;
        } else if d > 0.0 {
            centre -= 1.5 * half;
        } else {
            half *= 2.0;
        }
    }
    Located { x: Some(x0), sigma: f64::NAN, note: format!("refinement over {} missed the crossing; coarse value kept", tried.join(", ")) }
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: usize, ok: bool, text: &str, start: Instant) {
        if !ok {
            self.failures += 1;
        }
        println!("{} criterion {id}: {text} [{:.1} s]", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
}

fn within(x: Option<f64>, target: f64, tol: f64) -> bool {
    x.is_some_and(|x| (x - target).abs() <= tol)
}

fn pct(x: Option<f64>) -> String {
    x.map_or("none".into(), |x| format!("{:.3}%", 100.0 * x))
}

fn spread(sigma: f64, scale: f64, digits: usize) -> String {
    if sigma.is_finite() {
        format!("{:.digits$}", scale * sigma)
    } else {
        "n/a".into()
    }
}

fn physical(strategy: StrategyConfig, param: &str) -> NoiseSpec {
    let mut n = NoiseSpec::physical(strategy);
    n.set_param(param, Affine::linear(1.0)).expect("known parameter");
    n
}

fn rules(r: &mut Report) {
    let start = Instant::now();
    let c = verify_rule_corpus(200, 8, 2024, RuleMutation::None);
    let ok = c.passed() && c.graphs == 200 && start.elapsed().as_secs() < 60;
    r.line(1, ok, &format!("{} graphs, {} edge-split and {} node-split cases, {} failures", c.graphs, c.edge_split_cases, c.node_split_cases, c.failures.len()), start);
}

fn lattice(r: &mut Report) {
    let start = Instant::now();
    let mut violations = 0;
    let mut checks = 0;
    for l in [2, 4, 6, 8] {
        let sg = derive_syndrome_graph(&build_sffcc_network(l).expect("lattice"));
        violations += check_structure(&sg).len();
        checks += sg.sectors.iter().map(|s| s.n_checks()).sum::<usize>();
    }
    let net = build_sffcc_network(2).expect("lattice");
    let oracle = verify_small_instance(&net, &derive_syndrome_graph(&net)).expect("oracle");
    let ok = violations == 0 && oracle.passed && start.elapsed().as_secs() < 60;
    r.line(2, ok, &format!("{checks} checks on L=2..8 with {violations} structure violations; L=2 oracle mismatches {}", oracle.mismatches.len()), start);
}

fn analytics(r: &mut Report) {
    let start = Instant::now();
    let n = 1_000_000u64;
    let mut worst: (f64, String) = (0.0, String::new());
    let mut rejected = 0;
    let spots = [(1.0, 1.0, 3), (0.8, 1.0, 3), (0.9, 0.95, 5), (0.95, 0.9, 10), (0.85, 0.97, 7)];
    for (i, &(eta, v, k)) in spots.iter().enumerate() {
        let params = FusionChannelParams::linear_optics(eta, v).expect("params");
        let mut cases: Vec<(String, [f64; 4], Box<dyn Fn(&mut ChaCha8Rng) -> EncodedFusionOutcome>)> = Vec::new();
        let probs = combined_rus_probs(k, &params).expect("probs");
        cases.push((format!("RUS{k} sequential η={eta} V={v}"), probs, Box::new(move |rng| simulate_rus(k, &params, rng))));
        let s = EncodedFusionSampler::new(Strategy::rus(k), params).expect("sampler");
        cases.push((format!("RUS{k} direct η={eta} V={v}"), probs, Box::new(move |rng| s.sample(rng))));
        for tie in [TieRule::Erase, TieRule::Flip] {
            let s = EncodedFusionSampler::new(Strategy::Rep { m: k, tie }, params).expect("sampler");
            cases.push((format!("REP{k} {tie:?} η={eta} V={v}"), rep_event_probs(k, tie, &params).expect("probs"), Box::new(move |rng| s.sample(rng))));
        }
        for (c, (name, probs, sample)) in cases.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + 10 * i as u64 + c as u64);
            let mut counts = [0u64; 4];
            for _ in 0..n {
                counts[sample(&mut rng).event.index()] += 1;
            }
            let (stat, crit, ok) = chi2_test(&counts, probs, 0.001);
            rejected += usize::from(!ok);
            if stat / crit > worst.0 {
                worst = (stat / crit, name.clone());
            }
        }
    }
    let stop = |eta: f64| {
        let p = combined_rus_probs(3, &FusionChannelParams::linear_optics(eta, 1.0).expect("params")).expect("probs");
        p[EncodedEvent::BothRecovered.index()] + p[EncodedEvent::ZzOnly.index()]
    };
    let (lossless, lossy) = (stop(1.0), stop(0.8));
    let exact = (lossless - 0.875).abs() < 1e-12 && (lossy - 0.842).abs() < 5e-4;
    let ok = rejected == 0 && exact && start.elapsed().as_secs() < 120;
    r.line(
        3,
        ok,
        &format!("{rejected} χ² rejections at α=0.001 (largest stat/crit {:.2}, {}); RUS3 stops with {lossless:.6} at η=1, {lossy:.5} at η=0.8", worst.0, worst.1),
        start,
    );
}

fn phenomenological(r: &mut Report, lat: &Lattices, b: &Budget) {
    let start = Instant::now();
    let sizes: &[usize] = &[4, 6, 8];
    let (tol_x, tol_e, tol_r) = if b.full { (0.05, 0.0015, 0.010) } else { (0.08, 0.0025, 0.015) };
    let trials = if b.full { (b.coarse_trials, b.fine_trials) } else { (100, 500) };
    let line = NoiseSpec::phenomenological(Affine::new(0.0027, 0.014), Affine::new(0.0148, 0.0082));
    let coarse: Vec<f64> = (1..=7).map(|i| i as f64 / 10.0).collect();
    let x = locate(lat, b, sizes, &line, &coarse, 301, trials);
    let err = NoiseSpec::phenomenological(Affine::linear(1.0), Affine::constant(0.0));
    let coarse: Vec<f64> = (2..=8).map(|i| i as f64 * 0.002).collect();
    let e = locate(lat, b, sizes, &err, &coarse, 302, trials);
    let eras = NoiseSpec::phenomenological(Affine::constant(0.0), Affine::linear(1.0));
    let coarse: Vec<f64> = (3..=9).map(|i| i as f64 * 0.02).collect();
    let s = locate(lat, b, sizes, &eras, &coarse, 303, trials);
    let ok = within(x.x, 0.392, tol_x) && within(e.x, 0.010, tol_e) && within(s.x, 0.119, tol_r) && (b.full || start.elapsed().as_secs() < 600);
    r.line(
        4,
        ok,
        &format!(
            "x* = {} ± {} (target 0.392 ± {tol_x}); p_err* = {} ± {}% (1.0 ± {}%); p_eras* = {} ± {}% (11.9 ± {}%)",
            x.x.map_or("none".into(), |v| format!("{v:.4}")),
            spread(x.sigma, 1.0, 3),
            pct(e.x),
            spread(e.sigma, 100.0, 3),
            100.0 * tol_e,
            pct(s.x),
            spread(s.sigma, 100.0, 2),
            100.0 * tol_r
        ),
        start,
    );
    for (name, l) in [("line", &x), ("p_err", &e), ("p_eras", &s)] {
        println!("    {name}: {}", l.note);
    }
}

/// `reduced` gives the coarse and refined trial counts outside full mode.
fn physical_search(lat: &Lattices, b: &Budget, noise: &NoiseSpec, coarse: &[f64], seed: u64, reduced: (usize, usize)) -> Located {
    let trials = if b.full { (b.coarse_trials, b.fine_trials) } else { reduced };
    locate(lat, b, &b.sizes, noise, coarse, seed, trials)
}

fn loss(r: &mut Report, lat: &Lattices, b: &Budget) {
    let start = Instant::now();
    let coarse = [0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1, 0.115, 0.13];
    let rep: Vec<(usize, Located)> = [1, 5].iter().map(|&m| (m, physical_search(lat, b, &physical(StrategyConfig::rep(m), "loss"), &coarse, 500 + m as u64, (400, 2000)))).collect();
    let rus: Vec<(usize, Located)> = [2, 4, 6, 8, 10].iter().map(|&n| (n, physical_search(lat, b, &physical(StrategyConfig::rus(n), "loss"), &coarse, 510 + n as u64, (400, 2000)))).collect();
    let reinit = physical_search(lat, b, &physical(StrategyConfig::rus_reinit(10), "loss"), &coarse, 530, (400, 2000));
    let value = |v: &[(usize, Located)], k: usize| v.iter().find(|p| p.0 == k).and_then(|p| p.1.x);
    let rep_order = matches!((value(&rep, 5), value(&rep, 1)), (Some(a), Some(b)) if a > b);
    let rus_x: Vec<Option<f64>> = rus.iter().map(|p| p.1.x).collect();
    let rus_order = rus_x.windows(2).all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b > a));
    let steps: Vec<String> = rus
        .windows(2)
        .map(|w| {
            let s = (w[0].1.sigma.powi(2) + w[1].1.sigma.powi(2)).sqrt();
            let d = w[1].1.x.zip(w[0].1.x).map(|(b, a)| b - a);
            format!("RUS{}→{} Δ {} ± {}%", w[0].0, w[1].0, d.map_or("n/a".into(), |d| format!("{:+.3}", 100.0 * d)), spread(s, 100.0, 3))
        })
        .collect();
    let ok = within(value(&rep, 5), 0.0229, 0.004) && within(value(&rus, 10), 0.074, 0.007) && within(reinit.x, 0.08, 0.007) && rep_order && rus_order;
    let list = |v: &[(usize, Located)], tag: &str| v.iter().map(|(k, l)| format!("{tag}{k} {}", pct(l.x))).collect::<Vec<_>>().join(", ");
    r.line(
        5,
        ok,
        &format!(
            "REP5 {} (2.29 ± 0.4%), RUS10 {} (7.4 ± 0.7%), RUS10+reinit {} (8 ± 0.7%); REP5 > REP1 {rep_order}; RUS increasing in N {rus_order} [{}; {}]",
            pct(value(&rep, 5)),
            pct(value(&rus, 10)),
            pct(reinit.x),
            list(&rep, "REP"),
            list(&rus, "RUS")
        ),
        start,
    );
    println!("    {}", steps.join(", "));
    for (name, l) in rep.iter().map(|(m, l)| (format!("REP{m}"), l)).chain(rus.iter().map(|(n, l)| (format!("RUS{n}"), l))).chain([("RUS10+reinit".to_string(), &reinit)]) {
        println!("    {name}: {} ± {}%; {}", pct(l.x), spread(l.sigma, 100.0, 3), l.note);
    }
}

fn distinguishability(r: &mut Report, lat: &Lattices, b: &Budget) {
    let start = Instant::now();
    let coarse = [0.01, 0.02, 0.03, 0.04, 0.055, 0.07, 0.085, 0.1, 0.12, 0.15];
    let rus = physical_search(lat, b, &physical(StrategyConfig::rus(10), "distinguishability"), &coarse, 610, (b.coarse_trials, b.fine_trials));
    let rep = physical_search(lat, b, &physical(StrategyConfig::Rep { m: 10, tie: TieRule::Erase }, "distinguishability"), &coarse, 620, (b.coarse_trials, b.fine_trials));
    let v = |l: &Located| l.x.map(|x| 1.0 - x);
    let ok = within(v(&rus), 0.959, 0.007) && within(v(&rep), 0.92, 0.01);
    r.line(6, ok, &format!("RUS10 V* = {} (95.9 ± 0.7%); REP10 V* = {} (92 ± 1%)", pct(v(&rus)), pct(v(&rep))), start);
    for (name, l) in [("RUS10", &rus), ("REP10", &rep)] {
        println!("    {name}: 1-V = {} ± {}%; {}", pct(l.x), spread(l.sigma, 100.0, 3), l.note);
    }
}

/// Index of the largest threshold and whether it sits strictly inside the scanned sizes.
fn peak(v: &[(usize, Located)]) -> Option<(usize, f64, bool)> {
    let (i, x) = v.iter().enumerate().filter_map(|(i, p)| p.1.x.map(|x| (i, x))).max_by(|a, b| a.1.total_cmp(&b.1))?;
    Some((v[i].0, x, i > 0 && i + 1 < v.len()))
}

fn spin(r: &mut Report, lat: &Lattices, b: &Budget) {
    let start = Instant::now();
    let coarse = [0.0004, 0.0006, 0.0009, 0.0013, 0.0018, 0.0025, 0.0035, 0.005, 0.007, 0.01];
    let scan = |kind: &str, param: &str, sizes: &[usize], seed: u64| -> Vec<(usize, Located)> {
        sizes
            .iter()
            .map(|&k| {
                let s = if kind == "rus" { StrategyConfig::rus(k) } else { StrategyConfig::rep(k) };
                (k, physical_search(lat, b, &physical(s, param), &coarse, seed + k as u64, (60, 200)))
            })
            .collect()
    };
    let rus_z = scan("rus", "spin_z", &[10], 700);
    let rep_z = scan("rep", "spin_z", &[3, 5, 8, 14], 720);
    let rus_d = scan("rus", "spin_depolarizing", &[3, 5, 10], 740);
    let rep_d = scan("rep", "spin_depolarizing", &[3, 5, 8], 760);

    let rus10 = rus_z[0].1.x;
    let pz = peak(&rep_z);
    let large_m = rep_z.last().and_then(|p| p.1.x);
    let rep_z_ok = pz.is_some_and(|(m, x, interior)| m == 5 && interior && (x - 0.0019).abs() <= 0.0005);
    let decline = matches!((pz, large_m), (Some((_, p, _)), Some(x)) if x < p && (x - 0.00095).abs() <= 0.0005);
    let pd_rus = peak(&rus_d);
    let pd_rep = peak(&rep_d);
    let dep_ok = pd_rus.is_some_and(|(_, x, interior)| interior && (x - 0.002).abs() <= 0.0005) && pd_rep.is_some_and(|(_, x, interior)| interior && (x - 0.00125).abs() <= 0.0005);
    let ok = within(rus10, 0.0059, 0.001) && rep_z_ok && decline && dep_ok;
    let fmt_peak = |p: Option<(usize, f64, bool)>| p.map_or("none".into(), |(k, x, i)| format!("{} at {k}{}", pct(Some(x)), if i { "" } else { " (edge of scan)" }));
    r.line(
        7,
        ok,
        &format!(
            "RUS10 p_Z* = {} (0.59 ± 0.1%); REP p_Z peak {} (0.19 ± 0.05% at m=5), m=14 {} (≈0.095%); depolarizing peaks RUS {} (0.2 ± 0.05%), REP {} (0.125 ± 0.05%)",
            pct(rus10),
            fmt_peak(pz),
            pct(large_m),
            fmt_peak(pd_rus),
            fmt_peak(pd_rep)
        ),
        start,
    );
    for (tag, v) in [("RUS Z", &rus_z), ("REP Z", &rep_z), ("RUS dep", &rus_d), ("REP dep", &rep_d)] {
        for (k, l) in v.iter() {
            println!("    {tag} {k}: {} ± {}%; {}", pct(l.x), spread(l.sigma, 100.0, 4), l.note);
        }
    }
}

fn reinit(r: &mut Report) {
    let start = Instant::now();
    let params = FusionChannelParams::linear_optics(1.0, 1.0).expect("params");
    let boost = EncodedFusionSampler::new(Strategy::rus(10), params).expect("sampler");
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let previous = [EncodedEvent::ZzOnly; 2];
    let current = EncodedFusionOutcome { event: EncodedEvent::XxOnly, attempts: 10, xx_flipped: false, zz_flipped: false };
    let n = 1_000_000u64;
    let k = (0..n).filter(|_| apply_reinit_rule(1, previous, current, &boost, None, &mut rng).0.event == EncodedEvent::BothRecovered).count() as u64;
    let p = 1.0 - 2f64.powi(-10);
    let ok = within_sigma(k, n, p, 3.0) && start.elapsed().as_secs() < 60;
    r.line(8, ok, &format!("{k}/{n} boosted fusions recover both (expected {p:.6}, σ = {:.2e})", (p * (1.0 - p) / n as f64).sqrt()), start);
}

fn determinism(r: &mut Report) {
    let start = Instant::now();
    let mut configs = Vec::new();
    let mut c = SweepConfig::from_toml(
        "schema_version = 1\nname = \"det\"\nseed = 99\ntrials = 60\nsizes = [2, 4]\ngrid = { values = [0.3, 0.4, 0.5] }\n[noise]\nmodel = \"phenomenological\"\np_err = { offset = 0.0027, slope = 0.014 }\np_eras = { offset = 0.0148, slope = 0.0082 }\n",
    )
    .expect("config");
    configs.push(c.clone());
    c.noise = physical(StrategyConfig::rus_reinit(6), "loss");
    c.noise.set_param("spin_depolarizing", Affine::constant(0.002)).expect("known parameter");
    c.grid = GridSpec::Values { values: vec![0.05, 0.08] };
    configs.push(c);
    let mut identical = true;
    for c in &configs {
        let csv: Vec<String> = [1, 2, 3, 4].iter().map(|&w| sweep_csv(&run_sweep(c, w).expect("sweep").curves)).collect();
        identical &= csv.windows(2).all(|w| w[0] == w[1]);
    }
    r.line(9, identical, &format!("CSV byte-identical across 1 to 4 workers for {} configs", configs.len()), start);
}

fn main() {
    let b = Budget::from_env();
    println!(
        "acceptance: {} mode, sizes {:?}, {} workers",
        if b.full { "full" } else { "reduced" },
        b.sizes,
        b.workers
    );
    let only: Option<Vec<usize>> = std::env::var("SFFCC_ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let wanted = |id: usize| only.as_ref().is_none_or(|o| o.contains(&id));
    let mut r = Report { failures: 0 };
    if wanted(1) {
        rules(&mut r);
    }
    if wanted(2) {
        lattice(&mut r);
    }
    if wanted(3) {
        analytics(&mut r);
    }
    if (4..=7).any(wanted) {
        let lat = Lattices([4usize, 6, 8].iter().map(|&l| LatticeContext::new(l).expect("lattice")).collect());
        let stages: [(usize, fn(&mut Report, &Lattices, &Budget)); 4] = [(4, phenomenological), (5, loss), (6, distinguishability), (7, spin)];
        for (id, f) in stages {
            if wanted(id) {
                f(&mut r, &lat, &b);
            }
        }
    }
    if wanted(8) {
        reinit(&mut r);
    }
    if wanted(9) {
        determinism(&mut r);
    }
    println!("acceptance: {} failed", r.failures);
    if r.failures > 0 && std::env::var("SFFCC_ACCEPTANCE_STRICT").is_ok_and(|v| v != "0") {
        std::process::exit(1);
    }
}
