//! Acceptance criteria, one line per criterion.
//!
//! Exits 0 after printing every line; set `ACCEPTANCE_STRICT=1` to exit 1
//! when any criterion fails.

#![allow(clippy::needless_range_loop)]

mod common;

use std::time::{Duration, Instant};

use lieaff::affgebroid::{pullback_identities, reeb, reeb_solve, vertical_restriction_check, CoSection, CosymplecticReport};
use lieaff::algebroid::validate_chart;
use lieaff::dynamics::integrate;
use lieaff::expr::{parse, Bound, Expr};
use lieaff::hj::{cocycle_residual, f_of};
use lieaff::models::{self, Model};
use lieaff::sample::SamplePlan;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use common::{central_diff, corpus, max_abs_diff, random_gamma, CORPUS_VARS};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn builtin() -> Vec<Model> {
    vec![
        models::free_particle(1).unwrap(),
        models::oscillator(1).unwrap(),
        models::linear_tangent(2).unwrap(),
        models::rigid_body([1.0, 2.0, 3.0]).unwrap(),
    ]
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = lieaff::cli::run(std::iter::once("lieaff").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err))
}

fn key(report: &str, name: &str) -> Result<f64, String> {
    let prefix = format!("{name} = ");
    report
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .ok_or_else(|| format!("`{name}` missing from report"))?
        .parse()
        .map_err(|e| format!("{name}: {e}"))
}

fn perturbed_so3() -> lieaff::algebroid::AlgebroidChart {
    let mut c = vec![vec![vec![0.0; 3]; 3]; 3];
    let mut set = |a: usize, b: usize, k: usize, v: f64| {
        c[a][b][k] = v;
        c[b][a][k] = -v;
    };
    set(0, 1, 2, 1.1);
    set(1, 2, 0, 1.0);
    set(2, 0, 1, 1.0);
    lieaff::algebroid::AlgebroidChart::lie_algebra(vec!["t".into()], &c).unwrap()
}

fn chart_validity() -> Outcome {
    let plan = SamplePlan::default();
    let mut worst: f64 = 0.0;
    for model in builtin() {
        let v = model.chart.validate(&plan).map_err(|e| e.to_string())?;
        worst = worst.max(v.worst());
    }
    let control = validate_chart(&std::sync::Arc::new(perturbed_so3()), &plan).map_err(|e| e.to_string())?;
    let off_diagonal = lieaff::modelfile::load_model(&common::model_file("jacobi_violation.toml"))
        .and_then(|m| m.chart.validate(&plan))
        .map_err(|e| e.to_string())?;
    let ok = worst <= 1e-8 && control.jacobi >= 0.05;
    Ok((
        ok,
        format!(
            "max residual {worst:.1e}; perturbed so(3) jacobi {:.1e} (need >= 5e-2); off-diagonal control jacobi {:.1e}",
            control.jacobi, off_diagonal.bidual.jacobi
        ),
    ))
}

fn reeb_oracle() -> Outcome {
    let mut agree: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for model in builtin() {
        for p in model.plan.points::<f64, _>(&model.chart.phase_vars()) {
            let closed = reeb(&model.hamiltonian, &p).map_err(|e| e.to_string())?;
            let solved = reeb_solve(&model.hamiltonian, &p).map_err(|e| e.to_string())?;
            agree = agree.max(max_abs_diff(&closed, &solved.coeffs));
            residual = residual.max(solved.residual);
        }
    }
    Ok((agree <= 1e-10 && residual <= 1e-10, format!("agreement {agree:.1e}, solve residual {residual:.1e}")))
}

fn cosymplectic_closure() -> Outcome {
    let mut d_eta: f64 = 0.0;
    let mut d_omega: f64 = 0.0;
    for model in builtin() {
        let r = CosymplecticReport::check(&model.hamiltonian, &model.plan).map_err(|e| e.to_string())?;
        d_eta = d_eta.max(r.d_eta);
        d_omega = d_omega.max(r.d_omega);
    }
    Ok((d_eta == 0.0 && d_omega <= 1e-8, format!("d eta {d_eta:.1e}, d Omega_h {d_omega:.1e}")))
}

fn pullbacks() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(2026);
    let mut identities: f64 = 0.0;
    let mut vertical: f64 = 0.0;
    for model in builtin() {
        for _ in 0..5 {
            let gamma = random_gamma(&model.chart, &mut rng);
            let r = pullback_identities(&gamma, &model.hamiltonian, &model.plan).map_err(|e| e.to_string())?;
            identities = identities.max(r.lambda).max(r.omega);
        }
        let v = vertical_restriction_check(&model.hamiltonian, &model.plan).map_err(|e| e.to_string())?;
        vertical = vertical.max(v.worst());
    }
    Ok((identities <= 1e-8 && vertical <= 1e-10, format!("identities {identities:.1e}, restrictions {vertical:.1e}")))
}

fn classical_limit() -> Outcome {
    let osc = models::oscillator(1).unwrap();
    let h = &osc.hamiltonian;
    let mut field: f64 = 0.0;
    for p in osc.plan.points::<f64, _>(&osc.chart.phase_vars()) {
        let r = reeb(h, &p).map_err(|e| e.to_string())?;
        let (_, g) = h.value_grad(&p).map_err(|e| e.to_string())?;
        field = field.max(max_abs_diff(&r, &[1.0, g[2], -g[1]]));
    }
    let tau = 2.0 * std::f64::consts::PI;
    let traj = integrate(h, &[0.0, 1.0, 0.0], 0.0, tau, 1e-3).map_err(|e| e.to_string())?;
    let ret = max_abs_diff(&traj.last()[1..], &[1.0, 0.0]);
    let error = |step: f64| -> Result<f64, String> {
        let t = integrate(h, &[0.0, 1.0, 0.0], 0.0, 2.0, step).map_err(|e| e.to_string())?;
        Ok(max_abs_diff(&t.last()[1..], &[2f64.cos(), -2f64.sin()]))
    };
    let factor = error(0.1)? / error(0.05)?;
    let ok = field <= 1e-12 && ret <= 1e-9 && (12.0..=20.0).contains(&factor);
    Ok((ok, format!("field {field:.1e}, 2pi return {ret:.1e}, order factor {factor:.2}")))
}

fn hj_positive() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (model, w) in [("trivial:1", "W=q^2/(2*(t+1))"), ("trivial:1:oscillator", "W=q^2/2*cos(t)/sin(t)")] {
        let (code, out) = cli(&["verify", model, "--alpha", w, "--horizon", "1"]);
        let max_r = key(&out, "max_r")?;
        let hj = key(&out, "hj_residual")?;
        ok &= code == 0 && max_r <= 1e-6 && hj <= 1e-10;
        notes.push(format!("{model}: exit {code}, max_r {max_r:.1e}, hj {hj:.1e}"));
    }
    Ok((ok, notes.join("; ")))
}

fn hj_negative() -> Outcome {
    let (code, out) = cli(&["verify", "trivial:1", "--alpha", "W=q^3/3"]);
    let hj = key(&out, "hj_residual")?;
    let witness = key(&out, "witness_max_r")?;
    let agree = out.contains("(i) and (ii) AGREE");
    let ok = code == 1 && hj >= 0.1 && witness >= 1e-3 && agree;
    Ok((ok, format!("exit {code}, hj {hj:.2e}, witness max_r {witness:.2e}, verdicts agree {agree}")))
}

fn linear_case() -> Outcome {
    let model = models::linear_tangent(2).unwrap();
    let vars = model.chart.vars().to_vec();
    let mut worst: f64 = 0.0;
    for name in ["constant", "linear", "zero"] {
        let alpha = model.section(name).map_err(|e| e.to_string())?;
        if alpha.alpha0() != &Expr::num(0.0) {
            return Err(format!("section `{name}` has nonzero alpha0"));
        }
        let f = Bound::new(&f_of(&model.hamiltonian, alpha), &vars).map_err(|e| e.to_string())?;
        for x in model.plan.points::<f64, _>(&vars) {
            let ys = alpha.values(&x).map_err(|e| e.to_string())?;
            let xy: Vec<f64> = x.iter().copied().chain(ys[1..].iter().copied()).collect();
            let composed = model.hamiltonian.value(&xy).map_err(|e| e.to_string())?;
            worst = worst.max((f.value(&x).map_err(|e| e.to_string())? - composed).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max |f - H o alpha| {worst:.1e}")))
}

fn rigid_body() -> Outcome {
    let model = models::rigid_body([1.0, 2.0, 3.0]).unwrap();
    let z0 = [0.0, 0.6, -0.8, 0.5];
    let traj = integrate(&model.hamiltonian, &z0, 0.0, 10.0, 1e-3).map_err(|e| e.to_string())?;
    let casimir = |s: &[f64]| s[1..].iter().map(|v| v * v).sum::<f64>();
    let mut dc: f64 = 0.0;
    let mut de: f64 = 0.0;
    let e0 = model.hamiltonian.value(&z0).map_err(|e| e.to_string())?;
    for s in &traj.states {
        dc = dc.max((casimir(s) - casimir(&z0)).abs());
        de = de.max((model.hamiltonian.value(s).map_err(|e| e.to_string())? - e0).abs());
    }
    let mut rng = SplitMix64::seed_from_u64(4);
    let mut family_ok = true;
    let mut cocycles = 0;
    for k in 0..40 {
        let c: Vec<f64> = if k % 4 == 0 { vec![0.0; 3] } else { (0..3).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let a0 = parse(&format!("{:?}*t + {:?}*t^2", rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).unwrap();
        let alpha = CoSection::new(model.chart.clone(), a0, c.iter().map(|&v| Expr::num(v)).collect())
            .map_err(|e| e.to_string())?;
        let r = cocycle_residual(&alpha, &model.plan).map_err(|e| e.to_string())?;
        let zero = c.iter().all(|&v| v == 0.0);
        let min = c.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        if r <= 1e-8 {
            cocycles += 1;
        }
        family_ok &= if zero { r <= 1e-8 } else { r >= min };
    }
    let ok = dc <= 1e-8 && de <= 1e-8 && family_ok && cocycles == 10;
    Ok((ok, format!("casimir drift {dc:.1e}, energy drift {de:.1e}, cocycles {cocycles}/40 all with c = 0: {family_ok}")))
}

fn expression_layer() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut stable = true;
    for src in corpus(200, 2024) {
        let e = parse(&src).map_err(|e| e.to_string())?;
        stable &= parse(&e.to_string()).map_err(|e| e.to_string())? == e;
        let b = Bound::new(&e, &CORPUS_VARS).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let p: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let Ok((_, g)) = b.value_grad(&p) else { continue };
            for k in 0..3 {
                let fd = central_diff(|q| b.value(q).unwrap(), &p, k, 1e-6);
                worst = worst.max((g[k] - fd).abs() / (1.0 + fd.abs()));
            }
        }
    }
    Ok((worst <= 1e-5 && stable, format!("AD vs FD {worst:.1e}, round trip stable {stable}")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("chart validity", chart_validity, Some(Duration::from_secs(5))),
        ("reeb oracle equivalence", reeb_oracle, Some(Duration::from_secs(10))),
        ("cosymplectic closure", cosymplectic_closure, None),
        ("pullback identities", pullbacks, None),
        ("classical limit", classical_limit, None),
        ("hamilton-jacobi positive", hj_positive, Some(Duration::from_secs(10))),
        ("hamilton-jacobi negative", hj_negative, None),
        ("linear case", linear_case, None),
        ("rigid body", rigid_body, None),
        ("expression layer", expression_layer, None),
    ];
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let ok = ok && in_time;
        if !ok {
            failures += 1;
        }
        let budget = budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
        println!(
            "{:>2} {} {name}: {detail} [{:.2}s{budget}]",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
}
