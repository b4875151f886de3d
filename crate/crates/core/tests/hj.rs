mod common;

use lieaff::affgebroid::{CoSection, HamiltonianSection};
use lieaff::expr::{parse, Bound, Expr};
use lieaff::hj::{cocycle_residual, f_of, find_witness, hj_report, hj_residual, verify_batch, verify_theorem};
use lieaff::models;
use lieaff::sample::SamplePlan;
use lieaff::Error;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use common::{all_models, random_polynomial};

fn value(e: &Expr, vars: &[String], p: &[f64]) -> f64 {
    Bound::new(e, vars).unwrap().value(p).unwrap()
}

#[test]
fn f_is_alpha0_plus_hamiltonian() {
    let tangent = models::linear_tangent(2).unwrap();
    let vars = tangent.chart.vars().to_vec();
    for name in ["constant", "linear"] {
        let alpha = tangent.section(name).unwrap();
        let f = f_of(&tangent.hamiltonian, alpha);
        for x in tangent.plan.points::<f64, _>(&vars) {
            let ys = alpha.values(&x).unwrap();
            assert_eq!(ys[0], 0.0);
            let composed = tangent.hamiltonian.value(&[x[0], x[1], ys[1], ys[2]]).unwrap();
            assert!((value(&f, &vars, &x) - composed).abs() <= 1e-12);
        }
    }

    let free = models::free_particle(1).unwrap();
    let vars = free.chart.vars().to_vec();
    let alpha = CoSection::exact(free.chart.clone(), &parse("sin(t)*q^2").unwrap()).unwrap();
    let f = f_of(&free.hamiltonian, &alpha);
    for (t, q) in [(0.3f64, 0.7f64), (1.4, -0.2)] {
        let expected = t.cos() * q * q + (2.0 * t.sin() * q).powi(2) / 2.0;
        assert!((value(&f, &vars, &[t, q]) - expected).abs() <= 1e-14);
    }

    let zero_h = HamiltonianSection::new(free.chart.clone(), Expr::num(0.0)).unwrap();
    let alpha = CoSection::new(free.chart.clone(), parse("t*q").unwrap(), vec![parse("t").unwrap()]).unwrap();
    assert_eq!(value(&f_of(&zero_h, &alpha), &vars, &[0.5, 3.0]), 1.5);
}

#[test]
fn cocycle_examples() {
    let plan = SamplePlan::default();
    let free = models::free_particle(1).unwrap();
    assert_eq!(cocycle_residual(free.section("cubic").unwrap(), &plan).unwrap(), 0.0);
    assert_eq!(cocycle_residual(free.section("zero").unwrap(), &plan).unwrap(), 0.0);
    let rigid = models::rigid_body([1.0, 2.0, 3.0]).unwrap();
    let tilted = CoSection::new(rigid.chart.clone(), Expr::var("t"), vec![Expr::num(0.0), Expr::num(0.0), Expr::num(1.0)]).unwrap();
    let d = tilted.as_one_section::<f64>().unwrap().differential().unwrap();
    assert_eq!(d.component(&[0.2], &[1, 2]).unwrap().abs(), 1.0);
    assert!(cocycle_residual(&tilted, &plan).unwrap() >= 1.0);
}

#[test]
fn exact_sections_are_cocycles() {
    let mut rng = SplitMix64::seed_from_u64(31);
    let plan = SamplePlan::default().with_count(50);
    for model in all_models() {
        for _ in 0..3 {
            let w = random_polynomial(model.chart.vars(), &mut rng);
            let alpha = CoSection::exact(model.chart.clone(), &w).unwrap();
            assert!(cocycle_residual(&alpha, &plan).unwrap() <= 1e-8, "{}: W = {w}", model.name);
        }
    }
}

/// `d^Ã α` for constant `α_V = c` reduces to `−ε_{αβγ} c_γ`, so only `c = 0`
/// gives a cocycle and the residual is at least `min |c_γ|` otherwise.
#[test]
fn rigid_body_cocycles_have_zero_fiber_part() {
    let rigid = models::rigid_body([1.0, 2.0, 3.0]).unwrap();
    let plan = SamplePlan::default();
    let mut rng = SplitMix64::seed_from_u64(4);
    for k in 0..40 {
        let c: Vec<f64> = if k % 4 == 0 { vec![0.0; 3] } else { (0..3).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let a0 = format!("{:?}*t + {:?}*sin(t)", rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let alpha = CoSection::new(rigid.chart.clone(), parse(&a0).unwrap(), c.iter().map(|&v| Expr::num(v)).collect()).unwrap();
        let r = cocycle_residual(&alpha, &plan).unwrap();
        if c.iter().all(|&v| v == 0.0) {
            assert_eq!(r, 0.0);
        } else {
            let min = c.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
            assert!(r >= min, "{c:?}: {r}");
        }
    }
}

#[test]
fn hj_residual_examples() {
    let free = models::free_particle(1).unwrap();
    assert!(hj_residual(free.section("hj").unwrap(), &free.hamiltonian, &free.plan).unwrap() <= 1e-12);
    let osc = models::oscillator(1).unwrap();
    assert!(hj_residual(osc.section("hj").unwrap(), &osc.hamiltonian, &osc.plan).unwrap() <= 1e-10);

    let half = CoSection::exact(free.chart.clone(), &parse("q^2/2").unwrap()).unwrap();
    let r = hj_residual(&half, &free.hamiltonian, &free.plan).unwrap();
    let max_q = free.plan.points::<f64, _>(free.chart.vars()).iter().map(|p| p[1].abs()).fold(0.0, f64::max);
    assert!((r - max_q).abs() <= 1e-15, "{r} vs {max_q}");

    let zero_h = HamiltonianSection::new(free.chart.clone(), Expr::num(0.0)).unwrap();
    let report = hj_report(free.section("zero").unwrap(), &zero_h, &free.plan).unwrap();
    assert!(report.holds());
    assert_eq!((report.f_min, report.f_max), (0.0, 0.0));
}

#[test]
fn theorem_on_free_particle_solution() {
    let free = models::free_particle(1).unwrap();
    let report = verify_theorem(free.section("hj").unwrap(), &free.hamiltonian, &[0.0, 1.0], 1.0, 1e-3, &free.plan).unwrap();
    assert!(report.max_r <= 1e-8, "{}", report.max_r);
    assert!(report.hj_residual <= 1e-10);
    assert!(report.x_residual <= 1e-12);
    assert!(report.flow_holds() && report.hj_holds());
    assert_eq!(report.steps, 1000);
}

#[test]
fn theorem_on_cubic_section() {
    let free = models::free_particle(1).unwrap();
    let cubic = free.section("cubic").unwrap();
    let report = verify_theorem(cubic, &free.hamiltonian, &[0.0, 0.5], 1.0, 1e-3, &free.plan).unwrap();
    assert!(report.max_r > 1e-3 && report.hj_residual > 0.1);
    assert!(!report.flow_holds() && !report.hj_holds());
}

#[test]
fn theorem_on_rigid_drift() {
    let rigid = models::rigid_body([1.0, 2.0, 3.0]).unwrap();
    for c in [-2.0, 0.0, 0.7] {
        let alpha = CoSection::new(rigid.chart.clone(), parse(&format!("{c:?}*t")).unwrap(), vec![Expr::num(0.0); 3]).unwrap();
        let report = verify_theorem(&alpha, &rigid.hamiltonian, &[0.0], 1.0, 1e-3, &rigid.plan).unwrap();
        assert_eq!((report.max_r, report.hj_residual), (0.0, 0.0));
    }
}

#[test]
fn theorem_requires_a_cocycle() {
    let rigid = models::rigid_body([1.0, 2.0, 3.0]).unwrap();
    let alpha = CoSection::new(rigid.chart.clone(), Expr::num(0.0), vec![Expr::num(0.0), Expr::num(0.0), Expr::num(1.0)]).unwrap();
    let err = verify_theorem(&alpha, &rigid.hamiltonian, &[0.0], 1.0, 1e-3, &rigid.plan).unwrap_err();
    assert!(matches!(err, Error::NotCocycle { residual } if residual >= 1.0));
}

#[test]
fn batches_agree_on_every_shipped_section() {
    for model in common::builtin_models() {
        let x0s = model.x0_plan(4, 9).points::<f64, _>(model.chart.vars());
        for (name, alpha) in &model.sections {
            if cocycle_residual(alpha, &model.plan).unwrap() > 1e-8 {
                continue;
            }
            let batch = match verify_batch(alpha, &model.hamiltonian, &x0s, 1.0, 1e-3, &model.plan) {
                Ok(b) => b,
                Err(Error::Integration { .. }) => continue,
                Err(e) => panic!("{}/{name}: {e}", model.name),
            };
            assert!(batch.agree(), "{}/{name}\n{batch}", model.name);
            assert!(batch.consistent());
        }
    }
}

#[test]
fn witness_for_the_cubic_section() {
    let free = models::free_particle(1).unwrap();
    let w = find_witness(free.section("cubic").unwrap(), &free.hamiltonian, &free.plan, 1.0, 1e-3, 0.1, 1e-3, 0.1, 10)
        .unwrap()
        .expect("a violating curve exists");
    assert!(w.report.max_r >= 1e-3 && w.center_hj >= 0.1);
    let none = find_witness(free.section("hj").unwrap(), &free.hamiltonian, &free.plan, 1.0, 1e-3, 0.1, 1e-3, 0.1, 10).unwrap();
    assert!(none.is_none());
}
