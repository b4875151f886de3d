mod common;

use lieaff::models;
use lieaff::modelfile::{load_model, parse_model, resolve_section};
use lieaff::sample::SamplePlan;

use common::{model_dir, model_file};

#[test]
fn shipped_files_load() {
    let mut names: Vec<String> = std::fs::read_dir(model_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["affine_action.toml", "free_particle.toml", "jacobi_violation.toml", "perturbed_so3.toml", "rigid_body.toml", "rotation_action.toml"]
    );
    for name in names {
        let model = load_model(&model_file(&name)).unwrap();
        let valid = model.chart.validate(&SamplePlan::default()).unwrap().is_valid();
        assert_eq!(valid, name != "jacobi_violation.toml", "{name}");
    }
}

#[test]
fn file_and_builtin_rigid_body_agree() {
    let file = load_model(&model_file("rigid_body.toml")).unwrap();
    let builtin = models::rigid_body([1.0, 2.0, 3.0]).unwrap();
    for p in SamplePlan::default().points::<f64, _>(&builtin.chart.phase_vars()) {
        assert_eq!(file.hamiltonian.value(&p).unwrap(), builtin.hamiltonian.value(&p).unwrap());
        assert_eq!(
            file.chart.bidual_chart().structure_at(&p[..1]).unwrap(),
            builtin.chart.bidual_chart().structure_at(&p[..1]).unwrap()
        );
    }
}

#[test]
fn file_and_builtin_free_particle_agree() {
    let file = load_model(&model_file("free_particle.toml")).unwrap();
    let builtin = models::free_particle(1).unwrap();
    assert_eq!(file.plan, builtin.plan);
    assert_eq!(file.x0_boxes, builtin.x0_boxes);
    for p in builtin.plan.points::<f64, _>(builtin.chart.vars()) {
        for name in ["hj", "cubic"] {
            let a = file.section(name).unwrap().values(&p).unwrap();
            let b = builtin.section(name).unwrap().values(&p).unwrap();
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() <= 1e-15);
            }
        }
    }
}

#[test]
fn builtin_names() {
    for name in ["trivial:1", "trivial:3", "trivial:2:oscillator", "trivial:1:free", "linear:tangent3", "rigid:1,2,3"] {
        let model = models::by_name(name).unwrap();
        assert!(model.chart.validate(&SamplePlan::default().with_count(10)).unwrap().is_valid(), "{name}");
    }
    for bad in ["trivial:0", "trivial:x", "rigid:1,2", "rigid:1,-2,3", "spin"] {
        assert!(models::by_name(bad).is_err(), "{bad}");
    }
}

#[test]
fn inline_sections_resolve() {
    let model = models::free_particle(1).unwrap();
    let x = [0.5, 0.25];
    assert_eq!(resolve_section(&model, "W=q^2").unwrap().values(&x).unwrap(), vec![0.0, 0.5]);
    assert_eq!(resolve_section(&model, "t;q").unwrap().values(&x).unwrap(), vec![0.5, 0.25]);
    assert!(resolve_section(&model, "missing").is_err());
    assert!(resolve_section(&model, "1;2,3").is_err());
}

#[test]
fn unknown_keys_are_rejected() {
    let text = "[space]\nm = 1\nn = 1\nvars = [\"t\"]\nextra = 3\n[anchor]\nrho0 = [1]\nrhoV = [[0]]\n[hamiltonian]\nH = 0\n";
    assert!(parse_model(text, "x").is_err());
}

#[test]
fn conflicting_structure_entries_are_rejected() {
    let text = "[space]\nm = 1\nn = 2\nvars = [\"t\"]\n[anchor]\nrho0 = [1]\nrhoV = [[0], [0]]\n[structure]\nCV = { \"1,2,1\" = 1, \"2,1,1\" = 1 }\n[hamiltonian]\nH = 0\n";
    assert!(parse_model(text, "x").is_err());
}
