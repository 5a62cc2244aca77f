use std::path::Path;

use nhqc_core::holonomy::{effective_propagator, make_two_qubit, EdgeCalibration, TwoQubitDevice};
use nhqc_core::{DeviceError, GateRecipe, LatticeModel};
use nhqc_sim::config::check_matches;
use nhqc_sim::scenario::{self, parse_requests, reference_lattice};
use nhqc_sim::{dump_recipes, load_lattice, load_recipes, parse_lattice, serialize_lattice, ConfigError, RecipeError, RunOptions};
use proptest::prelude::*;

fn fixture() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/reference.toml"))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-30)
}

fn assert_same_model(a: &LatticeModel, b: &LatticeModel) {
    assert_eq!(a.qubits().len(), b.qubits().len());
    for (x, y) in a.qubits().iter().zip(b.qubits()) {
        assert_eq!((&x.label, x.role, x.levels), (&y.label, y.role, y.levels));
        assert!(close(x.anharmonicity, y.anharmonicity) && close(x.detuning, y.detuning));
    }
    for (x, y) in a.couplings().iter().zip(b.couplings()) {
        assert_eq!((&x.a, &x.b), (&y.a, &y.b));
        assert!(close(x.g, y.g));
    }
}

#[test]
fn fixture_is_the_reference_lattice() {
    let model = load_lattice(fixture()).unwrap();
    assert_same_model(&model, &reference_lattice());
    check_matches(&model, &reference_lattice()).unwrap();
}

#[test]
fn lattice_round_trips() {
    let model = reference_lattice();
    let back = parse_lattice(&serialize_lattice(&model)).unwrap();
    assert_same_model(&model, &back);
    assert_eq!(back.dims(), model.dims());
}

fn with_edit(from: &str, to: &str) -> String {
    let text = std::fs::read_to_string(fixture()).unwrap();
    assert!(text.contains(from));
    text.replacen(from, to, 1)
}

#[test]
fn config_errors_are_reported() {
    let e = parse_lattice(&with_edit("role = \"auxiliary\"", "role = \"coupler\"")).unwrap_err();
    assert!(matches!(e, ConfigError::Role { .. }), "{e}");

    let e = parse_lattice(&with_edit("a = \"B\"\nb = \"C\"", "a = \"A\"\nb = \"C\"")).unwrap_err();
    assert!(matches!(e, ConfigError::Device(DeviceError::NotBipartite { .. })), "{e}");

    let e = parse_lattice(&with_edit("b = \"E\"", "b = \"Z\"")).unwrap_err();
    assert!(matches!(e, ConfigError::Device(DeviceError::UnknownLabel(_))), "{e}");

    let e = parse_lattice(&with_edit("g_MHz = 11.41", "g_MHz = -1.0")).unwrap_err();
    assert!(matches!(e, ConfigError::Device(DeviceError::NonPositiveCoupling { .. })), "{e}");

    let e = parse_lattice(&with_edit("anharmonicity_MHz = 375.0", "anharmonicity_MHz = 375.0\ncolour = 3")).unwrap_err();
    assert!(matches!(e, ConfigError::Parse(_)), "{e}");

    let e = load_lattice(Path::new("/nonexistent/device.toml")).unwrap_err();
    assert!(matches!(e, ConfigError::Io { .. }), "{e}");
}

#[test]
fn pinned_scenarios_reject_other_devices() {
    let other = parse_lattice(&with_edit("g_MHz = 11.41", "g_MHz = 12.0")).unwrap();
    assert!(matches!(check_matches(&other, &reference_lattice()), Err(ConfigError::Mismatch(_))));
    let e = scenario::fig2(&RunOptions::default(), Some(&other)).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    // Extra qubits and couplings outside the scenario's register are fine.
    scenario::fig2(&RunOptions::default(), Some(&load_lattice(fixture()).unwrap())).unwrap();
}

#[test]
fn gate_requests_parse_next_to_device() {
    let text = format!(
        "{}\n[[gate]]\nkind = \"two_qubit\"\nangle = 1.0\nphase = 0.5\ntargets = [\"A\", \"C\"]\nauxiliary = \"B\"\n",
        std::fs::read_to_string(fixture()).unwrap()
    );
    let requests = parse_requests(&text).unwrap();
    assert_eq!(requests.len(), 1);
    assert_eq!(requests[0].targets, ["A", "C"]);
    assert_eq!(requests[0].beta, scenario::REFERENCE_BETA);
    assert!(parse_requests(&text.replace("phase = 0.5", "phase = 0.5\nwidth = 2")).is_err());
}

fn assert_same_recipes(a: &[GateRecipe], b: &[GateRecipe], model: &LatticeModel) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert_eq!(x.kind, y.kind);
        assert_eq!(x.targets, y.targets);
        assert_eq!(x.auxiliary, y.auxiliary);
        assert_eq!(x.segments.len(), y.segments.len());
        assert!(close(x.duration(), y.duration()));
        assert!((&x.ideal_unitary - &y.ideal_unitary).max_abs() == 0.0);
        let (ux, uy) = (effective_propagator(x, model).unwrap(), effective_propagator(y, model).unwrap());
        assert!((&ux - &uy).max_abs() <= 1e-10);
    }
}

#[test]
fn scenario_recipes_round_trip() {
    let options = RunOptions::default();
    for s in [
        scenario::fig2(&options, None).unwrap(),
        scenario::fig3(&options, None).unwrap(),
        scenario::fig4(&options, None).unwrap(),
    ] {
        let text = dump_recipes(&s.gates);
        assert_same_recipes(&s.gates, &load_recipes(&text).unwrap(), &s.model);
    }
}

#[test]
fn recipe_errors_are_reported() {
    let text = dump_recipes(&scenario::fig2(&RunOptions::default(), None).unwrap().gates);
    assert!(matches!(load_recipes(&text.replace("rot_z", "rot_w")), Err(RecipeError::Kind(_))));
    assert!(matches!(load_recipes(&text.replace("\"G_z\"", "\"G_x\"")), Err(RecipeError::Branch(_))));
    assert!(matches!(load_recipes("[gate]\nkind = 3\n"), Err(RecipeError::Parse(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn two_qubit_recipes_round_trip(vartheta in 0.0f64..3.0, varphi in -3.0f64..3.0) {
        let model = reference_lattice().subsystem(&["A", "B", "C"]).unwrap();
        let device = TwoQubitDevice {
            first: EdgeCalibration::from_model(&model, "A", "B", 1.6).unwrap(),
            second: EdgeCalibration::from_model(&model, "C", "B", 1.6).unwrap(),
        };
        let recipe = make_two_qubit(vartheta, varphi, &device).unwrap();
        let back = load_recipes(&dump_recipes(std::slice::from_ref(&recipe))).unwrap();
        assert_same_recipes(&[recipe], &back, &model);
    }
}
