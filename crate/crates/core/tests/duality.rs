use purkit::dsl::{self, SystemFile};
use purkit::duality::*;
use purkit::ore::{Names, OpMatrix};

fn load(name: &str) -> SystemFile {
    let path = format!("{}/../../corpus/{name}.pde", env!("CARGO_MANIFEST_DIR"));
    dsl::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn module(name: &str) -> (SystemFile, ModuleHandle) {
    let f = load(name);
    let m = ModuleHandle::new(f.system().unwrap()).unwrap();
    (f, m)
}

fn show(names: &Names, a: &OpMatrix) -> Vec<String> {
    a.rows().iter().map(|r| names.row(r)).collect()
}

fn pdl(f: &SystemFile, rows: &[&str], cols: &[&str]) -> OpMatrix {
    let vars = f.vars.join(",");
    let mut src = format!("field rational({vars})\nunknowns {}\n", cols.join(", "));
    for r in rows {
        src.push_str(&format!("eq {r} = 0\n"));
    }
    dsl::parse(&src).unwrap().matrix()
}

#[test]
fn riccati_torsion_certificate() {
    let (f, m) = module("ex4_a1_riccati");
    let t = torsion_test(&m).unwrap();
    assert_eq!(t.verdict, Verdict::HasTorsion);
    assert_eq!(t.generators.len(), 1);
    let g = &t.generators[0];
    assert_eq!(f.names().row_sub(&g.generator), "y1_1 - (1/x)*y1 - y2");
    assert_eq!(f.names().op(&g.annihilator), "d1 + 1/x");
    assert!(verify_torsion_element(&m, g).unwrap());
    assert!(t.parametrization.is_none());
}

#[test]
fn torsion_free_when_riccati_fails() {
    let (_, m) = module("ex4_a1_torsion_free");
    let t = torsion_test(&m).unwrap();
    assert_eq!(t.verdict, Verdict::TorsionFree);
    let p = t.parametrization.unwrap();
    assert!(verify_parametrization(&m.presentation(), &p).unwrap());
}

#[test]
fn torsion_modules() {
    for name in ["ex2_1", "ex3_2"] {
        let (_, m) = module(name);
        let t = torsion_test(&m).unwrap();
        assert_eq!(t.verdict, Verdict::TorsionModule, "{name}");
        assert_eq!(differential_rank(&m), 0);
        for g in &t.generators {
            assert!(verify_torsion_element(&m, g).unwrap());
        }
        assert!(ext_module(&m, 0).unwrap().is_zero, "{name}: hom(M, D) = 0");
    }
}

#[test]
fn control_canonical_parametrization() {
    let (f, m) = module("ex4_a2");
    let t = torsion_test(&m).unwrap();
    assert_eq!(t.verdict, Verdict::TorsionFree);
    let p = t.parametrization.unwrap();
    let xi = Names::new(f.vars.clone(), vec!["xi1".into(), "xi2".into()]);
    let rows: Vec<String> = p.rows().iter().map(|r| xi.row(r)).collect();
    assert_eq!(
        rows,
        [
            "D[1,2] xi1 + D[1,1] xi2 - x2*D[2] xi1 - 2*x2*D[1] xi2 + xi1 + x2^2*xi2",
            "D[2,2] xi1 + D[1,2] xi2 - x2*D[2] xi2 - 2*xi2",
        ]
    );
    assert_eq!(kernel_rank(&p).unwrap(), 1);
    let a = m.presentation();
    let nu = Names::new(f.vars.clone(), vec!["nu1".into(), "nu2".into()]);
    let cc = t.candidate.adjoint();
    let rel = purkit::janet::operator_cc(&cc, &Default::default()).unwrap().generators;
    assert_eq!(show(&nu, &rel), ["D[2] nu2 - D[1] nu1 - x2*nu1"]);

    let first = minimal_parametrization(&a, &p, &[0]).unwrap();
    assert_eq!(show(&Names::new(f.vars.clone(), vec!["xi".into()]), &first), ["D[1,2] xi - x2*D[2] xi + xi", "D[2,2] xi"]);
    let second = minimal_parametrization(&a, &p, &[1]).unwrap();
    assert_eq!(
        show(&Names::new(f.vars.clone(), vec!["xi'".into()]), &second),
        ["D[1,1] xi' - 2*x2*D[1] xi' + x2^2*xi'", "D[1,2] xi' - x2*D[2] xi' - 2*xi'"]
    );
    assert_eq!(minimal_parametrization(&a, &p, &[0, 1]), Err(DualityError::NotMinimal));
}

#[test]
fn control_split_lift() {
    let (f, m) = module("ex4_a2");
    let d1 = m.presentation();
    let lift = lift_check(&d1, LIFT_ORDER_BOUND).unwrap().expect("lift");
    let z = Names::new(f.vars.clone(), vec!["zeta".into()]);
    assert_eq!(show(&z, &lift), ["-D[1] zeta + x2*zeta", "-D[2] zeta"]);
    let ad = d1.adjoint();
    let back = left_inverse(&ad).unwrap().expect("adjoint lift");
    let mu = Names::new(f.vars.clone(), vec!["mu1".into(), "mu2".into()]);
    assert_eq!(show(&mu, &back), ["D[2] mu2 + D[1] mu1 + x2*mu1"]);
    assert!(ext_module(&m, 1).unwrap().is_zero);
    assert!(ext_module(&m, 2).unwrap().is_zero);
}

#[test]
fn identity_lifts_to_identity() {
    let id = OpMatrix::identity(2, 3);
    assert_eq!(lift_check(&id, LIFT_ORDER_BOUND).unwrap(), Some(id));
}

#[test]
fn contact_parametrization_and_lift() {
    let (f, m) = module("ex3_4");
    let t = torsion_test(&m).unwrap();
    assert_eq!(t.verdict, Verdict::TorsionFree);
    let printed = pdl(&f, &["phi - x3*D[3] phi", "-D[3] phi", "D[2] phi + x3*D[1] phi"], &["phi"]);
    assert!(verify_parametrization(&m.presentation(), &printed).unwrap());
    let lift = retraction_check(&printed, LIFT_ORDER_BOUND).unwrap().expect("lift");
    assert_eq!(show(&f.names(), &lift), ["xi1 - x3*xi2"]);
}

#[test]
fn rank_duality() {
    for name in ["ex3_1", "ex3_2", "ex3_4", "ex4_a1_riccati", "ex4_a2", "ex2_15"] {
        let (_, m) = module(name);
        let a = m.presentation();
        let n = ModuleHandle::from_matrix(&a.adjoint()).unwrap();
        assert_eq!(m.m() as u64 - m.rank(), a.nrows() as u64 - n.rank(), "{name}");
        let res = m.resolution().unwrap();
        assert_eq!(res.euler_poincare, m.rank() as i64, "{name}");
    }
}

#[test]
fn ext_vanishes_below_codimension() {
    for name in ["ex2_1", "ex3_1", "ex3_2", "ex3_3", "ex4_a2"] {
        let (_, m) = module(name);
        for i in 1..m.codim() {
            assert!(ext_module(&m, i).unwrap().is_zero, "{name} ext^{i}");
        }
    }
}

#[test]
fn macaulay_double_ext() {
    let (_, m) = module("ex3_2");
    let a = m.presentation();
    let res = minimal_resolution(&a).unwrap();
    assert_eq!(res.ranks, [1, 2, 1]);
    let e = ext_from(&res, 1, 2).unwrap();
    assert!(!e.is_zero);
    let n_res = minimal_resolution(&e.relations).unwrap();
    assert_eq!(n_res.euler_poincare, 0);
    let back = ext_from(&n_res, e.relations.ncols(), 2).unwrap();
    assert!(recovers(&a, &back.relations).unwrap());
}

