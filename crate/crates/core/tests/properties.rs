use jumpfem::adapt::dorfler_mark;
use jumpfem::coeff::{BoundCoefficients, CoefficientField};
use jumpfem::estimate::compute_indicators;
use jumpfem::mesh::{structured_rectangle, Mesh, SubdomainRule};
use jumpfem::solve::{assemble_cr, assemble_dg, default_gamma, ProblemData};
use jumpfem::spaces::{DiscreteField, QuadratureRule, SegmentRule, SpaceKind};
use jumpfem::Point;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Quadrant-split rectangle refined a few times at random.
fn random_mesh(nx: usize, ny: usize, steps: usize, seed: u64) -> Mesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mesh =
        structured_rectangle([-1.0, -0.5], [1.0, 1.5], nx, ny, &SubdomainRule::Quadrants { center: [0.0, 0.5] }).unwrap();
    for _ in 0..steps {
        let marked: Vec<usize> = (0..mesh.num_elements()).filter(|_| rng.random_bool(0.25)).collect();
        mesh = mesh.refine(&marked);
    }
    mesh
}

fn random_alpha(mesh: &Mesh, seed: u64) -> BoundCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa1fa);
    let mut alpha = CoefficientField::new();
    for id in 0..4 {
        alpha.set(id, 10f64.powf(rng.random_range(-6.0..6.0))).unwrap();
    }
    alpha.bind(mesh).unwrap()
}

fn random_field(mesh: &Mesh, kind: SpaceKind, seed: u64) -> DiscreteField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf1e1d);
    let n = kind.num_dofs(mesh);
    DiscreteField::from_coefficients(mesh, kind, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn mesh_params() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    // even counts keep the quadrant interfaces on element edges
    (1usize..4, 1usize..4, 0usize..5, any::<u64>()).prop_map(|(a, b, s, seed)| (2 * a, 2 * b, s, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mesh_invariants_survive_refinement((nx, ny, steps, seed) in mesh_params()) {
        let mesh = random_mesh(nx, ny, steps, seed);
        let area = 4.0;
        prop_assert!((mesh.total_area() - area).abs() <= 1e-12 * area);
        let mut incidence = vec![0usize; mesh.num_faces()];
        for e in 0..mesh.num_elements() {
            for f in mesh.element_faces(e) {
                incidence[f] += 1;
            }
            // the quadrant of the centroid is the element's subdomain
            let c = mesh.geometry(e).centroid;
            let q = match (c[0] > 0.0, c[1] > 0.5) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            };
            prop_assert_eq!(mesh.element(e).subdomain, q);
        }
        for (f, face) in mesh.faces().iter().enumerate() {
            prop_assert_eq!(incidence[f], if face.is_boundary() { 1 } else { 2 });
            let [n, t] = [face.normal, face.tangent];
            prop_assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-14 && (t[0].hypot(t[1]) - 1.0).abs() < 1e-14);
            prop_assert!((n[0] * t[0] + n[1] * t[1]).abs() < 1e-14);
            let [a, b] = face.vertices.map(|v| mesh.vertices()[v]);
            prop_assert!(((b[0] - a[0]).hypot(b[1] - a[1]) - face.length).abs() <= 1e-14 * face.length);
            // normal points out of K⁻ (and into K⁺)
            let mid = mesh.face_point(f, 0.5);
            let cm = mesh.geometry(face.minus).centroid;
            prop_assert!((mid[0] - cm[0]) * n[0] + (mid[1] - cm[1]) * n[1] > 0.0);
            if let Some(p) = face.plus {
                let cp = mesh.geometry(p).centroid;
                prop_assert!((cp[0] - mid[0]) * n[0] + (cp[1] - mid[1]) * n[1] > 0.0);
                prop_assert!(face.minus < p);
            }
        }
        // conformity: the element list rebuilds into a valid mesh
        let tris: Vec<[usize; 3]> = mesh.elements().iter().map(|e| e.vertices).collect();
        let ids: Vec<usize> = mesh.elements().iter().map(|e| e.subdomain).collect();
        prop_assert!(Mesh::new(mesh.vertices().to_vec(), &tris, &ids).is_ok());
    }

    #[test]
    fn min_angle_stays_bounded((nx, ny, steps, seed) in mesh_params()) {
        let base = random_mesh(nx, ny, 0, seed);
        let mesh = random_mesh(nx, ny, steps + 3, seed);
        prop_assert!(mesh.min_angle() >= base.min_angle() / 4.0);
    }

    #[test]
    fn cr_fields_have_mean_free_jumps((nx, ny, steps, seed) in mesh_params()) {
        let mesh = random_mesh(nx, ny, steps, seed);
        let v = random_field(&mesh, SpaceKind::Cr, seed);
        let rule = SegmentRule::gauss(2);
        for &f in mesh.interior_faces() {
            let mean: f64 = rule.iter().map(|(t, w)| w * v.jump(&mesh, f, t)).sum();
            prop_assert!(mean.abs() < 1e-13);
        }
    }

    #[test]
    fn assembled_matrices_are_symmetric_with_positive_diagonal(
        (nx, ny, steps, seed) in mesh_params(), degree in 1usize..3,
    ) {
        let mesh = random_mesh(nx, ny, steps, seed);
        let coeff = random_alpha(&mesh, seed);
        let f = |_: usize, x: Point| 1.0 + x[0] * x[1];
        let data = ProblemData::new(&f);
        let rule = QuadratureRule::triangle(4);
        let systems = [
            assemble_cr(&mesh, &coeff, &data, &rule),
            assemble_dg(&mesh, &coeff, &data, degree, default_gamma(degree), &rule).unwrap(),
        ];
        for system in systems {
            let a = &system.matrix;
            prop_assert!(a.max_asymmetry() <= 1e-12 * a.max_abs());
            prop_assert!(a.diagonal().iter().all(|&d| d > 0.0));
        }
    }

    #[test]
    fn estimator_decomposition_and_homogeneity(
        (nx, ny, steps, seed) in mesh_params(), dg in any::<bool>(), c in -5.0f64..5.0,
    ) {
        let mesh = random_mesh(nx, ny, steps, seed);
        let coeff = random_alpha(&mesh, seed);
        let kind = if dg { SpaceKind::Dg(1 + (seed % 2) as usize) } else { SpaceKind::Cr };
        let u = random_field(&mesh, kind, seed);
        let zero = |_: usize, _: Point| 0.0;
        let data = ProblemData::new(&zero);
        let rule = QuadratureRule::triangle(6);
        let r = compute_indicators(&mesh, &coeff, &data, &u, &rule).unwrap();

        let local: f64 = r.eta_local.iter().map(|x| x * x).sum();
        let interior: f64 = mesh.interior_faces().iter().map(|&f| r.eta_jn[f].powi(2) + r.eta_ju[f].powi(2)).sum();
        let boundary: f64 = mesh.boundary_faces().iter().map(|&f| r.eta_ju[f].powi(2)).sum();
        let global = r.eta_r.iter().map(|x| x * x).sum::<f64>() + interior + boundary;
        prop_assert!((local - global).abs() <= 1e-13 * global.max(f64::MIN_POSITIVE));
        prop_assert!((r.eta().powi(2) - local).abs() <= 1e-13 * local.max(f64::MIN_POSITIVE));
        for &f in mesh.boundary_faces() {
            prop_assert_eq!(r.eta_jn[f], 0.0);
        }

        let s = compute_indicators(&mesh, &coeff, &data, &u.scaled(c), &rule).unwrap();
        for f in 0..mesh.num_faces() {
            prop_assert!((s.eta_jn[f] - c.abs() * r.eta_jn[f]).abs() <= 1e-12 * r.eta_jn[f].max(1e-300));
            prop_assert!((s.eta_ju[f] - c.abs() * r.eta_ju[f]).abs() <= 1e-12 * r.eta_ju[f].max(1e-300));
        }
    }

    #[test]
    fn dorfler_set_is_a_minimal_bulk_prefix(
        eta2 in prop::collection::vec(0.0f64..10.0, 1..60), theta in 0.01f64..=1.0,
    ) {
        let marked = dorfler_mark(&eta2, theta).unwrap();
        let total: f64 = eta2.iter().sum();
        let sum: f64 = marked.iter().map(|&i| eta2[i]).sum();
        prop_assert!(sum >= theta * total * (1.0 - 1e-12));
        if let Some((&last, rest)) = marked.split_last() {
            let without: f64 = rest.iter().map(|&i| eta2[i]).sum();
            prop_assert!(without < theta * total);
            // descending, and nothing left out is larger than the smallest marked value
            prop_assert!(marked.windows(2).all(|w| eta2[w[0]] >= eta2[w[1]]));
            let min_marked = eta2[last];
            prop_assert!((0..eta2.len()).filter(|i| !marked.contains(i)).all(|i| eta2[i] <= min_marked));
        }
    }
}
