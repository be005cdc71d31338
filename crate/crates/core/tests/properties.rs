//! Randomised invariants.

mod common;

use nalgebra::{Point3, Rotation3, Vector3};
use proptest::prelude::*;

use common::*;
use transformesh::evolve::{apply_step, optimize_valence, valence_energy};
use transformesh::kernel::predicates::{orient3d, orient3d_exact};
use transformesh::kernel::tritri::{tri_tri_intersect, Adjacency, TriTriResult};
use transformesh::mesh::io::{load_mesh, save_mesh, MeshFormat};
use transformesh::mesh::shapes;
use transformesh::transformesh::{transformesh, TransformeshOptions};
use transformesh::winding::{winding_number, WindingEngine};
use transformesh::SurfaceMesh;

fn point() -> impl Strategy<Value = Point3<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn triangle() -> impl Strategy<Value = [Point3<f64>; 3]> {
    [point(), point(), point()]
}

fn unit() -> impl Strategy<Value = Vector3<f64>> {
    (0.0..std::f64::consts::TAU, -1.0..1.0f64).prop_map(|(phi, z)| {
        let s = (1.0 - z * z).sqrt();
        Vector3::new(s * phi.cos(), s * phi.sin(), z)
    })
}

fn box_mesh(lo: [f64; 3], size: [f64; 3]) -> SurfaceMesh {
    shapes::cube(Point3::origin(), 1.0)
        .transformed(|p| Point3::new(lo[0] + p.x * size[0], lo[1] + p.y * size[1], lo[2] + p.z * size[2]))
}

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

fn sorted(p: [Point3<f64>; 2]) -> [[f64; 3]; 2] {
    let mut v = p.map(|q| [q.x, q.y, q.z]);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orient3d_is_antisymmetric(a in point(), b in point(), c in point(), d in point()) {
        let s = orient3d(&a, &b, &c, &d);
        prop_assert_eq!(orient3d(&b, &a, &c, &d), s.flip());
        prop_assert_eq!(orient3d(&a, &b, &d, &c), s.flip());
        prop_assert_eq!(orient3d(&b, &c, &a, &d), s);
        prop_assert_eq!(s, orient3d_exact(&a, &b, &c, &d));
    }

    #[test]
    fn orient3d_exact_on_nearly_flat_points(a in point(), b in point(), t in 0.0..1.0f64, u in 0.0..1.0f64) {
        // d sits on the plane through a, b, c up to rounding
        let c = Point3::new(a.y, b.z, a.x);
        let d = a + (b - a) * t + (c - a) * u;
        prop_assert_eq!(orient3d(&a, &b, &c, &d), orient3d_exact(&a, &b, &c, &d));
    }

    #[test]
    fn tri_tri_is_symmetric(t1 in triangle(), t2 in triangle()) {
        let ab = tri_tri_intersect(&t1, &t2, Adjacency::None);
        let ba = tri_tri_intersect(&t2, &t1, Adjacency::None);
        prop_assert_eq!(ab.kind(), ba.kind());
        if let (TriTriResult::ProperSegment(s), TriTriResult::ProperSegment(r)) = (ab, ba) {
            prop_assert_eq!(sorted(s.points), sorted(r.points));
        }
    }

    #[test]
    fn clamp_never_exceeds_bound(scale in 0.0..50.0f64, alpha in 0.05..0.5f64, dir in unit()) {
        let s = shapes::icosphere(1, 1.0);
        let e = s.vertex_mean_edge_lengths();
        let field = vec![dir * scale; s.num_vertices()];
        let (m, moved) = apply_step(&s, &field, 1.0, alpha);
        for v in 0..s.num_vertices() {
            let d = (m.position(v as u32) - s.position(v as u32)).norm();
            prop_assert!(moved[v] <= alpha * e[v] * (1.0 + 1e-15));
            prop_assert!((d - moved[v]).abs() < 1e-14);
            prop_assert!((moved[v] - scale.min(alpha * e[v])).abs() < 1e-14);
        }
    }

    #[test]
    fn volume_is_rigid_invariant_and_flips_sign(seed in 0u64..1000, axis in unit(), angle in 0.0..6.3f64, shift in unit()) {
        let m = fuzzed_surface(seed % 8);
        let rot = Rotation3::new(axis * angle);
        let moved = m.transformed(|p| rot * p + shift * 3.0);
        let v = m.signed_volume().unwrap();
        prop_assert!((moved.signed_volume().unwrap() - v).abs() < 1e-12 * v.abs().max(1.0) * 10.0);
        prop_assert!((m.flipped().signed_volume().unwrap() + v).abs() < 1e-12);
    }

    #[test]
    fn vector_area_vanishes_on_closed_meshes(seed in 0u64..1000) {
        let m = fuzzed_surface(seed % 8);
        let sum: Vector3<f64> = (0..m.num_faces() as u32).map(|f| m.face_area_vector(f)).sum();
        prop_assert!(sum.norm() < 1e-11 * m.surface_area());
    }

    #[test]
    fn flipping_negates_winding(p in point(), seed in 0u64..4) {
        let m = match seed {
            0 => shapes::icosphere(2, 0.8),
            1 => shapes::torus(0.6, 0.3, 24, 12),
            2 => shapes::cube(Point3::new(-0.5, -0.5, -0.5), 1.0),
            _ => shapes::icosphere(2, 0.8).merged(&shapes::icosphere(2, 0.5).flipped()),
        };
        let w = winding_number(&p, &m, 1).unwrap();
        prop_assert_eq!(winding_number(&p, &m.flipped(), 1).unwrap(), -w);
        prop_assert_eq!(w, solid_angle_winding(&m, &p));
    }

    #[test]
    fn winding_does_not_depend_on_ray(p in point(), dirs in proptest::collection::vec(unit(), 8)) {
        let m = shapes::torus(0.6, 0.3, 24, 12).merged(&shapes::icosphere(2, 0.25));
        let engine = WindingEngine::new(&m);
        let values: Vec<i32> = dirs.iter().map(|d| engine.cast(&p, d, None)).filter(|q| !q.degenerate).map(|q| q.value()).collect();
        prop_assert!(values.windows(2).all(|w| w[0] == w[1]), "{:?}", values);
    }

    #[test]
    fn save_load_round_trip(seed in 0u64..1000, fmt in 0usize..3) {
        let m = fuzzed_surface(seed % 8);
        let format = [MeshFormat::Off, MeshFormat::Obj, MeshFormat::Ply][fmt];
        let mut buf = Vec::new();
        save_mesh(&m, &mut buf, format).unwrap();
        let (back, _) = load_mesh(buf.as_slice(), format).unwrap();
        prop_assert_eq!(back, m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn box_union_matches_inclusion_exclusion(
        a in (-1.0..0.0f64, -1.0..0.0f64, -1.0..0.0f64, 0.5..1.5f64, 0.5..1.5f64, 0.5..1.5f64),
        b in (-0.6..0.6f64, -0.6..0.6f64, -0.6..0.6f64, 0.3..1.2f64, 0.3..1.2f64, 0.3..1.2f64),
    ) {
        let (lo_a, sa) = ([a.0, a.1, a.2], [a.3, a.4, a.5]);
        let (lo_b, sb) = ([b.0, b.1, b.2], [b.3, b.4, b.5]);
        let inter: f64 = (0..3).map(|k| overlap(lo_a[k], lo_a[k] + sa[k], lo_b[k], lo_b[k] + sb[k])).product();
        let expected = sa.iter().product::<f64>() + sb.iter().product::<f64>() - inter;
        let out = transformesh(&box_mesh(lo_a, sa).merged(&box_mesh(lo_b, sb)), &TransformeshOptions::default()).unwrap();
        prop_assert!((out.signed_volume().unwrap() - expected).abs() < 1e-6, "{} vs {}", out.signed_volume().unwrap(), expected);
    }

    #[test]
    fn valence_flips_never_raise_energy(seed in 0u64..500) {
        let m = transformesh(&fuzzed_surface(seed), &TransformeshOptions::default()).unwrap();
        let before = valence_energy(&m);
        let (flipped, flips) = optimize_valence(&m, false);
        let after = valence_energy(&flipped);
        prop_assert!(after <= before);
        prop_assert!(flips == 0 || after < before);
        prop_assert_eq!(flipped.num_faces(), m.num_faces());
    }
}
