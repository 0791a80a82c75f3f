//! Randomized invariants.

use nalgebra::Matrix2;
use polyxfem::basis::mean_value_grad;
use polyxfem::cli::bench::bundled;
use polyxfem::cli::config::MaterialConfig;
use polyxfem::cli::RunConfig;
use polyxfem::geometry::{self, Vec2};
use polyxfem::material::MaterialModel;
use polyxfem::mesh::{generate_voronoi_mesh, io, Domain, VoronoiOptions};
use proptest::prelude::*;

/// Star-shaped polygon from angular jitters and radii.
fn polygon(jitter: &[f64], radii: &[f64]) -> Vec<Vec2> {
    let n = jitter.len();
    (0..n)
        .map(|k| {
            let th = std::f64::consts::TAU * (k as f64 + 0.5 + jitter[k]) / n as f64;
            Vec2::new(th.cos(), th.sin()) * radii[k]
        })
        .collect()
}

fn polygon_strategy() -> impl Strategy<Value = Vec<Vec2>> {
    (3usize..=10).prop_flat_map(|n| {
        (
            prop::collection::vec(-0.2..0.2f64, n),
            prop::collection::vec(0.5..1.0f64, n),
        )
            .prop_map(|(j, r)| polygon(&j, &r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mean_value_coordinates_reproduce_linear_fields(ring in polygon_strategy(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        // a point on a segment from the kernel centre towards a vertex pair
        let n = ring.len();
        let k = ((a * n as f64) as usize).min(n - 1);
        let p = (ring[k] * (1.0 - b) + ring[(k + 1) % n] * b) * 0.9;
        prop_assume!(geometry::distance_to_boundary(&p, &ring) > 1e-6);
        let s = mean_value_grad(&ring, &p).unwrap();
        prop_assert!((s.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // weights are positive wherever the polygon is convex
        let convex = (0..n).all(|i| {
            let (a, b, c) = (ring[i], ring[(i + 1) % n], ring[(i + 2) % n]);
            (b - a).perp(&(c - b)) > 0.0
        });
        prop_assert!(!convex || s.values.iter().all(|v| *v > 0.0));
        let x = ring.iter().zip(&s.values).fold(Vec2::zeros(), |acc, (v, w)| acc + v * *w);
        prop_assert!((x - p).norm() < 1e-12);
        let gsum = s.grads.iter().fold(Vec2::zeros(), |acc, g| acc + g);
        prop_assert!(gsum.norm() < 1e-9 * s.grads.iter().map(|g| g.norm()).fold(0.0, f64::max));
    }

    #[test]
    fn hole_subtraction_conserves_area(cx in -0.5..1.5f64, cy in -0.5..1.5f64, r in 0.05..0.8f64) {
        let square = geometry::rectangle(Vec2::zeros(), Vec2::new(1.0, 1.0));
        let hole = geometry::circle_polygon(Vec2::new(cx, cy), r, 16);
        let pieces = geometry::subtract_convex(&square, &hole);
        let kept: f64 = pieces.iter().map(|p| geometry::signed_area(p)).sum();
        let removed = geometry::signed_area(&geometry::clip_convex(&square, &hole));
        prop_assert!(pieces.iter().all(|p| geometry::signed_area(p) > 0.0));
        prop_assert!((kept + removed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stress_is_objective(f in prop::array::uniform4(-0.3..0.3f64), angle in 0.0..std::f64::consts::TAU) {
        let f = Matrix2::identity() + Matrix2::new(f[0], f[1], f[2], f[3]);
        prop_assume!(f.determinant() > 0.3);
        let (s, c) = angle.sin_cos();
        let q = Matrix2::new(c, -s, s, c);
        for m in [
            MaterialModel::NeoHookeanCompressible { lambda: 2.0, mu: 1.0 },
            MaterialModel::NeoHookeanIncompressiblePS { mu: 1.0, thickness: 1.0 },
            MaterialModel::MooneyRivlinPS { mu1: 1.0, mu2: -0.15, thickness: 1.0 },
        ] {
            let a = m.evaluate(&f).unwrap();
            let b = m.evaluate(&(q * f)).unwrap();
            prop_assert!((b.sigma - q * a.sigma * q.transpose()).abs().max() < 1e-10 * (1.0 + a.sigma.abs().max()));
            prop_assert!(a.energy >= -1e-14);
        }
    }

    #[test]
    fn config_round_trips(n_steps in 1usize..100, tol in 1e-6..0.5f64, seed in 0u64..1000, mu in 1e3..1e7f64) {
        let mut c = bundled("edge_crack_square").unwrap();
        c.loading.n_steps = n_steps;
        c.solver.tol = tol;
        c.mesh.rng_seed = seed;
        c.material = MaterialConfig::NeoHookeanPs { mu, thickness: 1.0 };
        let again = RunConfig::parse(&c.to_toml(), "again.toml").unwrap();
        prop_assert_eq!(again, c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn voronoi_meshes_tile_the_domain_and_round_trip(seed in 0u64..10_000, n in 5usize..80) {
        let domain = Domain::rectangle(Vec2::zeros(), Vec2::new(3.0, 2.0));
        let mesh = generate_voronoi_mesh(&domain, &VoronoiOptions::new(n, seed)).unwrap();
        mesh.validate().unwrap();
        prop_assert!((mesh.total_area() - 6.0).abs() < 1e-9);
        let back = io::from_str(&io::to_string(&mesh)).unwrap();
        prop_assert_eq!(back, mesh);
    }
}
