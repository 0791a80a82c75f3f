//! Assembled operators of an enriched model.

use nalgebra::DVector;
use polyxfem::enrichment::{BasisOptions, CrackGeometry};
use polyxfem::geometry::Vec2;
use polyxfem::material::MaterialModel;
use polyxfem::mesh::{generate_voronoi_mesh, Domain, VoronoiOptions};
use polyxfem::solver::Model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cracked_model(material: MaterialModel) -> Model {
    let domain = Domain::rectangle(Vec2::zeros(), Vec2::new(2.0, 2.0));
    let mesh = generate_voronoi_mesh(&domain, &VoronoiOptions::new(60, 11)).unwrap();
    let crack = CrackGeometry::new(vec![Vec2::new(0.0, 1.03), Vec2::new(0.97, 1.08)]).unwrap();
    Model::new(mesh, Some(&crack), material, BasisOptions::default()).unwrap()
}

fn translation(model: &Model, t: Vec2) -> DVector<f64> {
    let mut v = DVector::zeros(model.n_dofs());
    for i in 0..model.mesh.num_nodes() {
        let [dx, dy] = model.map.standard_dofs(i);
        v[dx] = t.x;
        v[dy] = t.y;
    }
    v
}

fn random_state(model: &Model, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(model.n_dofs(), |_, _| rng.random_range(-0.01..0.01))
}

#[test]
fn rigid_translation_is_in_the_tangent_null_space() {
    for material in [
        MaterialModel::NeoHookeanCompressible {
            lambda: 1.5,
            mu: 1.0,
        },
        MaterialModel::MooneyRivlinPS {
            mu1: 1.0,
            mu2: -0.2,
            thickness: 1.0,
        },
    ] {
        let model = cracked_model(material);
        let u = random_state(&model, 1);
        let k = model.tangent(&u).unwrap();
        let f0 = model.internal_force(&u).unwrap();
        for t in [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)] {
            let v = translation(&model, t);
            let kv = k.mul_vec(&v);
            let scale = k.to_dense().norm() * v.norm();
            assert!(kv.norm() < 1e-10 * scale, "{}", kv.norm() / scale);
            let f1 = model.internal_force(&(&u + &v * 0.3)).unwrap();
            assert!((f1 - &f0).norm() < 1e-10 * f0.norm());
        }
    }
}

#[test]
fn tangent_is_symmetric() {
    let model = cracked_model(MaterialModel::NeoHookeanIncompressiblePS {
        mu: 1.0,
        thickness: 1.0,
    });
    let k = model.tangent(&random_state(&model, 2)).unwrap();
    assert!(k.asymmetry() < 1e-10);
}

#[test]
fn undeformed_state_is_stress_free() {
    let model = cracked_model(MaterialModel::NeoHookeanCompressible {
        lambda: 1.5,
        mu: 1.0,
    });
    let f = model
        .internal_force(&DVector::zeros(model.n_dofs()))
        .unwrap();
    assert!(f.amax() < 1e-14);
}
