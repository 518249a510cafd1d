use fneighbors::domains::{cube_boundary_cover, sample_sphere, three_arc_cover, SamplingScheme};
use fneighbors::geom::{dist, PointCloud};
use fneighbors::maps::{evaluate, random_map, Family, ImageSet, MapSpec};
use fneighbors::mu::delta_sweep;
use fneighbors::neighbors::{
    compute_df, disjoint_faces_check, neighbor_graph, neighbor_pairs, pair_is_neighbor_fast, pair_is_neighbor_oracle,
    witness_point, Verdict, Witness,
};
use fneighbors::Tolerances;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn subsample_graph_matches_oracle() {
    let tol = Tolerances::default();
    let d = sample_sphere(1, 512, 0, SamplingScheme::QuasiUniform).unwrap();
    let map = random_map(Family::CircleFourier, d.kind(), 2, 3, 3, 1.0).unwrap();
    let img = evaluate(&map, &d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut picked = sample(&mut rng, d.len(), 12).into_vec();
    picked.sort_unstable();
    let rows: Vec<&[f64]> = picked.iter().map(|&i| img.get(i)).collect();
    let sub = ImageSet::new(PointCloud::from_rows(&rows).unwrap());
    for a in 0..12 {
        for b in a + 1..12 {
            let oracle = pair_is_neighbor_oracle(a, b, &sub, &tol).unwrap().neighbor;
            let (v, _) = pair_is_neighbor_fast(a, b, &sub, None, &tol);
            assert_eq!(v == Verdict::Yes, oracle, "pair ({a}, {b}): fast {v:?}");
        }
    }
}

#[test]
fn concyclic_images_are_all_neighbors() {
    let tol = Tolerances::default();
    for n in [4, 64] {
        let d = sample_sphere(1, n, 0, SamplingScheme::QuasiUniform).unwrap();
        let img = evaluate(&MapSpec::identity(2), &d).unwrap();
        let pairs = neighbor_pairs(&neighbor_graph(&img, &d, &tol).unwrap());
        assert_eq!(pairs.len(), n * (n - 1) / 2);
        assert!((compute_df(&neighbor_graph(&img, &d, &tol).unwrap()) - 2.0).abs() < 1e-12);
    }
}

#[test]
fn hull_adjacent_pairs_are_neighbors() {
    // every hull edge has a supporting line
    let tol = Tolerances::default();
    let d = sample_sphere(1, 7, 0, SamplingScheme::QuasiUniform).unwrap();
    let map = MapSpec::new(Family::Affine, 2, vec![2.0, 0.3, 0.1, -0.2, 1.0, 0.4]).unwrap();
    let img = evaluate(&map, &d).unwrap();
    let certs = neighbor_graph(&img, &d, &tol).unwrap();
    let pairs = neighbor_pairs(&certs);
    // an affine image of the circle is an ellipse: hull order is angular order
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let t = |k: usize| d.sample(k)[1].atan2(d.sample(k)[0]);
        t(i).total_cmp(&t(j))
    });
    for k in 0..n {
        let (i, j) = (order[k], order[(k + 1) % n]);
        let (a, b) = (i.min(j), i.max(j));
        assert!(pairs.contains(&(a, b)), "hull edge ({a}, {b}) missing");
    }
}

#[test]
fn constant_map_witness_collapses() {
    let tol = Tolerances::default();
    let d = sample_sphere(1, 256, 0, SamplingScheme::QuasiUniform).unwrap();
    let cover = three_arc_cover(&d, 0.0).unwrap();
    let img = evaluate(&MapSpec::constant(&[0.25, -3.0]), &d).unwrap();
    let w = witness_point(&d, &cover, &img, &tol).unwrap();
    assert!(dist(&w.w, &[0.25, -3.0]) < 1e-9);
    assert!(w.radius < 1e-9 && w.residual < 1e-9);

    let certs = neighbor_graph(&img, &d, &tol).unwrap();
    assert_eq!(certs.len(), 1);
    assert_eq!(certs[0].witness, Witness::Coincidence);
    assert_eq!(compute_df(&certs), 2.0);
}

#[test]
fn three_arc_witness_for_seed_seven() {
    let tol = Tolerances::default();
    let d = sample_sphere(1, 2048, 0, SamplingScheme::QuasiUniform).unwrap();
    let cover = three_arc_cover(&d, 0.0).unwrap();
    let map = random_map(Family::CircleFourier, d.kind(), 2, 3, 7, 1.0).unwrap();
    let img = evaluate(&map, &d).unwrap();
    let w = witness_point(&d, &cover, &img, &tol).unwrap();
    assert!(w.found && w.residual <= 1e-3, "residual {}", w.residual);
    assert_eq!(w.chosen.len(), 3);
    for (k, &(element, i)) in w.chosen.iter().enumerate() {
        assert_eq!(element, k);
        assert!(cover.labels[i].contains(&element));
    }
    for a in 0..3 {
        for b in a + 1..3 {
            let (v, _) = pair_is_neighbor_fast(w.chosen[a].1, w.chosen[b].1, &img, Some(&d), &tol);
            assert_eq!(v, Verdict::Yes);
        }
    }
}

#[test]
fn square_boundary_under_identity() {
    let tol = Tolerances::default();
    let (d, cover, faces) = cube_boundary_cover(2, 512).unwrap();
    let img = evaluate(&MapSpec::identity(2), &d).unwrap();
    let r = disjoint_faces_check(&d, &cover, &faces, &img, &tol).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    assert_eq!(d.sample(r.near)[r.face], 0.0);
    assert_eq!(d.sample(r.far)[r.face], 1.0);
    // w sits in the hole; both points lie on the witness circle
    assert!(r.witness.w.iter().all(|&c| c > 0.0 && c < 1.0));
    for i in [r.near, r.far] {
        let gap = dist(img.get(i), &r.witness.w) - r.witness.radius;
        assert!(gap.abs() <= r.witness.threshold + 1e-9, "gap {gap}");
    }
}

#[test]
fn square_boundary_under_constant_map() {
    let tol = Tolerances::default();
    let (d, cover, faces) = cube_boundary_cover(2, 256).unwrap();
    let img = evaluate(&MapSpec::constant(&[1.0, 1.0]), &d).unwrap();
    let r = disjoint_faces_check(&d, &cover, &faces, &img, &tol).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    assert!(r.witness.radius < 1e-9);
    assert_eq!(r.certificate.unwrap().witness, Witness::Coincidence);
}

#[test]
fn square_boundary_projected_to_a_line() {
    let tol = Tolerances::default();
    let (d, cover, faces) = cube_boundary_cover(2, 1024).unwrap();
    let map = MapSpec::new(Family::Affine, 1, vec![1.0, 0.37, 0.0]).unwrap();
    let img = evaluate(&map, &d).unwrap();
    let r = disjoint_faces_check(&d, &cover, &faces, &img, &tol).unwrap();
    assert_eq!(r.verdict, Verdict::Yes);
    let j = r.face;
    assert_eq!(d.sample(r.near)[j], 0.0);
    assert_eq!(d.sample(r.far)[j], 1.0);
    // brute force: closest images across the opposite faces {x_j = 0}, {x_j = 1}
    let on = |v: f64| -> Vec<usize> { (0..d.len()).filter(|&i| d.sample(i)[j] == v).collect() };
    let (near, far) = (on(0.0), on(1.0));
    let mut best = f64::INFINITY;
    for &a in &near {
        for &b in &far {
            best = best.min((img.get(a)[0] - img.get(b)[0]).abs());
        }
    }
    let got = (img.get(r.near)[0] - img.get(r.far)[0]).abs();
    let mesh = d.mesh_size();
    assert!(got <= best + 2.0 * 1.37 * mesh, "pair gap {got}, best {best}");
}

#[test]
fn constant_map_sweep_reaches_antipodes() {
    let tol = Tolerances::default();
    let d = sample_sphere(1, 256, 0, SamplingScheme::QuasiUniform).unwrap();
    let h = delta_sweep(&d, &MapSpec::constant(&[0.0, 0.0]), 8, &tol).unwrap();
    assert_eq!(h.pairs, 256 * 255 / 2);
    assert!((h.max - 2.0).abs() < 1e-12);
    assert!(h.counts.iter().all(|&c| c > 0));
}
