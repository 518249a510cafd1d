use std::f64::consts::PI;

use fneighbors::cover::{
    build_partition, covering_radius, degree_estimate, domain_chain, h_map, project_to_sphere, Chain,
};
use fneighbors::domains::{sample_sphere, three_arc_cover, SampledDomain, SamplingScheme};
use fneighbors::geom::{
    angle_from_chord, angular_diameter, chord_from_angle, circumsphere, dekster_lhs, dist, min_enclosing_ball_angular,
    regular_edge_lengths, thm2_bound, PointCloud,
};
use fneighbors::maps::{evaluate, random_map, Family, ImageSet};
use fneighbors::neighbors::{
    compute_df, neighbor_graph, neighbor_pairs, pair_is_neighbor_fast, pair_is_neighbor_oracle, witness_point, Verdict,
};
use fneighbors::Tolerances;
use proptest::prelude::*;

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n > 1e-3).then(|| v.into_iter().map(|x| x / n).collect())
}

/// Points on Sⁿ within a cap of angular radius < π/2 around a random pole.
fn capped_set(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    let d = n + 1;
    (
        prop::collection::vec(-1.0..1.0f64, d),
        prop::collection::vec(prop::collection::vec(-1.0..1.0f64, d), 2..10),
        0.1..1.4f64,
    )
        .prop_filter_map("degenerate pole", move |(pole, dirs, cap)| {
            let pole = unit(pole)?;
            let pts: Vec<Vec<f64>> = dirs
                .into_iter()
                .filter_map(|v| {
                    // tangent component, scaled into the cap
                    let t: f64 = v.iter().zip(&pole).map(|(a, b)| a * b).sum();
                    let tan: Vec<f64> = v.iter().zip(&pole).map(|(a, b)| a - t * b).collect();
                    let tn = tan.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if tn < 1e-6 {
                        return None;
                    }
                    let ang = cap * (v[0].abs().min(1.0));
                    Some(
                        pole.iter()
                            .zip(&tan)
                            .map(|(p, q)| ang.cos() * p + ang.sin() * q / tn)
                            .collect(),
                    )
                })
                .collect();
            (pts.len() >= 2).then_some(pts)
        })
}

fn image_set(m: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, m), 3..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chord_angle_round_trip(theta in 0.0..=PI) {
        let back = angle_from_chord(chord_from_angle(theta).unwrap()).unwrap();
        prop_assert!((back - theta).abs() < 1e-7 || (theta - PI).abs() < 1e-6);
        let c = chord_from_angle(theta).unwrap();
        prop_assert!((chord_from_angle(angle_from_chord(c).unwrap()).unwrap() - c).abs() < 1e-12);
    }

    #[test]
    fn edge_lengths_are_consistent(n in 1usize..=50) {
        let (eu, a) = regular_edge_lengths(n).unwrap();
        prop_assert!((chord_from_angle(a).unwrap() - eu).abs() < 1e-12);
        // the triangle on S¹ attains the bound exactly; above that it is strict
        if n == 1 {
            prop_assert!((thm2_bound(1).unwrap() - eu).abs() < 1e-12);
        } else {
            prop_assert!(thm2_bound(n).unwrap() < eu);
        }
        prop_assert!(thm2_bound(n + 1).unwrap() < thm2_bound(n).unwrap());
        prop_assert!(thm2_bound(n).unwrap() > 1.0);
    }

    #[test]
    fn circumsphere_is_equidistant(pts in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 3), 2..=4)) {
        if let Ok(s) = circumsphere(&pts, 1e-9) {
            for p in &pts {
                let r = dist(p, s.center.coords());
                prop_assert!((r - s.radius).abs() <= 1e-6 * s.radius.max(1.0), "{r} vs {}", s.radius);
            }
        }
    }

    #[test]
    fn dekster_on_s2(q in capped_set(2)) {
        let (_, circ) = min_enclosing_ball_angular(&q, &Tolerances::default()).unwrap();
        prop_assert!(dekster_lhs(2, circ).unwrap() <= angular_diameter(&q) + 1e-6);
    }

    #[test]
    fn dekster_on_s3(q in capped_set(3)) {
        let (_, circ) = min_enclosing_ball_angular(&q, &Tolerances::default()).unwrap();
        prop_assert!(dekster_lhs(3, circ).unwrap() <= angular_diameter(&q) + 1e-6);
    }

    #[test]
    fn circle_circumradius_is_half_the_diameter(q in capped_set(1)) {
        let (_, circ) = min_enclosing_ball_angular(&q, &Tolerances::default()).unwrap();
        prop_assert!((2.0 * circ - angular_diameter(&q)).abs() <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_never_contradicts_oracle(m in 2usize..=3, rows in image_set(3, 12), a in 0usize..12, b in 0usize..12) {
        let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r[..m].to_vec()).collect();
        let n = rows.len();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let img = ImageSet::new(PointCloud::from_rows(&rows).unwrap());
        let tol = Tolerances::default();
        let oracle = pair_is_neighbor_oracle(a, b, &img, &tol).unwrap();
        let (v, cert) = pair_is_neighbor_fast(a, b, &img, None, &tol);
        match v {
            Verdict::Yes => {
                prop_assert!(oracle.neighbor);
                prop_assert!(cert.unwrap().verify(&img, &tol));
            }
            Verdict::No => prop_assert!(!oracle.neighbor),
            Verdict::Uncertain => {}
        }
    }

    #[test]
    fn adding_points_only_removes_neighbors(rows in image_set(2, 10), extra in image_set(2, 4)) {
        let tol = Tolerances::default();
        let small = ImageSet::new(PointCloud::from_rows(&rows).unwrap());
        let mut all = rows.clone();
        all.extend(extra);
        let big = ImageSet::new(PointCloud::from_rows(&all).unwrap());
        for a in 0..rows.len() {
            for b in a + 1..rows.len() {
                let in_big = pair_is_neighbor_oracle(a, b, &big, &tol).unwrap().neighbor;
                let in_small = pair_is_neighbor_oracle(a, b, &small, &tol).unwrap().neighbor;
                prop_assert!(!in_big || in_small, "({a}, {b})");
            }
        }
    }

    #[test]
    fn graph_certificates_are_sound(seed in 0u64..1000, k in 1usize..=4) {
        let d = sample_sphere(1, 256, 0, SamplingScheme::QuasiUniform).unwrap();
        let map = random_map(Family::CircleFourier, d.kind(), 2, k, seed, 1.0).unwrap();
        let img = evaluate(&map, &d).unwrap();
        let tol = Tolerances::default();
        let certs = neighbor_graph(&img, &d, &tol).unwrap();
        for c in &certs {
            prop_assert!(c.verify(&img, &tol));
            prop_assert!(c.slack >= -tol.eps_inside * img.images.extent());
        }
        // D_f is the largest ρ over certified pairs
        let df = compute_df(&certs);
        let brute = neighbor_pairs(&certs)
            .into_iter()
            .map(|(i, j)| d.intrinsic_dist(i, j))
            .fold(0.0, f64::max);
        prop_assert!((df - brute).abs() < 1e-12);
        prop_assert!(df >= thm2_bound(1).unwrap() - fneighbors::maps::delta_allowance(&d, &img));
    }

    #[test]
    fn winding_of_a_loop_and_its_reverse_cancels(steps in prop::collection::vec(-1.2..1.2f64, 8..64)) {
        let mut t = 0.0;
        let mut pts = Vec::new();
        for s in &steps {
            t += s;
            pts.push(vec![t.cos(), t.sin()]);
        }
        let there = Chain::Loop(pts.clone());
        let mut both = pts.clone();
        both.extend(pts.into_iter().rev());
        let a = degree_estimate(&there, 1);
        let b = degree_estimate(&Chain::Loop(both), 1).unwrap();
        prop_assert_eq!(b.degree, 0);
        if let Ok(a) = a {
            let r = degree_estimate(&there.reversed(), 1).unwrap();
            prop_assert!((a.raw_sum + r.raw_sum).abs() < 1e-9);
        }
    }

    #[test]
    fn mesh_orientation_flip_negates_degree(seed in 0u64..500, flip in 0usize..3) {
        let d = sample_sphere(2, 300, seed, SamplingScheme::UniformRandom).unwrap();
        // identity, optionally composed with a reflection
        let vals: Vec<Vec<f64>> = (0..d.len())
            .map(|i| {
                let mut p = d.sample(i).to_vec();
                p[flip] = -p[flip];
                p
            })
            .collect();
        let chain = domain_chain(&d, vals).unwrap();
        let e = degree_estimate(&chain, 2).unwrap();
        let r = degree_estimate(&chain.reversed(), 2).unwrap();
        prop_assert_eq!(e.degree, -1);
        prop_assert_eq!(r.degree, -e.degree);
        prop_assert!((r.raw_sum + e.raw_sum).abs() < 1e-9);
    }

    #[test]
    fn partition_sums_to_one_and_lands_on_the_boundary(phase in 0.0..(2.0 * PI), frac in 0.2..0.9f64) {
        let d = sample_sphere(1, 512, 0, SamplingScheme::QuasiUniform).unwrap();
        let cover = three_arc_cover(&d, phase).unwrap();
        let r = frac * covering_radius(&d, &cover).unwrap();
        let pou = build_partition(&d, &cover, r).unwrap();
        for v in &pou.values {
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(v.iter().all(|&x| x >= 0.0));
        }
        let h = h_map(&pou).unwrap();
        prop_assert!(h.iter().all(|p| p.iter().copied().fold(f64::INFINITY, f64::min) <= 1e-9));
        // class does not depend on the thickening
        let e = degree_estimate(&domain_chain(&d, project_to_sphere(&h).unwrap()).unwrap(), 1).unwrap();
        prop_assert_eq!(e.degree.abs(), 1);
    }
}

#[test]
fn witness_residual_does_not_grow_with_density() {
    let tol = Tolerances::default();
    let map = random_map(
        Family::CircleFourier,
        fneighbors::domains::DomainKind::Sphere(1),
        2,
        3,
        7,
        1.0,
    )
    .unwrap();
    let residual = |n: usize| {
        let d: SampledDomain = sample_sphere(1, n, 0, SamplingScheme::QuasiUniform).unwrap();
        let cover = three_arc_cover(&d, 0.0).unwrap();
        let img = evaluate(&map, &d).unwrap();
        witness_point(&d, &cover, &img, &tol).unwrap().residual
    };
    let mut prev = residual(256);
    for n in [512, 1024, 2048] {
        let r = residual(n);
        assert!(r <= 2.0 * prev + 1e-12, "N = {n}: {r} after {prev}");
        prev = r;
    }
}

#[test]
fn evaluation_is_pure() {
    let d = sample_sphere(2, 500, 3, SamplingScheme::UniformRandom).unwrap();
    let map = random_map(Family::SphereHarmonic, d.kind(), 3, 2, 11, 1.0).unwrap();
    assert_eq!(evaluate(&map, &d).unwrap(), evaluate(&map, &d).unwrap());
}
