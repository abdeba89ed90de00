mod common;

use common::c;
use polycond::condition::{cond_multiple, cond_simple};
use polycond::fixtures;
use polycond::pseudospectra::{contours, disc_deviation, grid_eval, GridBox};
use polycond::spectra::{cluster, eig_vectors, eigenvalues};

#[test]
fn multiple_eigenvalue_discs_grow_like_square_root() {
    let f = fixtures::p3();
    let d = f.multiple.clone().unwrap();
    let k_hat = cond_multiple(&f.poly, &f.weights, d.eigenvalue, &d.xhat, &d.yhat).unwrap();
    let grid = grid_eval(&f.poly, &f.weights, GridBox::new(0.9, 1.1, -0.1, 0.1).unwrap(), 401, 401).unwrap();
    let mut last = f64::INFINITY;
    for eps in [8e-4, 4e-4, 2e-4, 1e-4] {
        let cs = contours(&grid, eps);
        let predicted = (k_hat * eps).powf(1.0 / d.p0 as f64);
        let fit = cs.fit_radius(d.eigenvalue).unwrap();
        assert!((fit / predicted - 1.0).abs() <= 0.05, "eps {eps}: {fit} vs {predicted}");
        let dev = disc_deviation(&cs, d.eigenvalue, predicted).unwrap();
        if eps == 8e-4 {
            assert!(dev <= 0.05, "deviation {dev}");
        }
        assert!(dev <= last * 1.2, "eps {eps}: deviation {dev} after {last}");
        last = dev;
    }
}

#[test]
fn simple_eigenvalue_disc_radius() {
    let f = fixtures::p5();
    let z = c(4.0, 0.0);
    let v = eig_vectors(&f.poly, z).unwrap();
    let k = cond_simple(&f.poly, &f.weights, z, &v.x, &v.y).unwrap();
    let eps = 1e-4;
    let grid = grid_eval(&f.poly, &f.weights, GridBox::around(z, 4e-3).unwrap(), 401, 401).unwrap();
    let cs = contours(&grid, eps);
    let ratio = cs.fit_radius(z).unwrap() / (k * eps);
    assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
}

#[test]
fn component_count_bounded_by_distinct_eigenvalues() {
    let cases = [
        (fixtures::p3(), GridBox::new(-1.5, 1.5, -1.0, 1.0).unwrap(), vec![1e-4, 8e-4]),
        (fixtures::p4(), GridBox::new(-2.0, 1.0, -6.0, 6.0).unwrap(), vec![1e-3]),
        (fixtures::p5(), GridBox::new(0.0, 5.0, -1.0, 1.0).unwrap(), vec![1e-4]),
        (fixtures::p6(), GridBox::new(-1.5, 1.5, -1.0, 1.0).unwrap(), vec![1e-3, 0.3]),
    ];
    for (f, bbox, levels) in cases {
        let ev = eigenvalues(&f.poly).unwrap();
        let distinct = cluster(&ev, 1e-4).len();
        let grid = grid_eval(&f.poly, &f.weights, bbox, 201, 201).unwrap();
        for eps in levels {
            let n = grid.sublevel_components(eps);
            assert!(n <= distinct, "{} at {eps}: {n} components, {distinct} eigenvalues", f.name);
        }
    }
}

#[test]
fn sublevel_sets_are_nested() {
    let f = fixtures::p6();
    let grid = grid_eval(&f.poly, &f.weights, GridBox::new(-1.5, 1.5, -1.0, 1.0).unwrap(), 121, 81).unwrap();
    let levels = [1e-3, 1e-2, 0.1, 0.3];
    for pair in levels.windows(2) {
        let small = grid.sublevel_mask(pair[0]);
        let large = grid.sublevel_mask(pair[1]);
        assert!(small.iter().zip(&large).all(|(a, b)| !a || *b));
    }
}

#[test]
fn grid_layout_is_row_major_real_fastest() {
    let f = fixtures::p5();
    let bbox = GridBox::new(0.0, 2.0, -1.0, 1.0).unwrap();
    let grid = grid_eval(&f.poly, &f.weights, bbox, 3, 2).unwrap();
    assert_eq!(grid.node(1, 0), c(1.0, -1.0));
    assert_eq!(grid.node(0, 1), c(0.0, 1.0));
    assert_eq!(grid.values()[1], grid.value(1, 0));
    assert_eq!(grid.values()[3], grid.value(0, 1));
    assert!(grid.values().iter().all(|&v| v >= 0.0));
}

#[test]
fn contour_vertices_lie_on_the_level() {
    let f = fixtures::p3();
    let grid = grid_eval(&f.poly, &f.weights, GridBox::new(0.9, 1.1, -0.1, 0.1).unwrap(), 101, 101).unwrap();
    let eps = 4e-4;
    let cs = contours(&grid, eps);
    assert!(cs.components >= 1);
    // Linear interpolation error along an edge is bounded by the spread of g over the cell.
    let h = 0.2 / 100.0;
    for s in &cs.segments {
        let g = polycond::pseudospectra::pseudo_value(&f.poly, &f.weights, s.a);
        let ix = ((s.a.re - 0.9) / h).floor().clamp(0.0, 99.0) as usize;
        let iy = ((s.a.im + 0.1) / h).floor().clamp(0.0, 99.0) as usize;
        let corners = [grid.value(ix, iy), grid.value(ix + 1, iy), grid.value(ix, iy + 1), grid.value(ix + 1, iy + 1)];
        let spread = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - corners.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((g - eps).abs() <= spread + 1e-12, "g = {g}, spread {spread}");
    }
}
