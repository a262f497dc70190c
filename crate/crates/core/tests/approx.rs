use std::f64::consts::PI;

use aperlab::approx::{fit_trig_poly, levitan_strong_approx_check};
use aperlab::metric::approx_error;
use aperlab::model::WindowRule;
use aperlab::zoo::{self, ait_dads_partial, haraux_souplet_partial, SeriesTruncation, TrigPoly};
use aperlab::{CompactWindow, MetricSpec, Weight};
use num_complex::Complex64;

fn hs_freqs(m: usize) -> Vec<Vec<f64>> {
    let mut f = vec![vec![0.0]];
    for k in 1..=m {
        let l = 2f64.powi(1 - k as i32);
        f.push(vec![l]);
        f.push(vec![-l]);
    }
    f
}

#[test]
fn exact_representation_recovered() {
    let freqs = vec![vec![0.0], vec![1.0], vec![2f64.sqrt()], vec![-0.5]];
    let coeffs = vec![
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, -2.0),
        Complex64::new(-0.3, 0.7),
        Complex64::new(0.0, 1.5),
    ];
    let f = zoo::trig_poly(freqs.clone(), coeffs.clone()).unwrap();
    let w = CompactWindow::interval(-6.0, 6.0, 0.05).unwrap();
    let r = fit_trig_poly(&f, &w, &freqs, &MetricSpec::sup()).unwrap();
    for (a, b) in r.poly.coeffs().iter().zip(&coeffs) {
        assert!((a - b).norm() < 1e-10);
    }
    assert!(r.residual.value < 1e-10);

    // refitting the fit reproduces it
    let again = fit_trig_poly(&r.handle(2), &w, &freqs, &MetricSpec::sup()).unwrap();
    for (a, b) in again.poly.coeffs().iter().zip(r.poly.coeffs()) {
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn haraux_souplet_fit_beats_dropped_tail() {
    let f = zoo::haraux_souplet(SeriesTruncation::default());
    let w = CompactWindow::interval(-8.0, 8.0, 0.01).unwrap();
    let r = fit_trig_poly(&f, &w, &hs_freqs(6), &MetricSpec::sup()).unwrap();
    // dropped terms m > 6 on |t| ≤ 8: (1/m) sin²(t/2^m) ≤ (1/m)(8/2^m)²
    let tail: f64 = (7..200).map(|m| 64.0 * 4f64.powi(-m) / m as f64).sum();
    let partial = haraux_souplet_partial(6).real_handle("hs6");
    let analytic = approx_error(&f, &partial, &w, &MetricSpec::sup()).unwrap();
    assert!(analytic.value <= tail);
    assert!(r.residual.value <= tail, "{} > {tail}", r.residual.value);
    let l1 = fit_trig_poly(&f, &w, &hs_freqs(6), &MetricSpec::l1()).unwrap();
    assert!(l1.residual.value <= tail * w.volume());
}

#[test]
fn nested_frequency_sets_do_not_increase_l2_residual() {
    let f = zoo::haraux_souplet(SeriesTruncation::default());
    let w = CompactWindow::interval(-8.0, 8.0, 0.02).unwrap();
    let l2 = |m: usize| {
        let r = fit_trig_poly(&f, &w, &hs_freqs(m), &MetricSpec::sup()).unwrap();
        let p = r.handle(1);
        let mut s = 0.0;
        for i in 0..=800 {
            let t = -8.0 + i as f64 * 0.02;
            s += (f.eval_scalar(t).unwrap() - p.eval_scalar(t).unwrap()).powi(2);
        }
        s
    };
    let mut prev = f64::INFINITY;
    for m in 1..=6 {
        let v = l2(m);
        assert!(v <= prev * (1.0 + 1e-9) + 1e-20, "m={m}");
        prev = v;
    }
}

#[test]
fn constant_fit() {
    let f = zoo::constant(1, vec![5.0]);
    let w = CompactWindow::interval(0.0, 3.0, 0.1).unwrap();
    let r = fit_trig_poly(&f, &w, &[vec![0.0]], &MetricSpec::sup()).unwrap();
    assert!((r.poly.coeffs()[0].re - 5.0).abs() < 1e-12);
    assert!(r.residual.value < 1e-12);
    let c = &r.coefficients()[0];
    assert_eq!((c.freq.clone(), c.im), (vec![0.0], 0.0));
}

#[test]
fn strong_approximation_tables() {
    let p = TrigPoly::from_scalar(&[1.0, -0.5], vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]).unwrap();
    let h = p.handle("p");
    let w = CompactWindow::interval(-3.0, 3.0, 0.05).unwrap();
    let t = levitan_strong_approx_check(&h, &[h.clone(), h.clone(), h.clone()], &[w], &MetricSpec::sup(), 1e-12).unwrap();
    assert!(t.pass);
    assert!(t.errors.iter().flatten().all(|d| d.value == 0.0));

    // Haraux–Souplet partial sums under the per-window weight N^{-2-ε₀}
    let eps0 = 0.1;
    let f = zoo::haraux_souplet(SeriesTruncation::default());
    let polys: Vec<_> = (1..=10).map(|m| haraux_souplet_partial(m).real_handle("hs")).collect();
    let ns = [2.0, 8.0, 32.0];
    let windows: Vec<CompactWindow> = ns.iter().map(|&n| CompactWindow::interval(-n, n, 0.01).unwrap()).collect();
    let spec = MetricSpec::sup().with_weight(Weight::ConstPerWindow(WindowRule::HalfWidthPower { exponent: -2.0 - eps0 }));
    let t = levitan_strong_approx_check(&f, &polys, &windows, &spec, 0.05).unwrap();
    for (k, row) in t.errors.iter().enumerate() {
        let m_terms = k + 1;
        for (j, &n) in ns.iter().enumerate() {
            // Σ_{m>M} (1/m) min(1, N²/4^m), weighted
            let env: f64 = (m_terms + 1..400)
                .map(|m| (1.0 / m as f64) * (n * n * 4f64.powi(-(m as i32))).min(1.0))
                .sum::<f64>()
                * n.powf(-2.0 - eps0);
            assert!(row[j].value <= env + 1e-12, "M={m_terms} N={n}: {} > {env}", row[j].value);
        }
    }
    assert!(t.monotone.iter().all(|m| *m));
    assert!(t.pass);

    // Ait Dads partial sums against π²·max(|a|,|b|)²·4^{-M}/3
    let phi = zoo::ait_dads_phi(SeriesTruncation::default());
    let polys: Vec<_> = (1..=12).map(|m| ait_dads_partial(m).real_handle("phi")).collect();
    let windows = [CompactWindow::interval(0.0, 1.0, 1e-3).unwrap(), CompactWindow::interval(-3.0, 2.0, 1e-3).unwrap()];
    let t = levitan_strong_approx_check(&phi, &polys, &windows, &MetricSpec::sup(), 1e-4).unwrap();
    for (k, row) in t.errors.iter().enumerate() {
        let m = (k + 1) as i32;
        for (j, r) in [1.0f64, 3.0].iter().enumerate() {
            let env = PI * PI * r * r * 4f64.powi(-m) / 3.0;
            assert!(row[j].value <= env + 1e-12);
        }
    }
    assert!(t.pass);
}
