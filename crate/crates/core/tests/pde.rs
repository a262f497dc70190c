use std::f64::consts::PI;

use aperlab::model::{Evaluation, FnFunction, SupBound};
use aperlab::pde::{
    biharmonic_halfspace, dalembert, heat_apply, kirchhoff3d, pde_propagation_check, poisson2d,
    residual_check, PdeFormula, PdeKind,
};
use aperlab::quad::{DiskRule, SphereRule};
use aperlab::zoo::{self, SeriesTruncation};
use aperlab::{CompactWindow, Error, FunctionHandle, MetricSpec};

fn scalar(name: &str, m: Option<f64>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> FunctionHandle {
    let h = FnFunction::new(1, 1, move |t: &[f64]| Evaluation::exact(vec![f(t[0])]));
    match m {
        Some(m) => h.with_bound(SupBound::Bounded(m)).into_handle(name),
        None => h.into_handle(name),
    }
}

fn field(
    name: &str,
    dim: usize,
    codim: usize,
    f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
) -> FunctionHandle {
    FnFunction::new(dim, codim, move |t: &[f64]| Evaluation::exact(f(t)))
        .with_bound(SupBound::Bounded(10.0))
        .into_handle(name)
}

#[test]
fn heat_examples() {
    let c = zoo::constant(1, vec![2.5]);
    assert!((heat_apply(&c, 0.3, &[1.0], 1e-10).unwrap().value[0] - 2.5).abs() < 1e-9);
    let cos = scalar("cos", Some(1.0), f64::cos);
    for i in 0..50 {
        let x = -10.0 + 0.4 * i as f64;
        let v = heat_apply(&cos, 1.0, &[x], 1e-9).unwrap();
        assert!((v.value[0] - (-1.0f64).exp() * x.cos()).abs() < 1e-6);
    }
    assert!(matches!(
        heat_apply(&zoo::linear(1.0, 0.0), 1.0, &[0.0], 1e-8),
        Err(Error::Precondition(_))
    ));
    // G(s)G(t) = G(s+t)
    let inner = cos.clone();
    let gt = scalar("G(0.5)cos", Some(1.0), move |x| heat_apply(&inner, 0.5, &[x], 1e-9).unwrap().value[0]);
    for &x in &[0.0, 1.3, -4.0] {
        let a = heat_apply(&gt, 0.25, &[x], 1e-8).unwrap().value[0];
        let b = heat_apply(&cos, 0.75, &[x], 1e-9).unwrap().value[0];
        assert!((a - b).abs() < 1e-5);
    }
}

#[test]
fn dalembert_examples() {
    let zero = zoo::constant(1, vec![0.0]);
    let id = zoo::linear(1.0, 0.0);
    let u = dalembert(&id, &zero, 3.0, 0.7, 2.0, 1e-12).unwrap();
    assert!((u.value - 0.7).abs() < 1e-14);
    let c = zoo::constant(1, vec![1.5]);
    let u = dalembert(&zero, &c, 2.0, -1.0, 0.8, 1e-12).unwrap();
    assert!((u.value - 1.5 * 0.8).abs() < 1e-12);
    let cos = scalar("cos", Some(1.0), f64::cos);
    for &(x, t) in &[(0.3, 0.2), (-2.0, 1.7), (5.0, 3.3)] {
        let u = dalembert(&cos, &zero, 1.0, x, t, 1e-12).unwrap();
        assert!((u.value - x.cos() * t.cos()).abs() < 1e-14);
    }
}

fn linear_g(v: [f64; 3], n: usize) -> (FunctionHandle, FunctionHandle) {
    let g = field("v.x", n, 1, move |x| vec![x.iter().zip(&v).map(|(a, b)| a * b).sum()]);
    let grad = field("v", n, n, move |_| v[..n].to_vec());
    (g, grad)
}

#[test]
fn kirchhoff_calibrations() {
    let rule = SphereRule::new(3, 16).unwrap();
    let zero3 = zoo::constant(3, vec![0.0]);
    let zero_grad = zoo::constant(3, vec![0.0; 3]);
    let x = [0.4, -1.2, 2.0];
    let c = zoo::constant(3, vec![1.7]);
    let u = kirchhoff3d(&c, &zero_grad, &zero3, 2.0, &x, 0.9, &rule).unwrap();
    assert!((u.value - 1.7).abs() < 1e-12);
    let u = kirchhoff3d(&zero3, &zero_grad, &c, 2.0, &x, 0.9, &rule).unwrap();
    assert!((u.value - 1.7 * 0.9).abs() < 1e-12);
    let (g, grad) = linear_g([0.5, -2.0, 1.0], 3);
    let u = kirchhoff3d(&g, &grad, &zero3, 1.5, &x, 1.1, &rule).unwrap();
    assert!((u.value - (0.2 + 2.4 + 2.0)).abs() < 1e-12);
    // g = cos(x₁), h = 0, d = 1 is solved by cos(x₁)cos(t)
    let g = field("cos x1", 3, 1, |x| vec![x[0].cos()]);
    let grad = field("grad cos x1", 3, 3, |x| vec![-x[0].sin(), 0.0, 0.0]);
    let t: f64 = 0.8;
    let u = kirchhoff3d(&g, &grad, &zero3, 1.0, &x, t, &rule).unwrap();
    assert!((u.value - x[0].cos() * t.cos()).abs() < 1e-10);
}

#[test]
fn poisson_calibrations() {
    let rule = DiskRule::new(16, 32).unwrap();
    let zero2 = zoo::constant(2, vec![0.0]);
    let zero_grad = zoo::constant(2, vec![0.0; 2]);
    let x = [0.3, -0.8];
    let c = zoo::constant(2, vec![-0.6]);
    let u = poisson2d(&c, &zero_grad, &zero2, 1.0, &x, 2.0, &rule).unwrap();
    assert!((u.value + 0.6).abs() < 1e-12);
    let u = poisson2d(&zero2, &zero_grad, &c, 1.0, &x, 2.0, &rule).unwrap();
    assert!((u.value + 1.2).abs() < 1e-12);
    let (g, grad) = linear_g([1.5, 2.0, 0.0], 2);
    let u = poisson2d(&g, &grad, &zero2, 3.0, &x, 0.5, &rule).unwrap();
    assert!((u.value - (0.45 - 1.6)).abs() < 1e-12);
}

#[test]
fn inconsistent_gradient_rejected() {
    let rule = SphereRule::new(3, 4).unwrap();
    let zero3 = zoo::constant(3, vec![0.0]);
    let (g, _) = linear_g([1.0, 1.0, 1.0], 3);
    let wrong = field("wrong", 3, 3, |_| vec![1.0, 1.0, 1.2]);
    assert!(matches!(
        kirchhoff3d(&g, &wrong, &zero3, 1.0, &[0.0; 3], 1.0, &rule),
        Err(Error::GradientConsistency { .. })
    ));
    let (g2, _) = linear_g([1.0, 1.0, 0.0], 2);
    let wrong2 = field("wrong", 2, 2, |_| vec![0.0, 1.0]);
    let zero2 = zoo::constant(2, vec![0.0]);
    assert!(matches!(
        poisson2d(&g2, &wrong2, &zero2, 1.0, &[0.0; 2], 1.0, &DiskRule::new(4, 8).unwrap()),
        Err(Error::GradientConsistency { .. })
    ));
}

#[test]
fn biharmonic_examples() {
    let one = zoo::constant(1, vec![1.0]);
    let zero = zoo::constant(1, vec![0.0]);
    for &y in &[0.1, 1.0, 7.5] {
        let u = biharmonic_halfspace(&one, &zero, &[0.3], y, 1e-8).unwrap();
        assert!((u.value - 1.0).abs() < 1e-6, "y={y}");
        // ∫_{-A}^{A} y²/(π(ξ²+y²)) dξ = (2y/π)·atan(A/y) → y
        let mass = (2.0 * y / PI) * (1e12 / y).atan();
        let u = biharmonic_halfspace(&zero, &one, &[0.3], y, 1e-8).unwrap();
        assert!((u.value - mass).abs() < 1e-6, "y={y}");
    }
    let odd = scalar("tanh", Some(1.0), f64::tanh);
    let u = biharmonic_halfspace(&odd, &zero, &[0.0], 0.7, 1e-8).unwrap();
    assert!(u.value.abs() < 1e-12);
    // higher dimensions keep the unit mass
    for n in 2..=3 {
        let one = zoo::constant(n, vec![1.0]);
        let zero = zoo::constant(n, vec![0.0]);
        let u = biharmonic_halfspace(&one, &zero, &vec![0.2; n], 0.5, 1e-6).unwrap();
        assert!((u.value - 1.0).abs() < 1e-5, "n={n}");
    }
    assert!(matches!(
        biharmonic_halfspace(&one, &zero, &[0.0], 0.0, 1e-8),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn residuals() {
    let wave = |x: f64, t: f64| Ok(x.cos() * t.cos());
    assert!(residual_check(wave, PdeKind::Wave { a: 1.0 }, 0.4, 0.9, 1e-2).unwrap().abs() <= 1e-4);
    let flat = |_: f64, _: f64| Ok(3.0);
    assert!(residual_check(flat, PdeKind::Heat, 0.0, 1.0, 1e-2).unwrap().abs() <= 1e-12);

    let cos = scalar("cos", Some(1.0), f64::cos);
    let tol = 1e-12;
    let heat = |x: f64, t: f64| Ok(heat_apply(&cos, t, &[x], tol)?.value[0]);
    let h = 1e-2;
    let r = residual_check(heat, PdeKind::Heat, 0.5, 1.0, h).unwrap();
    assert!(r.abs() <= 4.0 * tol / (h * h) + h * h, "{r}");
    assert!(matches!(
        residual_check(heat, PdeKind::Heat, 0.5, 0.005, h),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn dalembert_residual_order() {
    let f = FnFunction::new(1, 1, |t: &[f64]| Evaluation::exact(vec![(1.5 * t[0]).cos() + 0.5 * t[0].sin()]))
        .with_bound(SupBound::Bounded(1.5))
        .into_handle("f");
    let g = FnFunction::new(1, 1, |t: &[f64]| Evaluation::exact(vec![(0.7 * t[0]).sin()]))
        .with_bound(SupBound::Bounded(1.0))
        .into_handle("g");
    let u = |x: f64, t: f64| Ok(dalembert(&f, &g, 2.0, x, t, 1e-14)?.value);
    let r: Vec<f64> = [1e-1, 5e-2, 2.5e-2]
        .iter()
        .map(|&h| residual_check(u, PdeKind::Wave { a: 2.0 }, 0.3, 1.2, h).unwrap().abs())
        .collect();
    for p in r.windows(2) {
        assert!((p[0] / p[1]).log2() >= 1.9, "{r:?}");
    }
}

#[test]
fn propagation_examples() {
    let tol = 1e-9;
    let sup = MetricSpec::sup();
    let cos = scalar("cos", Some(1.0), f64::cos);
    let zero = zoo::constant(1, vec![0.0]);
    let w = CompactWindow::interval(0.0, 5.0, 0.05).unwrap();
    let big = CompactWindow::interval(-2.0, 7.0, 0.05).unwrap();
    let dal = PdeFormula::DAlembert { f: cos.clone(), g: zero, a: 1.0, t: 1.0 };
    let r = pde_propagation_check(&dal, &[2.0 * PI], &w, &big, &sup, tol).unwrap();
    assert!(r.lhs.value < 1e-12);
    assert!(r.holds(1e-6));

    let hs = zoo::haraux_souplet(SeriesTruncation::default());
    let w = CompactWindow::interval(0.0, 10.0, 0.1).unwrap();
    let big = CompactWindow::interval(-10.0, 20.0, 0.05).unwrap();
    let heat = PdeFormula::Heat { f: hs, t: 1.0 };
    let r = pde_propagation_check(&heat, &[256.0 * PI], &w, &big, &sup, tol).unwrap();
    assert!(r.holds(1e-6), "{r:?}");
    assert_eq!(r.data[0].mass, 1.0);

    let c = zoo::tensor_product(vec![cos.clone(), cos.clone(), cos.clone()]).unwrap();
    let grad = field("grad", 3, 3, |x| {
        let (s, c): (Vec<f64>, Vec<f64>) = x.iter().map(|v| v.sin_cos()).unzip();
        vec![-s[0] * c[1] * c[2], -c[0] * s[1] * c[2], -c[0] * c[1] * s[2]]
    });
    let zero3 = zoo::constant(3, vec![0.0]);
    let w3 = CompactWindow::cube(3, 0.0, 1.0, 0.5).unwrap();
    let big3 = CompactWindow::cube(3, -1.0, 2.0, 0.25).unwrap();
    let kir = PdeFormula::Kirchhoff {
        g: c,
        grad_g: Some(grad),
        h: zero3.clone(),
        d: 1.0,
        t: 0.5,
        resolution: 12,
    };
    let tau = [2.0 * PI, -2.0 * PI, 4.0 * PI];
    let r = pde_propagation_check(&kir, &tau, &w3, &big3, &sup, tol).unwrap();
    assert!(r.lhs.value <= r.lhs.certified_slack + 1e-10, "{r:?}");
    assert!(r.holds(1e-6));

    let bi = PdeFormula::Biharmonic { g0: cos.clone(), g1: cos, y: 0.5 };
    let w = CompactWindow::interval(0.0, 1.0, 0.1).unwrap();
    let big = CompactWindow::interval(-50.0, 51.0, 0.05).unwrap();
    let r = pde_propagation_check(&bi, &[2.0 * PI], &w, &big, &sup, 1e-5).unwrap();
    assert!(r.holds(1e-6), "{r:?}");

    // missing gradient
    let g = field("g", 3, 1, |_| vec![0.0]);
    let kir = PdeFormula::Kirchhoff { g, grad_g: None, h: zero3, d: 1.0, t: 0.5, resolution: 4 };
    assert!(matches!(
        pde_propagation_check(&kir, &tau, &w3, &big3, &sup, tol),
        Err(Error::Config(_))
    ));
    // the enlarged window must cover the dependence domain
    let dal = PdeFormula::DAlembert { f: zoo::constant(1, vec![0.0]), g: zoo::constant(1, vec![0.0]), a: 1.0, t: 3.0 };
    let w = CompactWindow::interval(0.0, 1.0, 0.1).unwrap();
    let big = CompactWindow::interval(-2.0, 3.0, 0.1).unwrap();
    assert!(matches!(pde_propagation_check(&dal, &[1.0], &w, &big, &sup, tol), Err(Error::Config(_))));
}
