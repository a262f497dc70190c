use std::f64::consts::PI;

use aperlab::conv::{infinite_convolution, l1_convolution, propagation_check, ConvOptions, Kernel};
use aperlab::model::{Evaluation, FnFunction, NuWeight, SupBound};
use aperlab::zoo::{self, SeriesTruncation};
use aperlab::{CompactWindow, Error, FunctionHandle, MetricSpec, Norm, Relation};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bounded(name: &str, m: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> FunctionHandle {
    FnFunction::new(1, 1, move |t: &[f64]| Evaluation::exact(vec![f(t[0])]))
        .with_bound(SupBound::Bounded(m))
        .into_handle(name)
}

fn cos() -> FunctionHandle {
    bounded("cos", 1.0, f64::cos)
}

#[test]
fn exponential_kernel_basics() {
    let k = Kernel::exp_identity(1, 1.0);
    let opts = ConvOptions::new(1e-10);
    let c = zoo::constant(1, vec![3.5]);
    let v = infinite_convolution(&k, &c, 0.7, opts).unwrap();
    assert!((v.value[0] - 3.5).abs() < 1e-9);

    let f = cos();
    for i in 0..100 {
        let t = -20.0 + 0.4 * i as f64;
        let v = infinite_convolution(&k, &f, t, opts).unwrap();
        let exact = (t.cos() + t.sin()) / 2.0;
        assert!((v.value[0] - exact).abs() < 1e-8, "t={t}");
        assert!(v.err < 1e-8);
    }
}

#[test]
fn exponential_kernel_on_haraux_souplet() {
    let k = Kernel::exp_identity(1, 1.0);
    let f = zoo::haraux_souplet(SeriesTruncation::default());
    let tol = 1e-8;
    let v = infinite_convolution(&k, &f, 0.0, ConvOptions::new(tol)).unwrap();
    // composite Simpson on [0, 60]; tail beyond is below e^{-60}(4/3 + log2(61)) ~ 1e-25
    let n = 60_000;
    let h = 60.0 / n as f64;
    let g = |s: f64| (-s).exp() * f.eval_scalar(-s).unwrap();
    let mut sum = g(0.0) + g(60.0);
    for i in 1..n {
        sum += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let oracle = sum * h / 3.0;
    assert!((v.value[0] - oracle).abs() <= tol + v.err + 1e-10, "{} vs {oracle}", v.value[0]);
}

#[test]
fn unbounded_data_rejected() {
    let k = Kernel::exp_identity(1, 1.0);
    let lin = zoo::linear(1.0, 0.0);
    assert!(matches!(
        infinite_convolution(&k, &lin, 0.0, ConvOptions::new(1e-8)),
        Err(Error::Precondition(_))
    ));
    let g = Kernel::Gaussian { t: 1.0, n: 1 };
    assert!(matches!(
        infinite_convolution(&g, &cos(), 0.0, ConvOptions::new(1e-8)),
        Err(Error::Config(_))
    ));
}

#[test]
fn linearity() {
    let k = Kernel::exp_identity(1, 0.5);
    let opts = ConvOptions::new(1e-9);
    let (a, b) = (1.7, -0.4);
    let f = bounded("f", 1.0, |t| (2.0 * t).sin());
    let g = bounded("g", 1.0, |t| (0.3 * t).cos());
    let h = bounded("h", 2.1, move |t| a * (2.0 * t).sin() + b * (0.3 * t).cos());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let t = rng.gen_range(-50.0..50.0);
        let cf = infinite_convolution(&k, &f, t, opts).unwrap().value[0];
        let cg = infinite_convolution(&k, &g, t, opts).unwrap().value[0];
        let ch = infinite_convolution(&k, &h, t, opts).unwrap().value[0];
        assert!((ch - a * cf - b * cg).abs() <= 2.0 * opts.tail_tol * (1.0 + a.abs() + b.abs()));
    }
}

#[test]
fn gaussian_identities() {
    let g = Kernel::Gaussian { t: 1.0, n: 1 };
    let opts = ConvOptions::new(1e-9);
    let one = zoo::constant(1, vec![1.0]);
    assert!((l1_convolution(&g, &one, &[0.3], opts).unwrap().value[0] - 1.0).abs() < 1e-8);
    for i in 0..20 {
        let x = -5.0 + 0.5 * i as f64;
        let v = l1_convolution(&g, &cos(), &[x], opts).unwrap().value[0];
        assert!((v - (-1.0f64).exp() * x.cos()).abs() < 1e-6);
    }
    let odd = bounded("tanh", 1.0, f64::tanh);
    assert!(l1_convolution(&g, &odd, &[0.0], opts).unwrap().value[0].abs() < 1e-12);

    // two-dimensional heat kernel on cos(x₁)cos(x₂): factor e^{-2t}
    let g2 = Kernel::Gaussian { t: 0.5, n: 2 };
    let c2 = FnFunction::new(2, 1, |t: &[f64]| Evaluation::exact(vec![t[0].cos() * t[1].cos()]))
        .with_bound(SupBound::Bounded(1.0))
        .into_handle("cc");
    let v = l1_convolution(&g2, &c2, &[0.4, -1.0], ConvOptions::new(1e-7)).unwrap();
    assert!((v.value[0] - (-1.0f64).exp() * 0.4f64.cos() * 1.0f64.cos()).abs() < 1e-6);
}

#[test]
fn gaussian_semigroup() {
    let opts = ConvOptions::new(1e-8);
    let (s, t) = (0.4, 0.7);
    let inner = Kernel::Gaussian { t, n: 1 };
    let f = cos();
    let gt = FnFunction::new(1, 1, move |x: &[f64]| {
        let v = l1_convolution(&inner, &f, x, opts).expect("bounded data");
        Evaluation { value: v.value, err: v.err }
    })
    .with_bound(SupBound::Bounded(1.0))
    .into_handle("G(t)cos");
    let outer = Kernel::Gaussian { t: s, n: 1 };
    let both = Kernel::Gaussian { t: s + t, n: 1 };
    for &x in &[0.0, 0.9, -2.3] {
        let a = l1_convolution(&outer, &gt, &[x], opts).unwrap().value[0];
        let b = l1_convolution(&both, &cos(), &[x], opts).unwrap().value[0];
        assert!((a - b).abs() < 1e-5);
    }
}

#[test]
fn biharmonic_and_tabulated_kernels() {
    use aperlab::conv::BiharmonicPart;
    let k = Kernel::PoissonBiharmonic { n: 1, y: 0.8, part: BiharmonicPart::Displacement };
    assert_eq!(k.l1_norm(), 1.0);
    // tail bound dominates the numerically integrated mass beyond a
    let a = 5.0;
    let mut beyond = 0.0;
    let h = 0.01;
    for i in 0..200_000 {
        let x = a + (i as f64 + 0.5) * h;
        beyond += 2.0 * k.scalar_at(&[x]) * h;
    }
    assert!(beyond <= k.tail(a));

    let tab = Kernel::Tabulated { nodes: vec![0.0, 1.0, 2.0], values: vec![1.0, 1.0, 0.0], envelope: None };
    let one = zoo::constant(1, vec![2.0]);
    let v = infinite_convolution(&tab, &one, 0.0, ConvOptions::new(1e-12)).unwrap();
    assert!((v.value[0] - 3.0).abs() < 1e-12);
}

#[test]
fn propagation_configurations() {
    let opts = ConvOptions::new(1e-9);
    // exact period
    let e = zoo::trig_poly(vec![vec![1.0]], vec![Complex64::new(1.0, 0.0)]).unwrap();
    let k2 = Kernel::exp_identity(2, 1.0);
    let w = CompactWindow::interval(0.0, 5.0, 0.1).unwrap();
    let big = CompactWindow::interval(-30.0, 5.0, 0.1).unwrap();
    let r = propagation_check(&k2, &e, &Relation::Identity, &[2.0 * PI], &w, &big, &MetricSpec::sup(), opts).unwrap();
    assert!(r.lhs.value < 1e-7);
    assert!(r.holds(1e-6));
    assert!(r.data_defect.value < 1e-12);

    // Haraux–Souplet along 2⁸π
    let k1 = Kernel::exp_identity(1, 1.0);
    let hs = zoo::haraux_souplet(SeriesTruncation::default());
    let w = CompactWindow::interval(0.0, 10.0, 0.1).unwrap();
    let big = CompactWindow::interval(-30.0, 10.0, 0.1).unwrap();
    let tau = [256.0 * PI];
    let r = propagation_check(&k1, &hs, &Relation::Identity, &tau, &w, &big, &MetricSpec::sup(), opts).unwrap();
    assert!(r.holds(1e-6), "{r:?}");
    let growth = (4.0 / 3.0 + (1.0 + 10.0 + tau[0] + 30.0f64).ln() / 2f64.ln()) * 2.0;
    assert!(r.lhs.value <= PI / 9.0 + growth * (-30.0f64).exp() + r.lhs.certified_slack);

    // Ait Dads φ with the shift relation under the heat kernel
    let phi = zoo::ait_dads_phi(SeriesTruncation::default());
    let phi1 = phi.eval_scalar(1.0).unwrap();
    let g = Kernel::Gaussian { t: 1.0, n: 1 };
    let w = CompactWindow::interval(0.0, 1.0, 0.05).unwrap();
    let big = CompactWindow::interval(-10.0, 11.0, 0.01).unwrap();
    let r = propagation_check(&g, &phi, &Relation::Shift(vec![phi1]), &[1024.0], &w, &big, &MetricSpec::sup(), opts).unwrap();
    assert!(r.holds(1e-6), "{r:?}");
    let ab = 21.0;
    let rasx = PI * PI * ab * ab * 4f64.powi(-10) / 3.0 + PI * ab * 2f64.powi(-10);
    assert!(r.data_defect.value <= rasx);
}

#[test]
fn propagation_rejections() {
    let opts = ConvOptions::new(1e-8);
    let e = zoo::trig_poly(vec![vec![1.0]], vec![Complex64::new(1.0, 0.0)]).unwrap();
    let w = CompactWindow::interval(0.0, 1.0, 0.1).unwrap();
    let big = CompactWindow::interval(-5.0, 1.0, 0.1).unwrap();
    let unbounded_nu = MetricSpec::sup().with_norm(Norm::WeightedSup(NuWeight::new(|t| 1.0 + t[0] * t[0], None)));
    let k = Kernel::exp_identity(2, 1.0);
    assert!(matches!(
        propagation_check(&k, &e, &Relation::Identity, &[1.0], &w, &big, &unbounded_nu, opts),
        Err(Error::Config(_))
    ));
    // enlarged window must contain the window
    assert!(matches!(
        propagation_check(&k, &e, &Relation::Identity, &[1.0], &big, &w, &MetricSpec::sup(), opts),
        Err(Error::Config(_))
    ));
    // a rotation kernel does not commute with a non-normal linear map
    let rot = Kernel::ExpMatrix { m: DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]), omega: 1.0 };
    let a = Relation::Linear(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
    assert!(matches!(
        propagation_check(&rot, &e, &a, &[1.0], &w, &big, &MetricSpec::sup(), opts),
        Err(Error::Config(_))
    ));
    // shifts only pass through unit-mass kernels
    let k2 = Kernel::exp_identity(2, 2.0);
    assert!(matches!(
        propagation_check(&k2, &e, &Relation::Shift(vec![1.0, 0.0]), &[1.0], &w, &big, &MetricSpec::sup(), opts),
        Err(Error::Config(_))
    ));
}
