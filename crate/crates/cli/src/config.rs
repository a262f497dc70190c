//! JSON experiment configuration and its translation to library types.

use std::collections::BTreeSet;

use aperlab::conv::{BiharmonicPart, Kernel};
use aperlab::model::{Evaluation, FnFunction, NuWeight, WindowRule};
use aperlab::pde::PdeFormula;
use aperlab::zoo::{self, SeriesTruncation, TrigPoly};
use aperlab::{CompactWindow, FunctionHandle, MetricSpec, Norm, Phi, Relation, SupBound, Weight};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

/// Operations invoked while running a command, reported in the JSON summary.
#[derive(Debug, Default)]
pub struct Ctx {
    pub ops: BTreeSet<&'static str>,
}

impl Ctx {
    pub fn op(&mut self, name: &'static str) {
        self.ops.insert(name);
    }
}

pub(crate) fn positive(path: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(path, format!("must be positive, got {x}")))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub relation: RelationSpec,
    #[serde(default)]
    pub metric: MetricConfig,
    pub eval: Option<EvalSection>,
    pub scan: Option<ScanSection>,
    pub recur: Option<RecurSection>,
    pub type1: Option<Type1Section>,
    pub group: Option<GroupSection>,
    pub normal: Option<NormalSection>,
    pub approx: Option<ApproxSection>,
    pub conv: Option<ConvSection>,
    pub pde: Option<PdeSection>,
    pub witness: Option<WitnessSection>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::invalid(if path == "." { "config" } else { &path }, e.into_inner())
        })
    }

    pub fn function(&self, ctx: &mut Ctx) -> Result<FunctionHandle, CliError> {
        match &self.function {
            Some(f) => f.build("function", ctx),
            None => Err(CliError::invalid("function", "missing")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    HarauxSouplet {
        tol: Option<f64>,
        term_cap: Option<usize>,
    },
    AitDadsPhi {
        tol: Option<f64>,
        term_cap: Option<usize>,
    },
    LevitanReciprocal,
    Nawrocki,
    KuchiC0 {
        n_max: usize,
    },
    /// Σ cⱼ e^{iλⱼ·t}; coefficients as [re, im]. `real` keeps Re only.
    TrigPoly {
        freqs: Vec<Vec<f64>>,
        coeffs: Vec<[f64; 2]>,
        #[serde(default)]
        real: bool,
    },
    HarauxSoupletPartial {
        terms: usize,
        #[serde(default)]
        real: bool,
    },
    AitDadsPartial {
        terms: usize,
        #[serde(default)]
        real: bool,
    },
    Tensor {
        factors: Vec<FunctionSpec>,
    },
    Constant {
        dim: usize,
        value: Vec<f64>,
    },
    Linear {
        a: f64,
        b: f64,
    },
}

fn truncation(path: &str, tol: Option<f64>, cap: Option<usize>) -> Result<SeriesTruncation, CliError> {
    let mut t = SeriesTruncation::default();
    if let Some(tol) = tol {
        positive(&format!("{path}.tol"), tol)?;
        t.tol = tol;
    }
    if let Some(cap) = cap {
        if cap == 0 {
            return Err(CliError::invalid(&format!("{path}.term_cap"), "must be at least 1"));
        }
        t.term_cap = cap;
    }
    Ok(t)
}

fn trig_handle(p: TrigPoly, real: bool) -> FunctionHandle {
    if real {
        p.real_handle("trig-poly")
    } else {
        p.handle("trig-poly")
    }
}

impl FunctionSpec {
    pub fn build(&self, path: &str, ctx: &mut Ctx) -> Result<FunctionHandle, CliError> {
        let core = |e| CliError::core(path, e);
        Ok(match self {
            FunctionSpec::HarauxSouplet { tol, term_cap } => {
                ctx.op("haraux_souplet");
                zoo::haraux_souplet(truncation(path, *tol, *term_cap)?)
            }
            FunctionSpec::AitDadsPhi { tol, term_cap } => {
                ctx.op("ait_dads_phi");
                zoo::ait_dads_phi(truncation(path, *tol, *term_cap)?)
            }
            FunctionSpec::LevitanReciprocal => {
                ctx.op("levitan_reciprocal");
                zoo::levitan_reciprocal()
            }
            FunctionSpec::Nawrocki => {
                ctx.op("nawrocki");
                zoo::nawrocki()
            }
            FunctionSpec::KuchiC0 { n_max } => {
                ctx.op("kuchi_c0");
                zoo::kuchi_c0(*n_max).map_err(|e| CliError::core(&format!("{path}.n_max"), e))?
            }
            FunctionSpec::TrigPoly { freqs, coeffs, real } => {
                ctx.op("trig_poly");
                let c = coeffs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                trig_handle(TrigPoly::new(freqs.clone(), c).map_err(core)?, *real)
            }
            FunctionSpec::HarauxSoupletPartial { terms, real } => {
                ctx.op("trig_poly");
                trig_handle(zoo::haraux_souplet_partial(*terms), *real)
            }
            FunctionSpec::AitDadsPartial { terms, real } => {
                ctx.op("trig_poly");
                trig_handle(zoo::ait_dads_partial(*terms), *real)
            }
            FunctionSpec::Tensor { factors } => {
                ctx.op("tensor_product");
                let hs = factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| f.build(&format!("{path}.factors[{i}]"), ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                zoo::tensor_product(hs).map_err(core)?
            }
            FunctionSpec::Constant { dim, value } => {
                if *dim == 0 || value.is_empty() {
                    return Err(CliError::invalid(path, "constant needs dim >= 1 and a nonempty value"));
                }
                zoo::constant(*dim, value.clone())
            }
            FunctionSpec::Linear { a, b } => zoo::linear(*a, *b),
        })
    }
}

/// Stacks scalar handles on a common domain into one vector-valued handle.
pub fn stack(parts: Vec<FunctionHandle>, name: &str) -> Result<FunctionHandle, String> {
    let dim = parts.first().map(|p| p.dim()).ok_or("no components")?;
    if parts.iter().any(|p| p.dim() != dim || p.codim() != 1) {
        return Err("components must be scalar functions on a common domain".into());
    }
    let bound = parts.iter().try_fold(0.0, |acc, p| match p.sup_bound() {
        SupBound::Bounded(m) => Some(acc + m),
        _ => None,
    });
    let k = parts.len();
    let f = FnFunction::new(dim, k, move |t: &[f64]| {
        let mut value = Vec::with_capacity(k);
        let mut err = 0.0;
        for p in &parts {
            let e = p.eval_checked(t).expect("component evaluable");
            value.push(e.value[0]);
            err += e.err;
        }
        Evaluation { value, err }
    });
    Ok(match bound {
        Some(b) => f.with_bound(SupBound::Bounded(b)).into_handle(name),
        None => f.into_handle(name),
    })
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RelationSpec {
    #[default]
    Identity,
    Zero,
    Shift(Vec<f64>),
    /// Shift by the function's own value at a point, e.g. φ(1).
    ShiftValueAt(Vec<f64>),
    Scale([f64; 2]),
    Linear(Vec<Vec<f64>>),
}

impl RelationSpec {
    pub fn build(&self, f: Option<&FunctionHandle>) -> Result<Relation, CliError> {
        Ok(match self {
            RelationSpec::Identity => Relation::Identity,
            RelationSpec::Zero => Relation::Zero,
            RelationSpec::Shift(b) => Relation::Shift(b.clone()),
            RelationSpec::ShiftValueAt(t) => {
                let f = f.ok_or_else(|| CliError::invalid("relation.shift-value-at", "needs a function"))?;
                Relation::Shift(f.eval(t).map_err(|e| CliError::core("relation.shift-value-at", e))?)
            }
            RelationSpec::Scale([re, im]) => Relation::Scale(Complex64::new(*re, *im)),
            RelationSpec::Linear(rows) => {
                let n = rows.len();
                let m = rows.first().map_or(0, |r| r.len());
                if n == 0 || rows.iter().any(|r| r.len() != m) {
                    return Err(CliError::invalid("relation.linear", "matrix rows must be nonempty and equally long"));
                }
                Relation::Linear(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
            }
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    #[serde(default)]
    pub phi: PhiSpec,
    #[serde(default)]
    pub weight: WeightSpec,
    #[serde(default)]
    pub norm: NormSpec,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiSpec {
    #[default]
    Identity,
    Arctan,
    Power(f64),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    #[default]
    One,
    /// N^exponent for windows inside [−N, N]ⁿ.
    HalfWidthPower(f64),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum NormSpec {
    #[default]
    Sup,
    L1,
    ArctanSup,
    /// sup ν‖·‖ with ν(t) = (1 + |t|)^power; bounded by 1 when power ≤ 0.
    WeightedSup { power: f64 },
}

impl MetricConfig {
    pub fn build(&self) -> Result<MetricSpec, CliError> {
        let phi = match self.phi {
            PhiSpec::Identity => Phi::Identity,
            PhiSpec::Arctan => Phi::Arctan,
            PhiSpec::Power(p) => Phi::Power(p),
        };
        let weight = match self.weight {
            WeightSpec::One => Weight::ConstOne,
            WeightSpec::HalfWidthPower(e) => Weight::ConstPerWindow(WindowRule::HalfWidthPower { exponent: e }),
        };
        let norm = match self.norm {
            NormSpec::Sup => Norm::Sup,
            NormSpec::L1 => Norm::L1,
            NormSpec::ArctanSup => Norm::ArctanSup,
            NormSpec::WeightedSup { power } => {
                let bound = (power <= 0.0).then_some(1.0);
                Norm::WeightedSup(NuWeight::new(
                    move |t| (1.0 + aperlab::model::norm(t)).powf(power),
                    bound,
                ))
            }
        };
        MetricSpec::new(phi, weight, norm).map_err(|e| CliError::core("metric", e))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Steps {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub bounds: Vec<[f64; 2]>,
    pub step: Steps,
}

impl WindowSpec {
    pub fn build(&self, path: &str) -> Result<CompactWindow, CliError> {
        let n = self.bounds.len();
        if n == 0 {
            return Err(CliError::invalid(&format!("{path}.bounds"), "needs at least one axis"));
        }
        let steps = match &self.step {
            Steps::One(h) => vec![*h; n],
            Steps::Many(v) => v.clone(),
        };
        if steps.len() != n {
            return Err(CliError::invalid(&format!("{path}.step"), "one step per axis"));
        }
        for h in &steps {
            positive(&format!("{path}.step"), *h)?;
        }
        for (i, [a, b]) in self.bounds.iter().enumerate() {
            if !(a <= b) {
                return Err(CliError::invalid(&format!("{path}.bounds[{i}]"), "lower bound exceeds upper bound"));
            }
        }
        CompactWindow::new(self.bounds.iter().map(|[a, b]| (*a, *b)).collect(), steps)
            .map_err(|e| CliError::core(path, e))
    }
}

fn pairs(v: &[[f64; 2]]) -> Vec<(f64, f64)> {
    v.iter().map(|[a, b]| (*a, *b)).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub window: WindowSpec,
    #[serde(default)]
    pub taus: Vec<Vec<f64>>,
    pub eps: Option<f64>,
    /// Second function for the windowed approximation error.
    pub reference: Option<FunctionSpec>,
    pub compose: Option<ComposeSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeSpec {
    pub map: LipschitzMapSpec,
    pub tau: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum LipschitzMapSpec {
    /// y ↦ ‖y‖.
    Norm,
    /// y ↦ c·y.
    Scale(f64),
    /// y ↦ atan(y) componentwise.
    Arctan,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub eps: f64,
    pub window: WindowSpec,
    pub range: Vec<[f64; 2]>,
    pub step: f64,
    pub budget: Option<usize>,
    /// Lipschitz constant of the defect integrand for the grid-gap correction.
    pub lipschitz: Option<f64>,
}

impl ScanSection {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("scan.eps", self.eps)?;
        positive("scan.step", self.step)?;
        if self.range.is_empty() {
            return Err(CliError::invalid("scan.range", "needs at least one axis"));
        }
        if let Some(b) = self.budget {
            if b == 0 {
                return Err(CliError::invalid("scan.budget", "must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn range(&self) -> Vec<(f64, f64)> {
        pairs(&self.range)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSeq {
    pub base: f64,
    pub from: i32,
    pub to: i32,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundSpec {
    /// π²(|a|+|b|)²/(3τ²) + π(|a|+|b|)/τ on a window [a, b].
    Rasx,
    /// π/(k+1) for τ = 2ᵏπ.
    HarauxSouplet,
    Constant { value: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurSection {
    pub taus: Option<Vec<Vec<f64>>>,
    pub powers: Option<PowerSeq>,
    pub windows: Vec<WindowSpec>,
    pub bound: Option<BoundSpec>,
    #[serde(default)]
    pub tol: f64,
}

impl RecurSection {
    pub fn taus(&self) -> Result<(Vec<Vec<f64>>, Vec<i32>), CliError> {
        match (&self.taus, &self.powers) {
            (Some(t), None) => Ok((t.clone(), (0..t.len() as i32).collect())),
            (None, Some(p)) => {
                positive("recur.powers.base", p.base)?;
                if p.to < p.from {
                    return Err(CliError::invalid("recur.powers.to", "must be >= from"));
                }
                let ks: Vec<i32> = (p.from..=p.to).collect();
                Ok((ks.iter().map(|k| vec![p.scale * p.base.powi(*k)]).collect(), ks))
            }
            _ => Err(CliError::invalid("recur", "give exactly one of taus or powers")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Type1Section {
    pub freqs: Vec<f64>,
    pub delta: f64,
    pub p_max: u64,
    #[serde(default)]
    pub eps: Vec<f64>,
    pub window: Option<WindowSpec>,
    #[serde(default = "default_max_candidates")]
    pub max_candidates: usize,
}

fn default_max_candidates() -> usize {
    1000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupScan {
    pub eta: f64,
    pub range: Vec<[f64; 2]>,
    pub step: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub eps: f64,
    pub window: WindowSpec,
    pub shifts: Option<Vec<Vec<f64>>>,
    pub from_scan: Option<GroupScan>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalSection {
    pub window: WindowSpec,
    pub shifts: Vec<Vec<f64>>,
    pub tol: f64,
    #[serde(default = "default_min_chain")]
    pub min_chain: usize,
}

fn default_min_chain() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrongSpec {
    pub polys: Vec<FunctionSpec>,
    pub windows: Vec<WindowSpec>,
    pub threshold: f64,
    /// Overrides the shared metric, e.g. for per-window weights.
    pub metric: Option<MetricConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxSection {
    pub window: WindowSpec,
    pub freqs: Vec<Vec<f64>>,
    pub threshold: Option<f64>,
    pub strong: Option<StrongSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    ExpMatrix { m: Vec<Vec<f64>>, omega: f64 },
    Gaussian { t: f64, n: usize },
    PoissonBiharmonic { n: usize, y: f64, part: PartSpec },
    Tabulated { nodes: Vec<f64>, values: Vec<f64>, envelope: Option<[f64; 2]> },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartSpec {
    Displacement,
    Normal,
}

impl KernelSpec {
    pub fn build(&self, path: &str) -> Result<Kernel, CliError> {
        let k = match self {
            KernelSpec::ExpMatrix { m, omega } => {
                let n = m.len();
                if n == 0 || m.iter().any(|r| r.len() != n) {
                    return Err(CliError::invalid(&format!("{path}.m"), "must be a nonempty square matrix"));
                }
                Kernel::ExpMatrix {
                    m: DMatrix::from_fn(n, n, |i, j| m[i][j]),
                    omega: *omega,
                }
            }
            KernelSpec::Gaussian { t, n } => Kernel::Gaussian { t: *t, n: *n },
            KernelSpec::PoissonBiharmonic { n, y, part } => Kernel::PoissonBiharmonic {
                n: *n,
                y: *y,
                part: match part {
                    PartSpec::Displacement => BiharmonicPart::Displacement,
                    PartSpec::Normal => BiharmonicPart::Normal,
                },
            },
            KernelSpec::Tabulated { nodes, values, envelope } => Kernel::Tabulated {
                nodes: nodes.clone(),
                values: values.clone(),
                envelope: envelope.map(|[c, k]| (c, k)),
            },
        };
        k.validate().map_err(|e| CliError::core(path, e))?;
        Ok(k)
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvMode {
    #[default]
    L1,
    Infinite,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSpec {
    pub tau: Vec<f64>,
    pub window: WindowSpec,
    pub enlarged: WindowSpec,
    #[serde(default = "default_prop_tol")]
    pub tol: f64,
}

fn default_prop_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvSection {
    pub kernel: KernelSpec,
    #[serde(default)]
    pub mode: ConvMode,
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    pub tail_tol: f64,
    pub propagation: Option<PropagationSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FormulaSpec {
    Heat {
        f: FunctionSpec,
        t: f64,
    },
    Dalembert {
        f: FunctionSpec,
        g: FunctionSpec,
        a: f64,
        t: f64,
    },
    Kirchhoff {
        g: FunctionSpec,
        grad_g: Option<Vec<FunctionSpec>>,
        h: FunctionSpec,
        d: f64,
        t: f64,
        #[serde(default = "default_resolution")]
        resolution: usize,
    },
    Poisson {
        g: FunctionSpec,
        grad_g: Option<Vec<FunctionSpec>>,
        h: FunctionSpec,
        d: f64,
        t: f64,
        #[serde(default = "default_resolution")]
        radial: usize,
        #[serde(default = "default_azimuthal")]
        azimuthal: usize,
    },
    Biharmonic {
        g0: FunctionSpec,
        g1: FunctionSpec,
        y: f64,
    },
}

fn default_resolution() -> usize {
    16
}

fn default_azimuthal() -> usize {
    32
}

fn gradient(
    path: &str,
    grad: &Option<Vec<FunctionSpec>>,
    ctx: &mut Ctx,
) -> Result<Option<FunctionHandle>, CliError> {
    let Some(parts) = grad else { return Ok(None) };
    let hs = parts
        .iter()
        .enumerate()
        .map(|(i, p)| p.build(&format!("{path}.grad_g[{i}]"), ctx))
        .collect::<Result<Vec<_>, _>>()?;
    stack(hs, "grad_g")
        .map(Some)
        .map_err(|m| CliError::invalid(&format!("{path}.grad_g"), m))
}

impl FormulaSpec {
    pub fn build(&self, path: &str, ctx: &mut Ctx) -> Result<PdeFormula, CliError> {
        let sub = |name: &str| format!("{path}.{name}");
        Ok(match self {
            FormulaSpec::Heat { f, t } => {
                positive(&sub("t"), *t)?;
                PdeFormula::Heat {
                    f: f.build(&sub("f"), ctx)?,
                    t: *t,
                }
            }
            FormulaSpec::Dalembert { f, g, a, t } => {
                positive(&sub("a"), *a)?;
                PdeFormula::DAlembert {
                    f: f.build(&sub("f"), ctx)?,
                    g: g.build(&sub("g"), ctx)?,
                    a: *a,
                    t: *t,
                }
            }
            FormulaSpec::Kirchhoff { g, grad_g, h, d, t, resolution } => {
                positive(&sub("d"), *d)?;
                positive(&sub("t"), *t)?;
                PdeFormula::Kirchhoff {
                    g: g.build(&sub("g"), ctx)?,
                    grad_g: gradient(path, grad_g, ctx)?,
                    h: h.build(&sub("h"), ctx)?,
                    d: *d,
                    t: *t,
                    resolution: *resolution,
                }
            }
            FormulaSpec::Poisson { g, grad_g, h, d, t, radial, azimuthal } => {
                positive(&sub("d"), *d)?;
                positive(&sub("t"), *t)?;
                PdeFormula::Poisson {
                    g: g.build(&sub("g"), ctx)?,
                    grad_g: gradient(path, grad_g, ctx)?,
                    h: h.build(&sub("h"), ctx)?,
                    d: *d,
                    t: *t,
                    radial: *radial,
                    azimuthal: *azimuthal,
                }
            }
            FormulaSpec::Biharmonic { g0, g1, y } => {
                positive(&sub("y"), *y)?;
                PdeFormula::Biharmonic {
                    g0: g0.build(&sub("g0"), ctx)?,
                    g1: g1.build(&sub("g1"), ctx)?,
                    y: *y,
                }
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualSpec {
    /// (x, t) where the stencil is centred.
    pub point: [f64; 2],
    pub steps: Vec<f64>,
    pub min_order: Option<f64>,
    pub max_residual: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSection {
    pub formula: FormulaSpec,
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    pub tol: f64,
    /// Expected values at `points`, checked to `tol`-scaled accuracy.
    pub expect: Option<Vec<f64>>,
    #[serde(default = "default_expect_tol")]
    pub expect_tol: f64,
    pub residual: Option<ResidualSpec>,
    pub propagation: Option<PropagationSpec>,
}

fn default_expect_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSection {
    pub omega: Vec<f64>,
    pub eta: f64,
    pub delta: f64,
    #[serde(rename = "box")]
    pub search_box: Vec<[f64; 2]>,
    pub step: f64,
    pub min_distance: Option<f64>,
}

impl WitnessSection {
    pub fn search_box(&self) -> Vec<(f64, f64)> {
        pairs(&self.search_box)
    }
}

impl GroupScan {
    pub fn range(&self) -> Vec<(f64, f64)> {
        pairs(&self.range)
    }
}
