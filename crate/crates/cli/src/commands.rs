//! One runner per command: build inputs, call the library, tabulate.

use std::f64::consts::PI;

use aperlab::approx::{fit_trig_poly, levitan_strong_approx_check};
use aperlab::conv::{infinite_convolution, l1_convolution, propagation_check, ConvOptions};
use aperlab::detect::{
    bogolyubov_witness, check_group_structure, is_type1_shift, is_witness, lattice_distance,
    levitan_type1_candidates, normality_probe, relative_density, scan_almost_periods,
    verify_recurrence, DensityVerdict, ScanOptions,
};
use aperlab::metric::{approx_error, lipschitz_compose_check, windowed_defect, DefectOptions, LipschitzMap};
use aperlab::pde::{dalembert, heat_apply, pde_propagation_check, residual_check, PdeFormula, PdeKind};
use aperlab::{apply_relation, eval_checked, make_grid, par, Error};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{
    positive, BoundSpec, Config, ConvMode, Ctx, LipschitzMapSpec, PropagationSpec,
};
use crate::report::{columns, floats, Cell, Table};
use crate::CliError;

type Out = Result<(bool, Map<String, Value>, Vec<Table>), CliError>;

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref().ok_or_else(|| CliError::invalid(name, "section missing"))
}

fn err(path: &'static str) -> impl Fn(Error) -> CliError {
    move |e| CliError::core(path, e)
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn header(parts: &[Vec<String>]) -> Vec<String> {
    parts.concat()
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

pub fn eval(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.eval, "eval")?;
    let f = cfg.function(ctx)?;
    let rho = cfg.relation.build(Some(&f))?;
    let spec = cfg.metric.build()?;
    let w = s.window.build("eval.window")?;
    if let Some(e) = s.eps {
        positive("eval.eps", e)?;
    }

    ctx.op("make_grid");
    ctx.op("eval_checked");
    ctx.op("apply_relation");
    let grid = make_grid(&w, f.domain()).map_err(err("eval.window"))?;
    let rows = par::try_map_indexed(grid.len(), |i| -> aperlab::Result<_> {
        let t = grid.point(i);
        let (v, e) = eval_checked(&f, &t)?;
        let r = apply_relation(&rho, &v)?;
        Ok((t, v, e, r))
    })
    .map_err(err("eval"))?;
    let (n, m) = (f.dim(), f.codim());
    let mut table = Table::with_header(
        "",
        header(&[columns("t", n), columns("f", m), names(&["err"]), columns("rho_f", m)]),
    );
    let mut max_err: f64 = 0.0;
    let mut sup: f64 = 0.0;
    for (t, v, e, r) in &rows {
        max_err = max_err.max(*e);
        sup = sup.max(aperlab::model::norm(v));
        let mut row = floats(t);
        row.extend(floats(v));
        row.push(Cell::F(*e));
        row.extend(floats(r));
        table.push(row);
    }
    let mut tables = vec![table];
    let mut result = Map::new();
    result.insert("points".into(), json!(rows.len()));
    result.insert("max_err".into(), json!(max_err));
    result.insert("grid_sup_norm".into(), json!(sup));
    let mut pass = true;

    if !s.taus.is_empty() {
        ctx.op("windowed_defect");
        let mut dt = Table::with_header(
            "defects",
            header(&[columns("tau", n), names(&["defect", "slack", "grid_limited", "accepted"])]),
        );
        let mut list = Vec::new();
        for tau in &s.taus {
            let d = windowed_defect(&f, &rho, tau, &w, &spec).map_err(err("eval.taus"))?;
            let accepted = s.eps.map(|e| d.accepts(e));
            pass &= accepted.unwrap_or(true);
            let mut row = floats(tau);
            row.extend([
                Cell::F(d.value),
                Cell::F(d.certified_slack),
                Cell::B(d.grid_limited),
                accepted.map_or(Cell::Empty, Cell::B),
            ]);
            dt.push(row);
            list.push(json!({ "tau": tau, "defect": to_json(&d), "accepted": accepted }));
        }
        result.insert("defects".into(), Value::from(list));
        tables.push(dt);
    }

    if let Some(r) = &s.reference {
        let g = r.build("eval.reference", ctx)?;
        ctx.op("approx_error");
        let d = approx_error(&f, &g, &w, &spec).map_err(err("eval.reference"))?;
        result.insert("approx_error".into(), to_json(&d));
    }

    if let Some(c) = &s.compose {
        let h = match c.map {
            LipschitzMapSpec::Norm => LipschitzMap::new(1, 1.0, true, |y| vec![aperlab::model::norm(y)]),
            LipschitzMapSpec::Scale(k) => LipschitzMap::new(m, k.abs(), true, move |y| y.iter().map(|v| k * v).collect()),
            LipschitzMapSpec::Arctan => LipschitzMap::new(m, 1.0, false, |y| y.iter().map(|v| v.atan()).collect()),
        };
        ctx.op("lipschitz_compose_check");
        let (left, right) = lipschitz_compose_check(&f, &h, &rho, &c.tau, &w).map_err(err("eval.compose"))?;
        let holds = left.value <= right.value + left.certified_slack + right.certified_slack;
        pass &= holds;
        result.insert(
            "compose".into(),
            json!({ "left": to_json(&left), "right": to_json(&right), "holds": holds }),
        );
    }
    Ok((pass, result, tables))
}

pub fn scan(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.scan, "scan")?;
    s.validate()?;
    let f = cfg.function(ctx)?;
    let rho = cfg.relation.build(Some(&f))?;
    let spec = cfg.metric.build()?;
    let w = s.window.build("scan.window")?;
    let mut opts = ScanOptions::default();
    if let Some(b) = s.budget {
        opts.budget = b;
    }
    opts.defect = DefectOptions {
        integrand_lipschitz: s.lipschitz,
    };
    ctx.op("scan_almost_periods");
    let r = scan_almost_periods(&f, &rho, s.eps, &w, &spec, &s.range(), s.step, opts).map_err(err("scan"))?;
    ctx.op("relative_density");
    let density = match relative_density(&r) {
        Ok((l, dense)) => json!({ "l": l, "dense": dense }),
        Err(Error::NoPeriods) => Value::Null,
        Err(e) => return Err(CliError::core("scan", e)),
    };
    let n = s.range.len();
    let mut table = Table::with_header("", header(&[columns("tau", n), names(&["defect", "slack", "accepted"])]));
    for e in &r.entries {
        let mut row = floats(&e.tau);
        row.extend([Cell::F(e.defect), Cell::F(e.slack), Cell::B(e.accepted)]);
        table.push(row);
    }
    let mut result = Map::new();
    result.insert("eps".into(), json!(r.eps));
    result.insert("verdict".into(), to_json(&r.verdict));
    result.insert("max_gap".into(), json!(r.max_gap));
    result.insert("truncated".into(), json!(r.truncated));
    result.insert("scanned".into(), json!(r.entries.len()));
    result.insert("accepted".into(), json!(r.accepted().count()));
    result.insert("relative_density".into(), density);
    Ok((r.verdict == DensityVerdict::DenseWithinRange, result, vec![table]))
}

fn bound_value(b: &BoundSpec, tau: &[f64], w: &aperlab::CompactWindow) -> Result<f64, CliError> {
    let t = aperlab::model::norm(tau);
    Ok(match b {
        BoundSpec::Rasx => {
            if w.dim() != 1 {
                return Err(CliError::invalid("recur.bound", "rasx bound is one-dimensional"));
            }
            let ab = w.lo()[0].abs() + w.hi()[0].abs();
            PI * PI * ab * ab / (3.0 * t * t) + PI * ab / t
        }
        BoundSpec::HarauxSouplet => PI / ((t / PI).log2() + 1.0),
        BoundSpec::Constant { value } => *value,
    })
}

pub fn recur(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.recur, "recur")?;
    let (taus, ks) = s.taus()?;
    if s.windows.is_empty() {
        return Err(CliError::invalid("recur.windows", "needs at least one window"));
    }
    let windows = s
        .windows
        .iter()
        .enumerate()
        .map(|(j, w)| w.build(&format!("recur.windows[{j}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let f = cfg.function(ctx)?;
    let rho = cfg.relation.build(Some(&f))?;
    let spec = cfg.metric.build()?;
    ctx.op("verify_recurrence");
    let table = verify_recurrence(&f, &rho, &taus, &windows, &spec).map_err(err("recur"))?;

    let n = f.dim();
    let mut out = Table::with_header(
        "",
        header(&[
            names(&["k", "window"]),
            columns("tau", n),
            names(&["defect", "slack", "bound", "within"]),
        ]),
    );
    let mut pass = true;
    let mut worst_ratio: f64 = 0.0;
    for (i, row) in table.defects.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            let bound = match &s.bound {
                Some(b) => Some(bound_value(b, &taus[i], &windows[j])?),
                None => None,
            };
            let within = bound.map(|b| d.value <= b + s.tol);
            if let Some(b) = bound {
                worst_ratio = worst_ratio.max(d.value / b);
            }
            pass &= within.unwrap_or(true);
            let mut r = vec![Cell::from(ks[i]), Cell::from(j)];
            r.extend(floats(&taus[i]));
            r.extend([
                Cell::F(d.value),
                Cell::F(d.certified_slack),
                Cell::from(bound),
                within.map_or(Cell::Empty, Cell::B),
            ]);
            out.push(r);
        }
    }
    let mut result = Map::new();
    result.insert("uniform_tail".into(), json!(table.uniform_tail()));
    result.insert("shifts".into(), json!(taus.len()));
    result.insert("windows".into(), json!(table.windows));
    if s.bound.is_some() {
        result.insert("worst_defect_to_bound".into(), json!(worst_ratio));
    }
    Ok((pass, result, vec![out]))
}

pub fn type1(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.type1, "type1")?;
    positive("type1.delta", s.delta)?;
    for (i, e) in s.eps.iter().enumerate() {
        positive(&format!("type1.eps[{i}]"), *e)?;
    }
    ctx.op("levitan_type1_candidates");
    let mut cands = levitan_type1_candidates(&s.freqs, s.delta, s.p_max).map_err(err("type1"))?;
    cands.sort_by(f64::total_cmp);
    cands.truncate(s.max_candidates);
    let verified: Vec<bool> = cands.iter().map(|t| is_type1_shift(&s.freqs, s.delta, *t)).collect();

    let defects = match &s.window {
        Some(ws) => {
            let w = ws.build("type1.window")?;
            let f = cfg.function(ctx)?;
            let rho = cfg.relation.build(Some(&f))?;
            let spec = cfg.metric.build()?;
            ctx.op("windowed_defect");
            Some(
                par::try_map_slice(&cands, |t| windowed_defect(&f, &rho, &[*t], &w, &spec))
                    .map_err(err("type1"))?,
            )
        }
        None => None,
    };
    let mut table = Table::new("", &["tau", "tau_over_2pi", "type1", "defect", "slack"]);
    for (i, t) in cands.iter().enumerate() {
        let d = defects.as_ref().map(|d| &d[i]);
        table.push(vec![
            Cell::F(*t),
            Cell::F(t / (2.0 * PI)),
            Cell::B(verified[i]),
            Cell::from(d.map(|d| d.value)),
            Cell::from(d.map(|d| d.certified_slack)),
        ]);
    }
    let mut pass = !cands.is_empty() && verified.iter().all(|v| *v);
    let mut best = Vec::new();
    if let Some(ds) = &defects {
        for e in &s.eps {
            let hit = cands.iter().zip(ds).find(|(_, d)| d.value <= *e);
            pass &= hit.is_some();
            best.push(match hit {
                Some((t, d)) => json!({ "eps": e, "tau": t, "tau_over_2pi": t / (2.0 * PI), "defect": d.value }),
                None => json!({ "eps": e, "tau": null }),
            });
        }
    }
    let mut result = Map::new();
    result.insert("candidates".into(), json!(cands.len()));
    result.insert("all_reverified".into(), json!(verified.iter().all(|v| *v)));
    result.insert("best".into(), Value::from(best));
    Ok((pass, result, vec![table]))
}

pub fn group(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.group, "group")?;
    positive("group.eps", s.eps)?;
    let f = cfg.function(ctx)?;
    let rho = cfg.relation.build(Some(&f))?;
    let spec = cfg.metric.build()?;
    let w = s.window.build("group.window")?;
    let set = match (&s.shifts, &s.from_scan) {
        (Some(v), None) => v.clone(),
        (None, Some(g)) => {
            positive("group.from_scan.eta", g.eta)?;
            positive("group.from_scan.step", g.step)?;
            ctx.op("scan_almost_periods");
            scan_almost_periods(&f, &rho, g.eta, &w, &spec, &g.range(), g.step, ScanOptions::default())
                .map_err(err("group.from_scan"))?
                .accepted_taus()
        }
        _ => return Err(CliError::invalid("group", "give exactly one of shifts or from_scan")),
    };
    ctx.op("check_group_structure");
    let v = check_group_structure(&set, &f, &rho, s.eps, &w, &spec).map_err(err("group"))?;
    let mut table = Table::with_header("", columns("tau", f.dim()));
    for t in &set {
        table.push(floats(t));
    }
    let mut result = Map::new();
    result.insert("set_size".into(), json!(set.len()));
    result.insert("verdict".into(), to_json(&v));
    Ok((v.pass, result, vec![table]))
}

pub fn normal(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.normal, "normal")?;
    positive("normal.tol", s.tol)?;
    let f = cfg.function(ctx)?;
    let spec = cfg.metric.build()?;
    let w = s.window.build("normal.window")?;
    ctx.op("normality_probe");
    let chain = normality_probe(&f, &s.shifts, &w, &spec, s.tol).map_err(err("normal"))?;
    let mut table = Table::new("", &["i", "j", "distance"]);
    for (i, row) in chain.pairwise.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            table.push(vec![Cell::from(i), Cell::from(j), Cell::F(*d)]);
        }
    }
    let mut result = Map::new();
    result.insert("chain".into(), json!(chain.indices));
    result.insert("method".into(), json!(chain.method));
    result.insert("length".into(), json!(chain.indices.len()));
    Ok((chain.indices.len() >= s.min_chain, result, vec![table]))
}

pub fn approx(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.approx, "approx")?;
    let f = cfg.function(ctx)?;
    let spec = cfg.metric.build()?;
    let w = s.window.build("approx.window")?;
    ctx.op("fit_trig_poly");
    let fit = fit_trig_poly(&f, &w, &s.freqs, &spec).map_err(|e| match e {
        Error::Conditioning { .. } | Error::Shape(_) => CliError::core("approx.freqs", e),
        Error::Config(_) => CliError::core("metric", e),
        e => CliError::core("approx", e),
    })?;
    let n = f.dim();
    let mut table = Table::with_header("", header(&[columns("freq", n), names(&["re", "im"])]));
    for c in fit.coefficients() {
        let mut row = floats(&c.freq);
        row.extend([Cell::F(c.re), Cell::F(c.im)]);
        table.push(row);
    }
    let mut pass = s.threshold.is_none_or(|t| fit.residual.value <= t);
    let mut result = Map::new();
    result.insert("residual".into(), to_json(&fit.residual));
    result.insert("condition".into(), json!(fit.condition));
    let mut tables = vec![table];

    if let Some(st) = &s.strong {
        let polys = st
            .polys
            .iter()
            .enumerate()
            .map(|(i, p)| p.build(&format!("approx.strong.polys[{i}]"), ctx))
            .collect::<Result<Vec<_>, _>>()?;
        let windows = st
            .windows
            .iter()
            .enumerate()
            .map(|(j, w)| w.build(&format!("approx.strong.windows[{j}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let strong_spec = match &st.metric {
            Some(m) => m.build()?,
            None => spec.clone(),
        };
        ctx.op("levitan_strong_approx_check");
        let t = levitan_strong_approx_check(&f, &polys, &windows, &strong_spec, st.threshold)
            .map_err(err("approx.strong"))?;
        let mut out = Table::new("strong", &["k", "window", "error", "slack"]);
        for (k, row) in t.errors.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                out.push(vec![Cell::from(k), Cell::from(j), Cell::F(d.value), Cell::F(d.certified_slack)]);
            }
        }
        pass &= t.pass;
        result.insert(
            "strong".into(),
            json!({ "monotone": t.monotone, "final_below": t.final_below, "pass": t.pass }),
        );
        tables.push(out);
    }
    Ok((pass, result, tables))
}

fn windows(p: &PropagationSpec, path: &str) -> Result<(aperlab::CompactWindow, aperlab::CompactWindow), CliError> {
    Ok((
        p.window.build(&format!("{path}.window"))?,
        p.enlarged.build(&format!("{path}.enlarged"))?,
    ))
}

pub fn conv(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.conv, "conv")?;
    positive("conv.tail_tol", s.tail_tol)?;
    let kernel = s.kernel.build("conv.kernel")?;
    let f = cfg.function(ctx)?;
    let opts = ConvOptions::new(s.tail_tol);
    let n = f.dim();
    let m = match &kernel {
        aperlab::conv::Kernel::ExpMatrix { m, .. } => m.nrows(),
        _ => f.codim(),
    };
    let mut table = Table::with_header(
        "",
        header(&[columns("t", n), columns("value", m), names(&["err", "tail", "cutoff"])]),
    );
    for (i, p) in s.points.iter().enumerate() {
        let v = match s.mode {
            ConvMode::L1 => {
                ctx.op("l1_convolution");
                l1_convolution(&kernel, &f, p, opts)
            }
            ConvMode::Infinite => {
                ctx.op("infinite_convolution");
                if p.len() != 1 {
                    return Err(CliError::invalid(&format!("conv.points[{i}]"), "infinite convolution takes scalar times"));
                }
                infinite_convolution(&kernel, &f, p[0], opts)
            }
        }
        .map_err(|e| CliError::core(&format!("conv.points[{i}]"), e))?;
        let mut row = floats(p);
        row.extend(floats(&v.value));
        row.extend([Cell::F(v.err), Cell::F(v.tail), Cell::F(v.cutoff)]);
        table.push(row);
    }
    let mut result = Map::new();
    result.insert("points".into(), json!(s.points.len()));
    let mut pass = true;
    if let Some(p) = &s.propagation {
        let (w, big) = windows(p, "conv.propagation")?;
        let rho = cfg.relation.build(Some(&f))?;
        let spec = cfg.metric.build()?;
        ctx.op("propagation_check");
        let r = propagation_check(&kernel, &f, &rho, &p.tau, &w, &big, &spec, opts)
            .map_err(err("conv.propagation"))?;
        let holds = r.holds(p.tol);
        pass &= holds;
        let mut v = to_json(&r);
        v["holds"] = json!(holds);
        result.insert("propagation".into(), v);
    }
    Ok((pass, result, vec![table]))
}

fn formula_op(f: &PdeFormula) -> &'static str {
    match f {
        PdeFormula::Heat { .. } => "heat_apply",
        PdeFormula::DAlembert { .. } => "dalembert",
        PdeFormula::Kirchhoff { .. } => "kirchhoff3d",
        PdeFormula::Poisson { .. } => "poisson2d",
        PdeFormula::Biharmonic { .. } => "biharmonic_halfspace",
    }
}

pub fn pde(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.pde, "pde")?;
    positive("pde.tol", s.tol)?;
    let formula = s.formula.build("pde.formula", ctx)?;
    let n = formula.dim();
    if let Some(e) = &s.expect {
        if e.len() != s.points.len() {
            return Err(CliError::invalid("pde.expect", "one expected value per point"));
        }
    }
    let mut table = Table::with_header(
        "",
        header(&[columns("x", n), names(&["value", "err", "expected", "within"])]),
    );
    let mut pass = true;
    if !s.points.is_empty() {
        ctx.op(formula_op(&formula));
    }
    for (i, p) in s.points.iter().enumerate() {
        if p.len() != n {
            return Err(CliError::invalid(&format!("pde.points[{i}]"), format!("expected {n} coordinates")));
        }
        let u = formula
            .eval(p, s.tol)
            .map_err(|e| CliError::core(&format!("pde.points[{i}]"), e))?;
        let expected = s.expect.as_ref().map(|e| e[i]);
        let within = expected.map(|e| (u.value - e).abs() <= s.expect_tol);
        pass &= within.unwrap_or(true);
        let mut row = floats(p);
        row.extend([
            Cell::F(u.value),
            Cell::F(u.err),
            Cell::from(expected),
            within.map_or(Cell::Empty, Cell::B),
        ]);
        table.push(row);
    }
    let mut result = Map::new();
    result.insert("points".into(), json!(s.points.len()));
    let mut tables = vec![table];

    if let Some(r) = &s.residual {
        let tol = s.tol;
        let (kind, u): (PdeKind, Box<dyn Fn(f64, f64) -> aperlab::Result<f64>>) = match &formula {
            PdeFormula::Heat { f, .. } => {
                ctx.op("heat_apply");
                let f = f.clone();
                (PdeKind::Heat, Box::new(move |x, t| Ok(heat_apply(&f, t, &[x], tol)?.value[0])))
            }
            PdeFormula::DAlembert { f, g, a, .. } => {
                ctx.op("dalembert");
                let (f, g, a) = (f.clone(), g.clone(), *a);
                (PdeKind::Wave { a }, Box::new(move |x, t| Ok(dalembert(&f, &g, a, x, t, tol)?.value)))
            }
            _ => {
                return Err(CliError::invalid(
                    "pde.residual",
                    "residuals are available for the heat and d'Alembert formulas",
                ))
            }
        };
        ctx.op("residual_check");
        let mut out = Table::new("residual", &["h", "residual"]);
        let mut res = Vec::new();
        for (i, h) in r.steps.iter().enumerate() {
            positive(&format!("pde.residual.steps[{i}]"), *h)?;
            let v = residual_check(&u, kind, r.point[0], r.point[1], *h).map_err(err("pde.residual"))?;
            out.push(vec![Cell::F(*h), Cell::F(v)]);
            res.push(v.abs());
        }
        let orders: Vec<f64> = res
            .windows(2)
            .zip(r.steps.windows(2))
            .map(|(q, h)| (q[0] / q[1]).ln() / (h[0] / h[1]).ln())
            .collect();
        let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
        if let Some(o) = r.min_order {
            pass &= !orders.is_empty() && min_order >= o;
        }
        if let Some(m) = r.max_residual {
            pass &= res.iter().all(|v| *v <= m);
        }
        result.insert(
            "residual".into(),
            json!({ "orders": orders, "min_order": if orders.is_empty() { Value::Null } else { json!(min_order) } }),
        );
        tables.push(out);
    }

    if let Some(p) = &s.propagation {
        let (w, big) = windows(p, "pde.propagation")?;
        let spec = cfg.metric.build()?;
        ctx.op("pde_propagation_check");
        let r = pde_propagation_check(&formula, &p.tau, &w, &big, &spec, s.tol).map_err(err("pde.propagation"))?;
        let holds = r.holds(p.tol);
        pass &= holds;
        let mut v = to_json(&r);
        v["holds"] = json!(holds);
        result.insert("propagation".into(), v);
    }
    Ok((pass, result, tables))
}

pub fn witness(cfg: &Config, ctx: &mut Ctx) -> Out {
    let s = section(&cfg.witness, "witness")?;
    positive("witness.eta", s.eta)?;
    positive("witness.step", s.step)?;
    ctx.op("bogolyubov_witness");
    let found = bogolyubov_witness(&s.omega, s.eta, s.delta, &s.search_box(), s.step).map_err(err("witness"))?;
    let n = s.omega.len();
    let mut table = Table::with_header("", header(&[columns("tau", n), names(&["phase", "lattice_distance"])]));
    let mut result = Map::new();
    let pass = match &found {
        Some(w) => {
            let mut row = floats(&w.tau);
            row.extend([Cell::F(w.phase), Cell::F(w.lattice_distance)]);
            table.push(row);
            let reverified = is_witness(&s.omega, s.eta, s.delta, &w.tau)
                && lattice_distance(&w.tau) == w.lattice_distance;
            result.insert("reverified".into(), json!(reverified));
            reverified && s.min_distance.is_none_or(|d| w.lattice_distance >= d)
        }
        None => false,
    };
    result.insert("witness".into(), to_json(&found));
    Ok((pass, result, vec![table]))
}
