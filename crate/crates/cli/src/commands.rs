use hadperm::bounds::{corollary1_check, theorem1_check, theorem4_check, RatioReport};
use hadperm::interp::{logconvexity_check, MultilinearForm, PVector};
use hadperm::matrix::random_matrix_with;
use hadperm::optimize::{ascend, reduce_starts, starting_points, OptimizationConfig, SweepRow};
use hadperm::symgroup::{
    circulant_flow, circulant_initial_slope, flow_trace, geometric_grid, FlowPath, SymmetricGroup,
};
use hadperm::{ColumnMatrix, Complex64, PExponent, RandomMode, RngSeed};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::io::{read_matrix, Cell, Table};
use crate::{
    parse_grid, parse_list, CliError, Common, CpArgs, FlowArgs, InterpArgs, Outcome, VerifyArgs,
};

fn emit(table: &Table, common: &Common, outcome: Outcome) -> Result<Outcome, CliError> {
    if let Some(path) = &common.out {
        table.write(path, common.format, &outcome.summary)?;
    }
    Ok(outcome)
}

fn report_row(instance: usize, check: &str, r: &RatioReport, violation: bool) -> Vec<Cell> {
    vec![
        instance.into(),
        check.into(),
        r.n.into(),
        r.k.into(),
        r.p.into(),
        r.lhs.into(),
        r.rhs.into(),
        r.ratio.into(),
        r.slack.into(),
        r.equality_class.tag().into(),
        violation.into(),
    ]
}

fn corrupted(r: RatioReport, factor: f64) -> RatioReport {
    if factor == 1.0 {
        return r;
    }
    RatioReport::new(r.n, r.k, r.p, r.lhs, r.rhs * factor, r.equality_class)
}

/// Runs the applicable checks on one instance.
fn checks_for(
    m: &ColumnMatrix,
    ps: &[f64],
    subperm: bool,
) -> Result<Vec<(&'static str, RatioReport)>, CliError> {
    if !subperm {
        return Ok(vec![("theorem1", theorem1_check(m)?)]);
    }
    let mut out = vec![("theorem4", theorem4_check(m)?)];
    for &p in ps {
        let c = corollary1_check(m, p)?;
        out.push(("corollary1", c.bound));
        out.push(("holder", c.holder));
    }
    Ok(out)
}

/// Batch bound checks. Without `--k` each instance is a random complex
/// `N x N` matrix checked against the permanent bound; with `--k` it is `K`
/// random nonnegative vectors of length `N` checked against the
/// sub-permanent bounds at each exponent.
pub fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let c = &args.common;
    let n = c.n.unwrap_or(4);
    let tol = c.tol.unwrap_or(1e-9);
    let ps = match (c.p, &c.p_grid) {
        (Some(p), _) => vec![p],
        (None, Some(g)) => parse_grid(g)?,
        (None, None) => vec![1.0, 1.5, 2.0],
    };
    if ps.iter().any(|p| !(1.0..=2.0).contains(p)) {
        return Err(CliError::Grid("verify exponents must lie in [1, 2]".into()));
    }
    let instances: Vec<Vec<(&str, RatioReport)>> = match &c.matrix {
        Some(path) => {
            let m = read_matrix(path)?;
            let subperm = c.k.is_some() || !m.is_square();
            vec![checks_for(&m, &ps, subperm)?]
        }
        None => {
            let k = c.k.unwrap_or(n);
            if n == 0 || k == 0 || k > n {
                return Err(CliError::Input(format!(
                    "need 1 <= k <= n, got n={n} k={k}"
                )));
            }
            let subperm = c.k.is_some();
            let seed = RngSeed(c.seed);
            (0..c.trials.unwrap_or(100))
                .into_par_iter()
                .map(|i| {
                    let mut rng = seed.stream(i as u64);
                    let mode = if subperm {
                        RandomMode::NonnegUniform
                    } else {
                        RandomMode::ComplexGaussian
                    };
                    let m = random_matrix_with(n, k, mode, &mut rng)?;
                    checks_for(&m, &ps, subperm)
                })
                .collect::<Result<_, _>>()?
        }
    };
    let mut table = Table::new(
        "verify",
        &[
            "instance",
            "check",
            "n",
            "k",
            "p",
            "lhs",
            "rhs",
            "ratio",
            "slack",
            "class",
            "violation",
        ],
    );
    let instance_count = instances.len();
    let mut violations = 0;
    let mut checks = 0;
    let mut max_ratio: f64 = 0.0;
    for (i, reports) in instances.into_iter().enumerate() {
        for (check, r) in reports {
            let r = corrupted(r, args.corrupt_bound);
            let bad = !r.holds(tol);
            violations += bad as usize;
            checks += 1;
            max_ratio = max_ratio.max(r.ratio);
            table.push(report_row(i, check, &r, bad));
        }
    }
    let summary = json!({
        "command": "verify",
        "instances": instance_count,
        "checks": checks,
        "violations": violations,
        "max_ratio": max_ratio,
        "tol": tol,
    });
    emit(
        &table,
        c,
        Outcome {
            summary,
            violations,
        },
    )
}

/// `[0, t_min, ..., t_max]` with geometric spacing after zero.
fn flow_grid(t_max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    let t_min = 1e-3;
    if points < 3 || !(t_max > t_min) || !t_max.is_finite() {
        return Err(CliError::Grid(format!(
            "need t_points >= 3 and t_max > {t_min}, got {points} and {t_max}"
        )));
    }
    let mut grid = vec![0.0];
    grid.extend(geometric_grid(t_min, t_max, points - 1)?);
    Ok(grid)
}

fn positive_start(n: usize, seed: RngSeed) -> Result<ColumnMatrix, CliError> {
    let mut rng = seed.rng();
    let data = (0..n * n)
        .map(|_| Complex64::new(0.05 + rng.random::<f64>(), 0.0))
        .collect();
    Ok(ColumnMatrix::from_row_major(n, n, data)?)
}

pub fn flow(args: &FlowArgs) -> Result<Outcome, CliError> {
    let c = &args.common;
    let p = c.p.unwrap_or(2.0);
    let pe = PExponent::new(p)?;
    let tol = c.tol.unwrap_or(1e-9);
    let circ = match &args.circulant {
        Some(v) if v.len() == 2 => Some((v[0], v[1])),
        Some(_) => return Err(CliError::Input("--circulant takes two values".into())),
        None => None,
    };
    let f = match (circ, &c.matrix) {
        (Some(_), Some(_)) => {
            return Err(CliError::Input(
                "--circulant and --matrix are exclusive".into(),
            ))
        }
        (Some((x, y)), None) => {
            if c.n.is_some_and(|n| n != 3) {
                return Err(CliError::Input("the circulant family has N = 3".into()));
            }
            hadperm::matrix::make_circulant3(x, y)?
        }
        (None, Some(path)) => read_matrix(path)?,
        (None, None) => positive_start(c.n.unwrap_or(4), RngSeed(c.seed))?,
    };
    let n = f.n_rows();
    let times = flow_grid(args.t_max.unwrap_or(5.0 / n as f64), args.t_points)?;
    let group;
    let path = if args.brute_force {
        group = SymmetricGroup::new(n)?;
        FlowPath::BruteForce(&group)
    } else {
        FlowPath::Reduced
    };
    let (trace, circ_data) = match circ {
        Some((x, y)) => {
            let ct = circulant_flow(x, y, pe, &times)?;
            let slope = circulant_initial_slope(x, y, pe)?;
            let trace = if args.brute_force {
                flow_trace(&f, pe, &times, path)?
            } else {
                ct.trace.clone()
            };
            (trace, Some((ct, slope)))
        }
        None => (flow_trace(&f, pe, &times, path)?, None),
    };

    let mut columns: Vec<String> = vec!["t".into(), "eta".into()];
    if circ_data.is_some() {
        columns.extend(["x", "y", "phi"].map(String::from));
    }
    for r in 0..n {
        for k in 0..n {
            columns.push(format!("f{r}_{k}"));
        }
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("flow", &cols);
    for i in 0..times.len() {
        let mut row: Vec<Cell> = vec![times[i].into(), trace.eta[i].into()];
        if let Some((ct, _)) = &circ_data {
            row.extend([ct.path[i].0.into(), ct.path[i].1.into(), ct.phi[i].into()]);
        }
        row.extend(
            trace.column_states[i]
                .entries()
                .iter()
                .map(|z| Cell::from(z.re)),
        );
        table.push(row);
    }

    let max_decrease = trace.max_decrease();
    let monotone = max_decrease <= tol;
    // Monotonicity is only claimed at p = 2.
    let violations = usize::from(p == 2.0 && !monotone);
    let mut summary = json!({
        "command": "flow",
        "n": n,
        "p": p,
        "points": times.len(),
        "eta_start": trace.eta[0],
        "eta_end": trace.eta[times.len() - 1],
        "monotone": monotone,
        "max_decrease": max_decrease,
        "violations": violations,
    });
    if let Some((ct, slope)) = &circ_data {
        let phi_decrease = ct.phi.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
        summary["initial_slope"] = json!(slope);
        summary["phi_monotone"] = json!(phi_decrease <= tol);
        let end = ct.path[ct.path.len() - 1];
        summary["endpoint"] = json!([end.0, end.1]);
    }
    emit(
        &table,
        c,
        Outcome {
            summary,
            violations,
        },
    )
}

/// Estimates `C(p)` on the grid; the random starts of each exponent run in
/// parallel and are reduced in start order.
pub fn cp(args: &CpArgs) -> Result<Outcome, CliError> {
    let c = &args.common;
    let n = c.n.unwrap_or(3);
    if n < 2 {
        return Err(CliError::Input("cp needs N >= 2".into()));
    }
    let tol = c.tol.unwrap_or(1e-6);
    let grid = match (c.p, &c.p_grid) {
        (Some(p), _) => vec![p],
        (None, Some(g)) => parse_grid(g)?,
        (None, None) => parse_grid("1:2:11")?,
    };
    if grid.iter().any(|p| !(1.0..=2.0).contains(p)) {
        return Err(CliError::Grid("cp exponents must lie in [1, 2]".into()));
    }
    let config = OptimizationConfig {
        num_starts: c.trials.unwrap_or(8).max(1),
        seed: RngSeed(c.seed),
        ..OptimizationConfig::default()
    };
    let starts = starting_points(n, &config)?;
    let mut table = Table::new(
        "cp",
        &[
            "n",
            "p",
            "best_ratio",
            "lower_bound",
            "upper_bound",
            "conjecture_gap",
            "starts_to_best",
            "iters",
        ],
    );
    let mut violations = 0;
    let mut max_gap: f64 = 0.0;
    for &p in &grid {
        let outcomes = starts
            .par_iter()
            .map(|s| ascend(s, p, &config))
            .collect::<Result<Vec<_>, _>>()?;
        let row = SweepRow::new(reduce_starts(n, p, outcomes)?)?;
        let best = row.result.best_ratio;
        if best < row.lower_bound - tol || best > row.upper_bound + tol {
            violations += 1;
        }
        max_gap = max_gap.max(row.conjecture_gap());
        table.push(vec![
            n.into(),
            p.into(),
            best.into(),
            row.lower_bound.into(),
            row.upper_bound.into(),
            row.conjecture_gap().into(),
            row.result.starts_converged_to_best.into(),
            row.result.iterations.into(),
        ]);
    }
    let summary = json!({
        "command": "cp",
        "n": n,
        "points": grid.len(),
        "max_conjecture_gap": max_gap,
        "violations": violations,
    });
    emit(
        &table,
        c,
        Outcome {
            summary,
            violations,
        },
    )
}

pub fn interp(args: &InterpArgs) -> Result<Outcome, CliError> {
    let c = &args.common;
    let n = c.n.unwrap_or(3);
    let seed = RngSeed(c.seed);
    let (form, m) = if args.perm_tensor {
        (MultilinearForm::permanent_tensor(n)?, n)
    } else {
        let form = MultilinearForm::random(args.m, n, RandomMode::NonnegUniform, seed)?;
        (form, args.m)
    };
    // The random default segment uses its own stream, apart from the form.
    let mut rng = seed.stream(1);
    let mut endpoint = |given: &Option<String>, perm_default: f64| -> Result<PVector, CliError> {
        let v = match given {
            Some(s) => parse_list(s)?,
            None if args.perm_tensor => vec![perm_default; m],
            None => (0..m).map(|_| rng.random::<f64>()).collect(),
        };
        if v.len() != m {
            return Err(CliError::Input(format!("endpoint needs {m} entries")));
        }
        Ok(PVector::new(v)?)
    };
    let q = endpoint(&args.q, 1.0)?;
    let r = endpoint(&args.r, 0.5)?;
    if args.t_points == 0 {
        return Err(CliError::Grid("t_points >= 1".into()));
    }
    let t_grid: Vec<f64> = (1..=args.t_points)
        .map(|i| i as f64 / (args.t_points + 1) as f64)
        .collect();
    let config = OptimizationConfig {
        num_starts: c.trials.unwrap_or(12).max(1),
        max_iters: 500,
        seed,
        ..OptimizationConfig::default()
    };
    let report = logconvexity_check(&form, &q, &r, &t_grid, &config)?;

    let mut columns: Vec<String> = vec!["t".into()];
    columns.extend((1..=m).map(|j| format!("pvec_{j}")));
    columns.extend(["midpoint_estimate", "endpoint_bound", "violation"].map(String::from));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("interp", &cols);
    for row in &report.rows {
        let mut cells: Vec<Cell> = vec![row.t.into()];
        cells.extend(row.pvec.reciprocals().iter().map(|&x| Cell::from(x)));
        cells.extend([
            row.midpoint_estimate.into(),
            row.endpoint_bound.into(),
            row.violation.into(),
        ]);
        table.push(cells);
    }
    let violations = report.violations();
    let max_excess = report
        .rows
        .iter()
        .map(|r| r.relative_excess)
        .fold(f64::NEG_INFINITY, f64::max);
    let summary = json!({
        "command": "interp",
        "m": m,
        "n": n,
        "q": q.reciprocals(),
        "r": r.reciprocals(),
        "q_estimate": report.q_estimate,
        "r_estimate": report.r_estimate,
        "max_relative_excess": max_excess,
        "violations": violations,
    });
    emit(
        &table,
        c,
        Outcome {
            summary,
            violations,
        },
    )
}
