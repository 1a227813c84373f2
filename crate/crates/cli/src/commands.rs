use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{bail, Context};
use charvar_core::catalog::{
    check_sampler_t, enumerate_parabolic, explore_solve, sample_component, worker_count,
    Classification, ComponentId, ComponentSample, ExploreFinding, SAMPLER_MARGIN,
};
use charvar_core::mat2::{
    anticommutator_residual, ch_residual, has_common_eigenvector, is_irreducible_pair, xyx_expand,
    Mat2,
};
use charvar_core::numfield::max_normalized;
use charvar_core::random::{admissible_t, disk, random_quadruple, random_reducible_pair};
use charvar_core::reconstruct::realize_character;
use charvar_core::tracealg::{
    det_sdiamond, s_from_t, trace_equation_residuals, type_i_residuals, type_ii_residuals,
    COORD_NAMES,
};
use charvar_core::wirtinger::is_representation;
use charvar_core::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::report::{fmt_f, Report, Row, Summary};
use crate::{Command, Format, Output};

/// Parabolic census counts per component, in catalog order.
const PARABOLIC_COUNTS: [usize; 10] = [4, 4, 4, 4, 2, 4, 1, 1, 1, 1];
const PARABOLIC_TOTAL: usize = 26;
/// Relative size of the `--fault` perturbation of `s12`.
const FAULT_SIZE: f64 = 1e-3;
/// Radius of the disk random `t` values are drawn from.
const T_RADIUS: f64 = 3.0;
/// Membership bound for explore findings.
const EXPLORE_MEMBERSHIP_TOL: f64 = 1e-6;
const EXPLORE_SOLVE_TOL: f64 = 1e-9;

/// Runs one subcommand; `Ok(pass)`, or `Err` for bad parameters.
pub fn run(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Catalog {
            t,
            component,
            tol,
            output,
        } => catalog(t, component, tol, &output),
        Command::Verify {
            t,
            component,
            samples,
            seed,
            tol,
            output,
        } => verify(t, component, samples, seed, tol, &output),
        Command::Parabolic { output } => parabolic(&output),
        Command::Identities {
            n,
            seed,
            tol,
            fault,
            output,
        } => identities(n, seed, tol, fault, &output),
        Command::Explore {
            t,
            seed,
            attempts,
            output,
        } => explore(t, seed, attempts, &output),
    }
}

fn fmt_c(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn selected(component: Option<ComponentId>) -> Vec<ComponentId> {
    component.map_or_else(|| ComponentId::ALL.to_vec(), |id| vec![id])
}

fn echo(name: &str, flags: &[(&str, String)]) -> String {
    let mut s = name.to_string();
    for (flag, value) in flags {
        s.push_str(&format!(" --{flag} {value}"));
    }
    s
}

fn component_flag(component: Option<ComponentId>) -> Vec<(&'static str, String)> {
    component
        .map(|id| ("component", id.to_string()))
        .into_iter()
        .collect()
}

fn emit<I: Serialize + Row>(report: &Report<I>, output: &Output) -> anyhow::Result<bool> {
    let sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    match output.format {
        Format::Json => report.write_json(sink)?,
        Format::Csv => report.write_csv(sink)?,
    }
    eprint!("{}", report.describe());
    Ok(report.pass)
}

fn check_admissible(ids: &[ComponentId], t: C64) -> anyhow::Result<()> {
    for &id in ids {
        check_sampler_t(id, t, SAMPLER_MARGIN)?;
    }
    Ok(())
}

impl Row for ComponentSample {
    fn header() -> Vec<String> {
        let mut h = vec!["component".into(), "branch".into(), "residual".into()];
        for name in COORD_NAMES {
            h.push(format!("{name}_re"));
            h.push(format!("{name}_im"));
        }
        h
    }

    fn row(&self) -> Vec<String> {
        let mut r = vec![
            self.id.to_string(),
            self.branch.to_string(),
            fmt_f(self.max_residual()),
        ];
        for z in self.vector.to_array() {
            r.push(z.re.to_string());
            r.push(z.im.to_string());
        }
        r
    }
}

fn sample_all(ids: &[ComponentId], t: C64) -> anyhow::Result<Vec<ComponentSample>> {
    let mut out = Vec::new();
    for &id in ids {
        out.extend(sample_component(id, t).with_context(|| format!("sampling {id}"))?);
    }
    Ok(out)
}

fn catalog(
    t: C64,
    component: Option<ComponentId>,
    tol: f64,
    output: &Output,
) -> anyhow::Result<bool> {
    let ids = selected(component);
    check_admissible(&ids, t)?;
    let samples = sample_all(&ids, t)?;
    let summaries = ids
        .iter()
        .map(|&id| {
            let rs: Vec<f64> = samples
                .iter()
                .filter(|s| s.id == id)
                .map(|s| s.max_residual())
                .collect();
            Summary::new(format!("{id} membership"), &rs, tol)
        })
        .collect();
    let mut flags = vec![("t", fmt_c(t))];
    flags.extend(component_flag(component));
    flags.push(("tol", fmt_f(tol)));
    emit(
        &Report::new(echo("catalog", &flags), 0, summaries, samples),
        output,
    )
}

#[derive(Debug, Serialize)]
struct VerifyItem {
    component: ComponentId,
    branch: usize,
    t: [f64; 2],
    membership: f64,
    trace_equations: f64,
    realization: f64,
    relator: f64,
    pass: bool,
    error: Option<String>,
}

impl Row for VerifyItem {
    fn header() -> Vec<String> {
        [
            "component",
            "branch",
            "t_re",
            "t_im",
            "membership",
            "trace_equations",
            "realization",
            "relator",
            "pass",
            "error",
        ]
        .map(String::from)
        .to_vec()
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.component.to_string(),
            self.branch.to_string(),
            self.t[0].to_string(),
            self.t[1].to_string(),
            fmt_f(self.membership),
            fmt_f(self.trace_equations),
            fmt_f(self.realization),
            fmt_f(self.relator),
            self.pass.to_string(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

struct VerifyTol {
    membership: f64,
    trace: f64,
    relator: f64,
}

fn verify_sample(s: &ComponentSample, tol: &VerifyTol) -> VerifyItem {
    let membership = s.max_residual();
    let trace_equations = max_normalized(&trace_equation_residuals(&s.vector));
    let (realization, relator, error) = match realize_character(&s.vector) {
        Ok(q) => {
            let dev = q.trace_vector().distance(&s.vector) / s.vector.norm().max(1.0);
            (dev, is_representation(&q, tol.relator).1, None)
        }
        Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
    };
    let pass = membership <= tol.membership
        && trace_equations <= tol.trace
        && realization <= tol.trace
        && relator <= tol.relator;
    VerifyItem {
        component: s.id,
        branch: s.branch,
        t: [s.t().re, s.t().im],
        membership,
        trace_equations,
        realization,
        relator,
        pass,
        error,
    }
}

fn verify(
    t: Option<C64>,
    component: Option<ComponentId>,
    samples: usize,
    seed: u64,
    tol: f64,
    output: &Output,
) -> anyhow::Result<bool> {
    if !(tol > 0.0) {
        bail!("--tol must be positive");
    }
    let ids = selected(component);
    let ts = match t {
        Some(t) => {
            check_admissible(&ids, t)?;
            vec![t]
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| admissible_t(&mut rng, T_RADIUS, &ids))
                .collect()
        }
    };
    let mut work = Vec::new();
    for (k, &t) in ts.iter().enumerate() {
        for s in sample_all(&ids, t)? {
            work.push((k, s));
        }
    }
    work.sort_by_key(|(k, s)| (s.id, s.branch, *k));
    let limits = VerifyTol {
        membership: tol * 1e-3,
        trace: tol * 1e-1,
        relator: tol,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()?;
    let items: Vec<VerifyItem> = pool.install(|| {
        work.par_iter()
            .map(|(_, s)| verify_sample(s, &limits))
            .collect()
    });
    let column = |f: fn(&VerifyItem) -> f64| items.iter().map(f).collect::<Vec<_>>();
    let summaries = vec![
        Summary::new("membership", &column(|i| i.membership), limits.membership),
        Summary::new(
            "trace_equations",
            &column(|i| i.trace_equations),
            limits.trace,
        ),
        Summary::new("realization", &column(|i| i.realization), limits.trace),
        Summary::new("relator", &column(|i| i.relator), limits.relator),
    ];
    let mut flags = match t {
        Some(t) => vec![("t", fmt_c(t))],
        None => vec![("samples", samples.to_string())],
    };
    flags.extend(component_flag(component));
    flags.push(("seed", seed.to_string()));
    flags.push(("tol", fmt_f(tol)));
    emit(
        &Report::new(echo("verify", &flags), seed, summaries, items),
        output,
    )
}

fn parabolic(output: &Output) -> anyhow::Result<bool> {
    let census = enumerate_parabolic()?;
    let mut summaries = vec![Summary::count("total", census.total, PARABOLIC_TOTAL)];
    for (id, want) in ComponentId::ALL.into_iter().zip(PARABOLIC_COUNTS) {
        summaries.push(Summary::count(
            format!("{id} count"),
            census.count(id),
            want,
        ));
    }
    let rs: Vec<f64> = census.samples.iter().map(|s| s.max_residual()).collect();
    summaries.push(Summary::new(
        "membership",
        &rs,
        charvar_core::catalog::SAMPLE_TOL,
    ));
    emit(
        &Report::new("parabolic".into(), 0, summaries, census.samples),
        output,
    )
}

#[derive(Debug, Serialize)]
struct IdentityItem {
    index: usize,
    t: [f64; 2],
    type_i: f64,
    type_ii: f64,
    det_s: f64,
    cayley_hamilton: f64,
    xyx: f64,
    anticommutator: f64,
    pair_reducible: bool,
    pair_criteria_agree: bool,
}

impl Row for IdentityItem {
    fn header() -> Vec<String> {
        [
            "index",
            "t_re",
            "t_im",
            "type_i",
            "type_ii",
            "det_s",
            "cayley_hamilton",
            "xyx",
            "anticommutator",
            "pair_reducible",
            "pair_criteria_agree",
        ]
        .map(String::from)
        .to_vec()
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            self.t[0].to_string(),
            self.t[1].to_string(),
            fmt_f(self.type_i),
            fmt_f(self.type_ii),
            fmt_f(self.det_s),
            fmt_f(self.cayley_hamilton),
            fmt_f(self.xyx),
            fmt_f(self.anticommutator),
            self.pair_reducible.to_string(),
            self.pair_criteria_agree.to_string(),
        ]
    }
}

fn relative(m: &Mat2<f64>, scale: f64) -> f64 {
    m.norm() / scale.max(1.0)
}

fn identity_item(rng: &mut ChaCha8Rng, index: usize, fault: bool) -> IdentityItem {
    let t = disk(rng, T_RADIUS);
    let q = random_quadruple(rng, t);
    let mut s = s_from_t(&q.trace_vector());
    if fault {
        s.s12 += FAULT_SIZE * s.s12.norm().max(1.0);
    }
    let [x, y, ..] = q.elements();
    let scale = q.scale();
    let (u, v) = (x.mat().traceless_part(), y.mat().traceless_part());
    // every fifth pair is built with a common eigenvector
    let pair_reducible = index % 5 == 4;
    let (px, py) = if pair_reducible {
        random_reducible_pair(rng, t)
    } else {
        (*x, *y)
    };
    let by_trace = is_irreducible_pair(&px, &py);
    let by_eigenvector = !has_common_eigenvector(&[*px.mat(), *py.mat()]);
    IdentityItem {
        index,
        t: [t.re, t.im],
        type_i: max_normalized(&type_i_residuals(&s)),
        type_ii: max_normalized(&type_ii_residuals(&s)),
        det_s: det_sdiamond(&s).normalized(),
        cayley_hamilton: relative(&ch_residual(x), scale * scale),
        xyx: relative(&xyx_expand(x, y), scale.powi(3)),
        anticommutator: relative(&anticommutator_residual(&u, &v), scale * scale),
        pair_reducible,
        pair_criteria_agree: by_trace == by_eigenvector && by_trace != pair_reducible,
    }
}

fn identities(n: usize, seed: u64, tol: f64, fault: bool, output: &Output) -> anyhow::Result<bool> {
    if !(tol > 0.0) {
        bail!("--tol must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items: Vec<IdentityItem> = (0..n).map(|i| identity_item(&mut rng, i, fault)).collect();
    let column = |f: fn(&IdentityItem) -> f64| items.iter().map(f).collect::<Vec<_>>();
    let disagreements = items.iter().filter(|i| !i.pair_criteria_agree).count();
    let summaries = vec![
        Summary::new("type_i", &column(|i| i.type_i), tol),
        Summary::new("type_ii", &column(|i| i.type_ii), tol),
        Summary::new("det_s", &column(|i| i.det_s), tol),
        Summary::new("cayley_hamilton", &column(|i| i.cayley_hamilton), tol),
        Summary::new("xyx", &column(|i| i.xyx), tol),
        Summary::new("anticommutator", &column(|i| i.anticommutator), tol),
        Summary::count("pair_criterion_disagreements", disagreements, 0),
    ];
    let mut flags = vec![
        ("n", n.to_string()),
        ("seed", seed.to_string()),
        ("tol", fmt_f(tol)),
    ];
    if fault {
        flags.push(("fault", "on".into()));
    }
    emit(
        &Report::new(echo("identities", &flags), seed, summaries, items),
        output,
    )
}

impl Row for ExploreFinding {
    fn header() -> Vec<String> {
        [
            "attempt",
            "iterations",
            "residual",
            "classification",
            "membership",
            "reproducible",
        ]
        .map(String::from)
        .to_vec()
    }

    fn row(&self) -> Vec<String> {
        let membership = match self.classification {
            Classification::Component { residual, .. } => fmt_f(residual),
            Classification::Unclassified { membership } => fmt_f(membership),
            _ => String::new(),
        };
        vec![
            self.attempt.to_string(),
            self.iterations.to_string(),
            fmt_f(self.residual),
            self.classification.label(),
            membership,
            self.reproducible.map(|b| b.to_string()).unwrap_or_default(),
        ]
    }
}

fn explore(t: C64, seed: u64, attempts: u64, output: &Output) -> anyhow::Result<bool> {
    let report = explore_solve(t, seed, attempts);
    let mut summaries = Vec::new();
    for (label, _) in &report.histogram {
        let found: Vec<&ExploreFinding> = report
            .findings
            .iter()
            .filter(|f| f.classification.label() == *label)
            .collect();
        let summary = match found[0].classification {
            Classification::Component { .. } => {
                let rs: Vec<f64> = found
                    .iter()
                    .map(|f| match f.classification {
                        Classification::Component { residual, .. } => residual,
                        _ => f64::NAN,
                    })
                    .collect();
                Summary::new(format!("{label} membership"), &rs, EXPLORE_MEMBERSHIP_TOL)
            }
            _ => {
                let rs: Vec<f64> = found.iter().map(|f| f.residual).collect();
                Summary::new(format!("{label} solve"), &rs, EXPLORE_SOLVE_TOL)
            }
        };
        summaries.push(summary);
    }
    summaries.push(Summary::count(
        "reproducible_unclassified",
        report.reproducible_unclassified().len(),
        0,
    ));
    let flags = [
        ("t", fmt_c(t)),
        ("seed", seed.to_string()),
        ("attempts", attempts.to_string()),
    ];
    emit(
        &Report::new(echo("explore", &flags), seed, summaries, report.findings),
        output,
    )
}
