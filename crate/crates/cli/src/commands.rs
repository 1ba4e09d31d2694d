//! Parameter resolution and the subcommand bodies.

use std::path::{Path, PathBuf};

use mdd_core::circle::{
    classify, dirichlet_approx, lemma35_error, minor_arc_sup_scan, theorem_main_term, DEFAULT_EPS,
    DEFAULT_ETA, DEFAULT_NODE_BUDGET, MIN_SCAN_NODES,
};
use mdd_core::digitset::choose_h;
use mdd_core::explab::{
    corollary_ratio, discrepancy, hyperbola_check, ramanujan_double_sums, CsvTable, RunManifest, Value,
};
use mdd_core::expsum::{expsum_divisor, l1_min_nodes, l1_norm_estimate};
use mdd_core::ntheory::gcd;
use mdd_core::voronoi::{
    delta_exact, delta_truncated, ju1_reflection, ju2_main, reflected_range, second_moment_prediction,
    second_moment_profile, ResidueBuckets, MAX_MOMENT_X,
};
use mdd_core::{ArcParams, CumulativeDivisor, DigitSet, MainTermForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cache::divisor_table;
use crate::config::{config_error, pick, pick_flag, pick_opt, Config};
use crate::{CheckArg, Cli, Command, CommonArgs, FormArg};

const DEFAULT_G: u64 = 10;
const DEFAULT_B: u64 = 7;
const DEFAULT_M: u32 = 4;

#[derive(Debug, Clone, Copy)]
enum HSource {
    Fixed(u64),
    Auto,
    Default,
}

/// Settings shared by every subcommand, after precedence is applied.
#[derive(Debug)]
pub struct Common {
    g: u64,
    b: u64,
    x: u64,
    h: HSource,
    eta: f64,
    p: Option<u64>,
    q: Option<u64>,
    seed: u64,
    threads: usize,
    cache: Option<PathBuf>,
    out: PathBuf,
}

impl Common {
    fn resolve(args: &CommonArgs, cfg: &Config) -> anyhow::Result<Self> {
        let g = pick(args.g, cfg, "g", DEFAULT_G)?;
        let b = pick(args.b, cfg, "b", DEFAULT_B)?;
        let (cfg_x, cfg_m) = (cfg.get::<u64>("X")?, cfg.get::<u32>("m")?);
        let x = match (args.x, args.m, cfg_x, cfg_m) {
            (Some(x), ..) => x,
            (None, Some(m), ..) => power(g, m)?,
            (None, None, Some(x), _) => x,
            (None, None, None, Some(m)) => power(g, m)?,
            (None, None, None, None) => power(g, DEFAULT_M)?,
        };
        if x == 0 {
            return Err(config_error("X must be ≥ 1"));
        }
        let (cfg_h, cfg_auto) = (cfg.get::<u64>("H")?, cfg.get::<bool>("auto-H")?);
        let h = match (args.h, args.auto_h, cfg_h, cfg_auto) {
            (Some(h), ..) => HSource::Fixed(h),
            (None, true, ..) => HSource::Auto,
            (None, false, Some(h), _) => HSource::Fixed(h),
            (None, false, None, Some(true)) => HSource::Auto,
            _ => HSource::Default,
        };
        let cache = match std::env::var_os("MDD_CACHE").filter(|v| !v.is_empty()) {
            Some(dir) => Some(PathBuf::from(dir)),
            None => pick_opt(args.cache.clone(), cfg, "cache")?,
        };
        Ok(Common {
            g,
            b,
            x,
            h,
            eta: pick(args.eta, cfg, "eta", DEFAULT_ETA)?,
            p: pick_opt(args.p, cfg, "P")?,
            q: pick_opt(args.q, cfg, "Q")?,
            seed: pick(args.seed, cfg, "seed", 0)?,
            threads: pick(args.threads, cfg, "threads", 0)?,
            cache,
            out: pick(args.out.clone(), cfg, "out", PathBuf::from("."))?,
        })
    }

    fn digit_set(&self) -> anyhow::Result<DigitSet> {
        Ok(DigitSet::new(self.g, self.b)?)
    }

    fn h(&self, ds: &DigitSet) -> anyhow::Result<u64> {
        let h = match self.h {
            HSource::Fixed(h) => h,
            HSource::Auto => {
                let choice = choose_h(ds, self.x)?;
                if choice.warning {
                    eprintln!("warning: chosen H = {} is not below X = {}", choice.spec.h, self.x);
                }
                choice.spec.h
            }
            HSource::Default => (self.x / self.g).max(1),
        };
        if h == 0 {
            return Err(config_error("H must be ≥ 1"));
        }
        Ok(h)
    }

    fn arc_params(&self) -> anyhow::Result<ArcParams> {
        match (self.p, self.q) {
            (Some(p), Some(q)) => Ok(ArcParams::explicit(self.x, p, q)?),
            (None, None) => Ok(ArcParams::new(self.x, self.eta)?),
            _ => Err(config_error("P and Q must be given together")),
        }
    }

    fn cache(&self) -> Option<&Path> {
        self.cache.as_deref()
    }
}

fn power(g: u64, m: u32) -> anyhow::Result<u64> {
    g.checked_pow(m)
        .ok_or_else(|| config_error(format!("{g}^{m} overflows")))
}

/// A subcommand with every parameter resolved.
#[derive(Debug)]
enum Job {
    DivisorSum,
    MainTerm { forms: Vec<MainTermForm>, budget: u64 },
    Arcs { samples: u64 },
    Boundary { q_max: u64 },
    Reflection { q_max: u64, points: u64 },
    MajorArc { q_max: Option<u64>, points: u64, eps: f64 },
    Delta { q_max: u64, points: u64, terms: u64 },
    Moment { q: u64, a: u64 },
    Discrepancy { q_max: u64, all_q: bool, weighted: bool },
    L1 { k_min: u32, k_max: Option<u32>, oversample: u64 },
    DoubleSum,
    Hyperbola,
    MinorScan { nodes: u64 },
}

impl Job {
    fn resolve(cmd: &Command, cfg: &Config) -> anyhow::Result<(&'static str, Job)> {
        Ok(match cmd {
            Command::DivisorSum => ("divisor-sum", Job::DivisorSum),
            Command::MainTerm { form, budget } => {
                let form = match pick_opt(form.map(form_name), cfg, "form")? {
                    Some(f) => parse_form(&f)?,
                    None => FormArg::Both,
                };
                let forms = match form {
                    FormArg::Beta => vec![MainTermForm::BetaQuadrature],
                    FormArg::Sine => vec![MainTermForm::SineKernel],
                    FormArg::Both => vec![MainTermForm::BetaQuadrature, MainTermForm::SineKernel],
                };
                let budget = pick(*budget, cfg, "budget", DEFAULT_NODE_BUDGET)?;
                ("main-term", Job::MainTerm { forms, budget })
            }
            Command::Arcs { samples } => ("arcs", Job::Arcs {
                samples: pick(*samples, cfg, "samples", 1000)?,
            }),
            Command::VoronoiCheck {
                check,
                q_max,
                points,
                terms,
                eps,
            } => {
                let check = match pick_opt(check.map(check_name), cfg, "check")? {
                    Some(c) => parse_check(&c)?,
                    None => CheckArg::Boundary,
                };
                let q_max = pick_opt(*q_max, cfg, "q-max")?;
                let points = pick_opt(*points, cfg, "points")?;
                let terms = pick(*terms, cfg, "terms", 10_000)?;
                let eps = pick(*eps, cfg, "eps", DEFAULT_EPS)?;
                let job = match check {
                    CheckArg::Boundary => Job::Boundary {
                        q_max: q_max.unwrap_or(20),
                    },
                    CheckArg::Reflection => Job::Reflection {
                        q_max: q_max.unwrap_or(3),
                        points: points.unwrap_or(10),
                    },
                    CheckArg::MajorArc => Job::MajorArc {
                        q_max,
                        points: points.unwrap_or(10),
                        eps,
                    },
                    CheckArg::Delta => Job::Delta {
                        q_max: q_max.unwrap_or(5),
                        points: points.unwrap_or(5),
                        terms,
                    },
                };
                ("voronoi-check", job)
            }
            Command::Moment { q, a } => ("moment", Job::Moment {
                q: pick(*q, cfg, "q", 1)?,
                a: pick(*a, cfg, "a", 1)?,
            }),
            Command::Discrepancy {
                q_max,
                all_q,
                weighted,
            } => ("discrepancy", Job::Discrepancy {
                q_max: pick(*q_max, cfg, "q-max", 50)?,
                all_q: pick_flag(*all_q, cfg, "all-q")?,
                weighted: pick_flag(*weighted, cfg, "weighted")?,
            }),
            Command::L1 {
                k_min,
                k_max,
                oversample,
            } => ("l1", Job::L1 {
                k_min: pick(*k_min, cfg, "k-min", 1)?,
                k_max: pick_opt(*k_max, cfg, "k-max")?,
                oversample: pick(*oversample, cfg, "oversample", 1)?,
            }),
            Command::DoubleSum => ("double-sum", Job::DoubleSum),
            Command::Hyperbola => ("hyperbola", Job::Hyperbola),
            Command::MinorScan { nodes } => ("minor-scan", Job::MinorScan {
                nodes: pick(*nodes, cfg, "nodes", MIN_SCAN_NODES)?,
            }),
        })
    }
}

fn form_name(f: FormArg) -> String {
    match f {
        FormArg::Beta => "beta",
        FormArg::Sine => "sine",
        FormArg::Both => "both",
    }
    .into()
}

fn parse_form(s: &str) -> anyhow::Result<FormArg> {
    match s {
        "beta" => Ok(FormArg::Beta),
        "sine" => Ok(FormArg::Sine),
        "both" => Ok(FormArg::Both),
        _ => Err(config_error(format!("unknown form {s:?}"))),
    }
}

fn check_name(c: CheckArg) -> String {
    match c {
        CheckArg::Boundary => "boundary",
        CheckArg::Reflection => "reflection",
        CheckArg::MajorArc => "major-arc",
        CheckArg::Delta => "delta",
    }
    .into()
}

fn parse_check(s: &str) -> anyhow::Result<CheckArg> {
    match s {
        "boundary" => Ok(CheckArg::Boundary),
        "reflection" => Ok(CheckArg::Reflection),
        "major-arc" => Ok(CheckArg::MajorArc),
        "delta" => Ok(CheckArg::Delta),
        _ => Err(config_error(format!("unknown check {s:?}"))),
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = match &cli.common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let common = Common::resolve(&cli.common, &cfg)?;
    let (name, job) = Job::resolve(&cli.command, &cfg)?;
    cfg.reject_unused()?;

    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let mut manifest = RunManifest::new(env!("CARGO_PKG_VERSION"), &timestamp, name, common.seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()?;
    let table = pool.install(|| execute(&job, &common, &mut manifest))?;

    std::fs::create_dir_all(&common.out)?;
    let stem = match &job {
        Job::Boundary { .. } => "voronoi-check-boundary",
        Job::Reflection { .. } => "voronoi-check-reflection",
        Job::MajorArc { .. } => "voronoi-check-major-arc",
        Job::Delta { .. } => "voronoi-check-delta",
        _ => name,
    };
    let csv = common.out.join(format!("{stem}.csv"));
    table.write(&csv)?;
    manifest.write(&csv.with_extension("manifest"))?;
    println!("wrote {}", csv.display());
    for (k, v) in &manifest.results {
        println!("{k} = {v}");
    }
    Ok(())
}

fn param(m: &mut RunManifest, key: &str, value: impl ToString) {
    m.params.insert(key.into(), value.to_string());
}

fn result(m: &mut RunManifest, key: &str, value: impl ToString) {
    m.results.insert(key.into(), value.to_string());
}

fn record_set(m: &mut RunManifest, c: &Common) {
    m.g = Some(c.g);
    m.b = Some(c.b);
    m.x = Some(c.x);
}

fn record_arcs(m: &mut RunManifest, c: &Common, params: &ArcParams) {
    if params.eta.is_finite() {
        m.eta = Some(c.eta);
    }
    m.p = Some(params.p);
    m.q = Some(params.q);
}

/// `a ∈ [0, q)` coprime to `q` (for `q = 1` that is `a = 0`).
fn residues(q: u64) -> impl Iterator<Item = u64> {
    (0..q).filter(move |&a| gcd(a, q) == 1)
}

fn execute(job: &Job, c: &Common, m: &mut RunManifest) -> anyhow::Result<CsvTable> {
    match *job {
        Job::DivisorSum => {
            let ds = c.digit_set()?;
            let h = c.h(&ds)?;
            record_set(m, c);
            m.h = Some(h);
            let r = corollary_ratio(&ds, c.x, h)?;
            let mut t = CsvTable::new(["g", "b", "X", "H", "set_size", "divisor_sum", "d2_gg1", "R1", "R2"]);
            t.push(vec![
                c.g.into(),
                c.b.into(),
                c.x.into(),
                h.into(),
                r.set_size.into(),
                r.divisor_sum.into(),
                r.d2_gg1.into(),
                r.r1.into(),
                r.r2.into(),
            ])?;
            result(m, "R1", r.r1);
            result(m, "R2", r.r2);
            Ok(t)
        }
        Job::MainTerm { ref forms, budget } => {
            let ds = c.digit_set()?;
            let h = c.h(&ds)?;
            let params = c.arc_params()?;
            record_set(m, c);
            m.h = Some(h);
            record_arcs(m, c, &params);
            param(m, "budget", budget);
            let table = divisor_table(c.cache(), c.x + 1, c.x.checked_add(h).ok_or(mdd_core::Error::Overflow("X + H"))?)?;
            let mut actual = 0u64;
            ds.for_each_in(c.x, c.x + h, |n| actual += table.get(n).expect("n in (X, X+H]") as u64);
            let mut t = CsvTable::new([
                "form", "P", "Q", "set_size", "main_term", "imag_residue", "nodes", "actual", "actual_over_main",
            ]);
            let mut values = Vec::new();
            for &form in forms {
                let mt = theorem_main_term(&ds, c.x, h, &params, form, budget)?;
                let label = match form {
                    MainTermForm::BetaQuadrature => "beta",
                    MainTermForm::SineKernel => "sine",
                };
                t.push(vec![
                    label.into(),
                    params.p.into(),
                    params.q.into(),
                    mt.set_size.into(),
                    mt.value.into(),
                    mt.imag_residue.into(),
                    mt.nodes.into(),
                    actual.into(),
                    (actual as f64 / mt.value).into(),
                ])?;
                result(m, &format!("main_term_{label}"), mt.value);
                values.push(mt.value);
            }
            param(m, "form", match forms.len() {
                2 => "both",
                _ if forms[0] == MainTermForm::BetaQuadrature => "beta",
                _ => "sine",
            });
            if let [a, b] = values[..] {
                result(m, "form_rel_diff", (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
            }
            result(m, "actual", actual);
            Ok(t)
        }
        Job::Arcs { samples } => {
            let params = c.arc_params()?;
            m.x = Some(c.x);
            record_arcs(m, c, &params);
            param(m, "samples", samples);
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let alphas: Vec<f64> = (0..samples).map(|_| rng.gen::<f64>()).collect();
            let arcs = params.major_arcs();
            let rows: Vec<anyhow::Result<Vec<Value>>> = alphas
                .par_iter()
                .map(|&alpha| {
                    let class = classify(&params, alpha);
                    let brute = arcs.iter().any(|arc| arc.contains(alpha));
                    let (da, dq) = dirichlet_approx(alpha, params.q)?;
                    let err = (alpha - da as f64 / dq as f64).abs();
                    let ok = err <= 1.0 / (dq as f64 * params.q as f64);
                    let (kind, a, q, radius) = match class {
                        mdd_core::Classification::Major(arc) => ("major", arc.a, arc.q, arc.radius),
                        mdd_core::Classification::Minor => ("minor", 0, 0, 0.0),
                    };
                    Ok(vec![
                        alpha.into(),
                        kind.into(),
                        a.into(),
                        q.into(),
                        radius.into(),
                        brute.into(),
                        da.into(),
                        dq.into(),
                        err.into(),
                        ok.into(),
                    ])
                })
                .collect();
            let mut t = CsvTable::new([
                "alpha", "class", "a", "q", "radius", "brute_major", "dirichlet_a", "dirichlet_q", "dirichlet_error",
                "dirichlet_ok",
            ]);
            let (mut agree, mut ok) = (0u64, 0u64);
            for row in rows {
                let row = row?;
                let is_major = matches!(&row[1], Value::Text(s) if s == "major");
                agree += (Value::from(is_major) == row[5]) as u64;
                ok += (row[9] == Value::from(true)) as u64;
                t.push(row)?;
            }
            result(m, "classification_agree", agree);
            result(m, "dirichlet_ok", ok);
            Ok(t)
        }
        Job::Boundary { q_max } => {
            let h = c.h(&c.digit_set()?)?;
            m.x = Some(c.x);
            m.h = Some(h);
            param(m, "check", "boundary");
            param(m, "q-max", q_max);
            let table = divisor_table(c.cache(), c.x + 1, c.x + h)?;
            let (xf, hf) = (c.x as f64, h as f64);
            let cells: Vec<(u64, u64)> = (1..=q_max).flat_map(|q| residues(q).map(move |a| (q, a))).collect();
            let rows: Vec<anyhow::Result<(Vec<Value>, f64)>> = cells
                .par_iter()
                .map(|&(q, a)| {
                    let s = ResidueBuckets::from_table(&table, q, c.x + 1, c.x + h)?.twisted(a);
                    let boundary = ju2_main(q, c.x, h)?;
                    let err = (s - boundary).norm();
                    let qf = q as f64;
                    let norm = qf.sqrt() * hf / xf.sqrt() * xf.ln().powi(2) + qf * xf.powf(0.05);
                    let row = vec![
                        q.into(),
                        a.into(),
                        s.re.into(),
                        s.im.into(),
                        boundary.into(),
                        err.into(),
                        norm.into(),
                        (err / norm).into(),
                    ];
                    Ok((row, err / norm))
                })
                .collect();
            let mut t = CsvTable::new(["q", "a", "s2_re", "s2_im", "boundary", "error", "normalizer", "ratio"]);
            let mut max = 0.0f64;
            for row in rows {
                let (row, ratio) = row?;
                max = max.max(ratio);
                t.push(row)?;
            }
            result(m, "max_ratio", max);
            Ok(t)
        }
        Job::Reflection { q_max, points } => {
            let h = c.h(&c.digit_set()?)?;
            m.x = Some(c.x);
            m.h = Some(h);
            param(m, "check", "reflection");
            param(m, "q-max", q_max);
            param(m, "points", points);
            if points < 2 {
                return Err(config_error("reflection check needs at least 2 points"));
            }
            let xf = c.x as f64;
            let base = xf.powf(-0.5);
            let mut cells = Vec::new();
            for q in 1..=q_max {
                for a in residues(q) {
                    let mut betas: Vec<f64> = (0..points)
                        .map(|j| base * (1.0 + 9.0 * j as f64 / (points - 1) as f64) / q as f64)
                        .collect();
                    let neg: Vec<f64> = betas.iter().rev().map(|b| -b).collect();
                    betas.splice(0..0, neg);
                    cells.extend(betas.into_iter().map(|beta| (q, a, beta)));
                }
            }
            let reach = cells
                .iter()
                .map(|&(q, _, beta)| reflected_range(q, beta, c.x, h).1)
                .max()
                .unwrap_or(1)
                .max(2);
            let short = divisor_table(c.cache(), 1, reach)?;
            let long = divisor_table(c.cache(), c.x, c.x + h)?;
            let norm = xf.sqrt() * xf.ln();
            let rows: Vec<anyhow::Result<(Vec<Value>, f64)>> = cells
                .par_iter()
                .map(|&(q, a, beta)| {
                    let alpha = a as f64 / q as f64 + beta;
                    let lhs = expsum_divisor(alpha, c.x, h, &long)?;
                    let r = ju1_reflection(a, q, beta, c.x, h, &short)?;
                    let err = (lhs - r.value).norm();
                    let row = vec![
                        q.into(),
                        a.into(),
                        beta.into(),
                        lhs.re.into(),
                        lhs.im.into(),
                        r.value.re.into(),
                        r.value.im.into(),
                        err.into(),
                        norm.into(),
                        (err / norm).into(),
                        r.degenerate.into(),
                    ];
                    Ok((row, err / norm))
                })
                .collect();
            let mut t = CsvTable::new([
                "q", "a", "beta", "lhs_re", "lhs_im", "reflected_re", "reflected_im", "error", "normalizer", "ratio",
                "degenerate",
            ]);
            let mut max = 0.0f64;
            for row in rows {
                let (row, ratio) = row?;
                max = max.max(ratio);
                t.push(row)?;
            }
            result(m, "max_ratio", max);
            Ok(t)
        }
        Job::MajorArc { q_max, points, eps } => {
            let h = c.h(&c.digit_set()?)?;
            let params = c.arc_params()?;
            let q_max = q_max.unwrap_or(params.p);
            m.x = Some(c.x);
            m.h = Some(h);
            record_arcs(m, c, &params);
            param(m, "check", "major-arc");
            param(m, "q-max", q_max);
            param(m, "points", points);
            param(m, "eps", eps);
            if points == 0 {
                return Err(config_error("major-arc check needs at least 1 point"));
            }
            let table = divisor_table(c.cache(), c.x, c.x + h)?;
            let n = points as i64;
            let mut cells = Vec::new();
            for q in 1..=q_max {
                for a in residues(q) {
                    let radius = params.radius(q);
                    cells.extend((-n..=n).map(|j| (q, a, radius * j as f64 / (n + 1) as f64)));
                }
            }
            let rows: Vec<anyhow::Result<(Vec<Value>, f64)>> = cells
                .par_iter()
                .map(|&(q, a, beta)| {
                    let e = lemma35_error(a, q, beta, c.x, h, &table, eps)?;
                    let row = vec![
                        q.into(),
                        a.into(),
                        beta.into(),
                        e.raw.into(),
                        e.bound.into(),
                        e.ratio.into(),
                    ];
                    Ok((row, e.ratio))
                })
                .collect();
            let mut t = CsvTable::new(["q", "a", "beta", "raw", "bound", "ratio"]);
            let mut max = 0.0f64;
            for row in rows {
                let (row, ratio) = row?;
                max = max.max(ratio);
                t.push(row)?;
            }
            result(m, "max_ratio", max);
            Ok(t)
        }
        Job::Delta { q_max, points, terms } => {
            let h = c.h(&c.digit_set()?)?;
            m.x = Some(c.x);
            m.h = Some(h);
            param(m, "check", "delta");
            param(m, "q-max", q_max);
            param(m, "points", points);
            param(m, "terms", terms);
            let top = c.x.checked_add(h).ok_or(mdd_core::Error::Overflow("X + H"))?;
            let cum = CumulativeDivisor::from_table(&divisor_table(c.cache(), 1, top)?)?;
            let series = divisor_table(c.cache(), 1, terms.max(1))?;
            let mut cells = Vec::new();
            for q in 1..=q_max {
                for a in residues(q) {
                    cells.extend((0..points).map(|j| (q, a, c.x as f64 + (j as f64 + 0.5) * h as f64 / points as f64)));
                }
            }
            let rows: Vec<anyhow::Result<Vec<Value>>> = cells
                .par_iter()
                .map(|&(q, a, x)| {
                    let exact = delta_exact(a, q, x, &cum)?;
                    let trunc = delta_truncated(a, q, x, terms, &series)?;
                    Ok(vec![
                        q.into(),
                        a.into(),
                        x.into(),
                        exact.re.into(),
                        exact.im.into(),
                        trunc.re.into(),
                        trunc.im.into(),
                        (exact - trunc).norm().into(),
                    ])
                })
                .collect();
            let mut t = CsvTable::new(["q", "a", "x", "exact_re", "exact_im", "truncated_re", "truncated_im", "diff"]);
            for row in rows {
                t.push(row?)?;
            }
            Ok(t)
        }
        Job::Moment { q, a } => {
            m.x = Some(c.x);
            param(m, "q", q);
            param(m, "a", a);
            if c.x > MAX_MOMENT_X {
                return Err(config_error(format!("X = {} exceeds {MAX_MOMENT_X}", c.x)));
            }
            let mut xs = Vec::new();
            let mut d = 100u64;
            while d < c.x {
                if d >= q {
                    xs.push(d);
                }
                d *= 10;
            }
            xs.push(c.x);
            let cum = CumulativeDivisor::from_table(&divisor_table(c.cache(), 1, c.x.max(2))?)?;
            let empirical = second_moment_profile(a, q, &xs, &cum)?;
            let mut t = CsvTable::new(["X", "empirical", "predicted", "ratio"]);
            for (&x, &emp) in xs.iter().zip(&empirical) {
                let pred = second_moment_prediction(q, x);
                t.push(vec![x.into(), emp.into(), pred.into(), (emp / pred).into()])?;
            }
            let last = empirical.last().copied().unwrap_or(0.0);
            result(m, "ratio", last / second_moment_prediction(q, c.x));
            Ok(t)
        }
        Job::Discrepancy {
            q_max,
            all_q,
            weighted,
        } => {
            let ds = c.digit_set()?;
            record_set(m, c);
            param(m, "q-max", q_max);
            param(m, "all-q", all_q);
            param(m, "weighted", weighted);
            let d = discrepancy(&ds, c.x, q_max, !all_q, weighted)?;
            let mut t = CsvTable::new(["q", "max_residue_deviation", "weighted"]);
            for row in &d.rows {
                t.push(vec![row.q.into(), row.max_residue_deviation.into(), row.weighted.into()])?;
            }
            result(m, "set_size", d.set_size);
            result(m, "total", d.total);
            result(m, "ratio", d.ratio);
            Ok(t)
        }
        Job::L1 {
            k_min,
            k_max,
            oversample,
        } => {
            let ds = c.digit_set()?;
            let k_max = match k_max {
                Some(k) => k,
                None => ds
                    .power_exponent(c.x)
                    .ok_or_else(|| config_error(format!("X = {} is not a power of {}; pass --k-max", c.x, c.g)))?,
            };
            m.g = Some(c.g);
            m.b = Some(c.b);
            param(m, "k-min", k_min);
            param(m, "k-max", k_max);
            param(m, "oversample", oversample);
            if oversample == 0 {
                return Err(config_error("oversample must be ≥ 1"));
            }
            let mut t = CsvTable::new(["k", "nodes", "integral", "set_size", "bound", "ratio"]);
            for k in k_min..=k_max {
                let nodes = l1_min_nodes(&ds, k)?
                    .checked_mul(oversample)
                    .ok_or(mdd_core::Error::Overflow("L¹ node count"))?;
                let est = l1_norm_estimate(&ds, k, nodes)?;
                t.push(vec![
                    k.into(),
                    est.nodes.into(),
                    est.integral.into(),
                    est.set_size.into(),
                    est.bound.into(),
                    est.ratio.into(),
                ])?;
            }
            Ok(t)
        }
        Job::DoubleSum => {
            let ds = c.digit_set()?;
            let h = c.h(&ds)?;
            let p = match c.p {
                Some(p) => p,
                None => ArcParams::new(c.x, c.eta)?.p,
            };
            record_set(m, c);
            m.h = Some(h);
            if c.p.is_none() {
                m.eta = Some(c.eta);
            }
            m.p = Some(p);
            let s = ramanujan_double_sums(&ds, c.x, h, p)?;
            let mut t = CsvTable::new(["X", "H", "P", "set_size", "signed", "absolute", "comparison"]);
            t.push(vec![
                c.x.into(),
                h.into(),
                p.into(),
                s.set_size.into(),
                s.signed.into(),
                s.absolute.into(),
                s.comparison.into(),
            ])?;
            result(m, "signed", s.signed);
            result(m, "absolute", s.absolute);
            Ok(t)
        }
        Job::Hyperbola => {
            let ds = c.digit_set()?;
            record_set(m, c);
            let r = hyperbola_check(&ds, c.x)?;
            let mut t = CsvTable::new(["X", "sieve_sum", "hyperbola_sum", "difference"]);
            t.push(vec![c.x.into(), r.sieve_sum.into(), r.hyperbola_sum.into(), r.difference.into()])?;
            result(m, "difference", r.difference);
            Ok(t)
        }
        Job::MinorScan { nodes } => {
            let h = c.h(&c.digit_set()?)?;
            let params = c.arc_params()?;
            m.x = Some(c.x);
            m.h = Some(h);
            record_arcs(m, c, &params);
            param(m, "nodes", nodes);
            let table = divisor_table(c.cache(), c.x, c.x.checked_add(h).ok_or(mdd_core::Error::Overflow("X + H"))?)?;
            let s = minor_arc_sup_scan(c.x, h, &params, nodes, &table)?;
            let mut t = CsvTable::new(["nodes", "minor_count", "empty", "max", "argmax", "ratio"]);
            t.push(vec![
                s.nodes.into(),
                s.minor_count.into(),
                s.empty.into(),
                s.max.into(),
                s.argmax.into(),
                s.ratio.into(),
            ])?;
            result(m, "ratio", s.ratio);
            Ok(t)
        }
    }
}
