use std::io::Write;

use rankone::correlation::{correlate_with_cap, oracle_correlate_with_cap};
use rankone::params::{check_t2, generate_t2_min, j_set, Outcome};
use rankone::rational::fmt_ratio;
use rankone::tensor::approx_error;
use rankone::verify::{
    lemma1_check, lemma2_check, lemma3_check, mixing_profile, sample_shifts, scan_shifts, sidon_count_scoped,
    LemmaReport, MixingStatus, ScanMode, SidonScope,
};
use rankone::{CorrelationResult, Error, Int, LevelSet, ParamSchedule, StageTable};

use crate::args::{Command, Format, Mode, Scope};
use crate::input;
use crate::{Failure, RunConfig, Verdict};

type Out<'a> = &'a mut dyn Write;

pub fn dispatch(command: Command, cfg: &RunConfig, out: Out) -> Result<Verdict, Failure> {
    match command {
        Command::Validate { params } => validate(&input::load_params(&params.params)?, cfg, out),
        Command::Build { params, stages } => {
            let mut sched = input::load_params(&params.params)?;
            if let Some(n) = stages {
                if n == 0 || n > sched.len() {
                    return Err(Failure::Usage(format!("--stages must be in 1..={}", sched.len())));
                }
                sched = sched.truncated(n);
            }
            build(&sched, cfg, out)
        }
        Command::Corr { params, set_a, set_b, m, split } => {
            let table = StageTable::new(&input::load_params(&params.params)?);
            let (a, b) = sets(&table, &set_a, &set_b, cfg)?;
            corr(&table, &a, &b, &input::shifts(&m)?, split, cfg, out)
        }
        Command::Oracle { params, set_a, set_b, m, stage } => {
            let table = StageTable::new(&input::load_params(&params.params)?);
            let (a, b) = sets(&table, &set_a, &set_b, cfg)?;
            let stage = stage.unwrap_or(table.last_stage());
            oracle(&table, &a, &b, &input::shifts(&m)?, stage, cfg, out)
        }
        Command::Sidon { params, j, k, mode, samples, scope, all } => {
            let table = StageTable::new(&input::load_params(&params.params)?);
            let mode = match mode {
                Mode::Exhaustive => ScanMode::Exhaustive,
                Mode::Sample => ScanMode::Sample { n: samples, seed: cfg.seed },
            };
            let scope = match scope {
                Scope::Full => SidonScope::Full,
                Scope::NextTower => SidonScope::NextTower,
            };
            sidon(&table, j, k, mode, scope, all, cfg, out)
        }
        Command::Mixing { params, m_from, m_to, set_a, set_b, k, samples } => {
            let table = StageTable::new(&input::load_params(&params.params)?);
            let (a, b) = sets(&table, &set_a, set_b.as_deref().unwrap_or(&set_a), cfg)?;
            let (lo, hi) = (input::int(&m_from, "--m-from")?, input::int(&m_to, "--m-to")?);
            let shifts = match samples {
                Some(n) => sample_shifts(&lo, &hi, n, cfg.seed),
                None => {
                    let mut v = Vec::new();
                    input::push_range(&mut v, &lo, &hi)?;
                    v
                }
            };
            mixing(&table, &a, &b, &shifts, k, cfg, out)
        }
        Command::Lemma { params, which, r, n, j, i, m, floor } => {
            let table = StageTable::new(&input::load_params(&params.params)?);
            let a = input::set(&table, &floor, cfg.cap)?;
            echo(cfg, "floor", &a);
            let n = n.map(|s| input::int(&s, "--n")).transpose()?;
            let m = m.map(|s| input::int(&s, "--m")).transpose()?;
            let reports = lemma(&table, &a, which, r, n, j, i, m, cfg)?;
            print_lemmas(&reports, out)
        }
        Command::Approx { params, r, n, floor } => {
            let table = StageTable::new(&input::load_params(&params.params)?);
            let a = input::set(&table, &floor, cfg.cap)?;
            echo(cfg, "floor", &a);
            let pairs = match (r, n) {
                (Some(r), Some(n)) => vec![(r, input::int(&n, "--n")?)],
                (None, None) => check_t2(table.schedule()).j_counts.into_keys().collect(),
                _ => return Err(Failure::Usage("give both --r and --n, or neither to sweep".into())),
            };
            approx(&table, &a, &pairs, cfg, out)
        }
        Command::Generate { t2_min, h1, pairs } => {
            if !t2_min {
                return Err(Failure::Usage("generate needs a generator flag (--t2-min)".into()));
            }
            let sched = generate_t2_min(input::int(&h1, "--h1")?, &input::pairs(&pairs)?)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            out.write_all(sched.to_json().as_bytes())?;
            Ok(Verdict::Pass)
        }
    }
}

fn echo(cfg: &RunConfig, name: &str, set: &LevelSet) {
    if cfg.verbose {
        eprintln!("{name} = {set}");
    }
}

fn sets(table: &StageTable, a: &str, b: &str, cfg: &RunConfig) -> Result<(LevelSet, LevelSet), Failure> {
    let a = input::set(table, a, cfg.cap)?;
    let b = input::set(table, b, cfg.cap)?;
    echo(cfg, "set-a", &a);
    echo(cfg, "set-b", &b);
    Ok((a, b))
}

fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Fail => "FAIL",
        Outcome::NotApplicable => "n/a",
    }
}

fn validate(sched: &ParamSchedule, cfg: &RunConfig, out: Out) -> Result<Verdict, Failure> {
    let rep = check_t2(sched);
    match cfg.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["stage", "condition", "outcome", "witness"])?;
            for e in &rep.entries {
                w.write_record([&e.stage.to_string(), e.condition.label(), outcome_label(e.outcome), &e.witness])?;
            }
            w.flush()?;
        }
        Format::Table => {
            let width = rep.entries.iter().map(|e| e.condition.label().chars().count()).max().unwrap_or(0);
            for e in &rep.entries {
                let label = e.condition.label();
                let pad = width - label.chars().count();
                writeln!(
                    out,
                    "stage {:>3}  {label}{:pad$}  {:<4}  {}",
                    e.stage,
                    "",
                    outcome_label(e.outcome),
                    e.witness
                )?;
            }
            let rs: Vec<String> = rep.r_values.iter().map(ToString::to_string).collect();
            let missing: Vec<String> = rep.r_missing.iter().map(ToString::to_string).collect();
            writeln!(
                out,
                "column counts: {} (missing: {})",
                rs.join(" "),
                if missing.is_empty() { "none".into() } else { missing.join(" ") }
            )?;
            for ((r, n), count) in &rep.j_counts {
                writeln!(out, "|J({r},{n})| = {count}")?;
            }
            for note in &rep.notes {
                writeln!(out, "note: {note}")?;
            }
            let verdict = if rep.prefix_consistent() { "prefix consistent" } else { "violations found" };
            writeln!(out, "verdict: {verdict}")?;
        }
    }
    Ok(if rep.prefix_consistent() { Verdict::Pass } else { Verdict::Violation })
}

fn build(sched: &ParamSchedule, cfg: &RunConfig, out: Out) -> Result<Verdict, Failure> {
    let table = StageTable::new(sched);
    let header = ["stage", "h", "w", "measure", "offsets"];
    let rows: Vec<[String; 5]> = (1..=table.last_stage())
        .map(|j| {
            let offsets = match table.offsets(j) {
                Ok(o) => o.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                Err(_) => "-".to_string(),
            };
            [
                j.to_string(),
                table.height(j).to_string(),
                fmt_ratio(table.width(j)),
                fmt_ratio(table.tower_measure(j)),
                offsets,
            ]
        })
        .collect();
    match cfg.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header)?;
            for row in &rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Format::Table => {
            let mut widths = header.map(str::len);
            for row in &rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: [&str; 5]| {
                let body: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
                body.join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(header))?;
            for row in &rows {
                writeln!(out, "{}", line(row.each_ref().map(String::as_str)))?;
            }
        }
    }
    Ok(Verdict::Pass)
}

fn corr(
    table: &StageTable,
    a: &LevelSet,
    b: &LevelSet,
    shifts: &[Int],
    split: bool,
    cfg: &RunConfig,
    out: Out,
) -> Result<Verdict, Failure> {
    let results = cfg.exec.map(shifts, |m| correlate_with_cap(table, a, b, m, cfg.cap));
    let mut w = csv::Writer::from_writer(out);
    if split {
        w.write_record(["m", "lo_num", "lo_den", "unresolved_num", "unresolved_den", "exact"])?;
    } else {
        w.write_record(["m", "lo", "unresolved", "exact"])?;
    }
    for (m, res) in shifts.iter().zip(results) {
        let c: CorrelationResult = res?;
        if split {
            w.write_record([
                m.to_string(),
                c.lo.numer().to_string(),
                c.lo.denom().to_string(),
                c.unresolved.numer().to_string(),
                c.unresolved.denom().to_string(),
                if c.is_exact() { "1" } else { "0" }.to_string(),
            ])?;
        } else {
            let exact = if c.is_exact() { "exact" } else { "partial" };
            w.write_record([m.to_string(), fmt_ratio(&c.lo), fmt_ratio(&c.unresolved), exact.to_string()])?;
        }
    }
    w.flush()?;
    Ok(Verdict::Pass)
}

fn oracle(
    table: &StageTable,
    a: &LevelSet,
    b: &LevelSet,
    shifts: &[Int],
    stage: usize,
    cfg: &RunConfig,
    out: Out,
) -> Result<Verdict, Failure> {
    let results = cfg.exec.map(shifts, |m| oracle_correlate_with_cap(table, a, b, m, stage, cfg.cap));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "value"])?;
    for (m, res) in shifts.iter().zip(results) {
        w.write_record([m.to_string(), fmt_ratio(&res?)])?;
    }
    w.flush()?;
    Ok(Verdict::Pass)
}

#[allow(clippy::too_many_arguments)]
fn sidon(
    table: &StageTable,
    j: usize,
    k: usize,
    mode: ScanMode,
    scope: SidonScope,
    all: bool,
    cfg: &RunConfig,
    out: Out,
) -> Result<Verdict, Failure> {
    let shifts = scan_shifts(table, j, mode)?;
    let results = cfg.exec.map(&shifts, |m| sidon_count_scoped(table, j, m, k, scope));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "count", "columns", "status"])?;
    let (mut max, mut worst, mut violations, mut unresolved) = (0, None, 0, 0);
    for (m, res) in shifts.iter().zip(results) {
        let (count, columns, status) = match res {
            Ok(rep) => {
                if worst.is_none() || rep.count() > max {
                    max = rep.count();
                    worst = Some(m.clone());
                }
                let cols: Vec<String> = rep.touched.iter().map(ToString::to_string).collect();
                let status = if rep.pass() { "pass" } else { "violation" };
                (rep.count().to_string(), cols.join(" "), status)
            }
            Err(Error::Unresolved(_)) => (String::new(), String::new(), "unresolved"),
            Err(e) => return Err(e.into()),
        };
        match status {
            "violation" => violations += 1,
            "unresolved" => unresolved += 1,
            _ => {}
        }
        if all || status != "pass" {
            w.write_record([m.to_string(), count, columns, status.to_string()])?;
        }
    }
    w.flush()?;
    let worst = worst.map(|m| m.to_string()).unwrap_or_else(|| "-".into());
    eprintln!(
        "stage {j}, k={k}: scanned {}, max count {max} (first at m={worst}), {violations} violations, {unresolved} unresolved",
        shifts.len()
    );
    Ok(if violations > 0 {
        Verdict::Violation
    } else if unresolved > 0 {
        Verdict::Unresolved
    } else {
        Verdict::Pass
    })
}

fn mixing(
    table: &StageTable,
    a: &LevelSet,
    b: &LevelSet,
    shifts: &[Int],
    k: usize,
    cfg: &RunConfig,
    out: Out,
) -> Result<Verdict, Failure> {
    let rows = mixing_profile(table, a, b, shifts, k, cfg.exec);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "lo", "unresolved", "exact", "bound", "status"])?;
    let mut verdict = Verdict::Pass;
    for row in &rows {
        let (lo, unres, exact) = match &row.value {
            Some(c) => (fmt_ratio(&c.lo), fmt_ratio(&c.unresolved), if c.is_exact() { "exact" } else { "partial" }),
            None => (String::new(), String::new(), ""),
        };
        let status = match &row.status {
            MixingStatus::Within => "within",
            MixingStatus::Violation => "violation",
            MixingStatus::NotApplicable => "n/a",
            MixingStatus::Unresolved => "unresolved",
            MixingStatus::Failed(msg) => {
                if cfg.verbose {
                    eprintln!("m={}: {msg}", row.m);
                }
                "error"
            }
        };
        verdict = verdict.max(match status {
            "violation" => Verdict::Violation,
            "unresolved" | "error" => Verdict::Unresolved,
            _ => Verdict::Pass,
        });
        let bound = row.bound.as_ref().map(fmt_ratio).unwrap_or_default();
        w.write_record([&row.m.to_string(), &lo, &unres, exact, &bound, status])?;
    }
    w.flush()?;
    Ok(verdict)
}

#[allow(clippy::too_many_arguments)]
fn lemma(
    table: &StageTable,
    a: &LevelSet,
    which: u8,
    r: Option<usize>,
    n: Option<Int>,
    j: Option<usize>,
    i: Option<usize>,
    m: Option<Int>,
    cfg: &RunConfig,
) -> Result<Vec<LemmaReport>, Failure> {
    let rn = || match (r, n.clone()) {
        (Some(r), Some(n)) => Ok((r, n)),
        _ => Err(Failure::Usage(format!("lemma {which} needs --r and --n"))),
    };
    let js = |r: usize, n: &Int| {
        let js = j_set(table.schedule(), r, n);
        if js.is_empty() {
            Err(Failure::Compute(Error::EmptyJSet { r, n: n.clone() }))
        } else {
            Ok(js)
        }
    };
    let mut reports = Vec::new();
    match which {
        1 => {
            let stages = match j {
                Some(j) => vec![j],
                None => {
                    let (r, n) = rn()?;
                    js(r, &n)?
                }
            };
            for j in stages {
                let shifts = match &m {
                    Some(m) => vec![m.clone()],
                    None => vec![Int::from(0), table.stage_params(j)?.gap().clone()],
                };
                for m in shifts {
                    reports.push(lemma1_check(table, a, j, &m)?);
                }
            }
        }
        2 => {
            let (r, n) = rn()?;
            let pairs = match (i, j) {
                (Some(i), Some(j)) => vec![(i, j)],
                (None, None) => {
                    let js = js(r, &n)?;
                    js.iter().flat_map(|&p| js.iter().filter(move |&&q| q != p).map(move |&q| (p, q))).collect()
                }
                _ => return Err(Failure::Usage("give both --i and --j, or neither".into())),
            };
            for (i, j) in pairs {
                reports.push(lemma2_check(table, a, r, &n, i, j)?);
            }
        }
        _ => {
            let (r, n) = rn()?;
            reports.push(lemma3_check(table, a, r, &n, cfg.exec)?);
        }
    }
    Ok(reports)
}

fn print_lemmas(reports: &[LemmaReport], out: Out) -> Result<Verdict, Failure> {
    for rep in reports {
        let line =
            format!("lhs={}, rhs={}, residual={}", fmt_ratio(&rep.lhs), fmt_ratio(&rep.rhs), fmt_ratio(&rep.residual));
        if reports.len() == 1 {
            writeln!(out, "{line}")?;
        } else {
            writeln!(out, "{}: {line}", rep.instance)?;
        }
    }
    Ok(if reports.iter().all(LemmaReport::holds) { Verdict::Pass } else { Verdict::Violation })
}

fn approx(
    table: &StageTable,
    a: &LevelSet,
    pairs: &[(usize, Int)],
    cfg: &RunConfig,
    out: Out,
) -> Result<Verdict, Failure> {
    let mut verdict = Verdict::Pass;
    let mut csv_out = (cfg.format == Format::Csv).then(|| csv::Writer::from_writer(Vec::new()));
    if let Some(w) = csv_out.as_mut() {
        w.write_record([
            "r",
            "n",
            "j_count",
            "error_sq_lo",
            "error_sq_unresolved",
            "rhs_scaled_lo",
            "rhs_scaled_unresolved",
            "bound",
            "verdict",
        ])?;
    }
    for (r, n) in pairs {
        let rep = approx_error(table, a, *r, n, cfg.exec)?;
        let label = match rep.within_bound {
            Some(true) => "within",
            Some(false) => "exceeds",
            None => "undecided",
        };
        let residual_ok = rep.residual().map(|res| res == rankone::rational::int(0));
        verdict = verdict.max(match (rep.within_bound, residual_ok) {
            (Some(false), _) | (_, Some(false)) => Verdict::Violation,
            (None, _) | (_, None) => Verdict::Unresolved,
            _ => Verdict::Pass,
        });
        match csv_out.as_mut() {
            Some(w) => w.write_record([
                r.to_string(),
                n.to_string(),
                rep.j_count.to_string(),
                fmt_ratio(&rep.error_sq.lo),
                fmt_ratio(&rep.error_sq.unresolved),
                fmt_ratio(&rep.lemma3_rhs_scaled.lo),
                fmt_ratio(&rep.lemma3_rhs_scaled.unresolved),
                fmt_ratio(&rep.bound),
                label.to_string(),
            ])?,
            None => {
                writeln!(out, "r={r}, n={n}, |J|={}", rep.j_count)?;
                writeln!(out, "error²={}", rep.error_sq)?;
                writeln!(out, "lemma3_rhs·r⁴={}", rep.lemma3_rhs_scaled)?;
                let residual = rep.residual().map(|q| fmt_ratio(&q)).unwrap_or_else(|| "undecided".into());
                writeln!(out, "residual={residual}")?;
                writeln!(out, "bound={}", fmt_ratio(&rep.bound))?;
                writeln!(out, "verdict={label}")?;
            }
        }
    }
    if let Some(w) = csv_out {
        let bytes = w.into_inner().map_err(|e| Failure::Io(e.into_error()))?;
        out.write_all(&bytes)?;
    }
    Ok(verdict)
}
