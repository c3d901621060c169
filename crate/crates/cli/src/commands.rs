use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use tsp_core::features::{read_csv, split_train_test, KnowledgeBase};
use tsp_core::metrics::{render_csv, render_table};
use tsp_core::pipeline::{
    baseline_elm, compare_optimizers, evaluate_rows, generate_knowledge_base, optimize as run_optimize,
    render_compare_csv, render_compare_table, TspModel,
};
use tsp_core::simkit::{load_model, ScenarioGridSpec};
use tsp_core::swarm::{write_trace_csv, Optimizer};

use crate::config::RunConfig;

/// Exit code 2 for bad input or usage, 1 for failures while running.
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

pub fn report(f: Failure) -> ExitCode {
    let (code, err) = match f {
        Failure::Usage(e) => (2, e),
        Failure::Runtime(e) => (1, e),
    };
    eprintln!("error: {err:#}");
    ExitCode::from(code)
}

trait ResultExt<T> {
    fn usage(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ResultExt<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

type CmdResult = Result<(), Failure>;

fn write(path: &Path, contents: &str) -> CmdResult {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display())).runtime()
}

fn create_out(cfg: &RunConfig) -> CmdResult {
    std::fs::create_dir_all(&cfg.out)
        .with_context(|| format!("cannot create {}", cfg.out.display()))
        .runtime()
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    KnowledgeBase::load(path)
        .map(|(kb, _)| kb)
        .with_context(|| format!("cannot load knowledge base {}", path.display()))
        .usage()
}

fn percent(part: usize, total: usize) -> f64 {
    100.0 * part as f64 / total.max(1) as f64
}

pub fn generate(cfg: &RunConfig) -> CmdResult {
    let model_path = cfg.model.as_ref().ok_or_else(|| anyhow!("no model file given (--model)")).usage()?;
    let grid_path = cfg.grid.as_ref().ok_or_else(|| anyhow!("no scenario grid given (--grid)")).usage()?;
    let model = load_model(model_path).usage()?;
    model.validate().usage()?;
    let grid = ScenarioGridSpec::load(grid_path).usage()?;
    if grid.is_empty() {
        return Err(Failure::Usage(anyhow!("scenario grid {} is empty", grid_path.display())));
    }
    let kb_path = cfg.kb_path();
    if let Some(dir) = kb_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display())).runtime()?;
    }
    let (kb, meta) = generate_knowledge_base(&model, &grid, cfg.seed, cfg.train_fraction).runtime()?;
    kb.save(&kb_path, &meta).runtime()?;
    let (s, u) = kb.class_counts();
    println!(
        "{}: {} samples, {} features; stable {s} ({:.1}%), unstable {u} ({:.1}%)",
        kb_path.display(),
        kb.len(),
        kb.dimension(),
        percent(s, kb.len()),
        percent(u, kb.len())
    );
    if !meta.constant_features.is_empty() {
        println!("constant features (zeroed): {}", meta.constant_features.join(", "));
    }
    Ok(())
}

pub fn optimize(cfg: &RunConfig) -> CmdResult {
    let kb = load_kb(&cfg.kb_path())?;
    let split = split_train_test(kb.labels(), cfg.train_fraction, cfg.seed).usage()?;
    let out = run_optimize(&kb, &split, cfg.train_fraction, cfg.optimizer, &cfg.swarm).runtime()?;
    create_out(cfg)?;
    out.model.save(&cfg.model_path()).runtime()?;
    let mut trace = Vec::new();
    write_trace_csv(&out.result.trace, &mut trace).runtime()?;
    write(&cfg.out.join("trace.csv"), &String::from_utf8(trace).expect("csv is utf-8"))?;

    let r = &out.result;
    let mut text = String::new();
    let _ = writeln!(text, "seed = {}", cfg.seed);
    let _ = writeln!(text, "optimizer = {}", cfg.optimizer);
    let _ = writeln!(text, "training rows = {}", split.train.len());
    let _ = writeln!(text, "best cv fitness = {:.4}", r.best_fitness);
    let _ = writeln!(text, "iterations = {}", r.iterations());
    let _ = writeln!(text, "mutation events = {}", r.mutation_events());
    let _ = writeln!(text, "selected features = {}", out.model.inputs);
    let _ = writeln!(text, "effective hidden nodes = {}", out.model.effective_hidden());
    let _ = writeln!(text, "training accuracy = {:.4}", out.train_accuracy);
    let _ = writeln!(text, "train time/s = {:.3}", out.total_seconds);
    let _ = writeln!(text, "fitness time/s = {:.3}", out.elm_seconds);
    write(&cfg.out.join("optimize.txt"), &text)?;
    print!("{text}");
    Ok(())
}

pub fn evaluate(cfg: &RunConfig) -> CmdResult {
    let model_path = cfg.model_path();
    let model = TspModel::load(&model_path)
        .with_context(|| format!("cannot load model {}", model_path.display()))
        .usage()?;
    let kb = load_kb(&cfg.kb_path())?;
    if kb.dimension() != model.feature_mask.len() {
        return Err(Failure::Usage(anyhow!(
            "model expects {} features, knowledge base has {}",
            model.feature_mask.len(),
            kb.dimension()
        )));
    }
    let split = split_train_test(kb.labels(), model.train_fraction, model.split_seed).usage()?;
    let name = format!("{}-ELM", model.optimizer.to_uppercase());

    let start = Instant::now();
    let baseline = baseline_elm(&kb, &split, model.hidden, model.seed).runtime()?;
    let baseline_train = start.elapsed().as_secs_f64();
    let mut base = evaluate_rows("ELM", &baseline, &kb, &split.test).runtime()?;
    base.train_seconds = baseline_train;
    let test = evaluate_rows(&name, &model, &kb, &split.test).runtime()?;
    let train = evaluate_rows(&format!("{name} (train)"), &model, &kb, &split.train).runtime()?;
    let reports = [base, test, train];

    create_out(cfg)?;
    write(&cfg.out.join("report.csv"), &render_csv(&reports, false))?;
    let table = format!(
        "seed = {}\ntest rows = {}, training rows = {}\n{}",
        model.seed,
        split.test.len(),
        split.train.len(),
        render_table(&reports)
    );
    write(&cfg.out.join("report.txt"), &table)?;
    print!("{table}");
    Ok(())
}

pub fn compare(cfg: &RunConfig) -> CmdResult {
    let kb = load_kb(&cfg.kb_path())?;
    let split = split_train_test(kb.labels(), cfg.train_fraction, cfg.seed).usage()?;
    let (runs, rows) =
        compare_optimizers(&kb, &split, cfg.train_fraction, &cfg.swarm, &Optimizer::ALL, cfg.repeats).runtime()?;
    create_out(cfg)?;
    write(&cfg.out.join("compare.csv"), &render_compare_csv(&rows, false))?;
    let mut per_run = String::from("optimizer,seed,best_fitness,effective_hidden,iterations,mutations\n");
    for r in &runs {
        let _ = writeln!(
            per_run,
            "{},{},{},{},{},{}",
            r.optimizer, r.seed, r.best_fitness, r.effective_hidden, r.iterations, r.mutations
        );
    }
    write(&cfg.out.join("compare_runs.csv"), &per_run)?;
    let table = format!("seed = {}\nrepeats = {}\n{}", cfg.seed, cfg.repeats, render_compare_table(&rows));
    write(&cfg.out.join("compare.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn parse_row(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|f| f.trim().parse::<f64>().map_err(|_| anyhow!("bad number {f:?}")))
        .collect()
}

pub fn predict(cfg: &RunConfig, row: Option<&str>, input: Option<&Path>) -> CmdResult {
    let model_path = cfg.model_path();
    let model = TspModel::load(&model_path)
        .with_context(|| format!("cannot load model {}", model_path.display()))
        .usage()?;
    let predictor = model.predictor().usage()?;
    let rows: Vec<Vec<f64>> = match (row, input) {
        (Some(r), _) => vec![parse_row(r).usage()?],
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).usage()?;
            if text.starts_with("label,") {
                let (x, _) = read_csv(text.as_bytes()).usage()?;
                x.row_iter().map(|r| r.iter().copied().collect()).collect()
            } else {
                text.lines().filter(|l| !l.trim().is_empty()).map(parse_row).collect::<anyhow::Result<_>>().usage()?
            }
        }
        (None, None) => return Err(Failure::Usage(anyhow!("give a feature vector with --row or --input"))),
    };
    for r in &rows {
        if r.len() != predictor.dimension() {
            return Err(Failure::Usage(anyhow!(
                "row has {} features, model expects {}",
                r.len(),
                predictor.dimension()
            )));
        }
        let start = Instant::now();
        let (label, score) = predictor.predict(r).usage()?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        println!("{label} {score} {ms:.3} ms");
    }
    Ok(())
}
