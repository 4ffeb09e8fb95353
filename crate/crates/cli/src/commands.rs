use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use arn_core::evolve::{quantile, Direction, GenerationStats};
use arn_core::experiments::{gene_count_table, mutation_impact, perturb_site, sweep as run_sweep};
use arn_core::report::{
    dynamics_svg, evolution_csv, evolution_svg, gene_count_csv, overlay_svg, trace_csv,
};
use arn_core::{
    mix_seed, random_genome, scan_genes, DnaSequence, Problem, Simulation, SiteKind, Sweep,
    DEFAULT_SEED,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{ConfigError, GaArgs, SimArgs};
use crate::manifest::{input_entry, OutputDir};

/// Stream tags used to derive per-purpose seeds from the user seed.
const MUTATION_STREAM: u64 = 0x6d75_7473;

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn read_genome(path: &Path) -> Result<DnaSequence> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DnaSequence::parse_genome_text(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn gen(length: usize, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let genome = random_genome(length, &mut ChaCha8Rng::seed_from_u64(seed));
    let genes = scan_genes(&genome).len();
    let text = format!("{genome}\n");
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("genes: {genes}");
        }
        None => {
            emit(&text)?;
            eprintln!("genes: {genes}");
        }
    }
    Ok(())
}

pub fn parse(path: &Path) -> Result<()> {
    let genome = read_genome(path)?;
    let genes = scan_genes(&genome);
    let table = json!({ "length": genome.len(), "gene_count": genes.len(), "genes": genes });
    emit(&format!("{}\n", serde_json::to_string_pretty(&table)?))
}

pub fn simulate(genome_path: &Path, out_dir: &Path, args: &SimArgs) -> Result<()> {
    let config = args.resolve()?;
    let genome = read_genome(genome_path)?;
    let mut sim = Simulation::from_genome(&genome, config.clone())?;
    let trace = sim.run();

    let mut out = OutputDir::create(out_dir)?;
    out.write("trace.csv", trace_csv(&trace))?;
    out.write_json("run.json", &trace.metadata)?;
    out.write("dynamics.svg", dynamics_svg(&trace))?;
    out.finish(
        "simulate",
        config.seed,
        &config,
        vec![input_entry(genome_path)?],
    )?;
    println!(
        "genes: {}, cycles: {}, output: {}",
        trace.gene_count(),
        config.cycles,
        out_dir.display()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct RunSummary {
    run: usize,
    master_seed: u64,
    best_fitness: f64,
    best_gene_count: usize,
    genome_file: String,
}

/// Per-generation spread of the best-so-far fitness across runs.
fn aggregate(histories: &[Vec<GenerationStats>], direction: Direction) -> Vec<GenerationStats> {
    let generations = histories.iter().map(Vec::len).min().unwrap_or(0);
    (0..generations)
        .map(|g| {
            let mut values: Vec<f64> = histories
                .iter()
                .map(|h| {
                    h[..=g]
                        .iter()
                        .map(|s| s.best)
                        .reduce(|a, b| if direction.is_better(b, a) { b } else { a })
                        .expect("history is nonempty")
                })
                .collect();
            values.sort_by(f64::total_cmp);
            let best = match direction {
                Direction::Minimize => values[0],
                Direction::Maximize => values[values.len() - 1],
            };
            GenerationStats {
                generation: g,
                best,
                median: quantile(&values, 0.5),
                q25: quantile(&values, 0.25),
                q75: quantile(&values, 0.75),
            }
        })
        .collect()
}

pub fn evolve(problem: u32, out_dir: &Path, runs: usize, ga: &GaArgs, sim: &SimArgs) -> Result<()> {
    if runs == 0 {
        bail!(ConfigError("--runs must be at least 1".into()));
    }
    let problem = Problem::from_id(problem)?;
    let config = ga.resolve(sim)?;
    let direction = problem.direction();
    let seed = config.sim.seed;

    let mut out = OutputDir::create(out_dir)?;
    let mut summaries = Vec::with_capacity(runs);
    let mut histories = Vec::with_capacity(runs);
    let mut overall: Option<(usize, arn_core::Individual)> = None;
    for r in 0..runs {
        let master_seed = mix_seed(seed, r as u64);
        let evo = arn_core::evolve(&config, problem, master_seed)?;
        let prefix = if runs == 1 {
            String::new()
        } else {
            format!("run_{r:02}/")
        };
        out.write(
            &format!("{prefix}evolution.csv"),
            evolution_csv(&evo.history),
        )?;
        let genome_file = format!("{prefix}best_genome.txt");
        out.write(&genome_file, format!("{}\n", evo.best.genome))?;
        summaries.push(RunSummary {
            run: r,
            master_seed,
            best_fitness: evo.best.fitness,
            best_gene_count: evo.best.gene_count,
            genome_file,
        });
        let better = overall
            .as_ref()
            .is_none_or(|(_, b)| direction.is_better(evo.best.fitness, b.fitness));
        if better {
            overall = Some((r, evo.best.clone()));
        }
        histories.push(evo.history);
    }
    let (best_run, best) = overall.expect("at least one run");

    let title = format!("Problem {} fitness", problem.id());
    if runs == 1 {
        out.write("evolution.svg", evolution_svg(&title, &histories[0]))?;
    } else {
        let agg = aggregate(&histories, direction);
        out.write("evolution_aggregate.csv", evolution_csv(&agg))?;
        out.write("evolution.svg", evolution_svg(&title, &agg))?;
        out.write("best_genome.txt", format!("{}\n", best.genome))?;
    }
    let summary = json!({
        "problem": problem.id(),
        "direction": direction,
        "runs": summaries,
        "best_run": best_run,
        "best_fitness": best.fitness,
        "best_gene_count": best.gene_count,
    });
    out.write_json("summary.json", &summary)?;
    out.finish(
        "evolve",
        seed,
        &json!({ "problem": problem.id(), "runs": runs, "ga": config }),
        vec![],
    )?;
    println!(
        "problem {}: best fitness {} over {runs} run(s), output: {}",
        problem.id(),
        best.fitness,
        out_dir.display()
    );
    Ok(())
}

pub fn sweep(
    genome_path: &Path,
    param: &str,
    values: &str,
    out_dir: &Path,
    args: &SimArgs,
) -> Result<()> {
    let base = args.resolve()?;
    let spec = Sweep::parse(param, values)?;
    let genome = read_genome(genome_path)?;
    let runs = run_sweep(&genome, &base, &spec)?;

    let mut out = OutputDir::create(out_dir)?;
    let mut index = Vec::with_capacity(runs.len());
    for (i, (run, config)) in runs.iter().zip(spec.configs(&base)).enumerate() {
        let file = format!("run_{i:02}.csv");
        out.write(&file, trace_csv(&run.trace))?;
        index.push(
            json!({ "value": run.label, "trace": file, "seed": config.seed, "config": config }),
        );
    }
    let labelled: Vec<(String, &arn_core::Trace)> = runs
        .iter()
        .map(|r| (format!("{} = {}", spec.name(), r.label), &r.trace))
        .collect();
    out.write(
        "overlay.svg",
        overlay_svg(&format!("Protein 1, {} sweep", spec.name()), &labelled),
    )?;
    out.write_json(
        "sweep.json",
        &json!({ "param": spec.name(), "runs": index }),
    )?;
    out.finish(
        "sweep",
        base.seed,
        &json!({ "base": base, "sweep": spec }),
        vec![input_entry(genome_path)?],
    )?;
    println!(
        "{} runs of {}, output: {}",
        runs.len(),
        spec.name(),
        out_dir.display()
    );
    Ok(())
}

/// `START..END[:STEP]` with inclusive end, or a comma-separated list.
pub fn parse_lengths(spec: &str) -> Result<Vec<usize>> {
    let bad = || ConfigError(format!("invalid length spec {spec:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let lengths = if let Some((start, rest)) = spec.split_once("..") {
        let (end, step) = match rest.split_once(':') {
            Some((end, step)) => (num(end)?, num(step)?),
            None => (num(rest)?, 1000),
        };
        let start = num(start)?;
        if step == 0 || end < start {
            return Err(bad().into());
        }
        (start..=end).step_by(step).collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if lengths.is_empty() {
        return Err(bad().into());
    }
    Ok(lengths)
}

pub fn stats(
    lengths: &str,
    trials: usize,
    seed: Option<u64>,
    out_dir: Option<&Path>,
) -> Result<()> {
    let lengths = parse_lengths(lengths)?;
    if trials == 0 {
        bail!(ConfigError("--trials must be at least 1".into()));
    }
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let rows = gene_count_table(&lengths, trials, seed);
    let csv = gene_count_csv(&rows);
    emit(&csv)?;
    if let Some(dir) = out_dir {
        let mut out = OutputDir::create(dir)?;
        out.write("gene_counts.csv", &csv)?;
        out.finish(
            "stats",
            seed,
            &json!({ "lengths": lengths, "trials": trials }),
            vec![],
        )?;
    }
    Ok(())
}

pub fn perturb(
    genome_path: &Path,
    gene: usize,
    site: SiteKind,
    offset: (i64, i64),
    out_dir: &Path,
    args: &SimArgs,
) -> Result<()> {
    let config = args.resolve()?;
    let genome = read_genome(genome_path)?;
    let (baseline, perturbed) = perturb_site(&genome, &config, gene, site, offset)?;
    let max_diff = baseline
        .concentrations
        .iter()
        .flatten()
        .zip(perturbed.concentrations.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let mut out = OutputDir::create(out_dir)?;
    out.write("baseline.csv", trace_csv(&baseline))?;
    out.write("perturbed.csv", trace_csv(&perturbed))?;
    let title = format!(
        "Protein 1, gene {gene} {site} moved by ({}, {})",
        offset.0, offset.1
    );
    out.write(
        "overlay.svg",
        overlay_svg(
            &title,
            &[
                ("baseline".into(), &baseline),
                ("perturbed".into(), &perturbed),
            ],
        ),
    )?;
    out.write_json(
        "perturb.json",
        &json!({
            "gene": gene,
            "site": site,
            "dx": offset.0,
            "dy": offset.1,
            "max_abs_concentration_difference": max_diff,
        }),
    )?;
    out.finish(
        "perturb",
        config.seed,
        &json!({ "sim": config, "gene": gene, "site": site, "dx": offset.0, "dy": offset.1 }),
        vec![input_entry(genome_path)?],
    )?;
    println!(
        "max concentration difference {max_diff}, output: {}",
        out_dir.display()
    );
    Ok(())
}

pub fn mutstudy(genome_path: &Path, max_k: usize, out_dir: &Path, args: &SimArgs) -> Result<()> {
    let config = args.resolve()?;
    let genome = read_genome(genome_path)?;
    let mutation_seed = mix_seed(config.seed, MUTATION_STREAM);
    let mut rng = ChaCha8Rng::seed_from_u64(mutation_seed);
    let runs = mutation_impact(&genome, &config, max_k, &mut rng)?;

    let mut out = OutputDir::create(out_dir)?;
    let mut index = Vec::with_capacity(runs.len());
    for run in &runs {
        let csv = format!("mutant_k{}.csv", run.k);
        let dna = format!("mutant_k{}.dna", run.k);
        out.write(&csv, trace_csv(&run.trace))?;
        out.write(&dna, format!("{}\n", run.genome))?;
        index.push(json!({
            "k": run.k,
            "mutations": run.mutations,
            "gene_count": run.trace.gene_count(),
            "trace": csv,
            "genome": dna,
        }));
    }
    let labelled: Vec<(String, &arn_core::Trace)> = runs
        .iter()
        .map(|r| (format!("k = {}", r.k), &r.trace))
        .collect();
    out.write(
        "overlay.svg",
        overlay_svg("Protein 1 under regulatory mutations", &labelled),
    )?;
    out.write_json(
        "mutations.json",
        &json!({ "mutation_seed": mutation_seed, "runs": index }),
    )?;
    out.finish(
        "mutstudy",
        config.seed,
        &json!({ "sim": config, "max_k": max_k, "mutation_seed": mutation_seed }),
        vec![input_entry(genome_path)?],
    )?;
    println!("{} mutants, output: {}", runs.len(), out_dir.display());
    Ok(())
}
