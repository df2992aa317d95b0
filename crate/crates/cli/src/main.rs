//! `nilprob`: exact and sampled nilpotence probabilities from the command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nilprob_core::cache::{cache_key, ResultCache, CACHE_DIR_ENV};
use nilprob_core::catalog::{default_corpus, families};
use nilprob_core::definition::{GroupDef, ResolveOptions};
use nilprob_core::group::{AssocCheck, GroupTable, DEFAULT_MAX_ORDER};
use nilprob_core::montecarlo::{estimate_np, EstimateResult, DEFAULT_Z};
use nilprob_core::nilprob::{np_bruteforce, np_fast, np_sup, Budgets, NpResult, NpSup, ShiftTuple};
use nilprob_core::perm::{schreier_sims, Permutation};
use nilprob_core::structure::{
    center, conjugacy_classes, lower_central_series, nilpotency_class, normal_subgroups, SubgroupRef,
};
use nilprob_core::verify::{run_corpus_cached, CorpusConfig, CorpusEntry, VerificationReport};
use nilprob_core::Error;

#[derive(Parser)]
#[command(name = "nilprob", version, about = "Nilpotence probabilities of finite groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Cap on enumerated tuples or DP operations.
    #[arg(long, global = true, value_parser = parse_positive)]
    budget_tuples: Option<u128>,
    /// Cap on shift tuples in a supremum.
    #[arg(long, global = true, value_parser = parse_positive)]
    budget_shifts: Option<u128>,
    /// Results cache directory (default: $NILPROB_CACHE_DIR, then ~/.cache/nilprob).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Largest group order for table construction.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
    /// Check associativity exhaustively regardless of order.
    #[arg(long, global = true)]
    exhaustive_assoc: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Exact np_k(G), cp(G), np(H; x) or its supremum.
    Np(NpArgs),
    /// Monte Carlo estimate of np_k for a permutation group.
    Estimate(EstimateArgs),
    /// Run the theorem harness over a corpus.
    Verify(VerifyArgs),
    /// Structural summary of a group.
    Describe(DescribeArgs),
    /// List catalog families and the default corpus.
    Catalog,
}

#[derive(Args)]
struct NpArgs {
    /// Catalog name, inline JSON definition, or definition file.
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 1, value_parser = parse_k)]
    k: usize,
    /// Commuting probability (same as --k 1).
    #[arg(long, conflicts_with = "k")]
    cp: bool,
    /// Use the normal subgroup with this index (sorted by order) as H.
    #[arg(long, conflicts_with = "subgroup")]
    subgroup_normal: Option<usize>,
    /// H generated by these element indices, e.g. `3,5`.
    #[arg(long, value_delimiter = ',')]
    subgroup: Option<Vec<usize>>,
    /// Shifts x₁,…,x_{k+1} as element indices (default: identity).
    #[arg(long, value_delimiter = ',', conflicts_with = "sup")]
    shifts: Option<Vec<usize>>,
    /// Supremum over all shift tuples.
    #[arg(long)]
    sup: bool,
    /// Enumerate tuples instead of the stage-wise count.
    #[arg(long)]
    brute_force: bool,
}

#[derive(Args)]
struct EstimateArgs {
    /// Catalog name, inline JSON definition, or definition file.
    #[arg(long, required_unless_present = "gens_file", conflicts_with = "gens_file")]
    group: Option<String>,
    /// JSON file with a `perm_gens` definition or a bare list of image arrays.
    #[arg(long)]
    gens_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = parse_k)]
    k: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_Z)]
    z: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Corpus configuration file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus groups (catalog names, inline JSON or files); replaces the configured list.
    #[arg(long = "group", num_args = 1..)]
    groups: Vec<String>,
    /// Values of k, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Add every cyclic subgroup as a choice of H.
    #[arg(long)]
    cyclic_subgroups: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the JSON report.
    #[arg(long, default_value = "verification-report.json")]
    report: PathBuf,
    /// Omit timing so reports compare byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct DescribeArgs {
    /// Catalog name, inline JSON definition, or definition file.
    #[arg(long)]
    group: String,
    /// Print a `mul_table` definition reproducing the group.
    #[arg(long)]
    emit_definition: bool,
}

fn parse_positive(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_k(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("k must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Usage(m) => f.write_str(m),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl Global {
    fn budgets(&self) -> Budgets {
        let d = Budgets::default();
        Budgets { tuples: self.budget_tuples.unwrap_or(d.tuples), shifts: self.budget_shifts.unwrap_or(d.shifts) }
    }

    fn resolve_options(&self) -> ResolveOptions {
        let assoc = if self.exhaustive_assoc { AssocCheck::Exhaustive } else { AssocCheck::Auto };
        ResolveOptions { max_order: self.max_order, assoc }
    }

    fn cache(&self) -> CliResult<Option<ResultCache>> {
        if self.no_cache {
            return Ok(None);
        }
        let dir = match (&self.cache_dir, std::env::var_os(CACHE_DIR_ENV)) {
            (Some(d), _) => d.clone(),
            (None, Some(d)) => PathBuf::from(d),
            (None, None) => match std::env::var_os("HOME") {
                Some(home) => Path::new(&home).join(".cache").join("nilprob"),
                None => return Ok(None),
            },
        };
        Ok(Some(ResultCache::open(&dir)?))
    }

    fn resolve(&self, arg: &str) -> CliResult<(GroupDef, GroupTable)> {
        let def = GroupDef::parse_arg(arg)?;
        let g = def.resolve_with(&self.resolve_options())?;
        Ok((def, g))
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn pick_subgroup(g: &GroupTable, args: &NpArgs) -> CliResult<SubgroupRef> {
    if let Some(i) = args.subgroup_normal {
        let ns = normal_subgroups(g)?;
        let count = ns.len();
        return ns
            .into_iter()
            .nth(i)
            .ok_or_else(|| Failure::Usage(format!("normal subgroup index {i} out of range (group has {count})")));
    }
    if let Some(seeds) = &args.subgroup {
        if let Some(&bad) = seeds.iter().find(|&&x| x >= g.order()) {
            return Err(Failure::Usage(format!("element {bad} out of range for order {}", g.order())));
        }
        return Ok(nilprob_core::structure::subgroup_closure(g, seeds));
    }
    Ok(SubgroupRef::whole(g))
}

#[derive(Serialize)]
struct NpOutput<'a> {
    group: &'a str,
    k: usize,
    subgroup_order: usize,
    shifts: &'a ShiftTuple,
    #[serde(flatten)]
    result: &'a NpResult,
}

#[derive(Serialize)]
struct SupOutput<'a> {
    group: &'a str,
    k: usize,
    subgroup_order: usize,
    #[serde(flatten)]
    result: &'a NpSup,
}

fn cmd_np(global: &Global, args: &NpArgs) -> CliResult<ExitCode> {
    let (_, g) = global.resolve(&args.group)?;
    let k = if args.cp { 1 } else { args.k };
    let h = pick_subgroup(&g, args)?;
    let budgets = global.budgets();
    let cache = global.cache()?;
    if args.sup {
        let key = cache_key(&g, &h, None, k, "sup");
        let sup = match cache.as_ref().and_then(|c| c.get::<NpSup>(&key)) {
            Some(s) => s,
            None => {
                let s = np_sup(&g, &h, k, &budgets)?;
                if let Some(c) = &cache {
                    c.put(&key, "sup", &s)?;
                }
                s
            }
        };
        let out = SupOutput { group: g.label(), k, subgroup_order: h.order(), result: &sup };
        match global.format {
            Format::Json => print_json(&out)?,
            Format::Csv => {
                println!("group,k,subgroup_order,value,witness,value_last_fixed,witness_last_fixed");
                println!(
                    "{},{k},{},{},{},{},{}",
                    csv_field(g.label()),
                    h.order(),
                    sup.value,
                    csv_field(&format!("{:?}", sup.witness.0)),
                    sup.value_last_fixed,
                    csv_field(&format!("{:?}", sup.witness_last_fixed.0)),
                );
            }
            Format::Table => {
                println!("group          {}", g.label());
                println!("k              {k}");
                println!("|H|            {}", h.order());
                println!("sup            {}  at {:?}", sup.value, sup.witness.0);
                println!("sup, x_(k+1)∈H {}  at {:?}", sup.value_last_fixed, sup.witness_last_fixed.0);
            }
        }
        return Ok(ExitCode::SUCCESS);
    }
    let shifts = match &args.shifts {
        Some(s) => ShiftTuple(s.clone()),
        None => ShiftTuple::identity(k + 1),
    };
    let kind = if args.brute_force { "np_bruteforce" } else { "np" };
    let key = cache_key(&g, &h, Some(&shifts), k, kind);
    let result = match cache.as_ref().and_then(|c| c.get::<NpResult>(&key)) {
        Some(r) => r,
        None => {
            let r = if args.brute_force {
                np_bruteforce(&g, &h, &shifts, k, &budgets)?
            } else {
                np_fast(&g, &h, &shifts, k, &budgets)?
            };
            if let Some(c) = &cache {
                c.put(&key, kind, &r)?;
            }
            r
        }
    };
    let out = NpOutput { group: g.label(), k, subgroup_order: h.order(), shifts: &shifts, result: &result };
    match global.format {
        Format::Json => print_json(&out)?,
        Format::Csv => {
            println!("group,k,subgroup_order,shifts,value,method,counted,total");
            println!(
                "{},{k},{},{},{},{},{},{}",
                csv_field(g.label()),
                h.order(),
                csv_field(&format!("{:?}", shifts.0)),
                result.value,
                serde_json::to_value(result.method)?.as_str().unwrap_or_default(),
                result.counted,
                result.total,
            );
        }
        Format::Table => {
            println!("group    {}", g.label());
            println!("k        {k}");
            println!("|H|      {}", h.order());
            println!("shifts   {:?}", shifts.0);
            println!("value    {}  (≈ {:.6})", result.value, result.value.to_f64());
            println!("counted  {} of {}", result.counted, result.total);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_gens_file(path: &Path) -> CliResult<(String, Vec<Permutation>)> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(gens) = serde_json::from_str::<Vec<Permutation>>(&text) {
        return Ok((path.display().to_string(), gens));
    }
    let def = GroupDef::from_json(&text)?;
    Ok((def.label(), def.perm_gens()?))
}

fn cmd_estimate(global: &Global, args: &EstimateArgs) -> CliResult<ExitCode> {
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    let (label, gens) = match (&args.group, &args.gens_file) {
        (_, Some(path)) => read_gens_file(path)?,
        (Some(arg), None) => {
            let def = GroupDef::parse_arg(arg)?;
            (def.label(), def.perm_gens()?)
        }
        (None, None) => return Err(Failure::Usage("one of --group or --gens-file is required".into())),
    };
    if gens.is_empty() {
        return Err(Failure::Usage("no generators given".into()));
    }
    let bsgs = schreier_sims(&gens)?;
    let r: EstimateResult = estimate_np(&bsgs, args.k, args.samples, args.seed, args.z)?;
    match global.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                group: &'a str,
                order: String,
                #[serde(flatten)]
                result: &'a EstimateResult,
            }
            print_json(&Out { group: &label, order: bsgs.order().to_string(), result: &r })?
        }
        Format::Csv => {
            println!("group,k,samples,hits,point,ci_low,ci_high,z,seed,chunk_size");
            println!(
                "{},{},{},{},{},{},{},{},{},{}",
                csv_field(&label),
                r.k,
                r.samples,
                r.hits,
                r.point,
                r.ci_low,
                r.ci_high,
                r.z,
                r.seed,
                r.chunk_size
            );
        }
        Format::Table => {
            println!("group    {label} (order {})", bsgs.order());
            println!("k        {}", r.k);
            println!("hits     {} / {}", r.hits, r.samples);
            println!("point    {:.6}", r.point);
            println!("CI       [{:.6}, {:.6}]  (z = {})", r.ci_low, r.ci_high, r.z);
            println!("seed     {}  (chunks of {})", r.seed, r.chunk_size);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_verify_table(report: &VerificationReport) {
    let s = &report.summary;
    println!(
        "groups {}  checks {}  passed {}  violations {}  findings {}  skipped {}  equality cases {}",
        s.groups, s.checks, s.passed, s.violations, s.findings, s.skipped, s.sharpness
    );
    let row = |o: &nilprob_core::CheckOutcome| {
        println!(
            "  {:<22} {:<16} {:<34} {:>12} {:^4} {:<12} {}",
            o.check_id,
            o.group,
            o.params.to_string(),
            o.lhs.to_string(),
            o.relation,
            o.rhs.to_string(),
            if o.holds { "holds" } else { "FAILS" }
        )
    };
    if !report.violations.is_empty() {
        println!("\nviolations:");
        report.violations.iter().for_each(row);
    }
    if !report.findings.is_empty() {
        println!("\nfindings (non-blocking probes):");
        report.findings.iter().for_each(row);
    }
    let mut shown = std::collections::BTreeSet::new();
    let sharp: Vec<_> = report
        .sharpness
        .iter()
        .filter(|o| shown.insert((o.group.clone(), o.check_id.clone(), o.params.k)))
        .collect();
    if !sharp.is_empty() {
        println!("\nequality cases (first per group, check and k):");
        sharp.into_iter().for_each(row);
    }
    if !report.sup_readings.is_empty() {
        println!("\nsupremum readings that differ (all shifts vs x_(k+1) ∈ H):");
        for r in &report.sup_readings {
            println!(
                "  {:<16} |H|={:<4} k={} {} vs {}",
                r.group, r.subgroup_order, r.k, r.sup_all_shifts, r.sup_last_shift_fixed
            );
        }
    }
    println!("\nresult: {}", if report.passed() { "PASS" } else { "FAIL" });
}

fn cmd_verify(global: &Global, args: &VerifyArgs) -> CliResult<ExitCode> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<CorpusConfig>(&text)
                .map_err(|e| Failure::Core(Error::InvalidDefinition(format!("{}: {e}", path.display()))))?
        }
        None => CorpusConfig::default(),
    };
    if !args.groups.is_empty() {
        config.groups = args
            .groups
            .iter()
            .map(|arg| {
                Ok(match GroupDef::parse_arg(arg)? {
                    GroupDef::Catalog { label: None, name } => CorpusEntry::Name(name),
                    def => CorpusEntry::Definition(def),
                })
            })
            .collect::<CliResult<_>>()?;
    }
    if let Some(k) = &args.k {
        if k.contains(&0) {
            return Err(Failure::Usage("k must be at least 1".into()));
        }
        config.k_values = k.clone();
    }
    if args.cyclic_subgroups {
        config.cyclic_subgroups = true;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if global.budget_tuples.is_some() || global.budget_shifts.is_some() {
        config.budgets = global.budgets();
    }
    if global.max_order != DEFAULT_MAX_ORDER {
        config.max_order = global.max_order;
    }
    let cache = global.cache()?;
    let mut report = run_corpus_cached(&config, cache.as_ref());
    if args.no_timing {
        report = report.without_timing();
    }
    let file = std::fs::File::create(&args.report)?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()?;
    match global.format {
        Format::Json => print_json(&report)?,
        Format::Csv => {
            println!("group,k,check,lhs,rhs,holds");
            for o in &report.outcomes {
                let k = o.params.k.map(|k| k.to_string()).unwrap_or_default();
                println!("{},{k},{},{},{},{}", csv_field(&o.group), o.check_id, o.lhs, o.rhs, o.holds);
            }
        }
        Format::Table => {
            print_verify_table(&report);
            println!("report written to {}", args.report.display());
        }
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct Description {
    label: String,
    order: usize,
    conjugacy_classes: usize,
    center_order: usize,
    normal_subgroups: usize,
    abelian: bool,
    nilpotency_class: Option<usize>,
    lower_central_series: Vec<usize>,
    content_hash: String,
}

fn cmd_describe(global: &Global, args: &DescribeArgs) -> CliResult<ExitCode> {
    let (_, g) = global.resolve(&args.group)?;
    if args.emit_definition {
        print_json(&GroupDef::from_table(&g))?;
        return Ok(ExitCode::SUCCESS);
    }
    let d = Description {
        label: g.label().to_string(),
        order: g.order(),
        conjugacy_classes: conjugacy_classes(&g).count(),
        center_order: center(&g).order(),
        normal_subgroups: normal_subgroups(&g)?.len(),
        abelian: g.is_abelian(),
        nilpotency_class: nilpotency_class(&g),
        lower_central_series: lower_central_series(&g).iter().map(|s| s.order()).collect(),
        content_hash: g.content_hash(),
    };
    let series = d.lower_central_series.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",");
    let class = d.nilpotency_class.map_or_else(|| "not nilpotent".to_string(), |c| c.to_string());
    match global.format {
        Format::Json => print_json(&d)?,
        Format::Csv => {
            println!("group,order,classes,center_order,normal_subgroups,nilpotency_class,lower_central_series");
            println!(
                "{},{},{},{},{},{},{}",
                csv_field(&d.label),
                d.order,
                d.conjugacy_classes,
                d.center_order,
                d.normal_subgroups,
                csv_field(&class),
                csv_field(&series)
            );
        }
        Format::Table => {
            println!("group                 {}", d.label);
            println!("order                 {}", d.order);
            println!("conjugacy classes     {}", d.conjugacy_classes);
            println!("center order          {}", d.center_order);
            println!("normal subgroups      {}", d.normal_subgroups);
            println!("nilpotency class      {class}");
            println!("lower central series  {series}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_catalog(global: &Global) -> CliResult<ExitCode> {
    let fams = families();
    let corpus = default_corpus();
    match global.format {
        Format::Json => {
            print_json(&serde_json::json!({ "families": fams, "default_corpus": corpus }))?;
        }
        Format::Csv => {
            println!("pattern,order,description");
            for f in &fams {
                println!("{},{},{}", csv_field(f.pattern), csv_field(f.order), csv_field(f.description));
            }
        }
        Format::Table => {
            for f in &fams {
                println!("{:<10} {:<8} {}", f.pattern, f.order, f.description);
            }
            println!("\ndefault corpus ({} groups):", corpus.len());
            for chunk in corpus.chunks(10) {
                println!("  {}", chunk.join(" "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn configure_threads(threads: usize) -> CliResult<()> {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    configure_threads(cli.global.threads)?;
    match &cli.command {
        Command::Np(args) => cmd_np(&cli.global, args),
        Command::Estimate(args) => cmd_estimate(&cli.global, args),
        Command::Verify(args) => cmd_verify(&cli.global, args),
        Command::Describe(args) => cmd_describe(&cli.global, args),
        Command::Catalog => cmd_catalog(&cli.global),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
