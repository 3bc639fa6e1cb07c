use clap::{Parser, Subcommand};
use qassist::extraction::{evaluate_corpus, parse_corpus, RuleExtractor};
use qassist::intent::{evaluate_intents, parse_intent_corpus, RuleClassifier};
use qassist::qubo::{KpInstance, TspInstance};
use qassist::service::{http, Engine, EngineConfig, Envelope, ServiceError};
use qassist::variational::{solve_kp, solve_tsp, SolveConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "qassist", version, about = "Quantum programming assistant")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Answer one request, accepting the extracted parameters as they are.
    Ask {
        text: String,
        /// Print envelopes as JSON.
        #[arg(long)]
        json: bool,
        /// Also run the solver for TSP and knapsack requests.
        #[arg(long)]
        compute: bool,
        #[arg(long, env = "QASSIST_DATA_DIR")]
        data_dir: Option<PathBuf>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "QASSIST_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        #[arg(long, env = "QASSIST_DATA_DIR", default_value = "qassist-data")]
        data_dir: PathBuf,
        #[arg(long, env = "QASSIST_TIMEOUT_SECS", default_value_t = 120)]
        timeout_secs: u64,
    },
    /// Score the rule classifier or extractor on a JSONL corpus.
    Eval {
        #[arg(long, required = true)]
        corpus: Vec<PathBuf>,
    },
    /// Solve a TSP or knapsack instance file on the simulator.
    Solve {
        #[arg(long, conflicts_with = "kp", required_unless_present = "kp")]
        tsp: Option<PathBuf>,
        #[arg(long)]
        kp: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        layers: Option<usize>,
    },
}

fn print_envelope(env: &Envelope, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(env).expect("envelopes serialize"));
        return;
    }
    match env {
        Envelope::Confirmation(c) => {
            println!("{}", c.prompt.text);
            for m in &c.missing {
                println!("missing: {m}");
            }
            for a in &c.ambiguous {
                println!("ambiguous: {} {:?}", a.field, a.candidates);
            }
        }
        Envelope::Answer(a) => {
            println!("{}", a.body.text);
            if let Some(m) = &a.body.matrix {
                println!("{m}");
            }
            if let Some(d) = &a.body.diagram {
                println!("{}", d.to_text());
            }
            for n in &a.body.notices {
                println!("note: {n}");
            }
            if let Some(code) = &a.body.code {
                println!("\n{}", code.source_text);
            }
        }
        Envelope::Solve(s) => println!("{}", s.body.text),
    }
}

fn fail(e: &ServiceError, json: bool) -> ExitCode {
    if json {
        println!("{}", serde_json::to_string_pretty(&e.to_envelope()).expect("errors serialize"));
    } else {
        eprintln!("error: {e}");
        if let ServiceError::InvalidParams(fields) = e {
            for f in fields {
                eprintln!("  {}: {}", f.field, f.message);
            }
        }
    }
    ExitCode::FAILURE
}

fn ask(text: &str, json: bool, compute: bool, data_dir: Option<PathBuf>) -> ExitCode {
    let dir = data_dir.unwrap_or_else(|| std::env::temp_dir().join("qassist"));
    let engine = match Engine::new(EngineConfig::new(dir)) {
        Ok(e) => e,
        Err(e) => return fail(&e, json),
    };
    let env = match engine.chat(None, text) {
        Ok(env) => env,
        Err(e) => return fail(&e, json),
    };
    let Envelope::Confirmation(c) = &env else {
        print_envelope(&env, json);
        return ExitCode::SUCCESS;
    };
    if !json {
        println!("{}", c.prompt.text);
    }
    let answer = match engine.confirm(&c.session_id, None) {
        Ok(a) => a,
        Err(e) => {
            // show what was understood so the user can fix the request
            if json {
                print_envelope(&env, true);
            }
            return fail(&e, json);
        }
    };
    print_envelope(&answer, json);
    if let Envelope::Answer(a) = &answer {
        if let (true, Some(token)) = (compute, &a.compute_token) {
            match engine.compute(&a.session_id, token) {
                Ok(s) => print_envelope(&s, json),
                Err(e) => return fail(&e, json),
            }
        }
    }
    ExitCode::SUCCESS
}

fn eval(paths: &[PathBuf]) -> Result<(), String> {
    for p in paths {
        let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
        let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        println!("== {}", p.display());
        if first.contains("\"expected_intent\"") {
            let corpus = parse_intent_corpus(&text).map_err(|e| e.to_string())?;
            print!("{}", evaluate_intents(&RuleClassifier, &corpus).table());
        } else {
            let corpus = parse_corpus(&text).map_err(|e| e.to_string())?;
            print!("{}", evaluate_corpus(&RuleExtractor::default(), &corpus).map_err(|e| e.to_string())?.table());
        }
    }
    Ok(())
}

fn solve(tsp: Option<PathBuf>, kp: Option<PathBuf>, seed: u64, layers: Option<usize>) -> Result<(), String> {
    let mut cfg = SolveConfig { seed, ..SolveConfig::default() };
    if let Some(l) = layers {
        cfg.qaoa_layers = l;
        cfg.vqe_layers = l;
    }
    let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    let out = if let Some(p) = tsp {
        let raw: TspInstance = serde_json::from_str(&read(&p)?).map_err(|e| e.to_string())?;
        let inst = TspInstance::new(raw.labels, raw.distances).map_err(|e| e.to_string())?;
        let (result, tour) = solve_tsp(&inst, &cfg).map_err(|e| e.to_string())?;
        serde_json::json!({ "tour": tour, "result": result })
    } else {
        let p = kp.expect("clap requires one of --tsp or --kp");
        let raw: KpInstance = serde_json::from_str(&read(&p)?).map_err(|e| e.to_string())?;
        let inst = KpInstance::new(raw.items, raw.weights, raw.values, raw.capacity).map_err(|e| e.to_string())?;
        let (result, sel) = solve_kp(&inst, &cfg).map_err(|e| e.to_string())?;
        serde_json::json!({ "selection": sel, "result": result })
    };
    println!("{}", serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Ask {
            text,
            json,
            compute,
            data_dir,
        } => return ask(&text, json, compute, data_dir),
        Cmd::Serve {
            port,
            host,
            data_dir,
            timeout_secs,
        } => {
            let mut cfg = EngineConfig::new(data_dir);
            cfg.timeout = std::time::Duration::from_secs(timeout_secs);
            let engine = match Engine::new(cfg) {
                Ok(e) => Arc::new(e),
                Err(e) => return fail(&e, false),
            };
            let addr = std::net::SocketAddr::new(host, port);
            eprintln!("listening on http://{addr}");
            tokio::runtime::Runtime::new()
                .map_err(|e| e.to_string())
                .and_then(|rt| rt.block_on(http::serve(engine, addr)).map_err(|e| e.to_string()))
        }
        Cmd::Eval { corpus } => eval(&corpus),
        Cmd::Solve { tsp, kp, seed, layers } => solve(tsp, kp, seed, layers),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
