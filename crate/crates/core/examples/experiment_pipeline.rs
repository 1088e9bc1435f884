// The whole pipeline through the command layer: generate a suite, run a
// baseline, tune, run the tuned configuration on the held-out split and
// compare.

use std::fs;
use std::path::Path;

use sbst_tune::experiment::run_cli;

const MANIFEST: &str = r#"{
  "suite": "suite.json",
  "suite_seed": 1,
  "algorithm": "mio",
  "seed": 4,
  "repetitions": 3,
  "budget": 300,
  "checkpoints": 16,
  "tuner": {"mode": "de", "settings": {"pop_size": 4, "generations": 2}},
  "objectives": [{"alpha": 1.0, "beta": 0.0}],
  "output": "results"
}"#;

fn sbst_tune(dir: &Path, args: &[&str]) -> sbst_tune::Result<String> {
    let manifest = dir.join("manifest.json");
    let args: Vec<String> = args
        .iter()
        .map(|a| match *a {
            "@manifest" => manifest.display().to_string(),
            a if a.starts_with('@') => dir.join(&a[1..]).display().to_string(),
            a => a.to_string(),
        })
        .collect();
    let mut out = Vec::new();
    run_cli(std::iter::once("sbst-tune".to_string()).chain(args), &mut out)?;
    Ok(String::from_utf8_lossy(&out).into_owned())
}

pub fn run_example_in(dir: &Path) -> sbst_tune::Result<String> {
    fs::write(dir.join("manifest.json"), MANIFEST)?;
    let steps: [&[&str]; 6] = [
        &[
            "suite",
            "generate",
            "--count",
            "8",
            "--seed",
            "1",
            "--out",
            "@suite.json",
        ],
        &["tune", "--manifest", "@manifest"],
        &[
            "run",
            "--manifest",
            "@manifest",
            "--preset",
            "mio-default",
            "--subjects",
            "test",
        ],
        &[
            "run",
            "--manifest",
            "@manifest",
            "--config",
            "@results/tune/de-1+0.config.json",
            "--label",
            "tuned",
            "--subjects",
            "test",
        ],
        &[
            "compare",
            "@results/runs/mio-default",
            "@results/runs/tuned",
            "--out",
            "@results/compare",
        ],
        &[
            "trace",
            "export",
            "@results/runs/mio-default",
            "@results/runs/tuned",
            "--out",
            "@results/traces.csv",
        ],
    ];
    for args in steps {
        println!("$ sbst-tune {}", args.join(" "));
        print!("{}", sbst_tune(dir, args)?);
    }
    let table = fs::read_to_string(dir.join("results/compare/compare.csv"))?;
    println!("\n{table}");
    Ok(table)
}

pub fn run_example() -> sbst_tune::Result<String> {
    let dir = std::env::temp_dir().join(format!("sbst-tune-pipeline-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let table = run_example_in(&dir);
    fs::remove_dir_all(&dir)?;
    table
}

fn main() -> sbst_tune::Result<()> {
    run_example().map(|_| ())
}
