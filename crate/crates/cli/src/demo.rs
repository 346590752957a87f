//! Built-in scenarios. Each one is an ordinary config, written next to its
//! output so the run can be repeated with `nlsprop run`.

use std::path::Path;

use anyhow::{anyhow, Context};
use nlsprop::snapshot;
use nlsprop::{Complex64, WaveFunction64};

use crate::config::RunConfig;
use crate::{execute_run, print_study, runner, CmdResult, DemoName, Failure};

const TRAP_DTS: &str = "0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625";

fn config_text(name: DemoName) -> String {
    match name {
        // ψ = sech(x) e^{it} solves i ψ_t = -ψ'' - 2|ψ|²ψ
        DemoName::Soliton => "[grid]
points = 600
lengths = 64

[potential]
family = cubic
g = -2

[initial.0]
profile = sech
width = 1

[run]
scheme = forest-ruth
dt = 0.001
steps = 5000
observe_every = 100

[output]
csv = soliton.csv
snapshot = soliton.nlsp
"
        .into(),
        DemoName::Trap | DemoName::Chin => {
            let scheme = if matches!(name, DemoName::Trap) { "strang" } else { "chin" };
            let stem = if matches!(name, DemoName::Trap) { "trap" } else { "chin" };
            format!(
                "[grid]
points = 256
lengths = 20

[hamiltonian]
external = harmonic
omega = 1

[potential]
family = cubic
g = 1

[initial]
norm = 1

[initial.0]
profile = gaussian
x0 = 1
sigma = 1.5

[run]
scheme = {scheme}
dt = 0.01
steps = 100
observe_every = 10

[output]
csv = {stem}.csv
snapshot = {stem}.nlsp

[converge]
t_final = 1
dts = {TRAP_DTS}
"
            )
        }
        DemoName::Fwm => {
            let mut s = String::from(
                "[grid]
points = 64
lengths = 10

[hamiltonian]
external = harmonic
omega = 0.5

[potential]
family = four-wave
g = 1.2
phase_mod = 1, 0.5, 0.5, 0.5; 0.5, 1, 0.5, 0.5; 0.5, 0.5, 1, 0.5; 0.5, 0.5, 0.5, 1

[initial]
norm = 1
",
            );
            for (c, (x0, k0)) in [(-1.0, 0.5), (1.0, -0.5), (0.0, 1.0), (0.5, 0.0)].iter().enumerate() {
                s.push_str(&format!("\n[initial.{c}]\nprofile = gaussian\nx0 = {x0}\nsigma = 1\nk0 = {k0}\n"));
            }
            s.push_str(
                "
[run]
scheme = forest-ruth
dt = 0.001
steps = 2000
observe_every = 100

[output]
csv = fwm.csv
snapshot = fwm.nlsp
",
            );
            s
        }
    }
}

pub fn demo_config(name: DemoName) -> RunConfig {
    RunConfig::parse(&config_text(name)).expect("built-in demo configs parse")
}

pub fn cmd_demo(name: DemoName, out: &Path, print_config: bool) -> CmdResult {
    let text = config_text(name);
    if print_config {
        print!("{text}");
        return Ok(());
    }
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(Failure::Config)?;
    let mut cfg = demo_config(name);
    let stem = cfg
        .output
        .snapshot
        .as_ref()
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "demo".into());
    let conf = out.join(format!("{stem}.conf"));
    std::fs::write(&conf, &text)
        .with_context(|| format!("writing {}", conf.display()))
        .map_err(Failure::Config)?;
    cfg.rebase(out);
    println!("config written to {}", conf.display());
    execute_run(&cfg)?;

    match name {
        DemoName::Soliton => {
            let path = cfg.output.snapshot.as_ref().expect("soliton demo writes a snapshot");
            let psi: WaveFunction64 = snapshot::load(path).map_err(|e| Failure::Config(e.into()))?;
            let t = cfg.dt * cfg.steps as f64;
            let exact = WaveFunction64::from_fn(psi.grid(), 1, |_, r| Complex64::from_polar(1.0 / r[0].cosh(), t));
            let err = psi.max_difference(&exact);
            println!("max |ψ - sech(x) e^(it)| at t = {t}: {err:.3e}");
            if err > 1e-6 {
                return Err(Failure::Verification(format!("soliton error {err:.3e} exceeds 1e-6")));
            }
        }
        DemoName::Trap => {
            for scheme in ["strang", "forest-ruth"] {
                converge_variant(&cfg, scheme, None)?;
            }
        }
        DemoName::Chin => {
            for variant in [nlsprop::CommutatorVariant::Paper, nlsprop::CommutatorVariant::Canonical] {
                converge_variant(&cfg, "chin", Some(variant))?;
            }
        }
        DemoName::Fwm => {}
    }
    Ok(())
}

fn converge_variant(cfg: &RunConfig, scheme: &str, variant: Option<nlsprop::CommutatorVariant>) -> CmdResult {
    let mut c = cfg.clone();
    c.scheme = scheme.into();
    if let Some(v) = variant {
        c.commutator_variant = v;
    }
    let spec = c
        .converge
        .clone()
        .ok_or_else(|| Failure::Config(anyhow!("demo config has no [converge] section")))?;
    println!();
    match variant {
        Some(v) => println!("{scheme} ({} commutator field), t = {}", v.name(), spec.t_final),
        None => println!("{scheme}, t = {}", spec.t_final),
    }
    let study = runner::converge::<f64>(&c, spec.t_final, &spec.dts)?;
    print_study(&study)?;
    Ok(())
}
