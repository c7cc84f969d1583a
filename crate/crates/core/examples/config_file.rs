//! Reading a partial configuration: omitted keys keep their defaults,
//! unknown keys are rejected with a line number.
//!
//! cargo run --example config_file

use ddp_nav::config::RunConfig;

fn main() -> ddp_nav::Result<()> {
    let text = "seed = 9\n\n[bench]\nspeeds = [2.0]\n\n[navsys]\np = 1.7\n";
    let cfg = RunConfig::from_toml(text)?;
    println!("seed {} speeds {:?} navsys p {} (samples {} kept at default)", cfg.seed, cfg.bench.speeds, cfg.navsys.p, cfg.navsys.samples_high);

    match RunConfig::from_toml("[navsys]\np = 1.7\nsampels_high = 10\n") {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }

    let full = RunConfig::default().to_toml();
    println!("the full default config has {} lines; first ones:", full.lines().count());
    for line in full.lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}
