use ddp_nav::config::RunConfig;

fn shipped() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml")
}

#[test]
fn shipped_default_config_matches_builtin_defaults() {
    let cfg = RunConfig::load(shipped()).unwrap();
    assert_eq!(cfg, RunConfig::default());
}

#[test]
fn shipped_default_config_sets_every_key() {
    // serializing the defaults yields no key the shipped file lacks
    let text = std::fs::read_to_string(shipped()).unwrap();
    let shipped: toml::Table = text.parse().unwrap();
    let builtin: toml::Table = RunConfig::default().to_toml().parse().unwrap();
    fn keys(t: &toml::Table, prefix: &str, out: &mut Vec<String>) {
        for (k, v) in t {
            let path = format!("{prefix}{k}");
            match v {
                toml::Value::Table(inner) => keys(inner, &format!("{path}."), out),
                _ => out.push(path),
            }
        }
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    keys(&shipped, "", &mut a);
    keys(&builtin, "", &mut b);
    a.sort();
    b.sort();
    assert_eq!(a, b);
}
