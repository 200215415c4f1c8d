//! Resolve a configuration the way the binary does, run it into a scratch
//! directory and read the manifest back.

use chradial::app::commands::{dispatch, Outputs};
use chradial::app::{parse_config_str, Command, RunManifest};

fn main() -> chradial::Result<()> {
    let text = "# incompressible limit\nmass=0.4\ndelta=0.01\n";
    let cfg = parse_config_str(Command::Limit, text, &[("n_nodes".into(), "121".into())])?;
    let dir = std::env::temp_dir().join("chradial-example");
    let mut out = Outputs::new(&dir, &cfg)?;
    dispatch(&cfg, &mut out)?;
    out.manifest.status = "ok".into();
    out.manifest.write(&dir)?;

    let m = RunManifest::read(&dir)?;
    for f in &m.files {
        println!("{} ({} bytes)", f.name, f.bytes);
    }
    assert_eq!(m.config()?, cfg);
    print!("{}", m.config_text());
    match parse_config_str(Command::Limit, "gamma=0.5\n", &[]) {
        Err(e) => println!("rejected: {e} (exit code {})", e.exit_code()),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
