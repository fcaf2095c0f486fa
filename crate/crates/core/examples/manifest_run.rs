//! Running an experiment from a JSON manifest and writing its artifacts.

use hlw::experiments::{run, Manifest};

fn main() {
    let dir = std::env::temp_dir().join("hlw-manifest-example");
    let text = format!(
        r#"{{"experiment": "sharpness", "params": {{"r": [0.5, 1, 2]}}, "resolution": 48, "output": {:?}}}"#,
        dir
    );
    let manifest = Manifest::from_json(&text).expect("valid manifest");
    match run(&manifest) {
        Ok(a) => {
            print!("{}", std::fs::read_to_string(&a.results).unwrap_or_default());
            println!("exit code {}, files in {}", a.exit_code, dir.display());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
