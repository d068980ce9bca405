//! Regenerates the bundled instance files under `instances/`.

use std::path::Path;

use riverkron::export::write_instance;
use riverkron::synth::{bundled_source, BUNDLED};

fn main() -> riverkron::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("instances");
    for name in BUNDLED {
        let path = dir.join(format!("{name}.json"));
        write_instance(&bundled_source(name)?, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
