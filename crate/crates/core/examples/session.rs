//! The interactive shell driven from a script.

use std::path::Path;

use glf::shell::{load_fragment, load_knowledge, Session};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/modal");
    let f = load_fragment(&dir)?;
    let kb = load_knowledge(&f, &dir.join("knowledge/modal.kb"))?;
    let mut session = Session::new(f, kb)?;
    let script = "\
parse John doesn't run
construct John has to run
analyze John has to run
state
quit
";
    session.run(script.as_bytes(), std::io::stdout(), false)?;
    Ok(())
}
