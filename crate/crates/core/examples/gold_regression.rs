//! Gold files pin the readings of sentences; a report lists every mismatch.

use std::path::Path;

use glf::shell::{load_fragment, run_gold_dir};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut failed = 0;
    for name in ["life", "quantified", "modal"] {
        let f = load_fragment(&corpus.join(name))?;
        let report = run_gold_dir(&f, &corpus.join(name).join("gold"))?;
        println!("{name}: {report}");
        failed += report.failed();
    }
    std::process::exit(i32::from(failed > 0));
}
