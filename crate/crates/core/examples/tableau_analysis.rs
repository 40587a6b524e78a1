//! A discourse as a belief state: each sentence splits the open branches by
//! reading, world knowledge closes some of them, and open branches are read
//! off as models.

use std::path::Path;

use glf::shell::{load_fragment, parse_knowledge};
use glf::tableau::BeliefState;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = load_fragment(&Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/quantified"))?;
    let kb = parse_knowledge(&f, "¬ love' john' john'\n", "inline.kb")?;
    let mut state = BeliefState::new(f.logic(), &kb)?;
    for sentence in ["John and Mary and Joan run", "someone loves everyone"] {
        let readings: Vec<_> = f
            .construct("Eng", None, sentence)?
            .into_iter()
            .map(|r| r.term)
            .collect();
        state = state.update(sentence, &readings)?;
        println!(
            "{sentence}: {} readings, {} open branches",
            readings.len(),
            state.branches.len()
        );
        let models = state.models();
        for m in models.iter().take(3) {
            println!("  {m}");
        }
        if models.len() > 3 {
            println!("  ... {} models in all", models.len());
        }
    }
    Ok(())
}
