//! Starting a new semantics view: a stub lists every constant of the
//! language theory that still needs an assignment.

use std::path::Path;

use glf::bridge::{fill_stub, pending_assignments, view_stub};
use glf::shell::load_fragment;
use indexmap::IndexMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = load_fragment(&Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/life"))?;
    let lex = f.graph.flatten(&f.language_theory)?;
    let stub = view_stub(&lex, "Draft", "LifeDT");
    print!("{stub}");
    println!("pending: {:?}", pending_assignments(&stub));

    let values: IndexMap<String, String> = [("joan", "joan'"), ("mary", "mary'")]
        .into_iter()
        .map(|(k, v)| (k.into(), v.into()))
        .collect();
    let partial = fill_stub(&stub, &values);
    println!("after filling two: {:?}", pending_assignments(&partial));
    Ok(())
}
