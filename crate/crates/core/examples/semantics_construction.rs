//! From sentences to logical formulas: parse, apply the semantics view,
//! normalize, then check the result lies in the target logic.

use std::path::Path;

use glf::shell::load_fragment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let cases = [
        ("life", "Joan loves herself"),
        ("quantified", "John and Mary love everyone"),
        ("quantified", "John and Mary and Joan run"),
        ("modal", "John doesn't believe that Mary has to run"),
    ];
    for (name, sentence) in cases {
        let f = load_fragment(&corpus.join(name))?;
        println!("[{name}] {sentence}");
        for r in f.construct("Eng", None, sentence)? {
            println!("  {}", r.ast);
            println!("    view image: {}", f.print(&r.applied));
            println!("    formula:    {}", f.print(&r.term));
            println!("    in target logic: {}", r.check.is_ok());
        }
    }
    Ok(())
}
