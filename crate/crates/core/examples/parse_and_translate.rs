//! Parsing with one concrete syntax and linearizing with another.

use std::path::Path;

use glf::shell::load_fragment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = load_fragment(&Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/life"))?;
    let eng = f.concrete("Eng")?;
    let ger = f.concrete("Ger")?;
    for sentence in [
        "Mary loves herself",
        "Joan runs and Mary loves Joan",
        "Mary loves himself",
    ] {
        let trees = eng.parse(None, sentence)?;
        println!("{sentence}");
        if trees.is_empty() {
            println!("  no parse");
        }
        for t in &trees {
            println!("  {t}\n    Ger: {}", ger.linearize(t)?);
        }
    }
    println!("{:?}", eng.translate(ger, None, "Mary loves herself")?);
    Ok(())
}
