//! Flattening theories and translating terms along a view, with a totality
//! check first.

use std::path::Path;

use glf::theory::TheoryGraph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let life = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/life");
    let mut graph = TheoryGraph::new();
    for f in [
        "logic/PropLogic.thy",
        "logic/LogicSyntax.thy",
        "logic/LifeDT.thy",
        "logic/LifeLanguage.thy",
        "semantics/PropLogicSemantics.view",
        "semantics/LifeSemantics.view",
    ] {
        graph.load_file(&life.join(f))?;
    }

    let lex = graph.flatten("LifeLex")?;
    println!("LifeLex declares:");
    for d in lex.declarations() {
        println!("  {} : {}", d.name.name, lex.print(d.ty.as_ref().unwrap()));
    }

    let report = graph.check_totality("LifeLexSemantics")?;
    println!("LifeLexSemantics total: {}", report.is_total());

    let dt = graph.flatten("LifeDT")?;
    for src in ["act joan loveOneself", "and_Stmt (act mary run) (act joan (love mary))"] {
        let image = graph.apply_view("LifeLexSemantics", &lex.parse(src)?)?;
        let nf = glf::kernel::normalize(dt.as_ref(), &image)?;
        println!("{src}\n  ↦ {}\n  = {}", dt.print(&image), dt.print(&nf));
    }
    Ok(())
}
