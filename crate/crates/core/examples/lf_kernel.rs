//! Type inference, normalization and proof checking in the LF kernel, over
//! theories written in the surface syntax.

use glf::kernel::{check_proof, infer_type, normalize, normalize_with, Context, NormalizeOptions, Unfolding};
use glf::theory::TheoryGraph;

const THEORY: &str = "\
theory Props : LF =
  o : type ;
  ded : o -> type # ⊢ %1 prec 2 ;
  and : o -> o -> o # %1 ∧ %2 prec 20 ;
  andI : {A:o,B:o} ⊢ A -> ⊢ B -> ⊢ A ∧ B # andI %3 %4 ;
  andEl : {A:o,B:o} ⊢ A ∧ B -> ⊢ A # andEl %3 ;
  p : o ;
  q : o ;
  hp : ⊢ p ;
  hq : ⊢ q ;
  twice : o -> o = [x] x ∧ x ;
end
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut graph = TheoryGraph::new();
    graph.load_str(THEORY, "props.thy")?;
    let th = graph.flatten("Props")?;

    let t = th.parse("twice (p ∧ q)")?;
    let ty = infer_type(th.as_ref(), &Context::new(), &t)?;
    println!("{} : {}", th.print(&t), th.print(&ty));
    // Definitions unfold lazily: only when a redex needs them.
    println!("  lazy: {}", th.print(&normalize(th.as_ref(), &t)?));
    let full = NormalizeOptions {
        unfolding: Unfolding::Full,
        ..Default::default()
    };
    println!("  full: {}", th.print(&normalize_with(th.as_ref(), &t, &full)?));

    let ded = th.lookup("ded").unwrap().name.clone();
    for (proof, goal) in [
        ("andI hp hq", "p ∧ q"),
        ("andI hq hp", "p ∧ q"),
        ("andEl (andI hp hq)", "p"),
    ] {
        let v = check_proof(th.as_ref(), &ded, &th.parse(proof)?, &th.parse(goal)?);
        match v.diagnostic {
            None => println!("{proof} proves ⊢ {goal}"),
            Some(why) => println!("{proof} rejected: {why}"),
        }
    }
    Ok(())
}
