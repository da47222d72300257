//! Exact and approximate queries on the chest-clinic network.

use pgmkit::cli::format_query;
use pgmkit::infer::{likelihood_weighting, logic_sampling, variable_elimination, Evidence};

mod common;

fn main() -> pgmkit::Result<()> {
    let bn = common::asia();
    let ev = Evidence::new().hard("xray", "yes").hard("smoke", "yes");

    print!(
        "{}",
        format_query(&variable_elimination(&bn, &["lung", "tub"], &ev)?)
    );
    print!(
        "{}",
        format_query(&logic_sampling(&bn, &["lung"], &ev, 100_000, 1)?)
    );
    print!(
        "{}",
        format_query(&likelihood_weighting(&bn, &["lung"], &ev, 100_000, 1)?)
    );

    // Rare evidence starves rejection sampling; weighting keeps every draw.
    let rare = Evidence::new().hard("asia", "yes");
    let ls = logic_sampling(&bn, &["tub"], &rare, 100_000, 2)?;
    let lw = likelihood_weighting(&bn, &["tub"], &rare, 100_000, 2)?;
    println!(
        "asia=yes: logic sampling kept {:?} draws, weighting effective size {:.0}",
        ls.accepted,
        lw.effective_weight.unwrap_or(0.0)
    );

    // Soft evidence replaces a table, here the prior of smoking.
    let soft = Evidence::new().soft("smoke", vec![0.2, 0.8]);
    let r = variable_elimination(&bn, &["dysp"], &soft)?;
    println!("P(dysp) with 80% smokers: {:?}", r.marginal("dysp")?);
    Ok(())
}
