//! Exact queries on a hand-built network, with and without the Markov blanket.

use edge_aci::bayes::{
    markov_blanket, query_prob, variable_elimination, BayesNet, Cpt, Dag, Evidence, VariableSpec,
};

fn main() -> edge_aci::Result<()> {
    let vars = vec![
        VariableSpec::new("load", ["low", "high"])?,
        VariableSpec::new("cpu", ["idle", "busy"])?,
        VariableSpec::new("in_time", ["False", "True"])?,
    ];
    let dag = Dag::with_edges(
        ["load", "cpu", "in_time"],
        &[("load", "cpu"), ("cpu", "in_time")],
    )?;
    let cpts = vec![
        Cpt::new(vec![], 2, vec![], vec![0.7, 0.3])?,
        Cpt::new(vec![0], 2, vec![2], vec![0.9, 0.1, 0.2, 0.8])?,
        Cpt::new(vec![1], 2, vec![2], vec![0.05, 0.95, 0.6, 0.4])?,
    ];
    let model = BayesNet::new(vars, dag, cpts, 0.0)?;

    let prior = variable_elimination(&model, &["in_time"], &Evidence::new(), None)?;
    println!("P(in_time)            = {:?}", prior.values());

    let busy = Evidence::new().with("load", "high");
    let post = variable_elimination(&model, &["in_time"], &busy, None)?;
    println!("P(in_time | load=high) = {:?}", post.values());

    println!(
        "blanket of in_time: {:?}",
        markov_blanket(&model, ["in_time"])?
    );
    // cpu shields in_time from load
    let shielded = Evidence::new().with("cpu", "busy");
    let both = shielded.clone().with("load", "low");
    println!(
        "P(in_time=True | cpu=busy) = {:.4}, adding load=low = {:.4}",
        query_prob(&model, "in_time", "True", &shielded)?,
        query_prob(&model, "in_time", "True", &both)?
    );
    Ok(())
}
