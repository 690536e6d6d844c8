use bogd::regret::{corollary1_bound, lemma3_bound, theorem1_bound, BoundInputs};

use crate::output::{fmt_num, Table};

/// Evaluates the three regret bounds; a bound whose preconditions fail gets
/// an empty value and the reason in the `note` column.
pub fn bounds_table(inputs: &BoundInputs) -> Table {
    let mut t = Table::new(["bound", "value", "note"]);
    let mut push = |name: &str, r: Result<f64, bogd::RegretError>| match r {
        Ok(v) => t.push(vec![name.into(), fmt_num(v), String::new()]),
        Err(e) => t.push(vec![name.into(), String::new(), e.to_string()]),
    };
    push("theorem1", theorem1_bound(inputs));
    push("lemma3", lemma3_bound(inputs));
    let cor = corollary1_bound(inputs);
    push("corollary1", cor.as_ref().map(|c| c.bound).map_err(Clone::clone));
    push("corollary1_epsilon", cor.map(|c| c.epsilon));
    t
}
