use std::collections::{BTreeMap, BTreeSet};

use super::ir::{MethodId, ProgramIR, Region, StmtId};

type State = BTreeMap<String, BTreeSet<StmtId>>;

/// For every `(statement, used variable)` the set of statements whose
/// definition of that variable may reach the use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReachingDefs {
    pub reaching: BTreeMap<(StmtId, String), BTreeSet<StmtId>>,
}

impl ReachingDefs {
    pub fn defs_for(&self, stmt: StmtId, var: &str) -> impl Iterator<Item = StmtId> + '_ {
        self.reaching
            .get(&(stmt, var.to_string()))
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }
}

/// Intra-procedural reaching definitions. Branch arms start from the same
/// state and join afterwards; loop bodies run once and join with the
/// entry state; handlers see defs from before and after the `try` body.
pub fn reaching_definitions(ir: &ProgramIR, method: MethodId) -> ReachingDefs {
    let mut out = ReachingDefs::default();
    run(ir, &ir.method(method).body, State::new(), &mut out);
    out
}

fn join(mut a: State, b: &State) -> State {
    for (k, v) in b {
        a.entry(k.clone()).or_default().extend(v.iter().copied());
    }
    a
}

fn step(ir: &ProgramIR, id: StmtId, mut state: State, out: &mut ReachingDefs) -> State {
    let s = ir.stmt(id);
    for u in &s.uses {
        let defs = state.get(u).cloned().unwrap_or_default();
        out.reaching.entry((id, u.clone())).or_default().extend(defs);
    }
    if let Some(d) = &s.def {
        state.insert(d.clone(), BTreeSet::from([id]));
    }
    state
}

fn run(ir: &ProgramIR, regions: &[Region], mut state: State, out: &mut ReachingDefs) -> State {
    for r in regions {
        state = match r {
            Region::Stmt { id } => step(ir, *id, state, out),
            Region::Branch { header, arms } => {
                let entry = step(ir, *header, state, out);
                let mut merged: Option<State> = None;
                for arm in arms {
                    let s = run(ir, arm, entry.clone(), out);
                    merged = Some(match merged {
                        Some(m) => join(m, &s),
                        None => s,
                    });
                }
                merged.unwrap_or(entry)
            }
            Region::Loop { header, body } => {
                let entry = step(ir, *header, state, out);
                let after = run(ir, body, entry.clone(), out);
                join(entry, &after)
            }
            Region::Try { header, body, handlers, finally } => {
                let entry = step(ir, *header, state, out);
                let after_body = run(ir, body, entry.clone(), out);
                let handler_in = join(entry, &after_body);
                let mut merged = after_body;
                for h in handlers {
                    let s = run(ir, h, handler_in.clone(), out);
                    merged = join(merged, &s);
                }
                run(ir, finally, merged, out)
            }
        };
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn defs(src: &str, use_line: u32, var: &str) -> Vec<u32> {
        let ir = parse(src, "t").unwrap();
        let rd = reaching_definitions(&ir, MethodId(0));
        let user = ir
            .statements
            .iter()
            .find(|s| s.line == use_line && s.uses.iter().any(|u| u == var))
            .expect("use");
        let mut lines: Vec<u32> = rd.defs_for(user.id, var).map(|d| ir.stmt(d).line).collect();
        lines.sort();
        lines
    }

    #[test]
    fn straight_line_kills_previous_def() {
        let src = "class A { static void main() {\nint x = 1;\nx = 2;\nint y = x;\n} }";
        assert_eq!(defs(src, 4, "x"), vec![3]);
    }

    #[test]
    fn branches_join() {
        let src = "class A { static void main() {\nint x = 1;\nif (x) {\nx = 2;\n} else {\nx = 3;\n}\nint y = x;\n} }";
        assert_eq!(defs(src, 8, "x"), vec![4, 6]);
    }

    #[test]
    fn one_armed_if_keeps_entry_def() {
        let src = "class A { static void main() {\nint x = 1;\nif (x) {\nx = 2;\n}\nint y = x;\n} }";
        assert_eq!(defs(src, 6, "x"), vec![2, 4]);
    }

    #[test]
    fn else_arm_does_not_see_then_def() {
        let src = "class A { static void main() {\nint x = 1;\nif (x) {\nx = 2;\n} else {\nint y = x;\n}\n} }";
        assert_eq!(defs(src, 6, "x"), vec![2]);
    }

    #[test]
    fn loop_body_runs_at_most_once() {
        let src = "class A { static void main() {\nint x = 1;\nwhile (x) {\nx = 2;\n}\nint y = x;\n} }";
        assert_eq!(defs(src, 6, "x"), vec![2, 4]);
    }

    #[test]
    fn handler_sees_defs_around_try_body() {
        let src = "class A { static void main() {\nint x = 1;\ntry {\nx = 2;\n} catch (Exception e) {\nint y = x;\n}\n} }";
        assert_eq!(defs(src, 6, "x"), vec![2, 4]);
    }
}
