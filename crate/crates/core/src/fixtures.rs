//! Small hand-built models used by the examples, tests and demos.

use crate::model::{Model, ModelBuilder};

/// Two agents, two resources. From `s_I`, agent `a1` can move to `s` with
/// `alpha` (produces 2 of `r1`, consumes 1 of `r2`); at `s`, `a1` reaches
/// `s'` (where `p` holds) with `gamma` (consumes 5 of `r1`) and `a2` can
/// return to `s_I` with `beta` (consumes 1 of `r1`, produces 1 of `r2`).
pub fn shuttle() -> Model {
    ModelBuilder::new(["a1", "a2"], ["r1", "r2"])
        .states(["s_I", "s", "s'"])
        .action("s_I", "a1", "idle", [0, 0])
        .action("s_I", "a1", "alpha", [-2, 1])
        .action("s_I", "a2", "idle", [0, 0])
        .action("s", "a1", "idle", [0, 0])
        .action("s", "a1", "gamma", [5, 0])
        .action("s", "a2", "idle", [0, 0])
        .action("s", "a2", "beta", [1, -1])
        .action("s'", "a1", "idle", [0, 0])
        .action("s'", "a2", "idle", [0, 0])
        .transition("s_I", ["idle", "idle"], "s_I")
        .transition("s_I", ["alpha", "idle"], "s")
        .transition("s", ["idle", "idle"], "s")
        .transition("s", ["idle", "beta"], "s_I")
        .transition("s", ["gamma", "idle"], "s'")
        .transition("s", ["gamma", "beta"], "s'")
        .transition("s'", ["idle", "idle"], "s'")
        .label("p", "s'")
        .build()
        .expect("fixture is well formed")
}

/// A non-total model: at `s`, agent `a` produces `c` units while `b`
/// consumes `c`, and together they move to `t` where `p` holds. Nobody has
/// an action in the unreachable state `d`.
pub fn exchange(c: i64) -> Model {
    ModelBuilder::new(["a", "b"], ["r"])
        .states(["s", "t", "d"])
        .action("s", "a", "alpha", [-c])
        .action("s", "b", "beta", [c])
        .action("t", "a", "idle", [0])
        .action("t", "b", "idle", [0])
        .transition("s", ["alpha", "beta"], "t")
        .transition("t", ["idle", "idle"], "t")
        .label("p", "t")
        .total(false)
        .build()
        .expect("fixture is well formed")
}

/// A consumption-only chain `u0 -> u1 -> u2` where each step costs one unit
/// and `p` holds at `u2`.
pub fn chain() -> Model {
    ModelBuilder::new(["1"], ["r"])
        .states(["u0", "u1", "u2"])
        .action("u0", "1", "idle", [0])
        .action("u0", "1", "step", [1])
        .action("u1", "1", "idle", [0])
        .action("u1", "1", "step", [1])
        .action("u2", "1", "idle", [0])
        .transition("u0", ["idle"], "u0")
        .transition("u0", ["step"], "u1")
        .transition("u1", ["idle"], "u1")
        .transition("u1", ["step"], "u2")
        .transition("u2", ["idle"], "u2")
        .label("p", "u2")
        .build()
        .expect("fixture is well formed")
}

/// One agent that can `work` at `q` (a self-loop producing 2 units) or
/// `finish` (consuming 5 units) to reach `goal`.
pub fn workshop() -> Model {
    ModelBuilder::new(["w"], ["r"])
        .states(["q", "goal"])
        .action("q", "w", "idle", [0])
        .action("q", "w", "work", [-2])
        .action("q", "w", "finish", [5])
        .action("goal", "w", "idle", [0])
        .transition("q", ["idle"], "q")
        .transition("q", ["work"], "q")
        .transition("q", ["finish"], "goal")
        .transition("goal", ["idle"], "goal")
        .label("done", "goal")
        .build()
        .expect("fixture is well formed")
}

/// A state `s` that satisfies `p` and whose only non-idle move is a costly
/// self-loop, next to a state `free` with a zero-cost loop.
pub fn leaky_loop() -> Model {
    ModelBuilder::new(["a"], ["r"])
        .states(["s", "free"])
        .action("s", "a", "idle", [1])
        .action("free", "a", "idle", [0])
        .transition("s", ["idle"], "s")
        .transition("free", ["idle"], "free")
        .label("p", "s")
        .label("p", "free")
        .total(false)
        .build()
        .expect("fixture is well formed")
}
