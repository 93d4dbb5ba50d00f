//! Program generators: seeded random programs and a few structured families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lit::AtomId;
use crate::program::GroundProgram;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomShape {
    pub max_atoms: usize,
    pub max_rules: usize,
    pub max_constraints: usize,
    /// Upper bound for each of the positive and negative body sizes.
    pub max_body: usize,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape { max_atoms: 12, max_rules: 25, max_constraints: 5, max_body: 2 }
    }
}

fn pick(rng: &mut ChaCha8Rng, atoms: &[AtomId], k: usize) -> Vec<AtomId> {
    (0..k).map(|_| *atoms.choose(rng).unwrap()).collect()
}

/// Random program with mixed negation; atoms `a0..`.
pub fn random_program(seed: u64, shape: RandomShape) -> GroundProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = GroundProgram::new();
    let n = rng.gen_range(1..=shape.max_atoms);
    let atoms: Vec<AtomId> = (0..n).map(|i| p.add_atom(&format!("a{i}"))).collect();
    let rules = rng.gen_range(1..=shape.max_rules);
    for _ in 0..rules {
        let head = *atoms.choose(&mut rng).unwrap();
        let np = rng.gen_range(0..=shape.max_body);
        let nn = rng.gen_range(0..=shape.max_body);
        let pos = pick(&mut rng, &atoms, np);
        let neg = pick(&mut rng, &atoms, nn);
        p.add_rule(head, pos, neg).expect("atoms exist");
    }
    let constraints = rng.gen_range(0..=shape.max_constraints);
    let cmax = shape.max_body.max(1);
    for _ in 0..constraints {
        let np = rng.gen_range(0..=cmax);
        let nn = rng.gen_range(if np == 0 { 1 } else { 0 }..=cmax);
        let pos = pick(&mut rng, &atoms, np);
        let neg = pick(&mut rng, &atoms, nn);
        p.add_constraint(pos, neg).expect("non-empty body");
    }
    p
}

/// Hand-written programs with positive loops, constraints and odd cycles.
pub fn handcrafted() -> Vec<(&'static str, &'static str)> {
    vec![
        ("two_loop", "p :- q.\nq :- p.\n"),
        ("three_loop", "a :- c.\nb :- a.\nc :- b.\n"),
        ("forced_loop", "p :- q.\nq :- p.\n:- not p.\n"),
        ("loop_with_exit", "p :- q.\nq :- p.\np :- not r.\nr :- not p.\n"),
        ("three_loop_with_exit", "a :- c.\nb :- a.\nc :- b.\na :- not x.\nx :- not a.\n:- x.\n"),
        ("even_loop", "a :- not b.\nb :- not a.\n"),
        ("odd_loop", "a :- not a.\n"),
        ("odd_three", "a :- not b.\nb :- not c.\nc :- not a.\n"),
        ("fact_constraint", "a.\n:- a.\n"),
        ("chain", "a.\nb :- a.\nc :- b, not d.\nd :- not c.\n"),
        ("nested_loops", "p :- q.\nq :- p.\nq :- r.\nr :- q.\nr :- not s.\ns :- not r.\n:- not p.\n"),
        ("support_needed", "a :- b.\nb :- a.\nc :- not a.\na :- not c.\n:- c.\n"),
        ("self_support", "p :- p.\n:- not p.\n"),
        ("overlap", "a :- b, not b.\nb :- not c.\nc :- not b.\n"),
        (
            "choice_pairs",
            "a :- not na.\nna :- not a.\nb :- not nb.\nnb :- not b.\nc :- a, b.\nc :- not a, not b.\n:- not c.\n",
        ),
    ]
}

/// Pigeonhole: `pigeons` pigeons into `holes` holes, via choice pairs.
pub fn pigeonhole(pigeons: usize, holes: usize) -> GroundProgram {
    let mut p = GroundProgram::new();
    let mut at = vec![vec![AtomId::NONE; holes]; pigeons];
    for i in 0..pigeons {
        let placed = p.add_atom(&format!("placed({i})"));
        for j in 0..holes {
            let x = p.add_atom(&format!("p({i},{j})"));
            let nx = p.add_atom(&format!("np({i},{j})"));
            p.add_rule(x, [], [nx]).unwrap();
            p.add_rule(nx, [], [x]).unwrap();
            p.add_rule(placed, [x], []).unwrap();
            at[i][j] = x;
        }
        p.add_constraint([], [placed]).unwrap();
    }
    for j in 0..holes {
        for i in 0..pigeons {
            for k in i + 1..pigeons {
                p.add_constraint([at[i][j], at[k][j]], []).unwrap();
            }
        }
    }
    p
}

/// Edges of a seeded random graph with the given edge probability.
pub fn random_graph(nodes: usize, edge_prob: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..nodes {
        for v in u + 1..nodes {
            if rng.gen_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Graph coloring: every node takes exactly one of `colors` colors.
pub fn coloring(nodes: usize, edges: &[(usize, usize)], colors: usize) -> GroundProgram {
    let mut p = GroundProgram::new();
    let col: Vec<Vec<AtomId>> =
        (0..nodes).map(|v| (0..colors).map(|c| p.add_atom(&format!("col({v},{c})"))).collect()).collect();
    for v in 0..nodes {
        for c in 0..colors {
            let others: Vec<AtomId> = (0..colors).filter(|&d| d != c).map(|d| col[v][d]).collect();
            p.add_rule(col[v][c], [], others).unwrap();
        }
    }
    for &(u, v) in edges {
        for c in 0..colors {
            p.add_constraint([col[u][c], col[v][c]], []).unwrap();
        }
    }
    p
}

/// Grid walk from the corner that must visit every cell within `steps` moves.
pub fn visitall(width: usize, height: usize, steps: usize) -> GroundProgram {
    let mut p = GroundProgram::new();
    let cells = width * height;
    let neighbours = |c: usize| {
        let (x, y) = (c % width, c / width);
        let mut v = Vec::new();
        if x > 0 {
            v.push(c - 1);
        }
        if x + 1 < width {
            v.push(c + 1);
        }
        if y > 0 {
            v.push(c - width);
        }
        if y + 1 < height {
            v.push(c + width);
        }
        v
    };
    let at: Vec<Vec<AtomId>> =
        (0..=steps).map(|t| (0..cells).map(|c| p.add_atom(&format!("at({c},{t})"))).collect()).collect();
    p.add_rule(at[0][0], [], []).unwrap();
    for t in 0..steps {
        let moved = p.add_atom(&format!("moved({t})"));
        let mut moves = Vec::new();
        for c in 0..cells {
            for d in neighbours(c) {
                let mv = p.add_atom(&format!("mv({c},{d},{t})"));
                let nmv = p.add_atom(&format!("nmv({c},{d},{t})"));
                p.add_rule(mv, [at[t][c]], [nmv]).unwrap();
                p.add_rule(nmv, [at[t][c]], [mv]).unwrap();
                p.add_rule(at[t + 1][d], [mv], []).unwrap();
                p.add_rule(moved, [mv], []).unwrap();
                moves.push(mv);
            }
        }
        for (i, &m1) in moves.iter().enumerate() {
            for &m2 in &moves[i + 1..] {
                p.add_constraint([m1, m2], []).unwrap();
            }
        }
        p.add_constraint([], [moved]).unwrap();
    }
    for c in 0..cells {
        let visited = p.add_atom(&format!("visited({c})"));
        for t in 0..=steps {
            p.add_rule(visited, [at[t][c]], []).unwrap();
        }
        p.add_constraint([], [visited]).unwrap();
    }
    p
}

/// The structured benchmark set used for the fwd/res comparison.
pub fn structured_suite() -> Vec<(String, GroundProgram)> {
    let mut v = vec![("pigeonhole_7_6".to_string(), pigeonhole(7, 6))];
    for seed in [1, 2] {
        let edges = random_graph(20, 0.2, seed);
        v.push((format!("coloring_20_s{seed}"), coloring(20, &edges, 3)));
    }
    v.push(("visitall_2x3".to_string(), visitall(3, 2, 5)));
    v.push(("visitall_3x3".to_string(), visitall(3, 3, 8)));
    v
}
