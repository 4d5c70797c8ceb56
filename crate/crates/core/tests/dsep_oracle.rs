//! d-separation checked against explicit path enumeration: a path is open
//! when every non-collider on it is unobserved and every collider has
//! itself or a descendant observed.

use faithcheck_core::ci::statement_universe;
use faithcheck_core::dag::{d_separated, enumerate_dags, implied_ci_set};
use faithcheck_core::{Dag, VarSet, VarSubset};

fn simple_paths(g: &Dag, from: usize, to: usize) -> Vec<Vec<usize>> {
    fn walk(g: &Dag, path: &mut Vec<usize>, to: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if last == to {
            out.push(path.clone());
            return;
        }
        for next in 0..g.n() {
            if g.adjacent(last, next) && !path.contains(&next) {
                path.push(next);
                walk(g, path, to, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, &mut vec![from], to, &mut out);
    out
}

fn open(g: &Dag, path: &[usize], given: VarSubset) -> bool {
    path.windows(3).all(|w| {
        let (a, m, b) = (w[0], w[1], w[2]);
        if g.has_edge(a, m) && g.has_edge(b, m) {
            given.contains(m) || !g.descendants(m).intersection(given).is_empty()
        } else {
            !given.contains(m)
        }
    })
}

fn separated_by_paths(g: &Dag, a: VarSubset, b: VarSubset, s: VarSubset) -> bool {
    a.iter().all(|x| {
        b.iter()
            .all(|y| simple_paths(g, x, y).iter().all(|p| !open(g, p, s)))
    })
}

fn check(n: usize) {
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let vars = VarSet::new(&names).unwrap();
    let universe = statement_universe(&vars);
    for g in enumerate_dags(&vars).unwrap() {
        let implied = implied_ci_set(&g);
        for st in &universe {
            let expected = separated_by_paths(&g, st.a(), st.b(), st.given());
            assert_eq!(
                d_separated(&g, st.a(), st.b(), st.given()).unwrap(),
                expected,
                "{g} {}",
                st.format(&vars)
            );
            assert_eq!(implied.contains(st), expected);
        }
    }
}

#[test]
fn three_variables() {
    check(3);
}

#[test]
fn four_variables() {
    check(4);
}

#[test]
fn descendants_open_colliders() {
    let vars = VarSet::xyz();
    // X → Z ← Y is not a chain; conditioning on Z opens it
    let g = faithcheck_core::dag::parse_dag("X->Z;Y->Z", &vars).unwrap();
    let (x, y, z) = (
        VarSubset::single(0),
        VarSubset::single(1),
        VarSubset::single(2),
    );
    assert!(d_separated(&g, x, y, VarSubset::EMPTY).unwrap());
    assert!(!d_separated(&g, x, y, z).unwrap());
}
