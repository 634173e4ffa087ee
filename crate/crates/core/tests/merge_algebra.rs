use semwork_core::drt::{equivalent, merge};
use semwork_core::gen::DrsGen;
use semwork_core::term::{compact, Drs, Term};
use semwork_core::translate::Vocabulary;

fn gen_drss(n: usize) -> Vec<Drs> {
    let voc = Vocabulary::new(&[("man", 1), ("walk", 1), ("see", 2)], &["anna"]);
    let mut g = DrsGen::new(7, voc);
    (0..n).map(|i| g.drs(i % 3)).collect()
}

fn show(d: &Drs) -> String {
    compact(&Term::Drs(d.clone()))
}

#[test]
fn merge_is_commutative_associative_with_identity() {
    let ds = gen_drss(90);
    let mut pairs = 0;
    let mut triples = 0;
    for (i, a) in ds.iter().enumerate() {
        let b = &ds[(i * 7 + 3) % ds.len()];
        let c = &ds[(i * 13 + 5) % ds.len()];
        for (x, y) in [(a, b), (b, c), (a, c)] {
            let (xy, yx) = (merge(x, y), merge(y, x));
            assert!(equivalent(&xy, &yx), "{} vs {}", show(&xy), show(&yx));
            assert_eq!(xy.universe.len(), x.universe.len() + y.universe.len());
            assert_eq!(xy.conditions.len(), x.conditions.len() + y.conditions.len());
            pairs += 1;
        }
        let l = merge(&merge(a, b), c);
        let r = merge(a, &merge(b, c));
        assert!(equivalent(&l, &r), "{} vs {}", show(&l), show(&r));
        triples += 1;
        assert!(equivalent(&merge(a, &Drs::empty()), a));
        assert!(equivalent(&merge(&Drs::empty(), a), a));
    }
    assert!(pairs + triples >= 200);
}

/// A DRS merged with itself keeps two copies of the universe.
#[test]
fn self_merge_renames_apart() {
    for d in gen_drss(40) {
        let m = merge(&d, &d);
        assert_eq!(m.universe.len(), 2 * d.universe.len());
        let mut names: Vec<&str> = m.universe.iter().map(|v| v.name.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), m.universe.len(), "{}", show(&m));
    }
}
