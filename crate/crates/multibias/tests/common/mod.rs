//! Shared fixtures for the integration suites.
#![allow(dead_code)] // each suite uses its own slice of the fixtures

use multibias::group::FinAbGroup;
use multibias::map::{from_group_map, MultiMapG, MultiMapT};
use multibias::torus::TorusValue;

pub fn tv(n: i128, d: i128) -> TorusValue {
    TorusValue::new(n, d).unwrap()
}

pub fn z(n: u64) -> FinAbGroup {
    FinAbGroup::cyclic(n).unwrap()
}

/// One golden decomposition case: a hand-constructed map, the search
/// window, and the known certificate rank.
pub struct GoldenCase {
    pub name: &'static str,
    pub map: MultiMapT,
    pub max_q: u64,
    pub max_rank: usize,
    pub golden_rank: usize,
}

/// Ten hand-constructed maps with known certificates.
pub fn golden_corpus() -> Vec<GoldenCase> {
    let z2 = z(2);
    let z4 = z(4);
    let z6 = FinAbGroup::new(&[6]).unwrap();
    let v = FinAbGroup::new(&[2, 2]).unwrap();

    let mut cases = Vec::new();
    cases.push(GoldenCase {
        name: "zero map on (Z/4)^2",
        map: MultiMapT::zero(vec![z4.clone(), z4.clone()]).unwrap(),
        max_q: 4,
        max_rank: 2,
        golden_rank: 0,
    });
    cases.push(GoldenCase {
        name: "m_2",
        map: multibias::map::m_q(2).unwrap(),
        max_q: 2,
        max_rank: 2,
        golden_rank: 1,
    });
    cases.push(GoldenCase {
        name: "m_3",
        map: multibias::map::m_q(3).unwrap(),
        max_q: 3,
        max_rank: 2,
        golden_rank: 1,
    });
    cases.push(GoldenCase {
        name: "m_4",
        map: multibias::map::m_q(4).unwrap(),
        max_q: 4,
        max_rank: 2,
        golden_rank: 1,
    });
    cases.push(GoldenCase {
        name: "2xy/4 through m_2",
        map: MultiMapT::new(vec![z4.clone(), z4.clone()], vec![tv(2, 4)]).unwrap(),
        max_q: 2,
        max_rank: 2,
        golden_rank: 1,
    });
    cases.push(GoldenCase {
        name: "xy/6 on (Z/6)^2",
        map: MultiMapT::new(
            vec![z6.clone(), z6.clone()],
            vec![tv(1, 2), tv(0, 1), tv(0, 1), tv(2, 3)],
        )
        .unwrap(),
        max_q: 4,
        max_rank: 2,
        golden_rank: 2,
    });
    cases.push(GoldenCase {
        name: "xyz/2 on (Z/2)^3",
        map: MultiMapT::new(vec![z2.clone(), z2.clone(), z2.clone()], vec![tv(1, 2)]).unwrap(),
        max_q: 2,
        max_rank: 2,
        golden_rank: 1,
    });
    cases.push(GoldenCase {
        name: "x1y1 + x2y2 on (Z/2+Z/2)^2",
        map: MultiMapT::new(
            vec![v.clone(), v.clone()],
            vec![tv(1, 2), tv(0, 1), tv(0, 1), tv(1, 2)],
        )
        .unwrap(),
        max_q: 2,
        max_rank: 3,
        golden_rank: 2,
    });
    // φ(x, y, u) = 2xyu/4: the dualization of F(x, y) = 2xy
    let f = MultiMapG::new(
        vec![z4.clone(), z4.clone()],
        z4.clone(),
        vec![z4.element(&[2])],
    )
    .unwrap();
    cases.push(GoldenCase {
        name: "dualized F(x,y) = 2xy",
        map: from_group_map(&f).unwrap(),
        max_q: 2,
        max_rank: 2,
        golden_rank: 1,
    });
    // (x1y1 + x2y2)·u/2: rank 1 over the split {x,y} | {u}
    let g = MultiMapG::new(
        vec![v.clone(), v.clone()],
        z2.clone(),
        vec![
            z2.element(&[1]),
            z2.element(&[0]),
            z2.element(&[0]),
            z2.element(&[1]),
        ],
    )
    .unwrap();
    cases.push(GoldenCase {
        name: "dualized identity form",
        map: from_group_map(&g).unwrap(),
        max_q: 2,
        max_rank: 2,
        golden_rank: 1,
    });
    cases
}
