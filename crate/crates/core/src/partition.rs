//! Orbit partition of the index pairs `(a, b) ∈ {0..e-1}²`.
//!
//! Cyclotomic numbers are invariant under a group of six affine maps on index pairs.
//! Which group applies depends on the parity case:
//!
//! - `EvenOrChar2`: `(b,a)`, `(a-b,-b)`, `(b-a,-a)`, `(-a,b-a)`, `(-b,a-b)`
//! - `Odd` (order `2l²` only, `s = l²`): `(b+s,a+s)`, `(s+a-b,-b)`, `(s+b-a,s-a)`,
//!   `(-a,b-a)`, `(s-b,a-b)`
//!
//! Classes are the orbits; the representative of a class is its lexicographically
//! smallest member.

use serde::Serialize;
use thiserror::Error;

use crate::order::{OrderSpec, ParityCase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("pair ({a}, {b}) out of range for e = {e}")]
    OutOfRange { a: u32, b: u32, e: u32 },
}

pub type Pair = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairClass {
    pub rep: Pair,
    /// Sorted ascending; `members[0] == rep`.
    pub members: Vec<Pair>,
}

impl PairClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone)]
pub struct ClassPartition {
    pub order_spec: OrderSpec,
    pub classes: Vec<PairClass>,
    /// Class index of each pair, row-major `a * e + b`.
    class_of: Vec<u32>,
}

fn images(a: u32, b: u32, spec: &OrderSpec) -> [Pair; 5] {
    let e = spec.e as i64;
    let (a, b) = (a as i64, b as i64);
    let m = |x: i64| x.rem_euclid(e) as u32;
    match spec.parity_case {
        ParityCase::EvenOrChar2 => [
            (m(b), m(a)),
            (m(a - b), m(-b)),
            (m(b - a), m(-a)),
            (m(-a), m(b - a)),
            (m(-b), m(a - b)),
        ],
        ParityCase::Odd => {
            let s = e / 2;
            [
                (m(b + s), m(a + s)),
                (m(s + a - b), m(-b)),
                (m(s + b - a), m(s - a)),
                (m(-a), m(b - a)),
                (m(s - b), m(a - b)),
            ]
        }
    }
}

fn check_range(a: u32, b: u32, e: u32) -> Result<(), PartitionError> {
    if a >= e || b >= e {
        return Err(PartitionError::OutOfRange { a, b, e });
    }
    Ok(())
}

/// Closure of `{(a, b)}` under the generating maps, sorted ascending.
pub fn orbit(a: u32, b: u32, spec: &OrderSpec) -> Result<Vec<Pair>, PartitionError> {
    check_range(a, b, spec.e)?;
    let mut seen = vec![(a, b)];
    let mut frontier = vec![(a, b)];
    while let Some((x, y)) = frontier.pop() {
        for img in images(x, y, spec) {
            if !seen.contains(&img) {
                seen.push(img);
                frontier.push(img);
            }
        }
    }
    seen.sort_unstable();
    Ok(seen)
}

pub fn canonical_rep(a: u32, b: u32, spec: &OrderSpec) -> Result<Pair, PartitionError> {
    Ok(orbit(a, b, spec)?[0])
}

pub fn partition(spec: &OrderSpec) -> ClassPartition {
    let e = spec.e;
    let mut class_of = vec![u32::MAX; (e * e) as usize];
    let mut classes = Vec::new();
    // Scanning in lexicographic order, the first unvisited pair of an orbit is its minimum.
    for a in 0..e {
        for b in 0..e {
            if class_of[(a * e + b) as usize] != u32::MAX {
                continue;
            }
            let members = orbit(a, b, spec).expect("in range");
            let idx = classes.len() as u32;
            for &(x, y) in &members {
                class_of[(x * e + y) as usize] = idx;
            }
            classes.push(PairClass { rep: (a, b), members });
        }
    }
    ClassPartition {
        order_spec: *spec,
        classes,
        class_of,
    }
}

/// Number of classes of each size.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SizeCensus {
    pub ones: usize,
    pub twos: usize,
    pub threes: usize,
    pub sixes: usize,
}

impl SizeCensus {
    pub fn total_classes(&self) -> usize {
        self.ones + self.twos + self.threes + self.sixes
    }

    pub fn total_pairs(&self) -> usize {
        self.ones + 2 * self.twos + 3 * self.threes + 6 * self.sixes
    }
}

impl ClassPartition {
    pub fn e(&self) -> u32 {
        self.order_spec.e
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_index(&self, a: u32, b: u32) -> usize {
        self.class_of[(a * self.e() + b) as usize] as usize
    }

    pub fn class_of(&self, a: u32, b: u32) -> &PairClass {
        &self.classes[self.class_index(a, b)]
    }

    pub fn rep_of(&self, a: u32, b: u32) -> Pair {
        self.class_of(a, b).rep
    }

    pub fn reps(&self) -> impl Iterator<Item = Pair> + '_ {
        self.classes.iter().map(|c| c.rep)
    }

    pub fn census(&self) -> SizeCensus {
        class_size_census(self)
    }

    /// True when both partitions were built for the same order and parity case.
    pub fn matches(&self, spec: &OrderSpec) -> bool {
        self.order_spec.l == spec.l
            && self.order_spec.variant == spec.variant
            && self.order_spec.parity_case == spec.parity_case
    }
}

pub fn class_size_census(part: &ClassPartition) -> SizeCensus {
    let mut c = SizeCensus::default();
    for class in &part.classes {
        match class.size() {
            1 => c.ones += 1,
            2 => c.twos += 1,
            3 => c.threes += 1,
            6 => c.sixes += 1,
            n => unreachable!("orbit of a group of order 6 has size {n}"),
        }
    }
    c
}

/// Class count from the closed form: `e + (e-1)(e-2)/6` for `l >= 5`, 19 and 64 for `l = 3`.
pub fn expected_class_count(spec: &OrderSpec) -> usize {
    let e = spec.e as usize;
    if spec.l == 3 {
        return if e == 9 { 19 } else { 64 };
    }
    e + (e - 1) * (e - 2) / 6
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Variant;

    fn even(l: u32, v: Variant) -> OrderSpec {
        OrderSpec::abstract_spec(l, v, ParityCase::EvenOrChar2).unwrap()
    }

    fn odd(l: u32) -> OrderSpec {
        OrderSpec::abstract_spec(l, Variant::TwoL2, ParityCase::Odd).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let s9 = even(3, Variant::L2);
        assert_eq!(
            orbit(1, 2, &s9).unwrap(),
            vec![(1, 2), (1, 8), (2, 1), (7, 8), (8, 1), (8, 7)]
        );
        assert_eq!(orbit(0, 0, &s9).unwrap(), vec![(0, 0)]);
        assert_eq!(orbit(3, 6, &s9).unwrap(), vec![(3, 6), (6, 3)]);
        assert_eq!(orbit(0, 9, &odd(3)).unwrap(), vec![(0, 9)]);
        assert_eq!(
            orbit(9, 0, &s9),
            Err(PartitionError::OutOfRange { a: 9, b: 0, e: 9 })
        );
    }

    #[test]
    fn canonical_rep_examples() {
        let s9 = even(3, Variant::L2);
        assert_eq!(canonical_rep(8, 7, &s9).unwrap(), (1, 2));
        assert_eq!(canonical_rep(0, 0, &s9).unwrap(), (0, 0));
        assert_eq!(orbit(12, 15, &odd(3)).unwrap(), vec![(6, 3), (12, 15)]);
        assert_eq!(canonical_rep(12, 15, &odd(3)).unwrap(), (6, 3));
    }

    #[test]
    fn small_class_counts() {
        assert_eq!(partition(&even(3, Variant::L2)).len(), 19);
        assert_eq!(partition(&even(3, Variant::TwoL2)).len(), 64);
        assert_eq!(partition(&odd(3)).len(), 64);
        assert_eq!(partition(&even(5, Variant::L2)).len(), 117);
    }

    #[test]
    fn census_examples() {
        let c = partition(&even(3, Variant::L2)).census();
        assert_eq!(c, SizeCensus { ones: 1, twos: 1, threes: 8, sixes: 9 });
        let c = partition(&even(3, Variant::TwoL2)).census();
        assert_eq!(c, SizeCensus { ones: 1, twos: 1, threes: 17, sixes: 45 });
        let c = partition(&even(5, Variant::L2)).census();
        assert_eq!(c, SizeCensus { ones: 1, twos: 0, threes: 24, sixes: 92 });
        assert_eq!(c.total_pairs(), 625);
    }

    #[test]
    fn rep_is_constant_on_orbits() {
        for spec in [even(3, Variant::L2), even(3, Variant::TwoL2), odd(3), odd(5), even(7, Variant::L2)] {
            let part = partition(&spec);
            let e = spec.e;
            let covered: usize = part.classes.iter().map(PairClass::size).sum();
            assert_eq!(covered, (e * e) as usize);
            for a in 0..e {
                for b in 0..e {
                    let o = orbit(a, b, &spec).unwrap();
                    assert_eq!(part.rep_of(a, b), o[0]);
                    assert!(o.iter().all(|&(x, y)| part.rep_of(x, y) == o[0]));
                }
            }
            assert_eq!(part.len(), expected_class_count(&spec));
        }
    }
}
