//! Free differential calculus on finite group presentations, Alexander
//! matrices over Z[H], and the torsion invariants of knot complements
//! computed from deficiency-one presentations.

use crate::abelian::{group_from_relations, FinAbGroup, GroupElem};
use crate::cyclotomic::{
    character_exponents, character_pairing, divide_cyc_laurent, CycLaurent, CyclotomicField,
};
use crate::ring::{Coeff, GroupRingElem, PmClass, RingError};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FoxError {
    #[error("generator index {0} out of range")]
    BadGenerator(usize),
    #[error("presentation must have exactly one fewer relator than generators")]
    NotDeficiencyOne,
    #[error("first homology must have rank one, found rank {0}")]
    RankNotOne(usize),
    #[error("meridian abelianizes to a finite-order element")]
    FiniteOrderMeridian,
    #[error("no column with an infinite-order generator")]
    NoValidColumn,
    #[error("torsion quotient is indeterminate")]
    Indeterminate,
    #[error("matrix too large for exact minor expansion")]
    MatrixTooLarge,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Abelian(#[from] crate::abelian::AbelianError),
}

/// A freely reduced word in a free group: letters are (generator, +-1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord {
    letters: Vec<(usize, i8)>,
}

impl FreeWord {
    pub fn new(letters: impl IntoIterator<Item = (usize, i8)>) -> Self {
        let mut out: Vec<(usize, i8)> = Vec::new();
        for (g, e) in letters {
            debug_assert!(e == 1 || e == -1);
            if out.last().is_some_and(|&(h, f)| h == g && f == -e) {
                out.pop();
            } else {
                out.push((g, e));
            }
        }
        FreeWord { letters: out }
    }

    pub fn gen(g: usize) -> Self {
        FreeWord { letters: vec![(g, 1)] }
    }

    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        FreeWord::new(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn conjugate(&self, by: &FreeWord) -> FreeWord {
        by.concat(self).concat(&by.inverse())
    }

    /// Removes matching inverse letters from the two ends.
    pub fn cyclically_reduced(&self) -> FreeWord {
        let mut l = self.letters.clone();
        while l.len() >= 2 {
            let (g0, e0) = l[0];
            let (g1, e1) = *l.last().unwrap();
            if g0 == g1 && e0 == -e1 {
                l.remove(0);
                l.pop();
            } else {
                break;
            }
        }
        FreeWord { letters: l }
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|&(g, _)| g).max()
    }

    pub fn exponent_sum(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0i64; n];
        for &(g, e) in &self.letters {
            v[g] += e as i64;
        }
        v
    }

    /// Replaces every occurrence of generator `g` by `rep`, freely reducing.
    pub fn substitute(&self, g: usize, rep: &FreeWord) -> FreeWord {
        let inv = rep.inverse();
        let mut out: Vec<(usize, i8)> = Vec::new();
        let push = |out: &mut Vec<(usize, i8)>, letter: (usize, i8)| {
            if out.last().is_some_and(|&(h, f)| h == letter.0 && f == -letter.1) {
                out.pop();
            } else {
                out.push(letter);
            }
        };
        for &(h, e) in &self.letters {
            if h == g {
                let w = if e == 1 { rep } else { &inv };
                for &l in &w.letters {
                    push(&mut out, l);
                }
            } else {
                push(&mut out, (h, e));
            }
        }
        FreeWord::new(out)
    }

    /// Renumbers generators; `map[g] = None` must not occur in the word.
    fn renumber(&self, map: &[Option<usize>]) -> FreeWord {
        FreeWord {
            letters: self
                .letters
                .iter()
                .map(|&(g, e)| (map[g].expect("eliminated generator still present"), e))
                .collect(),
        }
    }
}

/// A formal Z-linear combination of free words, the value space of the free
/// Fox derivative.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeWordSum {
    terms: BTreeMap<FreeWord, i64>,
}

impl FreeWordSum {
    pub fn zero() -> Self {
        FreeWordSum::default()
    }

    pub fn word(w: FreeWord) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, 1);
        FreeWordSum { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FreeWord, &i64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: FreeWord, c: i64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if c != 0 {
                    e.insert(c);
                }
            }
        }
    }

    pub fn add(&self, other: &FreeWordSum) -> FreeWordSum {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            let entry = out.terms.entry(w.clone()).or_insert(0);
            *entry += c;
        }
        out.terms.retain(|_, c| *c != 0);
        out
    }

    pub fn neg(&self) -> FreeWordSum {
        FreeWordSum {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &FreeWordSum) -> FreeWordSum {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FreeWordSum) -> FreeWordSum {
        let mut terms: BTreeMap<FreeWord, i64> = BTreeMap::new();
        for (w, c) in &self.terms {
            for (v, d) in &other.terms {
                let entry = terms.entry(w.concat(v)).or_insert(0);
                *entry += c * d;
            }
        }
        terms.retain(|_, c| *c != 0);
        FreeWordSum { terms }
    }
}

/// The free Fox derivative of `w` with respect to generator `j`.
///
/// Axioms: d(x)/dx = 1, d(x^-1)/dx = -x^-1, d(uv)/dx = du/dx + u dv/dx.
pub fn fox_derivative(w: &FreeWord, j: usize) -> FreeWordSum {
    let mut terms: BTreeMap<FreeWord, i64> = BTreeMap::new();
    let mut prefix: Vec<(usize, i8)> = Vec::new();
    for &(g, e) in w.letters() {
        if g == j {
            let contrib = if e == 1 {
                FreeWord::new(prefix.iter().copied())
            } else {
                FreeWord::new(prefix.iter().copied().chain([(g, -1i8)]))
            };
            let c = if e == 1 { 1 } else { -1 };
            let entry = terms.entry(contrib).or_insert(0);
            *entry += c;
        }
        // Maintain the reduced prefix.
        if prefix.last().is_some_and(|&(h, f)| h == g && f == -e) {
            prefix.pop();
        } else {
            prefix.push((g, e));
        }
    }
    terms.retain(|_, c| *c != 0);
    FreeWordSum { terms }
}

/// A finite group presentation with a distinguished meridian word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    names: Vec<String>,
    relators: Vec<FreeWord>,
    meridian: FreeWord,
}

impl GroupPresentation {
    pub fn new(
        names: Vec<String>,
        relators: Vec<FreeWord>,
        meridian: FreeWord,
    ) -> Result<Self, FoxError> {
        let n = names.len();
        for w in relators.iter().chain(std::iter::once(&meridian)) {
            if let Some(g) = w.max_generator() {
                if g >= n {
                    return Err(FoxError::BadGenerator(g));
                }
            }
        }
        Ok(GroupPresentation {
            names,
            relators,
            meridian,
        })
    }

    pub fn n_generators(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }

    pub fn meridian(&self) -> &FreeWord {
        &self.meridian
    }

    /// Abelianization: Smith normal form of the relator exponent matrix,
    /// plus the image of each generator.
    pub fn abelianize(&self) -> Result<(FinAbGroup, Vec<GroupElem>), FoxError> {
        let n = self.n_generators();
        let rows: Vec<Vec<i64>> = self.relators.iter().map(|r| r.exponent_sum(n)).collect();
        let (group, hom) = group_from_relations(n, &rows)?;
        let free_n = FinAbGroup::free(n);
        let images = (0..n)
            .map(|i| {
                let mut coords = vec![0i64; n];
                coords[i] = 1;
                let e = free_n.from_coords(&coords)?;
                hom.apply(&e)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((group, images))
    }

    /// Greedy Tietze simplification: repeatedly eliminates a generator that
    /// occurs exactly once in some relator, substituting it away. The group,
    /// its meridian conjugacy class, and the deficiency are all preserved.
    pub fn simplified(&self) -> GroupPresentation {
        let mut names = self.names.clone();
        let mut relators: Vec<FreeWord> = self
            .relators
            .iter()
            .map(|r| r.cyclically_reduced())
            .collect();
        let mut meridian = self.meridian.clone();

        loop {
            // Candidates: (relator index, generator, occurrence position).
            let mut best: Option<(usize, usize, usize, usize)> = None; // cost, rel, gen, pos
            for (ri, r) in relators.iter().enumerate() {
                let mut counts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for (pos, &(g, _)) in r.letters().iter().enumerate() {
                    counts.entry(g).or_default().push(pos);
                }
                for (g, occ) in counts {
                    if occ.len() != 1 {
                        continue;
                    }
                    // Replacement length is |r| - 1; cost estimates growth.
                    let occurrences: usize = relators
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != ri)
                        .map(|(_, w)| w.letters().iter().filter(|&&(h, _)| h == g).count())
                        .sum::<usize>()
                        + meridian.letters().iter().filter(|&&(h, _)| h == g).count();
                    let cost = (r.len() - 1) * occurrences;
                    if best.is_none_or(|(c, ..)| cost < c) {
                        best = Some((cost, ri, g, occ[0]));
                    }
                }
            }
            let Some((_, ri, g, pos)) = best else { break };

            // r = u g^e v  =>  g = (u^-1 v^-1) for e = 1, g = (v u) for e = -1.
            let r = relators[ri].clone();
            let (head, tail) = r.letters().split_at(pos);
            let (g_letter, tail) = tail.split_first().unwrap();
            debug_assert_eq!(g_letter.0, g);
            let u = FreeWord::new(head.iter().copied());
            let v = FreeWord::new(tail.iter().copied());
            let rep = if g_letter.1 == 1 {
                u.inverse().concat(&v.inverse())
            } else {
                v.concat(&u)
            };

            relators.remove(ri);
            relators = relators
                .iter()
                .map(|w| w.substitute(g, &rep).cyclically_reduced())
                .collect();
            meridian = meridian.substitute(g, &rep);

            // Renumber generators above g down by one.
            let map: Vec<Option<usize>> = (0..names.len())
                .map(|i| match i.cmp(&g) {
                    std::cmp::Ordering::Less => Some(i),
                    std::cmp::Ordering::Equal => None,
                    std::cmp::Ordering::Greater => Some(i - 1),
                })
                .collect();
            names.remove(g);
            relators = relators.iter().map(|w| w.renumber(&map)).collect();
            meridian = meridian.renumber(&map);
        }

        GroupPresentation {
            names,
            relators,
            meridian,
        }
    }
}

/// The abelianized Fox-derivative matrix of a deficiency-one presentation.
#[derive(Debug, Clone)]
pub struct AlexanderMatrix {
    group: FinAbGroup,
    images: Vec<GroupElem>,
    /// (n-1) x n, entry (i, j) = abelianized Fox derivative of relator i by
    /// generator j.
    entries: Vec<Vec<GroupRingElem>>,
    column_names: Vec<String>,
}

impl AlexanderMatrix {
    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn images(&self) -> &[GroupElem] {
        &self.images
    }

    pub fn entries(&self) -> &[Vec<GroupRingElem>] {
        &self.entries
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    /// The fundamental Fox identity, abelianized: for every row i,
    /// sum_j entry(i,j) * (x_j - 1) = 0 in Z[H].
    pub fn verify_row_identity(&self) -> Result<(), FoxError> {
        for row in &self.entries {
            let mut acc = GroupRingElem::zero(&self.group);
            for (j, e) in row.iter().enumerate() {
                let xj = GroupRingElem::monomial(&self.group, &self.images[j], Coeff::one())?;
                let factor = xj.sub(&GroupRingElem::one(&self.group))?;
                acc = acc.add(&e.mul(&factor)?)?;
            }
            if !acc.is_zero() {
                return Err(FoxError::Indeterminate);
            }
        }
        Ok(())
    }
}

/// Abelianizes a free word to a group element using generator images.
pub fn abelianize_word(
    group: &FinAbGroup,
    images: &[GroupElem],
    w: &FreeWord,
) -> GroupElem {
    let mut acc = group.identity();
    for &(g, e) in w.letters() {
        let img = if e == 1 {
            images[g].clone()
        } else {
            group.inv(&images[g])
        };
        acc = group.mul(&acc, &img);
    }
    acc
}

/// Abelianizes a formal word sum to a group-ring element.
pub fn abelianize_sum(
    group: &FinAbGroup,
    images: &[GroupElem],
    s: &FreeWordSum,
) -> Result<GroupRingElem, RingError> {
    GroupRingElem::from_terms(
        group,
        s.terms()
            .map(|(w, &c)| (abelianize_word(group, images, w), Coeff::from_integer(c))),
    )
}

pub fn alexander_matrix(p: &GroupPresentation) -> Result<AlexanderMatrix, FoxError> {
    let n = p.n_generators();
    if n == 0 || p.relators().len() + 1 != n {
        return Err(FoxError::NotDeficiencyOne);
    }
    let (group, images) = p.abelianize()?;
    let mut entries = Vec::with_capacity(n - 1);
    for r in p.relators() {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let d = fox_derivative(r, j);
            row.push(abelianize_sum(&group, &images, &d)?);
        }
        entries.push(row);
    }
    Ok(AlexanderMatrix {
        group,
        images,
        entries,
        column_names: p.names().to_vec(),
    })
}

const MAX_MINOR_SIZE: usize = 9;

/// Determinant over the commutative ring Z[H] by minor expansion along the
/// sparsest row. Deficiency-one presentations are simplified before this is
/// called, so sizes stay small.
pub fn det_group_ring(
    group: &FinAbGroup,
    m: &[Vec<GroupRingElem>],
) -> Result<GroupRingElem, FoxError> {
    let n = m.len();
    if n == 0 {
        return Ok(GroupRingElem::one(group));
    }
    if n > MAX_MINOR_SIZE {
        return Err(FoxError::MatrixTooLarge);
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let row = (0..n)
        .max_by_key(|&i| m[i].iter().filter(|e| e.is_zero()).count())
        .unwrap();
    let mut acc = GroupRingElem::zero(group);
    for j in 0..n {
        if m[row][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<GroupRingElem>> = (0..n)
            .filter(|&i| i != row)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| m[i][c].clone())
                    .collect()
            })
            .collect();
        let sub = det_group_ring(group, &minor)?;
        let signed = if (row + j) % 2 == 0 {
            m[row][j].mul(&sub)?
        } else {
            m[row][j].mul(&sub)?.neg()
        };
        acc = acc.add(&signed)?;
    }
    Ok(acc)
}

/// Division of `x` by `(h - 1)^power` through the character decomposition of
/// the torsion subgroup: each character maps Z[H] onto a Laurent ring over a
/// cyclotomic field, the division runs componentwise, and the inverse
/// discrete Fourier transform recombines the quotient, which must land back
/// in Z[H] exactly.
pub fn character_divide(
    x: &GroupRingElem,
    h: &GroupElem,
    power: u32,
) -> Result<GroupRingElem, RingError> {
    let group = x.group().clone();
    group.check(h)?;
    if !group.has_infinite_order(h) {
        return Err(RingError::FiniteOrderElement);
    }
    if x.is_half() {
        return Err(RingError::HalfExponent);
    }
    if group.rank() != 1 {
        // Only the b_1 = 1 pipeline needs this route.
        return x.divide_exact(h, power);
    }
    let divisors = group.torsion_divisors().to_vec();
    if divisors.is_empty() {
        return x.divide_exact(h, power);
    }
    let t_order = group.torsion_order();
    if t_order > 4096 {
        return x.divide_exact(h, power);
    }
    let modulus = *divisors.last().unwrap();
    let field = CyclotomicField::new(modulus);
    let chars = character_exponents(&divisors);
    let a0 = h.free_part()[0];
    debug_assert!(a0 != 0);

    // Componentwise division.
    let mut quotients: Vec<CycLaurent> = Vec::with_capacity(chars.len());
    for v in &chars {
        let mut comp = CycLaurent::new();
        for (key, c) in x.terms() {
            let e = character_pairing(&divisors, modulus, v, key.torsion_part());
            let z = field.zeta_pow(e);
            let num = crate::cyclotomic::q_from_i64(*c.numer());
            let den = crate::cyclotomic::q_from_i64(*c.denom());
            let scaled: Vec<_> = z.iter().map(|q| q * &num / &den).collect();
            let entry = comp.entry(key.free_part()[0]).or_insert_with(|| field.zero());
            *entry = field.add(entry, &scaled);
        }
        comp.retain(|_, v| !v.iter().all(|q| q.is_zero()));
        let ch = field.zeta_pow(character_pairing(&divisors, modulus, v, h.torsion_part()));
        let mut q = comp;
        for _ in 0..power {
            q = divide_cyc_laurent(&field, &q, &ch, a0).ok_or(RingError::NotDivisible)?;
        }
        quotients.push(q);
    }

    // Inverse transform: coefficient of t^n b = (1/|T|) sum_v zeta^{-<v,b>} q_v[n].
    let mut exps: std::collections::BTreeSet<i64> = std::collections::BTreeSet::new();
    for q in &quotients {
        exps.extend(q.keys().copied());
    }
    let torsion_vectors = character_exponents(&divisors);
    let order_q = crate::cyclotomic::q_from_i64(t_order as i64);
    let mut terms: Vec<(GroupElem, Coeff)> = Vec::new();
    for &n in &exps {
        for b in &torsion_vectors {
            let mut acc = field.zero();
            for (v, q) in chars.iter().zip(&quotients) {
                let Some(comp) = q.get(&n) else { continue };
                let e = character_pairing(&divisors, modulus, v, b);
                let z = field.zeta_pow(-e);
                acc = field.add(&acc, &field.mul(&z, comp));
            }
            if field.is_zero(&acc) {
                continue;
            }
            let rational = field
                .as_rational(&acc)
                .ok_or(RingError::NotDivisible)?
                / &order_q;
            if !rational.denom().is_one() {
                return Err(RingError::NotDivisible);
            }
            let num: i64 = rational
                .numer()
                .try_into()
                .map_err(|_| RingError::NotDivisible)?;
            terms.push((
                group.elem(vec![n], b.clone())?,
                Coeff::from_integer(num),
            ));
        }
    }
    let quotient = GroupRingElem::from_terms(&group, terms)?;

    // Final integrality and correctness assertion.
    let hm1 = GroupRingElem::monomial(&group, h, Coeff::one())?
        .sub(&GroupRingElem::one(&group))?;
    let mut check = quotient.clone();
    for _ in 0..power {
        check = check.mul(&hm1)?;
    }
    if check != *x {
        return Err(RingError::NotDivisible);
    }
    Ok(quotient)
}

/// Divides by `(h-1)^power`, first in Z[H] directly, then through the
/// character decomposition when torsion is present.
fn divide_with_fallback(
    x: &GroupRingElem,
    h: &GroupElem,
    power: u32,
) -> Result<GroupRingElem, RingError> {
    match x.divide_exact(h, power) {
        Ok(q) => Ok(q),
        Err(RingError::NotDivisible) if !x.group().torsion_divisors().is_empty() => {
            character_divide(x, h, power)
        }
        Err(e) => Err(e),
    }
}

/// Outcome of the Turaev torsion computation: either the quotient lands in
/// Z[H], or it only exists as a fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Torsion {
    Integral(PmClass),
    Indeterminate,
}

struct TorsionSetup {
    matrix: AlexanderMatrix,
    meridian_class: GroupElem,
    /// Column indices whose generator has infinite-order image, meridian
    /// column first when the meridian is a single generator.
    columns: Vec<usize>,
}

fn torsion_setup(p: &GroupPresentation) -> Result<TorsionSetup, FoxError> {
    let simplified = p.simplified();
    let matrix = alexander_matrix(&simplified)?;
    if matrix.group.rank() != 1 {
        return Err(FoxError::RankNotOne(matrix.group.rank()));
    }
    let meridian_class = abelianize_word(&matrix.group, &matrix.images, simplified.meridian());
    if !matrix.group.has_infinite_order(&meridian_class) {
        return Err(FoxError::FiniteOrderMeridian);
    }
    let n = simplified.n_generators();
    let mut columns: Vec<usize> = (0..n)
        .filter(|&j| matrix.group.has_infinite_order(&matrix.images[j]))
        .collect();
    if columns.is_empty() {
        return Err(FoxError::NoValidColumn);
    }
    if simplified.meridian().len() == 1 {
        let m_gen = simplified.meridian().letters()[0].0;
        if let Some(pos) = columns.iter().position(|&j| j == m_gen) {
            columns.swap(0, pos);
        }
    }
    Ok(TorsionSetup {
        matrix,
        meridian_class,
        columns,
    })
}

fn minor_without_column(
    matrix: &AlexanderMatrix,
    col: usize,
) -> Vec<Vec<GroupRingElem>> {
    matrix
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|&(j, _)| j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// The sutured torsion `(m - 1) * tau(M)` of a deficiency-one knot-complement
/// presentation with `b_1 = 1`: this is the element the Euler characteristic
/// of the sutured Floer homology equals, and it always lies in Z[H].
pub fn sutured_torsion(p: &GroupPresentation) -> Result<PmClass, FoxError> {
    let setup = torsion_setup(p)?;
    sutured_from_setup(&setup)
}

fn sutured_from_setup(setup: &TorsionSetup) -> Result<PmClass, FoxError> {
    let group = &setup.matrix.group;
    let m_minus_1 = GroupRingElem::monomial(group, &setup.meridian_class, Coeff::one())?
        .sub(&GroupRingElem::one(group))?;
    let mut last_err = FoxError::Indeterminate;
    for &j in &setup.columns {
        // With the meridian column deleted no division is needed at all:
        // tau(M, gamma) = +-D_j when x_j abelianizes to the meridian class.
        let d = det_group_ring(group, &minor_without_column(&setup.matrix, j))?;
        let xj = &setup.matrix.images[j];
        if *xj == setup.meridian_class || group.inv(xj) == setup.meridian_class {
            return Ok(PmClass::new(d));
        }
        let numerator = d.mul(&m_minus_1)?;
        match divide_with_fallback(&numerator, xj, 1) {
            Ok(q) => return Ok(PmClass::new(q)),
            Err(RingError::NotDivisible) => {
                last_err = FoxError::Indeterminate;
                continue;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(last_err)
}

/// Column-pinned variant used to test independence of the deleted column.
pub fn sutured_torsion_via_column(
    p: &GroupPresentation,
    column: usize,
) -> Result<PmClass, FoxError> {
    let setup = torsion_setup(p)?;
    if !setup.columns.contains(&column) {
        return Err(FoxError::NoValidColumn);
    }
    let group = &setup.matrix.group;
    let d = det_group_ring(group, &minor_without_column(&setup.matrix, column))?;
    let xj = &setup.matrix.images[column];
    if *xj == setup.meridian_class || group.inv(xj) == setup.meridian_class {
        return Ok(PmClass::new(d));
    }
    let m_minus_1 = GroupRingElem::monomial(group, &setup.meridian_class, Coeff::one())?
        .sub(&GroupRingElem::one(group))?;
    let numerator = d.mul(&m_minus_1)?;
    let q = divide_with_fallback(&numerator, xj, 1).map_err(|e| match e {
        RingError::NotDivisible => FoxError::Indeterminate,
        e => FoxError::Ring(e),
    })?;
    Ok(PmClass::new(q))
}

/// Number of generators of the simplified presentation; exposed because the
/// torsion pipeline runs on the simplified form.
pub fn simplified_size(p: &GroupPresentation) -> usize {
    p.simplified().n_generators()
}

/// The Turaev torsion `tau(M) = D_j / (x_j - 1)` of the complement, as an
/// element of Z[H] when the division is exact, and `Indeterminate` when tau
/// exists only as a fraction (the sutured torsion is then still defined).
pub fn turaev_torsion(p: &GroupPresentation) -> Result<Torsion, FoxError> {
    let setup = torsion_setup(p)?;
    let group = &setup.matrix.group;
    for &j in &setup.columns {
        let d = det_group_ring(group, &minor_without_column(&setup.matrix, j))?;
        let xj = &setup.matrix.images[j];
        match divide_with_fallback(&d, xj, 1) {
            Ok(q) => return Ok(Torsion::Integral(PmClass::new(q))),
            Err(RingError::NotDivisible) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Torsion::Indeterminate)
}
