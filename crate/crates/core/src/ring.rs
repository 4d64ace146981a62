//! Exact arithmetic in Z[H] and its half-exponent extension for a finitely
//! generated abelian group H, the coefficient norm, equivalence classes up
//! to +-H, induced maps, and Laurent divisibility along group directions.

use crate::abelian::{FinAbGroup, GroupElem, GroupHom};
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub type Coeff = Rational64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("hom does not match the element's group")]
    HomMismatch,
    #[error("element is not divisible")]
    NotDivisible,
    #[error("division direction has finite order")]
    FiniteOrderElement,
    #[error("no +-m^(k/2) translate is involution-invariant")]
    NotSymmetrizable,
    #[error("operation requires integral exponents")]
    HalfExponent,
    #[error("coefficient denominator exceeds 2")]
    CoeffDenominator,
    #[error(transparent)]
    Abelian(#[from] crate::abelian::AbelianError),
}

/// An element of `Z[H]` or of its half extension.
///
/// Term keys are exponent vectors of `H`. When `half` is set, the free
/// coordinates of every key are stored doubled, so a key with free part
/// `[1]` means `t^(1/2)`; this keeps all arithmetic integral. The
/// normalized form demotes to the plain lattice whenever all doubled
/// coordinates are even, so structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElem {
    group: FinAbGroup,
    terms: BTreeMap<GroupElem, Coeff>,
    half: bool,
}

impl GroupRingElem {
    pub fn zero(group: &FinAbGroup) -> Self {
        GroupRingElem {
            group: group.clone(),
            terms: BTreeMap::new(),
            half: false,
        }
    }

    pub fn one(group: &FinAbGroup) -> Self {
        Self::monomial(group, &group.identity(), Coeff::one())
            .expect("identity is always a group element")
    }

    pub fn monomial(group: &FinAbGroup, g: &GroupElem, c: Coeff) -> Result<Self, RingError> {
        group.check(g)?;
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g.clone(), c);
        }
        Ok(GroupRingElem {
            group: group.clone(),
            terms,
            half: false,
        })
    }

    pub fn from_terms<I>(group: &FinAbGroup, it: I) -> Result<Self, RingError>
    where
        I: IntoIterator<Item = (GroupElem, Coeff)>,
    {
        let mut terms: BTreeMap<GroupElem, Coeff> = BTreeMap::new();
        for (g, c) in it {
            group.check(&g)?;
            let entry = terms.entry(g).or_insert_with(Coeff::zero);
            *entry += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(GroupRingElem {
            group: group.clone(),
            terms,
            half: false,
        })
    }

    /// Builds an element directly in the half lattice; keys carry doubled
    /// free coordinates.
    pub fn from_half_terms<I>(group: &FinAbGroup, it: I) -> Result<Self, RingError>
    where
        I: IntoIterator<Item = (GroupElem, Coeff)>,
    {
        let mut e = Self::from_terms(group, it)?;
        e.half = true;
        e.normalize();
        Ok(e)
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_half(&self) -> bool {
        self.half
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates terms with keys as stored (doubled free coordinates when
    /// `is_half`).
    pub fn terms(&self) -> impl Iterator<Item = (&GroupElem, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &GroupElem) -> Coeff {
        let key = if self.half { double_key(g) } else { g.clone() };
        self.terms.get(&key).copied().unwrap_or_else(Coeff::zero)
    }

    /// Validates the declared coefficient constraint: integral coefficients
    /// unless half-integers are permitted, in which case denominators divide 2.
    pub fn check_denominators(&self, half_allowed: bool) -> Result<(), RingError> {
        for c in self.terms.values() {
            let d = *c.denom();
            if d != 1 && (!half_allowed || d != 2) {
                return Err(RingError::CoeffDenominator);
            }
        }
        Ok(())
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        if self.half {
            let demotable = self
                .terms
                .keys()
                .all(|k| k.free_part().iter().all(|x| x % 2 == 0));
            if demotable {
                self.terms = std::mem::take(&mut self.terms)
                    .into_iter()
                    .map(|(k, c)| (halve_key(&k), c))
                    .collect();
                self.half = false;
            }
        }
        if self.terms.is_empty() {
            self.half = false;
        }
    }

    /// Rewrites into the half lattice (doubling free coordinates) without
    /// changing the value.
    pub(crate) fn promoted(&self) -> GroupRingElem {
        if self.half {
            return self.clone();
        }
        GroupRingElem {
            group: self.group.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (double_key(k), *c))
                .collect(),
            half: true,
        }
    }

    fn align(&self, other: &GroupRingElem) -> (GroupRingElem, GroupRingElem) {
        match (self.half, other.half) {
            (true, false) => (self.clone(), other.promoted()),
            (false, true) => (self.promoted(), other.clone()),
            _ => (self.clone(), other.clone()),
        }
    }

    pub fn add(&self, other: &GroupRingElem) -> Result<GroupRingElem, RingError> {
        if self.group != other.group {
            return Err(RingError::GroupMismatch);
        }
        let (mut a, b) = self.align(other);
        for (g, c) in b.terms {
            let entry = a.terms.entry(g).or_insert_with(Coeff::zero);
            *entry += c;
        }
        a.normalize();
        Ok(a)
    }

    pub fn neg(&self) -> GroupRingElem {
        GroupRingElem {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect(),
            half: self.half,
        }
    }

    pub fn sub(&self, other: &GroupRingElem) -> Result<GroupRingElem, RingError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Coeff) -> GroupRingElem {
        if c.is_zero() {
            return Self::zero(&self.group);
        }
        GroupRingElem {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(g, k)| (g.clone(), k * c)).collect(),
            half: self.half,
        }
    }

    /// Convolution product; the group law reduces torsion coordinates.
    pub fn mul(&self, other: &GroupRingElem) -> Result<GroupRingElem, RingError> {
        if self.group != other.group {
            return Err(RingError::GroupMismatch);
        }
        let (a, b) = self.align(other);
        let mut terms: BTreeMap<GroupElem, Coeff> = BTreeMap::new();
        for (g, c) in &a.terms {
            for (h, d) in &b.terms {
                let key = a.group.mul(g, h);
                let entry = terms.entry(key).or_insert_with(Coeff::zero);
                *entry += c * d;
            }
        }
        let mut out = GroupRingElem {
            group: self.group.clone(),
            terms,
            half: a.half,
        };
        out.normalize();
        Ok(out)
    }

    /// Translation by a group element: `g . self`.
    pub fn translate(&self, g: &GroupElem) -> Result<GroupRingElem, RingError> {
        let m = Self::monomial(&self.group, g, Coeff::one())?;
        self.mul(&m)
    }

    /// Translation by a delta expressed in the stored key lattice (doubled
    /// free coordinates when `is_half`).
    pub(crate) fn translate_stored(&self, delta: &GroupElem) -> GroupRingElem {
        let mut out = GroupRingElem {
            group: self.group.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (self.group.mul(k, delta), *c))
                .collect(),
            half: self.half,
        };
        out.normalize();
        out
    }

    /// Sum of absolute values of the coefficients.
    pub fn norm(&self) -> Coeff {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Applies `f` to every term key and collects coefficients.
    pub fn pushforward(&self, f: &GroupHom) -> Result<GroupRingElem, RingError> {
        if *f.source() != self.group {
            return Err(RingError::HomMismatch);
        }
        if self.half {
            return Err(RingError::HalfExponent);
        }
        let mut terms: BTreeMap<GroupElem, Coeff> = BTreeMap::new();
        for (g, c) in &self.terms {
            let img = f.apply(g)?;
            let entry = terms.entry(img).or_insert_with(Coeff::zero);
            *entry += *c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(GroupRingElem {
            group: f.target().clone(),
            terms,
            half: false,
        })
    }

    /// Partitions the terms by their image under `f`; the parts sum back to
    /// `self`.
    pub fn coset_split(&self, f: &GroupHom) -> Result<BTreeMap<GroupElem, GroupRingElem>, RingError> {
        if *f.source() != self.group {
            return Err(RingError::HomMismatch);
        }
        if self.half {
            return Err(RingError::HalfExponent);
        }
        let mut out: BTreeMap<GroupElem, GroupRingElem> = BTreeMap::new();
        for (g, c) in &self.terms {
            let img = f.apply(g)?;
            let part = out
                .entry(img)
                .or_insert_with(|| GroupRingElem::zero(&self.group));
            part.terms.insert(g.clone(), *c);
        }
        Ok(out)
    }

    /// Exact division by `(h - 1)^power` for `h` of infinite order.
    ///
    /// Z[H] splits over the cosets of <h> as a direct sum of Laurent
    /// polynomial modules in s = h, and (h-1)^power acts on each summand as
    /// (s-1)^power, so divisibility is decided coset by coset.
    pub fn divide_exact(
        &self,
        h: &GroupElem,
        power: u32,
    ) -> Result<GroupRingElem, RingError> {
        self.group.check(h)?;
        if !self.group.has_infinite_order(h) {
            return Err(RingError::FiniteOrderElement);
        }
        if power == 0 {
            return Ok(self.clone());
        }
        let step = if self.half { double_key(h) } else { h.clone() };
        let mut quotient_terms: BTreeMap<GroupElem, Coeff> = BTreeMap::new();
        for (rep, poly) in self.split_by_direction(&step) {
            let mut coeffs = poly;
            for _ in 0..power {
                coeffs = divide_laurent_by_s_minus_1(&coeffs).ok_or(RingError::NotDivisible)?;
            }
            for (n, c) in coeffs {
                if c.is_zero() {
                    continue;
                }
                let key = self.group.mul(&rep, &self.group.pow(&step, n));
                quotient_terms.insert(key, c);
            }
        }
        let mut out = GroupRingElem {
            group: self.group.clone(),
            terms: quotient_terms,
            half: self.half,
        };
        out.normalize();
        Ok(out)
    }

    /// Groups the terms by coset of `<step>` and writes each coset part as a
    /// Laurent polynomial in the step direction: term `rep . step^n` with
    /// coefficient c appears as `(n, c)`.
    pub(crate) fn split_by_direction(
        &self,
        step: &GroupElem,
    ) -> BTreeMap<GroupElem, BTreeMap<i64, Coeff>> {
        let mut out: BTreeMap<GroupElem, BTreeMap<i64, Coeff>> = BTreeMap::new();
        for (g, c) in &self.terms {
            let (rep, n) = coset_reduce(&self.group, g, step);
            out.entry(rep).or_default().insert(n, *c);
        }
        out
    }

    /// Canonical representative with respect to the meridian direction `m`:
    /// the unique `+-m^(k/2)` translate invariant under the involution that
    /// inverts free coordinates, with the sign fixed so that the image under
    /// killing `m` has positive leading coefficient.
    pub fn canonical_rep(&self, m: &GroupElem) -> Result<GroupRingElem, RingError> {
        self.canonical_rep_full(m).map(|r| r.elem)
    }

    /// As [`canonical_rep`](Self::canonical_rep), also reporting the applied
    /// normalization: the number of half-powers of `m` translated by, the
    /// torsion component of the translation, and whether the sign flipped.
    pub fn canonical_rep_full(&self, m: &GroupElem) -> Result<CanonicalRep, RingError> {
        self.group.check(m)?;
        if self.is_zero() {
            return Ok(CanonicalRep {
                elem: self.clone(),
                half_power: 0,
                torsion_shift: vec![0; self.group.torsion_divisors().len()],
                negated: false,
            });
        }
        if !self.group.has_infinite_order(m) {
            return Err(RingError::FiniteOrderElement);
        }
        let x = self.promoted();
        let v = m.free_part().to_vec();
        let w = m.torsion_part().to_vec();

        // Per-coordinate extremes of the support force the shift count.
        let rank = self.group.rank();
        let mut min = vec![i64::MAX; rank];
        let mut max = vec![i64::MIN; rank];
        for k in x.terms.keys() {
            for (i, &f) in k.free_part().iter().enumerate() {
                min[i] = min[i].min(f);
                max[i] = max[i].max(f);
            }
        }
        let i0 = v
            .iter()
            .position(|&c| c != 0)
            .expect("infinite order was checked");
        let num = -(min[i0] + max[i0]);
        if num % (2 * v[i0]) != 0 {
            return Err(RingError::NotSymmetrizable);
        }
        let j = num / (2 * v[i0]);
        for i in 0..rank {
            if min[i] + max[i] + 2 * j * v[i] != 0 {
                return Err(RingError::NotSymmetrizable);
            }
        }

        let shifted = 'search: {
            for tors_shift in torsion_half_shifts(&self.group, &w, j) {
                // One half-power of m shifts the doubled free lattice by v.
                let shift = self.group.elem(
                    v.iter().map(|&c| c * j).collect(),
                    tors_shift.clone(),
                )?;
                let y = x.translate_stored(&shift);
                if y.is_involution_symmetric() {
                    break 'search Some((y, tors_shift));
                }
            }
            None
        };
        let (y, torsion_shift) = shifted.ok_or(RingError::NotSymmetrizable)?;

        // Sign: sum coefficients over each <m>-coset; the first nonzero sum
        // (in key order) must be positive. Falls back to the first nonzero
        // coefficient when all coset sums vanish.
        let step = if y.is_half() { double_key(m) } else { m.clone() };
        let mut sums: Vec<(GroupElem, Coeff)> = y
            .split_by_direction(&step)
            .into_iter()
            .map(|(rep, poly)| (rep, poly.values().sum()))
            .collect();
        sums.retain(|(_, s)| !s.is_zero());
        let leading = sums
            .first()
            .map(|(_, s)| *s)
            .or_else(|| y.terms.values().find(|c| !c.is_zero()).copied())
            .unwrap_or_else(Coeff::one);
        let negated = leading < Coeff::zero();
        let mut out = if negated { y.neg() } else { y };
        out.normalize();
        Ok(CanonicalRep {
            elem: out,
            half_power: j,
            torsion_shift,
            negated,
        })
    }

    fn is_involution_symmetric(&self) -> bool {
        self.terms.iter().all(|(k, c)| {
            let inv = GroupElem::from_parts(
                k.free_part().iter().map(|x| -x).collect(),
                k.torsion_part().to_vec(),
            );
            self.terms.get(&inv) == Some(c)
        })
    }

    /// Comparison key used for the +-H normal form: the doubled-lattice term
    /// list of the candidate.
    fn doubled_term_vec(&self) -> Vec<(GroupElem, Coeff)> {
        self.promoted()
            .terms
            .into_iter()
            .collect()
    }
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::formats::format_elem_default(self))
    }
}

fn double_key(g: &GroupElem) -> GroupElem {
    GroupElem::from_parts(
        g.free_part().iter().map(|x| 2 * x).collect(),
        g.torsion_part().to_vec(),
    )
}

fn halve_key(g: &GroupElem) -> GroupElem {
    GroupElem::from_parts(
        g.free_part().iter().map(|x| x / 2).collect(),
        g.torsion_part().to_vec(),
    )
}

/// Reduces `g` modulo the infinite cyclic subgroup generated by `step`:
/// returns `(rep, n)` with `g = rep . step^n` and the distinguished free
/// coordinate of `rep` in `[0, |step_i0|)`.
fn coset_reduce(group: &FinAbGroup, g: &GroupElem, step: &GroupElem) -> (GroupElem, i64) {
    let v = step.free_part();
    let i0 = v
        .iter()
        .position(|&c| c != 0)
        .expect("step must have infinite order");
    let n = g.free_part()[i0].div_euclid(v[i0].abs()) * v[i0].signum();
    let rep = group.mul(g, &group.pow(&group.inv(step), n));
    (rep, n)
}

/// Divides a Laurent polynomial (exponent -> coefficient) by (s - 1),
/// returning None when the division is not exact.
fn divide_laurent_by_s_minus_1(p: &BTreeMap<i64, Coeff>) -> Option<BTreeMap<i64, Coeff>> {
    if p.is_empty() {
        return Some(BTreeMap::new());
    }
    let lo = *p.keys().next().unwrap();
    let hi = *p.keys().last().unwrap();
    // p = (s - 1) q with q = sum_{n=lo}^{hi-1} q_n s^n and
    // q_n = -(p_lo + ... + p_n) accumulated from the bottom.
    let mut q = BTreeMap::new();
    let mut acc = Coeff::zero();
    for n in lo..hi {
        acc += p.get(&n).copied().unwrap_or_else(Coeff::zero);
        if !acc.is_zero() {
            q.insert(n, -acc);
        }
    }
    acc += p.get(&hi).copied().unwrap_or_else(Coeff::zero);
    if acc.is_zero() {
        Some(q)
    } else {
        None
    }
}

/// Enumerates the torsion components of candidate `m^(j/2)` translates, in a
/// deterministic order. For even `j` the shift is exactly `(j/2) w`; for odd
/// `j` every solution of `2 s = j w` in the torsion group is tried.
fn torsion_half_shifts(group: &FinAbGroup, w: &[i64], j: i64) -> Vec<Vec<i64>> {
    let divisors = group.torsion_divisors();
    if j % 2 == 0 {
        return vec![w
            .iter()
            .zip(divisors)
            .map(|(&wi, &d)| ((j / 2) * wi).rem_euclid(d as i64))
            .collect()];
    }
    let mut candidates: Vec<Vec<i64>> = vec![Vec::new()];
    for (&wi, &d) in w.iter().zip(divisors) {
        let d = d as i64;
        let target = (j * wi).rem_euclid(d);
        let mut sols = Vec::new();
        for s in 0..d {
            if (2 * s).rem_euclid(d) == target {
                sols.push(s);
            }
        }
        if sols.is_empty() {
            return Vec::new();
        }
        candidates = candidates
            .into_iter()
            .flat_map(|base| {
                sols.iter().map(move |&s| {
                    let mut b = base.clone();
                    b.push(s);
                    b
                })
            })
            .collect();
    }
    candidates
}

/// The result of symmetrizing an element along a meridian direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalRep {
    pub elem: GroupRingElem,
    /// The translate applied was `m^(half_power / 2)`.
    pub half_power: i64,
    /// Torsion component of the applied translate.
    pub torsion_shift: Vec<i64>,
    /// Whether the sign rule flipped the element.
    pub negated: bool,
}

/// An element of `Z[H] / +-H`: a group-ring element considered up to sign
/// and translation. Stored in a canonical normal form, so equality is
/// structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmClass {
    rep: GroupRingElem,
}

impl PmClass {
    pub fn new(x: GroupRingElem) -> Self {
        PmClass { rep: pm_normal_form(&x) }
    }

    pub fn representative(&self) -> &GroupRingElem {
        &self.rep
    }

    pub fn group(&self) -> &FinAbGroup {
        self.rep.group()
    }

    pub fn norm(&self) -> Coeff {
        self.rep.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    /// A reader-friendly representative: the translate of the normal form
    /// whose least support key is the identity, signed so that the first
    /// coefficient is positive. Canonical because the normal form is.
    pub fn display_rep(&self) -> GroupRingElem {
        if self.rep.is_zero() {
            return self.rep.clone();
        }
        let group = self.rep.group().clone();
        let min_key = self
            .rep
            .terms
            .keys()
            .next()
            .expect("nonzero element has support")
            .clone();
        let shifted = self.rep.translate_stored(&group.inv(&min_key));
        let first = shifted
            .terms
            .values()
            .next()
            .copied()
            .unwrap_or_else(Coeff::one);
        if first < Coeff::zero() {
            shifted.neg()
        } else {
            shifted
        }
    }
}

impl fmt::Display for PmClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_rep())
    }
}

/// True iff `a = +-h . b` for some `h` in the group.
pub fn pm_equal(a: &PmClass, b: &PmClass) -> bool {
    a == b
}

/// Normal form under sign and translation: among all translates moving a
/// support element to the identity, and both signs, pick the least term
/// list. This decides +-H equality without any search over H itself.
fn pm_normal_form(x: &GroupRingElem) -> GroupRingElem {
    if x.is_zero() {
        return x.clone();
    }
    let xp = x.promoted();
    let group = xp.group().clone();
    let mut best: Option<(Vec<(GroupElem, Coeff)>, GroupRingElem)> = None;
    let support: Vec<GroupElem> = xp.terms.keys().cloned().collect();
    for g in &support {
        let shifted = xp.translate_stored(&group.inv(g));
        for cand in [shifted.clone(), shifted.neg()] {
            let key = cand.doubled_term_vec();
            if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                best = Some((key, cand));
            }
        }
    }
    let (_, mut rep) = best.expect("nonzero element has support");
    rep.normalize();
    rep
}
