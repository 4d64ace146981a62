//! Finitely generated abelian groups in invariant-factor form, their
//! elements and homomorphisms, and Smith normal form over the integers.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AbelianError {
    #[error("divisor chain violated: {0} does not divide {1}")]
    DivisorChain(u64, u64),
    #[error("divisor {0} must be at least 2")]
    DivisorTooSmall(u64),
    #[error("element has wrong shape for group {0}")]
    ShapeMismatch(String),
    #[error("matrix does not map source relations into target relations")]
    InvalidHom,
    #[error("hom source/target mismatch")]
    HomMismatch,
    #[error("integer overflow in Smith reduction")]
    Overflow,
}

/// A finitely generated abelian group `Z^rank x Z/d1 x ... x Z/dk`
/// with `2 <= d1 | d2 | ... | dk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinAbGroup {
    rank: usize,
    torsion: Vec<u64>,
}

impl FinAbGroup {
    pub fn new(rank: usize, torsion: Vec<u64>) -> Result<Self, AbelianError> {
        for &d in &torsion {
            if d < 2 {
                return Err(AbelianError::DivisorTooSmall(d));
            }
        }
        for w in torsion.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(AbelianError::DivisorChain(w[0], w[1]));
            }
        }
        Ok(FinAbGroup { rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup { rank, torsion: Vec::new() }
    }

    pub fn trivial() -> Self {
        FinAbGroup { rank: 0, torsion: Vec::new() }
    }

    pub fn cyclic(d: u64) -> Result<Self, AbelianError> {
        FinAbGroup::new(0, vec![d])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion_divisors(&self) -> &[u64] {
        &self.torsion
    }

    /// Total number of exponent coordinates (free then torsion).
    pub fn dim(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().product()
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem {
            free: vec![0; self.rank],
            torsion: vec![0; self.torsion.len()],
        }
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        g.free.len() == self.rank
            && g.torsion.len() == self.torsion.len()
            && g.torsion.iter().zip(&self.torsion).all(|(&b, &d)| 0 <= b && (b as u64) < d)
    }

    pub(crate) fn check(&self, g: &GroupElem) -> Result<(), AbelianError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(AbelianError::ShapeMismatch(self.to_string()))
        }
    }

    /// Builds an element from raw exponents, reducing torsion coordinates.
    pub fn elem(&self, free: Vec<i64>, torsion: Vec<i64>) -> Result<GroupElem, AbelianError> {
        if free.len() != self.rank || torsion.len() != self.torsion.len() {
            return Err(AbelianError::ShapeMismatch(self.to_string()));
        }
        let torsion = torsion
            .iter()
            .zip(&self.torsion)
            .map(|(&b, &d)| b.rem_euclid(d as i64))
            .collect();
        Ok(GroupElem { free, torsion })
    }

    /// The single coordinate vector of `g` (free coordinates first).
    pub fn coords(&self, g: &GroupElem) -> Vec<i64> {
        let mut v = g.free.clone();
        v.extend_from_slice(&g.torsion);
        v
    }

    pub fn from_coords(&self, coords: &[i64]) -> Result<GroupElem, AbelianError> {
        if coords.len() != self.dim() {
            return Err(AbelianError::ShapeMismatch(self.to_string()));
        }
        self.elem(coords[..self.rank].to_vec(), coords[self.rank..].to_vec())
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        debug_assert!(self.contains(a) && self.contains(b));
        GroupElem {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.torsion)
                .map(|((x, y), &d)| (x + y).rem_euclid(d as i64))
                .collect(),
        }
    }

    pub fn inv(&self, a: &GroupElem) -> GroupElem {
        GroupElem {
            free: a.free.iter().map(|x| -x).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion)
                .map(|(x, &d)| (-x).rem_euclid(d as i64))
                .collect(),
        }
    }

    pub fn pow(&self, a: &GroupElem, n: i64) -> GroupElem {
        GroupElem {
            free: a.free.iter().map(|x| x * n).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion)
                .map(|(x, &d)| (x * n).rem_euclid(d as i64))
                .collect(),
        }
    }

    /// True when `g` generates an infinite cyclic subgroup.
    pub fn has_infinite_order(&self, g: &GroupElem) -> bool {
        g.free.iter().any(|&x| x != 0)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" x "))
    }
}

/// An element of a [`FinAbGroup`], torsion coordinates stored reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElem {
    free: Vec<i64>,
    torsion: Vec<i64>,
}

impl GroupElem {
    pub fn free_part(&self) -> &[i64] {
        &self.free
    }

    pub fn torsion_part(&self) -> &[i64] {
        &self.torsion
    }

    pub fn is_identity(&self) -> bool {
        self.free.iter().all(|&x| x == 0) && self.torsion.iter().all(|&x| x == 0)
    }

    pub(crate) fn from_parts(free: Vec<i64>, torsion: Vec<i64>) -> Self {
        GroupElem { free, torsion }
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fp: Vec<String> = self.free.iter().map(|x| x.to_string()).collect();
        let tp: Vec<String> = self.torsion.iter().map(|x| x.to_string()).collect();
        write!(f, "({} | {})", fp.join(","), tp.join(","))
    }
}

/// A homomorphism between finitely generated abelian groups, given by an
/// integer matrix acting on exponent coordinates (free first, then torsion).
/// Well-definedness on torsion is checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    source: FinAbGroup,
    target: FinAbGroup,
    /// `target.dim() x source.dim()` matrix, row-major.
    matrix: Vec<Vec<i64>>,
}

impl GroupHom {
    pub fn new(
        source: FinAbGroup,
        target: FinAbGroup,
        matrix: Vec<Vec<i64>>,
    ) -> Result<Self, AbelianError> {
        if matrix.len() != target.dim() || matrix.iter().any(|r| r.len() != source.dim()) {
            return Err(AbelianError::ShapeMismatch(target.to_string()));
        }
        // Each source relation d_j * e_{rank+j} must map to zero in the target:
        // free target coordinates must vanish, torsion ones vanish mod d_i.
        for (j, &dj) in source.torsion_divisors().iter().enumerate() {
            let col = source.rank() + j;
            for (i, row) in matrix.iter().enumerate() {
                let v = (dj as i128) * (row[col] as i128);
                if i < target.rank() {
                    if v != 0 {
                        return Err(AbelianError::InvalidHom);
                    }
                } else {
                    let di = target.torsion_divisors()[i - target.rank()] as i128;
                    if v % di != 0 {
                        return Err(AbelianError::InvalidHom);
                    }
                }
            }
        }
        Ok(GroupHom { source, target, matrix })
    }

    pub fn identity(group: &FinAbGroup) -> Self {
        let n = group.dim();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        GroupHom {
            source: group.clone(),
            target: group.clone(),
            matrix,
        }
    }

    pub fn source(&self) -> &FinAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FinAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, g: &GroupElem) -> Result<GroupElem, AbelianError> {
        self.source.check(g)?;
        let coords = self.source.coords(g);
        let out: Vec<i64> = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(&coords).map(|(a, b)| a * b).sum())
            .collect();
        self.target.from_coords(&out)
    }

    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom, AbelianError> {
        if inner.target != self.source {
            return Err(AbelianError::HomMismatch);
        }
        let rows = self.matrix.len();
        let mid = inner.matrix.len();
        let cols = inner.source.dim();
        let mut m = vec![vec![0i64; cols]; rows];
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = 0i64;
                for k in 0..mid {
                    acc += self.matrix[i][k] * inner.matrix[k][j];
                }
                m[i][j] = acc;
            }
        }
        GroupHom::new(inner.source.clone(), self.target.clone(), m)
    }
}

/// Smith normal form of an integer matrix.
///
/// `left * mat * right` is diagonal with a divisibility chain; `left` and
/// `right` are unimodular. The diagonal is returned with nonnegative entries,
/// nonzero factors first, and has length `min(rows, cols)`.
pub fn smith_normal_form(
    mat: &[Vec<i64>],
) -> Result<(Vec<i64>, Vec<Vec<i64>>, Vec<Vec<i64>>), AbelianError> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut a: Vec<Vec<i128>> = mat
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut left: Vec<Vec<i128>> = ident(rows);
    let mut right: Vec<Vec<i128>> = ident(cols);

    let n = rows.min(cols);
    let mut k = 0;
    while k < n {
        // Pivot of minimal absolute value in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if a[i][j] != 0
                    && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        swap_rows(&mut a, &mut left, k, pi);
        swap_cols(&mut a, &mut right, k, pj);

        // Clear row and column k; restart whenever a remainder survives.
        loop {
            let mut clean = true;
            for i in k + 1..rows {
                let q = div_round(a[i][k], a[k][k]);
                if q != 0 {
                    row_op(&mut a, &mut left, i, k, q)?;
                }
                if a[i][k] != 0 {
                    swap_rows(&mut a, &mut left, k, i);
                    clean = false;
                }
            }
            for j in k + 1..cols {
                let q = div_round(a[k][j], a[k][k]);
                if q != 0 {
                    col_op(&mut a, &mut right, j, k, q)?;
                }
                if a[k][j] != 0 {
                    swap_cols(&mut a, &mut right, k, j);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }

        // Enforce divisibility of the remaining block by the pivot.
        let mut offender = None;
        'scan: for i in k + 1..rows {
            for j in k + 1..cols {
                if a[i][j] % a[k][k] != 0 {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            row_op(&mut a, &mut left, k, i, -1)?;
            continue;
        }
        k += 1;
    }

    for i in 0..n {
        if a[i][i] < 0 {
            for j in 0..cols {
                a[i][j] = -a[i][j];
            }
            for v in left[i].iter_mut() {
                *v = -*v;
            }
        }
    }

    let diag: Vec<i64> = (0..n)
        .map(|i| i64::try_from(a[i][i]).map_err(|_| AbelianError::Overflow))
        .collect::<Result<_, _>>()?;
    let conv = |m: Vec<Vec<i128>>| -> Result<Vec<Vec<i64>>, AbelianError> {
        m.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| i64::try_from(x).map_err(|_| AbelianError::Overflow))
                    .collect()
            })
            .collect()
    };
    Ok((diag, conv(left)?, conv(right)?))
}

fn ident(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn swap_rows(a: &mut [Vec<i128>], left: &mut [Vec<i128>], i: usize, j: usize) {
    if i != j {
        a.swap(i, j);
        left.swap(i, j);
    }
}

fn swap_cols(a: &mut [Vec<i128>], right: &mut [Vec<i128>], i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    for row in right.iter_mut() {
        row.swap(i, j);
    }
}

/// row i -= q * row k
fn row_op(
    a: &mut [Vec<i128>],
    left: &mut [Vec<i128>],
    i: usize,
    k: usize,
    q: i128,
) -> Result<(), AbelianError> {
    for j in 0..a[0].len() {
        a[i][j] = a[i][j]
            .checked_sub(q.checked_mul(a[k][j]).ok_or(AbelianError::Overflow)?)
            .ok_or(AbelianError::Overflow)?;
    }
    for j in 0..left[0].len() {
        left[i][j] = left[i][j]
            .checked_sub(q.checked_mul(left[k][j]).ok_or(AbelianError::Overflow)?)
            .ok_or(AbelianError::Overflow)?;
    }
    Ok(())
}

/// col j -= q * col k
fn col_op(
    a: &mut [Vec<i128>],
    right: &mut [Vec<i128>],
    j: usize,
    k: usize,
    q: i128,
) -> Result<(), AbelianError> {
    for row in a.iter_mut() {
        row[j] = row[j]
            .checked_sub(q.checked_mul(row[k]).ok_or(AbelianError::Overflow)?)
            .ok_or(AbelianError::Overflow)?;
    }
    for row in right.iter_mut() {
        row[j] = row[j]
            .checked_sub(q.checked_mul(row[k]).ok_or(AbelianError::Overflow)?)
            .ok_or(AbelianError::Overflow)?;
    }
    Ok(())
}

fn div_round(a: i128, b: i128) -> i128 {
    // Rounding to nearest keeps remainders at most |b|/2.
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + r.signum() * b.signum()
    } else {
        q
    }
}

/// The quotient `Z^n / rowspan(relations)` in canonical invariant-factor
/// form, together with the quotient homomorphism from `Z^n`.
pub fn group_from_relations(
    n_generators: usize,
    relations: &[Vec<i64>],
) -> Result<(FinAbGroup, GroupHom), AbelianError> {
    for r in relations {
        if r.len() != n_generators {
            return Err(AbelianError::ShapeMismatch(format!("Z^{n_generators}")));
        }
    }
    // Columns as relations: the quotient is coker of the transpose.
    let m = relations.len();
    let a: Vec<Vec<i64>> = (0..n_generators)
        .map(|i| (0..m).map(|j| relations[j][i]).collect())
        .collect();
    let (diag, left, _right) = smith_normal_form(&a)?;

    // In the coordinates y = left * x, coordinate i survives modulo diag[i]
    // (dropped when diag[i] == 1, free when 0 or beyond the diagonal).
    let mut torsion_rows: Vec<(u64, usize)> = Vec::new();
    let mut free_rows: Vec<usize> = Vec::new();
    for i in 0..n_generators {
        let d = if i < diag.len() { diag[i] } else { 0 };
        match d {
            0 => free_rows.push(i),
            1 => {}
            d => torsion_rows.push((d as u64, i)),
        }
    }
    torsion_rows.sort();
    let group = FinAbGroup::new(free_rows.len(), torsion_rows.iter().map(|&(d, _)| d).collect())?;
    let mut matrix = Vec::with_capacity(group.dim());
    for &i in &free_rows {
        matrix.push(left[i].clone());
    }
    for &(d, i) in &torsion_rows {
        matrix.push(left[i].iter().map(|&x| x.rem_euclid(d as i64)).collect());
    }
    let hom = GroupHom::new(FinAbGroup::free(n_generators), group.clone(), matrix)?;
    Ok((group, hom))
}

/// The quotient `H / <g>` with its quotient homomorphism.
pub fn quotient_by_element(
    group: &FinAbGroup,
    g: &GroupElem,
) -> Result<(FinAbGroup, GroupHom), AbelianError> {
    group.check(g)?;
    let n = group.dim();
    // Present H itself on n generators, then add g as one more relation.
    let mut relations: Vec<Vec<i64>> = Vec::new();
    for (j, &d) in group.torsion_divisors().iter().enumerate() {
        let mut row = vec![0i64; n];
        row[group.rank() + j] = d as i64;
        relations.push(row);
    }
    relations.push(group.coords(g));
    let (quot, from_zn) = group_from_relations(n, &relations)?;
    GroupHom::new(group.clone(), quot.clone(), from_zn.matrix().to_vec())
        .map(|hom| (quot, hom))
}

/// The projection `H -> Z^rank` killing torsion.
pub fn free_projection(group: &FinAbGroup) -> GroupHom {
    let r = group.rank();
    let matrix = (0..r)
        .map(|i| {
            (0..group.dim())
                .map(|j| i64::from(i == j))
                .collect::<Vec<_>>()
        })
        .collect();
    GroupHom::new(group.clone(), FinAbGroup::free(r), matrix)
        .expect("projection onto the free part is always well-defined")
}

/// The inclusion of the torsion subgroup `Tors(H) -> H`.
pub fn torsion_inclusion(group: &FinAbGroup) -> Result<GroupHom, AbelianError> {
    let tors = FinAbGroup::new(0, group.torsion_divisors().to_vec())?;
    let k = group.torsion_divisors().len();
    let matrix = (0..group.dim())
        .map(|i| {
            (0..k)
                .map(|j| i64::from(i == group.rank() + j))
                .collect::<Vec<_>>()
        })
        .collect();
    GroupHom::new(tors, group.clone(), matrix)
}

/// The projection `H -> Tors(H)` killing the free part.
pub fn torsion_projection(group: &FinAbGroup) -> Result<GroupHom, AbelianError> {
    let tors = FinAbGroup::new(0, group.torsion_divisors().to_vec())?;
    let k = group.torsion_divisors().len();
    let matrix = (0..k)
        .map(|i| {
            (0..group.dim())
                .map(|j| i64::from(j == group.rank() + i))
                .collect::<Vec<_>>()
        })
        .collect();
    GroupHom::new(group.clone(), tors, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf_diag(mat: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(mat).unwrap().0
    }

    /// Independent oracle: invariant factors via gcds of k x k minors.
    fn minor_gcd_factors(mat: &[Vec<i64>]) -> Vec<i64> {
        let rows = mat.len();
        let cols = if rows == 0 { 0 } else { mat[0].len() };
        let n = rows.min(cols);
        let mut prev: i128 = 1;
        let mut out = Vec::new();
        for k in 1..=n {
            let mut g: i128 = 0;
            for rs in combinations(rows, k) {
                for cs in combinations(cols, k) {
                    let sub: Vec<Vec<i128>> = rs
                        .iter()
                        .map(|&i| cs.iter().map(|&j| mat[i][j] as i128).collect())
                        .collect();
                    g = gcd(g, det(&sub));
                }
            }
            if g == 0 {
                break;
            }
            out.push((g / prev) as i64);
            prev = g;
        }
        while out.len() < n {
            out.push(0);
        }
        out
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, k, &mut Vec::new(), &mut out);
        out
    }

    fn det(m: &[Vec<i128>]) -> i128 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return m[0][0];
        }
        let mut acc = 0i128;
        for j in 0..n {
            if m[0][j] == 0 {
                continue;
            }
            let minor: Vec<Vec<i128>> = (1..n)
                .map(|i| (0..n).filter(|&c| c != j).map(|c| m[i][c]).collect())
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            acc += s * m[0][j] * det(&minor);
        }
        acc
    }

    fn gcd(a: i128, b: i128) -> i128 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }

    fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = a.len();
        let m = b[0].len();
        let k = b.len();
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn snf_examples() {
        assert_eq!(snf_diag(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(snf_diag(&[vec![0]]), vec![0]);
        assert_eq!(snf_diag(&[vec![1, 0], vec![0, 1]]), vec![1, 1]);
    }

    #[test]
    fn snf_matches_minor_gcd_oracle_and_transforms_are_unimodular() {
        let mut rng = crate::test_rng::Rng::new(0x5eed_0001);
        for _ in 0..200 {
            let rows = 1 + (rng.next() % 4) as usize;
            let cols = 1 + (rng.next() % 4) as usize;
            let mat: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| (rng.next() % 19) as i64 - 9).collect())
                .collect();
            let (diag, left, right) = smith_normal_form(&mat).unwrap();
            assert_eq!(diag, minor_gcd_factors(&mat), "matrix {mat:?}");
            let prod = mat_mul(&mat_mul(&left, &mat), &right);
            for (i, row) in prod.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    let want = if i == j && i < diag.len() { diag[i] } else { 0 };
                    assert_eq!(v, want);
                }
            }
            let li: Vec<Vec<i128>> = left
                .iter()
                .map(|r| r.iter().map(|&x| x as i128).collect())
                .collect();
            let ri: Vec<Vec<i128>> = right
                .iter()
                .map(|r| r.iter().map(|&x| x as i128).collect())
                .collect();
            assert_eq!(det(&li).abs(), 1);
            assert_eq!(det(&ri).abs(), 1);
            for w in diag.windows(2) {
                if w[0] != 0 && w[1] != 0 {
                    assert_eq!(w[1] % w[0], 0);
                }
            }
        }
    }

    #[test]
    fn group_from_relations_examples() {
        let (g, _) = group_from_relations(2, &[vec![0, 5]]).unwrap();
        assert_eq!(g, FinAbGroup::new(1, vec![5]).unwrap());

        let (g, _) = group_from_relations(1, &[]).unwrap();
        assert_eq!(g, FinAbGroup::free(1));

        let (g, _) = group_from_relations(2, &[vec![1, 1]]).unwrap();
        assert_eq!(g, FinAbGroup::free(1));
    }

    #[test]
    fn group_from_relations_row_operation_invariance() {
        let mut rng = crate::test_rng::Rng::new(0x5eed_0002);
        for _ in 0..100 {
            let n = 1 + (rng.next() % 3) as usize;
            let m = 1 + (rng.next() % 3) as usize;
            let mut rel: Vec<Vec<i64>> = (0..m)
                .map(|_| (0..n).map(|_| (rng.next() % 11) as i64 - 5).collect())
                .collect();
            let (g1, _) = group_from_relations(n, &rel).unwrap();
            for _ in 0..6 {
                let i = (rng.next() as usize) % m;
                let j = (rng.next() as usize) % m;
                if i != j {
                    let c = (rng.next() % 5) as i64 - 2;
                    for col in 0..n {
                        rel[i][col] += c * rel[j][col];
                    }
                }
            }
            let (g2, _) = group_from_relations(n, &rel).unwrap();
            assert_eq!(g1, g2);
        }
    }

    #[test]
    fn quotient_hom_kills_exactly_the_element() {
        let h = FinAbGroup::new(1, vec![5]).unwrap();
        let t = h.elem(vec![1], vec![0]).unwrap();
        let (q, hom) = quotient_by_element(&h, &t).unwrap();
        assert_eq!(q, FinAbGroup::cyclic(5).unwrap());
        assert!(hom.apply(&t).unwrap().is_identity());

        let (q, _) = quotient_by_element(&h, &h.identity()).unwrap();
        assert_eq!(q, h);

        let z = FinAbGroup::free(1);
        let one = z.elem(vec![1], vec![]).unwrap();
        let (q, _) = quotient_by_element(&z, &one).unwrap();
        assert!(q.is_trivial());
    }

    #[test]
    fn free_projection_examples() {
        let h = FinAbGroup::new(1, vec![5]).unwrap();
        let p = free_projection(&h);
        let g = h.elem(vec![3], vec![2]).unwrap();
        assert_eq!(p.apply(&g).unwrap().free_part(), &[3]);

        let z2 = FinAbGroup::free(2);
        assert_eq!(free_projection(&z2), GroupHom::identity(&z2));

        let z5 = FinAbGroup::cyclic(5).unwrap();
        assert!(free_projection(&z5).target().is_trivial());
    }

    #[test]
    fn free_projection_kills_torsion_inclusion() {
        let h = FinAbGroup::new(2, vec![3, 6]).unwrap();
        let inc = torsion_inclusion(&h).unwrap();
        let proj = free_projection(&h);
        let comp = proj.compose(&inc).unwrap();
        for row in comp.matrix() {
            assert!(row.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn hom_validity_checked_eagerly() {
        let z5 = FinAbGroup::cyclic(5).unwrap();
        let z = FinAbGroup::free(1);
        // Z/5 -> Z sending the generator to 1 is not well-defined.
        assert_eq!(
            GroupHom::new(z5.clone(), z, vec![vec![1]]).unwrap_err(),
            AbelianError::InvalidHom
        );
        // Z/5 -> Z/10 sending the generator to 2 is.
        let z10 = FinAbGroup::cyclic(10).unwrap();
        assert!(GroupHom::new(z5, z10, vec![vec![2]]).is_ok());
    }
}
