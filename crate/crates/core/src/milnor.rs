//! Milnor-frame data: construction of the bracket from cyclic structure
//! constants, normalization to constants in {0, 1}, and splitting into
//! Heisenberg, filiform and abelian summands.
//!
//! With the default cyclic permutation the bracket on the frame is
//! `[X_i, X_{i+1}] = λ_{i+2} X_{i+2}` (indices mod n), all other brackets
//! of frame vectors vanishing.

use num_traits::{One, Zero};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::Rational;

/// Structure constants `λ_1..λ_n` and an optional permutation `σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MilnorData {
    lambdas: Vec<Rational>,
    /// `sigma[i]` is the image of `i`; `None` means the cycle `i -> i + 1`.
    sigma: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SummandKind {
    H3,
    H4,
    Abelian,
}

impl SummandKind {
    pub fn name(self) -> &'static str {
        match self {
            SummandKind::H3 => "h3",
            SummandKind::H4 => "h4",
            SummandKind::Abelian => "abelian",
        }
    }

    /// Nilpotency step of the summand.
    pub fn step(self) -> usize {
        match self {
            SummandKind::H3 => 2,
            SummandKind::H4 => 3,
            SummandKind::Abelian => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub kind: SummandKind,
    /// Basis indices, in frame order for h3/h4 blocks and ascending for the
    /// abelian block.
    pub indices: Vec<usize>,
}

/// Splitting `g ≅ (⊕ h3) ⊕ (⊕ h4) ⊕ a` along blocks of the frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub summands: Vec<Summand>,
    /// All nonzero constants already equal 1.
    pub normalized: bool,
}

impl Decomposition {
    pub fn count(&self, kind: SummandKind) -> usize {
        self.summands.iter().filter(|s| s.kind == kind).count()
    }

    /// Maximum step over the summands (1 for abelian algebras).
    pub fn nilpotency_step(&self) -> usize {
        self.summands
            .iter()
            .map(|s| s.kind.step())
            .max()
            .unwrap_or(1)
    }

    pub fn abelian_indices(&self) -> Vec<usize> {
        self.summands
            .iter()
            .filter(|s| s.kind == SummandKind::Abelian)
            .flat_map(|s| s.indices.iter().copied())
            .collect()
    }

    pub fn nonabelian(&self) -> impl Iterator<Item = &Summand> {
        self.summands
            .iter()
            .filter(|s| s.kind != SummandKind::Abelian)
    }
}

/// Disjoint-cycle splitting of a general permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSplit {
    /// Cycles of length >= 3, each starting at its smallest element.
    pub cycles: Vec<Vec<usize>>,
    /// Fixed points, ascending.
    pub fixed: Vec<usize>,
}

impl CycleSplit {
    /// Cyclic Milnor data carried by each cycle.
    pub fn cycle_data(&self, d: &MilnorData) -> Vec<MilnorData> {
        self.cycles
            .iter()
            .map(|c| MilnorData {
                lambdas: c.iter().map(|&i| d.lambdas[i].clone()).collect(),
                sigma: None,
            })
            .collect()
    }
}

impl MilnorData {
    /// Cyclic data; `n = lambdas.len() >= 3`.
    pub fn cyclic(lambdas: Vec<Rational>) -> Result<Self> {
        if lambdas.len() < 3 {
            return Err(Error::DimensionTooSmall {
                required: 3,
                found: lambdas.len(),
            });
        }
        Ok(Self {
            lambdas,
            sigma: None,
        })
    }

    /// Data with an explicit permutation (0-based image list).
    pub fn with_sigma(lambdas: Vec<Rational>, sigma: Vec<usize>) -> Result<Self> {
        let n = lambdas.len();
        let mut d = Self::cyclic(lambdas)?;
        if sigma.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: sigma.len(),
            });
        }
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || seen[s] {
                return Err(Error::InvalidPermutation(n));
            }
            seen[s] = true;
        }
        d.sigma = Some(sigma);
        Ok(d)
    }

    pub fn from_i64(lambdas: &[i64]) -> Result<Self> {
        Self::cyclic(lambdas.iter().map(|&l| crate::scalar::int(l)).collect())
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[Rational] {
        &self.lambdas
    }

    pub fn sigma(&self) -> Option<&[usize]> {
        self.sigma.as_deref()
    }

    /// `σ(i)`.
    pub fn apply_sigma(&self, i: usize) -> usize {
        match &self.sigma {
            Some(s) => s[i],
            None => (i + 1) % self.n(),
        }
    }

    /// True when the permutation is (or defaults to) `i -> i + 1`.
    pub fn is_default_cycle(&self) -> bool {
        (0..self.n()).all(|i| self.apply_sigma(i) == (i + 1) % self.n())
    }

    fn lambda(&self, i: isize) -> &Rational {
        &self.lambdas[i.rem_euclid(self.n() as isize) as usize]
    }

    fn require_default(&self) -> Result<()> {
        if self.is_default_cycle() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "operation requires the default cyclic permutation".into(),
            ))
        }
    }

    /// Every nonzero constant equals 1.
    pub fn is_normalized(&self) -> bool {
        self.lambdas.iter().all(|l| l.is_zero() || l.is_one())
    }
}

/// Algebra with `c^{i+2}_{i,i+1} = λ_{i+2}` (indices mod n). No Jacobi check
/// is made; see [`LieAlgebra::jacobi_defect`].
pub fn build_cyclic(d: &MilnorData) -> Result<LieAlgebra> {
    d.require_default()?;
    build_on_cycles(d.n(), &[(0..d.n()).collect()], d)
}

/// Brackets `[X_c, X_{σ(c)}] = λ_{σ²(c)} X_{σ²(c)}` for each listed cycle.
fn build_on_cycles(n: usize, cycles: &[Vec<usize>], d: &MilnorData) -> Result<LieAlgebra> {
    if n < 3 {
        return Err(Error::DimensionTooSmall {
            required: 3,
            found: n,
        });
    }
    let mut entries = Vec::new();
    for cycle in cycles {
        let m = cycle.len();
        for p in 0..m {
            let (a, b, c) = (cycle[p], cycle[(p + 1) % m], cycle[(p + 2) % m]);
            let l = d.lambdas[c].clone();
            if l.is_zero() {
                continue;
            }
            if a < b {
                entries.push(((a, b, c), l));
            } else {
                entries.push(((b, a, c), -l));
            }
        }
    }
    LieAlgebra::from_structure_constants(n, entries)
}

/// Indices `i` (0-based) where `λ_i λ_{i+2} ≠ 0`, indices mod n.
pub fn adjacent_product_check(d: &MilnorData) -> Result<Vec<usize>> {
    d.require_default()?;
    if d.n() < 4 {
        return Err(Error::DimensionTooSmall {
            required: 4,
            found: d.n(),
        });
    }
    Ok((0..d.n())
        .filter(|&i| !(d.lambda(i as isize) * d.lambda(i as isize + 2)).is_zero())
        .collect())
}

/// Splits a general permutation into its cycles and builds the direct-sum
/// algebra. Fixed points span the abelian part; 2-cycles are rejected.
pub fn build_general(d: &MilnorData) -> Result<(LieAlgebra, CycleSplit)> {
    let n = d.n();
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    let mut fixed = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut cycle = vec![start];
        visited[start] = true;
        let mut cur = d.apply_sigma(start);
        while cur != start {
            visited[cur] = true;
            cycle.push(cur);
            cur = d.apply_sigma(cur);
        }
        match cycle.len() {
            1 => fixed.push(start),
            2 => return Err(Error::TwoCycle(cycle[0] + 1, cycle[1] + 1)),
            _ => cycles.push(cycle),
        }
    }
    let alg = build_on_cycles(n, &cycles, d)?;
    Ok((alg, CycleSplit { cycles, fixed }))
}

/// Relabels `X_i -> X_{i+ℓ}`, so `λ'_i = λ_{i-ℓ}`.
pub fn shift(d: &MilnorData, ell: isize) -> Result<MilnorData> {
    d.require_default()?;
    let n = d.n() as isize;
    MilnorData::cyclic((0..n).map(|i| d.lambda(i - ell).clone()).collect())
}

/// Splits cyclic Milnor data into h3, h4 and abelian blocks.
///
/// Blocks are found from the λ-pattern: every maximal run of nonzero
/// constants starting at `k` (`λ_k ≠ 0`, `λ_{k-1} = 0`) has length one or
/// two; length one gives the h3 block `{k-2, k-1, k}`, length two the h4
/// block `{k-2, k-1, k, k+1}`. Runs are taken in ascending order of `k`.
/// Every block is checked to be an ideal before returning.
pub fn decompose(d: &MilnorData) -> Result<Decomposition> {
    d.require_default()?;
    let n = d.n();
    let nonzero: Vec<usize> = (0..n).filter(|&i| !d.lambdas[i].is_zero()).collect();
    if n == 3 {
        let summands = match nonzero.as_slice() {
            [] => vec![Summand {
                kind: SummandKind::Abelian,
                indices: vec![0, 1, 2],
            }],
            [k] => vec![Summand {
                kind: SummandKind::H3,
                indices: vec![(k + 1) % 3, (k + 2) % 3, *k],
            }],
            _ => return Err(Error::ThreeDimensionalGeneralCase),
        };
        return Ok(Decomposition {
            summands,
            normalized: d.is_normalized(),
        });
    }

    let violations = adjacent_product_check(d)?;
    if !violations.is_empty() {
        return Err(Error::MilnorConditionViolated(
            violations.iter().map(|i| i + 1).collect(),
        ));
    }
    let alg = build_cyclic(d)?;
    alg.require_lie()?;

    let is_nz = |i: isize| !d.lambda(i).is_zero();
    let modn = |i: isize| i.rem_euclid(n as isize) as usize;
    let mut summands = Vec::new();
    let mut used = vec![false; n];
    for k in 0..n as isize {
        if !is_nz(k) || is_nz(k - 1) {
            continue;
        }
        let (kind, range) = if is_nz(k + 1) {
            (SummandKind::H4, k - 2..=k + 1)
        } else {
            (SummandKind::H3, k - 2..=k)
        };
        let indices: Vec<usize> = range.map(modn).collect();
        for &i in &indices {
            if used[i] {
                return Err(Error::WrongShape(format!(
                    "overlapping blocks at basis index {}",
                    i + 1
                )));
            }
            used[i] = true;
        }
        summands.push(Summand { kind, indices });
    }
    // the pairwise-product condition forbids a run covering every index
    if !nonzero.is_empty() && summands.is_empty() {
        return Err(Error::WrongShape(
            "no run of nonzero constants has a start".into(),
        ));
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
    if !rest.is_empty() {
        summands.push(Summand {
            kind: SummandKind::Abelian,
            indices: rest,
        });
    }

    for s in &summands {
        let sub = Subspace::coordinate(n, &s.indices)?;
        if !alg.is_ideal(&sub)? {
            return Err(Error::WrongShape(format!(
                "block {:?} is not an ideal",
                s.indices.iter().map(|i| i + 1).collect::<Vec<_>>()
            )));
        }
    }
    Ok(Decomposition {
        summands,
        normalized: d.is_normalized(),
    })
}

/// Decomposition for a general permutation: each cycle is split with
/// [`decompose`] and fixed points join the abelian block.
pub fn decompose_general(d: &MilnorData) -> Result<Decomposition> {
    if d.is_default_cycle() {
        return decompose(d);
    }
    let (alg, split) = build_general(d)?;
    alg.require_lie()?;
    let mut summands = Vec::new();
    let mut abelian = split.fixed.clone();
    for (cycle, data) in split.cycles.iter().zip(split.cycle_data(d)) {
        for s in decompose(&data)?.summands {
            let mapped: Vec<usize> = s.indices.iter().map(|&i| cycle[i]).collect();
            match s.kind {
                SummandKind::Abelian => abelian.extend(mapped),
                _ => summands.push(Summand {
                    kind: s.kind,
                    indices: mapped,
                }),
            }
        }
    }
    abelian.sort_unstable();
    if !abelian.is_empty() {
        summands.push(Summand {
            kind: SummandKind::Abelian,
            indices: abelian,
        });
    }
    Ok(Decomposition {
        summands,
        normalized: d.is_normalized(),
    })
}

/// Rescales the frame so every nonzero constant becomes 1.
///
/// Returns the normalized data and the diagonal basis change `T` (new frame
/// vector `Y_i = T_ii X_i`) with
/// `change_of_basis(build_cyclic(d), T) == build_cyclic(normalized)`.
/// In an h3 block `{i, i+1, i+2}` the last vector is scaled by `λ_{i+2}`;
/// in an h4 block `{i..i+3}` the third by `λ_{i+2}` and the fourth by
/// `λ_{i+2} λ_{i+3}`.
pub fn normalize(d: &MilnorData) -> Result<(MilnorData, Matrix)> {
    let dec = decompose(d)?;
    let n = d.n();
    let mut scale = vec![Rational::one(); n];
    for s in &dec.summands {
        match s.kind {
            SummandKind::H3 => {
                scale[s.indices[2]] = d.lambdas[s.indices[2]].clone();
            }
            SummandKind::H4 => {
                let (a, b) = (s.indices[2], s.indices[3]);
                scale[a] = d.lambdas[a].clone();
                scale[b] = &d.lambdas[a] * &d.lambdas[b];
            }
            SummandKind::Abelian => {}
        }
    }
    let normalized = MilnorData::cyclic(
        d.lambdas
            .iter()
            .map(|l| {
                if l.is_zero() {
                    Rational::zero()
                } else {
                    Rational::one()
                }
            })
            .collect(),
    )?;
    Ok((normalized, Matrix::diagonal(&scale)))
}
