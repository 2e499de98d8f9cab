//! Handle expressions and the move set acting on them.
//!
//! A [`HandleExpression`] is a 0-handle with labelled 1-handles, labelled
//! 2-handles and sealed [`OpaquePiece`]s. Each 2-handle records how many
//! times it runs over every 1-handle (its winding vector, i.e. its linking
//! with the dotted circles). The symmetric form holds framings on the
//! diagonal and pairwise linkings off it; after a rational blow-down its
//! entries may be rational.
//!
//! Homology is read off the winding matrix `W` (one column per 2-handle):
//! `H_2` is the integer kernel of `W`, `H_1` its cokernel, and the
//! intersection form is the form restricted to a Z-basis of the kernel.
//!
//! Moves are checked at the lattice level only. Nothing here verifies that a
//! move is realised by an isotopy of an actual link diagram.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{IntegerMatrix, LatticeError, SymmetricForm};
use crate::numbers::{cn_fraction, format_rational, lens_normalize, rat, ratio, LensSpace, Rational};
use crate::plumbing::{boundary_lens, linking_matrix, PlumbingGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HandleError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown piece `{0}`")]
    UnknownPiece(String),
    #[error("label `{0}` is already in use")]
    LabelInUse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not a cancelling pair: {0}")]
    NotCancelling(String),
    #[error("cannot blow down `{0}`: {1}")]
    NotBlowdownable(String, String),
    #[error("chain does not carry the C_n form: {0}")]
    ChainMismatch(String),
    #[error("chain handle `{0}` runs over a 1-handle")]
    WindingObstruction(String),
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoHandle {
    pub label: String,
    pub winding: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PieceKind {
    /// The rational homology ball `B_n`.
    RationalBall { n: i64 },
    /// A summand whose invariants are supplied from outside (e.g. `E(m)`).
    Ambient,
}

/// A sealed summand. Pieces combine with the handles by boundary connected
/// sum unless `glued` is set, which means the piece is attached along its
/// boundary to the handles (as after a rational blow-down) and integral
/// `H_1` is no longer determined by the data here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpaquePiece {
    pub name: String,
    pub kind: PieceKind,
    pub b1: i64,
    pub b2: i64,
    pub euler: i64,
    pub sigma: i64,
    pub h1_torsion: Vec<u64>,
    pub boundary: Option<LensSpace>,
    pub spin: Option<bool>,
    pub glued: bool,
}

impl OpaquePiece {
    pub fn rational_ball(name: &str, n: i64, glued: bool) -> Result<Self, HandleError> {
        if n < 2 {
            return Err(HandleError::InvalidParameter(format!("B_n needs n >= 2, got {n}")));
        }
        Ok(OpaquePiece {
            name: name.to_string(),
            kind: PieceKind::RationalBall { n },
            b1: 0,
            b2: 0,
            euler: 1,
            sigma: 0,
            h1_torsion: vec![n as u64],
            boundary: Some(lens_normalize(n * n, n - 1).expect("gcd(n^2, n-1) = 1")),
            spin: Some(is_spin_bn(n)?),
            glued,
        })
    }

    /// The elliptic surface `E(m)` as external data: `b2 = 12m - 2`,
    /// `sigma = -8m`, `euler = 12m`. These numbers are not derived here.
    pub fn elliptic(m: i64) -> Result<Self, HandleError> {
        if m < 1 {
            return Err(HandleError::InvalidParameter(format!("E(m) needs m >= 1, got {m}")));
        }
        Ok(OpaquePiece {
            name: format!("E({m})"),
            kind: PieceKind::Ambient,
            b1: 0,
            b2: 12 * m - 2,
            euler: 12 * m,
            sigma: -8 * m,
            h1_torsion: Vec::new(),
            boundary: None,
            spin: Some(m % 2 == 0),
            glued: false,
        })
    }

    /// Name-independent description used when comparing piece multisets.
    pub fn descriptor(&self) -> String {
        match self.kind {
            PieceKind::RationalBall { n } => format!("B_{n}"),
            PieceKind::Ambient => self.name.clone(),
        }
    }

    pub fn rational_ball_n(&self) -> Option<i64> {
        match self.kind {
            PieceKind::RationalBall { n } => Some(n),
            PieceKind::Ambient => None,
        }
    }
}

pub fn is_spin_bn(n: i64) -> Result<bool, HandleError> {
    if n < 2 {
        return Err(HandleError::InvalidParameter(format!("B_n needs n >= 2, got {n}")));
    }
    Ok(n % 2 == 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Torsion {
    Known(Vec<u64>),
    Indeterminate,
}

impl fmt::Display for Torsion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Torsion::Known(t) => {
                let parts: Vec<String> = t.iter().map(u64::to_string).collect();
                write!(f, "[{}]", parts.join(","))
            }
            Torsion::Indeterminate => write!(f, "?"),
        }
    }
}

impl Serialize for Torsion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Torsion::Known(t) => t.serialize(serializer),
            Torsion::Indeterminate => serializer.serialize_str("indeterminate"),
        }
    }
}

/// The per-state invariant tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub b1: i64,
    pub b2: i64,
    pub euler: i64,
    pub sigma: i64,
    /// Determinant of the intersection form in the lattice basis in use.
    pub det: Rational,
    pub torsion: Torsion,
    pub boundary: Option<LensSpace>,
}

impl Invariants {
    /// `(b1, b2, torsion, euler, sigma, boundary)`: the tuple that handle
    /// slides and cancelling pairs must leave untouched.
    pub fn move_tuple(&self) -> (i64, i64, &Torsion, i64, i64, Option<LensSpace>) {
        (self.b1, self.b2, &self.torsion, self.euler, self.sigma, self.boundary)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandleExpression {
    one_handles: Vec<String>,
    two_handles: Vec<TwoHandle>,
    form: SymmetricForm,
    pieces: Vec<OpaquePiece>,
    boundary: Option<LensSpace>,
    used: BTreeSet<String>,
    next_fresh: usize,
}

impl Default for HandleExpression {
    fn default() -> Self {
        Self::empty()
    }
}

impl HandleExpression {
    /// The 4-ball.
    pub fn empty() -> Self {
        HandleExpression {
            one_handles: Vec::new(),
            two_handles: Vec::new(),
            form: SymmetricForm::empty(),
            pieces: Vec::new(),
            boundary: Some(LensSpace::sphere()),
            used: BTreeSet::new(),
            next_fresh: 1,
        }
    }

    /// Assembles an expression from raw data. Labels must be distinct across
    /// 1-handles, 2-handles and pieces; the form is indexed like `two_handles`.
    pub fn from_parts(
        one_handles: Vec<String>,
        two_handles: Vec<TwoHandle>,
        form: SymmetricForm,
        pieces: Vec<OpaquePiece>,
        boundary: Option<LensSpace>,
    ) -> Result<Self, HandleError> {
        if form.labels().len() != two_handles.len()
            || form.labels().iter().zip(&two_handles).any(|(l, h)| *l != h.label)
        {
            return Err(HandleError::InvalidParameter("form labels must match the 2-handles in order".into()));
        }
        if let Some(h) = two_handles.iter().find(|h| h.winding.len() != one_handles.len()) {
            return Err(HandleError::InvalidParameter(format!(
                "`{}` has {} winding entries for {} 1-handles",
                h.label,
                h.winding.len(),
                one_handles.len()
            )));
        }
        let mut used = BTreeSet::new();
        let names =
            one_handles.iter().chain(two_handles.iter().map(|h| &h.label)).chain(pieces.iter().map(|p| &p.name));
        for name in names {
            if !used.insert(name.clone()) {
                return Err(HandleError::LabelInUse(name.clone()));
            }
        }
        Ok(HandleExpression { one_handles, two_handles, form, pieces, boundary, used, next_fresh: 1 })
    }

    pub fn one_handles(&self) -> &[String] {
        &self.one_handles
    }

    pub fn two_handles(&self) -> &[TwoHandle] {
        &self.two_handles
    }

    pub fn two_handle_labels(&self) -> Vec<String> {
        self.two_handles.iter().map(|h| h.label.clone()).collect()
    }

    pub fn form(&self) -> &SymmetricForm {
        &self.form
    }

    pub fn pieces(&self) -> &[OpaquePiece] {
        &self.pieces
    }

    pub fn piece(&self, name: &str) -> Option<&OpaquePiece> {
        self.pieces.iter().find(|p| p.name == name)
    }

    pub fn boundary_claim(&self) -> Option<LensSpace> {
        self.boundary
    }

    pub fn with_boundary_claim(mut self, boundary: Option<LensSpace>) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_piece(mut self, piece: OpaquePiece) -> Result<Self, HandleError> {
        self.claim(Some(&piece.name.clone()), "P")?;
        if piece.boundary.is_none() && !piece.glued {
            // Boundary sum with a piece of unknown boundary.
            self.boundary = None;
        }
        self.pieces.push(piece);
        Ok(self)
    }

    pub fn framing(&self, label: &str) -> Option<&Rational> {
        self.form.index_of(label).map(|i| self.form.entry(i, i))
    }

    pub fn linking(&self, a: &str, b: &str) -> Option<&Rational> {
        Some(self.form.entry(self.form.index_of(a)?, self.form.index_of(b)?))
    }

    pub fn winding(&self, label: &str) -> Option<&[i64]> {
        self.two_handles.iter().find(|h| h.label == label).map(|h| h.winding.as_slice())
    }

    pub fn label_available(&self, label: &str) -> bool {
        !self.used.contains(label)
    }

    fn claim(&mut self, requested: Option<&str>, prefix: &str) -> Result<String, HandleError> {
        let label = match requested {
            Some(l) => {
                if l.is_empty() {
                    return Err(HandleError::InvalidParameter("empty label".into()));
                }
                if self.used.contains(l) {
                    return Err(HandleError::LabelInUse(l.to_string()));
                }
                l.to_string()
            }
            None => loop {
                let l = format!("{prefix}{}", self.next_fresh);
                self.next_fresh += 1;
                if !self.used.contains(&l) {
                    break l;
                }
            },
        };
        self.used.insert(label.clone());
        Ok(label)
    }

    fn two_index(&self, label: &str) -> Result<usize, HandleError> {
        self.two_handles
            .iter()
            .position(|h| h.label == label)
            .ok_or_else(|| HandleError::UnknownLabel(label.to_string()))
    }

    fn one_index(&self, label: &str) -> Result<usize, HandleError> {
        self.one_handles.iter().position(|h| h == label).ok_or_else(|| HandleError::UnknownLabel(label.to_string()))
    }

    fn piece_index(&self, name: &str) -> Result<usize, HandleError> {
        self.pieces.iter().position(|p| p.name == name).ok_or_else(|| HandleError::UnknownPiece(name.to_string()))
    }

    pub fn winding_matrix(&self) -> IntegerMatrix {
        let rows: Vec<Vec<BigInt>> = (0..self.one_handles.len())
            .map(|i| self.two_handles.iter().map(|h| BigInt::from(h.winding[i])).collect())
            .collect();
        IntegerMatrix::new(self.one_handles.len(), self.two_handles.len(), rows).expect("winding dimensions")
    }

    /// Intersection form on a Z-basis of `H_2` of the handle part.
    pub fn intersection_form(&self) -> SymmetricForm {
        let (_, kernel) = self.winding_matrix().kernel_basis();
        if self.one_handles.is_empty() {
            return self.form.clone();
        }
        let labels = (1..=kernel.len()).map(|i| format!("h{i}")).collect();
        self.form.gram(&kernel, labels).expect("kernel vectors match form dimension")
    }

    /// `(b1, b2 over Q, H_1 torsion)`.
    pub fn homology(&self) -> (i64, i64, Torsion) {
        let w = self.winding_matrix();
        let rank = w.rank() as i64;
        let k = self.one_handles.len() as i64;
        let m = self.two_handles.len() as i64;
        let b1 = k - rank + self.pieces.iter().map(|p| p.b1).sum::<i64>();
        let b2 = m - rank + self.pieces.iter().map(|p| p.b2).sum::<i64>();
        let torsion = if self.pieces.iter().any(|p| p.glued) {
            Torsion::Indeterminate
        } else {
            let mut t: Vec<u64> = w
                .smith_normal_form()
                .iter()
                .filter(|d| **d > BigInt::one())
                .map(|d| d.to_u64().expect("torsion fits in u64"))
                .collect();
            t.extend(self.pieces.iter().flat_map(|p| p.h1_torsion.iter().copied()));
            t.sort_unstable();
            Torsion::Known(t)
        };
        (b1, b2, torsion)
    }

    /// `(euler characteristic, signature)`.
    pub fn euler_sigma(&self) -> (i64, i64) {
        let euler = 1 - self.one_handles.len() as i64
            + self.two_handles.len() as i64
            + self.pieces.iter().map(|p| p.euler - 1).sum::<i64>();
        let sigma = self.intersection_form().signature() + self.pieces.iter().map(|p| p.sigma).sum::<i64>();
        (euler, sigma)
    }

    pub fn invariants(&self) -> Invariants {
        let (b1, b2, torsion) = self.homology();
        let q = self.intersection_form();
        let euler = 1 - self.one_handles.len() as i64
            + self.two_handles.len() as i64
            + self.pieces.iter().map(|p| p.euler - 1).sum::<i64>();
        Invariants {
            b1,
            b2,
            euler,
            sigma: q.signature() + self.pieces.iter().map(|p| p.sigma).sum::<i64>(),
            det: q.determinant(),
            torsion,
            boundary: self.boundary,
        }
    }

    /// Sorted piece descriptors.
    pub fn piece_multiset(&self) -> Vec<String> {
        let mut d: Vec<String> = self.pieces.iter().map(OpaquePiece::descriptor).collect();
        d.sort();
        d
    }

    /// The plumbing graph this expression is, when it is one: no 1-handles,
    /// no pieces, integral form with off-diagonal entries in {0, 1}.
    pub fn as_plumbing(&self) -> Option<PlumbingGraph> {
        if !self.one_handles.is_empty() || !self.pieces.is_empty() || !self.form.is_integral() {
            return None;
        }
        let labels = self.form.labels();
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for i in 0..labels.len() {
            vertices.push(Vertex { id: labels[i].clone(), framing: self.form.entry(i, i).to_integer().to_i64()? });
            for j in i + 1..labels.len() {
                let x = self.form.entry(i, j);
                if x.is_one() {
                    edges.push((labels[i].clone(), labels[j].clone()));
                } else if !x.is_zero() {
                    return None;
                }
            }
        }
        PlumbingGraph::from_parts(vertices, &edges).ok()
    }

    /// Ordered label sequences on winding-free 2-handles whose form is
    /// exactly the `C_n` matrix.
    pub fn find_cn_chains(&self, n: i64) -> Vec<Vec<String>> {
        if n < 2 {
            return Vec::new();
        }
        let free: Vec<usize> =
            (0..self.two_handles.len()).filter(|&i| self.two_handles[i].winding.iter().all(|&w| w == 0)).collect();
        let len = (n - 1) as usize;
        let mut found = Vec::new();
        for &head in &free {
            if *self.form.entry(head, head) != rat(-n - 2) {
                continue;
            }
            let mut path = vec![head];
            self.extend_cn(&free, len, &mut path, &mut found);
        }
        found.into_iter().map(|p| p.into_iter().map(|i| self.two_handles[i].label.clone()).collect()).collect()
    }

    fn extend_cn(&self, free: &[usize], len: usize, path: &mut Vec<usize>, found: &mut Vec<Vec<usize>>) {
        if path.len() == len {
            found.push(path.clone());
            return;
        }
        let last = *path.last().expect("nonempty");
        for &next in free {
            if path.contains(&next) || *self.form.entry(next, next) != rat(-2) || !self.form.entry(last, next).is_one()
            {
                continue;
            }
            if path[..path.len() - 1].iter().any(|&p| !self.form.entry(p, next).is_zero()) {
                continue;
            }
            path.push(next);
            self.extend_cn(free, len, path, found);
            path.pop();
        }
    }

    // ----------------------------------------------------------------- moves

    /// Adds a 1-handle and a 0-framed 2-handle running over it once. The new
    /// 2-handle may be given linkings with existing 2-handles; these do not
    /// enter `H_2` because the new handle is never in the winding kernel.
    pub fn add_cancelling_pair(
        &self,
        one: Option<&str>,
        two: Option<&str>,
        links: &[(String, i64)],
    ) -> Result<HandleExpression, HandleError> {
        let mut out = self.clone();
        let one = out.claim(one, "x")?;
        let two = out.claim(two, "z")?;
        let mut couplings = vec![Rational::zero(); out.form.dim()];
        for (label, value) in links {
            let idx = self.two_index(label)?;
            couplings[idx] = rat(*value);
        }
        for h in out.two_handles.iter_mut() {
            h.winding.push(0);
        }
        out.one_handles.push(one);
        let mut winding = vec![0; out.one_handles.len()];
        *winding.last_mut().expect("nonempty") = 1;
        out.form = out.form.extended(&two, &couplings, Rational::zero())?;
        out.two_handles.push(TwoHandle { label: two, winding });
        Ok(out)
    }

    /// Removes a 1-handle together with a 2-handle that runs over it exactly
    /// once and over no other 1-handle. No other 2-handle may run over the
    /// 1-handle. Linkings of the removed 2-handle with the rest are dropped;
    /// they are not part of `H_2`.
    pub fn remove_cancelling_pair(&self, one: &str, two: &str) -> Result<HandleExpression, HandleError> {
        let oi = self.one_index(one)?;
        let ti = self.two_index(two)?;
        let w = &self.two_handles[ti].winding;
        if w[oi].abs() != 1 {
            return Err(HandleError::NotCancelling(format!("`{two}` runs {} times over `{one}`", w[oi])));
        }
        if let Some((j, _)) = w.iter().enumerate().find(|&(j, &x)| j != oi && x != 0) {
            return Err(HandleError::NotCancelling(format!("`{two}` also runs over `{}`", self.one_handles[j])));
        }
        if let Some(other) = self.two_handles.iter().find(|h| h.label != two && h.winding[oi] != 0) {
            return Err(HandleError::NotCancelling(format!(
                "`{}` also runs over `{one}`; slide it off first",
                other.label
            )));
        }
        let mut out = self.clone();
        out.form = out.form.without(&[ti]);
        out.two_handles.remove(ti);
        out.one_handles.remove(oi);
        for h in out.two_handles.iter_mut() {
            h.winding.remove(oi);
        }
        Ok(out)
    }

    /// Slides 2-handle `i` over 2-handle `j`: `i <- i + sign * j`.
    pub fn slide(&self, i: &str, j: &str, sign: i64) -> Result<HandleExpression, HandleError> {
        let ii = self.two_index(i)?;
        let jj = self.two_index(j)?;
        let form = self.form.congruence_slide(ii, jj, sign)?;
        let mut out = self.clone();
        let wj = self.two_handles[jj].winding.clone();
        for (x, y) in out.two_handles[ii].winding.iter_mut().zip(wj) {
            *x += sign * y;
        }
        out.form = form;
        Ok(out)
    }

    /// Connected sum with a reversed CP^2: a new unlinked `-1` handle.
    pub fn blow_up(&self, label: Option<&str>) -> Result<HandleExpression, HandleError> {
        self.blow_up_at(&[], label)
    }

    /// Blows up a point of multiplicity `mult` on handle `v`: framing drops
    /// by `mult^2` and the new `-1` handle links `v` `mult` times.
    pub fn blow_up_vertex(&self, v: &str, mult: i64, label: Option<&str>) -> Result<HandleExpression, HandleError> {
        if mult < 1 {
            return Err(HandleError::InvalidParameter(format!("multiplicity must be positive, got {mult}")));
        }
        self.blow_up_at(&[(v.to_string(), mult)], label)
    }

    /// Blows up an intersection point of `a` and `b`.
    pub fn blow_up_edge(&self, a: &str, b: &str, label: Option<&str>) -> Result<HandleExpression, HandleError> {
        let ai = self.two_index(a)?;
        let bi = self.two_index(b)?;
        if ai == bi {
            return Err(HandleError::InvalidParameter(format!("edge blow-up needs two handles, got `{a}` twice")));
        }
        let link = self.form.entry(ai, bi);
        if !link.is_integer() || *link < Rational::one() {
            return Err(HandleError::InvalidParameter(format!(
                "`{a}` and `{b}` have linking {}; no positive intersection point to blow up",
                format_rational(link)
            )));
        }
        self.blow_up_at(&[(a.to_string(), 1), (b.to_string(), 1)], label)
    }

    fn blow_up_at(&self, points: &[(String, i64)], label: Option<&str>) -> Result<HandleExpression, HandleError> {
        let idx: Vec<(usize, i64)> =
            points.iter().map(|(l, m)| Ok((self.two_index(l)?, *m))).collect::<Result<_, HandleError>>()?;
        let mut out = self.clone();
        let label = out.claim(label, "e")?;
        for (a, &(ia, ma)) in idx.iter().enumerate() {
            for &(ib, mb) in &idx[a..] {
                let value = out.form.entry(ia, ib) - rat(ma * mb);
                out.form.set_symmetric(ia, ib, value);
            }
        }
        let mut couplings = vec![Rational::zero(); out.form.dim()];
        for &(i, m) in &idx {
            couplings[i] = rat(m);
        }
        out.form = out.form.extended(&label, &couplings, rat(-1))?;
        out.two_handles.push(TwoHandle { label, winding: vec![0; out.one_handles.len()] });
        Ok(out)
    }

    /// Blows down a winding-free `-1` handle; the rest of the form becomes
    /// the Schur complement, so arbitrary linkings are allowed.
    pub fn blow_down(&self, label: &str) -> Result<HandleExpression, HandleError> {
        let i = self.two_index(label)?;
        if self.two_handles[i].winding.iter().any(|&w| w != 0) {
            return Err(HandleError::NotBlowdownable(label.to_string(), "it runs over a 1-handle".into()));
        }
        if *self.form.entry(i, i) != rat(-1) {
            return Err(HandleError::NotBlowdownable(
                label.to_string(),
                format!("framing is {}, not -1", format_rational(self.form.entry(i, i))),
            ));
        }
        let mut out = self.clone();
        out.form = self.form.schur_complement(&[i])?;
        out.two_handles.remove(i);
        Ok(out)
    }

    /// Replaces the `C_n` chain `chain` (in order) by a sealed `B_n`.
    pub fn rational_blow_down(
        &self,
        chain: &[String],
        n: i64,
        name: Option<&str>,
    ) -> Result<HandleExpression, HandleError> {
        let expected = cn_fraction(n).map_err(|e| HandleError::InvalidParameter(e.to_string()))?;
        if chain.len() as i64 != n - 1 {
            return Err(HandleError::ChainMismatch(format!("C_{n} has {} spheres, got {} labels", n - 1, chain.len())));
        }
        let idx: Vec<usize> = chain.iter().map(|l| self.two_index(l)).collect::<Result<_, _>>()?;
        if idx.iter().collect::<BTreeSet<_>>().len() != idx.len() {
            return Err(HandleError::ChainMismatch("repeated label in chain".into()));
        }
        for &i in &idx {
            if self.two_handles[i].winding.iter().any(|&w| w != 0) {
                return Err(HandleError::WindingObstruction(self.two_handles[i].label.clone()));
            }
        }
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                let want = if a == b {
                    expected.0[a]
                } else if a.abs_diff(b) == 1 {
                    1
                } else {
                    0
                };
                if *self.form.entry(ia, ib) != rat(want) {
                    return Err(HandleError::ChainMismatch(format!(
                        "entry ({}, {}) is {}, expected {want}",
                        chain[a],
                        chain[b],
                        format_rational(self.form.entry(ia, ib))
                    )));
                }
            }
        }
        let coupled = (0..self.form.dim())
            .filter(|r| !idx.contains(r))
            .any(|r| idx.iter().any(|&c| !self.form.entry(r, c).is_zero()));
        let mut out = self.clone();
        let default = format!("B{n}");
        let name = match name {
            Some(name) => out.claim(Some(name), "P")?,
            None if out.label_available(&default) => out.claim(Some(&default), "P")?,
            None => out.claim(None, &format!("B{n}_")).expect("generated label"),
        };
        out.form = self.form.schur_complement(&idx)?;
        out.two_handles =
            self.two_handles.iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, h)| h.clone()).collect();
        out.pieces.push(OpaquePiece::rational_ball(&name, n, coupled)?);
        Ok(out)
    }

    /// Replaces the sealed `B_n` piece `piece` by a `C_n` chain appended at
    /// the end. `couplings` lists `(handle, chain position (1-based), value)`;
    /// the remaining block is adjusted so that its Schur complement over the
    /// new chain is the current form.
    pub fn rational_blow_up(
        &self,
        piece: &str,
        n: i64,
        chain_labels: Option<&[String]>,
        couplings: &[(String, usize, i64)],
    ) -> Result<HandleExpression, HandleError> {
        let pi = self.piece_index(piece)?;
        let piece_n = self.pieces[pi]
            .rational_ball_n()
            .ok_or_else(|| HandleError::UnknownPiece(format!("{piece} is not a rational ball")))?;
        if piece_n != n {
            return Err(HandleError::InvalidParameter(format!("`{piece}` is B_{piece_n}, not B_{n}")));
        }
        let len = (n - 1) as usize;
        let mut out = self.clone();
        let labels: Vec<String> = match chain_labels {
            Some(ls) if ls.len() != len => {
                return Err(HandleError::InvalidParameter(format!("C_{n} needs {len} labels, got {}", ls.len())))
            }
            Some(ls) => ls.iter().map(|l| out.claim(Some(l), "c")).collect::<Result<_, _>>()?,
            None => (0..len).map(|_| out.claim(None, "c")).collect::<Result<_, _>>()?,
        };
        let dim = self.form.dim();
        let mut coupling = vec![vec![Rational::zero(); len]; dim];
        for (label, pos, value) in couplings {
            let r = self.two_index(label)?;
            if *pos < 1 || *pos > len {
                return Err(HandleError::InvalidCoupling(format!("chain position {pos} outside 1..={len}")));
            }
            coupling[r][pos - 1] += rat(*value);
        }
        let chain = cn_matrix(n);
        let inverse = crate::lattice::invert(&chain).expect("C_n is nondegenerate");
        let mut entries = vec![vec![Rational::zero(); dim + len]; dim + len];
        for r in 0..dim {
            for s in 0..dim {
                let mut x = self.form.entry(r, s).clone();
                for a in 0..len {
                    if coupling[r][a].is_zero() {
                        continue;
                    }
                    for b in 0..len {
                        x += &coupling[r][a] * &inverse[a][b] * &coupling[s][b];
                    }
                }
                entries[r][s] = x;
            }
            for a in 0..len {
                entries[r][dim + a] = coupling[r][a].clone();
                entries[dim + a][r] = coupling[r][a].clone();
            }
        }
        for a in 0..len {
            for b in 0..len {
                entries[dim + a][dim + b] = chain[a][b].clone();
            }
        }
        let mut all_labels = self.form.labels().to_vec();
        all_labels.extend(labels.iter().cloned());
        out.form = SymmetricForm::new(all_labels, entries)?;
        for label in labels {
            out.two_handles.push(TwoHandle { label, winding: vec![0; self.one_handles.len()] });
        }
        out.pieces.remove(pi);
        Ok(out)
    }

    /// Opens a sealed `B_n` into its Kirby presentation: a new 1-handle and a
    /// 2-handle running `n` times over it with framing `n - 1`. `couplings`
    /// gives `(handle, winding over the new 1-handle, linking with the new
    /// 2-handle)`. The new integral framings and linkings of the coupled
    /// handles are forced by requiring the rational intersection form to stay
    /// exactly the same; non-integral results are rejected.
    pub fn unseal(
        &self,
        piece: &str,
        one: Option<&str>,
        two: Option<&str>,
        couplings: &[(String, i64, i64)],
    ) -> Result<HandleExpression, HandleError> {
        let pi = self.piece_index(piece)?;
        let n = self.pieces[pi]
            .rational_ball_n()
            .ok_or_else(|| HandleError::UnknownPiece(format!("{piece} is not a rational ball")))?;
        let dim = self.form.dim();
        let mut wind = vec![0i64; dim];
        let mut link = vec![0i64; dim];
        for (label, w, l) in couplings {
            let r = self.two_index(label)?;
            wind[r] = *w;
            link[r] = *l;
        }
        let mut out = self.clone();
        let one = out.claim(one, "x")?;
        let two = out.claim(two, "k")?;
        let touched: Vec<usize> = (0..dim).filter(|&r| wind[r] != 0 || link[r] != 0).collect();
        for &r in &touched {
            for s in 0..dim {
                let value = self.form.entry(r, s) + ratio(wind[s] * link[r] + wind[r] * link[s], n)
                    - ratio(wind[r] * wind[s] * (n - 1), n * n);
                if !value.is_integer() {
                    return Err(HandleError::InvalidCoupling(format!(
                        "entry ({}, {}) would be {}, not an integer",
                        self.form.labels()[r],
                        self.form.labels()[s],
                        format_rational(&value)
                    )));
                }
                out.form.set_symmetric(r, s, value);
            }
        }
        out.pieces.remove(pi);
        if !out.pieces.iter().any(|p| p.glued) && !out.form.is_integral() {
            return Err(HandleError::InvalidCoupling(
                "form is still rational after unsealing; couplings are incomplete".into(),
            ));
        }
        for (h, w) in out.two_handles.iter_mut().zip(&wind) {
            h.winding.push(*w);
        }
        out.one_handles.push(one);
        let couplings: Vec<Rational> = link.iter().map(|&l| rat(l)).collect();
        out.form = out.form.extended(&two, &couplings, rat(n - 1))?;
        let mut winding = vec![0; out.one_handles.len()];
        *winding.last_mut().expect("nonempty") = n;
        out.two_handles.push(TwoHandle { label: two, winding });
        Ok(out)
    }

    /// Inverse of [`unseal`](Self::unseal): a 1-handle with a 2-handle
    /// running `n >= 2` times over it, framed `n - 1`, becomes a sealed
    /// `B_n`. Other handles keep their rational classes.
    pub fn seal(&self, one: &str, two: &str, name: Option<&str>) -> Result<HandleExpression, HandleError> {
        let oi = self.one_index(one)?;
        let ti = self.two_index(two)?;
        let w = &self.two_handles[ti].winding;
        let n = w[oi];
        if n < 2 {
            return Err(HandleError::InvalidParameter(format!("`{two}` runs {n} times over `{one}`; need n >= 2")));
        }
        if w.iter().enumerate().any(|(j, &x)| j != oi && x != 0) {
            return Err(HandleError::InvalidParameter(format!("`{two}` runs over other 1-handles")));
        }
        if *self.form.entry(ti, ti) != rat(n - 1) {
            return Err(HandleError::InvalidParameter(format!(
                "`{two}` has framing {}, B_{n} needs {}",
                format_rational(self.form.entry(ti, ti)),
                n - 1
            )));
        }
        let dim = self.form.dim();
        let wind: Vec<i64> = self.two_handles.iter().map(|h| h.winding[oi]).collect();
        let link: Vec<Rational> = (0..dim).map(|r| self.form.entry(r, ti).clone()).collect();
        let mut out = self.clone();
        let name = out.claim(name, "B")?;
        let mut form = self.form.clone();
        for r in 0..dim {
            for s in r..dim {
                if r == ti || s == ti {
                    continue;
                }
                let value = self.form.entry(r, s) - (rat(wind[s]) * &link[r] + rat(wind[r]) * &link[s]) / rat(n)
                    + ratio(wind[r] * wind[s] * (n - 1), n * n);
                form.set_symmetric(r, s, value);
            }
        }
        let glued = (0..dim).any(|r| r != ti && (wind[r] != 0 || !link[r].is_zero()));
        out.form = form.without(&[ti]);
        out.two_handles.remove(ti);
        out.one_handles.remove(oi);
        for h in out.two_handles.iter_mut() {
            h.winding.remove(oi);
        }
        out.pieces.push(OpaquePiece::rational_ball(&name, n, glued)?);
        Ok(out)
    }
}

/// The `C_n` linking matrix as rationals.
pub(crate) fn cn_matrix(n: i64) -> Vec<Vec<Rational>> {
    let framings = cn_fraction(n).expect("n >= 2").0;
    let len = framings.len();
    (0..len)
        .map(|a| {
            (0..len)
                .map(|b| {
                    if a == b {
                        rat(framings[a])
                    } else if a.abs_diff(b) == 1 {
                        rat(1)
                    } else {
                        rat(0)
                    }
                })
                .collect()
        })
        .collect()
}

/// A plumbing as a 2-handlebody with no 1-handles.
pub fn from_plumbing(g: &PlumbingGraph) -> HandleExpression {
    let form = linking_matrix(g);
    let mut used: BTreeSet<String> = g.used_ids().into_iter().collect();
    used.extend(form.labels().iter().cloned());
    HandleExpression {
        one_handles: Vec::new(),
        two_handles: form.labels().iter().map(|l| TwoHandle { label: l.clone(), winding: Vec::new() }).collect(),
        form,
        pieces: Vec::new(),
        boundary: boundary_lens(g).ok(),
        used,
        next_fresh: 1,
    }
}

/// `B_n`: a 1-handle `d` and a 2-handle `k` winding `n` times, framed `n - 1`.
pub fn bn_expression(n: i64) -> Result<HandleExpression, HandleError> {
    if n < 2 {
        return Err(HandleError::InvalidParameter(format!("B_n needs n >= 2, got {n}")));
    }
    let mut h = HandleExpression::empty();
    h.used.extend(["d".to_string(), "k".to_string()]);
    h.one_handles.push("d".into());
    h.two_handles.push(TwoHandle { label: "k".into(), winding: vec![n] });
    h.form = SymmetricForm::from_integers(&["k"], &[vec![n - 1]])?;
    h.boundary = Some(lens_normalize(n * n, n - 1).expect("coprime"));
    Ok(h)
}

/// `E(m)` as an ambient piece together with a 0-framed fishtail fibre
/// handle `f`. The fibre handle carries one unit of `b2` and `euler`, so the
/// piece holds the rest and the totals are those of `E(m)`.
pub fn elliptic_with_fibre(m: i64) -> Result<HandleExpression, HandleError> {
    let mut piece = OpaquePiece::elliptic(m)?;
    piece.b2 -= 1;
    piece.euler -= 1;
    let mut h = HandleExpression::empty().with_piece(piece)?;
    h.used.insert("f".into());
    h.two_handles.push(TwoHandle { label: "f".into(), winding: Vec::new() });
    h.form = SymmetricForm::from_integers(&["f"], &[vec![0]])?;
    Ok(h)
}

impl fmt::Display for HandleExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1-handles [{}]", self.one_handles.join(","))?;
        write!(f, "; 2-handles [")?;
        for (i, h) in self.two_handles.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", h.label)?;
            if h.winding.iter().any(|&w| w != 0) {
                let w: Vec<String> = h.winding.iter().map(i64::to_string).collect();
                write!(f, " w=({})", w.join(","))?;
            }
        }
        write!(f, "]; form {}", self.form)?;
        if !self.pieces.is_empty() {
            let names: Vec<String> = self.pieces.iter().map(|p| p.name.clone()).collect();
            write!(f, "; pieces [{}]", names.join(","))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- ledger

/// One row of the invariant ledger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerStep {
    pub move_name: String,
    pub params: Vec<String>,
    pub invariants: Invariants,
}

impl Serialize for LedgerStep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let inv = &self.invariants;
        let mut s = serializer.serialize_struct("LedgerStep", 9)?;
        s.serialize_field("move", &self.move_name)?;
        s.serialize_field("params", &self.params)?;
        s.serialize_field("b1", &inv.b1)?;
        s.serialize_field("b2", &inv.b2)?;
        s.serialize_field("euler", &inv.euler)?;
        s.serialize_field("sigma", &inv.sigma)?;
        s.serialize_field("det", &DetJson(&inv.det))?;
        s.serialize_field("torsion", &inv.torsion)?;
        s.serialize_field("boundary", &inv.boundary)?;
        s.end()
    }
}

struct DetJson<'a>(&'a Rational);

impl Serialize for DetJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Det", 2)?;
        match (self.0.numer().to_i64(), self.0.denom().to_i64()) {
            (Some(num), Some(den)) => {
                s.serialize_field("num", &num)?;
                s.serialize_field("den", &den)?;
            }
            _ => {
                s.serialize_field("num", &self.0.numer().to_string())?;
                s.serialize_field("den", &self.0.denom().to_string())?;
            }
        }
        s.end()
    }
}

/// Append-only record of invariants, one row per executed move (plus the
/// starting state).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Ledger {
    pub steps: Vec<LedgerStep>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Ledger {
    pub fn record(&mut self, move_name: &str, params: Vec<String>, expr: &HandleExpression) {
        self.steps.push(LedgerStep { move_name: move_name.to_string(), params, invariants: expr.invariants() });
    }

    pub fn first(&self) -> Option<&Invariants> {
        self.steps.first().map(|s| &s.invariants)
    }

    pub fn last(&self) -> Option<&Invariants> {
        self.steps.last().map(|s| &s.invariants)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }

    /// Fixed-width human summary.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>4}  {:<14} {:>4} {:>4} {:>6} {:>6} {:>12} {:>10} {:>10}\n",
            "step", "move", "b1", "b2", "euler", "sigma", "det", "torsion", "boundary"
        );
        for (i, s) in self.steps.iter().enumerate() {
            let inv = &s.invariants;
            out.push_str(&format!(
                "{:>4}  {:<14} {:>4} {:>4} {:>6} {:>6} {:>12} {:>10} {:>10}\n",
                i,
                s.move_name,
                inv.b1,
                inv.b2,
                inv.euler,
                inv.sigma,
                format_rational(&inv.det),
                inv.torsion.to_string(),
                inv.boundary.map_or("-".to_string(), |b| b.to_string())
            ));
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plumbing::{blow_down_vertex, build_linear};

    fn v(framing: i64) -> HandleExpression {
        from_plumbing(&build_linear(&[framing]).unwrap())
    }

    fn cn(n: i64) -> HandleExpression {
        from_plumbing(&build_linear(&cn_fraction(n).unwrap().0).unwrap())
    }

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn from_plumbing_examples() {
        let inv = v(-5).invariants();
        assert_eq!((inv.b2, inv.sigma, inv.euler), (1, -1, 2));
        assert_eq!(inv.boundary, Some(lens_normalize(5, 1).unwrap()));
        let inv = cn(3).invariants();
        assert_eq!((inv.b2, inv.sigma, inv.det.clone()), (2, -2, rat(9)));
        let inv = HandleExpression::empty().invariants();
        assert_eq!((inv.b2, inv.euler), (0, 1));
    }

    #[test]
    fn bn_examples() {
        for n in [2, 4, 7] {
            let b = bn_expression(n).unwrap();
            assert_eq!(b.homology(), (0, 0, Torsion::Known(vec![n as u64])));
            assert_eq!(b.euler_sigma(), (1, 0));
        }
        assert!(bn_expression(1).is_err());
    }

    #[test]
    fn homology_of_free_one_handle() {
        let h = HandleExpression::empty().add_cancelling_pair(Some("x"), Some("z"), &[]).unwrap();
        let h = h.remove_cancelling_pair("x", "z").unwrap();
        assert_eq!(
            h,
            HandleExpression::empty()
                .add_cancelling_pair(Some("x"), Some("z"), &[])
                .unwrap()
                .remove_cancelling_pair("x", "z")
                .unwrap()
        );
        let mut free = HandleExpression::empty();
        free.one_handles.push("x".into());
        assert_eq!(free.homology(), (1, 0, Torsion::Known(vec![])));
    }

    #[test]
    fn euler_sigma_examples() {
        assert_eq!(v(-4).euler_sigma(), (2, -1));
        let mut h = v(-4);
        for _ in 0..3 {
            h = h.blow_up(None).unwrap();
        }
        assert_eq!(h.euler_sigma(), (5, -4));
    }

    #[test]
    fn cancelling_pair_round_trip() {
        let start = v(-3);
        let with = start.add_cancelling_pair(Some("x"), Some("z"), &[]).unwrap();
        assert_eq!(with.invariants(), start.invariants());
        let twice = with.add_cancelling_pair(Some("y"), Some("w"), &[]).unwrap();
        let back = twice.remove_cancelling_pair("y", "w").unwrap().remove_cancelling_pair("x", "z").unwrap();
        assert_eq!(back.form(), start.form());
        assert_eq!(back.invariants(), start.invariants());
        let empty = HandleExpression::empty().add_cancelling_pair(None, None, &[]).unwrap();
        assert_eq!(empty.invariants(), HandleExpression::empty().invariants());
    }

    #[test]
    fn cancelling_pair_rejects_other_handles_through_the_one_handle() {
        let h = v(-3).add_cancelling_pair(Some("x"), Some("z"), &[]).unwrap();
        let slid = h.slide("s1", "z", 1).unwrap();
        assert!(matches!(slid.remove_cancelling_pair("x", "z"), Err(HandleError::NotCancelling(_))));
        let b = bn_expression(3).unwrap();
        assert!(matches!(b.remove_cancelling_pair("d", "k"), Err(HandleError::NotCancelling(_))));
    }

    #[test]
    fn slide_examples() {
        // Framing n-1 handle over an n-3 handle with linking n-2 becomes 0-framed.
        let n = 7;
        let f = SymmetricForm::from_integers(&["a", "b"], &[vec![n - 1, n - 2], vec![n - 2, n - 3]]).unwrap();
        let mut h = HandleExpression::empty();
        h.used.extend(labels(&["a", "b"]));
        h.two_handles =
            vec![TwoHandle { label: "a".into(), winding: vec![] }, TwoHandle { label: "b".into(), winding: vec![] }];
        h.form = f;
        let slid = h.slide("a", "b", -1).unwrap();
        assert_eq!(slid.framing("a"), Some(&rat(0)));
        assert_eq!(slid.slide("a", "b", 1).unwrap(), h);
        assert_eq!(slid.invariants().det, h.invariants().det);
        assert!(matches!(h.slide("a", "zz", 1), Err(HandleError::UnknownLabel(_))));
    }

    #[test]
    fn blow_up_down_examples() {
        let start = v(-4);
        let up = start.blow_up(Some("e")).unwrap();
        let (a, b) = (start.invariants(), up.invariants());
        assert_eq!((b.b2 - a.b2, b.sigma - a.sigma, b.euler - a.euler), (1, -1, 1));
        assert_eq!(b.det, -a.det.clone());
        assert_eq!(up.blow_down("e").unwrap().form(), start.form());

        let chain = from_plumbing(&build_linear(&[-1, -2]).unwrap());
        let down = chain.blow_down("s1").unwrap();
        assert_eq!(down.form().to_string(), "[[-1]]");
        let b = bn_expression(2).unwrap().blow_up(Some("e")).unwrap();
        let bad = b.slide("e", "k", 1).unwrap();
        assert!(matches!(bad.blow_down("e"), Err(HandleError::NotBlowdownable(..))));
        assert!(matches!(v(-4).blow_down("s1"), Err(HandleError::NotBlowdownable(..))));
    }

    #[test]
    fn blow_up_vertex_matches_graph_rule() {
        let g = build_linear(&[-5, -2]).unwrap();
        let h = from_plumbing(&g).blow_up_vertex("s2", 1, Some("t")).unwrap();
        let g2 = crate::plumbing::blow_up_vertex(&g, "s2", Some("t")).unwrap();
        assert_eq!(h.form(), &linking_matrix(&g2));
        let e = from_plumbing(&g).blow_up_edge("s1", "s2", Some("t")).unwrap();
        let g3 = crate::plumbing::blow_up_edge(&g, "s1", "s2", Some("t")).unwrap();
        assert_eq!(e.form().restrict(&[0, 1, 2]), linking_matrix(&g3).restrict(&[0, 1, 2]));
        assert!(from_plumbing(&g).blow_up_edge("s1", "s1", None).is_err());
    }

    #[test]
    fn blow_down_agrees_with_graph() {
        let g = build_linear(&[-4, -1, -3]).unwrap();
        let lattice = from_plumbing(&g).blow_down("s2").unwrap();
        let graph = blow_down_vertex(&g, "s2").unwrap();
        assert_eq!(lattice.form(), &linking_matrix(&graph));
    }

    #[test]
    fn rbd_on_standalone_chain_is_a_rational_ball() {
        for n in 2..=8 {
            let h = cn(n);
            let chain: Vec<String> = h.two_handle_labels();
            let r = h.rational_blow_down(&chain, n, None).unwrap();
            assert_eq!(r.homology(), (0, 0, Torsion::Known(vec![n as u64])));
            assert_eq!(r.euler_sigma(), (1, 0));
            let piece = r.piece(&format!("B{n}")).unwrap();
            assert_eq!(piece.spin, Some(n % 2 == 1));
            assert!(!piece.glued);
        }
    }

    #[test]
    fn rbd_rejects_bad_chains() {
        let h = from_plumbing(&build_linear(&[-6, -2, -3]).unwrap());
        assert!(matches!(
            h.rational_blow_down(&labels(&["s1", "s2", "s3"]), 4, None),
            Err(HandleError::ChainMismatch(_))
        ));
        assert!(matches!(h.rational_blow_down(&labels(&["s1", "s2"]), 4, None), Err(HandleError::ChainMismatch(_))));
        let c = cn(3).add_cancelling_pair(Some("x"), Some("z"), &[]).unwrap().slide("s2", "z", 1).unwrap();
        assert!(c.rational_blow_down(&labels(&["s1", "s2"]), 3, None).is_err());
        let c = cn(3).add_cancelling_pair(Some("x"), Some("z"), &[]).unwrap();
        let moved = c.slide("s1", "z", 1).unwrap().slide("s1", "z", -1).unwrap();
        assert!(moved.rational_blow_down(&labels(&["s1", "s2"]), 3, None).is_ok());
    }

    #[test]
    fn rbd_then_rbu_restores_ledger() {
        let h = from_plumbing(&build_linear(&[-7, -2, -2, -2, -1]).unwrap());
        let r = h.rational_blow_down(&labels(&["s1", "s2", "s3", "s4"]), 5, Some("P")).unwrap();
        let d = h.invariants();
        let rd = r.invariants();
        assert_eq!((rd.b2, rd.sigma, rd.euler), (d.b2 - 4, d.sigma + 4, d.euler - 4));
        assert_eq!(rd.torsion, Torsion::Indeterminate);
        assert_eq!(rd.det.clone() * rat(25), d.det.clone());
        let back = r.rational_blow_up("P", 5, None, &[("s5".into(), 4, 1)]).unwrap();
        let bd = back.invariants();
        assert_eq!((bd.b2, bd.sigma, bd.euler, bd.det.clone()), (d.b2, d.sigma, d.euler, d.det.clone()));
        assert_eq!(back.form().restrict(&[0]).to_string(), "[[-1]]");
        assert!(matches!(r.rational_blow_up("Q", 5, None, &[]), Err(HandleError::UnknownPiece(_))));
        assert!(matches!(
            r.rational_blow_up("P", 5, None, &[("s5".into(), 9, 1)]),
            Err(HandleError::InvalidCoupling(_))
        ));
    }

    #[test]
    fn seal_and_unseal_are_inverse() {
        let n = 5;
        let h = from_plumbing(&build_linear(&[-7, -2, -2, -2, -1]).unwrap());
        let r = h.rational_blow_down(&labels(&["s1", "s2", "s3", "s4"]), n, Some("P")).unwrap();
        assert_eq!(r.framing("s5"), Some(&ratio(-6, 25)));
        let open = r.unseal("P", Some("d"), Some("k"), &[("s5".into(), 1, 1)]).unwrap();
        assert_eq!(open.framing("s5"), Some(&rat(0)));
        assert_eq!(open.framing("k"), Some(&rat(n - 1)));
        let (oi, ri) = (open.invariants(), r.invariants());
        assert_eq!((oi.b1, oi.b2, oi.euler, oi.sigma), (ri.b1, ri.b2, ri.euler, ri.sigma));
        assert_eq!(oi.torsion, Torsion::Known(vec![]));
        let closed = open.seal("d", "k", Some("Q")).unwrap();
        assert_eq!(closed.form(), r.form());
        assert!(matches!(r.unseal("P", None, None, &[("s5".into(), 1, 0)]), Err(HandleError::InvalidCoupling(_))));
    }

    #[test]
    fn seal_standalone_bn() {
        let b = bn_expression(2).unwrap().seal("d", "k", Some("B2")).unwrap();
        assert_eq!(b.pieces().len(), 1);
        assert!(!b.pieces()[0].glued);
        assert_eq!(b.homology(), (0, 0, Torsion::Known(vec![2])));
        assert!(v(-3).add_cancelling_pair(Some("x"), Some("z"), &[]).unwrap().seal("x", "z", None).is_err());
    }

    #[test]
    fn spin_parity() {
        assert!(is_spin_bn(3).unwrap());
        assert!(!is_spin_bn(4).unwrap());
        assert!(!is_spin_bn(2).unwrap());
        assert!(is_spin_bn(1).is_err());
    }

    #[test]
    fn cn_detection_on_lattice() {
        let h = from_plumbing(&build_linear(&[-6, -2, -2, -1]).unwrap());
        assert_eq!(h.find_cn_chains(4), vec![labels(&["s1", "s2", "s3"])]);
        assert!(h.find_cn_chains(3).is_empty());
        assert!(h.as_plumbing().is_some());
    }

    #[test]
    fn ledger_json_shape() {
        let mut ledger = Ledger::default();
        let h = v(-3);
        ledger.record("start", vec![], &h);
        ledger.record("blowup", vec!["e1".into()], &h.blow_up(Some("e1")).unwrap());
        let json: serde_json::Value = serde_json::from_str(&ledger.to_json()).unwrap();
        let step = &json["steps"][1];
        assert_eq!(step["move"], "blowup");
        assert_eq!(step["det"]["num"], 3);
        assert_eq!(step["det"]["den"], 1);
        assert_eq!(step["boundary"], "L(3,1)");
        assert_eq!(step["torsion"], serde_json::json!([]));
        assert!(json.get("notes").is_none());
        let text = ledger.to_json();
        let keys: Vec<&str> =
            text.lines().filter_map(|l| l.trim().split_once("\":").map(|(k, _)| k.trim_start_matches('"'))).collect();
        assert_eq!(&keys[1..10], &["move", "params", "b1", "b2", "euler", "sigma", "det", "num", "den"]);
    }
}
