//! Standard and rotated planar surface-code layouts.
//!
//! The standard code uses a `(2d-1) x (2d-1)` grid: data qubits sit where
//! `row + col` is even, X generators (sites) at even row / odd column and
//! Z generators (plaquettes) at odd row / even column. The `d` columns of
//! horizontal qubits are crossed by the logical Z chain, which runs along
//! row 0. The rotated code is the `d x d` checkerboard with weight-2 X
//! boundary stabilizers on top and bottom and Z ones on left and right.
//!
//! Each decoding pass sees the lattice as a graph whose vertices are the
//! ancillas of one type plus two boundaries, and whose edges are data
//! qubits; see [`MatchingLattice`].

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{ErrorType, PauliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Standard,
    Rotated,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Standard => "standard",
            Family::Rotated => "rotated",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Family::Standard),
            "rotated" => Ok(Family::Rotated),
            other => Err(Error::Parse(format!("unknown code family `{other}`"))),
        }
    }
}

/// `[[n, k, d]]` parameters of a surface code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CodeSpec {
    pub family: Family,
    pub d: u32,
    pub n: usize,
    pub k: usize,
    pub t: u32,
}

impl CodeSpec {
    pub fn new(family: Family, d: u32) -> Result<Self> {
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::InvalidDistance(d));
        }
        let du = d as usize;
        let n = match family {
            Family::Standard => du * du + (du - 1) * (du - 1),
            Family::Rotated => du * du,
        };
        Ok(Self {
            family,
            d,
            n,
            k: 1,
            t: (d - 1) / 2,
        })
    }
}

/// Formats as `family:d`, the code id used by the CLI and CSV output.
impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.d)
    }
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, d) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected family:d, got `{s}`")))?;
        let d: u32 = d
            .parse()
            .map_err(|_| Error::Parse(format!("bad distance in `{s}`")))?;
        CodeSpec::new(family.parse()?, d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GeneratorType {
    X,
    Z,
}

impl ErrorType {
    /// Generator type whose measurement detects this error component.
    pub fn detected_by(self) -> GeneratorType {
        match self {
            ErrorType::Z => GeneratorType::X,
            ErrorType::X => GeneratorType::Z,
        }
    }
}

impl GeneratorType {
    /// Error component this generator type detects.
    pub fn detects(self) -> ErrorType {
        match self {
            GeneratorType::X => ErrorType::Z,
            GeneratorType::Z => ErrorType::X,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Generator {
    pub kind: GeneratorType,
    pub position: (i32, i32),
    pub support: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DataQubit {
    pub id: usize,
    pub position: (i32, i32),
    /// X generators flipped by a Z error on this qubit.
    pub touched_x: Vec<usize>,
    /// Z generators flipped by an X error on this qubit.
    pub touched_z: Vec<usize>,
}

/// Boundary of the matching lattice: left/right on the Z pass, top/bottom
/// on the X pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Low,
    High,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Low => 0,
            Side::High => 1,
        }
    }
}

/// Endpoint of a data-qubit edge in a matching lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum End {
    Ancilla(usize),
    Boundary(Side),
}

/// One decoding pass's view of the code.
#[derive(Clone, Debug)]
pub struct MatchingLattice {
    error_type: ErrorType,
    d: u32,
    n: usize,
    hpos: Vec<u32>,
    /// (along, across) ancilla coordinates for the Manhattan shortcut.
    grid: Option<Vec<(i32, i32)>>,
    qubit_ends: Vec<[End; 2]>,
    column_of: Vec<Option<u32>>,
    neighbors: Vec<Vec<(usize, End)>>,
    bulk_dist: Vec<u32>,
    boundary_dist: Vec<[u32; 2]>,
    logical_chain: Vec<usize>,
}

impl MatchingLattice {
    fn new(
        error_type: ErrorType,
        d: u32,
        qubit_ancillas: &[Vec<usize>],
        hpos: Vec<u32>,
        grid: Option<Vec<(i32, i32)>>,
        column_of: Vec<Option<u32>>,
        logical_chain: Vec<usize>,
    ) -> Self {
        let m = hpos.len();
        let n = qubit_ancillas.len();
        let mut qubit_ends = Vec::with_capacity(n);
        let mut neighbors = vec![Vec::new(); m];
        for (q, touched) in qubit_ancillas.iter().enumerate() {
            let ends = match touched.as_slice() {
                [a, b] => [End::Ancilla(*a), End::Ancilla(*b)],
                [a] => {
                    let col = column_of[q].expect("boundary qubit must lie in a column");
                    let other = if hpos[*a] == col { col - 1 } else { col };
                    let side = if other == 0 {
                        Side::Low
                    } else {
                        assert_eq!(other, d, "boundary qubit {q} does not reach a boundary");
                        Side::High
                    };
                    [End::Ancilla(*a), End::Boundary(side)]
                }
                other => panic!("qubit {q} touches {} ancillas of one type", other.len()),
            };
            for (i, e) in ends.iter().enumerate() {
                if let End::Ancilla(a) = e {
                    neighbors[*a].push((q, ends[1 - i]));
                }
            }
            qubit_ends.push(ends);
        }

        let mut bulk_dist = vec![u32::MAX; m * m];
        for src in 0..m {
            let row = &mut bulk_dist[src * m..(src + 1) * m];
            row[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for &(_, e) in &neighbors[u] {
                    if let End::Ancilla(v) = e {
                        if row[v] == u32::MAX {
                            row[v] = row[u] + 1;
                            queue.push_back(v);
                        }
                    }
                }
            }
        }

        let mut boundary_dist = vec![[u32::MAX; 2]; m];
        for side in [Side::Low, Side::High] {
            let mut queue = VecDeque::new();
            for (a, nb) in neighbors.iter().enumerate() {
                if nb.iter().any(|&(_, e)| e == End::Boundary(side)) {
                    boundary_dist[a][side.index()] = 1;
                    queue.push_back(a);
                }
            }
            while let Some(u) = queue.pop_front() {
                let du = boundary_dist[u][side.index()];
                for &(_, e) in &neighbors[u] {
                    if let End::Ancilla(v) = e {
                        if boundary_dist[v][side.index()] == u32::MAX {
                            boundary_dist[v][side.index()] = du + 1;
                            queue.push_back(v);
                        }
                    }
                }
            }
        }

        Self {
            error_type,
            d,
            n,
            hpos,
            grid,
            qubit_ends,
            column_of,
            neighbors,
            bulk_dist,
            boundary_dist,
            logical_chain,
        }
    }

    pub fn error_type(&self) -> ErrorType {
        self.error_type
    }

    pub fn generator_type(&self) -> GeneratorType {
        self.error_type.detected_by()
    }

    pub fn distance(&self) -> u32 {
        self.d
    }

    pub fn num_ancillas(&self) -> usize {
        self.hpos.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Horizontal position: 0 for the low ghost, `d` for the high ghost,
    /// `1..=d-1` for interior sites of the standard code.
    pub fn hpos(&self, site: End) -> u32 {
        match site {
            End::Ancilla(a) => self.hpos[a],
            End::Boundary(Side::Low) => 0,
            End::Boundary(Side::High) => self.d,
        }
    }

    pub fn column_of(&self, qubit: usize) -> Option<u32> {
        self.column_of[qubit]
    }

    pub fn qubit_ends(&self, qubit: usize) -> [End; 2] {
        self.qubit_ends[qubit]
    }

    /// Edges incident to an ancilla as `(qubit, other end)`.
    pub fn neighbors(&self, a: usize) -> &[(usize, End)] {
        &self.neighbors[a]
    }

    pub fn grid(&self, a: usize) -> Option<(i32, i32)> {
        self.grid.as_ref().map(|g| g[a])
    }

    /// Shortest bulk chain length between two ancillas (BFS, no boundary
    /// shortcuts).
    pub fn bulk_distance(&self, a: usize, b: usize) -> u32 {
        self.bulk_dist[a * self.num_ancillas() + b]
    }

    /// Manhattan distance on the ancilla grid; `None` for rotated codes.
    pub fn manhattan_distance(&self, a: usize, b: usize) -> Option<u32> {
        let g = self.grid.as_ref()?;
        let (pa, pb) = (g[a], g[b]);
        Some((pa.0 - pb.0).unsigned_abs() + (pa.1 - pb.1).unsigned_abs())
    }

    pub fn boundary_distance(&self, a: usize, side: Side) -> u32 {
        self.boundary_dist[a][side.index()]
    }

    /// Qubits of the canonical chain running from the low to the high boundary.
    pub fn logical_chain(&self) -> &[usize] {
        &self.logical_chain
    }

    /// Next edge on a canonical shortest chain, preferring column-crossing
    /// (horizontal) qubits, then the lowest qubit id.
    fn step(&self, cur: usize, remaining: impl Fn(End) -> u32) -> (usize, End) {
        let here = remaining(End::Ancilla(cur));
        let mut best: Option<(bool, usize, End)> = None;
        for &(q, e) in &self.neighbors[cur] {
            if remaining(e) + 1 != here {
                continue;
            }
            let key = (self.column_of[q].is_none(), q, e);
            if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                best = Some(key);
            }
        }
        let (_, q, e) = best.expect("shortest chain must make progress");
        (q, e)
    }

    /// Qubits on the canonical minimal chain between two ancillas.
    pub fn path_between(&self, a: usize, b: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = a;
        while cur != b {
            let (q, e) = self.step(cur, |e| match e {
                End::Ancilla(v) => self.bulk_distance(v, b),
                End::Boundary(_) => u32::MAX - 1,
            });
            path.push(q);
            cur = match e {
                End::Ancilla(v) => v,
                End::Boundary(_) => unreachable!(),
            };
        }
        path
    }

    /// Qubits on the canonical minimal chain from an ancilla to a boundary.
    pub fn path_to_boundary(&self, a: usize, side: Side) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = a;
        loop {
            let (q, e) = self.step(cur, |e| match e {
                End::Ancilla(v) => self.boundary_distance(v, side),
                End::Boundary(s) if s == side => 0,
                End::Boundary(_) => u32::MAX - 1,
            });
            path.push(q);
            match e {
                End::Ancilla(v) => cur = v,
                End::Boundary(_) => return path,
            }
        }
    }
}

/// Full description of a planar surface code.
#[derive(Clone, Debug)]
pub struct CodeLayout {
    pub spec: CodeSpec,
    pub qubits: Vec<DataQubit>,
    pub x_generators: Vec<Generator>,
    pub z_generators: Vec<Generator>,
    /// Support of the X logical (a vertical chain of X).
    pub x_logical: Vec<usize>,
    /// Support of the Z logical (a horizontal chain of Z).
    pub z_logical: Vec<usize>,
    z_pass: MatchingLattice,
    x_pass: MatchingLattice,
}

/// Defects of one syndrome, split by generator type; both lists ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Syndrome {
    pub x_defects: Vec<usize>,
    pub z_defects: Vec<usize>,
}

impl Syndrome {
    /// Defects relevant to the pass correcting `kind` errors.
    pub fn defects(&self, kind: ErrorType) -> &[usize] {
        match kind {
            ErrorType::Z => &self.x_defects,
            ErrorType::X => &self.z_defects,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.x_defects.is_empty() && self.z_defects.is_empty()
    }

    /// Symmetric difference.
    pub fn symmetric_difference(&self, other: &Syndrome) -> Syndrome {
        let sd = |a: &[usize], b: &[usize]| {
            let a: BTreeSet<_> = a.iter().copied().collect();
            let b: BTreeSet<_> = b.iter().copied().collect();
            a.symmetric_difference(&b).copied().collect()
        };
        Syndrome {
            x_defects: sd(&self.x_defects, &other.x_defects),
            z_defects: sd(&self.z_defects, &other.z_defects),
        }
    }
}

/// Logical effect of `error * correction`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ResidualClass {
    Identity,
    XL,
    ZL,
    YL,
    /// The correction did not reproduce the syndrome.
    StabilizerMismatch,
}

impl CodeLayout {
    pub fn new(family: Family, d: u32) -> Result<Self> {
        let spec = CodeSpec::new(family, d)?;
        Ok(match family {
            Family::Standard => build_standard(spec),
            Family::Rotated => build_rotated(spec),
        })
    }

    pub fn from_spec(spec: CodeSpec) -> Result<Self> {
        Self::new(spec.family, spec.d)
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn d(&self) -> u32 {
        self.spec.d
    }

    pub fn t(&self) -> u32 {
        self.spec.t
    }

    pub fn generators(&self, kind: GeneratorType) -> &[Generator] {
        match kind {
            GeneratorType::X => &self.x_generators,
            GeneratorType::Z => &self.z_generators,
        }
    }

    /// Matching lattice of the pass correcting `kind` errors.
    pub fn lattice(&self, kind: ErrorType) -> &MatchingLattice {
        match kind {
            ErrorType::Z => &self.z_pass,
            ErrorType::X => &self.x_pass,
        }
    }

    /// Generator as a Pauli operator.
    pub fn generator_operator(&self, kind: GeneratorType, index: usize) -> PauliError {
        let mut op = PauliError::identity(self.n());
        let g = &self.generators(kind)[index];
        let part = match kind {
            GeneratorType::X => &mut op.x_part,
            GeneratorType::Z => &mut op.z_part,
        };
        for &q in &g.support {
            part[q] = true;
        }
        op
    }

    pub fn x_logical_operator(&self) -> PauliError {
        let mut op = PauliError::identity(self.n());
        for &q in &self.x_logical {
            op.x_part[q] = true;
        }
        op
    }

    pub fn z_logical_operator(&self) -> PauliError {
        let mut op = PauliError::identity(self.n());
        for &q in &self.z_logical {
            op.z_part[q] = true;
        }
        op
    }

    pub fn extract_syndrome(&self, error: &PauliError) -> Syndrome {
        assert_eq!(error.len(), self.n(), "error length must equal n");
        let mut x_flip = vec![false; self.x_generators.len()];
        let mut z_flip = vec![false; self.z_generators.len()];
        for (q, qubit) in self.qubits.iter().enumerate() {
            if error.z_part[q] {
                for &a in &qubit.touched_x {
                    x_flip[a] ^= true;
                }
            }
            if error.x_part[q] {
                for &a in &qubit.touched_z {
                    z_flip[a] ^= true;
                }
            }
        }
        let collect = |v: Vec<bool>| {
            v.into_iter()
                .enumerate()
                .filter_map(|(i, b)| b.then_some(i))
                .collect()
        };
        Syndrome {
            x_defects: collect(x_flip),
            z_defects: collect(z_flip),
        }
    }

    /// Classifies `error * correction` by its commutation with the logicals.
    pub fn residual_class(&self, error: &PauliError, correction: &PauliError) -> ResidualClass {
        if self.extract_syndrome(error) != self.extract_syndrome(correction) {
            return ResidualClass::StabilizerMismatch;
        }
        let residual = error.compose(correction);
        let z_flip = self
            .x_logical
            .iter()
            .filter(|&&q| residual.z_part[q])
            .count()
            % 2
            == 1;
        let x_flip = self
            .z_logical
            .iter()
            .filter(|&&q| residual.x_part[q])
            .count()
            % 2
            == 1;
        match (x_flip, z_flip) {
            (false, false) => ResidualClass::Identity,
            (true, false) => ResidualClass::XL,
            (false, true) => ResidualClass::ZL,
            (true, true) => ResidualClass::YL,
        }
    }

    /// JSON-serializable view of the layout.
    pub fn dump(&self) -> LayoutDump<'_> {
        LayoutDump {
            spec: &self.spec,
            qubits: &self.qubits,
            x_generators: &self.x_generators,
            z_generators: &self.z_generators,
            x_logical: &self.x_logical,
            z_logical: &self.z_logical,
        }
    }

    /// ASCII picture: `o` data qubit, `X`/`Z` generators, `.` empty.
    pub fn render_ascii(&self) -> String {
        let mut cells = std::collections::BTreeMap::new();
        for q in &self.qubits {
            cells.insert(q.position, 'o');
        }
        for g in &self.x_generators {
            cells.insert(g.position, 'X');
        }
        for g in &self.z_generators {
            cells.insert(g.position, 'Z');
        }
        let max_r = cells.keys().map(|p| p.0).max().unwrap_or(0);
        let max_c = cells.keys().map(|p| p.1).max().unwrap_or(0);
        let mut out = String::new();
        for r in 0..=max_r {
            let line: String = (0..=max_c)
                .map(|c| *cells.get(&(r, c)).unwrap_or(&' '))
                .collect();
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
pub struct LayoutDump<'a> {
    pub spec: &'a CodeSpec,
    pub qubits: &'a [DataQubit],
    pub x_generators: &'a [Generator],
    pub z_generators: &'a [Generator],
    pub x_logical: &'a [usize],
    pub z_logical: &'a [usize],
}

struct Raw {
    qubit_pos: Vec<(i32, i32)>,
    x_pos: Vec<(i32, i32)>,
    z_pos: Vec<(i32, i32)>,
}

/// Wires supports and touched lists from positions and an adjacency rule.
fn assemble(
    spec: CodeSpec,
    raw: Raw,
    support_of: impl Fn((i32, i32)) -> Vec<(i32, i32)>,
) -> (Vec<DataQubit>, Vec<Generator>, Vec<Generator>) {
    let index: std::collections::HashMap<(i32, i32), usize> = raw
        .qubit_pos
        .iter()
        .enumerate()
        .map(|(i, p)| (*p, i))
        .collect();
    let mut qubits: Vec<DataQubit> = raw
        .qubit_pos
        .iter()
        .enumerate()
        .map(|(id, &position)| DataQubit {
            id,
            position,
            touched_x: Vec::new(),
            touched_z: Vec::new(),
        })
        .collect();
    let mut make = |positions: &[(i32, i32)], kind: GeneratorType| -> Vec<Generator> {
        positions
            .iter()
            .enumerate()
            .map(|(gi, &position)| {
                let mut support: Vec<usize> = support_of(position)
                    .into_iter()
                    .filter_map(|p| index.get(&p).copied())
                    .collect();
                support.sort_unstable();
                for &q in &support {
                    match kind {
                        GeneratorType::X => qubits[q].touched_x.push(gi),
                        GeneratorType::Z => qubits[q].touched_z.push(gi),
                    }
                }
                Generator {
                    kind,
                    position,
                    support,
                }
            })
            .collect()
    };
    let xs = make(&raw.x_pos, GeneratorType::X);
    let zs = make(&raw.z_pos, GeneratorType::Z);
    debug_assert_eq!(qubits.len(), spec.n);
    (qubits, xs, zs)
}

fn build_standard(spec: CodeSpec) -> CodeLayout {
    let s = 2 * spec.d as i32 - 1;
    let mut raw = Raw {
        qubit_pos: Vec::new(),
        x_pos: Vec::new(),
        z_pos: Vec::new(),
    };
    for r in 0..s {
        for c in 0..s {
            match (r % 2, c % 2) {
                (0, 0) | (1, 1) => raw.qubit_pos.push((r, c)),
                (0, 1) => raw.x_pos.push((r, c)),
                _ => raw.z_pos.push((r, c)),
            }
        }
    }
    let (qubits, xg, zg) = assemble(spec, raw, |(r, c)| {
        vec![(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
    });
    let horizontal = |q: &DataQubit| q.position.0 % 2 == 0;
    let z_logical: Vec<usize> = qubits
        .iter()
        .filter(|q| q.position.0 == 0 && horizontal(q))
        .map(|q| q.id)
        .collect();
    let x_logical: Vec<usize> = qubits
        .iter()
        .filter(|q| q.position.1 == 0 && horizontal(q))
        .map(|q| q.id)
        .collect();

    let z_pass = MatchingLattice::new(
        ErrorType::Z,
        spec.d,
        &qubits
            .iter()
            .map(|q| q.touched_x.clone())
            .collect::<Vec<_>>(),
        xg.iter().map(|g| ((g.position.1 + 1) / 2) as u32).collect(),
        Some(
            xg.iter()
                .map(|g| ((g.position.1 + 1) / 2, g.position.0 / 2))
                .collect(),
        ),
        qubits
            .iter()
            .map(|q| horizontal(q).then(|| (q.position.1 / 2 + 1) as u32))
            .collect(),
        z_logical.clone(),
    );
    let x_pass = MatchingLattice::new(
        ErrorType::X,
        spec.d,
        &qubits
            .iter()
            .map(|q| q.touched_z.clone())
            .collect::<Vec<_>>(),
        zg.iter().map(|g| ((g.position.0 + 1) / 2) as u32).collect(),
        Some(
            zg.iter()
                .map(|g| ((g.position.0 + 1) / 2, g.position.1 / 2))
                .collect(),
        ),
        qubits
            .iter()
            .map(|q| horizontal(q).then(|| (q.position.0 / 2 + 1) as u32))
            .collect(),
        x_logical.clone(),
    );
    CodeLayout {
        spec,
        qubits,
        x_generators: xg,
        z_generators: zg,
        x_logical,
        z_logical,
        z_pass,
        x_pass,
    }
}

/// Doubled coordinates: data at `(2i+1, 2j+1)`, plaquette `(i, j)` centred at
/// `(2i+2, 2j+2)` for `i, j` in `-1..d`.
fn build_rotated(spec: CodeSpec) -> CodeLayout {
    let d = spec.d as i32;
    let mut raw = Raw {
        qubit_pos: Vec::new(),
        x_pos: Vec::new(),
        z_pos: Vec::new(),
    };
    for i in 0..d {
        for j in 0..d {
            raw.qubit_pos.push((2 * i + 1, 2 * j + 1));
        }
    }
    for i in -1..d {
        for j in -1..d {
            let is_x = (i + j).rem_euclid(2) == 0;
            let top_bottom = i == -1 || i == d - 1;
            let left_right = j == -1 || j == d - 1;
            let keep = match (top_bottom, left_right) {
                (false, false) => true,
                (true, false) => is_x,
                (false, true) => !is_x,
                (true, true) => false,
            };
            if !keep {
                continue;
            }
            let pos = (2 * i + 2, 2 * j + 2);
            if is_x {
                raw.x_pos.push(pos);
            } else {
                raw.z_pos.push(pos);
            }
        }
    }
    let (qubits, xg, zg) = assemble(spec, raw, |(r, c)| {
        vec![
            (r - 1, c - 1),
            (r - 1, c + 1),
            (r + 1, c - 1),
            (r + 1, c + 1),
        ]
    });
    let z_logical: Vec<usize> = qubits
        .iter()
        .filter(|q| q.position.0 == 1)
        .map(|q| q.id)
        .collect();
    let x_logical: Vec<usize> = qubits
        .iter()
        .filter(|q| q.position.1 == 1)
        .map(|q| q.id)
        .collect();
    let z_pass = MatchingLattice::new(
        ErrorType::Z,
        spec.d,
        &qubits
            .iter()
            .map(|q| q.touched_x.clone())
            .collect::<Vec<_>>(),
        xg.iter().map(|g| (g.position.1 / 2) as u32).collect(),
        None,
        qubits
            .iter()
            .map(|q| Some(((q.position.1 - 1) / 2 + 1) as u32))
            .collect(),
        z_logical.clone(),
    );
    let x_pass = MatchingLattice::new(
        ErrorType::X,
        spec.d,
        &qubits
            .iter()
            .map(|q| q.touched_z.clone())
            .collect::<Vec<_>>(),
        zg.iter().map(|g| (g.position.0 / 2) as u32).collect(),
        None,
        qubits
            .iter()
            .map(|q| Some(((q.position.0 - 1) / 2 + 1) as u32))
            .collect(),
        x_logical.clone(),
    );
    CodeLayout {
        spec,
        qubits,
        x_generators: xg,
        z_generators: zg,
        x_logical,
        z_logical,
        z_pass,
        x_pass,
    }
}
