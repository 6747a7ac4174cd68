//! Both spectral sequences of a double complex, from the filtered total complex.
//!
//! E_r^s = Z_r^s / (Z_{r-1}^{s+1} + d Z_{r-1}^{s-r+1}) with
//! Z_r^s = { x ∈ F^s : dx ∈ F^{s+r} }, computed as saturated integer kernels.
//! Kind I filters by column (d_0 = d'), kind II by row (d_0 = d).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use serde::Serialize;

use crate::complexes::{build_cyclic_complex, Window};
use crate::equivariant::{totalize, DoubleComplex, TotalComplex, WreathModel};
use crate::error::{Error, Result};
use crate::exactlin::{homology_of_cyclic_maps, kernel_basis, solve_in_lattice, CyclicDecomposition, IntegerMatrix, Subquotient};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Kind {
    I,
    II,
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(Kind::I),
            "II" | "ii" | "2" => Ok(Kind::II),
            _ => Err(Error::Malformed(format!("kind must be I or II, got {:?}", s))),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Kind::I { "I" } else { "II" })
    }
}

impl Kind {
    /// Target bidegree of d_r.
    pub fn target(self, r: usize, i: i64, j: i64) -> (i64, i64) {
        let r = r as i64;
        match self {
            Kind::I => (i + r, j - r + 1),
            Kind::II => (i - r + 1, j + r),
        }
    }

    /// Source bidegree of the d_r landing in (i, j).
    pub fn source(self, r: usize, i: i64, j: i64) -> (i64, i64) {
        let r = r as i64;
        match self {
            Kind::I => (i - r, j + r - 1),
            Kind::II => (i + r - 1, j - r),
        }
    }

    fn filtration(self, i: i64, j: i64) -> i64 {
        match self {
            Kind::I => i,
            Kind::II => j,
        }
    }

}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageDifferential {
    pub target: (i64, i64),
    pub matrix: IntegerMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageEntry {
    pub group: CyclicDecomposition,
    pub differential: Option<PageDifferential>,
}

#[derive(Clone, Debug)]
pub struct SpectralSequencePage {
    pub r: usize,
    pub kind: Kind,
    pub window: Window,
    /// Nonzero entries keyed by (i, j).
    pub entries: BTreeMap<(i64, i64), PageEntry>,
}

impl SpectralSequencePage {
    pub fn group(&self, i: i64, j: i64) -> CyclicDecomposition {
        self.entries.get(&(i, j)).map(|e| e.group.clone()).unwrap_or_default()
    }

    pub fn differential(&self, i: i64, j: i64) -> Option<&PageDifferential> {
        self.entries.get(&(i, j)).and_then(|e| e.differential.as_ref())
    }

    /// Some d_r on this page is nonzero.
    pub fn has_nonzero_differential(&self) -> bool {
        self.entries.values().any(|e| e.differential.as_ref().is_some_and(|d| !d.matrix.is_zero()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(&(i, j), e)| {
                let factors: Vec<String> = e.group.factors.iter().map(|f| f.to_string()).collect();
                let factors: Vec<serde_json::Value> =
                    factors.iter().map(|f| serde_json::from_str(f).unwrap_or(serde_json::Value::String(f.clone()))).collect();
                let mut obj = serde_json::json!({ "i": i, "j": j, "factors": factors });
                if let Some(d) = &e.differential {
                    let rows: Vec<Vec<serde_json::Value>> = (0..d.matrix.rows())
                        .map(|a| d.matrix.row(a).iter().map(|x| serde_json::from_str(&x.to_string()).unwrap()).collect())
                        .collect();
                    obj["d_r"] = serde_json::json!({ "target": [d.target.0, d.target.1], "matrix": rows });
                }
                obj
            })
            .collect();
        serde_json::json!({ "r": self.r, "kind": self.kind.to_string(), "entries": entries })
    }
}

impl fmt::Display for SpectralSequencePage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "E_{} (kind {}), total degrees {}", self.r, self.kind, self.window)?;
        for (&(i, j), e) in &self.entries {
            write!(f, "  ({:>3},{:>3})  {}", i, j, e.group)?;
            if let Some(d) = &e.differential {
                if !d.matrix.is_zero() {
                    let rows: Vec<String> =
                        (0..d.matrix.rows()).map(|a| d.matrix.row(a).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect();
                    write!(f, "   d_{} -> ({},{}) [{}]", self.r, d.target.0, d.target.1, rows.join("; "))?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

type Key = (usize, i64, i64);

/// Page-by-page computation over a filtered total complex, with caches.
pub struct SpectralEngine {
    total: TotalComplex,
    kind: Kind,
    filt: HashMap<i64, Vec<i64>>,
    fmin: i64,
    fmax: i64,
    z_cache: Mutex<HashMap<Key, IntegerMatrix>>,
    e_cache: Mutex<HashMap<Key, Subquotient>>,
}

impl SpectralEngine {
    pub fn new(dc: &DoubleComplex, kind: Kind, window: Window) -> Result<Self> {
        let total = totalize(dc, window)?;
        Ok(Self::from_total(total, kind))
    }

    pub fn from_total(total: TotalComplex, kind: Kind) -> Self {
        let (row_lo, row_hi) = total.double.rows();
        let cols = total.double.columns() as i64;
        let (fmin, fmax) = match kind {
            Kind::I => (0, cols - 1),
            Kind::II => (row_lo, row_hi),
        };
        let mut filt = HashMap::new();
        let lo = total.complex.lowest_stored_degree();
        let hi = total.complex.highest_stored_degree();
        for m in lo - 1..=hi + 1 {
            let mut v = Vec::new();
            for b in total.blocks(m) {
                v.extend(std::iter::repeat(kind.filtration(b.i, b.j)).take(b.len));
            }
            filt.insert(m, v);
        }
        SpectralEngine { total, kind, filt, fmin, fmax, z_cache: Mutex::new(HashMap::new()), e_cache: Mutex::new(HashMap::new()) }
    }

    pub fn total(&self) -> &TotalComplex {
        &self.total
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn window(&self) -> Window {
        self.total.window
    }

    /// Page index from which every entry is stable.
    pub fn infinity_page(&self) -> usize {
        (self.fmax - self.fmin).max(0) as usize + 2
    }

    fn filt(&self, m: i64) -> &[i64] {
        self.filt.get(&m).map_or(&[], |v| v.as_slice())
    }

    fn clamp_r(&self, r: usize, s: i64) -> usize {
        let cap = (self.fmax + 1 - s).max(1) as usize;
        r.min(cap)
    }

    /// Z_r^{s} in Tot^m as columns of an ambient matrix; r = 0 gives F^s.
    pub fn z_lattice(&self, r: usize, s: i64, m: i64) -> IntegerMatrix {
        let r = if r == 0 { 0 } else { self.clamp_r(r, s) };
        let key = (r, s, m);
        if let Some(z) = self.z_cache.lock().unwrap().get(&key) {
            return z.clone();
        }
        let f = self.filt(m);
        let cols: Vec<usize> = (0..f.len()).filter(|&k| f[k] >= s).collect();
        let mut out = IntegerMatrix::zeros(f.len(), 0);
        if !cols.is_empty() {
            let basis = if r == 0 {
                IntegerMatrix::identity(cols.len())
            } else {
                let f1 = self.filt(m + 1);
                let rows: Vec<usize> = (0..f1.len()).filter(|&k| f1[k] >= s && f1[k] < s + r as i64).collect();
                let d = self.total.complex.differential(m);
                kernel_basis(&d.select_rows(&rows).select_cols(&cols))
            };
            out = IntegerMatrix::zeros(f.len(), basis.cols());
            for (a, &row) in cols.iter().enumerate() {
                for c in 0..basis.cols() {
                    out.set(row, c, basis.get(a, c).clone());
                }
            }
        }
        self.z_cache.lock().unwrap().insert(key, out.clone());
        out
    }

    fn entry_by_filtration(&self, r: usize, s: i64, m: i64) -> Result<Subquotient> {
        let key = (r, s, m);
        if let Some(e) = self.e_cache.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let z = self.z_lattice(r, s, m);
        let above = self.z_lattice(r.saturating_sub(1), s + 1, m);
        let prev = self.z_lattice(r.saturating_sub(1), s - r as i64 + 1, m - 1);
        let bnd = self.total.complex.differential(m - 1).checked_mul(&prev)?;
        let sq = Subquotient::new(&z, &above.hstack(&bnd)?)?;
        self.e_cache.lock().unwrap().insert(key, sq.clone());
        Ok(sq)
    }

    /// E_r^{i,j} with generators and coordinates.
    pub fn entry(&self, r: usize, i: i64, j: i64) -> Result<Subquotient> {
        self.entry_by_filtration(r, self.kind.filtration(i, j), i + j)
    }

    pub fn group(&self, r: usize, i: i64, j: i64) -> Result<CyclicDecomposition> {
        Ok(self.entry(r, i, j)?.decomposition().clone())
    }

    /// Matrix of d_r out of (i, j); column k is the image of generator k.
    pub fn differential(&self, r: usize, i: i64, j: i64) -> Result<PageDifferential> {
        let src = self.entry(r, i, j)?;
        let target = self.kind.target(r, i, j);
        let tgt = self.entry(r, target.0, target.1)?;
        let d = self.total.complex.differential(i + j);
        let mut matrix = IntegerMatrix::zeros(tgt.factors().len(), src.factors().len());
        if !tgt.is_trivial() {
            for k in 0..src.factors().len() {
                let img = d.mul_vec(&src.generator(k))?;
                for (a, c) in tgt.coordinates(&img)?.into_iter().enumerate() {
                    matrix.set(a, k, c);
                }
            }
        }
        Ok(PageDifferential { target, matrix })
    }

    /// Bidegrees of total degree m that can be nonzero.
    pub fn bidegrees(&self, m: i64) -> Vec<(i64, i64)> {
        self.total.blocks(m).iter().filter(|b| b.len > 0).map(|b| (b.i, b.j)).collect()
    }

    pub fn page(&self, r: usize) -> Result<SpectralSequencePage> {
        let w = self.window();
        let mut entries = BTreeMap::new();
        for m in w.degrees() {
            for (i, j) in self.bidegrees(m) {
                let group = self.group(r, i, j)?;
                if group.is_trivial() {
                    continue;
                }
                let d = self.differential(r, i, j)?;
                let differential = (d.matrix.rows() > 0).then_some(d);
                entries.insert((i, j), PageEntry { group, differential });
            }
        }
        Ok(SpectralSequencePage { r, kind: self.kind, window: w, entries })
    }

    /// E_{r+1}^{i,j} agrees with the homology of (E_r, d_r) at (i, j).
    pub fn paging_holds(&self, r: usize, i: i64, j: i64) -> Result<bool> {
        let (si, sj) = self.kind.source(r, i, j);
        let incoming = self.differential(r, si, sj)?;
        let outgoing = self.differential(r, i, j)?;
        let a = self.group(r, si, sj)?;
        let b = self.group(r, i, j)?;
        let (ti, tj) = outgoing.target;
        let c = self.group(r, ti, tj)?;
        let h = homology_of_cyclic_maps(&incoming.matrix, &a.factors, &b.factors, &outgoing.matrix, &c.factors)?;
        Ok(h == self.group(r + 1, i, j)?)
    }

    /// d_r ∘ d_r vanishes out of (i, j).
    pub fn differential_squares_to_zero(&self, r: usize, i: i64, j: i64) -> Result<bool> {
        let first = self.differential(r, i, j)?;
        let second = self.differential(r, first.target.0, first.target.1)?;
        let comp = second.matrix.checked_mul(&first.matrix)?;
        let orders = self.group(r, second.target.0, second.target.1)?;
        Ok((0..comp.rows()).all(|a| {
            let o = &orders.factors[a];
            (0..comp.cols()).all(|k| if o.is_zero() { comp.get(a, k).is_zero() } else { (comp.get(a, k) % o).is_zero() })
        }))
    }
}

/// Pages E_1 .. E_{r_max} of the chosen kind on the total-degree window.
pub fn pages(dc: &DoubleComplex, kind: Kind, r_max: usize, window: Window) -> Result<Vec<SpectralSequencePage>> {
    let eng = SpectralEngine::new(dc, kind, window)?;
    (1..=r_max).map(|r| eng.page(r)).collect()
}

pub fn e_infinity(dc: &DoubleComplex, kind: Kind, window: Window) -> Result<SpectralSequencePage> {
    let eng = SpectralEngine::new(dc, kind, window)?;
    eng.page(eng.infinity_page())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Verified,
    Failed,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaledBidegreeCheck {
    pub i: i64,
    pub j: i64,
    pub generators: usize,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaledDifferentialReport {
    pub p: u64,
    pub degree: i64,
    pub n: u64,
    pub r: usize,
    pub bidegrees: Vec<ScaledBidegreeCheck>,
}

impl ScaledDifferentialReport {
    pub fn passed(&self) -> bool {
        self.bidegrees.iter().all(|b| b.status != CheckStatus::Failed)
    }

    pub fn verified(&self) -> usize {
        self.bidegrees.iter().filter(|b| b.status == CheckStatus::Verified).count()
    }
}

/// Compares the kind II differential of Hom(W, C(n,d)^{⊗p}) with that of
/// C(1,d)^{⊗p}: a zig-zag x_1 + ... + x_r for d_r in the unit model rescales
/// to y_k = n^{k-1} x_k, and then d̃_r[y] = n^r d_r[x] on representatives.
pub fn check_scaled_differential(p: u64, d: i64, n: u64, r: usize, window: Window) -> Result<ScaledDifferentialReport> {
    if r < 1 {
        return Err(Error::Precondition("r must be at least 1".into()));
    }
    let base = WreathModel::build(build_cyclic_complex(1, d), p, window)?;
    let scaled = WreathModel::build(build_cyclic_complex(n, d), p, window)?;
    let eb = SpectralEngine::from_total(base.total.clone(), Kind::II);
    let es = SpectralEngine::from_total(scaled.total.clone(), Kind::II);
    let tb = &base.total;
    let ts = &scaled.total;
    let nb = BigInt::from(n);
    let mut out = Vec::new();
    for m in window.degrees() {
        for (i, j) in eb.bidegrees(m) {
            if m + 1 > window.hi {
                out.push(ScaledBidegreeCheck { i, j, generators: 0, status: CheckStatus::Inconclusive, detail: "target outside window".into() });
                continue;
            }
            let z = eb.z_lattice(r, j, m);
            let mut ok = true;
            let mut detail = String::from("ok");
            let src_scaled = es.entry(r, i, j)?;
            let dr_scaled = es.differential(r, i, j)?;
            let tgt_scaled = es.entry(r, dr_scaled.target.0, dr_scaled.target.1)?;
            for g in 0..z.cols() {
                let x = z.column(g);
                // y_k = n^{k-1} x_k on rows j .. j+r-1, zero elsewhere
                let mut y = vec![BigInt::zero(); x.len()];
                let mut xbar = vec![BigInt::zero(); x.len()];
                for blk in tb.blocks(m) {
                    let k = blk.j - j;
                    if k < 0 || k >= r as i64 {
                        continue;
                    }
                    let scale = Pow::pow(&nb, k as u32);
                    for a in blk.offset..blk.offset + blk.len {
                        xbar[a] = x[a].clone();
                        y[a] = &x[a] * &scale;
                    }
                }
                let dy = ts.complex.differential(m).mul_vec(&y)?;
                let dx = tb.complex.differential(m).mul_vec(&xbar)?;
                let nr = Pow::pow(&nb, r as u32);
                for blk in ts.blocks(m + 1) {
                    let k = blk.j - j;
                    for a in blk.offset..blk.offset + blk.len {
                        let expect = if k == r as i64 { &dx[a] * &nr } else if (0..r as i64).contains(&k) { BigInt::zero() } else { dy[a].clone() };
                        if dy[a] != expect {
                            ok = false;
                            detail = format!("representative mismatch in row {}", blk.j);
                        }
                    }
                }
                if !ok {
                    break;
                }
                // y represents a class of Ẽ_r and the page differential agrees with dy
                let zs = es.z_lattice(r, j, m);
                if solve_in_lattice(&zs, &y)?.is_none() {
                    ok = false;
                    detail = "rescaled zig-zag is not in Z_r".into();
                    break;
                }
                let cy = src_scaled.coordinates(&y)?;
                let via_page = dr_scaled.matrix.mul_vec(&cy)?;
                let direct = tgt_scaled.coordinates(&dy)?;
                let agree = via_page.iter().zip(&direct).zip(tgt_scaled.factors()).all(|((a, b), o)| {
                    if o.is_zero() {
                        a == b
                    } else {
                        ((a - b) % o).is_zero()
                    }
                });
                if !agree {
                    ok = false;
                    detail = "page differential disagrees with representative".into();
                    break;
                }
            }
            out.push(ScaledBidegreeCheck {
                i,
                j,
                generators: z.cols(),
                status: if ok { CheckStatus::Verified } else { CheckStatus::Failed },
                detail,
            });
        }
    }
    Ok(ScaledDifferentialReport { p, degree: d, n, r, bidegrees: out })
}
