//! Open-boundary cubic lattice, raster order and species labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub lx: usize,
    pub ly: usize,
    pub lz: usize,
    /// Lattice spacing in fm.
    pub a_fm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Site {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Site {
    pub fn new(x: usize, y: usize, z: usize) -> Self {
        Site { x, y, z }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Nearest-neighbour bond; `a` is the endpoint with the lower coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Bond {
    pub a: Site,
    pub b: Site,
    pub axis: Axis,
}

impl Bond {
    /// Index in the six-layer kinetic split: two parity classes per axis.
    pub fn kinetic_layer(&self) -> usize {
        let c = match self.axis {
            Axis::X => self.a.x,
            Axis::Y => self.a.y,
            Axis::Z => self.a.z,
        };
        2 * self.axis.index() + c % 2
    }
}

/// Nucleon species in mode order (up p, down p, up n, down n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Species {
    UpP,
    DownP,
    UpN,
    DownN,
}

impl Species {
    pub const ALL: [Species; 4] = [Species::UpP, Species::DownP, Species::UpN, Species::DownN];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Species {
        Species::ALL[i]
    }

    /// Spin label: 0 up, 1 down.
    pub fn spin(self) -> usize {
        self.index() % 2
    }

    /// Isospin label: 0 proton, 1 neutron.
    pub fn isospin(self) -> usize {
        self.index() / 2
    }

    pub fn from_spin_isospin(spin: usize, iso: usize) -> Species {
        Species::from_index(spin + 2 * iso)
    }
}

impl LatticeSpec {
    pub fn new(lx: usize, ly: usize, lz: usize, a_fm: f64) -> Result<Self> {
        if lx == 0 || ly == 0 || lz == 0 {
            return Err(Error::Domain("lattice extents must be at least 1".into()));
        }
        if !(a_fm > 0.0 && a_fm.is_finite()) {
            return Err(Error::Domain(format!("lattice spacing must be positive, got {a_fm}")));
        }
        Ok(LatticeSpec { lx, ly, lz, a_fm })
    }

    pub fn cubic(l: usize, a_fm: f64) -> Result<Self> {
        Self::new(l, l, l, a_fm)
    }

    pub fn n_sites(&self) -> usize {
        self.lx * self.ly * self.lz
    }

    pub fn n_modes(&self) -> usize {
        4 * self.n_sites()
    }

    pub fn contains(&self, s: Site) -> bool {
        s.x < self.lx && s.y < self.ly && s.z < self.lz
    }

    /// Boustrophedon raster index: x runs forward on even rows and backward
    /// on odd rows, rows stack in y, planes stack in z.
    pub fn raster(&self, s: Site) -> usize {
        let xr = if s.y % 2 == 0 { s.x } else { self.lx - 1 - s.x };
        s.z * self.lx * self.ly + s.y * self.lx + xr
    }

    pub fn site_of(&self, r: usize) -> Site {
        let z = r / (self.lx * self.ly);
        let rem = r % (self.lx * self.ly);
        let y = rem / self.lx;
        let xr = rem % self.lx;
        let x = if y % 2 == 0 { xr } else { self.lx - 1 - xr };
        Site { x, y, z }
    }

    /// Sites in raster order.
    pub fn sites(&self) -> Vec<Site> {
        (0..self.n_sites()).map(|r| self.site_of(r)).collect()
    }

    /// Fermionic mode index `raster * 4 + species`.
    pub fn mode(&self, s: Site, sp: Species) -> u32 {
        (self.raster(s) * 4 + sp.index()) as u32
    }

    pub fn step(&self, s: Site, axis: Axis) -> Option<Site> {
        let n = match axis {
            Axis::X => Site::new(s.x + 1, s.y, s.z),
            Axis::Y => Site::new(s.x, s.y + 1, s.z),
            Axis::Z => Site::new(s.x, s.y, s.z + 1),
        };
        self.contains(n).then_some(n)
    }

    /// All nearest-neighbour bonds: sites in raster order, then +x, +y, +z.
    pub fn bonds(&self) -> Vec<Bond> {
        let mut out = Vec::new();
        for s in self.sites() {
            for axis in Axis::ALL {
                if let Some(t) = self.step(s, axis) {
                    out.push(Bond { a: s, b: t, axis });
                }
            }
        }
        out
    }

    /// Bond between two sites, or a geometry error if they are not neighbours.
    pub fn bond_between(&self, p: Site, q: Site) -> Result<Bond> {
        if !self.contains(p) || !self.contains(q) {
            return Err(Error::Geometry(format!("site outside lattice: {p:?} / {q:?}")));
        }
        let (a, b) = if (p.x, p.y, p.z) <= (q.x, q.y, q.z) { (p, q) } else { (q, p) };
        for axis in Axis::ALL {
            if self.step(a, axis) == Some(b) {
                return Ok(Bond { a, b, axis });
            }
        }
        Err(Error::Geometry(format!("{p:?} and {q:?} are not nearest neighbours")))
    }
}
