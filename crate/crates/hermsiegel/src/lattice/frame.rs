use super::{EmbeddedLattice, Mat};
use crate::error::{Error, Result};
use crate::ring::{Echelon, FElem, ResidueElem, ResidueRing};

/// A full-rank reference lattice used as a coordinate system: vectors of the
/// lattice become tuples in `O_F^n`, and sublattices `M` with `p^k L ⊆ M ⊆ L`
/// become submodules of `(O_F/p^k)^n`.
#[derive(Clone, Debug)]
pub struct Frame {
    lattice: EmbeddedLattice,
    inv: Mat,
}

impl Frame {
    pub fn new(lattice: EmbeddedLattice) -> Result<Self> {
        if !lattice.is_full_rank() {
            return Err(Error::AmbientMismatch);
        }
        let inv = lattice.basis().inverse().ok_or(Error::DegenerateLattice)?;
        Ok(Frame { lattice, inv })
    }

    pub fn lattice(&self) -> &EmbeddedLattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.rank()
    }

    pub fn coords(&self, x: &[FElem]) -> Vec<FElem> {
        self.inv.mul_vec(x)
    }

    /// Coordinates modulo `p^k`; fails with `NonIntegralElement` if `x` is outside the frame.
    pub fn residue_coords(&self, x: &[FElem], ring: &ResidueRing) -> Result<Vec<ResidueElem>> {
        self.coords(x).iter().map(|c| ring.reduce(c)).collect()
    }

    /// Image of `m` (a sublattice of the frame) in `L / p^k L`.
    pub fn echelon_of(&self, m: &EmbeddedLattice, ring: &ResidueRing) -> Result<Echelon> {
        let rows = m
            .basis()
            .columns()
            .iter()
            .map(|c| self.residue_coords(c, ring).map_err(|_| Error::NotContained))
            .collect::<Result<Vec<_>>>()?;
        Ok(Echelon::new(*ring, self.dim(), rows))
    }

    /// The ambient vector with the given (lifted) coordinates.
    pub fn lift(&self, y: &[ResidueElem], ring: &ResidueRing) -> Vec<FElem> {
        let c: Vec<FElem> = y.iter().map(|&e| ring.lift(e)).collect();
        self.lattice.basis().mul_vec(&c)
    }
}
