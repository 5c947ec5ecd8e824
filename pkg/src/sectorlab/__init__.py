"""sectorlab: homotopy-sector decompositions of quantum propagators, numerically.

Subpackages by concern: groups (words and unitary weights), covering (torus
cover, lifting, winding), ring (three independent circle evolutions plus the
propagator axioms), sectors (winding-kernel extraction and uniqueness),
crystal (Bloch bands and the lattice realization), cli (batch harness).
"""

from .covering import (
    CoveringPoint,
    DiscretePath,
    TorusCoveringModel,
    deck_transform,
    fold,
    lift_path,
    winding_class,
)
from .groups import (
    GroupPresentation,
    GroupWord,
    UnitaryRep,
    bloch_scalar_rep,
    braid_scalar_rep,
    check_rep_homomorphism,
    check_rep_unitary,
    check_yang_baxter,
    concat,
    f2_to_s3_rep,
    inverse_word,
    reduce_word,
    rep_eval,
    s3_standard_rep,
)
from .ring import (
    Grid1D,
    Wavepacket,
    action_of_path,
    free_line_kernel,
    gaussian_ring_packet,
    image_sum_propagate_ring,
    spectral_propagate_ring,
    split_step_propagate_line,
)

__version__ = "0.1.0"
