import numpy as np
import pytest

from sectorlab import ring, sectors
from sectorlab.errors import AliasingError

GRID = ring.Grid1D(256, 1.0)


@pytest.fixture(scope="module")
def family():
    return sectors.extract_sector_kernels(GRID, 0.2, 15, 64)


class TestSectorKernels:
    def test_matrix_values(self):
        k = sectors.sector_kernel_matrix(GRID, 2, 0.3)
        x = GRID.points
        expected = ring.free_line_kernel(x[3] + 2.0, x[7], 0.3)
        assert abs(k[3, 7] - expected) < 1e-15

    def test_weight_through_representation(self):
        assert abs(sectors.sector_weight(0.7, 3) - np.exp(-3j * 0.7)) < 1e-14

    def test_weighted_sum_reproduces_spectral_action(self):
        psi = ring.gaussian_ring_packet(GRID, 0.5, 0.07)
        theta, t = 1.3, 0.1
        total = np.zeros((256, 256), dtype=complex)
        for n in range(-12, 13):
            total += sectors.sector_weight(theta, n) * sectors.sector_kernel_matrix(GRID, n, t)
        spectral = ring.spectral_propagate_ring(psi, theta, t)
        assert ring.l2_distance(ring.apply_kernel(total, psi), spectral) < 1e-8

    def test_delta_image_analysis(self):
        # at tiny t the zero sector acts like the evolution itself (near identity
        # on a broad packet) and displaced sectors push mass out of the cell
        psi = ring.gaussian_ring_packet(GRID, 0.5, 0.07)
        t = 0.004
        k0 = sectors.sector_kernel_matrix(GRID, 0, t)
        spectral = ring.spectral_propagate_ring(psi, 0.0, t)
        assert ring.l2_distance(ring.apply_kernel(k0, psi), spectral) < 1e-6
        assert ring.apply_kernel(sectors.sector_kernel_matrix(GRID, 1, t), psi).norm() < 1e-6
        broad = ring.gaussian_ring_packet(GRID, 0.5, 0.12)
        overlap = abs(
            np.sum(np.conj(broad.amplitudes) * ring.apply_kernel(k0, broad).amplitudes)
            * GRID.spacing
        )
        assert overlap > 0.99


class TestExtraction:
    def test_aliasing_guard(self):
        with pytest.raises(AliasingError):
            sectors.extract_sector_kernels(GRID, 0.2, 15, 30)

    def test_free_identification(self, family):
        report = sectors.check_free_identification(family, 5, tolerance=1e-8)
        assert report.passed

    def test_offset_independence(self):
        report = sectors.check_offset_independence(GRID, 0.2, 15, 64, tolerance=1e-8)
        assert report.passed

    def test_heldout_reconstruction(self, family):
        report = sectors.check_heldout_reconstruction(family, 1.2345, tolerance=1e-8)
        assert report.passed

    def test_weight_recovery(self):
        fam = sectors.extract_sector_kernels(GRID, 0.15, 15, 64)
        report = sectors.recover_weights(fam, 0.8765, 5, tolerance=1e-10)
        assert report.passed
        assert report.details["n_fit"] >= 11

    def test_reconstruct_at_training_angle(self, family):
        target = ring.spectral_ring_kernel(GRID, 2 * np.pi * 7 / 64, 0.2)
        packets = sectors.reference_packets(GRID)
        d = sectors.kernel_action_distance(family.reconstruct(2 * np.pi * 7 / 64), target, packets)
        assert d < 1e-8


class TestSectorComposition:
    def test_collected_windings_reproduce_direct(self):
        for c in (0, 1, -2):
            report = sectors.check_sector_composition(
                GRID, 0.0, 0.1, 0.25, winding=c, sum_range=18, tolerance=1e-7
            )
            assert report.passed, (c, report.max_defect)
