import numpy as np
import pytest

from sectorlab import covering as cov
from sectorlab.errors import AmbiguousLiftError, MalformedWordError, NonLoopError


def sample_loop(model, windings, n_steps=64, rng=None):
    """Straight-line loop with the requested winding vector, folded to the cell."""
    L = model.lengths
    start = rng.uniform(0, L) if rng is not None else 0.25 * L
    frac = np.linspace(0, 1, n_steps + 1)[:, None]
    raw = start + frac * (np.asarray(windings) * L)
    samples = raw - L * np.floor(raw / L)
    samples[-1] = samples[0]
    bound = max(np.max(np.abs(np.asarray(windings) * L)) / n_steps, 1e-9)
    return cov.DiscretePath(samples, np.linspace(0.0, 1.0, n_steps + 1), bound * 1.5)


class TestFold:
    def test_basic(self):
        model = cov.TorusCoveringModel((1.0,))
        cp = cov.fold([2.3], model)
        assert cp.sheet == (2,)
        assert abs(cp.base[0] - 0.3) < 1e-12

    def test_origin(self):
        model = cov.TorusCoveringModel((1.0, 2.0))
        cp = cov.fold([0.0, 0.0], model)
        assert cp.sheet == (0, 0) and cp.base == (0.0, 0.0)

    def test_negative_floor(self):
        model = cov.TorusCoveringModel((1.0,))
        cp = cov.fold([-0.25], model)
        assert cp.sheet == (-1,)
        assert abs(cp.base[0] - 0.75) < 1e-12

    def test_fold_after_deck_translation_invariant(self):
        model = cov.TorusCoveringModel((1.0, 0.5))
        rng = np.random.default_rng(2)
        for _ in range(200):
            x = rng.uniform(-5, 5, size=2)
            r = rng.integers(-4, 5, size=2)
            a = cov.fold(x, model)
            b = cov.fold(x + r * model.lengths, model)
            assert np.allclose(a.base, b.base, atol=1e-12)


class TestLift:
    def test_constant_path(self):
        model = cov.TorusCoveringModel((1.0,))
        path = cov.DiscretePath(np.full((5, 1), 0.3), np.linspace(0, 1, 5), 0.1)
        lifted = cov.lift_path(path, [2], model)
        assert all(cp.sheet == (2,) for cp in lifted)

    def test_single_wrap(self):
        model = cov.TorusCoveringModel((1.0,))
        samples = np.array([[0.0], [0.35], [0.7], [0.99], [0.01]])
        path = cov.DiscretePath(samples, np.arange(5.0), 0.4)
        lifted = cov.lift_path(path, [0], model)
        assert lifted[-1].sheet == (1,)

    def test_path_then_reverse_returns(self):
        model = cov.TorusCoveringModel((1.0,))
        rng = np.random.default_rng(4)
        steps = rng.uniform(-0.3, 0.3, size=40)
        samples = np.cumsum(np.concatenate([[0.2], steps]))
        folded = (samples - np.floor(samples))[:, None]
        forward = np.vstack([folded, folded[::-1]])
        path = cov.DiscretePath(forward, np.arange(len(forward), dtype=float), 0.35)
        lifted = cov.lift_path(path, [0], model)
        assert lifted[-1].sheet == lifted[0].sheet

    def test_continuity_violation(self):
        model = cov.TorusCoveringModel((1.0,))
        path = cov.DiscretePath(np.array([[0.0], [0.4]]), np.array([0.0, 1.0]), 0.2)
        with pytest.raises(AmbiguousLiftError):
            cov.lift_path(path, [0], model)

    def test_lift_projects_back(self):
        model = cov.TorusCoveringModel((1.0, 1.5))
        rng = np.random.default_rng(8)
        base = rng.uniform(0, 1, size=(30, 2)) * model.lengths
        smooth = np.cumsum(rng.uniform(-0.2, 0.2, size=(30, 2)), axis=0) + base[0]
        folded = smooth - model.lengths * np.floor(smooth / model.lengths)
        path = cov.DiscretePath(folded, np.arange(30.0), 0.45)
        lifted = cov.lift_path(path, [1, -2], model)
        for cp, sample in zip(lifted, folded):
            assert np.array_equal(np.asarray(cp.base), sample)


class TestWinding:
    def test_contractible(self):
        model = cov.TorusCoveringModel((1.0,))
        path = sample_loop(model, [0])
        assert cov.winding_class(path, model).tolist() == [0]

    def test_single_wrap(self):
        model = cov.TorusCoveringModel((1.0,))
        assert cov.winding_class(sample_loop(model, [1]), model).tolist() == [1]

    def test_additive_under_concatenation(self):
        model = cov.TorusCoveringModel((1.0, 2.0))
        rng = np.random.default_rng(12)
        for _ in range(30):
            m = rng.integers(-3, 4, size=2)
            n = rng.integers(-3, 4, size=2)
            p1 = sample_loop(model, m, rng=rng)
            start = p1.samples[0]
            p2 = sample_loop(model, n)
            shift = start - p2.samples[0]
            samples = p2.samples + shift
            samples -= model.lengths * np.floor(samples / model.lengths)
            samples[-1] = samples[0]
            p2 = cov.DiscretePath(samples, p2.times + p1.times[-1] - p2.times[0], p2.continuity_bound)
            both = cov.concat_paths(p1, p2)
            assert np.array_equal(
                cov.winding_class(both, model),
                cov.winding_class(p1, model) + cov.winding_class(p2, model),
            )

    def test_non_loop_rejected(self):
        model = cov.TorusCoveringModel((1.0,))
        path = cov.DiscretePath(np.array([[0.1], [0.2]]), np.array([0.0, 1.0]), 0.3)
        with pytest.raises(NonLoopError):
            cov.winding_class(path, model)

    def test_resampling_invariance(self):
        model = cov.TorusCoveringModel((1.0,))
        rng = np.random.default_rng(21)
        for _ in range(20):
            w = int(rng.integers(-3, 4))
            loop = sample_loop(model, [w], n_steps=32, rng=rng)
            for factor in (2, 4):
                refined = cov.resample_loop(loop, factor, model)
                assert cov.winding_class(refined, model).tolist() == [w]


class TestDeck:
    def test_identity_and_inverse(self):
        cp = cov.CoveringPoint((0.3,), (2,))
        assert cov.deck_transform([0], cp) == cp
        assert cov.deck_transform([-3], cov.deck_transform([3], cp)) == cp

    def test_composition(self):
        cp = cov.CoveringPoint((0.1, 0.7), (0, -1))
        one = cov.deck_transform([2, 1], cov.deck_transform([1, -1], cp))
        two = cov.deck_transform([3, 0], cp)
        assert one == two

    def test_free_action(self):
        rng = np.random.default_rng(31)
        model = cov.TorusCoveringModel((1.0, 1.0, 1.0))
        for _ in range(1000):
            cp = cov.CoveringPoint(tuple(rng.uniform(0, 1, 3)), tuple(rng.integers(-5, 6, 3)))
            gvec = rng.integers(-5, 6, 3)
            moved = cov.deck_transform(gvec, cp)
            assert (moved == cp) == bool(np.all(gvec == 0))


class TestPathCsv:
    def test_read(self, tmp_path):
        model = cov.TorusCoveringModel((1.0,))
        f = tmp_path / "path.csv"
        f.write_text("t,x_1\n0.0,0.0\n0.5,0.4\n1.0,0.8\n1.5,1.2\n")
        path = cov.read_path_csv(f, model, 0.45)
        lifted = cov.lift_path(path, [0], model)
        assert lifted[-1].sheet == (1,)

    def test_wrong_columns(self, tmp_path):
        model = cov.TorusCoveringModel((1.0, 1.0))
        f = tmp_path / "bad.csv"
        f.write_text("0.0,0.1\n")
        with pytest.raises(MalformedWordError):
            cov.read_path_csv(f, model, 0.3)


class TestRandomizedPropertySuite:
    def test_ten_thousand_cases(self):
        # free action, lift uniqueness, projection, winding resampling
        rng = np.random.default_rng(99)
        model = cov.TorusCoveringModel((1.0, 0.75))
        failures = 0
        for _ in range(10_000 // 4):
            x = rng.uniform(-4, 4, 2)
            cp = cov.fold(x, model)
            if not np.allclose(cp.unfolded(model), x, atol=1e-10):
                failures += 1
            gvec = rng.integers(-3, 4, 2)
            moved = cov.deck_transform(gvec, cp)
            if (moved == cp) != bool(np.all(gvec == 0)):
                failures += 1
            w = rng.integers(-2, 3, 2)
            loop = sample_loop(model, w, n_steps=24, rng=rng)
            if not np.array_equal(cov.winding_class(loop, model), w):
                failures += 1
            lifted_a = cov.lift_path(loop, [1, 1], model)
            lifted_b = cov.lift_path(loop, [1, 1], model)
            if any(a.sheet != b.sheet for a, b in zip(lifted_a, lifted_b)):
                failures += 1
        assert failures == 0
