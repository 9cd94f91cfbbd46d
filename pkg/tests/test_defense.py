"""Unit tests for augmentation and hardened training."""

from __future__ import annotations

import numpy as np
import pytest

from stylearmor.defense import (
    AugmentationConfig,
    augment,
    augment_imitation,
    augment_perturbation,
    author_profiles,
    ropgen_gradients,
    sample_widths,
    train_pgd_at,
    train_ropgen,
)
from stylearmor.defense import trainer
from stylearmor.defense.augment import IMITATION, ORIGINAL, PERTURBATION, SEQUENCE, attribute_perturbations
from stylearmor.errors import DegenerateCorpus
from stylearmor.model import Hyperparams, train
from stylearmor.model.network import init_params
from stylearmor.style.attrs import TRANSFORMABLE_IDS, extract_profile
from stylearmor.transforms import TransformPlan, TransformStep


@pytest.fixture
def corpus(pancakes, target_programs):
    return [(pancakes, "a"), *((p, "b") for p in target_programs)]


@pytest.fixture
def hp():
    return Hyperparams(batch_size=2, learning_rate=0.01, epochs=4, hidden_sizes=(6, 6), vocab_size=32)


class TestWidths:
    """Tests for sub-network width sampling."""

    def test_range(self):
        widths = sample_widths(50, 0.8, seed=1, iteration=3)
        assert len(widths) == 50
        assert all(0.8 <= w <= 1.0 for w in widths)

    def test_keyed_by_seed_and_iteration(self):
        assert sample_widths(3, 0.8, 1, 3) == sample_widths(3, 0.8, 1, 3)
        assert sample_widths(3, 0.8, 1, 3) != sample_widths(3, 0.8, 1, 4)

    def test_none(self):
        assert sample_widths(0, 0.8, 0, 0) == []
        with pytest.raises(ValueError):
            sample_widths(-1, 0.8, 0, 0)


class TestGradients:
    """Tests for the combined gradient."""

    def test_total_is_the_sum(self):
        rng = np.random.default_rng(11)
        params = init_params([5, 8, 8, 3], rng)
        batch = (rng.normal(size=(4, 5)), np.array([0, 1, 2, 1]))
        sub_batch = (rng.normal(size=(3, 5)), np.array([2, 0, 1]))
        g = ropgen_gradients(params, batch, sub_batch, [0.8, 0.9, 0.85])
        for total, std, sub in zip(g.g_total.arrays(), g.g_std.arrays(), g.g_subnet.arrays()):
            assert np.allclose(total, std + sub, rtol=0, atol=1e-10)
        assert g.loss_subnet > 0

    def test_no_sub_batch(self):
        rng = np.random.default_rng(2)
        params = init_params([5, 4, 3], rng)
        batch = (rng.normal(size=(2, 5)), np.array([0, 2]))
        g = ropgen_gradients(params, batch, None, [0.9])
        assert g.loss_subnet == 0.0
        assert all(not a.any() for a in g.g_subnet.arrays())


class TestConfig:
    """Tests for defense configuration checks."""

    @pytest.mark.parametrize(
        "kwargs",
        [{"subnetworks": -1}, {"width_lower_bound": 1.0}, {"width_lower_bound": 0.0}, {"tau": -0.1}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            AugmentationConfig(**kwargs)


class TestAugment:
    """Tests for training-set augmentation."""

    def test_author_profiles(self, corpus):
        profiles = author_profiles(corpus)
        assert list(profiles) == ["a", "b"]
        assert profiles["b"].support == 2

    def test_imitation_keeps_labels(self, corpus):
        out = augment_imitation(corpus, {"a"})
        assert [r.origin for r in out.provenance[:3]] == [ORIGINAL] * 3
        added = out.provenance[3:]
        assert all(r.origin == IMITATION and r.label == "a" and r.detail == "b" for r in added)
        assert len(out.items) == len(out.provenance)
        assert len(added) + len(out.skipped) == 1

    def test_no_targets_adds_nothing(self, corpus):
        assert len(augment_imitation(corpus, set()).items) == 3

    def test_one_twin_per_attribute(self, pancakes, corpus):
        donors = list(author_profiles(corpus).values())
        out = attribute_perturbations(pancakes, "a", donors)
        expected = extract_profile(pancakes).applicable & TRANSFORMABLE_IDS
        assert len(out.items) + len(out.skipped) == len(expected)
        assert all(r.origin == PERTURBATION and r.label == "a" for r in out.provenance)
        ids = [int(r.detail) for r in out.provenance]
        assert ids == sorted(ids)

    def test_replayed_sequences(self, corpus):
        plan = TransformPlan((TransformStep.make(20, "while_to_for"),))
        out = augment_perturbation(corpus, sequences=[plan])
        assert [(r.source, r.origin, r.detail) for r in out.provenance] == [
            (corpus[0][0].source_name, SEQUENCE, "0")
        ]
        assert len(out.skipped) == 2
        assert all(reason == "no step applied" for _, reason in out.skipped)

    def test_without_perturbation(self, corpus):
        sets = augment(corpus, set(), perturb=False)
        assert sets.u == corpus
        assert sets.u_prime == []


class TestTraining:
    """Tests for hardened training."""

    def test_empty_u_prime_is_the_baseline(self, corpus, hp):
        hardened = train_ropgen(corpus, [], hp, AugmentationConfig(subnetworks=3))
        baseline = train(corpus, hp)
        assert hardened.history == baseline.history
        for a, b in zip(hardened.params.arrays(), baseline.params.arrays()):
            assert np.array_equal(a, b)

    def test_sub_networks_change_the_model(self, corpus, hp):
        u_prime = [(corpus[0][0], "a"), (corpus[1][0], "b")]
        hardened = train_ropgen(corpus, u_prime, hp, AugmentationConfig(subnetworks=2))
        baseline = train_ropgen(corpus, u_prime, hp, AugmentationConfig(subnetworks=0))
        assert hardened.labels == baseline.labels
        assert not all(np.array_equal(a, b) for a, b in zip(hardened.params.arrays(), baseline.params.arrays()))

    def test_updates_use_the_combined_gradient(self, corpus, hp, monkeypatch):
        """Every iteration goes through ropgen_gradients with the sampled widths."""
        calls = []

        def recording(params, batch, sub_batch, widths):
            calls.append((sub_batch is not None, len(widths)))
            return ropgen_gradients(params, batch, sub_batch, widths)

        monkeypatch.setattr(trainer, "ropgen_gradients", recording)
        u_prime = [(corpus[0][0], "a"), (corpus[1][0], "b")]
        train_ropgen(corpus, u_prime, hp, AugmentationConfig(subnetworks=2))
        assert calls
        assert set(calls) == {(True, 2)}

    def test_unknown_label_in_u_prime(self, corpus, hp):
        with pytest.raises(DegenerateCorpus):
            train_ropgen(corpus, [(corpus[0][0], "z")], hp, AugmentationConfig(subnetworks=1))

    def test_one_author(self, pancakes, hp):
        with pytest.raises(DegenerateCorpus):
            train_ropgen([(pancakes, "a")], [], hp, AugmentationConfig())

    def test_pgd_at(self, corpus, hp):
        model = train_pgd_at(corpus, hp)
        assert model.labels == ("a", "b")
        assert len(model.history) == hp.epochs
