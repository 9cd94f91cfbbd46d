"""Unit tests for corpora, folds, metrics, reports and the evaluation matrix."""

from __future__ import annotations

from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from stylearmor.attacks import imitate_profile
from stylearmor.errors import DegenerateCorpus, EmptyInput, InsufficientTemplates, ReportFormatError, TooFewPrograms
from stylearmor.evaluation import (
    AttackRecord,
    Counts,
    EvalReport,
    ExperimentConfig,
    defense_trainer,
    draw_archetypes,
    dump_report,
    evaluate,
    generate_corpus,
    load_corpus,
    load_report,
    read_report,
    run_matrix,
    stratified_folds,
    tally,
    violations,
    write_corpus,
    write_report,
)
from stylearmor.evaluation.corpus import from_items
from stylearmor.evaluation.templates import TEMPLATES
from stylearmor.lang.render import render
from stylearmor.model import Hyperparams, train
from stylearmor.style.attrs import extract_profile
from stylearmor.style.profile import synthesize

SMALL_HP = Hyperparams(batch_size=4, learning_rate=0.01, epochs=3, hidden_sizes=(6, 6), vocab_size=32)


@pytest.fixture(scope="module")
def corpus():
    return generate_corpus(3, 4, 3, seed=0)


@pytest.fixture
def uneven(pancakes, target_programs):
    """Ten programs for one author, seven for the other."""
    return from_items([(pancakes, "a")] * 10 + [(target_programs[0], "b")] * 7)


@pytest.fixture
def counts():
    targeted = [
        AttackRecord("s1", "a", "b", "b", (2, 20)),
        AttackRecord("s1", "a", "a", "c", (2,)),
        AttackRecord("s2", "a", "a", "b"),
    ]
    untargeted = [AttackRecord("s1", "a", "b"), AttackRecord("s2", "b", "b")]
    return tally(["a", "a", "b"], ["a", "b", "b"], targeted, untargeted)


class TestArchetypes:
    """Tests for style archetypes."""

    def test_distinct(self):
        archetypes = draw_archetypes([f"a{k}" for k in range(8)], seed=4)
        assert len({a.choices for a in archetypes}) == 8
        assert [a.choices for a in archetypes] == [a.choices for a in draw_archetypes([f"a{k}" for k in range(8)], 4)]

    def test_identical(self):
        archetypes = draw_archetypes(["x", "y", "z"], seed=4, identical=True)
        assert len({a.choices for a in archetypes}) == 1
        assert [a.author_id for a in archetypes] == ["x", "y", "z"]


class TestCorpus:
    """Tests for corpus generation and the on-disk layout."""

    def test_shape(self, corpus):
        assert corpus.authors == ("a01", "a02", "a03")
        assert len(corpus) == 12
        assert Counter(corpus.labels) == {"a01": 4, "a02": 4, "a03": 4}
        assert {a: len(p) for a, p in corpus.external.items()} == {"a01": 2, "a02": 2, "a03": 2}

    def test_programs_follow_their_archetype(self, corpus):
        archetypes = {a.author_id: a for a in draw_archetypes(list(corpus.authors), seed=0)}
        for program, author in corpus.items:
            assert violations(extract_profile(program), archetypes[author]) == []

    def test_deterministic(self, corpus):
        again = generate_corpus(3, 4, 3, seed=0)
        assert [render(p) for p, _ in again.items] == [render(p) for p, _ in corpus.items]

    def test_write_and_load(self, tmp_path, corpus):
        written = write_corpus(corpus, tmp_path)
        assert len(written) == 12 + 6
        loaded = load_corpus(tmp_path)
        assert loaded.authors == corpus.authors
        assert len(loaded) == len(corpus)
        assert {a: len(p) for a, p in loaded.external.items()} == {"a01": 2, "a02": 2, "a03": 2}
        assert loaded.skipped == ()

    def test_load_skips_bad_files(self, tmp_path, pancakes):
        for author in ("x", "y"):
            (tmp_path / author).mkdir()
            (tmp_path / author / "ok.c").write_text(render(pancakes), encoding="utf-8")
        (tmp_path / "y" / "bad.c").write_text("int main( {", encoding="utf-8")
        loaded = load_corpus(tmp_path)
        assert loaded.authors == ("x", "y")
        assert len(loaded) == 2
        assert [name for name, _ in loaded.skipped] == ["y/bad.c"]

    def test_load_nothing(self, tmp_path):
        with pytest.raises(EmptyInput):
            load_corpus(tmp_path)

    def test_one_author(self):
        with pytest.raises(DegenerateCorpus):
            generate_corpus(1, 4, 3)

    @pytest.mark.parametrize("task_count", [0, len(TEMPLATES) + 1])
    def test_task_count(self, task_count):
        with pytest.raises(InsufficientTemplates):
            generate_corpus(2, 4, task_count)


class TestFolds:
    """Tests for stratified folds."""

    def test_partition(self, uneven):
        folds = stratified_folds(uneven, kappa=3, seed=1)
        tests = sorted(i for f in folds for i in f.test)
        assert tests == list(range(len(uneven)))
        for fold in folds:
            assert not set(fold.train) & set(fold.test)
            assert len(fold.train) + len(fold.test) == len(uneven)

    def test_balanced_per_author(self, uneven):
        for seed in range(100):
            folds = stratified_folds(uneven, kappa=3, seed=seed)
            for author in uneven.authors:
                per_fold = [sum(uneven.labels[i] == author for i in f.test) for f in folds]
                assert max(per_fold) - min(per_fold) <= 1

    def test_balanced_on_random_corpora(self, pancakes):
        """Per-author test counts differ by at most one for any author sizes."""
        rng = np.random.default_rng(9)
        for seed in range(100):
            kappa = int(rng.integers(2, 6))
            sizes = rng.integers(kappa, 3 * kappa + 1, size=int(rng.integers(2, 6)))
            corpus = from_items([(pancakes, f"x{a}") for a, size in enumerate(sizes) for _ in range(int(size))])
            folds = stratified_folds(corpus, kappa, seed)
            assert sorted(i for f in folds for i in f.test) == list(range(len(corpus)))
            for author in corpus.authors:
                per_fold = [sum(corpus.labels[i] == author for i in f.test) for f in folds]
                assert max(per_fold) - min(per_fold) <= 1, (seed, author, per_fold)

    def test_seeded(self, uneven):
        assert stratified_folds(uneven, 3, seed=2) == stratified_folds(uneven, 3, seed=2)

    def test_kappa_too_small(self, uneven):
        with pytest.raises(ValueError):
            stratified_folds(uneven, kappa=1)

    def test_too_few_programs(self, uneven):
        with pytest.raises(TooFewPrograms) as info:
            stratified_folds(uneven, kappa=8)
        assert info.value.author == "b"


class TestMetrics:
    """Tests for counts and rates."""

    def test_success(self):
        assert AttackRecord("s", "a", "b", "b").success
        assert not AttackRecord("s", "a", "c", "b").success
        assert AttackRecord("s", "a", "c").success
        assert not AttackRecord("s", "a", "a").success

    def test_tally(self, counts):
        assert (counts.n_correct, counts.n_test) == (2, 3)
        assert (counts.tar_success, counts.tar_pairs) == (1, 3)
        assert (counts.tar_program_success, counts.tar_programs) == (1, 2)
        assert (counts.unt_success, counts.unt_total) == (1, 2)
        assert counts.asr_tar == pytest.approx(1 / 3)
        assert counts.asr_tar_programs == 0.5
        assert counts.asr_unt == 0.5

    def test_rates_match_a_recount(self):
        """Rates from tally agree with counting the records one at a time."""
        rng = np.random.default_rng(0)
        names = ["a", "b", "c"]

        def pick() -> str:
            return names[int(rng.integers(3))]

        for _ in range(1000):
            n = int(rng.integers(1, 6))
            truth = [pick() for _ in range(n)]
            predicted = [pick() for _ in range(n)]
            targeted = [AttackRecord(f"s{rng.integers(4)}", pick(), pick(), pick()) for _ in range(rng.integers(6))]
            untargeted = [AttackRecord(f"s{k}", pick(), pick()) for k in range(rng.integers(6))]
            counts = tally(truth, predicted, targeted, untargeted)

            correct = 0
            for t, p in zip(truth, predicted):
                if t == p:
                    correct += 1
            hits = 0
            fooled: dict[str, bool] = {}
            for r in targeted:
                won = r.predicted == r.target
                hits += won
                fooled[r.source] = fooled.get(r.source, False) or won
            escaped = 0
            for r in untargeted:
                if r.predicted != r.author:
                    escaped += 1

            assert counts.acc == pytest.approx(correct / n)
            assert counts.asr_tar == pytest.approx(hits / len(targeted) if targeted else 0.0)
            assert counts.asr_tar_programs == pytest.approx(sum(fooled.values()) / len(fooled) if fooled else 0.0)
            assert counts.asr_unt == pytest.approx(escaped / len(untargeted) if untargeted else 0.0)

    def test_involvement(self, counts):
        assert counts.manipulated == 2
        assert counts.involvement == {2: (2, 1), 20: (1, 1)}
        assert counts.involvement_rates() == {2: (1.0, 0.5), 20: (0.5, 0.5)}

    def test_sum(self, counts):
        total = counts + counts
        assert total.n_test == 6
        assert total.involvement == {2: (4, 2), 20: (2, 2)}
        assert total.acc == counts.acc

    def test_empty_rates(self):
        assert Counts().acc == 0.0
        assert Counts().asr_tar == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            tally(["a"], [])


class TestReports:
    """Tests for report files."""

    def test_dump(self, counts):
        text = dump_report(EvalReport("ropgen", "imitate", counts, phi=2, config_digest="abc"))
        lines = text.splitlines()
        assert lines[0] == "# stylearmor evaluation report"
        assert "phi=2" in lines
        assert "acc=0.6667" in lines
        assert "asr_tar=0.3333" in lines
        assert "involvement.2=2,1" in lines
        assert "involvement_rate.20=0.5000,0.5000" in lines

    def test_cell(self, counts):
        assert EvalReport("-CI", "hide", counts).cell == "-CI__hide"
        assert EvalReport("ropgen", "imitate", counts, phi=2).cell == "ropgen__imitate__phi2"

    def test_write_and_read(self, tmp_path, counts):
        report = EvalReport("baseline", "hide", counts, per_fold=(counts, Counts()), config_digest="abc")
        path = tmp_path / "reports" / f"{report.cell}.txt"
        write_report(path, report)
        assert read_report(path) == report

    @pytest.mark.parametrize(
        "text",
        [
            "defense=a\nattack=b\nn_test=many\n",
            "defense=a\nattack=b\njust words\n",
            "defense=a\n",
            "defense=a\nattack=b\nphi=x\n",
            "defense=a\nattack=b\ninvolvement.2=1\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(ReportFormatError):
            load_report(text)


class TestMatrix:
    """Tests for the experiment driver."""

    def test_unknown_attack(self, uneven):
        model = train(list(uneven.items), SMALL_HP)
        with pytest.raises(ValueError):
            evaluate(model, list(uneven.items), "bogus", profiles={})

    def test_unknown_defense(self):
        with pytest.raises(ValueError):
            defense_trainer("bogus", ExperimentConfig())

    def test_negative_phi(self):
        with pytest.raises(ValueError):
            ExperimentConfig(phis=(-1,))

    def test_digest_follows_config(self):
        assert ExperimentConfig().digest == ExperimentConfig().digest
        assert ExperimentConfig().digest != ExperimentConfig(seed=1).digest

    @pytest.mark.slow
    def test_run(self):
        corpus = generate_corpus(2, 4, 2, seed=0)
        cfg = ExperimentConfig(kappa=2, max_folds=1, certify=False, phis=(None, 1), hp=SMALL_HP)
        reports = run_matrix(corpus, ["baseline", "ropgen"], ["imitate", "hide"], cfg)
        assert [r.cell for r in reports] == [
            "baseline__imitate",
            "baseline__imitate__phi1",
            "baseline__hide",
            "baseline__hide__phi1",
            "ropgen__imitate",
            "ropgen__imitate__phi1",
            "ropgen__hide",
            "ropgen__hide__phi1",
        ]
        for report in reports:
            assert report.counts.n_test == 4
            assert len(report.per_fold) == 1
            assert report.config_digest == cfg.digest
            assert report.counts.unt_total <= report.counts.n_correct
        imitate = reports[0].counts
        assert imitate.tar_pairs == 4


DESK_HP = Hyperparams(batch_size=32, learning_rate=0.01, epochs=60, hidden_sizes=(64, 64))


def _mean(values) -> float:
    return sum(values) / len(values)


@pytest.mark.slow
class TestDeskScale:
    """Directional experiments on five-author corpora, averaged over three seeds."""

    @pytest.fixture(scope="class")
    def reports(self):
        out = []
        for seed in range(3):
            corpus = generate_corpus(5, 10, 5, seed=seed)
            hp = replace(DESK_HP, seed=seed)
            cfg = ExperimentConfig(kappa=5, seed=seed, max_folds=2, certify=False, phis=(None, 1, 3, 5), hp=hp)
            out.extend(run_matrix(corpus, ["baseline", "ropgen"], ["imitate", "hide"], cfg))
        return out

    @staticmethod
    def rate(reports, cell: str, metric: str) -> float:
        return _mean([getattr(r, metric) for r in reports if r.cell == cell])

    @pytest.mark.parametrize("phi", [1, 3, 5])
    def test_plans_stay_within_budget(self, phi):
        corpus = generate_corpus(5, 10, 5, seed=0)
        profiles = {a: synthesize(a, [extract_profile(p) for p in corpus.external[a]]) for a in corpus.authors}
        for program, author in corpus.items[::5]:
            for target, profile in profiles.items():
                if target != author:
                    assert len(imitate_profile(program, profile, budget=phi).plan) <= phi

    def test_baseline_is_accurate_and_attackable(self, reports):
        assert self.rate(reports, "baseline__imitate", "acc") >= 0.9
        assert self.rate(reports, "baseline__imitate", "asr_tar") >= 0.3

    def test_ropgen_lowers_attack_success(self, reports):
        tar = self.rate(reports, "baseline__imitate", "asr_tar") - self.rate(reports, "ropgen__imitate", "asr_tar")
        unt = self.rate(reports, "baseline__hide", "asr_unt") - self.rate(reports, "ropgen__hide", "asr_unt")
        assert tar >= 0.1
        assert unt >= 0.1

    @pytest.mark.parametrize("defense", ["baseline", "ropgen"])
    def test_success_grows_with_budget(self, reports, defense):
        rates = [self.rate(reports, f"{defense}__imitate__phi{phi}", "asr_tar") for phi in (1, 3, 5)]
        assert rates == sorted(rates)
