import math

import numpy as np
import pytest

from subevents.corpus import Corpus, Tweet
from subevents.embed import EmbeddingStore, OovPolicy, load_vectors
from subevents.errors import InputFormatError
from subevents.extract import Candidate, CandidateKind
from subevents.rank import (
    NULL_SCORE,
    load_ontology,
    rank_baseline_overlap,
    rank_candidates,
    read_ranked,
    top_k,
    write_ranked,
)


def nv(first, second, freq=1):
    return Candidate(CandidateKind.NOUN_VERB_PAIR, first, second, frequency=freq)


def ph(first, second, freq=1):
    return Candidate(CandidateKind.PHRASE, first, second, frequency=freq)


def _store(vectors, dim):
    return EmbeddingStore(
        dim=dim, vectors={w: np.array(v, dtype=float) for w, v in vectors.items()}
    )


@pytest.fixture
def axis_store():
    # Words on coordinate axes so candidate/term cosines are hand-computable.
    return _store(
        {
            "north": [1.0, 0.0, 0.0],
            "east": [0.0, 1.0, 0.0],
            "upww": [0.0, 0.0, 1.0],
            "mixx": [1.0, 1.0, 0.0],
        },
        dim=3,
    )


class TestLoadOntology:
    def test_custom_file(self, tmp_path, axis_store):
        path = tmp_path / "terms.txt"
        path.write_text("# crisis terms\nNorth\n\neast mixx\n", encoding="utf-8")
        ontology = load_ontology(path, axis_store)
        assert ontology.terms == ("north", "east mixx")
        assert len(ontology.usable_indices) == 2

    def test_multiword_term_composes(self, tmp_path, axis_store):
        path = tmp_path / "terms.txt"
        path.write_text("north east\n", encoding="utf-8")
        ontology = load_ontology(path, axis_store)
        expected = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
        assert np.allclose(ontology.term_vectors[0].values, expected)

    def test_empty_file_fatal(self, tmp_path, axis_store):
        path = tmp_path / "terms.txt"
        path.write_text("# only comments\n\n", encoding="utf-8")
        with pytest.raises(InputFormatError):
            load_ontology(path, axis_store)

    def test_all_terms_oov_fatal(self, tmp_path, axis_store):
        path = tmp_path / "terms.txt"
        path.write_text("absent\nmissing\n", encoding="utf-8")
        with pytest.raises(InputFormatError):
            load_ontology(path, axis_store)

    def test_partial_oov_terms_kept_but_unusable(self, tmp_path, axis_store):
        path = tmp_path / "terms.txt"
        path.write_text("north\nabsent\n", encoding="utf-8")
        ontology = load_ontology(path, axis_store)
        assert len(ontology) == 2
        assert ontology.usable_indices == (0,)

    def test_bundled_list_loads(self, fixtures_dir):
        store = load_vectors(fixtures_dir / "worked_vectors.txt")
        ontology = load_ontology(None, store)
        # The bundled crisis vocabulary is substantial and contains the
        # terms the worked fixtures embed.
        assert len(ontology) >= 60
        assert "infectious disease" in ontology.terms


class TestRankCandidates:
    def _ontology(self, tmp_path, store, lines):
        path = tmp_path / "terms.txt"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return load_ontology(path, store)

    def test_max_cosine_and_best_term(self, tmp_path, axis_store):
        ontology = self._ontology(tmp_path, axis_store, ["north", "east"])
        ranked = rank_candidates([nv("mixx", "upww")], ontology, axis_store)
        # mixx + upww = (1, 1, 1)/sqrt(3); cosine with each axis term is
        # 1/sqrt(3); the tie picks the first term listed.
        assert ranked[0].score == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-12)
        assert ranked[0].best_term == "north"

    def test_scores_order_ranking(self, tmp_path, axis_store):
        ontology = self._ontology(tmp_path, axis_store, ["north"])
        ranked = rank_candidates(
            [nv("east", "east"), nv("north", "north"), nv("north", "east")],
            ontology,
            axis_store,
        )
        assert [rc.candidate.words for rc in ranked] == [
            ("north", "north"),
            ("north", "east"),
            ("east", "east"),
        ]
        assert [rc.rank for rc in ranked] == [1, 2, 3]
        assert ranked[0].score == pytest.approx(1.0, abs=1e-12)
        assert ranked[1].score == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)
        assert ranked[2].score == pytest.approx(0.0, abs=1e-12)

    def test_tie_break_frequency_then_lexicographic(self, tmp_path, axis_store):
        ontology = self._ontology(tmp_path, axis_store, ["north"])
        ranked = rank_candidates(
            [
                nv("north", "north", freq=2),
                nv("north", "north", freq=9),
                ph("north", "north", freq=9),
            ],
            ontology,
            axis_store,
        )
        # Same score 1.0: frequency 9 beats 2; within frequency 9 the
        # noun-verb kind string "nv" sorts before "phrase".
        assert [(rc.candidate.frequency, rc.candidate.kind.value) for rc in ranked] == [
            (9, "nv"), (9, "phrase"), (2, "nv"),
        ]

    def test_null_candidates_sink_with_sentinel(self, tmp_path, axis_store):
        ontology = self._ontology(tmp_path, axis_store, ["north"])
        ranked = rank_candidates(
            [nv("absent", "missing"), nv("east", "east")], ontology, axis_store
        )
        assert ranked[0].candidate.words == ("east", "east")
        assert ranked[1].score == NULL_SCORE
        assert ranked[1].best_term is None
        assert ranked[1].rank == 2

    def test_null_terms_excluded_from_max(self, tmp_path, axis_store):
        ontology = self._ontology(tmp_path, axis_store, ["absent", "north"])
        ranked = rank_candidates([nv("north", "north")], ontology, axis_store)
        assert ranked[0].best_term == "north"
        assert ranked[0].score == pytest.approx(1.0, abs=1e-12)

    def test_negative_cosines_preserved(self, tmp_path):
        store = _store({"neg": [-1.0, 0.0], "pos": [1.0, 0.0]}, dim=2)
        path = tmp_path / "terms.txt"
        path.write_text("pos\n", encoding="utf-8")
        ontology = load_ontology(path, store)
        ranked = rank_candidates([nv("neg", "neg")], ontology, store)
        assert ranked[0].score == pytest.approx(-1.0, abs=1e-12)


class TestBaselineOverlap:
    def _corpus(self):
        return Corpus(tweets=(
            Tweet(id="1", raw_text="", tokens=("road", "blocked", "tree")),
            Tweet(id="2", raw_text="", tokens=("road", "blocked")),
            Tweet(id="3", raw_text="", tokens=("road", "clear")),
            Tweet(id="4", raw_text="", tokens=("tree", "fell")),
        ))

    def test_hand_counted_overlap(self):
        # road in {1,2,3}, blocked in {1,2}: overlap 2 / min(3,2) = 1.0,
        # discounted by log(1+2).
        ranked = rank_baseline_overlap([nv("road", "blocked")], self._corpus())
        assert ranked[0].score == pytest.approx(math.log(3.0), abs=1e-12)
        assert ranked[0].best_term is None

    def test_undiscounted(self):
        ranked = rank_baseline_overlap(
            [nv("road", "blocked")], self._corpus(), discount="none"
        )
        assert ranked[0].score == pytest.approx(1.0, abs=1e-12)

    def test_partial_overlap(self):
        # tree in {1,4}, road in {1,2,3}: overlap 1 / min(2,3) = 0.5.
        ranked = rank_baseline_overlap([nv("tree", "road")], self._corpus(), discount="none")
        assert ranked[0].score == pytest.approx(0.5, abs=1e-12)

    def test_unknown_word_scores_zero(self):
        ranked = rank_baseline_overlap([nv("road", "absent")], self._corpus())
        assert ranked[0].score == 0.0

    def test_duplicate_tokens_in_tweet_count_once(self):
        corpus = Corpus(tweets=(
            Tweet(id="1", raw_text="", tokens=("fire", "fire", "spreads")),
            Tweet(id="2", raw_text="", tokens=("fire",)),
        ))
        ranked = rank_baseline_overlap([nv("fire", "spreads")], corpus, discount="none")
        # fire in {1,2}, spreads in {1}: 1 / min(2,1) = 1.0.
        assert ranked[0].score == pytest.approx(1.0, abs=1e-12)

    def test_unknown_discount_rejected(self):
        with pytest.raises(ValueError):
            rank_baseline_overlap([], self._corpus(), discount="sqrt")

    def test_ordering_matches_scores(self):
        ranked = rank_baseline_overlap(
            [nv("tree", "road"), nv("road", "blocked"), nv("road", "absent")],
            self._corpus(),
        )
        scores = [rc.score for rc in ranked]
        assert scores == sorted(scores, reverse=True)
        assert [rc.rank for rc in ranked] == [1, 2, 3]


class TestTopK:
    def _ranked(self, axis_store, tmp_path):
        path = tmp_path / "terms.txt"
        path.write_text("north\n", encoding="utf-8")
        ontology = load_ontology(path, axis_store)
        cands = [nv("north", "north"), nv("north", "east"), nv("east", "east")]
        return rank_candidates(cands, ontology, axis_store)

    def test_prefix(self, axis_store, tmp_path):
        ranked = self._ranked(axis_store, tmp_path)
        assert [rc.rank for rc in top_k(ranked, 2)] == [1, 2]

    def test_k_larger_than_list(self, axis_store, tmp_path):
        ranked = self._ranked(axis_store, tmp_path)
        assert len(top_k(ranked, 100)) == 3

    def test_k_below_one_rejected(self, axis_store, tmp_path):
        ranked = self._ranked(axis_store, tmp_path)
        with pytest.raises(ValueError):
            top_k(ranked, 0)


class TestRankedCsv:
    def _ranked(self, axis_store, tmp_path):
        path = tmp_path / "terms.txt"
        path.write_text("north\n", encoding="utf-8")
        ontology = load_ontology(path, axis_store)
        return rank_candidates(
            [nv("north", "east", 4), nv("absent", "missing")], ontology, axis_store
        )

    def test_round_trip_exact(self, axis_store, tmp_path):
        ranked = self._ranked(axis_store, tmp_path)
        path = tmp_path / "ranked.csv"
        write_ranked(ranked, path)
        back = read_ranked(path)
        assert back == ranked

    def test_bytes_stable(self, axis_store, tmp_path):
        ranked = self._ranked(axis_store, tmp_path)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        write_ranked(ranked, a)
        write_ranked(ranked, b)
        assert a.read_bytes() == b.read_bytes()

    def test_null_best_term_serialized_empty(self, axis_store, tmp_path):
        ranked = self._ranked(axis_store, tmp_path)
        path = tmp_path / "ranked.csv"
        write_ranked(ranked, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[-1].endswith(",")  # empty best_term column

    def test_header_and_rows_validated(self, tmp_path):
        path = tmp_path / "ranked.csv"
        path.write_text("nope\n", encoding="utf-8")
        with pytest.raises(InputFormatError):
            read_ranked(path)
        header = "rank,kind,first,second,frequency,score,best_term"
        path.write_text(header + "\n1,nv,a,b\n", encoding="utf-8")
        with pytest.raises(InputFormatError):
            read_ranked(path)
        path.write_text(header + "\none,nv,a,b,1,0.5,\n", encoding="utf-8")
        with pytest.raises(InputFormatError):
            read_ranked(path)
