import pytest

from idtree.corpus import write_edge_file, write_metadata_file
from idtree.synth import gen_random_corpus, toy_corpus


@pytest.fixture(scope="session")
def toy():
    """Six-paper walkthrough corpus: P cited by p1..p5 with cross-citations."""
    return toy_corpus()


@pytest.fixture(scope="session")
def small_random_corpus():
    return gen_random_corpus(300, years=(1990, 2005), mean_refs=2.5, seed=11)


@pytest.fixture
def corpus_files(tmp_path):
    """Write a corpus to edge/meta files in tmp_path; returns the two paths."""

    def write(corpus, prefix="corpus"):
        edges = tmp_path / f"{prefix}_edges.tsv"
        meta = tmp_path / f"{prefix}_meta.jsonl"
        write_edge_file(corpus, edges)
        write_metadata_file(corpus, meta)
        return edges, meta

    return write
