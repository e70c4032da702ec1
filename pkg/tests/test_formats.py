import csv
import io
import random

import pydot

from helpers import random_repository, repo_from_spec
from strongdeps.analysis import dominance_graph, sensitivity_table
from strongdeps.engine import direct_dependency_graph, strong_dependencies
from strongdeps.formats import (
    dominance_to_dot,
    graph_from_csv,
    graph_from_dot,
    graph_from_json,
    graph_to_csv,
    graph_to_dot,
    graph_to_json,
    read_graph,
    sensitivity_to_csv,
)
from strongdeps.graph import StrongDepGraph
from strongdeps.model import PackageId

E2 = {"p": {"depends": [["q", "r"]]}, "r": {"conflicts": ["p"]}, "q": {}}


def test_e2_csv():
    assert graph_to_csv(strong_dependencies(repo_from_spec(E2))) == "p,q\r\n"


def test_dot_round_trip_and_validity():
    rng = random.Random(8)
    for _ in range(40):
        G = strong_dependencies(random_repository(rng))
        text = graph_to_dot(G)
        (parsed,) = pydot.graph_from_dot_data(text)
        assert len(parsed.get_edges()) == G.num_edges
        again = graph_from_dot(text)
        assert again == G
        assert graph_from_json(graph_to_json(G)) == G
        assert read_graph(text) == G


def test_csv_round_trip():
    rng = random.Random(9)
    for _ in range(40):
        G = strong_dependencies(random_repository(rng))
        again = graph_from_csv(graph_to_csv(G))
        # labels drop the version when a name is unique
        assert {(str(a), str(b)) for a, b in again.edges()} == {(G.label(a), G.label(b)) for a, b in G.edges()}


def test_odd_names_survive_dot():
    G = StrongDepGraph([PackageId('we"ird', "1:2~b"), PackageId("g++", "4")], [(PackageId('we"ird', "1:2~b"), PackageId("g++", "4"))])
    text = graph_to_dot(G)
    pydot.graph_from_dot_data(text)
    assert graph_from_dot(text) == G


def test_sensitivity_csv():
    repo = repo_from_spec(E2)
    G = strong_dependencies(repo)
    rows = list(csv.reader(io.StringIO(sensitivity_to_csv(sensitivity_table(G, direct_dependency_graph(repo)), G.label))))
    assert rows[0] == ["package", "direct", "strong", "delta"]
    assert ["q", "1", "1", "0"] in rows
    assert sensitivity_to_csv([]) == "package,direct,strong,delta\r\n"


def test_dominance_dot():
    spec = {f"p{i}": {"depends": [["q"]]} for i in range(3)}
    spec.update({"q": {"depends": [["r"]]}, "r": {"depends": [["t"]]}, "s": {"depends": [["r"]]}, "t": {}})
    G = strong_dependencies(repo_from_spec(spec))
    text = dominance_to_dot(dominance_graph(G, fuzz=50), label=G.label)
    (parsed,) = pydot.graph_from_dot_data(text)
    styles = [e.get_attributes() for e in parsed.get_edges()]
    assert {"style": "bold"} in styles
    assert {"label": '"25.00%"'} in styles
