import random
import re

import pydot
import pytest
from hypothesis import given, settings, strategies as st

from corpus_files import GOLDEN
from modelgen import random_model
from vucfm_kit.derivation import DerivationError, select_sucfm, select_vaucfm
from vucfm_kit.dsl import parse
from vucfm_kit.export import (
    DiagramActor,
    DiagramEdge,
    DiagramUseCase,
    ExportError,
    UseCaseDiagram,
    render_dot,
    render_plantuml,
    to_usecase_diagram,
)
from vucfm_kit.model import FeatureKind, RelationKind

SPECIFIC = """vucfm S level specific of F root M {{
  actor User;
  actor Admin;
  usecase U {{ version V1 {{ revision R1 {{
    feature Ops {{ feature Pop; feature IsEmpty; feature Push; feature Clear; }}
  }} }} }}
{relations}}}
"""


def specific(relations):
    return parse(SPECIFIC.format(relations="".join(f"  {r};\n" for r in relations)))


@pytest.fixture(scope="module")
def r2stack(set_model):
    return select_sucfm(select_vaucfm(set_model, "Set.Stack.V2"), "Set.Stack.V2.R2")


def brute_force_counts(model):
    """Re-derive node and edge counts straight from the relation list."""
    interact = [r for r in model.relations if r.kind.name.endswith("INTERACT")]
    actors = {str(r.source) for r in interact}
    features = {str(r.target) for r in interact}
    uc_edges = {
        (str(r.source), str(r.target), r.kind)
        for r in model.relations
        if r.kind in (RelationKind.INCLUDE, RelationKind.EXTEND, RelationKind.IS_A)
        and str(r.source) in features and str(r.target) in features
    }
    actor_edges = {(str(r.source), str(r.target), r.kind) for r in interact}
    return len(actors), len(features), len(actor_edges) + len(uc_edges)


def test_r2stack_diagram(r2stack):
    d = to_usecase_diagram(r2stack)
    assert [a.name for a in d.actors] == ["User"]
    assert sorted(u.name for u in d.usecases) == sorted(["Push", "Pop", "IsFull", "IsEmpty", "Top"])
    assert len(d.edges) == 5
    assert {e.kind for e in d.edges} == {"inout"}
    assert all(e.source == d.actors[0].id for e in d.edges)
    assert d.warnings == []


def test_r2stack_golden_files(r2stack):
    d = to_usecase_diagram(r2stack)
    for name, text in [
        ("r2stack.dot", render_dot(d)),
        ("r2stack.puml", render_plantuml(d)),
        ("r2stack.clusters.dot", render_dot(d, clusters=True)),
        ("r2stack.clusters.puml", render_plantuml(d, clusters=True)),
    ]:
        assert text == (GOLDEN / name).read_text(encoding="utf-8"), name
    assert render_dot(to_usecase_diagram(r2stack)) == render_dot(d)


def test_r2stack_dot_structure(r2stack):
    (graph,) = pydot.graph_from_dot_data(render_dot(to_usecase_diagram(r2stack)))
    assert len(graph.get_nodes()) == 6
    assert len(graph.get_edges()) == 5


def test_no_interactions_gives_empty_diagram_with_warning():
    d = to_usecase_diagram(specific([]))
    assert d.actors == [] and d.usecases == [] and d.edges == []
    assert [w.code for w in d.warnings] == ["X001"]
    assert render_dot(d) == "digraph usecase {\n}\n"
    assert render_plantuml(d) == "@startuml\n@enduml\n"


def test_include_edge_between_interacting_use_cases():
    rels = [
        "User in-interact M.U.V1.R1.Ops.Pop",
        "User out-interact M.U.V1.R1.Ops.IsEmpty",
        "M.U.V1.R1.Ops.Pop include M.U.V1.R1.Ops.IsEmpty",
        "M.U.V1.R1.Ops.Push extend M.U.V1.R1.Ops.Clear",
        "M.U.V1.R1.Ops.Pop is-a M.U.V1.R1.Ops.Push",
    ]
    m = specific(rels)
    d = to_usecase_diagram(m)
    ids = {u.name: u.id for u in d.usecases}
    assert set(ids) == {"Pop", "IsEmpty"}
    assert DiagramEdge(ids["Pop"], ids["IsEmpty"], "include") in d.edges
    n_actors, n_uc, n_edges = brute_force_counts(m)
    assert (len(d.actors), len(d.usecases), len(d.edges)) == (n_actors, n_uc, n_edges) == (1, 2, 3)
    puml = render_plantuml(d)
    assert "UC2 ..> UC1 : <<include>>" in puml


def test_actor_edge_directions():
    m = specific([
        "User in-interact M.U.V1.R1.Ops.Push",
        "User out-interact M.U.V1.R1.Ops.Pop",
        "Admin inout-interact M.U.V1.R1.Ops.Clear",
        "M.U.V1.R1.Ops.Push is-a M.U.V1.R1.Ops.Clear",
    ])
    d = to_usecase_diagram(m)
    puml = render_plantuml(d).splitlines()
    alias = {ln.split('"')[1]: ln.split()[-1] for ln in puml if ln.startswith(("actor", "usecase"))}
    assert f"{alias['Admin']} <--> {alias['Clear']}" in puml
    assert f"{alias['User']} --> {alias['Push']}" in puml
    assert f"{alias['User']} <-- {alias['Pop']}" in puml
    assert f"{alias['Push']} --|> {alias['Clear']}" in puml
    dot = render_dot(d)
    assert '"uc_M_U_V1_R1_Ops_Pop" -> "actor_User";' in dot
    assert '"actor_User" -> "uc_M_U_V1_R1_Ops_Push";' in dot
    assert '"actor_Admin" -> "uc_M_U_V1_R1_Ops_Clear" [dir=both];' in dot
    assert '"uc_M_U_V1_R1_Ops_Push" -> "uc_M_U_V1_R1_Ops_Clear" [arrowhead=empty];' in dot
    assert 'shape=box' in dot and 'shape=ellipse' in dot


def test_dot_styles_for_include_and_extend():
    d = UseCaseDiagram(
        usecases=[DiagramUseCase("a", "A"), DiagramUseCase("b", "B")],
        edges=[DiagramEdge("a", "b", "include"), DiagramEdge("b", "a", "extend")],
    )
    dot = render_dot(d)
    assert '"a" -> "b" [style=dashed, label="<<include>>"];' in dot
    assert '"b" -> "a" [style=dashed, label="<<extend>>"];' in dot
    assert "UC2 ..> UC1 : <<extend>>" in render_plantuml(d)


def test_display_name_collisions_get_parent_suffix():
    m = parse("""vucfm S level specific of F root M {
      actor User;
      usecase U { version V1 { revision R1 {
        feature A { feature Run; } feature B { feature Run; }
      } } }
      User in-interact M.U.V1.R1.A.Run;
      User in-interact M.U.V1.R1.B.Run;
    }""")
    d = to_usecase_diagram(m)
    assert sorted(u.name for u in d.usecases) == ["Run (A)", "Run (B)"]
    assert len({u.id for u in d.usecases}) == 2


def test_labels_are_escaped():
    d = UseCaseDiagram(actors=[DiagramActor("a", 'Say "hi"')])
    (graph,) = pydot.graph_from_dot_data(render_dot(d))
    assert len(graph.get_nodes()) == 1
    assert 'actor "Say \\"hi\\"" as A1' in render_plantuml(d)


def test_rejects_non_specific(set_model):
    with pytest.raises(ExportError) as info:
        to_usecase_diagram(set_model)
    assert info.value.codes == ["V020"]


def check_diagram(model):
    d = to_usecase_diagram(model)
    n_actors, n_uc, n_edges = brute_force_counts(model)
    assert (len(d.actors), len(d.usecases), len(d.edges)) == (n_actors, n_uc, n_edges)
    ids = d.node_ids()
    assert all(e.source in ids and e.target in ids for e in d.edges)
    for clusters in (False, True):
        dot = render_dot(d, clusters=clusters)
        assert dot == render_dot(d, clusters=clusters)
        (graph,) = pydot.graph_from_dot_data(dot)
        names = {n.get_name().strip('"') for n in graph.get_nodes()}
        for sub in graph.get_subgraphs():
            names |= {n.get_name().strip('"') for n in sub.get_nodes()}
        assert names == ids
        assert len(graph.get_edges()) == len(d.edges)
        rendered = {n for e in graph.get_edges() for n in (e.get_source().strip('"'), e.get_destination().strip('"'))}
        assert rendered <= names
        puml = render_plantuml(d, clusters=clusters)
        assert puml.startswith("@startuml\n") and puml.endswith("@enduml\n")
        declared = set(re.findall(r" as (\w+)$", puml, re.M))
        used = set(re.findall(r"^\s*(\w+) [-.<>|]+ (\w+)", puml, re.M))
        assert {x for pair in used for x in pair} <= declared


def test_corpus_specific_models(set_model):
    for v in set_model.paths(FeatureKind.VERSION):
        fam = select_vaucfm(set_model, v)
        for r in fam.paths(FeatureKind.REVISION):
            check_diagram(select_sucfm(fam, r))


@settings(max_examples=12, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_random_specific_models(seed):
    m = random_model(random.Random(seed), n_relations=12)
    for v in m.paths(FeatureKind.VERSION):
        fam = select_vaucfm(m, v)
        for r in fam.paths(FeatureKind.REVISION):
            try:
                check_diagram(select_sucfm(fam, r))
            except DerivationError:
                continue
