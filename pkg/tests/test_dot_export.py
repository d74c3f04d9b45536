"""DOT text for links, chamber graphs, walls and block graphs."""
import networkx as nx

from app.cli.dot_export import (
    block_graph_dot,
    chamber_graph_dot,
    export_dot,
    link_graph_dot,
    quote,
    wall_dot,
)
from app.services.building.building_service import building_service
from app.services.davis.davis_service import davis_service
from app.services.polygonal.polygonal_service import polygonal_service


def test_path_graph_text():
    assert export_dot(nx.path_graph(3)) == (
        'graph "G" {\n'
        '\tn0 [label="0"];\n'
        '\tn1 [label="1"];\n'
        '\tn2 [label="2"];\n'
        '\tn0 -- n1;\n'
        '\tn1 -- n2;\n'
        '}\n'
    )


def test_text_is_stable():
    g = nx.Graph([("b", "a"), ("c", "a")])
    h = nx.Graph([("a", "c"), ("a", "b")])
    assert export_dot(g) == export_dot(h)


def test_quote_escapes():
    assert quote('a"b') == '"a\\"b"'
    assert quote("x\\y") == '"x\\\\y"'


def test_link_of_square_torus(square_torus):
    text = link_graph_dot(polygonal_service.link_graph(square_torus, "v0.0"))
    assert text.startswith('graph "link v0.0" {')
    assert text.count(" -- ") == 4
    assert text.count('polygon="s0.0"') == 4
    assert 'label="h0.0+"' in text
    assert 'label="u0.0-"' in text


def test_chamber_graph_of_tree(free_z2_z2):
    text = chamber_graph_dot(building_service.chamber_graph(free_z2_z2, 1))
    assert text.count(" -- ") == 2
    assert text.count('rank="1"') == 2
    assert 'label="a"' in text


def test_empty_wall():
    assert wall_dot(None, None) == 'graph "wall" {\n}\n'


def test_wall_of_square_torus(square_torus):
    wall = polygonal_service.wall_of(polygonal_service.compute_walls(square_torus), ("h0.0", 1))
    text = wall_dot(square_torus, wall)
    assert text.count("\tn0 -- n1;") == 2
    assert 'rank="2"' in text


def test_block_graph(cycle_m2):
    ball = davis_service.build_davis_ball(cycle_m2, 2)
    text = block_graph_dot(davis_service.chamber_graph(ball), cycle_m2.names)
    assert text.count(" -- ") == 16
    assert '[label="1", rank="0"]' in text
    assert '[label="s0 s1", rank="2"]' in text
