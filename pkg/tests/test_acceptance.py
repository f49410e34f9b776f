"""Exit criteria. Each test logs one PASS/FAIL line in the terminal summary."""

import io
import itertools
import os
import random
import subprocess
import sys
import time

import pytest

from treesquare.cli import main
from treesquare.product import (
    ProductInstance,
    bounds,
    colour_product,
    span_offsets,
    total_span_bound,
    wrap,
)
from treesquare.spancol import colour_tree_square
from treesquare.tree import all_prufer_sequences, format_trees, generate, prufer_decode, tree_from_edges
from treesquare.verify import (
    build_product_graph,
    check_proper,
    check_spans,
    chi_exact,
    clique_certificate,
    is_clique,
    square,
    tree_graph,
)

STAR4 = generate("star", 5)
P3, P4, P5 = (generate("path", n) for n in (3, 4, 5))

SWEEP_SEED = 20240601
SWEEP_SIZE = 200
LEMMA_SAMPLE_SEED = 9
LEMMA_SAMPLE_SIZE = 5000


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue()


def machine(text):
    return dict(line.split("=", 1) for line in text.splitlines())


def write_instance(tmp_path, name, trees):
    p = tmp_path / f"{name}.txt"
    p.write_text(format_trees(trees))
    return p


def colour_and_verify(tmp_path, name, trees):
    """Run ``colour`` then ``verify``; return (colours used, verify report, colour exit, verify exit)."""
    inst_file = write_instance(tmp_path, name, trees)
    col = tmp_path / f"{name}.tsv"
    code_c, rep_c = cli("colour", inst_file, "-o", col, "--machine")
    code_v, rep_v = cli("verify", inst_file, col, "--machine")
    return int(machine(rep_c)["colours_used"]), machine(rep_v), code_c, code_v


def test_c1_grid_exactness(tmp_path, criterion):
    criterion("C1 grid P5xP5 exactness")
    t0 = time.perf_counter()
    used, rep, code_c, code_v = colour_and_verify(tmp_path, "p5p5", [P5, P5])
    inst = ProductInstance((P5, P5))
    chi = chi_exact(square(build_product_graph(inst)))
    b = bounds(inst)
    elapsed = time.perf_counter() - t0
    criterion("C1 grid P5xP5 exactness", f"colours={used} chi={chi} lower={b.lower} upper={b.upper} {elapsed:.2f}s")
    assert code_c == code_v == 0
    assert used == 5 and chi == 5 and b.lower == b.upper == 5
    assert rep["proper_on_square"] == "pass"
    assert elapsed < 5.0


@pytest.mark.parametrize("name, trees", [("k14_p4", [STAR4, P4]), ("p3_cubed", [P3, P3, P3])])
def test_c2_even_degree_exactness(tmp_path, criterion, name, trees):
    label = f"C2 even degrees {name}"
    criterion(label)
    t0 = time.perf_counter()
    used, rep, code_c, code_v = colour_and_verify(tmp_path, name, trees)
    inst = ProductInstance(tuple(trees))
    chi = chi_exact(square(build_product_graph(inst)))
    elapsed = time.perf_counter() - t0
    target = 1 + sum(inst.degrees)
    criterion(label, f"colours={used} chi={chi} target={target} {elapsed:.2f}s")
    assert used == chi == target == 7
    assert code_c == code_v == 0
    assert rep["proper_on_square"] == "pass" and rep["clique_verified"] == "pass"
    assert elapsed < 60.0


def sweep_instances():
    rng = random.Random(SWEEP_SEED)
    for _ in range(SWEEP_SIZE):
        d = rng.choice((1, 2, 3))
        trees = tuple(generate("random", rng.randint(2, 8), seed=rng.randrange(2**32)) for _ in range(d))
        yield ProductInstance(trees)


@pytest.fixture(scope="module")
def sweep():
    """Everything criteria 3 and 5 need, computed once per instance."""
    rows = []
    for inst in sweep_instances():
        assert inst.total <= 512
        sq = square(build_product_graph(inst))
        raw = colour_product(inst)
        wrapped = wrap(raw)
        cert = clique_certificate(inst)
        rows.append(
            dict(
                inst=inst,
                bounds=bounds(inst),
                chi=chi_exact(sq, limit=512, clique=cert.members),
                used=wrapped.num_colours(),
                proper=check_proper(sq, wrapped.to_array()) is None,
                spans=check_spans(inst, raw) is None,
                cert=cert,
                cert_is_clique=is_clique(sq, cert.members),
            )
        )
    return rows


def windows_partition(inst):
    covered = []
    for s, delta in zip(span_offsets(inst), inst.degrees):
        covered += range(s + 1, s + (delta + 1) // 2 + 1)
    return covered == list(range(1, total_span_bound(inst) + 1))


def test_c3_sandwich_sweep(sweep, criterion):
    criterion("C3 bounds sandwich over 200 random products")
    failures = []
    for k, r in enumerate(sweep):
        b = r["bounds"]
        ok = (
            b.lower <= r["chi"] <= r["used"] <= b.upper
            and r["proper"]
            and r["spans"]
            and windows_partition(r["inst"])
        )
        if not ok:
            failures.append((k, r["inst"].dims, b, r["chi"], r["used"]))
    gap = sum(1 for r in sweep if r["chi"] > r["bounds"].lower)
    criterion(
        "C3 bounds sandwich over 200 random products",
        f"failures={len(failures)} instances={len(sweep)} chi_above_lower={gap}",
    )
    assert not failures, failures[:5]


def test_c4_dominates_prior_bound(criterion):
    criterion("C4 upper <= earlier bound, all degree tuples")
    t0 = time.perf_counter()
    stars = {d: generate("star", d + 1) for d in range(2, 13)}
    checked = 0
    bad = []
    for d in (1, 2, 3):
        for degrees in itertools.product(range(2, 13), repeat=d):
            b = bounds(ProductInstance(tuple(stars[x] for x in degrees)))
            strict = any(x >= 4 for x in degrees)
            if b.jmv is None or b.upper > b.jmv or (strict and b.upper == b.jmv):
                bad.append(degrees)
            checked += 1
    elapsed = time.perf_counter() - t0
    criterion("C4 upper <= earlier bound, all degree tuples", f"tuples={checked} bad={len(bad)} {elapsed:.3f}s")
    assert not bad
    assert elapsed < 1.0


def test_c5_clique_certificate(sweep, criterion):
    criterion("C5 clique certificate over the C3 instances")
    bad = [
        k
        for k, r in enumerate(sweep)
        if not r["cert_is_clique"] or r["cert"].size != 1 + sum(r["inst"].degrees) or r["cert"].size > r["chi"]
    ]
    criterion("C5 clique certificate over the C3 instances", f"failures={len(bad)} instances={len(sweep)}")
    assert not bad


def lemma_trees():
    for n in range(2, 9):
        for seq in all_prufer_sequences(n):
            yield tree_from_edges(prufer_decode(seq, n))
    rng = random.Random(LEMMA_SAMPLE_SEED)
    for _ in range(LEMMA_SAMPLE_SIZE):
        yield tree_from_edges(prufer_decode([rng.randrange(9) for _ in range(7)], 9))


def test_c6_tree_lemma_exhaustive(criterion):
    criterion("C6 single-tree window colouring, n <= 9")
    t0 = time.perf_counter()
    checked = failures = 0
    for t in lemma_trees():
        sq = square(tree_graph(t))
        for s in (0, 3):
            c = colour_tree_square(t, s)
            lo, hi = s + 1, s + (t.max_degree + 1) // 2
            if check_proper(sq, c.colour) is not None or not all(lo <= x <= hi for x in c.spans()):
                failures += 1
            checked += 1
    elapsed = time.perf_counter() - t0
    criterion("C6 single-tree window colouring, n <= 9", f"checks={checked} failures={failures} {elapsed:.1f}s")
    assert failures == 0
    assert elapsed < 120.0


def test_c7_cli_determinism(tmp_path, criterion):
    criterion("C7 byte-identical CLI output")
    cases = {"p5p5": [P5, P5], "k14_p4": [STAR4, P4], "p3_cubed": [P3, P3, P3]}
    outputs = []
    for run, hashseed in enumerate(("1", "2")):
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        blobs = []
        for name, trees in cases.items():
            inst_file = write_instance(tmp_path, name, trees)
            col = tmp_path / f"{name}.{run}.tsv"
            for argv in (["colour", inst_file, "-o", col], ["bounds", inst_file, "--exact"]):
                proc = subprocess.run(
                    [sys.executable, "-m", "treesquare", *map(str, argv)],
                    capture_output=True, env=env, check=True,
                )
                blobs.append(proc.stdout)
            blobs.append(col.read_bytes())
        outputs.append(blobs)
    same = outputs[0] == outputs[1]
    criterion("C7 byte-identical CLI output", f"artifacts={len(outputs[0])} identical={same}")
    assert same
