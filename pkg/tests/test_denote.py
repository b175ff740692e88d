from most.denote import denote
from most.trace import delete_names_set, interleave_sets

from helpers import decl, naive_product, traces


def test_neg_denotes_two_traces():
    d = decl("doubleneg_spec1.most", "neg")
    assert denote(d.body) == traces(
        d,
        "I i.0 ; O c.1 ; I close i ; O close c",
        "I i.1 ; O c.0 ; I close i ; O close c",
    )


def test_comp_denotes_one_trace():
    d = decl("comp.most", "comp")
    assert denote(d.body) == traces(d, "S chan a [b] ; S close a ; S close b ; O close c")


def test_comp_halves():
    prog = __import__("helpers").load("comp.most")
    P, Q = prog.get("sender"), prog.get("receiver")
    assert denote(P.body) == traces(P, "O chan a [c] ; O close c ; O close a",
                                    "O chan a [c] ; O close a ; O close c")
    assert denote(Q.body) == traces(Q, "I chan a [b] ; I close a ; I close b ; O close c")


def test_double_neg_against_brute_force():
    prog = __import__("helpers").load("doubleneg_spec1.most")
    dn = prog.get("doubleNeg")
    left, right = dn.body.left, dn.body.right
    oracle = set()
    for t1 in denote(left):
        for t2 in denote(right):
            oracle |= naive_product(t1, t2)
    got = denote(dn.body)
    assert got == frozenset(oracle)
    assert got == interleave_sets(denote(left), denote(right))
    assert traces(dn, "I i.0 ; S c.1 ; O o.0 ; I close i ; S close c ; O close o",
                  "I i.0 ; S c.1 ; I close i ; O o.0 ; S close c ; O close o") <= got


def test_double_neg_hidden():
    prog = __import__("helpers").load("doubleneg_spec1.most")
    d = prog.get("doubleNegHidden")
    got = denote(d.body)
    assert len(got) == 4
    assert traces(d, "I i.0 ; O o.0 ; I close i ; O close o",
                  "I i.0 ; I close i ; O o.0 ; O close o") <= got
    # hiding is deletion of the composed denotation
    dn = prog.get("doubleNeg")
    c = [n for n, _ in dn.internal][0]
    assert len(delete_names_set(denote(dn.body), {c})) == 4


def test_denote_is_constraint_free_on_corpus():
    from helpers import CORPUS, load
    for f in sorted(CORPUS.glob("*.most")):
        for d in load(f.name).declarations:
            for t in denote(d.body):
                assert all(e.sign.value in "OIS" for e in t), (f.name, d.name)
